use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sss_delta::footprint::{approx_footprint, exact_footprint, Ball, Cylinder, DeltaRobot};
use sss_delta::geom::{dist_so3, quat_to_matrix, BoxT, Configuration, Point3, Quaternion};
use sss_delta::oracle::{configuration_clearance, random_configuration};
use sss_delta::planner::{plan, PlannerInput, PlannerOptions, Verdict};
use sss_delta::predicate::{build_features, BoxFootprint, Feature, Mesh};
use sss_delta::sep::{sep_gt, sep_value, Primitive};
use sss_delta::so3::{chart_map, project_to_cubic, split_rot, ChartBox, ChartId, RotBox};

fn point(r: f64) -> impl Strategy<Value = Point3> {
    prop::array::uniform3(-r..r).prop_map(Point3::from_array)
}

fn unit_quat() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("nonzero", |a| a.iter().map(|v| v * v).sum::<f64>() > 1e-3)
        .prop_map(|a| Quaternion::from_array(a).normalized().unwrap())
}

fn chart_box() -> impl Strategy<Value = ChartBox> {
    (0u8..4, 0u32..6, prop::array::uniform3(0u64..1 << 20)).prop_map(|(c, depth, idx)| ChartBox {
        chart: ChartId(c),
        depth,
        idx: idx.map(|i| i % (1 << depth)),
    })
}

fn point_segment(p: Point3, a: Point3, b: Point3) -> f64 {
    let d = b - a;
    let t = ((p - a).dot(d) / d.norm2()).clamp(0.0, 1.0);
    p.dist(a + d * t)
}

fn point_cylinder(p: Point3, c: &Cylinder) -> f64 {
    let axis = c.p2 - c.p1;
    let len = axis.norm();
    let u = axis * (1.0 / len);
    let h = (p - c.p1).dot(u);
    let radial = (p - c.p1 - u * h).norm();
    let dh = (-h).max(h - len).max(0.0);
    let dr = (radial - c.radius).max(0.0);
    (dh * dh + dr * dr).sqrt()
}

fn cube(c: Point3, s: f64) -> Mesh {
    let vertices = (0..8)
        .map(|k| {
            let f = |bit: usize, v: f64| if k & bit != 0 { v + s } else { v - s };
            Point3::new(f(1, c.x), f(2, c.y), f(4, c.z))
        })
        .collect();
    let triangles = vec![
        [0, 2, 1], [1, 2, 3], [4, 5, 6], [5, 7, 6], [0, 1, 4], [1, 5, 4],
        [2, 6, 3], [3, 6, 7], [0, 4, 2], [2, 4, 6], [1, 3, 5], [3, 7, 5],
    ];
    Mesh { vertices, triangles }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cubic_projection_round_trips(q in unit_quat()) {
        let (c, p) = project_to_cubic(q);
        let back = chart_map(c, p).unwrap();
        prop_assert!(back.dot(q).abs() > 1.0 - 1e-12);
        prop_assert!(dist_so3(q, back).unwrap() < 1e-6);
    }

    #[test]
    fn rotation_metric_is_a_metric(p in unit_quat(), q in unit_quat(), r in unit_quat()) {
        let pq = dist_so3(p, q).unwrap();
        prop_assert!((pq - dist_so3(q, p).unwrap()).abs() < 1e-12);
        prop_assert!(dist_so3(p, p.neg()).unwrap() < 1e-6);
        prop_assert!(pq <= dist_so3(p, r).unwrap() + dist_so3(r, q).unwrap() + 1e-9);
        prop_assert!(pq <= std::f64::consts::PI + 1e-12);
    }

    #[test]
    fn rotation_matrix_is_orthonormal(q in unit_quat(), v in point(5.0)) {
        let m = quat_to_matrix(q).unwrap();
        prop_assert!((m.det() - 1.0).abs() < 1e-12);
        prop_assert!((m.mul_vec(v).norm() - v.norm()).abs() < 1e-9);
        let composed = quat_to_matrix(q.mul(q)).unwrap();
        let twice = m.mul(&m);
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((composed.0[i][j] - twice.0[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn children_partition_parent(b in chart_box(), seed in any::<u64>()) {
        let kids = split_rot(&RotBox::Chart(b));
        prop_assert_eq!(kids.len(), 8);
        let total: f64 = kids.iter().map(|k| k.width().unwrap().powi(3)).sum();
        prop_assert!((total - b.width().powi(3)).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..16 {
            let p: [f64; 3] = std::array::from_fn(|m| {
                let iv = b.interval(m);
                iv.lo + (iv.hi - iv.lo) * rand::Rng::gen::<f64>(&mut rng)
            });
            let hits = kids
                .iter()
                .filter(|k| k.chart_box().unwrap().contains_point_halfopen(p))
                .count();
            prop_assert_eq!(hits, 1);
        }
    }

    #[test]
    fn approximate_footprint_contains_exact(
        b in chart_box(),
        c in point(3.0),
        hw_exp in 0i32..6,
        scale in 0.25f64..2.0,
        seed in any::<u64>(),
    ) {
        let robot = DeltaRobot::scaled(scale).unwrap();
        let bt = BoxT::new(c, 0.5f64.powi(hw_exp));
        let br = RotBox::Chart(b);
        let approx = approx_footprint(&bt, &b.region(), &robot);
        let fp = BoxFootprint::new(&bt, &br, &robot).unwrap();
        let (bc, br_) = fp.bounding_ball();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..32 {
            let g = random_configuration(&bt, &br, &mut rng);
            let [a, o, bb] = exact_footprint(&g, &robot);
            for (u, v) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (0.3, 0.3), (0.5, 0.5), (0.7, 0.1)] {
                let p = o + (a - o) * u + (bb - o) * v;
                prop_assert!(approx.contains(p, 1e-9), "{:?} outside {}", p, approx.describe());
                prop_assert!(p.dist(bc) <= br_ + 1e-9);
            }
        }
    }

    #[test]
    fn ball_separation_matches_distance(
        c in point(3.0),
        r in 0.01f64..1.5,
        a in point(3.0),
        b in point(3.0),
        s in 0.0f64..2.0,
    ) {
        prop_assume!(a.dist(b) > 1e-3);
        let ball = Primitive::Ball(Ball { center: c, radius: r });
        let truth = (point_segment(c, a, b) - r).max(0.0);
        let edge = Feature::Edge(a, b);
        prop_assert!((sep_value(&ball, &edge).unwrap() - truth).abs() < 1e-9);
        prop_assume!((truth - s).abs() > 1e-7);
        prop_assert_eq!(sep_gt(&ball, &edge, s).unwrap(), truth > s);
    }

    #[test]
    fn cylinder_corner_separation_matches_distance(
        p1 in point(2.0),
        p2 in point(2.0),
        r in 0.05f64..1.0,
        q in point(3.0),
        s in 0.0f64..2.0,
    ) {
        prop_assume!(p1.dist(p2) > 1e-2);
        let cyl = Cylinder { p1, p2, radius: r };
        let truth = point_cylinder(q, &cyl);
        let prim = Primitive::Cylinder(cyl);
        let corner = Feature::Corner(q);
        prop_assert!((sep_value(&prim, &corner).unwrap() - truth).abs() < 1e-7);
        prop_assume!((truth - s).abs() > 1e-6);
        prop_assert_eq!(sep_gt(&prim, &corner, s).unwrap(), truth > s);
    }

    #[test]
    fn separation_is_monotone_in_threshold(
        c in point(2.0),
        r in 0.0f64..1.0,
        v in prop::array::uniform3(point(3.0)),
        s in 0.0f64..2.0,
        ds in 0.0f64..1.0,
    ) {
        let Ok(wall) = Feature::wall(v) else { return Ok(()) };
        let prim = Primitive::FatSegment { a: c, b: c + Point3::new(0.5, -0.25, 0.1), radius: r };
        if sep_gt(&prim, &wall, s + ds).unwrap() {
            prop_assert!(sep_gt(&prim, &wall, s).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn found_paths_are_collision_free(
        center in point(1.0),
        half in 0.2f64..0.6,
        ta in point(2.5),
        tb in point(2.5),
        qa in unit_quat(),
        qb in unit_quat(),
    ) {
        let obstacles = build_features(&cube(center, half)).unwrap();
        let robot = DeltaRobot::scaled(0.25).unwrap();
        let (alpha, beta) = (Configuration::new(ta, qa), Configuration::new(tb, qb));
        let input = PlannerInput {
            alpha,
            beta,
            obstacles: obstacles.clone(),
            b0: BoxT::new(Point3::new(0.0, 0.0, 0.0), 3.0),
            epsilon: 0.25,
            robot,
        };
        let opts = PlannerOptions { audit: true, max_boxes: Some(300_000), ..Default::default() };
        let Ok((res, _)) = plan(input, opts) else { return Ok(()) };
        let free = |g: &Configuration| configuration_clearance(g, &robot, &obstacles, 1.0) > 0.0;
        if res.verdict == Verdict::Path {
            prop_assert_eq!(res.path.first(), Some(&alpha));
            prop_assert_eq!(res.path.last(), Some(&beta));
            for w in res.path.windows(2) {
                for i in 0..=200 {
                    prop_assert!(free(&w[0].interpolate(&w[1], i as f64 / 200.0)));
                }
            }
        } else {
            prop_assert!(res.path.is_empty());
        }
        if !free(&alpha) || !free(&beta) {
            prop_assert_eq!(res.verdict, Verdict::NoPath);
        }
    }
}
