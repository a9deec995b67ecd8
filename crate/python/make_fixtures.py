"""Generate the scene and run-config fixtures under fixtures/.

The wall-with-gap family: a slab |x| <= T with a square hole |y|,|z| <= h.
Moving straight along the x axis with the triangle held in the z = 0 plane,
symmetric about the axis, keeps the robot within 1/sqrt(2) of the axis, so the
path clearance is h - 1/sqrt(2). The hole is sized so that this equals
25 * eps * diameter for each eps.
"""

import json
import math
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "fixtures"
T = 0.25
DIAMETER = math.sqrt(2.0)
EPSILONS = [0.1, 0.05, 0.025]
# Rotation taking A=(1,0,0) to (c,-c,0) and B=(0,1,0) to (c,c,0): -45 deg about z.
Q_AXIS = [math.cos(math.pi / 8), 0.0, 0.0, -math.sin(math.pi / 8)]


def cuboid(lo, hi, name):
    v = [[hi[0] if k & 1 else lo[0], hi[1] if k & 2 else lo[1], hi[2] if k & 4 else lo[2]] for k in range(8)]
    t = [[0, 2, 1], [1, 2, 3], [4, 5, 6], [5, 7, 6], [0, 1, 4], [1, 5, 4],
         [2, 6, 3], [3, 6, 7], [0, 4, 2], [2, 4, 6], [1, 3, 5], [3, 7, 5]]
    return {"name": name, "vertices": v, "triangles": t}


def oriented(quad, verts, outward):
    """Two triangles of a planar quad, wound so the normal points along `outward`."""
    a, b, c, _ = (verts[i] for i in quad)
    u = [b[i] - a[i] for i in range(3)]
    w = [c[i] - a[i] for i in range(3)]
    n = [u[1] * w[2] - u[2] * w[1], u[2] * w[0] - u[0] * w[2], u[0] * w[1] - u[1] * w[0]]
    if sum(n[i] * outward[i] for i in range(3)) < 0:
        quad = quad[::-1]
    return [[quad[0], quad[1], quad[2]], [quad[0], quad[2], quad[3]]]


def frame(t, outer, h, name):
    """Slab |x| <= t, |y|,|z| <= outer, with the square hole |y|,|z| < h removed."""
    g = [-outer, -h, h, outer]
    verts, idx = [], {}
    for xi, x in enumerate([-t, t]):
        for yi, y in enumerate(g):
            for zi, z in enumerate(g):
                idx[(xi, yi, zi)] = len(verts)
                verts.append([x, y, z])
    tris = []
    for xi, nx in [(0, -1.0), (1, 1.0)]:
        for yi in range(3):
            for zi in range(3):
                if yi == 1 and zi == 1:
                    continue
                q = [idx[(xi, yi, zi)], idx[(xi, yi + 1, zi)], idx[(xi, yi + 1, zi + 1)], idx[(xi, yi, zi + 1)]]
                tris += oriented(q, verts, [nx, 0, 0])
    # Outer sides and hole walls: quads spanning x between grid-adjacent points.
    def side(p, q, outward):
        quad = [idx[(0,) + p], idx[(0,) + q], idx[(1,) + q], idx[(1,) + p]]
        return oriented(quad, verts, outward)

    for k in range(3):
        tris += side((0, k), (0, k + 1), [0, -1, 0])
        tris += side((3, k), (3, k + 1), [0, 1, 0])
        tris += side((k, 0), (k + 1, 0), [0, 0, -1])
        tris += side((k, 3), (k + 1, 3), [0, 0, 1])
    tris += side((1, 1), (1, 2), [0, 1, 0])
    tris += side((2, 1), (2, 2), [0, -1, 0])
    tris += side((1, 1), (2, 1), [0, 0, 1])
    tris += side((1, 2), (2, 2), [0, 0, -1])
    return {"name": name, "vertices": verts, "triangles": tris}


def config(alpha, beta, eps, hw, q=Q_AXIS, qb=None):
    return {
        "alpha": {"t": alpha, "q": q},
        "beta": {"t": beta, "q": qb or q},
        "epsilon": eps,
        "b0": {"center": [0.0, 0.0, 0.0], "halfwidth": hw},
        "strategy": "bfs",
        "split": "auto",
        "robot_scale": 1.0,
        "seed": 7,
    }


def write(name, obj):
    (OUT / name).write_text(json.dumps(obj, indent=1) + "\n")


def main():
    OUT.mkdir(exist_ok=True)
    write("empty.scene.json", {"units": "unit", "components": []})
    write("empty.config.json", config([-2.0, -1.0, 0.5], [2.0, 1.5, -0.5], 0.1, 3.0, [1, 0, 0, 0], [0.5, 0.5, 0.5, 0.5]))
    ax = T + 2.0
    for eps in EPSILONS:
        h = 1.0 / math.sqrt(2.0) + 25.0 * eps * DIAMETER + 1e-6
        hw = max(h, ax) + 0.75
        outer = hw + 2.0
        tag = f"{eps:g}"
        write(f"wall_gap_{tag}.scene.json", {"units": "unit", "components": [frame(T, outer, h, "wall")]})
        write(f"wall_sealed_{tag}.scene.json",
              {"units": "unit", "components": [cuboid([-T, -outer, -outer], [T, outer, outer], "wall")]})
        write(f"wall_{tag}.config.json", config([-ax, 0.0, 0.0], [ax, 0.0, 0.0], eps, round(hw, 6)))
    pillars = [
        cuboid([-1.5, -1.5, -3.0], [-0.5, -0.5, 3.0], "pillar0"),
        cuboid([0.5, 0.5, -3.0], [1.5, 1.5, 3.0], "pillar1"),
        cuboid([1.0, -4.0, -4.0], [4.0, -1.0, 4.0], "slab"),
    ]
    thick = cuboid([-1.25, -6.0, -6.0], [1.25, 6.0, 6.0], "slab")
    write("thick_wall.scene.json", {"units": "unit", "components": [thick]})
    cfg = config([-2.5, 0.0, 0.0], [2.5, 0.0, 0.0], 0.1, 3.0, Q_AXIS)
    cfg["max_rot_depth"] = 0
    write("thick_wall.config.json", cfg)
    write("pillars.scene.json", {"units": "unit", "components": pillars})
    write("pillars.config.json", config([-2.2, 2.2, 0.0], [2.2, 0.0, 0.0], 0.1, 3.0, [1, 0, 0, 0]))


if __name__ == "__main__":
    main()
