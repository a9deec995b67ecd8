//! Real roots of low-degree polynomials by derivative-based isolation.

/// Evaluate `sum c[i] t^i`.
pub fn eval(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a)
}

/// `sum |c[i]| |t|^i`, the natural scale of `eval(c, t)`.
fn magnitude(c: &[f64], t: f64) -> f64 {
    let t = t.abs();
    c.iter().rev().fold(0.0, |acc, &a| acc * t + a.abs())
}

pub fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, &a)| a * i as f64).collect()
}

/// Drop leading coefficients that are negligible relative to the largest one.
pub fn trim(c: &[f64]) -> &[f64] {
    let big = c.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    let mut n = c.len();
    while n > 0 && c[n - 1].abs() <= 1e-13 * big {
        n -= 1;
    }
    &c[..n]
}

/// `true` if every coefficient vanishes.
pub fn is_zero(c: &[f64]) -> bool {
    c.iter().all(|&a| a == 0.0)
}

/// Sorted real roots of `sum c[i] t^i` (coefficients in increasing degree).
///
/// Roots of the derivative split the line into monotone pieces; each piece
/// with a sign change is bracketed and solved by safeguarded Newton.
/// Critical points where the polynomial nearly vanishes are reported as
/// (even-multiplicity) roots.
pub fn real_roots(coeffs: &[f64]) -> Vec<f64> {
    let c = trim(coeffs);
    match c.len() {
        0 | 1 => return vec![],
        2 => return vec![-c[0] / c[1]],
        _ => {}
    }
    let n = c.len() - 1;
    let lead = c[n];
    let bound = 1.0 + c[..n].iter().map(|a| (a / lead).abs()).fold(0.0, f64::max);
    let crit = real_roots(&derivative(c));
    let mut knots = vec![-bound];
    knots.extend(crit.iter().copied().filter(|t| t.abs() < bound));
    knots.push(bound);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (eval(c, a), eval(c, b));
        if fa == 0.0 {
            roots.push(a);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            roots.push(solve_bracketed(c, a, b, fa));
        }
    }
    if eval(c, bound) == 0.0 {
        roots.push(bound);
    }
    for &t in &crit {
        if eval(c, t).abs() <= 1e-12 * magnitude(c, t) {
            roots.push(t);
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs())));
    roots.into_iter().map(|t| polish(c, t)).collect()
}

fn solve_bracketed(c: &[f64], mut a: f64, mut b: f64, fa: f64) -> f64 {
    let d = derivative(c);
    let sa = fa.signum();
    let mut t = 0.5 * (a + b);
    for _ in 0..200 {
        let f = eval(c, t);
        if f == 0.0 {
            return t;
        }
        if f.signum() == sa {
            a = t;
        } else {
            b = t;
        }
        let df = eval(&d, t);
        let newton = t - f / df;
        t = if df != 0.0 && newton > a && newton < b { newton } else { 0.5 * (a + b) };
        if (b - a).abs() <= 4.0 * f64::EPSILON * (1.0 + t.abs()) {
            break;
        }
    }
    t
}

/// A few Newton steps, kept only while the residual shrinks.
pub fn polish(c: &[f64], mut t: f64) -> f64 {
    let d = derivative(c);
    let mut f = eval(c, t).abs();
    for _ in 0..8 {
        let df = eval(&d, t);
        if df == 0.0 || f == 0.0 {
            break;
        }
        let next = t - eval(c, t) / df;
        let fn_ = eval(c, next).abs();
        if !(fn_ < f) {
            break;
        }
        t = next;
        f = fn_;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(rs: &[f64]) -> Vec<f64> {
        let mut c = vec![1.0];
        for &r in rs {
            let mut n = vec![0.0; c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                n[i] -= a * r;
                n[i + 1] += a;
            }
            c = n;
        }
        c
    }

    #[test]
    fn simple_quartic() {
        let c = from_roots(&[-2.0, -0.5, 1.0, 3.0]);
        let r = real_roots(&c);
        assert_eq!(r.len(), 4);
        for (a, b) in r.iter().zip([-2.0, -0.5, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn double_root_is_found() {
        let c = from_roots(&[0.25, 0.25, -1.0, 2.0]);
        let r = real_roots(&c);
        assert!(r.iter().any(|t| (t - 0.25).abs() < 1e-7), "{r:?}");
        assert!(r.iter().any(|t| (t + 1.0).abs() < 1e-12));
    }

    #[test]
    fn no_real_roots() {
        assert!(real_roots(&[1.0, 0.0, 1.0]).is_empty());
        assert!(real_roots(&[2.0, 0.0, 1.0, 0.0, 1.0]).is_empty());
    }

    #[test]
    fn tiny_leading_coefficient_is_trimmed() {
        let r = real_roots(&[-1.0, 1.0, 1e-20]);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).abs() < 1e-14);
    }
}
