//! Extremum search for low-degree polynomials on a closed interval (f64).
//!
//! Pieces of degree <= 3 use the closed-form roots of the quadratic derivative.
//! Higher degrees isolate the critical points recursively: between consecutive
//! roots of `q'` the polynomial `q` is monotone, so each sign change brackets
//! exactly one root, which is then refined by bisection.

/// Evaluate `c[0] + c[1] s + ...` by Horner's rule.
pub fn horner(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * s + ci)
}

fn derivative(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(i, &ci)| ci * i as f64).collect()
}

fn trimmed(c: &[f64]) -> &[f64] {
    let mut n = c.len();
    while n > 0 && c[n - 1] == 0.0 {
        n -= 1;
    }
    &c[..n]
}

/// Real roots of `q` inside the open interval `(a, b)`, sorted.
pub fn roots_in(q: &[f64], a: f64, b: f64) -> Vec<f64> {
    let q = trimmed(q);
    let mut out = match q.len() {
        0 | 1 => Vec::new(),
        2 => vec![-q[0] / q[1]],
        3 => quadratic_roots(q[0], q[1], q[2]),
        _ => {
            let mut knots = vec![a];
            knots.extend(roots_in(&derivative(q), a, b));
            knots.push(b);
            let mut roots = Vec::new();
            for w in knots.windows(2) {
                if let Some(r) = bisect(q, w[0], w[1]) {
                    roots.push(r);
                }
            }
            roots
        }
    };
    out.retain(|&r| r > a && r < b && r.is_finite());
    out.sort_by(f64::total_cmp);
    out
}

fn quadratic_roots(c: f64, b: f64, a: f64) -> Vec<f64> {
    // a s^2 + b s + c with a != 0
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let t = -0.5 * (b + b.signum() * sq);
    if t == 0.0 {
        return vec![0.0];
    }
    vec![t / a, c / t]
}

fn bisect(q: &[f64], mut lo: f64, mut hi: f64) -> Option<f64> {
    let mut flo = horner(q, lo);
    let fhi = horner(q, hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = horner(q, mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `max |p(s)|` over `s ∈ [0, w]`.
pub fn max_abs_on(c: &[f64], w: f64) -> f64 {
    let c = trimmed(c);
    let mut best = horner(c, 0.0).abs().max(horner(c, w).abs());
    if c.len() > 2 {
        for r in roots_in(&derivative(c), 0.0, w) {
            best = best.max(horner(c, r).abs());
        }
    }
    best
}

/// `(min, max)` of `p` over `[0, w]`.
pub fn range_on(c: &[f64], w: f64) -> (f64, f64) {
    let c = trimmed(c);
    let mut lo = horner(c, 0.0).min(horner(c, w));
    let mut hi = horner(c, 0.0).max(horner(c, w));
    if c.len() > 2 {
        for r in roots_in(&derivative(c), 0.0, w) {
            let v = horner(c, r);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    (lo, hi)
}
