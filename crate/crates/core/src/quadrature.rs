//! Adaptive Simpson quadrature.
//!
//! Expected scores of the continuous mixture components are integrated piece
//! by piece: callers split the range at every kink or jump of the integrand,
//! so each piece is smooth and Simpson's rule converges quickly.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[lo, hi]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let mid = 0.5 * (lo + hi);
    let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
    let whole = simpson(lo, hi, flo, fmid, fhi);
    let mut ok = true;
    let value = recurse(&f, lo, hi, flo, fmid, fhi, whole, tol, MAX_DEPTH, &mut ok);
    if ok && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Quadrature { lo, hi, tol })
    }
}

/// Integrates over `[lo, hi]` after splitting at every interior point of
/// `breaks`. The tolerance is shared evenly between the pieces.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<f64> {
    if hi <= lo {
        return Ok(0.0);
    }
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|b| b.is_finite() && *b > lo && *b < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);
    let piece_tol = tol / (edges.len() - 1) as f64;
    let mut total = 0.0;
    for w in edges.windows(2) {
        total += adaptive_simpson(&f, w[0], w[1], piece_tol)?;
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    ok: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 {
        *ok = false;
        return left + right + delta / 15.0;
    }
    // the piece is too narrow to split further in floating point
    if !(lm > a && rm < b && m > a && m < b) {
        return left + right + delta / 15.0;
    }
    if delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, ok)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_up_to_cubic_are_exact() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 1e-12).unwrap();
        // ∫ x³ - 2x + 1 = [x⁴/4 - x² + x] from -1 to 2 = (4 - 4 + 2) - (1/4 - 1 - 1)
        assert!((v - 3.75).abs() < 1e-13);
    }

    #[test]
    fn smooth_transcendental() {
        let v = adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn kinks_are_handled_by_splitting() {
        let f = |x: f64| (x - 0.3).abs();
        let v = integrate_piecewise(f, 0.0, 1.0, &[0.3], 1e-12).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-13);
    }

    #[test]
    fn empty_range_is_zero() {
        assert_eq!(adaptive_simpson(|_| 1.0, 1.0, 1.0, 1e-9).unwrap(), 0.0);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        assert!(adaptive_simpson(|x| 1.0 / x, 0.0, 1.0, 1e-9).is_err());
    }
}
