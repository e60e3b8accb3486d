//! Intervals pinned down by additional specifications.
//!
//! Unlike the full family `ℐ_α(F)`, these functionals single out one interval:
//!
//! * the quantile interval `[q_β, q_{α+β}]`, scored by a sum of pinball losses;
//! * intervals with a fixed lower endpoint `a` (upper endpoint `Γ_α(F)(a)`),
//!   fixed upper endpoint, or fixed midpoint `m` (half-length `d_α(F)(m)`);
//! * intervals anchored at an identifiable functional such as the mean;
//! * the shortest α-intervals, which admit only a function-valued selective
//!   identification, and the essential support (α = 1), which is elicitable
//!   with an infinite-valued score.

use crate::dist::Distribution;
use crate::error::{check_level, Error, Result};
use crate::ext::ExtReal;
use crate::interval_family::Interval;

/// Increasing transform inside a pinball loss.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Transform {
    /// `g(t) = t`; expected scores are finite only under a finite first moment.
    Identity,
    /// `g(t) = atan(t)`, bounded, so expected scores are always finite.
    #[default]
    Atan,
}

impl Transform {
    pub fn apply(self, t: f64) -> f64 {
        match self {
            Transform::Identity => t,
            Transform::Atan => t.atan(),
        }
    }
}

/// `(1{y ≤ x} − β)(g(x) − g(y))`.
pub fn pinball(beta: f64, x: f64, y: f64, g: Transform) -> f64 {
    (f64::from(u8::from(y <= x)) - beta) * (g.apply(x) - g.apply(y))
}

/// `E_F` of the pinball loss at report `x`.
pub fn expected_pinball(beta: f64, x: f64, f: &Distribution, g: Transform) -> Result<f64> {
    f.expect(|y| pinball(beta, x, y, g), &[x])
}

fn check_qi_levels(alpha: f64, beta: f64) -> Result<()> {
    check_level("alpha", alpha, "(0, 1)")?;
    if !(beta > 0.0 && beta < 1.0 - alpha) {
        return Err(Error::InvalidLevel {
            name: "beta",
            value: beta,
            range: "(0, 1 - alpha)",
        });
    }
    Ok(())
}

fn finite_ends(x: &Interval) -> Result<(f64, f64)> {
    match (x.lo().finite(), x.hi().finite()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::param(format!("interval {x} must have finite endpoints"))),
    }
}

/// Score for the quantile interval `[q_β, q_{α+β}]`:
/// `pinball(β, x₁, y) + pinball(α + β, x₂, y)`.
pub fn qi_score(x: &Interval, y: f64, alpha: f64, beta: f64, g: [Transform; 2]) -> Result<f64> {
    check_qi_levels(alpha, beta)?;
    let (x1, x2) = finite_ends(x)?;
    Ok(pinball(beta, x1, y, g[0]) + pinball(alpha + beta, x2, y, g[1]))
}

/// Identification function `(1{y ≤ x₁} − β, 1{y ≤ x₂} − α − β)`.
pub fn qi_ident(x: &Interval, y: f64, alpha: f64, beta: f64) -> (f64, f64) {
    let ind = |b: bool| f64::from(u8::from(b));
    (ind(x.lo() >= y) - beta, ind(x.hi() >= y) - alpha - beta)
}

/// Finite measure on the real line given by weighted points.
#[derive(Clone, Debug, PartialEq)]
pub struct LineMeasure {
    /// sorted by location
    atoms: Vec<(f64, f64)>,
}

impl LineMeasure {
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.iter().any(|(x, w)| !x.is_finite() || !w.is_finite() || *w < 0.0) {
            return Err(Error::param("line-measure atoms need finite locations and weights >= 0"));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(LineMeasure { atoms })
    }

    /// Unit weights on `n` equispaced points of `[lo, hi]`.
    pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(crate::util::linspace(lo, hi, n).into_iter().map(|x| (x, 1.0)).collect())
    }

    pub fn locations(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.0).collect()
    }

    /// `μ([t, ∞))`, decreasing in `t`.
    pub fn upper_tail(&self, t: ExtReal) -> f64 {
        let i = self.atoms.partition_point(|(x, _)| ExtReal::Finite(*x) < t);
        self.atoms[i..].iter().map(|(_, w)| w).sum()
    }

    /// `μ((−∞, t])`, increasing in `t`.
    pub fn cumulative(&self, t: ExtReal) -> f64 {
        let i = self.atoms.partition_point(|(x, _)| ExtReal::Finite(*x) <= t);
        self.atoms[..i].iter().map(|(_, w)| w).sum()
    }
}

/// Score for the interval with fixed lower endpoint `a`, reporting the upper
/// endpoint `x = Γ_α(F)(a)`:
///
/// ```text
/// 1{y ≥ a}(1{y ≤ x} − α)(h(y) − h(x)) + 1{y < a} α h(x),   h(t) = μ([t, ∞)).
/// ```
///
/// When `F` puts no mass below `a` this is a pinball loss in `h`; the second
/// term corrects for mass below `a`.
pub fn fixed_left_score(x: ExtReal, y: f64, alpha: f64, a: f64, mu: &LineMeasure) -> Result<f64> {
    if x < a {
        return Err(Error::InvalidInterval {
            lo: a.to_string(),
            hi: x.to_string(),
        });
    }
    let hx = mu.upper_tail(x);
    Ok(if y >= a {
        let ind = f64::from(u8::from(x >= y));
        (ind - alpha) * (mu.upper_tail(ExtReal::Finite(y)) - hx)
    } else {
        alpha * hx
    })
}

/// Mirror image of [`fixed_left_score`] for a fixed upper endpoint `b`,
/// reporting the lower endpoint `x ≤ b`:
///
/// ```text
/// 1{y ≤ b}(1{y ≥ x} − α)(H(y) − H(x)) + 1{y > b} α H(x),   H(t) = μ((−∞, t]).
/// ```
pub fn fixed_right_score(x: ExtReal, y: f64, alpha: f64, b: f64, mu: &LineMeasure) -> Result<f64> {
    if x > b {
        return Err(Error::InvalidInterval {
            lo: x.to_string(),
            hi: b.to_string(),
        });
    }
    let hx = mu.cumulative(x);
    Ok(if y <= b {
        let ind = f64::from(u8::from(x <= y));
        (ind - alpha) * (mu.cumulative(ExtReal::Finite(y)) - hx)
    } else {
        alpha * hx
    })
}

/// Score for the half-length `x` of the α-interval centred at a fixed `m`:
/// a pinball loss applied to `|y − m|`.
pub fn fixed_mid_score<G: Fn(f64) -> f64>(x: f64, y: f64, m: f64, alpha: f64, g: G) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::param(format!("half-length must be nonnegative (got {x})")));
    }
    let r = (y - m).abs();
    Ok((f64::from(u8::from(r <= x)) - alpha) * (g(x) - g(r)))
}

/// Identifiable functionals used to anchor an interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EndpointFunctional {
    /// `V(x, y) = x − y`
    Mean,
    /// `V(x, y) = 1{y ≤ x} − β`
    Quantile(f64),
    /// `V(x, y) = |1{y ≤ x} − τ|(x − y)`
    Expectile(f64),
}

impl EndpointFunctional {
    pub fn ident(&self, x: f64, y: f64) -> f64 {
        let ind = f64::from(u8::from(y <= x));
        match *self {
            EndpointFunctional::Mean => x - y,
            EndpointFunctional::Quantile(beta) => ind - beta,
            EndpointFunctional::Expectile(tau) => (ind - tau).abs() * (x - y),
        }
    }

    pub fn expected_ident(&self, x: f64, f: &Distribution) -> Result<f64> {
        match *self {
            EndpointFunctional::Mean => Ok(x - f.mean()),
            EndpointFunctional::Quantile(beta) => Ok(f.cdf(x) - beta),
            EndpointFunctional::Expectile(_) => f.expect(|y| self.ident(x, y), &[x]),
        }
    }

    /// The functional's value at `F`.
    pub fn value(&self, f: &Distribution) -> Result<f64> {
        match *self {
            EndpointFunctional::Mean => Ok(f.mean()),
            EndpointFunctional::Quantile(beta) => {
                check_level("beta", beta, "(0, 1)")?;
                Ok(f.lower_quantile(beta).to_f64())
            }
            EndpointFunctional::Expectile(tau) => {
                check_level("tau", tau, "(0, 1)")?;
                // E V(x, Y) is increasing in x; bracket between two quantiles
                let mut lo = f.lower_quantile(1e-9).to_f64();
                let mut hi = f.upper_quantile(1.0 - 1e-9).to_f64();
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    if self.expected_ident(mid, f)? < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                Ok(0.5 * (lo + hi))
            }
        }
    }
}

/// `(V(z₁, y), 1{y ∈ [z₁, z₁ + 2 z₂]} − α)` for the interval starting at the
/// functional `z₁` with *half*-length `z₂`.
pub fn functional_left_ident(z: (f64, f64), y: f64, alpha: f64, v: EndpointFunctional) -> (f64, f64) {
    let (l, b) = z;
    let inside = f64::from(u8::from(l <= y && y <= l + 2.0 * b));
    (v.ident(l, y), inside - alpha)
}

/// `(V(z₁, y), 1{y ∈ [z₁ − z₂, z₁ + z₂]} − α)` for the interval centred at the
/// functional `z₁` with half-length `z₂`.
pub fn functional_mid_ident(z: (f64, f64), y: f64, alpha: f64, v: EndpointFunctional) -> (f64, f64) {
    let (m, b) = z;
    let inside = f64::from(u8::from(m - b <= y && y <= m + b));
    (v.ident(m, y), inside - alpha)
}

/// Expectation of [`functional_left_ident`] under `F`.
pub fn expected_functional_left_ident(
    z: (f64, f64),
    f: &Distribution,
    alpha: f64,
    v: EndpointFunctional,
) -> Result<(f64, f64)> {
    let (l, b) = z;
    Ok((v.expected_ident(l, f)?, f.prob_closed_interval(l, l + 2.0 * b)? - alpha))
}

/// Expectation of [`functional_mid_ident`] under `F`.
pub fn expected_functional_mid_ident(
    z: (f64, f64),
    f: &Distribution,
    alpha: f64,
    v: EndpointFunctional,
) -> Result<(f64, f64)> {
    let (m, b) = z;
    Ok((v.expected_ident(m, f)?, f.prob_closed_interval(m - b, m + b)? - alpha))
}

/// Function-valued selective identification for shortest α-intervals:
/// `a ↦ F([x₁ + a, x₂ + a]) − α` over `a_grid`, plus its value at `a = 0`.
///
/// For continuous, strictly increasing `F`, `x` is a shortest α-interval iff
/// all values are `≤ 0` and the value at 0 vanishes.
pub fn si_selective_ident(
    x: &Interval,
    f: &Distribution,
    alpha: f64,
    a_grid: &[f64],
) -> Result<(Vec<f64>, f64)> {
    check_level("alpha", alpha, "(0, 1)")?;
    let (x1, x2) = finite_ends(x)?;
    let at = |a: f64| -> Result<f64> { Ok(f.prob_closed_interval(x1 + a, x2 + a)? - alpha) };
    let values = a_grid.iter().map(|a| at(*a)).collect::<Result<Vec<_>>>()?;
    Ok((values, at(0.0)?))
}

/// Whether the output of [`si_selective_ident`] satisfies the shortest-interval
/// condition up to `tol`.
pub fn si_condition_holds(values: &[f64], at_zero: f64, tol: f64) -> bool {
    values.iter().all(|v| *v <= tol) && at_zero.abs() <= tol
}

/// `∞·1{y ∉ [a, b]} + g(b) − g(a)`, consistent for the essential support.
pub fn si1_score(x: &Interval, y: f64, g: Transform) -> f64 {
    if !x.contains(y) {
        return f64::INFINITY;
    }
    g.apply(x.hi().to_f64()) - g.apply(x.lo().to_f64())
}

/// Expected [`si1_score`]: `+∞` unless `F([a, b]) = 1`.
pub fn expected_si1_score(x: &Interval, f: &Distribution, g: Transform) -> Result<f64> {
    if f.prob_closed_interval(x.lo(), x.hi())? < 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(g.apply(x.hi().to_f64()) - g.apply(x.lo().to_f64()))
}
