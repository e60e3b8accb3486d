//! Selective identification and exhaustive scoring for α-prediction intervals.
//!
//! A *selective* report is one interval `x` claimed to lie in `ℐ_α(F)`; it is
//! checked by `V_sel(x, y) = 1{y ∈ [x₁, x₂]} − α`. An *exhaustive* report is a
//! whole [`IntervalFamily`] `A`, scored against a finite measure μ on
//! `U = {(u₁, u₂) : u₁ ≤ u₂}` with
//!
//! ```text
//! S_μ(A, y) = (1 − α) μ(Q_y ∖ A) + α μ(A ∖ Q_y),   Q_y = [−∞, y] × [y, ∞].
//! ```
//!
//! Taking μ = δ_u gives the elementary scores behind Murphy diagrams.

use rayon::prelude::*;

use crate::dist::Distribution;
use crate::error::{check_level, Error, Result};
use crate::ext::ExtReal;
use crate::interval_family::{Interval, IntervalFamily};
use crate::util::linspace;

/// Finite nonnegative measure on `U` with finitely many atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMeasure {
    atoms: Vec<(Interval, f64)>,
}

impl PointMeasure {
    pub fn new(atoms: Vec<(Interval, f64)>) -> Result<Self> {
        if atoms.iter().any(|(_, w)| !w.is_finite() || *w < 0.0) {
            return Err(Error::param("point-measure weights must be finite and nonnegative"));
        }
        Ok(PointMeasure { atoms })
    }

    /// `δ_u`.
    pub fn dirac(u: Interval) -> Self {
        PointMeasure {
            atoms: vec![(u, 1.0)],
        }
    }

    /// Unit weights on the `res × res` product grid of the box
    /// `[x0, x1] × [y0, y1]`, restricted to points with `u₁ ≤ u₂`.
    pub fn uniform_grid(box_: [f64; 4], res: usize) -> Result<Self> {
        let [x0, y0, x1, y1] = box_;
        if box_.iter().any(|v| !v.is_finite()) || x0 > x1 || y0 > y1 || res == 0 {
            return Err(Error::param("mu box must be finite with x0 <= x1, y0 <= y1 and res >= 1"));
        }
        let us = linspace(x0, x1, res);
        let vs = linspace(y0, y1, res);
        let mut atoms = Vec::new();
        for &u1 in &us {
            for &u2 in &vs {
                if u1 <= u2 {
                    atoms.push((Interval::new(u1, u2)?, 1.0));
                }
            }
        }
        if atoms.is_empty() {
            return Err(Error::param("mu box has no points with u1 <= u2"));
        }
        Ok(PointMeasure { atoms })
    }

    pub fn atoms(&self) -> &[(Interval, f64)] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }
}

/// Whether `u ∈ Q_y`, i.e. `y ∈ [u₁, u₂]`.
fn in_quadrant(u: &Interval, y: f64) -> bool {
    u.contains(y)
}

/// `V_sel(x, y) = 1{y ∈ [x₁, x₂]} − α`.
pub fn v_selective(x: &Interval, y: f64, alpha: f64) -> f64 {
    f64::from(u8::from(x.contains(y))) - alpha
}

/// `E_F V_sel(x, Y) = F([x₁, x₂]) − α`; nonnegative exactly when `x ∈ ℐ_α(F)`.
pub fn expected_v_selective(x: &Interval, f: &Distribution, alpha: f64) -> Result<f64> {
    Ok(f.prob_closed_interval(x.lo(), x.hi())? - alpha)
}

/// `S_exh(A, y) = α μ(A) − μ(Q_y ∩ A)`.
pub fn exhaustive_score(a: &IntervalFamily, y: f64, alpha: f64, mu: &PointMeasure) -> f64 {
    let mut total = 0.0;
    for (u, w) in &mu.atoms {
        if a.contains(u) {
            total += w * alpha;
            if in_quadrant(u, y) {
                total -= w;
            }
        }
    }
    total
}

/// `S_μ(A, y) = (1 − α) μ(Q_y ∖ A) + α μ(A ∖ Q_y)`, summed atom by atom in
/// index order.
pub fn normalized_score(a: &IntervalFamily, y: f64, alpha: f64, mu: &PointMeasure) -> f64 {
    mu.atoms
        .iter()
        .fold(0.0, |acc, (u, w)| acc + w * elementary_score(a, y, alpha, u))
}

/// `S_u(A, y)`: the normalised score for `μ = δ_u`.
pub fn elementary_score(a: &IntervalFamily, y: f64, alpha: f64, u: &Interval) -> f64 {
    match (a.contains(u), in_quadrant(u, y)) {
        (false, true) => 1.0 - alpha,
        (true, false) => alpha,
        _ => 0.0,
    }
}

/// `E_F S_u(A, Y) = (1 − α) 1{u ∉ A} F([u₁, u₂]) + α 1{u ∈ A} (1 − F([u₁, u₂]))`.
pub fn expected_elementary(
    a: &IntervalFamily,
    f: &Distribution,
    alpha: f64,
    u: &Interval,
) -> Result<f64> {
    let p = f.prob_closed_interval(u.lo(), u.hi())?;
    Ok(if a.contains(u) {
        alpha * (1.0 - p)
    } else {
        (1.0 - alpha) * p
    })
}

/// `E_F S_μ(A, Y)`, exact for point measures.
pub fn expected_normalized_score(
    a: &IntervalFamily,
    f: &Distribution,
    alpha: f64,
    mu: &PointMeasure,
) -> Result<f64> {
    let mut total = 0.0;
    for (u, w) in &mu.atoms {
        total += w * expected_elementary(a, f, alpha, u)?;
    }
    Ok(total)
}

/// Expected elementary scores: one row per family, one column per `u`.
pub fn murphy_expected(
    families: &[IntervalFamily],
    f: &Distribution,
    alpha: f64,
    u_grid: &[Interval],
) -> Result<Vec<Vec<f64>>> {
    check_level("alpha", alpha, "(0, 1]")?;
    families
        .par_iter()
        .map(|a| {
            u_grid
                .iter()
                .map(|u| expected_elementary(a, f, alpha, u))
                .collect()
        })
        .collect()
}

/// Average elementary scores over cases. `forecasts[j][t]` is forecaster
/// `j`'s family for case `t`.
pub fn murphy_empirical(
    forecasts: &[Vec<IntervalFamily>],
    observations: &[f64],
    alpha: f64,
    u_grid: &[Interval],
) -> Result<Vec<Vec<f64>>> {
    check_level("alpha", alpha, "(0, 1]")?;
    if forecasts.is_empty() {
        return Err(Error::param("at least one forecaster is required"));
    }
    if observations.is_empty() {
        return Err(Error::param("at least one case is required"));
    }
    for row in forecasts {
        if row.len() != observations.len() {
            return Err(Error::LengthMismatch {
                what: "forecast cases vs observations",
                left: row.len(),
                right: observations.len(),
            });
        }
    }
    let n = observations.len() as f64;
    Ok(forecasts
        .iter()
        .map(|row| {
            u_grid
                .par_iter()
                .map(|u| {
                    row.iter()
                        .zip(observations)
                        .fold(0.0, |acc, (a, y)| acc + elementary_score(a, *y, alpha, u))
                        / n
                })
                .collect()
        })
        .collect())
}

/// Per-case realised scores and their mean.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreReport {
    pub cases: Vec<(String, f64)>,
    /// `+∞` as soon as one case scores `+∞`.
    pub mean: f64,
}

impl ScoreReport {
    pub fn new(cases: Vec<(String, f64)>) -> Self {
        let mean = if cases.is_empty() {
            f64::NAN
        } else if cases.iter().any(|(_, s)| *s == f64::INFINITY) {
            f64::INFINITY
        } else {
            cases.iter().map(|(_, s)| s).sum::<f64>() / cases.len() as f64
        };
        ScoreReport { cases, mean }
    }

    /// CSV with header `case_id,score` and a final `mean` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("case_id,score\n");
        for (id, s) in &self.cases {
            out.push_str(&format!("{id},{}\n", ExtReal::new(*s)));
        }
        out.push_str(&format!("mean,{}\n", ExtReal::new(self.mean)));
        out
    }
}

/// Realised identification average `(1/N) Σ V_sel(x_t, y_t)` and its standard
/// error. A mean near zero indicates calibrated α-intervals.
pub fn calibration_stat(intervals: &[Interval], observations: &[f64], alpha: f64) -> Result<(f64, f64)> {
    check_level("alpha", alpha, "(0, 1]")?;
    if intervals.len() != observations.len() {
        return Err(Error::LengthMismatch {
            what: "intervals vs observations",
            left: intervals.len(),
            right: observations.len(),
        });
    }
    let n = intervals.len();
    if n < 2 {
        return Err(Error::param("calibration needs at least two cases"));
    }
    let v: Vec<f64> = intervals
        .iter()
        .zip(observations)
        .map(|(x, y)| v_selective(x, *y, alpha))
        .collect();
    let mean = v.iter().sum::<f64>() / n as f64;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok((mean, (var / n as f64).sqrt()))
}
