//! Executable counterexamples and demonstrations.
//!
//! Each construction here backs a negative or structural result about
//! prediction intervals: distinct distributions with identical interval
//! families, strictly nested families, the shortest-interval table for
//! two-point mixtures, and the continuity argument against selective scores
//! for shortest intervals. [`consistency_scan`] is the generic harness that
//! compares expected scores of candidate reports.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::dist::Distribution;
use crate::error::{check_level, Error, Result};
use crate::ext::ExtReal;
use crate::interval_family::{gamma_alpha, shortest_intervals, Interval, IntervalFamily};
use crate::interval_scores::{expected_normalized_score, PointMeasure};
use crate::specified_intervals::{expected_pinball, Transform};
use crate::util::linspace;

/// Cells per cosine period in [`noninjective_density`].
pub const COSINE_CELLS_PER_PERIOD: usize = 120;
/// Cells per sine period in [`wrapped_sine`].
pub const SINE_CELLS_PER_PERIOD: usize = 200;

/// The path `λ ↦ (1 − λ) F₀ + λ F₁`.
#[derive(Clone, Debug)]
pub struct MixturePath {
    pub f0: Distribution,
    pub f1: Distribution,
}

impl MixturePath {
    pub fn at(&self, lambda: f64) -> Result<Distribution> {
        Distribution::mix_pair(&self.f0, &self.f1, lambda)
    }
}

/// Knots of a grid-density law, if it is one.
pub fn grid_knots(f: &Distribution) -> Option<&[f64]> {
    match f.law() {
        crate::dist::Law::Grid(g) => Some(g.knots()),
        _ => None,
    }
}

/// A density on `[0, 1]` whose α-prediction-interval family does not depend
/// on `a`.
///
/// When `1/α = n` is an integer the density is `1 − a cos(2πny)`, stored with
/// exact cell masses on a grid aligned to the cosine period. Otherwise, with
/// `β = 1 mod α`, each α-period carries the low level `1 − a(α/β − 1)` on a
/// set of measure β and the high level `1 + a` elsewhere, so every window of
/// length α has mass α.
pub fn noninjective_density(a: f64, alpha: f64) -> Result<Distribution> {
    check_level("alpha", alpha, "(0, 1)")?;
    let n = (1.0 / alpha).round();
    if (n * alpha - 1.0).abs() <= 1e-12 {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::param(format!("a = {a} must lie in [0, 1]")));
        }
        let n = n as usize;
        let knots = linspace(0.0, 1.0, n * COSINE_CELLS_PER_PERIOD + 1);
        let w = 2.0 * PI * n as f64;
        let densities = knots
            .windows(2)
            .map(|k| {
                let mass = (k[1] - k[0]) - a / w * ((w * k[1]).sin() - (w * k[0]).sin());
                mass / (k[1] - k[0])
            })
            .collect();
        return Distribution::grid(knots, densities);
    }

    let beta = 1.0 % alpha;
    let bound = beta / (alpha - beta);
    if !(0.0..=bound).contains(&a) {
        return Err(Error::param(format!("a = {a} must lie in [0, {bound}]")));
    }
    // at a = bound the low level is zero up to rounding
    let low = (1.0 - a * (alpha / beta - 1.0)).max(0.0);
    let high = 1.0 + a;
    // the low set takes the share β/α of both [0, β) and [β, α) in every
    // period, which keeps each window at mass α and the total at 1
    let pieces = [
        (0.0, low),
        (beta * beta / alpha, high),
        (beta, low),
        (beta + beta * (alpha - beta) / alpha, high),
    ];
    let mut knots = Vec::new();
    let mut densities = Vec::new();
    let periods = (1.0 / alpha).floor() as usize;
    'outer: for j in 0..=periods {
        let base = j as f64 * alpha;
        for (off, level) in pieces {
            let start = base + off;
            if start >= 1.0 - 1e-14 {
                break 'outer;
            }
            knots.push(start);
            densities.push(level);
        }
    }
    knots.push(1.0);
    Distribution::grid(knots, densities)
}

/// `F_b(y) = y + b sin(2πny)` on `[0, 1]`.
pub fn wrapped_sine_cdf(b: f64, n: usize, y: f64) -> f64 {
    let y = y.clamp(0.0, 1.0);
    y + b * (2.0 * PI * n as f64 * y).sin()
}

/// Grid density with CDF `F_b` at every knot; the knots are aligned to the
/// period `1/n`, so `F_b(y + k/n) − F_b(y) = k/n` holds at knots.
pub fn wrapped_sine(b: f64, n: usize) -> Result<Distribution> {
    if n == 0 {
        return Err(Error::param("n must be positive"));
    }
    let bound = 1.0 / (2.0 * PI * n as f64);
    if !(0.0..bound).contains(&b) {
        return Err(Error::param(format!("b = {b} must lie in [0, {bound})")));
    }
    let knots = linspace(0.0, 1.0, n * SINE_CELLS_PER_PERIOD + 1);
    let densities = knots
        .windows(2)
        .map(|k| (wrapped_sine_cdf(b, n, k[1]) - wrapped_sine_cdf(b, n, k[0])) / (k[1] - k[0]))
        .collect();
    Distribution::grid(knots, densities)
}

/// Two Γ-functions sampled on a grid, with the verdict on `ℐ(inner) ⊆ ℐ(outer)`.
#[derive(Clone, Debug)]
pub struct ProperSubsetReport {
    pub alpha: f64,
    pub inner: Distribution,
    pub outer: Distribution,
    pub grid: Vec<f64>,
    /// `+inf` marks lower endpoints outside the domain.
    pub gamma_inner: Vec<ExtReal>,
    pub gamma_outer: Vec<ExtReal>,
    /// Admissible right endpoints `c` for the uniform construction.
    pub c_range: Option<(f64, f64)>,
    pub contained: bool,
    pub strict: bool,
    /// `c` sits on the edge of its admissible range.
    pub limit_case: bool,
}

impl ProperSubsetReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("a,gamma_inner,gamma_outer\n");
        for ((a, gi), go) in self.grid.iter().zip(&self.gamma_inner).zip(&self.gamma_outer) {
            let _ = writeln!(s, "{a},{gi},{go}");
        }
        s
    }

    pub fn passed(&self) -> bool {
        self.contained && self.strict
    }
}

fn gamma_or_inf(f: &Distribution, alpha: f64, a: f64) -> Result<ExtReal> {
    match gamma_alpha(f, alpha, a) {
        Err(Error::OutOfDomain { .. }) => Ok(ExtReal::PosInf),
        other => other,
    }
}

/// Strictly nested interval families.
///
/// For α ≥ 1/2 the inner law is `U(−1/2, c)` and the outer `U(0, 1)`; the
/// containment holds for `c ∈ [1 + (1 − α)/(2α), 1 + α/(2(1 − α))]`, and `c`
/// defaults to the midpoint. For α < 1/2 the inner law is `δ₀` and the outer
/// `½δ₀ + ½δ₁`.
pub fn proper_subset_demo(alpha: f64, c: Option<f64>) -> Result<ProperSubsetReport> {
    check_level("alpha", alpha, "(0, 1)")?;
    let (inner, outer, c_range, limit_case) = if alpha >= 0.5 {
        let b = -0.5;
        let lo = 1.0 - b * (1.0 - alpha) / alpha;
        let hi = 1.0 - b * alpha / (1.0 - alpha);
        let c = c.unwrap_or(0.5 * (lo + hi));
        let limit = (c - lo).abs() <= 1e-12 || (c - hi).abs() <= 1e-12;
        (Distribution::uniform(b, c)?, Distribution::uniform(0.0, 1.0)?, Some((lo, hi)), limit)
    } else {
        let two = Distribution::mixture(vec![
            (0.5, Distribution::dirac(0.0)?),
            (0.5, Distribution::dirac(1.0)?),
        ])?;
        (Distribution::dirac(0.0)?, two, None, false)
    };
    let grid = linspace(-1.5, 1.0, 501);
    let gamma_inner = grid
        .iter()
        .map(|a| gamma_or_inf(&inner, alpha, *a))
        .collect::<Result<Vec<_>>>()?;
    let gamma_outer = grid
        .iter()
        .map(|a| gamma_or_inf(&outer, alpha, *a))
        .collect::<Result<Vec<_>>>()?;
    let nested_domains = inner.upper_quantile(1.0 - alpha) <= outer.upper_quantile(1.0 - alpha);
    let contained = nested_domains && gamma_inner.iter().zip(&gamma_outer).all(|(i, o)| i >= o);
    let strict = contained && gamma_inner.iter().zip(&gamma_outer).any(|(i, o)| i > o);
    Ok(ProperSubsetReport {
        alpha,
        inner,
        outer,
        grid,
        gamma_inner,
        gamma_outer,
        c_range,
        contained,
        strict,
        limit_case,
    })
}

/// One row of the shortest-interval table for `(1 − λ)δ₀ + λδ₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct SiRow {
    pub lambda: f64,
    pub found: Vec<Interval>,
    pub expected: Vec<Interval>,
}

impl SiRow {
    pub fn matches(&self) -> bool {
        self.found == self.expected
    }
}

/// Closed-form `SI_level((1 − λ)δ₀ + λδ₁)`, with regime boundaries compared
/// up to `1e-12` so that decimal levels such as `1 − 0.9` land on the
/// intended side.
pub fn si_dirac_expected(level: f64, lambda: f64) -> Result<Vec<Interval>> {
    check_level("level", level, "(0, 1]")?;
    let eps = 1e-12;
    let zero = Interval::new(0.0, 0.0)?;
    let one = Interval::new(1.0, 1.0)?;
    Ok(if level <= 0.5 {
        if lambda < level - eps {
            vec![zero]
        } else if lambda <= 1.0 - level + eps {
            vec![zero, one]
        } else {
            vec![one]
        }
    } else if lambda <= 1.0 - level + eps {
        vec![zero]
    } else if lambda < level - eps {
        vec![Interval::new(0.0, 1.0)?]
    } else {
        vec![one]
    })
}

/// Shortest intervals of `(1 − λ)δ₀ + λδ₁` across `lambdas`, next to the
/// closed-form table.
pub fn si_dirac_table(level: f64, lambdas: &[f64]) -> Result<Vec<SiRow>> {
    let path = MixturePath {
        f0: Distribution::dirac(0.0)?,
        f1: Distribution::dirac(1.0)?,
    };
    lambdas
        .iter()
        .map(|&lambda| {
            let f = path.at(lambda)?;
            Ok(SiRow {
                lambda,
                found: shortest_intervals(&f, level)?.intervals,
                expected: si_dirac_expected(level, lambda)?,
            })
        })
        .collect()
}

pub fn si_table_csv(rows: &[SiRow]) -> String {
    let mut s = String::from("lambda,found,expected,match\n");
    for r in rows {
        let show = |v: &[Interval]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "{},{},{},{}", r.lambda, show(&r.found), show(&r.expected), r.matches());
    }
    s
}

/// Winkler interval score with nominal coverage α:
/// `(u − l) + 2/(1 − α)·((l − y)₊ + (y − u)₊)`.
pub fn winkler_score(x: &Interval, y: f64, alpha: f64) -> f64 {
    let (l, u) = (x.lo().to_f64(), x.hi().to_f64());
    let k = 2.0 / (1.0 - alpha);
    (u - l) + k * (l - y).max(0.0) + k * (y - u).max(0.0)
}

/// A requirement on γ that a strictly consistent selective score would
/// need, and that the candidate breaks.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// `γ(0) < 0` fails.
    NotNegativeAtZero { gamma0: f64 },
    /// `γ(1) > 0` fails.
    NotPositiveAtOne { gamma1: f64 },
    /// `γ(λ) > 0` fails at a small `λ > 0`.
    NegativeNearZero { lambda: f64, gamma: f64 },
}

#[derive(Clone, Debug)]
pub struct CandidateProbe {
    pub name: &'static str,
    pub gamma: Vec<f64>,
    /// `max_λ |γ(λ) − (1 − λ)γ(0) − λγ(1)|`.
    pub affine_error: f64,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug)]
pub struct GammaProbe {
    pub alpha: f64,
    pub lambdas: Vec<f64>,
    pub si_at_zero: Vec<Interval>,
    pub candidates: Vec<CandidateProbe>,
}

impl GammaProbe {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda");
        for c in &self.candidates {
            let _ = write!(s, ",{}", c.name);
        }
        s.push('\n');
        for (i, l) in self.lambdas.iter().enumerate() {
            let _ = write!(s, "{l}");
            for c in &self.candidates {
                let _ = write!(s, ",{}", c.gamma[i]);
            }
            s.push('\n');
        }
        s
    }

    pub fn passed(&self) -> bool {
        self.si_at_zero.len() == 1
            && self.candidates.iter().all(|c| c.affine_error <= 1e-10 && !c.violations.is_empty())
    }
}

type ExpectedScore<'a> = Box<dyn Fn(&Interval, &Distribution) -> Result<f64> + Sync + 'a>;

/// `γ(λ) = S̄(x₀, F_λ) − S̄(x₁, F_λ)` along the uniform-mixture path
/// `F₀ = αG₁ + (1 − α)G₃`, `F₁ = ½αG₁ + ½αG₂ + (1 − α)G₃` with
/// `G₁ = U(0, 1)`, `G₂ = U(1, 2)`, `G₃ = U(3, 1 + 2/α)`, `x₀ = (0, 1)` and
/// `x₁ = (0, 2)`.
///
/// `x₀` is the only shortest interval of `F₀`, while `x₁` is a shortest
/// interval of every `F_λ` with `λ > 0`, so strict consistency would need
/// `γ(0) < 0 < γ(λ)` for all `λ > 0`. Three candidate scores are probed: the
/// Winkler score, the two-quantile score with `β = (1 − α)/2`, and the
/// normalised exhaustive score of the quadrant family of the report.
pub fn gamma_lambda_probe(alpha: f64, lambdas: &[f64]) -> Result<GammaProbe> {
    check_level("alpha", alpha, "(0, 1)")?;
    if lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
        return Err(Error::param("lambdas must lie in [0, 1]"));
    }
    let g1 = Distribution::uniform(0.0, 1.0)?;
    let g2 = Distribution::uniform(1.0, 2.0)?;
    let g3 = Distribution::uniform(3.0, 1.0 + 2.0 / alpha)?;
    let path = MixturePath {
        f0: Distribution::mixture(vec![(alpha, g1.clone()), (1.0 - alpha, g3.clone())])?,
        f1: Distribution::mixture(vec![
            (0.5 * alpha, g1),
            (0.5 * alpha, g2),
            (1.0 - alpha, g3),
        ])?,
    };
    let x0 = Interval::new(0.0, 1.0)?;
    let x1 = Interval::new(0.0, 2.0)?;
    let si_at_zero = shortest_intervals(&path.f0, alpha)?.intervals;

    let beta = 0.5 * (1.0 - alpha);
    let top = 1.0 + 2.0 / alpha + 0.5;
    let mu = PointMeasure::uniform_grid([-0.5, -0.5, top, top], 15)?;
    let candidates: Vec<(&'static str, ExpectedScore)> = vec![
        (
            "winkler",
            Box::new(move |x: &Interval, f: &Distribution| {
                let (l, u) = (x.lo().to_f64(), x.hi().to_f64());
                f.expect(|y| winkler_score(x, y, alpha), &[l, u])
            }),
        ),
        (
            "quantile_pair",
            Box::new(move |x: &Interval, f: &Distribution| {
                Ok(expected_pinball(beta, x.lo().to_f64(), f, Transform::Identity)?
                    + expected_pinball(alpha + beta, x.hi().to_f64(), f, Transform::Identity)?)
            }),
        ),
        (
            "normalized_quadrant",
            Box::new(move |x: &Interval, f: &Distribution| {
                let fam = IntervalFamily::new(vec![x.lo().to_f64()], vec![x.hi()], x.lo(), x.hi())?;
                expected_normalized_score(&fam, f, alpha, &mu)
            }),
        ),
    ];

    let gamma_at = |score: &ExpectedScore, lambda: f64| -> Result<f64> {
        let f = path.at(lambda)?;
        let g = score(&x0, &f)? - score(&x1, &f)?;
        if !g.is_finite() {
            return Err(Error::param(format!("non-finite expected score at lambda = {lambda}")));
        }
        Ok(g)
    };
    let probes = candidates
        .iter()
        .map(|(name, score)| {
            let gamma = lambdas
                .iter()
                .map(|l| gamma_at(score, *l))
                .collect::<Result<Vec<_>>>()?;
            let g0 = gamma_at(score, 0.0)?;
            let g1 = gamma_at(score, 1.0)?;
            let affine_error = lambdas
                .iter()
                .zip(&gamma)
                .map(|(l, g)| (g - ((1.0 - l) * g0 + l * g1)).abs())
                .fold(0.0, f64::max);
            let mut violations = Vec::new();
            if g0 >= 0.0 {
                violations.push(Violation::NotNegativeAtZero { gamma0: g0 });
            }
            if g1 <= 0.0 {
                violations.push(Violation::NotPositiveAtOne { gamma1: g1 });
            }
            if g0 < 0.0 && g1 > 0.0 {
                // γ is affine, so it stays negative up to its root
                let lambda = 0.5 * g0 / (g0 - g1);
                let gamma = gamma_at(score, lambda)?;
                if gamma <= 0.0 {
                    violations.push(Violation::NegativeNearZero { lambda, gamma });
                }
            }
            Ok(CandidateProbe {
                name,
                gamma,
                affine_error,
                violations,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GammaProbe {
        alpha,
        lambdas: lambdas.to_vec(),
        si_at_zero,
        candidates: probes,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FindingKind {
    /// A candidate scores strictly below the true value.
    Violation,
    /// A different candidate ties with the true value.
    Tie,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Finding {
    pub dist: usize,
    pub candidate: usize,
    /// `S̄(candidate, F) − S̄(T(F), F)`.
    pub margin: f64,
    pub kind: FindingKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub findings: Vec<Finding>,
    /// Smallest margin over all compared pairs (`+inf` when none).
    pub min_margin: f64,
    pub pairs: usize,
}

impl ScanReport {
    pub fn violations(&self) -> usize {
        self.findings.iter().filter(|f| f.kind == FindingKind::Violation).count()
    }

    pub fn ties(&self) -> usize {
        self.findings.iter().filter(|f| f.kind == FindingKind::Tie).count()
    }
}

/// Compares `S̄(candidate, F)` with `S̄(T(F), F)` for every distribution and
/// every candidate different from `T(F)`.
///
/// Margins below `−tol` are consistency violations; margins within `tol` are
/// strictness violations. Pairs run in parallel and are reported in
/// (distribution, candidate) order.
pub fn consistency_scan<R, T, S>(
    family: &[Distribution],
    candidates: &[R],
    functional: T,
    expected_score: S,
    tol: f64,
) -> Result<ScanReport>
where
    R: PartialEq + Sync + Send,
    T: Fn(&Distribution) -> Result<R> + Sync,
    S: Fn(&R, &Distribution) -> Result<f64> + Sync,
{
    let targets = family
        .par_iter()
        .map(|f| {
            let t = functional(f)?;
            let s = expected_score(&t, f)?;
            Ok((t, s))
        })
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..family.len())
        .flat_map(|i| (0..candidates.len()).map(move |j| (i, j)))
        .filter(|(i, j)| candidates[*j] != targets[*i].0)
        .collect();
    let margins = pairs
        .par_iter()
        .map(|&(i, j)| Ok(expected_score(&candidates[j], &family[i])? - targets[i].1))
        .collect::<Result<Vec<f64>>>()?;
    let findings = pairs
        .iter()
        .zip(&margins)
        .filter_map(|(&(dist, candidate), &margin)| {
            let kind = if margin < -tol {
                FindingKind::Violation
            } else if margin <= tol {
                FindingKind::Tie
            } else {
                return None;
            };
            Some(Finding {
                dist,
                candidate,
                margin,
                kind,
            })
        })
        .collect();
    Ok(ScanReport {
        findings,
        min_margin: margins.iter().copied().fold(f64::INFINITY, f64::min),
        pairs: pairs.len(),
    })
}
