//! Prediction-interval geometry.
//!
//! For a law `F` and level α, the family `ℐ_α(F)` holds every closed interval
//! `[a, b]` with `F([a, b]) ≥ α`. It is an upper set in
//! `U = {(a, b) : a ≤ b}` and is the epigraph of the boundary function
//!
//! ```text
//! Γ_α(F)(a) = inf{b ≥ a | F([a, b]) ≥ α} = q⁻_{α + F(a−)}(F),   F(a−) ≤ 1 − α.
//! ```
//!
//! [`IntervalFamily`] stores Γ sampled on a grid of lower endpoints, which is
//! also how competing (possibly wrong) exhaustive forecasts are represented.

use std::io::{BufRead, Write};

use crate::dist::{Distribution, PROB_TOL};
use crate::error::{check_level, Error, Result};
use crate::ext::ExtReal;
use crate::util::linspace;

/// Default tolerance for ties among shortest intervals.
pub const TIE_TOL: f64 = 1e-9;

/// Closed interval with extended-real endpoints, `lo ≤ hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: ExtReal,
    hi: ExtReal,
}

impl Interval {
    pub fn new(lo: impl Into<ExtReal>, hi: impl Into<ExtReal>) -> Result<Self> {
        let (lo, hi) = (lo.into(), hi.into());
        if lo > hi {
            return Err(Error::InvalidInterval {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> ExtReal {
        self.lo
    }

    pub fn hi(&self) -> ExtReal {
        self.hi
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && self.hi >= y
    }

    pub fn length(&self) -> f64 {
        self.hi.to_f64() - self.lo.to_f64()
    }

    /// Whether `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// `Γ_α(F)(a)`: the least upper endpoint of an α-prediction interval that
/// starts at `a`.
pub fn gamma_alpha(f: &Distribution, alpha: f64, a: impl Into<ExtReal>) -> Result<ExtReal> {
    check_level("alpha", alpha, "(0, 1]")?;
    let a = a.into();
    let left = f.cdf_left(a);
    if left > 1.0 - alpha + PROB_TOL {
        return Err(Error::OutOfDomain {
            a: a.to_string(),
            left_mass: left,
            limit: 1.0 - alpha,
        });
    }
    Ok(f.lower_quantile((alpha + left).min(1.0)).max(a))
}

/// `d_α(F)(m)`: the smallest half-length `c ≥ 0` with `F([m − c, m + c]) ≥ α`.
pub fn d_alpha(f: &Distribution, alpha: f64, m: f64) -> Result<f64> {
    check_level("alpha", alpha, "(0, 1)")?;
    if !m.is_finite() {
        return Err(Error::param("centre must be finite"));
    }
    let cover = |c: f64| f.cdf(m + c) - f.cdf_left(m - c);
    // cover over the open window (m − c, m + c)
    let cover_open = |c: f64| f.cdf_left(m + c) - f.cdf(m - c);
    if cover(0.0) >= alpha - PROB_TOL {
        return Ok(0.0);
    }
    let mut cands: Vec<f64> = f.breakpoints().iter().map(|b| (b - m).abs()).collect();
    cands.push(0.0);
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let mut prev = 0.0;
    for &c in cands.iter().skip(1) {
        if cover(c) >= alpha - PROB_TOL {
            let at_prev = cover(prev);
            let below = cover_open(c);
            if below < alpha - PROB_TOL {
                return Ok(c);
            }
            if !f.has_normal_component() {
                // both window ends sit inside cells where F is affine
                let t = prev + (alpha - at_prev) / (below - at_prev) * (c - prev);
                return Ok(t.clamp(prev, c));
            }
            return Ok(bisect_cover(&cover, alpha, prev, c));
        }
        prev = c;
    }
    // the coverage level is only reached in normal tails
    let mut hi = prev.max(1.0);
    while cover(hi) < alpha {
        hi *= 2.0;
    }
    Ok(bisect_cover(&cover, alpha, prev, hi))
}

fn bisect_cover(cover: &impl Fn(f64) -> f64, alpha: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if cover(mid) >= alpha {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// How lower endpoints are chosen when sampling Γ.
#[derive(Clone, Debug, PartialEq)]
pub enum GridSpec {
    /// Explicit lower endpoints; those beyond the domain are dropped.
    Points(Vec<f64>),
    /// `n` equispaced points on `[lo, hi]`.
    Uniform { lo: f64, hi: f64, n: usize },
    /// `n` equispaced points on `[q⁻_eps, domain end]`, plus every structural
    /// point where Γ can jump.
    Auto { n: usize, eps: f64 },
}

/// An upper set in `U`, stored as the epigraph of a left-continuous,
/// nondecreasing boundary function sampled on a grid.
///
/// `gamma[i]` is the value of Γ on `(grid[i−1], grid[i]]` (and on
/// `(−∞, grid[0]]` for the first point). Lower endpoints above `domain_cut`
/// are not in the family; `left_tail` is `lim_{a→−∞} Γ(a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalFamily {
    grid: Vec<f64>,
    gamma: Vec<ExtReal>,
    domain_cut: ExtReal,
    left_tail: ExtReal,
}

impl IntervalFamily {
    pub fn new(
        grid: Vec<f64>,
        gamma: Vec<ExtReal>,
        domain_cut: ExtReal,
        left_tail: ExtReal,
    ) -> Result<Self> {
        if grid.len() != gamma.len() {
            return Err(Error::LengthMismatch {
                what: "grid vs gamma",
                left: grid.len(),
                right: gamma.len(),
            });
        }
        if grid.iter().any(|a| !a.is_finite()) || grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("family grid must be finite and strictly increasing"));
        }
        match (domain_cut, grid.last()) {
            (ExtReal::NegInf, None) => {}
            (ExtReal::Finite(c), Some(&last)) if c == last => {}
            _ => {
                return Err(Error::param(format!(
                    "domain cut {domain_cut} must be the last grid point (or -inf with an empty grid)"
                )))
            }
        }
        for (i, (a, g)) in grid.iter().zip(&gamma).enumerate() {
            if *g < *a {
                return Err(Error::param(format!("gamma({a}) = {g} lies below a")));
            }
            if *g == ExtReal::PosInf && i + 1 != grid.len() {
                return Err(Error::param("gamma may be +inf only at the last grid point"));
            }
        }
        if gamma.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::param("gamma must be nondecreasing"));
        }
        if gamma.first().is_some_and(|g0| left_tail > *g0) || left_tail == ExtReal::NegInf {
            return Err(Error::param(format!(
                "left tail {left_tail} must be finite-or-inf and not exceed gamma at the first grid point"
            )));
        }
        Ok(IntervalFamily {
            grid,
            gamma,
            domain_cut,
            left_tail,
        })
    }

    /// `ℐ_α(δ_y) = [−∞, y] × [y, ∞]`, the family that a perfect forecast of
    /// the observation `y` would report.
    pub fn quadrant(y: f64) -> Self {
        IntervalFamily {
            grid: vec![y],
            gamma: vec![ExtReal::Finite(y)],
            domain_cut: ExtReal::Finite(y),
            left_tail: ExtReal::Finite(y),
        }
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn gamma(&self) -> &[ExtReal] {
        &self.gamma
    }

    pub fn domain_cut(&self) -> ExtReal {
        self.domain_cut
    }

    pub fn left_tail(&self) -> ExtReal {
        self.left_tail
    }

    /// Same grid and tails with new boundary values.
    pub fn with_gamma(&self, gamma: Vec<ExtReal>) -> Result<Self> {
        Self::new(self.grid.clone(), gamma, self.domain_cut, self.left_tail)
    }

    /// Γ at a lower endpoint, or `None` outside the domain.
    pub fn gamma_at(&self, a: ExtReal) -> Option<ExtReal> {
        if a == ExtReal::NegInf {
            return Some(self.left_tail);
        }
        if a > self.domain_cut {
            return None;
        }
        let a = a.to_f64();
        let i = self.grid.partition_point(|g| *g < a);
        self.gamma.get(i).copied()
    }

    /// Membership of `u = (u₁, u₂)` in the epigraph.
    pub fn contains(&self, u: &Interval) -> bool {
        match self.gamma_at(u.lo) {
            Some(g) => u.hi >= g,
            None => false,
        }
    }

    /// Writes the family as CSV: header `a,gamma`, one row per grid point and
    /// two footer rows `domain_cut,…` and `left_tail,…`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Io(e.into());
        w.write_record(["a", "gamma"]).map_err(io)?;
        for (a, g) in self.grid.iter().zip(&self.gamma) {
            w.write_record([ExtReal::Finite(*a).to_string(), g.to_string()])
                .map_err(io)?;
        }
        w.write_record(["domain_cut".to_string(), self.domain_cut.to_string()])
            .map_err(io)?;
        w.write_record(["left_tail".to_string(), self.left_tail.to_string()])
            .map_err(io)?;
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    /// Parses the CSV layout written by [`IntervalFamily::write_csv`].
    pub fn read_csv<R: BufRead>(input: R, source_name: &str) -> Result<Self> {
        let mut grid = Vec::new();
        let mut gamma = Vec::new();
        let mut cut = None;
        let mut tail = None;
        let mut lines = input.lines().enumerate();
        match lines.next() {
            Some((_, Ok(h))) if h.trim() == "a,gamma" => {}
            Some((_, Err(e))) => return Err(e.into()),
            _ => return Err(Error::parse(source_name, 1, "expected header \"a,gamma\"")),
        }
        for (i, line) in lines {
            let line = line?;
            let lineno = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(',')
                .ok_or_else(|| Error::parse(source_name, lineno, "expected two fields"))?;
            let value: ExtReal = value
                .trim()
                .parse()
                .map_err(|e| Error::parse(source_name, lineno, format!("{e}")))?;
            match key.trim() {
                "domain_cut" => cut = Some(value),
                "left_tail" => tail = Some(value),
                k => {
                    if cut.is_some() || tail.is_some() {
                        return Err(Error::parse(source_name, lineno, "grid row after footer"));
                    }
                    let a: ExtReal = k
                        .parse()
                        .map_err(|e| Error::parse(source_name, lineno, format!("{e}")))?;
                    let a = a
                        .finite()
                        .ok_or_else(|| Error::parse(source_name, lineno, "grid point must be finite"))?;
                    grid.push(a);
                    gamma.push(value);
                }
            }
        }
        let cut = cut.ok_or_else(|| Error::parse(source_name, 0, "missing domain_cut row"))?;
        let tail = tail.ok_or_else(|| Error::parse(source_name, 0, "missing left_tail row"))?;
        Self::new(grid, gamma, cut, tail)
    }
}

/// Samples `Γ_α(F)` on a grid and records the domain end
/// `sup{a : F(a−) ≤ 1 − α}` and the left tail `q⁻_α(F)`.
pub fn prediction_family(f: &Distribution, alpha: f64, spec: &GridSpec) -> Result<IntervalFamily> {
    check_level("alpha", alpha, "(0, 1]")?;
    let cut = f.upper_quantile(1.0 - alpha);
    let left_tail = f.lower_quantile(alpha);
    let mut points = match spec {
        GridSpec::Points(p) => p.clone(),
        GridSpec::Uniform { lo, hi, n } => linspace(*lo, *hi, *n),
        GridSpec::Auto { n, eps } => auto_grid(f, alpha, cut, *n, *eps)?,
    };
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::param("grid points must be finite"));
    }
    points.retain(|p| ExtReal::Finite(*p) <= cut);
    if let Some(c) = cut.finite() {
        points.push(c);
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let gamma = points
        .iter()
        .map(|a| gamma_alpha(f, alpha, *a))
        .collect::<Result<Vec<_>>>()?;
    // points within rounding of the cut can already see Γ = +inf; the cut
    // carries that value for the whole stretch, so drop them
    let last = points.len().saturating_sub(1);
    let (points, gamma): (Vec<f64>, Vec<ExtReal>) = points
        .into_iter()
        .zip(gamma)
        .enumerate()
        .filter(|(i, (_, g))| *i == last || *g != ExtReal::PosInf)
        .map(|(_, pg)| pg)
        .unzip();
    IntervalFamily::new(points, gamma, cut, left_tail)
}

fn auto_grid(f: &Distribution, alpha: f64, cut: ExtReal, n: usize, eps: f64) -> Result<Vec<f64>> {
    check_level("eps", eps, "(0, 1)")?;
    let Some(hi) = cut.finite() else {
        return Ok(Vec::new());
    };
    let lo = f.lower_quantile(eps).to_f64().min(hi);
    let mut pts = linspace(lo, hi, n.max(2));
    pts.extend(f.breakpoints().iter().filter(|b| **b >= lo && **b <= hi));
    // Γ jumps where α + F(a−) crosses a flat level of F
    for level in f.flat_levels().into_iter().chain([1.0]) {
        let beta = level - alpha;
        if beta > PROB_TOL && beta <= 1.0 - alpha {
            for q in [f.lower_quantile(beta), f.upper_quantile(beta)] {
                if let Some(q) = q.finite() {
                    if q >= lo && q <= hi {
                        pts.push(q);
                    }
                }
            }
        }
    }
    Ok(pts)
}

/// The shortest α-prediction intervals.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortestIntervals {
    pub intervals: Vec<Interval>,
    pub length: f64,
}

/// `SI_α(F)` with the default tie tolerance.
pub fn shortest_intervals(f: &Distribution, alpha: f64) -> Result<ShortestIntervals> {
    shortest_intervals_with_tol(f, alpha, TIE_TOL)
}

/// Minimises `h(x) = Γ_α(F)(x) − x` over the domain of Γ and returns every
/// minimiser within `tie_tol` of the minimum.
///
/// Away from normal components, `h` is affine between consecutive structural
/// candidates (breakpoints of `F` and the lower endpoints whose Γ lands on a
/// breakpoint), so scanning the candidates is exact. When a whole stretch of
/// lower endpoints is optimal, the two ends of the stretch are reported.
/// Normal components add a scan over quantile levels with golden-section
/// refinement.
pub fn shortest_intervals_with_tol(
    f: &Distribution,
    alpha: f64,
    tie_tol: f64,
) -> Result<ShortestIntervals> {
    check_level("alpha", alpha, "(0, 1]")?;
    if alpha == 1.0 {
        let iv = Interval::new(f.ess_inf(), f.ess_sup())?;
        return Ok(ShortestIntervals {
            length: iv.length(),
            intervals: vec![iv],
        });
    }
    let cut = f
        .upper_quantile(1.0 - alpha)
        .finite()
        .expect("the (1-alpha)-quantile is finite for alpha > 0");
    let mut xs: Vec<f64> = vec![cut];
    let push_level = |xs: &mut Vec<f64>, beta: f64| {
        if beta > PROB_TOL && beta <= 1.0 - alpha + PROB_TOL {
            xs.extend([f.lower_quantile(beta), f.upper_quantile(beta)].iter().filter_map(|q| q.finite()));
        }
    };
    for &b in f.breakpoints() {
        xs.push(b);
        push_level(&mut xs, f.cdf(b) - alpha);
        push_level(&mut xs, f.cdf_left(b) - alpha);
    }
    if f.has_normal_component() {
        xs.extend(smooth_candidates(f, alpha)?);
    }
    xs.retain(|x| *x <= cut);
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let mut scored = Vec::with_capacity(xs.len());
    for x in xs {
        let g = gamma_alpha(f, alpha, x)?;
        if let Some(g) = g.finite() {
            scored.push((x, g, g - x));
        }
    }
    let best = scored
        .iter()
        .map(|s| s.2)
        .fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        // only possible with unbounded support at every admissible start
        return Err(Error::param("no finite alpha-prediction interval found"));
    }
    let mut intervals: Vec<Interval> = Vec::new();
    for (x, g, h) in scored {
        if h > best + tie_tol {
            continue;
        }
        if intervals.last().is_some_and(|iv| (x - iv.lo.to_f64()).abs() <= 1e-7) {
            continue;
        }
        let iv = Interval::new(x, g)?;
        let cover = f.prob_closed_interval(x, g)?;
        if cover < alpha - 1e-9 {
            return Err(Error::param(format!("interval {iv} covers only {cover} < {alpha}")));
        }
        intervals.push(iv);
    }
    Ok(ShortestIntervals {
        intervals,
        length: best,
    })
}

/// Lower endpoints near the minima of `p ↦ q⁻_{α+p} − q⁻_p`.
fn smooth_candidates(f: &Distribution, alpha: f64) -> Result<Vec<f64>> {
    const STEPS: usize = 257;
    let top = 1.0 - alpha;
    let ps: Vec<f64> = (1..=STEPS).map(|i| top * i as f64 / STEPS as f64).collect();
    let h = |p: f64| -> f64 {
        let x = f.lower_quantile(p);
        let g = f.lower_quantile((alpha + p).min(1.0));
        g.to_f64() - x.to_f64()
    };
    let hs: Vec<f64> = ps.iter().map(|p| h(*p)).collect();
    let mut out = Vec::new();
    for i in 0..STEPS {
        let left = if i == 0 { f64::INFINITY } else { hs[i - 1] };
        let right = if i + 1 == STEPS { f64::INFINITY } else { hs[i + 1] };
        if hs[i] <= left && hs[i] <= right {
            let lo = if i == 0 { PROB_TOL * 10.0 } else { ps[i - 1] };
            let hi = if i + 1 == STEPS { top } else { ps[i + 1] };
            let p = golden_section(&h, lo, hi);
            out.push(f.lower_quantile(p).to_f64());
            out.push(f.lower_quantile(ps[i]).to_f64());
        }
    }
    out.retain(|x| x.is_finite());
    Ok(out)
}

fn golden_section(h: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut hc, mut hd) = (h(c), h(d));
    for _ in 0..120 {
        if hc <= hd {
            b = d;
            d = c;
            hd = hc;
            c = b - r * (b - a);
            hc = h(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + r * (b - a);
            hd = h(d);
        }
        if b - a < 1e-15 {
            break;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::dist::tests::arb_distribution;

    fn unif(lo: f64, hi: f64) -> Distribution {
        Distribution::uniform(lo, hi).unwrap()
    }

    fn two_atoms() -> Distribution {
        Distribution::mixture(vec![
            (0.5, Distribution::dirac(0.0).unwrap()),
            (0.5, Distribution::dirac(1.0).unwrap()),
        ])
        .unwrap()
    }

    /// Normal quantile by plain bisection on the library CDF.
    fn normal_q(beta: f64, sd: f64) -> f64 {
        let (mut lo, mut hi) = (-20.0, 20.0);
        for _ in 0..100 {
            let m = 0.5 * (lo + hi);
            if crate::dist::normal_cdf(m / sd) < beta {
                lo = m;
            } else {
                hi = m;
            }
        }
        hi
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_alpha(&unif(0.0, 1.0), 0.75, -0.3).unwrap(), 0.75);
        let d = Distribution::dirac(0.0).unwrap();
        assert_eq!(gamma_alpha(&d, 0.3, -5.0).unwrap(), 0.0);
        let n = Distribution::normal(0.0, 0.2).unwrap();
        let g = gamma_alpha(&n, 0.95, -1.0).unwrap().to_f64();
        let oracle = normal_q(0.95 + crate::dist::normal_cdf(-5.0), 0.2);
        assert!((g - 0.3290).abs() < 1e-3);
        assert!((g - oracle).abs() < 1e-9);
    }

    #[test]
    fn gamma_rejects_lower_endpoints_beyond_the_domain() {
        let err = gamma_alpha(&unif(0.0, 1.0), 0.75, 0.5).unwrap_err();
        assert!(matches!(err, Error::OutOfDomain { .. }));
        assert!(gamma_alpha(&unif(0.0, 1.0), 0.0, 0.5).is_err());
    }

    #[test]
    fn d_alpha_examples() {
        assert!((d_alpha(&unif(0.0, 1.0), 0.5, 0.5).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(d_alpha(&Distribution::dirac(0.0).unwrap(), 0.9, 3.0).unwrap(), 3.0);
        let n = Distribution::normal(0.0, 1.0).unwrap();
        let c = d_alpha(&n, 0.95, 0.0).unwrap();
        assert!((c - 1.95996).abs() < 1e-4);
        assert!((c - normal_q(0.975, 1.0)).abs() < 1e-9);
    }

    #[test]
    fn uniform_family_matches_closed_form() {
        let fam = prediction_family(
            &unif(0.0, 1.0),
            0.75,
            &GridSpec::Uniform { lo: -1.0, hi: 0.25, n: 101 },
        )
        .unwrap();
        assert_eq!(fam.grid().len(), 101);
        for (a, g) in fam.grid().iter().zip(fam.gamma()) {
            assert_eq!(*g, a.max(0.0) + 0.75, "a={a}");
        }
        assert_eq!(fam.domain_cut(), 0.25);
        assert_eq!(fam.left_tail(), 0.75);
    }

    #[test]
    fn dirac_family_is_the_quadrant() {
        let d = Distribution::dirac(0.0).unwrap();
        let fam = prediction_family(&d, 0.05, &GridSpec::Auto { n: 50, eps: 1e-3 }).unwrap();
        assert_eq!(fam.domain_cut(), 0.0);
        assert!(fam.gamma().iter().all(|g| *g == 0.0));
        for (lo, hi, inside) in [(-3.0, 0.0, true), (0.0, 0.0, true), (-1.0, -0.1, false), (0.1, 2.0, false)] {
            assert_eq!(fam.contains(&Interval::new(lo, hi).unwrap()), inside);
        }
        let q = IntervalFamily::quadrant(0.0);
        assert!(q.contains(&Interval::new(ExtReal::NegInf, ExtReal::PosInf).unwrap()));
        assert!(q.contains(&Interval::new(ExtReal::NegInf, 0.0).unwrap()));
        assert!(!q.contains(&Interval::new(ExtReal::NegInf, -1.0).unwrap()));
    }

    #[test]
    fn normal_left_tail() {
        let n = Distribution::normal(0.0, 1.0).unwrap();
        let fam = prediction_family(&n, 0.9, &GridSpec::Auto { n: 20, eps: 1e-3 }).unwrap();
        assert!((fam.left_tail().to_f64() - 1.2816).abs() < 1e-4);
        assert_eq!(*fam.gamma().last().unwrap(), ExtReal::PosInf);
    }

    #[test]
    fn shortest_interval_examples() {
        let si = shortest_intervals(&two_atoms(), 0.4).unwrap();
        assert_eq!(
            si.intervals,
            vec![Interval::new(0.0, 0.0).unwrap(), Interval::new(1.0, 1.0).unwrap()]
        );
        assert_eq!(si.length, 0.0);
        let si = shortest_intervals(&two_atoms(), 0.8).unwrap();
        assert_eq!(si.intervals, vec![Interval::new(0.0, 1.0).unwrap()]);

        let n = Distribution::normal(0.0, 1.0).unwrap();
        let si = shortest_intervals(&n, 0.5).unwrap();
        assert_eq!(si.intervals.len(), 1);
        let q = normal_q(0.75, 1.0);
        assert!((si.intervals[0].lo().to_f64() + q).abs() < 1e-3);
        assert!((si.intervals[0].hi().to_f64() - q).abs() < 1e-3);
    }

    #[test]
    fn shortest_intervals_of_a_uniform_form_a_stretch() {
        let si = shortest_intervals(&unif(0.0, 1.0), 0.75).unwrap();
        assert!((si.length - 0.75).abs() < 1e-12);
        let ends: Vec<(f64, f64)> = si
            .intervals
            .iter()
            .map(|iv| (iv.lo().to_f64(), iv.hi().to_f64()))
            .collect();
        assert_eq!(ends, vec![(0.0, 0.75), (0.25, 1.0)]);
        let full = shortest_intervals(&unif(0.0, 1.0), 1.0).unwrap();
        assert_eq!(full.intervals, vec![Interval::new(0.0, 1.0).unwrap()]);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let f = Distribution::mixture(vec![
            (0.3, Distribution::normal(0.0, 1.0).unwrap()),
            (0.7, unif(0.1, 0.7)),
        ])
        .unwrap();
        let fam = prediction_family(&f, 0.6, &GridSpec::Auto { n: 40, eps: 1e-3 }).unwrap();
        let text = fam.to_csv_string();
        let back = IntervalFamily::read_csv(text.as_bytes(), "mem").unwrap();
        assert_eq!(fam, back);
        assert!(text.starts_with("a,gamma\n"));
        assert!(IntervalFamily::read_csv("a,gamma\n1,x\n".as_bytes(), "bad").is_err());
    }

    #[test]
    fn family_constructor_rejects_bad_shapes() {
        let e = |g: Vec<f64>| g.into_iter().map(ExtReal::new).collect::<Vec<_>>();
        assert!(IntervalFamily::new(vec![0.0, 1.0], e(vec![2.0, 1.5]), 1.0.into(), 2.0.into()).is_err());
        assert!(IntervalFamily::new(vec![0.0, 1.0], e(vec![0.5, 0.5]), 1.0.into(), 0.5.into()).is_err());
        assert!(IntervalFamily::new(vec![0.0, 1.0], e(vec![f64::INFINITY, f64::INFINITY]), 1.0.into(), 2.0.into()).is_err());
        assert!(IntervalFamily::new(vec![0.0, 1.0], e(vec![1.0, 2.0]), 2.0.into(), 1.0.into()).is_err());
        assert!(IntervalFamily::new(vec![0.0, 1.0], e(vec![1.0, 2.0]), 1.0.into(), 1.0.into()).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn gamma_is_monotone_and_covers(f in arb_distribution(), alpha in 0.05..0.95f64) {
            let cut = f.upper_quantile(1.0 - alpha).to_f64();
            let mut prev = ExtReal::NegInf;
            for k in 0..60 {
                let a = cut - 6.0 + 6.0 * k as f64 / 59.0;
                let g = gamma_alpha(&f, alpha, a).unwrap();
                prop_assert!(g >= prev);
                prop_assert!(g >= a);
                prop_assert!(f.prob_closed_interval(a, g).unwrap() >= alpha - 1e-9);
                let g2 = gamma_alpha(&f, (alpha + 0.04).min(1.0), a);
                if let Ok(g2) = g2 {
                    prop_assert!(g2 >= g);
                }
                prev = g;
            }
        }

        #[test]
        fn family_is_an_upper_set(
            f in arb_distribution(), alpha in 0.05..0.95f64,
            pts in prop::collection::vec((-4.0..4.0f64, 0.0..4.0f64, 0.0..2.0f64, 0.0..2.0f64), 30),
        ) {
            let fam = prediction_family(&f, alpha, &GridSpec::Auto { n: 100, eps: 1e-3 }).unwrap();
            for (a, len, x1, x2) in pts {
                let u = Interval::new(a, a + len).unwrap();
                if fam.contains(&u) {
                    let w = Interval::new(a - x1, a + len + x2).unwrap();
                    prop_assert!(fam.contains(&w));
                }
            }
        }

        #[test]
        fn shortest_intervals_beat_every_start(f in arb_distribution(), alpha in 0.05..0.95f64, seed in 0u64..1000) {
            let si = shortest_intervals(&f, alpha).unwrap();
            for iv in &si.intervals {
                prop_assert!(f.prob_closed_interval(iv.lo(), iv.hi()).unwrap() >= alpha - 1e-9);
                prop_assert!((iv.length() - si.length).abs() <= 1e-9);
            }
            let cut = f.upper_quantile(1.0 - alpha).to_f64();
            for k in 0..200u64 {
                let t = ((seed * 7919 + k * 104_729) % 10_007) as f64 / 10_007.0;
                let a = cut - 8.0 * t;
                let g = gamma_alpha(&f, alpha, a).unwrap().to_f64();
                prop_assert!(si.length <= g - a + 1e-6, "a={a}: {} > {}", si.length, g - a);
            }
        }
    }
}
