//! Vorob'ev quantiles of random sets on finite grids.
//!
//! A random set `Y` on cells `0..n` is given by finitely many atoms
//! `(p_k, S_k)`. Its coverage function `p(u) = P(u ∈ Y)` defines
//!
//! ```text
//! Q_α = {p ≥ α},   Q_α^> = {p > α},   Q_α^= = {p = α}.
//! ```
//!
//! Under a reference measure μ (cell weights), the score
//! `S̃_α(X, Y) = α μ(X) − μ(Y ∩ X)` is consistent for `Q_α`, and its expected
//! minimisers are exactly the sets between `Q_α^>` and `Q_α` (up to μ-null
//! cells). The normalised form `α μ(X∖Y) + (1 − α) μ(Y∖X)` mixes elementary
//! scores over cells.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{Distribution, PROB_TOL};
use crate::error::{check_level, Error, Result};

/// Largest grid for exhaustive subset enumeration.
pub const MAX_BRUTE_FORCE_CELLS: usize = 20;

/// Cell weights of the reference measure.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    weights: Vec<f64>,
}

impl Grid {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::param("a grid needs at least one cell"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::param("cell weights must be finite and nonnegative"));
        }
        Ok(Grid { weights })
    }

    /// Counting measure on `n` cells.
    pub fn counting(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `μ(X)`, summed in cell order.
    pub fn weight(&self, x: &GridSet) -> f64 {
        x.cells().fold(0.0, |acc, u| acc + self.weights[u])
    }

    /// Parses whitespace-separated nonnegative reals.
    pub fn parse_weights(text: &str, source_name: &str) -> Result<Self> {
        let mut weights = Vec::new();
        for (i, line) in text.lines().enumerate() {
            for tok in line.split_whitespace() {
                let w: f64 = tok.parse().map_err(|_| {
                    Error::parse(source_name, i + 1, format!("not a number: {tok:?}"))
                })?;
                weights.push(w);
            }
        }
        Self::new(weights)
    }
}

/// A subset of the cells, as a membership mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridSet {
    mask: Vec<bool>,
}

impl GridSet {
    pub fn empty(n: usize) -> Self {
        GridSet {
            mask: vec![false; n],
        }
    }

    pub fn full(n: usize) -> Self {
        GridSet { mask: vec![true; n] }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        GridSet { mask }
    }

    pub fn from_cells(n: usize, cells: &[usize]) -> Result<Self> {
        let mut mask = vec![false; n];
        for &c in cells {
            if c >= n {
                return Err(Error::param(format!("cell {c} out of range for {n} cells")));
            }
            mask[c] = true;
        }
        Ok(GridSet { mask })
    }

    /// Bit `i` of `bits` gives membership of cell `i`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        GridSet {
            mask: (0..n).map(|i| bits >> i & 1 == 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, u: usize) -> bool {
        self.mask[u]
    }

    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask.iter().enumerate().filter(|(_, m)| **m).map(|(i, _)| i)
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn complement(&self) -> Self {
        GridSet {
            mask: self.mask.iter().map(|m| !m).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &GridSet) -> bool {
        self.mask.iter().zip(&other.mask).all(|(a, b)| !a || *b)
    }

    fn zip_with(&self, other: &GridSet, f: impl Fn(bool, bool) -> bool) -> GridSet {
        GridSet {
            mask: self.mask.iter().zip(&other.mask).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn union(&self, other: &GridSet) -> GridSet {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &GridSet) -> GridSet {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &GridSet) -> GridSet {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &GridSet) -> GridSet {
        self.zip_with(other, |a, b| a != b)
    }

    /// Grid-set file: `cells n` on the first line, the 0/1 mask on the second.
    pub fn to_text(&self) -> String {
        let mut s = format!("cells {}\n", self.len());
        let bits: Vec<&str> = self.mask.iter().map(|m| if *m { "1" } else { "0" }).collect();
        let _ = writeln!(s, "{}", bits.join(" "));
        s
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (i, head) = lines
            .next()
            .ok_or_else(|| Error::parse(source_name, 1, "empty grid-set file"))?;
        let n: usize = head
            .trim()
            .strip_prefix("cells")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| Error::parse(source_name, i + 1, "expected \"cells n\""))?;
        let mut mask = Vec::with_capacity(n);
        for (i, line) in lines {
            for tok in line.split_whitespace() {
                mask.push(match tok {
                    "0" => false,
                    "1" => true,
                    _ => return Err(Error::parse(source_name, i + 1, format!("expected 0 or 1, got {tok:?}"))),
                });
            }
        }
        if mask.len() != n {
            return Err(Error::parse(
                source_name,
                2,
                format!("mask has {} entries, header says {n}", mask.len()),
            ));
        }
        Ok(GridSet { mask })
    }
}

/// Finitely supported random set: atoms `(p_k, S_k)` with `Σ p_k = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridRandomSet {
    n: usize,
    atoms: Vec<(f64, GridSet)>,
}

#[derive(Serialize, Deserialize)]
struct RandSetFile {
    n: usize,
    atoms: Vec<AtomFile>,
}

#[derive(Serialize, Deserialize)]
struct AtomFile {
    p: f64,
    cells: Vec<usize>,
}

impl GridRandomSet {
    pub fn new(n: usize, atoms: Vec<(f64, GridSet)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("a random set needs at least one cell"));
        }
        if atoms.iter().any(|(p, s)| !(*p > 0.0 && *p <= 1.0) || s.len() != n) {
            return Err(Error::param("atoms need probabilities in (0, 1] and masks of length n"));
        }
        let total: f64 = atoms.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!("atom probabilities sum to {total}, not 1")));
        }
        Ok(GridRandomSet { n, atoms })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn atoms(&self) -> &[(f64, GridSet)] {
        &self.atoms
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RandSetFile = serde_json::from_str(text)?;
        let atoms = file
            .atoms
            .iter()
            .map(|a| Ok((a.p, GridSet::from_cells(file.n, &a.cells)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.n, atoms)
    }

    pub fn to_json(&self) -> String {
        let file = RandSetFile {
            n: self.n,
            atoms: self
                .atoms
                .iter()
                .map(|(p, s)| AtomFile {
                    p: *p,
                    cells: s.cells().collect(),
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("random sets always serialise")
    }

    /// Independent draws from a ChaCha stream seeded with `seed`.
    pub fn sample_n(&self, count: usize, seed: u64) -> Vec<GridSet> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for (p, s) in &self.atoms {
                    acc += p;
                    if u < acc {
                        return s.clone();
                    }
                }
                self.atoms.last().expect("random sets have atoms").1.clone()
            })
            .collect()
    }
}

/// `p(u) = Σ_{k : u ∈ S_k} p_k`, in atom order.
pub fn coverage(y: &GridRandomSet) -> Vec<f64> {
    let mut p = vec![0.0; y.n];
    for (pk, s) in &y.atoms {
        for u in s.cells() {
            p[u] += pk;
        }
    }
    p
}

/// The three excursion sets of the coverage function at level α.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VorobevSets {
    /// `{p ≥ α}`
    pub q_alpha: GridSet,
    /// `{p > α}`
    pub q_gt: GridSet,
    /// `{p = α}`
    pub q_eq: GridSet,
}

/// Thresholds the coverage function exactly.
pub fn vorobev_sets(y: &GridRandomSet, alpha: f64) -> Result<VorobevSets> {
    vorobev_sets_from_coverage(&coverage(y), alpha, 0.0)
}

/// Thresholds a (possibly estimated) coverage vector; values within `eq_tol`
/// of α count as equal to α.
pub fn vorobev_sets_from_coverage(p: &[f64], alpha: f64, eq_tol: f64) -> Result<VorobevSets> {
    check_level("alpha", alpha, "[0, 1]")?;
    if !(eq_tol >= 0.0) {
        return Err(Error::param("eq_tol must be nonnegative"));
    }
    let q_alpha = GridSet::from_mask(p.iter().map(|v| *v >= alpha - eq_tol).collect());
    let q_gt = GridSet::from_mask(p.iter().map(|v| *v > alpha + eq_tol).collect());
    let q_eq = q_alpha.difference(&q_gt);
    Ok(VorobevSets { q_alpha, q_gt, q_eq })
}

/// `V_α(u, Y) = 1_Y(u) − α`.
pub fn v_alpha_ident(u: usize, y_obs: &GridSet, alpha: f64) -> f64 {
    f64::from(u8::from(y_obs.contains(u))) - alpha
}

/// `S̃_α(X, Y) = α μ(X) − μ(Y ∩ X)`.
pub fn score_tilde(x: &GridSet, y_obs: &GridSet, alpha: f64, grid: &Grid) -> f64 {
    alpha * grid.weight(x) - grid.weight(&x.intersection(y_obs))
}

/// `α 1_{X∖Y}(u) + (1 − α) 1_{Y∖X}(u)`.
pub fn elementary_vorobev(x: &GridSet, y_obs: &GridSet, alpha: f64, u: usize) -> f64 {
    match (x.contains(u), y_obs.contains(u)) {
        (true, false) => alpha,
        (false, true) => 1.0 - alpha,
        _ => 0.0,
    }
}

/// `∫ S_{α,u}(X, Y) π(du)` for per-cell weights π, summed in cell order.
pub fn mixture_vorobev(x: &GridSet, y_obs: &GridSet, alpha: f64, pi: &[f64]) -> f64 {
    pi.iter()
        .enumerate()
        .fold(0.0, |acc, (u, w)| acc + w * elementary_vorobev(x, y_obs, alpha, u))
}

/// `α μ(X∖Y) + (1 − α) μ(Y∖X)`; at α = 1/2 this is `μ(X △ Y) / 2`.
pub fn score_normalized(x: &GridSet, y_obs: &GridSet, alpha: f64, grid: &Grid) -> f64 {
    mixture_vorobev(x, y_obs, alpha, &grid.weights)
}

/// `E S̃_α(X, Y) = Σ_{u ∈ X} μ(u)(α − p(u))`.
pub fn expected_score_tilde(x: &GridSet, y: &GridRandomSet, alpha: f64, grid: &Grid) -> f64 {
    let p = coverage(y);
    x.cells().fold(0.0, |acc, u| acc + grid.weights[u] * (alpha - p[u]))
}

/// `E S_{α,π}(X, Y) = Σ_u π(u)[α 1_X(u)(1 − p(u)) + (1 − α) 1_{X^c}(u) p(u)]`.
pub fn expected_score_normalized(x: &GridSet, y: &GridRandomSet, alpha: f64, pi: &[f64]) -> f64 {
    let p = coverage(y);
    pi.iter().enumerate().fold(0.0, |acc, (u, w)| {
        let e = if x.contains(u) {
            alpha * (1.0 - p[u])
        } else {
            (1.0 - alpha) * p[u]
        };
        acc + w * e
    })
}

fn check_grid(y: &GridRandomSet, grid: &Grid) -> Result<()> {
    if y.n != grid.len() {
        return Err(Error::LengthMismatch {
            what: "random-set cells vs grid weights",
            left: y.n,
            right: grid.len(),
        });
    }
    Ok(())
}

/// All subsets minimising the expected `S̃_α`, by enumerating `2^n` subsets.
///
/// The expected score of `X` is accumulated as `Σ_{u ∈ X} μ(u)(α − p(u))` in
/// cell order, so cells with a zero contribution leave the sum bit-identical
/// and ties are exact.
pub fn argmin_bruteforce(y: &GridRandomSet, alpha: f64, grid: &Grid) -> Result<Vec<GridSet>> {
    check_level("alpha", alpha, "[0, 1]")?;
    check_grid(y, grid)?;
    let n = y.n;
    if n > MAX_BRUTE_FORCE_CELLS {
        return Err(Error::TooLarge {
            n,
            max: MAX_BRUTE_FORCE_CELLS,
        });
    }
    let p = coverage(y);
    let c: Vec<f64> = (0..n).map(|u| grid.weights[u] * (alpha - p[u])).collect();
    let scores: Vec<f64> = (0..1u64 << n)
        .into_par_iter()
        .map(|bits| {
            (0..n)
                .filter(|u| bits >> u & 1 == 1)
                .fold(0.0, |acc, u| acc + c[u])
        })
        .collect();
    let best = scores.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(scores
        .iter()
        .enumerate()
        .filter(|(_, s)| **s == best)
        .map(|(bits, _)| GridSet::from_bits(n, bits as u64))
        .collect())
}

/// Whether `D` lies in the argmin band `Q_α^> ⊆ D ⊆ Q_α`, ignoring cells of
/// zero weight.
pub fn in_argmin_band(d: &GridSet, sets: &VorobevSets, grid: &Grid) -> bool {
    (0..d.len()).all(|u| {
        grid.weights[u] == 0.0
            || ((!sets.q_gt.contains(u) || d.contains(u)) && (sets.q_alpha.contains(u) || !d.contains(u)))
    })
}

/// Checks that expected scores grow as sets move away from `Q_α` along a
/// nested chain lying on one side of `Q_α`.
pub fn order_sensitivity_check(
    y: &GridRandomSet,
    alpha: f64,
    pi: &Grid,
    chain: &[GridSet],
) -> Result<bool> {
    check_level("alpha", alpha, "[0, 1]")?;
    check_grid(y, pi)?;
    if chain.iter().any(|s| s.len() != y.n) {
        return Err(Error::param("chain sets must have one entry per cell"));
    }
    if chain.len() <= 1 {
        return Ok(true);
    }
    let growing = chain.windows(2).all(|w| w[0].is_subset_of(&w[1]));
    let shrinking = chain.windows(2).all(|w| w[1].is_subset_of(&w[0]));
    if !growing && !shrinking {
        return Err(Error::NotNested);
    }
    let q = vorobev_sets(y, alpha)?.q_alpha;
    let above = chain.iter().all(|s| q.is_subset_of(s));
    let below = chain.iter().all(|s| s.is_subset_of(&q));
    if !above && !below {
        return Err(Error::param("chain must lie entirely above or entirely below Q_alpha"));
    }
    let scores: Vec<f64> = chain
        .iter()
        .map(|s| expected_score_normalized(s, y, alpha, pi.weights()))
        .collect();
    // moving away from Q_alpha means growing above it or shrinking below it
    let away = growing == above;
    let tol = 1e-12;
    Ok(scores.windows(2).all(|w| {
        if away {
            w[1] >= w[0] - tol
        } else {
            w[1] <= w[0] + tol
        }
    }))
}

/// Vorob'ev α-quantile of the random ray `[Z, ∞)` on sorted thresholds.
///
/// The ray is atomised on the threshold grid: `Z ≤ t₀` gives the full grid,
/// `Z ∈ (t_{k−1}, t_k]` gives `{t_k, …}`, and `Z > t_last` the empty set. The
/// coverage of `t_i` is then `F(t_i)`, so the result is
/// `{t_i : t_i ≥ q⁻_α(Z)}`.
pub fn embed_1d_quantile(z: &Distribution, alpha: f64, thresholds: &[f64]) -> Result<GridSet> {
    check_level("alpha", alpha, "(0, 1]")?;
    let n = thresholds.len();
    if n == 0 || thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param("thresholds must be nonempty and strictly increasing"));
    }
    let mut atoms = Vec::new();
    let mut prev = 0.0;
    for k in 0..=n {
        let upto = if k == n { 1.0 } else { z.cdf(thresholds[k]) };
        let p = upto - prev;
        if p > 0.0 {
            let cells: Vec<usize> = (k..n).collect();
            atoms.push((p, GridSet::from_cells(n, &cells)?));
        }
        prev = upto;
    }
    let y = GridRandomSet::new(n, atoms)?;
    // coverage is a telescoping sum of CDF increments; allow for its rounding
    Ok(vorobev_sets_from_coverage(&coverage(&y), alpha, PROB_TOL)?.q_alpha)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn set(n: usize, cells: &[usize]) -> GridSet {
        GridSet::from_cells(n, cells).unwrap()
    }

    fn example() -> GridRandomSet {
        GridRandomSet::new(4, vec![(0.5, set(4, &[0, 1])), (0.5, set(4, &[1, 2]))]).unwrap()
    }

    #[test]
    fn coverage_examples() {
        assert_eq!(coverage(&example()), vec![0.5, 1.0, 0.5, 0.0]);
        let single = GridRandomSet::new(3, vec![(1.0, set(3, &[2]))]).unwrap();
        assert_eq!(coverage(&single), vec![0.0, 0.0, 1.0]);
        let flipped = GridRandomSet::new(
            4,
            example().atoms().iter().map(|(p, s)| (*p, s.complement())).collect(),
        )
        .unwrap();
        let c = coverage(&flipped);
        for (a, b) in c.iter().zip(coverage(&example())) {
            assert_eq!(*a, 1.0 - b);
        }
    }

    #[test]
    fn threshold_examples() {
        let s = vorobev_sets(&example(), 0.6).unwrap();
        assert_eq!((s.q_alpha.clone(), s.q_gt.clone()), (set(4, &[1]), set(4, &[1])));
        assert_eq!(s.q_eq, GridSet::empty(4));
        let s = vorobev_sets(&example(), 0.5).unwrap();
        assert_eq!(s.q_alpha, set(4, &[0, 1, 2]));
        assert_eq!(s.q_gt, set(4, &[1]));
        assert_eq!(s.q_eq, set(4, &[0, 2]));
        assert_eq!(vorobev_sets(&example(), 0.0).unwrap().q_alpha, GridSet::full(4));
    }

    #[test]
    fn identification_and_scores() {
        let y = set(4, &[1, 2]);
        assert!((v_alpha_ident(1, &y, 0.3) - 0.7).abs() < 1e-15);
        assert_eq!(v_alpha_ident(0, &y, 0.3), -0.3);
        assert_eq!(coverage(&example())[0] - 0.5, 0.0);

        let g = Grid::counting(4).unwrap();
        assert_eq!(score_tilde(&GridSet::empty(4), &y, 0.3, &g), 0.0);
        assert_eq!(score_tilde(&set(4, &[0, 1]), &y, 0.5, &g), 0.0);
        assert_eq!(score_tilde(&set(4, &[1]), &y, 1.0, &g), 0.0);

        assert_eq!(score_normalized(&set(4, &[0, 1]), &y, 0.5, &g), 1.0);
        assert_eq!(score_normalized(&y, &y, 0.3, &g), 0.0);
        let one = GridSet::from_cells(1, &[0]).unwrap();
        let s = score_normalized(&GridSet::empty(1), &one, 0.3, &Grid::counting(1).unwrap());
        assert!((s - 0.7).abs() < 1e-15);
    }

    #[test]
    fn argmin_examples() {
        let g = Grid::counting(4).unwrap();
        let mins = argmin_bruteforce(&example(), 0.5, &g).unwrap();
        // cell 3 has coverage 0 < 0.5 and is always excluded
        assert_eq!(mins.len(), 4);
        for d in &mins {
            assert!(set(4, &[1]).is_subset_of(d) && d.is_subset_of(&set(4, &[0, 1, 2])));
        }
        let three = GridRandomSet::new(3, vec![(0.5, set(3, &[0, 1])), (0.5, set(3, &[1, 2]))]).unwrap();
        assert_eq!(argmin_bruteforce(&three, 0.5, &Grid::counting(3).unwrap()).unwrap().len(), 4);
        assert_eq!(argmin_bruteforce(&example(), 0.6, &g).unwrap(), vec![set(4, &[1])]);

        let zero = Grid::new(vec![1.0, 1.0, 1.0, 0.0]).unwrap();
        let mins = argmin_bruteforce(&example(), 0.6, &zero).unwrap();
        assert_eq!(mins, vec![set(4, &[1]), set(4, &[1, 3])]);

        let big = GridRandomSet::new(21, vec![(1.0, GridSet::empty(21))]).unwrap();
        assert!(matches!(
            argmin_bruteforce(&big, 0.5, &Grid::counting(21).unwrap()),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn order_sensitivity_examples() {
        let y = GridRandomSet::new(
            5,
            vec![(0.6, set(5, &[0, 1, 2])), (0.3, set(5, &[1, 2, 3])), (0.1, set(5, &[2, 4]))],
        )
        .unwrap();
        let pi = Grid::new(vec![1.0, 0.5, 2.0, 1.5, 1.0]).unwrap();
        let alpha = 0.55;
        let q = vorobev_sets(&y, alpha).unwrap().q_alpha;
        assert_eq!(q, set(5, &[0, 1, 2]));
        let up = vec![q.clone(), set(5, &[0, 1, 2, 3]), set(5, &[0, 1, 2, 3, 4])];
        assert!(order_sensitivity_check(&y, alpha, &pi, &up).unwrap());
        let down = vec![q.clone(), set(5, &[1, 2]), set(5, &[2]), GridSet::empty(5)];
        assert!(order_sensitivity_check(&y, alpha, &pi, &down).unwrap());
        // approaching Q_alpha from below: scores shrink along the chain
        let toward: Vec<GridSet> = down.iter().rev().cloned().collect();
        assert!(order_sensitivity_check(&y, alpha, &pi, &toward).unwrap());
        assert!(order_sensitivity_check(&y, alpha, &pi, &[set(5, &[3])]).unwrap());
        let broken = vec![set(5, &[0]), set(5, &[1])];
        assert!(matches!(order_sensitivity_check(&y, alpha, &pi, &broken), Err(Error::NotNested)));
        let straddle = vec![set(5, &[0]), set(5, &[0, 3])];
        assert!(order_sensitivity_check(&y, alpha, &pi, &straddle).is_err());
    }

    #[test]
    fn embedding_examples() {
        let ts: Vec<f64> = (-10..=10).map(|i| i as f64 / 5.0).collect();
        let d = Distribution::dirac(0.0).unwrap();
        for alpha in [0.1, 0.5, 1.0] {
            let ray = embed_1d_quantile(&d, alpha, &ts).unwrap();
            assert_eq!(ray, GridSet::from_mask(ts.iter().map(|t| *t >= 0.0).collect()));
        }
        let two = Distribution::mixture(vec![
            (0.5, Distribution::dirac(0.0).unwrap()),
            (0.5, Distribution::dirac(1.0).unwrap()),
        ])
        .unwrap();
        let ray = embed_1d_quantile(&two, 0.75, &ts).unwrap();
        assert_eq!(ray, GridSet::from_mask(ts.iter().map(|t| *t >= 1.0).collect()));
    }

    #[test]
    fn file_formats_round_trip() {
        let s = set(5, &[0, 3]);
        assert_eq!(s.to_text(), "cells 5\n1 0 0 1 0\n");
        assert_eq!(GridSet::parse(&s.to_text(), "mem").unwrap(), s);
        assert!(GridSet::parse("cells 3\n1 0\n", "mem").is_err());
        assert!(GridSet::parse("cells 2\n1 2\n", "mem").is_err());
        let y = example();
        assert_eq!(GridRandomSet::from_json(&y.to_json()).unwrap(), y);
        assert!(GridRandomSet::from_json(r#"{"n":2,"atoms":[{"p":0.5,"cells":[0]}]}"#).is_err());
        assert!(GridRandomSet::from_json(r#"{"n":2,"atoms":[{"p":1,"cells":[5]}]}"#).is_err());
        let g = Grid::parse_weights("1 2.5\n0\n", "w").unwrap();
        assert_eq!(g.weights(), &[1.0, 2.5, 0.0]);
        assert!(Grid::parse_weights("1 x", "w").is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let y = example();
        assert_eq!(y.sample_n(50, 9), y.sample_n(50, 9));
        let draws = y.sample_n(20_000, 1);
        let hits = draws.iter().filter(|s| s.contains(0)).count() as f64 / 20_000.0;
        assert!((hits - 0.5).abs() < 0.02);
    }

    fn arb_instance() -> impl Strategy<Value = (GridRandomSet, GridSet, GridSet, Vec<f64>)> {
        (2usize..10).prop_flat_map(|n| {
            (
                prop::collection::vec((1u32..10, prop::collection::vec(any::<bool>(), n)), 1..5),
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec(0.0..3.0f64, n),
            )
                .prop_map(move |(atoms, x, yo, w)| {
                    let total: u32 = atoms.iter().map(|a| a.0).sum();
                    let atoms = atoms
                        .into_iter()
                        .map(|(k, m)| (k as f64 / total as f64, GridSet::from_mask(m)))
                        .collect();
                    let y = GridRandomSet::new(n, atoms).unwrap();
                    (y, GridSet::from_mask(x), GridSet::from_mask(yo), w)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn consistency_gap_matches_the_coverage_integrals((y, m, _, w) in arb_instance(), alpha in 0.0..1.0f64) {
            let grid = Grid::new(w).unwrap();
            let p = coverage(&y);
            let sets = vorobev_sets(&y, alpha).unwrap();
            // a member of the argmin band
            let d = sets.q_gt.clone();
            let lhs = expected_score_tilde(&m, &y, alpha, &grid) - expected_score_tilde(&d, &y, alpha, &grid);
            let by_atoms = |x: &GridSet| y.atoms().iter().map(|(pk, s)| pk * score_tilde(x, s, alpha, &grid)).sum::<f64>();
            prop_assert!((lhs - (by_atoms(&m) - by_atoms(&d))).abs() < 1e-12);
            let gain: f64 = sets.q_gt.difference(&m).cells().map(|u| grid.weights()[u] * (p[u] - alpha)).sum();
            let loss: f64 = m.difference(&sets.q_alpha).cells().map(|u| grid.weights()[u] * (p[u] - alpha)).sum();
            prop_assert!((lhs - (gain - loss)).abs() < 1e-12);
            prop_assert!(gain - loss >= 0.0);
        }

        #[test]
        fn median_score_is_half_the_symmetric_difference((_, x, yo, w) in arb_instance()) {
            let grid = Grid::new(w).unwrap();
            prop_assert_eq!(score_normalized(&x, &yo, 0.5, &grid), 0.5 * grid.weight(&x.symmetric_difference(&yo)));
        }

        #[test]
        fn strict_when_no_coverage_hits_alpha((y, _, _, w) in arb_instance(), alpha in 0.0..1.0f64) {
            let grid = Grid::new(w.iter().map(|v| v + 0.1).collect()).unwrap();
            let sets = vorobev_sets(&y, alpha).unwrap();
            prop_assume!(sets.q_eq.count() == 0);
            prop_assert_eq!(argmin_bruteforce(&y, alpha, &grid).unwrap(), vec![sets.q_alpha]);
        }
    }
}
