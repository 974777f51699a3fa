//! Worst-case analysis: the fractal wrongly decoded family, the 1-D restricted
//! decoder, exhaustive radius searches, bound certification and ablations.

use std::fmt;

use itertools::Itertools;
use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::trial_seed;
use crate::decoder::{decode, decode_with, residual_class, residual_class_with, DecoderOptions};
use crate::error::{Error, Result};
use crate::lattice::{full_row, homology_class, syndrome, Edge, EdgeSet, HomologyClass, SyndromeSet, TorusLevel};

/// Default cap on the number of patterns a radius search may enumerate.
pub const RADIUS_BUDGET: u128 = 50_000_000;

/// Default cap on exhaustive enumeration inside [`verify_bounds`]; beyond it
/// the lower bound is sampled instead.
pub const EXHAUSTIVE_BUDGET: u128 = 5_000_000;

/// Non-negative rational, used for `v_k = (6/5)^(k-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn ceil(self) -> u64 {
        self.num.div_ceil(self.den)
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Weight of the fractal witness: 1, 2, 3, then doubling every two levels.
pub fn u_k(k: u32) -> u64 {
    assert!(k >= 1, "levels start at 1");
    match k {
        1..=3 => k as u64,
        _ => 2 * u_k(k - 2),
    }
}

/// Lower-bound sequence `(6/5)^(k-1)`.
pub fn v_k(k: u32) -> Ratio {
    assert!(k >= 1, "levels start at 1");
    Ratio {
        num: 6u64.pow(k - 1),
        den: 5u64.pow(k - 1),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundSequences {
    /// `u[k-1] = u_k`.
    pub u: Vec<u64>,
    /// `v[k-1] = v_k`.
    pub v: Vec<Ratio>,
}

impl BoundSequences {
    pub fn up_to(k_max: u32) -> Self {
        Self {
            u: (1..=k_max).map(u_k).collect(),
            v: (1..=k_max).map(v_k).collect(),
        }
    }
}

/// Row-0 intervals `[a, b)` of unit edges making up the level-`k` fractal error.
pub fn fractal_intervals(k: u32) -> Vec<(u32, u32)> {
    match k {
        0 => Vec::new(),
        1 => vec![(0, 1)],
        2 => vec![(0, 2)],
        _ => fractal_intervals(k - 1)
            .into_iter()
            .flat_map(|(a, b)| match b - a {
                2 => vec![(2 * a + 1, 2 * b)],
                3 => vec![(2 * a + 1, 2 * a + 3), (2 * a + 4, 2 * b)],
                len => unreachable!("fractal paths have length 2 or 3, got {len}"),
            })
            .collect(),
    }
}

/// Row-supported error of weight `u_k` that the decoder expands into the full
/// row `y = 0`. The construction is checked against the decoder before it is
/// returned.
pub fn fractal_error(k: u32) -> Result<EdgeSet> {
    let level = TorusLevel::new(k)?;
    let e = EdgeSet::from_edges(
        level,
        fractal_intervals(k)
            .into_iter()
            .flat_map(|(a, b)| (a..b).map(|x| Edge::h(x, 0))),
    );
    if e.weight() as u64 != u_k(k) {
        return Err(Error::ContractViolation(format!(
            "fractal error at k={k} has weight {}, expected {}",
            e.weight(),
            u_k(k)
        )));
    }
    let residual = &e ^ &decode(&syndrome(&e))?;
    if residual != full_row(level, 0) || homology_class(&residual)? != HomologyClass::new(true, false) {
        return Err(Error::ContractViolation(format!(
            "fractal error at k={k} is not expanded into the full row"
        )));
    }
    Ok(e)
}

/// The decoder restricted to row `y = 0`, written directly on the cycle of
/// length `m`: at each stage, a defect on a block middle pairs with the block's
/// right end when both are present, and any remaining middle defect moves left.
pub fn decode_1d(s: &SyndromeSet) -> Result<EdgeSet> {
    let level = s.level();
    let mut defect = vec![false; level.m() as usize];
    for v in s.iter() {
        if v.y != 0 {
            return Err(Error::InvalidSyndrome(format!("vertex {v} is off row 0")));
        }
        defect[v.x as usize] = true;
    }
    if !s.len().is_multiple_of(2) {
        return Err(Error::InvalidSyndrome(format!("odd cardinality {}", s.len())));
    }
    let flips = reduce_row(level.k(), defect)
        .ok_or_else(|| Error::ContractViolation("1-D reduction left defects behind".into()))?;
    Ok(EdgeSet::from_edges(
        level,
        flips.iter().enumerate().filter(|(_, &f)| f).map(|(x, _)| Edge::h(x as u32, 0)),
    ))
}

/// Row edges flipped by the 1-D decoder, indexed by left endpoint; `None` if
/// defects survive (only possible for odd input).
fn reduce_row(k: u32, mut defect: Vec<bool>) -> Option<Vec<bool>> {
    let m = defect.len();
    let mut flips = vec![false; m];
    let flip_run = |flips: &mut Vec<bool>, start: usize, len: usize| {
        for x in start..start + len {
            flips[x % m] ^= true;
        }
    };
    for stage in (1..=k).rev() {
        let g = 1usize << (k - stage);
        let span = 2 * g;
        for j in 0..m / span {
            let (mid, right) = (span * j + g, (span * j + span) % m);
            if defect[mid] && defect[right] {
                flip_run(&mut flips, mid, g);
                defect[mid] = false;
                defect[right] = false;
            }
        }
        for j in 0..m / span {
            let (left, mid) = (span * j, span * j + g);
            if defect[mid] {
                flip_run(&mut flips, left, g);
                defect[mid] = false;
                defect[left] ^= true;
            }
        }
    }
    (!defect.iter().any(|&d| d)).then_some(flips)
}

/// Whether the 1-D decoder turns the row error with edges `xs` into the full row.
fn row_fails(k: u32, m: usize, xs: &[usize]) -> bool {
    let mut err = vec![false; m];
    let mut defect = vec![false; m];
    for &x in xs {
        err[x] = true;
        defect[x] ^= true;
        defect[(x + 1) % m] ^= true;
    }
    let flips = reduce_row(k, defect).expect("row syndromes have even size");
    err.iter().zip(&flips).all(|(a, b)| a ^ b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadiusMode {
    #[serde(rename = "1d")]
    OneD,
    #[serde(rename = "2d")]
    TwoD,
}

impl fmt::Display for RadiusMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RadiusMode::OneD => "1d",
            RadiusMode::TwoD => "2d",
        })
    }
}

/// Outcome of an exhaustive radius search.
///
/// With a witness, every pattern lighter than the witness was checked and
/// `omega = witness weight - 1`. Without one, `omega = w_max` is only a lower
/// bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadiusReport {
    pub k: u32,
    pub mode: RadiusMode,
    pub omega: u32,
    pub witness: Option<Vec<Edge>>,
    pub w_max: u32,
    pub patterns_checked: u128,
}

impl RadiusReport {
    pub fn is_exact(&self) -> bool {
        self.witness.is_some()
    }
}

pub fn binomial(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Lexicographically first `w`-subset of `0..n` accepted by `fails`. The
/// first index is sharded across the rayon pool; `find_map_first` keeps the
/// answer independent of scheduling.
pub fn first_failing_subset<F>(n: usize, w: usize, fails: F) -> Option<Vec<usize>>
where
    F: Fn(&[usize]) -> bool + Sync,
{
    if w == 0 || w > n {
        return None;
    }
    (0..=n - w).into_par_iter().find_map_first(|a| {
        let mut buf = Vec::with_capacity(w);
        (a + 1..n).combinations(w - 1).find_map(|rest| {
            buf.clear();
            buf.push(a);
            buf.extend(rest);
            fails(&buf).then(|| buf.clone())
        })
    })
}

/// Searches subsets of `universe` by increasing weight; `fails` receives
/// indices into `universe`.
fn search_radius<F>(
    k: u32,
    mode: RadiusMode,
    universe: &[Edge],
    w_max: u32,
    budget: u128,
    fails: F,
) -> Result<RadiusReport>
where
    F: Fn(&[usize]) -> bool + Sync,
{
    let n = universe.len();
    let needed: u128 = (1..=w_max as u128).map(|w| binomial(n as u128, w)).sum();
    if needed > budget {
        return Err(Error::SearchBudgetExceeded { needed, budget });
    }
    let mut checked = 0u128;
    for w in 1..=w_max {
        let count = binomial(n as u128, w as u128);
        let hit = first_failing_subset(n, w as usize, |idx| fails(idx));
        if let Some(idx) = hit {
            // patterns after the witness at this weight were not visited
            return Ok(RadiusReport {
                k,
                mode,
                omega: w - 1,
                witness: Some(idx.into_iter().map(|i| universe[i]).collect()),
                w_max,
                patterns_checked: checked,
            });
        }
        checked += count;
    }
    Ok(RadiusReport {
        k,
        mode,
        omega: w_max,
        witness: None,
        w_max,
        patterns_checked: checked,
    })
}

/// Exact radius of the decoder on row-supported errors, by enumerating every
/// row pattern of weight at most `u_k`.
pub fn radius_1d(k: u32) -> Result<RadiusReport> {
    radius_1d_with_budget(k, RADIUS_BUDGET)
}

pub fn radius_1d_with_budget(k: u32, budget: u128) -> Result<RadiusReport> {
    let level = TorusLevel::new(k)?;
    let m = level.m() as usize;
    let row: Vec<Edge> = (0..level.m()).map(|x| Edge::h(x, 0)).collect();
    search_radius(k, RadiusMode::OneD, &row, u_k(k) as u32, budget, |xs| row_fails(k, m, xs))
}

/// Radius of the full decoder over all edge patterns of weight at most `w_max`.
pub fn radius_2d(k: u32, w_max: u32) -> Result<RadiusReport> {
    radius_2d_with_budget(k, w_max, RADIUS_BUDGET)
}

pub fn radius_2d_with_budget(k: u32, w_max: u32, budget: u128) -> Result<RadiusReport> {
    let level = TorusLevel::new(k)?;
    let all: Vec<Edge> = (0..level.n()).map(|i| level.edge_at(i)).collect();
    search_radius(k, RadiusMode::TwoD, &all, w_max, budget, |idx| {
        let edges: Vec<Edge> = idx.iter().map(|&i| all[i]).collect();
        wrongly_decoded(level, &edges)
    })
}

/// Which reduction steps to leave out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Ablation {
    pub skip_step1: bool,
    pub skip_step2: bool,
}

impl Ablation {
    pub const NONE: Ablation = Ablation {
        skip_step1: false,
        skip_step2: false,
    };
    pub const STEP1: Ablation = Ablation {
        skip_step1: true,
        skip_step2: false,
    };
    pub const STEP2: Ablation = Ablation {
        skip_step1: false,
        skip_step2: true,
    };

    pub fn options(self) -> DecoderOptions {
        DecoderOptions {
            skip_step1: self.skip_step1,
            skip_step2: self.skip_step2,
            ..DecoderOptions::default()
        }
    }
}

impl fmt::Display for Ablation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.skip_step1, self.skip_step2) {
            (false, false) => f.write_str("none"),
            (true, false) => f.write_str("step1"),
            (false, true) => f.write_str("step2"),
            (true, true) => f.write_str("step1+step2"),
        }
    }
}

/// The decoder with the given steps disabled.
pub fn ablation_decode(s: &SyndromeSet, ablation: Ablation) -> Result<EdgeSet> {
    decode_with(s, &ablation.options())
}

pub fn ablation_fails(level: TorusLevel, edges: &[Edge], ablation: Ablation) -> Result<bool> {
    Ok(!residual_class_with(level, edges, &ablation.options())?.is_trivial())
}

/// Lightest (then lexicographically first) error the ablated decoder gets
/// wrong, searching weights `1..=max_weight`.
pub fn find_ablation_witness(k: u32, ablation: Ablation, max_weight: u32) -> Result<Option<Vec<Edge>>> {
    let level = TorusLevel::new(k)?;
    let all: Vec<Edge> = (0..level.n()).map(|i| level.edge_at(i)).collect();
    let report = search_radius(k, RadiusMode::TwoD, &all, max_weight, RADIUS_BUDGET, |idx| {
        let edges: Vec<Edge> = idx.iter().map(|&i| all[i]).collect();
        ablation_fails(level, &edges, ablation).expect("valid input")
    })?;
    Ok(report.witness)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum LowerMethod {
    /// Nothing to check: the lower bound is 0.
    Trivial,
    Exhaustive { patterns: u64 },
    /// Random errors of weight `1..=certified_lower`; not a certificate.
    Sampled { samples: u64 },
}

impl fmt::Display for LowerMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LowerMethod::Trivial => f.write_str("trivial"),
            LowerMethod::Exhaustive { patterns } => write!(f, "exhaustive over {patterns} patterns"),
            LowerMethod::Sampled { samples } => write!(f, "sampled {samples} errors (not a certificate)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub k: u32,
    pub u_k: u64,
    pub v_k: Ratio,
    pub witness_weight: usize,
    /// `ceil(v_k) - 1`.
    pub certified_lower: u64,
    /// `witness_weight - 1`.
    pub certified_upper: u64,
    pub lower_method: LowerMethod,
    /// Wrongly decoded errors lighter than `v_k`. Any entry refutes the bound.
    pub falsifications: Vec<Vec<Edge>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub rows: Vec<BoundsRow>,
}

impl BoundsReport {
    pub fn is_falsified(&self) -> bool {
        self.rows
            .iter()
            .any(|r| !r.falsifications.is_empty() || r.witness_weight as u64 != r.u_k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Random errors per level when exhaustive checking is too large.
    pub samples: u64,
    pub seed: u64,
    pub exhaustive_budget: u128,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 0,
            exhaustive_budget: EXHAUSTIVE_BUDGET,
        }
    }
}

/// Kept per level; later counterexamples add nothing to the verdict.
const MAX_FALSIFICATIONS: usize = 16;

fn wrongly_decoded(level: TorusLevel, edges: &[Edge]) -> bool {
    !residual_class(level, edges).expect("valid input").is_trivial()
}

/// Checks `ceil(v_k) - 1 ≤ ω_k ≤ u_k - 1` for each `k`: the upper bound by the
/// fractal witness, the lower bound by enumeration or sampling.
pub fn verify_bounds(ks: &[u32], opts: &VerifyOptions) -> Result<BoundsReport> {
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let level = TorusLevel::new(k)?;
        let witness = fractal_error(k)?;
        let lower = v_k(k).ceil() - 1;
        let n = level.n();
        let patterns: u128 = (1..=lower as u128).map(|w| binomial(n as u128, w)).sum();
        let mut falsifications = Vec::new();
        let lower_method = if lower == 0 {
            LowerMethod::Trivial
        } else if patterns <= opts.exhaustive_budget {
            for w in 1..=lower as usize {
                let hit = first_failing_subset(n, w, |idx| {
                    let edges: Vec<Edge> = idx.iter().map(|&i| level.edge_at(i)).collect();
                    wrongly_decoded(level, &edges)
                });
                if let Some(idx) = hit {
                    falsifications.push(idx.into_iter().map(|i| level.edge_at(i)).collect());
                }
            }
            LowerMethod::Exhaustive { patterns: patterns as u64 }
        } else {
            falsifications = (0..opts.samples)
                .into_par_iter()
                .filter_map(|i| {
                    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(opts.seed, k, 0, i));
                    let w = rng.gen_range(1..=lower as usize);
                    let edges: Vec<Edge> = sample_indices(&mut rng, n, w)
                        .into_iter()
                        .sorted()
                        .map(|j| level.edge_at(j))
                        .collect();
                    wrongly_decoded(level, &edges).then_some(edges)
                })
                .collect();
            LowerMethod::Sampled { samples: opts.samples }
        };
        falsifications.truncate(MAX_FALSIFICATIONS);
        rows.push(BoundsRow {
            k,
            u_k: u_k(k),
            v_k: v_k(k),
            witness_weight: witness.weight(),
            certified_lower: lower,
            certified_upper: witness.weight() as u64 - 1,
            lower_method,
            falsifications,
        });
    }
    Ok(BoundsReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Vertex;

    fn lvl(k: u32) -> TorusLevel {
        TorusLevel::new(k).unwrap()
    }

    #[test]
    fn bound_sequences() {
        let b = BoundSequences::up_to(12);
        assert_eq!(b.u, vec![1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64]);
        assert_eq!(b.v[0], Ratio { num: 1, den: 1 });
        assert_eq!(b.v[2].ceil(), 2);
        assert!(b.v.windows(2).all(|w| w[0].as_f64() < w[1].as_f64()));
        // ceil((6/5)^(k-1)) for k = 1..=12
        let ceilings: Vec<u64> = b.v.iter().map(|r| r.ceil()).collect();
        assert_eq!(ceilings, vec![1, 2, 2, 2, 3, 3, 3, 4, 5, 6, 7, 8]);
    }

    #[test]
    fn fractal_intervals_follow_the_growth_rules() {
        assert_eq!(fractal_intervals(3), vec![(1, 4)]);
        assert_eq!(fractal_intervals(4), vec![(3, 5), (6, 8)]);
        assert_eq!(fractal_intervals(5), vec![(7, 10), (13, 16)]);
        assert_eq!(fractal_intervals(6).len(), 4);
        assert!(fractal_intervals(6).iter().all(|(a, b)| b - a == 2));
    }

    #[test]
    fn fractal_errors_fail_with_their_expected_weight() {
        for k in 1..=9 {
            let e = fractal_error(k).unwrap();
            assert_eq!(e.weight() as u64, u_k(k), "k={k}");
            assert!(e.is_row_supported());
        }
        assert_eq!(fractal_error(1).unwrap().to_vec(), vec![Edge::h(0, 0)]);
    }

    fn row_set(l: TorusLevel, mask: u64) -> EdgeSet {
        EdgeSet::from_edges(l, (0..l.m()).filter(|x| mask >> x & 1 == 1).map(|x| Edge::h(x, 0)))
    }

    #[test]
    fn decode_1d_matches_full_decoder_on_all_row_patterns() {
        for k in 1..=4 {
            let l = lvl(k);
            for mask in 0..1u64 << l.m() {
                let s = syndrome(&row_set(l, mask));
                assert_eq!(decode_1d(&s).unwrap(), decode(&s).unwrap(), "k={k} mask={mask:b}");
            }
        }
    }

    #[test]
    fn decode_1d_rejects_bad_input() {
        let l = lvl(3);
        let off_row = SyndromeSet::from_vertices(l, [Vertex::new(0, 1), Vertex::new(0, 0)]).unwrap();
        assert!(matches!(decode_1d(&off_row), Err(Error::InvalidSyndrome(_))));
        let odd = SyndromeSet::from_vertices(l, [Vertex::new(3, 0)]).unwrap();
        assert!(matches!(decode_1d(&odd), Err(Error::InvalidSyndrome(_))));
        assert!(decode_1d(&SyndromeSet::empty(l)).unwrap().is_empty());
    }

    /// Smallest failing row weight by plain bitmask enumeration.
    fn brute_1d_min_failure(k: u32) -> u32 {
        let l = lvl(k);
        let full = full_row(l, 0);
        (1..1u64 << l.m())
            .filter(|&mask| {
                let e = row_set(l, mask);
                &e ^ &decode(&syndrome(&e)).unwrap() == full
            })
            .map(|mask| mask.count_ones())
            .min()
            .unwrap()
    }

    #[test]
    fn radius_1d_small_levels() {
        for k in 1..=4 {
            let r = radius_1d(k).unwrap();
            assert_eq!(r.omega as u64, u_k(k) - 1, "k={k}");
            assert_eq!(r.witness.as_ref().unwrap().len() as u64, u_k(k));
            assert_eq!(r.omega + 1, brute_1d_min_failure(k));
        }
    }

    #[test]
    fn radius_1d_budget() {
        assert!(matches!(radius_1d(7), Err(Error::SearchBudgetExceeded { .. })));
        assert!(matches!(
            radius_1d_with_budget(4, 10),
            Err(Error::SearchBudgetExceeded { .. })
        ));
    }

    /// Every subset of the 8 edges at k=1, decoded with the dense decoder.
    #[test]
    fn radius_2d_level_one_against_dense_oracle() {
        let l = lvl(1);
        let min_fail = (1u32..256)
            .filter(|mask| {
                let e = EdgeSet::from_indices(l, (0..8).filter(|i| mask >> i & 1 == 1));
                !homology_class(&(&e ^ &decode(&syndrome(&e)).unwrap())).unwrap().is_trivial()
            })
            .map(|mask| mask.count_ones())
            .min()
            .unwrap();
        let r = radius_2d(1, 8).unwrap();
        assert_eq!(r.omega, 0);
        assert_eq!(r.omega + 1, min_fail);
        assert_eq!(r.witness.unwrap().len(), 1);
    }

    #[test]
    fn radius_2d_level_two() {
        let r = radius_2d(2, 2).unwrap();
        assert!(r.omega <= 1);
        let w = r.witness.clone().unwrap();
        let e = EdgeSet::from_edges(lvl(2), w);
        assert!(!homology_class(&(&e ^ &decode(&syndrome(&e)).unwrap())).unwrap().is_trivial());
    }

    #[test]
    fn ablation_witnesses() {
        // a B-cell top edge at every stage; without step 2 it doubles each time
        let l = lvl(5);
        let e = [Edge::h(31, 0)];
        assert!(ablation_fails(l, &e, Ablation::STEP2).unwrap());
        assert!(!ablation_fails(l, &e, Ablation::NONE).unwrap());

        let w2 = find_ablation_witness(5, Ablation::STEP2, 1).unwrap().unwrap();
        assert_eq!(w2.len(), 1);
        assert!(!wrongly_decoded(l, &w2));

        let l4 = lvl(4);
        assert!(find_ablation_witness(4, Ablation::STEP1, 1).unwrap().is_none());
        let w1 = find_ablation_witness(4, Ablation::STEP1, 2).unwrap().unwrap();
        assert_eq!(w1.len(), 2);
        assert!(!wrongly_decoded(l4, &w1));
    }

    #[test]
    fn no_op_ablation_is_the_decoder() {
        let l = lvl(4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let e = EdgeSet::from_indices(l, (0..l.n()).filter(|_| rng.gen_bool(0.05)));
            let s = syndrome(&e);
            assert_eq!(ablation_decode(&s, Ablation::NONE).unwrap(), decode(&s).unwrap());
        }
    }

    #[test]
    fn verify_small_levels() {
        let opts = VerifyOptions {
            samples: 2000,
            ..VerifyOptions::default()
        };
        let report = verify_bounds(&[1, 2, 3, 4, 7], &opts).unwrap();
        assert!(!report.is_falsified());
        let r3 = &report.rows[2];
        assert_eq!((r3.certified_lower, r3.certified_upper), (1, 2));
        assert_eq!(r3.lower_method, LowerMethod::Exhaustive { patterns: 128 });
        assert_eq!(report.rows[0].lower_method, LowerMethod::Trivial);
        assert_eq!(report.rows[4].lower_method, LowerMethod::Sampled { samples: 2000 });
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(32, 2), 496);
        assert_eq!(binomial(512, 2), 130_816);
        assert_eq!(binomial(3, 5), 0);
    }
}
