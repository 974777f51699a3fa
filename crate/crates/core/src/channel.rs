//! Bit-flip channel and the Monte Carlo threshold experiment.
//!
//! Every trial draws its own RNG stream from a SHA-256 hash of
//! `(master_seed, k, p_index, trial_index)`, so results do not depend on how
//! trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::decoder::is_wrongly_decoded;
use crate::error::{Error, Result};
use crate::lattice::{EdgeSet, TorusLevel};

/// z-score of a two-sided 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub k: u32,
    pub p: f64,
    pub trials: u64,
    pub master_seed: u64,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        TorusLevel::new(self.k)?;
        check_probability(self.p)?;
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        Ok(())
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("flip probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// One row of an experiment grid. `p_index` enters the per-trial seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub k: u32,
    pub p: f64,
    pub p_index: usize,
    pub trials: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub k: u32,
    pub p: f64,
    pub trials: u64,
    pub failures: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl TrialResult {
    pub fn from_counts(k: u32, p: f64, trials: u64, failures: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(failures, trials);
        Self {
            k,
            p,
            trials,
            failures,
            rate: failures as f64 / trials as f64,
            ci_low,
            ci_high,
            seed,
        }
    }

    pub fn overlaps(&self, other: &TrialResult) -> bool {
        self.ci_low <= other.ci_high && other.ci_low <= self.ci_high
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    assert!(trials > 0 && failures <= trials);
    let n = trials as f64;
    let rate = failures as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (rate + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (rate * (1.0 - rate) / n + z2 / (4.0 * n * n)).sqrt();
    let low = (center - half).clamp(0.0, rate);
    let high = (center + half).clamp(rate, 1.0);
    (low, high)
}

/// Per-trial stream seed, a hash of the master seed and the trial coordinates.
pub fn trial_seed(master_seed: u64, k: u32, p_index: usize, trial: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(master_seed.to_le_bytes());
    h.update((k as u64).to_le_bytes());
    h.update((p_index as u64).to_le_bytes());
    h.update(trial.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Flips each of the `n` edges independently with probability `p`.
pub fn sample_bitflip(level: TorusLevel, p: f64, seed: u64) -> EdgeSet {
    assert!((0.0..=1.0).contains(&p), "flip probability {p} outside [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EdgeSet::from_indices(level, (0..level.n()).filter(|_| rng.gen_bool(p)))
}

/// Samples one error and reports whether decoding failed.
pub fn run_trial(level: TorusLevel, p: f64, seed: u64) -> bool {
    is_wrongly_decoded(&sample_bitflip(level, p, seed))
}

pub fn run_point(point: &GridPoint, master_seed: u64) -> Result<TrialResult> {
    let cfg = TrialConfig {
        k: point.k,
        p: point.p,
        trials: point.trials,
        master_seed,
    };
    cfg.validate()?;
    let level = TorusLevel::new(point.k)?;
    let failures = (0..point.trials)
        .into_par_iter()
        .filter(|&t| run_trial(level, point.p, trial_seed(master_seed, point.k, point.p_index, t)))
        .count() as u64;
    Ok(TrialResult::from_counts(point.k, point.p, point.trials, failures, master_seed))
}

/// Runs every grid point in order. Work is spread over the current rayon pool;
/// the counts, and therefore the output, do not depend on its size.
pub fn run_experiment(grid: &[GridPoint], master_seed: u64) -> Result<Vec<TrialResult>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty experiment grid".into()));
    }
    grid.iter().map(|pt| run_point(pt, master_seed)).collect()
}

/// Cartesian grid, `k` outermost; `p_index` is the position in `ps`.
pub fn grid(ks: &[u32], ps: &[f64], trials: u64) -> Vec<GridPoint> {
    ks.iter()
        .flat_map(|&k| {
            ps.iter().enumerate().map(move |(p_index, &p)| GridPoint {
                k,
                p,
                p_index,
                trials,
            })
        })
        .collect()
}

/// Inclusive arithmetic range `start, start+step, …, end`, with the end point
/// admitted within `1e-12`.
pub fn p_range(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    const TOL: f64 = 1e-12;
    for p in [start, end] {
        check_probability(p)?;
    }
    if end < start - TOL {
        return Err(Error::InvalidArgument(format!("empty range {start}:{end}")));
    }
    if step < 0.0 || (step == 0.0 && (end - start).abs() > TOL) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    if step == 0.0 {
        return Ok(vec![start]);
    }
    let count = ((end - start) / step + TOL).floor() as usize + 1;
    Ok((0..count)
        .map(|i| {
            let p = start + i as f64 * step;
            // snap float noise (0.035 + 4·0.005 = 0.05500000000000001)
            (p * 1e12).round() / 1e12
        })
        .collect())
}

/// Where two failure-rate curves sampled on the same `ps` cross, by linear
/// interpolation at the first sign change of their difference.
pub fn crossing_estimate(ps: &[f64], small: &[f64], large: &[f64]) -> Option<f64> {
    assert_eq!(ps.len(), small.len());
    assert_eq!(ps.len(), large.len());
    let diff: Vec<f64> = small.iter().zip(large).map(|(a, b)| b - a).collect();
    for i in 0..diff.len().saturating_sub(1) {
        let (d0, d1) = (diff[i], diff[i + 1]);
        if d0 == 0.0 {
            return Some(ps[i]);
        }
        if d0.signum() != d1.signum() || d1 == 0.0 {
            let t = d0 / (d0 - d1);
            return Some(ps[i] + t * (ps[i + 1] - ps[i]));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{face_edges, Vertex};

    #[test]
    fn extremes_of_the_channel() {
        let l = TorusLevel::new(3).unwrap();
        assert!(sample_bitflip(l, 0.0, 1).is_empty());
        assert_eq!(sample_bitflip(l, 1.0, 1), EdgeSet::full(l));
        assert!(!run_trial(l, 0.0, 9));
    }

    #[test]
    fn mean_weight_is_binomial() {
        let l = TorusLevel::new(5).unwrap();
        let samples = 10_000u64;
        let p = 0.05;
        let total: usize = (0..samples)
            .into_par_iter()
            .map(|s| sample_bitflip(l, p, trial_seed(3, 5, 0, s)).weight())
            .sum();
        let mean = total as f64 / samples as f64;
        let n = l.n() as f64;
        // standard error of the sample mean
        let se = (n * p * (1.0 - p) / samples as f64).sqrt();
        assert!((mean - n * p).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn same_seed_same_sample() {
        let l = TorusLevel::new(4).unwrap();
        assert_eq!(sample_bitflip(l, 0.1, 77), sample_bitflip(l, 0.1, 77));
        assert_ne!(sample_bitflip(l, 0.1, 77), sample_bitflip(l, 0.1, 78));
        assert_ne!(trial_seed(1, 4, 0, 0), trial_seed(1, 4, 1, 0));
        assert_ne!(trial_seed(1, 4, 0, 0), trial_seed(1, 5, 0, 0));
    }

    #[test]
    fn a_face_is_harmless() {
        let l = TorusLevel::new(4).unwrap();
        let face = EdgeSet::from_edges(l, face_edges(l, Vertex::new(3, 9)));
        assert!(!is_wrongly_decoded(&face));
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(100, 100);
        assert!(lo > 0.95 && hi == 1.0);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }

    #[test]
    fn zero_probability_grid_never_fails() {
        let r = run_experiment(&grid(&[4], &[0.0], 100), 1).unwrap();
        assert_eq!(r[0].failures, 0);
        assert_eq!(r[0].rate, 0.0);
    }

    #[test]
    fn half_probability_gives_random_class() {
        let r = run_experiment(&grid(&[4], &[0.5], 1000), 2024).unwrap();
        assert!((r[0].rate - 0.75).abs() <= 0.05, "rate {}", r[0].rate);
    }

    #[test]
    fn p_ranges() {
        assert_eq!(p_range(0.0, 0.0, 1.0).unwrap(), vec![0.0]);
        assert_eq!(
            p_range(0.035, 0.055, 0.005).unwrap(),
            vec![0.035, 0.04, 0.045, 0.05, 0.055]
        );
        assert!(p_range(0.5, 0.1, 0.1).is_err());
        assert!(p_range(0.0, 1.5, 0.1).is_err());
    }

    #[test]
    fn crossing_by_interpolation() {
        let ps = [0.0, 1.0, 2.0];
        // difference goes -1, 0.5, 2: zero at 2/3
        let x = crossing_estimate(&ps, &[1.0, 2.0, 3.0], &[0.0, 2.5, 5.0]).unwrap();
        assert!((x - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(crossing_estimate(&ps, &[1.0, 1.0, 1.0], &[0.0, 0.0, 0.0]), None);
    }
}
