//! Numerical and brute-force cross-checks of the symbolic verdicts.
//!
//! Sampling looks at one realization at a time, so an audit can expose an
//! inconsistency but never prove a strong structural property. Every
//! outcome here is a consistency check.

use nalgebra::DMatrix;
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::is_full_row_rank;
use crate::network::StructuredNetwork;
use crate::pattern::{sample_with, PatternMatrix, Symbol};

pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditConfig {
    pub trials: usize,
    pub seed: u64,
    /// Singular values at or below `rank_tolerance * sigma_max` count as zero.
    pub rank_tolerance: f64,
}

impl AuditConfig {
    pub fn new(trials: usize, seed: u64, rank_tolerance: f64) -> Result<Self> {
        let cfg = Self {
            trials,
            seed,
            rank_tolerance,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if !(self.rank_tolerance > 0.0 && self.rank_tolerance < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "rank tolerance must lie in (0, 1), got {}",
                self.rank_tolerance
            )));
        }
        Ok(())
    }

    /// Independent generator for one trial; the stream is the trial index.
    fn trial_rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 0,
            rank_tolerance: DEFAULT_RANK_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditFailure {
    pub trial: usize,
    pub seed: u64,
    pub stream: u64,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditOutcome {
    pub kind: &'static str,
    pub trials_run: usize,
    pub failures: usize,
    pub first_failure: Option<AuditFailure>,
    /// What the coloring test says about the same pattern(s).
    pub symbolic_verdict: bool,
    /// False only when the symbolic verdict is positive and some sampled
    /// realization failed the numeric test.
    pub consistent: bool,
}

/// Numeric rank via singular values, relative to the largest one.
pub fn numeric_rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * max).count()
}

/// `[B, AB, ..., A^(n-1) B]`, each column scaled to unit length (zero
/// columns stay zero). Scaling a column does not change the span, and the
/// scaled block is what gets multiplied by `A` next.
pub fn controllability_matrix(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let q = b.ncols();
    let mut k = DMatrix::zeros(n, n * q);
    let mut block = b.clone();
    for power in 0..n {
        for mut col in block.column_iter_mut() {
            let norm = col.norm();
            if norm > 0.0 {
                col /= norm;
            }
        }
        k.columns_mut(power * q, q).copy_from(&block);
        block = a * &block;
    }
    k
}

pub fn controllability_rank(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> usize {
    numeric_rank(&controllability_matrix(a, b), tol)
}

/// Kalman rank test for `x' = Ax + Bu`.
pub fn kalman_controllable(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    assert_eq!(a.nrows(), a.ncols(), "A must be square");
    assert_eq!(a.nrows(), b.nrows(), "B must have as many rows as A");
    a.nrows() == 0 || controllability_rank(a, b, tol) == a.nrows()
}

fn block_diag_numeric(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let rows = blocks.iter().map(DMatrix::nrows).sum();
    let cols = blocks.iter().map(DMatrix::ncols).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        out.view_mut((r0, c0), b.shape()).copy_from(b);
        r0 += b.nrows();
        c0 += b.ncols();
    }
    out
}

/// One sampled closed loop `(A + BWC, BH)` of a network.
pub fn sample_network<R: Rng + ?Sized>(
    network: &StructuredNetwork,
    rng: &mut R,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut a = Vec::with_capacity(network.nodes.len());
    let mut b = Vec::with_capacity(network.nodes.len());
    let mut c = Vec::with_capacity(network.nodes.len());
    for node in &network.nodes {
        a.push(sample_with(&node.a, rng).values);
        b.push(sample_with(&node.b, rng).values);
        c.push(sample_with(&node.c, rng).values);
    }
    let w = sample_with(&network.w, rng).values;
    let h = sample_with(&network.h, rng).values;
    let (a, b, c) = (
        block_diag_numeric(&a),
        block_diag_numeric(&b),
        block_diag_numeric(&c),
    );
    (&a + &b * &w * &c, &b * &h)
}

fn run_trials(
    cfg: &AuditConfig,
    trial: impl Fn(&mut ChaCha8Rng) -> Option<String> + Sync,
) -> (usize, Option<AuditFailure>) {
    let failed: Vec<(usize, String)> = (0..cfg.trials)
        .into_par_iter()
        .filter_map(|t| trial(&mut cfg.trial_rng(t)).map(|s| (t, s)))
        .collect();
    let first = failed.first().map(|(t, summary)| AuditFailure {
        trial: *t,
        seed: cfg.seed,
        stream: *t as u64,
        summary: summary.clone(),
    });
    (failed.len(), first)
}

/// Samples realizations of the network and runs the Kalman test on each.
pub fn audit_network(network: &StructuredNetwork, cfg: &AuditConfig) -> Result<AuditOutcome> {
    cfg.check()?;
    let symbolic = network.is_controllable()?.controllable;
    let n = network.total_states();
    let (failures, first_failure) = run_trials(cfg, |rng| {
        let (a, b) = sample_network(network, rng);
        let rank = if n == 0 {
            0
        } else {
            controllability_rank(&a, &b, cfg.rank_tolerance)
        };
        (rank < n).then(|| format!("controllability matrix rank {rank} < {n}"))
    });
    Ok(AuditOutcome {
        kind: "network controllability (sampled consistency check)",
        trials_run: cfg.trials,
        failures,
        first_failure,
        symbolic_verdict: symbolic,
        consistent: !symbolic || failures == 0,
    })
}

/// Samples realizations of `m` and checks numeric full row rank.
pub fn audit_rank(m: &PatternMatrix, cfg: &AuditConfig) -> Result<AuditOutcome> {
    cfg.check()?;
    let symbolic = is_full_row_rank(m)?.colorable;
    let p = m.rows();
    let (failures, first_failure) = run_trials(cfg, |rng| {
        let rank = numeric_rank(&sample_with(m, rng).values, cfg.rank_tolerance);
        (rank < p).then(|| format!("numeric rank {rank} < {p}"))
    });
    Ok(AuditOutcome {
        kind: "full row rank (sampled consistency check)",
        trials_run: cfg.trials,
        failures,
        first_failure,
        symbolic_verdict: symbolic,
        consistent: !symbolic || failures == 0,
    })
}

/// True unless both `m` and `m + I` certify full row rank. `m` must be square.
pub fn at_most_one_full_rank(m: &PatternMatrix) -> Result<bool> {
    let shifted = m.add(&PatternMatrix::identity(m.rows()))?;
    Ok(!(is_full_row_rank(m)?.colorable && is_full_row_rank(&shifted)?.colorable))
}

/// Every square pattern of size `p` with `p` in `{1, 2}`, in lexicographic
/// symbol order.
pub fn all_square_patterns(p: usize) -> Result<Vec<PatternMatrix>> {
    if !(1..=2).contains(&p) {
        return Err(Error::InvalidConfig(format!(
            "exhaustive sweep supports p in 1..=2, got {p}"
        )));
    }
    Ok(all_patterns(p, p))
}

/// All `3^(rows*cols)` patterns of a shape. Only sensible for tiny shapes.
pub fn all_patterns(rows: usize, cols: usize) -> Vec<PatternMatrix> {
    let cells = rows * cols;
    let total = 3usize.pow(cells as u32);
    (0..total)
        .map(|mut code| {
            let mut m = PatternMatrix::zeros(rows, cols);
            for k in 0..cells {
                m.set(k / cols, k % cols, Symbol::ALL[code % 3]);
                code /= 3;
            }
            m
        })
        .collect()
}

/// Checks that `M` and `M + I` never both have full row rank over every
/// `p x p` pattern.
pub fn lemma2_exhaustive(p: usize) -> Result<bool> {
    for m in all_square_patterns(p)? {
        if !at_most_one_full_rank(&m)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepOutcome {
    pub checked: usize,
    pub counterexample: Option<PatternMatrix>,
}

/// Randomized extension of [`lemma2_exhaustive`] to larger sizes.
pub fn lemma2_random(p: usize, samples: usize, seed: u64) -> Result<SweepOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for checked in 0..samples {
        let m = random_pattern(p, p, [0.5, 0.3, 0.2], &mut rng);
        if !at_most_one_full_rank(&m)? {
            return Ok(SweepOutcome {
                checked: checked + 1,
                counterexample: Some(m),
            });
        }
    }
    Ok(SweepOutcome {
        checked: samples,
        counterexample: None,
    })
}

/// Random pattern with symbol weights `[zero, star, any]`.
pub fn random_pattern<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    weights: [f64; 3],
    rng: &mut R,
) -> PatternMatrix {
    let dist = WeightedIndex::new(weights).expect("weights must be non-negative, not all zero");
    let mut m = PatternMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m.set(i, j, Symbol::ALL[dist.sample(rng)]);
        }
    }
    m
}
