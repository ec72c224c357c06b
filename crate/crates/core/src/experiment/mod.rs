//! Code-capacity Monte Carlo for GKP + HRM + QPC.
//!
//! Each trial draws, for every physical qubit, one wrapped shift `u` (q quadrature,
//! feeding the Z-basis grid) and one independent wrapped shift `v` (p quadrature,
//! feeding the X-basis grid). The logical input is `+1` in both bases. Shifts are
//! classified with [`classify_true_shift`] and the two grids are decoded.
//!
//! All randomness is addressed through [`StreamKey`], so estimates are identical
//! whatever the number of rayon workers.

mod threshold;

pub use threshold::{
    balance_shapes, find_threshold, optimize_delta, Crossover, DeltaOptimization, DeltaPoint, LadderSpec,
    ThresholdReport, ThresholdSearch,
};

use std::ops::{Add, Range};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hrm::{classify_true_shift, HrmParams, Sign};
use crate::noise::{sample_wrapped_shift, NoiseParams};
use crate::qpc::{decode_x, decode_z, logical_error_indicator, OutcomeGrid, QpcShape};
use crate::rng::StreamKey;
use crate::stats::{proportion, Interval};

/// Trials are always split into at most this many contiguous batches.
pub const MAX_BATCHES: u64 = 64;

const QUAD_Q: u64 = 0;
const QUAD_P: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub shape: QpcShape,
    /// Channel strength `xi`.
    pub noise: NoiseParams,
    pub hrm: HrmParams,
    pub trials: u64,
    pub seed: u64,
}

impl TrialConfig {
    pub fn new(shape: QpcShape, noise: NoiseParams, hrm: HrmParams, trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::invalid("trials must be >= 1"));
        }
        Ok(TrialConfig { shape, noise, hrm, trials, seed })
    }

    fn point_key(&self) -> StreamKey {
        StreamKey::root(self.seed)
            .child(self.shape.n as u64)
            .child(self.shape.m as u64)
            .child_f64(self.noise.std_dev())
            .child_f64(self.hrm.delta())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub x_error: bool,
    pub z_error: bool,
    pub discards: u32,
}

/// Reusable per-worker state for running trials of one configuration.
struct TrialRunner {
    config: TrialConfig,
    key: StreamKey,
    x_grid: OutcomeGrid,
    z_grid: OutcomeGrid,
}

impl TrialRunner {
    fn new(config: TrialConfig) -> Self {
        let blank = OutcomeGrid::filled(config.shape, crate::hrm::HrmOutcome::Keep(Sign::Plus));
        TrialRunner { key: config.point_key(), x_grid: blank.clone(), z_grid: blank, config }
    }

    fn run(&mut self, trial_index: u64) -> TrialOutcome {
        let trial_key = self.key.child(trial_index);
        let mut discards = 0u32;
        let noise = self.config.noise;
        let hrm = self.config.hrm;
        for (qubit, (zc, xc)) in self.z_grid.cells_mut().iter_mut().zip(self.x_grid.cells_mut().iter_mut()).enumerate()
        {
            let base = 2 * qubit as u64;
            let u = sample_wrapped_shift(noise, &mut trial_key.child(base + QUAD_Q).rng());
            let v = sample_wrapped_shift(noise, &mut trial_key.child(base + QUAD_P).rng());
            let (cu, cv) = (classify_true_shift(u, hrm), classify_true_shift(v, hrm));
            discards +=
                u32::from(cu == crate::hrm::ShiftClass::Discard) + u32::from(cv == crate::hrm::ShiftClass::Discard);
            *zc = cu.outcome(Sign::Plus);
            *xc = cv.outcome(Sign::Plus);
        }
        TrialOutcome {
            x_error: logical_error_indicator(decode_x(&self.x_grid), Sign::Plus),
            z_error: logical_error_indicator(decode_z(&self.z_grid), Sign::Plus),
            discards,
        }
    }

    fn run_range(&mut self, range: Range<u64>) -> FailureCounts {
        let mut counts = FailureCounts::default();
        for i in range {
            counts.record(self.run(i));
        }
        counts
    }
}

/// Runs one trial. The result depends only on `config` and `trial_index`.
pub fn run_trial(config: &TrialConfig, trial_index: u64) -> TrialOutcome {
    TrialRunner::new(*config).run(trial_index)
}

/// Raw tallies; addition is the reducer for parallel aggregation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureCounts {
    pub trials: u64,
    pub x_errors: u64,
    pub z_errors: u64,
    pub discards: u64,
}

impl FailureCounts {
    pub fn record(&mut self, t: TrialOutcome) {
        self.trials += 1;
        self.x_errors += u64::from(t.x_error);
        self.z_errors += u64::from(t.z_error);
        self.discards += u64::from(t.discards);
    }

    /// `p_e` with half-count smoothing, strictly inside `(0, 1)`; used for log ratios.
    pub fn smoothed_p_e(&self) -> f64 {
        let n = self.trials as f64 + 1.0;
        let ex = (self.x_errors as f64 + 0.5) / n;
        let ez = (self.z_errors as f64 + 0.5) / n;
        1.0 - (1.0 - ex) * (1.0 - ez)
    }
}

impl Add for FailureCounts {
    type Output = FailureCounts;

    fn add(self, o: FailureCounts) -> FailureCounts {
        FailureCounts {
            trials: self.trials + o.trials,
            x_errors: self.x_errors + o.x_errors,
            z_errors: self.z_errors + o.z_errors,
            discards: self.discards + o.discards,
        }
    }
}

impl std::iter::Sum for FailureCounts {
    fn sum<I: Iterator<Item = FailureCounts>>(iter: I) -> Self {
        iter.fold(FailureCounts::default(), Add::add)
    }
}

/// Contiguous, schedule-independent partition of `0..trials`.
pub fn batch_ranges(trials: u64) -> Vec<Range<u64>> {
    let b = trials.clamp(1, MAX_BATCHES);
    (0..b).map(|i| (i * trials / b)..((i + 1) * trials / b)).collect()
}

/// Per-batch tallies for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchedCounts {
    pub batches: Vec<FailureCounts>,
}

impl BatchedCounts {
    pub fn total(&self) -> FailureCounts {
        self.batches.iter().copied().sum()
    }
}

pub fn run_batched(config: &TrialConfig) -> BatchedCounts {
    let batches =
        batch_ranges(config.trials).into_par_iter().map(|range| TrialRunner::new(*config).run_range(range)).collect();
    BatchedCounts { batches }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FailureEstimate {
    pub shape: QpcShape,
    pub xi: f64,
    pub delta: f64,
    pub trials: u64,
    pub e_x: Interval,
    pub e_z: Interval,
    /// Point value `1 - (1 - e_x)(1 - e_z)`; bounds map the component Wilson bounds.
    pub p_e: Interval,
    /// Fraction of the `2nm` measured modes that were discarded.
    pub discard_rate: f64,
    pub counts: FailureCounts,
}

fn combine(a: f64, b: f64) -> f64 {
    1.0 - (1.0 - a) * (1.0 - b)
}

impl FailureEstimate {
    pub fn from_counts(config: &TrialConfig, counts: FailureCounts) -> Self {
        let e_x = proportion(counts.x_errors, counts.trials);
        let e_z = proportion(counts.z_errors, counts.trials);
        let p_e =
            Interval { value: combine(e_x.value, e_z.value), lo: combine(e_x.lo, e_z.lo), hi: combine(e_x.hi, e_z.hi) };
        let modes = 2 * config.shape.qubits() as u64 * counts.trials;
        FailureEstimate {
            shape: config.shape,
            xi: config.noise.std_dev(),
            delta: config.hrm.delta(),
            trials: counts.trials,
            e_x,
            e_z,
            p_e,
            discard_rate: if modes == 0 { 0.0 } else { counts.discards as f64 / modes as f64 },
            counts,
        }
    }
}

pub fn estimate_failure(config: &TrialConfig) -> FailureEstimate {
    FailureEstimate::from_counts(config, run_batched(config).total())
}

/// Evaluates every `(shape, xi)` pair, shape-major.
pub fn sweep(
    shapes: &[QpcShape],
    xi_grid: &[f64],
    hrm: HrmParams,
    trials: u64,
    seed: u64,
) -> Result<Vec<FailureEstimate>> {
    if shapes.is_empty() || xi_grid.is_empty() {
        return Err(Error::invalid("sweep needs at least one shape and one xi value"));
    }
    let mut rows = Vec::with_capacity(shapes.len() * xi_grid.len());
    for &shape in shapes {
        for &xi in xi_grid {
            let config = TrialConfig::new(shape, NoiseParams::new(xi)?, hrm, trials, seed)?;
            rows.push(estimate_failure(&config));
        }
    }
    Ok(rows)
}
