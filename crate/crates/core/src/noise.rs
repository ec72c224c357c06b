//! Wrapped Gaussian shifts and exact HRM outcome probabilities.
//!
//! A GKP codeword is `2 sqrt(pi)`-periodic in each quadrature, so an unknown
//! Gaussian displacement `g ~ N(0, sigma^2)` acts on it exactly like its folded
//! image in `[-sqrt(pi), sqrt(pi))`. The density of the folded shift is the image
//! sum `sum_k N(u + 2k sqrt(pi); 0, sigma^2)`, which is a rescaled Jacobi theta
//! function of the third kind.

use libm::{erf, erfc};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SQRT_PI;

const PERIOD: f64 = 2.0 * SQRT_PI;
const HALF_BIN: f64 = 0.5 * SQRT_PI;
/// Image sums stop once a term falls below this fraction of the running total.
const TRUNCATION: f64 = 1e-16;
const MIN_IMAGES: i64 = 5;
const MAX_IMAGES: i64 = 1_000_000;

/// Vacuum quadrature variance with `hbar = 1`.
pub const VACUUM_VARIANCE: f64 = 0.5;

/// Standard deviation of a zero-mean Gaussian shift per quadrature.
///
/// The same scalar is used for the channel strength `xi` and for the finite
/// squeezing width `sigma` of a GKP state; both enter the math identically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    std_dev: f64,
}

impl NoiseParams {
    pub fn new(std_dev: f64) -> Result<Self> {
        if !std_dev.is_finite() || std_dev < 0.0 {
            return Err(Error::domain(format!("std_dev must be finite and >= 0, got {std_dev}")));
        }
        Ok(NoiseParams { std_dev })
    }

    pub fn noiseless() -> Self {
        NoiseParams { std_dev: 0.0 }
    }

    pub fn std_dev(&self) -> f64 {
        self.std_dev
    }

    pub fn variance(&self) -> f64 {
        self.std_dev * self.std_dev
    }

    fn require_positive(&self) -> Result<()> {
        if self.std_dev > 0.0 {
            Ok(())
        } else {
            Err(Error::domain("operation requires std_dev > 0"))
        }
    }
}

/// A shift folded into the canonical window `[-sqrt(pi), sqrt(pi))`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct WrappedShift(f64);

impl WrappedShift {
    /// Folds an arbitrary finite shift into `[-sqrt(pi), sqrt(pi))` by floor division.
    pub fn wrap(x: f64) -> Self {
        let mut w = x - PERIOD * ((x + SQRT_PI) / PERIOD).floor();
        // rounding in the subtraction can land exactly on the open end
        if w >= SQRT_PI {
            w -= PERIOD;
        }
        if w < -SQRT_PI {
            w += PERIOD;
        }
        WrappedShift(w)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn abs(self) -> f64 {
        self.0.abs()
    }
}

/// Probabilities of the three HRM cases for a fixed noise strength and danger zone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeProbabilities {
    pub p_correct: f64,
    pub p_incorrect: f64,
    pub p_discard: f64,
}

impl OutcomeProbabilities {
    /// Builds a triple from explicit values, checking that it is a distribution.
    pub fn new(p_correct: f64, p_incorrect: f64, p_discard: f64) -> Result<Self> {
        let probs = OutcomeProbabilities { p_correct, p_incorrect, p_discard };
        for p in [p_correct, p_incorrect, p_discard] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!("probability {p} outside [0, 1]")));
            }
        }
        if (probs.total() - 1.0).abs() > 1e-9 {
            return Err(Error::domain(format!("probabilities sum to {}, not 1", probs.total())));
        }
        Ok(probs)
    }

    pub fn total(&self) -> f64 {
        self.p_correct + self.p_incorrect + self.p_discard
    }

    /// Probability that the qubit is kept.
    pub fn success(&self) -> f64 {
        1.0 - self.p_discard
    }

    /// Error probability among kept qubits; `None` when everything is discarded.
    pub fn postselected_error(&self) -> Option<f64> {
        let kept = self.success();
        (kept > 0.0).then(|| self.p_incorrect / kept)
    }
}

fn normal_density(x: f64, sigma: f64) -> f64 {
    let z = x / sigma;
    (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

/// `P(lo < X < hi)` for `X ~ N(0, sigma^2)`, evaluated in whichever tail keeps precision.
fn normal_interval(lo: f64, hi: f64, sigma: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let scale = sigma * std::f64::consts::SQRT_2;
    let (a, b) = (lo / scale, hi / scale);
    if a >= 0.0 {
        0.5 * (erfc(a) - erfc(b))
    } else if b <= 0.0 {
        0.5 * (erfc(-b) - erfc(-a))
    } else {
        0.5 * (erf(b) + erf(-a))
    }
}

/// Sums `term(k)` over all integers, walking outward from `k = 0` until both
/// sides are negligible relative to the running total.
fn image_sum(term: impl Fn(i64) -> f64) -> f64 {
    let mut total = term(0);
    let mut k = 1;
    loop {
        let right = term(k);
        let left = term(-k);
        total += right + left;
        if k >= MIN_IMAGES && right.max(left) <= TRUNCATION * total {
            break;
        }
        if k >= MAX_IMAGES {
            break;
        }
        k += 1;
    }
    total
}

fn check_finite(x: f64, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{what} must be finite, got {x}")))
    }
}

/// Density of the wrapped shift at `u`.
///
/// Equals `(1 / 2 sqrt(pi)) theta(-u / 2 sqrt(pi), i sigma^2 / 2)`; evaluated as a
/// truncated image sum of Gaussians.
pub fn wrapped_pdf(u: f64, noise: NoiseParams) -> Result<f64> {
    check_finite(u, "u")?;
    noise.require_positive()?;
    let sigma = noise.std_dev();
    let u = WrappedShift::wrap(u).value();
    Ok(image_sum(|k| normal_density(u + k as f64 * PERIOD, sigma)))
}

/// Draws one Gaussian shift and folds it into the canonical window.
pub fn sample_wrapped_shift<R: Rng + ?Sized>(noise: NoiseParams, rng: &mut R) -> WrappedShift {
    if noise.std_dev() == 0.0 {
        return WrappedShift(0.0);
    }
    let g: f64 = rng.sample(StandardNormal);
    WrappedShift::wrap(noise.std_dev() * g)
}

/// Mass of the wrapped shift in the symmetric band `lo <= |w| <= hi`, for
/// `0 <= lo <= hi <= sqrt(pi)`.
fn wrapped_band_mass(lo: f64, hi: f64, sigma: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if lo == 0.0 {
        return image_sum(|k| {
            let c = k as f64 * PERIOD;
            normal_interval(c - hi, c + hi, sigma)
        });
    }
    // the negative half of image k mirrors the positive half of image -k
    2.0 * image_sum(|k| {
        let c = k as f64 * PERIOD;
        normal_interval(c + lo, c + hi, sigma)
    })
}

/// Exact probabilities that the HRM result is correct, incorrect or discarded.
///
/// `delta` is the half-width of the danger zone around the bin edges `+-sqrt(pi)/2`.
pub fn outcome_probabilities(noise: NoiseParams, delta: f64) -> Result<OutcomeProbabilities> {
    noise.require_positive()?;
    if !(0.0..HALF_BIN).contains(&delta) {
        return Err(Error::domain(format!("delta must lie in [0, sqrt(pi)/2), got {delta}")));
    }
    let sigma = noise.std_dev();
    let inner = HALF_BIN - delta;
    let outer = HALF_BIN + delta;
    Ok(OutcomeProbabilities {
        p_correct: wrapped_band_mass(0.0, inner, sigma),
        p_incorrect: wrapped_band_mass(outer, SQRT_PI, sigma),
        p_discard: wrapped_band_mass(inner, outer, sigma),
    })
}

/// Standard deviation for a GKP squeezing level in dB, `-10 log10(sigma^2 / sigma_vac^2)`.
pub fn squeezing_db_to_std(db: f64) -> Result<NoiseParams> {
    check_finite(db, "squeezing level")?;
    NoiseParams::new((VACUUM_VARIANCE * 10f64.powf(-db / 10.0)).sqrt())
}

pub fn std_to_squeezing_db(noise: NoiseParams) -> Result<f64> {
    noise.require_positive()?;
    Ok(-10.0 * (noise.variance() / VACUUM_VARIANCE).log10())
}
