//! The highly-reliable measurement: a ternary decoder for a single GKP qubit.
//!
//! A raw outcome `s_m = n sqrt(pi) + delta_m` is binned to the parity of `n`
//! unless `delta_m` lies within `delta` of a bin edge, in which case the qubit is
//! reported as a located erasure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::WrappedShift;
use crate::SQRT_PI;

const HALF_BIN: f64 = 0.5 * SQRT_PI;

/// Half-width of the danger zone around the bin edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HrmParams {
    delta: f64,
}

impl HrmParams {
    pub fn new(delta: f64) -> Result<Self> {
        if !(0.0..HALF_BIN).contains(&delta) {
            return Err(Error::domain(format!("delta must lie in [0, sqrt(pi)/2), got {delta}")));
        }
        Ok(HrmParams { delta })
    }

    /// Danger zone given as a multiple of `sqrt(pi)`.
    pub fn from_sqrt_pi_multiple(factor: f64) -> Result<Self> {
        Self::new(factor * SQRT_PI)
    }

    /// Plain nearest-multiple binning.
    pub fn conventional() -> Self {
        HrmParams { delta: 0.0 }
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// A raw outcome split into its nearest grid index and the deviation from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyndromeValue {
    pub s_m: f64,
    pub n: i64,
    pub delta_m: f64,
}

/// A binary measurement value in the `+-1` convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HrmOutcome {
    Keep(Sign),
    Discard,
}

/// Ground-truth classification of a known shift, used by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShiftClass {
    Correct,
    Incorrect,
    Discard,
}

impl ShiftClass {
    /// The HRM outcome this class produces when the ideal value is `truth`.
    pub fn outcome(self, truth: Sign) -> HrmOutcome {
        match self {
            ShiftClass::Correct => HrmOutcome::Keep(truth),
            ShiftClass::Incorrect => HrmOutcome::Keep(truth.flip()),
            ShiftClass::Discard => HrmOutcome::Discard,
        }
    }
}

pub fn decompose(s_m: f64) -> Result<SyndromeValue> {
    if !s_m.is_finite() {
        return Err(Error::domain(format!("measurement outcome must be finite, got {s_m}")));
    }
    // f64::round breaks ties away from zero
    let n = (s_m / SQRT_PI).round();
    let delta_m = (s_m - n * SQRT_PI).clamp(-HALF_BIN, HALF_BIN);
    Ok(SyndromeValue { s_m, n: n as i64, delta_m })
}

pub fn classify(s_m: f64, params: HrmParams) -> Result<HrmOutcome> {
    let syn = decompose(s_m)?;
    if HALF_BIN - syn.delta_m.abs() < params.delta {
        return Ok(HrmOutcome::Discard);
    }
    Ok(HrmOutcome::Keep(if syn.n.rem_euclid(2) == 0 { Sign::Plus } else { Sign::Minus }))
}

/// Classifies a known shift: correct inside `sqrt(pi)/2 - delta`, incorrect beyond
/// `sqrt(pi)/2 + delta`, discarded in the closed band between.
#[inline]
pub fn classify_true_shift(u: WrappedShift, params: HrmParams) -> ShiftClass {
    let a = u.abs();
    if a < HALF_BIN - params.delta {
        ShiftClass::Correct
    } else if a > HALF_BIN + params.delta {
        ShiftClass::Incorrect
    } else {
        ShiftClass::Discard
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hrm(d: f64) -> HrmParams {
        HrmParams::new(d).unwrap()
    }

    #[test]
    fn decompose_examples() {
        let s = decompose(0.0).unwrap();
        assert_eq!((s.n, s.delta_m), (0, 0.0));
        let s = decompose(SQRT_PI + 0.1).unwrap();
        assert_eq!(s.n, 1);
        assert!((s.delta_m - 0.1).abs() < 1e-15);
        let s = decompose(SQRT_PI / 2.0).unwrap();
        assert_eq!((s.n, s.delta_m), (1, -SQRT_PI / 2.0));
        let s = decompose(-SQRT_PI / 2.0).unwrap();
        assert_eq!((s.n, s.delta_m), (-1, SQRT_PI / 2.0));
        assert!(decompose(f64::NAN).is_err());
        assert!(decompose(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(0.0, hrm(0.3)).unwrap(), HrmOutcome::Keep(Sign::Plus));
        assert_eq!(classify(SQRT_PI, hrm(0.3)).unwrap(), HrmOutcome::Keep(Sign::Minus));
        assert_eq!(classify(SQRT_PI / 2.0, hrm(0.1)).unwrap(), HrmOutcome::Discard);
        assert_eq!(classify(-3.0 * SQRT_PI, hrm(0.1)).unwrap(), HrmOutcome::Keep(Sign::Minus));
        assert!(classify(f64::INFINITY, hrm(0.1)).is_err());
    }

    #[test]
    fn params_domain() {
        assert!(HrmParams::new(-1e-3).is_err());
        assert!(HrmParams::new(HALF_BIN).is_err());
        assert!(HrmParams::new(f64::NAN).is_err());
        assert_eq!(HrmParams::from_sqrt_pi_multiple(0.223).unwrap().delta(), 0.223 * SQRT_PI);
    }

    #[test]
    fn true_shift_examples() {
        for d in [0.0, 0.2, 0.8] {
            assert_eq!(classify_true_shift(WrappedShift::wrap(0.0), hrm(d)), ShiftClass::Correct);
        }
        assert_eq!(classify_true_shift(WrappedShift::wrap(SQRT_PI - 0.01), hrm(0.1)), ShiftClass::Incorrect);
        assert_eq!(classify_true_shift(WrappedShift::wrap(HALF_BIN), hrm(0.0)), ShiftClass::Discard);
        assert_eq!(classify_true_shift(WrappedShift::wrap(HALF_BIN + 0.1), hrm(0.1)), ShiftClass::Discard);
    }

    #[test]
    fn conventional_binning_flips_at_odd_half_multiples() {
        // oracle: parity of the nearest multiple of sqrt(pi), found by scanning candidates
        let nearest_parity = |s: f64| {
            let mut best = (f64::INFINITY, 0i64);
            for n in -12i64..=12 {
                let d = (s - n as f64 * SQRT_PI).abs();
                if d < best.0 {
                    best = (d, n);
                }
            }
            best.1.rem_euclid(2)
        };
        let steps = 40_001;
        let mut flips = Vec::new();
        let mut prev = None;
        for i in 0..steps {
            let s = -10.0 + 20.0 * i as f64 / (steps - 1) as f64;
            let out = classify(s, HrmParams::conventional()).unwrap();
            let expect = if nearest_parity(s) == 0 { Sign::Plus } else { Sign::Minus };
            assert_eq!(out, HrmOutcome::Keep(expect), "s={s}");
            if let Some(p) = prev {
                if p != out {
                    flips.push(s);
                }
            }
            prev = Some(out);
        }
        let grid = 20.0 / (steps - 1) as f64;
        for f in &flips {
            let k = (f / HALF_BIN).round();
            assert_eq!((k as i64).rem_euclid(2), 1);
            assert!((f - k * HALF_BIN).abs() <= grid + 1e-12);
        }
        assert_eq!(flips.len(), 12);
    }

    proptest! {
        #[test]
        fn decompose_reconstructs(s in -1e4f64..1e4) {
            let syn = decompose(s).unwrap();
            prop_assert!(syn.delta_m.abs() <= HALF_BIN);
            prop_assert!((syn.n as f64 * SQRT_PI + syn.delta_m - s).abs() <= 1e-9);
        }

        #[test]
        fn decompose_is_sign_symmetric(s in -100.0f64..100.0) {
            let a = decompose(s).unwrap();
            let b = decompose(-s).unwrap();
            prop_assert_eq!(a.n, -b.n);
            prop_assert_eq!(a.delta_m, -b.delta_m);
        }

        #[test]
        fn conventional_never_discards(s in -100.0f64..100.0) {
            prop_assume!((s / HALF_BIN).fract() != 0.0);
            prop_assert_ne!(classify(s, HrmParams::conventional()).unwrap(), HrmOutcome::Discard);
        }

        #[test]
        fn classify_is_periodic(s in -20.0f64..20.0, k in -20i64..20, d in 0.0f64..0.85) {
            // stay clear of the classification edges so rounding of s + 2k sqrt(pi) cannot matter
            let syn = decompose(s).unwrap();
            let edge = (HALF_BIN - syn.delta_m.abs() - d).abs();
            prop_assume!(edge > 1e-9);
            let shifted = s + 2.0 * k as f64 * SQRT_PI;
            prop_assert_eq!(classify(s, hrm(d)).unwrap(), classify(shifted, hrm(d)).unwrap());
        }

        #[test]
        fn classify_agrees_with_true_shift(u in -SQRT_PI..SQRT_PI, bit in 0i64..2, d in 0.0f64..0.85) {
            let edge = (HALF_BIN - u.abs()).abs();
            prop_assume!((edge - d).abs() > 1e-9);
            let truth = if bit == 0 { Sign::Plus } else { Sign::Minus };
            let measured = classify(bit as f64 * SQRT_PI + u, hrm(d)).unwrap();
            let expected = classify_true_shift(WrappedShift::wrap(u), hrm(d)).outcome(truth);
            prop_assert_eq!(measured, expected);
        }
    }
}
