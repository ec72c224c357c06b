//! GKP qubits decoded with a highly-reliable measurement (HRM) and concatenated
//! with the (n, m) quantum parity code (QPC).
//!
//! The crate is organised bottom-up:
//!
//! * [`noise`] – the wrapped Gaussian shift distribution and the exact HRM
//!   outcome probabilities,
//! * [`hrm`] – the ternary `{+1, -1, E}` measurement map,
//! * [`qpc`] – logical X/Z decoding of an `n x m` outcome grid with heralded failure,
//! * [`oracle`] – exact logical failure rates for small codes by enumeration,
//! * [`experiment`] – the code-capacity Monte Carlo engine, sweeps, crossover
//!   threshold search and danger-zone optimisation,
//! * [`rng`] and [`stats`] – counter-based random streams and interval estimates.

pub mod error;
pub mod experiment;
pub mod hrm;
pub mod noise;
pub mod oracle;
pub mod qpc;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use hrm::{classify, classify_true_shift, decompose, HrmOutcome, HrmParams, ShiftClass, Sign, SyndromeValue};
pub use noise::{
    outcome_probabilities, sample_wrapped_shift, squeezing_db_to_std, std_to_squeezing_db, wrapped_pdf, NoiseParams,
    OutcomeProbabilities, WrappedShift,
};
pub use oracle::{exact_failure, ExactFailure};
pub use qpc::{decode_x, decode_z, logical_error_indicator, LogicalResult, OutcomeGrid, QpcShape};

/// Grid spacing of the square-lattice GKP code, `sqrt(pi)`.
pub const SQRT_PI: f64 = 1.772_453_850_905_515_9;

/// Zero-rate hashing bound of the additive Gaussian noise channel, `1/sqrt(e)`.
pub const HASHING_BOUND: f64 = 0.606_530_659_712_633_4;
