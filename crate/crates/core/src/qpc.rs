//! Logical measurement decoding for the (n, m) quantum parity code.
//!
//! The code has `n` blocks of `m` qubits. Each physical qubit yields an HRM
//! outcome in `{+1, -1, E}`; the decoders below turn a full grid into a logical
//! value or a heralded failure. Both run in a single pass over the grid.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hrm::{HrmOutcome, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QpcShape {
    /// Number of blocks.
    pub n: usize,
    /// Qubits per block.
    pub m: usize,
}

impl QpcShape {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::invalid(format!("shape must have n >= 1 and m >= 1, got {n}x{m}")));
        }
        Ok(QpcShape { n, m })
    }

    pub fn qubits(&self) -> usize {
        self.n * self.m
    }
}

impl fmt::Display for QpcShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n, self.m)
    }
}

impl FromStr for QpcShape {
    type Err = Error;

    /// Parses `"NxM"`, e.g. `"5x4"`.
    fn from_str(s: &str) -> Result<Self> {
        let (n, m) = s
            .trim()
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::invalid(format!("shape {s:?} is not of the form NxM")))?;
        let parse = |t: &str| {
            t.trim().parse::<usize>().map_err(|_| Error::invalid(format!("shape {s:?} is not of the form NxM")))
        };
        QpcShape::new(parse(n)?, parse(m)?)
    }
}

/// Row-major `n x m` grid of HRM outcomes; row `i` is block `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeGrid {
    shape: QpcShape,
    cells: Vec<HrmOutcome>,
}

impl OutcomeGrid {
    pub fn new(shape: QpcShape, cells: Vec<HrmOutcome>) -> Result<Self> {
        if cells.len() != shape.qubits() {
            return Err(Error::invalid(format!(
                "grid for shape {shape} needs {} cells, got {}",
                shape.qubits(),
                cells.len()
            )));
        }
        Ok(OutcomeGrid { shape, cells })
    }

    pub fn from_rows(rows: &[Vec<HrmOutcome>]) -> Result<Self> {
        let m = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::invalid("grid rows have different lengths"));
        }
        let shape = QpcShape::new(rows.len(), m)?;
        OutcomeGrid::new(shape, rows.concat())
    }

    /// A grid with every qubit showing `outcome`.
    pub fn filled(shape: QpcShape, outcome: HrmOutcome) -> Self {
        OutcomeGrid { shape, cells: vec![outcome; shape.qubits()] }
    }

    pub fn shape(&self) -> QpcShape {
        self.shape
    }

    pub fn cells(&self) -> &[HrmOutcome] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [HrmOutcome] {
        &mut self.cells
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[HrmOutcome]> {
        self.cells.chunks_exact(self.shape.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalResult {
    Value(Sign),
    HeraldedFailure,
}

fn strict_majority(plus: usize, minus: usize) -> Option<Sign> {
    match plus.cmp(&minus) {
        std::cmp::Ordering::Greater => Some(Sign::Plus),
        std::cmp::Ordering::Less => Some(Sign::Minus),
        std::cmp::Ordering::Equal => None,
    }
}

/// Logical X: drop blocks with any erasure, take each survivor's parity, then vote.
pub fn decode_x(grid: &OutcomeGrid) -> LogicalResult {
    let (mut plus, mut minus) = (0usize, 0usize);
    'blocks: for block in grid.blocks() {
        let mut parity = Sign::Plus;
        for cell in block {
            match cell {
                HrmOutcome::Keep(s) => parity = parity.times(*s),
                HrmOutcome::Discard => continue 'blocks,
            }
        }
        match parity {
            Sign::Plus => plus += 1,
            Sign::Minus => minus += 1,
        }
    }
    match strict_majority(plus, minus) {
        Some(s) => LogicalResult::Value(s),
        None => LogicalResult::HeraldedFailure,
    }
}

/// Logical Z: majority vote inside each block over kept qubits, then the product of
/// the block votes. Any block without a strict majority heralds failure.
pub fn decode_z(grid: &OutcomeGrid) -> LogicalResult {
    let mut product = Sign::Plus;
    for block in grid.blocks() {
        let (mut plus, mut minus) = (0usize, 0usize);
        for cell in block {
            match cell {
                HrmOutcome::Keep(Sign::Plus) => plus += 1,
                HrmOutcome::Keep(Sign::Minus) => minus += 1,
                HrmOutcome::Discard => {}
            }
        }
        match strict_majority(plus, minus) {
            Some(s) => product = product.times(s),
            None => return LogicalResult::HeraldedFailure,
        }
    }
    LogicalResult::Value(product)
}

/// Heralded failures count as logical errors.
pub fn logical_error_indicator(result: LogicalResult, true_value: Sign) -> bool {
    result != LogicalResult::Value(true_value)
}
