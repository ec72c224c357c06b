//! Exact logical failure rates for small codes.
//!
//! Each qubit independently ends up correct, flipped or discarded with the
//! probabilities of [`OutcomeProbabilities`]. Summing the weight of every outcome
//! grid on which a decoder errs gives `E_X` and `E_Z` exactly. Two routes are
//! provided: a literal walk over all `3^(nm)` grids, and a collapsed walk over
//! per-block count triples that relies on the decoders being invariant under
//! permutations inside and across blocks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hrm::{HrmOutcome, ShiftClass, Sign};
use crate::noise::OutcomeProbabilities;
use crate::qpc::{decode_x, decode_z, logical_error_indicator, OutcomeGrid, QpcShape};

/// Largest code (in qubits) the oracle accepts.
pub const MAX_QUBITS: usize = 16;
/// Above this size the count-triple route is used.
pub const NAIVE_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactFailure {
    pub e_x: f64,
    pub e_z: f64,
    pub p_e: f64,
}

impl ExactFailure {
    fn from_parts(e_x: f64, e_z: f64) -> Self {
        ExactFailure { e_x, e_z, p_e: 1.0 - (1.0 - e_x) * (1.0 - e_z) }
    }
}

const CLASSES: [ShiftClass; 3] = [ShiftClass::Correct, ShiftClass::Incorrect, ShiftClass::Discard];

fn weight(class: ShiftClass, probs: &OutcomeProbabilities) -> f64 {
    match class {
        ShiftClass::Correct => probs.p_correct,
        ShiftClass::Incorrect => probs.p_incorrect,
        ShiftClass::Discard => probs.p_discard,
    }
}

fn check_budget(shape: QpcShape) -> Result<()> {
    if shape.qubits() > MAX_QUBITS {
        return Err(Error::Size { what: "oracle code size n*m", actual: shape.qubits(), limit: MAX_QUBITS });
    }
    Ok(())
}

pub fn exact_failure(shape: QpcShape, probs: OutcomeProbabilities) -> Result<ExactFailure> {
    check_budget(shape)?;
    if shape.qubits() > NAIVE_LIMIT {
        exact_failure_by_blocks(shape, probs)
    } else {
        exact_failure_naive(shape, probs)
    }
}

/// Walks every one of the `3^(nm)` ternary grids.
pub fn exact_failure_naive(shape: QpcShape, probs: OutcomeProbabilities) -> Result<ExactFailure> {
    check_budget(shape)?;
    let q = shape.qubits();
    let mut digits = vec![0usize; q];
    let mut grid = OutcomeGrid::filled(shape, HrmOutcome::Keep(Sign::Plus));
    let (mut e_x, mut e_z) = (Compensated::default(), Compensated::default());
    loop {
        let mut w = 1.0;
        for (cell, &d) in grid.cells_mut().iter_mut().zip(&digits) {
            *cell = CLASSES[d].outcome(Sign::Plus);
            w *= weight(CLASSES[d], &probs);
        }
        if w > 0.0 {
            if logical_error_indicator(decode_x(&grid), Sign::Plus) {
                e_x.add(w);
            }
            if logical_error_indicator(decode_z(&grid), Sign::Plus) {
                e_z.add(w);
            }
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == q {
                return Ok(ExactFailure::from_parts(e_x.value(), e_z.value()));
            }
            digits[i] += 1;
            if digits[i] < 3 {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Neumaier summation; the naive walk adds up to `3^16` terms.
#[derive(Debug, Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.carry
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// One block summarised by how many of its qubits were correct, flipped or discarded.
#[derive(Debug, Clone, Copy)]
struct BlockCounts {
    correct: usize,
    incorrect: usize,
    discard: usize,
    weight: f64,
}

fn block_types(m: usize, probs: &OutcomeProbabilities) -> Vec<BlockCounts> {
    let mut out = Vec::new();
    for correct in 0..=m {
        for incorrect in 0..=(m - correct) {
            let discard = m - correct - incorrect;
            let ways = factorial(m) / (factorial(correct) * factorial(incorrect) * factorial(discard));
            let weight = ways
                * probs.p_correct.powi(correct as i32)
                * probs.p_incorrect.powi(incorrect as i32)
                * probs.p_discard.powi(discard as i32);
            out.push(BlockCounts { correct, incorrect, discard, weight });
        }
    }
    out
}

/// Enumerates multisets of block types; each multiset stands for all grids that are
/// permutations of its representative.
pub fn exact_failure_by_blocks(shape: QpcShape, probs: OutcomeProbabilities) -> Result<ExactFailure> {
    check_budget(shape)?;
    let types = block_types(shape.m, &probs);
    let mut chosen: Vec<usize> = Vec::with_capacity(shape.n);
    let mut acc = (0.0, 0.0);
    let mut grid = OutcomeGrid::filled(shape, HrmOutcome::Keep(Sign::Plus));
    visit_multisets(&types, shape, 0, &mut chosen, &mut grid, &mut acc);
    Ok(ExactFailure::from_parts(acc.0, acc.1))
}

fn visit_multisets(
    types: &[BlockCounts],
    shape: QpcShape,
    start: usize,
    chosen: &mut Vec<usize>,
    grid: &mut OutcomeGrid,
    acc: &mut (f64, f64),
) {
    if chosen.len() == shape.n {
        // multinomial over repeated block types
        let mut coeff = factorial(shape.n);
        let mut run = 1;
        for i in 1..=chosen.len() {
            if i < chosen.len() && chosen[i] == chosen[i - 1] {
                run += 1;
            } else {
                coeff /= factorial(run);
                run = 1;
            }
        }
        let w = coeff * chosen.iter().map(|&t| types[t].weight).product::<f64>();
        if w == 0.0 {
            return;
        }
        for (block, &t) in grid.cells_mut().chunks_exact_mut(shape.m).zip(chosen.iter()) {
            let c = types[t];
            let fills = std::iter::repeat_n(ShiftClass::Correct, c.correct)
                .chain(std::iter::repeat_n(ShiftClass::Incorrect, c.incorrect))
                .chain(std::iter::repeat_n(ShiftClass::Discard, c.discard));
            for (cell, class) in block.iter_mut().zip(fills) {
                *cell = class.outcome(Sign::Plus);
            }
        }
        if logical_error_indicator(decode_x(grid), Sign::Plus) {
            acc.0 += w;
        }
        if logical_error_indicator(decode_z(grid), Sign::Plus) {
            acc.1 += w;
        }
        return;
    }
    for t in start..types.len() {
        chosen.push(t);
        visit_multisets(types, shape, t, chosen, grid, acc);
        chosen.pop();
    }
}
