//! The efficient-learner baseline.
//!
//! An agent that already holds the representational building blocks for
//! the goal sees per-bit feedback instead of block-level fitness: one
//! oracle probe per position resolves that bit, so the whole target is
//! learned in exactly `C` probes at cost `kappa * C`. The evolutionary
//! searcher on the same landscape only sees staircase fitness, which is
//! what the slowdown ratio measures.

use num_rational::BigRational;

use crate::cost_model::{CostParams, CostValue};
use crate::error::{Error, Result};
use crate::evolution::TrialSummary;
use crate::landscape::{bitwise_match, eval_cost, AgentCode, BlockStaircaseLandscape};

/// Outcome of one efficient-learner pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfficientResult {
    pub learned_code: AgentCode,
    pub total_cost: CostValue,
    pub probes: u64,
}

/// Resolve every target bit with one unit-cost probe each.
///
/// Deterministic: always `C` probes, total cost exactly `kappa * C`, and
/// the learned code equals the landscape target.
pub fn run_efficient(landscape: &BlockStaircaseLandscape, params: &CostParams) -> EfficientResult {
    let size = landscape.critical_size();
    let bits = (0..size)
        .map(|position| bitwise_match(landscape, position, true).expect("position is in range"))
        .collect();
    EfficientResult {
        learned_code: AgentCode::from_bits(bits),
        total_cost: eval_cost(size, params),
        probes: size,
    }
}

/// Exact ratio of the simulated evolution median to the efficient
/// learner's cost. Both results must come from the same configuration.
pub fn empirical_slowdown(
    summary: &TrialSummary,
    efficient: &EfficientResult,
) -> Result<BigRational> {
    if efficient.probes != summary.critical_size {
        return Err(Error::ParameterMismatch(format!(
            "efficient learner ran against C={} but the summary is for C={}",
            efficient.probes, summary.critical_size
        )));
    }
    let expected_cost =
        &summary.kappa * BigRational::from_integer(num_bigint::BigInt::from(efficient.probes));
    if efficient.total_cost.magnitude() != &expected_cost
        || efficient.total_cost.unit() != summary.unit
    {
        return Err(Error::ParameterMismatch(
            "efficient learner cost does not match the summary's kappa and unit".into(),
        ));
    }
    summary.median.ratio_to(&efficient.total_cost)
}
