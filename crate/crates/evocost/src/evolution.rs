//! Monte Carlo engine for steepest-ascent hill climbing on a
//! block-staircase landscape, with per-evaluation cost accounting.
//!
//! Each generation `i` enumerates the `2^R` candidate values for the next
//! block in a uniformly random order and charges `kappa * R * i` per
//! evaluation. Under [`AccountingMode::Exhaustive`] every non-final
//! generation evaluates all `2^R` candidates before keeping the unique
//! improving one, and the final generation stops at discovery; under
//! [`AccountingMode::FirstImprovement`] every generation stops at
//! discovery. Both modes draw the candidate order from the seed in the
//! same way, so runs with equal seeds share evaluation order and
//! first-improvement cost never exceeds exhaustive cost, pathwise.
//!
//! `run_single` is a pure function of its arguments; `run_trials` fixes
//! every per-trial seed up front and aggregates in a way that does not
//! depend on execution order.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cost_model::{evol_cost_closed_form, CostParams, CostValue, ScenarioParams};
use crate::error::{Error, Result};
use crate::landscape::{
    block_fitness, needle_fitness, AgentCode, BlockStaircaseLandscape, NeedleLandscape,
};
use crate::seed::{rng_from_seed, trial_seed};

/// Enumeration bound for one generation: `2^R` candidates.
pub const MAX_SIMULATION_RADIUS: u64 = 24;

/// Trial counts below this are flagged low-confidence in comparisons.
pub const LOW_CONFIDENCE_TRIALS: u64 = 30;

/// How candidate evaluations are counted within a generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum AccountingMode {
    /// Evaluate all `2^R` candidates in every non-final generation; stop
    /// at discovery only in the final one.
    #[serde(rename = "paper")]
    #[value(name = "paper")]
    Exhaustive,
    /// Stop every generation at the first improving candidate.
    #[serde(rename = "first")]
    #[value(name = "first")]
    FirstImprovement,
}

impl std::fmt::Display for AccountingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AccountingMode::Exhaustive => "paper",
            AccountingMode::FirstImprovement => "first",
        })
    }
}

impl std::str::FromStr for AccountingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(AccountingMode::Exhaustive),
            "first" => Ok(AccountingMode::FirstImprovement),
            other => Err(Error::Parse(format!(
                "unknown accounting mode `{other}` (expected `paper` or `first`)"
            ))),
        }
    }
}

/// Evaluations and cost accrued in one generation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationRecord {
    /// 1-based generation index.
    pub index: u64,
    pub evaluations: u64,
    pub cost: CostValue,
}

/// Full record of one evolution run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvolutionTrace {
    pub records: Vec<GenerationRecord>,
    pub total_cost: CostValue,
    pub final_code: AgentCode,
    pub mode: AccountingMode,
    pub seed: u64,
}

impl EvolutionTrace {
    pub fn generations(&self) -> u64 {
        self.records.len() as u64
    }

    /// One `i evals cost` line per generation.
    pub fn dump(&self, out: &mut dyn std::io::Write) -> std::io::Result<()> {
        for record in &self.records {
            writeln!(
                out,
                "{} {} {}",
                record.index,
                record.evaluations,
                record.cost.magnitude()
            )?;
        }
        Ok(())
    }
}

/// Order statistics over the total costs of repeated runs.
///
/// Median is the middle order statistic for odd counts and the mean of
/// the two middle ones for even counts; quartiles are medians of the
/// lower and upper halves, excluding the middle element when the count
/// is odd.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub n_trials: u64,
    pub median: CostValue,
    pub lower_quartile: CostValue,
    pub upper_quartile: CostValue,
    pub min: CostValue,
    pub max: CostValue,
    pub master_seed: u64,
    pub critical_size: u64,
    pub radius: u64,
    #[serde(with = "crate::rational::serde_rational")]
    pub kappa: BigRational,
    pub unit: String,
    pub mode: AccountingMode,
}

/// Simulated median against the closed-form prediction.
///
/// The predicted median is `closed_form + kappa * C / 2`: the closed form
/// counts half the final generation's full `2^R` evaluations, while the
/// median discrete discovery position is `(2^R + 1) / 2`, half an
/// evaluation later; at cost `kappa * R * (C/R)` per final-generation
/// evaluation that gap is exactly `kappa * C / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub critical_size: u64,
    pub radius: u64,
    #[serde(with = "crate::rational::serde_rational")]
    pub kappa: BigRational,
    pub unit: String,
    pub mode: AccountingMode,
    pub n_trials: u64,
    pub master_seed: u64,
    pub closed_form: CostValue,
    pub predicted_median: CostValue,
    pub simulated_median: CostValue,
    pub delta_abs: CostValue,
    /// `delta_abs / closed_form`, exact.
    #[serde(with = "crate::rational::serde_rational")]
    pub delta_rel: BigRational,
    pub low_confidence: bool,
}

/// Outcome of one needle search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlindSearchOutcome {
    Found { guesses: u64 },
    CapExceeded { cap: u64 },
}

impl BlindSearchOutcome {
    pub fn guesses(&self) -> Option<u64> {
        match self {
            BlindSearchOutcome::Found { guesses } => Some(*guesses),
            BlindSearchOutcome::CapExceeded { .. } => None,
        }
    }

    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self, BlindSearchOutcome::CapExceeded { .. })
    }
}

/// One steepest-ascent hill-climbing run to the landscape target.
///
/// Candidate order per generation is a fresh uniform permutation of the
/// `2^R` block values drawn from the seeded generator, so termination
/// within `2^R` evaluations per generation is guaranteed. Identical
/// arguments give a bit-identical trace.
pub fn run_single(
    landscape: &BlockStaircaseLandscape,
    params: &CostParams,
    mode: AccountingMode,
    seed: u64,
) -> Result<EvolutionTrace> {
    let radius = landscape.radius();
    if radius > MAX_SIMULATION_RADIUS {
        return Err(Error::ScaleGuard(format!(
            "simulation requires R <= {MAX_SIMULATION_RADIUS}, got R={radius}"
        )));
    }
    let generations = landscape.block_count();
    let candidate_count = 1u64 << radius;

    let mut rng = rng_from_seed(seed);
    let mut agent = AgentCode::empty();
    let mut records = Vec::with_capacity(generations as usize);
    let mut total = BigRational::zero();

    for generation in 1..=generations {
        // The full permutation is always drawn, so both accounting modes
        // consume the generator identically and share evaluation order.
        let mut order: Vec<u64> = (0..candidate_count).collect();
        order.shuffle(&mut rng);

        let per_evaluation =
            params.kappa() * BigRational::from_integer(BigInt::from(radius * generation));
        let is_final = generation == generations;
        let mut evaluations = 0u64;
        let mut improving: Option<u64> = None;

        for &candidate in &order {
            evaluations += 1;
            agent.push_block(candidate, radius);
            let fitness = block_fitness(landscape, &agent).expect("engine codes are aligned");
            agent.pop_block(radius);
            if fitness == generation {
                improving = Some(candidate);
                match mode {
                    AccountingMode::FirstImprovement => break,
                    AccountingMode::Exhaustive if is_final => break,
                    AccountingMode::Exhaustive => {}
                }
            }
        }

        let improving = improving.expect("every block value occurs in the permutation");
        agent.push_block(improving, radius);

        let cost = CostValue::new(
            per_evaluation * BigRational::from_integer(BigInt::from(evaluations)),
            params.unit(),
        )
        .expect("costs are non-negative");
        total += cost.magnitude();
        records.push(GenerationRecord {
            index: generation,
            evaluations,
            cost,
        });
    }

    debug_assert_eq!(&agent, landscape.target());
    Ok(EvolutionTrace {
        records,
        total_cost: CostValue::new(total, params.unit()).expect("non-negative"),
        final_code: agent,
        mode,
        seed,
    })
}

/// Run `n_trials` independent evolutions and summarize their total costs.
///
/// Trial `i` uses seed [`trial_seed`]`(master_seed, i)`; the summary
/// depends only on the multiset of totals, not on execution order.
pub fn run_trials(
    landscape: &BlockStaircaseLandscape,
    params: &CostParams,
    mode: AccountingMode,
    n_trials: u64,
    master_seed: u64,
) -> Result<TrialSummary> {
    if n_trials == 0 {
        return Err(Error::InvalidParameter(
            "n_trials must be at least 1".into(),
        ));
    }
    let mut totals = Vec::with_capacity(n_trials as usize);
    for index in 0..n_trials {
        let trace = run_single(landscape, params, mode, trial_seed(master_seed, index))?;
        totals.push(trace.total_cost.magnitude().clone());
    }
    totals.sort();

    let (lower_quartile, upper_quartile) = quartiles_of_sorted(&totals);
    let as_cost =
        |magnitude: BigRational| CostValue::new(magnitude, params.unit()).expect("non-negative");
    Ok(TrialSummary {
        n_trials,
        median: as_cost(median_of_sorted(&totals)),
        lower_quartile: as_cost(lower_quartile),
        upper_quartile: as_cost(upper_quartile),
        min: as_cost(totals.first().expect("n_trials >= 1").clone()),
        max: as_cost(totals.last().expect("n_trials >= 1").clone()),
        master_seed,
        critical_size: landscape.critical_size(),
        radius: landscape.radius(),
        kappa: params.kappa().clone(),
        unit: params.unit().to_string(),
        mode,
    })
}

/// Middle order statistic (odd count) or mean of the two middle ones.
pub fn median_of_sorted(values: &[BigRational]) -> BigRational {
    assert!(!values.is_empty());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2].clone()
    } else {
        (&values[n / 2 - 1] + &values[n / 2]) / BigRational::from_integer(BigInt::from(2))
    }
}

fn quartiles_of_sorted(values: &[BigRational]) -> (BigRational, BigRational) {
    let n = values.len();
    if n == 1 {
        return (values[0].clone(), values[0].clone());
    }
    let half = n / 2;
    (
        median_of_sorted(&values[..half]),
        median_of_sorted(&values[n - half..]),
    )
}

/// Guess complete codes by uniform random permutation until the needle is
/// found or `cap` guesses are spent.
///
/// Without a cap the full permutation is walked, which is limited to
/// 24-bit codes; with a cap any code length up to 63 bits is allowed.
/// The permutation prefix is materialized lazily, so memory is bounded
/// by the number of guesses actually made.
pub fn blind_search_run(
    landscape: &NeedleLandscape,
    seed: u64,
    cap: Option<u64>,
) -> Result<BlindSearchOutcome> {
    let code_bits = landscape.critical_size();
    if code_bits > 63 {
        return Err(Error::ScaleGuard(format!(
            "needle search indexes a 2^C space; C={code_bits} exceeds 63"
        )));
    }
    let space = 1u64 << code_bits;
    let budget = match cap {
        Some(0) => {
            return Err(Error::InvalidParameter("cap must be at least 1".into()));
        }
        Some(cap) => cap.min(space),
        None if code_bits <= 24 => space,
        None => {
            return Err(Error::ScaleGuard(format!(
                "uncapped needle search is limited to C <= 24, got C={code_bits}"
            )));
        }
    };

    let mut rng = rng_from_seed(seed);
    // Lazy Fisher-Yates: only touched slots of the virtual permutation
    // are stored.
    let mut swaps: HashMap<u64, u64> = HashMap::new();
    for drawn in 0..budget {
        let j = rng.random_range(drawn..space);
        let pick = swaps.get(&j).copied().unwrap_or(j);
        let keep = swaps.get(&drawn).copied().unwrap_or(drawn);
        swaps.insert(j, keep);

        let code = AgentCode::from_index(pick, code_bits as u32);
        if needle_fitness(landscape, &code)? == 1 {
            return Ok(BlindSearchOutcome::Found { guesses: drawn + 1 });
        }
    }
    Ok(BlindSearchOutcome::CapExceeded { cap: budget })
}

/// Compare a trial summary against the closed-form prediction.
///
/// The summary must come from exhaustive accounting on the same
/// `(C, R, kappa, unit)` configuration.
pub fn compare_to_analytic(
    summary: &TrialSummary,
    scenario: &ScenarioParams,
    params: &CostParams,
) -> Result<ComparisonReport> {
    if summary.mode != AccountingMode::Exhaustive {
        return Err(Error::ParameterMismatch(
            "comparison requires a summary produced under `paper` accounting".into(),
        ));
    }
    if summary.critical_size != scenario.critical_size() || summary.radius != scenario.radius() {
        return Err(Error::ParameterMismatch(format!(
            "summary is for (C={}, R={}) but the scenario is (C={}, R={})",
            summary.critical_size,
            summary.radius,
            scenario.critical_size(),
            scenario.radius()
        )));
    }
    if &summary.kappa != params.kappa() || summary.unit != params.unit() {
        return Err(Error::ParameterMismatch(
            "summary kappa or unit differs from the supplied cost parameters".into(),
        ));
    }

    let closed_form = evol_cost_closed_form(scenario, params)?;
    let half_lcost = CostValue::new(
        params.kappa() * BigRational::new(scenario.critical_size().into(), BigInt::from(2)),
        params.unit(),
    )?;
    let predicted_median = closed_form.checked_add(&half_lcost)?;
    let delta_abs = summary.median.abs_diff(&predicted_median)?;
    let delta_rel = delta_abs.ratio_to(&closed_form)?;

    Ok(ComparisonReport {
        critical_size: scenario.critical_size(),
        radius: scenario.radius(),
        kappa: params.kappa().clone(),
        unit: params.unit().to_string(),
        mode: summary.mode,
        n_trials: summary.n_trials,
        master_seed: summary.master_seed,
        closed_form,
        predicted_median,
        simulated_median: summary.median.clone(),
        delta_abs,
        delta_rel,
        low_confidence: summary.n_trials < LOW_CONFIDENCE_TRIALS,
    })
}
