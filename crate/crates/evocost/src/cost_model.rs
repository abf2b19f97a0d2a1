//! Exact closed-form cost arithmetic for staircase evolution.
//!
//! An agent of target size `C` bits evolves by gaining `R` bits per
//! generation; every candidate evaluation in generation `i` costs
//! `kappa * R * i` because evaluation cost grows linearly with the bits
//! accumulated so far. With all `2^R` candidates evaluated per
//! generation and half of the final generation counted, the median total
//! cost has the closed form `1/2 * 2^R * kappa * C^2 / R`, while an
//! oracle-guided learner pays only `lcost = kappa * C`.
//!
//! Everything is computed on arbitrary-precision rationals so that the
//! summation and the closed form can be compared for exact equality;
//! floats appear only as renderings. [`evol_cost_sum`] deliberately keeps
//! its term-by-term loop so it remains an independent check against
//! [`evol_cost_closed_form`].
//!
//! All functions here are pure; they can be called concurrently without
//! restriction.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational;

/// Cost per evaluated agent bit, tagged with a unit label.
///
/// Units are labels, never converted; combining quantities with different
/// labels is an error.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostParams {
    kappa: BigRational,
    unit: String,
}

impl CostParams {
    pub fn new(kappa: BigRational, unit: impl Into<String>) -> Result<Self> {
        if kappa <= BigRational::zero() {
            return Err(Error::InvalidParameter(
                "kappa must be strictly positive".into(),
            ));
        }
        Ok(Self {
            kappa,
            unit: unit.into(),
        })
    }

    pub fn kappa(&self) -> &BigRational {
        &self.kappa
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }
}

/// The `(C, R)` configuration of one evolution scenario, plus an optional
/// population of simultaneous agents per generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScenarioParams {
    critical_size: u64,
    radius: u64,
    population: Option<u64>,
}

impl ScenarioParams {
    pub fn new(critical_size: u64, radius: u64) -> Result<Self> {
        if critical_size == 0 {
            return Err(Error::InvalidParameter("C must be at least 1".into()));
        }
        if radius == 0 {
            return Err(Error::InvalidParameter("R must be at least 1".into()));
        }
        if radius > critical_size {
            return Err(Error::InvalidParameter(format!(
                "R={radius} must not exceed C={critical_size}"
            )));
        }
        Ok(Self {
            critical_size,
            radius,
            population: None,
        })
    }

    pub fn with_population(mut self, population: u64) -> Result<Self> {
        if population == 0 {
            return Err(Error::InvalidParameter(
                "population must be at least 1".into(),
            ));
        }
        self.population = Some(population);
        Ok(self)
    }

    pub fn critical_size(&self) -> u64 {
        self.critical_size
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn population(&self) -> Option<u64> {
        self.population
    }

    /// Whole number of generations `C / R`; errors when R does not
    /// divide C, since no partial final block is modeled.
    pub fn generations(&self) -> Result<u64> {
        if !self.critical_size.is_multiple_of(self.radius) {
            return Err(Error::Divisibility {
                critical_size: self.critical_size,
                radius: self.radius,
            });
        }
        Ok(self.critical_size / self.radius)
    }
}

/// A non-negative cost magnitude carried as an exact rational with its
/// unit label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CostValue {
    #[serde(with = "crate::rational::serde_rational")]
    magnitude: BigRational,
    unit: String,
}

impl CostValue {
    pub fn new(magnitude: BigRational, unit: impl Into<String>) -> Result<Self> {
        if magnitude.is_negative() {
            return Err(Error::InvalidParameter(
                "cost magnitude must be non-negative".into(),
            ));
        }
        Ok(Self {
            magnitude,
            unit: unit.into(),
        })
    }

    pub fn zero(unit: impl Into<String>) -> Self {
        Self {
            magnitude: BigRational::zero(),
            unit: unit.into(),
        }
    }

    pub fn magnitude(&self) -> &BigRational {
        &self.magnitude
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    /// Nearest float, for reporting.
    pub fn as_f64(&self) -> f64 {
        rational::to_f64(&self.magnitude)
    }

    pub fn checked_add(&self, other: &CostValue) -> Result<CostValue> {
        self.require_same_unit(other)?;
        Ok(CostValue {
            magnitude: &self.magnitude + &other.magnitude,
            unit: self.unit.clone(),
        })
    }

    /// `|self - other|`, defined only for matching units.
    pub fn abs_diff(&self, other: &CostValue) -> Result<CostValue> {
        self.require_same_unit(other)?;
        Ok(CostValue {
            magnitude: (&self.magnitude - &other.magnitude).abs(),
            unit: self.unit.clone(),
        })
    }

    /// Dimensionless exact ratio `self / other`; units must match and the
    /// denominator must be positive.
    pub fn ratio_to(&self, other: &CostValue) -> Result<BigRational> {
        self.require_same_unit(other)?;
        if other.magnitude <= BigRational::zero() {
            return Err(Error::InvalidParameter(
                "ratio denominator must be positive".into(),
            ));
        }
        Ok(&self.magnitude / &other.magnitude)
    }

    fn require_same_unit(&self, other: &CostValue) -> Result<()> {
        if self.unit != other.unit {
            return Err(Error::UnitMismatch {
                left: self.unit.clone(),
                right: other.unit.clone(),
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for CostValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}", self.magnitude, self.unit)
    }
}

fn big(value: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

fn two_pow(exponent: u64) -> BigInt {
    BigInt::one() << usize::try_from(exponent).expect("exponent fits usize")
}

/// Total evolution cost, summed generation by generation:
/// `sum_{i=1}^{C/R} 2^R * kappa * R * i - 1/2 * 2^R * kappa * R * (C/R)`.
///
/// The loop accumulates the generation index term by term on purpose, so
/// the result is an independent route to the same quantity as
/// [`evol_cost_closed_form`]. Requires `R | C`.
pub fn evol_cost_sum(scenario: &ScenarioParams, params: &CostParams) -> Result<CostValue> {
    let generations = scenario.generations()?;
    let mut index_sum: u128 = 0;
    for i in 1..=generations {
        index_sum += u128::from(i);
    }
    // Common factor 2^R * kappa * R of every term.
    let factor =
        BigRational::from_integer(two_pow(scenario.radius) * BigInt::from(scenario.radius))
            * params.kappa();
    let total = &factor * BigRational::from_integer(BigInt::from(index_sum));
    let half_final = factor * big(generations) / big(2);
    CostValue::new(total - half_final, params.unit())
}

/// Closed-form total evolution cost `1/2 * 2^R * kappa * C^2 / R`.
///
/// Defined for every `1 <= R <= C`; whole generations are not required
/// because the formula is algebraic in `C / R`.
pub fn evol_cost_closed_form(scenario: &ScenarioParams, params: &CostParams) -> Result<CostValue> {
    let c = BigInt::from(scenario.critical_size);
    let numer = two_pow(scenario.radius) * &c * &c;
    let denom = BigInt::from(2u8) * BigInt::from(scenario.radius);
    CostValue::new(
        params.kappa() * BigRational::new(numer, denom),
        params.unit(),
    )
}

/// Efficient-learner cost `kappa * C`.
pub fn lcost_linear(critical_size: u64, params: &CostParams) -> Result<CostValue> {
    if critical_size == 0 {
        return Err(Error::InvalidParameter("C must be at least 1".into()));
    }
    CostValue::new(params.kappa() * big(critical_size), params.unit())
}

/// Total evolution cost from a known learning cost:
/// `1/2 * 2^R * (C/R) * lcost`.
pub fn evol_cost_from_lcost(scenario: &ScenarioParams, lcost: &CostValue) -> Result<CostValue> {
    let ratio = BigRational::new(
        two_pow(scenario.radius) * BigInt::from(scenario.critical_size),
        BigInt::from(2u8) * BigInt::from(scenario.radius),
    );
    CostValue::new(ratio * lcost.magnitude(), lcost.unit())
}

/// Calibrate kappa from a learning cost and the critical agent size:
/// `kappa = lcost / critical_size`.
pub fn kappa_estimate(lcost: &CostValue, critical_size: u64) -> Result<CostParams> {
    if critical_size == 0 {
        return Err(Error::InvalidParameter(
            "critical size must be at least 1".into(),
        ));
    }
    if lcost.magnitude() <= &BigRational::zero() {
        return Err(Error::InvalidParameter("lcost must be positive".into()));
    }
    CostParams::new(lcost.magnitude() / big(critical_size), lcost.unit())
}

/// Exact ratio of evolution cost to efficient learning cost:
/// `1/2 * 2^R * C / R`. Independent of kappa.
pub fn slowdown_ratio(scenario: &ScenarioParams) -> BigRational {
    BigRational::new(
        two_pow(scenario.radius) * BigInt::from(scenario.critical_size),
        BigInt::from(2u8) * BigInt::from(scenario.radius),
    )
}

/// Wall-clock cost of a total evaluation cost spread over a population of
/// simultaneous agents: `total / population`.
pub fn elapsed_time(total_cost: &CostValue, population: u64) -> Result<CostValue> {
    if population == 0 {
        return Err(Error::InvalidParameter(
            "population must be at least 1".into(),
        ));
    }
    CostValue::new(total_cost.magnitude() / big(population), total_cost.unit())
}

/// Search radius giving `2^R` closest to the population size:
/// `round(log2(population))`, ties toward even.
///
/// The comparison happens in exact integer arithmetic: `population`
/// rounds up exactly when `population^2 > 2^(2k+1)` for
/// `k = floor(log2(population))`. A tie would need `log2(population)` to
/// land exactly on a half-integer, which no integer achieves, so the
/// ties-toward-even rule never actually fires.
pub fn population_to_radius(population: u64) -> Result<u64> {
    if population < 2 {
        return Err(Error::InvalidParameter(
            "population must be at least 2".into(),
        ));
    }
    let floor_log2 = 63 - u64::from(population.leading_zeros());
    let squared = u128::from(population) * u128::from(population);
    let midpoint_squared = 1u128 << (2 * floor_log2 + 1);
    Ok(if squared > midpoint_squared {
        floor_log2 + 1
    } else {
        floor_log2
    })
}

/// Median number of guesses to hit one target among `2^C` codes when
/// guessing by uniform random permutation: `(2^C + 1) / 2`.
pub fn blind_search_median_trials(critical_size: u64) -> Result<BigRational> {
    if critical_size == 0 {
        return Err(Error::InvalidParameter("C must be at least 1".into()));
    }
    Ok(BigRational::new(
        two_pow(critical_size) + BigInt::one(),
        BigInt::from(2u8),
    ))
}

/// One kappa variant of the built-in reference example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleVariant {
    pub label: String,
    #[serde(with = "crate::rational::serde_rational")]
    pub kappa: BigRational,
    pub lcost: CostValue,
    pub evol_cost: CostValue,
    pub evol_cost_f64: f64,
    #[serde(with = "crate::rational::serde_rational")]
    pub slowdown: BigRational,
    pub elapsed: CostValue,
    pub elapsed_f64: f64,
    /// Relative deviation of `evol_cost` from the reference headline value.
    pub evol_cost_rel_delta: f64,
    /// Relative deviation of `elapsed` from the reference headline value.
    pub elapsed_rel_delta: f64,
}

/// Full report for the built-in reference configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub critical_size: u64,
    pub radius: u64,
    pub population: u64,
    pub unit: String,
    /// Headline reference values the variants are compared against.
    pub reference_evol_cost: CostValue,
    pub reference_elapsed: CostValue,
    pub variants: Vec<ExampleVariant>,
}

/// Reference configuration: a 400-megabit agent, radius 30 (so that
/// `2^R` matches a population of one billion agents per generation),
/// costs in person-year units.
///
/// Two kappa variants are reported: the rounded calibration
/// `0.6e-7 year/bit` and the exact calibration `25 / 4e8 = 6.25e-8
/// year/bit` from a 25-year learning budget.
pub fn worked_example() -> ExampleReport {
    const UNIT: &str = "year";
    let critical_size: u64 = 400_000_000;
    let radius: u64 = 30;
    let population: u64 = 1_000_000_000;

    let scenario = ScenarioParams::new(critical_size, radius)
        .and_then(|s| s.with_population(population))
        .expect("reference scenario is valid");

    let reference_evol_cost =
        CostValue::new(rational::parse_rational("1.7e17").expect("literal"), UNIT)
            .expect("reference cost");
    let reference_elapsed =
        CostValue::new(rational::parse_rational("1.7e8").expect("literal"), UNIT)
            .expect("reference elapsed");

    let rel_delta = |value: &CostValue, reference: &CostValue| -> f64 {
        let delta = value
            .abs_diff(reference)
            .expect("matching units")
            .ratio_to(reference)
            .expect("positive reference");
        rational::to_f64(&delta)
    };

    let variant = |label: &str, kappa_literal: &str| -> ExampleVariant {
        let kappa = rational::parse_rational(kappa_literal).expect("literal");
        let params = CostParams::new(kappa.clone(), UNIT).expect("positive kappa");
        let lcost = lcost_linear(critical_size, &params).expect("valid size");
        let evol_cost = evol_cost_closed_form(&scenario, &params).expect("valid scenario");
        let elapsed = elapsed_time(&evol_cost, population).expect("valid population");
        ExampleVariant {
            label: label.into(),
            kappa,
            evol_cost_f64: evol_cost.as_f64(),
            evol_cost_rel_delta: rel_delta(&evol_cost, &reference_evol_cost),
            elapsed_f64: elapsed.as_f64(),
            elapsed_rel_delta: rel_delta(&elapsed, &reference_elapsed),
            slowdown: slowdown_ratio(&scenario),
            lcost,
            evol_cost,
            elapsed,
        }
    };

    let variants = vec![
        variant("rounded-kappa", "0.6e-7"),
        variant("exact-kappa", "25/400000000"),
    ];

    ExampleReport {
        critical_size,
        radius,
        population,
        unit: UNIT.into(),
        reference_evol_cost,
        reference_elapsed,
        variants,
    }
}
