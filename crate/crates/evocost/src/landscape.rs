//! Bitstring agent codes and synthetic fitness landscapes.
//!
//! The block-staircase landscape hides a target of `C` bits split into
//! `C/R` blocks of `R` bits; fitness is the number of consecutive leading
//! blocks an agent matches. From any non-final code there is always a
//! fitter code within Hamming distance `R` (fix the next block), and
//! evaluating an agent costs `kappa` per accumulated bit. The needle
//! landscape scores 1 on the full target and 0 everywhere else, the
//! worst case for uninformed search.
//!
//! Landscapes are immutable after construction; every query is read-only.

use rand::Rng;

use crate::cost_model::{CostParams, CostValue};
use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Largest landscape the simulator will construct.
pub const MAX_LANDSCAPE_BITS: u64 = 1 << 20;

/// An agent's accumulated code, as an ordered bit sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AgentCode {
    bits: Vec<bool>,
}

impl AgentCode {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Parse a code from `0`/`1` characters.
    pub fn from_bit_str(text: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(text.len());
        for ch in text.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => {
                    return Err(Error::Parse(format!(
                        "invalid bit character `{other}` in agent code"
                    )))
                }
            }
        }
        Ok(Self { bits })
    }

    /// Interpret the low `len` bits of `index` as a code
    /// (bit `k` of the index becomes position `k`).
    pub fn from_index(index: u64, len: u32) -> Self {
        debug_assert!(len <= 64);
        let bits = (0..len).map(|k| (index >> k) & 1 == 1).collect();
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Append `width` bits of `value`, lowest bit first.
    pub fn push_block(&mut self, value: u64, width: u64) {
        debug_assert!(width <= 64);
        debug_assert!(width == 64 || value < (1u64 << width));
        for k in 0..width {
            self.bits.push((value >> k) & 1 == 1);
        }
    }

    /// Drop the last `width` bits.
    pub fn pop_block(&mut self, width: u64) {
        let new_len = self.bits.len().saturating_sub(width as usize);
        self.bits.truncate(new_len);
    }
}

impl std::fmt::Display for AgentCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &bit in &self.bits {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for AgentCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::from_bit_str(s)
    }
}

/// Deterministic fitness plus linear evaluation-cost accounting.
pub trait FitnessOracle {
    fn evaluate(&self, code: &AgentCode) -> Result<u64>;

    /// Cost of one evaluation of an agent of `agent_bits` bits.
    fn evaluation_cost(&self, agent_bits: u64, params: &CostParams) -> CostValue {
        eval_cost(agent_bits, params)
    }
}

/// Hidden target split into `C/R` blocks of `R` bits; fitness counts
/// consecutive leading blocks matched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockStaircaseLandscape {
    target: AgentCode,
    radius: u64,
    seed: u64,
}

impl BlockStaircaseLandscape {
    /// Draw a uniform target of `critical_size` bits from the pinned
    /// generator. Equal seeds give identical landscapes.
    pub fn generate(critical_size: u64, radius: u64, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let target = AgentCode::from_bits(
            (0..checked_size(critical_size)?)
                .map(|_| rng.random())
                .collect(),
        );
        Self::from_target(target, radius, seed)
    }

    /// Wrap an explicit target; `seed` is recorded for manifests.
    pub fn from_target(target: AgentCode, radius: u64, seed: u64) -> Result<Self> {
        let critical_size = checked_size(target.len() as u64)? as u64;
        if radius == 0 {
            return Err(Error::InvalidParameter("R must be at least 1".into()));
        }
        if !critical_size.is_multiple_of(radius) {
            return Err(Error::Divisibility {
                critical_size,
                radius,
            });
        }
        Ok(Self {
            target,
            radius,
            seed,
        })
    }

    pub fn critical_size(&self) -> u64 {
        self.target.len() as u64
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn block_count(&self) -> u64 {
        self.critical_size() / self.radius
    }

    pub fn target(&self) -> &AgentCode {
        &self.target
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Value of target block `index` (0-based), lowest bit first.
    pub fn target_block(&self, index: u64) -> u64 {
        debug_assert!(index < self.block_count());
        debug_assert!(self.radius <= 64);
        let start = (index * self.radius) as usize;
        let mut value = 0u64;
        for k in 0..self.radius as usize {
            if self.target.bits()[start + k] {
                value |= 1 << k;
            }
        }
        value
    }

    /// One-line manifest `C R seed target-bits`.
    pub fn to_manifest_line(&self) -> String {
        format!(
            "{} {} {} {}",
            self.critical_size(),
            self.radius,
            self.seed,
            self.target
        )
    }

    /// Parse a manifest produced by [`Self::to_manifest_line`].
    pub fn from_manifest_line(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [c, r, seed, bits] = fields.as_slice() else {
            return Err(Error::Parse(format!(
                "landscape manifest must have 4 fields `C R seed target-bits`, got {}",
                fields.len()
            )));
        };
        let c = crate::rational::parse_count(c)?;
        let r = crate::rational::parse_count(r)?;
        let seed = crate::rational::parse_count(seed)?;
        let target = AgentCode::from_bit_str(bits)?;
        if target.len() as u64 != c {
            return Err(Error::Parse(format!(
                "manifest target has {} bits but declares C={c}",
                target.len()
            )));
        }
        Self::from_target(target, r, seed)
    }
}

impl FitnessOracle for BlockStaircaseLandscape {
    fn evaluate(&self, code: &AgentCode) -> Result<u64> {
        block_fitness(self, code)
    }
}

/// Single hidden target; fitness 1 on the target and 0 elsewhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeedleLandscape {
    target: AgentCode,
    seed: u64,
}

impl NeedleLandscape {
    pub fn generate(critical_size: u64, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let target = AgentCode::from_bits(
            (0..checked_size(critical_size)?)
                .map(|_| rng.random())
                .collect(),
        );
        Ok(Self { target, seed })
    }

    pub fn from_target(target: AgentCode, seed: u64) -> Result<Self> {
        checked_size(target.len() as u64)?;
        Ok(Self { target, seed })
    }

    pub fn critical_size(&self) -> u64 {
        self.target.len() as u64
    }

    pub fn target(&self) -> &AgentCode {
        &self.target
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl FitnessOracle for NeedleLandscape {
    fn evaluate(&self, code: &AgentCode) -> Result<u64> {
        needle_fitness(self, code)
    }
}

fn checked_size(critical_size: u64) -> Result<usize> {
    if critical_size == 0 {
        return Err(Error::InvalidParameter("C must be at least 1".into()));
    }
    if critical_size > MAX_LANDSCAPE_BITS {
        return Err(Error::ScaleGuard(format!(
            "C={critical_size} exceeds the landscape limit of {MAX_LANDSCAPE_BITS} bits"
        )));
    }
    Ok(critical_size as usize)
}

/// Number of consecutive leading `R`-bit blocks of `code` matching the
/// target, stopping at the first mismatch or at the end of the code.
/// The code must be block-aligned and no longer than the target.
pub fn block_fitness(landscape: &BlockStaircaseLandscape, code: &AgentCode) -> Result<u64> {
    let radius = landscape.radius() as usize;
    if code.len() as u64 > landscape.critical_size() {
        return Err(Error::OversizedCode {
            length: code.len(),
            size: landscape.critical_size(),
        });
    }
    if !code.len().is_multiple_of(radius) {
        return Err(Error::MisalignedCode {
            length: code.len(),
            radius: landscape.radius(),
        });
    }
    let mut matched = 0u64;
    for (block, target_block) in code
        .bits()
        .chunks(radius)
        .zip(landscape.target().bits().chunks(radius))
    {
        if block == target_block {
            matched += 1;
        } else {
            break;
        }
    }
    Ok(matched)
}

/// 1 if `code` equals the target, else 0. The code must be full length.
pub fn needle_fitness(landscape: &NeedleLandscape, code: &AgentCode) -> Result<u64> {
    if code.len() as u64 != landscape.critical_size() {
        return Err(Error::OversizedCode {
            length: code.len(),
            size: landscape.critical_size(),
        });
    }
    Ok(u64::from(code == landscape.target()))
}

/// Linear evaluation cost: `kappa * agent_bits`.
pub fn eval_cost(agent_bits: u64, params: &CostParams) -> CostValue {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    CostValue::new(
        params.kappa() * BigRational::from_integer(BigInt::from(agent_bits)),
        params.unit(),
    )
    .expect("kappa positive and bits non-negative")
}

/// Whether the target bit at `position` equals `bit`. This is the
/// per-bit feedback oracle granted to the efficient learner; one call is
/// accounted at cost `kappa` by its caller.
pub fn bitwise_match(
    landscape: &BlockStaircaseLandscape,
    position: u64,
    bit: bool,
) -> Result<bool> {
    if position >= landscape.critical_size() {
        return Err(Error::PositionOutOfRange {
            position,
            size: landscape.critical_size(),
        });
    }
    Ok(landscape.target().bits()[position as usize] == bit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::parse_rational;
    use proptest::prelude::*;

    fn unit_params() -> CostParams {
        CostParams::new(parse_rational("1").unwrap(), "year").unwrap()
    }

    fn landscape_1011() -> BlockStaircaseLandscape {
        BlockStaircaseLandscape::from_target(AgentCode::from_bit_str("1011").unwrap(), 2, 0)
            .unwrap()
    }

    /// Independent re-statement of the fitness definition over string
    /// slices, used as an oracle for the chunked implementation.
    fn naive_block_fitness(target: &str, radius: usize, code: &str) -> u64 {
        let mut matched = 0;
        for j in 0..code.len() / radius {
            if code[j * radius..(j + 1) * radius] == target[j * radius..(j + 1) * radius] {
                matched = (j + 1) as u64;
            } else {
                break;
            }
        }
        matched
    }

    #[test]
    fn generation_is_deterministic() {
        let a = BlockStaircaseLandscape::generate(4, 2, 99).unwrap();
        let b = BlockStaircaseLandscape::generate(4, 2, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.block_count(), 2);

        let wide = BlockStaircaseLandscape::generate(32, 4, 99).unwrap();
        let other = BlockStaircaseLandscape::generate(32, 4, 100).unwrap();
        assert_ne!(wide.target(), other.target());
    }

    #[test]
    fn generation_validates_inputs() {
        assert!(matches!(
            BlockStaircaseLandscape::generate(5, 2, 0),
            Err(Error::Divisibility { .. })
        ));
        assert!(matches!(
            BlockStaircaseLandscape::generate(MAX_LANDSCAPE_BITS + 1, 1, 0),
            Err(Error::ScaleGuard(_))
        ));
        assert!(BlockStaircaseLandscape::generate(0, 1, 0).is_err());
    }

    #[test]
    fn target_bits_are_roughly_uniform() {
        // 1000 seeds, 32 positions; each frequency must sit in 0.5 +/- 0.05.
        let mut ones = [0u32; 32];
        for seed in 0..1000u64 {
            let landscape = BlockStaircaseLandscape::generate(32, 4, seed).unwrap();
            for (position, &bit) in landscape.target().bits().iter().enumerate() {
                if bit {
                    ones[position] += 1;
                }
            }
        }
        for (position, &count) in ones.iter().enumerate() {
            assert!(
                (450..=550).contains(&count),
                "position {position}: {count}/1000 ones"
            );
        }
    }

    #[test]
    fn block_fitness_examples() {
        let landscape = landscape_1011();
        let fitness = |code: &str| {
            block_fitness(&landscape, &AgentCode::from_bit_str(code).unwrap()).unwrap()
        };
        assert_eq!(fitness(""), 0);
        assert_eq!(fitness("1011"), 2);
        assert_eq!(fitness("1000"), 1);
        assert_eq!(fitness("0111"), 0);
        assert_eq!(fitness("10"), 1);
        assert_eq!(fitness("01"), 0);
    }

    #[test]
    fn block_fitness_rejects_bad_codes() {
        let landscape = landscape_1011();
        assert!(matches!(
            block_fitness(&landscape, &AgentCode::from_bit_str("1").unwrap()),
            Err(Error::MisalignedCode { .. })
        ));
        assert!(matches!(
            block_fitness(&landscape, &AgentCode::from_bit_str("101101").unwrap()),
            Err(Error::OversizedCode { .. })
        ));
    }

    #[test]
    fn block_fitness_matches_naive_oracle_exhaustively() {
        // Every target and every aligned code for C=4, R=2.
        for target_index in 0..16u64 {
            let target = AgentCode::from_index(target_index, 4);
            let landscape = BlockStaircaseLandscape::from_target(target.clone(), 2, 0).unwrap();
            let target_text = target.to_string();
            for len in [0usize, 2, 4] {
                for code_index in 0..(1u64 << len) {
                    let code = AgentCode::from_index(code_index, len as u32);
                    let expected = naive_block_fitness(&target_text, 2, &code.to_string());
                    assert_eq!(
                        block_fitness(&landscape, &code).unwrap(),
                        expected,
                        "target={target_text} code={code}"
                    );
                }
            }
        }
    }

    #[test]
    fn needle_fitness_examples() {
        let landscape =
            NeedleLandscape::from_target(AgentCode::from_bit_str("101").unwrap(), 0).unwrap();
        assert_eq!(needle_fitness(&landscape, landscape.target()).unwrap(), 1);
        for flip in 0..3 {
            let mut bits = landscape.target().bits().to_vec();
            bits[flip] = !bits[flip];
            assert_eq!(
                needle_fitness(&landscape, &AgentCode::from_bits(bits)).unwrap(),
                0
            );
        }
        assert!(needle_fitness(&landscape, &AgentCode::from_bit_str("10").unwrap()).is_err());
    }

    #[test]
    fn needle_fitness_sums_to_one_exhaustively() {
        for c in [1u32, 2, 3, 8, 16] {
            let landscape = NeedleLandscape::generate(c as u64, 7).unwrap();
            let total: u64 = (0..(1u64 << c))
                .map(|index| needle_fitness(&landscape, &AgentCode::from_index(index, c)).unwrap())
                .sum();
            assert_eq!(total, 1, "C={c}");
        }
    }

    #[test]
    fn eval_cost_examples() {
        let params = unit_params();
        assert_eq!(
            eval_cost(0, &params).magnitude(),
            &parse_rational("0").unwrap()
        );
        assert_eq!(
            eval_cost(2, &params).magnitude(),
            &parse_rational("2").unwrap()
        );
        let calibrated = CostParams::new(parse_rational("6.25e-8").unwrap(), "year").unwrap();
        assert_eq!(
            eval_cost(400_000_000, &calibrated).magnitude(),
            &parse_rational("25").unwrap()
        );
    }

    #[test]
    fn bitwise_match_examples() {
        let landscape = landscape_1011();
        assert!(bitwise_match(&landscape, 0, true).unwrap());
        assert!(!bitwise_match(&landscape, 1, true).unwrap());
        assert_eq!(
            bitwise_match(&landscape, 3, true).unwrap(),
            bitwise_match(&landscape, 3, true).unwrap()
        );
        assert!(matches!(
            bitwise_match(&landscape, 4, false),
            Err(Error::PositionOutOfRange { .. })
        ));
    }

    #[test]
    fn manifest_round_trips() {
        let landscape = BlockStaircaseLandscape::generate(8, 2, 12345).unwrap();
        let line = landscape.to_manifest_line();
        let parsed = BlockStaircaseLandscape::from_manifest_line(&line).unwrap();
        assert_eq!(parsed, landscape);

        assert!(BlockStaircaseLandscape::from_manifest_line("4 2 0").is_err());
        assert!(BlockStaircaseLandscape::from_manifest_line("4 2 0 101").is_err());
        assert!(BlockStaircaseLandscape::from_manifest_line("4 3 0 1011").is_err());
    }

    proptest! {
        /// Prefixes of the target score exactly their block count.
        #[test]
        fn target_prefix_scores_its_length(seed in 0u64..500, blocks in 1u64..8, r in 1u64..6) {
            let landscape = BlockStaircaseLandscape::generate(blocks * r, r, seed).unwrap();
            for k in 0..=blocks {
                let prefix = AgentCode::from_bits(
                    landscape.target().bits()[..(k * r) as usize].to_vec(),
                );
                prop_assert_eq!(block_fitness(&landscape, &prefix).unwrap(), k);
            }
        }

        /// From any aligned full-length code below the top, rewriting the
        /// next block reaches fitness k+1 within Hamming distance R.
        #[test]
        fn staircase_improvement_within_radius(seed in 0u64..500, code_seed in 0u64..500, blocks in 1u64..8, r in 1u64..6) {
            let c = blocks * r;
            let landscape = BlockStaircaseLandscape::generate(c, r, seed).unwrap();
            let mut rng = rng_from_seed(code_seed);
            let code = AgentCode::from_bits((0..c).map(|_| rng.random()).collect());
            let fitness = block_fitness(&landscape, &code).unwrap();
            prop_assume!(fitness < blocks);

            let mut improved_bits = code.bits().to_vec();
            let start = (fitness * r) as usize;
            let mut hamming = 0;
            for k in 0..r as usize {
                let target_bit = landscape.target().bits()[start + k];
                if improved_bits[start + k] != target_bit {
                    improved_bits[start + k] = target_bit;
                    hamming += 1;
                }
            }
            let improved = AgentCode::from_bits(improved_bits);
            prop_assert!(hamming <= r);
            prop_assert!(block_fitness(&landscape, &improved).unwrap() > fitness);
        }

        /// Appending the correct block raises fitness by exactly one;
        /// appending any wrong block leaves it unchanged.
        #[test]
        fn appending_blocks_is_prefix_monotone(seed in 0u64..500, blocks in 1u64..6, r in 1u64..5, wrong_offset in 1u64..4) {
            let landscape = BlockStaircaseLandscape::generate(blocks * r, r, seed).unwrap();
            for k in 0..blocks {
                let mut code = AgentCode::from_bits(
                    landscape.target().bits()[..(k * r) as usize].to_vec(),
                );
                let correct = landscape.target_block(k);
                let space = 1u64 << r;

                let mut extended = code.clone();
                extended.push_block(correct, r);
                prop_assert_eq!(block_fitness(&landscape, &extended).unwrap(), k + 1);

                let wrong = (correct + (wrong_offset % (space - 1)) + 1) % space;
                if wrong != correct {
                    code.push_block(wrong, r);
                    prop_assert_eq!(block_fitness(&landscape, &code).unwrap(), k);
                }
            }
        }

        /// Linear cost is additive in the bit count.
        #[test]
        fn eval_cost_is_additive(a in 0u64..1_000_000, b in 0u64..1_000_000, num in 1u64..100, den in 1u64..100) {
            let params = CostParams::new(
                num_rational::BigRational::new(num.into(), den.into()),
                "year",
            ).unwrap();
            let combined = eval_cost(a + b, &params);
            let split = eval_cost(a, &params).checked_add(&eval_cost(b, &params)).unwrap();
            prop_assert_eq!(combined, split);
        }

        /// Fitness is bounded by the block count.
        #[test]
        fn fitness_bounded_by_block_count(seed in 0u64..200, code_index in 0u64..256, blocks in 1u64..5, r in 1u64..4) {
            let c = blocks * r;
            let landscape = BlockStaircaseLandscape::generate(c, r, seed).unwrap();
            let code = AgentCode::from_index(code_index & ((1 << c) - 1), c as u32);
            let fitness = block_fitness(&landscape, &code).unwrap();
            prop_assert!(fitness <= blocks);
        }
    }
}
