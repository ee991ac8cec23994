//! d-wise independent hash families `h: {0,1}^γ → {0,1}^β` built from
//! degree-`(d−1)` polynomials over GF(2^m), `m = max(γ, β)`.
//!
//! Seed layout: the `t = d·m` seed bits hold the coefficients
//! `a₀, …, a_{d−1}` in order, each low-bit-first, so seed bit `i` is bit
//! `i mod m` of coefficient `a_{⌊i/m⌋}`. A prefix of length `i` fixes the `i`
//! lowest bits of the seed integer.
//!
//! Conditional counts come in two flavours: exact linear-algebra counting for
//! conjunctions of `coin = 1` events ([`LinearCoins`]), and enumeration over
//! consistent seeds for arbitrary predicates ([`conditional_count`]).

pub mod gf;
pub mod linear;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::pow2_big;
pub use gf::{field_mul, irreducible};
pub use linear::{count_exponent, low_mask, Equation};

pub const DEFAULT_T_MAX: u32 = 26;
pub const DEFAULT_MATRIX_CAP_BITS: u64 = 1 << 28;
pub const MAX_SEED_BITS: u32 = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HashError {
    #[error("unsupported field size m = {0} (supported: 1..=32)")]
    UnsupportedField(u32),
    #[error("field element out of range for m = {m}")]
    ElementOutOfRange { m: u32 },
    #[error("invalid family parameters: {0}")]
    Parameter(String),
    #[error("seed does not fit in {t} bits")]
    SeedLength { t: u32 },
    #[error("input {x} does not fit in γ = {gamma} bits")]
    InputOutOfRange { x: u64, gamma: u32 },
    #[error("probability 2^-{j} not representable with β = {beta}")]
    Probability { j: u32, beta: u32 },
    #[error("enumeration budget exceeded: {free} free seed bits > t_max = {t_max}")]
    Budget { free: u32, t_max: u32 },
    #[error("bad seed encoding: {0}")]
    Encoding(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilyParams {
    pub gamma: u32,
    pub beta: u32,
    pub d: u32,
    pub m: u32,
    pub t: u32,
}

impl FamilyParams {
    pub fn new(gamma: u32, beta: u32, d: u32) -> Result<Self, HashError> {
        if gamma == 0 || beta == 0 || d == 0 {
            return Err(HashError::Parameter(format!(
                "γ, β, d must be ≥ 1 (got γ={gamma}, β={beta}, d={d})"
            )));
        }
        let m = gamma.max(beta);
        gf::irreducible(m)?;
        let t = d * m;
        if t > MAX_SEED_BITS {
            return Err(HashError::Parameter(format!(
                "seed length {t} exceeds {MAX_SEED_BITS} bits"
            )));
        }
        Ok(FamilyParams {
            gamma,
            beta,
            d,
            m,
            t,
        })
    }

    pub fn seed_count(&self) -> BigUint {
        pow2_big(self.t)
    }

    fn check_seed(&self, seed: u128) -> Result<(), HashError> {
        if seed & !low_mask(self.t) != 0 {
            Err(HashError::SeedLength { t: self.t })
        } else {
            Ok(())
        }
    }

    fn check_input(&self, x: u64) -> Result<(), HashError> {
        if self.gamma < 64 && x >> self.gamma != 0 {
            Err(HashError::InputOutOfRange { x, gamma: self.gamma })
        } else {
            Ok(())
        }
    }

    pub fn check_exponent(&self, j: u32) -> Result<(), HashError> {
        if j == 0 || j > self.beta {
            Err(HashError::Probability { j, beta: self.beta })
        } else {
            Ok(())
        }
    }
}

/// A seed prefix `Y_i = (y₁, …, y_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedAssignment {
    params: FamilyParams,
    prefix: u128,
    len: u32,
}

impl SeedAssignment {
    pub fn new(params: FamilyParams) -> Self {
        SeedAssignment {
            params,
            prefix: 0,
            len: 0,
        }
    }

    pub fn with_prefix(params: FamilyParams, prefix: u128, len: u32) -> Result<Self, HashError> {
        if len > params.t {
            return Err(HashError::SeedLength { t: params.t });
        }
        Ok(SeedAssignment {
            params,
            prefix: prefix & low_mask(len),
            len,
        })
    }

    pub fn complete(params: FamilyParams, seed: u128) -> Result<Self, HashError> {
        params.check_seed(seed)?;
        Self::with_prefix(params, seed, params.t)
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    pub fn prefix(&self) -> u128 {
        self.prefix
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn free_bits(&self) -> u32 {
        self.params.t - self.len
    }

    pub fn is_complete(&self) -> bool {
        self.len == self.params.t
    }

    /// The seed, once every bit is fixed.
    pub fn seed(&self) -> Option<u128> {
        self.is_complete().then_some(self.prefix)
    }

    pub fn extend(&self, bit: bool) -> Self {
        assert!(!self.is_complete(), "extending a complete seed");
        SeedAssignment {
            params: self.params,
            prefix: self.prefix | (u128::from(bit) << self.len),
            len: self.len + 1,
        }
    }

    /// Appends `z` bits, least significant first (block value `v` sets
    /// `y_{i+1} = v & 1`, …). Blocks running past `t` are truncated.
    pub fn extend_block(&self, value: u64, z: u32) -> Self {
        let z = z.min(self.free_bits());
        let v = u128::from(value) & low_mask(z);
        SeedAssignment {
            params: self.params,
            prefix: self.prefix | (v << self.len),
            len: self.len + z,
        }
    }

    /// Denominator `2^{t−i}`: the number of consistent seeds.
    pub fn denominator(&self) -> BigUint {
        pow2_big(self.free_bits())
    }

    /// Consistent seeds in ascending order of their free part.
    pub fn consistent_seeds(&self) -> impl Iterator<Item = u128> + '_ {
        let free = self.free_bits();
        assert!(free < 64, "enumeration over {free} free bits");
        (0..1u64 << free).map(move |s| self.prefix | (u128::from(s) << self.len))
    }

    /// `"<len>:<hex>"`, hex digits most significant first.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4).max(1) as usize;
        format!("{}:{:0width$x}", self.len, self.prefix, width = digits)
    }

    pub fn from_hex(params: FamilyParams, s: &str) -> Result<Self, HashError> {
        let (len, hex) = s
            .split_once(':')
            .ok_or_else(|| HashError::Encoding(format!("missing ':' in {s:?}")))?;
        let len: u32 = len
            .trim()
            .parse()
            .map_err(|_| HashError::Encoding(format!("bad length in {s:?}")))?;
        let prefix = u128::from_str_radix(hex.trim(), 16)
            .map_err(|_| HashError::Encoding(format!("bad hex in {s:?}")))?;
        if prefix & !low_mask(len) != 0 {
            return Err(HashError::Encoding(format!("{s:?} sets bits beyond its length")));
        }
        Self::with_prefix(params, prefix, len)
    }
}

/// Evaluator with the reduction polynomial resolved once.
#[derive(Debug, Clone, Copy)]
pub struct Hasher {
    params: FamilyParams,
    poly: u64,
    coef_mask: u64,
}

impl Hasher {
    pub fn new(params: FamilyParams) -> Self {
        Hasher {
            params,
            poly: gf::irreducible(params.m).expect("validated by FamilyParams"),
            coef_mask: (1u64 << params.m) - 1,
        }
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    /// Unchecked evaluation; `seed` and `x` must be in range.
    #[inline]
    pub fn eval(&self, seed: u128, x: u64) -> u64 {
        let FamilyParams { m, d, beta, .. } = self.params;
        let mut acc = 0u64;
        for c in (0..d).rev() {
            let coef = (seed >> (c * m)) as u64 & self.coef_mask;
            acc = gf::mul_mod(acc, x, m, self.poly) ^ coef;
        }
        acc & ((1u64 << beta) - 1)
    }

    #[inline]
    pub fn coin(&self, seed: u128, x: u64, j: u32) -> bool {
        self.eval(seed, x) < 1u64 << (self.params.beta - j)
    }
}

pub fn eval_hash(params: &FamilyParams, seed: u128, x: u64) -> Result<u64, HashError> {
    params.check_seed(seed)?;
    params.check_input(x)?;
    Ok(Hasher::new(*params).eval(seed, x))
}

/// Biased coin with `Pr[1] = 2^{-j}`: 1 iff `h(x) < 2^{β−j}`.
pub fn coin(params: &FamilyParams, seed: u128, x: u64, j: u32) -> Result<bool, HashError> {
    params.check_exponent(j)?;
    Ok(eval_hash(params, seed, x)? < 1u64 << (params.beta - j))
}

/// `numerator / 2^free` as an exact count over consistent seeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Count {
    pub numerator: BigUint,
    pub free: u32,
}

impl Count {
    pub fn denominator(&self) -> BigUint {
        pow2_big(self.free)
    }

    pub fn probability(&self) -> BigRational {
        BigRational::new(self.numerator.clone().into(), self.denominator().into())
    }

    fn from_exponent(exp: Option<u32>, free: u32) -> Self {
        Count {
            numerator: exp.map_or_else(BigUint::zero, pow2_big),
            free,
        }
    }
}

/// Runs `f` on every consistent seed, refusing more than `2^t_max` seeds.
pub fn for_each_consistent(
    assignment: &SeedAssignment,
    t_max: u32,
    mut f: impl FnMut(u128),
) -> Result<(), HashError> {
    let free = assignment.free_bits();
    if free > t_max {
        return Err(HashError::Budget { free, t_max });
    }
    assignment.consistent_seeds().for_each(&mut f);
    Ok(())
}

/// Exact count of consistent seeds satisfying `pred`, by enumeration.
pub fn conditional_count(
    assignment: &SeedAssignment,
    t_max: u32,
    mut pred: impl FnMut(u128) -> bool,
) -> Result<Count, HashError> {
    let mut hits = 0u64;
    for_each_consistent(assignment, t_max, |s| hits += u64::from(pred(s)))?;
    Ok(Count {
        numerator: BigUint::from(hits),
        free: assignment.free_bits(),
    })
}

/// Linear forms of the `β` output bits of `h(x)` in the seed bits:
/// bit `r` of `h(x)` equals the parity of `seed & rows[r]`.
pub fn output_rows(params: &FamilyParams, x: u64) -> Vec<u128> {
    let FamilyParams { m, d, beta, .. } = *params;
    let poly = gf::irreducible(m).expect("validated by FamilyParams");
    let mut rows = vec![0u128; beta as usize];
    let mut power = 1u64; // x^c
    for c in 0..d {
        for s in 0..m {
            let prod = gf::mul_mod(1 << s, power, m, poly);
            for (r, row) in rows.iter_mut().enumerate() {
                if prod >> r & 1 == 1 {
                    *row |= 1u128 << (c * m + s);
                }
            }
        }
        power = gf::mul_mod(power, x, m, poly);
    }
    rows
}

/// Per-node coin events in linear form: node `k` is marked iff the top
/// `j_k` hash output bits of its input vanish.
#[derive(Debug, Clone)]
pub struct LinearCoins {
    params: FamilyParams,
    rows: Vec<Vec<u128>>,
}

impl LinearCoins {
    pub fn new(params: FamilyParams, coins: &[(u64, u32)]) -> Result<Self, HashError> {
        let mut rows = Vec::with_capacity(coins.len());
        for &(x, j) in coins {
            params.check_input(x)?;
            params.check_exponent(j)?;
            let out = output_rows(&params, x);
            rows.push(out[(params.beta - j) as usize..].to_vec());
        }
        Ok(LinearCoins { params, rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Consistent seeds under which every listed node's coin is 1.
    pub fn count_all(&self, assignment: &SeedAssignment, nodes: &[usize]) -> Count {
        debug_assert_eq!(assignment.params(), &self.params);
        let eqs = nodes
            .iter()
            .flat_map(|&k| self.rows[k].iter())
            .map(|&mask| Equation { mask, rhs: false });
        let exp = count_exponent(self.params.t, assignment.prefix(), assignment.len(), eqs);
        Count::from_exponent(exp, assignment.free_bits())
    }

    /// Count exponent only (`None` = no seed), avoiding big integers.
    pub fn count_all_exponent(&self, assignment: &SeedAssignment, nodes: &[usize]) -> Option<u32> {
        let eqs = nodes
            .iter()
            .flat_map(|&k| self.rows[k].iter())
            .map(|&mask| Equation { mask, rhs: false });
        count_exponent(self.params.t, assignment.prefix(), assignment.len(), eqs)
    }
}

/// Memoized coin bits for every seed of a family and a fixed list of
/// `(input, exponent)` coins.
#[derive(Debug, Clone)]
pub struct CoinMatrix {
    nodes: usize,
    words_per_seed: usize,
    bits: Vec<u64>,
}

impl CoinMatrix {
    /// `None` when `2^t · n` exceeds `cap_bits`.
    pub fn build(
        params: &FamilyParams,
        coins: &[(u64, u32)],
        cap_bits: u64,
    ) -> Result<Option<Self>, HashError> {
        for &(x, j) in coins {
            params.check_input(x)?;
            params.check_exponent(j)?;
        }
        let n = coins.len().max(1) as u64;
        if params.t >= 63 || (1u64 << params.t).saturating_mul(n) > cap_bits {
            return Ok(None);
        }
        let words = coins.len().div_ceil(64).max(1);
        let seeds = 1usize << params.t;
        let mut bits = vec![0u64; seeds * words];
        let hasher = Hasher::new(*params);
        for s in 0..seeds {
            for (k, &(x, j)) in coins.iter().enumerate() {
                if hasher.coin(s as u128, x, j) {
                    bits[s * words + k / 64] |= 1 << (k % 64);
                }
            }
        }
        Ok(Some(CoinMatrix {
            nodes: coins.len(),
            words_per_seed: words,
            bits,
        }))
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    #[inline]
    pub fn get(&self, seed: u128, k: usize) -> bool {
        self.bits[seed as usize * self.words_per_seed + k / 64] >> (k % 64) & 1 == 1
    }
}

/// Coin bits for enumeration: cached when affordable, else recomputed.
#[derive(Debug, Clone)]
pub enum CoinSource {
    Cached(CoinMatrix),
    Direct {
        hasher: Hasher,
        coins: Vec<(u64, u32)>,
    },
}

impl CoinSource {
    pub fn new(params: &FamilyParams, coins: &[(u64, u32)], cap_bits: u64) -> Result<Self, HashError> {
        Ok(match CoinMatrix::build(params, coins, cap_bits)? {
            Some(m) => CoinSource::Cached(m),
            None => CoinSource::Direct {
                hasher: Hasher::new(*params),
                coins: coins.to_vec(),
            },
        })
    }

    #[inline]
    pub fn coin(&self, seed: u128, k: usize) -> bool {
        match self {
            CoinSource::Cached(m) => m.get(seed, k),
            CoinSource::Direct { hasher, coins } => {
                let (x, j) = coins[k];
                hasher.coin(seed, x, j)
            }
        }
    }

    pub fn is_cached(&self) -> bool {
        matches!(self, CoinSource::Cached(_))
    }
}

/// The fraction `num / 2^free` as a rational.
pub fn exponent_ratio(exp: Option<u32>, free: u32) -> BigRational {
    match exp {
        None => BigRational::zero(),
        Some(e) => BigRational::new(pow2_big(e).into(), pow2_big(free).into()),
    }
}

/// Convenience: probability that the coin of `x` is 1 given the prefix.
pub fn coin_probability(assignment: &SeedAssignment, x: u64, j: u32) -> Result<BigRational, HashError> {
    let lc = LinearCoins::new(*assignment.params(), &[(x, j)])?;
    Ok(lc.count_all(assignment, &[0]).probability())
}

impl Default for Count {
    fn default() -> Self {
        Count {
            numerator: BigUint::zero(),
            free: 0,
        }
    }
}

impl Count {
    pub fn is_certain(&self) -> bool {
        self.numerator == self.denominator()
    }

    pub fn is_one(&self) -> bool {
        self.numerator.is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(g: u32, b: u32, d: u32) -> FamilyParams {
        FamilyParams::new(g, b, d).unwrap()
    }

    #[test]
    fn params_layout() {
        let f = p(3, 5, 2);
        assert_eq!((f.m, f.t), (5, 10));
        assert!(FamilyParams::new(0, 1, 1).is_err());
        assert!(FamilyParams::new(33, 1, 1).is_err());
        assert!(FamilyParams::new(32, 32, 5).is_err());
        assert!(FamilyParams::new(32, 32, 4).is_ok());
    }

    #[test]
    fn zero_seed_and_constant_polynomial() {
        let f = p(3, 3, 2);
        for x in 0..8 {
            assert_eq!(eval_hash(&f, 0, x).unwrap(), 0);
        }
        let c = p(3, 2, 1);
        for x in 0..8 {
            assert_eq!(eval_hash(&c, 0b110, x).unwrap(), 0b10);
        }
        assert!(eval_hash(&f, 1 << 6, 0).is_err());
        assert!(eval_hash(&f, 0, 8).is_err());
    }

    #[test]
    fn coin_threshold() {
        // β=2, d=1: the hash value is the low two bits of the seed
        let f = p(2, 2, 1);
        assert!(!coin(&f, 3, 0, 1).unwrap());
        assert!(coin(&f, 1, 0, 1).unwrap());
        assert!(coin(&f, 0, 0, 2).unwrap());
        assert!(!coin(&f, 1, 0, 2).unwrap());
        assert!(coin(&f, 0, 0, 3).is_err());
        assert!(coin(&f, 0, 0, 0).is_err());
    }

    #[test]
    fn unconditioned_quarter_coin_count() {
        let f = p(2, 2, 2);
        let a = SeedAssignment::new(f);
        let h = Hasher::new(f);
        let c = conditional_count(&a, DEFAULT_T_MAX, |s| h.coin(s, 1, 2)).unwrap();
        assert_eq!(c.numerator, BigUint::from(4u32));
        assert_eq!(c.denominator(), BigUint::from(16u32));
    }

    #[test]
    fn fixed_and_trivial_counts() {
        let f = p(2, 2, 2);
        let full = SeedAssignment::complete(f, 0b1011).unwrap();
        let c = conditional_count(&full, 0, |s| s == 0b1011).unwrap();
        assert_eq!((c.numerator.clone(), c.denominator()), (BigUint::one(), BigUint::one()));
        let half = SeedAssignment::with_prefix(f, 0b01, 2).unwrap();
        let c = conditional_count(&half, DEFAULT_T_MAX, |_| true).unwrap();
        assert!(c.is_certain());
        assert_eq!(c.numerator, BigUint::from(4u32));
        assert_eq!(
            conditional_count(&SeedAssignment::new(p(8, 8, 4)), 26, |_| true),
            Err(HashError::Budget { free: 32, t_max: 26 })
        );
    }

    #[test]
    fn output_rows_reproduce_evaluation() {
        for (g, b, d) in [(3, 3, 2), (4, 2, 3), (5, 7, 2), (2, 2, 1)] {
            let f = p(g, b, d);
            let h = Hasher::new(f);
            for x in 0..1u64 << g {
                let rows = output_rows(&f, x);
                for seed in (0..1u128 << f.t).step_by(7) {
                    let lin = rows
                        .iter()
                        .enumerate()
                        .fold(0u64, |acc, (r, row)| acc | (((seed & row).count_ones() as u64 & 1) << r));
                    assert_eq!(lin, h.eval(seed, x));
                }
            }
        }
    }

    #[test]
    fn hex_round_trip() {
        let f = p(4, 4, 3);
        let a = SeedAssignment::with_prefix(f, 0xABC, 11).unwrap();
        let s = a.to_hex();
        assert_eq!(s, "11:2bc");
        assert_eq!(SeedAssignment::from_hex(f, &s).unwrap(), a);
        assert!(SeedAssignment::from_hex(f, "3:f").is_err());
        assert!(SeedAssignment::from_hex(f, "nope").is_err());
    }

    #[test]
    fn block_extension_is_low_bit_first() {
        let f = p(4, 4, 2);
        let a = SeedAssignment::new(f).extend(true).extend_block(0b10, 2);
        assert_eq!((a.prefix(), a.len()), (0b101, 3));
        let tail = SeedAssignment::with_prefix(f, 0, 7).unwrap().extend_block(0b111, 3);
        assert_eq!(tail.len(), 8);
        assert!(tail.is_complete());
    }

    #[test]
    fn coin_matrix_agrees_with_direct() {
        let f = p(3, 3, 2);
        let coins = [(0, 1), (3, 2), (5, 3), (7, 1)];
        let cached = CoinSource::new(&f, &coins, DEFAULT_MATRIX_CAP_BITS).unwrap();
        let direct = CoinSource::new(&f, &coins, 1).unwrap();
        assert!(cached.is_cached() && !direct.is_cached());
        for s in 0..1u128 << f.t {
            for k in 0..coins.len() {
                assert_eq!(cached.coin(s, k), direct.coin(s, k));
            }
        }
    }
}
