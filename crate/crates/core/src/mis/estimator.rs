//! The age-weighted pessimistic estimator for one MIS phase.
//!
//! For a seed prefix `Y` with `f` free bits, let `m(v)` count consistent seeds
//! marking `v` and `m(v,u)` those marking both. Per golden node:
//!
//! * type-1: `χ(v) = m(v) − Σ_{u∈N(v)} m(v,u)`
//! * type-2: `χ(v) = Σ_{u∈W(v)} [m(u) − Σ_{w∈N(u)} m(u,w) − Σ_{w∈W(v)∖u} m(u,w)]`
//!
//! and the estimator is `Σ_v (160/159)^{age(v)} · χ(v) / 2^f`. Each `χ(v)/2^f`
//! lower-bounds the probability that `v` leaves the graph, and the counts
//! are exact, so the averaging law holds by construction.
//!
//! Undecided non-golden nodes with `d < 1/2` form the fallback set. Their
//! unweighted type-1 terms are the secondary key, consulted only when golden
//! values tie; without it a phase with no golden node picks the all-zero seed,
//! which marks every node.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::derand::{DerandError, Direction, Estimator};
use crate::hashfam::{FamilyParams, LinearCoins, SeedAssignment};
use crate::num::{pow2_big, pow_ratio, ratio};

/// Removal probability each golden node is guaranteed under pairwise
/// independence.
pub fn alpha() -> BigRational {
    ratio(1, 160)
}

/// Age weight base `1/(1−α) = 160/159`.
pub fn weight_base() -> BigRational {
    ratio(160, 159)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoldenKind {
    Type1,
    Type2 { w: Vec<usize> },
}

/// A golden node in local index space, with its age before this phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenTerm {
    pub node: usize,
    pub kind: GoldenKind,
    pub age: u32,
}

/// Per-evaluation output, kept for round accounting.
#[derive(Debug, Clone)]
pub struct EvalRecord {
    pub free: u32,
    /// `χ` numerators, aligned with the golden list.
    pub chi: Vec<i128>,
    /// Type-1 numerators, aligned with the fallback list.
    pub fallback: Vec<i128>,
}

#[derive(Debug, Clone)]
pub struct MisEstimator {
    coins: LinearCoins,
    nbrs: Vec<Vec<usize>>,
    golden: Vec<GoldenTerm>,
    fallback: Vec<usize>,
    weights: Vec<BigRational>,
    records: Vec<EvalRecord>,
}

impl MisEstimator {
    /// `coins[k] = (ID, j)` and `nbrs[k]` (residual adjacency) in local
    /// indices.
    pub fn new(
        params: FamilyParams,
        coins: &[(u64, u32)],
        nbrs: Vec<Vec<usize>>,
        golden: Vec<GoldenTerm>,
        fallback: Vec<usize>,
    ) -> Result<Self, DerandError> {
        assert_eq!(coins.len(), nbrs.len());
        let coins = LinearCoins::new(params, coins)?;
        let max_age = golden.iter().map(|g| g.age).max().unwrap_or(0);
        let base = weight_base();
        let weights = (0..=max_age).map(|a| pow_ratio(&base, a)).collect();
        Ok(MisEstimator {
            coins,
            nbrs,
            golden,
            fallback,
            weights,
            records: Vec::new(),
        })
    }

    pub fn golden(&self) -> &[GoldenTerm] {
        &self.golden
    }

    pub fn fallback(&self) -> &[usize] {
        &self.fallback
    }

    pub fn weight(&self, age: u32) -> &BigRational {
        &self.weights[age as usize]
    }

    /// `Σ_v (160/159)^{age(v)}` over golden nodes.
    pub fn weight_sum(&self) -> BigRational {
        self.golden
            .iter()
            .fold(BigRational::zero(), |acc, g| acc + self.weight(g.age))
    }

    /// `α · Σ weights`: the floor the unconditioned value must reach.
    pub fn certified_floor(&self) -> BigRational {
        alpha() * self.weight_sum()
    }

    pub fn records(&self) -> &[EvalRecord] {
        &self.records
    }

    pub fn take_records(&mut self) -> Vec<EvalRecord> {
        std::mem::take(&mut self.records)
    }

    /// `χ` numerators over the shared denominator `2^free`.
    pub fn chi(&self, a: &SeedAssignment) -> Vec<i128> {
        self.terms(a, true).0
    }

    /// Fallback numerators over the shared denominator `2^free`.
    pub fn fallback_chi(&self, a: &SeedAssignment) -> Vec<i128> {
        self.terms(a, false).1
    }

    fn terms(&self, a: &SeedAssignment, with_golden: bool) -> (Vec<i128>, Vec<i128>) {
        let mut c = Counts {
            coins: &self.coins,
            a,
            singles: HashMap::new(),
            pairs: HashMap::new(),
        };
        let nbrs = &self.nbrs;
        let type1 = |c: &mut Counts, v: usize| -> i128 { c.single(v) - nbrs[v].iter().map(|&u| c.pair(v, u)).sum::<i128>() };
        let golden = if with_golden {
            self.golden
                .iter()
                .map(|g| match &g.kind {
                    GoldenKind::Type1 => type1(&mut c, g.node),
                    GoldenKind::Type2 { w } => w
                        .iter()
                        .map(|&u| {
                            let ws: i128 = w.iter().filter(|&&x| x != u).map(|&x| c.pair(u, x)).sum();
                            type1(&mut c, u) - ws
                        })
                        .sum(),
                })
                .collect()
        } else {
            Vec::new()
        };
        let fallback = self.fallback.iter().map(|&v| type1(&mut c, v)).collect();
        (golden, fallback)
    }

    /// `Σ_v weight(v) · χ(v) / 2^free`.
    pub fn weighted(&self, free: u32, chi: &[i128]) -> BigRational {
        let mut by_age: Vec<BigInt> = vec![BigInt::zero(); self.weights.len()];
        for (g, &c) in self.golden.iter().zip(chi) {
            by_age[g.age as usize] += BigInt::from(c);
        }
        let mut total = BigRational::zero();
        for (w, s) in self.weights.iter().zip(by_age) {
            if !s.is_zero() {
                total += w * BigRational::from_integer(s);
            }
        }
        total / BigRational::from_integer(pow2_big(free).into())
    }

    /// `Σ χ / 2^free` over fallback nodes.
    pub fn fallback_sum(free: u32, chi: &[i128]) -> BigRational {
        BigRational::new(chi.iter().map(|&c| BigInt::from(c)).sum(), pow2_big(free).into())
    }

    /// Weighted contribution of one golden node.
    pub fn node_value(&self, g: usize, free: u32, chi: i128) -> BigRational {
        self.weight(self.golden[g].age) * BigRational::new(chi.into(), pow2_big(free).into())
    }
}

/// Consistent-seed counts memoized within one evaluation.
struct Counts<'a> {
    coins: &'a LinearCoins,
    a: &'a SeedAssignment,
    singles: HashMap<usize, i128>,
    pairs: HashMap<(usize, usize), i128>,
}

impl Counts<'_> {
    fn single(&mut self, k: usize) -> i128 {
        let (coins, a) = (self.coins, self.a);
        *self
            .singles
            .entry(k)
            .or_insert_with(|| coins.count_all_exponent(a, &[k]).map_or(0, |e| 1i128 << e))
    }

    fn pair(&mut self, x: usize, y: usize) -> i128 {
        let key = (x.min(y), x.max(y));
        let (coins, a) = (self.coins, self.a);
        *self
            .pairs
            .entry(key)
            .or_insert_with(|| coins.count_all_exponent(a, &[key.0, key.1]).map_or(0, |e| 1i128 << e))
    }
}

impl Estimator for MisEstimator {
    fn direction(&self) -> Direction {
        Direction::Maximize
    }

    fn value(&mut self, a: &SeedAssignment) -> Result<BigRational, DerandError> {
        let (chi, fallback) = self.terms(a, true);
        let v = self.weighted(a.free_bits(), &chi);
        self.records.push(EvalRecord {
            free: a.free_bits(),
            chi,
            fallback,
        });
        Ok(v)
    }

    fn secondary(&mut self, a: &SeedAssignment) -> Result<Option<BigRational>, DerandError> {
        if self.fallback.is_empty() {
            return Ok(None);
        }
        Ok(Some(Self::fallback_sum(a.free_bits(), &self.fallback_chi(a))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derand::averaging_law_holds;

    fn params() -> FamilyParams {
        FamilyParams::new(3, 3, 2).unwrap()
    }

    #[test]
    fn isolated_type1_is_coin_probability() {
        let mut est = MisEstimator::new(
            params(),
            &[(5, 2)],
            vec![vec![]],
            vec![GoldenTerm {
                node: 0,
                kind: GoldenKind::Type1,
                age: 0,
            }],
            vec![],
        )
        .unwrap();
        let a = SeedAssignment::new(params());
        assert_eq!(est.value(&a).unwrap(), ratio(1, 4));
        let expected = crate::hashfam::coin_probability(&a.extend(true), 5, 2).unwrap();
        assert_eq!(est.value(&a.extend(true)).unwrap(), expected);
    }

    #[test]
    fn averaging_law_on_a_path() {
        let coins = [(0, 2), (1, 3), (2, 2), (3, 3)];
        let nbrs = vec![vec![1], vec![0, 2], vec![1, 3], vec![2]];
        let golden = vec![
            GoldenTerm {
                node: 0,
                kind: GoldenKind::Type1,
                age: 2,
            },
            GoldenTerm {
                node: 1,
                kind: GoldenKind::Type2 { w: vec![0, 2] },
                age: 0,
            },
        ];
        let mut est = MisEstimator::new(params(), &coins, nbrs, golden, vec![2, 3]).unwrap();
        let mut a = SeedAssignment::new(params());
        for bit in [true, false, true, true, false] {
            assert!(averaging_law_holds(&mut est, &a, 1).unwrap());
            assert!(averaging_law_holds(&mut est, &a, 2).unwrap());
            a = a.extend(bit);
        }
    }

    #[test]
    fn fallback_breaks_all_zero_stall() {
        // K4 with no golden node: the key must avoid seeds marking everyone
        let coins: Vec<_> = (0..4).map(|v| (v, 2)).collect();
        let nbrs: Vec<Vec<usize>> = (0..4).map(|v| (0..4).filter(|&u| u != v).collect()).collect();
        let mut est = MisEstimator::new(params(), &coins, nbrs, vec![], vec![0, 1, 2, 3]).unwrap();
        let run = crate::derand::run_to_completion(&mut est, &params(), crate::derand::Schedule::Bitwise, 8, |_| Ok(()))
            .unwrap();
        let a = run.seed;
        let key = MisEstimator::fallback_sum(0, &est.fallback_chi(&a));
        assert!(key > ratio(0, 1));
        let init = est.fallback_chi(&SeedAssignment::new(params()));
        assert!(key >= MisEstimator::fallback_sum(params().t, &init));
    }
}
