//! `Ψ = X_A + Σ_v X_v` conditioned on a seed prefix.
//!
//! `X_A`: at least `threshold` clusters survive. `X_v`: `v`'s own cluster
//! dies and the first `T + 1` entries of its list would be walked, i.e. the
//! first `T` clusters of `L` all die, where `T` is the largest addition
//! count allowed. Both are evaluated exactly by walking the consistent
//! seeds, with exact zero shortcuts when no seed can trigger an event.
//!
//! Ties on Ψ are broken by the expected edge cost of the iteration: each
//! processed node's walk length plus, for every clustered node, the sampled
//! clusters in its list (edges it may still add later). The cost is
//! averaged over all completions of the prefix when at most
//! [`TIE_BREAK_SAMPLES`] exist, and over a fixed pseudo-random set of
//! completions otherwise.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::derand::{DerandError, Direction, Estimator};
use crate::graph::NodeId;
use crate::hashfam::{for_each_consistent, CoinSource, FamilyParams, SeedAssignment, DEFAULT_MATRIX_CAP_BITS};
use crate::num::{int, pow2_big};

/// One node's bad-event-B pattern in cluster indices.
#[derive(Debug, Clone, PartialEq, Eq)]
struct NodeEvent {
    node: NodeId,
    own: usize,
    /// First `T` clusters of the node's list.
    prefix: Vec<usize>,
}

/// Completions averaged per tie-break evaluation.
pub const TIE_BREAK_SAMPLES: usize = 64;

/// Clustered node's own cluster and full list, in cluster indices.
#[derive(Debug, Clone, PartialEq, Eq)]
struct NodeList {
    own: usize,
    list: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SpannerEstimator {
    params: FamilyParams,
    coins: CoinSource,
    trivial: bool,
    clusters: usize,
    /// Least number of survivors that is bad; `None` when unreachable.
    threshold: Option<usize>,
    events: Vec<NodeEvent>,
    lists: Vec<NodeList>,
    completions: Vec<u128>,
    t_max: u32,
}

impl SpannerEstimator {
    /// `lists[v] = (own cluster, cluster IDs of L in walk order)`;
    /// `max_additions` is `T = ⌊t_edges⌋`.
    pub fn new(
        params: FamilyParams,
        j: u32,
        clusters: &[NodeId],
        threshold: u64,
        lists: &[(Option<NodeId>, Vec<NodeId>)],
        max_additions: u64,
        t_max: u32,
    ) -> Result<Self, DerandError> {
        let index = |c: NodeId| {
            clusters
                .binary_search(&c)
                .map_err(|_| DerandError::Estimator(format!("cluster {c} is not active")))
        };
        let threshold = (threshold <= clusters.len() as u64).then_some(threshold as usize);
        let mut events = Vec::new();
        let mut full = Vec::new();
        for (v, (own, list)) in lists.iter().enumerate() {
            let Some(own) = own else { continue };
            full.push(NodeList {
                own: index(*own)?,
                list: list.iter().map(|&c| index(c)).collect::<Result<_, _>>()?,
            });
            if list.len() as u64 <= max_additions {
                continue;
            }
            let prefix = list[..max_additions as usize]
                .iter()
                .map(|&c| index(c))
                .collect::<Result<_, _>>()?;
            events.push(NodeEvent {
                node: v,
                own: index(*own)?,
                prefix,
            });
        }
        let inputs: Vec<(u64, u32)> = clusters.iter().map(|&c| (c as u64, j)).collect();
        let trivial = threshold.is_none() && events.is_empty();
        // the tie-break alone evaluates few seeds, so skip the coin table
        let cap = if trivial { 0 } else { DEFAULT_MATRIX_CAP_BITS };
        let coins = CoinSource::new(&params, &inputs, cap)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let completions = (0..TIE_BREAK_SAMPLES).map(|_| rng.gen()).collect();
        Ok(SpannerEstimator {
            params,
            coins,
            trivial,
            clusters: clusters.len(),
            threshold,
            events,
            lists: full,
            completions,
            t_max,
        })
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    /// Nodes whose `X_v` is not identically zero.
    pub fn live_nodes(&self) -> Vec<NodeId> {
        self.events.iter().map(|e| e.node).collect()
    }

    /// True when both shortcuts apply and Ψ is identically zero.
    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    /// Bad indicators (`X_A + Σ X_v`) under a complete seed.
    pub fn indicator_sum(&self, seed: u128) -> u64 {
        if self.trivial {
            return 0;
        }
        let coins = &self.coins;
        let mut total = 0;
        if let Some(thr) = self.threshold {
            let survivors = (0..self.clusters).filter(|&c| coins.coin(seed, c)).count();
            total += u64::from(survivors >= thr);
        }
        for e in &self.events {
            let dies = |c: usize| !coins.coin(seed, c);
            if dies(e.own) && e.prefix.iter().all(|&c| dies(c)) {
                total += 1;
            }
        }
        total
    }

    /// Edges the iteration adds under `seed` plus sampled clusters left in
    /// every clustered node's list.
    pub fn edge_cost(&self, seed: u128) -> u64 {
        let sampled: Vec<bool> = (0..self.clusters).map(|c| self.coins.coin(seed, c)).collect();
        let mut cost = 0;
        for node in &self.lists {
            if !sampled[node.own] {
                let stop = node.list.iter().position(|&c| sampled[c]);
                cost += stop.map_or(node.list.len(), |p| p + 1) as u64;
            }
            cost += node.list.iter().filter(|&&c| sampled[c]).count() as u64;
        }
        cost
    }

    /// Complete seeds the tie-break averages over for prefix `a`.
    fn tie_break_seeds(&self, a: &SeedAssignment) -> Vec<u128> {
        let free = a.free_bits();
        if free < 128 && 1u128 << free <= TIE_BREAK_SAMPLES as u128 {
            return a.consistent_seeds().collect();
        }
        let mask = if free >= 128 { u128::MAX } else { (1u128 << free) - 1 };
        self.completions
            .iter()
            .map(|&r| a.prefix() | (r & mask) << a.len())
            .collect()
    }

    /// Indicator totals over consistent seeds, bucketed by the next `z` bits.
    fn bucket_totals(&self, a: &SeedAssignment, z: u32) -> Result<Vec<u64>, DerandError> {
        let width = 1usize << z;
        let mut totals = vec![0u64; width];
        if self.is_trivial() {
            return Ok(totals);
        }
        let shift = a.len();
        let mask = (width - 1) as u128;
        for_each_consistent(a, self.t_max, |s| {
            totals[(s >> shift & mask) as usize] += self.indicator_sum(s);
        })?;
        Ok(totals)
    }
}

fn as_ratio(total: u64, free: u32) -> BigRational {
    if total == 0 {
        return BigRational::zero();
    }
    BigRational::new(BigUint::from(total).into(), pow2_big(free).into())
}

impl Estimator for SpannerEstimator {
    fn direction(&self) -> Direction {
        Direction::Minimize
    }

    fn threshold(&self) -> Option<BigRational> {
        Some(int(1))
    }

    fn value(&mut self, a: &SeedAssignment) -> Result<BigRational, DerandError> {
        let totals = self.bucket_totals(a, 0)?;
        Ok(as_ratio(totals[0], a.free_bits()))
    }

    fn block_values(&mut self, a: &SeedAssignment, z: u32) -> Result<Vec<BigRational>, DerandError> {
        let z = z.min(a.free_bits());
        let totals = self.bucket_totals(a, z)?;
        let free = a.free_bits() - z;
        Ok(totals.into_iter().map(|t| as_ratio(t, free)).collect())
    }

    fn secondary(&mut self, a: &SeedAssignment) -> Result<Option<BigRational>, DerandError> {
        let seeds = self.tie_break_seeds(a);
        let total: u64 = seeds.iter().map(|&s| self.edge_cost(s)).sum();
        Ok(Some(BigRational::new(
            BigUint::from(total).into(),
            BigUint::from(seeds.len()).into(),
        )))
    }
}
