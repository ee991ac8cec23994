//! Maximal independent set: the modified Ghaffari process with a randomized
//! clique variant and three deterministic variants that fix each phase's
//! pairwise-independent seed by conditional expectations.
//!
//! Per phase every undecided node `v` holds a marking probability
//! `p_t(v) = 2^{-j}` and an effective degree `d_t(v) = Σ p_t(u)` over its
//! undecided neighbors. Golden nodes (see [`classify_golden`]) feed the
//! age-weighted estimator in [`estimator`]; the engine in [`engine`] maps the
//! communication onto [`crate::sim`] primitives.

pub mod color;
pub mod engine;
pub mod estimator;

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::derand::DerandError;
use crate::graph::{GraphError, NodeId, NodeSet};
use crate::hashfam::HashError;
use crate::num::{pow2_neg, ratio};
use crate::sim::{RunMetrics, SimError};

pub use color::{color_via_mis, ColoringOutcome};
pub use engine::{det_mis_bounded_delta, det_mis_clique, det_mis_congest, rand_mis_clique};
pub use estimator::{GoldenTerm, MisEstimator};

/// Initial marking probability exponent: `p₀ = 1/4`.
pub const P0_EXP: u32 = 2;

/// Tunable constants. `c_prime` scales phase
/// budgets and is the only one that materially affects round counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MisConfig {
    pub c_prime: u32,
    pub c_edge: usize,
    pub c_delta: u64,
    pub c_age: u32,
    pub bandwidth_factor: usize,
    pub route_cost: u64,
}

impl Default for MisConfig {
    fn default() -> Self {
        MisConfig {
            c_prime: 50,
            c_edge: 4,
            c_delta: 1,
            c_age: 1,
            bandwidth_factor: 8,
            route_cost: 2,
        }
    }
}

#[derive(Debug, Error)]
pub enum MisError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("bound violation: {0}")]
    BoundViolation(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Derand(#[from] DerandError),
    #[error(transparent)]
    Hash(#[from] HashError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl MisError {
    pub fn is_parameter(&self) -> bool {
        matches!(self, MisError::Parameter(_))
    }

    pub fn is_bound_violation(&self) -> bool {
        matches!(self, MisError::BoundViolation(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Undecided,
    InMis,
    Removed,
}

/// Per-node execution state. `p = 2^{-j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeMisState {
    pub j: u32,
    pub d: BigRational,
    pub age: u32,
    pub status: Status,
}

impl Default for NodeMisState {
    fn default() -> Self {
        NodeMisState {
            j: P0_EXP,
            d: ratio(0, 1),
            age: 0,
            status: Status::Undecided,
        }
    }
}

impl NodeMisState {
    pub fn p(&self) -> BigRational {
        pow2_neg(self.j)
    }

    pub fn is_undecided(&self) -> bool {
        self.status == Status::Undecided
    }
}

/// The update rule: halve when `d ≥ 1/2`, otherwise double up to `1/4`.
/// Returns the new exponent; `beta` is the smallest representable `p`.
pub fn update_probability(j: u32, d: &BigRational, beta: u32) -> Result<u32, MisError> {
    if *d >= ratio(1, 2) {
        if j + 1 > beta {
            return Err(MisError::Parameter(format!(
                "marking probability would drop below 2^-{beta}"
            )));
        }
        Ok(j + 1)
    } else {
        Ok(j.saturating_sub(1).max(P0_EXP))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Golden {
    Type1,
    Type2,
    NotGolden,
}

/// Light nodes have effective degree below 1/4.
pub fn is_light(d: &BigRational) -> bool {
    *d < ratio(1, 4)
}

/// Type-1: `p = 1/4` and `d ≤ 1/2`. Type-2: `d > 1/4` with at least a tenth
/// of `d` contributed by light neighbors. Type-1 wins when both hold.
pub fn classify_golden(j: u32, d: &BigRational, light_contribution: &BigRational) -> Golden {
    if j == P0_EXP && *d <= ratio(1, 2) {
        Golden::Type1
    } else if *d > ratio(1, 4) && light_contribution * ratio(10, 1) >= *d {
        Golden::Type2
    } else {
        Golden::NotGolden
    }
}

/// Picks `W(v)` from light neighbors `(id, j)`: ascending ID until the
/// probability mass reaches 1/40; on overshooting 1/4 the last node alone.
pub fn select_w(light: &[(NodeId, u32)]) -> Result<Vec<NodeId>, MisError> {
    let mut sorted = light.to_vec();
    sorted.sort_unstable();
    let lo = ratio(1, 40);
    let hi = ratio(1, 4);
    let mut sum = ratio(0, 1);
    let mut picked = Vec::new();
    for (u, j) in sorted {
        sum += pow2_neg(j);
        picked.push(u);
        if sum >= lo {
            if sum > hi {
                return Ok(vec![u]);
            }
            return Ok(picked);
        }
    }
    Err(MisError::Invariant(format!(
        "light neighbors carry only {sum} < 1/40 of probability mass"
    )))
}

/// One phase's derandomization record.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseLog {
    pub phase: u32,
    pub undecided: usize,
    pub golden_type1: usize,
    pub golden_type2: usize,
    /// Unconditioned weighted estimator (`"p/q"`).
    pub estimator_initial: String,
    pub estimator_final: String,
    /// `α · Σ weights` over golden nodes (`"p/q"`).
    pub certified_floor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
    pub joined: usize,
    pub removed: usize,
    #[serde(skip)]
    pub initial_exact: BigRational,
    #[serde(skip)]
    pub floor_exact: BigRational,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct MisReport {
    pub phase_budget: u32,
    pub phases_run: u32,
    pub beta: u32,
    pub seed_bits: u32,
    /// Residual edges handed to the leader, when a clique finish ran.
    pub residual_edges_at_handoff: Option<usize>,
    pub undecided_at_handoff: Option<usize>,
    pub phases: Vec<PhaseLog>,
}

#[derive(Debug, Clone)]
pub struct MisOutcome {
    pub set: NodeSet,
    pub metrics: RunMetrics,
    pub report: MisReport,
}

/// Phase budget for the clique variants: `c′ · max(1, ⌈log₂ Δ⌉)`.
pub fn clique_phase_budget(cfg: &MisConfig, max_degree: usize) -> u32 {
    cfg.c_prime * crate::num::ceil_log2(max_degree as u64).max(1)
}

/// Phase budget for CONGEST: `c′ · max(1, ⌈log₂ n⌉)`.
pub fn congest_phase_budget(cfg: &MisConfig, n: usize) -> u32 {
    cfg.c_prime * crate::num::ceil_log2(n as u64).max(1)
}

/// Output bit length `β = min(⌈c′·max(1, log₂ Δ)⌉ + 2, 32)`.
pub fn hash_beta(cfg: &MisConfig, max_degree: usize) -> u32 {
    let log = (max_degree.max(1) as f64).log2().max(1.0);
    let raw = (cfg.c_prime as f64 * log).ceil() as u64 + 2;
    raw.min(crate::hashfam::gf::MAX_M as u64) as u32
}

/// Input bit length `γ = max(1, ⌈log₂ n⌉)`.
pub fn hash_gamma(n: usize) -> u32 {
    crate::num::ceil_log2(n as u64).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn update_rule() {
        assert_eq!(update_probability(2, &ratio(3, 5), 32).unwrap(), 3);
        assert_eq!(update_probability(3, &ratio(3, 10), 32).unwrap(), 2);
        assert_eq!(update_probability(2, &ratio(1, 10), 32).unwrap(), 2);
        assert_eq!(update_probability(5, &ratio(1, 2), 32).unwrap(), 6);
        assert!(update_probability(32, &ratio(1, 1), 32).unwrap_err().is_parameter());
    }

    #[test]
    fn golden_classes() {
        let z = ratio(0, 1);
        assert_eq!(classify_golden(2, &ratio(2, 5), &z), Golden::Type1);
        assert_eq!(classify_golden(3, &ratio(1, 2), &ratio(6, 100)), Golden::Type2);
        assert_eq!(classify_golden(3, &ratio(1, 5), &z), Golden::NotGolden);
        assert_eq!(classify_golden(3, &ratio(1, 2), &ratio(4, 100)), Golden::NotGolden);
        // both conditions hold: type-1 wins
        assert_eq!(classify_golden(2, &ratio(1, 2), &ratio(1, 2)), Golden::Type1);
    }

    #[test]
    fn w_selection() {
        assert_eq!(select_w(&[(4, 3), (2, 3), (9, 3)]).unwrap(), vec![2]);
        assert_eq!(select_w(&[(1, 6), (2, 6), (3, 6)]).unwrap(), vec![1, 2]);
        assert_eq!(select_w(&[(1, 7), (2, 2)]).unwrap(), vec![2]);
        assert!(select_w(&[(1, 7)]).is_err());
    }

    #[test]
    fn w_selection_always_in_window() {
        let lo = ratio(1, 40);
        let hi = ratio(1, 4);
        for mask in 0u32..4096 {
            let light: Vec<_> = (0..4).map(|i| (i as usize, 2 + (mask >> (3 * i) & 7))).collect();
            let total: BigRational = light.iter().map(|&(_, j)| pow2_neg(j)).sum();
            if total < lo {
                continue;
            }
            let w = select_w(&light).unwrap();
            let s: BigRational = w.iter().map(|&u| pow2_neg(light[u].1)).sum();
            assert!(s >= lo && s <= hi, "{light:?} -> {w:?}");
        }
    }

    #[test]
    fn parameters() {
        let cfg = MisConfig::default();
        assert_eq!(hash_beta(&cfg, 3), 32);
        assert_eq!(hash_gamma(1), 1);
        assert_eq!(hash_gamma(64), 6);
        assert_eq!(clique_phase_budget(&cfg, 0), 50);
        assert_eq!(clique_phase_budget(&cfg, 5), 150);
        let small = MisConfig {
            c_prime: 1,
            ..MisConfig::default()
        };
        assert_eq!(hash_beta(&small, 4), 4);
    }
}
