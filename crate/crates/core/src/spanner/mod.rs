//! Baswana–Sen `(2k−1)`-spanners: the randomized construction and its
//! derandomization, which fixes each iteration's cluster-sampling seed so
//! that neither bad event happens.
//!
//! Bad event A: too many clusters survive an iteration. Bad event B: some
//! node adds more than `t_edges` edges in an iteration. The estimator
//! `Ψ = X_A + Σ_v X_v` (see [`estimator`]) is kept below 1, which rules both
//! out for the chosen seed.

pub mod estimator;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::derand::{run_to_completion, DerandError, Schedule};
use crate::graph::{Graph, GraphError, NodeId, SpannerEdges};
use crate::hashfam::{FamilyParams, HashError, Hasher, DEFAULT_T_MAX};
use crate::num::{ceil_decimal, ceil_log2, floor_log2, fmt_ratio, int, pow_ratio, ratio};
use crate::sim::{Bits, CostModel, Envelope, ModelKind, Network, RunMetrics, SimError};

pub use estimator::SpannerEstimator;

#[derive(Debug, Error)]
pub enum SpannerError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("iteration {iteration}: unconditioned Ψ = {psi} is not below 1; raise d")]
    Infeasible { iteration: u32, psi: String },
    #[error("bound violation: {0}")]
    BoundViolation(String),
    #[error(transparent)]
    Derand(DerandError),
    #[error(transparent)]
    Hash(#[from] HashError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl From<DerandError> for SpannerError {
    fn from(e: DerandError) -> Self {
        match e {
            DerandError::Hash(h) => SpannerError::Hash(h),
            DerandError::Sim(s) => SpannerError::Sim(s),
            other => SpannerError::Derand(other),
        }
    }
}

impl SpannerError {
    pub fn is_parameter(&self) -> bool {
        matches!(self, SpannerError::Parameter(_))
    }

    pub fn is_bound_violation(&self) -> bool {
        matches!(self, SpannerError::BoundViolation(_) | SpannerError::Infeasible { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpannerConfig {
    /// Independence override; defaults to `2⌈log₂ 2n⌉` clamped to the budget.
    pub d: Option<u32>,
    /// Enumeration budget in free seed bits.
    pub t_max: u32,
    /// Size constant; when set, `|H| ≤ c_size·k·n^{1+1/k}·log₂ n` is asserted.
    pub c_size: Option<f64>,
    pub bandwidth_factor: usize,
}

impl Default for SpannerConfig {
    fn default() -> Self {
        SpannerConfig {
            d: None,
            t_max: DEFAULT_T_MAX,
            c_size: None,
            bandwidth_factor: CostModel::DEFAULT_BANDWIDTH_FACTOR,
        }
    }
}

/// Per-run constants.
#[derive(Debug, Clone, PartialEq)]
pub struct SpannerConstants {
    pub n: usize,
    pub k: u32,
    /// Sampling probability `2^{-j}` with `j = ⌈log₂ n / k⌉` (at least 1).
    pub j: u32,
    pub gamma: u32,
    pub beta: u32,
    pub d: u32,
    /// `ξ = (13957/10000)·2·ln(2n)` with `ln` rounded up to four decimals.
    pub xi: BigRational,
    /// `t_edges = 2·n^{1/k}·log₂ n`.
    pub t_edges: f64,
}

impl SpannerConstants {
    pub fn new(n: usize, k: u32, cfg: &SpannerConfig) -> Result<Self, SpannerError> {
        if k == 0 {
            return Err(SpannerError::Parameter("k must be at least 1".into()));
        }
        if n == 0 {
            return Err(SpannerError::Parameter("graph has no nodes".into()));
        }
        let j = sampling_exponent(n, k);
        let gamma = ceil_log2(n as u64).max(1);
        let beta = j;
        let m = gamma.max(beta);
        let d = match cfg.d {
            Some(d) => d,
            None => {
                let wanted = 2 * ceil_log2(2 * n as u64);
                let fit = cfg.t_max / m;
                if fit == 0 {
                    return Err(SpannerError::Parameter(format!(
                        "t_max = {} cannot hold a single {m}-bit coefficient",
                        cfg.t_max
                    )));
                }
                wanted.min(fit)
            }
        };
        if d == 0 {
            return Err(SpannerError::Parameter("independence d must be at least 1".into()));
        }
        let ln = ceil_decimal((2.0 * n as f64).ln(), 4);
        let xi = ratio(13957, 10000) * int(2) * ln;
        let nf = n as f64;
        let t_edges = 2.0 * nf.powf(1.0 / k as f64) * nf.log2();
        Ok(SpannerConstants {
            n,
            k,
            j,
            gamma,
            beta,
            d,
            xi,
            t_edges,
        })
    }

    pub fn params(&self) -> Result<FamilyParams, SpannerError> {
        Ok(FamilyParams::new(self.gamma, self.beta, self.d)?)
    }

    /// `α_i = Π_{j=1}^{i} (1 + 1/(k−j))`; `α_0 = 1`. Defined for `i < k`.
    pub fn alpha(&self, i: u32) -> BigRational {
        (1..=i).fold(BigRational::one(), |acc, j| {
            acc * (BigRational::one() + ratio(1, i64::from(self.k - j)))
        })
    }

    /// Smallest integer `c` with `c ≥ ξ·α_i·n^{1−i/k}`, i.e. the least
    /// cluster count that triggers bad event A at iteration `i`.
    pub fn cluster_threshold(&self, i: u32) -> u64 {
        let k = self.k;
        let scale = &self.xi * self.alpha(i);
        let rhs = pow_ratio(&scale, k) * int(self.n as i64).pow((k - i) as i32);
        // c^k ≥ rhs, searched over integers
        let reaches = |c: u64| BigRational::from_integer(BigInt::from(c).pow(k)) >= rhs;
        let (mut lo, mut hi) = (0u64, 1u64);
        while !reaches(hi) {
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if reaches(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        if reaches(lo) {
            lo
        } else {
            hi
        }
    }

    /// Largest addition count that is not "more than `t_edges`".
    pub fn max_additions(&self) -> u64 {
        self.t_edges.floor() as u64
    }

    /// `k·n^{1+1/k}·log₂ n`, the size budget before its constant.
    pub fn size_budget(&self) -> f64 {
        let nf = self.n as f64;
        self.k as f64 * nf.powf(1.0 + 1.0 / self.k as f64) * nf.log2()
    }
}

/// `⌈log₂ n / k⌉`, at least 1, computed exactly as the least `j` with
/// `2^{jk} ≥ n`.
pub fn sampling_exponent(n: usize, k: u32) -> u32 {
    let bits = ceil_log2(n as u64);
    bits.div_ceil(k).max(1)
}

/// Clustering, residual edges and output for one construction.
#[derive(Debug, Clone)]
pub struct SpannerState<'g> {
    g: &'g Graph,
    pub iteration: u32,
    /// Cluster (leader ID) of every node, `None` once unclustered.
    pub cluster: Vec<Option<NodeId>>,
    /// Residual edges `E′` by edge index.
    pub residual: Vec<bool>,
    pub h: SpannerEdges,
}

impl<'g> SpannerState<'g> {
    pub fn new(g: &'g Graph) -> Self {
        SpannerState {
            g,
            iteration: 0,
            cluster: (0..g.n()).map(Some).collect(),
            residual: vec![true; g.m()],
            h: SpannerEdges::new(),
        }
    }

    /// Current cluster IDs, ascending.
    pub fn clusters(&self) -> Vec<NodeId> {
        let set: BTreeSet<NodeId> = self.cluster.iter().flatten().copied().collect();
        set.into_iter().collect()
    }

    /// `L` for node `v`: `(cluster, lightest residual edge)` ordered by
    /// `(weight, cluster ID)`; the lightest edge into a cluster is chosen by
    /// `(weight, neighbor ID)`.
    pub fn lightest_edges(&self, v: NodeId) -> Vec<(NodeId, usize)> {
        let mut best: BTreeMap<NodeId, usize> = BTreeMap::new();
        for &(u, ei) in self.g.incident(v) {
            if !self.residual[ei] {
                continue;
            }
            let Some(c) = self.cluster[u] else { continue };
            let better = match best.get(&c) {
                None => true,
                Some(&cur) => {
                    let (w, wc) = (&self.g.edge(ei).w, &self.g.edge(cur).w);
                    w < wc || (w == wc && u < other_end(self.g, cur, v))
                }
            };
            if better {
                best.insert(c, ei);
            }
        }
        let mut list: Vec<_> = best.into_iter().collect();
        list.sort_by(|a, b| self.g.edge(a.1).w.cmp(&self.g.edge(b.1).w).then(a.0.cmp(&b.0)));
        list
    }
}

fn other_end(g: &Graph, ei: usize, v: NodeId) -> NodeId {
    let e = g.edge(ei);
    if e.u == v {
        e.v
    } else {
        e.u
    }
}

/// `C_{i+1}`: clusters whose coin is 1, or nothing when `i = k−1`.
pub fn sample_clusters(clusters: &[NodeId], coins: &[bool], i: u32, k: u32) -> Vec<NodeId> {
    assert_eq!(clusters.len(), coins.len());
    if i + 1 >= k {
        return Vec::new();
    }
    clusters
        .iter()
        .zip(coins)
        .filter(|(_, &c)| c)
        .map(|(&id, _)| id)
        .collect()
}

/// Outcome of one Baswana–Sen iteration.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IterationEffect {
    /// Nodes that stopped being clustered and processed their list.
    pub processed: Vec<NodeId>,
    /// Edges each processed node added, aligned with `processed`.
    pub additions: Vec<u64>,
    pub edges_added: usize,
}

/// Runs one iteration against `C_i = next`. Every node whose cluster was
/// not sampled walks its list, adding edges and discarding `E′(v, C)`, and
/// stops at (and joins) the first sampled cluster. All lists are taken from
/// the state before the iteration.
pub fn bs_iteration(state: &mut SpannerState<'_>, next: &[NodeId]) -> Result<IterationEffect, SpannerError> {
    let g = state.g;
    let sampled: BTreeSet<NodeId> = next.iter().copied().collect();
    let mut effect = IterationEffect::default();
    let mut joins = Vec::new();
    let mut discards: Vec<(NodeId, NodeId)> = Vec::new();
    let before = state.h.len();
    for v in 0..g.n() {
        let Some(own) = state.cluster[v] else { continue };
        if sampled.contains(&own) {
            continue;
        }
        let mut added = 0u64;
        let mut joined = None;
        for (c, ei) in state.lightest_edges(v) {
            let e = g.edge(ei);
            state.h.insert(g, e.u, e.v)?;
            added += 1;
            discards.push((v, c));
            if sampled.contains(&c) {
                joined = Some(c);
                break;
            }
        }
        joins.push((v, joined));
        effect.processed.push(v);
        effect.additions.push(added);
    }
    // E′(v, C) against the clustering the lists were built from
    for (v, c) in discards {
        for &(u, ei) in g.incident(v) {
            if state.cluster[u] == Some(c) {
                state.residual[ei] = false;
            }
        }
    }
    for (v, c) in joins {
        state.cluster[v] = c;
    }
    state.iteration += 1;
    effect.edges_added = state.h.len() - before;
    Ok(effect)
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationLog {
    pub iteration: u32,
    pub clusters_before: usize,
    pub clusters_after: usize,
    /// Least cluster count that counts as bad event A (`None` at `i = k`).
    pub cluster_threshold: Option<u64>,
    pub processed: usize,
    pub max_additions: u64,
    pub edges_added: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_initial: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_final: Option<String>,
    /// Chosen Ψ value after every block step.
    pub psi_trace: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
    #[serde(skip)]
    pub psi_exact: Vec<BigRational>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpannerReport {
    pub k: u32,
    pub j: u32,
    pub d: u32,
    pub seed_bits: u32,
    pub block_bits: u32,
    pub xi: String,
    pub t_edges: f64,
    pub size_budget: f64,
    pub iterations: Vec<IterationLog>,
}

#[derive(Debug, Clone)]
pub struct SpannerOutcome {
    pub edges: SpannerEdges,
    pub metrics: RunMetrics,
    pub report: SpannerReport,
}

/// How an iteration's coins are produced.
enum Coins {
    Random(Box<ChaCha8Rng>),
    Derandomized,
}

struct Runner<'g> {
    g: &'g Graph,
    cfg: SpannerConfig,
    consts: SpannerConstants,
    net: Network<'g>,
    state: SpannerState<'g>,
    report: SpannerReport,
}

impl<'g> Runner<'g> {
    fn new(g: &'g Graph, k: u32, cfg: &SpannerConfig) -> Result<Self, SpannerError> {
        let consts = SpannerConstants::new(g.n(), k, cfg)?;
        let params = consts.params()?;
        let z = floor_log2(g.n() as u64).max(1).min(params.t);
        let model = CostModel::new(ModelKind::Clique, g.n(), cfg.bandwidth_factor);
        let report = SpannerReport {
            k,
            j: consts.j,
            d: consts.d,
            seed_bits: params.t,
            block_bits: z,
            xi: fmt_ratio(&consts.xi),
            t_edges: consts.t_edges,
            size_budget: consts.size_budget(),
            iterations: Vec::new(),
        };
        Ok(Runner {
            g,
            cfg: cfg.clone(),
            consts,
            net: Network::new(g, model),
            state: SpannerState::new(g),
            report,
        })
    }

    /// Each node tells its neighbors its cluster; leaders announce
    /// themselves to everyone.
    fn announce_clusters(&mut self, clusters: &[NodeId]) -> Result<(), SpannerError> {
        let id_bits = self.consts.gamma as usize + 1;
        let n = self.g.n();
        let msgs: Vec<_> = (0..n)
            .flat_map(|v| self.g.neighbors(v).map(move |u| Envelope::new(v, u, Bits(id_bits))))
            .collect();
        self.net.exchange(msgs)?;
        let msgs: Vec<_> = clusters
            .iter()
            .flat_map(|&c| (0..n).filter(move |&u| u != c).map(move |u| Envelope::new(c, u, Bits(id_bits))))
            .collect();
        self.net.exchange(msgs)?;
        Ok(())
    }

    fn run(mut self, mut coins: Coins) -> Result<SpannerOutcome, SpannerError> {
        let k = self.consts.k;
        for i in 1..=k {
            let clusters = self.state.clusters();
            self.announce_clusters(&clusters)?;
            let last = i == k;
            let threshold = (!last).then(|| self.consts.cluster_threshold(i));
            let mut log = IterationLog {
                iteration: i,
                clusters_before: clusters.len(),
                clusters_after: 0,
                cluster_threshold: threshold,
                processed: 0,
                max_additions: 0,
                edges_added: 0,
                psi_initial: None,
                psi_final: None,
                psi_trace: Vec::new(),
                seed: None,
                psi_exact: Vec::new(),
            };
            let flips: Vec<bool> = if last {
                vec![false; clusters.len()]
            } else {
                match &mut coins {
                    Coins::Random(rng) => {
                        let j = self.consts.j;
                        let flips = clusters.iter().map(|_| rng.gen::<u64>() >> (64 - j) == 0).collect();
                        self.broadcast_coins(&clusters)?;
                        flips
                    }
                    Coins::Derandomized => self.derandomize(i, &clusters, threshold.unwrap(), &mut log)?,
                }
            };
            let next = sample_clusters(&clusters, &flips, i - 1, k);
            let effect = bs_iteration(&mut self.state, &next)?;
            log.clusters_after = next.len();
            log.processed = effect.processed.len();
            log.max_additions = effect.additions.iter().copied().max().unwrap_or(0);
            log.edges_added = effect.edges_added;
            if matches!(coins, Coins::Derandomized) && !last {
                self.certify(&log)?;
            }
            self.report.iterations.push(log);
        }
        if let Some(c) = self.cfg.c_size {
            let limit = c * self.consts.size_budget();
            if self.state.h.len() as f64 > limit {
                return Err(SpannerError::BoundViolation(format!(
                    "spanner has {} edges, above {c}·k·n^(1+1/k)·log2 n = {limit:.1}",
                    self.state.h.len()
                )));
            }
        }
        Ok(SpannerOutcome {
            edges: self.state.h,
            metrics: self.net.into_metrics(),
            report: self.report,
        })
    }

    /// Leaders send their coin to every node.
    fn broadcast_coins(&mut self, clusters: &[NodeId]) -> Result<(), SpannerError> {
        let n = self.g.n();
        let msgs: Vec<_> = clusters
            .iter()
            .flat_map(|&c| (0..n).filter(move |&u| u != c).map(move |u| Envelope::new(c, u, true)))
            .collect();
        self.net.exchange(msgs)?;
        Ok(())
    }

    /// Both bad events must have been avoided.
    fn certify(&self, log: &IterationLog) -> Result<(), SpannerError> {
        let i = log.iteration;
        if let Some(thr) = log.cluster_threshold {
            if log.clusters_after as u64 >= thr {
                return Err(SpannerError::BoundViolation(format!(
                    "iteration {i}: {} clusters survive, threshold {thr}",
                    log.clusters_after
                )));
            }
        }
        if log.max_additions > self.consts.max_additions() {
            return Err(SpannerError::BoundViolation(format!(
                "iteration {i}: a node added {} edges, more than t = {:.3}",
                log.max_additions, self.consts.t_edges
            )));
        }
        Ok(())
    }

    fn derandomize(
        &mut self,
        i: u32,
        clusters: &[NodeId],
        threshold: u64,
        log: &mut IterationLog,
    ) -> Result<Vec<bool>, SpannerError> {
        let params = self.consts.params()?;
        let lists: Vec<(Option<NodeId>, Vec<NodeId>)> = (0..self.g.n())
            .map(|v| {
                let l = self.state.lightest_edges(v).into_iter().map(|(c, _)| c).collect();
                (self.state.cluster[v], l)
            })
            .collect();
        let mut est = SpannerEstimator::new(
            params,
            self.consts.j,
            clusters,
            threshold,
            &lists,
            self.consts.max_additions(),
            self.cfg.t_max,
        )?;
        let z = self.report.block_bits;
        let run = match run_to_completion(&mut est, &params, Schedule::Blockwise { z }, self.g.n().max(2), |_| Ok(())) {
            Ok(run) => run,
            Err(DerandError::Infeasible { step: 0, value, .. }) => {
                return Err(SpannerError::Infeasible { iteration: i, psi: value });
            }
            Err(DerandError::Infeasible { step, value, .. }) => {
                return Err(SpannerError::BoundViolation(format!(
                    "iteration {i}: Ψ reached {value} at block step {step}"
                )));
            }
            Err(e) => return Err(e.into()),
        };
        self.charge_blocks(&est, &run.trace)?;
        log.psi_initial = Some(fmt_ratio(&run.initial));
        log.psi_final = Some(fmt_ratio(&run.final_value));
        log.psi_exact.push(run.initial.clone());
        for entry in &run.trace {
            let v = entry.candidate_values[entry.chosen as usize].clone();
            log.psi_exact.push(crate::num::parse_ratio(&v).expect("engine formats ratios"));
            log.psi_trace.push(v);
        }
        log.seed = Some(run.seed.to_hex());
        let hasher = Hasher::new(params);
        let seed = run.seed_bits();
        Ok(clusters.iter().map(|&c| hasher.coin(seed, c as u64, self.consts.j)).collect())
    }

    /// Per block step: every node sends its conditional `Pr[X_v]` for value
    /// `τ` to node `τ`, evaluators send their sums to the leader, and the
    /// leader broadcasts the chosen block.
    fn charge_blocks(
        &mut self,
        est: &SpannerEstimator,
        trace: &[crate::derand::TraceEntry],
    ) -> Result<(), SpannerError> {
        let n = self.g.n();
        let leader = 0;
        let mut free = est.params().t;
        for entry in trace {
            let width = entry.candidate_values.len();
            let bits = width.trailing_zeros();
            free -= bits;
            let count_bits = free as usize + 1;
            // evaluator τ runs on node τ mod n
            let fan: Vec<_> = (0..n)
                .flat_map(|v| {
                    (0..width)
                        .filter(move |&tau| tau % n != v)
                        .map(move |tau| Envelope::new(v, tau % n, Bits(count_bits)))
                })
                .collect();
            self.net.exchange(fan)?;
            let sum_bits = count_bits + ceil_log2(n as u64 + 1) as usize;
            let sums: Vec<_> = (0..width)
                .filter(|&tau| tau % n != leader)
                .map(|tau| Envelope::new(tau % n, leader, Bits(sum_bits)))
                .collect();
            self.net.exchange(sums)?;
            self.net.broadcast_from_leader(leader, bits as usize)?;
        }
        Ok(())
    }
}

/// Baswana–Sen with independent coins of probability `2^{-j}`.
pub fn rand_spanner(g: &Graph, k: u32, rng_seed: u64, cfg: &SpannerConfig) -> Result<SpannerOutcome, SpannerError> {
    let runner = Runner::new(g, k, cfg)?;
    runner.run(Coins::Random(Box::new(ChaCha8Rng::seed_from_u64(rng_seed))))
}

/// Deterministic construction: each iteration's seed is fixed blockwise
/// (`z = ⌊log₂ n⌋`) minimizing Ψ, with Ψ < 1 checked at every step.
pub fn det_spanner(g: &Graph, k: u32, cfg: &SpannerConfig) -> Result<SpannerOutcome, SpannerError> {
    let runner = Runner::new(g, k, cfg)?;
    runner.run(Coins::Derandomized)
}

/// `Ψ` values as floats, for display.
pub fn psi_as_f64(log: &IterationLog) -> Vec<f64> {
    log.psi_exact.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect()
}

/// True when every Ψ value in the log is strictly below 1.
pub fn psi_below_one(log: &IterationLog) -> bool {
    log.psi_exact.iter().all(|r| *r < BigRational::one())
}
