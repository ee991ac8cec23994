//! Phase loop shared by all MIS variants, plus the leader-collection finish.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::estimator::{GoldenKind, GoldenTerm, MisEstimator};
use super::{
    classify_golden, clique_phase_budget, congest_phase_budget, hash_beta, hash_gamma, is_light,
    select_w, update_probability, Golden, MisConfig, MisError, MisOutcome, MisReport,
    NodeMisState, PhaseLog, Status,
};
use crate::derand::{run_to_completion, Schedule};
use crate::graph::{greedy_mis, Graph, NodeId, NodeSet};
use crate::hashfam::{FamilyParams, Hasher};
use crate::num::{ceil_log2, floor_log2, fmt_ratio, pow2_neg, ratio};
use crate::sim::{Bits, CostModel, Envelope, ModelKind, Network, RunMetrics, WireSize};

/// Largest exponent the randomized variant ever needs.
const RAND_MAX_EXP: u32 = 63;

enum Coordination {
    Random(Box<ChaCha8Rng>),
    /// One seed bit per step, values aggregated at the leader.
    Bitwise,
    /// `z` seed bits per step with one evaluator node per candidate.
    Blocks { z: u32 },
}

struct Runner<'g> {
    g: &'g Graph,
    cfg: MisConfig,
    net: Network<'g>,
    state: Vec<NodeMisState>,
    scope: Vec<NodeId>,
    leader: NodeId,
    gamma: u32,
    beta: u32,
    two_hop_collection: bool,
    report: MisReport,
}

impl<'g> Runner<'g> {
    fn new(g: &'g Graph, cfg: &MisConfig, kind: ModelKind, scope: Vec<NodeId>, beta: u32) -> Self {
        let model = CostModel::new(kind, g.n(), cfg.bandwidth_factor);
        let leader = scope.iter().copied().min().unwrap_or(0);
        Runner {
            g,
            cfg: cfg.clone(),
            net: Network::new(g, model).with_route_cost(cfg.route_cost),
            state: vec![NodeMisState::default(); g.n()],
            scope,
            leader,
            gamma: hash_gamma(g.n()),
            beta,
            two_hop_collection: false,
            report: MisReport {
                beta,
                ..MisReport::default()
            },
        }
    }

    fn kind(&self) -> ModelKind {
        self.net.model().kind
    }

    fn undecided(&self) -> Vec<NodeId> {
        self.scope
            .iter()
            .copied()
            .filter(|&v| self.state[v].is_undecided())
            .collect()
    }

    fn residual_neighbors(&self, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<_> = self
            .g
            .neighbors(v)
            .filter(|&u| self.state[u].is_undecided())
            .collect();
        out.sort_unstable();
        out
    }

    /// Each sender tells its undecided neighbors one value (everyone, in the
    /// broadcast clique).
    fn neighbor_round<T: WireSize + PartialEq + Clone>(
        &mut self,
        values: Vec<(NodeId, T)>,
    ) -> Result<(), MisError> {
        let n = self.g.n();
        let mut outbox = Vec::new();
        for (v, val) in values {
            if self.kind() == ModelKind::BroadcastClique {
                outbox.extend((0..n).filter(|&u| u != v).map(|u| Envelope::new(v, u, val.clone())));
            } else {
                for u in self.residual_neighbors(v) {
                    outbox.push(Envelope::new(v, u, val.clone()));
                }
            }
        }
        self.net.exchange(outbox)?;
        Ok(())
    }

    /// Direct messages to the leader (clique models only).
    fn send_to_leader<T: WireSize + PartialEq + Clone>(
        &mut self,
        values: Vec<(NodeId, T)>,
    ) -> Result<(), MisError> {
        let n = self.g.n();
        let leader = self.leader;
        let mut outbox = Vec::new();
        for (v, val) in values {
            if v == leader {
                continue;
            }
            if self.kind() == ModelKind::BroadcastClique {
                outbox.extend((0..n).filter(|&u| u != v).map(|u| Envelope::new(v, u, val.clone())));
            } else {
                outbox.push(Envelope::new(v, leader, val));
            }
        }
        self.net.exchange(outbox)?;
        Ok(())
    }

    /// Leader learns whether anyone is undecided and tells everyone.
    fn termination_check(&mut self) -> Result<(), MisError> {
        let flags: Vec<(NodeId, bool)> = self
            .scope
            .iter()
            .map(|&v| (v, self.state[v].is_undecided()))
            .collect();
        if self.kind() == ModelKind::Congest {
            let counts: Vec<_> = flags
                .iter()
                .map(|&(v, u)| (v, ratio(i64::from(u), 1)))
                .collect();
            self.net.convergecast_sum(self.leader, &counts)?;
        } else {
            self.send_to_leader(flags)?;
        }
        self.net.broadcast_from_leader(self.leader, 1)?;
        Ok(())
    }

    /// Every undecided node ships its residual edges to all nodes within two
    /// hops, through the routing oracle.
    fn collect_two_hop(&mut self, und: &[NodeId]) -> Result<(), MisError> {
        let payload_bits = 2 * self.gamma as usize + 6;
        let mut demands = Vec::new();
        for &v in und {
            let near = self.residual_neighbors(v);
            let mut ball: Vec<NodeId> = near.clone();
            for &u in &near {
                ball.extend(self.residual_neighbors(u));
            }
            ball.sort_unstable();
            ball.dedup();
            ball.retain(|&w| w != v);
            for _ in &near {
                for &w in &ball {
                    demands.push(Envelope::new(v, w, Bits(payload_bits)));
                }
            }
        }
        route_batched(&mut self.net, demands)?;
        Ok(())
    }

    fn run_phase(&mut self, coord: &mut Coordination, phase: u32) -> Result<(), MisError> {
        let und = self.undecided();
        let n = self.g.n();
        let mut local = vec![usize::MAX; n];
        for (k, &v) in und.iter().enumerate() {
            local[v] = k;
        }
        let nbrs: Vec<Vec<usize>> = und
            .iter()
            .map(|&v| self.residual_neighbors(v).into_iter().map(|u| local[u]).collect())
            .collect();

        let ids: Vec<_> = und.iter().map(|&v| (v, (v as u64, self.state[v].j))).collect();
        self.neighbor_round(ids)?;
        let d: Vec<BigRational> = nbrs
            .iter()
            .map(|ns| ns.iter().map(|&u| pow2_neg(self.state[und[u]].j)).sum())
            .collect();
        for (k, &v) in und.iter().enumerate() {
            self.state[v].d = d[k].clone();
        }
        let ds: Vec<_> = und.iter().zip(&d).map(|(&v, x)| (v, x.clone())).collect();
        self.neighbor_round(ds)?;

        let (marks, mut log) = match coord {
            Coordination::Random(rng) => {
                let marks = und
                    .iter()
                    .map(|&v| rng.gen::<u64>() >> (64 - self.state[v].j) == 0)
                    .collect();
                (marks, None)
            }
            Coordination::Bitwise => {
                let (m, l) = self.derandomize(&und, &nbrs, &d, Schedule::Bitwise, phase)?;
                (m, Some(l))
            }
            Coordination::Blocks { z } => {
                if self.two_hop_collection {
                    self.collect_two_hop(&und)?;
                }
                let (m, l) = self.derandomize(&und, &nbrs, &d, Schedule::Blockwise { z: *z }, phase)?;
                (m, Some(l))
            }
        };

        let mark_msgs: Vec<_> = und.iter().zip(&marks).map(|(&v, &m)| (v, m)).collect();
        self.neighbor_round(mark_msgs)?;
        let joined: Vec<usize> = (0..und.len())
            .filter(|&k| marks[k] && nbrs[k].iter().all(|&u| !marks[u]))
            .collect();
        let joins: Vec<_> = joined.iter().map(|&k| (und[k], true)).collect();
        self.neighbor_round(joins)?;

        let mut removed = 0;
        for &k in &joined {
            self.state[und[k]].status = Status::InMis;
        }
        for &k in &joined {
            for &u in &nbrs[k] {
                if self.state[und[u]].status == Status::Undecided {
                    self.state[und[u]].status = Status::Removed;
                    removed += 1;
                }
            }
        }
        let cap = match coord {
            Coordination::Random(_) => RAND_MAX_EXP,
            _ => self.beta,
        };
        for (k, &v) in und.iter().enumerate() {
            if self.state[v].is_undecided() {
                self.state[v].j = update_probability(self.state[v].j, &d[k], cap)?;
            }
        }
        if let Some(l) = log.as_mut() {
            l.joined = joined.len();
            l.removed = removed;
        }
        if let Some(l) = log {
            self.report.phases.push(l);
        }
        self.termination_check()
    }

    fn derandomize(
        &mut self,
        und: &[NodeId],
        nbrs: &[Vec<usize>],
        d: &[BigRational],
        schedule: Schedule,
        phase: u32,
    ) -> Result<(Vec<bool>, PhaseLog), MisError> {
        let light: Vec<bool> = d.iter().map(is_light).collect();
        let mut golden = Vec::new();
        let mut fallback = Vec::new();
        let (mut t1, mut t2) = (0, 0);
        for (k, &v) in und.iter().enumerate() {
            let st = &self.state[v];
            let light_nbrs: Vec<(NodeId, u32)> = nbrs[k]
                .iter()
                .filter(|&&u| light[u])
                .map(|&u| (und[u], self.state[und[u]].j))
                .collect();
            let contribution: BigRational = light_nbrs.iter().map(|&(_, j)| pow2_neg(j)).sum();
            let kind = match classify_golden(st.j, &d[k], &contribution) {
                Golden::Type1 => {
                    t1 += 1;
                    GoldenKind::Type1
                }
                Golden::Type2 => {
                    t2 += 1;
                    let w = select_w(&light_nbrs)?;
                    let w = w
                        .into_iter()
                        .map(|id| nbrs[k].iter().copied().find(|&u| und[u] == id).unwrap())
                        .collect();
                    GoldenKind::Type2 { w }
                }
                Golden::NotGolden => {
                    if d[k] < ratio(1, 2) {
                        fallback.push(k);
                    }
                    continue;
                }
            };
            golden.push(GoldenTerm {
                node: k,
                kind,
                age: st.age,
            });
        }
        for g in &golden {
            self.state[und[g.node]].age += 1;
        }

        let params = FamilyParams::new(self.gamma, self.beta, 2)?;
        let coins: Vec<(u64, u32)> = und.iter().map(|&v| (v as u64, self.state[v].j)).collect();
        let mut est = MisEstimator::new(params, &coins, nbrs.to_vec(), golden, fallback)?;
        let floor = est.certified_floor();
        let run = run_to_completion(&mut est, &params, schedule, self.g.n(), |_| Ok(()))?;
        if run.initial < floor {
            return Err(MisError::BoundViolation(format!(
                "phase {phase}: unconditioned estimator {} below certified floor {}",
                fmt_ratio(&run.initial),
                fmt_ratio(&floor)
            )));
        }
        self.charge_derand(&est, und, nbrs, &run.trace)?;

        let seed = run.seed_bits();
        let hasher = Hasher::new(params);
        let marks = coins.iter().map(|&(x, j)| hasher.coin(seed, x, j)).collect();
        let log = PhaseLog {
            phase,
            undecided: und.len(),
            golden_type1: t1,
            golden_type2: t2,
            estimator_initial: fmt_ratio(&run.initial),
            estimator_final: fmt_ratio(&run.final_value),
            certified_floor: fmt_ratio(&floor),
            seed: Some(run.seed.to_hex()),
            joined: 0,
            removed: 0,
            initial_exact: run.initial,
            floor_exact: floor,
        };
        Ok((marks, log))
    }

    /// Charges the communication of every derandomization step, replaying
    /// the values the estimator produced.
    fn charge_derand(
        &mut self,
        est: &MisEstimator,
        und: &[NodeId],
        nbrs: &[Vec<usize>],
        trace: &[crate::derand::TraceEntry],
    ) -> Result<(), MisError> {
        let records = est.records();
        let golden = est.golden();
        let fallback = est.fallback();
        let mut cursor = 1;
        for entry in trace {
            let width = entry.candidate_values.len();
            let recs = &records[cursor..cursor + width];
            cursor += width;
            let free = recs[0].free;
            match self.kind() {
                ModelKind::Congest | ModelKind::Local => {
                    self.charge_local_sums(und, nbrs, free)?;
                    // primary sums in the first `width` slots, fallback sums after
                    let zero = BigRational::zero;
                    let mut values: Vec<_> = golden
                        .iter()
                        .enumerate()
                        .map(|(gi, g)| {
                            let mut vals: Vec<_> = recs.iter().map(|r| est.node_value(gi, r.free, r.chi[gi])).collect();
                            vals.extend((0..width).map(|_| zero()));
                            (und[g.node], vals)
                        })
                        .collect();
                    values.extend(fallback.iter().enumerate().map(|(fi, &k)| {
                        let mut vals: Vec<_> = (0..width).map(|_| zero()).collect();
                        vals.extend(recs.iter().map(|r| MisEstimator::fallback_sum(r.free, &r.fallback[fi..=fi])));
                        (und[k], vals)
                    }));
                    self.net.convergecast_sums(self.leader, 2 * width, &values)?;
                    self.net.broadcast_from_leader(self.leader, 1)?;
                }
                _ if width == 2 && !self.two_hop_collection => {
                    self.charge_local_sums(und, nbrs, free)?;
                    let mut msgs: Vec<_> = golden
                        .iter()
                        .enumerate()
                        .map(|(gi, g)| {
                            let payload = (
                                BigInt::from(recs[0].chi[gi]),
                                BigInt::from(recs[1].chi[gi]),
                                u64::from(g.age),
                            );
                            (und[g.node], payload)
                        })
                        .collect();
                    msgs.extend(fallback.iter().enumerate().map(|(fi, &k)| {
                        let payload = (BigInt::from(recs[0].fallback[fi]), BigInt::from(recs[1].fallback[fi]), 0u64);
                        (und[k], payload)
                    }));
                    self.send_to_leader(msgs)?;
                    self.net.broadcast_from_leader(self.leader, 1)?;
                }
                _ => {
                    // fan-out: each contributing v sends its term for
                    // candidate τ to node τ, which sums both keys
                    let mut fan = Vec::new();
                    for (gi, g) in golden.iter().enumerate() {
                        let v = und[g.node];
                        for (tau, r) in recs.iter().enumerate() {
                            if tau != v {
                                fan.push(Envelope::new(v, tau, (BigInt::from(r.chi[gi]), u64::from(g.age))));
                            }
                        }
                    }
                    for (fi, &k) in fallback.iter().enumerate() {
                        let v = und[k];
                        for (tau, r) in recs.iter().enumerate() {
                            if tau != v {
                                fan.push(Envelope::new(v, tau, (BigInt::from(r.fallback[fi]), 0u64)));
                            }
                        }
                    }
                    self.net.exchange(fan)?;
                    let sums: Vec<_> = recs
                        .iter()
                        .enumerate()
                        .map(|(tau, r)| {
                            (tau, (est.weighted(r.free, &r.chi), MisEstimator::fallback_sum(r.free, &r.fallback)))
                        })
                        .collect();
                    self.send_to_leader(sums)?;
                    let z = width.trailing_zeros() as usize;
                    self.net.broadcast_from_leader(self.leader, z)?;
                }
            }
        }
        Ok(())
    }

    /// Neighbors swap the per-bit mark counts each node needs for its own
    /// term (`m(u)` and `Σ m(u,w)` for both extensions).
    fn charge_local_sums(&mut self, und: &[NodeId], nbrs: &[Vec<usize>], free: u32) -> Result<(), MisError> {
        let msgs: Vec<_> = und
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let deg_bits = ceil_log2(nbrs[k].len() as u64 + 1) as usize;
                (v, Bits(2 * (2 * (free as usize + 2) + deg_bits)))
            })
            .collect();
        self.neighbor_round(msgs)
    }

    /// Residual edges go to the leader, which finishes with a greedy MIS.
    fn leader_finish(&mut self, strict: bool) -> Result<(), MisError> {
        let und = self.undecided();
        let n = self.g.n();
        let mut edges = Vec::new();
        for &v in &und {
            for u in self.residual_neighbors(v) {
                if v < u {
                    edges.push((v, u));
                }
            }
        }
        self.report.residual_edges_at_handoff = Some(edges.len());
        self.report.undecided_at_handoff = Some(und.len());
        if strict && edges.len() > self.cfg.c_edge * n {
            return Err(MisError::BoundViolation(format!(
                "{} residual edges at leader collection exceed {}·n = {}",
                edges.len(),
                self.cfg.c_edge,
                self.cfg.c_edge * n
            )));
        }
        if und.is_empty() {
            return Ok(());
        }
        let flags: Vec<_> = self.scope.iter().map(|&v| (v, self.state[v].is_undecided())).collect();
        self.send_to_leader(flags)?;
        let leader = self.leader;
        let id_bits = 2 * self.gamma as usize;
        match self.kind() {
            ModelKind::Clique => {
                let demands: Vec<_> = edges
                    .iter()
                    .filter(|&&(v, _)| v != leader)
                    .map(|&(v, _)| Envelope::new(v, leader, Bits(id_bits)))
                    .collect();
                route_batched(&mut self.net, demands)?;
            }
            _ => {
                // broadcast clique: one residual neighbor ID per round
                let mut queues: Vec<(NodeId, usize)> = und
                    .iter()
                    .map(|&v| (v, edges.iter().filter(|e| e.0 == v).count()))
                    .collect();
                while queues.iter().any(|&(_, c)| c > 0) {
                    let senders: Vec<_> = queues
                        .iter()
                        .filter(|&&(v, c)| c > 0 && v != leader)
                        .map(|&(v, _)| (v, Bits(id_bits)))
                        .collect();
                    self.send_to_leader(senders)?;
                    for q in &mut queues {
                        q.1 = q.1.saturating_sub(1);
                    }
                }
            }
        }
        let mut active = vec![false; n];
        for &v in &und {
            active[v] = true;
        }
        let chosen = greedy_mis(self.g, &active);
        for &v in &und {
            self.state[v].status = Status::Removed;
        }
        for &v in &chosen {
            self.state[v].status = Status::InMis;
        }
        if self.kind() == ModelKind::Clique {
            let out: Vec<_> = und
                .iter()
                .filter(|&&v| v != leader)
                .map(|&v| Envelope::new(leader, v, chosen.contains(&v)))
                .collect();
            self.net.exchange(out)?;
        } else {
            self.net.broadcast_from_leader(leader, und.len())?;
        }
        Ok(())
    }

    /// Undecided nodes at budget exhaustion must have been golden often.
    fn check_age_bound(&self) -> Result<(), MisError> {
        let delta = self.g.max_degree().max(2) as f64;
        let threshold = (self.cfg.c_age as f64 * delta.log2()).ceil() as u32;
        for v in self.undecided() {
            if self.state[v].age < threshold {
                return Err(MisError::BoundViolation(format!(
                    "node {v} undecided after the phase budget with age {} < {threshold}",
                    self.state[v].age
                )));
            }
        }
        Ok(())
    }

    fn run_phases(&mut self, coord: &mut Coordination, budget: u32) -> Result<(), MisError> {
        self.report.phase_budget = budget;
        let mut phase = 0;
        while phase < budget && !self.undecided().is_empty() {
            self.run_phase(coord, phase)?;
            phase += 1;
        }
        self.report.phases_run = phase;
        Ok(())
    }

    fn finish(self) -> Result<MisOutcome, MisError> {
        let set = NodeSet::from_iter(
            self.g.n(),
            self.scope
                .iter()
                .copied()
                .filter(|&v| self.state[v].status == Status::InMis),
        )?;
        Ok(MisOutcome {
            set,
            metrics: *self.net.metrics(),
            report: self.report,
        })
    }
}

/// Splits demands into rounds of the routing oracle so no node sends or
/// receives more than `n` payloads per call. Returns the number of calls.
fn route_batched(net: &mut Network<'_>, demands: Vec<Envelope<Bits>>) -> Result<usize, MisError> {
    /// Messages plus per-node send and receive counts.
    type Batch = (Vec<Envelope<Bits>>, Vec<usize>, Vec<usize>);
    let n = net.graph().n();
    let mut batches: Vec<Batch> = Vec::new();
    for env in demands {
        let slot = batches
            .iter()
            .position(|(_, s, r)| s[env.from] < n && r[env.to] < n);
        let idx = match slot {
            Some(i) => i,
            None => {
                batches.push((Vec::new(), vec![0; n], vec![0; n]));
                batches.len() - 1
            }
        };
        let (list, s, r) = &mut batches[idx];
        s[env.from] += 1;
        r[env.to] += 1;
        list.push(env);
    }
    let count = batches.len();
    for (list, _, _) in batches {
        net.lenzen_route(list)?;
    }
    Ok(count)
}

fn det_beta(cfg: &MisConfig, g: &Graph) -> u32 {
    hash_beta(cfg, g.max_degree())
}

/// Randomized clique MIS: independent marks for `O(log Δ)` phases, then the
/// leader collects what is left.
pub fn rand_mis_clique(g: &Graph, cfg: &MisConfig, rng_seed: u64) -> Result<MisOutcome, MisError> {
    let scope: Vec<_> = (0..g.n()).collect();
    let mut r = Runner::new(g, cfg, ModelKind::Clique, scope, RAND_MAX_EXP);
    let budget = clique_phase_budget(cfg, g.max_degree());
    let mut coord = Coordination::Random(Box::new(ChaCha8Rng::seed_from_u64(rng_seed)));
    r.run_phases(&mut coord, budget)?;
    r.leader_finish(false)?;
    r.finish()
}

/// Deterministic clique MIS with bitwise seed fixing per phase.
pub fn det_mis_clique(g: &Graph, cfg: &MisConfig, kind: ModelKind) -> Result<MisOutcome, MisError> {
    if !kind.is_clique() {
        return Err(MisError::Parameter(format!(
            "det-mis runs in CLIQUE or BROADCAST_CLIQUE, not {kind}"
        )));
    }
    let scope: Vec<_> = (0..g.n()).collect();
    let mut r = Runner::new(g, cfg, kind, scope, det_beta(cfg, g));
    let budget = clique_phase_budget(cfg, g.max_degree());
    r.report.seed_bits = 2 * hash_gamma(g.n()).max(r.beta);
    r.run_phases(&mut Coordination::Bitwise, budget)?;
    r.check_age_bound()?;
    r.leader_finish(true)?;
    r.finish()
}

/// Whether the bounded-degree variant accepts `g`: `Δ³ ≤ c_Δ · n`.
pub fn bounded_delta_gate(g: &Graph, cfg: &MisConfig) -> bool {
    let delta = g.max_degree() as u64;
    delta.pow(3) <= cfg.c_delta * g.n() as u64
}

/// Deterministic clique MIS for `Δ³ ≤ c_Δ·n`: nodes learn their 2-hop
/// neighborhoods and the seed is fixed `⌊log₂ n⌋` bits at a time.
pub fn det_mis_bounded_delta(g: &Graph, cfg: &MisConfig) -> Result<MisOutcome, MisError> {
    if !bounded_delta_gate(g, cfg) {
        return Err(MisError::Parameter(format!(
            "Δ³ = {} exceeds c_Δ·n = {}; use det-mis instead",
            (g.max_degree() as u64).pow(3),
            cfg.c_delta * g.n() as u64
        )));
    }
    if g.n() < 2 {
        return det_mis_clique(g, cfg, ModelKind::Clique);
    }
    let scope: Vec<_> = (0..g.n()).collect();
    let mut r = Runner::new(g, cfg, ModelKind::Clique, scope, det_beta(cfg, g));
    r.two_hop_collection = true;
    r.report.seed_bits = 2 * hash_gamma(g.n()).max(r.beta);
    let z = floor_log2(g.n() as u64);
    let budget = clique_phase_budget(cfg, g.max_degree());
    r.run_phases(&mut Coordination::Blocks { z }, budget)?;
    r.check_age_bound()?;
    r.leader_finish(true)?;
    r.finish()
}

/// Deterministic CONGEST MIS: each component aggregates estimator values over
/// a BFS tree rooted at its smallest ID; no leader finish.
pub fn det_mis_congest(g: &Graph, cfg: &MisConfig) -> Result<MisOutcome, MisError> {
    let budget = congest_phase_budget(cfg, g.n());
    let mut metrics = RunMetrics::default();
    let mut report = MisReport {
        phase_budget: budget,
        beta: det_beta(cfg, g),
        seed_bits: 2 * hash_gamma(g.n()).max(det_beta(cfg, g)),
        ..MisReport::default()
    };
    let mut members = Vec::new();
    for comp in g.components() {
        let mut r = Runner::new(g, cfg, ModelKind::Congest, comp, det_beta(cfg, g));
        r.net.build_tree(r.leader)?;
        r.run_phases(&mut Coordination::Bitwise, budget)?;
        let left = r.undecided();
        if !left.is_empty() {
            return Err(MisError::BoundViolation(format!(
                "{} nodes undecided after {budget} phases (e.g. node {})",
                left.len(),
                left[0]
            )));
        }
        let out = r.finish()?;
        metrics.merge_parallel(&out.metrics);
        report.phases_run = report.phases_run.max(out.report.phases_run);
        report.phases.extend(out.report.phases);
        members.extend(out.set.iter());
    }
    Ok(MisOutcome {
        set: NodeSet::from_iter(g.n(), members)?,
        metrics,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{check_mis, generate, GraphSpec};

    fn cfg() -> MisConfig {
        MisConfig::default()
    }

    #[test]
    fn rand_on_empty_and_clique() {
        let empty = Graph::unweighted(6, []).unwrap();
        let out = rand_mis_clique(&empty, &cfg(), 1).unwrap();
        assert_eq!(out.set.len(), 6);
        let k = generate(&GraphSpec::Clique { n: 7 }, 0).unwrap();
        let out = rand_mis_clique(&k, &cfg(), 3).unwrap();
        assert_eq!(out.set.len(), 1);
        assert!(check_mis(&k, &out.set).is_valid());
    }

    #[test]
    fn det_clique_small_graphs() {
        for spec in [
            GraphSpec::Star { n: 6 },
            GraphSpec::Path { n: 6 },
            GraphSpec::Clique { n: 5 },
            GraphSpec::Cycle { n: 7 },
        ] {
            let g = generate(&spec, 0).unwrap();
            let a = det_mis_clique(&g, &cfg(), ModelKind::Clique).unwrap();
            let b = det_mis_clique(&g, &cfg(), ModelKind::Clique).unwrap();
            assert!(check_mis(&g, &a.set).is_valid(), "{spec:?}");
            assert_eq!(a.set, b.set);
            assert_eq!(a.metrics, b.metrics);
        }
    }

    #[test]
    fn broadcast_clique_variant() {
        let g = generate(&GraphSpec::Gnp { n: 12, p: 0.3 }, 5).unwrap();
        let out = det_mis_clique(&g, &cfg(), ModelKind::BroadcastClique).unwrap();
        assert!(check_mis(&g, &out.set).is_valid());
        assert!(det_mis_clique(&g, &cfg(), ModelKind::Congest).unwrap_err().is_parameter());
    }

    #[test]
    fn bounded_gate() {
        let c5 = generate(&GraphSpec::Cycle { n: 5 }, 0).unwrap();
        assert!(det_mis_bounded_delta(&c5, &cfg()).unwrap_err().is_parameter());
        let loose = MisConfig {
            c_delta: 2,
            ..cfg()
        };
        let out = det_mis_bounded_delta(&c5, &loose).unwrap();
        assert!(check_mis(&c5, &out.set).is_valid());
    }

    #[test]
    fn congest_components() {
        let g = Graph::unweighted(4, [(0, 1), (2, 3)]).unwrap();
        let out = det_mis_congest(&g, &cfg()).unwrap();
        assert!(check_mis(&g, &out.set).is_valid());
        assert_eq!(out.set.len(), 2);
    }
}
