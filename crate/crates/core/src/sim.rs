//! Synchronous round-based execution with bandwidth accounting.
//!
//! Every communication primitive validates its traffic against the active
//! [`CostModel`] and charges rounds into [`RunMetrics`]. A payload of `b` bits
//! over a link of bandwidth `B` costs `⌈b/B⌉` rounds; the extra rounds beyond
//! the first are recorded as oversized charges so no large message goes
//! unaccounted.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};
use crate::num::{ceil_log2, int_bits, ratio_bits};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ModelKind {
    Local,
    Congest,
    Clique,
    BroadcastClique,
}

impl ModelKind {
    pub fn is_clique(self) -> bool {
        matches!(self, ModelKind::Clique | ModelKind::BroadcastClique)
    }

    pub fn parse(s: &str) -> Option<ModelKind> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "local" => Some(ModelKind::Local),
            "congest" => Some(ModelKind::Congest),
            "clique" => Some(ModelKind::Clique),
            "broadcast_clique" => Some(ModelKind::BroadcastClique),
            _ => None,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelKind::Local => "LOCAL",
            ModelKind::Congest => "CONGEST",
            ModelKind::Clique => "CLIQUE",
            ModelKind::BroadcastClique => "BROADCAST_CLIQUE",
        };
        f.write_str(s)
    }
}

/// Communication graph plus bandwidth rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    pub kind: ModelKind,
    /// Bits per message per round.
    pub bandwidth: usize,
}

impl CostModel {
    pub const DEFAULT_BANDWIDTH_FACTOR: usize = 8;

    /// Bandwidth `c_b·⌈log₂ n⌉` (at least `c_b`).
    pub fn new(kind: ModelKind, n: usize, c_b: usize) -> Self {
        let log = ceil_log2(n as u64).max(1) as usize;
        CostModel {
            kind,
            bandwidth: c_b.max(1) * log,
        }
    }

    pub fn with_default_bandwidth(kind: ModelKind, n: usize) -> Self {
        Self::new(kind, n, Self::DEFAULT_BANDWIDTH_FACTOR)
    }

    /// Rounds needed to push `bits` over one link.
    pub fn rounds_for(&self, bits: usize) -> u64 {
        if self.kind == ModelKind::Local {
            1
        } else {
            bits.max(1).div_ceil(self.bandwidth) as u64
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub rounds: u64,
    pub messages: u64,
    pub max_message_bits: u64,
    pub oversized_charges: u64,
}

impl RunMetrics {
    /// Combines metrics of executions that ran side by side (e.g. separate
    /// components): rounds overlap, traffic adds up.
    pub fn merge_parallel(&mut self, other: &RunMetrics) {
        self.rounds = self.rounds.max(other.rounds);
        self.messages += other.messages;
        self.max_message_bits = self.max_message_bits.max(other.max_message_bits);
        self.oversized_charges += other.oversized_charges;
    }

    /// True when some message exceeded the bandwidth without any extra round
    /// having been charged for it.
    pub fn has_unexplained_oversize(&self, model: &CostModel) -> bool {
        model.kind != ModelKind::Local
            && self.max_message_bits > model.bandwidth as u64
            && self.oversized_charges == 0
    }
}

/// Size of a payload on the wire.
pub trait WireSize {
    fn wire_bits(&self) -> usize;
}

/// A payload that is only accounted, not inspected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bits(pub usize);

impl WireSize for Bits {
    fn wire_bits(&self) -> usize {
        self.0
    }
}

impl WireSize for bool {
    fn wire_bits(&self) -> usize {
        1
    }
}

impl WireSize for u64 {
    fn wire_bits(&self) -> usize {
        (64 - self.leading_zeros() as usize).max(1)
    }
}

impl WireSize for usize {
    fn wire_bits(&self) -> usize {
        (*self as u64).wire_bits()
    }
}

impl WireSize for u32 {
    fn wire_bits(&self) -> usize {
        (*self as u64).wire_bits()
    }
}

impl WireSize for BigInt {
    fn wire_bits(&self) -> usize {
        int_bits(self)
    }
}

impl WireSize for BigRational {
    fn wire_bits(&self) -> usize {
        ratio_bits(self)
    }
}

impl<T: WireSize> WireSize for Vec<T> {
    fn wire_bits(&self) -> usize {
        self.iter().map(WireSize::wire_bits).sum::<usize>().max(1)
    }
}

impl<A: WireSize, B: WireSize> WireSize for (A, B) {
    fn wire_bits(&self) -> usize {
        self.0.wire_bits() + self.1.wire_bits()
    }
}

impl<A: WireSize, B: WireSize, C: WireSize> WireSize for (A, B, C) {
    fn wire_bits(&self) -> usize {
        self.0.wire_bits() + self.1.wire_bits() + self.2.wire_bits()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelope<T> {
    pub from: NodeId,
    pub to: NodeId,
    pub payload: T,
}

impl<T> Envelope<T> {
    pub fn new(from: NodeId, to: NodeId, payload: T) -> Self {
        Envelope { from, to, payload }
    }
}

/// Per-node received messages, each list sorted by sender.
pub type Inbox<T> = Vec<Vec<(NodeId, T)>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("node {0} out of range")]
    NodeOutOfRange(NodeId),
    #[error("node {0} addressed a message to itself")]
    SelfMessage(NodeId),
    #[error("{model} violation: {from} -> {to} is not an input-graph edge")]
    NotNeighbor {
        model: ModelKind,
        from: NodeId,
        to: NodeId,
    },
    #[error("more than one message {from} -> {to} in one round")]
    DuplicatePair { from: NodeId, to: NodeId },
    #[error("broadcast clique violation: node {0} did not send one identical message to all")]
    NotBroadcast(NodeId),
    #[error("node {node} is disconnected from leader {leader}")]
    Disconnected { node: NodeId, leader: NodeId },
    #[error("{op} is not available in the {model} model")]
    WrongModel { op: &'static str, model: ModelKind },
    #[error("payload of {bits} bits exceeds routed bandwidth {bandwidth}")]
    PayloadTooLarge { bits: usize, bandwidth: usize },
    #[error("routing quota exceeded at node {node}: {count} {direction} payloads > {limit}")]
    Quota {
        node: NodeId,
        direction: &'static str,
        count: usize,
        limit: usize,
    },
}

/// BFS tree rooted at a leader, smallest-ID parent tie-breaking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsTree {
    pub root: NodeId,
    pub parent: Vec<Option<NodeId>>,
    pub level: Vec<Option<usize>>,
    pub depth: usize,
    /// Tree members ordered by level, then ID.
    pub order: Vec<NodeId>,
}

impl BfsTree {
    pub fn build(g: &Graph, root: NodeId) -> Self {
        let mut parent = vec![None; g.n()];
        let mut level = vec![None; g.n()];
        level[root] = Some(0);
        let mut order = vec![root];
        let mut frontier = vec![root];
        let mut depth = 0;
        while !frontier.is_empty() {
            let mut next = BTreeSet::new();
            for &x in &frontier {
                for y in g.neighbors(x) {
                    if level[y].is_none() {
                        next.insert(y);
                    }
                }
            }
            for &y in &next {
                level[y] = Some(depth + 1);
                // frontier is sorted, so the first match is the smallest ID
                parent[y] = frontier.iter().copied().find(|&x| g.has_edge(x, y));
            }
            if next.is_empty() {
                break;
            }
            depth += 1;
            frontier = next.into_iter().collect();
            order.extend(frontier.iter().copied());
        }
        BfsTree {
            root,
            parent,
            level,
            depth,
            order,
        }
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.level[v].is_some()
    }

    pub fn size(&self) -> usize {
        self.order.len()
    }
}

pub const DEFAULT_ROUTE_COST: u64 = 2;

/// A synchronous network over an input graph under one cost model.
#[derive(Debug)]
pub struct Network<'g> {
    graph: &'g Graph,
    model: CostModel,
    metrics: RunMetrics,
    trees: BTreeMap<NodeId, BfsTree>,
    route_cost: u64,
}

impl<'g> Network<'g> {
    pub fn new(graph: &'g Graph, model: CostModel) -> Self {
        Network {
            graph,
            model,
            metrics: RunMetrics::default(),
            trees: BTreeMap::new(),
            route_cost: DEFAULT_ROUTE_COST,
        }
    }

    pub fn with_route_cost(mut self, cost: u64) -> Self {
        self.route_cost = cost;
        self
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn model(&self) -> &CostModel {
        &self.model
    }

    pub fn metrics(&self) -> &RunMetrics {
        &self.metrics
    }

    pub fn into_metrics(self) -> RunMetrics {
        self.metrics
    }

    fn record(&mut self, count: usize, max_bits: usize, rounds: u64) {
        self.metrics.rounds += rounds;
        self.metrics.messages += count as u64;
        self.metrics.max_message_bits = self.metrics.max_message_bits.max(max_bits as u64);
        if self.model.kind != ModelKind::Local && rounds > 0 {
            // the first round of every link step is the nominal one
            let per_step = self.model.rounds_for(max_bits);
            let steps = rounds / per_step.max(1);
            self.metrics.oversized_charges += (per_step - 1) * steps;
        }
    }

    fn check_node(&self, v: NodeId) -> Result<(), SimError> {
        if v < self.graph.n() {
            Ok(())
        } else {
            Err(SimError::NodeOutOfRange(v))
        }
    }

    /// One synchronous step: all payloads are delivered simultaneously and
    /// the step costs the largest per-link charge `⌈bits/B⌉`.
    pub fn exchange<T: WireSize + PartialEq>(
        &mut self,
        outbox: Vec<Envelope<T>>,
    ) -> Result<Inbox<T>, SimError> {
        let n = self.graph.n();
        let mut pairs = BTreeSet::new();
        let mut per_sender: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
        for (i, env) in outbox.iter().enumerate() {
            self.check_node(env.from)?;
            self.check_node(env.to)?;
            if env.from == env.to {
                return Err(SimError::SelfMessage(env.from));
            }
            if !pairs.insert((env.from, env.to)) {
                return Err(SimError::DuplicatePair {
                    from: env.from,
                    to: env.to,
                });
            }
            match self.model.kind {
                ModelKind::Congest | ModelKind::Local => {
                    if !self.graph.has_edge(env.from, env.to) {
                        return Err(SimError::NotNeighbor {
                            model: self.model.kind,
                            from: env.from,
                            to: env.to,
                        });
                    }
                }
                ModelKind::Clique => {}
                ModelKind::BroadcastClique => per_sender.entry(env.from).or_default().push(i),
            }
        }
        for (&from, idxs) in &per_sender {
            let first = &outbox[idxs[0]].payload;
            if idxs.len() != n - 1 || idxs.iter().any(|&i| outbox[i].payload != *first) {
                return Err(SimError::NotBroadcast(from));
            }
        }
        let max_bits = outbox.iter().map(|e| e.payload.wire_bits()).max().unwrap_or(0);
        let rounds = if outbox.is_empty() {
            0
        } else {
            self.model.rounds_for(max_bits)
        };
        self.record(outbox.len(), max_bits, rounds);
        let mut inbox: Inbox<T> = (0..n).map(|_| Vec::new()).collect();
        for env in outbox {
            inbox[env.to].push((env.from, env.payload));
        }
        for row in &mut inbox {
            row.sort_by_key(|(from, _)| *from);
        }
        Ok(inbox)
    }

    /// Alias matching the neighbor-exchange primitive; in clique models the
    /// payloads may address any node.
    pub fn exchange_with_neighbors<T: WireSize + PartialEq>(
        &mut self,
        outbox: Vec<Envelope<T>>,
    ) -> Result<Inbox<T>, SimError> {
        self.exchange(outbox)
    }

    /// Every listed node tells its input-graph neighbors one value. In the
    /// broadcast clique the value goes to everyone (same cost).
    pub fn send_to_neighbors<T: WireSize + PartialEq + Clone>(
        &mut self,
        values: &[(NodeId, T)],
    ) -> Result<(), SimError> {
        let n = self.graph.n();
        let mut outbox = Vec::new();
        for (v, val) in values {
            if self.model.kind == ModelKind::BroadcastClique {
                outbox.extend((0..n).filter(|&u| u != *v).map(|u| Envelope::new(*v, u, val.clone())));
            } else {
                outbox.extend(self.graph.neighbors(*v).map(|u| Envelope::new(*v, u, val.clone())));
            }
        }
        self.exchange(outbox).map(|_| ())
    }

    /// Ensures the BFS tree for `leader` exists; building it costs `depth`
    /// rounds once (flooding from the leader).
    pub fn build_tree(&mut self, leader: NodeId) -> Result<usize, SimError> {
        self.check_node(leader)?;
        if let Some(t) = self.trees.get(&leader) {
            return Ok(t.depth);
        }
        let tree = BfsTree::build(self.graph, leader);
        let depth = tree.depth;
        let msgs = tree.size().saturating_sub(1);
        let id_bits = ceil_log2(self.graph.n() as u64).max(1) as usize;
        if depth > 0 {
            let per = self.model.rounds_for(id_bits);
            self.record(msgs, id_bits, depth as u64 * per);
        }
        self.trees.insert(leader, tree);
        Ok(depth)
    }

    pub fn tree(&self, leader: NodeId) -> Option<&BfsTree> {
        self.trees.get(&leader)
    }

    /// Sums each coordinate of the contributed vectors at `leader`.
    ///
    /// Tree models (CONGEST/LOCAL) forward partial sums up the BFS tree and
    /// pay `depth × ⌈bits/B⌉` where `bits` is the largest partial-sum message;
    /// clique models send directly and pay one link step.
    pub fn convergecast_sums(
        &mut self,
        leader: NodeId,
        width: usize,
        values: &[(NodeId, Vec<BigRational>)],
    ) -> Result<Vec<BigRational>, SimError> {
        self.check_node(leader)?;
        let mut total = vec![BigRational::zero(); width];
        for (v, vals) in values {
            self.check_node(*v)?;
            assert_eq!(vals.len(), width, "convergecast width mismatch");
            for (acc, x) in total.iter_mut().zip(vals) {
                *acc += x;
            }
        }
        if self.model.kind.is_clique() {
            let senders: Vec<_> = values.iter().filter(|(v, _)| *v != leader).collect();
            if !senders.is_empty() {
                let max_bits = senders
                    .iter()
                    .map(|(_, vals)| vals.iter().map(ratio_bits).sum::<usize>())
                    .max()
                    .unwrap_or(1);
                let rounds = self.model.rounds_for(max_bits);
                self.record(senders.len(), max_bits, rounds);
            }
            return Ok(total);
        }
        self.build_tree(leader)?;
        let tree = &self.trees[&leader];
        for (v, _) in values {
            if !tree.contains(*v) {
                return Err(SimError::Disconnected { node: *v, leader });
            }
        }
        let mut partial: Vec<Option<Vec<BigRational>>> = vec![None; self.graph.n()];
        for (v, vals) in values {
            let slot = partial[*v].get_or_insert_with(|| vec![BigRational::zero(); width]);
            for (acc, x) in slot.iter_mut().zip(vals) {
                *acc += x;
            }
        }
        let mut max_bits = 0;
        for &x in tree.order.iter().rev() {
            let Some(p) = tree.parent[x] else { continue };
            let mine = partial[x].take().unwrap_or_else(|| vec![BigRational::zero(); width]);
            max_bits = max_bits.max(mine.iter().map(ratio_bits).sum::<usize>());
            let slot = partial[p].get_or_insert_with(|| vec![BigRational::zero(); width]);
            for (acc, x) in slot.iter_mut().zip(&mine) {
                *acc += x;
            }
        }
        let depth = tree.depth;
        let msgs = tree.size() - 1;
        if depth > 0 {
            let per = self.model.rounds_for(max_bits);
            self.record(msgs, max_bits, depth as u64 * per);
        }
        Ok(total)
    }

    pub fn convergecast_sum(
        &mut self,
        leader: NodeId,
        values: &[(NodeId, BigRational)],
    ) -> Result<BigRational, SimError> {
        let wide: Vec<_> = values.iter().map(|(v, x)| (*v, vec![x.clone()])).collect();
        Ok(self.convergecast_sums(leader, 1, &wide)?.pop().unwrap())
    }

    /// Leader informs all nodes (of its component in tree models) of a
    /// `bits`-bit payload.
    pub fn broadcast_from_leader(&mut self, leader: NodeId, bits: usize) -> Result<(), SimError> {
        self.check_node(leader)?;
        if self.model.kind.is_clique() {
            let n = self.graph.n();
            if n > 1 {
                let rounds = self.model.rounds_for(bits);
                self.record(n - 1, bits, rounds);
            }
            return Ok(());
        }
        self.build_tree(leader)?;
        let tree = &self.trees[&leader];
        let (depth, msgs) = (tree.depth, tree.size() - 1);
        if depth > 0 {
            let per = self.model.rounds_for(bits);
            self.record(msgs, bits, depth as u64 * per);
        }
        Ok(())
    }

    /// Constant-round all-to-all routing for demands within the per-node
    /// quota of `n` sent and `n` received payloads of at most `B` bits each.
    pub fn lenzen_route<T: WireSize>(
        &mut self,
        demands: Vec<Envelope<T>>,
    ) -> Result<Inbox<T>, SimError> {
        if self.model.kind != ModelKind::Clique {
            return Err(SimError::WrongModel {
                op: "lenzen_route",
                model: self.model.kind,
            });
        }
        let n = self.graph.n();
        let mut sent = vec![0usize; n];
        let mut recv = vec![0usize; n];
        let mut max_bits = 0;
        for env in &demands {
            self.check_node(env.from)?;
            self.check_node(env.to)?;
            let bits = env.payload.wire_bits();
            if bits > self.model.bandwidth {
                return Err(SimError::PayloadTooLarge {
                    bits,
                    bandwidth: self.model.bandwidth,
                });
            }
            max_bits = max_bits.max(bits);
            sent[env.from] += 1;
            recv[env.to] += 1;
        }
        for v in 0..n {
            if sent[v] > n {
                return Err(SimError::Quota {
                    node: v,
                    direction: "sent",
                    count: sent[v],
                    limit: n,
                });
            }
            if recv[v] > n {
                return Err(SimError::Quota {
                    node: v,
                    direction: "received",
                    count: recv[v],
                    limit: n,
                });
            }
        }
        if !demands.is_empty() {
            self.metrics.rounds += self.route_cost;
            self.metrics.messages += demands.len() as u64;
            self.metrics.max_message_bits = self.metrics.max_message_bits.max(max_bits as u64);
        }
        let mut inbox: Inbox<T> = (0..n).map(|_| Vec::new()).collect();
        for env in demands {
            inbox[env.to].push((env.from, env.payload));
        }
        for row in &mut inbox {
            row.sort_by_key(|(from, _)| *from);
        }
        Ok(inbox)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphSpec};
    use crate::num::int;

    fn congest(g: &Graph) -> Network<'_> {
        Network::new(g, CostModel::with_default_bandwidth(ModelKind::Congest, g.n()))
    }

    #[test]
    fn exchange_charges_ceiling() {
        let g = generate(&GraphSpec::Path { n: 4 }, 0).unwrap();
        let mut net = congest(&g);
        let b = net.model().bandwidth;
        net.exchange(vec![Envelope::new(0, 1, Bits(b)), Envelope::new(2, 1, Bits(3))])
            .unwrap();
        assert_eq!(net.metrics().rounds, 1);
        assert_eq!(net.metrics().oversized_charges, 0);
        net.exchange(vec![Envelope::new(1, 2, Bits(3 * b))]).unwrap();
        assert_eq!(net.metrics().rounds, 4);
        assert_eq!(net.metrics().oversized_charges, 2);
        net.exchange::<Bits>(vec![]).unwrap();
        assert_eq!(net.metrics().rounds, 4);
        assert!(!net.metrics().has_unexplained_oversize(net.model()));
    }

    #[test]
    fn congest_rejects_non_neighbor() {
        let g = generate(&GraphSpec::Path { n: 4 }, 0).unwrap();
        let mut net = congest(&g);
        let err = net.exchange(vec![Envelope::new(0, 2, Bits(1))]).unwrap_err();
        assert!(matches!(err, SimError::NotNeighbor { from: 0, to: 2, .. }));
    }

    #[test]
    fn inbox_delivery_is_sorted() {
        let g = generate(&GraphSpec::Star { n: 4 }, 0).unwrap();
        let mut net = congest(&g);
        let inbox = net
            .exchange(vec![
                Envelope::new(3, 0, 30u64),
                Envelope::new(1, 0, 10u64),
                Envelope::new(2, 0, 20u64),
            ])
            .unwrap();
        assert_eq!(inbox[0], vec![(1, 10), (2, 20), (3, 30)]);
    }

    #[test]
    fn broadcast_clique_requires_identical_payloads() {
        let g = Graph::unweighted(3, []).unwrap();
        let mut net = Network::new(&g, CostModel::with_default_bandwidth(ModelKind::BroadcastClique, 3));
        assert!(net
            .exchange(vec![Envelope::new(0, 1, 5u64), Envelope::new(0, 2, 5u64)])
            .is_ok());
        assert_eq!(
            net.exchange(vec![Envelope::new(0, 1, 5u64), Envelope::new(0, 2, 6u64)]),
            Err(SimError::NotBroadcast(0))
        );
        assert_eq!(
            net.exchange(vec![Envelope::new(0, 1, 5u64)]),
            Err(SimError::NotBroadcast(0))
        );
    }

    #[test]
    fn convergecast_star_and_path() {
        let star = generate(&GraphSpec::Star { n: 5 }, 0).unwrap();
        let mut net = congest(&star);
        net.build_tree(0).unwrap();
        let before = net.metrics().rounds;
        let vals: Vec<_> = (0..5).map(|v| (v, int(1))).collect();
        assert_eq!(net.convergecast_sum(0, &vals).unwrap(), int(5));
        assert_eq!(net.metrics().rounds - before, 1);

        let path = generate(&GraphSpec::Path { n: 4 }, 0).unwrap();
        let mut net = congest(&path);
        net.build_tree(0).unwrap();
        let before = net.metrics().rounds;
        let vals: Vec<_> = (0..4).map(|v| (v, int(v as i64))).collect();
        assert_eq!(net.convergecast_sum(0, &vals).unwrap(), int(6));
        assert_eq!(net.metrics().rounds - before, 3);

        let mut clique = Network::new(&path, CostModel::with_default_bandwidth(ModelKind::Clique, 4));
        assert_eq!(clique.convergecast_sum(0, &vals).unwrap(), int(6));
        assert_eq!(clique.metrics().rounds, 1);
    }

    #[test]
    fn convergecast_rejects_disconnected_contributor() {
        let g = Graph::unweighted(3, [(0, 1)]).unwrap();
        let mut net = congest(&g);
        assert_eq!(
            net.convergecast_sum(0, &[(2, int(1))]),
            Err(SimError::Disconnected { node: 2, leader: 0 })
        );
    }

    #[test]
    fn broadcast_charges_depth_times_size() {
        let path = generate(&GraphSpec::Path { n: 8 }, 0).unwrap();
        let mut net = congest(&path);
        net.build_tree(0).unwrap();
        let before = net.metrics().rounds;
        net.broadcast_from_leader(0, 1).unwrap();
        assert_eq!(net.metrics().rounds - before, 7);

        let p3 = generate(&GraphSpec::Path { n: 3 }, 0).unwrap();
        let mut net = congest(&p3);
        net.build_tree(0).unwrap();
        let before = net.metrics().rounds;
        let b = net.model().bandwidth;
        net.broadcast_from_leader(0, 2 * b).unwrap();
        assert_eq!(net.metrics().rounds - before, 4);

        let mut clique = Network::new(&p3, CostModel::with_default_bandwidth(ModelKind::Clique, 3));
        clique.broadcast_from_leader(1, 1).unwrap();
        assert_eq!(clique.metrics().rounds, 1);
    }

    #[test]
    fn bfs_tree_prefers_small_parents() {
        let g = Graph::unweighted(4, [(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        let t = BfsTree::build(&g, 0);
        assert_eq!(t.parent[3], Some(1));
        assert_eq!(t.depth, 2);
        assert_eq!(t.order, vec![0, 1, 2, 3]);
    }

    #[test]
    fn lenzen_quota() {
        let g = Graph::unweighted(8, []).unwrap();
        let mut net = Network::new(&g, CostModel::with_default_bandwidth(ModelKind::Clique, 8));
        let ok: Vec<_> = (0..8).map(|d| Envelope::new(0, d, Bits(1))).collect();
        net.lenzen_route(ok).unwrap();
        assert_eq!(net.metrics().rounds, 2);
        let over: Vec<_> = (0..9).map(|s| Envelope::new(s % 8, 0, Bits(1))).collect();
        assert!(matches!(
            net.lenzen_route(over),
            Err(SimError::Quota { node: 0, direction: "received", .. })
        ));
        net.lenzen_route::<Bits>(vec![]).unwrap();
        assert_eq!(net.metrics().rounds, 2);
        let mut congest_net = congest(&g);
        assert!(matches!(
            congest_net.lenzen_route(vec![Envelope::new(0, 1, Bits(1))]),
            Err(SimError::WrongModel { .. })
        ));
    }

    #[test]
    fn metrics_serialize_with_expected_keys() {
        let m = RunMetrics {
            rounds: 3,
            messages: 4,
            max_message_bits: 5,
            oversized_charges: 0,
        };
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(
            s,
            r#"{"rounds":3,"messages":4,"max_message_bits":5,"oversized_charges":0}"#
        );
    }
}
