//! Weighted undirected graphs, deterministic generators, shortest paths and
//! the MIS / spanner verifiers.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::num::{fmt_ratio, int, parse_ratio};

pub type NodeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node {node} out of range for n = {n}")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("parallel edge ({0}, {1})")]
    ParallelEdge(NodeId, NodeId),
    #[error("edge ({0}, {1}) has non-positive weight")]
    NonPositiveWeight(NodeId, NodeId),
    #[error("invalid generator parameters: {0}")]
    Parameter(String),
    #[error("graph file, line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("({0}, {1}) is not an edge of the graph")]
    NotAnEdge(NodeId, NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub w: BigRational,
}

/// Undirected graph over nodes `0..n` with canonical `u < v` edge storage.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(NodeId, usize)>>,
    index: HashMap<(NodeId, NodeId), usize>,
    diameter: OnceLock<usize>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId, BigRational)>,
    {
        let mut list = Vec::new();
        let mut seen = BTreeSet::new();
        for (a, b, w) in edges {
            for node in [a, b] {
                if node >= n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if w <= BigRational::zero() {
                return Err(GraphError::NonPositiveWeight(u, v));
            }
            if !seen.insert((u, v)) {
                return Err(GraphError::ParallelEdge(u, v));
            }
            list.push(Edge { u, v, w });
        }
        list.sort_by_key(|e| (e.u, e.v));
        let mut adj = vec![Vec::new(); n];
        let mut index = HashMap::with_capacity(list.len());
        for (i, e) in list.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
            index.insert((e.u, e.v), i);
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: list,
            adj,
            index,
            diameter: OnceLock::new(),
        })
    }

    /// Unit-weight graph from an edge list.
    pub fn unweighted<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        Graph::new(n, edges.into_iter().map(|(u, v)| (u, v, BigRational::one())))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    /// Index of edge `{u, v}` in [`Graph::edges`].
    pub fn edge_index(&self, u: NodeId, v: NodeId) -> Option<usize> {
        let key = if u < v { (u, v) } else { (v, u) };
        self.index.get(&key).copied()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.edge_index(u, v).is_some()
    }

    /// Neighbors of `v` in ascending ID order.
    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj[v].iter().map(|&(u, _)| u)
    }

    /// `(neighbor, edge index)` pairs in ascending neighbor order.
    pub fn incident(&self, v: NodeId) -> &[(NodeId, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.w.is_one())
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for y in self.neighbors(x) {
                    if comp[y] == usize::MAX {
                        comp[y] = id;
                        members.push(y);
                        queue.push_back(y);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Hop distances from `s`; `None` for unreachable nodes.
    pub fn bfs_hops(&self, s: NodeId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            for y in self.neighbors(x) {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Hop diameter: the largest finite hop distance (per component for
    /// disconnected graphs). Computed once and cached.
    pub fn diameter(&self) -> usize {
        *self.diameter.get_or_init(|| {
            (0..self.n)
                .map(|s| self.bfs_hops(s).into_iter().flatten().max().unwrap_or(0))
                .max()
                .unwrap_or(0)
        })
    }

    /// Subgraph induced by `keep`, retaining original node IDs (other nodes
    /// become isolated).
    pub fn induced(&self, keep: &[bool]) -> Graph {
        let edges = self
            .edges
            .iter()
            .filter(|e| keep[e.u] && keep[e.v])
            .map(|e| (e.u, e.v, e.w.clone()));
        Graph::new(self.n, edges).expect("subgraph of a valid graph")
    }

    /// Text form: `"n m"` then one `"u v w"` line per edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m());
        for e in &self.edges {
            s.push_str(&format!("{} {} {}\n", e.u, e.v, fmt_ratio(&e.w)));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let perr = |line, msg: &str| GraphError::Parse {
            line,
            msg: msg.to_string(),
        };
        let (hl, header) = lines.next().ok_or_else(|| perr(1, "missing header"))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| perr(hl, "bad node count"))?;
        let m: usize = it
            .next()
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| perr(hl, "bad edge count"))?;
        let mut edges = Vec::with_capacity(m);
        for (ln, l) in lines {
            let parts: Vec<&str> = l.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(perr(ln, "expected `u v w`"));
            }
            let u: usize = parts[0].parse().map_err(|_| perr(ln, "bad u"))?;
            let v: usize = parts[1].parse().map_err(|_| perr(ln, "bad v"))?;
            let w = parse_ratio(parts[2]).ok_or_else(|| perr(ln, "bad weight"))?;
            edges.push((u, v, w));
        }
        if edges.len() != m {
            return Err(perr(hl, &format!("header says {m} edges, found {}", edges.len())));
        }
        Graph::new(n, edges)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={}, Δ={})", self.n, self.m(), self.max_degree())
    }
}

/// A subset of the nodes of an `n`-node graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSet {
    n: usize,
    members: BTreeSet<NodeId>,
}

impl NodeSet {
    pub fn new(n: usize) -> Self {
        NodeSet {
            n,
            members: BTreeSet::new(),
        }
    }

    pub fn from_iter<I: IntoIterator<Item = NodeId>>(n: usize, it: I) -> Result<Self, GraphError> {
        let mut s = NodeSet::new(n);
        for v in it {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn insert(&mut self, v: NodeId) -> Result<bool, GraphError> {
        if v >= self.n {
            return Err(GraphError::NodeOutOfRange { node: v, n: self.n });
        }
        Ok(self.members.insert(v))
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.members.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.members.iter().copied()
    }

    pub fn to_vec(&self) -> Vec<NodeId> {
        self.iter().collect()
    }
}

/// Edges of a spanner; every member is an edge of the source graph.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpannerEdges {
    edges: BTreeSet<(NodeId, NodeId)>,
}

impl SpannerEdges {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn all(g: &Graph) -> Self {
        SpannerEdges {
            edges: g.edges().iter().map(|e| (e.u, e.v)).collect(),
        }
    }

    pub fn from_pairs<I>(g: &Graph, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut h = SpannerEdges::new();
        for (u, v) in pairs {
            h.insert(g, u, v)?;
        }
        Ok(h)
    }

    pub fn insert(&mut self, g: &Graph, u: NodeId, v: NodeId) -> Result<bool, GraphError> {
        if !g.has_edge(u, v) {
            return Err(GraphError::NotAnEdge(u, v));
        }
        Ok(self.edges.insert((u.min(v), u.max(v))))
    }

    pub fn remove(&mut self, u: NodeId, v: NodeId) -> bool {
        self.edges.remove(&(u.min(v), u.max(v)))
    }

    pub fn contains(&self, u: NodeId, v: NodeId) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().copied()
    }
}

/// Generator inputs. Every generator is a deterministic function of the spec
/// and the 64-bit seed.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSpec {
    Gnp { n: usize, p: f64 },
    WeightedGnp { n: usize, p: f64, max_weight: u32 },
    Grid { rows: usize, cols: usize },
    Clique { n: usize },
    Path { n: usize },
    Cycle { n: usize },
    Star { n: usize },
    RandomTree { n: usize },
    RandomRegular { n: usize, d: usize },
}

impl GraphSpec {
    pub fn n(&self) -> usize {
        match *self {
            GraphSpec::Gnp { n, .. }
            | GraphSpec::WeightedGnp { n, .. }
            | GraphSpec::Clique { n }
            | GraphSpec::Path { n }
            | GraphSpec::Cycle { n }
            | GraphSpec::Star { n }
            | GraphSpec::RandomTree { n }
            | GraphSpec::RandomRegular { n, .. } => n,
            GraphSpec::Grid { rows, cols } => rows * cols,
        }
    }
}

pub fn generate(spec: &GraphSpec, rng_seed: u64) -> Result<Graph, GraphError> {
    let n = spec.n();
    if n == 0 {
        return Err(GraphError::Parameter("n must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let check_p = |p: f64| {
        if (0.0..=1.0).contains(&p) {
            Ok(())
        } else {
            Err(GraphError::Parameter(format!("p = {p} outside [0, 1]")))
        }
    };
    match *spec {
        GraphSpec::Gnp { n, p } => {
            check_p(p)?;
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((u, v));
                    }
                }
            }
            Graph::unweighted(n, edges)
        }
        GraphSpec::WeightedGnp { n, p, max_weight } => {
            check_p(p)?;
            if max_weight == 0 {
                return Err(GraphError::Parameter("max_weight must be positive".into()));
            }
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        let w = rng.gen_range(1..=max_weight as i64);
                        edges.push((u, v, int(w)));
                    }
                }
            }
            Graph::new(n, edges)
        }
        GraphSpec::Grid { rows, cols } => {
            let id = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            Graph::unweighted(n, edges)
        }
        GraphSpec::Clique { n } => {
            Graph::unweighted(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
        }
        GraphSpec::Path { n } => Graph::unweighted(n, (1..n).map(|v| (v - 1, v))),
        GraphSpec::Cycle { n } => {
            if n < 3 {
                return Err(GraphError::Parameter("cycle needs n >= 3".into()));
            }
            Graph::unweighted(n, (0..n).map(|v| (v, (v + 1) % n)))
        }
        GraphSpec::Star { n } => Graph::unweighted(n, (1..n).map(|v| (0, v))),
        GraphSpec::RandomTree { n } => {
            let edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
            Graph::unweighted(n, edges)
        }
        GraphSpec::RandomRegular { n, d } => random_regular(n, d, &mut rng),
    }
}

/// Configuration model with restarts; fails only for infeasible `(n, d)`.
fn random_regular(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<Graph, GraphError> {
    if d >= n || (n * d) % 2 == 1 {
        return Err(GraphError::Parameter(format!(
            "no {d}-regular graph on {n} nodes"
        )));
    }
    const ATTEMPTS: usize = 10_000;
    for _ in 0..ATTEMPTS {
        let mut stubs: Vec<NodeId> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        stubs.shuffle(rng);
        let mut seen = BTreeSet::new();
        let ok = stubs.chunks(2).all(|pair| {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            a != b && seen.insert((a, b))
        });
        if ok {
            return Graph::unweighted(n, seen);
        }
    }
    Err(GraphError::Parameter(format!(
        "no simple {d}-regular pairing found for n = {n} after {ATTEMPTS} attempts"
    )))
}

/// Single-source distances restricted to `restrict` (or all edges).
/// `None` marks unreachable nodes.
pub fn distances_from(
    g: &Graph,
    restrict: Option<&SpannerEdges>,
    s: NodeId,
) -> Vec<Option<BigRational>> {
    let mut dist: Vec<Option<BigRational>> = vec![None; g.n()];
    let mut done = vec![false; g.n()];
    dist[s] = Some(BigRational::zero());
    let mut heap = BinaryHeap::from([Reverse((BigRational::zero(), s))]);
    while let Some(Reverse((d, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for &(y, ei) in g.incident(x) {
            if let Some(h) = restrict {
                if !h.contains(x, y) {
                    continue;
                }
            }
            let nd = &d + &g.edge(ei).w;
            if dist[y].as_ref().is_none_or(|cur| nd < *cur) {
                dist[y] = Some(nd.clone());
                heap.push(Reverse((nd, y)));
            }
        }
    }
    dist
}

/// Exact shortest-path distance; `None` means infinity.
pub fn shortest_dist(
    g: &Graph,
    restrict: Option<&SpannerEdges>,
    u: NodeId,
    v: NodeId,
) -> Option<BigRational> {
    distances_from(g, restrict, u).swap_remove(v)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MisVerdict {
    Valid,
    NotIndependent(NodeId, NodeId),
    NotMaximal(NodeId),
}

impl MisVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, MisVerdict::Valid)
    }
}

impl fmt::Display for MisVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MisVerdict::Valid => write!(f, "valid"),
            MisVerdict::NotIndependent(u, v) => write!(f, "not_independent({u},{v})"),
            MisVerdict::NotMaximal(v) => write!(f, "not_maximal({v})"),
        }
    }
}

pub fn check_mis(g: &Graph, s: &NodeSet) -> MisVerdict {
    for e in g.edges() {
        if s.contains(e.u) && s.contains(e.v) {
            return MisVerdict::NotIndependent(e.u, e.v);
        }
    }
    for v in 0..g.n() {
        if !s.contains(v) && !g.neighbors(v).any(|u| s.contains(u)) {
            return MisVerdict::NotMaximal(v);
        }
    }
    MisVerdict::Valid
}

/// Ascending-ID greedy MIS; the reference oracle and the leader's local solver.
pub fn greedy_mis(g: &Graph, active: &[bool]) -> Vec<NodeId> {
    let mut blocked = vec![false; g.n()];
    let mut out = Vec::new();
    for v in 0..g.n() {
        if !active[v] || blocked[v] {
            continue;
        }
        out.push(v);
        for u in g.neighbors(v) {
            blocked[u] = true;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpannerVerdict {
    Valid {
        max_stretch: BigRational,
    },
    /// `stretch` is `None` when the endpoints are disconnected in `h`.
    Violated {
        edge: (NodeId, NodeId),
        stretch: Option<BigRational>,
    },
}

impl SpannerVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, SpannerVerdict::Valid { .. })
    }
}

impl fmt::Display for SpannerVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpannerVerdict::Valid { .. } => write!(f, "valid"),
            SpannerVerdict::Violated { edge, stretch } => match stretch {
                Some(s) => write!(f, "violated({},{}; {})", edge.0, edge.1, fmt_ratio(s)),
                None => write!(f, "violated({},{}; inf)", edge.0, edge.1),
            },
        }
    }
}

/// Checks `dist_h(u, v) ≤ (2k-1)·w` for every edge and reports the largest
/// observed ratio `dist_h(u, v) / w`.
pub fn check_spanner(g: &Graph, h: &SpannerEdges, k: u32) -> SpannerVerdict {
    assert!(k >= 1, "stretch parameter k must be at least 1");
    let bound = int(2 * k as i64 - 1);
    let mut max_stretch = BigRational::zero();
    let mut cache: Option<(NodeId, Vec<Option<BigRational>>)> = None;
    for e in g.edges() {
        if cache.as_ref().is_none_or(|(s, _)| *s != e.u) {
            cache = Some((e.u, distances_from(g, Some(h), e.u)));
        }
        let dist = &cache.as_ref().unwrap().1;
        let Some(d) = &dist[e.v] else {
            return SpannerVerdict::Violated {
                edge: (e.u, e.v),
                stretch: None,
            };
        };
        let stretch = d / &e.w;
        if stretch > bound {
            return SpannerVerdict::Violated {
                edge: (e.u, e.v),
                stretch: Some(stretch),
            };
        }
        if stretch > max_stretch {
            max_stretch = stretch;
        }
    }
    SpannerVerdict::Valid { max_stretch }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        generate(&GraphSpec::Path { n }, 0).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        generate(&GraphSpec::Cycle { n }, 0).unwrap()
    }

    #[test]
    fn clique_shape() {
        let g = generate(&GraphSpec::Clique { n: 4 }, 1).unwrap();
        assert_eq!(g.m(), 6);
        assert_eq!(g.max_degree(), 3);
        assert_eq!(g.diameter(), 1);
    }

    #[test]
    fn gnp_extremes_and_determinism() {
        let g = generate(&GraphSpec::Gnp { n: 10, p: 0.0 }, 7).unwrap();
        assert_eq!(g.m(), 0);
        let a = generate(&GraphSpec::Gnp { n: 10, p: 0.5 }, 7).unwrap();
        let b = generate(&GraphSpec::Gnp { n: 10, p: 0.5 }, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn generator_parameter_errors() {
        assert!(generate(&GraphSpec::Gnp { n: 5, p: 1.5 }, 0).is_err());
        assert!(generate(&GraphSpec::RandomRegular { n: 5, d: 3 }, 0).is_err());
        assert!(generate(&GraphSpec::RandomRegular { n: 4, d: 4 }, 0).is_err());
        assert!(generate(&GraphSpec::Path { n: 0 }, 0).is_err());
        let g = generate(&GraphSpec::RandomRegular { n: 10, d: 3 }, 3).unwrap();
        assert!((0..10).all(|v| g.degree(v) == 3));
    }

    #[test]
    fn construction_rejects_bad_edges() {
        assert_eq!(Graph::unweighted(3, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            Graph::unweighted(3, [(0, 1), (1, 0)]),
            Err(GraphError::ParallelEdge(0, 1))
        );
        assert!(Graph::unweighted(3, [(0, 3)]).is_err());
        assert_eq!(
            Graph::new(2, [(0, 1, int(0))]),
            Err(GraphError::NonPositiveWeight(0, 1))
        );
    }

    #[test]
    fn text_round_trip() {
        let g = Graph::new(
            4,
            [(2, 0, crate::num::ratio(3, 2)), (1, 3, int(4)), (0, 1, int(1))],
        )
        .unwrap();
        let text = g.to_text();
        assert!(text.starts_with("4 3\n0 1 1\n0 2 3/2\n"));
        assert_eq!(Graph::parse(&text).unwrap(), g);
        assert!(Graph::parse("3 2\n0 1 1\n").is_err());
        assert!(Graph::parse("3 1\n0 1 -1\n").is_err());
    }

    #[test]
    fn distances() {
        let g = path(3);
        assert_eq!(shortest_dist(&g, None, 0, 2), Some(int(2)));
        assert_eq!(shortest_dist(&g, None, 1, 1), Some(int(0)));
        let c = cycle(4);
        let mut h = SpannerEdges::all(&c);
        h.remove(0, 1);
        assert_eq!(shortest_dist(&c, Some(&h), 0, 1), Some(int(3)));
        let two = Graph::unweighted(3, [(0, 1)]).unwrap();
        assert_eq!(shortest_dist(&two, None, 0, 2), None);
    }

    #[test]
    fn mis_checker() {
        let tri = generate(&GraphSpec::Clique { n: 3 }, 0).unwrap();
        assert_eq!(check_mis(&tri, &NodeSet::from_iter(3, [0]).unwrap()), MisVerdict::Valid);
        let p = path(3);
        assert_eq!(
            check_mis(&p, &NodeSet::from_iter(3, [0]).unwrap()),
            MisVerdict::NotMaximal(2)
        );
        assert_eq!(
            check_mis(&p, &NodeSet::from_iter(3, [0, 1]).unwrap()),
            MisVerdict::NotIndependent(0, 1)
        );
    }

    #[test]
    fn spanner_checker() {
        let c4 = cycle(4);
        assert_eq!(
            check_spanner(&c4, &SpannerEdges::all(&c4), 3),
            SpannerVerdict::Valid { max_stretch: int(1) }
        );
        let mut h = SpannerEdges::all(&c4);
        h.remove(0, 1);
        assert_eq!(
            check_spanner(&c4, &h, 2),
            SpannerVerdict::Valid { max_stretch: int(3) }
        );
        let c5 = cycle(5);
        let mut h5 = SpannerEdges::all(&c5);
        h5.remove(0, 1);
        assert_eq!(
            check_spanner(&c5, &h5, 2),
            SpannerVerdict::Violated {
                edge: (0, 1),
                stretch: Some(int(4))
            }
        );
    }

    #[test]
    fn spanner_edges_must_exist() {
        let g = path(3);
        assert_eq!(
            SpannerEdges::from_pairs(&g, [(0, 2)]),
            Err(GraphError::NotAnEdge(0, 2))
        );
    }

    #[test]
    fn disconnected_diameter_and_components() {
        let g = Graph::unweighted(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
        assert_eq!(g.diameter(), 2);
        assert_eq!(g.components(), vec![vec![0, 1, 2], vec![3, 4]]);
    }
}
