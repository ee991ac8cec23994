//! (Δ+1)-coloring through an MIS of the clique blow-up.
//!
//! Node `v` becomes `Δ+1` copies `(v, j)` forming a clique, and copies with
//! equal `j` of adjacent nodes are joined by an edge. Any MIS of this graph
//! holds exactly one copy of every `v`, and its index is a proper color.

use serde::Serialize;

use super::engine::bounded_delta_gate;
use super::{det_mis_bounded_delta, det_mis_clique, MisConfig, MisError, MisReport};
use crate::graph::{Graph, NodeId};
use crate::sim::{ModelKind, RunMetrics};

#[derive(Debug, Clone, Serialize)]
pub struct ColoringOutcome {
    pub colors: Vec<usize>,
    pub palette: usize,
    pub used_bounded_variant: bool,
    pub metrics: RunMetrics,
    #[serde(skip)]
    pub report: MisReport,
}

/// Virtual node ID of copy `j` of `v`.
pub fn copy_id(v: NodeId, j: usize, palette: usize) -> NodeId {
    v * palette + j
}

pub fn blow_up(g: &Graph) -> Graph {
    let palette = g.max_degree() + 1;
    let mut edges = Vec::new();
    for v in 0..g.n() {
        for a in 0..palette {
            for b in a + 1..palette {
                edges.push((copy_id(v, a, palette), copy_id(v, b, palette)));
            }
        }
    }
    for e in g.edges() {
        for j in 0..palette {
            edges.push((copy_id(e.u, j, palette), copy_id(e.v, j, palette)));
        }
    }
    Graph::unweighted(g.n() * palette, edges).expect("blow-up edges are canonical")
}

/// Returns a color in `0..=Δ` per node.
pub fn color_via_mis(g: &Graph, cfg: &MisConfig) -> Result<ColoringOutcome, MisError> {
    let palette = g.max_degree() + 1;
    let big = blow_up(g);
    let bounded = bounded_delta_gate(&big, cfg);
    let out = if bounded {
        det_mis_bounded_delta(&big, cfg)?
    } else {
        det_mis_clique(&big, cfg, ModelKind::Clique)?
    };
    let mut colors = vec![usize::MAX; g.n()];
    for x in out.set.iter() {
        let (v, j) = (x / palette, x % palette);
        if colors[v] != usize::MAX {
            return Err(MisError::Invariant(format!("node {v} received two colors")));
        }
        colors[v] = j;
    }
    if let Some(v) = colors.iter().position(|&c| c == usize::MAX) {
        return Err(MisError::Invariant(format!("node {v} received no color")));
    }
    Ok(ColoringOutcome {
        colors,
        palette,
        used_bounded_variant: bounded,
        metrics: out.metrics,
        report: out.report,
    })
}

/// First edge whose endpoints share a color, if any.
pub fn coloring_conflict(g: &Graph, colors: &[usize]) -> Option<(NodeId, NodeId)> {
    g.edges()
        .iter()
        .find(|e| colors[e.u] == colors[e.v])
        .map(|e| (e.u, e.v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphSpec};

    #[test]
    fn edge_and_triangle() {
        let e = Graph::unweighted(2, [(0, 1)]).unwrap();
        let out = color_via_mis(&e, &MisConfig::default()).unwrap();
        assert_eq!(out.palette, 2);
        assert_ne!(out.colors[0], out.colors[1]);
        let tri = generate(&GraphSpec::Clique { n: 3 }, 0).unwrap();
        let out = color_via_mis(&tri, &MisConfig::default()).unwrap();
        let mut c = out.colors.clone();
        c.sort_unstable();
        assert_eq!(c, vec![0, 1, 2]);
    }

    #[test]
    fn blow_up_shape() {
        let p = generate(&GraphSpec::Path { n: 3 }, 0).unwrap();
        let b = blow_up(&p);
        assert_eq!(b.n(), 9);
        // 3 triangles + 2 edges × 3 colors
        assert_eq!(b.m(), 9 + 6);
    }
}
