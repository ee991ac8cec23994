use derand_core::graph::{check_mis, check_spanner, generate, Graph, GraphSpec, SpannerVerdict};
use derand_core::mis::color::coloring_conflict;
use derand_core::mis::engine::bounded_delta_gate;
use derand_core::mis::{
    color_via_mis, det_mis_bounded_delta, det_mis_clique, det_mis_congest, rand_mis_clique, MisConfig, MisOutcome,
};
use derand_core::num::int;
use derand_core::sim::ModelKind;
use derand_core::spanner::{det_spanner, psi_below_one, rand_spanner, SpannerConfig};
use proptest::prelude::*;

fn small_graph() -> impl Strategy<Value = Graph> {
    let spec = prop_oneof![
        (2usize..=20, 0.05f64..0.7).prop_map(|(n, p)| GraphSpec::Gnp { n, p }),
        (1usize..=4, 1usize..=5).prop_map(|(rows, cols)| GraphSpec::Grid { rows, cols }),
        (1usize..=12).prop_map(|n| GraphSpec::Clique { n }),
        (1usize..=20).prop_map(|n| GraphSpec::Path { n }),
        (3usize..=20).prop_map(|n| GraphSpec::Cycle { n }),
        (2usize..=20).prop_map(|n| GraphSpec::RandomTree { n }),
    ];
    (spec, any::<u64>()).prop_map(|(s, seed)| generate(&s, seed).unwrap())
}

fn assert_certified(g: &Graph, out: &MisOutcome) {
    for phase in &out.report.phases {
        assert!(phase.initial_exact >= phase.floor_exact, "phase {}", phase.phase);
    }
    if let Some(r) = out.report.residual_edges_at_handoff {
        assert!(r <= 4 * g.n(), "residual {r} on n = {}", g.n());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn every_mis_variant_is_valid(g in small_graph(), seed in any::<u64>()) {
        let cfg = MisConfig::default();
        let r = rand_mis_clique(&g, &cfg, seed).unwrap();
        prop_assert!(check_mis(&g, &r.set).is_valid());
        for kind in [ModelKind::Clique, ModelKind::BroadcastClique] {
            let d = det_mis_clique(&g, &cfg, kind).unwrap();
            prop_assert!(check_mis(&g, &d.set).is_valid());
            assert_certified(&g, &d);
        }
        let c = det_mis_congest(&g, &cfg).unwrap();
        prop_assert!(check_mis(&g, &c.set).is_valid());
        assert_certified(&g, &c);
        if bounded_delta_gate(&g, &cfg) {
            let b = det_mis_bounded_delta(&g, &cfg).unwrap();
            prop_assert!(check_mis(&g, &b.set).is_valid());
            assert_certified(&g, &b);
        } else {
            prop_assert!(det_mis_bounded_delta(&g, &cfg).unwrap_err().is_parameter());
        }
    }

    #[test]
    fn deterministic_mis_repeats_exactly(g in small_graph()) {
        let cfg = MisConfig::default();
        let a = det_mis_clique(&g, &cfg, ModelKind::Clique).unwrap();
        let b = det_mis_clique(&g, &cfg, ModelKind::Clique).unwrap();
        prop_assert_eq!(a.set, b.set);
        prop_assert_eq!(a.metrics, b.metrics);
    }

    #[test]
    fn coloring_is_proper(g in small_graph()) {
        let cfg = MisConfig::default();
        let out = color_via_mis(&g, &cfg).unwrap();
        prop_assert_eq!(coloring_conflict(&g, &out.colors), None);
        prop_assert!(out.colors.iter().all(|&c| c <= g.max_degree()));
    }

    #[test]
    fn spanners_meet_stretch(g in small_graph(), k in 1u32..=3, seed in any::<u64>()) {
        let cfg = SpannerConfig::default();
        let bound = int(2 * k as i64 - 1);
        for out in [rand_spanner(&g, k, seed, &cfg).unwrap(), det_spanner(&g, k, &cfg).unwrap()] {
            match check_spanner(&g, &out.edges, k) {
                SpannerVerdict::Valid { max_stretch } => prop_assert!(max_stretch <= bound),
                v => prop_assert!(false, "{v}"),
            }
        }
    }

    #[test]
    fn det_spanner_certifies_every_step(g in small_graph(), k in 2u32..=3) {
        let out = det_spanner(&g, k, &SpannerConfig::default()).unwrap();
        for it in &out.report.iterations {
            prop_assert!(psi_below_one(it));
            if let Some(thr) = it.cluster_threshold {
                prop_assert!((it.clusters_after as u64) < thr);
                prop_assert!(it.max_additions <= out.report.t_edges.ceil() as u64);
            }
        }
    }
}

#[test]
fn cliques_finish_quickly() {
    let g = generate(&GraphSpec::Clique { n: 32 }, 0).unwrap();
    let out = det_mis_clique(&g, &MisConfig::default(), ModelKind::Clique).unwrap();
    assert_eq!(out.set.len(), 1);
    assert!(out.report.phases_run <= 8, "{} phases", out.report.phases_run);
}

#[test]
fn det_spanner_sparsifies_dense_graphs() {
    let g = generate(&GraphSpec::Clique { n: 32 }, 0).unwrap();
    let out = det_spanner(&g, 2, &SpannerConfig::default()).unwrap();
    assert!(check_spanner(&g, &out.edges, 2).is_valid());
    assert!(out.edges.len() < g.m() / 2, "{} of {}", out.edges.len(), g.m());
}
