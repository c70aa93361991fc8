mod common;

use common::{best_modularity, for_each_partition};
use peergraph::cgraph::BetaParams;
use peergraph::clustering::{
    cluster_profile, louvain_bipartite, modularity, symmetrize, BipartiteGraph, LouvainOptions,
};
use peergraph::synthetic::{random_graph, SnapshotShape};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Bipartite graph with the modularity written out pair by pair.
fn naive_modularity(red: &[bool], w: &[Vec<f64>], p: &[usize]) -> f64 {
    let n = red.len();
    let m: f64 = (0..n).filter(|&i| red[i]).flat_map(|i| w[i].iter()).sum();
    let deg = |i: usize| w[i].iter().sum::<f64>();
    let mut q = 0.0;
    for i in (0..n).filter(|&i| red[i]) {
        for j in (0..n).filter(|&j| !red[j]) {
            if p[i] == p[j] {
                q += w[i][j] - deg(i) * deg(j) / m;
            }
        }
    }
    q / m
}

fn random_small(rng: &mut ChaCha8Rng) -> (Vec<bool>, Vec<Vec<f64>>, BipartiteGraph) {
    let n = rng.gen_range(2..=8);
    let red: Vec<bool> = (0..n).map(|i| i == 0 || (i != 1 && rng.gen_bool(0.5))).collect();
    let mut w = vec![vec![0.0; n]; n];
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if red[i] && !red[j] && rng.gen_bool(0.6) {
                let x = rng.gen_range(1..=5) as f64;
                w[i][j] = x;
                w[j][i] = x;
                edges.push((i, j, x));
            }
        }
    }
    let a = BipartiteGraph::new(red.clone(), &edges).unwrap();
    (red, w, a)
}

#[test]
fn evaluator_matches_pairwise_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let (red, w, a) = random_small(&mut rng);
        if a.total_weight() == 0.0 {
            continue;
        }
        for_each_partition(a.n().min(6), &mut |p| {
            let mut full = p.to_vec();
            full.extend(a.n().min(6)..a.n());
            assert!((modularity(&a, &full) - naive_modularity(&red, &w, &full)).abs() < 1e-12);
        });
    }
}

#[test]
fn near_optimal_on_tiny_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut exact = 0;
    let trials = 300;
    for _ in 0..trials {
        let (_, _, a) = random_small(&mut rng);
        let best = best_modularity(&a);
        let p = louvain_bipartite(&a, LouvainOptions::default());
        assert!((p.modularity - modularity(&a, &p.assignment)).abs() < 1e-12);
        assert!(
            p.modularity >= 0.95 * best - 1e-12,
            "louvain {} vs optimum {best}",
            p.modularity
        );
        if (p.modularity - best).abs() < 1e-12 {
            exact += 1;
        }
    }
    assert!(exact * 10 >= trials * 9);
}

#[test]
fn single_edge_matches_exhaustive_optimum() {
    let a = BipartiteGraph::new(vec![true, false], &[(0, 1, 1.0)]).unwrap();
    let p = louvain_bipartite(&a, LouvainOptions::default());
    assert_eq!(p.modularity, best_modularity(&a));
}

#[test]
fn components_are_never_merged() {
    // Two copies of a 2x3 biclique plus a pendant edge each.
    let red = vec![
        true, true, false, false, false, true, true, true, false, false, false, true,
    ];
    let mut edges = Vec::new();
    for off in [0, 6] {
        for r in [0, 1] {
            for b in [2, 3, 4] {
                edges.push((off + r, off + b, 1.0));
            }
        }
        edges.push((off + 5, off + 4, 0.5));
    }
    let a = BipartiteGraph::new(red, &edges).unwrap();
    for seed in [None, Some(1), Some(2), Some(3)] {
        let p = louvain_bipartite(
            &a,
            LouvainOptions {
                seed,
                ..Default::default()
            },
        );
        for i in 0..6 {
            for j in 6..12 {
                assert_ne!(p.assignment[i], p.assignment[j]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn history_never_decreases(seed in 0u64..10_000, order_seed in proptest::option::of(0u64..100)) {
        let g = random_graph(seed, SnapshotShape { n_as: 60, n_ixp: 12, max_memberships: 3, max_ports: 1 }, BetaParams::default()).unwrap();
        let a = symmetrize(&g);
        let p = louvain_bipartite(&a, LouvainOptions { seed: order_seed, ..Default::default() });
        prop_assert!(p.history.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        prop_assert!((p.modularity - modularity(&a, &p.assignment)).abs() < 1e-12);
        let k = p.n_communities();
        prop_assert!((0..k).all(|c| p.assignment.contains(&c)));
        let prof = cluster_profile(&p, &g).unwrap();
        prop_assert!((prof.iter().map(|c| c.capacity_share).sum::<f64>() - 100.0).abs() < 1e-9);
        prop_assert!((prof.iter().map(|c| c.ixp_share).sum::<f64>() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn symmetrized_matrix_is_symmetric(seed in 0u64..10_000) {
        let g = random_graph(seed, SnapshotShape::default(), BetaParams::default()).unwrap();
        let a = symmetrize(&g);
        for u in 0..a.n() {
            for &(v, w) in a.neighbors(u) {
                prop_assert_eq!(a.weight(v, u), w);
            }
        }
    }
}
