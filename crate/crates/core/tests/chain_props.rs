use haarnet_core::chain::{build_chain_from_adjacency, ChainParams, ClusterMethod};
use haarnet_core::sparse::CscMatrix;
use haarnet_core::synth;
use proptest::prelude::*;

fn graph(n: usize, p: f64, seed: u64, weighted: bool) -> CscMatrix {
    let mut rng = haarnet_core::rng_from_seed(seed);
    if weighted {
        synth::weighted_erdos_renyi(n, p, 0.1, 3.0, &mut rng)
    } else {
        synth::erdos_renyi(n, p, &mut rng)
    }
}

fn params() -> impl Strategy<Value = ChainParams> {
    (1usize..4, 0.15f64..0.8, any::<bool>(), any::<u64>(), prop_oneof![
        Just(ClusterMethod::Spectral),
        Just(ClusterMethod::HeavyEdge),
        Just(ClusterMethod::default()),
    ])
        .prop_map(|(num_levels, ratio, collapse_last, seed, method)| ChainParams {
            num_levels,
            ratio,
            collapse_last,
            seed,
            method,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parents_cover_every_coarse_node(
        n in 1usize..48, p in 0.0f64..0.6, gseed in any::<u64>(), w in any::<bool>(), params in params()
    ) {
        let adj = graph(n, p, gseed, w);
        let chain = build_chain_from_adjacency(&adj, &params).unwrap();
        prop_assert_eq!(chain.num_nodes(chain.finest()), n);
        if params.collapse_last {
            prop_assert_eq!(chain.num_nodes(0), 1);
        }
        for j in 1..=chain.finest() {
            let level = chain.level(j);
            let coarse = chain.num_nodes(j - 1);
            prop_assert!(coarse <= level.num_nodes());
            prop_assert!(coarse < level.num_nodes() || level.num_nodes() == 1);
            let sizes = chain.cluster_sizes(j);
            prop_assert_eq!(sizes.len(), coarse);
            prop_assert!(sizes.iter().all(|&s| s >= 1));
            prop_assert_eq!(sizes.iter().sum::<usize>(), level.num_nodes());
            prop_assert!(level.parent.iter().all(|&q| q < coarse));
            for q in 0..coarse {
                for &c in chain.children(j, q) {
                    prop_assert_eq!(level.parent[c], q);
                }
            }
        }
    }

    #[test]
    fn coarsening_conserves_inter_cluster_weight(
        n in 2usize..40, p in 0.05f64..0.7, gseed in any::<u64>(), params in params()
    ) {
        let adj = graph(n, p, gseed, true);
        let chain = build_chain_from_adjacency(&adj, &params).unwrap();
        for j in 1..=chain.finest() {
            let fine = chain.level(j);
            let coarse = &chain.level(j - 1).adjacency;
            let k = coarse.rows();
            let mut expected = vec![0.0; k * k];
            let mut intra = 0.0;
            for (a, b, wt) in fine.adjacency.triplets() {
                let (pa, pb) = (fine.parent[a], fine.parent[b]);
                if pa == pb {
                    intra += wt;
                } else {
                    expected[pa * k + pb] += wt;
                }
            }
            for pa in 0..k {
                prop_assert_eq!(coarse.get(pa, pa), 0.0);
                for pb in 0..k {
                    prop_assert!((coarse.get(pa, pb) - expected[pa * k + pb]).abs() < 1e-9);
                }
            }
            let fine_total: f64 = fine.adjacency.values().iter().sum();
            let coarse_total: f64 = coarse.values().iter().sum();
            prop_assert!((fine_total - intra - coarse_total).abs() < 1e-9 * fine_total.max(1.0));
        }
    }

    #[test]
    fn construction_is_deterministic_and_ordered(
        n in 1usize..40, p in 0.0f64..0.6, gseed in any::<u64>(), params in params()
    ) {
        let adj = graph(n, p, gseed, false);
        let a = build_chain_from_adjacency(&adj, &params).unwrap();
        let b = build_chain_from_adjacency(&adj, &params).unwrap();
        prop_assert_eq!(&a, &b);
        for j in 0..=a.finest() {
            let level = a.level(j);
            let mut order = level.node_order.clone();
            order.sort_unstable();
            prop_assert_eq!(order, (0..level.num_nodes()).collect::<Vec<_>>());
            if j < a.finest() {
                prop_assert_eq!(level.node_order.clone(), (0..level.num_nodes()).collect::<Vec<_>>());
            }
            let degree = level.adjacency.column_sums();
            for w in level.node_order.windows(2) {
                prop_assert!(degree[w[0]] >= degree[w[1]]);
            }
        }
    }
}
