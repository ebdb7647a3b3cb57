#![allow(dead_code)]

use haarnet_core::basis::{build_all_bases, HaarBasis};
use haarnet_core::chain::{build_chain_from_adjacency, Chain, ChainParams};
use haarnet_core::dense::Matrix;
use haarnet_core::sparse::CscMatrix;
use haarnet_core::synth;
use rand::Rng;

/// 200 Erdős–Rényi graphs (N in [2, 64], p = 0.3) and 20 pathological ones.
pub fn corpus() -> Vec<(String, CscMatrix)> {
    let mut rng = haarnet_core::rng_from_seed(2024);
    let mut out = Vec::new();
    for i in 0..200 {
        let n = rng.gen_range(2..=64);
        out.push((format!("er{i}-n{n}"), synth::erdos_renyi(n, 0.3, &mut rng)));
    }
    out.extend(pathological());
    out
}

pub fn pathological() -> Vec<(String, CscMatrix)> {
    let mut rng = haarnet_core::rng_from_seed(7);
    let mut cases = vec![
        ("path2".to_string(), synth::path(2)),
        ("path9".to_string(), synth::path(9)),
        ("path64".to_string(), synth::path(64)),
        ("star5".to_string(), synth::star(5)),
        ("star40".to_string(), synth::star(40)),
        ("ring3".to_string(), synth::ring(3)),
        ("ring31".to_string(), synth::ring(31)),
        ("complete12".to_string(), synth::complete(12)),
        ("empty2".to_string(), synth::empty(2)),
        ("empty17".to_string(), synth::empty(17)),
        ("two-triangles".to_string(), synth::disjoint_union(&synth::complete(3), &synth::complete(3))),
        ("path-plus-star".to_string(), synth::disjoint_union(&synth::path(10), &synth::star(7))),
        ("three-components".to_string(), synth::disjoint_union(&synth::ring(5), &synth::disjoint_union(&synth::path(4), &synth::complete(6)))),
        ("triangle-plus-isolated".to_string(), synth::disjoint_union(&synth::complete(3), &synth::empty(5))),
        ("er-plus-isolated".to_string(), synth::disjoint_union(&synth::erdos_renyi(30, 0.2, &mut rng), &synth::empty(4))),
        ("sparse-er".to_string(), synth::erdos_renyi(50, 0.02, &mut rng)),
        ("dense-er".to_string(), synth::erdos_renyi(40, 0.95, &mut rng)),
        ("weighted-er".to_string(), synth::weighted_erdos_renyi(33, 0.3, 0.01, 100.0, &mut rng)),
        ("single-edge-plus-isolated".to_string(), synth::disjoint_union(&synth::path(2), &synth::empty(1))),
        ("isolated-then-star".to_string(), synth::disjoint_union(&synth::empty(3), &synth::star(6))),
    ];
    cases.truncate(20);
    cases
}

/// Chain parameter variants exercised on every graph.
pub fn param_variants() -> Vec<ChainParams> {
    vec![
        ChainParams::default(),
        ChainParams { num_levels: 1, ..ChainParams::default() },
        ChainParams { num_levels: 3, ratio: 0.5, collapse_last: false, seed: 5, ..ChainParams::default() },
    ]
}

pub fn chain_and_bases(adj: &CscMatrix, params: &ChainParams) -> (Chain, Vec<HaarBasis>) {
    let chain = build_chain_from_adjacency(adj, params).expect("chain builds");
    let bases = build_all_bases(&chain).expect("bases build");
    (chain, bases)
}

pub fn random_signal(n: usize, d: usize, rng: &mut haarnet_core::Rng) -> Matrix {
    Matrix::from_fn(n, d, |_, _| rng.gen_range(-1.0..1.0))
}
