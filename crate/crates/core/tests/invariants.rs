//! Randomized structural invariants, complementing the oracle-backed
//! acceptance suite.

use graphlim::bslimit::{self, SamplingMode};
use graphlim::embedding::RotationSystem;
use graphlim::graph::Graph;
use graphlim::spectral::{self, LaplacianKind};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Connected multigraph on 2..=8 vertices: random spanning tree plus extras.
fn connected_graph() -> impl Strategy<Value = Graph> {
    (2usize..=8).prop_flat_map(|n| {
        (
            proptest::collection::vec(0usize..usize::MAX, n - 1),
            proptest::collection::vec((0usize..n, 0usize..n), 0..=6),
        )
            .prop_map(move |(parents, extra)| {
                let mut edges: Vec<(usize, usize)> =
                    (1..n).map(|v| (parents[v - 1] % v, v)).collect();
                edges.extend(extra.into_iter().filter(|&(a, b)| a != b));
                Graph::new(n, &edges).expect("endpoints are in range")
            })
    })
}

fn permutation() -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(0u64..u64::MAX, 8).prop_map(|keys| {
        let mut idx: Vec<usize> = (0..8).collect();
        idx.sort_by_key(|&i| keys[i]);
        let mut perm = vec![0usize; 8];
        for (rank, &i) in idx.iter().enumerate() {
            perm[i] = rank;
        }
        perm
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn canonical_code_is_relabeling_invariant(
        g in connected_graph(),
        perm in permutation(),
        root_pick in 0usize..8,
        r in 1usize..=3,
    ) {
        let n = g.vertex_count();
        let root = root_pick % n;
        let perm: Vec<usize> = {
            // restrict the length-8 permutation to the first n labels
            let mut small: Vec<usize> = (0..n).collect();
            small.sort_by_key(|&i| perm[i]);
            let mut inv = vec![0usize; n];
            for (rank, &i) in small.iter().enumerate() {
                inv[i] = rank;
            }
            inv
        };
        let relabeled_edges: Vec<(usize, usize)> =
            g.edges().iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        let h = Graph::new(n, &relabeled_edges).unwrap();
        let code_g = bslimit::canonical_code(&g.ball(root, r).unwrap()).unwrap();
        let code_h = bslimit::canonical_code(&h.ball(perm[root], r).unwrap()).unwrap();
        prop_assert_eq!(code_g, code_h);
    }

    #[test]
    fn distribution_has_unit_mass_and_zero_self_distance(g in connected_graph()) {
        let d = bslimit::neighborhood_distribution(&g, 2, SamplingMode::Exact).unwrap();
        prop_assert!((d.total_mass() - 1.0).abs() < 1e-12);
        prop_assert_eq!(bslimit::tv_distance(&d, &d).unwrap(), 0.0);
    }

    #[test]
    fn edge_list_text_round_trips(g in connected_graph()) {
        let back = Graph::from_edge_list_text(&g.to_edge_list_text()).unwrap();
        prop_assert_eq!(back.vertex_count(), g.vertex_count());
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn cheeger_witness_is_consistent_and_spectrally_bounded(g in connected_graph()) {
        let cut = spectral::cheeger_exact(&g).unwrap();
        prop_assert_eq!(cut.recompute(&g), cut.value);
        let (l2, _) = spectral::dense_lambda2(&g, LaplacianKind::Combinatorial).unwrap();
        prop_assert!(l2 / 2.0 <= cut.value + 1e-9);
    }

    #[test]
    fn rotation_text_round_trips_and_fill_triangulates(g in connected_graph(), seed in 0u64..1024) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rs = RotationSystem::random(&g, &mut rng).unwrap();
        let back = RotationSystem::from_text(&rs.to_text()).unwrap();
        prop_assert_eq!(back.rotations(), rs.rotations());
        // triangulation needs every face boundary to have length >= 3
        if rs.trace_faces().lengths().iter().all(|&l| l >= 3) {
            let filled = graphlim::embedding::triangulate_fill(&rs, g.max_degree()).unwrap();
            prop_assert!(filled.trace_faces().lengths().iter().all(|&l| l == 3));
            prop_assert_eq!(filled.euler_genus().unwrap(), rs.euler_genus().unwrap());
        }
    }
}
