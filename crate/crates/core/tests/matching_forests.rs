use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use equipart::matching_forest::{
    boundary, build_exchange_graph, equitable_mf_partition, find_swap_path, is_matching_forest,
    max_boundary_gap, MatchingForest,
};
use equipart::oracle::{
    brute_force_min_gap, check_delta_matroid, enumerate_matching_forests, generate_partitionable,
    Criterion, GeneratorConfig, PartitionKind,
};
use equipart::{Limits, MixedGraph};

fn random_mixed(rng: &mut ChaCha8Rng, n: usize, max_edges: usize, max_arcs: usize) -> MixedGraph {
    let mut pairs = |count: usize| -> Vec<(usize, usize)> {
        (0..count)
            .filter_map(|_| {
                let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
                (u != v).then_some((u, v))
            })
            .collect()
    };
    let edges = pairs(max_edges);
    let arcs = pairs(max_arcs);
    MixedGraph::new(n, edges, arcs).unwrap()
}

/// Independent recursive count: decide element by element, tracking which
/// vertices are covered and the arc forest through a parent map.
fn count_recursive(g: &MixedGraph) -> usize {
    fn reaches(parent: &[Option<usize>], from: usize, to: usize) -> bool {
        let mut v = Some(from);
        while let Some(x) = v {
            if x == to {
                return true;
            }
            v = parent[x];
        }
        false
    }
    fn go(g: &MixedGraph, i: usize, edge_cov: &mut Vec<bool>, parent: &mut Vec<Option<usize>>) -> usize {
        let m = g.edges().len();
        if i == m + g.arcs().len() {
            return 1;
        }
        let mut total = go(g, i + 1, edge_cov, parent);
        if i < m {
            let e = g.edge(i);
            let free = |v: usize| !edge_cov[v] && parent[v].is_none();
            if free(e.u) && free(e.v) {
                edge_cov[e.u] = true;
                edge_cov[e.v] = true;
                total += go(g, i + 1, edge_cov, parent);
                edge_cov[e.u] = false;
                edge_cov[e.v] = false;
            }
        } else {
            let a = g.arcs()[i - m];
            // the tail's root path must not pass through the head
            if !edge_cov[a.head] && parent[a.head].is_none() && !reaches(parent, a.tail, a.head) {
                parent[a.head] = Some(a.tail);
                total += go(g, i + 1, edge_cov, parent);
                parent[a.head] = None;
            }
        }
        total
    }
    go(g, 0, &mut vec![false; g.n()], &mut vec![None; g.n()])
}

#[test]
fn enumeration_matches_recursive_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let limits = Limits::default();
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let g = random_mixed(&mut rng, n, 5, 7);
        let all = enumerate_matching_forests(&g, &limits).unwrap();
        assert_eq!(all.len(), count_recursive(&g), "{g:?}");
        let mut distinct = all.clone();
        distinct.sort_by_key(|f| (f.edges.clone(), f.arcs.clone()));
        distinct.dedup();
        assert_eq!(distinct.len(), all.len());
        assert!(all.iter().all(|f| is_matching_forest(&g, f)));
    }
}

#[test]
fn delta_matroid_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..300 {
        let n = rng.gen_range(1..=6);
        let g = random_mixed(&mut rng, n, 5, 7);
        assert!(check_delta_matroid(&g, &Limits::default()).unwrap(), "{g:?}");
    }
}

fn run(seed: u64, n: usize, k: usize) -> (MixedGraph, Vec<MatchingForest>) {
    let cfg = GeneratorConfig {
        seed,
        n,
        k,
        ..GeneratorConfig::default()
    };
    let inst = generate_partitionable(&cfg, PartitionKind::MatchingForest);
    let g = inst.graph.clone();
    let initial = inst.forest_partition().unwrap();
    let out = equitable_mf_partition(&g, &initial, &Limits::default()).unwrap();
    let mut edges: Vec<usize> = out.parts.iter().flat_map(|f| f.edges.clone()).collect();
    let mut arcs: Vec<usize> = out.parts.iter().flat_map(|f| f.arcs.clone()).collect();
    edges.sort_unstable();
    arcs.sort_unstable();
    assert_eq!(edges, (0..g.edges().len()).collect::<Vec<_>>());
    assert_eq!(arcs, (0..g.arcs().len()).collect::<Vec<_>>());
    for f in &out.parts {
        assert!(is_matching_forest(&g, f), "seed {seed}");
        assert_eq!(boundary(&g, f).len(), f.len() + f.edges.len(), "seed {seed}");
    }
    assert!(max_boundary_gap(&g, &out.parts) <= 2, "seed {seed}");
    assert!(out.potentials.windows(2).all(|w| w[1] + 2 <= w[0]), "seed {seed}");
    (g, out.parts)
}

#[test]
fn wide_sweep() {
    for seed in 0..2000 {
        run(seed, 2 + (seed % 11) as usize, 1 + (seed / 11 % 5) as usize);
    }
}

#[test]
fn large_instances() {
    for seed in 0..10 {
        run(100 + seed, 60, 2 + (seed % 5) as usize);
    }
}

#[test]
fn oracle_gap_is_met() {
    let limits = Limits::default();
    for seed in 0..300 {
        let k = 2 + (seed % 2) as usize;
        let (g, parts) = run(3000 + seed, 2 + (seed % 6) as usize, k);
        if g.element_count() > 10 {
            continue;
        }
        let best = brute_force_min_gap(&g, None, k, Criterion::Boundary, &limits)
            .unwrap()
            .unwrap();
        assert!(max_boundary_gap(&g, &parts) <= best.max(2));
    }
}

#[test]
fn odd_paths_stay_at_gap_two() {
    for len in [3usize, 5, 7, 9] {
        let g = MixedGraph::new(len + 1, (0..len).map(|i| (i, i + 1)), []).unwrap();
        let even: Vec<usize> = (0..len).step_by(2).collect();
        let odd: Vec<usize> = (1..len).step_by(2).collect();
        let initial = vec![MatchingForest::new(even, vec![]), MatchingForest::new(odd, vec![])];
        let out = equitable_mf_partition(&g, &initial, &Limits::default()).unwrap();
        assert_eq!(max_boundary_gap(&g, &out.parts), 2);
        assert_eq!(out.iterations(), 0);
        let h = build_exchange_graph(&g, &initial[0], &initial[1]).unwrap();
        let c1 = boundary(&g, &initial[0]);
        let c2 = boundary(&g, &initial[1]);
        assert!(h.satisfies_invariants(&c1, &c2));
        // the whole path is a component with both ends in the first boundary
        let path = find_swap_path(&h, &c1, &c2).unwrap();
        assert_eq!(path.vertices.len(), len + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn output_is_balanced(seed in any::<u64>(), n in 2usize..12, k in 1usize..5) {
        run(seed, n, k);
    }

    #[test]
    fn boundary_identity(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_mixed(&mut rng, n, 4, 6);
        for f in enumerate_matching_forests(&g, &Limits::default()).unwrap() {
            prop_assert_eq!(boundary(&g, &f).len(), f.len() + f.edges.len());
        }
    }
}
