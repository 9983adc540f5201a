use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use equipart::branching::{
    balanced_root_spec, disjoint_branchings_with_roots, equitable_branching_partition,
    is_branching, roots,
};
use equipart::oracle::{
    brute_force_min_gap, generate_partitionable, Criterion, GeneratorConfig, PartitionKind,
};
use equipart::{Digraph, Limits, MixedGraph, VertexSet};

fn sorted(parts: &[Vec<usize>]) -> Vec<usize> {
    let mut all: Vec<usize> = parts.iter().flatten().copied().collect();
    all.sort_unstable();
    all
}

fn run(seed: u64, n: usize, k: usize) {
    let cfg = GeneratorConfig {
        seed,
        n,
        k,
        ..GeneratorConfig::default()
    };
    let inst = generate_partitionable(&cfg, PartitionKind::Branching);
    let d = inst.digraph();
    let initial = inst.arc_partition().unwrap();
    let out = equitable_branching_partition(d, &initial, &Limits::default()).unwrap();
    assert_eq!(sorted(&out.parts), d.all_arcs(), "seed {seed}");
    let (lo, hi) = (d.arc_count() / k, d.arc_count().div_ceil(k));
    for p in &out.parts {
        assert!(is_branching(d, p), "seed {seed}");
        assert!(lo <= p.len() && p.len() <= hi, "seed {seed}");
    }
    assert!(out.potentials.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn wide_sweep() {
    for seed in 0..2000 {
        run(seed, 2 + (seed % 11) as usize, 1 + (seed / 11 % 5) as usize);
    }
}

#[test]
fn beyond_the_exhaustive_cut_check() {
    // n > 16 sends the cut condition through max-flow
    for seed in 0..20 {
        run(900 + seed, 30 + seed as usize, 2 + (seed % 4) as usize);
    }
}

#[test]
fn sizes_match_brute_force() {
    let limits = Limits::default();
    for seed in 0..300 {
        let cfg = GeneratorConfig {
            seed: 5000 + seed,
            n: 2 + (seed % 5) as usize,
            k: 2 + (seed % 2) as usize,
            ..GeneratorConfig::default()
        };
        let inst = generate_partitionable(&cfg, PartitionKind::Branching);
        let d = inst.digraph();
        if d.arc_count() > 9 {
            continue;
        }
        let g = MixedGraph::from_digraph(d.clone());
        let best = brute_force_min_gap(&g, None, cfg.k, Criterion::Size, &limits)
            .unwrap()
            .unwrap();
        let expected = usize::from(!d.arc_count().is_multiple_of(cfg.k));
        assert_eq!(best, expected, "seed {}", cfg.seed);
    }
}

/// Every way of splitting the arcs into two branchings with the given roots.
fn exhaustive_pair(d: &Digraph, r: &[VertexSet; 2]) -> bool {
    let m = d.arc_count();
    (0..1u32 << m).any(|mask| {
        let s1: Vec<usize> = (0..m).filter(|&a| mask >> a & 1 == 1).collect();
        let s2: Vec<usize> = (0..m).filter(|&a| mask >> a & 1 == 0).collect();
        is_branching(d, &s1) && is_branching(d, &s2) && roots(d, &s1) == r[0] && roots(d, &s2) == r[1]
    })
}

#[test]
fn root_constrained_packing_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let limits = Limits::default();
    let mut feasible = 0;
    for _ in 0..1500 {
        let n = rng.gen_range(1..=5);
        let r: [VertexSet; 2] = std::array::from_fn(|_| {
            let mut s: VertexSet = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
            if s.is_empty() {
                s.insert(rng.gen_range(0..n));
            }
            s
        });
        let m = 2 * n - r[0].len() - r[1].len();
        let arcs: Vec<(usize, usize)> = (0..m)
            .map(|_| {
                let t = rng.gen_range(0..n);
                (t, (t + rng.gen_range(1..n.max(2))) % n)
            })
            .filter(|&(t, h)| t != h)
            .collect();
        if arcs.len() != m || m > 9 {
            continue;
        }
        let d = Digraph::new(n, arcs).unwrap();
        let got = disjoint_branchings_with_roots(&d, &r, &limits).unwrap();
        let expected = exhaustive_pair(&d, &r);
        assert_eq!(got.is_some(), expected, "{d:?} {r:?}");
        if let Some(parts) = got {
            feasible += 1;
            for (p, roots_i) in parts.iter().zip(&r) {
                assert!(is_branching(&d, p));
                assert_eq!(&roots(&d, p), roots_i);
            }
        }
    }
    assert!(feasible > 50, "only {feasible} feasible cases");
}

#[test]
fn balanced_roots_keep_the_pair_repartitionable() {
    for seed in 0..500 {
        let cfg = GeneratorConfig {
            seed: 7000 + seed,
            n: 3 + (seed % 8) as usize,
            k: 2,
            ..GeneratorConfig::default()
        };
        let inst = generate_partitionable(&cfg, PartitionKind::Branching);
        let d = inst.digraph();
        let parts = inst.arc_partition().unwrap();
        let spec = balanced_root_spec(d, &parts[0], &parts[1]);
        assert!(spec.is_compatible(&roots(d, &parts[0]), &roots(d, &parts[1])));
        assert!(spec.r1.len().abs_diff(spec.r2.len()) <= 1, "seed {}", cfg.seed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn output_is_an_equitable_partition(seed in any::<u64>(), n in 2usize..10, k in 1usize..5) {
        run(seed, n, k);
    }
}
