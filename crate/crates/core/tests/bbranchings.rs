use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use equipart::bbranching::{
    b_potential, build_indegree_targets, equitable_b_partition, is_b_branching,
    repartition_two_bbranchings, TargetPair,
};
use equipart::branching::is_branching;
use equipart::oracle::{
    brute_force_min_gap, enumerate_b_branchings, generate_partitionable, Criterion,
    GeneratorConfig, PartitionKind,
};
use equipart::{Digraph, Limits, MixedGraph};

fn random_digraph(rng: &mut ChaCha8Rng, n: usize, max_arcs: usize) -> Digraph {
    let arcs: Vec<(usize, usize)> = (0..rng.gen_range(0..=max_arcs))
        .filter_map(|_| {
            let (t, h) = (rng.gen_range(0..n), rng.gen_range(0..n));
            (t != h).then_some((t, h))
        })
        .collect();
    Digraph::new(n, arcs).unwrap()
}

#[test]
fn enumeration_is_the_filtered_power_set() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let limits = Limits::default();
    for _ in 0..200 {
        let n = rng.gen_range(1..=5);
        let d = random_digraph(&mut rng, n, 8);
        let b: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let all = enumerate_b_branchings(&d, &b, &limits).unwrap();
        let m = d.arc_count();
        let filtered = (0..1u32 << m)
            .filter(|mask| {
                let s: Vec<usize> = (0..m).filter(|&a| mask >> a & 1 == 1).collect();
                is_b_branching(&d, &b, &s)
            })
            .count();
        assert_eq!(all.len(), filtered);

        let ones = vec![1; n];
        let unit = enumerate_b_branchings(&d, &ones, &limits).unwrap();
        let branchings = enumerate_b_branchings(&d, &ones, &limits)
            .unwrap()
            .into_iter()
            .filter(|s| is_branching(&d, s))
            .count();
        assert_eq!(unit.len(), branchings);
    }
}

fn run(seed: u64, n: usize, k: usize, b_max: usize) {
    let cfg = GeneratorConfig {
        seed,
        n,
        k,
        b_max,
        ..GeneratorConfig::default()
    };
    let inst = generate_partitionable(&cfg, PartitionKind::BBranching);
    let d = inst.digraph();
    let b = inst.b.clone().unwrap();
    let initial = inst.arc_partition().unwrap();
    let out = equitable_b_partition(d, &b, &initial, &Limits::default())
        .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
    let mut all: Vec<usize> = out.parts.iter().flatten().copied().collect();
    all.sort_unstable();
    assert_eq!(all, d.all_arcs());
    assert_eq!(b_potential(d, &out.parts), 0, "seed {seed}");
    assert!(out.parts.iter().all(|p| is_b_branching(d, &b, p)), "seed {seed}");
    assert!(out.potentials.windows(2).all(|w| w[1] < w[0]), "seed {seed}");
}

#[test]
fn wide_sweep() {
    for seed in 0..2000 {
        run(seed, 2 + (seed % 9) as usize, 1 + (seed / 9 % 5) as usize, 1 + (seed % 4) as usize);
    }
}

#[test]
fn larger_instances() {
    for seed in 0..20 {
        run(500 + seed, 12 + seed as usize, 2 + (seed % 4) as usize, 4);
    }
}

#[test]
fn sizes_and_indegrees_match_brute_force() {
    let limits = Limits::default();
    for seed in 0..200 {
        let cfg = GeneratorConfig {
            seed: 9000 + seed,
            n: 2 + (seed % 4) as usize,
            k: 2 + (seed % 2) as usize,
            b_max: 2,
            ..GeneratorConfig::default()
        };
        let inst = generate_partitionable(&cfg, PartitionKind::BBranching);
        let d = inst.digraph();
        if d.arc_count() > 9 {
            continue;
        }
        let b = inst.b.clone().unwrap();
        let g = MixedGraph::from_digraph(d.clone());
        let size = brute_force_min_gap(&g, Some(&b), cfg.k, Criterion::Size, &limits)
            .unwrap()
            .unwrap();
        assert_eq!(size, usize::from(!d.arc_count().is_multiple_of(cfg.k)));
        let deg = brute_force_min_gap(&g, Some(&b), cfg.k, Criterion::Indegree, &limits)
            .unwrap()
            .unwrap();
        assert!(deg <= 1);
    }
}

#[test]
fn repartition_matches_two_colorings() {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let (mut yes, mut no) = (0, 0);
    for seed in 0..1000 {
        let n = rng.gen_range(2..=4);
        let cfg = GeneratorConfig {
            seed: 11_000 + seed,
            n,
            k: 2,
            b_max: 2,
            arc_density: rng.gen_range(0.3..1.0),
            ..GeneratorConfig::default()
        };
        let inst = generate_partitionable(&cfg, PartitionKind::BBranching);
        let d = inst.digraph();
        if d.arc_count() > 8 {
            continue;
        }
        let b = inst.b.clone().unwrap();
        let parts = inst.arc_partition().unwrap();
        let union: Vec<usize> = d.all_arcs();
        let deg = d.indegrees_of(&union);
        let first: Vec<usize> = (0..n)
            .map(|v| rng.gen_range(deg[v].saturating_sub(b[v])..=deg[v].min(b[v])))
            .collect();
        let second = (0..n).map(|v| deg[v] - first[v]).collect();
        let targets = TargetPair { first, second };
        let got = repartition_two_bbranchings(d, &b, &parts[0], &parts[1], &targets, &limits).unwrap();
        let m = union.len();
        let fits = |s: &[usize], t: &[usize]| is_b_branching(d, &b, s) && d.indegrees_of(s) == t;
        let expected = (0..1u32 << m).any(|mask| {
            let s1: Vec<usize> = (0..m).filter(|&a| mask >> a & 1 == 1).collect();
            let s2: Vec<usize> = (0..m).filter(|&a| mask >> a & 1 == 0).collect();
            fits(&s1, &targets.first) && fits(&s2, &targets.second)
        });
        assert_eq!(got.is_some(), expected, "seed {}", cfg.seed);
        if expected {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes > 100 && no > 10, "{yes} feasible, {no} infeasible");
}

#[test]
fn balancing_targets_are_always_feasible() {
    let limits = Limits::default();
    for seed in 0..1000 {
        let cfg = GeneratorConfig {
            seed: 13_000 + seed,
            n: 2 + (seed % 8) as usize,
            k: 2,
            b_max: 1 + (seed % 4) as usize,
            ..GeneratorConfig::default()
        };
        let inst = generate_partitionable(&cfg, PartitionKind::BBranching);
        let d = inst.digraph();
        let b = inst.b.clone().unwrap();
        let parts = inst.arc_partition().unwrap();
        let t = build_indegree_targets(d, &b, &parts[0], &parts[1]).unwrap();
        assert!(t.satisfies_invariants(d, &b, &d.all_arcs()), "seed {}", cfg.seed);
        let total: usize = t.first.iter().sum::<usize>().abs_diff(t.second.iter().sum());
        assert!(total <= 1, "seed {}", cfg.seed);
        assert!(
            repartition_two_bbranchings(d, &b, &parts[0], &parts[1], &t, &limits)
                .unwrap()
                .is_some(),
            "seed {}",
            cfg.seed
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn output_is_equitable(seed in any::<u64>(), n in 2usize..9, k in 1usize..5, b_max in 1usize..5) {
        run(seed, n, k, b_max);
    }

    #[test]
    fn unit_capacity_is_branching(seed in any::<u64>(), n in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_digraph(&mut rng, n, 10);
        let subset: Vec<usize> = (0..d.arc_count()).filter(|_| rng.gen_bool(0.5)).collect();
        prop_assert_eq!(is_b_branching(&d, &vec![1; n], &subset), is_branching(&d, &subset));
    }
}
