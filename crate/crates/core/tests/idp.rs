use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use equipart::bbranching::is_b_branching;
use equipart::idp::{check_decomposition, decompose, partition_into_k_bbranchings, IdpQuery};
use equipart::oracle::{enumerate_b_branchings, find_partition};
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
fn k_partition_matches_the_oracle() {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut found = 0;
    for _ in 0..600 {
        let n = rng.gen_range(2..=5);
        let d = random_digraph(&mut rng, n, 9);
        let b: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
        let k = rng.gen_range(1..=3);
        let got = partition_into_k_bbranchings(&d, &b, k, &limits).unwrap();
        let g = MixedGraph::from_digraph(d.clone());
        let expected = find_partition(&g, Some(&b), k, &limits).unwrap();
        assert_eq!(got.is_some(), expected.is_some(), "{d:?} b={b:?} k={k}");
        if let Some(parts) = got {
            found += 1;
            assert_eq!(parts.len(), k);
            let mut all: Vec<usize> = parts.iter().flatten().copied().collect();
            all.sort_unstable();
            assert_eq!(all, d.all_arcs());
            assert!(parts.iter().all(|p| is_b_branching(&d, &b, p)));
        }
    }
    assert!(found > 100, "{found}");
}

/// Whether `x` is a sum of `kappa` incidence vectors of b-branchings, by
/// dynamic search over the enumerated family.
fn is_sum(d: &Digraph, b: &[usize], x: &[usize], kappa: usize, limits: &Limits) -> bool {
    fn go(family: &[Vec<usize>], from: usize, rest: &mut Vec<usize>, left: usize) -> bool {
        if left == 0 {
            return rest.iter().all(|&r| r == 0);
        }
        for i in from..family.len() {
            if family[i].iter().all(|&a| rest[a] > 0) {
                family[i].iter().for_each(|&a| rest[a] -= 1);
                let ok = go(family, i, rest, left - 1);
                family[i].iter().for_each(|&a| rest[a] += 1);
                if ok {
                    return true;
                }
            }
        }
        false
    }
    let family = enumerate_b_branchings(d, b, limits).unwrap();
    go(&family, 0, &mut x.to_vec(), kappa)
}

#[test]
fn decompose_decides_like_brute_force() {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let (mut yes, mut no) = (0, 0);
    for _ in 0..400 {
        let n = rng.gen_range(2..=4);
        let d = random_digraph(&mut rng, n, 6);
        let b: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
        let kappa = rng.gen_range(1..=3);
        let x: Vec<usize> = (0..d.arc_count()).map(|_| rng.gen_range(0..=kappa)).collect();
        let q = IdpQuery {
            kappa,
            ell: None,
            vprime: vec![],
            bprime: vec![],
        };
        let got = decompose(&d, &b, &x, &q, &limits).unwrap();
        assert_eq!(got.is_some(), is_sum(&d, &b, &x, kappa, &limits), "{d:?} b={b:?} x={x:?}");
        if let Some(parts) = got {
            yes += 1;
            check_decomposition(&d, &b, &x, &q, &parts).unwrap();
            // the unconstrained decomposition is still equitable
            let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
            assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        } else {
            no += 1;
        }
    }
    assert!(yes > 50 && no > 20, "{yes} / {no}");
}

#[test]
fn stacked_copies_of_one_b_branching() {
    // κ copies of the same b-branching decompose back into κ copies
    let d = Digraph::new(4, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 1)]).unwrap();
    let b = [1, 2, 2, 1];
    let base = [0usize, 1, 2, 3];
    assert!(is_b_branching(&d, &b, &base));
    for kappa in 1..=4 {
        let mut x = vec![0; 5];
        base.iter().for_each(|&a| x[a] = kappa);
        let q = IdpQuery {
            kappa,
            ell: Some(4),
            vprime: vec![0, 1, 2, 3],
            bprime: vec![0, 1, 2, 1],
        };
        let parts = decompose(&d, &b, &x, &q, &Limits::default()).unwrap().unwrap();
        assert!(parts.iter().all(|p| p == &base));
    }
}

#[test]
fn query_errors_name_the_field() {
    let d = Digraph::new(2, [(0, 1)]).unwrap();
    let limits = Limits::default();
    let q = |vprime: Vec<usize>, bprime: Vec<usize>| IdpQuery {
        kappa: 1,
        ell: None,
        vprime,
        bprime,
    };
    let err = decompose(&d, &[1, 1], &[1, 1], &q(vec![], vec![]), &limits).unwrap_err();
    assert!(err.to_string().starts_with("x:"), "{err}");
    let err = decompose(&d, &[1, 1], &[1], &q(vec![5], vec![0]), &limits).unwrap_err();
    assert!(err.to_string().starts_with("Vprime[0]:"), "{err}");
    let err = decompose(&d, &[1, 1], &[1], &q(vec![1], vec![2]), &limits).unwrap_err();
    assert!(err.to_string().starts_with("bprime[0]:"), "{err}");
    let err = decompose(&d, &[1, 1], &[1], &q(vec![1, 1], vec![1, 1]), &limits).unwrap_err();
    assert!(err.to_string().contains("repeated"), "{err}");
}

/// κ b-branchings sharing one indegree vector, summed into `x`.
fn same_indegree_sum(rng: &mut ChaCha8Rng, n: usize, kappa: usize, b_max: usize) -> (Digraph, Vec<usize>, Vec<usize>, Vec<usize>) {
    let b: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=b_max)).collect();
    let target: Vec<usize> = (0..n).map(|v| rng.gen_range(0..=b[v].min(n - 1))).collect();
    let mut parts: Vec<Vec<(usize, usize)>> = Vec::new();
    'outer: while parts.len() < kappa {
        for _ in 0..200 {
            let mut part: Vec<(usize, usize)> = Vec::new();
            for v in 0..n {
                let mut tails: Vec<usize> = (0..n).filter(|&t| t != v).collect();
                for _ in 0..target[v] {
                    let t = tails.swap_remove(rng.gen_range(0..tails.len()));
                    part.push((t, v));
                }
            }
            let d = Digraph::new(n, part.iter().copied()).unwrap();
            if is_b_branching(&d, &b, &d.all_arcs()) {
                parts.push(part);
                continue 'outer;
            }
        }
        // no b-branching with this indegree vector turned up
        return path_sum(rng, n, kappa, b);
    }
    let mut pairs: Vec<(usize, usize)> = parts.iter().flatten().copied().collect();
    pairs.sort_unstable();
    pairs.dedup();
    let d = Digraph::new(n, pairs.iter().copied()).unwrap();
    let mut x = vec![0; pairs.len()];
    for p in parts.iter().flatten() {
        x[pairs.binary_search(p).unwrap()] += 1;
    }
    (d, b, x, target)
}

/// κ copies of a random Hamiltonian path.
fn path_sum(rng: &mut ChaCha8Rng, n: usize, kappa: usize, b: Vec<usize>) -> (Digraph, Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let arcs: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0], w[1])).collect();
    let d = Digraph::new(n, arcs).unwrap();
    let target = d.indegrees_of(&d.all_arcs());
    (d.clone(), b, vec![kappa; d.arc_count()], target)
}

#[test]
fn equal_indegree_sums_decompose() {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    for case in 0..1000 {
        let n = rng.gen_range(2..=7);
        let kappa = rng.gen_range(1..=4);
        let (d, b, x, target) = same_indegree_sum(&mut rng, n, kappa, 3);
        let size: usize = target.iter().sum();
        let q = IdpQuery {
            kappa,
            ell: Some(size),
            vprime: (0..n).collect(),
            bprime: target,
        };
        let parts = decompose(&d, &b, &x, &q, &limits)
            .unwrap_or_else(|e| panic!("case {case}: {e}"))
            .unwrap_or_else(|| panic!("case {case}: reported infeasible"));
        check_decomposition(&d, &b, &x, &q, &parts).unwrap();
    }
}
