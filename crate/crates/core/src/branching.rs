//! Branchings: validity, root sets, packing disjoint branchings with
//! prescribed root sets, and equitable partition into k branchings.
//!
//! The packing routine grows one branching at a time. A state is a family of
//! reached sets `S_i` (initially the requested roots) plus the arcs not yet
//! used; it is completable iff every nonempty `X ⊆ V` is entered by at least
//! as many unused arcs as there are indices `i` with `X ∩ S_i = ∅`. Growing
//! `S_i` along an arc that keeps this cut condition is always possible while
//! `S_i ≠ V`, so the loop never backtracks.

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::{Arc, Digraph, VertexSet};
use crate::{check_index_partition, pairwise_gap_sum, Balanced, Limits};

/// Indegree at most one everywhere and no cycle.
pub fn is_branching(d: &Digraph, subset: &[usize]) -> bool {
    let n = d.n();
    let mut has_parent = vec![false; n];
    let mut used = vec![false; d.arc_count()];
    let mut dsu = Dsu::new(n);
    for &a in subset {
        if a >= d.arc_count() || std::mem::replace(&mut used[a], true) {
            return false;
        }
        let Arc { tail, head } = d.arc(a);
        if std::mem::replace(&mut has_parent[head], true) {
            return false;
        }
        // with indegree ≤ 1, an undirected cycle is a directed cycle
        if !dsu.union(tail, head) {
            return false;
        }
    }
    true
}

/// `R(B) = V ∖ ∂B`: vertices not entered by `subset`.
pub fn roots(d: &Digraph, subset: &[usize]) -> VertexSet {
    let deg = d.indegrees_of(subset);
    (0..d.n()).filter(|&v| deg[v] == 0).collect()
}

/// Requested root sets for a two-branching repartition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootSpec {
    pub r1: VertexSet,
    pub r2: VertexSet,
}

impl RootSpec {
    /// `R1′ ∪ R2′ = R(B1) ∪ R(B2)` and `R1′ ∩ R2′ = R(B1) ∩ R(B2)`.
    pub fn is_compatible(&self, old1: &VertexSet, old2: &VertexSet) -> bool {
        self.r1.union(&self.r2) == old1.union(old2)
            && self.r1.intersection(&self.r2) == old1.intersection(old2)
    }
}

/// Partitions all arcs of `d` into branchings `B_i` with `R(B_i) = roots[i]`,
/// or `None` when no such family exists.
///
/// Requires `Σ (n − |roots[i]|) = |A|`, so a feasible answer uses every arc.
pub fn disjoint_branchings_with_roots(
    d: &Digraph,
    roots: &[VertexSet],
    limits: &Limits,
) -> Result<Option<Vec<Vec<usize>>>> {
    let n = d.n();
    for (i, r) in roots.iter().enumerate() {
        if let Some(&v) = r.iter().find(|&&v| v >= n) {
            return Err(Error::pre(format!("root set {i} contains vertex {v} ≥ n = {n}")));
        }
    }
    let demand: usize = roots.iter().map(|r| n - r.len()).sum();
    if demand != d.arc_count() {
        return Err(Error::pre(format!(
            "root sets demand {demand} arcs but the digraph has {}",
            d.arc_count()
        )));
    }
    pack_branchings(d, &d.all_arcs(), roots, limits)
}

/// Arc-disjoint branchings inside `available` with exactly the given root
/// sets. Unlike [`disjoint_branchings_with_roots`] the arcs need not all be used.
pub(crate) fn pack_branchings(
    d: &Digraph,
    available: &[usize],
    roots: &[VertexSet],
    limits: &Limits,
) -> Result<Option<Vec<Vec<usize>>>> {
    let n = d.n();
    let mut reached: Vec<Vec<bool>> = roots
        .iter()
        .map(|r| (0..n).map(|v| r.contains(&v)).collect())
        .collect();
    let mut unused = vec![false; d.arc_count()];
    for &a in available {
        unused[a] = true;
    }
    let check = CutCheck::new(d, limits);
    if !check.holds(&unused, &reached) {
        return Ok(None);
    }

    let mut parts = vec![Vec::new(); roots.len()];
    for i in 0..roots.len() {
        let mut missing = reached[i].iter().filter(|r| !**r).count();
        while missing > 0 {
            let mut grown = false;
            for &a in available {
                let Arc { tail, head } = d.arc(a);
                if !unused[a] || !reached[i][tail] || reached[i][head] {
                    continue;
                }
                unused[a] = false;
                reached[i][head] = true;
                if check.holds(&unused, &reached) {
                    parts[i].push(a);
                    missing -= 1;
                    grown = true;
                    break;
                }
                unused[a] = true;
                reached[i][head] = false;
            }
            if !grown {
                return Err(Error::Internal(format!(
                    "branching {i} cannot be grown although the cut condition holds"
                )));
            }
        }
        parts[i].sort_unstable();
    }
    Ok(Some(parts))
}

/// The cut condition `ρ_unused(X) ≥ #{i : X ∩ S_i = ∅}` for all nonempty `X`.
struct CutCheck<'a> {
    d: &'a Digraph,
    exhaustive: bool,
}

impl<'a> CutCheck<'a> {
    fn new(d: &'a Digraph, limits: &Limits) -> Self {
        CutCheck {
            d,
            exhaustive: d.n() <= limits.exhaustive_cut_max_n.min(24),
        }
    }

    fn holds(&self, unused: &[bool], reached: &[Vec<bool>]) -> bool {
        if self.exhaustive {
            cut_condition_exhaustive(self.d, unused, reached)
        } else {
            cut_condition_flow(self.d, unused, reached)
        }
    }
}

fn mask_of(flags: &[bool]) -> u64 {
    flags
        .iter()
        .enumerate()
        .filter(|(_, f)| **f)
        .fold(0, |m, (v, _)| m | 1 << v)
}

pub(crate) fn cut_condition_exhaustive(d: &Digraph, unused: &[bool], reached: &[Vec<bool>]) -> bool {
    let n = d.n();
    let reached: Vec<u64> = reached.iter().map(|r| mask_of(r)).collect();
    let arcs: Vec<(u64, u64)> = d
        .arcs()
        .iter()
        .zip(unused)
        .filter(|(_, u)| **u)
        .map(|(a, _)| (1u64 << a.tail, 1u64 << a.head))
        .collect();
    for x in 1u64..(1u64 << n) {
        let need = reached.iter().filter(|&&s| s & x == 0).count();
        if need == 0 {
            continue;
        }
        let entering = arcs
            .iter()
            .filter(|&&(t, h)| h & x != 0 && t & x == 0)
            .count();
        if entering < need {
            return false;
        }
    }
    true
}

/// Flow form of the cut condition: source `s`, one node `r_i` per branching
/// (`s → r_i` capacity 1, `r_i → v` for `v ∈ S_i` capacity k), and the
/// unused arcs with capacity 1. A minimum `s`–`v` cut over vertex set `X ∋ v`
/// costs `ρ(X) + #{i : X ∩ S_i ≠ ∅}`, so the condition holds iff every `v`
/// receives flow `k`.
pub(crate) fn cut_condition_flow(d: &Digraph, unused: &[bool], reached: &[Vec<bool>]) -> bool {
    let n = d.n();
    let k = reached.len();
    if k == 0 {
        return true;
    }
    let source = n;
    let mut net = FlowNetwork::new(n + 1 + k);
    for (i, r) in reached.iter().enumerate() {
        let ri = n + 1 + i;
        net.add_edge(source, ri, 1);
        for v in (0..n).filter(|&v| r[v]) {
            net.add_edge(ri, v, k);
        }
    }
    for (a, arc) in d.arcs().iter().enumerate() {
        if unused[a] {
            net.add_edge(arc.tail, arc.head, 1);
        }
    }
    (0..n).all(|v| net.clone().max_flow_bounded(source, v, k) >= k)
}

/// Repartitions `B1 ∪ B2` into branchings with root sets `spec.r1`, `spec.r2`,
/// or `None` when some source component of `(V, B1 ∪ B2)` misses one of them.
pub fn repartition_two_branchings(
    d: &Digraph,
    b1: &[usize],
    b2: &[usize],
    spec: &RootSpec,
    limits: &Limits,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    d.check_arc_indices(b1)?;
    d.check_arc_indices(b2)?;
    if !is_branching(d, b1) || !is_branching(d, b2) {
        return Err(Error::pre("both parts must be branchings"));
    }
    let mut union: Vec<usize> = b1.iter().chain(b2).copied().collect();
    union.sort_unstable();
    if union.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::pre("the two branchings share an arc"));
    }
    if !spec.is_compatible(&roots(d, b1), &roots(d, b2)) {
        return Err(Error::pre(
            "requested root sets must have the same union and intersection as the current ones",
        ));
    }
    let feasible = d
        .source_components_of(&union)
        .iter()
        .all(|x| !x.is_disjoint(&spec.r1) && !x.is_disjoint(&spec.r2));
    if !feasible {
        return Ok(None);
    }
    let roots = [spec.r1.clone(), spec.r2.clone()];
    match pack_branchings(d, &union, &roots, limits)? {
        Some(mut parts) => {
            let p2 = parts.pop().unwrap();
            let p1 = parts.pop().unwrap();
            if p1.len() + p2.len() != union.len() {
                return Err(Error::Internal("repartition left arcs unassigned".into()));
            }
            Ok(Some((p1, p2)))
        }
        None => Err(Error::Internal(
            "every source component meets both root sets, yet no repartition exists".into(),
        )),
    }
}

/// Root sets for a pair whose sizes should end up within one of each other.
///
/// Common roots stay common. In each multi-vertex source component of the
/// union, the smallest old root of each side stays on that side; every other
/// exchangeable root goes to whichever side currently holds fewer.
pub fn balanced_root_spec(d: &Digraph, b1: &[usize], b2: &[usize]) -> RootSpec {
    let old1 = roots(d, b1);
    let old2 = roots(d, b2);
    let common = old1.intersection(&old2);
    let union: Vec<usize> = b1.iter().chain(b2).copied().collect();
    let mut side1 = VertexSet::new();
    let mut side2 = VertexSet::new();
    for x in d.source_components_of(&union) {
        if x.len() < 2 {
            continue;
        }
        side1.extend_min(&x.intersection(&old1));
        side2.extend_min(&x.intersection(&old2));
    }
    for v in old1.symmetric_difference(&old2).iter().copied() {
        if side1.contains(&v) || side2.contains(&v) {
            continue;
        }
        if side1.len() <= side2.len() {
            side1.insert(v);
        } else {
            side2.insert(v);
        }
    }
    RootSpec {
        r1: common.union(&side1),
        r2: common.union(&side2),
    }
}

impl VertexSet {
    fn extend_min(&mut self, from: &VertexSet) {
        if let Some(v) = from.min_vertex() {
            self.insert(v);
        }
    }
}

/// Rebalances a partition of `A` into k branchings so every part has
/// `⌊|A|/k⌋` or `⌈|A|/k⌉` arcs.
pub fn equitable_branching_partition(
    d: &Digraph,
    initial: &[Vec<usize>],
    limits: &Limits,
) -> Result<Balanced<Vec<usize>>> {
    check_index_partition(initial, d.arc_count(), "arc")?;
    if let Some(i) = initial.iter().position(|p| !is_branching(d, p)) {
        return Err(Error::pre(format!("part {i} is not a branching")));
    }
    let mut parts: Vec<Vec<usize>> = initial.to_vec();
    let sizes = |parts: &[Vec<usize>]| parts.iter().map(Vec::len).collect::<Vec<_>>();
    let mut potentials = vec![pairwise_gap_sum(&sizes(&parts))];

    while let Some((i, j)) = widest_pair(&sizes(&parts)) {
        let spec = balanced_root_spec(d, &parts[i], &parts[j]);
        let (p1, p2) = repartition_two_branchings(d, &parts[i], &parts[j], &spec, limits)?
            .ok_or_else(|| Error::Internal("balanced root sets were infeasible".into()))?;
        parts[i] = p1;
        parts[j] = p2;
        let potential = pairwise_gap_sum(&sizes(&parts));
        if potential >= *potentials.last().unwrap() {
            return Err(Error::Internal(format!(
                "rebalancing parts {i} and {j} did not decrease the size potential"
            )));
        }
        potentials.push(potential);
    }
    for p in &mut parts {
        p.sort_unstable();
    }
    Ok(Balanced { parts, potentials })
}

/// Pair with the largest size gap, provided that gap is at least two; ties
/// broken lexicographically.
fn widest_pair(sizes: &[usize]) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for i in 0..sizes.len() {
        for j in i + 1..sizes.len() {
            let gap = sizes[i].abs_diff(sizes[j]);
            if gap >= 2 && best.is_none_or(|(g, _, _)| gap > g) {
                best = Some((gap, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

pub(crate) struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
