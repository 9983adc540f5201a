//! b-branchings: arc sets with `d⁻_B(v) ≤ b(v)` and `|B[X]| ≤ b(X) − 1` for
//! every nonempty `X`.
//!
//! The sparsity condition fails exactly when some nonempty `X` has every
//! vertex saturated by arcs inside `X`; peeling unsaturated vertices finds the
//! largest such set (the tight core). Equivalently, a b-branching is an arc
//! set within the indegree caps in which every vertex is reachable from a
//! vertex with spare capacity. That second form is what the two-part
//! repartition uses: fixing target indegrees fixes which vertices have spare
//! capacity on each side, so each side needs a spanning branching rooted at
//! its spare vertices, and the remaining arcs can be handed out freely.

use std::collections::VecDeque;

use crate::branching::pack_branchings;
use crate::error::{Error, Result};
use crate::graph::{Digraph, IndegreeVector, VertexSet};
use crate::{check_index_partition, Balanced, Limits};

/// Validates a capacity vector: one positive entry per vertex.
pub fn check_capacity(d: &Digraph, b: &[usize]) -> Result<()> {
    if b.len() != d.n() {
        return Err(Error::input(
            "b",
            format!("has {} entries, expected n = {}", b.len(), d.n()),
        ));
    }
    if let Some(v) = b.iter().position(|&x| x == 0) {
        return Err(Error::input(format!("b[{v}]"), "capacities must be positive"));
    }
    Ok(())
}

/// Largest `C ⊆ V` with `d⁻_{B[C]}(v) = b(v)` for every `v ∈ C`.
/// Empty iff `B` satisfies the sparsity condition.
pub fn tight_core(d: &Digraph, b: &[usize], subset: &[usize]) -> Result<VertexSet> {
    d.check_arc_indices(subset)?;
    let deg = d.indegrees_of(subset);
    if let Some(v) = (0..d.n()).find(|&v| deg[v] > b[v]) {
        return Err(Error::pre(format!(
            "indegree {} at vertex {v} exceeds b = {}",
            deg[v], b[v]
        )));
    }
    Ok(peel(d, b, subset, deg))
}

fn peel(d: &Digraph, b: &[usize], subset: &[usize], mut inner: Vec<usize>) -> VertexSet {
    let n = d.n();
    let mut out = vec![Vec::new(); n];
    for &a in subset {
        out[d.arc(a).tail].push(d.arc(a).head);
    }
    let mut alive = vec![true; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| inner[v] < b[v]).collect();
    for &v in &queue {
        alive[v] = false;
    }
    while let Some(v) = queue.pop_front() {
        for &h in &out[v] {
            inner[h] -= 1;
            if alive[h] && inner[h] < b[h] {
                alive[h] = false;
                queue.push_back(h);
            }
        }
    }
    (0..n).filter(|&v| alive[v]).collect()
}

pub fn is_b_branching(d: &Digraph, b: &[usize], subset: &[usize]) -> bool {
    let mut seen = vec![false; d.arc_count()];
    for &a in subset {
        if a >= d.arc_count() || std::mem::replace(&mut seen[a], true) {
            return false;
        }
    }
    let deg = d.indegrees_of(subset);
    if (0..d.n()).any(|v| deg[v] > b[v]) {
        return false;
    }
    peel(d, b, subset, deg).is_empty()
}

/// Target indegree vectors for the two sides of a repartition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetPair {
    pub first: IndegreeVector,
    pub second: IndegreeVector,
}

impl TargetPair {
    /// Targets sum to `d⁻_{union}`, respect `b`, and leave every source
    /// component of `(V, union)` with spare capacity on both sides.
    pub fn satisfies_invariants(&self, d: &Digraph, b: &[usize], union: &[usize]) -> bool {
        let deg = d.indegrees_of(union);
        let sums_ok = (0..d.n()).all(|v| self.first[v] + self.second[v] == deg[v]);
        let caps_ok = (0..d.n()).all(|v| self.first[v] <= b[v] && self.second[v] <= b[v]);
        sums_ok && caps_ok && self.source_components_have_slack(d, b, union)
    }

    fn source_components_have_slack(&self, d: &Digraph, b: &[usize], union: &[usize]) -> bool {
        d.source_components_of(union).iter().all(|x| {
            let cap: usize = x.iter().map(|&v| b[v]).sum();
            let t1: usize = x.iter().map(|&v| self.first[v]).sum();
            let t2: usize = x.iter().map(|&v| self.second[v]).sum();
            t1 < cap && t2 < cap
        })
    }
}

/// Halves `d⁻_{B1} + d⁻_{B2}` vertex by vertex. Odd vertices inside source
/// components of `(V, B1 ∪ B2)` hand their extra unit alternately to the first
/// and second side (components by smallest vertex, vertices by id), which
/// balances every even component exactly and the odd ones jointly; odd
/// vertices outside source components give it to whichever side is behind.
pub fn build_indegree_targets(
    d: &Digraph,
    b: &[usize],
    b1: &[usize],
    b2: &[usize],
) -> Result<TargetPair> {
    check_capacity(d, b)?;
    for (i, part) in [b1, b2].into_iter().enumerate() {
        if !is_b_branching(d, b, part) {
            return Err(Error::pre(format!("part {} is not a b-branching", i + 1)));
        }
    }
    let n = d.n();
    let union: Vec<usize> = b1.iter().chain(b2).copied().collect();
    let total = d.indegrees_of(&union);
    let mut first: Vec<usize> = total.iter().map(|s| s / 2).collect();
    let mut second = first.clone();

    let mut in_component = vec![false; n];
    let mut extra_to_first = true;
    for x in d.source_components_of(&union) {
        for &v in &x {
            in_component[v] = true;
            if total[v] % 2 == 1 {
                if extra_to_first {
                    first[v] += 1;
                } else {
                    second[v] += 1;
                }
                extra_to_first = !extra_to_first;
            }
        }
    }
    let mut lead: isize = if extra_to_first { 0 } else { 1 };
    for v in (0..n).filter(|&v| !in_component[v] && total[v] % 2 == 1) {
        if lead <= 0 {
            first[v] += 1;
            lead += 1;
        } else {
            second[v] += 1;
            lead -= 1;
        }
    }
    Ok(TargetPair { first, second })
}

/// Repartitions `B1 ∪ B2` into b-branchings with indegree vectors exactly
/// `targets`, or `None` when a source component of `(V, B1 ∪ B2)` would be
/// saturated on one side.
pub fn repartition_two_bbranchings(
    d: &Digraph,
    b: &[usize],
    b1: &[usize],
    b2: &[usize],
    targets: &TargetPair,
    limits: &Limits,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let union = validate_pair(d, b, b1, b2)?;
    let deg = d.indegrees_of(&union);
    let n = d.n();
    if targets.first.len() != n || targets.second.len() != n {
        return Err(Error::pre("target vectors must have one entry per vertex"));
    }
    if let Some(v) = (0..n).find(|&v| targets.first[v] + targets.second[v] != deg[v]) {
        return Err(Error::pre(format!(
            "targets at vertex {v} do not add up to the indegree {}",
            deg[v]
        )));
    }
    if let Some(v) = (0..n).find(|&v| targets.first[v] > b[v] || targets.second[v] > b[v]) {
        return Err(Error::pre(format!("targets at vertex {v} exceed b")));
    }
    if !targets.source_components_have_slack(d, b, &union) {
        return Ok(None);
    }
    if let Some(split) = split_with_targets(d, b, &union, targets, None, limits)? {
        return Ok(Some(split));
    }
    if union.len() <= limits.fallback_threshold {
        let allowed: Vec<Vec<usize>> = targets.first.iter().map(|&t| vec![t]).collect();
        if let Some(split) = SplitSearch::new(d, b, &union, allowed, None, false).run() {
            return Ok(Some(split));
        }
    }
    Err(Error::Internal(
        "targets leave every source component slack on both sides, yet no repartition exists"
            .into(),
    ))
}

fn validate_pair(d: &Digraph, b: &[usize], b1: &[usize], b2: &[usize]) -> Result<Vec<usize>> {
    check_capacity(d, b)?;
    d.check_arc_indices(b1)?;
    d.check_arc_indices(b2)?;
    for (i, part) in [b1, b2].into_iter().enumerate() {
        if !is_b_branching(d, b, part) {
            return Err(Error::pre(format!("part {} is not a b-branching", i + 1)));
        }
    }
    let mut union: Vec<usize> = b1.iter().chain(b2).copied().collect();
    union.sort_unstable();
    if union.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::pre("the two b-branchings share an arc"));
    }
    Ok(union)
}

/// Spanning branchings rooted at the spare-capacity vertices of each side,
/// then the remaining arcs distributed to meet the targets. With `origin`,
/// leftover arcs avoid a side that already holds an arc of the same origin.
fn split_with_targets(
    d: &Digraph,
    b: &[usize],
    union: &[usize],
    targets: &TargetPair,
    origin: Option<&[usize]>,
    limits: &Limits,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let n = d.n();
    let spare = |t: &[usize]| (0..n).filter(|&v| t[v] < b[v]).collect::<VertexSet>();
    let roots = [spare(&targets.first), spare(&targets.second)];
    let Some(trees) = pack_branchings(d, union, &roots, limits)? else {
        return Ok(None);
    };
    let mut sides = [trees[0].clone(), trees[1].clone()];
    let mut need = [targets.first.clone(), targets.second.clone()];
    let mut taken = vec![false; d.arc_count()];
    for (s, side) in sides.iter().enumerate() {
        for &a in side {
            taken[a] = true;
            need[s][d.arc(a).head] -= 1;
        }
    }
    let holds = |side: &[usize], a: usize| match origin {
        Some(o) => side.iter().any(|&x| o[x] == o[a] && d.arc(x).head == d.arc(a).head),
        None => false,
    };
    let mut leftovers: Vec<usize> = union.iter().copied().filter(|&a| !taken[a]).collect();
    // arcs already pinned to one side by an origin clash go first
    leftovers.sort_by_key(|&a| {
        let pinned = holds(&sides[0], a) || holds(&sides[1], a);
        (!pinned, a)
    });
    for a in leftovers {
        let v = d.arc(a).head;
        let s = match (need[0][v] > 0, need[1][v] > 0) {
            (true, true) if holds(&sides[0], a) => 1,
            (true, _) => 0,
            (false, _) => 1,
        };
        need[s][v] -= 1;
        sides[s].push(a);
    }
    for side in &mut sides {
        side.sort_unstable();
    }
    let [s1, s2] = sides;
    Ok(Some((s1, s2)))
}

/// Depth-first search over per-vertex splits of `union`: at each head `v`, side
/// one takes `c` of the arcs entering `v` for some `c ∈ allowed[v]`.
/// Optionally requires origin-distinct sides and sizes within one.
struct SplitSearch<'a> {
    d: &'a Digraph,
    b: &'a [usize],
    by_head: Vec<Vec<usize>>,
    allowed: Vec<Vec<usize>>,
    origin: Option<&'a [usize]>,
    balance_sizes: bool,
    total: usize,
    /// Smallest and largest number of arcs side one can still take from
    /// vertices `v..`.
    suffix: Vec<(usize, usize)>,
}

impl<'a> SplitSearch<'a> {
    fn new(
        d: &'a Digraph,
        b: &'a [usize],
        union: &[usize],
        allowed: Vec<Vec<usize>>,
        origin: Option<&'a [usize]>,
        balance_sizes: bool,
    ) -> Self {
        let n = d.n();
        let mut by_head = vec![Vec::new(); n];
        for &a in union {
            by_head[d.arc(a).head].push(a);
        }
        let mut suffix = vec![(0, 0); n + 1];
        for v in (0..n).rev() {
            let lo = allowed[v].iter().min().copied().unwrap_or(0);
            let hi = allowed[v].iter().max().copied().unwrap_or(0);
            suffix[v] = (suffix[v + 1].0 + lo, suffix[v + 1].1 + hi);
        }
        SplitSearch {
            d,
            b,
            by_head,
            allowed,
            origin,
            balance_sizes,
            total: union.len(),
            suffix,
        }
    }

    fn run(&self) -> Option<(Vec<usize>, Vec<usize>)> {
        let mut s1 = Vec::new();
        let mut s2 = Vec::new();
        if self.visit(0, &mut s1, &mut s2) {
            s1.sort_unstable();
            s2.sort_unstable();
            Some((s1, s2))
        } else {
            None
        }
    }

    fn visit(&self, v: usize, s1: &mut Vec<usize>, s2: &mut Vec<usize>) -> bool {
        if self.balance_sizes {
            let (lo, hi) = (s1.len() + self.suffix[v].0, s1.len() + self.suffix[v].1);
            // final |s1| must lie in [⌊total/2⌋, ⌈total/2⌉]
            if hi < self.total / 2 || lo > self.total.div_ceil(2) {
                return false;
            }
        }
        if v == self.d.n() {
            return true;
        }
        let arcs = &self.by_head[v];
        for &c in &self.allowed[v] {
            if c > arcs.len() {
                continue;
            }
            let mut chosen = Vec::with_capacity(c);
            if self.choose(v, arcs, 0, c, &mut chosen, s1, s2) {
                return true;
            }
        }
        false
    }

    #[allow(clippy::too_many_arguments)]
    fn choose(
        &self,
        v: usize,
        arcs: &[usize],
        from: usize,
        c: usize,
        chosen: &mut Vec<usize>,
        s1: &mut Vec<usize>,
        s2: &mut Vec<usize>,
    ) -> bool {
        if chosen.len() == c {
            let rest: Vec<usize> = arcs.iter().copied().filter(|a| !chosen.contains(a)).collect();
            if !self.distinct(chosen) || !self.distinct(&rest) {
                return false;
            }
            let (l1, l2) = (s1.len(), s2.len());
            s1.extend_from_slice(chosen);
            s2.extend_from_slice(&rest);
            if is_b_branching(self.d, self.b, s1)
                && is_b_branching(self.d, self.b, s2)
                && self.visit(v + 1, s1, s2)
            {
                return true;
            }
            s1.truncate(l1);
            s2.truncate(l2);
            return false;
        }
        for i in from..arcs.len() {
            if arcs.len() - i < c - chosen.len() {
                break;
            }
            chosen.push(arcs[i]);
            if self.choose(v, arcs, i + 1, c, chosen, s1, s2) {
                return true;
            }
            chosen.pop();
        }
        false
    }

    fn distinct(&self, arcs: &[usize]) -> bool {
        let Some(origin) = self.origin else {
            return true;
        };
        let mut seen: Vec<usize> = arcs.iter().map(|&a| origin[a]).collect();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

fn floor_ceil(total: usize, k: usize) -> (usize, usize) {
    (total / k, total.div_ceil(k))
}

fn distance_to(x: usize, (lo, hi): (usize, usize)) -> usize {
    x.abs_diff(lo).min(x.abs_diff(hi))
}

/// Per-part term of the potential: distance of the size to `{⌊|A|/k⌋, ⌈|A|/k⌉}`
/// plus, per vertex, distance of the indegree to `{⌊d⁻_A(v)/k⌋, ⌈d⁻_A(v)/k⌉}`.
fn part_term(d: &Digraph, part: &[usize], k: usize, total_deg: &[usize]) -> usize {
    let deg = d.indegrees_of(part);
    let size_term = distance_to(part.len(), floor_ceil(d.arc_count(), k));
    let deg_terms: usize = (0..d.n())
        .map(|v| distance_to(deg[v], floor_ceil(total_deg[v], k)))
        .sum();
    size_term + deg_terms
}

/// Sum over parts of the size deviation and all indegree deviations from
/// their floor/ceil averages. Zero exactly for an equitable partition.
pub fn b_potential(d: &Digraph, parts: &[Vec<usize>]) -> usize {
    let k = parts.len();
    if k == 0 {
        return 0;
    }
    let total_deg = d.indegrees_of(&d.all_arcs());
    parts.iter().map(|p| part_term(d, p, k, &total_deg)).sum()
}

/// `min < total/k < max` and `max − min ≥ 2`, in integers.
fn straddles(x: usize, y: usize, total: usize, k: usize) -> bool {
    let (lo, hi) = (x.min(y), x.max(y));
    hi - lo >= 2 && lo * k < total && total < hi * k
}

fn violating_pair(d: &Digraph, parts: &[Vec<usize>], total_deg: &[usize]) -> Option<(usize, usize)> {
    let k = parts.len();
    let degs: Vec<Vec<usize>> = parts.iter().map(|p| d.indegrees_of(p)).collect();
    let terms: Vec<usize> = parts
        .iter()
        .map(|p| part_term(d, p, k, total_deg))
        .collect();
    let mut best: Option<(usize, usize, usize)> = None;
    for i in 0..k {
        for j in i + 1..k {
            let sizes = straddles(parts[i].len(), parts[j].len(), d.arc_count(), k);
            let indeg = (0..d.n()).any(|v| straddles(degs[i][v], degs[j][v], total_deg[v], k));
            if !(sizes || indeg) {
                continue;
            }
            let weight = terms[i] + terms[j];
            if best.is_none_or(|(w, _, _)| weight > w) {
                best = Some((weight, i, j));
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

/// Rebalances a partition of `A` into k b-branchings so that every part has
/// `⌊|A|/k⌋` or `⌈|A|/k⌉` arcs and every vertex `v` has indegree
/// `⌊d⁻_A(v)/k⌋` or `⌈d⁻_A(v)/k⌉` in every part.
pub fn equitable_b_partition(
    d: &Digraph,
    b: &[usize],
    initial: &[Vec<usize>],
    limits: &Limits,
) -> Result<Balanced<Vec<usize>>> {
    balance(d, b, initial, None, limits)
}

/// As [`equitable_b_partition`], additionally keeping, in every part, at most
/// one arc per value of `origin[a]`.
pub(crate) fn balance(
    d: &Digraph,
    b: &[usize],
    initial: &[Vec<usize>],
    origin: Option<&[usize]>,
    limits: &Limits,
) -> Result<Balanced<Vec<usize>>> {
    check_capacity(d, b)?;
    check_index_partition(initial, d.arc_count(), "arc")?;
    if let Some(i) = initial.iter().position(|p| !is_b_branching(d, b, p)) {
        return Err(Error::pre(format!("part {i} is not a b-branching")));
    }
    let total_deg = d.indegrees_of(&d.all_arcs());
    let mut parts = initial.to_vec();
    let mut potentials = vec![b_potential(d, &parts)];

    while let Some((i, j)) = violating_pair(d, &parts, &total_deg) {
        let targets = build_indegree_targets(d, b, &parts[i], &parts[j])?;
        let union = validate_pair(d, b, &parts[i], &parts[j])?;
        if !targets.satisfies_invariants(d, b, &union) {
            return Err(Error::Internal(format!(
                "targets for parts {i} and {j} violate the repartition condition"
            )));
        }
        let split = match origin {
            None => repartition_two_bbranchings(d, b, &parts[i], &parts[j], &targets, limits)?,
            Some(o) => origin_distinct_split(d, b, &union, &targets, o, limits)?,
        };
        let (p1, p2) = split.ok_or_else(|| {
            Error::Internal(format!("parts {i} and {j} could not be rebalanced"))
        })?;
        parts[i] = p1;
        parts[j] = p2;
        let potential = b_potential(d, &parts);
        let previous = *potentials.last().unwrap();
        if potential >= previous {
            return Err(Error::Internal(format!(
                "rebalancing parts {i} and {j} moved the potential {previous} → {potential}"
            )));
        }
        potentials.push(potential);
    }
    Ok(Balanced { parts, potentials })
}

fn origin_distinct_split(
    d: &Digraph,
    b: &[usize],
    union: &[usize],
    targets: &TargetPair,
    origin: &[usize],
    limits: &Limits,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    let distinct = |side: &[usize]| {
        let mut o: Vec<usize> = side.iter().map(|&a| origin[a]).collect();
        o.sort_unstable();
        o.windows(2).all(|w| w[0] != w[1])
    };
    if let Some((s1, s2)) = split_with_targets(d, b, union, targets, Some(origin), limits)? {
        if distinct(&s1) && distinct(&s2) {
            return Ok(Some((s1, s2)));
        }
    }
    // any split with per-vertex and size differences at most one will do
    let deg = d.indegrees_of(union);
    let allowed = deg
        .iter()
        .map(|&s| {
            let mut c = vec![s / 2];
            if s % 2 == 1 {
                c.push(s / 2 + 1);
            }
            c
        })
        .collect();
    Ok(SplitSearch::new(d, b, union, allowed, Some(origin), true).run())
}
