//! Brute-force enumerators, seeded instance generators and the exchange-axiom
//! checker. Everything here is exponential and guarded by
//! [`Limits::enumeration_limit`].
//!
//! Generators use ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`), so a
//! seed pins the instance bit for bit across platforms.

use std::collections::HashSet;
use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bbranching::{check_capacity, is_b_branching};
use crate::error::{Error, Result};
use crate::graph::{Digraph, Element, MixedGraph};
use crate::io::Instance;
use crate::matching_forest::{boundary, is_matching_forest, MatchingForest};
use crate::Limits;

fn guard(what: &'static str, size: usize, limits: &Limits) -> Result<()> {
    if size > limits.enumeration_limit {
        return Err(Error::SizeLimit {
            what,
            size,
            limit: limits.enumeration_limit,
        });
    }
    Ok(())
}

/// Element `i` of the combined index space: edges first, then arcs.
fn element_at(g: &MixedGraph, i: usize) -> Element {
    let m = g.edges().len();
    if i < m {
        Element::edge(i)
    } else {
        Element::arc(i - m)
    }
}

fn forest_of_mask(g: &MixedGraph, mask: u64) -> MatchingForest {
    let m = g.edges().len();
    let (mut edges, mut arcs) = (Vec::new(), Vec::new());
    for i in 0..g.element_count() {
        if mask >> i & 1 == 1 {
            if i < m {
                edges.push(i);
            } else {
                arcs.push(i - m);
            }
        }
    }
    MatchingForest::new(edges, arcs)
}

/// All matching forests of `g`, in increasing order of their bitmask over
/// edges-then-arcs.
pub fn enumerate_matching_forests(g: &MixedGraph, limits: &Limits) -> Result<Vec<MatchingForest>> {
    let m = g.element_count();
    guard("matching-forest enumeration (elements)", m, limits)?;
    Ok((0..1u64 << m)
        .map(|mask| forest_of_mask(g, mask))
        .filter(|f| is_matching_forest(g, f))
        .collect())
}

/// All b-branchings of `d` as sorted arc lists, in increasing bitmask order.
pub fn enumerate_b_branchings(d: &Digraph, b: &[usize], limits: &Limits) -> Result<Vec<Vec<usize>>> {
    check_capacity(d, b)?;
    let m = d.arc_count();
    guard("b-branching enumeration (arcs)", m, limits)?;
    Ok((0..1u64 << m)
        .map(|mask| (0..m).filter(|&a| mask >> a & 1 == 1).collect::<Vec<_>>())
        .filter(|s| is_b_branching(d, b, s))
        .collect())
}

/// Checks the delta-matroid exchange axiom on the boundaries of all matching
/// forests: for `U₁, U₂` in the family and `u ∈ U₁ △ U₂` there is
/// `u′ ∈ U₁ △ U₂` with `U₁ △ {u, u′}` in the family.
pub fn check_delta_matroid(g: &MixedGraph, limits: &Limits) -> Result<bool> {
    if g.n() > 64 {
        return Err(Error::SizeLimit {
            what: "delta-matroid check (vertices)",
            size: g.n(),
            limit: 64,
        });
    }
    let family: HashSet<u64> = enumerate_matching_forests(g, limits)?
        .iter()
        .map(|f| boundary(g, f).iter().fold(0u64, |acc, &v| acc | 1 << v))
        .collect();
    let members: Vec<u64> = family.iter().copied().collect();
    for &u1 in &members {
        for &u2 in &members {
            let diff = u1 ^ u2;
            for u in bits(diff) {
                let ok = bits(diff).any(|w| {
                    let swapped = if w == u { u1 ^ 1 << u } else { u1 ^ 1 << u ^ 1 << w };
                    family.contains(&swapped)
                });
                if !ok {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn bits(mask: u64) -> impl Iterator<Item = usize> + Clone {
    (0..64).filter(move |&i| mask >> i & 1 == 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PartitionKind {
    Branching,
    MatchingForest,
    BBranching,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    /// Mean chance that a candidate edge is added to a part's matching; each
    /// part scales it by a factor drawn from `[0, 2]`.
    pub edge_density: f64,
    /// Mean chance that a vertex gets an incoming arc in a part, scaled per
    /// part likewise.
    pub arc_density: f64,
    /// Capacities are drawn from `1..=b_max`.
    pub b_max: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 0,
            n: 6,
            k: 2,
            edge_density: 0.5,
            arc_density: 0.6,
            b_max: 3,
        }
    }
}

/// Builds `k` pairwise disjoint valid parts at random and returns their union
/// as an instance whose `partition` is the construction. Edge and arc order is
/// shuffled so parts are not contiguous index ranges.
///
/// Retries until at least one element is produced, unless `n < 2` where
/// nothing can be produced.
pub fn generate_partitionable(config: &GeneratorConfig, kind: PartitionKind) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.n;
    let k = config.k.max(1);
    let b: Option<Vec<usize>> = (kind == PartitionKind::BBranching)
        .then(|| (0..n).map(|_| rng.gen_range(1..=config.b_max.max(1))).collect());
    loop {
        let mut edges: Vec<((usize, usize), usize)> = Vec::new();
        let mut arcs: Vec<((usize, usize), usize)> = Vec::new();
        for part in 0..k {
            // uneven densities make uneven parts, which is what the balancers are for
            let scale: f64 = rng.gen_range(0.0..=2.0);
            let arc_density = (config.arc_density * scale).clamp(0.0, 1.0);
            let edge_density = (config.edge_density * scale).clamp(0.0, 1.0);
            match kind {
                PartitionKind::Branching => {
                    for a in random_branching(&mut rng, n, &vec![false; n], arc_density) {
                        arcs.push((a, part));
                    }
                }
                PartitionKind::MatchingForest => {
                    let mut order: Vec<usize> = (0..n).collect();
                    order.shuffle(&mut rng);
                    let mut covered = vec![false; n];
                    for pair in order.chunks_exact(2) {
                        if rng.gen_bool(edge_density) {
                            edges.push(((pair[0], pair[1]), part));
                            covered[pair[0]] = true;
                            covered[pair[1]] = true;
                        }
                    }
                    for a in random_branching(&mut rng, n, &covered, arc_density) {
                        arcs.push((a, part));
                    }
                }
                PartitionKind::BBranching => {
                    let b = b.as_ref().unwrap();
                    for a in random_b_branching(&mut rng, b, arc_density) {
                        arcs.push((a, part));
                    }
                }
            }
        }
        if edges.is_empty() && arcs.is_empty() && n >= 2 {
            continue;
        }
        edges.shuffle(&mut rng);
        arcs.shuffle(&mut rng);
        let graph = MixedGraph::new(
            n,
            edges.iter().map(|&(e, _)| e),
            arcs.iter().map(|&(a, _)| a),
        )
        .expect("generated elements are in range");
        let mut parts = vec![Vec::new(); k];
        for (i, &(_, p)) in edges.iter().enumerate() {
            parts[p].push(Element::edge(i));
        }
        for (i, &(_, p)) in arcs.iter().enumerate() {
            parts[p].push(Element::arc(i));
        }
        return Instance {
            graph,
            b,
            k: Some(k),
            partition: Some(parts),
            kind: Some(kind),
        };
    }
}

/// A random forest of arcs pointing away from earlier vertices of a random
/// order; vertices marked `blocked` get no incoming arc.
fn random_branching(rng: &mut ChaCha8Rng, n: usize, blocked: &[bool], density: f64) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut arcs = Vec::new();
    for i in 1..n {
        let v = order[i];
        if !blocked[v] && rng.gen_bool(density) {
            arcs.push((order[rng.gen_range(0..i)], v));
        }
    }
    arcs
}

fn random_b_branching(rng: &mut ChaCha8Rng, b: &[usize], density: f64) -> Vec<(usize, usize)> {
    let n = b.len();
    if n < 2 {
        return Vec::new();
    }
    let attempts = (density * b.iter().sum::<usize>() as f64).ceil() as usize;
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    for _ in 0..attempts {
        let t = rng.gen_range(0..n);
        let h = (t + rng.gen_range(1..n)) % n;
        arcs.push((t, h));
        let d = Digraph::new(n, arcs.iter().copied()).expect("in range");
        if !is_b_branching(&d, b, &d.all_arcs()) {
            arcs.pop();
        }
    }
    arcs
}

/// What [`brute_force_min_gap`] measures between two parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// `||∂F_i| − |∂F_j||`.
    Boundary,
    /// `||F_i| − |F_j||`.
    Size,
    /// `max_v |d⁻_{F_i}(v) − d⁻_{F_j}(v)|`.
    Indegree,
}

/// Maximum pairwise gap of `parts` under `criterion`.
pub fn max_gap(g: &MixedGraph, parts: &[MatchingForest], criterion: Criterion) -> usize {
    let spread = |values: &mut dyn Iterator<Item = usize>| {
        let (lo, hi) = values.fold((usize::MAX, 0), |(lo, hi), x| (lo.min(x), hi.max(x)));
        hi.saturating_sub(lo)
    };
    match criterion {
        Criterion::Boundary => spread(&mut parts.iter().map(|f| boundary(g, f).len())),
        Criterion::Size => spread(&mut parts.iter().map(MatchingForest::len)),
        Criterion::Indegree => {
            let degs: Vec<Vec<usize>> = parts.iter().map(|f| g.digraph().indegrees_of(&f.arcs)).collect();
            (0..g.n())
                .map(|v| spread(&mut degs.iter().map(|dg| dg[v])))
                .max()
                .unwrap_or(0)
        }
    }
}

/// Calls `visit` on every partition of the elements of `g` into `k` valid
/// parts (matching forests, or b-branchings when `b` is given), up to
/// relabelling of the parts.
pub fn for_each_partition(
    g: &MixedGraph,
    b: Option<&[usize]>,
    k: usize,
    limits: &Limits,
    mut visit: impl FnMut(&[MatchingForest]) -> ControlFlow<()>,
) -> Result<()> {
    if k == 0 {
        return Err(Error::input("k", "must be at least 1"));
    }
    if let Some(b) = b {
        check_capacity(g.digraph(), b)?;
        if !g.is_digraph() {
            return Err(Error::input("b", "capacities apply to digraphs only, but the graph has edges"));
        }
    }
    guard("partition enumeration (elements)", g.element_count(), limits)?;
    let valid = |f: &MatchingForest| match b {
        Some(b) => is_b_branching(g.digraph(), b, &f.arcs),
        None => is_matching_forest(g, f),
    };
    let mut parts = vec![MatchingForest::default(); k];
    let _ = assign(g, 0, 0, &mut parts, &valid, &mut visit);
    Ok(())
}

fn assign(
    g: &MixedGraph,
    i: usize,
    used: usize,
    parts: &mut Vec<MatchingForest>,
    valid: &dyn Fn(&MatchingForest) -> bool,
    visit: &mut dyn FnMut(&[MatchingForest]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if i == g.element_count() {
        return visit(parts);
    }
    let e = element_at(g, i);
    let k = parts.len();
    // parts beyond the first empty one are interchangeable with it
    for p in 0..(used + 1).min(k) {
        let list = match e.kind {
            crate::graph::ElementKind::Edge => &mut parts[p].edges,
            crate::graph::ElementKind::Arc => &mut parts[p].arcs,
        };
        list.push(e.index);
        if valid(&parts[p]) {
            assign(g, i + 1, used.max(p + 1), parts, valid, visit)?;
        }
        let list = match e.kind {
            crate::graph::ElementKind::Edge => &mut parts[p].edges,
            crate::graph::ElementKind::Arc => &mut parts[p].arcs,
        };
        list.pop();
    }
    ControlFlow::Continue(())
}

/// Minimum, over all partitions into `k` valid parts, of the maximum pairwise
/// gap under `criterion`; `None` when no such partition exists.
pub fn brute_force_min_gap(
    g: &MixedGraph,
    b: Option<&[usize]>,
    k: usize,
    criterion: Criterion,
    limits: &Limits,
) -> Result<Option<usize>> {
    let mut best: Option<usize> = None;
    for_each_partition(g, b, k, limits, |parts| {
        let gap = max_gap(g, parts, criterion);
        if best.is_none_or(|b| gap < b) {
            best = Some(gap);
        }
        if gap == 0 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(best)
}

/// Any partition into `k` valid parts, found by the same search.
pub fn find_partition(
    g: &MixedGraph,
    b: Option<&[usize]>,
    k: usize,
    limits: &Limits,
) -> Result<Option<Vec<MatchingForest>>> {
    let mut found = None;
    for_each_partition(g, b, k, limits, |parts| {
        found = Some(parts.to_vec());
        ControlFlow::Break(())
    })?;
    Ok(found)
}
