//! Matching forests in mixed graphs and equitable partition by number of
//! covered vertices.
//!
//! One balancing step takes two matching forests `F1 = M1 ∪ B1` and
//! `F2 = M2 ∪ B2` with `|∂F1| ≥ |∂F2| + 3`, builds the exchange graph
//! `H = (V, M1 ∪ M2 ∪ N)`, picks a path component of `H` running from a vertex
//! of `∂F1 ∖ ∂F2` to a vertex of `∂F1`, flips the matchings along it, moves the
//! branching roots on the path to the other side, and re-packs `B1 ∪ B2` into
//! two branchings with those root sets.

use crate::branching::{is_branching, repartition_two_branchings, roots, RootSpec};
use crate::error::{Error, Result};
use crate::graph::{Edge, Element, ElementKind, MixedGraph, VertexSet};
use crate::{check_index_partition, pairwise_gap_sum, Balanced, Limits};

/// `F = M ∪ B`, stored as sorted edge and arc indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct MatchingForest {
    pub edges: Vec<usize>,
    pub arcs: Vec<usize>,
}

impl MatchingForest {
    pub fn new(mut edges: Vec<usize>, mut arcs: Vec<usize>) -> Self {
        edges.sort_unstable();
        arcs.sort_unstable();
        MatchingForest { edges, arcs }
    }

    pub fn from_elements(elements: &[Element]) -> Self {
        let (mut edges, mut arcs) = (Vec::new(), Vec::new());
        for e in elements {
            match e.kind {
                ElementKind::Edge => edges.push(e.index),
                ElementKind::Arc => arcs.push(e.index),
            }
        }
        MatchingForest::new(edges, arcs)
    }

    pub fn elements(&self) -> Vec<Element> {
        self.edges
            .iter()
            .map(|&i| Element::edge(i))
            .chain(self.arcs.iter().map(|&i| Element::arc(i)))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.edges.len() + self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn matching_cover(g: &MixedGraph, edges: &[usize]) -> VertexSet {
    edges
        .iter()
        .flat_map(|&e| {
            let e = g.edge(e);
            [e.u, e.v]
        })
        .collect()
}

fn arc_cover(g: &MixedGraph, arcs: &[usize]) -> VertexSet {
    arcs.iter().map(|&a| g.arcs()[a].head).collect()
}

/// `∂F`: endpoints of the edges of `F` and heads of its arcs.
pub fn boundary(g: &MixedGraph, f: &MatchingForest) -> VertexSet {
    matching_cover(g, &f.edges).union(&arc_cover(g, &f.arcs))
}

fn is_matching(g: &MixedGraph, edges: &[usize]) -> bool {
    let mut covered = vec![false; g.n()];
    let mut used = vec![false; g.edges().len()];
    for &e in edges {
        if e >= g.edges().len() || std::mem::replace(&mut used[e], true) {
            return false;
        }
        let e = g.edge(e);
        for v in [e.u, e.v] {
            if std::mem::replace(&mut covered[v], true) {
                return false;
            }
        }
    }
    true
}

/// `F ∩ E` is a matching, `F ∩ A` is a branching and `∂M ∩ ∂B = ∅`.
pub fn is_matching_forest(g: &MixedGraph, f: &MatchingForest) -> bool {
    is_matching(g, &f.edges)
        && is_branching(g.digraph(), &f.arcs)
        && matching_cover(g, &f.edges).is_disjoint(&arc_cover(g, &f.arcs))
}

/// Where an exchange-graph edge came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeSource {
    /// Edge of `M1`, with its index in the host graph.
    FirstMatching(usize),
    /// Edge of `M2`, with its index in the host graph.
    SecondMatching(usize),
    /// The pair `e_X` of a multi-vertex source component of `(V, B1 ∪ B2)`.
    SourcePair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExchangeEdge {
    pub u: usize,
    pub v: usize,
    pub source: EdgeSource,
}

/// `H = (V, M1 ∪ M2 ∪ N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeGraph {
    n: usize,
    edges: Vec<ExchangeEdge>,
    incident: Vec<Vec<usize>>,
}

impl ExchangeGraph {
    pub fn edges(&self) -> &[ExchangeEdge] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn source_pairs(&self) -> impl Iterator<Item = &ExchangeEdge> {
        self.edges
            .iter()
            .filter(|e| e.source == EdgeSource::SourcePair)
    }

    /// `N` is a matching, every degree is at most two, and every degree-two
    /// vertex is covered by both forests.
    pub fn satisfies_invariants(&self, cover1: &VertexSet, cover2: &VertexSet) -> bool {
        let mut n_cover = vec![false; self.n];
        for e in self.source_pairs() {
            for v in [e.u, e.v] {
                if std::mem::replace(&mut n_cover[v], true) {
                    return false;
                }
            }
        }
        (0..self.n).all(|v| {
            let deg = self.degree(v);
            deg <= 2 && (deg < 2 || (cover1.contains(&v) && cover2.contains(&v)))
        })
    }

    fn other_end(&self, edge: usize, v: usize) -> usize {
        let e = self.edges[edge];
        if e.u == v {
            e.v
        } else {
            e.u
        }
    }
}

/// Builds the exchange graph of two disjoint matching forests. The pair
/// `e_X` joins the smallest vertex of `X ∩ R(B1)` to the smallest of `X ∩ R(B2)`.
pub fn build_exchange_graph(
    g: &MixedGraph,
    f1: &MatchingForest,
    f2: &MatchingForest,
) -> Result<ExchangeGraph> {
    for (i, f) in [f1, f2].into_iter().enumerate() {
        if !is_matching_forest(g, f) {
            return Err(Error::pre(format!("forest {} is not a matching forest", i + 1)));
        }
    }
    let shares_edge = f1.edges.iter().any(|e| f2.edges.contains(e));
    let shares_arc = f1.arcs.iter().any(|a| f2.arcs.contains(a));
    if shares_edge || shares_arc {
        return Err(Error::pre("the two matching forests are not disjoint"));
    }

    let d = g.digraph();
    let mut edges = Vec::new();
    for &e in &f1.edges {
        let Edge { u, v } = g.edge(e);
        edges.push(ExchangeEdge {
            u,
            v,
            source: EdgeSource::FirstMatching(e),
        });
    }
    for &e in &f2.edges {
        let Edge { u, v } = g.edge(e);
        edges.push(ExchangeEdge {
            u,
            v,
            source: EdgeSource::SecondMatching(e),
        });
    }
    let roots1 = roots(d, &f1.arcs);
    let roots2 = roots(d, &f2.arcs);
    let union: Vec<usize> = f1.arcs.iter().chain(&f2.arcs).copied().collect();
    for x in d.source_components_of(&union) {
        if x.len() < 2 {
            continue;
        }
        let (Some(u), Some(v)) = (
            x.intersection(&roots1).min_vertex(),
            x.intersection(&roots2).min_vertex(),
        ) else {
            return Err(Error::Internal(
                "multi-vertex source component without roots on both sides".into(),
            ));
        };
        edges.push(ExchangeEdge {
            u,
            v,
            source: EdgeSource::SourcePair,
        });
    }

    let mut incident = vec![Vec::new(); g.n()];
    for (i, e) in edges.iter().enumerate() {
        incident[e.u].push(i);
        incident[e.v].push(i);
    }
    Ok(ExchangeGraph {
        n: g.n(),
        edges,
        incident,
    })
}

/// A path component of the exchange graph, listed from its chosen endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapPath {
    pub vertices: Vec<usize>,
    /// Host-graph edges of `M1 ∪ M2` on the path.
    pub matching_edges: Vec<usize>,
}

/// Smallest endpoint `u ∈ ∂F1 ∖ ∂F2` whose path component ends in `∂F1`
/// (or is `u` alone). `None` if there is no such component.
pub fn find_swap_path(
    h: &ExchangeGraph,
    cover1: &VertexSet,
    cover2: &VertexSet,
) -> Option<SwapPath> {
    for &u in cover1.difference(cover2).iter() {
        if h.degree(u) > 1 {
            continue;
        }
        let mut vertices = vec![u];
        let mut via = Vec::new();
        let (mut prev_edge, mut cur) = (usize::MAX, u);
        loop {
            let next = h.incident[cur].iter().copied().find(|&e| e != prev_edge);
            let Some(e) = next else { break };
            via.push(e);
            cur = h.other_end(e, cur);
            prev_edge = e;
            vertices.push(cur);
        }
        if cover1.contains(&cur) {
            let matching_edges = via
                .iter()
                .filter_map(|&e| match h.edges[e].source {
                    EdgeSource::FirstMatching(i) | EdgeSource::SecondMatching(i) => Some(i),
                    EdgeSource::SourcePair => None,
                })
                .collect();
            return Some(SwapPath {
                vertices,
                matching_edges,
            });
        }
    }
    None
}

/// Flips the matchings along `path`, swaps the branching roots on it, and
/// re-packs the arcs.
pub fn swap_along_path(
    g: &MixedGraph,
    f1: &MatchingForest,
    f2: &MatchingForest,
    path: &SwapPath,
    limits: &Limits,
) -> Result<(MatchingForest, MatchingForest)> {
    let on_path: VertexSet = path.vertices.iter().copied().collect();
    let flip = |own: &[usize], other: &[usize]| {
        let own_kept = own.iter().filter(|e| !path.matching_edges.contains(e));
        let taken = other.iter().filter(|e| path.matching_edges.contains(e));
        own_kept.chain(taken).copied().collect::<Vec<_>>()
    };
    let m1 = flip(&f1.edges, &f2.edges);
    let m2 = flip(&f2.edges, &f1.edges);

    let d = g.digraph();
    let roots1 = roots(d, &f1.arcs);
    let roots2 = roots(d, &f2.arcs);
    let spec = RootSpec {
        r1: roots1
            .difference(&on_path)
            .union(&roots2.intersection(&on_path)),
        r2: roots2
            .difference(&on_path)
            .union(&roots1.intersection(&on_path)),
    };
    let (b1, b2) = repartition_two_branchings(d, &f1.arcs, &f2.arcs, &spec, limits)?
        .ok_or_else(|| {
            Error::Internal("swap path produced root sets missing a source component".into())
        })?;
    let out1 = MatchingForest::new(m1, b1);
    let out2 = MatchingForest::new(m2, b2);
    if !is_matching_forest(g, &out1) || !is_matching_forest(g, &out2) {
        return Err(Error::Internal("swap produced an invalid matching forest".into()));
    }
    Ok((out1, out2))
}

/// `Σ_{i<j} ||∂F_i| − |∂F_j||`.
pub fn mf_potential(g: &MixedGraph, parts: &[MatchingForest]) -> usize {
    pairwise_gap_sum(&boundary_sizes(g, parts))
}

pub fn boundary_sizes(g: &MixedGraph, parts: &[MatchingForest]) -> Vec<usize> {
    parts.iter().map(|f| boundary(g, f).len()).collect()
}

/// Largest pairwise difference of boundary sizes.
pub fn max_boundary_gap(g: &MixedGraph, parts: &[MatchingForest]) -> usize {
    let sizes = boundary_sizes(g, parts);
    match (sizes.iter().max(), sizes.iter().min()) {
        (Some(hi), Some(lo)) => hi - lo,
        _ => 0,
    }
}

pub(crate) fn check_mf_partition(g: &MixedGraph, parts: &[MatchingForest]) -> Result<()> {
    let edges: Vec<Vec<usize>> = parts.iter().map(|p| p.edges.clone()).collect();
    let arcs: Vec<Vec<usize>> = parts.iter().map(|p| p.arcs.clone()).collect();
    check_index_partition(&edges, g.edges().len(), "edge")?;
    check_index_partition(&arcs, g.arcs().len(), "arc")?;
    if let Some(i) = parts.iter().position(|f| !is_matching_forest(g, f)) {
        return Err(Error::pre(format!("part {i} is not a matching forest")));
    }
    Ok(())
}

/// Rebalances a partition of `E ∪ A` into k matching forests until every two
/// parts cover numbers of vertices differing by at most two.
pub fn equitable_mf_partition(
    g: &MixedGraph,
    initial: &[MatchingForest],
    limits: &Limits,
) -> Result<Balanced<MatchingForest>> {
    check_mf_partition(g, initial)?;
    let mut parts = initial.to_vec();
    let mut potentials = vec![mf_potential(g, &parts)];

    loop {
        let sizes = boundary_sizes(g, &parts);
        let mut widest: Option<(usize, usize, usize)> = None;
        for i in 0..sizes.len() {
            for j in i + 1..sizes.len() {
                let gap = sizes[i].abs_diff(sizes[j]);
                if gap >= 3 && widest.is_none_or(|(w, _, _)| gap > w) {
                    widest = Some((gap, i, j));
                }
            }
        }
        let Some((_, i, j)) = widest else { break };
        let (big, small) = if sizes[i] >= sizes[j] { (i, j) } else { (j, i) };

        let (f1, f2) = (&parts[big], &parts[small]);
        let cover1 = boundary(g, f1);
        let cover2 = boundary(g, f2);
        let h = build_exchange_graph(g, f1, f2)?;
        if !h.satisfies_invariants(&cover1, &cover2) {
            return Err(Error::Internal("exchange graph violates its degree bounds".into()));
        }
        let path = find_swap_path(&h, &cover1, &cover2).ok_or_else(|| {
            Error::Internal("no swap path although the boundary gap is at least three".into())
        })?;
        let (n1, n2) = swap_along_path(g, f1, f2, &path, limits)?;
        parts[big] = n1;
        parts[small] = n2;

        let potential = mf_potential(g, &parts);
        let previous = *potentials.last().unwrap();
        if potential + 2 > previous {
            return Err(Error::Internal(format!(
                "swap between parts {big} and {small} moved the potential {previous} → {potential}"
            )));
        }
        potentials.push(potential);
    }
    Ok(Balanced { parts, potentials })
}
