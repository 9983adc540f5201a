//! Mixed graphs, digraphs, vertex sets and component structure.
//!
//! Edges and arcs are identified by their index in the graph's edge or arc
//! sequence, so parallel elements stay distinct. Every subset handled by the
//! rest of the crate is a list of such indices.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected edge `{u, v}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

/// Directed arc `(tail, head)`. An arc covers only its head.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Edge,
    Arc,
}

/// An edge or an arc of a mixed graph, referenced by kind and index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element {
    pub kind: ElementKind,
    pub index: usize,
}

impl Element {
    pub fn edge(index: usize) -> Self {
        Element {
            kind: ElementKind::Edge,
            index,
        }
    }

    pub fn arc(index: usize) -> Self {
        Element {
            kind: ElementKind::Arc,
            index,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ElementKind::Edge => write!(f, "edge #{}", self.index),
            ElementKind::Arc => write!(f, "arc #{}", self.index),
        }
    }
}

/// A set of vertices with set semantics and deterministic (sorted) iteration.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet(BTreeSet<usize>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(BTreeSet::new())
    }

    pub fn insert(&mut self, v: usize) -> bool {
        self.0.insert(v)
    }

    pub fn remove(&mut self, v: usize) -> bool {
        self.0.remove(&v)
    }

    pub fn min_vertex(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.0.union(&other.0).copied().collect()
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        self.0.intersection(&other.0).copied().collect()
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        self.0.difference(&other.0).copied().collect()
    }

    pub fn symmetric_difference(&self, other: &VertexSet) -> VertexSet {
        self.0.symmetric_difference(&other.0).copied().collect()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    /// Complement within `[0, n)`.
    pub fn complement(&self, n: usize) -> VertexSet {
        (0..n).filter(|v| !self.0.contains(v)).collect()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.iter().copied().collect()
    }
}

impl Deref for VertexSet {
    type Target = BTreeSet<usize>;

    fn deref(&self) -> &BTreeSet<usize> {
        &self.0
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet(iter.into_iter().collect())
    }
}

impl<const N: usize> From<[usize; N]> for VertexSet {
    fn from(vs: [usize; N]) -> Self {
        vs.into_iter().collect()
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a usize;
    type IntoIter = std::collections::btree_set::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Per-vertex counts, indexed by vertex id.
pub type IndegreeVector = Vec<usize>;

/// Digraph `D = (V, A)` with `V = [0, n)`. Parallel arcs are allowed,
/// self-loops are not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: Vec<Arc>,
}

impl Digraph {
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let arcs = arcs
            .into_iter()
            .map(|(tail, head)| Arc { tail, head })
            .collect::<Vec<_>>();
        for (i, a) in arcs.iter().enumerate() {
            check_endpoints(n, "arcs", i, a.tail, a.head)?;
        }
        Ok(Digraph { n, arcs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, index: usize) -> Arc {
        self.arcs[index]
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn all_arcs(&self) -> Vec<usize> {
        (0..self.arcs.len()).collect()
    }

    pub fn check_arc_indices(&self, subset: &[usize]) -> Result<()> {
        for &a in subset {
            if a >= self.arcs.len() {
                return Err(Error::input(
                    "arc subset",
                    format!("arc index {a} out of range ({} arcs)", self.arcs.len()),
                ));
            }
        }
        Ok(())
    }

    /// Strong components of `(V, subset)`, each sorted, ordered by smallest vertex.
    pub fn strong_components_of(&self, subset: &[usize]) -> Vec<VertexSet> {
        let mut out = vec![Vec::new(); self.n];
        for &a in subset {
            let arc = self.arcs[a];
            out[arc.tail].push(arc.head);
        }
        let comp = tarjan(&out);
        let count = comp.iter().copied().max().map_or(0, |c| c + 1);
        let mut comps = vec![VertexSet::new(); count];
        for (v, &c) in comp.iter().enumerate() {
            comps[c].insert(v);
        }
        comps.sort_by_key(|c| c.min_vertex());
        comps
    }

    /// Strong components of `(V, subset)` that no arc of `subset` enters.
    pub fn source_components_of(&self, subset: &[usize]) -> Vec<VertexSet> {
        let comps = self.strong_components_of(subset);
        let mut comp_of = vec![0; self.n];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        let mut entered = vec![false; comps.len()];
        for &a in subset {
            let arc = self.arcs[a];
            if comp_of[arc.tail] != comp_of[arc.head] {
                entered[comp_of[arc.head]] = true;
            }
        }
        comps
            .into_iter()
            .zip(entered)
            .filter_map(|(c, e)| (!e).then_some(c))
            .collect()
    }

    pub fn indegrees_of(&self, subset: &[usize]) -> IndegreeVector {
        let mut deg = vec![0; self.n];
        for &a in subset {
            deg[self.arcs[a].head] += 1;
        }
        deg
    }

    /// Digraph whose arcs are `subset` (in that order); arc `i` of the result
    /// is arc `subset[i]` of `self`.
    pub fn restrict(&self, subset: &[usize]) -> Digraph {
        Digraph {
            n: self.n,
            arcs: subset.iter().map(|&a| self.arcs[a]).collect(),
        }
    }
}

/// Strongly connected components of the whole digraph.
pub fn strong_components(d: &Digraph) -> Vec<VertexSet> {
    d.strong_components_of(&d.all_arcs())
}

/// Strong components with no entering arc, singletons included.
pub fn source_components(d: &Digraph) -> Vec<VertexSet> {
    d.source_components_of(&d.all_arcs())
}

/// `d⁻_F(v)` for every vertex.
pub fn indegree_vector(d: &Digraph, subset: &[usize]) -> Result<IndegreeVector> {
    d.check_arc_indices(subset)?;
    Ok(d.indegrees_of(subset))
}

/// Mixed graph `G = (V, E, A)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedGraph {
    n: usize,
    edges: Vec<Edge>,
    digraph: Digraph,
}

impl MixedGraph {
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        arcs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let edges = edges
            .into_iter()
            .map(|(u, v)| Edge { u, v })
            .collect::<Vec<_>>();
        for (i, e) in edges.iter().enumerate() {
            check_endpoints(n, "edges", i, e.u, e.v)?;
        }
        let digraph = Digraph::new(n, arcs)?;
        Ok(MixedGraph { n, edges, digraph })
    }

    pub fn from_digraph(d: Digraph) -> Self {
        MixedGraph {
            n: d.n,
            edges: Vec::new(),
            digraph: d,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> Edge {
        self.edges[index]
    }

    pub fn arcs(&self) -> &[Arc] {
        self.digraph.arcs()
    }

    /// The directed part `(V, A)`.
    pub fn digraph(&self) -> &Digraph {
        &self.digraph
    }

    pub fn is_digraph(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn element_count(&self) -> usize {
        self.edges.len() + self.digraph.arc_count()
    }

    /// Every element, edges first, then arcs.
    pub fn elements(&self) -> Vec<Element> {
        (0..self.edges.len())
            .map(Element::edge)
            .chain((0..self.digraph.arc_count()).map(Element::arc))
            .collect()
    }

    pub fn contains(&self, e: Element) -> bool {
        match e.kind {
            ElementKind::Edge => e.index < self.edges.len(),
            ElementKind::Arc => e.index < self.digraph.arc_count(),
        }
    }
}

fn check_endpoints(n: usize, field: &str, i: usize, u: usize, v: usize) -> Result<()> {
    for x in [u, v] {
        if x >= n {
            return Err(Error::input(
                format!("{field}[{i}]"),
                format!("endpoint {x} out of range (n = {n})"),
            ));
        }
    }
    if u == v {
        return Err(Error::input(
            format!("{field}[{i}]"),
            format!("self-loop at vertex {u} is not allowed"),
        ));
    }
    Ok(())
}

/// Iterative Tarjan. Returns a component id per vertex.
fn tarjan(adj: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    // (vertex, position in its adjacency list)
    let mut call = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos == 0 && index[v] == UNSEEN {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(*pos) {
                *pos += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}
