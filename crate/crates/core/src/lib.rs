//! Equitable partitions of arc sets into branchings and b-branchings, and of
//! mixed-graph edge sets into matching forests.
//!
//! Every partitioner takes an existing partition into valid parts and
//! rebalances it pair by pair until the relevant size measure is as even as
//! possible:
//!
//! - [`branching::equitable_branching_partition`]: part sizes differ by at most one;
//! - [`matching_forest::equitable_mf_partition`]: numbers of covered vertices
//!   differ by at most two;
//! - [`bbranching::equitable_b_partition`]: part sizes and every per-vertex
//!   indegree differ by at most one, simultaneously.
//!
//! [`idp::decompose`] uses the last one to split integer vectors of dilated
//! b-branching polytopes into incidence vectors, and [`oracle`] holds the
//! brute-force enumerators and seeded generators the tests lean on.

pub mod bbranching;
pub mod branching;
pub mod error;
mod flow;
pub mod graph;
pub mod idp;
pub mod io;
pub mod matching_forest;
pub mod oracle;

pub use error::{Error, Result};
pub use graph::{
    indegree_vector, source_components, strong_components, Arc, Digraph, Edge, Element,
    ElementKind, IndegreeVector, MixedGraph, VertexSet,
};

/// Thresholds that switch between exhaustive and scalable code paths, and
/// bound the brute-force searches.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct Limits {
    /// Largest vertex count for which the branching cut condition is checked
    /// by enumerating every vertex set; above it a max-flow test is used.
    pub exhaustive_cut_max_n: usize,
    /// Largest arc count for which a two-part b-branching repartition may fall
    /// back to enumerating arc 2-colorings.
    pub fallback_threshold: usize,
    /// Largest arc count for which the k-part backtracking search is complete.
    pub size_limit: usize,
    /// Search nodes allowed beyond `size_limit` before reporting a size limit.
    pub search_budget: u64,
    /// Largest element count the power-set enumerators accept.
    pub enumeration_limit: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            exhaustive_cut_max_n: 16,
            fallback_threshold: 24,
            size_limit: 24,
            search_budget: 2_000_000,
            enumeration_limit: 20,
        }
    }
}

/// A rebalanced partition together with the potential after every accepted
/// pair update; `potentials[0]` is the potential of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Balanced<P> {
    pub parts: Vec<P>,
    pub potentials: Vec<usize>,
}

impl<P> Balanced<P> {
    pub fn iterations(&self) -> usize {
        self.potentials.len() - 1
    }

    pub fn initial_potential(&self) -> usize {
        self.potentials[0]
    }

    pub fn final_potential(&self) -> usize {
        *self.potentials.last().unwrap()
    }
}

/// Checks that `parts` are pairwise disjoint, in range, and cover `0..total`.
pub(crate) fn check_index_partition(parts: &[Vec<usize>], total: usize, what: &str) -> Result<()> {
    let mut seen = vec![false; total];
    for (i, part) in parts.iter().enumerate() {
        for &x in part {
            if x >= total {
                return Err(Error::pre(format!(
                    "part {i}: {what} index {x} out of range ({total} {what}s)"
                )));
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(Error::pre(format!("{what} #{x} appears in more than one part")));
            }
        }
    }
    if let Some(x) = seen.iter().position(|s| !s) {
        return Err(Error::pre(format!("{what} #{x} is not covered by any part")));
    }
    Ok(())
}

/// `Σ_{i<j} |s_i − s_j|`.
pub(crate) fn pairwise_gap_sum(sizes: &[usize]) -> usize {
    let mut total = 0;
    for i in 0..sizes.len() {
        for j in i + 1..sizes.len() {
            total += sizes[i].abs_diff(sizes[j]);
        }
    }
    total
}
