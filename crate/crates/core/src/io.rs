//! JSON instance and query files.
//!
//! ```json
//! {"n": 4, "edges": [[0, 1]], "arcs": [[2, 3]], "b": [1, 1, 1, 1], "k": 2,
//!  "partition": [[{"kind": "edge", "index": 0}], [{"kind": "arc", "index": 0}]]}
//! ```
//!
//! `b`, `k`, `partition` and `kind` (`"branching"`, `"matching-forest"` or
//! `"b-branching"`, naming what the parts are meant to be) are optional. Arrays keep their input order, so
//! writing a parsed instance reproduces it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Digraph, Element, ElementKind, MixedGraph};
use crate::matching_forest::MatchingForest;
use crate::oracle::PartitionKind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub arcs: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Vec<Element>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<PartitionKind>,
}

/// A parsed and range-checked instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: MixedGraph,
    pub b: Option<Vec<usize>>,
    pub k: Option<usize>,
    pub partition: Option<Vec<Vec<Element>>>,
    pub kind: Option<PartitionKind>,
}

impl Instance {
    pub fn new(graph: MixedGraph) -> Self {
        Instance {
            graph,
            b: None,
            k: None,
            partition: None,
            kind: None,
        }
    }

    /// The declared kind, or else: b-branchings when `b` is given, branchings
    /// for a digraph, matching forests otherwise.
    pub fn effective_kind(&self) -> PartitionKind {
        match self.kind {
            Some(kind) => kind,
            None if self.b.is_some() => PartitionKind::BBranching,
            None if self.graph.is_digraph() => PartitionKind::Branching,
            None => PartitionKind::MatchingForest,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text)?;
        Instance::try_from(file)
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            n: self.graph.n(),
            edges: self.graph.edges().iter().map(|e| [e.u, e.v]).collect(),
            arcs: self.graph.arcs().iter().map(|a| [a.tail, a.head]).collect(),
            b: self.b.clone(),
            k: self.k,
            partition: self.partition.clone(),
            kind: self.kind,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance serializes")
    }

    pub fn digraph(&self) -> &Digraph {
        self.graph.digraph()
    }

    /// The `partition` field, required to be pairwise disjoint and to cover
    /// every edge and arc.
    pub fn checked_partition(&self) -> Result<&[Vec<Element>]> {
        let parts = self
            .partition
            .as_deref()
            .ok_or_else(|| Error::input("partition", "missing"))?;
        let mut owner = std::collections::HashMap::new();
        for (i, part) in parts.iter().enumerate() {
            for e in part {
                if let Some(j) = owner.insert(*e, i) {
                    return Err(Error::input(
                        "partition",
                        format!("{e} appears in parts {j} and {i}"),
                    ));
                }
            }
        }
        if let Some(e) = self.graph.elements().into_iter().find(|e| !owner.contains_key(e)) {
            return Err(Error::input(
                "partition",
                format!("{e} is not in any part"),
            ));
        }
        Ok(parts)
    }

    /// Partition as arc-index lists; fails if any part holds an edge.
    pub fn arc_partition(&self) -> Result<Vec<Vec<usize>>> {
        let parts = self.checked_partition()?;
        parts
            .iter()
            .enumerate()
            .map(|(i, part)| {
                part.iter()
                    .map(|e| match e.kind {
                        ElementKind::Arc => Ok(e.index),
                        ElementKind::Edge => Err(Error::input(
                            format!("partition[{i}]"),
                            format!("{e} cannot belong to a branching"),
                        )),
                    })
                    .collect()
            })
            .collect()
    }

    pub fn forest_partition(&self) -> Result<Vec<MatchingForest>> {
        Ok(self
            .checked_partition()?
            .iter()
            .map(|p| MatchingForest::from_elements(p))
            .collect())
    }

    pub fn set_arc_partition(&mut self, parts: &[Vec<usize>]) {
        self.partition = Some(
            parts
                .iter()
                .map(|p| p.iter().map(|&a| Element::arc(a)).collect())
                .collect(),
        );
        self.k = Some(parts.len());
    }

    pub fn set_forest_partition(&mut self, parts: &[MatchingForest]) {
        self.partition = Some(parts.iter().map(MatchingForest::elements).collect());
        self.k = Some(parts.len());
    }
}

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(file: InstanceFile) -> Result<Self> {
        let graph = MixedGraph::new(
            file.n,
            file.edges.iter().map(|e| (e[0], e[1])),
            file.arcs.iter().map(|a| (a[0], a[1])),
        )?;
        if let Some(b) = &file.b {
            crate::bbranching::check_capacity(graph.digraph(), b)?;
        }
        if file.k == Some(0) {
            return Err(Error::input("k", "must be at least 1"));
        }
        if let Some(parts) = &file.partition {
            for (i, part) in parts.iter().enumerate() {
                for (j, e) in part.iter().enumerate() {
                    if !graph.contains(*e) {
                        return Err(Error::input(
                            format!("partition[{i}][{j}]"),
                            format!("{e} does not exist"),
                        ));
                    }
                }
            }
            if let Some(k) = file.k {
                if k != parts.len() {
                    return Err(Error::input(
                        "k",
                        format!("is {k} but the partition has {} parts", parts.len()),
                    ));
                }
            }
        }
        match file.kind {
            Some(PartitionKind::BBranching) if file.b.is_none() => {
                return Err(Error::input("kind", "b-branching instances need b"));
            }
            Some(PartitionKind::Branching | PartitionKind::BBranching) if !graph.is_digraph() => {
                return Err(Error::input("kind", "branchings cannot contain edges"));
            }
            _ => {}
        }
        Ok(Instance {
            graph,
            b: file.b,
            k: file.k,
            partition: file.partition,
            kind: file.kind,
        })
    }
}

/// Query for [`crate::idp::decompose`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecomposeQueryFile {
    pub x: Vec<usize>,
    pub kappa: usize,
    #[serde(default)]
    pub ell: Option<usize>,
    #[serde(rename = "Vprime", default)]
    pub vprime: Vec<usize>,
    #[serde(default)]
    pub bprime: Vec<usize>,
}
