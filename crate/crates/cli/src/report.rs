use serde::Serialize;
use sha2::{Digest, Sha256};

use equipart::matching_forest::MatchingForest;
use equipart::oracle::{max_gap, Criterion};
use equipart::MixedGraph;

#[derive(Debug, Serialize)]
pub struct Gaps {
    pub boundary: usize,
    pub size: usize,
    pub indegree: usize,
}

impl Gaps {
    pub fn of(g: &MixedGraph, parts: &[MatchingForest]) -> Self {
        Gaps {
            boundary: max_gap(g, parts, Criterion::Boundary),
            size: max_gap(g, parts, Criterion::Size),
            indegree: max_gap(g, parts, Criterion::Indegree),
        }
    }
}

/// Summary of one run, printed to stderr as a single JSON line.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub input_digest: String,
    pub subcommand: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_potential: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_potential: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gaps: Option<Gaps>,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn new(subcommand: &'static str, input: &[u8]) -> Self {
        RunReport {
            input_digest: hex::encode(Sha256::digest(input)),
            subcommand,
            iterations: None,
            initial_potential: None,
            final_potential: None,
            gaps: None,
            wall_time_ms: 0.0,
        }
    }

    pub fn potentials(&mut self, trace: &[usize]) {
        self.iterations = Some(trace.len().saturating_sub(1));
        self.initial_potential = trace.first().copied();
        self.final_potential = trace.last().copied();
    }
}
