//! Small augmenting-path max-flow used by the cut-condition check on larger
//! vertex counts.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct FlowEdge {
    to: usize,
    cap: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct FlowNetwork {
    edges: Vec<FlowEdge>,
    adj: Vec<Vec<usize>>,
}

impl FlowNetwork {
    pub(crate) fn new(nodes: usize) -> Self {
        FlowNetwork {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
        }
    }

    pub(crate) fn add_edge(&mut self, from: usize, to: usize, cap: usize) {
        self.adj[from].push(self.edges.len());
        self.edges.push(FlowEdge { to, cap });
        self.adj[to].push(self.edges.len());
        self.edges.push(FlowEdge { to: from, cap: 0 });
    }

    /// Max flow from `s` to `t`, stopping once `bound` units are routed.
    /// Consumes residual capacity, so callers clone per query.
    pub(crate) fn max_flow_bounded(&mut self, s: usize, t: usize, bound: usize) -> usize {
        let mut flow = 0;
        while flow < bound {
            let mut prev = vec![usize::MAX; self.adj.len()];
            let mut queue = VecDeque::from([s]);
            let mut seen = vec![false; self.adj.len()];
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for &e in &self.adj[u] {
                    let FlowEdge { to, cap } = self.edges[e];
                    if cap > 0 && !seen[to] {
                        seen[to] = true;
                        prev[to] = e;
                        queue.push_back(to);
                    }
                }
            }
            if !seen[t] {
                break;
            }
            let mut push = bound - flow;
            let mut v = t;
            while v != s {
                let e = prev[v];
                push = push.min(self.edges[e].cap);
                v = self.edges[e ^ 1].to;
            }
            let mut v = t;
            while v != s {
                let e = prev[v];
                self.edges[e].cap -= push;
                self.edges[e ^ 1].cap += push;
                v = self.edges[e ^ 1].to;
            }
            flow += push;
        }
        flow
    }
}
