//! Integer decomposition for b-branchings of prescribed size and indegrees.
//!
//! An integer vector `x` on the arcs is expanded into a multigraph with `x_a`
//! parallel copies of each arc `a`, the copies are split into `κ`
//! b-branchings by backtracking, the split is made equitable, and every part
//! is projected back onto the original arcs. Under `x(A) = κ·ℓ` and
//! `x(δ⁻v) = κ·b′(v)` the equitable parts all have size `ℓ` and indegree
//! `b′(v)` at every `v ∈ V′`.
//!
//! Parts are kept free of two copies of the same arc throughout, so each
//! projected part is a set of arcs rather than a multiset.

use crate::bbranching::{balance, check_capacity, is_b_branching};
use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::Limits;

/// The expanded multigraph; arc `i` of `digraph` is a copy of arc `origin[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub digraph: Digraph,
    pub origin: Vec<usize>,
}

/// Replaces each arc `a` by `x[a]` parallel copies.
pub fn expand_multigraph(d: &Digraph, x: &[usize]) -> Result<Expansion> {
    if x.len() != d.arc_count() {
        return Err(Error::input(
            "x",
            format!("has {} entries, expected one per arc ({})", x.len(), d.arc_count()),
        ));
    }
    let origin: Vec<usize> = x
        .iter()
        .enumerate()
        .flat_map(|(a, &m)| std::iter::repeat_n(a, m))
        .collect();
    let digraph = Digraph::new(
        d.n(),
        origin.iter().map(|&a| (d.arc(a).tail, d.arc(a).head)),
    )?;
    Ok(Expansion { digraph, origin })
}

/// Partitions the arcs of `d` into `k` b-branchings by backtracking.
///
/// `Ok(None)` is a proof that no partition exists. Above `limits.size_limit`
/// arcs the search is cut off after `limits.search_budget` nodes and reports
/// [`Error::SizeLimit`] instead.
pub fn partition_into_k_bbranchings(
    d: &Digraph,
    b: &[usize],
    k: usize,
    limits: &Limits,
) -> Result<Option<Vec<Vec<usize>>>> {
    check_capacity(d, b)?;
    if k == 0 {
        return Err(Error::input("k", "must be at least 1"));
    }
    let groups = group_parallel(d, None);
    PartitionSearch::new(d, b, k, groups, None, limits).run()
}

/// Arcs grouped into interchangeable classes: identical endpoints, and the
/// same origin when one is given.
fn group_parallel(d: &Digraph, origin: Option<&[usize]>) -> Vec<Vec<usize>> {
    let mut keyed: Vec<((usize, usize, usize), usize)> = (0..d.arc_count())
        .map(|a| {
            let arc = d.arc(a);
            let o = origin.map_or(0, |o| o[a]);
            ((arc.head, arc.tail, o), a)
        })
        .collect();
    keyed.sort_unstable();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut last = None;
    for (key, a) in keyed {
        if last == Some(key) {
            groups.last_mut().unwrap().push(a);
        } else {
            groups.push(vec![a]);
            last = Some(key);
        }
    }
    // crowded heads first: they fail fastest
    let total_deg = d.indegrees_of(&d.all_arcs());
    groups.sort_by_key(|g| {
        let h = d.arc(g[0]).head;
        (std::cmp::Reverse(total_deg[h]), h, std::cmp::Reverse(g.len()))
    });
    groups
}

struct PartitionSearch<'a> {
    d: &'a Digraph,
    b: &'a [usize],
    k: usize,
    groups: Vec<Vec<usize>>,
    /// At most this many arcs of one group per part.
    per_part: Option<usize>,
    /// Arcs at each head not yet assigned, indexed by group position.
    remaining_at: Vec<Vec<usize>>,
    budget: Option<u64>,
    limit: usize,
    nodes: u64,
}

impl<'a> PartitionSearch<'a> {
    fn new(
        d: &'a Digraph,
        b: &'a [usize],
        k: usize,
        groups: Vec<Vec<usize>>,
        per_part: Option<usize>,
        limits: &Limits,
    ) -> Self {
        let n = d.n();
        let mut remaining_at = vec![vec![0; n]; groups.len() + 1];
        for (gi, g) in groups.iter().enumerate().rev() {
            remaining_at[gi] = remaining_at[gi + 1].clone();
            remaining_at[gi][d.arc(g[0]).head] += g.len();
        }
        let budget = (d.arc_count() > limits.size_limit).then_some(limits.search_budget);
        PartitionSearch {
            d,
            b,
            k,
            groups,
            per_part,
            remaining_at,
            budget,
            limit: limits.size_limit,
            nodes: 0,
        }
    }

    fn run(mut self) -> Result<Option<Vec<Vec<usize>>>> {
        let n = self.d.n();
        // quick refutations: indegree caps and the whole-vertex-set sparsity
        let deg = self.d.indegrees_of(&self.d.all_arcs());
        if (0..n).any(|v| deg[v] > self.k * self.b[v]) {
            return Ok(None);
        }
        let cap: usize = self.b.iter().sum();
        if self.d.arc_count() > self.k * (cap - 1) {
            return Ok(None);
        }
        if let Some(m) = self.per_part {
            if self.groups.iter().any(|g| g.len() > m * self.k) {
                return Ok(None);
            }
        }
        let mut parts = vec![Vec::new(); self.k];
        let mut degs = vec![vec![0; n]; self.k];
        if self.visit(0, &mut parts, &mut degs)? {
            for p in &mut parts {
                p.sort_unstable();
            }
            Ok(Some(parts))
        } else {
            Ok(None)
        }
    }

    fn visit(
        &mut self,
        gi: usize,
        parts: &mut Vec<Vec<usize>>,
        degs: &mut Vec<Vec<usize>>,
    ) -> Result<bool> {
        self.nodes += 1;
        if let Some(budget) = self.budget {
            if self.nodes > budget {
                return Err(Error::SizeLimit {
                    what: "partition search (arcs)",
                    size: self.d.arc_count(),
                    limit: self.limit,
                });
            }
        }
        if gi == self.groups.len() {
            return Ok(true);
        }
        // every head must still fit into the spare capacity of the parts
        for v in 0..self.d.n() {
            let spare: usize = degs.iter().map(|dp| self.b[v] - dp[v]).sum();
            if self.remaining_at[gi][v] > spare {
                return Ok(false);
            }
        }
        let group = self.groups[gi].clone();
        let head = self.d.arc(group[0]).head;
        let mut order: Vec<usize> = (0..self.k).collect();
        order.sort_by_key(|&p| (parts[p].len(), p));
        let mut counts = vec![0; self.k];
        self.distribute(gi, &group, head, &order, 0, group.len(), &mut counts, parts, degs)
    }

    /// Chooses how many arcs of `group` each part (in `order`) receives.
    #[allow(clippy::too_many_arguments)]
    fn distribute(
        &mut self,
        gi: usize,
        group: &[usize],
        head: usize,
        order: &[usize],
        pos: usize,
        left: usize,
        counts: &mut Vec<usize>,
        parts: &mut Vec<Vec<usize>>,
        degs: &mut Vec<Vec<usize>>,
    ) -> Result<bool> {
        if pos == order.len() {
            if left > 0 {
                return Ok(false);
            }
            return self.apply(gi, group, head, counts, parts, degs);
        }
        let p = order[pos];
        let mut hi = left.min(self.b[head] - degs[p][head]);
        if let Some(m) = self.per_part {
            hi = hi.min(m);
        }
        // empty parts are interchangeable: give them non-increasing counts by index
        if parts[p].is_empty() {
            if let Some(q) = (0..p).rev().find(|&q| parts[q].is_empty()) {
                hi = hi.min(counts[q]);
            }
        }
        for c in (0..=hi).rev() {
            counts[p] = c;
            if self.distribute(gi, group, head, order, pos + 1, left - c, counts, parts, degs)? {
                return Ok(true);
            }
        }
        counts[p] = 0;
        Ok(false)
    }

    fn apply(
        &mut self,
        gi: usize,
        group: &[usize],
        head: usize,
        counts: &[usize],
        parts: &mut Vec<Vec<usize>>,
        degs: &mut Vec<Vec<usize>>,
    ) -> Result<bool> {
        let mut next = 0;
        let mut ok = true;
        for p in 0..self.k {
            let c = counts[p];
            parts[p].extend_from_slice(&group[next..next + c]);
            degs[p][head] += c;
            next += c;
            if c > 0 && ok && !is_b_branching(self.d, self.b, &parts[p]) {
                ok = false;
            }
        }
        if ok && self.visit(gi + 1, parts, degs)? {
            return Ok(true);
        }
        for p in 0..self.k {
            let c = counts[p];
            let len = parts[p].len();
            parts[p].truncate(len - c);
            degs[p][head] -= c;
        }
        Ok(false)
    }
}

/// Size and indegree conditions for a decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdpQuery {
    pub kappa: usize,
    /// Required size of every part; `None` leaves sizes free.
    pub ell: Option<usize>,
    /// Vertices with prescribed indegree, paired with `bprime`.
    pub vprime: Vec<usize>,
    pub bprime: Vec<usize>,
}

impl From<crate::io::DecomposeQueryFile> for IdpQuery {
    fn from(f: crate::io::DecomposeQueryFile) -> Self {
        IdpQuery {
            kappa: f.kappa,
            ell: f.ell,
            vprime: f.vprime,
            bprime: f.bprime,
        }
    }
}

fn validate_query(d: &Digraph, b: &[usize], x: &[usize], q: &IdpQuery) -> Result<()> {
    check_capacity(d, b)?;
    if x.len() != d.arc_count() {
        return Err(Error::input(
            "x",
            format!("has {} entries, expected one per arc ({})", x.len(), d.arc_count()),
        ));
    }
    if q.kappa == 0 {
        return Err(Error::input("kappa", "must be at least 1"));
    }
    if q.vprime.len() != q.bprime.len() {
        return Err(Error::input(
            "bprime",
            format!("has {} entries but Vprime has {}", q.bprime.len(), q.vprime.len()),
        ));
    }
    let mut seen = vec![false; d.n()];
    for (i, (&v, &bv)) in q.vprime.iter().zip(&q.bprime).enumerate() {
        if v >= d.n() {
            return Err(Error::input(
                format!("Vprime[{i}]"),
                format!("vertex {v} out of range (n = {})", d.n()),
            ));
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::input(format!("Vprime[{i}]"), format!("vertex {v} repeated")));
        }
        if bv > b[v] {
            return Err(Error::input(
                format!("bprime[{i}]"),
                format!("{bv} exceeds b({v}) = {}", b[v]),
            ));
        }
    }
    let total: usize = x.iter().sum();
    if let Some(ell) = q.ell {
        if total != q.kappa * ell {
            return Err(Error::input(
                "x",
                format!(
                    "x(A) = {total} must equal kappa·ell = {}·{ell} for the size condition",
                    q.kappa
                ),
            ));
        }
    }
    let mut into = vec![0; d.n()];
    for (a, &m) in x.iter().enumerate() {
        into[d.arc(a).head] += m;
    }
    for (&v, &bv) in q.vprime.iter().zip(&q.bprime) {
        if into[v] != q.kappa * bv {
            return Err(Error::input(
                "x",
                format!(
                    "x(δ⁻{v}) = {} must equal kappa·bprime = {}·{bv} for the indegree condition",
                    into[v], q.kappa
                ),
            ));
        }
    }
    Ok(())
}

/// Writes `x` as a sum of `κ` incidence vectors of b-branchings meeting the
/// query's size and indegree conditions. `Ok(None)` when `x` is not a sum of
/// `κ` b-branchings at all.
pub fn decompose(
    d: &Digraph,
    b: &[usize],
    x: &[usize],
    q: &IdpQuery,
    limits: &Limits,
) -> Result<Option<Vec<Vec<usize>>>> {
    validate_query(d, b, x, q)?;
    let expansion = expand_multigraph(d, x)?;
    let dx = &expansion.digraph;
    let groups = group_parallel(dx, Some(&expansion.origin));
    let Some(initial) =
        PartitionSearch::new(dx, b, q.kappa, groups, Some(1), limits).run()?
    else {
        return Ok(None);
    };
    let balanced = balance(dx, b, &initial, Some(&expansion.origin), limits)?;

    let parts: Vec<Vec<usize>> = balanced
        .parts
        .iter()
        .map(|p| {
            let mut arcs: Vec<usize> = p.iter().map(|&a| expansion.origin[a]).collect();
            arcs.sort_unstable();
            arcs
        })
        .collect();
    check_decomposition(d, b, x, q, &parts)
        .map_err(|msg| Error::Internal(format!("decomposition check failed: {msg}")))?;
    Ok(Some(parts))
}

/// Verifies a decomposition: every part is a b-branching of `d`, the parts'
/// incidence vectors sum to `x`, and the size and indegree conditions hold.
pub fn check_decomposition(
    d: &Digraph,
    b: &[usize],
    x: &[usize],
    q: &IdpQuery,
    parts: &[Vec<usize>],
) -> std::result::Result<(), String> {
    if parts.len() != q.kappa {
        return Err(format!("{} parts, expected {}", parts.len(), q.kappa));
    }
    let mut sum = vec![0; d.arc_count()];
    for (i, p) in parts.iter().enumerate() {
        if !is_b_branching(d, b, p) {
            return Err(format!("part {i} is not a b-branching"));
        }
        for &a in p {
            sum[a] += 1;
        }
        if let Some(ell) = q.ell {
            if p.len() != ell {
                return Err(format!("part {i} has size {}, expected {ell}", p.len()));
            }
        }
        let deg = d.indegrees_of(p);
        for (&v, &bv) in q.vprime.iter().zip(&q.bprime) {
            if deg[v] != bv {
                return Err(format!("part {i} has indegree {} at {v}, expected {bv}", deg[v]));
            }
        }
    }
    if sum != x {
        return Err("incidence vectors do not sum to x".into());
    }
    Ok(())
}
