//! Clique enumeration, counting, and extension queries.
//!
//! Enumeration is deterministic: members come out in lexicographic order no
//! matter how many threads participate. Counting never materializes cliques
//! and is safe on instances far above the enumeration cap.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::bits::BitRow;
use crate::comb::for_each_combination;
use crate::hypergraph::{Edge, Hypergraph, Vertex};
use crate::rat::binom;

/// Default ceiling on materialized cliques; exceeding it is a hard error.
pub const DEFAULT_CLIQUE_CAP: usize = 100_000_000;

/// Environment variable that overrides the enumeration cap.
pub const CLIQUE_CAP_ENV: &str = "FRACDECOMP_CLIQUE_CAP";

/// Cap from the environment, falling back to the default.
#[must_use]
pub fn clique_cap() -> usize {
    std::env::var(CLIQUE_CAP_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_CLIQUE_CAP)
}

#[derive(Debug, Error)]
pub enum CliqueError {
    #[error("clique order r={r} outside k={k}..=n={n}")]
    OrderOutOfRange { r: usize, k: usize, n: usize },
    #[error("clique enumeration exceeds the cap of {cap} (order r={r})")]
    CapExceeded { cap: usize, r: usize },
    #[error("operation requires uniformity k=2, graph has k={0}")]
    NotAGraph(usize),
    #[error("{0:?} is not an edge of the graph")]
    NotAnEdge(Edge),
    #[error("family order {family_r} does not match requested order {r}")]
    FamilyOrderMismatch { family_r: usize, r: usize },
}

/// An ordered family of r-cliques (vertex sets sorted, members in
/// lexicographic order).
#[derive(Debug, Clone)]
pub struct CliqueFamily {
    r: usize,
    members: Vec<Vec<Vertex>>,
}

impl CliqueFamily {
    /// Builds a family from members, sorting and asserting uniqueness.
    #[must_use]
    pub fn from_members(r: usize, mut members: Vec<Vec<Vertex>>) -> Self {
        for m in &mut members {
            m.sort_unstable();
            debug_assert_eq!(m.len(), r);
        }
        members.sort_unstable();
        members.dedup();
        CliqueFamily { r, members }
    }

    #[inline]
    #[must_use]
    pub fn r(&self) -> usize {
        self.r
    }

    #[inline]
    #[must_use]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members in lexicographic order.
    #[inline]
    #[must_use]
    pub fn members(&self) -> &[Vec<Vertex>] {
        &self.members
    }

    /// Index of a sorted vertex set within the family.
    #[inline]
    #[must_use]
    pub fn position(&self, key: &[Vertex]) -> Option<usize> {
        self.members
            .binary_search_by(|m| m.as_slice().cmp(key))
            .ok()
    }

    #[inline]
    #[must_use]
    pub fn contains(&self, key: &[Vertex]) -> bool {
        self.position(key).is_some()
    }

    /// Borrowed hash set over members, for bulk membership tests.
    #[must_use]
    pub fn member_set(&self) -> HashSet<&[Vertex]> {
        self.members.iter().map(|m| m.as_slice()).collect()
    }
}

// ----------------------------------------------------------------------
// Enumeration and counting
// ----------------------------------------------------------------------

/// Enumerates all r-cliques, k <= r <= n, under the environment cap.
pub fn enumerate_cliques(g: &Hypergraph, r: usize) -> Result<CliqueFamily, CliqueError> {
    enumerate_cliques_capped(g, r, clique_cap())
}

/// Enumerates all r-cliques with an explicit cap on the member count.
pub fn enumerate_cliques_capped(
    g: &Hypergraph,
    r: usize,
    cap: usize,
) -> Result<CliqueFamily, CliqueError> {
    if r < g.k() || r > g.n() {
        return Err(CliqueError::OrderOutOfRange {
            r,
            k: g.k(),
            n: g.n(),
        });
    }
    let emitted = AtomicUsize::new(0);
    let over = AtomicBool::new(false);
    let members: Vec<Vec<Vertex>> = if g.k() == 2 {
        let per_start: Vec<Vec<Vec<Vertex>>> = (0..g.n())
            .into_par_iter()
            .map(|v0| {
                let mut out = Vec::new();
                if over.load(Ordering::Relaxed) {
                    return out;
                }
                let mut cand = g.adj(v0 as Vertex).clone();
                cand.clear_below(v0 + 1);
                let mut prefix = vec![v0 as Vertex];
                collect_graph(g, &mut prefix, &cand, r - 1, cap, &emitted, &over, &mut out);
                out
            })
            .collect();
        per_start.into_iter().flatten().collect()
    } else {
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        collect_hyper(g, &mut prefix, 0, r, cap, &emitted, &over, &mut out);
        out
    };
    if over.load(Ordering::Relaxed) {
        return Err(CliqueError::CapExceeded { cap, r });
    }
    debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
    Ok(CliqueFamily { r, members })
}

#[allow(clippy::too_many_arguments)]
fn collect_graph(
    g: &Hypergraph,
    prefix: &mut Vec<Vertex>,
    cand: &BitRow,
    need: usize,
    cap: usize,
    emitted: &AtomicUsize,
    over: &AtomicBool,
    out: &mut Vec<Vec<Vertex>>,
) {
    if over.load(Ordering::Relaxed) {
        return;
    }
    if need == 0 {
        if emitted.fetch_add(1, Ordering::Relaxed) >= cap {
            over.store(true, Ordering::Relaxed);
            return;
        }
        out.push(prefix.clone());
        return;
    }
    for v in cand.iter_ones() {
        if need == 1 {
            if emitted.fetch_add(1, Ordering::Relaxed) >= cap {
                over.store(true, Ordering::Relaxed);
                return;
            }
            let mut k = prefix.clone();
            k.push(v as Vertex);
            out.push(k);
        } else {
            let mut next = cand.and(g.adj(v as Vertex));
            next.clear_below(v + 1);
            if next.count() < need - 1 {
                continue;
            }
            prefix.push(v as Vertex);
            collect_graph(g, prefix, &next, need - 1, cap, emitted, over, out);
            prefix.pop();
            if over.load(Ordering::Relaxed) {
                return;
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn collect_hyper(
    g: &Hypergraph,
    prefix: &mut Vec<Vertex>,
    from: usize,
    r: usize,
    cap: usize,
    emitted: &AtomicUsize,
    over: &AtomicBool,
    out: &mut Vec<Vec<Vertex>>,
) {
    if prefix.len() == r {
        if emitted.fetch_add(1, Ordering::Relaxed) >= cap {
            over.store(true, Ordering::Relaxed);
            return;
        }
        out.push(prefix.clone());
        return;
    }
    let need = r - prefix.len();
    for v in from..g.n() {
        if g.n() - v < need {
            break;
        }
        if !hyper_compatible(g, prefix, v as Vertex) {
            continue;
        }
        prefix.push(v as Vertex);
        collect_hyper(g, prefix, v + 1, r, cap, emitted, over, out);
        prefix.pop();
        if over.load(Ordering::Relaxed) {
            return;
        }
    }
}

/// True iff adding `v` keeps `prefix` a partial clique: every (k-1)-subset
/// of `prefix` forms an edge with `v`.
fn hyper_compatible(g: &Hypergraph, prefix: &[Vertex], v: Vertex) -> bool {
    if prefix.len() < g.k() - 1 {
        return true;
    }
    let mut ok = true;
    for_each_combination(prefix, g.k() - 1, |t| {
        if ok {
            let mut e = t.to_vec();
            e.push(v);
            if !g.has_edge(&e) {
                ok = false;
            }
        }
    });
    ok
}

/// The clique-count scalar k_r as used by every counting formula, with the
/// low-order conventions: 0 for r < 0 and C(n, r) for 0 <= r <= k. Note the
/// convention covers r = k, where the formulas treat the host as if its edge
/// set were complete; [`enumerate_cliques`] at r = k still returns the
/// actual edges. Counts exactly and never materializes cliques.
#[must_use]
pub fn count_cliques(g: &Hypergraph, r: i64) -> BigInt {
    if r < 0 {
        return BigInt::zero();
    }
    let r = r as usize;
    if r <= g.k() {
        return binom(g.n(), r);
    }
    if r > g.n() {
        return BigInt::zero();
    }
    if g.k() == 2 {
        let total: u128 = (0..g.n())
            .into_par_iter()
            .map(|v0| {
                let mut cand = g.adj(v0 as Vertex).clone();
                cand.clear_below(v0 + 1);
                count_graph_in_mask(g, &cand, r - 1)
            })
            .sum();
        BigInt::from(total)
    } else {
        let mut prefix = Vec::new();
        BigInt::from(count_hyper(g, &mut prefix, 0, r))
    }
}

/// Counts `need`-cliques whose vertices all lie in `mask`.
fn count_graph_in_mask(g: &Hypergraph, mask: &BitRow, need: usize) -> u128 {
    if need == 0 {
        return 1;
    }
    if need == 1 {
        return mask.count() as u128;
    }
    let mut total = 0u128;
    for v in mask.iter_ones() {
        let mut next = mask.and(g.adj(v as Vertex));
        next.clear_below(v + 1);
        if need == 2 {
            total += next.count() as u128;
        } else if next.count() >= need - 1 {
            total += count_graph_in_mask(g, &next, need - 1);
        }
    }
    total
}

fn count_hyper(g: &Hypergraph, prefix: &mut Vec<Vertex>, from: usize, r: usize) -> u128 {
    if prefix.len() == r {
        return 1;
    }
    let mut total = 0u128;
    for v in from..g.n() {
        if g.n() - v < r - prefix.len() {
            break;
        }
        if !hyper_compatible(g, prefix, v as Vertex) {
            continue;
        }
        prefix.push(v as Vertex);
        total += count_hyper(g, prefix, v + 1, r);
        prefix.pop();
    }
    total
}

// ----------------------------------------------------------------------
// Extensions
// ----------------------------------------------------------------------

/// Extension count κ_S^(r): the number of r-cliques containing the vertex
/// set S. Zero when S is not a clique or |S| > r.
#[must_use]
pub fn extensions(g: &Hypergraph, s: &[Vertex], r: usize) -> BigInt {
    let mut s = s.to_vec();
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) {
        return BigInt::zero();
    }
    if s.len() > r || s.last().is_some_and(|&v| v as usize >= g.n()) {
        return BigInt::zero();
    }
    if !g.is_clique(&s) {
        return BigInt::zero();
    }
    let need = r - s.len();
    if need == 0 {
        return BigInt::from(1);
    }
    if g.k() == 2 {
        let mask = g.common_neighbors(&s);
        BigInt::from(count_graph_in_mask(g, &mask, need))
    } else {
        BigInt::from(count_hyper_ext(g, &s, &mut Vec::new(), 0, need))
    }
}

fn count_hyper_ext(
    g: &Hypergraph,
    base: &[Vertex],
    extra: &mut Vec<Vertex>,
    from: usize,
    need: usize,
) -> u128 {
    if extra.len() == need {
        return 1;
    }
    let mut total = 0u128;
    for v in from..g.n() {
        let v = v as Vertex;
        if base.binary_search(&v).is_ok() {
            continue;
        }
        if !ext_compatible(g, base, extra, v) {
            continue;
        }
        extra.push(v);
        total += count_hyper_ext(g, base, extra, v as usize + 1, need);
        extra.pop();
    }
    total
}

/// True iff base ∪ extra ∪ {v} remains a partial clique.
fn ext_compatible(g: &Hypergraph, base: &[Vertex], extra: &[Vertex], v: Vertex) -> bool {
    let mut all: Vec<Vertex> = base.iter().chain(extra.iter()).copied().collect();
    all.sort_unstable();
    if all.len() < g.k() - 1 {
        return true;
    }
    let mut ok = true;
    for_each_combination(&all, g.k() - 1, |t| {
        if ok {
            let mut e = t.to_vec();
            e.push(v);
            if !g.has_edge(&e) {
                ok = false;
            }
        }
    });
    ok
}

/// Enumerates extension sets: all m-sets A, disjoint from the clique `base`,
/// with base ∪ A a clique. Sets come out in lexicographic order.
#[must_use]
pub fn extension_sets(g: &Hypergraph, base: &[Vertex], m: usize) -> Vec<Vec<Vertex>> {
    let mut base = base.to_vec();
    base.sort_unstable();
    if !g.is_clique(&base) {
        return Vec::new();
    }
    let mut out = Vec::new();
    if g.k() == 2 {
        let mask = g.common_neighbors(&base);
        let emitted = AtomicUsize::new(0);
        let over = AtomicBool::new(false);
        let mut prefix = Vec::new();
        collect_graph_masked(g, &mask, &mut prefix, m, usize::MAX, &emitted, &over, &mut out);
    } else {
        collect_hyper_ext(g, &base, &mut Vec::new(), 0, m, &mut out);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn collect_graph_masked(
    g: &Hypergraph,
    mask: &BitRow,
    prefix: &mut Vec<Vertex>,
    need: usize,
    cap: usize,
    emitted: &AtomicUsize,
    over: &AtomicBool,
    out: &mut Vec<Vec<Vertex>>,
) {
    if need == 0 {
        if emitted.fetch_add(1, Ordering::Relaxed) >= cap {
            over.store(true, Ordering::Relaxed);
            return;
        }
        out.push(prefix.clone());
        return;
    }
    for v in mask.iter_ones() {
        if need == 1 {
            let mut k = prefix.clone();
            k.push(v as Vertex);
            out.push(k);
        } else {
            let mut next = mask.and(g.adj(v as Vertex));
            next.clear_below(v + 1);
            if next.count() < need - 1 {
                continue;
            }
            prefix.push(v as Vertex);
            collect_graph_masked(g, &next, prefix, need - 1, cap, emitted, over, out);
            prefix.pop();
        }
    }
}

fn collect_hyper_ext(
    g: &Hypergraph,
    base: &[Vertex],
    extra: &mut Vec<Vertex>,
    from: usize,
    need: usize,
    out: &mut Vec<Vec<Vertex>>,
) {
    if extra.len() == need {
        out.push(extra.clone());
        return;
    }
    for v in from..g.n() {
        let v = v as Vertex;
        if base.binary_search(&v).is_ok() {
            continue;
        }
        if !ext_compatible(g, base, extra, v) {
            continue;
        }
        extra.push(v);
        collect_hyper_ext(g, base, extra, v as usize + 1, need, out);
        extra.pop();
    }
}

// ----------------------------------------------------------------------
// Restricted and extension families
// ----------------------------------------------------------------------

/// The family { K ∈ K_r : |V(K) ∩ X| <= t }.
pub fn restricted_family(
    g: &Hypergraph,
    r: usize,
    x: &[Vertex],
    t: usize,
) -> Result<CliqueFamily, CliqueError> {
    let all = enumerate_cliques(g, r)?;
    let xs = BitRow::from_slice(g.n(), x);
    let members = all
        .members
        .into_iter()
        .filter(|k| k.iter().filter(|&&v| xs.test(v as usize)).count() <= t)
        .collect();
    Ok(CliqueFamily { r, members })
}

/// Host family H_e for a graph edge e: all r-sets A, disjoint from e, with
/// A ∪ V(e) a complete graph on r+2 vertices. |H_e| = κ_e^(r+2).
pub fn extension_family_he(
    g: &Hypergraph,
    e: &[Vertex],
    r: usize,
) -> Result<Vec<Vec<Vertex>>, CliqueError> {
    if g.k() != 2 {
        return Err(CliqueError::NotAGraph(g.k()));
    }
    if !g.has_edge(e) {
        return Err(CliqueError::NotAnEdge(e.to_vec()));
    }
    Ok(extension_sets(g, e, r))
}

/// Per-edge witness counts for the well-distribution test of a clique
/// family: an edge's witnesses are the r-sets A (disjoint from e, A ∪ V(e)
/// complete) all of whose r-subcliques lie in the family.
#[derive(Debug, Clone)]
pub struct WellDistributedReport {
    pub r: usize,
    /// Total r-clique count of the ambient graph (not the family size).
    pub k_r: BigInt,
    /// (edge, witness count), edges in lexicographic order.
    pub per_edge: Vec<(Edge, u64)>,
    /// True iff 2 * count >= k_r for every edge.
    pub all_pass: bool,
    /// Lexicographically first failing edge, if any.
    pub first_failing: Option<Edge>,
}

/// Checks whether `fam` is well-distributed over the edges of `g`: every
/// edge must have at least k_r/2 witness sets.
pub fn well_distributed_check(
    g: &Hypergraph,
    r: usize,
    fam: &CliqueFamily,
) -> Result<WellDistributedReport, CliqueError> {
    if g.k() != 2 {
        return Err(CliqueError::NotAGraph(g.k()));
    }
    if fam.r() != r {
        return Err(CliqueError::FamilyOrderMismatch {
            family_r: fam.r(),
            r,
        });
    }
    let k_r = count_cliques(g, r as i64);
    let set = fam.member_set();
    let mut per_edge = Vec::with_capacity(g.edge_count());
    let mut all_pass = true;
    let mut first_failing = None;
    for e in g.edges() {
        let count = count_witness_sets(g, e, r, &set);
        let pass = BigInt::from(2 * count) >= k_r;
        if !pass && first_failing.is_none() {
            first_failing = Some(e.clone());
        }
        all_pass &= pass;
        per_edge.push((e.clone(), count));
    }
    Ok(WellDistributedReport {
        r,
        k_r,
        per_edge,
        all_pass,
        first_failing,
    })
}

/// Counts A-sets witnessing an edge: A ∪ V(e) complete and every r-subset
/// in `allowed`.
pub(crate) fn count_witness_sets(
    g: &Hypergraph,
    e: &[Vertex],
    r: usize,
    allowed: &HashSet<&[Vertex]>,
) -> u64 {
    let mut count = 0;
    for a in extension_sets(g, e, r) {
        if witness_ok(e, &a, r, allowed) {
            count += 1;
        }
    }
    count
}

/// Collects the witness sets themselves (used to build averaged gadgets).
pub(crate) fn witness_sets(
    g: &Hypergraph,
    e: &[Vertex],
    r: usize,
    allowed: &HashSet<&[Vertex]>,
) -> Vec<Vec<Vertex>> {
    extension_sets(g, e, r)
        .into_iter()
        .filter(|a| witness_ok(e, a, r, allowed))
        .collect()
}

fn witness_ok(e: &[Vertex], a: &[Vertex], r: usize, allowed: &HashSet<&[Vertex]>) -> bool {
    let mut host: Vec<Vertex> = e.iter().chain(a.iter()).copied().collect();
    host.sort_unstable();
    let mut ok = true;
    for_each_combination(&host, r, |b| {
        if ok && !allowed.contains(b) {
            ok = false;
        }
    });
    ok
}
