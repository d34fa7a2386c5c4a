//! Exact weight-moving devices over clique families.
//!
//! An edge gadget is a signed weighting of r-cliques whose per-edge sums are
//! exactly 1 over one target edge and 0 over every other edge; a vertex
//! gadget sums to 1 over every edge at one vertex and 0 elsewhere. All
//! arithmetic is exact rational, and every construction here satisfies its
//! coverage identity with zero residual by per-host cancellation, not by
//! approximation.

use std::collections::{btree_map::Entry, BTreeMap};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cliques::{
    count_cliques, extension_sets, restricted_family, well_distributed_check, witness_sets,
    CliqueError,
};
use crate::comb::for_each_combination;
use crate::hypergraph::{intersect_count, Edge, Hypergraph, Vertex};
use crate::rat::{binom, binom_q, factorial, isqrt, q0, q1, qi, serde_q, Q};

/// Errors from gadget construction.
#[derive(Debug, Error)]
pub enum GadgetError {
    /// The designated host set does not induce a complete sub-hypergraph.
    #[error("host set {0:?} is not a clique")]
    HostNotClique(Vec<Vertex>),
    /// The target edge is not contained in the host set.
    #[error("edge {0:?} does not lie inside the host set")]
    EdgeOutsideHost(Vec<Vertex>),
    /// The target edge is missing from the graph.
    #[error("target {0:?} is not an edge of the graph")]
    NotAnEdge(Vec<Vertex>),
    /// Coefficient systems need r > k >= 2.
    #[error("coefficient system needs r > k >= 2, got r = {r}, k = {k}")]
    BadOrders { r: usize, k: usize },
    /// Orders of the supplied pieces disagree.
    #[error("order mismatch: host has {host} vertices, coefficients expect {expected}")]
    HostOrderMismatch { host: usize, expected: usize },
    /// An averaged gadget over an empty family is undefined.
    #[error("averaged gadget family for edge {0:?} is empty")]
    EmptyFamily(Vec<Vertex>),
    /// A family member is not a valid extension of the edge.
    #[error("family set {0:?} is not an r-set completing the edge to a clique")]
    BadFamilySet(Vec<Vertex>),
    /// The vertex-gadget normalizer w_x must be positive.
    #[error("vertex gadget denominator nonpositive for vertex {0}")]
    NonpositiveDenominator(Vertex),
    /// The per-vertex restricted family failed the well-distribution test.
    #[error("restricted family around vertex {x} is not well-distributed: edge {edge:?} has {count} witnesses, needs 2·count >= {needed}")]
    NotWellDistributed {
        x: Vertex,
        edge: Edge,
        count: u64,
        needed: BigInt,
    },
    /// Vertex gadgets are defined for graphs only.
    #[error("operation requires a graph, got uniformity {0}")]
    NotAGraph(usize),
    #[error(transparent)]
    Clique(#[from] CliqueError),
}

// ----------------------------------------------------------------------
// Coefficients
// ----------------------------------------------------------------------

/// Solution of the triangular intersection-pattern system: coefficients
/// α_0…α_k such that weighting the r-cliques of a complete (k+r)-vertex host
/// by α_{|V(e)∩V(K)|} adds exactly 1 over the edge e and 0 over every other
/// edge of the host.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetCoefficients {
    pub r: usize,
    pub k: usize,
    /// α_0…α_k; index is the intersection size with the target edge.
    pub alpha: Vec<Q>,
}

/// Matrix entry a_ij = binom(k−i, j−i)·binom(r−k+i, j) of the intersection
/// pattern system, for 0 ≤ i ≤ j ≤ k.
#[must_use]
pub fn pattern_coefficient(r: usize, k: usize, i: usize, j: usize) -> BigInt {
    if j < i {
        return BigInt::zero();
    }
    binom(k - i, j - i) * binom(r - k + i, j)
}

/// Solves the triangular system by exact back-substitution: the diagonal row
/// gives α_k = 1/binom(r,k), and each earlier row i < k forces
/// Σ_{j=i}^{k} a_ij·α_j = 0.
pub fn solve_alpha(r: usize, k: usize) -> Result<GadgetCoefficients, GadgetError> {
    if !(k >= 2 && r > k) {
        return Err(GadgetError::BadOrders { r, k });
    }
    let mut alpha = vec![q0(); k + 1];
    alpha[k] = q1() / qi(binom(r, k));
    for i in (0..k).rev() {
        let mut acc = q0();
        for j in (i + 1)..=k {
            acc += qi(pattern_coefficient(r, k, i, j)) * &alpha[j];
        }
        alpha[i] = -acc / qi(pattern_coefficient(r, k, i, i));
    }
    Ok(GadgetCoefficients { r, k, alpha })
}

impl GadgetCoefficients {
    /// Largest admissible magnitude for α_i: 2^{k−i}·(k−i)!/binom(r−k+i, i).
    #[must_use]
    pub fn magnitude_bound(&self, i: usize) -> Q {
        let gap = self.k - i;
        qi(BigInt::from(1u8) << gap) * qi(factorial(gap)) / binom_q(self.r - self.k + i, i)
    }
}

// ----------------------------------------------------------------------
// Weightings
// ----------------------------------------------------------------------

/// A sparse exact-rational weighting of r-cliques. Entries are keyed by the
/// sorted vertex list; a missing clique has weight zero, and exact zeros are
/// never stored, so equal weightings compare equal structurally.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "WeightingJson", try_from = "WeightingJson")]
pub struct Weighting {
    r: usize,
    entries: BTreeMap<Vec<Vertex>, Q>,
}

#[derive(Serialize, Deserialize)]
struct WeightingJson {
    r: usize,
    entries: Vec<WeightEntry>,
}

/// One serialized weighting entry: a clique and its weight in lowest terms.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightEntry {
    pub clique: Vec<Vertex>,
    #[serde(with = "serde_q")]
    pub weight: Q,
}

impl From<Weighting> for WeightingJson {
    fn from(w: Weighting) -> Self {
        WeightingJson {
            r: w.r,
            entries: w
                .entries
                .into_iter()
                .map(|(clique, weight)| WeightEntry { clique, weight })
                .collect(),
        }
    }
}

impl TryFrom<WeightingJson> for Weighting {
    type Error = String;

    fn try_from(j: WeightingJson) -> Result<Self, String> {
        let mut w = Weighting::new(j.r);
        for entry in j.entries {
            if entry.clique.len() != j.r {
                return Err(format!(
                    "entry {:?} does not have {} vertices",
                    entry.clique, j.r
                ));
            }
            w.add(&entry.clique, &entry.weight);
        }
        Ok(w)
    }
}

impl Weighting {
    /// Empty weighting of r-cliques.
    #[must_use]
    pub fn new(r: usize) -> Self {
        Weighting {
            r,
            entries: BTreeMap::new(),
        }
    }

    /// Clique order of the weighted family.
    #[inline]
    #[must_use]
    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of cliques with nonzero weight.
    #[must_use]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds `value` to the weight of a clique (vertices in any order).
    pub fn add(&mut self, clique: &[Vertex], value: &Q) {
        debug_assert_eq!(clique.len(), self.r);
        if value.is_zero() {
            return;
        }
        let mut key = clique.to_vec();
        key.sort_unstable();
        match self.entries.entry(key) {
            Entry::Occupied(mut o) => {
                let sum = o.get() + value;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
            Entry::Vacant(v) => {
                v.insert(value.clone());
            }
        }
    }

    /// Current weight of a clique (zero when absent).
    #[must_use]
    pub fn get(&self, clique: &[Vertex]) -> Q {
        let mut key = clique.to_vec();
        key.sort_unstable();
        self.entries.get(&key).cloned().unwrap_or_else(q0)
    }

    /// Iterates entries in lexicographic clique order.
    pub fn iter(&self) -> impl Iterator<Item = (&Vec<Vertex>, &Q)> {
        self.entries.iter()
    }

    /// Multiplies every weight by `c`.
    pub fn scale(&mut self, c: &Q) {
        if c.is_zero() {
            self.entries.clear();
            return;
        }
        for w in self.entries.values_mut() {
            *w *= c;
        }
    }

    /// Adds `c` times another weighting into this one.
    pub fn add_scaled(&mut self, other: &Weighting, c: &Q) {
        debug_assert_eq!(self.r, other.r);
        if c.is_zero() {
            return;
        }
        for (clique, w) in other.iter() {
            self.add(clique, &(w * c));
        }
    }

    /// Per-edge sums Σ_{K ∋ f} ω(K) over all k-subsets f of the support.
    /// Edges outside the support do not appear and sum to zero.
    #[must_use]
    pub fn edge_sums(&self, k: usize) -> BTreeMap<Edge, Q> {
        let mut sums: BTreeMap<Edge, Q> = BTreeMap::new();
        for (clique, w) in &self.entries {
            for_each_combination(clique, k, |f| {
                match sums.entry(f.to_vec()) {
                    Entry::Occupied(mut o) => *o.get_mut() += w,
                    Entry::Vacant(v) => {
                        v.insert(w.clone());
                    }
                };
            });
        }
        sums
    }

    /// Largest |weight| over the support (zero when empty).
    #[must_use]
    pub fn max_abs(&self) -> Q {
        self.entries
            .values()
            .map(num_traits::Signed::abs)
            .max()
            .unwrap_or_else(q0)
    }

    /// Smallest weight over the support (zero when empty).
    #[must_use]
    pub fn min_value(&self) -> Q {
        self.entries.values().min().cloned().unwrap_or_else(q0)
    }

    /// Largest weight over the support (zero when empty).
    #[must_use]
    pub fn max_value(&self) -> Q {
        self.entries.values().max().cloned().unwrap_or_else(q0)
    }
}

// ----------------------------------------------------------------------
// Edge gadgets
// ----------------------------------------------------------------------

/// Weights every r-subset K of the complete (k+r)-vertex host `j` by
/// α_{|V(e)∩V(K)|}. The per-edge sums over the host are exactly 1 on `e`
/// and 0 on every other k-subset of the host.
pub fn basic_edge_gadget(
    g: &Hypergraph,
    j: &[Vertex],
    e: &[Vertex],
    coeffs: &GadgetCoefficients,
) -> Result<Weighting, GadgetError> {
    if coeffs.k != g.k() {
        return Err(GadgetError::BadOrders {
            r: coeffs.r,
            k: coeffs.k,
        });
    }
    let mut host = j.to_vec();
    host.sort_unstable();
    host.dedup();
    if host.len() != coeffs.r + coeffs.k || host.len() != j.len() {
        return Err(GadgetError::HostOrderMismatch {
            host: j.len(),
            expected: coeffs.r + coeffs.k,
        });
    }
    if !g.is_clique(&host) {
        return Err(GadgetError::HostNotClique(host));
    }
    let mut target = e.to_vec();
    target.sort_unstable();
    if target.len() != g.k() || !is_sorted_subset(&target, &host) {
        return Err(GadgetError::EdgeOutsideHost(target));
    }
    let mut out = Weighting::new(coeffs.r);
    for_each_combination(&host, coeffs.r, |clique| {
        let i = intersect_count(&target, clique);
        out.add(clique, &coeffs.alpha[i]);
    });
    Ok(out)
}

fn is_sorted_subset(small: &[Vertex], big: &[Vertex]) -> bool {
    small.iter().all(|v| big.binary_search(v).is_ok())
}

/// The three averaging values for graph edge gadgets, indexed by the size of
/// the intersection with the target edge: 2/(r(r−1)), −(r−2)/(r(r−1)), and
/// (r−2)/r for sizes 2, 1, 0. These are exactly the k = 2 solution of the
/// triangular coefficient system.
fn edge_phi(r: usize) -> Result<[Q; 3], GadgetError> {
    let coeffs = solve_alpha(r, 2)?;
    Ok([
        coeffs.alpha[0].clone(),
        coeffs.alpha[1].clone(),
        coeffs.alpha[2].clone(),
    ])
}

/// Averaged edge gadget ψ_e over a family `h` of r-sets, each disjoint from
/// the edge and completing it to an (r+2)-clique: every member contributes a
/// basic-gadget pattern on its host, scaled by 1/|h|. The result adds
/// exactly 1 over `e` and 0 over every other edge of the graph, for any
/// nonempty valid family.
pub fn averaged_edge_gadget(
    g: &Hypergraph,
    e: &[Vertex],
    r: usize,
    h: &[Vec<Vertex>],
) -> Result<Weighting, GadgetError> {
    if g.k() != 2 {
        return Err(GadgetError::NotAGraph(g.k()));
    }
    let mut target = e.to_vec();
    target.sort_unstable();
    if !g.has_edge(&target) {
        return Err(GadgetError::NotAnEdge(target));
    }
    if h.is_empty() {
        return Err(GadgetError::EmptyFamily(target));
    }
    let phi = edge_phi(r)?;
    let size = qi(h.len() as i64);
    let share = [&phi[0] / &size, &phi[1] / &size, &phi[2] / &size];
    let mut out = Weighting::new(r);
    for a in h {
        if a.len() != r || a.iter().any(|v| target.contains(v)) {
            return Err(GadgetError::BadFamilySet(a.clone()));
        }
        let mut host: Vec<Vertex> = target.iter().chain(a.iter()).copied().collect();
        host.sort_unstable();
        if host.windows(2).any(|w| w[0] == w[1]) || !g.is_clique(&host) {
            return Err(GadgetError::BadFamilySet(a.clone()));
        }
        for_each_combination(&host, r, |clique| {
            let i = intersect_count(&target, clique);
            out.add(clique, &share[i]);
        });
    }
    Ok(out)
}

// ----------------------------------------------------------------------
// Vertex gadgets
// ----------------------------------------------------------------------

/// One reported correction factor τ_{x,y} = 1 − (weight the approximate
/// gadget places over the edge xy).
#[derive(Clone, Debug, Serialize)]
pub struct TauEntry {
    pub y: Vertex,
    #[serde(with = "serde_q")]
    pub value: Q,
}

/// Construction report for a vertex gadget around `x`.
#[derive(Clone, Debug, Serialize)]
pub struct VertexGadgetReport {
    pub x: Vertex,
    /// Exact normalizer w_x = k_{r−1} − (n − d(x) + δn)·k_{r−2}.
    #[serde(with = "serde_q")]
    pub w_x: Q,
    /// τ_{x,y} for every neighbour y of x, in vertex order.
    pub tau: Vec<TauEntry>,
    /// Whether every |τ_{x,y}| ≤ 1/√r (checked as r·τ² ≤ 1).
    pub tau_small: bool,
    /// Whether Σ_y |τ_{x,y}| ≤ n/r.
    pub tau_sum_small: bool,
    /// Whether every |φ_x(K)| ≤ 2n^{i+1}/(r^{i+1}·k_r), i = |V(K)∩{x}|.
    pub phi_bounded: bool,
    /// Whether every |ξ_x(K)| ≤ 80n^{i+1}/(r^{i+1}·k_r); None before the
    /// exact gadget is assembled.
    pub xi_bounded: Option<bool>,
}

impl VertexGadgetReport {
    /// τ_{x,y}, zero for vertices outside N(x).
    #[must_use]
    pub fn tau_for(&self, y: Vertex) -> Q {
        self.tau
            .iter()
            .find(|t| t.y == y)
            .map(|t| t.value.clone())
            .unwrap_or_else(q0)
    }
}

/// Builds the host family for an approximate vertex gadget: all r-sets A
/// avoiding x with A ∪ {x} a clique and |A ∩ X| ≤ √r + 1 (tested as
/// m ≤ ⌊√r⌋ + 1, the exact integer reading).
fn vertex_host_family(
    g: &Hypergraph,
    x: Vertex,
    r: usize,
    x_set: &[Vertex],
) -> Vec<Vec<Vertex>> {
    let cap = isqrt(r as u128) as usize + 1;
    extension_sets(g, &[x], r)
        .into_iter()
        .filter(|a| intersect_count(a, x_set) <= cap)
        .collect()
}

/// Approximate vertex gadget φ_x: weights α_{x,K}·ψ/w_x, where α_{x,K}
/// counts host sets through K, ψ is 1/(r−1) on cliques through x and
/// −(r−2)/(r−1) otherwise, and w_x = k_{r−1} − (n − d(x) + δn)·k_{r−2}.
/// Its per-edge sums vanish exactly over every edge not at x; the report
/// records the residuals τ_{x,y} over the edges at x and the magnitude
/// flags (which the construction does not require).
pub fn vertex_gadget_approx(
    g: &Hypergraph,
    x: Vertex,
    r: usize,
    delta: &Q,
    x_set: &[Vertex],
) -> Result<(Weighting, VertexGadgetReport), GadgetError> {
    if g.k() != 2 {
        return Err(GadgetError::NotAGraph(g.k()));
    }
    let n = g.n();
    let d = g.degree(x);
    let w_x = qi(count_cliques(g, r as i64 - 1))
        - (qi(n as i64 - d as i64) + delta * qi(n as i64)) * qi(count_cliques(g, r as i64 - 2));
    if w_x <= q0() {
        return Err(GadgetError::NonpositiveDenominator(x));
    }

    let hosts = vertex_host_family(g, x, r, x_set);
    let psi_in = q1() / qi(r as i64 - 1) / &w_x;
    let psi_out = -qi(r as i64 - 2) / qi(r as i64 - 1) / &w_x;
    let mut phi = Weighting::new(r);
    let mut with_y = vec![0u64; n];
    let mut clique = Vec::with_capacity(r);
    for a in &hosts {
        for &y in a {
            with_y[y as usize] += 1;
        }
        // r-subsets of A ∪ {x}: dropping x leaves A, dropping a ∈ A keeps x.
        phi.add(a, &psi_out);
        for drop in 0..r {
            clique.clear();
            clique.extend_from_slice(&a[..drop]);
            clique.extend_from_slice(&a[drop + 1..]);
            clique.push(x);
            phi.add(&clique, &psi_in);
        }
    }

    let mut tau = Vec::new();
    let mut tau_small = true;
    let mut tau_sum = q0();
    for y in g.adj(x).iter_ones() {
        let value = (&w_x - qi(with_y[y] as i64)) / &w_x;
        tau_small &= qi(r as i64) * &value * &value <= q1();
        tau_sum += value.abs();
        tau.push(TauEntry {
            y: y as Vertex,
            value,
        });
    }
    let tau_sum_small = &tau_sum * qi(r as i64) <= qi(n as i64);
    let phi_bounded = bound_flag(g, r, x, &phi, 2);

    let report = VertexGadgetReport {
        x,
        w_x,
        tau,
        tau_small,
        tau_sum_small,
        phi_bounded,
        xi_bounded: None,
    };
    Ok((phi, report))
}

/// Checks |ω(K)| ≤ c·n^{i+1}/(r^{i+1}·k_r) over the support, i = |V(K)∩{x}|.
fn bound_flag(g: &Hypergraph, r: usize, x: Vertex, w: &Weighting, c: i64) -> bool {
    let k_r = count_cliques(g, r as i64);
    if k_r.is_zero() {
        return w.is_empty();
    }
    let n = qi(g.n() as i64);
    let rq = qi(r as i64);
    let limit = |i: u32| qi(c) * pow(&n, i + 1) / (pow(&rq, i + 1) * qi(k_r.clone()));
    let limits = [limit(0), limit(1)];
    w.iter().all(|(clique, weight)| {
        let i = usize::from(clique.binary_search(&x).is_ok());
        weight.abs() <= limits[i]
    })
}

fn pow(base: &Q, exp: u32) -> Q {
    crate::rat::pow_q(base, exp)
}

/// Exact vertex gadget ξ_x: the approximate gadget plus, for every
/// neighbour z with τ_{x,z} ≠ 0, τ_{x,z} times an averaged edge gadget for
/// xz built over the witness family of the τ-restricted clique family A_x.
/// The per-edge sums are exactly 1 over every edge at x and 0 elsewhere.
/// A_x must pass the well-distribution test; the first failing edge is
/// reported otherwise.
pub fn vertex_gadget(
    g: &Hypergraph,
    x: Vertex,
    r: usize,
    delta: &Q,
    x_set: &[Vertex],
) -> Result<(Weighting, VertexGadgetReport), GadgetError> {
    let (phi, mut report) = vertex_gadget_approx(g, x, r, delta, x_set)?;

    // A = {K : |V(K)∩X| ≤ √r + 2}, then A_x keeps members whose τ-mass over
    // V(K)∩N(x) is at most 12.
    let base_cap = isqrt(r as u128) as usize + 2;
    let family = restricted_family(g, r, x_set, base_cap)?;
    let twelve = qi(12);
    let tau_by_vertex: BTreeMap<Vertex, Q> = report
        .tau
        .iter()
        .map(|t| (t.y, t.value.clone()))
        .collect();
    let members: Vec<Vec<Vertex>> = family
        .members()
        .iter()
        .filter(|k| {
            let mut mass = q0();
            for v in k.iter() {
                if let Some(t) = tau_by_vertex.get(v) {
                    mass += t.abs();
                }
            }
            mass <= twelve
        })
        .cloned()
        .collect();
    let restricted = crate::cliques::CliqueFamily::from_members(r, members);

    let distribution = well_distributed_check(g, r, &restricted)?;
    if !distribution.all_pass {
        let edge = distribution.first_failing.clone().unwrap_or_default();
        let count = distribution
            .per_edge
            .iter()
            .find(|(e, _)| *e == edge)
            .map(|(_, c)| *c)
            .unwrap_or(0);
        return Err(GadgetError::NotWellDistributed {
            x,
            edge,
            count,
            needed: distribution.k_r,
        });
    }

    let allowed = restricted.member_set();
    let mut xi = phi;
    for entry in &report.tau {
        if entry.value.is_zero() {
            continue;
        }
        let mut edge = vec![x, entry.y];
        edge.sort_unstable();
        let family = witness_sets(g, &edge, r, &allowed);
        let psi = averaged_edge_gadget(g, &edge, r, &family)?;
        xi.add_scaled(&psi, &entry.value);
    }
    report.xi_bounded = Some(bound_flag(g, r, x, &xi, 80));
    Ok((xi, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cliques::extension_family_he;
    use crate::rat::qr;

    fn complete(n: usize) -> Hypergraph {
        Hypergraph::complete(n, 2).unwrap()
    }

    #[test]
    fn alpha_solution_small_cases() {
        let c = solve_alpha(3, 2).unwrap();
        assert_eq!(c.alpha, vec![qr(1, 3), qr(-1, 6), qr(1, 3)]);
        let c = solve_alpha(5, 2).unwrap();
        assert_eq!(c.alpha, vec![qr(3, 5), qr(-3, 20), qr(1, 10)]);
        assert!(matches!(
            solve_alpha(3, 3),
            Err(GadgetError::BadOrders { .. })
        ));
    }

    #[test]
    fn alpha_satisfies_system_and_bounds() {
        for k in 2..=11usize {
            for r in (k + 1)..=12 {
                let c = solve_alpha(r, k).unwrap();
                assert_eq!(c.alpha[k], q1() / qi(binom(r, k)), "r={r} k={k}");
                for i in 0..k {
                    let mut acc = q0();
                    for j in i..=k {
                        acc += qi(pattern_coefficient(r, k, i, j)) * &c.alpha[j];
                    }
                    assert!(acc.is_zero(), "row {i} residual for r={r}, k={k}");
                }
                for i in 0..=k {
                    assert!(
                        c.alpha[i].abs() <= c.magnitude_bound(i),
                        "magnitude at i={i}, r={r}, k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn alpha_closed_form_one_above() {
        for k in 2..=8usize {
            let c = solve_alpha(k + 1, k).unwrap();
            for j in 0..=k {
                let sign = if (k - j) % 2 == 0 { 1 } else { -1 };
                let expect = qi(sign) / (qi(k as i64 + 1) * qi(binom(k, j)));
                assert_eq!(c.alpha[j], expect, "k={k}, j={j}");
            }
        }
    }

    #[test]
    fn basic_gadget_on_k5() {
        let g = complete(5);
        let coeffs = solve_alpha(3, 2).unwrap();
        let w = basic_edge_gadget(&g, &[0, 1, 2, 3, 4], &[0, 1], &coeffs).unwrap();
        for extra in [2u32, 3, 4] {
            assert_eq!(w.get(&[0, 1, extra]), qr(1, 3));
        }
        let sums = w.edge_sums(2);
        for (f, total) in &sums {
            let expect = if f == &vec![0, 1] { q1() } else { q0() };
            assert_eq!(*total, expect, "edge {f:?}");
        }
    }

    #[test]
    fn basic_gadget_on_triple_system() {
        let g = Hypergraph::complete(7, 3).unwrap();
        let coeffs = solve_alpha(4, 3).unwrap();
        let host: Vec<Vertex> = (0..7).collect();
        let w = basic_edge_gadget(&g, &host, &[0, 1, 2], &coeffs).unwrap();
        let sums = w.edge_sums(3);
        for (f, total) in &sums {
            let expect = if f == &vec![0, 1, 2] { q1() } else { q0() };
            assert_eq!(*total, expect, "triple {f:?}");
        }
    }

    #[test]
    fn basic_gadget_rejects_bad_hosts() {
        let mut edges = Vec::new();
        for u in 0..5u32 {
            for v in (u + 1)..5 {
                if (u, v) != (3, 4) {
                    edges.push(vec![u, v]);
                }
            }
        }
        let broken = Hypergraph::new(5, 2, edges).unwrap();
        let coeffs = solve_alpha(3, 2).unwrap();
        assert!(matches!(
            basic_edge_gadget(&broken, &[0, 1, 2, 3, 4], &[0, 1], &coeffs),
            Err(GadgetError::HostNotClique(_))
        ));
        let g = complete(6);
        assert!(matches!(
            basic_edge_gadget(&g, &[0, 1, 2, 3, 4], &[0, 5], &coeffs),
            Err(GadgetError::EdgeOutsideHost(_))
        ));
        assert!(matches!(
            basic_edge_gadget(&g, &[0, 1, 2, 3], &[0, 1], &coeffs),
            Err(GadgetError::HostOrderMismatch { .. })
        ));
    }

    #[test]
    fn averaged_gadget_on_k11() {
        let g = complete(11);
        let e = vec![0u32, 1];
        let h = extension_family_he(&g, &e, 3).unwrap();
        assert_eq!(h.len(), 84);
        let w = averaged_edge_gadget(&g, &e, 3, &h).unwrap();
        for extra in 2..11u32 {
            assert_eq!(w.get(&[0, 1, extra]), qr(1, 9));
        }
        let sums = w.edge_sums(2);
        for f in g.edges() {
            let expect = if *f == e { q1() } else { q0() };
            assert_eq!(sums.get(f).cloned().unwrap_or_else(q0), expect);
        }
    }

    #[test]
    fn averaged_singleton_matches_basic() {
        let g = complete(11);
        let e = vec![0u32, 1];
        let a = vec![2u32, 3, 4];
        let averaged = averaged_edge_gadget(&g, &e, 3, std::slice::from_ref(&a)).unwrap();
        let coeffs = solve_alpha(3, 2).unwrap();
        let basic = basic_edge_gadget(&g, &[0, 1, 2, 3, 4], &e, &coeffs).unwrap();
        assert_eq!(averaged, basic);
    }

    #[test]
    fn averaged_gadget_rejects_bad_families() {
        let g = complete(8);
        let e = vec![0u32, 1];
        assert!(matches!(
            averaged_edge_gadget(&g, &e, 3, &[]),
            Err(GadgetError::EmptyFamily(_))
        ));
        assert!(matches!(
            averaged_edge_gadget(&g, &e, 3, &[vec![1, 2, 3]]),
            Err(GadgetError::BadFamilySet(_))
        ));
        assert!(matches!(
            averaged_edge_gadget(&g, &e, 3, &[vec![2, 3]]),
            Err(GadgetError::BadFamilySet(_))
        ));
    }

    #[test]
    fn approx_gadget_cancels_off_vertex() {
        let g = complete(12);
        let delta = qr(1, 200);
        let (phi, report) = vertex_gadget_approx(&g, 0, 3, &delta, &[]).unwrap();
        let sums = phi.edge_sums(2);
        for f in g.edges() {
            let total = sums.get(f).cloned().unwrap_or_else(q0);
            if f[0] == 0 {
                assert_eq!(total, q1() - report.tau_for(f[1]), "edge {f:?}");
            } else {
                assert!(total.is_zero(), "edge {f:?} sums to {total}");
            }
        }
        // w_x = 66 − (1 + 12/200)·12 = 1332/25; each neighbour lies in
        // binom(10,2) = 45 host sets, so τ = (1332/25 − 45)/(1332/25).
        assert_eq!(report.w_x, qr(1332, 25));
        for t in &report.tau {
            assert_eq!(t.value, qr(23, 148));
        }
        assert!(report.tau_small && report.tau_sum_small);
    }

    #[test]
    fn approx_gadget_rejects_weak_degrees() {
        let g = complete(5);
        let err = vertex_gadget_approx(&g, 0, 4, &qr(1, 10), &[]);
        assert!(matches!(err, Err(GadgetError::NonpositiveDenominator(0))));
    }

    #[test]
    fn vertex_gadget_exact_identity() {
        let g = complete(12);
        let delta = qr(1, 200);
        let (xi, report) = vertex_gadget(&g, 3, 3, &delta, &[]).unwrap();
        let sums = xi.edge_sums(2);
        for f in g.edges() {
            let total = sums.get(f).cloned().unwrap_or_else(q0);
            let expect = if f.contains(&3) { q1() } else { q0() };
            assert_eq!(total, expect, "edge {f:?}");
        }
        assert_eq!(report.xi_bounded, Some(true));
    }

    #[test]
    fn vertex_gadget_reduces_to_approx_when_tau_vanishes() {
        // On K_12 with r = 3, δ = 1/16 makes w_x equal every w_{x,y} = 45,
        // so every τ is zero and the exact gadget is the approximate one.
        let g = complete(12);
        let delta = qr(1, 16);
        let (xi, report) = vertex_gadget(&g, 0, 3, &delta, &[]).unwrap();
        let (phi, _) = vertex_gadget_approx(&g, 0, 3, &delta, &[]).unwrap();
        assert!(report.tau.iter().all(|t| t.value.is_zero()));
        assert_eq!(xi, phi);
    }

    #[test]
    fn vertex_gadget_reports_starved_families() {
        // K_7 is too small for r = 3: witness counts 10 < k_3/2 = 17.5.
        let g = complete(7);
        let err = vertex_gadget(&g, 0, 3, &qr(1, 100), &[]);
        match err {
            Err(GadgetError::NotWellDistributed { edge, count, .. }) => {
                assert_eq!(edge, vec![0, 1]);
                assert_eq!(count, 10);
            }
            other => panic!("expected distribution failure, got {other:?}"),
        }
    }

    #[test]
    fn weighting_round_trip_and_scaling() {
        let mut w = Weighting::new(3);
        w.add(&[2, 0, 1], &qr(1, 3));
        w.add(&[0, 1, 2], &qr(1, 6));
        w.add(&[1, 2, 3], &qr(-1, 2));
        assert_eq!(w.get(&[0, 1, 2]), qr(1, 2));
        let json = serde_json::to_string(&w).unwrap();
        assert!(json.contains("\"1/2\""));
        let back: Weighting = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w);

        w.add(&[1, 2, 3], &qr(1, 2));
        assert_eq!(w.len(), 1, "exact zeros are dropped");
        w.scale(&qi(2));
        assert_eq!(w.get(&[0, 1, 2]), q1());
        assert_eq!(w.max_abs(), q1());
    }
}
