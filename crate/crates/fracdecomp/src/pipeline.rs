//! Decomposition pipelines: staged constructions of exact fractional
//! clique decompositions with per-stage reports and verified output.
//!
//! Three drivers share one stage vocabulary (`preprocess`, `uniform`,
//! `smoothness`, `edge-correction`, `breakdown`, `vertex-gadget`,
//! `assembly`, `verify`):
//!
//! * [`decompose_hypergraph`] places uniform weight on every clique of a
//!   k-uniform host and repairs the per-edge deviation from the mean
//!   extension count with basic edge gadgets spread over all hosts of the
//!   edge. The per-edge sums are exactly 1 whenever every deviating edge
//!   has at least one gadget host.
//! * [`decompose_r2`] runs on graphs: uniform weight at the degree-slack
//!   scale, then one averaged-gadget correction per edge driven by the
//!   deviation of the edge's extension count from that scale.
//! * [`decompose_r32`] adds the full machinery: degree-guided clique
//!   removal, a split of each per-edge deviation into per-vertex and
//!   residual parts, the averaged edge correction for the residual, and
//!   vertex gadgets for the per-vertex parts. Clique orders small enough
//!   for the uniform driver are delegated to it.
//!
//! Every driver ends in [`verify`], which recomputes all per-edge sums
//! with exact rational arithmetic and returns a [`Certificate`].
//! Hypothesis checks along the way are recorded in reports and never used
//! to refuse execution; structural failures (a starved correction family,
//! a deviating edge with no gadget host, a nonpositive uniform scale)
//! surface as typed errors naming the stage and a witness.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::audits::AuditCheck;
use crate::bits::BitRow;
use crate::cliques::{
    count_cliques, enumerate_cliques, extension_family_he, extension_sets, extensions,
    witness_sets, CliqueError,
};
use crate::comb::for_each_combination;
use crate::gadgets::{
    averaged_edge_gadget, basic_edge_gadget, solve_alpha, vertex_gadget, GadgetCoefficients,
    GadgetError, Weighting,
};
use crate::hypergraph::{Edge, Hypergraph, Vertex};
use crate::rat::{ceil_sqrt, factorial, format_q, pow_q, q0, q1, qi, qr, serde_q, serde_q_opt, Q};

/// Errors raised by the decomposition drivers, each tagged with the stage
/// it surfaced in.
#[derive(Debug, Error)]
pub enum PipelineError {
    /// The host misses the degree floor required to start a strict
    /// preprocessing pass.
    #[error("preprocess: minimum degree {observed} is below the required floor {floor}")]
    DegreeBelowThreshold { observed: u64, floor: String },
    /// The uniform scale came out nonpositive, so no uniform weighting
    /// exists at this slack.
    #[error("{stage}: uniform scale nonpositive ({kappa})")]
    NonpositiveScale { stage: &'static str, kappa: String },
    /// An edge needs a correction but extends into no host clique.
    #[error("edge-correction: edge {edge:?} carries a correction share but has no gadget host")]
    NoGadgetHost { edge: Edge },
    /// After the mass filters, an edge keeps fewer host sets than half the
    /// clique count, so the averaged correction cannot be formed.
    #[error(
        "edge-correction: edge {edge:?} keeps {count} host sets after filtering, \
         fewer than half of the {needed} cliques"
    )]
    CorrectionFamilyTooSmall {
        edge: Edge,
        count: u64,
        needed: BigInt,
    },
    /// Splitting the per-edge deviation needs clique order at least 5.
    #[error("breakdown: splitting the per-edge deviation needs clique order at least 5, got {r}")]
    BreakdownOrder { r: usize },
    /// A driver was called with arguments outside its contract.
    #[error("{stage}: {message}")]
    InvalidParams { stage: &'static str, message: String },
    /// A weighting offered for verification references a set that is not
    /// a clique of the host.
    #[error("verify: weighting references {clique:?}, which is not a clique of the host")]
    InvalidClique { clique: Vec<Vertex> },
    /// A gadget construction failed inside a stage.
    #[error("{stage}: {source}")]
    Gadget {
        stage: &'static str,
        #[source]
        source: GadgetError,
    },
    /// Clique enumeration failed inside a stage.
    #[error("{stage}: {source}")]
    Clique {
        stage: &'static str,
        #[source]
        source: CliqueError,
    },
}

impl PipelineError {
    /// Name of the pipeline stage the error surfaced in.
    #[must_use]
    pub fn stage(&self) -> &'static str {
        match self {
            PipelineError::DegreeBelowThreshold { .. } => "preprocess",
            PipelineError::NonpositiveScale { stage, .. }
            | PipelineError::InvalidParams { stage, .. }
            | PipelineError::Gadget { stage, .. }
            | PipelineError::Clique { stage, .. } => stage,
            PipelineError::NoGadgetHost { .. }
            | PipelineError::CorrectionFamilyTooSmall { .. } => "edge-correction",
            PipelineError::BreakdownOrder { .. } => "breakdown",
            PipelineError::InvalidClique { .. } => "verify",
        }
    }
}

fn gadget_in(stage: &'static str) -> impl Fn(GadgetError) -> PipelineError {
    move |source| PipelineError::Gadget { stage, source }
}

fn clique_in(stage: &'static str) -> impl Fn(CliqueError) -> PipelineError {
    move |source| PipelineError::Clique { stage, source }
}

fn check_graph_inputs(stage: &'static str, g: &Hypergraph, r: usize) -> Result<(), PipelineError> {
    if g.k() != 2 {
        return Err(PipelineError::InvalidParams {
            stage,
            message: format!("host must be a graph (uniformity 2), got uniformity {}", g.k()),
        });
    }
    if r < 3 {
        return Err(PipelineError::InvalidParams {
            stage,
            message: format!("clique order must be at least 3, got {r}"),
        });
    }
    Ok(())
}

fn push_timing(timings: &mut Vec<(String, u128)>, stage: &str, start: Instant) {
    timings.push((stage.to_string(), start.elapsed().as_millis()));
}

/// Outcome of the degree-guided reduction pass.
#[derive(Clone, Debug)]
pub struct PreprocessResult {
    /// The reduced host.
    pub graph: Hypergraph,
    /// Removed cliques in removal order; their edge sets are pairwise
    /// disjoint and disjoint from the reduced host's edges.
    pub removed: Vec<Vec<Vertex>>,
    /// Vertices of the reduced host with degree at least (1-d)n + r - 1.
    pub x_set: Vec<Vertex>,
    /// Whether the input met the degree floor (1-d)n.
    pub hypothesis_met: bool,
}

/// Repeatedly removes the lexicographically least r-clique whose vertices
/// all keep degree at least (1-d)n after losing r - 1 edges, then collects
/// the high-degree vertex set of the reduced host.
///
/// Rejects hosts below the degree floor; [`decompose_r2`] and
/// [`decompose_r32`] instead record the miss and continue on the
/// unreduced host.
pub fn preprocess(
    g: &Hypergraph,
    r: usize,
    delta: &Q,
) -> Result<PreprocessResult, PipelineError> {
    check_graph_inputs("preprocess", g, r)?;
    let n = g.n();
    let floor = (q1() - delta) * qi(n as i64);
    if qi(g.min_degree() as i64) < floor {
        return Err(PipelineError::DegreeBelowThreshold {
            observed: g.min_degree(),
            floor: format_q(&floor),
        });
    }
    let mut h = g.clone();
    let mut removed: Vec<Vec<Vertex>> = Vec::new();
    loop {
        let fam = enumerate_cliques(&h, r).map_err(clique_in("preprocess"))?;
        let slack = qi((r - 1) as i64);
        let pick = fam.members().iter().find(|c| {
            c.iter()
                .all(|&v| qi(h.degree(v) as i64) - &slack >= floor)
        });
        match pick {
            Some(c) => {
                let c = c.clone();
                h = delete_clique_edges(&h, &c);
                removed.push(c);
            }
            None => break,
        }
    }
    let x_set = heavy_vertices(&h, r, &floor);
    debug_assert!(x_clique_free(&h, r, &x_set));
    debug_assert!(qi(x_set.len() as i64) <= delta * qi(((r - 1) * n) as i64));
    Ok(PreprocessResult {
        graph: h,
        removed,
        x_set,
        hypothesis_met: true,
    })
}

/// [`preprocess`], but a host below the degree floor passes through
/// unreduced with the miss recorded instead of raised.
pub(crate) fn preprocess_passthrough(
    g: &Hypergraph,
    r: usize,
    delta: &Q,
) -> Result<PreprocessResult, PipelineError> {
    match preprocess(g, r, delta) {
        Ok(res) => Ok(res),
        Err(PipelineError::DegreeBelowThreshold { .. }) => {
            let floor = (q1() - delta) * qi(g.n() as i64);
            Ok(PreprocessResult {
                graph: g.clone(),
                removed: Vec::new(),
                x_set: heavy_vertices(g, r, &floor),
                hypothesis_met: false,
            })
        }
        Err(e) => Err(e),
    }
}

fn heavy_vertices(h: &Hypergraph, r: usize, floor: &Q) -> Vec<Vertex> {
    let bar = floor + qi((r - 1) as i64);
    (0..h.n() as Vertex)
        .filter(|&v| qi(h.degree(v) as i64) >= bar)
        .collect()
}

fn delete_clique_edges(h: &Hypergraph, c: &[Vertex]) -> Hypergraph {
    let inside = |v: Vertex| c.binary_search(&v).is_ok();
    let edges: Vec<Edge> = h
        .edges()
        .iter()
        .filter(|e| !(inside(e[0]) && inside(e[1])))
        .cloned()
        .collect();
    Hypergraph::new(h.n(), 2, edges).expect("edge subset of a valid graph")
}

fn x_clique_free(h: &Hypergraph, r: usize, x_set: &[Vertex]) -> bool {
    let mut ok = true;
    for_each_combination(x_set, r, |c| {
        if ok && h.is_clique(c) {
            ok = false;
        }
    });
    ok
}

/// Uniform scale of the graph drivers: the clique count two below the
/// target order, less twice the slack-weighted count three below.
#[must_use]
pub fn graph_kappa(g: &Hypergraph, r: usize, delta: &Q) -> Q {
    let n = qi(g.n() as i64);
    qi(count_cliques(g, r as i64 - 2)) - qi(2) * delta * n * qi(count_cliques(g, r as i64 - 3))
}

/// Weight 1/kappa on every r-clique of the host. Errors when the scale is
/// nonpositive.
pub fn uniform_weighting(
    g: &Hypergraph,
    r: usize,
    kappa: &Q,
) -> Result<Weighting, PipelineError> {
    if *kappa <= q0() {
        return Err(PipelineError::NonpositiveScale {
            stage: "uniform",
            kappa: format_q(kappa),
        });
    }
    let fam = enumerate_cliques(g, r).map_err(clique_in("uniform"))?;
    let w = q1() / kappa;
    let mut out = Weighting::new(r);
    for m in fam.members() {
        out.add(m, &w);
    }
    Ok(out)
}

/// Verdicts of the three deviation budgets, with the deviations measured
/// relative to the uniform scale.
#[derive(Clone, Debug, Serialize)]
pub struct SmoothnessReport {
    /// The normalizing scale: budgets compare |pi(e)|/scale.
    #[serde(with = "serde_q")]
    pub gamma_scale: Q,
    /// Largest single-edge deviation, and where it occurs.
    #[serde(with = "serde_q")]
    pub a1_max: Q,
    pub a1_witness: Option<Edge>,
    /// Whether every edge deviation is at most 1/10^4.
    pub a1_ok: bool,
    /// Largest per-vertex deviation sum, and where it occurs.
    #[serde(with = "serde_q")]
    pub a2_max: Q,
    pub a2_witness: Option<Vertex>,
    /// Whether every vertex sum is at most n/(10^4 r).
    pub a2_ok: bool,
    /// Total deviation over all edges.
    #[serde(with = "serde_q")]
    pub a3_total: Q,
    /// Whether the total is at most n^2/(10^4 r^2).
    pub a3_ok: bool,
    /// Conjunction of the three verdicts.
    pub smooth: bool,
}

/// Measures the per-edge deviations `pi` against the three budgets at
/// scale `kappa`. Edges absent from the map count as zero.
#[must_use]
pub fn smoothness_check(
    g: &Hypergraph,
    r: usize,
    pi: &BTreeMap<Edge, Q>,
    kappa: &Q,
) -> SmoothnessReport {
    debug_assert!(*kappa > q0());
    let n = g.n();
    let mut a1_max = q0();
    let mut a1_witness = None;
    let mut per_vertex = vec![q0(); n];
    let mut a3_total = q0();
    for e in g.edges() {
        let v = pi.get(e).map(|x| x.abs() / kappa).unwrap_or_else(q0);
        if v > a1_max {
            a1_max = v.clone();
            a1_witness = Some(e.clone());
        }
        per_vertex[e[0] as usize] += &v;
        per_vertex[e[1] as usize] += &v;
        a3_total += v;
    }
    let mut a2_max = q0();
    let mut a2_witness = None;
    for (x, s) in per_vertex.iter().enumerate() {
        if *s > a2_max {
            a2_max = s.clone();
            a2_witness = Some(x as Vertex);
        }
    }
    let a1_ok = a1_max <= qr(1, 10_000);
    let a2_ok = a2_max <= qr(n as i64, (10_000 * r) as i64);
    let a3_ok = a3_total <= qr((n * n) as i64, (10_000 * r * r) as i64);
    SmoothnessReport {
        gamma_scale: kappa.clone(),
        a1_max,
        a1_witness,
        a1_ok,
        a2_max,
        a2_witness,
        a2_ok,
        a3_total,
        a3_ok,
        smooth: a1_ok && a2_ok && a3_ok,
    }
}

/// Report of one averaged edge-correction run.
#[derive(Clone, Debug, Serialize)]
pub struct CorrectionReport {
    /// Uniform scale the correction is normalized by.
    #[serde(with = "serde_q")]
    pub kappa: Q,
    /// Deviation budgets of the input.
    pub smoothness: SmoothnessReport,
    /// Whether the slack met the correction bound d <= 1/(24 r).
    pub delta_hypothesis_met: bool,
    /// Whether the host met the degree floor (1-d)n.
    pub degree_hypothesis_met: bool,
    /// Smallest per-edge host-family size after the mass filters.
    pub min_family: Option<u64>,
    /// Largest correction weight in absolute value.
    #[serde(with = "serde_q")]
    pub max_abs_weight: Q,
    /// Whether every correction weight is at most 1/(2 kappa) in absolute
    /// value, the guarantee the construction aims for.
    pub within_half_kappa: bool,
}

/// Builds a correction weighting whose per-edge sums are exactly
/// `pi(e)/kappa` on every edge. Each edge's share is averaged over its
/// filtered host family; the family must keep at least half of the
/// host's r-cliques for every edge.
pub fn smooth_correction(
    g: &Hypergraph,
    r: usize,
    delta: &Q,
    pi: &BTreeMap<Edge, Q>,
) -> Result<(Weighting, CorrectionReport), PipelineError> {
    smooth_correction_with_report(g, r, delta, pi, None)
}

pub(crate) fn smooth_correction_with_report(
    g: &Hypergraph,
    r: usize,
    delta: &Q,
    pi: &BTreeMap<Edge, Q>,
    smoothness: Option<SmoothnessReport>,
) -> Result<(Weighting, CorrectionReport), PipelineError> {
    const STAGE: &str = "edge-correction";
    check_graph_inputs(STAGE, g, r)?;
    let n = g.n();
    let kappa = graph_kappa(g, r, delta);
    if kappa <= q0() {
        return Err(PipelineError::NonpositiveScale {
            stage: STAGE,
            kappa: format_q(&kappa),
        });
    }
    let smoothness = smoothness.unwrap_or_else(|| smoothness_check(g, r, pi, &kappa));

    // Mass budgets: per-set deviation at most (72/10^4) kappa, touching
    // deviation at most (48 n / (10^4 r)) kappa.
    let t1 = &kappa * qr(9, 1250);
    let t2 = &kappa * qr(3 * n as i64, (625 * r) as i64);

    let mut abs_pi = vec![vec![q0(); n]; n];
    let mut vertex_mass = vec![q0(); n];
    for e in g.edges() {
        if let Some(v) = pi.get(e) {
            let a = v.abs();
            abs_pi[e[0] as usize][e[1] as usize] = a.clone();
            abs_pi[e[1] as usize][e[0] as usize] = a.clone();
            vertex_mass[e[0] as usize] += &a;
            vertex_mass[e[1] as usize] += &a;
        }
    }

    // Every edge must keep at least half of the r-cliques' worth of host
    // sets after filtering; fail with the first starved edge otherwise.
    let k_r = count_cliques(g, r as i64);
    let mut min_family: Option<u64> = None;
    for e in g.edges() {
        let hosts = extension_family_he(g, e, r).map_err(clique_in(STAGE))?;
        let surviving =
            count_filtered_hosts(e, &hosts, &abs_pi, &vertex_mass, &t1, &t2);
        if BigInt::from(2 * surviving) < k_r {
            return Err(PipelineError::CorrectionFamilyTooSmall {
                edge: e.clone(),
                count: surviving,
                needed: k_r,
            });
        }
        min_family = Some(min_family.map_or(surviving, |m| m.min(surviving)));
    }

    // The allowed clique family: r-cliques passing the same budgets. Every
    // filtered host set's r-subsets land in it, so the witness families
    // below contain the filtered families and are never smaller.
    let fam = enumerate_cliques(g, r).map_err(clique_in(STAGE))?;
    let allowed_members: Vec<Vec<Vertex>> = fam
        .members()
        .iter()
        .filter(|kq| clique_passes(kq, &abs_pi, &vertex_mass, &t1, &t2))
        .cloned()
        .collect();
    let allowed: HashSet<&[Vertex]> = allowed_members.iter().map(|m| m.as_slice()).collect();

    let edges = g.edges();
    let active: Vec<usize> = (0..edges.len())
        .filter(|&i| pi.get(&edges[i]).is_some_and(|v| !v.is_zero()))
        .collect();
    let results: Vec<Result<Weighting, PipelineError>> = active
        .par_iter()
        .map(|&i| {
            let hosts = witness_sets(g, &edges[i], r, &allowed);
            averaged_edge_gadget(g, &edges[i], r, &hosts).map_err(gadget_in(STAGE))
        })
        .collect();
    let mut omega = Weighting::new(r);
    for (&i, res) in active.iter().zip(results) {
        let psi = res?;
        let scale = &pi[&edges[i]] / &kappa;
        omega.add_scaled(&psi, &scale);
    }

    let max_abs_weight = omega.max_abs();
    let within_half_kappa = max_abs_weight <= q1() / (qi(2) * &kappa);
    let report = CorrectionReport {
        degree_hypothesis_met: qi(g.min_degree() as i64) >= (q1() - delta) * qi(n as i64),
        delta_hypothesis_met: delta * qi((24 * r) as i64) <= q1(),
        kappa,
        smoothness,
        min_family,
        max_abs_weight,
        within_half_kappa,
    };
    Ok((omega, report))
}

/// Whether a vertex set passes both mass budgets: deviation inside the set
/// at most `t1`, deviation touching the set at most `t2`.
fn clique_passes(
    verts: &[Vertex],
    abs_pi: &[Vec<Q>],
    vertex_mass: &[Q],
    t1: &Q,
    t2: &Q,
) -> bool {
    let mut inner = q0();
    for (i, &u) in verts.iter().enumerate() {
        for &v in &verts[i + 1..] {
            inner += &abs_pi[u as usize][v as usize];
            if inner > *t1 {
                return false;
            }
        }
    }
    let mut touching = -inner;
    for &u in verts {
        touching += &vertex_mass[u as usize];
    }
    touching <= *t2
}

fn count_filtered_hosts(
    e: &[Vertex],
    hosts: &[Vec<Vertex>],
    abs_pi: &[Vec<Q>],
    vertex_mass: &[Q],
    t1: &Q,
    t2: &Q,
) -> u64 {
    let mut count = 0;
    let mut set: Vec<Vertex> = Vec::new();
    for a in hosts {
        set.clear();
        set.extend_from_slice(a);
        set.extend_from_slice(e);
        set.sort_unstable();
        if clique_passes(&set, abs_pi, vertex_mass, t1, t2) {
            count += 1;
        }
    }
    count
}

/// The per-edge deviation split into per-vertex and residual parts, with
/// the bound audits evaluated along the way.
#[derive(Clone, Debug)]
pub struct BreakdownResult {
    /// Uniform scale of the split.
    pub kappa: Q,
    /// Per-vertex leading part, linear in the non-neighbourhood size.
    pub gamma: BTreeMap<Vertex, Q>,
    /// Per-vertex remainder, the sum of its three layers below.
    pub sigma: BTreeMap<Vertex, Q>,
    pub sigma1: BTreeMap<Vertex, Q>,
    pub sigma2: BTreeMap<Vertex, Q>,
    pub sigma3: BTreeMap<Vertex, Q>,
    /// Per-edge residual; by construction the scale plus the four vertex
    /// parts plus the residual equals the edge's extension count exactly.
    pub pi: BTreeMap<Edge, Q>,
    /// The two-sided part of the residual's size estimate.
    pub pi1: BTreeMap<Edge, Q>,
    /// The non-edge-pair part of the residual's size estimate.
    pub pi2: BTreeMap<Edge, Q>,
    /// Whether the slack, degree floor, and heavy-set bounds all held.
    pub hypothesis_met: bool,
    /// Audit of |sigma(x)| against its hypothesis-backed cap.
    pub sigma_bound: AuditCheck,
    /// Audit of |pi(e)| against its hypothesis-backed allowance.
    pub pi_bound: AuditCheck,
}

/// Splits each edge's deviation from the uniform scale into two per-vertex
/// parts and an exactly-determined residual.
///
/// The split is an identity: for every edge xy, the scale plus
/// gamma(x) + gamma(y) + sigma(x) + sigma(y) plus the residual equals the
/// edge's extension count. The audits record the size guarantees the
/// residual and the remainders satisfy when the host meets the degree and
/// slack hypotheses; they are observational and never gate execution.
pub fn breakdown(
    g: &Hypergraph,
    r: usize,
    delta: &Q,
    x_set: &[Vertex],
) -> Result<BreakdownResult, PipelineError> {
    const STAGE: &str = "breakdown";
    check_graph_inputs(STAGE, g, r)?;
    if r < 5 {
        return Err(PipelineError::BreakdownOrder { r });
    }
    let n = g.n();
    let nq = qi(n as i64);
    let dn = delta * &nq;
    let k2 = qi(count_cliques(g, r as i64 - 2));
    let k3 = qi(count_cliques(g, r as i64 - 3));
    let k4 = qi(count_cliques(g, r as i64 - 4));
    let k5 = qi(count_cliques(g, r as i64 - 5));
    let kappa = &k2 - qi(2) * &dn * &k3;

    // Non-neighbourhoods (including the vertex itself), their sizes, their
    // internal edge counts, and the summed sizes over each one.
    let comp_rows: Vec<BitRow> = (0..n)
        .map(|v| g.non_neighbors_incl_self(v as Vertex))
        .collect();
    let comp_sets: Vec<Vec<Vertex>> = comp_rows
        .iter()
        .map(|row| row.iter_ones().map(|i| i as Vertex).collect())
        .collect();
    let comp_mass: Vec<i64> = comp_sets
        .iter()
        .map(|s| s.iter().map(|&z| comp_sets[z as usize].len() as i64).sum())
        .collect();
    let inside_edges: Vec<i64> = (0..n)
        .map(|x| {
            let row = &comp_rows[x];
            let mut twice = 0i64;
            for v in row.iter_ones() {
                twice += g.adj(v as Vertex).and_count(row) as i64;
            }
            twice / 2
        })
        .collect();

    let mut gamma = BTreeMap::new();
    let mut sigma = BTreeMap::new();
    let mut sigma1 = BTreeMap::new();
    let mut sigma2 = BTreeMap::new();
    let mut sigma3 = BTreeMap::new();
    for x in 0..n {
        let comp = &comp_sets[x];
        let csize = qi(comp.len() as i64);
        let gx = (&dn - &csize) * &k3;
        // Alternating truncated inclusion-exclusion over non-neighbour
        // subsets of size 1..3, with genuine extension counts.
        let mut s1 = q0();
        for i in 1..=3usize {
            let mut total = BigInt::zero();
            for_each_combination(comp.as_slice(), i, |z| total += extensions(g, z, r - 2));
            if i % 2 == 1 {
                s1 -= qi(total);
            } else {
                s1 += qi(total);
            }
        }
        let s1x = &s1 - &gx + &dn * &k3;
        let s2x = &dn * (&csize - &dn / qi(2)) * &k4 - &dn * qi(comp_mass[x]) * &k5;
        let s3x = -(qi(inside_edges[x]) * &dn * &k5);
        let sx = &s1x + &s2x + &s3x;
        let v = x as Vertex;
        gamma.insert(v, gx);
        sigma1.insert(v, s1x);
        sigma2.insert(v, s2x);
        sigma3.insert(v, s3x);
        sigma.insert(v, sx);
    }

    let degree_ok = qi(g.min_degree() as i64) >= (q1() - delta) * &nq;
    let x_ok = qi(x_set.len() as i64) <= delta * qi((r - 1) as i64) * &nq;
    let delta_ok = pow_q(delta, 2) * qi(160_000) * qi((r * r * r) as i64) <= q1();
    let hypothesis_met = degree_ok && x_ok && delta_ok;

    let mut sigma_bound = AuditCheck::new("sigma-vertex-bound");
    sigma_bound.hypothesis_met = hypothesis_met;
    let sigma_cap = &k2 / qi((10_000 * r) as i64);
    for x in 0..n as Vertex {
        let s = &sigma[&x];
        sigma_bound.record(s.abs() <= sigma_cap, || {
            format!(
                "vertex {x}: |sigma| = {} exceeds {}",
                format_q(&s.abs()),
                format_q(&sigma_cap)
            )
        });
    }

    let mut pi = BTreeMap::new();
    let mut pi1 = BTreeMap::new();
    let mut pi2 = BTreeMap::new();
    let mut pi_bound = AuditCheck::new("pi-edge-bound");
    pi_bound.hypothesis_met = hypothesis_met;
    let slack_term = qi(203) * pow_q(&(delta * qi(r as i64)), 4) * &k2;
    for e in g.edges() {
        let (x, y) = (e[0] as usize, e[1] as usize);
        let kxy = qi(extensions(g, e, r));
        let pval = &kxy - &kappa - &gamma[&e[0]] - &gamma[&e[1]] - &sigma[&e[0]] - &sigma[&e[1]];

        let cx = qi(comp_sets[x].len() as i64);
        let cy = qi(comp_sets[y].len() as i64);
        let mut cross = 0i64;
        for &z1 in &comp_sets[x] {
            for &z2 in &comp_sets[y] {
                cross += comp_rows[z1 as usize].or_count(&comp_rows[z2 as usize]) as i64;
            }
        }
        let p1 = &dn * qi(comp_mass[x]) * &k5 + &dn * qi(comp_mass[y]) * &k5
            - qi(cross) * &k5
            + (&dn - &cx) * (&dn - &cy) * &k4;
        let p2 = (qi(inside_edges[x]) * (&cy - &dn) + qi(inside_edges[y]) * (&cx - &dn)) * &k5;

        // Allowance: the two split parts, the shared non-neighbourhood,
        // the slack quartic, and the ordered non-adjacent pair count.
        let shared = comp_rows[x].and_count(&comp_rows[y]) as i64;
        let mut nonadj_pairs = 0i64;
        for &z1 in &comp_sets[x] {
            nonadj_pairs += comp_rows[z1 as usize].and_count(&comp_rows[y]) as i64;
        }
        let allowance = p1.abs()
            + p2.abs()
            + qi(2 * shared) * &k3
            + &slack_term
            + qi(3 * nonadj_pairs) * &k4;
        pi_bound.record(pval.abs() <= allowance, || {
            format!(
                "edge [{}, {}]: |pi| = {} exceeds {}",
                e[0],
                e[1],
                format_q(&pval.abs()),
                format_q(&allowance)
            )
        });
        pi.insert(e.clone(), pval);
        pi1.insert(e.clone(), p1);
        pi2.insert(e.clone(), p2);
    }

    Ok(BreakdownResult {
        kappa,
        gamma,
        sigma,
        sigma1,
        sigma2,
        sigma3,
        pi,
        pi1,
        pi2,
        hypothesis_met,
        sigma_bound,
        pi_bound,
    })
}

/// A weighting together with the exact verification of its per-edge sums.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub weighting: Weighting,
    /// Largest |sum - 1| over the host's edges.
    #[serde(with = "serde_q")]
    pub max_edge_residual: Q,
    /// An edge attaining the largest residual, when it is nonzero.
    pub residual_witness: Option<Edge>,
    #[serde(with = "serde_q_opt")]
    pub min_weight: Option<Q>,
    #[serde(with = "serde_q_opt")]
    pub max_weight: Option<Q>,
    /// True when every residual is zero and all weights lie in [0, 1].
    pub feasible: bool,
}

/// Recomputes every per-edge sum of `omega` over the host with exact
/// arithmetic. Every weighted set must be an r-clique of the host; edges
/// the weighting misses count as residual 1.
pub fn verify(g: &Hypergraph, r: usize, omega: &Weighting) -> Result<Certificate, PipelineError> {
    if omega.r() != r {
        return Err(PipelineError::InvalidParams {
            stage: "verify",
            message: format!("weighting order {} differs from requested order {r}", omega.r()),
        });
    }
    for (clique, _) in omega.iter() {
        let valid = clique.len() == r
            && clique.windows(2).all(|w| w[0] < w[1])
            && clique.iter().all(|&v| (v as usize) < g.n())
            && g.is_clique(clique);
        if !valid {
            return Err(PipelineError::InvalidClique {
                clique: clique.clone(),
            });
        }
    }
    let sums = omega.edge_sums(g.k());
    let one = q1();
    let mut max_edge_residual = q0();
    let mut residual_witness = None;
    for e in g.edges() {
        let s = sums.get(e).cloned().unwrap_or_else(q0);
        let res = (s - &one).abs();
        if res > max_edge_residual {
            max_edge_residual = res;
            residual_witness = Some(e.clone());
        }
    }
    let min_weight = omega.iter().map(|(_, q)| q).min().cloned();
    let max_weight = omega.iter().map(|(_, q)| q).max().cloned();
    let feasible = max_edge_residual.is_zero()
        && min_weight.as_ref().is_none_or(|m| *m >= q0())
        && max_weight.as_ref().is_none_or(|m| *m <= one);
    Ok(Certificate {
        n: g.n(),
        k: g.k(),
        r,
        weighting: omega.clone(),
        max_edge_residual,
        residual_witness,
        min_weight,
        max_weight,
        feasible,
    })
}

/// Full result of one driver run: the verified certificate plus per-stage
/// reports and wall-clock stage timings in milliseconds. Timings are
/// observational and never enter the certificate.
#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub certificate: Certificate,
    /// Which construction produced the weighting.
    pub driver: &'static str,
    /// True when the driver handed the instance to a simpler one.
    pub delegated: bool,
    /// Degree-slack parameter of the run.
    pub delta: Q,
    /// Whether the host met the driver's degree hypothesis.
    pub hypothesis_met: bool,
    /// Number of cliques removed by preprocessing.
    pub removed_cliques: usize,
    /// Uniform scale of the run; zero for an edgeless host.
    pub kappa: Q,
    pub correction: Option<CorrectionReport>,
    pub sigma_bound: Option<AuditCheck>,
    pub pi_bound: Option<AuditCheck>,
    pub timings: Vec<(String, u128)>,
}

/// Degree-slack parameter of the uniform correction driver:
/// k!/(2^(k+3) k^2 r^(2k-1)).
#[must_use]
pub fn hypergraph_delta(r: usize, k: usize) -> Q {
    let num = factorial(k);
    let den = (BigInt::one() << (k + 3))
        * BigInt::from((k * k) as u64)
        * BigInt::from(r as u64).pow((2 * k - 1) as u32);
    qi(num) / qi(den)
}

/// Degree-slack parameter of the vertex-correction driver:
/// 1/(10^4 ceil(r^(3/2))).
#[must_use]
pub fn r32_delta(r: usize) -> Q {
    let c = ceil_sqrt((r as u128).pow(3));
    q1() / qi(BigInt::from(10_000u64) * BigInt::from(c))
}

/// Uniform weighting plus basic-gadget corrections on a k-uniform host.
///
/// Every r-clique gets the reciprocal of the mean per-edge extension
/// count; each edge's deviation from the mean is then spread over all of
/// its (r+k)-clique hosts with basic edge gadgets. Per-edge sums are
/// exactly 1 on every host where each deviating edge has a gadget host.
pub fn decompose_hypergraph(
    g: &Hypergraph,
    r: usize,
    k: usize,
) -> Result<PipelineOutcome, PipelineError> {
    const STAGE: &str = "uniform";
    if k != g.k() {
        return Err(PipelineError::InvalidParams {
            stage: STAGE,
            message: format!(
                "requested uniformity {k} does not match the host uniformity {}",
                g.k()
            ),
        });
    }
    if r <= k {
        return Err(PipelineError::InvalidParams {
            stage: STAGE,
            message: format!("clique order {r} must exceed the uniformity {k}"),
        });
    }
    let delta = hypergraph_delta(r, k);
    let n = g.n();
    let hypothesis_met = match g.min_j_degree(k - 1) {
        Ok(profile) => qi(profile.min_degree as i64) >= (q1() - &delta) * qi(n as i64),
        Err(_) => false,
    };

    let mut timings = Vec::new();
    let t = Instant::now();
    let m = g.edge_count();
    if m == 0 {
        let omega = Weighting::new(r);
        let certificate = verify(g, r, &omega)?;
        push_timing(&mut timings, "verify", t);
        return Ok(PipelineOutcome {
            certificate,
            driver: "uniform-correction",
            delegated: false,
            delta,
            hypothesis_met,
            removed_cliques: 0,
            kappa: q0(),
            correction: None,
            sigma_bound: None,
            pi_bound: None,
            timings,
        });
    }
    let kap_e: Vec<BigInt> = g.edges().par_iter().map(|e| extensions(g, e, r)).collect();
    let s_total: BigInt = kap_e.iter().sum();
    if s_total <= BigInt::zero() {
        return Err(PipelineError::NonpositiveScale {
            stage: STAGE,
            kappa: format_q(&(qi(s_total) / qi(m as i64))),
        });
    }
    let kbar = qi(s_total.clone()) / qi(m as i64);
    let w = q1() / &kbar;
    let u: Vec<BigInt> = kap_e
        .iter()
        .map(|ke| &s_total - ke * BigInt::from(m as u64))
        .collect();
    push_timing(&mut timings, "uniform", t);

    let t = Instant::now();
    let active: Vec<usize> = (0..m).filter(|&i| !u[i].is_zero()).collect();
    let host_counts: Vec<BigInt> = active
        .par_iter()
        .map(|&i| extensions(g, &g.edges()[i], r + k))
        .collect();
    let mut jcounts: BTreeMap<usize, BigInt> = BTreeMap::new();
    for (&i, c) in active.iter().zip(host_counts) {
        if c.is_zero() {
            return Err(PipelineError::NoGadgetHost {
                edge: g.edges()[i].clone(),
            });
        }
        jcounts.insert(i, c);
    }
    let omega = if jcounts.is_empty() {
        uniform_weighting(g, r, &kbar)?
    } else {
        let coeffs = solve_alpha(r, k).map_err(gadget_in("edge-correction"))?;
        let shares = EdgeShares {
            w: &w,
            u: &u,
            s_total: &s_total,
            jcounts: &jcounts,
        };
        match corrected_weighting_fast(g, r, k, &shares, &coeffs)? {
            Some(omega) => omega,
            None => corrected_weighting_rational(g, r, &shares, &coeffs)?,
        }
    };
    push_timing(&mut timings, "edge-correction", t);

    let t = Instant::now();
    let certificate = verify(g, r, &omega)?;
    push_timing(&mut timings, "verify", t);
    Ok(PipelineOutcome {
        certificate,
        driver: "uniform-correction",
        delegated: false,
        delta,
        hypothesis_met,
        removed_cliques: 0,
        kappa: kbar,
        correction: None,
        sigma_bound: None,
        pi_bound: None,
        timings,
    })
}

/// Shared state of the two corrected-weighting constructions: the uniform
/// weight, the per-edge deviation numerators over the common denominator,
/// and the host count of every deviating edge.
struct EdgeShares<'a> {
    w: &'a Q,
    u: &'a [BigInt],
    s_total: &'a BigInt,
    jcounts: &'a BTreeMap<usize, BigInt>,
}

const MAX_ACC_CELLS: usize = 8_000_000;

/// Integer-accumulation construction of the corrected weighting: one pass
/// over all (r+k)-cliques, accumulating each edge's integer share into the
/// colex rank of every r-subset, bucketed by host count. Returns `None`
/// when the host is too large for the dense tables or the accumulators
/// could overflow; the rational construction then takes over.
fn corrected_weighting_fast(
    g: &Hypergraph,
    r: usize,
    k: usize,
    shares: &EdgeShares,
    coeffs: &GadgetCoefficients,
) -> Result<Option<Weighting>, PipelineError> {
    const STAGE: &str = "edge-correction";
    let n = g.n();
    if n > 64 || k > 3 {
        return Ok(None);
    }
    let slots = match crate::rat::binom(n, r).to_usize() {
        Some(s) => s,
        None => return Ok(None),
    };
    let class_values: Vec<BigInt> = shares
        .jcounts
        .values()
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n_classes = class_values.len();
    if slots.checked_mul(n_classes).is_none_or(|c| c > MAX_ACC_CELLS) {
        return Ok(None);
    }

    let mut den = BigInt::one();
    for a in &coeffs.alpha {
        den = den.lcm(a.denom());
    }
    let abar: Vec<BigInt> = coeffs
        .alpha
        .iter()
        .map(|a| (a * qi(den.clone())).to_integer())
        .collect();

    // Worst-case magnitude of one accumulator cell: every host of a fixed
    // r-clique contributes once per edge pattern.
    let max_u = shares
        .u
        .iter()
        .map(num_traits::Signed::abs)
        .max()
        .unwrap_or_else(BigInt::zero);
    let max_abar = abar
        .iter()
        .map(num_traits::Signed::abs)
        .max()
        .unwrap_or_else(BigInt::zero);
    let worst = crate::rat::binom(n - r, k) * crate::rat::binom(r + k, k) * &max_u * &max_abar;
    if worst > BigInt::from(i128::MAX / 4) {
        return Ok(None);
    }
    let u_small: Vec<i128> = shares
        .u
        .iter()
        .map(|b| b.to_i128().expect("bounded by the overflow guard"))
        .collect();
    let abar_small: Vec<i128> = abar
        .iter()
        .map(|b| b.to_i128().expect("bounded by the overflow guard"))
        .collect();

    let mut class_of_edge = vec![usize::MAX; g.edge_count()];
    for (&i, v) in shares.jcounts {
        let c = class_values
            .binary_search(v)
            .expect("value drawn from the class list");
        class_of_edge[i] = c;
    }

    // Dense key table from sorted k-subsets to edge indices; every
    // k-subset of a clique is an edge, so lookups below always hit.
    let mut edge_table = vec![u32::MAX; 1usize << (6 * k)];
    for (i, e) in g.edges().iter().enumerate() {
        edge_table[dense_key(e)] = i as u32;
    }

    // Pascal table for colex ranks of sorted r-subsets.
    let mut binoms = vec![vec![0u64; r + 1]; n];
    for v in 0..n {
        binoms[v][0] = 1;
        for i in 1..=r.min(v) {
            binoms[v][i] = binoms[v - 1][i - 1] + binoms[v - 1][i];
        }
    }
    let rank = |verts: &[Vertex]| -> usize {
        let mut s = 0u64;
        for (pos, &v) in verts.iter().enumerate() {
            s += binoms[v as usize][pos + 1];
        }
        s as usize
    };

    // Index patterns of the k-subsets and r-subsets of an (r+k)-set, and
    // their pairwise intersection sizes.
    let index_set: Vec<usize> = (0..r + k).collect();
    let mut e_patterns: Vec<Vec<usize>> = Vec::new();
    for_each_combination(&index_set, k, |p| e_patterns.push(p.to_vec()));
    let mut k_patterns: Vec<Vec<usize>> = Vec::new();
    for_each_combination(&index_set, r, |p| k_patterns.push(p.to_vec()));
    let overlap: Vec<Vec<usize>> = e_patterns
        .iter()
        .map(|ep| {
            k_patterns
                .iter()
                .map(|kp| ep.iter().filter(|i| kp.contains(i)).count())
                .collect()
        })
        .collect();

    let hosts = enumerate_cliques(g, r + k).map_err(clique_in(STAGE))?;
    let mut acc: Vec<Vec<i128>> = vec![Vec::new(); n_classes];
    let mut e_ids = vec![0usize; e_patterns.len()];
    let mut k_ranks = vec![0usize; k_patterns.len()];
    for host in hosts.members() {
        for (a, ep) in e_patterns.iter().enumerate() {
            let mut key = 0usize;
            for (pos, &i) in ep.iter().enumerate() {
                key |= (host[i] as usize) << (6 * pos);
            }
            debug_assert!(edge_table[key] != u32::MAX);
            e_ids[a] = edge_table[key] as usize;
        }
        for (b, kp) in k_patterns.iter().enumerate() {
            let mut s = 0u64;
            for (pos, &i) in kp.iter().enumerate() {
                s += binoms[host[i] as usize][pos + 1];
            }
            k_ranks[b] = s as usize;
        }
        for (a, &eid) in e_ids.iter().enumerate() {
            let uval = u_small[eid];
            if uval == 0 {
                continue;
            }
            let col = &mut acc[class_of_edge[eid]];
            if col.is_empty() {
                col.resize(slots, 0);
            }
            let row = &overlap[a];
            for (b, &kr) in k_ranks.iter().enumerate() {
                col[kr] += uval * abar_small[row[b]];
            }
        }
    }

    let fam = enumerate_cliques(g, r).map_err(clique_in(STAGE))?;
    let scales: Vec<Q> = class_values
        .iter()
        .map(|v| q1() / (qi(shares.s_total.clone()) * qi(den.clone()) * qi(v.clone())))
        .collect();
    let mut omega = Weighting::new(r);
    for kq in fam.members() {
        let idx = rank(kq);
        let mut val = shares.w.clone();
        for (c, col) in acc.iter().enumerate() {
            if col.is_empty() {
                continue;
            }
            let cell = col[idx];
            if cell != 0 {
                val += qi(cell) * &scales[c];
            }
        }
        omega.add(kq, &val);
    }
    Ok(Some(omega))
}

fn dense_key(verts: &[Vertex]) -> usize {
    let mut key = 0usize;
    for (pos, &v) in verts.iter().enumerate() {
        key |= (v as usize) << (6 * pos);
    }
    key
}

/// Direct rational construction of the corrected weighting: one basic
/// edge gadget per (edge, host) pair, scaled by the edge's share per host.
fn corrected_weighting_rational(
    g: &Hypergraph,
    r: usize,
    shares: &EdgeShares,
    coeffs: &GadgetCoefficients,
) -> Result<Weighting, PipelineError> {
    const STAGE: &str = "edge-correction";
    let mut omega = Weighting::new(r);
    let fam = enumerate_cliques(g, r).map_err(clique_in(STAGE))?;
    for kq in fam.members() {
        omega.add(kq, shares.w);
    }
    for (&i, host_count) in shares.jcounts {
        let e = &g.edges()[i];
        let scale = qi(shares.u[i].clone())
            / (qi(shares.s_total.clone()) * qi(host_count.clone()));
        for a in extension_sets(g, e, r) {
            let mut host: Vec<Vertex> = e.iter().chain(a.iter()).copied().collect();
            host.sort_unstable();
            let gadget = basic_edge_gadget(g, &host, e, coeffs).map_err(gadget_in(STAGE))?;
            omega.add_scaled(&gadget, &scale);
        }
    }
    Ok(omega)
}

/// Uniform weighting at the degree-slack scale plus one averaged-gadget
/// correction per edge, on a graph host with clique order at least 4.
///
/// Preprocessing misses are recorded, not raised. Per-edge sums over the
/// reduced host are exactly 1 by construction whenever the correction
/// families survive filtering; removed cliques re-enter at weight 1, so
/// the certificate verifies against the original host.
pub fn decompose_r2(g: &Hypergraph, r: usize) -> Result<PipelineOutcome, PipelineError> {
    check_graph_inputs("preprocess", g, r)?;
    if r < 4 {
        return Err(PipelineError::InvalidParams {
            stage: "preprocess",
            message: format!("the averaged-correction driver needs clique order at least 4, got {r}"),
        });
    }
    let delta = qr(1, (100_000 * r * r) as i64);
    let mut timings = Vec::new();

    let t = Instant::now();
    let pre = preprocess_passthrough(g, r, &delta)?;
    push_timing(&mut timings, "preprocess", t);
    let h = &pre.graph;

    let t = Instant::now();
    let kappa = graph_kappa(h, r, &delta);
    if kappa <= q0() {
        return Err(PipelineError::NonpositiveScale {
            stage: "uniform",
            kappa: format_q(&kappa),
        });
    }
    let pi: BTreeMap<Edge, Q> = h
        .edges()
        .iter()
        .map(|e| (e.clone(), qi(extensions(h, e, r)) - &kappa))
        .collect();
    push_timing(&mut timings, "uniform", t);

    let t = Instant::now();
    let smoothness = smoothness_check(h, r, &pi, &kappa);
    push_timing(&mut timings, "smoothness", t);

    let t = Instant::now();
    let (correction_w, correction) =
        smooth_correction_with_report(h, r, &delta, &pi, Some(smoothness))?;
    push_timing(&mut timings, "edge-correction", t);

    let t = Instant::now();
    let mut omega = Weighting::new(r);
    let base = q1() / &kappa;
    for kq in enumerate_cliques(h, r).map_err(clique_in("assembly"))?.members() {
        omega.add(kq, &base);
    }
    let minus_one = -q1();
    omega.add_scaled(&correction_w, &minus_one);
    let one = q1();
    for c in &pre.removed {
        omega.add(c, &one);
    }
    push_timing(&mut timings, "assembly", t);

    let t = Instant::now();
    let certificate = verify(g, r, &omega)?;
    push_timing(&mut timings, "verify", t);
    Ok(PipelineOutcome {
        certificate,
        driver: "smooth-correction",
        delegated: false,
        delta,
        hypothesis_met: pre.hypothesis_met,
        removed_cliques: pre.removed.len(),
        kappa,
        correction: Some(correction),
        sigma_bound: None,
        pi_bound: None,
        timings,
    })
}

/// The full graph pipeline: preprocessing, per-edge deviation split,
/// averaged edge correction for the residuals, and vertex gadgets for the
/// per-vertex parts. Clique orders at most 24 delegate to
/// [`decompose_hypergraph`], whose slack already covers them.
pub fn decompose_r32(g: &Hypergraph, r: usize) -> Result<PipelineOutcome, PipelineError> {
    check_graph_inputs("preprocess", g, r)?;
    if r <= 24 {
        let mut out = decompose_hypergraph(g, r, 2)?;
        out.delegated = true;
        return Ok(out);
    }
    let delta = r32_delta(r);
    let mut timings = Vec::new();

    let t = Instant::now();
    let pre = preprocess_passthrough(g, r, &delta)?;
    push_timing(&mut timings, "preprocess", t);
    let h = &pre.graph;

    let t = Instant::now();
    let bd = breakdown(h, r, &delta, &pre.x_set)?;
    push_timing(&mut timings, "breakdown", t);
    if bd.kappa <= q0() {
        return Err(PipelineError::NonpositiveScale {
            stage: "uniform",
            kappa: format_q(&bd.kappa),
        });
    }

    let t = Instant::now();
    let smoothness = smoothness_check(h, r, &bd.pi, &bd.kappa);
    push_timing(&mut timings, "smoothness", t);

    let t = Instant::now();
    let (correction_w, correction) =
        smooth_correction_with_report(h, r, &delta, &bd.pi, Some(smoothness))?;
    push_timing(&mut timings, "edge-correction", t);

    let t = Instant::now();
    let corrections: BTreeMap<Vertex, Q> = (0..h.n() as Vertex)
        .filter_map(|x| {
            let c = &bd.gamma[&x] + &bd.sigma[&x];
            if c.is_zero() {
                None
            } else {
                Some((x, c))
            }
        })
        .collect();
    let vertices: Vec<Vertex> = corrections.keys().copied().collect();
    let gadget_results: Vec<_> = vertices
        .par_iter()
        .map(|&x| vertex_gadget(h, x, r, &delta, &pre.x_set))
        .collect();
    let mut xi: BTreeMap<Vertex, Weighting> = BTreeMap::new();
    for (&x, res) in vertices.iter().zip(gadget_results) {
        let (w, _report) = res.map_err(gadget_in("vertex-gadget"))?;
        xi.insert(x, w);
    }
    push_timing(&mut timings, "vertex-gadget", t);

    let t = Instant::now();
    let mut omega = assemble_vertex_corrected(h, r, &bd.kappa, &correction_w, &corrections, &xi)?;
    let one = q1();
    for c in &pre.removed {
        omega.add(c, &one);
    }
    push_timing(&mut timings, "assembly", t);

    let t = Instant::now();
    let certificate = verify(g, r, &omega)?;
    push_timing(&mut timings, "verify", t);
    Ok(PipelineOutcome {
        certificate,
        driver: "vertex-correction",
        delegated: false,
        delta,
        hypothesis_met: pre.hypothesis_met,
        removed_cliques: pre.removed.len(),
        kappa: bd.kappa.clone(),
        correction: Some(correction),
        sigma_bound: Some(bd.sigma_bound.clone()),
        pi_bound: Some(bd.pi_bound.clone()),
        timings,
    })
}

/// Final assembly of the vertex-corrected weighting: the uniform base,
/// minus the edge correction, minus each vertex's share of its gadget.
/// With the shares produced by [`breakdown`] the per-edge sums over the
/// host are exactly 1.
pub(crate) fn assemble_vertex_corrected(
    h: &Hypergraph,
    r: usize,
    kappa: &Q,
    correction_w: &Weighting,
    corrections: &BTreeMap<Vertex, Q>,
    xi: &BTreeMap<Vertex, Weighting>,
) -> Result<Weighting, PipelineError> {
    let mut omega = Weighting::new(r);
    let base = q1() / kappa;
    for kq in enumerate_cliques(h, r).map_err(clique_in("assembly"))?.members() {
        omega.add(kq, &base);
    }
    let minus_one = -q1();
    omega.add_scaled(correction_w, &minus_one);
    for (x, c) in corrections {
        let xi_x = xi.get(x).ok_or_else(|| PipelineError::InvalidParams {
            stage: "assembly",
            message: format!("missing vertex gadget for vertex {x}"),
        })?;
        let scale = -(c / kappa);
        omega.add_scaled(xi_x, &scale);
    }
    Ok(omega)
}
