//! Instance generators for the test corpus: complete hosts, the
//! degree-threshold family that separates feasibility, near-complete
//! random (hyper)graphs with a degree floor, and the canonical small
//! infeasible graph. All generators are pure functions of their
//! parameters; the random one is a pure function of (parameters, seed).

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::hypergraph::{Edge, GraphError, Hypergraph, Vertex};
use crate::rat::{q0, q1, qi, serde_q, Q};

/// Errors raised by the generators.
#[derive(Debug, Error)]
pub enum GenError {
    #[error("gen: {message}")]
    InvalidParams { message: String },
    #[error("gen: {0}")]
    Graph(#[from] GraphError),
}

fn invalid(message: String) -> GenError {
    GenError::InvalidParams { message }
}

/// A generator request; the seed fully determines the output.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GenSpec {
    /// Complete k-uniform host on n vertices.
    Complete { n: usize, k: usize },
    /// Degree-threshold family: r-1 classes, complete between classes,
    /// a fixed circulant inside each, scaled by s.
    LowerBound { r: usize, s: usize },
    /// Random edge deletion from the complete host, keeping every
    /// (k-1)-subset degree at or above (1-delta)n.
    RandomMinDegree {
        n: usize,
        k: usize,
        #[serde(with = "serde_q")]
        delta: Q,
        seed: u64,
    },
    /// The 4-vertex, 5-edge graph whose two triangles share an edge.
    K4MinusEdge,
}

/// Runs the generator a spec describes.
pub fn generate(spec: &GenSpec) -> Result<Hypergraph, GenError> {
    match spec {
        GenSpec::Complete { n, k } => gen_complete(*n, *k),
        GenSpec::LowerBound { r, s } => gen_lower_bound_family(*r, *s),
        GenSpec::RandomMinDegree { n, k, delta, seed } => {
            gen_random_min_degree(*n, *k, delta, *seed)
        }
        GenSpec::K4MinusEdge => Ok(gen_k4_minus_edge()),
    }
}

/// Complete k-uniform host on n vertices.
pub fn gen_complete(n: usize, k: usize) -> Result<Hypergraph, GenError> {
    if n < k {
        return Err(invalid(format!(
            "complete host needs n >= k, got n = {n}, k = {k}"
        )));
    }
    Ok(Hypergraph::complete(n, k)?)
}

/// The family showing that a fractional decomposition into r-cliques can
/// fail even at minimum degree (1 - 1/(r+1))n - 1: r-1 classes of size
/// 2s(r+1), complete between classes, a (4s-1)-regular circulant inside
/// each class. Every r-clique must use an intra-class edge, and those are
/// scarce.
pub fn gen_lower_bound_family(r: usize, s: usize) -> Result<Hypergraph, GenError> {
    if r < 3 || s < 1 {
        return Err(invalid(format!(
            "degree-threshold family needs r >= 3 and s >= 1, got r = {r}, s = {s}"
        )));
    }
    let m = 2 * s * (r + 1);
    let classes = r - 1;
    let n = classes * m;
    let class_of = |v: usize| v / m;
    let mut edges: BTreeSet<Edge> = BTreeSet::new();
    for a in 0..n {
        for b in a + 1..n {
            if class_of(a) != class_of(b) {
                edges.insert(vec![a as Vertex, b as Vertex]);
            }
        }
    }
    // (4s-1)-regular circulant inside each class: offsets 1..=(2s-1) in
    // both directions plus the antipodal offset m/2.
    let mut offsets: Vec<usize> = (1..=2 * s - 1).collect();
    offsets.push(m / 2);
    for c in 0..classes {
        let base = c * m;
        for i in 0..m {
            for &off in &offsets {
                let a = base + i;
                let b = base + (i + off) % m;
                edges.insert(vec![a.min(b) as Vertex, a.max(b) as Vertex]);
            }
        }
    }
    Ok(Hypergraph::new(n, 2, edges)?)
}

/// Deletes random edges from the complete k-uniform host, in an order
/// drawn from the seed, skipping any deletion that would push some
/// (k-1)-subset degree below (1-delta)n. A delta too small for the
/// complete host to meet the floor therefore deletes nothing.
pub fn gen_random_min_degree(
    n: usize,
    k: usize,
    delta: &Q,
    seed: u64,
) -> Result<Hypergraph, GenError> {
    if *delta <= q0() || *delta >= q1() {
        return Err(invalid(format!(
            "degree slack must satisfy 0 < delta < 1, got {delta}"
        )));
    }
    if n < k || k < 2 {
        return Err(invalid(format!(
            "random host needs n >= k >= 2, got n = {n}, k = {k}"
        )));
    }
    let complete = Hypergraph::complete(n, k)?;
    let threshold = (q1() - delta) * qi(n as i64);

    let mut degrees: BTreeMap<Vec<Vertex>, i64> = BTreeMap::new();
    let subs = |e: &Edge| -> Vec<Vec<Vertex>> {
        (0..k)
            .map(|skip| {
                e.iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect()
    };
    for e in complete.edges() {
        for s in subs(&e.clone()) {
            *degrees.entry(s).or_insert(0) += 1;
        }
    }

    let mut order: Vec<Edge> = complete.edges().to_vec();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut kept: BTreeSet<Edge> = complete.edges().iter().cloned().collect();
    for e in &order {
        let parts = subs(e);
        let deletable = parts
            .iter()
            .all(|s| qi(degrees[s] - 1) >= threshold);
        if deletable {
            kept.remove(e);
            for s in parts {
                *degrees.get_mut(&s).expect("tracked subset") -= 1;
            }
        }
    }
    Ok(Hypergraph::new(n, k, kept)?)
}

/// The canonical infeasible instance: both triangles of this graph
/// contain the edge [0, 1], which would have to carry total weight 2.
#[must_use]
pub fn gen_k4_minus_edge() -> Hypergraph {
    let edges = vec![
        vec![0u32, 1],
        vec![0, 2],
        vec![0, 3],
        vec![1, 2],
        vec![1, 3],
    ];
    Hypergraph::new(4, 2, edges).expect("fixed valid instance")
}

/// Provenance record of one generated instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: GenSpec,
    pub n: usize,
    pub k: usize,
    pub edge_count: usize,
    /// SHA-256 of the instance's canonical text serialization, hex.
    pub edge_hash: String,
}

/// Builds the manifest entry for a generated instance.
#[must_use]
pub fn manifest(spec: &GenSpec, g: &Hypergraph) -> Manifest {
    Manifest {
        spec: spec.clone(),
        n: g.n(),
        k: g.k(),
        edge_count: g.edge_count(),
        edge_hash: edge_hash(g),
    }
}

/// Hex SHA-256 of the canonical text serialization.
#[must_use]
pub fn edge_hash(g: &Hypergraph) -> String {
    let digest = Sha256::digest(g.save().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Short stable label for a spec, used in tables and CSV rows.
#[must_use]
pub fn spec_label(spec: &GenSpec) -> String {
    match spec {
        GenSpec::Complete { n, k } => format!("complete-n{n}-k{k}"),
        GenSpec::LowerBound { r, s } => format!("lower-bound-r{r}-s{s}"),
        GenSpec::RandomMinDegree { n, k, delta, seed } => {
            format!(
                "random-n{n}-k{k}-d{}-seed{seed}",
                crate::rat::format_q(delta).replace('/', "over")
            )
        }
        GenSpec::K4MinusEdge => "k4-minus-edge".to_string(),
    }
}
