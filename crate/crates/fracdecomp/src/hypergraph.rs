//! k-uniform hypergraphs on vertex set 0..n-1, with exact degree and
//! neighbourhood queries and a stable text/JSON interchange format.
//!
//! A graph is the k = 2 case; graph-only call sites get dedicated adjacency
//! bitsets. Every structure is immutable after construction, so shared
//! references are safe across threads.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitRow;
use crate::comb::for_each_combination;
use crate::rat::binom;
use num_bigint::BigInt;

/// Vertex id; vertices are always 0..n-1.
pub type Vertex = u32;

/// A sorted k-tuple of distinct vertices.
pub type Edge = Vec<Vertex>;

/// Errors raised by construction, parsing, and neighbourhood queries.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("uniformity k must be at least 2, got {0}")]
    UniformityTooSmall(usize),
    #[error("edge {0:?} has arity {1}, expected {2}")]
    ArityMismatch(Edge, usize, usize),
    #[error("edge {0:?} repeats a vertex")]
    RepeatedVertex(Edge),
    #[error("edge {0:?} uses a vertex outside 0..{1}")]
    VertexOutOfRange(Edge, usize),
    #[error("duplicate edge {0:?}")]
    DuplicateEdge(Edge),
    #[error("line {0}: {1}")]
    Parse(usize, String),
    #[error("vertex set {0:?} has size {1}, expected at most {2}")]
    SubsetTooLarge(Vec<Vertex>, usize, usize),
    #[error("subset {0:?} repeats a vertex or is out of range")]
    BadSubset(Vec<Vertex>),
    #[error("degree order j={0} outside 1..={1}")]
    DegreeOrderOutOfRange(usize, usize),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Minimum j-degree together with a lexicographically least witness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub j: usize,
    pub min_degree: u64,
    pub arg_min: Vec<Vertex>,
}

#[derive(Serialize, Deserialize)]
struct HypergraphData {
    n: usize,
    k: usize,
    edges: Vec<Edge>,
}

/// k-uniform hypergraph; edges are held sorted for deterministic iteration.
#[derive(Debug, Clone)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: Vec<Edge>,
    edge_set: HashSet<Edge>,
    /// Adjacency rows, populated only when k == 2.
    adj: Vec<BitRow>,
}

impl Hypergraph {
    /// Validates and canonicalizes an edge list: each edge is sorted, edges
    /// are deduplicated (duplicates are an error) and stored in
    /// lexicographic order.
    pub fn new(
        n: usize,
        k: usize,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, GraphError> {
        if k < 2 {
            return Err(GraphError::UniformityTooSmall(k));
        }
        let mut canon: Vec<Edge> = Vec::new();
        for mut e in edges {
            if e.len() != k {
                return Err(GraphError::ArityMismatch(e.clone(), e.len(), k));
            }
            e.sort_unstable();
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(GraphError::RepeatedVertex(e));
            }
            if e.last().is_some_and(|&v| v as usize >= n) {
                return Err(GraphError::VertexOutOfRange(e, n));
            }
            canon.push(e);
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].clone()));
        }
        let edge_set: HashSet<Edge> = canon.iter().cloned().collect();
        let mut adj = Vec::new();
        if k == 2 {
            adj = vec![BitRow::zeros(n); n];
            for e in &canon {
                adj[e[0] as usize].set(e[1] as usize);
                adj[e[1] as usize].set(e[0] as usize);
            }
        }
        Ok(Hypergraph {
            n,
            k,
            edges: canon,
            edge_set,
            adj,
        })
    }

    /// Complete k-uniform hypergraph on n vertices.
    pub fn complete(n: usize, k: usize) -> Result<Self, GraphError> {
        if k < 2 {
            return Err(GraphError::UniformityTooSmall(k));
        }
        let verts: Vec<Vertex> = (0..n as u32).collect();
        let mut edges = Vec::new();
        for_each_combination(&verts, k, |e| edges.push(e.to_vec()));
        Hypergraph::new(n, k, edges)
    }

    #[inline]
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    #[must_use]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Edges in lexicographic order.
    #[inline]
    #[must_use]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    #[must_use]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Membership test; `verts` need not be sorted.
    #[must_use]
    pub fn has_edge(&self, verts: &[Vertex]) -> bool {
        if verts.len() != self.k {
            return false;
        }
        if verts.windows(2).all(|w| w[0] < w[1]) {
            return self.edge_set.contains(verts);
        }
        let mut v = verts.to_vec();
        v.sort_unstable();
        self.edge_set.contains(&v)
    }

    /// Adjacency row of `v` (graphs only).
    #[inline]
    #[must_use]
    pub fn adj(&self, v: Vertex) -> &BitRow {
        debug_assert_eq!(self.k, 2, "adjacency rows exist only for k = 2");
        &self.adj[v as usize]
    }

    /// Degree d(S) of a subset S with |S| <= k-1: the number of edges
    /// containing S.
    #[must_use]
    pub fn subset_degree(&self, s: &[Vertex]) -> u64 {
        if self.k == 2 && s.len() == 1 {
            return self.adj[s[0] as usize].count() as u64;
        }
        let mut sorted = s.to_vec();
        sorted.sort_unstable();
        self.edges
            .iter()
            .filter(|e| is_subset(&sorted, e))
            .count() as u64
    }

    /// Vertex degree d({v}).
    #[inline]
    #[must_use]
    pub fn degree(&self, v: Vertex) -> u64 {
        self.subset_degree(&[v])
    }

    /// Minimum vertex degree; 0 on an empty vertex set is taken as 0.
    #[must_use]
    pub fn min_degree(&self) -> u64 {
        (0..self.n as u32).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Neighbourhood N(S) = { T ⊆ V\S : T ∪ S ∈ E }, for |S| < k, as sorted
    /// (k-|S|)-tuples in lexicographic order.
    pub fn neighborhood(&self, s: &[Vertex]) -> Result<Vec<Vec<Vertex>>, GraphError> {
        let s = self.checked_subset(s)?;
        let mut out: Vec<Vec<Vertex>> = self
            .edges
            .iter()
            .filter(|e| is_subset(&s, e))
            .map(|e| set_minus(e, &s))
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Complement neighbourhood N^c(S) = { T ⊆ V : |T| = k-|S|, T ∪ S ∉ E },
    /// where T ranges over all (k-|S|)-subsets of the full vertex set; any T
    /// meeting S qualifies, since T ∪ S is then too small to be an edge. In
    /// particular |N(S)| + |N^c(S)| = C(n, k-|S|), which for a graph reads
    /// |N^c(x)| = n - d(x) (the set includes x itself).
    pub fn non_neighborhood(&self, s: &[Vertex]) -> Result<Vec<Vec<Vertex>>, GraphError> {
        let s = self.checked_subset(s)?;
        let m = self.k - s.len();
        let verts: Vec<Vertex> = (0..self.n as u32).collect();
        let mut out = Vec::new();
        for_each_combination(&verts, m, |t| {
            if t.iter().any(|v| s.binary_search(v).is_ok()) {
                out.push(t.to_vec());
                return;
            }
            let mut union = s.clone();
            union.extend_from_slice(t);
            union.sort_unstable();
            if !self.edge_set.contains(&union) {
                out.push(t.to_vec());
            }
        });
        Ok(out)
    }

    /// Complement-neighbour set of a vertex in a graph: { y : xy ∉ E },
    /// which includes x itself. |result| = n - d(x).
    #[must_use]
    pub fn non_neighbors_incl_self(&self, x: Vertex) -> BitRow {
        debug_assert_eq!(self.k, 2);
        self.adj[x as usize].not()
    }

    /// Minimum degree over all j-subsets, 1 <= j <= k-1, with the
    /// lexicographically least witness.
    pub fn min_j_degree(&self, j: usize) -> Result<DegreeProfile, GraphError> {
        if j == 0 || j >= self.k {
            return Err(GraphError::DegreeOrderOutOfRange(j, self.k - 1));
        }
        let mut counts: std::collections::HashMap<Vec<Vertex>, u64> =
            std::collections::HashMap::new();
        for e in &self.edges {
            for_each_combination(e, j, |s| {
                *counts.entry(s.to_vec()).or_insert(0) += 1;
            });
        }
        let verts: Vec<Vertex> = (0..self.n as u32).collect();
        let mut best: Option<(u64, Vec<Vertex>)> = None;
        for_each_combination(&verts, j, |s| {
            let d = counts.get(s).copied().unwrap_or(0);
            if best.as_ref().is_none_or(|(b, _)| d < *b) {
                best = Some((d, s.to_vec()));
            }
        });
        let (min_degree, arg_min) = best.unwrap_or((0, Vec::new()));
        Ok(DegreeProfile {
            j,
            min_degree,
            arg_min,
        })
    }

    /// True iff every k-subset of `verts` is an edge. Singletons and smaller
    /// are cliques by convention; `verts` must be duplicate-free.
    #[must_use]
    pub fn is_clique(&self, verts: &[Vertex]) -> bool {
        if verts.len() < self.k {
            return true;
        }
        if self.k == 2 {
            for (i, &u) in verts.iter().enumerate() {
                for &v in &verts[i + 1..] {
                    if !self.adj[u as usize].test(v as usize) {
                        return false;
                    }
                }
            }
            return true;
        }
        let mut ok = true;
        for_each_combination(verts, self.k, |e| {
            if ok && !self.has_edge(e) {
                ok = false;
            }
        });
        ok
    }

    /// Common neighbourhood bitset of a vertex set (graphs only): vertices
    /// adjacent to every element of `verts`. Excludes `verts` itself.
    #[must_use]
    pub fn common_neighbors(&self, verts: &[Vertex]) -> BitRow {
        debug_assert_eq!(self.k, 2);
        let mut acc = BitRow::ones(self.n);
        for &v in verts {
            acc.and_assign(&self.adj[v as usize]);
        }
        acc
    }

    /// Total count of j-subsets: C(n, j) as an unbounded integer.
    #[must_use]
    pub fn subset_total(&self, j: usize) -> BigInt {
        binom(self.n, j)
    }

    // ------------------------------------------------------------------
    // Interchange
    // ------------------------------------------------------------------

    /// Text form: header `n k`, then one edge per line, vertices
    /// space-separated, edges in lexicographic order.
    #[must_use]
    pub fn save(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n, self.k);
        for e in &self.edges {
            let mut first = true;
            for v in e {
                if !first {
                    out.push(' ');
                }
                let _ = write!(out, "{v}");
                first = false;
            }
            out.push('\n');
        }
        out
    }

    /// Parses the text form produced by [`save`]. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn load(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (lno, header) = lines
            .next()
            .ok_or_else(|| GraphError::Parse(0, "empty input".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| GraphError::Parse(lno, format!("bad header {header:?}")))?;
        let k: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| GraphError::Parse(lno, format!("bad header {header:?}")))?;
        if it.next().is_some() {
            return Err(GraphError::Parse(lno, format!("bad header {header:?}")));
        }
        let mut edges = Vec::new();
        for (lno, line) in lines {
            let mut e = Vec::new();
            for tok in line.split_whitespace() {
                let v: Vertex = tok
                    .parse()
                    .map_err(|_| GraphError::Parse(lno, format!("bad vertex {tok:?}")))?;
                e.push(v);
            }
            edges.push(e);
        }
        Hypergraph::new(n, k, edges)
    }

    /// JSON form `{"n": .., "k": .., "edges": [[..], ..]}`.
    pub fn to_json(&self) -> Result<String, GraphError> {
        Ok(serde_json::to_string_pretty(&HypergraphData {
            n: self.n,
            k: self.k,
            edges: self.edges.clone(),
        })?)
    }

    /// Parses the JSON form, with full validation.
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let data: HypergraphData = serde_json::from_str(text)?;
        Hypergraph::new(data.n, data.k, data.edges)
    }

    /// Validates a proper subset argument for neighbourhood queries and
    /// returns it sorted.
    fn checked_subset(&self, s: &[Vertex]) -> Result<Vec<Vertex>, GraphError> {
        if s.len() >= self.k {
            return Err(GraphError::SubsetTooLarge(s.to_vec(), s.len(), self.k - 1));
        }
        let mut sorted = s.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1])
            || sorted.last().is_some_and(|&v| v as usize >= self.n)
        {
            return Err(GraphError::BadSubset(s.to_vec()));
        }
        Ok(sorted)
    }
}

/// True iff sorted `small` is a subset of sorted `big`.
#[must_use]
pub fn is_subset(small: &[Vertex], big: &[Vertex]) -> bool {
    let mut bi = 0;
    'outer: for &s in small {
        while bi < big.len() {
            match big[bi].cmp(&s) {
                std::cmp::Ordering::Less => bi += 1,
                std::cmp::Ordering::Equal => {
                    bi += 1;
                    continue 'outer;
                }
                std::cmp::Ordering::Greater => return false,
            }
        }
        return false;
    }
    true
}

/// Sorted set difference `big \ small` for sorted inputs.
#[must_use]
pub fn set_minus(big: &[Vertex], small: &[Vertex]) -> Vec<Vertex> {
    big.iter()
        .filter(|v| small.binary_search(v).is_err())
        .copied()
        .collect()
}

/// Size of the intersection of two sorted vertex lists.
#[must_use]
pub fn intersect_count(a: &[Vertex], b: &[Vertex]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}
