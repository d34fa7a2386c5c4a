//! Independent exact feasibility decision for the fractional clique
//! decomposition system: find w >= 0 with, for every edge e, the weights
//! of the r-cliques containing e summing to exactly 1.
//!
//! The decision is a phase-one simplex in exact fraction-free integer
//! arithmetic, with an anti-cycling fallback to Bland's rule, so it
//! terminates deterministically and needs no tolerances. It returns a
//! self-verifying answer either way: a primal witness (a
//! weighting with every per-edge sum exactly 1 and all weights in [0, 1])
//! or a dual witness (a vector y over the edges with a nonpositive sum
//! over every clique's edge set but a positive total), which certifies
//! that no nonnegative solution exists.
//!
//! The solver enumerates every clique as an explicit variable, so it is
//! capped; hosts above the cap belong to the decomposition pipelines.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cliques::{enumerate_cliques, CliqueError};
use crate::comb::for_each_combination;
use crate::gadgets::Weighting;
use crate::hypergraph::{Edge, Hypergraph, Vertex};
use crate::rat::{q0, serde_q, Q};

/// Default cap on the number of clique variables.
pub const DEFAULT_LP_CAP: usize = 100_000;

/// Errors raised by the feasibility oracle.
#[derive(Debug, Error)]
pub enum OracleError {
    #[error("oracle: {message}")]
    InvalidParams { message: String },
    #[error(
        "oracle: instance has {variables} clique variables, above the cap of {cap}; \
         run the decomposition pipeline for hosts this large"
    )]
    TooLarge { variables: usize, cap: usize },
    #[error("oracle: {0}")]
    Clique(#[from] CliqueError),
    /// The solver's answer failed its own exact re-verification; this
    /// indicates a bug, never an input problem.
    #[error("oracle: internal check failed: {message}")]
    Internal { message: String },
}

/// One edge's coefficient in a dual infeasibility witness.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualEntry {
    pub edge: Edge,
    #[serde(with = "serde_q")]
    pub value: Q,
}

/// Verdict of one feasibility decision, carrying exactly one witness.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LPResult {
    pub feasible: bool,
    /// Present when feasible: per-edge sums exactly 1, weights in [0, 1].
    pub witness: Option<Weighting>,
    /// Present when infeasible: y with a nonpositive sum over every
    /// clique's edges and a positive total over all edges.
    pub dual_witness: Option<Vec<DualEntry>>,
}

impl LPResult {
    /// Re-verifies the stored witness against the host with exact
    /// arithmetic: the primal one through the certificate verifier, the
    /// dual one by checking its two defining inequalities.
    #[must_use]
    pub fn verify(&self, g: &Hypergraph, r: usize) -> bool {
        match (self.feasible, &self.witness, &self.dual_witness) {
            (true, Some(w), None) => crate::pipeline::verify(g, r, w)
                .map(|c| c.feasible)
                .unwrap_or(false),
            (false, None, Some(entries)) => {
                let mut y: BTreeMap<&[Vertex], &Q> = BTreeMap::new();
                for en in entries {
                    if !g.has_edge(&en.edge) {
                        return false;
                    }
                    if y.insert(en.edge.as_slice(), &en.value).is_some() {
                        return false;
                    }
                }
                let total = entries.iter().fold(q0(), |a, en| a + &en.value);
                if !total.is_positive() {
                    return false;
                }
                let Ok(fam) = enumerate_cliques(g, r) else {
                    return false;
                };
                for kq in fam.members() {
                    let mut s = q0();
                    for_each_combination(kq.as_slice(), g.k(), |sub| {
                        if let Some(v) = y.get(sub) {
                            s += *v;
                        }
                    });
                    if s.is_positive() {
                        return false;
                    }
                }
                true
            }
            _ => false,
        }
    }
}

/// Decides feasibility with the default variable cap.
pub fn lp_feasible(g: &Hypergraph, r: usize, k: usize) -> Result<LPResult, OracleError> {
    lp_feasible_capped(g, r, k, DEFAULT_LP_CAP)
}

/// Decides feasibility of the fractional decomposition system over the
/// host's r-cliques, with at most `cap` clique variables.
pub fn lp_feasible_capped(
    g: &Hypergraph,
    r: usize,
    k: usize,
    cap: usize,
) -> Result<LPResult, OracleError> {
    if k != g.k() {
        return Err(OracleError::InvalidParams {
            message: format!(
                "requested uniformity {k} does not match the host uniformity {}",
                g.k()
            ),
        });
    }
    if r < k {
        return Err(OracleError::InvalidParams {
            message: format!("clique order {r} is below the uniformity {k}"),
        });
    }
    let fam = enumerate_cliques(g, r)?;
    let nreal = fam.len();
    if nreal > cap {
        return Err(OracleError::TooLarge {
            variables: nreal,
            cap,
        });
    }
    let m = g.edge_count();
    let edge_index: HashMap<&[Vertex], u32> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| (e.as_slice(), i as u32))
        .collect();
    let ecols: Vec<Vec<u32>> = fam
        .members()
        .iter()
        .map(|kq| {
            let mut cols = Vec::new();
            for_each_combination(kq.as_slice(), k, |sub| {
                let idx = edge_index
                    .get(sub)
                    .copied()
                    .expect("every subset of a clique is an edge");
                cols.push(idx);
            });
            cols
        })
        .collect();

    match phase_one(m, &ecols)? {
        PhaseOne::Feasible(solution) => {
            let mut w = Weighting::new(r);
            for (col, val) in solution {
                w.add(&fam.members()[col], &val);
            }
            let cert = crate::pipeline::verify(g, r, &w).map_err(|e| OracleError::Internal {
                message: format!("primal witness rejected: {e}"),
            })?;
            if !cert.feasible {
                return Err(OracleError::Internal {
                    message: "primal witness does not certify feasibility".into(),
                });
            }
            Ok(LPResult {
                feasible: true,
                witness: Some(w),
                dual_witness: None,
            })
        }
        PhaseOne::Infeasible(y) => {
            for cols in &ecols {
                let s = cols.iter().fold(q0(), |a, &e| a + &y[e as usize]);
                if s.is_positive() {
                    return Err(OracleError::Internal {
                        message: "dual witness has a positive clique sum".into(),
                    });
                }
            }
            let total = y.iter().fold(q0(), |a, v| a + v);
            if !total.is_positive() {
                return Err(OracleError::Internal {
                    message: "dual witness has a nonpositive total".into(),
                });
            }
            let dual = g
                .edges()
                .iter()
                .zip(y)
                .map(|(e, value)| DualEntry {
                    edge: e.clone(),
                    value,
                })
                .collect();
            Ok(LPResult {
                feasible: false,
                witness: None,
                dual_witness: Some(dual),
            })
        }
    }
}

enum PhaseOne {
    /// Basic real columns and their values; per-row sums equal 1 exactly.
    Feasible(Vec<(usize, Q)>),
    /// Dual prices certifying that no nonnegative solution exists.
    Infeasible(Vec<Q>),
}

/// Phase-one simplex: minimize the sum of one artificial variable per
/// row over the system (clique columns) x = 1, x >= 0. Artificial
/// columns never re-enter. Pricing takes the most negative reduced cost
/// (smallest column index on ties, so runs are deterministic) and the
/// ratio test ties prefer flushing artificial variables; if the
/// objective stalls through a long degenerate stretch, pivoting falls
/// back permanently to Bland's rule, which cannot cycle. Zero optimum
/// yields the basic real solution, positive optimum the dual prices.
fn phase_one(m: usize, ecols: &[Vec<u32>]) -> Result<PhaseOne, OracleError> {
    let nreal = ecols.len();
    // Fraction-free tableau: t / delta is the basis inverse and xb / delta
    // the basic solution, with delta > 0 a single shared denominator. Every
    // pivot divides out the previous delta exactly (integer pivoting), so
    // the inner loops stay in integers and never normalize a fraction.
    let mut t: Vec<Vec<BigInt>> = (0..m)
        .map(|i| {
            let mut row = vec![BigInt::zero(); m];
            row[i] = BigInt::one();
            row
        })
        .collect();
    let mut xb: Vec<BigInt> = vec![BigInt::one(); m];
    let mut delta = BigInt::one();
    let mut basis: Vec<usize> = (0..m).map(|i| nreal + i).collect();
    let mut is_basic = vec![false; nreal];
    let max_iters = 50_000 + 400 * m;
    let stall_limit = 4 * m + 40;
    let mut stalled = 0usize;
    let mut bland = false;
    let mut prev_obj: Option<Q> = None;

    let extract = |basis: &[usize], xb: &[BigInt], delta: &BigInt| -> Vec<(usize, Q)> {
        (0..basis.len())
            .filter(|&i| basis[i] < nreal)
            .map(|i| (basis[i], Q::new(xb[i].clone(), delta.clone())))
            .collect()
    };

    for _ in 0..max_iters {
        // Zero artificial mass means the basic real columns already solve
        // the system exactly (artificials still in the basis sit at zero).
        let obj_num = (0..m)
            .filter(|&i| basis[i] >= nreal)
            .fold(BigInt::zero(), |a, i| a + &xb[i]);
        if obj_num.is_zero() {
            return Ok(PhaseOne::Feasible(extract(&basis, &xb, &delta)));
        }
        let obj = Q::new(obj_num, delta.clone());
        if prev_obj.as_ref().is_some_and(|p| obj >= *p) {
            stalled += 1;
            if stalled > stall_limit {
                bland = true;
            }
        } else {
            stalled = 0;
        }
        prev_obj = Some(obj);

        // Dual prices scaled by delta: the column sums of the rows whose
        // basic variable is still artificial. delta > 0 throughout, so
        // signs and comparisons are unaffected by the scaling.
        let mut y = vec![BigInt::zero(); m];
        for i in 0..m {
            if basis[i] >= nreal {
                for c in 0..m {
                    y[c] += &t[i][c];
                }
            }
        }

        // Entering column among the real columns priced below zero: the
        // most negative reduced cost, or the lowest index once pivoting
        // has fallen back to Bland's rule.
        let mut enter: Option<(usize, BigInt)> = None;
        for (j, cols) in ecols.iter().enumerate() {
            if is_basic[j] {
                continue;
            }
            let mut rc = BigInt::zero();
            for &e in cols {
                rc -= &y[e as usize];
            }
            if rc.is_negative() {
                if bland {
                    enter = Some((j, rc));
                    break;
                }
                if enter.as_ref().is_none_or(|(_, best)| rc < *best) {
                    enter = Some((j, rc));
                }
            }
        }
        let Some((j, _)) = enter else {
            let y = y.into_iter().map(|v| Q::new(v, delta.clone())).collect();
            return Ok(PhaseOne::Infeasible(y));
        };

        let d: Vec<BigInt> = (0..m)
            .map(|i| {
                ecols[j]
                    .iter()
                    .fold(BigInt::zero(), |a, &e| a + &t[i][e as usize])
            })
            .collect();

        // Ratio test over rows with d > 0, comparing xb[i] / d[i] by cross
        // multiplication. Under Bland's rule ties go to the smallest basic
        // variable index (required for the no-cycling guarantee); otherwise
        // they prefer evicting an artificial variable.
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if !d[i].is_positive() {
                continue;
            }
            let better = match leave {
                None => true,
                Some(p) => {
                    let lhs = &xb[i] * &d[p];
                    let rhs = &xb[p] * &d[i];
                    let rank = |v: usize| -> (bool, usize) {
                        if bland {
                            (false, v)
                        } else {
                            (v < nreal, v)
                        }
                    };
                    lhs < rhs || (lhs == rhs && rank(basis[i]) < rank(basis[p]))
                }
            };
            if better {
                leave = Some(i);
            }
        }
        let Some(p) = leave else {
            return Err(OracleError::Internal {
                message: "phase one reported an unbounded direction".into(),
            });
        };

        // Integer pivot: every row but p becomes (d[p] * row - d[i] * row_p)
        // / delta with the division exact, row p itself is kept unscaled,
        // and the pivot value d[p] becomes the new shared denominator.
        for i in 0..m {
            if i == p {
                continue;
            }
            for c in 0..m {
                let v = (&t[i][c] * &d[p] - &d[i] * &t[p][c]) / &delta;
                t[i][c] = v;
            }
            let v = (&xb[i] * &d[p] - &d[i] * &xb[p]) / &delta;
            xb[i] = v;
        }
        delta = d[p].clone();
        if basis[p] < nreal {
            is_basic[basis[p]] = false;
        }
        is_basic[j] = true;
        basis[p] = j;
    }
    Err(OracleError::Internal {
        message: "iteration limit exceeded".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q1, qr};

    fn complete(n: usize) -> Hypergraph {
        Hypergraph::complete(n, 2).unwrap()
    }

    fn k4_minus_edge() -> Hypergraph {
        let edges = vec![
            vec![0u32, 1],
            vec![0, 2],
            vec![0, 3],
            vec![1, 2],
            vec![1, 3],
        ];
        Hypergraph::new(4, 2, edges).unwrap()
    }

    /// Two classes of 8, complete between them, a 3-regular circulant
    /// inside each; 16 vertices, 88 edges, minimum degree 11.
    fn degree_threshold_16() -> Hypergraph {
        let mut edges: std::collections::BTreeSet<Edge> = std::collections::BTreeSet::new();
        for a in 0..8u32 {
            for b in 8..16u32 {
                edges.insert(vec![a, b]);
            }
        }
        for base in [0u32, 8] {
            for i in 0..8u32 {
                for off in [1u32, 4] {
                    let a = base + i;
                    let b = base + (i + off) % 8;
                    edges.insert(vec![a.min(b), a.max(b)]);
                }
            }
        }
        Hypergraph::new(16, 2, edges).unwrap()
    }

    #[test]
    fn feasible_on_complete_host_with_verified_witness() {
        let g = complete(6);
        let res = lp_feasible(&g, 3, 2).unwrap();
        assert!(res.feasible);
        assert!(res.verify(&g, 3));
        let w = res.witness.as_ref().unwrap();
        let cert = crate::pipeline::verify(&g, 3, w).unwrap();
        assert!(cert.feasible);
        // The uniform weighting is also a witness for this host.
        let kappa = crate::rat::qi(4);
        let uniform = crate::pipeline::uniform_weighting(&g, 3, &kappa).unwrap();
        assert!(crate::pipeline::verify(&g, 3, &uniform).unwrap().feasible);
        assert_eq!(uniform.get(&[0, 1, 2]), qr(1, 4));
    }

    #[test]
    fn infeasible_on_shared_edge_instance() {
        let g = k4_minus_edge();
        assert_eq!(crate::cliques::count_cliques(&g, 3), 2.into());
        let res = lp_feasible(&g, 3, 2).unwrap();
        assert!(!res.feasible);
        assert!(res.witness.is_none());
        assert!(res.verify(&g, 3));
        let dual = res.dual_witness.as_ref().unwrap();
        let total = dual.iter().fold(q0(), |a, en| a + &en.value);
        assert!(total.is_positive());
    }

    #[test]
    fn infeasible_on_degree_threshold_family() {
        let g = degree_threshold_16();
        assert_eq!(g.edge_count(), 88);
        assert_eq!(g.min_degree(), 11);
        assert_eq!(crate::cliques::count_cliques(&g, 3), 192.into());
        let res = lp_feasible(&g, 3, 2).unwrap();
        assert!(!res.feasible);
        assert!(res.verify(&g, 3));
    }

    #[test]
    fn feasible_on_hypergraph_and_edge_order_hosts() {
        let h = Hypergraph::complete(5, 3).unwrap();
        let res = lp_feasible(&h, 4, 3).unwrap();
        assert!(res.feasible);
        assert!(res.verify(&h, 4));

        // Clique order equal to the uniformity: each edge carries itself.
        let g = complete(5);
        let res = lp_feasible(&g, 2, 2).unwrap();
        assert!(res.feasible);
        assert_eq!(res.witness.as_ref().unwrap().get(&[0, 1]), q1());

        let empty = Hypergraph::new(4, 2, Vec::<Edge>::new()).unwrap();
        let res = lp_feasible(&empty, 3, 2).unwrap();
        assert!(res.feasible);
        assert!(res.witness.as_ref().unwrap().is_empty());
    }

    #[test]
    fn infeasible_when_an_edge_has_no_clique() {
        let mut edges: Vec<Edge> = complete(5).edges().to_vec();
        edges.push(vec![0, 5]);
        let g = Hypergraph::new(6, 2, edges).unwrap();
        let res = lp_feasible(&g, 3, 2).unwrap();
        assert!(!res.feasible);
        assert!(res.verify(&g, 3));
    }

    #[test]
    fn rejects_mismatched_parameters() {
        let g = complete(6);
        let err = lp_feasible(&g, 3, 3).unwrap_err();
        assert!(matches!(err, OracleError::InvalidParams { .. }));
        let err = lp_feasible(&g, 1, 2).unwrap_err();
        assert!(matches!(err, OracleError::InvalidParams { .. }));
    }

    #[test]
    fn rejects_oversized_instance() {
        let err = lp_feasible_capped(&complete(10), 3, 2, 10).unwrap_err();
        match &err {
            OracleError::TooLarge { variables, cap } => {
                assert_eq!(*variables, 120);
                assert_eq!(*cap, 10);
            }
            other => panic!("unexpected error: {other}"),
        }
        assert!(err.to_string().contains("pipeline"));
    }

    #[test]
    fn agrees_with_pipeline_on_feasible_hosts() {
        let g = complete(8);
        let out = crate::pipeline::decompose_hypergraph(&g, 3, 2).unwrap();
        assert!(out.certificate.feasible);
        assert!(lp_feasible(&g, 3, 2).unwrap().feasible);
    }

    #[test]
    fn results_round_trip_through_json_deterministically() {
        let g = k4_minus_edge();
        let res = lp_feasible(&g, 3, 2).unwrap();
        let js = serde_json::to_string(&res).unwrap();
        let back: LPResult = serde_json::from_str(&js).unwrap();
        assert!(back.verify(&g, 3));
        assert_eq!(js, serde_json::to_string(&back).unwrap());

        let again = lp_feasible(&g, 3, 2).unwrap();
        assert_eq!(js, serde_json::to_string(&again).unwrap());

        let g = complete(6);
        let res = lp_feasible(&g, 3, 2).unwrap();
        let js = serde_json::to_string(&res).unwrap();
        let back: LPResult = serde_json::from_str(&js).unwrap();
        assert!(back.verify(&g, 3));
    }
}
