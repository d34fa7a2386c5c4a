//! Inequality audits over the counting engine.
//!
//! Each audit evaluates a proved counting statement on a concrete instance.
//! The statements are theorems under their hypotheses, so on an instance
//! that satisfies the hypotheses a violation indicates a bug in the counting
//! code, not a property of the input. Instances that miss a hypothesis are
//! reported as skipped rather than failed.
//!
//! Inside the extension-estimate checks every clique count is a genuine
//! subgraph count at all orders (for graphs: order 2 means edges, so k_2 is
//! e(G) and per-vertex order-2 extensions are degrees). The coarse count
//! range and clique ratio checks instead use [`count_cliques`], which counts
//! binom(n, j) at orders j below the uniformity; both readings are theorems
//! in their hypothesis regimes, but the truncated extension estimates are
//! exact only under genuine counting.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::bits::BitRow;
use crate::cliques::{count_cliques, enumerate_cliques, extensions, CliqueError};
use crate::comb::for_each_combination;
use crate::hypergraph::{Hypergraph, Vertex};
use crate::rat::{binom_q, factorial, pow_q, q1, qi, qr, Q};

/// Outcome of one audited statement on one instance.
#[derive(Clone, Debug, Serialize)]
pub struct AuditCheck {
    /// Stable identifier of the audited statement.
    pub name: String,
    /// False when the instance misses a hypothesis; the check is then a skip.
    pub hypothesis_met: bool,
    /// Number of concrete inequalities evaluated.
    pub checked: u64,
    /// Number of evaluated inequalities that failed.
    pub violations: u64,
    /// Description of the first failing inequality, if any.
    pub first_witness: Option<String>,
}

impl AuditCheck {
    pub(crate) fn new(name: &str) -> Self {
        AuditCheck {
            name: name.to_string(),
            hypothesis_met: true,
            checked: 0,
            violations: 0,
            first_witness: None,
        }
    }

    pub(crate) fn skipped(name: &str) -> Self {
        let mut c = AuditCheck::new(name);
        c.hypothesis_met = false;
        c
    }

    pub(crate) fn record(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations += 1;
            if self.first_witness.is_none() {
                self.first_witness = Some(witness());
            }
        }
    }

    /// True when the hypotheses held and at least one inequality failed.
    #[must_use]
    pub fn failed(&self) -> bool {
        self.hypothesis_met && self.violations > 0
    }

    /// "pass", "skip", or "FAIL".
    #[must_use]
    pub fn status(&self) -> &'static str {
        if !self.hypothesis_met {
            "skip"
        } else if self.violations == 0 {
            "pass"
        } else {
            "FAIL"
        }
    }
}

/// Minimum codegree δ_{k−1}(G).
fn min_codegree(g: &Hypergraph) -> u64 {
    if g.k() == 2 {
        g.min_degree()
    } else {
        g.min_j_degree(g.k() - 1)
            .map(|p| p.min_degree)
            .unwrap_or(0)
    }
}

/// Observed codegree slack (n − δ_{k−1}(G)) / n as an exact rational.
#[must_use]
pub fn observed_slack(g: &Hypergraph) -> Q {
    let n = g.n() as i64;
    (qi(n) - qi(min_codegree(g) as i64)) / qi(n)
}

/// Codegree floors propagate downwards: if 0 < δ < 1 and
/// δ_{k−1}(G) ≥ (1−δ)n, then δ_ℓ(G) ≥ (1−δ)·binom(n−ℓ, k−ℓ) for every
/// ℓ ≤ k−1 (order 0 reads e(G) ≥ (1−δ)·binom(n, k)).
#[must_use]
pub fn degree_floor_audit(g: &Hypergraph, delta: &Q) -> AuditCheck {
    let name = "degree-floor";
    let n = g.n();
    let k = g.k();
    let codeg = min_codegree(g);
    let scale = q1() - delta;
    let hyp = delta > &Q::zero() && delta < &q1() && qi(codeg as i64) >= &scale * qi(n as i64);
    if !hyp {
        return AuditCheck::skipped(name);
    }
    let mut check = AuditCheck::new(name);
    for l in 0..k {
        let dl = if l == 0 {
            g.edge_count() as u64
        } else {
            match g.min_j_degree(l) {
                Ok(p) => p.min_degree,
                Err(_) => 0,
            }
        };
        let floor = &scale * binom_q(n - l, k - l);
        check.record(qi(dl as i64) >= floor, || {
            format!("order {l}: minimum degree {dl} below floor {floor}")
        });
    }
    check
}

/// Coarse clique-count bounds. Returns three checks:
///
/// * `clique-count-range`: (1 − binom(r,k)δ)·binom(n,r) ≤ k_r ≤ binom(n,r)
///   ≤ n^r/r!, under n > r > k ≥ 2, 1/n < δ < 1 and δ_{k−1}(G) ≥ (1−δ)n.
/// * `edge-extension-range`: for every edge e,
///   k_{r−k} − (2kδn^{r−k}/(r−k)!)·binom(r, k−1) ≤ κ_e^(r) ≤ k_{r−k},
///   under the same hypotheses.
/// * `clique-ratio-bound` (graphs only): n^i·k_{r−i} ≤ (2r)^i·k_r for every
///   i ∈ 1..=r, under 2r·(n − δ(G)) ≤ n.
#[must_use]
pub fn clique_count_bounds_audit(g: &Hypergraph, r: usize, delta: &Q) -> Vec<AuditCheck> {
    let n = g.n();
    let k = g.k();
    let inv_n = qr(1, n as i64);
    let range_hyp = n > r
        && r > k
        && delta > &inv_n
        && delta < &q1()
        && qi(min_codegree(g) as i64) >= (q1() - delta) * qi(n as i64);

    let mut range = if range_hyp {
        AuditCheck::new("clique-count-range")
    } else {
        AuditCheck::skipped("clique-count-range")
    };
    let mut per_edge = if range_hyp {
        AuditCheck::new("edge-extension-range")
    } else {
        AuditCheck::skipped("edge-extension-range")
    };
    if range_hyp {
        let kr = qi(count_cliques(g, r as i64));
        let hosts = binom_q(n, r);
        let lower = (q1() - binom_q(r, k) * delta) * &hosts;
        let loose = pow_q(&qi(n as i64), r as u32) / qi(factorial(r));
        range.record(lower <= kr, || {
            format!("lower bound {lower} exceeds clique count {kr}")
        });
        range.record(kr <= hosts, || {
            format!("clique count {kr} exceeds host count {hosts}")
        });
        range.record(hosts <= loose, || {
            format!("host count {hosts} exceeds n^r/r! = {loose}")
        });

        let ceiling = qi(count_cliques(g, (r - k) as i64));
        let slack =
            qi(2 * k as i64) * delta * pow_q(&qi(n as i64), (r - k) as u32) / qi(factorial(r - k))
                * binom_q(r, k - 1);
        let floor = &ceiling - &slack;
        for e in g.edges() {
            let ext = qi(extensions(g, e, r));
            let ok = floor <= ext && ext <= ceiling;
            per_edge.record(ok, || {
                format!("edge {e:?}: extension count {ext} outside [{floor}, {ceiling}]")
            });
        }
    }

    let ratio_hyp = k == 2
        && r >= 1
        && n >= 1
        && 2 * (r as u64) * (n as u64 - g.min_degree().min(n as u64)) <= n as u64;
    let mut ratio = if ratio_hyp {
        AuditCheck::new("clique-ratio-bound")
    } else {
        AuditCheck::skipped("clique-ratio-bound")
    };
    if ratio_hyp {
        let kr = count_cliques(g, r as i64);
        let big_n = BigInt::from(n);
        let two_r = BigInt::from(2 * r);
        for i in 1..=r {
            let lhs = big_n.pow(i as u32) * count_cliques(g, (r - i) as i64);
            let rhs = two_r.pow(i as u32) * &kr;
            ratio.record(lhs <= rhs, || {
                format!("order gap {i}: n^{i}·k_{} = {lhs} exceeds (2r)^{i}·k_{r} = {rhs}", r - i)
            });
        }
    }

    vec![range, per_edge, ratio]
}

/// Genuine count of j-cliques in a graph (order 2 means edges).
fn genuine_count(g: &Hypergraph, j: usize) -> BigInt {
    match j {
        0 => BigInt::from(1),
        1 => BigInt::from(g.n()),
        2 => BigInt::from(g.edge_count()),
        _ => count_cliques(g, j as i64),
    }
}

/// Union of complement neighbourhoods over the vertices of `z`.
fn complement_union(g: &Hypergraph, z: &[Vertex]) -> BitRow {
    let mut row = BitRow::zeros(g.n());
    for &v in z {
        row.or_assign(&g.non_neighbors_incl_self(v));
    }
    row
}

/// All t-cliques of a graph for 1 ≤ t ≤ 3, lexicographically.
fn t_cliques(g: &Hypergraph, t: usize) -> Result<Vec<Vec<Vertex>>, CliqueError> {
    match t {
        1 => Ok((0..g.n() as Vertex).map(|v| vec![v]).collect()),
        2 => Ok(g.edges().to_vec()),
        _ => Ok(enumerate_cliques(g, t)?.members().to_vec()),
    }
}

/// Truncated inclusion-exclusion estimates for extension counts over
/// t-cliques, with δ the observed slack (n − δ(G))/n. Returns three checks:
///
/// * `extension-first-order`: |κ_Z^(r) − k_{r−t}| ≤ 2tδr·k_{r−t};
/// * `extension-second-order`:
///   |κ_Z^(r) − k_{r−t} + |∪_{z∈Z} N^c(z)|·k_{r−t−1}| ≤ 6(tδr)²·k_{r−t};
/// * `extension-third-order`: per edge xy, the third-order alternating sum
///   over subsets of N^c(x) ∪ N^c(y) approximates κ_xy^(r) within
///   11(δr)⁴·k_{r−2} (for r ≤ 5 the truncation is exact, so the residual
///   must be zero).
///
/// Orders t ∈ {1,2,3} ∩ [1, r−1] are audited; hypotheses are k = 2 and
/// 2r·(n − δ(G)) ≤ n. All counts here are genuine subgraph counts.
pub fn extension_estimate_audit(
    g: &Hypergraph,
    r: usize,
) -> Result<Vec<AuditCheck>, CliqueError> {
    let names = [
        "extension-first-order",
        "extension-second-order",
        "extension-third-order",
    ];
    let n = g.n();
    let hyp = g.k() == 2
        && r >= 2
        && 2 * (r as u64) * (n as u64 - g.min_degree().min(n as u64)) <= n as u64;
    if !hyp {
        return Ok(names.iter().map(|s| AuditCheck::skipped(s)).collect());
    }
    let delta = observed_slack(g);
    let mut first = AuditCheck::new(names[0]);
    let mut second = AuditCheck::new(names[1]);

    for t in 1..=3.min(r - 1) {
        let main = qi(genuine_count(g, r - t));
        let lower = qi(genuine_count(g, r - t - 1));
        let scale_1 = qi(2 * (t * r) as i64) * &delta * &main;
        let tdr = qi((t * r) as i64) * &delta;
        let scale_2 = qi(6) * &tdr * &tdr * &main;
        for z in t_cliques(g, t)? {
            let ext = qi(extensions(g, &z, r));
            let err_1 = (&ext - &main).abs();
            first.record(err_1 <= scale_1, || {
                format!("t={t} clique {z:?}: |κ − k_{}| = {err_1} > {scale_1}", r - t)
            });
            let missing = complement_union(g, &z).count();
            let err_2 = (&ext - &main + qi(missing as i64) * &lower).abs();
            second.record(err_2 <= scale_2, || {
                format!("t={t} clique {z:?}: second-order residual {err_2} > {scale_2}")
            });
        }
    }

    let mut third = AuditCheck::new(names[2]);
    let main = qi(genuine_count(g, r - 2));
    let dr = qi(r as i64) * &delta;
    let scale = qi(11) * pow_q(&dr, 4) * &main;
    for e in g.edges() {
        let residual = third_order_residual(g, r, e);
        third.record(residual.abs() <= scale, || {
            format!("edge {e:?}: third-order residual {residual} exceeds {scale}")
        });
    }
    Ok(vec![first, second, third])
}

/// Residual of the third-order truncated estimate on one edge:
/// κ_e^(r) − k_{r−2} + S₁ − S₂ + S₃, where Sᵢ sums κ_Y^(r−2) over i-subsets
/// Y of N^c(x) ∪ N^c(y). Exactly zero whenever r−2 ≤ 3, since the truncation
/// then drops nothing.
pub(crate) fn third_order_residual(g: &Hypergraph, r: usize, e: &[Vertex]) -> Q {
    let union = complement_union(g, e).to_vec();
    let mut residual = qi(extensions(g, e, r)) - qi(genuine_count(g, r - 2));
    for i in 1..=3usize {
        let mut sum = BigInt::zero();
        for_each_combination(&union, i, |y| {
            if y.len() <= r - 2 {
                sum += extensions(g, y, r - 2);
            }
        });
        if i % 2 == 1 {
            residual += qi(sum);
        } else {
            residual -= qi(sum);
        }
    }
    residual
}

/// Number of r-cliques meeting `x` in at least √r vertices, together with
/// the total clique count.
pub(crate) fn spread_count(
    g: &Hypergraph,
    r: usize,
    x: &[Vertex],
) -> Result<(u64, BigInt), CliqueError> {
    let mask = BitRow::from_slice(g.n(), x);
    let family = enumerate_cliques(g, r)?;
    let mut hits = 0u64;
    for member in family.members() {
        let overlap = member.iter().filter(|v| mask.test(**v as usize)).count();
        if overlap * overlap >= r {
            hits += 1;
        }
    }
    Ok((hits, BigInt::from(family.len())))
}

/// Concentration of cliques on a small vertex set: with δ := 1/600r^{3/2},
/// if δ(G) ≥ (1−δ)n and |X| ≤ δrn, then r²·|{K : |V(K)∩X| ≥ √r}| ≤ k_r.
/// Hypotheses are evaluated in squared integer form, so √ is never taken.
pub fn spread_audit(g: &Hypergraph, r: usize, x: &[Vertex]) -> Result<AuditCheck, CliqueError> {
    let name = "spread-bound";
    let n = BigInt::from(g.n());
    let gap = BigInt::from(g.n() as u64 - g.min_degree().min(g.n() as u64));
    let sq = |v: &BigInt| v * v;
    let coeff = BigInt::from(360_000u64);
    let degree_ok = &coeff * BigInt::from(r).pow(3) * sq(&gap) <= sq(&n);
    let size_ok = &coeff * BigInt::from(r) * sq(&BigInt::from(x.len())) <= sq(&n);
    if !(g.k() == 2 && r >= 3 && degree_ok && size_ok) {
        return Ok(AuditCheck::skipped(name));
    }
    let (hits, kr) = spread_count(g, r, x)?;
    let mut check = AuditCheck::new(name);
    check.record(BigInt::from(r * r) * BigInt::from(hits) <= kr, || {
        format!("r²·{hits} exceeds clique count {kr} for |X| = {}", x.len())
    });
    Ok(check)
}

/// Runs every audit applicable to an instance, using the observed codegree
/// slack as δ (lifted just above 1/n where a strict 1/n < δ is required).
/// The spread check uses X = ∅, the only admissible choice at small n.
pub fn audit_all(g: &Hypergraph, r: usize) -> Result<Vec<AuditCheck>, CliqueError> {
    let slack = observed_slack(g);
    let n = g.n() as i64;
    let strict = qr(1, n) + qr(1, n * n);
    let range_delta = if slack > strict { slack.clone() } else { strict };

    let mut out = vec![degree_floor_audit(g, &slack)];
    out.extend(clique_count_bounds_audit(g, r, &range_delta));
    out.extend(extension_estimate_audit(g, r)?);
    out.push(spread_audit(g, r, &[])?);
    Ok(out)
}
