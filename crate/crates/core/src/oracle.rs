//! Exhaustive computation of `λ_r(m)` for small parameters.
//!
//! A maximizer of the Lagrangian among `m`-edge `r`-graphs can be taken left-compressed,
//! and left-compressed edge sets are exactly the downsets of `[n]^{(r)}` under
//! coordinatewise dominance of sorted edges. [`LeftCompressedGraphs`] enumerates those
//! downsets; [`brute_lambda`] solves every one and audits the winner.

use rayon::prelude::*;
use serde::Serialize;

use crate::binom::{binom, min_vertices_for};
use crate::bounds::principal_domain;
use crate::error::{invalid, Error, Result};
use crate::hypergraph::{build_colex, colex_unrank, Edge, Hypergraph};
use crate::io::HypergraphFile;
use crate::solver::{self, solve_lagrangian, LagrangianCertificate, SolverConfig};

pub const DEFAULT_BUDGET: u64 = 10_000_000;
/// Restarts per graph while scanning the whole search space.
pub const TRIAGE_RESTARTS: usize = 8;
/// Restarts for the final re-solve of the best candidates.
pub const FINAL_RESTARTS: usize = 64;
/// Number of triage leaders re-solved with [`FINAL_RESTARTS`].
pub const FINALISTS: usize = 10;
/// Slack used when comparing a search result with `λ(C_{r,m})`.
pub const CONJECTURE_TOL: f64 = 1e-9;
/// Slack for the boolean audit checks.
pub const AUDIT_SLACK: f64 = 1e-9;
const CHUNK: usize = 1024;

/// Every left-compressed `r`-graph with exactly `m` edges inside `[n_cap]`, each once.
///
/// Elements of `[n_cap]^{(r)}` are added in increasing colex order, and an element may
/// only be added once all its lower covers (one coordinate decreased by one) are present.
/// The colex-largest element of a downset is always maximal, so every downset has exactly
/// one such construction sequence.
pub struct LeftCompressedGraphs {
    r: u32,
    m: usize,
    elements: Vec<Edge>,
    lower_covers: Vec<Vec<usize>>,
    chosen: Vec<usize>,
    present: Vec<bool>,
    cursor: usize,
    done: bool,
}

impl LeftCompressedGraphs {
    pub fn new(r: u32, n_cap: u32, m: usize) -> Result<Self> {
        if r < 1 || m == 0 || n_cap < r {
            return Err(invalid("enumeration needs r >= 1, m >= 1 and n_cap >= r"));
        }
        let total = binom(n_cap as u64, r as u64)? as u64;
        let elements: Vec<Edge> = (1..=total)
            .map(|k| colex_unrank(r, k))
            .collect::<Result<_>>()?;
        let index_of = |e: &Edge| crate::hypergraph::colex_rank(e) as usize - 1;
        let lower_covers = elements
            .iter()
            .map(|e| {
                let v = e.vertices();
                (0..v.len())
                    .filter(|&p| v[p] > 1 && (p == 0 || v[p] - 1 > v[p - 1]))
                    .map(|p| {
                        let mut w = v.to_vec();
                        w[p] -= 1;
                        index_of(&Edge::new(w).expect("still increasing"))
                    })
                    .collect()
            })
            .collect();
        let count = elements.len();
        Ok(LeftCompressedGraphs {
            r,
            m,
            elements,
            lower_covers,
            chosen: Vec::with_capacity(m),
            present: vec![false; count],
            cursor: 0,
            done: m > count,
        })
    }

    fn current(&self) -> Hypergraph {
        let edges: Vec<Edge> = self.chosen.iter().map(|&k| self.elements[k].clone()).collect();
        let n = edges.iter().filter_map(Edge::max_vertex).max().unwrap_or(0);
        Hypergraph::new(self.r, n, edges).expect("distinct elements of [n_cap]^(r)")
    }

    fn backtrack(&mut self) -> bool {
        match self.chosen.pop() {
            Some(k) => {
                self.present[k] = false;
                self.cursor = k + 1;
                true
            }
            None => false,
        }
    }
}

impl Iterator for LeftCompressedGraphs {
    type Item = Hypergraph;

    fn next(&mut self) -> Option<Hypergraph> {
        let total = self.elements.len();
        loop {
            if self.done {
                return None;
            }
            if self.chosen.len() == self.m {
                let g = self.current();
                if !self.backtrack() {
                    self.done = true;
                }
                return Some(g);
            }
            let need = self.m - self.chosen.len();
            let next = (self.cursor..total)
                .take_while(|&c| total - c >= need)
                .find(|&c| self.lower_covers[c].iter().all(|&l| self.present[l]));
            match next {
                Some(c) => {
                    self.chosen.push(c);
                    self.present[c] = true;
                    self.cursor = c + 1;
                }
                None => {
                    if !self.backtrack() {
                        self.done = true;
                    }
                }
            }
        }
    }
}

pub fn enumerate_left_compressed(r: u32, n_cap: u32, m: usize) -> Result<LeftCompressedGraphs> {
    LeftCompressedGraphs::new(r, n_cap, m)
}

/// Smallest `t` with `C(t, r) >= m`, plus 2.
pub fn default_n_cap(r: u32, m: u64) -> Result<u32> {
    Ok(min_vertices_for(r, m)? + 2)
}

/// Structural checks on an extremal certificate. `None` means not applicable
/// (the cell lies outside every principal-domain interval).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    /// The optimal weighting is non-increasing in the vertex labels.
    pub x_sorted_ok: bool,
    /// `x_1 < 1/(t - r + 1)`.
    pub x1_bound_ok: Option<bool>,
    /// `x_{t-k} > (k - r + 2)/(k + 1) x_1` for `k = 1..t-1`.
    pub xk_bounds_ok: Option<bool>,
    /// Every pair of support vertices lies in an edge.
    pub covers_pairs: bool,
    /// Largest `|(x_i - x_j) w(G_{i,j}) - w(G_{i\j})|` over support pairs.
    pub lemma2iii_max_violation: f64,
    pub support_equals_t: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRecord {
    pub r: u32,
    pub m: u64,
    pub n_cap: u32,
    pub t: Option<u32>,
    /// Best Lagrangian found; exact maximum when `exhaustive`, else a lower bound.
    pub lambda_r: f64,
    pub colex_lambda: f64,
    pub witness: Hypergraph,
    pub certificate: LagrangianCertificate,
    pub predicted: Option<f64>,
    pub conjecture_ok: bool,
    pub audit: AuditReport,
    pub exhaustive: bool,
    pub graphs_examined: u64,
}

// Non-exhaustive records carry `lambda_lower` in place of `lambda_r`.
impl Serialize for SweepRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(None)?;
        map.serialize_entry("r", &self.r)?;
        map.serialize_entry("m", &self.m)?;
        map.serialize_entry("n_cap", &self.n_cap)?;
        map.serialize_entry("t", &self.t)?;
        let key = if self.exhaustive { "lambda_r" } else { "lambda_lower" };
        map.serialize_entry(key, &self.lambda_r)?;
        map.serialize_entry("colex_lambda", &self.colex_lambda)?;
        map.serialize_entry("witness", &HypergraphFile::<()>::new(&self.witness, None))?;
        map.serialize_entry("certificate", &self.certificate)?;
        map.serialize_entry("predicted", &self.predicted)?;
        map.serialize_entry("conjecture_ok", &self.conjecture_ok)?;
        map.serialize_entry("audit", &self.audit)?;
        map.serialize_entry("exhaustive", &self.exhaustive)?;
        map.serialize_entry("graphs_examined", &self.graphs_examined)?;
        map.end()
    }
}

pub fn audit(r: u32, m: u64, witness: &Hypergraph, cert: &LagrangianCertificate, zero_tol: f64) -> Result<AuditReport> {
    let t = if r >= 2 { principal_domain(r, m)?.t } else { None };
    let x = cert.weighting_in_graph_labels();
    let x_sorted_ok = x.windows(2).all(|w| w[0] >= w[1] - AUDIT_SLACK);
    let support = cert.support();
    let covers_pairs = support.iter().enumerate().all(|(a, &i)| {
        support[a + 1..].iter().all(|&j| witness.covers_pair(i, j))
    });
    let sorted = |k: usize| cert.x.get(k.wrapping_sub(1)).copied().unwrap_or(0.0);
    let x1 = sorted(1);
    let (x1_bound_ok, xk_bounds_ok, support_equals_t) = match t {
        Some(t) => {
            let x1_ok = x1 < 1.0 / (t - r + 1) as f64 + AUDIT_SLACK;
            let xk_ok = (1..t).all(|k| {
                let coef = (k as f64 - r as f64 + 2.0) / (k as f64 + 1.0);
                sorted((t - k) as usize) > coef * x1 - AUDIT_SLACK
            });
            (Some(x1_ok), Some(xk_ok), Some(cert.support_size == t as usize))
        }
        None => (None, None, None),
    };
    Ok(AuditReport {
        x_sorted_ok,
        x1_bound_ok,
        xk_bounds_ok,
        covers_pairs,
        lemma2iii_max_violation: solver::pair_balance_violation(witness, &x, zero_tol)?,
        support_equals_t,
    })
}

/// Recomputes the audit of a finished record from its witness and certificate.
pub fn audit_extremal(record: &SweepRecord, zero_tol: f64) -> Result<AuditReport> {
    audit(record.r, record.m, &record.witness, &record.certificate, zero_tol)
}

struct Candidate {
    index: u64,
    graph: Hypergraph,
    lambda: f64,
}

/// Keeps the `FINALISTS` best candidates by (lambda desc, index asc).
fn push_leader(leaders: &mut Vec<Candidate>, cand: Candidate) {
    leaders.push(cand);
    leaders.sort_by(|a, b| b.lambda.total_cmp(&a.lambda).then(a.index.cmp(&b.index)));
    leaders.truncate(FINALISTS);
}

fn colex_reference(r: u32, m: u64, cfg: &SolverConfig) -> Result<f64> {
    Ok(solve_lagrangian(&build_colex(r, m)?, &cfg.with_restarts(FINAL_RESTARTS))?.lambda)
}

/// `λ_r(m)` restricted to graphs inside `[n_cap]`, by exhaustive search over
/// left-compressed graphs. Runs on the current rayon pool.
pub fn brute_lambda(r: u32, m: u64, n_cap: u32, cfg: &SolverConfig, budget: u64) -> Result<SweepRecord> {
    cfg.validate()?;
    if r < 2 || m == 0 || n_cap < r {
        return Err(invalid("brute_lambda needs r >= 2, m >= 1 and n_cap >= r"));
    }
    if m as u128 > binom(n_cap as u64, r as u64)? {
        return Err(invalid(format!(
            "{m} edges do not fit in [{n_cap}]^({r})"
        )));
    }
    let triage = cfg.with_restarts(TRIAGE_RESTARTS);
    let mut stream = enumerate_left_compressed(r, n_cap, m as usize)?;
    let mut leaders: Vec<Candidate> = Vec::new();
    let mut examined = 0u64;
    loop {
        let chunk: Vec<Hypergraph> = stream.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        if examined + chunk.len() as u64 > budget {
            return Err(Error::BudgetExceeded {
                budget,
                examined,
                best_lambda: leaders.first().map_or(0.0, |c| c.lambda),
            });
        }
        let solved: Vec<Result<f64>> = chunk
            .par_iter()
            .map(|g| Ok(solve_lagrangian(g, &triage)?.lambda))
            .collect();
        let base = examined;
        examined += chunk.len() as u64;
        for (k, (graph, lambda)) in chunk.into_iter().zip(solved).enumerate() {
            push_leader(
                &mut leaders,
                Candidate {
                    index: base + k as u64,
                    graph,
                    lambda: lambda?,
                },
            );
        }
    }
    if leaders.is_empty() {
        return Err(invalid(format!("no left-compressed {r}-graph with {m} edges in [{n_cap}]")));
    }

    let finals = cfg.with_restarts(FINAL_RESTARTS);
    let resolved: Vec<Result<LagrangianCertificate>> = leaders
        .par_iter()
        .map(|c| solve_lagrangian(&c.graph, &finals))
        .collect();
    let mut best: Option<(&Candidate, LagrangianCertificate)> = None;
    let mut ordered: Vec<(&Candidate, LagrangianCertificate)> = leaders
        .iter()
        .zip(resolved)
        .map(|(c, cert)| Ok((c, cert?)))
        .collect::<Result<_>>()?;
    ordered.sort_by_key(|(c, _)| c.index);
    for (cand, cert) in ordered {
        if best.as_ref().is_none_or(|(_, b)| cert.beats(b)) {
            best = Some((cand, cert));
        }
    }
    let (winner, certificate) = best.expect("at least one leader");
    finish_record(r, m, n_cap, winner.graph.clone(), certificate, cfg, true, examined)
}

#[allow(clippy::too_many_arguments)]
fn finish_record(
    r: u32,
    m: u64,
    n_cap: u32,
    witness: Hypergraph,
    certificate: LagrangianCertificate,
    cfg: &SolverConfig,
    exhaustive: bool,
    graphs_examined: u64,
) -> Result<SweepRecord> {
    let domain = principal_domain(r, m)?;
    let colex_lambda = colex_reference(r, m, cfg)?;
    let lambda_r = certificate.lambda;
    let audit = audit(r, m, &witness, &certificate, cfg.zero_tol)?;
    Ok(SweepRecord {
        r,
        m,
        n_cap,
        t: domain.t,
        lambda_r,
        colex_lambda,
        witness,
        certificate,
        predicted: domain.predicted_lambda,
        conjecture_ok: lambda_r <= colex_lambda + CONJECTURE_TOL,
        audit,
        exhaustive,
        graphs_examined,
    })
}

/// Hill-climbing from `C_{r,m}` (placed on `[n_cap]`) with edge/non-edge swaps until no
/// swap improves the weight polynomial. The result is a lower bound, not a maximum.
pub fn local_search(r: u32, m: u64, n_cap: u32, cfg: &SolverConfig) -> Result<SweepRecord> {
    cfg.validate()?;
    if r < 2 || m == 0 {
        return Err(invalid("local_search needs r >= 2 and m >= 1"));
    }
    let start = build_colex(r, m)?;
    let mut g = start.with_vertex_count(start.n().max(n_cap))?;
    let mut cert = solve_lagrangian(&g, cfg)?;
    let mut best = (g.clone(), cert.clone());
    let mut visited = 1u64;
    loop {
        let (next, improved) = solver::swap_improve(&g, &cert)?;
        if !improved || visited >= 10_000 {
            break;
        }
        g = next;
        cert = solve_lagrangian(&g, cfg)?;
        visited += 1;
        if cert.beats(&best.1) {
            best = (g.clone(), cert.clone());
        }
    }
    let (witness, certificate) = best;
    finish_record(r, m, n_cap, witness, certificate, cfg, false, visited)
}
