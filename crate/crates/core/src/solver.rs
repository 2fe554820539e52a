//! Numerical Lagrangians with optimality certificates.
//!
//! The maximizer of `w(G, x)` over the simplex is approached with the multiplicative
//! growth transform
//!
//! ```text
//! x_i <- x_i * (dw/dx_i) / (r * w(G, x))
//! ```
//!
//! which keeps `x` on the simplex and never decreases `w` for homogeneous polynomials
//! with non-negative coefficients. Several starts are run (uniform, degree-seeded
//! subsets, Dirichlet(1) samples) and the best result is kept under a deterministic
//! tie-break. Results are refined with Newton steps on their support, and each carries
//! its KKT residual so callers can check optimality.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hypergraph::{Edge, Hypergraph};
use crate::weighting::{self, Weighting};

/// Results whose lambdas differ by at most this much are considered tied.
pub const LAMBDA_TIE_TOL: f64 = 1e-13;
/// Growth-transform iterations run after small coordinates are truncated.
pub const POLISH_ITERS: usize = 50;
/// Minimum monomial gain for a swap move to count as an improvement.
pub const SWAP_MARGIN: f64 = 1e-12;
/// Largest denominator used by the rational drift check.
pub const RATIONAL_MAX_DEN: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once one step improves `w` by at most this much and the partials on the
    /// active coordinates agree to the same tolerance.
    pub conv_tol: f64,
    pub zero_tol: f64,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            restarts: 16,
            max_iters: 100_000,
            conv_tol: 1e-12,
            zero_tol: weighting::DEFAULT_ZERO_TOL,
            rng_seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_restarts(&self, restarts: usize) -> Self {
        SolverConfig {
            restarts,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(invalid("restarts must be at least 1"));
        }
        if !(self.conv_tol > 0.0 && self.zero_tol > 0.0) {
            return Err(invalid("tolerances must be positive"));
        }
        Ok(())
    }
}

/// A claimed maximizer of the weight polynomial.
///
/// `x` is sorted in non-increasing order; `permutation[k]` is the vertex of the
/// hypergraph that carries `x[k]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LagrangianCertificate {
    pub lambda: f64,
    pub x: Vec<f64>,
    pub support_size: usize,
    pub kkt_residual: f64,
    #[serde(rename = "iterations")]
    pub iterations_used: usize,
    pub permutation: Vec<u32>,
}

impl LagrangianCertificate {
    /// Builds a certificate from a weighting in the hypergraph's own labels.
    pub fn from_weighting(g: &Hypergraph, x: &[f64], iterations_used: usize) -> Result<Self> {
        let lambda = weighting::weight_poly(g, x)?;
        let kkt = kkt_residual(g, x)?;
        let mut order: Vec<usize> = (0..x.len()).collect();
        order.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
        Ok(LagrangianCertificate {
            lambda,
            x: order.iter().map(|&k| x[k]).collect(),
            support_size: if g.m() == 0 {
                0
            } else {
                x.iter().filter(|v| **v > 0.0).count()
            },
            kkt_residual: kkt,
            iterations_used,
            permutation: order.iter().map(|&k| k as u32 + 1).collect(),
        })
    }

    /// The weighting indexed by the hypergraph's vertex labels.
    pub fn weighting_in_graph_labels(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.x.len()];
        for (k, &v) in self.permutation.iter().enumerate() {
            out[v as usize - 1] = self.x[k];
        }
        out
    }

    /// Vertices carrying positive weight, in the hypergraph's labels.
    pub fn support(&self) -> Vec<u32> {
        let mut s: Vec<u32> = self
            .permutation
            .iter()
            .zip(&self.x)
            .filter(|(_, x)| **x > 0.0)
            .map(|(v, _)| *v)
            .collect();
        s.sort_unstable();
        s
    }

    /// True if `self` should replace `other` as the best known certificate.
    pub fn beats(&self, other: &LagrangianCertificate) -> bool {
        if self.lambda > other.lambda + LAMBDA_TIE_TOL {
            return true;
        }
        if self.lambda < other.lambda - LAMBDA_TIE_TOL {
            return false;
        }
        match self.support_size.cmp(&other.support_size) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => {
                let ord = self
                    .x
                    .iter()
                    .zip(&other.x)
                    .map(|(a, b)| a.total_cmp(b))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal);
                ord == Ordering::Less
            }
        }
    }
}

/// Flat edge list for the inner loop.
struct Compiled {
    r: usize,
    n: usize,
    verts: Vec<usize>,
}

impl Compiled {
    fn new(g: &Hypergraph) -> Self {
        let verts = g
            .edges()
            .flat_map(|e| e.vertices().iter().map(|&v| v as usize - 1))
            .collect();
        Compiled {
            r: g.r() as usize,
            n: g.n() as usize,
            verts,
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.verts
            .chunks_exact(self.r)
            .map(|e| e.iter().map(|&v| x[v]).product::<f64>())
            .sum()
    }

    /// Fills `grad` and returns `w`.
    fn value_and_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut w = 0.0;
        for e in self.verts.chunks_exact(self.r) {
            w += e.iter().map(|&v| x[v]).product::<f64>();
            for (k, &v) in e.iter().enumerate() {
                let mut p = 1.0;
                for (l, &u) in e.iter().enumerate() {
                    if l != k {
                        p *= x[u];
                    }
                }
                grad[v] += p;
            }
        }
        w
    }

    /// Second derivatives restricted to `idx`.
    fn hessian_on(&self, x: &[f64], idx: &[usize]) -> DMatrix<f64> {
        let mut pos = vec![usize::MAX; self.n];
        idx.iter().enumerate().for_each(|(k, &i)| pos[i] = k);
        let mut h = DMatrix::zeros(idx.len(), idx.len());
        for e in self.verts.chunks_exact(self.r) {
            for a in 0..self.r {
                for b in a + 1..self.r {
                    let (i, j) = (pos[e[a]], pos[e[b]]);
                    if i == usize::MAX || j == usize::MAX {
                        continue;
                    }
                    let p: f64 = (0..self.r)
                        .filter(|&l| l != a && l != b)
                        .map(|l| x[e[l]])
                        .product();
                    h[(i, j)] += p;
                    h[(j, i)] += p;
                }
            }
        }
        h
    }

    /// Largest `|dw/dx_i - r w|` over coordinates above `zero_tol`, and `w`.
    fn spread(&self, x: &[f64], zero_tol: f64) -> (f64, f64) {
        let mut grad = vec![0.0; self.n];
        let w = self.value_and_grad(x, &mut grad);
        let rw = self.r as f64 * w;
        let spread = x
            .iter()
            .zip(&grad)
            .filter(|(xi, _)| **xi > zero_tol)
            .map(|(_, d)| (d - rw).abs())
            .fold(0.0, f64::max);
        (spread, w)
    }
}

fn normalize(x: &mut [f64]) {
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
}

/// One growth-transform step.
pub fn ascent_step(g: &Hypergraph, x: &[f64]) -> Result<Weighting> {
    if x.len() != g.n() as usize {
        return Err(invalid("weighting length must equal the vertex count"));
    }
    let c = Compiled::new(g);
    let mut grad = vec![0.0; c.n];
    let w = c.value_and_grad(x, &mut grad);
    if w <= 0.0 {
        return Err(Error::DegenerateStart);
    }
    let scale = c.r as f64 * w;
    let mut y: Vec<f64> = x.iter().zip(&grad).map(|(a, d)| a * d / scale).collect();
    normalize(&mut y);
    Weighting::new(y)
}

/// Max over the support of `|dw/dx_i - r w|`, joined with the largest excess
/// `dw/dx_i - r w` over zero coordinates.
pub fn kkt_residual(g: &Hypergraph, x: &[f64]) -> Result<f64> {
    let grad = weighting::gradient(g, x)?;
    let rw = g.r() as f64 * weighting::weight_poly(g, x)?;
    Ok(grad
        .iter()
        .zip(x)
        .map(|(d, xi)| {
            if *xi > 0.0 {
                (d - rw).abs()
            } else {
                (d - rw).max(0.0)
            }
        })
        .fold(0.0, f64::max))
}

struct RunOutcome {
    x: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Iterates the growth transform from `x` until it stalls or the budget runs out.
fn ascend(c: &Compiled, mut x: Vec<f64>, cfg: &SolverConfig, max_iters: usize) -> Result<RunOutcome> {
    let mut grad = vec![0.0; c.n];
    let mut next = vec![0.0; c.n];
    let mut next_grad = vec![0.0; c.n];
    let mut w = c.value_and_grad(&x, &mut grad);
    if w <= 0.0 {
        return Err(Error::DegenerateStart);
    }
    let mut iterations = 0;
    while iterations < max_iters {
        let rw = c.r as f64 * w;
        for i in 0..c.n {
            next[i] = x[i] * grad[i] / rw;
        }
        normalize(&mut next);
        let w_next = c.value_and_grad(&next, &mut next_grad);
        if w_next < w * (1.0 - ROUNDING) {
            // a real decrease only happens once rounding dominates the step
            return Ok(RunOutcome { x, iterations, converged: true });
        }
        iterations += 1;
        let gain = w_next - w;
        std::mem::swap(&mut x, &mut next);
        std::mem::swap(&mut grad, &mut next_grad);
        w = w_next;
        if gain <= cfg.conv_tol {
            let rw = c.r as f64 * w;
            let spread = x
                .iter()
                .zip(&grad)
                .filter(|(xi, _)| **xi > cfg.zero_tol)
                .map(|(_, d)| (d - rw).abs())
                .fold(0.0, f64::max);
            if spread <= cfg.conv_tol {
                return Ok(RunOutcome { x, iterations, converged: true });
            }
        }
    }
    Ok(RunOutcome { x, iterations, converged: false })
}

/// Relative size of rounding noise in `w`; smaller apparent decreases are ignored.
const ROUNDING: f64 = 8.0 * f64::EPSILON;
/// Maximum Newton steps in the final polish.
const NEWTON_ITERS: usize = 8;

/// Newton's method on the stationarity system of the current support,
/// `dw/dx_i = mu` for `x_i > 0` and `sum x = 1`. A step is kept only if it stays
/// inside the face, does not lower `w` beyond rounding and shrinks the residual.
fn newton_polish(c: &Compiled, x: &mut [f64]) {
    let idx: Vec<usize> = (0..c.n).filter(|&i| x[i] > 0.0).collect();
    let k = idx.len();
    if k < 2 {
        return;
    }
    let mut grad = vec![0.0; c.n];
    for _ in 0..NEWTON_ITERS {
        let (spread, w) = c.spread(x, 0.0);
        if spread == 0.0 {
            return;
        }
        c.value_and_grad(x, &mut grad);
        let mu = c.r as f64 * w;
        let mut a = DMatrix::zeros(k + 1, k + 1);
        a.view_mut((0, 0), (k, k)).copy_from(&c.hessian_on(x, &idx));
        for p in 0..k {
            a[(p, k)] = -1.0;
            a[(k, p)] = 1.0;
        }
        let mut b = DVector::zeros(k + 1);
        for (p, &i) in idx.iter().enumerate() {
            b[p] = mu - grad[i];
        }
        b[k] = 1.0 - idx.iter().map(|&i| x[i]).sum::<f64>();
        let Some(step) = a.lu().solve(&b) else {
            return;
        };
        let mut y = x.to_vec();
        for (p, &i) in idx.iter().enumerate() {
            y[i] += step[p];
        }
        if idx.iter().any(|&i| y[i] <= 0.0) {
            return;
        }
        normalize(&mut y);
        let (y_spread, y_w) = c.spread(&y, 0.0);
        if y_w < w * (1.0 - ROUNDING) || y_spread >= spread {
            return;
        }
        x.copy_from_slice(&y);
    }
}

/// Coordinates below this fraction of the largest one are candidates for dropping.
const VANISH_RATIO: f64 = 0.05;
/// Iterations between stall probes.
const PROBE_WINDOW: usize = 1000;
/// Largest `dw/dx_i - r w` allowed on a dropped coordinate.
const PROBE_KKT_TOL: f64 = 1e-9;

/// Small, still shrinking coordinates of a stalled run.
fn vanishing(c: &Compiled, x: &[f64]) -> Vec<usize> {
    let mut grad = vec![0.0; c.n];
    let rw = c.r as f64 * c.value_and_grad(x, &mut grad);
    let top = x.iter().copied().fold(0.0, f64::max);
    (0..c.n)
        .filter(|&i| x[i] > 0.0 && x[i] < VANISH_RATIO * top && grad[i] < rw)
        .collect()
}

/// Growth transform with stall probes. Near a degenerate maximizer some coordinates
/// decay only like `1/k`; when a window ends without convergence those coordinates are
/// dropped tentatively, and the smaller face is kept if its optimum is no worse and
/// satisfies the first-order conditions of the full problem.
fn ascend_probing(c: &Compiled, mut x: Vec<f64>, cfg: &SolverConfig, budget: usize) -> Result<RunOutcome> {
    let mut used = 0;
    let mut rejected: Vec<usize> = Vec::new();
    while used < budget {
        let run = ascend(c, x, cfg, PROBE_WINDOW.min(budget - used))?;
        used += run.iterations;
        x = run.x;
        if run.converged {
            return Ok(RunOutcome { x, iterations: used, converged: true });
        }
        let mut refined = x.clone();
        newton_polish(c, &mut refined);
        if c.spread(&refined, cfg.zero_tol).0 <= cfg.conv_tol {
            return Ok(RunOutcome { x: refined, iterations: used, converged: true });
        }
        let drop = vanishing(c, &x);
        if drop.is_empty() || drop == rejected || used >= budget {
            continue;
        }
        let mut face = x.clone();
        drop.iter().for_each(|&i| face[i] = 0.0);
        normalize(&mut face);
        if c.value(&face) <= 0.0 {
            rejected = drop;
            continue;
        }
        let probe = ascend_probing(c, face, cfg, budget - used)?;
        used += probe.iterations;
        let mut grad = vec![0.0; c.n];
        let w = c.value_and_grad(&probe.x, &mut grad);
        let excess = drop
            .iter()
            .map(|&i| grad[i] - c.r as f64 * w)
            .fold(f64::NEG_INFINITY, f64::max);
        if w >= c.value(&x) && excess <= PROBE_KKT_TOL {
            return Ok(RunOutcome { x: probe.x, iterations: used, converged: probe.converged });
        }
        rejected = drop;
    }
    Ok(RunOutcome { x, iterations: used, converged: false })
}

/// Truncates coordinates below `zero_tol`, renormalizes, runs the polish steps and
/// finishes with Newton steps on the support.
fn finish(c: &Compiled, g: &Hypergraph, run: RunOutcome, cfg: &SolverConfig) -> Result<LagrangianCertificate> {
    let mut x = run.x;
    for v in x.iter_mut() {
        if *v < cfg.zero_tol {
            *v = 0.0;
        }
    }
    normalize(&mut x);
    let polished = ascend(
        c,
        x,
        &SolverConfig {
            conv_tol: 0.0,
            ..cfg.clone()
        },
        POLISH_ITERS,
    )?;
    let mut x = polished.x;
    newton_polish(c, &mut x);
    LagrangianCertificate::from_weighting(g, &x, run.iterations + polished.iterations)
}

/// Greedy vertex subsets grown from each non-isolated vertex by co-degree.
fn seeded_supports(g: &Hypergraph) -> Vec<Vec<u32>> {
    let n = g.n() as usize;
    let size = n.min(g.r() as usize + 3);
    let degree: Vec<usize> = (1..=g.n()).map(|v| g.degree(v)).collect();
    let mut seeds: Vec<Vec<u32>> = Vec::new();
    for v in 1..=g.n() {
        if degree[v as usize - 1] == 0 {
            continue;
        }
        let mut set = vec![v];
        while set.len() < size {
            let best = (1..=g.n())
                .filter(|u| !set.contains(u))
                .max_by_key(|&u| {
                    let codegree: usize = g
                        .edges()
                        .filter(|e| e.contains(u))
                        .map(|e| set.iter().filter(|&&s| e.contains(s)).count())
                        .sum();
                    (codegree, degree[u as usize - 1], std::cmp::Reverse(u))
                })
                .expect("size <= n");
            set.push(best);
        }
        set.sort_unstable();
        if !seeds.contains(&set) {
            seeds.push(set);
        }
    }
    seeds
}

fn dirichlet_start(n: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut x: Vec<f64> = (0..n).map(|_| Exp1.sample(&mut rng)).collect::<Vec<f64>>();
    normalize(&mut x);
    x
}

/// All starting points in a fixed order: uniform, degree-seeded supports, Dirichlet samples.
fn starts(g: &Hypergraph, cfg: &SolverConfig) -> Vec<Vec<f64>> {
    let n = g.n() as usize;
    let mut out = vec![vec![1.0 / n as f64; n]];
    for s in seeded_supports(g) {
        out.push(Weighting::uniform_on(n, &s).expect("valid subset").into_vec());
    }
    for k in 0..cfg.restarts {
        out.push(dirichlet_start(n, cfg.rng_seed, k as u64));
    }
    out
}

/// Best certificate for `λ(G)` over all starts. `lambda` is always attained by the
/// reported weighting, so it is a lower bound on the true Lagrangian.
pub fn solve_lagrangian(g: &Hypergraph, cfg: &SolverConfig) -> Result<LagrangianCertificate> {
    cfg.validate()?;
    let n = g.n() as usize;
    if g.m() == 0 {
        let x = if n == 0 { Vec::new() } else { vec![1.0 / n as f64; n] };
        return LagrangianCertificate::from_weighting(g, &x, 0);
    }
    let c = Compiled::new(g);
    let mut best: Option<LagrangianCertificate> = None;
    for start in starts(g, cfg) {
        if c.value(&start) <= 0.0 {
            // a seeded subset can miss every edge
            continue;
        }
        let run = ascend_probing(&c, start, cfg, cfg.max_iters)?;
        let cert = finish(&c, g, run, cfg)?;
        if best.as_ref().is_none_or(|b| cert.beats(b)) {
            best = Some(cert);
        }
    }
    best.ok_or(Error::DegenerateStart)
}

/// Recomputes value and residual and re-evaluates `w` exactly at a nearby rational
/// weighting (denominators at most 10^6, renormalized to sum 1).
pub fn verify_certificate(g: &Hypergraph, cert: &LagrangianCertificate, tol: f64) -> Result<bool> {
    let n = g.n() as usize;
    if cert.x.len() != n || cert.permutation.len() != n {
        return Err(invalid(format!(
            "certificate has {} coordinates and {} labels for {n} vertices",
            cert.x.len(),
            cert.permutation.len()
        )));
    }
    let mut seen = vec![false; n];
    for &v in &cert.permutation {
        if v == 0 || v as usize > n || std::mem::replace(&mut seen[v as usize - 1], true) {
            return Err(invalid("certificate permutation is not a permutation of [n]"));
        }
    }
    if cert.x.windows(2).any(|w| w[0] < w[1]) {
        return Err(invalid("certificate coordinates are not sorted"));
    }
    if n > 0 && !weighting::is_legal(&cert.x) {
        return Err(invalid("certificate weighting is not legal"));
    }
    let x = cert.weighting_in_graph_labels();
    let lambda = weighting::weight_poly(g, &x)?;
    let residual = kkt_residual(g, &x)?;
    if (lambda - cert.lambda).abs() > tol || residual > tol {
        return Ok(false);
    }
    if n == 0 {
        return Ok(cert.lambda == 0.0);
    }
    let rational = rational_weight(g, &x);
    Ok((rational - cert.lambda).abs() <= tol)
}

/// `w(G, q)` in exact arithmetic, where `q` is the best rational approximation of `x`
/// with bounded denominators, rescaled to sum exactly to 1.
pub fn rational_weight(g: &Hypergraph, x: &[f64]) -> f64 {
    let q: Vec<BigRational> = x
        .iter()
        .map(|&v| {
            let (p, d) = best_rational(v, RATIONAL_MAX_DEN);
            BigRational::new(BigInt::from(p), BigInt::from(d))
        })
        .collect();
    let total: BigRational = q.iter().cloned().fold(BigRational::zero(), |a, b| a + b);
    if total.is_zero() {
        return 0.0;
    }
    let q: Vec<BigRational> = q.into_iter().map(|v| v / &total).collect();
    let mut w = BigRational::zero();
    for e in g.edges() {
        let mut p = BigRational::from_integer(BigInt::from(1));
        for &v in e.vertices() {
            p *= &q[v as usize - 1];
        }
        w += p;
    }
    w.to_f64().unwrap_or(f64::NAN)
}

/// Closest fraction `p/q` to `v` in `[0, 1]` with `q <= max_den`.
pub fn best_rational(v: f64, max_den: u64) -> (u64, u64) {
    let v = v.clamp(0.0, 1.0);
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut frac = v;
    loop {
        let a = frac.floor();
        let a_int = a as u64;
        let q2 = a_int.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            let k = (max_den - q0) / q1.max(1);
            let (ps, qs) = (p0 + k * p1, q0 + k * q1);
            let err_semi = (v - ps as f64 / qs as f64).abs();
            let err_conv = (v - p1 as f64 / q1 as f64).abs();
            return if q1 == 0 || err_semi < err_conv { (ps, qs) } else { (p1, q1) };
        }
        let p2 = a_int * p1 + p0;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let rest = frac - a;
        if rest < 1e-15 || (v - p1 as f64 / q1 as f64).abs() == 0.0 {
            return (p1, q1);
        }
        frac = 1.0 / rest;
    }
}

/// Replaces the edge with the smallest monomial by the non-edge inside the support
/// with the largest monomial, when that strictly increases `w` at the certificate's `x`.
pub fn swap_improve(g: &Hypergraph, cert: &LagrangianCertificate) -> Result<(Hypergraph, bool)> {
    let x = cert.weighting_in_graph_labels();
    if x.len() != g.n() as usize {
        return Err(invalid("certificate does not match the hypergraph"));
    }
    let mono = |e: &Edge| e.vertices().iter().map(|&v| x[v as usize - 1]).product::<f64>();
    let weakest = g
        .edges()
        .map(|e| (mono(e), e))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let support = cert.support();
    let strongest = g
        .non_edges()
        .into_iter()
        .filter(|f| f.vertices().iter().all(|v| support.binary_search(v).is_ok()))
        .map(|f| (mono(&f), f))
        .fold(None::<(f64, Edge)>, |acc, cand| match acc {
            Some(a) if a.0 >= cand.0 => Some(a),
            _ => Some(cand),
        });
    match (weakest, strongest) {
        (Some((xe, e)), Some((xf, f))) if xf > xe + SWAP_MARGIN => {
            Ok((g.swap_edge(e, f)?, true))
        }
        _ => Ok((g.clone(), false)),
    }
}

/// `max |(x_i - x_j) w(G_{i,j}, x) - w(G_{i\j}, x)|` over support pairs `i < j`.
pub fn pair_balance_violation(g: &Hypergraph, x: &[f64], zero_tol: f64) -> Result<f64> {
    let support = weighting::support(x, zero_tol);
    let mono = |e: &Edge| e.vertices().iter().map(|&v| x[v as usize - 1]).product::<f64>();
    let mut worst = 0.0f64;
    for (a, &i) in support.iter().enumerate() {
        for &j in &support[a + 1..] {
            let d = g.pair_decomposition(i, j)?;
            let common: f64 = d.common.iter().map(mono).sum();
            let only_i: f64 = d.only_i.iter().map(mono).sum();
            let lhs = (x[i as usize - 1] - x[j as usize - 1]) * common;
            worst = worst.max((lhs - only_i).abs());
        }
    }
    Ok(worst)
}

/// For one support vertex: the link weight `w(G_i, x)` next to `r λ(G)` and `r λ(G_i)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinkStationarity {
    pub vertex: u32,
    pub link_weight: f64,
    pub r_lambda: f64,
    pub r_link_lambda: f64,
}

/// Tabulates both readings of the link stationarity condition at a certificate.
/// Only `link_weight == r_lambda` is enforced elsewhere (via the KKT residual).
pub fn link_stationarity_report(
    g: &Hypergraph,
    cert: &LagrangianCertificate,
    cfg: &SolverConfig,
) -> Result<Vec<LinkStationarity>> {
    let x = cert.weighting_in_graph_labels();
    let r = g.r() as f64;
    cert.support()
        .into_iter()
        .map(|v| {
            let link = g.link(&[v])?;
            Ok(LinkStationarity {
                vertex: v,
                link_weight: weighting::weight_poly(&link, &x)?,
                r_lambda: r * cert.lambda,
                r_link_lambda: r * solve_lagrangian(&link, cfg)?.lambda,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{build_colex, complete};

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn ascent_step_examples() {
        let k4 = complete(3, 4).unwrap();
        let y = ascent_step(&k4, &[0.25; 4]).unwrap();
        for v in y.iter() {
            assert!((v - 0.25).abs() < 1e-16);
        }
        let one = Hypergraph::from_lists(3, 4, &[&[1, 2, 3]]).unwrap();
        let y = ascent_step(&one, &[0.25; 4]).unwrap();
        assert_eq!(y[3], 0.0);
        let tri = complete(2, 3).unwrap();
        let x = [0.5, 0.3, 0.2];
        let before = weighting::weight_poly(&tri, &x).unwrap();
        assert!((before - 0.31).abs() < 1e-15);
        let after = weighting::weight_poly(&tri, &ascent_step(&tri, &x).unwrap()).unwrap();
        // frozen from an independent evaluation of one step
        assert!((after - 0.328_043_704_474_505_76).abs() < 1e-14);
        assert!(after >= before);
    }

    #[test]
    fn ascent_step_degenerate_start() {
        let one = Hypergraph::from_lists(3, 4, &[&[1, 2, 3]]).unwrap();
        assert!(matches!(
            ascent_step(&one, &[0.0, 0.0, 0.5, 0.5]),
            Err(Error::DegenerateStart)
        ));
    }

    #[test]
    fn solve_examples() {
        let tri = complete(2, 3).unwrap();
        assert!((solve_lagrangian(&tri, &cfg()).unwrap().lambda - 1.0 / 3.0).abs() < 1e-10);
        let k4 = complete(3, 4).unwrap();
        assert!((solve_lagrangian(&k4, &cfg()).unwrap().lambda - 0.0625).abs() < 1e-10);
        let c35 = build_colex(3, 5).unwrap();
        let cert = solve_lagrangian(&c35, &cfg()).unwrap();
        assert!((cert.lambda - 0.0625).abs() < 1e-10);
        assert_eq!(cert.support_size, 4);
        assert_eq!(cert.support(), vec![1, 2, 3, 4]);
        let single = Hypergraph::from_lists(4, 4, &[&[1, 2, 3, 4]]).unwrap();
        assert!((solve_lagrangian(&single, &cfg()).unwrap().lambda - 0.00390625).abs() < 1e-12);
    }

    #[test]
    fn empty_graph_has_zero_lagrangian() {
        let g = Hypergraph::empty(3, 4).unwrap();
        let cert = solve_lagrangian(&g, &cfg()).unwrap();
        assert_eq!(cert.lambda, 0.0);
        assert_eq!(cert.support_size, 0);
    }

    #[test]
    fn certificate_invariants() {
        let g = build_colex(3, 9).unwrap();
        let cert = solve_lagrangian(&g, &cfg()).unwrap();
        assert!(cert.x.windows(2).all(|w| w[0] >= w[1]));
        let x = cert.weighting_in_graph_labels();
        let w = weighting::weight_poly(&g, &x).unwrap();
        assert!((w - cert.lambda).abs() <= 1e-14 * w);
        assert!(cert.kkt_residual <= 1e-9, "{}", cert.kkt_residual);
        assert_eq!(cert.kkt_residual, kkt_residual(&g, &x).unwrap());
    }

    #[test]
    fn kkt_examples() {
        let k4 = complete(3, 4).unwrap();
        assert!(kkt_residual(&k4, &[0.25; 4]).unwrap() < 1e-16);
        let tri = complete(2, 3).unwrap();
        assert!((kkt_residual(&tri, &[0.5, 0.5, 0.0]).unwrap() - 0.5).abs() < 1e-15);
        let one = Hypergraph::from_lists(3, 3, &[&[1, 2, 3]]).unwrap();
        assert!(kkt_residual(&one, &[1.0 / 3.0; 3]).unwrap() < 1e-16);
    }

    #[test]
    fn verify_examples() {
        let k4 = complete(3, 4).unwrap();
        let cert = LagrangianCertificate::from_weighting(&k4, &[0.25; 4], 0).unwrap();
        assert!(verify_certificate(&k4, &cert, 1e-8).unwrap());
        let lying = LagrangianCertificate {
            lambda: 0.07,
            ..cert.clone()
        };
        assert!(!verify_certificate(&k4, &lying, 1e-8).unwrap());
        let c35 = build_colex(3, 5).unwrap();
        let cert = solve_lagrangian(&c35, &cfg()).unwrap();
        assert!(verify_certificate(&c35, &cert, 1e-8).unwrap());
    }

    #[test]
    fn verify_rejects_malformed() {
        let k4 = complete(3, 4).unwrap();
        let cert = LagrangianCertificate::from_weighting(&k4, &[0.25; 4], 0).unwrap();
        let short = LagrangianCertificate {
            x: vec![0.5, 0.5],
            ..cert.clone()
        };
        assert!(verify_certificate(&k4, &short, 1e-8).is_err());
        let bad_perm = LagrangianCertificate {
            permutation: vec![1, 1, 2, 3],
            ..cert.clone()
        };
        assert!(verify_certificate(&k4, &bad_perm, 1e-8).is_err());
        let unsorted = LagrangianCertificate {
            x: vec![0.2, 0.3, 0.25, 0.25],
            ..cert
        };
        assert!(verify_certificate(&k4, &unsorted, 1e-8).is_err());
    }

    #[test]
    fn best_rational_examples() {
        assert_eq!(best_rational(0.25, 1_000_000), (1, 4));
        assert_eq!(best_rational(1.0 / 3.0, 1_000_000), (1, 3));
        assert_eq!(best_rational(0.0, 1_000_000), (0, 1));
        assert_eq!(best_rational(1.0, 1_000_000), (1, 1));
        let (p, q) = best_rational(std::f64::consts::PI - 3.0, 1000);
        assert_eq!((p, q), (16, 113));
        // frozen from fractions.Fraction.limit_denominator
        assert_eq!(best_rational(0.123_456_789, 1_000_000), (10, 81));
    }

    #[test]
    fn swap_examples() {
        let k4 = complete(3, 4).unwrap();
        let cert = solve_lagrangian(&k4, &cfg()).unwrap();
        assert_eq!(swap_improve(&k4, &cert).unwrap(), (k4, false));

        let g = Hypergraph::from_lists(3, 5, &[&[3, 4, 5]]).unwrap();
        let cert = solve_lagrangian(&g, &cfg()).unwrap();
        assert_eq!(cert.support(), vec![3, 4, 5]);
        assert!(!swap_improve(&g, &cert).unwrap().1);

        let g = Hypergraph::from_lists(3, 5, &[&[1, 2, 3], &[3, 4, 5]]).unwrap();
        let cert = solve_lagrangian(&g, &cfg()).unwrap();
        let (h, _) = swap_improve(&g, &cert).unwrap();
        assert!(solve_lagrangian(&h, &cfg()).unwrap().lambda >= cert.lambda - 1e-12);
    }

    #[test]
    fn swap_strictly_improves_at_fixed_weighting() {
        // K4 minus one edge plus a pendant edge: the pendant edge has weight 0 and
        // the missing triple lies inside the support
        let g = Hypergraph::from_lists(3, 5, &[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4], &[1, 2, 5]])
            .unwrap();
        let x = [0.3, 0.25, 0.25, 0.2, 0.0];
        let cert = LagrangianCertificate::from_weighting(&g, &x, 0).unwrap();
        let (h, improved) = swap_improve(&g, &cert).unwrap();
        assert!(improved);
        assert_eq!(h.m(), g.m());
        assert!(weighting::weight_poly(&h, &x).unwrap() > weighting::weight_poly(&g, &x).unwrap());
    }

    #[test]
    fn deterministic_given_seed() {
        let g = build_colex(3, 8).unwrap();
        let a = solve_lagrangian(&g, &cfg()).unwrap();
        let b = solve_lagrangian(&g, &cfg()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                   b.x.iter().map(|v| v.to_bits()).collect::<Vec<_>>());
    }

    #[test]
    fn pairs_balance_at_left_compressed_optimum() {
        for m in [5u64, 7, 8, 9] {
            let g = build_colex(3, m).unwrap();
            let cert = solve_lagrangian(&g, &cfg()).unwrap();
            let x = cert.weighting_in_graph_labels();
            assert!(pair_balance_violation(&g, &x, 1e-10).unwrap() <= 1e-6);
        }
    }

    #[test]
    fn link_report_on_complete_graph() {
        let k4 = complete(3, 4).unwrap();
        let cert = solve_lagrangian(&k4, &cfg()).unwrap();
        let rows = link_stationarity_report(&k4, &cert, &cfg()).unwrap();
        assert_eq!(rows.len(), 4);
        for row in rows {
            assert!((row.link_weight - row.r_lambda).abs() < 1e-10);
            // link of a vertex in K4^3 is a triangle with Lagrangian 1/3
            assert!((row.r_link_lambda - 1.0).abs() < 1e-9);
        }
    }
}
