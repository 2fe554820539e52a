//! Points of the standard simplex and the weight polynomial
//! `w(G, x) = sum over edges e of prod_{v in e} x_v`.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hypergraph::Hypergraph;

/// Allowed deviation of the coordinate sum from 1 for a legal weighting.
pub const SUM_TOL: f64 = 1e-12;
/// Inputs whose sum is off by at most this much are renormalized instead of rejected.
pub const RENORMALIZE_TOL: f64 = 1e-9;
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;

/// A legal weighting: non-negative coordinates summing to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Weighting(Vec<f64>);

impl Weighting {
    pub fn new(mut x: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(invalid("a weighting needs at least one coordinate"));
        }
        if let Some(bad) = x.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(invalid(format!("weighting has an illegal coordinate {bad}")));
        }
        let sum: f64 = x.iter().sum();
        if (sum - 1.0).abs() > RENORMALIZE_TOL {
            return Err(invalid(format!("weighting sums to {sum}, not 1")));
        }
        if (sum - 1.0).abs() > 0.0 {
            x.iter_mut().for_each(|v| *v /= sum);
        }
        Ok(Weighting(x))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("uniform weighting needs n >= 1"));
        }
        Ok(Weighting(vec![1.0 / n as f64; n]))
    }

    /// Uniform on the given 1-based vertices, zero elsewhere.
    pub fn uniform_on(n: usize, vertices: &[u32]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(invalid("uniform_on needs a non-empty vertex set"));
        }
        let mut x = vec![0.0; n];
        for &v in vertices {
            if v == 0 || v as usize > n {
                return Err(invalid(format!("vertex {v} is outside [{n}]")));
            }
            x[v as usize - 1] = 1.0 / vertices.len() as f64;
        }
        Weighting::new(x)
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// 1-based indices of coordinates above `zero_tol`.
    pub fn support(&self, zero_tol: f64) -> Vec<u32> {
        support(&self.0, zero_tol)
    }
}

impl Deref for Weighting {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Weighting {
    type Error = crate::error::Error;

    fn try_from(x: Vec<f64>) -> Result<Self> {
        Weighting::new(x)
    }
}

impl From<Weighting> for Vec<f64> {
    fn from(w: Weighting) -> Vec<f64> {
        w.0
    }
}

pub fn is_legal(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite() && *v >= 0.0) && (x.iter().sum::<f64>() - 1.0).abs() <= SUM_TOL
}

pub fn support(x: &[f64], zero_tol: f64) -> Vec<u32> {
    x.iter()
        .enumerate()
        .filter(|(_, v)| **v > zero_tol)
        .map(|(i, _)| i as u32 + 1)
        .collect()
}

fn check_len(g: &Hypergraph, x: &[f64]) -> Result<()> {
    if x.len() < g.n() as usize {
        return Err(invalid(format!(
            "weighting has {} coordinates but the hypergraph has {} vertices",
            x.len(),
            g.n()
        )));
    }
    Ok(())
}

#[inline]
fn monomial(vertices: &[u32], x: &[f64]) -> f64 {
    vertices.iter().map(|&v| x[v as usize - 1]).product()
}

/// `w(G, x)`.
pub fn weight_poly(g: &Hypergraph, x: &[f64]) -> Result<f64> {
    check_len(g, x)?;
    Ok(g.edges().map(|e| monomial(e.vertices(), x)).sum())
}

/// `w(G_i, x)`, the weight of the link of `i`; equals `dw/dx_i`.
pub fn partial(g: &Hypergraph, x: &[f64], i: u32) -> Result<f64> {
    check_len(g, x)?;
    if i == 0 || i > g.n() {
        return Err(invalid(format!("vertex {i} is outside [{}]", g.n())));
    }
    Ok(g.edges()
        .filter(|e| e.contains(i))
        .map(|e| {
            e.vertices()
                .iter()
                .filter(|&&v| v != i)
                .map(|&v| x[v as usize - 1])
                .product::<f64>()
        })
        .sum())
}

/// All partials `dw/dx_i` for `i` in `[n]`, indexed from 0.
pub fn gradient(g: &Hypergraph, x: &[f64]) -> Result<Vec<f64>> {
    check_len(g, x)?;
    let mut grad = vec![0.0; g.n() as usize];
    for e in g.edges() {
        let vs = e.vertices();
        for (k, &v) in vs.iter().enumerate() {
            let mut prod = 1.0;
            for (l, &u) in vs.iter().enumerate() {
                if l != k {
                    prod *= x[u as usize - 1];
                }
            }
            grad[v as usize - 1] += prod;
        }
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{build_colex, complete};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn weight_poly_examples() {
        let one = Hypergraph::from_lists(3, 3, &[&[1, 2, 3]]).unwrap();
        let third = vec![1.0 / 3.0; 3];
        assert!(close(weight_poly(&one, &third).unwrap(), 1.0 / 27.0, 1e-15));
        let k4 = complete(3, 4).unwrap();
        assert!(close(weight_poly(&k4, &[0.25; 4]).unwrap(), 0.0625, 1e-15));
        let empty = Hypergraph::empty(3, 4).unwrap();
        assert_eq!(weight_poly(&empty, &[0.25; 4]).unwrap(), 0.0);
        assert!(weight_poly(&k4, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn partial_examples() {
        let k4 = complete(3, 4).unwrap();
        assert!(close(partial(&k4, &[0.25; 4], 1).unwrap(), 0.1875, 1e-15));
        let one = Hypergraph::from_lists(3, 4, &[&[1, 2, 3]]).unwrap();
        let x = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0];
        assert_eq!(partial(&one, &x, 4).unwrap(), 0.0);
        let c35 = build_colex(3, 5).unwrap();
        assert!(close(partial(&c35, &[0.2; 5], 5).unwrap(), 0.04, 1e-15));
    }

    #[test]
    fn gradient_matches_partials() {
        let c = build_colex(3, 7).unwrap();
        let x = [0.3, 0.25, 0.2, 0.15, 0.1, 0.0];
        let grad = gradient(&c, &x).unwrap();
        for i in 1..=c.n() {
            assert!(close(grad[i as usize - 1], partial(&c, &x, i).unwrap(), 1e-15));
        }
    }

    #[test]
    fn partial_is_a_derivative() {
        let c = build_colex(3, 8).unwrap();
        let x = [0.3, 0.25, 0.2, 0.15, 0.06, 0.04];
        let h = 1e-6;
        for i in 0..c.n() as usize {
            let mut up = x;
            let mut dn = x;
            up[i] += h;
            dn[i] -= h;
            let fd = (weight_poly(&c, &up).unwrap() - weight_poly(&c, &dn).unwrap()) / (2.0 * h);
            assert!(close(fd, partial(&c, &x, i as u32 + 1).unwrap(), 1e-9));
        }
    }

    #[test]
    fn simplex_helpers() {
        assert_eq!(Weighting::uniform(4).unwrap().to_vec(), vec![0.25; 4]);
        assert!(!is_legal(&[0.5, 0.6]));
        assert!(is_legal(&[0.5, 0.5]));
        assert_eq!(support(&[0.5, 0.5, 1e-15], 1e-12), vec![1, 2]);
        assert!(Weighting::new(vec![0.5, 0.6]).is_err());
        assert!(Weighting::new(vec![1.5, -0.5]).is_err());
        let w = Weighting::new(vec![0.5, 0.5 + 5e-10]).unwrap();
        assert!(is_legal(&w));
        assert_eq!(
            Weighting::uniform_on(4, &[2, 4]).unwrap().to_vec(),
            vec![0.0, 0.5, 0.0, 0.5]
        );
    }

    #[test]
    fn weighting_json_roundtrip_rejects_illegal() {
        let w: Weighting = serde_json::from_str("[0.25, 0.75]").unwrap();
        assert_eq!(w.to_vec(), vec![0.25, 0.75]);
        assert!(serde_json::from_str::<Weighting>("[0.25, 0.8]").is_err());
    }
}
