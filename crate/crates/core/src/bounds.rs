//! Closed-form values and bounds for `λ_r(m)`: the principal-domain prediction,
//! the graph case via clique numbers, and the smooth bound `m s^{-r}`.

use serde::Serialize;

use crate::binom::binom;
use crate::error::{invalid, Result};
use crate::hypergraph::Hypergraph;

/// Where `m` sits relative to the intervals `[C(t-1,r), C(t,r) - C(t-2,r-2)]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrincipalDomainInfo {
    pub r: u32,
    pub m: u64,
    pub t: Option<u32>,
    pub predicted_lambda: Option<f64>,
    /// `m = C(t,r) - C(t-2,r-2)`, the right end of the interval.
    pub is_critical: bool,
    /// `m = C(s,r)` for an integer `s`, i.e. `C_{r,m}` is a complete graph.
    pub is_principal_case: bool,
}

pub fn principal_domain(r: u32, m: u64) -> Result<PrincipalDomainInfo> {
    if r < 2 || m == 0 {
        return Err(invalid("principal_domain needs r >= 2 and m >= 1"));
    }
    let (r64, m128) = (r as u64, m as u128);
    let mut t = r + 1;
    let found = loop {
        let lo = binom(t as u64 - 1, r64)?;
        let hi = binom(t as u64, r64)? - binom(t as u64 - 2, r64 - 2)?;
        if m128 < lo {
            break None;
        }
        if m128 <= hi {
            break Some((t, m128 == hi));
        }
        t += 1;
    };
    let is_principal_case = complete_size(r, m)?.is_some();
    Ok(match found {
        Some((t, is_critical)) => PrincipalDomainInfo {
            r,
            m,
            t: Some(t),
            predicted_lambda: Some(predicted_lambda(r, t)?),
            is_critical,
            is_principal_case,
        },
        None => PrincipalDomainInfo {
            r,
            m,
            t: None,
            predicted_lambda: None,
            is_critical: false,
            is_principal_case,
        },
    })
}

/// The integer `s` with `C(s, r) = m`, if any.
pub fn complete_size(r: u32, m: u64) -> Result<Option<u32>> {
    let mut s = r;
    loop {
        let b = binom(s as u64, r as u64)?;
        match b.cmp(&(m as u128)) {
            std::cmp::Ordering::Less => s += 1,
            std::cmp::Ordering::Equal => return Ok(Some(s)),
            std::cmp::Ordering::Greater => return Ok(None),
        }
    }
}

/// `C(t-1, r) / (t-1)^r`, the Lagrangian of `K^r_{t-1}`.
pub fn predicted_lambda(r: u32, t: u32) -> Result<f64> {
    if t <= r {
        return Err(invalid(format!("predicted_lambda needs t > r, got r={r}, t={t}")));
    }
    let k = (t - 1) as f64;
    Ok(binom(t as u64 - 1, r as u64)? as f64 / k.powi(r as i32))
}

/// `λ_2(m) = (1 - 1/(t-1)) / 2` for the `t` with `C(t-1,2) <= m < C(t,2)`.
pub fn lambda2(m: u64) -> Result<f64> {
    if m == 0 {
        return Err(invalid("lambda2 needs m >= 1"));
    }
    let mut t = 3u64;
    while binom(t, 2)? <= m as u128 {
        t += 1;
    }
    Ok(0.5 * (1.0 - 1.0 / (t - 1) as f64))
}

/// Maximum clique size of a 2-graph with at most 24 vertices.
pub fn clique_number(g: &Hypergraph) -> Result<u32> {
    if g.r() != 2 {
        return Err(invalid("clique number needs a 2-uniform graph"));
    }
    let n = g.n() as usize;
    if n > 24 {
        return Err(invalid(format!("exact clique search is limited to 24 vertices, got {n}")));
    }
    let mut adj = vec![0u32; n];
    for e in g.edges() {
        let (a, b) = (e.vertices()[0] as usize - 1, e.vertices()[1] as usize - 1);
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    let mut best = 0;
    let all = if n == 0 { 0 } else { u32::MAX >> (32 - n) };
    expand(&adj, 0, all, &mut best);
    Ok(best)
}

fn expand(adj: &[u32], size: u32, mut candidates: u32, best: &mut u32) {
    if candidates == 0 {
        *best = (*best).max(size);
        return;
    }
    while candidates != 0 {
        if size + candidates.count_ones() <= *best {
            return;
        }
        let v = candidates.trailing_zeros() as usize;
        candidates &= !(1 << v);
        expand(adj, size + 1, candidates & adj[v], best);
    }
}

/// `(1 - 1/ω) / 2`; the edgeless graph gives 0.
pub fn motzkin_straus(g: &Hypergraph) -> Result<f64> {
    let omega = clique_number(g)?;
    if omega == 0 {
        return Ok(0.0);
    }
    Ok(0.5 * (1.0 - 1.0 / omega as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothBound {
    /// Real `s >= r - 1` with `s (s-1) ... (s-r+1) / r! = m`.
    pub s: f64,
    /// `m s^{-r}`.
    pub bound: f64,
    /// Set when `s` is an integer, the only case where the bound can be attained.
    pub equality: bool,
}

fn falling_over_factorial(s: f64, r: u32) -> f64 {
    (0..r).map(|k| (s - k as f64) / (k + 1) as f64).product()
}

pub fn smooth_bound(r: u32, m: u64) -> Result<SmoothBound> {
    if r < 2 || m == 0 {
        return Err(invalid("smooth_bound needs r >= 2 and m >= 1"));
    }
    let target = m as f64;
    let (mut lo, mut hi) = ((r - 1) as f64, (r as u64 + m) as f64);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if falling_over_factorial(mid, r) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut s = 0.5 * (lo + hi);
    let rounded = s.round();
    let equality = (s - rounded).abs() <= 1e-9
        && binom(rounded as u64, r as u64)? == m as u128;
    if equality {
        s = rounded;
    }
    Ok(SmoothBound {
        s,
        bound: target / s.powi(r as i32),
        equality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::complete;

    #[test]
    fn principal_domain_examples() {
        let p = principal_domain(3, 5).unwrap();
        assert_eq!(p.t, Some(5));
        assert!((p.predicted_lambda.unwrap() - 0.0625).abs() < 1e-15);
        assert!(!p.is_critical);
        let p = principal_domain(3, 8).unwrap();
        assert_eq!(p.t, None);
        assert_eq!(p.predicted_lambda, None);
        let p = principal_domain(3, 7).unwrap();
        assert_eq!(p.t, Some(5));
        assert!(p.is_critical);
        assert!(principal_domain(3, 4).unwrap().is_principal_case);
        assert!(principal_domain(3, 10).unwrap().is_principal_case);
        assert!(!principal_domain(3, 9).unwrap().is_principal_case);
    }

    #[test]
    fn principal_domain_membership_matches_brute_force() {
        for r in 2..=5u32 {
            for m in 1..=400u64 {
                let mut hits = Vec::new();
                for t in r + 1..40 {
                    let lo = binom(t as u64 - 1, r as u64).unwrap();
                    let hi = binom(t as u64, r as u64).unwrap()
                        - binom(t as u64 - 2, r as u64 - 2).unwrap();
                    if lo <= m as u128 && m as u128 <= hi {
                        hits.push(t);
                    }
                }
                assert!(hits.len() <= 1);
                assert_eq!(principal_domain(r, m).unwrap().t, hits.first().copied());
            }
        }
    }

    #[test]
    fn predicted_examples() {
        assert!((predicted_lambda(3, 5).unwrap() - 0.0625).abs() < 1e-15);
        assert!((predicted_lambda(4, 6).unwrap() - 0.008).abs() < 1e-15);
        assert!((predicted_lambda(2, 4).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(predicted_lambda(3, 3).is_err());
    }

    #[test]
    fn lambda2_examples() {
        assert!((lambda2(3).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((lambda2(1).unwrap() - 0.25).abs() < 1e-15);
        assert!((lambda2(6).unwrap() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn lambda2_agrees_with_prediction_on_principal_domain() {
        for m in 1..200u64 {
            let p = principal_domain(2, m).unwrap();
            let t = p.t.expect("every m is in some interval when r = 2");
            assert!((lambda2(m).unwrap() - predicted_lambda(2, t).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn motzkin_straus_examples() {
        assert!((motzkin_straus(&complete(2, 3).unwrap()).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        let c5 = Hypergraph::from_lists(2, 5, &[&[1, 2], &[2, 3], &[3, 4], &[4, 5], &[1, 5]])
            .unwrap();
        assert_eq!(clique_number(&c5).unwrap(), 2);
        assert!((motzkin_straus(&c5).unwrap() - 0.25).abs() < 1e-15);
        let empty = Hypergraph::empty(2, 4).unwrap();
        assert_eq!(clique_number(&empty).unwrap(), 1);
        assert_eq!(motzkin_straus(&empty).unwrap(), 0.0);
        assert!(motzkin_straus(&complete(3, 4).unwrap()).is_err());
        assert_eq!(clique_number(&complete(2, 24).unwrap()).unwrap(), 24);
    }

    #[test]
    fn smooth_bound_examples() {
        let b = smooth_bound(3, 4).unwrap();
        assert_eq!(b.s, 4.0);
        assert!((b.bound - 0.0625).abs() < 1e-15);
        assert!(b.equality);
        // root of s(s-1)(s-2) = 30, frozen from a 40-digit root find
        let b = smooth_bound(3, 5).unwrap();
        assert!((b.s - 4.214_467_950_346_843).abs() < 1e-13);
        assert!((b.bound - 0.066_794_659_115_413_72).abs() < 1e-15);
        assert!(!b.equality);
        let b = smooth_bound(2, 1).unwrap();
        assert_eq!(b.s, 2.0);
        assert!((b.bound - 0.25).abs() < 1e-15);
        assert!(b.equality);
    }

    #[test]
    fn smooth_s_strictly_increasing() {
        for r in 2..=5 {
            let mut prev = f64::NEG_INFINITY;
            for m in 1..=500 {
                let s = smooth_bound(r, m).unwrap().s;
                assert!(s > prev);
                prev = s;
            }
        }
    }

    #[test]
    fn smooth_bound_dominates_prediction() {
        for r in 3..=5u32 {
            for t in r + 1..=12 {
                let lo = binom(t as u64 - 1, r as u64).unwrap() as u64;
                let hi = (binom(t as u64, r as u64).unwrap()
                    - binom(t as u64 - 2, r as u64 - 2).unwrap()) as u64;
                let predicted = predicted_lambda(r, t).unwrap();
                for m in lo..=hi {
                    assert!(smooth_bound(r, m).unwrap().bound >= predicted - 1e-15);
                }
            }
        }
    }
}
