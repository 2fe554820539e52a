//! Seeded random instances for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::binom::binom;
use crate::hypergraph::{colex_unrank, Hypergraph};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Each `r`-subset of `[n]` is an edge independently with probability `p`.
pub fn random_hypergraph<R: Rng + ?Sized>(rng: &mut R, r: u32, n: u32, p: f64) -> Hypergraph {
    let total = binom(n as u64, r as u64).expect("small parameters") as u64;
    let edges = (1..=total)
        .filter(|_| rng.random_bool(p))
        .map(|k| colex_unrank(r, k).expect("valid rank"));
    Hypergraph::new(r, n, edges).expect("ranks are distinct and inside [n]")
}

/// A Dirichlet(1) point of the simplex.
pub fn random_weighting<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    x
}
