use laglab::bounds::{lambda2, principal_domain};
use laglab::hypergraph::{build_colex, colex_rank, colex_unrank, Edge, Hypergraph};
use laglab::oracle::{brute_lambda, DEFAULT_BUDGET};
use laglab::solver::{ascent_step, kkt_residual, solve_lagrangian, verify_certificate, SolverConfig};
use laglab::weighting::{gradient, is_legal, weight_poly};
use proptest::prelude::*;

/// An `r`-graph on `n <= 7` vertices from a bitmask over its possible edges.
fn hypergraph() -> impl Strategy<Value = Hypergraph> {
    (2u32..=4)
        .prop_flat_map(|r| (Just(r), r..=7u32))
        .prop_flat_map(|(r, n)| {
            let total = laglab::binom::binom(n as u64, r as u64).unwrap() as usize;
            (Just(r), Just(n), proptest::collection::vec(any::<bool>(), total))
        })
        .prop_map(|(r, n, mask)| {
            let edges = mask
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(k, _)| colex_unrank(r, k as u64 + 1).unwrap());
            Hypergraph::new(r, n, edges).unwrap()
        })
}

fn with_weighting() -> impl Strategy<Value = (Hypergraph, Vec<f64>)> {
    hypergraph().prop_flat_map(|g| {
        let n = g.n() as usize;
        (Just(g), proptest::collection::vec(0.001f64..1.0, n)).prop_map(|(g, raw)| {
            let s: f64 = raw.iter().sum();
            (g, raw.into_iter().map(|v| v / s).collect())
        })
    })
}

fn cfg() -> SolverConfig {
    SolverConfig::default().with_restarts(4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_unrank_roundtrip(r in 1u32..=6, k in 1u64..=1_000_000) {
        let e = colex_unrank(r, k).unwrap();
        prop_assert_eq!(e.len(), r as usize);
        prop_assert_eq!(colex_rank(&e), k);
    }

    #[test]
    fn unrank_is_colex_monotone(r in 2u32..=5, k in 1u64..=100_000) {
        prop_assert!(colex_unrank(r, k).unwrap() < colex_unrank(r, k + 1).unwrap());
    }

    #[test]
    fn compression_preserves_edge_count(g in hypergraph(), a in 0u32..7, b in 0u32..7) {
        let (i, j) = (1 + a.min(b) % g.n(), 1 + a.max(b) % g.n());
        prop_assume!(i < j);
        let c = g.compress(i, j).unwrap();
        prop_assert_eq!(c.m(), g.m());
        prop_assert_eq!(c.compress(i, j).unwrap(), c);
    }

    #[test]
    fn closure_is_idempotent_and_left_compressed(g in hypergraph()) {
        let c = g.left_compress_closure();
        prop_assert!(c.is_left_compressed());
        prop_assert_eq!(c.m(), g.m());
        prop_assert_eq!(c.left_compress_closure(), c);
    }

    #[test]
    fn euler_identity((g, x) in with_weighting()) {
        let w = weight_poly(&g, &x).unwrap();
        let lhs: f64 = gradient(&g, &x).unwrap().iter().zip(&x).map(|(d, v)| d * v).sum();
        prop_assert!((lhs - g.r() as f64 * w).abs() <= 1e-12);
    }

    #[test]
    fn glue_never_adds_edges(g in hypergraph(), pick in any::<prop::sample::Index>()) {
        let pairs = g.uncovered_pairs();
        prop_assume!(!pairs.is_empty());
        let (i, j) = pairs[pick.index(pairs.len())];
        let glued = g.glue(i, j).unwrap();
        prop_assert_eq!(glued.n(), g.n() - 1);
        prop_assert!(glued.m() <= g.m());
        // edges through exactly one of i, j merge only when their traces agree
        let through = |v: u32| -> std::collections::BTreeSet<Edge> {
            g.edges().filter(|e| e.contains(v)).map(|e| e.without(v)).collect()
        };
        let common = through(i).intersection(&through(j)).count();
        prop_assert_eq!(glued.m(), g.m() - common);
    }

    #[test]
    fn ascent_step_stays_on_simplex_and_climbs((g, x) in with_weighting()) {
        let before = weight_poly(&g, &x).unwrap();
        prop_assume!(before > 0.0);
        let y = ascent_step(&g, &x).unwrap();
        prop_assert!(is_legal(&y));
        prop_assert!(weight_poly(&g, &y).unwrap() >= before - 1e-15);
    }

    #[test]
    fn solver_certificates_verify(g in hypergraph()) {
        let cert = solve_lagrangian(&g, &cfg()).unwrap();
        prop_assert!(verify_certificate(&g, &cert, 1e-7).unwrap());
        let x = cert.weighting_in_graph_labels();
        prop_assert!(kkt_residual(&g, &x).unwrap() <= 1e-7);
        prop_assert!(cert.lambda + 1e-12 >= weight_poly(&g, &vec![1.0 / g.n() as f64; g.n() as usize]).unwrap());
    }
}

#[test]
fn colex_lambda_nondecreasing_and_jumping() {
    let cfg = SolverConfig::default();
    let lambdas: Vec<f64> = (1..=12)
        .map(|m| solve_lagrangian(&build_colex(3, m).unwrap(), &cfg).unwrap().lambda)
        .collect();
    for m in 1..12 {
        assert!(lambdas[m] >= lambdas[m - 1] - 1e-12, "m={}", m + 1);
    }
    for m in [8, 9, 10] {
        assert!(lambdas[m - 1] > lambdas[m - 2] + 1e-6, "no jump at m={m}");
    }
}

#[test]
fn graph_case_matches_closed_form() {
    let cfg = SolverConfig::default();
    for m in 1..=28 {
        let lambda = solve_lagrangian(&build_colex(2, m).unwrap(), &cfg).unwrap().lambda;
        assert!((lambda - lambda2(m).unwrap()).abs() < 1e-9, "m={m}");
    }
}

#[test]
fn principal_domain_prediction_matches_colex() {
    let cfg = SolverConfig::default();
    for r in 3..=4u32 {
        for m in 1..=15u64 {
            let info = principal_domain(r, m).unwrap();
            if let Some(p) = info.predicted_lambda {
                let lambda = solve_lagrangian(&build_colex(r, m).unwrap(), &cfg).unwrap().lambda;
                assert!((lambda - p).abs() < 1e-9, "r={r} m={m}: {lambda} vs {p}");
            }
        }
    }
}

#[test]
fn raising_the_vertex_cap_changes_nothing() {
    let cfg = SolverConfig::default();
    for m in [3u64, 5, 7] {
        let a = brute_lambda(3, m, 6, &cfg, DEFAULT_BUDGET).unwrap();
        let b = brute_lambda(3, m, 7, &cfg, DEFAULT_BUDGET).unwrap();
        assert!((a.lambda_r - b.lambda_r).abs() < 1e-9, "m={m}");
        assert!(a.witness.is_left_compressed() && a.witness.m() == m as usize);
    }
}
