use entest_core::estimators::{EstimatorConfig, LeadingTerm, ParamVector, Regime};
use entest_core::exact_oracle::*;
use entest_core::experiments::mc_estimate;
use entest_core::sampling::SeedSpec;

fn sch(a: &[f64]) -> EstimatorConfig {
    EstimatorConfig::Schuermann {
        a: ParamVector::new(a.to_vec()).unwrap(),
        regime: Regime::Binomial,
    }
}

#[test]
fn closed_form_bias_matches_enumeration() {
    let dists = [
        vec![0.5, 0.5],
        vec![0.75, 0.25],
        vec![0.9, 0.1],
        vec![0.625, 0.25, 0.125],
        vec![0.4, 0.3, 0.2, 0.1],
    ];
    for p in dists {
        let d = Distribution::new(p.clone()).unwrap();
        let opt = optimal_params(&d);
        for n in [1u64, 2, 3, 5, 8, 13] {
            for scale in [0.0, 0.5, 1.0] {
                let a: Vec<f64> = opt.values().iter().map(|v| v * scale).collect();
                let a = ParamVector::new(a).unwrap();
                let closed = exact_estimator_bias(&d, n, &a).unwrap();
                let est = EstimatorConfig::Schuermann {
                    a: a.clone(),
                    regime: Regime::Binomial,
                };
                let brute = enumerate_moments(&d, n, &est).unwrap().bias_nats;
                assert!(
                    (closed - brute).abs() < 1e-11,
                    "p={p:?} n={n} scale={scale}: {closed} vs {brute}"
                );
            }
        }
    }
}

#[test]
fn optimal_parameters_remove_bias() {
    for p in [vec![0.75, 0.25], vec![0.1, 0.2, 0.7], vec![0.25; 4]] {
        let d = Distribution::new(p).unwrap();
        let a = optimal_params(&d);
        for n in [2u64, 4, 9] {
            let r = enumerate_moments(&d, n, &sch(a.values())).unwrap();
            assert!(r.bias_nats.abs() < 1e-12, "n={n}: {}", r.bias_nats);
        }
    }
}

#[test]
fn smaller_parameters_bias_downwards() {
    let d = Distribution::new(vec![0.75, 0.25]).unwrap();
    let mut last = f64::NEG_INFINITY;
    for a1 in [0.0, 0.5, 1.0, 2.0, 3.0] {
        let b =
            exact_estimator_bias(&d, 4, &ParamVector::new(vec![1.0 / 3.0, a1]).unwrap()).unwrap();
        assert!(b <= 1e-15, "a1={a1}: {b}");
        assert!(b >= last);
        last = b;
    }
}

#[test]
fn bias_ordering_at_hundred_draws() {
    let d = Distribution::new(vec![0.75, 0.25]).unwrap();
    let h = exact_entropy(&d);
    let naive = enumerate_moments(&d, 100, &EstimatorConfig::Naive).unwrap();
    let grass = enumerate_moments(
        &d,
        100,
        &EstimatorConfig::Grassberger {
            leading_term: LeadingTerm::PsiN,
        },
    )
    .unwrap();
    assert!(naive.mean_nats < grass.mean_nats);
    // Both boxes are far past the bias-free point at N = 100, so the
    // residual bias is far below round-off.
    assert!(grass.mean_nats <= h + 1e-12);
    assert!(grass.bias_nats.abs() < 1e-12);

    let seed = SeedSpec::new(77, 0);
    let mc_naive = mc_estimate(&d, 100, &EstimatorConfig::Naive, 50_000, seed).unwrap();
    let mc_grass = mc_estimate(
        &d,
        100,
        &EstimatorConfig::Grassberger {
            leading_term: LeadingTerm::PsiN,
        },
        50_000,
        seed,
    )
    .unwrap();
    assert!(mc_naive.mean_bits < mc_grass.mean_bits);
}

#[test]
fn poisson_terms_match_large_n_expectations() {
    for (z, a) in [(0.5, 1.0), (2.0, 0.5)] {
        let poisson = poisson_bias_term(z, a).unwrap();
        let binom = expectation_ng(z, 20_000, a).unwrap();
        let brute = binomial_expectation(
            |n| {
                if n == 0 {
                    0.0
                } else {
                    n as f64 * entest_core::special_fn::big_g_a(n, a).unwrap()
                }
            },
            z,
            20_000,
        )
        .unwrap();
        assert!(
            (binom - brute).abs() < 1e-10,
            "z={z} a={a}: {binom} vs {brute}"
        );
        let limit =
            z * z.ln() + z * entest_core::special_fn::exp_integral_e1((1.0 + a) * z).unwrap();
        assert!((binom - limit).abs() < 1e-4, "z={z} a={a}");
        assert!(poisson.is_finite());
    }
}

#[test]
fn variance_grows_along_the_parameter_path() {
    let d = Distribution::new(vec![0.75, 0.25]).unwrap();
    let mut last = 0.0;
    for a1 in [1.0, 1.2, 1.4, 1.6, 2.0] {
        let v = enumerate_moments(&d, 100, &sch(&[1.0 / 3.0, a1]))
            .unwrap()
            .variance_nats2;
        assert!(v >= last, "a1={a1}");
        last = v;
    }
}
