use entest_core::estimators::*;
use entest_core::special_fn::*;
use proptest::prelude::*;

fn counts_strategy() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..30, 1..8).prop_filter("N >= 1", |c| c.iter().sum::<u64>() > 0)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn zero_boxes_are_transparent(
        counts in counts_strategy(),
        extra in 1usize..4,
        junk in 0.0f64..50.0,
        a in 0.0f64..1.5,
    ) {
        let mut padded = counts.clone();
        padded.extend(std::iter::repeat_n(0, extra));
        let base = CountVector::new(counts.clone()).unwrap();
        let more = CountVector::new(padded).unwrap();
        let pa = ParamVector::uniform(counts.len(), a).unwrap();
        let mut qa = pa.values().to_vec();
        qa.extend(std::iter::repeat_n(junk, extra));
        let qa = ParamVector::new(qa).unwrap();
        for regime in [Regime::Poisson, Regime::Binomial] {
            let x = schuermann_entropy(&base, &pa, regime).unwrap().value_nats;
            let y = schuermann_entropy(&more, &qa, regime).unwrap().value_nats;
            prop_assert_eq!(x, y);
        }
        prop_assert_eq!(naive_entropy(&base).value_nats, naive_entropy(&more).value_nats);
    }

    #[test]
    fn permutation_equivariance(
        counts in counts_strategy(),
        a in prop::collection::vec(0.0f64..1.5, 8),
        shift in 0usize..8,
    ) {
        let m = counts.len();
        let a = &a[..m];
        let rot = |v: &[u64]| { let mut w = v.to_vec(); w.rotate_left(shift % m); w };
        let rota = |v: &[f64]| { let mut w = v.to_vec(); w.rotate_left(shift % m); w };
        let c1 = CountVector::new(counts.clone()).unwrap();
        let c2 = CountVector::new(rot(&counts)).unwrap();
        let p1 = ParamVector::new(a.to_vec()).unwrap();
        let p2 = ParamVector::new(rota(a)).unwrap();
        let x = schuermann_entropy(&c1, &p1, Regime::Binomial).unwrap().value_nats;
        let y = schuermann_entropy(&c2, &p2, Regime::Binomial).unwrap().value_nats;
        prop_assert!(close(x, y, 1e-13), "{} vs {}", x, y);
    }

    #[test]
    fn reduction_chain(counts in counts_strategy()) {
        let c = CountVector::new(counts.clone()).unwrap();
        let ones = ParamVector::uniform(counts.len(), 1.0).unwrap();
        let bin = schuermann_entropy(&c, &ones, Regime::Binomial).unwrap().value_nats;
        let psi = grassberger_entropy(&c, LeadingTerm::PsiN).unwrap().value_nats;
        prop_assert_eq!(bin, psi);
        let poi = schuermann_entropy(&c, &ones, Regime::Poisson).unwrap().value_nats;
        let logn = grassberger_entropy(&c, LeadingTerm::LogN).unwrap().value_nats;
        prop_assert_eq!(poi, logn);
        let phi = phi_entropy(&c, |n| (n as f64).ln()).unwrap().value_nats;
        prop_assert_eq!(phi, naive_entropy(&c).value_nats);
    }

    #[test]
    fn regime_gap_is_leading_term_difference(counts in counts_strategy(), a in 0.0f64..1.0) {
        let c = CountVector::new(counts.clone()).unwrap();
        let p = ParamVector::uniform(counts.len(), a).unwrap();
        let gap = schuermann_entropy(&c, &p, Regime::Poisson).unwrap().value_nats
            - schuermann_entropy(&c, &p, Regime::Binomial).unwrap().value_nats;
        let n = c.total();
        let want = (n as f64).ln() - digamma(n).unwrap();
        prop_assert!((gap - want).abs() < 1e-12, "{} vs {}", gap, want);
    }

    #[test]
    fn naive_is_bounded_by_log_boxes(counts in counts_strategy()) {
        let c = CountVector::new(counts.clone()).unwrap();
        let h = naive_entropy(&c).value_nats;
        prop_assert!(h >= -1e-15);
        prop_assert!(h <= (counts.len() as f64).ln() + 1e-12);
    }

    #[test]
    fn digamma_recurrence(n in 1u64..5_000_000) {
        let lhs = digamma(n + 1).unwrap();
        let rhs = digamma(n).unwrap() + 1.0 / n as f64;
        prop_assert!((lhs - rhs).abs() <= 1e-14 * lhs.abs().max(1.0));
    }

    #[test]
    fn g_matches_closed_form(n in 1u64..30, a in 0.0f64..2.0) {
        let mut want = -(1.0 + a).ln();
        for k in 1..n {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            want += sign * a.powi(k as i32) / k as f64;
        }
        let got = g_signed(n, a).unwrap();
        prop_assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
    }

    #[test]
    fn big_g_step_identity(n in 1u64..200, a in 0.0f64..1.0) {
        // G_{n+1}(a) − G_n(a) = 1/n + (−1)^{n+1} a^n / n
        let step = big_g_a(n + 1, a).unwrap() - big_g_a(n, a).unwrap();
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        let want = (1.0 + sign * a.powi(n as i32)) / n as f64;
        prop_assert!((step - want).abs() < 1e-12);
    }

    #[test]
    fn e1_bounds(x in 1e-6f64..50.0) {
        let e1 = exp_integral_e1(x).unwrap();
        prop_assert!(e1 > 0.0);
        // e^{-x}/2 ln(1 + 2/x) < E_1(x) < e^{-x} ln(1 + 1/x)
        prop_assert!(e1 < (-x).exp() * (1.0 + 1.0 / x).ln() * (1.0 + 1e-14));
        prop_assert!(e1 > 0.5 * (-x).exp() * (1.0 + 2.0 / x).ln() * (1.0 - 1e-14));
        if x >= 0.44 {
            prop_assert!(e1 < (-x).exp());
        }
    }
}
