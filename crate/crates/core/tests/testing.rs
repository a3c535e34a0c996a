use ising_hightemp::estimation::{
    mple_fit, mple_fit_zero_field, pseudo_log_likelihood, pseudo_log_likelihood_gradient,
    pseudo_log_likelihood_hessian, MpleOptions,
};
use ising_hightemp::rng::seeded;
use ising_hightemp::testing::{
    generate_departure, power_curve, run_test, DepartureSpec, StatisticSpec, TestOptions, Threshold, Verdict,
};
use ising_hightemp::{Graph, SpinConfig};
use rand::Rng;

#[test]
fn hessian_is_negative_semidefinite() {
    let g = Graph::grid(6, 6);
    let mut rng = seeded(31);
    for _ in 0..100 {
        let x = SpinConfig::random(36, &mut rng);
        let (h, t) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let m = pseudo_log_likelihood_hessian(&g, &x, h, t).unwrap();
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!(m[0][0] <= 0.0 && m[1][1] <= 0.0 && det >= -1e-9 * (m[0][0] * m[1][1]).abs());
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let g = Graph::grid(5, 4);
    let mut rng = seeded(32);
    for _ in 0..20 {
        let x = SpinConfig::random(20, &mut rng);
        let (h, t) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let grad = pseudo_log_likelihood_gradient(&g, &x, h, t).unwrap();
        let e = 1e-5;
        let pl = |a, b| pseudo_log_likelihood(&g, &x, a, b).unwrap();
        let fd = [(pl(h + e, t) - pl(h - e, t)) / (2.0 * e), (pl(h, t + e) - pl(h, t - e)) / (2.0 * e)];
        for i in 0..2 {
            assert!((grad[i] - fd[i]).abs() <= 1e-6 * grad[i].abs().max(1.0));
        }
    }
}

#[test]
fn converged_fits_are_stationary_and_flip_equivariant() {
    let g = Graph::grid(8, 8);
    let mut rng = seeded(33);
    let opts = MpleOptions::default();
    let mut converged = 0;
    for _ in 0..30 {
        let x = SpinConfig::random(64, &mut rng);
        let a = mple_fit(&g, &x, &opts).unwrap();
        let b = mple_fit(&g, &x.negated(), &opts).unwrap();
        assert_eq!(a.theta_hat.to_bits(), b.theta_hat.to_bits());
        assert_eq!(a.h_hat.to_bits(), (-b.h_hat).to_bits());
        if a.converged {
            converged += 1;
            let grad = pseudo_log_likelihood_gradient(&g, &x, a.h_hat, a.theta_hat).unwrap();
            assert!(grad[0].abs().max(grad[1].abs()) < 1e-8);
        }
        let z = mple_fit_zero_field(&g, &x, &opts).unwrap();
        assert_eq!(z.h_hat, 0.0);
    }
    assert!(converged > 20);
}

#[test]
fn departure_without_conversion_is_balanced() {
    let (w, h) = (5, 5);
    let draws = 10_000u64;
    let mut plus = vec![0u64; w * h];
    for seed in 0..draws {
        let x = generate_departure(&DepartureSpec { width: w, height: h, tau: 0.0, seed }).unwrap();
        for (v, &s) in x.as_slice().iter().enumerate() {
            plus[v] += (s == 1) as u64;
        }
    }
    let expected = draws as f64 / 2.0;
    let chi2: f64 = plus.iter().map(|&c| (c as f64 - expected).powi(2) / (draws as f64 / 4.0)).sum();
    // 99.9% quantile of chi-square with 25 degrees of freedom
    assert!(chi2 < 52.62, "chi-square {chi2}");
}

#[test]
fn conversions_raise_neighbour_agreement() {
    let g = Graph::grid(12, 12);
    let agreement = |tau: f64| {
        let mut agree = 0usize;
        for seed in 0..20 {
            let x = generate_departure(&DepartureSpec { width: 12, height: 12, tau, seed }).unwrap();
            agree += g.edges().filter(|&(u, v)| x[u] == x[v]).count();
        }
        agree as f64 / (20 * g.edge_count()) as f64
    };
    let (none, full) = (agreement(0.0), agreement(1.0));
    assert!((none - 0.5).abs() < 0.03, "{none}");
    assert!(full > none + 0.02, "{full} vs {none}");
}

#[test]
fn gate_precedence_holds_for_any_sample() {
    let g = Graph::grid(6, 6);
    for seed in 0..10 {
        let x = generate_departure(&DepartureSpec { width: 6, height: 6, tau: 0.3, seed }).unwrap();
        let opts = TestOptions {
            threshold: Threshold::Value(-1.0),
            zero_field: true,
            null_samples: 10,
            seed,
            ..TestOptions::default()
        };
        let r = run_test(&g, &x, &StatisticSpec::ZLocal, &opts).unwrap();
        if r.mple.theta_hat > -1.0 || r.mple.degenerate {
            assert!(r.gate_rejected && r.null_values.is_empty());
            assert_eq!(r.verdict, Verdict::Reject);
        }
    }
}

#[test]
fn reports_are_byte_reproducible() {
    let g = Graph::grid(6, 6);
    let x = generate_departure(&DepartureSpec { width: 6, height: 6, tau: 0.1, seed: 9 }).unwrap();
    let opts = TestOptions {
        null_samples: 25,
        zero_field: true,
        seed: 10,
        ..TestOptions::default()
    };
    let a = serde_json::to_vec(&run_test(&g, &x, &StatisticSpec::Zk(1), &opts).unwrap()).unwrap();
    let b = serde_json::to_vec(&run_test(&g, &x, &StatisticSpec::Zk(1), &opts).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn rejection_rates_do_not_fall_as_tau_grows() {
    let opts = TestOptions {
        null_samples: 20,
        zero_field: true,
        seed: 40,
        ..TestOptions::default()
    };
    let reps = 20;
    let rows = power_curve(8, 8, &[0.0, 0.2, 0.5, 1.0], reps, &StatisticSpec::ZLocal, &opts).unwrap();
    for w in rows.windows(2) {
        let (a, b) = (w[0].stat_reject_rate, w[1].stat_reject_rate);
        let sd = ((a * (1.0 - a) + b * (1.0 - b)) / reps as f64).sqrt().max(1.0 / reps as f64);
        assert!(b >= a - 3.0 * sd, "{rows:?}");
        assert!(w[1].gate_reject_rate >= w[0].gate_reject_rate - 3.0 * sd);
    }
}
