use proptest::prelude::*;
use renergy::eisenstein::EisensteinConfig;
use renergy::energy::lower_bound_1d;
use renergy::expectations::{expectation_limit_2d, finite_window_expectation_2d, ClusterFunction};
use renergy::montecarlo::*;
use renergy::samplers::{sample_gaf_zeros, sample_ginibre, McmcConfig, Process, SamplerSpec};
use renergy::specfun::{digamma, trigamma, EULER_GAMMA};
use renergy::Error;

fn circular(n: usize, beta: f64) -> SamplerSpec {
    SamplerSpec { process: Process::CircularBeta { beta }, window: n as f64, seed: 0 }
}

#[test]
fn selberg_two_particles() {
    // E log|2 sin(φ/2)| under the density ∝ 4 sin²(φ/2) is 1/2.
    let m = selberg_mean(2, 2.0).unwrap();
    assert!((m - (std::f64::consts::LN_2 - 0.5)).abs() < 1e-14);
}

#[test]
fn selberg_large_n_limits() {
    let n = 1000;
    for (beta, limit) in [
        (1.0, 2.0 - EULER_GAMMA - std::f64::consts::LN_2),
        (2.0, 1.0 - EULER_GAMMA),
        (4.0, 1.5 - EULER_GAMMA - std::f64::consts::LN_2),
    ] {
        assert!((selberg_mean(n, beta).unwrap() - limit).abs() < 1e-3, "beta {beta}");
        let u = digamma(1.0 + beta / 2.0).unwrap() - (beta / 2.0).ln();
        assert!((u_beta(beta).unwrap() - limit).abs() < 1e-12);
        assert!((u - limit).abs() < 1e-12);
        let nv = n as f64 * selberg_variance(n, beta).unwrap();
        assert!((nv - v_beta(beta).unwrap()).abs() < 5e-3, "beta {beta}: {nv}");
        let v = 2.0 / beta - trigamma(1.0 + beta / 2.0).unwrap();
        assert!((v - v_beta(beta).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn selberg_variance_positive_and_decaying() {
    for beta in [0.25, 0.5, 1.0, 2.0, 4.0, 10.0] {
        // Small β is not monotone in n at the very start, so compare from n = 8.
        let mut prev = f64::INFINITY;
        for n in [2, 3, 4, 5, 8, 16, 64, 256, 1024] {
            let v = selberg_variance(n, beta).unwrap();
            assert!(v > 0.0, "beta {beta}, n {n}");
            if n >= 8 {
                assert!(v < prev, "beta {beta}, n {n}");
                prev = v;
            }
        }
        assert!(selberg_variance(1 << 16, beta).unwrap() < 1e-3);
    }
}

#[test]
fn cumulants_match_finite_differences() {
    // Richardson-extrapolated central differences of the closed-form CGF.
    for n in [2usize, 16, 32, 100] {
        for beta in [0.5, 1.0, 2.0, 4.0, 8.0] {
            let k = |s: f64| selberg_cgf(n, beta, s).unwrap();
            let d1 = |h: f64| (k(h) - k(-h)) / (2.0 * h);
            let d2 = |h: f64| (k(h) - 2.0 * k(0.0) + k(-h)) / (h * h);
            let h = 1e-2 * beta;
            let m = (4.0 * d1(h / 2.0) - d1(h)) / 3.0;
            let v = (4.0 * d2(h / 2.0) - d2(h)) / 3.0;
            let mean = selberg_mean(n, beta).unwrap();
            let var = selberg_variance(n, beta).unwrap();
            assert!((m - mean).abs() < 1e-8, "mean n={n} beta={beta}: {m} vs {mean}");
            assert!((v - var).abs() < 1e-6 * var.max(1.0), "var n={n} beta={beta}: {v} vs {var}");
            assert!(k(0.0).abs() < 1e-12);
        }
    }
}

#[test]
fn third_cumulant_matches_differences() {
    for (n, beta) in [(16usize, 2.0), (64, 1.0), (8, 4.0)] {
        let k = |s: f64| selberg_cgf(n, beta, s).unwrap();
        let h = 2e-2;
        let d3 = (k(2.0 * h) - 2.0 * k(h) + 2.0 * k(-h) - k(-2.0 * h)) / (2.0 * h * h * h);
        let k3 = selberg_third_cumulant(n, beta).unwrap();
        assert!((d3 - k3).abs() < 1e-3 * k3.abs().max(1e-3), "{d3} vs {k3}");
    }
}

#[test]
fn u_v_reference_values() {
    assert!((u_beta(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-14);
    assert!((v_beta(2.0).unwrap() - (2.0 - std::f64::consts::PI.powi(2) / 6.0)).abs() < 1e-13);
    assert!(u_beta(0.0).is_err());
    assert!(selberg_mean(1, 2.0).is_err());
}

#[test]
fn lattice_run_is_degenerate() {
    let spec = SamplerSpec { process: Process::Lattice, window: 64.0, seed: 0 };
    let r = run_mc(&spec, &McmcConfig::default(), 200, 1).unwrap();
    assert!(r.mean.abs() < 1e-12);
    assert_eq!(r.variance, 0.0);
    assert_eq!(r.std_error, 0.0);
    assert!(matches!(clt_probe(&spec, &McmcConfig::default(), 10_000, 1), Err(Error::Degenerate(_))));
}

#[test]
fn replica_floor() {
    let e = run_mc(&circular(8, 2.0), &McmcConfig::default(), 99, 1);
    assert!(matches!(e, Err(Error::InvalidConfig(_))));
    let e = clt_probe(&circular(8, 2.0), &McmcConfig::default(), 5_000, 1);
    assert!(matches!(e, Err(Error::InvalidConfig(_))));
}

#[test]
fn circular_n16_matches_selberg() {
    let (r, samples) = run_mc_with_samples(&circular(16, 2.0), &McmcConfig::default(), 20_000, 5).unwrap();
    assert!(r.converged);
    assert!(r.effective_samples >= 5_000.0, "ESS {}", r.effective_samples);
    let m = selberg_mean(16, 2.0).unwrap();
    let v = selberg_variance(16, 2.0).unwrap();
    assert!((r.mean - m).abs() < 3.0 * r.std_error, "{} vs {m} ± {}", r.mean, r.std_error);
    assert!((r.variance / v - 1.0).abs() < 0.15, "{} vs {v}", r.variance);
    assert!((r.std_error - (r.variance / r.effective_samples).sqrt()).abs() < 1e-15);
    let floor = lower_bound_1d(16, 16.0).unwrap();
    assert!(samples.iter().all(|&w| w >= floor - 1e-9));
}

#[test]
fn variance_ratio_tracks_selberg() {
    let mcmc = McmcConfig::default();
    let a = run_mc(&circular(16, 2.0), &mcmc, 8_000, 11).unwrap();
    let b = run_mc(&circular(32, 2.0), &mcmc, 8_000, 12).unwrap();
    let exact = selberg_variance(32, 2.0).unwrap() / selberg_variance(16, 2.0).unwrap();
    let ratio = b.variance / a.variance;
    assert!((ratio / exact - 1.0).abs() < 0.15, "{ratio} vs {exact}");
}

#[test]
fn thread_count_does_not_change_results() {
    let run = |threads: usize, spec: SamplerSpec| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_mc_with_samples(&spec, &McmcConfig::default(), 400, 21).unwrap().1)
    };
    for spec in [
        circular(12, 1.0),
        SamplerSpec { process: Process::Poisson { dimension: 1 }, window: 30.0, seed: 0 },
    ] {
        let a = run(1, spec);
        let b = run(3, spec);
        assert_eq!(a.len(), b.len());
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}

#[test]
fn clt_probe_is_near_normal() {
    let p = clt_probe(&circular(32, 2.0), &McmcConfig::default(), 40_000, 3).unwrap();
    assert!(p.effective_samples >= 10_000.0);
    assert!(p.normality_distance < 0.04, "{}", p.normality_distance);
    assert!(p.skewness.abs() < 1.0);
}

fn within_oracle(mean: f64, se: f64, oracle: f64) -> bool {
    (mean - oracle).abs() <= 4.0 * se + 0.01
}

#[test]
fn ginibre_matches_finite_window_oracle() {
    let spec = SamplerSpec { process: Process::Ginibre { matrix_dim: 64 }, window: 1.0, seed: 0 };
    let r = run_mc(&spec, &McmcConfig::default(), 200, 8).unwrap();
    let side = sample_ginibre(64, 0).unwrap().window;
    let cf = ClusterFunction::ginibre();
    let oracle = finite_window_expectation_2d(&cf, side, &EisensteinConfig::default()).unwrap();
    assert!(within_oracle(r.mean, r.std_error, oracle), "{} ± {} vs {oracle}", r.mean, r.std_error);
    let limit = expectation_limit_2d(&cf).unwrap().value().unwrap();
    assert!((r.mean - limit).abs() < 0.1, "{} vs {limit}", r.mean);
}

#[test]
fn gaf_matches_finite_window_oracle() {
    let spec = SamplerSpec { process: Process::GafZeros { degree: 128 }, window: 1.0, seed: 0 };
    let r = run_mc(&spec, &McmcConfig::default(), 100, 8).unwrap();
    let side = sample_gaf_zeros(128, 0).unwrap().window;
    let oracle = finite_window_expectation_2d(&ClusterFunction::gaf(), side, &EisensteinConfig::default()).unwrap();
    assert!(within_oracle(r.mean, r.std_error, oracle), "{} ± {} vs {oracle}", r.mean, r.std_error);
}

#[test]
fn gaf_large_degree_near_limit() {
    let spec = SamplerSpec { process: Process::GafZeros { degree: 1024 }, window: 1.0, seed: 0 };
    let r = run_mc(&spec, &McmcConfig::default(), 100, 2).unwrap();
    let limit = expectation_limit_2d(&ClusterFunction::gaf()).unwrap().value().unwrap();
    assert!((r.mean - limit).abs() < 0.1, "{} vs {limit}", r.mean);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cgf_is_convex_and_anchored(n in 2usize..200, beta in 0.2f64..12.0, s in -0.4f64..0.4) {
        let s = s * beta;
        let k = |t: f64| selberg_cgf(n, beta, t).unwrap();
        prop_assert!(k(0.0).abs() < 1e-12);
        let h = 1e-3 * beta;
        prop_assert!(k(s + h) - 2.0 * k(s) + k(s - h) > -1e-12);
    }

    #[test]
    fn mean_exceeds_lower_bound(n in 2usize..500, beta in 0.1f64..20.0) {
        prop_assert!(selberg_mean(n, beta).unwrap() > 0.0);
    }

    #[test]
    fn replica_seeds_are_distinct(seed in any::<u64>(), r in 0u64..1000) {
        prop_assert_ne!(replica_seed(seed, r), replica_seed(seed, r + 1));
    }
}
