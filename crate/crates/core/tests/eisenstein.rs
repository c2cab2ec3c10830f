use std::f64::consts::{LN_2, PI};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use renergy::eisenstein::*;
use renergy::specfun::ETA_I;

fn cfg() -> EisensteinConfig {
    EisensteinConfig::default()
}

/// Σ'(−1)^{m+n}/(m²+n²) summed by rows with Σ_n (−1)^n/(n²+a²) = π/(a sinh πa).
fn alternating_row_sum() -> f64 {
    let mut s = -PI * PI / 6.0;
    for m in 1..40 {
        let mf = m as f64;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        s += 2.0 * sign * PI / (mf * (PI * mf).sinh());
    }
    s
}

/// The same sum over squares |p|_∞ ≤ L. Partial sums behave like
/// S + c₂/L² + c₃/L³ + …, so two Richardson steps in L remove both terms.
fn alternating_square_sum() -> f64 {
    let square = |l: i64| {
        let mut s = 0.0;
        for m in -l..=l {
            for n in -l..=l {
                if m == 0 && n == 0 {
                    continue;
                }
                let sign = if (m + n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                s += sign / (m * m + n * n) as f64;
            }
        }
        s
    };
    let s: Vec<f64> = [40, 80, 160].iter().map(|&l| square(l)).collect();
    let r1 = (4.0 * s[1] - s[0]) / 3.0;
    let r2 = (4.0 * s[2] - s[1]) / 3.0;
    (8.0 * r2 - r1) / 7.0
}

#[test]
fn half_period_matches_lattice_sum_oracles() {
    let rows = alternating_row_sum();
    let squares = alternating_square_sum();
    assert!((rows - squares).abs() < 1e-6, "{rows} vs {squares}");
    for &n in &[1.0, 7.0, 100.0] {
        let v = eisenstein_kronecker(PlanePoint::new(n / 2.0, n / 2.0), n, &cfg()).unwrap();
        assert!((v - rows).abs() < 1e-6);
        assert!((v + PI * LN_2).abs() < 1e-12);
    }
}

#[test]
fn near_origin_asymptote() {
    let n = 13.0;
    for k in 0..8 {
        let theta = k as f64 * 0.7;
        let t = 1e-4 * n;
        let x = PlanePoint::new(t * theta.cos(), t * theta.sin());
        let e = eisenstein_kronecker(x, n, &cfg()).unwrap();
        let residual = e + 2.0 * PI * (2.0 * PI * t / n).ln() + 4.0 * PI * ETA_I.ln();
        assert!(residual.abs() < 1e-3, "residual {residual}");
        assert!((e - eisenstein_asymptotic(x, n)).abs() < 1e-3);
    }
}

#[test]
fn fourier_cross_check_at_generic_point() {
    let n = 21.0;
    let x = PlanePoint::new(n / 3.0, n / 7.0);
    let k = eisenstein_kronecker(x, n, &cfg()).unwrap();
    let f = eisenstein_fourier(x, n, &EisensteinConfig { fourier_cutoff: 64, ..cfg() }).unwrap();
    assert!((k - f).abs() <= 0.05, "{k} vs {f}");
}

#[test]
fn fourier_converges_at_half_period() {
    let target = -PI * LN_2;
    let mut last = f64::INFINITY;
    for cutoff in [16u32, 32, 64, 128] {
        let c = EisensteinConfig { fourier_cutoff: cutoff, ..cfg() };
        let f = eisenstein_fourier(PlanePoint::new(0.5, 0.5), 1.0, &c).unwrap();
        let err = (f - target).abs();
        assert!(err < last, "cutoff {cutoff}: {err}");
        last = err;
    }
    assert!(last < 0.01);
}

#[test]
fn two_evaluators_agree_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 5.0;
    let c = EisensteinConfig { fourier_cutoff: 128, ..cfg() };
    let mut checked = 0;
    while checked < 100 {
        let u: f64 = rng.random_range(-0.5..0.5);
        let v: f64 = rng.random_range(-0.5..0.5);
        if u.hypot(v) < 0.1 {
            continue;
        }
        let x = PlanePoint::new(u * n, v * n);
        let k = eisenstein_kronecker(x, n, &c).unwrap();
        let f = eisenstein_fourier(x, n, &c).unwrap();
        assert!((k - f).abs() <= 0.02, "at ({u}, {v}): {k} vs {f}");
        checked += 1;
    }
}

#[test]
fn torus_mean_vanishes() {
    let m64 = torus_mean_en(1.0, &cfg(), 64).unwrap();
    let m256 = torus_mean_en(1.0, &cfg(), 256).unwrap();
    assert!(m64.abs() <= 0.05, "{m64}");
    assert!(m256.abs() <= 0.01, "{m256}");
    assert!(m256.abs() < m64.abs());
    let m_scaled = torus_mean_en(37.0, &cfg(), 64).unwrap();
    assert!((m_scaled - m64).abs() < 1e-10);
    assert!(torus_mean_en(1.0, &cfg(), 8).is_err());
}

#[test]
fn config_validation() {
    assert!(cfg().validate().is_ok());
    assert!(EisensteinConfig { product_terms: 4, ..cfg() }.validate().is_err());
    assert!(EisensteinConfig { fourier_cutoff: 7, ..cfg() }.validate().is_err());
    assert!(EisensteinConfig { singularity_radius: 0.5, ..cfg() }.validate().is_err());
}

#[test]
fn truncation_is_negligible_beyond_ten_terms() {
    let x = PlanePoint::new(0.31, 0.47);
    let a = eisenstein_kronecker(x, 1.0, &EisensteinConfig { product_terms: 10, ..cfg() }).unwrap();
    let b = eisenstein_kronecker(x, 1.0, &EisensteinConfig { product_terms: 30, ..cfg() }).unwrap();
    assert!((a - b).abs() < 1e-15);
}

proptest! {
    #[test]
    fn depends_only_on_x_over_n(u in -0.5f64..0.5, v in -0.5f64..0.5) {
        prop_assume!(u.hypot(v) > 1e-3);
        let e1 = eisenstein_kronecker(PlanePoint::new(u, v), 1.0, &cfg()).unwrap();
        for n in [7.0, 100.0] {
            let en = eisenstein_kronecker(PlanePoint::new(u * n, v * n), n, &cfg()).unwrap();
            prop_assert!((en - e1).abs() < 1e-9 * e1.abs().max(1.0));
        }
    }

    #[test]
    fn square_lattice_symmetries(u in -0.5f64..0.5, v in -0.5f64..0.5) {
        prop_assume!(u.hypot(v) > 1e-3);
        let e = eisenstein_kronecker(PlanePoint::new(u, v), 1.0, &cfg()).unwrap();
        let conj = eisenstein_kronecker(PlanePoint::new(u, -v), 1.0, &cfg()).unwrap();
        let rot = eisenstein_kronecker(PlanePoint::new(-v, u), 1.0, &cfg()).unwrap();
        let neg = eisenstein_kronecker(PlanePoint::new(-u, -v), 1.0, &cfg()).unwrap();
        let tol = 1e-10 * e.abs().max(1.0);
        prop_assert!((e - conj).abs() < tol);
        prop_assert!((e - rot).abs() < tol);
        prop_assert!((e - neg).abs() < tol);
    }

    #[test]
    fn fourier_is_even(u in -0.5f64..0.5, v in -0.5f64..0.5) {
        prop_assume!(u.hypot(v) > 1e-3);
        let c = EisensteinConfig { fourier_cutoff: 16, ..cfg() };
        let a = eisenstein_fourier(PlanePoint::new(u, v), 1.0, &c).unwrap();
        let b = eisenstein_fourier(PlanePoint::new(-u, -v), 1.0, &c).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }
}
