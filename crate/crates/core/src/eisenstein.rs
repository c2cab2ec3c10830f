//! The square-torus kernel E_N(x) = E_{u,v}(i) with (u, v) = x/N, where
//! E_{u,v}(i) = Σ_{(m,n)≠0} e^{2iπ(mu+nv)} / (m² + n²).
//!
//! Two evaluators: the second Kronecker limit formula (exponentially convergent
//! q-product, q = e^{−2π}; the one used everywhere else) and the truncated
//! lattice sum, kept as an independent diagnostic.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::dedekind_eta_at_i;

/// A point of ℝ² ≅ ℂ.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanePoint {
    pub re: f64,
    pub im: f64,
}

impl PlanePoint {
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl std::ops::Sub for PlanePoint {
    type Output = PlanePoint;
    fn sub(self, o: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.re - o.re, self.im - o.im)
    }
}

impl std::ops::Add for PlanePoint {
    type Output = PlanePoint;
    fn add(self, o: PlanePoint) -> PlanePoint {
        PlanePoint::new(self.re + o.re, self.im + o.im)
    }
}

/// Truncation and exclusion parameters for the kernel evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EisensteinConfig {
    /// Number of factors kept in the q-product.
    pub product_terms: u32,
    /// Lattice sum over |p|_∞ ≤ fourier_cutoff.
    pub fourier_cutoff: u32,
    /// Exclusion radius around lattice points, as a fraction of N.
    pub singularity_radius: f64,
}

impl Default for EisensteinConfig {
    fn default() -> Self {
        Self {
            product_terms: 12,
            fourier_cutoff: 64,
            singularity_radius: 1e-6,
        }
    }
}

impl EisensteinConfig {
    pub fn validate(&self) -> Result<()> {
        if self.product_terms < 5 {
            return Err(Error::InvalidConfig("product_terms must be >= 5".into()));
        }
        if self.fourier_cutoff < 8 {
            return Err(Error::InvalidConfig("fourier_cutoff must be >= 8".into()));
        }
        if !(self.singularity_radius > 0.0 && self.singularity_radius < 0.5) {
            return Err(Error::InvalidConfig(
                "singularity_radius must lie in (0, 0.5)".into(),
            ));
        }
        Ok(())
    }
}

/// Reduce to the representative in [−1/2, 1/2).
fn centered(t: f64) -> f64 {
    let r = t - t.floor();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// Torus coordinates (u, v) = x/N reduced to [−1/2, 1/2)², or a singularity
/// error when x sits within the exclusion radius of a lattice point.
fn reduced(x: PlanePoint, n: f64, cfg: &EisensteinConfig) -> Result<(f64, f64)> {
    if !(n > 0.0) {
        return Err(Error::Domain {
            func: "eisenstein",
            value: n,
        });
    }
    let u = centered(x.re / n);
    let v = centered(x.im / n);
    if u.hypot(v) < cfg.singularity_radius {
        return Err(Error::Singularity {
            func: "eisenstein",
            value: x.norm(),
        });
    }
    Ok((u, v))
}

/// E_N(x) = −2π log| f(x̄/N, i) e^{−π (Im x/N)²} | with
/// f(z, τ) = q^{1/12}(p^{1/2} − p^{−1/2}) ∏_k (1 − q^k p)(1 − q^k/p).
///
/// Only moduli enter, so the evaluation is real throughout:
/// |p^{1/2} − p^{−1/2}|² = 4(sin²πu + sinh²πv) and
/// |1 − q^k p|² = 1 − 2 q^k e^{2πv} cos 2πu + q^{2k} e^{4πv}.
pub fn eisenstein_kronecker(x: PlanePoint, n: f64, cfg: &EisensteinConfig) -> Result<f64> {
    let (u, v) = reduced(x, n, cfg)?;
    Ok(kronecker_reduced(u, v, cfg.product_terms))
}

pub(crate) fn kronecker_reduced(u: f64, v: f64, terms: u32) -> f64 {
    let q = (-2.0 * PI).exp();
    let su = (PI * u).sin();
    let shv = (PI * v).sinh();
    let mut log_f = -PI / 6.0 + 0.5 * (4.0 * (su * su + shv * shv)).ln();
    let c = (2.0 * PI * u).cos();
    let ep = (2.0 * PI * v).exp();
    let em = 1.0 / ep;
    let mut qk = 1.0;
    for _ in 0..terms {
        qk *= q;
        let a = qk * ep;
        let b = qk * em;
        log_f += 0.5 * ((a * a - 2.0 * a * c).ln_1p() + (b * b - 2.0 * b * c).ln_1p());
    }
    -2.0 * PI * (log_f - PI * v * v)
}

/// Truncated lattice sum Σ_{0<|p|_∞≤L} cos(2π p·x/N) / |p|², pairing p with −p.
pub fn eisenstein_fourier(x: PlanePoint, n: f64, cfg: &EisensteinConfig) -> Result<f64> {
    let (u, v) = reduced(x, n, cfg)?;
    let l = cfg.fourier_cutoff as i64;
    let mut sum = 0.0;
    // Half lattice: m > 0 with any n, plus m = 0 with n > 0; doubled.
    for m in 0..=l {
        let nlo = if m == 0 { 1 } else { -l };
        let mut row = 0.0;
        for k in nlo..=l {
            let r2 = (m * m + k * k) as f64;
            row += (2.0 * PI * (m as f64 * u + k as f64 * v)).cos() / r2;
        }
        sum += row;
    }
    Ok(2.0 * sum)
}

/// Small-|x| form −2π log(2π|x|/N) − 4π log η(i).
pub fn eisenstein_asymptotic(x: PlanePoint, n: f64) -> f64 {
    -2.0 * PI * (2.0 * PI * x.norm() / n).ln() - 4.0 * PI * dedekind_eta_at_i(12).ln()
}

/// Midpoint-rule mean of E_N over the torus on a grid × grid mesh. The mesh
/// never touches lattice points, so no exclusion is needed.
pub fn torus_mean_en(n: f64, cfg: &EisensteinConfig, grid: u32) -> Result<f64> {
    if grid < 16 {
        return Err(Error::InvalidConfig("torus mean grid must be >= 16".into()));
    }
    let g = grid as f64;
    let mut total = 0.0;
    for i in 0..grid {
        let mut row = 0.0;
        for j in 0..grid {
            let x = PlanePoint::new((i as f64 + 0.5) / g * n, (j as f64 + 0.5) / g * n);
            row += eisenstein_kronecker(x, n, cfg)?;
        }
        total += row;
    }
    Ok(total / (g * g))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_period_value() {
        let cfg = EisensteinConfig::default();
        let v = eisenstein_kronecker(PlanePoint::new(3.5, 3.5), 7.0, &cfg).unwrap();
        assert!((v + PI * std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn origin_is_singular() {
        let cfg = EisensteinConfig::default();
        assert!(eisenstein_kronecker(PlanePoint::new(5.0, 10.0), 5.0, &cfg).is_err());
    }

    #[test]
    fn periodic() {
        let cfg = EisensteinConfig::default();
        let n = 3.0;
        let x = PlanePoint::new(0.7, 1.9);
        let a = eisenstein_kronecker(x, n, &cfg).unwrap();
        let b = eisenstein_kronecker(x + PlanePoint::new(n, 0.0), n, &cfg).unwrap();
        let c = eisenstein_kronecker(x + PlanePoint::new(0.0, n), n, &cfg).unwrap();
        assert!((a - b).abs() < 1e-12 && (a - c).abs() < 1e-12);
    }
}
