//! Point-configuration samplers. Every sampler is a deterministic function of
//! its parameters and a 64-bit seed; independent streams come from ChaCha8
//! stream selection.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::eisenstein::PlanePoint;
use crate::energy::{PointConfiguration1D, PointConfiguration2D};
use crate::error::{Error, Result};
use crate::pointfile::PointSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Process {
    Lattice,
    Poisson { dimension: usize },
    CircularBeta { beta: f64 },
    Ginibre { matrix_dim: usize },
    GafZeros { degree: usize },
}

/// What to sample. For `CircularBeta` the window is the particle count n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub process: Process,
    pub window: f64,
    pub seed: u64,
}

impl SamplerSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.window > 0.0) || !self.window.is_finite() {
            return Err(Error::InvalidConfig(format!("window must be positive, got {}", self.window)));
        }
        match self.process {
            Process::CircularBeta { beta } if !(beta > 0.0 && beta.is_finite()) => {
                Err(Error::InvalidConfig(format!("beta must be positive, got {beta}")))
            }
            Process::CircularBeta { .. } if self.window < 2.0 => {
                Err(Error::InvalidConfig("circular ensemble needs n >= 2".into()))
            }
            Process::Poisson { dimension } if dimension != 1 && dimension != 2 => {
                Err(Error::DimensionMismatch { expected: 1, found: dimension })
            }
            Process::Lattice if self.window < 1.0 => {
                Err(Error::InvalidConfig("lattice window must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }

    /// Particle count for the circular ensemble.
    pub fn particles(&self) -> usize {
        self.window.floor() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub burn_in_sweeps: u32,
    pub thin_sweeps: u32,
    /// Initial proposal half-width in units of the mean spacing 2π/n.
    pub proposal_scale: f64,
    pub target_acceptance: f64,
    /// Independent chains per run; replicas are split evenly across them.
    pub chains: u32,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            burn_in_sweeps: 500,
            thin_sweeps: 2,
            proposal_scale: 0.5,
            target_acceptance: 0.35,
            chains: 8,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.burn_in_sweeps == 0 || self.thin_sweeps == 0 || self.chains == 0 {
            return Err(Error::InvalidConfig("MCMC sweep counts and chains must be positive".into()));
        }
        if !(self.proposal_scale > 0.0) {
            return Err(Error::InvalidConfig("proposal_scale must be positive".into()));
        }
        if !(self.target_acceptance > 0.1 && self.target_acceptance < 0.6) {
            return Err(Error::InvalidConfig(format!(
                "target_acceptance must lie in (0.1, 0.6), got {}",
                self.target_acceptance
            )));
        }
        Ok(())
    }
}

/// Seeded generator for one replica or chain.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn sample_lattice(window: f64) -> Result<PointConfiguration1D> {
    if !(window >= 1.0) {
        return Err(Error::InvalidConfig(format!("lattice window must be >= 1, got {window}")));
    }
    let k = window.floor() as usize;
    PointConfiguration1D::new((0..k).map(|i| i as f64).collect(), window)
}

/// Homogeneous density-one Poisson process on [0, window)^d.
pub fn sample_poisson(spec: &SamplerSpec) -> Result<PointSet> {
    spec.validate()?;
    let Process::Poisson { dimension } = spec.process else {
        return Err(Error::InvalidConfig("sample_poisson needs a Poisson process".into()));
    };
    let mut rng = stream_rng(spec.seed, 0);
    let w = spec.window;
    let mean = w.powi(dimension as i32);
    let count = Poisson::new(mean)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?
        .sample(&mut rng) as usize;
    if dimension == 1 {
        let pts = (0..count).map(|_| rng.random_range(0.0..w)).collect();
        Ok(PointSet::Line(PointConfiguration1D::new(pts, w)?))
    } else {
        let pts = (0..count)
            .map(|_| PlanePoint::new(rng.random_range(0.0..w), rng.random_range(0.0..w)))
            .collect();
        Ok(PointSet::Plane(PointConfiguration2D::new(pts, w)?))
    }
}

/// Metropolis chain for the circular β-ensemble, density ∝ ∏_{i<j}|z_i − z_j|^β.
///
/// Positions are kept as unit vectors so each proposal needs only squared
/// chord lengths; log-ratios are accumulated as logs of chunked products.
#[derive(Debug, Clone)]
pub struct CircularChain {
    beta: f64,
    theta: Vec<f64>,
    xy: Vec<(f64, f64)>,
    scale: f64,
    proposed: u64,
    accepted: u64,
    rng: ChaCha8Rng,
}

const CHUNK: usize = 16;

impl CircularChain {
    /// Starts from a uniformly jittered equally spaced configuration.
    pub fn new(n: usize, beta: f64, initial_scale: f64, mut rng: ChaCha8Rng) -> Result<Self> {
        if n < 2 || !(beta > 0.0) {
            return Err(Error::InvalidConfig(format!("circular chain needs n >= 2 and beta > 0 (n={n}, beta={beta})")));
        }
        let offset: f64 = rng.random_range(0.0..TAU);
        let theta: Vec<f64> = (0..n)
            .map(|i| (offset + TAU * (i as f64 + rng.random_range(-0.25..0.25)) / n as f64).rem_euclid(TAU))
            .collect();
        let xy = theta.iter().map(|t| (t.cos(), t.sin())).collect();
        Ok(Self {
            beta,
            theta,
            xy,
            scale: initial_scale,
            proposed: 0,
            accepted: 0,
            rng,
        })
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn proposal_scale(&self) -> f64 {
        self.scale
    }

    /// Acceptance fraction since the last reset.
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    pub fn reset_counters(&mut self) {
        self.proposed = 0;
        self.accepted = 0;
    }

    /// log ∏_{j≠i} |z' − z_j|² / |z_i − z_j|².
    fn log_ratio(&self, i: usize, p: (f64, f64)) -> f64 {
        let q = self.xy[i];
        let mut total = 0.0;
        let mut prod = 1.0;
        let mut in_chunk = 0;
        for (j, &(x, y)) in self.xy.iter().enumerate() {
            if j == i {
                continue;
            }
            let dn = (p.0 - x) * (p.0 - x) + (p.1 - y) * (p.1 - y);
            let dd = (q.0 - x) * (q.0 - x) + (q.1 - y) * (q.1 - y);
            prod *= dn / dd;
            in_chunk += 1;
            if in_chunk == CHUNK {
                total += prod.ln();
                prod = 1.0;
                in_chunk = 0;
            }
        }
        total + prod.ln()
    }

    /// One sweep: n single-particle proposals in index order.
    pub fn sweep(&mut self) {
        let n = self.theta.len();
        let half_width = self.scale * TAU / n as f64;
        for i in 0..n {
            let step: f64 = self.rng.random_range(-1.0..1.0);
            let t = (self.theta[i] + half_width * step).rem_euclid(TAU);
            let p = (t.cos(), t.sin());
            let lr = 0.5 * self.beta * self.log_ratio(i, p);
            self.proposed += 1;
            let accept = lr >= 0.0 || {
                let u: f64 = self.rng.random();
                u.ln() < lr
            };
            if accept && lr.is_finite() {
                self.theta[i] = t;
                self.xy[i] = p;
                self.accepted += 1;
            }
        }
    }

    /// Largest proposal scale the adaptation will reach.
    pub fn max_scale(&self) -> f64 {
        0.5 * self.theta.len() as f64
    }

    /// Acceptance inside (0.1, 0.6). High acceptance is tolerated once the
    /// scale has saturated, which happens for small β where moves are cheap.
    pub fn acceptance_healthy(&self, a: f64) -> bool {
        a > 0.1 && (a < 0.6 || self.scale >= self.max_scale())
    }

    /// Burn-in with proposal adaptation toward the target acceptance. The last
    /// fifth runs at a frozen scale; its acceptance rate is returned. Counters
    /// are reset on exit.
    pub fn burn_in(&mut self, cfg: &McmcConfig) -> f64 {
        const BLOCK: u32 = 10;
        let frozen = cfg.burn_in_sweeps / 5;
        let adapt = cfg.burn_in_sweeps - frozen;
        let mut done = 0;
        while done < adapt {
            self.reset_counters();
            let steps = BLOCK.min(adapt - done);
            for _ in 0..steps {
                self.sweep();
            }
            done += steps;
            let a = self.acceptance_rate();
            self.scale = (self.scale * (2.0 * (a - cfg.target_acceptance)).exp()).clamp(1e-6, self.max_scale());
        }
        self.reset_counters();
        for _ in 0..frozen {
            self.sweep();
        }
        let a = self.acceptance_rate();
        self.reset_counters();
        a
    }

    /// Current state mapped to a_j = n θ_j / 2π in the window N = n.
    pub fn configuration(&self) -> Result<PointConfiguration1D> {
        let n = self.theta.len() as f64;
        PointConfiguration1D::new(self.theta.iter().map(|t| n * t / TAU).collect(), n)
    }
}

/// One thinned, post-burn-in sample of the circular β-ensemble.
pub fn sample_circular_beta(n: usize, beta: f64, mcmc: &McmcConfig, seed: u64) -> Result<PointConfiguration1D> {
    mcmc.validate()?;
    let mut chain = CircularChain::new(n, beta, mcmc.proposal_scale, stream_rng(seed, 0))?;
    let a = chain.burn_in(mcmc);
    for _ in 0..mcmc.thin_sweeps {
        chain.sweep();
    }
    if !chain.acceptance_healthy(a) {
        return Err(Error::NotConverged(format!("acceptance rate {a:.3} outside (0.1, 0.6)")));
    }
    chain.configuration()
}

fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Keeps points with |z| ≤ r inside the inscribed square of the disk and
/// translates that square to [0, r√2)².
fn bulk_square(points: impl Iterator<Item = Complex64>, r: f64) -> Result<PointConfiguration2D> {
    let half = r / std::f64::consts::SQRT_2;
    let side = 2.0 * half;
    let pts = points
        .filter(|z| z.re.abs() < half && z.im.abs() < half)
        .map(|z| PlanePoint::new(z.re + half, z.im + half))
        .collect();
    PointConfiguration2D::new(pts, side)
}

/// Eigenvalues of an n×n matrix of iid standard complex Gaussians.
pub fn ginibre_eigenvalues(n: usize, seed: u64) -> Result<Vec<Complex64>> {
    let mut rng = stream_rng(seed, 0);
    let m = DMatrix::from_fn(n, n, |_, _| complex_normal(&mut rng));
    let schur = Schur::try_new(m, 1e-14, 10_000 * n)
        .ok_or_else(|| Error::Eigensolver(format!("Schur iteration did not converge for n = {n}")))?;
    let (_, t) = schur.unpack();
    Ok((0..n).map(|i| t[(i, i)]).collect())
}

/// Ginibre eigenvalues divided by √π (density one), restricted to the bulk
/// disk of radius ½√(n/π) and its inscribed square.
pub fn sample_ginibre(matrix_dim: usize, seed: u64) -> Result<PointConfiguration2D> {
    if matrix_dim < 16 {
        return Err(Error::InvalidConfig(format!("matrix_dim must be >= 16, got {matrix_dim}")));
    }
    let s = PI.sqrt();
    let ev = ginibre_eigenvalues(matrix_dim, seed)?;
    let r = 0.5 * (matrix_dim as f64 / PI).sqrt();
    bulk_square(ev.into_iter().map(|z| z / s), r)
}

/// a/b with both operands rescaled first; the plain quotient forms |b|², which
/// underflows once |b| < 1e−154.
fn scaled_div(a: Complex64, b: Complex64) -> Complex64 {
    let m = b.re.abs().max(b.im.abs());
    (a / m) / (b / m)
}

/// Roots of Σ_{k≤d} c_k z^k by Aberth–Ehrlich iteration.
///
/// The Newton ratio p/p′ is evaluated through the reversed polynomial when
/// |z| > 1, so iterates far from the origin never overflow.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    aberth(coeffs, Start::Circle)
}

/// Where the Aberth iterates start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Start {
    /// Circle of radius |c_0/c_d|^{1/d}.
    Circle,
    /// Uniform-area spiral filling the unit disk, matching the zero density
    /// of the scaled Gaussian analytic function.
    UnitDisk,
}

fn initial_guesses(monic: &[Complex64], init: Start) -> Vec<Complex64> {
    let d = monic.len() - 1;
    let dn = d as f64;
    match init {
        Start::Circle => {
            let r0 = monic[0].norm().powf(1.0 / dn).clamp(1e-3, 1e3);
            (0..d)
                .map(|k| Complex64::from_polar(r0, TAU * (k as f64 + 0.25) / dn + 0.4))
                .collect()
        }
        Start::UnitDisk => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..d)
                .map(|k| Complex64::from_polar(((k as f64 + 0.5) / dn).sqrt(), golden * k as f64))
                .collect()
        }
    }
}

fn aberth(coeffs: &[Complex64], init: Start) -> Result<Vec<Complex64>> {
    let d = coeffs.len().saturating_sub(1);
    let zero = Complex64::new(0.0, 0.0);
    if d == 0 || coeffs[d] == zero {
        return Err(Error::InvalidConfig("polynomial must have positive degree and nonzero leading coefficient".into()));
    }
    let lead = coeffs[d];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let dn = d as f64;
    let mut z = initial_guesses(&monic, init);
    // Returns p/p′, or None at an exact root.
    let newton = |x: Complex64| -> Option<Complex64> {
        if x.norm() <= 1.0 {
            let mut p = monic[d];
            let mut dp = zero;
            for c in monic[..d].iter().rev() {
                dp = dp * x + p;
                p = p * x + c;
            }
            if p == zero {
                None
            } else {
                Some(scaled_div(p, dp))
            }
        } else {
            let y = 1.0 / x;
            let mut q = monic[0];
            let mut dq = zero;
            for c in monic[1..].iter() {
                dq = dq * y + q;
                q = q * y + c;
            }
            if q == zero {
                None
            } else {
                Some(scaled_div(Complex64::new(1.0, 0.0), dn * y - y * y * scaled_div(dq, q)))
            }
        }
    };
    let max_iter = 1000;
    // Horner rounding near |z| = 1 grows like d·ε.
    let tol = (8.0 * dn * f64::EPSILON).max(1e-14);
    let mut converged = vec![false; d];
    for _ in 0..max_iter {
        for i in 0..d {
            if converged[i] {
                continue;
            }
            let Some(nr) = newton(z[i]) else {
                converged[i] = true;
                continue;
            };
            let mut repulse = zero;
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    repulse += 1.0 / (z[i] - zj);
                }
            }
            let w = nr / (1.0 - nr * repulse);
            if !(w.re.is_finite() && w.im.is_finite()) {
                // Collision with another iterate: nudge off it.
                z[i] *= Complex64::from_polar(1.0 + 1e-6, 1e-3);
                continue;
            }
            z[i] -= w;
            if w.norm() <= tol * z[i].norm().max(1e-3) {
                converged[i] = true;
            }
        }
        if converged.iter().all(|&c| c) {
            return Ok(z);
        }
    }
    // Roots whose last steps stalled at rounding level are still accepted.
    let residual = z
        .iter()
        .filter_map(|&x| newton(x))
        .map(|r| r.norm())
        .fold(0.0, f64::max);
    if residual <= 1e3 * tol {
        return Ok(z);
    }
    Err(Error::RootFinder { iterations: max_iter, residual })
}

/// All d zeros of Σ_{k≤d} ξ_k z^k/√k! (unscaled).
///
/// Roots are found in w = z/√d, where the coefficients ξ_k d^{k/2}/√k! are
/// formed in log space and normalized by their largest modulus; the
/// unscaled coefficients would overflow beyond degree ≈ 170.
pub fn gaf_zeros(degree: usize, seed: u64) -> Result<Vec<Complex64>> {
    if degree == 0 {
        return Err(Error::InvalidConfig("degree must be positive".into()));
    }
    let mut rng = stream_rng(seed, 0);
    let d = degree as f64;
    let half_ln_d = 0.5 * d.ln();
    let mut log_fact = 0.0;
    let log_mod: Vec<f64> = (0..=degree)
        .map(|k| {
            if k > 0 {
                log_fact += (k as f64).ln();
            }
            k as f64 * half_ln_d - 0.5 * log_fact
        })
        .collect();
    let top = log_mod.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let coeffs: Vec<Complex64> = log_mod
        .iter()
        .map(|l| complex_normal(&mut rng) * (l - top).exp())
        .collect();
    let sd = d.sqrt();
    Ok(aberth(&coeffs, Start::UnitDisk)?.into_iter().map(|w| w * sd).collect())
}

/// Zeros with |z| ≤ ½√d, divided by √π (density one), in the inscribed square.
pub fn sample_gaf_zeros(degree: usize, seed: u64) -> Result<PointConfiguration2D> {
    if degree < 32 {
        return Err(Error::InvalidConfig(format!("degree must be >= 32, got {degree}")));
    }
    let r = 0.5 * (degree as f64).sqrt();
    let s = PI.sqrt();
    let zeros = gaf_zeros(degree, seed)?;
    bulk_square(zeros.into_iter().filter(|z| z.norm() <= r).map(|z| z / s), r / s)
}

/// Dispatches on the process kind. The circular ensemble uses the given MCMC
/// configuration; the others ignore it.
pub fn sample(spec: &SamplerSpec, mcmc: &McmcConfig) -> Result<PointSet> {
    spec.validate()?;
    match spec.process {
        Process::Lattice => Ok(PointSet::Line(sample_lattice(spec.window)?)),
        Process::Poisson { .. } => sample_poisson(spec),
        Process::CircularBeta { beta } => Ok(PointSet::Line(sample_circular_beta(
            spec.particles(),
            beta,
            mcmc,
            spec.seed,
        )?)),
        Process::Ginibre { matrix_dim } => Ok(PointSet::Plane(sample_ginibre(matrix_dim, spec.seed)?)),
        Process::GafZeros { degree } => Ok(PointSet::Plane(sample_gaf_zeros(degree, spec.seed)?)),
    }
}
