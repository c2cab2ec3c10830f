//! Monte Carlo estimation of E𝒲_N and Var 𝒲_N against the exact cumulants of
//! the circular β-ensemble.
//!
//! For n points the energy has cumulant generating function
//! K(s) = s log n + log Z(β − 2s/n) − log Z(β),
//! log Z(β) = log Γ(1 + βn/2) − n log Γ(1 + β/2),
//! so every cumulant is a polygamma expression.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::eisenstein::EisensteinConfig;
use crate::energy::{energy_1d, energy_2d};
use crate::error::{Error, Result};
use crate::pointfile::PointSet;
use crate::samplers::{sample, stream_rng, CircularChain, McmcConfig, Process, SamplerSpec};
use crate::specfun::{digamma, log_gamma, tetragamma, trigamma};

fn check(n: usize, beta: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain { func: "selberg", value: n as f64 });
    }
    if !(beta > 0.0) {
        return Err(Error::Domain { func: "selberg", value: beta });
    }
    Ok(())
}

/// E𝒲_n = log n − Ψ(1 + βn/2) + Ψ(1 + β/2).
pub fn selberg_mean(n: usize, beta: f64) -> Result<f64> {
    check(n, beta)?;
    let nf = n as f64;
    Ok(nf.ln() - digamma(1.0 + 0.5 * beta * nf)? + digamma(1.0 + 0.5 * beta)?)
}

/// Var 𝒲_n = Ψ′(1 + βn/2) − Ψ′(1 + β/2)/n.
pub fn selberg_variance(n: usize, beta: f64) -> Result<f64> {
    check(n, beta)?;
    let nf = n as f64;
    Ok(trigamma(1.0 + 0.5 * beta * nf)? - trigamma(1.0 + 0.5 * beta)? / nf)
}

/// Third cumulant −Ψ″(1 + βn/2) + Ψ″(1 + β/2)/n².
pub fn selberg_third_cumulant(n: usize, beta: f64) -> Result<f64> {
    check(n, beta)?;
    let nf = n as f64;
    Ok(-tetragamma(1.0 + 0.5 * beta * nf)? + tetragamma(1.0 + 0.5 * beta)? / (nf * nf))
}

/// log Z(β) for n points.
pub fn selberg_log_partition(n: usize, beta: f64) -> Result<f64> {
    check(n, beta)?;
    let nf = n as f64;
    Ok(log_gamma(1.0 + 0.5 * beta * nf)? - nf * log_gamma(1.0 + 0.5 * beta)?)
}

/// K(s) = log E e^{s𝒲_n}, defined for s < βn/2.
pub fn selberg_cgf(n: usize, beta: f64, s: f64) -> Result<f64> {
    let nf = n as f64;
    let shifted = beta - 2.0 * s / nf;
    if !(shifted > 0.0) {
        return Err(Error::Domain { func: "selberg_cgf", value: s });
    }
    Ok(s * nf.ln() + selberg_log_partition(n, shifted)? - selberg_log_partition(n, beta)?)
}

/// u(β) = Ψ(1 + β/2) − log(β/2).
pub fn u_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain { func: "u_beta", value: beta });
    }
    Ok(digamma(1.0 + 0.5 * beta)? - (0.5 * beta).ln())
}

/// v(β) = 2/β − Ψ′(1 + β/2).
pub fn v_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain { func: "v_beta", value: beta });
    }
    Ok(2.0 / beta - trigamma(1.0 + 0.5 * beta)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    pub replicas: usize,
    pub effective_samples: f64,
    pub seed: u64,
    pub wall_clock_ms: u64,
    /// Integrated autocorrelation time in units of recorded samples (1 for iid).
    pub tau_int: f64,
    /// Post-burn-in Metropolis acceptance (1 for direct samplers).
    pub acceptance: f64,
    /// False when acceptance left (0.1, 0.6) or fewer than replicas/10
    /// effective samples were obtained.
    pub converged: bool,
}

/// Sample mean and unbiased variance.
pub fn mean_variance(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    if x.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Integrated autocorrelation time pooled over chains, with Sokal's automatic
/// window (smallest M with M ≥ 5 τ(M)).
pub fn integrated_autocorrelation(chains: &[Vec<f64>]) -> f64 {
    let min_len = chains.iter().map(Vec::len).min().unwrap_or(0);
    if min_len < 4 {
        return 1.0;
    }
    let centered: Vec<Vec<f64>> = chains
        .iter()
        .map(|c| {
            let (m, _) = mean_variance(c);
            c.iter().map(|v| v - m).collect()
        })
        .collect();
    let acov = |t: usize| -> f64 {
        let mut s = 0.0;
        let mut count = 0usize;
        for c in &centered {
            for i in 0..c.len() - t {
                s += c[i] * c[i + t];
            }
            count += c.len() - t;
        }
        s / count as f64
    };
    let c0 = acov(0);
    if c0 <= 0.0 {
        return 1.0;
    }
    let mut tau = 1.0;
    for t in 1..min_len / 2 {
        tau += 2.0 * acov(t) / c0;
        if t as f64 >= 5.0 * tau {
            break;
        }
    }
    tau.max(1.0)
}

/// Batch-means standard error; batches never straddle chains. Falls back to
/// the τ-inflated naive error when fewer than 20 batches fit.
fn batch_means_error(chains: &[Vec<f64>], tau: f64, variance: f64, total: usize) -> f64 {
    let b = ((5.0 * tau).ceil() as usize).max(1);
    let mut means = Vec::new();
    for c in chains {
        for chunk in c.chunks_exact(b) {
            means.push(chunk.iter().sum::<f64>() / b as f64);
        }
    }
    if means.len() < 20 {
        return (variance * tau / total as f64).sqrt();
    }
    let (_, vb) = mean_variance(&means);
    (vb / means.len() as f64).sqrt()
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replica r for the direct (non-MCMC) samplers.
pub fn replica_seed(seed: u64, r: u64) -> u64 {
    splitmix(seed ^ splitmix(r))
}

fn energy_of(set: &PointSet) -> Result<f64> {
    match set {
        PointSet::Line(c) => Ok(energy_1d(c)?.value),
        PointSet::Plane(c) => Ok(energy_2d(c, &EisensteinConfig::default())?.value),
    }
}

struct ChainOutput {
    samples: Vec<f64>,
    acceptance: f64,
    healthy: bool,
}

fn run_chain(n: usize, beta: f64, mcmc: &McmcConfig, seed: u64, index: u64, count: usize) -> Result<ChainOutput> {
    let mut chain = CircularChain::new(n, beta, mcmc.proposal_scale, stream_rng(seed, index))?;
    chain.burn_in(mcmc);
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        for _ in 0..mcmc.thin_sweeps {
            chain.sweep();
        }
        samples.push(energy_1d(&chain.configuration()?)?.value);
    }
    let acceptance = chain.acceptance_rate();
    Ok(ChainOutput {
        samples,
        acceptance,
        healthy: chain.acceptance_healthy(acceptance),
    })
}

/// `run_mc` together with the recorded 𝒲_N values, in canonical order
/// (chain by chain for MCMC, replica order otherwise).
pub fn run_mc_with_samples(
    spec: &SamplerSpec,
    mcmc: &McmcConfig,
    replicas: usize,
    seed: u64,
) -> Result<(ExperimentResult, Vec<f64>)> {
    if replicas < 100 {
        return Err(Error::InvalidConfig(format!("replicas must be >= 100, got {replicas}")));
    }
    spec.validate()?;
    mcmc.validate()?;
    let start = Instant::now();
    let (chains, acceptance, healthy) = match spec.process {
        Process::CircularBeta { beta } => {
            let c = (mcmc.chains as usize).min(replicas);
            let outputs: Vec<Result<ChainOutput>> = (0..c)
                .into_par_iter()
                .map(|k| {
                    let count = replicas / c + usize::from(k < replicas % c);
                    run_chain(spec.particles(), beta, mcmc, seed, k as u64, count)
                })
                .collect();
            let mut chains = Vec::with_capacity(c);
            let mut acc = 0.0;
            let mut healthy = true;
            for o in outputs {
                let o = o?;
                acc += o.acceptance;
                healthy &= o.healthy;
                chains.push(o.samples);
            }
            (chains, acc / c as f64, healthy)
        }
        _ => {
            let values: Vec<Result<f64>> = (0..replicas as u64)
                .into_par_iter()
                .map(|r| {
                    let s = SamplerSpec { seed: replica_seed(seed, r), ..*spec };
                    energy_of(&sample(&s, mcmc)?)
                })
                .collect();
            let v = values.into_iter().collect::<Result<Vec<f64>>>()?;
            (vec![v], 1.0, true)
        }
    };
    let samples: Vec<f64> = chains.concat();
    let (mean, variance) = mean_variance(&samples);
    let mcmc_run = matches!(spec.process, Process::CircularBeta { .. });
    let tau = if mcmc_run { integrated_autocorrelation(&chains) } else { 1.0 };
    let (std_error, effective_samples) = if variance == 0.0 {
        (0.0, samples.len() as f64)
    } else if mcmc_run {
        let se = batch_means_error(&chains, tau, variance, samples.len());
        (se, variance / (se * se))
    } else {
        ((variance / samples.len() as f64).sqrt(), samples.len() as f64)
    };
    let converged = healthy && effective_samples >= replicas as f64 / 10.0;
    let result = ExperimentResult {
        mean,
        variance,
        std_error,
        replicas,
        effective_samples,
        seed,
        wall_clock_ms: start.elapsed().as_millis() as u64,
        tau_int: tau,
        acceptance,
        converged,
    };
    Ok((result, samples))
}

/// Mean and variance of 𝒲_N over `replicas` recorded samples. For the
/// circular ensemble these come from `mcmc.chains` independent Metropolis
/// chains, each recording every `thin_sweeps` sweeps; the other processes are
/// sampled independently per replica. Results do not depend on the number of
/// worker threads.
pub fn run_mc(spec: &SamplerSpec, mcmc: &McmcConfig, replicas: usize, seed: u64) -> Result<ExperimentResult> {
    Ok(run_mc_with_samples(spec, mcmc, replicas, seed)?.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CltProbe {
    pub skewness: f64,
    /// Kolmogorov–Smirnov distance to the standard normal.
    pub normality_distance: f64,
    pub effective_samples: f64,
}

/// Sample skewness.
pub fn skewness(x: &[f64]) -> f64 {
    let (m, v) = mean_variance(x);
    let n = x.len() as f64;
    let m3 = x.iter().map(|y| (y - m).powi(3)).sum::<f64>() / n;
    m3 / v.powf(1.5)
}

/// sup |F_n − Φ| for the empirical distribution of `z`.
pub fn ks_distance_normal(z: &[f64]) -> f64 {
    let phi = Normal::standard();
    let mut s = z.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = phi.cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Skewness and KS distance of (𝒲_N − E𝒲_N)/√Var 𝒲_N for the circular
/// ensemble, standardized by the exact cumulants.
pub fn clt_probe(spec: &SamplerSpec, mcmc: &McmcConfig, replicas: usize, seed: u64) -> Result<CltProbe> {
    if replicas < 10_000 {
        return Err(Error::InvalidConfig(format!("clt_probe needs >= 10000 replicas, got {replicas}")));
    }
    let beta = match spec.process {
        Process::CircularBeta { beta } => beta,
        Process::Lattice => return Err(Error::Degenerate("the lattice energy is deterministic".into())),
        _ => {
            return Err(Error::InvalidConfig(
                "clt_probe standardizes by exact cumulants and needs the circular ensemble".into(),
            ))
        }
    };
    let n = spec.particles();
    let (res, samples) = run_mc_with_samples(spec, mcmc, replicas, seed)?;
    if res.variance == 0.0 {
        return Err(Error::Degenerate("all sampled energies coincide".into()));
    }
    let m = selberg_mean(n, beta)?;
    let sd = selberg_variance(n, beta)?.sqrt();
    let z: Vec<f64> = samples.iter().map(|w| (w - m) / sd).collect();
    Ok(CltProbe {
        skewness: skewness(&z),
        normality_distance: ks_distance_normal(&z),
        effective_samples: res.effective_samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert!((selberg_mean(2, 2.0).unwrap() - (2f64.ln() - 0.5)).abs() < 1e-14);
        assert!(selberg_mean(1, 2.0).is_err());
        assert!(u_beta(0.0).is_err());
    }

    #[test]
    fn autocorrelation_of_iid_is_one() {
        let x: Vec<f64> = (0..4000).map(|i| splitmix(i) as f64 / u64::MAX as f64).collect();
        let t = integrated_autocorrelation(&[x]);
        assert!((t - 1.0).abs() < 0.2, "{t}");
    }
}
