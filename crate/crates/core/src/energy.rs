//! 𝒲_N for explicit configurations on the circle of length N and on the square
//! torus of side N, plus the 1D lower bound.
//!
//! 1D:  𝒲_N = −(1/N) Σ_{i≠j} log|2 sin(π(a_i − a_j)/N)| + log N
//! 2D:  𝒲_N = (1/(2πN²)) Σ_{i≠j} E_N(a_i − a_j) + log(N / (2π η(i)²))
//!
//! Sums run over ordered pairs. Rows are computed independently (possibly in
//! parallel) and then reduced in index order with compensated summation, so the
//! value does not depend on the thread count.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eisenstein::{kronecker_reduced, EisensteinConfig, PlanePoint};
use crate::error::{Error, Result};
use crate::quadrature::CompensatedSum;
use crate::specfun::{dedekind_eta_at_i, log_2sin};

/// Points on the circle ℝ/Nℤ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConfiguration1D {
    pub points: Vec<f64>,
    pub window: f64,
}

impl PointConfiguration1D {
    /// Builds a configuration, wrapping every point into [0, window).
    pub fn new(points: Vec<f64>, window: f64) -> Result<Self> {
        check_window(window)?;
        let mut points = points;
        for p in points.iter_mut() {
            if !p.is_finite() {
                return Err(Error::InvalidConfig(format!("non-finite coordinate {p}")));
            }
            *p = wrap(*p, window);
        }
        Ok(Self { points, window })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Points on the square torus ℝ²/Nℤ².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConfiguration2D {
    pub points: Vec<PlanePoint>,
    pub window: f64,
}

impl PointConfiguration2D {
    /// Builds a configuration, wrapping every point into [0, window)².
    pub fn new(points: Vec<PlanePoint>, window: f64) -> Result<Self> {
        check_window(window)?;
        let mut points = points;
        for p in points.iter_mut() {
            if !(p.re.is_finite() && p.im.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "non-finite coordinate ({}, {})",
                    p.re, p.im
                )));
            }
            *p = PlanePoint::new(wrap(p.re, window), wrap(p.im, window));
        }
        Ok(Self { points, window })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn check_window(window: f64) -> Result<()> {
    if window > 0.0 && window.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("window must be positive, got {window}")))
    }
}

fn wrap(x: f64, n: f64) -> f64 {
    let r = x.rem_euclid(n);
    if r >= n {
        0.0
    } else {
        r
    }
}

/// Energy value with pair diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub value: f64,
    /// Ordered pairs, k(k − 1).
    pub pair_count: usize,
    pub point_count: usize,
    /// Smallest torus distance between two points (infinite for k < 2).
    pub min_gap: f64,
}

fn circle_distance(d: f64, n: f64) -> f64 {
    let r = d.rem_euclid(n);
    r.min(n - r)
}

/// 𝒲_N on the circle of length N.
pub fn energy_1d(cfg: &PointConfiguration1D) -> Result<EnergyReport> {
    let n = cfg.window;
    let pts = &cfg.points;
    let k = pts.len();
    let rows: Vec<Result<(f64, f64)>> = (0..k)
        .into_par_iter()
        .map(|i| {
            let mut row = CompensatedSum::new();
            let mut gap = f64::INFINITY;
            for j in 0..k {
                if i == j {
                    continue;
                }
                let d = pts[i] - pts[j];
                let term = log_2sin(d, n).map_err(|_| Error::CoincidentPoints {
                    i: i.min(j),
                    j: i.max(j),
                })?;
                row.add(term);
                gap = gap.min(circle_distance(d, n));
            }
            Ok((row.value(), gap))
        })
        .collect();
    let mut sum = CompensatedSum::new();
    let mut min_gap = f64::INFINITY;
    for r in rows {
        let (s, g) = r?;
        sum.add(s);
        min_gap = min_gap.min(g);
    }
    Ok(EnergyReport {
        value: -sum.value() / n + n.ln(),
        pair_count: k * k.saturating_sub(1),
        point_count: k,
        min_gap,
    })
}

/// The same energy written through z_j = e^{2πi a_j/N}:
/// −(1/N) Σ_{i≠j} log|z_i − z_j| + log N.
pub fn energy_1d_circular(cfg: &PointConfiguration1D) -> Result<f64> {
    let n = cfg.window;
    let z: Vec<(f64, f64)> = cfg
        .points
        .iter()
        .map(|&a| {
            let t = 2.0 * PI * a / n;
            (t.cos(), t.sin())
        })
        .collect();
    let mut sum = CompensatedSum::new();
    for i in 0..z.len() {
        for j in 0..z.len() {
            if i == j {
                continue;
            }
            let d = (z[i].0 - z[j].0).hypot(z[i].1 - z[j].1);
            if d == 0.0 {
                return Err(Error::CoincidentPoints {
                    i: i.min(j),
                    j: i.max(j),
                });
            }
            sum.add(d.ln());
        }
    }
    Ok(-sum.value() / n + n.ln())
}

/// 𝒲_N on the square torus of side N, with E_N from the Kronecker formula.
pub fn energy_2d(cfg: &PointConfiguration2D, ecfg: &EisensteinConfig) -> Result<EnergyReport> {
    ecfg.validate()?;
    let n = cfg.window;
    let pts = &cfg.points;
    let k = pts.len();
    let rows: Vec<Result<(f64, f64)>> = (0..k)
        .into_par_iter()
        .map(|i| {
            let mut row = CompensatedSum::new();
            let mut gap = f64::INFINITY;
            for j in 0..k {
                if i == j {
                    continue;
                }
                let d = pts[i] - pts[j];
                let u = centered(d.re / n);
                let v = centered(d.im / n);
                let r = u.hypot(v);
                if r == 0.0 {
                    return Err(Error::CoincidentPoints {
                        i: i.min(j),
                        j: i.max(j),
                    });
                }
                if r < ecfg.singularity_radius {
                    return Err(Error::Singularity {
                        func: "energy_2d",
                        value: r * n,
                    });
                }
                row.add(kronecker_reduced(u, v, ecfg.product_terms));
                gap = gap.min(r * n);
            }
            Ok((row.value(), gap))
        })
        .collect();
    let mut sum = CompensatedSum::new();
    let mut min_gap = f64::INFINITY;
    for r in rows {
        let (s, g) = r?;
        sum.add(s);
        min_gap = min_gap.min(g);
    }
    let eta = dedekind_eta_at_i(ecfg.product_terms);
    let constant = (n / (2.0 * PI * eta * eta)).ln();
    Ok(EnergyReport {
        value: sum.value() / (2.0 * PI * n * n) + constant,
        pair_count: k * k.saturating_sub(1),
        point_count: k,
        min_gap,
    })
}

fn centered(t: f64) -> f64 {
    let r = t - t.floor();
    if r >= 0.5 {
        r - 1.0
    } else {
        r
    }
}

/// (1 − k/N) log N + (k/N) log(N/k): the minimum of 𝒲_N over k points on the
/// circle of length N, attained by equally spaced points.
pub fn lower_bound_1d(k: usize, n: f64) -> Result<f64> {
    if k == 0 || !(n > 0.0) {
        return Err(Error::Domain {
            func: "lower_bound_1d",
            value: n,
        });
    }
    let r = k as f64 / n;
    Ok((1.0 - r) * n.ln() + r * (n / k as f64).ln())
}
