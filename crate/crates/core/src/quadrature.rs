//! Gauss–Legendre based quadrature: adaptive bisection, unit panels, dyadic
//! grading toward a logarithmic endpoint singularity, and half-period summation
//! with Wynn's epsilon for conditionally convergent oscillatory tails.
//!
//! Every routine combines partial results in a fixed left-to-right order, so
//! results never depend on evaluation scheduling.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::specfun::Accuracy;

/// A quadrature value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Self { value, error }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate::new(self.value + o.value, self.error + o.error)
    }
}

impl std::ops::Mul<f64> for Estimate {
    type Output = Estimate;
    fn mul(self, s: f64) -> Estimate {
        Estimate::new(self.value * s, self.error * s.abs())
    }
}

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on P_n from the Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// ∫_a^b f.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Shared 15-point rule.
pub fn gl15() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(15))
}

/// Adaptive bisection on [a, b]: each interval is compared against the sum of
/// its halves and split until the difference meets its share of the tolerance.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, acc: &Accuracy) -> Result<Estimate> {
    let rule = gl15();
    let total_len = (b - a).abs();
    if total_len == 0.0 {
        return Ok(Estimate::default());
    }
    let whole = rule.integrate(f, a, b);
    let mut stack = vec![(a, b, whole, 0usize)];
    let mut sum = CompensatedSum::new();
    let mut err = 0.0;
    let mut evaluations = 0usize;
    let tol = acc.abs_tol.max(acc.rel_tol * whole.abs());
    // Depth-first, left child first: a fixed canonical order.
    while let Some((lo, hi, est, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(f, lo, mid);
        let right = rule.integrate(f, mid, hi);
        evaluations += 1;
        let refined = left + right;
        let diff = (refined - est).abs();
        let share = tol * (hi - lo).abs() / total_len;
        if diff <= share || depth >= 50 || evaluations >= acc.max_terms {
            sum.add(refined);
            err += diff;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    let value = sum.value();
    if !value.is_finite() {
        return Err(Error::Quadrature {
            context: "adaptive",
            bound: f64::INFINITY,
            limit: tol,
        });
    }
    Ok(Estimate::new(value, err))
}

/// ∫_a^b f over consecutive panels of the given width, each integrated
/// adaptively, summed left to right.
pub fn panels<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    width: f64,
    acc: &Accuracy,
) -> Result<Estimate> {
    let count = ((b - a) / width).ceil().max(1.0) as usize;
    let mut sum = CompensatedSum::new();
    let mut err = 0.0;
    for k in 0..count {
        let lo = a + k as f64 * width;
        let hi = if k + 1 == count {
            b
        } else {
            a + (k + 1) as f64 * width
        };
        let e = adaptive(f, lo, hi, acc)?;
        sum.add(e.value);
        err += e.error;
    }
    Ok(Estimate::new(sum.value(), err))
}

/// ∫_0^b f for integrands with an integrable (logarithmic) singularity at 0:
/// dyadic intervals [b 2^{−k−1}, b 2^{−k}] for k < levels, with the innermost
/// piece taken by the open Gauss rule.
pub fn graded_to_zero<F: Fn(f64) -> f64>(
    f: &F,
    b: f64,
    levels: usize,
    acc: &Accuracy,
) -> Result<Estimate> {
    let mut sum = CompensatedSum::new();
    let mut err = 0.0;
    let mut hi = b;
    for _ in 0..levels {
        let lo = 0.5 * hi;
        let e = adaptive(f, lo, hi, acc)?;
        sum.add(e.value);
        err += e.error;
        hi = lo;
    }
    let inner = gl15().integrate(f, 0.0, hi);
    sum.add(inner);
    err += inner.abs();
    Ok(Estimate::new(sum.value(), err))
}

/// Wynn's epsilon extrapolation of a sequence of partial sums. Returns the
/// extrapolated limit and the difference between the last two even-column
/// estimates as an error indicator.
pub fn wynn_epsilon(partial: &[f64]) -> Estimate {
    let n = partial.len();
    if n < 3 {
        let v = *partial.last().unwrap_or(&0.0);
        return Estimate::new(v, f64::INFINITY);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = partial.to_vec();
    let mut best = *partial.last().unwrap();
    let mut best_prev = partial[n - 2];
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            let inv = if d == 0.0 { f64::INFINITY } else { 1.0 / d };
            next.push(prev[j + 1] + inv);
        }
        k += 1;
        prev = cur;
        cur = next;
        if k % 2 == 0 {
            let cand = *cur.last().unwrap();
            if !cand.is_finite() {
                break;
            }
            best_prev = best;
            best = cand;
        }
    }
    Estimate::new(best, (best - best_prev).abs())
}

/// ∫_a^∞ f for an integrand oscillating with the given half period: integrate
/// over `count` consecutive half periods and extrapolate the partial sums.
pub fn oscillatory_tail<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    half_period: f64,
    count: usize,
    acc: &Accuracy,
) -> Result<Estimate> {
    let mut partial = Vec::with_capacity(count);
    let mut sum = CompensatedSum::new();
    let mut qerr = 0.0;
    for k in 0..count {
        let lo = a + k as f64 * half_period;
        let e = adaptive(f, lo, lo + half_period, acc)?;
        sum.add(e.value);
        qerr += e.error;
        partial.push(sum.value());
    }
    // Extrapolate from the last stretch only; early terms carry no tail information.
    let tail_len = partial.len().min(24);
    let w = wynn_epsilon(&partial[partial.len() - tail_len..]);
    Ok(Estimate::new(w.value, w.error + qerr))
}
