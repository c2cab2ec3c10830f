//! Two-point cluster functions T₂ = 1 − ρ₂ of stationary density-one processes
//! and the large-N limits of E𝒲_N they determine:
//!
//! * 1D: log 2π + ∫_ℝ log|v| T₂(v) dv, finite only when ∫T₂ = 1;
//! * 2D: ∫_{ℝ²} log|v| T₂(v) dv, under the same mass condition.
//!
//! The sine-β kernels for β = 1 and β = 4 are only conditionally integrable
//! against log|v|. Their limits are assembled from absolutely convergent pieces
//! (squared sinc against a logarithm, the integrated-by-parts Si terms) plus the
//! Dirichlet-type integrals, which enter through their closed forms.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::eisenstein::{eisenstein_asymptotic, eisenstein_kronecker, EisensteinConfig, PlanePoint};
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, graded_to_zero, panels, CompensatedSum, Estimate, GaussLegendre};
use crate::specfun::{
    dedekind_eta_at_i, sine_integral_si_big, sine_integral_si_small, Accuracy, EULER_GAMMA, LN_2PI,
};

/// Finite/Divergent gate: |∫T₂ − 1| must not exceed this.
pub const MASS_TOLERANCE: f64 = 1e-4;

/// Largest admissible quadrature error bound on the mass.
pub const MASS_ERROR_LIMIT: f64 = 1e-6;

/// ∫₀^∞ sin u / u du.
pub const DIRICHLET: f64 = FRAC_PI_2;

/// ∫₀^∞ sin u log u / u du = −πγ/2.
pub const DIRICHLET_LOG: f64 = -FRAC_PI_2 * EULER_GAMMA;

/// Truncation radius for InverseSquare/Oscillatory tails in 1D.
const R_POWER_1D: f64 = 1e4;
/// Truncation radius for power tails in 2D.
const R_POWER_2D: f64 = 1e3;
/// Truncation radius for exponential tails.
const R_EXPONENTIAL: f64 = 10.0;
/// Number of full periods for the Si-type integrals (R = 2π · SI_PERIODS).
const SI_PERIODS: f64 = 20_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClusterKind {
    SineBeta1,
    SineBeta2,
    SineBeta4,
    Ginibre,
    Gaf,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TailClass {
    /// Non-oscillating c/|v|^{d+1} decay.
    InverseSquare,
    /// Oscillating around a c/|v|^{d+1} mean.
    Oscillatory,
    Exponential,
}

/// Sampled cluster function on [0, v_max] with a natural cubic spline.
#[derive(Debug, Clone)]
pub struct CubicTable {
    v: Vec<f64>,
    t: Vec<f64>,
    m: Vec<f64>,
}

impl CubicTable {
    /// Knots must be strictly increasing, start at 0, and number at least 4.
    pub fn new(v: Vec<f64>, t: Vec<f64>) -> Result<Self> {
        let n = v.len();
        if n < 4 || t.len() != n {
            return Err(Error::InvalidConfig(
                "cluster table needs at least 4 (v, T2) rows of equal length".into(),
            ));
        }
        if v[0] != 0.0 || v.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidConfig(
                "cluster table abscissae must start at 0 and increase strictly".into(),
            ));
        }
        // Natural spline second derivatives by the tridiagonal (Thomas) solve.
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = v[i] - v[i - 1];
            let h1 = v[i + 1] - v[i];
            let rhs = 6.0 * ((t[i + 1] - t[i]) / h1 - (t[i] - t[i - 1]) / h0);
            let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
            c[i] = h1 / diag;
            d[i] = (rhs - h0 * d[i - 1]) / diag;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        Ok(Self { v, t, m })
    }

    pub fn v_max(&self) -> f64 {
        *self.v.last().unwrap()
    }

    pub fn knots(&self) -> &[f64] {
        &self.v
    }

    /// Spline value at |x| (0 beyond the last knot).
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.abs();
        if x > self.v_max() {
            return 0.0;
        }
        let i = match self.v.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.v.len() - 2),
            Err(i) => i - 1,
        };
        let h = self.v[i + 1] - self.v[i];
        let a = (self.v[i + 1] - x) / h;
        let b = (x - self.v[i]) / h;
        a * self.t[i]
            + b * self.t[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Repr {
    Catalog,
    Function(RadialFn),
    Table(Arc<CubicTable>),
    Dilation {
        inner: Box<ClusterFunction>,
        scale: f64,
        amplitude: f64,
    },
    Sum(Vec<ClusterFunction>),
}

/// A two-point cluster function, evaluated as a function of |v|.
///
/// Custom entries carry a tail coefficient c: beyond the truncation radius T₂
/// is taken to average c/|v|^{d+1}, and that mean is integrated analytically.
#[derive(Clone)]
pub struct ClusterFunction {
    pub kind: ClusterKind,
    pub dimension: usize,
    pub tail_class: TailClass,
    tail_coefficient: f64,
    repr: Repr,
}

impl std::fmt::Debug for ClusterFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ClusterFunction")
            .field("kind", &self.kind)
            .field("dimension", &self.dimension)
            .field("tail_class", &self.tail_class)
            .finish_non_exhaustive()
    }
}

impl ClusterFunction {
    pub fn sine_beta(beta: u32) -> Result<Self> {
        let (kind, tail_class) = match beta {
            1 => (ClusterKind::SineBeta1, TailClass::InverseSquare),
            2 => (ClusterKind::SineBeta2, TailClass::Oscillatory),
            4 => (ClusterKind::SineBeta4, TailClass::Oscillatory),
            _ => {
                return Err(Error::Domain {
                    func: "sine_beta",
                    value: beta as f64,
                })
            }
        };
        Ok(Self {
            kind,
            dimension: 1,
            tail_class,
            tail_coefficient: 0.0,
            repr: Repr::Catalog,
        })
    }

    pub fn ginibre() -> Self {
        Self {
            kind: ClusterKind::Ginibre,
            dimension: 2,
            tail_class: TailClass::Exponential,
            tail_coefficient: 0.0,
            repr: Repr::Catalog,
        }
    }

    pub fn gaf() -> Self {
        Self {
            kind: ClusterKind::Gaf,
            dimension: 2,
            tail_class: TailClass::Exponential,
            tail_coefficient: 0.0,
            repr: Repr::Catalog,
        }
    }

    /// T₂ ≡ 0, the homogeneous Poisson process.
    pub fn poisson(dimension: usize) -> Result<Self> {
        Self::custom(dimension, TailClass::Exponential, 0.0, |_| 0.0)
    }

    /// A radial cluster function given as a closure of |v|.
    pub fn custom<F>(
        dimension: usize,
        tail_class: TailClass,
        tail_coefficient: f64,
        f: F,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_dimension(dimension)?;
        Ok(Self {
            kind: ClusterKind::Custom,
            dimension,
            tail_class,
            tail_coefficient,
            repr: Repr::Function(Arc::new(f)),
        })
    }

    /// A sampled cluster function; zero beyond the last knot except for the
    /// declared c/|v|^{d+1} tail mean.
    pub fn from_table(
        dimension: usize,
        table: CubicTable,
        tail_class: TailClass,
        tail_coefficient: f64,
    ) -> Result<Self> {
        check_dimension(dimension)?;
        Ok(Self {
            kind: ClusterKind::Custom,
            dimension,
            tail_class,
            tail_coefficient,
            repr: Repr::Table(Arc::new(table)),
        })
    }

    /// T(v) = amplitude · inner(v / scale).
    pub fn dilate(&self, scale: f64, amplitude: f64) -> Result<Self> {
        if !(scale > 0.0) || !amplitude.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "dilation needs scale > 0 and finite amplitude (got {scale}, {amplitude})"
            )));
        }
        Ok(Self {
            kind: ClusterKind::Custom,
            dimension: self.dimension,
            tail_class: self.tail_class,
            tail_coefficient: 0.0,
            repr: Repr::Dilation {
                inner: Box::new(self.clone()),
                scale,
                amplitude,
            },
        })
    }

    /// Whether the limit is assembled from a transformed (integrated by parts)
    /// decomposition rather than direct quadrature of log|v| T₂.
    pub fn uses_transformed_form(&self) -> bool {
        matches!(self.kind, ClusterKind::SineBeta1 | ClusterKind::SineBeta4)
            && matches!(self.repr, Repr::Catalog)
    }
}

fn check_dimension(d: usize) -> Result<()> {
    if d == 1 || d == 2 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: 1,
            found: d,
        })
    }
}

/// sin(πv)/(πv).
pub fn sinc_pi(v: f64) -> f64 {
    let x = PI * v;
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// d/dv [sin(πv)/(πv)].
fn sinc_pi_deriv(v: f64) -> f64 {
    let x = PI * v;
    if x.abs() < 1e-3 {
        PI * (-x / 3.0 + x * x * x / 30.0)
    } else {
        PI * (x * x.cos() - x.sin()) / (x * x)
    }
}

/// h(x) = coth x − 2x csch²x + x² csch²x coth x, written through e^{−2x} so
/// it never overflows; Taylor series below 1e−2.
pub fn gaf_h(x: f64) -> f64 {
    let x = x.abs();
    if x < 1e-2 {
        let x2 = x * x;
        return x * (1.0 + x2 * (-2.0 / 9.0 + x2 * (2.0 / 45.0 + x2 * (-4.0 / 525.0 + x2 * 2.0 / 1701.0))));
    }
    let e = (-2.0 * x).exp();
    let one_minus = -(-2.0 * x).exp_m1();
    let coth = (1.0 + e) / one_minus;
    let csch2 = 4.0 * e / (one_minus * one_minus);
    coth - 2.0 * x * csch2 + x * x * csch2 * coth
}

/// T₂ at distance |v| (1D: v itself; 2D: the radius).
pub fn t2_eval(cf: &ClusterFunction, v: f64) -> f64 {
    let v = v.abs();
    match &cf.repr {
        Repr::Catalog => match cf.kind {
            ClusterKind::SineBeta2 => {
                let s = sinc_pi(v);
                s * s
            }
            ClusterKind::SineBeta1 => {
                let s = sinc_pi(v);
                s * s - sinc_pi_deriv(v) * sine_integral_si_small(PI * v) / PI
            }
            ClusterKind::SineBeta4 => {
                let s = sinc_pi(2.0 * v);
                s * s - 2.0 * sinc_pi_deriv(2.0 * v) * sine_integral_si_big(2.0 * PI * v) / (2.0 * PI)
            }
            ClusterKind::Ginibre => (-PI * v * v).exp(),
            ClusterKind::Gaf => 1.0 - gaf_h(0.5 * PI * v * v),
            ClusterKind::Custom => unreachable!("custom entries never use the catalog repr"),
        },
        Repr::Function(f) => f(v),
        Repr::Table(t) => t.eval(v),
        Repr::Dilation {
            inner,
            scale,
            amplitude,
        } => amplitude * t2_eval(inner, v / scale),
        Repr::Sum(parts) => parts.iter().map(|p| t2_eval(p, v)).sum(),
    }
}

/// ∫T₂ and ∫log|v|T₂ over ℝ^d, each with an error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mass: Estimate,
    pub log_moment: Estimate,
}

fn acc() -> Accuracy {
    Accuracy::new(1e-14, 1e-13, 2_000).unwrap()
}

/// 2∫₀^∞ g(v) w(v) dv with g oscillating at unit period and averaging
/// c/v² for large v: dyadic grading on (0, 1], unit panels to R, analytic
/// mean tail for both w = 1 and w = log(κv).
fn half_line_pair<G: Fn(f64) -> f64>(
    g: &G,
    kappa: f64,
    r: f64,
    tail_c: f64,
) -> Result<(Estimate, Estimate)> {
    let a = acc();
    let m0 = graded_to_zero(g, 1.0, 60, &a)? + panels(g, 1.0, r, 1.0, &a)?;
    let lg = |v: f64| g(v) * (kappa * v).ln();
    let l0 = graded_to_zero(&lg, 1.0, 60, &a)? + panels(&lg, 1.0, r, 1.0, &a)?;
    let lr = (kappa * r).ln();
    let m_tail = tail_c / r;
    let l_tail = tail_c * (lr + 1.0) / r;
    // Oscillating remainder beyond an integer R, after one integration by parts.
    let osc = tail_c.abs().max(1e-300) * (lr.abs() + 1.0) / (PI * r * r);
    Ok((
        Estimate::new(2.0 * (m0.value + m_tail), 2.0 * (m0.error + osc / lr.abs().max(1.0))),
        Estimate::new(2.0 * (l0.value + l_tail), 2.0 * (l0.error + osc)),
    ))
}

/// Full-line moments of the sine β = 2 kernel, with the log weight log(2πv).
fn sine2_pieces() -> Result<(Estimate, Estimate)> {
    let g = |v: f64| {
        let s = sinc_pi(v);
        s * s
    };
    half_line_pair(&g, 2.0 * PI, R_POWER_1D, 1.0 / (2.0 * PI * PI))
}

/// 4∫₀^∞ (sin 2πv / 2πv)² dv and 4∫₀^∞ (sin 2πv / 2πv)² log(2πv) dv.
fn sine4_square_pieces() -> Result<(Estimate, Estimate)> {
    let g = |v: f64| {
        let s = sinc_pi(2.0 * v);
        s * s
    };
    let (m, l) = half_line_pair(&g, 2.0 * PI, R_POWER_1D, 1.0 / (8.0 * PI * PI))?;
    Ok((m * 2.0, l * 2.0))
}

/// (2/π)∫₀^∞ (sin u/u − 1) si(u) du/u, which vanishes.
pub fn beta1_cross_term() -> Result<Estimate> {
    let f = |u: f64| {
        let s = if u < 1e-4 { 1.0 - u * u / 6.0 } else { u.sin() / u };
        let num = if u < 1e-4 { -u * u / 6.0 } else { s - 1.0 };
        num * sine_integral_si_small(u) / u
    };
    let r = 2.0 * PI * SI_PERIODS;
    let q = panels(&f, 0.0, r, PI, &acc())?;
    Ok(Estimate::new(2.0 / PI * q.value, 2.0 / PI * (q.error + 1.0 / (r * r))))
}

/// (1/π)∫₀^∞ Si(u) sin u / u² du, which equals 1/2.
pub fn beta4_si_term() -> Result<Estimate> {
    let f = |u: f64| {
        if u < 1e-4 {
            1.0 - u * u * (1.0 / 6.0 + 1.0 / 18.0)
        } else {
            sine_integral_si_big(u) * u.sin() / (u * u)
        }
    };
    let r = 2.0 * PI * SI_PERIODS;
    let q = panels(&f, 0.0, r, PI, &acc())?;
    // Beyond R = 2πK: Si ≈ π/2 and ∫_R^∞ sin u/u² du = 1/R² + O(R⁻⁴).
    let tail = 0.5 / (r * r);
    Ok(Estimate::new(q.value / PI + tail, q.error / PI + 1.0 / (r * r * r)))
}

/// −(2/π)∫₀^∞ log(2πv) sin(πv)/v dv = −(2/π)(∫ sin u log u/u + log 2 ∫ sin u/u).
pub fn beta1_dirichlet_term() -> f64 {
    -2.0 / PI * (DIRICHLET_LOG + LN_2 * DIRICHLET)
}

/// Moments for catalog and composite cluster functions.
pub fn moments(cf: &ClusterFunction) -> Result<Moments> {
    match &cf.repr {
        Repr::Catalog => catalog_moments(cf.kind),
        Repr::Function(f) => {
            let f = f.clone();
            generic_moments(&move |v| f(v), cf.dimension, cf.tail_class, cf.tail_coefficient)
        }
        Repr::Table(t) => table_moments(t, cf.dimension, cf.tail_class, cf.tail_coefficient),
        Repr::Dilation {
            inner,
            scale,
            amplitude,
        } => {
            let m = moments(inner)?;
            let jac = amplitude * scale.powi(cf.dimension as i32);
            let ln = scale.ln();
            Ok(Moments {
                mass: m.mass * jac,
                log_moment: Estimate::new(
                    jac * (ln * m.mass.value + m.log_moment.value),
                    jac.abs() * (ln.abs() * m.mass.error + m.log_moment.error),
                ),
            })
        }
        Repr::Sum(parts) => {
            let mut out = Moments {
                mass: Estimate::default(),
                log_moment: Estimate::default(),
            };
            for p in parts {
                let m = moments(p)?;
                out.mass = out.mass + m.mass;
                out.log_moment = out.log_moment + m.log_moment;
            }
            Ok(out)
        }
    }
}

fn catalog_moments(kind: ClusterKind) -> Result<Moments> {
    match kind {
        ClusterKind::SineBeta2 => {
            let (mass, l2pi) = sine2_pieces()?;
            Ok(Moments {
                mass,
                log_moment: Estimate::new(l2pi.value - LN_2PI * mass.value, l2pi.error + LN_2PI * mass.error),
            })
        }
        ClusterKind::SineBeta1 => {
            // ∫T₂ = 4∫₀^∞ sinc² − 1 and
            // ∫log|2πv|T₂ = 4∫₀^∞ sinc² log 2πv + cross term + Dirichlet term.
            let (m2, l2) = sine2_pieces()?;
            let mass = Estimate::new(2.0 * m2.value - 1.0, 2.0 * m2.error);
            let cross = beta1_cross_term()?;
            let l2pi = 2.0 * l2.value + cross.value + beta1_dirichlet_term();
            Ok(Moments {
                mass,
                log_moment: Estimate::new(
                    l2pi - LN_2PI * mass.value,
                    2.0 * l2.error + cross.error + LN_2PI * mass.error,
                ),
            })
        }
        ClusterKind::SineBeta4 => {
            // ∫T₂ = 4∫₀^∞ sinc²(2v) and
            // ∫log|2πv|T₂ = 4∫₀^∞ sinc²(2v) log 2πv + (1/π)∫₀^∞ Si(u) sin u/u² du.
            let (mass, l4) = sine4_square_pieces()?;
            let si = beta4_si_term()?;
            Ok(Moments {
                mass,
                log_moment: Estimate::new(
                    l4.value + si.value - LN_2PI * mass.value,
                    l4.error + si.error + LN_2PI * mass.error,
                ),
            })
        }
        ClusterKind::Ginibre => {
            generic_moments(&|r: f64| (-PI * r * r).exp(), 2, TailClass::Exponential, 0.0)
        }
        ClusterKind::Gaf => generic_moments(
            &|r: f64| 1.0 - gaf_h(0.5 * PI * r * r),
            2,
            TailClass::Exponential,
            0.0,
        ),
        ClusterKind::Custom => Err(Error::InvalidConfig("custom kind has no catalog entry".into())),
    }
}

fn truncation_radius(dimension: usize, class: TailClass) -> f64 {
    match (class, dimension) {
        (TailClass::Exponential, _) => R_EXPONENTIAL,
        (_, 1) => R_POWER_1D,
        _ => R_POWER_2D,
    }
}

/// Direct quadrature of the radial moments for a smooth-enough T₂.
fn generic_moments<F: Fn(f64) -> f64>(
    f: &F,
    dimension: usize,
    class: TailClass,
    tail_c: f64,
) -> Result<Moments> {
    let r = truncation_radius(dimension, class);
    if dimension == 1 {
        let (mass, log_moment) = half_line_pair(f, 1.0, r, tail_c)?;
        return Ok(Moments { mass, log_moment });
    }
    let a = acc();
    let w = |x: f64| 2.0 * PI * x * f(x);
    let lw = |x: f64| 2.0 * PI * x * x.ln() * f(x);
    let width = if class == TailClass::Exponential { 0.25 } else { 1.0 };
    let m = graded_to_zero(&w, width, 40, &a)? + panels(&w, width, r, width, &a)?;
    let l = graded_to_zero(&lw, width, 40, &a)? + panels(&lw, width, r, width, &a)?;
    // Power tail T₂ ~ c/r³ in the plane: 2πc/R and 2πc(log R + 1)/R.
    let (mt, lt, bound) = if class == TailClass::Exponential {
        (0.0, 0.0, 0.0)
    } else {
        let c = 2.0 * PI * tail_c;
        (c / r, c * (r.ln() + 1.0) / r, c.abs() * (r.ln() + 1.0) / (r * r))
    };
    Ok(Moments {
        mass: Estimate::new(m.value + mt, m.error + bound),
        log_moment: Estimate::new(l.value + lt, l.error + bound),
    })
}

fn table_moments(
    t: &CubicTable,
    dimension: usize,
    class: TailClass,
    tail_c: f64,
) -> Result<Moments> {
    let a = acc();
    let knots = t.knots();
    let weight = |x: f64| if dimension == 1 { 2.0 } else { 2.0 * PI * x };
    let mut mass = CompensatedSum::new();
    let mut logm = CompensatedSum::new();
    let mut err = 0.0;
    for (k, w) in knots.windows(2).enumerate() {
        let f = |x: f64| weight(x) * t.eval(x);
        let g = |x: f64| weight(x) * x.ln() * t.eval(x);
        let m = adaptive(&f, w[0], w[1], &a)?;
        let l = if k == 0 {
            // log singularity at the origin: grade toward it.
            let shifted = |x: f64| g(x);
            graded_to_zero(&shifted, w[1], 60, &a)?
        } else {
            adaptive(&g, w[0], w[1], &a)?
        };
        mass.add(m.value);
        logm.add(l.value);
        err += m.error + l.error;
    }
    let r = t.v_max();
    let (mt, lt) = match (class, dimension) {
        (TailClass::Exponential, _) => (0.0, 0.0),
        (_, 1) => (2.0 * tail_c / r, 2.0 * tail_c * (r.ln() + 1.0) / r),
        _ => (2.0 * PI * tail_c / r, 2.0 * PI * tail_c * (r.ln() + 1.0) / r),
    };
    Ok(Moments {
        mass: Estimate::new(mass.value() + mt, err),
        log_moment: Estimate::new(logm.value() + lt, err),
    })
}

/// ∫T₂ over ℝ^d with its error bound.
pub fn t2_mass(cf: &ClusterFunction) -> Result<(f64, f64)> {
    let m = moments(cf)?.mass;
    if m.error > MASS_ERROR_LIMIT {
        return Err(Error::Quadrature {
            context: "t2_mass",
            bound: m.error,
            limit: MASS_ERROR_LIMIT,
        });
    }
    Ok((m.value, m.error))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LimitStatus {
    Finite(f64),
    Divergent,
}

/// lim E𝒲_N with the diagnostics that decided it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationLimit {
    pub status: LimitStatus,
    pub mass: f64,
    pub mass_error: f64,
    pub quadrature_error: f64,
}

impl ExpectationLimit {
    pub fn value(&self) -> Option<f64> {
        match self.status {
            LimitStatus::Finite(v) => Some(v),
            LimitStatus::Divergent => None,
        }
    }
}

fn limit_from(m: Moments, offset: f64) -> Result<ExpectationLimit> {
    if m.mass.error > MASS_ERROR_LIMIT {
        return Err(Error::Quadrature {
            context: "expectation mass",
            bound: m.mass.error,
            limit: MASS_ERROR_LIMIT,
        });
    }
    let status = if (m.mass.value - 1.0).abs() <= MASS_TOLERANCE {
        LimitStatus::Finite(offset + m.log_moment.value)
    } else {
        LimitStatus::Divergent
    };
    Ok(ExpectationLimit {
        status,
        mass: m.mass.value,
        mass_error: m.mass.error,
        quadrature_error: m.log_moment.error,
    })
}

/// log 2π + ∫ log|v| T₂(v) dv, or Divergent when ∫T₂ ≠ 1.
pub fn expectation_limit_1d(cf: &ClusterFunction) -> Result<ExpectationLimit> {
    if cf.dimension != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: cf.dimension,
        });
    }
    limit_from(moments(cf)?, LN_2PI)
}

/// ∫_{ℝ²} log|v| T₂(v) dv, or Divergent when ∫T₂ ≠ 1.
pub fn expectation_limit_2d(cf: &ClusterFunction) -> Result<ExpectationLimit> {
    if cf.dimension != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: cf.dimension,
        });
    }
    limit_from(moments(cf)?, 0.0)
}

/// Superposition of M independent processes, rescaled to density one:
/// T₂(v) = (1/M²) Σ T₂⁽ⁱ⁾(v/M).
pub fn superpose(cfs: &[ClusterFunction], m: usize) -> Result<ClusterFunction> {
    if m == 0 || cfs.len() != m {
        return Err(Error::InvalidConfig(format!(
            "superpose needs exactly M = {m} processes, got {}",
            cfs.len()
        )));
    }
    for cf in cfs {
        if cf.dimension != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: cf.dimension,
            });
        }
    }
    let mf = m as f64;
    let parts = cfs
        .iter()
        .map(|cf| cf.dilate(mf, 1.0 / (mf * mf)))
        .collect::<Result<Vec<_>>>()?;
    let tail_class = if cfs.iter().any(|c| c.tail_class == TailClass::Oscillatory) {
        TailClass::Oscillatory
    } else if cfs.iter().any(|c| c.tail_class == TailClass::InverseSquare) {
        TailClass::InverseSquare
    } else {
        TailClass::Exponential
    };
    Ok(ClusterFunction {
        kind: ClusterKind::Custom,
        dimension: 1,
        tail_class,
        tail_coefficient: 0.0,
        repr: Repr::Sum(parts),
    })
}

/// Independent deletion with probability 1/2 followed by rescaling to density
/// one: T₂′(v) = T₂(2v), whose mass is 1/2.
pub fn random_decimation(cf: &ClusterFunction) -> Result<ClusterFunction> {
    if cf.dimension != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: cf.dimension,
        });
    }
    cf.dilate(0.5, 1.0)
}

/// ρ log ρ + (2/ρ) Σ_{u≥1} (sin(ρπu)/(πu))² log(2πρu) with its tail bound.
///
/// The series is summed directly up to U, chosen so that the oscillating tail
/// bound (1/ρ)·g(U)/sin(πρ), g(u) = log(2πρu)/(π²u²), is below 1e−8. The
/// non-oscillating half of the tail, (1/ρ) Σ_{u>U} g(u), is added by
/// Euler–Maclaurin.
pub fn discrete_sine_expectation_with_error(rho: f64) -> Result<Estimate> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::Domain {
            func: "discrete_sine_expectation",
            value: rho,
        });
    }
    if rho == 1.0 {
        return Ok(Estimate::new(0.0, 0.0));
    }
    let c = 2.0 * PI * rho;
    let g = |u: f64| (c * u).ln() / (PI * PI * u * u);
    let sin_pr = (PI * rho).sin();
    let bound = |u: f64| g(u).abs() / (rho * sin_pr);
    let mut big_u = 1024.0f64;
    while (bound(big_u) > 1e-8 || c * big_u < 2.0) && big_u < 1e9 {
        big_u *= 2.0;
    }
    let n = big_u as u64;
    let mut sum = CompensatedSum::new();
    for u in 1..=n {
        let uf = u as f64;
        let s = (PI * ((rho * uf) % 2.0)).sin() / (PI * uf);
        sum.add(s * s * (c * uf).ln());
    }
    let uf = n as f64;
    let integral = ((c * uf).ln() + 1.0) / (PI * PI * uf);
    let dg = (1.0 - 2.0 * (c * uf).ln()) / (PI * PI * uf * uf * uf);
    let mean_tail = (integral - 0.5 * g(uf) - dg / 12.0) / rho;
    Ok(Estimate::new(
        rho * rho.ln() + 2.0 / rho * sum.value() + mean_tail,
        bound(uf),
    ))
}

/// Limit of E𝒲_N for the discrete sine process of density ρ on ℤ (rescaled).
pub fn discrete_sine_expectation(rho: f64) -> Result<f64> {
    Ok(discrete_sine_expectation_with_error(rho)?.value)
}

/// Exact E𝒲_N for a stationary density-one planar process restricted to
/// [0, N)² and periodized:
/// −(1/2π) ∫_{[−N,N]²} E_N(v) T₂(v) (1 − |v₁|/N)(1 − |v₂|/N) dv + log(N/(2πη(i)²)).
///
/// The ρ₁ρ₁ part drops out because E_N has zero mean on the torus. Used as
/// the finite-window oracle for planar Monte Carlo runs; only exponential
/// tails are supported.
pub fn finite_window_expectation_2d(cf: &ClusterFunction, n: f64, ecfg: &EisensteinConfig) -> Result<f64> {
    if cf.dimension != 2 {
        return Err(Error::DimensionMismatch { expected: 2, found: cf.dimension });
    }
    if cf.tail_class != TailClass::Exponential {
        return Err(Error::InvalidConfig("finite-window expectation needs an exponential tail".into()));
    }
    if !(n > 0.0) {
        return Err(Error::Domain { func: "finite_window_expectation_2d", value: n });
    }
    ecfg.validate()?;
    let a = Accuracy::new(1e-11, 1e-10, 2_000)?;
    let kernel = |x: PlanePoint| {
        eisenstein_kronecker(x, n, ecfg).unwrap_or_else(|_| eisenstein_asymptotic(x, n))
    };
    // 8-fold symmetry: the triangle 0 ≤ v₂ ≤ v₁ ≤ N in polar coordinates.
    let rule = GaussLegendre::new(32);
    let h = 0.125 * PI;
    let mut total = CompensatedSum::new();
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let phi = h * (1.0 + x);
        let (c, s) = (phi.cos(), phi.sin());
        let r_max = (n / c).min(R_EXPONENTIAL);
        let f = |r: f64| {
            let v = PlanePoint::new(r * c, r * s);
            let wt = (1.0 - v.re / n).max(0.0) * (1.0 - v.im / n).max(0.0);
            r * kernel(v) * t2_eval(cf, r) * wt
        };
        let width = 0.25f64.min(r_max);
        let line = graded_to_zero(&f, width, 30, &a)? + panels(&f, width, r_max, 0.25, &a)?;
        total.add(w * h * line.value);
    }
    let eta = dedekind_eta_at_i(ecfg.product_terms);
    Ok(-8.0 * total.value() / (2.0 * PI) + (n / (2.0 * PI * eta * eta)).ln())
}
