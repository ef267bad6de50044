//! Kinetic potentials: the Legendre-dual description of an energy curve.
//!
//! An energy curve `F(v)` (concave) and its kinetic potential `f̄(s)` (convex,
//! decreasing) are related by
//!
//! ```text
//! s = F(v) - v F'(v),   f̄(s) = F'(v)
//! 1/v = -f̄'(s),         F(v)/v = f̄(s) - s f̄'(s)
//! ```
//!
//! and `F(v) = min_{s>0} [s + v f̄(s)]`. For pure powers
//! `f̄(s) = sgn(q) (P / s^{1/2})^q`, and the substitution `r = P/s^{1/2}` turns
//! the minimization into `min_{r>0} [(P/r)^2 + v f(r)]`.

use crate::error::{Error, Result};
use crate::numerics::{bisect_root, richardson_diff, DerivOrder, LogSearch, Minimum, Tolerance};
use crate::oracle::solve_at;
use crate::potential::{definite_convexity, PotentialShape};
use crate::spectra::{PowerLawSpectrum, QuantumNumbers};

/// Relative step for numerical derivatives of sampled curves.
pub const CURVE_STEP: f64 = 1e-4;

/// `v -> F_n(v)`.
pub trait EnergyCurve {
    fn value(&self, v: f64) -> f64;

    fn derivative(&self, v: f64) -> f64 {
        richardson_diff(|x| self.value(x), v, DerivOrder::First, CURVE_STEP * v)
    }
}

/// `F(v) = E1 · v^{2/(2+q)}` with analytic derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawCurve {
    pub e1: f64,
    pub q: f64,
}

impl PowerLawCurve {
    fn exponent(&self) -> f64 {
        2.0 / (2.0 + self.q)
    }
}

impl From<&PowerLawSpectrum> for PowerLawCurve {
    fn from(s: &PowerLawSpectrum) -> Self {
        Self { e1: s.e1, q: s.q }
    }
}

impl EnergyCurve for PowerLawCurve {
    fn value(&self, v: f64) -> f64 {
        self.e1 * v.powf(self.exponent())
    }

    fn derivative(&self, v: f64) -> f64 {
        let a = self.exponent();
        self.e1 * a * v.powf(a - 1.0)
    }
}

/// Curve given by a closure; derivatives by Richardson differences.
pub struct FnCurve<F>(pub F);

impl<F: Fn(f64) -> f64> EnergyCurve for FnCurve<F> {
    fn value(&self, v: f64) -> f64 {
        (self.0)(v)
    }
}

/// Curve evaluated point by point with the shooting solver. Failed solves
/// evaluate to NaN.
#[derive(Debug, Clone)]
pub struct OracleCurve {
    pub f: PotentialShape,
    pub qn: QuantumNumbers,
    pub tol: Tolerance,
}

impl OracleCurve {
    pub fn new(f: PotentialShape, qn: QuantumNumbers) -> Self {
        Self {
            f,
            qn,
            tol: Tolerance::new(1e-12, 1e-14, 400).expect("valid tolerance"),
        }
    }
}

impl EnergyCurve for OracleCurve {
    fn value(&self, v: f64) -> f64 {
        solve_at(&self.f, self.qn, v, self.tol).map_or(f64::NAN, |r| r.energy)
    }
}

/// `s -> f̄_n(s)`.
pub trait KineticPotential {
    fn value(&self, s: f64) -> f64;

    fn derivative(&self, s: f64) -> f64 {
        richardson_diff(|x| self.value(x), s, DerivOrder::First, CURVE_STEP * s)
    }
}

/// `f̄(s) = scale · sgn(q) (P/s^{1/2})^q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerKinetic {
    pub q: f64,
    pub p: f64,
    pub scale: f64,
}

impl PowerKinetic {
    pub fn new(q: f64, p: f64) -> Self {
        Self { q, p, scale: 1.0 }
    }
}

impl KineticPotential for PowerKinetic {
    fn value(&self, s: f64) -> f64 {
        self.scale * power_kinetic(self.q, self.p, s)
    }

    fn derivative(&self, s: f64) -> f64 {
        // d/ds (P s^{-1/2})^q = -(q/2) (P s^{-1/2})^q / s
        -0.5 * self.q * self.value(s) / s
    }
}

pub fn power_kinetic(q: f64, p: f64, s: f64) -> f64 {
    q.signum() * (p / s.sqrt()).powf(q)
}

/// Kinetic potential of an energy curve, evaluated by inverting
/// `s(v) = F(v) - v F'(v)` for the coupling.
pub struct LegendreKinetic<C> {
    pub curve: C,
}

impl<C: EnergyCurve> LegendreKinetic<C> {
    pub fn new(curve: C) -> Self {
        Self { curve }
    }

    /// The coupling `v` at which the curve has kinetic energy `s`.
    pub fn coupling_at(&self, s: f64) -> Result<f64> {
        let gap = |y: f64| {
            let v = y.exp();
            self.curve.value(v) - v * self.curve.derivative(v) - s
        };
        let tol = Tolerance::new(1e-14, f64::MIN_POSITIVE, 400)?;
        bisect_root(gap, (1e-12f64).ln(), (1e12f64).ln(), tol).map(f64::exp)
    }
}

impl<C: EnergyCurve> KineticPotential for LegendreKinetic<C> {
    fn value(&self, s: f64) -> f64 {
        self.coupling_at(s)
            .map_or(f64::NAN, |v| self.curve.derivative(v))
    }

    fn derivative(&self, s: f64) -> f64 {
        self.coupling_at(s).map_or(f64::NAN, |v| -1.0 / v)
    }
}

/// `(s, f̄(s))` from `(v, F(v), F'(v))`.
pub fn legendre_to_kinetic(curve: &impl EnergyCurve, v: f64) -> (f64, f64) {
    let slope = curve.derivative(v);
    (curve.value(v) - v * slope, slope)
}

/// `(v, F(v))` from `(s, f̄(s), f̄'(s))`.
pub fn legendre_to_energy(fbar: &impl KineticPotential, s: f64) -> Result<(f64, f64)> {
    let slope = fbar.derivative(s);
    if !(slope < 0.0) {
        return Err(Error::NonAttractive { s, slope });
    }
    let v = -1.0 / slope;
    Ok((v, v * (fbar.value(s) - s * slope)))
}

/// `min_{s>0} [s + v f̄(s)]`; the minimizer is returned in `x`.
pub fn energy_from_kinetic<F>(fbar: F, v: f64, tol: Tolerance) -> Result<Minimum>
where
    F: Fn(f64) -> f64,
{
    LogSearch::default().minimize(|s| s + v * fbar(s), tol)
}

/// `min_{r>0} [(P/r)^2 + v f(r)]`; the minimizing radius is returned in `x`.
pub fn semiclassical_energy(p: f64, f: &PotentialShape, v: f64, tol: Tolerance) -> Result<Minimum> {
    LogSearch::default().minimize(|r| (p / r).powi(2) + v * f.value(r), tol)
}

/// Point `r > 0` where the pure-power base `h` takes the value `y`.
pub(crate) fn invert_base(h: &PotentialShape, y: f64) -> Result<f64> {
    let term = h
        .as_pure_power()
        .ok_or_else(|| Error::BaseMismatch(format!("base {h} is not a single power term")))?;
    let ratio = y / term.coeff;
    if !(ratio > 0.0) {
        return Err(Error::DomainViolation(y));
    }
    Ok(ratio.powf(1.0 / term.exponent))
}

pub(crate) fn transform_unchecked(
    f: &PotentialShape,
    h: &PotentialShape,
    hbar: f64,
) -> Result<f64> {
    Ok(f.value(invert_base(h, hbar)?))
}

/// `g(h̄(s)) = f(h^{-1}(h̄(s)))` for a pure-power base `h`.
pub fn transform_kinetic<H>(f: &PotentialShape, h: &PotentialShape, hbar: H, s: f64) -> Result<f64>
where
    H: Fn(f64) -> f64,
{
    definite_convexity(f, h)?;
    transform_unchecked(f, h, hbar(s))
}
