//! Envelope bounds.
//!
//! Each tangent potential `a(t) + b(t) h(r)` touching `f` at `r = t` lies on
//! one side of `f` when `f = g(h)` with `g` convex or concave, so
//! `v a(t) + H_n(v b(t))` bounds `F_n(v)` from that side. Optimizing over the
//! contact point gives the envelope bound; the same number is
//! `min_s [s + v g(h̄_n(s))]` in kinetic-potential variables.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetic::{power_kinetic, semiclassical_energy, transform_unchecked};
use crate::local_energy::local_energy_bound;
use crate::numerics::{LogSearch, Minimum, Tolerance};
use crate::potential::{definite_convexity, tangent_coefficients, Convexity, PotentialShape};
use crate::spectra::{BaseProblem, PowerLawSpectrum, QuantumNumbers};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    TangentEnvelope,
    KineticEnvelope,
    Semiclassical,
    LocalEnergy,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::TangentEnvelope => "tangent",
            Method::KineticEnvelope => "kinetic",
            Method::Semiclassical => "semiclassical",
            Method::LocalEnergy => "local",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: f64,
    pub side: Side,
    pub method: Method,
    /// Optimal contact point `t`, kinetic energy `s` or radius `r`.
    pub optimizer: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Bound side for a definite pair. An affine `f = α h + β` is exact; it is
/// reported as a lower bound.
pub fn side_of(c: Convexity) -> Result<Side> {
    match c {
        Convexity::Convex | Convexity::Linear => Ok(Side::Lower),
        Convexity::Concave => Ok(Side::Upper),
        Convexity::Indefinite => Err(Error::IndefiniteConvexity),
    }
}

/// Spectrum of the base `h` for the state `qn`.
pub fn base_spectrum(h: &PotentialShape, qn: QuantumNumbers) -> Result<PowerLawSpectrum> {
    let term = h
        .as_pure_power()
        .ok_or_else(|| Error::BaseMismatch(format!("base {h} is not a single power term")))?;
    PowerLawSpectrum::resolve(term.exponent, qn)
}

/// Validated ingredients shared by every bound.
pub(crate) struct Setup {
    pub base: BaseProblem,
    pub convexity: Convexity,
    pub side: Side,
}

pub(crate) fn setup(
    f: &PotentialShape,
    h: &PotentialShape,
    base: &PowerLawSpectrum,
    qn: QuantumNumbers,
) -> Result<Setup> {
    if base.qn != qn {
        return Err(Error::BaseMismatch(format!(
            "spectrum is for {:?}, bound requested for {:?}",
            base.qn, qn
        )));
    }
    if f.domain() != qn.mode.domain() {
        return Err(Error::InvalidShape(format!(
            "potential domain does not match {} mode",
            qn.mode.name()
        )));
    }
    let base = BaseProblem::new(h, *base)?;
    let convexity = definite_convexity(f, h)?;
    Ok(Setup {
        base,
        convexity,
        side: side_of(convexity)?,
    })
}

/// `v β + H_n(v α)` for `f = α h + β`.
pub(crate) fn exact_affine(
    f: &PotentialShape,
    setup: &Setup,
    v: f64,
    method: Method,
) -> Option<BoundResult> {
    if setup.convexity != Convexity::Linear {
        return None;
    }
    let (alpha, beta) = f.affine_in(&setup.base.h)?;
    Some(BoundResult {
        value: v * beta + setup.base.eigenvalue(v * alpha),
        side: setup.side,
        method,
        optimizer: f64::NAN,
        iterations: 0,
        converged: true,
    })
}

fn finish(m: Minimum, side: Side, method: Method) -> BoundResult {
    BoundResult {
        value: m.f,
        side,
        method,
        optimizer: m.x,
        iterations: m.iterations,
        converged: true,
    }
}

fn check_coupling(v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidShape(format!(
            "coupling must be positive, got {v}"
        )))
    }
}

/// `max_t` (convex) or `min_t` (concave) of `v a(t) + H_n(v b(t))`.
pub fn envelope_bound_tangent(
    f: &PotentialShape,
    h: &PotentialShape,
    base: &PowerLawSpectrum,
    v: f64,
    qn: QuantumNumbers,
    tol: Tolerance,
) -> Result<BoundResult> {
    check_coupling(v)?;
    let setup = setup(f, h, base, qn)?;
    if let Some(exact) = exact_affine(f, &setup, v, Method::TangentEnvelope) {
        return Ok(exact);
    }
    let objective = |t: f64| match tangent_coefficients(f, h, t) {
        Ok(tc) => v * tc.a + setup.base.eigenvalue(v * tc.b),
        Err(_) => f64::NAN,
    };
    let search = LogSearch::default();
    Ok(match setup.side {
        Side::Lower => finish(
            search.maximize(objective, tol)?,
            Side::Lower,
            Method::TangentEnvelope,
        ),
        Side::Upper => finish(
            search.minimize(objective, tol)?,
            Side::Upper,
            Method::TangentEnvelope,
        ),
    })
}

/// `min_s [s + v g(h̄_n(s))]`.
pub fn envelope_bound_kinetic(
    f: &PotentialShape,
    h: &PotentialShape,
    base: &PowerLawSpectrum,
    v: f64,
    qn: QuantumNumbers,
    tol: Tolerance,
) -> Result<BoundResult> {
    check_coupling(v)?;
    let setup = setup(f, h, base, qn)?;
    if let Some(exact) = exact_affine(f, &setup, v, Method::KineticEnvelope) {
        return Ok(exact);
    }
    let spec = &setup.base.spectrum;
    let hbar = |s: f64| setup.base.scale * power_kinetic(spec.q, spec.p, s);
    let objective = |s: f64| match transform_unchecked(f, h, hbar(s)) {
        Ok(g) => s + v * g,
        Err(_) => f64::NAN,
    };
    let m = LogSearch::default().minimize(objective, tol)?;
    Ok(finish(m, setup.side, Method::KineticEnvelope))
}

/// `min_r [(P/r)^2 + v f(r)]`, the kinetic form after substituting
/// `r = P/s^{1/2}`.
pub fn semiclassical_bound(
    f: &PotentialShape,
    h: &PotentialShape,
    base: &PowerLawSpectrum,
    v: f64,
    qn: QuantumNumbers,
    tol: Tolerance,
) -> Result<BoundResult> {
    check_coupling(v)?;
    let setup = setup(f, h, base, qn)?;
    if let Some(exact) = exact_affine(f, &setup, v, Method::Semiclassical) {
        return Ok(exact);
    }
    let m = semiclassical_energy(base.p, f, v, tol)?;
    Ok(finish(m, setup.side, Method::Semiclassical))
}

/// Dispatches on `method`.
pub fn bound(
    method: Method,
    f: &PotentialShape,
    h: &PotentialShape,
    base: &PowerLawSpectrum,
    v: f64,
    qn: QuantumNumbers,
    tol: Tolerance,
) -> Result<BoundResult> {
    match method {
        Method::TangentEnvelope => envelope_bound_tangent(f, h, base, v, qn, tol),
        Method::KineticEnvelope => envelope_bound_kinetic(f, h, base, v, qn, tol),
        Method::Semiclassical => semiclassical_bound(f, h, base, v, qn, tol),
        Method::LocalEnergy => local_energy_bound(f, h, base, v, qn, tol),
    }
}

/// One bound per coupling, in grid order; failures stay in their slot.
pub fn bound_sweep(
    method: Method,
    f: &PotentialShape,
    h: &PotentialShape,
    base: &PowerLawSpectrum,
    qn: QuantumNumbers,
    v_grid: &[f64],
    tol: Tolerance,
) -> Vec<Result<BoundResult>> {
    v_grid
        .par_iter()
        .map(|&v| bound(method, f, h, base, v, qn, tol))
        .collect()
}
