//! Local-energy bounds with envelope trial functions.
//!
//! A member `φ(t; r)` of the trial family is an exact eigenfunction of
//! `-Δ + u(t) h(r)` with eigenvalue `H(u)`, so its local energy for the target
//! `-Δ + v f(r)` is
//!
//! ```text
//! w(t, r) = (Hφ)/φ = H(u) - u h(r) + v f(r)
//! ```
//!
//! everywhere, including the zeros of `φ`. For a convex pair
//! `max_t inf_r w` is a lower bound, for a concave pair `min_t sup_r w` is an
//! upper bound, and both coincide with the envelope bound.

use std::cell::Cell;

use crate::envelope::envelope_bound_tangent;
use crate::envelope::{exact_affine, setup, BoundResult, Method, Side};
use crate::error::{Error, Result};
use crate::numerics::{bisect_root, richardson_diff, DerivOrder, LogSearch, Tolerance};
use crate::potential::PotentialShape;
use crate::spectra::{
    check_trial, scale_for_coupling, trial_eigendata, trial_eval, Mode, PowerLawSpectrum,
    QuantumNumbers, TrialFamily, TrialFunction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    /// `H(u) - u h(r) + v f(r)`.
    Identity,
    /// `(-φ'' + centrifugal·φ + v f φ)/φ` with a finite-difference `φ''`.
    NumericRatio,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalEnergyProfile {
    pub trial: TrialFunction,
    pub target_f: PotentialShape,
    pub v: f64,
    pub form: Form,
}

pub fn local_energy(profile: &LocalEnergyProfile, r: f64) -> Result<f64> {
    let tf = &profile.trial;
    let target = profile.v * profile.target_f.evaluate(r)?;
    match profile.form {
        Form::Identity => {
            let (u, energy) = trial_eigendata(tf);
            Ok(energy - u * tf.family.base_shape().value(r) + target)
        }
        Form::NumericRatio => {
            let phi = trial_eval(tf, r);
            if phi == 0.0 || !phi.is_finite() {
                return Err(Error::TrialZero(r));
            }
            let mut step = 1e-3 * tf.length_scale();
            if tf.qn.mode == Mode::Radial {
                step = step.min(0.02 * r);
            }
            let second = richardson_diff(|x| trial_eval(tf, x), r, DerivOrder::Second, step);
            let centrifugal = tf.qn.centrifugal() / (r * r);
            let ratio = -second / phi + centrifugal + target;
            if ratio.is_finite() {
                Ok(ratio)
            } else {
                Err(Error::TrialZero(r))
            }
        }
    }
}

/// Optimal trial scale `t*` and the inner extremum position `x*` at it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saddle {
    pub bound: BoundResult,
    pub position: f64,
}

fn identity_form(
    family: TrialFamily,
    qn: QuantumNumbers,
    f: &PotentialShape,
    v: f64,
    t: f64,
) -> Result<LocalEnergyProfile> {
    Ok(LocalEnergyProfile {
        trial: TrialFunction::new(family, qn, t)?,
        target_f: f.clone(),
        v,
        form: Form::Identity,
    })
}

/// `inf_r w(t, r)` (lower side) or `sup_r w(t, r)` (upper side), with its
/// position.
fn inner_extremum(profile: &LocalEnergyProfile, side: Side, tol: Tolerance) -> Result<(f64, f64)> {
    let w = |r: f64| local_energy(profile, r).unwrap_or(f64::NAN);
    let search = LogSearch::default();
    match side {
        Side::Lower => search.minimize(w, tol).map(|m| (m.f, m.x)),
        Side::Upper => search.maximize(w, tol).map(|m| (m.f, m.x)),
    }
    .map_err(|_| Error::UnboundedInner)
}

/// Local-energy bound together with the saddle point that produces it.
pub fn local_energy_saddle(
    f: &PotentialShape,
    h: &PotentialShape,
    base: &PowerLawSpectrum,
    v: f64,
    qn: QuantumNumbers,
    tol: Tolerance,
) -> Result<Saddle> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidShape(format!(
            "coupling must be positive, got {v}"
        )));
    }
    let setup = setup(f, h, base, qn)?;
    let family = TrialFamily::for_base(base.q, qn.mode)?;
    if let Some(exact) = exact_affine(f, &setup, v, Method::LocalEnergy) {
        return Ok(Saddle {
            bound: exact,
            position: f64::NAN,
        });
    }
    let side = setup.side;
    let inner_tol = tol;
    let outer_tol = tol.loosened(10.0);
    let finite_inner = Cell::new(false);
    // the inner extremum is over the unit-base family, so the trial scale
    // works directly in terms of the unit coupling
    let objective = |t: f64| {
        let value = identity_form(family, qn, f, v, t)
            .and_then(|p| inner_extremum(&p, side, inner_tol))
            .map(|(value, _)| value);
        match value {
            Ok(x) => {
                finite_inner.set(true);
                x
            }
            Err(_) => f64::NAN,
        }
    };
    let search = LogSearch::default();
    let outer = match side {
        Side::Lower => search.maximize(objective, outer_tol).map(|m| (m.f, m)),
        Side::Upper => search.minimize(objective, outer_tol).map(|m| (m.f, m)),
    };
    let (value, m) = match outer {
        Ok(x) => x,
        Err(Error::NoBracketFound { .. }) if !finite_inner.get() => {
            return Err(Error::UnboundedInner)
        }
        Err(e) => return Err(e),
    };
    let profile = identity_form(family, qn, f, v, m.x)?;
    if qn.n > 0 {
        check_trial(&profile.trial)?;
    }
    let (_, position) = inner_extremum(&profile, side, inner_tol)?;
    Ok(Saddle {
        bound: BoundResult {
            value,
            side,
            method: Method::LocalEnergy,
            optimizer: m.x,
            iterations: m.iterations,
            converged: true,
        },
        position,
    })
}

/// `max_t inf_r w` for convex pairs, `min_t sup_r w` for concave pairs.
pub fn local_energy_bound(
    f: &PotentialShape,
    h: &PotentialShape,
    base: &PowerLawSpectrum,
    v: f64,
    qn: QuantumNumbers,
    tol: Tolerance,
) -> Result<BoundResult> {
    local_energy_saddle(f, h, base, v, qn, tol).map(|s| s.bound)
}

fn base_family(h: &PotentialShape, qn: QuantumNumbers) -> Result<TrialFamily> {
    let term = h
        .as_pure_power()
        .ok_or_else(|| Error::BaseMismatch(format!("base {h} is not a single power term")))?;
    TrialFamily::for_base(term.exponent, qn.mode)
}

/// Trial scale `t(r)` at which `r` is a critical point of `w(t, ·)`:
/// `∂w/∂r = 0` gives the unit coupling `u = v f'(r)/h'(r)`.
pub fn critical_parameter(
    f: &PotentialShape,
    h: &PotentialShape,
    qn: QuantumNumbers,
    v: f64,
    r: f64,
) -> Result<f64> {
    let family = base_family(h, qn)?;
    let unit = family.base_shape();
    let u = v * f.derivative(r, DerivOrder::First)? / unit.derivative(r, DerivOrder::First)?;
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::NoRoot(r));
    }
    scale_for_coupling(family, qn, u)
}

/// [`critical_parameter`] by bisecting a finite-difference `∂w/∂r` in `t`.
pub fn critical_parameter_numeric(
    f: &PotentialShape,
    h: &PotentialShape,
    qn: QuantumNumbers,
    v: f64,
    r: f64,
) -> Result<f64> {
    let family = base_family(h, qn)?;
    let slope = |y: f64| {
        identity_form(family, qn, f, v, y.exp()).map_or(f64::NAN, |p| {
            richardson_diff(
                |x| local_energy(&p, x).unwrap_or(f64::NAN),
                r,
                DerivOrder::First,
                1e-3 * r,
            )
        })
    };
    let tol = Tolerance::new(1e-13, f64::MIN_POSITIVE, 400)?;
    bisect_root(slope, (1e-8f64).ln(), (1e8f64).ln(), tol)
        .map(f64::exp)
        .map_err(|_| Error::NoRoot(r))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coincidence {
    pub envelope: BoundResult,
    pub local: BoundResult,
    pub delta: f64,
}

/// Envelope and local-energy bounds for the same pair, and their distance.
pub fn coincidence_check(
    f: &PotentialShape,
    h: &PotentialShape,
    base: &PowerLawSpectrum,
    v: f64,
    qn: QuantumNumbers,
    tol: Tolerance,
) -> Result<Coincidence> {
    let envelope = envelope_bound_tangent(f, h, base, v, qn, tol)?;
    let local = local_energy_bound(f, h, base, v, qn, tol)?;
    Ok(Coincidence {
        envelope,
        local,
        delta: (envelope.value - local.value).abs(),
    })
}
