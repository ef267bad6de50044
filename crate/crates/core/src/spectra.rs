//! Solvable power-law base problems: eigenvalue scaling laws, the `P`
//! coefficients of the semiclassical form, and the exact eigenfunctions used
//! as local-energy trial functions.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{geometric_grid, hermite, laguerre, richardson_diff, DerivOrder, Tolerance};
use crate::oracle::{solve_line, solve_radial, RadialProblem};
use crate::potential::{Domain, PotentialShape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// One-dimensional problem on the whole line; `n` counts sign changes.
    Line,
    /// Radial problem in `d` dimensions with `k = 2l + d`.
    Radial,
}

impl Mode {
    pub fn domain(self) -> Domain {
        match self {
            Mode::Line => Domain::FullLine,
            Mode::Radial => Domain::HalfLine,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Line => "line",
            Mode::Radial => "radial",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub mode: Mode,
    pub d: u32,
    pub l: u32,
    pub n: u32,
}

impl QuantumNumbers {
    pub fn line(n: u32) -> Self {
        Self {
            mode: Mode::Line,
            d: 1,
            l: 0,
            n,
        }
    }

    pub fn radial(d: u32, l: u32, n: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidQuantumNumbers(
                "dimension must be at least 1".into(),
            ));
        }
        Ok(Self {
            mode: Mode::Radial,
            d,
            l,
            n,
        })
    }

    pub fn k(&self) -> u32 {
        2 * self.l + self.d
    }

    /// Coefficient of `1/r^2` in the radial operator, `(k-1)(k-3)/4`.
    pub fn centrifugal(&self) -> f64 {
        match self.mode {
            Mode::Line => 0.0,
            Mode::Radial => {
                let k = self.k() as f64;
                (k - 1.0) * (k - 3.0) / 4.0
            }
        }
    }
}

/// `P` from the unit-coupling eigenvalue: `P = (|E|/(1+q/2))^{(2+q)/(2q)} (|q|/2)^{1/2}`.
pub fn p_from_e1(q: f64, e1: f64) -> Result<f64> {
    check_exponent(q)?;
    Ok((e1.abs() / (1.0 + q / 2.0)).powf((2.0 + q) / (2.0 * q)) * (q.abs() / 2.0).sqrt())
}

/// Inverse of [`p_from_e1`]; the sign of the eigenvalue is `sgn(q)`.
pub fn e1_from_p(q: f64, p: f64) -> Result<f64> {
    check_exponent(q)?;
    let magnitude = (1.0 + q / 2.0) * (p / (q.abs() / 2.0).sqrt()).powf(2.0 * q / (2.0 + q));
    Ok(q.signum() * magnitude)
}

fn check_exponent(q: f64) -> Result<()> {
    if q == 0.0 || !(q > -2.0) || !q.is_finite() {
        return Err(Error::UnsupportedExponent(q));
    }
    Ok(())
}

/// Closed-form `P` for the oscillator (`q = 2`) and Coulomb (`q = -1`).
#[allow(clippy::redundant_guards)]
pub fn p_number(q: f64, qn: QuantumNumbers) -> Result<f64> {
    check_exponent(q)?;
    let n = qn.n as f64;
    let k = qn.k() as f64;
    let p = match (qn.mode, q) {
        (Mode::Line, q) if q == 2.0 => n + 0.5,
        (Mode::Radial, q) if q == 2.0 => 2.0 * n + k / 2.0,
        (Mode::Radial, q) if q == -1.0 => n + (k - 1.0) / 2.0,
        _ => return Err(Error::UnsupportedExponent(q)),
    };
    if p <= 0.0 {
        return Err(Error::InvalidQuantumNumbers(format!(
            "P = {p} for q = {q}, k = {k}, n = {n}; no bound state"
        )));
    }
    Ok(p)
}

/// Spectrum of `-Δ + u·sgn(q) r^q`: `H_n(u) = E1 · u^{2/(2+q)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawSpectrum {
    pub q: f64,
    pub qn: QuantumNumbers,
    pub e1: f64,
    pub p: f64,
}

type E1Key = (u64, QuantumNumbers);

fn e1_cache() -> &'static RwLock<HashMap<E1Key, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<E1Key, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

impl PowerLawSpectrum {
    /// Closed-form spectrum for `q ∈ {-1, 2}`.
    pub fn closed_form(q: f64, qn: QuantumNumbers) -> Result<Self> {
        let p = p_number(q, qn)?;
        Ok(Self {
            q,
            qn,
            e1: e1_from_p(q, p)?,
            p,
        })
    }

    /// Spectrum from a known unit-coupling eigenvalue.
    pub fn from_e1(q: f64, qn: QuantumNumbers, e1: f64) -> Result<Self> {
        Ok(Self {
            q,
            qn,
            e1,
            p: p_from_e1(q, e1)?,
        })
    }

    /// Closed form when available, otherwise the unit-coupling eigenvalue from
    /// the shooting solver (computed once per `(q, qn)` and cached).
    pub fn resolve(q: f64, qn: QuantumNumbers) -> Result<Self> {
        check_exponent(q)?;
        match Self::closed_form(q, qn) {
            Ok(s) => return Ok(s),
            Err(Error::UnsupportedExponent(_)) => {}
            Err(e) => return Err(e),
        }
        let key = (q.to_bits(), qn);
        if let Some(&e1) = e1_cache().read().expect("cache poisoned").get(&key) {
            return Self::from_e1(q, qn, e1);
        }
        let shape = PotentialShape::signed_power(q, qn.mode.domain())?;
        let tol = Tolerance::new(1e-12, 1e-14, 400)?;
        let e1 = match qn.mode {
            Mode::Line => solve_line(&shape, 1.0, qn.n, None, tol)?.energy,
            Mode::Radial => solve_radial(&RadialProblem::new(shape, 1.0, qn), tol)?.energy,
        };
        e1_cache().write().expect("cache poisoned").insert(key, e1);
        Self::from_e1(q, qn, e1)
    }
}

pub fn eigenvalue_curve(spec: &PowerLawSpectrum, u: f64) -> f64 {
    spec.e1 * u.powf(2.0 / (2.0 + spec.q))
}

/// A pure power `c·sgn(q)·r^q` (`c > 0`) paired with its spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseProblem {
    pub h: PotentialShape,
    pub spectrum: PowerLawSpectrum,
    pub scale: f64,
}

impl BaseProblem {
    pub fn new(h: &PotentialShape, spectrum: PowerLawSpectrum) -> Result<Self> {
        let term = h
            .as_pure_power()
            .ok_or_else(|| Error::BaseMismatch(format!("base {h} is not a single power term")))?;
        if term.exponent != spectrum.q {
            return Err(Error::BaseMismatch(format!(
                "base exponent {} differs from spectrum exponent {}",
                term.exponent, spectrum.q
            )));
        }
        if h.domain() != spectrum.qn.mode.domain() {
            return Err(Error::BaseMismatch(format!(
                "base domain does not match {} mode",
                spectrum.qn.mode.name()
            )));
        }
        let scale = term.coeff * spectrum.q.signum();
        if !(scale > 0.0) {
            return Err(Error::BaseMismatch(format!(
                "base coefficient {} must carry the sign of q = {} to be attractive",
                term.coeff, spectrum.q
            )));
        }
        Ok(Self {
            h: h.clone(),
            spectrum,
            scale,
        })
    }

    /// `H_n(u)` for `-Δ + u·h`.
    pub fn eigenvalue(&self, u: f64) -> f64 {
        eigenvalue_curve(&self.spectrum, self.scale * u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialFamily {
    /// `H_n(t^{1/4} x) exp(-t^{1/2} x^2 / 2)`, eigenfunction of `-Δ + t x^2`.
    Oscillator1D,
    /// `r^{(k-1)/2} exp(-t r/2) L_n^{(k-2)}(t r)`, Coulomb base `-1/r`.
    RadialCoulomb,
    /// `r^{(k-1)/2} exp(-t r^2/2) L_n^{((k-2)/2)}(t r^2)`, oscillator base `r^2`.
    RadialOscillator,
}

impl TrialFamily {
    /// Family whose members are exact eigenfunctions for the base `sgn(q) r^q`.
    pub fn for_base(q: f64, mode: Mode) -> Result<Self> {
        match mode {
            Mode::Line if q == 2.0 => Ok(Self::Oscillator1D),
            Mode::Radial if q == 2.0 => Ok(Self::RadialOscillator),
            Mode::Radial if q == -1.0 => Ok(Self::RadialCoulomb),
            _ => Err(Error::NoTrialFamily {
                q,
                mode: mode.name(),
            }),
        }
    }

    /// Unit base shape `h` of which the family members are eigenfunctions.
    pub fn base_shape(self) -> PotentialShape {
        let (q, domain) = match self {
            Self::Oscillator1D => (2.0, Domain::FullLine),
            Self::RadialCoulomb => (-1.0, Domain::HalfLine),
            Self::RadialOscillator => (2.0, Domain::HalfLine),
        };
        PotentialShape::signed_power(q, domain).expect("admissible exponent")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialFunction {
    pub family: TrialFamily,
    pub qn: QuantumNumbers,
    pub t: f64,
}

impl TrialFunction {
    pub fn new(family: TrialFamily, qn: QuantumNumbers, t: f64) -> Result<Self> {
        let expected = match family {
            TrialFamily::Oscillator1D => Mode::Line,
            _ => Mode::Radial,
        };
        if qn.mode != expected {
            return Err(Error::InvalidQuantumNumbers(format!(
                "{family:?} needs {} quantum numbers",
                expected.name()
            )));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidQuantumNumbers(format!(
                "trial scale must be positive, got {t}"
            )));
        }
        if family == TrialFamily::RadialCoulomb {
            p_number(-1.0, qn)?;
        }
        Ok(Self { family, qn, t })
    }

    fn radial_prefactor(&self, r: f64) -> f64 {
        let m = (self.qn.k() as f64 - 1.0) / 2.0;
        if m == 0.0 {
            1.0
        } else {
            r.powf(m)
        }
    }

    /// Natural length scale of the trial function.
    pub fn length_scale(&self) -> f64 {
        match self.family {
            TrialFamily::Oscillator1D => self.t.powf(-0.25),
            TrialFamily::RadialCoulomb => 1.0 / self.t,
            TrialFamily::RadialOscillator => self.t.powf(-0.5),
        }
    }

    /// Base coupling `u` mapped from the scale parameter `t`.
    pub fn coupling(&self) -> f64 {
        coupling_of(self.family, self.qn, self.t)
    }
}

fn coupling_of(family: TrialFamily, qn: QuantumNumbers, t: f64) -> f64 {
    match family {
        TrialFamily::Oscillator1D => t,
        TrialFamily::RadialCoulomb => t * p_number(-1.0, qn).expect("validated at construction"),
        TrialFamily::RadialOscillator => t * t,
    }
}

/// Inverse of the scale-to-coupling map: the `t` whose member is an
/// eigenfunction of `-Δ + u·h`.
pub fn scale_for_coupling(family: TrialFamily, qn: QuantumNumbers, u: f64) -> Result<f64> {
    Ok(match family {
        TrialFamily::Oscillator1D => u,
        TrialFamily::RadialCoulomb => u / p_number(-1.0, qn)?,
        TrialFamily::RadialOscillator => u.sqrt(),
    })
}

pub fn trial_eval(tf: &TrialFunction, r: f64) -> f64 {
    let (n, t) = (tf.qn.n, tf.t);
    match tf.family {
        TrialFamily::Oscillator1D => hermite(n, t.powf(0.25) * r) * (-0.5 * t.sqrt() * r * r).exp(),
        TrialFamily::RadialCoulomb => {
            let alpha = tf.qn.k() as f64 - 2.0;
            tf.radial_prefactor(r) * (-0.5 * t * r).exp() * laguerre(n, alpha, t * r)
        }
        TrialFamily::RadialOscillator => {
            let alpha = (tf.qn.k() as f64 - 2.0) / 2.0;
            tf.radial_prefactor(r) * (-0.5 * t * r * r).exp() * laguerre(n, alpha, t * r * r)
        }
    }
}

/// `(u, H)` such that the trial function is an eigenfunction of `-Δ + u·h`
/// (unit base shape, centrifugal term included in radial mode) with
/// eigenvalue `H`.
pub fn trial_eigendata(tf: &TrialFunction) -> (f64, f64) {
    let u = tf.coupling();
    let h = match tf.family {
        TrialFamily::Oscillator1D => u.sqrt() * (2.0 * tf.qn.n as f64 + 1.0),
        TrialFamily::RadialCoulomb => -tf.t * tf.t / 4.0,
        TrialFamily::RadialOscillator => {
            2.0 * tf.t * p_number(2.0, tf.qn).expect("oscillator P is always positive")
        }
    };
    (u, h)
}

/// Sample points covering the bulk of the trial function.
pub fn trial_grid(tf: &TrialFunction, count: usize) -> Vec<f64> {
    let len = tf.length_scale();
    let extent = 4.0 + 2.0 * (tf.qn.n as f64 + tf.qn.k() as f64);
    match tf.family {
        TrialFamily::Oscillator1D => {
            let half = (2.0 * tf.qn.n as f64 + 8.0).sqrt() * len;
            (0..count)
                .map(|i| -half + 2.0 * half * (i as f64 + 0.5) / count as f64)
                .collect()
        }
        TrialFamily::RadialCoulomb => geometric_grid(0.02 * len, 3.0 * extent * len, count),
        TrialFamily::RadialOscillator => {
            geometric_grid(0.02 * len, extent.sqrt() * 1.5 * len, count)
        }
    }
}

/// Largest pointwise `|(-Δ + u h)φ - Hφ|` over `grid`, relative to `max |φ|`
/// and to the kinetic and centrifugal terms at that point. Second derivatives
/// are Richardson-extrapolated central differences.
pub fn eigen_residual(tf: &TrialFunction, grid: &[f64]) -> f64 {
    let (u, energy) = trial_eigendata(tf);
    let h = tf.family.base_shape();
    let cent = tf.qn.centrifugal();
    let step = 2e-3 * tf.length_scale();
    let phi = |x: f64| trial_eval(tf, x);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &x in grid {
        let value = phi(x);
        scale = scale.max(value.abs());
        let step = step.min(0.02 * x.abs().max(f64::MIN_POSITIVE));
        let kinetic = -richardson_diff(phi, x, DerivOrder::Second, step);
        let centrifugal = if tf.qn.mode == Mode::Radial {
            cent / (x * x) * value
        } else {
            0.0
        };
        let residual = kinetic + centrifugal + u * h.value(x) * value - energy * value;
        worst = worst.max(residual.abs() / (1.0 + kinetic.abs() + centrifugal.abs()));
    }
    worst / scale.max(f64::MIN_POSITIVE)
}

/// Eigenfunction-residual tolerance that gates local-energy trial functions.
pub const RESIDUAL_TOL: f64 = 1e-6;

/// Runs [`eigen_residual`] on the family's default grid.
pub fn check_trial(tf: &TrialFunction) -> Result<()> {
    let r = eigen_residual(tf, &trial_grid(tf, 400));
    if r < RESIDUAL_TOL {
        Ok(())
    } else {
        Err(Error::TrialResidual(r))
    }
}

/// Sign changes along `values`, ignoring exact zeros.
pub fn count_sign_changes(values: impl IntoIterator<Item = f64>) -> usize {
    let mut last = 0.0f64;
    let mut changes = 0;
    for v in values {
        if v == 0.0 {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = v;
    }
    changes
}
