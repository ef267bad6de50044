//! Potential shapes as signed power sums, and the tangent (envelope)
//! representation `f = g(h)` through the chain rule.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{geometric_grid, DerivOrder};

/// Default sampling window for convexity and monotonicity checks.
pub const SAMPLE_DOMAIN: (f64, f64) = (1e-3, 1e3);
pub const SAMPLE_COUNT: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// `r > 0`, radial problems.
    HalfLine,
    /// `x` real, even shapes only.
    FullLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub coeff: f64,
    pub exponent: f64,
}

impl PowerTerm {
    fn integer_exponent(&self) -> Option<i32> {
        let q = self.exponent;
        (q.fract() == 0.0 && q.abs() <= 64.0).then_some(q as i32)
    }

    fn pow(&self, x: f64, shift: i32) -> f64 {
        match self.integer_exponent() {
            Some(q) => x.powi(q - shift),
            None => x.powf(self.exponent - shift as f64),
        }
    }

    fn value(&self, x: f64) -> f64 {
        if self.exponent == 0.0 {
            return self.coeff;
        }
        self.coeff * self.pow(x, 0)
    }

    fn first(&self, x: f64) -> f64 {
        if self.exponent == 0.0 {
            return 0.0;
        }
        self.coeff * self.exponent * self.pow(x, 1)
    }

    fn second(&self, x: f64) -> f64 {
        let q = self.exponent;
        if q == 0.0 || q == 1.0 {
            return 0.0;
        }
        self.coeff * q * (q - 1.0) * self.pow(x, 2)
    }
}

/// `f(r) = Σ c_i r^{q_i}` with every `q_i > -2`.
///
/// Sign conventions such as `sgn(q) r^q` are carried by the stored
/// coefficients. Full-line shapes must be even, so only even integer exponents
/// are accepted there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialShape {
    terms: Vec<PowerTerm>,
    domain: Domain,
}

impl PotentialShape {
    pub fn new(terms: Vec<PowerTerm>, domain: Domain) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidShape("no terms".into()));
        }
        for t in &terms {
            if !t.coeff.is_finite() {
                return Err(Error::InvalidShape(format!(
                    "coefficient {} is not finite",
                    t.coeff
                )));
            }
            if !t.exponent.is_finite() || t.exponent <= -2.0 {
                return Err(Error::InvalidShape(format!(
                    "exponent {} must be finite and greater than -2",
                    t.exponent
                )));
            }
            if domain == Domain::FullLine
                && !(t.exponent.fract() == 0.0 && t.exponent.rem_euclid(2.0) == 0.0)
            {
                return Err(Error::InvalidShape(format!(
                    "full-line shapes need even integer exponents, got {}",
                    t.exponent
                )));
            }
        }
        Ok(Self { terms, domain })
    }

    /// Single term `coeff · r^exponent`.
    pub fn power(coeff: f64, exponent: f64, domain: Domain) -> Result<Self> {
        Self::new(vec![PowerTerm { coeff, exponent }], domain)
    }

    /// The base shape `sgn(q) r^q` of a pure power-law problem.
    pub fn signed_power(q: f64, domain: Domain) -> Result<Self> {
        Self::power(q.signum(), q, domain)
    }

    /// Parses comma-separated `coeff:exponent` pairs, e.g. `-1:-1,1:2` for
    /// `-1/r + r^2`.
    pub fn parse(spec: &str, domain: Domain) -> Result<Self> {
        let spec = spec.trim();
        if spec.is_empty() {
            return Err(Error::InvalidShape("empty potential specification".into()));
        }
        let mut terms = Vec::new();
        for raw in spec.split(',') {
            let term = raw.trim();
            let (c, q) = term.split_once(':').ok_or_else(|| Error::Parse {
                term: term.to_string(),
                reason: "expected coeff:exponent".into(),
            })?;
            let parse_num = |s: &str, what: &str| {
                s.trim().parse::<f64>().map_err(|e| Error::Parse {
                    term: term.to_string(),
                    reason: format!("bad {what}: {e}"),
                })
            };
            terms.push(PowerTerm {
                coeff: parse_num(c, "coefficient")?,
                exponent: parse_num(q, "exponent")?,
            });
        }
        Self::new(terms, domain)
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// The single term of a pure power (constant terms excluded).
    pub fn as_pure_power(&self) -> Option<PowerTerm> {
        let merged = self.merged();
        match merged.as_slice() {
            [t] if t.exponent != 0.0 => Some(*t),
            _ => None,
        }
    }

    /// `c · f` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| PowerTerm {
                    coeff: c * t.coeff,
                    exponent: t.exponent,
                })
                .collect(),
            domain: self.domain,
        }
    }

    fn merged(&self) -> Vec<PowerTerm> {
        let mut out: Vec<PowerTerm> = Vec::new();
        for t in &self.terms {
            match out.iter_mut().find(|m| m.exponent == t.exponent) {
                Some(m) => m.coeff += t.coeff,
                None => out.push(*t),
            }
        }
        out.retain(|t| t.coeff != 0.0);
        out
    }

    /// `Some((alpha, beta))` when `self = alpha · h + beta` exactly.
    pub fn affine_in(&self, h: &PotentialShape) -> Option<(f64, f64)> {
        let hm = h.merged();
        let fm = self.merged();
        let lead = hm.iter().find(|t| t.exponent != 0.0)?;
        let alpha = fm
            .iter()
            .find(|t| t.exponent == lead.exponent)
            .map(|t| t.coeff / lead.coeff)?;
        let coeff_of = |terms: &[PowerTerm], q: f64| {
            terms
                .iter()
                .find(|t| t.exponent == q)
                .map_or(0.0, |t| t.coeff)
        };
        let mut exponents: Vec<f64> = fm.iter().chain(hm.iter()).map(|t| t.exponent).collect();
        exponents.dedup();
        for q in exponents.into_iter().filter(|&q| q != 0.0) {
            if coeff_of(&fm, q) != alpha * coeff_of(&hm, q) {
                return None;
            }
        }
        Some((alpha, coeff_of(&fm, 0.0) - alpha * coeff_of(&hm, 0.0)))
    }

    fn check_point(&self, r: f64) -> Result<()> {
        let ok = match self.domain {
            Domain::HalfLine => {
                r > 0.0 || (r == 0.0 && self.terms.iter().all(|t| t.exponent >= 0.0))
            }
            Domain::FullLine => r.is_finite(),
        };
        if ok && r.is_finite() {
            Ok(())
        } else {
            Err(Error::DomainViolation(r))
        }
    }

    pub fn evaluate(&self, r: f64) -> Result<f64> {
        self.check_point(r)?;
        Ok(self.value(r))
    }

    pub fn derivative(&self, r: f64, order: DerivOrder) -> Result<f64> {
        self.check_point(r)?;
        Ok(match order {
            DerivOrder::First => self.first(r),
            DerivOrder::Second => self.second(r),
        })
    }

    /// Unchecked evaluation for hot loops over points already known to lie in
    /// the domain.
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.value(r)).sum()
    }

    #[inline]
    pub fn first(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.first(r)).sum()
    }

    #[inline]
    pub fn second(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.second(r)).sum()
    }
}

impl fmt::Display for PotentialShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}:{}", t.coeff, t.exponent)?;
        }
        Ok(())
    }
}

/// Tangent potential `a + b·h(x)` touching `f` at `x = t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangentCoefficients {
    pub a: f64,
    pub b: f64,
    pub t: f64,
}

fn same_domain(f: &PotentialShape, h: &PotentialShape) -> Result<()> {
    if f.domain != h.domain {
        return Err(Error::InvalidShape(
            "target and base shapes live on different domains".into(),
        ));
    }
    Ok(())
}

/// `b(t) = f'(t)/h'(t)`, `a(t) = f(t) - b(t) h(t)`.
pub fn tangent_coefficients(
    f: &PotentialShape,
    h: &PotentialShape,
    t: f64,
) -> Result<TangentCoefficients> {
    same_domain(f, h)?;
    let dh = h.derivative(t, DerivOrder::First)?;
    if dh == 0.0 {
        return Err(Error::DegenerateBase(t));
    }
    let b = f.derivative(t, DerivOrder::First)? / dh;
    if !(b > 0.0) {
        return Err(Error::NonMonotone { t, slope: b });
    }
    let a = f.evaluate(t)? - b * h.evaluate(t)?;
    Ok(TangentCoefficients { a, b, t })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convexity {
    /// `g'' > 0`: tangents lie below, envelope bounds are lower bounds.
    Convex,
    /// `g'' < 0`: tangents lie above, envelope bounds are upper bounds.
    Concave,
    Indefinite,
    /// `f = alpha·h + beta`; every envelope bound is exact.
    Linear,
}

/// `g''(h)` at `x` via `(f''h' - f'h'')/h'^3`.
pub fn g_second(f: &PotentialShape, h: &PotentialShape, x: f64) -> Result<f64> {
    let dh = h.first(x);
    if dh == 0.0 {
        return Err(Error::DegenerateBase(x));
    }
    Ok((f.second(x) * dh - f.first(x) * h.second(x)) / (dh * dh * dh))
}

/// Sign of `g''` over `n_samples` log-spaced points in `sample_domain`.
pub fn classify_convexity(
    f: &PotentialShape,
    h: &PotentialShape,
    sample_domain: (f64, f64),
    n_samples: usize,
) -> Result<Convexity> {
    same_domain(f, h)?;
    if f.affine_in(h).is_some_and(|(alpha, _)| alpha > 0.0) {
        return Ok(Convexity::Linear);
    }
    let (mut positive, mut negative) = (false, false);
    for x in geometric_grid(sample_domain.0, sample_domain.1, n_samples.max(2)) {
        let g2 = g_second(f, h, x)?;
        if g2 > 0.0 {
            positive = true;
        } else if g2 < 0.0 {
            negative = true;
        } else {
            return Ok(Convexity::Indefinite);
        }
    }
    Ok(match (positive, negative) {
        (true, false) => Convexity::Convex,
        (false, true) => Convexity::Concave,
        _ => Convexity::Indefinite,
    })
}

/// Classification with the default sampling, rejecting indefinite or
/// non-increasing transformations.
pub fn definite_convexity(f: &PotentialShape, h: &PotentialShape) -> Result<Convexity> {
    let c = classify_convexity(f, h, SAMPLE_DOMAIN, SAMPLE_COUNT)?;
    if c == Convexity::Indefinite {
        return Err(Error::IndefiniteConvexity);
    }
    for x in geometric_grid(SAMPLE_DOMAIN.0, SAMPLE_DOMAIN.1, SAMPLE_COUNT) {
        let slope = f.first(x) / h.first(x);
        if !(slope > 0.0) {
            return Err(Error::NonMonotone { t: x, slope });
        }
    }
    Ok(c)
}
