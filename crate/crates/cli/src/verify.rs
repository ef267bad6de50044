//! Cross-module consistency suites behind `verify`.

use rayon::prelude::*;

use spectral_envelope::envelope::{base_spectrum, envelope_bound_tangent};
use spectral_envelope::kinetic::{
    legendre_to_energy, legendre_to_kinetic, EnergyCurve, KineticPotential, LegendreKinetic,
    PowerLawCurve,
};
use spectral_envelope::local_energy::coincidence_check;
use spectral_envelope::numerics::{geometric_grid, richardson_diff, DerivOrder};
use spectral_envelope::oracle::solve_at;
use spectral_envelope::{Domain, PotentialShape, PowerLawSpectrum, QuantumNumbers, Tolerance};

use crate::report::{Check, VerifyReport, SCHEMA_VERSION};
use crate::CliError;

pub const SUITES: [&str; 5] = [
    "coincidence",
    "roundtrip",
    "sandwich",
    "scaling",
    "invariance",
];

pub fn run_suite(name: &str, tol: Tolerance) -> Result<VerifyReport, CliError> {
    let names: Vec<&str> = match name {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => {
            return Err(CliError::Config(format!(
                "unknown suite `{other}`; expected one of {}, all",
                SUITES.join(", ")
            )))
        }
    };
    let checks: Vec<Check> = names
        .into_iter()
        .flat_map(|s| match s {
            "coincidence" => coincidence(tol),
            "roundtrip" => roundtrip(),
            "sandwich" => sandwich(tol),
            "scaling" => scaling(tol),
            _ => invariance(),
        })
        .collect();
    let failed = checks.iter().filter(|c| !c.pass).count();
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        suite: name.to_string(),
        passed: checks.len() - failed,
        failed,
        checks,
    })
}

fn check(suite: &str, name: String, observed: f64, expected: f64, tolerance: f64) -> Check {
    Check {
        suite: suite.into(),
        name,
        observed,
        expected,
        tolerance,
        pass: (observed - expected).abs() <= tolerance,
        note: None,
    }
}

fn failure(suite: &str, name: String, err: impl std::fmt::Display) -> Check {
    Check {
        suite: suite.into(),
        name,
        observed: f64::NAN,
        expected: f64::NAN,
        tolerance: f64::NAN,
        pass: false,
        note: Some(err.to_string()),
    }
}

fn half(spec: &str) -> PotentialShape {
    PotentialShape::parse(spec, Domain::HalfLine).expect("valid built-in shape")
}

fn full(spec: &str) -> PotentialShape {
    PotentialShape::parse(spec, Domain::FullLine).expect("valid built-in shape")
}

fn k7(n: u32) -> QuantumNumbers {
    QuantumNumbers::radial(3, 2, n).expect("valid built-in quantum numbers")
}

fn oracle_tol() -> Tolerance {
    Tolerance::new(1e-12, 1e-14, 400).expect("valid tolerance")
}

fn coincidence(tol: Tolerance) -> Vec<Check> {
    let mut cases = Vec::new();
    for (label, f, h, line) in [
        ("quartic/oscillator", full("1:4"), full("1:2"), true),
        ("combo/coulomb", half("-1:-1,1:2"), half("-1:-1"), false),
        ("combo/oscillator", half("-1:-1,1:2"), half("1:2"), false),
    ] {
        for v in [0.5, 1.0, 2.0, 4.0] {
            for n in [0, 1] {
                let qn = if line { QuantumNumbers::line(n) } else { k7(n) };
                cases.push((label, f.clone(), h.clone(), qn, v));
            }
        }
    }
    cases
        .par_iter()
        .map(|(label, f, h, qn, v)| {
            let name = format!("{label} v={v} n={}", qn.n);
            let result =
                base_spectrum(h, *qn).and_then(|base| coincidence_check(f, h, &base, *v, *qn, tol));
            match result {
                Ok(c) => check("coincidence", name, c.delta, 0.0, 1e-8),
                Err(e) => failure("coincidence", name, e),
            }
        })
        .collect()
}

fn roundtrip() -> Vec<Check> {
    let mut out = Vec::new();
    let quartic = PowerLawSpectrum::resolve(4.0, QuantumNumbers::line(0));
    let mut curves = vec![
        ("oscillator n=0", PowerLawCurve { e1: 1.0, q: 2.0 }),
        ("oscillator n=2", PowerLawCurve { e1: 5.0, q: 2.0 }),
        ("hydrogen", PowerLawCurve { e1: -0.25, q: -1.0 }),
    ];
    match &quartic {
        Ok(s) => curves.push(("quartic (oracle)", PowerLawCurve::from(s))),
        Err(e) => out.push(failure("roundtrip", "quartic unit eigenvalue".into(), e)),
    }
    for (label, curve) in curves {
        for v in [0.5, 1.0, 4.0] {
            let (s, _) = legendre_to_kinetic(&curve, v);
            let kin = LegendreKinetic::new(curve);
            match legendre_to_energy(&kin, s) {
                Ok((v2, e2)) => {
                    out.push(check(
                        "roundtrip",
                        format!("{label} v={v} coupling"),
                        v2,
                        v,
                        1e-8 * v,
                    ));
                    let e = curve.value(v);
                    out.push(check(
                        "roundtrip",
                        format!("{label} v={v} energy"),
                        e2,
                        e,
                        1e-8 * e.abs().max(1.0),
                    ));
                }
                Err(e) => out.push(failure("roundtrip", format!("{label} v={v}"), e)),
            }
            let f2 = richardson_diff(|x| curve.value(x), v, DerivOrder::Second, 1e-2 * v);
            let k2 = richardson_diff(|x| kin.value(x), s, DerivOrder::Second, 1e-2 * s);
            let expected = -1.0 / v.powi(3);
            out.push(check(
                "roundtrip",
                format!("{label} v={v} curvature product"),
                f2 * k2,
                expected,
                1e-4 * expected.abs(),
            ));
        }
    }
    out
}

fn sandwich(tol: Tolerance) -> Vec<Check> {
    let f = half("-1:-1,1:2");
    let (hl, hu) = (half("-1:-1"), half("1:2"));
    let qn = k7(0);
    let bases = base_spectrum(&hl, qn).and_then(|l| base_spectrum(&hu, qn).map(|u| (l, u)));
    let (bl, bu) = match bases {
        Ok(b) => b,
        Err(e) => return vec![failure("sandwich", "base spectra".into(), e)],
    };
    geometric_grid(0.25, 4.0, 10)
        .par_iter()
        .map(|&v| {
            let name = format!("combo k=7 v={v:.6}");
            let parts = envelope_bound_tangent(&f, &hl, &bl, v, qn, tol).and_then(|lo| {
                envelope_bound_tangent(&f, &hu, &bu, v, qn, tol).and_then(|up| {
                    solve_at(&f, qn, v, oracle_tol()).map(|e| (lo.value, e.energy, up.value))
                })
            });
            match parts {
                Ok((lo, e, up)) => {
                    let margin = (e - lo).min(up - e);
                    Check {
                        suite: "sandwich".into(),
                        name,
                        observed: e,
                        expected: 0.5 * (lo + up),
                        tolerance: 0.5 * (up - lo),
                        pass: margin > 0.0,
                        note: Some(format!("lower {lo:.9} upper {up:.9}")),
                    }
                }
                Err(e) => failure("sandwich", name, e),
            }
        })
        .collect()
}

fn scaling(tol: Tolerance) -> Vec<Check> {
    let mut out = Vec::new();
    let (f, h, qn) = (full("1:4"), full("1:2"), QuantumNumbers::line(0));
    let at = |v: f64| {
        base_spectrum(&h, qn)
            .and_then(|b| envelope_bound_tangent(&f, &h, &b, v, qn, tol))
            .map(|b| b.value)
    };
    match at(1.0) {
        Ok(one) => {
            for v in [0.5, 2.0, 8.0] {
                let name = format!("quartic bound v={v}");
                match at(v) {
                    Ok(x) => out.push(check("scaling", name, x, v.cbrt() * one, 1e-8)),
                    Err(e) => out.push(failure("scaling", name, e)),
                }
            }
        }
        Err(e) => out.push(failure("scaling", "quartic bound v=1".into(), e)),
    }
    for (q, f, qn) in [
        (
            -1.0,
            half("-1:-1"),
            QuantumNumbers::radial(3, 0, 0).expect("valid"),
        ),
        (
            2.0,
            half("1:2"),
            QuantumNumbers::radial(3, 1, 0).expect("valid"),
        ),
        (4.0, full("1:4"), QuantumNumbers::line(0)),
    ] {
        let name = format!("oracle power law q={q} v=3");
        let pair = solve_at(&f, qn, 1.0, oracle_tol()).and_then(|one| {
            solve_at(&f, qn, 3.0, oracle_tol()).map(|three| (one.energy, three.energy))
        });
        match pair {
            Ok((one, three)) => {
                let expected = one * 3f64.powf(2.0 / (2.0 + q));
                out.push(check(
                    "scaling",
                    name,
                    three,
                    expected,
                    1e-7 * expected.abs(),
                ));
            }
            Err(e) => out.push(failure("scaling", name, e)),
        }
    }
    out
}

fn invariance() -> Vec<Check> {
    let f = half("-1:-1,1:2");
    let mut out = Vec::new();
    for n in [0, 1] {
        let reference = solve_at(&f, k7(n), 1.0, oracle_tol());
        let reference = match reference {
            Ok(r) => r.energy,
            Err(e) => {
                out.push(failure("invariance", format!("(3,2) n={n}"), e));
                continue;
            }
        };
        for (d, l) in [(5, 1), (7, 0)] {
            let name = format!("k=7 ({d},{l}) vs (3,2) n={n}");
            match QuantumNumbers::radial(d, l, n).and_then(|qn| solve_at(&f, qn, 1.0, oracle_tol()))
            {
                Ok(r) => out.push(check("invariance", name, r.energy, reference, 2e-6)),
                Err(e) => out.push(failure("invariance", name, e)),
            }
        }
    }
    out
}
