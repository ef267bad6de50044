//! End-to-end acceptance checks, one PASS/FAIL line per criterion.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use spectral_envelope::envelope::{
    base_spectrum, envelope_bound_kinetic, envelope_bound_tangent, semiclassical_bound,
};
use spectral_envelope::kinetic::{
    legendre_to_energy, legendre_to_kinetic, EnergyCurve, KineticPotential, LegendreKinetic,
    OracleCurve, PowerLawCurve,
};
use spectral_envelope::local_energy::{coincidence_check, critical_parameter, local_energy_bound};
use spectral_envelope::numerics::{geometric_grid, richardson_diff, DerivOrder};
use spectral_envelope::oracle::solve_at;
use spectral_envelope::spectra::{
    eigen_residual, trial_grid, TrialFamily, TrialFunction, RESIDUAL_TOL,
};
use spectral_envelope::{
    Domain, PotentialShape, PowerLawSpectrum, QuantumNumbers, Side, Tolerance,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Option<Duration>, fn() -> Outcome);

fn half(spec: &str) -> PotentialShape {
    PotentialShape::parse(spec, Domain::HalfLine).unwrap()
}

fn full(spec: &str) -> PotentialShape {
    PotentialShape::parse(spec, Domain::FullLine).unwrap()
}

fn k7(n: u32) -> QuantumNumbers {
    QuantumNumbers::radial(3, 2, n).unwrap()
}

fn oracle_tol() -> Tolerance {
    Tolerance::new(1e-12, 1e-14, 400).unwrap()
}

fn within(label: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol {
        Ok(())
    } else {
        Err(format!(
            "{label}: got {got:.12}, want {want:.12} (tol {tol:e})"
        ))
    }
}

fn timed(limit: Option<Duration>, body: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = body()?;
    let elapsed = start.elapsed();
    match limit {
        Some(l) if elapsed > l => Err(format!("{detail}; took {elapsed:.2?}, limit {l:?}")),
        _ => Ok(format!("{detail}; {elapsed:.2?}")),
    }
}

fn quartic_lower_bounds() -> Outcome {
    let (f, h) = (full("1:4"), full("1:2"));
    let tol = Tolerance::default();
    let mut worst: f64 = 0.0;
    for n in 0..4 {
        let qn = QuantumNumbers::line(n);
        let base = base_spectrum(&h, qn).map_err(|e| e.to_string())?;
        let want = 0.75 * (2.0 * n as f64 + 1.0).powf(4.0 / 3.0);
        for (name, r) in [
            (
                "tangent",
                envelope_bound_tangent(&f, &h, &base, 1.0, qn, tol),
            ),
            (
                "kinetic",
                envelope_bound_kinetic(&f, &h, &base, 1.0, qn, tol),
            ),
            ("local", local_energy_bound(&f, &h, &base, 1.0, qn, tol)),
        ] {
            let r = r.map_err(|e| format!("{name} n={n}: {e}"))?;
            if r.side != Side::Lower {
                return Err(format!("{name} n={n}: expected a lower bound"));
            }
            within(&format!("{name} n={n}"), r.value, want, 1e-8)?;
            worst = worst.max((r.value - want).abs());
        }
    }
    Ok(format!("12 bounds, max error {worst:.1e}"))
}

fn combo_bounds() -> Outcome {
    let f = half("-1:-1,1:2");
    let qn = k7(0);
    let tol = Tolerance::default();
    let mut lines = Vec::new();
    for (h, want) in [(half("-1:-1"), 5.41553), (half("1:2"), 6.46028)] {
        let base = base_spectrum(&h, qn).map_err(|e| e.to_string())?;
        for (name, r) in [
            (
                "kinetic",
                envelope_bound_kinetic(&f, &h, &base, 1.0, qn, tol),
            ),
            (
                "semiclassical",
                semiclassical_bound(&f, &h, &base, 1.0, qn, tol),
            ),
            ("local", local_energy_bound(&f, &h, &base, 1.0, qn, tol)),
        ] {
            let r = r.map_err(|e| format!("{name} base {h}: {e}"))?;
            within(&format!("{name} base {h}"), r.value, want, 5e-5)?;
            lines.push(format!("{name} {:.6}", r.value));
        }
    }
    Ok(lines.join(", "))
}

fn coincidence() -> Outcome {
    let tol = Tolerance::default();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (f, h, line) in [
        (full("1:4"), full("1:2"), true),
        (half("-1:-1,1:2"), half("-1:-1"), false),
        (half("-1:-1,1:2"), half("1:2"), false),
    ] {
        for v in [0.5, 1.0, 2.0, 4.0] {
            for n in [0, 1] {
                let qn = if line { QuantumNumbers::line(n) } else { k7(n) };
                let base = base_spectrum(&h, qn).map_err(|e| e.to_string())?;
                let c = coincidence_check(&f, &h, &base, v, qn, tol)
                    .map_err(|e| format!("{f} / {h} v={v} n={n}: {e}"))?;
                if !(c.delta < 1e-8) {
                    return Err(format!("{f} / {h} v={v} n={n}: delta {:e}", c.delta));
                }
                worst = worst.max(c.delta);
                count += 1;
            }
        }
    }
    Ok(format!("{count} cases, max delta {worst:.1e}"))
}

fn oracle_sandwich() -> Outcome {
    let f = half("-1:-1,1:2");
    let qn = k7(0);
    let tol = Tolerance::default();
    let (hl, hu) = (half("-1:-1"), half("1:2"));
    let (bl, bu) = (
        base_spectrum(&hl, qn).map_err(|e| e.to_string())?,
        base_spectrum(&hu, qn).map_err(|e| e.to_string())?,
    );
    let mut tightest = f64::INFINITY;
    for v in geometric_grid(0.25, 4.0, 10) {
        let lo = envelope_bound_tangent(&f, &hl, &bl, v, qn, tol)
            .map_err(|e| e.to_string())?
            .value;
        let up = envelope_bound_tangent(&f, &hu, &bu, v, qn, tol)
            .map_err(|e| e.to_string())?
            .value;
        let e = solve_at(&f, qn, v, oracle_tol())
            .map_err(|e| e.to_string())?
            .energy;
        if !(lo < e && e < up) {
            return Err(format!("v={v}: {lo} < {e} < {up} fails"));
        }
        tightest = tightest.min((e - lo).min(up - e));
    }
    let osc = full("1:2");
    for n in 0..5 {
        let e = solve_at(&osc, QuantumNumbers::line(n), 1.0, oracle_tol())
            .map_err(|e| e.to_string())?;
        within(
            &format!("oscillator n={n}"),
            e.energy,
            2.0 * n as f64 + 1.0,
            1e-6,
        )?;
    }
    let qn = QuantumNumbers::radial(3, 0, 0).map_err(|e| e.to_string())?;
    let e = solve_at(&half("-1:-1"), qn, 1.0, oracle_tol()).map_err(|e| e.to_string())?;
    within("hydrogen", e.energy, -0.25, 1e-6)?;
    Ok(format!(
        "10 grid points, smallest margin {tightest:.3e}; oscillator and hydrogen reproduced"
    ))
}

fn second(fun: impl Fn(f64) -> f64, x: f64) -> f64 {
    richardson_diff(fun, x, DerivOrder::Second, 1e-2 * x)
}

fn legendre() -> Outcome {
    let quartic =
        PowerLawSpectrum::resolve(4.0, QuantumNumbers::line(0)).map_err(|e| e.to_string())?;
    let closed = [
        ("oscillator", PowerLawCurve { e1: 1.0, q: 2.0 }),
        ("oscillator n=2", PowerLawCurve { e1: 5.0, q: 2.0 }),
        ("hydrogen", PowerLawCurve { e1: -0.25, q: -1.0 }),
        ("quartic", PowerLawCurve::from(&quartic)),
    ];
    let mut checks = 0;
    for (label, curve) in closed {
        let kin = LegendreKinetic::new(curve);
        for v in [0.5, 1.0, 2.0, 4.0] {
            let (s, _) = legendre_to_kinetic(&curve, v);
            let (v2, e2) = legendre_to_energy(&kin, s).map_err(|e| format!("{label}: {e}"))?;
            within(&format!("{label} v={v} coupling"), v2, v, 1e-8 * v)?;
            within(
                &format!("{label} v={v} energy"),
                e2,
                curve.value(v),
                1e-8 * curve.value(v).abs().max(1.0),
            )?;
            let f2 = second(|x| curve.value(x), v);
            let k2 = second(|x| kin.value(x), s);
            let want = -1.0 / v.powi(3);
            within(
                &format!("{label} v={v} curvature"),
                f2 * k2,
                want,
                1e-4 * want.abs(),
            )?;
            if !(f2 < 0.0 && k2 > 0.0) {
                return Err(format!("{label} v={v}: F'' = {f2:e}, kinetic'' = {k2:e}"));
            }
            checks += 1;
        }
    }
    let sampled = OracleCurve::new(full("1:4"), QuantumNumbers::line(0));
    for v in [0.5, 1.0, 2.0, 4.0] {
        let f2 = second(|x| sampled.value(x), v);
        if !(f2 < 0.0) {
            return Err(format!("oracle quartic curve not concave at v={v}: {f2:e}"));
        }
        let kin = LegendreKinetic::new(PowerLawCurve::from(&quartic));
        let (s, _) = legendre_to_kinetic(&sampled, v);
        let k2 = second(|x| kin.value(x), s);
        if !(k2 > 0.0) {
            return Err(format!(
                "quartic kinetic potential not convex at s={s}: {k2:e}"
            ));
        }
        checks += 1;
    }
    Ok(format!("{checks} matched points"))
}

fn scaling_and_symmetry() -> Outcome {
    let (f, h, qn) = (full("1:4"), full("1:2"), QuantumNumbers::line(0));
    let tol = Tolerance::default();
    let base = base_spectrum(&h, qn).map_err(|e| e.to_string())?;
    let at = |v: f64| envelope_bound_tangent(&f, &h, &base, v, qn, tol).map(|r| r.value);
    let one = at(1.0).map_err(|e| e.to_string())?;
    for v in [0.125, 0.5, 2.0, 8.0, 27.0] {
        within(
            &format!("quartic v={v}"),
            at(v).map_err(|e| e.to_string())?,
            v.cbrt() * one,
            1e-8,
        )?;
    }
    let combo = half("-1:-1,1:2");
    for n in [0, 1] {
        let reference = solve_at(&combo, k7(n), 1.0, oracle_tol())
            .map_err(|e| e.to_string())?
            .energy;
        for (d, l) in [(5, 1), (7, 0)] {
            let qn = QuantumNumbers::radial(d, l, n).map_err(|e| e.to_string())?;
            let e = solve_at(&combo, qn, 1.0, oracle_tol())
                .map_err(|e| e.to_string())?
                .energy;
            within(&format!("({d},{l}) n={n}"), e, reference, 2e-6)?;
        }
    }
    let t1 =
        critical_parameter(&combo, &half("-1:-1"), k7(0), 1.0, 1.0).map_err(|e| e.to_string())?;
    let t2 =
        critical_parameter(&combo, &half("1:2"), k7(0), 1.0, 1.0).map_err(|e| e.to_string())?;
    within("t1(1)", t1, 1.0, 1e-8)?;
    within("t2(1)", t2, 1.5f64.sqrt(), 1e-8)?;
    Ok("cube-root scaling, (d,l) invariance, critical parameters".into())
}

fn trial_eigendata() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for family in [
        TrialFamily::Oscillator1D,
        TrialFamily::RadialCoulomb,
        TrialFamily::RadialOscillator,
    ] {
        for _ in 0..12 {
            let n = rng.gen_range(0..4);
            let qn = match family {
                TrialFamily::Oscillator1D => QuantumNumbers::line(n),
                _ => QuantumNumbers::radial(rng.gen_range(2..6), rng.gen_range(0..3), n)
                    .map_err(|e| e.to_string())?,
            };
            let t = 10f64.powf(rng.gen_range(-1.0..1.0));
            let tf = TrialFunction::new(family, qn, t).map_err(|e| e.to_string())?;
            let r = eigen_residual(&tf, &trial_grid(&tf, 400));
            if !(r < RESIDUAL_TOL) {
                return Err(format!("{family:?} {qn:?} t={t}: residual {r:e}"));
            }
            worst = worst.max(r);
            count += 1;
        }
    }
    Ok(format!(
        "{count} randomized members, max residual {worst:.1e}"
    ))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        (
            "quartic lower bounds by three methods",
            Some(Duration::from_secs(1)),
            quartic_lower_bounds,
        ),
        (
            "combo potential lower and upper bounds",
            Some(Duration::from_secs(1)),
            combo_bounds,
        ),
        (
            "envelope and local-energy bounds coincide",
            None,
            coincidence,
        ),
        (
            "oracle lies between the bounds",
            Some(Duration::from_secs(30)),
            oracle_sandwich,
        ),
        (
            "Legendre round trip, curvature and convexity",
            None,
            legendre,
        ),
        (
            "scaling, (d,l) invariance, critical parameters",
            None,
            scaling_and_symmetry,
        ),
        (
            "trial functions are eigenfunctions of their base",
            None,
            trial_eigendata,
        ),
    ];
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        match timed(limit, run) {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail})", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {}: {name} ({why})", i + 1);
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
