use rayon::prelude::*;

use spectral_envelope::envelope::{bound, Method};
use spectral_envelope::local_energy::coincidence_check;
use spectral_envelope::oracle::solve_at;
use spectral_envelope::spectra::TrialFamily;
use spectral_envelope::{Side, Tolerance};

use crate::config::{resolve_tolerance, Base, MethodArg, OutputArg, RunConfig, VerifyArgs};
use crate::report::{
    bound_csv, bound_table, oracle_csv, oracle_table, sweep_csv, sweep_table, to_json,
    verify_table, BoundRow, OracleRow, Payload, Report, SweepRow, SCHEMA_VERSION,
};
use crate::verify::run_suite;
use crate::CliError;

/// Rendered output and whether any numeric step failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub failed: bool,
}

fn oracle_tol(tol: Tolerance) -> Tolerance {
    Tolerance::new(tol.abs_x, 1e-14, tol.max_iter.max(400)).expect("positive tolerance")
}

fn render(cfg: &RunConfig, payload: Payload) -> String {
    match cfg.output {
        OutputArg::Json => {
            let mut s = to_json(&Report {
                schema_version: SCHEMA_VERSION,
                config: cfg.echo(),
                payload,
            });
            s.push('\n');
            s
        }
        OutputArg::Csv => match &payload {
            Payload::Bound(rows) => bound_csv(rows),
            Payload::Sweep(rows) => sweep_csv(rows),
            Payload::Oracle(rows) => oracle_csv(rows),
        },
        OutputArg::Table => match &payload {
            Payload::Bound(rows) => bound_table(rows),
            Payload::Sweep(rows) => sweep_table(rows),
            Payload::Oracle(rows) => oracle_table(rows),
        },
    }
}

pub fn cmd_bound(cfg: &RunConfig) -> Outcome {
    let methods = cfg.method.methods();
    let jobs: Vec<(f64, &Base, Method)> = cfg
        .couplings
        .iter()
        .flat_map(|&v| {
            cfg.bases
                .iter()
                .flat_map(|b| methods.iter().map(move |&m| (v, b, m)))
                .collect::<Vec<_>>()
        })
        .collect();
    let rows: Vec<BoundRow> = jobs
        .par_iter()
        .map(|&(v, b, m)| {
            let r = bound(m, &cfg.potential, &b.shape, &b.spectrum, v, cfg.qn, cfg.tol);
            BoundRow::from_result(v, &b.spec, m, &r)
        })
        .collect();
    let failed = rows.iter().any(|r| r.error.is_some());
    Outcome {
        text: render(cfg, Payload::Bound(rows)),
        failed,
    }
}

fn value_method(m: MethodArg) -> Method {
    match m {
        MethodArg::Tangent | MethodArg::All => Method::TangentEnvelope,
        MethodArg::Kinetic => Method::KineticEnvelope,
        MethodArg::Semiclassical => Method::Semiclassical,
        MethodArg::Local => Method::LocalEnergy,
    }
}

fn has_trial_family(b: &Base, cfg: &RunConfig) -> bool {
    TrialFamily::for_base(b.spectrum.q, cfg.qn.mode).is_ok()
}

fn sweep_row(cfg: &RunConfig, v: f64) -> SweepRow {
    let method = value_method(cfg.method);
    let mut lower: Option<f64> = None;
    let mut upper: Option<f64> = None;
    let mut delta: Option<f64> = None;
    let mut errors = Vec::new();
    for b in &cfg.bases {
        match bound(
            method,
            &cfg.potential,
            &b.shape,
            &b.spectrum,
            v,
            cfg.qn,
            cfg.tol,
        ) {
            Ok(r) => match r.side {
                Side::Lower => lower = Some(lower.map_or(r.value, |x| x.max(r.value))),
                Side::Upper => upper = Some(upper.map_or(r.value, |x| x.min(r.value))),
            },
            Err(e) => errors.push(format!("base {} {}: {e}", b.spec, method.name())),
        }
        if has_trial_family(b, cfg) {
            match coincidence_check(&cfg.potential, &b.shape, &b.spectrum, v, cfg.qn, cfg.tol) {
                Ok(c) => delta = Some(delta.map_or(c.delta, |d| d.max(c.delta))),
                Err(e) => errors.push(format!("base {} coincidence: {e}", b.spec)),
            }
        }
    }
    let oracle = match solve_at(&cfg.potential, cfg.qn, v, oracle_tol(cfg.tol)) {
        Ok(r) => Some(r.energy),
        Err(e) => {
            errors.push(format!("oracle: {e}"));
            None
        }
    };
    SweepRow::new(v, lower, upper, oracle, delta, Some(errors.join("; ")))
}

pub fn cmd_sweep(cfg: &RunConfig) -> Outcome {
    let rows: Vec<SweepRow> = cfg
        .couplings
        .par_iter()
        .map(|&v| sweep_row(cfg, v))
        .collect();
    let failed = rows.iter().any(|r| r.error.is_some());
    Outcome {
        text: render(cfg, Payload::Sweep(rows)),
        failed,
    }
}

pub fn cmd_oracle(cfg: &RunConfig) -> Outcome {
    let tol = oracle_tol(cfg.tol);
    let rows: Vec<OracleRow> = cfg
        .couplings
        .par_iter()
        .map(|&v| OracleRow::from_result(v, &solve_at(&cfg.potential, cfg.qn, v, tol)))
        .collect();
    let failed = rows.iter().any(|r| r.error.is_some());
    Outcome {
        text: render(cfg, Payload::Oracle(rows)),
        failed,
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let tol = resolve_tolerance(args.tol)?;
    let report = run_suite(&args.suite, tol)?;
    let failed = report.failed > 0;
    let text = match args.output {
        OutputArg::Json => to_json(&report) + "\n",
        OutputArg::Table | OutputArg::Csv => verify_table(&report),
    };
    Ok(Outcome { text, failed })
}
