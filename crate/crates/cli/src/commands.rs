use std::path::Path;

use serde::Serialize;
use serde_json::json;

use retroatom::channels::ChannelParams;
use retroatom::qop::Operator2;
use retroatom::retrodiction::{forward_bayes, preparation_posterior, retrodict_open, retrodict_pauli};
use retroatom::scenarios::{default_grid, figure_data, linspace, FigureId, FigureParams};
use retroatom::selfcheck::{run_checks, CheckOptions, Fault, RowKind};

use crate::error::{CliError, CliResult};
use crate::input::{parse_ensemble, parse_pom};
use crate::output::{csv_row, emit, json, num};
use crate::{ChannelArgs, Format, OutputArgs};

/// Adjoint and Pauli-expansion routes must agree this closely.
const ROUTE_TOL: f64 = 1e-12;
/// Retrodictive and forward-Bayes posteriors must agree this closely.
const POSTERIOR_TOL: f64 = 1e-10;

fn channel_params(args: &ChannelArgs) -> CliResult<ChannelParams> {
    let params = ChannelParams { kind: args.channel, gamma: args.gamma, nbar: args.nbar, v: args.v, tau: args.tau };
    params.validate()?;
    Ok(params)
}

fn elements(op: &Operator2) -> [(&'static str, f64, f64); 4] {
    [
        ("rho_ee", op.ee().re, op.ee().im),
        ("rho_eg", op.eg().re, op.eg().im),
        ("rho_ge", op.ge().re, op.ge().im),
        ("rho_gg", op.gg().re, op.gg().im),
    ]
}

pub fn retrodict(args: &ChannelArgs, pom: &str, out: &OutputArgs, scale: f64) -> CliResult<()> {
    let params = channel_params(args)?;
    let pom = parse_pom(pom, &params)?;
    let adj = retrodict_open(&params, &pom)?;
    let pauli = retrodict_pauli(&params, &pom)?;
    let gap = adj.rho_retr.op().dist(pauli.rho_retr.op());
    if gap > ROUTE_TOL * scale {
        return Err(CliError::Failure(format!("retrodiction routes disagree by {gap:e}")));
    }

    let op = adj.rho_retr.op();
    let text = match out.format {
        Format::Csv => {
            let mut s = String::new();
            csv_row(&mut s, ["quantity", "re", "im"]);
            for (name, re, im) in elements(op) {
                csv_row(&mut s, [name.to_owned(), num(re), num(im)]);
            }
            csv_row(&mut s, ["normalization".to_owned(), num(adj.normalization), num(0.0)]);
            s
        }
        Format::Json => json(&json!({
            "channel": params,
            "pom": pom.label(),
            "rho_retr": op,
            "normalization": adj.normalization,
        })),
    };
    emit(&text, out.output.as_deref())
}

#[derive(Serialize)]
struct PosteriorRow<'a> {
    label: &'a str,
    retrodictive: f64,
    forward_bayes: f64,
    abs_deviation: f64,
}

pub fn posterior(args: &ChannelArgs, pom: &str, ensemble: &str, out: &OutputArgs, scale: f64) -> CliResult<()> {
    let params = channel_params(args)?;
    let pom = parse_pom(pom, &params)?;
    let ensemble = parse_ensemble(ensemble)?;
    let retro = preparation_posterior(&retrodict_open(&params, &pom)?.rho_retr, &ensemble)?;
    let fwd = forward_bayes(&params, &ensemble, &pom)?;
    let max_deviation = retro.max_deviation(&fwd);

    let rows: Vec<PosteriorRow> = retro
        .entries()
        .iter()
        .zip(fwd.entries())
        .map(|((label, r), (_, f))| PosteriorRow {
            label,
            retrodictive: *r,
            forward_bayes: *f,
            abs_deviation: (r - f).abs(),
        })
        .collect();
    let text = match out.format {
        Format::Csv => {
            let mut s = String::new();
            csv_row(&mut s, ["label", "retrodictive", "forward_bayes", "abs_deviation"]);
            for r in &rows {
                csv_row(&mut s, [r.label.to_owned(), num(r.retrodictive), num(r.forward_bayes), num(r.abs_deviation)]);
            }
            s
        }
        Format::Json => {
            json(&json!({ "channel": params, "pom": pom.label(), "entries": rows, "max_deviation": max_deviation }))
        }
    };
    emit(&text, out.output.as_deref())?;
    if max_deviation > POSTERIOR_TOL * scale {
        return Err(CliError::Failure(format!("retrodictive and forward posteriors differ by {max_deviation:e}")));
    }
    Ok(())
}

pub fn figure(
    id: FigureId,
    params: &FigureParams,
    points: usize,
    tau_max: Option<f64>,
    out: &OutputArgs,
) -> CliResult<()> {
    if points == 0 {
        return Err(CliError::Config("--points must be at least 1".into()));
    }
    if !(params.gamma.is_finite() && params.gamma > 0.0) {
        return Err(CliError::Config(format!("gamma must be positive, got {}", params.gamma)));
    }
    let grid = match tau_max {
        None => default_grid(id, params.gamma, points),
        Some(t) if t.is_finite() && t > 0.0 => linspace(0.0, t, points),
        Some(t) => return Err(CliError::Config(format!("--tau-max must be positive, got {t}"))),
    };
    let curve = figure_data(id, params, &grid)?;

    let text = match out.format {
        Format::Csv => {
            let mut s = String::new();
            let header = std::iter::once("tau").chain(curve.series().iter().map(|(n, _)| n.as_str()));
            csv_row(&mut s, header);
            for (i, tau) in curve.tau_grid().iter().enumerate() {
                let row = std::iter::once(num(*tau)).chain(curve.series().iter().map(|(_, col)| num(col[i])));
                csv_row(&mut s, row);
            }
            s
        }
        Format::Json => {
            let series: Vec<_> = curve.series().iter().map(|(n, col)| json!({ "name": n, "values": col })).collect();
            json(&json!({
                "figure": id.name(),
                "gamma": params.gamma,
                "nbar": params.nbar,
                "v": params.v,
                "tau": curve.tau_grid(),
                "series": series,
            }))
        }
    };
    emit(&text, out.output.as_deref())
}

pub fn check(as_json: bool, output: Option<&Path>, fault: Option<Fault>, scale: f64) -> CliResult<()> {
    let report = run_checks(CheckOptions { tolerance_scale: scale, fault, ..CheckOptions::default() });
    let text = if as_json {
        json(&json!({ "passed": report.passed(), "rows": report.rows }))
    } else {
        let mut s = format!("{:<8} {:>10} {:>10} {:>6}  {}\n", "status", "measured", "tolerance", "cases", "check");
        for r in &report.rows {
            let status = match (r.kind, r.passed) {
                (RowKind::Invariant, true) => "PASS",
                (RowKind::Invariant, false) => "FAIL",
                (RowKind::Transcription, true) => "agrees",
                (RowKind::Transcription, false) => "differs",
            };
            s.push_str(&format!(
                "{status:<8} {:>10.2e} {:>10.1e} {:>6}  {}\n",
                r.measured, r.tolerance, r.cases, r.name
            ));
        }
        let invariants = report.rows.iter().filter(|r| r.kind == RowKind::Invariant).count();
        let failed = report.failures().count();
        let differs = report.rows.iter().filter(|r| r.kind == RowKind::Transcription && !r.passed).count();
        s.push_str(&format!(
            "{}/{} invariants passed; {} printed form(s) differ from the generator oracle\n",
            invariants - failed,
            invariants,
            differs
        ));
        s
    };
    emit(&text, output)?;
    if report.passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|r| r.name.as_str()).collect();
        Err(CliError::Failure(format!("failed invariants: {}", names.join("; "))))
    }
}
