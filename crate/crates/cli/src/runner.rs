//! `run`: integrate a scenario, audit it, run its checks and write the
//! artifacts of one run directory.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use spinorbit::dynamics::{conservation_audit, integrate_partial, Chart, ChartPoint, Trajectory};
use spinorbit::liepencil::{casimir_c1, casimir_c2};
use spinorbit::twistor::{pullback, TwistorPoint};
use spinorbit::Error;

use crate::scenario::Prepared;
use crate::suites::{
    chart_gaps, free_drift_gaps, massless_residuals, quadrature_gaps, run_suite, twistor_flow_gap, Check, Suite,
    SuiteReport, Worst,
};
use crate::{CliError, EXIT_CHECK_FAILED, EXIT_PASS, EXIT_SINGULARITY, OUT_DIR_ENV};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const REPORT_FILE: &str = "report.json";
pub const LOG_FILE: &str = "run.log";
pub const PLOT_FILE: &str = "plot.py";

#[derive(Debug, Clone, Serialize)]
pub struct ParamsOut {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftOut {
    pub name: &'static str,
    pub initial: f64,
    pub max_abs: f64,
    pub max_rel: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegratorOut {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Contents of `report.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub chart: String,
    pub params: ParamsOut,
    pub t_span: (f64, f64),
    pub samples_requested: usize,
    pub samples_written: usize,
    pub tolerances: (f64, f64),
    pub seed: u64,
    pub light_speed: f64,
    pub status: String,
    pub error: Option<String>,
    pub integrator: IntegratorOut,
    pub drift: Vec<DriftOut>,
    pub max_constraint_residual: f64,
    pub checks: Vec<Check>,
    pub suites: Vec<SuiteReport>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub code: i32,
    pub dir: PathBuf,
    pub report: RunReport,
}

/// `--out` wins; otherwise `$SPINORBIT_OUT_DIR/<name>`, falling back to
/// `spinorbit-out/<name>`.
pub fn output_dir(out: Option<&Path>, name: &str) -> PathBuf {
    match out {
        Some(p) => p.to_path_buf(),
        None => {
            let base = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("spinorbit-out"));
            base.join(name)
        }
    }
}

pub fn run(prep: &Prepared, dir: &Path) -> Result<RunOutcome, CliError> {
    let sc = &prep.scenario;
    let span = (sc.t0, sc.t1);
    let partial = integrate_partial(&prep.initial, &prep.params, span, &prep.options)
        .map_err(|e| CliError::Usage(format!("integration rejected: {e}")))?;
    let traj = &partial.trajectory;
    let audit = conservation_audit(traj, &prep.params);

    let mut checks = Vec::new();
    let mut suites = Vec::new();
    let status;
    if let Some(e) = &partial.error {
        status = "singularity".to_string();
        checks.push(Check::skipped("conservation", &format!("integration stopped: {e}")));
    } else {
        let drift = audit.max_rel_drift();
        let n = traj.points.len();
        checks.push(Check::new("conservation", drift, sc.drift_tol, n));
        for &s in &prep.checks {
            match scenario_checks(s, prep, traj) {
                Some(c) => checks.extend(c),
                None => suites.push(run_suite(s, sc.seed, sc.trials.unwrap_or_else(|| s.default_trials()))),
            }
        }
        let failed = checks.iter().any(Check::failed) || suites.iter().any(|s| !s.passed());
        status = if failed { "fail" } else { "pass" }.to_string();
    }

    let report = RunReport {
        scenario: sc.name.clone().unwrap_or_else(|| "scenario".into()),
        chart: traj.chart.name().to_string(),
        params: ParamsOut { a: prep.params.a, b: prep.params.b, c: prep.params.c, d: prep.params.d },
        t_span: span,
        samples_requested: sc.samples,
        samples_written: traj.points.len(),
        tolerances: (sc.rel_tol, sc.abs_tol),
        seed: sc.seed,
        light_speed: sc.light_speed,
        status: status.clone(),
        error: partial.error.as_ref().map(|e| e.to_string()),
        integrator: IntegratorOut {
            accepted: traj.stats.accepted,
            rejected: traj.stats.rejected,
            evaluations: traj.stats.evaluations,
        },
        drift: audit
            .drifts
            .iter()
            .map(|d| DriftOut { name: d.name, initial: d.initial, max_abs: d.max_abs, max_rel: d.max_rel })
            .collect(),
        max_constraint_residual: audit.max_residual,
        checks,
        suites,
    };

    write_outputs(dir, traj, &report)?;
    let code = match status.as_str() {
        "pass" => EXIT_PASS,
        "singularity" => EXIT_SINGULARITY,
        _ => EXIT_CHECK_FAILED,
    };
    Ok(RunOutcome { code, dir: dir.to_path_buf(), report })
}

fn massless_point(prep: &Prepared) -> Option<TwistorPoint<f64>> {
    match &prep.initial {
        ChartPoint::Twistor(v) => Some(*v),
        _ => {
            let x = prep.state?;
            let scale = 1.0 + x.p0 * x.p0;
            let massless = casimir_c1(&x, -1.0).abs() < 1e-10 * scale
                && casimir_c2(&x, -1.0).abs() < 1e-10 * scale * (1.0 + x.j.norm2() + x.l.norm2());
            if prep.params.a == -1.0 && massless {
                pullback(&x).ok()
            } else {
                None
            }
        }
    }
}

/// Checks tied to the scenario's own data, or `None` for suites that only run
/// randomized.
fn scenario_checks(s: Suite, prep: &Prepared, traj: &Trajectory<f64>) -> Option<Vec<Check>> {
    let p = &prep.params;
    let sc = &prep.scenario;
    let span = (sc.t0, sc.t1);
    let name = |c: &str| format!("{}/{}", s.name(), c);
    match s {
        Suite::ChartEquivalence => Some(match prep.state {
            Some(x) => match chart_gaps(&x, p, span, &prep.options) {
                Ok((_, w, r)) => {
                    let n = sc.samples;
                    vec![Check::new(&name("pl-vs-pw"), w, 1e-6, n), Check::new(&name("pl-vs-reduced"), r, 1e-6, n)]
                }
                Err(e) => vec![Check::new(&name("pl-vs-pw"), f64::NAN, 1e-6, 0).with_note(e.to_string())],
            },
            None => vec![Check::skipped(&name("pl-vs-pw"), "initial data does not fix a full state")],
        }),
        Suite::Quadrature => {
            let mut out = Vec::new();
            match quadrature_gaps(traj, p) {
                Ok(g) => {
                    let n = traj.points.len();
                    out.push(Check::new(&name("first-integral"), g.first_integral, 1e-8, n));
                    if g.bands > 0 {
                        out.push(Check::new(&name("band-time"), g.band_time, 1e-6, g.bands));
                    } else {
                        out.push(Check::skipped(&name("band-time"), "no monotone band of W0 resolved"));
                    }
                    let w: Vec<f64> =
                        traj.times.iter().filter_map(|&t| traj.reduced_at(t).ok()).map(|r| r.w0).collect();
                    let (lo, hi) = w.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(*v), h.max(*v)));
                    if hi - lo >= 0.05 * (1.0 + hi.abs().max(lo.abs())) {
                        out.push(Check::new(&name("quartic-fit"), g.fit, 1e-6, n));
                    } else {
                        out.push(Check::skipped(&name("quartic-fit"), "W0 range too narrow to fit"));
                    }
                }
                Err(e @ Error::FrozenW0) => out.push(Check::skipped(&name("first-integral"), &e.to_string())),
                Err(e) => out.push(Check::new(&name("first-integral"), f64::NAN, 1e-8, 0).with_note(e.to_string())),
            }
            if p.d == 0.0 && p.a == -1.0 && traj.chart == Chart::Pl {
                match free_drift_gaps(traj, p) {
                    Ok((l, x)) => {
                        let n = traj.points.len();
                        out.push(Check::new(&name("free-drift-l"), l, 1e-9, n));
                        out.push(Check::new(&name("free-drift-x"), x, 1e-9, n));
                    }
                    Err(e) => out.push(Check::skipped(&name("free-drift-x"), &e.to_string())),
                }
            }
            Some(out)
        }
        Suite::TwistorMassless => Some(match massless_point(prep) {
            Some(v) => {
                let mut w = [Worst::default(), Worst::default(), Worst::default()];
                let points: Vec<TwistorPoint<f64>> = match traj.chart {
                    Chart::Twistor => traj
                        .points
                        .iter()
                        .filter_map(|pt| if let ChartPoint::Twistor(t) = pt { Some(*t) } else { None })
                        .collect(),
                    _ => vec![v],
                };
                for t in &points {
                    match massless_residuals(t) {
                        Ok((a, b, c)) => {
                            w[0].add(a);
                            w[1].add(b);
                            w[2].add(c);
                        }
                        Err(_) => w.iter_mut().for_each(|x| x.add(f64::NAN)),
                    }
                }
                vec![w[0].check(&name("c1"), 1e-12), w[1].check(&name("c2"), 1e-12), w[2].check(&name("helicity"), 1e-12)]
            }
            None => vec![Check::skipped(&name("c1"), "state is not massless")],
        }),
        Suite::TwistorFlow => Some(match massless_point(prep) {
            Some(v) if p.a == -1.0 => {
                let g = twistor_flow_gap(&v, p, span, sc.samples);
                let (value, note) = match g {
                    Ok(g) => (g, None),
                    Err(e) => (f64::NAN, Some(e.to_string())),
                };
                let c = Check::new(&name("pullback-vs-twistor"), value, 1e-5, sc.samples);
                vec![match note {
                    Some(n) => c.with_note(n),
                    None => c,
                }]
            }
            _ => vec![Check::skipped(&name("pullback-vs-twistor"), "needs a massless state and a = -1")],
        }),
        _ => None,
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:e}")
}

pub fn trajectory_csv(traj: &Trajectory<f64>) -> String {
    let mut s = String::from("t");
    for c in traj.chart.components() {
        s.push(',');
        s.push_str(c);
    }
    s.push_str(",c1,c2,h1,h2,h,residual\n");
    for (k, t) in traj.times.iter().enumerate() {
        s.push_str(&fmt_num(*t));
        for v in traj.points[k].dynamic() {
            s.push(',');
            s.push_str(&fmt_num(v));
        }
        let a = &traj.audit[k];
        for v in [a.c1, a.c2, a.h1, a.h2, a.h, a.residual] {
            s.push(',');
            s.push_str(&fmt_num(v));
        }
        s.push('\n');
    }
    s
}

pub fn render_log(r: &RunReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scenario   {}", r.scenario);
    let _ = writeln!(s, "chart      {}", r.chart);
    let _ = writeln!(s, "params     a={} b={} c={} d={}", r.params.a, r.params.b, r.params.c, r.params.d);
    let _ = writeln!(s, "span       [{}, {}]  samples {}/{}", r.t_span.0, r.t_span.1, r.samples_written, r.samples_requested);
    let _ = writeln!(
        s,
        "integrator accepted {} rejected {} evaluations {}",
        r.integrator.accepted, r.integrator.rejected, r.integrator.evaluations
    );
    if let Some(e) = &r.error {
        let _ = writeln!(s, "error      {e}");
    }
    let _ = writeln!(s, "drift");
    for d in &r.drift {
        let _ = writeln!(s, "  {:<4} initial {:>14.6e}  max abs {:>10.3e}  max rel {:>10.3e}", d.name, d.initial, d.max_abs, d.max_rel);
    }
    let _ = writeln!(s, "  constraint residual {:.3e}", r.max_constraint_residual);
    let _ = writeln!(s, "checks");
    for c in &r.checks {
        let _ = writeln!(s, "{}", c.line());
    }
    for suite in &r.suites {
        s.push_str(&suite.render());
    }
    let _ = writeln!(s, "status     {}", r.status);
    s
}

pub fn plot_script(traj: &Trajectory<f64>) -> String {
    let comps: Vec<String> = traj.chart.components().iter().map(|c| format!("\"{c}\"")).collect();
    format!(
        r#"#!/usr/bin/env python3
# Generated by spinorbit. Reads {csv} from this directory, writes trajectory.png.
import csv
import os

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
with open(os.path.join(here, "{csv}")) as f:
    rows = list(csv.DictReader(f))
t = [float(r["t"]) for r in rows]

fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(9, 7))
for name in [{comps}]:
    top.plot(t, [float(r[name]) for r in rows], label=name)
top.set_ylabel("chart coordinates")
top.legend(ncol=5, fontsize="small")

for q in ["c1", "c2", "h1", "h2", "h"]:
    v = [float(r[q]) for r in rows]
    ref = max(abs(v[0]), 1.0)
    bottom.semilogy(t, [abs(x - v[0]) / ref + 1e-300 for x in v], label=q)
bottom.set_xlabel("t")
bottom.set_ylabel("relative drift")
bottom.legend(ncol=5, fontsize="small")

fig.tight_layout()
fig.savefig(os.path.join(here, "trajectory.png"), dpi=120)
"#,
        csv = TRAJECTORY_FILE,
        comps = comps.join(", ")
    )
}

fn write(path: PathBuf, text: &str) -> Result<(), CliError> {
    fs::write(&path, text).map_err(|source| CliError::Io { path, source })
}

fn write_outputs(dir: &Path, traj: &Trajectory<f64>, report: &RunReport) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    write(dir.join(TRAJECTORY_FILE), &trajectory_csv(traj))?;
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    write(dir.join(REPORT_FILE), &json)?;
    write(dir.join(LOG_FILE), &render_log(report))?;
    write(dir.join(PLOT_FILE), &plot_script(traj))?;
    Ok(())
}

