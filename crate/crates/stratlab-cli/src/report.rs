//! Re-reads a run directory and turns every artifact found into checks.

use std::path::Path;

use stratlab::boussinesq_solver::load_checkpoint;

use crate::commands::*;
use crate::config::parse_config_file;
use crate::csvio::{fmt_f64, load, Loaded, Table};
use crate::error::CliError;

pub const DIVERGENCE_TOL: f64 = 1e-10;
pub const ENERGY_INCREASE_TOL: f64 = 1e-6;
pub const CRITICAL_EXPONENT: f64 = -0.25;
pub const CRITICAL_TOL: f64 = 0.03;
pub const SMALL_BETA_EXPONENT: f64 = -0.5;
pub const SMALL_BETA_TOL: f64 = 0.05;
pub const KERNEL_EXPONENT: f64 = -0.5;
pub const KERNEL_TOL: f64 = 0.1;
pub const RATE_SLACK: f64 = 0.01;
pub const RATE_FLOOR: f64 = 0.05;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, value: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            value,
            detail: detail.into(),
        }
    }

    fn broken(name: impl Into<String>, why: impl Into<String>) -> Self {
        Check::new(name, false, f64::NAN, why)
    }
}

fn loaded(dir: &Path, file: &str, header: &[&str], out: &mut Vec<Check>) -> Option<Loaded> {
    let path = dir.join(file);
    if !path.exists() {
        return None;
    }
    match load(&path, header) {
        Ok(l) => {
            out.push(Check::new(format!("{file}: schema"), true, l.rows.len() as f64, "rows"));
            Some(l)
        }
        Err(e) => {
            out.push(Check::broken(format!("{file}: schema"), e));
            None
        }
    }
}

/// Runs `f` and turns a column error into a failed check.
fn check_with(out: &mut Vec<Check>, name: &str, f: impl FnOnce() -> Result<Check, String>) {
    out.push(f().unwrap_or_else(|e| Check::broken(name, e)));
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Largest step-to-step increase relative to the first value.
fn max_increase(v: &[f64]) -> f64 {
    let scale = v.first().map_or(1.0, |x| x.abs().max(f64::MIN_POSITIVE));
    v.windows(2)
        .map(|w| (w[1] - w[0]) / scale)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn divergence_check(out: &mut Vec<Check>, name: &str, l: &Loaded) {
    check_with(out, name, || {
        let m = max_of(&l.floats("max_divergence")?);
        Ok(Check::new(name, m <= DIVERGENCE_TOL, m, format!("<= {DIVERGENCE_TOL:e}")))
    });
}

fn sweep_checks(out: &mut Vec<Check>, rows: &Loaded, summary: &Loaded) {
    let res = (|| -> Result<Vec<Check>, String> {
        let eps = rows.floats("epsilon")?;
        let qs = rows.floats("q")?;
        let norms = rows.floats("norm_osc_L2tLq")?;
        let adm = rows.strings("admissible_flag")?;
        let sq = summary.floats("q")?;
        let theory = summary.floats("theoretical_rate")?;
        let fitted = summary.floats("fitted_exponent")?;
        let mut checks = Vec::new();
        for (i, &q) in sq.iter().enumerate() {
            // sweep rows are written in decreasing ε
            let series: Vec<(f64, f64)> = (0..eps.len())
                .filter(|&k| qs[k] == q && adm[k] == "1")
                .map(|k| (eps[k], norms[k]))
                .collect();
            let ordered = series.windows(2).all(|w| w[1].0 < w[0].0);
            let decreasing = series.len() >= 2 && ordered && series.windows(2).all(|w| w[1].1 < w[0].1);
            checks.push(Check::new(
                format!("sweep q={q}: osc norm strictly decreasing in epsilon"),
                decreasing,
                series.len() as f64,
                "admissible epsilons",
            ));
            let want = (theory[i] - RATE_SLACK).max(RATE_FLOOR);
            checks.push(Check::new(
                format!("sweep q={q}: fitted exponent"),
                fitted[i] >= want,
                fitted[i],
                format!(">= max(theoretical {} - {RATE_SLACK}, {RATE_FLOOR})", fmt_f64(theory[i])),
            ));
        }
        Ok(checks)
    })();
    match res {
        Ok(c) => out.extend(c),
        Err(e) => out.push(Check::broken("sweep", e)),
    }
}

fn dispersion_checks(out: &mut Vec<Check>, fits: &Loaded) {
    let res = (|| -> Result<Vec<Check>, String> {
        let series = fits.strings("series")?;
        let radii = fits.floats("R")?;
        let expo = fits.floats("exponent")?;
        let c = fits.floats("lower_bound_c")?;
        let mut checks = Vec::new();
        for i in 0..series.len() {
            let (target, tol) = match series[i].as_str() {
                SERIES_CRITICAL => (CRITICAL_EXPONENT, CRITICAL_TOL),
                SERIES_SMALL_BETA => (SMALL_BETA_EXPONENT, SMALL_BETA_TOL),
                other => return Err(format!("unknown series {other:?}")),
            };
            checks.push(Check::new(
                format!("dispersion {} R={}: exponent", series[i], radii[i]),
                (expo[i] - target).abs() <= tol,
                expo[i],
                format!("{target} +/- {tol}"),
            ));
            if series[i] == SERIES_CRITICAL {
                checks.push(Check::new(
                    format!("dispersion critical R={}: lower-bound constant", radii[i]),
                    c[i] > 0.0 && c[i].is_finite(),
                    c[i],
                    "> 0",
                ));
            }
        }
        Ok(checks)
    })();
    match res {
        Ok(c) => out.extend(c),
        Err(e) => out.push(Check::broken("dispersion", e)),
    }
}

/// All checks derivable from the files present in `dir`.
pub fn collect(dir: &Path) -> Vec<Check> {
    let mut out = Vec::new();
    let snap = dir.join(CONFIG_SNAPSHOT);
    if snap.exists() {
        out.push(match parse_config_file(&snap) {
            Ok(_) => Check::new("config.toml: parse", true, 0.0, "resolved config"),
            Err(e) => Check::broken("config.toml: parse", e.to_string()),
        });
    }
    if let Some(l) = loaded(dir, SIMULATE_TRAJECTORY, &TRAJECTORY_HEADER, &mut out) {
        divergence_check(&mut out, "simulate: divergence-free", &l);
    }
    if let Some(l) = loaded(dir, SIMULATE_ENERGY, &ENERGY_HEADER, &mut out) {
        check_with(&mut out, "simulate: energy nonincreasing", || {
            let m = max_increase(&l.floats("energy")?);
            Ok(Check::new(
                "simulate: energy nonincreasing",
                m <= ENERGY_INCREASE_TOL,
                m,
                format!("relative increase <= {ENERGY_INCREASE_TOL:e}"),
            ))
        });
    }
    if let Some(l) = loaded(dir, LIMIT_CSV, &LIMIT_HEADER, &mut out) {
        check_with(&mut out, "limit: finite", || {
            let ok = l.floats("vh_l2")?.iter().chain(&l.floats("theta_l2")?).all(|x| x.is_finite());
            Ok(Check::new("limit: finite", ok, l.rows.len() as f64, "samples"))
        });
    }
    if let Some(l) = loaded(dir, DIFF_CSV, &DIFF_HEADER, &mut out) {
        divergence_check(&mut out, "diff: divergence-free", &l);
    }
    if let Some(l) = loaded(dir, DIFF_ENERGY, &DIFF_ENERGY_HEADER, &mut out) {
        check_with(&mut out, "diff: energy within a priori bound", || {
            let tot = l.floats("total")?;
            let bound = l.floats("bound")?;
            let excess = tot
                .iter()
                .zip(&bound)
                .map(|(t, b)| (t - b) / b.abs().max(f64::MIN_POSITIVE))
                .fold(f64::NEG_INFINITY, f64::max);
            Ok(Check::new(
                "diff: energy within a priori bound",
                excess <= 0.0,
                excess,
                "relative excess <= 0",
            ))
        });
    }
    let rows = loaded(dir, SWEEP_CSV, &SWEEP_HEADER, &mut out);
    let summary = loaded(dir, SWEEP_SUMMARY, &SWEEP_SUMMARY_HEADER, &mut out);
    if let (Some(r), Some(s)) = (&rows, &summary) {
        sweep_checks(&mut out, r, s);
    }
    loaded(dir, DISPERSION_CSV, &DISPERSION_HEADER, &mut out);
    if let Some(l) = loaded(dir, DISPERSION_FIT, &DISPERSION_FIT_HEADER, &mut out) {
        dispersion_checks(&mut out, &l);
    }
    loaded(dir, KERNEL_CSV, &KERNEL_HEADER, &mut out);
    if let Some(l) = loaded(dir, KERNEL_FIT, &FIT_HEADER, &mut out) {
        check_with(&mut out, "kernel: sup decay exponent", || {
            let e = l.floats("exponent")?;
            let e = *e.first().ok_or("empty fit")?;
            Ok(Check::new(
                "kernel: sup decay exponent",
                (e - KERNEL_EXPONENT).abs() <= KERNEL_TOL,
                e,
                format!("{KERNEL_EXPONENT} +/- {KERNEL_TOL}"),
            ))
        });
    }
    let mut checkpoints: Vec<String> = std::fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|e| e.ok())
                .map(|e| e.file_name().to_string_lossy().into_owned())
                .filter(|n| n.ends_with(".bqs"))
                .collect()
        })
        .unwrap_or_default();
    checkpoints.sort();
    for name in checkpoints {
        out.push(match load_checkpoint(&dir.join(&name)) {
            Ok(c) => Check::new(
                format!("{name}: checkpoint"),
                c.field.is_finite(),
                c.time,
                "time",
            ),
            Err(e) => Check::broken(format!("{name}: checkpoint"), e.to_string()),
        });
    }
    out
}

/// Writes report.csv, prints one line per check, fails if any check failed
/// or there was nothing to check.
pub fn report(dir: &Path) -> Result<Vec<Check>, CliError> {
    if !dir.is_dir() {
        return Err(CliError::Io(format!("{}: not a directory", dir.display())));
    }
    let checks = collect(dir);
    let mut t = Table::new(&["check", "status", "value", "detail"]);
    for c in &checks {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!("{status} {} ({}; {})", c.name, fmt_f64(c.value), c.detail);
        t.push(vec![c.name.clone(), status.into(), fmt_f64(c.value), c.detail.clone()]);
    }
    t.write(&dir.join(REPORT_CSV))?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    if checks.is_empty() {
        println!("FAIL no artifacts found in {}", dir.display());
        return Err(CliError::Failed(1));
    }
    if failed > 0 {
        return Err(CliError::Failed(failed));
    }
    Ok(checks)
}
