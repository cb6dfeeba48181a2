use std::fs;
use std::io::Write;

use rqkz_core::idsuite::VerificationReport;
use rqkz_core::repkit::build_eval_rep;
use rqkz_core::rsolve::{LocalCache, RFamily};
use rqkz_core::scalarlib;
use rqkz_core::tensorops::TensorOperator;
use rqkz_core::C;
use serde::Serialize;

use crate::config::{Command, FormArg, Format, RunConfig};
use crate::dump::MatrixDump;
use crate::error::CliError;
use crate::report::{format_f64, reports_to_json, reports_to_text, to_exact_json, Complex};
use crate::suite::{find_check, run_checks, run_suite, CHECKS};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn render(cfg: &RunConfig, reports: &[VerificationReport]) -> String {
    match cfg.format {
        Format::Json => reports_to_json(reports),
        Format::Text => reports_to_text(reports),
    }
}

fn verdict(reports: &[VerificationReport]) -> i32 {
    if reports.iter().all(|r| r.passed) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Runs every check and writes the sorted report array.
pub fn cmd_suite(cfg: &RunConfig) -> Result<i32, CliError> {
    let reports = run_suite(cfg);
    emit(cfg, &render(cfg, &reports))?;
    Ok(verdict(&reports))
}

/// Runs one named check; `list` prints the registry instead.
pub fn cmd_verify(cfg: &RunConfig, check: &str) -> Result<i32, CliError> {
    if check == "list" {
        let text: String = CHECKS.iter().map(|c| format!("{:<20} {}\n", c.name, c.about)).collect();
        emit(cfg, &text)?;
        return Ok(EXIT_PASS);
    }
    let c = find_check(check)?;
    let reports = run_checks(&[c], cfg);
    emit(cfg, &render(cfg, &reports))?;
    Ok(verdict(&reports))
}

/// The requested `R` or `Ř` with the first configured normalization and twist.
pub fn rmat_operator(cfg: &RunConfig) -> Result<TensorOperator, CliError> {
    let rep = build_eval_rep(cfg.m, cfg.grading, &cfg.ctx);
    let cache = LocalCache::new();
    let f = RFamily::new(&rep, cfg.alphas[0], cfg.norms[0], &cache);
    let [k1, k2] = cfg.pair;
    let data = match cfg.form {
        FormArg::R => f.r(k1, cfg.zeta1, k2, cfg.zeta2)?,
        FormArg::Rcheck => f.rcheck(k1, cfg.zeta1, k2, cfg.zeta2)?,
    };
    let d = f.dim();
    Ok(TensorOperator::new(vec![d, d], vec![d, d], data)?)
}

pub fn cmd_rmat(cfg: &RunConfig) -> Result<i32, CliError> {
    let dump = MatrixDump::from_operator(&rmat_operator(cfg)?);
    let text = match cfg.format {
        Format::Json => dump.to_json(),
        Format::Text => {
            let cols: usize = dump.site_dims_in.iter().product();
            let mut s = String::new();
            for row in dump.data.chunks(cols) {
                let cells: Vec<String> = row.iter().map(|[re, im]| format!("{re:+.6e}{im:+.6e}i")).collect();
                s.push_str(&cells.join(" "));
                s.push('\n');
            }
            s
        }
    };
    emit(cfg, &text)?;
    Ok(EXIT_PASS)
}

/// One row of the scalar table.
#[derive(Debug, Clone, Serialize)]
pub struct ScalarRow {
    pub family: String,
    pub z: Complex,
    pub rho0: Option<Complex>,
    pub kappa: Option<Complex>,
    pub d: Complex,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn row(family: String, z: C, rho0: rqkz_core::Result<C>, kappa: rqkz_core::Result<C>, d: C) -> ScalarRow {
    let error = rho0.as_ref().err().or(kappa.as_ref().err()).map(|e| e.to_string());
    ScalarRow {
        family,
        z: Complex(z),
        rho0: rho0.ok().map(Complex),
        kappa: kappa.ok().map(Complex),
        d: Complex(d),
        error,
    }
}

/// `ρ⁰`, `κ` and the difference-equation constant for spin-`m` `sl2` and
/// fundamental `sl(l+1)` at `z`.
pub fn scalar_table(cfg: &RunConfig) -> Vec<ScalarRow> {
    let (c, z) = (&cfg.ctx, cfg.z);
    let m = cfg.m as u32;
    let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
    vec![
        row(
            format!("sl2/m={m}"),
            z,
            scalarlib::rho0_sl2(m, z, c),
            scalarlib::kappa_sl2(m, z, c),
            C::new(sign, 0.0),
        ),
        row(
            format!("sl{}/fund", cfg.l + 1),
            z,
            scalarlib::rho0_sllpo(cfg.l, z, c),
            scalarlib::kappa_sllpo(cfg.l, z, c),
            C::new(1.0, 0.0),
        ),
    ]
}

pub fn cmd_scalars(cfg: &RunConfig) -> Result<i32, CliError> {
    let rows = scalar_table(cfg);
    let text = match cfg.format {
        Format::Json => to_exact_json(&rows),
        Format::Text => {
            let cell = |v: &Option<Complex>| match v {
                Some(c) => format!("{} {}", format_f64(c.0.re), format_f64(c.0.im)),
                None => "-".into(),
            };
            let mut s = String::from("family z rho0 kappa d\n");
            for r in &rows {
                s.push_str(&format!(
                    "{} {} {} | {} | {} | {}\n",
                    r.family,
                    format_f64(r.z.0.re),
                    format_f64(r.z.0.im),
                    cell(&r.rho0),
                    cell(&r.kappa),
                    format_f64(r.d.0.re)
                ));
            }
            s
        }
    };
    emit(cfg, &text)?;
    Ok(EXIT_PASS)
}

pub fn dispatch(command: &Command, cfg: &RunConfig) -> Result<i32, CliError> {
    match command {
        Command::Suite => cmd_suite(cfg),
        Command::Verify { check } => cmd_verify(cfg, check),
        Command::Rmat => cmd_rmat(cfg),
        Command::Scalars => cmd_scalars(cfg),
    }
}
