//! Command-line surface: run verifications, list the registry and pair
//! catalog, expand named series, and emit text or JSON reports.
//!
//! Exit codes are the CI contract: 0 = all selected verifications pass,
//! 1 = a mathematical mismatch, 2 = usage or parameter errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use num::complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::identities::{
    all_ids, get_entry, theta_a, theta_psi, verify_exact, verify_numeric, F1Variant,
    IdentityParams, PsiForm, ThetaAForm, VerificationReport,
};
use crate::params::{parse_cpoint, parse_param};
use crate::qseries::{QMonomial, QSeries};
use crate::wppairs::{
    catalog_pair, chain_step, default_samples, wp_check, PairId, PairInstance, WpCheckReport,
};

#[derive(Parser)]
#[command(name = "wpbailey", version, about = "Exact and numeric verification of WP-Bailey pair identities", disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify one identity (or `--id all`) in the chosen backend.
    Verify {
        /// Identity id from `list`, or `all`.
        #[arg(long)]
        id: String,
        /// Truncation order for exact verification (>= 4); defaults to the
        /// entry's own order.
        #[arg(long)]
        order: Option<i64>,
        /// `exact` or `numeric`.
        #[arg(long, default_value = "exact")]
        backend: String,
        /// Evaluation point for the numeric backend, |q| < 1.
        #[arg(long = "q-point", default_value = "0.3")]
        q_point: String,
        /// Exact parameter override, e.g. `a=[2/1,0/1]q^1` (repeatable).
        #[arg(long = "param")]
        params: Vec<String>,
        /// WP pair or derived pair token for the pair-based identities.
        #[arg(long)]
        pair: Option<String>,
        /// `text` or `json`.
        #[arg(long, default_value = "text")]
        format: String,
        /// Write the report to a file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List registry entries and the pair catalog.
    List {
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Print the coefficients of a named series.
    Expand {
        /// One of: psi, a_of_q, f1, f2, f.
        #[arg(long)]
        series: String,
        #[arg(long, default_value_t = 40)]
        order: i64,
        /// Base power: the series variable is q^base.
        #[arg(long, default_value_t = 1)]
        base: i64,
        /// Representation for f1: lambert, qgauss or unitpair.
        #[arg(long)]
        variant: Option<String>,
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(long, default_value = "text")]
        format: String,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the defining-relation checks over the pair catalog.
    PairsCheck {
        /// A catalog pair token, or `all`.
        #[arg(long, default_value = "all")]
        pair: String,
        #[arg(long = "n-max", default_value_t = 12)]
        n_max: i64,
        #[arg(long, default_value_t = 40)]
        order: i64,
    },
}

/// Entry point used by `main`; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own help/usage; usage problems are exit 2,
            // --help/--version are exit 0.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Command::Verify { id, order, backend, q_point, params, pair, format, output } => {
            cmd_verify(&id, order, &backend, &q_point, &params, pair.as_deref(), &format, output)
        }
        Command::List { format } => cmd_list(&format),
        Command::Expand { series, order, base, variant, params, format, output } => {
            cmd_expand(&series, order, base, variant.as_deref(), &params, &format, output)
        }
        Command::PairsCheck { pair, n_max, order } => cmd_pairs_check(&pair, n_max, order),
    }
}

fn parse_overrides(params: &[String], pair: Option<&str>) -> Result<IdentityParams> {
    let mut overrides = IdentityParams::default();
    for p in params {
        let (name, m) = parse_param(p)?;
        overrides.monos.insert(name, m);
    }
    if let Some(tok) = pair {
        overrides.pair = Some(tok.to_string());
    }
    Ok(overrides)
}

fn emit(text: String, output: Option<PathBuf>) -> Result<()> {
    match output {
        Some(path) => std::fs::write(&path, text.as_bytes())
            .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Domain(format!("cannot write report: {e}")))
        }
    }
}

enum RunOutcome {
    Report(VerificationReport),
    Failed { id: String, backend: &'static str, order: i64, error: Error },
}

#[allow(clippy::too_many_arguments)] // mirrors the flag surface
fn cmd_verify(
    id: &str,
    order_flag: Option<i64>,
    backend: &str,
    q_point: &str,
    params: &[String],
    pair: Option<&str>,
    format: &str,
    output: Option<PathBuf>,
) -> Result<i32> {
    let overrides = parse_overrides(params, pair)?;
    let numeric = match backend {
        "exact" => false,
        "numeric" => true,
        other => return Err(Error::Domain(format!("unknown backend `{other}`"))),
    };
    if let Some(o) = order_flag {
        if o < 4 {
            return Err(Error::Domain(format!("order must be at least 4, got {o}")));
        }
    }
    let q0 = parse_cpoint(q_point)?;
    if numeric && q0.norm() >= 1.0 {
        return Err(Error::Domain(format!("numeric mode requires |q| < 1, got |q| = {}", q0.norm())));
    }
    let ids: Vec<&str> = if id == "all" {
        all_ids()
    } else {
        vec![get_entry(id)?.id]
    };
    let single = id != "all";
    let mut outcomes = Vec::new();
    for entry_id in &ids {
        let entry = get_entry(entry_id)?;
        let order = order_flag.unwrap_or(entry.default_order);
        let res = if numeric {
            verify_numeric(entry_id, &overrides, order, q0)
        } else {
            verify_exact(entry_id, &overrides, order)
        };
        match res {
            Ok(rep) => outcomes.push(RunOutcome::Report(rep)),
            Err(error) => {
                if single {
                    return Err(error);
                }
                outcomes.push(RunOutcome::Failed {
                    id: entry_id.to_string(),
                    backend: if numeric { "numeric" } else { "exact" },
                    order,
                    error,
                });
            }
        }
    }

    let text = match format {
        "text" => render_text(&outcomes),
        "json" => render_json(&outcomes, single)?,
        other => return Err(Error::Domain(format!("unknown format `{other}`"))),
    };
    emit(text, output)?;
    Ok(exit_code(&outcomes))
}

/// 0 = all pass, 1 = mathematical mismatch, 2 = operational error.
fn exit_code(outcomes: &[RunOutcome]) -> i32 {
    let mut code = 0;
    for o in outcomes {
        match o {
            RunOutcome::Failed { .. } => return 2,
            RunOutcome::Report(r) if !r.pass => code = code.max(1),
            _ => {}
        }
    }
    code
}

fn order_or_point(rep: &VerificationReport) -> String {
    match rep.q_point {
        Some(q) => format_cpoint(q),
        None => rep.order.to_string(),
    }
}

fn format_cpoint(q: Complex64) -> String {
    if q.im == 0.0 {
        format!("{}", q.re)
    } else if q.im < 0.0 {
        format!("{}{}i", q.re, q.im)
    } else {
        format!("{}+{}i", q.re, q.im)
    }
}

fn render_text(outcomes: &[RunOutcome]) -> String {
    let mut out = String::new();
    for o in outcomes {
        match o {
            RunOutcome::Report(r) => {
                let verdict = if r.pass { "PASS" } else { "FAIL" };
                let detail = match &r.first_mismatch {
                    Some(m) => match m.exponent {
                        Some(e) => format!(
                            " first mismatch at q^{e}: lhs = {}+({})i, rhs = {}+({})i",
                            m.lhs.0, m.lhs.1, m.rhs.0, m.rhs.1
                        ),
                        None => format!(" |lhs-rhs| = {:e}", m.abs_diff.unwrap_or(f64::NAN)),
                    },
                    None => String::new(),
                };
                out.push_str(&format!(
                    "{} {} {} {}{}\n",
                    r.id,
                    r.backend.token(),
                    order_or_point(r),
                    verdict,
                    detail
                ));
            }
            RunOutcome::Failed { id, backend, order, error } => {
                out.push_str(&format!("{id} {backend} {order} ERROR {error}\n"));
            }
        }
    }
    out
}

fn render_json(outcomes: &[RunOutcome], single: bool) -> Result<String> {
    let objects: Vec<serde_json::Value> = outcomes
        .iter()
        .map(|o| match o {
            RunOutcome::Report(r) => {
                let mut obj = json!({
                    "id": r.id,
                    "backend": r.backend.token(),
                    "order": r.order,
                    "outcome": if r.pass { "pass" } else { "fail" },
                    "first_mismatch": r.first_mismatch.as_ref().map(|m| json!({
                        "exponent": m.exponent,
                        "lhs": [m.lhs.0, m.lhs.1],
                        "rhs": [m.rhs.0, m.rhs.1],
                    })),
                    "millis": r.millis as u64,
                });
                if let Some(q) = r.q_point {
                    obj["q_point"] = json!([q.re, q.im]);
                }
                obj
            }
            RunOutcome::Failed { id, backend, order, error } => json!({
                "id": id,
                "backend": backend,
                "order": order,
                "outcome": "error",
                "first_mismatch": serde_json::Value::Null,
                "error": error.to_string(),
                "millis": 0,
            }),
        })
        .collect();
    let value = if single && objects.len() == 1 {
        objects.into_iter().next().unwrap()
    } else {
        serde_json::Value::Array(objects)
    };
    serde_json::to_string_pretty(&value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Error::Domain(format!("json rendering failed: {e}")))
}

fn cmd_list(format: &str) -> Result<i32> {
    let mut text = String::new();
    match format {
        "text" => {
            text.push_str("identities:\n");
            for e in crate::identities::registry() {
                text.push_str(&format!(
                    "  {:12} (order {:3})  {}\n",
                    e.id, e.default_order, e.description
                ));
            }
            text.push_str("pairs: trivial, unit, singh, sqrtk\n");
            text.push_str("derived pairs: trivial*, unit*, singh*, singh-rho-inf*, sqrtk*\n");
            text.push_str("series: psi, a_of_q, f1, f2, f\n");
        }
        "json" => {
            let ids: Vec<serde_json::Value> = crate::identities::registry()
                .iter()
                .map(|e| {
                    json!({"id": e.id, "order": e.default_order, "description": e.description})
                })
                .collect();
            let value = json!({
                "identities": ids,
                "pairs": ["trivial", "unit", "singh", "sqrtk"],
                "derived_pairs": ["trivial*", "unit*", "singh*", "singh-rho-inf*", "sqrtk*"],
                "series": ["psi", "a_of_q", "f1", "f2", "f"],
            });
            text = serde_json::to_string_pretty(&value).unwrap();
            text.push('\n');
        }
        other => return Err(Error::Domain(format!("unknown format `{other}`"))),
    }
    emit(text, None)?;
    Ok(0)
}

fn expand_series(
    series: &str,
    order: i64,
    base: i64,
    variant: Option<&str>,
    monos: &std::collections::BTreeMap<String, QMonomial>,
) -> Result<QSeries> {
    let mono = |name: &str| -> Result<QMonomial> {
        monos
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Domain(format!("series `{series}` requires --param {name}=...")))
    };
    match series {
        "psi" => theta_psi(base, order, PsiForm::Sum),
        "a_of_q" => theta_a(order, ThetaAForm::Lattice),
        "f1" => {
            let v = match variant {
                None => F1Variant::Lambert,
                Some(tok) => F1Variant::from_token(tok)
                    .ok_or_else(|| Error::Domain(format!("unknown f1 variant `{tok}`")))?,
            };
            crate::identities::f1_series(v, &mono("a")?, base, order)
        }
        "f2" => crate::identities::f2_series(&mono("a")?, base, order),
        "f" => crate::identities::f_series(&mono("a")?, &mono("k")?, &mono("z")?, base, order),
        other => Err(Error::UnknownSeries(other.to_string())),
    }
}

fn cmd_expand(
    series: &str,
    order: i64,
    base: i64,
    variant: Option<&str>,
    params: &[String],
    format: &str,
    output: Option<PathBuf>,
) -> Result<i32> {
    if order < 4 {
        return Err(Error::Domain(format!("order must be at least 4, got {order}")));
    }
    if base < 1 {
        return Err(Error::Domain(format!("base must be at least 1, got {base}")));
    }
    let overrides = parse_overrides(params, None)?;
    let s = expand_series(series, order, base, variant, &overrides.monos)?;
    let lo = s.val().unwrap_or(0).min(0);
    let window = s.coeff_window(lo, order)?;
    let mut text = String::new();
    match format {
        "text" => {
            for (i, c) in window.iter().enumerate() {
                let (re, im) = c.render_pair();
                text.push_str(&format!("q^{}\t{}\t{}\n", lo + i as i64, re, im));
            }
        }
        "json" => {
            let rows: Vec<serde_json::Value> = window
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let (re, im) = c.render_pair();
                    json!({"exponent": lo + i as i64, "re": re, "im": im})
                })
                .collect();
            text = serde_json::to_string_pretty(&serde_json::Value::Array(rows)).unwrap();
            text.push('\n');
        }
        other => return Err(Error::Domain(format!("unknown format `{other}`"))),
    }
    emit(text, output)?;
    Ok(0)
}

fn cmd_pairs_check(pair: &str, n_max: i64, order: i64) -> Result<i32> {
    if order < 4 {
        return Err(Error::Domain(format!("order must be at least 4, got {order}")));
    }
    let ids: Vec<PairId> = if pair == "all" {
        vec![PairId::Trivial, PairId::Unit, PairId::Singh, PairId::SqrtK]
    } else {
        vec![catalog_pair(pair)?]
    };
    let mut any_fail = false;
    let mut text = String::new();
    let mut record = |rep: &WpCheckReport| {
        let verdict = if rep.ok { "PASS" } else { "FAIL" };
        text.push_str(&format!("{} n<={} order {} {}\n", rep.pair, rep.n_max, rep.order, verdict));
        if !rep.ok {
            any_fail = true;
        }
    };
    for id in &ids {
        for pars in default_samples(*id) {
            let inst = PairInstance::new(*id, pars, 1)?;
            let rep = wp_check(&inst, n_max, order)?;
            record(&rep);
        }
    }
    // Chain closure on the parameter-free pairs.
    if pair == "all" {
        for id in [PairId::Trivial, PairId::Unit] {
            let chained = chain_step(
                id,
                &QMonomial::ratio_q(2, 1, 1),
                &QMonomial::ratio_q(3, 1, 3),
                None,
                None,
                1,
            )?;
            let rep = wp_check(&chained, n_max.min(8), order)?;
            record(&rep);
        }
    }
    emit(text, None)?;
    Ok(if any_fail { 1 } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pass_report(pass: bool) -> RunOutcome {
        RunOutcome::Report(VerificationReport {
            id: "x".into(),
            backend: crate::identities::BackendChoice::Exact,
            order: 40,
            q_point: None,
            pass,
            first_mismatch: None,
            millis: 0,
        })
    }

    #[test]
    fn exit_codes_never_conflate() {
        assert_eq!(exit_code(&[pass_report(true), pass_report(true)]), 0);
        assert_eq!(exit_code(&[pass_report(true), pass_report(false)]), 1);
        let errored = RunOutcome::Failed {
            id: "x".into(),
            backend: "exact",
            order: 40,
            error: Error::Domain("boom".into()),
        };
        assert_eq!(exit_code(&[pass_report(false), errored]), 2);
    }

    #[test]
    fn cpoint_rendering() {
        assert_eq!(format_cpoint(Complex64::new(0.3, 0.0)), "0.3");
        assert_eq!(format_cpoint(Complex64::new(0.2, 0.1)), "0.2+0.1i");
        assert_eq!(format_cpoint(Complex64::new(0.2, -0.1)), "0.2-0.1i");
    }
}
