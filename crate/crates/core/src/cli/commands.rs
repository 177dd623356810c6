use std::path::PathBuf;

use anyhow::Result;
use serde::Serialize;

use super::config::RunConfig;
use super::output::{fmt_f64, json_lines, write_all, Csv};
use crate::hormander::{lorentz_condition, sobolev_condition, ConditionReport, ConditionSpace};
use crate::opnorm::{empirical_opnorm, theorem_bound_result, OpNormEstimate};
use crate::oracles::suites::{run_suite, Suite, SuiteOptions};
use crate::oracles::CheckResult;
use crate::symbols::{mikhlin_check, MikhlinReport, MikhlinSampling, SymbolSpec};

/// What a command produced and the exit status it maps to.
#[derive(Debug)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
    pub code: u8,
}

fn symbol(config: &RunConfig) -> Result<&SymbolSpec> {
    config
        .symbol
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("no symbol in config"))
}

#[derive(Serialize)]
struct AnalyzeSummary<'a> {
    config: &'a RunConfig,
    reports: &'a [ConditionReport],
    mikhlin: Option<&'a MikhlinReport>,
    divergent: bool,
}

pub fn analyze_symbol(config: &RunConfig) -> Result<Outcome> {
    let spec = symbol(config)?;
    let fam = config.family()?;
    let a = &config.analyze;
    let mut reports = Vec::with_capacity(a.conditions.len());
    for cond in &a.conditions {
        let report = match *cond {
            ConditionSpace::Sobolev { r } => sobolev_condition(spec, a.s, r, &fam, &a.piece)?,
            ConditionSpace::Lorentz => lorentz_condition(spec, a.s, &fam, &a.piece)?,
        };
        reports.push(report);
    }
    let mikhlin = match &a.mikhlin {
        Some(m) => {
            let alpha_max = m.alpha_max.unwrap_or(config.dim as u32 / 2 + 1);
            let sampling = MikhlinSampling::Random {
                count: m.samples,
                seed: config.seed,
                r_min: m.r_min,
                r_max: m.r_max,
            };
            Some(mikhlin_check(spec, alpha_max, &sampling)?)
        }
        None => None,
    };

    let mut csv = Csv::new(config, &["space", "s", "j", "resolution", "K_j", "divergent"])?;
    let mut summary = Vec::new();
    for report in &reports {
        let space = report.space.label();
        for e in &report.per_j {
            for row in &e.refinement {
                csv.row(&[
                    space.clone(),
                    fmt_f64(report.s),
                    e.j.to_string(),
                    row.resolution.to_string(),
                    fmt_f64(row.value),
                    e.divergent.to_string(),
                ]);
            }
        }
        summary.push(format!(
            "{space}: K = {:.6e} over j in [{}, {}]{}",
            report.k,
            report.j_min,
            report.j_max,
            if report.divergent { " (divergent)" } else { "" }
        ));
    }
    let divergent = reports.iter().any(|r| r.divergent || !r.k.is_finite());
    let json = serde_json::to_string_pretty(&AnalyzeSummary {
        config,
        reports: &reports,
        mikhlin: mikhlin.as_ref(),
        divergent,
    })?;
    let files = write_all(
        &config.output_dir,
        &[("per_j.csv", csv.into_string()), ("summary.json", json)],
    )?;
    Ok(Outcome {
        files,
        summary,
        code: if divergent { 2 } else { 0 },
    })
}

#[derive(Serialize)]
struct SuiteCheck<'a> {
    suite: Suite,
    #[serde(flatten)]
    result: &'a CheckResult,
}

#[derive(Serialize)]
struct ConfigHeader<'a> {
    config: &'a RunConfig,
}

pub fn check_lemmas(config: &RunConfig) -> Result<Outcome> {
    let opts = SuiteOptions {
        cases: config.lemmas.cases,
        seed: config.seed,
        resolution: config.lemmas.resolution,
        box_side: config.lemmas.box_side,
    };
    let mut runs = Vec::with_capacity(config.lemmas.suites.len());
    for &suite in &config.lemmas.suites {
        runs.push((suite, run_suite(suite, &opts)?));
    }

    let mut csv = Csv::new(
        config,
        &[
            "suite",
            "checks",
            "passed",
            "failed",
            "explicit_failed",
            "c_emp",
            "max_ratio",
        ],
    )?;
    let mut summary = Vec::new();
    let mut explicit_failures = 0;
    for (suite, results) in &runs {
        let passed = results.iter().filter(|r| r.passed).count();
        let explicit_failed = results.iter().filter(|r| !r.passed && !r.is_empirical()).count();
        let c_emp = results
            .iter()
            .filter_map(|r| r.context.get("c_emp").copied())
            .fold(f64::NAN, f64::max);
        let max_ratio = results.iter().map(CheckResult::ratio).fold(f64::NAN, f64::max);
        explicit_failures += explicit_failed;
        csv.row(&[
            suite.name().to_string(),
            results.len().to_string(),
            passed.to_string(),
            (results.len() - passed).to_string(),
            explicit_failed.to_string(),
            fmt_f64(c_emp),
            fmt_f64(max_ratio),
        ]);
        summary.push(format!(
            "{suite}: {passed}/{} passed, max ratio {max_ratio:.6}{}",
            results.len(),
            if c_emp.is_nan() {
                String::new()
            } else {
                format!(", C_emp {c_emp:.6}")
            }
        ));
    }
    let lines = json_lines(
        &ConfigHeader { config },
        runs.iter()
            .flat_map(|(suite, results)| results.iter().map(move |result| SuiteCheck { suite: *suite, result })),
    )?;
    let files = write_all(
        &config.output_dir,
        &[("checks.jsonl", lines), ("summary.csv", csv.into_string())],
    )?;
    Ok(Outcome {
        files,
        summary,
        code: if explicit_failures == 0 { 0 } else { 1 },
    })
}

#[derive(Serialize)]
struct OpNormRow<'a> {
    estimate: &'a OpNormEstimate,
    check: &'a CheckResult,
}

#[derive(Serialize)]
struct OpNormSummary<'a> {
    config: &'a RunConfig,
    condition: &'a ConditionReport,
    rows: Vec<OpNormRow<'a>>,
}

pub fn estimate_opnorm(config: &RunConfig) -> Result<Outcome> {
    let spec = symbol(config)?;
    let grid = config.grid()?;
    let o = &config.opnorm;
    let condition = lorentz_condition(spec, o.s, &config.family()?, &o.piece)?;
    let mut rows = Vec::with_capacity(o.p.len());
    for &p in &o.p {
        let estimate = empirical_opnorm(spec, p, o.trials, config.seed, grid)?;
        let mut check = [theorem_bound_result(&estimate, &condition)];
        crate::oracles::calibrate(&mut check);
        let [check] = check;
        rows.push((estimate, check));
    }

    let mut csv = Csv::new(
        config,
        &["p", "s", "n", "K", "lower_bound", "C_emp", "trials", "seed", "N", "L"],
    )?;
    let mut summary = Vec::new();
    for (est, check) in &rows {
        let c_emp = check.context.get("c_emp").copied().unwrap_or(f64::NAN);
        csv.row(&[
            fmt_f64(est.p),
            fmt_f64(o.s),
            est.dim.to_string(),
            fmt_f64(condition.k),
            fmt_f64(est.lower_bound),
            fmt_f64(c_emp),
            est.trials.to_string(),
            est.seed.to_string(),
            est.samples_per_dim.to_string(),
            fmt_f64(est.box_side),
        ]);
        summary.push(format!(
            "p = {}: lower bound {:.6} ({}), K = {:.6}, C_emp = {c_emp:.6}",
            est.p, est.lower_bound, est.witness, condition.k
        ));
    }
    let all_pass = rows.iter().all(|(_, c)| c.passed);
    let json = serde_json::to_string_pretty(&OpNormSummary {
        config,
        condition: &condition,
        rows: rows
            .iter()
            .map(|(estimate, check)| OpNormRow { estimate, check })
            .collect(),
    })?;
    let files = write_all(
        &config.output_dir,
        &[("opnorm.csv", csv.into_string()), ("opnorm.json", json)],
    )?;
    Ok(Outcome {
        files,
        summary,
        code: if all_pass { 0 } else { 1 },
    })
}
