//! The invariant suite behind the `verify` subcommand.

use std::fmt;

use serde::Serialize;
use waveguide_core::analysis::{flat_gap_analytic, TestFunction, FORM_NOISE_FLOOR, PERIODICITY_CELL_TOL};
use waveguide_core::assembly::ProblemKind;
use waveguide_core::eigen::{dense_oracle, DENSE_ORACLE_CAP};
use waveguide_core::waveguide::EndCondition;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::{num, OutputDir};
use crate::pipeline::{build_geometry, study, RunSummary};

pub const ORACLE_TOL: f64 = 1e-8;
pub const UNITARY_TOL: f64 = 5e-3;
pub const UNITARY_MIN_REDUCTION: f64 = 3.0;
pub const FLAT_GAP_TOL: f64 = 1e-3;
/// Refinement ratios must lie within this distance of 4.
pub const FORM_RATIO_HALF_WIDTH: f64 = 1.0;
/// Differences this small count as converged when judging refinement ratios.
pub const FORM_CONVERGED: f64 = 1e-8;
/// Longest segment used for the comparison check.
pub const SANDWICH_MAX_LENGTH: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "SKIPPED",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub status: CheckStatus,
    /// The quantity compared against `threshold`.
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckRow {
    fn judged(name: impl Into<String>, measured: f64, threshold: f64, detail: String) -> Self {
        Self::decided(name, measured <= threshold, measured, threshold, detail)
    }

    fn decided(name: impl Into<String>, ok: bool, measured: f64, threshold: f64, detail: String) -> Self {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        Self { name: name.into(), status, measured, threshold, detail }
    }

    fn skipped(name: impl Into<String>, threshold: f64, detail: String) -> Self {
        Self { name: name.into(), status: CheckStatus::Skipped, measured: f64::NAN, threshold, detail }
    }
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    kind: &'static str,
    potential_sign_flipped: bool,
    checks: &'a [CheckRow],
    passed: bool,
}

const KINDS: [ProblemKind; 4] =
    [ProblemKind::Straightened, ProblemKind::Comparison, ProblemKind::Flat, ProblemKind::PhysicalReference];

fn kind_name(kind: ProblemKind) -> &'static str {
    match kind {
        ProblemKind::Straightened => "straightened",
        ProblemKind::Comparison => "comparison",
        ProblemKind::Flat => "flat",
        ProblemKind::PhysicalReference => "physical",
    }
}

/// Runs every check; only errors that prevent a check from being evaluated abort the suite.
pub fn checks(config: &ExperimentConfig) -> Result<Vec<CheckRow>, CliError> {
    let geometry = build_geometry(config)?;
    let study = study(config, &geometry);
    let policy = config.grid;
    let slack = config.checks.slack;
    let mut rows = Vec::new();

    // Iterative against dense eigenvalues, and ground-vector positivity, on one period.
    let (n_s, n_u) = policy.dims(1, 0);
    for kind in KINDS {
        let (problem, result) = study.solve(kind, 1, n_s, n_u, 2)?;
        let min = result.vectors[0].iter().cloned().fold(f64::INFINITY, f64::min);
        let max = result.vectors[0].iter().cloned().fold(0.0, f64::max);
        rows.push(CheckRow::decided(
            format!("positivity/{}", kind_name(kind)),
            min > 0.0,
            min / max,
            0.0,
            "smallest over largest ground-vector entry".into(),
        ));
        let name = format!("oracle/{}", kind_name(kind));
        if problem.dim() > DENSE_ORACLE_CAP {
            rows.push(CheckRow::skipped(name, ORACLE_TOL, format!("dimension {} > {DENSE_ORACLE_CAP}", problem.dim())));
            continue;
        }
        let dense = dense_oracle(&problem)?;
        let worst = result
            .values
            .iter()
            .zip(&dense.values)
            .map(|(a, b)| (a - b).abs() / (1.0 + b.abs()))
            .fold(0.0, f64::max);
        rows.push(CheckRow::judged(name, worst, ORACLE_TOL, format!("dimension {}, k = {}", problem.dim(), result.values.len())));
    }

    // Flat strip against the closed form.
    let l0 = config.waveguide.lengths[0];
    if policy.levels >= 2 {
        let flat = study.gap_report(ProblemKind::Flat, l0, &policy)?;
        let exact = flat_gap_analytic(geometry.period(), geometry.rho(), l0);
        rows.push(CheckRow::judged(
            format!("flat-gap/L{l0}"),
            (flat.extrapolated_gap - exact).abs() / exact,
            FLAT_GAP_TOL,
            format!("extrapolated {:.8} vs {:.8}", flat.extrapolated_gap, exact),
        ));

        // Straightened operator against the curvilinear Laplacian.
        let unitary = study.unitary_check(1, &policy, 3)?;
        let fine = unitary.levels.last().expect("at least one level").max_rel_diff;
        let reduction = unitary.reduction.unwrap_or(f64::INFINITY);
        let converging = fine <= 1e-12 || reduction >= UNITARY_MIN_REDUCTION;
        rows.push(CheckRow::decided(
            "unitary-equivalence",
            converging && fine <= UNITARY_TOL,
            fine,
            UNITARY_TOL,
            format!("relative difference {fine:.3e}, reduction under refinement {reduction:.3}"),
        ));

        // Ground-state representation of the quadratic form.
        let form = study.form_representation_check(l0, &policy, &TestFunction::DEFAULT_SUITE)?;
        let constant = form.entries.iter().find(|e| e.function == TestFunction::Constant);
        if let Some(c) = constant {
            let fine = c.levels[1];
            rows.push(CheckRow::judged(
                format!("form/constant/L{l0}"),
                fine.form_value.abs().max(fine.operator_value.abs()),
                FORM_NOISE_FLOOR,
                "both sides vanish for phi = 1".into(),
            ));
        }
        let mut worst_ratio = 0.0_f64;
        let mut details = Vec::new();
        let mut worst_quotient = f64::INFINITY;
        for e in form.entries.iter().filter(|e| e.function != TestFunction::Constant) {
            let converged = e.levels[1].abs_difference <= FORM_CONVERGED;
            let miss = match e.refinement_ratio {
                _ if converged => 0.0,
                Some(r) => (r - 4.0).abs(),
                None => f64::INFINITY,
            };
            worst_ratio = worst_ratio.max(miss);
            details.push(format!("{}: {}", e.name, e.refinement_ratio.map_or("-".into(), |r| format!("{r:.3}"))));
            if let Some(q) = e.rayleigh_quotient {
                worst_quotient = worst_quotient.min(q / form.gap);
            }
        }
        rows.push(CheckRow::judged(format!("form/refinement/L{l0}"), worst_ratio, FORM_RATIO_HALF_WIDTH, details.join(", ")));
        rows.push(CheckRow::judged(
            format!("form/variational/L{l0}"),
            (1.0 - worst_quotient).max(0.0),
            slack,
            format!("min Rayleigh quotient / gap = {worst_quotient:.6}"),
        ));
    } else {
        for name in ["flat-gap", "unitary-equivalence", "form"] {
            rows.push(CheckRow::skipped(name, f64::NAN, "needs at least two grid levels".into()));
        }
    }

    for &l in &config.waveguide.lengths {
        if l <= SANDWICH_MAX_LENGTH {
            let r = study.sandwich_check(l, &policy, slack)?;
            rows.push(CheckRow::judged(
                format!("sandwich/L{l}"),
                r.slack_needed,
                slack,
                format!("{:.8} <= {:.8} <= {:.8}", r.lower, r.gap_straightened, r.upper),
            ));
        }
        if l >= 2 && config.waveguide.end_bc == EndCondition::Periodic {
            let r = study.periodicity_check(l, &policy)?;
            rows.push(CheckRow::decided(
                format!("periodicity/L{l}"),
                r.passed,
                r.max_cell_deviation,
                PERIODICITY_CELL_TOL,
                format!("energy difference {:.3e}, cell deviation {:.3e}", r.energy_rel_diff, r.max_cell_deviation),
            ));
        }
    }
    Ok(rows)
}

pub fn table(rows: &[CheckRow]) -> Vec<String> {
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(5).max(5);
    let mut lines = vec![format!("{:<width$}  {:<7}  {:>11}  {:>11}  detail", "check", "status", "measured", "threshold")];
    for r in rows {
        let show = |x: f64| if x.is_nan() { "-".to_string() } else { format!("{x:.3e}") };
        lines.push(format!(
            "{:<width$}  {:<7}  {:>11}  {:>11}  {}",
            r.name,
            r.status.to_string(),
            show(r.measured),
            show(r.threshold),
            r.detail
        ));
    }
    lines
}

pub fn run(config: &ExperimentConfig, out: &mut OutputDir) -> Result<RunSummary, CliError> {
    let rows = checks(config)?;
    let passed = rows.iter().all(|r| r.status != CheckStatus::Fail);
    out.json(
        "report.json",
        &VerifyReport { kind: "verify", potential_sign_flipped: config.debug.flip_potential_sign, checks: &rows, passed },
    )?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.name.clone(), r.status.to_string(), num(r.measured), num(r.threshold)])
        .collect();
    out.csv("summary.csv", &["check", "status", "measured", "threshold"], &csv_rows)?;
    let lines = table(&rows);
    if !passed {
        for line in &lines {
            eprintln!("{line}");
        }
        let failed: Vec<&str> = rows.iter().filter(|r| r.status == CheckStatus::Fail).map(|r| r.name.as_str()).collect();
        return Err(CliError::VerificationFailed(format!("failed checks: {}", failed.join(", "))));
    }
    Ok(RunSummary { lines })
}
