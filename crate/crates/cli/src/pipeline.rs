//! One function per experiment kind.

use std::path::Path;

use serde::Serialize;
use waveguide_core::analysis::{
    flat_gap_analytic, scaling_fit, ComparisonReport, GapReport, ScalingFit, Study,
};
use waveguide_core::assembly::ProblemKind;
use waveguide_core::curve::{
    build_from_angle_profile, check_admissibility, reparameterize_by_arclength, AdmissibilityReport, ArcLengthCurve,
    Point,
};
use waveguide_core::waveguide::{WaveguideGeometry, ADMISSIBILITY_SAMPLES};

use crate::config::{CurveConfig, ExperimentConfig, ExperimentKind};
use crate::error::CliError;
use crate::output::{gap_plot_script, num, OutputDir};
use crate::verify;

/// Samples written to `fields/curve.csv`.
const CURVE_EXPORT_SAMPLES: usize = 512;

pub const SUMMARY_HEADER: [&str; 5] = ["L", "E1", "E2", "gap", "gap_L2"];

/// Human-readable lines for the terminal, plus where the files went.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub lines: Vec<String>,
}

/// Reads `x,y` rows; blank lines, `#` comments and a non-numeric header row are skipped.
pub fn read_samples(path: &Path) -> Result<Vec<Point>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::io(path, e.into()))?;
    let mut points = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::io(path, e.into()))?;
        let fields: Vec<&str> = record.iter().filter(|f| !f.is_empty()).collect();
        if fields.is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(v) if v.len() == 2 => points.push([v[0], v[1]]),
            Err(_) if line == 0 => continue,
            _ => {
                return Err(CliError::Validation(format!(
                    "{}: row {} must hold two numbers x,y",
                    path.display(),
                    line + 1
                )))
            }
        }
    }
    Ok(points)
}

pub fn build_curve(config: &ExperimentConfig) -> Result<ArcLengthCurve, CliError> {
    match &config.curve {
        CurveConfig::Angle { .. } => Ok(build_from_angle_profile(&config.curve.angle_spec().expect("angle curve"))?),
        CurveConfig::Samples { .. } => {
            let path = config.samples_path().expect("sample curve");
            Ok(reparameterize_by_arclength(&read_samples(&path)?)?)
        }
        CurveConfig::Straight => Ok(ArcLengthCurve::straight_line()),
    }
}

pub fn build_geometry(config: &ExperimentConfig) -> Result<WaveguideGeometry, CliError> {
    Ok(WaveguideGeometry::new(build_curve(config)?, config.waveguide.rho)?)
}

pub fn study<'a>(config: &ExperimentConfig, geometry: &'a WaveguideGeometry) -> Study<'a> {
    Study::new(geometry)
        .with_solver(config.solver)
        .with_potential(config.potential_mode())
        .with_end_condition(config.waveguide.end_bc)
}

/// Validates `config`, runs the experiment of `kind` and writes its files.
pub fn run(kind: ExperimentKind, config: &ExperimentConfig) -> Result<RunSummary, CliError> {
    config.validate()?;
    let mut out = OutputDir::create(&config.experiment.output_dir)?;
    let mut summary = match kind {
        ExperimentKind::CheckCurve => check_curve(config, &mut out),
        ExperimentKind::Spectrum => spectrum(config, &mut out),
        ExperimentKind::GapScaling => gap_scaling(config, &mut out),
        ExperimentKind::Compare => compare(config, &mut out),
        ExperimentKind::Verify => verify::run(config, &mut out),
    }?;
    summary.lines.push(format!("wrote {} files to {}", out.written().len(), out.root().display()));
    Ok(summary)
}

#[derive(Serialize)]
struct CurveReport {
    kind: &'static str,
    period: f64,
    reflection_symmetric: bool,
    admissibility: AdmissibilityReport,
    passed: bool,
}

fn check_curve(config: &ExperimentConfig, out: &mut OutputDir) -> Result<RunSummary, CliError> {
    let curve = build_curve(config)?;
    let report = check_admissibility(&curve, config.waveguide.rho, ADMISSIBILITY_SAMPLES);
    let passed = report.passed();
    let a = &report;
    out.json(
        "report.json",
        &CurveReport {
            kind: "check-curve",
            period: curve.period(),
            reflection_symmetric: curve.is_reflection_symmetric(512, 1e-9),
            admissibility: report.clone(),
            passed,
        },
    )?;
    out.csv(
        "summary.csv",
        &["rho", "period", "kappa_sup", "rho_kappa", "min_tube_clearance", "embedding_ok", "passed"],
        &[vec![
            num(a.rho),
            num(curve.period()),
            num(a.kappa_sup),
            num(a.rho_kappa_product),
            num(a.min_tube_clearance),
            a.embedding_ok.to_string(),
            passed.to_string(),
        ]],
    )?;
    if config.export.fields {
        out.curve(&curve, CURVE_EXPORT_SAMPLES)?;
    }
    let line = format!(
        "period {:.10}, sup|kappa| {:.10}, rho*sup|kappa| {:.6}, embedding {}",
        curve.period(),
        a.kappa_sup,
        a.rho_kappa_product,
        if a.embedding_ok { "ok" } else { "overlapping" }
    );
    if !passed {
        return Err(CliError::Validation(format!(
            "strip is not admissible ({line}); rho * sup|kappa| must be below 1 and the tube must not overlap itself"
        )));
    }
    Ok(RunSummary { lines: vec![line] })
}

#[derive(Serialize)]
struct SpectrumRun {
    length: u32,
    n_s: usize,
    n_u: usize,
    values: Vec<f64>,
    residuals: Vec<f64>,
    iterations: usize,
    converged: bool,
}

#[derive(Serialize)]
struct SpectrumReport {
    kind: &'static str,
    problem: ProblemKind,
    period: f64,
    rho: f64,
    runs: Vec<SpectrumRun>,
}

fn spectrum(config: &ExperimentConfig, out: &mut OutputDir) -> Result<RunSummary, CliError> {
    let geometry = build_geometry(config)?;
    let study = study(config, &geometry);
    let problem_kind = config.experiment.problem;
    let mut runs = Vec::new();
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    if config.export.fields {
        out.curve(geometry.curve(), CURVE_EXPORT_SAMPLES)?;
    }
    for &l in &config.waveguide.lengths {
        let (n_s, n_u) = config.grid.dims(l, config.grid.finest());
        let segment = study.segment(l)?;
        let fields = study.fields(&segment, n_s, n_u)?;
        let problem = study.assemble(problem_kind, &segment, &fields)?;
        let result = study.eigenpairs(&problem, config.solver.k)?;
        if config.export.fields {
            out.fields(&format!("fields_L{l}"), &fields)?;
            for (k, v) in result.vectors.iter().enumerate() {
                out.eigenvector(&format!("eigenvector_L{l}_{}", k + 1), &problem, v)?;
            }
        }
        if config.export.matrices {
            out.matrices(&format!("L{l}"), &problem)?;
        }
        let (e1, e2) = (result.values[0], result.values[1]);
        let lf = l as f64;
        rows.push(vec![l.to_string(), num(e1), num(e2), num(e2 - e1), num((e2 - e1) * lf * lf)]);
        lines.push(format!("L = {l}: {n_s}x{n_u} grid, E1 = {e1:.10}, E2 = {e2:.10}, {} iterations", result.iterations));
        runs.push(SpectrumRun {
            length: l,
            n_s,
            n_u,
            values: result.values,
            residuals: result.residuals,
            iterations: result.iterations,
            converged: result.converged,
        });
    }
    out.json(
        "report.json",
        &SpectrumReport { kind: "spectrum", problem: problem_kind, period: geometry.period(), rho: geometry.rho(), runs },
    )?;
    out.csv("summary.csv", &SUMMARY_HEADER, &rows)?;
    Ok(RunSummary { lines })
}

#[derive(Serialize)]
struct ScalingReport {
    kind: &'static str,
    period: f64,
    rho: f64,
    reports: Vec<GapReport>,
    /// Gap of the flat strip with the same `p`, `ρ` and `L`.
    flat_reference_gaps: Vec<f64>,
    fit: Option<ScalingFit>,
}

fn gap_scaling(config: &ExperimentConfig, out: &mut OutputDir) -> Result<RunSummary, CliError> {
    let geometry = build_geometry(config)?;
    let study = study(config, &geometry);
    let lengths = &config.waveguide.lengths;
    let reports = study.gap_vs_length(lengths, &config.grid)?;
    let fit = scaling_fit(&reports).ok();
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.length.to_string(),
                num(r.extrapolated_e1),
                num(r.extrapolated_e2),
                num(r.extrapolated_gap),
                num(r.gap_times_l2),
            ]
        })
        .collect();
    out.csv("summary.csv", &SUMMARY_HEADER, &rows)?;
    let c_reference = fit
        .as_ref()
        .map_or_else(|| reports.iter().map(|r| r.gap_times_l2).sum::<f64>() / reports.len() as f64, |f| f.c_estimate);
    out.text("plot.gp", &gap_plot_script(c_reference))?;
    let mut lines: Vec<String> = reports
        .iter()
        .map(|r| format!("L = {}: gap = {:.10}, gap*L^2 = {:.6}", r.length, r.extrapolated_gap, r.gap_times_l2))
        .collect();
    if let Some(f) = &fit {
        lines.push(format!("C = {:.6}, spread = {:.4}, slope = {:.4}", f.c_estimate, f.spread, f.slope));
    }
    out.json(
        "report.json",
        &ScalingReport {
            kind: "gap-scaling",
            period: geometry.period(),
            rho: geometry.rho(),
            flat_reference_gaps: lengths.iter().map(|&l| flat_gap_analytic(geometry.period(), geometry.rho(), l)).collect(),
            reports,
            fit,
        },
    )?;
    Ok(RunSummary { lines })
}

#[derive(Serialize)]
struct CompareReport {
    kind: &'static str,
    slack: f64,
    reports: Vec<ComparisonReport>,
    all_ok: bool,
}

fn compare(config: &ExperimentConfig, out: &mut OutputDir) -> Result<RunSummary, CliError> {
    let geometry = build_geometry(config)?;
    let study = study(config, &geometry);
    let slack = config.checks.slack;
    let reports = config
        .waveguide
        .lengths
        .iter()
        .map(|&l| study.sandwich_check(l, &config.grid, slack))
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.length.to_string(),
                num(r.a_minus),
                num(r.a_plus),
                num(r.gap_straightened),
                num(r.gap_comparison),
                num(r.lower),
                num(r.upper),
                num(r.slack_needed),
                r.sandwich_ok.to_string(),
            ]
        })
        .collect();
    out.csv(
        "summary.csv",
        &["L", "a_minus", "a_plus", "gap", "gap_comparison", "lower", "upper", "slack_needed", "sandwich_ok"],
        &rows,
    )?;
    let lines: Vec<String> = reports
        .iter()
        .map(|r| {
            format!(
                "L = {}: {:.8} <= gap {:.8} <= {:.8} (a- = {:.6}, a+ = {:.6}) {}",
                r.length,
                r.lower,
                r.gap_straightened,
                r.upper,
                r.a_minus,
                r.a_plus,
                if r.sandwich_ok { "ok" } else { "VIOLATED" }
            )
        })
        .collect();
    let all_ok = reports.iter().all(|r| r.sandwich_ok);
    out.json("report.json", &CompareReport { kind: "compare", slack, reports, all_ok })?;
    if !all_ok {
        let worst = lines.iter().filter(|l| l.ends_with("VIOLATED")).cloned().collect::<Vec<_>>().join("; ");
        return Err(CliError::VerificationFailed(format!("comparison bounds violated beyond slack {slack}: {worst}")));
    }
    Ok(RunSummary { lines })
}
