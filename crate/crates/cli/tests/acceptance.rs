//! End-to-end acceptance criteria; prints one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::fs;
use std::time::Instant;

use waveguide_cli::{run, ExperimentConfig, ExperimentKind};
use waveguide_core::analysis::{
    flat_gap_analytic, flat_ground_energy, scaling_fit, GridPolicy, Study, TestFunction, DEFAULT_SLACK,
};
use waveguide_core::assembly::ProblemKind;
use waveguide_core::curve::{build_from_angle_profile, ArcLengthCurve, TangentAngleSpec};
use waveguide_core::eigen::{dense_oracle, EigenRequest, DENSE_ORACLE_CAP};
use waveguide_core::waveguide::WaveguideGeometry;

const FLAT_REL_TOL: f64 = 1e-3;
const THRESHOLD_REL_TOL: f64 = 1e-2;
const SCALING_MAX_SPREAD: f64 = 1.2;
const SCALING_SLOPE: (f64, f64) = (-2.2, -1.8);
const SCALING_MAX_SECONDS: f64 = 600.0;
const UNITARY_COARSE_TOL: f64 = 5e-3;
const UNITARY_MIN_REDUCTION: f64 = 3.0;
const SANDWICH_SLACK: f64 = DEFAULT_SLACK;
const EXACT_TOL: f64 = 1e-12;
const FORM_RATIO: (f64, f64) = (3.0, 5.0);
const FORM_CONSTANT_TOL: f64 = 1e-10;
const FORM_QUOTIENT_FRACTION: f64 = 0.95;
const PERIODIC_ENERGY_TOL: f64 = 1e-6;
const PERIODIC_CELL_TOL: f64 = 1e-5;
const ORACLE_TOL: f64 = 1e-8;

fn curve_a() -> WaveguideGeometry {
    WaveguideGeometry::new(build_from_angle_profile(&TangentAngleSpec::sine(0.5)).unwrap(), 0.15).unwrap()
}

fn straight(rho: f64) -> WaveguideGeometry {
    WaveguideGeometry::new(ArcLengthCurve::straight_line(), rho).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

type Outcome = Result<(bool, String), String>;

fn flat_spectrum() -> Outcome {
    let g = straight(0.2);
    let r = Study::new(&g).gap_report(ProblemKind::Flat, 4, &GridPolicy::new(32, 32, 2)).map_err(|e| e.to_string())?;
    let (e1, gap) = (flat_ground_energy(0.2), flat_gap_analytic(1.0, 0.2, 4));
    let (d1, dg) = (rel(r.extrapolated_e1, e1), rel(r.extrapolated_gap, gap));
    Ok((
        d1 <= FLAT_REL_TOL && dg <= FLAT_REL_TOL,
        format!(
            "E1 = {:.6} (exact {e1:.6}, rel {d1:.1e}), gap = {:.6} (exact {gap:.6}, rel {dg:.1e}), tol {FLAT_REL_TOL:.0e}",
            r.extrapolated_e1, r.extrapolated_gap
        ),
    ))
}

fn threshold_branch() -> Outcome {
    let g = straight(0.45);
    let r = Study::new(&g).gap_report(ProblemKind::Flat, 1, &GridPolicy::new(32, 32, 2)).map_err(|e| e.to_string())?;
    let exact = 3.0 * PI * PI / (4.0 * 0.45 * 0.45);
    let d = rel(r.extrapolated_gap, exact);
    Ok((
        d <= THRESHOLD_REL_TOL && flat_gap_analytic(1.0, 0.45, 1) == exact,
        format!("gap = {:.6}, transverse branch {exact:.6}, rel {d:.1e}, tol {THRESHOLD_REL_TOL:.0e}", r.extrapolated_gap),
    ))
}

fn scaling() -> Outcome {
    let g = curve_a();
    let start = Instant::now();
    let reports =
        Study::new(&g).gap_vs_length(&[4, 8, 16], &GridPolicy::new(48, 48, 2)).map_err(|e| e.to_string())?;
    let seconds = start.elapsed().as_secs_f64();
    let fit = scaling_fit(&reports).map_err(|e| e.to_string())?;
    let values: Vec<String> = reports.iter().map(|r| format!("{:.4}", r.gap_times_l2)).collect();
    let ok = fit.spread <= SCALING_MAX_SPREAD
        && !fit.monotone_divergence
        && (SCALING_SLOPE.0..=SCALING_SLOPE.1).contains(&fit.slope)
        && seconds < SCALING_MAX_SECONDS;
    Ok((
        ok,
        format!(
            "gap*L^2 = [{}], spread {:.4} (max {SCALING_MAX_SPREAD}), slope {:.4}, divergence {}, {seconds:.0} s",
            values.join(", "),
            fit.spread,
            fit.slope,
            fit.monotone_divergence
        ),
    ))
}

fn unitary() -> Outcome {
    let g = curve_a();
    let r = Study::new(&g).unitary_check(1, &GridPolicy::new(64, 64, 2), 3).map_err(|e| e.to_string())?;
    let coarse = r.levels[0].max_rel_diff;
    let reduction = r.reduction.unwrap_or(0.0);
    Ok((
        coarse <= UNITARY_COARSE_TOL && reduction >= UNITARY_MIN_REDUCTION,
        format!(
            "max rel diff {coarse:.2e} at 64x64 (tol {UNITARY_COARSE_TOL:.0e}), {:.2e} at 128x128, reduction {reduction:.2}",
            r.levels[1].max_rel_diff
        ),
    ))
}

fn sandwich() -> Outcome {
    let g = curve_a();
    let policy = GridPolicy::new(32, 32, 2);
    let study = Study::new(&g);
    let mut parts = Vec::new();
    let mut ok = true;
    for l in [2, 4, 8] {
        let r = study.sandwich_check(l, &policy, SANDWICH_SLACK).map_err(|e| e.to_string())?;
        ok &= r.sandwich_ok;
        parts.push(format!("L{l}: {:.5} <= {:.5} <= {:.5}", r.lower, r.gap_straightened, r.upper));
    }
    let flat = straight(0.15);
    let r = Study::new(&flat).sandwich_check(2, &policy, SANDWICH_SLACK).map_err(|e| e.to_string())?;
    let exact = r.a_minus == 1.0
        && r.a_plus == 1.0
        && rel(r.lower, r.gap_straightened) <= EXACT_TOL
        && rel(r.upper, r.gap_straightened) <= EXACT_TOL;
    ok &= exact;
    parts.push(format!("straight: a- = {}, a+ = {}, exact = {exact}", r.a_minus, r.a_plus));
    Ok((ok, parts.join("; ")))
}

fn form() -> Outcome {
    let g = curve_a();
    let r = Study::new(&g)
        .form_representation_check(2, &GridPolicy::new(32, 32, 2), &TestFunction::DEFAULT_SUITE)
        .map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut parts = Vec::new();
    for e in &r.entries {
        if e.function == TestFunction::Constant {
            let fine = e.levels[1];
            let m = fine.form_value.abs().max(fine.operator_value.abs());
            ok &= m <= FORM_CONSTANT_TOL;
            parts.push(format!("phi=1: {m:.1e}"));
        } else {
            let ratio = e.refinement_ratio.unwrap_or(f64::NAN);
            let q = e.rayleigh_quotient.unwrap_or(f64::NAN);
            ok &= (FORM_RATIO.0..=FORM_RATIO.1).contains(&ratio) && q >= FORM_QUOTIENT_FRACTION * r.gap;
            parts.push(format!("{}: ratio {ratio:.3}, RQ/gap {:.4}", e.name, q / r.gap));
        }
    }
    Ok((ok, parts.join("; ")))
}

fn periodicity() -> Outcome {
    let g = curve_a();
    let study = Study::new(&g);
    let mut ok = true;
    let mut parts = Vec::new();
    for l in [2, 4] {
        let r = study.periodicity_check(l, &GridPolicy::new(32, 32, 1)).map_err(|e| e.to_string())?;
        ok &= r.energy_rel_diff <= PERIODIC_ENERGY_TOL && r.max_cell_deviation <= PERIODIC_CELL_TOL;
        parts.push(format!("L{l}: energy {:.1e}, cell {:.1e}", r.energy_rel_diff, r.max_cell_deviation));
    }
    Ok((ok, parts.join("; ")))
}

fn oracle() -> Outcome {
    let geometries = [curve_a(), straight(0.2)];
    let kinds = [ProblemKind::Straightened, ProblemKind::Comparison, ProblemKind::Flat, ProblemKind::PhysicalReference];
    let mut worst = 0.0_f64;
    let mut count = 0;
    for g in &geometries {
        let study = Study::new(g).with_solver(EigenRequest::with_k(4));
        for (periods, n_s, n_u) in [(1, 16, 8), (1, 32, 32), (2, 32, 16), (3, 48, 24)] {
            for kind in kinds {
                let (problem, it) = study.solve(kind, periods, n_s, n_u, 4).map_err(|e| e.to_string())?;
                if problem.dim() > DENSE_ORACLE_CAP {
                    continue;
                }
                let dense = dense_oracle(&problem).map_err(|e| e.to_string())?;
                for (a, b) in it.values.iter().zip(&dense.values) {
                    worst = worst.max((a - b).abs() / (1.0 + b.abs()));
                }
                count += 1;
            }
        }
    }
    Ok((worst <= ORACLE_TOL, format!("{count} problems, worst |diff|/(1+|lambda|) = {worst:.1e}, tol {ORACLE_TOL:.0e}")))
}

fn determinism() -> Outcome {
    let tmp = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for (kind, name) in [(ExperimentKind::GapScaling, "straight-gap-scaling"), (ExperimentKind::Spectrum, "curve-a-spectrum")] {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.toml"));
        let mut files = Vec::new();
        for pass in 0..2 {
            let mut config = ExperimentConfig::load(&path).map_err(|e| e.to_string())?;
            config.experiment.output_dir = tmp.path().join(format!("{name}-{pass}"));
            run(kind, &config).map_err(|e| e.to_string())?;
            files.push(fs::read(config.experiment.output_dir.join("summary.csv")).map_err(|e| e.to_string())?);
        }
        outputs.push((name, files[0] == files[1], files[0].len()));
    }
    let ok = outputs.iter().all(|o| o.1);
    let parts: Vec<String> = outputs.iter().map(|(n, same, len)| format!("{n}: identical = {same} ({len} bytes)")).collect();
    Ok((ok, parts.join("; ")))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 flat-waveguide analytic spectrum", flat_spectrum),
        ("2 threshold branch", threshold_branch),
        ("3 gap scaling in L", scaling),
        ("4 unitary-equivalence oracle", unitary),
        ("5 comparison sandwich", sandwich),
        ("6 ground-state form representation", form),
        ("7 ground-state periodicity", periodicity),
        ("8 solver oracle equivalence", oracle),
        ("9 determinism", determinism),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let (status, detail) = match check() {
            Ok((true, d)) => ("PASS", d),
            Ok((false, d)) => ("FAIL", d),
            Err(e) => ("FAIL", format!("error: {e}")),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("criterion {name}: {status} [{:.1} s] {detail}", start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
