use std::f64::consts::PI;

use waveguide_core::analysis::{GridPolicy, Study};
use waveguide_core::assembly::{assemble_flat, ProblemKind, SparseSymmetricProblem};
use waveguide_core::curve::{build_from_angle_profile, reparameterize_by_arclength, TangentAngleSpec};
use waveguide_core::eigen::{dense_oracle, smallest_eigenpairs, EigenRequest};
use waveguide_core::sparse::CsrMatrix;
use waveguide_core::waveguide::{sample_fields, EndCondition, Grid, SegmentSpec, WaveguideGeometry};

fn curve_a() -> WaveguideGeometry {
    WaveguideGeometry::new(build_from_angle_profile(&TangentAngleSpec::sine(0.5)).unwrap(), 0.15).unwrap()
}

#[test]
fn flat_strip_lowest_pair_on_a_fine_grid() {
    let grid = Grid::new(256, 64, 4.0, 0.2);
    let p = assemble_flat(&grid, &SegmentSpec::periodic(1)).unwrap();
    let r = smallest_eigenpairs(&p, &EigenRequest::with_k(2)).unwrap();
    let e1 = PI * PI / (4.0 * 0.04);
    for (v, e) in r.values.iter().zip([e1, e1 + PI * PI / 4.0]) {
        assert!((v - e).abs() < 1e-3 * e, "{v} vs {e}");
    }
}

#[test]
fn dense_oracle_reproduces_the_five_point_spectrum() {
    let (n_s, n_u, length, rho) = (8, 8, 2.0, 0.5);
    let p = assemble_flat(&Grid::new(n_s, n_u, length, rho), &SegmentSpec::periodic(1)).unwrap();
    let (ds, du) = (length / n_s as f64, 2.0 * rho / n_u as f64);
    let mut exact: Vec<f64> = (0..n_s)
        .flat_map(|m| (1..n_u).map(move |k| (m, k)))
        .map(|(m, k)| {
            let a = (PI * m as f64 / n_s as f64).sin();
            let b = (PI * k as f64 / (2.0 * n_u as f64)).sin();
            4.0 * a * a / (ds * ds) + 4.0 * b * b / (du * du)
        })
        .collect();
    exact.sort_by(f64::total_cmp);
    let r = dense_oracle(&p).unwrap();
    for (v, e) in r.values.iter().zip(&exact) {
        assert!((v - e).abs() < 1e-11 * e);
    }
}

#[test]
fn dense_oracle_on_the_identity() {
    let grid = Grid::new(12, 2, 1.0, 0.5);
    let p = SparseSymmetricProblem {
        kind: ProblemKind::Flat,
        stiffness: CsrMatrix::identity(12),
        mass: None,
        grid,
        end_bc: EndCondition::Periodic,
    };
    assert!(dense_oracle(&p).unwrap().values.iter().all(|&v| (v - 1.0).abs() < 1e-14));
}

#[test]
fn sampled_curve_reproduces_the_angle_profile_spectrum() {
    let exact = curve_a();
    let p = exact.period();
    let points: Vec<[f64; 2]> = (0..256).map(|i| exact.curve().position(i as f64 * p / 256.0)).collect();
    let sampled = WaveguideGeometry::new(reparameterize_by_arclength(&points).unwrap(), 0.15).unwrap();
    assert!((sampled.period() - p).abs() < 1e-9);
    let a = Study::new(&exact).solve(ProblemKind::Straightened, 1, 32, 32, 2).unwrap().1;
    let b = Study::new(&sampled).solve(ProblemKind::Straightened, 1, 32, 32, 2).unwrap().1;
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x - y).abs() < 1e-6 * x, "{x} vs {y}");
    }
}

#[test]
fn potential_shift_bounds_the_ground_energy() {
    let g = curve_a();
    let seg = SegmentSpec::periodic(2);
    let grid = Grid::for_segment(&g, &seg, 64, 24);
    let fields = sample_fields(&g, &seg, &grid).unwrap();
    let v_min = fields.nodes.potential.iter().cloned().fold(f64::INFINITY, f64::min);
    let study = Study::new(&g);
    let straight = study.assemble(ProblemKind::Straightened, &seg, &fields).unwrap();
    let comparison = study.assemble(ProblemKind::Comparison, &seg, &fields).unwrap();
    let e = study.eigenpairs(&straight, 2).unwrap().values[0];
    let ec = study.eigenpairs(&comparison, 2).unwrap().values[0];
    assert!(e >= ec + v_min - 1e-9, "{e} < {ec} + {v_min}");
}

#[test]
fn neumann_segment_of_a_symmetric_curve() {
    let g = curve_a();
    let study = Study::new(&g).with_end_condition(EndCondition::Neumann);
    let r = study.gap_report(ProblemKind::Straightened, 2, &GridPolicy::new(16, 16, 2)).unwrap();
    let periodic = Study::new(&g).gap_report(ProblemKind::Straightened, 2, &GridPolicy::new(16, 16, 2)).unwrap();
    assert!((r.extrapolated_e1 - periodic.extrapolated_e1).abs() < 1e-3 * periodic.extrapolated_e1);
    assert!(r.extrapolated_gap > 0.0 && r.extrapolated_gap < periodic.extrapolated_gap);
}
