//! Sampling test for `ρ‖κ‖∞ < 1` and injectivity of `F(s, u) = γ(s) + uν(s)`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ArcLengthCurve, Point};
use crate::math::{ceil, golden_max, sqrt, PI};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub rho: f64,
    /// Sampled and golden-section refined estimate of `‖κ‖∞`.
    pub kappa_sup: f64,
    pub rho_kappa_product: f64,
    pub embedding_ok: bool,
    /// Smallest distance between sampled normal segments `{γ(s) + uν(s) : |u| ≤ ρ}`
    /// whose arc-length separation exceeds `exclusion_window` (periodic images included).
    pub min_tube_clearance: f64,
    /// Distance below which two normal segments are treated as overlapping.
    pub overlap_threshold: f64,
    pub exclusion_window: f64,
    pub samples_used: usize,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.rho_kappa_product < 1.0 && self.embedding_ok
    }
}

fn sup_curvature(curve: &ArcLengthCurve, n: usize) -> f64 {
    let p = curve.period();
    let ds = p / n as f64;
    let values: Vec<f64> = (0..n).map(|i| curve.curvature(i as f64 * ds).abs()).collect();
    let mut sup = values.iter().fold(0.0_f64, |m, &v| m.max(v));
    for i in 0..n {
        let prev = values[(i + n - 1) % n];
        let next = values[(i + 1) % n];
        if values[i] > 0.0 && values[i] >= prev && values[i] >= next {
            let s = i as f64 * ds;
            let (_, v) = golden_max(s - ds, s + ds, 60, |t| curve.curvature(t).abs());
            sup = sup.max(v);
        }
    }
    sup
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let q = [a[0] + t * d[0] - p[0], a[1] + t * d[1] - p[1]];
    sqrt(q[0] * q[0] + q[1] * q[1])
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn segment_distance(a0: Point, a1: Point, b0: Point, b1: Point) -> f64 {
    let d1 = cross(a0, a1, b0);
    let d2 = cross(a0, a1, b1);
    let d3 = cross(b0, b1, a0);
    let d4 = cross(b0, b1, a1);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return 0.0;
    }
    point_segment_distance(a0, b0, b1)
        .min(point_segment_distance(a1, b0, b1))
        .min(point_segment_distance(b0, a0, a1))
        .min(point_segment_distance(b1, a0, a1))
}

/// Evaluates `ρ‖κ‖∞` and tests `F` for self-overlap on one period cell plus
/// its periodic images.
///
/// The strip is sampled by the normal segments at `n_samples` arc-length
/// positions. Pairs closer than `exclusion_window` in arc length are skipped;
/// there `F` is locally injective whenever `ρ‖κ‖∞ < 1`. If another sheet of
/// the strip entered this one, some of its points would lie within half a
/// sample spacing of one of the segments here, so every other pair of
/// segments must be farther apart than that.
///
/// # Panics
/// If `rho` is not positive and finite.
pub fn check_admissibility(curve: &ArcLengthCurve, rho: f64, n_samples: usize) -> AdmissibilityReport {
    assert!(rho > 0.0 && rho.is_finite(), "strip half-width must be positive");
    let n = n_samples.max(128);
    let p = curve.period();
    let ds = p / n as f64;
    let kappa_sup = sup_curvature(curve, n);
    let rho_kappa_product = rho * kappa_sup;

    let window = if kappa_sup > 0.0 { (0.5 * PI / kappa_sup).min(0.5 * p) } else { 0.5 * p };
    let window_steps = (ceil(window / ds) as usize).max(2);
    let overlap_threshold = 0.5 * ds * (1.0 + rho_kappa_product);

    let segments: Vec<(Point, Point)> = (0..n)
        .map(|i| {
            let s = i as f64 * ds;
            let x = curve.position(s);
            let nu = curve.normal(s);
            ([x[0] - rho * nu[0], x[1] - rho * nu[1]], [x[0] + rho * nu[0], x[1] + rho * nu[1]])
        })
        .collect();
    let origin = curve.position(0.0);
    // |x(s) - s/p| bounds how many periods ahead a sheet can come back.
    let wobble = (0..n).fold(0.0_f64, |m, i| {
        let mid = 0.5 * (segments[i].0[0] + segments[i].1[0]);
        m.max((mid - origin[0] - i as f64 / n as f64).abs())
    });
    let reach = 1.0 + 2.0 * wobble + 2.0 * rho + overlap_threshold;
    let max_steps = (ceil(reach * n as f64) as usize).max(window_steps + 1);

    let segment = |i: usize| -> (Point, Point) {
        let (a, b) = segments[i % n];
        let shift = (i / n) as f64;
        ([a[0] + shift, a[1]], [b[0] + shift, b[1]])
    };

    let mut clearance = f64::INFINITY;
    for (i, &(a0, a1)) in segments.iter().enumerate() {
        for j in (i + window_steps + 1)..=(i + max_steps) {
            let (b0, b1) = segment(j);
            clearance = clearance.min(segment_distance(a0, a1, b0, b1));
        }
    }

    AdmissibilityReport {
        rho,
        kappa_sup,
        rho_kappa_product,
        embedding_ok: clearance > overlap_threshold,
        min_tube_clearance: clearance,
        overlap_threshold,
        exclusion_window: window_steps as f64 * ds,
        samples_used: n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_from_angle_profile, TangentAngleSpec};

    #[test]
    fn straight_strip_is_admissible() {
        let r = check_admissibility(&ArcLengthCurve::straight_line(), 0.2, 256);
        assert_eq!(r.kappa_sup, 0.0);
        assert_eq!(r.rho_kappa_product, 0.0);
        assert!(r.embedding_ok && r.passed());
        assert!(r.min_tube_clearance > 0.0);
    }

    #[test]
    fn curve_a_admissibility_at_two_widths() {
        let curve = build_from_angle_profile(&TangentAngleSpec::sine(0.5)).unwrap();
        let narrow = check_admissibility(&curve, 0.15, 1024);
        assert!((narrow.kappa_sup - 2.948_289_852_043_567_6).abs() < 1e-9);
        assert!((narrow.rho_kappa_product - 0.442_243_477_806_535).abs() < 1e-9);
        assert_eq!(narrow.rho_kappa_product, 0.15 * narrow.kappa_sup);
        assert!(narrow.embedding_ok && narrow.passed());

        let wide = check_admissibility(&curve, 0.40, 256);
        assert!((wide.rho_kappa_product - 1.179_315_940_817_427).abs() < 1e-8);
        assert!(!wide.passed());
    }

    #[test]
    fn segment_distance_cases() {
        assert_eq!(segment_distance([0.0, -1.0], [0.0, 1.0], [-1.0, 0.0], [1.0, 0.0]), 0.0);
        let d = segment_distance([0.0, 0.0], [0.0, 1.0], [0.5, 2.0], [0.5, 3.0]);
        assert!((d - sqrt(1.25)).abs() < 1e-15);
    }

    #[test]
    fn admissibility_is_monotone_in_width() {
        let curve = build_from_angle_profile(&TangentAngleSpec::sine(0.5)).unwrap();
        let mut failed = false;
        for k in 1..=12 {
            let passed = check_admissibility(&curve, 0.04 * k as f64, 256).passed();
            assert!(!(failed && passed), "passes again at rho = {}", 0.04 * k as f64);
            failed |= !passed;
        }
        assert!(failed);
    }

    #[test]
    fn overlapping_sheets_are_detected() {
        // Meander with θ up to 2 rad: adjacent arms come within 0.236 of each
        // other while 1/‖κ‖∞ ≈ 0.355, so ρ = 0.2 passes the curvature bound
        // but the strip overlaps itself.
        let spec = TangentAngleSpec { fourier_sin: alloc::vec![2.0], ..TangentAngleSpec::default() };
        let curve = build_from_angle_profile(&spec).unwrap();
        let thin = check_admissibility(&curve, 0.1, 512);
        let fat = check_admissibility(&curve, 0.2, 512);
        assert!(thin.passed(), "{thin:?}");
        assert!(fat.rho_kappa_product < 1.0);
        assert!(!fat.embedding_ok, "{fat:?}");
    }
}
