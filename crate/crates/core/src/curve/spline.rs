//! Arc-length reparameterization of sampled periodic curves through a
//! periodic quintic spline (C⁴, so κ'' exists).

use alloc::vec;
use alloc::vec::Vec;

use super::{length, reduce, ArcLengthCurve, Backend, CurvatureJet, CurveError, Point};
use crate::math::{adaptive_gauss, floor, gauss8, sqrt};

/// Minimum samples per period accepted by [`reparameterize_by_arclength`].
pub const MIN_SAMPLES: usize = 64;

/// Periodic cardinal quintic spline on `N` uniform knots of `[0, 1)`.
#[derive(Debug, Clone)]
pub(super) struct PeriodicQuintic {
    coeffs: Vec<f64>,
}

/// Derivative `d` of the centered quintic B-spline at `x ≥ 0`.
fn bspline_right(x: f64, d: usize) -> f64 {
    // B(x) = [(3-x)₊⁵ - 6(2-x)₊⁵ + 15(1-x)₊⁵] / 120 for x ≥ 0
    const FALLING: [f64; 5] = [1.0, 5.0, 20.0, 60.0, 120.0];
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    let e = 5 - d as i32;
    let mut acc = 0.0;
    for (a, w) in [(3.0, 1.0), (2.0, -6.0), (1.0, 15.0)] {
        let t: f64 = a - x;
        if t > 0.0 {
            acc += w * crate::math::powi(t, e);
        }
    }
    sign * FALLING[d] * acc / 120.0
}

fn bspline(x: f64, d: usize) -> f64 {
    if x >= 0.0 {
        bspline_right(x, d)
    } else if d % 2 == 0 {
        bspline_right(-x, d)
    } else {
        -bspline_right(-x, d)
    }
}

impl PeriodicQuintic {
    /// Interpolates `values[j]` at `t = j/N`.
    pub(super) fn interpolate(values: &[f64]) -> Self {
        let n = values.len();
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
        // (c_{j-2} + 26 c_{j-1} + 66 c_j + 26 c_{j+1} + c_{j+2}) / 120 = f_j,
        // strictly diagonally dominant, so Jacobi sweeps converge (rate 54/66).
        let mut c: Vec<f64> = values.to_vec();
        let mut next = vec![0.0; n];
        for _ in 0..400 {
            let mut change = 0.0_f64;
            for j in 0..n {
                let at = |o: isize| c[(j as isize + o).rem_euclid(n as isize) as usize];
                let v = (120.0 * values[j] - (at(-2) + 26.0 * at(-1) + 26.0 * at(1) + at(2))) / 66.0;
                change = change.max((v - c[j]).abs());
                next[j] = v;
            }
            core::mem::swap(&mut c, &mut next);
            if change <= 1e-17 * scale {
                break;
            }
        }
        Self { coeffs: c }
    }

    /// Derivatives of orders `0..=4` at `t` (period 1).
    pub(super) fn eval(&self, t: f64) -> [f64; 5] {
        let n = self.coeffs.len();
        let x = t * n as f64;
        let cell = floor(x);
        let mut out = [0.0; 5];
        for j in (cell as i64 - 2)..=(cell as i64 + 3) {
            let c = self.coeffs[j.rem_euclid(n as i64) as usize];
            let r = x - j as f64;
            let mut scale = 1.0;
            for (d, o) in out.iter_mut().enumerate() {
                *o += c * bspline(r, d) * scale;
                scale *= n as f64;
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
pub(super) struct SplineCurve {
    /// `x(t) - t`
    x: PeriodicQuintic,
    y: PeriodicQuintic,
    origin: Point,
    /// Arc length at each knot `t_j = j/N`, with `knot_sigma[N] = p`.
    knot_sigma: Vec<f64>,
    period: f64,
}

impl SplineCurve {
    fn knots(&self) -> usize {
        self.knot_sigma.len() - 1
    }

    /// Parametric derivatives `P^{(d)}(t)`, `d = 0..=4`.
    fn jet(&self, t: f64) -> ([f64; 5], [f64; 5]) {
        let mut x = self.x.eval(t);
        let y = self.y.eval(t);
        x[0] += t;
        x[1] += 1.0;
        (x, y)
    }

    fn speed(&self, t: f64) -> f64 {
        let (x, y) = self.jet(t);
        sqrt(x[1] * x[1] + y[1] * y[1])
    }

    /// Inverts `σ(t) = r` for `r ∈ [0, p)`.
    fn parameter_at(&self, r: f64) -> f64 {
        let n = self.knots();
        let h = 1.0 / n as f64;
        let i = match self.knot_sigma.binary_search_by(|v| v.partial_cmp(&r).unwrap()) {
            Ok(i) => return (i as f64 * h).min(1.0),
            Err(i) => i.saturating_sub(1).min(n - 1),
        };
        let (lo_t, hi_t) = (i as f64 * h, (i + 1) as f64 * h);
        let (s0, s1) = (self.knot_sigma[i], self.knot_sigma[i + 1]);
        let mut t = lo_t + (r - s0) / (s1 - s0) * h;
        let (mut lo, mut hi) = (lo_t, hi_t);
        for _ in 0..50 {
            let f = s0 + gauss8(lo_t, t, |q| self.speed(q)) - r;
            if f.abs() <= 1e-15 * self.period {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let newton = t - f / self.speed(t);
            t = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        }
        t
    }

    fn locate(&self, s: f64) -> (f64, f64) {
        let (k, r) = reduce(s, self.period);
        (k, self.parameter_at(r))
    }

    pub(super) fn position(&self, s: f64) -> Point {
        let (k, t) = self.locate(s);
        let (x, y) = self.jet(t);
        [self.origin[0] + x[0] + k, self.origin[1] + y[0]]
    }

    pub(super) fn tangent(&self, s: f64) -> Point {
        let (_, t) = self.locate(s);
        let (x, y) = self.jet(t);
        let v = sqrt(x[1] * x[1] + y[1] * y[1]);
        [x[1] / v, y[1] / v]
    }

    pub(super) fn curvature_jet(&self, s: f64) -> CurvatureJet {
        let (_, t) = self.locate(s);
        let (x, y) = self.jet(t);
        // κ = c w^{-3/2}, c = x'y'' - y'x'', w = |P'|²
        let c = x[1] * y[2] - y[1] * x[2];
        let c_t = x[1] * y[3] - y[1] * x[3];
        let c_tt = x[2] * y[3] + x[1] * y[4] - y[2] * x[3] - y[1] * x[4];
        let w = x[1] * x[1] + y[1] * y[1];
        let w_t = 2.0 * (x[1] * x[2] + y[1] * y[2]);
        let w_tt = 2.0 * (x[2] * x[2] + x[1] * x[3] + y[2] * y[2] + y[1] * y[3]);
        let v = sqrt(w);
        let w32 = w * v;
        let w52 = w32 * w;
        let w72 = w52 * w;
        let kappa = c / w32;
        let k_t = c_t / w32 - 1.5 * c * w_t / w52;
        let k_tt = c_tt / w32 - 3.0 * c_t * w_t / w52 - 1.5 * c * (w_tt / w52 - 2.5 * w_t * w_t / w72);
        let v_t = w_t / (2.0 * v);
        CurvatureJet { kappa, d1: k_t / v, d2: (k_tt * v - k_t * v_t) / (w * v) }
    }
}

/// Reparameterizes a densely sampled periodic curve by arc length.
///
/// `samples` holds one period of points `P_0, ..., P_{N-1}` of a smooth curve
/// with `P_{j+N} = P_j + (1, 0)`; the sample index is taken as a uniform
/// parameter. The returned curve starts at `P_0`.
pub fn reparameterize_by_arclength(samples: &[Point]) -> Result<ArcLengthCurve, CurveError> {
    let n = samples.len();
    if n < MIN_SAMPLES {
        return Err(CurveError::InsufficientSmoothness { samples: n, required: MIN_SAMPLES });
    }
    for j in 0..n {
        let a = samples[j];
        let b = if j + 1 == n { [samples[0][0] + 1.0, samples[0][1]] } else { samples[j + 1] };
        if length([b[0] - a[0], b[1] - a[1]]) <= 1e-14 {
            return Err(CurveError::NonInjectiveInput { index: j, next: (j + 1) % n });
        }
    }
    let origin = samples[0];
    let xs: Vec<f64> = samples.iter().enumerate().map(|(j, p)| p[0] - origin[0] - j as f64 / n as f64).collect();
    let ys: Vec<f64> = samples.iter().map(|p| p[1] - origin[1]).collect();
    let mut curve = SplineCurve {
        x: PeriodicQuintic::interpolate(&xs),
        y: PeriodicQuintic::interpolate(&ys),
        origin,
        knot_sigma: Vec::with_capacity(n + 1),
        period: 0.0,
    };

    let h = 1.0 / n as f64;
    let mut sigma = 0.0;
    curve.knot_sigma.push(0.0);
    for j in 0..n {
        let (a, b) = (j as f64 * h, (j + 1) as f64 * h);
        let mut min_speed = f64::INFINITY;
        let mut speed = |t: f64| {
            let v = curve.speed(t);
            min_speed = min_speed.min(v);
            v
        };
        sigma += adaptive_gauss(a, b, 1e-15 * h, &mut speed);
        if min_speed <= 1e-10 {
            return Err(CurveError::NonInjectiveInput { index: j, next: (j + 1) % n });
        }
        curve.knot_sigma.push(sigma);
    }
    curve.period = sigma;
    Ok(ArcLengthCurve { period: sigma, backend: Backend::Spline(curve) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{cos, sin, TAU};

    fn sine_samples(n: usize, amp: f64) -> Vec<Point> {
        (0..n)
            .map(|j| {
                let t = j as f64 / n as f64;
                [t, amp * sin(TAU * t)]
            })
            .collect()
    }

    #[test]
    fn bspline_partition_of_unity() {
        for &x in &[0.0, 0.3, 0.77] {
            let sum: f64 = (-3..=3).map(|j| bspline(x - j as f64, 0)).sum();
            assert!((sum - 1.0).abs() < 1e-14);
            let dsum: f64 = (-3..=3).map(|j| bspline(x - j as f64, 1)).sum();
            assert!(dsum.abs() < 1e-13);
        }
        assert!((bspline(0.0, 0) - 66.0 / 120.0).abs() < 1e-15);
        assert!((bspline(1.0, 0) - 26.0 / 120.0).abs() < 1e-15);
        assert!((bspline(2.0, 0) - 1.0 / 120.0).abs() < 1e-15);
    }

    #[test]
    fn spline_reproduces_a_trig_polynomial_to_high_order() {
        let n = 128;
        let f: Vec<f64> = (0..n).map(|j| sin(TAU * j as f64 / n as f64)).collect();
        let s = PeriodicQuintic::interpolate(&f);
        let t = 0.123;
        let d = s.eval(t);
        assert!((d[0] - sin(TAU * t)).abs() < 1e-10);
        assert!((d[1] - TAU * cos(TAU * t)).abs() < 1e-7);
        assert!((d[4] - TAU.powi(4) * sin(TAU * t)).abs() < 1e-2 * TAU.powi(4));
    }

    #[test]
    fn straight_samples_give_the_identity() {
        let samples: Vec<Point> = (0..64).map(|j| [j as f64 / 64.0, 0.0]).collect();
        let c = reparameterize_by_arclength(&samples).unwrap();
        assert!((c.period() - 1.0).abs() < 1e-14);
        for &s in &[0.0, 0.31, 0.9, 1.7] {
            let x = c.position(s);
            assert!((x[0] - s).abs() < 1e-13 && x[1].abs() < 1e-13);
            assert!(c.curvature(s).abs() < 1e-10);
        }
    }

    #[test]
    fn sine_graph_period_matches_independent_quadrature() {
        // scipy quad of sqrt(1 + (0.2π cos 2πt)²) over [0, 1]
        let c = reparameterize_by_arclength(&sine_samples(256, 0.1)).unwrap();
        assert!((c.period() - 1.092_383_547_331_175_4).abs() < 1e-9, "{}", c.period());
    }

    #[test]
    fn curvature_of_sine_graph_matches_closed_form() {
        let c = reparameterize_by_arclength(&sine_samples(512, 0.1)).unwrap();
        // at t = 1/4 (crest): κ = y'' / (1 + y'²)^{3/2} = -0.1 (2π)²
        let s_crest = c.period() / 4.0; // symmetric graph, crest at a quarter of the arc length
        let k = c.curvature_jet(s_crest);
        assert!((k.kappa + 0.1 * TAU * TAU).abs() < 1e-6, "{k:?}");
        assert!(k.d1.abs() < 1e-5);
        // unit speed of the tangent evaluator
        let t = c.tangent(0.37);
        assert!((length(t) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn coincident_samples_are_rejected() {
        let mut samples = sine_samples(64, 0.1);
        samples[10] = samples[9];
        assert_eq!(
            reparameterize_by_arclength(&samples).unwrap_err(),
            CurveError::NonInjectiveInput { index: 9, next: 10 }
        );
    }

    #[test]
    fn too_few_samples_are_rejected() {
        assert!(matches!(
            reparameterize_by_arclength(&sine_samples(32, 0.1)),
            Err(CurveError::InsufficientSmoothness { samples: 32, .. })
        ));
    }
}
