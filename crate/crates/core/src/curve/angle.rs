//! Curves generated from a Fourier tangent-angle profile.

use alloc::vec::Vec;

use super::{reduce, ArcLengthCurve, Backend, CurvatureJet, CurveError, Point, TangentAngleSpec};
use crate::math::{cos, hypot, sin, sin_cos, TAU};

const MAX_NEWTON_STEPS: usize = 100;
const CLOSURE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Complex {
    re: f64,
    im: f64,
}

impl Complex {
    const ZERO: Self = Self { re: 0.0, im: 0.0 };

    fn cis(t: f64) -> Self {
        let (s, c) = sin_cos(t);
        Self { re: c, im: s }
    }

    fn mul(self, o: Self) -> Self {
        Self { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }

    fn conj(self) -> Self {
        Self { re: self.re, im: -self.im }
    }

    fn add(self, o: Self) -> Self {
        Self { re: self.re + o.re, im: self.im + o.im }
    }

    fn scale(self, a: f64) -> Self {
        Self { re: a * self.re, im: a * self.im }
    }

    fn abs(self) -> f64 {
        hypot(self.re, self.im)
    }
}

/// Tangent angle in the normalized variable `τ = s/p`, without the offset.
fn shape_angle(cos_amp: &[f64], sin_amp: &[f64], tau: f64) -> f64 {
    let mut theta = 0.0;
    for (k, a) in cos_amp.iter().enumerate() {
        theta += a * cos(TAU * (k + 1) as f64 * tau);
    }
    for (k, b) in sin_amp.iter().enumerate() {
        theta += b * sin(TAU * (k + 1) as f64 * tau);
    }
    theta
}

fn quadrature_points(spec: &TangentAngleSpec) -> usize {
    let modes = spec.fourier_cos.len().max(spec.fourier_sin.len());
    let amplitude: f64 = spec.fourier_cos.iter().chain(&spec.fourier_sin).map(|a| a.abs()).sum();
    let n = 64 * (modes + 1) * (2 + amplitude as usize);
    n.clamp(512, 8192)
}

/// Closure integrals `(∫₀¹ cos θ̂, ∫₀¹ sin θ̂)` by the periodic trapezoid rule.
fn closure_integrals(samples: &[f64], offset: f64) -> (f64, f64) {
    let n = samples.len() as f64;
    let (c, s) = samples.iter().fold((0.0, 0.0), |(c, s), &t| {
        let (st, ct) = sin_cos(offset + t);
        (c + ct, s + st)
    });
    (c / n, s / n)
}

/// Solves `∫₀^p cos θ = 1`, `∫₀^p sin θ = 0` for `(offset, p)` by damped Newton.
fn solve_closure(spec: &TangentAngleSpec, samples: &[f64]) -> Result<(f64, f64), CurveError> {
    let residual = |o: f64, p: f64| {
        let (c, s) = closure_integrals(samples, o);
        ((p * c - 1.0, p * s), (c, s))
    };
    let norm = |r: (f64, f64)| hypot(r.0, r.1);

    let (mut offset, mut period) = (spec.offset, spec.period_hint);
    let (mut r, mut cs) = residual(offset, period);
    for _ in 0..MAX_NEWTON_STEPS {
        if norm(r) <= CLOSURE_TOL {
            break;
        }
        let (c, s) = cs;
        // J = [[-p s, c], [p c, s]], det = -p (c² + s²)
        let det = -period * (c * c + s * s);
        if det.abs() < 1e-300 || !det.is_finite() {
            return Err(CurveError::NoClosure { iterations: 0, residual: norm(r) });
        }
        let d_offset = -(s * r.0 - c * r.1) / det;
        let d_period = -(-period * s * r.1 - period * c * r.0) / det;

        let mut step = 1.0;
        let current = norm(r);
        loop {
            let o = offset + step * d_offset;
            let p = period + step * d_period;
            if p > 0.0 && p.is_finite() {
                let (r_new, cs_new) = residual(o, p);
                if norm(r_new) < (1.0 - 1e-4 * step) * current {
                    offset = o;
                    period = p;
                    r = r_new;
                    cs = cs_new;
                    break;
                }
            }
            step *= 0.5;
            if step < 1e-12 {
                return Err(CurveError::NoClosure { iterations: 0, residual: current });
            }
        }
    }
    if norm(r) > CLOSURE_TOL {
        return Err(CurveError::NoClosure { iterations: MAX_NEWTON_STEPS, residual: norm(r) });
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(CurveError::DegenerateProfile { period });
    }
    Ok((offset, period))
}

/// Builds the curve whose tangent angle is the Fourier series of `spec`,
/// solving the two closure constraints for the offset and the period.
pub fn build_from_angle_profile(spec: &TangentAngleSpec) -> Result<ArcLengthCurve, CurveError> {
    spec.validate()?;
    let n = quadrature_points(spec);
    let samples: Vec<f64> = (0..n)
        .map(|j| shape_angle(&spec.fourier_cos, &spec.fourier_sin, j as f64 / n as f64))
        .collect();
    let (offset, period) = solve_closure(spec, &samples)?;
    // Stagnation toward p → 0 is reported by the Newton loop; guard the rest.
    if period < 1e-9 * spec.period_hint {
        return Err(CurveError::DegenerateProfile { period });
    }
    let series = AngleSeries::new(spec, offset, period, &samples);
    Ok(ArcLengthCurve { period, backend: Backend::Angle(series) })
}

/// Tangent-angle series plus the Fourier coefficients of `e^{iθ}` used to
/// integrate the position in closed form.
#[derive(Debug, Clone)]
pub(super) struct AngleSeries {
    cos_amp: Vec<f64>,
    sin_amp: Vec<f64>,
    offset: f64,
    period: f64,
    /// `p c₀`, which equals `(1, 0)` up to the closure tolerance.
    drift: Complex,
    /// `p c_n / (2πin)` for `n = 1..=m` and `n = -1..=-m`.
    pos_coeffs: Vec<Complex>,
    neg_coeffs: Vec<Complex>,
    constant: Complex,
}

impl AngleSeries {
    fn new(spec: &TangentAngleSpec, offset: f64, period: f64, samples: &[f64]) -> Self {
        let n = samples.len();
        let values: Vec<Complex> = samples.iter().map(|&t| Complex::cis(offset + t)).collect();
        let twiddle: Vec<Complex> = (0..n).map(|m| Complex::cis(-TAU * m as f64 / n as f64)).collect();
        let coeff = |k: i64| {
            let mut acc = Complex::ZERO;
            for (j, v) in values.iter().enumerate() {
                let idx = (k * j as i64).rem_euclid(n as i64) as usize;
                acc = acc.add(v.mul(twiddle[idx]));
            }
            acc.scale(1.0 / n as f64)
        };
        let c0 = coeff(0);
        let max_mode = n / 4;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for k in 1..=max_mode as i64 {
            let cp = coeff(k);
            let cn = coeff(-k);
            if cp.abs() + cn.abs() < 1e-17 && k > 2 {
                break;
            }
            // p c_n / (2πin) = -i p c_n / (2πn)
            let scale = period / (TAU * k as f64);
            pos.push(Complex { re: cp.im * scale, im: -cp.re * scale });
            neg.push(Complex { re: -cn.im * scale, im: cn.re * scale });
        }
        let constant = pos.iter().chain(&neg).fold(Complex::ZERO, |acc, c| acc.add(*c)).scale(-1.0);
        Self {
            cos_amp: spec.fourier_cos.clone(),
            sin_amp: spec.fourier_sin.clone(),
            offset,
            period,
            drift: c0.scale(period),
            pos_coeffs: pos,
            neg_coeffs: neg,
            constant,
        }
    }

    fn angle(&self, s: f64) -> f64 {
        self.offset + shape_angle(&self.cos_amp, &self.sin_amp, s / self.period)
    }

    pub(super) fn position(&self, s: f64) -> Point {
        let (k, r) = reduce(s, self.period);
        let tau = r / self.period;
        let w = Complex::cis(TAU * tau);
        let mut wn = w;
        let mut z = self.constant.add(self.drift.scale(tau));
        for (cp, cn) in self.pos_coeffs.iter().zip(&self.neg_coeffs) {
            z = z.add(cp.mul(wn)).add(cn.mul(wn.conj()));
            wn = wn.mul(w);
        }
        // Whole periods translate by p c₀ ≈ (1, 0).
        let shift = self.drift.scale(k);
        [z.re + shift.re, z.im + shift.im]
    }

    pub(super) fn tangent(&self, s: f64) -> Point {
        let (sn, cs) = sin_cos(self.angle(s));
        [cs, sn]
    }

    pub(super) fn curvature_jet(&self, s: f64) -> CurvatureJet {
        let omega = TAU / self.period;
        let mut jet = CurvatureJet::default();
        for (k, a) in self.cos_amp.iter().enumerate() {
            let w = omega * (k + 1) as f64;
            let (sn, cs) = sin_cos(w * s);
            jet.kappa -= a * w * sn;
            jet.d1 -= a * w * w * cs;
            jet.d2 += a * w * w * w * sn;
        }
        for (k, b) in self.sin_amp.iter().enumerate() {
            let w = omega * (k + 1) as f64;
            let (sn, cs) = sin_cos(w * s);
            jet.kappa += b * w * cs;
            jet.d1 -= b * w * w * sn;
            jet.d2 -= b * w * w * w * cs;
        }
        jet
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: composite Gauss-Legendre quadrature of (cos θ, sin θ).
    fn integrate_tangent(spec: &TangentAngleSpec, offset: f64, p: f64, s: f64) -> Point {
        let panels = 400;
        let h = s / panels as f64;
        let mut x = [0.0, 0.0];
        for i in 0..panels {
            let a = i as f64 * h;
            let th = |t: f64| offset + shape_angle(&spec.fourier_cos, &spec.fourier_sin, t / p);
            x[0] += crate::math::gauss8(a, a + h, |t| cos(th(t)));
            x[1] += crate::math::gauss8(a, a + h, |t| sin(th(t)));
        }
        x
    }

    #[test]
    fn sine_profile_period_is_inverse_bessel() {
        let spec = TangentAngleSpec::sine(0.5);
        let curve = build_from_angle_profile(&spec).unwrap();
        // 1 / J₀(0.5), scipy.special.j0
        assert!((curve.period() - 1.065_564_381_810_099_3).abs() < 1e-12);
        let Backend::Angle(series) = &curve.backend else { panic!() };
        assert!(series.offset.abs() < 1e-14);
        let sup = TAU * 0.5 / curve.period();
        assert!((curve.curvature(0.0) - sup).abs() < 1e-12);
        assert!((sup - 2.948_289_852_043_567_6).abs() < 1e-12);
    }

    #[test]
    fn position_matches_direct_quadrature() {
        let spec = TangentAngleSpec {
            fourier_cos: alloc::vec![0.2, -0.1],
            fourier_sin: alloc::vec![0.4, 0.0, 0.05],
            offset: 0.1,
            period_hint: 1.0,
        };
        let curve = build_from_angle_profile(&spec).unwrap();
        let Backend::Angle(series) = &curve.backend else { panic!() };
        for &s in &[0.1, 0.37, 0.8, 1.4] {
            let expect = integrate_tangent(&spec, series.offset, curve.period(), s);
            let got = curve.position(s);
            assert!((got[0] - expect[0]).abs() < 1e-12, "{got:?} vs {expect:?}");
            assert!((got[1] - expect[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn quarter_period_point_of_curve_a() {
        // scipy quad of (cos θ, sin θ) over [0, p/4]
        let curve = build_from_angle_profile(&TangentAngleSpec::sine(0.5)).unwrap();
        let x = curve.position(curve.period() / 4.0);
        assert!((x[0] - 0.25).abs() < 1e-12);
        assert!((x[1] - 0.082_462_939_189_774_61).abs() < 1e-12);
    }

    #[test]
    fn wildly_winding_profile_does_not_close() {
        let spec = TangentAngleSpec { fourier_cos: alloc::vec![10.0], ..TangentAngleSpec::default() };
        assert!(matches!(build_from_angle_profile(&spec), Err(CurveError::NoClosure { .. })));
    }

    #[test]
    fn closure_residual_has_no_root_along_the_symmetric_search_line() {
        // For θ = 10 cos(2πτ) the sine integral vanishes identically in the
        // offset-zero line the Newton iteration is confined to, and the cosine
        // integral is J₀(10) < 0, so p ∫cos θ = 1 has no positive root there.
        let spec = TangentAngleSpec { fourier_cos: alloc::vec![10.0], ..TangentAngleSpec::default() };
        let n = quadrature_points(&spec);
        let samples: Vec<f64> = (0..n).map(|j| shape_angle(&spec.fourier_cos, &[], j as f64 / n as f64)).collect();
        let (c, s) = closure_integrals(&samples, 0.0);
        assert!(s.abs() < 1e-14);
        assert!((c - (-0.245_935_764_451_348_3)).abs() < 1e-12);
    }

    #[test]
    fn offset_is_recovered_for_a_tilted_start() {
        let spec = TangentAngleSpec { offset: 0.3, period_hint: 1.4, ..TangentAngleSpec::sine(0.5) };
        let curve = build_from_angle_profile(&spec).unwrap();
        assert!((curve.period() - 1.065_564_381_810_099_3).abs() < 1e-12);
        let t = curve.tangent(0.0);
        assert!((t[0] - 1.0).abs() < 1e-13);
    }
}
