//! Unit-speed planar curves with the translation periodicity
//! `γ(s + p) = γ(s) + (1, 0)`, and the admissibility test for strips around them.

mod admissibility;
mod angle;
mod spline;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use admissibility::{check_admissibility, AdmissibilityReport};
pub use angle::build_from_angle_profile;
pub use spline::reparameterize_by_arclength;

use crate::math::{floor, sqrt};

/// A point or vector in the plane.
pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CurveError {
    #[error("closure iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NoClosure { iterations: usize, residual: f64 },
    #[error("closure produced a degenerate period {period}")]
    DegenerateProfile { period: f64 },
    #[error("samples {index} and {next} coincide")]
    NonInjectiveInput { index: usize, next: usize },
    #[error("{samples} samples per period cannot resolve the curvature derivatives (need at least {required})")]
    InsufficientSmoothness { samples: usize, required: usize },
    #[error("invalid tangent-angle specification: {0}")]
    InvalidSpec(&'static str),
}

/// Tangent angle as a finite Fourier series in the arc length:
/// `θ(s) = offset + Σ_k a_k cos(2πks/p) + b_k sin(2πks/p)`, `k = 1, 2, ...`.
///
/// `offset` and `period_hint` are starting values; the closure solve moves them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentAngleSpec {
    #[serde(default)]
    pub fourier_cos: Vec<f64>,
    #[serde(default)]
    pub fourier_sin: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
    #[serde(default = "default_period_hint")]
    pub period_hint: f64,
}

fn default_period_hint() -> f64 {
    1.0
}

impl TangentAngleSpec {
    /// The profile `θ(s) = ε sin(2πs/p)`.
    pub fn sine(amplitude: f64) -> Self {
        Self { fourier_sin: alloc::vec![amplitude], ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), CurveError> {
        if !(self.period_hint > 0.0 && self.period_hint.is_finite()) {
            return Err(CurveError::InvalidSpec("period_hint must be a positive finite number"));
        }
        if !self.offset.is_finite() {
            return Err(CurveError::InvalidSpec("offset must be finite"));
        }
        if self.fourier_cos.iter().chain(&self.fourier_sin).any(|a| !a.is_finite()) {
            return Err(CurveError::InvalidSpec("amplitudes must be finite"));
        }
        Ok(())
    }
}

impl Default for TangentAngleSpec {
    fn default() -> Self {
        Self { fourier_cos: Vec::new(), fourier_sin: Vec::new(), offset: 0.0, period_hint: 1.0 }
    }
}

/// Curvature and its first two arc-length derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurvatureJet {
    pub kappa: f64,
    pub d1: f64,
    pub d2: f64,
}

#[derive(Debug, Clone)]
enum Backend {
    Angle(angle::AngleSeries),
    Spline(spline::SplineCurve),
}

/// A C⁴ unit-speed curve with `γ(s + p) = γ(s) + (1, 0)`.
///
/// Immutable once built; all evaluators take `&self`.
#[derive(Debug, Clone)]
pub struct ArcLengthCurve {
    period: f64,
    backend: Backend,
}

impl ArcLengthCurve {
    /// The horizontal line `γ(s) = (s, 0)` with period 1.
    pub fn straight_line() -> Self {
        build_from_angle_profile(&TangentAngleSpec::default()).expect("flat profile always closes")
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn position(&self, s: f64) -> Point {
        match &self.backend {
            Backend::Angle(a) => a.position(s),
            Backend::Spline(c) => c.position(s),
        }
    }

    /// Unit tangent `γ̇(s)`.
    pub fn tangent(&self, s: f64) -> Point {
        match &self.backend {
            Backend::Angle(a) => a.tangent(s),
            Backend::Spline(c) => c.tangent(s),
        }
    }

    /// Normal `ν = (-γ̇₂, γ̇₁)`.
    pub fn normal(&self, s: f64) -> Point {
        let t = self.tangent(s);
        [-t[1], t[0]]
    }

    pub fn curvature(&self, s: f64) -> f64 {
        self.curvature_jet(s).kappa
    }

    pub fn curvature_jet(&self, s: f64) -> CurvatureJet {
        match &self.backend {
            Backend::Angle(a) => a.curvature_jet(s),
            Backend::Spline(c) => c.curvature_jet(s),
        }
    }

    /// Checks reflection symmetry about the vertical line through `γ(0)`:
    /// `γ₁(-s) - γ₁(0) = -(γ₁(s) - γ₁(0))` and `γ₂(-s) = γ₂(s)` on `n` samples of one period.
    pub fn is_reflection_symmetric(&self, n: usize, tol: f64) -> bool {
        let origin = self.position(0.0);
        (0..=n).all(|i| {
            let s = self.period * i as f64 / n as f64;
            let a = self.position(s);
            let b = self.position(-s);
            ((a[0] - origin[0]) + (b[0] - origin[0])).abs() <= tol && (a[1] - b[1]).abs() <= tol
        })
    }

    /// Uniform samples `(s, x, y, κ)` over `[0, p)`.
    pub fn sample(&self, n: usize) -> Vec<[f64; 4]> {
        (0..n)
            .map(|i| {
                let s = self.period * i as f64 / n as f64;
                let x = self.position(s);
                [s, x[0], x[1], self.curvature(s)]
            })
            .collect()
    }
}

/// Splits `s` as `k p + r` with `r ∈ [0, p)`.
pub(crate) fn reduce(s: f64, period: f64) -> (f64, f64) {
    let k = floor(s / period);
    let mut r = s - k * period;
    if r >= period {
        r -= period;
    }
    if r < 0.0 {
        r = 0.0;
    }
    (k, r)
}

pub(crate) fn length(v: Point) -> f64 {
    sqrt(v[0] * v[0] + v[1] * v[1])
}
