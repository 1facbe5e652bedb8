//! Gap scaling, ground-state, comparison and equivalence studies built on
//! the assembled problems.

mod comparison;
mod form;
mod periodicity;
mod scaling;
mod unitary;


use serde::{Deserialize, Serialize};

use crate::assembly::{
    assemble_comparison, assemble_flat, assemble_reference_physical, assemble_straightened, ProblemKind,
    SparseSymmetricProblem,
};
use crate::eigen::{smallest_eigenpairs, EigenError, EigenRequest, EigenResult};
use crate::math::{sqrt, PI};
use crate::waveguide::{sample_fields, CoefficientFields, EndCondition, Grid, ModelError, SegmentSpec, WaveguideGeometry};

pub use comparison::{ComparisonRatios, ComparisonReport, DEFAULT_SLACK};
pub use form::{FORM_NOISE_FLOOR, FormCheckReport, FormEntry, FormValues, TestFunction};
pub use periodicity::{PeriodicityReport, PERIODICITY_CELL_TOL, PERIODICITY_ENERGY_TOL};
pub use scaling::{scaling_fit, GapReport, GridLevel, ScalingFit};
pub use unitary::{UnitaryLevel, UnitaryReport};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error("invalid grid policy: {0}")]
    InvalidPolicy(&'static str),
    #[error("need at least {needed} lengths L >= 4, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("ground vector of the {kind:?} problem is not strictly positive")]
    GroundStateSignFailure { kind: ProblemKind },
}

/// Grid family tied to the segment length: level `ℓ` of `Λ_L` uses
/// `cells_per_period · 2^ℓ · L` columns and `transverse_cells · 2^ℓ` rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridPolicy {
    pub cells_per_period: usize,
    pub transverse_cells: usize,
    pub levels: usize,
}

impl Default for GridPolicy {
    fn default() -> Self {
        Self { cells_per_period: 32, transverse_cells: 32, levels: 2 }
    }
}

impl GridPolicy {
    pub fn new(cells_per_period: usize, transverse_cells: usize, levels: usize) -> Self {
        Self { cells_per_period, transverse_cells, levels }
    }

    pub fn validate(&self) -> Result<(), AnalysisError> {
        if self.cells_per_period < 2 || self.cells_per_period % 2 != 0 {
            return Err(AnalysisError::InvalidPolicy("cells per period must be even and at least 2"));
        }
        if self.transverse_cells < 4 {
            return Err(AnalysisError::InvalidPolicy("at least 4 transverse cells are required"));
        }
        if self.levels == 0 || self.levels > 8 {
            return Err(AnalysisError::InvalidPolicy("levels must lie in 1..=8"));
        }
        Ok(())
    }

    /// `(n_s, n_u)` at `level` for `periods` periods.
    pub fn dims(&self, periods: u32, level: usize) -> (usize, usize) {
        let f = 1usize << level;
        (self.cells_per_period * f * periods as usize, self.transverse_cells * f)
    }

    pub fn finest(&self) -> usize {
        self.levels - 1
    }
}

/// Sign applied to the curvature potential of the straightened operator.
///
/// `Negated` exists to check that the verification suite notices a wrong potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialMode {
    #[default]
    Standard,
    Negated,
}

/// Gap of the flat strip `(0, pL) × (-ρ, ρ)`, periodic in `s`:
/// `min(4π²/(pL)², 3π²/(4ρ²))`.
pub fn flat_gap_analytic(p: f64, rho: f64, periods: u32) -> f64 {
    assert!(p > 0.0 && rho > 0.0 && periods >= 1, "flat gap needs p, rho > 0 and L >= 1");
    let pl = p * periods as f64;
    let longitudinal = 4.0 * PI * PI / (pl * pl);
    let transverse = 3.0 * PI * PI / (4.0 * rho * rho);
    longitudinal.min(transverse)
}

/// Ground energy `π²/(4ρ²)` of the flat strip.
pub fn flat_ground_energy(rho: f64) -> f64 {
    PI * PI / (4.0 * rho * rho)
}

/// Second-order Richardson extrapolation from spacings `2δ` and `δ`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// One geometry with the solver settings shared by all studies on it.
#[derive(Debug, Clone, Copy)]
pub struct Study<'a> {
    pub geometry: &'a WaveguideGeometry,
    pub solver: EigenRequest,
    pub potential: PotentialMode,
    pub end_bc: EndCondition,
}

impl<'a> Study<'a> {
    pub fn new(geometry: &'a WaveguideGeometry) -> Self {
        Self { geometry, solver: EigenRequest::default(), potential: PotentialMode::Standard, end_bc: EndCondition::Periodic }
    }

    pub fn with_solver(mut self, solver: EigenRequest) -> Self {
        self.solver = solver;
        self
    }

    pub fn with_potential(mut self, potential: PotentialMode) -> Self {
        self.potential = potential;
        self
    }

    pub fn with_end_condition(mut self, end_bc: EndCondition) -> Self {
        self.end_bc = end_bc;
        self
    }

    pub fn segment(&self, periods: u32) -> Result<SegmentSpec, ModelError> {
        match self.end_bc {
            EndCondition::Periodic => Ok(SegmentSpec::periodic(periods)),
            EndCondition::Neumann => SegmentSpec::neumann(periods, self.geometry),
        }
    }

    /// Sampled coefficients with the potential sign of this study applied.
    pub fn fields(&self, segment: &SegmentSpec, n_s: usize, n_u: usize) -> Result<CoefficientFields, ModelError> {
        let grid = Grid::for_segment(self.geometry, segment, n_s, n_u);
        let mut fields = sample_fields(self.geometry, segment, &grid)?;
        if self.potential == PotentialMode::Negated {
            fields.nodes.potential.iter_mut().for_each(|v| *v = -*v);
        }
        Ok(fields)
    }

    pub fn assemble(
        &self,
        kind: ProblemKind,
        segment: &SegmentSpec,
        fields: &CoefficientFields,
    ) -> Result<SparseSymmetricProblem, ModelError> {
        match kind {
            ProblemKind::Straightened => assemble_straightened(fields, segment),
            ProblemKind::Comparison => assemble_comparison(fields, segment),
            ProblemKind::Flat => assemble_flat(&fields.grid, segment),
            ProblemKind::PhysicalReference => assemble_reference_physical(fields, segment),
        }
    }

    /// At least `k` lowest eigenpairs, more if the study's request asks for more.
    pub fn eigenpairs(&self, problem: &SparseSymmetricProblem, k: usize) -> Result<EigenResult, EigenError> {
        let request = EigenRequest { k: self.solver.k.max(k), ..self.solver };
        smallest_eigenpairs(problem, &request)
    }

    /// Assembles and solves one problem on `Λ_periods` with an `n_s × n_u` grid.
    pub fn solve(
        &self,
        kind: ProblemKind,
        periods: u32,
        n_s: usize,
        n_u: usize,
        k: usize,
    ) -> Result<(SparseSymmetricProblem, EigenResult), AnalysisError> {
        let segment = self.segment(periods)?;
        let fields = self.fields(&segment, n_s, n_u)?;
        let problem = self.assemble(kind, &segment, &fields)?;
        let result = self.eigenpairs(&problem, k)?;
        Ok((problem, result))
    }
}

/// Scales `v` in place so that `Σ v² ds du = 1`; returns the factor applied.
pub(crate) fn normalize_l2(v: &mut [f64], cell: f64) -> f64 {
    let norm = sqrt(v.iter().map(|x| x * x).sum::<f64>() * cell);
    let f = 1.0 / norm;
    v.iter_mut().for_each(|x| *x *= f);
    f
}

pub(crate) fn check_positive(kind: ProblemKind, v: &[f64]) -> Result<(), AnalysisError> {
    if v.iter().all(|&x| x > 0.0) {
        Ok(())
    } else {
        Err(AnalysisError::GroundStateSignFailure { kind })
    }
}

pub(crate) fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}
