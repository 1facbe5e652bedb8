//! Finite-difference discretizations of the four operators on `Λ_L`.
//!
//! All four use the same five-point cell-face stencil: edge weights are
//! face-midpoint coefficients over `ds²` or `du²`, Dirichlet rows at `u = ±ρ`
//! are eliminated, and `s`-edges wrap around for periodic ends. Neumann ends
//! mirror the end column across the end face, which simply drops that face.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::sparse::{CsrMatrix, SymmetricBuilder};
use crate::waveguide::{CoefficientFields, EndCondition, Grid, ModelError, SegmentSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    /// `-∂_s h⁻² ∂_s - ∂²_u + V`
    Straightened,
    /// `-∂_s h⁻² ∂_s - ∂²_u`
    Comparison,
    /// `-∂²_s - ∂²_u`
    Flat,
    /// The Dirichlet form `∫ h⁻¹|∂_s φ|² + h|∂_u φ|²` with mass `∫ h|φ|²`.
    PhysicalReference,
}

/// `A x = λ M x` with `M` diagonal (absent means identity).
#[derive(Debug, Clone)]
pub struct SparseSymmetricProblem {
    pub kind: ProblemKind,
    pub stiffness: CsrMatrix,
    pub mass: Option<Vec<f64>>,
    pub grid: Grid,
    pub end_bc: EndCondition,
}

impl SparseSymmetricProblem {
    pub fn dim(&self) -> usize {
        self.stiffness.dim()
    }

    pub fn mass(&self) -> Option<&[f64]> {
        self.mass.as_deref()
    }
}

fn assemble(
    grid: &Grid,
    end_bc: EndCondition,
    s_weight: impl Fn(usize, usize) -> f64,
    u_weight: impl Fn(usize, usize) -> f64,
    diag: Option<&dyn Fn(usize, usize) -> f64>,
) -> CsrMatrix {
    let mut b = SymmetricBuilder::new(grid.unknowns());
    let inv_ds2 = 1.0 / (grid.ds * grid.ds);
    let inv_du2 = 1.0 / (grid.du * grid.du);
    let top = grid.n_u - 1;
    for i in 0..grid.n_s {
        // s-face between columns i and i + 1
        let next = match end_bc {
            EndCondition::Periodic => Some((i + 1) % grid.n_s),
            EndCondition::Neumann => (i + 1 < grid.n_s).then_some(i + 1),
        };
        if let Some(next) = next.filter(|&k| k != i) {
            for j in 1..=top {
                b.edge(grid.index(i, j), grid.index(next, j), s_weight(i, j) * inv_ds2);
            }
        }
        // u-faces between rows f and f + 1; faces touching u = ±ρ only feed the diagonal
        for f in 0..grid.n_u {
            let w = u_weight(i, f) * inv_du2;
            match (f, f + 1) {
                (0, _) => b.diag(grid.index(i, 1), w),
                (_, hi) if hi == grid.n_u => b.diag(grid.index(i, top), w),
                (lo, hi) => b.edge(grid.index(i, lo), grid.index(i, hi), w),
            }
        }
        if let Some(v) = diag {
            for j in 1..=top {
                b.diag(grid.index(i, j), v(i, j));
            }
        }
    }
    b.finish()
}

fn checked(fields: &CoefficientFields, segment: &SegmentSpec) -> Result<(), ModelError> {
    segment.validate()?;
    let g = &fields.grid;
    if fields.nodes.len() != g.unknowns() || fields.u_faces.len() != g.n_s * g.n_u {
        return Err(ModelError::InconsistentGrid("field arrays do not match the grid"));
    }
    Ok(())
}

/// `H_L = -∂_s h⁻² ∂_s - ∂²_u + V`, identity mass.
pub fn assemble_straightened(
    fields: &CoefficientFields,
    segment: &SegmentSpec,
) -> Result<SparseSymmetricProblem, ModelError> {
    checked(fields, segment)?;
    let g = fields.grid;
    let potential = |i: usize, j: usize| fields.nodes.potential[fields.node(i, j)];
    let stiffness = assemble(
        &g,
        segment.end_bc,
        |i, j| fields.s_faces.inv_h2[fields.s_face(i, j)],
        |_, _| 1.0,
        Some(&potential),
    );
    Ok(SparseSymmetricProblem { kind: ProblemKind::Straightened, stiffness, mass: None, grid: g, end_bc: segment.end_bc })
}

/// `H̃_L = -∂_s h⁻² ∂_s - ∂²_u`, identity mass.
pub fn assemble_comparison(
    fields: &CoefficientFields,
    segment: &SegmentSpec,
) -> Result<SparseSymmetricProblem, ModelError> {
    checked(fields, segment)?;
    let g = fields.grid;
    let stiffness = assemble(&g, segment.end_bc, |i, j| fields.s_faces.inv_h2[fields.s_face(i, j)], |_, _| 1.0, None);
    Ok(SparseSymmetricProblem { kind: ProblemKind::Comparison, stiffness, mass: None, grid: g, end_bc: segment.end_bc })
}

/// The Laplacian on `Λ_L`, Dirichlet in `u`.
pub fn assemble_flat(grid: &Grid, segment: &SegmentSpec) -> Result<SparseSymmetricProblem, ModelError> {
    segment.validate()?;
    let stiffness = assemble(grid, segment.end_bc, |_, _| 1.0, |_, _| 1.0, None);
    Ok(SparseSymmetricProblem { kind: ProblemKind::Flat, stiffness, mass: None, grid: *grid, end_bc: segment.end_bc })
}

/// Dirichlet Laplacian of `Ω_L` in curvilinear coordinates, without the
/// unitary `h^{1/2}` conjugation: stiffness from `h⁻¹` on `s`-faces and `h` on
/// `u`-faces, diagonal mass `h` at the nodes (divided by `ds du`).
pub fn assemble_reference_physical(
    fields: &CoefficientFields,
    segment: &SegmentSpec,
) -> Result<SparseSymmetricProblem, ModelError> {
    checked(fields, segment)?;
    let g = fields.grid;
    let stiffness = assemble(
        &g,
        segment.end_bc,
        |i, j| fields.s_faces.ref_inv_h[fields.s_face(i, j)],
        |i, f| fields.u_faces.ref_h[fields.u_face(i, f)],
        None,
    );
    Ok(SparseSymmetricProblem {
        kind: ProblemKind::PhysicalReference,
        stiffness,
        mass: Some(fields.nodes.ref_weight.clone()),
        grid: g,
        end_bc: segment.end_bc,
    })
}
