//! The strip `Ω` around a periodic curve in straightened coordinates `(s, u)`,
//! and the coefficient fields sampled on a rectangular grid over `Λ_L`.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::curve::{check_admissibility, AdmissibilityReport, ArcLengthCurve, CurvatureJet, Point};

/// Arc-length samples used when a geometry checks its own admissibility.
pub const ADMISSIBILITY_SAMPLES: usize = 1024;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("strip is not admissible: rho * sup|kappa| = {rho_kappa:.6} (must be < 1), embedding ok = {embedding_ok}")]
    Inadmissible { rho_kappa: f64, embedding_ok: bool },
    #[error("transverse coordinate u = {u} lies outside [-{rho}, {rho}]")]
    OutOfStrip { u: f64, rho: f64 },
    #[error("grid does not match the segment: {0}")]
    InconsistentGrid(&'static str),
    #[error("Neumann ends require a confirmed reflection-symmetric curve")]
    NeumannWithoutSymmetry,
    #[error("invalid segment: {0}")]
    InvalidSegment(&'static str),
}

/// A periodic curve together with the strip half-width `ρ`.
#[derive(Debug, Clone)]
pub struct WaveguideGeometry {
    curve: ArcLengthCurve,
    rho: f64,
    admissibility: AdmissibilityReport,
}

impl WaveguideGeometry {
    pub fn new(curve: ArcLengthCurve, rho: f64) -> Result<Self, ModelError> {
        Self::with_admissibility_samples(curve, rho, ADMISSIBILITY_SAMPLES)
    }

    pub fn with_admissibility_samples(curve: ArcLengthCurve, rho: f64, samples: usize) -> Result<Self, ModelError> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(ModelError::InvalidSegment("half-width must be positive"));
        }
        let admissibility = check_admissibility(&curve, rho, samples);
        if !admissibility.passed() {
            return Err(ModelError::Inadmissible {
                rho_kappa: admissibility.rho_kappa_product,
                embedding_ok: admissibility.embedding_ok,
            });
        }
        Ok(Self { curve, rho, admissibility })
    }

    pub fn curve(&self) -> &ArcLengthCurve {
        &self.curve
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn period(&self) -> f64 {
        self.curve.period()
    }

    pub fn admissibility(&self) -> &AdmissibilityReport {
        &self.admissibility
    }

    /// Uniform bounds `1 - ρ‖κ‖∞ ≤ h ≤ 1 + ρ‖κ‖∞`.
    pub fn h_bounds(&self) -> (f64, f64) {
        let rk = self.admissibility.rho_kappa_product;
        (1.0 - rk, 1.0 + rk)
    }

    pub fn is_reflection_symmetric(&self) -> bool {
        self.curve.is_reflection_symmetric(512, 1e-9)
    }

    fn check_strip(&self, u: f64) -> Result<(), ModelError> {
        if u.abs() <= self.rho {
            Ok(())
        } else {
            Err(ModelError::OutOfStrip { u, rho: self.rho })
        }
    }

    /// `h(s, u) = 1 - uκ(s)`.
    pub fn h(&self, s: f64, u: f64) -> f64 {
        1.0 - u * self.curve.curvature(s)
    }

    /// The straightening potential
    /// `V = -κ²/(4h²) + ∂²_s h/(2h³) - 5(∂_s h)²/(4h⁴)` with
    /// `∂_s h = -uκ'` and `∂²_s h = -uκ''`.
    pub fn potential_at(&self, s: f64, u: f64) -> Result<f64, ModelError> {
        self.check_strip(u)?;
        Ok(potential(self.curve.curvature_jet(s), u))
    }

    /// `F(s, u) = γ(s) + uν(s)`.
    pub fn map_to_physical(&self, s: f64, u: f64) -> Result<Point, ModelError> {
        self.check_strip(u)?;
        let x = self.curve.position(s);
        let nu = self.curve.normal(s);
        Ok([x[0] + u * nu[0], x[1] + u * nu[1]])
    }
}

pub(crate) fn potential(jet: CurvatureJet, u: f64) -> f64 {
    let h = 1.0 - u * jet.kappa;
    let hs = -u * jet.d1;
    let hss = -u * jet.d2;
    let h2 = h * h;
    -jet.kappa * jet.kappa / (4.0 * h2) + hss / (2.0 * h2 * h) - 5.0 * hs * hs / (4.0 * h2 * h2)
}

/// Boundary condition on the two ends `s = ±pL/2` of the segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EndCondition {
    #[default]
    Periodic,
    Neumann,
}

/// `Λ_L = (-pL/2, pL/2) × (-ρ, ρ)` with its end condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentSpec {
    pub periods: u32,
    pub end_bc: EndCondition,
    /// Must be set by the caller after an explicit symmetry check before
    /// Neumann ends are accepted.
    pub symmetry_confirmed: bool,
}

impl SegmentSpec {
    pub fn periodic(periods: u32) -> Self {
        Self { periods, end_bc: EndCondition::Periodic, symmetry_confirmed: false }
    }

    /// Neumann ends; fails unless the curve is reflection symmetric.
    pub fn neumann(periods: u32, geometry: &WaveguideGeometry) -> Result<Self, ModelError> {
        if !geometry.is_reflection_symmetric() {
            return Err(ModelError::NeumannWithoutSymmetry);
        }
        Ok(Self { periods, end_bc: EndCondition::Neumann, symmetry_confirmed: true })
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.periods == 0 {
            return Err(ModelError::InvalidSegment("at least one period is required"));
        }
        if self.end_bc == EndCondition::Neumann && !self.symmetry_confirmed {
            return Err(ModelError::NeumannWithoutSymmetry);
        }
        Ok(())
    }

    pub fn length(&self, geometry: &WaveguideGeometry) -> f64 {
        geometry.period() * self.periods as f64
    }
}

/// Rectangular grid over `Λ_L`.
///
/// Unknowns sit at cell centres in `s` (`s_i = -pL/2 + (i + ½)ds`) and at the
/// interior vertices `u_j = -ρ + j du`, `j = 1..n_u-1`, in `u`; the Dirichlet
/// rows `u = ±ρ` are eliminated. Unknown `(i, j)` has index `i (n_u - 1) + j - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n_s: usize,
    pub n_u: usize,
    pub ds: f64,
    pub du: f64,
    pub s_start: f64,
    pub rho: f64,
}

impl Grid {
    pub fn new(n_s: usize, n_u: usize, length: f64, rho: f64) -> Self {
        assert!(n_s >= 1 && n_u >= 2, "grid needs n_s >= 1 and n_u >= 2");
        Self { n_s, n_u, ds: length / n_s as f64, du: 2.0 * rho / n_u as f64, s_start: -0.5 * length, rho }
    }

    pub fn for_segment(geometry: &WaveguideGeometry, segment: &SegmentSpec, n_s: usize, n_u: usize) -> Self {
        Self::new(n_s, n_u, segment.length(geometry), geometry.rho())
    }

    pub fn length(&self) -> f64 {
        self.ds * self.n_s as f64
    }

    /// Interior nodes per `s`-column.
    pub fn rows(&self) -> usize {
        self.n_u - 1
    }

    pub fn unknowns(&self) -> usize {
        self.n_s * self.rows()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n_s && (1..self.n_u).contains(&j));
        i * self.rows() + j - 1
    }

    pub fn s_node(&self, i: usize) -> f64 {
        self.s_start + (i as f64 + 0.5) * self.ds
    }

    /// `u_j = -ρ + j du`, `j = 0..=n_u` (0 and `n_u` are the Dirichlet rows).
    pub fn u_node(&self, j: usize) -> f64 {
        -self.rho + j as f64 * self.du
    }

    /// Midpoint of the face between `s`-columns `i` and `i + 1`.
    pub fn s_face(&self, i: usize) -> f64 {
        self.s_start + (i as f64 + 1.0) * self.ds
    }

    /// Midpoint of the face between `u`-rows `j` and `j + 1`.
    pub fn u_face(&self, j: usize) -> f64 {
        -self.rho + (j as f64 + 0.5) * self.du
    }

    /// Checks that the grid spans `Λ_L` for this geometry and segment.
    pub fn check(&self, geometry: &WaveguideGeometry, segment: &SegmentSpec) -> Result<(), ModelError> {
        let length = segment.length(geometry);
        if (self.length() - length).abs() > 1e-12 * length || (self.s_start + 0.5 * length).abs() > 1e-12 * length {
            return Err(ModelError::InconsistentGrid("s-extent differs from pL"));
        }
        if (self.du * self.n_u as f64 - 2.0 * geometry.rho()).abs() > 1e-12 * geometry.rho()
            || (self.rho - geometry.rho()).abs() > 1e-15 * geometry.rho()
        {
            return Err(ModelError::InconsistentGrid("u-extent differs from 2 rho"));
        }
        Ok(())
    }
}

/// The six sampled quantities at one family of locations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FieldSet {
    pub h: Vec<f64>,
    pub inv_h2: Vec<f64>,
    pub potential: Vec<f64>,
    /// `h⁻¹`, the `s`-coefficient of the physical-coordinate form.
    pub ref_inv_h: Vec<f64>,
    /// `h`, the `u`-coefficient of the physical-coordinate form.
    pub ref_h: Vec<f64>,
    /// `|G|^{1/2} = h`, the measure weight.
    pub ref_weight: Vec<f64>,
}

impl FieldSet {
    fn with_capacity(n: usize) -> Self {
        Self {
            h: Vec::with_capacity(n),
            inv_h2: Vec::with_capacity(n),
            potential: Vec::with_capacity(n),
            ref_inv_h: Vec::with_capacity(n),
            ref_h: Vec::with_capacity(n),
            ref_weight: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, jet: CurvatureJet, u: f64) {
        let h = 1.0 - u * jet.kappa;
        self.h.push(h);
        self.inv_h2.push(1.0 / (h * h));
        self.potential.push(potential(jet, u));
        self.ref_inv_h.push(1.0 / h);
        self.ref_h.push(h);
        self.ref_weight.push(h);
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

/// Coefficient fields on a [`Grid`], evaluated pointwise at nodes and face midpoints.
///
/// * `nodes`: `n_s × (n_u - 1)`, indexed like the unknowns.
/// * `s_faces`: `n_s × (n_u - 1)`; entry `(i, j)` sits between columns `i` and `i + 1` (wrapping).
/// * `u_faces`: `n_s × n_u`; entry `i n_u + j` sits between rows `j` and `j + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFields {
    pub grid: Grid,
    pub nodes: FieldSet,
    pub s_faces: FieldSet,
    pub u_faces: FieldSet,
}

impl CoefficientFields {
    pub fn node(&self, i: usize, j: usize) -> usize {
        self.grid.index(i, j)
    }

    pub fn s_face(&self, i: usize, j: usize) -> usize {
        self.grid.index(i, j)
    }

    pub fn u_face(&self, i: usize, j: usize) -> usize {
        i * self.grid.n_u + j
    }
}

/// Samples `h`, `h⁻²`, `V` and the physical-reference weights on `grid`.
pub fn sample_fields(
    geometry: &WaveguideGeometry,
    segment: &SegmentSpec,
    grid: &Grid,
) -> Result<CoefficientFields, ModelError> {
    segment.validate()?;
    grid.check(geometry, segment)?;
    let curve = geometry.curve();
    let rows = grid.rows();
    let mut nodes = FieldSet::with_capacity(grid.unknowns());
    let mut s_faces = FieldSet::with_capacity(grid.unknowns());
    let mut u_faces = FieldSet::with_capacity(grid.n_s * grid.n_u);
    for i in 0..grid.n_s {
        let jet = curve.curvature_jet(grid.s_node(i));
        let face_jet = curve.curvature_jet(grid.s_face(i));
        for j in 1..=rows {
            nodes.push(jet, grid.u_node(j));
            s_faces.push(face_jet, grid.u_node(j));
        }
        for j in 0..grid.n_u {
            u_faces.push(jet, grid.u_face(j));
        }
    }
    Ok(CoefficientFields { grid: *grid, nodes, s_faces, u_faces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_from_angle_profile, TangentAngleSpec};

    fn curve_a(rho: f64) -> WaveguideGeometry {
        WaveguideGeometry::new(build_from_angle_profile(&TangentAngleSpec::sine(0.5)).unwrap(), rho).unwrap()
    }

    #[test]
    fn straight_strip_has_trivial_fields() {
        let g = WaveguideGeometry::new(ArcLengthCurve::straight_line(), 0.2).unwrap();
        let seg = SegmentSpec::periodic(2);
        let grid = Grid::for_segment(&g, &seg, 16, 8);
        let f = sample_fields(&g, &seg, &grid).unwrap();
        for set in [&f.nodes, &f.s_faces, &f.u_faces] {
            assert!(set.h.iter().all(|&v| v == 1.0));
            assert!(set.inv_h2.iter().all(|&v| v == 1.0));
            assert!(set.potential.iter().all(|&v| v == 0.0));
            assert!(set.ref_inv_h.iter().chain(&set.ref_h).chain(&set.ref_weight).all(|&v| v == 1.0));
        }
        assert_eq!(g.potential_at(0.3, 0.1).unwrap(), 0.0);
        assert_eq!(g.map_to_physical(0.3, 0.1).unwrap(), [0.3, 0.1]);
    }

    #[test]
    fn potential_on_the_curve_is_minus_quarter_kappa_squared() {
        let g = curve_a(0.15);
        for &s in &[0.0, 0.2, 0.71] {
            let k = g.curve().curvature(s);
            assert!((g.potential_at(s, 0.0).unwrap() + 0.25 * k * k).abs() < 1e-14);
        }
    }

    #[test]
    fn potential_matches_hand_composed_oracle() {
        // κ = εω cos ωs, κ' = -εω² sin ωs, κ'' = -εω³ cos ωs with ω = 2π/p;
        // composed in double precision by numpy: V(0, 0.1) = 10.246862913954741
        let g = curve_a(0.15);
        assert!((g.potential_at(0.0, 0.1).unwrap() - 10.246_862_913_954_741).abs() < 1e-10);
        assert_eq!(g.potential_at(0.0, 0.2), Err(ModelError::OutOfStrip { u: 0.2, rho: 0.15 }));
    }

    #[test]
    fn physical_map_at_the_curve_and_offset() {
        let g = curve_a(0.15);
        let x0 = g.curve().position(0.4);
        assert_eq!(g.map_to_physical(0.4, 0.0).unwrap(), x0);
        // θ(0) = 0, so ν(0) = (0, 1) and F(0, 0.15) = γ(0) + (0, 0.15)
        let p = g.map_to_physical(0.0, 0.15).unwrap();
        assert!(p[0].abs() < 1e-13 && (p[1] - 0.15).abs() < 1e-13);
    }

    #[test]
    fn h_extrema_follow_the_curvature_bound() {
        let g = curve_a(0.15);
        let seg = SegmentSpec::periodic(1);
        // an odd n_s puts a node at s = 0 where |κ| peaks; the extreme rows sit du inside ±ρ
        let grid = Grid::for_segment(&g, &seg, 65, 600);
        let f = sample_fields(&g, &seg, &grid).unwrap();
        let (lo, hi) = g.h_bounds();
        assert!((lo - 0.557_756_522_193_465).abs() < 1e-9 && (hi - 1.442_243_477_806_535).abs() < 1e-9);
        let min = f.nodes.h.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = f.nodes.h.iter().cloned().fold(0.0, f64::max);
        assert!(min >= lo && max <= hi);
        assert!((min - lo).abs() < 2e-3 && (max - hi).abs() < 2e-3, "{min} {max}");
    }

    #[test]
    fn mismatched_grid_is_rejected() {
        let g = curve_a(0.15);
        let grid = Grid::for_segment(&g, &SegmentSpec::periodic(2), 32, 8);
        assert_eq!(
            sample_fields(&g, &SegmentSpec::periodic(4), &grid).unwrap_err(),
            ModelError::InconsistentGrid("s-extent differs from pL")
        );
    }

    #[test]
    fn neumann_requires_symmetry() {
        let g = curve_a(0.15);
        assert!(g.is_reflection_symmetric());
        assert!(SegmentSpec::neumann(2, &g).is_ok());
        let unconfirmed = SegmentSpec { symmetry_confirmed: false, ..SegmentSpec::neumann(2, &g).unwrap() };
        assert_eq!(unconfirmed.validate(), Err(ModelError::NeumannWithoutSymmetry));

        let skew = TangentAngleSpec { fourier_sin: alloc::vec![0.3], fourier_cos: alloc::vec![0.2], ..Default::default() };
        let g = WaveguideGeometry::new(build_from_angle_profile(&skew).unwrap(), 0.1).unwrap();
        assert!(!g.is_reflection_symmetric());
        assert_eq!(SegmentSpec::neumann(1, &g), Err(ModelError::NeumannWithoutSymmetry));
    }

    #[test]
    fn inadmissible_width_is_rejected() {
        let curve = build_from_angle_profile(&TangentAngleSpec::sine(0.5)).unwrap();
        assert!(matches!(WaveguideGeometry::new(curve, 0.4), Err(ModelError::Inadmissible { .. })));
    }
}
