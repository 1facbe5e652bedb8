use serde::{Deserialize, Serialize};

use super::{max_abs, AnalysisError, GridPolicy, Study};
use crate::assembly::ProblemKind;
use crate::waveguide::{CoefficientFields, EndCondition, SegmentSpec};

pub const PERIODICITY_ENERGY_TOL: f64 = 1e-6;
pub const PERIODICITY_CELL_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityReport {
    pub length: u32,
    pub n_s_per_period: usize,
    pub n_u: usize,
    pub e1_single: f64,
    pub e1_segment: f64,
    /// `|E_{1,L} - E_{1,1}| / E_{1,1}`.
    pub energy_rel_diff: f64,
    /// Scalar `α` minimizing `‖ψ_L - α Tψ_1‖` over the whole segment.
    pub scale: f64,
    /// Largest per-cell `max|ψ_L - α Tψ_1| / max|ψ_L|`.
    pub max_cell_deviation: f64,
    pub passed: bool,
}

impl Study<'_> {
    /// Compares the ground state on `Λ_periods` with the periodic continuation
    /// of the one on `Λ_1`, both at the base level of `policy`.
    pub fn periodicity_check(&self, periods: u32, policy: &GridPolicy) -> Result<PeriodicityReport, AnalysisError> {
        policy.validate()?;
        let single_seg = SegmentSpec::periodic(1);
        let seg = SegmentSpec::periodic(periods);
        let (c, n_u) = policy.dims(1, 0);
        let single = self.fields(&single_seg, c, n_u)?;
        let many = self.fields(&seg, c * periods as usize, n_u)?;
        self.periodicity_from_fields(&single, &many, periods)
    }

    /// [`Study::periodicity_check`] on caller-supplied fields.
    ///
    /// `single` must cover one period and `many` `periods` periods with the
    /// same `ds`, `du` and an even number of columns per period.
    pub fn periodicity_from_fields(
        &self,
        single: &CoefficientFields,
        many: &CoefficientFields,
        periods: u32,
    ) -> Result<PeriodicityReport, AnalysisError> {
        let c = single.grid.n_s;
        let rows = single.grid.rows();
        if c % 2 != 0 || many.grid.n_s != c * periods as usize || many.grid.n_u != single.grid.n_u {
            return Err(AnalysisError::InvalidPolicy("segment grid must repeat the one-period grid"));
        }
        let study = self.with_end_condition(EndCondition::Periodic);
        let p1 = study.assemble(ProblemKind::Straightened, &SegmentSpec::periodic(1), single)?;
        let pl = study.assemble(ProblemKind::Straightened, &SegmentSpec::periodic(periods), many)?;
        let r1 = study.eigenpairs(&p1, 2)?;
        let rl = study.eigenpairs(&pl, 2)?;
        let (psi1, psil) = (&r1.vectors[0], &rl.vectors[0]);

        // Both grids are centred at s = 0, so column i of the segment sits over
        // column i - c(L-1)/2 (mod c) of the single period.
        let offset = c * (periods as usize - 1) / 2;
        let source = |i: usize| (i + c * periods as usize - offset) % c;
        let translated = |i: usize, j: usize| psi1[source(i) * rows + j];
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..many.grid.n_s {
            for j in 0..rows {
                let t = translated(i, j);
                num += psil[i * rows + j] * t;
                den += t * t;
            }
        }
        let scale = num / den;
        let mut worst = 0.0_f64;
        for cell in 0..periods as usize {
            let block = cell * c * rows..(cell + 1) * c * rows;
            let peak = max_abs(psil[block.clone()].iter().copied());
            let dev = max_abs(block.map(|k| psil[k] - scale * translated(k / rows, k % rows)));
            worst = worst.max(dev / peak);
        }
        let (e1, el) = (r1.values[0], rl.values[0]);
        let energy_rel_diff = (el - e1).abs() / e1.abs();
        Ok(PeriodicityReport {
            length: periods,
            n_s_per_period: c,
            n_u: single.grid.n_u,
            e1_single: e1,
            e1_segment: el,
            energy_rel_diff,
            scale,
            max_cell_deviation: worst,
            passed: energy_rel_diff <= PERIODICITY_ENERGY_TOL && worst <= PERIODICITY_CELL_TOL,
        })
    }
}
