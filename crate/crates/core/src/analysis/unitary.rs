use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{AnalysisError, GridPolicy, Study};
use crate::assembly::ProblemKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryLevel {
    pub n_s: usize,
    pub n_u: usize,
    pub straightened: Vec<f64>,
    pub physical: Vec<f64>,
    /// `max_i |λ_i - μ_i| / |μ_i|`.
    pub max_rel_diff: f64,
}

/// Straightened operator against the Laplacian written in curvilinear
/// coordinates; the two are unitarily equivalent in the continuum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryReport {
    pub length: u32,
    pub levels: Vec<UnitaryLevel>,
    /// Coarse over fine `max_rel_diff` for the last two levels.
    pub reduction: Option<f64>,
}

impl Study<'_> {
    pub fn unitary_check(&self, periods: u32, policy: &GridPolicy, count: usize) -> Result<UnitaryReport, AnalysisError> {
        policy.validate()?;
        let count = count.max(2);
        let mut levels = Vec::with_capacity(policy.levels);
        for level in 0..policy.levels {
            let (n_s, n_u) = policy.dims(periods, level);
            let (_, a) = self.solve(ProblemKind::Straightened, periods, n_s, n_u, count)?;
            let (_, b) = self.solve(ProblemKind::PhysicalReference, periods, n_s, n_u, count)?;
            let straightened = a.values[..count].to_vec();
            let physical = b.values[..count].to_vec();
            let max_rel_diff =
                straightened.iter().zip(&physical).map(|(x, y)| (x - y).abs() / y.abs()).fold(0.0, f64::max);
            levels.push(UnitaryLevel { n_s, n_u, straightened, physical, max_rel_diff });
        }
        let reduction = match levels.len() {
            n if n >= 2 => Some(levels[n - 2].max_rel_diff / levels[n - 1].max_rel_diff),
            _ => None,
        };
        Ok(UnitaryReport { length: periods, levels, reduction })
    }
}
