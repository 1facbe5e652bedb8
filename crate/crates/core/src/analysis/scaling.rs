use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{richardson, AnalysisError, GridPolicy, Study};
use crate::assembly::ProblemKind;
use crate::math::{exp, ln};

/// Lowest two eigenvalues on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridLevel {
    pub n_s: usize,
    pub n_u: usize,
    pub ds: f64,
    pub du: f64,
    pub e1: f64,
    pub e2: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub length: u32,
    /// Coarse to fine.
    pub levels: Vec<GridLevel>,
    pub extrapolated_e1: f64,
    pub extrapolated_e2: f64,
    pub extrapolated_gap: f64,
    pub gap_times_l2: f64,
}

impl GapReport {
    fn from_levels(length: u32, levels: Vec<GridLevel>) -> Self {
        let fine = levels[levels.len() - 1];
        let (e1, e2) = match levels.len() {
            1 => (fine.e1, fine.e2),
            n => (richardson(levels[n - 2].e1, fine.e1), richardson(levels[n - 2].e2, fine.e2)),
        };
        let gap = e2 - e1;
        let l = length as f64;
        Self { length, levels, extrapolated_e1: e1, extrapolated_e2: e2, extrapolated_gap: gap, gap_times_l2: gap * l * l }
    }
}

/// Empirical constant of the `L⁻²` law over lengths `L ≥ 4`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub lengths: Vec<u32>,
    /// Geometric mean of `gap · L²`.
    pub c_estimate: f64,
    /// `max / min` of `gap · L²`.
    pub spread: f64,
    /// Least-squares slope of `ln gap` against `ln L`.
    pub slope: f64,
    /// `gap · L²` moves in one direction with non-shrinking relative steps
    /// (needs at least three lengths).
    pub monotone_divergence: bool,
}

pub const SCALING_MIN_LENGTH: u32 = 4;

pub fn scaling_fit(reports: &[GapReport]) -> Result<ScalingFit, AnalysisError> {
    let mut used: Vec<&GapReport> = reports.iter().filter(|r| r.length >= SCALING_MIN_LENGTH).collect();
    if used.len() < 2 {
        return Err(AnalysisError::InsufficientData { needed: 2, got: used.len() });
    }
    used.sort_by_key(|r| r.length);
    let values: Vec<f64> = used.iter().map(|r| r.gap_times_l2).collect();
    let n = values.len() as f64;
    let c_estimate = exp(values.iter().map(|&v| ln(v)).sum::<f64>() / n);
    let (lo, hi) = values.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let xs: Vec<f64> = used.iter().map(|r| ln(r.length as f64)).collect();
    let ys: Vec<f64> = used.iter().map(|r| ln(r.extrapolated_gap)).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let steps: Vec<f64> = values.windows(2).map(|w| ln(w[1] / w[0])).collect();
    let monotone_divergence = steps.len() >= 2
        && (steps.iter().all(|&d| d > 0.0) || steps.iter().all(|&d| d < 0.0))
        && steps.windows(2).all(|w| w[1].abs() >= w[0].abs());
    Ok(ScalingFit {
        lengths: used.iter().map(|r| r.length).collect(),
        c_estimate,
        spread: hi / lo,
        slope: sxy / sxx,
        monotone_divergence,
    })
}

impl Study<'_> {
    /// Lowest two eigenvalues of `kind` on `Λ_periods` at every level of `policy`.
    pub fn levels(&self, kind: ProblemKind, periods: u32, policy: &GridPolicy) -> Result<Vec<GridLevel>, AnalysisError> {
        policy.validate()?;
        (0..policy.levels)
            .map(|level| {
                let (n_s, n_u) = policy.dims(periods, level);
                let (problem, r) = self.solve(kind, periods, n_s, n_u, 2)?;
                Ok(GridLevel {
                    n_s,
                    n_u,
                    ds: problem.grid.ds,
                    du: problem.grid.du,
                    e1: r.values[0],
                    e2: r.values[1],
                    iterations: r.iterations,
                })
            })
            .collect()
    }

    /// Richardson-extrapolated gap of `kind` on `Λ_periods`.
    pub fn gap_report(&self, kind: ProblemKind, periods: u32, policy: &GridPolicy) -> Result<GapReport, AnalysisError> {
        Ok(GapReport::from_levels(periods, self.levels(kind, periods, policy)?))
    }

    /// Straightened-operator gap reports for each length, in input order.
    pub fn gap_vs_length(&self, lengths: &[u32], policy: &GridPolicy) -> Result<Vec<GapReport>, AnalysisError> {
        if policy.levels < 2 {
            return Err(AnalysisError::InvalidPolicy("gap extrapolation needs at least two levels"));
        }
        lengths.iter().map(|&l| self.gap_report(ProblemKind::Straightened, l, policy)).collect()
    }
}
