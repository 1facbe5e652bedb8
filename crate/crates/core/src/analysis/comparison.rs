use serde::{Deserialize, Serialize};

use super::{check_positive, richardson, AnalysisError, GridPolicy, Study};
use crate::assembly::ProblemKind;

pub const DEFAULT_SLACK: f64 = 0.05;

/// Extrema of `ψ̃₁ / ψ₁` (comparison over straightened ground state) on `Λ_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRatios {
    pub n_s: usize,
    pub n_u: usize,
    pub a_minus: f64,
    pub a_plus: f64,
    pub interior_min: f64,
    pub interior_max: f64,
    /// Quotients of one-sided normal derivatives at `u = ±ρ`.
    pub boundary_min: f64,
    pub boundary_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub length: u32,
    pub a_minus: f64,
    pub a_plus: f64,
    pub gap_straightened: f64,
    pub gap_comparison: f64,
    /// `(a₋/a₊)² · gap_comparison`.
    pub lower: f64,
    /// `(a₊/a₋)² · gap_comparison`.
    pub upper: f64,
    pub slack: f64,
    /// Smallest slack for which the sandwich would hold.
    pub slack_needed: f64,
    pub sandwich_ok: bool,
    pub comparison_gap_times_l2: f64,
}

impl Study<'_> {
    /// `a₋ = min ψ̃₁/ψ₁` and `a₊ = max ψ̃₁/ψ₁` on one period with an `n_s × n_u`
    /// grid, both vectors normalized in `L²`. At the Dirichlet rows the ratio is
    /// continued by the quotient of second-order one-sided derivatives.
    pub fn comparison_ratios(&self, n_s: usize, n_u: usize) -> Result<ComparisonRatios, AnalysisError> {
        if n_u < 3 {
            return Err(AnalysisError::InvalidPolicy("boundary quotients need at least 3 transverse cells"));
        }
        let (_, straight) = self.solve(ProblemKind::Straightened, 1, n_s, n_u, 2)?;
        let (_, comparison) = self.solve(ProblemKind::Comparison, 1, n_s, n_u, 2)?;
        let (psi, tilde) = (&straight.vectors[0], &comparison.vectors[0]);
        check_positive(ProblemKind::Straightened, psi)?;
        check_positive(ProblemKind::Comparison, tilde)?;
        let scale = {
            let n: f64 = psi.iter().map(|x| x * x).sum();
            let m: f64 = tilde.iter().map(|x| x * x).sum();
            crate::math::sqrt(n / m)
        };
        let rows = n_u - 1;
        let (mut imin, mut imax) = (f64::INFINITY, 0.0_f64);
        for (a, b) in psi.iter().zip(tilde) {
            let r = scale * b / a;
            imin = imin.min(r);
            imax = imax.max(r);
        }
        let (mut bmin, mut bmax) = (f64::INFINITY, 0.0_f64);
        for i in 0..n_s {
            let col = |v: &[f64], j: usize| v[i * rows + j];
            for (first, second) in [(0, 1), (rows - 1, rows - 2)] {
                let d = 4.0 * col(psi, first) - col(psi, second);
                let dt = 4.0 * col(tilde, first) - col(tilde, second);
                if d <= 0.0 || dt <= 0.0 {
                    return Err(AnalysisError::GroundStateSignFailure {
                        kind: if d <= 0.0 { ProblemKind::Straightened } else { ProblemKind::Comparison },
                    });
                }
                let r = scale * dt / d;
                bmin = bmin.min(r);
                bmax = bmax.max(r);
            }
        }
        Ok(ComparisonRatios {
            n_s,
            n_u,
            a_minus: imin.min(bmin),
            a_plus: imax.max(bmax),
            interior_min: imin,
            interior_max: imax,
            boundary_min: bmin,
            boundary_max: bmax,
        })
    }

    /// Checks `(a₋/a₊)² G̃ (1 - slack) ≤ G ≤ (a₊/a₋)² G̃ (1 + slack)` for the
    /// straightened gap `G` and comparison gap `G̃` on `Λ_periods`.
    ///
    /// Gaps are extrapolated over the last two levels of `policy` (or taken
    /// from the single level); `a±` come from the finest per-period grid.
    pub fn sandwich_check(&self, periods: u32, policy: &GridPolicy, slack: f64) -> Result<ComparisonReport, AnalysisError> {
        policy.validate()?;
        let gap = |kind| -> Result<f64, AnalysisError> {
            let levels = self.levels(kind, periods, policy)?;
            let n = levels.len();
            Ok(match n {
                1 => levels[0].e2 - levels[0].e1,
                _ => richardson(levels[n - 2].e2 - levels[n - 2].e1, levels[n - 1].e2 - levels[n - 1].e1),
            })
        };
        let g = gap(ProblemKind::Straightened)?;
        let gt = gap(ProblemKind::Comparison)?;
        let (n_s, n_u) = policy.dims(1, policy.finest());
        let ratios = self.comparison_ratios(n_s, n_u)?;
        let q = (ratios.a_minus / ratios.a_plus) * (ratios.a_minus / ratios.a_plus);
        let (lower, upper) = (q * gt, gt / q);
        let slack_needed = (1.0 - g / lower).max(g / upper - 1.0).max(0.0);
        let l = periods as f64;
        Ok(ComparisonReport {
            length: periods,
            a_minus: ratios.a_minus,
            a_plus: ratios.a_plus,
            gap_straightened: g,
            gap_comparison: gt,
            lower,
            upper,
            slack,
            slack_needed,
            sandwich_ok: lower * (1.0 - slack) <= g && g <= upper * (1.0 + slack),
            comparison_gap_times_l2: gt * l * l,
        })
    }
}
