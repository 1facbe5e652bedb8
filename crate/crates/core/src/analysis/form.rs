use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{check_positive, normalize_l2, AnalysisError, GridPolicy, Study};
use crate::assembly::ProblemKind;
use crate::math::{cos, sin, PI};
use crate::waveguide::{CoefficientFields, EndCondition};

/// Differences below this are treated as round-off when forming ratios.
pub const FORM_NOISE_FLOOR: f64 = 1e-10;

/// Test functions `φ(s, u)` on `Λ_L`, periodic in `s` with period `pL`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    Constant,
    /// `sin(2πs/pL)`
    SinS,
    /// `cos(2πs/pL)`
    CosS,
    /// `cos(πu/2ρ) sin(2πs/pL)`
    CosUSinS,
    /// `sin(2π n s/pL + phase) cos(π m u/2ρ)`
    Trig { s_mode: u32, u_mode: u32, phase: f64 },
}

impl TestFunction {
    pub const DEFAULT_SUITE: [TestFunction; 4] =
        [TestFunction::Constant, TestFunction::SinS, TestFunction::CosS, TestFunction::CosUSinS];

    pub fn eval(&self, s: f64, u: f64, length: f64, rho: f64) -> f64 {
        let w = 2.0 * PI * s / length;
        match *self {
            TestFunction::Constant => 1.0,
            TestFunction::SinS => sin(w),
            TestFunction::CosS => cos(w),
            TestFunction::CosUSinS => cos(PI * u / (2.0 * rho)) * sin(w),
            TestFunction::Trig { s_mode, u_mode, phase } => {
                sin(s_mode as f64 * w + phase) * cos(u_mode as f64 * PI * u / (2.0 * rho))
            }
        }
    }

    pub fn name(&self) -> String {
        match *self {
            TestFunction::Constant => "1".into(),
            TestFunction::SinS => "sin(2 pi s/pL)".into(),
            TestFunction::CosS => "cos(2 pi s/pL)".into(),
            TestFunction::CosUSinS => "cos(pi u/2 rho) sin(2 pi s/pL)".into(),
            TestFunction::Trig { s_mode, u_mode, phase } => {
                alloc::format!("sin({s_mode}*2 pi s/pL + {phase}) cos({u_mode}*pi u/2 rho)")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormValues {
    /// `Σ_faces a_face |Dφ|² ψ̄² ds du` with `ψ̄` the face mean of `ψ₁`.
    pub form_value: f64,
    /// `⟨φψ₁, (A - E₁)φψ₁⟩ ds du`.
    pub operator_value: f64,
    pub abs_difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormEntry {
    pub function: TestFunction,
    pub name: String,
    /// Coarse, fine.
    pub levels: Vec<FormValues>,
    /// `abs_difference` coarse over fine; `None` at the round-off floor.
    pub refinement_ratio: Option<f64>,
    /// `form_value / ∫|φ - c|² ψ₁²` on the fine grid, with `c` making `φ - c`
    /// orthogonal to `ψ₁²`; `None` for constants.
    pub rayleigh_quotient: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormCheckReport {
    pub length: u32,
    pub grids: Vec<(usize, usize)>,
    pub e1: Vec<f64>,
    /// `E₂ - E₁` on the fine grid.
    pub gap: f64,
    pub entries: Vec<FormEntry>,
}

struct Sampled<'a> {
    fields: &'a CoefficientFields,
    psi: Vec<f64>,
    end_bc: EndCondition,
}

impl Sampled<'_> {
    fn phi(&self, f: &TestFunction, i: usize, j: usize) -> f64 {
        let g = &self.fields.grid;
        f.eval(g.s_node(i), g.u_node(j), g.length(), g.rho)
    }

    /// `ψ₁` at `(i, j)` including the Dirichlet rows.
    fn psi_at(&self, i: usize, j: usize) -> f64 {
        let g = &self.fields.grid;
        if j == 0 || j == g.n_u {
            0.0
        } else {
            self.psi[g.index(i, j)]
        }
    }

    fn form_value(&self, f: &TestFunction) -> f64 {
        let g = &self.fields.grid;
        let mut total = 0.0;
        for i in 0..g.n_s {
            let next = match self.end_bc {
                EndCondition::Periodic => Some((i + 1) % g.n_s),
                EndCondition::Neumann => (i + 1 < g.n_s).then_some(i + 1),
            };
            if let Some(k) = next.filter(|&k| k != i) {
                for j in 1..g.n_u {
                    let d = (self.phi(f, k, j) - self.phi(f, i, j)) / g.ds;
                    let m = 0.5 * (self.psi_at(i, j) + self.psi_at(k, j));
                    total += self.fields.s_faces.inv_h2[self.fields.s_face(i, j)] * d * d * m * m;
                }
            }
            for j in 0..g.n_u {
                let d = (self.phi(f, i, j + 1) - self.phi(f, i, j)) / g.du;
                let m = 0.5 * (self.psi_at(i, j) + self.psi_at(i, j + 1));
                total += d * d * m * m;
            }
        }
        total * g.ds * g.du
    }
}

impl Study<'_> {
    /// Compares `⟨φψ₁, (H - E₁)φψ₁⟩` with the weighted Dirichlet form of `φ`
    /// on the last two levels of `policy`.
    pub fn form_representation_check(
        &self,
        periods: u32,
        policy: &GridPolicy,
        functions: &[TestFunction],
    ) -> Result<FormCheckReport, AnalysisError> {
        policy.validate()?;
        if policy.levels < 2 {
            return Err(AnalysisError::InvalidPolicy("the form check needs at least two levels"));
        }
        let segment = self.segment(periods)?;
        let mut grids = Vec::new();
        let mut e1s = Vec::new();
        let mut values: Vec<Vec<FormValues>> = functions.iter().map(|_| Vec::new()).collect();
        let mut quotients = Vec::new();
        let mut gap = 0.0;
        for level in policy.levels - 2..policy.levels {
            let (n_s, n_u) = policy.dims(periods, level);
            let fields = self.fields(&segment, n_s, n_u)?;
            let problem = self.assemble(ProblemKind::Straightened, &segment, &fields)?;
            let result = self.eigenpairs(&problem, 2)?;
            let (e1, e2) = (result.values[0], result.values[1]);
            let mut psi = result.vectors[0].clone();
            check_positive(ProblemKind::Straightened, &psi)?;
            let cell = fields.grid.ds * fields.grid.du;
            normalize_l2(&mut psi, cell);
            let sampled = Sampled { fields: &fields, psi, end_bc: segment.end_bc };
            let g = fields.grid;
            quotients.clear();
            for (fi, f) in functions.iter().enumerate() {
                let phi: Vec<f64> =
                    (0..g.n_s).flat_map(|i| (1..g.n_u).map(move |j| (i, j))).map(|(i, j)| sampled.phi(f, i, j)).collect();
                let v: Vec<f64> = phi.iter().zip(&sampled.psi).map(|(a, b)| a * b).collect();
                let av = problem.stiffness.mul_vec(&v);
                let operator_value =
                    cell * v.iter().zip(&av).map(|(x, ax)| x * ax - e1 * x * x).sum::<f64>();
                let form_value = sampled.form_value(f);
                values[fi].push(FormValues {
                    form_value,
                    operator_value,
                    abs_difference: (form_value - operator_value).abs(),
                });
                let w: f64 = sampled.psi.iter().map(|p| p * p).sum();
                let c = phi.iter().zip(&sampled.psi).map(|(a, p)| a * p * p).sum::<f64>() / w;
                let spread = cell * phi.iter().zip(&sampled.psi).map(|(a, p)| (a - c) * (a - c) * p * p).sum::<f64>();
                quotients.push((spread > 1e-12 * cell * w).then(|| form_value / spread));
            }
            grids.push((n_s, n_u));
            e1s.push(e1);
            gap = e2 - e1;
        }
        let entries = functions
            .iter()
            .zip(values)
            .zip(quotients.iter())
            .map(|((f, levels), &rayleigh_quotient)| {
                let (c, fine) = (levels[0].abs_difference, levels[1].abs_difference);
                FormEntry {
                    function: *f,
                    name: f.name(),
                    refinement_ratio: (c > FORM_NOISE_FLOOR && fine > 0.0).then(|| c / fine),
                    levels,
                    rayleigh_quotient,
                }
            })
            .collect();
        Ok(FormCheckReport { length: periods, grids, e1: e1s, gap, entries })
    }
}
