//! Experiment configuration: one TOML file per experiment.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use waveguide_core::analysis::{GridPolicy, PotentialMode, DEFAULT_SLACK};
use waveguide_core::assembly::ProblemKind;
use waveguide_core::curve::TangentAngleSpec;
use waveguide_core::eigen::EigenRequest;
use waveguide_core::waveguide::EndCondition;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    CheckCurve,
    Spectrum,
    GapScaling,
    Compare,
    Verify,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::CheckCurve => "check-curve",
            ExperimentKind::Spectrum => "spectrum",
            ExperimentKind::GapScaling => "gap-scaling",
            ExperimentKind::Compare => "compare",
            ExperimentKind::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: ExperimentSection,
    pub curve: CurveConfig,
    pub waveguide: WaveguideSection,
    #[serde(default)]
    pub grid: GridPolicy,
    #[serde(default)]
    pub solver: EigenRequest,
    #[serde(default)]
    pub checks: ChecksSection,
    #[serde(default)]
    pub debug: DebugSection,
    #[serde(default)]
    pub export: ExportSection,
    /// Directory that relative sample paths are resolved against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<ExperimentKind>,
    pub output_dir: PathBuf,
    /// Operator solved by `spectrum`.
    pub problem: ProblemKind,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self { kind: None, output_dir: PathBuf::from("out"), problem: ProblemKind::Straightened }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveConfig {
    /// Tangent angle `θ(s) = offset + Σ a_k cos(2πks/p) + b_k sin(2πks/p)`.
    Angle {
        #[serde(default)]
        fourier_cos: Vec<f64>,
        #[serde(default)]
        fourier_sin: Vec<f64>,
        #[serde(default)]
        offset: f64,
        #[serde(default = "one")]
        period_hint: f64,
    },
    /// One period of `x,y` samples; the last sample is followed by the first shifted by `(1, 0)`.
    Samples { path: PathBuf },
    Straight,
}

fn one() -> f64 {
    1.0
}

impl CurveConfig {
    pub fn angle_spec(&self) -> Option<TangentAngleSpec> {
        match self {
            CurveConfig::Angle { fourier_cos, fourier_sin, offset, period_hint } => Some(TangentAngleSpec {
                fourier_cos: fourier_cos.clone(),
                fourier_sin: fourier_sin.clone(),
                offset: *offset,
                period_hint: *period_hint,
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideSection {
    pub rho: f64,
    pub lengths: Vec<u32>,
    #[serde(default)]
    pub end_bc: EndCondition,
    /// Must be set to use Neumann ends; the curve is then also tested for reflection symmetry.
    #[serde(default)]
    pub neumann_opt_in: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChecksSection {
    pub slack: f64,
}

impl Default for ChecksSection {
    fn default() -> Self {
        Self { slack: DEFAULT_SLACK }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DebugSection {
    /// Flips the sign of the curvature potential; `verify` must then fail.
    pub flip_potential_sign: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportSection {
    /// Curve, coefficient and eigenvector grids under `fields/`.
    pub fields: bool,
    /// Stiffness and mass in coordinate format under `matrices/`.
    pub matrices: bool,
}

impl Default for ExportSection {
    fn default() -> Self {
        Self { fields: true, matrices: false }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub grid_cells: Option<usize>,
    pub levels: Option<usize>,
    pub seed: Option<u64>,
    pub slack: Option<f64>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes to TOML")
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let mut config = Self::parse(&text)?;
        config.base_dir = path.parent().map(Path::to_path_buf);
        Ok(config)
    }

    /// CURVE-A: `θ(s) = 0.5 sin(2πs/p)`, `ρ = 0.15`, at small grids.
    pub fn default_suite() -> Self {
        Self {
            experiment: ExperimentSection { kind: Some(ExperimentKind::Verify), ..ExperimentSection::default() },
            curve: CurveConfig::Angle { fourier_cos: vec![], fourier_sin: vec![0.5], offset: 0.0, period_hint: 1.0 },
            waveguide: WaveguideSection { rho: 0.15, lengths: vec![2, 4], end_bc: EndCondition::Periodic, neumann_opt_in: false },
            grid: GridPolicy::new(32, 32, 2),
            solver: EigenRequest::default(),
            checks: ChecksSection::default(),
            debug: DebugSection::default(),
            export: ExportSection::default(),
            base_dir: None,
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.experiment.output_dir = out.clone();
        }
        if let Some(n) = o.grid_cells {
            self.grid.cells_per_period = n;
            self.grid.transverse_cells = n;
        }
        if let Some(l) = o.levels {
            self.grid.levels = l;
        }
        if let Some(s) = o.seed {
            self.solver.seed = s;
        }
        if let Some(s) = o.slack {
            self.checks.slack = s;
        }
    }

    pub fn potential_mode(&self) -> PotentialMode {
        if self.debug.flip_potential_sign {
            PotentialMode::Negated
        } else {
            PotentialMode::Standard
        }
    }

    pub fn samples_path(&self) -> Option<PathBuf> {
        match &self.curve {
            CurveConfig::Samples { path } if path.is_relative() => {
                Some(self.base_dir.as_deref().map_or_else(|| path.clone(), |d| d.join(path)))
            }
            CurveConfig::Samples { path } => Some(path.clone()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |m: &str| Err(CliError::Validation(m.to_string()));
        let w = &self.waveguide;
        if !(w.rho > 0.0 && w.rho.is_finite()) {
            return fail("waveguide.rho must be a positive number");
        }
        if w.lengths.is_empty() {
            return fail("waveguide.lengths must list at least one length");
        }
        if w.lengths.contains(&0) {
            return fail("waveguide.lengths must be positive integers");
        }
        if w.end_bc == EndCondition::Neumann && !w.neumann_opt_in {
            return fail("Neumann ends need waveguide.neumann_opt_in = true");
        }
        if !(0.0..1.0).contains(&self.checks.slack) {
            return fail("checks.slack must lie in [0, 1)");
        }
        self.grid.validate().map_err(|e| CliError::Validation(e.to_string()))?;
        self.solver.validate(usize::MAX).map_err(|e| CliError::Validation(e.to_string()))?;
        if let Some(spec) = self.curve.angle_spec() {
            spec.validate()?;
        }
        if let Some(path) = self.samples_path() {
            if !path.is_file() {
                return Err(CliError::Validation(format!("sample file {} does not exist", path.display())));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EXAMPLE: &str = r#"
[experiment]
kind = "gap-scaling"
output_dir = "runs/curve-a"

[curve]
type = "angle"
fourier_sin = [0.5]

[waveguide]
rho = 0.15
lengths = [4, 8, 16]

[grid]
cells_per_period = 48
transverse_cells = 48
levels = 2

[solver]
k = 2
tol = 1e-10
seed = 7
"#;

    #[test]
    fn parses_the_documented_example() {
        let c = ExperimentConfig::parse(EXAMPLE).unwrap();
        assert_eq!(c.experiment.kind, Some(ExperimentKind::GapScaling));
        assert_eq!(c.curve.angle_spec().unwrap(), TangentAngleSpec::sine(0.5));
        assert_eq!(c.waveguide.lengths, vec![4, 8, 16]);
        assert_eq!(c.solver.seed, 7);
        assert_eq!(c.solver.max_iter, EigenRequest::default().max_iter);
        assert_eq!(c.checks.slack, 0.05);
        c.validate().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = EXAMPLE.replace("rho = 0.15", "rho = 0.15\nwidth = 2");
        assert!(matches!(ExperimentConfig::parse(&text), Err(CliError::Validation(_))));
    }

    #[test]
    fn validation_failures() {
        let base = ExperimentConfig::parse(EXAMPLE).unwrap();
        let mut c = base.clone();
        c.waveguide.lengths.clear();
        assert!(c.validate().is_err());
        let mut c = base.clone();
        c.waveguide.end_bc = EndCondition::Neumann;
        assert!(c.validate().is_err());
        c.waveguide.neumann_opt_in = true;
        assert!(c.validate().is_ok());
        let mut c = base.clone();
        c.curve = CurveConfig::Samples { path: "no/such/file.csv".into() };
        assert!(c.validate().is_err());
        let mut c = base;
        c.apply(&Overrides { grid_cells: Some(33), ..Overrides::default() });
        assert!(c.validate().is_err());
    }

    #[test]
    fn overrides_take_precedence() {
        let mut c = ExperimentConfig::parse(EXAMPLE).unwrap();
        c.apply(&Overrides {
            out: Some("elsewhere".into()),
            grid_cells: Some(16),
            levels: Some(3),
            seed: Some(99),
            slack: Some(0.1),
        });
        assert_eq!(c.experiment.output_dir, PathBuf::from("elsewhere"));
        assert_eq!(c.grid, GridPolicy::new(16, 16, 3));
        assert_eq!((c.solver.seed, c.checks.slack), (99, 0.1));
    }

    fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
        (
            prop::collection::vec(-1.0f64..1.0, 0..3),
            prop::collection::vec(-1.0f64..1.0, 0..3),
            0.01f64..0.5,
            prop::collection::vec(1u32..32, 1..4),
            (1usize..20, 2usize..20, 1usize..4),
            (2usize..6, 0u64..i64::MAX as u64, 0.0f64..0.5),
            any::<bool>(),
        )
            .prop_map(|(cos, sin, rho, lengths, (c, t, l), (k, seed, slack), flip)| {
                let mut config = ExperimentConfig::default_suite();
                config.curve = CurveConfig::Angle { fourier_cos: cos, fourier_sin: sin, offset: 0.0, period_hint: 1.0 };
                config.waveguide.rho = rho;
                config.waveguide.lengths = lengths;
                config.grid = GridPolicy::new(2 * c, 2 * t, l);
                config.solver.k = k;
                config.solver.seed = seed;
                config.checks.slack = slack;
                config.debug.flip_potential_sign = flip;
                config
            })
    }

    proptest! {
        #[test]
        fn serialization_round_trips(config in arb_config()) {
            let text = config.to_toml();
            let parsed = ExperimentConfig::parse(&text).unwrap();
            prop_assert_eq!(&parsed, &config);
            prop_assert_eq!(parsed.to_toml(), text);
        }
    }
}
