//! Experiment configuration files.
//!
//! A config is a TOML document with these keys (unknown keys are rejected):
//!
//! ```toml
//! experiment = "fig6"                      # fig1..fig7 or custom
//! r_grid = { start = 0.0, stop = 1.5, step = 0.05 }   # or a list
//! nth_grid = [0.0, 0.05, 0.1, 0.15]        # thermal occupations, nth1 = nth2
//! input = { kind = "coherent", beta_re = 0.0, beta_im = 0.0 }  # or a list of inputs
//! families = ["twin_beam", "squeezed_bell", "squeezed_cat"]
//! quadrature_order = 64
//! output = "fig6.csv"
//! ```
//!
//! Every key except `experiment` has a recipe default; `custom` requires
//! `r_grid`.

use std::fmt;
use std::path::{Path, PathBuf};

use cvtele_core::{FamilyKind, InputSpec};
use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::CliError;

pub const MIN_QUADRATURE_ORDER: usize = 16;
pub const DEFAULT_QUADRATURE_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Custom,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Fig1,
        Experiment::Fig2,
        Experiment::Fig3,
        Experiment::Fig4,
        Experiment::Fig5,
        Experiment::Fig6,
        Experiment::Fig7,
        Experiment::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2 => "fig2",
            Experiment::Fig3 => "fig3",
            Experiment::Fig4 => "fig4",
            Experiment::Fig5 => "fig5",
            Experiment::Fig6 => "fig6",
            Experiment::Fig7 => "fig7",
            Experiment::Custom => "custom",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Experiment::Fig1 => "optimal fidelity vs r: twin beam, squeezed Bell, SSF; coherent and single-photon inputs; s~ column",
            Experiment::Fig2 => "von Neumann entropy at the fig1 optima (SSF as truncated twin beam at s~)",
            Experiment::Fig3 => "non-Gaussianity d_nG and squeezed-vacuum affinity G at the fig1 optima (SSF at s~)",
            Experiment::Fig4 => "optimal fidelity vs r for coherent input: twin beam, squeezed Bell, squeezed cat (gamma~ in params)",
            Experiment::Fig5 => "entropy, d_nG and G for the optimized squeezed cat, with squeezed Bell for comparison",
            Experiment::Fig6 => "optimal fidelity with thermal noise nth1 = nth2 = nth: twin beam, squeezed Bell, squeezed cat",
            Experiment::Fig7 => "classical threshold nth_cls(r) where F_opt = 1/2: twin beam, squeezed Bell, squeezed cat",
            Experiment::Custom => "optimal fidelity and every diagnostic over user-supplied grids, families and inputs",
        }
    }

    fn default_families(self) -> Vec<FamilyKind> {
        use FamilyKind::*;
        match self {
            Experiment::Fig1 | Experiment::Fig2 | Experiment::Fig3 => vec![TwinBeam, SqueezedBell, Ssf],
            Experiment::Fig4 | Experiment::Fig6 | Experiment::Fig7 => vec![TwinBeam, SqueezedBell, SqueezedCat],
            Experiment::Fig5 => vec![SqueezedCat, SqueezedBell],
            Experiment::Custom => FamilyKind::ALL.to_vec(),
        }
    }

    fn default_inputs(self) -> Vec<InputSpec> {
        let coherent = InputSpec::coherent(C64::new(0.0, 0.0));
        match self {
            Experiment::Fig1 | Experiment::Fig2 | Experiment::Fig3 => vec![coherent, InputSpec::FockOne],
            _ => vec![coherent],
        }
    }

    fn default_nth_grid(self) -> Vec<f64> {
        match self {
            Experiment::Fig6 => vec![0.0, 0.05, 0.10, 0.15],
            _ => vec![0.0],
        }
    }

    /// Recipes whose rows are pure-state diagnostics or thresholds.
    fn allows_nth_grid(self) -> bool {
        !matches!(self, Experiment::Fig2 | Experiment::Fig3 | Experiment::Fig5 | Experiment::Fig7)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A grid written either as an explicit list or as an inclusive range.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum GridSpec {
    List(Vec<f64>),
    Range(RangeSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RangeSpec {
    start: f64,
    stop: f64,
    step: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum InputsSpec {
    One(InputSpec),
    Many(Vec<InputSpec>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Experiment,
    r_grid: Option<GridSpec>,
    nth_grid: Option<GridSpec>,
    input: Option<InputsSpec>,
    families: Option<Vec<FamilyKind>>,
    quadrature_order: Option<usize>,
    output: Option<PathBuf>,
}

/// A parsed, defaulted and validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub r_grid: Vec<f64>,
    pub nth_grid: Vec<f64>,
    pub inputs: Vec<InputSpec>,
    pub families: Vec<FamilyKind>,
    pub quadrature_order: usize,
    pub output: PathBuf,
}

fn invalid(field: &str, msg: impl fmt::Display) -> CliError {
    CliError::Config(format!("`{field}`: {msg}"))
}

/// Range grids are rounded to 12 decimals so that `0.05 * 3` prints as `0.15`.
fn expand_grid(field: &str, spec: GridSpec) -> Result<Vec<f64>, CliError> {
    let values = match spec {
        GridSpec::List(v) => v,
        GridSpec::Range(RangeSpec { start, stop, step }) => {
            if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0) {
                return Err(invalid(field, "range needs finite start/stop and a positive step"));
            }
            let span = (stop - start) / step;
            let n = span.round();
            if n < 0.0 || (span - n).abs() > 1e-9 {
                return Err(invalid(field, format!("stop - start = {} is not a nonnegative multiple of step {step}", stop - start)));
            }
            (0..=n as usize).map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12).collect()
        }
    };
    check_grid(field, &values)?;
    Ok(values)
}

fn check_grid(field: &str, values: &[f64]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(invalid(field, "grid is empty"));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(invalid(field, format!("non-finite value {v}")));
    }
    if let Some(w) = values.windows(2).find(|w| w[1] <= w[0]) {
        return Err(invalid(field, format!("grid must be strictly increasing, found {} then {}", w[0], w[1])));
    }
    if let Some(v) = values.iter().find(|&&v| v < 0.0) {
        return Err(invalid(field, format!("values must be nonnegative, found {v}")));
    }
    Ok(())
}

impl ExperimentConfig {
    /// Parses a TOML document. `base` resolves a relative `output` path.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let experiment = raw.experiment;

        let r_grid = match raw.r_grid {
            Some(g) => expand_grid("r_grid", g)?,
            None if experiment == Experiment::Custom => {
                return Err(invalid("r_grid", "missing field; required for custom experiments"))
            }
            None => expand_grid("r_grid", GridSpec::Range(RangeSpec { start: 0.0, stop: 1.5, step: 0.05 }))?,
        };
        let nth_grid = match raw.nth_grid {
            Some(_) if !experiment.allows_nth_grid() => {
                return Err(invalid("nth_grid", format!("{experiment} has no thermal axis")))
            }
            Some(g) => expand_grid("nth_grid", g)?,
            None => experiment.default_nth_grid(),
        };
        let inputs = match raw.input {
            Some(InputsSpec::One(i)) => vec![i],
            Some(InputsSpec::Many(v)) if v.is_empty() => return Err(invalid("input", "list is empty")),
            Some(InputsSpec::Many(v)) => v,
            None => experiment.default_inputs(),
        };
        let families = match raw.families {
            Some(f) if f.is_empty() => return Err(invalid("families", "list is empty")),
            Some(f) => f,
            None => experiment.default_families(),
        };
        for (i, f) in families.iter().enumerate() {
            if families[..i].contains(f) {
                return Err(invalid("families", format!("{f} listed twice")));
            }
        }
        for (i, inp) in inputs.iter().enumerate() {
            if inputs[..i].contains(inp) {
                return Err(invalid("input", format!("{} input listed twice", inp.name())));
            }
        }
        if families.contains(&FamilyKind::SqueezedCat) && inputs.contains(&InputSpec::FockOne) {
            return Err(invalid("families", "squeezed_cat is defined for coherent inputs only; drop fock1 or the cat"));
        }
        if experiment == Experiment::Fig7 && inputs.contains(&InputSpec::FockOne) {
            return Err(invalid("input", "thresholds are defined for coherent inputs"));
        }
        let quadrature_order = raw.quadrature_order.unwrap_or(DEFAULT_QUADRATURE_ORDER);
        if quadrature_order < MIN_QUADRATURE_ORDER {
            return Err(invalid("quadrature_order", format!("{quadrature_order} is below the minimum {MIN_QUADRATURE_ORDER}")));
        }
        let output = raw.output.unwrap_or_else(|| PathBuf::from(format!("{experiment}.csv")));
        let output = if output.is_absolute() { output } else { base.join(output) };

        Ok(ExperimentConfig { experiment, r_grid, nth_grid, inputs, families, quadrature_order, output })
    }
}

/// Reads, parses, defaults and validates a config file. A relative `output`
/// resolves against the config file's directory.
pub fn validate_config(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    ExperimentConfig::from_toml(&text, base).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}
