//! Batch runner for the teleportation sweeps: config parsing, parallel row
//! evaluation, the closed-form/quadrature gate and CSV output.

pub mod config;
pub mod sweep;

use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

pub use config::{validate_config, Experiment, ExperimentConfig};
pub use sweep::{run_experiment, SweepRow, GATE_TOL, VERSION};

/// Metadata line that carries the run time; the only line that differs
/// between reruns of a config.
pub const TIMESTAMP_PREFIX: &str = "# generated_unix: ";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("computation failed on {failed} of {total} rows; see the error column of {output}")]
    Compute { failed: usize, total: usize, output: String },
    #[error("closed-form/quadrature gate failed:\n{0}")]
    Gate(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Compute { .. } => 3,
            CliError::Gate(_) => 4,
        }
    }
}

/// Rows that violate the gate, formatted with their parameters.
pub fn gate_violations(rows: &[SweepRow]) -> Vec<String> {
    rows.iter()
        .filter_map(|row| {
            let gap = row.gate_gap()?;
            (gap > GATE_TOL || gap.is_nan()).then(|| {
                format!(
                    "  {} {} r={} nth=({}, {}) params[{}]: closed {} quad {} |diff| {gap:.3e}",
                    row.family,
                    row.input,
                    row.r,
                    row.nth1,
                    row.nth2,
                    row.params,
                    row.fidelity_closed.unwrap_or(f64::NAN),
                    row.fidelity_quad.unwrap_or(f64::NAN),
                )
            })
        })
        .collect()
}

fn header(config: &ExperimentConfig, timestamp: u64) -> String {
    let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
    let inputs = config
        .inputs
        .iter()
        .map(|i| match i {
            cvtele_core::InputSpec::Coherent { beta } => format!("coherent(beta={}{:+}i)", beta.re, beta.im),
            cvtele_core::InputSpec::FockOne => "fock1".to_string(),
        })
        .collect::<Vec<_>>()
        .join(",");
    let families = config.families.iter().map(|f| f.name()).collect::<Vec<_>>().join(",");
    let lines = [
        format!("# cvtele {VERSION}"),
        format!("# experiment: {} ({})", config.experiment, config.experiment.description()),
        format!("{TIMESTAMP_PREFIX}{timestamp}"),
        "# conventions: entropy in nats (natural log); vacuum quadrature variance 1/2; phi = pi for every family; \
         S12(zeta) = exp(-zeta a1^dag a2^dag + conj(zeta) a1 a2)"
            .to_string(),
        format!("# gate: |fidelity_closed - fidelity_quad| <= {GATE_TOL:e} on every row"),
        format!("# r_grid: {}", join(&config.r_grid)),
        format!("# nth_grid: {} (nth1 = nth2)", join(&config.nth_grid)),
        format!("# inputs: {inputs}"),
        format!("# families: {families}"),
        format!("# quadrature_order: {} (refined at {})", config.quadrature_order, 2 * config.quadrature_order),
        "# note: d_nG on thermal rows is experimental; E_vN and affinity_G are reported for pure resources only".to_string(),
    ];
    lines.join("\n") + "\n"
}

/// Writes the metadata header followed by the CSV table.
pub fn write_csv<W: Write>(mut out: W, config: &ExperimentConfig, rows: &[SweepRow], timestamp: u64) -> std::io::Result<()> {
    out.write_all(header(config, timestamp).as_bytes())?;
    let mut writer = csv::Writer::from_writer(out);
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()
}

/// Runs a validated config end to end. Gate violations abort before
/// anything is written; per-row failures are written and then reported.
pub fn execute(config: &ExperimentConfig) -> Result<Vec<SweepRow>, CliError> {
    let rows = run_experiment(config);
    let violations = gate_violations(&rows);
    if !violations.is_empty() {
        return Err(CliError::Gate(violations.join("\n")));
    }
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    write_output(&config.output, config, &rows, timestamp)?;
    let failed = rows.iter().filter(|r| r.failed()).count();
    if failed > 0 {
        return Err(CliError::Compute { failed, total: rows.len(), output: config.output.display().to_string() });
    }
    Ok(rows)
}

fn write_output(path: &Path, config: &ExperimentConfig, rows: &[SweepRow], timestamp: u64) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let file = std::fs::File::create(path).map_err(io)?;
    write_csv(std::io::BufWriter::new(file), config, rows, timestamp).map_err(io)
}
