//! Row planning and evaluation for the experiment recipes.

use std::collections::BTreeMap;

use cvtele_core::fock::{build_resource_fock_adaptive, von_neumann_entropy};
use cvtele_core::teleport::fidelity_quadrature_with_order;
use cvtele_core::{
    classical_threshold, gaussian_reference, non_gaussianity, optimize_resource, optimize_truncated_twb,
    resource_affinity, FamilyKind, InputSpec, OptResult, ResourceSpec,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig};

/// Rows whose closed-form and quadrature fidelities differ by more than
/// this are refused.
pub const GATE_TOL: f64 = 1e-6;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowKind {
    /// Optimal fidelity; SSF rows also carry `s̃`.
    Optimum,
    /// Diagnostics at the figure parametrisation.
    Diagnostics { entropy: bool, dng: bool, affinity: bool },
    Threshold,
}

#[derive(Debug, Clone, Copy)]
struct Job {
    kind: RowKind,
    family: FamilyKind,
    input: InputSpec,
    r: f64,
    nth: f64,
}

/// One output line. Empty cells mean "not computed for this recipe".
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub family: String,
    pub input: String,
    pub r: f64,
    pub nth1: f64,
    pub nth2: f64,
    pub params: String,
    pub fidelity_closed: Option<f64>,
    pub fidelity_quad: Option<f64>,
    #[serde(rename = "E_vN")]
    pub e_vn: Option<f64>,
    #[serde(rename = "d_nG")]
    pub d_ng: Option<f64>,
    #[serde(rename = "affinity_G")]
    pub affinity_g: Option<f64>,
    pub xi_star: Option<f64>,
    pub s_tilde: Option<f64>,
    pub method: String,
    pub version: &'static str,
    pub error: String,
}

impl SweepRow {
    pub fn failed(&self) -> bool {
        !self.error.is_empty()
    }

    /// `|closed - quad|` when both are present.
    pub fn gate_gap(&self) -> Option<f64> {
        Some((self.fidelity_closed? - self.fidelity_quad?).abs())
    }
}

fn plan(config: &ExperimentConfig) -> Vec<Job> {
    let kind = match config.experiment {
        Experiment::Fig1 | Experiment::Fig4 | Experiment::Fig6 => RowKind::Optimum,
        Experiment::Fig2 => RowKind::Diagnostics { entropy: true, dng: false, affinity: false },
        Experiment::Fig3 => RowKind::Diagnostics { entropy: false, dng: true, affinity: true },
        Experiment::Fig5 | Experiment::Custom => RowKind::Diagnostics { entropy: true, dng: true, affinity: true },
        Experiment::Fig7 => RowKind::Threshold,
    };
    let mut jobs = Vec::new();
    for &input in &config.inputs {
        for &family in &config.families {
            for &nth in &config.nth_grid {
                for &r in &config.r_grid {
                    jobs.push(Job { kind, family, input, r, nth });
                }
            }
        }
    }
    jobs
}

fn format_params(params: &BTreeMap<String, f64>) -> String {
    params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

/// SSF diagnostics use the truncated twin beam at `s̃`; every other family
/// uses its unconstrained optimum.
fn figure_optimum(job: &Job) -> cvtele_core::Result<OptResult> {
    let nth = (job.nth, job.nth);
    match (job.kind, job.family) {
        (RowKind::Diagnostics { .. }, FamilyKind::Ssf) => optimize_truncated_twb(&job.input, job.r, nth),
        _ => optimize_resource(job.family, &job.input, job.r, nth),
    }
}

fn evaluate(job: &Job, order: usize) -> SweepRow {
    let mut row = SweepRow {
        family: job.family.name().to_string(),
        input: job.input.name().to_string(),
        r: job.r,
        nth1: job.nth,
        nth2: job.nth,
        params: String::new(),
        fidelity_closed: None,
        fidelity_quad: None,
        e_vn: None,
        d_ng: None,
        affinity_g: None,
        xi_star: None,
        s_tilde: None,
        method: String::new(),
        version: VERSION,
        error: String::new(),
    };
    if let Err(e) = fill(&mut row, job, order) {
        row.error = e.to_string();
    }
    row
}

fn fill(row: &mut SweepRow, job: &Job, order: usize) -> cvtele_core::Result<()> {
    let mut method = vec!["closed_form".to_string(), format!("gauss_hermite {order}/{}", 2 * order)];
    if job.kind == RowKind::Threshold {
        let t = classical_threshold(job.family, job.r)?;
        row.nth1 = t.nth;
        row.nth2 = t.nth;
        method.insert(0, "threshold_bisection".into());
    }
    let opt = match job.kind {
        RowKind::Threshold => optimize_resource(job.family, &job.input, job.r, (row.nth1, row.nth2))?,
        _ => figure_optimum(job)?,
    };
    row.params = format_params(&opt.best_params);
    row.fidelity_closed = Some(opt.best_fidelity);
    let spec = opt.best_spec;
    row.fidelity_quad = Some(fidelity_quadrature_with_order(&job.input.chi(), &cvtele_core::chi_resource(&spec)?, order)?.value);
    if let Some(s) = opt.best_params.get("s") {
        row.s_tilde = Some(*s);
        method.push("truncated_twin_beam".into());
    } else if job.kind == RowKind::Optimum && job.family == FamilyKind::Ssf {
        row.s_tilde = Some(optimize_truncated_twb(&job.input, job.r, (job.nth, job.nth))?.best_params["s"]);
    }
    if !opt.edge_hits.is_empty() {
        method.push(format!("edge:{}", opt.edge_hits.join("+")));
    }
    if let RowKind::Diagnostics { entropy, dng, affinity } = job.kind {
        diagnostics(row, &spec, entropy, dng, affinity, &mut method)?;
    }
    row.method = method.join(";");
    Ok(())
}

fn diagnostics(
    row: &mut SweepRow,
    spec: &ResourceSpec,
    entropy: bool,
    dng: bool,
    affinity: bool,
    method: &mut Vec<String>,
) -> cvtele_core::Result<()> {
    let pure = spec.is_pure();
    if entropy && pure {
        row.e_vn = Some(von_neumann_entropy(&build_resource_fock_adaptive(spec)?)?);
    }
    if affinity && pure {
        let a = resource_affinity(spec, spec.squeeze.r + 2.0)?;
        row.affinity_g = Some(a.value);
        row.xi_star = Some(a.xi);
    }
    if dng {
        let reference = gaussian_reference(spec)?;
        row.d_ng = Some(non_gaussianity(&cvtele_core::chi_resource(spec)?, &reference, pure)?);
        if !pure {
            method.push("d_nG_thermal_experimental".into());
        }
    }
    Ok(())
}

/// Evaluates every row in parallel. Rows come back in grid order: inputs,
/// then families, then `nth`, then `r`.
pub fn run_experiment(config: &ExperimentConfig) -> Vec<SweepRow> {
    plan(config).par_iter().map(|job| evaluate(job, config.quadrature_order)).collect()
}
