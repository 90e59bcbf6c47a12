//! Fidelity maximization over resource parameters, closed-form optimal
//! Bell-like angles, and the classical-threshold root finder.
//!
//! `optimize_resource` runs Nelder–Mead from eight fixed seeds spread over
//! the search box by a Halton lattice, polishes the best vertex by
//! coordinate golden-section and restarts Nelder–Mead once from there. No
//! randomness is involved, so results are bitwise reproducible.

use argmin::core::{CostFunction, Executor, State, TerminationReason};
use argmin::solver::goldensectionsearch::GoldenSectionSearch;
use argmin::solver::neldermead::NelderMead as ArgminNelderMead;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::states::{Family, FamilyKind, InputSpec, ResourceSpec};
use crate::teleport::closed_form_fidelity;

/// Squeezing phase used for every family.
pub const PHI: f64 = PI;
pub const SEEDS: usize = 8;
const GAMMA_MAX: f64 = 6.0;
const S_MAX: f64 = 3.0;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Adapts a closure to argmin's cost-function interface.
struct Objective<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok((self.0)(x))
    }
}

struct Scalar<F>(F);

impl<F: Fn(f64) -> f64> CostFunction for Scalar<F> {
    type Param = f64;
    type Output = f64;

    fn cost(&self, x: &f64) -> std::result::Result<f64, argmin::core::Error> {
        Ok(-(self.0)(*x))
    }
}

/// `(x*, f(x*))` maximizing a unimodal `f` on `[lo, hi]` to width `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    // argmin stops on a relative width; run a fixed number of contractions
    // instead so the absolute width reaches `tol` even near x = 0.
    let iters = ((tol / (hi - lo)).ln() / INV_PHI.ln()).ceil().max(1.0) as u64;
    let interior = GoldenSectionSearch::new(lo, hi)
        .and_then(|s| s.with_tolerance(f64::EPSILON))
        .and_then(|solver| Executor::new(Scalar(&f), solver).configure(|s| s.param(0.5 * (lo + hi)).max_iters(iters)).run())
        .ok()
        .and_then(|res| res.state.get_best_param().copied());
    // Endpoints are candidates too: the maximum may sit on the boundary.
    let mut candidates = vec![(lo, f(lo)), (hi, f(hi))];
    if let Some(x) = interior {
        candidates.insert(0, (x, f(x)));
    }
    candidates.into_iter().fold((f64::NAN, f64::NEG_INFINITY), |best, p| if p.1 > best.1 { p } else { best })
}

/// Root of `f` in `[lo, hi]` by bisection until the bracket is narrower
/// than `tol`. Requires a sign change.
pub fn bisect<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket { lo, hi, f_lo: fa, f_hi: fb });
    }
    let sa = fa.signum();
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMead {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0` with initial simplex offsets `step`, stopping
/// when the standard deviation of the vertex values drops below `ftol`.
/// Non-finite values are treated as a large penalty.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], step: &[f64], ftol: f64, max_iters: u64) -> NelderMead {
    let mut simplex = vec![x0.to_vec()];
    for (i, h) in step.iter().enumerate() {
        let mut v = x0.to_vec();
        v[i] += h;
        simplex.push(v);
    }
    let penalized = |x: &[f64]| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            PENALTY
        }
    };
    let fallback = || NelderMead { x: x0.to_vec(), value: penalized(x0), evaluations: 1, converged: false };
    let Ok(solver) = ArgminNelderMead::new(simplex).with_sd_tolerance(ftol) else {
        return fallback();
    };
    let Ok(res) = Executor::new(Objective(&penalized), solver).configure(|s| s.max_iters(max_iters)).run() else {
        return fallback();
    };
    let state = res.state;
    NelderMead {
        x: state.get_best_param().cloned().unwrap_or_else(|| x0.to_vec()),
        value: state.get_best_cost(),
        evaluations: state.get_func_counts().get("cost_count").copied().unwrap_or(0) as usize,
        converged: state.get_termination_reason() == Some(&TerminationReason::SolverConverged),
    }
}

const PENALTY: f64 = 1e6;

/// `δ_max = ½ arctan(1 + e^{-2r})`.
pub fn delta_max_pure(r: f64) -> f64 {
    0.5 * (1.0 + (-2.0 * r).exp()).atan()
}

/// `δ_max = ½ arctan(1 + e^{-2r}/(1 + nth1 + nth2))`.
pub fn delta_max_thermal(r: f64, nth1: f64, nth2: f64) -> f64 {
    0.5 * (1.0 + (-2.0 * r).exp() / (1.0 + nth1 + nth2)).atan()
}

#[derive(Debug, Clone, Copy)]
struct ParamDef {
    name: &'static str,
    lo: f64,
    hi: f64,
    periodic: bool,
}

const fn angle(name: &'static str) -> ParamDef {
    ParamDef { name, lo: 0.0, hi: FRAC_PI_2, periodic: false }
}

const fn phase(name: &'static str) -> ParamDef {
    ParamDef { name, lo: -PI, hi: PI, periodic: true }
}

fn param_defs(kind: FamilyKind) -> Vec<ParamDef> {
    match kind {
        FamilyKind::TwinBeam => vec![],
        FamilyKind::SqueezedBell => vec![angle("delta"), phase("theta")],
        FamilyKind::Ssf => vec![angle("delta1"), phase("theta_a"), angle("delta2"), phase("theta_b")],
        FamilyKind::SqueezedCat => vec![
            angle("delta"),
            phase("theta"),
            ParamDef { name: "gamma_abs", lo: 0.0, hi: GAMMA_MAX, periodic: false },
            phase("gamma_arg"),
        ],
    }
}

fn project(defs: &[ParamDef], x: &[f64]) -> Vec<f64> {
    defs.iter()
        .zip(x)
        .map(|(d, &v)| if d.periodic { wrap_phase(v) } else { v.clamp(d.lo, d.hi) })
        .collect()
}

/// Maps to `(-π, π]`.
fn wrap_phase(v: f64) -> f64 {
    let w = (v + PI).rem_euclid(2.0 * PI) - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

fn family_from(kind: FamilyKind, x: &[f64]) -> Family {
    match kind {
        FamilyKind::TwinBeam => Family::TwinBeam,
        FamilyKind::SqueezedBell => Family::SqueezedBell { delta: x[0], theta: x[1] },
        FamilyKind::Ssf => Family::Ssf { delta1: x[0], theta_a: x[1], delta2: x[2], theta_b: x[3] },
        FamilyKind::SqueezedCat => {
            Family::SqueezedCat { delta: x[0], theta: x[1], gamma: C64::from_polar(x[2], x[3]) }
        }
    }
}

fn spec_from(kind: FamilyKind, r: f64, nth: (f64, f64), x: &[f64]) -> Result<ResourceSpec> {
    let squeeze = crate::fock::SqueezeParam::new(r, PHI)?;
    ResourceSpec::new(family_from(kind, x), squeeze)?.with_thermal(nth.0, nth.1)
}

/// Parameters, value and metadata of a family optimization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptResult {
    pub family: FamilyKind,
    pub best_params: BTreeMap<String, f64>,
    pub best_fidelity: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Start point and reached value of every seed.
    pub grid_trace: Option<Vec<(BTreeMap<String, f64>, f64)>>,
    /// Non-periodic parameters that ended on the search-box boundary.
    pub edge_hits: Vec<String>,
    #[serde(skip)]
    pub best_spec: ResourceSpec,
}

/// Maximizes the closed-form fidelity over the family's free parameters at
/// fixed `r` and thermal occupations, with `φ = π`.
pub fn optimize_resource(kind: FamilyKind, input: &InputSpec, r: f64, nth: (f64, f64)) -> Result<OptResult> {
    if kind == FamilyKind::SqueezedCat && *input == InputSpec::FockOne {
        return Err(Error::Unsupported("squeezed cat-like resources are optimized for coherent inputs only".into()));
    }
    let defs = param_defs(kind);
    let objective = |x: &[f64]| -> f64 {
        let x = project(&defs, x);
        spec_from(kind, r, nth, &x).and_then(|s| closed_form_fidelity(&s, input)).unwrap_or(f64::NEG_INFINITY)
    };
    // Validate the fixed arguments once so errors surface instead of -inf.
    let base = spec_from(kind, r, nth, &defs.iter().map(|d| 0.5 * (d.lo + d.hi)).collect::<Vec<_>>())?;
    if defs.is_empty() {
        let value = closed_form_fidelity(&base, input)?;
        return Ok(OptResult {
            family: kind,
            best_params: BTreeMap::new(),
            best_fidelity: value,
            evaluations: 1,
            converged: true,
            grid_trace: None,
            edge_hits: vec![],
            best_spec: base,
        });
    }

    let dim = defs.len();
    let step: Vec<f64> = defs.iter().map(|d| 0.2 * (d.hi - d.lo)).collect();
    let mut evaluations = 0;
    let mut trace = Vec::with_capacity(SEEDS);
    let mut best = NelderMead { x: vec![], value: f64::INFINITY, evaluations: 0, converged: false };
    for seed in 0..SEEDS {
        let x0: Vec<f64> =
            defs.iter().enumerate().map(|(j, d)| d.lo + (d.hi - d.lo) * halton(seed + 1, PRIMES[j])).collect();
        let run = nelder_mead(|x| -objective(x), &x0, &step, 1e-13, 2000);
        evaluations += run.evaluations;
        trace.push((named(&defs, &x0), -run.value));
        if run.value < best.value {
            best = run;
        }
    }

    // Coordinate golden-section polish, then one restart from the result.
    let mut x = project(&defs, &best.x);
    for _sweep in 0..2 {
        for j in 0..dim {
            let d = defs[j];
            let h = 0.05 * (d.hi - d.lo);
            let (lo, hi) = if d.periodic { (x[j] - h, x[j] + h) } else { ((x[j] - h).max(d.lo), (x[j] + h).min(d.hi)) };
            let probe = |t: f64| {
                let mut y = x.clone();
                y[j] = t;
                objective(&y)
            };
            let (t, v) = golden_section_max(probe, lo, hi, 1e-10);
            evaluations += 60;
            if v >= objective(&x) {
                x[j] = t;
            }
        }
    }
    let small: Vec<f64> = step.iter().map(|s| s * 0.05).collect();
    let restart = nelder_mead(|y| -objective(y), &x, &small, 1e-15, 2000);
    evaluations += restart.evaluations;
    if -restart.value >= objective(&x) {
        x = restart.x.clone();
    }

    let x = canonicalize(kind, &defs, &x);
    let best_spec = spec_from(kind, r, nth, &x)?;
    let best_fidelity = closed_form_fidelity(&best_spec, input)?;
    let edge_hits = defs
        .iter()
        .zip(&x)
        .filter(|(d, &v)| !d.periodic && (v <= d.lo + 1e-9 || v >= d.hi - 1e-9))
        .map(|(d, _)| d.name.to_string())
        .collect();
    Ok(OptResult {
        family: kind,
        best_params: named(&defs, &x),
        best_fidelity,
        evaluations,
        converged: restart.converged,
        grid_trace: Some(trace),
        edge_hits,
        best_spec,
    })
}

/// Cats are invariant under `γ → -γ`; keep `arg γ ∈ (-π/2, π/2]`.
fn canonicalize(kind: FamilyKind, defs: &[ParamDef], x: &[f64]) -> Vec<f64> {
    let mut x = project(defs, x);
    if kind == FamilyKind::SqueezedCat {
        if x[3] > FRAC_PI_2 {
            x[3] -= PI;
        } else if x[3] <= -FRAC_PI_2 {
            x[3] += PI;
        }
    }
    x
}

fn named(defs: &[ParamDef], x: &[f64]) -> BTreeMap<String, f64> {
    defs.iter().zip(x).map(|(d, &v)| (d.name.to_string(), v)).collect()
}

const PRIMES: [usize; 4] = [2, 3, 5, 7];

fn halton(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut out = 0.0;
    while i > 0 {
        f /= base as f64;
        out += f * (i % base) as f64;
        i /= base;
    }
    out
}

/// Maximizes fidelity along the squeezed truncated twin beam
/// `(1, tanh s, tanh²s)` for `s ∈ [0, 3]`; the result carries the single
/// parameter `s`.
pub fn optimize_truncated_twb(input: &InputSpec, r: f64, nth: (f64, f64)) -> Result<OptResult> {
    let spec_at = |s: f64| ResourceSpec::truncated_twin_beam(r, PHI, s)?.with_thermal(nth.0, nth.1);
    spec_at(0.0)?;
    let objective = |s: f64| spec_at(s).and_then(|sp| closed_form_fidelity(&sp, input)).unwrap_or(f64::NEG_INFINITY);
    let width = S_MAX / SEEDS as f64;
    let mut trace = Vec::with_capacity(SEEDS);
    let mut best = (0.0, f64::NEG_INFINITY);
    for cell in 0..SEEDS {
        let lo = width * cell as f64;
        let found = golden_section_max(objective, lo, lo + width, 1e-10);
        trace.push((BTreeMap::from([("s".to_string(), lo)]), found.1));
        if found.1 > best.1 {
            best = found;
        }
    }
    let best_spec = spec_at(best.0)?;
    let edge_hits = if best.0 <= 1e-9 || best.0 >= S_MAX - 1e-9 { vec!["s".to_string()] } else { vec![] };
    Ok(OptResult {
        family: FamilyKind::Ssf,
        best_params: BTreeMap::from([("s".to_string(), best.0)]),
        best_fidelity: closed_form_fidelity(&best_spec, input)?,
        evaluations: SEEDS * 60,
        converged: true,
        grid_trace: Some(trace),
        edge_hits,
        best_spec,
    })
}

/// Normalized `(1, tanh s, tanh²s)`.
pub fn truncated_twb_coefficients(s: f64) -> [f64; 3] {
    let t = s.tanh();
    let n = (1.0 + t * t + t.powi(4)).sqrt();
    [1.0 / n, t / n, t * t / n]
}

/// Best-fit `s̃ ∈ [0, 3]` of the optimal SSF coefficients to the truncated
/// twin beam, with the L2 residual.
pub fn verify_truncated_twb_collapse(opt: &OptResult) -> Result<(f64, f64)> {
    let Family::Ssf { delta1, theta_a, delta2, theta_b } = opt.best_spec.family else {
        return Err(Error::Unsupported(format!("collapse check needs an SSF optimum, got {}", opt.family)));
    };
    let c = [
        C64::new(delta1.cos(), 0.0),
        C64::from_polar(delta1.sin() * delta2.cos(), theta_a),
        C64::from_polar(delta1.sin() * delta2.sin(), theta_b),
    ];
    let dist = |s: f64| -> f64 {
        let v = truncated_twb_coefficients(s);
        c.iter().zip(v).map(|(ci, vi)| (ci - vi).norm_sqr()).sum::<f64>().sqrt()
    };
    let width = S_MAX / SEEDS as f64;
    let mut best = (0.0, dist(0.0));
    for cell in 0..SEEDS {
        let lo = width * cell as f64;
        let (s, neg) = golden_section_max(|s| -dist(s), lo, lo + width, 1e-12);
        if -neg < best.1 {
            best = (s, -neg);
        }
    }
    Ok(best)
}

/// Threshold and its verification value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Threshold {
    pub nth: f64,
    /// `F_opt(nth) - 1/2` at the returned root.
    pub residual: f64,
}

pub const THRESHOLD_TOL: f64 = 1e-8;
const NTH_CEILING: f64 = 1e3;

/// `nth` with `F_opt(r, nth, nth) = 1/2` for a coherent input, re-optimizing
/// the resource at every trial `nth`.
pub fn classical_threshold(kind: FamilyKind, r: f64) -> Result<Threshold> {
    let input = InputSpec::coherent(C64::new(0.0, 0.0));
    let gap = |nth: f64| -> Result<f64> { Ok(optimize_resource(kind, &input, r, (nth, nth))?.best_fidelity - 0.5) };
    let g0 = gap(0.0)?;
    if g0.abs() <= 1e-12 {
        return Ok(Threshold { nth: 0.0, residual: g0 });
    }
    if g0 < 0.0 {
        return Err(Error::NoBracket { lo: 0.0, hi: 0.0, f_lo: g0, f_hi: g0 });
    }
    let mut hi = 1.0;
    let mut g_hi = gap(hi)?;
    while g_hi > 0.0 {
        if hi >= NTH_CEILING {
            return Err(Error::NoBracket { lo: 0.0, hi, f_lo: g0, f_hi: g_hi });
        }
        hi *= 2.0;
        g_hi = gap(hi)?;
    }
    let nth = bisect(gap, 0.0, hi, THRESHOLD_TOL * 0.1)?;
    Ok(Threshold { nth, residual: gap(nth)? })
}
