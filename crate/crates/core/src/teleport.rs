//! Ideal Braunstein–Kimble teleportation in the characteristic-function
//! picture: `χ_out(α) = χ_in(α) χ_res(α*, α)` and
//! `F = (1/π) ∫ d²λ χ_in(λ) χ_out(-λ)`.
//!
//! Two independent routes to the fidelity are provided:
//!
//! * [`fidelity_quadrature`] integrates the formula above with a tensor
//!   Gauss–Hermite rule whitened by the integrand's Gaussian envelope.
//! * [`closed_form_fidelity`] evaluates the same integral exactly. For both
//!   pure inputs `χ_in(λ)χ_in(-λ)` depends on `|λ|²` only, and on the
//!   teleportation diagonal the squeeze acts as `ᾱ1 = κλ*`, `ᾱ2 = κλ` with
//!   `κ = cosh r + e^{iφ} sinh r`. Fock cores then reduce to
//!   `∫_0^∞ P(y) e^{-Ay} dy = Σ_k p_k k!/A^{k+1}` and coherent cores to
//!   complex Gaussian integrals `(1/π)∫ e^{-A|λ|² + Bλ + Cλ*} = e^{BC/A}/A`.
//!
//! The `fid_*` functions are the published closed forms at `φ = π`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::SqueezeParam;
use crate::quadrature::integrate_gaussian;
use crate::special::{assoc_laguerre_coeffs, factorial, poly_mul, poly_scale_arg};
use crate::states::{chi_resource, CharFn1, CharFn2, Core, Family, InputSpec, ResourceSpec};

pub const DEFAULT_ORDER: usize = 64;
/// Largest quadrature refinement error accepted as converged.
pub const QUADRATURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FidelityMethod {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelityResult {
    pub value: f64,
    pub method: FidelityMethod,
    /// `|F(q) - F(2q)|` for quadrature, zero for closed forms.
    pub est_abs_error: f64,
    pub order: Option<usize>,
    pub resource: Option<ResourceSpec>,
    pub input: Option<InputSpec>,
}

pub fn chi_out(chi_in: &CharFn1, chi_res: &CharFn2) -> CharFn1 {
    CharFn1::Teleported { input: Box::new(chi_in.clone()), resource: chi_res.clone() }
}

/// Fidelity by quadrature at `order` and `2·order` nodes per axis; the value
/// reported is the refined one.
pub fn fidelity_quadrature(chi_in: &CharFn1, chi_res: &CharFn2) -> Result<FidelityResult> {
    fidelity_quadrature_with_order(chi_in, chi_res, DEFAULT_ORDER)
}

pub fn fidelity_quadrature_with_order(chi_in: &CharFn1, chi_res: &CharFn2, order: usize) -> Result<FidelityResult> {
    let coarse = overlap_integral(chi_in, chi_res, order)?;
    let fine = overlap_integral(chi_in, chi_res, 2 * order)?;
    let err = (fine - coarse).norm();
    if err > QUADRATURE_TOL || fine.im.abs() > QUADRATURE_TOL {
        return Err(Error::Integration(format!(
            "fidelity did not converge: F({order}) = {coarse}, F({}) = {fine}, |Δ| = {err:.3e}",
            2 * order
        )));
    }
    Ok(FidelityResult {
        value: fine.re,
        method: FidelityMethod::Quadrature,
        est_abs_error: err,
        order: Some(2 * order),
        resource: None,
        input: None,
    })
}

fn overlap_integral(chi_in: &CharFn1, chi_res: &CharFn2, order: usize) -> Result<C64> {
    let out = chi_out(chi_in, chi_res);
    let q = chi_in.gaussian_form() + out.gaussian_form();
    let q = DMatrix::from_column_slice(2, 2, q.as_slice());
    let total = integrate_gaussian(&q, order, |v| {
        let lambda = C64::new(v[0], v[1]);
        chi_in.eval(lambda) * out.eval(-lambda)
    })?;
    Ok(total / PI)
}

/// Exact fidelity for a resource spec and pure input. Coherent-core (cat)
/// resources are supported for coherent inputs only.
pub fn closed_form_fidelity(spec: &ResourceSpec, input: &InputSpec) -> Result<f64> {
    let core = spec.core()?;
    let nth = spec.nth1 + spec.nth2;
    match &core {
        Core::Fock(c) => Ok(fock_core_fidelity(c, spec.squeeze, nth, input)),
        Core::Coherent(components) => match input {
            InputSpec::Coherent { .. } => Ok(coherent_core_fidelity(components, spec.squeeze, nth)),
            InputSpec::FockOne => Err(Error::Unsupported(
                "closed-form fidelity of coherent-superposition resources is available for coherent inputs only".into(),
            )),
        },
    }
}

/// Closed form or quadrature for a spec, with the parameters echoed.
pub fn fidelity(spec: &ResourceSpec, input: &InputSpec, method: FidelityMethod) -> Result<FidelityResult> {
    let mut res = match method {
        FidelityMethod::ClosedForm => FidelityResult {
            value: closed_form_fidelity(spec, input)?,
            method,
            est_abs_error: 0.0,
            order: None,
            resource: None,
            input: None,
        },
        FidelityMethod::Quadrature => fidelity_quadrature(&input.chi(), &chi_resource(spec)?)?,
    };
    res.resource = Some(*spec);
    res.input = Some(*input);
    Ok(res)
}

fn kappa(squeeze: SqueezeParam) -> C64 {
    C64::new(squeeze.r.cosh(), 0.0) + C64::from_polar(squeeze.r.sinh(), squeeze.phi)
}

fn fock_core_fidelity(c: &[C64], squeeze: SqueezeParam, nth: f64, input: &InputSpec) -> f64 {
    let k = kappa(squeeze);
    let s2 = k.norm_sqr();
    let unit = k / k.norm();
    let a = 1.0 + nth + s2;
    let weight: Vec<f64> = match input {
        InputSpec::Coherent { .. } => vec![1.0],
        InputSpec::FockOne => vec![1.0, -2.0, 1.0],
    };
    let mut total = 0.0;
    for (m, cm) in c.iter().enumerate() {
        for (p, cp) in c.iter().enumerate() {
            let (lo, hi) = (m.min(p), m.max(p));
            let d = hi - lo;
            // ⟨m|D(κλ*)|p⟩⟨m|D(κλ)|p⟩ e^{|κ|²y} = (lo!/hi!) κ^{2d} y^d L_lo^{(d)}(|κ|²y)²
            let lag = poly_scale_arg(&assoc_laguerre_coeffs(lo, d), s2);
            let mut poly = poly_mul(&lag, &lag);
            let mut shifted = vec![0.0; d];
            shifted.append(&mut poly);
            let poly = poly_mul(&weight, &shifted);
            let moment: f64 = poly
                .iter()
                .enumerate()
                .map(|(j, &coef)| coef * factorial(j) / a.powi(j as i32 + 1))
                .sum();
            let phase = if m >= p { unit.powi(2 * d as i32) } else { unit.conj().powi(2 * d as i32) };
            let pref = factorial(lo) / factorial(hi) * s2.powi(d as i32);
            total += (cm.conj() * cp * phase).re * pref * moment;
        }
    }
    total
}

fn coherent_core_fidelity(components: &[(C64, C64)], squeeze: SqueezeParam, nth: f64) -> f64 {
    let k = kappa(squeeze);
    let a = 1.0 + nth + k.norm_sqr();
    let mut total = C64::new(0.0, 0.0);
    for &(wj, gj) in components {
        for &(wk, gk) in components {
            let overlap = (-gj.norm_sqr() / 2.0 - gk.norm_sqr() / 2.0 + gj.conj() * gk).exp();
            let b = k * gj.conj() - k.conj() * gk;
            total += wj.conj() * wk * overlap * overlap * (b * b / a).exp() / a;
        }
    }
    total.re
}

/// `F_TwB(r) = 1/(1 + e^{-2r})`.
pub fn fid_twb(r: f64) -> f64 {
    1.0 / (1.0 + (-2.0 * r).exp())
}

/// Squeezed Bell-like resource, coherent input, `φ = π`, `θ = 0`.
pub fn fid_sb(r: f64, delta: f64) -> f64 {
    fid_sb_thermal(r, 0.0, 0.0, delta)
}

/// Thermal-dressed squeezed Bell-like resource with `f_th = 1 + nth1 + nth2`.
pub fn fid_sb_thermal(r: f64, nth1: f64, nth2: f64, delta: f64) -> f64 {
    let f = 1.0 + nth1 + nth2;
    let g = (2.0 * r).exp() * f;
    let num = 1.0 + g + (4.0 * r).exp() * f * f + g * (2.0 * delta).cos() + (1.0 + g) * (2.0 * delta).sin();
    num / ((-2.0 * r).exp() * (1.0 + g).powi(3))
}

/// Squeezed cat-like resource with complex `γ`, coherent input, `φ = π`, `θ = 0`.
pub fn fid_cat_full(r: f64, delta: f64, gamma: C64) -> f64 {
    let d = 1.0 + (2.0 * r).exp();
    let x = gamma.norm_sqr();
    let diff = gamma - gamma.conj();
    let (s, c) = delta.sin_cos();
    let cross = (gamma * gamma / d).exp() + (gamma.conj() * gamma.conj() / d).exp();
    let num = C64::new(c * c, 0.0) + (diff * diff / d).exp() * s * s + cross * (-x).exp() * s * c;
    num.re / ((1.0 + (-2.0 * r).exp()) * (1.0 + (-x).exp() * (2.0 * delta).sin()))
}

/// Cat-like resource at `δ = π/4`, real `γ`.
pub fn fid_cat(r: f64, gamma_abs: f64) -> f64 {
    let x = gamma_abs * gamma_abs;
    let em = 1.0 + (-2.0 * r).exp();
    (1.0 + (-x / em).exp()) / (em * (1.0 + (-x).exp()))
}

/// Thermal-dressed cat-like resource at `δ = π/4`, real `γ`.
pub fn fid_cat_thermal(r: f64, nth1: f64, nth2: f64, gamma_abs: f64) -> f64 {
    let f = 1.0 + nth1 + nth2;
    let x = gamma_abs * gamma_abs;
    let g = 1.0 + (2.0 * r).exp() * f;
    (1.0 + (-x + x / g).exp()) / ((-2.0 * r).exp() * g * (1.0 + (-x).exp()))
}

/// Squeezed symmetric superposition of `|0,0⟩, |1,1⟩, |2,2⟩` at `φ = π`, for
/// either pure input.
pub fn fid_ssf(input: &InputSpec, r: f64, delta1: f64, theta_a: f64, delta2: f64, theta_b: f64) -> f64 {
    let squeeze = SqueezeParam { r, phi: PI };
    let family = Family::Ssf { delta1, theta_a, delta2, theta_b };
    let spec = ResourceSpec { family, squeeze, nth1: 0.0, nth2: 0.0 };
    match spec.core() {
        Ok(Core::Fock(c)) => fock_core_fidelity(&c, squeeze, 0.0, input),
        _ => f64::NAN,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{chi_coherent, chi_fock1};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn twin_beam_values() {
        assert_eq!(fid_twb(0.0), 0.5);
        assert!((fid_twb(1.0) - 1.0 / (1.0 + (-2.0f64).exp())).abs() < 1e-15);
        assert!((fid_twb(1.0) - 0.880797).abs() < 1e-6);
        let q = fidelity_quadrature(&chi_coherent(c(0.0, 0.0)), &chi_resource(&ResourceSpec::twin_beam(0.0, PI).unwrap()).unwrap()).unwrap();
        assert!((q.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sb_reduces_to_twin_beam_and_matches_grid_value() {
        for r in [0.0, 0.3, 1.2] {
            assert!((fid_sb(r, 0.0) - fid_twb(r)).abs() < 1e-14);
        }
        let d = 0.5 * 2f64.atan();
        let expect = (3.0 + (2.0 * d).cos() + 2.0 * (2.0 * d).sin()) / 8.0;
        assert!((fid_sb(0.0, d) - expect).abs() < 1e-15);
        assert!((expect - (3.0 + 5f64.sqrt()) / 8.0).abs() < 1e-15);
    }

    #[test]
    fn thermal_sb_limits() {
        assert!((fid_sb_thermal(0.7, 0.0, 0.0, 0.3) - fid_sb(0.7, 0.3)).abs() < 1e-15);
        assert!(fid_sb_thermal(0.7, 1e6, 1e6, 0.3) < 1e-5);
    }

    #[test]
    fn cat_forms_agree() {
        for r in [0.0, 0.5, 1.3] {
            assert!((fid_cat_full(r, 0.0, c(0.7, 0.2)) - fid_twb(r)).abs() < 1e-14);
            assert!((fid_cat_full(r, 0.6, c(0.0, 0.0)) - fid_twb(r)).abs() < 1e-14);
            assert!((fid_cat(r, 0.0) - fid_twb(r)).abs() < 1e-14);
            for g in [0.3, 1.0, 2.2] {
                assert!((fid_cat_full(r, PI / 4.0, c(g, 0.0)) - fid_cat(r, g)).abs() < 1e-14);
                assert!((fid_cat_thermal(r, 0.0, 0.0, g) - fid_cat(r, g)).abs() < 1e-14);
            }
        }
        let g_opt = (1.0 / (2f64.sqrt() - 1.0).powi(2)).ln().sqrt();
        assert!((fid_cat(0.0, g_opt) - 1.0 / (4.0 * (2f64.sqrt() - 1.0))).abs() < 1e-14);
        assert!((g_opt - 1.3276).abs() < 1e-4);
    }

    #[test]
    fn cat_thermal_decreases_with_noise() {
        let mut prev = f64::INFINITY;
        for n in [0.0, 0.05, 0.1, 0.2, 0.5, 1.0] {
            let v = fid_cat_thermal(0.5, n, n, 1.0);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn general_closed_form_matches_published_forms() {
        let coh = InputSpec::coherent(c(0.3, -1.0));
        for r in [0.0, 0.4, 1.1] {
            for d in [0.0, 0.2, 0.9] {
                let sb = ResourceSpec::squeezed_bell(r, PI, d, 0.0).unwrap();
                assert!((closed_form_fidelity(&sb, &coh).unwrap() - fid_sb(r, d)).abs() < 1e-13);
                let th = sb.with_thermal(0.1, 0.07).unwrap();
                assert!((closed_form_fidelity(&th, &coh).unwrap() - fid_sb_thermal(r, 0.1, 0.07, d)).abs() < 1e-13);
                let g = c(0.8, -0.4);
                let cat = ResourceSpec::squeezed_cat(r, PI, d, 0.0, g).unwrap();
                assert!((closed_form_fidelity(&cat, &coh).unwrap() - fid_cat_full(r, d, g)).abs() < 1e-13);
            }
            let cat = ResourceSpec::squeezed_cat(r, PI, PI / 4.0, 0.0, c(1.1, 0.0)).unwrap().with_thermal(0.05, 0.1).unwrap();
            assert!((closed_form_fidelity(&cat, &coh).unwrap() - fid_cat_thermal(r, 0.05, 0.1, 1.1)).abs() < 1e-13);
        }
    }

    #[test]
    fn ssf_reductions() {
        let coh = InputSpec::coherent(c(0.0, 0.0));
        for r in [0.0, 0.6] {
            assert!((fid_ssf(&coh, r, 0.5, 0.0, 0.0, 0.0) - fid_sb(r, 0.5)).abs() < 1e-14);
            assert!((fid_ssf(&coh, r, 0.0, 0.3, 0.0, 0.2) - fid_twb(r)).abs() < 1e-14);
            assert!((fid_ssf(&InputSpec::FockOne, r, 0.0, 0.0, 0.0, 0.0) - fock_twb(r)).abs() < 1e-14);
        }
    }

    /// Fock |1⟩ through a twin beam: with u = 1/(1+e^{-2r}),
    /// F = e^{2r}·∫(1-e^{2r}y)² e^{-(e^{2r}+1)y} dy.
    fn fock_twb(r: f64) -> f64 {
        let g = (2.0 * r).exp();
        let a = g + 1.0;
        g * (1.0 / a - 2.0 * g / (a * a) + 2.0 * g * g / a.powi(3))
    }

    #[test]
    fn cat_fock_input_is_unsupported_in_closed_form() {
        let cat = ResourceSpec::squeezed_cat(0.2, PI, 0.5, 0.0, c(1.0, 0.0)).unwrap();
        assert!(matches!(closed_form_fidelity(&cat, &InputSpec::FockOne), Err(Error::Unsupported(_))));
    }

    #[test]
    fn chi_out_examples() {
        let r: f64 = 0.7;
        let res = chi_resource(&ResourceSpec::twin_beam(r, PI).unwrap()).unwrap();
        let out = chi_out(&chi_coherent(c(0.0, 0.0)), &res);
        assert!((out.eval(c(0.0, 0.0)) - 1.0).norm() < 1e-15);
        let a = c(0.4, 0.9);
        let expect = (-a.norm_sqr() / 2.0 - (-2.0 * r).exp() * a.norm_sqr()).exp();
        assert!((out.eval(a) - expect).norm() < 1e-14);
        // Large squeezing approaches perfect teleportation.
        let big = chi_resource(&ResourceSpec::twin_beam(12.0, PI).unwrap()).unwrap();
        let input = chi_coherent(c(0.5, -0.2));
        let out = chi_out(&input, &big);
        assert!((out.eval(a) - input.eval(a)).norm() < 1e-9);
    }

    #[test]
    fn quadrature_matches_closed_form_both_inputs() {
        let spec = ResourceSpec::ssf(0.45, PI, 0.8, 0.3, 0.6, -0.4).unwrap();
        let chi = chi_resource(&spec).unwrap();
        for input in [InputSpec::coherent(c(1.0, 0.5)), InputSpec::FockOne] {
            let q = fidelity_quadrature(&input.chi(), &chi).unwrap();
            let cf = closed_form_fidelity(&spec, &input).unwrap();
            assert!((q.value - cf).abs() < 1e-10, "{input:?}: {} vs {cf}", q.value);
            assert!(q.est_abs_error < 1e-10);
        }
        let fock = fidelity_quadrature(&chi_fock1(), &chi).unwrap();
        assert!((0.0..=1.0).contains(&fock.value));
    }

    #[test]
    fn closed_form_handles_other_phases() {
        // Off-π squeezing phases: compare the exact moment sums with quadrature.
        let coh = InputSpec::coherent(c(0.0, 0.0));
        for phi in [0.0, 1.0, 2.5] {
            let sb = ResourceSpec::squeezed_bell(0.5, phi, 0.4, 0.7).unwrap();
            let cat = ResourceSpec::squeezed_cat(0.5, phi, 0.4, 0.7, c(0.9, 0.3)).unwrap();
            for spec in [sb, cat] {
                let q = fidelity_quadrature(&coh.chi(), &chi_resource(&spec).unwrap()).unwrap();
                assert!((q.value - closed_form_fidelity(&spec, &coh).unwrap()).abs() < 1e-10);
            }
        }
        let twb0 = ResourceSpec::twin_beam(0.5, 0.0).unwrap();
        assert!((closed_form_fidelity(&twb0, &coh).unwrap() - 1.0 / (1.0 + (1.0f64).exp())).abs() < 1e-14);
    }
}
