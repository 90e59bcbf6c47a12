//! Resource diagnostics: Hilbert–Schmidt non-Gaussianity against the
//! moment-matched Gaussian state, and squeezed-vacuum affinity.
//!
//! Quadratures are `x = (a + a†)/√2`, `p = (a - a†)/(i√2)`, ordered
//! `(x1, p1, x2, p2)`; the vacuum covariance is `I/2`. With this choice
//! `D(α) = exp(i ηᵀR)` for `η = √2 (Im α, -Re α)` per mode, so a Gaussian
//! state has `χ_G(α) = exp(i ηᵀd - ηᵀVη/2)`.

use nalgebra::{DMatrix, Matrix4, Vector4};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{build_resource_fock_with_tol, TwoModeFockState, ADAPTIVE_TAIL_TOL, DEFAULT_CUTOFF, MAX_CUTOFF};
use crate::quadrature::integrate_gaussian;
use crate::states::{CharFn2, ResourceSpec};

/// Quadrature orders used for the 4D overlap integrals.
pub const DNG_ORDERS: (usize, usize) = (24, 32);
pub const DNG_TOL: f64 = 1e-6;
/// Moments are rejected when the mass on the cutoff boundary, weighted by
/// the photon number there, exceeds this.
pub const MOMENT_TAIL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianRef {
    pub mean: Vector4<f64>,
    pub cov: Matrix4<f64>,
}

impl GaussianRef {
    pub fn vacuum() -> Self {
        Self { mean: Vector4::zeros(), cov: Matrix4::identity() * 0.5 }
    }

    pub fn chi(&self, a1: C64, a2: C64) -> C64 {
        let eta = eta_of(a1, a2);
        C64::new(-0.5 * (eta.transpose() * self.cov * eta)[0], eta.dot(&self.mean)).exp()
    }

    /// `Tr ρ_G² = 1/(4 √det V)`.
    pub fn purity(&self) -> f64 {
        0.25 / self.cov.determinant().sqrt()
    }

    /// Reference of the state after multiplying `χ` by `exp(-nth1|α1|² - nth2|α2|²)`.
    pub fn thermal_dressed(&self, nth1: f64, nth2: f64) -> Self {
        Self { mean: self.mean, cov: self.cov + Matrix4::from_diagonal(&Vector4::new(nth1, nth1, nth2, nth2)) }
    }

    /// Smallest eigenvalue of `V + iΩ/2`; nonnegative for physical states.
    pub fn uncertainty_margin(&self) -> f64 {
        let mut m = self.cov.map(|v| C64::new(v, 0.0));
        for k in [0, 2] {
            m[(k, k + 1)] += C64::new(0.0, 0.5);
            m[(k + 1, k)] -= C64::new(0.0, 0.5);
        }
        m.symmetric_eigenvalues().min()
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        let sym = (self.cov - self.cov.transpose()).abs().max() <= tol;
        sym && self.uncertainty_margin() >= -tol
    }

    /// `Q` with `|χ_G(α)| = exp(-vᵀQv)`, `v = (Re α1, Im α1, Re α2, Im α2)`.
    fn gaussian_form(&self) -> Matrix4<f64> {
        let m = eta_map();
        m.transpose() * self.cov * m * 0.5
    }
}

/// `v ↦ η`, block `√2 [[0, 1], [-1, 0]]` per mode.
fn eta_map() -> Matrix4<f64> {
    let s = std::f64::consts::SQRT_2;
    Matrix4::new(
        0.0, s, 0.0, 0.0,
        -s, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, s,
        0.0, 0.0, -s, 0.0,
    )
}

fn eta_of(a1: C64, a2: C64) -> Vector4<f64> {
    eta_map() * Vector4::new(a1.re, a1.im, a2.re, a2.im)
}

/// First and second quadrature moments of a pure truncated state.
pub fn moments_from_fock(state: &TwoModeFockState) -> Result<GaussianRef> {
    if !state.is_normalized(1e-8) {
        return Err(Error::NotNormalized { norm_sq: state.norm_sq() });
    }
    let weighted_tail = state.edge_mass() * state.cutoff() as f64;
    if weighted_tail > MOMENT_TAIL_TOL {
        return Err(Error::Truncation { cutoff: state.cutoff(), tail: weighted_tail, tol: MOMENT_TAIL_TOL });
    }
    let psi = state.amps();
    let lowered = [lower(psi, 0), lower(psi, 1)];
    let inner = |a: &DMatrix<C64>, b: &DMatrix<C64>| a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum::<C64>();

    let mean_a = [inner(psi, &lowered[0]), inner(psi, &lowered[1])];
    let mut aa = [[C64::new(0.0, 0.0); 2]; 2];
    let mut ada = [[C64::new(0.0, 0.0); 2]; 2];
    for j in 0..2 {
        for m in 0..2 {
            aa[j][m] = inner(psi, &lower(&lowered[m], j));
            ada[j][m] = inner(&lowered[j], &lowered[m]);
        }
    }

    // R_k = Σ_j u_kj a_j + conj(u_kj) a_j†
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let u = |k: usize, j: usize| -> C64 {
        if k / 2 != j {
            C64::new(0.0, 0.0)
        } else if k.is_multiple_of(2) {
            C64::new(h, 0.0)
        } else {
            C64::new(0.0, -h)
        }
    };
    let mut mean = Vector4::zeros();
    for k in 0..4 {
        let mut acc = C64::new(0.0, 0.0);
        for (j, &m) in mean_a.iter().enumerate() {
            acc += u(k, j) * m + u(k, j).conj() * m.conj();
        }
        mean[k] = acc.re;
    }
    let mut cov = Matrix4::zeros();
    for k in 0..4 {
        for l in 0..4 {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..2 {
                for m in 0..2 {
                    let (ukj, ulm) = (u(k, j), u(l, m));
                    let a_adag = ada[m][j] + if j == m { 1.0 } else { 0.0 };
                    acc += ukj * ulm * aa[j][m]
                        + ukj * ulm.conj() * a_adag
                        + ukj.conj() * ulm * ada[j][m]
                        + ukj.conj() * ulm.conj() * aa[m][j].conj();
                }
            }
            cov[(k, l)] = acc.re - mean[k] * mean[l];
        }
    }
    Ok(GaussianRef { mean, cov: (cov + cov.transpose()) * 0.5 })
}

/// Moment-matched Gaussian reference of a resource. The pure core is built
/// on a cutoff that doubles until the moments are converged; thermal
/// dressing is then added to the covariance.
pub fn gaussian_reference(spec: &ResourceSpec) -> Result<GaussianRef> {
    let pure = ResourceSpec { nth1: 0.0, nth2: 0.0, ..*spec };
    let mut cutoff = DEFAULT_CUTOFF;
    loop {
        let attempt = build_resource_fock_with_tol(&pure, cutoff, ADAPTIVE_TAIL_TOL).and_then(|s| moments_from_fock(&s));
        match attempt {
            Ok(g) => return Ok(g.thermal_dressed(spec.nth1, spec.nth2)),
            Err(Error::Truncation { .. }) if cutoff < MAX_CUTOFF => cutoff *= 2,
            Err(e) => return Err(e),
        }
    }
}

/// `a_mode` applied to an amplitude matrix indexed `(n1, n2)`.
fn lower(psi: &DMatrix<C64>, mode: usize) -> DMatrix<C64> {
    let n = psi.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        let (si, sj) = if mode == 0 { (i + 1, j) } else { (i, j + 1) };
        if si >= n || sj >= n {
            C64::new(0.0, 0.0)
        } else {
            psi[(si, sj)] * ((if mode == 0 { si } else { sj }) as f64).sqrt()
        }
    })
}

/// Value of `d_nG` with the refinement difference between the two orders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonGaussianity {
    pub value: f64,
    pub est_abs_error: f64,
}

/// `d_nG = (Tr ρ² + Tr ρ_G² - 2 Tr ρρ_G) / (2 Tr ρ²)`. Overlaps use
/// `Tr ρ1ρ2 = π^{-2} ∫ d⁴α χ1(α) χ2(-α)`; `Tr ρ² = 1` when `pure` is set.
pub fn non_gaussianity(chi: &CharFn2, reference: &GaussianRef, pure: bool) -> Result<f64> {
    non_gaussianity_with_orders(chi, reference, pure, DNG_ORDERS).map(|d| d.value)
}

pub fn non_gaussianity_with_orders(
    chi: &CharFn2,
    reference: &GaussianRef,
    pure: bool,
    orders: (usize, usize),
) -> Result<NonGaussianity> {
    let eval = |order: usize| -> Result<f64> {
        let q_res = chi.gaussian_form();
        let cross = overlap4(&(q_res + reference.gaussian_form()), order, |a1, a2| chi.eval(a1, a2) * reference.chi(-a1, -a2))?;
        let purity = if pure {
            1.0
        } else {
            overlap4(&(q_res * 2.0), order, |a1, a2| chi.eval(a1, a2) * chi.eval(-a1, -a2))?
        };
        Ok((purity + reference.purity() - 2.0 * cross) / (2.0 * purity))
    };
    let coarse = eval(orders.0)?;
    let fine = eval(orders.1)?;
    let err = (fine - coarse).abs();
    if err > DNG_TOL {
        return Err(Error::Integration(format!(
            "non-Gaussianity did not converge: d({}) = {coarse}, d({}) = {fine}, |Δ| = {err:.3e}",
            orders.0, orders.1
        )));
    }
    Ok(NonGaussianity { value: fine, est_abs_error: err })
}

fn overlap4<F>(q: &Matrix4<f64>, order: usize, f: F) -> Result<f64>
where
    F: Fn(C64, C64) -> C64 + Sync,
{
    let q = DMatrix::from_column_slice(4, 4, q.as_slice());
    let total = integrate_gaussian(&q, order, |v| f(C64::new(v[0], v[1]), C64::new(v[2], v[3])))?;
    Ok(total.re / (std::f64::consts::PI * std::f64::consts::PI))
}

/// Largest `|⟨-ξ|ψ⟩|²` over real `ξ`, with its argmax.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affinity {
    pub value: f64,
    pub xi: f64,
}

const AFFINITY_SEEDS: usize = 8;
const GOLDEN_TOL: f64 = 1e-10;

/// Maximizes `|⟨-ξ|ψ⟩|²` for `ξ ∈ [-xi_max, xi_max]`; `|-ξ⟩` has amplitude
/// `sech ξ tanh^k ξ` on `|k,k⟩`. The interval is split into eight cells, each
/// refined by golden section.
pub fn sv_affinity(state: &TwoModeFockState, xi_max: f64) -> Result<Affinity> {
    if !(xi_max.is_finite() && xi_max > 0.0) {
        return Err(Error::InvalidParameter { name: "xi_max", value: xi_max, reason: "must be positive and finite" });
    }
    if !state.is_normalized(1e-8) {
        return Err(Error::NotNormalized { norm_sq: state.norm_sq() });
    }
    let n = state.cutoff();
    let diag: Vec<C64> = (0..=n).map(|k| state.amp(k, k)).collect();
    let f = |xi: f64| squeezed_vacuum_overlap(&diag, xi).norm_sqr();

    let width = 2.0 * xi_max / AFFINITY_SEEDS as f64;
    let mut best = Affinity { value: f(0.0), xi: 0.0 };
    for cell in 0..AFFINITY_SEEDS {
        let lo = -xi_max + width * cell as f64;
        let (xi, value) = crate::optimize::golden_section_max(f, lo, lo + width, GOLDEN_TOL);
        if value > best.value {
            best = Affinity { value, xi };
        }
    }
    // Mass of |-ξ*⟩ beyond the cutoff.
    let t2 = best.xi.tanh().powi(2);
    let tail = t2.powi(n as i32 + 1);
    if tail > 1e-8 {
        return Err(Error::Truncation { cutoff: n, tail, tol: 1e-8 });
    }
    Ok(best)
}

/// [`sv_affinity`] of a pure resource, doubling the cutoff until `|-ξ*⟩` fits.
pub fn resource_affinity(spec: &ResourceSpec, xi_max: f64) -> Result<Affinity> {
    if !spec.is_pure() {
        return Err(Error::Unsupported("affinity is defined for pure resources".into()));
    }
    let mut cutoff = DEFAULT_CUTOFF;
    loop {
        let attempt = build_resource_fock_with_tol(spec, cutoff, ADAPTIVE_TAIL_TOL).and_then(|s| sv_affinity(&s, xi_max));
        match attempt {
            Err(Error::Truncation { .. }) if cutoff < MAX_CUTOFF => cutoff *= 2,
            other => return other,
        }
    }
}

fn squeezed_vacuum_overlap(diag: &[C64], xi: f64) -> C64 {
    let (sech, t) = (1.0 / xi.cosh(), xi.tanh());
    let mut pow = sech;
    let mut acc = C64::new(0.0, 0.0);
    for &c in diag {
        acc += c * pow;
        pow *= t;
    }
    acc
}
