//! Truncated two-mode Fock-space numerics.
//!
//! States are stored as amplitude matrices `amps[(m, n)] = ⟨m,n|ψ⟩` with a
//! common photon-number cutoff `N` per mode. Two-mode squeezing uses the
//! normal-ordered (disentangled) factorization
//!
//! ```text
//! S(ζ) = exp(-e^{iφ} tanh r a1†a2†) · cosh(r)^{-(n1+n2+1)} · exp(e^{-iφ} tanh r a1a2)
//! ```
//!
//! with `S(ζ) = exp(-ζ a1†a2† + ζ* a1a2)`, `ζ = r e^{iφ}`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{check_nonneg, Error, Result};
use crate::states::{Core, ResourceSpec};

/// Truncated mass tolerated by constructors that take an explicit cutoff.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;
/// Target truncated mass for the adaptive constructors.
pub const ADAPTIVE_TAIL_TOL: f64 = 1e-10;
pub const DEFAULT_CUTOFF: usize = 40;
pub const MAX_CUTOFF: usize = 320;

/// Eigenvalues below this are dropped from entropy sums.
const SPECTRUM_FLOOR: f64 = 1e-14;

/// Two-mode squeezing parameter `ζ = r e^{iφ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParam {
    pub r: f64,
    pub phi: f64,
}

impl SqueezeParam {
    pub fn new(r: f64, phi: f64) -> Result<Self> {
        check_nonneg("r", r)?;
        if !phi.is_finite() {
            return Err(Error::InvalidParameter { name: "phi", value: phi, reason: "must be finite" });
        }
        Ok(Self { r, phi })
    }

    pub fn zeta(&self) -> C64 {
        C64::from_polar(self.r, self.phi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeFockState {
    amps: DMatrix<C64>,
}

impl TwoModeFockState {
    pub fn from_amplitudes(amps: DMatrix<C64>) -> Result<Self> {
        if amps.nrows() != amps.ncols() || amps.nrows() == 0 {
            return Err(Error::Shape(format!("amplitude matrix must be square, got {}x{}", amps.nrows(), amps.ncols())));
        }
        Ok(Self { amps })
    }

    /// `|m, n⟩` at the given cutoff.
    pub fn basis(m: usize, n: usize, cutoff: usize) -> Result<Self> {
        if m > cutoff || n > cutoff {
            return Err(Error::Shape(format!("|{m},{n}⟩ does not fit cutoff {cutoff}")));
        }
        let mut amps = DMatrix::zeros(cutoff + 1, cutoff + 1);
        amps[(m, n)] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    /// Unnormalized `Σ_k coeffs[k] |k,k⟩`.
    pub fn diagonal(coeffs: &[C64], cutoff: usize) -> Result<Self> {
        if coeffs.len() > cutoff + 1 {
            return Err(Error::Shape(format!("{} diagonal terms exceed cutoff {cutoff}", coeffs.len())));
        }
        let mut amps = DMatrix::zeros(cutoff + 1, cutoff + 1);
        for (k, &c) in coeffs.iter().enumerate() {
            amps[(k, k)] = c;
        }
        Ok(Self { amps })
    }

    pub fn cutoff(&self) -> usize {
        self.amps.nrows() - 1
    }

    pub fn amps(&self) -> &DMatrix<C64> {
        &self.amps
    }

    pub fn amp(&self, m: usize, n: usize) -> C64 {
        if m <= self.cutoff() && n <= self.cutoff() {
            self.amps[(m, n)]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Mass on the outermost row and column (`m = N` or `n = N`).
    pub fn edge_mass(&self) -> f64 {
        let n = self.cutoff();
        let row: f64 = (0..=n).map(|k| self.amps[(n, k)].norm_sqr()).sum();
        let col: f64 = (0..n).map(|k| self.amps[(k, n)].norm_sqr()).sum();
        row + col
    }

    pub fn normalized(&self) -> Result<Self> {
        let ns = self.norm_sq();
        if ns <= 0.0 || !ns.is_finite() {
            return Err(Error::NotNormalized { norm_sq: ns });
        }
        Ok(Self { amps: self.amps.map(|a| a / ns.sqrt()) })
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sq() - 1.0).abs() <= tol
    }

    /// Applies `S(ζ)` and keeps the projection onto the truncated space.
    pub fn squeezed(&self, zeta: SqueezeParam) -> Self {
        Self { amps: apply_two_mode_squeeze(&self.amps, zeta) }
    }

    /// Same state in a larger (or equal) cutoff, zero padded.
    pub fn embedded(&self, cutoff: usize) -> Result<Self> {
        if cutoff < self.cutoff() {
            return Err(Error::Shape(format!("cannot embed cutoff {} into {cutoff}", self.cutoff())));
        }
        let mut amps = DMatrix::zeros(cutoff + 1, cutoff + 1);
        amps.view_mut((0, 0), (self.cutoff() + 1, self.cutoff() + 1)).copy_from(&self.amps);
        Ok(Self { amps })
    }
}

fn apply_two_mode_squeeze(amps: &DMatrix<C64>, zeta: SqueezeParam) -> DMatrix<C64> {
    let dim = amps.nrows();
    if zeta.r == 0.0 {
        return amps.clone();
    }
    let t = zeta.r.tanh();
    let cosh = zeta.r.cosh();
    let e = C64::from_polar(1.0, zeta.phi);
    let lower = e.conj() * t; // exp(e^{-iφ} tanh r a1a2)
    let raise = -e * t; // exp(-e^{iφ} tanh r a1†a2†)

    let mut annihilated = DMatrix::<C64>::zeros(dim, dim);
    for p in 0..dim {
        for q in 0..dim {
            let a = amps[(p, q)];
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            let mut coef = C64::new(1.0, 0.0);
            annihilated[(p, q)] += a;
            for k in 1..=p.min(q) {
                coef *= lower * (((p - k + 1) * (q - k + 1)) as f64).sqrt() / k as f64;
                annihilated[(p - k, q - k)] += coef * a;
            }
        }
    }

    let inv_cosh = 1.0 / cosh;
    for u in 0..dim {
        for v in 0..dim {
            annihilated[(u, v)] *= inv_cosh.powi((u + v + 1) as i32);
        }
    }

    let mut out = DMatrix::<C64>::zeros(dim, dim);
    for u in 0..dim {
        for v in 0..dim {
            let a = annihilated[(u, v)];
            if a == C64::new(0.0, 0.0) {
                continue;
            }
            out[(u, v)] += a;
            let mut coef = C64::new(1.0, 0.0);
            let mut j = 1;
            while u + j < dim && v + j < dim {
                coef *= raise * (((u + j) * (v + j)) as f64).sqrt() / j as f64;
                out[(u + j, v + j)] += coef * a;
                j += 1;
            }
        }
    }
    out
}

/// `S(ζ)|n,n⟩` in the truncated basis. Fails when the mass lost to the
/// cutoff exceeds [`DEFAULT_TAIL_TOL`].
pub fn squeezed_fock_pair(zeta: SqueezeParam, n: usize, cutoff: usize) -> Result<TwoModeFockState> {
    squeezed_fock_pair_with_tol(zeta, n, cutoff, DEFAULT_TAIL_TOL)
}

pub fn squeezed_fock_pair_with_tol(
    zeta: SqueezeParam,
    n: usize,
    cutoff: usize,
    tol: f64,
) -> Result<TwoModeFockState> {
    let state = TwoModeFockState::basis(n, n, cutoff)?.squeezed(zeta);
    let tail = (1.0 - state.norm_sq()).max(0.0);
    if tail > tol {
        return Err(Error::Truncation { cutoff, tail, tol });
    }
    Ok(state)
}

/// Unsqueezed, normalized core of a pure resource in the truncated basis.
/// Coherent components are expanded with `e^{-|γ|²/2} γⁿ/√n!`.
fn core_amplitudes(core: &Core, cutoff: usize) -> DMatrix<C64> {
    let dim = cutoff + 1;
    let mut amps = DMatrix::<C64>::zeros(dim, dim);
    match core {
        Core::Fock(coeffs) => {
            for (k, &c) in coeffs.iter().enumerate().take(dim) {
                amps[(k, k)] += c;
            }
        }
        Core::Coherent(components) => {
            for &(w, gamma) in components {
                let expansion = coherent_expansion(gamma, cutoff);
                for m in 0..dim {
                    for n in 0..dim {
                        amps[(m, n)] += w * expansion[m] * expansion[n];
                    }
                }
            }
        }
    }
    amps
}

/// Fock coefficients of the coherent state `|γ⟩` up to `cutoff`.
pub fn coherent_expansion(gamma: C64, cutoff: usize) -> Vec<C64> {
    let mut out = Vec::with_capacity(cutoff + 1);
    let mut c = C64::new((-gamma.norm_sqr() / 2.0).exp(), 0.0);
    out.push(c);
    for n in 1..=cutoff {
        c *= gamma / (n as f64).sqrt();
        out.push(c);
    }
    out
}

/// Normalized truncated expansion of a pure resource at a fixed cutoff.
pub fn build_resource_fock(spec: &ResourceSpec, cutoff: usize) -> Result<TwoModeFockState> {
    build_resource_fock_with_tol(spec, cutoff, DEFAULT_TAIL_TOL)
}

pub fn build_resource_fock_with_tol(spec: &ResourceSpec, cutoff: usize, tol: f64) -> Result<TwoModeFockState> {
    if !spec.is_pure() {
        return Err(Error::Unsupported(
            "thermal-dressed resources are mixed; use the characteristic-function path".into(),
        ));
    }
    let core = spec.core()?;
    let state = TwoModeFockState { amps: core_amplitudes(&core, cutoff) }.squeezed(spec.squeeze);
    let tail = (1.0 - state.norm_sq()).max(0.0);
    if tail > tol {
        return Err(Error::Truncation { cutoff, tail, tol });
    }
    Ok(state)
}

/// Doubles the cutoff from [`DEFAULT_CUTOFF`] until the truncated mass falls
/// below [`ADAPTIVE_TAIL_TOL`].
pub fn build_resource_fock_adaptive(spec: &ResourceSpec) -> Result<TwoModeFockState> {
    let mut cutoff = DEFAULT_CUTOFF;
    loop {
        match build_resource_fock_with_tol(spec, cutoff, ADAPTIVE_TAIL_TOL) {
            Err(Error::Truncation { .. }) if cutoff < MAX_CUTOFF => cutoff *= 2,
            other => return other,
        }
    }
}

/// `⟨a|b⟩`, conjugate-linear in `a`. Unequal cutoffs are compared on the
/// common subspace, which equals embedding the smaller state into the larger.
pub fn overlap(a: &TwoModeFockState, b: &TwoModeFockState) -> C64 {
    let n = a.cutoff().min(b.cutoff()) + 1;
    let mut acc = C64::new(0.0, 0.0);
    for m in 0..n {
        for k in 0..n {
            acc += a.amps[(m, k)].conj() * b.amps[(m, k)];
        }
    }
    acc
}

/// Squared Schmidt coefficients, descending.
pub fn schmidt_spectrum(state: &TwoModeFockState) -> Vec<f64> {
    let svd = state.amps.clone().svd(false, false);
    let mut lambdas: Vec<f64> = svd.singular_values.iter().map(|s| s * s).collect();
    lambdas.sort_by(|x, y| y.total_cmp(x));
    lambdas
}

/// Eigenvalues (descending) of the reduced density matrices of mode 1 and
/// mode 2, computed independently by partial traces.
pub fn reduced_spectra(state: &TwoModeFockState) -> (Vec<f64>, Vec<f64>) {
    let a = &state.amps;
    let rho1 = a * a.adjoint();
    let rho2 = a.transpose() * a.map(|z| z.conj());
    let spec = |rho: DMatrix<C64>| {
        let mut ev: Vec<f64> = rho.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|x, y| y.total_cmp(x));
        ev
    };
    (spec(rho1), spec(rho2))
}

/// Entanglement entropy in nats from the Schmidt spectrum.
pub fn von_neumann_entropy(state: &TwoModeFockState) -> Result<f64> {
    let ns = state.norm_sq();
    if (ns - 1.0).abs() > 1e-8 {
        return Err(Error::NotNormalized { norm_sq: ns });
    }
    Ok(entropy_of_spectrum(&schmidt_spectrum(state)))
}

pub(crate) fn entropy_of_spectrum(lambdas: &[f64]) -> f64 {
    let s: f64 = lambdas.iter().filter(|&&l| l > SPECTRUM_FLOOR).map(|&l| -l * l.ln()).sum();
    s.max(0.0)
}
