#![allow(dead_code)]

use cvtele_core::TwoModeFockState;
use num_complex::Complex64 as C64;

/// `r ∈ {0, 0.1, …, 1.5}`.
pub fn r_grid() -> Vec<f64> {
    (0..=15).map(|i| i as f64 / 10.0).collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// `⟨m|D(α)|n⟩` from the normal-ordered form
/// `e^{-|α|²/2} e^{αa†} e^{-α*a}`, summing over intermediate photon numbers.
pub fn displacement_normal_ordered(m: usize, n: usize, alpha: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..=m.min(n) {
        let up = alpha.powu((m - k) as u32) / factorial(m - k) * (factorial(m) / factorial(k)).sqrt();
        let down = (-alpha.conj()).powu((n - k) as u32) / factorial(n - k) * (factorial(n) / factorial(k)).sqrt();
        acc += up * down;
    }
    acc * (-alpha.norm_sqr() / 2.0).exp()
}

/// `⟨ψ|D(α1) ⊗ D(α2)|ψ⟩` on the truncated Fock space.
pub fn fock_chi(state: &TwoModeFockState, a1: C64, a2: C64) -> C64 {
    let n = state.cutoff() + 1;
    let d1: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| displacement_normal_ordered(i, j, a1)).collect()).collect();
    let d2: Vec<Vec<C64>> = (0..n).map(|i| (0..n).map(|j| displacement_normal_ordered(i, j, a2)).collect()).collect();
    let psi = state.amps();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let left = psi[(i, j)].conj();
            if left == C64::new(0.0, 0.0) {
                continue;
            }
            let mut inner = C64::new(0.0, 0.0);
            for k in 0..n {
                for l in 0..n {
                    inner += d1[i][k] * d2[j][l] * psi[(k, l)];
                }
            }
            acc += left * inner;
        }
    }
    acc
}
