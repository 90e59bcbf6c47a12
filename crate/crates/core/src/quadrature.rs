//! Gauss–Hermite rules and tensor-product integration over `R^n` with an
//! explicit Gaussian envelope.
//!
//! [`integrate_gaussian`] computes `∫ f(v) d^n v` for integrands that decay
//! like `exp(-vᵀ Q v)`. The envelope is factored out by the Cholesky whitening
//! `v = L^{-T} z` with `Q = L Lᵀ`, so the rule is exact whenever
//! `f(v)·exp(vᵀ Q v)` is a polynomial of degree below `2·order`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Rule for the weight `exp(-x^2)` on the real line, computed by Newton
    /// iteration on the orthonormal Hermite recurrence.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss–Hermite order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let pim4 = PI.powf(-0.25);
        let nf = n as f64;
        let m = n.div_ceil(2);
        let mut z = 0.0;
        for i in 0..m {
            // Initial guesses for the largest roots, then extrapolate inward.
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 1..=n {
                    let jf = j as f64;
                    let p3 = p2;
                    p2 = p1;
                    p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let dz = p1 / pp;
                z -= dz;
                if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        // Ascending order.
        nodes.reverse();
        weights.reverse();
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ exp(-x^2) f(x) dx`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Weights multiplied by `exp(x^2)`, for integrating unweighted integrands
    /// that carry their own Gaussian decay.
    fn scaled_weights(&self) -> Vec<f64> {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * (x * x).exp()).collect()
    }
}

/// `∫_{R^n} f(v) d^n v` with envelope `exp(-vᵀ Q v)`. `Q` must be symmetric
/// positive definite. The outer axis is split across rayon workers; partial
/// sums are reduced in a fixed order so results are bitwise reproducible.
pub fn integrate_gaussian<F>(q: &DMatrix<f64>, order: usize, f: F) -> Result<C64>
where
    F: Fn(&[f64]) -> C64 + Sync,
{
    let dim = q.nrows();
    if dim == 0 || q.ncols() != dim {
        return Err(Error::Shape(format!("envelope must be square and nonempty, got {}x{}", q.nrows(), q.ncols())));
    }
    let chol = q
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Integration("envelope matrix is not positive definite".into()))?;
    let l = chol.l();
    let det_l: f64 = l.diagonal().iter().product();
    // v = L^{-T} z
    let lt_inv = l
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::Integration("singular envelope factor".into()))?;

    let rule = GaussHermite::new(order);
    let z = rule.nodes().to_vec();
    let w = rule.scaled_weights();
    let inner_points = order.pow(dim as u32 - 1);

    let partials: Vec<C64> = (0..order)
        .into_par_iter()
        .map(|i0| {
            let mut zv = DVector::<f64>::zeros(dim);
            let mut v = vec![0.0; dim];
            let mut acc = C64::new(0.0, 0.0);
            for flat in 0..inner_points {
                let mut rem = flat;
                let mut weight = w[i0];
                zv[0] = z[i0];
                for d in 1..dim {
                    let idx = rem % order;
                    rem /= order;
                    zv[d] = z[idx];
                    weight *= w[idx];
                }
                let vv = &lt_inv * &zv;
                v.copy_from_slice(vv.as_slice());
                acc += f(&v) * weight;
            }
            acc
        })
        .collect();
    let total: C64 = partials.into_iter().sum();
    let value = total / det_l;
    if !value.re.is_finite() || !value.im.is_finite() {
        return Err(Error::Integration(format!("non-finite result at order {order}")));
    }
    Ok(value)
}
