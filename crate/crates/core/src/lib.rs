//! Continuous-variable teleportation with non-Gaussian two-mode resources.
//!
//! Resources are squeezed superpositions of twin Fock pairs or of coherent
//! pairs, optionally dressed by independent thermal noise on each mode. The
//! crate evaluates teleportation fidelities for coherent and single-photon
//! inputs, the diagnostics used to characterise the resources, and the
//! optimizers behind the fidelity curves and classical thresholds.

pub mod error;
pub mod fock;
pub mod measures;
pub mod optimize;
pub mod quadrature;
pub mod special;
pub mod states;
pub mod teleport;

pub use error::{Error, Result};
pub use fock::{SqueezeParam, TwoModeFockState};
pub use states::{chi_resource, CharFn1, CharFn2, Core, Family, FamilyKind, InputSpec, ResourceSpec};
pub use teleport::{closed_form_fidelity, fidelity, fidelity_quadrature, FidelityMethod, FidelityResult};
pub use measures::{gaussian_reference, moments_from_fock, non_gaussianity, resource_affinity, sv_affinity, Affinity, GaussianRef};
pub use optimize::{classical_threshold, optimize_resource, optimize_truncated_twb, verify_truncated_twb_collapse, OptResult};
