//! Input and resource states and their symmetrically ordered characteristic
//! functions `χ(α) = Tr[ρ D(α)]`, `D(α) = exp(α a† - α* a)`.
//!
//! Every resource is `S12(ζ)` applied to a symmetric core: either a Fock
//! superposition `Σ_k c_k |k,k⟩` or a superposition of coherent pairs
//! `Σ_j w_j |γ_j,γ_j⟩`. The resource χ is evaluated by pulling the squeeze
//! through the displacements,
//!
//! ```text
//! S† D1(α1) D2(α2) S = D1(ᾱ1) D2(ᾱ2),
//! ᾱ1 = α1 cosh r + e^{iφ} sinh r α2*,   ᾱ2 = α2 cosh r + e^{iφ} sinh r α1*,
//! ```
//!
//! and then summing displaced matrix elements of the core.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{check_nonneg, Error, Result};
use crate::fock::SqueezeParam;
use crate::special::assoc_laguerre;

/// Resource families, without parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    #[serde(alias = "twb")]
    TwinBeam,
    #[serde(alias = "sb")]
    SqueezedBell,
    Ssf,
    #[serde(alias = "cat")]
    SqueezedCat,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 4] =
        [FamilyKind::TwinBeam, FamilyKind::SqueezedBell, FamilyKind::Ssf, FamilyKind::SqueezedCat];

    pub fn name(&self) -> &'static str {
        match self {
            FamilyKind::TwinBeam => "twin_beam",
            FamilyKind::SqueezedBell => "squeezed_bell",
            FamilyKind::Ssf => "ssf",
            FamilyKind::SqueezedCat => "squeezed_cat",
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, FamilyKind::TwinBeam)
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Family-specific superposition parameters (radians).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    TwinBeam,
    /// `cos δ |0,0⟩ + e^{iθ} sin δ |1,1⟩`
    SqueezedBell { delta: f64, theta: f64 },
    /// `c1 |0,0⟩ + e^{iθa} c2 |1,1⟩ + e^{iθb} c3 |2,2⟩` with
    /// `c1 = cos δ1`, `c2 = sin δ1 cos δ2`, `c3 = sin δ1 sin δ2`.
    Ssf { delta1: f64, theta_a: f64, delta2: f64, theta_b: f64 },
    /// `𝒩 (cos δ |0,0⟩ + e^{iθ} sin δ |γ,γ⟩)`
    SqueezedCat { delta: f64, theta: f64, gamma: C64 },
}

impl Family {
    pub fn kind(&self) -> FamilyKind {
        match self {
            Family::TwinBeam => FamilyKind::TwinBeam,
            Family::SqueezedBell { .. } => FamilyKind::SqueezedBell,
            Family::Ssf { .. } => FamilyKind::Ssf,
            Family::SqueezedCat { .. } => FamilyKind::SqueezedCat,
        }
    }
}

/// Unsqueezed, normalized core of a resource.
#[derive(Debug, Clone, PartialEq)]
pub enum Core {
    /// Coefficients of `|k,k⟩`.
    Fock(Vec<C64>),
    /// `(weight, γ)` pairs for `|γ,γ⟩`.
    Coherent(Vec<(C64, C64)>),
}

/// A two-mode resource: squeezed core plus optional thermal dressing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ResourceRecord", into = "ResourceRecord")]
pub struct ResourceSpec {
    pub family: Family,
    pub squeeze: SqueezeParam,
    pub nth1: f64,
    pub nth2: f64,
}

impl ResourceSpec {
    pub fn new(family: Family, squeeze: SqueezeParam) -> Result<Self> {
        let spec = Self { family, squeeze, nth1: 0.0, nth2: 0.0 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn twin_beam(r: f64, phi: f64) -> Result<Self> {
        Self::new(Family::TwinBeam, SqueezeParam::new(r, phi)?)
    }

    pub fn squeezed_bell(r: f64, phi: f64, delta: f64, theta: f64) -> Result<Self> {
        Self::new(Family::SqueezedBell { delta, theta }, SqueezeParam::new(r, phi)?)
    }

    pub fn ssf(r: f64, phi: f64, delta1: f64, theta_a: f64, delta2: f64, theta_b: f64) -> Result<Self> {
        Self::new(Family::Ssf { delta1, theta_a, delta2, theta_b }, SqueezeParam::new(r, phi)?)
    }

    /// SSF resource from real, unnormalized coefficients `(c1, c2, c3)`,
    /// converted to hyperspherical angles (phases zero; signs must be nonnegative).
    pub fn ssf_from_coefficients(r: f64, phi: f64, c: [f64; 3]) -> Result<Self> {
        if c.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::InvalidParameter { name: "c", value: c[0], reason: "coefficients must be finite and nonnegative" });
        }
        let norm = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter { name: "c", value: 0.0, reason: "zero vector" });
        }
        let delta1 = (c[0] / norm).clamp(-1.0, 1.0).acos();
        let delta2 = c[2].atan2(c[1]);
        Self::ssf(r, phi, delta1, 0.0, delta2, 0.0)
    }

    /// The squeezed truncated twin beam `∝ |0,0⟩ + tanh s |1,1⟩ + tanh² s |2,2⟩`.
    pub fn truncated_twin_beam(r: f64, phi: f64, s: f64) -> Result<Self> {
        let t = s.tanh();
        Self::ssf_from_coefficients(r, phi, [1.0, t, t * t])
    }

    pub fn squeezed_cat(r: f64, phi: f64, delta: f64, theta: f64, gamma: C64) -> Result<Self> {
        Self::new(Family::SqueezedCat { delta, theta, gamma }, SqueezeParam::new(r, phi)?)
    }

    /// Adds thermal photons per mode (accumulating with any existing dressing).
    pub fn with_thermal(mut self, nth1: f64, nth2: f64) -> Result<Self> {
        check_nonneg("nth1", nth1)?;
        check_nonneg("nth2", nth2)?;
        self.nth1 += nth1;
        self.nth2 += nth2;
        Ok(self)
    }

    pub fn kind(&self) -> FamilyKind {
        self.family.kind()
    }

    pub fn is_pure(&self) -> bool {
        self.nth1 == 0.0 && self.nth2 == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        check_nonneg("r", self.squeeze.r)?;
        check_nonneg("nth1", self.nth1)?;
        check_nonneg("nth2", self.nth2)?;
        let finite = |name: &'static str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, value: v, reason: "must be finite" })
            }
        };
        finite("phi", self.squeeze.phi)?;
        match self.family {
            Family::TwinBeam => {}
            Family::SqueezedBell { delta, theta } => {
                finite("delta", delta)?;
                finite("theta", theta)?;
            }
            Family::Ssf { delta1, theta_a, delta2, theta_b } => {
                finite("delta1", delta1)?;
                finite("theta_a", theta_a)?;
                finite("delta2", delta2)?;
                finite("theta_b", theta_b)?;
            }
            Family::SqueezedCat { delta, theta, gamma } => {
                finite("delta", delta)?;
                finite("theta", theta)?;
                finite("gamma_re", gamma.re)?;
                finite("gamma_im", gamma.im)?;
                let n = cat_norm_sq(delta, theta, gamma);
                if n < 1e-12 {
                    return Err(Error::InvalidParameter { name: "delta", value: delta, reason: "superposition has zero norm" });
                }
            }
        }
        Ok(())
    }

    /// Normalized unsqueezed core.
    pub fn core(&self) -> Result<Core> {
        self.validate()?;
        Ok(match self.family {
            Family::TwinBeam => Core::Fock(vec![C64::new(1.0, 0.0)]),
            Family::SqueezedBell { delta, theta } => {
                Core::Fock(vec![C64::new(delta.cos(), 0.0), C64::from_polar(delta.sin(), theta)])
            }
            Family::Ssf { delta1, theta_a, delta2, theta_b } => Core::Fock(vec![
                C64::new(delta1.cos(), 0.0),
                C64::from_polar(delta1.sin() * delta2.cos(), theta_a),
                C64::from_polar(delta1.sin() * delta2.sin(), theta_b),
            ]),
            Family::SqueezedCat { delta, theta, gamma } => {
                let n = cat_norm_sq(delta, theta, gamma).sqrt().recip();
                Core::Coherent(vec![
                    (C64::new(n * delta.cos(), 0.0), C64::new(0.0, 0.0)),
                    (C64::from_polar(n * delta.sin(), theta), gamma),
                ])
            }
        })
    }
}

/// `1/𝒩² = 1 + e^{-|γ|²} sin 2δ cos θ`.
pub fn cat_norm_sq(delta: f64, theta: f64, gamma: C64) -> f64 {
    1.0 + (-gamma.norm_sqr()).exp() * (2.0 * delta).sin() * theta.cos()
}

/// Flat, strict text form of [`ResourceSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ResourceRecord {
    family: FamilyKind,
    r: f64,
    #[serde(default = "default_phi")]
    phi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    theta_b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma_re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma_im: Option<f64>,
    #[serde(default)]
    nth1: f64,
    #[serde(default)]
    nth2: f64,
}

fn default_phi() -> f64 {
    std::f64::consts::PI
}

impl TryFrom<ResourceRecord> for ResourceSpec {
    type Error = String;

    fn try_from(rec: ResourceRecord) -> std::result::Result<Self, String> {
        let used: &[(&str, bool)] = &[
            ("delta", rec.delta.is_some()),
            ("theta", rec.theta.is_some()),
            ("delta1", rec.delta1.is_some()),
            ("theta_a", rec.theta_a.is_some()),
            ("delta2", rec.delta2.is_some()),
            ("theta_b", rec.theta_b.is_some()),
            ("gamma_re", rec.gamma_re.is_some()),
            ("gamma_im", rec.gamma_im.is_some()),
        ];
        let allowed: &[&str] = match rec.family {
            FamilyKind::TwinBeam => &[],
            FamilyKind::SqueezedBell => &["delta", "theta"],
            FamilyKind::Ssf => &["delta1", "theta_a", "delta2", "theta_b"],
            FamilyKind::SqueezedCat => &["delta", "theta", "gamma_re", "gamma_im"],
        };
        if let Some((name, _)) = used.iter().find(|(name, set)| *set && !allowed.contains(name)) {
            return Err(format!("field `{name}` is not valid for family `{}`", rec.family));
        }
        let family = match rec.family {
            FamilyKind::TwinBeam => Family::TwinBeam,
            FamilyKind::SqueezedBell => Family::SqueezedBell {
                delta: rec.delta.ok_or("missing field `delta`")?,
                theta: rec.theta.unwrap_or(0.0),
            },
            FamilyKind::Ssf => Family::Ssf {
                delta1: rec.delta1.ok_or("missing field `delta1`")?,
                theta_a: rec.theta_a.unwrap_or(0.0),
                delta2: rec.delta2.ok_or("missing field `delta2`")?,
                theta_b: rec.theta_b.unwrap_or(0.0),
            },
            FamilyKind::SqueezedCat => Family::SqueezedCat {
                delta: rec.delta.ok_or("missing field `delta`")?,
                theta: rec.theta.unwrap_or(0.0),
                gamma: C64::new(rec.gamma_re.ok_or("missing field `gamma_re`")?, rec.gamma_im.unwrap_or(0.0)),
            },
        };
        let squeeze = SqueezeParam::new(rec.r, rec.phi).map_err(|e| e.to_string())?;
        ResourceSpec::new(family, squeeze)
            .and_then(|s| s.with_thermal(rec.nth1, rec.nth2))
            .map_err(|e| e.to_string())
    }
}

impl From<ResourceSpec> for ResourceRecord {
    fn from(spec: ResourceSpec) -> Self {
        let mut rec = ResourceRecord {
            family: spec.kind(),
            r: spec.squeeze.r,
            phi: spec.squeeze.phi,
            delta: None,
            theta: None,
            delta1: None,
            theta_a: None,
            delta2: None,
            theta_b: None,
            gamma_re: None,
            gamma_im: None,
            nth1: spec.nth1,
            nth2: spec.nth2,
        };
        match spec.family {
            Family::TwinBeam => {}
            Family::SqueezedBell { delta, theta } => {
                rec.delta = Some(delta);
                rec.theta = Some(theta);
            }
            Family::Ssf { delta1, theta_a, delta2, theta_b } => {
                rec.delta1 = Some(delta1);
                rec.theta_a = Some(theta_a);
                rec.delta2 = Some(delta2);
                rec.theta_b = Some(theta_b);
            }
            Family::SqueezedCat { delta, theta, gamma } => {
                rec.delta = Some(delta);
                rec.theta = Some(theta);
                rec.gamma_re = Some(gamma.re);
                rec.gamma_im = Some(gamma.im);
            }
        }
        rec
    }
}

/// Single-mode pure input state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InputRecord", into = "InputRecord")]
pub enum InputSpec {
    Coherent { beta: C64 },
    FockOne,
}

impl InputSpec {
    pub fn coherent(beta: C64) -> Self {
        InputSpec::Coherent { beta }
    }

    pub fn name(&self) -> &'static str {
        match self {
            InputSpec::Coherent { .. } => "coherent",
            InputSpec::FockOne => "fock1",
        }
    }

    pub fn chi(&self) -> CharFn1 {
        match *self {
            InputSpec::Coherent { beta } => chi_coherent(beta),
            InputSpec::FockOne => chi_fock1(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum InputKind {
    Coherent,
    #[serde(alias = "fock")]
    Fock1,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputRecord {
    kind: InputKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta_re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta_im: Option<f64>,
}

impl TryFrom<InputRecord> for InputSpec {
    type Error = String;

    fn try_from(rec: InputRecord) -> std::result::Result<Self, String> {
        match rec.kind {
            InputKind::Coherent => {
                let beta = C64::new(rec.beta_re.unwrap_or(0.0), rec.beta_im.unwrap_or(0.0));
                if !beta.re.is_finite() || !beta.im.is_finite() {
                    return Err("beta must be finite".into());
                }
                Ok(InputSpec::Coherent { beta })
            }
            InputKind::Fock1 => {
                if rec.beta_re.is_some() || rec.beta_im.is_some() {
                    return Err("beta is only valid for coherent inputs".into());
                }
                Ok(InputSpec::FockOne)
            }
        }
    }
}

impl From<InputSpec> for InputRecord {
    fn from(spec: InputSpec) -> Self {
        match spec {
            InputSpec::Coherent { beta } => {
                InputRecord { kind: InputKind::Coherent, beta_re: Some(beta.re), beta_im: Some(beta.im) }
            }
            InputSpec::FockOne => InputRecord { kind: InputKind::Fock1, beta_re: None, beta_im: None },
        }
    }
}

/// One-mode characteristic function.
#[derive(Debug, Clone, PartialEq)]
pub enum CharFn1 {
    Coherent { beta: C64 },
    FockOne,
    /// `χ_in(α) · χ_res(α*, α)`
    Teleported { input: Box<CharFn1>, resource: CharFn2 },
}

impl CharFn1 {
    pub fn eval(&self, alpha: C64) -> C64 {
        match self {
            CharFn1::Coherent { beta } => {
                C64::new(-alpha.norm_sqr() / 2.0, 2.0 * (alpha * beta.conj()).im).exp()
            }
            CharFn1::FockOne => {
                let x = alpha.norm_sqr();
                C64::new((-x / 2.0).exp() * (1.0 - x), 0.0)
            }
            CharFn1::Teleported { input, resource } => input.eval(alpha) * resource.eval(alpha.conj(), alpha),
        }
    }

    /// Quadratic form `Q` of the Gaussian decay `exp(-vᵀQv)`, `v = (Re α, Im α)`.
    pub fn gaussian_form(&self) -> Matrix2<f64> {
        match self {
            CharFn1::Coherent { .. } | CharFn1::FockOne => Matrix2::identity() * 0.5,
            CharFn1::Teleported { input, resource } => {
                // (α*, α) embedded in (Re α1, Im α1, Re α2, Im α2)
                let p = nalgebra::Matrix4x2::new(1.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0, 1.0);
                input.gaussian_form() + p.transpose() * resource.gaussian_form() * p
            }
        }
    }
}

pub fn chi_coherent(beta: C64) -> CharFn1 {
    CharFn1::Coherent { beta }
}

pub fn chi_fock1() -> CharFn1 {
    CharFn1::FockOne
}

/// Two-mode characteristic function of a (possibly thermal-dressed) resource.
#[derive(Debug, Clone, PartialEq)]
pub struct CharFn2 {
    core: Core,
    squeeze: SqueezeParam,
    nth1: f64,
    nth2: f64,
}

impl CharFn2 {
    pub fn squeeze(&self) -> SqueezeParam {
        self.squeeze
    }

    pub fn core(&self) -> &Core {
        &self.core
    }

    pub fn thermal(&self) -> (f64, f64) {
        (self.nth1, self.nth2)
    }

    pub fn is_pure(&self) -> bool {
        self.nth1 == 0.0 && self.nth2 == 0.0
    }

    /// Squeezed-frame arguments `(ᾱ1, ᾱ2)`.
    pub fn bogoliubov(&self, a1: C64, a2: C64) -> (C64, C64) {
        let (ch, sh) = (self.squeeze.r.cosh(), self.squeeze.r.sinh());
        let e = C64::from_polar(sh, self.squeeze.phi);
        (a1 * ch + e * a2.conj(), a2 * ch + e * a1.conj())
    }

    pub fn eval(&self, a1: C64, a2: C64) -> C64 {
        let (b1, b2) = self.bogoliubov(a1, a2);
        let core = match &self.core {
            Core::Fock(c) => {
                let mut acc = C64::new(0.0, 0.0);
                for (m, cm) in c.iter().enumerate() {
                    for (p, cp) in c.iter().enumerate() {
                        acc += cm.conj() * cp * displaced_fock_element(m, p, b1) * displaced_fock_element(m, p, b2);
                    }
                }
                acc
            }
            Core::Coherent(components) => {
                let mut acc = C64::new(0.0, 0.0);
                for &(wj, gj) in components {
                    for &(wk, gk) in components {
                        acc += wj.conj() * wk * displaced_coherent_element(gj, gk, b1) * displaced_coherent_element(gj, gk, b2);
                    }
                }
                acc
            }
        };
        let damping = (-self.nth1 * a1.norm_sqr() - self.nth2 * a2.norm_sqr()).exp();
        core * damping
    }

    /// Quadratic form of the Gaussian decay `exp(-vᵀQv)` shared by every term,
    /// `v = (Re α1, Im α1, Re α2, Im α2)`.
    pub fn gaussian_form(&self) -> Matrix4<f64> {
        let (ch, sh) = (self.squeeze.r.cosh(), self.squeeze.r.sinh());
        let (c, s) = (self.squeeze.phi.cos(), self.squeeze.phi.sin());
        // rows: Re ᾱ1, Im ᾱ1, Re ᾱ2, Im ᾱ2
        let t = Matrix4::new(
            ch, 0.0, sh * c, sh * s,
            0.0, ch, sh * s, -sh * c,
            sh * c, sh * s, ch, 0.0,
            sh * s, -sh * c, 0.0, ch,
        );
        t.transpose() * t * 0.5 + Matrix4::from_diagonal(&nalgebra::Vector4::new(self.nth1, self.nth1, self.nth2, self.nth2))
    }
}

/// Characteristic function of a resource.
pub fn chi_resource(spec: &ResourceSpec) -> Result<CharFn2> {
    let core = spec.core()?;
    Ok(CharFn2 { core, squeeze: spec.squeeze, nth1: spec.nth1, nth2: spec.nth2 })
}

/// Multiplies `χ` by `exp(-nth1|α1|² - nth2|α2|²)`.
pub fn thermal_dress(chi: &CharFn2, nth1: f64, nth2: f64) -> Result<CharFn2> {
    check_nonneg("nth1", nth1)?;
    check_nonneg("nth2", nth2)?;
    let mut out = chi.clone();
    out.nth1 += nth1;
    out.nth2 += nth2;
    Ok(out)
}

/// `⟨m|D(α)|n⟩ = √(n!/m!) α^{m-n} e^{-|α|²/2} L_n^{(m-n)}(|α|²)` for `m ≥ n`;
/// the `m < n` case uses `⟨m|D(α)|n⟩ = conj(⟨n|D(-α)|m⟩)`.
pub fn displaced_fock_element(m: usize, n: usize, alpha: C64) -> C64 {
    if m < n {
        return displaced_fock_element(n, m, -alpha).conj();
    }
    let x = alpha.norm_sqr();
    let mut pref = C64::new((-x / 2.0).exp(), 0.0);
    for k in (n + 1)..=m {
        pref *= alpha / (k as f64).sqrt();
    }
    pref * assoc_laguerre(n, (m - n) as f64, x)
}

/// `⟨a|D(α)|c⟩ = ⟨a|c⟩ exp(-|α|²/2 + a* α - c α*)` for coherent states.
pub fn displaced_coherent_element(a: C64, c: C64, alpha: C64) -> C64 {
    let overlap = -a.norm_sqr() / 2.0 - c.norm_sqr() / 2.0 + a.conj() * c;
    (overlap - alpha.norm_sqr() / 2.0 + a.conj() * alpha - c * alpha.conj()).exp()
}
