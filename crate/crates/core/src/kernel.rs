//! Radial kernels `f(|x − y|)` and their Bochner measures.
//!
//! Measures use the angular-mean convention for planar domains:
//!
//! ```text
//! F[Ω] = ∫_0^∞ ⟨|χ̂_Ω|²⟩_{|ξ|=ρ} dν(ρ),   ⟨g⟩_{|ξ|=ρ} = (1/2π) ∫_0^{2π} g(ρ ω(φ)) dφ
//! ```
//!
//! so the total mass of `ν` equals `f(0)`. For the planar Bessel kernel
//! `J_0(λr)` this makes `ν` a unit atom at `ρ = λ`, and `F` is the angular
//! mean of `|χ̂_Ω|²` on the circle of radius `λ`.

use serde::{Deserialize, Serialize};

use crate::specfun::{bessel_j_half, gamma_half_integer, jn};
use crate::{Error, Result};

/// Below this radius the Bessel kernel returns its `r → 0` limit.
const ORIGIN_CUTOFF: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelKind {
    /// `J_{(n−2)/2}(λr) / r^{(n−2)/2}`, positive definite on `ℝ^n` and hence on the plane.
    Bessel { lambda: f64, dim: u32 },
    /// `exp(−r² / 2σ²)`.
    Gaussian { sigma: f64 },
    /// `f ≡ c`.
    Constant { c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelKind", into = "KernelKind")]
pub struct RadialKernel {
    kind: KernelKind,
}

impl TryFrom<KernelKind> for RadialKernel {
    type Error = Error;

    fn try_from(kind: KernelKind) -> Result<Self> {
        RadialKernel::new(kind)
    }
}

impl From<RadialKernel> for KernelKind {
    fn from(kernel: RadialKernel) -> Self {
        kernel.kind
    }
}

impl RadialKernel {
    pub fn new(kind: KernelKind) -> Result<Self> {
        match kind {
            KernelKind::Bessel { lambda, dim } => {
                if !(lambda.is_finite() && lambda > 0.0) {
                    return Err(Error::InvalidInput(format!("lambda must be positive, got {lambda}")));
                }
                if !(2..=130).contains(&dim) {
                    return Err(Error::InvalidInput(format!("dimension must be in 2..=130, got {dim}")));
                }
            }
            KernelKind::Gaussian { sigma } => {
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
                }
            }
            KernelKind::Constant { c } => {
                if !c.is_finite() {
                    return Err(Error::InvalidInput("constant kernel value must be finite".into()));
                }
            }
        }
        Ok(Self { kind })
    }

    pub fn bessel(lambda: f64, dim: u32) -> Result<Self> {
        Self::new(KernelKind::Bessel { lambda, dim })
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(KernelKind::Gaussian { sigma })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new(KernelKind::Constant { c })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn positive_definite(&self) -> bool {
        match self.kind {
            KernelKind::Bessel { .. } | KernelKind::Gaussian { .. } => true,
            KernelKind::Constant { c } => c >= 0.0,
        }
    }

    /// `λ` of a planar Bessel kernel, the only kind the spectral energy route handles.
    pub fn planar_bessel_lambda(&self) -> Option<f64> {
        match self.kind {
            KernelKind::Bessel { lambda, dim: 2 } => Some(lambda),
            _ => None,
        }
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("kernel radius must be finite and non-negative, got {r}")));
        }
        Ok(self.eval_unchecked(r))
    }

    pub(crate) fn eval_unchecked(&self, r: f64) -> f64 {
        match self.kind {
            KernelKind::Bessel { lambda, dim } => lambda_power(lambda, dim) * bessel_profile(dim, lambda * r),
            KernelKind::Gaussian { sigma } => (-r * r / (2.0 * sigma * sigma)).exp(),
            KernelKind::Constant { c } => c,
        }
    }

    pub fn bochner_measure(&self) -> Result<BochnerMeasure> {
        if !self.positive_definite() {
            return Err(Error::Unsupported(format!(
                "kernel {:?} is not positive definite and has no Bochner measure",
                self.kind
            )));
        }
        Ok(match self.kind {
            KernelKind::Bessel { lambda, dim: 2 } => BochnerMeasure::Atom { radius: lambda, mass: 1.0 },
            KernelKind::Bessel { lambda, dim } => BochnerMeasure::ProjectedSphere {
                lambda,
                dim,
                mass: self.eval_unchecked(0.0),
            },
            KernelKind::Gaussian { sigma } => BochnerMeasure::Gaussian { sigma },
            KernelKind::Constant { c } => BochnerMeasure::Atom { radius: 0.0, mass: c },
        })
    }
}

/// `λ^p` with `p = (n − 2)/2`.
fn lambda_power(lambda: f64, dim: u32) -> f64 {
    lambda.powf(0.5 * f64::from(dim - 2))
}

/// `J_p(z) / z^p` with `p = (n − 2)/2`, continuous at the origin.
fn bessel_profile(dim: u32, z: f64) -> f64 {
    let twice_p = dim - 2;
    if z < ORIGIN_CUTOFF {
        let p = 0.5 * f64::from(twice_p);
        return 1.0 / (2f64.powf(p) * gamma_half_integer(dim));
    }
    if twice_p.is_multiple_of(2) {
        let p = twice_p / 2;
        jn(p, z) / z.powi(p as i32)
    } else {
        let l = (twice_p - 1) / 2;
        bessel_j_half(l, z) / z.powf(f64::from(l) + 0.5)
    }
}

/// Radial Bochner measure in the angular-mean convention of this module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BochnerMeasure {
    /// Point mass on the circle `|ξ| = radius`.
    Atom { radius: f64, mass: f64 },
    /// `dν = σ² ρ exp(−σ²ρ²/2) dρ`; the planar spectral density is `(σ²/2π) exp(−σ²|ξ|²/2)`.
    Gaussian { sigma: f64 },
    /// Projection onto the plane of the uniform measure on the sphere `|ξ| = λ` in `ℝ^dim`:
    /// `dν ∝ ρ (λ² − ρ²)^{(dim−4)/2} dρ` on `(0, λ)`, total mass `mass`.
    ProjectedSphere { lambda: f64, dim: u32, mass: f64 },
}

impl BochnerMeasure {
    pub fn is_discrete(&self) -> bool {
        matches!(self, BochnerMeasure::Atom { .. })
    }

    /// Density with respect to `dρ`; `None` for atoms.
    pub fn density(&self, rho: f64) -> Option<f64> {
        match *self {
            BochnerMeasure::Atom { .. } => None,
            BochnerMeasure::Gaussian { sigma } => {
                let s2 = sigma * sigma;
                Some(if rho < 0.0 { 0.0 } else { s2 * rho * (-0.5 * s2 * rho * rho).exp() })
            }
            BochnerMeasure::ProjectedSphere { lambda, dim, mass } => {
                if rho <= 0.0 || rho >= lambda {
                    return Some(0.0);
                }
                let exponent = 0.5 * (f64::from(dim) - 4.0);
                let norm = mass * f64::from(dim - 2) / lambda.powi(dim as i32 - 2);
                Some(norm * rho * (lambda * lambda - rho * rho).powf(exponent))
            }
        }
    }

    pub fn total_mass(&self) -> f64 {
        match *self {
            BochnerMeasure::Atom { mass, .. } | BochnerMeasure::ProjectedSphere { mass, .. } => mass,
            BochnerMeasure::Gaussian { .. } => 1.0,
        }
    }
}

const CHEB_DEGREE: usize = 14;
const PANEL_WIDTH: f64 = 1.0;

/// Kernel evaluator for hot loops.
///
/// Bessel kernels are tabulated as piecewise Chebyshev series in `z = λr` on
/// unit panels covering `[0, λ·r_max]`; other kinds (and radii past the table)
/// are evaluated directly.
#[derive(Debug, Clone)]
pub struct KernelTable {
    kernel: RadialKernel,
    /// `(λ, λ^p)` for tabulated Bessel kernels.
    scale: Option<(f64, f64)>,
    panels: Vec<[f64; CHEB_DEGREE + 1]>,
    z_max: f64,
}

impl KernelTable {
    pub fn new(kernel: RadialKernel, r_max: f64) -> Self {
        let KernelKind::Bessel { lambda, dim } = kernel.kind else {
            return Self { kernel, scale: None, panels: Vec::new(), z_max: 0.0 };
        };
        let n_panels = ((lambda * r_max.max(0.0)) / PANEL_WIDTH).ceil() as usize + 1;
        let panels = (0..n_panels)
            .map(|i| chebyshev_panel(|z| bessel_profile(dim, z), i as f64 * PANEL_WIDTH, PANEL_WIDTH))
            .collect();
        Self {
            kernel,
            scale: Some((lambda, lambda_power(lambda, dim))),
            panels,
            z_max: n_panels as f64 * PANEL_WIDTH,
        }
    }

    pub fn kernel(&self) -> &RadialKernel {
        &self.kernel
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        match self.scale {
            Some((lambda, prefactor)) => {
                let z = lambda * r;
                if z >= self.z_max {
                    return self.kernel.eval_unchecked(r);
                }
                let panel = (z / PANEL_WIDTH) as usize;
                let t = 2.0 * (z - panel as f64 * PANEL_WIDTH) / PANEL_WIDTH - 1.0;
                prefactor * clenshaw(&self.panels[panel], t)
            }
            None => self.kernel.eval_unchecked(r),
        }
    }
}

fn chebyshev_panel(f: impl Fn(f64) -> f64, start: f64, width: f64) -> [f64; CHEB_DEGREE + 1] {
    let n = CHEB_DEGREE + 1;
    let samples: Vec<f64> = (0..n)
        .map(|j| {
            let t = (std::f64::consts::PI * (j as f64 + 0.5) / n as f64).cos();
            f(start + 0.5 * width * (t + 1.0))
        })
        .collect();
    let mut coeffs = [0.0; CHEB_DEGREE + 1];
    for (k, c) in coeffs.iter_mut().enumerate() {
        let sum: f64 = samples
            .iter()
            .enumerate()
            .map(|(j, s)| s * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
            .sum();
        *c = 2.0 * sum / n as f64;
    }
    coeffs[0] *= 0.5;
    coeffs
}

#[inline]
fn clenshaw(coeffs: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + coeffs[0]
}
