//! First and second shape derivatives of the domain energy.
//!
//! Along a deformation with normal velocity `v = ⟨V, η⟩`,
//! `dF = 2∮ u·v ds` where `u` is the interior potential, so the boundary
//! gradient density is `g = 2u`. At a critical shape with `F = 0` the second
//! derivative reduces to the boundary form `Q(v, w) = 2∮∮ f(|x − x'|) v(x) w(x') ds ds'`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::energy::{extent, potential_tabulated, FourierSlice};
use crate::geometry::{BoundaryGrid, InteriorQuadrature, StarShape};
use crate::kernel::{KernelTable, RadialKernel};
use crate::quadrature::CompensatedSum;
use crate::specfun::jn;
use crate::{Error, Result};

/// `|F|` above which a Hessian evaluation is flagged as off-critical.
pub const CRITICAL_ENERGY_TOL: f64 = 1e-6;

/// Normal velocity samples aligned with a [`BoundaryGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct NormalVelocity(Vec<f64>);

impl NormalVelocity {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("velocity sample {i} is not finite")));
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// Samples `v(θ_j)` on the grid angles.
    pub fn from_fn(grid: &BoundaryGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid.theta.iter().map(|&t| f(t)).collect())
    }

    /// Normal trace `⟨b, η⟩` of the constant field `b`.
    pub fn translation(grid: &BoundaryGrid, b: [f64; 2]) -> Self {
        Self(grid.normals.iter().map(|n| b[0] * n[0] + b[1] * n[1]).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn check(&self, grid: &BoundaryGrid) -> Result<()> {
        if self.len() != grid.len() {
            return Err(Error::LengthMismatch { expected: grid.len(), found: self.len() });
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for NormalVelocity {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<NormalVelocity> for Vec<f64> {
    fn from(v: NormalVelocity) -> Self {
        v.0
    }
}

/// Boundary trace `g_j = 2u(x_j)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientDensity {
    pub values: Vec<f64>,
    pub sup_norm: f64,
}

impl GradientDensity {
    fn from_values(values: Vec<f64>) -> Self {
        let sup_norm = values.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        Self { values, sup_norm }
    }

    /// `∮ g² ds`, the first-order energy decrease per unit time of the antigradient flow.
    pub fn squared_norm(&self, grid: &BoundaryGrid) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|g| g * g).collect();
        grid.integrate(&sq)
    }
}

/// `g_j = 2∫_Ω f(|x_j − y|) dy` by the interior rule.
pub fn gradient_density(kernel: &RadialKernel, grid: &BoundaryGrid, quad: &InteriorQuadrature) -> GradientDensity {
    let table = KernelTable::new(*kernel, extent(grid.points.iter().chain(&quad.nodes)));
    let values = grid.points.iter().map(|&x| 2.0 * potential_tabulated(&table, x, quad)).collect();
    GradientDensity::from_values(values)
}

/// `u(x_j) = (1/M) Σ_i Re[e^{iλ⟨ω_i, x_j⟩} conj χ̂(λω_i)]` for the planar Bessel kernel.
pub(crate) fn spectral_potential(slice: &FourierSlice, x: [f64; 2]) -> f64 {
    let mut acc = CompensatedSum::new();
    for (phi, chi) in slice.directions.iter().zip(&slice.values) {
        let (s, c) = phi.sin_cos();
        let e = Complex64::from_polar(1.0, slice.lambda * (c * x[0] + s * x[1]));
        acc.add((e * chi.conj()).re);
    }
    acc.value() / slice.values.len() as f64
}

/// Gradient density for `J_0(λr)` through the Fourier slice on `|ξ| = λ`.
pub fn gradient_density_spectral(grid: &BoundaryGrid, lambda: f64, n_directions: usize) -> Result<GradientDensity> {
    if n_directions < 16 || !n_directions.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "direction count must be even and at least 16, got {n_directions}"
        )));
    }
    let slice = FourierSlice::new(grid, lambda, n_directions)?;
    let values = grid.points.iter().map(|&x| 2.0 * spectral_potential(&slice, x)).collect();
    Ok(GradientDensity::from_values(values))
}

/// `dF = Σ_j g_j v_j w_j`.
pub fn directional_derivative(density: &GradientDensity, grid: &BoundaryGrid, v: &NormalVelocity) -> Result<f64> {
    v.check(grid)?;
    if density.values.len() != grid.len() {
        return Err(Error::LengthMismatch { expected: grid.len(), found: density.values.len() });
    }
    let mut acc = CompensatedSum::new();
    for ((g, v), w) in density.values.iter().zip(v.values()).zip(&grid.weights) {
        acc.add(g * v * w);
    }
    Ok(acc.value())
}

/// Moves each boundary node by `eps·v_j` along the normal, expressed as the
/// radial increment `eps·v_j·s_j/r_j`, and refits `harmonics` Fourier modes.
///
/// `grid` must be the sampling of `shape`.
pub fn normal_deformation(
    shape: &StarShape,
    grid: &BoundaryGrid,
    v: &NormalVelocity,
    eps: f64,
    harmonics: usize,
) -> Result<StarShape> {
    v.check(grid)?;
    let mut radii = Vec::with_capacity(grid.len());
    for j in 0..grid.len() {
        let r = grid.radius[j] + eps * v.values()[j] * grid.speed[j] / grid.radius[j];
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::DegenerateShape { theta: grid.theta[j], radius: r });
        }
        radii.push(r);
    }
    StarShape::from_radius_samples(shape.center(), &radii, harmonics)
}

/// Symmetric kernel matrix `f(|x_j − x_j'|)` on a boundary grid.
struct BoundaryGram {
    n: usize,
    values: Vec<f64>,
}

impl BoundaryGram {
    fn new(kernel: &RadialKernel, grid: &BoundaryGrid) -> Self {
        let table = KernelTable::new(*kernel, extent(&grid.points));
        let n = grid.len();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = table.eval(0.0);
            for j in (i + 1)..n {
                let (dx, dy) = (grid.points[i][0] - grid.points[j][0], grid.points[i][1] - grid.points[j][1]);
                let f = table.eval((dx * dx + dy * dy).sqrt());
                values[i * n + j] = f;
                values[j * n + i] = f;
            }
        }
        Self { n, values }
    }

    /// `2 Σ_j Σ_j' F_jj' a_j b_j'`, evaluated pairwise so that swapping `a` and `b`
    /// gives a bitwise identical result.
    fn form(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut total = CompensatedSum::new();
        for i in 0..self.n {
            let row = &self.values[i * self.n..(i + 1) * self.n];
            let mut acc = CompensatedSum::new();
            acc.add(row[i] * a[i] * b[i]);
            for j in (i + 1)..self.n {
                acc.add(row[j] * (a[i] * b[j] + a[j] * b[i]));
            }
            total.add(acc.value());
        }
        2.0 * total.value()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianValue {
    pub value: f64,
    /// Set when the supplied energy is not near zero; the reduced form is the
    /// second derivative only at critical shapes with `F = 0`.
    pub off_critical: bool,
}

/// `Q(v, w) = 2 Σ_j Σ_j' f(|x_j − x_j'|) v_j w_j' ds_j ds_j'`.
///
/// `energy` is the caller's value of `F` on the shape.
pub fn hessian_form(
    kernel: &RadialKernel,
    grid: &BoundaryGrid,
    v: &NormalVelocity,
    w: &NormalVelocity,
    energy: f64,
) -> Result<HessianValue> {
    v.check(grid)?;
    w.check(grid)?;
    let gram = BoundaryGram::new(kernel, grid);
    let a: Vec<f64> = v.values().iter().zip(&grid.weights).map(|(v, s)| v * s).collect();
    let b: Vec<f64> = w.values().iter().zip(&grid.weights).map(|(w, s)| w * s).collect();
    Ok(HessianValue { value: gram.form(&a, &b), off_critical: !(energy.abs() <= CRITICAL_ENERGY_TOL) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Cos,
    Sin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeEntry {
    pub k: u32,
    pub parity: Parity,
    pub value: f64,
    /// Closed form `4π²R²J_k(λR)²` (`k ≥ 1`) or `2(2πR)²J_0(λR)²`.
    pub reference: f64,
    pub kernel_mode: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianSpectrum {
    pub radius: f64,
    pub lambda: f64,
    pub entries: Vec<ModeEntry>,
}

impl HessianSpectrum {
    pub fn get(&self, k: u32, parity: Parity) -> Option<&ModeEntry> {
        self.entries.iter().find(|e| e.k == k && e.parity == parity)
    }
}

/// `Q(Y_k, Y_k)` on the disk of radius `radius` for `Y_k ∈ {cos kθ, sin kθ}`, `k ≤ k_max`.
pub fn ball_mode_spectrum(radius: f64, lambda: f64, k_max: u32, n: usize) -> Result<HessianSpectrum> {
    if !(radius > 0.0 && radius.is_finite() && lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "radius and lambda must be positive, got ({radius}, {lambda})"
        )));
    }
    if k_max as usize > n / 4 {
        return Err(Error::InvalidInput(format!("k_max = {k_max} exceeds N/4 = {}", n / 4)));
    }
    let kernel = RadialKernel::bessel(lambda, 2)?;
    let grid = StarShape::circle([0.0, 0.0], radius)?.sample_boundary(n)?;
    let gram = BoundaryGram::new(&kernel, &grid);
    let scale = (TAU * radius).powi(2);
    let mut entries = Vec::new();
    for k in 0..=k_max {
        let j = jn(k, lambda * radius);
        let reference = if k == 0 { 2.0 * scale * j * j } else { 4.0 * PI * PI * radius * radius * j * j };
        let parities: &[Parity] = if k == 0 { &[Parity::Cos] } else { &[Parity::Cos, Parity::Sin] };
        for &parity in parities {
            let a: Vec<f64> = grid
                .theta
                .iter()
                .zip(&grid.weights)
                .map(|(t, s)| {
                    let y = match parity {
                        Parity::Cos => (k as f64 * t).cos(),
                        Parity::Sin => (k as f64 * t).sin(),
                    };
                    y * s
                })
                .collect();
            let value = gram.form(&a, &a);
            entries.push(ModeEntry { k, parity, value, reference, kernel_mode: value.abs() <= 1e-8 * scale });
        }
    }
    Ok(HessianSpectrum { radius, lambda, entries })
}
