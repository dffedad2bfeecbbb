//! The domain energy `F[Ω] = ∬_Ω f(|x − y|) dx dy`, the interior potential
//! `u(x) = ∫_Ω f(|x − y|) dy` and the Fourier transform of the indicator function.
//!
//! Two independent routes evaluate `F`:
//!
//! * spatial: the interior tensor rule applied twice (`O(N_int²)`), any kernel;
//! * spectral: for the planar Bessel kernel `J_0(λr)`,
//!   `F = (1/2π) ∫ |χ̂_Ω(λω(φ))|² dφ`, with `χ̂_Ω` reduced to a boundary integral
//!   by the divergence theorem (`O(N·M)`).

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{BoundaryGrid, InteriorQuadrature, Point, StarShape};
use crate::kernel::{KernelTable, RadialKernel};
use crate::quadrature::CompensatedSum;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyMethod {
    Spatial,
    Spectral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub value: f64,
    pub method: EnergyMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_boundary: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_interior: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_directions: Option<usize>,
    /// `|F(resolution) − F(resolution / 2)|`.
    pub error_estimate: f64,
}

/// Values of `χ̂_Ω` on the circle `|ξ| = λ` at `M` uniform directions.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSlice {
    pub lambda: f64,
    pub directions: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl FourierSlice {
    pub fn new(grid: &BoundaryGrid, lambda: f64, n_directions: usize) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("lambda must be positive, got {lambda}")));
        }
        if n_directions == 0 {
            return Err(Error::InvalidInput("at least one direction is required".into()));
        }
        let directions: Vec<f64> =
            (0..n_directions).map(|i| TAU * i as f64 / n_directions as f64).collect();
        let values = directions
            .iter()
            .map(|phi| {
                let (s, c) = phi.sin_cos();
                boundary_transform(grid, [lambda * c, lambda * s])
            })
            .collect();
        Ok(Self { lambda, directions, values })
    }

    /// `(1/2π) ∫ |χ̂|² dφ` by the trapezoid rule.
    pub fn mean_square(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for v in &self.values {
            acc.add(v.norm_sqr());
        }
        acc.value() / self.values.len() as f64
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `∮ e^{i⟨ξ,x⟩} ⟨ξ, η⟩ / (i|ξ|²) ds` for `ξ ≠ 0`.
fn boundary_transform(grid: &BoundaryGrid, xi: Point) -> Complex64 {
    let xi2 = xi[0] * xi[0] + xi[1] * xi[1];
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for ((x, n), w) in grid.points.iter().zip(&grid.normals).zip(&grid.weights) {
        let phase = xi[0] * x[0] + xi[1] * x[1];
        let flux = (xi[0] * n[0] + xi[1] * n[1]) * w;
        let (s, c) = phase.sin_cos();
        re.add(c * flux);
        im.add(s * flux);
    }
    // (re + i·im) / (i|ξ|²) = (im − i·re) / |ξ|²
    Complex64::new(im.value() / xi2, -re.value() / xi2)
}

/// `χ̂_Ω(ξ) = ∫_Ω e^{i⟨ξ,x⟩} dx`, evaluated on the boundary.
pub fn fourier_indicator(shape: &StarShape, xi: Point, grid: &BoundaryGrid) -> Complex64 {
    if xi[0] == 0.0 && xi[1] == 0.0 {
        return Complex64::new(shape.area(), 0.0);
    }
    boundary_transform(grid, xi)
}

/// `u(x) = Σ_m f(|x − y_m|) q_m`.
pub fn potential(kernel: &RadialKernel, x: Point, quad: &InteriorQuadrature) -> f64 {
    let mut acc = CompensatedSum::new();
    for (y, q) in quad.nodes.iter().zip(&quad.weights) {
        let r = (x[0] - y[0]).hypot(x[1] - y[1]);
        acc.add(kernel.eval_unchecked(r) * q);
    }
    acc.value()
}

pub(crate) fn potential_tabulated(table: &KernelTable, x: Point, quad: &InteriorQuadrature) -> f64 {
    let mut acc = CompensatedSum::new();
    for (y, q) in quad.nodes.iter().zip(&quad.weights) {
        let (dx, dy) = (x[0] - y[0], x[1] - y[1]);
        acc.add(table.eval((dx * dx + dy * dy).sqrt()) * q);
    }
    acc.value()
}

/// Diameter bound of a point cloud (bounding-box diagonal).
pub(crate) fn extent<'a>(points: impl IntoIterator<Item = &'a Point>) -> f64 {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    if lo[0] > hi[0] {
        return 0.0;
    }
    (hi[0] - lo[0]).hypot(hi[1] - lo[1])
}

pub(crate) fn spatial_value(kernel: &RadialKernel, quad: &InteriorQuadrature) -> f64 {
    let table = KernelTable::new(*kernel, extent(&quad.nodes));
    let f0 = table.eval(0.0);
    let nodes = &quad.nodes;
    let weights = &quad.weights;
    let mut total = CompensatedSum::new();
    for i in 0..nodes.len() {
        let (xi, qi) = (nodes[i], weights[i]);
        let mut row = CompensatedSum::new();
        for j in (i + 1)..nodes.len() {
            let (dx, dy) = (xi[0] - nodes[j][0], xi[1] - nodes[j][1]);
            row.add(table.eval((dx * dx + dy * dy).sqrt()) * weights[j]);
        }
        total.add(qi * (f0 * qi + 2.0 * row.value()));
    }
    total.value()
}

/// Spatial route: `F = Σ_m Σ_m' f(|y_m − y_m'|) q_m q_m'`.
pub fn energy_spatial(shape: &StarShape, kernel: &RadialKernel, quad: &InteriorQuadrature) -> Result<EnergyReport> {
    let value = spatial_value(kernel, quad);
    let coarse = shape.interior_quadrature((quad.n_theta / 2).max(16), (quad.n_rho / 2).max(4))?;
    let coarse_value = spatial_value(kernel, &coarse);
    Ok(EnergyReport {
        value,
        method: EnergyMethod::Spatial,
        n_boundary: None,
        n_interior: Some(quad.len()),
        n_directions: None,
        error_estimate: (value - coarse_value).abs(),
    })
}

/// Spectral route for the planar Bessel kernel `J_0(λr)`:
/// `F = (1/2π)·(2π/M)·Σ_i |χ̂_Ω(λω(φ_i))|²`.
pub fn energy_spectral(shape: &StarShape, lambda: f64, n_directions: usize, grid: &BoundaryGrid) -> Result<EnergyReport> {
    if n_directions < 16 || !n_directions.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "direction count must be even and at least 16, got {n_directions}"
        )));
    }
    let value = FourierSlice::new(grid, lambda, n_directions)?.mean_square();
    let half_n = grid.len() / 2;
    let coarse_grid = shape.sample_boundary((half_n + half_n % 2).max(16))?;
    let coarse = FourierSlice::new(&coarse_grid, lambda, n_directions / 2)?.mean_square();
    Ok(EnergyReport {
        value,
        method: EnergyMethod::Spectral,
        n_boundary: Some(grid.len()),
        n_interior: None,
        n_directions: Some(n_directions),
        error_estimate: (value - coarse).abs(),
    })
}
