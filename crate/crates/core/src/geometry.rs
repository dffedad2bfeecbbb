//! Star-shaped planar domains described by a truncated Fourier radius function
//! `r(θ) = a0 + Σ_k (a_k cos kθ + b_k sin kθ)` about a center point.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::quadrature::{compensated_sum, gauss_legendre};
use crate::{Error, Result};

pub type Point = [f64; 2];

/// Maximum number of harmonics in a radius function.
pub const MAX_HARMONICS: usize = 128;

/// Grid used to certify `min r(θ) > 0`.
const POSITIVITY_GRID: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShapeRecord", into = "ShapeRecord")]
pub struct StarShape {
    center: Point,
    a0: f64,
    ak: Vec<f64>,
    bk: Vec<f64>,
}

/// On-disk form of a [`StarShape`]; validated on conversion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShapeRecord {
    pub center: Point,
    pub a0: f64,
    pub ak: Vec<f64>,
    pub bk: Vec<f64>,
}

impl TryFrom<ShapeRecord> for StarShape {
    type Error = Error;

    fn try_from(record: ShapeRecord) -> Result<Self> {
        StarShape::new(record.center, record.a0, record.ak, record.bk)
    }
}

impl From<StarShape> for ShapeRecord {
    fn from(shape: StarShape) -> Self {
        ShapeRecord { center: shape.center, a0: shape.a0, ak: shape.ak, bk: shape.bk }
    }
}

impl StarShape {
    pub fn new(center: Point, a0: f64, ak: Vec<f64>, bk: Vec<f64>) -> Result<Self> {
        if ak.len() != bk.len() {
            return Err(Error::InvalidInput(format!(
                "ak and bk must have equal length ({} vs {})",
                ak.len(),
                bk.len()
            )));
        }
        if ak.len() > MAX_HARMONICS {
            return Err(Error::InvalidInput(format!(
                "{} harmonics exceed the maximum of {MAX_HARMONICS}",
                ak.len()
            )));
        }
        let finite = center.iter().chain(&ak).chain(&bk).all(|v| v.is_finite());
        if !finite || !a0.is_finite() {
            return Err(Error::InvalidInput("shape coefficients must be finite".into()));
        }
        if a0 <= 0.0 {
            return Err(Error::InvalidInput(format!("a0 must be positive, got {a0}")));
        }
        let shape = Self { center, a0, ak, bk };
        shape.check_positive(POSITIVITY_GRID)?;
        Ok(shape)
    }

    pub fn circle(center: Point, radius: f64) -> Result<Self> {
        Self::new(center, radius, Vec::new(), Vec::new())
    }

    /// Fourier projection of radii sampled at `θ_j = 2πj/N`, truncated to `harmonics`.
    pub fn from_radius_samples(center: Point, radii: &[f64], harmonics: usize) -> Result<Self> {
        let n = radii.len();
        if n < 2 * harmonics + 1 {
            return Err(Error::InvalidInput(format!(
                "{n} samples cannot resolve {harmonics} harmonics"
            )));
        }
        let nf = n as f64;
        let a0 = compensated_sum(radii.iter().copied()) / nf;
        let mut ak = Vec::with_capacity(harmonics);
        let mut bk = Vec::with_capacity(harmonics);
        for k in 1..=harmonics {
            let (mut c, mut s) = (Vec::with_capacity(n), Vec::with_capacity(n));
            for (j, r) in radii.iter().enumerate() {
                let (sin, cos) = (TAU * (k * j % n) as f64 / nf).sin_cos();
                c.push(r * cos);
                s.push(r * sin);
            }
            // The Nyquist harmonic has a single real degree of freedom.
            let scale = if 2 * k == n { 1.0 } else { 2.0 };
            ak.push(scale * compensated_sum(c) / nf);
            bk.push(if 2 * k == n { 0.0 } else { scale * compensated_sum(s) / nf });
        }
        Self::new(center, a0, ak, bk)
    }

    /// Fourier fit of the ellipse with semi-axes `a` (along x) and `b`, centered at the origin.
    pub fn ellipse(a: f64, b: f64, harmonics: usize) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidInput("ellipse semi-axes must be positive".into()));
        }
        let n = (8 * harmonics).max(1024);
        let radii: Vec<f64> = (0..n)
            .map(|j| {
                let (s, c) = (TAU * j as f64 / n as f64).sin_cos();
                a * b / ((b * c).powi(2) + (a * s).powi(2)).sqrt()
            })
            .collect();
        Self::from_radius_samples([0.0, 0.0], &radii, harmonics)
    }

    /// Smooth Fourier fit of the axis-aligned square with the given half side.
    pub fn rounded_square(half_side: f64, harmonics: usize) -> Result<Self> {
        if half_side <= 0.0 {
            return Err(Error::InvalidInput("square half side must be positive".into()));
        }
        let n = 4096.max(8 * harmonics);
        let radii: Vec<f64> = (0..n)
            .map(|j| {
                let (s, c) = (TAU * j as f64 / n as f64).sin_cos();
                half_side / c.abs().max(s.abs())
            })
            .collect();
        Self::from_radius_samples([0.0, 0.0], &radii, harmonics)
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn ak(&self) -> &[f64] {
        &self.ak
    }

    pub fn bk(&self) -> &[f64] {
        &self.bk
    }

    pub fn harmonics(&self) -> usize {
        self.ak.len()
    }

    pub fn radius(&self, theta: f64) -> f64 {
        self.radius_with_derivatives(theta).0
    }

    /// `(r, r', r'')` at `theta`.
    pub fn radius_with_derivatives(&self, theta: f64) -> (f64, f64, f64) {
        let mut r = self.a0;
        let mut dr = 0.0;
        let mut d2r = 0.0;
        for (i, (a, b)) in self.ak.iter().zip(&self.bk).enumerate() {
            let k = (i + 1) as f64;
            let (s, c) = (k * theta).sin_cos();
            r += a * c + b * s;
            dr += k * (b * c - a * s);
            d2r -= k * k * (a * c + b * s);
        }
        (r, dr, d2r)
    }

    fn check_positive(&self, n: usize) -> Result<()> {
        for j in 0..n {
            let theta = TAU * j as f64 / n as f64;
            let r = self.radius(theta);
            if r <= 0.0 || !r.is_finite() {
                return Err(Error::DegenerateShape { theta, radius: r });
            }
        }
        Ok(())
    }

    /// Exact area `½∫ r² dθ`.
    pub fn area(&self) -> f64 {
        let tail: f64 = self.ak.iter().zip(&self.bk).map(|(a, b)| a * a + b * b).sum();
        PI * self.a0 * self.a0 + 0.5 * PI * tail
    }

    /// Center of mass, from `∫_Ω x dx = c·|Ω| + ∫ (r³/3) ω(θ) dθ`.
    pub fn centroid(&self) -> Point {
        // r³ cos θ is a trigonometric polynomial of degree 3K+1; the
        // trapezoid rule on more nodes than that is exact.
        let n = 4 * self.harmonics() + 16;
        let (mut mx, mut my) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for j in 0..n {
            let theta = TAU * j as f64 / n as f64;
            let r = self.radius(theta);
            let (s, c) = theta.sin_cos();
            mx.push(r * r * r * c);
            my.push(r * r * r * s);
        }
        let scale = TAU / n as f64 / 3.0 / self.area();
        [
            self.center[0] + scale * compensated_sum(mx),
            self.center[1] + scale * compensated_sum(my),
        ]
    }

    pub fn translate(&self, offset: Point) -> StarShape {
        let mut out = self.clone();
        out.center = [self.center[0] + offset[0], self.center[1] + offset[1]];
        out
    }

    /// Rotation by `phi` about the origin.
    pub fn rotate(&self, phi: f64) -> StarShape {
        let (s, c) = phi.sin_cos();
        let center = [c * self.center[0] - s * self.center[1], s * self.center[0] + c * self.center[1]];
        let mut ak = Vec::with_capacity(self.harmonics());
        let mut bk = Vec::with_capacity(self.harmonics());
        for (i, (a, b)) in self.ak.iter().zip(&self.bk).enumerate() {
            let (sk, ck) = ((i + 1) as f64 * phi).sin_cos();
            ak.push(a * ck - b * sk);
            bk.push(a * sk + b * ck);
        }
        StarShape { center, a0: self.a0, ak, bk }
    }

    /// Uniform scaling about the center.
    pub fn scale(&self, factor: f64) -> Result<StarShape> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::InvalidInput(format!("scale factor must be positive, got {factor}")));
        }
        Ok(StarShape {
            center: self.center,
            a0: self.a0 * factor,
            ak: self.ak.iter().map(|a| a * factor).collect(),
            bk: self.bk.iter().map(|b| b * factor).collect(),
        })
    }

    pub fn sample_boundary(&self, n: usize) -> Result<BoundaryGrid> {
        BoundaryGrid::sample(self, n)
    }

    pub fn interior_quadrature(&self, n_theta: usize, n_rho: usize) -> Result<InteriorQuadrature> {
        InteriorQuadrature::build(self, n_theta, n_rho)
    }

    /// Largest distance from the center to the boundary, sampled on the certification grid.
    pub fn max_radius(&self) -> f64 {
        (0..POSITIVITY_GRID)
            .map(|j| self.radius(TAU * j as f64 / POSITIVITY_GRID as f64))
            .fold(0.0, f64::max)
    }
}

/// Boundary sampled at uniform angles `θ_j = 2πj/N`.
///
/// `weights` are trapezoid arclength weights `|x'(θ_j)|·2π/N`, `normals` are
/// outward unit normals, `curvature` is signed (positive for convex arcs).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryGrid {
    pub theta: Vec<f64>,
    pub points: Vec<Point>,
    pub normals: Vec<Point>,
    pub weights: Vec<f64>,
    pub curvature: Vec<f64>,
    /// `r(θ_j)`.
    pub radius: Vec<f64>,
    /// `|x'(θ_j)| = sqrt(r² + r'²)`.
    pub speed: Vec<f64>,
}

impl BoundaryGrid {
    fn sample(shape: &StarShape, n: usize) -> Result<Self> {
        if n < 16 || !n.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "boundary node count must be even and at least 16, got {n}"
            )));
        }
        let h = TAU / n as f64;
        let mut grid = BoundaryGrid {
            theta: Vec::with_capacity(n),
            points: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
            curvature: Vec::with_capacity(n),
            radius: Vec::with_capacity(n),
            speed: Vec::with_capacity(n),
        };
        for j in 0..n {
            let theta = h * j as f64;
            let (r, dr, d2r) = shape.radius_with_derivatives(theta);
            if r <= 0.0 || !r.is_finite() {
                return Err(Error::DegenerateShape { theta, radius: r });
            }
            let (s, c) = theta.sin_cos();
            let speed = r.hypot(dr);
            grid.theta.push(theta);
            grid.points.push([shape.center[0] + r * c, shape.center[1] + r * s]);
            grid.normals.push([(r * c + dr * s) / speed, (r * s - dr * c) / speed]);
            grid.weights.push(speed * h);
            grid.curvature.push((r * r + 2.0 * dr * dr - r * d2r) / speed.powi(3));
            grid.radius.push(r);
            grid.speed.push(speed);
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    /// `∮ ½⟨x, η⟩ ds`.
    pub fn enclosed_area(&self) -> f64 {
        compensated_sum(
            self.points
                .iter()
                .zip(&self.normals)
                .zip(&self.weights)
                .map(|((x, n), w)| 0.5 * (x[0] * n[0] + x[1] * n[1]) * w),
        )
    }

    /// Boundary trapezoid rule for `∮ f ds` given nodal values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        compensated_sum(values.iter().zip(&self.weights).map(|(v, w)| v * w))
    }
}

/// Tensor rule on `(θ, ρ)`: uniform trapezoid in θ, Gauss–Legendre in `ρ ∈ [0, r(θ)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorQuadrature {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub n_theta: usize,
    pub n_rho: usize,
}

impl InteriorQuadrature {
    fn build(shape: &StarShape, n_theta: usize, n_rho: usize) -> Result<Self> {
        if n_theta < 16 || n_rho < 4 {
            return Err(Error::InvalidInput(format!(
                "interior rule needs n_theta ≥ 16 and n_rho ≥ 4, got ({n_theta}, {n_rho})"
            )));
        }
        let (gl_nodes, gl_weights) = gauss_legendre(n_rho);
        let h = TAU / n_theta as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_rho);
        let mut weights = Vec::with_capacity(n_theta * n_rho);
        for i in 0..n_theta {
            let theta = h * i as f64;
            let r = shape.radius(theta);
            if r <= 0.0 || !r.is_finite() {
                return Err(Error::DegenerateShape { theta, radius: r });
            }
            let (s, c) = theta.sin_cos();
            for (t, w) in gl_nodes.iter().zip(&gl_weights) {
                let rho = 0.5 * r * (t + 1.0);
                nodes.push([shape.center[0] + rho * c, shape.center[1] + rho * s]);
                weights.push(rho * 0.5 * r * w * h);
            }
        }
        Ok(Self { nodes, weights, n_theta, n_rho })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }
}

/// Result of [`fit_radius`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusFit {
    pub shape: StarShape,
    /// Largest `|r_fit(θ_i) − |p_i − c||` over the samples.
    pub max_residual: f64,
}

/// Least-squares Fourier fit of boundary samples viewed from `center`.
///
/// The samples must go once around the center with monotone polar angle.
pub fn fit_radius(points: &[Point], center: Point, harmonics: usize) -> Result<RadiusFit> {
    let unknowns = 2 * harmonics + 1;
    if points.len() < unknowns {
        return Err(Error::InvalidInput(format!(
            "{} samples cannot determine {harmonics} harmonics",
            points.len()
        )));
    }
    let mut angles = Vec::with_capacity(points.len());
    let mut radii = Vec::with_capacity(points.len());
    for p in points {
        let (dx, dy) = (p[0] - center[0], p[1] - center[1]);
        let r = dx.hypot(dy);
        if r == 0.0 || !r.is_finite() {
            return Err(Error::NotStarShaped("sample coincides with the center".into()));
        }
        angles.push(dy.atan2(dx));
        radii.push(r);
    }
    check_monotone_winding(&angles)?;

    let a = DMatrix::from_fn(points.len(), unknowns, |i, col| {
        if col == 0 {
            1.0
        } else {
            let k = col.div_ceil(2) as f64;
            if col % 2 == 1 {
                (k * angles[i]).cos()
            } else {
                (k * angles[i]).sin()
            }
        }
    });
    let rhs = DVector::from_column_slice(&radii);
    let coeffs = a
        .clone()
        .svd(true, true)
        .solve(&rhs, 1e-13)
        .map_err(|e| Error::InvalidInput(format!("least-squares fit failed: {e}")))?;
    let max_residual = (&a * &coeffs - &rhs).amax();
    let ak = (0..harmonics).map(|k| coeffs[2 * k + 1]).collect();
    let bk = (0..harmonics).map(|k| coeffs[2 * k + 2]).collect();
    let shape = StarShape::new(center, coeffs[0], ak, bk)?;
    Ok(RadiusFit { shape, max_residual })
}

fn check_monotone_winding(angles: &[f64]) -> Result<()> {
    let n = angles.len();
    let mut total = 0.0;
    let mut sign = 0.0;
    for i in 0..n {
        let mut step = angles[(i + 1) % n] - angles[i];
        if step > PI {
            step -= TAU;
        } else if step <= -PI {
            step += TAU;
        }
        if step == 0.0 {
            return Err(Error::NotStarShaped(format!("repeated polar angle at sample {i}")));
        }
        if sign == 0.0 {
            sign = step.signum();
        } else if step.signum() != sign {
            return Err(Error::NotStarShaped(format!("polar angle reverses at sample {i}")));
        }
        total += step;
    }
    if (total.abs() - TAU).abs() > 1e-6 {
        return Err(Error::NotStarShaped(format!(
            "samples wind {:.3} turns around the center",
            total / TAU
        )));
    }
    Ok(())
}
