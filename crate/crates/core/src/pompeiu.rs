//! Search for circles `|ξ| = λ` on which the indicator transform vanishes.
//!
//! `M(λ) = max_φ |χ̂_Ω(λω(φ))|` is evaluated on a λ grid; its minimizer is
//! refined by golden-section search. A domain fails the Pompeiu property at
//! `λ*` exactly when `M(λ*) = 0`, in which case `F[Ω] = 0` for the kernel
//! `J_0(λ*r)`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::energy::{energy_spectral, fourier_indicator};
use crate::geometry::{BoundaryGrid, StarShape};
use crate::{Error, Result};

/// Refined minima within `TIE_FLOOR·area` of the smallest are treated as equal.
pub const TIE_FLOOR: f64 = 1e-12;

/// Golden-section minimization of `f` on `[a, b]` until the bracket is below `tol`.
/// Returns the best `(x, f(x))` seen.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `max_φ |χ̂(λω(φ))|`: maximum on `n_dir` directions, with the discrete local
/// maxima within 10% of the top refined by golden-section search.
fn max_modulus(shape: &StarShape, grid: &BoundaryGrid, lambda: f64, n_dir: usize) -> f64 {
    let modulus = |phi: f64| {
        let (s, c) = phi.sin_cos();
        fourier_indicator(shape, [lambda * c, lambda * s], grid).norm()
    };
    let h = TAU / n_dir as f64;
    let values: Vec<f64> = (0..n_dir).map(|j| modulus(h * j as f64)).collect();
    let top = values.iter().copied().fold(0.0, f64::max);
    let mut best = top;
    for j in 0..n_dir {
        let (prev, next) = (values[(j + n_dir - 1) % n_dir], values[(j + 1) % n_dir]);
        if values[j] >= prev && values[j] >= next && values[j] >= 0.9 * top && values[j] > 0.0 {
            let phi = h * j as f64;
            let (_, neg) = golden_min(|p| -modulus(p), phi - h, phi + h, 1e-9);
            best = best.max(-neg);
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PompeiuScan {
    pub lambdas: Vec<f64>,
    #[serde(rename = "M_of_lambda")]
    pub m_of_lambda: Vec<f64>,
    pub argmin_lambda: f64,
    /// Smallest `M` seen, including the refined minimizer.
    pub min_value: f64,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub argmin_lambda: f64,
    pub min_value: f64,
    pub failure: bool,
}

impl PompeiuScan {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lambda,M_of_lambda\n");
        for (l, m) in self.lambdas.iter().zip(&self.m_of_lambda) {
            let _ = writeln!(out, "{l},{m}");
        }
        out
    }

    pub fn summary(&self, tol: f64) -> ScanSummary {
        ScanSummary {
            argmin_lambda: self.argmin_lambda,
            min_value: self.min_value,
            failure: detects_failure(self, tol).is_some(),
        }
    }
}

/// Evaluates `M(λ)` on `n_lambda` uniform points of `[lambda_min, lambda_max]`
/// and refines each grid local minimum within its neighbouring cells.
pub fn scan(
    shape: &StarShape,
    lambda_min: f64,
    lambda_max: f64,
    n_lambda: usize,
    n_dir: usize,
    grid: &BoundaryGrid,
) -> Result<PompeiuScan> {
    if !(lambda_min > 0.0 && lambda_min < lambda_max && lambda_max.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need 0 < lambda_min < lambda_max, got [{lambda_min}, {lambda_max}]"
        )));
    }
    if n_lambda < 2 {
        return Err(Error::InvalidInput(format!("n_lambda must be at least 2, got {n_lambda}")));
    }
    if n_dir < 16 {
        return Err(Error::InvalidInput(format!("n_dir must be at least 16, got {n_dir}")));
    }
    let step = (lambda_max - lambda_min) / (n_lambda - 1) as f64;
    let lambdas: Vec<f64> = (0..n_lambda).map(|i| lambda_min + step * i as f64).collect();
    let m_of_lambda: Vec<f64> = lambdas.iter().map(|&l| max_modulus(shape, grid, l, n_dir)).collect();
    // Refine every grid local minimum; ties at the numerical floor go to the smallest λ.
    let mut candidates = Vec::new();
    for i in 0..n_lambda {
        let left = if i == 0 { f64::INFINITY } else { m_of_lambda[i - 1] };
        let right = if i + 1 == n_lambda { f64::INFINITY } else { m_of_lambda[i + 1] };
        if m_of_lambda[i] <= left && m_of_lambda[i] <= right {
            let (lo, hi) = (lambdas[i.saturating_sub(1)], lambdas[(i + 1).min(n_lambda - 1)]);
            let (l, m) = golden_min(|l| max_modulus(shape, grid, l, n_dir), lo, hi, 1e-13 * hi);
            candidates.push(if m < m_of_lambda[i] { (l, m) } else { (lambdas[i], m_of_lambda[i]) });
        }
    }
    let area = shape.area();
    let min_value = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let argmin_lambda = candidates
        .iter()
        .find(|c| c.1 <= min_value + TIE_FLOOR * area)
        .map(|c| c.0)
        .unwrap_or(lambdas[0]);
    Ok(PompeiuScan { lambdas, m_of_lambda, argmin_lambda, min_value, area })
}

/// The refined `λ*` when `min_value < tol·area`.
pub fn detects_failure(scan: &PompeiuScan, tol: f64) -> Option<f64> {
    (scan.min_value < tol * scan.area).then_some(scan.argmin_lambda)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureConfirmation {
    pub lambda: f64,
    pub energy: f64,
    /// `tol²·area²`.
    pub threshold: f64,
    pub confirmed: bool,
}

/// Evaluates `F` for `J_0(λ*r)` at the detected `λ*` and compares it with `tol²·area²`.
pub fn confirm_failure(
    shape: &StarShape,
    lambda_star: f64,
    tol: f64,
    n_directions: usize,
    grid: &BoundaryGrid,
) -> Result<FailureConfirmation> {
    let energy = energy_spectral(shape, lambda_star, n_directions, grid)?.value;
    let threshold = tol * tol * shape.area().powi(2);
    Ok(FailureConfirmation { lambda: lambda_star, energy, threshold, confirmed: energy < threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_zero, BesselOrder};

    fn j11() -> f64 {
        bessel_zero(BesselOrder::new(1).unwrap(), 1).unwrap()
    }

    fn square() -> StarShape {
        StarShape::rounded_square(0.5, 32).unwrap()
    }

    #[test]
    fn golden_section_finds_parabola_vertex() {
        let (x, fx) = golden_min(|x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unit_disk_fails_at_first_bessel_zero() {
        let disk = StarShape::circle([0.0, 0.0], 1.0).unwrap();
        let grid = disk.sample_boundary(128).unwrap();
        let s = scan(&disk, 1.0, 8.0, 71, 32, &grid).unwrap();
        assert!((s.argmin_lambda - j11()).abs() < 1e-4);
        assert!(s.min_value < 1e-8);
        let lambda = detects_failure(&s, 1e-6).unwrap();
        let confirmation = confirm_failure(&disk, lambda, 1e-6, 64, &grid).unwrap();
        assert!(confirmation.confirmed);
        assert!(confirmation.energy < 1e-12);
        assert_eq!(detects_failure(&s, 0.0), None);
        assert!(s.summary(1e-6).failure);
    }

    #[test]
    fn scaling_law_for_disks() {
        let disk = StarShape::circle([0.5, 0.5], 2.0).unwrap();
        let grid = disk.sample_boundary(128).unwrap();
        let s = scan(&disk, 0.5, 4.0, 36, 32, &grid).unwrap();
        assert!((s.argmin_lambda - j11() / 2.0).abs() < 1e-4);
    }

    #[test]
    fn rounded_square_has_no_vanishing_circle() {
        let sq = square();
        let grid = sq.sample_boundary(256).unwrap();
        let s = scan(&sq, 1.0, 20.0, 96, 64, &grid).unwrap();
        assert!((sq.area() - 1.0).abs() < 0.05);
        assert!(s.min_value > 1e-3 * s.area, "{}", s.min_value);
        assert_eq!(detects_failure(&s, 1e-6), None);
        assert!(s.m_of_lambda.iter().all(|&m| m >= 0.0));
    }

    #[test]
    fn m_is_invariant_under_rigid_motions() {
        let sq = square();
        let moved = sq.rotate(0.37).translate([0.4, -1.1]);
        let (g0, g1) = (sq.sample_boundary(256).unwrap(), moved.sample_boundary(256).unwrap());
        let a = scan(&sq, 2.0, 9.0, 8, 64, &g0).unwrap();
        let b = scan(&moved, 2.0, 9.0, 8, 64, &g1).unwrap();
        for (x, y) in a.m_of_lambda.iter().zip(&b.m_of_lambda) {
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn scaled_shape_scales_argmin() {
        let shape = StarShape::new([0.0, 0.0], 1.0, vec![0.0, 0.05], vec![0.0, 0.0]).unwrap();
        let big = shape.scale(1.5).unwrap();
        let (g0, g1) = (shape.sample_boundary(128).unwrap(), big.sample_boundary(128).unwrap());
        let a = scan(&shape, 1.0, 8.0, 71, 32, &g0).unwrap();
        let b = scan(&big, 1.0 / 1.5, 8.0 / 1.5, 71, 32, &g1).unwrap();
        assert!((a.argmin_lambda / 1.5 - b.argmin_lambda).abs() < 1e-6);
    }

    #[test]
    fn csv_and_summary_shape() {
        let disk = StarShape::circle([0.0, 0.0], 1.0).unwrap();
        let grid = disk.sample_boundary(64).unwrap();
        let s = scan(&disk, 1.0, 2.0, 3, 16, &grid).unwrap();
        let csv = s.to_csv();
        assert!(csv.starts_with("lambda,M_of_lambda\n"));
        assert_eq!(csv.lines().count(), 4);
        let json = serde_json::to_value(s.summary(1e-6)).unwrap();
        assert_eq!(json["failure"], false);
        assert!(json.get("argmin_lambda").is_some());
    }

    #[test]
    fn rejects_bad_ranges() {
        let disk = StarShape::circle([0.0, 0.0], 1.0).unwrap();
        let grid = disk.sample_boundary(64).unwrap();
        assert!(scan(&disk, 0.0, 2.0, 10, 16, &grid).is_err());
        assert!(scan(&disk, 3.0, 2.0, 10, 16, &grid).is_err());
        assert!(scan(&disk, 1.0, 2.0, 1, 16, &grid).is_err());
        assert!(scan(&disk, 1.0, 2.0, 10, 8, &grid).is_err());
    }
}
