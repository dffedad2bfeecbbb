//! Antigradient flow of the boundary.
//!
//! Each step moves the boundary with normal velocity `−g`, where `g` is the
//! gradient density, converted to the radial increment `−dt·g·s/r`. The new
//! radii are refit to `k_fit` Fourier modes and, with recentering, the shape is
//! translated so its centroid sits at the origin. A backtracking search halves
//! `dt` until the energy decreases.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::calculus::{gradient_density, gradient_density_spectral, normal_deformation, GradientDensity, NormalVelocity};
use crate::energy::{spatial_value, FourierSlice};
use crate::geometry::{BoundaryGrid, Point, StarShape, MAX_HARMONICS};
use crate::kernel::RadialKernel;
use crate::{Error, Result};

pub const MAX_HALVINGS: usize = 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowOptions {
    /// Initial and largest time step.
    pub dt0: f64,
    pub max_steps: usize,
    pub grad_tol: f64,
    pub energy_tol: f64,
    pub recenter: bool,
    pub k_fit: usize,
    pub n_boundary: usize,
    pub n_theta: usize,
    pub n_rho: usize,
    pub n_directions: usize,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            dt0: 0.05,
            max_steps: 20_000,
            grad_tol: 1e-8,
            energy_tol: 1e-6,
            recenter: true,
            k_fit: 32,
            n_boundary: 512,
            n_theta: 256,
            n_rho: 32,
            n_directions: 256,
        }
    }
}

impl FlowOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if !(self.dt0 > 0.0 && self.dt0.is_finite()) {
            return bad(format!("dt0 must be positive, got {}", self.dt0));
        }
        if !(self.grad_tol > 0.0 && self.energy_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if self.k_fit > MAX_HARMONICS {
            return bad(format!("k_fit must not exceed {MAX_HARMONICS}, got {}", self.k_fit));
        }
        if self.n_boundary < 16 || !self.n_boundary.is_multiple_of(2) || self.n_boundary < 2 * self.k_fit + 1 {
            return bad(format!(
                "n_boundary = {} must be even, at least 16 and resolve k_fit = {}",
                self.n_boundary, self.k_fit
            ));
        }
        if self.n_theta < 16 || self.n_rho < 4 {
            return bad(format!("interior rule ({}, {}) is too coarse", self.n_theta, self.n_rho));
        }
        if self.n_directions < 16 || !self.n_directions.is_multiple_of(2) {
            return bad(format!("n_directions must be even and at least 16, got {}", self.n_directions));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDiagnostics {
    /// Accepted step size (0 for a stationary step).
    pub dt: f64,
    pub halvings: usize,
    pub energy_before: f64,
    pub energy_after: f64,
    /// `dt·Σ g_j² ds_j`, the first-order energy decrease.
    pub predicted_decrease: f64,
    pub grad_sup: f64,
    pub stationary: bool,
}

/// Energy and gradient evaluation at the flow's resolution.
struct Evaluator<'a> {
    kernel: &'a RadialKernel,
    opts: &'a FlowOptions,
    f0: f64,
}

impl<'a> Evaluator<'a> {
    fn new(kernel: &'a RadialKernel, opts: &'a FlowOptions) -> Self {
        Self { kernel, opts, f0: kernel.eval_unchecked(0.0) }
    }

    fn grid(&self, shape: &StarShape) -> Result<BoundaryGrid> {
        shape.sample_boundary(self.opts.n_boundary)
    }

    fn energy(&self, shape: &StarShape) -> Result<f64> {
        match self.kernel.planar_bessel_lambda() {
            Some(lambda) => Ok(FourierSlice::new(&self.grid(shape)?, lambda, self.opts.n_directions)?.mean_square()),
            None => Ok(spatial_value(self.kernel, &shape.interior_quadrature(self.opts.n_theta, self.opts.n_rho)?)),
        }
    }

    fn gradient(&self, shape: &StarShape, grid: &BoundaryGrid) -> Result<GradientDensity> {
        match self.kernel.planar_bessel_lambda() {
            Some(lambda) => gradient_density_spectral(grid, lambda, self.opts.n_directions),
            None => Ok(gradient_density(
                self.kernel,
                grid,
                &shape.interior_quadrature(self.opts.n_theta, self.opts.n_rho)?,
            )),
        }
    }

    /// Energy changes below this are indistinguishable from rounding.
    fn rounding_floor(&self, shape: &StarShape, energy: f64) -> f64 {
        1e-14 * (energy.abs() + self.f0.abs() * shape.area().powi(2))
    }
}

fn recentered(shape: StarShape) -> StarShape {
    let c = shape.centroid();
    shape.translate([-c[0], -c[1]])
}

fn degenerate(step: usize, err: Error) -> Error {
    match err {
        Error::DegenerateShape { .. } => Error::FlowDegenerate { step, reason: err.to_string() },
        other => other,
    }
}

/// One step from a state whose energy and gradient are already known.
fn step_from(
    eval: &Evaluator,
    shape: &StarShape,
    grid: &BoundaryGrid,
    g: &GradientDensity,
    energy: f64,
    dt: f64,
    step: usize,
) -> Result<(StarShape, StepDiagnostics)> {
    let rate = g.squared_norm(grid);
    let stationary = StepDiagnostics {
        dt: 0.0,
        halvings: 0,
        energy_before: energy,
        energy_after: energy,
        predicted_decrease: 0.0,
        grad_sup: g.sup_norm,
        stationary: true,
    };
    if g.sup_norm == 0.0 || dt * rate <= eval.rounding_floor(shape, energy) {
        return Ok((shape.clone(), stationary));
    }
    let velocity = NormalVelocity::new(g.values.iter().map(|v| -v).collect())?;
    let mut trial_dt = dt;
    let mut last_degenerate = None;
    for halvings in 0..=MAX_HALVINGS {
        let trial = normal_deformation(shape, grid, &velocity, trial_dt, eval.opts.k_fit)
            .map(|s| if eval.opts.recenter { recentered(s) } else { s })
            .and_then(|s| eval.energy(&s).map(|e| (s, e)));
        match trial {
            Ok((next, after)) if after < energy => {
                let diag = StepDiagnostics {
                    dt: trial_dt,
                    halvings,
                    energy_before: energy,
                    energy_after: after,
                    predicted_decrease: trial_dt * rate,
                    grad_sup: g.sup_norm,
                    stationary: false,
                };
                return Ok((next, diag));
            }
            Ok(_) => last_degenerate = None,
            Err(e @ Error::DegenerateShape { .. }) => last_degenerate = Some(e),
            Err(e) => return Err(e),
        }
        trial_dt *= 0.5;
    }
    match last_degenerate {
        Some(e) => Err(degenerate(step, e)),
        None => Err(Error::Stall { step, halvings: MAX_HALVINGS, dt: trial_dt * 2.0 }),
    }
}

/// One explicit Euler step of the antigradient flow with backtracking.
///
/// Returns the input shape unchanged (`stationary`) when the predicted
/// decrease is below the rounding floor of the energy.
pub fn flow_step(
    shape: &StarShape,
    kernel: &RadialKernel,
    dt: f64,
    opts: &FlowOptions,
) -> Result<(StarShape, StepDiagnostics)> {
    opts.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    let eval = Evaluator::new(kernel, opts);
    let grid = eval.grid(shape).map_err(|e| degenerate(0, e))?;
    let g = eval.gradient(shape, &grid)?;
    let energy = eval.energy(shape)?;
    step_from(&eval, shape, &grid, &g, energy, dt, 0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRecord {
    pub t: f64,
    pub shape: StarShape,
    pub energy: f64,
    pub grad_sup: f64,
    pub centroid: Point,
    pub area: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    EnergyTolerance,
    GradientTolerance,
    Stationary,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowTrajectory {
    pub records: Vec<FlowRecord>,
    pub termination: Option<Termination>,
}

#[derive(Debug, Clone, PartialEq, ThisError)]
#[error("{error}")]
pub struct FlowFailure {
    #[source]
    pub error: Error,
    pub trajectory: FlowTrajectory,
}

impl FlowTrajectory {
    pub fn last(&self) -> Option<&FlowRecord> {
        self.records.last()
    }

    pub fn steps(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    /// Columns `t, F, grad_sup, centroid_x, centroid_y, area, a0, ak_1..K, bk_1..K`,
    /// with `K` the largest harmonic count in the trajectory.
    pub fn to_csv(&self) -> String {
        let k = self.records.iter().map(|r| r.shape.harmonics()).max().unwrap_or(0);
        let mut out = String::from("t,F,grad_sup,centroid_x,centroid_y,area,a0");
        for prefix in ["ak", "bk"] {
            for i in 1..=k {
                let _ = write!(out, ",{prefix}_{i}");
            }
        }
        out.push('\n');
        for r in &self.records {
            let _ = write!(
                out,
                "{},{},{},{},{},{},{}",
                r.t, r.energy, r.grad_sup, r.centroid[0], r.centroid[1], r.area, r.shape.a0()
            );
            for coeffs in [r.shape.ak(), r.shape.bk()] {
                for i in 0..k {
                    let _ = write!(out, ",{}", coeffs.get(i).copied().unwrap_or(0.0));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Mean and spread of `r(θ)` on `n` uniform angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusStats {
    pub mean: f64,
    pub std: f64,
}

impl RadiusStats {
    pub fn of(shape: &StarShape, n: usize) -> Self {
        let r: Vec<f64> = (0..n).map(|j| shape.radius(std::f64::consts::TAU * j as f64 / n as f64)).collect();
        let mean = r.iter().sum::<f64>() / n as f64;
        let var = r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        Self { mean, std: var.sqrt() }
    }

    pub fn relative_spread(&self) -> f64 {
        self.std / self.mean
    }
}

/// Iterates [`flow_step`] until `F < energy_tol`, `sup|g| < grad_tol`, a
/// stationary step, or `max_steps`. Every accepted step is recorded; the
/// first record is the (recentered) initial shape.
pub fn run_flow(
    shape0: &StarShape,
    kernel: &RadialKernel,
    opts: &FlowOptions,
) -> std::result::Result<FlowTrajectory, FlowFailure> {
    let mut trajectory = FlowTrajectory { records: Vec::new(), termination: None };
    let fail = |error: Error, trajectory: FlowTrajectory| FlowFailure { error, trajectory };
    if let Err(e) = opts.validate() {
        return Err(fail(e, trajectory));
    }
    let eval = Evaluator::new(kernel, opts);
    let mut shape = if opts.recenter { recentered(shape0.clone()) } else { shape0.clone() };
    let mut t = 0.0;
    let mut dt = opts.dt0;
    loop {
        let step = trajectory.records.len();
        let state = eval
            .grid(&shape)
            .map_err(|e| degenerate(step, e))
            .and_then(|grid| Ok((eval.gradient(&shape, &grid)?, eval.energy(&shape)?, grid)));
        let (g, energy, grid) = match state {
            Ok(s) => s,
            Err(e) => return Err(fail(e, trajectory)),
        };
        trajectory.records.push(FlowRecord {
            t,
            shape: shape.clone(),
            energy,
            grad_sup: g.sup_norm,
            centroid: shape.centroid(),
            area: shape.area(),
        });
        let termination = if energy < opts.energy_tol {
            Some(Termination::EnergyTolerance)
        } else if g.sup_norm < opts.grad_tol {
            Some(Termination::GradientTolerance)
        } else if step >= opts.max_steps {
            Some(Termination::MaxSteps)
        } else {
            None
        };
        if termination.is_some() {
            trajectory.termination = termination;
            return Ok(trajectory);
        }
        match step_from(&eval, &shape, &grid, &g, energy, dt, step + 1) {
            Ok((_, diag)) if diag.stationary => {
                trajectory.termination = Some(Termination::Stationary);
                return Ok(trajectory);
            }
            Ok((next, diag)) => {
                t += diag.dt;
                dt = (2.0 * diag.dt).min(opts.dt0);
                shape = next;
            }
            Err(e) => return Err(fail(e, trajectory)),
        }
    }
}
