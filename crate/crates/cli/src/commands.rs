use pompeiu_core::calculus::{ball_mode_spectrum, gradient_density, gradient_density_spectral};
use pompeiu_core::energy::{energy_spatial, energy_spectral, potential};
use pompeiu_core::flow::{run_flow, FlowOptions, FlowTrajectory, RadiusStats};
use pompeiu_core::geometry::{Point, StarShape};
use pompeiu_core::pompeiu::{confirm_failure, detects_failure, scan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{overlay, Context};
use crate::error::{CliError, Result};
use crate::svg;

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("plain data serializes")
}

fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn finite(label: &str, values: impl IntoIterator<Item = f64>) -> Result<()> {
    if values.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(CliError::Numeric(format!("{label}: non-finite result")))
    }
}

pub fn evaluate(ctx: &Context) -> Result<Value> {
    let (shape, kernel) = (ctx.shape()?, ctx.kernel()?);
    let res = ctx.resolution;
    let quad = shape.interior_quadrature(res.n_theta(), res.n_rho())?;
    let spatial = energy_spatial(shape, kernel, &quad)?;
    let spectral = match kernel.planar_bessel_lambda() {
        Some(lambda) => Some(energy_spectral(shape, lambda, res.directions(), &shape.sample_boundary(res.boundary())?)?),
        None => None,
    };
    finite("energy", [spatial.value].into_iter().chain(spectral.as_ref().map(|r| r.value)))?;
    let out = json!({
        "area": shape.area(),
        "spatial": spatial,
        "spectral": spectral,
        "difference": spectral.as_ref().map(|s| (s.value - spatial.value).abs()),
    });
    ctx.write("evaluate.json", &pretty(&out))?;
    Ok(out)
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialParams {
    pub points: Vec<Point>,
    /// Random probes drawn from the disk of radius `2·max r` about the center.
    pub probes: usize,
}

pub fn potential_cmd(ctx: &Context, params: PotentialParams) -> Result<Value> {
    let params = overlay(params, ctx.sections.potential.as_ref(), "potential")?;
    let (shape, kernel) = (ctx.shape()?, ctx.kernel()?);
    let mut points = params.points.clone();
    if points.is_empty() && params.probes == 0 {
        points.push(shape.center());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let reach = 2.0 * shape.max_radius();
    let c = shape.center();
    for _ in 0..params.probes {
        let rho = reach * rng.gen::<f64>().sqrt();
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        points.push([c[0] + rho * phi.cos(), c[1] + rho * phi.sin()]);
    }
    let quad = shape.interior_quadrature(ctx.resolution.n_theta(), ctx.resolution.n_rho())?;
    let values: Vec<f64> = points.iter().map(|&x| potential(kernel, x, &quad)).collect();
    finite("potential", values.iter().copied())?;
    let out = json!({
        "seed": ctx.seed,
        "points": points.iter().zip(&values).map(|(x, u)| json!({"x": x, "u": u})).collect::<Vec<_>>(),
    });
    ctx.write("potential.json", &pretty(&out))?;
    Ok(out)
}

pub fn grad(ctx: &Context) -> Result<Value> {
    let (shape, kernel) = (ctx.shape()?, ctx.kernel()?);
    let res = ctx.resolution;
    let grid = shape.sample_boundary(res.boundary())?;
    let (method, density) = match kernel.planar_bessel_lambda() {
        Some(lambda) => ("spectral", gradient_density_spectral(&grid, lambda, res.directions())?),
        None => ("interior", gradient_density(kernel, &grid, &shape.interior_quadrature(res.n_theta(), res.n_rho())?)),
    };
    finite("gradient density", density.values.iter().copied())?;
    let out = json!({
        "method": method,
        "sup_norm": density.sup_norm,
        "theta": grid.theta,
        "points": grid.points,
        "values": density.values,
    });
    ctx.write("grad.json", &pretty(&out))?;
    Ok(out)
}

fn flow_options(ctx: &Context) -> Result<(FlowOptions, usize)> {
    let res = ctx.resolution;
    let base = FlowOptions {
        n_boundary: res.boundary(),
        n_theta: res.n_theta(),
        n_rho: res.n_rho(),
        n_directions: res.directions(),
        ..FlowOptions::default()
    };
    let mut section = ctx.sections.flow.clone();
    let svg_every = match section.as_mut().and_then(Value::as_object_mut).and_then(|o| o.remove("svg_every")) {
        Some(v) => v.as_u64().ok_or_else(|| CliError::Input("flow.svg_every must be a non-negative integer".into()))?,
        None => 0,
    } as usize;
    let opts = overlay(base, section.as_ref(), "flow")?;
    opts.validate()?;
    Ok((opts, svg_every))
}

#[derive(Debug, Default)]
pub struct FlowFlags {
    pub dt0: Option<f64>,
    pub max_steps: Option<usize>,
    pub svg_every: Option<usize>,
}

/// Validates everything the flow needs before running it.
pub fn prepare_flow(ctx: &Context, flags: &FlowFlags) -> Result<(FlowOptions, usize)> {
    ctx.shape()?;
    ctx.kernel()?;
    let (mut opts, mut svg_every) = flow_options(ctx)?;
    let from_config = ctx.sections.flow.as_ref().and_then(Value::as_object);
    let in_config = |key: &str| from_config.is_some_and(|o| o.contains_key(key));
    if let (Some(dt0), false) = (flags.dt0, in_config("dt0")) {
        opts.dt0 = dt0;
    }
    if let (Some(m), false) = (flags.max_steps, in_config("max_steps")) {
        opts.max_steps = m;
    }
    if let (Some(s), false) = (flags.svg_every, in_config("svg_every")) {
        svg_every = s;
    }
    opts.validate()?;
    Ok((opts, svg_every))
}

fn write_flow_outputs(ctx: &Context, traj: &FlowTrajectory, svg_every: usize) -> Result<()> {
    ctx.write("trajectory.csv", &traj.to_csv())?;
    if let Some(last) = traj.last() {
        ctx.write("final_shape.json", &pretty(&to_json(&last.shape)))?;
    }
    if svg_every > 0 && !traj.records.is_empty() {
        let extent = 1.2 * traj.records.iter().map(|r| r.shape.max_radius() + r.centroid[0].hypot(r.centroid[1])).fold(0.0, f64::max);
        let last = traj.records.len() - 1;
        for (i, r) in traj.records.iter().enumerate() {
            if i % svg_every == 0 || i == last {
                let caption = format!("step {i}  t = {:.4}  F = {:.3e}", r.t, r.energy);
                ctx.write(&format!("frames/frame_{i:05}.svg"), &svg::frame(&r.shape, extent, &caption))?;
            }
        }
    }
    Ok(())
}

pub fn flow(ctx: &Context, opts: FlowOptions, svg_every: usize) -> Result<Value> {
    let (shape, kernel) = (ctx.shape()?, ctx.kernel()?);
    let (traj, failure) = match run_flow(shape, kernel, &opts) {
        Ok(t) => (t, None),
        Err(f) => (f.trajectory, Some(f.error)),
    };
    write_flow_outputs(ctx, &traj, svg_every)?;
    if let Some(e) = failure {
        return Err(CliError::Flow(format!("{e} (partial trajectory of {} records retained)", traj.records.len())));
    }
    let last = traj.last().expect("successful flow has an initial record");
    finite("flow", [last.energy, last.grad_sup])?;
    let stats = RadiusStats::of(&last.shape, 1024);
    let out = json!({
        "steps": traj.steps(),
        "termination": traj.termination,
        "t": last.t,
        "energy": last.energy,
        "grad_sup": last.grad_sup,
        "area": last.area,
        "mean_radius": stats.mean,
        "radius_std_over_mean": stats.relative_spread(),
        "final_shape": last.shape,
        "options": opts,
    });
    ctx.write("flow_summary.json", &pretty(&out))?;
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    pub radius: f64,
    pub lambda: Option<f64>,
    pub k_max: u32,
}

impl Default for SpectrumParams {
    fn default() -> Self {
        Self { radius: 1.0, lambda: None, k_max: 6 }
    }
}

pub fn prepare_spectrum(ctx: &Context, params: SpectrumParams) -> Result<(f64, f64, u32)> {
    let params = overlay(params, ctx.sections.spectrum.as_ref(), "spectrum")?;
    let lambda = match params.lambda {
        Some(l) => l,
        None => ctx
            .kernel
            .as_ref()
            .and_then(|k| k.planar_bessel_lambda())
            .ok_or_else(|| CliError::Input("spectrum needs --lambda or a planar Bessel kernel".into()))?,
    };
    if !(params.radius > 0.0 && params.radius.is_finite() && lambda > 0.0 && lambda.is_finite()) {
        return Err(CliError::Input(format!("radius and lambda must be positive, got ({}, {lambda})", params.radius)));
    }
    if params.k_max as usize > ctx.resolution.boundary() / 4 {
        return Err(CliError::Input(format!(
            "k_max = {} exceeds resolution / 4 = {}",
            params.k_max,
            ctx.resolution.boundary() / 4
        )));
    }
    Ok((params.radius, lambda, params.k_max))
}

pub fn spectrum(ctx: &Context, radius: f64, lambda: f64, k_max: u32) -> Result<Value> {
    let spectrum = ball_mode_spectrum(radius, lambda, k_max, ctx.resolution.boundary())?;
    finite("spectrum", spectrum.entries.iter().map(|e| e.value))?;
    let out = to_json(&spectrum);
    ctx.write("spectrum.json", &pretty(&out))?;
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanParams {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub n_lambda: usize,
    pub n_dir: usize,
    pub tol: f64,
}

impl Default for ScanParams {
    fn default() -> Self {
        Self { lambda_min: 1.0, lambda_max: 8.0, n_lambda: 141, n_dir: 64, tol: 1e-6 }
    }
}

pub fn prepare_scan(ctx: &Context, params: ScanParams) -> Result<ScanParams> {
    ctx.shape()?;
    let p = overlay(params, ctx.sections.scan.as_ref(), "scan")?;
    if !(p.lambda_min > 0.0 && p.lambda_min < p.lambda_max && p.lambda_max.is_finite()) {
        return Err(CliError::Input(format!("need 0 < lambda_min < lambda_max, got [{}, {}]", p.lambda_min, p.lambda_max)));
    }
    if p.n_lambda < 2 || p.n_dir < 16 {
        return Err(CliError::Input(format!("need n_lambda ≥ 2 and n_dir ≥ 16, got ({}, {})", p.n_lambda, p.n_dir)));
    }
    if !(p.tol >= 0.0 && p.tol.is_finite()) {
        return Err(CliError::Input(format!("tol must be non-negative, got {}", p.tol)));
    }
    Ok(p)
}

pub fn scan_cmd(ctx: &Context, p: &ScanParams) -> Result<Value> {
    let shape: &StarShape = ctx.shape()?;
    let grid = shape.sample_boundary(ctx.resolution.boundary())?;
    let result = scan(shape, p.lambda_min, p.lambda_max, p.n_lambda, p.n_dir, &grid)?;
    finite("scan", result.m_of_lambda.iter().copied())?;
    let summary = result.summary(p.tol);
    let confirmation = detects_failure(&result, p.tol)
        .map(|l| confirm_failure(shape, l, p.tol, ctx.resolution.directions(), &grid))
        .transpose()?;
    ctx.write("scan.csv", &result.to_csv())?;
    ctx.write("scan_summary.json", &pretty(&to_json(&summary)))?;
    Ok(json!({
        "argmin_lambda": summary.argmin_lambda,
        "min_value": summary.min_value,
        "failure": summary.failure,
        "area": result.area,
        "tol": p.tol,
        "confirmation": confirmation,
    }))
}
