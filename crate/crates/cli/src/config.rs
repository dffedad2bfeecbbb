use std::fs;
use std::path::{Path, PathBuf};

use pompeiu_core::geometry::{Point, StarShape};
use pompeiu_core::kernel::RadialKernel;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

pub const DEFAULT_RESOLUTION: usize = 512;

/// Boundary node count; interior and spectral resolutions derive from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution(usize);

impl Resolution {
    pub fn new(n: usize) -> Result<Self> {
        if !(32..=8192).contains(&n) || !n.is_multiple_of(2) {
            return Err(CliError::Input(format!("resolution must be even and in 32..=8192, got {n}")));
        }
        Ok(Self(n))
    }

    pub fn boundary(self) -> usize {
        self.0
    }

    pub fn n_theta(self) -> usize {
        self.0 / 2
    }

    pub fn n_rho(self) -> usize {
        (self.0 / 16).max(4)
    }

    pub fn directions(self) -> usize {
        self.0 / 2
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum ShapePreset {
    Circle {
        #[serde(default)]
        center: Point,
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default = "default_harmonics")]
        harmonics: usize,
    },
    RoundedSquare {
        half_side: f64,
        #[serde(default = "default_harmonics")]
        harmonics: usize,
    },
}

fn default_harmonics() -> usize {
    32
}

impl ShapePreset {
    fn build(self) -> pompeiu_core::Result<StarShape> {
        match self {
            ShapePreset::Circle { center, radius } => StarShape::circle(center, radius),
            ShapePreset::Ellipse { a, b, harmonics } => StarShape::ellipse(a, b, harmonics),
            ShapePreset::RoundedSquare { half_side, harmonics } => StarShape::rounded_square(half_side, harmonics),
        }
    }
}

const PRESETS: [&str; 3] = ["circle", "ellipse", "rounded_square"];

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(CliError::io(path))?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse { path: path.to_path_buf(), source })
}

/// A file path (relative to `base`) or an inline JSON value.
fn resolve(value: Value, base: &Path) -> Result<(Value, PathBuf)> {
    match value {
        Value::String(p) => {
            let path = base.join(p);
            Ok((read_json(&path)?, path))
        }
        other => Ok((other, base.to_path_buf())),
    }
}

fn parse_shape(value: Value, origin: &Path) -> Result<StarShape> {
    let preset = value.as_object().filter(|o| o.len() == 1 && PRESETS.iter().any(|k| o.contains_key(*k)));
    let shape = if preset.is_some() {
        let preset: ShapePreset = serde_json::from_value(value)
            .map_err(|e| CliError::Input(format!("{}: shape preset: {e}", origin.display())))?;
        preset.build()?
    } else {
        serde_json::from_value(value).map_err(|e| CliError::Input(format!("{}: shape: {e}", origin.display())))?
    };
    Ok(shape)
}

fn parse_kernel(value: Value, origin: &Path) -> Result<RadialKernel> {
    serde_json::from_value(value).map_err(|e| CliError::Input(format!("{}: kernel: {e}", origin.display())))
}

pub fn load_shape(path: &Path) -> Result<StarShape> {
    parse_shape(read_json(path)?, path)
}

pub fn load_kernel(path: &Path) -> Result<RadialKernel> {
    parse_kernel(read_json(path)?, path)
}

/// JSON run configuration; every field overrides the matching flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub shape: Option<Value>,
    pub kernel: Option<Value>,
    pub out: Option<PathBuf>,
    pub resolution: Option<usize>,
    pub seed: Option<u64>,
    pub flow: Option<Value>,
    pub scan: Option<Value>,
    pub spectrum: Option<Value>,
    pub potential: Option<Value>,
}

/// Flag values before the configuration file is applied.
#[derive(Debug, Default)]
pub struct Flags {
    pub shape: Option<PathBuf>,
    pub kernel: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub config: Option<PathBuf>,
    pub resolution: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub struct Context {
    pub shape: Option<StarShape>,
    pub kernel: Option<RadialKernel>,
    pub out: Option<PathBuf>,
    pub resolution: Resolution,
    pub seed: u64,
    pub sections: Sections,
}

#[derive(Debug, Default)]
pub struct Sections {
    pub flow: Option<Value>,
    pub scan: Option<Value>,
    pub spectrum: Option<Value>,
    pub potential: Option<Value>,
}

impl Context {
    pub fn build(flags: Flags) -> Result<Self> {
        let (config, base) = match &flags.config {
            Some(path) => {
                let config: RunConfig = serde_json::from_value(read_json(path)?)
                    .map_err(|source| CliError::Parse { path: path.clone(), source })?;
                (config, path.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (RunConfig::default(), PathBuf::new()),
        };
        let shape = match config.shape {
            Some(v) => {
                let (value, origin) = resolve(v, &base)?;
                Some(parse_shape(value, &origin)?)
            }
            None => flags.shape.as_deref().map(load_shape).transpose()?,
        };
        let kernel = match config.kernel {
            Some(v) => {
                let (value, origin) = resolve(v, &base)?;
                Some(parse_kernel(value, &origin)?)
            }
            None => flags.kernel.as_deref().map(load_kernel).transpose()?,
        };
        let out = config.out.map(|p| base.join(p)).or(flags.out);
        let resolution = Resolution::new(config.resolution.or(flags.resolution).unwrap_or(DEFAULT_RESOLUTION))?;
        Ok(Self {
            shape,
            kernel,
            out,
            resolution,
            seed: config.seed.or(flags.seed).unwrap_or(0),
            sections: Sections {
                flow: config.flow,
                scan: config.scan,
                spectrum: config.spectrum,
                potential: config.potential,
            },
        })
    }

    pub fn shape(&self) -> Result<&StarShape> {
        self.shape.as_ref().ok_or_else(|| CliError::Input("a shape is required (--shape or config \"shape\")".into()))
    }

    pub fn kernel(&self) -> Result<&RadialKernel> {
        self.kernel
            .as_ref()
            .ok_or_else(|| CliError::Input("a kernel is required (--kernel or config \"kernel\")".into()))
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<()> {
        if let Some(dir) = &self.out {
            let path = dir.join(name);
            let parent = path.parent().unwrap_or(dir);
            fs::create_dir_all(parent).map_err(CliError::io(parent))?;
            fs::write(&path, contents).map_err(CliError::io(&path))?;
        }
        Ok(())
    }
}

/// Replaces fields of `base` with those present in the `patch` object.
pub fn overlay<T: Serialize + DeserializeOwned>(base: T, patch: Option<&Value>, section: &str) -> Result<T> {
    let Some(patch) = patch else { return Ok(base) };
    let Value::Object(fields) = patch else {
        return Err(CliError::Input(format!("config section \"{section}\" must be an object")));
    };
    let mut merged = serde_json::to_value(base).map_err(|e| CliError::Input(e.to_string()))?;
    if let Value::Object(target) = &mut merged {
        for (k, v) in fields {
            target.insert(k.clone(), v.clone());
        }
    }
    serde_json::from_value(merged).map_err(|e| CliError::Input(format!("config section \"{section}\": {e}")))
}
