//! Parameter files and command-line overrides.
//!
//! A config file is flat TOML with SI values (angular frequencies in rad/s):
//!
//! ```toml
//! mass_kg = 1e-27
//! omega_emitter = 1e14
//! omega_cavity = 1e14
//! omega_trap = 1e9
//! wavevector = 1e7        # or wavelength = 6.283e-7
//! coupling_g = 1e8
//! ```

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;
use vibron_qed::model::{derive_constants, to_dimensionless, DerivedConstants};
use vibron_qed::{DimensionlessModel, ModelParams};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    mass_kg: Option<f64>,
    omega_emitter: Option<f64>,
    omega_cavity: Option<f64>,
    omega_trap: Option<f64>,
    wavevector: Option<f64>,
    wavelength: Option<f64>,
    coupling_g: Option<f64>,
}

fn require(v: Option<f64>, key: &str, path: &Path) -> Result<f64> {
    v.with_context(|| format!("{}: missing key `{key}`", path.display()))
}

pub fn load(path: &Path) -> Result<ModelParams> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: ConfigFile = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let wavevector = match (raw.wavevector, raw.wavelength) {
        (Some(k), _) => k,
        (None, Some(l)) => 2.0 * std::f64::consts::PI / l,
        (None, None) => bail!("{}: missing key `wavevector` (or `wavelength`)", path.display()),
    };
    Ok(ModelParams {
        mass_kg: require(raw.mass_kg, "mass_kg", path)?,
        omega_emitter: require(raw.omega_emitter, "omega_emitter", path)?,
        omega_cavity: require(raw.omega_cavity, "omega_cavity", path)?,
        omega_trap: require(raw.omega_trap, "omega_trap", path)?,
        wavevector,
        coupling_g: require(raw.coupling_g, "coupling_g", path)?,
        wavelength: raw.wavelength,
    })
}

/// Physical parameters shared by every command.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// TOML parameter file (SI units); defaults to the built-in reference set
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    /// Emitter mass, kg
    #[arg(long, global = true)]
    pub mass: Option<f64>,
    /// Photon wave vector, 1/m
    #[arg(long, global = true)]
    pub wavevector: Option<f64>,
    /// Photon wavelength, m
    #[arg(long, global = true)]
    pub wavelength: Option<f64>,
    /// Emitter transition frequency, rad/s
    #[arg(long, global = true)]
    pub omega_emitter: Option<f64>,
    /// Cavity frequency, rad/s
    #[arg(long, global = true)]
    pub omega_cavity: Option<f64>,
    /// Emitter-cavity coupling, rad/s
    #[arg(long, global = true)]
    pub coupling: Option<f64>,
    /// Trap frequency in units of g (rescales the SI trap frequency)
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub omega_trap: Option<f64>,
}

pub struct Resolved {
    pub params: ModelParams,
    pub derived: DerivedConstants,
    pub model: DimensionlessModel,
}

impl ParamArgs {
    pub fn resolve(&self) -> Result<Resolved> {
        let mut p = match &self.config {
            Some(path) => load(path)?,
            None => ModelParams::reference(),
        };
        if let Some(v) = self.mass {
            p.mass_kg = v;
        }
        if let Some(v) = self.omega_emitter {
            p.omega_emitter = v;
        }
        if let Some(v) = self.omega_cavity {
            p.omega_cavity = v;
        }
        if let Some(v) = self.coupling {
            p.coupling_g = v;
        }
        if let Some(k) = self.wavevector {
            p.wavevector = k;
            if self.wavelength.is_none() && self.config.is_none() {
                p.wavelength = None;
            }
        }
        if let Some(l) = self.wavelength {
            p.wavelength = Some(l);
            if self.wavevector.is_none() {
                p.wavevector = 2.0 * std::f64::consts::PI / l;
            }
        }
        if let Some(w) = self.omega_trap {
            if !(w > 0.0) {
                bail!("--omega-trap must be positive (got {w})");
            }
            p.omega_trap = w * p.coupling_g;
        }
        p.validate()?;
        let derived = derive_constants(&p)?;
        let model = to_dimensionless(&p, &derived)?;
        Ok(Resolved {
            params: p,
            derived,
            model,
        })
    }
}
