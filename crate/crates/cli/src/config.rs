//! Experiment configuration, read from TOML.

use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use flatscreen::direct::{IncidentWave, MeshParams};
use flatscreen::farfield::DirectionGrid;
use flatscreen::geometry::{make_shape, ScreenShape, ShapeDescriptor};
use flatscreen::inverse::InverseParams;
use flatscreen::kernel::WaveNumber;
use flatscreen::verify::VerifyParams;

use crate::error::CliError;

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_incident() -> IncidentWave {
    IncidentWave::plane(Vector3::z(), Complex64::new(1.0, 0.0))
}

fn default_grid() -> DirectionGrid {
    DirectionGrid::hemisphere(32, 64)
}

/// Options of the `solve` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    /// Interior screen points at which the Dirichlet residual is reported.
    pub residual_points: usize,
    /// Minimum distance of those points from the rim, relative to the shape's scale.
    pub residual_margin: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            residual_points: 20,
            residual_margin: 0.1,
        }
    }
}

/// Options of the `farfield` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FarfieldOptions {
    /// Density CSV to load instead of solving.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<PathBuf>,
    /// Direction of the asymptotics check, in radians.
    pub asymptotics_theta: f64,
    pub asymptotics_phi: f64,
    /// Radii of the asymptotics check, log-spaced over 10²–10⁴ diameters.
    pub asymptotics_radii: usize,
}

impl Default for FarfieldOptions {
    fn default() -> Self {
        FarfieldOptions {
            density: None,
            asymptotics_theta: 0.7,
            asymptotics_phi: 0.4,
            asymptotics_radii: 9,
        }
    }
}

/// Options of the `invert` command.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InvertOptions {
    /// Far-field CSV to invert; defaults to `farfield.csv` in the output directory.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub farfield: Option<PathBuf>,
}

/// Options of the `uniqueness` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UniquenessOptions {
    /// `target_h` factor of the refined solve that measures the noise floor.
    pub refine_factor: f64,
}

impl Default for UniquenessOptions {
    fn default() -> Self {
        UniquenessOptions { refine_factor: 0.7 }
    }
}

/// One experiment: the screen(s), the incident wave and every stage's
/// parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub wavenumber: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub shape: ShapeDescriptor,
    /// Second screen of the `uniqueness` command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape_b: Option<ShapeDescriptor>,
    #[serde(default = "default_incident")]
    pub incident: IncidentWave,
    #[serde(default)]
    pub mesh: MeshParams,
    #[serde(default = "default_grid")]
    pub grid: DirectionGrid,
    #[serde(default)]
    pub inverse: InverseParams,
    #[serde(default)]
    pub solve: SolveOptions,
    #[serde(default)]
    pub farfield: FarfieldOptions,
    #[serde(default)]
    pub invert: InvertOptions,
    #[serde(default)]
    pub uniqueness: UniquenessOptions,
    #[serde(default)]
    pub verify: VerifyParams,
}

impl ExperimentConfig {
    /// Minimal configuration for `shape` at wave number `k`.
    pub fn new(k: f64, shape: ShapeDescriptor) -> Self {
        ExperimentConfig {
            wavenumber: k,
            seed: 0,
            output_dir: default_output_dir(),
            shape,
            shape_b: None,
            incident: default_incident(),
            mesh: MeshParams::default(),
            grid: default_grid(),
            inverse: InverseParams::default(),
            solve: SolveOptions::default(),
            farfield: FarfieldOptions::default(),
            invert: InvertOptions::default(),
            uniqueness: UniquenessOptions::default(),
            verify: VerifyParams::default(),
        }
    }

    /// Parse and validate TOML text.
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Read, parse and validate a configuration file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text).map_err(|e| e.in_file(path))
    }

    /// Canonical TOML form.
    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn k(&self) -> Result<WaveNumber, CliError> {
        WaveNumber::new(self.wavenumber).map_err(|e| CliError::model("wavenumber", e))
    }

    pub fn shape(&self) -> Result<ScreenShape, CliError> {
        make_shape(&self.shape).map_err(|e| CliError::model("shape", e))
    }

    pub fn shape_b(&self) -> Result<ScreenShape, CliError> {
        let descriptor = self.shape_b.as_ref().ok_or_else(|| {
            CliError::Config("shape_b: required by the uniqueness command".into())
        })?;
        make_shape(descriptor).map_err(|e| CliError::model("shape_b", e))
    }

    /// Check every numeric field against the preconditions of the stage
    /// that consumes it.
    pub fn validate(&self) -> Result<(), CliError> {
        self.k()?;
        let shape = self.shape()?;
        if self.shape_b.is_some() {
            self.shape_b()?;
        }
        self.incident
            .validate(Some(&shape))
            .map_err(|e| CliError::model("incident", e))?;
        let m = &self.mesh;
        if !(m.target_h.is_finite() && m.target_h > 0.0) {
            return Err(CliError::Config(format!(
                "mesh.target_h: must be positive, got {}",
                m.target_h
            )));
        }
        if !(m.grading.is_finite() && m.grading >= 0.0) {
            return Err(CliError::Config(format!(
                "mesh.grading: must be non-negative, got {}",
                m.grading
            )));
        }
        self.grid
            .validate()
            .map_err(|e| CliError::model("grid", e))?;
        self.inverse
            .validate()
            .map_err(|e| CliError::model("inverse", e))?;
        if self.solve.residual_points == 0 {
            return Err(CliError::Config(
                "solve.residual_points: must be positive".into(),
            ));
        }
        if !(self.solve.residual_margin.is_finite()
            && (0.0..0.5).contains(&self.solve.residual_margin))
        {
            return Err(CliError::Config(
                "solve.residual_margin: must lie in [0, 0.5)".into(),
            ));
        }
        let f = &self.farfield;
        if !(f.asymptotics_theta.is_finite() && f.asymptotics_phi.is_finite()) {
            return Err(CliError::Config(
                "farfield.asymptotics_theta/phi: must be finite".into(),
            ));
        }
        if f.asymptotics_radii < 3 {
            return Err(CliError::Config(
                "farfield.asymptotics_radii: need at least 3 radii".into(),
            ));
        }
        let r = self.uniqueness.refine_factor;
        if !(r.is_finite() && r > 0.0 && r < 1.0) {
            return Err(CliError::Config(format!(
                "uniqueness.refine_factor: must lie in (0, 1), got {r}"
            )));
        }
        self.verify
            .validate()
            .map_err(|e| CliError::model("verify", e))?;
        Ok(())
    }
}
