//! Galerkin single-layer solver for the sound-soft screen.

pub mod assembly;
pub mod density;
pub mod field;
pub mod incident;
pub mod solve;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use assembly::{assemble, assemble_matrix, assemble_rhs, galerkin_entry, LinearSystem};
pub use density::{basis_weights, Basis, Density};
pub use field::{
    boundary_residual, field_csv, interior_samples, scattered_field, scattered_field_batch,
    trace_on_screen,
};
pub use incident::IncidentWave;
pub use solve::{solve, solve_with_report, Factorization, SolveReport};

use crate::error::Result;
use crate::geometry::{mesh_shape, ScreenShape};
use crate::kernel::WaveNumber;

/// Discretization parameters of a direct solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshParams {
    pub target_h: f64,
    pub grading: f64,
    #[serde(default)]
    pub basis: Basis,
}

impl Default for MeshParams {
    fn default() -> Self {
        MeshParams {
            target_h: 0.1,
            grading: 0.5,
            basis: Basis::P0,
        }
    }
}

impl MeshParams {
    /// Same parameters with `target_h` scaled by `factor`.
    pub fn refined(&self, factor: f64) -> Self {
        MeshParams {
            target_h: self.target_h * factor,
            ..*self
        }
    }
}

/// Density and diagnostics of one direct solve.
#[derive(Debug, Clone)]
pub struct Solution {
    pub density: Density,
    pub report: SolveReport,
}

/// Mesh `shape`, assemble and solve for the density of `incident`.
pub fn solve_screen(
    shape: &ScreenShape,
    params: &MeshParams,
    k: WaveNumber,
    incident: &IncidentWave,
) -> Result<Solution> {
    let mesh = Arc::new(mesh_shape(shape, params.target_h, params.grading)?);
    let system = assemble(k, mesh, incident, params.basis)?;
    let (density, report) = solve_with_report(&system)?;
    Ok(Solution { density, report })
}
