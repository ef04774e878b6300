//! The subcommands: each reads an [`ExperimentConfig`], runs one stage of the
//! pipeline and writes its exports to the output directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::Vector3;
use serde::Serialize;

use flatscreen::direct::{
    boundary_residual, interior_samples, solve_screen, Density, MeshParams, Solution, SolveReport,
};
use flatscreen::farfield::{
    default_radii, farfield_of_density, verify_asymptotics, AsymptoticsTable, FarField,
};
use flatscreen::geometry::{mesh_shape, ScreenShape};
use flatscreen::inverse::{
    antisymmetry_check, invert_farfield, symmetry_box, uniqueness_experiment, SupportMetrics,
    SymmetryReport, SymmetryVerdict, UniquenessReport, UniquenessSetup, Window,
};
use flatscreen::verify::{run_property_suite, VerifyReport};

use crate::config::ExperimentConfig;
use crate::error::CliError;

/// Warning printed when the incident wave is odd in `x₃`.
pub const DEGENERATE_WARNING: &str = "degenerate incident wave";

/// Quasi-random samples of the antisymmetry check.
const SYMMETRY_SAMPLES: usize = 256;

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("cannot serialize report: {e}")))?;
    write_file(path, &(text + "\n"))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn prepare_output(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|source| CliError::Write {
        path: out.to_path_buf(),
        source,
    })
}

fn symmetry(
    config: &ExperimentConfig,
    shapes: &[&ScreenShape],
) -> Result<SymmetryReport, CliError> {
    let sample_box = symmetry_box(shapes).map_err(|e| CliError::model("shape", e))?;
    antisymmetry_check(
        &config.incident,
        config.wavenumber,
        &sample_box,
        SYMMETRY_SAMPLES,
        config.seed,
    )
    .map_err(|e| CliError::model("incident", e))
}

fn direct_solve(
    config: &ExperimentConfig,
    shape: &ScreenShape,
    mesh: &MeshParams,
) -> Result<Solution, CliError> {
    solve_screen(shape, mesh, config.k()?, &config.incident)
        .map_err(|e| CliError::model("solve", e))
}

/// Summary of the `solve` command, written as `solve_report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveSummary {
    pub wavenumber: f64,
    pub panels: usize,
    pub basis: &'static str,
    pub solver: SolveReport,
    /// `max |u_i + u_s|` over interior screen points.
    pub boundary_residual: f64,
    pub residual_points: usize,
    /// Euclidean norm of the density coefficients.
    pub density_norm: f64,
    pub symmetry: SymmetryReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Solve the direct problem and export the density.
pub fn cmd_solve(config: &ExperimentConfig, out: &Path) -> Result<SolveSummary, CliError> {
    let shape = config.shape()?;
    let symmetry = symmetry(config, &[&shape])?;
    let warning = (symmetry.verdict == SymmetryVerdict::Antisymmetric).then(|| {
        format!(
            "{DEGENERATE_WARNING}: u_i is odd in x3 (defect {:.1e}); the density vanishes",
            symmetry.antisymmetry_defect
        )
    });
    let sol = direct_solve(config, &shape, &config.mesh)?;
    let points = interior_samples(
        &shape,
        config.solve.residual_points,
        config.solve.residual_margin,
        config.seed,
    )
    .map_err(|e| CliError::model("solve.residual_margin", e))?;
    let residual = boundary_residual(&sol.density, config.k()?, &config.incident, &points)
        .map_err(|e| CliError::model("solve", e))?;
    prepare_output(out)?;
    write_file(&out.join("density.csv"), &sol.density.to_csv())?;
    let summary = SolveSummary {
        wavenumber: config.wavenumber,
        panels: sol.density.len(),
        basis: sol.density.basis().name(),
        solver: sol.report,
        boundary_residual: residual,
        residual_points: points.len(),
        density_norm: sol.density.coefficient_norm(),
        symmetry,
        warning,
    };
    write_json(&out.join("solve_report.json"), &summary)?;
    Ok(summary)
}

fn load_density(
    config: &ExperimentConfig,
    shape: &ScreenShape,
    path: &Path,
) -> Result<Density, CliError> {
    let text = read_file(path)?;
    let mesh = mesh_shape(shape, config.mesh.target_h, config.mesh.grading)
        .map_err(|e| CliError::model("mesh", e))?;
    Density::from_csv(Arc::new(mesh), config.mesh.basis, &text).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Summary of the `farfield` command, written as `farfield_report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FarfieldSummary {
    pub wavenumber: f64,
    pub directions: usize,
    pub sup_norm: f64,
    pub l2_norm: f64,
    /// Density CSV the far-field was computed from, if not solved afresh.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_source: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotics: Option<AsymptoticsTable>,
}

/// Far-field of a loaded or freshly solved density, optionally with the
/// `(r, error, error·r)` asymptotics table.
pub fn cmd_farfield(
    config: &ExperimentConfig,
    out: &Path,
    check_asymptotics: bool,
) -> Result<FarfieldSummary, CliError> {
    let shape = config.shape()?;
    let k = config.k()?;
    let density = match &config.farfield.density {
        Some(path) => load_density(config, &shape, path)?,
        None => direct_solve(config, &shape, &config.mesh)?.density,
    };
    let ff =
        farfield_of_density(&density, k, &config.grid).map_err(|e| CliError::model("grid", e))?;
    let asymptotics = if check_asymptotics {
        let (lo, hi) = shape.bounding_box();
        let diameter = (hi - lo).norm();
        let (t, p) = (
            config.farfield.asymptotics_theta,
            config.farfield.asymptotics_phi,
        );
        let direction = Vector3::new(t.sin() * p.cos(), t.sin() * p.sin(), t.cos());
        let radii = default_radii(diameter, config.farfield.asymptotics_radii);
        Some(
            verify_asymptotics(&density, k, direction, &radii)
                .map_err(|e| CliError::model("farfield.asymptotics", e))?,
        )
    } else {
        None
    };
    prepare_output(out)?;
    write_file(&out.join("farfield.csv"), &ff.to_csv())?;
    if let Some(table) = &asymptotics {
        let mut csv = String::from("r,error,scaled_error\n");
        for row in &table.rows {
            csv.push_str(&format!(
                "{:.17e},{:.17e},{:.17e}\n",
                row.r, row.error, row.scaled_error
            ));
        }
        write_file(&out.join("asymptotics.csv"), &csv)?;
    }
    let summary = FarfieldSummary {
        wavenumber: config.wavenumber,
        directions: ff.len(),
        sup_norm: ff.sup_norm(),
        l2_norm: ff.l2_norm(),
        density_source: config.farfield.density.clone(),
        asymptotics,
    };
    write_json(&out.join("farfield_report.json"), &summary)?;
    Ok(summary)
}

/// Outcome of an inversion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InversionVerdict {
    /// A non-empty support was recovered.
    SupportRecovered,
    /// The far-field vanishes: the incident wave was odd in `x₃` or the
    /// data carry no scattering.
    DegenerateZeroFarfield,
}

/// Metrics of the `invert` command, written as `invert_metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvertSummary {
    pub wavenumber: f64,
    pub farfield_source: PathBuf,
    pub verdict: InversionVerdict,
    pub tau: f64,
    pub window: Window,
    pub spectrum_points: usize,
    /// Support metrics against the configured shape as ground truth.
    pub metrics: SupportMetrics,
}

/// Invert a far-field CSV: disk spectrum, reconstruction and support.
pub fn cmd_invert(config: &ExperimentConfig, out: &Path) -> Result<InvertSummary, CliError> {
    let shape = config.shape()?;
    let source = config
        .invert
        .farfield
        .clone()
        .unwrap_or_else(|| out.join("farfield.csv"));
    let text = read_file(&source)?;
    let ff = FarField::from_csv(config.wavenumber, config.grid.clone(), &text).map_err(|e| {
        CliError::Input {
            path: source.clone(),
            message: e.to_string(),
        }
    })?;
    let window = config
        .inverse
        .window_for(&[&shape])
        .map_err(|e| CliError::model("inverse.window", e))?;
    let inversion =
        invert_farfield(&ff, &config.inverse, &window).map_err(|e| CliError::model("invert", e))?;
    let metrics = SupportMetrics::measure(&inversion.support, &shape);
    prepare_output(out)?;
    write_file(&out.join("spectrum.csv"), &inversion.spectrum.to_csv())?;
    write_file(&out.join("support.csv"), &inversion.support.to_csv())?;
    let summary = InvertSummary {
        wavenumber: config.wavenumber,
        farfield_source: source,
        verdict: if metrics.zero_field {
            InversionVerdict::DegenerateZeroFarfield
        } else {
            InversionVerdict::SupportRecovered
        },
        tau: config.inverse.tau,
        window,
        spectrum_points: inversion.spectrum.values().len(),
        metrics,
    };
    write_json(&out.join("invert_metrics.json"), &summary)?;
    Ok(summary)
}

/// Two-screen experiment, written as `uniqueness_report.json`.
pub fn cmd_uniqueness(config: &ExperimentConfig, out: &Path) -> Result<UniquenessReport, CliError> {
    let setup = UniquenessSetup {
        shape_a: config.shape()?,
        shape_b: config.shape_b()?,
        incident: config.incident.clone(),
        k: config.k()?,
        mesh: config.mesh,
        grid: config.grid.clone(),
        inverse: config.inverse,
        refine_factor: config.uniqueness.refine_factor,
        seed: config.seed,
    };
    let report = uniqueness_experiment(&setup).map_err(|e| CliError::model("uniqueness", e))?;
    prepare_output(out)?;
    write_json(&out.join("uniqueness_report.json"), &report)?;
    Ok(report)
}

/// Property suite, written as `verify_report.json`. Fails with a numerical
/// exit code when any property does not hold.
pub fn cmd_verify(config: &ExperimentConfig, out: &Path) -> Result<VerifyReport, CliError> {
    let report = run_property_suite(&config.verify).map_err(|e| CliError::model("verify", e))?;
    prepare_output(out)?;
    write_json(&out.join("verify_report.json"), &report)?;
    Ok(report)
}
