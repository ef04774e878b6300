//! Two-screen experiment: distinct screens give distinct far-fields.

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use super::reconstruct::{reconstruct_density, Reconstruction, Window};
use super::support::{
    estimate_support, jaccard, rim_sharpness, true_mask, SupportEstimate, DEFAULT_THRESHOLD,
};
use super::symmetry::{antisymmetry_check, SampleBox, SymmetryReport, SymmetryVerdict};
use crate::direct::{solve_screen, IncidentWave, MeshParams, Solution};
use crate::error::{Error, Result};
use crate::farfield::{
    farfield_of_density, spectrum_from_farfield, DirectionGrid, DiskSpectrum, FarField,
};
use crate::geometry::ScreenShape;
use crate::kernel::WaveNumber;

/// Parameters of the far-field inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InverseParams {
    /// Spectrum lattice points per axis over `[−k, k]`.
    #[serde(default = "default_spectrum_n")]
    pub spectrum_n: usize,
    /// Reconstruction lattice points per axis.
    #[serde(default = "default_lattice_n")]
    pub lattice_n: usize,
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Explicit window; otherwise `window_factor` times the bounding box of
    /// the a-priori region.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    #[serde(default = "default_window_factor")]
    pub window_factor: f64,
}

fn default_spectrum_n() -> usize {
    64
}

fn default_lattice_n() -> usize {
    256
}

fn default_tau() -> f64 {
    DEFAULT_THRESHOLD
}

fn default_window_factor() -> f64 {
    1.5
}

impl Default for InverseParams {
    fn default() -> Self {
        InverseParams {
            spectrum_n: default_spectrum_n(),
            lattice_n: default_lattice_n(),
            tau: default_tau(),
            window: None,
            window_factor: default_window_factor(),
        }
    }
}

impl InverseParams {
    pub fn validate(&self) -> Result<()> {
        if !(2..=4096).contains(&self.spectrum_n) {
            return Err(Error::param("inverse.spectrum_n", "must be in 2..=4096"));
        }
        if !(2..=4096).contains(&self.lattice_n) {
            return Err(Error::param("inverse.lattice_n", "must be in 2..=4096"));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::param("inverse.tau", "must lie in (0, 1)"));
        }
        if !(self.window_factor.is_finite() && self.window_factor >= 1.0) {
            return Err(Error::param("inverse.window_factor", "must be at least 1"));
        }
        if let Some(w) = &self.window {
            w.validate()?;
        }
        Ok(())
    }

    /// The explicit window, or the default one around `region`.
    pub fn window_for(&self, region: &[&ScreenShape]) -> Result<Window> {
        match self.window {
            Some(w) => Ok(w),
            None => Window::around(region, self.window_factor),
        }
    }
}

/// Spectrum, image and support recovered from one far-field.
#[derive(Debug, Clone)]
pub struct Inversion {
    pub spectrum: DiskSpectrum,
    pub reconstruction: Reconstruction,
    pub support: SupportEstimate,
}

/// Far-field → disk spectrum → band-limited image → thresholded support.
pub fn invert_farfield(
    ff: &FarField,
    params: &InverseParams,
    window: &Window,
) -> Result<Inversion> {
    params.validate()?;
    let spectrum = spectrum_from_farfield(ff, params.spectrum_n)?;
    let reconstruction = reconstruct_density(&spectrum, window, params.lattice_n)?;
    let support = estimate_support(&reconstruction, params.tau)?;
    Ok(Inversion {
        spectrum,
        reconstruction,
        support,
    })
}

/// Quality of a recovered support against the true shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupportMetrics {
    pub jaccard: f64,
    pub estimated_area: f64,
    pub true_area: f64,
    pub zero_field: bool,
    /// Rim blur along the `+x₁` ray from the shape's centre.
    pub rim_sharpness: Option<f64>,
}

impl SupportMetrics {
    pub fn measure(support: &SupportEstimate, shape: &ScreenShape) -> Self {
        let mask = true_mask(shape, &support.x, &support.y);
        let centre = shape.offset();
        SupportMetrics {
            jaccard: jaccard(&support.support, &mask),
            estimated_area: support.area(),
            true_area: shape.area(),
            zero_field: support.zero_field,
            rim_sharpness: rim_sharpness(support, nalgebra::Point2::from(centre), Vector2::x()),
        }
    }
}

/// Inputs of [`uniqueness_experiment`].
#[derive(Debug, Clone)]
pub struct UniquenessSetup {
    pub shape_a: ScreenShape,
    pub shape_b: ScreenShape,
    pub incident: IncidentWave,
    pub k: WaveNumber,
    pub mesh: MeshParams,
    pub grid: DirectionGrid,
    pub inverse: InverseParams,
    /// `target_h` factor of the refined re-solve that measures the noise floor.
    pub refine_factor: f64,
    /// Offset of the quasi-random symmetry samples.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessVerdict {
    /// Far-field distance exceeds ten times the noise floor.
    Distinguishable,
    /// Far-fields agree to within ten times the noise floor.
    Indistinguishable,
    /// The incident wave is odd in `x₃`; no screen scatters it.
    DegenerateIncidentWave,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub verdict: UniquenessVerdict,
    pub symmetry: SymmetryReport,
    pub wavenumber: f64,
    pub panels_a: usize,
    pub panels_b: usize,
    pub farfield_sup_a: f64,
    pub farfield_sup_b: f64,
    /// Relative L² distance between the two far-fields.
    pub farfield_distance: f64,
    /// Relative L² distance between shape A's far-fields on two meshes.
    pub noise_floor: Option<f64>,
    pub distance_over_noise: Option<f64>,
    pub panels_refined: Option<usize>,
    /// Jaccard index of the true masks of A and B.
    pub true_mask_jaccard: f64,
    pub support_a: Option<SupportMetrics>,
    pub support_b: Option<SupportMetrics>,
    pub residual_a: f64,
    pub residual_b: f64,
}

/// Factor by which the far-field distance must exceed the noise floor.
pub const NOISE_MARGIN: f64 = 10.0;

/// Sample box over the shapes' bounding box, as deep as it is wide.
pub fn symmetry_box(shapes: &[&ScreenShape]) -> Result<SampleBox> {
    let w = Window::around(shapes, 1.0)?;
    let depth = w.width().max(w.height());
    Ok(SampleBox {
        min: [w.min[0], w.min[1], -depth],
        max: [w.max[0], w.max[1], depth],
    })
}

/// Solve both screens with the same incident wave and compare far-fields and
/// recovered supports.
pub fn uniqueness_experiment(setup: &UniquenessSetup) -> Result<UniquenessReport> {
    let k = setup.k;
    let kv = k.require_scattering()?;
    setup.inverse.validate()?;
    let shapes = [&setup.shape_a, &setup.shape_b];
    let symmetry = antisymmetry_check(
        &setup.incident,
        kv,
        &symmetry_box(&shapes)?,
        256,
        setup.seed,
    )?;
    let degenerate = symmetry.verdict == SymmetryVerdict::Antisymmetric;
    let solve = |shape: &ScreenShape, params: &MeshParams| -> Result<(Solution, FarField)> {
        let sol = solve_screen(shape, params, k, &setup.incident)?;
        let ff = farfield_of_density(&sol.density, k, &setup.grid)?;
        Ok((sol, ff))
    };
    let refined_params = setup.mesh.refined(setup.refine_factor);
    let ((a, b), refined) = rayon::join(
        || {
            rayon::join(
                || solve(&setup.shape_a, &setup.mesh),
                || solve(&setup.shape_b, &setup.mesh),
            )
        },
        || {
            if degenerate {
                None
            } else {
                Some(solve(&setup.shape_a, &refined_params))
            }
        },
    );
    let ((sol_a, ff_a), (sol_b, ff_b)) = (a?, b?);
    let refined = refined.transpose()?;

    let window = setup.inverse.window_for(&shapes)?;
    let probe = reconstruct_grid(&setup.inverse, &window)?;
    let true_mask_jaccard = jaccard(
        &true_mask(&setup.shape_a, &probe.0, &probe.1),
        &true_mask(&setup.shape_b, &probe.0, &probe.1),
    );
    let farfield_distance = ff_a.relative_distance(&ff_b)?;
    let mut report = UniquenessReport {
        verdict: UniquenessVerdict::DegenerateIncidentWave,
        symmetry,
        wavenumber: kv,
        panels_a: sol_a.density.len(),
        panels_b: sol_b.density.len(),
        farfield_sup_a: ff_a.sup_norm(),
        farfield_sup_b: ff_b.sup_norm(),
        farfield_distance,
        noise_floor: None,
        distance_over_noise: None,
        panels_refined: None,
        true_mask_jaccard,
        support_a: None,
        support_b: None,
        residual_a: sol_a.report.residual,
        residual_b: sol_b.report.residual,
    };
    let Some((sol_r, ff_r)) = refined else {
        return Ok(report);
    };
    let noise = ff_a.relative_distance(&ff_r)?;
    report.noise_floor = Some(noise);
    report.panels_refined = Some(sol_r.density.len());
    report.distance_over_noise = Some(if noise > 0.0 {
        farfield_distance / noise
    } else {
        f64::INFINITY
    });
    report.verdict = if farfield_distance > NOISE_MARGIN * noise {
        UniquenessVerdict::Distinguishable
    } else {
        UniquenessVerdict::Indistinguishable
    };
    let inv_a = invert_farfield(&ff_a, &setup.inverse, &window)?;
    let inv_b = invert_farfield(&ff_b, &setup.inverse, &window)?;
    report.support_a = Some(SupportMetrics::measure(&inv_a.support, &setup.shape_a));
    report.support_b = Some(SupportMetrics::measure(&inv_b.support, &setup.shape_b));
    Ok(report)
}

/// Cell centres of the reconstruction lattice for `window`, without a spectrum.
fn reconstruct_grid(params: &InverseParams, window: &Window) -> Result<(Vec<f64>, Vec<f64>)> {
    window.validate()?;
    let n = params.lattice_n;
    let axis = |lo: f64, hi: f64| -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    };
    Ok((
        axis(window.min[0], window.max[0]),
        axis(window.min[1], window.max[1]),
    ))
}
