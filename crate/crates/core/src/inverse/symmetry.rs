//! Detection of incident waves that are odd in `x₃`.
//!
//! Only the even part `ũ_i(x) = ½(u_i(x′, x₃) + u_i(x′, −x₃))` of an incident
//! wave scatters from a flat screen; an odd wave produces no scattered field.

use nalgebra::Point3;
use serde::{Deserialize, Serialize};

use crate::direct::IncidentWave;
use crate::error::{Error, Result};

/// Defects at or below this value are reported as antisymmetric.
pub const ANTISYMMETRY_TOLERANCE: f64 = 1e-10;

/// Axis-aligned sampling box in ℝ³.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl SampleBox {
    pub fn validate(&self) -> Result<()> {
        if !(0..3).all(|i| {
            self.min[i].is_finite() && self.max[i].is_finite() && self.max[i] > self.min[i]
        }) {
            return Err(Error::param(
                "sample_box",
                "needs finite bounds with max > min",
            ));
        }
        if !(self.min[2] < 0.0 && self.max[2] > 0.0) {
            return Err(Error::param(
                "sample_box",
                "must intersect both half-spaces x₃ < 0 and x₃ > 0",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryVerdict {
    Antisymmetric,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// `max |ũ_i| / max |u_i|` over the samples.
    pub antisymmetry_defect: f64,
    pub verdict: SymmetryVerdict,
    pub samples: usize,
}

/// Radical inverse of `i` in `base`.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Halton points in the box, skipping the first `offset` indices.
pub fn halton_points(sample_box: &SampleBox, n: usize, offset: u64) -> Vec<Point3<f64>> {
    (0..n as u64)
        .map(|i| {
            let i = i + offset + 1;
            let t = [
                radical_inverse(i, 2),
                radical_inverse(i, 3),
                radical_inverse(i, 5),
            ];
            Point3::from(std::array::from_fn::<f64, 3, _>(|d| {
                sample_box.min[d] + t[d] * (sample_box.max[d] - sample_box.min[d])
            }))
        })
        .collect()
}

/// Size of the even part of `u_i` relative to `u_i`, on `n_samples`
/// quasi-random points of `sample_box`.
pub fn antisymmetry_check(
    incident: &IncidentWave,
    k: f64,
    sample_box: &SampleBox,
    n_samples: usize,
    offset: u64,
) -> Result<SymmetryReport> {
    sample_box.validate()?;
    if n_samples == 0 {
        return Err(Error::param("n_samples", "must be positive"));
    }
    let mut even_max = 0.0f64;
    let mut max = 0.0f64;
    for x in halton_points(sample_box, n_samples, offset) {
        let up = incident.evaluate(k, &x);
        let down = incident.evaluate(k, &Point3::new(x.x, x.y, -x.z));
        even_max = even_max.max((0.5 * (up + down)).norm());
        max = max.max(up.norm()).max(down.norm());
    }
    let defect = if max == 0.0 { 0.0 } else { even_max / max };
    Ok(SymmetryReport {
        antisymmetry_defect: defect,
        verdict: if defect <= ANTISYMMETRY_TOLERANCE {
            SymmetryVerdict::Antisymmetric
        } else {
            SymmetryVerdict::Generic
        },
        samples: n_samples,
    })
}
