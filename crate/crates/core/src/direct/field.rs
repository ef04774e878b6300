//! Single-layer potential of a density: scattered field and screen trace.

use nalgebra::{Point2, Point3};
use num_complex::Complex64;
use rayon::prelude::*;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::density::Density;
use super::incident::IncidentWave;
use crate::error::{Error, Result};
use crate::geometry::ScreenShape;
use crate::kernel::{panel_integral, WaveNumber};

fn potential(density: &Density, k: WaveNumber, x: &Point2<f64>, height: f64) -> Result<Complex64> {
    let panels = density.mesh().panels();
    let mut sum = Complex64::new(0.0, 0.0);
    for ((p, w), c) in panels
        .iter()
        .zip(density.weights())
        .zip(density.coefficients())
    {
        if *c == Complex64::new(0.0, 0.0) {
            continue;
        }
        sum += c * panel_integral(k, &p.vertices, w, x, height)?;
    }
    Ok(sum)
}

/// `u_s(x) = ∫ Φ(x, y⁰) ρ_h(y′) dy′` for `x` off the screen.
pub fn scattered_field(density: &Density, k: WaveNumber, x: &Point3<f64>) -> Result<Complex64> {
    if !(x.x.is_finite() && x.y.is_finite() && x.z.is_finite()) {
        return Err(Error::param("x", "must be finite"));
    }
    let xp = Point2::new(x.x, x.y);
    if x.z == 0.0 {
        let shape = density.mesh().shape();
        if shape.contains(&xp) || shape.distance_to_boundary(&xp) <= 1e-12 * shape.scale() {
            return Err(Error::Domain(
                "evaluation point lies on the screen; use trace_on_screen".into(),
            ));
        }
    }
    potential(density, k, &xp, x.z)
}

/// Field at many points, evaluated in parallel.
pub fn scattered_field_batch(
    density: &Density,
    k: WaveNumber,
    points: &[Point3<f64>],
) -> Result<Vec<Complex64>> {
    points
        .par_iter()
        .map(|x| scattered_field(density, k, x))
        .collect()
}

/// Single-layer potential on the screen at an interior point `x′`.
pub fn trace_on_screen(density: &Density, k: WaveNumber, x: &Point2<f64>) -> Result<Complex64> {
    if !density.mesh().shape().contains(x) || density.mesh().locate(x).is_none() {
        return Err(Error::Domain(format!(
            "trace point ({}, {}) is not inside the screen",
            x.x, x.y
        )));
    }
    potential(density, k, x, 0.0)
}

/// `n` points of the screen at least `margin · scale` inside its boundary,
/// drawn uniformly with a seeded generator.
pub fn interior_samples(
    shape: &ScreenShape,
    n: usize,
    margin: f64,
    seed: u64,
) -> Result<Vec<Point2<f64>>> {
    let (lo, hi) = shape.bounding_box();
    let min_distance = margin * shape.scale();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while points.len() < n {
        attempts += 1;
        if attempts > 1000 * n.max(1) {
            return Err(Error::Domain(format!(
                "no interior points at margin {margin}"
            )));
        }
        let p = Point2::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
        if shape.contains(&p) && shape.distance_to_boundary(&p) >= min_distance {
            points.push(p);
        }
    }
    Ok(points)
}

/// `max |u_i + u_s|` over screen points: the Dirichlet residual of a solve.
pub fn boundary_residual(
    density: &Density,
    k: WaveNumber,
    incident: &IncidentWave,
    points: &[Point2<f64>],
) -> Result<f64> {
    let values: Vec<f64> = points
        .par_iter()
        .map(|p| Ok((incident.on_plane(k.value(), p) + trace_on_screen(density, k, p)?).norm()))
        .collect::<Result<_>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

/// CSV with columns `x,y,z,re,im`.
pub fn field_csv(points: &[Point3<f64>], values: &[Complex64]) -> String {
    let mut out = String::from("x,y,z,re,im\n");
    for (p, u) in points.iter().zip(values) {
        let _ = writeln!(
            out,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            p.x, p.y, p.z, u.re, u.im
        );
    }
    out
}
