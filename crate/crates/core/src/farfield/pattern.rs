//! Far-field pattern of a density and the check of the far-field asymptotics.

use std::f64::consts::PI;

use nalgebra::{Point2, Point3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{DirectionGrid, FarField};
use crate::direct::{scattered_field, Density};
use crate::error::{Error, Result};
use crate::kernel::singular::oscillatory_degree;
use crate::kernel::{QuadratureRule, WaveNumber};

/// Quadrature nodes `(y′, weight)` of the whole density, with basis weight,
/// panel area and coefficient folded into the weight.
fn density_nodes(density: &Density, k: f64) -> Vec<(Point2<f64>, Complex64)> {
    let mut nodes = Vec::new();
    let linear = u32::from(
        density
            .weights()
            .iter()
            .any(|w| w[0] != w[1] || w[1] != w[2]),
    );
    for ((p, w), c) in density
        .mesh()
        .panels()
        .iter()
        .zip(density.weights())
        .zip(density.coefficients())
    {
        if *c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let rule = QuadratureRule::with_degree(oscillatory_degree(k, p.diameter) + linear);
        for (l, q) in rule.iter() {
            let ell = w[0] * l[0] + w[1] * l[1] + w[2] * l[2];
            nodes.push((p.at(l), c * (q * p.area * ell)));
        }
    }
    nodes
}

/// `u^∞(x̂) = (1/4π) ∫ e^{−ik x̂·y⁰} ρ_h(y′) dy′` on every grid direction.
pub fn farfield_of_density(
    density: &Density,
    k: WaveNumber,
    grid: &DirectionGrid,
) -> Result<FarField> {
    grid.validate()?;
    let kv = k.value();
    let nodes = density_nodes(density, kv);
    let values = grid
        .directions()
        .par_iter()
        .map(|d| {
            let (a, b) = (kv * d.unit.x, kv * d.unit.y);
            let sum: Complex64 = nodes
                .iter()
                .map(|(y, w)| w * Complex64::cis(-(a * y.x + b * y.y)))
                .sum();
            sum / (4.0 * PI)
        })
        .collect();
    FarField::new(kv, grid.clone(), values)
}

/// One row of the asymptotics table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsRow {
    pub r: f64,
    /// `|r e^{−ikr} u_s(r x̂) − u^∞(x̂)|`.
    pub error: f64,
    pub scaled_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsTable {
    pub direction: [f64; 3],
    pub rows: Vec<AsymptoticsRow>,
    /// Least-squares slope of `log error` against `log r`; absent when an
    /// error vanishes.
    pub slope: Option<f64>,
}

impl AsymptoticsTable {
    /// `error(2r) / error(r)` for consecutive rows whose radii double.
    pub fn doubling_ratios(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .filter(|w| (w[1].r / w[0].r - 2.0).abs() < 1e-9 && w[0].error > 0.0)
            .map(|w| w[1].error / w[0].error)
            .collect()
    }
}

/// Log-log least-squares slope.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() || ys.iter().chain(xs).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Tabulate `|r e^{−ikr} u_s(r x̂) − u^∞(x̂)|` over `radii`.
pub fn verify_asymptotics(
    density: &Density,
    k: WaveNumber,
    direction: Vector3<f64>,
    radii: &[f64],
) -> Result<AsymptoticsTable> {
    let kv = k.require_scattering()?;
    let n = direction.norm();
    if !n.is_finite() || n == 0.0 {
        return Err(Error::param("direction", "must be a nonzero vector"));
    }
    let unit = direction / n;
    if radii.is_empty() || radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
        return Err(Error::param(
            "radii",
            "must be positive and strictly increasing",
        ));
    }
    let grid = DirectionGrid::List {
        directions: vec![[unit.x, unit.y, unit.z]],
    };
    let far = farfield_of_density(density, k, &grid)?.values()[0];
    let rows = radii
        .par_iter()
        .map(|&r| {
            let x = Point3::from(unit * r);
            let u = scattered_field(density, k, &x)?;
            let error = (u * r * Complex64::cis(-kv * r) - far).norm();
            Ok(AsymptoticsRow {
                r,
                error,
                scaled_error: error * r,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.r).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.error).collect();
    Ok(AsymptoticsTable {
        direction: [unit.x, unit.y, unit.z],
        slope: loglog_slope(&xs, &ys),
        rows,
    })
}

/// Radii `diam · 10^{2 + 2i/(n−1)}` for `i = 0..n`, spanning 10² to 10⁴
/// diameters.
pub fn default_radii(diameter: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| diameter * 10f64.powf(2.0 + 2.0 * i as f64 / (n - 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::direct::Basis;
    use crate::geometry::{make_shape, mesh_shape, ShapeDescriptor};

    fn density() -> Density {
        let shape = make_shape(&ShapeDescriptor::Ellipse { a: 1.0, b: 0.6 }).unwrap();
        let mesh = Arc::new(mesh_shape(&shape, 0.2, 0.0).unwrap());
        let c = (0..mesh.len())
            .map(|j| Complex64::new(1.0 + (j as f64).sin(), 0.3 * (j as f64 * 0.7).cos()))
            .collect();
        Density::new(mesh, Basis::P0, c).unwrap()
    }

    #[test]
    fn zero_density_has_zero_farfield() {
        let d = density();
        let z = Density::zeros(d.mesh_arc().clone(), Basis::P0);
        let ff = farfield_of_density(
            &z,
            WaveNumber::new(3.0).unwrap(),
            &DirectionGrid::hemisphere(4, 8),
        )
        .unwrap();
        assert_eq!(ff.sup_norm(), 0.0);
        let t = verify_asymptotics(
            &z,
            WaveNumber::new(3.0).unwrap(),
            Vector3::x(),
            &[100.0, 200.0],
        )
        .unwrap();
        assert!(t.rows.iter().all(|r| r.error == 0.0));
    }

    #[test]
    fn tiny_panel_is_a_point_mass() {
        let d = density();
        let mesh = d.mesh_arc().clone();
        let j = (0..mesh.len())
            .min_by(|&a, &b| {
                mesh.panels()[a]
                    .centroid
                    .coords
                    .norm()
                    .total_cmp(&mesh.panels()[b].centroid.coords.norm())
            })
            .unwrap();
        let mut c = vec![Complex64::new(0.0, 0.0); mesh.len()];
        c[j] = Complex64::new(1.0, 0.0);
        let single = Density::new(mesh.clone(), Basis::P0, c).unwrap();
        let p = mesh.panels()[j];
        let k = 0.5;
        let ff = farfield_of_density(
            &single,
            WaveNumber::new(k).unwrap(),
            &DirectionGrid::hemisphere(6, 8),
        )
        .unwrap();
        let expected = p.area / (4.0 * PI);
        let tol = k * (p.centroid.coords.norm() + p.diameter) * expected;
        assert!(ff.values().iter().all(|v| (v - expected).norm() < tol));
    }

    #[test]
    fn farfield_is_even_in_x3() {
        let d = density();
        let k = WaveNumber::new(5.0).unwrap();
        let grid = DirectionGrid::hemisphere(5, 7);
        let up = farfield_of_density(&d, k, &grid).unwrap();
        let mirrored = DirectionGrid::List {
            directions: grid
                .directions()
                .iter()
                .map(|d| [d.unit.x, d.unit.y, -d.unit.z])
                .collect(),
        };
        let down = farfield_of_density(&d, k, &mirrored).unwrap();
        for (a, b) in up.values().iter().zip(down.values()) {
            assert!((a - b).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn asymptotic_error_decays_like_one_over_r() {
        let d = density();
        let k = WaveNumber::new(3.0).unwrap();
        let radii: Vec<f64> = (0..7).map(|i| 200.0 * 2f64.powi(i)).collect();
        let t = verify_asymptotics(&d, k, Vector3::new(0.3, -0.4, 0.8), &radii).unwrap();
        let slope = t.slope.unwrap();
        assert!((-1.3..=-0.7).contains(&slope), "slope {slope}");
        for ratio in t.doubling_ratios() {
            assert!((0.4..=0.6).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn slope_of_exact_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-1.5)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() + 1.5).abs() < 1e-12);
        assert!(loglog_slope(&xs, &[0.0, 1.0, 1.0, 1.0]).is_none());
    }
}
