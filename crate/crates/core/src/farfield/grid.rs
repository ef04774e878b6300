//! Direction grids on the unit sphere and far-field samples on them.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::gauss_legendre;

/// Directions at which a far-field is sampled.
///
/// Product grids are Gauss–Legendre in `cos θ` times uniform in `φ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DirectionGrid {
    /// Upper hemisphere `x̂₃ > 0`.
    Hemisphere {
        n_theta: usize,
        n_phi: usize,
    },
    Sphere {
        n_theta: usize,
        n_phi: usize,
    },
    List {
        directions: Vec<[f64; 3]>,
    },
}

/// One direction with its polar angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub theta: f64,
    pub phi: f64,
    pub unit: Vector3<f64>,
}

impl Direction {
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        Self::from_cos(ct, st, phi)
    }

    fn from_cos(cos_t: f64, sin_t: f64, phi: f64) -> Self {
        let (sp, cp) = phi.sin_cos();
        let unit = Vector3::new(sin_t * cp, sin_t * sp, cos_t);
        Direction {
            theta: cos_t.clamp(-1.0, 1.0).acos(),
            phi,
            unit: unit / unit.norm(),
        }
    }

    pub fn from_unit(unit: Vector3<f64>) -> Self {
        let unit = unit / unit.norm();
        Direction {
            theta: unit.z.clamp(-1.0, 1.0).acos(),
            phi: unit.y.atan2(unit.x).rem_euclid(2.0 * PI),
            unit,
        }
    }
}

impl DirectionGrid {
    pub fn hemisphere(n_theta: usize, n_phi: usize) -> Self {
        DirectionGrid::Hemisphere { n_theta, n_phi }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DirectionGrid::Hemisphere { n_theta, n_phi }
            | DirectionGrid::Sphere { n_theta, n_phi } => {
                if *n_theta == 0 || *n_theta > 4096 {
                    return Err(Error::param("farfield.n_theta", "must be in 1..=4096"));
                }
                if *n_phi == 0 || *n_phi > 8192 {
                    return Err(Error::param("farfield.n_phi", "must be in 1..=8192"));
                }
            }
            DirectionGrid::List { directions } => {
                if directions.is_empty() {
                    return Err(Error::param("farfield.directions", "must not be empty"));
                }
                for d in directions {
                    let n = Vector3::from(*d).norm();
                    if !n.is_finite() || (n - 1.0).abs() > 1e-12 {
                        return Err(Error::param("farfield.directions", "must be unit vectors"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Polar angles of the product-grid rings, increasing.
    pub fn thetas(&self) -> Vec<f64> {
        match self {
            DirectionGrid::Hemisphere { n_theta, .. } => {
                let (x, _) = gauss_legendre(*n_theta);
                x.iter().rev().map(|c| c.acos()).collect()
            }
            DirectionGrid::Sphere { n_theta, .. } => {
                let (x, _) = gauss_legendre(*n_theta);
                x.iter().rev().map(|c| (2.0 * c - 1.0).acos()).collect()
            }
            DirectionGrid::List { .. } => Vec::new(),
        }
    }

    /// Quadrature weights on the sphere for product grids, in direction order.
    pub fn weights(&self) -> Vec<f64> {
        match self {
            DirectionGrid::Hemisphere { n_theta, n_phi }
            | DirectionGrid::Sphere { n_theta, n_phi } => {
                let span = if matches!(self, DirectionGrid::Hemisphere { .. }) {
                    1.0
                } else {
                    2.0
                };
                let (_, w) = gauss_legendre(*n_theta);
                w.iter()
                    .rev()
                    .flat_map(|wt| {
                        std::iter::repeat_n(span * wt * 2.0 * PI / *n_phi as f64, *n_phi)
                    })
                    .collect()
            }
            DirectionGrid::List { directions } => {
                vec![4.0 * PI / directions.len() as f64; directions.len()]
            }
        }
    }

    /// All directions; product grids are ordered ring by ring.
    pub fn directions(&self) -> Vec<Direction> {
        match self {
            DirectionGrid::Hemisphere { n_theta, n_phi }
            | DirectionGrid::Sphere { n_theta, n_phi } => {
                let (x, _) = gauss_legendre(*n_theta);
                let hemi = matches!(self, DirectionGrid::Hemisphere { .. });
                let mut out = Vec::with_capacity(n_theta * n_phi);
                for u in x.iter().rev() {
                    // Cosine and sine computed from the node to keep unit length.
                    let (cos_t, sin_t) = if hemi {
                        (*u, ((1.0 - u) * (1.0 + u)).sqrt())
                    } else {
                        let c = 2.0 * u - 1.0;
                        (c, (4.0 * u * (1.0 - u)).sqrt())
                    };
                    for j in 0..*n_phi {
                        let phi = 2.0 * PI * j as f64 / *n_phi as f64;
                        out.push(Direction::from_cos(cos_t, sin_t, phi));
                    }
                }
                out
            }
            DirectionGrid::List { directions } => directions
                .iter()
                .map(|d| Direction::from_unit(Vector3::from(*d)))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            DirectionGrid::Hemisphere { n_theta, n_phi }
            | DirectionGrid::Sphere { n_theta, n_phi } => n_theta * n_phi,
            DirectionGrid::List { directions } => directions.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Far-field pattern samples `u^∞(x̂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarField {
    k: f64,
    grid: DirectionGrid,
    directions: Vec<Direction>,
    values: Vec<Complex64>,
}

impl FarField {
    pub fn new(k: f64, grid: DirectionGrid, values: Vec<Complex64>) -> Result<Self> {
        grid.validate()?;
        let directions = grid.directions();
        if directions.len() != values.len() {
            return Err(Error::param(
                "farfield",
                format!(
                    "{} values for {} directions",
                    values.len(),
                    directions.len()
                ),
            ));
        }
        Ok(FarField {
            k,
            grid,
            directions,
            values,
        })
    }

    pub fn zeros(k: f64, grid: DirectionGrid) -> Result<Self> {
        let n = grid.len();
        Self::new(k, grid, vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn grid(&self) -> &DirectionGrid {
        &self.grid
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Discrete L² norm with the grid's quadrature weights.
    pub fn l2_norm(&self) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖self − other‖ / max(‖self‖, ‖other‖)` in the grid L² norm.
    pub fn relative_distance(&self, other: &FarField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::param("farfield", "grids differ"));
        }
        let diff: f64 = self
            .grid
            .weights()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(w, (a, b))| w * (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale = self.l2_norm().max(other.l2_norm());
        Ok(if scale == 0.0 { 0.0 } else { diff / scale })
    }

    /// CSV with columns `theta,phi,x1,x2,x3,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,phi,x1,x2,x3,re,im\n");
        for (d, v) in self.directions.iter().zip(&self.values) {
            let _ = writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                d.theta, d.phi, d.unit.x, d.unit.y, d.unit.z, v.re, v.im
            );
        }
        out
    }

    /// Read a CSV written by [`FarField::to_csv`] for the given grid.
    pub fn from_csv(k: f64, grid: DirectionGrid, text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "theta,phi,x1,x2,x3,re,im" => {}
            _ => {
                return Err(Error::param(
                    "farfield",
                    "missing header `theta,phi,x1,x2,x3,re,im`",
                ))
            }
        }
        let directions = grid.directions();
        let mut values = Vec::with_capacity(directions.len());
        for (row, line) in lines.enumerate() {
            let f: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Error::param("farfield", format!("row {}: bad number", row + 1)))?;
            if f.len() != 7 {
                return Err(Error::param(
                    "farfield",
                    format!("row {}: expected 7 fields", row + 1),
                ));
            }
            let Some(d) = directions.get(row) else {
                return Err(Error::param("farfield", "more rows than grid directions"));
            };
            if (Vector3::new(f[2], f[3], f[4]) - d.unit).norm() > 1e-12 {
                return Err(Error::param(
                    "farfield",
                    format!(
                        "row {}: direction does not match the configured grid",
                        row + 1
                    ),
                ));
            }
            values.push(Complex64::new(f[5], f[6]));
        }
        FarField::new(k, grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_directions_are_unit_and_counted() {
        for grid in [
            DirectionGrid::hemisphere(32, 64),
            DirectionGrid::Sphere {
                n_theta: 7,
                n_phi: 5,
            },
        ] {
            let dirs = grid.directions();
            assert_eq!(dirs.len(), grid.len());
            assert!(dirs.iter().all(|d| (d.unit.norm() - 1.0).abs() <= 1e-14));
            if matches!(grid, DirectionGrid::Hemisphere { .. }) {
                assert!(dirs.iter().all(|d| d.unit.z > 0.0));
            }
            let thetas = grid.thetas();
            assert!(thetas.windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(DirectionGrid::hemisphere(32, 64).len(), 2048);
    }

    #[test]
    fn weights_integrate_the_sphere() {
        let w: f64 = DirectionGrid::Sphere {
            n_theta: 8,
            n_phi: 9,
        }
        .weights()
        .iter()
        .sum();
        assert!((w - 4.0 * PI).abs() < 1e-12);
        let grid = DirectionGrid::hemisphere(10, 12);
        let dirs = grid.directions();
        // ∫_{upper} x₃² = 2π/3.
        let q: f64 = grid
            .weights()
            .iter()
            .zip(&dirs)
            .map(|(w, d)| w * d.unit.z.powi(2))
            .sum();
        assert!((q - 2.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip_and_grid_check() {
        let grid = DirectionGrid::hemisphere(3, 4);
        let vals: Vec<Complex64> = (0..12)
            .map(|i| Complex64::new(i as f64, -0.5 * i as f64))
            .collect();
        let ff = FarField::new(2.0, grid.clone(), vals).unwrap();
        let back = FarField::from_csv(2.0, grid, &ff.to_csv()).unwrap();
        assert_eq!(back, ff);
        assert!(FarField::from_csv(2.0, DirectionGrid::hemisphere(4, 3), &ff.to_csv()).is_err());
    }
}
