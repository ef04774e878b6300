//! Discrete densities on a screen mesh.

use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::Point2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ScreenMesh;
use crate::kernel::singular::{PanelWeights, UNIT_WEIGHTS};

/// Basis of piecewise functions on the mesh panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// Constant per panel.
    #[default]
    P0,
    /// Constant per panel times the edge weight `1/√max(d, ε_d)`, with `d` the
    /// distance to the boundary and `ε_d` the smallest panel diameter. The
    /// weight is interpolated linearly from its vertex values.
    P0w,
}

impl Basis {
    pub fn name(&self) -> &'static str {
        match self {
            Basis::P0 => "p0",
            Basis::P0w => "p0w",
        }
    }
}

/// Vertex values of every basis function's weight, one entry per panel.
pub fn basis_weights(mesh: &ScreenMesh, basis: Basis) -> Vec<PanelWeights> {
    match basis {
        Basis::P0 => vec![UNIT_WEIGHTS; mesh.len()],
        Basis::P0w => {
            let eps = mesh.min_diameter();
            let d = mesh.vertex_boundary_distance();
            mesh.triangles()
                .iter()
                .map(|t| t.map(|v| 1.0 / d[v].max(eps).sqrt()))
                .collect()
        }
    }
}

/// `ρ_h = Σ_j c_j φ_j` on a mesh.
#[derive(Debug, Clone)]
pub struct Density {
    mesh: Arc<ScreenMesh>,
    basis: Basis,
    weights: Vec<PanelWeights>,
    coefficients: Vec<Complex64>,
}

impl Density {
    pub fn new(mesh: Arc<ScreenMesh>, basis: Basis, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != mesh.len() {
            return Err(Error::param(
                "coefficients",
                format!("expected {} values, got {}", mesh.len(), coefficients.len()),
            ));
        }
        if coefficients
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::Numerical("non-finite density coefficient".into()));
        }
        let weights = basis_weights(&mesh, basis);
        Ok(Density {
            mesh,
            basis,
            weights,
            coefficients,
        })
    }

    pub fn zeros(mesh: Arc<ScreenMesh>, basis: Basis) -> Self {
        let n = mesh.len();
        Self::new(mesh, basis, vec![Complex64::new(0.0, 0.0); n]).expect("matching length")
    }

    pub fn mesh(&self) -> &ScreenMesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<ScreenMesh> {
        &self.mesh
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Vertex weights of panel `j`'s basis function.
    pub fn weights(&self) -> &[PanelWeights] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `∫ φ_j` for each basis function.
    pub fn basis_integrals(&self) -> Vec<f64> {
        self.mesh
            .panels()
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| p.area * (w[0] + w[1] + w[2]) / 3.0)
            .collect()
    }

    /// Total mass `∫ ρ_h`.
    pub fn mass(&self) -> Complex64 {
        self.basis_integrals()
            .iter()
            .zip(&self.coefficients)
            .map(|(a, c)| c * *a)
            .sum()
    }

    /// `ρ_h` at the centroid of panel `j`.
    pub fn centroid_value(&self, j: usize) -> Complex64 {
        let w = &self.weights[j];
        self.coefficients[j] * ((w[0] + w[1] + w[2]) / 3.0)
    }

    /// `ρ_h(p)`, zero outside the mesh.
    pub fn value_at(&self, p: &Point2<f64>) -> Complex64 {
        let Some(j) = self.mesh.locate(p) else {
            return Complex64::new(0.0, 0.0);
        };
        let [a, b, c] = self.mesh.panels()[j].vertices;
        let area2 = (b - a).perp(&(c - a));
        let l1 = (p - a).perp(&(c - a)) / area2;
        let l2 = (b - a).perp(&(p - a)) / area2;
        let w = &self.weights[j];
        self.coefficients[j] * (w[0] * (1.0 - l1 - l2) + w[1] * l1 + w[2] * l2)
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coefficient_norm(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Density {
            coefficients: self.coefficients.iter().map(|c| c * alpha).collect(),
            ..self.clone()
        }
    }

    /// CSV with columns `triangle,c1,c2,re,im` (centroid and coefficient).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("triangle,c1,c2,re,im\n");
        for (j, (p, c)) in self
            .mesh
            .panels()
            .iter()
            .zip(&self.coefficients)
            .enumerate()
        {
            let _ = writeln!(
                out,
                "{j},{:.17e},{:.17e},{:.17e},{:.17e}",
                p.centroid.x, p.centroid.y, c.re, c.im
            );
        }
        out
    }

    /// Read coefficients written by [`Density::to_csv`] for the same mesh.
    pub fn from_csv(mesh: Arc<ScreenMesh>, basis: Basis, text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "triangle,c1,c2,re,im" => {}
            _ => {
                return Err(Error::param(
                    "density",
                    "missing header `triangle,c1,c2,re,im`",
                ))
            }
        }
        let mut coefficients = vec![Complex64::new(0.0, 0.0); mesh.len()];
        let mut seen = vec![false; mesh.len()];
        for (row, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::param("density", format!("row {}: bad number `{s}`", row + 1))
                })
            };
            if fields.len() != 5 {
                return Err(Error::param(
                    "density",
                    format!("row {}: expected 5 fields", row + 1),
                ));
            }
            let j: usize = fields[0]
                .parse()
                .map_err(|_| Error::param("density", format!("row {}: bad index", row + 1)))?;
            if j >= mesh.len() || seen[j] {
                return Err(Error::param(
                    "density",
                    format!("row {}: triangle {j} invalid", row + 1),
                ));
            }
            let centroid = mesh.panels()[j].centroid;
            let (c1, c2) = (parse(fields[1])?, parse(fields[2])?);
            let tol = 1e-9 * mesh.shape().scale();
            if (c1 - centroid.x).abs() > tol || (c2 - centroid.y).abs() > tol {
                return Err(Error::param(
                    "density",
                    format!("row {}: centroid does not match the mesh", row + 1),
                ));
            }
            coefficients[j] = Complex64::new(parse(fields[3])?, parse(fields[4])?);
            seen[j] = true;
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Err(Error::param("density", format!("triangle {j} missing")));
        }
        Density::new(mesh, basis, coefficients)
    }
}
