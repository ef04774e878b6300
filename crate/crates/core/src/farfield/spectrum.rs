//! Disk spectrum `ρ̂(ξ′)`, `|ξ′| ≤ k`, of a density.
//!
//! Convention: `ρ̂(ξ′) = (1/2π) ∫ ρ(y′) e^{−iξ′·y′} dy′`, so that
//! `u^∞(x̂) = ½ ρ̂(k x̂′)` and, on the upper hemisphere,
//! `ρ̂(ξ′) = 2 u^∞(ξ₁/k, ξ₂/k, √(k² − ξ₁² − ξ₂²)/k)`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{Vector2, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{Direction, DirectionGrid, FarField};
use crate::direct::Density;
use crate::error::{Error, Result};

/// `i`-th of `n` equispaced values on `[−k, k]`, exactly odd about the middle.
pub fn lattice_axis(k: f64, n: usize, i: usize) -> f64 {
    let m = (n - 1) as f64;
    k * (2.0 * i as f64 - m) / m
}

/// Cartesian lattice on `[−k, k]²` restricted to the closed disk `|ξ′| ≤ k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskLattice {
    k: f64,
    n: usize,
    spacing: f64,
    indices: Vec<(usize, usize)>,
    points: Vec<Vector2<f64>>,
}

impl DiskLattice {
    pub fn new(k: f64, n: usize) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::param(
                "wavenumber",
                format!("must be positive, got {k}"),
            ));
        }
        if !(2..=4096).contains(&n) {
            return Err(Error::param(
                "lattice_n",
                format!("must be in 2..=4096, got {n}"),
            ));
        }
        let m = (n - 1) as i64;
        let spacing = 2.0 * k / m as f64;
        let mut indices = Vec::new();
        let mut points = Vec::new();
        // Disk membership on the integer lattice `2i − m`, so that the point
        // set is exactly symmetric.
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (2 * i as i64 - m, 2 * j as i64 - m);
                if a * a + b * b <= m * m {
                    indices.push((i, j));
                    points.push(Vector2::new(lattice_axis(k, n, i), lattice_axis(k, n, j)));
                }
            }
        }
        Ok(DiskLattice {
            k,
            n,
            spacing,
            indices,
            points,
        })
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Points per axis of the enclosing square lattice.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `Δξ`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Square-lattice index `(i, j)` of each point.
    pub fn indices(&self) -> &[(usize, usize)] {
        &self.indices
    }

    pub fn points(&self) -> &[Vector2<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Upper-hemisphere direction `(ξ′/k, √(k² − |ξ′|²)/k)` of each point.
    pub fn directions(&self) -> Vec<Vector3<f64>> {
        self.points
            .iter()
            .map(|xi| {
                let t = xi / self.k;
                Vector3::new(t.x, t.y, (1.0 - t.norm_squared()).max(0.0).sqrt())
            })
            .collect()
    }

    /// The lattice directions as a far-field grid, for exact alignment.
    pub fn direction_grid(&self) -> DirectionGrid {
        DirectionGrid::List {
            directions: self.directions().iter().map(|d| [d.x, d.y, d.z]).collect(),
        }
    }
}

/// Samples of `ρ̂` on a disk lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskSpectrum {
    lattice: DiskLattice,
    values: Vec<Complex64>,
}

impl DiskSpectrum {
    pub fn new(lattice: DiskLattice, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::param(
                "spectrum",
                format!(
                    "{} values for {} lattice points",
                    values.len(),
                    lattice.len()
                ),
            ));
        }
        Ok(DiskSpectrum { lattice, values })
    }

    pub fn lattice(&self) -> &DiskLattice {
        &self.lattice
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn k(&self) -> f64 {
        self.lattice.k
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Complex64::new(0.0, 0.0))
    }

    /// `Σ |ρ̂|² Δξ²`.
    pub fn l2_mass(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.lattice.spacing.powi(2)
    }

    /// Largest `|ρ̂(−ξ′) − conj ρ̂(ξ′)|` relative to `max |ρ̂|`, over lattice
    /// points whose mirror image is also on the lattice.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let n = self.lattice.n;
        let mut lookup = vec![usize::MAX; n * n];
        for (p, (i, j)) in self.lattice.indices.iter().enumerate() {
            lookup[i * n + j] = p;
        }
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut defect = 0.0f64;
        for (p, (i, j)) in self.lattice.indices.iter().enumerate() {
            let q = lookup[(n - 1 - i) * n + (n - 1 - j)];
            if q != usize::MAX {
                defect = defect.max((self.values[q] - self.values[p].conj()).norm());
            }
        }
        defect / scale
    }

    /// Relative discrete L² distance to another spectrum on the same lattice.
    pub fn relative_distance(&self, other: &DiskSpectrum) -> Result<f64> {
        if self.lattice != other.lattice {
            return Err(Error::param("spectrum", "lattices differ"));
        }
        let diff: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let scale: f64 = other.values.iter().map(|v| v.norm_sqr()).sum();
        Ok(if scale == 0.0 {
            diff.sqrt()
        } else {
            (diff / scale).sqrt()
        })
    }

    /// CSV with columns `xi1,xi2,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("xi1,xi2,re,im\n");
        for (xi, v) in self.lattice.points.iter().zip(&self.values) {
            let _ = writeln!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e}",
                xi.x, xi.y, v.re, v.im
            );
        }
        out
    }
}

/// Value of a product-grid ring at azimuth `phi`, linear in `φ`.
fn ring_value(values: &[Complex64], ring: usize, n_phi: usize, phi: f64) -> Complex64 {
    let f = phi.rem_euclid(2.0 * PI) / (2.0 * PI) * n_phi as f64;
    let j0 = (f.floor() as usize) % n_phi;
    let t = f - f.floor();
    let base = ring * n_phi;
    if t == 0.0 {
        return values[base + j0];
    }
    values[base + j0] * (1.0 - t) + values[base + (j0 + 1) % n_phi] * t
}

/// Far-field value in direction `d`, bilinear in `(θ, φ)` on product grids
/// and by exact lookup on direction lists.
pub fn interpolate_farfield(ff: &FarField, d: &Direction) -> Result<Complex64> {
    let grid = ff.grid();
    let values = ff.values();
    let n_phi = match grid {
        DirectionGrid::List { .. } => {
            return ff
                .directions()
                .iter()
                .position(|s| (s.unit - d.unit).norm() <= 1e-12)
                .map(|i| values[i])
                .ok_or_else(|| {
                    Error::Domain("direction not sampled by the far-field list".into())
                });
        }
        DirectionGrid::Hemisphere { n_phi, .. } | DirectionGrid::Sphere { n_phi, .. } => *n_phi,
    };
    let thetas = grid.thetas();
    let last = thetas.len() - 1;
    let (theta, phi) = (d.theta, d.phi);
    if theta < thetas[0] {
        // Across the pole the neighbouring ring is the first one at φ + π.
        let s = (theta + thetas[0]) / (2.0 * thetas[0]);
        return Ok(ring_value(values, 0, n_phi, phi + PI) * (1.0 - s)
            + ring_value(values, 0, n_phi, phi) * s);
    }
    if theta > thetas[last] {
        return Ok(match grid {
            // Far-fields of flat screens are even in x̂₃, so the mirror ring
            // at π − θ carries the same values: constant up to the equator.
            DirectionGrid::Hemisphere { .. } => ring_value(values, last, n_phi, phi),
            _ => {
                let span = 2.0 * (PI - thetas[last]);
                let s = (theta - thetas[last]) / span;
                ring_value(values, last, n_phi, phi) * (1.0 - s)
                    + ring_value(values, last, n_phi, phi + PI) * s
            }
        });
    }
    let r = thetas
        .partition_point(|t| *t <= theta)
        .saturating_sub(1)
        .min(last);
    if thetas[r] == theta || r == last {
        return Ok(ring_value(values, r, n_phi, phi));
    }
    let s = (theta - thetas[r]) / (thetas[r + 1] - thetas[r]);
    Ok(ring_value(values, r, n_phi, phi) * (1.0 - s) + ring_value(values, r + 1, n_phi, phi) * s)
}

/// `ρ̂(ξ′) = 2 u^∞(x̂(ξ′))` on the disk lattice with `lattice_n` points per
/// axis.
pub fn spectrum_from_farfield(ff: &FarField, lattice_n: usize) -> Result<DiskSpectrum> {
    let lattice = DiskLattice::new(ff.k(), lattice_n)?;
    let values = lattice
        .directions()
        .par_iter()
        .map(|u| interpolate_farfield(ff, &Direction::from_unit(*u)).map(|v| v * 2.0))
        .collect::<Result<Vec<_>>>()?;
    DiskSpectrum::new(lattice, values)
}

/// Divided difference `exp[z₀, …, z_n]`, stable for clustered and repeated
/// nodes. By Hermite–Genocchi it equals the integral of `exp(Σ t_j z_j)` over
/// the standard simplex.
pub fn exp_divided_difference(z: &[Complex64]) -> Complex64 {
    assert!(!z.is_empty(), "divided difference needs at least one node");
    let n = z.len() - 1;
    if n == 0 {
        return z[0].exp();
    }
    let c = z.iter().sum::<Complex64>() / z.len() as f64;
    let spread = z.iter().map(|v| (v - c).norm()).fold(0.0, f64::max);
    if spread < 1.0 {
        // exp[w] = Σ_m h_m(w) / (m + n)!, with h_m the complete homogeneous
        // symmetric polynomials of the centered nodes.
        const TERMS: usize = 28;
        let w0 = z[0] - c;
        let mut h = [Complex64::new(0.0, 0.0); TERMS];
        h[0] = Complex64::new(1.0, 0.0);
        for m in 1..TERMS {
            h[m] = h[m - 1] * w0;
        }
        for zj in &z[1..] {
            let wj = zj - c;
            for m in 1..TERMS {
                h[m] += wj * h[m - 1];
            }
        }
        let mut fact: f64 = (1..=n).map(|v| v as f64).product();
        let mut sum = Complex64::new(0.0, 0.0);
        for (m, hm) in h.iter().enumerate() {
            if m > 0 {
                fact *= (m + n) as f64;
            }
            sum += hm / fact;
        }
        return sum * c.exp();
    }
    // Split off the farthest pair so the division is well conditioned.
    let (mut a, mut b, mut best) = (0, 1, -1.0);
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            let d = (z[i] - z[j]).norm();
            if d > best {
                (a, b, best) = (i, j, d);
            }
        }
    }
    let without = |skip: usize| -> Vec<Complex64> {
        z.iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, v)| *v)
            .collect()
    };
    (exp_divided_difference(&without(a)) - exp_divided_difference(&without(b))) / (z[b] - z[a])
}

/// `∫_T ℓ(y′) e^{−iξ′·y′} dy′` in closed form, `ℓ` linear with vertex values
/// `w`.
pub fn triangle_fourier(
    vertices: &[nalgebra::Point2<f64>; 3],
    w: &[f64; 3],
    xi: &Vector2<f64>,
) -> Complex64 {
    let [a, b, c] = *vertices;
    let area2 = ((b - a).perp(&(c - a))).abs();
    let z = vertices.map(|v| Complex64::new(0.0, -xi.dot(&v.coords)));
    if w[0] == w[1] && w[1] == w[2] {
        return exp_divided_difference(&z) * (area2 * w[0]);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        if w[i] != 0.0 {
            sum += exp_divided_difference(&[z[0], z[1], z[2], z[i]]) * w[i];
        }
    }
    sum * area2
}

/// `ρ̂_h(ξ′)` at arbitrary points, by exact panel-wise Fourier integrals.
pub fn density_spectrum_direct(density: &Density, points: &[Vector2<f64>]) -> Vec<Complex64> {
    let panels = density.mesh().panels();
    points
        .par_iter()
        .map(|xi| {
            let mut sum = Complex64::new(0.0, 0.0);
            for ((p, w), c) in panels
                .iter()
                .zip(density.weights())
                .zip(density.coefficients())
            {
                if *c != Complex64::new(0.0, 0.0) {
                    sum += c * triangle_fourier(&p.vertices, w, xi);
                }
            }
            sum / (2.0 * PI)
        })
        .collect()
}

/// The exact disk spectrum of a density on a lattice.
pub fn density_spectrum(density: &Density, k: f64, lattice_n: usize) -> Result<DiskSpectrum> {
    let lattice = DiskLattice::new(k, lattice_n)?;
    let values = density_spectrum_direct(density, lattice.points());
    DiskSpectrum::new(lattice, values)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::direct::Basis;
    use crate::farfield::farfield_of_density;
    use crate::geometry::{make_shape, mesh_shape, ShapeDescriptor};
    use crate::kernel::{QuadratureRule, WaveNumber};
    use nalgebra::Point2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn divided_difference_matches_explicit_formula() {
        // Well separated nodes: Σ e^{z_i} / Π_{j≠i} (z_i − z_j).
        let z = [c(0.0, 3.0), c(1.0, -2.0), c(-2.5, 0.5), c(0.3, 5.0)];
        for n in 1..=4 {
            let nodes = &z[..n];
            let explicit: Complex64 = (0..n)
                .map(|i| {
                    let denom: Complex64 = (0..n)
                        .filter(|&j| j != i)
                        .map(|j| nodes[i] - nodes[j])
                        .product();
                    nodes[i].exp() / denom
                })
                .sum();
            let dd = exp_divided_difference(nodes);
            assert!(
                (dd - explicit).norm() < 1e-13 * explicit.norm().max(1.0),
                "n={n}"
            );
        }
    }

    #[test]
    fn divided_difference_of_coincident_nodes() {
        // exp[z, z, z] = e^z / 2 and exp[z, z, z, z] = e^z / 6.
        let z = c(0.7, 4.0);
        assert!((exp_divided_difference(&[z; 3]) - z.exp() / 2.0).norm() < 1e-15 * z.exp().norm());
        assert!((exp_divided_difference(&[z; 4]) - z.exp() / 6.0).norm() < 1e-15 * z.exp().norm());
        // Nearly coincident pair among separated nodes.
        let nodes = [c(0.0, 0.0), c(0.0, 3.0), c(1e-9, 3.0)];
        let limit = {
            // exp[0, a, a] = (e^a (a − 1) + 1) / a².
            let a = c(0.0, 3.0);
            (a.exp() * (a - 1.0) + 1.0) / (a * a)
        };
        assert!((exp_divided_difference(&nodes) - limit).norm() < 1e-8);
    }

    #[test]
    fn triangle_fourier_matches_fine_quadrature() {
        let v = [
            Point2::new(0.1, -0.2),
            Point2::new(0.5, 0.05),
            Point2::new(0.2, 0.4),
        ];
        let rule = QuadratureRule::collapsed(24);
        for (w, xi) in [
            ([1.0, 1.0, 1.0], Vector2::new(3.0, -7.0)),
            ([0.5, 2.0, 1.2], Vector2::new(-12.0, 4.0)),
            ([1.0, 0.0, 3.0], Vector2::new(1e-4, 0.0)),
        ] {
            let area: f64 = 0.5 * ((v[1] - v[0]).perp(&(v[2] - v[0])));
            let area = area.abs();
            let quad: Complex64 = rule
                .iter()
                .map(|(l, q)| {
                    let y = v[0].coords * l[0] + v[1].coords * l[1] + v[2].coords * l[2];
                    let ell = w[0] * l[0] + w[1] * l[1] + w[2] * l[2];
                    Complex64::cis(-xi.dot(&y)) * (q * area * ell)
                })
                .sum();
            let exact = triangle_fourier(&v, &w, &xi);
            assert!(
                (exact - quad).norm() < 1e-13 * quad.norm(),
                "{exact} vs {quad}"
            );
        }
    }

    #[test]
    fn lattice_stays_in_the_disk() {
        let l = DiskLattice::new(8.0, 33).unwrap();
        assert!(l.points().iter().all(|p| p.norm() <= 8.0));
        assert!(l.points().iter().any(|p| p.norm() == 0.0));
        assert!(DiskLattice::new(8.0, 1).is_err());
    }

    fn density(real: bool) -> Density {
        let shape = make_shape(&ShapeDescriptor::Star {
            base: 1.0,
            amplitude: 0.15,
            lobes: 5,
        })
        .unwrap();
        let mesh = Arc::new(mesh_shape(&shape, 0.2, 0.0).unwrap());
        let coeff = (0..mesh.len())
            .map(|j| {
                c(
                    1.0 + 0.5 * (j as f64).cos(),
                    if real { 0.0 } else { 0.4 * (j as f64).sin() },
                )
            })
            .collect();
        Density::new(mesh, Basis::P0, coeff).unwrap()
    }

    #[test]
    fn farfield_route_matches_direct_spectrum_on_aligned_grid() {
        let d = density(false);
        let k = 6.0;
        let lattice = DiskLattice::new(k, 17).unwrap();
        let ff = farfield_of_density(&d, WaveNumber::new(k).unwrap(), &lattice.direction_grid())
            .unwrap();
        let from_ff = spectrum_from_farfield(&ff, 17).unwrap();
        let direct = density_spectrum(&d, k, 17).unwrap();
        assert!(from_ff.relative_distance(&direct).unwrap() < 1e-8);
        // Zero frequency is the scaled mass.
        let centre = direct
            .lattice()
            .points()
            .iter()
            .position(|p| p.norm() == 0.0)
            .unwrap();
        assert!((direct.values()[centre] - d.mass() / (2.0 * PI)).norm() < 1e-12 * d.mass().norm());
    }

    #[test]
    fn conjugate_symmetry_detects_complex_densities() {
        let real = density_spectrum(&density(true), 5.0, 21).unwrap();
        assert!(real.conjugate_symmetry_defect() < 1e-12);
        let complex = density_spectrum(&density(false), 5.0, 21).unwrap();
        assert!(complex.conjugate_symmetry_defect() > 1e-3);
    }

    #[test]
    fn interpolation_converges_under_grid_refinement() {
        let d = density(false);
        let k = 4.0;
        let direct = density_spectrum(&d, k, 15).unwrap();
        let mut last = f64::INFINITY;
        for (nt, np) in [(8, 16), (16, 32), (32, 64)] {
            let ff = farfield_of_density(
                &d,
                WaveNumber::new(k).unwrap(),
                &DirectionGrid::hemisphere(nt, np),
            )
            .unwrap();
            let err = spectrum_from_farfield(&ff, 15)
                .unwrap()
                .relative_distance(&direct)
                .unwrap();
            assert!(err < last, "{err} !< {last}");
            last = err;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn zero_farfield_gives_zero_spectrum() {
        let ff = FarField::zeros(3.0, DirectionGrid::hemisphere(8, 16)).unwrap();
        assert!(spectrum_from_farfield(&ff, 9).unwrap().is_zero());
    }
}
