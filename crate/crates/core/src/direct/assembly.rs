//! Galerkin discretization of the single-layer equation `S ρ = −u_i`.
//!
//! Entries are `⟨S φ_j, φ_i⟩ = ∫_{T_i} ℓ_i(x) ∫_{T_j} Φ(x, y) ℓ_j(y) dy dx`.
//! Near pairs use an outer rule on `T_i` with the singular panel integral
//! inside; well-separated pairs use a product rule whose degree follows the
//! kernel's variation across the two panels. Only `i ≤ j` is computed and
//! the result mirrored, so the matrix is exactly symmetric.

use std::sync::Arc;

use faer::Mat;
use nalgebra::Point2;
use num_complex::Complex64;
use rayon::prelude::*;

use super::density::{basis_weights, Basis};
use super::incident::IncidentWave;
use crate::error::{Error, Result};
use crate::geometry::{Panel, ScreenMesh};
use crate::kernel::singular::{oscillatory_degree, panel_integral, PanelWeights};
use crate::kernel::{phi_of_distance, QuadratureRule, WaveNumber};

/// Target relative error of a far-pair product rule.
const FAR_PAIR_TOLERANCE: f64 = 1e-5;

/// A centroid is within this many diameters of every point of its panel.
const CENTROID_REACH: f64 = 0.6;

/// Pairs closer than this many diameters (of the larger panel) take the
/// near path.
const NEAR_PAIR_RATIO: f64 = 0.25;

/// Dense Galerkin system for one mesh, wave number and incident wave.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    k: WaveNumber,
    basis: Basis,
    mesh: Arc<ScreenMesh>,
    matrix: Mat<Complex64>,
    rhs: Vec<Complex64>,
}

impl LinearSystem {
    pub fn k(&self) -> WaveNumber {
        self.k
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn mesh(&self) -> &Arc<ScreenMesh> {
        &self.mesh
    }

    pub fn matrix(&self) -> &Mat<Complex64> {
        &self.matrix
    }

    pub fn rhs(&self) -> &[Complex64] {
        &self.rhs
    }

    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    /// Same matrix with another right-hand side.
    pub fn with_rhs(&self, rhs: Vec<Complex64>) -> Result<Self> {
        if rhs.len() != self.len() {
            return Err(Error::param("rhs", "length does not match the system"));
        }
        Ok(LinearSystem {
            rhs,
            ..self.clone()
        })
    }

    /// `max |S_ij − S_ji| / max |S_ij|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.len();
        let mut defect = 0.0f64;
        let mut scale = 0.0f64;
        for j in 0..n {
            for i in 0..n {
                scale = scale.max(self.matrix[(i, j)].norm());
                defect = defect.max((self.matrix[(i, j)] - self.matrix[(j, i)]).norm());
            }
        }
        if scale == 0.0 {
            0.0
        } else {
            defect / scale
        }
    }
}

/// Quadrature points of one panel for each far-pair tier, with the basis
/// weight and panel area folded into the weights.
struct PanelNodes {
    tiers: Vec<Vec<(Point2<f64>, f64)>>,
}

struct FarRules {
    rules: Vec<QuadratureRule>,
}

impl FarRules {
    fn new() -> Self {
        FarRules {
            rules: [1, 2, 4, 6, 8, 10, 14, 20]
                .map(QuadratureRule::with_degree)
                .to_vec(),
        }
    }

    fn nodes(&self, panel: &Panel, w: &PanelWeights) -> PanelNodes {
        let tiers = self
            .rules
            .iter()
            .map(|rule| {
                rule.iter()
                    .map(|(l, q)| {
                        let ell = w[0] * l[0] + w[1] * l[1] + w[2] * l[2];
                        (panel.at(l), q * panel.area * ell)
                    })
                    .collect()
            })
            .collect();
        PanelNodes { tiers }
    }

    /// Cheapest tier whose Taylor-remainder estimate `s^{p+1}/(p+1)!` meets
    /// half the tolerance, with `s` the kernel variation across one panel.
    fn tier(&self, s: f64) -> usize {
        for (t, rule) in self.rules.iter().enumerate() {
            let p = rule.degree() as i32;
            let fact: f64 = (1..=p + 1).map(f64::from).product();
            if s.powi(p + 1) / fact < 0.5 * FAR_PAIR_TOLERANCE {
                return t;
            }
        }
        self.rules.len() - 1
    }
}

/// Lower bound on the distance between two panels.
fn panel_gap(a: &Panel, b: &Panel) -> f64 {
    (a.centroid - b.centroid).norm() - CENTROID_REACH * (a.diameter + b.diameter)
}

fn is_near(a: &Panel, b: &Panel) -> bool {
    panel_gap(a, b) < NEAR_PAIR_RATIO * a.diameter.max(b.diameter)
}

/// Outer rule on `T_i`, singular-capable inner integral on `T_j`.
fn near_entry(
    k: WaveNumber,
    pi: &Panel,
    wi: &PanelWeights,
    pj: &Panel,
    wj: &PanelWeights,
) -> Result<Complex64> {
    let outer = QuadratureRule::twelve_point();
    let mut sum = Complex64::new(0.0, 0.0);
    for (l, q) in outer.iter() {
        let x = pi.at(l);
        let ell = wi[0] * l[0] + wi[1] * l[1] + wi[2] * l[2];
        sum += panel_integral(k, &pj.vertices, wj, &x, 0.0)? * (q * ell);
    }
    Ok(sum * pi.area)
}

fn far_entry(k: f64, a: &[(Point2<f64>, f64)], b: &[(Point2<f64>, f64)]) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for (x, wx) in a {
        let mut inner = Complex64::new(0.0, 0.0);
        for (y, wy) in b {
            inner += phi_of_distance(k, (x - y).norm()) * *wy;
        }
        sum += inner * *wx;
    }
    sum
}

fn pair_entry(
    k: WaveNumber,
    rules: &FarRules,
    pi: &Panel,
    wi: &PanelWeights,
    pj: &Panel,
    wj: &PanelWeights,
) -> Result<Complex64> {
    if is_near(pi, pj) {
        return near_entry(k, pi, wi, pj, wj);
    }
    let (ti, tj) = far_tiers(k.value(), rules, pi, pj);
    Ok(far_entry(
        k.value(),
        &rules.nodes(pi, wi).tiers[ti],
        &rules.nodes(pj, wj).tiers[tj],
    ))
}

/// A single Galerkin entry `⟨S φ_j, φ_i⟩`.
pub fn galerkin_entry(
    k: WaveNumber,
    mesh: &ScreenMesh,
    basis: Basis,
    i: usize,
    j: usize,
) -> Result<Complex64> {
    let weights = basis_weights(mesh, basis);
    let (i, j) = (i.min(j), i.max(j));
    let panels = mesh.panels();
    pair_entry(
        k,
        &FarRules::new(),
        &panels[i],
        &weights[i],
        &panels[j],
        &weights[j],
    )
}

/// Rule tiers for the two panels of a far pair. The variation across a
/// panel of reach `ρ = CENTROID_REACH · diameter` is measured by
/// `s = ρ (k/2 + 1/(gap + ρ))`; the weights were checked against
/// high-order reference products (see the tests).
fn far_tiers(k: f64, rules: &FarRules, a: &Panel, b: &Panel) -> (usize, usize) {
    let gap = panel_gap(a, b).max(0.0);
    let side = |p: &Panel| {
        let reach = CENTROID_REACH * p.diameter;
        rules.tier(reach * (0.5 * k + 1.0 / (gap + reach)))
    };
    (side(a), side(b))
}

/// The dense Galerkin matrix.
pub fn assemble_matrix(k: WaveNumber, mesh: &ScreenMesh, basis: Basis) -> Result<Mat<Complex64>> {
    let n = mesh.len();
    let panels = mesh.panels();
    let weights = basis_weights(mesh, basis);
    let rules = FarRules::new();
    let nodes: Vec<PanelNodes> = panels
        .par_iter()
        .zip(&weights)
        .map(|(p, w)| rules.nodes(p, w))
        .collect();
    let kv = k.value();
    let upper: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| {
                    let (pi, pj) = (&panels[i], &panels[j]);
                    // Same dispatch as `pair_entry`, with cached far nodes.
                    if is_near(pi, pj) {
                        near_entry(k, pi, &weights[i], pj, &weights[j])
                    } else {
                        let (ti, tj) = far_tiers(kv, &rules, pi, pj);
                        Ok(far_entry(kv, &nodes[i].tiers[ti], &nodes[j].tiers[tj]))
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let matrix = Mat::from_fn(n, n, |i, j| {
        if i <= j {
            upper[i][j - i]
        } else {
            upper[j][i - j]
        }
    });
    if matrix
        .col_iter()
        .flat_map(|c| c.iter())
        .any(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::Numerical("non-finite Galerkin entry".into()));
    }
    Ok(matrix)
}

/// Right-hand side `−⟨u_i, φ_i⟩`.
pub fn assemble_rhs(
    k: WaveNumber,
    mesh: &ScreenMesh,
    incident: &IncidentWave,
    basis: Basis,
) -> Vec<Complex64> {
    let kv = k.value();
    let weights = basis_weights(mesh, basis);
    mesh.panels()
        .par_iter()
        .zip(&weights)
        .map(|(p, w)| {
            let rule = QuadratureRule::with_degree(oscillatory_degree(kv, p.diameter));
            let mut sum = Complex64::new(0.0, 0.0);
            for (l, q) in rule.iter() {
                let ell = w[0] * l[0] + w[1] * l[1] + w[2] * l[2];
                sum += incident.on_plane(kv, &p.at(l)) * (q * ell);
            }
            -sum * p.area
        })
        .collect()
}

/// Galerkin system for `S ρ = −u_i` on `mesh`.
///
/// `k` may be the static validation mode; scattering callers should pass a
/// positive wave number.
pub fn assemble(
    k: WaveNumber,
    mesh: Arc<ScreenMesh>,
    incident: &IncidentWave,
    basis: Basis,
) -> Result<LinearSystem> {
    if mesh.is_empty() {
        return Err(Error::Empty("mesh has no panels".into()));
    }
    incident.validate(Some(mesh.shape()))?;
    let matrix = assemble_matrix(k, &mesh, basis)?;
    let rhs = assemble_rhs(k, &mesh, incident, basis);
    Ok(LinearSystem {
        k,
        basis,
        mesh,
        matrix,
        rhs,
    })
}
