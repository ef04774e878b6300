//! Band-limited inversion of a disk spectrum.

use std::f64::consts::PI;

use nalgebra::Point2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::farfield::{lattice_axis, DiskSpectrum};
use crate::geometry::ScreenShape;

/// Axis-aligned reconstruction window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Window {
    pub fn new(min: [f64; 2], max: [f64; 2]) -> Result<Self> {
        let w = Window { min, max };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = (0..2).all(|i| {
            self.min[i].is_finite() && self.max[i].is_finite() && self.max[i] > self.min[i]
        });
        if ok {
            Ok(())
        } else {
            Err(Error::param("window", "needs finite bounds with max > min"))
        }
    }

    /// `factor` times the bounding box of `shapes`, about its centre.
    pub fn around(shapes: &[&ScreenShape], factor: f64) -> Result<Self> {
        let Some(first) = shapes.first() else {
            return Err(Error::Empty("no shapes for the window".into()));
        };
        let (mut lo, mut hi) = first.bounding_box();
        for s in &shapes[1..] {
            let (a, b) = s.bounding_box();
            lo = Point2::new(lo.x.min(a.x), lo.y.min(a.y));
            hi = Point2::new(hi.x.max(b.x), hi.y.max(b.y));
        }
        let c = nalgebra::center(&lo, &hi);
        let half = (hi - lo) * (0.5 * factor);
        Window::new([c.x - half.x, c.y - half.y], [c.x + half.x, c.y + half.y])
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn centre(&self) -> Point2<f64> {
        Point2::new(
            0.5 * (self.min[0] + self.max[0]),
            0.5 * (self.min[1] + self.max[1]),
        )
    }
}

/// `ρ_rec` sampled on a square lattice; `values[a · ny + b]` is the value at
/// `(x[a], y[b])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl Reconstruction {
    /// Cell size `Δx₁ · Δx₂`.
    pub fn cell_area(&self) -> f64 {
        (self.x[1] - self.x[0]) * (self.y[1] - self.y[0])
    }

    pub fn amplitude(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// `Σ |ρ_rec|² Δx²` over the window.
    pub fn l2_mass(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_area()
    }

    /// Lattice point of largest amplitude.
    pub fn peak(&self) -> Point2<f64> {
        let (i, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, v)| {
                if v.norm() > acc.1 {
                    (i, v.norm())
                } else {
                    acc
                }
            });
        let ny = self.y.len();
        Point2::new(self.x[i / ny], self.y[i % ny])
    }
}

/// Axis of `count` points with spacing `P/M`, `P = 2π/Δξ` the period of the
/// lattice sum and `M ≥ min_m` an integer, centred on `centre`.
fn periodic_axis(centre: f64, width: f64, count: usize, period: f64, min_m: usize) -> Vec<f64> {
    let desired = width / (count - 1) as f64;
    let m = ((period / desired).ceil() as usize).max(min_m);
    let dx = period / m as f64;
    let start = centre - 0.5 * dx * (count - 1) as f64;
    (0..count).map(|a| start + a as f64 * dx).collect()
}

/// `ρ_rec(x′) = (1/2π) Σ_ξ ρ̂(ξ′) e^{iξ′·x′} Δξ²` on a `lattice_n × lattice_n`
/// lattice over `window`.
///
/// The lattice spacing is adjusted down to `P/M` (`P` the period of the sum,
/// `M` an integer), so the window samples are a subset of one period and
/// the discrete window mass never exceeds the spectrum's mass.
pub fn reconstruct_density(
    spectrum: &DiskSpectrum,
    window: &Window,
    lattice_n: usize,
) -> Result<Reconstruction> {
    window.validate()?;
    let lattice = spectrum.lattice();
    if lattice.is_empty() || spectrum.values().is_empty() {
        return Err(Error::Empty("spectrum has no samples".into()));
    }
    if !(2..=4096).contains(&lattice_n) {
        return Err(Error::param(
            "lattice_n",
            format!("must be in 2..=4096, got {lattice_n}"),
        ));
    }
    let n = lattice.n();
    let dxi = lattice.spacing();
    let period = 2.0 * PI / dxi;
    if window.width() > period || window.height() > period {
        return Err(Error::param(
            "window",
            format!("larger than the alias period {period:.4} of the spectrum lattice"),
        ));
    }
    let c = window.centre();
    let min_m = lattice_n.max(n);
    let x = periodic_axis(c.x, window.width(), lattice_n, period, min_m);
    let y = periodic_axis(c.y, window.height(), lattice_n, period, min_m);
    // Dense n × n spectrum with zeros outside the disk.
    let mut s = vec![Complex64::new(0.0, 0.0); n * n];
    for ((i, j), v) in lattice.indices().iter().zip(spectrum.values()) {
        s[i * n + j] = *v;
    }
    let axis: Vec<f64> = (0..n).map(|i| lattice_axis(lattice.k(), n, i)).collect();
    // R = E_x · S · E_yᵀ with E[a, i] = e^{i ξ_i x_a}.
    let ey: Vec<Complex64> = y
        .iter()
        .flat_map(|yb| axis.iter().map(move |xi| Complex64::cis(xi * yb)))
        .collect();
    let scale = dxi * dxi / (2.0 * PI);
    let rows: Vec<Vec<Complex64>> = x
        .par_iter()
        .map(|xa| {
            let ex: Vec<Complex64> = axis.iter().map(|xi| Complex64::cis(xi * xa)).collect();
            // t_j = Σ_i e^{iξ_i x_a} S_ij
            let mut t = vec![Complex64::new(0.0, 0.0); n];
            for (i, e) in ex.iter().enumerate() {
                for (tj, sij) in t.iter_mut().zip(&s[i * n..(i + 1) * n]) {
                    *tj += e * sij;
                }
            }
            (0..y.len())
                .map(|b| {
                    let row = &ey[b * n..(b + 1) * n];
                    row.iter().zip(&t).map(|(e, tj)| e * tj).sum::<Complex64>() * scale
                })
                .collect()
        })
        .collect();
    Ok(Reconstruction {
        x,
        y,
        values: rows.into_iter().flatten().collect(),
    })
}
