//! Quadrature on the reference triangle and on `[0, 1]`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Symmetric rule on a triangle, in barycentric coordinates, with weights
/// normalized to sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<[f64; 3]>,
    weights: Vec<f64>,
    degree: u32,
}

fn orbit3(a: f64, b: f64) -> [[f64; 3]; 3] {
    [[a, b, b], [b, a, b], [b, b, a]]
}

fn orbit6(a: f64, b: f64, c: f64) -> [[f64; 3]; 6] {
    [
        [a, b, c],
        [a, c, b],
        [b, a, c],
        [b, c, a],
        [c, a, b],
        [c, b, a],
    ]
}

impl QuadratureRule {
    fn from_orbits(orbits: &[(f64, Vec<[f64; 3]>)], degree: u32) -> Self {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (w, pts) in orbits {
            for p in pts {
                nodes.push(*p);
                weights.push(*w);
            }
        }
        QuadratureRule {
            nodes,
            weights,
            degree,
        }
    }

    pub fn centroid() -> Self {
        QuadratureRule {
            nodes: vec![[1.0 / 3.0; 3]],
            weights: vec![1.0],
            degree: 1,
        }
    }

    /// Three-point interior rule, degree 2.
    pub fn three_point() -> Self {
        Self::from_orbits(&[(1.0 / 3.0, orbit3(2.0 / 3.0, 1.0 / 6.0).to_vec())], 2)
    }

    /// Dunavant's six-point rule, degree 4.
    pub fn six_point() -> Self {
        Self::from_orbits(
            &[
                (
                    0.223_381_589_678_011,
                    orbit3(0.108_103_018_168_070, 0.445_948_490_915_965).to_vec(),
                ),
                (
                    0.109_951_743_655_322,
                    orbit3(0.816_847_572_980_459, 0.091_576_213_509_771).to_vec(),
                ),
            ],
            4,
        )
    }

    /// Dunavant's twelve-point rule, degree 6.
    pub fn twelve_point() -> Self {
        Self::from_orbits(
            &[
                (
                    0.116_786_275_726_379,
                    orbit3(0.501_426_509_658_179, 0.249_286_745_170_910).to_vec(),
                ),
                (
                    0.050_844_906_370_207,
                    orbit3(0.873_821_971_016_996, 0.063_089_014_491_502).to_vec(),
                ),
                (
                    0.082_851_075_618_374,
                    orbit6(
                        0.053_145_049_844_817,
                        0.310_352_451_033_784,
                        0.636_502_499_121_399,
                    )
                    .to_vec(),
                ),
            ],
            6,
        )
    }

    /// Conical product of `n`-point Gauss–Legendre rules (collapsed square),
    /// exact to degree `2n - 2`.
    pub fn collapsed(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let mut nodes = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for (u, wu) in x.iter().zip(&w) {
            for (v, wv) in x.iter().zip(&w) {
                let s = *u;
                let t = v * (1.0 - u);
                nodes.push([1.0 - s - t, s, t]);
                weights.push(2.0 * wu * wv * (1.0 - u));
            }
        }
        QuadratureRule {
            nodes,
            weights,
            degree: (2 * n - 2) as u32,
        }
    }

    /// Cheapest available rule with at least the requested exactness.
    pub fn with_degree(degree: u32) -> Self {
        match degree {
            0 | 1 => Self::centroid(),
            2 => Self::three_point(),
            3 | 4 => Self::six_point(),
            5 | 6 => Self::twelve_point(),
            d => Self::collapsed(d.div_ceil(2) as usize + 1),
        }
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; 3], f64)> {
        self.nodes.iter().zip(self.weights.iter().copied())
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Exact integral of `s^a t^b` over the reference triangle
/// `{s, t ≥ 0, s + t ≤ 1}`: `a! b! / (a + b + 2)!`.
pub fn reference_monomial_integral(a: u32, b: u32) -> f64 {
    let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
    fact(a) * fact(b) / fact(a + b + 2)
}

pub(crate) fn check_order(order: usize) -> Result<()> {
    if order == 0 || order > 64 {
        return Err(Error::param(
            "order",
            format!("must be in 1..=64, got {order}"),
        ));
    }
    Ok(())
}
