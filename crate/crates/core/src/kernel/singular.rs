//! Integrals of the fundamental solution over one flat triangle.
//!
//! For an observation point `x = (x′, h)` close to the panel the kernel is
//! split as `Φ = 1/(4πR) + (e^{ikR} − 1)/(4πR)`. The static part is
//! integrated in closed form. The bounded remainder is integrated in polar
//! coordinates about `x′`: the radial integral is elementary and the angular
//! one uses Gauss–Legendre after a `sinh` change of variable.

use std::f64::consts::PI;

use nalgebra::{Point2, Vector2};
use num_complex::Complex64;

use super::quadrature::{check_order, gauss_legendre, QuadratureRule};
use super::{phi_of_distance, WaveNumber};
use crate::error::{Error, Result};

/// Gauss–Legendre points per angular piece of the singular rule.
pub const DEFAULT_SINGULAR_ORDER: usize = 8;
/// The singular path is used below this distance, in panel diameters.
pub const NEAR_FIELD_RATIO: f64 = 2.0;

/// Vertex values of a linear weight on a panel; `[1, 1, 1]` is the constant.
pub type PanelWeights = [f64; 3];

pub const UNIT_WEIGHTS: PanelWeights = [1.0, 1.0, 1.0];

fn signed_area(v: &[Point2<f64>; 3]) -> f64 {
    0.5 * (v[1] - v[0]).perp(&(v[2] - v[0]))
}

fn diameter(v: &[Point2<f64>; 3]) -> f64 {
    (v[1] - v[0])
        .norm()
        .max((v[2] - v[1]).norm())
        .max((v[0] - v[2]).norm())
}

fn check_triangle(v: &[Point2<f64>; 3]) -> Result<f64> {
    let area = signed_area(v);
    let d = diameter(v);
    if !(area.abs() > 1e-14 * d * d) || !area.is_finite() {
        return Err(Error::DegenerateTriangle { area });
    }
    Ok(area)
}

/// In-plane distance from `x` to the closed triangle.
pub fn point_triangle_distance(v: &[Point2<f64>; 3], x: &Point2<f64>) -> f64 {
    let s = signed_area(v).signum();
    let inside = (0..3).all(|i| s * (v[(i + 1) % 3] - v[i]).perp(&(x - v[i])) >= 0.0);
    if inside {
        return 0.0;
    }
    (0..3)
        .map(|i| crate::geometry::shape::segment_distance(x, &v[i], &v[(i + 1) % 3]))
        .fold(f64::INFINITY, f64::min)
}

/// Closed-form `∫_T 1 / sqrt(|x′ − y′|² + h²) dy′` for a flat triangle `T`.
///
/// Each edge contributes a log term weighted by the signed in-plane distance
/// of `x′` to the edge line and, off the plane, an arctangent correction.
pub fn static_triangle_integral(v: &[Point2<f64>; 3], x: &Point2<f64>, height: f64) -> f64 {
    let orientation = signed_area(v).signum();
    let h = height.abs();
    let h2 = h * h;
    let scale = diameter(v);
    let mut total = 0.0;
    for i in 0..3 {
        let a = v[i];
        let b = v[(i + 1) % 3];
        let len = (b - a).norm();
        let s_hat = (b - a) / len;
        // Outward normal for a counterclockwise triangle.
        let m_hat = Vector2::new(s_hat.y, -s_hat.x) * orientation;
        let p0 = (a - x).dot(&m_hat);
        if p0.abs() <= 1e-14 * scale {
            continue;
        }
        let l_minus = (a - x).dot(&s_hat);
        let l_plus = (b - x).dot(&s_hat);
        let r0_sq = p0 * p0 + h2;
        let r_minus = (r0_sq + l_minus * l_minus).sqrt();
        let r_plus = (r0_sq + l_plus * l_plus).sqrt();
        // R + l without cancellation for negative l.
        let sum = |r: f64, l: f64| if l >= 0.0 { r + l } else { r0_sq / (r - l) };
        let log_term = (sum(r_plus, l_plus) / sum(r_minus, l_minus)).ln();
        let mut edge = p0 * log_term;
        if h > 0.0 {
            edge -= h
                * ((p0 * l_plus / (r0_sq + h * r_plus)).atan()
                    - (p0 * l_minus / (r0_sq + h * r_minus)).atan());
        }
        total += edge;
    }
    total * orientation
}

/// Duffy-type integration of `f(y′, R)` over `T`, splitting `T` into the
/// three signed sub-triangles with apex `x′`. `f` must already include any
/// weight; the polar Jacobian is applied here.
pub fn apex_integral<F>(v: &[Point2<f64>; 3], x: &Point2<f64>, order: usize, f: F) -> Complex64
where
    F: Fn(Point2<f64>) -> Complex64,
{
    let (nodes, weights) = gauss_legendre(order);
    let mut total = Complex64::new(0.0, 0.0);
    let area = signed_area(v).abs();
    for i in 0..3 {
        let a = v[i];
        let b = v[(i + 1) % 3];
        let sub = 0.5 * (a - x).perp(&(b - x));
        if sub.abs() <= 1e-15 * area {
            continue;
        }
        let mut part = Complex64::new(0.0, 0.0);
        for (u, wu) in nodes.iter().zip(&weights) {
            for (s, ws) in nodes.iter().zip(&weights) {
                let y = x + (a - x + (b - a) * *s) * *u;
                part += f(y) * (wu * ws * u);
            }
        }
        total += part * (2.0 * sub);
    }
    total * signed_area(v).signum()
}

fn linear_weight(v: &[Point2<f64>; 3], w: &PanelWeights, p: &Point2<f64>) -> (f64, Vector2<f64>) {
    let area2 = 2.0 * signed_area(v);
    let e1 = v[1] - v[0];
    let e2 = v[2] - v[0];
    // Gradient of the linear interpolant.
    let grad = Vector2::new(
        ((w[1] - w[0]) * e2.y - (w[2] - w[0]) * e1.y) / area2,
        ((w[2] - w[0]) * e1.x - (w[1] - w[0]) * e2.x) / area2,
    );
    (w[0] + grad.dot(&(p - v[0])), grad)
}

/// `(e^z − 1)/z` and `(e^z − 1 − z)/z`, accurate for small `|z|`.
fn exp_quotients(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 0.5 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut tail = Complex64::new(0.0, 0.0);
        for n in 2..30 {
            term *= z / n as f64;
            tail += term;
        }
        (tail + 1.0, tail)
    } else {
        let q = (z.exp() - 1.0) / z;
        (q, q - 1.0)
    }
}

/// `∫_0^R (e^{ik√(r²+h²)} − 1) / (4π√(r²+h²)) r dr`, the radial integral of
/// the kernel remainder.
fn remainder_radial(k: f64, radius: f64, h: f64) -> Complex64 {
    let h = h.abs();
    let s = (radius * radius + h * h).sqrt();
    let delta = radius * radius / (s + h);
    let (q1, q2) = exp_quotients(Complex64::new(0.0, k * delta));
    let (p1, _) = exp_quotients(Complex64::new(0.0, k * h));
    let shift = Complex64::new(0.0, k * h) * p1;
    delta * (shift * q1 + q2) / (4.0 * PI)
}

/// `∫_0^R e^{ik√(r²+h²)} r² / (4π√(r²+h²)) dr` by Gauss–Legendre, in `r` on
/// the plane and in `t = asinh(r/|h|)` off it.
fn moment_radial(k: f64, radius: f64, h: f64, nodes: &[f64], weights: &[f64]) -> Complex64 {
    let h = h.abs();
    let mut sum = Complex64::new(0.0, 0.0);
    if h <= 1e-3 * radius {
        for (t, w) in nodes.iter().zip(weights) {
            let r = t * radius;
            let s = (r * r + h * h).sqrt();
            sum += Complex64::cis(k * s) * (w * r * r / s);
        }
        return sum * radius / (4.0 * PI);
    }
    let top = (radius / h).asinh();
    let pieces = top.ceil().max(1.0);
    let len = top / pieces;
    for p in 0..pieces as usize {
        for (t, w) in nodes.iter().zip(weights) {
            let t = (p as f64 + t) * len;
            let sh = t.sinh();
            sum += Complex64::cis(k * h * t.cosh()) * (w * sh * sh);
        }
    }
    sum * (len * h * h / (4.0 * PI))
}

/// Integrate over `T` in polar coordinates about `x′`.
///
/// `T` is split into the signed sub-triangles with apex `x′`. On each, the
/// angle is replaced by `w = asinh(s/p)`, with `s` the coordinate along the
/// edge measured from the foot of the perpendicular and `p` the distance to
/// the edge line. The angular integrand then stays smooth even when `x′`
/// approaches an edge. `radial(R, d)` must return `∫_0^R f(x′ + r d) r dr`.
pub fn polar_integral<F>(
    v: &[Point2<f64>; 3],
    x: &Point2<f64>,
    order: usize,
    radial: F,
) -> Complex64
where
    F: Fn(f64, Vector2<f64>) -> Complex64,
{
    let (nodes, weights) = gauss_legendre(order);
    let orientation = signed_area(v).signum();
    let scale = diameter(v);
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        let a = v[i];
        let b = v[(i + 1) % 3];
        let s_hat = (b - a).normalize();
        let m_hat = Vector2::new(s_hat.y, -s_hat.x) * orientation;
        let p0 = (a - x).dot(&m_hat);
        if p0.abs() <= 1e-14 * scale {
            continue;
        }
        let p = p0.abs();
        let foot = x + m_hat * p0;
        let w_lo = ((a - x).dot(&s_hat) / p).asinh();
        let w_hi = ((b - x).dot(&s_hat) / p).asinh();
        let pieces = ((w_hi - w_lo) / 1.5).ceil().max(1.0);
        let len = (w_hi - w_lo) / pieces;
        let mut part = Complex64::new(0.0, 0.0);
        for j in 0..pieces as usize {
            for (t, wt) in nodes.iter().zip(&weights) {
                let w = w_lo + (j as f64 + t) * len;
                let s = p * w.sinh();
                let radius = p * w.cosh();
                let dir = (foot + s_hat * s - x) / radius;
                part += radial(radius, dir) * (wt / w.cosh());
            }
        }
        total += part * (len * p0.signum());
    }
    total
}

/// Singular-path value of `∫_T Φ((x′, h), (y′, 0)) ℓ(y′) dy′`, with `ℓ` the
/// linear interpolant of `weights`.
pub fn singular_weighted_integral(
    k: f64,
    v: &[Point2<f64>; 3],
    weights: &PanelWeights,
    x: &Point2<f64>,
    height: f64,
    order: usize,
) -> Complex64 {
    let (w_at_x, grad) = linear_weight(v, weights, x);
    let mut value = Complex64::new(static_triangle_integral(v, x, height) / (4.0 * PI), 0.0);
    if k != 0.0 {
        value += polar_integral(v, x, order, |radius, _| remainder_radial(k, radius, height));
    }
    value *= w_at_x;
    if grad.norm() > 0.0 {
        let (nodes, wts) = gauss_legendre(order);
        value += polar_integral(v, x, order, |radius, dir| {
            moment_radial(k, radius, height, &nodes, &wts) * grad.dot(&dir)
        });
    }
    value
}

/// Regular-quadrature value of the same integral.
pub fn regular_weighted_integral(
    k: f64,
    v: &[Point2<f64>; 3],
    weights: &PanelWeights,
    x: &Point2<f64>,
    height: f64,
    rule: &QuadratureRule,
) -> Complex64 {
    let area = signed_area(v).abs();
    let h2 = height * height;
    let mut sum = Complex64::new(0.0, 0.0);
    for (l, w) in rule.iter() {
        let y = Point2::from(v[0].coords * l[0] + v[1].coords * l[1] + v[2].coords * l[2]);
        let r = ((y - x).norm_squared() + h2).sqrt();
        let weight = weights[0] * l[0] + weights[1] * l[1] + weights[2] * l[2];
        sum += phi_of_distance(k, r) * (w * weight);
    }
    sum * area
}

/// Polynomial degree needed to integrate a smooth kernel with phase
/// variation `k · diam` over a panel: the smallest even `p ≥ 6` with
/// `(k·diam)^(p+1) / (p+1)! < 1e-13`.
pub(crate) fn oscillatory_degree(k: f64, diam: f64) -> u32 {
    let kd = k * diam;
    let mut p = 6u32;
    let mut term = kd.powi(7) / 5040.0;
    while term > 1e-13 && p < 60 {
        p += 2;
        term *= kd * kd / (f64::from(p) * f64::from(p + 1));
    }
    p
}

/// `∫_T Φ((x′, h), (y′, 0)) ℓ(y′) dy′`, choosing the singular path when
/// the observation point is within [`NEAR_FIELD_RATIO`] diameters of `T`.
pub fn panel_integral(
    k: WaveNumber,
    v: &[Point2<f64>; 3],
    weights: &PanelWeights,
    x: &Point2<f64>,
    height: f64,
) -> Result<Complex64> {
    check_triangle(v)?;
    let diam = diameter(v);
    let planar = point_triangle_distance(v, x);
    let distance = (planar * planar + height * height).sqrt();
    let kv = k.value();
    if distance < NEAR_FIELD_RATIO * diam {
        Ok(singular_weighted_integral(
            kv,
            v,
            weights,
            x,
            height,
            DEFAULT_SINGULAR_ORDER,
        ))
    } else {
        let rule = QuadratureRule::with_degree(oscillatory_degree(kv, diam));
        Ok(regular_weighted_integral(kv, v, weights, x, height, &rule))
    }
}

/// `∫_T Φ(x⁰, y⁰) dy′` for an in-plane point `x′` in or near `T`, with the
/// `1/(4π|x′ − y′|)` singularity integrated in closed form.
pub fn singular_panel_integral(
    k: WaveNumber,
    v: &[Point2<f64>; 3],
    x: &Point2<f64>,
) -> Result<Complex64> {
    singular_panel_integral_with_order(k, v, x, DEFAULT_SINGULAR_ORDER)
}

pub fn singular_panel_integral_with_order(
    k: WaveNumber,
    v: &[Point2<f64>; 3],
    x: &Point2<f64>,
    order: usize,
) -> Result<Complex64> {
    check_triangle(v)?;
    check_order(order)?;
    Ok(singular_weighted_integral(
        k.value(),
        v,
        &UNIT_WEIGHTS,
        x,
        0.0,
        order,
    ))
}
