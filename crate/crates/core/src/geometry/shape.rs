//! Screen shapes as closed Fourier curves in the plane.
//!
//! A shape is the planar domain enclosed by a curve
//! `γ(t) = Σ c_n e^{2πint}`, `t ∈ [0, 1)`, identified with the complex plane.
//! Truncated series are smooth and periodic by construction, so closedness
//! holds exactly and tangents/normals are available in closed form.

use std::f64::consts::PI;

use nalgebra::{Point2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Samples used for the crossing-number polyline.
const POLYLINE_SAMPLES: usize = 2048;
/// Samples used for the coarse nearest-point search.
const SEARCH_SAMPLES: usize = 512;
/// Samples used by the self-intersection test.
const SIMPLICITY_SAMPLES: usize = 1024;
/// Shapes with less enclosed area are rejected.
pub const MIN_AREA: f64 = 1e-12;

/// One term `c_n e^{2πint}` of a custom boundary curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierTerm {
    pub n: i32,
    pub re: f64,
    pub im: f64,
}

/// Canonical shape descriptor, serializable as a tagged table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ShapeDescriptor {
    Disk {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
    },
    /// `γ(θ) = base·e^{iθ} + amplitude·e^{-i(lobes-1)θ}`: a curve with
    /// `lobes`-fold rotational symmetry whose radius oscillates between
    /// `base - amplitude` and `base + amplitude`. It develops cusps at
    /// `amplitude = base / (lobes - 1)` and loops beyond.
    Star {
        base: f64,
        amplitude: f64,
        lobes: u32,
    },
    Custom {
        terms: Vec<FourierTerm>,
    },
}

impl ShapeDescriptor {
    fn fourier_terms(&self) -> Result<Vec<(i32, Complex64)>> {
        let positive = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::param(
                    name,
                    format!("must be positive and finite, got {v}"),
                ))
            }
        };
        match *self {
            ShapeDescriptor::Disk { radius } => {
                positive("radius", radius)?;
                Ok(vec![(1, Complex64::new(radius, 0.0))])
            }
            ShapeDescriptor::Ellipse { a, b } => {
                positive("a", a)?;
                positive("b", b)?;
                // (a cos θ, b sin θ) = ((a+b)/2) e^{iθ} + ((a-b)/2) e^{-iθ}
                let mut terms = vec![(1, Complex64::new(0.5 * (a + b), 0.0))];
                if a != b {
                    terms.push((-1, Complex64::new(0.5 * (a - b), 0.0)));
                }
                Ok(terms)
            }
            ShapeDescriptor::Star {
                base,
                amplitude,
                lobes,
            } => {
                positive("base", base)?;
                if !(amplitude.is_finite() && amplitude >= 0.0) {
                    return Err(Error::param("amplitude", "must be non-negative and finite"));
                }
                if lobes < 2 {
                    return Err(Error::param(
                        "lobes",
                        format!("need at least 2, got {lobes}"),
                    ));
                }
                let mut terms = vec![(1, Complex64::new(base, 0.0))];
                if amplitude > 0.0 {
                    terms.push((1 - lobes as i32, Complex64::new(amplitude, 0.0)));
                }
                Ok(terms)
            }
            ShapeDescriptor::Custom { ref terms } => {
                if terms.is_empty() {
                    return Err(Error::param(
                        "terms",
                        "custom shape needs at least one term",
                    ));
                }
                terms
                    .iter()
                    .map(|t| {
                        if t.re.is_finite() && t.im.is_finite() {
                            Ok((t.n, Complex64::new(t.re, t.im)))
                        } else {
                            Err(Error::param("terms", "non-finite coefficient"))
                        }
                    })
                    .collect()
            }
        }
    }
}

/// A validated, counterclockwise, simple closed Fourier curve and the domain
/// it encloses.
#[derive(Debug, Clone)]
pub struct ScreenShape {
    descriptor: ShapeDescriptor,
    offset: Vector2<f64>,
    terms: Vec<(i32, Complex64)>,
    polyline: Vec<Point2<f64>>,
    search: Vec<Point2<f64>>,
    area: f64,
    scale: f64,
}

/// Build and validate a shape from its descriptor.
pub fn make_shape(descriptor: &ShapeDescriptor) -> Result<ScreenShape> {
    ScreenShape::new(descriptor.clone(), Vector2::zeros())
}

impl ScreenShape {
    pub fn new(descriptor: ShapeDescriptor, offset: Vector2<f64>) -> Result<Self> {
        if !(offset.x.is_finite() && offset.y.is_finite()) {
            return Err(Error::param("offset", "must be finite"));
        }
        let mut terms = descriptor.fourier_terms()?;
        terms.retain(|(n, c)| *n != 0 || c.norm() > 0.0);
        let mut merged: Vec<(i32, Complex64)> = Vec::with_capacity(terms.len() + 1);
        for (n, c) in terms {
            match merged.iter_mut().find(|(m, _)| *m == n) {
                Some(entry) => entry.1 += c,
                None => merged.push((n, c)),
            }
        }
        // Translation enters as the constant term.
        let shift = Complex64::new(offset.x, offset.y);
        match merged.iter_mut().find(|(n, _)| *n == 0) {
            Some(entry) => entry.1 += shift,
            None => merged.push((0, shift)),
        }
        merged.sort_by_key(|(n, _)| *n);

        // Area = π Σ n |c_n|² for t ∈ [0, 1).
        let area: f64 = PI
            * merged
                .iter()
                .map(|(n, c)| *n as f64 * c.norm_sqr())
                .sum::<f64>();
        let scale = merged
            .iter()
            .filter(|(n, _)| *n != 0)
            .map(|(_, c)| c.norm())
            .sum::<f64>()
            .max(f64::MIN_POSITIVE);

        let mut shape = ScreenShape {
            descriptor,
            offset,
            terms: merged,
            polyline: Vec::new(),
            search: Vec::new(),
            area,
            scale,
        };
        shape.validate()?;
        shape.polyline = shape.sample(POLYLINE_SAMPLES);
        shape.search = shape.sample(SEARCH_SAMPLES);
        Ok(shape)
    }

    /// The same shape moved rigidly by `t`.
    pub fn translated(&self, t: Vector2<f64>) -> Result<Self> {
        ScreenShape::new(self.descriptor.clone(), self.offset + t)
    }

    fn validate(&self) -> Result<()> {
        if !self.area.is_finite() || self.area.abs() < MIN_AREA {
            return Err(Error::Geometry(format!(
                "enclosed area {:e} below {MIN_AREA:e}",
                self.area
            )));
        }
        if self.area < 0.0 {
            return Err(Error::Geometry("curve is oriented clockwise".into()));
        }
        // Regularity: the parametrization must not stall (cusps).
        let n = SIMPLICITY_SAMPLES;
        let min_speed = (0..4 * n)
            .map(|i| self.tangent(i as f64 / (4 * n) as f64).norm())
            .fold(f64::INFINITY, f64::min);
        if min_speed < 1e-9 * self.scale {
            return Err(Error::Geometry(format!(
                "curve is not regular (minimum speed {min_speed:e})"
            )));
        }
        let pts = self.sample(n);
        if let Some((i, j)) = first_self_intersection(&pts) {
            return Err(Error::Geometry(format!(
                "curve self-intersects between samples {i} and {j}"
            )));
        }
        Ok(())
    }

    pub fn descriptor(&self) -> &ShapeDescriptor {
        &self.descriptor
    }

    pub fn offset(&self) -> Vector2<f64> {
        self.offset
    }

    /// Fourier coefficients `(n, c_n)` including the translation term.
    pub fn terms(&self) -> &[(i32, Complex64)] {
        &self.terms
    }

    /// Exact enclosed area.
    pub fn area(&self) -> f64 {
        self.area
    }

    fn eval(&self, t: f64, derivative: u32) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        for &(n, c) in &self.terms {
            let w = 2.0 * PI * n as f64;
            let factor = Complex64::new(0.0, w).powu(derivative);
            z += c * factor * Complex64::cis(w * t);
        }
        z
    }

    /// Curve point γ(t).
    pub fn point(&self, t: f64) -> Point2<f64> {
        let z = self.eval(t, 0);
        Point2::new(z.re, z.im)
    }

    /// Derivative γ'(t).
    pub fn tangent(&self, t: f64) -> Vector2<f64> {
        let z = self.eval(t, 1);
        Vector2::new(z.re, z.im)
    }

    fn second_derivative(&self, t: f64) -> Vector2<f64> {
        let z = self.eval(t, 2);
        Vector2::new(z.re, z.im)
    }

    /// Unit outward normal at γ(t).
    pub fn outward_normal(&self, t: f64) -> Vector2<f64> {
        let d = self.tangent(t);
        Vector2::new(d.y, -d.x).normalize()
    }

    /// `n` points `γ(i/n)`.
    pub fn sample(&self, n: usize) -> Vec<Point2<f64>> {
        (0..n).map(|i| self.point(i as f64 / n as f64)).collect()
    }

    /// Arc length, via the periodic trapezoid rule.
    pub fn perimeter(&self) -> f64 {
        let n = POLYLINE_SAMPLES;
        (0..n)
            .map(|i| self.tangent(i as f64 / n as f64).norm())
            .sum::<f64>()
            / n as f64
    }

    /// Axis-aligned bounding box `(min, max)` of the boundary polyline.
    pub fn bounding_box(&self) -> (Point2<f64>, Point2<f64>) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.polyline {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        // Chord sagitta is far below this pad at the polyline resolution.
        let pad = 1e-6 * self.scale;
        (lo - Vector2::repeat(pad), hi + Vector2::repeat(pad))
    }

    /// Parameter of the boundary point nearest to `p`.
    pub fn nearest_parameter(&self, p: &Point2<f64>) -> f64 {
        let n = self.search.len();
        let (best, _) = self
            .search
            .iter()
            .enumerate()
            .map(|(i, q)| (i, (q - p).norm_squared()))
            .fold(
                (0, f64::INFINITY),
                |acc, x| if x.1 < acc.1 { x } else { acc },
            );
        let h = 1.0 / n as f64;
        let (lo, hi) = (best as f64 * h - h, best as f64 * h + h);
        let dist2 = |t: f64| (self.point(t) - p).norm_squared();

        // Newton on g(t) = (γ - p)·γ' inside the bracket, with a ternary fallback.
        let mut t = best as f64 * h;
        for _ in 0..12 {
            let d = self.point(t) - p;
            let d1 = self.tangent(t);
            let d2 = self.second_derivative(t);
            let g = d.dot(&d1);
            let dg = d1.norm_squared() + d.dot(&d2);
            if dg <= 0.0 {
                break;
            }
            let step = g / dg;
            let next = (t - step).clamp(lo, hi);
            if (next - t).abs() < 1e-15 {
                t = next;
                break;
            }
            t = next;
        }
        let mut candidate = t;
        let (mut a, mut b) = (lo, hi);
        if dist2(t) > dist2(best as f64 * h) {
            for _ in 0..80 {
                let m1 = a + (b - a) / 3.0;
                let m2 = b - (b - a) / 3.0;
                if dist2(m1) < dist2(m2) {
                    b = m2;
                } else {
                    a = m1;
                }
            }
            candidate = 0.5 * (a + b);
        }
        candidate.rem_euclid(1.0)
    }

    /// Unsigned distance from `p` to the boundary curve.
    pub fn distance_to_boundary(&self, p: &Point2<f64>) -> f64 {
        let t = self.nearest_parameter(p);
        (self.point(t) - p).norm()
    }

    /// Signed distance, positive inside.
    pub fn signed_distance(&self, p: &Point2<f64>) -> f64 {
        let d = self.distance_to_boundary(p);
        if self.contains(p) {
            d
        } else {
            -d
        }
    }

    /// Point-in-shape by crossing number on the boundary polyline, with the
    /// exact curve deciding points closer to the boundary than the polyline
    /// chord error.
    pub fn contains(&self, p: &Point2<f64>) -> bool {
        let (lo, hi) = self.bounding_box();
        if p.x < lo.x || p.y < lo.y || p.x > hi.x || p.y > hi.y {
            return false;
        }
        let pts = &self.polyline;
        let n = pts.len();
        let mut inside = false;
        let mut near = f64::INFINITY;
        for i in 0..n {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            near = near.min(segment_distance(p, &a, &b));
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        if near < 1e-5 * self.scale {
            let t = self.nearest_parameter(p);
            let q = self.point(t);
            return (p - q).dot(&self.outward_normal(t)) <= 0.0;
        }
        inside
    }

    /// Winding number of the exact curve around `p`, by trapezoid
    /// integration of the angle increment.
    pub fn winding_number(&self, p: &Point2<f64>, samples: usize) -> f64 {
        let mut total = 0.0;
        for i in 0..samples {
            let t = i as f64 / samples as f64;
            let d = self.point(t) - p;
            let v = self.tangent(t);
            total += (d.x * v.y - d.y * v.x) / d.norm_squared();
        }
        total / samples as f64 / (2.0 * PI)
    }

    /// Closed boundary polyline used for inside tests.
    pub fn polyline(&self) -> &[Point2<f64>] {
        &self.polyline
    }

    /// Characteristic length (sum of non-constant coefficient moduli).
    pub fn scale(&self) -> f64 {
        self.scale
    }
}

pub(crate) fn segment_distance(p: &Point2<f64>, a: &Point2<f64>, b: &Point2<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let s = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (a + ab * s - p).norm()
}

fn orient(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn segments_cross(a: &Point2<f64>, b: &Point2<f64>, c: &Point2<f64>, d: &Point2<f64>) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: &Point2<f64>, q: &Point2<f64>, r: &Point2<f64>, o: f64| {
        o == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(c, d, a, d1) || on(c, d, b, d2) || on(a, b, c, d3) || on(a, b, d, d4)
}

/// First pair of non-adjacent crossing segments of a closed polyline.
pub(crate) fn first_self_intersection(pts: &[Point2<f64>]) -> Option<(usize, usize)> {
    let n = pts.len();
    let boxes: Vec<[f64; 4]> = (0..n)
        .map(|i| {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            [a.x.min(b.x), a.x.max(b.x), a.y.min(b.y), a.y.max(b.y)]
        })
        .collect();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (bi, bj) = (&boxes[i], &boxes[j]);
            if bi[1] < bj[0] || bj[1] < bi[0] || bi[3] < bj[2] || bj[3] < bi[2] {
                continue;
            }
            if segments_cross(&pts[i], &pts[(i + 1) % n], &pts[j], &pts[(j + 1) % n]) {
                return Some((i, j));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_disk_curve_and_area() {
        let s = make_shape(&ShapeDescriptor::Disk { radius: 1.0 }).unwrap();
        for i in 0..16 {
            let t = i as f64 / 16.0;
            let p = s.point(t);
            assert!((p.x - (2.0 * PI * t).cos()).abs() < 1e-14);
            assert!((p.y - (2.0 * PI * t).sin()).abs() < 1e-14);
        }
        assert!((s.area() - PI).abs() < 1e-14);
        assert!((s.point(0.0) - s.point(1.0 - 1e-15)).norm() < 1e-12);
    }

    #[test]
    fn ellipse_area() {
        let s = make_shape(&ShapeDescriptor::Ellipse { a: 2.0, b: 1.0 }).unwrap();
        assert!((s.area() - 2.0 * PI).abs() < 1e-6);
        let p = s.point(0.25);
        assert!((p.x).abs() < 1e-14 && (p.y - 1.0).abs() < 1e-14);
    }

    #[test]
    fn star_with_large_amplitude_is_rejected() {
        // Before fixing the rejection, confirm the loops on a fine polyline
        // directly (independent of `validate`).
        let desc = ShapeDescriptor::Star {
            base: 1.0,
            amplitude: 0.9,
            lobes: 5,
        };
        let fine: Vec<Point2<f64>> = (0..8192)
            .map(|i| {
                let th = 2.0 * PI * i as f64 / 8192.0;
                let z = Complex64::cis(th) + 0.9 * Complex64::cis(-4.0 * th);
                Point2::new(z.re, z.im)
            })
            .collect();
        assert!(first_self_intersection(&fine).is_some());
        assert!(matches!(make_shape(&desc), Err(Error::Geometry(_))));

        // Below the cusp threshold base/(lobes-1) the curve is simple.
        let ok = make_shape(&ShapeDescriptor::Star {
            base: 1.0,
            amplitude: 0.2,
            lobes: 5,
        })
        .unwrap();
        assert!((ok.area() - PI * (1.0 - 4.0 * 0.04)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_and_clockwise_rejected() {
        let tiny = ShapeDescriptor::Disk { radius: 1e-7 };
        assert!(matches!(make_shape(&tiny), Err(Error::Geometry(_))));
        let cw = ShapeDescriptor::Custom {
            terms: vec![FourierTerm {
                n: -1,
                re: 1.0,
                im: 0.0,
            }],
        };
        assert!(matches!(make_shape(&cw), Err(Error::Geometry(_))));
        assert!(make_shape(&ShapeDescriptor::Disk { radius: -1.0 }).is_err());
    }

    #[test]
    fn distance_to_boundary_disk() {
        let s = make_shape(&ShapeDescriptor::Disk { radius: 1.0 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p: Point2<f64> =
                Point2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let exact = (p.coords.norm() - 1.0).abs();
            assert!((s.distance_to_boundary(&p) - exact).abs() < 1e-10, "{p}");
        }
    }

    #[test]
    fn contains_agrees_with_winding_number() {
        for desc in [
            ShapeDescriptor::Ellipse { a: 1.3, b: 0.8 },
            ShapeDescriptor::Star {
                base: 1.0,
                amplitude: 0.2,
                lobes: 5,
            },
        ] {
            let s = make_shape(&desc).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let mut checked = 0;
            for _ in 0..1000 {
                let p: Point2<f64> =
                    Point2::new(rng.random_range(-1.6..1.6), rng.random_range(-1.6..1.6));
                if s.distance_to_boundary(&p) < 1e-9 {
                    continue;
                }
                let w = s.winding_number(&p, 8192).round();
                assert_eq!(s.contains(&p), w == 1.0, "{p}");
                checked += 1;
            }
            assert!(checked > 990);
        }
    }

    #[test]
    fn translation_moves_constant_term() {
        let s = make_shape(&ShapeDescriptor::Disk { radius: 1.0 }).unwrap();
        let t = s.translated(Vector2::new(0.5, 0.3)).unwrap();
        assert!((t.area() - s.area()).abs() < 1e-14);
        assert!(t.contains(&Point2::new(1.4, 0.3)));
        assert!(!s.contains(&Point2::new(1.4, 0.3)));
    }
}
