//! Graded triangulation of a screen shape.
//!
//! Vertices come from a quadtree-driven greedy sampling of the size field
//! `h(d) = clamp(target_h · d^grading, target_h², target_h)`, with `d` the
//! distance to the boundary, plus boundary vertices placed on the exact
//! curve. A constrained Delaunay triangulation of those vertices, restricted
//! to the boundary polygon, is the mesh.

use std::collections::HashMap;

use nalgebra::{Point2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spade::{ConstrainedDelaunayTriangulation, Triangulation};

use super::shape::ScreenShape;
use crate::error::{Error, Result};

/// Seed for the candidate jitter; meshes are deterministic.
const MESH_SEED: u64 = 0x5eed_0f5c_12ee;
/// Minimum spacing between accepted vertices, relative to the local size.
const SPACING_FACTOR: f64 = 0.85;
/// Minimum clearance of interior vertices from the boundary.
const CLEARANCE_FACTOR: f64 = 0.75;
/// Boundary spacing cap relative to `target_h` for coarse (ungraded) meshes.
const BOUNDARY_FACTOR: f64 = 0.6;

/// One triangle of a mesh with its cached metadata.
#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub vertices: [Point2<f64>; 3],
    pub area: f64,
    pub centroid: Point2<f64>,
    /// Longest edge.
    pub diameter: f64,
    /// Distance from the centroid to the shape boundary.
    pub boundary_distance: f64,
}

impl Panel {
    pub fn from_vertices(vertices: [Point2<f64>; 3]) -> Self {
        let [a, b, c] = vertices;
        let area = 0.5 * ((b - a).perp(&(c - a)));
        let centroid = Point2::from((a.coords + b.coords + c.coords) / 3.0);
        let diameter = (b - a).norm().max((c - b).norm()).max((a - c).norm());
        Panel {
            vertices,
            area,
            centroid,
            diameter,
            boundary_distance: f64::NAN,
        }
    }

    /// Point at barycentric coordinates `l`.
    pub fn at(&self, l: &[f64; 3]) -> Point2<f64> {
        let [a, b, c] = self.vertices;
        Point2::from(a.coords * l[0] + b.coords * l[1] + c.coords * l[2])
    }
}

/// Conforming triangulation of a screen shape.
#[derive(Debug, Clone)]
pub struct ScreenMesh {
    shape: ScreenShape,
    vertices: Vec<Point2<f64>>,
    vertex_boundary_distance: Vec<f64>,
    triangles: Vec<[usize; 3]>,
    panels: Vec<Panel>,
    target_h: f64,
    grading: f64,
}

impl ScreenMesh {
    pub fn shape(&self) -> &ScreenShape {
        &self.shape
    }

    pub fn vertices(&self) -> &[Point2<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn len(&self) -> usize {
        self.panels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.panels.is_empty()
    }

    /// Distance of each vertex to the boundary (zero on boundary vertices).
    pub fn vertex_boundary_distance(&self) -> &[f64] {
        &self.vertex_boundary_distance
    }

    pub fn target_h(&self) -> f64 {
        self.target_h
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn total_area(&self) -> f64 {
        self.panels.iter().map(|p| p.area).sum()
    }

    pub fn min_diameter(&self) -> f64 {
        self.panels
            .iter()
            .map(|p| p.diameter)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_diameter(&self) -> f64 {
        self.panels.iter().map(|p| p.diameter).fold(0.0, f64::max)
    }

    /// Index of a panel containing `p`, if any.
    pub fn locate(&self, p: &Point2<f64>) -> Option<usize> {
        self.panels.iter().position(|panel| {
            let [a, b, c] = panel.vertices;
            let tol = -1e-12 * panel.area.abs().max(f64::MIN_POSITIVE);
            let o1 = 0.5 * (b - a).perp(&(p - a));
            let o2 = 0.5 * (c - b).perp(&(p - b));
            let o3 = 0.5 * (a - c).perp(&(p - c));
            o1 >= tol && o2 >= tol && o3 >= tol
        })
    }

    /// Vertex-table and triangle-table CSV text.
    pub fn to_csv(&self) -> (String, String) {
        let mut v = String::from("index,x1,x2\n");
        for (i, p) in self.vertices.iter().enumerate() {
            v.push_str(&format!("{i},{:.17e},{:.17e}\n", p.x, p.y));
        }
        let mut t = String::from("index,v0,v1,v2,area\n");
        for (i, (tri, panel)) in self.triangles.iter().zip(&self.panels).enumerate() {
            t.push_str(&format!(
                "{i},{},{},{},{:.17e}\n",
                tri[0], tri[1], tri[2], panel.area
            ));
        }
        (v, t)
    }
}

/// Local target size for a vertex at boundary distance `d`.
fn size_field(target_h: f64, grading: f64, d: f64) -> f64 {
    let h_min = (target_h * target_h).min(target_h);
    if grading == 0.0 {
        target_h
    } else {
        (target_h * d.max(0.0).powf(grading)).clamp(h_min, target_h)
    }
}

/// Triangulate `shape` with size field `target_h · d^grading`.
pub fn mesh_shape(shape: &ScreenShape, target_h: f64, grading: f64) -> Result<ScreenMesh> {
    if !(target_h.is_finite() && target_h > 0.0) {
        return Err(Error::param(
            "target_h",
            format!("must be positive, got {target_h}"),
        ));
    }
    if !(grading.is_finite() && grading >= 0.0) {
        return Err(Error::param(
            "grading",
            format!("must be non-negative, got {grading}"),
        ));
    }

    let boundary = boundary_vertices(shape, target_h, grading);
    let (interior, depth) = interior_vertices(shape, target_h, grading, &boundary);
    if target_h > depth {
        return Err(Error::Meshing(format!(
            "target_h {target_h} exceeds the shape's inscribed depth {depth:.4}"
        )));
    }

    let mut cdt: ConstrainedDelaunayTriangulation<spade::Point2<f64>> =
        ConstrainedDelaunayTriangulation::new();
    let mut handles = Vec::with_capacity(boundary.len());
    for p in &boundary {
        let h = cdt
            .insert(spade::Point2::new(p.x, p.y))
            .map_err(|e| Error::Meshing(format!("boundary insertion failed: {e:?}")))?;
        handles.push(h);
    }
    for i in 0..handles.len() {
        let j = (i + 1) % handles.len();
        if handles[i] != handles[j] {
            cdt.add_constraint(handles[i], handles[j]);
        }
    }
    for p in &interior {
        cdt.insert(spade::Point2::new(p.x, p.y))
            .map_err(|e| Error::Meshing(format!("interior insertion failed: {e:?}")))?;
    }

    let all: Vec<Point2<f64>> = cdt
        .vertices()
        .map(|v| {
            let p = v.position();
            Point2::new(p.x, p.y)
        })
        .collect();
    let n_boundary = boundary.len();

    let mut keep: Vec<[usize; 3]> = Vec::new();
    for face in cdt.inner_faces() {
        let [a, b, c] = face.vertices().map(|v| v.fix().index());
        let centroid = Point2::from((all[a].coords + all[b].coords + all[c].coords) / 3.0);
        if point_in_polygon(&boundary, &centroid) {
            keep.push([a, b, c]);
        }
    }

    // Compact the vertex set to the vertices actually used.
    let mut remap = vec![usize::MAX; all.len()];
    let mut vertices = Vec::new();
    let mut on_boundary = Vec::new();
    for tri in &mut keep {
        for v in tri.iter_mut() {
            if remap[*v] == usize::MAX {
                remap[*v] = vertices.len();
                vertices.push(all[*v]);
                on_boundary.push(*v < n_boundary);
            }
            *v = remap[*v];
        }
    }

    let vertex_boundary_distance: Vec<f64> = vertices
        .iter()
        .zip(&on_boundary)
        .map(|(p, &b)| {
            if b {
                0.0
            } else {
                shape.distance_to_boundary(p)
            }
        })
        .collect();

    let mut panels = Vec::with_capacity(keep.len());
    for tri in &keep {
        let mut panel = Panel::from_vertices(tri.map(|i| vertices[i]));
        if !(panel.area > 1e-14 * panel.diameter * panel.diameter) {
            return Err(Error::Meshing(format!(
                "degenerate triangle with area {:e}",
                panel.area
            )));
        }
        panel.boundary_distance = shape.distance_to_boundary(&panel.centroid);
        panels.push(panel);
    }

    let mesh = ScreenMesh {
        shape: shape.clone(),
        vertices,
        vertex_boundary_distance,
        triangles: keep,
        panels,
        target_h,
        grading,
    };
    check_conforming(&mesh)?;
    Ok(mesh)
}

fn boundary_vertices(shape: &ScreenShape, target_h: f64, grading: f64) -> Vec<Point2<f64>> {
    let spacing = size_field(target_h, grading, 0.0).min(BOUNDARY_FACTOR * target_h);
    // Cumulative arc length on a fine parameter grid, then invert.
    let fine = 8192;
    let mut cumulative = Vec::with_capacity(fine + 1);
    cumulative.push(0.0);
    let mut prev = shape.point(0.0);
    for i in 1..=fine {
        let p = shape.point(i as f64 / fine as f64);
        let last = *cumulative.last().unwrap();
        cumulative.push(last + (p - prev).norm());
        prev = p;
    }
    let length = cumulative[fine];
    let n = ((length / spacing).ceil() as usize).max(12);
    let mut out = Vec::with_capacity(n);
    let mut j = 0;
    for i in 0..n {
        let s = length * i as f64 / n as f64;
        while j + 1 < fine && cumulative[j + 1] < s {
            j += 1;
        }
        let span = cumulative[j + 1] - cumulative[j];
        let frac = if span > 0.0 {
            (s - cumulative[j]) / span
        } else {
            0.0
        };
        out.push(shape.point((j as f64 + frac) / fine as f64));
    }
    out
}

/// Greedy size-field sampling of the interior. Also returns the largest
/// boundary distance seen (a lower estimate of the inscribed radius).
fn interior_vertices(
    shape: &ScreenShape,
    target_h: f64,
    grading: f64,
    boundary: &[Point2<f64>],
) -> (Vec<Point2<f64>>, f64) {
    let (lo, hi) = shape.bounding_box();
    let half = 0.5 * (hi.x - lo.x).max(hi.y - lo.y) * 1.01;
    let center = Point2::from((lo.coords + hi.coords) * 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(MESH_SEED);

    // (point, local size)
    let mut candidates: Vec<(Point2<f64>, f64)> = Vec::new();
    let mut depth: f64 = 0.0;
    let mut stack = vec![(center, half)];
    while let Some((c, r)) = stack.pop() {
        let sd = shape.signed_distance(&c);
        depth = depth.max(sd);
        let reach = r * std::f64::consts::SQRT_2;
        if sd < -reach {
            continue;
        }
        let target = size_field(target_h, grading, (sd - reach).max(0.0));
        if 2.0 * r > 0.5 * target {
            let q = 0.5 * r;
            for (dx, dy) in [(-q, -q), (q, -q), (-q, q), (q, q)] {
                stack.push((c + Vector2::new(dx, dy), q));
            }
            continue;
        }
        let jitter = Vector2::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)) * r;
        let p = c + jitter;
        let d = shape.signed_distance(&p);
        if d <= 0.0 {
            continue;
        }
        let size = size_field(target_h, grading, d);
        if d >= CLEARANCE_FACTOR * size {
            candidates.push((p, size));
        }
    }
    candidates.sort_by(|a, b| a.1.total_cmp(&b.1));

    let cell = target_h;
    let key = |p: &Point2<f64>| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<Point2<f64>>> = HashMap::new();
    for p in boundary {
        grid.entry(key(p)).or_default().push(*p);
    }
    let mut accepted = Vec::new();
    for (p, size) in candidates {
        let radius = SPACING_FACTOR * size;
        let (kx, ky) = key(&p);
        let crowded = (-1..=1).any(|dx| {
            (-1..=1).any(|dy| {
                grid.get(&(kx + dx, ky + dy))
                    .is_some_and(|pts| pts.iter().any(|q| (q - p).norm() < radius))
            })
        });
        if !crowded {
            grid.entry((kx, ky)).or_default().push(p);
            accepted.push(p);
        }
    }
    (accepted, depth)
}

fn point_in_polygon(poly: &[Point2<f64>], p: &Point2<f64>) -> bool {
    let n = poly.len();
    let mut inside = false;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Every edge is shared by at most two triangles, with opposite orientation.
fn check_conforming(mesh: &ScreenMesh) -> Result<()> {
    let mut edges: HashMap<(usize, usize), u8> = HashMap::new();
    for tri in &mesh.triangles {
        for k in 0..3 {
            let e = (tri[k], tri[(k + 1) % 3]);
            if edges.insert(e, 1).is_some() {
                return Err(Error::Meshing(format!(
                    "edge {e:?} used twice in one orientation"
                )));
            }
        }
    }
    Ok(())
}
