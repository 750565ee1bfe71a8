//! Generators for the graph families used in experiments and tests.
//!
//! Every generator returns a validated [`RotationGraph`]; annulus-shaped
//! families are built from a straight-line drawing on concentric circles and
//! the rotations are read off the drawing.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{rotation_from_drawing, GraphError, RotationGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solid {
    Tetrahedron,
    Cube,
    Octahedron,
    Dodecahedron,
    Icosahedron,
}

impl Solid {
    pub const ALL: [Solid; 5] = [
        Solid::Tetrahedron,
        Solid::Cube,
        Solid::Octahedron,
        Solid::Dodecahedron,
        Solid::Icosahedron,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Solid::Tetrahedron => "tetrahedron",
            Solid::Cube => "cube",
            Solid::Octahedron => "octahedron",
            Solid::Dodecahedron => "dodecahedron",
            Solid::Icosahedron => "icosahedron",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// Parameters of a generated graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    /// Triangular grid wrapped into a cylinder: `rows` concentric cycles of
    /// length `cols`, consecutive cycles joined by a zigzag of triangles.
    /// Ranges: `rows >= 2`, `cols >= 3`.
    WrappedTriGrid { rows: usize, cols: usize },
    /// K4 followed by `n - 4` insertions of a vertex into a uniformly chosen
    /// face. Range: `n >= 4`.
    StackedTriangulation { n: usize, seed: u64 },
    Platonic { solid: Solid },
    /// Prism-like grid `C_cols x P_rows` with quadrilateral faces.
    /// Ranges: `rows >= 2`, `cols >= 4`.
    QuadGrid { rows: usize, cols: usize },
    /// Cubic graph with two pentagonal caps separated by `layers` zigzag
    /// rings of hexagons; `layers = 1` is the dodecahedron. Range: `layers >= 1`.
    Pentagonal { layers: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("generated graph failed validation: {0}")]
    Invalid(#[from] GraphError),
}

impl FamilySpec {
    pub fn label(&self) -> String {
        match self {
            FamilySpec::WrappedTriGrid { rows, cols } => format!("wrapped_tri_grid({rows},{cols})"),
            FamilySpec::StackedTriangulation { n, seed } => {
                format!("stacked_triangulation({n},seed={seed})")
            }
            FamilySpec::Platonic { solid } => solid.name().to_string(),
            FamilySpec::QuadGrid { rows, cols } => format!("quad_grid({rows},{cols})"),
            FamilySpec::Pentagonal { layers } => format!("pentagonal({layers})"),
        }
    }
}

pub fn generate(spec: &FamilySpec) -> Result<RotationGraph, FamilyError> {
    match *spec {
        FamilySpec::WrappedTriGrid { rows, cols } => wrapped_tri_grid(rows, cols),
        FamilySpec::StackedTriangulation { n, seed } => stacked_triangulation(n, seed),
        FamilySpec::Platonic { solid } => Ok(platonic(solid)),
        FamilySpec::QuadGrid { rows, cols } => quad_grid(rows, cols),
        FamilySpec::Pentagonal { layers } => pentagonal(layers),
    }
}

fn ring_position(radius: f64, index: usize, count: usize) -> (f64, f64) {
    let t = TAU * index as f64 / count as f64;
    (radius * t.cos(), radius * t.sin())
}

pub fn wrapped_tri_grid(rows: usize, cols: usize) -> Result<RotationGraph, FamilyError> {
    if rows < 2 || cols < 3 {
        return Err(FamilyError::OutOfRange(format!(
            "wrapped_tri_grid needs rows >= 2 and cols >= 3, got ({rows},{cols})"
        )));
    }
    let id = |y: usize, x: usize| y * cols + x % cols;
    let mut pos = Vec::with_capacity(rows * cols);
    for y in 0..rows {
        for x in 0..cols {
            pos.push(ring_position(1.0 + y as f64, x, cols));
        }
    }
    let mut edges = Vec::new();
    for y in 0..rows {
        for x in 0..cols {
            edges.push((id(y, x), id(y, x + 1)));
            if y + 1 < rows {
                edges.push((id(y, x), id(y + 1, x)));
                edges.push((id(y, x), id(y + 1, x + 1)));
            }
        }
    }
    Ok(RotationGraph::new(rotation_from_drawing(&pos, &edges))?)
}

pub fn quad_grid(rows: usize, cols: usize) -> Result<RotationGraph, FamilyError> {
    if rows < 2 || cols < 4 {
        return Err(FamilyError::OutOfRange(format!(
            "quad_grid needs rows >= 2 and cols >= 4, got ({rows},{cols})"
        )));
    }
    let id = |y: usize, x: usize| y * cols + x % cols;
    let mut pos = Vec::with_capacity(rows * cols);
    for y in 0..rows {
        for x in 0..cols {
            pos.push(ring_position(1.0 + y as f64, x, cols));
        }
    }
    let mut edges = Vec::new();
    for y in 0..rows {
        for x in 0..cols {
            edges.push((id(y, x), id(y, x + 1)));
            if y + 1 < rows {
                edges.push((id(y, x), id(y + 1, x)));
            }
        }
    }
    Ok(RotationGraph::new(rotation_from_drawing(&pos, &edges))?)
}

pub fn pentagonal(layers: usize) -> Result<RotationGraph, FamilyError> {
    if layers < 1 {
        return Err(FamilyError::OutOfRange("pentagonal needs layers >= 1".into()));
    }
    // Inner pentagon, `layers` rings of ten, outer pentagon.
    let ring = |t: usize, x: usize| 5 + 10 * (t - 1) + x % 10;
    let outer = |s: usize| 5 + 10 * layers + s % 5;
    let n = 10 + 10 * layers;
    let mut pos = vec![(0.0, 0.0); n];
    for s in 0..5 {
        pos[s] = ring_position(1.0, 2 * s, 10);
    }
    for t in 1..=layers {
        for x in 0..10 {
            pos[ring(t, x)] = ring_position(1.0 + t as f64, x, 10);
        }
    }
    // Ring t sends rungs outward from the indices of parity t % 2.
    let up = |t: usize| t % 2;
    for s in 0..5 {
        pos[outer(s)] = ring_position(2.0 + layers as f64, 2 * s + up(layers), 10);
    }
    let mut edges = Vec::new();
    for s in 0..5 {
        edges.push((s, (s + 1) % 5));
        edges.push((s, ring(1, 2 * s)));
        edges.push((outer(s), outer(s + 1)));
        edges.push((ring(layers, 2 * s + up(layers)), outer(s)));
    }
    for t in 1..=layers {
        for x in 0..10 {
            edges.push((ring(t, x), ring(t, x + 1)));
            if t < layers && x % 2 == up(t) {
                edges.push((ring(t, x), ring(t + 1, x)));
            }
        }
    }
    Ok(RotationGraph::new(rotation_from_drawing(&pos, &edges))?)
}

pub fn stacked_triangulation(n: usize, seed: u64) -> Result<RotationGraph, FamilyError> {
    if n < 4 {
        return Err(FamilyError::OutOfRange(format!(
            "stacked_triangulation needs n >= 4, got {n}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = platonic(Solid::Tetrahedron);
    for v in 4..n {
        let faces = g.trace_faces();
        let f = &faces.faces[rng.gen_range(0..faces.len())];
        let (a, b, c) = (f[0], f[1], f[2]);
        // The walk a -> b -> c means b follows c around a, c follows a
        // around b and a follows b around c; v goes into each of those gaps.
        let mut rot = g.rotations().to_vec();
        insert_after(&mut rot[a], c, v);
        insert_after(&mut rot[b], a, v);
        insert_after(&mut rot[c], b, v);
        rot.push(vec![a, c, b]);
        g = RotationGraph::new(rot)?;
    }
    Ok(g)
}

fn insert_after(list: &mut Vec<usize>, after: usize, v: usize) {
    let p = list.iter().position(|&w| w == after).expect("face vertex adjacent");
    list.insert(p + 1, v);
}

type Point3 = [f64; 3];

fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn solid_vertices(solid: Solid) -> Vec<Point3> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let signs = [1.0, -1.0];
    let mut pts = Vec::new();
    match solid {
        Solid::Tetrahedron => {
            pts = vec![
                [1.0, 1.0, 1.0],
                [1.0, -1.0, -1.0],
                [-1.0, 1.0, -1.0],
                [-1.0, -1.0, 1.0],
            ]
        }
        Solid::Cube => {
            for x in signs {
                for y in signs {
                    for z in signs {
                        pts.push([x, y, z]);
                    }
                }
            }
        }
        Solid::Octahedron => {
            for axis in 0..3 {
                for s in signs {
                    let mut p = [0.0; 3];
                    p[axis] = s;
                    pts.push(p);
                }
            }
        }
        Solid::Icosahedron => {
            for a in signs {
                for b in signs {
                    let base = [0.0, a, b * phi];
                    for shift in 0..3 {
                        pts.push([base[shift % 3], base[(shift + 1) % 3], base[(shift + 2) % 3]]);
                    }
                }
            }
        }
        Solid::Dodecahedron => {
            for x in signs {
                for y in signs {
                    for z in signs {
                        pts.push([x, y, z]);
                    }
                }
            }
            for a in signs {
                for b in signs {
                    let base = [0.0, a / phi, b * phi];
                    for shift in 0..3 {
                        pts.push([base[shift % 3], base[(shift + 1) % 3], base[(shift + 2) % 3]]);
                    }
                }
            }
        }
    }
    pts
}

/// Platonic solid with rotations read ccw as seen from outside.
pub fn platonic(solid: Solid) -> RotationGraph {
    let pts = solid_vertices(solid);
    let n = pts.len();
    let dist = |a: Point3, b: Point3| dot(sub(a, b), sub(a, b)).sqrt();
    let mut shortest = f64::INFINITY;
    for u in 0..n {
        for v in u + 1..n {
            shortest = shortest.min(dist(pts[u], pts[v]));
        }
    }
    let mut rot = vec![Vec::new(); n];
    for u in 0..n {
        for v in 0..n {
            if u != v && dist(pts[u], pts[v]) < shortest * (1.0 + 1e-9) {
                rot[u].push(v);
            }
        }
    }
    for (u, nbs) in rot.iter_mut().enumerate() {
        let normal = pts[u];
        let helper = if normal[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let e1 = cross(normal, helper);
        let e2 = cross(normal, e1);
        let angle = |w: usize| {
            let d = sub(pts[w], pts[u]);
            dot(d, e2).atan2(dot(d, e1))
        };
        nbs.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
    }
    RotationGraph::new(rot).expect("platonic solids are valid embeddings")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Adjacency;

    #[test]
    fn platonic_parameters() {
        let expect = [(4, 6, 3), (8, 12, 4), (6, 12, 3), (20, 30, 5), (12, 30, 3)];
        for (solid, (n, m, face)) in Solid::ALL.into_iter().zip(expect) {
            let g = platonic(solid);
            assert_eq!((g.n(), g.m()), (n, m), "{}", solid.name());
            assert!(g.trace_faces().sizes.iter().all(|&s| s == face));
        }
    }

    #[test]
    fn wrapped_grid_2x5_matches_hand_edge_set() {
        let g = wrapped_tri_grid(2, 5).unwrap();
        let mut expected = Vec::new();
        for x in 0..5 {
            let nx = (x + 1) % 5;
            expected.push((x.min(nx), x.max(nx)));
            expected.push((5 + x.min(nx), 5 + x.max(nx)));
            expected.push((x, 5 + x));
            expected.push((x, 5 + nx));
        }
        expected.sort_unstable();
        assert_eq!(g.edges(), expected);
        let faces = g.trace_faces();
        assert_eq!(faces.len(), 12);
        assert_eq!(faces.sizes.iter().filter(|&&s| s == 3).count(), 10);
    }

    #[test]
    fn quad_grid_2x4_is_the_cube() {
        let g = quad_grid(2, 4).unwrap();
        assert_eq!((g.n(), g.m()), (8, 12));
        assert!(g.trace_faces().sizes.iter().all(|&s| s == 4));
        assert!(g.classify().is_3connected);
    }

    #[test]
    fn pentagonal_layers() {
        for layers in 1..5 {
            let g = pentagonal(layers).unwrap();
            assert_eq!(g.n(), 10 + 10 * layers);
            assert!(g.degree_sequence().iter().all(|&d| d == 3));
            let sizes = g.trace_faces().sizes;
            assert_eq!(sizes.iter().filter(|&&s| s == 5).count(), 12);
            assert_eq!(sizes.iter().filter(|&&s| s == 6).count(), 5 * (layers - 1));
        }
    }

    #[test]
    fn stacked_is_a_reproducible_triangulation() {
        let g = stacked_triangulation(10, 1).unwrap();
        assert_eq!((g.n(), g.m()), (10, 24));
        assert!(g.classify().is_triangulation);
        assert_eq!(g, stacked_triangulation(10, 1).unwrap());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(wrapped_tri_grid(1, 5).is_err());
        assert!(quad_grid(2, 3).is_err());
        assert!(stacked_triangulation(3, 0).is_err());
        assert!(pentagonal(0).is_err());
    }

    #[test]
    fn spec_serde_round_trip() {
        let spec = FamilySpec::WrappedTriGrid { rows: 3, cols: 7 };
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"kind":"wrapped_tri_grid","rows":3,"cols":7}"#);
        assert_eq!(serde_json::from_str::<FamilySpec>(&json).unwrap(), spec);
    }
}
