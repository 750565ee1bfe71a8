//! Planar graphs given as rotation systems.
//!
//! A [`RotationGraph`] stores, for every vertex, its neighbours in
//! counter-clockwise order. Faces are traced with the usual rule: after the
//! directed edge `u -> v` the walk continues with `v -> succ_v(u)`, where
//! `succ_v(u)` is the neighbour following `u` in the rotation of `v`.
//!
//! The `.rot` text format is
//!
//! ```text
//! # optional comments
//! #@label 0 north-pole        (optional vertex names)
//! 4 6                         (header: n m)
//! 0: 1 2 3                    (one line per vertex, neighbours ccw)
//! 1: 0 3 2
//! 2: 0 1 3
//! 3: 0 2 1
//! ```

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph has no vertices")]
    Empty,
    #[error("vertex {vertex}: neighbour {neighbor} out of range")]
    OutOfRange { vertex: usize, neighbor: usize },
    #[error("vertex {vertex}: self-loop")]
    SelfLoop { vertex: usize },
    #[error("vertex {vertex}: neighbour {neighbor} listed more than once")]
    DuplicateNeighbor { vertex: usize, neighbor: usize },
    #[error("adjacency not symmetric: {u} lists {v} but {v} does not list {u}")]
    Asymmetric { u: usize, v: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("Euler formula violated: n - m + F = {n} - {m} + {faces} != 2")]
    Euler { n: usize, m: usize, faces: usize },
    #[error("header declares {declared} {what} but the body has {found}")]
    HeaderMismatch {
        what: &'static str,
        declared: usize,
        found: usize,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Read access to an undirected simple graph.
pub trait Adjacency {
    fn vertex_count(&self) -> usize;
    fn neighbors(&self, v: usize) -> &[usize];

    fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    fn edge_count(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).contains(&v)
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.vertex_count() {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn is_connected(&self) -> bool {
        self.connected_without(&[])
    }

    /// Whether the graph stays connected after deleting `removed`.
    fn connected_without(&self, removed: &[usize]) -> bool {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        for &r in removed {
            seen[r] = true;
        }
        let Some(start) = (0..n).find(|&v| !seen[v]) else {
            return true;
        };
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        reached + removed.len() == n
    }
}

fn check_lists(lists: &[Vec<usize>]) -> Result<(), GraphError> {
    let n = lists.len();
    if n == 0 {
        return Err(GraphError::Empty);
    }
    for (v, nbs) in lists.iter().enumerate() {
        let mut seen = std::collections::HashSet::with_capacity(nbs.len());
        for &w in nbs {
            if w >= n {
                return Err(GraphError::OutOfRange {
                    vertex: v,
                    neighbor: w,
                });
            }
            if w == v {
                return Err(GraphError::SelfLoop { vertex: v });
            }
            if !seen.insert(w) {
                return Err(GraphError::DuplicateNeighbor {
                    vertex: v,
                    neighbor: w,
                });
            }
        }
    }
    for (v, nbs) in lists.iter().enumerate() {
        for &w in nbs {
            if !lists[w].contains(&v) {
                return Err(GraphError::Asymmetric { u: v, v: w });
            }
        }
    }
    Ok(())
}

/// Simple undirected graph without an embedding. Neighbour lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange {
                    vertex: u.min(v),
                    neighbor: u.max(v),
                });
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        check_lists(&adj)?;
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self { adj })
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::from_edges(n, &edges).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        Self::from_edges(n, &edges).expect("cycle is simple for n >= 3")
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Self::from_edges(n, &edges).expect("complete graph is simple")
    }

    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Self::from_edges(leaves + 1, &edges).expect("star is simple")
    }
}

impl Adjacency for SimpleGraph {
    fn vertex_count(&self) -> usize {
        self.adj.len()
    }
    fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }
}

/// The faces of an embedded graph, each stored as the cyclic vertex sequence
/// of its boundary walk (consecutive entries are directed edges).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceList {
    pub faces: Vec<Vec<usize>>,
    pub sizes: Vec<usize>,
}

impl FaceList {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Directed edges of face `f` in walk order.
    pub fn darts(&self, f: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let face = &self.faces[f];
        (0..face.len()).map(move |k| (face[k], face[(k + 1) % face.len()]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub n: usize,
    pub m: usize,
    pub face_count: usize,
    pub is_triangulation: bool,
    pub is_3connected: bool,
    pub min_face: usize,
    pub degree_sequence: Vec<usize>,
}

/// A connected plane graph given by counter-clockwise rotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationGraph {
    rotation: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
    // For each vertex: (neighbour, position in rotation), sorted by neighbour.
    index: Vec<Vec<(usize, usize)>>,
}

impl RotationGraph {
    /// Builds and validates a rotation system.
    pub fn new(rotation: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        check_lists(&rotation)?;
        let index = rotation
            .iter()
            .map(|nbs| {
                let mut idx: Vec<(usize, usize)> =
                    nbs.iter().enumerate().map(|(p, &w)| (w, p)).collect();
                idx.sort_unstable();
                idx
            })
            .collect();
        let g = Self {
            rotation,
            labels: None,
            index,
        };
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        let faces = g.trace_faces();
        let (n, m) = (g.n(), g.m());
        let f = faces.len().max(1);
        if n + f != m + 2 {
            return Err(GraphError::Euler {
                n,
                m,
                faces: faces.len(),
            });
        }
        Ok(g)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.n() {
            return Err(GraphError::Invalid(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.n()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.rotation.len()
    }

    pub fn m(&self) -> usize {
        self.edge_count()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn rotations(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    /// Position of `u` in the rotation of `v`.
    pub fn position(&self, v: usize, u: usize) -> Option<usize> {
        let idx = &self.index[v];
        idx.binary_search_by_key(&u, |&(w, _)| w)
            .ok()
            .map(|k| idx[k].1)
    }

    /// The neighbour after `u` in the ccw rotation of `v`.
    pub fn succ(&self, v: usize, u: usize) -> usize {
        let p = self.position(v, u).expect("succ: not adjacent");
        let rot = &self.rotation[v];
        rot[(p + 1) % rot.len()]
    }

    /// The neighbour before `u` in the ccw rotation of `v`.
    pub fn pred(&self, v: usize, u: usize) -> usize {
        let p = self.position(v, u).expect("pred: not adjacent");
        let rot = &self.rotation[v];
        rot[(p + rot.len() - 1) % rot.len()]
    }

    /// Rotation of `v` read ccw starting at `start`.
    pub fn rotation_from(&self, v: usize, start: usize) -> impl Iterator<Item = usize> + '_ {
        let p = self.position(v, start).expect("rotation_from: not adjacent");
        let rot = &self.rotation[v];
        (0..rot.len()).map(move |k| rot[(p + k) % rot.len()])
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        self.rotation.iter().map(Vec::len).collect()
    }

    /// The mirror embedding (every rotation reversed).
    pub fn reversed(&self) -> Self {
        let rotation = self
            .rotation
            .iter()
            .map(|r| r.iter().rev().copied().collect())
            .collect();
        let mut g = Self::new(rotation).expect("mirror of a valid embedding is valid");
        g.labels = self.labels.clone();
        g
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self, GraphError> {
        let n = self.n();
        if perm.len() != n {
            return Err(GraphError::Invalid("permutation length mismatch".into()));
        }
        let mut rotation = vec![Vec::new(); n];
        for v in 0..n {
            rotation[perm[v]] = self.rotation[v].iter().map(|&w| perm[w]).collect();
        }
        Self::new(rotation)
    }

    pub fn trace_faces(&self) -> FaceList {
        let n = self.n();
        let mut visited: Vec<Vec<bool>> = self.rotation.iter().map(|r| vec![false; r.len()]).collect();
        let mut faces = Vec::new();
        for u0 in 0..n {
            for p0 in 0..self.rotation[u0].len() {
                if visited[u0][p0] {
                    continue;
                }
                let mut face = Vec::new();
                let (mut u, mut p) = (u0, p0);
                while !visited[u][p] {
                    visited[u][p] = true;
                    face.push(u);
                    let v = self.rotation[u][p];
                    let back = self.position(v, u).expect("symmetric adjacency");
                    let q = (back + 1) % self.rotation[v].len();
                    u = v;
                    p = q;
                }
                faces.push(face);
            }
        }
        let sizes = faces.iter().map(Vec::len).collect();
        FaceList { faces, sizes }
    }

    pub fn is_3connected(&self) -> bool {
        let n = self.n();
        if n < 4 {
            return false;
        }
        for x in 0..n {
            if !self.connected_without(&[x]) {
                return false;
            }
            for y in x + 1..n {
                if !self.connected_without(&[x, y]) {
                    return false;
                }
            }
        }
        true
    }

    pub fn classify(&self) -> Classification {
        let faces = self.trace_faces();
        let min_face = faces.sizes.iter().copied().min().unwrap_or(0);
        Classification {
            n: self.n(),
            m: self.m(),
            face_count: faces.len(),
            is_triangulation: !faces.is_empty() && faces.sizes.iter().all(|&s| s == 3),
            is_3connected: self.is_3connected(),
            min_face,
            degree_sequence: self.degree_sequence(),
        }
    }

    /// Serialises to the `.rot` format.
    pub fn to_rot_string(&self) -> String {
        let mut out = String::new();
        if let Some(labels) = &self.labels {
            for (v, l) in labels.iter().enumerate() {
                let _ = writeln!(out, "#@label {v} {l}");
            }
        }
        let _ = writeln!(out, "{} {}", self.n(), self.m());
        for (v, rot) in self.rotation.iter().enumerate() {
            let _ = write!(out, "{v}:");
            for w in rot {
                let _ = write!(out, " {w}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut rotation: Vec<Option<Vec<usize>>> = Vec::new();
        let mut labels: Vec<(usize, usize, String)> = Vec::new();
        let perr = |line: usize, message: String| GraphError::Parse { line, message };

        for (k, raw) in text.lines().enumerate() {
            let lineno = k + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("#@label") {
                let rest = rest.trim();
                let (id, name) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| perr(lineno, "label line needs `id name`".into()))?;
                let id = id
                    .parse::<usize>()
                    .map_err(|_| perr(lineno, format!("bad label vertex id `{id}`")))?;
                labels.push((lineno, id, name.trim().to_string()));
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            match header {
                None => {
                    let parts: Vec<&str> = line.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(perr(lineno, "expected header `n m`".into()));
                    }
                    let n = parts[0]
                        .parse()
                        .map_err(|_| perr(lineno, format!("bad vertex count `{}`", parts[0])))?;
                    let m = parts[1]
                        .parse()
                        .map_err(|_| perr(lineno, format!("bad edge count `{}`", parts[1])))?;
                    header = Some((n, m));
                    rotation = vec![None; n];
                }
                Some((n, _)) => {
                    let (id, rest) = line
                        .split_once(':')
                        .ok_or_else(|| perr(lineno, "expected `id: neighbours`".into()))?;
                    let id: usize = id
                        .trim()
                        .parse()
                        .map_err(|_| perr(lineno, format!("bad vertex id `{}`", id.trim())))?;
                    if id >= n {
                        return Err(perr(lineno, format!("vertex id {id} >= n = {n}")));
                    }
                    if rotation[id].is_some() {
                        return Err(perr(lineno, format!("vertex {id} listed twice")));
                    }
                    let nbs = rest
                        .split_whitespace()
                        .map(|t| {
                            t.parse::<usize>()
                                .map_err(|_| perr(lineno, format!("bad neighbour `{t}`")))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    rotation[id] = Some(nbs);
                }
            }
        }
        let (n, m) = header.ok_or_else(|| perr(0, "missing header line".into()))?;
        let found = rotation.iter().filter(|r| r.is_some()).count();
        if found != n {
            let missing = rotation.iter().position(Option::is_none).unwrap_or(0);
            return Err(perr(0, format!("no rotation line for vertex {missing}")));
        }
        let rotation: Vec<Vec<usize>> = rotation.into_iter().map(Option::unwrap).collect();
        let degree_sum: usize = rotation.iter().map(Vec::len).sum::<usize>();
        let g = Self::new(rotation)?;
        if degree_sum / 2 != m {
            return Err(GraphError::HeaderMismatch {
                what: "edges",
                declared: m,
                found: degree_sum / 2,
            });
        }
        if labels.is_empty() {
            return Ok(g);
        }
        let mut names = vec![String::new(); n];
        for (lineno, id, name) in labels {
            if id >= n {
                return Err(perr(lineno, format!("label for vertex {id} >= n = {n}")));
            }
            names[id] = name;
        }
        g.with_labels(names)
    }
}

impl FromStr for RotationGraph {
    type Err = GraphError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl Adjacency for RotationGraph {
    fn vertex_count(&self) -> usize {
        self.rotation.len()
    }
    fn neighbors(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }
}

/// Ccw rotation system from a straight-line drawing.
pub(crate) fn rotation_from_drawing(pos: &[(f64, f64)], edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut rot = vec![Vec::new(); pos.len()];
    for &(u, v) in edges {
        rot[u].push(v);
        rot[v].push(u);
    }
    for (u, nbs) in rot.iter_mut().enumerate() {
        let (x, y) = pos[u];
        nbs.sort_by(|&a, &b| {
            let ta = (pos[a].1 - y).atan2(pos[a].0 - x);
            let tb = (pos[b].1 - y).atan2(pos[b].0 - x);
            ta.total_cmp(&tb)
        });
    }
    rot
}

#[cfg(test)]
mod tests {
    use super::*;

    const K4: &str = "# tetrahedron\n4 6\n0: 1 2 3\n1: 0 3 2\n2: 0 1 3\n3: 0 2 1\n";

    #[test]
    fn parses_k4() {
        let g: RotationGraph = K4.parse().unwrap();
        assert_eq!((g.n(), g.m(), g.trace_faces().len()), (4, 6, 4));
        assert!(g.trace_faces().sizes.iter().all(|&s| s == 3));
    }

    #[test]
    fn parses_triangle() {
        let g = RotationGraph::parse("3 3\n0: 1 2\n1: 2 0\n2: 0 1\n").unwrap();
        assert_eq!((g.n(), g.m(), g.trace_faces().len()), (3, 3, 2));
    }

    #[test]
    fn rejects_duplicate_neighbour() {
        let err = RotationGraph::parse("2 1\n0: 1 1\n1: 0\n").unwrap_err();
        assert_eq!(err, GraphError::DuplicateNeighbor { vertex: 0, neighbor: 1 });
    }

    #[test]
    fn rejects_malformed_and_asymmetric_input() {
        assert!(matches!(
            RotationGraph::parse("3 2\n0: 1\n1 0 2\n2: 1\n"),
            Err(GraphError::Parse { line: 3, .. })
        ));
        assert_eq!(
            RotationGraph::parse("3 2\n0: 1\n1: 0 2\n2:\n").unwrap_err(),
            GraphError::Asymmetric { u: 1, v: 2 }
        );
        assert!(matches!(
            RotationGraph::parse("3 3\n0: 1 2\n1: 0\n2: 0\n"),
            Err(GraphError::HeaderMismatch { .. })
        ));
    }

    #[test]
    fn rejects_non_planar_rotation() {
        // K4 with one rotation flipped: traces 2 faces instead of 4.
        let err = RotationGraph::parse("4 6\n0: 1 3 2\n1: 0 3 2\n2: 0 1 3\n3: 0 2 1\n").unwrap_err();
        assert!(matches!(err, GraphError::Euler { .. }));
    }

    #[test]
    fn rejects_disconnected() {
        let err = RotationGraph::parse("4 2\n0: 1\n1: 0\n2: 3\n3: 2\n").unwrap_err();
        assert_eq!(err, GraphError::Disconnected);
    }

    #[test]
    fn round_trip_with_labels() {
        let text = "#@label 0 apex\n#@label 1 b\n#@label 2 c\n#@label 3 d\n".to_string() + K4;
        let g = RotationGraph::parse(&text).unwrap();
        let again = RotationGraph::parse(&g.to_rot_string()).unwrap();
        assert_eq!(g, again);
        assert_eq!(again.labels().unwrap()[0], "apex");
    }

    #[test]
    fn classify_path_is_not_3connected() {
        let g = RotationGraph::parse("3 2\n0: 1\n1: 0 2\n2: 1\n").unwrap();
        let c = g.classify();
        assert!(!c.is_3connected);
        assert_eq!(c.face_count, 1);
        assert_eq!(c.degree_sequence, vec![1, 2, 1]);
    }

    #[test]
    fn succ_and_pred_are_inverse() {
        let g: RotationGraph = K4.parse().unwrap();
        for v in 0..4 {
            for &u in g.rotation(v) {
                assert_eq!(g.pred(v, g.succ(v, u)), u);
            }
        }
    }

    #[test]
    fn simple_graph_rejects_loops() {
        assert_eq!(
            SimpleGraph::from_edges(2, &[(1, 1)]).unwrap_err(),
            GraphError::SelfLoop { vertex: 1 }
        );
        assert!(SimpleGraph::from_edges(2, &[(0, 1), (1, 0)]).is_err());
    }
}
