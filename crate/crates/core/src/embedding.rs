//! The arrangement graph of an intersection matrix, its rotation system,
//! face tracing and genus.
//!
//! Crossings are vertices, the arcs between consecutive crossings along a
//! curve are edges. Each edge `p` of curve `r` runs from row position `p` to
//! position `p + 1` (cyclically) and owns two darts:
//!
//! * `2 * (r * L + p)`: forward, along the curve's orientation;
//! * `2 * (r * L + p) + 1`: backward.
//!
//! Here `L = 2(n - 1)` is the row length. The tail of a dart is the vertex
//! it leaves; reversing a dart flips its low bit.
//!
//! At a crossing where row `i` holds `+j` (curve `j` comes from the left of
//! curve `i`) the counterclockwise order of the four darts leaving the
//! vertex is `(out_i, in_j, in_i, out_j)`, where `out_x` continues along
//! curve `x` and `in_x` points back where curve `x` came from. Seen from row
//! `j`, where the same crossing is recorded as `-i`, the order reads
//! `(out_j, out_i, in_j, in_i)`; both describe one cyclic order.
//!
//! Faces are the orbits of `d -> rot_next(reverse(d))`. Every face walk keeps
//! its face on the right-hand side of each dart, so a forward dart of curve
//! `c` borders a face outside `c` (the interior of a curve is on its left).
//!
//! Since every pair of curves crosses, the graph is connected for `n >= 2`;
//! its embedding is cellular and the genus follows from Euler's formula.
//! A connected graph embedded in the sphere is always cellular, so a matrix
//! is sphere-embeddable exactly when its genus is 0.

use std::collections::VecDeque;
use std::fmt::Write;

use serde::Serialize;

use crate::consistency::PositionIndex;
use crate::matrix::{Cell, IntersectionMatrix, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

/// A position in a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Crossing {
    pub curve: Label,
    pub position: usize,
}

/// A crossing of two curves: `plus` is the row holding `+j`, `minus` the row
/// holding `-i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub plus: Crossing,
    pub minus: Crossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dart {
    pub curve: Label,
    pub edge_index: usize,
    pub direction: Direction,
}

/// One face boundary: darts in traversal order, starting with the smallest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FaceWalk {
    pub darts: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct EmbeddedGraph {
    labels: Vec<Label>,
    row_len: usize,
    /// Vertex id of every row position, indexed `r * L + p`.
    vertex_at: Vec<usize>,
    vertices: Vec<Vertex>,
    /// Counterclockwise order of the darts leaving each vertex.
    rotation: Vec<[usize; 4]>,
    /// Counterclockwise successor of each dart around its tail.
    rot_next: Vec<usize>,
    /// The same orders rebuilt from the `-i` side of each crossing.
    minus_side_rotation: Vec<[usize; 4]>,
}

#[inline]
fn fwd(row_len: usize, r: usize, p: usize) -> usize {
    2 * (r * row_len + p)
}

#[inline]
fn bwd(row_len: usize, r: usize, p: usize) -> usize {
    2 * (r * row_len + p) + 1
}

/// Rotation successor table for `rows`, shared by the graph builder and the
/// allocation-light genus routine.
fn rotation_table(rows: &[Vec<Cell>], index: &PositionIndex, rot_next: &mut Vec<usize>) {
    let n = rows.len();
    let len = 2 * (n - 1);
    rot_next.clear();
    rot_next.resize(2 * n * len, usize::MAX);
    for (i, row) in rows.iter().enumerate() {
        for (p, c) in row.iter().enumerate() {
            if c.is_minus() {
                continue;
            }
            let j = c.index();
            let q = index.get(j, Cell::minus(i));
            let order = [
                fwd(len, i, p),
                bwd(len, j, (q + len - 1) % len),
                bwd(len, i, (p + len - 1) % len),
                fwd(len, j, q),
            ];
            for t in 0..4 {
                rot_next[order[t]] = order[(t + 1) % 4];
            }
        }
    }
}

fn count_faces(rot_next: &[usize], seen: &mut Vec<bool>) -> usize {
    seen.clear();
    seen.resize(rot_next.len(), false);
    let mut faces = 0;
    for start in 0..rot_next.len() {
        if seen[start] {
            continue;
        }
        faces += 1;
        let mut d = start;
        while !seen[d] {
            seen[d] = true;
            d = rot_next[d ^ 1];
        }
    }
    faces
}

/// Vertex, edge and face counts together with the genus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EulerData {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub genus: usize,
}

impl EulerData {
    fn from_counts(vertices: usize, edges: usize, faces: usize) -> EulerData {
        let twice_genus = (2 + edges)
            .checked_sub(vertices + faces)
            .expect("Euler characteristic exceeds 2");
        assert!(twice_genus.is_multiple_of(2), "odd Euler characteristic");
        EulerData {
            vertices,
            edges,
            faces,
            genus: twice_genus / 2,
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.faces as i64
    }
}

/// Genus straight from index rows, reusing caller-owned buffers.
pub(crate) fn rows_genus(rows: &[Vec<Cell>], scratch: &mut GenusScratch) -> usize {
    let n = rows.len();
    if n < 2 {
        return 0;
    }
    let index = PositionIndex::new(rows);
    rotation_table(rows, &index, &mut scratch.rot_next);
    let faces = count_faces(&scratch.rot_next, &mut scratch.seen);
    EulerData::from_counts(n * (n - 1), 2 * n * (n - 1), faces).genus
}

#[derive(Default)]
pub(crate) struct GenusScratch {
    rot_next: Vec<usize>,
    seen: Vec<bool>,
}

impl EmbeddedGraph {
    pub fn build(matrix: &IntersectionMatrix) -> EmbeddedGraph {
        let rows = matrix.cells();
        let n = rows.len();
        let labels = matrix.labels().to_vec();
        if n < 2 {
            return EmbeddedGraph {
                labels,
                row_len: 0,
                vertex_at: Vec::new(),
                vertices: Vec::new(),
                rotation: Vec::new(),
                rot_next: Vec::new(),
                minus_side_rotation: Vec::new(),
            };
        }
        let len = 2 * (n - 1);
        let index = PositionIndex::new(rows);
        let mut vertex_at = vec![usize::MAX; n * len];
        let mut vertices = Vec::with_capacity(n * (n - 1));
        let mut rotation = Vec::with_capacity(n * (n - 1));
        let mut minus_side_rotation = Vec::with_capacity(n * (n - 1));

        for (i, row) in rows.iter().enumerate() {
            for (p, c) in row.iter().enumerate() {
                if c.is_minus() {
                    continue;
                }
                let j = c.index();
                let q = index.get(j, Cell::minus(i));
                assert_eq!(rows[j][q], Cell::minus(i), "unpaired crossing");
                let v = vertices.len();
                vertex_at[i * len + p] = v;
                vertex_at[j * len + q] = v;
                vertices.push(Vertex {
                    plus: Crossing {
                        curve: labels[i],
                        position: p,
                    },
                    minus: Crossing {
                        curve: labels[j],
                        position: q,
                    },
                });
                let (out_i, in_i) = (fwd(len, i, p), bwd(len, i, (p + len - 1) % len));
                let (out_j, in_j) = (fwd(len, j, q), bwd(len, j, (q + len - 1) % len));
                rotation.push([out_i, in_j, in_i, out_j]);
                minus_side_rotation.push([out_j, out_i, in_j, in_i]);
            }
        }

        let mut rot_next = Vec::new();
        rotation_table(rows, &index, &mut rot_next);
        EmbeddedGraph {
            labels,
            row_len: len,
            vertex_at,
            vertices,
            rotation,
            rot_next,
            minus_side_rotation,
        }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.labels.len() * self.row_len
    }

    pub fn dart_count(&self) -> usize {
        2 * self.edge_count()
    }

    /// Counterclockwise dart order at each vertex.
    pub fn rotation(&self) -> &[[usize; 4]] {
        &self.rotation
    }

    /// `true` when the `+j` and `-i` descriptions of every crossing give the
    /// same cyclic order.
    pub fn rotation_descriptions_agree(&self) -> bool {
        self.rotation
            .iter()
            .zip(&self.minus_side_rotation)
            .all(|(a, b)| (0..4).any(|s| (0..4).all(|t| a[(s + t) % 4] == b[t])))
    }

    pub fn dart(&self, d: usize) -> Dart {
        let edge = d / 2;
        Dart {
            curve: self.labels[edge / self.row_len],
            edge_index: edge % self.row_len,
            direction: if d.is_multiple_of(2) {
                Direction::Forward
            } else {
                Direction::Backward
            },
        }
    }

    /// Vertex a dart leaves.
    pub fn tail(&self, d: usize) -> usize {
        let edge = d / 2;
        let (r, p) = (edge / self.row_len, edge % self.row_len);
        let p = if d.is_multiple_of(2) {
            p
        } else {
            (p + 1) % self.row_len
        };
        self.vertex_at[r * self.row_len + p]
    }

    pub fn head(&self, d: usize) -> usize {
        self.tail(d ^ 1)
    }

    /// Next dart of the face walk through `d`.
    pub fn face_successor(&self, d: usize) -> usize {
        self.rot_next[d ^ 1]
    }

    /// Face walks sorted by their smallest dart.
    pub fn trace_faces(&self) -> Vec<FaceWalk> {
        let mut seen = vec![false; self.rot_next.len()];
        let mut faces = Vec::new();
        for start in 0..self.rot_next.len() {
            if seen[start] {
                continue;
            }
            let mut darts = Vec::new();
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                darts.push(d);
                d = self.face_successor(d);
            }
            debug_assert_eq!(d, start);
            faces.push(FaceWalk { darts });
        }
        faces
    }

    pub fn euler(&self) -> EulerData {
        if self.labels.len() < 2 {
            return EulerData {
                vertices: 0,
                edges: 0,
                faces: 0,
                genus: 0,
            };
        }
        let faces = count_faces(&self.rot_next, &mut Vec::new());
        EulerData::from_counts(self.vertex_count(), self.edge_count(), faces)
    }

    /// For every face, whether it lies inside each curve (interior = left
    /// side). `None` if some curve does not separate the surface.
    pub fn face_containment(&self, faces: &[FaceWalk]) -> Option<Vec<Vec<bool>>> {
        let n = self.labels.len();
        if n < 2 {
            return Some(Vec::new());
        }
        let mut face_of = vec![0; self.dart_count()];
        for (f, walk) in faces.iter().enumerate() {
            for d in &walk.darts {
                face_of[*d] = f;
            }
        }
        let curve_of = |d: usize| (d / 2) / self.row_len;
        let mut inside = vec![vec![None; n]; faces.len()];
        #[allow(clippy::needless_range_loop)]
        for c in 0..n {
            let mut queue = VecDeque::new();
            for p in 0..self.row_len {
                for d in [fwd(self.row_len, c, p), bwd(self.row_len, c, p)] {
                    let side = d % 2 == 1;
                    let f = face_of[d];
                    match inside[f][c] {
                        None => {
                            inside[f][c] = Some(side);
                            queue.push_back(f);
                        }
                        Some(s) if s != side => return None,
                        Some(_) => {}
                    }
                }
            }
            while let Some(f) = queue.pop_front() {
                let side = inside[f][c];
                for d in &faces[f].darts {
                    if curve_of(*d) == c {
                        continue;
                    }
                    let g = face_of[*d ^ 1];
                    match inside[g][c] {
                        None => {
                            inside[g][c] = side;
                            queue.push_back(g);
                        }
                        s if s != side => return None,
                        _ => {}
                    }
                }
            }
        }
        inside
            .into_iter()
            .map(|row| row.into_iter().collect::<Option<Vec<bool>>>())
            .collect()
    }

    pub fn to_export(&self) -> GraphExport {
        let faces = self.trace_faces();
        let euler = self.euler();
        GraphExport {
            format: GRAPH_EXPORT_FORMAT,
            labels: self.labels.clone(),
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .map(|(id, v)| VertexExport {
                    id,
                    plus: v.plus,
                    minus: v.minus,
                })
                .collect(),
            darts: (0..self.dart_count())
                .map(|id| {
                    let d = self.dart(id);
                    DartExport {
                        id,
                        curve: d.curve,
                        edge: d.edge_index,
                        direction: d.direction,
                        tail: self.tail(id),
                        head: self.head(id),
                    }
                })
                .collect(),
            rotation: self.rotation.clone(),
            faces: faces.into_iter().map(|f| f.darts).collect(),
            vertex_count: euler.vertices,
            edge_count: euler.edges,
            face_count: euler.faces,
            genus: euler.genus,
        }
    }

    /// Graphviz rendering: one undirected edge per arc, labelled with its
    /// curve and edge index, face walks listed in comments.
    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "// pscirc arrangement graph, format 1");
        let euler = self.euler();
        let _ = writeln!(
            s,
            "// V={} E={} F={} genus={}",
            euler.vertices, euler.edges, euler.faces, euler.genus
        );
        for (f, walk) in self.trace_faces().iter().enumerate() {
            let darts: Vec<String> = walk.darts.iter().map(|d| d.to_string()).collect();
            let _ = writeln!(s, "// face {f}: {}", darts.join(" "));
        }
        let _ = writeln!(s, "graph arrangement {{");
        for (id, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  v{id} [label=\"{}x{}\"];", v.plus.curve, v.minus.curve);
        }
        for e in 0..self.edge_count() {
            let d = 2 * e;
            let dart = self.dart(d);
            let _ = writeln!(
                s,
                "  v{} -- v{} [label=\"{}.{}\"];",
                self.tail(d),
                self.head(d),
                dart.curve,
                dart.edge_index
            );
        }
        s.push_str("}\n");
        s
    }
}

pub const GRAPH_EXPORT_FORMAT: &str = "pscirc-graph/1";

#[derive(Debug, Clone, Serialize)]
pub struct VertexExport {
    pub id: usize,
    pub plus: Crossing,
    pub minus: Crossing,
}

#[derive(Debug, Clone, Serialize)]
pub struct DartExport {
    pub id: usize,
    pub curve: Label,
    pub edge: usize,
    pub direction: Direction,
    pub tail: usize,
    pub head: usize,
}

/// Structured export of the embedded graph. Field names are stable.
#[derive(Debug, Clone, Serialize)]
pub struct GraphExport {
    pub format: &'static str,
    pub labels: Vec<Label>,
    pub vertices: Vec<VertexExport>,
    pub darts: Vec<DartExport>,
    pub rotation: Vec<[usize; 4]>,
    pub faces: Vec<Vec<usize>>,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub face_count: usize,
    pub genus: usize,
}

pub fn build_embedded_graph(matrix: &IntersectionMatrix) -> EmbeddedGraph {
    EmbeddedGraph::build(matrix)
}

pub fn trace_faces(graph: &EmbeddedGraph) -> Vec<FaceWalk> {
    graph.trace_faces()
}

/// Genus of the unique closed orientable surface the arrangement is
/// cellularly embedded in.
pub fn genus(matrix: &IntersectionMatrix) -> usize {
    rows_genus(matrix.cells(), &mut GenusScratch::default())
}

pub fn euler_data(matrix: &IntersectionMatrix) -> EulerData {
    EmbeddedGraph::build(matrix).euler()
}

pub fn is_sphere_embeddable_direct(matrix: &IntersectionMatrix) -> bool {
    genus(matrix) == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_matrix;

    fn m2() -> IntersectionMatrix {
        parse_matrix("n 2\n1: +2 -2\n2: -1 +1").unwrap()
    }

    fn m_delta() -> IntersectionMatrix {
        parse_matrix("n 3\n1: +2 +3 -2 -3\n2: -1 +3 +1 -3\n3: -1 -2 +1 +2").unwrap()
    }

    fn m_bad() -> IntersectionMatrix {
        parse_matrix("n 3\n1: +2 -3 -2 +3\n2: -1 +3 +1 -3\n3: -1 -2 +1 +2").unwrap()
    }

    #[test]
    fn m2_counts() {
        let g = build_embedded_graph(&m2());
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.trace_faces().len(), 4);
        assert_eq!(genus(&m2()), 0);
        assert!(g.rotation().iter().all(|r| {
            let mut s = r.to_vec();
            s.sort_unstable();
            s.dedup();
            s.len() == 4
        }));
    }

    #[test]
    fn delta_counts() {
        let e = euler_data(&m_delta());
        assert_eq!((e.vertices, e.edges, e.faces, e.genus), (6, 12, 8, 0));
        assert!(is_sphere_embeddable_direct(&m_delta()));
    }

    #[test]
    fn m_bad_is_not_on_the_sphere() {
        let e = euler_data(&m_bad());
        assert!(e.genus >= 1);
        assert!(!is_sphere_embeddable_direct(&m_bad()));
    }

    #[test]
    fn darts_partition_into_faces() {
        let g = build_embedded_graph(&m_delta());
        let faces = g.trace_faces();
        let mut all: Vec<usize> = faces.iter().flat_map(|f| f.darts.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..g.dart_count()).collect::<Vec<_>>());
        for w in faces.windows(2) {
            assert!(w[0].darts[0] < w[1].darts[0]);
        }
        for f in &faces {
            assert_eq!(f.darts[0], *f.darts.iter().min().unwrap());
        }
    }

    #[test]
    fn descriptions_agree_and_tails_match() {
        let g = build_embedded_graph(&m_delta());
        assert!(g.rotation_descriptions_agree());
        for (v, rot) in g.rotation().iter().enumerate() {
            for d in rot {
                assert_eq!(g.tail(*d), v);
            }
        }
    }

    #[test]
    fn delta_faces_have_distinct_containment() {
        let g = build_embedded_graph(&m_delta());
        let faces = g.trace_faces();
        let mut sets = g.face_containment(&faces).unwrap();
        sets.sort();
        sets.dedup();
        assert_eq!(sets.len(), 8);
    }

    #[test]
    fn single_curve_is_degenerate() {
        let m = parse_matrix("n 1\n1:").unwrap();
        assert_eq!(genus(&m), 0);
        assert!(build_embedded_graph(&m).trace_faces().is_empty());
    }

    #[test]
    fn exports_are_stable() {
        let g = build_embedded_graph(&m2());
        let json = serde_json::to_value(g.to_export()).unwrap();
        assert_eq!(json["format"], GRAPH_EXPORT_FORMAT);
        assert_eq!(json["faces"].as_array().unwrap().len(), 4);
        assert_eq!(json["darts"][1]["direction"], "backward");
        let dot = g.to_dot();
        assert!(dot.contains("graph arrangement {"));
        assert_eq!(dot.matches(" -- ").count(), 4);
    }
}
