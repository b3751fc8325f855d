//! Combinatorial embeddings given as rotation systems, with faces derived by
//! face tracing.
//!
//! Darts are directed edges `(u, v)`. The face successor of `(u, v)` is
//! `(v, w)` where `w` follows `u` in the cyclic rotation at `v`. Every dart
//! lies on exactly one face walk, so `sum of face degrees = 2|E|`.
//!
//! Incidences are counted with walk multiplicity: the corner of `v` that
//! precedes the dart `(v, w)` belongs to the face of that dart, so a vertex of
//! degree `d >= 1` has exactly `d` face incidences.

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;

pub type FaceId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("rotation has {got} entries but the graph has {expected} vertices")]
    VertexCountMismatch { expected: usize, got: usize },
    #[error("rotation at vertex {0} is not a permutation of its neighbors")]
    NotAPermutation(usize),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("rotation system has positive genus on the component containing vertex {vertex} (n - m + f = {euler})")]
    NotPlanarEmbedding { vertex: usize, euler: i64 },
    #[error("invalid face id {0}")]
    InvalidFaceId(FaceId),
}

/// One face of an embedding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    pub id: FaceId,
    /// Vertices along the boundary walk; dart `i` is `walk[i] -> walk[i + 1]`
    /// (cyclically). An isolated vertex has a single face with `walk = [v]`
    /// and degree 0.
    pub walk: Vec<usize>,
    pub degree: usize,
    /// Distinct boundary vertices, sorted.
    members: Vec<usize>,
}

impl Face {
    pub fn darts(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let len = if self.degree == 0 { 0 } else { self.walk.len() };
        (0..len).map(move |i| (self.walk[i], self.walk[(i + 1) % len]))
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Number of occurrences of `v` on the boundary walk.
    pub fn multiplicity(&self, v: usize) -> usize {
        if self.degree == 0 {
            return usize::from(self.walk[0] == v);
        }
        self.walk.iter().filter(|&&w| w == v).count()
    }

    /// The boundary walk is a simple cycle (no repeated vertex, length >= 3).
    pub fn is_simple_cycle(&self) -> bool {
        self.degree >= 3 && self.members.len() == self.degree
    }

    /// The walk rotated to start at its lexicographically smallest rotation.
    pub fn canonical_walk(&self) -> Vec<usize> {
        let len = self.walk.len();
        (0..len)
            .map(|s| (0..len).map(|i| self.walk[(s + i) % len]).collect::<Vec<_>>())
            .min()
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    rotation: Vec<Vec<usize>>,
    /// `slot[v]` is `(neighbor, index in rotation[v])`, sorted by neighbor.
    slot: Vec<Vec<(usize, usize)>>,
    offset: Vec<usize>,
    dart_face: Vec<FaceId>,
    faces: Vec<Face>,
    isolated_face: Vec<Option<FaceId>>,
    component: Vec<usize>,
    component_count: usize,
}

impl Embedding {
    /// Builds an embedding of a possibly disconnected graph, checking Euler's
    /// formula on every component.
    pub fn new(g: &Graph, rotation: Vec<Vec<usize>>) -> Result<Self, EmbeddingError> {
        if rotation.len() != g.n() {
            return Err(EmbeddingError::VertexCountMismatch { expected: g.n(), got: rotation.len() });
        }
        let mut slot = Vec::with_capacity(g.n());
        for (v, rot) in rotation.iter().enumerate() {
            let mut s: Vec<(usize, usize)> = rot.iter().enumerate().map(|(i, &w)| (w, i)).collect();
            s.sort_unstable();
            if s.len() != g.degree(v) || s.iter().zip(g.neighbors(v)).any(|(a, &b)| a.0 != b) {
                return Err(EmbeddingError::NotAPermutation(v));
            }
            slot.push(s);
        }
        let mut offset = Vec::with_capacity(g.n() + 1);
        let mut total = 0;
        for rot in &rotation {
            offset.push(total);
            total += rot.len();
        }
        offset.push(total);

        let (component, component_count) = g.components();
        let mut emb = Embedding {
            rotation,
            slot,
            offset,
            dart_face: vec![usize::MAX; total],
            faces: Vec::new(),
            isolated_face: vec![None; g.n()],
            component,
            component_count,
        };
        emb.trace_faces();
        emb.check_euler(g)?;
        Ok(emb)
    }

    fn dart_index(&self, u: usize, v: usize) -> usize {
        let i = self.slot[u]
            .binary_search_by_key(&v, |&(w, _)| w)
            .map(|k| self.slot[u][k].1)
            .expect("dart endpoints must be adjacent");
        self.offset[u] + i
    }

    fn next_dart(&self, u: usize, v: usize) -> (usize, usize) {
        let i = self.slot[v][self.slot[v].binary_search_by_key(&u, |&(w, _)| w).unwrap()].1;
        let rot = &self.rotation[v];
        (v, rot[(i + 1) % rot.len()])
    }

    fn trace_faces(&mut self) {
        for u in 0..self.rotation.len() {
            if self.rotation[u].is_empty() {
                let id = self.faces.len();
                self.faces.push(Face { id, walk: vec![u], degree: 0, members: vec![u] });
                self.isolated_face[u] = Some(id);
                continue;
            }
            for i in 0..self.rotation[u].len() {
                if self.dart_face[self.offset[u] + i] != usize::MAX {
                    continue;
                }
                let id = self.faces.len();
                let start = (u, self.rotation[u][i]);
                let mut walk = Vec::new();
                let mut dart = start;
                loop {
                    let idx = self.dart_index(dart.0, dart.1);
                    self.dart_face[idx] = id;
                    walk.push(dart.0);
                    dart = self.next_dart(dart.0, dart.1);
                    if dart == start {
                        break;
                    }
                }
                let mut members = walk.clone();
                members.sort_unstable();
                members.dedup();
                let degree = walk.len();
                self.faces.push(Face { id, walk, degree, members });
            }
        }
    }

    fn check_euler(&self, g: &Graph) -> Result<(), EmbeddingError> {
        let c = self.component_count;
        let mut verts = vec![0i64; c];
        let mut edges = vec![0i64; c];
        let mut faces = vec![0i64; c];
        let mut first = vec![usize::MAX; c];
        for v in 0..g.n() {
            let k = self.component[v];
            verts[k] += 1;
            edges[k] += g.degree(v) as i64;
            first[k] = first[k].min(v);
        }
        for f in &self.faces {
            faces[self.component[f.walk[0]]] += 1;
        }
        for k in 0..c {
            let euler = verts[k] - edges[k] / 2 + faces[k];
            if euler != 2 {
                return Err(EmbeddingError::NotPlanarEmbedding { vertex: first[k], euler });
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.rotation.len()
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn rotations(&self) -> &[Vec<usize>] {
        &self.rotation
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: FaceId) -> Result<&Face, EmbeddingError> {
        self.faces.get(f).ok_or(EmbeddingError::InvalidFaceId(f))
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn component_count(&self) -> usize {
        self.component_count
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.component[v]
    }

    pub fn face_of_dart(&self, u: usize, v: usize) -> FaceId {
        self.dart_face[self.dart_index(u, v)]
    }

    /// Faces incident to `v`, one entry per corner (walk multiplicity), in
    /// rotation order. An isolated vertex reports its single face once.
    pub fn vertex_faces(&self, v: usize) -> Vec<FaceId> {
        if let Some(f) = self.isolated_face[v] {
            return vec![f];
        }
        let base = self.offset[v];
        (0..self.rotation[v].len()).map(|i| self.dart_face[base + i]).collect()
    }

    /// The two faces on either side of the undirected edge `uv`.
    pub fn edge_faces(&self, u: usize, v: usize) -> (FaceId, FaceId) {
        (self.face_of_dart(u, v), self.face_of_dart(v, u))
    }

    /// True iff the faces share at least one undirected edge.
    pub fn faces_adjacent(&self, f1: FaceId, f2: FaceId) -> Result<bool, EmbeddingError> {
        let a = self.face(f1)?;
        self.face(f2)?;
        Ok(a.darts().any(|(u, v)| self.face_of_dart(v, u) == f2))
    }

    /// Faces sharing an edge with `f`, without duplicates, excluding `f`.
    pub fn adjacent_faces(&self, f: FaceId) -> Vec<FaceId> {
        let mut out: Vec<FaceId> = self.faces[f]
            .darts()
            .map(|(u, v)| self.face_of_dart(v, u))
            .filter(|&h| h != f)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Multiset of canonical face walks, for structural comparison.
    pub fn face_signature(&self) -> Vec<Vec<usize>> {
        let mut sig: Vec<_> = self.faces.iter().map(Face::canonical_walk).collect();
        sig.sort();
        sig
    }

    /// Rotation system restricted to the kept vertices, relabelled to
    /// `0..count` in increasing original order.
    fn restricted_rotation(&self, keep: &[bool]) -> Vec<Vec<usize>> {
        let mut new_id = vec![usize::MAX; self.n()];
        let mut next = 0;
        for v in 0..self.n() {
            if keep[v] {
                new_id[v] = next;
                next += 1;
            }
        }
        (0..self.n())
            .filter(|&v| keep[v])
            .map(|v| self.rotation[v].iter().filter(|&&w| keep[w]).map(|&w| new_id[w]).collect())
            .collect()
    }
}

/// Builds an embedding of a connected graph.
pub fn build_embedding(g: &Graph, rotation: Vec<Vec<usize>>) -> Result<Embedding, EmbeddingError> {
    let emb = Embedding::new(g, rotation)?;
    if emb.component_count > 1 {
        return Err(EmbeddingError::Disconnected);
    }
    Ok(emb)
}

/// Rotation system read off a straight-line drawing: neighbors sorted
/// clockwise by angle around each vertex.
pub fn rotation_from_coordinates(g: &Graph, coords: &[(f64, f64)]) -> Vec<Vec<usize>> {
    (0..g.n())
        .map(|v| {
            let (x, y) = coords[v];
            let mut nbrs: Vec<(f64, usize)> = g
                .neighbors(v)
                .iter()
                .map(|&w| ((coords[w].1 - y).atan2(coords[w].0 - x), w))
                .collect();
            nbrs.sort_by(|a, b| b.0.total_cmp(&a.0));
            nbrs.into_iter().map(|(_, w)| w).collect()
        })
        .collect()
}

/// An induced subgraph with its restricted embedding and the map back to the
/// parent's vertex ids.
#[derive(Debug, Clone)]
pub struct Subgraph {
    pub graph: Graph,
    pub embedding: Embedding,
    pub original: Vec<usize>,
}

/// Deletes a vertex set. The rotation at each survivor is the parent rotation
/// with deleted neighbors dropped in place, which keeps the embedding planar;
/// faces are re-traced per component.
pub fn delete_vertices(g: &Graph, e: &Embedding, remove: &[usize]) -> Subgraph {
    let mut keep = vec![true; g.n()];
    for &v in remove {
        keep[v] = false;
    }
    let (graph, original) = g.induced(&keep);
    let rotation = e.restricted_rotation(&keep);
    let embedding = Embedding::new(&graph, rotation).expect("restricting a planar rotation stays planar");
    Subgraph { graph, embedding, original }
}

/// Deletes one edge and re-traces the faces.
pub fn delete_edge(g: &Graph, e: &Embedding, u: usize, v: usize) -> (Graph, Embedding) {
    let mut h = g.clone();
    let removed = h.remove_edge(u, v);
    assert!(removed, "edge {u}-{v} not present");
    let mut rot = e.rotation.clone();
    rot[u].retain(|&w| w != v);
    rot[v].retain(|&w| w != u);
    let emb = Embedding::new(&h, rot).expect("deleting an edge keeps the embedding planar");
    (h, emb)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FaceViolation {
    FourFace(FaceId),
    TriangleNearShortFace { triangle: FaceId, other: FaceId, other_degree: usize },
}

/// Result of checking that no face is a 4-face and no 3-face shares an edge
/// with a face of degree at most 6.
///
/// The check is stated for faces bounded by cycles. Violations that involve a
/// face whose walk repeats a vertex depend on the incidence convention at cut
/// vertices and are listed separately.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ObservationReport {
    pub face_count: usize,
    pub violations: Vec<FaceViolation>,
    pub convention_dependent: Vec<FaceViolation>,
}

impl ObservationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_observation_face(_g: &Graph, e: &Embedding) -> ObservationReport {
    let mut report = ObservationReport { face_count: e.face_count(), ..Default::default() };
    for f in e.faces() {
        if f.degree == 4 {
            let bucket =
                if f.is_simple_cycle() { &mut report.violations } else { &mut report.convention_dependent };
            bucket.push(FaceViolation::FourFace(f.id));
        }
        if f.degree != 3 {
            continue;
        }
        for h in e.adjacent_faces(f.id) {
            let other = &e.faces()[h];
            if other.degree <= 6 {
                let v = FaceViolation::TriangleNearShortFace { triangle: f.id, other: h, other_degree: other.degree };
                if f.is_simple_cycle() && other.is_simple_cycle() {
                    report.violations.push(v);
                } else {
                    report.convention_dependent.push(v);
                }
            }
        }
    }
    report
}
