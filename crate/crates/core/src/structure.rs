//! Local structure on embedded graphs: pendent faces, terrible 3-vertices,
//! poor 3-faces, incidence counters, counting bounds and reducible
//! configurations.
//!
//! Terms used below:
//! - a *pendent face* of `v` is a face `f` with `v` off its boundary but
//!   adjacent to a 3-vertex `u` on it; `v` is then a *pendent neighbor* of `u`;
//! - a 3-vertex `u` on a 3- or 5-face `f` is *terrible* for `f` when it has a
//!   neighbor off `f` of degree at most 4;
//! - a 3-face is *poor* when at least two of its vertices are terrible for it.

use serde::Serialize;
use thiserror::Error;

use crate::cycles::in_class;
use crate::embedding::{Embedding, FaceId};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("vertex {0} is not a 3-vertex")]
    NotA3Vertex(usize),
    #[error("face {face} has degree {degree}, outside the accepted degrees")]
    WrongFaceDegree { face: FaceId, degree: usize },
    #[error("vertex {vertex} is not on face {face}")]
    NotIncident { vertex: usize, face: FaceId },
    #[error("graph contains a 4-cycle or a 6-cycle")]
    NotInClass,
    #[error("invalid face id {0}")]
    InvalidFaceId(FaceId),
}

/// Pendent faces of a vertex and the 3-vertices that make them pendent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PendentRelation {
    /// Distinct pendent faces, ascending.
    pub faces: Vec<FaceId>,
    /// `(face, u)` pairs: `u` is a 3-neighbor on `face`, `v` is off `face`.
    pub pairs: Vec<(FaceId, usize)>,
}

pub fn pendent_relation(g: &Graph, e: &Embedding, v: usize) -> PendentRelation {
    let mut pairs = Vec::new();
    for &u in g.neighbors(v) {
        if g.degree(u) != 3 {
            continue;
        }
        let mut faces = e.vertex_faces(u);
        faces.sort_unstable();
        faces.dedup();
        for f in faces {
            if !e.faces()[f].contains(v) {
                pairs.push((f, u));
            }
        }
    }
    pairs.sort_unstable();
    let mut faces: Vec<FaceId> = pairs.iter().map(|&(f, _)| f).collect();
    faces.dedup();
    PendentRelation { faces, pairs }
}

pub fn is_terrible(g: &Graph, e: &Embedding, u: usize, f: FaceId) -> Result<bool, StructureError> {
    let face = e.faces().get(f).ok_or(StructureError::InvalidFaceId(f))?;
    if g.degree(u) != 3 {
        return Err(StructureError::NotA3Vertex(u));
    }
    if face.degree != 3 && face.degree != 5 {
        return Err(StructureError::WrongFaceDegree { face: f, degree: face.degree });
    }
    if !face.contains(u) {
        return Err(StructureError::NotIncident { vertex: u, face: f });
    }
    Ok(g.neighbors(u).iter().any(|&w| !face.contains(w) && g.degree(w) <= 4))
}

/// Boundary vertices of a 3- or 5-face that are terrible 3-vertices for it.
pub fn terrible_vertices(g: &Graph, e: &Embedding, f: FaceId) -> Vec<usize> {
    e.faces()[f]
        .members()
        .iter()
        .copied()
        .filter(|&u| g.degree(u) == 3 && is_terrible(g, e, u, f).unwrap_or(false))
        .collect()
}

pub fn is_poor_3face(g: &Graph, e: &Embedding, f: FaceId) -> Result<bool, StructureError> {
    let face = e.faces().get(f).ok_or(StructureError::InvalidFaceId(f))?;
    if face.degree != 3 {
        return Err(StructureError::WrongFaceDegree { face: f, degree: face.degree });
    }
    Ok(terrible_vertices(g, e, f).len() >= 2)
}

/// Poor flag per face; `false` for faces that are not 3-faces.
pub fn poor_faces(g: &Graph, e: &Embedding) -> Vec<bool> {
    e.faces().iter().map(|f| f.degree == 3 && is_poor_3face(g, e, f.id).unwrap()).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct VertexProfile {
    pub n3: usize,
    pub n5: usize,
    pub m3: usize,
    pub m5: usize,
}

impl VertexProfile {
    /// `m3 + 2 n3`, the quantity the charge analysis branches on.
    pub fn triangle_load(&self) -> usize {
        self.m3 + 2 * self.n3
    }
}

/// `n_i` counts corners at 3-/5-faces (walk multiplicity); `m_i` counts
/// distinct pendent 3-/5-faces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncidenceProfile {
    pub vertices: Vec<VertexProfile>,
}

pub fn vertex_profile(g: &Graph, e: &Embedding, v: usize) -> VertexProfile {
    let mut p = VertexProfile::default();
    if g.degree(v) > 0 {
        for f in e.vertex_faces(v) {
            match e.faces()[f].degree {
                3 => p.n3 += 1,
                5 => p.n5 += 1,
                _ => {}
            }
        }
    }
    for f in pendent_relation(g, e, v).faces {
        match e.faces()[f].degree {
            3 => p.m3 += 1,
            5 => p.m5 += 1,
            _ => {}
        }
    }
    p
}

pub fn incidence_profile(g: &Graph, e: &Embedding) -> IncidenceProfile {
    IncidenceProfile { vertices: (0..g.n()).map(|v| vertex_profile(g, e, v)).collect() }
}

/// Number of incident 3-/5-faces (distinct) for which `u` is terrible.
pub fn terrible_incidences(g: &Graph, e: &Embedding, u: usize) -> usize {
    if g.degree(u) != 3 {
        return 0;
    }
    let mut faces = e.vertex_faces(u);
    faces.sort_unstable();
    faces.dedup();
    faces.into_iter().filter(|&f| is_terrible(g, e, u, f).unwrap_or(false)).count()
}

/// One evaluated counting bound for a vertex of degree `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    /// Whether this reading is expected to hold on every in-class graph.
    pub asserted: bool,
    pub value: i64,
    pub limit: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub vertex: usize,
    pub k: usize,
    pub profile: VertexProfile,
    pub checks: Vec<BoundCheck>,
}

impl BoundsReport {
    pub fn asserted_hold(&self) -> bool {
        self.checks.iter().filter(|c| c.asserted).all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

pub const BOUND_I: &str = "i: n3 <= floor(k/2)";
pub const BOUND_II: &str = "ii: piecewise n5 bound";
pub const BOUND_II_STRICT: &str = "ii-strict: middle case k-1";
pub const BOUND_III: &str = "iii: m3 <= k - 2 n3";
pub const BOUND_IV_PRINTED: &str = "iv-printed: m5 <= k - 3 m3";
pub const BOUND_IV: &str = "iv: m5 <= k - m3 - 2 n3";

/// Evaluates every reading of the counting bounds for a profile.
pub fn evaluate_bounds(vertex: usize, k: usize, p: VertexProfile) -> BoundsReport {
    let k_i = k as i64;
    let (n3, n5, m3, m5) = (p.n3 as i64, p.n5 as i64, p.m3 as i64, p.m5 as i64);
    let load = m3 + 2 * n3;
    let piecewise = |middle: i64| {
        if load == k_i {
            0
        } else if load == 0 {
            middle
        } else {
            k_i - load - 1
        }
    };
    let check = |name, asserted, value: i64, limit: i64| BoundCheck { name, asserted, value, limit, holds: value <= limit };
    BoundsReport {
        vertex,
        k,
        profile: p,
        checks: vec![
            check(BOUND_I, true, n3, k_i / 2),
            check(BOUND_II, true, n5, piecewise(k_i)),
            check(BOUND_II_STRICT, false, n5, piecewise(k_i - 1)),
            check(BOUND_III, true, m3, k_i - 2 * n3),
            check(BOUND_IV_PRINTED, false, m5, k_i - m3 - 2 * m3),
            check(BOUND_IV, true, m5, k_i - m3 - 2 * n3),
        ],
    }
}

pub fn check_counting_bounds(g: &Graph, e: &Embedding, v: usize) -> Result<BoundsReport, StructureError> {
    if !in_class(g) {
        return Err(StructureError::NotInClass);
    }
    Ok(evaluate_bounds(v, g.degree(v), vertex_profile(g, e, v)))
}

/// Counting bounds for every vertex, checking class membership once.
pub fn counting_bounds_all(g: &Graph, e: &Embedding) -> Result<Vec<BoundsReport>, StructureError> {
    if !in_class(g) {
        return Err(StructureError::NotInClass);
    }
    let profile = incidence_profile(g, e);
    Ok((0..g.n()).map(|v| evaluate_bounds(v, g.degree(v), profile.vertices[v])).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConfigKind {
    /// A vertex of degree at most 2.
    C0,
    /// A 3-vertex whose neighbors all have degree at most 4.
    C1,
    /// A 5-vertex on a poor 3-face.
    C2,
    /// A 6-vertex on two poor 3-faces.
    C3,
}

/// A reducible configuration anchored at a vertex.
///
/// For C2 and C3, `face_vertices[i]` are the two other vertices of the i-th
/// poor 3-face (in boundary-walk order after the anchor) and
/// `pendent_neighbors[i]` their off-face neighbors of degree at most 4.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Configuration {
    pub kind: ConfigKind,
    pub anchor: usize,
    pub deletion: Vec<usize>,
    pub faces: Vec<FaceId>,
    pub face_vertices: Vec<[usize; 2]>,
    pub pendent_neighbors: Vec<[usize; 2]>,
}

impl Configuration {
    fn single(kind: ConfigKind, anchor: usize) -> Self {
        Configuration {
            kind,
            anchor,
            deletion: vec![anchor],
            faces: Vec::new(),
            face_vertices: Vec::new(),
            pendent_neighbors: Vec::new(),
        }
    }

    /// Anchor, face vertices and pendent neighbors are pairwise distinct.
    pub fn is_distinct(&self) -> bool {
        let mut all = vec![self.anchor];
        all.extend(self.face_vertices.iter().flatten());
        all.extend(self.pendent_neighbors.iter().flatten());
        let len = all.len();
        all.sort_unstable();
        all.dedup();
        all.len() == len
    }
}

/// The two other vertices of a 3-face containing `v`, in walk order.
fn triangle_partners(e: &Embedding, f: FaceId, v: usize) -> [usize; 2] {
    let w = &e.faces()[f].walk;
    let i = w.iter().position(|&x| x == v).expect("anchor lies on the face");
    [w[(i + 1) % 3], w[(i + 2) % 3]]
}

/// Smallest off-face neighbor of degree at most 4 for a terrible 3-vertex.
fn pendent_low_neighbor(g: &Graph, e: &Embedding, u: usize, f: FaceId) -> Option<usize> {
    let face = &e.faces()[f];
    g.neighbors(u).iter().copied().find(|&w| !face.contains(w) && g.degree(w) <= 4)
}

/// Distinct poor 3-faces at `v`, in rotation order.
fn poor_faces_at(e: &Embedding, poor: &[bool], v: usize) -> Vec<FaceId> {
    let mut seen = Vec::new();
    for f in e.vertex_faces(v) {
        if poor[f] && !seen.contains(&f) {
            seen.push(f);
        }
    }
    seen
}

fn poor_configuration(g: &Graph, e: &Embedding, kind: ConfigKind, v: usize, faces: &[FaceId]) -> Option<Configuration> {
    let mut face_vertices = Vec::new();
    let mut pendent_neighbors = Vec::new();
    for &f in faces {
        let pair = triangle_partners(e, f, v);
        let a = pendent_low_neighbor(g, e, pair[0], f)?;
        let b = pendent_low_neighbor(g, e, pair[1], f)?;
        face_vertices.push(pair);
        pendent_neighbors.push([a, b]);
    }
    let deletion = face_vertices.iter().flatten().copied().collect();
    Some(Configuration { kind, anchor: v, deletion, faces: faces.to_vec(), face_vertices, pendent_neighbors })
}

fn configurations_of_kind(g: &Graph, e: &Embedding, kind: ConfigKind, poor: &[bool]) -> Vec<Configuration> {
    let mut out = Vec::new();
    for v in 0..g.n() {
        let d = g.degree(v);
        let found = match kind {
            ConfigKind::C0 => (d <= 2).then(|| Configuration::single(kind, v)),
            ConfigKind::C1 => (d == 3 && g.neighbors(v).iter().all(|&w| g.degree(w) <= 4))
                .then(|| Configuration::single(kind, v)),
            ConfigKind::C2 if d == 5 => {
                let faces = poor_faces_at(e, poor, v);
                faces.first().and_then(|&f| poor_configuration(g, e, kind, v, &[f]))
            }
            ConfigKind::C3 if d == 6 => {
                let faces = poor_faces_at(e, poor, v);
                (faces.len() >= 2).then(|| poor_configuration(g, e, kind, v, &faces[..2])).flatten()
            }
            _ => None,
        };
        out.extend(found);
    }
    out
}

/// The standard scan order.
pub const KINDS: [ConfigKind; 4] = [ConfigKind::C0, ConfigKind::C1, ConfigKind::C2, ConfigKind::C3];

/// Every configuration, one per (kind, anchor), in scan order.
pub fn find_all_configurations(g: &Graph, e: &Embedding) -> Vec<Configuration> {
    let poor = poor_faces(g, e);
    KINDS.iter().flat_map(|&k| configurations_of_kind(g, e, k, &poor)).collect()
}

/// First configuration in scan order: kinds C0..C3, ascending anchor.
pub fn find_reducible(g: &Graph, e: &Embedding) -> Option<Configuration> {
    find_reducible_ordered(g, e, &KINDS)
}

/// First configuration trying the kinds in the given order.
pub fn find_reducible_ordered(g: &Graph, e: &Embedding, order: &[ConfigKind]) -> Option<Configuration> {
    let poor = poor_faces(g, e);
    order.iter().find_map(|&k| configurations_of_kind(g, e, k, &poor).into_iter().next())
}
