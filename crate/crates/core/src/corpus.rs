//! Generators for embedded planar graphs without 4- and 6-cycles.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cycles::{forbidden_cycle, in_class};
use crate::embedding::{build_embedding, delete_edge, rotation_from_coordinates, Embedding};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("bad generator parameter: {0}")]
    BadParameter(String),
}

/// Base graphs accepted by the double subdivision generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseGraph {
    K4,
    Cycle(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Cycle(usize),
    Tree { n: usize, seed: u64 },
    Dodecahedron,
    DoubleSubdivision(BaseGraph),
    RandomClass { n: usize, seed: u64 },
    Grown { n: usize, seed: u64 },
}

impl Family {
    pub fn seed(&self) -> Option<u64> {
        match self {
            Family::Tree { seed, .. } | Family::RandomClass { seed, .. } | Family::Grown { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Cycle(n) => write!(f, "cycle:{n}"),
            Family::Tree { n, seed } => write!(f, "tree:{n}:{seed}"),
            Family::Dodecahedron => write!(f, "dodecahedron"),
            Family::DoubleSubdivision(BaseGraph::K4) => write!(f, "dsub:k4"),
            Family::DoubleSubdivision(BaseGraph::Cycle(n)) => write!(f, "dsub:c{n}"),
            Family::RandomClass { n, seed } => write!(f, "random:{n}:{seed}"),
            Family::Grown { n, seed } => write!(f, "grown:{n}:{seed}"),
        }
    }
}

impl FromStr for Family {
    type Err = CorpusError;

    /// `cycle:N`, `tree:N:SEED`, `dodecahedron`, `dsub:k4`, `dsub:cN`,
    /// `random:N:SEED`, `grown:N:SEED`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CorpusError::BadParameter(format!("unrecognized family '{s}'"));
        let num = |t: &str| t.parse::<u64>().map_err(|_| bad());
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["cycle", n] => Ok(Family::Cycle(num(n)? as usize)),
            ["tree", n, seed] => Ok(Family::Tree { n: num(n)? as usize, seed: num(seed)? }),
            ["dodecahedron"] => Ok(Family::Dodecahedron),
            ["dsub", "k4"] => Ok(Family::DoubleSubdivision(BaseGraph::K4)),
            ["dsub", c] if c.starts_with('c') => Ok(Family::DoubleSubdivision(BaseGraph::Cycle(num(&c[1..])? as usize))),
            ["random", n, seed] => Ok(Family::RandomClass { n: num(n)? as usize, seed: num(seed)? }),
            ["grown", n, seed] => Ok(Family::Grown { n: num(n)? as usize, seed: num(seed)? }),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn gen(family: Family) -> Result<(Graph, Embedding), CorpusError> {
    let (g, e) = match family {
        Family::Cycle(n) => {
            if n < 3 || n == 4 || n == 6 {
                return Err(CorpusError::BadParameter(format!("cycle length {n} is not allowed")));
            }
            embedded_cycle(n)
        }
        Family::Tree { n, seed } => {
            if n == 0 {
                return Err(CorpusError::BadParameter("tree needs at least one vertex".into()));
            }
            random_tree(n, seed)
        }
        Family::Dodecahedron => dodecahedron(),
        Family::DoubleSubdivision(base) => {
            let (g, e) = match base {
                BaseGraph::K4 => embedded_k4(),
                BaseGraph::Cycle(n) if n >= 3 => embedded_cycle(n),
                BaseGraph::Cycle(n) => return Err(CorpusError::BadParameter(format!("cycle base of length {n}"))),
            };
            double_subdivision(&g, &e)
        }
        Family::RandomClass { n, seed } => {
            if n < 3 {
                return Err(CorpusError::BadParameter("random_class needs at least 3 vertices".into()));
            }
            random_class(n, seed)
        }
        Family::Grown { n, seed } => {
            if n < 3 {
                return Err(CorpusError::BadParameter("grown needs at least 3 vertices".into()));
            }
            grown_class(n, seed)
        }
    };
    debug_assert!(in_class(&g), "{family} produced an out-of-class graph");
    Ok((g, e))
}

pub fn embedded_cycle(n: usize) -> (Graph, Embedding) {
    let g = Graph::cycle(n);
    let rot = (0..n).map(|i| vec![(i + n - 1) % n, (i + 1) % n]).collect();
    let e = build_embedding(&g, rot).expect("cycle rotation is planar");
    (g, e)
}

pub fn embedded_k4() -> (Graph, Embedding) {
    let g = Graph::complete(4);
    let coords = [(0.0, 0.0), (0.0, 3.0), (-3.0, -2.0), (3.0, -2.0)];
    let e = build_embedding(&g, rotation_from_coordinates(&g, &coords)).expect("K4 drawing is planar");
    (g, e)
}

/// Dodecahedron from its Schlegel diagram: outer pentagon `0..5`, middle
/// 10-cycle `5..15`, inner pentagon `15..20`.
pub fn dodecahedron() -> (Graph, Embedding) {
    let mut edges = Vec::with_capacity(30);
    let mut coords = vec![(0.0, 0.0); 20];
    let polar = |r: f64, deg: f64| (r * deg.to_radians().cos(), r * deg.to_radians().sin());
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, 5 + 2 * i));
        edges.push((6 + 2 * i, 15 + i));
        edges.push((15 + i, 15 + (i + 1) % 5));
        coords[i] = polar(4.0, 72.0 * i as f64);
        coords[5 + 2 * i] = polar(2.6, 72.0 * i as f64);
        coords[6 + 2 * i] = polar(2.6, 72.0 * i as f64 + 36.0);
        coords[15 + i] = polar(1.2, 72.0 * i as f64 + 36.0);
    }
    for j in 0..10 {
        edges.push((5 + j, 5 + (j + 1) % 10));
    }
    let g = Graph::from_edges(20, &edges).expect("dodecahedron is simple");
    let e = build_embedding(&g, rotation_from_coordinates(&g, &coords)).expect("Schlegel diagram is planar");
    (g, e)
}

/// Replaces every edge `uv` by a path `u a b v`. Edge `j` (in sorted edge
/// order) gets vertices `n + 2j` (next to `u`) and `n + 2j + 1` (next to `v`).
pub fn double_subdivision(g: &Graph, e: &Embedding) -> (Graph, Embedding) {
    let n = g.n();
    let edges = g.edges();
    let mut new_edges = Vec::with_capacity(3 * edges.len());
    let mut rot: Vec<Vec<usize>> = e.rotations().to_vec();
    rot.resize(n + 2 * edges.len(), Vec::new());
    for (j, &(u, v)) in edges.iter().enumerate() {
        let (a, b) = (n + 2 * j, n + 2 * j + 1);
        new_edges.extend([(u, a), (a, b), (b, v)]);
        for w in rot[u].iter_mut() {
            if *w == v {
                *w = a;
            }
        }
        for w in rot[v].iter_mut() {
            if *w == u {
                *w = b;
            }
        }
        rot[a] = vec![u, b];
        rot[b] = vec![a, v];
    }
    let h = Graph::from_edges(n + 2 * edges.len(), &new_edges).expect("subdivision is simple");
    let emb = build_embedding(&h, rot).expect("subdividing preserves planarity");
    (h, emb)
}

/// Random recursive tree: vertex `i` attaches to a uniform earlier vertex.
pub fn random_tree(n: usize, seed: u64) -> (Graph, Embedding) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<_> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    let g = Graph::from_edges(n, &edges).expect("tree is simple");
    let rot = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
    let e = build_embedding(&g, rot).expect("every rotation of a tree is planar");
    (g, e)
}

/// A growing embedded graph; edges are only ever added inside a face, so the
/// embedding stays planar.
struct Growth {
    edges: Vec<(usize, usize)>,
    rot: Vec<Vec<usize>>,
    g: Graph,
    e: Embedding,
}

impl Growth {
    fn triangle() -> Self {
        let edges = vec![(0, 1), (1, 2), (0, 2)];
        let rot: Vec<Vec<usize>> = vec![vec![1, 2], vec![2, 0], vec![0, 1]];
        let g = Graph::from_edges(3, &edges).unwrap();
        let e = build_embedding(&g, rot.clone()).unwrap();
        Growth { edges, rot, g, e }
    }

    fn random_walk(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        self.e.faces()[rng.gen_range(0..self.e.face_count())].walk.clone()
    }

    /// Makes `x` the neighbor of `walk[i]` inside the corner at position `i`.
    fn open_corner(&mut self, walk: &[usize], i: usize, x: usize) {
        let w = walk[i];
        let prev = walk[(i + walk.len() - 1) % walk.len()];
        let at = self.rot[w].iter().position(|&y| y == prev).unwrap();
        self.rot[w].insert(at + 1, x);
        self.edges.push((w.min(x), w.max(x)));
    }

    fn rebuild(&mut self) {
        self.g = Graph::from_edges(self.rot.len(), &self.edges).unwrap();
        self.e = build_embedding(&self.g, self.rot.clone()).expect("adding edges inside a face keeps the embedding planar");
    }

    /// New vertex inside the face `walk`, joined to the corners at the
    /// (sorted, distinct-vertex) positions `chosen`.
    fn add_vertex(&mut self, walk: &[usize], chosen: &[usize]) {
        let x = self.rot.len();
        self.rot.push(chosen.iter().rev().map(|&i| walk[i]).collect());
        for &i in chosen {
            self.open_corner(walk, i, x);
        }
        self.rebuild();
    }

    /// Chord between the corners at positions `i` and `j` of the face `walk`.
    fn add_chord(&mut self, walk: &[usize], i: usize, j: usize) {
        let (u, v) = (walk[i], walk[j]);
        self.open_corner(walk, i, v);
        self.edges.pop();
        self.open_corner(walk, j, u);
        self.rebuild();
    }
}

/// `n` random distinct-vertex positions of a face walk, sorted.
fn pick_corners(rng: &mut ChaCha8Rng, walk: &[usize], want: usize) -> Vec<usize> {
    let mut positions: Vec<usize> = (0..walk.len()).collect();
    positions.shuffle(rng);
    let mut chosen: Vec<usize> = Vec::new();
    for p in positions {
        if chosen.len() < want && !chosen.iter().any(|&q| walk[q] == walk[p]) {
            chosen.push(p);
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Random embedded planar graph on `n` vertices: start from a triangle and
/// insert each new vertex into a uniform face, joined to 2 or 3 distinct
/// corners of that face.
pub fn random_planar(n: usize, seed: u64) -> (Graph, Embedding) {
    assert!(n >= 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut growth = Growth::triangle();
    for _ in 3..n {
        let walk = growth.random_walk(&mut rng);
        let want = rng.gen_range(2..=3);
        let chosen = pick_corners(&mut rng, &walk, want);
        growth.add_vertex(&walk, &chosen);
    }
    (growth.g, growth.e)
}

/// Bitmask of the lengths (at most `max`) of simple paths from `u` to `v`.
pub fn path_lengths(g: &Graph, u: usize, v: usize, max: usize) -> u64 {
    fn walk(g: &Graph, at: usize, v: usize, len: usize, max: usize, seen: &mut Vec<usize>, mask: &mut u64) {
        for &w in g.neighbors(at) {
            if w == v {
                *mask |= 1 << (len + 1);
            } else if len + 1 < max && !seen.contains(&w) {
                seen.push(w);
                walk(g, w, v, len + 1, max, seen, mask);
                seen.pop();
            }
        }
    }
    let mut mask = 0;
    walk(g, u, v, 0, max, &mut vec![u], &mut mask);
    mask
}

const LEN2_OR_4: u64 = 1 << 2 | 1 << 4;
const LEN3_OR_5: u64 = 1 << 3 | 1 << 5;

/// Random in-class graph grown without ever creating a 4- or 6-cycle.
///
/// Each new vertex goes into a random face with up to three attachments,
/// accepted only if no two attachments are joined by a path of length 2 or 4.
/// Afterwards `4n` random chords are tried inside faces, each accepted only if
/// its ends have no path of length 3 or 5. The result is denser than
/// `random_class` and usually has vertices of degree 5 and more.
pub fn grown_class(n: usize, seed: u64) -> (Graph, Embedding) {
    assert!(n >= 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut growth = Growth::triangle();
    while growth.g.n() < n {
        let mut placed = false;
        for _ in 0..30 {
            let walk = growth.random_walk(&mut rng);
            let want = rng.gen_range(2..=3);
            let chosen = pick_corners(&mut rng, &walk, want);
            let ok = chosen.iter().enumerate().all(|(a, &i)| {
                chosen[a + 1..].iter().all(|&j| path_lengths(&growth.g, walk[i], walk[j], 4) & LEN2_OR_4 == 0)
            });
            if ok {
                growth.add_vertex(&walk, &chosen);
                placed = true;
                break;
            }
        }
        if !placed {
            let walk = growth.random_walk(&mut rng);
            let i = rng.gen_range(0..walk.len());
            growth.add_vertex(&walk, &[i]);
        }
    }
    for _ in 0..4 * n {
        let walk = growth.random_walk(&mut rng);
        if walk.len() < 4 {
            continue;
        }
        let chosen = pick_corners(&mut rng, &walk, 2);
        if chosen.len() < 2 {
            continue;
        }
        let (u, v) = (walk[chosen[0]], walk[chosen[1]]);
        if !growth.g.has_edge(u, v) && path_lengths(&growth.g, u, v, 5) & LEN3_OR_5 == 0 {
            growth.add_chord(&walk, chosen[0], chosen[1]);
        }
    }
    (growth.g, growth.e)
}

/// Random planar graph with every 4- and 6-cycle destroyed: repeatedly delete
/// the lexicographically smallest edge of the lexicographically first
/// shortest forbidden cycle. Edges on cycles are never bridges, so the graph
/// stays connected.
pub fn random_class(n: usize, seed: u64) -> (Graph, Embedding) {
    let (mut g, mut e) = random_planar(n, seed);
    while let Some(c) = forbidden_cycle(&g) {
        let len = c.len();
        let (u, v) = (0..len)
            .map(|i| {
                let (a, b) = (c[i], c[(i + 1) % len]);
                (a.min(b), a.max(b))
            })
            .min()
            .unwrap();
        let (h, f) = delete_edge(&g, &e, u, v);
        g = h;
        e = f;
    }
    (g, e)
}

/// A generated corpus member.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub id: String,
    pub family: Family,
    pub graph: Graph,
    pub embedding: Embedding,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub family: Family,
    pub seed: Option<u64>,
    pub n: usize,
    pub m: usize,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub entries: Vec<ManifestEntry>,
}

/// Families of the standard desk-scale corpus: odd cycles 3..=19, twenty
/// random trees, the dodecahedron, double subdivisions of K4 and C3, random
/// in-class graphs with 5 to 18 vertices (34 per order) and forty grown
/// graphs with 8 to 47 vertices.
pub fn standard_families(seed: u64) -> Vec<Family> {
    let mut out: Vec<Family> = (3..=19).step_by(2).map(Family::Cycle).collect();
    out.extend((1..=20).map(|n| Family::Tree { n, seed: seed.wrapping_mul(1000) + n as u64 }));
    out.push(Family::Dodecahedron);
    out.push(Family::DoubleSubdivision(BaseGraph::K4));
    out.push(Family::DoubleSubdivision(BaseGraph::Cycle(3)));
    for n in 5..=18 {
        for i in 0..34u64 {
            out.push(Family::RandomClass { n, seed: seed.wrapping_mul(1_000_000) + (n as u64) * 1000 + i });
        }
    }
    out.extend((8..48).map(|n| Family::Grown { n, seed: seed.wrapping_mul(1000) + n as u64 }));
    out
}

pub fn build_corpus(families: &[Family]) -> Result<Vec<CorpusEntry>, CorpusError> {
    families
        .iter()
        .enumerate()
        .map(|(i, &family)| {
            let (graph, embedding) = gen(family)?;
            Ok(CorpusEntry { id: format!("g{i:04}"), family, graph, embedding })
        })
        .collect()
}

pub fn manifest(seed: u64, corpus: &[CorpusEntry]) -> Manifest {
    Manifest {
        seed,
        entries: corpus
            .iter()
            .map(|c| ManifestEntry {
                id: c.id.clone(),
                family: c.family,
                seed: c.family.seed(),
                n: c.graph.n(),
                m: c.graph.m(),
                file: format!("{}.pge", c.id),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::girth;

    #[test]
    fn family_names_round_trip() {
        for f in [
            Family::Cycle(5),
            Family::Tree { n: 9, seed: 3 },
            Family::Dodecahedron,
            Family::DoubleSubdivision(BaseGraph::K4),
            Family::DoubleSubdivision(BaseGraph::Cycle(3)),
            Family::RandomClass { n: 18, seed: 1 },
        ] {
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
        assert!("cube".parse::<Family>().is_err());
    }

    #[test]
    fn cycle_family() {
        let (g, e) = gen(Family::Cycle(5)).unwrap();
        assert_eq!((g.n(), g.m(), e.face_count()), (5, 5, 2));
        assert!(gen(Family::Cycle(4)).is_err());
        assert!(gen(Family::Cycle(6)).is_err());
    }

    #[test]
    fn dodecahedron_faces() {
        let (g, e) = dodecahedron();
        assert_eq!((g.n(), g.m(), e.face_count()), (20, 30, 12));
        assert!(e.faces().iter().all(|f| f.degree == 5));
        assert!(in_class(&g));
        assert_eq!(girth(&g), Some(5));
    }

    #[test]
    fn double_subdivided_k4() {
        let (g, e) = gen(Family::DoubleSubdivision(BaseGraph::K4)).unwrap();
        assert_eq!(g.n(), 16);
        assert_eq!(girth(&g), Some(9));
        assert!(e.faces().iter().all(|f| f.degree == 9));
        assert!((0..4).all(|v| g.degree(v) == 3));
        assert!((4..16).all(|v| g.degree(v) == 2));
    }

    #[test]
    fn random_class_is_in_class_and_connected() {
        let (g, e) = gen(Family::RandomClass { n: 30, seed: 1 }).unwrap();
        assert_eq!(g.n(), 30);
        assert!(in_class(&g));
        assert!(g.is_connected());
        assert_eq!(g.n() as i64 - g.m() as i64 + e.face_count() as i64, 2);
    }

    #[test]
    fn random_planar_is_maximal_when_all_attachments_are_three() {
        let (g, e) = random_planar(25, 4);
        assert!(g.is_connected());
        assert!(g.m() <= 3 * g.n() - 6);
        assert_eq!(g.n() as i64 - g.m() as i64 + e.face_count() as i64, 2);
    }

    #[test]
    fn generators_are_deterministic() {
        let a = gen(Family::RandomClass { n: 15, seed: 7 }).unwrap();
        let b = gen(Family::RandomClass { n: 15, seed: 7 }).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        let t = gen(Family::Tree { n: 12, seed: 2 }).unwrap();
        assert_eq!(t.0.m(), 11);
    }

    #[test]
    fn standard_corpus_size() {
        assert_eq!(standard_families(1).len(), 548);
    }
}
