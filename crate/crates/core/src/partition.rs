//! Vertex partitions, class specifications and verification.
//!
//! Part 0 is the restricted part. For the two-part case it is `V1` (target
//! class `F2`, disjoint unions of paths) and part 1 is `V2` (target class `F`).

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph::Graph;

pub const V1: usize = 0;
pub const V2: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ClassKind {
    Forest,
    DegreeOnly,
}

/// A hereditary graph class: forests or arbitrary graphs, with an optional
/// maximum degree. `cap == None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassSpec {
    pub kind: ClassKind,
    pub cap: Option<usize>,
}

impl ClassSpec {
    pub const fn forest(d: usize) -> Self {
        ClassSpec { kind: ClassKind::Forest, cap: Some(d) }
    }

    pub const fn any_forest() -> Self {
        ClassSpec { kind: ClassKind::Forest, cap: None }
    }

    pub const fn max_degree(d: usize) -> Self {
        ClassSpec { kind: ClassKind::DegreeOnly, cap: Some(d) }
    }

    pub const fn independent() -> Self {
        ClassSpec::forest(0)
    }

    /// Whether acyclicity must be checked. With cap 0 there are no edges, so
    /// `F0`, `D0` and `I` coincide.
    pub fn needs_acyclic(&self) -> bool {
        self.kind == ClassKind::Forest && self.cap != Some(0)
    }

    pub fn is_independent(&self) -> bool {
        self.cap == Some(0)
    }
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.kind, self.cap) {
            (_, Some(0)) => write!(f, "I"),
            (ClassKind::Forest, None) => write!(f, "F"),
            (ClassKind::Forest, Some(d)) => write!(f, "F{d}"),
            (ClassKind::DegreeOnly, None) => write!(f, "D"),
            (ClassKind::DegreeOnly, Some(d)) => write!(f, "D{d}"),
        }
    }
}

impl Serialize for ClassSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The `(F2, F)` target: a disjoint union of paths and a forest.
pub fn f2_f() -> Vec<ClassSpec> {
    vec![ClassSpec::forest(2), ClassSpec::any_forest()]
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("partition covers {got} vertices, graph has {expected}")]
    PartsMismatch { expected: usize, got: usize },
    #[error("vertex {vertex} is in part {part} but only {parts} class specs were given")]
    PartOutOfRange { vertex: usize, part: usize, parts: usize },
    #[error("vertex {0} is not in part 0")]
    WrongPart(usize),
    #[error("vertex {vertex} has degree {degree}, too large for requirement {requirement:?}")]
    RequirementUnmeetable { vertex: usize, degree: usize, requirement: Requirement },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    parts: Vec<usize>,
    specs: Vec<ClassSpec>,
}

impl Partition {
    pub fn new(parts: Vec<usize>, specs: Vec<ClassSpec>) -> Result<Self, PartitionError> {
        if let Some((vertex, &part)) = parts.iter().enumerate().find(|(_, &p)| p >= specs.len()) {
            return Err(PartitionError::PartOutOfRange { vertex, part, parts: specs.len() });
        }
        Ok(Partition { parts, specs })
    }

    pub fn part(&self, v: usize) -> usize {
        self.parts[v]
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn specs(&self) -> &[ClassSpec] {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn set(&mut self, v: usize, part: usize) {
        assert!(part < self.specs.len());
        self.parts[v] = part;
    }

    pub fn members(&self, part: usize) -> Vec<usize> {
        (0..self.parts.len()).filter(|&v| self.parts[v] == part).collect()
    }

    pub fn part_size(&self, part: usize) -> usize {
        self.parts.iter().filter(|&&p| p == part).count()
    }

    pub fn as_partial(&self) -> Vec<Option<usize>> {
        self.parts.iter().map(|&p| Some(p)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A cycle inside a part whose class requires acyclicity.
    Cycle { part: usize, cycle: Vec<usize> },
    /// A vertex whose degree inside its part exceeds the cap.
    Degree { part: usize, vertex: usize, degree: usize, cap: usize },
}

impl Witness {
    /// Re-checks the witness directly against the graph and assignment.
    pub fn recheck(&self, g: &Graph, assign: &[Option<usize>]) -> bool {
        match self {
            Witness::Cycle { part, cycle } => {
                let len = cycle.len();
                let mut sorted = cycle.clone();
                sorted.sort_unstable();
                sorted.dedup();
                len >= 3
                    && sorted.len() == len
                    && cycle.iter().all(|&v| assign[v] == Some(*part))
                    && (0..len).all(|i| g.has_edge(cycle[i], cycle[(i + 1) % len]))
            }
            Witness::Degree { part, vertex, degree, cap } => {
                let d = g.neighbors(*vertex).iter().filter(|&&w| assign[w] == Some(*part)).count();
                assign[*vertex] == Some(*part) && d == *degree && d > *cap
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub valid: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    fn ok() -> Self {
        Verdict { valid: true, witness: None }
    }

    fn fail(w: Witness) -> Self {
        Verdict { valid: false, witness: Some(w) }
    }
}

/// Finds a cycle in the subgraph induced by `member`, if one exists.
pub fn find_induced_cycle(g: &Graph, member: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    for root in 0..n {
        if !member(root) || depth[root] != usize::MAX {
            continue;
        }
        depth[root] = 0;
        let mut stack = vec![root];
        while let Some(u) = stack.pop() {
            for &w in g.neighbors(u) {
                if !member(w) || w == parent[u] {
                    continue;
                }
                if depth[w] != usize::MAX {
                    // Non-tree edge u-w: walk both ends up to their meeting point.
                    let (mut a, mut b) = (u, w);
                    let (mut left, mut right) = (vec![a], vec![b]);
                    while a != b {
                        if depth[a] >= depth[b] {
                            a = parent[a];
                            left.push(a);
                        } else {
                            b = parent[b];
                            right.push(b);
                        }
                    }
                    right.pop();
                    right.reverse();
                    left.extend(right);
                    return Some(left);
                }
                depth[w] = depth[u] + 1;
                parent[w] = u;
                stack.push(w);
            }
        }
    }
    None
}

/// Whether `set` induces a forest; on failure returns a cycle inside `set`.
pub fn induces_forest(g: &Graph, set: &[usize]) -> Result<(), Vec<usize>> {
    let mut member = vec![false; g.n()];
    for &v in set {
        member[v] = true;
    }
    match find_induced_cycle(g, |v| member[v]) {
        Some(c) => Err(c),
        None => Ok(()),
    }
}

/// Verifies an assignment in which some vertices may be unassigned; only the
/// assigned vertices are checked. Degree violations are reported before
/// cycles, lowest vertex first.
pub fn verify_partial(g: &Graph, assign: &[Option<usize>], specs: &[ClassSpec]) -> Verdict {
    for v in 0..g.n() {
        let Some(p) = assign[v] else { continue };
        if let Some(cap) = specs[p].cap {
            let degree = g.neighbors(v).iter().filter(|&&w| assign[w] == Some(p)).count();
            if degree > cap {
                return Verdict::fail(Witness::Degree { part: p, vertex: v, degree, cap });
            }
        }
    }
    for (p, spec) in specs.iter().enumerate() {
        if spec.needs_acyclic() {
            if let Some(cycle) = find_induced_cycle(g, |v| assign[v] == Some(p)) {
                return Verdict::fail(Witness::Cycle { part: p, cycle });
            }
        }
    }
    Verdict::ok()
}

pub fn verify(g: &Graph, p: &Partition) -> Result<Verdict, PartitionError> {
    if p.len() != g.n() {
        return Err(PartitionError::PartsMismatch { expected: g.n(), got: p.len() });
    }
    Ok(verify_partial(g, &p.as_partial(), p.specs()))
}

/// Number of neighbors of `v` in part 0.
pub fn v1_degree(g: &Graph, parts: &[usize], v: usize) -> usize {
    g.neighbors(v).iter().filter(|&&w| parts[w] == V1).count()
}

/// A `V1` vertex is saturated when it already has two `V1`-neighbors.
pub fn v1_saturated(g: &Graph, p: &Partition, v: usize) -> Result<bool, PartitionError> {
    if p.part(v) != V1 {
        return Err(PartitionError::WrongPart(v));
    }
    Ok(v1_degree(g, p.parts(), v) >= 2)
}

/// What a constrained vertex must satisfy if it stays in `V1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Requirement {
    /// At most one `V1`-neighbor. Needs degree at most 3.
    NotSaturated,
    /// No `V1`-neighbor. Needs degree at most 2.
    NoV1Neighbors,
}

impl Requirement {
    fn max_degree(self) -> usize {
        match self {
            Requirement::NotSaturated => 3,
            Requirement::NoV1Neighbors => 2,
        }
    }

    fn met(self, v1_neighbors: usize) -> bool {
        match self {
            Requirement::NotSaturated => v1_neighbors <= 1,
            Requirement::NoV1Neighbors => v1_neighbors == 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub partition: Partition,
    pub moved: Vec<usize>,
}

/// Moves constrained `V1` vertices that violate their requirement into `V2`
/// until every requirement holds.
///
/// A moved vertex has degree at most 3 and at least `d - 1` neighbors in `V1`
/// at the moment it moves, so it has at most one `V2`-neighbor and joins the
/// `V2` forest as a leaf or an isolated vertex. Moves only shrink `V1`, so
/// earlier requirements stay met and the loop ends after at most `|V1|` moves.
pub fn normalize(
    g: &Graph,
    p: &Partition,
    requirements: &[(usize, Requirement)],
) -> Result<Normalized, PartitionError> {
    for &(v, req) in requirements {
        if g.degree(v) > req.max_degree() {
            return Err(PartitionError::RequirementUnmeetable { vertex: v, degree: g.degree(v), requirement: req });
        }
    }
    let mut out = p.clone();
    let mut moved = Vec::new();
    loop {
        let violating = requirements
            .iter()
            .find(|&&(v, req)| out.part(v) == V1 && !req.met(v1_degree(g, out.parts(), v)));
        let Some(&(v, req)) = violating else { break };
        let v2_neighbors = g.neighbors(v).iter().filter(|&&w| out.part(w) == V2).count();
        assert!(
            v2_neighbors <= 1,
            "normalization move of vertex {v} ({req:?}) would attach it to {v2_neighbors} V2 vertices"
        );
        out.set(v, V2);
        moved.push(v);
    }
    Ok(Normalized { partition: out, moved })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec(), f2_f()).unwrap()
    }

    #[test]
    fn forest_checks_on_c5_and_k4() {
        let c5 = Graph::cycle(5);
        let cyc = induces_forest(&c5, &[0, 1, 2, 3, 4]).unwrap_err();
        assert_eq!(cyc.len(), 5);
        assert!(induces_forest(&c5, &[0, 1, 2, 3]).is_ok());
        let k4 = Graph::complete(4);
        let tri = induces_forest(&k4, &[0, 1, 3]).unwrap_err();
        let mut sorted = tri.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 3]);
    }

    #[test]
    fn verify_examples() {
        let c5 = Graph::cycle(5);
        assert!(verify(&c5, &p(&[0, 0, 0, 0, 1])).unwrap().valid);

        let c3 = Graph::cycle(3);
        let v = verify(&c3, &p(&[1, 1, 1])).unwrap();
        assert!(!v.valid);
        assert!(matches!(v.witness, Some(Witness::Cycle { part: 1, .. })));
        assert!(v.witness.unwrap().recheck(&c3, &[Some(1); 3]));

        let star = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        let v = verify(&star, &p(&[0; 6])).unwrap();
        assert_eq!(v.witness, Some(Witness::Degree { part: 0, vertex: 0, degree: 5, cap: 2 }));
    }

    #[test]
    fn verify_parts_mismatch() {
        assert_eq!(
            verify(&Graph::cycle(3), &p(&[0, 1])),
            Err(PartitionError::PartsMismatch { expected: 3, got: 2 })
        );
        assert!(matches!(
            Partition::new(vec![0, 2], f2_f()),
            Err(PartitionError::PartOutOfRange { vertex: 1, part: 2, parts: 2 })
        ));
    }

    #[test]
    fn saturation() {
        let p3 = Graph::path(3);
        let all = p(&[0, 0, 0]);
        assert!(v1_saturated(&p3, &all, 1).unwrap());
        assert!(!v1_saturated(&p3, &all, 0).unwrap());
        let iso = Graph::empty(1);
        assert!(!v1_saturated(&iso, &p(&[0]), 0).unwrap());
        assert_eq!(v1_saturated(&p3, &p(&[0, 1, 0]), 1), Err(PartitionError::WrongPart(1)));
    }

    #[test]
    fn normalize_moves_saturated_middle() {
        let p3 = Graph::path(3);
        let out = normalize(&p3, &p(&[0, 0, 0]), &[(1, Requirement::NotSaturated)]).unwrap();
        assert_eq!(out.partition.parts(), &[0, 1, 0]);
        assert!(verify(&p3, &out.partition).unwrap().valid);
    }

    #[test]
    fn normalize_leaves_v2_alone() {
        let p3 = Graph::path(3);
        let start = p(&[0, 1, 0]);
        let out = normalize(&p3, &start, &[(1, Requirement::NotSaturated)]).unwrap();
        assert_eq!(out.partition, start);
        assert!(out.moved.is_empty());
    }

    #[test]
    fn normalize_no_v1_neighbors() {
        let p3 = Graph::path(3);
        let out = normalize(&p3, &p(&[0, 0, 1]), &[(1, Requirement::NoV1Neighbors)]).unwrap();
        assert_eq!(out.partition.part(1), V2);
        assert!(verify(&p3, &out.partition).unwrap().valid);
    }

    #[test]
    fn normalize_rejects_high_degree() {
        let star = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert!(matches!(
            normalize(&star, &p(&[1, 0, 0, 0, 0]), &[(0, Requirement::NotSaturated)]),
            Err(PartitionError::RequirementUnmeetable { vertex: 0, degree: 4, .. })
        ));
        let p3 = Graph::path(3);
        assert!(normalize(&p3, &p(&[0, 0, 0]), &[(1, Requirement::NoV1Neighbors)]).is_ok());
    }

    #[test]
    fn independent_forms_agree() {
        let g = Graph::path(4);
        for parts in [[0, 1, 0, 1], [0, 0, 1, 1], [1, 1, 1, 1]] {
            let a = Partition::new(parts.to_vec(), vec![ClassSpec::forest(0), ClassSpec::any_forest()]).unwrap();
            let b = Partition::new(parts.to_vec(), vec![ClassSpec::max_degree(0), ClassSpec::any_forest()]).unwrap();
            assert_eq!(verify(&g, &a).unwrap().valid, verify(&g, &b).unwrap().valid);
        }
    }

    #[test]
    fn display_specs() {
        let s: Vec<String> = [ClassSpec::forest(2), ClassSpec::any_forest(), ClassSpec::max_degree(2), ClassSpec::independent()]
            .iter()
            .map(|c| c.to_string())
            .collect();
        assert_eq!(s, ["F2", "F", "D2", "I"]);
    }
}
