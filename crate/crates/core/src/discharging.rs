//! Initial charges, rules R1 to R4, final charges and the audit report.
//!
//! Charges: `mu(v) = 2 d(v) - 6`, `mu(f) = d(f) - 6`. Every transfer is
//! counted per boundary-walk corner, except pendent-face transfers (R3), which
//! are made once per (vertex, face) pair.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::charge::Charge;
use crate::cycles::in_class;
use crate::embedding::{Embedding, FaceId};
use crate::graph::Graph;
use crate::structure::{find_all_configurations, pendent_relation, poor_faces, vertex_profile, ConfigKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(tag = "kind", content = "id", rename_all = "lowercase")]
pub enum Element {
    Vertex(usize),
    Face(FaceId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Transfer {
    pub from: Element,
    pub to: Element,
    pub amount: Charge,
    pub rule: Rule,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChargeLedger {
    pub vertex_initial: Vec<Charge>,
    pub face_initial: Vec<Charge>,
    pub vertex_final: Vec<Charge>,
    pub face_final: Vec<Charge>,
    pub transfers: Vec<Transfer>,
}

impl ChargeLedger {
    pub fn initial_total(&self) -> Charge {
        self.vertex_initial.iter().chain(&self.face_initial).sum()
    }

    pub fn final_total(&self) -> Charge {
        self.vertex_final.iter().chain(&self.face_final).sum()
    }

    pub fn initial(&self, x: Element) -> Charge {
        match x {
            Element::Vertex(v) => self.vertex_initial[v],
            Element::Face(f) => self.face_initial[f],
        }
    }

    pub fn final_charge(&self, x: Element) -> Charge {
        match x {
            Element::Vertex(v) => self.vertex_final[v],
            Element::Face(f) => self.face_final[f],
        }
    }

    fn slot(&mut self, x: Element) -> &mut Charge {
        match x {
            Element::Vertex(v) => &mut self.vertex_final[v],
            Element::Face(f) => &mut self.face_final[f],
        }
    }

    pub fn record(&mut self, t: Transfer) {
        *self.slot(t.from) -= t.amount;
        *self.slot(t.to) += t.amount;
        self.transfers.push(t);
    }

    /// Final charge of one element recomputed from its initial charge and the
    /// transfer log alone.
    pub fn replay(&self, x: Element) -> Charge {
        let delta: Charge = self
            .transfers
            .iter()
            .map(|t| {
                let mut d = Charge::ZERO;
                if t.to == x {
                    d += t.amount;
                }
                if t.from == x {
                    d -= t.amount;
                }
                d
            })
            .sum();
        self.initial(x) + delta
    }
}

pub fn initial_charges(g: &Graph, e: &Embedding) -> ChargeLedger {
    let vertex_initial: Vec<Charge> = (0..g.n()).map(|v| Charge::whole(2 * g.degree(v) as i64 - 6)).collect();
    let face_initial: Vec<Charge> = e.faces().iter().map(|f| Charge::whole(f.degree as i64 - 6)).collect();
    ChargeLedger {
        vertex_final: vertex_initial.clone(),
        face_final: face_initial.clone(),
        vertex_initial,
        face_initial,
        transfers: Vec::new(),
    }
}

const THIRD: Charge = Charge::twelfths(4);
const HALF: Charge = Charge::twelfths(6);
const QUARTER: Charge = Charge::twelfths(3);
const SIXTH: Charge = Charge::twelfths(2);
const TWO_THIRDS: Charge = Charge::twelfths(8);
const FIVE_THIRDS: Charge = Charge::twelfths(20);
const SEVEN_THIRDS: Charge = Charge::twelfths(28);
const ONE: Charge = Charge::whole(1);

/// Vertices that are 3-vertices on at least one 3-face.
fn on_triangle(g: &Graph, e: &Embedding) -> Vec<bool> {
    (0..g.n())
        .map(|v| g.degree(v) == 3 && e.vertex_faces(v).iter().any(|&f| e.faces()[f].degree == 3))
        .collect()
}

pub fn apply_rules(g: &Graph, e: &Embedding, ledger: &ChargeLedger) -> ChargeLedger {
    let mut out = ledger.clone();
    let poor = poor_faces(g, e);
    let faces = e.faces();
    for v in 0..g.n() {
        let d = g.degree(v);
        if d < 3 {
            continue;
        }
        for f in e.vertex_faces(v) {
            let fd = faces[f].degree;
            let amount = match (d, fd) {
                (3, 3) => Some((THIRD, Rule::R1)),
                (4, 3) => Some((ONE, Rule::R2)),
                (4, 5) => Some((HALF, Rule::R2)),
                (5.., 3) if poor[f] => Some((SEVEN_THIRDS, Rule::R3)),
                (5.., 3) => Some((FIVE_THIRDS, Rule::R3)),
                (5.., 5) => Some((HALF, Rule::R3)),
                _ => None,
            };
            if let Some((amount, rule)) = amount {
                out.record(Transfer { from: Element::Vertex(v), to: Element::Face(f), amount, rule });
            }
        }
        if d >= 5 {
            for f in pendent_relation(g, e, v).faces {
                let amount = match faces[f].degree {
                    3 => TWO_THIRDS,
                    5 => QUARTER,
                    _ => continue,
                };
                out.record(Transfer { from: Element::Vertex(v), to: Element::Face(f), amount, rule: Rule::R3 });
            }
        }
    }
    let receivers = on_triangle(g, e);
    for f in faces.iter().filter(|f| f.degree >= 7) {
        for &u in &f.walk {
            if receivers[u] {
                out.record(Transfer { from: Element::Face(f.id), to: Element::Vertex(u), amount: SIXTH, rule: Rule::R4 });
            }
        }
    }
    out
}

/// Rederives the R3 pendent receivers and the R4 receivers without the
/// structure module and compares them with what `apply_rules` used.
pub fn cross_check(g: &Graph, e: &Embedding) -> Result<(), String> {
    let faces = e.faces();
    for v in (0..g.n()).filter(|&v| g.degree(v) >= 5) {
        let mut inline: Vec<FaceId> = faces
            .iter()
            .filter(|f| (f.degree == 3 || f.degree == 5) && !f.walk.contains(&v))
            .filter(|f| f.walk.iter().any(|&u| g.degree(u) == 3 && g.has_edge(u, v)))
            .map(|f| f.id)
            .collect();
        inline.sort_unstable();
        let mut via: Vec<FaceId> = pendent_relation(g, e, v)
            .faces
            .into_iter()
            .filter(|&f| faces[f].degree == 3 || faces[f].degree == 5)
            .collect();
        via.sort_unstable();
        if inline != via {
            return Err(format!("pendent faces of vertex {v}: inline {inline:?}, structure {via:?}"));
        }
    }
    let receivers = on_triangle(g, e);
    for (u, &inline) in receivers.iter().enumerate() {
        let via = g.degree(u) == 3 && vertex_profile(g, e, u).n3 > 0;
        if via != inline {
            return Err(format!("R4 receiver status of vertex {u} differs"));
        }
    }
    Ok(())
}

/// Diagnostic case label for an element; charges never depend on it.
pub fn case_label(g: &Graph, e: &Embedding, x: Element) -> String {
    match x {
        Element::Face(f) => match e.faces()[f].degree {
            3 => "1".into(),
            5 => "2".into(),
            7.. => "3".into(),
            _ => "-".into(),
        },
        Element::Vertex(v) => {
            let d = g.degree(v);
            let p = vertex_profile(g, e, v);
            let load = p.triangle_load();
            match d {
                3 if p.n3 > 0 => "4".into(),
                4 => "5".into(),
                5.. if load == 0 => "6".into(),
                5.. => {
                    let major = match d {
                        5 => 7,
                        6 => 8,
                        _ => 9,
                    };
                    format!("{major}.{}", if load >= d { 1 } else { 2 })
                }
                _ => "-".into(),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditRow {
    pub element: Element,
    pub degree: usize,
    pub case: String,
    pub mu: Charge,
    pub mu_star: Charge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NearestConfiguration {
    pub kind: ConfigKind,
    pub anchor: usize,
    pub distance: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NegativeElement {
    pub element: Element,
    pub mu_star: Charge,
    pub nearest: Option<NearestConfiguration>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditSummary {
    pub in_class: bool,
    pub components: usize,
    pub sum_initial: Charge,
    pub sum_final: Charge,
    /// Every component sums to -12 before and after discharging.
    pub conservation: bool,
    pub cross_check: Result<(), String>,
    pub negatives: Vec<NegativeElement>,
    pub case_counts: BTreeMap<String, usize>,
    /// Some face walk repeats a vertex, so walk multiplicity affected charges.
    pub multiplicity_sensitive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub rows: Vec<AuditRow>,
    pub summary: AuditSummary,
    #[serde(skip)]
    pub ledger: ChargeLedger,
}

impl AuditReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("element\tkind\tdegree\tcase\tmu\tmu_star\n");
        for r in &self.rows {
            let (id, kind) = match r.element {
                Element::Vertex(v) => (v, "vertex"),
                Element::Face(f) => (f, "face"),
            };
            writeln!(out, "{id}\t{kind}\t{}\t{}\t{}\t{}", r.degree, r.case, r.mu, r.mu_star).unwrap();
        }
        out
    }
}

/// Per-component sums of a ledger's charges, indexed by component id.
pub fn component_sums(e: &Embedding, values: (&[Charge], &[Charge])) -> Vec<Charge> {
    let mut sums = vec![Charge::ZERO; e.component_count()];
    for (v, &c) in values.0.iter().enumerate() {
        sums[e.component_of(v)] += c;
    }
    for (f, &c) in values.1.iter().enumerate() {
        sums[e.component_of(e.faces()[f].walk[0])] += c;
    }
    sums
}

fn nearest_configuration(g: &Graph, e: &Embedding, x: Element, configs: &[(ConfigKind, usize)]) -> Option<NearestConfiguration> {
    let sources: Vec<usize> = match x {
        Element::Vertex(v) => vec![v],
        Element::Face(f) => e.faces()[f].members().to_vec(),
    };
    let dist = g.distances_from(&sources);
    configs
        .iter()
        .filter(|&&(_, a)| dist[a] != usize::MAX)
        .map(|&(kind, anchor)| NearestConfiguration { kind, anchor, distance: dist[anchor] })
        .min_by_key(|c| (c.distance, c.kind, c.anchor))
}

pub fn audit(g: &Graph, e: &Embedding) -> AuditReport {
    let ledger = apply_rules(g, e, &initial_charges(g, e));
    let configs: Vec<(ConfigKind, usize)> = find_all_configurations(g, e).iter().map(|c| (c.kind, c.anchor)).collect();
    let elements = (0..g.n()).map(Element::Vertex).chain((0..e.face_count()).map(Element::Face));
    let mut rows = Vec::new();
    let mut negatives = Vec::new();
    let mut case_counts = BTreeMap::new();
    for x in elements {
        let degree = match x {
            Element::Vertex(v) => g.degree(v),
            Element::Face(f) => e.faces()[f].degree,
        };
        let case = case_label(g, e, x);
        *case_counts.entry(case.clone()).or_insert(0) += 1;
        let mu_star = ledger.final_charge(x);
        if mu_star.is_negative() {
            negatives.push(NegativeElement { element: x, mu_star, nearest: nearest_configuration(g, e, x, &configs) });
        }
        rows.push(AuditRow { element: x, degree, case, mu: ledger.initial(x), mu_star });
    }
    let target = Charge::whole(-12);
    let before = component_sums(e, (&ledger.vertex_initial, &ledger.face_initial));
    let after = component_sums(e, (&ledger.vertex_final, &ledger.face_final));
    let conservation = before.iter().chain(&after).all(|&s| s == target);
    let summary = AuditSummary {
        in_class: in_class(g),
        components: e.component_count(),
        sum_initial: ledger.initial_total(),
        sum_final: ledger.final_total(),
        conservation,
        cross_check: cross_check(g, e),
        negatives,
        case_counts,
        multiplicity_sensitive: e.faces().iter().any(|f| f.degree > 0 && f.members().len() < f.walk.len()),
    };
    AuditReport { rows, summary, ledger }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{dodecahedron, double_subdivision, embedded_cycle, embedded_k4};

    #[test]
    fn initial_values() {
        let (g, e) = embedded_k4();
        let l = initial_charges(&g, &e);
        assert!(l.vertex_initial.iter().all(|&c| c == Charge::ZERO));
        assert!(l.face_initial.iter().all(|&c| c == Charge::whole(-3)));
        assert_eq!(l.initial_total(), Charge::whole(-12));

        let (g, e) = embedded_cycle(7);
        let l = initial_charges(&g, &e);
        assert!(l.vertex_initial.iter().all(|&c| c == Charge::whole(-2)));
        assert!(l.face_initial.iter().all(|&c| c == Charge::whole(1)));
    }

    #[test]
    fn k4_faces_end_at_minus_two() {
        let (g, e) = embedded_k4();
        let l = apply_rules(&g, &e, &initial_charges(&g, &e));
        assert_eq!(l.transfers.len(), 12);
        assert!(l.transfers.iter().all(|t| t.rule == Rule::R1 && t.amount == Charge::twelfths(4)));
        assert!(l.face_final.iter().all(|&c| c == Charge::whole(-2)));
        assert!(l.vertex_final.iter().all(|&c| c == Charge::whole(-1)));
        assert_eq!(l.final_total(), Charge::whole(-12));
    }

    #[test]
    fn dodecahedron_nothing_moves() {
        let (g, e) = dodecahedron();
        let r = audit(&g, &e);
        assert!(r.ledger.transfers.is_empty());
        assert!(r.ledger.vertex_final.iter().all(|&c| c == Charge::ZERO));
        assert!(r.ledger.face_final.iter().all(|&c| c == Charge::whole(-1)));
        assert!(r.summary.conservation);
        assert_eq!(r.summary.negatives.len(), 12);
        for n in &r.summary.negatives {
            let near = n.nearest.as_ref().unwrap();
            assert_eq!((near.kind, near.distance), (ConfigKind::C1, 0));
        }
    }

    #[test]
    fn double_subdivided_k4_flags_degree_two() {
        let (k, ke) = embedded_k4();
        let (g, e) = double_subdivision(&k, &ke);
        let r = audit(&g, &e);
        let neg: Vec<_> = r.summary.negatives.iter().filter(|n| matches!(n.element, Element::Vertex(_))).collect();
        assert_eq!(neg.len(), 12);
        assert!(neg.iter().all(|n| n.mu_star == Charge::whole(-2)));
        assert!(neg.iter().all(|n| n.nearest.as_ref().unwrap().kind == ConfigKind::C0));
        assert_eq!(r.summary.sum_final, Charge::whole(-12));
    }

    #[test]
    fn replay_matches_ledger() {
        let (g, e) = crate::corpus::gen(crate::corpus::Family::RandomClass { n: 16, seed: 3 }).unwrap();
        let l = apply_rules(&g, &e, &initial_charges(&g, &e));
        for v in 0..g.n() {
            assert_eq!(l.replay(Element::Vertex(v)), l.vertex_final[v]);
        }
        for f in 0..e.face_count() {
            assert_eq!(l.replay(Element::Face(f)), l.face_final[f]);
        }
        assert!(cross_check(&g, &e).is_ok());
    }

    #[test]
    fn single_transfer_replays_to_delta() {
        let (g, e) = embedded_k4();
        let l0 = initial_charges(&g, &e);
        let mut l = l0.clone();
        let t = Transfer { from: Element::Vertex(0), to: Element::Face(1), amount: Charge::twelfths(4), rule: Rule::R1 };
        l.record(t);
        assert_eq!(l.vertex_final[0] - l0.vertex_final[0], -t.amount);
        assert_eq!(l.face_final[1] - l0.face_final[1], t.amount);
        assert_eq!(l.replay(Element::Face(1)), l.face_final[1]);
    }

    #[test]
    fn disconnected_conservation_per_component() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let e = Embedding::new(&g, vec![vec![1, 2], vec![2, 0], vec![0, 1], vec![]]).unwrap();
        let r = audit(&g, &e);
        assert!(r.summary.conservation);
        assert_eq!(r.summary.sum_final, Charge::whole(-24));
    }

    #[test]
    fn case_labels() {
        let (g, e) = embedded_k4();
        assert_eq!(case_label(&g, &e, Element::Vertex(0)), "4");
        assert_eq!(case_label(&g, &e, Element::Face(0)), "1");
        let (g, e) = dodecahedron();
        assert_eq!(case_label(&g, &e, Element::Vertex(0)), "-");
        assert_eq!(case_label(&g, &e, Element::Face(0)), "2");
    }

    #[test]
    fn tsv_layout() {
        let (g, e) = embedded_cycle(3);
        let tsv = audit(&g, &e).to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[0], "element\tkind\tdegree\tcase\tmu\tmu_star");
        assert_eq!(lines[1], "0\tvertex\t2\t-\t-24/12\t-24/12");
        assert_eq!(lines.len(), 1 + 3 + 2);
    }
}
