//! The acceptance battery: ten criteria evaluated over a generated corpus.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::charge::Charge;
use crate::constructor::{
    c3_gadget, construct_with, derive_row6_placement, extend_c3, set_partitions, ConstructOptions, Telemetry, ROW6,
};
use crate::corpus::{build_corpus, standard_families, CorpusEntry, CorpusError};
use crate::cycles::in_class;
use crate::discharging::{apply_rules, component_sums, initial_charges};
use crate::embedding::check_observation_face;
use crate::graph::Graph;
use crate::partition::{f2_f, normalize, verify, verify_partial, ClassSpec, Partition, Requirement, V1, V2};
use crate::solver::{solve, Outcome, SolveOptions};
use crate::structure::{counting_bounds_all, find_all_configurations, find_reducible, ConfigKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// A failure here is a research-grade event, not a bug report.
    pub research_grade: bool,
}

impl CriterionResult {
    fn new(id: u8, name: &'static str, passed: bool, detail: String) -> Self {
        CriterionResult { id, name, passed, detail, research_grade: false }
    }

    pub fn line(&self) -> String {
        format!("{} {:>2} {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.detail)
    }
}

/// Maps `f` over `items` on all available cores, keeping input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

pub fn corpus(seed: u64) -> Result<Vec<CorpusEntry>, CorpusError> {
    build_corpus(&standard_families(seed))
}

fn first_ids(ids: &[String]) -> String {
    let shown: Vec<&str> = ids.iter().take(5).map(String::as_str).collect();
    if ids.len() > 5 {
        format!("{} ...", shown.join(", "))
    } else {
        shown.join(", ")
    }
}

pub fn exact_feasibility(corpus: &[CorpusEntry]) -> CriterionResult {
    let results = par_map(corpus, |c| {
        let r = solve(&c.graph, &f2_f(), SolveOptions::default());
        let ok = match &r.outcome {
            Outcome::Feasible(p) => verify(&c.graph, p).map(|v| v.valid).unwrap_or(false),
            _ => false,
        };
        (ok, r.stats.nodes)
    });
    let failed: Vec<String> = corpus.iter().zip(&results).filter(|(_, r)| !r.0).map(|(c, _)| c.id.clone()).collect();
    let nodes: u64 = results.iter().map(|r| r.1).sum();
    CriterionResult::new(
        1,
        "exact solver finds (F2,F)-partitions",
        failed.is_empty() && corpus.len() >= 500,
        format!(
            "{}/{} feasible and re-verified, {} search nodes{}",
            corpus.len() - failed.len(),
            corpus.len(),
            nodes,
            if failed.is_empty() { String::new() } else { format!("; failing: {}", first_ids(&failed)) }
        ),
    )
}

#[derive(Debug, Default)]
struct ConstructTally {
    verified: usize,
    disagreements: Vec<String>,
    fallbacks: usize,
    research: bool,
    suspects: usize,
    repairs: usize,
    kinds: BTreeMap<String, usize>,
}

fn tally_construct(corpus: &[CorpusEntry], exact: &[Option<bool>], options: ConstructOptions) -> ConstructTally {
    let runs = par_map(corpus, |c| construct_with(&c.graph, &c.embedding, options));
    let mut t = ConstructTally::default();
    for ((c, run), exact) in corpus.iter().zip(runs).zip(exact) {
        let ok = match run {
            Ok(b) => {
                t.fallbacks += b.trace.fallbacks;
                t.research |= b.trace.research_grade();
                for tel in &b.trace.telemetry {
                    if let Telemetry::TableRowSuspect { repaired_locally, .. } = tel {
                        t.suspects += 1;
                        t.repairs += usize::from(*repaired_locally);
                    }
                }
                for s in &b.trace.steps {
                    let k = s.kind.map_or("solver".to_string(), |k| format!("{k:?}"));
                    *t.kinds.entry(k).or_default() += 1;
                }
                verify(&c.graph, &b.partition).map(|v| v.valid).unwrap_or(false)
            }
            Err(_) => {
                t.research = true;
                false
            }
        };
        t.verified += usize::from(ok);
        if !ok || exact.is_some_and(|f| f != ok) {
            t.disagreements.push(c.id.clone());
        }
    }
    t
}

pub fn constructor_soundness(corpus: &[CorpusEntry]) -> CriterionResult {
    let exact: Vec<Option<bool>> = par_map(corpus, |c| {
        (c.graph.n() <= 18).then(|| solve(&c.graph, &f2_f(), SolveOptions::default()).outcome.is_feasible())
    });
    let standard = tally_construct(corpus, &exact, ConstructOptions::default());
    let largest = tally_construct(corpus, &exact, ConstructOptions::largest_first());
    let compared = exact.iter().filter(|e| e.is_some()).count();
    let describe = |name: &str, t: &ConstructTally| {
        format!(
            "{name} order: {}/{} verify, steps {:?}, fallbacks {}, table-row telemetry {} ({} local repairs){}",
            t.verified,
            corpus.len(),
            t.kinds,
            t.fallbacks,
            t.suspects,
            t.repairs,
            if t.disagreements.is_empty() { String::new() } else { format!(", failing: {}", first_ids(&t.disagreements)) }
        )
    };
    let mut r = CriterionResult::new(
        2,
        "constructor returns verifying partitions",
        standard.disagreements.is_empty() && largest.disagreements.is_empty(),
        format!(
            "feasibility compared with the exact solver on {compared} graphs with n <= 18; {}; {}",
            describe("standard", &standard),
            describe("largest-first", &largest)
        ),
    );
    r.research_grade = standard.research || largest.research;
    r
}

/// Feasibility by trying all `parts^n` assignments.
pub fn naive_feasible(g: &Graph, specs: &[ClassSpec]) -> bool {
    let k = specs.len();
    let total = k.pow(g.n() as u32);
    (0..total).any(|mut code| {
        let assign: Vec<Option<usize>> = (0..g.n())
            .map(|_| {
                let p = code % k;
                code /= k;
                Some(p)
            })
            .collect();
        verify_partial(g, &assign, specs).valid
    })
}

/// Erdos-Renyi graph `G(n, p)`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> Graph {
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|_| rng.gen_bool(p)).collect();
    Graph::from_edges(n, &edges).expect("pairs are distinct")
}

pub fn oracle_equivalence(seed: u64) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0A11);
    let specs = [("F2,F", f2_f()), ("F1,F", vec![ClassSpec::forest(1), ClassSpec::any_forest()])];
    let mut mismatches = Vec::new();
    let mut counts = BTreeMap::new();
    for i in 0..200 {
        let n = rng.gen_range(1..=9);
        let p = rng.gen_range(0.2..0.9);
        let g = random_graph(&mut rng, n, p);
        for (name, s) in &specs {
            let fast = solve(&g, s, SolveOptions::default()).outcome.is_feasible();
            let slow = naive_feasible(&g, s);
            *counts.entry((*name, fast)).or_insert(0) += 1;
            if fast != slow {
                mismatches.push(format!("graph {i} ({name})"));
            }
        }
    }
    let summary: Vec<String> =
        counts.iter().map(|((s, f), c)| format!("{s} {}: {c}", if *f { "feasible" } else { "infeasible" })).collect();
    CriterionResult::new(
        3,
        "solver agrees with naive enumeration",
        mismatches.is_empty(),
        format!("200 graphs x 2 specs, {} mismatches ({})", mismatches.len(), summary.join(", ")),
    )
}

pub fn k5_infeasible() -> CriterionResult {
    let k5 = Graph::complete(5);
    let solved = solve(&k5, &f2_f(), SolveOptions::default()).outcome;
    let brute = naive_feasible(&k5, &f2_f());
    CriterionResult::new(
        4,
        "K5 has no (F2,F)-partition",
        solved == Outcome::Infeasible && !brute,
        format!("solver: {}, brute force over 32 assignments: {}", solved.label(), if brute { "feasible" } else { "infeasible" }),
    )
}

pub fn charge_conservation(corpus: &[CorpusEntry]) -> CriterionResult {
    let target = Charge::whole(-12);
    let bad: Vec<String> = par_map(corpus, |c| {
        let l = apply_rules(&c.graph, &c.embedding, &initial_charges(&c.graph, &c.embedding));
        let before = component_sums(&c.embedding, (&l.vertex_initial, &l.face_initial));
        let after = component_sums(&c.embedding, (&l.vertex_final, &l.face_final));
        let ok = before.iter().chain(&after).all(|&s| s == target) && l.final_total() == l.initial_total();
        (!ok).then(|| c.id.clone())
    })
    .into_iter()
    .flatten()
    .collect();
    CriterionResult::new(
        5,
        "charge is conserved at -12 per component",
        bad.is_empty(),
        format!("{}/{} graphs conserve exactly in twelfths", corpus.len() - bad.len(), corpus.len()),
    )
}

pub fn reducibility(corpus: &[CorpusEntry]) -> CriterionResult {
    let in_class_entries: Vec<&CorpusEntry> = corpus.iter().filter(|c| in_class(&c.graph)).collect();
    let results = par_map(&in_class_entries, |c| {
        let found = find_reducible(&c.graph, &c.embedding).map(|c| c.kind);
        // A graph with minimum degree 3, no C1..C3 and every final charge
        // non-negative would contradict the total of -12.
        let incoherent = {
            let min3 = c.graph.min_degree().is_some_and(|d| d >= 3);
            let no_cfg = !find_all_configurations(&c.graph, &c.embedding).iter().any(|k| k.kind != ConfigKind::C0);
            let l = apply_rules(&c.graph, &c.embedding, &initial_charges(&c.graph, &c.embedding));
            let nonneg = l.vertex_final.iter().chain(&l.face_final).all(|x| !x.is_negative());
            min3 && no_cfg && nonneg
        };
        (found, incoherent)
    });
    let missing: Vec<String> =
        in_class_entries.iter().zip(&results).filter(|(_, r)| r.0.is_none()).map(|(c, _)| c.id.clone()).collect();
    let incoherent = results.iter().filter(|r| r.1).count();
    let mut kinds: BTreeMap<ConfigKind, usize> = BTreeMap::new();
    for k in results.iter().filter_map(|r| r.0) {
        *kinds.entry(k).or_default() += 1;
    }
    let mut r = CriterionResult::new(
        6,
        "every in-class graph has a reducible configuration",
        missing.is_empty() && incoherent == 0,
        format!(
            "{} in-class graphs, {} without a configuration, {} incoherent charge states; first found {:?}{}",
            in_class_entries.len(),
            missing.len(),
            incoherent,
            kinds,
            if missing.is_empty() { String::new() } else { format!("; missing: {}", first_ids(&missing)) }
        ),
    );
    r.research_grade = !r.passed;
    r
}

pub fn counting_bounds(corpus: &[CorpusEntry]) -> CriterionResult {
    let mut checked_graphs = 0;
    let mut checked_vertices = 0;
    let mut asserted_failures = Vec::new();
    let mut excluded = Vec::new();
    let mut report_only: BTreeMap<&'static str, usize> = BTreeMap::new();
    for c in corpus.iter().filter(|c| in_class(&c.graph)) {
        let reports = counting_bounds_all(&c.graph, &c.embedding).expect("graph is in class");
        let degenerate = c.embedding.face_count() < 3;
        let fails: Vec<String> = reports
            .iter()
            .flat_map(|r| r.checks.iter().filter(|k| k.asserted && !k.holds).map(move |k| format!("{}@{} {}", c.id, r.vertex, k.name)))
            .collect();
        if degenerate {
            if !fails.is_empty() {
                excluded.push(format!("{} ({} failures)", c.family, fails.len()));
            }
            continue;
        }
        checked_graphs += 1;
        checked_vertices += reports.len();
        asserted_failures.extend(fails);
        for r in &reports {
            for k in r.checks.iter().filter(|k| !k.asserted && !k.holds) {
                *report_only.entry(k.name).or_default() += 1;
            }
        }
    }
    CriterionResult::new(
        7,
        "counting bounds (i), (ii), (iii) and corrected (iv) hold",
        asserted_failures.is_empty(),
        format!(
            "{checked_vertices} vertices in {checked_graphs} graphs, {} asserted failures{}; excluded graphs with fewer than 3 faces: {}; report-only failures: {:?}",
            asserted_failures.len(),
            if asserted_failures.is_empty() { String::new() } else { format!(" ({})", first_ids(&asserted_failures)) },
            if excluded.is_empty() { "none failing".to_string() } else { excluded.join(", ") },
            report_only
        ),
    )
}

/// A random valid (F2,F)-partition, built greedily in random order; `None`
/// if 100 greedy attempts get stuck.
pub fn random_valid_partition(rng: &mut impl Rng, g: &Graph) -> Option<Partition> {
    use rand::seq::SliceRandom;
    let specs = f2_f();
    'attempt: for _ in 0..100 {
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.shuffle(rng);
        let mut assign = vec![None; g.n()];
        for v in order {
            let first = if rng.gen_bool(0.6) { V1 } else { V2 };
            assign[v] = [first, 1 - first].into_iter().find(|&p| {
                assign[v] = Some(p);
                verify_partial(g, &assign, &specs).valid
            });
            if assign[v].is_none() {
                continue 'attempt;
            }
        }
        return Some(Partition::new(assign.into_iter().map(Option::unwrap).collect(), specs).unwrap());
    }
    None
}

/// A random graph with maximum degree at most `cap`.
pub fn random_bounded_graph(rng: &mut impl Rng, n: usize, tries: usize, cap: usize) -> Graph {
    let mut g = Graph::empty(n);
    let mut edges = Vec::new();
    for _ in 0..tries {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && !g.has_edge(u, v) && g.degree(u) < cap && g.degree(v) < cap {
            edges.push((u, v));
            g = Graph::from_edges(n, &edges).unwrap();
        }
    }
    g
}

pub fn normalization_safety(seed: u64) -> CriterionResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4E0);
    let mut failures = Vec::new();
    let mut moves = 0;
    let mut constrained = 0;
    let mut i = 0;
    while i < 1000 {
        let n = rng.gen_range(3..=14);
        let cap = rng.gen_range(3..=5);
        let g = random_bounded_graph(&mut rng, n, 3 * n, cap);
        let Some(p) = random_valid_partition(&mut rng, &g) else { continue };
        i += 1;
        let reqs: Vec<(usize, Requirement)> = (0..n)
            .filter_map(|v| match g.degree(v) {
                d if d <= 2 && rng.gen_bool(0.3) => Some((v, Requirement::NoV1Neighbors)),
                d if d <= 3 && rng.gen_bool(0.5) => Some((v, Requirement::NotSaturated)),
                _ => None,
            })
            .collect();
        constrained += reqs.len();
        let ok = match normalize(&g, &p, &reqs) {
            Ok(norm) => {
                moves += norm.moved.len();
                let q = &norm.partition;
                let met = reqs.iter().all(|&(v, r)| {
                    let d1 = g.neighbors(v).iter().filter(|&&w| q.part(w) == V1).count();
                    q.part(v) == V2
                        || match r {
                            Requirement::NotSaturated => d1 <= 1,
                            Requirement::NoV1Neighbors => d1 == 0,
                        }
                });
                verify(&g, q).map(|v| v.valid).unwrap_or(false) && met && q.part_size(V1) <= p.part_size(V1)
            }
            Err(_) => false,
        };
        if !ok {
            failures.push(i.to_string());
        }
    }
    CriterionResult::new(
        8,
        "normalization keeps partitions valid",
        failures.is_empty(),
        format!("1000 triples, {constrained} constrained vertices, {moves} moves, {} failures", failures.len()),
    )
}

pub fn observation_faces(corpus: &[CorpusEntry]) -> CriterionResult {
    let mut checked = 0;
    let mut violating = Vec::new();
    let mut convention = 0;
    for c in corpus.iter().filter(|c| in_class(&c.graph) && c.embedding.face_count() >= 3) {
        checked += 1;
        let r = check_observation_face(&c.graph, &c.embedding);
        if !r.is_clean() {
            violating.push(c.id.clone());
        }
        if !r.convention_dependent.is_empty() {
            convention += 1;
        }
    }
    CriterionResult::new(
        9,
        "no 4-faces and no 3-face next to a short face",
        violating.is_empty(),
        format!(
            "{checked} in-class graphs with at least 3 faces, {} with violations; {convention} with cut-vertex-dependent findings",
            violating.len()
        ),
    )
}

pub fn row6_repair(seed: u64) -> CriterionResult {
    let derived = derive_row6_placement();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6);
    let contexts = set_partitions(&[0, 1, 2, 3, 4]);
    let mut failures = 0;
    for _ in 0..50 {
        let ctx = &contexts[rng.gen_range(0..contexts.len())];
        let gad = c3_gadget(V2, [V2; 4], ctx, &[]);
        let ok = match extend_c3(&gad.graph, &gad.assign, gad.v, gad.vs, gad.p) {
            Ok(e) => {
                let p = Partition::new(e.parts.clone(), f2_f()).unwrap();
                e.case == "row 6"
                    && matches!(e.telemetry, Some(Telemetry::TableRowSuspect { repaired_locally: false, .. }))
                    && verify(&gad.graph, &p).map(|v| v.valid).unwrap_or(false)
            }
            Err(_) => false,
        };
        failures += usize::from(!ok);
    }
    CriterionResult::new(
        10,
        "re-derived 6-vertex table row",
        derived == vec![ROW6] && failures == 0,
        format!(
            "brute force over 16 placements x {} contexts leaves {:?}; 50 random gadgets, {failures} failures",
            contexts.len(),
            derived.iter().map(|p| p.map(|x| if x == V1 { 'A' } else { 'B' }).iter().collect::<String>()).collect::<Vec<_>>()
        ),
    )
}

/// Runs all ten criteria on the standard corpus for `seed`.
pub fn run(seed: u64) -> Result<Vec<CriterionResult>, CorpusError> {
    let corpus = corpus(seed)?;
    Ok(vec![
        exact_feasibility(&corpus),
        constructor_soundness(&corpus),
        oracle_equivalence(seed),
        k5_infeasible(),
        charge_conservation(&corpus),
        reducibility(&corpus),
        counting_bounds(&corpus),
        normalization_safety(seed),
        observation_faces(&corpus),
        row6_repair(seed),
    ])
}
