//! Exhaustive backtracking search for partitions under arbitrary class specs.
//!
//! Vertices are assigned in descending degree order (ties by id), parts are
//! tried in ascending index order so the restricted part comes first. Forest
//! parts keep a rollback disjoint-set structure; every part keeps per-vertex
//! counters of assigned neighbors inside it.

use std::time::Instant;

use serde::Serialize;

use crate::dsu::RollbackDsu;
use crate::graph::Graph;
use crate::partition::{verify_partial, ClassSpec, Partition};

const UNASSIGNED: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Feasible(Partition),
    Infeasible,
    BudgetExceeded,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Feasible(_) => "feasible",
            Outcome::Infeasible => "infeasible",
            Outcome::BudgetExceeded => "budget_exceeded",
        }
    }

    pub fn partition(&self) -> Option<&Partition> {
        match self {
            Outcome::Feasible(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Outcome::Feasible(_))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub nodes: u64,
    pub millis: u64,
    /// Sampled nodes at which the incremental state was compared against a
    /// from-scratch recomputation.
    pub consistency_checks: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub outcome: Outcome,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Maximum number of search nodes (placement attempts).
    pub budget: u64,
    /// Cross-check the incremental state every this many nodes.
    pub check_every: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { budget: 50_000_000, check_every: None }
    }
}

impl SolveOptions {
    pub fn with_budget(budget: u64) -> Self {
        SolveOptions { budget, ..Default::default() }
    }
}

struct SearchState<'a> {
    g: &'a Graph,
    specs: &'a [ClassSpec],
    assign: Vec<usize>,
    /// `count[v * k + p]`: assigned neighbors of `v` in part `p`.
    count: Vec<u32>,
    forests: Vec<Option<RollbackDsu>>,
    nodes: u64,
    checks: u64,
    options: SolveOptions,
}

impl<'a> SearchState<'a> {
    fn new(g: &'a Graph, specs: &'a [ClassSpec], options: SolveOptions) -> Self {
        let k = specs.len();
        SearchState {
            g,
            specs,
            assign: vec![UNASSIGNED; g.n()],
            count: vec![0; g.n() * k],
            forests: specs.iter().map(|s| s.needs_acyclic().then(|| RollbackDsu::new(g.n()))).collect(),
            nodes: 0,
            checks: 0,
            options,
        }
    }

    fn k(&self) -> usize {
        self.specs.len()
    }

    /// Placing `v` in `p` keeps every part legal: degree caps hold for `v`
    /// and its in-part neighbors, and in a forest part no two in-part
    /// neighbors of `v` are already connected.
    fn can_place(&self, v: usize, p: usize) -> bool {
        let k = self.k();
        if let Some(cap) = self.specs[p].cap {
            if self.count[v * k + p] as usize > cap {
                return false;
            }
            let saturated = self
                .g
                .neighbors(v)
                .iter()
                .any(|&w| self.assign[w] == p && self.count[w * k + p] as usize >= cap);
            if saturated {
                return false;
            }
        }
        if let Some(dsu) = &self.forests[p] {
            let mut roots: Vec<usize> =
                self.g.neighbors(v).iter().filter(|&&w| self.assign[w] == p).map(|&w| dsu.find(w)).collect();
            let len = roots.len();
            roots.sort_unstable();
            roots.dedup();
            if roots.len() != len {
                return false;
            }
        }
        true
    }

    fn place(&mut self, v: usize, p: usize) -> usize {
        let k = self.k();
        self.assign[v] = p;
        let mut snapshot = 0;
        if let Some(dsu) = &mut self.forests[p] {
            snapshot = dsu.snapshot();
            for &w in self.g.neighbors(v) {
                if self.assign[w] == p {
                    dsu.union(v, w);
                }
            }
        }
        for &w in self.g.neighbors(v) {
            self.count[w * k + p] += 1;
        }
        snapshot
    }

    fn unplace(&mut self, v: usize, p: usize, snapshot: usize) {
        let k = self.k();
        for &w in self.g.neighbors(v) {
            self.count[w * k + p] -= 1;
        }
        if let Some(dsu) = &mut self.forests[p] {
            dsu.rollback(snapshot);
        }
        self.assign[v] = UNASSIGNED;
    }

    /// Every unassigned neighbor of `v` still has at least one legal part.
    fn neighbors_open(&self, v: usize) -> bool {
        self.g
            .neighbors(v)
            .iter()
            .filter(|&&w| self.assign[w] == UNASSIGNED)
            .all(|&w| (0..self.k()).any(|p| self.can_place(w, p)))
    }

    fn partial(&self) -> Vec<Option<usize>> {
        self.assign.iter().map(|&p| (p != UNASSIGNED).then_some(p)).collect()
    }

    /// Compares counters and legality decisions for `next` with a from-scratch
    /// verification. Panics on disagreement.
    fn cross_check(&mut self, next: Option<usize>) {
        self.checks += 1;
        let k = self.k();
        let partial = self.partial();
        assert!(verify_partial(self.g, &partial, self.specs).valid, "incremental state accepted an invalid assignment");
        for v in 0..self.g.n() {
            for p in 0..k {
                let direct = self.g.neighbors(v).iter().filter(|&&w| self.assign[w] == p).count();
                assert_eq!(self.count[v * k + p] as usize, direct, "stale neighbor counter at vertex {v}, part {p}");
            }
        }
        if let Some(v) = next {
            for p in 0..k {
                let mut trial = partial.clone();
                trial[v] = Some(p);
                let direct = verify_partial(self.g, &trial, self.specs).valid;
                assert_eq!(self.can_place(v, p), direct, "legality of vertex {v} in part {p} disagrees with recomputation");
            }
        }
    }

    fn search(&mut self, order: &[usize], depth: usize, sink: &mut dyn FnMut(&[usize]) -> bool) -> Step {
        if depth == order.len() {
            return if sink(&self.assign) { Step::Stop } else { Step::Continue };
        }
        let v = order[depth];
        for p in 0..self.k() {
            self.nodes += 1;
            if self.nodes > self.options.budget {
                return Step::Budget;
            }
            if let Some(every) = self.options.check_every {
                if self.nodes.is_multiple_of(every) {
                    self.cross_check(Some(v));
                }
            }
            if !self.can_place(v, p) {
                continue;
            }
            let snap = self.place(v, p);
            let step = if self.neighbors_open(v) { self.search(order, depth + 1, sink) } else { Step::Continue };
            self.unplace(v, p, snap);
            if step != Step::Continue {
                return step;
            }
        }
        Step::Continue
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Continue,
    Stop,
    Budget,
}

/// Descending degree, ties by id.
pub fn search_order(g: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    order
}

fn run(g: &Graph, specs: &[ClassSpec], options: SolveOptions, fixed: Option<(usize, usize)>) -> SolveResult {
    assert!(!specs.is_empty(), "at least one class spec is required");
    let start = Instant::now();
    let mut state = SearchState::new(g, specs, options);
    let mut order = search_order(g);
    let mut found: Option<Vec<usize>> = None;
    let step = match fixed {
        Some((v, p)) => {
            order.retain(|&w| w != v);
            state.nodes += 1;
            if state.can_place(v, p) {
                state.place(v, p);
                if state.neighbors_open(v) {
                    state.search(&order, 0, &mut |a| {
                        found = Some(a.to_vec());
                        true
                    })
                } else {
                    Step::Continue
                }
            } else {
                Step::Continue
            }
        }
        None => state.search(&order, 0, &mut |a| {
            found = Some(a.to_vec());
            true
        }),
    };
    let outcome = match (step, found) {
        (Step::Stop, Some(a)) => {
            Outcome::Feasible(Partition::new(a, specs.to_vec()).expect("search assigns in-range parts"))
        }
        (Step::Budget, _) => Outcome::BudgetExceeded,
        _ => Outcome::Infeasible,
    };
    let stats = SolveStats {
        nodes: state.nodes,
        millis: start.elapsed().as_millis() as u64,
        consistency_checks: state.checks,
    };
    SolveResult { outcome, stats }
}

/// Finds a valid partition, proves none exists, or runs out of budget.
pub fn solve(g: &Graph, specs: &[ClassSpec], options: SolveOptions) -> SolveResult {
    run(g, specs, options, None)
}

/// Splits the search over the part choices of the first vertex in search
/// order and explores the branches on separate threads. The first feasible
/// branch by index wins, and a branch only counts once every lower branch is
/// known infeasible, so the result equals the sequential one.
pub fn solve_parallel(g: &Graph, specs: &[ClassSpec], options: SolveOptions) -> SolveResult {
    let Some(&root) = search_order(g).first() else {
        return solve(g, specs, options);
    };
    let start = Instant::now();
    let results: Vec<SolveResult> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..specs.len())
            .map(|p| scope.spawn(move || run(g, specs, options, Some((root, p)))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("solver worker panicked")).collect()
    });
    let nodes = results.iter().map(|r| r.stats.nodes).sum();
    let consistency_checks = results.iter().map(|r| r.stats.consistency_checks).sum();
    let mut outcome = Outcome::Infeasible;
    for r in results {
        match r.outcome {
            Outcome::Infeasible => continue,
            other => {
                outcome = other;
                break;
            }
        }
    }
    SolveResult { outcome, stats: SolveStats { nodes, millis: start.elapsed().as_millis() as u64, consistency_checks } }
}

/// All valid partitions, up to `cap`, in lexicographic order of the
/// assignment vector.
pub fn enumerate_all(g: &Graph, specs: &[ClassSpec], cap: usize) -> Vec<Partition> {
    let mut state = SearchState::new(g, specs, SolveOptions { budget: u64::MAX, check_every: None });
    let order: Vec<usize> = (0..g.n()).collect();
    let mut out = Vec::new();
    if cap == 0 {
        return out;
    }
    state.search(&order, 0, &mut |a| {
        out.push(Partition::new(a.to_vec(), specs.to_vec()).unwrap());
        out.len() >= cap
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{f2_f, verify};

    /// Independent oracle: filter all k^n assignments through `verify`.
    fn brute_force(g: &Graph, specs: &[ClassSpec]) -> Vec<Vec<usize>> {
        let k = specs.len();
        let n = g.n();
        let total = k.pow(n as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut c = code;
            let mut parts = vec![0; n];
            for v in (0..n).rev() {
                parts[v] = c % k;
                c /= k;
            }
            let p = Partition::new(parts.clone(), specs.to_vec()).unwrap();
            if verify(g, &p).unwrap().valid {
                out.push(parts);
            }
        }
        out
    }

    #[test]
    fn k5_is_infeasible() {
        let g = Graph::complete(5);
        assert!(brute_force(&g, &f2_f()).is_empty());
        assert_eq!(solve(&g, &f2_f(), SolveOptions::default()).outcome, Outcome::Infeasible);
    }

    #[test]
    fn tree_is_feasible() {
        let g = Graph::from_edges(7, &[(0, 1), (0, 2), (0, 3), (3, 4), (3, 5), (5, 6)]).unwrap();
        let r = solve(&g, &f2_f(), SolveOptions::default());
        assert!(verify(&g, r.outcome.partition().unwrap()).unwrap().valid);
        let all_in_f = Partition::new(vec![1; 7], f2_f()).unwrap();
        assert!(verify(&g, &all_in_f).unwrap().valid);
    }

    #[test]
    fn c3_solution_shape() {
        let g = Graph::cycle(3);
        let r = solve(&g, &f2_f(), SolveOptions::default());
        let p = r.outcome.partition().unwrap();
        assert_eq!(p.part_size(0), 2);
        assert_eq!(p.part_size(1), 1);
    }

    #[test]
    fn enumeration_counts_match_brute_force() {
        let single = Graph::empty(1);
        assert_eq!(enumerate_all(&single, &f2_f(), 100).len(), 2);
        let c3 = Graph::cycle(3);
        assert_eq!(brute_force(&c3, &f2_f()).len(), 6);
        assert_eq!(enumerate_all(&c3, &f2_f(), 100).len(), 6);
        let c4 = Graph::cycle(4);
        let bf = brute_force(&c4, &f2_f());
        assert_eq!(bf.len(), 14);
        let en: Vec<Vec<usize>> = enumerate_all(&c4, &f2_f(), 100).iter().map(|p| p.parts().to_vec()).collect();
        assert_eq!(en, bf);
    }

    #[test]
    fn enumeration_respects_cap() {
        assert_eq!(enumerate_all(&Graph::cycle(4), &f2_f(), 3).len(), 3);
        assert!(enumerate_all(&Graph::cycle(4), &f2_f(), 0).is_empty());
    }

    #[test]
    fn budget_is_reported() {
        let g = Graph::complete(5);
        let r = solve(&g, &f2_f(), SolveOptions::with_budget(3));
        assert_eq!(r.outcome, Outcome::BudgetExceeded);
    }

    #[test]
    fn empty_graph() {
        let r = solve(&Graph::empty(0), &f2_f(), SolveOptions::default());
        assert!(r.outcome.is_feasible());
    }

    #[test]
    fn cross_checks_run_and_agree() {
        let g = Graph::complete(5);
        let opts = SolveOptions { budget: u64::MAX, check_every: Some(1) };
        let r = solve(&g, &[ClassSpec::forest(1), ClassSpec::any_forest(), ClassSpec::max_degree(1)], opts);
        assert!(r.stats.consistency_checks > 0);
    }

    #[test]
    fn parallel_matches_sequential() {
        for g in [Graph::complete(5), Graph::cycle(7), Graph::complete(4)] {
            let s = solve(&g, &f2_f(), SolveOptions::default());
            let p = solve_parallel(&g, &f2_f(), SolveOptions::default());
            assert_eq!(s.outcome, p.outcome);
        }
    }

    #[test]
    fn generalized_specs() {
        // K4 needs (D2, I, I)-style splits: one independent vertex each plus a
        // path of two.
        let g = Graph::complete(4);
        let specs = [ClassSpec::max_degree(2), ClassSpec::independent(), ClassSpec::independent()];
        let r = solve(&g, &specs, SolveOptions::default());
        assert!(verify(&g, r.outcome.partition().unwrap()).unwrap().valid);
        assert_eq!(solve(&g, &[ClassSpec::independent(); 3], SolveOptions::default()).outcome, Outcome::Infeasible);
    }
}
