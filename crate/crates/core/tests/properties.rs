use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pathforest::constructor::{construct, construct_with, ConstructOptions};
use pathforest::corpus::{grown_class, random_class, random_planar};
use pathforest::cycles::in_class;
use pathforest::embedding::delete_vertices;
use pathforest::io::{read_partition, read_pge, write_partition, write_pge};
use pathforest::partition::{normalize, v1_degree, Requirement, V1, V2};
use pathforest::solver::solve_parallel;
use pathforest::structure::is_poor_3face;
use pathforest::suite::{random_bounded_graph, random_graph, random_valid_partition};
use pathforest::{f2_f, solve, verify, ClassSpec, Graph, Partition, SolveOptions};

/// Independent check: every part respects its degree cap, and a part that
/// must be a forest has `edges == vertices - components`.
fn oracle_valid(g: &Graph, parts: &[usize], specs: &[ClassSpec]) -> bool {
    specs.iter().enumerate().all(|(p, spec)| {
        let keep: Vec<bool> = parts.iter().map(|&q| q == p).collect();
        let (h, _) = g.induced(&keep);
        let degree_ok = spec.cap.is_none_or(|c| (0..h.n()).all(|v| h.degree(v) <= c));
        let acyclic = h.m() + h.components().1 == h.n();
        degree_ok && (!spec.needs_acyclic() || acyclic)
    })
}

fn spec_strategy() -> impl Strategy<Value = Vec<ClassSpec>> {
    let one = prop_oneof![
        Just(ClassSpec::any_forest()),
        (0usize..3).prop_map(ClassSpec::forest),
        (0usize..3).prop_map(ClassSpec::max_degree),
    ];
    prop::collection::vec(one, 2..=3)
}

fn small_graph() -> impl Strategy<Value = Graph> {
    (1usize..=8, 0.1f64..0.9, any::<u64>())
        .prop_map(|(n, p, seed)| random_graph(&mut ChaCha8Rng::seed_from_u64(seed), n, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn verify_matches_oracle(g in small_graph(), specs in spec_strategy(), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let parts: Vec<usize> = (0..g.n()).map(|_| rng.gen_range(0..specs.len())).collect();
        let p = Partition::new(parts.clone(), specs.clone()).unwrap();
        let v = verify(&g, &p).unwrap();
        prop_assert_eq!(v.valid, oracle_valid(&g, &parts, &specs));
        if let Some(w) = v.witness {
            prop_assert!(w.recheck(&g, &p.as_partial()));
        }
    }

    #[test]
    fn solver_matches_enumeration(g in small_graph(), specs in spec_strategy()) {
        let k = specs.len();
        let brute = (0..k.pow(g.n() as u32)).any(|mut code| {
            let parts: Vec<usize> = (0..g.n()).map(|_| { let p = code % k; code /= k; p }).collect();
            oracle_valid(&g, &parts, &specs)
        });
        let r = solve(&g, &specs, SolveOptions::default());
        prop_assert_eq!(r.outcome.is_feasible(), brute);
        if let Some(p) = r.outcome.partition() {
            prop_assert!(oracle_valid(&g, p.parts(), &specs));
        }
    }

    #[test]
    fn solver_is_deterministic(n in 4usize..=14, p in 0.15f64..0.6, seed in any::<u64>()) {
        let g = random_graph(&mut ChaCha8Rng::seed_from_u64(seed), n, p);
        let a = solve(&g, &f2_f(), SolveOptions::default());
        let b = solve(&g, &f2_f(), SolveOptions::default());
        prop_assert_eq!(&a.outcome, &b.outcome);
        prop_assert_eq!(a.stats.nodes, b.stats.nodes);
        let c = solve_parallel(&g, &f2_f(), SolveOptions::default());
        let d = solve_parallel(&g, &f2_f(), SolveOptions::default());
        prop_assert_eq!(&c.outcome, &d.outcome);
        prop_assert_eq!(c.outcome.is_feasible(), a.outcome.is_feasible());
    }

    #[test]
    fn normalization_keeps_validity(n in 3usize..=14, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_bounded_graph(&mut rng, n, 3 * n, 3);
        let Some(p) = random_valid_partition(&mut rng, &g) else { return Ok(()) };
        let mut reqs = Vec::new();
        for v in 0..n {
            let (pick, strict) = (rng.gen_bool(0.5), rng.gen_bool(0.5));
            match g.degree(v) {
                _ if !pick => {}
                0..=2 if strict => reqs.push((v, Requirement::NoV1Neighbors)),
                0..=3 => reqs.push((v, Requirement::NotSaturated)),
                _ => {}
            }
        }
        let norm = normalize(&g, &p, &reqs).unwrap();
        prop_assert!(verify(&g, &norm.partition).unwrap().valid);
        for &(v, r) in &reqs {
            if norm.partition.part(v) == V1 {
                let d = v1_degree(&g, norm.partition.parts(), v);
                let met = match r {
                    Requirement::NotSaturated => d <= 1,
                    Requirement::NoV1Neighbors => d == 0,
                };
                prop_assert!(met, "vertex {} keeps {} V1-neighbors under {:?}", v, d, r);
            }
        }
        for &v in &norm.moved {
            prop_assert_eq!((p.part(v), norm.partition.part(v)), (V1, V2));
        }
    }

    #[test]
    fn pge_round_trip(n in 3usize..=30, seed in any::<u64>()) {
        let (g, e) = random_planar(n, seed);
        let text = write_pge(&g, &e);
        let (h, f) = read_pge(&text).unwrap();
        prop_assert_eq!(&h, &g);
        prop_assert_eq!(write_pge(&h, &f), text);
        prop_assert_eq!(f.face_signature(), e.face_signature());
        let parts: Vec<usize> = (0..n).map(|v| (v * 7 + seed as usize) % 2).collect();
        prop_assert_eq!(read_partition(&write_partition(&parts), n, 2).unwrap(), parts);
    }

    #[test]
    fn deletion_keeps_embedding_consistent(n in 3usize..=25, seed in any::<u64>(), mask in any::<u32>()) {
        let (g, e) = random_planar(n, seed);
        let remove: Vec<usize> = (0..n).filter(|v| mask >> (v % 32) & 1 == 1).collect();
        let sub = delete_vertices(&g, &e, &remove);
        prop_assert_eq!(sub.graph.n(), n - remove.len());
        for (c, &p) in sub.original.iter().enumerate() {
            prop_assert!(!remove.contains(&p));
            let expected: Vec<usize> = e.rotation(p).iter().copied().filter(|w| !remove.contains(w)).collect();
            let got: Vec<usize> = sub.embedding.rotation(c).iter().map(|&w| sub.original[w]).collect();
            prop_assert_eq!(got, expected);
        }
        let keep: Vec<bool> = (0..n).map(|v| !remove.contains(&v)).collect();
        prop_assert_eq!(sub.graph.m(), g.induced(&keep).0.m());
        let walk_total: usize = sub.embedding.faces().iter().map(|f| f.degree).sum();
        prop_assert_eq!(walk_total, 2 * sub.graph.m());
        if in_class(&g) {
            prop_assert!(in_class(&sub.graph));
        }
    }

    #[test]
    fn poor_faces_are_local(n in 6usize..=30, seed in any::<u64>()) {
        let (g, e) = grown_class(n, seed);
        for f in e.faces().iter().filter(|f| f.degree == 3) {
            let dist = g.distances_from(f.members());
            let far: Vec<usize> = (0..g.n()).filter(|&v| dist[v] > 3).collect();
            let sub = delete_vertices(&g, &e, &far);
            let child = |v: usize| sub.original.iter().position(|&p| p == v).unwrap();
            let (a, b) = (f.walk[0], f.walk[1]);
            let sf = sub.embedding.face_of_dart(child(a), child(b));
            prop_assert_eq!(sub.embedding.faces()[sf].degree, 3);
            prop_assert_eq!(
                is_poor_3face(&g, &e, f.id).unwrap(),
                is_poor_3face(&sub.graph, &sub.embedding, sf).unwrap()
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn construct_verifies_and_matches_solver(n in 3usize..=16, seed in any::<u64>()) {
        let (g, e) = random_class(n, seed);
        let built = construct(&g, &e).unwrap();
        prop_assert!(verify(&g, &built.partition).unwrap().valid);
        prop_assert_eq!(built.trace.replay(n), built.partition.parts().to_vec());
        prop_assert!(solve(&g, &f2_f(), SolveOptions::default()).outcome.is_feasible());
        prop_assert_eq!(built.trace.fallbacks, 0);
    }

    #[test]
    fn largest_first_construction_needs_no_fallback(n in 8usize..=60, seed in any::<u64>()) {
        let (g, e) = grown_class(n, seed);
        let built = construct_with(&g, &e, ConstructOptions::largest_first()).unwrap();
        prop_assert!(verify(&g, &built.partition).unwrap().valid);
        prop_assert_eq!(built.trace.fallbacks, 0, "telemetry: {:?}", built.trace.telemetry);
        prop_assert!(!built.trace.research_grade());
    }
}
