//! Bounded-length cycle enumeration.
//!
//! A cycle is reported once, in canonical form: it starts at its smallest
//! vertex `s`, every other vertex is larger than `s`, and the second vertex is
//! smaller than the last (fixing the direction).

use std::collections::BTreeMap;

use crate::graph::Graph;

/// All cycles of length `3..=max_len`, in canonical form, sorted
/// lexicographically by length and then by vertex sequence.
pub fn cycles_up_to(g: &Graph, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(max_len);
    let mut on_path = vec![false; g.n()];
    for s in 0..g.n() {
        path.push(s);
        on_path[s] = true;
        extend(g, s, max_len, &mut path, &mut on_path, &mut out);
        on_path[s] = false;
        path.pop();
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn extend(
    g: &Graph,
    s: usize,
    max_len: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    let last = *path.last().unwrap();
    for &w in g.neighbors(last) {
        if w == s && path.len() >= 3 && path[1] < last {
            out.push(path.clone());
        }
        if w > s && !on_path[w] && path.len() < max_len {
            path.push(w);
            on_path[w] = true;
            extend(g, s, max_len, path, on_path, out);
            on_path[w] = false;
            path.pop();
        }
    }
}

/// Cycles of exactly `len`, canonical and sorted.
pub fn cycles_of_length(g: &Graph, len: usize) -> Vec<Vec<usize>> {
    cycles_up_to(g, len).into_iter().filter(|c| c.len() == len).collect()
}

/// For each length in `3..=max_len`, whether the graph has a cycle of exactly
/// that length.
pub fn short_cycles(g: &Graph, max_len: usize) -> BTreeMap<usize, bool> {
    assert!(max_len >= 3, "cycle length bound must be at least 3");
    let mut found: BTreeMap<usize, bool> = (3..=max_len).map(|l| (l, false)).collect();
    for c in cycles_up_to(g, max_len) {
        found.insert(c.len(), true);
    }
    found
}

/// First cycle of length 4 or 6 (4-cycles first), canonical form.
pub fn forbidden_cycle(g: &Graph) -> Option<Vec<usize>> {
    let all = cycles_up_to(g, 6);
    let first = |len| all.iter().find(|c| c.len() == len).cloned();
    first(4).or_else(|| first(6))
}

/// Membership in the hypothesis class: no 4-cycle and no 6-cycle.
/// Planarity is attested separately by an embedding.
pub fn in_class(g: &Graph) -> bool {
    let c = short_cycles(g, 6);
    !c[&4] && !c[&6]
}

/// Length of a shortest cycle, if any.
pub fn girth(g: &Graph) -> Option<usize> {
    // Breadth-first search from every vertex; the shortest cycle through the
    // root closes at the first non-tree edge between two explored vertices.
    let n = g.n();
    let mut best: Option<usize> = None;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w {
                    let len = dist[u] + dist[w] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: a vertex subset of size `l` spans an `l`-cycle iff
    /// some ordering of it is a closed path. Only usable for tiny graphs.
    fn naive_has_cycle(g: &Graph, len: usize) -> bool {
        fn perms(items: &[usize], acc: &mut Vec<usize>, used: &mut [bool], g: &Graph) -> bool {
            if acc.len() == items.len() {
                return g.has_edge(acc[0], *acc.last().unwrap());
            }
            for i in 0..items.len() {
                if used[i] || (!acc.is_empty() && !g.has_edge(*acc.last().unwrap(), items[i])) {
                    continue;
                }
                used[i] = true;
                acc.push(items[i]);
                let ok = perms(items, acc, used, g);
                acc.pop();
                used[i] = false;
                if ok {
                    return true;
                }
            }
            false
        }
        let n = g.n();
        (0u32..1 << n).filter(|m| m.count_ones() as usize == len).any(|mask| {
            let items: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            perms(&items, &mut Vec::new(), &mut vec![false; len], g)
        })
    }

    #[test]
    fn c6_lengths() {
        let c = short_cycles(&Graph::cycle(6), 6);
        assert_eq!(c.into_iter().collect::<Vec<_>>(), vec![(3, false), (4, false), (5, false), (6, true)]);
    }

    #[test]
    fn k4_lengths() {
        let g = Graph::complete(4);
        let c = short_cycles(&g, 6);
        assert_eq!(c.into_iter().collect::<Vec<_>>(), vec![(3, true), (4, true), (5, false), (6, false)]);
        // K4 has 4 triangles and 3 four-cycles.
        assert_eq!(cycles_of_length(&g, 3).len(), 4);
        assert_eq!(cycles_of_length(&g, 4).len(), 3);
        for l in 3..=6 {
            assert_eq!(naive_has_cycle(&g, l), l <= 4);
        }
    }

    #[test]
    fn class_membership() {
        assert!(in_class(&Graph::cycle(5)));
        assert!(!in_class(&Graph::cycle(4)));
        assert!(!in_class(&Graph::cycle(6)));
        assert!(in_class(&Graph::cycle(3)));
    }

    #[test]
    fn girth_matches_cycles() {
        assert_eq!(girth(&Graph::complete(4)), Some(3));
        assert_eq!(girth(&Graph::cycle(7)), Some(7));
        assert_eq!(girth(&Graph::path(5)), None);
    }

    #[test]
    fn agrees_with_naive_on_small_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let n = rng.gen_range(3..=8);
            let edges: Vec<_> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .filter(|_| rng.gen_bool(0.45))
                .collect();
            let g = Graph::from_edges(n, &edges).unwrap();
            let found = short_cycles(&g, 6);
            for l in 3..=6 {
                assert_eq!(found[&l], naive_has_cycle(&g, l), "len {l} on {edges:?}");
            }
        }
    }
}
