/// Disjoint sets with union by size and an undo log. No path compression, so
/// every union can be rolled back in O(1).
#[derive(Debug, Clone)]
pub struct RollbackDsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<(usize, usize)>,
}

impl RollbackDsu {
    pub fn new(n: usize) -> Self {
        RollbackDsu { parent: (0..n).collect(), size: vec![1; n], history: Vec::new() }
    }

    pub fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Returns false (and records nothing) if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.history.push((ra, rb));
        true
    }

    pub fn snapshot(&self) -> usize {
        self.history.len()
    }

    pub fn rollback(&mut self, snapshot: usize) {
        while self.history.len() > snapshot {
            let (ra, rb) = self.history.pop().unwrap();
            self.parent[rb] = rb;
            self.size[ra] -= self.size[rb];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_and_rollback() {
        let mut d = RollbackDsu::new(5);
        let s0 = d.snapshot();
        assert!(d.union(0, 1));
        assert!(d.union(2, 3));
        let s1 = d.snapshot();
        assert!(d.union(1, 3));
        assert!(!d.union(0, 2));
        assert!(d.same(0, 3));
        d.rollback(s1);
        assert!(!d.same(0, 3));
        assert!(d.same(2, 3));
        d.rollback(s0);
        assert!((0..5).all(|v| d.find(v) == v));
    }
}
