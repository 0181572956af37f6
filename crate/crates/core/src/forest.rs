//! Spanning forests over a point set: union-find plus an explicit weighted
//! edge list. Every MST path in the crate accumulates edges here.

/// One forest edge. `weight` is the crossing distance under whatever line
/// set the producing algorithm states (full set for exact MSTs, the sampled
/// subset for bounded propagation, rewritten to the full set by the
/// approximation drivers).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForestEdge {
    pub a: u32,
    pub b: u32,
    pub weight: u64,
}

#[derive(Debug, Clone)]
pub struct SpanningForest {
    parent: Vec<u32>,
    rank: Vec<u8>,
    components: usize,
    pub edges: Vec<ForestEdge>,
}

impl SpanningForest {
    pub fn new(n: usize) -> Self {
        SpanningForest {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
            components: n,
            edges: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    pub fn connected(&mut self, a: u32, b: u32) -> bool {
        self.find(a) == self.find(b)
    }

    /// Adds the edge if it joins two components; discards it otherwise.
    /// Returns whether it was added.
    pub fn try_add_edge(&mut self, a: u32, b: u32, weight: u64) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        match self.rank[ra as usize].cmp(&self.rank[rb as usize]) {
            std::cmp::Ordering::Less => self.parent[ra as usize] = rb,
            std::cmp::Ordering::Greater => self.parent[rb as usize] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb as usize] = ra;
                self.rank[ra as usize] += 1;
            }
        }
        self.components -= 1;
        self.edges.push(ForestEdge { a, b, weight });
        true
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    pub fn is_spanning(&self) -> bool {
        self.components <= 1
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Edge list as (a, b, weight) triples, as emitted by the CLI.
    pub fn edge_triples(&self) -> Vec<(u32, u32, u64)> {
        self.edges.iter().map(|e| (e.a, e.b, e.weight)).collect()
    }

    /// Checks the forest invariant the slow way: the edge list must be
    /// acyclic and induce exactly the union-find components.
    pub fn check_consistency(&self) -> bool {
        let n = self.parent.len();
        let mut uf = SpanningForest::new(n);
        for e in &self.edges {
            if !uf.try_add_edge(e.a, e.b, e.weight) {
                return false; // cycle
            }
        }
        if uf.components != self.components {
            return false;
        }
        let mut mine = self.clone();
        for i in 0..n as u32 {
            for j in 0..n as u32 {
                if uf.connected(i, j) != mine.connected(i, j) {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_and_cycle_rejection() {
        let mut f = SpanningForest::new(4);
        assert_eq!(f.component_count(), 4);
        assert!(f.try_add_edge(0, 1, 5));
        assert!(f.try_add_edge(2, 3, 1));
        assert!(!f.is_spanning());
        assert!(f.try_add_edge(1, 2, 2));
        assert!(f.is_spanning());
        assert!(!f.try_add_edge(0, 3, 9));
        assert_eq!(f.edges.len(), 3);
        assert_eq!(f.total_weight(), 8);
        assert!(f.check_consistency());
    }

    #[test]
    fn empty_and_singleton() {
        let f = SpanningForest::new(0);
        assert!(f.is_spanning());
        let f = SpanningForest::new(1);
        assert!(f.is_spanning());
        assert_eq!(f.total_weight(), 0);
    }
}
