/// Disjoint sets over `0..n` that remember the oldest member of each set.
///
/// "Oldest" is the smallest `(birth, index)` pair, which is what the elder
/// rule keeps alive when two components merge.
pub(crate) struct ElderUnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    oldest: Vec<(f64, usize)>,
}

impl ElderUnionFind {
    pub(crate) fn new(births: &[f64]) -> Self {
        Self {
            parent: (0..births.len()).collect(),
            rank: vec![0; births.len()],
            oldest: births.iter().copied().zip(0..).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Merges the sets of `a` and `b`. Returns the birth of the younger set,
    /// or `None` if they were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> Option<f64> {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        let (oa, ob) = (self.oldest[ra], self.oldest[rb]);
        let elder_a = oa.0.total_cmp(&ob.0).then(oa.1.cmp(&ob.1)).is_lt();
        let (elder, younger) = if elder_a { (oa, ob) } else { (ob, oa) };
        let root = match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => {
                self.parent[ra] = rb;
                rb
            }
            std::cmp::Ordering::Greater => {
                self.parent[rb] = ra;
                ra
            }
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
                ra
            }
        };
        self.oldest[root] = elder;
        Some(younger.0)
    }

    /// Birth of the set containing `x`.
    pub(crate) fn birth(&mut self, x: usize) -> f64 {
        let r = self.find(x);
        self.oldest[r].0
    }
}
