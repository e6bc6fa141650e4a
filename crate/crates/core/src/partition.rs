//! Partitions of `{0..n}` with canonical class numbering.

use petgraph::unionfind::UnionFind;

/// A partition of `{0..n}`.
///
/// Classes are numbered in order of their least element and each class lists
/// its members in increasing order, so two partitions of the same set compare
/// equal exactly when they have the same blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrbitPartition {
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl OrbitPartition {
    /// Closes `{0..n}` under the given pairs.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut uf = UnionFind::<usize>::new(n);
        for (a, b) in pairs {
            uf.union(a, b);
        }
        let labels = uf.into_labeling();
        let mut class_of = vec![usize::MAX; n];
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut root_class = vec![usize::MAX; n];
        for x in 0..n {
            let root = labels[x];
            if root_class[root] == usize::MAX {
                root_class[root] = classes.len();
                classes.push(Vec::new());
            }
            let c = root_class[root];
            class_of[x] = c;
            classes[c].push(x);
        }
        OrbitPartition { class_of, classes }
    }

    pub fn discrete(n: usize) -> Self {
        Self::from_pairs(n, std::iter::empty())
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn class(&self, c: usize) -> &[usize] {
        &self.classes[c]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Least element of class `c`.
    pub fn representative(&self, c: usize) -> usize {
        self.classes[c][0]
    }

    /// Classes are disjoint, nonempty, cover the set, and agree with `class_of`.
    pub fn is_well_formed(&self) -> bool {
        let mut seen = vec![false; self.len()];
        for (c, members) in self.classes.iter().enumerate() {
            if members.is_empty() {
                return false;
            }
            for &x in members {
                if x >= seen.len() || seen[x] || self.class_of[x] != c {
                    return false;
                }
                seen[x] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }
}
