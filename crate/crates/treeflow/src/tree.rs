//! Array-backed rooted trees and the kite family.
//!
//! Nodes are indexed `0..n` with the root at index 0. Topology is stored as a
//! parent array where entry 0 is the sentinel `-1`; children lists, depths,
//! level sets, and a bottom-up traversal order are derived once at
//! construction and kept immutable afterwards.

use crate::error::{Error, Result};

/// Immutable rooted tree over nodes `0..n`, root at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    depth: Vec<usize>,
    height: usize,
    levels: Vec<Vec<usize>>,
    bottom_up: Vec<usize>,
}

impl RootedTree {
    /// Builds a tree from a parent array. Entry 0 is the root and must hold
    /// the sentinel `-1`; every other entry is the parent's index. Parents may
    /// point forward (a node's parent index can exceed its own), only
    /// reachability from the root matters.
    pub fn from_parents(parents: &[i64]) -> Result<Self> {
        if parents.is_empty() {
            return Err(Error::EmptyParents);
        }
        let n = parents.len();
        if parents[0] != -1 {
            return Err(Error::RootSentinelMissing(parents[0]));
        }
        let mut parent = vec![None; n];
        for (node, &p) in parents.iter().enumerate().skip(1) {
            if p == -1 {
                return Err(Error::MultipleRoots { node });
            }
            if p < 0 || p as usize >= n || p as usize == node {
                return Err(Error::ParentOutOfRange { node, parent: p });
            }
            parent[node] = Some(p as usize);
        }

        // Depths via memoized upward walks; a walk longer than n nodes can
        // only happen on a cycle.
        let mut depth = vec![usize::MAX; n];
        depth[0] = 0;
        let mut chain = Vec::new();
        for start in 0..n {
            if depth[start] != usize::MAX {
                continue;
            }
            chain.clear();
            let mut cur = start;
            while depth[cur] == usize::MAX {
                chain.push(cur);
                if chain.len() > n {
                    return Err(Error::CycleDetected { node: start });
                }
                cur = parent[cur].expect("non-root nodes have parents");
            }
            let mut d = depth[cur];
            for &node in chain.iter().rev() {
                d += 1;
                depth[node] = d;
            }
        }

        let mut children = vec![Vec::new(); n];
        for node in 1..n {
            children[parent[node].unwrap()].push(node);
        }

        let height = depth.iter().copied().max().unwrap();
        let mut levels = vec![Vec::new(); height + 1];
        for node in 0..n {
            levels[depth[node]].push(node);
        }

        let mut bottom_up: Vec<usize> = (0..n).collect();
        bottom_up.sort_by_key(|&node| std::cmp::Reverse(depth[node]));

        Ok(RootedTree { parent, children, depth, height, levels, bottom_up })
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    /// Parent index, `None` for the root.
    pub fn parent(&self, node: usize) -> Option<usize> {
        self.parent[node]
    }

    /// Children in increasing index order.
    pub fn children(&self, node: usize) -> &[usize] {
        &self.children[node]
    }

    pub fn is_leaf(&self, node: usize) -> bool {
        self.children[node].is_empty()
    }

    /// Graph distance from the root.
    pub fn depth(&self, node: usize) -> usize {
        self.depth[node]
    }

    /// Maximum root-to-leaf graph distance.
    pub fn height(&self) -> usize {
        self.height
    }

    /// Nodes at each depth; `levels()[0]` is `[0]`, the last entry is the
    /// deepest level.
    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }

    /// Node indices ordered by decreasing depth (ties by index). Every node
    /// appears after all of its descendants' positions are settled, so a
    /// single pass supports leaf-to-root accumulation.
    pub fn bottom_up(&self) -> &[usize] {
        &self.bottom_up
    }

    /// Parent array in file form: `-1` sentinel at the root.
    pub fn to_parents(&self) -> Vec<i64> {
        self.parent
            .iter()
            .map(|p| p.map_or(-1, |q| q as i64))
            .collect()
    }
}

/// Shape parameters of a kite tree: `m` paths of `l` nodes hanging off a
/// shared root, `m = ceil(n^alpha)`, `l = ceil(n^(1-alpha))`. The actual node
/// count `m*l + 1` usually differs from the target `n` and is what every
/// downstream computation uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KiteSpec {
    pub n: usize,
    pub alpha: f64,
    pub m: usize,
    pub l: usize,
}

impl KiteSpec {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::KiteTooSmall(n));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidAlpha(alpha));
        }
        let m = ceil_pow(n, alpha);
        let l = ceil_pow(n, 1.0 - alpha);
        Ok(KiteSpec { n, alpha, m, l })
    }

    /// Actual node count `m*l + 1`.
    pub fn node_count(&self) -> usize {
        self.m * self.l + 1
    }

    /// Index of the node at `pos` (0-based, towards the leaf) on `path`
    /// (0-based). Paths are laid out contiguously after the root.
    pub fn node_index(&self, path: usize, pos: usize) -> usize {
        debug_assert!(path < self.m && pos < self.l);
        1 + path * self.l + pos
    }
}

/// `ceil(n^e)` with results within 1e-9 of an integer snapped to it, so that
/// exact powers (9^0.5 = 3) survive floating-point evaluation.
fn ceil_pow(n: usize, e: f64) -> usize {
    let t = (n as f64).powf(e);
    let r = t.round();
    let t = if (t - r).abs() < 1e-9 { r } else { t };
    t.ceil() as usize
}

/// Builds the kite tree for target size `n` and shape `alpha`: the root's
/// children start `m` disjoint downward paths of `l` nodes each.
pub fn build_kite(n: usize, alpha: f64) -> Result<(RootedTree, KiteSpec)> {
    let spec = KiteSpec::new(n, alpha)?;
    let mut parents = Vec::with_capacity(spec.node_count());
    parents.push(-1i64);
    for path in 0..spec.m {
        for pos in 0..spec.l {
            let node = spec.node_index(path, pos);
            parents.push(if pos == 0 { 0 } else { node as i64 - 1 });
        }
    }
    let tree = RootedTree::from_parents(&parents)?;
    Ok((tree, spec))
}

/// Recovers `(m, l)` from a tree laid out exactly as `build_kite` emits it.
pub(crate) fn kite_layout(tree: &RootedTree) -> Result<(usize, usize)> {
    let n = tree.node_count();
    if n < 2 {
        return Err(Error::NotKite("tree has a single node"));
    }
    let m = tree.children(0).len();
    if m == 0 || (n - 1) % m != 0 {
        return Err(Error::NotKite("node count does not split into equal paths"));
    }
    let l = (n - 1) / m;
    for path in 0..m {
        for pos in 0..l {
            let node = 1 + path * l + pos;
            let want = if pos == 0 { 0 } else { node - 1 };
            if tree.parent(node) != Some(want) {
                return Err(Error::NotKite("nodes are not in path-major order"));
            }
        }
    }
    Ok((m, l))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure_tree() -> RootedTree {
        RootedTree::from_parents(&[-1, 0, 0, 1, 1, 2, 2, 3, 3]).unwrap()
    }

    #[test]
    fn single_node() {
        let t = RootedTree::from_parents(&[-1]).unwrap();
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.height(), 0);
        assert!(t.is_leaf(0));
        assert_eq!(t.to_parents(), vec![-1]);
    }

    #[test]
    fn nine_node_tree_shape() {
        let t = figure_tree();
        assert_eq!(t.height(), 3);
        assert_eq!(t.children(0), &[1, 2]);
        assert_eq!(t.children(1), &[3, 4]);
        assert_eq!(t.children(3), &[7, 8]);
        assert!(t.is_leaf(4) && t.is_leaf(8));
        assert_eq!(t.depth(7), 3);
        assert_eq!(t.levels()[2], vec![3, 4, 5, 6]);
        assert_eq!(t.to_parents(), vec![-1, 0, 0, 1, 1, 2, 2, 3, 3]);
    }

    #[test]
    fn forward_parent_reference_is_valid() {
        let t = RootedTree::from_parents(&[-1, 0, 1, 0]).unwrap();
        assert_eq!(t.height(), 2);
        assert_eq!(t.children(0), &[1, 3]);
        assert_eq!(t.children(1), &[2]);
        assert_eq!(t.depth(2), 2);
    }

    #[test]
    fn bottom_up_puts_descendants_first() {
        let t = figure_tree();
        let order = t.bottom_up();
        assert_eq!(order, &[7, 8, 3, 4, 5, 6, 1, 2, 0]);
    }

    #[test]
    fn rejects_cycles_and_bad_parents() {
        assert_eq!(
            RootedTree::from_parents(&[-1, 2, 1]),
            Err(Error::CycleDetected { node: 1 })
        );
        assert_eq!(
            RootedTree::from_parents(&[-1, 9]),
            Err(Error::ParentOutOfRange { node: 1, parent: 9 })
        );
        assert_eq!(
            RootedTree::from_parents(&[-1, 1]),
            Err(Error::ParentOutOfRange { node: 1, parent: 1 })
        );
        assert_eq!(
            RootedTree::from_parents(&[-1, -1]),
            Err(Error::MultipleRoots { node: 1 })
        );
        assert_eq!(
            RootedTree::from_parents(&[0, 0]),
            Err(Error::RootSentinelMissing(0))
        );
        assert_eq!(RootedTree::from_parents(&[]), Err(Error::EmptyParents));
    }

    #[test]
    fn kite_balanced() {
        let (tree, spec) = build_kite(9, 0.5).unwrap();
        assert_eq!((spec.m, spec.l), (3, 3));
        assert_eq!(tree.node_count(), 10);
        assert_eq!(tree.height(), 3);
        assert_eq!(tree.children(0), &[1, 4, 7]);
        assert_eq!(tree.parent(3), Some(2));
        assert_eq!(kite_layout(&tree).unwrap(), (3, 3));
    }

    #[test]
    fn kite_path_and_star() {
        let (path, spec) = build_kite(8, 0.0).unwrap();
        assert_eq!((spec.m, spec.l), (1, 8));
        assert_eq!(path.node_count(), 9);
        assert_eq!(path.height(), 8);

        let (star, spec) = build_kite(8, 1.0).unwrap();
        assert_eq!((spec.m, spec.l), (8, 1));
        assert_eq!(star.node_count(), 9);
        assert_eq!(star.height(), 1);
        assert_eq!(star.children(0).len(), 8);
    }

    #[test]
    fn kite_ceiling_snaps_exact_powers() {
        let spec = KiteSpec::new(4096, 0.5).unwrap();
        assert_eq!((spec.m, spec.l), (64, 64));
        let spec = KiteSpec::new(1000, 0.4).unwrap();
        assert_eq!((spec.m, spec.l), (16, 64));
    }

    #[test]
    fn kite_rejects_bad_parameters() {
        assert_eq!(KiteSpec::new(1, 0.5), Err(Error::KiteTooSmall(1)));
        assert_eq!(KiteSpec::new(8, -0.1), Err(Error::InvalidAlpha(-0.1)));
        assert_eq!(KiteSpec::new(8, 1.1), Err(Error::InvalidAlpha(1.1)));
    }

    #[test]
    fn kite_layout_rejects_non_kites() {
        let t = figure_tree();
        assert!(matches!(kite_layout(&t), Err(Error::NotKite(_))));
        let single = RootedTree::from_parents(&[-1]).unwrap();
        assert!(matches!(kite_layout(&single), Err(Error::NotKite(_))));
    }
}
