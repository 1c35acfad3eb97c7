//! Tree decompositions: validation, restriction, heuristics and the
//! out-degree bounded orientation of the chordal completion.

mod decompose;
mod orientation;

pub use decompose::{decompose, decomposition_from_ordering};
pub(crate) use orientation::orientation_with_index;
pub use orientation::{chordal_orientation, ChordalOrientation};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Rooted tree decomposition. The root is always node 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TreeDecomposition {
    parent: Vec<Option<usize>>,
    bags: Vec<Vec<usize>>,
}

impl TreeDecomposition {
    /// Builds a decomposition from parent links (`None` marks a root) and
    /// bags. Several roots are chained into a spine; the first root becomes
    /// node 0. Bags are sorted and deduplicated.
    pub fn from_parts(parent: Vec<Option<usize>>, mut bags: Vec<Vec<usize>>) -> Result<Self> {
        let n = parent.len();
        if bags.len() != n {
            return Err(Error::InvalidDecomposition(format!(
                "{} parent entries but {} bags",
                n,
                bags.len()
            )));
        }
        for bag in &mut bags {
            bag.sort_unstable();
            bag.dedup();
        }
        let mut parent = parent;
        for (x, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n || p == x {
                    return Err(Error::InvalidDecomposition(format!(
                        "node {x} has invalid parent {p}"
                    )));
                }
            }
        }
        let roots: Vec<usize> = (0..n).filter(|&x| parent[x].is_none()).collect();
        if n > 0 && roots.is_empty() {
            return Err(Error::InvalidDecomposition("no root node".into()));
        }
        for w in roots.windows(2) {
            parent[w[1]] = Some(w[0]);
        }
        // Every node must reach the root.
        let mut state = vec![0u8; n];
        for start in 0..n {
            let mut path = Vec::new();
            let mut x = start;
            loop {
                match state[x] {
                    2 => break,
                    1 => {
                        return Err(Error::InvalidDecomposition(format!(
                            "parent links contain a cycle through node {x}"
                        )))
                    }
                    _ => {}
                }
                state[x] = 1;
                path.push(x);
                match parent[x] {
                    Some(p) => x = p,
                    None => break,
                }
            }
            for y in path {
                state[y] = 2;
            }
        }
        let mut td = Self { parent, bags };
        if let Some(&root) = roots.first() {
            if root != 0 {
                td.swap_nodes(0, root);
            }
        }
        Ok(td)
    }

    /// Trusted constructor: `parent[0] == None`, every other node has a
    /// parent, bags sorted.
    pub(crate) fn from_parts_unchecked(parent: Vec<Option<usize>>, bags: Vec<Vec<usize>>) -> Self {
        debug_assert!(parent.first().is_none_or(|p| p.is_none()));
        Self { parent, bags }
    }

    fn swap_nodes(&mut self, a: usize, b: usize) {
        self.parent.swap(a, b);
        self.bags.swap(a, b);
        for p in self.parent.iter_mut().flatten() {
            if *p == a {
                *p = b;
            } else if *p == b {
                *p = a;
            }
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn num_nodes(&self) -> usize {
        self.bags.len()
    }

    pub fn parent(&self, x: usize) -> Option<usize> {
        self.parent[x]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn bag(&self, x: usize) -> &[usize] {
        &self.bags[x]
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    /// Maximum bag size minus one (0 for an empty decomposition).
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(1)
            .saturating_sub(1)
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.num_nodes()];
        for (x, p) in self.parent.iter().enumerate() {
            if let Some(p) = *p {
                ch[p].push(x);
            }
        }
        ch
    }

    /// Nodes in depth-first preorder from the root.
    pub fn preorder(&self) -> Vec<usize> {
        if self.bags.is_empty() {
            return Vec::new();
        }
        let ch = self.children();
        let mut out = Vec::with_capacity(self.num_nodes());
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend(ch[x].iter().rev());
        }
        out
    }
}

impl TreeDecomposition {
    /// Nodes in post-order: children left to right, then the node.
    pub fn postorder(&self) -> Vec<usize> {
        if self.bags.is_empty() {
            return Vec::new();
        }
        let ch = self.children();
        let mut out = Vec::with_capacity(self.num_nodes());
        let mut stack = vec![(0usize, false)];
        while let Some((x, expanded)) = stack.pop() {
            if expanded {
                out.push(x);
            } else {
                stack.push((x, true));
                stack.extend(ch[x].iter().rev().map(|&c| (c, false)));
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecompositionReport {
    pub out_of_range: Vec<usize>,
    pub uncovered_edges: Vec<(usize, usize)>,
    pub missing_vertices: Vec<usize>,
    pub disconnected_vertices: Vec<usize>,
    pub width: usize,
}

impl DecompositionReport {
    pub fn is_ok(&self) -> bool {
        self.out_of_range.is_empty()
            && self.uncovered_edges.is_empty()
            && self.missing_vertices.is_empty()
            && self.disconnected_vertices.is_empty()
    }
}

/// Checks edge coverage and connectivity of every vertex's occurrence set.
pub fn validate_decomposition(g: &Graph, td: &TreeDecomposition) -> DecompositionReport {
    let n = g.n();
    let mut report = DecompositionReport {
        width: td.width(),
        ..Default::default()
    };
    let mut occurrences: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut tops = vec![0usize; n];
    for (x, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v >= n {
                report.out_of_range.push(v);
                continue;
            }
            occurrences[v].push(x);
            let parent_has = td.parent[x].is_some_and(|p| td.bags[p].binary_search(&v).is_ok());
            if !parent_has {
                tops[v] += 1;
            }
        }
    }
    report.out_of_range.sort_unstable();
    report.out_of_range.dedup();
    for v in 0..n {
        match tops[v] {
            0 => report.missing_vertices.push(v),
            1 => {}
            _ => report.disconnected_vertices.push(v),
        }
    }
    for (u, v) in g.edges() {
        let (a, b) = if occurrences[u].len() <= occurrences[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        if !occurrences[a]
            .iter()
            .any(|&x| td.bags[x].binary_search(&b).is_ok())
        {
            report.uncovered_edges.push((u, v));
        }
    }
    report
}

/// Decomposition of `H ⊠ K₂` where copy `s ∈ {0,1}` of `v` is vertex `2v + s`.
pub fn product_with_edge_decomposition(td: &TreeDecomposition) -> TreeDecomposition {
    let bags = td
        .bags
        .iter()
        .map(|bag| bag.iter().flat_map(|&v| [2 * v, 2 * v + 1]).collect())
        .collect();
    TreeDecomposition::from_parts_unchecked(td.parent.clone(), bags)
}

/// Joins decompositions over pairwise disjoint vertex sets by chaining their
/// roots.
pub fn join_disjoint(parts: Vec<TreeDecomposition>) -> TreeDecomposition {
    let mut parent = Vec::new();
    let mut bags = Vec::new();
    let mut prev_root: Option<usize> = None;
    for part in parts {
        if part.num_nodes() == 0 {
            continue;
        }
        let offset = parent.len();
        for (x, p) in part.parent.into_iter().enumerate() {
            parent.push(match p {
                Some(p) => Some(p + offset),
                None if x == 0 => prev_root,
                None => unreachable!("normalized decompositions have a single root"),
            });
        }
        bags.extend(part.bags);
        prev_root = Some(offset);
    }
    TreeDecomposition::from_parts_unchecked(parent, bags)
}

/// Preorder intervals and per-vertex top nodes of a decomposition.
///
/// The top of `v` is the node closest to the root whose bag holds `v`; the
/// tops partition the vertices exactly like the margins
/// `β(x) \ β(parent(x))`.
#[derive(Clone, Debug)]
pub(crate) struct DecompositionIndex {
    pub tin: Vec<u32>,
    pub tout: Vec<u32>,
    pub top: Vec<usize>,
}

impl DecompositionIndex {
    pub fn new(td: &TreeDecomposition, n: usize) -> Self {
        let nodes = td.num_nodes();
        let mut tin = vec![0u32; nodes];
        let mut tout = vec![0u32; nodes];
        let mut top = vec![usize::MAX; n];
        if nodes > 0 {
            let ch = td.children();
            let mut clock = 0u32;
            let mut stack: Vec<(usize, bool)> = vec![(0, false)];
            while let Some((x, done)) = stack.pop() {
                if done {
                    tout[x] = clock - 1;
                    continue;
                }
                tin[x] = clock;
                clock += 1;
                for &v in &td.bags[x] {
                    if v < n && top[v] == usize::MAX {
                        top[v] = x;
                    }
                }
                stack.push((x, true));
                stack.extend(ch[x].iter().rev().map(|&c| (c, false)));
            }
        }
        Self { tin, tout, top }
    }

    #[inline]
    pub fn is_ancestor(&self, a: usize, x: usize) -> bool {
        self.tin[a] <= self.tin[x] && self.tout[x] <= self.tout[a]
    }

    /// Forest structure induced on `nodes` (given in preorder): the parent of
    /// each entry is its nearest ancestor in the list, as a list position.
    pub fn induced_forest(&self, nodes: &[usize]) -> Vec<Option<usize>> {
        let mut stack: Vec<usize> = Vec::new();
        let mut parent = Vec::with_capacity(nodes.len());
        for (i, &x) in nodes.iter().enumerate() {
            while let Some(&j) = stack.last() {
                if self.is_ancestor(nodes[j], x) {
                    break;
                }
                stack.pop();
            }
            parent.push(stack.last().copied());
            stack.push(i);
        }
        parent
    }

    /// Decomposition of the graph obtained by replacing each old vertex by
    /// its images. `images` pairs an old vertex with one new vertex; an old
    /// vertex may have several images. Only the top nodes of the old
    /// vertices survive, so the result has at most `images.len()` nodes.
    pub fn restrict(&self, td: &TreeDecomposition, images: &[(usize, usize)]) -> TreeDecomposition {
        let mut sorted = images.to_vec();
        sorted.sort_unstable();
        let mut nodes: Vec<usize> = sorted.iter().map(|&(old, _)| self.top[old]).collect();
        nodes.sort_unstable_by_key(|&x| self.tin[x]);
        nodes.dedup();
        let forest = self.induced_forest(&nodes);
        let mut parent = Vec::with_capacity(nodes.len());
        let mut last_root: Option<usize> = None;
        for (i, p) in forest.into_iter().enumerate() {
            match p {
                Some(p) => parent.push(Some(p)),
                None => {
                    parent.push(last_root);
                    last_root = Some(i);
                }
            }
        }
        let bags = nodes
            .iter()
            .map(|&x| {
                let mut bag = Vec::new();
                for &v in &td.bags[x] {
                    let start = sorted.partition_point(|&(old, _)| old < v);
                    bag.extend(
                        sorted[start..]
                            .iter()
                            .take_while(|&&(old, _)| old == v)
                            .map(|&(_, new)| new),
                    );
                }
                bag.sort_unstable();
                bag
            })
            .collect();
        TreeDecomposition::from_parts_unchecked(parent, bags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn single_bag_triangle_is_valid() {
        let td = TreeDecomposition::from_parts(vec![None], vec![vec![2, 0, 1]]).unwrap();
        let r = validate_decomposition(&triangle(), &td);
        assert!(r.is_ok());
        assert_eq!(r.width, 2);
    }

    #[test]
    fn missing_edge_is_reported() {
        let td = TreeDecomposition::from_parts(vec![None, Some(0)], vec![vec![0, 1], vec![1, 2]])
            .unwrap();
        let r = validate_decomposition(&triangle(), &td);
        assert_eq!(r.uncovered_edges, vec![(0, 2)]);
    }

    #[test]
    fn disconnected_occurrence_is_reported() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let td = TreeDecomposition::from_parts(
            vec![None, Some(0), Some(1)],
            vec![vec![0, 1], vec![1, 2], vec![0]],
        )
        .unwrap();
        let r = validate_decomposition(&g, &td);
        assert_eq!(r.disconnected_vertices, vec![0]);
    }

    #[test]
    fn root_is_moved_to_node_zero_and_cycles_rejected() {
        let td =
            TreeDecomposition::from_parts(vec![Some(1), None], vec![vec![0], vec![0, 1]]).unwrap();
        assert_eq!(td.parent(0), None);
        assert_eq!(td.bag(0), &[0, 1]);
        assert_eq!(td.parent(1), Some(0));
        assert!(
            TreeDecomposition::from_parts(vec![Some(1), Some(0)], vec![vec![], vec![]]).is_err()
        );
    }

    #[test]
    fn edge_product_of_single_vertex_and_edge() {
        let single = TreeDecomposition::from_parts(vec![None], vec![vec![0]]).unwrap();
        let p = product_with_edge_decomposition(&single);
        assert_eq!(p.bag(0), &[0, 1]);
        assert_eq!(p.width(), 1);

        let edge = TreeDecomposition::from_parts(vec![None], vec![vec![0, 1]]).unwrap();
        let p = product_with_edge_decomposition(&edge);
        assert_eq!(p.width(), 3);
        let k4 = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert!(validate_decomposition(&k4, &p).is_ok());
    }

    #[test]
    fn restriction_keeps_validity() {
        // Path 0-1-2-3-4 with bags {0,1},{1,2},{2,3},{3,4} as a chain.
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let td = TreeDecomposition::from_parts(
            vec![None, Some(0), Some(1), Some(2)],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4]],
        )
        .unwrap();
        let idx = DecompositionIndex::new(&td, 5);
        let keep = [0usize, 1, 3, 4];
        let images: Vec<(usize, usize)> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let sub = g.induced(&keep).graph;
        let r = idx.restrict(&td, &images);
        assert!(validate_decomposition(&sub, &r).is_ok());
        assert!(r.num_nodes() <= keep.len());
    }
}
