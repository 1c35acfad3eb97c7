//! Binary recursive splitting of a graph of bounded treewidth.
//!
//! Each node of the bidecomposition owns a *part*: the separator `X` found
//! when splitting the node's region. The two sides of the split become the
//! left and right children. Every edge of the input joins two vertices whose
//! nodes are in ancestor relation.

mod separator;

pub use separator::{
    split, tree_balanced_separator, tw_balanced_separator, two_weight_partition, Split,
    TwoWayPartition, WeightFn,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::treewidth::TreeDecomposition;
use separator::Splitter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Root,
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BiNode {
    pub parent: Option<usize>,
    pub side: Side,
    pub depth: usize,
    pub left: Option<usize>,
    pub right: Option<usize>,
    /// Root-to-node path, one bit per edge (1 = right), last edge lowest.
    pub path: u64,
    /// Vertices of the part: members of `S` first, each group ascending.
    pub part: Vec<usize>,
    /// Size of the region split at this node.
    pub region_size: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Bidecomposition {
    /// Node 0 is the root when the graph is nonempty.
    pub nodes: Vec<BiNode>,
    /// Node holding each vertex.
    pub alpha: Vec<usize>,
    /// Position of each vertex within its part.
    pub index_in_part: Vec<usize>,
}

/// Problems found by [`Bidecomposition::validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BidecompositionReport {
    pub unassigned: Vec<usize>,
    pub unrelated_edges: Vec<(usize, usize)>,
}

impl BidecompositionReport {
    pub fn is_ok(&self) -> bool {
        self.unassigned.is_empty() && self.unrelated_edges.is_empty()
    }
}

/// Balance parameter used for an `n`-vertex graph: `min(1/log2 n, 1/8)`.
pub fn epsilon_for(n: usize) -> f64 {
    if n < 2 {
        return 0.125;
    }
    (1.0 / (n as f64).log2()).min(0.125)
}

impl Bidecomposition {
    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|b| b.depth).max().unwrap_or(0)
    }

    pub fn max_part_size(&self) -> usize {
        self.nodes.iter().map(|b| b.part.len()).max().unwrap_or(0)
    }

    /// Whether one of the two nodes is an ancestor of the other (or equal).
    pub fn related(&self, a: usize, b: usize) -> bool {
        let (da, db) = (self.nodes[a].depth, self.nodes[b].depth);
        let (hi, lo, d) = if da <= db {
            (a, b, db - da)
        } else {
            (b, a, da - db)
        };
        self.nodes[lo].path >> d == self.nodes[hi].path
    }

    pub fn validate(&self, g: &Graph) -> BidecompositionReport {
        let mut report = BidecompositionReport::default();
        let mut seen = vec![0usize; g.n()];
        for b in &self.nodes {
            for &v in &b.part {
                if v < g.n() {
                    seen[v] += 1;
                }
            }
        }
        for v in 0..g.n() {
            let placed = self.alpha.get(v).copied();
            let ok = seen[v] == 1
                && placed.is_some_and(|x| x < self.nodes.len() && self.nodes[x].part.contains(&v));
            if !ok {
                report.unassigned.push(v);
            }
        }
        if !report.unassigned.is_empty() {
            return report;
        }
        for (u, v) in g.edges() {
            if !self.related(self.alpha[u], self.alpha[v]) {
                report.unrelated_edges.push((u, v));
            }
        }
        report
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bidecomposition serializes")
    }
}

/// Builds a bidecomposition of `g` from a decomposition of `g`, balancing
/// both the vertex count and the number of vertices in `s`.
///
/// With `n` vertices, `ε = min(1/log2 n, 1/8)` and width `k`, the depth is
/// at most `log2 n + O(1)`, vertices of `s` sit at depth at most
/// `log2 |s| + O(1)`, and parts have at most `2 ceil(3/ε) (k+1)` vertices.
pub fn build_bidecomposition(
    g: &Graph,
    td: &TreeDecomposition,
    s: &VertexSet,
) -> Result<Bidecomposition> {
    let n = g.n();
    if let Some(&v) = s.as_slice().iter().find(|&&v| v >= n) {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    if n == 0 {
        return Ok(Bidecomposition::default());
    }
    let eps = epsilon_for(n);
    let w1 = vec![1.0; n];
    let in_s = s.mask(n);
    let w2: Vec<f64> = in_s.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let mut splitter = Splitter::new(g, td, &w1, &w2)?;

    let mut nodes: Vec<BiNode> = Vec::new();
    let mut alpha = vec![usize::MAX; n];
    let mut index_in_part = vec![0usize; n];
    let mut stack: Vec<(Vec<usize>, Option<usize>, Side)> =
        vec![(splitter.full_region(), None, Side::Root)];
    while let Some((region, parent, side)) = stack.pop() {
        if region.is_empty() {
            continue;
        }
        let Split { a, mut x, b } = splitter.split_region(&region, eps);
        let id = nodes.len();
        let (depth, path) = match parent {
            None => (0, 0),
            Some(p) => {
                let pn = &mut nodes[p];
                match side {
                    Side::Right => pn.right = Some(id),
                    _ => pn.left = Some(id),
                }
                let bit = u64::from(side == Side::Right);
                (pn.depth + 1, (pn.path << 1) | bit)
            }
        };
        if depth >= 64 {
            return Err(Error::InvalidParameter(
                "bidecomposition deeper than 63 levels".into(),
            ));
        }
        x.sort_unstable_by_key(|&v| (!in_s[v], v));
        for (i, &v) in x.iter().enumerate() {
            alpha[v] = id;
            index_in_part[v] = i;
        }
        nodes.push(BiNode {
            parent,
            side,
            depth,
            left: None,
            right: None,
            path,
            part: x,
            region_size: region.len(),
        });
        stack.push((b, Some(id), Side::Right));
        stack.push((a, Some(id), Side::Left));
    }
    Ok(Bidecomposition {
        nodes,
        alpha,
        index_in_part,
    })
}
