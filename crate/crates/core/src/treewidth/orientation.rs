use super::{DecompositionIndex, TreeDecomposition};
use crate::graph::Graph;

/// Acyclic orientation of the chordal completion `G⁺` (every bag turned
/// into a clique) in which each vertex has at most `bound` out-neighbors and
/// `K_u = {u} ∪ out(u)` is a clique of `G⁺`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChordalOrientation {
    /// Sorted out-neighbors of each vertex.
    pub out: Vec<Vec<usize>>,
    /// `in_graph[u][j]` tells whether the arc from `u` to `out[u][j]` is an edge of `G`
    /// rather than a fill edge.
    pub in_graph: Vec<Vec<bool>>,
    /// Perfect elimination order; arcs point from earlier to later.
    pub order: Vec<usize>,
    pub bound: usize,
}

impl ChordalOrientation {
    pub fn max_out_degree(&self) -> usize {
        self.out.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `K_u` as a sorted list.
    pub fn clique_of(&self, u: usize) -> Vec<usize> {
        let mut k = self.out[u].clone();
        k.push(u);
        k.sort_unstable();
        k
    }

    /// The chordal completion as a graph.
    pub fn completion(&self) -> Graph {
        let n = self.out.len();
        let mut adj = vec![Vec::new(); n];
        for (u, outs) in self.out.iter().enumerate() {
            for &v in outs {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        Graph::from_raw_adjacency(adj)
    }
}

/// Orients `G⁺` along a perfect elimination order read off the rooted
/// decomposition: nodes in post-order, and at each node the vertices whose
/// topmost bag it is, by increasing index.
pub fn chordal_orientation(g: &Graph, td: &TreeDecomposition) -> ChordalOrientation {
    let n = g.n();
    let idx = DecompositionIndex::new(td, n);
    orientation_with_index(g, td, &idx)
}

pub(crate) fn orientation_with_index(
    g: &Graph,
    td: &TreeDecomposition,
    idx: &DecompositionIndex,
) -> ChordalOrientation {
    let n = g.n();
    let mut by_top: Vec<Vec<usize>> = vec![Vec::new(); td.num_nodes()];
    let mut stray = Vec::new();
    for v in 0..n {
        match idx.top[v] {
            usize::MAX => stray.push(v),
            x => by_top[x].push(v),
        }
    }
    debug_assert!(stray.is_empty(), "decomposition misses vertices {stray:?}");
    let mut order = Vec::with_capacity(n);
    for x in td.postorder() {
        order.extend(by_top[x].iter().copied());
    }
    order.extend(stray);
    let mut rank = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    let mut out = Vec::with_capacity(n);
    let mut in_graph = Vec::with_capacity(n);
    for u in 0..n {
        let list: Vec<usize> = match idx.top[u] {
            usize::MAX => Vec::new(),
            x => td
                .bag(x)
                .iter()
                .copied()
                .filter(|&v| v < n && rank[v] > rank[u])
                .collect(),
        };
        in_graph.push(list.iter().map(|&v| g.has_edge(u, v)).collect());
        out.push(list);
    }
    ChordalOrientation {
        out,
        in_graph,
        order,
        bound: td.width(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bag_triangle_orders_by_index() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let td = TreeDecomposition::from_parts(vec![None], vec![vec![0, 1, 2]]).unwrap();
        let o = chordal_orientation(&g, &td);
        assert_eq!(o.order, vec![0, 1, 2]);
        let degrees: Vec<usize> = o.order.iter().map(|&v| o.out[v].len()).collect();
        assert_eq!(degrees, vec![2, 1, 0]);
        assert!(o.in_graph.iter().flatten().all(|&f| f));
    }

    #[test]
    fn path_has_out_degree_at_most_one() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let td = TreeDecomposition::from_parts(vec![None, Some(0)], vec![vec![0, 1], vec![1, 2]])
            .unwrap();
        let o = chordal_orientation(&g, &td);
        assert!(o.max_out_degree() <= 1);
        // Each edge appears exactly once.
        let arcs: usize = o.out.iter().map(Vec::len).sum();
        assert_eq!(arcs, 2);
    }

    #[test]
    fn fill_edges_are_flagged() {
        // Path 0-1-2 squeezed into one bag: the pair {0,2} is fill.
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let td = TreeDecomposition::from_parts(vec![None], vec![vec![0, 1, 2]]).unwrap();
        let o = chordal_orientation(&g, &td);
        assert_eq!(o.out[0], vec![1, 2]);
        assert_eq!(o.in_graph[0], vec![true, false]);
    }
}
