//! Graphs, vertex sets and embeddings into strong products `H ⊠ P`.

use crate::error::{Error, Result};

/// Simple undirected graph on the dense vertex range `0..n`.
///
/// Neighbor lists are sorted, so adjacency queries are a binary search.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    m: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Builds a graph from an edge list. Repeated edges are merged; loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        Ok(Self::from_raw_adjacency(adj))
    }

    /// Sorts and dedups symmetric adjacency lists.
    pub(crate) fn from_raw_adjacency(mut adj: Vec<Vec<usize>>) -> Self {
        let mut twice_m = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            twice_m += list.len();
        }
        Self {
            adj,
            m: twice_m / 2,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    /// Induced subgraph on `vertices`; vertex `i` of the result is `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Subgraph {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let adj = vertices
            .iter()
            .map(|&v| {
                self.adj[v]
                    .iter()
                    .filter_map(|&w| (local[w] != usize::MAX).then_some(local[w]))
                    .collect()
            })
            .collect();
        Subgraph {
            graph: Self::from_raw_adjacency(adj),
            to_parent: vertices.to_vec(),
        }
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n()];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for s in 0..self.n() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            stack.push(s);
            let mut comp = Vec::new();
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// A derived graph together with the map back to its parent's vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgraph {
    pub graph: Graph,
    pub to_parent: Vec<usize>,
}

/// Sorted, duplicate-free set of vertex indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct VertexSet {
    members: Vec<usize>,
}

impl VertexSet {
    pub fn new(mut members: Vec<usize>, n: usize) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if let Some(&last) = members.last() {
            if last >= n {
                return Err(Error::VertexOutOfRange { vertex: last, n });
            }
        }
        Ok(Self { members })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    /// Membership as a dense mask over `0..n`.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.members {
            mask[v] = true;
        }
        mask
    }
}

/// Injective placement of graph vertices into `V(H) × {0..=path_len}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductEmbedding {
    pub host: Graph,
    pub path_len: usize,
    /// `map[u] = (host vertex, path coordinate)`.
    pub map: Vec<(usize, usize)>,
}

impl ProductEmbedding {
    /// Checks index ranges; injectivity and edge preservation are checked by
    /// [`validate_embedding`].
    pub fn new(host: Graph, path_len: usize, map: Vec<(usize, usize)>) -> Result<Self> {
        for (u, &(v, i)) in map.iter().enumerate() {
            if v >= host.n() {
                return Err(Error::InvalidEmbedding(format!(
                    "vertex {u} maps to host vertex {v} but the host has {} vertices",
                    host.n()
                )));
            }
            if i > path_len {
                return Err(Error::InvalidEmbedding(format!(
                    "vertex {u} maps to coordinate {i} beyond path length {path_len}"
                )));
            }
        }
        Ok(Self {
            host,
            path_len,
            map,
        })
    }

    #[inline]
    pub fn image(&self, u: usize) -> Result<(usize, usize)> {
        self.map
            .get(u)
            .copied()
            .ok_or(Error::VertexOutsideEmbedding(u))
    }
}

/// Adjacency in `H ⊠ P` of the images of graph vertices `a` and `b`.
pub fn strong_product_adjacent(e: &ProductEmbedding, a: usize, b: usize) -> Result<bool> {
    let (va, ia) = e.image(a)?;
    let (vb, ib) = e.image(b)?;
    Ok(product_cells_adjacent(&e.host, (va, ia), (vb, ib)))
}

#[inline]
pub(crate) fn product_cells_adjacent(host: &Graph, a: (usize, usize), b: (usize, usize)) -> bool {
    a != b && a.1.abs_diff(b.1) <= 1 && (a.0 == b.0 || host.has_edge(a.0, b.0))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmbeddingReport {
    /// `(graph vertex count, map length)` when they differ.
    pub size_mismatch: Option<(usize, usize)>,
    /// Pairs of vertices sharing an image.
    pub collisions: Vec<(usize, usize)>,
    /// Graph edges whose images are not adjacent in the product.
    pub bad_edges: Vec<(usize, usize)>,
}

impl EmbeddingReport {
    pub fn is_ok(&self) -> bool {
        self.size_mismatch.is_none() && self.collisions.is_empty() && self.bad_edges.is_empty()
    }
}

pub fn validate_embedding(g: &Graph, e: &ProductEmbedding) -> EmbeddingReport {
    let mut report = EmbeddingReport::default();
    if g.n() != e.map.len() {
        report.size_mismatch = Some((g.n(), e.map.len()));
        return report;
    }
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_unstable_by_key(|&u| e.map[u]);
    for w in order.windows(2) {
        if e.map[w[0]] == e.map[w[1]] {
            report.collisions.push((w[0].min(w[1]), w[0].max(w[1])));
        }
    }
    for (u, v) in g.edges() {
        if !product_cells_adjacent(&e.host, e.map[u], e.map[v]) {
            report.bad_edges.push((u, v));
        }
    }
    report
}

/// Result of [`prune_unused`]: the compacted embedding and how to map back.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrunedEmbedding {
    pub embedding: ProductEmbedding,
    /// `host_map[new] = old` host vertex.
    pub host_map: Vec<usize>,
    /// Old coordinate = new coordinate + `coord_shift`.
    pub coord_shift: usize,
}

/// Drops host vertices with empty fibers and trims the path to the used
/// coordinate range, renumbered from 0.
pub fn prune_unused(e: &ProductEmbedding) -> PrunedEmbedding {
    let mut pruned = prune_hosts(e);
    let lo = e.map.iter().map(|&(_, i)| i).min().unwrap_or(0);
    let hi = e.map.iter().map(|&(_, i)| i).max().unwrap_or(0);
    for cell in &mut pruned.embedding.map {
        cell.1 -= lo;
    }
    pruned.embedding.path_len = hi - lo;
    pruned.coord_shift = lo;
    pruned
}

/// Restricts the host to the vertices used by the map; coordinates untouched.
pub fn prune_hosts(e: &ProductEmbedding) -> PrunedEmbedding {
    let mut used = vec![false; e.host.n()];
    for &(v, _) in &e.map {
        used[v] = true;
    }
    let host_map: Vec<usize> = (0..e.host.n()).filter(|&v| used[v]).collect();
    let mut local = vec![usize::MAX; e.host.n()];
    for (i, &v) in host_map.iter().enumerate() {
        local[v] = i;
    }
    let host = e.host.induced(&host_map).graph;
    let map = e.map.iter().map(|&(v, i)| (local[v], i)).collect();
    PrunedEmbedding {
        embedding: ProductEmbedding {
            host,
            path_len: e.path_len,
            map,
        },
        host_map,
        coord_shift: 0,
    }
}
