//! Seeded synthetic instances with known structure.
//!
//! All randomness comes from ChaCha8 seeded with `seed_from_u64`, so an
//! instance is a pure function of its parameters on every platform.

use std::collections::HashMap;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::flat::block_width;
use crate::graph::{Graph, ProductEmbedding};
use crate::treewidth::TreeDecomposition;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A graph with a decomposition of its host; for k-tree shapes the graph
/// is its own host (all coordinates 0).
#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: Graph,
    pub embedding: ProductEmbedding,
    /// Decomposition of `embedding.host`.
    pub host_decomposition: TreeDecomposition,
}

fn check_keep(keep: f64) -> Result<()> {
    if (0.0..=1.0).contains(&keep) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "keep probability {keep} outside [0, 1]"
        )))
    }
}

/// Random k-tree on `n >= k+1` vertices with a width-`k` decomposition.
///
/// Starts from a `(k+1)`-clique; each further vertex is joined to a random
/// `k`-clique, namely a random bag minus one random member. Vertex ids are
/// randomly permuted.
pub fn gen_ktree(seed: u64, n: usize, k: usize) -> Result<(Graph, TreeDecomposition)> {
    gen_partial_ktree(seed, n, k, 1.0)
}

/// [`gen_ktree`] with each edge kept independently with probability `keep`.
/// The decomposition is that of the full k-tree.
pub fn gen_partial_ktree(
    seed: u64,
    n: usize,
    k: usize,
    keep: f64,
) -> Result<(Graph, TreeDecomposition)> {
    check_keep(keep)?;
    if n < k + 1 {
        return Err(Error::InvalidParameter(format!(
            "a {k}-tree needs at least {} vertices",
            k + 1
        )));
    }
    let mut rng = rng(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut bags: Vec<Vec<usize>> = vec![(0..=k).collect()];
    let mut parent = vec![None];
    let mut edges = Vec::new();
    for u in 0..=k {
        for v in u + 1..=k {
            edges.push((u, v));
        }
    }
    for v in k + 1..n {
        let x = rng.gen_range(0..bags.len());
        let mut bag = bags[x].clone();
        if k > 0 {
            bag.remove(rng.gen_range(0..bag.len()));
        } else {
            bag.clear();
        }
        for &u in &bag {
            edges.push((u, v));
        }
        bag.push(v);
        bags.push(bag);
        // k = 0 gives isolated vertices; hang their bags anywhere.
        parent.push(Some(x));
    }
    let edges: Vec<(usize, usize)> = edges
        .into_iter()
        .filter(|_| keep >= 1.0 || rng.gen_bool(keep))
        .map(|(u, v)| (perm[u], perm[v]))
        .collect();
    for bag in &mut bags {
        for v in bag.iter_mut() {
            *v = perm[*v];
        }
    }
    let g = Graph::from_edges(n, edges)?;
    let td = TreeDecomposition::from_parts(parent, bags)?;
    Ok((g, td))
}

/// Parameters of [`gen_product_instance`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductParams {
    /// Vertices of the host k-tree.
    pub host_n: usize,
    /// Host treewidth.
    pub k: usize,
    /// Path length: coordinates run over `0..=d`.
    pub d: usize,
    /// Probability of keeping each product edge between chosen cells.
    pub keep: f64,
    /// Number of cells chosen, uniformly among all `host_n (d+1)`.
    pub n: usize,
}

/// Random subgraph of `H ⊠ P` with `H` a random k-tree. Vertex ids follow
/// the chosen cells in `(coordinate, host vertex)` order.
pub fn gen_product_instance(seed: u64, p: &ProductParams) -> Result<Instance> {
    check_keep(p.keep)?;
    let (host, host_td) = gen_ktree(seed ^ 0x9e37_79b9_7f4a_7c15, p.host_n, p.k)?;
    let cells_total = p
        .host_n
        .checked_mul(p.d + 1)
        .ok_or_else(|| Error::InvalidParameter("too many cells".into()))?;
    if p.n > cells_total {
        return Err(Error::InvalidParameter(format!(
            "{} vertices do not fit into {} cells",
            p.n, cells_total
        )));
    }
    let mut rng = rng(seed);
    let mut chosen = sample(&mut rng, cells_total, p.n).into_vec();
    chosen.sort_unstable();
    let map: Vec<(usize, usize)> = chosen
        .iter()
        .map(|&c| (c % p.host_n, c / p.host_n))
        .collect();
    let graph = product_edges(&host, &map, p.keep, &mut rng)?;
    Ok(Instance {
        graph,
        embedding: ProductEmbedding::new(host, p.d, map)?,
        host_decomposition: host_td,
    })
}

/// Keeps each product edge among the placed cells with probability `keep`.
fn product_edges(
    host: &Graph,
    map: &[(usize, usize)],
    keep: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Graph> {
    let at: HashMap<(usize, usize), usize> = map.iter().enumerate().map(|(u, &c)| (c, u)).collect();
    let mut edges = Vec::new();
    for (u, &(v, i)) in map.iter().enumerate() {
        let mut consider = |cell: (usize, usize)| {
            if let Some(&w) = at.get(&cell) {
                if keep >= 1.0 || rng.gen_bool(keep) {
                    edges.push((u, w));
                }
            }
        };
        consider((v, i + 1));
        for &x in host.neighbors(v) {
            if x > v {
                if i > 0 {
                    consider((x, i - 1));
                }
                consider((x, i));
                consider((x, i + 1));
            }
        }
    }
    Graph::from_edges(map.len(), edges)
}

/// Stress instances aimed at particular parts of the flat scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AdversarialKind {
    /// Every vertex on a coordinate divisible by the block width.
    AllOneFiber,
    /// Full product of a clique and a path, so every layer pair is crossed.
    BorderHeavy,
    /// One host vertex; the graph is a path.
    SingleColumn,
    /// Few enough vertices to trigger the product fallback.
    TinyN,
}

impl FromStr for AdversarialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "all-one-fiber" => Self::AllOneFiber,
            "border-heavy" => Self::BorderHeavy,
            "single-column" => Self::SingleColumn,
            "tiny-n" => Self::TinyN,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown adversarial kind {other:?}"
                )))
            }
        })
    }
}

/// Builds an adversarial instance with about `n` vertices and host width `k`.
pub fn gen_adversarial(kind: AdversarialKind, seed: u64, n: usize, k: usize) -> Result<Instance> {
    match kind {
        AdversarialKind::AllOneFiber => {
            let d = block_width(n).max(3);
            let layers = 4;
            let host_n = n.div_ceil(layers).max(k + 1);
            let (host, host_td) = gen_ktree(seed, host_n, k)?;
            let mut rng = rng(seed);
            let mut map: Vec<(usize, usize)> = (0..layers)
                .flat_map(|l| (0..host_n).map(move |v| (v, l * d)))
                .collect();
            map.truncate(n);
            let mut cells = map;
            cells.shuffle(&mut rng);
            cells.sort_unstable_by_key(|&(v, i)| (i, v));
            let graph = product_edges(&host, &cells, 0.8, &mut rng)?;
            Ok(Instance {
                graph,
                embedding: ProductEmbedding::new(host, (layers - 1) * d, cells)?,
                host_decomposition: host_td,
            })
        }
        AdversarialKind::BorderHeavy => {
            let host_n = k + 1;
            let d = n.div_ceil(host_n).max(1) - 1;
            let (host, host_td) = gen_ktree(seed, host_n, k)?;
            let cells: Vec<(usize, usize)> = (0..n).map(|c| (c % host_n, c / host_n)).collect();
            let mut rng = rng(seed);
            let graph = product_edges(&host, &cells, 1.0, &mut rng)?;
            Ok(Instance {
                graph,
                embedding: ProductEmbedding::new(host, d, cells)?,
                host_decomposition: host_td,
            })
        }
        AdversarialKind::SingleColumn => single_column(n),
        AdversarialKind::TinyN => {
            let n = n.clamp(1, 8);
            gen_product_instance(
                seed,
                &ProductParams {
                    host_n: (k + 1).max(2),
                    k: k.min(1),
                    d: 3,
                    keep: 1.0,
                    n,
                },
            )
        }
    }
}

fn single_column(n: usize) -> Result<Instance> {
    let host = Graph::empty(1);
    let graph = Graph::from_edges(n, (1..n).map(|i| (i - 1, i)))?;
    Ok(Instance {
        graph,
        embedding: ProductEmbedding::new(
            host,
            n.saturating_sub(1),
            (0..n).map(|i| (0, i)).collect(),
        )?,
        host_decomposition: TreeDecomposition::from_parts(vec![None], vec![vec![0]])?,
    })
}

/// Named instance families for the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    /// Partial k-tree; the graph is its own host.
    Ktree,
    /// Random subgraph of `H ⊠ P`.
    ProductSubgraph,
    /// A self-avoiding walk through `H ⊠ P`.
    FiberPath,
    /// A path on a single host vertex.
    SingleColumn,
    /// Full product of a host path and a path (a king's graph).
    GridLike,
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ktree" => Self::Ktree,
            "product-subgraph" => Self::ProductSubgraph,
            "fiber-path" => Self::FiberPath,
            "single-column" => Self::SingleColumn,
            "grid-like" => Self::GridLike,
            other => return Err(Error::InvalidParameter(format!("unknown shape {other:?}"))),
        })
    }
}

/// Full description of a generated instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub seed: u64,
    pub n: usize,
    pub w: usize,
    /// Path length; defaults to about `sqrt(n)`.
    pub d: Option<usize>,
    pub keep: f64,
    pub shape: Shape,
}

impl GenSpec {
    pub fn generate(&self) -> Result<Instance> {
        let n = self.n;
        let default_d = ((n as f64).sqrt().ceil() as usize).max(1);
        match self.shape {
            Shape::Ktree => {
                let (graph, td) =
                    gen_partial_ktree(self.seed, n.max(self.w + 1), self.w, self.keep)?;
                let embedding = ProductEmbedding::new(
                    graph.clone(),
                    0,
                    (0..graph.n()).map(|v| (v, 0)).collect(),
                )?;
                Ok(Instance {
                    graph,
                    embedding,
                    host_decomposition: td,
                })
            }
            Shape::ProductSubgraph => {
                let d = self.d.unwrap_or(default_d);
                // Half of the cells are used.
                let host_n = (2 * n).div_ceil(d + 1).max(self.w + 1);
                gen_product_instance(
                    self.seed,
                    &ProductParams {
                        host_n,
                        k: self.w,
                        d,
                        keep: self.keep,
                        n,
                    },
                )
            }
            Shape::FiberPath => fiber_path(self.seed, n, self.w, self.d.unwrap_or(default_d)),
            Shape::SingleColumn => single_column(n),
            Shape::GridLike => {
                let d = self.d.unwrap_or(default_d);
                let host_n = n.div_ceil(d + 1).max(1);
                let host = Graph::from_edges(host_n, (1..host_n).map(|v| (v - 1, v)))?;
                let td = if host_n == 1 {
                    TreeDecomposition::from_parts(vec![None], vec![vec![0]])?
                } else {
                    TreeDecomposition::from_parts(
                        (0..host_n - 1).map(|x| x.checked_sub(1)).collect(),
                        (1..host_n).map(|v| vec![v - 1, v]).collect(),
                    )?
                };
                let cells: Vec<(usize, usize)> = (0..n).map(|c| (c % host_n, c / host_n)).collect();
                let mut rng = rng(self.seed);
                let graph = product_edges(&host, &cells, self.keep, &mut rng)?;
                Ok(Instance {
                    graph,
                    embedding: ProductEmbedding::new(host, d.max(n.div_ceil(host_n) - 1), cells)?,
                    host_decomposition: td,
                })
            }
        }
    }
}

/// Random walk through `H ⊠ P` that never revisits a cell; restarts at a
/// fresh cell when stuck. Consecutive walk vertices are joined.
fn fiber_path(seed: u64, n: usize, k: usize, d: usize) -> Result<Instance> {
    let host_n = (2 * n).div_ceil(d + 1).max(k + 1);
    let (host, host_td) = gen_ktree(seed ^ 0x5851_f42d_4c95_7f2d, host_n, k)?;
    let total = host_n * (d + 1);
    if n > total {
        return Err(Error::InvalidParameter(
            "path longer than the product".into(),
        ));
    }
    let mut rng = rng(seed);
    let mut used: HashMap<(usize, usize), usize> = HashMap::new();
    let mut cells = Vec::with_capacity(n);
    let mut edges = Vec::new();
    let mut fresh = (0..total).collect::<Vec<_>>();
    fresh.shuffle(&mut rng);
    let mut prev: Option<(usize, usize)> = None;
    while cells.len() < n {
        let next = prev.and_then(|(v, i)| {
            let mut options = Vec::new();
            for x in std::iter::once(v).chain(host.neighbors(v).iter().copied()) {
                for j in i.saturating_sub(1)..=(i + 1).min(d) {
                    if (x, j) != (v, i) && !used.contains_key(&(x, j)) {
                        options.push((x, j));
                    }
                }
            }
            options.choose(&mut rng).copied()
        });
        let cell = match next {
            Some(c) => c,
            None => loop {
                let c = fresh.pop().expect("enough cells remain");
                let cell = (c % host_n, c / host_n);
                if !used.contains_key(&cell) {
                    break cell;
                }
            },
        };
        let u = cells.len();
        if next.is_some() {
            edges.push((u - 1, u));
        }
        used.insert(cell, u);
        cells.push(cell);
        prev = Some(cell);
    }
    Ok(Instance {
        graph: Graph::from_edges(n, edges)?,
        embedding: ProductEmbedding::new(host, d, cells)?,
        host_decomposition: host_td,
    })
}
