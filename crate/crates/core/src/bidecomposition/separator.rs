//! Balanced separators for weighted trees and bounded-treewidth graphs, and
//! the two-weight balanced partition used by every bidecomposition step.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::treewidth::{DecompositionIndex, TreeDecomposition};

/// Relative slack for comparisons on real-valued weights.
pub(crate) const REL_TOL: f64 = 1e-9;

/// Nonnegative vertex (or node, or item) weights with a cached total.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightFn {
    weights: Vec<f64>,
    total: f64,
}

impl WeightFn {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "weight {} at index {i} is not a nonnegative real",
                weights[i]
            )));
        }
        let total = weights.iter().sum();
        Ok(Self { weights, total })
    }

    pub fn unit(n: usize) -> Self {
        Self {
            weights: vec![1.0; n],
            total: n as f64,
        }
    }

    pub fn indicator(n: usize, members: &[usize]) -> Self {
        let mut weights = vec![0.0; n];
        for &v in members {
            weights[v] = 1.0;
        }
        let total = weights.iter().sum();
        Self { weights, total }
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "eps must be positive, got {eps}"
        )))
    }
}

/// Node set `S` of a rooted forest such that `|S| <= 1/eps` and every
/// component of the forest minus `S` weighs less than `eps` times the total.
///
/// `parent[x]` is `None` for roots. Bottom-up marking: a node joins `S` as
/// soon as the unmarked weight below it reaches the threshold.
pub fn tree_balanced_separator(
    parent: &[Option<usize>],
    w: &WeightFn,
    eps: f64,
) -> Result<Vec<usize>> {
    check_eps(eps)?;
    if parent.len() != w.len() {
        return Err(Error::InvalidParameter(format!(
            "{} tree nodes but {} weights",
            parent.len(),
            w.len()
        )));
    }
    let order = bottom_up_order(parent)?;
    let mut s = mark_bottom_up(parent, w.as_slice(), w.total(), eps, order.into_iter());
    s.sort_unstable();
    Ok(s)
}

/// Children-before-parents order of a forest given by parent links.
fn bottom_up_order(parent: &[Option<usize>]) -> Result<Vec<usize>> {
    let n = parent.len();
    let mut children = vec![Vec::new(); n];
    let mut roots = Vec::new();
    for (x, p) in parent.iter().enumerate() {
        match *p {
            Some(p) if p < n && p != x => children[p].push(x),
            Some(p) => {
                return Err(Error::InvalidParameter(format!(
                    "node {x} has invalid parent {p}"
                )))
            }
            None => roots.push(x),
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut stack = roots;
    while let Some(x) = stack.pop() {
        order.push(x);
        stack.extend(children[x].iter().copied());
    }
    if order.len() != n {
        return Err(Error::InvalidParameter(
            "parent links contain a cycle".into(),
        ));
    }
    order.reverse();
    Ok(order)
}

pub(crate) fn mark_bottom_up(
    parent: &[Option<usize>],
    weights: &[f64],
    total: f64,
    eps: f64,
    order: impl Iterator<Item = usize>,
) -> Vec<usize> {
    let mut s = Vec::new();
    if total <= 0.0 {
        return s;
    }
    let threshold = eps * total;
    let mut acc = weights.to_vec();
    for x in order {
        if acc[x] >= threshold {
            s.push(x);
            acc[x] = 0.0;
        }
        if let Some(p) = parent[x] {
            acc[p] += acc[x];
        }
    }
    s
}

/// Vertex set `Z` with `|Z| <= ceil(1/eps) * (width + 1)` such that every
/// component of `g - Z` weighs at most `eps * w(g)`.
///
/// Node weights are the margin weights `w(β(x) \ β(parent(x)))`; `Z` is the
/// union of the bags picked by [`tree_balanced_separator`].
pub fn tw_balanced_separator(
    g: &Graph,
    td: &TreeDecomposition,
    w: &WeightFn,
    eps: f64,
) -> Result<Vec<usize>> {
    check_eps(eps)?;
    if w.len() != g.n() {
        return Err(Error::InvalidParameter(format!(
            "{} vertices but {} weights",
            g.n(),
            w.len()
        )));
    }
    let idx = DecompositionIndex::new(td, g.n());
    let mut margin = vec![0.0; td.num_nodes()];
    for v in 0..g.n() {
        match idx.top[v] {
            usize::MAX => {
                return Err(Error::InvalidDecomposition(format!(
                    "vertex {v} is in no bag"
                )))
            }
            x => margin[x] += w.get(v),
        }
    }
    let mut order = td.postorder();
    if order.len() != td.num_nodes() {
        order = (0..td.num_nodes()).rev().collect();
    }
    let nodes = mark_bottom_up(td.parents(), &margin, w.total(), eps, order.into_iter());
    let mut z: Vec<usize> = nodes
        .iter()
        .flat_map(|&x| td.bag(x).iter().copied())
        .collect();
    z.sort_unstable();
    z.dedup();
    Ok(z)
}

/// Output of [`two_weight_partition`]. `order` is the signed-prefix order
/// of the items; `y` is a prefix of it and `z` the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoWayPartition {
    pub y: Vec<usize>,
    pub z: Vec<usize>,
    pub order: Vec<usize>,
}

/// Splits items into `Y`, `Z` with `w_t(W) <= (1/2 + 3 eps) w_t(total)` for
/// both weight functions, provided no single item exceeds `eps` of either
/// total.
///
/// Items are ordered so that every prefix sum of
/// `ξ(x) = w1(x)/w1(total) - w2(x)/w2(total)` stays within `[-2eps, 2eps]`:
/// while the running sum is nonnegative the next item is the lowest-index
/// one with `ξ <= 0`, otherwise the lowest-index one with `ξ > 0`. `Y` is the
/// shortest prefix holding half of `w1`.
pub fn two_weight_partition(w1: &WeightFn, w2: &WeightFn, eps: f64) -> Result<TwoWayPartition> {
    check_eps(eps)?;
    let m = w1.len();
    if w2.len() != m {
        return Err(Error::InvalidParameter(format!(
            "weight functions over {} and {} items",
            m,
            w2.len()
        )));
    }
    for w in [w1, w2] {
        let cap = eps * w.total() * (1.0 + REL_TOL);
        if let Some(index) = (0..m).find(|&i| w.get(i) > cap) {
            return Err(Error::ElementTooHeavy { index });
        }
    }
    let (t1, t2) = (w1.total(), w2.total());
    if t1 <= 0.0 || t2 <= 0.0 {
        // Degenerate: fill Y by index until it holds half of the other weight.
        let other = if t1 <= 0.0 { w2 } else { w1 };
        let half = other.total() / 2.0;
        let mut acc = 0.0;
        let mut p = 0;
        while p < m && acc < half {
            acc += other.get(p);
            p += 1;
        }
        let order: Vec<usize> = (0..m).collect();
        return Ok(TwoWayPartition {
            y: order[..p].to_vec(),
            z: order[p..].to_vec(),
            order,
        });
    }
    let xi: Vec<f64> = (0..m).map(|i| w1.get(i) / t1 - w2.get(i) / t2).collect();
    let nonpositive: Vec<usize> = (0..m).filter(|&i| xi[i] <= 0.0).collect();
    let positive: Vec<usize> = (0..m).filter(|&i| xi[i] > 0.0).collect();
    let (mut a, mut b) = (0, 0);
    let mut order = Vec::with_capacity(m);
    let mut prefix = 0.0;
    while order.len() < m {
        let take_nonpositive = if prefix >= 0.0 {
            a < nonpositive.len()
        } else {
            b >= positive.len()
        };
        let next = if take_nonpositive {
            a += 1;
            nonpositive[a - 1]
        } else {
            b += 1;
            positive[b - 1]
        };
        prefix += xi[next];
        debug_assert!(
            prefix.abs() <= 2.0 * eps + 1e-7,
            "prefix sum {prefix} escaped [-2eps, 2eps] with eps = {eps}"
        );
        order.push(next);
    }
    let half = t1 / 2.0;
    let mut acc = 0.0;
    let mut p = 0;
    while p < m && acc < half {
        acc += w1.get(order[p]);
        p += 1;
    }
    Ok(TwoWayPartition {
        y: order[..p].to_vec(),
        z: order[p..].to_vec(),
        order,
    })
}

/// Separation `(A, X, B)` of the vertex set: no edge joins `A` and `B`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Split {
    pub a: Vec<usize>,
    pub x: Vec<usize>,
    pub b: Vec<usize>,
}

/// Balanced separation for two weight functions at once.
///
/// `X` is the union of two tree-decomposition separators computed at
/// `eps / 3`, so `|X| <= 2 ceil(3/eps) (width + 1)`, and the components of
/// `g - X` are grouped with [`two_weight_partition`] so that both sides
/// carry at most `(1/2 + eps)` of each weight.
pub fn split(
    g: &Graph,
    td: &TreeDecomposition,
    w1: &WeightFn,
    w2: &WeightFn,
    eps: f64,
) -> Result<Split> {
    check_eps(eps)?;
    if w1.len() != g.n() || w2.len() != g.n() {
        return Err(Error::InvalidParameter(
            "weights must cover every vertex".into(),
        ));
    }
    let mut splitter = Splitter::new(g, td, w1.as_slice(), w2.as_slice())?;
    let region = splitter.full_region();
    Ok(splitter.split_region(&region, eps))
}

/// Reusable state for splitting many disjoint vertex regions of one graph.
pub(crate) struct Splitter<'a> {
    g: &'a Graph,
    td: &'a TreeDecomposition,
    idx: DecompositionIndex,
    w1: &'a [f64],
    w2: &'a [f64],
    epoch: u32,
    in_region: Vec<u32>,
    in_x: Vec<u32>,
    seen: Vec<u32>,
    comp: Vec<u32>,
}

impl<'a> Splitter<'a> {
    pub fn new(
        g: &'a Graph,
        td: &'a TreeDecomposition,
        w1: &'a [f64],
        w2: &'a [f64],
    ) -> Result<Self> {
        let n = g.n();
        let idx = DecompositionIndex::new(td, n);
        if let Some(v) = (0..n).find(|&v| idx.top[v] == usize::MAX) {
            return Err(Error::InvalidDecomposition(format!(
                "vertex {v} is in no bag"
            )));
        }
        Ok(Self {
            g,
            td,
            idx,
            w1,
            w2,
            epoch: 0,
            in_region: vec![0; n],
            in_x: vec![0; n],
            seen: vec![0; n],
            comp: vec![0; n],
        })
    }

    /// All vertices, grouped by top node in preorder. Regions must keep this
    /// order; filtering preserves it.
    pub fn full_region(&self) -> Vec<usize> {
        let mut r: Vec<usize> = (0..self.g.n()).collect();
        r.sort_unstable_by_key(|&v| (self.idx.tin[self.idx.top[v]], v));
        r
    }

    pub fn split_region(&mut self, region: &[usize], eps: f64) -> Split {
        if region.is_empty() {
            return Split::default();
        }
        self.epoch += 1;
        let ep = self.epoch;
        for &v in region {
            self.in_region[v] = ep;
        }
        // Local forest on the distinct top nodes, with margin weights.
        let mut nodes: Vec<usize> = Vec::new();
        let mut m1: Vec<f64> = Vec::new();
        let mut m2: Vec<f64> = Vec::new();
        let (mut total1, mut total2) = (0.0, 0.0);
        for &v in region {
            let x = self.idx.top[v];
            if nodes.last() != Some(&x) {
                nodes.push(x);
                m1.push(0.0);
                m2.push(0.0);
            }
            *m1.last_mut().unwrap() += self.w1[v];
            *m2.last_mut().unwrap() += self.w2[v];
            total1 += self.w1[v];
            total2 += self.w2[v];
        }
        let forest = self.idx.induced_forest(&nodes);
        let sub_eps = eps / 3.0;
        let order = (0..nodes.len()).rev();
        let mut picked = mark_bottom_up(&forest, &m1, total1, sub_eps, order.clone());
        picked.extend(mark_bottom_up(&forest, &m2, total2, sub_eps, order));

        let mut x = Vec::new();
        for &i in &picked {
            for &v in self.td.bag(nodes[i]) {
                if self.in_region[v] == ep && self.in_x[v] != ep {
                    self.in_x[v] = ep;
                    x.push(v);
                }
            }
        }
        x.sort_unstable();

        // Components of the region minus X.
        let mut comp_w1: Vec<f64> = Vec::new();
        let mut comp_w2: Vec<f64> = Vec::new();
        let mut stack = Vec::new();
        for &s in region {
            if self.in_x[s] == ep || self.seen[s] == ep {
                continue;
            }
            let c = comp_w1.len() as u32;
            let (mut c1, mut c2) = (0.0, 0.0);
            self.seen[s] = ep;
            stack.push(s);
            while let Some(v) = stack.pop() {
                self.comp[v] = c;
                c1 += self.w1[v];
                c2 += self.w2[v];
                for &u in self.g.neighbors(v) {
                    if self.in_region[u] == ep && self.in_x[u] != ep && self.seen[u] != ep {
                        self.seen[u] = ep;
                        stack.push(u);
                    }
                }
            }
            comp_w1.push(c1);
            comp_w2.push(c2);
        }
        let num_comps = comp_w1.len();

        // Pad with virtual items carrying the separator's weight so that the
        // item totals equal the region totals; each item then weighs at most
        // sub_eps of the region total, and dropping the pads only lowers the
        // side weights.
        let sep1: f64 = x.iter().map(|&v| self.w1[v]).sum();
        let sep2: f64 = x.iter().map(|&v| self.w2[v]).sum();
        for (sep, total, first) in [(sep1, total1, true), (sep2, total2, false)] {
            if sep <= 0.0 || total <= 0.0 {
                continue;
            }
            let pieces = (sep / (sub_eps * total)).ceil().max(1.0) as usize;
            let piece = sep / pieces as f64;
            for _ in 0..pieces {
                comp_w1.push(if first { piece } else { 0.0 });
                comp_w2.push(if first { 0.0 } else { piece });
            }
        }
        let w1 = WeightFn::new(comp_w1).expect("component weights are nonnegative");
        let w2 = WeightFn::new(comp_w2).expect("component weights are nonnegative");
        let part = two_weight_partition(&w1, &w2, sub_eps)
            .expect("separator components respect the item bound");
        let mut left = vec![false; num_comps];
        for &i in &part.y {
            if i < num_comps {
                left[i] = true;
            }
        }
        let mut a = Vec::new();
        let mut b = Vec::new();
        for &v in region {
            if self.in_x[v] == ep {
                continue;
            }
            if left[self.comp[v] as usize] {
                a.push(v);
            } else {
                b.push(v);
            }
        }
        Split { a, x, b }
    }
}
