use std::collections::{BTreeSet, HashSet};

use super::TreeDecomposition;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Largest graph handled by the exact search.
const EXACT_LIMIT: usize = 32;

/// Tree decomposition of `g`.
///
/// With a width hint and at most 32 vertices an exact search decides
/// whether the treewidth is at most the hint and fails with
/// [`Error::ExceedsHint`] otherwise. Everything else uses the min-fill
/// elimination heuristic, whose width is only an upper bound.
pub fn decompose(g: &Graph, width_hint: Option<usize>) -> Result<TreeDecomposition> {
    if g.n() == 0 {
        return Ok(TreeDecomposition::empty());
    }
    if let Some(hint) = width_hint {
        if g.n() <= EXACT_LIMIT {
            return match exact_ordering(g, hint) {
                Some(order) => Ok(decomposition_from_ordering(g, &order)),
                None => Err(Error::ExceedsHint { hint }),
            };
        }
    }
    Ok(decomposition_from_ordering(g, &min_fill_ordering(g)))
}

/// Min-fill elimination order; ties broken by degree, then vertex index.
fn min_fill_ordering(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut adj: Vec<HashSet<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let fill = |adj: &[HashSet<usize>], v: usize| -> usize {
        let nb: Vec<usize> = adj[v].iter().copied().collect();
        let mut missing = 0;
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if !adj[a].contains(&b) {
                    missing += 1;
                }
            }
        }
        missing
    };
    let mut key: Vec<(usize, usize, usize)> =
        (0..n).map(|v| (fill(&adj, v), adj[v].len(), v)).collect();
    let mut queue: BTreeSet<(usize, usize, usize)> = key.iter().copied().collect();
    let mut order = Vec::with_capacity(n);
    while let Some(entry) = queue.pop_first() {
        let v = entry.2;
        order.push(v);
        let mut nb: Vec<usize> = adj[v].drain().collect();
        nb.sort_unstable();
        for &a in &nb {
            adj[a].remove(&v);
        }
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if adj[a].insert(b) {
                    adj[b].insert(a);
                }
            }
        }
        let mut touched: Vec<usize> = nb.clone();
        for &a in &nb {
            touched.extend(adj[a].iter().copied());
        }
        touched.sort_unstable();
        touched.dedup();
        for w in touched {
            if queue.remove(&key[w]) {
                key[w] = (fill(&adj, w), adj[w].len(), w);
                queue.insert(key[w]);
            }
        }
    }
    order
}

/// Decomposition induced by eliminating vertices in `order`: the bag of `v`
/// is `v` plus its neighbors at elimination time, attached to the bag of the
/// neighbor eliminated next.
pub fn decomposition_from_ordering(g: &Graph, order: &[usize]) -> TreeDecomposition {
    let n = g.n();
    assert_eq!(order.len(), n, "ordering must list every vertex once");
    let mut rank = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }
    let mut adj: Vec<HashSet<usize>> = (0..n)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut bags = Vec::with_capacity(n);
    let mut attach = Vec::with_capacity(n);
    for &v in order {
        let mut nb: Vec<usize> = adj[v].drain().collect();
        nb.sort_unstable();
        for &a in &nb {
            adj[a].remove(&v);
        }
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if adj[a].insert(b) {
                    adj[b].insert(a);
                }
            }
        }
        attach.push(nb.iter().copied().min_by_key(|&a| rank[a]));
        let mut bag = nb;
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
    }
    // Bag i belongs to order[i]; re-root so the last bag of each component
    // comes first, then chain component roots.
    let mut parent: Vec<Option<usize>> = attach.iter().map(|a| a.map(|a| rank[a])).collect();
    parent.reverse();
    bags.reverse();
    let last = n - 1;
    for p in parent.iter_mut().flatten() {
        *p = last - *p;
    }
    TreeDecomposition::from_parts(parent, bags).expect("elimination forest is acyclic")
}

/// Elimination degree of `v` after eliminating `elim`: the uneliminated
/// vertices reachable from `v` through eliminated ones.
fn reach(adj: &[u32], elim: u32, v: usize) -> u32 {
    let mut seen = 1u32 << v;
    let mut result = 0u32;
    let mut frontier = adj[v];
    loop {
        let new = frontier & !seen;
        if new == 0 {
            break;
        }
        seen |= new;
        result |= new & !elim;
        let mut through = new & elim;
        frontier = 0;
        while through != 0 {
            let x = through.trailing_zeros() as usize;
            through &= through - 1;
            frontier |= adj[x];
        }
    }
    result
}

fn exact_ordering(g: &Graph, hint: usize) -> Option<Vec<usize>> {
    let n = g.n();
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut failed = HashSet::new();
    let mut order = Vec::with_capacity(n);
    if search(&adj, full, 0, hint, &mut failed, &mut order) {
        Some(order)
    } else {
        None
    }
}

fn search(
    adj: &[u32],
    full: u32,
    elim: u32,
    hint: usize,
    failed: &mut HashSet<u32>,
    order: &mut Vec<usize>,
) -> bool {
    let rest = full & !elim;
    if rest.count_ones() as usize <= hint + 1 {
        let mut r = rest;
        while r != 0 {
            order.push(r.trailing_zeros() as usize);
            r &= r - 1;
        }
        return true;
    }
    if failed.contains(&elim) {
        return false;
    }
    let mut candidates = Vec::new();
    let mut r = rest;
    while r != 0 {
        let v = r.trailing_zeros() as usize;
        r &= r - 1;
        let q = reach(adj, elim, v);
        if q.count_ones() as usize > hint {
            continue;
        }
        // Eliminating a simplicial vertex is always safe.
        let mut simplicial = true;
        let mut qs = q;
        while qs != 0 {
            let u = qs.trailing_zeros() as usize;
            qs &= qs - 1;
            let others = q & !(1 << u);
            if reach(adj, elim, u) & others != others {
                simplicial = false;
                break;
            }
        }
        if simplicial {
            candidates.clear();
            candidates.push(v);
            break;
        }
        candidates.push(v);
    }
    for v in candidates {
        order.push(v);
        if search(adj, full, elim | (1 << v), hint, failed, order) {
            return true;
        }
        order.pop();
    }
    failed.insert(elim);
    false
}
