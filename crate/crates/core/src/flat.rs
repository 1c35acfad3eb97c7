//! The flat scheme: labels of `(4/3) log n + O(w log log n)` bits for
//! subgraphs of `H ⊠ P`.
//!
//! The path is cut into blocks of width `d = ceil(n^(1/3))` at an offset `a`
//! chosen so that the border layers `W_a ∪ W_{a+1}` (coordinates congruent to
//! `a` or `a+1` mod `d`) hold at most `2n/d` vertices. Edges between the two
//! border layers form `G₁`, of treewidth at most `2w+1`; the rest form `G₂`,
//! which embeds into copies of `H` times a path of length `d-1`. Border
//! vertices carry a tw label for `G₁` and every vertex carries a product
//! label for `G₂`.
//!
//! Label: `[border:1]` then, for border vertices, `[λ₁_len:W][λ₁]`, then `λ₂`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::archive::{LabelArchive, SchemeKind, FLAG_FALLBACK};
use crate::codec::{bits_for, BitReader, BitString};
use crate::error::{DecodeError, Error, Result};
use crate::graph::{prune_unused, validate_embedding, Graph, ProductEmbedding, VertexSet};
use crate::product_label::{
    product_adjacent, product_adjacent_readers, product_encode, ProductMeta,
};
use crate::treewidth::{
    join_disjoint, product_with_edge_decomposition, validate_decomposition, DecompositionIndex,
    TreeDecomposition,
};
use crate::tw_label::{tw_adjacent_readers, tw_encode, TwMeta};

/// Largest `n` handled by the product-label fallback (block width below 3).
pub const FALLBACK_MAX_N: usize = 8;

/// Smallest `d` with `d³ >= n`.
pub fn block_width(n: usize) -> usize {
    let mut d = (n as f64).cbrt().round() as usize;
    while d.pow(3) < n {
        d += 1;
    }
    while d > 1 && (d - 1).pow(3) >= n {
        d -= 1;
    }
    d
}

/// Header parameters of a flat encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitMeta {
    pub block: usize,
    pub offset: usize,
    pub border_len_width: usize,
    pub border: TwMeta,
    pub interior: ProductMeta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlatMeta {
    Split(SplitMeta),
    /// Small graphs: every label is a product label.
    Fallback(ProductMeta),
}

impl FlatMeta {
    pub fn to_words(&self) -> Vec<u32> {
        match self {
            Self::Fallback(p) => p.to_words(),
            Self::Split(s) => {
                let mut w = vec![s.block as u32, s.offset as u32, s.border_len_width as u32];
                w.extend(s.border.to_words());
                w.extend(s.interior.to_words());
                w
            }
        }
    }

    pub fn from_words(words: &[u32], fallback: bool) -> Result<Self> {
        if fallback {
            return Ok(Self::Fallback(ProductMeta::from_words(words)?));
        }
        if words.len() != 3 + TwMeta::WORDS + ProductMeta::WORDS {
            return Err(Error::Archive(format!(
                "flat meta has {} words",
                words.len()
            )));
        }
        let border = TwMeta::from_words(&words[3..3 + TwMeta::WORDS])?;
        let interior = ProductMeta::from_words(&words[3 + TwMeta::WORDS..])?;
        if words[2] > 32 {
            return Err(Error::Archive("border length width out of range".into()));
        }
        Ok(Self::Split(SplitMeta {
            block: words[0] as usize,
            offset: words[1] as usize,
            border_len_width: words[2] as usize,
            border,
            interior,
        }))
    }
}

/// `|W_a ∪ W_{a+1}|` for every offset `a`.
pub fn border_sizes(e: &ProductEmbedding, d: usize) -> Vec<usize> {
    let mut per_residue = vec![0usize; d];
    for &(_, i) in &e.map {
        per_residue[i % d] += 1;
    }
    (0..d)
        .map(|a| per_residue[a] + per_residue[(a + 1) % d])
        .collect()
}

/// Smallest offset minimizing `|W_a ∪ W_{a+1}|`; at most `2n/d` by averaging.
pub fn choose_block_offset(e: &ProductEmbedding, d: usize) -> usize {
    assert!(d >= 3, "block width must be at least 3");
    let sizes = border_sizes(e, d);
    (0..d).min_by_key(|&a| (sizes[a], a)).unwrap()
}

/// Border/interior split of the edges for offset `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitGraphs {
    /// Edges between `W_a` and `W_{a+1}`, on border vertices renumbered
    /// in increasing order.
    pub g1: Graph,
    /// `border[local] = vertex` for `g1`.
    pub border: Vec<usize>,
    /// All vertices with the remaining edges.
    pub g2: Graph,
}

fn residue_class(i: usize, a: usize, d: usize) -> Option<bool> {
    let r = i % d;
    if r == a {
        Some(false)
    } else if r == (a + 1) % d {
        Some(true)
    } else {
        None
    }
}

pub fn split_graph(g: &Graph, e: &ProductEmbedding, a: usize, d: usize) -> SplitGraphs {
    let n = g.n();
    let class: Vec<Option<bool>> = e.map.iter().map(|&(_, i)| residue_class(i, a, d)).collect();
    let border: Vec<usize> = (0..n).filter(|&u| class[u].is_some()).collect();
    let mut local = vec![usize::MAX; n];
    for (j, &u) in border.iter().enumerate() {
        local[u] = j;
    }
    let mut e1 = Vec::new();
    let mut e2 = Vec::new();
    for (u, v) in g.edges() {
        match (class[u], class[v]) {
            (Some(x), Some(y)) if x != y => e1.push((local[u], local[v])),
            _ => e2.push((u, v)),
        }
    }
    SplitGraphs {
        g1: Graph::from_edges(border.len(), e1).expect("edges of a simple graph"),
        border,
        g2: Graph::from_edges(n, e2).expect("edges of a simple graph"),
    }
}

/// Decomposition of `G₁` of width at most `2w+1`.
///
/// Border vertices are grouped by the pair of layers `L_i ∪ L_{i+1}`
/// (`i ≡ a`) they belong to; each group embeds into `H ⊠ K₂`, whose
/// decomposition is restricted to the group. Groups are joined by a spine.
pub fn border_decomposition(
    e: &ProductEmbedding,
    td_h: &TreeDecomposition,
    border: &[usize],
    a: usize,
    d: usize,
) -> TreeDecomposition {
    let doubled = product_with_edge_decomposition(td_h);
    let idx = DecompositionIndex::new(&doubled, 2 * e.host.n());
    let mut groups: BTreeMap<i64, Vec<(usize, usize)>> = BTreeMap::new();
    for (j, &u) in border.iter().enumerate() {
        let (v, i) = e.map[u];
        let upper = residue_class(i, a, d).expect("border vertex lies on a border layer");
        let base = i as i64 - i64::from(upper);
        groups
            .entry(base)
            .or_default()
            .push((2 * v + usize::from(upper), j));
    }
    join_disjoint(
        groups
            .values()
            .map(|images| idx.restrict(&doubled, images))
            .collect(),
    )
}

/// Embedding of `G₂` into disjoint copies of `H` times a path of length
/// `d-1`: coordinate `i` becomes `j = i + d - a - 1`, copy `j / d`, new
/// coordinate `j mod d`. Only used copies of host vertices are kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripEmbedding {
    pub embedding: ProductEmbedding,
    /// `hosts[x] = (copy, original host vertex)` for each new host vertex.
    pub hosts: Vec<(usize, usize)>,
}

pub fn strip_embedding(e: &ProductEmbedding, a: usize, d: usize) -> StripEmbedding {
    assert!(d >= 3 && a < d);
    let shifted: Vec<(usize, usize, usize)> = e
        .map
        .iter()
        .map(|&(v, i)| {
            let j = i + d - a - 1;
            (j / d, v, j % d)
        })
        .collect();
    let mut hosts: Vec<(usize, usize)> = shifted.iter().map(|&(c, v, _)| (c, v)).collect();
    hosts.sort_unstable();
    hosts.dedup();
    let id: HashMap<(usize, usize), usize> =
        hosts.iter().enumerate().map(|(x, &cv)| (cv, x)).collect();
    let mut edges = Vec::new();
    for (x, &(c, v)) in hosts.iter().enumerate() {
        for &w in e.host.neighbors(v) {
            if w > v {
                if let Some(&y) = id.get(&(c, w)) {
                    edges.push((x, y));
                }
            }
        }
    }
    let host = Graph::from_edges(hosts.len(), edges).expect("copies of a simple graph");
    let map = shifted.iter().map(|&(c, v, j)| (id[&(c, v)], j)).collect();
    StripEmbedding {
        embedding: ProductEmbedding {
            host,
            path_len: d - 1,
            map,
        },
        hosts,
    }
}

/// Decomposition of the strip host: the decomposition of `H` restricted to
/// each copy, joined by a spine.
pub fn strip_decomposition(
    td_h: &TreeDecomposition,
    strip: &StripEmbedding,
    host_n: usize,
) -> TreeDecomposition {
    let idx = DecompositionIndex::new(td_h, host_n);
    let mut parts = Vec::new();
    let mut start = 0;
    while start < strip.hosts.len() {
        let copy = strip.hosts[start].0;
        let end = start + strip.hosts[start..].partition_point(|&(c, _)| c == copy);
        let images: Vec<(usize, usize)> = (start..end).map(|x| (strip.hosts[x].1, x)).collect();
        parts.push(idx.restrict(td_h, &images));
        start = end;
    }
    join_disjoint(parts)
}

/// Switches for the two length savings; turning both off gives the plain
/// concatenation baseline of about `2 log n` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlatOptions {
    /// Give border vertices short host labels in `λ₂`.
    pub q_saving: bool,
    /// Tagged coordinates in `λ₂`.
    pub compress_endpoints: bool,
}

impl Default for FlatOptions {
    fn default() -> Self {
        Self {
            q_saving: true,
            compress_endpoints: true,
        }
    }
}

impl FlatOptions {
    pub fn baseline() -> Self {
        Self {
            q_saving: false,
            compress_endpoints: false,
        }
    }
}

/// Block parameters chosen by the encoder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStructure {
    pub d: usize,
    pub a: usize,
    /// Sorted border vertices `W_a ∪ W_{a+1}`.
    pub border: Vec<usize>,
    pub e1: usize,
    pub e2: usize,
    pub g1_width: usize,
}

#[derive(Clone, Debug)]
pub struct FlatEncoding {
    pub archive: LabelArchive,
    /// `None` for the small-graph fallback.
    pub blocks: Option<BlockStructure>,
}

pub fn flat_encode(
    g: &Graph,
    e: &ProductEmbedding,
    td_h: &TreeDecomposition,
) -> Result<LabelArchive> {
    Ok(flat_encode_with(g, e, td_h, FlatOptions::default())?.archive)
}

pub fn flat_encode_with(
    g: &Graph,
    e: &ProductEmbedding,
    td_h: &TreeDecomposition,
    opts: FlatOptions,
) -> Result<FlatEncoding> {
    let report = validate_embedding(g, e);
    if !report.is_ok() {
        return Err(Error::InvalidEmbedding(format!("{report:?}")));
    }
    let td_report = validate_decomposition(&e.host, td_h);
    if !td_report.is_ok() {
        return Err(Error::InvalidDecomposition(format!("{td_report:?}")));
    }
    let n = g.n();
    let w = td_h.width();
    let pruned = prune_unused(e);
    let e0 = pruned.embedding;
    let host_images: Vec<(usize, usize)> = pruned
        .host_map
        .iter()
        .enumerate()
        .map(|(new, &old)| (old, new))
        .collect();
    let td0 = DecompositionIndex::new(td_h, e.host.n()).restrict(td_h, &host_images);

    if n <= FALLBACK_MAX_N {
        let p = product_encode(g, &e0, &td0, &VertexSet::empty(), opts.compress_endpoints)?;
        let meta = FlatMeta::Fallback(p.meta);
        return Ok(FlatEncoding {
            archive: LabelArchive {
                kind: SchemeKind::Flat,
                flags: FLAG_FALLBACK,
                n,
                w,
                d: e0.path_len,
                meta: meta.to_words(),
                labels: p.labels,
            },
            blocks: None,
        });
    }

    let d = block_width(n);
    let a = choose_block_offset(&e0, d);
    let split = split_graph(g, &e0, a, d);
    let td1 = border_decomposition(&e0, &td0, &split.border, a, d);
    let (border_meta, lambda1) = tw_encode(&split.g1, &td1, &VertexSet::empty())?;
    let strip = strip_embedding(&e0, a, d);
    let td2 = strip_decomposition(&td0, &strip, e0.host.n());
    let q = if opts.q_saving {
        VertexSet::new(split.border.clone(), n)?
    } else {
        VertexSet::empty()
    };
    let p = product_encode(
        &split.g2,
        &strip.embedding,
        &td2,
        &q,
        opts.compress_endpoints,
    )?;

    let border_len_width = bits_for(lambda1.iter().map(BitString::len).max().unwrap_or(0) as u64);
    let mut local = vec![usize::MAX; n];
    for (j, &u) in split.border.iter().enumerate() {
        local[u] = j;
    }
    let mut labels = Vec::with_capacity(n);
    for (u, lambda2) in p.labels.into_iter().enumerate() {
        let mut l = BitString::new();
        if local[u] == usize::MAX {
            l.push_bit(false);
        } else {
            l.push_bit(true);
            l.write_length_prefixed(&lambda1[local[u]], border_len_width)?;
        }
        l.append(&lambda2);
        labels.push(l);
    }
    let meta = FlatMeta::Split(SplitMeta {
        block: d,
        offset: a,
        border_len_width,
        border: border_meta,
        interior: p.meta,
    });
    Ok(FlatEncoding {
        archive: LabelArchive {
            kind: SchemeKind::Flat,
            flags: 0,
            n,
            w,
            d,
            meta: meta.to_words(),
            labels,
        },
        blocks: Some(BlockStructure {
            d,
            a,
            border: split.border,
            e1: split.g1.m(),
            e2: split.g2.m(),
            g1_width: td1.width(),
        }),
    })
}

fn split_label<'a>(
    mut r: BitReader<'a>,
    meta: &SplitMeta,
) -> Result<(Option<BitReader<'a>>, BitReader<'a>), DecodeError> {
    let lambda1 = if r.read_bit()? {
        Some(r.read_length_prefixed_view(meta.border_len_width)?)
    } else {
        None
    };
    Ok((lambda1, r))
}

/// Adjacency of the two labelled vertices: an edge of `G₁` between two
/// border vertices, or an edge of `G₂`.
pub fn flat_adjacent(x: &BitString, y: &BitString, meta: &FlatMeta) -> Result<bool, DecodeError> {
    if x == y {
        return Err(DecodeError::IdenticalLabels);
    }
    match meta {
        FlatMeta::Fallback(p) => product_adjacent(x, y, p),
        FlatMeta::Split(s) => {
            let (bx, ix) = split_label(x.reader(), s)?;
            let (by, iy) = split_label(y.reader(), s)?;
            if let (Some(bx), Some(by)) = (bx, by) {
                if tw_adjacent_readers(bx, by, &s.border)? {
                    return Ok(true);
                }
            }
            product_adjacent_readers(ix, iy, &s.interior)
        }
    }
}
