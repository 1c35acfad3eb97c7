//! Labels for graphs of bounded treewidth.
//!
//! Layout of a label (all widths come from [`TwMeta`]):
//!
//! ```text
//! [tag:3][depth:Wd][path:depth][pw:Wpw][index:pw]
//! [suffix_len:Wd][suffix:suffix_len][count:Wc]
//! count × [neighbor_depth:bits(depth+suffix_len)][npw:Wpw][nindex:npw][in_graph:1]
//! ```
//!
//! The identifier is the prefix up to `index`. Neighbor entries list the
//! out-neighbors in the oriented chordal completion, sorted by
//! `(depth, index)`; their paths are prefixes of the extended path.

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::bidecomposition::{build_bidecomposition, Bidecomposition};
use crate::codec::{bits_for, BitReader, BitString};
use crate::error::{DecodeError, Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::treewidth::{orientation_with_index, DecompositionIndex, TreeDecomposition};

pub(crate) const TAG_WIDTH: usize = 3;
pub(crate) const TAG_TW: u64 = 0b001;

/// Field widths shared by all labels of one encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwMeta {
    pub n: usize,
    /// Upper bound on the number of neighbor entries per label.
    pub k: usize,
    /// Width of depth and suffix-length fields.
    pub depth_width: usize,
    /// Width of the field giving the bit length of a part index.
    pub index_len_width: usize,
    /// Width of the neighbor count.
    pub count_width: usize,
}

impl TwMeta {
    pub(crate) const WORDS: usize = 5;

    pub fn to_words(&self) -> Vec<u32> {
        [
            self.n,
            self.k,
            self.depth_width,
            self.index_len_width,
            self.count_width,
        ]
        .iter()
        .map(|&x| x as u32)
        .collect()
    }

    pub fn from_words(words: &[u32]) -> Result<Self> {
        if words.len() != Self::WORDS {
            return Err(Error::Archive(format!(
                "tw meta needs {} words, found {}",
                Self::WORDS,
                words.len()
            )));
        }
        let w = |i: usize| words[i] as usize;
        let meta = Self {
            n: w(0),
            k: w(1),
            depth_width: w(2),
            index_len_width: w(3),
            count_width: w(4),
        };
        if meta.depth_width > 6 || meta.index_len_width > 7 || meta.count_width > 32 {
            return Err(Error::Archive("tw meta field widths out of range".into()));
        }
        Ok(meta)
    }
}

/// `(depth, part index, path)`: the node of the bidecomposition holding the
/// vertex, given by its root path, and the position within the node's part.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwIdentifier {
    pub depth: u8,
    pub part_index: u64,
    /// Root-to-node path, first edge highest; `depth` bits are significant.
    pub path: u64,
}

/// One entry of `Γ`: an out-neighbor's identifier and whether the edge is an
/// edge of the graph (as opposed to a fill edge).
pub type GammaEntry = (TwIdentifier, bool);

/// Everything the encoder knows, kept for the schemes layered on top.
#[derive(Clone, Debug)]
pub struct TwEncoding {
    pub meta: TwMeta,
    pub labels: Vec<BitString>,
    /// Out-neighbors of each vertex in `Γ` order.
    pub gamma_order: Vec<Vec<usize>>,
    pub bidecomposition: Bidecomposition,
}

/// Encodes `g` using a tree decomposition of `g`. Vertices in `q` get labels
/// of length `log |q| + O(k log log n)`.
pub fn tw_encode(
    g: &Graph,
    td: &TreeDecomposition,
    q: &VertexSet,
) -> Result<(TwMeta, Vec<BitString>)> {
    let enc = tw_encode_full(g, td, q)?;
    Ok((enc.meta, enc.labels))
}

pub fn tw_encode_full(g: &Graph, td: &TreeDecomposition, q: &VertexSet) -> Result<TwEncoding> {
    let n = g.n();
    if let Some(&v) = q.as_slice().last() {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
    }
    let idx = DecompositionIndex::new(td, n);
    if let Some(v) = (0..n).find(|&v| idx.top[v] == usize::MAX) {
        return Err(Error::InvalidDecomposition(format!(
            "vertex {v} is in no bag"
        )));
    }
    let orient = orientation_with_index(g, td, &idx);
    let mut s: Vec<usize> = Vec::new();
    for u in q.iter() {
        s.push(u);
        s.extend(orient.out[u].iter().copied());
    }
    let s = VertexSet::new(s, n)?;
    let bd = build_bidecomposition(&orient.completion(), td, &s)?;

    let node_depth = |v: usize| bd.nodes[bd.alpha[v]].depth;
    let mut gamma_order = Vec::with_capacity(n);
    let mut path_len = vec![0usize; n];
    let mut path_bits = vec![0u64; n];
    for u in 0..n {
        let mut list: Vec<usize> = orient.out[u].clone();
        list.sort_unstable_by_key(|&v| (node_depth(v), bd.index_in_part[v]));
        let deepest = list
            .last()
            .map(|&v| bd.alpha[v])
            .filter(|&x| bd.nodes[x].depth > node_depth(u))
            .unwrap_or(bd.alpha[u]);
        path_len[u] = bd.nodes[deepest].depth;
        path_bits[u] = bd.nodes[deepest].path;
        gamma_order.push(list);
    }
    let k = orient
        .out
        .iter()
        .map(Vec::len)
        .max()
        .unwrap_or(0)
        .max(td.width());
    let max_index = bd.index_in_part.iter().copied().max().unwrap_or(0) as u64;
    let meta = TwMeta {
        n,
        k,
        depth_width: bits_for(path_len.iter().copied().max().unwrap_or(0) as u64),
        index_len_width: bits_for(bits_for(max_index) as u64),
        count_width: bits_for(k as u64),
    };

    let mut labels = Vec::with_capacity(n);
    for u in 0..n {
        let mut l = BitString::new();
        let d = node_depth(u);
        let len = path_len[u];
        l.write_fixed(TAG_TW, TAG_WIDTH)?;
        l.write_fixed(d as u64, meta.depth_width)?;
        l.write_fixed(path_bits[u] >> (len - d), d)?;
        write_index(&mut l, bd.index_in_part[u] as u64, &meta)?;
        l.write_fixed((len - d) as u64, meta.depth_width)?;
        l.write_fixed(path_bits[u] & low_mask(len - d), len - d)?;
        l.write_fixed(gamma_order[u].len() as u64, meta.count_width)?;
        let nd_width = bits_for(len as u64);
        for (j, &v) in gamma_order[u].iter().enumerate() {
            l.write_fixed(node_depth(v) as u64, nd_width)?;
            write_index(&mut l, bd.index_in_part[v] as u64, &meta)?;
            let pos = orient.out[u].binary_search(&v).expect("out list is sorted");
            l.push_bit(orient.in_graph[u][pos]);
            debug_assert!(j < meta.k.max(1) || gamma_order[u].is_empty());
        }
        labels.push(l);
    }
    Ok(TwEncoding {
        meta,
        labels,
        gamma_order,
        bidecomposition: bd,
    })
}

#[inline]
fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

fn write_index(l: &mut BitString, index: u64, meta: &TwMeta) -> Result<()> {
    let w = bits_for(index);
    l.write_fixed(w as u64, meta.index_len_width)?;
    l.write_fixed(index, w)?;
    Ok(())
}

#[inline]
fn read_index(r: &mut BitReader<'_>, meta: &TwMeta) -> Result<u64, DecodeError> {
    let w = r.read_fixed(meta.index_len_width)? as usize;
    Ok(r.read_fixed(w)?)
}

#[inline]
fn read_identifier(r: &mut BitReader<'_>, meta: &TwMeta) -> Result<TwIdentifier, DecodeError> {
    if r.read_fixed(TAG_WIDTH)? != TAG_TW {
        return Err(DecodeError::SchemeMismatch);
    }
    let depth = r.read_fixed(meta.depth_width)?;
    if depth > 63 {
        return Err(DecodeError::Malformed("depth exceeds 63"));
    }
    let path = r.read_fixed(depth as usize)?;
    let part_index = read_index(r, meta)?;
    Ok(TwIdentifier {
        depth: depth as u8,
        part_index,
        path,
    })
}

/// Parsed label: identifier plus `Γ`.
#[derive(Clone, Debug)]
pub(crate) struct TwView {
    pub id: TwIdentifier,
    pub gamma: SmallVec<[GammaEntry; 8]>,
}

impl TwView {
    pub fn parse(mut r: BitReader<'_>, meta: &TwMeta) -> Result<Self, DecodeError> {
        let id = read_identifier(&mut r, meta)?;
        let suffix_len = r.read_fixed(meta.depth_width)? as usize;
        let len = id.depth as usize + suffix_len;
        if len > 63 {
            return Err(DecodeError::Malformed("path longer than 63"));
        }
        let full = (id.path << suffix_len) | r.read_fixed(suffix_len)?;
        let count = r.read_fixed(meta.count_width)? as usize;
        if count > meta.k {
            return Err(DecodeError::Malformed(
                "more neighbors than the width allows",
            ));
        }
        let nd_width = bits_for(len as u64);
        let mut gamma = SmallVec::with_capacity(count);
        for _ in 0..count {
            let depth = r.read_fixed(nd_width)? as usize;
            if depth > len {
                return Err(DecodeError::Malformed(
                    "neighbor deeper than the stored path",
                ));
            }
            let part_index = read_index(&mut r, meta)?;
            let in_graph = r.read_bit()?;
            let nid = TwIdentifier {
                depth: depth as u8,
                part_index,
                path: full >> (len - depth),
            };
            gamma.push((nid, in_graph));
        }
        if !r.is_at_end() {
            return Err(DecodeError::Malformed("trailing bits after tw label"));
        }
        Ok(Self { id, gamma })
    }

    /// Position of `id` in `Γ`, with its graph-edge flag.
    #[inline]
    pub fn find(&self, id: &TwIdentifier) -> Option<(usize, bool)> {
        self.gamma
            .iter()
            .position(|(x, _)| x == id)
            .map(|p| (p, self.gamma[p].1))
    }
}

/// Identifier of a label. Reads a fixed prefix only.
pub fn tw_iota(label: &BitString, meta: &TwMeta) -> Result<TwIdentifier, DecodeError> {
    read_identifier(&mut label.reader(), meta)
}

/// Out-neighbor identifiers with their graph-edge flags, in `(depth, index)`
/// order.
pub fn tw_gamma(label: &BitString, meta: &TwMeta) -> Result<Vec<GammaEntry>, DecodeError> {
    Ok(TwView::parse(label.reader(), meta)?.gamma.into_vec())
}

pub(crate) fn tw_adjacent_views(a: &TwView, b: &TwView) -> bool {
    if let Some((_, flag)) = b.find(&a.id) {
        return flag;
    }
    matches!(a.find(&b.id), Some((_, true)))
}

pub(crate) fn tw_adjacent_readers(
    a: BitReader<'_>,
    b: BitReader<'_>,
    meta: &TwMeta,
) -> Result<bool, DecodeError> {
    let va = TwView::parse(a, meta)?;
    let vb = TwView::parse(b, meta)?;
    if va.id == vb.id {
        return Err(DecodeError::IdenticalLabels);
    }
    Ok(tw_adjacent_views(&va, &vb))
}

/// Adjacency of the two labelled vertices.
pub fn tw_adjacent(a: &BitString, b: &BitString, meta: &TwMeta) -> Result<bool, DecodeError> {
    if a == b {
        return Err(DecodeError::IdenticalLabels);
    }
    tw_adjacent_readers(a.reader(), b.reader(), meta)
}
