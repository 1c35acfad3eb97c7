//! Labels for subgraphs of `H ⊠ P` with `P` a path of length `d`.
//!
//! A label is `[κ_len:Wk][coord_len:Wc][κ][coord][adjacency code]` where `κ`
//! is the tw label of the host vertex. The adjacency code has `3(k+1)` bits;
//! bit `3p + (t+1)` tells whether the vertex is adjacent to the vertex placed
//! at `(L[p], i + t)`, where `L` is the host vertex followed by its `Γ` list.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::codec::{bits_for, BitReader, BitString, CodecError};
use crate::error::{DecodeError, Error, Result};
use crate::graph::{validate_embedding, Graph, ProductEmbedding, VertexSet};
use crate::treewidth::TreeDecomposition;
use crate::tw_label::{tw_encode_full, TwMeta, TwView};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductMeta {
    pub host: TwMeta,
    pub n: usize,
    pub path_len: usize,
    pub kappa_len_width: usize,
    pub coord_len_width: usize,
    /// Adjacency-code width, `3(k+1)`.
    pub adj_width: usize,
    /// Coordinates use the tagged form of [`CoordField`].
    pub compressed: bool,
}

impl ProductMeta {
    pub(crate) const WORDS: usize = TwMeta::WORDS + 6;

    pub fn to_words(&self) -> Vec<u32> {
        let mut w = self.host.to_words();
        w.extend(
            [
                self.n,
                self.path_len,
                self.kappa_len_width,
                self.coord_len_width,
                self.adj_width,
                self.compressed as usize,
            ]
            .iter()
            .map(|&x| x as u32),
        );
        w
    }

    pub fn from_words(words: &[u32]) -> Result<Self> {
        if words.len() != Self::WORDS {
            return Err(Error::Archive(format!(
                "product meta needs {} words, found {}",
                Self::WORDS,
                words.len()
            )));
        }
        let host = TwMeta::from_words(&words[..TwMeta::WORDS])?;
        let w = |i: usize| words[TwMeta::WORDS + i] as usize;
        let meta = Self {
            host,
            n: w(0),
            path_len: w(1),
            kappa_len_width: w(2),
            coord_len_width: w(3),
            adj_width: w(4),
            compressed: w(5) != 0,
        };
        if meta.kappa_len_width > 32 || meta.coord_len_width > 7 || w(5) > 1 {
            return Err(Error::Archive(
                "product meta field widths out of range".into(),
            ));
        }
        if meta.adj_width != 3 * (meta.host.k + 1) {
            return Err(Error::Archive(
                "adjacency code width disagrees with k".into(),
            ));
        }
        Ok(meta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum CoordTag {
    Zero = 0,
    One = 1,
    DMinus1 = 2,
    D = 3,
    Middle = 4,
}

impl CoordTag {
    fn from_bits(bits: u64) -> Option<Self> {
        Some(match bits {
            0 => Self::Zero,
            1 => Self::One,
            2 => Self::DMinus1,
            3 => Self::D,
            4 => Self::Middle,
            _ => return None,
        })
    }
}

/// A path coordinate: plain, or tagged so that the endpoints `0` and `d`
/// cost no value bits. Tagged fields can be compared without knowing `d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoordField {
    Plain(u64),
    Tagged { tag: CoordTag, value: Option<u64> },
}

pub(crate) const COORD_TAG_WIDTH: usize = 3;

impl CoordField {
    /// Tagged form of coordinate `i` on a path of length `d >= 4`.
    pub fn compress(i: u64, d: u64) -> Self {
        debug_assert!(d >= 4 && i <= d);
        let (tag, value) = if i == 0 {
            (CoordTag::Zero, None)
        } else if i == d {
            (CoordTag::D, None)
        } else if i == 1 {
            (CoordTag::One, Some(1))
        } else if i == d - 1 {
            (CoordTag::DMinus1, Some(i))
        } else {
            (CoordTag::Middle, Some(i))
        };
        Self::Tagged { tag, value }
    }

    /// Value when it can be known without `d`.
    fn known_value(&self) -> Option<u64> {
        match *self {
            Self::Plain(v) => Some(v),
            Self::Tagged {
                tag: CoordTag::Zero,
                ..
            } => Some(0),
            Self::Tagged { value, .. } => value,
        }
    }

    pub(crate) fn write(&self, out: &mut BitString) -> Result<(), CodecError> {
        match *self {
            Self::Plain(v) => out.write_fixed(v, bits_for(v)),
            Self::Tagged { tag, value } => {
                out.write_fixed(tag as u64, COORD_TAG_WIDTH)?;
                if let Some(v) = value {
                    out.write_fixed(v, bits_for(v))?;
                }
                Ok(())
            }
        }
    }

    pub(crate) fn bit_len(&self) -> usize {
        match *self {
            Self::Plain(v) => bits_for(v),
            Self::Tagged { value, .. } => COORD_TAG_WIDTH + value.map_or(0, bits_for),
        }
    }

    pub(crate) fn read(mut r: BitReader<'_>, compressed: bool) -> Result<Self, DecodeError> {
        if !compressed {
            let len = r.remaining();
            if len > 64 {
                return Err(DecodeError::Malformed("coordinate wider than 64 bits"));
            }
            return Ok(Self::Plain(r.read_fixed(len)?));
        }
        let tag = CoordTag::from_bits(r.read_fixed(COORD_TAG_WIDTH)?)
            .ok_or(DecodeError::Malformed("unknown coordinate tag"))?;
        let len = r.remaining();
        let has_value = matches!(tag, CoordTag::One | CoordTag::DMinus1 | CoordTag::Middle);
        if has_value != (len > 0) || len > 64 {
            return Err(DecodeError::Malformed(
                "coordinate value does not match its tag",
            ));
        }
        let value = has_value.then(|| r.read_fixed(len)).transpose()?;
        Ok(Self::Tagged { tag, value })
    }
}

/// Outcome of comparing two coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoordDiff {
    Minus1,
    Zero,
    Plus1,
    Far,
}

impl CoordDiff {
    fn from_values(a: u64, b: u64) -> Self {
        match a as i128 - b as i128 {
            -1 => Self::Minus1,
            0 => Self::Zero,
            1 => Self::Plus1,
            _ => Self::Far,
        }
    }

    /// `t + 1` for `t ∈ {-1, 0, 1}`.
    fn offset(self) -> Option<usize> {
        match self {
            Self::Minus1 => Some(0),
            Self::Zero => Some(1),
            Self::Plus1 => Some(2),
            Self::Far => None,
        }
    }
}

/// `a - b` when it lies in `{-1, 0, 1}`, otherwise `Far`.
///
/// Tagged fields assume `d >= 4`. A `D` endpoint is decided from the tags
/// alone: it is next to `D_MINUS_1`, equal to `D`, and far from the rest.
pub fn coord_diff(a: CoordField, b: CoordField) -> CoordDiff {
    use CoordField::Tagged;
    let is_d = |c: &CoordField| {
        matches!(
            c,
            Tagged {
                tag: CoordTag::D,
                ..
            }
        )
    };
    match (is_d(&a), is_d(&b)) {
        (true, true) => CoordDiff::Zero,
        (true, false) => match b {
            Tagged {
                tag: CoordTag::DMinus1,
                ..
            } => CoordDiff::Plus1,
            _ => CoordDiff::Far,
        },
        (false, true) => match a {
            Tagged {
                tag: CoordTag::DMinus1,
                ..
            } => CoordDiff::Minus1,
            _ => CoordDiff::Far,
        },
        (false, false) => match (a.known_value(), b.known_value()) {
            (Some(x), Some(y)) => CoordDiff::from_values(x, y),
            _ => CoordDiff::Far,
        },
    }
}

#[derive(Clone, Debug)]
pub struct ProductEncoding {
    pub meta: ProductMeta,
    pub labels: Vec<BitString>,
}

/// Encodes `g` through its embedding `e` and a decomposition `td` of the
/// host. Host vertices used by `q` receive the short tw labels.
pub fn product_encode(
    g: &Graph,
    e: &ProductEmbedding,
    td: &TreeDecomposition,
    q: &VertexSet,
    compress_endpoints: bool,
) -> Result<ProductEncoding> {
    let report = validate_embedding(g, e);
    if !report.is_ok() {
        return Err(Error::InvalidEmbedding(format!("{report:?}")));
    }
    let n = g.n();
    if let Some(&v) = q.as_slice().last() {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
    }
    let host_q = VertexSet::new(q.iter().map(|u| e.map[u].0).collect(), e.host.n())?;
    let tw = tw_encode_full(&e.host, td, &host_q)?;
    let k = tw.meta.k;
    let compressed = compress_endpoints && e.path_len >= 4;
    let d = e.path_len as u64;

    let cell: HashMap<(usize, usize), usize> =
        e.map.iter().enumerate().map(|(u, &c)| (c, u)).collect();
    let coords: Vec<CoordField> = e
        .map
        .iter()
        .map(|&(_, i)| {
            if compressed {
                CoordField::compress(i as u64, d)
            } else {
                CoordField::Plain(i as u64)
            }
        })
        .collect();
    let max_kappa = e
        .map
        .iter()
        .map(|&(v, _)| tw.labels[v].len())
        .max()
        .unwrap_or(0);
    let max_coord = coords.iter().map(CoordField::bit_len).max().unwrap_or(0);
    let meta = ProductMeta {
        host: tw.meta,
        n,
        path_len: e.path_len,
        kappa_len_width: bits_for(max_kappa as u64),
        coord_len_width: bits_for(max_coord as u64),
        adj_width: 3 * (k + 1),
        compressed,
    };

    let mut labels = Vec::with_capacity(n);
    for u in 0..n {
        let (v, i) = e.map[u];
        let kappa = &tw.labels[v];
        let mut l = BitString::new();
        l.write_fixed(kappa.len() as u64, meta.kappa_len_width)?;
        l.write_fixed(coords[u].bit_len() as u64, meta.coord_len_width)?;
        l.append(kappa);
        coords[u].write(&mut l)?;
        let list = std::iter::once(v).chain(tw.gamma_order[v].iter().copied());
        let mut code = vec![false; meta.adj_width];
        for (p, host) in list.enumerate() {
            for t in 0..3 {
                let Some(j) = (i + t).checked_sub(1) else {
                    continue;
                };
                if let Some(&w) = cell.get(&(host, j)) {
                    code[3 * p + t] = w != u && g.has_edge(u, w);
                }
            }
        }
        for bit in code {
            l.push_bit(bit);
        }
        labels.push(l);
    }
    Ok(ProductEncoding { meta, labels })
}

pub(crate) struct ProductView<'a> {
    kappa: BitReader<'a>,
    coord: CoordField,
    adj: BitReader<'a>,
}

impl<'a> ProductView<'a> {
    pub fn parse(mut r: BitReader<'a>, meta: &ProductMeta) -> Result<Self, DecodeError> {
        let kappa_len = r.read_fixed(meta.kappa_len_width)? as usize;
        let coord_len = r.read_fixed(meta.coord_len_width)? as usize;
        let kappa = r.take(kappa_len)?;
        let coord = CoordField::read(r.take(coord_len)?, meta.compressed)?;
        let adj = r.take(meta.adj_width)?;
        if !r.is_at_end() {
            return Err(DecodeError::Malformed("trailing bits after product label"));
        }
        Ok(Self { kappa, coord, adj })
    }

    fn code_bit(&self, pos: usize) -> Result<bool, DecodeError> {
        let mut r = self.adj;
        r.take(pos)?;
        Ok(r.read_bit()?)
    }
}

pub(crate) fn product_adjacent_readers(
    a: BitReader<'_>,
    b: BitReader<'_>,
    meta: &ProductMeta,
) -> Result<bool, DecodeError> {
    let pa = ProductView::parse(a, meta)?;
    let pb = ProductView::parse(b, meta)?;
    let ka = TwView::parse(pa.kappa, &meta.host)?;
    let kb = TwView::parse(pb.kappa, &meta.host)?;
    // Slot in the recording label's list and the label whose code to read.
    let (p, own, other) = if ka.id == kb.id {
        (0, &pa, &pb)
    } else if let Some((j, _)) = ka.find(&kb.id) {
        (j + 1, &pa, &pb)
    } else if let Some((j, _)) = kb.find(&ka.id) {
        (j + 1, &pb, &pa)
    } else {
        return Ok(false);
    };
    let diff = coord_diff(other.coord, own.coord);
    if p == 0 && diff == CoordDiff::Zero {
        return Err(DecodeError::IdenticalLabels);
    }
    match diff.offset() {
        Some(t) => own.code_bit(3 * p + t),
        None => Ok(false),
    }
}

/// Adjacency of the two labelled vertices.
pub fn product_adjacent(
    a: &BitString,
    b: &BitString,
    meta: &ProductMeta,
) -> Result<bool, DecodeError> {
    if a == b {
        return Err(DecodeError::IdenticalLabels);
    }
    product_adjacent_readers(a.reader(), b.reader(), meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treewidth::decompose;

    fn encode(
        g: &Graph,
        host: Graph,
        d: usize,
        map: Vec<(usize, usize)>,
        compress: bool,
    ) -> ProductEncoding {
        let td = decompose(&host, None).unwrap();
        let e = ProductEmbedding::new(host, d, map).unwrap();
        product_encode(g, &e, &td, &VertexSet::empty(), compress).unwrap()
    }

    #[test]
    fn same_host_step_sets_plus_one_bit() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let enc = encode(&g, Graph::empty(1), 1, vec![(0, 0), (0, 1)], false);
        let l = &enc.labels[0];
        let code_start = l.len() - enc.meta.adj_width;
        assert_eq!(l.get(code_start + 2), Some(true));
        assert_eq!(l.get(code_start), Some(false));
        assert!(product_adjacent(&enc.labels[0], &enc.labels[1], &enc.meta).unwrap());
        assert!(product_adjacent(&enc.labels[1], &enc.labels[0], &enc.meta).unwrap());
    }

    #[test]
    fn product_adjacent_but_not_an_edge() {
        let g = Graph::empty(2);
        let host = Graph::from_edges(2, [(0, 1)]).unwrap();
        let enc = encode(&g, host, 3, vec![(0, 2), (1, 2)], true);
        assert!(!product_adjacent(&enc.labels[0], &enc.labels[1], &enc.meta).unwrap());
    }

    #[test]
    fn tag_rules() {
        let z = CoordField::compress(0, 10);
        let one = CoordField::compress(1, 10);
        assert_eq!(coord_diff(z, one), CoordDiff::Minus1);
        let m5 = CoordField::Tagged {
            tag: CoordTag::Middle,
            value: Some(5),
        };
        let m7 = CoordField::Tagged {
            tag: CoordTag::Middle,
            value: Some(7),
        };
        assert_eq!(coord_diff(m5, m7), CoordDiff::Far);
        assert_eq!(coord_diff(z, z), CoordDiff::Zero);
        let d = CoordField::compress(10, 10);
        assert_eq!(coord_diff(d, CoordField::compress(9, 10)), CoordDiff::Plus1);
        assert_eq!(coord_diff(d, z), CoordDiff::Far);
    }

    #[test]
    fn endpoints_cost_only_the_tag() {
        assert_eq!(CoordField::compress(0, 1000).bit_len(), COORD_TAG_WIDTH);
        assert_eq!(CoordField::compress(1000, 1000).bit_len(), COORD_TAG_WIDTH);
    }

    #[test]
    fn small_paths_disable_compression() {
        let g = Graph::empty(2);
        let enc = encode(&g, Graph::empty(1), 3, vec![(0, 0), (0, 3)], true);
        assert!(!enc.meta.compressed);
    }

    #[test]
    fn meta_words_round_trip() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let enc = encode(&g, Graph::empty(1), 5, vec![(0, 0), (0, 1), (0, 2)], true);
        assert_eq!(
            ProductMeta::from_words(&enc.meta.to_words()).unwrap(),
            enc.meta
        );
    }
}
