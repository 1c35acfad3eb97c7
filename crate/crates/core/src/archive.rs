//! Binary container for the labels of one encoding.
//!
//! ```text
//! "FLBL" | version: u16 | kind: u8 | flags: u8 | n: u32 | w: u32 | d: u32
//! | meta_len: u32 | meta_len × u32
//! | n × (bit_len: u32 | ceil(bit_len / 8) payload bytes)
//! ```
//!
//! Integers are little-endian. Payload bits are packed most significant bit
//! first and the padding of the last byte must be zero, so a parsed archive
//! re-serializes to identical bytes.

use std::path::Path;

use crate::codec::BitString;
use crate::error::{DecodeError, Error, Result};
use crate::flat::{flat_adjacent, FlatMeta};
use crate::product_label::{product_adjacent, ProductMeta};
use crate::tw_label::{tw_adjacent, TwMeta};

pub const MAGIC: &[u8; 4] = b"FLBL";
pub const VERSION: u16 = 1;

/// Archive flag: a flat archive whose labels are plain product labels
/// because the graph is too small for the block construction.
pub const FLAG_FALLBACK: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum SchemeKind {
    Tw = 1,
    Product = 2,
    Flat = 3,
}

impl SchemeKind {
    pub fn from_byte(b: u8) -> Result<Self> {
        match b {
            1 => Ok(Self::Tw),
            2 => Ok(Self::Product),
            3 => Ok(Self::Flat),
            other => Err(Error::Archive(format!("unknown scheme kind {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Tw => "tw",
            Self::Product => "product",
            Self::Flat => "flat",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelArchive {
    pub kind: SchemeKind,
    pub flags: u8,
    pub n: usize,
    /// Width of the decomposition the encoding was built from.
    pub w: usize,
    /// Block width for flat archives, path length for product archives.
    pub d: usize,
    pub meta: Vec<u32>,
    pub labels: Vec<BitString>,
}

/// Decoding procedure fixed by an archive header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decoder {
    Tw(TwMeta),
    Product(ProductMeta),
    Flat(FlatMeta),
}

impl Decoder {
    pub fn adjacent(&self, a: &BitString, b: &BitString) -> Result<bool, DecodeError> {
        match self {
            Self::Tw(m) => tw_adjacent(a, b, m),
            Self::Product(m) => product_adjacent(a, b, m),
            Self::Flat(m) => flat_adjacent(a, b, m),
        }
    }
}

fn to_u32(x: usize, what: &str) -> Result<u32> {
    u32::try_from(x).map_err(|_| Error::Archive(format!("{what} {x} does not fit in 32 bits")))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < len {
            return Err(Error::Archive(format!("truncated at byte {}", self.pos)));
        }
        let s = &self.bytes[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

impl LabelArchive {
    pub fn from_tw(meta: &TwMeta, labels: Vec<BitString>) -> Self {
        Self {
            kind: SchemeKind::Tw,
            flags: 0,
            n: labels.len(),
            w: meta.k,
            d: 0,
            meta: meta.to_words(),
            labels,
        }
    }

    pub fn from_product(meta: &ProductMeta, labels: Vec<BitString>) -> Self {
        Self {
            kind: SchemeKind::Product,
            flags: 0,
            n: labels.len(),
            w: meta.host.k,
            d: meta.path_len,
            meta: meta.to_words(),
            labels,
        }
    }

    /// Decodes adjacency of vertices `u` and `v` from their labels.
    pub fn adjacent(&self, decoder: &Decoder, u: usize, v: usize) -> Result<bool> {
        for x in [u, v] {
            if x >= self.n {
                return Err(Error::VertexOutOfRange {
                    vertex: x,
                    n: self.n,
                });
            }
        }
        Ok(decoder.adjacent(&self.labels[u], &self.labels[v])?)
    }

    pub fn decoder(&self) -> Result<Decoder> {
        Ok(match self.kind {
            SchemeKind::Tw => Decoder::Tw(TwMeta::from_words(&self.meta)?),
            SchemeKind::Product => Decoder::Product(ProductMeta::from_words(&self.meta)?),
            SchemeKind::Flat => Decoder::Flat(FlatMeta::from_words(
                &self.meta,
                self.flags & FLAG_FALLBACK != 0,
            )?),
        })
    }

    pub fn max_label_bits(&self) -> usize {
        self.labels.iter().map(BitString::len).max().unwrap_or(0)
    }

    pub fn mean_label_bits(&self) -> f64 {
        if self.labels.is_empty() {
            return 0.0;
        }
        self.labels.iter().map(BitString::len).sum::<usize>() as f64 / self.labels.len() as f64
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        if self.labels.len() != self.n {
            return Err(Error::Archive(format!(
                "{} labels for {} vertices",
                self.labels.len(),
                self.n
            )));
        }
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(self.kind as u8);
        out.push(self.flags);
        for (x, what) in [
            (self.n, "n"),
            (self.w, "w"),
            (self.d, "d"),
            (self.meta.len(), "meta length"),
        ] {
            out.extend_from_slice(&to_u32(x, what)?.to_le_bytes());
        }
        for &m in &self.meta {
            out.extend_from_slice(&m.to_le_bytes());
        }
        for l in &self.labels {
            out.extend_from_slice(&to_u32(l.len(), "label length")?.to_le_bytes());
            out.extend_from_slice(&l.to_bytes());
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut c = Cursor { bytes, pos: 0 };
        if c.take(4)? != MAGIC {
            return Err(Error::Archive("bad magic".into()));
        }
        let version = c.u16()?;
        if version != VERSION {
            return Err(Error::Archive(format!("unsupported version {version}")));
        }
        let kind = SchemeKind::from_byte(c.u8()?)?;
        let flags = c.u8()?;
        if flags & !FLAG_FALLBACK != 0 || (flags != 0 && kind != SchemeKind::Flat) {
            return Err(Error::Archive(format!("unknown flags {flags:#04x}")));
        }
        let n = c.u32()? as usize;
        let w = c.u32()? as usize;
        let d = c.u32()? as usize;
        let meta_len = c.u32()? as usize;
        if meta_len > 1024 {
            return Err(Error::Archive(format!("meta table of {meta_len} words")));
        }
        let meta = (0..meta_len).map(|_| c.u32()).collect::<Result<Vec<_>>>()?;
        let mut labels = Vec::with_capacity(n.min(bytes.len()));
        for _ in 0..n {
            let bits = c.u32()? as usize;
            let payload = c.take(bits.div_ceil(8))?;
            labels.push(BitString::from_bytes(payload, bits)?);
        }
        if c.pos != bytes.len() {
            return Err(Error::Archive(format!(
                "{} trailing bytes",
                bytes.len() - c.pos
            )));
        }
        Ok(Self {
            kind,
            flags,
            n,
            w,
            d,
            meta,
            labels,
        })
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}
