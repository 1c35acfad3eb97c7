//! Bit-exact, self-delimiting encoding primitives.
//!
//! Bits are stored most-significant-first inside 64-bit words and every
//! fixed-width field is written big-endian, so comparing two fields of the
//! same width lexicographically is the same as comparing them numerically.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("value {value} does not fit in {width} bits")]
    Overflow { value: u64, width: usize },
    #[error("field width {0} exceeds 64 bits")]
    WidthTooLarge(usize),
    #[error("payload of {len} bits does not fit a {prefix_width}-bit length prefix")]
    PayloadTooLong { len: usize, prefix_width: usize },
    #[error("read of {requested} bits with only {remaining} bits left")]
    Underflow { requested: usize, remaining: usize },
    #[error("serialized bit string has {0} non-zero padding bits")]
    DirtyPadding(u32),
    #[error("byte length {bytes} does not match bit length {bits}")]
    ByteLength { bytes: usize, bits: usize },
    #[error("invalid bit character {0:?}")]
    BadChar(char),
}

/// Number of bits needed to write any value in `0..=max`.
#[inline]
pub fn bits_for(max: u64) -> usize {
    (64 - max.leading_zeros()) as usize
}

/// Growable bit sequence. Bits past `len` are always zero.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| (self.words[i / 64] >> (63 - i % 64)) & 1 == 1)
    }

    pub fn push_bit(&mut self, bit: bool) {
        self.push_unchecked(bit as u64, 1);
    }

    /// Appends `value` as a big-endian field of exactly `width` bits.
    pub fn write_fixed(&mut self, value: u64, width: usize) -> Result<(), CodecError> {
        if width > 64 {
            return Err(CodecError::WidthTooLarge(width));
        }
        if width < 64 && value >> width != 0 {
            return Err(CodecError::Overflow { value, width });
        }
        self.push_unchecked(value, width);
        Ok(())
    }

    /// Appends `payload.len()` in `prefix_width` bits followed by the payload.
    pub fn write_length_prefixed(
        &mut self,
        payload: &BitString,
        prefix_width: usize,
    ) -> Result<(), CodecError> {
        let len = payload.len;
        if prefix_width > 64 || (prefix_width < 64 && (len as u64) >> prefix_width != 0) {
            return Err(CodecError::PayloadTooLong { len, prefix_width });
        }
        self.push_unchecked(len as u64, prefix_width);
        self.append(payload);
        Ok(())
    }

    pub fn append(&mut self, other: &BitString) {
        let mut pos = 0;
        while pos < other.len {
            let width = (other.len - pos).min(64);
            self.push_unchecked(other.read_raw(pos, width), width);
            pos += width;
        }
    }

    /// Toggles bit `i`. Used to build corrupted inputs in tests and tooling.
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range");
        self.words[i / 64] ^= 1 << (63 - i % 64);
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader::new(self)
    }

    /// Packs the bits into bytes, zero-padding only the final byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let nbytes = self.len.div_ceil(8);
        let mut out = Vec::with_capacity(nbytes);
        for w in &self.words {
            out.extend_from_slice(&w.to_be_bytes());
        }
        out.truncate(nbytes);
        out
    }

    pub fn from_bytes(bytes: &[u8], bit_len: usize) -> Result<Self, CodecError> {
        if bytes.len() != bit_len.div_ceil(8) {
            return Err(CodecError::ByteLength {
                bytes: bytes.len(),
                bits: bit_len,
            });
        }
        if bit_len % 8 != 0 {
            let spare = 8 - bit_len % 8;
            let pad = bytes[bytes.len() - 1] & ((1u8 << spare) - 1);
            if pad != 0 {
                return Err(CodecError::DirtyPadding(pad.count_ones()));
            }
        }
        let mut words = Vec::with_capacity(bytes.len().div_ceil(8));
        for chunk in bytes.chunks(8) {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            words.push(u64::from_be_bytes(buf));
        }
        Ok(Self {
            words,
            len: bit_len,
        })
    }

    #[inline]
    fn push_unchecked(&mut self, value: u64, width: usize) {
        if width == 0 {
            return;
        }
        let off = self.len % 64;
        if off == 0 {
            self.words.push(0);
        }
        let aligned = value << (64 - width);
        let w = self.len / 64;
        self.words[w] |= aligned >> off;
        if off + width > 64 {
            self.words.push(aligned << (64 - off));
        }
        self.len += width;
    }

    /// Reads `width <= 64` bits at `pos`; the caller guarantees bounds.
    #[inline]
    pub(crate) fn read_raw(&self, pos: usize, width: usize) -> u64 {
        if width == 0 {
            return 0;
        }
        let w = pos / 64;
        let off = pos % 64;
        let mut v = self.words[w] << off;
        if off + width > 64 {
            v |= self.words[w + 1] >> (64 - off);
        }
        v >> (64 - width)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) == Some(true) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({}:\"{}\")", self.len, self)
    }
}

impl FromStr for BitString {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = BitString::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => out.push_bit(false),
                '1' => out.push_bit(true),
                other => return Err(CodecError::BadChar(other)),
            }
        }
        Ok(out)
    }
}

/// Cursor over a window of a [`BitString`].
#[derive(Clone, Copy, Debug)]
pub struct BitReader<'a> {
    bits: &'a BitString,
    pos: usize,
    end: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a BitString) -> Self {
        Self {
            bits,
            pos: 0,
            end: bits.len,
        }
    }

    #[inline]
    pub fn position(&self) -> usize {
        self.pos
    }

    #[inline]
    pub fn remaining(&self) -> usize {
        self.end - self.pos
    }

    #[inline]
    pub fn is_at_end(&self) -> bool {
        self.pos == self.end
    }

    #[inline]
    pub fn read_fixed(&mut self, width: usize) -> Result<u64, CodecError> {
        if width > 64 {
            return Err(CodecError::WidthTooLarge(width));
        }
        if width > self.remaining() {
            return Err(CodecError::Underflow {
                requested: width,
                remaining: self.remaining(),
            });
        }
        let v = self.bits.read_raw(self.pos, width);
        self.pos += width;
        Ok(v)
    }

    #[inline]
    pub fn read_bit(&mut self) -> Result<bool, CodecError> {
        Ok(self.read_fixed(1)? == 1)
    }

    /// Splits off the next `len` bits as their own reader.
    #[inline]
    pub fn take(&mut self, len: usize) -> Result<BitReader<'a>, CodecError> {
        if len > self.remaining() {
            return Err(CodecError::Underflow {
                requested: len,
                remaining: self.remaining(),
            });
        }
        let sub = BitReader {
            bits: self.bits,
            pos: self.pos,
            end: self.pos + len,
        };
        self.pos += len;
        Ok(sub)
    }

    /// Reads a length prefix and returns a reader over the payload.
    #[inline]
    pub fn read_length_prefixed_view(
        &mut self,
        prefix_width: usize,
    ) -> Result<BitReader<'a>, CodecError> {
        let len = self.read_fixed(prefix_width)? as usize;
        self.take(len)
    }

    pub fn read_length_prefixed(&mut self, prefix_width: usize) -> Result<BitString, CodecError> {
        Ok(self
            .read_length_prefixed_view(prefix_width)?
            .to_bit_string())
    }

    /// Copies the unread part of the window.
    pub fn to_bit_string(&self) -> BitString {
        let mut out = BitString::with_capacity(self.remaining());
        let mut pos = self.pos;
        while pos < self.end {
            let width = (self.end - pos).min(64);
            out.push_unchecked(self.bits.read_raw(pos, width), width);
            pos += width;
        }
        out
    }
}
