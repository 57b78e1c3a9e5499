//! On-disk index container.
//!
//! Little-endian throughout. Top-level sections (text, suffix array, the
//! structure payload) carry byte-length prefixes; vectors inside carry
//! element counts. The final 8 bytes are an FNV-1a checksum of everything
//! before them. Serialization is deterministic: the same index always
//! produces the same bytes.

use cooc::cluster::RecursiveIndexParts;
use cooc::heavy::FullIndexParts;
use cooc::plist::ListRaw;
use cooc::{FullIndex, Mode, RecursiveIndex};
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"SITC";
pub const FORMAT_VERSION: u32 = 1;

const KIND_FULL: u8 = 0;
const KIND_RECURSIVE: u8 = 1;

/// Header flag bits, one per query store.
pub const MODE_TOPK: u8 = 1 << 0;
pub const MODE_FAR: u8 = 1 << 1;
pub const MODE_GAP_ALPHA: u8 = 1 << 2;
pub const MODE_GAP_BETA: u8 = 1 << 3;
pub const MODE_NONOVERLAP: u8 = 1 << 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("file truncated or length field out of range")]
    Truncated,
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("checksum mismatch: stored {stored:#018x}, computed {computed:#018x}")]
    Checksum { stored: u64, computed: u64 },
    #[error("malformed index file: {0}")]
    Malformed(&'static str),
}

#[derive(Debug)]
pub enum LoadedIndex {
    Full(FullIndex),
    Recursive(RecursiveIndex),
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn bytes(&mut self, v: &[u8]) {
        self.0.extend_from_slice(v);
    }
    fn u32s(&mut self, vs: &[u32]) {
        self.u64(vs.len() as u64);
        for &v in vs {
            self.u32(v);
        }
    }
    fn u64s(&mut self, vs: &[u64]) {
        self.u64(vs.len() as u64);
        for &v in vs {
            self.u64(v);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], FormatError> {
        let end = self.at.checked_add(len).ok_or(FormatError::Truncated)?;
        if end > self.buf.len() {
            return Err(FormatError::Truncated);
        }
        let out = &self.buf[self.at..end];
        self.at = end;
        Ok(out)
    }
    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }
    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn count(&mut self, width: usize) -> Result<usize, FormatError> {
        let c = self.u64()?;
        let c = usize::try_from(c).map_err(|_| FormatError::Truncated)?;
        // Reject counts the remaining bytes cannot possibly hold.
        if c.checked_mul(width).map_or(true, |b| b > self.buf.len() - self.at) {
            return Err(FormatError::Truncated);
        }
        Ok(c)
    }
    fn u32s(&mut self) -> Result<Vec<u32>, FormatError> {
        let c = self.count(4)?;
        (0..c).map(|_| self.u32()).collect()
    }
    fn u64s(&mut self) -> Result<Vec<u64>, FormatError> {
        let c = self.count(8)?;
        (0..c).map(|_| self.u64()).collect()
    }
    fn done(&self) -> Result<(), FormatError> {
        if self.at == self.buf.len() {
            Ok(())
        } else {
            Err(FormatError::Malformed("trailing bytes after payload"))
        }
    }
}

fn write_list(w: &mut Writer, list: &ListRaw) {
    w.u8(list.descending as u8);
    w.u32(list.max_version);
    w.u32(list.segment_count);
    w.u32s(&list.heads);
    w.u64s(&list.xs);
    w.u64s(&list.payloads);
    w.u32s(&list.bases);
    w.u32s(&list.mods);
}

fn read_list(r: &mut Reader) -> Result<ListRaw, FormatError> {
    Ok(ListRaw {
        descending: match r.u8()? {
            0 => false,
            1 => true,
            _ => return Err(FormatError::Malformed("list direction flag")),
        },
        max_version: r.u32()?,
        segment_count: r.u32()?,
        heads: r.u32s()?,
        xs: r.u64s()?,
        payloads: r.u64s()?,
        bases: r.u32s()?,
        mods: r.u32s()?,
    })
}

fn mode_tag(mode: Mode) -> (u8, u64) {
    match mode {
        Mode::Closest => (0, 0),
        Mode::Farthest => (1, 0),
        Mode::ClosestMinGap(a) => (2, a),
        Mode::FarthestMaxGap(b) => (3, b),
    }
}

fn mode_from_tag(tag: u8, param: u64) -> Result<Mode, FormatError> {
    Ok(match tag {
        0 => Mode::Closest,
        1 => Mode::Farthest,
        2 => Mode::ClosestMinGap(param),
        3 => Mode::FarthestMaxGap(param),
        _ => return Err(FormatError::Malformed("unknown store tag")),
    })
}

/// Header flag summary of a mode set; `n` distinguishes the non-overlap
/// store from a distance band that happens to end at `n`.
fn flags_of(modes: &[Mode], n: u64) -> (u8, u64, u64) {
    let (mut flags, mut alpha, mut beta) = (0u8, 0u64, 0u64);
    for &m in modes {
        match m {
            Mode::Closest => flags |= MODE_TOPK,
            Mode::Farthest => flags |= MODE_FAR,
            Mode::ClosestMinGap(a) => {
                flags |= MODE_GAP_ALPHA;
                alpha = a;
            }
            Mode::FarthestMaxGap(b) if b == n => flags |= MODE_NONOVERLAP,
            Mode::FarthestMaxGap(b) => {
                flags |= MODE_GAP_BETA;
                beta = b;
            }
        }
    }
    (flags, alpha, beta)
}

fn header(w: &mut Writer, kind: u8, modes: &[Mode], eps: (u32, u32), n: u64) {
    let (flags, alpha, beta) = flags_of(modes, n);
    w.bytes(MAGIC);
    w.u32(FORMAT_VERSION);
    w.u8(kind);
    w.u8(flags);
    w.u64(alpha);
    w.u64(beta);
    w.u32(eps.0);
    w.u32(eps.1);
}

fn text_and_sa(w: &mut Writer, text: &[u8], sa: &[u32]) {
    w.u64(text.len() as u64);
    w.bytes(text);
    w.u32s(sa);
}

pub fn serialize_full(index: &FullIndex) -> Vec<u8> {
    let parts = index.to_parts();
    let modes: Vec<Mode> = if parts.farthest.is_some() {
        vec![Mode::Closest, Mode::Farthest]
    } else {
        vec![Mode::Closest]
    };
    let mut w = Writer(Vec::new());
    header(&mut w, KIND_FULL, &modes, (0, 0), parts.text.len() as u64);
    text_and_sa(&mut w, &parts.text, &parts.sa);

    let mut body = Writer(Vec::new());
    body.u8(parts.farthest.is_some() as u8);
    body.u32(parts.closest.len() as u32);
    for list in &parts.closest {
        write_list(&mut body, list);
    }
    if let Some(far) = &parts.farthest {
        for list in far {
            write_list(&mut body, list);
        }
    }
    w.u64(body.0.len() as u64);
    w.bytes(&body.0);

    let sum = fnv1a(&w.0);
    w.u64(sum);
    w.0
}

pub fn serialize_recursive(index: &RecursiveIndex) -> Vec<u8> {
    let parts = index.to_parts();
    let mut w = Writer(Vec::new());
    header(&mut w, KIND_RECURSIVE, &parts.modes, parts.epsilon, parts.text.len() as u64);
    text_and_sa(&mut w, &parts.text, &parts.sa);

    let mut body = Writer(Vec::new());
    body.u8(parts.modes.len() as u8);
    for &m in &parts.modes {
        let (tag, param) = mode_tag(m);
        body.u8(tag);
        body.u64(param);
    }
    body.u32(parts.lists.len() as u32);
    for list in &parts.lists {
        write_list(&mut body, list);
    }
    for (width, len, blocks) in &parts.offsets {
        body.u32(*width);
        body.u64(*len);
        body.u64s(blocks);
    }
    w.u64(body.0.len() as u64);
    w.bytes(&body.0);

    let sum = fnv1a(&w.0);
    w.u64(sum);
    w.0
}

pub fn deserialize(bytes: &[u8]) -> Result<LoadedIndex, FormatError> {
    if bytes.len() < 8 {
        return Err(FormatError::Truncated);
    }
    let (payload, trailer) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(trailer.try_into().unwrap());
    let computed = fnv1a(payload);
    if stored != computed {
        return Err(FormatError::Checksum { stored, computed });
    }

    let mut r = Reader { buf: payload, at: 0 };
    if r.take(4)? != MAGIC {
        return Err(FormatError::BadMagic);
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let kind = r.u8()?;
    let flags = r.u8()?;
    let alpha = r.u64()?;
    let beta = r.u64()?;
    let eps = (r.u32()?, r.u32()?);

    let text_len = r.count(1)?;
    let text = r.take(text_len)?.to_vec();
    let sa = r.u32s()?;
    let body_len = r.count(1)?;
    let mut body = Reader { buf: r.take(body_len)?, at: 0 };
    r.done()?;
    let n = text.len() as u64;

    match kind {
        KIND_FULL => {
            let has_far = match body.u8()? {
                0 => false,
                1 => true,
                _ => return Err(FormatError::Malformed("farthest flag")),
            };
            let count = body.u32()? as usize;
            let mut lists = Vec::with_capacity(2 * count);
            for _ in 0..count * (1 + has_far as usize) {
                lists.push(read_list(&mut body)?);
            }
            body.done()?;
            let farthest = has_far.then(|| lists.split_off(count));
            let modes: Vec<Mode> = if has_far {
                vec![Mode::Closest, Mode::Farthest]
            } else {
                vec![Mode::Closest]
            };
            if (flags, 0, 0) != flags_of(&modes, n) || eps != (0, 0) || (alpha, beta) != (0, 0)
            {
                return Err(FormatError::Malformed("header flags disagree with payload"));
            }
            let index = FullIndex::from_parts(FullIndexParts {
                text,
                sa,
                closest: lists,
                farthest,
            })
            .ok_or(FormatError::Malformed("structures inconsistent with text"))?;
            Ok(LoadedIndex::Full(index))
        }
        KIND_RECURSIVE => {
            let mode_count = body.u8()? as usize;
            let mut modes = Vec::with_capacity(mode_count);
            for _ in 0..mode_count {
                let tag = body.u8()?;
                let param = body.u64()?;
                modes.push(mode_from_tag(tag, param)?);
            }
            let count = body.u32()? as usize;
            let mut lists = Vec::with_capacity(count);
            for _ in 0..count {
                lists.push(read_list(&mut body)?);
            }
            let mut offsets = Vec::with_capacity(count);
            for _ in 0..count {
                let width = body.u32()?;
                let len = body.u64()?;
                offsets.push((width, len, body.u64s()?));
            }
            body.done()?;
            if (flags, alpha, beta) != flags_of(&modes, n) {
                return Err(FormatError::Malformed("header flags disagree with payload"));
            }
            let index = RecursiveIndex::from_parts(RecursiveIndexParts {
                text,
                sa,
                epsilon: eps,
                modes,
                lists,
                offsets,
            })
            .ok_or(FormatError::Malformed("structures inconsistent with text"))?;
            Ok(LoadedIndex::Recursive(index))
        }
        _ => Err(FormatError::Malformed("unknown structure kind")),
    }
}
