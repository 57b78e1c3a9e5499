//! Fixed-width packed integer storage.

/// A vector of unsigned integers stored at an exact bit width. Width 0 is
/// legal and stores nothing; every entry reads back as 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PackedIntVec {
    width: u32,
    len: usize,
    blocks: Vec<u64>,
}

impl PackedIntVec {
    pub fn new(width: u32) -> Self {
        assert!(width <= 64, "entry width {width} exceeds 64 bits");
        PackedIntVec { width, len: 0, blocks: Vec::new() }
    }

    /// Smallest width able to hold values in `0..universe`.
    pub fn width_for(universe: usize) -> u32 {
        if universe <= 1 {
            0
        } else {
            usize::BITS - (universe - 1).leading_zeros()
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Total bits of payload held, excluding container overhead.
    pub fn bit_len(&self) -> u64 {
        self.len as u64 * self.width as u64
    }

    pub fn push(&mut self, value: u64) {
        if self.width == 0 {
            assert_eq!(value, 0, "nonzero value in width-0 vector");
            self.len += 1;
            return;
        }
        assert!(
            self.width == 64 || value < (1u64 << self.width),
            "value {value} exceeds {} bits",
            self.width
        );
        let bit = self.len * self.width as usize;
        let (block, off) = (bit / 64, (bit % 64) as u32);
        if block >= self.blocks.len() {
            self.blocks.push(0);
        }
        self.blocks[block] |= value << off;
        let spill = off as u64 + self.width as u64;
        if spill > 64 {
            self.blocks.push(value >> (64 - off));
        }
        self.len += 1;
    }

    pub fn get(&self, idx: usize) -> u64 {
        assert!(idx < self.len, "index {idx} out of bounds ({})", self.len);
        if self.width == 0 {
            return 0;
        }
        let bit = idx * self.width as usize;
        let (block, off) = (bit / 64, (bit % 64) as u32);
        let mut value = self.blocks[block] >> off;
        let spill = off as u64 + self.width as u64;
        if spill > 64 {
            value |= self.blocks[block + 1] << (64 - off);
        }
        if self.width < 64 {
            value &= (1u64 << self.width) - 1;
        }
        value
    }

    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    /// Rebuild from serialized parts. `blocks` must be exactly the storage
    /// `len` entries of `width` bits occupy.
    pub fn from_raw(width: u32, len: usize, blocks: Vec<u64>) -> Option<Self> {
        if width > 64 {
            return None;
        }
        let needed = if width == 0 { 0 } else { (len * width as usize).div_ceil(64) };
        if blocks.len() != needed {
            return None;
        }
        Some(PackedIntVec { width, len, blocks })
    }
}
