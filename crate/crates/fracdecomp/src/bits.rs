//! Fixed-width bitsets over u64 words, used for adjacency rows and vertex
//! sets in the clique machinery.

/// A bitset over a fixed universe `0..len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitRow {
    len: usize,
    words: Vec<u64>,
}

impl BitRow {
    /// All-zero set over `0..len`.
    #[must_use]
    pub fn zeros(len: usize) -> Self {
        BitRow {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    /// All-one set over `0..len`.
    #[must_use]
    pub fn ones(len: usize) -> Self {
        let mut row = BitRow::zeros(len);
        for (i, w) in row.words.iter_mut().enumerate() {
            let lo = i * 64;
            *w = if lo + 64 <= len {
                u64::MAX
            } else {
                mask_below(len - lo)
            };
        }
        row
    }

    /// Universe size.
    #[inline]
    #[must_use]
    pub fn len(&self) -> usize {
        self.len
    }

    /// True iff no bit is set.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn unset(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    #[must_use]
    pub fn test(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Number of set bits.
    #[must_use]
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Intersection into a new set.
    #[must_use]
    pub fn and(&self, other: &BitRow) -> BitRow {
        debug_assert_eq!(self.len, other.len);
        BitRow {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// In-place intersection.
    pub fn and_assign(&mut self, other: &BitRow) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// |self ∩ other| without allocating.
    #[must_use]
    pub fn and_count(&self, other: &BitRow) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// In-place union.
    pub fn or_assign(&mut self, other: &BitRow) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// |self ∪ other| without allocating.
    #[must_use]
    pub fn or_count(&self, other: &BitRow) -> usize {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    /// Complement within the universe.
    #[must_use]
    pub fn not(&self) -> BitRow {
        let mut row = BitRow {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        let tail = self.len % 64;
        if tail != 0 {
            let last = row.words.len() - 1;
            row.words[last] &= mask_below(tail);
        }
        row
    }

    /// Drops every bit below `i` (keeps `i` itself).
    pub fn clear_below(&mut self, i: usize) {
        let word = i / 64;
        for w in self.words.iter_mut().take(word) {
            *w = 0;
        }
        if word < self.words.len() {
            self.words[word] &= !mask_below(i % 64);
        }
    }

    /// Iterates set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Collects set bits as vertex ids.
    #[must_use]
    pub fn to_vec(&self) -> Vec<u32> {
        self.iter_ones().map(|i| i as u32).collect()
    }

    /// Builds a set from vertex ids.
    #[must_use]
    pub fn from_slice(len: usize, items: &[u32]) -> Self {
        let mut row = BitRow::zeros(len);
        for &i in items {
            row.set(i as usize);
        }
        row
    }
}

#[inline]
fn mask_below(bits: usize) -> u64 {
    debug_assert!(bits < 64);
    (1u64 << bits) - 1
}
