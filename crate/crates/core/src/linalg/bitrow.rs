use std::fmt;

/// Fixed-length bit vector packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitRow {
    len: usize,
    words: Vec<u64>,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn unit(len: usize, k: usize) -> Self {
        let mut r = Self::zeros(len);
        r.set(k, true);
        r
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut r = Self::zeros(bits.len());
        for (k, &b) in bits.iter().enumerate() {
            if b {
                r.set(k, true);
            }
        }
        r
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut r = Self::zeros(len);
        for k in idx {
            r.flip(k);
        }
        r
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, k: usize) -> bool {
        debug_assert!(k < self.len);
        (self.words[k >> 6] >> (k & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, k: usize, v: bool) {
        debug_assert!(k < self.len);
        let m = 1u64 << (k & 63);
        if v {
            self.words[k >> 6] |= m;
        } else {
            self.words[k >> 6] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, k: usize) {
        debug_assert!(k < self.len);
        self.words[k >> 6] ^= 1u64 << (k & 63);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitRow) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    /// XOR restricted to words from `from_bit` on; lower bits of `other`
    /// must already be zero for this to equal a full XOR.
    #[inline]
    pub(crate) fn xor_from(&mut self, other: &BitRow, from_bit: usize) {
        let w0 = from_bit >> 6;
        for (a, b) in self.words[w0..].iter_mut().zip(&other.words[w0..]) {
            *a ^= *b;
        }
    }

    pub fn and_parity(&self, other: &BitRow) -> bool {
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.first_one_from(0)
    }

    pub fn first_one_from(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut w = from >> 6;
        let mut cur = self.words[w] & (!0u64 << (from & 63));
        loop {
            if cur != 0 {
                return Some((w << 6) + cur.trailing_zeros() as usize);
            }
            w += 1;
            if w == self.words.len() {
                return None;
            }
            cur = self.words[w];
        }
    }

    pub fn ones(&self) -> Ones<'_> {
        Ones { row: self, word: 0, cur: self.words.first().copied().unwrap_or(0) }
    }
}

pub struct Ones<'a> {
    row: &'a BitRow,
    word: usize,
    cur: u64,
}

impl Iterator for Ones<'_> {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let t = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some((self.word << 6) + t);
            }
            self.word += 1;
            if self.word >= self.row.words.len() {
                return None;
            }
            self.cur = self.row.words[self.word];
        }
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|k| if self.get(k) { '1' } else { '0' }).collect();
        write!(f, "[{s}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ones_across_words() {
        let r = BitRow::from_indices(200, [0, 63, 64, 130, 199]);
        assert_eq!(r.ones().collect::<Vec<_>>(), vec![0, 63, 64, 130, 199]);
        assert_eq!(r.first_one_from(1), Some(63));
        assert_eq!(r.first_one_from(131), Some(199));
        assert_eq!(r.count_ones(), 5);
    }

    #[test]
    fn xor_and_parity() {
        let mut a = BitRow::from_indices(70, [1, 65]);
        let b = BitRow::from_indices(70, [1, 2]);
        assert!(a.and_parity(&b));
        a.xor_assign(&b);
        assert_eq!(a.ones().collect::<Vec<_>>(), vec![2, 65]);
        assert!(BitRow::zeros(0).is_zero());
    }
}
