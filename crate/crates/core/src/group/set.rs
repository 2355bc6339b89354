use std::cmp::Ordering;
use std::fmt;

use smallvec::{smallvec, SmallVec};

use super::{Element, GroupCtx};
use crate::error::{ensure_same_rank, Error, Result};

type Words = SmallVec<[u64; 1]>;

/// Masks selecting bit positions whose index has bit `j` clear.
const SHUFFLE_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Applies the bit permutation `i -> i ^ t` (for `t < 64`) to a word.
#[inline]
pub fn shuffle_word(mut x: u64, t: u32) -> u64 {
    for (j, &m) in SHUFFLE_MASKS.iter().enumerate() {
        if t >> j & 1 == 1 {
            let s = 1u32 << j;
            x = ((x & m) << s) | ((x >> s) & m);
        }
    }
    x
}

/// A subset of `F_2^n` held as a dense bitset of `2^n` bits.
#[derive(Clone)]
pub struct SetF2 {
    ctx: GroupCtx,
    words: Words,
    len: usize,
}

fn word_count(ctx: GroupCtx) -> usize {
    (ctx.order() / 64).max(1)
}

/// Valid bits in the (single) word of a rank < 6 universe.
fn universe_tail(ctx: GroupCtx) -> u64 {
    if ctx.rank() >= 6 {
        u64::MAX
    } else {
        (1u64 << ctx.order()) - 1
    }
}

impl SetF2 {
    pub fn empty(ctx: GroupCtx) -> Self {
        Self {
            ctx,
            words: smallvec![0; word_count(ctx)],
            len: 0,
        }
    }

    pub fn full(ctx: GroupCtx) -> Self {
        let mut words: Words = smallvec![u64::MAX; word_count(ctx)];
        words[0] &= universe_tail(ctx);
        Self {
            ctx,
            words,
            len: ctx.order(),
        }
    }

    pub fn singleton(ctx: GroupCtx, e: Element) -> Result<Self> {
        Self::from_elements(ctx, [e])
    }

    pub fn from_elements<I, E>(ctx: GroupCtx, elems: I) -> Result<Self>
    where
        I: IntoIterator<Item = E>,
        E: Into<Element>,
    {
        let mut set = Self::empty(ctx);
        for e in elems {
            let e = e.into();
            if !ctx.contains(e) {
                return Err(Error::ElementOutOfRange {
                    element: e.0 as u64,
                    rank: ctx.rank(),
                });
            }
            set.insert_unchecked(e);
        }
        Ok(set)
    }

    /// Builds a set of rank at most 6 from its bitset word.
    pub fn from_mask(ctx: GroupCtx, mask: u64) -> Result<Self> {
        if ctx.rank() > 6 {
            return Err(Error::Parameter(format!(
                "single-word masks need rank <= 6, got {}",
                ctx.rank()
            )));
        }
        if mask & !universe_tail(ctx) != 0 {
            return Err(Error::Parameter(format!(
                "mask {mask:#x} has bits outside F_2^{}",
                ctx.rank()
            )));
        }
        Ok(Self {
            ctx,
            words: smallvec![mask],
            len: mask.count_ones() as usize,
        })
    }

    /// Builds a set from little-endian bitset words. Stray bits are an error.
    pub fn from_words(ctx: GroupCtx, words: &[u64]) -> Result<Self> {
        let expected = word_count(ctx);
        if words.len() > expected && words[expected..].iter().any(|&w| w != 0) {
            return Err(Error::Parameter("bitset has bits outside the group".into()));
        }
        let mut out: Words = smallvec![0; expected];
        for (dst, &src) in out.iter_mut().zip(words) {
            *dst = src;
        }
        if out[0] & !universe_tail(ctx) != 0 {
            return Err(Error::Parameter("bitset has bits outside the group".into()));
        }
        Ok(Self::from_raw(ctx, out))
    }

    fn from_raw(ctx: GroupCtx, words: Words) -> Self {
        let len = words.iter().map(|w| w.count_ones() as usize).sum();
        Self { ctx, words, len }
    }

    /// The bitset as one word, when the rank is at most 6.
    pub fn to_mask(&self) -> Option<u64> {
        (self.ctx.rank() <= 6).then(|| self.words[0])
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn ctx(&self) -> GroupCtx {
        self.ctx
    }

    pub fn rank(&self) -> u32 {
        self.ctx.rank()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len == self.ctx.order()
    }

    pub fn contains(&self, e: Element) -> bool {
        self.ctx.contains(e) && self.words[(e.0 >> 6) as usize] >> (e.0 & 63) & 1 == 1
    }

    pub(crate) fn insert_unchecked(&mut self, e: Element) {
        let w = &mut self.words[(e.0 >> 6) as usize];
        let bit = 1u64 << (e.0 & 63);
        if *w & bit == 0 {
            *w |= bit;
            self.len += 1;
        }
    }

    /// Smallest element, if any.
    pub fn min(&self) -> Option<Element> {
        self.words
            .iter()
            .position(|&w| w != 0)
            .map(|i| Element((i as u32) << 6 | self.words[i].trailing_zeros()))
    }

    /// Elements in increasing order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words[0],
        }
    }

    /// `A + g`.
    pub fn translate(&self, g: Element) -> SetF2 {
        let mut out: Words = smallvec![0; self.words.len()];
        let (low, high) = (g.0 & 63, (g.0 >> 6) as usize);
        for (i, &w) in self.words.iter().enumerate() {
            out[i ^ high] = shuffle_word(w, low);
        }
        Self {
            ctx: self.ctx,
            words: out,
            len: self.len,
        }
    }

    /// True iff `A + g = A`.
    pub fn is_invariant_under(&self, g: Element) -> bool {
        let (low, high) = (g.0 & 63, (g.0 >> 6) as usize);
        self.words
            .iter()
            .enumerate()
            .all(|(i, &w)| self.words[i ^ high] == shuffle_word(w, low))
    }

    /// `|A ∩ (B + g)|`.
    pub(crate) fn intersection_len_with_translate(&self, b: &SetF2, g: Element) -> usize {
        let (low, high) = (g.0 & 63, (g.0 >> 6) as usize);
        b.words
            .iter()
            .enumerate()
            .map(|(i, &w)| (self.words[i ^ high] & shuffle_word(w, low)).count_ones() as usize)
            .sum()
    }

    pub(crate) fn sumset_unchecked(&self, other: &SetF2) -> SetF2 {
        let (small, large) = if self.len <= other.len {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc: Words = smallvec![0; self.words.len()];
        if small.is_empty() {
            return Self::from_raw(self.ctx, acc);
        }
        let full = universe_tail(self.ctx);
        for x in small.iter() {
            let (low, high) = (x.0 & 63, (x.0 >> 6) as usize);
            for (i, &w) in large.words.iter().enumerate() {
                acc[i ^ high] |= shuffle_word(w, low);
            }
            if acc.iter().all(|&w| w == full) {
                break;
            }
        }
        Self::from_raw(self.ctx, acc)
    }

    fn zip_words(&self, other: &SetF2, f: impl Fn(u64, u64) -> u64) -> Result<SetF2> {
        ensure_same_rank(self.rank(), other.rank())?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self::from_raw(self.ctx, words))
    }

    pub fn union(&self, other: &SetF2) -> Result<SetF2> {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &SetF2) -> Result<SetF2> {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &SetF2) -> Result<SetF2> {
        self.zip_words(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> SetF2 {
        let mut words: Words = self.words.iter().map(|w| !w).collect();
        words[0] &= universe_tail(self.ctx);
        Self {
            ctx: self.ctx,
            words,
            len: self.ctx.order() - self.len,
        }
    }

    pub fn is_subset(&self, other: &SetF2) -> bool {
        self.rank() == other.rank()
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(&a, &b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &SetF2) -> bool {
        self.rank() == other.rank()
            && self
                .words
                .iter()
                .zip(&other.words)
                .all(|(&a, &b)| a & b == 0)
    }

    /// Compares the bitsets as unsigned integers (bit `i` is element `i`).
    pub fn cmp_as_integer(&self, other: &SetF2) -> Ordering {
        self.rank()
            .cmp(&other.rank())
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialEq for SetF2 {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.words == other.words
    }
}

impl Eq for SetF2 {}

impl std::hash::Hash for SetF2 {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ctx.hash(state);
        self.words.hash(state);
    }
}

impl fmt::Debug for SetF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = Element;

    fn next(&mut self) -> Option<Element> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros();
                self.current &= self.current - 1;
                return Some(Element((self.index as u32) << 6 | bit));
            }
            self.index += 1;
            self.current = *self.words.get(self.index)?;
        }
    }
}

impl<'a> IntoIterator for &'a SetF2 {
    type Item = Element;
    type IntoIter = Iter<'a>;
    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(n: u32) -> GroupCtx {
        GroupCtx::new(n).unwrap()
    }

    #[test]
    fn shuffle_matches_pointwise_xor() {
        let x = 0x8000_0000_0000_0421u64;
        for t in 0..64 {
            let y = shuffle_word(x, t);
            for i in 0..64u32 {
                assert_eq!(x >> i & 1, y >> (i ^ t) & 1);
            }
        }
    }

    #[test]
    fn from_mask_rejects_outside_bits() {
        assert!(SetF2::from_mask(ctx(2), 0x10).is_err());
        assert_eq!(SetF2::from_mask(ctx(2), 0xf).unwrap(), SetF2::full(ctx(2)));
    }

    #[test]
    fn rank_zero_group() {
        let g = SetF2::full(ctx(0));
        assert_eq!(g.len(), 1);
        assert_eq!(g.iter().collect::<Vec<_>>(), vec![Element(0)]);
        assert!(g.complement().is_empty());
    }

    fn arb_set(n: u32) -> impl Strategy<Value = SetF2> {
        proptest::collection::vec(any::<bool>(), 1usize << n).prop_map(move |bits| {
            SetF2::from_elements(
                GroupCtx::new(n).unwrap(),
                bits.iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(i, _)| Element(i as u32)),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn translate_is_pointwise(a in arb_set(8), g in 0u32..256) {
            let t = a.translate(Element(g));
            let expected = SetF2::from_elements(a.ctx(), a.iter().map(|x| x ^ Element(g))).unwrap();
            prop_assert_eq!(t, expected);
        }

        #[test]
        fn sumset_matches_pair_enumeration(a in arb_set(7), b in arb_set(7)) {
            let s = a.sumset_unchecked(&b);
            let expected = SetF2::from_elements(
                a.ctx(),
                a.iter().flat_map(|x| b.iter().map(move |y| x ^ y)),
            ).unwrap();
            prop_assert_eq!(s, expected);
        }

        #[test]
        fn cached_len_is_popcount(a in arb_set(7), b in arb_set(7)) {
            for s in [a.union(&b).unwrap(), a.intersection(&b).unwrap(), a.difference(&b).unwrap(), a.complement()] {
                prop_assert_eq!(s.len(), s.iter().count());
            }
        }
    }
}
