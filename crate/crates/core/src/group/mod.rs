//! Exact set algebra over `F_2^n`.
//!
//! Elements are `n`-bit integers with XOR as the group law. Sets are dense
//! bitsets of length `2^n` indexed by element, so sums, translates and
//! period tests reduce to word-level shuffles and popcounts.

mod literal;
mod set;
mod subgroup;

use std::fmt;
use std::ops::{BitXor, BitXorAssign};
use std::sync::atomic::{AtomicU32, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_rank, Error, Result};

pub use set::{shuffle_word, SetF2};
pub(crate) use subgroup::cached_subgroups;
pub use subgroup::{enumerate_subgroups, Coset, Subgroup};

/// Rank cap applied when nothing else is configured.
pub const DEFAULT_MAX_RANK: u32 = 20;
/// Upper bound for [`set_max_rank`]; a set at this rank is a 32 MiB bitset.
pub const HARD_MAX_RANK: u32 = 28;

static MAX_RANK: AtomicU32 = AtomicU32::new(DEFAULT_MAX_RANK);

/// Current rank cap for new [`GroupCtx`] values.
pub fn max_rank() -> u32 {
    MAX_RANK.load(Ordering::Relaxed)
}

/// Sets the rank cap, clamped to [`HARD_MAX_RANK`]. Returns the value in effect.
pub fn set_max_rank(rank: u32) -> u32 {
    let rank = rank.min(HARD_MAX_RANK);
    MAX_RANK.store(rank, Ordering::Relaxed);
    rank
}

/// The ambient group `F_2^rank`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupCtx {
    rank: u32,
}

impl GroupCtx {
    pub fn new(rank: u32) -> Result<Self> {
        let cap = max_rank();
        if rank > cap {
            return Err(Error::RankTooLarge { rank, cap });
        }
        Ok(Self { rank })
    }

    pub fn rank(self) -> u32 {
        self.rank
    }

    pub fn order(self) -> usize {
        1usize << self.rank
    }

    /// Mask with the low `rank` bits set.
    pub fn element_mask(self) -> u32 {
        if self.rank == 0 {
            0
        } else {
            u32::MAX >> (32 - self.rank)
        }
    }

    pub fn contains(self, e: Element) -> bool {
        e.0 & !self.element_mask() == 0
    }

    pub fn element(self, bits: u64) -> Result<Element> {
        if bits >= self.order() as u64 {
            return Err(Error::ElementOutOfRange {
                element: bits,
                rank: self.rank,
            });
        }
        Ok(Element(bits as u32))
    }

    /// Iterates the group elements in increasing order.
    pub fn elements(self) -> impl Iterator<Item = Element> {
        (0..self.order() as u32).map(Element)
    }
}

/// A group element of `F_2^n`; coordinate `i` is bit `i`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Element(pub u32);

impl Element {
    pub const ZERO: Element = Element(0);

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn unit(i: u32) -> Element {
        Element(1 << i)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl BitXor for Element {
    type Output = Element;
    fn bitxor(self, rhs: Element) -> Element {
        Element(self.0 ^ rhs.0)
    }
}

impl BitXorAssign for Element {
    fn bitxor_assign(&mut self, rhs: Element) {
        self.0 ^= rhs.0;
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Element {
    fn from(bits: u32) -> Self {
        Element(bits)
    }
}

/// `A + B = {a + b : a in A, b in B}`; empty if either summand is empty.
pub fn sumset(a: &SetF2, b: &SetF2) -> Result<SetF2> {
    ensure_same_rank(a.rank(), b.rank())?;
    Ok(a.sumset_unchecked(b))
}

/// Number of pairs `(a, b)` in `A x B` with `a + b = g`.
pub fn nu(a: &SetF2, b: &SetF2, g: Element) -> Result<u64> {
    ensure_same_rank(a.rank(), b.rank())?;
    if !a.ctx().contains(g) {
        return Err(Error::ElementOutOfRange {
            element: g.0 as u64,
            rank: a.rank(),
        });
    }
    // a + b = g  <=>  a in A and a in B + g
    Ok(a.intersection_len_with_translate(b, g) as u64)
}

/// Representation counts `nu_{A,B}(g)` for every `g`, indexed by element.
///
/// Uses direct pair enumeration when `|A||B|` is small, otherwise a
/// Walsh-Hadamard convolution.
pub fn representation_counts(a: &SetF2, b: &SetF2) -> Result<Vec<u64>> {
    ensure_same_rank(a.rank(), b.rank())?;
    let order = a.ctx().order();
    let direct_cost = a.len() as u128 * b.len() as u128;
    let transform_cost = 3 * a.rank() as u128 * order as u128 + order as u128;
    if direct_cost <= transform_cost {
        Ok(representation_counts_direct(a, b))
    } else {
        Ok(representation_counts_walsh(a, b))
    }
}

pub(crate) fn representation_counts_direct(a: &SetF2, b: &SetF2) -> Vec<u64> {
    let mut counts = vec![0u64; a.ctx().order()];
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let large_elems: Vec<u32> = large.iter().map(|e| e.0).collect();
    for x in small.iter() {
        for &y in &large_elems {
            counts[(x.0 ^ y) as usize] += 1;
        }
    }
    counts
}

pub(crate) fn representation_counts_walsh(a: &SetF2, b: &SetF2) -> Vec<u64> {
    fn transform(v: &mut [i64]) {
        let mut h = 1;
        while h < v.len() {
            for block in v.chunks_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                    let (s, d) = (*x + *y, *x - *y);
                    *x = s;
                    *y = d;
                }
            }
            h *= 2;
        }
    }
    let order = a.ctx().order();
    let indicator = |s: &SetF2| {
        let mut v = vec![0i64; order];
        for e in s.iter() {
            v[e.0 as usize] = 1;
        }
        v
    };
    let mut fa = indicator(a);
    let mut fb = indicator(b);
    transform(&mut fa);
    transform(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    transform(&mut fa);
    fa.into_iter().map(|v| (v >> a.rank()) as u64).collect()
}

/// `mu_{A,B} = min { nu_{A,B}(g) : g in A + B }`.
pub fn mu(a: &SetF2, b: &SetF2) -> Result<u64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let counts = representation_counts(a, b)?;
    Ok(counts.into_iter().filter(|&c| c > 0).min().unwrap_or(0))
}

pub fn complement(a: &SetF2) -> SetF2 {
    a.complement()
}

/// The smallest coset containing `A`.
pub fn affine_span(a: &SetF2) -> Result<Coset> {
    let base = a.min().ok_or(Error::EmptySet)?;
    let linear = Subgroup::from_generators(a.ctx(), a.iter().map(|x| x ^ base))?;
    Ok(Coset::new(base, linear))
}

/// Maximal period of a set, with a flag for the `pi(empty) = G` convention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Period {
    pub subgroup: Subgroup,
    /// Set when the input was empty and `G` was returned by convention.
    pub degenerate: bool,
}

impl Period {
    pub fn is_trivial(&self) -> bool {
        self.subgroup.dim() == 0
    }
}

/// `pi(A) = { g : A + g = A }`. The empty set gets `G` with `degenerate` set.
pub fn period(a: &SetF2) -> Period {
    let Some(base) = a.min() else {
        return Period {
            subgroup: Subgroup::whole(a.ctx()),
            degenerate: true,
        };
    };
    // Any period g maps base into A, so g ranges over A + base.
    let periods = a
        .iter()
        .map(|x| x ^ base)
        .filter(|&g| g.is_zero() || a.is_invariant_under(g));
    let subgroup =
        Subgroup::from_generators(a.ctx(), periods).expect("periods lie in the ambient group");
    Period {
        subgroup,
        degenerate: false,
    }
}

/// `phi_H(A)` in `G/H`, using the coordinates of [`Subgroup::quotient_element`].
pub fn quotient_map(a: &SetF2, h: &Subgroup) -> Result<SetF2> {
    ensure_same_rank(a.rank(), h.ctx().rank())?;
    let qctx = h.quotient_ctx();
    let mut out = SetF2::empty(qctx);
    for x in a.iter() {
        out.insert_unchecked(h.quotient_element(x));
    }
    Ok(out)
}

/// Full preimage under [`quotient_map`].
pub fn lift(s: &SetF2, h: &Subgroup) -> Result<SetF2> {
    ensure_same_rank(s.rank(), h.quotient_ctx().rank())?;
    let mut out = SetF2::empty(h.ctx());
    for q in s.iter() {
        let rep = h.lift_element(q);
        for m in h.members().iter() {
            out.insert_unchecked(rep ^ m);
        }
    }
    Ok(out)
}

/// True iff `A` is a (possibly empty) union of `F`-cosets.
pub fn is_union_of_cosets(a: &SetF2, f: &Subgroup) -> Result<bool> {
    ensure_same_rank(a.rank(), f.ctx().rank())?;
    Ok(f.basis().iter().all(|&v| a.is_invariant_under(v)))
}
