use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::Serialize;

use super::{Element, GroupCtx, SetF2};
use crate::error::{Error, Result};

/// A linear subspace of `F_2^n`.
///
/// The basis is kept in reduced row-echelon form: each basis vector's
/// highest set bit is its pivot, pivots are strictly descending, and no
/// pivot bit appears in any other basis vector. That form is unique per
/// subspace, so equality and hashing go through the basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    ctx: GroupCtx,
    basis: Vec<Element>,
    members: SetF2,
}

fn pivot(v: Element) -> u32 {
    31 - v.0.leading_zeros()
}

/// Reduces `v` against an RREF basis, clearing every pivot bit.
fn reduce_against(basis: &[Element], mut v: Element) -> Element {
    for &b in basis {
        if v.0 >> pivot(b) & 1 == 1 {
            v ^= b;
        }
    }
    v
}

fn span_members(ctx: GroupCtx, basis: &[Element]) -> SetF2 {
    let mut members = SetF2::empty(ctx);
    let mut current = Element::ZERO;
    members.insert_unchecked(current);
    // Gray-code walk over all combinations.
    for i in 1u64..(1u64 << basis.len()) {
        current ^= basis[i.trailing_zeros() as usize];
        members.insert_unchecked(current);
    }
    members
}

impl Subgroup {
    pub fn zero(ctx: GroupCtx) -> Self {
        Self::from_rref(ctx, Vec::new())
    }

    pub fn whole(ctx: GroupCtx) -> Self {
        let basis = (0..ctx.rank()).rev().map(Element::unit).collect();
        Self::from_rref(ctx, basis)
    }

    fn from_rref(ctx: GroupCtx, basis: Vec<Element>) -> Self {
        let members = span_members(ctx, &basis);
        Self {
            ctx,
            basis,
            members,
        }
    }

    /// The span of the given elements.
    pub fn from_generators<I>(ctx: GroupCtx, gens: I) -> Result<Self>
    where
        I: IntoIterator<Item = Element>,
    {
        let mut basis: Vec<Element> = Vec::new();
        for g in gens {
            if !ctx.contains(g) {
                return Err(Error::ElementOutOfRange {
                    element: g.0 as u64,
                    rank: ctx.rank(),
                });
            }
            let v = reduce_against(&basis, g);
            if v.is_zero() {
                continue;
            }
            let p = pivot(v);
            for b in basis.iter_mut() {
                if b.0 >> p & 1 == 1 {
                    *b ^= v;
                }
            }
            let at = basis.partition_point(|&b| pivot(b) > p);
            basis.insert(at, v);
            if basis.len() == ctx.rank() as usize {
                break;
            }
        }
        Ok(Self::from_rref(ctx, basis))
    }

    /// Accepts a basis only if it is already the canonical RREF basis.
    pub fn from_canonical_basis(ctx: GroupCtx, basis: &[Element]) -> Result<Self> {
        let span = Self::from_generators(ctx, basis.iter().copied())?;
        if span.basis != basis {
            return Err(Error::InvalidSubgroup(format!(
                "basis {:?} is not in canonical reduced echelon form",
                basis.iter().map(|e| e.0).collect::<Vec<_>>()
            )));
        }
        Ok(span)
    }

    pub fn ctx(&self) -> GroupCtx {
        self.ctx
    }

    pub fn basis(&self) -> &[Element] {
        &self.basis
    }

    pub fn basis_bits(&self) -> Vec<u32> {
        self.basis.iter().map(|e| e.0).collect()
    }

    pub fn members(&self) -> &SetF2 {
        &self.members
    }

    pub fn dim(&self) -> u32 {
        self.basis.len() as u32
    }

    pub fn order(&self) -> usize {
        1usize << self.dim()
    }

    /// `|G| / |H|`.
    pub fn index(&self) -> u64 {
        1u64 << (self.ctx.rank() - self.dim())
    }

    pub fn contains(&self, e: Element) -> bool {
        self.members.contains(e)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Smallest element of the coset `e + H`.
    pub fn reduce(&self, e: Element) -> Element {
        reduce_against(&self.basis, e)
    }

    fn pivot_mask(&self) -> u32 {
        self.basis.iter().fold(0, |m, &b| m | 1 << pivot(b))
    }

    /// The quotient `G/H` as `F_2^(n - dim H)`.
    pub fn quotient_ctx(&self) -> GroupCtx {
        GroupCtx {
            rank: self.ctx.rank() - self.dim(),
        }
    }

    /// Coordinates of `e + H` in `G/H`.
    ///
    /// The basis of `H` is completed to a basis of `G` by the unit vectors
    /// at the non-pivot positions, in increasing order; the quotient
    /// coordinates of `e` are its coefficients on those unit vectors, which
    /// are the non-pivot bits of the coset minimum.
    pub fn quotient_element(&self, e: Element) -> Element {
        let free = self.ctx.element_mask() & !self.pivot_mask();
        Element(extract_bits(self.reduce(e).0, free))
    }

    /// Smallest element of the coset with the given quotient coordinates.
    pub fn lift_element(&self, q: Element) -> Element {
        let free = self.ctx.element_mask() & !self.pivot_mask();
        Element(deposit_bits(q.0, free))
    }

    /// Coefficients of `e` (which must lie in `H`) on the basis, packed so
    /// that bit `i` is the coefficient of the basis vector with the `i`-th
    /// smallest pivot.
    pub fn coordinates(&self, e: Element) -> Option<Element> {
        if !self.contains(e) {
            return None;
        }
        let bits = self
            .basis
            .iter()
            .rev()
            .enumerate()
            .fold(0u32, |acc, (i, &b)| acc | (e.0 >> pivot(b) & 1) << i);
        Some(Element(bits))
    }

    /// Inverse of [`Self::coordinates`].
    pub fn embed(&self, coords: Element) -> Element {
        self.basis
            .iter()
            .rev()
            .enumerate()
            .filter(|(i, _)| coords.0 >> i & 1 == 1)
            .fold(Element::ZERO, |acc, (_, &b)| acc ^ b)
    }

    /// The group `H` itself as `F_2^(dim H)`.
    pub fn own_ctx(&self) -> GroupCtx {
        GroupCtx { rank: self.dim() }
    }

    /// Re-expresses a set lying in a single `H`-coset in coordinates of `H`,
    /// after translating by the coset minimum.
    pub fn coset_coordinates(&self, s: &SetF2) -> Result<SetF2> {
        let first = s.min().ok_or(Error::EmptySet)?;
        let rep = self.reduce(first);
        let mut out = SetF2::empty(self.own_ctx());
        for x in s.iter() {
            let c = self.coordinates(x ^ rep).ok_or_else(|| {
                Error::Precondition("set is not contained in a single coset".into())
            })?;
            out.insert_unchecked(c);
        }
        Ok(out)
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subgroup(n={}, basis={:?})",
            self.ctx.rank(),
            self.basis_bits()
        )
    }
}

fn extract_bits(value: u32, mask: u32) -> u32 {
    let mut out = 0;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let bit = m.trailing_zeros();
        out |= (value >> bit & 1) << k;
        k += 1;
        m &= m - 1;
    }
    out
}

fn deposit_bits(value: u32, mask: u32) -> u32 {
    let mut out = 0;
    let mut k = 0;
    let mut m = mask;
    while m != 0 {
        let bit = m.trailing_zeros();
        out |= (value >> k & 1) << bit;
        k += 1;
        m &= m - 1;
    }
    out
}

/// A coset `rep + H`, with `rep` the smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coset {
    rep: Element,
    subgroup: Subgroup,
}

impl Coset {
    pub fn new(any_member: Element, subgroup: Subgroup) -> Self {
        Self {
            rep: subgroup.reduce(any_member),
            subgroup,
        }
    }

    pub fn rep(&self) -> Element {
        self.rep
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn len(&self) -> usize {
        self.subgroup.order()
    }

    /// Always false: a coset contains its representative.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self) -> u64 {
        self.subgroup.index()
    }

    pub fn contains(&self, e: Element) -> bool {
        self.subgroup.contains(e ^ self.rep)
    }

    pub fn members(&self) -> SetF2 {
        self.subgroup.members().translate(self.rep)
    }
}

impl Serialize for Coset {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Coset", 2)?;
        s.serialize_field("rep", &self.rep)?;
        s.serialize_field("basis", &self.subgroup.basis)?;
        s.end()
    }
}

/// All `dim`-dimensional subspaces of the group, each exactly once, sorted
/// by canonical basis.
pub fn enumerate_subgroups(ctx: GroupCtx, dim: u32) -> Result<Vec<Subgroup>> {
    let n = ctx.rank();
    if dim > n {
        return Err(Error::Parameter(format!(
            "subgroup dimension {dim} exceeds rank {n}"
        )));
    }
    let mut bases = Vec::new();
    let mut pivots = Vec::with_capacity(dim as usize);
    choose_pivots(dim, n, &mut pivots, &mut |pivots| {
        let pivot_mask: u32 = pivots.iter().fold(0, |m, &p| m | 1 << p);
        // free positions of each row: non-pivot bits below its pivot
        let free: Vec<Vec<u32>> = pivots
            .iter()
            .map(|&p| (0..p).filter(|b| pivot_mask >> b & 1 == 0).collect())
            .collect();
        let total: usize = free.iter().map(Vec::len).sum();
        for assignment in 0u64..(1u64 << total) {
            let mut shift = 0;
            let basis: Vec<Element> = pivots
                .iter()
                .zip(&free)
                .map(|(&p, positions)| {
                    let mut v = 1u32 << p;
                    for (j, &pos) in positions.iter().enumerate() {
                        v |= ((assignment >> (shift + j) & 1) as u32) << pos;
                    }
                    shift += positions.len();
                    Element(v)
                })
                .collect();
            bases.push(basis);
        }
    });
    bases.sort();
    Ok(bases
        .into_iter()
        .map(|b| Subgroup::from_rref(ctx, b))
        .collect())
}

/// Memoised [`enumerate_subgroups`] for small ranks.
pub(crate) fn cached_subgroups(ctx: GroupCtx, dim: u32) -> Result<Arc<Vec<Subgroup>>> {
    const CACHE_MAX_RANK: u32 = 8;
    if ctx.rank() > CACHE_MAX_RANK {
        return enumerate_subgroups(ctx, dim).map(Arc::new);
    }
    type Cache = Mutex<HashMap<(u32, u32), Arc<Vec<Subgroup>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cache lock").get(&(ctx.rank(), dim)) {
        return Ok(hit.clone());
    }
    let subs = Arc::new(enumerate_subgroups(ctx, dim)?);
    cache
        .lock()
        .expect("cache lock")
        .insert((ctx.rank(), dim), subs.clone());
    Ok(subs)
}

fn choose_pivots(remaining: u32, below: u32, acc: &mut Vec<u32>, emit: &mut impl FnMut(&[u32])) {
    if remaining == 0 {
        emit(acc);
        return;
    }
    for p in (remaining - 1..below).rev() {
        acc.push(p);
        choose_pivots(remaining - 1, p, acc, emit);
        acc.pop();
    }
}
