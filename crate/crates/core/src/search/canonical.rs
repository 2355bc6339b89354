//! Canonical forms under the affine group `AGL(n, 2)`.
//!
//! For `n <= 4` the orbits of all `2^(2^n)` subsets are computed once by a
//! breadth-first search over generators (transvections and unit
//! translations). [`canonical_form_exhaustive`] minimizes over every
//! invertible matrix and translation instead and serves as an independent
//! route, exact up to `n = 5`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::group::{shuffle_word, GroupCtx, SetF2};
use crate::par;

/// Largest rank with precomputed orbit tables.
pub const TABLE_MAX_RANK: u32 = 4;
/// Largest rank accepted by [`canonical_form`].
pub const EXACT_MAX_RANK: u32 = 5;

fn order(n: u32) -> u32 {
    1 << n
}

/// Calls `f` with the column images of every invertible `n x n` matrix
/// whose first column is `first`.
fn for_each_gl_with_first(n: u32, first: u32, f: &mut impl FnMut(&[u32])) {
    fn rec(n: u32, cols: &mut Vec<u32>, span: u64, f: &mut impl FnMut(&[u32])) {
        if cols.len() == n as usize {
            f(cols);
            return;
        }
        for c in 1..order(n) {
            if span >> c & 1 == 0 {
                cols.push(c);
                rec(n, cols, span | shuffle_word(span, c), f);
                cols.pop();
            }
        }
    }
    let mut cols = vec![first];
    rec(n, &mut cols, 1 | 1 << first, f);
}

fn for_each_gl(n: u32, mut f: impl FnMut(&[u32])) {
    if n == 0 {
        f(&[]);
        return;
    }
    for first in 1..order(n) {
        for_each_gl_with_first(n, first, &mut f);
    }
}

/// Images of all `2^n` elements under the linear map with columns `cols`.
fn images(n: u32, cols: &[u32], out: &mut [u32]) {
    out[0] = 0;
    for x in 1..order(n) as usize {
        let low = x.trailing_zeros();
        out[x] = out[x & (x - 1)] ^ cols[low as usize];
    }
    debug_assert!(cols.len() == n as usize);
}

fn apply_perm(perm: &[u32], mask: u64) -> u64 {
    let mut out = 0u64;
    let mut m = mask;
    while m != 0 {
        let x = m.trailing_zeros() as usize;
        out |= 1 << perm[x];
        m &= m - 1;
    }
    out
}

fn min_translate(mask: u64, n: u32) -> u64 {
    (0..order(n))
        .map(|t| shuffle_word(mask, t))
        .min()
        .unwrap_or(mask)
}

/// Element permutations of every matrix in `GL(n, 2)`, `n <= 4`.
fn linear_perms(n: u32) -> &'static [Vec<u32>] {
    static TABLES: [OnceLock<Vec<Vec<u32>>>; 5] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    assert!(n <= TABLE_MAX_RANK);
    TABLES[n as usize].get_or_init(|| {
        let mut perms = Vec::new();
        for_each_gl(n, |cols| {
            let mut img = vec![0u32; order(n) as usize];
            images(n, cols, &mut img);
            perms.push(img);
        });
        perms
    })
}

/// Number of invertible `n x n` matrices over `F_2`.
pub fn gl_order(n: u32) -> u128 {
    (0..n).map(|i| (1u128 << n) - (1u128 << i)).product()
}

/// Orbit data for all subsets of `F_2^n`, `n <= 4`.
pub struct OrbitTable {
    rank: u32,
    canon: Vec<u16>,
    reps: Vec<(u16, u64)>,
}

impl OrbitTable {
    fn build(n: u32) -> Self {
        let points = order(n);
        let subsets = 1usize << points;
        let mut generators: Vec<Vec<u32>> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    generators.push((0..points).map(|x| x ^ ((x >> i & 1) << j)).collect());
                }
            }
            generators.push((0..points).map(|x| x ^ (1 << i)).collect());
        }
        let mut canon = vec![0u16; subsets];
        let mut seen = vec![false; subsets];
        let mut reps = Vec::new();
        let mut queue = Vec::new();
        for start in 0..subsets {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.clear();
            queue.push(start);
            let mut head = 0;
            while head < queue.len() {
                let m = queue[head];
                head += 1;
                canon[m] = start as u16;
                for g in &generators {
                    let image = apply_perm(g, m as u64) as usize;
                    if !seen[image] {
                        seen[image] = true;
                        queue.push(image);
                    }
                }
            }
            reps.push((start as u16, queue.len() as u64));
        }
        Self {
            rank: n,
            canon,
            reps,
        }
    }

    /// Shared table for rank `n <= 4`.
    pub fn get(n: u32) -> Result<&'static OrbitTable> {
        static TABLES: [OnceLock<OrbitTable>; 5] = [
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
            OnceLock::new(),
        ];
        if n > TABLE_MAX_RANK {
            return Err(Error::RankTooLarge {
                rank: n,
                cap: TABLE_MAX_RANK,
            });
        }
        Ok(TABLES[n as usize].get_or_init(|| OrbitTable::build(n)))
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn canonical_mask(&self, mask: u64) -> u64 {
        self.canon[mask as usize] as u64
    }

    /// Orbit representatives (orbit minima) with orbit sizes, ascending.
    pub fn representatives(&self) -> &[(u16, u64)] {
        &self.reps
    }

    pub fn orbit_size(&self, mask: u64) -> u64 {
        let rep = self.canonical_mask(mask) as u16;
        let i = self.reps.partition_point(|&(r, _)| r < rep);
        self.reps[i].1
    }
}

fn small_mask(a: &SetF2, cap: u32) -> Result<u64> {
    if a.rank() > cap {
        return Err(Error::RankTooLarge {
            rank: a.rank(),
            cap,
        });
    }
    Ok(a.to_mask().expect("rank at most 6"))
}

/// Orbit-minimal representative of `a` under `AGL(n, 2)`, `n <= 5`.
pub fn canonical_form(a: &SetF2) -> Result<SetF2> {
    let mask = small_mask(a, EXACT_MAX_RANK)?;
    if a.rank() <= TABLE_MAX_RANK {
        let table = OrbitTable::get(a.rank())?;
        return SetF2::from_mask(a.ctx(), table.canonical_mask(mask));
    }
    canonical_form_exhaustive(a)
}

/// Minimizes over every invertible matrix and translation, `n <= 5`.
pub fn canonical_form_exhaustive(a: &SetF2) -> Result<SetF2> {
    let mask = small_mask(a, EXACT_MAX_RANK)?;
    let n = a.rank();
    let best = if n == 0 {
        mask
    } else if n <= TABLE_MAX_RANK {
        linear_perms(n)
            .iter()
            .map(|p| min_translate(apply_perm(p, mask), n))
            .min()
            .unwrap_or(mask)
    } else {
        par::map_reduce(
            (1..order(n)).collect(),
            None,
            || u64::MAX,
            |first| {
                let mut best = u64::MAX;
                let mut img = vec![0u32; order(n) as usize];
                for_each_gl_with_first(n, first, &mut |cols| {
                    images(n, cols, &mut img);
                    best = best.min(min_translate(apply_perm(&img, mask), n));
                });
                best
            },
            u64::min,
        )
    };
    SetF2::from_mask(a.ctx(), best)
}

/// Canonicalizes second components relative to a fixed first component.
pub struct PairCanonicalizer {
    ctx: GroupCtx,
    a_canon: u64,
    maps: Vec<usize>,
}

impl PairCanonicalizer {
    /// `n <= 4`.
    pub fn new(a: &SetF2) -> Result<Self> {
        let mask = small_mask(a, TABLE_MAX_RANK)?;
        let n = a.rank();
        let a_canon = OrbitTable::get(n)?.canonical_mask(mask);
        let maps = linear_perms(n)
            .iter()
            .enumerate()
            .filter(|(_, p)| min_translate(apply_perm(p, mask), n) == a_canon)
            .map(|(i, _)| i)
            .collect();
        Ok(Self {
            ctx: a.ctx(),
            a_canon,
            maps,
        })
    }

    pub fn first(&self) -> SetF2 {
        SetF2::from_mask(self.ctx, self.a_canon).expect("rank at most 4")
    }

    /// Smallest `M(b) + t` over the linear parts `M` that send `a` to its
    /// canonical form.
    pub fn second(&self, b: &SetF2) -> Result<SetF2> {
        crate::error::ensure_same_rank(self.ctx.rank(), b.rank())?;
        let n = self.ctx.rank();
        let mask = b.to_mask().expect("rank at most 4");
        let perms = linear_perms(n);
        let best = self
            .maps
            .iter()
            .map(|&i| min_translate(apply_perm(&perms[i], mask), n))
            .min()
            .unwrap_or(mask);
        SetF2::from_mask(self.ctx, best)
    }
}

/// Lexicographically smallest `(M(A) + t1, M(B) + t2)` over invertible `M`
/// and translations `t1`, `t2`, `n <= 4`. Two pairs are equivalent under
/// independent translations of each summand and a common linear map exactly
/// when their canonical pairs agree.
pub fn canonical_pair(a: &SetF2, b: &SetF2) -> Result<(SetF2, SetF2)> {
    crate::error::ensure_same_rank(a.rank(), b.rank())?;
    let c = PairCanonicalizer::new(a)?;
    Ok((c.first(), c.second(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(n: u32) -> GroupCtx {
        GroupCtx::new(n).unwrap()
    }

    #[test]
    fn gl_sizes() {
        for n in 0..=4 {
            assert_eq!(linear_perms(n).len() as u128, gl_order(n));
        }
        assert_eq!(gl_order(4), 20_160);
        assert_eq!(gl_order(5), 9_999_360);
    }

    #[test]
    fn trivial_sets() {
        for n in 0..=4 {
            let empty = SetF2::empty(ctx(n));
            let full = SetF2::full(ctx(n));
            assert_eq!(canonical_form(&empty).unwrap(), empty);
            assert_eq!(canonical_form(&full).unwrap(), full);
        }
    }

    #[test]
    fn two_subsets_of_the_plane_form_one_orbit() {
        let c = ctx(2);
        let forms: Vec<SetF2> = (0u64..16)
            .filter(|m| m.count_ones() == 2)
            .map(|m| canonical_form(&SetF2::from_mask(c, m).unwrap()).unwrap())
            .collect();
        assert_eq!(forms.len(), 6);
        assert!(forms
            .iter()
            .all(|f| *f == SetF2::from_mask(c, 0b11).unwrap()));
    }

    #[test]
    fn orbit_sizes_partition_the_power_set() {
        for n in 0..=4 {
            let t = OrbitTable::get(n).unwrap();
            let total: u64 = t.representatives().iter().map(|r| r.1).sum();
            assert_eq!(total, 1 << (1u32 << n));
            let group = gl_order(n) << n;
            for &(_, size) in t.representatives() {
                assert_eq!(group % size as u128, 0);
            }
        }
    }

    #[test]
    fn table_matches_exhaustive_minimization() {
        for n in 0..=3 {
            for m in 0..1u64 << (1u32 << n) {
                let s = SetF2::from_mask(ctx(n), m).unwrap();
                assert_eq!(
                    canonical_form(&s).unwrap(),
                    canonical_form_exhaustive(&s).unwrap()
                );
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let s = SetF2::from_mask(ctx(4), rng.gen_range(0..1 << 16)).unwrap();
            assert_eq!(
                canonical_form(&s).unwrap(),
                canonical_form_exhaustive(&s).unwrap()
            );
        }
    }

    #[test]
    fn rank_cap() {
        let s = SetF2::empty(ctx(6));
        assert!(matches!(
            canonical_form(&s),
            Err(Error::RankTooLarge { .. })
        ));
        assert!(canonical_pair(&SetF2::empty(ctx(5)), &SetF2::empty(ctx(5))).is_err());
    }

    #[test]
    fn rank_five_invariance() {
        let c = ctx(5);
        let a = SetF2::from_elements(c, [0u32, 1, 2, 4, 8, 16, 7, 25]).unwrap();
        let cols = [3u32, 5, 9, 17, 31];
        let mut img = vec![0u32; 32];
        images(5, &cols, &mut img);
        let b = SetF2::from_elements(c, a.iter().map(|x| img[x.bits() as usize] ^ 13)).unwrap();
        let fa = canonical_form(&a).unwrap();
        assert_eq!(fa, canonical_form(&b).unwrap());
        assert_eq!(canonical_form(&fa).unwrap(), fa);
        assert!(fa.cmp_as_integer(&a).is_le());
    }

    #[test]
    fn canonical_pair_is_invariant() {
        let c = ctx(4);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let perms = linear_perms(4);
        for _ in 0..50 {
            let a = SetF2::from_mask(c, rng.gen_range(1..1 << 16)).unwrap();
            let b = SetF2::from_mask(c, rng.gen_range(1..1 << 16)).unwrap();
            let p = &perms[rng.gen_range(0..perms.len())];
            let (t1, t2) = (rng.gen_range(0..16), rng.gen_range(0..16));
            let map = |s: &SetF2, t| {
                SetF2::from_mask(c, shuffle_word(apply_perm(p, s.to_mask().unwrap()), t)).unwrap()
            };
            let expected = canonical_pair(&a, &b).unwrap();
            assert_eq!(
                canonical_pair(&map(&a, t1), &map(&b, t2)).unwrap(),
                expected
            );
            assert_eq!(expected.0, canonical_form(&a).unwrap());
        }
    }
}
