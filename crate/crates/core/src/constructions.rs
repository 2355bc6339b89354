//! Explicit example families with predicted sizes.
//!
//! Coordinates: the `H` part occupies the low bits and `F` the bits above
//! it; `h_i` is the `i`-th unit vector. Every builder states its predictions
//! from the closed-form description of the family, and
//! [`ConstructionOutput::verify`] recomputes them from the sets.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{self, Element, GroupCtx, SetF2, Subgroup};
use crate::structure::{self, ElementaryKind};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Predicted {
    pub size_a: usize,
    pub size_b: usize,
    pub size_sumset: usize,
    pub complement: SetF2,
    /// `None` when the complement is empty.
    pub complement_span_index: Option<u64>,
    pub complement_is_coset: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructionOutput {
    pub family: &'static str,
    pub a: SetF2,
    pub b: SetF2,
    pub predicted: Predicted,
}

impl ConstructionOutput {
    /// Recomputes every predicted field from `a` and `b`.
    pub fn recompute(&self) -> Result<Predicted> {
        let sumset = group::sumset(&self.a, &self.b)?;
        predicted_from(self.a.len(), self.b.len(), sumset.complement())
    }

    /// Returns the name of the first predicted field that disagrees with
    /// recomputation.
    pub fn verify(&self) -> std::result::Result<(), &'static str> {
        let actual = self.recompute().map_err(|_| "recompute")?;
        let p = &self.predicted;
        let checks = [
            ("size_a", p.size_a == actual.size_a),
            ("size_b", p.size_b == actual.size_b),
            ("size_sumset", p.size_sumset == actual.size_sumset),
            ("complement", p.complement == actual.complement),
            (
                "complement_span_index",
                p.complement_span_index == actual.complement_span_index,
            ),
            (
                "complement_is_coset",
                p.complement_is_coset == actual.complement_is_coset,
            ),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            Some((name, _)) => Err(name),
            None => Ok(()),
        }
    }
}

fn predicted_from(size_a: usize, size_b: usize, complement: SetF2) -> Result<Predicted> {
    let order = complement.ctx().order();
    let (index, is_coset) = if complement.is_empty() {
        (None, false)
    } else {
        let span = group::affine_span(&complement)?;
        (Some(span.index()), span.len() == complement.len())
    };
    Ok(Predicted {
        size_a,
        size_b,
        size_sumset: order - complement.len(),
        complement,
        complement_span_index: index,
        complement_is_coset: is_coset,
    })
}

fn check_element(ctx: GroupCtx, g: Element, name: &str) -> Result<()> {
    if ctx.contains(g) {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "{name} = {g} is outside F_2^{}",
            ctx.rank()
        )))
    }
}

/// The subgroup spanned by bits `lo..hi`.
fn coordinate_subgroup(ctx: GroupCtx, lo: u32, hi: u32) -> Result<Subgroup> {
    Subgroup::from_generators(ctx, (lo..hi).map(Element::unit))
}

/// `{x + f : x in xs, f in F}`.
fn plus_subgroup(ctx: GroupCtx, xs: &[u32], f: &Subgroup) -> Result<SetF2> {
    let base = SetF2::from_elements(ctx, xs.iter().copied())?;
    group::sumset(&base, f.members())
}

/// `A = g + (({h1,h2,h3} + F) ∪ {0})`,
/// `B = ({h1+h2, h2+h3, h3+h1, h1+h2+h3} + F) ∪ F0` in `H ⊕ F` with `|H| = 8`.
/// The complement of `A+B` is `g + (F \ F0)`.
pub fn build_noncoset_complement(
    rank_f: u32,
    f0: &SetF2,
    g_shift: Element,
) -> Result<ConstructionOutput> {
    if rank_f == 0 {
        return Err(Error::Parameter("rank_f must be at least 1".into()));
    }
    if f0.rank() != rank_f {
        return Err(Error::Parameter(format!(
            "F0 must live in F_2^{rank_f}, got rank {}",
            f0.rank()
        )));
    }
    if f0.is_full() {
        return Err(Error::Parameter("F0 must be a proper subset of F".into()));
    }
    let ctx = GroupCtx::new(3 + rank_f)?;
    check_element(ctx, g_shift, "g_shift")?;
    let f = coordinate_subgroup(ctx, 3, 3 + rank_f)?;
    let embed_f = |s: &SetF2| SetF2::from_elements(ctx, s.iter().map(|x| x.bits() << 3));

    let mut a = plus_subgroup(ctx, &[1, 2, 4], &f)?;
    a.insert_unchecked(Element::ZERO);
    let a = a.translate(g_shift);
    let b = plus_subgroup(ctx, &[3, 6, 5, 7], &f)?.union(&embed_f(f0)?)?;

    let complement = f.members().difference(&embed_f(f0)?)?.translate(g_shift);
    let order_f = 1usize << rank_f;
    let predicted = predicted_from(3 * order_f + 1, 4 * order_f + f0.len(), complement)?;
    Ok(ConstructionOutput {
        family: "noncoset",
        a,
        b,
        predicted,
    })
}

/// `A = g1 + {0, h_1, ..., h_k} + F`, `B = g2 + (H \ {0, h_1, ..., h_k}) + F`
/// with `|H| = 2^k`. The complement of `A+B` is `g1 + g2 + F`.
pub fn build_tight_extremal(
    k: u32,
    rank_f: u32,
    g1: Element,
    g2: Element,
) -> Result<ConstructionOutput> {
    if k < 3 {
        return Err(Error::Parameter(format!("k must be at least 3, got {k}")));
    }
    let ctx = GroupCtx::new(k + rank_f)?;
    check_element(ctx, g1, "g1")?;
    check_element(ctx, g2, "g2")?;
    let f = coordinate_subgroup(ctx, k, k + rank_f)?;
    let basis: Vec<u32> = std::iter::once(0).chain((0..k).map(|i| 1 << i)).collect();
    let rest: Vec<u32> = (0..1u32 << k).filter(|x| !basis.contains(x)).collect();
    let a = plus_subgroup(ctx, &basis, &f)?.translate(g1);
    let b = plus_subgroup(ctx, &rest, &f)?.translate(g2);

    let order_f = 1usize << rank_f;
    let complement = f.members().translate(g1 ^ g2);
    let predicted = predicted_from(
        (k as usize + 1) * order_f,
        ((1usize << k) - k as usize - 1) * order_f,
        complement,
    )?;
    Ok(ConstructionOutput {
        family: "tight",
        a,
        b,
        predicted,
    })
}

/// Pairs showing that neither span hypothesis can be dropped from the
/// Kneser-type corollary: `4|A+B| < 4|A| + 3|B|` while `A+B ≠ G`.
///
/// Variant 1 (`n >= 3`): `B` is the index-8 subgroup on bits `3..n` and `A`
/// is the union of the `B`-cosets of `{0, h1, h2, h3}`, so `<B> ≠ G`.
/// Variant 2 (`n >= 2`): `A` is the index-4 subgroup on bits `2..n` and `B`
/// is the union of the `A`-cosets of `{0, h1, h2}`, so `<A> ≠ G`.
pub fn build_span_necessity(variant: u32, n: u32) -> Result<ConstructionOutput> {
    let (min_n, sub_lo, reps): (u32, u32, &[u32]) = match variant {
        1 => (3, 3, &[0, 1, 2, 4]),
        2 => (2, 2, &[0, 1, 2]),
        _ => {
            return Err(Error::Parameter(format!(
                "variant must be 1 or 2, got {variant}"
            )))
        }
    };
    if n < min_n {
        return Err(Error::Parameter(format!(
            "variant {variant} needs n >= {min_n}, got {n}"
        )));
    }
    let ctx = GroupCtx::new(n)?;
    let sub = coordinate_subgroup(ctx, sub_lo, n)?;
    let cosets = plus_subgroup(ctx, reps, &sub)?;
    let (a, b) = match variant {
        1 => (cosets, sub.members().clone()),
        _ => (sub.members().clone(), cosets),
    };
    let complement = plus_subgroup(ctx, reps, &sub)?.complement();
    let predicted = predicted_from(a.len(), b.len(), complement)?;
    Ok(ConstructionOutput {
        family: "necessity",
        a,
        b,
        predicted,
    })
}

/// Elementary pairs of type III or IV with `H` the whole group of `h1`'s
/// context.
///
/// Type III: `H2 = H \ (H1 ∪ {0})`, `A = g1 + (H1 ∪ {0})`,
/// `B = g2 + (H2 ∪ {0})`; then `A+B = G`. Type IV: `H2 = H \ H1`,
/// `A = g1 + H1`, `B = g2 + H2`; then `A+B = G \ {g1+g2}`.
pub fn build_elementary(
    kind: ElementaryKind,
    h1: &SetF2,
    g1: Element,
    g2: Element,
) -> Result<ConstructionOutput> {
    let ctx = h1.ctx();
    check_element(ctx, g1, "g1")?;
    check_element(ctx, g2, "g2")?;
    let zero = SetF2::singleton(ctx, Element::ZERO)?;
    let (a, b, complement) = match kind {
        ElementaryKind::III => {
            if h1.contains(Element::ZERO) {
                return Err(Error::Construction("type III needs 0 outside H1".into()));
            }
            let h2 = h1.union(&zero)?.complement();
            if h1.is_empty() || h2.is_empty() {
                return Err(Error::Construction(
                    "type III needs H1, H2 non-empty".into(),
                ));
            }
            let a = h1.union(&zero)?.translate(g1);
            let b = h2.union(&zero)?.translate(g2);
            (a, b, SetF2::empty(ctx))
        }
        ElementaryKind::IV => {
            let h2 = h1.complement();
            if h1.is_empty() || h2.is_empty() {
                return Err(Error::Construction("type IV needs H1, H2 non-empty".into()));
            }
            if !group::period(h1).is_trivial() || !group::period(&h2).is_trivial() {
                return Err(Error::Construction("type IV needs H1, H2 aperiodic".into()));
            }
            let a = h1.translate(g1);
            let b = h2.translate(g2);
            if group::mu(&a, &b)? < 2 {
                return Err(Error::Construction("type IV needs mu >= 2".into()));
            }
            (a, b, SetF2::singleton(ctx, g1 ^ g2)?)
        }
        other => {
            return Err(Error::Parameter(format!(
                "only types III and IV are built, got {other:?}"
            )))
        }
    };
    match structure::classify_elementary(&a, &b)? {
        Some(w) if w.kind() == kind => {}
        found => {
            return Err(Error::Construction(format!(
                "pair classifies as {:?}, not {kind:?}",
                found.map(|w| w.kind())
            )))
        }
    }
    let predicted = predicted_from(a.len(), b.len(), complement)?;
    Ok(ConstructionOutput {
        family: "elementary",
        a,
        b,
        predicted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: u32, elems: &[u32]) -> SetF2 {
        SetF2::from_elements(GroupCtx::new(n).unwrap(), elems.iter().copied()).unwrap()
    }

    fn e(x: u32) -> Element {
        Element(x)
    }

    #[test]
    fn noncoset_rank_one() {
        let out = build_noncoset_complement(1, &set(1, &[0]), e(0)).unwrap();
        assert_eq!(out.a.rank(), 4);
        assert_eq!((out.a.len(), out.b.len()), (7, 9));
        assert_eq!(out.predicted.size_sumset, 15);
        assert_eq!(out.predicted.complement, set(4, &[8]));
        out.verify().unwrap();
    }

    #[test]
    fn noncoset_rank_two() {
        let out = build_noncoset_complement(2, &set(2, &[0, 1]), e(0)).unwrap();
        assert_eq!((out.a.len(), out.b.len()), (13, 18));
        assert_eq!(out.predicted.size_sumset, 30);
        assert!(out.predicted.complement_is_coset);
        out.verify().unwrap();
        let out = build_noncoset_complement(2, &set(2, &[0]), e(0)).unwrap();
        assert!(!out.predicted.complement_is_coset);
        assert_eq!(out.predicted.complement_span_index, Some(8));
        out.verify().unwrap();
    }

    #[test]
    fn noncoset_empty_f0_flags_coset() {
        let out = build_noncoset_complement(1, &set(1, &[]), e(0)).unwrap();
        assert_eq!(out.b.len(), 8);
        assert_eq!(out.predicted.complement, set(4, &[0, 8]));
        assert!(out.predicted.complement_is_coset);
        out.verify().unwrap();
    }

    #[test]
    fn noncoset_rejects_full_f0() {
        assert!(matches!(
            build_noncoset_complement(1, &set(1, &[0, 1]), e(0)),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn noncoset_shift_moves_complement() {
        let out = build_noncoset_complement(2, &set(2, &[0]), e(5)).unwrap();
        out.verify().unwrap();
        assert_eq!(out.predicted.size_sumset, out.a.len() + out.b.len() - 1);
    }

    #[test]
    fn tight_examples() {
        let out = build_tight_extremal(3, 1, e(0), e(0)).unwrap();
        assert_eq!((out.a.len(), out.b.len()), (8, 8));
        assert_eq!(out.predicted.size_sumset, 14);
        assert_eq!(out.predicted.complement, set(4, &[0, 8]));
        assert_eq!(out.predicted.complement_span_index, Some(8));
        out.verify().unwrap();

        let out = build_tight_extremal(4, 0, e(3), e(6)).unwrap();
        assert_eq!(out.b.len(), 11);
        assert_eq!(out.predicted.complement, set(4, &[5]));
        out.verify().unwrap();

        let out = build_tight_extremal(3, 2, e(5), e(0)).unwrap();
        assert_eq!((out.a.len(), out.b.len()), (16, 16));
        assert_eq!(out.predicted.size_sumset, 28);
        out.verify().unwrap();

        assert!(build_tight_extremal(2, 1, e(0), e(0)).is_err());
    }

    #[test]
    fn necessity_examples() {
        let out = build_span_necessity(1, 4).unwrap();
        assert_eq!(out.b, set(4, &[0, 8]));
        assert_eq!(out.a.len(), 8);
        assert_eq!(out.predicted.size_sumset, 8);
        out.verify().unwrap();

        let out = build_span_necessity(2, 3).unwrap();
        assert_eq!(out.a, set(3, &[0, 4]));
        assert_eq!(out.b.len(), 6);
        out.verify().unwrap();

        let out = build_span_necessity(1, 3).unwrap();
        assert_eq!(out.b, set(3, &[0]));
        assert_eq!(out.a, set(3, &[0, 1, 2, 4]));
        out.verify().unwrap();

        assert!(build_span_necessity(1, 2).is_err());
        assert!(build_span_necessity(2, 1).is_err());
        assert!(build_span_necessity(3, 4).is_err());
    }

    #[test]
    fn elementary_examples() {
        let out = build_elementary(ElementaryKind::III, &set(3, &[1, 2, 4]), e(0), e(0)).unwrap();
        assert_eq!(out.a, set(3, &[0, 1, 2, 4]));
        assert_eq!(out.b, set(3, &[0, 3, 5, 6, 7]));
        out.verify().unwrap();

        let out = build_elementary(ElementaryKind::IV, &set(3, &[0, 1, 2, 4]), e(0), e(0)).unwrap();
        assert_eq!(out.b, set(3, &[3, 5, 6, 7]));
        assert_eq!(out.predicted.complement, set(3, &[0]));
        out.verify().unwrap();

        assert!(matches!(
            build_elementary(ElementaryKind::IV, &set(3, &[0, 1]), e(0), e(0)),
            Err(Error::Construction(_))
        ));
    }

    #[test]
    fn tampered_prediction_is_caught() {
        let mut out = build_tight_extremal(3, 1, e(0), e(0)).unwrap();
        out.predicted.size_sumset += 1;
        assert_eq!(out.verify(), Err("size_sumset"));
    }
}
