use serde::{Deserialize, Serialize};

use crate::error::{ensure_same_rank, Error, Result};
use crate::group::{self, Element, SetF2, Subgroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ElementaryKind {
    I,
    II,
    III,
    IV,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// Data exhibiting that a pair `(A, B)` is elementary of one of the four
/// Kemperman types. Subtraction equals addition here, so `g2 - H2` is
/// written `g2 + H2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ElementaryWitness {
    /// One summand is the singleton `{element}`; `side` is `A` whenever
    /// `|A| = 1`.
    I { side: Side, element: Element },
    /// `A = {anchor_a + j d : 1 <= j <= |A|}`, likewise `B`, with
    /// `ord(d) >= |A| + |B| - 1`.
    II {
        d: Element,
        anchor_a: Element,
        anchor_b: Element,
    },
    /// `A = g1 + (H1 ∪ {0})`, `B = g2 + (H2 ∪ {0})`, `H = H1 ⊔ H2 ⊔ {0}`,
    /// and `c = g1 + g2` is the only element of `A + B` with one
    /// representation.
    III {
        g1: Element,
        g2: Element,
        #[serde(rename = "H_basis")]
        h_basis: Vec<Element>,
        #[serde(rename = "H1")]
        h1: SetF2,
        #[serde(rename = "H2")]
        h2: SetF2,
        c: Element,
    },
    /// `A = g1 + H1`, `B = g2 + H2`, `H = H1 ⊔ H2` with both parts
    /// aperiodic, and `mu_{A,B} >= 2`.
    IV {
        g1: Element,
        g2: Element,
        #[serde(rename = "H_basis")]
        h_basis: Vec<Element>,
        #[serde(rename = "H1")]
        h1: SetF2,
        #[serde(rename = "H2")]
        h2: SetF2,
    },
}

impl ElementaryWitness {
    pub fn kind(&self) -> ElementaryKind {
        match self {
            Self::I { .. } => ElementaryKind::I,
            Self::II { .. } => ElementaryKind::II,
            Self::III { .. } => ElementaryKind::III,
            Self::IV { .. } => ElementaryKind::IV,
        }
    }
}

fn element_order(d: Element) -> u64 {
    if d.is_zero() {
        1
    } else {
        2
    }
}

/// `anchor + j d` in exponent 2.
fn progression_term(anchor: Element, d: Element, j: usize) -> Element {
    if j % 2 == 1 {
        anchor ^ d
    } else {
        anchor
    }
}

/// True iff `p = {anchor + d, anchor + 2d, ..., anchor + |p| d}` with
/// distinct terms.
fn is_progression(p: &SetF2, anchor: Element, d: Element) -> bool {
    let m = p.len();
    if m == 0 || !p.ctx().contains(anchor) || !p.ctx().contains(d) {
        return false;
    }
    let terms: Vec<Element> = (1..=m).map(|j| progression_term(anchor, d, j)).collect();
    let mut distinct = terms.clone();
    distinct.sort_unstable();
    distinct.dedup();
    distinct.len() == m && terms.iter().all(|&t| p.contains(t))
}

fn progression_anchor(p: &SetF2, d: Element) -> Option<Element> {
    let mut candidates: Vec<Element> = p.iter().map(|x| x ^ d).collect();
    candidates.sort_unstable();
    candidates.into_iter().find(|&g| is_progression(p, g, d))
}

/// Type II search. In exponent 2 every non-zero `d` has order 2, so this
/// only ever succeeds when one side is a singleton.
pub(crate) fn find_progression_witness(a: &SetF2, b: &SetF2) -> Option<ElementaryWitness> {
    let needed = (a.len() + b.len()) as u64 - 1;
    let differences = |p: &SetF2| -> Option<Vec<Element>> {
        match p.len() {
            1 => Some(p.ctx().elements().collect()),
            2 => {
                let mut it = p.iter();
                let (x, y) = (it.next()?, it.next()?);
                Some(vec![x ^ y])
            }
            _ => None,
        }
    };
    let da = differences(a)?;
    let db = differences(b)?;
    da.into_iter()
        .filter(|d| db.contains(d) && element_order(*d) >= needed)
        .find_map(|d| {
            Some(ElementaryWitness::II {
                d,
                anchor_a: progression_anchor(a, d)?,
                anchor_b: progression_anchor(b, d)?,
            })
        })
}

/// Linear span of `(A - A) ∪ (B - B)`; the only candidate for `H` in
/// types III and IV once both sides have at least two elements.
fn difference_span(a: &SetF2, b: &SetF2) -> Result<Subgroup> {
    let (a0, b0) = (
        a.min().ok_or(Error::EmptySet)?,
        b.min().ok_or(Error::EmptySet)?,
    );
    Subgroup::from_generators(
        a.ctx(),
        a.iter().map(|x| x ^ a0).chain(b.iter().map(|y| y ^ b0)),
    )
}

fn with_zero(s: &SetF2) -> SetF2 {
    let mut out = s.clone();
    out.insert_unchecked(Element::ZERO);
    out
}

fn without_zero(s: &SetF2) -> SetF2 {
    let zero = SetF2::singleton(s.ctx(), Element::ZERO).expect("0 is in every group");
    s.difference(&zero).expect("same rank")
}

fn find_type_three(a: &SetF2, b: &SetF2) -> Result<Option<ElementaryWitness>> {
    if a.len() < 2 || b.len() < 2 {
        return Ok(None);
    }
    let h = difference_span(a, b)?;
    if h.order() != a.len() + b.len() - 1 {
        return Ok(None);
    }
    let counts = group::representation_counts(a, b)?;
    let mut singles = counts.iter().enumerate().filter(|(_, &c)| c == 1);
    let c = match (singles.next(), singles.next()) {
        (Some((c, _)), None) => Element(c as u32),
        _ => return Ok(None),
    };
    for g1 in a.iter() {
        let g2 = c ^ g1;
        if !b.contains(g2) {
            continue;
        }
        let h1 = without_zero(&a.translate(g1));
        let h2 = without_zero(&b.translate(g2));
        if h1.is_disjoint(&h2)
            && h1.is_subset(h.members())
            && h2.is_subset(h.members())
            && with_zero(&h1.union(&h2)?) == *h.members()
        {
            return Ok(Some(ElementaryWitness::III {
                g1,
                g2,
                h_basis: h.basis().to_vec(),
                h1,
                h2,
                c,
            }));
        }
    }
    Ok(None)
}

fn find_type_four(a: &SetF2, b: &SetF2) -> Result<Option<ElementaryWitness>> {
    let h = difference_span(a, b)?;
    if h.order() != a.len() + b.len() {
        return Ok(None);
    }
    if !group::period(a).is_trivial() || !group::period(b).is_trivial() || group::mu(a, b)? < 2 {
        return Ok(None);
    }
    let a0 = a.min().expect("non-empty");
    let b0 = b.min().expect("non-empty");
    for g1 in h.members().translate(a0).iter() {
        let h1 = a.translate(g1);
        let h2 = h.members().difference(&h1)?;
        if h2.len() != b.len() {
            continue;
        }
        let mut candidates: Vec<Element> = h2.iter().map(|y| b0 ^ y).collect();
        candidates.sort_unstable();
        if let Some(g2) = candidates.into_iter().find(|&g2| b.translate(g2) == h2) {
            return Ok(Some(ElementaryWitness::IV {
                g1,
                g2,
                h_basis: h.basis().to_vec(),
                h1,
                h2,
            }));
        }
    }
    Ok(None)
}

/// Returns a witness for the lowest-numbered elementary type that applies.
pub fn classify_elementary(a: &SetF2, b: &SetF2) -> Result<Option<ElementaryWitness>> {
    ensure_same_rank(a.rank(), b.rank())?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    if a.len() == 1 {
        return Ok(Some(ElementaryWitness::I {
            side: Side::A,
            element: a.min().expect("singleton"),
        }));
    }
    if b.len() == 1 {
        return Ok(Some(ElementaryWitness::I {
            side: Side::B,
            element: b.min().expect("singleton"),
        }));
    }
    if let Some(w) = find_progression_witness(a, b) {
        return Ok(Some(w));
    }
    if let Some(w) = find_type_three(a, b)? {
        return Ok(Some(w));
    }
    find_type_four(a, b)
}

fn require(cond: bool, clause: &'static str) -> std::result::Result<(), &'static str> {
    if cond {
        Ok(())
    } else {
        Err(clause)
    }
}

fn witness_subgroup(a: &SetF2, basis: &[Element]) -> std::result::Result<Subgroup, &'static str> {
    Subgroup::from_canonical_basis(a.ctx(), basis).map_err(|_| "H_basis is not a canonical basis")
}

/// Re-derives every clause of the claimed type directly from the sets.
/// Returns the name of the first failing clause.
pub fn check_elementary(
    a: &SetF2,
    b: &SetF2,
    w: &ElementaryWitness,
) -> std::result::Result<(), &'static str> {
    require(a.rank() == b.rank(), "A and B have different ranks")?;
    require(!a.is_empty() && !b.is_empty(), "A and B must be non-empty")?;
    match w {
        ElementaryWitness::I { side, element } => {
            let s = match side {
                Side::A => a,
                Side::B => b,
            };
            require(s.len() == 1, "(I) min{|A|,|B|} = 1")?;
            require(s.contains(*element), "(I) singleton element")?;
            // witnesses are canonical: side B only when A is not a singleton
            require(
                *side == Side::A || a.len() > 1,
                "(I) side is A when |A| = 1",
            )
        }
        ElementaryWitness::II {
            d,
            anchor_a,
            anchor_b,
        } => {
            require(
                element_order(*d) >= (a.len() + b.len()) as u64 - 1,
                "(II) ord(d) >= |A|+|B|-1",
            )?;
            require(is_progression(a, *anchor_a, *d), "(II) A is a progression")?;
            require(is_progression(b, *anchor_b, *d), "(II) B is a progression")
        }
        ElementaryWitness::III {
            g1,
            g2,
            h_basis,
            h1,
            h2,
            c,
        } => {
            let h = witness_subgroup(a, h_basis)?;
            require(
                h1.rank() == a.rank() && h2.rank() == a.rank(),
                "H1, H2 rank",
            )?;
            require(!h1.is_empty() && !h2.is_empty(), "(III) H1, H2 non-empty")?;
            require(
                !h1.contains(Element::ZERO) && !h2.contains(Element::ZERO),
                "(III) 0 not in H1, H2",
            )?;
            require(h1.is_disjoint(h2), "(III) H1, H2 disjoint")?;
            let covered = with_zero(&h1.union(h2).map_err(|_| "H1, H2 rank")?);
            require(covered == *h.members(), "(III) H = H1 ∪ H2 ∪ {0}")?;
            require(
                a.ctx().contains(*g1) && a.ctx().contains(*g2),
                "g1, g2 in G",
            )?;
            require(
                with_zero(h1).translate(*g1) == *a,
                "(III) A = g1 + (H1 ∪ {0})",
            )?;
            require(
                with_zero(h2).translate(*g2) == *b,
                "(III) B = g2 + (H2 ∪ {0})",
            )?;
            require(*c == *g1 ^ *g2, "(III) c = g1 + g2")?;
            let counts = group::representation_counts(a, b).map_err(|_| "rank")?;
            let unique =
                counts
                    .iter()
                    .enumerate()
                    .all(|(g, &n)| if g == c.0 as usize { n == 1 } else { n != 1 });
            require(unique, "(III) c is the unique element with nu = 1")
        }
        ElementaryWitness::IV {
            g1,
            g2,
            h_basis,
            h1,
            h2,
        } => {
            let h = witness_subgroup(a, h_basis)?;
            require(
                h1.rank() == a.rank() && h2.rank() == a.rank(),
                "H1, H2 rank",
            )?;
            require(!h1.is_empty() && !h2.is_empty(), "(IV) H1, H2 non-empty")?;
            require(h1.is_disjoint(h2), "(IV) H1, H2 disjoint")?;
            require(
                h1.union(h2).map_err(|_| "H1, H2 rank")? == *h.members(),
                "(IV) H = H1 ∪ H2",
            )?;
            require(
                group::period(h1).is_trivial() && group::period(h2).is_trivial(),
                "(IV) H1, H2 aperiodic",
            )?;
            require(
                a.ctx().contains(*g1) && a.ctx().contains(*g2),
                "g1, g2 in G",
            )?;
            require(h1.translate(*g1) == *a, "(IV) A = g1 + H1")?;
            require(h2.translate(*g2) == *b, "(IV) B = g2 + H2")?;
            require(group::mu(a, b).map_err(|_| "rank")? >= 2, "(IV) mu >= 2")
        }
    }
}

pub fn verify_elementary(a: &SetF2, b: &SetF2, w: &ElementaryWitness) -> bool {
    check_elementary(a, b, w).is_ok()
}
