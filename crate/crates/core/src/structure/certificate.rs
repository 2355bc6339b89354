use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use super::elementary::{check_elementary, classify_elementary, ElementaryWitness};
use super::kemperman_condition;
use crate::error::{ensure_same_rank, Error, Result};
use crate::group::{self, cached_subgroups, Element, SetF2, Subgroup};

/// Recursive structure certificate for a pair with `|A+B| < |A|+|B|`.
///
/// Children live in strictly smaller groups: a `Deperiodize` child is the
/// image pair in `G/H`, a `LevDecomposition` child is `(A0, B0)` translated
/// into `F` and written in the coordinates of `F`'s basis. Tree depth is
/// therefore at most the rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Elementary {
        rank: u32,
        witness: ElementaryWitness,
    },
    /// Kemperman's condition fails; `H = pi(A+B)` is non-zero.
    Deperiodize {
        rank: u32,
        #[serde(rename = "H_basis")]
        h_basis: Vec<Element>,
        child: Box<Certificate>,
    },
    LevDecomposition {
        rank: u32,
        #[serde(rename = "F_basis")]
        f_basis: Vec<Element>,
        #[serde(rename = "A0")]
        a0: SetF2,
        #[serde(rename = "B0")]
        b0: SetF2,
        /// Witness that `(phi_F(A), phi_F(B))` is elementary in `G/F`.
        witness: ElementaryWitness,
        child: Box<Certificate>,
    },
}

impl Certificate {
    pub fn rank(&self) -> u32 {
        match self {
            Self::Elementary { rank, .. }
            | Self::Deperiodize { rank, .. }
            | Self::LevDecomposition { rank, .. } => *rank,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Self::Elementary { .. } => 1,
            Self::Deperiodize { child, .. } | Self::LevDecomposition { child, .. } => {
                1 + child.depth()
            }
        }
    }

    /// Short label of the root node, e.g. `elementary-IV` or `lev`.
    pub fn class_name(&self) -> String {
        match self {
            Self::Elementary { witness, .. } => format!("elementary-{:?}", witness.kind()),
            Self::Deperiodize { .. } => "deperiodize".into(),
            Self::LevDecomposition { .. } => "lev".into(),
        }
    }

    pub fn child(&self) -> Option<&Certificate> {
        match self {
            Self::Elementary { .. } => None,
            Self::Deperiodize { child, .. } | Self::LevDecomposition { child, .. } => Some(child),
        }
    }

    /// Canonical single-line JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("certificate serializes")
    }

    pub fn from_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::Parse {
            offset: e.column().saturating_sub(1),
            message: e.to_string(),
        })
    }
}

/// `(F, A0, B0)` with the quotient witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevDecomposition {
    pub subgroup: Subgroup,
    pub a0: SetF2,
    pub b0: SetF2,
    pub quotient_witness: ElementaryWitness,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassifyOutcome {
    pub small_sumset: bool,
    pub kemperman_condition: bool,
    pub certificate: Option<Certificate>,
    pub failure_reason: Option<String>,
}

fn is_small(a: &SetF2, b: &SetF2, s: &SetF2) -> bool {
    s.len() < a.len() + b.len()
}

/// Searches proper non-zero subgroups `F` by ascending index for a
/// decomposition with
///
/// * `A0`, `B0` each inside one `F`-coset, `|A0+B0| = |A0|+|B0|-1`, and
///   `(A0, B0)` satisfying Kemperman's condition;
/// * `A \ A0`, `B \ B0` unions of `F`-cosets;
/// * `(phi_F(A), phi_F(B))` elementary, with `phi_F(A0) + phi_F(B0)`
///   represented exactly once.
///
/// `A0` and `B0` are forced by the coset pair behind a uniquely
/// represented sum, so the search only enumerates `F` and that sum.
pub fn find_lev_decomposition(a: &SetF2, b: &SetF2) -> Result<Option<LevDecomposition>> {
    ensure_same_rank(a.rank(), b.rank())?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let s = group::sumset(a, b)?;
    if !is_small(a, b, &s) {
        return Err(Error::Precondition("|A+B| >= |A|+|B|".into()));
    }
    if !kemperman_condition(a, b)? {
        return Err(Error::Precondition("Kemperman's condition fails".into()));
    }
    if classify_elementary(a, b)?.is_some() {
        return Err(Error::Precondition("the pair is elementary".into()));
    }
    let n = a.rank();
    for dim in (1..n).rev() {
        for f in cached_subgroups(a.ctx(), dim)?.iter() {
            if let Some(found) = try_subgroup(a, b, f)? {
                return Ok(Some(found));
            }
        }
    }
    Ok(None)
}

fn try_subgroup(a: &SetF2, b: &SetF2, f: &Subgroup) -> Result<Option<LevDecomposition>> {
    let qa = group::quotient_map(a, f)?;
    let qb = group::quotient_map(b, f)?;
    let Some(witness) = classify_elementary(&qa, &qb)? else {
        return Ok(None);
    };
    let counts = group::representation_counts(&qa, &qb)?;
    for (s, _) in counts.iter().enumerate().filter(|(_, &c)| c == 1) {
        let s = Element(s as u32);
        let x = qa
            .iter()
            .find(|&x| qb.contains(x ^ s))
            .expect("represented sum has a representation");
        let y = x ^ s;
        let a0 = a.intersection(&group::lift(&SetF2::singleton(qa.ctx(), x)?, f)?)?;
        let b0 = b.intersection(&group::lift(&SetF2::singleton(qb.ctx(), y)?, f)?)?;
        if !group::is_union_of_cosets(&a.difference(&a0)?, f)?
            || !group::is_union_of_cosets(&b.difference(&b0)?, f)?
        {
            continue;
        }
        let s0 = group::sumset(&a0, &b0)?;
        if s0.len() + 1 != a0.len() + b0.len() || !kemperman_condition(&a0, &b0)? {
            continue;
        }
        return Ok(Some(LevDecomposition {
            subgroup: f.clone(),
            a0,
            b0,
            quotient_witness: witness,
        }));
    }
    Ok(None)
}

fn build(a: &SetF2, b: &SetF2) -> std::result::Result<Certificate, String> {
    let rank = a.rank();
    let fail = |e: Error| e.to_string();
    if !kemperman_condition(a, b).map_err(fail)? {
        let sum = group::sumset(a, b).map_err(fail)?;
        let h = group::period(&sum).subgroup;
        let qa = group::quotient_map(a, &h).map_err(fail)?;
        let qb = group::quotient_map(b, &h).map_err(fail)?;
        return Ok(Certificate::Deperiodize {
            rank,
            h_basis: h.basis().to_vec(),
            child: Box::new(build(&qa, &qb)?),
        });
    }
    if let Some(witness) = classify_elementary(a, b).map_err(fail)? {
        return Ok(Certificate::Elementary { rank, witness });
    }
    let lev = find_lev_decomposition(a, b)
        .map_err(fail)?
        .ok_or_else(|| {
            format!("no decomposition found for A = {a}, B = {b}, although |A+B| < |A|+|B| and Kemperman's condition holds")
        })?;
    let child_a = lev.subgroup.coset_coordinates(&lev.a0).map_err(fail)?;
    let child_b = lev.subgroup.coset_coordinates(&lev.b0).map_err(fail)?;
    Ok(Certificate::LevDecomposition {
        rank,
        f_basis: lev.subgroup.basis().to_vec(),
        child: Box::new(build(&child_a, &child_b)?),
        a0: lev.a0,
        b0: lev.b0,
        witness: lev.quotient_witness,
    })
}

/// Builds the structure certificate of a pair, when `|A+B| < |A|+|B|`.
pub fn certify(a: &SetF2, b: &SetF2) -> Result<ClassifyOutcome> {
    ensure_same_rank(a.rank(), b.rank())?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let s = group::sumset(a, b)?;
    let small_sumset = is_small(a, b, &s);
    let kemperman = kemperman_condition(a, b)?;
    if !small_sumset {
        return Ok(ClassifyOutcome {
            small_sumset,
            kemperman_condition: kemperman,
            certificate: None,
            failure_reason: None,
        });
    }
    let (certificate, failure_reason) = match build(a, b) {
        Ok(c) => (Some(c), None),
        Err(reason) => (None, Some(reason)),
    };
    Ok(ClassifyOutcome {
        small_sumset,
        kemperman_condition: kemperman,
        certificate,
        failure_reason,
    })
}

/// Why a certificate was rejected.
#[derive(Clone, Debug, PartialEq, Eq, ThisError)]
#[error("certificate rejected at depth {depth} ({node} node): {clause}")]
pub struct Rejection {
    pub depth: usize,
    pub node: &'static str,
    pub clause: String,
}

struct Checker {
    depth: usize,
    node: &'static str,
}

impl Checker {
    fn require(&self, cond: bool, clause: impl Into<String>) -> std::result::Result<(), Rejection> {
        if cond {
            Ok(())
        } else {
            Err(self.reject(clause))
        }
    }

    fn reject(&self, clause: impl Into<String>) -> Rejection {
        Rejection {
            depth: self.depth,
            node: self.node,
            clause: clause.into(),
        }
    }

    fn ok<T>(&self, r: Result<T>, clause: &str) -> std::result::Result<T, Rejection> {
        r.map_err(|e| self.reject(format!("{clause}: {e}")))
    }
}

/// Re-checks every clause at every node from the raw sets.
pub fn check_certificate(
    a: &SetF2,
    b: &SetF2,
    cert: &Certificate,
) -> std::result::Result<(), Rejection> {
    check_node(a, b, cert, 0)
}

pub fn verify_certificate(a: &SetF2, b: &SetF2, cert: &Certificate) -> bool {
    check_certificate(a, b, cert).is_ok()
}

fn check_node(
    a: &SetF2,
    b: &SetF2,
    cert: &Certificate,
    depth: usize,
) -> std::result::Result<(), Rejection> {
    let node = match cert {
        Certificate::Elementary { .. } => "elementary",
        Certificate::Deperiodize { .. } => "deperiodize",
        Certificate::LevDecomposition { .. } => "lev_decomposition",
    };
    let ck = Checker { depth, node };
    ck.require(a.rank() == b.rank(), "A and B have the same rank")?;
    ck.require(cert.rank() == a.rank(), "certificate rank matches the pair")?;
    ck.require(!a.is_empty() && !b.is_empty(), "A and B non-empty")?;
    let ctx = a.ctx();
    let sum = ck.ok(group::sumset(a, b), "sumset")?;
    ck.require(sum.len() < a.len() + b.len(), "|A+B| < |A|+|B|")?;

    match cert {
        Certificate::Elementary { witness, .. } => {
            check_elementary(a, b, witness).map_err(|clause| ck.reject(clause))
        }
        Certificate::Deperiodize { h_basis, child, .. } => {
            let h = ck.ok(Subgroup::from_canonical_basis(ctx, h_basis), "H_basis")?;
            ck.require(h.dim() > 0, "H non-zero")?;
            ck.require(h == group::period(&sum).subgroup, "H = pi(A+B)")?;
            let mu = ck.ok(group::mu(a, b), "mu")?;
            ck.require(mu >= 2, "Kemperman's condition fails (mu >= 2)")?;
            let qa = ck.ok(group::quotient_map(a, &h), "quotient")?;
            let qb = ck.ok(group::quotient_map(b, &h), "quotient")?;
            ck.require(
                child.rank() == h.quotient_ctx().rank(),
                "child rank = rank of G/H",
            )?;
            check_node(&qa, &qb, child, depth + 1)
        }
        Certificate::LevDecomposition {
            f_basis,
            a0,
            b0,
            witness,
            child,
            ..
        } => {
            let f = ck.ok(Subgroup::from_canonical_basis(ctx, f_basis), "F_basis")?;
            ck.require(
                f.dim() > 0 && f.dim() < ctx.rank(),
                "F is a proper non-zero subgroup",
            )?;
            ck.require(
                a0.rank() == ctx.rank() && b0.rank() == ctx.rank(),
                "A0, B0 rank",
            )?;
            ck.require(!a0.is_empty() && !b0.is_empty(), "A0, B0 non-empty")?;
            ck.require(a0.is_subset(a), "A0 ⊆ A")?;
            ck.require(b0.is_subset(b), "B0 ⊆ B")?;
            let qa0 = ck.ok(group::quotient_map(a0, &f), "quotient")?;
            let qb0 = ck.ok(group::quotient_map(b0, &f), "quotient")?;
            ck.require(qa0.len() == 1, "(i) A0 lies in one F-coset")?;
            ck.require(qb0.len() == 1, "(i) B0 lies in one F-coset")?;
            let s0 = ck.ok(group::sumset(a0, b0), "sumset")?;
            ck.require(
                s0.len() + 1 == a0.len() + b0.len(),
                "(i) |A0+B0| = |A0|+|B0|-1",
            )?;
            let kc = ck.ok(kemperman_condition(a0, b0), "Kemperman")?;
            ck.require(kc, "(i) (A0, B0) satisfies Kemperman's condition")?;
            let rest_a = ck.ok(a.difference(a0), "difference")?;
            let rest_b = ck.ok(b.difference(b0), "difference")?;
            ck.require(
                ck.ok(group::is_union_of_cosets(&rest_a, &f), "cosets")?,
                "(ii) A \\ A0 is a union of F-cosets",
            )?;
            ck.require(
                ck.ok(group::is_union_of_cosets(&rest_b, &f), "cosets")?,
                "(ii) B \\ B0 is a union of F-cosets",
            )?;
            let qa = ck.ok(group::quotient_map(a, &f), "quotient")?;
            let qb = ck.ok(group::quotient_map(b, &f), "quotient")?;
            check_elementary(&qa, &qb, witness)
                .map_err(|clause| ck.reject(format!("(iii) quotient pair elementary: {clause}")))?;
            let x = qa0.min().expect("singleton");
            let y = qb0.min().expect("singleton");
            let reps = ck.ok(group::nu(&qa, &qb, x ^ y), "nu")?;
            ck.require(
                reps == 1,
                "(iii) phi(A0)+phi(B0) has a unique representation",
            )?;
            ck.require(child.rank() == f.dim(), "child rank = dim F")?;
            let ca = ck.ok(f.coset_coordinates(a0), "coordinates")?;
            let cb = ck.ok(f.coset_coordinates(b0), "coordinates")?;
            check_node(&ca, &cb, child, depth + 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupCtx;
    use crate::structure::ElementaryKind;

    fn set(n: u32, elems: &[u32]) -> SetF2 {
        SetF2::from_elements(GroupCtx::new(n).unwrap(), elems.iter().copied()).unwrap()
    }

    /// `({h1,h2,h3} + F) ∪ {0}` and `({h1+h2, h2+h3, h1+h3, h1+h2+h3} + F) ∪ {0}`
    /// in `F_2^4` with `F = {0, 8}`.
    fn noncoset_pair() -> (SetF2, SetF2) {
        let a = set(4, &[0, 1, 2, 4, 9, 10, 12]);
        let b = set(4, &[0, 3, 5, 6, 7, 11, 13, 14, 15]);
        (a, b)
    }

    #[test]
    fn certify_type_one() {
        let out = certify(&set(2, &[0]), &set(2, &[0, 1, 2])).unwrap();
        assert!(out.small_sumset && out.kemperman_condition);
        let cert = out.certificate.unwrap();
        assert_eq!(cert.class_name(), "elementary-I");
        assert!(verify_certificate(
            &set(2, &[0]),
            &set(2, &[0, 1, 2]),
            &cert
        ));
    }

    #[test]
    fn certify_type_four() {
        let (a, b) = (set(3, &[0, 1, 2, 4]), set(3, &[3, 5, 6, 7]));
        let cert = certify(&a, &b).unwrap().certificate.unwrap();
        assert_eq!(cert.class_name(), "elementary-IV");
        assert!(verify_certificate(&a, &b, &cert));
    }

    #[test]
    fn certify_noncoset_construction() {
        let (a, b) = noncoset_pair();
        let out = certify(&a, &b).unwrap();
        let cert = out.certificate.expect("certificate");
        match &cert {
            Certificate::LevDecomposition {
                f_basis,
                a0,
                b0,
                witness,
                ..
            } => {
                assert_eq!(f_basis, &vec![Element(8)]);
                assert_eq!(a0, &set(4, &[0]));
                assert_eq!(b0, &set(4, &[0]));
                assert_eq!(witness.kind(), ElementaryKind::III);
            }
            other => panic!("expected a decomposition, got {other:?}"),
        }
        check_certificate(&a, &b, &cert).unwrap();
        assert!(cert.depth() <= 4);
    }

    #[test]
    fn find_lev_preconditions() {
        let (a, b) = (set(3, &[0, 1, 2, 4]), set(3, &[3, 5, 6, 7]));
        assert!(matches!(
            find_lev_decomposition(&a, &b),
            Err(Error::Precondition(_))
        ));
        let (a, b) = (set(3, &[0, 1, 2]), set(3, &[0, 4, 7]));
        assert!(matches!(
            find_lev_decomposition(&a, &b),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn deperiodize_when_kemperman_fails() {
        let a = set(2, &[0, 1]);
        let out = certify(&a, &a).unwrap();
        assert!(out.small_sumset && !out.kemperman_condition);
        let cert = out.certificate.unwrap();
        assert_eq!(cert.class_name(), "deperiodize");
        assert_eq!(cert.child().unwrap().class_name(), "elementary-I");
        assert!(verify_certificate(&a, &a, &cert));
    }

    #[test]
    fn large_sumset_has_no_certificate() {
        let out = certify(&set(3, &[0, 1, 2]), &set(3, &[0, 4, 7])).unwrap();
        assert!(!out.small_sumset);
        assert!(out.certificate.is_none());
    }

    #[test]
    fn tampering_is_rejected() {
        let (a, b) = noncoset_pair();
        let cert = certify(&a, &b).unwrap().certificate.unwrap();
        let mut bad = cert.clone();
        if let Certificate::LevDecomposition { a0, .. } = &mut bad {
            *a0 = set(4, &[0, 1]);
        }
        let err = check_certificate(&a, &b, &bad).unwrap_err();
        assert!(err.clause.starts_with("(i)"), "{err}");

        let mut bad = cert.clone();
        if let Certificate::LevDecomposition { f_basis, .. } = &mut bad {
            f_basis.push(Element(1));
        }
        assert!(!verify_certificate(&a, &b, &bad));
    }

    #[test]
    fn json_round_trip() {
        let (a, b) = noncoset_pair();
        let cert = certify(&a, &b).unwrap().certificate.unwrap();
        let json = cert.to_json();
        assert!(json
            .starts_with(r#"{"kind":"lev_decomposition","rank":4,"F_basis":[8],"A0":"n=4; {0}""#));
        let back = Certificate::from_json(&json).unwrap();
        assert_eq!(back, cert);
        assert_eq!(back.to_json(), json);
        assert!(Certificate::from_json("{\"kind\":\"nope\"}").is_err());
    }
}
