//! WebAssembly bindings for the page in `www/`.
//!
//! Each export takes set literals or JSON and returns a JSON string. The
//! plain functions underneath are callable from native code and tests.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use f2sumset::constructions::{self, ConstructionOutput};
use f2sumset::structure::{self, Certificate, ElementaryKind, ElementaryWitness};
use f2sumset::theorems::{self, Verdict};
use f2sumset::{group, Element, SetF2};

/// Ranks above this are refused; the page draws `2^n` cells per set.
pub const MAX_DEMO_RANK: u32 = 6;

fn parse(name: &str, src: &str) -> Result<SetF2, String> {
    let set: SetF2 = src.parse().map_err(|e| format!("{name}: {e}"))?;
    if set.rank() > MAX_DEMO_RANK {
        return Err(format!("{name}: the demo stops at rank {MAX_DEMO_RANK}"));
    }
    Ok(set)
}

fn to_json(value: &impl Serialize) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

fn elements(s: &SetF2) -> Vec<u32> {
    s.iter().map(Element::bits).collect()
}

#[derive(Serialize)]
struct Verdicts {
    main: Verdict,
    asym: Verdict,
    kneser: Verdict,
    hp: Verdict,
}

#[derive(Serialize)]
struct Analysis {
    rank: u32,
    a: SetF2,
    b: SetF2,
    sumset: Vec<u32>,
    /// Representation count of every group element, indexed by element.
    counts: Vec<u64>,
    mu: u64,
    small_sumset: bool,
    kemperman_condition: bool,
    verdicts: Verdicts,
    elementary: Option<ElementaryWitness>,
    certificate: Option<Certificate>,
    certificate_class: Option<String>,
    failure_reason: Option<String>,
}

/// Sumset, theorem verdicts and structure certificate of a pair.
pub fn analyze_pair(a: &str, b: &str) -> Result<String, String> {
    let (a, b) = (parse("A", a)?, parse("B", b)?);
    let err = |e: f2sumset::Error| e.to_string();
    let sumset = group::sumset(&a, &b).map_err(err)?;
    let outcome = structure::certify(&a, &b).map_err(err)?;
    let analysis = Analysis {
        rank: a.rank(),
        sumset: elements(&sumset),
        counts: group::representation_counts(&a, &b).map_err(err)?,
        mu: group::mu(&a, &b).map_err(err)?,
        small_sumset: outcome.small_sumset,
        kemperman_condition: outcome.kemperman_condition,
        verdicts: Verdicts {
            main: theorems::check_main(&a, &b).map_err(err)?,
            asym: theorems::check_asymmetric(&a, &b, 4).map_err(err)?,
            kneser: theorems::check_kneser_corollary(&a, &b).map_err(err)?,
            hp: theorems::check_hp(&a).map_err(err)?,
        },
        elementary: structure::classify_elementary(&a, &b).map_err(err)?,
        certificate_class: outcome.certificate.as_ref().map(Certificate::class_name),
        certificate: outcome.certificate,
        failure_reason: outcome.failure_reason,
        a,
        b,
    };
    to_json(&analysis)
}

/// Family parameters; unset fields take the command-line defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructParams {
    pub k: Option<u32>,
    pub rank_f: Option<u32>,
    pub f0: Option<String>,
    pub shift: Option<u32>,
    pub g1: Option<u32>,
    pub g2: Option<u32>,
    pub variant: Option<u32>,
    pub n: Option<u32>,
    pub kind: Option<String>,
    pub h1: Option<String>,
}

#[derive(Serialize)]
struct Construction<'a> {
    #[serde(flatten)]
    output: &'a ConstructionOutput,
    verified: bool,
}

fn need<T>(v: Option<T>, name: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("missing parameter {name}"))
}

/// Builds one of the example families from JSON parameters.
pub fn construct_family(family: &str, params: &str) -> Result<String, String> {
    let p: ConstructParams = if params.trim().is_empty() {
        ConstructParams::default()
    } else {
        serde_json::from_str(params).map_err(|e| format!("parameters: {e}"))?
    };
    let el = |v: Option<u32>| Element(v.unwrap_or(0));
    let out = match family {
        "noncoset" => {
            let rank_f = p.rank_f.unwrap_or(1);
            let f0 = match &p.f0 {
                Some(src) => parse("f0", src)?,
                None => parse("f0", &format!("n={rank_f}; {{0}}"))?,
            };
            constructions::build_noncoset_complement(rank_f, &f0, el(p.shift))
        }
        "tight" => constructions::build_tight_extremal(
            need(p.k, "k")?,
            p.rank_f.unwrap_or(0),
            el(p.g1),
            el(p.g2),
        ),
        "necessity" => {
            constructions::build_span_necessity(need(p.variant, "variant")?, need(p.n, "n")?)
        }
        "elementary" => {
            let kind = match need(p.kind.as_deref(), "kind")? {
                "III" => ElementaryKind::III,
                "IV" => ElementaryKind::IV,
                other => return Err(format!("kind must be III or IV, got {other:?}")),
            };
            let h1 = parse("h1", need(p.h1.as_deref(), "h1")?)?;
            constructions::build_elementary(kind, &h1, el(p.g1), el(p.g2))
        }
        other => return Err(format!("unknown family {other:?}")),
    }
    .map_err(|e| e.to_string())?;
    if out.a.rank() > MAX_DEMO_RANK {
        return Err(format!(
            "the construction has rank {}, above the demo limit",
            out.a.rank()
        ));
    }
    to_json(&Construction {
        verified: out.verify().is_ok(),
        output: &out,
    })
}

#[derive(Serialize)]
struct CertificateCheck {
    valid: bool,
    class: String,
    depth: usize,
    rejection: Option<String>,
}

/// Re-verifies a (possibly edited) certificate against a pair.
pub fn check_certificate_json(a: &str, b: &str, cert: &str) -> Result<String, String> {
    let (a, b) = (parse("A", a)?, parse("B", b)?);
    let cert = Certificate::from_json(cert).map_err(|e| format!("certificate: {e}"))?;
    let verdict = structure::check_certificate(&a, &b, &cert);
    to_json(&CertificateCheck {
        valid: verdict.is_ok(),
        class: cert.class_name(),
        depth: cert.depth(),
        rejection: verdict.err().map(|r| r.to_string()),
    })
}

#[wasm_bindgen]
pub fn analyze(a: &str, b: &str) -> Result<String, JsError> {
    analyze_pair(a, b).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn construct(family: &str, params: &str) -> Result<String, JsError> {
    construct_family(family, params).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = checkCertificate)]
pub fn check_certificate(a: &str, b: &str, cert: &str) -> Result<String, JsError> {
    check_certificate_json(a, b, cert).map_err(|e| JsError::new(&e))
}
