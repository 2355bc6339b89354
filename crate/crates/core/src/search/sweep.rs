use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::sync::OnceLock;
use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::canonical::{
    canonical_form, canonical_pair, OrbitTable, PairCanonicalizer, TABLE_MAX_RANK,
};
use super::report::{Accumulator, Exemplar, SweepReport, Tally, Timing, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::group::{self, GroupCtx, SetF2};
use crate::par;
use crate::structure;
use crate::theorems::{self, Outcome, Verdict};

/// Samples per independently seeded chunk in random mode.
pub const RANDOM_CHUNK: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepTheorem {
    Main,
    Hp,
    Asym,
    Kneser,
    /// Certificate census.
    Lev,
}

impl SweepTheorem {
    pub fn name(self) -> &'static str {
        match self {
            Self::Main => "main",
            Self::Hp => "hp",
            Self::Asym => "asym",
            Self::Kneser => "kneser",
            Self::Lev => "lev",
        }
    }
}

impl fmt::Display for SweepTheorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepTheorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "main" => Self::Main,
            "hp" => Self::Hp,
            "asym" => Self::Asym,
            "kneser" => Self::Kneser,
            "lev" => Self::Lev,
            other => return Err(Error::Parameter(format!("unknown theorem {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Every pair (every set for `hp`).
    Exhaustive,
    /// One representative `A` per affine orbit, every `B`, weighted by
    /// orbit size.
    Orbit,
    /// Seeded samples.
    Random,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Exhaustive => "exhaustive",
            Self::Orbit => "orbit",
            Self::Random => "random",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "exhaustive" => Self::Exhaustive,
            "orbit" => Self::Orbit,
            "random" => Self::Random,
            other => return Err(Error::Parameter(format!("unknown mode {other:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepConfig {
    pub theorem: SweepTheorem,
    pub n: u32,
    /// Required for `asym`.
    pub k: Option<u32>,
    pub mode: Mode,
    /// Random mode: number of samples.
    pub budget: u64,
    pub seed: u64,
    /// `None` uses the global thread pool.
    pub threads: Option<usize>,
}

impl SweepConfig {
    /// Exhaustive up to rank 3, orbit mode at rank 4, random above.
    pub fn new(theorem: SweepTheorem, n: u32) -> Self {
        let mode = match n {
            0..=3 => Mode::Exhaustive,
            4 => Mode::Orbit,
            _ => Mode::Random,
        };
        Self {
            theorem,
            n,
            k: None,
            mode,
            budget: 100_000,
            seed: 0,
            threads: None,
        }
    }

    fn validate(&self) -> Result<GroupCtx> {
        let ctx = GroupCtx::new(self.n)?;
        let exhaustive_cap = if self.theorem == SweepTheorem::Hp {
            4
        } else {
            3
        };
        match self.mode {
            Mode::Exhaustive if self.n > exhaustive_cap => {
                return Err(Error::Parameter(format!(
                    "exhaustive mode needs n <= {exhaustive_cap}, got {}",
                    self.n
                )))
            }
            Mode::Orbit if self.n > TABLE_MAX_RANK => {
                return Err(Error::Parameter(format!(
                    "orbit mode needs n <= {TABLE_MAX_RANK}, got {}",
                    self.n
                )))
            }
            Mode::Random if self.budget == 0 => {
                return Err(Error::Parameter(
                    "random mode needs a positive budget".into(),
                ))
            }
            _ => {}
        }
        match (self.theorem, self.k) {
            (SweepTheorem::Asym, None) => {
                return Err(Error::Parameter("asym needs k".into()));
            }
            (SweepTheorem::Asym, Some(k)) if !(4..=62).contains(&k) => {
                return Err(Error::Parameter(format!("k must be in 4..=62, got {k}")));
            }
            _ => {}
        }
        Ok(ctx)
    }
}

/// `{x : <x> = G}` for every subset mask of `F_2^n`, `n <= 4`.
fn span_table(n: u32) -> &'static [bool] {
    static TABLES: [OnceLock<Vec<bool>>; 5] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    TABLES[n as usize].get_or_init(|| {
        let ctx = GroupCtx::new(n).expect("small rank");
        (0..1u64 << (1u32 << n))
            .map(|m| spans(&SetF2::from_mask(ctx, m).expect("mask fits")))
            .collect()
    })
}

fn spans(s: &SetF2) -> bool {
    !s.is_empty() && group::affine_span(s).is_ok_and(|c| c.subgroup().dim() == s.rank())
}

/// Second-component canonicalization for a fixed first component, built on
/// first use.
struct LazyCanon<'a> {
    a: &'a SetF2,
    inner: Option<Option<PairCanonicalizer>>,
}

impl<'a> LazyCanon<'a> {
    fn new(a: &'a SetF2) -> Self {
        Self { a, inner: None }
    }

    fn exemplar(&mut self, b: &SetF2, note: String) -> Exemplar {
        let a = self.a;
        if a == b {
            if let Ok(c) = canonical_form(a) {
                return Exemplar {
                    a: c.clone(),
                    b: c,
                    canonical: true,
                    note,
                };
            }
        }
        let canon = self
            .inner
            .get_or_insert_with(|| PairCanonicalizer::new(a).ok())
            .as_ref();
        match canon.and_then(|c| Some((c.first(), c.second(b).ok()?))) {
            Some((a, b)) => Exemplar {
                a,
                b,
                canonical: true,
                note,
            },
            None => raw_exemplar(a, b, note),
        }
    }
}

fn raw_exemplar(a: &SetF2, b: &SetF2, note: String) -> Exemplar {
    Exemplar {
        a: a.clone(),
        b: b.clone(),
        canonical: false,
        note,
    }
}

struct Evaluator {
    theorem: SweepTheorem,
    k: Option<u32>,
    order: usize,
    /// Whether weighted counts are kept.
    weighted: bool,
    /// Canonicalize exemplars as they are found.
    canonicalize: bool,
}

fn record_verdict(t: &mut Tally, v: &Verdict, w: u64) {
    t.scanned += w;
    if !v.hypotheses_hold {
        return;
    }
    t.hypotheses_hold += w;
    match v.outcome {
        Outcome::Confirmed => t.confirmed += w,
        Outcome::Violation => t.violations += w,
        Outcome::Vacuous => {}
    }
    match v.complement_span_index {
        None => t.full_sumset += w,
        Some(index) => {
            *t.span_index_histogram.entry(index).or_insert(0) += w;
            t.min_span_index = Some(t.min_span_index.map_or(index, |m| m.min(index)));
        }
    }
    *t.sumset_size_histogram.entry(v.sumset_size).or_insert(0) += w;
    t.min_sumset_size = Some(
        t.min_sumset_size
            .map_or(v.sumset_size, |m| m.min(v.sumset_size)),
    );
    if v.boundary {
        t.boundary += w;
    }
    if v.mu_value == 1 {
        t.mu_one += w;
        if v.boundary {
            t.mu_one_boundary += w;
        }
        if v.strict_containment {
            t.mu_one_span_strict += w;
        }
    }
}

impl Evaluator {
    fn extremal_index(&self) -> u64 {
        match self.theorem {
            SweepTheorem::Asym => 1 << self.k.unwrap_or(3),
            _ => 8,
        }
    }

    fn scanned_only(&self, acc: &mut Accumulator, w: u64) {
        acc.raw.scanned += 1;
        if self.weighted {
            acc.weighted.scanned += w;
        }
    }

    fn verdict_note(v: &Verdict) -> String {
        format!(
            "|A|={} |B|={} |A+B|={} span_index={} mu={}",
            v.size_a,
            v.size_b,
            v.sumset_size,
            v.complement_span_index
                .map_or_else(|| "-".to_string(), |i| i.to_string()),
            v.mu_value
        )
    }

    fn record(
        &self,
        acc: &mut Accumulator,
        v: &Verdict,
        a: &SetF2,
        b: &SetF2,
        w: u64,
        canon: &mut LazyCanon<'_>,
    ) {
        record_verdict(&mut acc.raw, v, 1);
        if self.weighted {
            record_verdict(&mut acc.weighted, v, w);
        }
        if !v.hypotheses_hold {
            return;
        }
        if v.outcome == Outcome::Violation {
            acc.add_violation(raw_exemplar(a, b, format!("{}: {}", v.theorem, v.details)));
        }
        let label = if self.theorem == SweepTheorem::Hp {
            (v.complement_size > 0).then_some("coset_complement")
        } else if v.boundary {
            Some("boundary")
        } else if v.complement_span_index == Some(self.extremal_index()) {
            Some("extremal_index")
        } else {
            None
        };
        if let Some(label) = label {
            let note = Self::verdict_note(v);
            let e = if self.canonicalize {
                canon.exemplar(b, note)
            } else {
                raw_exemplar(a, b, note)
            };
            acc.add_exemplar(label, e);
        }
    }

    /// Evaluates one pair; `span_a`/`span_b` are `<A> = G`, `<B> = G`.
    #[allow(clippy::too_many_arguments)]
    fn pair(
        &self,
        acc: &mut Accumulator,
        a: &SetF2,
        b: &SetF2,
        span_a: bool,
        span_b: bool,
        w: u64,
        canon: &mut LazyCanon<'_>,
    ) -> Result<()> {
        if self.theorem == SweepTheorem::Asym
            && theorems::asymmetric_size_bound(b.len(), b.rank(), self.k.unwrap_or(4))
        {
            acc.raw.size_bound_met += 1;
            if self.weighted {
                acc.weighted.size_bound_met += w;
            }
        }
        if a.is_empty() || b.is_empty() {
            self.scanned_only(acc, w);
            return Ok(());
        }
        if self.theorem == SweepTheorem::Lev {
            return self.census_pair(acc, a, b, w, canon);
        }
        if !(span_a && span_b) {
            self.scanned_only(acc, w);
            return Ok(());
        }
        let s = group::sumset(a, b)?.len();
        let (la, lb) = (a.len(), b.len());
        let candidate = match self.theorem {
            SweepTheorem::Main => s < la + lb && s < self.order,
            SweepTheorem::Asym => {
                s < la + lb
                    && s < self.order
                    && theorems::asymmetric_size_bound(lb, a.rank(), self.k.unwrap_or(4))
            }
            SweepTheorem::Kneser => theorems::kneser_inequality(la, lb, s),
            SweepTheorem::Hp | SweepTheorem::Lev => unreachable!("handled elsewhere"),
        };
        if !candidate {
            self.scanned_only(acc, w);
            return Ok(());
        }
        let v = match self.theorem {
            SweepTheorem::Main => theorems::check_main(a, b)?,
            SweepTheorem::Asym => theorems::check_asymmetric(a, b, self.k.unwrap_or(4))?,
            _ => theorems::check_kneser_corollary(a, b)?,
        };
        self.record(acc, &v, a, b, w, canon);
        Ok(())
    }

    fn single(&self, acc: &mut Accumulator, a: &SetF2, span_a: bool, w: u64) -> Result<()> {
        if !span_a || group::sumset(a, a)?.len() >= 2 * a.len() {
            self.scanned_only(acc, w);
            return Ok(());
        }
        let v = theorems::check_hp(a)?;
        let mut canon = LazyCanon::new(a);
        self.record(acc, &v, a, a, w, &mut canon);
        Ok(())
    }

    fn census_pair(
        &self,
        acc: &mut Accumulator,
        a: &SetF2,
        b: &SetF2,
        w: u64,
        canon: &mut LazyCanon<'_>,
    ) -> Result<()> {
        let s = group::sumset(a, b)?.len();
        if s >= a.len() + b.len() {
            self.scanned_only(acc, w);
            return Ok(());
        }
        let outcome = structure::certify(a, b)?;
        let verified = outcome
            .certificate
            .as_ref()
            .filter(|c| structure::verify_certificate(a, b, c));
        let bump = |t: &mut Tally, w: u64| {
            t.scanned += w;
            t.hypotheses_hold += w;
            *t.sumset_size_histogram.entry(s).or_insert(0) += w;
            if !outcome.kemperman_condition {
                t.kemperman_fail += w;
            }
            match verified {
                Some(cert) => {
                    t.certified += w;
                    t.confirmed += w;
                    *t.root_kinds.entry(cert.class_name()).or_insert(0) += w;
                    let mut node = Some(cert);
                    while let Some(c) = node {
                        *t.node_kinds.entry(c.class_name()).or_insert(0) += w;
                        node = c.child();
                    }
                }
                None => t.violations += w,
            }
        };
        bump(&mut acc.raw, 1);
        if self.weighted {
            bump(&mut acc.weighted, w);
        }
        match verified {
            Some(cert) => {
                let note = format!("depth {} |A+B|={s}", cert.depth());
                let e = if self.canonicalize {
                    canon.exemplar(b, note)
                } else {
                    raw_exemplar(a, b, note)
                };
                acc.add_exemplar(&cert.class_name(), e);
            }
            None => {
                let reason = outcome
                    .failure_reason
                    .clone()
                    .unwrap_or_else(|| "certificate rejected".into());
                acc.add_violation(raw_exemplar(a, b, format!("lev: {reason}")));
            }
        }
        Ok(())
    }
}

/// Uniform subset whose size is drawn uniformly from `sizes`.
fn random_subset(rng: &mut ChaCha8Rng, ctx: GroupCtx, sizes: RangeInclusive<usize>) -> SetF2 {
    let size = rng.gen_range(sizes);
    let elems = index::sample(rng, ctx.order(), size);
    SetF2::from_elements(ctx, elems.into_iter().map(|x| x as u32)).expect("in range")
}

/// `G \ (A + M)`, so that `M` is disjoint from `A + B`.
fn planted_partner(rng: &mut ChaCha8Rng, a: &SetF2) -> SetF2 {
    let ctx = a.ctx();
    let m = random_subset(rng, ctx, 1..=(ctx.order() / 8).max(1));
    a.sumset_unchecked(&m).complement()
}

/// Draws sample `i` of a random sweep. Even samples plant a missing
/// element so the small-sumset hypotheses hold often; odd samples are
/// uniform over subset sizes. For `asym`, `B` always meets the size bound.
fn sample(
    rng: &mut ChaCha8Rng,
    ctx: GroupCtx,
    theorem: SweepTheorem,
    k: Option<u32>,
    i: u64,
) -> (SetF2, SetF2) {
    let order = ctx.order();
    let uniform = |rng: &mut ChaCha8Rng| random_subset(rng, ctx, 1..=order);
    if theorem == SweepTheorem::Asym {
        let k = k.unwrap_or(4);
        let b_min = (0..=order)
            .find(|&s| theorems::asymmetric_size_bound(s, ctx.rank(), k))
            .unwrap_or(order);
        let slack = order - b_min;
        if i & 1 == 0 && slack > 0 {
            let a = random_subset(rng, ctx, 1..=slack);
            let b = planted_partner(rng, &a);
            if b.len() >= b_min {
                return (a, b);
            }
        }
        let hole = random_subset(rng, ctx, 0..=slack);
        let b = hole.complement();
        return (uniform(rng), b);
    }
    let a = if i & 1 == 0 {
        random_subset(rng, ctx, 1..=(order / 2).max(1))
    } else {
        uniform(rng)
    };
    if theorem == SweepTheorem::Hp {
        return (a.clone(), a);
    }
    let b = if i & 1 == 0 {
        planted_partner(rng, &a)
    } else {
        uniform(rng)
    };
    (a, b)
}

fn all_masks(n: u32) -> u64 {
    1u64 << (1u32 << n)
}

/// Runs a sweep as configured.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    let ctx = cfg.validate()?;
    let started = Instant::now();
    let n = cfg.n;
    let small = n <= TABLE_MAX_RANK;
    let eval = Evaluator {
        theorem: cfg.theorem,
        k: cfg.k,
        order: ctx.order(),
        weighted: cfg.mode == Mode::Orbit,
        canonicalize: small && cfg.mode != Mode::Random,
    };
    let eval = &eval;
    let single = cfg.theorem == SweepTheorem::Hp;

    let acc: Result<Accumulator> = match cfg.mode {
        Mode::Exhaustive | Mode::Orbit => {
            let table = span_table(n);
            let items: Vec<(u64, u64)> = match cfg.mode {
                Mode::Orbit => OrbitTable::get(n)?
                    .representatives()
                    .iter()
                    .map(|&(m, w)| (m as u64, w))
                    .collect(),
                _ => (0..all_masks(n)).map(|m| (m, 1)).collect(),
            };
            par::map_reduce(
                items,
                cfg.threads,
                || Ok(Accumulator::default()),
                |(ma, w)| {
                    let mut acc = Accumulator::default();
                    let a = SetF2::from_mask(ctx, ma)?;
                    let span_a = table[ma as usize];
                    if single {
                        eval.single(&mut acc, &a, span_a, w)?;
                        return Ok(acc);
                    }
                    let mut canon = LazyCanon::new(&a);
                    for mb in 0..all_masks(n) {
                        let b = SetF2::from_mask(ctx, mb)?;
                        eval.pair(&mut acc, &a, &b, span_a, table[mb as usize], w, &mut canon)?;
                    }
                    Ok(acc)
                },
                |x, y| Ok(x?.merge(y?)),
            )
        }
        Mode::Random => {
            let chunks = cfg.budget.div_ceil(RANDOM_CHUNK);
            par::map_reduce(
                (0..chunks).collect(),
                cfg.threads,
                || Ok(Accumulator::default()),
                |c| {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                    rng.set_stream(c);
                    let mut acc = Accumulator::default();
                    let end = ((c + 1) * RANDOM_CHUNK).min(cfg.budget);
                    for i in c * RANDOM_CHUNK..end {
                        let (a, b) = sample(&mut rng, ctx, cfg.theorem, cfg.k, i);
                        let mut canon = LazyCanon::new(&a);
                        if single {
                            eval.single(&mut acc, &a, spans(&a), 1)?;
                        } else {
                            eval.pair(&mut acc, &a, &b, spans(&a), spans(&b), 1, &mut canon)?;
                        }
                    }
                    Ok(acc)
                },
                |x, y| Ok(x?.merge(y?)),
            )
        }
    };
    let mut acc = acc?;

    if cfg.mode == Mode::Random && small {
        let exemplars = std::mem::take(&mut acc.exemplars);
        for (label, list) in exemplars {
            for e in list {
                let (a, b) = canonical_pair(&e.a, &e.b)?;
                acc.add_exemplar(
                    &label,
                    Exemplar {
                        a,
                        b,
                        canonical: true,
                        note: e.note,
                    },
                );
            }
        }
    }

    let wall = started.elapsed().as_secs_f64();
    Ok(SweepReport {
        schema_version: SCHEMA_VERSION,
        theorem: cfg.theorem.name().to_string(),
        n,
        k: cfg.k.filter(|_| cfg.theorem == SweepTheorem::Asym),
        mode: cfg.mode.name().to_string(),
        budget: (cfg.mode == Mode::Random).then_some(cfg.budget),
        seed: (cfg.mode == Mode::Random).then_some(cfg.seed),
        timing: Timing {
            wall_seconds: wall,
            items_per_second: if wall > 0.0 {
                acc.raw.scanned as f64 / wall
            } else {
                0.0
            },
            threads: cfg.threads,
        },
        weighted: (cfg.mode == Mode::Orbit).then_some(acc.weighted),
        tally: acc.raw,
        violations: acc.violations,
        exemplars: acc.exemplars,
    })
}

fn config(theorem: SweepTheorem, n: u32, mode: Mode, budget: u64, seed: u64) -> SweepConfig {
    SweepConfig {
        mode,
        budget,
        seed,
        ..SweepConfig::new(theorem, n)
    }
}

/// Sweeps the index-8 containment theorem.
pub fn sweep_main(n: u32, mode: Mode, budget: u64, seed: u64) -> Result<SweepReport> {
    run_sweep(&config(SweepTheorem::Main, n, mode, budget, seed))
}

/// Sweeps the index-`2^k` containment theorem for large `B`.
pub fn sweep_asymmetric(n: u32, k: u32, mode: Mode, budget: u64, seed: u64) -> Result<SweepReport> {
    run_sweep(&SweepConfig {
        k: Some(k),
        ..config(SweepTheorem::Asym, n, mode, budget, seed)
    })
}

/// Sweeps the `|2A| < 2|A|` theorem over single sets.
pub fn sweep_hp(n: u32, mode: Mode, budget: u64, seed: u64) -> Result<SweepReport> {
    run_sweep(&config(SweepTheorem::Hp, n, mode, budget, seed))
}

/// Sweeps the Kneser-type corollary.
pub fn sweep_kneser(n: u32, mode: Mode, budget: u64, seed: u64) -> Result<SweepReport> {
    run_sweep(&config(SweepTheorem::Kneser, n, mode, budget, seed))
}

/// Certifies and re-verifies every pair with `|A+B| < |A|+|B|`.
pub fn census_certificates(n: u32, mode: Mode) -> Result<SweepReport> {
    run_sweep(&config(SweepTheorem::Lev, n, mode, 0, 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_rank_mismatch() {
        assert!(sweep_main(4, Mode::Exhaustive, 0, 0).is_err());
        assert!(sweep_main(5, Mode::Orbit, 0, 0).is_err());
        assert!(sweep_main(3, Mode::Random, 0, 0).is_err());
        assert!(sweep_asymmetric(4, 3, Mode::Orbit, 0, 0).is_err());
        assert!("diagonal".parse::<Mode>().is_err());
        assert_eq!("lev".parse::<SweepTheorem>().unwrap(), SweepTheorem::Lev);
    }

    #[test]
    fn rank_two_base_case() {
        let r = sweep_main(2, Mode::Exhaustive, 0, 0).unwrap();
        assert_eq!(r.tally.scanned, 256);
        assert_eq!(r.tally.hypotheses_hold, 0);
        assert_eq!(r.tally.violations, 0);
    }

    #[test]
    fn random_mode_is_reproducible() {
        let cfg = SweepConfig {
            k: Some(4),
            mode: Mode::Random,
            budget: 3000,
            seed: 11,
            ..SweepConfig::new(SweepTheorem::Asym, 5)
        };
        let one = run_sweep(&SweepConfig {
            threads: Some(1),
            ..cfg.clone()
        })
        .unwrap();
        let four = run_sweep(&SweepConfig {
            threads: Some(4),
            ..cfg
        })
        .unwrap();
        assert_eq!(one.deterministic_json(), four.deterministic_json());
        assert_eq!(one.tally.scanned, 3000);
    }
}
