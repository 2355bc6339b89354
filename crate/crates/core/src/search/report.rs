//! Sweep reports: counters that merge associatively and commutatively, so
//! a report does not depend on how the work was split across threads.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

use crate::group::SetF2;

/// Bumped whenever a field changes meaning or is removed.
pub const SCHEMA_VERSION: u32 = 1;

/// Exemplars kept per label.
pub const EXEMPLAR_CAP: usize = 8;
/// Violations kept in full; the count is always exact.
pub const VIOLATION_CAP: usize = 16;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    /// Pairs (or single sets for `hp`) examined.
    pub scanned: u64,
    pub hypotheses_hold: u64,
    pub confirmed: u64,
    pub violations: u64,
    /// Hypothesis-satisfying pairs with `A+B = G`.
    pub full_sumset: u64,
    /// Hypothesis-satisfying pairs whose complement is a coset of index
    /// exactly `2^k`.
    pub boundary: u64,
    pub mu_one: u64,
    /// Pairs with `mu = 1` on the boundary; the strictness clause forbids
    /// these, so any count here is also a violation.
    pub mu_one_boundary: u64,
    /// Pairs with `mu = 1` whose complement is a proper subset of its own
    /// affine span.
    pub mu_one_span_strict: u64,
    /// Smallest complement-span index among hypothesis-satisfying pairs.
    pub min_span_index: Option<u64>,
    /// Smallest sumset among hypothesis-satisfying pairs.
    pub min_sumset_size: Option<usize>,
    /// Complement-span index of hypothesis-satisfying pairs.
    pub span_index_histogram: BTreeMap<u64, u64>,
    /// Sumset size of hypothesis-satisfying pairs.
    pub sumset_size_histogram: BTreeMap<usize, u64>,
    /// `asym` only: pairs whose `B` meets the size bound.
    pub size_bound_met: u64,
    /// Census only: pairs failing Kemperman's condition.
    pub kemperman_fail: u64,
    /// Census only: pairs certified and re-verified.
    pub certified: u64,
    /// Census only: certificate nodes by class.
    pub node_kinds: BTreeMap<String, u64>,
    /// Census only: certificate root class.
    pub root_kinds: BTreeMap<String, u64>,
}

fn min_opt<T: Ord>(x: Option<T>, y: Option<T>) -> Option<T> {
    match (x, y) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

fn add_maps<K: Ord>(into: &mut BTreeMap<K, u64>, from: BTreeMap<K, u64>) {
    for (k, v) in from {
        *into.entry(k).or_insert(0) += v;
    }
}

impl Tally {
    pub fn merge(mut self, other: Tally) -> Tally {
        self.scanned += other.scanned;
        self.hypotheses_hold += other.hypotheses_hold;
        self.confirmed += other.confirmed;
        self.violations += other.violations;
        self.full_sumset += other.full_sumset;
        self.boundary += other.boundary;
        self.mu_one += other.mu_one;
        self.mu_one_boundary += other.mu_one_boundary;
        self.mu_one_span_strict += other.mu_one_span_strict;
        self.min_span_index = min_opt(self.min_span_index, other.min_span_index);
        self.min_sumset_size = min_opt(self.min_sumset_size, other.min_sumset_size);
        add_maps(&mut self.span_index_histogram, other.span_index_histogram);
        add_maps(&mut self.sumset_size_histogram, other.sumset_size_histogram);
        self.size_bound_met += other.size_bound_met;
        self.kemperman_fail += other.kemperman_fail;
        self.certified += other.certified;
        add_maps(&mut self.node_kinds, other.node_kinds);
        add_maps(&mut self.root_kinds, other.root_kinds);
        self
    }

    /// Every counter multiplied by `w`; minima are unchanged.
    pub fn scaled(&self, w: u64) -> Tally {
        fn scale<K: Ord + Clone>(m: &BTreeMap<K, u64>, w: u64) -> BTreeMap<K, u64> {
            m.iter().map(|(k, v)| (k.clone(), v * w)).collect()
        }
        Tally {
            scanned: self.scanned * w,
            hypotheses_hold: self.hypotheses_hold * w,
            confirmed: self.confirmed * w,
            violations: self.violations * w,
            full_sumset: self.full_sumset * w,
            boundary: self.boundary * w,
            mu_one: self.mu_one * w,
            mu_one_boundary: self.mu_one_boundary * w,
            mu_one_span_strict: self.mu_one_span_strict * w,
            min_span_index: self.min_span_index,
            min_sumset_size: self.min_sumset_size,
            span_index_histogram: scale(&self.span_index_histogram, w),
            sumset_size_histogram: scale(&self.sumset_size_histogram, w),
            size_bound_met: self.size_bound_met * w,
            kemperman_fail: self.kemperman_fail * w,
            certified: self.certified * w,
            node_kinds: scale(&self.node_kinds, w),
            root_kinds: scale(&self.root_kinds, w),
        }
    }
}

/// A pair worth keeping, emitted as set literals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Exemplar {
    pub a: SetF2,
    pub b: SetF2,
    /// `true` when `(a, b)` is a canonical pair.
    pub canonical: bool,
    pub note: String,
}

impl Exemplar {
    fn key_cmp(&self, other: &Self) -> Ordering {
        self.a
            .cmp_as_integer(&other.a)
            .then_with(|| self.b.cmp_as_integer(&other.b))
            .then_with(|| self.note.cmp(&other.note))
    }
}

/// Keeps the `cap` smallest distinct exemplars.
fn merge_capped(mut x: Vec<Exemplar>, y: Vec<Exemplar>, cap: usize) -> Vec<Exemplar> {
    x.extend(y);
    x.sort_by(Exemplar::key_cmp);
    x.dedup_by(|p, q| p.key_cmp(q) == Ordering::Equal);
    x.truncate(cap);
    x
}

/// Order-independent partial result of a sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Accumulator {
    pub raw: Tally,
    pub weighted: Tally,
    pub violations: Vec<Exemplar>,
    pub exemplars: BTreeMap<String, Vec<Exemplar>>,
}

impl Accumulator {
    pub fn merge(self, other: Accumulator) -> Accumulator {
        let mut exemplars = self.exemplars;
        for (label, list) in other.exemplars {
            let mine = exemplars.remove(&label).unwrap_or_default();
            exemplars.insert(label, merge_capped(mine, list, EXEMPLAR_CAP));
        }
        Accumulator {
            raw: self.raw.merge(other.raw),
            weighted: self.weighted.merge(other.weighted),
            violations: merge_capped(self.violations, other.violations, VIOLATION_CAP),
            exemplars,
        }
    }

    pub fn add_violation(&mut self, e: Exemplar) {
        self.violations =
            merge_capped(std::mem::take(&mut self.violations), vec![e], VIOLATION_CAP);
    }

    pub fn add_exemplar(&mut self, label: &str, e: Exemplar) {
        let list = self.exemplars.remove(label).unwrap_or_default();
        self.exemplars
            .insert(label.to_string(), merge_capped(list, vec![e], EXEMPLAR_CAP));
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub wall_seconds: f64,
    pub items_per_second: f64,
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub theorem: String,
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Counts over the pairs actually examined.
    pub tally: Tally,
    /// Orbit mode: counts weighted by orbit size, equal to the counts an
    /// exhaustive sweep would produce.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weighted: Option<Tally>,
    pub violations: Vec<Exemplar>,
    pub exemplars: BTreeMap<String, Vec<Exemplar>>,
    /// Excluded from [`SweepReport::deterministic_json`].
    pub timing: Timing,
}

impl SweepReport {
    /// Counts covering the whole search space: weighted in orbit mode, raw
    /// otherwise.
    pub fn effective(&self) -> &Tally {
        self.weighted.as_ref().unwrap_or(&self.tally)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON without the timing block; identical across runs with the same
    /// parameters.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timing");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupCtx;

    fn ex(a: u64, b: u64) -> Exemplar {
        let c = GroupCtx::new(3).unwrap();
        Exemplar {
            a: SetF2::from_mask(c, a).unwrap(),
            b: SetF2::from_mask(c, b).unwrap(),
            canonical: false,
            note: String::new(),
        }
    }

    fn acc(seed: u64) -> Accumulator {
        let mut a = Accumulator::default();
        a.raw.scanned = seed;
        a.raw.min_span_index = Some(8 << (seed % 3));
        *a.raw.span_index_histogram.entry(seed % 4).or_default() += seed;
        a.weighted = a.raw.scaled(3);
        for i in 0..seed % 5 {
            a.add_exemplar("x", ex(seed * 7 % 256, i));
            a.add_violation(ex(i, seed % 256));
        }
        a
    }

    #[test]
    fn merge_is_order_independent() {
        let parts: Vec<Accumulator> = (1..30).map(acc).collect();
        let forward = parts
            .iter()
            .cloned()
            .fold(Accumulator::default(), Accumulator::merge);
        let backward = parts
            .iter()
            .rev()
            .cloned()
            .fold(Accumulator::default(), Accumulator::merge);
        let (left, right) = parts.split_at(11);
        let split = left
            .iter()
            .cloned()
            .fold(Accumulator::default(), Accumulator::merge)
            .merge(
                right
                    .iter()
                    .cloned()
                    .fold(Accumulator::default(), Accumulator::merge),
            );
        assert_eq!(forward, backward);
        assert_eq!(forward, split);
        assert!(forward.exemplars["x"].len() <= EXEMPLAR_CAP);
        assert!(forward.violations.len() <= VIOLATION_CAP);
    }
}
