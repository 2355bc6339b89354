//! Exhaustive, orbit-reduced and seeded random sweeps over pairs in
//! `F_2^n`, with affine canonical forms and mergeable reports.

mod canonical;
mod report;
mod sweep;

pub use canonical::{
    canonical_form, canonical_form_exhaustive, canonical_pair, gl_order, OrbitTable,
    PairCanonicalizer, EXACT_MAX_RANK, TABLE_MAX_RANK,
};
pub use report::{Accumulator, Exemplar, SweepReport, Tally, Timing, SCHEMA_VERSION};
pub use sweep::{
    census_certificates, run_sweep, sweep_asymmetric, sweep_hp, sweep_kneser, sweep_main, Mode,
    SweepConfig, SweepTheorem, RANDOM_CHUNK,
};
