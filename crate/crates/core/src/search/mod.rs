//! Exact maximization of families and of ground weights under a property.

mod bits;
mod cache;
mod certify;
mod engine;
mod sweep;
mod universe;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

pub use cache::{CacheEntry, ResultCache, CACHE_ENV};
pub use certify::{
    best_construction, candidate_constructions, certify, certify_with, CertStatus, Certificate, LowerBound, UpperBound,
    UpperMethod, CERTIFY_EXACT_MAX_N,
};
pub use engine::Budget;
pub use sweep::{formula_value, sweep, SweepRow, SWEEP_CSV_HEADER};

use crate::error::Error;
use crate::lattice::{check_n, BigCount, SetFamily, SetMask};
use crate::predicates::{check, PropertySpec};
use crate::weights::{serialize_weight, Weight, WeightedGround};
use engine::{CoverBound, Solver};
use universe::Universe;

/// Largest `n` accepted by [`max_family_exact`]; exhaustion is only
/// practical for `n <= 6`.
pub const EXACT_MAX_N: usize = 8;
/// Largest ground accepted by [`max_weight_on_ground`].
pub const GROUND_MAX_MEMBERS: usize = 200;
/// Circles up to this size also use the rotated chain-pair bound.
pub const COVER_MAX_N: usize = 10;
/// Exact search uses the averaged chain-pair bound for `n` in this range.
const CUBE_COVER_N: std::ops::RangeInclusive<usize> = 4..=6;

/// Which pruning rules beyond the remaining-weight bound are active.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Pruning {
    pub cover: bool,
    pub dominance: bool,
}

impl Pruning {
    pub const FULL: Pruning = Pruning { cover: true, dominance: true };
    #[cfg(test)]
    pub const BASIC: Pruning = Pruning { cover: false, dominance: false };
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    /// Family size for exact search, exact weight for ground search.
    #[serde(serialize_with = "serialize_weight")]
    pub optimum: Weight,
    pub witness: SetFamily,
    pub nodes_explored: u64,
    #[serde(serialize_with = "serialize_millis")]
    pub elapsed: Duration,
    /// False when the budget ran out; `optimum` is then only a lower bound.
    pub exhaustive: bool,
}

impl SearchResult {
    /// The optimum as an integer count, if it is one.
    pub fn count(&self) -> Option<BigCount> {
        self.optimum.is_integer().then(|| self.optimum.to_integer().to_biguint()).flatten()
    }

    /// `⌊optimum⌋`.
    pub fn floor(&self) -> BigCount {
        self.optimum.floor().to_integer().to_biguint().expect("non-negative")
    }
}

fn serialize_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

/// Descending size, then ascending mask.
fn candidate_order(mut masks: Vec<SetMask>) -> Vec<SetMask> {
    masks.sort_by_key(|m| (std::cmp::Reverse(m.len()), m.bits()));
    masks
}

fn finish(uni: &Universe, prop: &PropertySpec, out: engine::Outcome, scale: u64, start: Instant) -> SearchResult {
    let witness = uni.family(&out.witness);
    assert!(check(&witness, prop).is_satisfied(), "search witness fails {prop}");
    SearchResult {
        optimum: BigRational::new(BigInt::from(out.best), BigInt::from(scale)),
        witness,
        nodes_explored: out.nodes,
        elapsed: start.elapsed(),
        exhaustive: out.exhaustive,
    }
}

/// Largest family in `2^[n]` with `prop`.
///
/// Among optimal families the witness is the first met in include-first
/// depth-first order over the candidate order, so repeated runs agree.
pub fn max_family_exact(n: usize, prop: &PropertySpec, budget: Budget) -> Result<SearchResult, Error> {
    exact_search(n, prop, budget, Pruning::FULL)
}

pub(crate) fn exact_search(n: usize, prop: &PropertySpec, budget: Budget, pruning: Pruning) -> Result<SearchResult, Error> {
    check_n(n)?;
    prop.validate()?;
    if n > EXACT_MAX_N {
        return Err(Error::UnsupportedN(n));
    }
    let start = Instant::now();
    let masks = candidate_order((0..1u32 << n).map(SetMask).collect());
    let uni = Universe::new(n, masks)?;
    let mut solver = Solver::new(&uni, *prop, vec![1; uni.len()], budget);
    if pruning.cover && CUBE_COVER_N.contains(&n) {
        solver = solver.with_cover(CoverBound::cube(&uni, prop));
    }
    if !pruning.dominance {
        solver = solver.without_dominance();
    }
    let out = solver.run();
    Ok(finish(&uni, prop, out, 1, start))
}

/// Heaviest valid subfamily of a weighted ground.
pub fn max_weight_on_ground(ground: &WeightedGround, prop: &PropertySpec, budget: Budget) -> Result<SearchResult, Error> {
    ground_search(ground, prop, budget, Pruning::FULL)
}

pub(crate) fn ground_search(
    ground: &WeightedGround,
    prop: &PropertySpec,
    budget: Budget,
    pruning: Pruning,
) -> Result<SearchResult, Error> {
    prop.validate()?;
    if ground.len() > GROUND_MAX_MEMBERS {
        return Err(Error::GroundTooLarge(ground.len(), GROUND_MAX_MEMBERS));
    }
    let start = Instant::now();
    let uni = Universe::new(ground.n(), candidate_order(ground.members().members().to_vec()))?;
    let weights: Vec<u64> = uni.masks.iter().map(|&m| ground.scaled_weight(m)).collect();
    let mut solver = Solver::new(&uni, *prop, weights.clone(), budget);
    if pruning.cover && ground.is_circle() && ground.n() <= COVER_MAX_N {
        solver = solver.with_cover(CoverBound::circle(&uni, prop));
    }
    if !pruning.dominance {
        solver = solver.without_dominance();
    }
    let out = solver.run();
    Ok(finish(&uni, prop, out, ground.weight_scale(), start))
}
