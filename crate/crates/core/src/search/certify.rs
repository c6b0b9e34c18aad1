//! Matched bounds: a checked construction or search witness from below, and
//! exhaustive search or a permutation-method ground from above.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{max_family_exact, max_weight_on_ground, Budget, SearchResult, COVER_MAX_N};
use crate::constructions::{ConstructionSpec, FqVariant};
use crate::error::Error;
use crate::lattice::{check_n, serialize_count, BigCount, SetFamily};
use crate::predicates::{check, ChainMode, PropertySpec};
use crate::weights::{chain_pair_ground, circle_ground, serialize_weight, Weight};

/// Exhaustive search is attempted up to this `n`.
pub const CERTIFY_EXACT_MAX_N: usize = 6;
const HEREDITY_SAMPLES: usize = 64;
const HEREDITY_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpperMethod {
    ExhaustiveSearch,
    CircleGround,
    ChainPairGround,
}

impl fmt::Display for UpperMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UpperMethod::ExhaustiveSearch => "exhaustive-search",
            UpperMethod::CircleGround => "circle-ground",
            UpperMethod::ChainPairGround => "chain-pair-ground",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBound {
    #[serde(serialize_with = "serialize_count")]
    pub value: BigCount,
    /// Set when a construction attains the bound.
    pub construction: Option<ConstructionSpec>,
    pub label: Option<String>,
    /// The attaining family when it came from search.
    pub witness: Option<SetFamily>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UpperBound {
    #[serde(serialize_with = "serialize_count")]
    pub value: BigCount,
    pub method: UpperMethod,
    /// Ground optimum before rounding down, for ground methods.
    #[serde(serialize_with = "serialize_opt_weight")]
    pub ground_weight: Option<Weight>,
}

fn serialize_opt_weight<S: serde::Serializer>(w: &Option<Weight>, s: S) -> Result<S::Ok, S::Error> {
    match w {
        Some(w) => serialize_weight(w, s),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CertStatus {
    Matched,
    Gap,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub n: usize,
    pub property: PropertySpec,
    pub lower: LowerBound,
    pub upper: UpperBound,
    pub status: CertStatus,
    /// Every upper bound that was computed, in method order.
    pub upper_candidates: Vec<UpperBound>,
}

impl Certificate {
    pub fn is_matched(&self) -> bool {
        self.status == CertStatus::Matched
    }
}

/// Constructions known to satisfy `prop`, best guesses first.
pub fn candidate_constructions(n: usize, prop: &PropertySpec) -> Vec<(String, ConstructionSpec)> {
    let mut out = Vec::new();
    match prop.normalized() {
        PropertySpec::ChainIntersect { mode: ChainMode::Plain, p, q } => {
            out.push(("upper".into(), ConstructionSpec::upper(n, n + p + q - 1)));
        }
        PropertySpec::ChainIntersect { mode: ChainMode::Strong, p, q } => {
            out.push(("R1".into(), ConstructionSpec::upper(n, n + p)));
            out.push(("R2".into(), ConstructionSpec::middle(n, q - 1)));
        }
        PropertySpec::ChainIntersect { mode: ChainMode::Total, p, q } => {
            let (p, q) = (p.max(q), p.min(q));
            for i in 1..=n {
                out.push((format!("F_q({i})"), ConstructionSpec::fq(n, q, i, FqVariant::Corrected)));
            }
            out.push(("R".into(), ConstructionSpec::middle(n, p - 1)));
        }
        PropertySpec::KSperner(k) => out.push(("middle".into(), ConstructionSpec::middle(n, k))),
        PropertySpec::Ccpf(r) => out.push(("upper".into(), ConstructionSpec::upper(n, n + r))),
        PropertySpec::ComplementFree => out.push(("upper".into(), ConstructionSpec::upper(n, n + 1))),
        PropertySpec::Intersecting => unreachable!("normalized"),
    }
    if n >= 1 {
        out.push(("star".into(), ConstructionSpec::star(n)));
    }
    out
}

/// Largest candidate construction that passes `check`, first on ties.
pub fn best_construction(n: usize, prop: &PropertySpec) -> Result<Option<(String, ConstructionSpec, SetFamily)>, Error> {
    let mut best: Option<(String, ConstructionSpec, SetFamily)> = None;
    for (label, spec) in candidate_constructions(n, prop) {
        let family = spec.build()?;
        if check(&family, prop).is_satisfied() && best.as_ref().is_none_or(|b| family.len() > b.2.len()) {
            best = Some((label, spec, family));
        }
    }
    Ok(best)
}

/// Samples random subfamilies of `family` and re-checks `prop` on each.
fn sampled_heredity(family: &SetFamily, prop: &PropertySpec) -> Result<(), Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(HEREDITY_SEED);
    for _ in 0..HEREDITY_SAMPLES {
        let keep: f64 = rng.gen();
        let sub = family.filter(|_| rng.gen_bool(keep));
        if !check(&sub, prop).is_satisfied() {
            return Err(Error::NotHereditary(format!("{prop} fails on a subfamily of size {}", sub.len())));
        }
    }
    Ok(())
}

pub fn certify(n: usize, prop: &PropertySpec) -> Result<Certificate, Error> {
    certify_with(n, prop, Budget::default())
}

pub fn certify_with(n: usize, prop: &PropertySpec, budget: Budget) -> Result<Certificate, Error> {
    check_n(n)?;
    prop.validate()?;
    if n == 0 || n > COVER_MAX_N {
        return Err(Error::UnsupportedN(n));
    }
    let mut lower = best_construction(n, prop)?.map(|(label, spec, family)| {
        let lb = LowerBound {
            value: BigCount::from(family.len()),
            construction: Some(spec),
            label: Some(label),
            witness: None,
        };
        (lb, family)
    });

    let mut uppers = Vec::new();
    let mut exact: Option<SearchResult> = None;
    if n <= CERTIFY_EXACT_MAX_N {
        let r = max_family_exact(n, prop, budget)?;
        if r.exhaustive {
            uppers.push(UpperBound { value: r.floor(), method: UpperMethod::ExhaustiveSearch, ground_weight: None });
        }
        exact = Some(r);
    }
    if let Some(r) = exact {
        let value = r.floor();
        if lower.as_ref().is_none_or(|(l, _)| value > l.value) {
            let lb = LowerBound { value, construction: None, label: None, witness: Some(r.witness.clone()) };
            lower = Some((lb, r.witness));
        }
    }
    let (lower, lower_family) = lower.unwrap_or_else(|| {
        let empty = SetFamily::empty(n).expect("n checked");
        (LowerBound { value: BigCount::default(), construction: None, label: None, witness: Some(empty.clone()) }, empty)
    });

    // the ground bounds below are only sound for hereditary properties
    sampled_heredity(&lower_family, prop)?;
    if n >= 2 {
        let r = max_weight_on_ground(&circle_ground(n)?, prop, budget)?;
        if r.exhaustive {
            let ub = UpperBound { value: r.floor(), method: UpperMethod::CircleGround, ground_weight: Some(r.optimum) };
            uppers.push(ub);
        }
    }
    let identity: Vec<usize> = (1..=n).collect();
    let r = max_weight_on_ground(&chain_pair_ground(n, &identity)?, prop, budget)?;
    if r.exhaustive {
        uppers.push(UpperBound { value: r.floor(), method: UpperMethod::ChainPairGround, ground_weight: Some(r.optimum) });
    }
    let upper = uppers
        .iter()
        .min_by(|a, b| a.value.cmp(&b.value))
        .cloned()
        .ok_or_else(|| Error::InvalidParameters("no upper bound finished within the budget".into()))?;
    assert!(lower.value <= upper.value, "lower bound {} exceeds upper bound {}", lower.value, upper.value);
    let status = if lower.value == upper.value { CertStatus::Matched } else { CertStatus::Gap };
    Ok(Certificate { n, property: *prop, lower, upper, status, upper_candidates: uppers })
}
