//! Families of subsets of `[n]` under chain-intersecting conditions:
//! membership checks, extremal constructions, permutation-method bounds and
//! exhaustive search.

pub mod constructions;
pub mod error;
pub mod lattice;
pub mod predicates;
pub mod proofcheck;
pub mod search;
pub mod weights;

pub use constructions::{extremal_formula, BoundReport, ConstructionKind, ConstructionSpec, FqVariant};
pub use error::{Error, ParseError, ParseErrorKind};
pub use lattice::{
    binom, complement, enumerate_level, parse_family, serialize_family, BigCount, SetFamily, SetMask, MAX_N,
};
pub use predicates::{
    chain_profile, check, check_cross_sperner, oracle_check, ChainMode, ChainProfile, CrossVerdict, PropertySpec,
    Verdict, Witness,
};
pub use proofcheck::{
    hilton_check, thm2_decompose, threshold_scan, Decomposition, HiltonVerdict, Hypothesis, ThresholdReport, ThresholdRow,
};
pub use weights::{
    chain_pair_ground, circle_ground, double_cover_check, fmt_weight, rotated_chain_pairs, weight_of, Weight,
    WeightedGround,
};
