//! The explicit extremal families: upper (half-)levels, middle levels, the
//! `F_q(i)` families and stars, with closed-form sizes.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::Error;
use crate::lattice::{binom_u, check_n, low_bits, serialize_count, BigCount, SetFamily, SetMask};
use crate::predicates::ChainMode;

/// Which of the two readings of `F_q(i)` to build.
///
/// `Literal` keeps `q` full levels `i-q+1..=i`; `Corrected` keeps only the
/// `q-1` levels `i-q+2..=i`, which is what makes every `q`-chain bottom
/// contain element 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FqVariant {
    Literal,
    Corrected,
}

impl fmt::Display for FqVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FqVariant::Literal => "literal",
            FqVariant::Corrected => "corrected",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstructionKind {
    /// Upper `halves/2` levels: every set of size `> n - halves/2`, plus the
    /// sets of size `n - halves/2` through `fixed` when `halves` is odd.
    UpperLevels { halves: usize, fixed: usize },
    /// The `levels` levels from `floor((n-levels+1)/2)` to `floor((n+levels-1)/2)`.
    MiddleLevels { levels: usize },
    Fq { q: usize, i: usize, variant: FqVariant },
    /// Every set containing `element`.
    Star { element: usize },
}

/// Serializes as its spec string, e.g. `upper:n=4,s=5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ConstructionSpec {
    pub n: usize,
    pub kind: ConstructionKind,
}

impl Serialize for ConstructionSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl ConstructionSpec {
    pub fn upper(n: usize, halves: usize) -> ConstructionSpec {
        ConstructionSpec { n, kind: ConstructionKind::UpperLevels { halves, fixed: 1 } }
    }

    pub fn middle(n: usize, levels: usize) -> ConstructionSpec {
        ConstructionSpec { n, kind: ConstructionKind::MiddleLevels { levels } }
    }

    pub fn fq(n: usize, q: usize, i: usize, variant: FqVariant) -> ConstructionSpec {
        ConstructionSpec { n, kind: ConstructionKind::Fq { q, i, variant } }
    }

    pub fn star(n: usize) -> ConstructionSpec {
        ConstructionSpec { n, kind: ConstructionKind::Star { element: 1 } }
    }

    pub fn validate(&self) -> Result<(), Error> {
        check_n(self.n)?;
        let n = self.n;
        let bad = |msg: String| Err(Error::InvalidConstruction(msg));
        match self.kind {
            ConstructionKind::UpperLevels { fixed, .. } if !(1..=n).contains(&fixed) => {
                bad(format!("fixed element {fixed} outside [1,{n}]"))
            }
            ConstructionKind::Fq { q, .. } if q == 0 => bad("q must be at least 1".into()),
            ConstructionKind::Fq { i, .. } if !(1..=n).contains(&i) => bad(format!("i={i} outside [1,{n}]")),
            ConstructionKind::Star { element } if !(1..=n).contains(&element) => {
                bad(format!("element {element} outside [1,{n}]"))
            }
            _ => Ok(()),
        }
    }

    /// Inclusive size range of the full levels, and the optional partial level
    /// restricted to sets through element 1 (or `fixed`).
    fn level_rule(&self) -> LevelRule {
        let n = self.n as i64;
        match self.kind {
            ConstructionKind::UpperLevels { halves, fixed } => {
                let t = n - (halves / 2) as i64;
                LevelRule {
                    full: (t + 1, n),
                    through: Some((fixed, if halves % 2 == 1 { (t, t) } else { (1, 0) })),
                }
            }
            ConstructionKind::MiddleLevels { levels } => {
                let m = levels as i64;
                LevelRule {
                    full: ((n - m + 1).div_euclid(2), (n + m - 1).div_euclid(2)),
                    through: None,
                }
            }
            ConstructionKind::Fq { q, i, variant } => {
                let (q, i) = (q as i64, i as i64);
                let lo = match variant {
                    FqVariant::Literal => i - q + 1,
                    FqVariant::Corrected => i - q + 2,
                };
                LevelRule { full: (lo, i), through: Some((1, (1, i))) }
            }
            ConstructionKind::Star { element } => LevelRule { full: (1, 0), through: Some((element, (1, n))) },
        }
    }

    pub fn contains(&self, m: SetMask) -> bool {
        let rule = self.level_rule();
        let size = m.len() as i64;
        if rule.full.0 <= size && size <= rule.full.1 {
            return true;
        }
        match rule.through {
            Some((e, (lo, hi))) => lo <= size && size <= hi && m.contains(e),
            None => false,
        }
    }

    /// Enumerates the family.
    pub fn build(&self) -> Result<SetFamily, Error> {
        self.validate()?;
        let members: Vec<SetMask> = (0..=low_bits(self.n)).map(SetMask).filter(|&m| self.contains(m)).collect();
        SetFamily::new(self.n, members)
    }

    /// Closed-form cardinality; agrees with `build(..).len()`.
    pub fn size(&self) -> Result<BigCount, Error> {
        self.validate()?;
        let n = self.n as u64;
        let rule = self.level_rule();
        let (flo, fhi) = (rule.full.0.max(0), rule.full.1.min(n as i64));
        let mut total = BigUint::zero();
        for k in flo..=fhi {
            total += binom_u(n, k);
        }
        if let Some((_, (lo, hi))) = rule.through {
            // sets through a fixed element at sizes outside the full range
            for k in lo.max(0)..=hi.min(n as i64) {
                if k < flo || k > fhi {
                    total += binom_u(n - 1, k - 1);
                }
            }
        }
        Ok(total)
    }
}

struct LevelRule {
    full: (i64, i64),
    through: Option<(usize, (i64, i64))>,
}

impl fmt::Display for ConstructionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n;
        match self.kind {
            ConstructionKind::UpperLevels { halves, fixed } => {
                write!(f, "upper:n={n},s={halves}")?;
                if fixed != 1 {
                    write!(f, ",fixed={fixed}")?;
                }
                Ok(())
            }
            ConstructionKind::MiddleLevels { levels } => write!(f, "middle:n={n},m={levels}"),
            ConstructionKind::Fq { q, i, variant } => write!(f, "fq:n={n},q={q},i={i},variant={variant}"),
            ConstructionKind::Star { element } => {
                write!(f, "star:n={n}")?;
                if element != 1 {
                    write!(f, ",element={element}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for ConstructionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::InvalidConstruction(s.to_string());
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let mut n = None;
        let mut params = std::collections::BTreeMap::new();
        for kv in rest.split(',').filter(|t| !t.trim().is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(bad)?;
            let (k, v) = (k.trim(), v.trim());
            if k == "n" {
                n = Some(v.parse::<usize>().map_err(|_| bad())?);
            } else {
                params.insert(k.to_string(), v.to_string());
            }
        }
        let n = n.ok_or_else(bad)?;
        let mut num = |key: &str, default: Option<usize>| -> Result<usize, Error> {
            match params.remove(key) {
                Some(v) => v.parse().map_err(|_| bad()),
                None => default.ok_or_else(bad),
            }
        };
        let kind = match kind.trim() {
            "upper" => ConstructionKind::UpperLevels { halves: num("s", None)?, fixed: num("fixed", Some(1))? },
            "middle" => ConstructionKind::MiddleLevels { levels: num("m", None)? },
            "fq" => {
                let q = num("q", None)?;
                let i = num("i", None)?;
                let variant = match params.remove("variant").as_deref() {
                    Some("literal") => FqVariant::Literal,
                    Some("corrected") | None => FqVariant::Corrected,
                    Some(_) => return Err(bad()),
                };
                ConstructionKind::Fq { q, i, variant }
            }
            "star" => ConstructionKind::Star { element: num("element", Some(1))? },
            _ => return Err(bad()),
        };
        if !params.is_empty() {
            return Err(bad());
        }
        let spec = ConstructionSpec { n, kind };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCandidate {
    pub label: String,
    pub spec: ConstructionSpec,
    #[serde(serialize_with = "serialize_count")]
    pub size: BigCount,
}

/// Candidate construction sizes for one extremal problem and their maximum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub n: usize,
    pub mode: ChainMode,
    pub p: usize,
    pub q: usize,
    pub variant: Option<FqVariant>,
    pub candidates: Vec<BoundCandidate>,
    #[serde(serialize_with = "serialize_count")]
    pub maximum: BigCount,
    pub attained_by: Vec<String>,
}

impl BoundReport {
    fn from_candidates(
        n: usize,
        mode: ChainMode,
        p: usize,
        q: usize,
        variant: Option<FqVariant>,
        candidates: Vec<BoundCandidate>,
    ) -> BoundReport {
        let maximum = candidates.iter().map(|c| c.size.clone()).max().unwrap_or_default();
        let attained_by = candidates.iter().filter(|c| c.size == maximum).map(|c| c.label.clone()).collect();
        BoundReport { n, mode, p, q, variant, candidates, maximum, attained_by }
    }

    /// The first candidate attaining the maximum.
    pub fn best(&self) -> Option<&BoundCandidate> {
        self.candidates.iter().find(|c| c.size == self.maximum)
    }
}

fn candidate(label: impl Into<String>, spec: ConstructionSpec) -> Result<BoundCandidate, Error> {
    Ok(BoundCandidate { label: label.into(), size: spec.size()?, spec })
}

/// Conjectured or proven extremal values by mode:
///
/// * plain: upper `(n+p+q-1)/2` levels;
/// * strong: `max(|R1|, |R2|)` with `R1` the upper `(n+p)/2` levels and `R2`
///   the middle `q-1` levels;
/// * total (`p >= q`): `max_i |F_q(i)|` against the middle `p-1` levels, one
///   report per `F_q` variant (literal first).
pub fn extremal_formula(n: usize, mode: ChainMode, p: usize, q: usize) -> Result<Vec<BoundReport>, Error> {
    check_n(n)?;
    if p == 0 || q == 0 {
        return Err(Error::InvalidParameters(format!("p and q must be positive (p={p}, q={q})")));
    }
    match mode {
        ChainMode::Plain => {
            let c = candidate("upper", ConstructionSpec::upper(n, n + p + q - 1))?;
            Ok(vec![BoundReport::from_candidates(n, mode, p, q, None, vec![c])])
        }
        ChainMode::Strong => {
            let r1 = candidate("R1", ConstructionSpec::upper(n, n + p))?;
            let r2 = candidate("R2", ConstructionSpec::middle(n, q - 1))?;
            Ok(vec![BoundReport::from_candidates(n, mode, p, q, None, vec![r1, r2])])
        }
        ChainMode::Total => {
            if p < q {
                return Err(Error::InvalidParameters(format!("total mode requires p >= q (p={p}, q={q})")));
            }
            [FqVariant::Literal, FqVariant::Corrected]
                .into_iter()
                .map(|variant| {
                    let mut cands = (1..=n)
                        .map(|i| candidate(format!("F_q({i})"), ConstructionSpec::fq(n, q, i, variant)))
                        .collect::<Result<Vec<_>, _>>()?;
                    cands.push(candidate("R", ConstructionSpec::middle(n, p - 1))?);
                    Ok(BoundReport::from_candidates(n, mode, p, q, Some(variant), cands))
                })
                .collect()
        }
    }
}

/// `2^(n-1)`, the intersecting-family maximum.
pub fn half_cube(n: usize) -> BigCount {
    BigUint::one() << (n.saturating_sub(1))
}
