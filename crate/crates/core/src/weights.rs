//! Permutation-method grounds: the chain-pair and the circle of intervals,
//! with the exact weight `binom(n, |F|) / g_|F|` on each member.
//!
//! Counting a family `F` against every relabeling of a ground `G` gives
//! `|F| * n!` on one side and the sum of `F ∩ α(G)` weights on the other, so
//! the largest weight of a valid subfamily of `G` bounds `|F|` for any
//! hereditary property.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::Error;
use crate::lattice::{binom_small, binom_u, check_n, complement, SetFamily, SetMask};

/// Exact non-negative rational weight.
pub type Weight = BigRational;

/// Always `p/q`, including integers (`3/1`).
pub fn fmt_weight(w: &Weight) -> String {
    format!("{}/{}", w.numer(), w.denom())
}

pub(crate) fn serialize_weight<S: serde::Serializer>(w: &Weight, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_weight(w))
}

pub(crate) fn weight_from_count(c: &BigUint) -> Weight {
    BigRational::from_integer(BigInt::from(c.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroundKind {
    /// Full chain along `ordering` plus the complements of its members.
    ChainPair { ordering: Vec<usize> },
    /// All cyclic intervals of `[n]`, including the empty set and `[n]`.
    Circle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGround {
    n: usize,
    kind: GroundKind,
    members: SetFamily,
    level_counts: Vec<usize>,
}

impl WeightedGround {
    fn new(n: usize, kind: GroundKind, members: SetFamily) -> WeightedGround {
        let mut level_counts = vec![0; n + 1];
        for m in members.iter() {
            level_counts[m.len()] += 1;
        }
        WeightedGround { n, kind, members, level_counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> &GroundKind {
        &self.kind
    }

    pub fn is_circle(&self) -> bool {
        self.kind == GroundKind::Circle
    }

    pub fn members(&self) -> &SetFamily {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `g_i`: number of ground members of size `i`.
    pub fn level_counts(&self) -> &[usize] {
        &self.level_counts
    }

    /// Weight of a ground member, `None` for non-members.
    pub fn weight(&self, m: SetMask) -> Option<Weight> {
        if !self.members.contains(m) {
            return None;
        }
        let g = self.level_counts[m.len()];
        Some(BigRational::new(BigInt::from(binom_u(self.n as u64, m.len() as i64)), BigInt::from(g)))
    }

    /// Common denominator of all member weights.
    pub(crate) fn weight_scale(&self) -> u64 {
        self.level_counts.iter().filter(|&&g| g > 0).fold(1u64, |acc, &g| lcm(acc, g as u64))
    }

    /// Member weight times [`weight_scale`](Self::weight_scale), as an integer.
    pub(crate) fn scaled_weight(&self, m: SetMask) -> u64 {
        let g = self.level_counts[m.len()] as u64;
        binom_small(self.n, m.len()) * (self.weight_scale() / g)
    }

    /// The ground in family-file syntax with a `w=p/q` column.
    pub fn export(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for m in self.members.iter() {
            let w = self.weight(m).expect("member");
            out.push_str(&format!("{m} w={}\n", fmt_weight(&w)));
        }
        out
    }
}

impl fmt::Display for WeightedGround {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GroundKind::Circle => write!(f, "circle(n={})", self.n),
            GroundKind::ChainPair { ordering } => {
                let ord: Vec<String> = ordering.iter().map(|e| e.to_string()).collect();
                write!(f, "chain-pair(n={}, ordering={})", self.n, ord.join(" "))
            }
        }
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / num_integer::gcd(a, b) * b
}

/// Interval of `len` consecutive elements starting at `start` (1-based, cyclic).
pub fn interval(n: usize, start: usize, len: usize) -> SetMask {
    SetMask::from_elements((0..len).map(|k| (start - 1 + k) % n + 1))
}

/// The circle ground: `n(n-1) + 2` cyclic intervals.
pub fn circle_ground(n: usize) -> Result<WeightedGround, Error> {
    check_n(n)?;
    if n < 2 {
        return Err(Error::InvalidParameters("the circle needs n >= 2".into()));
    }
    let mut members = vec![SetMask::EMPTY, SetMask::full(n)];
    for len in 1..n {
        for start in 1..=n {
            members.push(interval(n, start, len));
        }
    }
    let family = SetFamily::new(n, members)?;
    Ok(WeightedGround::new(n, GroundKind::Circle, family))
}

/// Chain-pair along `ordering`, a permutation of `[n]`: the prefixes
/// `C_0 ⊂ C_1 ⊂ ... ⊂ C_n` and their complements, `2n` sets in all.
pub fn chain_pair_ground(n: usize, ordering: &[usize]) -> Result<WeightedGround, Error> {
    check_n(n)?;
    let mut seen = vec![false; n + 1];
    let valid = ordering.len() == n
        && ordering.iter().all(|&e| (1..=n).contains(&e) && !std::mem::replace(&mut seen[e], true));
    if !valid {
        return Err(Error::InvalidOrdering(format!("{ordering:?}")));
    }
    let mut members = Vec::with_capacity(2 * n + 2);
    let mut prefix = SetMask::EMPTY;
    members.push(prefix);
    for &e in ordering {
        prefix = SetMask(prefix.bits() | 1 << (e - 1));
        members.push(prefix);
    }
    let comps: Vec<SetMask> = members.iter().map(|&m| complement(m, n)).collect();
    members.extend(comps);
    let family = SetFamily::from_iter_dedup(n, members)?;
    Ok(WeightedGround::new(n, GroundKind::ChainPair { ordering: ordering.to_vec() }, family))
}

/// Total weight of `sub`, which must lie inside the ground.
pub fn weight_of(ground: &WeightedGround, sub: &SetFamily) -> Result<Weight, Error> {
    if sub.n() != ground.n {
        return Err(Error::MismatchedN(sub.n(), ground.n));
    }
    let mut total = Weight::zero();
    for m in sub.iter() {
        total += ground.weight(m).ok_or_else(|| Error::NotInGround(m.to_string()))?;
    }
    Ok(total)
}

/// The `n` chain-pairs obtained by rotating the interval chain
/// `∅ ⊂ [1,1] ⊂ [1,2] ⊂ ... ⊂ [n]` by `0..n` steps around the circle.
pub fn rotated_chain_pairs(n: usize) -> Result<Vec<WeightedGround>, Error> {
    check_n(n)?;
    if n < 2 {
        return Err(Error::InvalidParameters("rotations need n >= 2".into()));
    }
    (0..n)
        .map(|shift| {
            let ordering: Vec<usize> = (0..n).map(|k| (k + shift) % n + 1).collect();
            chain_pair_ground(n, &ordering)
        })
        .collect()
}

/// How many rotated chain-pairs contain each circle interval.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoubleCoverReport {
    pub n: usize,
    pub coverage: Vec<(SetMask, usize)>,
    /// Every nonempty proper interval lies in exactly two chain-pairs.
    pub proper_twice: bool,
    /// The empty set and `[n]` lie in all `n` chain-pairs.
    pub ends_everywhere: bool,
}

impl DoubleCoverReport {
    pub fn holds(&self) -> bool {
        self.proper_twice && self.ends_everywhere
    }
}

pub fn double_cover_check(n: usize) -> Result<DoubleCoverReport, Error> {
    let circle = circle_ground(n)?;
    let pairs = rotated_chain_pairs(n)?;
    let full = SetMask::full(n);
    let coverage: Vec<(SetMask, usize)> = circle
        .members()
        .iter()
        .map(|m| (m, pairs.iter().filter(|c| c.members().contains(m)).count()))
        .collect();
    let is_end = |m: SetMask| m.is_empty() || m == full;
    let proper_twice = coverage.iter().filter(|(m, _)| !is_end(*m)).all(|&(_, c)| c == 2);
    let ends_everywhere = coverage.iter().filter(|(m, _)| is_end(*m)).all(|&(_, c)| c == n);
    Ok(DoubleCoverReport { n, coverage, proper_twice, ends_everywhere })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn ratio(p: i64, q: i64) -> Weight {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn circle_shape() {
        let c = circle_ground(4).unwrap();
        assert_eq!(c.len(), 14);
        assert_eq!(circle_ground(3).unwrap().level_counts(), &[1, 3, 3, 1]);
        assert_eq!(c.weight(SetMask::from_elements([4, 1])), Some(ratio(3, 2)));
        assert_eq!(c.weight(SetMask::from_elements([1, 3])), None);
        for n in 2..=10 {
            let c = circle_ground(n).unwrap();
            assert_eq!(c.len(), n * (n - 1) + 2);
            assert!(c.level_counts()[1..n].iter().all(|&g| g == n));
        }
        assert!(circle_ground(1).is_err());
    }

    #[test]
    fn chain_pair_shape() {
        let g = chain_pair_ground(3, &[1, 2, 3]).unwrap();
        let expect: Vec<SetMask> = [&[][..], &[1], &[3], &[1, 2], &[2, 3], &[1, 2, 3]]
            .iter()
            .map(|s| SetMask::from_elements(s.iter().copied()))
            .collect();
        assert_eq!(g.members().members(), expect.as_slice());
        assert_eq!(g.weight(SetMask::from_elements([1, 2])), Some(ratio(3, 2)));
        assert_eq!(g.weight(SetMask::EMPTY), Some(Weight::one()));
        assert_eq!(g.weight(SetMask::full(3)), Some(Weight::one()));
        assert!(chain_pair_ground(3, &[1, 1, 2]).is_err());
        assert!(chain_pair_ground(3, &[1, 2]).is_err());
        assert!(chain_pair_ground(3, &[1, 2, 4]).is_err());
        for n in 1..=10 {
            let ord: Vec<usize> = (1..=n).rev().collect();
            assert_eq!(chain_pair_ground(n, &ord).unwrap().len(), 2 * n);
        }
    }

    #[test]
    fn weight_examples() {
        let c = circle_ground(4).unwrap();
        let upper3 = crate::constructions::ConstructionSpec::upper(4, 6).build().unwrap();
        let on_circle = upper3.filter(|m| c.members().contains(m));
        assert_eq!(weight_of(&c, &on_circle).unwrap(), ratio(11, 1));
        assert_eq!(weight_of(&c, &SetFamily::empty(4).unwrap()).unwrap(), Weight::zero());
        assert!(weight_of(&c, &upper3).is_err());
    }

    #[test]
    fn levels_weigh_their_cardinality() {
        for n in 2..=10 {
            let c = circle_ground(n).unwrap();
            let mut total = Weight::zero();
            for i in 0..=n {
                let level = c.members().filter(|m| m.len() == i);
                let w = weight_of(&c, &level).unwrap();
                assert_eq!(w, weight_from_count(&binom_u(n as u64, i as i64)));
                total += w;
            }
            assert_eq!(total, Weight::from_integer(BigInt::one() << n));
        }
    }

    #[test]
    fn rotations() {
        let pairs = rotated_chain_pairs(4).unwrap();
        assert_eq!(pairs.len(), 4);
        let circle = circle_ground(4).unwrap();
        for c in &pairs {
            assert_eq!(c.len(), 8);
            assert!(c.members().is_subfamily_of(circle.members()));
        }
        for j in 0..=4 {
            assert!(pairs[0].members().contains(SetMask::from_elements(1..=j)));
            assert!(pairs[0].members().contains(SetMask::from_elements(j + 1..=4)));
        }
    }

    #[test]
    fn double_cover_small() {
        let r = double_cover_check(5).unwrap();
        assert!(r.holds());
        assert_eq!(r.coverage.iter().filter(|(m, c)| !m.is_empty() && m.len() < 5 && *c == 2).count(), 20);
        assert_eq!(r.coverage.iter().find(|(m, _)| m.is_empty()).unwrap().1, 5);
    }

    #[test]
    fn export_format() {
        let g = chain_pair_ground(2, &[2, 1]).unwrap();
        assert_eq!(g.export(), "n 2\n- w=1/1\n1 w=1/1\n2 w=1/1\n1,2 w=1/1\n");
        let c = circle_ground(3).unwrap();
        assert!(c.export().contains("1,2 w=1/1\n"));
        assert_eq!(circle_ground(4).unwrap().export().lines().filter(|l| l.ends_with("w=3/2")).count(), 4);
    }
}
