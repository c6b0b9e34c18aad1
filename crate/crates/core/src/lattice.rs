//! Subsets of `[n]` as bitmasks, families of them, exact binomials and the
//! plain-text family format.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, ParseError, ParseErrorKind};

/// Largest supported ground-set size.
pub const MAX_N: usize = 24;

/// Exact non-negative count.
pub type BigCount = BigUint;

/// One subset of `[n]`; element `i` is present iff bit `i - 1` is set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SetMask(pub u32);

impl SetMask {
    pub const EMPTY: SetMask = SetMask(0);

    pub fn full(n: usize) -> SetMask {
        SetMask(low_bits(n))
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> SetMask {
        let mut bits = 0u32;
        for e in elements {
            debug_assert!((1..=32).contains(&e));
            bits |= 1 << (e - 1);
        }
        SetMask(bits)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, element: usize) -> bool {
        element >= 1 && element <= 32 && self.0 & (1 << (element - 1)) != 0
    }

    #[inline]
    pub fn is_subset_of(self, other: SetMask) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_proper_subset_of(self, other: SetMask) -> bool {
        self != other && self.is_subset_of(other)
    }

    #[inline]
    pub fn is_disjoint(self, other: SetMask) -> bool {
        self.0 & other.0 == 0
    }

    /// Elements in ascending order, 1-based.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits & (1 << i) != 0).map(|i| i + 1)
    }

    pub fn fits(self, n: usize) -> bool {
        self.0 & !low_bits(n) == 0
    }

    /// Key of the canonical order: popcount, then numeric value.
    #[inline]
    pub fn canonical_key(self) -> (u32, u32) {
        (self.0.count_ones(), self.0)
    }
}

impl fmt::Debug for SetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

/// Family-file syntax: `1,2,5` or `-` for the empty set.
impl fmt::Display for SetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "-");
        }
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl Serialize for SetMask {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for e in self.elements() {
            seq.serialize_element(&e)?;
        }
        seq.end()
    }
}

#[inline]
pub(crate) fn low_bits(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Bitwise complement inside the low `n` bits.
#[inline]
pub fn complement(m: SetMask, n: usize) -> SetMask {
    SetMask(!m.0 & low_bits(n))
}

/// A duplicate-free family of subsets of `[n]`, kept in canonical order.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SetFamily {
    n: usize,
    #[serde(rename = "sets")]
    members: Vec<SetMask>,
}

impl SetFamily {
    pub fn empty(n: usize) -> Result<SetFamily, Error> {
        check_n(n)?;
        Ok(SetFamily { n, members: Vec::new() })
    }

    /// Builds a family, sorting into canonical order. Rejects duplicates and
    /// masks with bits above `n`.
    pub fn new(n: usize, members: Vec<SetMask>) -> Result<SetFamily, Error> {
        check_n(n)?;
        let mut members = members;
        for &m in &members {
            if !m.fits(n) {
                return Err(Error::MaskOutOfRange { mask: m.0, n });
            }
        }
        members.sort_unstable_by_key(|m| m.canonical_key());
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateSet(format!("{:?}", w[0])));
        }
        Ok(SetFamily { n, members })
    }

    /// Like [`SetFamily::new`] but drops duplicates instead of failing.
    pub fn from_iter_dedup<I: IntoIterator<Item = SetMask>>(n: usize, it: I) -> Result<SetFamily, Error> {
        let mut members: Vec<SetMask> = it.into_iter().collect();
        members.sort_unstable_by_key(|m| m.canonical_key());
        members.dedup();
        SetFamily::new(n, members)
    }

    pub(crate) fn from_sorted_unchecked(n: usize, members: Vec<SetMask>) -> SetFamily {
        debug_assert!(members.windows(2).all(|w| w[0].canonical_key() < w[1].canonical_key()));
        SetFamily { n, members }
    }

    /// The whole power set `2^[n]`.
    pub fn power_set(n: usize) -> Result<SetFamily, Error> {
        check_n(n)?;
        let mut members: Vec<SetMask> = (0..=low_bits(n)).map(SetMask).collect();
        members.sort_unstable_by_key(|m| m.canonical_key());
        Ok(SetFamily { n, members })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn members(&self) -> &[SetMask] {
        &self.members
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, m: SetMask) -> bool {
        self.members.binary_search_by_key(&m.canonical_key(), |x| x.canonical_key()).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = SetMask> + '_ {
        self.members.iter().copied()
    }

    /// Subfamily of members satisfying `keep`.
    pub fn filter<F: FnMut(SetMask) -> bool>(&self, mut keep: F) -> SetFamily {
        SetFamily::from_sorted_unchecked(self.n, self.members.iter().copied().filter(|&m| keep(m)).collect())
    }

    /// The family of complements.
    pub fn complemented(&self) -> SetFamily {
        let members = self.members.iter().map(|&m| complement(m, self.n)).collect();
        SetFamily::new(self.n, members).expect("complement preserves validity")
    }

    pub fn union(&self, other: &SetFamily) -> Result<SetFamily, Error> {
        if self.n != other.n {
            return Err(Error::MismatchedN(self.n, other.n));
        }
        SetFamily::from_iter_dedup(self.n, self.iter().chain(other.iter()))
    }

    pub fn difference(&self, other: &SetFamily) -> SetFamily {
        self.filter(|m| !other.contains(m))
    }

    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        self.n == other.n && self.iter().all(|m| other.contains(m))
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetFamily(n={}, {:?})", self.n, self.members)
    }
}

/// Canonical family-file text.
impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n)?;
        for m in &self.members {
            writeln!(f, "{m}")?;
        }
        Ok(())
    }
}

pub(crate) fn check_n(n: usize) -> Result<(), Error> {
    if (1..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedN(n))
    }
}

/// Exact binomial coefficient, zero outside `0 <= k <= n`.
pub fn binom(n: i64, k: i64) -> Result<BigCount, Error> {
    if n < 0 {
        return Err(Error::NegativeN(n));
    }
    Ok(binom_u(n as u64, k))
}

pub(crate) fn binom_u(n: u64, k: i64) -> BigCount {
    if k < 0 || k as u64 > n {
        return BigCount::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigCount::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Small binomial for table-sized arguments.
pub(crate) fn binom_small(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// All `k`-subsets of `[n]` in numeric order (Gosper's hack).
pub fn enumerate_level(n: usize, k: usize) -> Result<SetFamily, Error> {
    if n > MAX_N {
        return Err(Error::UnsupportedN(n));
    }
    if k > n {
        return Err(Error::LevelOutOfRange { n, k });
    }
    Ok(SetFamily { n, members: level_masks(n, k) })
}

pub(crate) fn level_masks(n: usize, k: usize) -> Vec<SetMask> {
    if k == 0 {
        return vec![SetMask::EMPTY];
    }
    let limit = 1u64 << n;
    let mut out = Vec::with_capacity(binom_small(n, k) as usize);
    let mut v: u64 = (1u64 << k) - 1;
    while v < limit {
        out.push(SetMask(v as u32));
        let t = v | (v - 1);
        v = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
    }
    out
}

/// Parses the family-file format.
pub fn parse_family(text: &str) -> Result<SetFamily, ParseError> {
    let mut n: Option<usize> = None;
    let mut members = Vec::new();
    let mut seen: HashSet<SetMask> = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |kind| ParseError { line: line_no, kind };
        let Some(n) = n else {
            let rest = line
                .strip_prefix('n')
                .filter(|r| r.starts_with(char::is_whitespace))
                .ok_or_else(|| err(ParseErrorKind::MissingHeader))?;
            let value: usize = rest
                .trim()
                .parse()
                .map_err(|_| err(ParseErrorKind::Malformed(line.to_string())))?;
            if !(1..=MAX_N).contains(&value) {
                return Err(err(ParseErrorKind::BadN(value)));
            }
            n = Some(value);
            continue;
        };
        let mask = if line == "-" {
            SetMask::EMPTY
        } else {
            let mut bits = 0u32;
            let mut last = 0usize;
            for tok in line.split(',') {
                let tok = tok.trim();
                let e: usize = tok
                    .parse()
                    .map_err(|_| err(ParseErrorKind::Malformed(line.to_string())))?;
                if e == 0 || e > n {
                    return Err(err(ParseErrorKind::ElementOutOfRange { element: e, n }));
                }
                if e <= last {
                    return Err(err(ParseErrorKind::NotAscending(line.to_string())));
                }
                last = e;
                bits |= 1 << (e - 1);
            }
            SetMask(bits)
        };
        if !seen.insert(mask) {
            return Err(err(ParseErrorKind::DuplicateSet(mask.to_string())));
        }
        members.push(mask);
    }

    let n = n.ok_or(ParseError { line: 0, kind: ParseErrorKind::MissingHeader })?;
    members.sort_unstable_by_key(|m| m.canonical_key());
    Ok(SetFamily { n, members })
}

/// Canonical family-file text; inverse of [`parse_family`].
pub fn serialize_family(family: &SetFamily) -> String {
    family.to_string()
}

pub(crate) fn serialize_count<S: Serializer>(c: &BigCount, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&c.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::new(n, sets.iter().map(|s| SetMask::from_elements(s.iter().copied())).collect()).unwrap()
    }

    #[test]
    fn binom_values() {
        assert_eq!(binom(4, 2).unwrap(), BigCount::from(6u32));
        assert_eq!(binom(0, 0).unwrap(), BigCount::from(1u32));
        assert_eq!(binom(5, 6).unwrap(), BigCount::zero());
        assert_eq!(binom(5, -1).unwrap(), BigCount::zero());
        assert!(binom(-1, 0).is_err());
        assert_eq!(binom(24, 12).unwrap(), BigCount::from(2_704_156u32));
        assert_eq!(binom(64, 32).unwrap().to_string(), "1832624140942590534");
    }

    #[test]
    fn binomial_row_sums_to_power_of_two() {
        for n in 0..=24i64 {
            let sum: BigCount = (0..=n).map(|k| binom(n, k).unwrap()).sum();
            assert_eq!(sum, BigCount::one() << n as usize);
        }
    }

    #[test]
    fn complement_examples() {
        let m = SetMask::from_elements([1, 2]);
        assert_eq!(complement(m, 4), SetMask::from_elements([3, 4]));
        assert_eq!(complement(SetMask::EMPTY, 3), SetMask::from_elements([1, 2, 3]));
        for n in 1..=8 {
            for bits in 0..(1u32 << n) {
                let m = SetMask(bits);
                let c = complement(m, n);
                assert_eq!(complement(c, n), m);
                assert_eq!(c.len(), n - m.len());
            }
        }
    }

    #[test]
    fn level_sizes_match_binomials() {
        for n in 1..=12 {
            for k in 0..=n {
                let level = enumerate_level(n, k).unwrap();
                assert_eq!(level.len() as u64, binom_small(n, k));
                assert!(level.iter().all(|m| m.len() == k && m.fits(n)));
            }
        }
        assert_eq!(enumerate_level(4, 2).unwrap().len(), 6);
        assert_eq!(enumerate_level(3, 0).unwrap().members(), &[SetMask::EMPTY]);
        assert_eq!(enumerate_level(5, 5).unwrap().members(), &[SetMask::full(5)]);
        assert!(enumerate_level(3, 4).is_err());
    }

    #[test]
    fn parse_example() {
        let f = parse_family("n 3\n1,2\n3\n-").unwrap();
        assert_eq!(f, fam(3, &[&[1, 2], &[3], &[]]));
        assert_eq!(serialize_family(&f), "n 3\n-\n3\n1,2\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let e = parse_family("n 3\n4").unwrap_err();
        assert_eq!(e.to_string(), "element 4 exceeds n=3 at line 2");
        let e = parse_family("# header\nn 3\n1,2\n2,1").unwrap_err();
        assert_eq!(e.line, 4);
        let e = parse_family("n 3\n1\n1").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::DuplicateSet(_)));
        assert_eq!(e.line, 3);
        let e = parse_family("n 3\n1,x").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Malformed(_)));
        assert!(parse_family("1,2").is_err());
        assert!(parse_family("n 25").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let f = parse_family("# a family\n\nn 4  # four\n1,4 # a set\n\n2\n").unwrap();
        assert_eq!(f, fam(4, &[&[1, 4], &[2]]));
    }

    #[test]
    fn family_rejects_bad_members() {
        assert!(SetFamily::new(2, vec![SetMask(4)]).is_err());
        assert!(SetFamily::new(2, vec![SetMask(1), SetMask(1)]).is_err());
        assert!(SetFamily::new(0, vec![]).is_err());
    }
}
