//! Family properties, their decision procedures, and violation witnesses.
//!
//! Every chain-intersecting mode reduces to the per-member chain profile:
//! `h(F)` is the longest chain in the family with top `F`, `u(F)` the longest
//! with bottom `F`. A family violates
//!
//! * plain `(p,q)` iff some `A, B` with `h(A) >= p`, `h(B) >= q` are disjoint,
//! * strong `(p,q)` iff some `A, B` with `h(A) >= p`, `u(B) >= q` are disjoint,
//! * total `(p,q)` iff some `A, B` with `u(A) >= p`, `u(B) >= q` are disjoint.
//!
//! The two chains are chosen independently and may share members, so a family
//! containing the empty set violates every mode at `(1,1)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::Error;
use crate::lattice::{complement, SetFamily, SetMask};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainMode {
    /// Tops of both chains must meet.
    Plain,
    /// Top of the first chain must meet the bottom of the second.
    Strong,
    /// Bottoms of both chains must meet.
    Total,
}

impl fmt::Display for ChainMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainMode::Plain => "plain",
            ChainMode::Strong => "strong",
            ChainMode::Total => "total",
        })
    }
}

impl FromStr for ChainMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(ChainMode::Plain),
            "strong" => Ok(ChainMode::Strong),
            "total" => Ok(ChainMode::Total),
            _ => Err(Error::InvalidProperty(format!("unknown mode `{s}`"))),
        }
    }
}

/// A hereditary family property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PropertySpec {
    ChainIntersect { mode: ChainMode, p: usize, q: usize },
    /// No chain of `k + 1` members.
    KSperner(usize),
    Intersecting,
    /// No set together with its complement.
    ComplementFree,
    /// No `r`-chain together with the complements of all its members.
    Ccpf(usize),
}

impl PropertySpec {
    pub fn plain(p: usize, q: usize) -> PropertySpec {
        PropertySpec::ChainIntersect { mode: ChainMode::Plain, p, q }
    }

    pub fn strong(p: usize, q: usize) -> PropertySpec {
        PropertySpec::ChainIntersect { mode: ChainMode::Strong, p, q }
    }

    pub fn total(p: usize, q: usize) -> PropertySpec {
        PropertySpec::ChainIntersect { mode: ChainMode::Total, p, q }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let ok = match *self {
            PropertySpec::ChainIntersect { p, q, .. } => p >= 1 && q >= 1,
            PropertySpec::KSperner(k) => k >= 1,
            PropertySpec::Ccpf(r) => r >= 1,
            PropertySpec::Intersecting | PropertySpec::ComplementFree => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidProperty(format!("parameters must be positive in `{self}`")))
        }
    }

    /// Intersecting is plain `(1,1)`; everything else is already normal.
    pub fn normalized(&self) -> PropertySpec {
        match self {
            PropertySpec::Intersecting => PropertySpec::plain(1, 1),
            other => *other,
        }
    }
}

impl fmt::Display for PropertySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertySpec::ChainIntersect { mode, p, q } => write!(f, "{mode}:{p},{q}"),
            PropertySpec::KSperner(k) => write!(f, "ksperner:{k}"),
            PropertySpec::Intersecting => write!(f, "intersecting"),
            PropertySpec::ComplementFree => write!(f, "complement-free"),
            PropertySpec::Ccpf(r) => write!(f, "ccpf:{r}"),
        }
    }
}

impl Serialize for PropertySpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl FromStr for PropertySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::InvalidProperty(s.to_string());
        let s = s.trim();
        let spec = match s {
            "intersecting" => PropertySpec::Intersecting,
            "complement-free" => PropertySpec::ComplementFree,
            _ => {
                let (name, args) = s.split_once(':').ok_or_else(bad)?;
                let nums = args
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>, _>>()?;
                match (name, nums.as_slice()) {
                    ("plain" | "strong" | "total", &[p, q]) => {
                        PropertySpec::ChainIntersect { mode: name.parse()?, p, q }
                    }
                    ("ksperner", &[k]) => PropertySpec::KSperner(k),
                    ("ccpf", &[r]) => PropertySpec::Ccpf(r),
                    _ => return Err(bad()),
                }
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Per-member chain heights and up-depths, aligned with `members()`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainProfile {
    pub heights: Vec<u32>,
    pub updepths: Vec<u32>,
}

impl ChainProfile {
    pub fn max_height(&self) -> u32 {
        self.heights.iter().copied().max().unwrap_or(0)
    }
}

/// Families above this size switch from pairwise scans to subset tables.
const PAIRWISE_LIMIT: usize = 2048;

pub fn chain_profile(family: &SetFamily) -> ChainProfile {
    ChainProfile { heights: heights(family), updepths: updepths(family) }
}

fn heights(family: &SetFamily) -> Vec<u32> {
    let members = family.members();
    if members.len() <= PAIRWISE_LIMIT {
        // canonical order lists every proper subset before its supersets
        let mut h = vec![0u32; members.len()];
        for i in 0..members.len() {
            let best = (0..i)
                .filter(|&j| members[j].is_proper_subset_of(members[i]))
                .map(|j| h[j])
                .max()
                .unwrap_or(0);
            h[i] = best + 1;
        }
        return h;
    }
    let n = family.n();
    let index = index_table(family);
    let mut down = vec![0u8; 1 << n];
    let mut h = vec![0u32; members.len()];
    for mask in 0..(1usize << n) {
        let mut best = 0u8;
        let mut rest = mask;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            best = best.max(down[mask ^ bit]);
            rest ^= bit;
        }
        if index[mask] != u32::MAX {
            h[index[mask] as usize] = best as u32 + 1;
            down[mask] = best + 1;
        } else {
            down[mask] = best;
        }
    }
    h
}

fn updepths(family: &SetFamily) -> Vec<u32> {
    let members = family.members();
    if members.len() <= PAIRWISE_LIMIT {
        let mut u = vec![0u32; members.len()];
        for i in (0..members.len()).rev() {
            let best = (i + 1..members.len())
                .filter(|&j| members[i].is_proper_subset_of(members[j]))
                .map(|j| u[j])
                .max()
                .unwrap_or(0);
            u[i] = best + 1;
        }
        return u;
    }
    let n = family.n();
    let full = (1usize << n) - 1;
    let index = index_table(family);
    let mut up = vec![0u8; 1 << n];
    let mut u = vec![0u32; members.len()];
    for mask in (0..=full).rev() {
        let mut best = 0u8;
        let mut missing = full & !mask;
        while missing != 0 {
            let bit = missing & missing.wrapping_neg();
            best = best.max(up[mask | bit]);
            missing ^= bit;
        }
        if index[mask] != u32::MAX {
            u[index[mask] as usize] = best as u32 + 1;
            up[mask] = best + 1;
        } else {
            up[mask] = best;
        }
    }
    u
}

fn index_table(family: &SetFamily) -> Vec<u32> {
    let mut index = vec![u32::MAX; 1 << family.n()];
    for (i, m) in family.iter().enumerate() {
        index[m.bits() as usize] = i as u32;
    }
    index
}

/// First pair `(a, b)` with `a` from `left`, `b` from `right`, `a ∩ b = ∅`.
fn disjoint_pair(n: usize, left: &[SetMask], right: &[SetMask]) -> Option<(SetMask, SetMask)> {
    if left.is_empty() || right.is_empty() {
        return None;
    }
    if left.len().saturating_mul(right.len()) <= 1 << 22 {
        for &a in left {
            if let Some(&b) = right.iter().find(|b| a.is_disjoint(**b)) {
                return Some((a, b));
            }
        }
        return None;
    }
    // below[mask] = 1 + (some member of `right` inside mask), 0 if none
    let full = (1usize << n) - 1;
    let mut below = vec![0u32; 1 << n];
    for &b in right.iter().rev() {
        below[b.bits() as usize] = b.bits() + 1;
    }
    for bit in 0..n {
        for mask in 0..=full {
            if mask & (1 << bit) != 0 && below[mask] == 0 {
                below[mask] = below[mask ^ (1 << bit)];
            }
        }
    }
    left.iter().find_map(|&a| match below[complement(a, n).bits() as usize] {
        0 => None,
        b => Some((a, SetMask(b - 1))),
    })
}

/// A configuration that violates a property. Chains are listed bottom-up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A `p`-chain and a `q`-chain whose relevant ends are disjoint.
    ChainPair { a_chain: Vec<SetMask>, b_chain: Vec<SetMask> },
    /// A chain longer than a k-Sperner family allows.
    Chain { chain: Vec<SetMask> },
    /// A chain all of whose members' complements are present.
    ComplementedChain { chain: Vec<SetMask> },
}

fn is_chain(chain: &[SetMask]) -> bool {
    chain.windows(2).all(|w| w[0].is_proper_subset_of(w[1]))
}

impl Witness {
    /// Re-derives the violation directly from the definitions.
    pub fn validate(&self, family: &SetFamily, prop: &PropertySpec) -> bool {
        let n = family.n();
        let present = |c: &[SetMask]| c.iter().all(|&m| family.contains(m));
        match (self, prop.normalized()) {
            (Witness::ChainPair { a_chain, b_chain }, PropertySpec::ChainIntersect { mode, p, q }) => {
                if a_chain.len() != p || b_chain.len() != q {
                    return false;
                }
                if !(is_chain(a_chain) && is_chain(b_chain) && present(a_chain) && present(b_chain)) {
                    return false;
                }
                let (a, b) = match mode {
                    ChainMode::Plain => (a_chain[p - 1], b_chain[q - 1]),
                    ChainMode::Strong => (a_chain[p - 1], b_chain[0]),
                    ChainMode::Total => (a_chain[0], b_chain[0]),
                };
                a.is_disjoint(b)
            }
            (Witness::Chain { chain }, PropertySpec::KSperner(k)) => {
                chain.len() == k + 1 && is_chain(chain) && present(chain)
            }
            (Witness::ComplementedChain { chain }, PropertySpec::Ccpf(r)) => {
                let comps: Vec<SetMask> = chain.iter().map(|&m| complement(m, n)).collect();
                chain.len() == r && is_chain(chain) && present(chain) && present(&comps)
            }
            (Witness::ComplementedChain { chain }, PropertySpec::ComplementFree) => {
                chain.len() == 1 && family.contains(chain[0]) && family.contains(complement(chain[0], n))
            }
            _ => false,
        }
    }

    pub fn to_text(&self, n: usize) -> String {
        let mut out = String::new();
        let mut section = |title: &str, sets: &[SetMask]| {
            out.push_str(&format!("# {title}\n"));
            for m in sets {
                out.push_str(&format!("{m}\n"));
            }
        };
        match self {
            Witness::ChainPair { a_chain, b_chain } => {
                section("A-chain", a_chain);
                section("B-chain", b_chain);
            }
            Witness::Chain { chain } => section("chain", chain),
            Witness::ComplementedChain { chain } => {
                section("chain", chain);
                let comps: Vec<SetMask> = chain.iter().map(|&m| complement(m, n)).collect();
                section("complements", &comps);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated { witness: Witness },
}

impl Verdict {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, Verdict::Satisfied)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Satisfied => None,
            Verdict::Violated { witness } => Some(witness),
        }
    }
}

/// Chain of length `len` ending at `members[top]`, following `level`
/// (heights) downward.
fn chain_below(members: &[SetMask], level: &[u32], top: usize, len: usize) -> Vec<SetMask> {
    let mut chain = vec![members[top]];
    let mut cur = members[top];
    for need in (1..len).rev() {
        let next = members
            .iter()
            .zip(level)
            .find(|(m, &h)| m.is_proper_subset_of(cur) && h as usize >= need)
            .map(|(m, _)| *m)
            .expect("height invariant");
        chain.push(next);
        cur = next;
    }
    chain.reverse();
    chain
}

/// Chain of length `len` starting at `members[bottom]`, following up-depths.
fn chain_above(members: &[SetMask], level: &[u32], bottom: usize, len: usize) -> Vec<SetMask> {
    let mut chain = vec![members[bottom]];
    let mut cur = members[bottom];
    for need in (1..len).rev() {
        let next = members
            .iter()
            .zip(level)
            .find(|(m, &u)| cur.is_proper_subset_of(**m) && u as usize >= need)
            .map(|(m, _)| *m)
            .expect("up-depth invariant");
        chain.push(next);
        cur = next;
    }
    chain
}

/// Decides `prop` on `family`, returning a witness on violation.
pub fn check(family: &SetFamily, prop: &PropertySpec) -> Verdict {
    let members = family.members();
    let n = family.n();
    match prop.normalized() {
        PropertySpec::ChainIntersect { mode, p, q } => {
            let need_h = mode != ChainMode::Total;
            let need_u = mode != ChainMode::Plain;
            let h = if need_h { heights(family) } else { Vec::new() };
            let u = if need_u { updepths(family) } else { Vec::new() };
            let pick = |level: &[u32], k: usize| -> Vec<SetMask> {
                members.iter().zip(level).filter(|(_, &x)| x as usize >= k).map(|(m, _)| *m).collect()
            };
            let (left, right) = match mode {
                ChainMode::Plain => (pick(&h, p), pick(&h, q)),
                ChainMode::Strong => (pick(&h, p), pick(&u, q)),
                ChainMode::Total => (pick(&u, p), pick(&u, q)),
            };
            let Some((a, b)) = disjoint_pair(n, &left, &right) else {
                return Verdict::Satisfied;
            };
            let pos = |m: SetMask| members.iter().position(|&x| x == m).expect("member");
            let a_chain = match mode {
                ChainMode::Plain | ChainMode::Strong => chain_below(members, &h, pos(a), p),
                ChainMode::Total => chain_above(members, &u, pos(a), p),
            };
            let b_chain = match mode {
                ChainMode::Plain => chain_below(members, &h, pos(b), q),
                ChainMode::Strong | ChainMode::Total => chain_above(members, &u, pos(b), q),
            };
            Verdict::Violated { witness: Witness::ChainPair { a_chain, b_chain } }
        }
        PropertySpec::KSperner(k) => {
            let h = heights(family);
            match h.iter().position(|&x| x as usize > k) {
                None => Verdict::Satisfied,
                Some(top) => Verdict::Violated { witness: Witness::Chain { chain: chain_below(members, &h, top, k + 1) } },
            }
        }
        PropertySpec::ComplementFree => match members.iter().find(|&&m| family.contains(complement(m, n))) {
            None => Verdict::Satisfied,
            Some(&m) => Verdict::Violated { witness: Witness::ComplementedChain { chain: vec![m] } },
        },
        PropertySpec::Ccpf(r) => {
            let paired = family.filter(|m| family.contains(complement(m, n)));
            let h = heights(&paired);
            match h.iter().position(|&x| x as usize >= r) {
                None => Verdict::Satisfied,
                Some(top) => Verdict::Violated {
                    witness: Witness::ComplementedChain { chain: chain_below(paired.members(), &h, top, r) },
                },
            }
        }
        PropertySpec::Intersecting => unreachable!("normalized"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CrossVerdict {
    Satisfied,
    /// `first` from the first family, `second` from the second; one contains
    /// the other (equality counts).
    Violated { first: SetMask, second: SetMask },
}

/// Cross-Sperner test; containment includes equality.
pub fn check_cross_sperner(first: &SetFamily, second: &SetFamily) -> Result<CrossVerdict, Error> {
    if first.n() != second.n() {
        return Err(Error::MismatchedN(first.n(), second.n()));
    }
    for a in first.iter() {
        if let Some(b) = second.iter().find(|&b| a.is_subset_of(b) || b.is_subset_of(a)) {
            return Ok(CrossVerdict::Violated { first: a, second: b });
        }
    }
    Ok(CrossVerdict::Satisfied)
}

/// Largest family the brute-force oracle accepts.
pub const ORACLE_LIMIT: usize = 20;

/// Brute-force decision by enumerating member subsets that form chains.
/// Independent of the chain-profile reduction used by [`check`].
pub fn oracle_check(family: &SetFamily, prop: &PropertySpec) -> Result<Verdict, Error> {
    if family.len() > ORACLE_LIMIT {
        return Err(Error::FamilyTooLarge(family.len(), ORACLE_LIMIT));
    }
    let n = family.n();
    let members = family.members();
    let verdict = match prop.normalized() {
        PropertySpec::ChainIntersect { mode, p, q } => {
            let a_chains = chains_of_length(members, p);
            let b_chains = if p == q { a_chains.clone() } else { chains_of_length(members, q) };
            let mut found = None;
            'outer: for a in &a_chains {
                for b in &b_chains {
                    let (x, y) = match mode {
                        ChainMode::Plain => (a[p - 1], b[q - 1]),
                        ChainMode::Strong => (a[p - 1], b[0]),
                        ChainMode::Total => (a[0], b[0]),
                    };
                    if x.bits() & y.bits() == 0 {
                        found = Some(Witness::ChainPair { a_chain: a.clone(), b_chain: b.clone() });
                        break 'outer;
                    }
                }
            }
            found
        }
        PropertySpec::KSperner(k) => {
            chains_of_length(members, k + 1).into_iter().next().map(|chain| Witness::Chain { chain })
        }
        PropertySpec::Ccpf(r) => chains_of_length(members, r)
            .into_iter()
            .find(|c| c.iter().all(|&m| members.contains(&complement(m, n))))
            .map(|chain| Witness::ComplementedChain { chain }),
        PropertySpec::ComplementFree => members
            .iter()
            .find(|&&m| members.contains(&complement(m, n)))
            .map(|&m| Witness::ComplementedChain { chain: vec![m] }),
        PropertySpec::Intersecting => unreachable!("normalized"),
    };
    Ok(match verdict {
        None => Verdict::Satisfied,
        Some(witness) => Verdict::Violated { witness },
    })
}

/// Every `len`-subset of `members` that is a chain, bottom-up.
fn chains_of_length(members: &[SetMask], len: usize) -> Vec<Vec<SetMask>> {
    fn rec(members: &[SetMask], start: usize, len: usize, cur: &mut Vec<SetMask>, out: &mut Vec<Vec<SetMask>>) {
        if cur.len() == len {
            let mut sorted = cur.clone();
            sorted.sort_by_key(|m| m.len());
            if sorted.windows(2).all(|w| w[0].bits() & !w[1].bits() == 0 && w[0] != w[1]) {
                out.push(sorted);
            }
            return;
        }
        for i in start..members.len() {
            cur.push(members[i]);
            rec(members, i + 1, len, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if len <= members.len() {
        rec(members, 0, len, &mut Vec::with_capacity(len), &mut out);
    }
    out
}
