//! Candidate sets with precomputed containment and disjointness bitsets, so a
//! property can be decided on any subfamily with word operations only.

use super::bits::{Bits, CAPACITY};
use crate::error::Error;
use crate::lattice::{complement, SetFamily, SetMask};
use crate::predicates::{ChainMode, PropertySpec};

pub(crate) struct Universe {
    pub n: usize,
    pub masks: Vec<SetMask>,
    /// Proper subsets of each candidate.
    sub: Vec<Bits>,
    /// Proper supersets of each candidate.
    sup: Vec<Bits>,
    /// Candidates disjoint from each candidate (itself only for the empty set).
    disj: Vec<Bits>,
    comp: Vec<Option<usize>>,
}

impl Universe {
    pub fn new(n: usize, masks: Vec<SetMask>) -> Result<Universe, Error> {
        if masks.len() > CAPACITY {
            return Err(Error::GroundTooLarge(masks.len(), CAPACITY));
        }
        let len = masks.len();
        let mut sub = vec![Bits::EMPTY; len];
        let mut sup = vec![Bits::EMPTY; len];
        let mut disj = vec![Bits::EMPTY; len];
        let mut comp = vec![None; len];
        for i in 0..len {
            for j in 0..len {
                if masks[j].is_proper_subset_of(masks[i]) {
                    sub[i].insert(j);
                    sup[j].insert(i);
                }
                if masks[i].is_disjoint(masks[j]) {
                    disj[i].insert(j);
                }
            }
            let c = complement(masks[i], n);
            comp[i] = masks.iter().position(|&m| m == c);
        }
        Ok(Universe { n, masks, sub, sup, disj, comp })
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn family(&self, bits: &Bits) -> SetFamily {
        SetFamily::from_iter_dedup(self.n, bits.iter().map(|i| self.masks[i])).expect("universe masks fit n")
    }

    /// Members of `fam` topping a chain of at least `k` members inside `fam`.
    fn height_at_least(&self, fam: Bits, k: usize) -> Bits {
        self.layer(fam, k, &self.sub)
    }

    /// Members of `fam` at the bottom of a chain of at least `k` members.
    fn depth_at_least(&self, fam: Bits, k: usize) -> Bits {
        self.layer(fam, k, &self.sup)
    }

    fn layer(&self, fam: Bits, k: usize, rel: &[Bits]) -> Bits {
        let mut cur = fam;
        for _ in 1..k {
            let mut next = Bits::EMPTY;
            for i in cur.iter() {
                if rel[i].intersects(&cur) {
                    next.insert(i);
                }
            }
            if next.is_empty() {
                return next;
            }
            cur = next;
        }
        cur
    }

    fn meets_disjoint(&self, left: Bits, right: Bits) -> bool {
        !right.is_empty() && left.iter().any(|i| self.disj[i].intersects(&right))
    }

    /// Whether the subfamily `fam` has `prop`.
    pub fn satisfies(&self, fam: Bits, prop: &PropertySpec) -> bool {
        match prop.normalized() {
            PropertySpec::ChainIntersect { mode, p, q } => {
                let (left, right) = match mode {
                    ChainMode::Plain => (self.height_at_least(fam, p), self.height_at_least(fam, q)),
                    ChainMode::Strong => (self.height_at_least(fam, p), self.depth_at_least(fam, q)),
                    ChainMode::Total => (self.depth_at_least(fam, p), self.depth_at_least(fam, q)),
                };
                !self.meets_disjoint(left, right)
            }
            PropertySpec::KSperner(k) => self.height_at_least(fam, k + 1).is_empty(),
            PropertySpec::ComplementFree => self.paired(fam).is_empty(),
            PropertySpec::Ccpf(r) => self.height_at_least(self.paired(fam), r).is_empty(),
            PropertySpec::Intersecting => unreachable!("normalized"),
        }
    }

    /// All height layers of `fam`: entry `k` holds the members topping a
    /// chain of at least `k + 1` members.
    fn layers(&self, fam: Bits, rel: &[Bits]) -> Vec<Bits> {
        let mut out = Vec::new();
        let mut cur = fam;
        while !cur.is_empty() {
            out.push(cur);
            let mut next = Bits::EMPTY;
            for i in cur.iter() {
                if rel[i].intersects(&cur) {
                    next.insert(i);
                }
            }
            cur = next;
        }
        out
    }

    fn longest_through(&self, fam: Bits) -> Vec<usize> {
        let mut through = vec![0usize; self.len()];
        for layer in self.layers(fam, &self.sub) {
            layer.iter().for_each(|i| through[i] += 1);
        }
        for layer in self.layers(fam, &self.sup) {
            layer.iter().for_each(|i| through[i] += 1);
        }
        // members of fam were counted once too often
        fam.iter().for_each(|i| through[i] -= 1);
        through
    }

    /// Members `d` of `allowed` that appear in no violating configuration
    /// inside `allowed`. Adding such a `d` to any valid subfamily of
    /// `allowed` keeps it valid.
    pub fn free_members(&self, allowed: Bits, prop: &PropertySpec) -> Bits {
        let mut free = Bits::EMPTY;
        match prop.normalized() {
            PropertySpec::ChainIntersect { mode, p, q } => {
                let top = |k| self.height_at_least(allowed, k);
                let bottom = |k| self.depth_at_least(allowed, k);
                let (key_a, key_b) = match mode {
                    ChainMode::Plain => (top(p), top(q)),
                    ChainMode::Strong => (top(p), bottom(q)),
                    ChainMode::Total => (bottom(p), bottom(q)),
                };
                let bad = |keys: Bits, other: Bits| {
                    let mut out = Bits::EMPTY;
                    keys.iter().filter(|&i| self.disj[i].intersects(&other)).for_each(|i| out.insert(i));
                    out
                };
                let (bad_a, bad_b) = (bad(key_a, key_b), bad(key_b, key_a));
                let a_is_top = mode != ChainMode::Total;
                let b_is_top = mode == ChainMode::Plain;
                for d in allowed.iter() {
                    // a chain through d has its top above d and its bottom below
                    let reach = |is_top: bool| Bits::single(d) | if is_top { self.sup[d] } else { self.sub[d] };
                    if !bad_a.intersects(&reach(a_is_top)) && !bad_b.intersects(&reach(b_is_top)) {
                        free.insert(d);
                    }
                }
            }
            PropertySpec::KSperner(k) => {
                let through = self.longest_through(allowed);
                allowed.iter().filter(|&d| through[d] <= k).for_each(|d| free.insert(d));
            }
            PropertySpec::ComplementFree => {
                allowed.iter().filter(|&d| !self.comp[d].is_some_and(|c| allowed.contains(c))).for_each(|d| free.insert(d));
            }
            PropertySpec::Ccpf(r) => {
                let paired = self.paired(allowed);
                let through = self.longest_through(paired);
                for d in allowed.iter() {
                    let involved = |i: usize| paired.contains(i) && through[i] >= r;
                    if !involved(d) && !self.comp[d].is_some_and(involved) {
                        free.insert(d);
                    }
                }
            }
            PropertySpec::Intersecting => unreachable!("normalized"),
        }
        free
    }

    /// Candidates every lexicographically greatest optimum contains, known
    /// before search.
    ///
    /// Under complement-free and ccpf only complete complement pairs matter.
    /// An optimum holds at least one side of every pair, and when the sides
    /// weigh the same, trading the later side for the earlier one keeps it
    /// valid and optimal. So the earlier side of each such pair is in.
    pub fn forced_at_root(&self, prop: &PropertySpec, weights: &[u64]) -> Bits {
        let mut forced = Bits::EMPTY;
        if matches!(prop, PropertySpec::ComplementFree | PropertySpec::Ccpf(_)) {
            for (i, c) in self.comp.iter().enumerate() {
                match *c {
                    None => forced.insert(i),
                    Some(c) if i < c && weights[i] == weights[c] => forced.insert(i),
                    Some(_) => {}
                }
            }
        }
        forced
    }

    fn paired(&self, fam: Bits) -> Bits {
        let mut out = Bits::EMPTY;
        for i in fam.iter() {
            if self.comp[i].is_some_and(|c| fam.contains(c)) {
                out.insert(i);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicates::check;

    fn bits_of(v: u32) -> Bits {
        let mut b = Bits::EMPTY;
        (0..32).filter(|i| v >> i & 1 == 1).for_each(|i| b.insert(i));
        b
    }

    #[test]
    fn free_members_never_break_validity() {
        let masks: Vec<SetMask> = (0..8).map(SetMask).collect();
        let uni = Universe::new(3, masks).unwrap();
        let props = [
            PropertySpec::Intersecting,
            PropertySpec::plain(2, 1),
            PropertySpec::strong(2, 2),
            PropertySpec::strong(1, 2),
            PropertySpec::total(2, 1),
            PropertySpec::KSperner(2),
            PropertySpec::ComplementFree,
            PropertySpec::Ccpf(1),
            PropertySpec::Ccpf(2),
        ];
        for prop in &props {
            let valid: Vec<bool> = (0u32..256).map(|v| uni.satisfies(bits_of(v), prop)).collect();
            for t in 0u32..256 {
                let free = uni.free_members(bits_of(t), prop);
                for d in free.iter() {
                    let mut s = t & !(1 << d);
                    // every subset of t without d
                    loop {
                        if valid[s as usize] {
                            assert!(valid[(s | 1 << d) as usize], "{prop} t={t:#b} d={d} s={s:#b}");
                        }
                        if s == 0 {
                            break;
                        }
                        s = (s - 1) & t & !(1 << d);
                    }
                }
            }
        }
    }

    #[test]
    fn agrees_with_check_on_all_families_n3() {
        let masks: Vec<SetMask> = (0..8).map(SetMask).collect();
        let uni = Universe::new(3, masks).unwrap();
        let props = [
            PropertySpec::Intersecting,
            PropertySpec::plain(2, 1),
            PropertySpec::strong(2, 2),
            PropertySpec::strong(1, 3),
            PropertySpec::total(2, 2),
            PropertySpec::KSperner(1),
            PropertySpec::KSperner(2),
            PropertySpec::ComplementFree,
            PropertySpec::Ccpf(2),
        ];
        for fam_bits in 0u32..256 {
            let mut bits = Bits::EMPTY;
            (0..8).filter(|i| fam_bits >> i & 1 == 1).for_each(|i| bits.insert(i));
            let fam = uni.family(&bits);
            for prop in &props {
                assert_eq!(uni.satisfies(bits, prop), check(&fam, prop).is_satisfied(), "{fam:?} {prop}");
            }
        }
    }
}
