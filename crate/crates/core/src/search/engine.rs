//! Depth-first branch and bound over a [`Universe`] with integer weights.
//!
//! Each node holds the chosen family, its weight and the candidates that can
//! still be added one at a time without breaking the property. The include
//! branch re-filters that set; the exclude branch only drops the candidate.

use std::time::{Duration, Instant};

use super::bits::Bits;
use super::universe::Universe;
use itertools::Itertools;

use crate::lattice::{binom_small, SetMask};
use crate::predicates::PropertySpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Duration,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_nodes: 200_000_000, max_time: Duration::from_secs(300) }
    }
}

impl Budget {
    pub fn nodes(max_nodes: u64) -> Budget {
        Budget { max_nodes, ..Budget::default() }
    }
}

pub(crate) struct Outcome {
    pub best: u64,
    pub witness: Bits,
    pub nodes: u64,
    pub exhaustive: bool,
}

pub(crate) struct Solver<'a> {
    uni: &'a Universe,
    prop: PropertySpec,
    weights: Vec<u64>,
    cover: Option<CoverBound>,
    dominance: bool,
    best: Option<(u64, Bits)>,
    nodes: u64,
    budget: Budget,
    start: Instant,
    aborted: bool,
}

impl<'a> Solver<'a> {
    pub fn new(uni: &'a Universe, prop: PropertySpec, weights: Vec<u64>, budget: Budget) -> Solver<'a> {
        Solver { uni, prop, weights, cover: None, dominance: true, best: None, nodes: 0, budget, start: Instant::now(), aborted: false }
    }

    pub fn with_cover(mut self, cover: CoverBound) -> Solver<'a> {
        self.cover = Some(cover);
        self
    }

    /// Turns off the free-candidate and root-forcing rules, leaving plain
    /// include/exclude branching.
    pub fn without_dominance(mut self) -> Solver<'a> {
        self.dominance = false;
        self
    }

    pub fn run(mut self) -> Outcome {
        self.start = Instant::now();
        let forced = if self.dominance { self.uni.forced_at_root(&self.prop, &self.weights) } else { Bits::EMPTY };
        if !forced.is_empty() && self.uni.satisfies(forced, &self.prop) {
            let addable = self.still_addable(forced, Bits::prefix(self.uni.len()) & !forced);
            self.dfs(forced, self.weight(&forced), addable);
        } else {
            let addable = self.still_addable(Bits::EMPTY, Bits::prefix(self.uni.len()));
            self.dfs(Bits::EMPTY, 0, addable);
        }
        let (best, witness) = self.best.unwrap_or((0, Bits::EMPTY));
        Outcome { best, witness, nodes: self.nodes, exhaustive: !self.aborted }
    }

    fn weight(&self, bits: &Bits) -> u64 {
        bits.iter().map(|i| self.weights[i]).sum()
    }

    fn record(&mut self, w: u64, fam: Bits) {
        if self.best.is_none_or(|(b, _)| w > b) {
            self.best = Some((w, fam));
        }
    }

    fn beaten(&self, bound: u64) -> bool {
        self.best.is_some_and(|(b, _)| bound <= b)
    }

    fn dfs(&mut self, fam: Bits, w: u64, addable: Bits) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes >= self.budget.max_nodes
            || (self.nodes & 0x3ff == 0 && self.start.elapsed() >= self.budget.max_time)
        {
            self.aborted = true;
            return;
        }
        let rest = self.weight(&addable);
        if self.beaten(w + rest) {
            return;
        }
        if addable.is_empty() || self.uni.satisfies(fam | addable, &self.prop) {
            self.record(w + rest, fam | addable);
            return;
        }
        if let Some(cover) = &self.cover {
            if self.beaten(cover.bound(fam, fam | addable, &self.weights)) {
                return;
            }
        }
        // The heaviest families, and among them the one found first, contain
        // every free candidate, so those are taken without branching.
        let free = if self.dominance { self.uni.free_members(fam | addable, &self.prop) & addable } else { Bits::EMPTY };
        if !free.is_empty() {
            let with = fam | free;
            let next = self.still_addable(with, addable & !free);
            self.dfs(with, w + self.weight(&free), next);
            return;
        }
        let c = addable.first().expect("nonempty");
        let mut others = addable;
        others.remove(c);
        let with = fam | Bits::single(c);
        let next = self.still_addable(with, others);
        self.dfs(with, w + self.weights[c], next);
        self.dfs(fam, w, others);
    }

    fn still_addable(&self, fam: Bits, candidates: Bits) -> Bits {
        let mut next = Bits::EMPTY;
        for d in candidates.iter() {
            if self.uni.satisfies(fam | Bits::single(d), &self.prop) {
                next.insert(d);
            }
        }
        next
    }
}

/// Permutation-method bound evaluated at a search node.
///
/// Both grounds searched here are covered uniformly by copies of one
/// chain-pair, so the objective is a fixed multiple of the summed chain-pair
/// weights of `S ∩ C` over the copies `C`. Each summand is at most the best
/// weight inside `allowed` of a maximal valid subfamily of the chain-pair
/// that contains the members already chosen, since every property here is
/// hereditary and invariant under relabeling.
pub(crate) struct CoverBound {
    /// Maximal valid subfamilies of the chain-pair, as position masks.
    maximal: Vec<u32>,
    /// Universe index of each pattern position, one row per copy.
    slots: Vec<Vec<usize>>,
    /// Byte tables of position weights.
    tables: [[u64; 256]; 3],
    /// Members counted outside the tables, with multiplier `end_mult`.
    ends: Vec<usize>,
    end_mult: u64,
    divisor: u64,
}

impl CoverBound {
    /// For the circle: the `n` rotations of the interval chain-pair cover
    /// every proper interval twice and the empty set and `[n]` `n` times, so
    /// `2 w(S)` is the summed proper weight plus twice the ends present.
    /// Member weights are the circle weights scaled by `n`.
    pub fn circle(uni: &Universe, prop: &PropertySpec) -> CoverBound {
        let n = uni.n;
        let rotate = |m: SetMask, shift: usize| SetMask::from_elements(m.elements().map(|e| (e - 1 + shift) % n + 1));
        let pattern = pattern(n);
        let slots = (0..n)
            .map(|shift| {
                pattern
                    .iter()
                    .map(|&m| {
                        let r = rotate(m, shift);
                        uni.masks.iter().position(|&x| x == r).expect("rotated interval on the circle")
                    })
                    .collect()
            })
            .collect();
        let full = SetMask::full(n);
        let ends = uni.masks.iter().enumerate().filter(|(_, m)| m.is_empty() || **m == full).map(|(i, _)| i).collect();
        let pos_weights = pattern.iter().map(|&m| if m.is_empty() || m == full { 0 } else { binom_small(n, m.len()) });
        CoverBound::from_pattern(n, prop, pattern.clone(), slots, pos_weights.collect(), ends, 2, 2)
    }

    /// For the whole cube with unit weights: each of the `n!/2` distinct
    /// chain-pairs carries weights `binom(n,i)/2` on proper members and 1 on
    /// the ends, and the average of `w(S ∩ C)` over them is exactly `|S|`.
    pub fn cube(uni: &Universe, prop: &PropertySpec) -> CoverBound {
        let n = uni.n;
        let mut index = vec![usize::MAX; 1 << n];
        for (i, m) in uni.masks.iter().enumerate() {
            index[m.bits() as usize] = i;
        }
        let pattern = pattern(n);
        // one ordering per chain-pair: an ordering and its reverse give the same one
        let slots: Vec<Vec<usize>> = (1..=n)
            .permutations(n)
            .filter(|perm| n < 2 || perm[0] < perm[n - 1])
            .map(|perm| {
                pattern
                    .iter()
                    .map(|&m| index[SetMask::from_elements(m.elements().map(|e| perm[e - 1])).bits() as usize])
                    .collect()
            })
            .collect();
        let full = SetMask::full(n);
        let pos_weights = pattern.iter().map(|&m| if m.is_empty() || m == full { 2 } else { binom_small(n, m.len()) });
        let divisor = 2 * slots.len() as u64;
        CoverBound::from_pattern(n, prop, pattern.clone(), slots, pos_weights.collect(), Vec::new(), 0, divisor)
    }

    #[allow(clippy::too_many_arguments)]
    fn from_pattern(
        n: usize,
        prop: &PropertySpec,
        pattern: Vec<SetMask>,
        slots: Vec<Vec<usize>>,
        pos_weights: Vec<u64>,
        ends: Vec<usize>,
        end_mult: u64,
        divisor: u64,
    ) -> CoverBound {
        debug_assert!(pattern.len() <= 24);
        let mut tables = [[0u64; 256]; 3];
        for (pos, &w) in pos_weights.iter().enumerate() {
            let (byte, bit) = (pos / 8, pos % 8);
            for (v, slot) in tables[byte].iter_mut().enumerate() {
                if v >> bit & 1 == 1 {
                    *slot += w;
                }
            }
        }
        let puni = Universe::new(n, pattern).expect("small pattern");
        CoverBound { maximal: maximal_valid(&puni, prop), slots, tables, ends, end_mult, divisor }
    }

    fn table_weight(&self, v: u32) -> u64 {
        self.tables[0][(v & 0xff) as usize] + self.tables[1][(v >> 8 & 0xff) as usize] + self.tables[2][(v >> 16 & 0xff) as usize]
    }

    /// Upper bound on the weight of any valid `S` with `fam ⊆ S ⊆ allowed`.
    pub fn bound(&self, fam: Bits, allowed: Bits, weights: &[u64]) -> u64 {
        let mut total = 0;
        for slot in &self.slots {
            let (mut req, mut ok) = (0u32, 0u32);
            for (pos, &idx) in slot.iter().enumerate() {
                if fam.contains(idx) {
                    req |= 1 << pos;
                }
                if allowed.contains(idx) {
                    ok |= 1 << pos;
                }
            }
            total += self
                .maximal
                .iter()
                .filter(|&&v| v & req == req)
                .map(|&v| self.table_weight(v & ok))
                .max()
                .unwrap_or(0);
        }
        for &e in &self.ends {
            if allowed.contains(e) {
                total += self.end_mult * weights[e];
            }
        }
        total / self.divisor
    }
}

/// The chain-pair along `1, 2, ..., n`, which is also made of intervals.
fn pattern(n: usize) -> Vec<SetMask> {
    let identity: Vec<usize> = (1..=n).collect();
    crate::weights::chain_pair_ground(n, &identity).expect("valid ordering").members().iter().collect()
}

/// All maximal valid subfamilies of a small universe, as index masks.
pub(crate) fn maximal_valid(uni: &Universe, prop: &PropertySpec) -> Vec<u32> {
    fn rec(uni: &Universe, prop: &PropertySpec, fam: Bits, addable: Bits, excluded: Bits, out: &mut Vec<u32>) {
        let top = fam | addable;
        // a skipped candidate that fits next to everything left blocks maximality
        if excluded.iter().any(|x| uni.satisfies(top | Bits::single(x), prop)) {
            return;
        }
        if addable.is_empty() || uni.satisfies(top, prop) {
            out.push(top.iter().fold(0u32, |acc, i| acc | 1 << i));
            return;
        }
        let c = addable.first().expect("nonempty");
        let mut others = addable;
        others.remove(c);
        let with = fam | Bits::single(c);
        let mut next = Bits::EMPTY;
        for d in others.iter() {
            if uni.satisfies(with | Bits::single(d), prop) {
                next.insert(d);
            }
        }
        let dropped = others & !next;
        rec(uni, prop, with, next, excluded | dropped, out);
        rec(uni, prop, fam, others, excluded | Bits::single(c), out);
    }
    let mut addable = Bits::EMPTY;
    for i in 0..uni.len() {
        if uni.satisfies(Bits::single(i), prop) {
            addable.insert(i);
        }
    }
    let mut out = Vec::new();
    rec(uni, prop, Bits::EMPTY, addable, Bits::EMPTY, &mut out);
    out
}
