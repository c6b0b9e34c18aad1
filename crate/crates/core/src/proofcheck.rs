//! Concrete instances of the proof steps: the Hilton inequality for
//! complement-free cross-Sperner pairs, the maximal-and-minimal decomposition
//! of totally (2,2)-chain-intersecting families, and the chain-pair weight
//! arithmetic behind the strong-mode threshold.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::lattice::{binom_u, complement, serialize_count, SetFamily, SetMask};
use crate::predicates::{check, check_cross_sperner, CrossVerdict, PropertySpec, Verdict};
use crate::weights::{fmt_weight, serialize_weight, weight_from_count as rat, Weight};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "hypothesis", rename_all = "kebab-case")]
pub enum Hypothesis {
    /// The first family holds `set` and its complement.
    FirstComplementFree { set: SetMask },
    SecondComplementFree { set: SetMask },
    /// `first` and `second` are comparable (equality included).
    CrossSperner { first: SetMask, second: SetMask },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum HiltonVerdict {
    Holds { total: usize, bound: u64 },
    Violated { total: usize, bound: u64, detail: String },
    /// Hypotheses fail, so no inequality is claimed.
    HypothesisFailed { failed: Vec<Hypothesis> },
}

impl HiltonVerdict {
    pub fn is_violation(&self) -> bool {
        matches!(self, HiltonVerdict::Violated { .. })
    }
}

fn complemented_member(family: &SetFamily) -> Option<SetMask> {
    let n = family.n();
    family.iter().find(|&m| family.contains(complement(m, n)))
}

/// `|F| + |F2| <= 2^(n-1)` when both families are complement-free and
/// cross-Sperner to each other.
pub fn hilton_check(first: &SetFamily, second: &SetFamily) -> Result<HiltonVerdict, Error> {
    let mut failed = Vec::new();
    if let CrossVerdict::Violated { first, second } = check_cross_sperner(first, second)? {
        failed.push(Hypothesis::CrossSperner { first, second });
    }
    if let Some(set) = complemented_member(first) {
        failed.insert(0, Hypothesis::FirstComplementFree { set });
    }
    if let Some(set) = complemented_member(second) {
        let at = failed.len().min(1);
        failed.insert(at, Hypothesis::SecondComplementFree { set });
    }
    if !failed.is_empty() {
        return Ok(HiltonVerdict::HypothesisFailed { failed });
    }
    let n = first.n();
    let total = first.len() + second.len();
    let bound = 1u64 << (n - 1);
    if total as u64 <= bound {
        Ok(HiltonVerdict::Holds { total, bound })
    } else {
        Ok(HiltonVerdict::Violated {
            total,
            bound,
            detail: format!("{} + {} > {bound}", first.len(), second.len()),
        })
    }
}

/// Split of a family along its members that are both maximal and minimal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    pub family: SetFamily,
    /// Verdict of the total (2,2) precondition; the split is computed anyway.
    pub precondition: Verdict,
    pub g: SetFamily,
    /// Smaller canonical mask of each complement pair inside `g`.
    pub g1: SetFamily,
    pub g2: SetFamily,
    pub f1: SetFamily,
    pub f1_complement_free: bool,
    pub g2_complement_free: bool,
    pub cross_sperner: bool,
    pub sizes_add_up: bool,
    pub hilton: HiltonVerdict,
    /// Claims that fail, each with the sets involved.
    pub failures: Vec<String>,
}

impl Decomposition {
    pub fn flags_hold(&self) -> bool {
        self.f1_complement_free && self.g2_complement_free && self.cross_sperner && self.sizes_add_up
    }

    /// Precondition, all four flags and the final inequality.
    pub fn all_hold(&self) -> bool {
        self.precondition.is_satisfied() && self.flags_hold() && matches!(self.hilton, HiltonVerdict::Holds { .. })
    }
}

pub fn thm2_decompose(family: &SetFamily) -> Decomposition {
    let n = family.n();
    let precondition = check(family, &PropertySpec::total(2, 2));
    let mut failures = Vec::new();
    if let Some(w) = precondition.witness() {
        failures.push(format!("input is not totally (2,2)-chain intersecting:\n{}", w.to_text(n)));
    }

    let g = family.filter(|m| !family.iter().any(|o| o.is_proper_subset_of(m) || m.is_proper_subset_of(o)));
    let g1 = g.filter(|m| {
        let c = complement(m, n);
        g.contains(c) && m.canonical_key() < c.canonical_key()
    });
    let g2 = g.difference(&g1);
    let f1 = family.difference(&g2);

    let f1_bad = complemented_member(&f1);
    if let Some(m) = f1_bad {
        failures.push(format!("F1 is not complement-free: {m} and {}", complement(m, n)));
    }
    let g2_bad = complemented_member(&g2);
    if let Some(m) = g2_bad {
        failures.push(format!("G2 is not complement-free: {m} and {}", complement(m, n)));
    }
    let cross = check_cross_sperner(&f1, &g2).expect("same n");
    if let CrossVerdict::Violated { first, second } = cross {
        failures.push(format!("F1 and G2 are not cross-Sperner: {first} vs {second}"));
    }
    let sizes_add_up = family.len() == f1.len() + g2.len();
    if !sizes_add_up {
        failures.push(format!("|F| = {} but |F1| + |G2| = {}", family.len(), f1.len() + g2.len()));
    }
    let hilton = hilton_check(&f1, &g2).expect("same n");
    if let HiltonVerdict::Violated { detail, .. } = &hilton {
        failures.push(format!("inequality fails: {detail}"));
    }

    Decomposition {
        family: family.clone(),
        precondition,
        g,
        g1,
        g2,
        f1,
        f1_complement_free: f1_bad.is_none(),
        g2_complement_free: g2_bad.is_none(),
        cross_sperner: cross == CrossVerdict::Satisfied,
        sizes_add_up,
        hilton,
        failures,
    }
}

/// Chain-pair arithmetic for the strong `(p,q)` threshold at one `n`.
///
/// `x`, `y` and `circle_weight` use the normalized member weight
/// `binom(n,|F|)/g_|F|`. The `*_raw*` fields weigh each member by
/// `binom(n,|F|)` and, where marked proper, leave out the empty set and
/// `[n]`; those two are carried by the `2n - 4` term of the rotation bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdRow {
    pub n: usize,
    #[serde(serialize_with = "serialize_weight")]
    pub x: Weight,
    #[serde(serialize_with = "serialize_weight")]
    pub y: Weight,
    /// Lowest level of the best `q-1` level window for `y`.
    pub y_window_start: usize,
    #[serde(serialize_with = "serialize_count")]
    pub x_raw: BigUint,
    #[serde(serialize_with = "serialize_count")]
    pub x_raw_proper: BigUint,
    #[serde(serialize_with = "serialize_count")]
    pub y_raw_proper: BigUint,
    #[serde(serialize_with = "serialize_weight")]
    pub circle_weight: Weight,
    #[serde(serialize_with = "serialize_count")]
    pub circle_raw_proper: BigUint,
    #[serde(serialize_with = "serialize_weight")]
    pub rotation_bound: Weight,
    #[serde(serialize_with = "serialize_opt_weight")]
    pub gap_term: Option<Weight>,
    /// `n * x_raw_proper / 2 - gap_term`, present when `n + p` is odd.
    #[serde(serialize_with = "serialize_opt_weight")]
    pub circle_target: Option<Weight>,
    pub identity_holds: Option<bool>,
    pub bound_holds: Option<bool>,
    pub x_gt_y: bool,
    pub x_raw_gt_half_cube: bool,
}

fn serialize_opt_weight<S: serde::Serializer>(w: &Option<Weight>, s: S) -> Result<S::Ok, S::Error> {
    match w {
        Some(w) => s.serialize_some(&fmt_weight(w)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub p: usize,
    pub q: usize,
    pub n_max: usize,
    pub rows: Vec<ThresholdRow>,
    pub least_n_x_gt_y: Option<usize>,
    pub least_n_bound_holds: Option<usize>,
}

pub const THRESHOLD_MAX_N: usize = 64;

pub const THRESHOLD_CSV_HEADER: &str = "n,x,y,y_window_start,x_raw,x_raw_proper,y_raw_proper,circle_weight,\
circle_raw_proper,rotation_bound,gap_term,circle_target,identity_holds,bound_holds,x_gt_y,x_raw_gt_half_cube";

fn threshold_row(n: usize, p: usize, q: usize) -> ThresholdRow {
    let b: Vec<BigUint> = (0..=n).map(|k| binom_u(n as u64, k as i64)).collect();
    let odd = (n + p) % 2 == 1;
    // Sets strictly above level t, plus half of level t when n + p is odd.
    let t = n - (n + p) / 2;
    let two = BigUint::from(2u32);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));

    let above: BigUint = b[t + 1..].iter().sum();
    let above_proper: BigUint = b[t + 1..n].iter().sum();
    let mut x = rat(&above);
    let mut x_raw_proper = &two * &above_proper;
    let mut circle_weight = rat(&above_proper) + BigRational::one();
    let mut circle_raw_proper = &above_proper * BigUint::from(n);
    if odd {
        x += rat(&b[t]) * &half;
        x_raw_proper += &b[t];
        circle_weight += rat(&b[t]) * BigRational::new(BigInt::from(t), BigInt::from(n));
        circle_raw_proper += &b[t] * BigUint::from(t);
    }
    let x_raw = &x_raw_proper + BigUint::one();

    let width = q - 1;
    let (y, y_window_start, y_raw_proper) = if width == 0 {
        (Weight::zero(), 0, BigUint::zero())
    } else if width > n {
        let all: BigUint = b.iter().sum();
        let proper: BigUint = b[1..n].iter().sum();
        (rat(&all), 0, &two * proper)
    } else {
        let sum_at = |a: usize| b[a..a + width].iter().sum::<BigUint>();
        // Same placement as the middle-levels construction, unless some
        // other window weighs strictly more.
        let rule = (n + 1 - width) / 2;
        let best = (0..=n + 1 - width).map(|a| (sum_at(a), a)).fold((sum_at(rule), rule), |acc, c| {
            if c.0 > acc.0 {
                c
            } else {
                acc
            }
        });
        let raw_best = (0..=n + 1 - width)
            .map(|a| (a..a + width).filter(|&i| i > 0 && i < n).map(|i| &two * &b[i]).sum::<BigUint>())
            .max()
            .expect("nonempty window range");
        (rat(&best.0), best.1, raw_best)
    };

    let nn = BigInt::from(n);
    let rotation_bound = (rat(&x_raw_proper) * BigRational::from_integer(&nn - 1)
        + rat(&y_raw_proper)
        + BigRational::from_integer(BigInt::from(2 * n) - 4))
        * &half;
    let (gap_term, circle_target) = if odd {
        let gap = rat(&(BigUint::from(p - 1) * &b[t])) * &half;
        let target = rat(&x_raw_proper) * BigRational::from_integer(nn) * &half - &gap;
        (Some(gap), Some(target))
    } else {
        (None, None)
    };
    let identity_holds = circle_target.as_ref().map(|c| *c == rat(&circle_raw_proper));
    let bound_holds = circle_target.as_ref().map(|c| rotation_bound <= *c);
    let x_gt_y = x > y;
    let x_raw_gt_half_cube = x_raw > BigUint::one() << (n - 1);

    ThresholdRow {
        n,
        x,
        y,
        y_window_start,
        x_raw,
        x_raw_proper,
        y_raw_proper,
        circle_weight,
        circle_raw_proper,
        rotation_bound,
        gap_term,
        circle_target,
        identity_holds,
        bound_holds,
        x_gt_y,
        x_raw_gt_half_cube,
    }
}

/// Rows for `max(2, p) <= n <= n_max`, from closed forms only.
pub fn threshold_scan(p: usize, q: usize, n_max: usize) -> Result<ThresholdReport, Error> {
    if p == 0 || q == 0 {
        return Err(Error::InvalidParameters("p and q must be at least 1".into()));
    }
    if n_max > THRESHOLD_MAX_N {
        return Err(Error::InvalidParameters(format!("n_max={n_max} exceeds {THRESHOLD_MAX_N}")));
    }
    let rows: Vec<ThresholdRow> = (p.max(2)..=n_max).into_par_iter().map(|n| threshold_row(n, p, q)).collect();
    let least_n_x_gt_y = rows.iter().find(|r| r.x_gt_y).map(|r| r.n);
    let least_n_bound_holds = rows.iter().find(|r| r.bound_holds == Some(true)).map(|r| r.n);
    Ok(ThresholdReport { p, q, n_max, rows, least_n_x_gt_y, least_n_bound_holds })
}

impl ThresholdReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(THRESHOLD_CSV_HEADER.split(',')).expect("in-memory write");
        let opt = |v: &Option<Weight>| v.as_ref().map(fmt_weight).unwrap_or_default();
        let flag = |v: Option<bool>| v.map(|b| b.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.n.to_string(),
                fmt_weight(&r.x),
                fmt_weight(&r.y),
                r.y_window_start.to_string(),
                r.x_raw.to_string(),
                r.x_raw_proper.to_string(),
                r.y_raw_proper.to_string(),
                fmt_weight(&r.circle_weight),
                r.circle_raw_proper.to_string(),
                fmt_weight(&r.rotation_bound),
                opt(&r.gap_term),
                opt(&r.circle_target),
                flag(r.identity_holds),
                flag(r.bound_holds),
                r.x_gt_y.to_string(),
                r.x_raw_gt_half_cube.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::ConstructionSpec;
    use crate::lattice::{parse_family, SetFamily};
    use crate::weights::{chain_pair_ground, circle_ground, WeightedGround};

    fn fam(text: &str) -> SetFamily {
        parse_family(text).unwrap()
    }

    #[test]
    fn hilton_examples() {
        let v = hilton_check(&fam("n 3\n1"), &fam("n 3\n2\n3")).unwrap();
        assert_eq!(v, HiltonVerdict::Holds { total: 3, bound: 4 });
        let v = hilton_check(&fam("n 3\n1\n2,3"), &SetFamily::empty(3).unwrap()).unwrap();
        assert_eq!(
            v,
            HiltonVerdict::HypothesisFailed {
                failed: vec![Hypothesis::FirstComplementFree { set: SetMask::from_elements([1]) }]
            }
        );
        assert!(hilton_check(&fam("n 3\n1"), &fam("n 4\n1")).is_err());
    }

    #[test]
    fn hilton_exhaustive_n3() {
        let all: Vec<SetMask> = (0..8).map(SetMask).collect();
        let families: Vec<SetFamily> = (0u32..256)
            .map(|bits| SetFamily::new(3, all.iter().copied().filter(|m| bits >> m.0 & 1 == 1).collect()).unwrap())
            .collect();
        let mut applicable = 0;
        for a in &families {
            for b in &families {
                match hilton_check(a, b).unwrap() {
                    HiltonVerdict::Holds { .. } => applicable += 1,
                    HiltonVerdict::Violated { detail, .. } => panic!("{a} / {b}: {detail}"),
                    HiltonVerdict::HypothesisFailed { .. } => {}
                }
            }
        }
        assert!(applicable > 0);
    }

    #[test]
    fn decomposition_examples() {
        let d = thm2_decompose(&fam("n 3\n1\n1,2\n3"));
        assert_eq!(d.g, fam("n 3\n3"));
        assert!(d.g1.is_empty());
        assert_eq!(d.g2, fam("n 3\n3"));
        assert_eq!(d.f1, fam("n 3\n1\n1,2"));
        assert!(d.all_hold(), "{:?}", d.failures);
        assert_eq!(d.hilton, HiltonVerdict::Holds { total: 3, bound: 4 });

        let star = ConstructionSpec::star(3).build().unwrap();
        let d = thm2_decompose(&star);
        assert!(d.all_hold());
        assert_eq!(star.len(), 4);

        let d = thm2_decompose(&fam("n 3\n1\n2,3"));
        assert_eq!(d.g1, fam("n 3\n1"));
        assert_eq!(d.g2, fam("n 3\n2,3"));
        assert!(d.all_hold());
    }

    #[test]
    fn decomposition_reports_broken_precondition() {
        let d = thm2_decompose(&fam("n 3\n1\n1,2\n3\n2,3"));
        assert!(!d.precondition.is_satisfied());
        assert!(!d.all_hold());
        assert!(d.failures[0].contains("not totally"));
    }

    #[test]
    fn threshold_examples() {
        let r = threshold_scan(2, 2, 10).unwrap();
        let row = r.rows.iter().find(|r| r.n == 4).unwrap();
        assert_eq!(row.x, Weight::from_integer(11.into()));
        assert_eq!(row.y, Weight::from_integer(6.into()));
        assert!(row.x_gt_y);

        let r = threshold_scan(1, 5, 40).unwrap();
        assert!(!r.rows.iter().find(|r| r.n == 6).unwrap().x_gt_y);
        let least = r.least_n_x_gt_y.unwrap();
        assert!(least > 6);
        assert!(r.rows.iter().filter(|r| r.n >= least).all(|r| r.x_gt_y));
        assert!(threshold_scan(0, 1, 5).is_err());
        assert!(threshold_scan(1, 1, 65).is_err());
    }

    fn raw(g: &WeightedGround, f: &SetFamily, proper: bool) -> BigUint {
        let n = g.n();
        g.members()
            .iter()
            .filter(|m| f.contains(*m) && (!proper || (m.len() > 0 && m.len() < n)))
            .map(|m| binom_u(n as u64, m.len() as i64))
            .sum()
    }

    fn normalized(g: &WeightedGround, f: &SetFamily) -> Weight {
        g.members().iter().filter(|m| f.contains(*m)).map(|m| g.weight(m).unwrap()).sum()
    }

    #[test]
    fn closed_forms_match_enumeration() {
        for p in 1..=4 {
            for q in 1..=5 {
                for row in threshold_scan(p, q, 12).unwrap().rows {
                    let n = row.n;
                    let identity: Vec<usize> = (1..=n).collect();
                    let cp = chain_pair_ground(n, &identity).unwrap();
                    let circle = circle_ground(n).unwrap();
                    let upper = ConstructionSpec::upper(n, n + p).build().unwrap();
                    assert_eq!(row.x, normalized(&cp, &upper), "n={n} p={p}");
                    assert_eq!(row.x_raw, raw(&cp, &upper, false));
                    assert_eq!(row.x_raw_proper, raw(&cp, &upper, true));
                    assert_eq!(row.circle_weight, normalized(&circle, &upper));
                    assert_eq!(row.circle_raw_proper, raw(&circle, &upper, true));
                    let m = q - 1;
                    let mut y = Weight::zero();
                    let mut y_raw = BigUint::zero();
                    if m > 0 {
                        for a in 0..=(n + 1).saturating_sub(m) {
                            let window = SetFamily::power_set(n).unwrap().filter(|s| s.len() >= a && s.len() < a + m);
                            y = y.max(normalized(&cp, &window));
                            y_raw = y_raw.max(raw(&cp, &window, true));
                        }
                    }
                    if m > 0 && m <= n + 1 {
                        let middle = ConstructionSpec::middle(n, m).build().unwrap();
                        assert!(normalized(&cp, &middle) <= row.y);
                    }
                    assert_eq!(row.y, y, "n={n} q={q}");
                    assert_eq!(row.y_raw_proper, y_raw, "n={n} q={q}");
                }
            }
        }
    }

    #[test]
    fn even_rows_weigh_their_cardinality() {
        for p in 1..=4 {
            for row in threshold_scan(p, 2, 24).unwrap().rows.iter().filter(|r| (r.n + p) % 2 == 0) {
                let size = ConstructionSpec::upper(row.n, row.n + p).size().unwrap();
                assert_eq!(row.x, rat(&size));
            }
        }
    }

    #[test]
    fn odd_rows_satisfy_the_circle_identity() {
        for p in 1..=4 {
            for row in threshold_scan(p, 3, 20).unwrap().rows.iter().filter(|r| (r.n + p) % 2 == 1) {
                assert_eq!(row.identity_holds, Some(true), "n={} p={p}", row.n);
                assert!(row.x_raw_gt_half_cube);
            }
        }
    }

    #[test]
    fn csv_has_one_line_per_row() {
        let r = threshold_scan(2, 2, 9).unwrap();
        let text = r.to_csv();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(THRESHOLD_CSV_HEADER));
        assert_eq!(lines.count(), r.rows.len());
        assert!(text.contains("11/1"));
    }
}
