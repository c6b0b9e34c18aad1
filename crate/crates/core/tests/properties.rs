use chainlattice::{
    chain_profile, check, circle_ground, complement, oracle_check, parse_family, rotated_chain_pairs, serialize_family,
    weight_of, ChainMode, PropertySpec, SetFamily, SetMask, Weight,
};
use proptest::prelude::*;

fn family(max_n: usize, max_len: usize) -> impl Strategy<Value = SetFamily> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::btree_set(0u32..(1 << n), 0..=max_len)
            .prop_map(move |s| SetFamily::new(n, s.into_iter().map(SetMask).collect()).unwrap())
    })
}

fn property() -> impl Strategy<Value = PropertySpec> {
    let chain = (0..3usize, 1..=3usize, 1..=3usize).prop_map(|(m, p, q)| {
        let mode = [ChainMode::Plain, ChainMode::Strong, ChainMode::Total][m];
        PropertySpec::ChainIntersect { mode, p, q }
    });
    prop_oneof![
        4 => chain,
        1 => (1..=3usize).prop_map(PropertySpec::KSperner),
        1 => (1..=3usize).prop_map(PropertySpec::Ccpf),
        1 => Just(PropertySpec::Intersecting),
        1 => Just(PropertySpec::ComplementFree),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn parse_inverts_serialize(f in family(10, 40)) {
        let text = serialize_family(&f);
        prop_assert_eq!(parse_family(&text).unwrap(), f);
    }

    #[test]
    fn complement_is_an_involution(n in 1usize..=24, bits in any::<u32>()) {
        let m = SetMask(bits & (u32::MAX >> (32 - n)));
        let c = complement(m, n);
        prop_assert_eq!(complement(c, n), m);
        prop_assert_eq!(c.len(), n - m.len());
        prop_assert!(c.is_disjoint(m));
    }

    #[test]
    fn check_agrees_with_oracle(f in family(6, 12), prop in property()) {
        let fast = check(&f, &prop);
        let slow = oracle_check(&f, &prop).unwrap();
        prop_assert_eq!(fast.is_satisfied(), slow.is_satisfied(), "{} on\n{}", prop, f);
        if let Some(w) = fast.witness() {
            prop_assert!(w.validate(&f, &prop));
        }
        if let Some(w) = slow.witness() {
            prop_assert!(w.validate(&f, &prop));
        }
    }

    #[test]
    fn valid_families_are_hereditary(f in family(6, 24), prop in property(), keep in any::<u64>()) {
        if check(&f, &prop).is_satisfied() {
            let mut i = 0;
            let sub = f.filter(|_| { i += 1; keep >> (i % 64) & 1 == 1 });
            prop_assert!(check(&sub, &prop).is_satisfied(), "{} lost on\n{}", prop, sub);
        }
    }

    /// Heights of `F` are the up-depths of the complemented family, so a
    /// plain violation on `F` is a pair of complemented bottoms with enough
    /// up-depth whose union is `[n]`.
    #[test]
    fn heights_dualize_to_updepths(f in family(6, 16), p in 1usize..=3, q in 1usize..=3) {
        let n = f.n();
        let g = f.complemented();
        let hf = chain_profile(&f).heights;
        let ug = chain_profile(&g).updepths;
        for (i, m) in f.iter().enumerate() {
            let j = g.members().iter().position(|&x| x == complement(m, n)).unwrap();
            prop_assert_eq!(hf[i], ug[j]);
        }
        let full = SetMask::full(n);
        let dual = g.iter().zip(&ug).any(|(a, &ua)| {
            g.iter().zip(&ug).any(|(b, &ub)| ua as usize >= p && ub as usize >= q && (a.0 | b.0) == full.0)
        });
        prop_assert_eq!(!check(&f, &PropertySpec::plain(p, q)).is_satisfied(), dual);
    }

    /// Each proper interval lies in two rotated chain-pairs; measured with
    /// circle weights the rotations count `S` twice, with chain-pair weights
    /// they count it `n` times.
    #[test]
    fn rotations_double_count_proper_intervals(n in 2usize..=10, pick in any::<u64>()) {
        let circle = circle_ground(n).unwrap();
        let full = SetMask::full(n);
        let mut i = 0;
        let s = circle.members().filter(|m| {
            i += 1;
            !m.is_empty() && m != full && pick >> (i % 64) & 1 == 1
        });
        let ws = weight_of(&circle, &s).unwrap();
        let mut circle_units = Weight::from_integer(0.into());
        let mut pair_units = Weight::from_integer(0.into());
        for c in rotated_chain_pairs(n).unwrap() {
            let part = s.filter(|m| c.members().contains(m));
            circle_units += weight_of(&circle, &part).unwrap();
            pair_units += weight_of(&c, &part).unwrap();
        }
        prop_assert_eq!(circle_units, &ws * Weight::from_integer(2.into()));
        prop_assert_eq!(pair_units, ws * Weight::from_integer((n as i64).into()));
    }
}
