use chainlattice::{check, thm2_decompose, threshold_scan, HiltonVerdict, PropertySpec, SetFamily, SetMask};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn decomposition_holds_on_every_valid_family_up_to_n4() {
    let prop = PropertySpec::total(2, 2);
    for n in 1..=4 {
        let all: Vec<SetMask> = (0..1u32 << n).map(SetMask).collect();
        let mut valid = 0;
        for pick in 0u64..1 << all.len() {
            let f = SetFamily::new(n, all.iter().copied().filter(|m| pick >> m.0 & 1 == 1).collect()).unwrap();
            if !check(&f, &prop).is_satisfied() {
                continue;
            }
            valid += 1;
            let d = thm2_decompose(&f);
            assert!(d.all_hold(), "n={n}\n{f}\n{:?}", d.failures);
            assert!(f.len() <= 1 << (n - 1));
        }
        assert!(valid > 1);
    }
}

/// Greedy random maximal family, then a random subfamily of it.
fn random_valid(rng: &mut ChaCha8Rng, n: usize, prop: &PropertySpec) -> SetFamily {
    let mut order: Vec<SetMask> = (0..1u32 << n).map(SetMask).collect();
    order.shuffle(rng);
    let mut members: Vec<SetMask> = Vec::new();
    for m in order {
        members.push(m);
        if !check(&SetFamily::new(n, members.clone()).unwrap(), prop).is_satisfied() {
            members.pop();
        }
    }
    let keep: f64 = rng.gen_range(0.3..=1.0);
    members.retain(|_| rng.gen_bool(keep));
    SetFamily::new(n, members).unwrap()
}

#[test]
fn decomposition_holds_on_random_valid_families_at_n5() {
    let prop = PropertySpec::total(2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10_000 {
        let f = random_valid(&mut rng, 5, &prop);
        let d = thm2_decompose(&f);
        assert!(d.all_hold(), "{f}\n{:?}", d.failures);
        assert!(matches!(d.hilton, HiltonVerdict::Holds { .. }));
    }
}

#[test]
fn threshold_json_keeps_rationals_as_text() {
    let r = threshold_scan(2, 2, 6).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    let row = &v["rows"][2];
    assert_eq!(row["n"], 4);
    assert_eq!(row["x"], "11/1");
    assert_eq!(row["y"], "6/1");
    assert!(row["gap_term"].is_null());
}
