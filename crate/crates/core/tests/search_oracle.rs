//! The branch-and-bound solvers against plain enumeration of every subfamily.

use chainlattice::search::{candidate_constructions, max_family_exact, max_weight_on_ground, Budget};
use chainlattice::{
    chain_pair_ground, check, circle_ground, weight_of, ChainMode, PropertySpec, SetFamily, SetMask, Weight,
    WeightedGround,
};

fn properties() -> Vec<PropertySpec> {
    let mut out = vec![PropertySpec::Intersecting, PropertySpec::ComplementFree];
    for mode in [ChainMode::Plain, ChainMode::Strong, ChainMode::Total] {
        for (p, q) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2)] {
            out.push(PropertySpec::ChainIntersect { mode, p, q });
        }
    }
    out.extend([1, 2].map(PropertySpec::KSperner));
    out.extend([1, 2, 3].map(PropertySpec::Ccpf));
    out
}

fn subfamily(n: usize, pool: &[SetMask], pick: u64) -> SetFamily {
    let members = pool.iter().enumerate().filter(|(i, _)| pick >> i & 1 == 1).map(|(_, &m)| m).collect();
    SetFamily::new(n, members).unwrap()
}

/// Heaviest valid subfamily by visiting all of them.
fn naive_max(n: usize, pool: &[SetMask], weight: impl Fn(SetMask) -> Weight, prop: &PropertySpec) -> Weight {
    assert!(pool.len() <= 20);
    let mut best = Weight::from_integer(0.into());
    for pick in 0..1u64 << pool.len() {
        let f = subfamily(n, pool, pick);
        if check(&f, prop).is_satisfied() {
            let w: Weight = f.iter().map(&weight).sum();
            if w > best {
                best = w;
            }
        }
    }
    best
}

#[test]
fn exact_search_matches_enumeration() {
    for n in 1..=4 {
        let pool: Vec<SetMask> = (0..1u32 << n).map(SetMask).collect();
        for prop in properties() {
            let naive = naive_max(n, &pool, |_| Weight::from_integer(1.into()), &prop);
            let r = max_family_exact(n, &prop, Budget::default()).unwrap();
            assert!(r.exhaustive);
            assert_eq!(r.optimum, naive, "n={n} {prop}");
            assert_eq!(Weight::from_integer((r.witness.len() as i64).into()), naive);
            assert!(check(&r.witness, &prop).is_satisfied());
        }
    }
}

fn ground_matches(g: &WeightedGround) {
    let n = g.n();
    let pool = g.members().members().to_vec();
    for prop in properties() {
        let naive = naive_max(n, &pool, |m| g.weight(m).unwrap(), &prop);
        let r = max_weight_on_ground(g, &prop, Budget::default()).unwrap();
        assert!(r.exhaustive);
        assert_eq!(r.optimum, naive, "{g} {prop}");
        assert_eq!(weight_of(g, &r.witness).unwrap(), naive);
        assert!(check(&r.witness, &prop).is_satisfied());
    }
}

#[test]
fn circle_search_matches_enumeration() {
    for n in 2..=4 {
        ground_matches(&circle_ground(n).unwrap());
    }
}

#[test]
fn chain_pair_search_matches_enumeration() {
    for n in 2..=6 {
        ground_matches(&chain_pair_ground(n, &(1..=n).collect::<Vec<_>>()).unwrap());
    }
    ground_matches(&chain_pair_ground(5, &[3, 1, 5, 2, 4]).unwrap());
}

#[test]
fn circle_optimum_sits_between_constructions_and_bounds_exact() {
    for n in 2..=5 {
        let circle = circle_ground(n).unwrap();
        for prop in properties() {
            let on_circle = max_weight_on_ground(&circle, &prop, Budget::default()).unwrap();
            for (label, spec) in candidate_constructions(n, &prop) {
                let f = spec.build().unwrap();
                if check(&f, &prop).is_satisfied() {
                    let part = f.filter(|m| circle.members().contains(m));
                    assert!(weight_of(&circle, &part).unwrap() <= on_circle.optimum, "n={n} {prop} {label}");
                }
            }
            let exact = max_family_exact(n, &prop, Budget::default()).unwrap();
            assert!(exact.optimum <= on_circle.optimum, "n={n} {prop}");
        }
    }
}

#[test]
fn repeated_runs_agree() {
    for prop in properties() {
        let a = max_family_exact(4, &prop, Budget::default()).unwrap();
        let b = max_family_exact(4, &prop, Budget::default()).unwrap();
        assert_eq!(a.witness, b.witness);
        assert_eq!(a.nodes_explored, b.nodes_explored);
    }
}
