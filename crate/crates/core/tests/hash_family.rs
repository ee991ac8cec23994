use std::collections::HashMap;

use derand_core::hashfam::{
    coin_probability, conditional_count, eval_hash, FamilyParams, Hasher, LinearCoins, SeedAssignment,
    DEFAULT_T_MAX,
};
use derand_core::num::pow2_neg;
use proptest::prelude::*;

fn tuples(universe: u64, size: usize) -> Vec<Vec<u64>> {
    if size == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in tuples(universe, size - 1) {
        for x in 0..universe {
            if !rest.contains(&x) {
                let mut t = rest.clone();
                t.push(x);
                out.push(t);
            }
        }
    }
    out
}

#[test]
fn small_families_are_exactly_d_wise_uniform() {
    for gamma in 1..=3 {
        for beta in 1..=3 {
            for d in 1..=3 {
                let p = FamilyParams::new(gamma, beta, d).unwrap();
                let h = Hasher::new(p);
                let seeds = 1u64 << p.t;
                let universe = 1u64 << gamma;
                for size in 1..=(d as usize).min(universe as usize) {
                    let outputs = 1u64 << (beta as usize * size);
                    for tuple in tuples(universe, size) {
                        let mut hist: HashMap<Vec<u64>, u64> = HashMap::new();
                        for s in 0..seeds {
                            let key = tuple.iter().map(|&x| h.eval(s as u128, x)).collect();
                            *hist.entry(key).or_default() += 1;
                        }
                        assert_eq!(hist.len() as u64, outputs, "({gamma},{beta},{d}) {tuple:?}");
                        assert!(hist.values().all(|&c| c * outputs == seeds), "({gamma},{beta},{d}) {tuple:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn small_family_coins_have_exact_frequency() {
    for gamma in 1..=3 {
        for beta in 1..=3 {
            for d in 1..=3 {
                let p = FamilyParams::new(gamma, beta, d).unwrap();
                let h = Hasher::new(p);
                for j in 0..=beta {
                    for x in 0..1u64 << gamma {
                        let ones = (0..1u128 << p.t).filter(|&s| h.coin(s, x, j)).count() as u64;
                        assert_eq!(ones << j, 1 << p.t, "({gamma},{beta},{d}) x={x} j={j}");
                    }
                }
            }
        }
    }
}

#[test]
fn hasher_matches_free_function() {
    let p = FamilyParams::new(4, 3, 2).unwrap();
    let h = Hasher::new(p);
    for s in (0..1u128 << p.t).step_by(97) {
        for x in 0..16 {
            assert_eq!(h.eval(s, x), eval_hash(&p, s, x).unwrap());
        }
    }
}

fn params() -> impl Strategy<Value = FamilyParams> {
    (1u32..=4, 1u32..=4, 1u32..=3).prop_map(|(g, b, d)| FamilyParams::new(g, b, d).unwrap())
}

fn prefix_of(p: FamilyParams) -> impl Strategy<Value = SeedAssignment> {
    (0..=p.t, any::<u128>()).prop_map(move |(len, bits)| {
        let mask = if len == 0 { 0 } else { (1u128 << len) - 1 };
        SeedAssignment::with_prefix(p, bits & mask, len).unwrap()
    })
}

proptest! {
    #[test]
    fn counts_split_over_the_next_bit(
        (p, a, x) in params().prop_flat_map(|p| (Just(p), prefix_of(p), 0..1u64 << p.gamma))
    ) {
        prop_assume!(!a.is_complete());
        let h = Hasher::new(p);
        let j = p.beta.min(2);
        let pred = |s: u128| h.coin(s, x, j);
        let whole = conditional_count(&a, DEFAULT_T_MAX, pred).unwrap();
        let lo = conditional_count(&a.extend(false), DEFAULT_T_MAX, pred).unwrap();
        let hi = conditional_count(&a.extend(true), DEFAULT_T_MAX, pred).unwrap();
        prop_assert_eq!(whole.numerator, lo.numerator + hi.numerator);
    }

    #[test]
    fn linear_counts_match_enumeration(
        (p, a, coins) in params().prop_flat_map(|p| {
            let coin = (0..1u64 << p.gamma, 1..=p.beta);
            (Just(p), prefix_of(p), prop::collection::vec(coin, 1..4))
        })
    ) {
        let h = Hasher::new(p);
        let lin = LinearCoins::new(p, &coins).unwrap();
        let all: Vec<usize> = (0..coins.len()).collect();
        let brute = conditional_count(&a, DEFAULT_T_MAX, |s| coins.iter().all(|&(x, j)| h.coin(s, x, j))).unwrap();
        prop_assert_eq!(lin.count_all(&a, &all), brute);
    }

    #[test]
    fn unconditioned_coin_probability_is_exact(
        (p, x, j) in params().prop_flat_map(|p| (Just(p), 0..1u64 << p.gamma, 1..=p.beta))
    ) {
        let a = SeedAssignment::new(p);
        prop_assert_eq!(coin_probability(&a, x, j).unwrap(), pow2_neg(j));
    }
}
