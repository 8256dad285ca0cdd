use num_bigint::BigUint;
use proptest::prelude::*;
use sho_core::{FieldElem, MultiIndex, PrimeField};

fn exact_binom(top: u64, bottom: u64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for i in 0..bottom {
        acc *= top - i;
        acc /= i + 1;
    }
    acc
}

fn reduce(x: &BigUint, p: u32) -> u32 {
    (x % BigUint::from(p)).try_into().unwrap()
}

#[test]
fn lucas_matches_big_integer_binomials() {
    for p in [3, 5, 7, 11, 13] {
        let f = PrimeField::new(p).unwrap();
        for top in 0..=12u64 {
            for bottom in 0..=top {
                assert_eq!(
                    f.binom(top, bottom).value(),
                    reduce(&exact_binom(top, bottom), p),
                    "p={p} C({top},{bottom})"
                );
            }
        }
    }
}

#[test]
fn multi_binomials_match_products_of_exact_binomials() {
    for p in [3, 5, 7] {
        let f = PrimeField::new(p).unwrap();
        for a0 in 0..=12u32 {
            for a1 in 0..=(12 - a0) {
                for b0 in 0..=(12 - a0 - a1) {
                    for b1 in 0..=(12 - a0 - a1 - b0) {
                        let top = MultiIndex::new(vec![a0 + b0, a1 + b1]);
                        let bottom = MultiIndex::new(vec![a0, a1]);
                        let exact = exact_binom((a0 + b0) as u64, a0 as u64) * exact_binom((a1 + b1) as u64, a1 as u64);
                        assert_eq!(f.binom_multi(&top, &bottom).unwrap().value(), reduce(&exact, p));
                    }
                }
            }
        }
    }
}

#[test]
fn binomial_of_incomparable_indices_is_rejected() {
    let f = PrimeField::new(3).unwrap();
    let top = MultiIndex::new(vec![1, 2]);
    let bottom = MultiIndex::new(vec![2, 0]);
    assert!(f.binom_multi(&top, &bottom).is_err());
}

fn field_strategy() -> impl Strategy<Value = (PrimeField, FieldElem, FieldElem, FieldElem)> {
    prop::sample::select(vec![3u32, 5, 7]).prop_flat_map(|p| {
        let f = PrimeField::new(p).unwrap();
        (0..p, 0..p, 0..p).prop_map(move |(a, b, c)| (f, f.elem(a as i64), f.elem(b as i64), f.elem(c as i64)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3000))]

    #[test]
    fn field_axioms((f, a, b, c) in field_strategy()) {
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), FieldElem::ZERO);
        prop_assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
        if a.is_zero() {
            prop_assert!(f.inv(a).is_err());
        } else {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElem::ONE);
            prop_assert_eq!(f.pow(a, (f.p() - 1) as u64), FieldElem::ONE);
        }
    }

    #[test]
    fn bounded_addition_agrees_with_componentwise_sum(
        a in prop::collection::vec(0u32..5, 3),
        b in prop::collection::vec(0u32..5, 3),
        bounds in prop::collection::vec(0u32..9, 3),
    ) {
        let sum: Vec<u32> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let fits = sum.iter().zip(&bounds).all(|(s, m)| s <= m);
        let got = MultiIndex::new(a).add_bounded(&MultiIndex::new(b), &MultiIndex::new(bounds)).unwrap();
        prop_assert_eq!(got, fits.then(|| MultiIndex::new(sum)));
    }
}
