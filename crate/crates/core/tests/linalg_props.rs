use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sho_core::linalg::{dense_nullspace, dense_rref, echelonize, nullspace, ConstraintStream};
use sho_core::{PrimeField, SparseVec, Subspace};

fn random_rows(rng: &mut ChaCha8Rng, f: &PrimeField, rows: usize, cols: usize, density: f64) -> Vec<SparseVec> {
    (0..rows)
        .map(|_| {
            let mut entries = Vec::new();
            for c in 0..cols {
                if rng.gen_bool(density) {
                    entries.push((c as u32, f.elem(rng.gen_range(1..f.p() as i64))));
                }
            }
            SparseVec::from_entries(f, cols, entries).unwrap()
        })
        .collect()
}

fn kernel_of(f: PrimeField, cols: usize, rows: &[SparseVec]) -> Subspace {
    nullspace(f, ConstraintStream::new(cols, rows.iter().cloned()))
        .unwrap()
        .0
}

fn same_subspace(a: &Subspace, b: &Subspace) -> bool {
    a.is_subspace_of(b).unwrap() && b.is_subspace_of(a).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rank_plus_nullity(
        seed in any::<u64>(),
        p in prop::sample::select(vec![3u32, 5]),
        rows in 1usize..=200,
        cols in 1usize..=200,
    ) {
        let f = PrimeField::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_rows(&mut rng, &f, rows, cols, 0.05);
        let kernel = kernel_of(f, cols, &m);
        let rowspace = echelonize(f, cols, &m).unwrap();
        prop_assert_eq!(kernel.rank() + rowspace.rank(), cols);
        let dense: Vec<Vec<_>> = kernel.basis().iter().map(|k| k.to_dense()).collect();
        for r in &m {
            for k in &dense {
                prop_assert!(r.dot_dense(&f, k).is_zero());
            }
        }
    }
}

#[test]
fn nullspace_ignores_row_order() {
    for p in [3u32, 5] {
        let f = PrimeField::new(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(p as u64);
        let mut m = random_rows(&mut rng, &f, 150, 200, 0.05);
        let reference = kernel_of(f, 200, &m);
        for _ in 0..50 {
            m.shuffle(&mut rng);
            let shuffled = kernel_of(f, 200, &m);
            assert!(same_subspace(&reference, &shuffled));
            assert_eq!(reference, shuffled);
        }
    }
}

#[test]
fn sparse_and_dense_elimination_agree() {
    let f = PrimeField::new(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for density in [0.02, 0.05, 0.3] {
        let m = random_rows(&mut rng, &f, 120, 100, density);
        assert_eq!(echelonize(f, 100, &m).unwrap(), dense_rref(&f, 100, &m).unwrap());
        assert_eq!(kernel_of(f, 100, &m), dense_nullspace(&f, 100, &m).unwrap());
    }
}

#[test]
fn intersection_and_sum_dimensions() {
    let f = PrimeField::new(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let a = echelonize(f, 40, &random_rows(&mut rng, &f, 15, 40, 0.2)).unwrap();
        let b = echelonize(f, 40, &random_rows(&mut rng, &f, 18, 40, 0.2)).unwrap();
        let sum = a.sum(&b).unwrap();
        let meet = a.intersection(&b).unwrap();
        assert_eq!(sum.rank() + meet.rank(), a.rank() + b.rank());
        assert!(meet.is_subspace_of(&a).unwrap() && meet.is_subspace_of(&b).unwrap());
    }
}
