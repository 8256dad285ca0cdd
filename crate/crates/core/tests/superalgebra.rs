use std::sync::OnceLock;

use proptest::prelude::*;
use sho_core::witt::DivergenceConvention;
use sho_core::{AlgebraContext, MonoId, Parity, SuperPoly, VectorField};

fn small() -> &'static AlgebraContext {
    static CTX: OnceLock<AlgebraContext> = OnceLock::new();
    CTX.get_or_init(|| AlgebraContext::new(2, 3, &[1, 1]).unwrap())
}

fn medium() -> &'static AlgebraContext {
    static CTX: OnceLock<AlgebraContext> = OnceLock::new();
    CTX.get_or_init(|| AlgebraContext::new(3, 3, &[1, 1, 1]).unwrap())
}

fn ids_of(ctx: &AlgebraContext, parity: Parity) -> Vec<MonoId> {
    ctx.ids().filter(|&m| ctx.parity_of(m) == parity).collect()
}

/// Homogeneous polynomial with up to four terms.
fn homogeneous_poly(ctx: &'static AlgebraContext) -> impl Strategy<Value = SuperPoly> {
    let p = ctx.p() as i64;
    prop::sample::select(vec![Parity::Even, Parity::Odd]).prop_flat_map(move |parity| {
        let pool = ids_of(ctx, parity);
        prop::collection::vec((prop::sample::select(pool), 1..p), 1..5)
            .prop_map(move |terms| SuperPoly::from_terms(ctx, terms.into_iter().map(|(m, c)| (m, ctx.field().elem(c)))))
    })
}

/// Homogeneous vector field with up to four terms.
fn homogeneous_vf(ctx: &'static AlgebraContext) -> impl Strategy<Value = VectorField> {
    let p = ctx.p() as i64;
    prop::sample::select(vec![Parity::Even, Parity::Odd]).prop_flat_map(move |parity| {
        let pool: Vec<u32> = (0..ctx.w_dim() as u32).filter(|&c| ctx.w_parity(c) == parity).collect();
        prop::collection::vec((prop::sample::select(pool), 1..p), 1..5).prop_map(move |terms| {
            let mut v = VectorField::zero(ctx);
            for (coord, c) in terms {
                v.add_term(ctx.field(), coord, ctx.field().elem(c));
            }
            v
        })
    })
}

fn sign(ctx: &AlgebraContext, x: Parity, y: Parity) -> sho_core::FieldElem {
    ctx.field().sign(x.sign_odd(y))
}

fn check_supercommutative(ctx: &'static AlgebraContext, f: &SuperPoly, g: &SuperPoly) -> Result<(), TestCaseError> {
    let (df, dg) = (f.parity(ctx).unwrap(), g.parity(ctx).unwrap());
    let fg = ctx.mul(f, g).unwrap();
    let gf = ctx.mul(g, f).unwrap().scale(ctx.field(), sign(ctx, df, dg));
    prop_assert_eq!(fg, gf);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn supercommutative_small(f in homogeneous_poly(small()), g in homogeneous_poly(small())) {
        check_supercommutative(small(), &f, &g)?;
    }

    #[test]
    fn supercommutative_medium(f in homogeneous_poly(medium()), g in homogeneous_poly(medium())) {
        check_supercommutative(medium(), &f, &g)?;
    }

    #[test]
    fn associative(
        a in prop::sample::select(medium().ids().collect::<Vec<_>>()),
        b in prop::sample::select(medium().ids().collect::<Vec<_>>()),
        c in prop::sample::select(medium().ids().collect::<Vec<_>>()),
    ) {
        let ctx = medium();
        let one = ctx.field().elem(1);
        let (f, g, h) = (
            SuperPoly::monomial(ctx, a, one),
            SuperPoly::monomial(ctx, b, one),
            SuperPoly::monomial(ctx, c, one),
        );
        let left = ctx.mul(&ctx.mul(&f, &g).unwrap(), &h).unwrap();
        let right = ctx.mul(&f, &ctx.mul(&g, &h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn apply_is_a_representation(
        a in homogeneous_vf(small()),
        b in homogeneous_vf(small()),
        g in homogeneous_poly(small()),
    ) {
        let ctx = small();
        let (da, db) = (a.parity(ctx).unwrap(), b.parity(ctx).unwrap());
        let lhs = ctx.apply(&ctx.bracket(&a, &b).unwrap(), &g).unwrap();
        let ab = ctx.apply(&a, &ctx.apply(&b, &g).unwrap()).unwrap();
        let ba = ctx.apply(&b, &ctx.apply(&a, &g).unwrap()).unwrap();
        prop_assert_eq!(lhs, ab.sub(ctx, &ba.scale(ctx.field(), sign(ctx, da, db))).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn jacobi_small(a in homogeneous_vf(small()), b in homogeneous_vf(small()), c in homogeneous_vf(small())) {
        check_jacobi(small(), &a, &b, &c)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn jacobi_medium(a in homogeneous_vf(medium()), b in homogeneous_vf(medium()), c in homogeneous_vf(medium())) {
        check_jacobi(medium(), &a, &b, &c)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn hamiltonian_map_is_a_homomorphism_medium(
        a in prop::sample::select(medium().ids().collect::<Vec<_>>()),
        b in prop::sample::select(medium().ids().collect::<Vec<_>>()),
    ) {
        let ctx = medium();
        let g = SuperPoly::monomial(ctx, b, ctx.field().elem(1));
        let tf = ctx.t_h_monomial(a);
        let lhs = ctx.bracket(&tf, &ctx.t_h(&g)).unwrap();
        prop_assert_eq!(lhs, ctx.t_h(&ctx.apply(&tf, &g).unwrap()));
    }
}

fn check_jacobi(ctx: &AlgebraContext, a: &VectorField, b: &VectorField, c: &VectorField) -> Result<(), TestCaseError> {
    let (da, db) = (a.parity(ctx).unwrap(), b.parity(ctx).unwrap());
    let lhs = ctx.bracket(a, &ctx.bracket(b, c).unwrap()).unwrap();
    let r1 = ctx.bracket(&ctx.bracket(a, b).unwrap(), c).unwrap();
    let r2 = ctx
        .bracket(b, &ctx.bracket(a, c).unwrap())
        .unwrap()
        .scale(ctx.field(), sign(ctx, da, db));
    prop_assert_eq!(lhs, r1.add(ctx, &r2).unwrap());
    Ok(())
}

#[test]
fn derivations_obey_the_super_leibniz_rule_on_all_pairs() {
    let ctx = small();
    let one = ctx.field().elem(1);
    for i in 1..=ctx.directions() {
        for a in ctx.ids() {
            let f = SuperPoly::monomial(ctx, a, one);
            for b in ctx.ids() {
                let g = SuperPoly::monomial(ctx, b, one);
                let lhs = ctx.derive(i, &ctx.mul(&f, &g).unwrap()).unwrap();
                let t1 = ctx.mul(&ctx.derive(i, &f).unwrap(), &g).unwrap();
                let t2 = ctx
                    .mul(&f, &ctx.derive(i, &g).unwrap())
                    .unwrap()
                    .scale(ctx.field(), sign(ctx, ctx.tau(i), ctx.parity_of(a)));
                assert_eq!(lhs, t1.add(ctx, &t2).unwrap(), "D{i} on {a:?}, {b:?}");
            }
        }
    }
}

#[test]
fn basis_sizes() {
    for (n, p, t) in [(2usize, 3u32, vec![1u32, 1]), (3, 3, vec![1, 1, 1]), (2, 5, vec![1, 2])] {
        let ctx = AlgebraContext::new(n, p, &t).unwrap();
        let expected = (p as usize).pow(t.iter().sum()) << n;
        assert_eq!(ctx.dim(), expected);
        assert_eq!(ctx.w_dim(), 2 * n * expected);
        let mut keys: Vec<u64> = ctx.ids().map(|m| ctx.key(m)).collect();
        keys.sort_unstable();
        keys.dedup();
        assert_eq!(keys.len(), expected);
    }
}

#[test]
fn bracket_is_super_skew_symmetric_on_all_basis_pairs() {
    let ctx = small();
    let one = ctx.field().elem(1);
    let basis: Vec<VectorField> = (0..ctx.w_dim() as u32)
        .map(|c| {
            let (m, j) = ctx.w_split(c);
            VectorField::basis(ctx, m, j, one)
        })
        .collect();
    for a in &basis {
        for b in &basis {
            let (da, db) = (a.parity(ctx).unwrap(), b.parity(ctx).unwrap());
            let ab = ctx.bracket(a, b).unwrap();
            let ba = ctx.bracket(b, a).unwrap();
            let minus = ctx.field().neg(sign(ctx, da, db));
            assert_eq!(ab, ba.scale(ctx.field(), minus));
        }
    }
}

/// Exactly one of the two action conventions makes the divergence identity
/// hold on every pair of basis vector fields; it is the skew action.
#[test]
fn divergence_identity_pins_the_skew_action() {
    let ctx = small();
    let one = ctx.field().elem(1);
    let basis: Vec<VectorField> = (0..ctx.w_dim() as u32)
        .map(|c| {
            let (m, j) = ctx.w_split(c);
            VectorField::basis(ctx, m, j, one)
        })
        .collect();
    let mut failures = Vec::new();
    for conv in DivergenceConvention::ALL {
        let mut bad = 0usize;
        for a in &basis {
            for b in &basis {
                if !ctx.divergence_defect(conv, a, b).unwrap().is_zero() {
                    bad += 1;
                }
            }
        }
        failures.push((conv, bad));
    }
    assert_eq!(failures[0], (DivergenceConvention::SkewAction, 0));
    assert!(failures[1].1 > 0);
}

#[test]
fn hamiltonian_map_is_a_homomorphism_on_all_pairs() {
    let ctx = small();
    let one = ctx.field().elem(1);
    for a in ctx.ids() {
        let tf = ctx.t_h_monomial(a);
        for b in ctx.ids() {
            let g = SuperPoly::monomial(ctx, b, one);
            let lhs = ctx.bracket(&tf, &ctx.t_h(&g)).unwrap();
            assert_eq!(lhs, ctx.t_h(&ctx.apply(&tf, &g).unwrap()));
        }
    }
}

#[test]
fn hamiltonian_map_shifts_parity() {
    let ctx = medium();
    for m in ctx.ids() {
        let image = ctx.t_h_monomial(m);
        if !image.is_zero() {
            assert_eq!(image.parity(ctx), Some(ctx.parity_of(m) + Parity::Odd));
        }
    }
}
