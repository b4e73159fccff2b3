use lambda_orders::algebra::LambdaAlgebra;
use lambda_orders::cyclotomic::{crt_join, crt_split, CycloElt, GroupAlgebraElt};
use lambda_orders::lattice::{index, preimage_lattice, IntLattice};
use lambda_orders::matrix::Matrix;
use lambda_orders::monoid::{Level, MSet};
use lambda_orders::orders::{maximal_order_in, power_basis_order, verify_order, LambdaOrder, DEFAULT_PRIME_BOUND};
use lambda_orders::selftest::{run_criterion, Fault, Options};
use lambda_orders::{Int, Rat};
use num_traits::Zero;
use proptest::prelude::*;
use std::sync::Arc;

fn q(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

fn group_elt(r: u64) -> impl Strategy<Value = GroupAlgebraElt> {
    prop::collection::vec((-20i64..=20, 1i64..=6), r as usize)
        .prop_map(move |cs| GroupAlgebraElt::new(r, cs.into_iter().map(|(n, d)| q(n, d)).collect()).unwrap())
}

fn level_and_two_elts() -> impl Strategy<Value = (GroupAlgebraElt, GroupAlgebraElt)> {
    (1u64..=18).prop_flat_map(|r| (group_elt(r), group_elt(r)))
}

/// A few building blocks combined by products, coproducts and lifts.
fn small_mset() -> impl Strategy<Value = MSet> {
    let leaf = prop_oneof![
        (1u64..=6).prop_map(|r| MSet::regular(Level::new(r).unwrap())),
        (1u64..=6).prop_map(|r| MSet::singleton(Level::new(r).unwrap())),
        Just(MSet::vector_space(2, 1)),
        Just(MSet::vector_space(3, 1)),
    ];
    (leaf.clone(), leaf, 0u8..3, 1u64..=2).prop_map(|(a, b, op, k)| {
        let m = match op {
            0 => a.product(&b),
            1 => a.coproduct(&b),
            _ => a,
        };
        let level = Level::new(m.level().get() * k).unwrap();
        m.lift(level).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn action_is_a_monoid_action(m in small_mset()) {
        let r = m.level().get();
        for s in 0..m.size() {
            prop_assert_eq!(m.act(1, s), s);
            for a in 0..r {
                for b in 0..r {
                    prop_assert_eq!(m.act(a, m.act(b, s)), m.act(a * b % r, s));
                }
            }
        }
    }

    /// Levels through which an action factors are closed under gcd, so the
    /// reduced level divides every other one.
    #[test]
    fn factoring_levels_are_closed_under_gcd(m in small_mset()) {
        let r = m.level().get();
        let factors_through = |d: u64| (0..r).all(|a| (0..m.size()).all(|s| m.act(a, s) == m.act(a % d, s)));
        let levels: Vec<u64> = (1..=r).filter(|d| r % d == 0 && factors_through(*d)).collect();
        for &d in &levels {
            for &e in &levels {
                prop_assert!(levels.contains(&num_integer::gcd(d, e)));
            }
        }
        let reduced = m.minimal_level().level().get();
        prop_assert!(levels.iter().all(|d| d % reduced == 0));
    }

    #[test]
    fn crt_round_trip((e, _f) in level_and_two_elts()) {
        prop_assert_eq!(crt_join(e.level(), &crt_split(&e)).unwrap(), e);
    }

    #[test]
    fn crt_split_is_multiplicative((e, f) in level_and_two_elts()) {
        let lhs = crt_split(&(&e * &f));
        let rhs: Vec<CycloElt> = crt_split(&e).iter().zip(crt_split(&f)).map(|(a, b)| a * &b).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn psi_is_a_monoid_of_ring_maps((e, f) in level_and_two_elts(), a in 0u64..40, b in 0u64..40) {
        prop_assert_eq!(e.psi(a).psi(b), e.psi(a * b));
        prop_assert_eq!((&e * &f).psi(a), &e.psi(a) * &f.psi(a));
        prop_assert_eq!(e.psi(1), e.clone());
    }

    #[test]
    fn preimage_membership(entries in prop::collection::vec((-6i64..=6, 1i64..=5), 4)) {
        let a: Vec<Rat> = entries.iter().map(|&(n, d)| q(n, d)).collect();
        let m = Matrix::from_rows(vec![a[..2].to_vec(), a[2..].to_vec()], 2);
        prop_assume!(m.rank() == 2);
        let l = preimage_lattice(&m).unwrap();
        for x in -6i64..=6 {
            for y in -6i64..=6 {
                let v = vec![q(x, 6), q(y, 6)];
                let image_integral = m.apply(&v).iter().all(|c| c.is_integer());
                prop_assert_eq!(l.contains(&v), image_integral);
            }
        }
    }

    #[test]
    fn index_is_multiplicative_in_chains(
        rows in prop::collection::vec(prop::collection::vec(-5i64..=5, 3), 3),
        k in 1i64..=4,
    ) {
        let rows: Vec<Vec<Int>> = rows.into_iter().map(|r| r.into_iter().map(Int::from).collect()).collect();
        let middle = IntLattice::from_integer_rows(&rows, 3);
        prop_assume!(middle.is_full_rank());
        let inner = middle.scale(&q(k, 1));
        let outer = IntLattice::standard(3);
        let i12 = index(&inner, &middle).unwrap();
        let i23 = index(&middle, &outer).unwrap();
        prop_assert_eq!(index(&inner, &outer).unwrap(), i12 * i23);
    }

    /// Any sub-order the test builds that passes verification lies inside
    /// the maximal order.
    #[test]
    fn maximal_order_contains_verified_suborders(
        r in 1u64..=6,
        gens in prop::collection::vec(prop::collection::vec((-3i64..=3, 1i64..=3), 6), 1..3),
    ) {
        let z = power_basis_order(r).unwrap();
        let k: Arc<LambdaAlgebra> = z.algebra().clone();
        let max = maximal_order_in(k.clone());
        let mut elements = vec![k.unit().to_vec()];
        for g in gens {
            let coeffs: Vec<Rat> = g.into_iter().take(r as usize).map(|(n, d)| q(n, d)).collect();
            let e = GroupAlgebraElt::new(r, coeffs).unwrap();
            elements.push(lambda_orders::orders::group_algebra_element(&k, &e).unwrap());
        }
        let candidate = LambdaOrder::spanned_by(k, &elements).unwrap();
        if verify_order(&candidate, DEFAULT_PRIME_BOUND).passes() {
            prop_assert!(max.lattice().contains_lattice(candidate.lattice()));
        }
    }
}

#[test]
fn scaled_suborders_are_contained() {
    let mut verified = Vec::new();
    for r in [2u64, 3, 4, 6] {
        let z = power_basis_order(r).unwrap();
        let k = z.algebra().clone();
        let max = maximal_order_in(k.clone());
        for c in [2i64, 3, 6] {
            let mut elements = vec![k.unit().to_vec()];
            elements.extend(
                z.lattice()
                    .basis()
                    .into_iter()
                    .map(|b| b.iter().map(|x| x * q(c, 1)).collect()),
            );
            let sub = LambdaOrder::spanned_by(k.clone(), &elements).unwrap();
            if verify_order(&sub, DEFAULT_PRIME_BOUND).passes() {
                assert!(max.lattice().contains_lattice(sub.lattice()));
                assert!(!sub.lattice().contains_lattice(max.lattice()));
                verified.push((r, c));
            }
        }
    }
    // Z + cZ[μ_r] is a Λ-order exactly when z^p = 1 for every prime p | c
    assert_eq!(verified, vec![(2, 2), (3, 3)]);
}

#[test]
fn naive_integer_lattice_of_regular_three() {
    // indicator of the point 0 is (1 + z + z^2)/3, outside Z[μ_3]
    let z = power_basis_order(3).unwrap();
    let k = z.algebra();
    let mut e0 = vec![Rat::zero(); k.dim()];
    e0[0] = q(1, 1);
    assert_eq!(k.mul(&e0, &e0), e0);
    assert!(!z.lattice().contains(&e0));
}

#[test]
fn corrupted_cyclotomic_table_is_reported() {
    let opts = Options {
        quick: true,
        fault: Some(Fault::CorruptCyclotomicTable),
        ..Options::default()
    };
    let result = run_criterion(8, &opts);
    assert!(!result.passed);
    assert_eq!(result.module, "cyclotomic");
    assert!(result.line().starts_with("FAIL"));
    assert!(
        run_criterion(
            8,
            &Options {
                quick: true,
                ..Options::default()
            }
        )
        .passed
    );
}
