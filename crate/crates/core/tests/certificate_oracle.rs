//! Compares the maximality certificate with a plain enumeration of every
//! lattice between `M` and `(1/q)M`.

use std::collections::BTreeSet;

use lambda_orders::cyclotomic::GroupAlgebraElt;
use lambda_orders::lattice::IntLattice;
use lambda_orders::monoid::{Level, MSet};
use lambda_orders::orders::{
    group_algebra_element, group_ring_lattice, maximal_order, maximality_certificate, power_basis_order, verify_order,
    LambdaOrder, DEFAULT_PRIME_BOUND,
};
use lambda_orders::{Int, Rat};
use num_traits::Zero;

fn rref_mod(mut rows: Vec<Vec<u64>>, q: u64) -> Vec<Vec<u64>> {
    let cols = rows.first().map_or(0, Vec::len);
    let inv = |a: u64| (1..q).find(|b| a * b % q == 1).unwrap();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let s = inv(rows[r][c]);
        rows[r].iter_mut().for_each(|x| *x = *x * s % q);
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..cols {
                    rows[i][j] = (rows[i][j] + (q - f) * rows[r][j]) % q;
                }
            }
        }
        r += 1;
    }
    rows.truncate(r);
    rows
}

/// Every nonzero subspace of `F_q^n`, in RREF.
fn all_subspaces(n: usize, q: u64) -> BTreeSet<Vec<Vec<u64>>> {
    let vectors: Vec<Vec<u64>> = (1..q.pow(n as u32))
        .map(|mut k| {
            (0..n)
                .map(|_| {
                    let d = k % q;
                    k /= q;
                    d
                })
                .collect()
        })
        .collect();
    let mut spaces: BTreeSet<Vec<Vec<u64>>> = BTreeSet::new();
    let mut frontier = vec![Vec::new()];
    while let Some(w) = frontier.pop() {
        for v in &vectors {
            let mut gens: Vec<Vec<u64>> = w.clone();
            gens.push(v.clone());
            let s = rref_mod(gens, q);
            if s.len() > w.len() && spaces.insert(s.clone()) {
                frontier.push(s);
            }
        }
    }
    spaces
}

/// First proper Λ-overorder inside `(1/q)M` in order of (dimension, RREF).
fn brute_force_witness(m: &LambdaOrder, q: u64) -> Option<IntLattice> {
    let basis = m.lattice().basis();
    let dim = m.lattice().dim();
    let mut spaces: Vec<Vec<Vec<u64>>> = all_subspaces(basis.len(), q).into_iter().collect();
    spaces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let inv_q = Rat::new(Int::from(1), Int::from(q));
    for w in spaces {
        let rows: Vec<Vec<Rat>> = w
            .iter()
            .map(|c| {
                let mut v = vec![Rat::zero(); dim];
                for (ci, b) in c.iter().zip(&basis) {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x += Rat::from(Int::from(*ci)) * &inv_q * y;
                    }
                }
                v
            })
            .collect();
        let l = m.lattice().sum(&IntLattice::from_rational_rows(&rows, dim));
        let cand = LambdaOrder::new(m.algebra().clone(), l.clone()).unwrap();
        if verify_order(&cand, DEFAULT_PRIME_BOUND).passes() {
            return Some(l);
        }
    }
    None
}

fn agree(m: &LambdaOrder, q: u64) -> bool {
    let cert = maximality_certificate(m, q, DEFAULT_PRIME_BOUND).unwrap();
    let oracle = brute_force_witness(m, q);
    assert_eq!(cert.maximal, oracle.is_none(), "q = {q}");
    assert_eq!(cert.witness, oracle, "q = {q}");
    cert.maximal
}

fn lv(r: u64) -> Level {
    Level::new(r).unwrap()
}

#[test]
fn maximal_orders_have_no_overorders() {
    for s in [
        MSet::regular(lv(2)),
        MSet::regular(lv(3)),
        MSet::regular(lv(4)),
        MSet::vector_space(2, 2),
    ] {
        for q in [2, 3] {
            assert!(agree(&maximal_order(&s), q));
        }
    }
}

#[test]
fn suborders_are_refuted_identically() {
    let z3 = power_basis_order(3).unwrap();
    let k = z3.algebra().clone();
    let one = group_algebra_element(&k, &GroupAlgebraElt::one(3)).unwrap();
    let three_z = group_algebra_element(&k, &GroupAlgebraElt::z_pow(3, 1).scale(&Rat::from(Int::from(3)))).unwrap();
    let three_z2 = group_algebra_element(&k, &GroupAlgebraElt::z_pow(3, 2).scale(&Rat::from(Int::from(3)))).unwrap();
    let sub = LambdaOrder::spanned_by(k, &[one, three_z, three_z2]).unwrap();
    assert!(verify_order(&sub, DEFAULT_PRIME_BOUND).passes());
    assert!(!agree(&sub, 3));
    assert!(agree(&sub, 2));

    let g = group_ring_lattice(2).unwrap();
    let group_ring = LambdaOrder::new(g.algebra.clone(), g.lattice.clone()).unwrap();
    assert!(verify_order(&group_ring, DEFAULT_PRIME_BOUND).passes());
    assert!(!agree(&group_ring, 2));

    let z2 = power_basis_order(2).unwrap();
    let k = z2.algebra().clone();
    let one = group_algebra_element(&k, &GroupAlgebraElt::one(2)).unwrap();
    let four_z = group_algebra_element(&k, &GroupAlgebraElt::z_pow(2, 1).scale(&Rat::from(Int::from(4)))).unwrap();
    let sub = LambdaOrder::spanned_by(k, &[one, four_z]).unwrap();
    if verify_order(&sub, DEFAULT_PRIME_BOUND).passes() {
        assert!(!agree(&sub, 2));
    }
}
