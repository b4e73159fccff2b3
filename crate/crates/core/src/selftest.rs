//! The acceptance checks, runnable from the library, the test suite and the
//! command line.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::LambdaAlgebra;
use crate::arith::{divisors, totient};
use crate::cyclotomic::{crt_join, crt_split, phi, GroupAlgebraElt, QPoly};
use crate::factorization::{exhaustive_corpus, Verdict};
use crate::lattice::index;
use crate::matrix::Matrix;
use crate::monoid::{Level, MSet, MSetMap};
use crate::orders::{
    group_algebra_element, group_ring_lattice, maximal_order, maximal_order_in, maximality_certificate,
    power_basis_order, suspicious_primes, verify_order, LambdaOrder,
};
use crate::scalar::{rat, Int, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Perturb one cyclotomic polynomial in the table the substrate check reads.
    CorruptCyclotomicTable,
}

#[derive(Clone, Debug)]
pub struct Options {
    pub quick: bool,
    pub prime_bound: u64,
    pub fault: Option<Fault>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            quick: false,
            prime_bound: crate::orders::DEFAULT_PRIME_BOUND,
            fault: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub module: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!(
            "{status} [{}] {} ({}): {}",
            self.id, self.title, self.module, self.detail
        )
    }
}

pub const CRITERIA: [(&str, &str); 9] = [
    ("maximal order of the regular set is Z[μ_r]", "orders"),
    ("group ring of (Z/p)^2 is a non-maximal Λ-order", "orders"),
    ("factorization criterion agrees with exhaustive search", "factorization"),
    ("points of the algebra recover the set", "lambda-algebra"),
    ("maximal orders satisfy the Λ-order invariants", "orders"),
    ("maximality certificates", "orders"),
    ("maximal order of a quotient is an intersection", "orders"),
    ("CRT splitting of Q[μ_r]", "cyclotomic"),
    ("zero image gives a rational factor", "monoid-core"),
];

type Outcome = std::result::Result<String, String>;

pub fn run_criterion(id: usize, opts: &Options) -> CriterionResult {
    let (title, module) = CRITERIA[id - 1];
    let outcome = match id {
        1 => regular_sets(opts),
        2 => group_rings(opts),
        3 => criterion_vs_oracle(opts),
        4 => round_trip(opts),
        5 => order_invariants(opts),
        6 => certificates(opts),
        7 => intersections(opts),
        8 => crt_substrate(opts),
        9 => zero_image(opts),
        _ => Err(format!("no criterion {id}")),
    };
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult {
        id,
        title,
        module,
        passed,
        detail,
    }
}

pub fn run_all(opts: &Options) -> Vec<CriterionResult> {
    (1..=CRITERIA.len()).map(|id| run_criterion(id, opts)).collect()
}

fn lv(r: u64) -> Level {
    Level::new(r).expect("positive level")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `Z/r` acting on the classes `{s, -s}` of `Z/r`.
fn plus_minus_quotient(r: u64) -> MSet {
    let reps: Vec<u64> = (0..r).filter(|&s| s <= (r - s) % r).collect();
    let class = |x: u64| {
        reps.iter()
            .position(|&s| s == x.min((r - x) % r))
            .expect("representative")
    };
    MSet::from_fn(lv(r), reps.len(), |a, i| class(a * reps[i] % r)).expect("well defined")
}

/// Deterministic corpus of sets with at most 8 points and level at most 12.
pub fn mset_corpus(quick: bool) -> Vec<(String, MSet)> {
    let mut out: Vec<(String, MSet)> = Vec::new();
    for r in 1..=8 {
        out.push((format!("regular({r})"), MSet::regular(lv(r))));
    }
    for r in [1, 2, 3, 5, 6, 7, 10, 11, 12] {
        out.push((format!("singleton({r})"), MSet::singleton(lv(r))));
    }
    out.push(("trivial(4, 3)".into(), MSet::trivial(lv(4), 3)));
    out.push(("trivial(1, 5)".into(), MSet::trivial(lv(1), 5)));
    for (p, k) in [(2, 1), (2, 2), (2, 3), (3, 1), (5, 1), (7, 1)] {
        out.push((format!("vector_space({p}, {k})"), MSet::vector_space(p, k)));
    }
    for r in [5, 7, 8, 9, 10, 12] {
        out.push((format!("regular({r})/±1"), plus_minus_quotient(r)));
    }
    for (d, r) in [
        (2, 4),
        (2, 6),
        (3, 6),
        (3, 9),
        (4, 12),
        (6, 12),
        (4, 8),
        (5, 10),
        (3, 12),
    ] {
        out.push((
            format!("regular({d}) at level {r}"),
            MSet::regular(lv(d)).lift(lv(r)).expect("multiple"),
        ));
    }
    for (a, b) in [(2, 3), (2, 2), (2, 4)] {
        out.push((
            format!("regular({a}) x regular({b})"),
            MSet::regular(lv(a)).product(&MSet::regular(lv(b))),
        ));
    }
    for (a, b) in [(2, 3), (2, 2), (2, 4), (3, 3), (3, 4)] {
        out.push((
            format!("regular({a}) + regular({b})"),
            MSet::regular(lv(a)).coproduct(&MSet::regular(lv(b))),
        ));
    }
    out.push((
        "regular(4) + singleton(3)".into(),
        MSet::regular(lv(4)).coproduct(&MSet::singleton(lv(3))),
    ));
    out.push((
        "regular(5)/±1 + regular(2)".into(),
        plus_minus_quotient(5).coproduct(&MSet::regular(lv(2))),
    ));
    out.push((
        "vector_space(3, 1) x regular(2)".into(),
        MSet::vector_space(3, 1).product(&MSet::regular(lv(2))),
    ));
    out.push(("empty(3)".into(), MSet::empty(lv(3))));
    // sets produced by the factorization criterion from small presentations
    let mut seen: BTreeSet<(u64, Vec<Vec<usize>>)> = BTreeSet::new();
    let mut from_presentations = 0;
    for p in exhaustive_corpus(2, &[1, 2, 3, 4], &[2, 3]) {
        if let Verdict::Factors { mset, .. } = p.check_factors() {
            let m = mset.minimal_level();
            if m.level().get() <= 12 && !m.is_empty() && seen.insert((m.level().get(), m.table().to_vec())) {
                out.push((format!("factored presentation #{from_presentations}"), m));
                from_presentations += 1;
            }
        }
        if from_presentations >= 20 {
            break;
        }
    }
    debug_assert!(out.iter().all(|(_, s)| s.size() <= 8 && s.level().get() <= 12));
    if quick {
        out.truncate(30);
    }
    out
}

fn regular_sets(opts: &Options) -> Outcome {
    let top = if opts.quick { 10 } else { 20 };
    for r in 1..=top {
        let m = maximal_order(&MSet::regular(lv(r)));
        let z = power_basis_order(r).map_err(|e| e.to_string())?;
        let idx = index(z.lattice(), m.lattice()).map_err(|e| format!("r = {r}: {e}"))?;
        ensure(idx == Int::from(1) && m.lattice() == z.lattice(), || {
            format!("r = {r}: index {idx}, maximal order differs from the power basis lattice")
        })?;
    }
    Ok(format!("r = 1..{top}: identical HNF, index 1"))
}

fn group_rings(_opts: &Options) -> Outcome {
    let mut notes = Vec::new();
    for p in [2u64, 3] {
        let g = group_ring_lattice(p).map_err(|e| e.to_string())?;
        let k = &g.algebra;
        let pr = rat(p as i64);
        let times = |v: &[Rat], c: &Rat| v.iter().map(|x| x * c).collect::<Vec<_>>();
        ensure(k.mul(&g.x, &g.x) == times(&g.x, &pr), || format!("p = {p}: x^2 != p x"))?;
        ensure(k.psi(p, &g.x) == times(k.unit(), &pr), || {
            format!("p = {p}: ψ_p(x) != p")
        })?;
        let m = maximal_order_in(k.clone());
        ensure(m.lattice().contains(&g.x), || {
            format!("p = {p}: x not in the maximal order")
        })?;
        ensure(!g.lattice.contains(&g.x), || {
            format!("p = {p}: x already in the group ring")
        })?;
        let idx = index(&g.lattice, m.lattice()).map_err(|e| format!("p = {p}: {e}"))?;
        ensure(idx.is_multiple_of(&Int::from(p)), || {
            format!("p = {p}: index {idx} not divisible by p")
        })?;
        notes.push(format!("p = {p}: index {idx}"));
    }
    Ok(notes.join("; "))
}

fn criterion_vs_oracle(opts: &Options) -> Outcome {
    let size = if opts.quick { 2 } else { 3 };
    let corpus = exhaustive_corpus(size, &[1, 2, 3, 4], &[2, 3]);
    let mut yes = 0;
    for p in &corpus {
        let verdict = p.check_factors();
        let bound = match &verdict {
            Verdict::Factors { r, .. } => 2 * r,
            Verdict::DoesNotFactor(_) => 36,
        };
        let oracle = p.brute_force_factor(bound);
        if verdict.factors() != oracle.is_some() {
            return Err(format!(
                "disagreement on {}: criterion {}, oracle {}",
                p.to_json(),
                verdict.factors(),
                oracle.is_some()
            ));
        }
        if let Verdict::Factors { mset, .. } = &verdict {
            ensure(p.is_restriction_of(mset), || {
                format!("constructed set does not restrict to {}", p.to_json())
            })?;
            yes += 1;
        }
    }
    Ok(format!(
        "{} presentations with |T| <= {size}, {yes} factor, no disagreements",
        corpus.len()
    ))
}

fn round_trip(opts: &Options) -> Outcome {
    let corpus = mset_corpus(opts.quick);
    for (name, s) in &corpus {
        let k = LambdaAlgebra::from_mset(s);
        ensure(k.dim() == s.size(), || {
            format!("{name}: dimension {} != {}", k.dim(), s.size())
        })?;
        k.check_invariants().map_err(|e| format!("{name}: {e}"))?;
        let back = k.points().map_err(|e| format!("{name}: {e}"))?;
        ensure(back.is_isomorphic(s), || {
            format!("{name}: recovered set is not isomorphic")
        })?;
    }
    Ok(format!("{} sets", corpus.len()))
}

fn order_invariants(opts: &Options) -> Outcome {
    let mut orders: Vec<(String, LambdaOrder)> = mset_corpus(opts.quick)
        .into_iter()
        .map(|(n, s)| (n, maximal_order(&s)))
        .collect();
    let top = if opts.quick { 10 } else { 20 };
    for r in 9..=top {
        orders.push((format!("regular({r})"), maximal_order(&MSet::regular(lv(r)))));
    }
    for p in [2, 3] {
        let g = group_ring_lattice(p).map_err(|e| e.to_string())?;
        orders.push((format!("characters of (Z/{p})^2"), maximal_order_in(g.algebra)));
    }
    for (name, m) in &orders {
        let report = verify_order(m, opts.prime_bound);
        ensure(report.passes(), || format!("{name}: {}", report.to_json()))?;
    }
    Ok(format!(
        "{} maximal orders, primes up to {}",
        orders.len(),
        opts.prime_bound
    ))
}

fn certificates(opts: &Options) -> Outcome {
    let mut runs = 0;
    let mut cases: Vec<(String, LambdaOrder, Vec<u64>)> = Vec::new();
    for (name, s) in mset_corpus(opts.quick) {
        let m = maximal_order(&s);
        let qs: Vec<u64> = suspicious_primes(&m, 5);
        cases.push((name, m, qs));
    }
    let g = group_ring_lattice(2).map_err(|e| e.to_string())?;
    let m = maximal_order_in(g.algebra.clone());
    let qs = crate::orders::index_primes(&g.lattice, m.lattice(), 5);
    ensure(qs.contains(&2), || "group ring index is not divisible by 2".into())?;
    cases.push(("characters of (Z/2)^2".into(), m, qs));
    for (name, m, qs) in &cases {
        if m.lattice().rank() > crate::orders::CERTIFICATE_MAX_RANK {
            continue;
        }
        for &q in qs {
            let cert = maximality_certificate(m, q, opts.prime_bound).map_err(|e| format!("{name}: {e}"))?;
            ensure(cert.maximal, || {
                format!("{name}: overorder at q = {q}: {}", cert.to_json())
            })?;
            runs += 1;
        }
    }
    let z2 = power_basis_order(2).map_err(|e| e.to_string())?;
    let k = z2.algebra().clone();
    let one = group_algebra_element(&k, &GroupAlgebraElt::one(2)).map_err(|e| e.to_string())?;
    let two_z = group_algebra_element(&k, &GroupAlgebraElt::z_pow(2, 1).scale(&rat(2))).map_err(|e| e.to_string())?;
    let sub = LambdaOrder::spanned_by(k, &[one, two_z]).map_err(|e| e.to_string())?;
    let cert = maximality_certificate(&sub, 2, opts.prime_bound).map_err(|e| e.to_string())?;
    ensure(!cert.maximal && cert.witness.as_ref() == Some(z2.lattice()), || {
        format!("span{{1, 2z}}: expected witness Z[μ_2], got {}", cert.to_json())
    })?;
    Ok(format!("{runs} certificates, span{{1, 2z}} refuted by Z[μ_2]"))
}

fn intersections(_opts: &Options) -> Outcome {
    let four_to_two =
        MSetMap::new(&MSet::regular(lv(4)), &MSet::regular(lv(2)), vec![0, 1, 0, 1]).map_err(|e| e.to_string())?;
    let cases = [
        ("identity on regular(2)", MSetMap::identity(&MSet::regular(lv(2)))),
        ("regular(4) -> regular(2)", four_to_two),
        ("free cover of (Z/2)^2", MSetMap::free_cover(&MSet::vector_space(2, 2))),
        (
            "free cover of regular(6)/±1",
            MSetMap::free_cover(&plus_minus_quotient(6)),
        ),
    ];
    for (name, map) in &cases {
        let report = crate::orders::intersection_check(map).map_err(|e| format!("{name}: {e}"))?;
        ensure(report.holds, || {
            format!(
                "{name}: direct {} vs intersection {}",
                report.direct.to_json(),
                report.intersection.to_json()
            )
        })?;
    }
    Ok(format!("{} surjections", cases.len()))
}

fn cyclotomic_table(n: u64, opts: &Options) -> QPoly {
    let p = (*phi(n)).clone();
    if opts.fault == Some(Fault::CorruptCyclotomicTable) && n == 7 {
        return &p + &QPoly::constant(rat(1));
    }
    p
}

fn crt_substrate(opts: &Options) -> Outcome {
    let (top, trials) = if opts.quick { (12, 20) } else { (30, 100) };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for r in 1..=top {
        let degrees: u64 = divisors(r).iter().map(|d| totient(r / d)).sum();
        ensure(degrees == r, || format!("r = {r}: component degrees sum to {degrees}"))?;
        let product = divisors(r)
            .iter()
            .fold(QPoly::one(), |acc, d| &acc * &cyclotomic_table(*d, opts));
        ensure(product == QPoly::x_pow_minus_one(r as usize), || {
            format!("r = {r}: cyclotomic table does not multiply to x^r - 1")
        })?;
        for _ in 0..trials {
            let coeffs = (0..r)
                .map(|_| {
                    Rat::new(
                        Int::from(rng.gen_range(-50i64..=50)),
                        Int::from(rng.gen_range(1i64..=12)),
                    )
                })
                .collect();
            let e = GroupAlgebraElt::new(r, coeffs).map_err(|e| e.to_string())?;
            let back = crt_join(r, &crt_split(&e)).map_err(|e| e.to_string())?;
            ensure(back == e, || format!("r = {r}: join(split(e)) != e"))?;
        }
    }
    Ok(format!("r = 1..{top}, {trials} random elements each"))
}

fn zero_image(opts: &Options) -> Outcome {
    let corpus = mset_corpus(opts.quick);
    let mut checked = 0;
    for (name, s) in corpus.iter().filter(|(_, s)| !s.is_empty()) {
        let zs = s.zero_image();
        ensure(!zs.is_empty(), || format!("{name}: empty zero image"))?;
        for &t in &zs {
            ensure((0..s.level().get()).all(|a| s.act(a, t) == t), || {
                format!("{name}: point {t} of the zero image is moved")
            })?;
        }
        let k = LambdaAlgebra::from_mset(s);
        let check = k.is_field_check();
        ensure(check.is_field == (k.dim() == 1), || {
            format!("{name}: field check disagrees with dimension")
        })?;
        let e = match check.idempotent {
            Some((t, e)) => {
                ensure(zs.contains(&t), || {
                    format!("{name}: idempotent point {t} not in the zero image")
                })?;
                e
            }
            None if k.dim() == 1 => k.unit().to_vec(),
            None => return Err(format!("{name}: no idempotent certificate")),
        };
        ensure(k.mul(&e, &e) == e && !e.iter().all(Zero::is_zero), || {
            format!("{name}: not a nonzero idempotent")
        })?;
        // e·K is one-dimensional: a copy of Q
        let n = k.dim();
        let ek: Vec<Vec<Rat>> = (0..n).map(|i| k.mul(&e, &k.basis_vector(i))).collect();
        ensure(Matrix::from_rows(ek, n).rank() == 1, || {
            format!("{name}: factor at the zero image is not Q")
        })?;
        checked += 1;
    }
    Ok(format!("{checked} nonempty sets"))
}
