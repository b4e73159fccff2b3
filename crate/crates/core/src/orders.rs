//! Λ-orders as lattices inside the algebra of a `(Z/r)°`-set.
//!
//! Coordinates are always those of [`LambdaAlgebra`]. The maximal Λ-order of
//! `S` is the set of `f` such that, for every point `s`, the tuple
//! `(f(d·s))_{d | r}` glues under the Chinese remainder theorem to an element
//! of `Z[μ_r]`.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::algebra::{frobenius_defect, LambdaAlgebra};
use crate::arith::{divisors, inverse_mod, prime_divisors, primes_up_to};
use crate::cyclotomic::{crt_join, CycloElt, GroupAlgebraElt, SubfieldEmbedding};
use crate::error::{Error, Result};
use crate::json::rat_to_string;
use crate::lattice::{preimage_lattice, IntLattice};
use crate::matrix::Matrix;
use crate::monoid::{MSet, MSetMap};
use crate::scalar::{rat, Int, Rat};

pub const DEFAULT_PRIME_BOUND: u64 = 13;

pub const PRIME_BOUND_ENV: &str = "LAMBDA_ORDERS_PRIME_BOUND";

/// Congruence-test bound from `LAMBDA_ORDERS_PRIME_BOUND`, or the default.
pub fn prime_bound_from_env() -> Result<u64> {
    match std::env::var(PRIME_BOUND_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Decode(format!("{PRIME_BOUND_ENV}={v:?} is not a non-negative integer"))),
        Err(_) => Ok(DEFAULT_PRIME_BOUND),
    }
}

/// Largest rank accepted by [`maximality_certificate`].
pub const CERTIFICATE_MAX_RANK: usize = 8;

#[derive(Clone, Debug)]
pub struct LambdaOrder {
    algebra: Arc<LambdaAlgebra>,
    lattice: IntLattice,
}

impl LambdaOrder {
    pub fn new(algebra: Arc<LambdaAlgebra>, lattice: IntLattice) -> Result<Self> {
        if lattice.dim() != algebra.dim() {
            return Err(Error::DimensionMismatch {
                expected: algebra.dim(),
                got: lattice.dim(),
            });
        }
        Ok(LambdaOrder { algebra, lattice })
    }

    /// The lattice spanned by the given elements.
    pub fn spanned_by(algebra: Arc<LambdaAlgebra>, elements: &[Vec<Rat>]) -> Result<Self> {
        let lattice = IntLattice::from_rational_rows(elements, algebra.dim());
        LambdaOrder::new(algebra, lattice)
    }

    pub fn algebra(&self) -> &Arc<LambdaAlgebra> {
        &self.algebra
    }

    pub fn lattice(&self) -> &IntLattice {
        &self.lattice
    }

    pub fn to_json(&self) -> Value {
        json!({
            "algebra_dimension": self.algebra.dim(),
            "level": self.algebra.level(),
            "lattice": self.lattice.to_json(),
        })
    }
}

/// Coordinates of an element of `Q[μ_r]` inside the algebra of the regular
/// set, through `e ↦ (s ↦ e(ζ_r^s))`.
pub fn group_algebra_element(k: &LambdaAlgebra, e: &GroupAlgebraElt) -> Result<Vec<Rat>> {
    let r = e.level();
    if k.mset() != &MSet::regular(k.mset().level()) || k.level() != r {
        return Err(Error::LevelMismatch(k.level(), r));
    }
    let values: Vec<CycloElt> = (0..r)
        .map(|s| {
            e.coeffs().iter().enumerate().fold(CycloElt::zero(r), |acc, (i, c)| {
                &acc + &CycloElt::zeta_pow(r, i as u64 * s).scale(c)
            })
        })
        .collect();
    k.coords_of_function(&values)
}

/// `Z[μ_r]` with its power basis `1, z, …, z^{r-1}`, inside the algebra of
/// the regular set.
pub fn power_basis_order(r: u64) -> Result<LambdaOrder> {
    let k = Arc::new(LambdaAlgebra::from_mset(&MSet::regular(crate::monoid::Level::new(r)?)));
    let rows = (0..r)
        .map(|i| group_algebra_element(&k, &GroupAlgebraElt::z_pow(r, i)))
        .collect::<Result<Vec<_>>>()?;
    LambdaOrder::spanned_by(k, &rows)
}

/// The linear map `f ↦ crt_join((f(d·s))_{d|r})` for one point `s`, as a
/// matrix with one row per power-basis coefficient and one column per basis
/// function.
fn gluing_rows(k: &LambdaAlgebra, s: usize) -> Vec<Vec<Rat>> {
    let r = k.level();
    let n = k.dim();
    let mset = k.mset();
    let mut rows = vec![vec![Rat::zero(); n]; r as usize];
    for i in 0..n {
        let parts: Vec<CycloElt> = divisors(r)
            .into_iter()
            .map(|d| {
                let value = k.basis_value(i, mset.act(d, s));
                SubfieldEmbedding::get(r / d, r)
                    .descend(value)
                    .expect("f(d·s) lies in Q(ζ_{r/d})")
            })
            .collect();
        let glued = crt_join(r, &parts).expect("one part per divisor");
        for (j, c) in glued.coeffs().iter().enumerate() {
            rows[j][i] = c.clone();
        }
    }
    rows
}

pub fn maximal_order_in(k: Arc<LambdaAlgebra>) -> LambdaOrder {
    let n = k.dim();
    let rows: Vec<Vec<Rat>> = (0..k.mset().size()).flat_map(|s| gluing_rows(&k, s)).collect();
    let lattice = preimage_lattice(&Matrix::from_rows(rows, n)).expect("the gluing map is injective on the algebra");
    LambdaOrder { algebra: k, lattice }
}

pub fn maximal_order(s: &MSet) -> LambdaOrder {
    maximal_order_in(Arc::new(LambdaAlgebra::from_mset(s)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Unit,
    Closure,
    PsiStable,
    Congruence,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Unit => "unit",
            Check::Closure => "closure",
            Check::PsiStable => "psi_stable",
            Check::Congruence => "congruence",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckFailure {
    pub check: Check,
    pub element: Vec<Rat>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderReport {
    pub unit: bool,
    pub closure: bool,
    pub psi_stable: bool,
    pub congruence: bool,
    pub prime_bound: u64,
    /// The first failing element of each failed check.
    pub failures: Vec<CheckFailure>,
}

impl OrderReport {
    pub fn passes(&self) -> bool {
        self.unit && self.closure && self.psi_stable && self.congruence
    }

    pub fn to_json(&self) -> Value {
        let failures: Vec<Value> = self
            .failures
            .iter()
            .map(|f| {
                json!({
                    "check": f.check.name(),
                    "element": f.element.iter().map(rat_to_string).collect::<Vec<_>>(),
                    "detail": f.detail,
                })
            })
            .collect();
        json!({
            "unit": self.unit,
            "closure": self.closure,
            "psi_stable": self.psi_stable,
            "congruence": self.congruence,
            "prime_bound": self.prime_bound,
            "passes": self.passes(),
            "failures": failures,
        })
    }
}

fn divided(v: &[Rat], p: u64) -> Vec<Rat> {
    let p = rat(p as i64);
    v.iter().map(|x| x / &p).collect()
}

pub fn verify_order(order: &LambdaOrder, prime_bound: u64) -> OrderReport {
    let k = &order.algebra;
    let l = &order.lattice;
    let basis = l.basis();
    let mut failures = Vec::new();

    let unit = k.dim() == 0 || l.contains(k.unit());
    if !unit {
        failures.push(CheckFailure {
            check: Check::Unit,
            element: k.unit().to_vec(),
            detail: "1 is not in the lattice".into(),
        });
    }

    let closure = (|| {
        for (i, x) in basis.iter().enumerate() {
            for (j, y) in basis.iter().enumerate().skip(i) {
                let xy = k.mul(x, y);
                if !l.contains(&xy) {
                    return Some(CheckFailure {
                        check: Check::Closure,
                        element: xy,
                        detail: format!("product of basis elements {i} and {j}"),
                    });
                }
            }
        }
        None
    })();

    let psi_stable = (|| {
        for a in 0..k.level() {
            for (i, x) in basis.iter().enumerate() {
                let y = k.psi(a, x);
                if !l.contains(&y) {
                    return Some(CheckFailure {
                        check: Check::PsiStable,
                        element: y,
                        detail: format!("ψ_{a} of basis element {i}"),
                    });
                }
            }
        }
        None
    })();

    let congruence = (|| {
        for p in primes_up_to(prime_bound) {
            for (i, x) in basis.iter().enumerate() {
                let d = frobenius_defect(k, p, x);
                if !l.contains(&divided(&d, p)) {
                    return Some(CheckFailure {
                        check: Check::Congruence,
                        element: d,
                        detail: format!("ψ_{p}(x) - x^{p} for basis element {i}"),
                    });
                }
            }
        }
        None
    })();

    let mut flag = |f: Option<CheckFailure>| match f {
        Some(f) => {
            failures.push(f);
            false
        }
        None => true,
    };
    let closure = flag(closure);
    let psi_stable = flag(psi_stable);
    let congruence = flag(congruence);
    OrderReport {
        unit,
        closure,
        psi_stable,
        congruence,
        prime_bound,
        failures,
    }
}

/// `Z[V]` for `V = (Z/p)²` inside the algebra of its character set.
#[derive(Clone, Debug)]
pub struct GroupRingExample {
    pub algebra: Arc<LambdaAlgebra>,
    /// span of the functions `χ ↦ χ(v)`, one per group element `v`
    pub lattice: IntLattice,
    /// `p` at the trivial character and 0 elsewhere, i.e. `Σ_v v`
    pub x: Vec<Rat>,
}

pub fn group_ring_lattice(p: u64) -> Result<GroupRingExample> {
    if !crate::arith::is_prime(p) {
        return Err(Error::InvalidPresentation(format!("{p} is not prime")));
    }
    let chars = MSet::vector_space(p, 2);
    let k = Arc::new(LambdaAlgebra::from_mset(&chars));
    let n = chars.size() as u64;
    let pairing = |chi: u64, v: u64| ((chi % p) * (v % p) + (chi / p) * (v / p)) % p;
    let rows = (0..n)
        .map(|v| {
            let f: Vec<CycloElt> = (0..n).map(|chi| CycloElt::zeta_pow(p, pairing(chi, v))).collect();
            k.coords_of_function(&f)
        })
        .collect::<Result<Vec<_>>>()?;
    let lattice = IntLattice::from_rational_rows(&rows, k.dim());
    let x_values: Vec<CycloElt> = (0..n)
        .map(|chi| {
            if chi == 0 {
                CycloElt::from_rat(p, rat(p as i64))
            } else {
                CycloElt::zero(p)
            }
        })
        .collect();
    let x = k.coords_of_function(&x_values)?;
    Ok(GroupRingExample { algebra: k, lattice, x })
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub maximal: bool,
    pub q: u64,
    /// A proper Λ-stable overorder inside `(1/q)M`.
    pub witness: Option<IntLattice>,
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        json!({
            "maximal": self.maximal,
            "q": self.q,
            "witness": self.witness.as_ref().map(|w| w.to_json()),
        })
    }
}

/// Row-reduce vectors over `F_q`, returning the nonzero rows of the RREF.
fn rref_mod(mut rows: Vec<Vec<u64>>, q: u64) -> Vec<Vec<u64>> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = inverse_mod(rows[r][c], q).expect("q is prime");
        for x in rows[r].iter_mut() {
            *x = *x * inv % q;
        }
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

fn to_residue(x: &Int, q: u64) -> u64 {
    x.mod_floor(&Int::from(q)).to_u64().expect("small residue")
}

/// Multiplication and ψ-operators of `M` written in its own basis.
struct OrderTables {
    q: u64,
    n: usize,
    /// `mul[i][j]` = coordinates of `b_i b_j`
    mul: Vec<Vec<Vec<Int>>>,
    psi: Vec<Vec<Vec<Int>>>,
    primes: Vec<u64>,
}

impl OrderTables {
    fn new(order: &LambdaOrder, q: u64, prime_bound: u64) -> Result<Self> {
        let k = &order.algebra;
        let l = &order.lattice;
        let basis = l.basis();
        let n = basis.len();
        let coords = |v: &[Rat]| -> Result<Vec<Int>> {
            l.coordinates(v)
                .ok_or_else(|| Error::InvalidPresentation("input is not a Λ-order".into()))
        };
        let mul = basis
            .iter()
            .map(|x| basis.iter().map(|y| coords(&k.mul(x, y))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let psi = (0..k.level())
            .map(|a| basis.iter().map(|x| coords(&k.psi(a, x))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(OrderTables {
            q,
            n,
            mul,
            psi,
            primes: primes_up_to(prime_bound),
        })
    }

    fn times(&self, v: &[Int], w: &[Int]) -> Vec<Int> {
        let mut out = vec![Int::zero(); self.n];
        for i in 0..self.n {
            if v[i].is_zero() {
                continue;
            }
            for j in 0..self.n {
                if w[j].is_zero() {
                    continue;
                }
                let c = &v[i] * &w[j];
                for (o, m) in out.iter_mut().zip(&self.mul[i][j]) {
                    if !m.is_zero() {
                        *o += &c * m;
                    }
                }
            }
        }
        out
    }

    fn apply_psi(&self, a: usize, v: &[Int]) -> Vec<Int> {
        let mut out = vec![Int::zero(); self.n];
        for (i, vi) in v.iter().enumerate() {
            if !vi.is_zero() {
                for (o, m) in out.iter_mut().zip(&self.psi[a][i]) {
                    *o += vi * m;
                }
            }
        }
        out
    }

    fn power(&self, v: &[Int], e: u64) -> Vec<Int> {
        let mut acc = v.to_vec();
        for _ in 1..e {
            acc = self.times(&acc, v);
        }
        acc
    }

    fn lift(&self, w: &[u64]) -> Vec<Int> {
        w.iter().map(|&x| Int::from(x)).collect()
    }

    fn reduce(&self, v: &[Int]) -> Vec<u64> {
        v.iter().map(|x| to_residue(x, self.q)).collect()
    }

    /// `v / d` reduced mod `q`, or `None` if `d` does not divide `v`.
    fn divide_reduce(&self, v: &[Int], d: &Int) -> Option<Vec<u64>> {
        v.iter()
            .map(|x| {
                let (quot, rem) = x.div_mod_floor(d);
                rem.is_zero().then(|| to_residue(&quot, self.q))
            })
            .collect()
    }

    /// Smallest subspace of `M/qM` containing `gens` that is an ideal and
    /// ψ-stable, in RREF.
    fn ideal_closure(&self, gens: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
        let mut span = rref_mod(gens, self.q);
        loop {
            let mut gens = span.clone();
            for w in &span {
                let lw = self.lift(w);
                for i in 0..self.n {
                    gens.push(self.reduce(&self.times(&lw, &self.unit_lift(i))));
                }
                for a in 0..self.psi.len() {
                    gens.push(self.reduce(&self.apply_psi(a, &lw)));
                }
            }
            let next = rref_mod(gens, self.q);
            if next.len() == span.len() {
                return span;
            }
            span = next;
        }
    }

    fn unit_lift(&self, i: usize) -> Vec<Int> {
        let mut v = vec![Int::zero(); self.n];
        v[i] = Int::one();
        v
    }

    /// The smallest `W` containing `start` such that `M + (1/q)·W` is
    /// closed under products, every ψ and every `δ_p(y) = (ψ_p(y) - y^p)/p`
    /// for primes up to the bound; `None` once an element escapes `(1/q)M`.
    fn lambda_closure(&self, start: Vec<Vec<u64>>) -> Option<Vec<Vec<u64>>> {
        let q = Int::from(self.q);
        let mut w = start;
        loop {
            let mut extra = Vec::new();
            for (i, a) in w.iter().enumerate() {
                let la = self.lift(a);
                for b in &w[i..] {
                    // (a/q)(b/q) must lie in (1/q)M
                    extra.push(self.divide_reduce(&self.times(&la, &self.lift(b)), &q)?);
                }
                for &p in &self.primes {
                    // δ_p(a/q) = (q^{p-1} ψ_p(a) - a^p) / (p q^p)
                    let psi_index = (p % self.psi.len() as u64) as usize;
                    let qp1 = num_traits::pow(q.clone(), (p - 1) as usize);
                    let numer: Vec<Int> = self
                        .apply_psi(psi_index, &la)
                        .iter()
                        .zip(self.power(&la, p))
                        .map(|(x, y)| x * &qp1 - y)
                        .collect();
                    extra.push(self.divide_reduce(&numer, &(Int::from(p) * &qp1))?);
                }
            }
            let mut gens = w.clone();
            gens.extend(extra);
            let next = self.ideal_closure(gens);
            if next.len() == w.len() {
                return Some(w);
            }
            w = next;
        }
    }
}

fn all_vectors(n: usize, q: u64) -> impl Iterator<Item = Vec<u64>> {
    let total = q.pow(n as u32);
    (1..total).map(move |mut k| {
        let mut v = vec![0; n];
        for x in v.iter_mut() {
            *x = k % q;
            k /= q;
        }
        v
    })
}

/// Exhaustive search for a Λ-order `L` with `M ⊊ L ⊆ (1/q)M`.
///
/// Such an `L` is `M + (1/q)·W` for a subspace `W` of `M/qM`. Every `L`
/// contains the Λ-order generated by `M` and any one of its elements, so it
/// suffices to close each line of `M/qM` under products, ψ-operators and the
/// congruence quotients, discarding those that leave `(1/q)M`. The witness
/// is the surviving `W` that is first in order of (dimension, RREF); it is
/// confirmed with [`verify_order`].
pub fn maximality_certificate(order: &LambdaOrder, q: u64, prime_bound: u64) -> Result<Certificate> {
    let n = order.lattice.rank();
    if n > CERTIFICATE_MAX_RANK {
        return Err(Error::RankTooLarge {
            rank: n,
            max: CERTIFICATE_MAX_RANK,
        });
    }
    if !crate::arith::is_prime(q) {
        return Err(Error::InvalidPresentation(format!("{q} is not prime")));
    }
    let t = OrderTables::new(order, q, prime_bound)?;
    let qi = Int::from(q);
    let mut tried: BTreeSet<Vec<Vec<u64>>> = BTreeSet::new();
    let mut found: BTreeSet<(usize, Vec<Vec<u64>>)> = BTreeSet::new();
    for v in all_vectors(n, q) {
        // one representative per line: first nonzero entry 1
        if v.iter().find(|&&x| x != 0) != Some(&1) {
            continue;
        }
        let lv = t.lift(&v);
        if t.divide_reduce(&t.times(&lv, &lv), &qi).is_none() {
            continue;
        }
        let start = t.ideal_closure(vec![v]);
        if !tried.insert(start.clone()) {
            continue;
        }
        if let Some(w) = t.lambda_closure(start) {
            found.insert((w.len(), w));
        }
    }

    let basis = order.lattice.basis();
    let dim = order.lattice.dim();
    let inv_q = Rat::new(Int::one(), qi);
    for (_, w) in found {
        let lifted: Vec<Vec<Rat>> = w
            .iter()
            .map(|coeffs| {
                let mut v = vec![Rat::zero(); dim];
                for (c, b) in coeffs.iter().zip(&basis) {
                    if *c != 0 {
                        let s = rat(*c as i64) * &inv_q;
                        for (x, y) in v.iter_mut().zip(b) {
                            *x += &s * y;
                        }
                    }
                }
                v
            })
            .collect();
        let lattice = order.lattice.sum(&IntLattice::from_rational_rows(&lifted, dim));
        let candidate = LambdaOrder {
            algebra: order.algebra.clone(),
            lattice,
        };
        if verify_order(&candidate, prime_bound).passes() {
            return Ok(Certificate {
                maximal: false,
                q,
                witness: Some(candidate.lattice),
            });
        }
    }
    Ok(Certificate {
        maximal: true,
        q,
        witness: None,
    })
}

/// Primes up to `bound` dividing the numerator or denominator of the
/// relative index of two full-rank lattices.
pub fn index_primes(a: &IntLattice, b: &IntLattice, bound: u64) -> Vec<u64> {
    let Some(idx) = crate::lattice::relative_index(a, b) else {
        return Vec::new();
    };
    let mut out: BTreeSet<u64> = BTreeSet::new();
    for part in [idx.numer().abs(), idx.denom().abs()] {
        for p in primes_up_to(bound) {
            if (&part % Int::from(p)).is_zero() {
                out.insert(p);
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Clone, Debug)]
pub struct IntersectionReport {
    pub holds: bool,
    /// maximal order of the target
    pub direct: IntLattice,
    /// target algebra intersected with the maximal order of the source
    pub intersection: IntLattice,
}

/// Coordinates of `f ∘ π` in the source algebra, for each basis function `f`
/// of the target algebra. The target's level must divide the source's.
fn pullback_matrix(target: &LambdaAlgebra, source: &LambdaAlgebra, values: &[usize]) -> Result<Matrix<Rat>> {
    let (rs, rt) = (target.level(), source.level());
    if rt % rs != 0 {
        return Err(Error::LevelMismatch(rs, rt));
    }
    let embed = SubfieldEmbedding::get(rs, rt);
    let rows = (0..target.dim())
        .map(|i| {
            let f: Vec<CycloElt> = values.iter().map(|&s| embed.embed(target.basis_value(i, s))).collect();
            source.coords_of_function(&f)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_rows(rows, source.dim()))
}

/// For a surjection `T ↠ S`, the algebra of `S` sits inside that of `T`;
/// checks that the maximal order of `S` is the intersection of its algebra
/// with the maximal order of `T`. The target is taken at its minimal level.
pub fn intersection_check(map: &MSetMap) -> Result<IntersectionReport> {
    if !map.is_surjective() {
        return Err(Error::InvalidPresentation("map is not surjective".into()));
    }
    let target = map.target().minimal_level();
    let ks = Arc::new(LambdaAlgebra::from_mset(&target));
    let kt = Arc::new(LambdaAlgebra::from_mset(map.source()));
    let direct = maximal_order_in(ks.clone()).lattice;
    let big = maximal_order_in(kt.clone()).lattice;
    let e = pullback_matrix(&ks, &kt, map.values())?;
    let b = Matrix::from_rows(big.basis(), kt.dim());
    let b_inv = b.inverse().ok_or(Error::NotDiscrete(kt.dim() - big.rank()))?;
    let intersection = preimage_lattice(&(&e * &b_inv).transpose())?;
    Ok(IntersectionReport {
        holds: intersection == direct,
        direct,
        intersection,
    })
}

/// Primes `q ≤ bound` at which a maximality certificate is worth running for
/// the maximal order of `S`: those dividing the index over the naive lattice
/// `Z^n` in algebra coordinates, and those dividing the level.
pub fn suspicious_primes(order: &LambdaOrder, bound: u64) -> Vec<u64> {
    let naive = IntLattice::standard(order.algebra.dim());
    let mut ps = index_primes(&naive, &order.lattice, bound);
    for p in prime_divisors(order.algebra.level()) {
        if p <= bound && !ps.contains(&p) {
            ps.push(p);
        }
    }
    ps.sort_unstable();
    ps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::index;
    use crate::monoid::Level;

    fn lv(r: u64) -> Level {
        Level::new(r).unwrap()
    }

    #[test]
    fn regular_two_is_congruent_pairs() {
        let m = maximal_order(&MSet::regular(lv(2)));
        // basis functions are the indicators of the points 0 and 1
        let k = m.algebra();
        assert_eq!(k.dim(), 2);
        let contains = |a: i64, b: i64| m.lattice().contains(&[rat(a), rat(b)]);
        assert!(contains(1, 1));
        assert!(contains(2, 0));
        assert!(contains(1, -1));
        assert!(!contains(1, 0));
        assert!(!contains(0, 1));
        assert_eq!(m.lattice(), power_basis_order(2).unwrap().lattice());
    }

    #[test]
    fn regular_sets_give_power_basis() {
        for r in 1..=8 {
            let m = maximal_order(&MSet::regular(lv(r)));
            let z = power_basis_order(r).unwrap();
            assert_eq!(m.lattice(), z.lattice(), "r = {r}");
            assert!(verify_order(&z, DEFAULT_PRIME_BOUND).passes());
        }
    }

    #[test]
    fn empty_set_gives_rank_zero() {
        let m = maximal_order(&MSet::empty(lv(3)));
        assert_eq!(m.lattice().rank(), 0);
        assert!(verify_order(&m, DEFAULT_PRIME_BOUND).passes());
    }

    #[test]
    fn verify_examples() {
        let z2 = power_basis_order(2).unwrap();
        let k = z2.algebra().clone();
        let one = group_algebra_element(&k, &GroupAlgebraElt::one(2)).unwrap();
        let z = group_algebra_element(&k, &GroupAlgebraElt::z_pow(2, 1)).unwrap();
        let scaled = |c: Rat| z.iter().map(|x| x * &c).collect::<Vec<_>>();
        let two_z = LambdaOrder::spanned_by(k.clone(), &[one.clone(), scaled(rat(2))]).unwrap();
        assert!(verify_order(&two_z, DEFAULT_PRIME_BOUND).passes());
        let third = LambdaOrder::spanned_by(k, &[one, scaled(crate::scalar::ratio(1, 3))]).unwrap();
        let report = verify_order(&third, DEFAULT_PRIME_BOUND);
        assert!(!report.closure);
        assert_eq!(report.failures[0].check, Check::Closure);
    }

    #[test]
    fn group_ring_two() {
        let g = group_ring_lattice(2).unwrap();
        let k = &g.algebra;
        assert_eq!(k.mul(&g.x, &g.x), g.x.iter().map(|v| v * rat(2)).collect::<Vec<_>>());
        assert_eq!(k.psi(2, &g.x), k.unit().iter().map(|v| v * rat(2)).collect::<Vec<_>>());
        assert!(!g.lattice.contains(&g.x));
        assert_eq!(index(&g.lattice, &IntLattice::standard(4)).unwrap(), Int::from(16));
        let m = maximal_order_in(k.clone());
        assert!(m.lattice().contains(&g.x));
        assert!(m.lattice().contains_lattice(&g.lattice));
    }

    #[test]
    fn certificates() {
        let m = maximal_order(&MSet::regular(lv(4)));
        assert!(maximality_certificate(&m, 2, DEFAULT_PRIME_BOUND).unwrap().maximal);
        let q = maximal_order(&MSet::singleton(lv(1)));
        for p in [2, 3, 5] {
            assert!(maximality_certificate(&q, p, DEFAULT_PRIME_BOUND).unwrap().maximal);
        }
        let z2 = power_basis_order(2).unwrap();
        let k = z2.algebra().clone();
        let one = group_algebra_element(&k, &GroupAlgebraElt::one(2)).unwrap();
        let two_z = group_algebra_element(&k, &GroupAlgebraElt::z_pow(2, 1).scale(&rat(2))).unwrap();
        let sub = LambdaOrder::spanned_by(k, &[one, two_z]).unwrap();
        let cert = maximality_certificate(&sub, 2, DEFAULT_PRIME_BOUND).unwrap();
        assert!(!cert.maximal);
        assert_eq!(cert.witness.as_ref(), Some(z2.lattice()));
    }

    #[test]
    fn intersections() {
        let t = MSet::regular(lv(4));
        let s = MSet::regular(lv(2));
        let map = MSetMap::new(&t, &s, (0..4).map(|a| a % 2).collect()).unwrap();
        assert!(intersection_check(&map).unwrap().holds);
        assert!(intersection_check(&MSetMap::identity(&s)).unwrap().holds);
        let v = MSet::vector_space(2, 2);
        assert!(intersection_check(&MSetMap::free_cover(&v)).unwrap().holds);
    }

    #[test]
    fn rref_mod_basics() {
        let r = rref_mod(vec![vec![2, 4], vec![1, 2]], 5);
        assert_eq!(r, vec![vec![1, 2]]);
        assert_eq!(rref_mod(vec![vec![0, 3], vec![1, 1]], 5), vec![vec![1, 0], vec![0, 1]]);
    }
}
