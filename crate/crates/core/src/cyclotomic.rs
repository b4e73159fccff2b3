//! Exact arithmetic in `Q[z]/(z^r - 1)` and in cyclotomic fields.
//!
//! `Q[z]/(z^r - 1)` splits as the product over `d | r` of `Q[x]/Φ_{r/d}`,
//! with `z` going to the class of `x` in each factor; in the component
//! indexed by `d` that class is a primitive `(r/d)`-th root of unity, the
//! image of `ζ_r^d`. Components are always listed by increasing `d`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, totient, units};
use crate::error::{Error, Result};
use crate::matrix::{Matrix, RowCoordinates};
use crate::poly::Poly;
use crate::scalar::{is_integral, Int, Rat, Scalar};

pub type QPoly = Poly<Rat>;
pub type ZPoly = Poly<Int>;

/// `Φ_n` over any ring scalar, by exact division of `x^n - 1` by the
/// `Φ_d` of the proper divisors.
pub fn cyclotomic_poly_over<T: Scalar>(n: u64) -> Poly<T> {
    assert!(n >= 1, "cyclotomic_poly: n must be positive");
    let mut acc = Poly::<T>::x_pow_minus_one(n as usize);
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let (q, r) = acc.div_rem_monic(&cyclotomic_poly_over::<T>(d));
        debug_assert!(r.is_zero());
        acc = q;
    }
    acc
}

/// The integer polynomial `Φ_n`.
pub fn cyclotomic_poly(n: u64) -> ZPoly {
    cyclotomic_poly_over::<Int>(n)
}

fn phi_cache() -> &'static Mutex<HashMap<u64, Arc<QPoly>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<QPoly>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// `Φ_n` over the rationals, memoized.
pub fn phi(n: u64) -> Arc<QPoly> {
    if let Some(p) = phi_cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    let p = Arc::new(cyclotomic_poly(n).map(|c| Rat::from_integer(c.clone())));
    phi_cache().lock().unwrap().entry(n).or_insert(p).clone()
}

/// Element of `Q(ζ_m) = Q[x]/Φ_m` in the power basis `ζ^i`, `i < φ(m)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycloElt {
    modulus: u64,
    coeffs: Vec<Rat>,
}

impl CycloElt {
    pub fn new(modulus: u64, coeffs: Vec<Rat>) -> Result<Self> {
        let expected = totient(modulus) as usize;
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: coeffs.len(),
            });
        }
        Ok(CycloElt { modulus, coeffs })
    }

    /// Reduce an arbitrary polynomial in `ζ` modulo `Φ_m`.
    pub fn from_poly(modulus: u64, p: &QPoly) -> Self {
        let red = p.rem_monic(&phi(modulus));
        let n = totient(modulus) as usize;
        CycloElt {
            modulus,
            coeffs: (0..n).map(|i| red.coeff(i)).collect(),
        }
    }

    pub fn zero(modulus: u64) -> Self {
        CycloElt {
            modulus,
            coeffs: vec![Rat::zero(); totient(modulus) as usize],
        }
    }

    pub fn from_rat(modulus: u64, c: Rat) -> Self {
        let mut x = Self::zero(modulus);
        x.coeffs[0] = c;
        x
    }

    pub fn one(modulus: u64) -> Self {
        Self::from_rat(modulus, Rat::one())
    }

    /// `ζ_m^k`
    pub fn zeta_pow(modulus: u64, k: u64) -> Self {
        Self::from_poly(modulus, &Poly::monomial(Rat::one(), (k % modulus) as usize))
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn to_poly(&self) -> QPoly {
        Poly::new(self.coeffs.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        CycloElt {
            modulus: self.modulus,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// Image under the automorphism `ζ ↦ ζ^u`.
    pub fn galois_act(&self, u: u64) -> Result<Self> {
        let m = self.modulus;
        if u.gcd(&m) != 1 {
            return Err(Error::NotAUnit { u, m });
        }
        let mut spread = vec![Rat::zero(); m as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = ((i as u64 * u) % m) as usize;
            spread[j] = &spread[j] + c;
        }
        Ok(Self::from_poly(m, &Poly::new(spread)))
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(self.modulus, other.modulus, "cyclotomic moduli differ");
    }
}

impl Add for &CycloElt {
    type Output = CycloElt;
    fn add(self, rhs: Self) -> CycloElt {
        self.check_same(rhs);
        CycloElt {
            modulus: self.modulus,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CycloElt {
    type Output = CycloElt;
    fn sub(self, rhs: Self) -> CycloElt {
        self.check_same(rhs);
        CycloElt {
            modulus: self.modulus,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CycloElt {
    type Output = CycloElt;
    fn mul(self, rhs: Self) -> CycloElt {
        self.check_same(rhs);
        CycloElt::from_poly(self.modulus, &(&self.to_poly() * &rhs.to_poly()))
    }
}

impl Neg for CycloElt {
    type Output = CycloElt;
    fn neg(self) -> CycloElt {
        CycloElt {
            modulus: self.modulus,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for CycloElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})ζ{}", self.modulus),
                _ => format!("({c})ζ{}^{i}", self.modulus),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Element of `Q[μ_r] = Q[z]/(z^r - 1)`, coefficient `i` on `z^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "crate::json::GroupAlgebraJson", into = "crate::json::GroupAlgebraJson")]
pub struct GroupAlgebraElt {
    r: u64,
    coeffs: Vec<Rat>,
}

impl GroupAlgebraElt {
    pub fn new(r: u64, coeffs: Vec<Rat>) -> Result<Self> {
        if r == 0 || coeffs.len() as u64 != r {
            return Err(Error::DimensionMismatch {
                expected: r as usize,
                got: coeffs.len(),
            });
        }
        Ok(GroupAlgebraElt { r, coeffs })
    }

    pub fn zero(r: u64) -> Self {
        GroupAlgebraElt {
            r,
            coeffs: vec![Rat::zero(); r as usize],
        }
    }

    pub fn one(r: u64) -> Self {
        Self::z_pow(r, 0)
    }

    pub fn z_pow(r: u64, k: u64) -> Self {
        let mut e = Self::zero(r);
        e.coeffs[(k % r) as usize] = Rat::one();
        e
    }

    /// Reduce a polynomial in `z` modulo `z^r - 1`.
    pub fn from_poly(r: u64, p: &QPoly) -> Self {
        let mut e = Self::zero(r);
        for (i, c) in p.coeffs().iter().enumerate() {
            let j = i % r as usize;
            e.coeffs[j] = &e.coeffs[j] + c;
        }
        e
    }

    pub fn level(&self) -> u64 {
        self.r
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn to_poly(&self) -> QPoly {
        Poly::new(self.coeffs.clone())
    }

    /// All power-basis coefficients are integers, i.e. the element lies in `Z[μ_r]`.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(is_integral)
    }

    /// `z ↦ z^a`
    pub fn psi(&self, a: u64) -> Self {
        let mut e = Self::zero(self.r);
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = ((i as u64 * a) % self.r) as usize;
            e.coeffs[j] = &e.coeffs[j] + c;
        }
        e
    }

    pub fn scale(&self, c: &Rat) -> Self {
        GroupAlgebraElt {
            r: self.r,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }
}

impl Add for &GroupAlgebraElt {
    type Output = GroupAlgebraElt;
    fn add(self, rhs: Self) -> GroupAlgebraElt {
        assert_eq!(self.r, rhs.r);
        GroupAlgebraElt {
            r: self.r,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Mul for &GroupAlgebraElt {
    type Output = GroupAlgebraElt;
    fn mul(self, rhs: Self) -> GroupAlgebraElt {
        assert_eq!(self.r, rhs.r);
        let r = self.r as usize;
        let mut out = vec![Rat::zero(); r];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[(i + j) % r] += a * b;
            }
        }
        GroupAlgebraElt { r: self.r, coeffs: out }
    }
}

/// Orthogonal idempotents of `Q[z]/(z^r - 1)`, one per divisor `d | r`.
#[derive(Debug)]
pub struct CrtSystem {
    r: u64,
    divisors: Vec<u64>,
    idempotents: Vec<QPoly>,
}

impl CrtSystem {
    fn compute(r: u64) -> Self {
        let full: QPoly = Poly::x_pow_minus_one(r as usize);
        let divs = divisors(r);
        let idempotents = divs
            .iter()
            .map(|&d| {
                let factor = phi(r / d);
                let (cofactor, rem) = full.div_rem_monic(&factor);
                debug_assert!(rem.is_zero());
                let inv = cofactor
                    .inverse_mod(&factor)
                    .expect("cyclotomic factors are pairwise coprime");
                (&inv * &cofactor).rem_monic(&full)
            })
            .collect();
        CrtSystem {
            r,
            divisors: divs,
            idempotents,
        }
    }

    /// Shared instance for level `r`.
    pub fn get(r: u64) -> Arc<CrtSystem> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CrtSystem>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(s) = cache.lock().unwrap().get(&r) {
            return s.clone();
        }
        let sys = Arc::new(CrtSystem::compute(r));
        cache.lock().unwrap().entry(r).or_insert(sys).clone()
    }

    pub fn level(&self) -> u64 {
        self.r
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn idempotent(&self, i: usize) -> GroupAlgebraElt {
        GroupAlgebraElt::from_poly(self.r, &self.idempotents[i])
    }

    pub fn split(&self, e: &GroupAlgebraElt) -> Vec<CycloElt> {
        assert_eq!(e.level(), self.r);
        let p = e.to_poly();
        self.divisors
            .iter()
            .map(|&d| CycloElt::from_poly(self.r / d, &p))
            .collect()
    }

    pub fn join(&self, parts: &[CycloElt]) -> Result<GroupAlgebraElt> {
        if parts.len() != self.divisors.len() {
            return Err(Error::DimensionMismatch {
                expected: self.divisors.len(),
                got: parts.len(),
            });
        }
        let full: QPoly = Poly::x_pow_minus_one(self.r as usize);
        let mut acc = QPoly::zero();
        for ((&d, part), idem) in self.divisors.iter().zip(parts).zip(&self.idempotents) {
            if part.modulus() != self.r / d {
                return Err(Error::DimensionMismatch {
                    expected: (self.r / d) as usize,
                    got: part.modulus() as usize,
                });
            }
            acc = &acc + &(&part.to_poly() * idem);
        }
        Ok(GroupAlgebraElt::from_poly(self.r, &acc.rem_monic(&full)))
    }
}

/// Components of `e` in `∏_{d | r} Q(ζ_{r/d})`, by increasing `d`.
pub fn crt_split(e: &GroupAlgebraElt) -> Vec<CycloElt> {
    CrtSystem::get(e.level()).split(e)
}

pub fn crt_join(r: u64, parts: &[CycloElt]) -> Result<GroupAlgebraElt> {
    CrtSystem::get(r).join(parts)
}

pub fn galois_act(u: u64, x: &CycloElt) -> Result<CycloElt> {
    x.galois_act(u)
}

/// Check that `h` is a subgroup of `(Z/m)*` and return it sorted and reduced.
pub fn validate_subgroup(m: u64, h: &[u64]) -> Result<Vec<u64>> {
    let mut hs: Vec<u64> = h.iter().map(|&u| u % m).collect();
    hs.sort_unstable();
    hs.dedup();
    if hs.is_empty() {
        return Err(Error::SubgroupInvalid("empty".into()));
    }
    if let Some(&u) = hs.iter().find(|&&u| u.gcd(&m) != 1) {
        return Err(Error::SubgroupInvalid(format!("{u} is not a unit mod {m}")));
    }
    for &a in &hs {
        for &b in &hs {
            if hs.binary_search(&((a * b) % m)).is_err() {
                return Err(Error::SubgroupInvalid(format!("not closed: {a}·{b} mod {m}")));
            }
        }
    }
    Ok(hs)
}

/// A basis of the fixed field `Q(ζ_m)^H` made of `H`-orbit sums of powers
/// of `ζ_m`, chosen greedily by smallest exponent. Its length is `φ(m)/|H|`.
pub fn fixed_field_basis(m: u64, h: &[u64]) -> Result<Vec<CycloElt>> {
    let hs = validate_subgroup(m, h)?;
    let target = totient(m) as usize / hs.len();
    let mut seen = vec![false; m as usize];
    let mut basis: Vec<CycloElt> = Vec::new();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for i in 0..m {
        if basis.len() == target {
            break;
        }
        if seen[i as usize] {
            continue;
        }
        let mut sum = CycloElt::zero(m);
        let mut orbit: Vec<u64> = hs.iter().map(|&u| (u * i) % m).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &j in &orbit {
            seen[j as usize] = true;
            sum = &sum + &CycloElt::zeta_pow(m, j);
        }
        rows.push(sum.coeffs().to_vec());
        if Matrix::from_rows(rows.clone(), totient(m) as usize).rank() == rows.len() {
            basis.push(sum);
        } else {
            rows.pop();
        }
    }
    debug_assert_eq!(basis.len(), target);
    Ok(basis)
}

/// The inclusion `Q(ζ_k) ⊆ Q(ζ_m)` for `k | m`, `ζ_k ↦ ζ_m^{m/k}`, and its
/// inverse on the image.
#[derive(Debug)]
pub struct SubfieldEmbedding {
    small: u64,
    big: u64,
    coords: RowCoordinates<Rat>,
}

impl SubfieldEmbedding {
    pub fn get(small: u64, big: u64) -> Arc<SubfieldEmbedding> {
        static CACHE: OnceLock<Mutex<HashMap<(u64, u64), Arc<SubfieldEmbedding>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(e) = cache.lock().unwrap().get(&(small, big)) {
            return e.clone();
        }
        assert_eq!(big % small, 0, "Q(ζ_{small}) is not a subfield of Q(ζ_{big})");
        let step = big / small;
        let rows = (0..totient(small))
            .map(|i| CycloElt::zeta_pow(big, i * step).coeffs().to_vec())
            .collect();
        let basis = Matrix::from_rows(rows, totient(big) as usize);
        let coords = RowCoordinates::new(basis).expect("embedding is injective");
        let e = Arc::new(SubfieldEmbedding { small, big, coords });
        cache.lock().unwrap().entry((small, big)).or_insert(e).clone()
    }

    pub fn embed(&self, x: &CycloElt) -> CycloElt {
        assert_eq!(x.modulus(), self.small);
        CycloElt {
            modulus: self.big,
            coeffs: self.coords.basis().left_apply(x.coeffs()),
        }
    }

    /// `None` if `y` is not in the subfield.
    pub fn descend(&self, y: &CycloElt) -> Option<CycloElt> {
        assert_eq!(y.modulus(), self.big);
        let c = self.coords.coords(y.coeffs())?;
        Some(CycloElt {
            modulus: self.small,
            coeffs: c,
        })
    }
}

/// The conductor of a subgroup `H ⊆ (Z/m)*`: the smallest `k | m` such that
/// every unit congruent to 1 mod `k` lies in `H`.
pub fn conductor(m: u64, h: &[u64]) -> u64 {
    let us = units(m);
    divisors(m)
        .into_iter()
        .find(|&k| us.iter().filter(|&&u| u % k == 1 % k).all(|u| h.contains(u)))
        .expect("k = m always qualifies")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio};

    fn ints(p: &ZPoly) -> Vec<i64> {
        p.coeffs().iter().map(|c| i64::try_from(c.clone()).unwrap()).collect()
    }

    #[test]
    fn small_cyclotomic_polys() {
        assert_eq!(ints(&cyclotomic_poly(1)), vec![-1, 1]);
        assert_eq!(ints(&cyclotomic_poly(2)), vec![1, 1]);
        // x^6 - 1 = Φ1 Φ2 Φ3 Φ6 with Φ1Φ2Φ3 = x^4 + x^3 - x - 1
        let (q, r) = Poly::<i64>::x_pow_minus_one(6).div_rem_monic(&Poly::new(vec![-1, -1, 0, 1, 1]));
        assert!(r.is_zero());
        assert_eq!(q.coeffs(), &[1, -1, 1]);
        assert_eq!(ints(&cyclotomic_poly(6)), vec![1, -1, 1]);
        // generic instantiation agrees
        assert_eq!(cyclotomic_poly_over::<i64>(12).coeffs(), &[1, 0, -1, 0, 1]);
    }

    #[test]
    fn split_of_z_at_level_two() {
        let parts = crt_split(&GroupAlgebraElt::z_pow(2, 1));
        assert_eq!(parts[0], CycloElt::from_rat(2, rat(-1)));
        assert_eq!(parts[1], CycloElt::from_rat(1, rat(1)));
        let ones = crt_split(&GroupAlgebraElt::one(6));
        assert!(ones.iter().all(|c| *c == CycloElt::one(c.modulus())));
    }

    #[test]
    fn join_of_idempotent_is_not_integral() {
        let e = crt_join(2, &[CycloElt::one(2), CycloElt::zero(1)]).unwrap();
        assert_eq!(e.coeffs(), &[ratio(1, 2), ratio(-1, 2)]);
        assert!(!e.is_integral());
        let f = crt_join(2, &[CycloElt::zero(2), CycloElt::one(1)]).unwrap();
        assert_eq!(f.coeffs(), &[ratio(1, 2), ratio(1, 2)]);
        assert!(GroupAlgebraElt::z_pow(5, 3).is_integral());
    }

    #[test]
    fn galois_examples() {
        let z3 = CycloElt::zeta_pow(3, 1);
        assert_eq!(z3.galois_act(2).unwrap().coeffs(), &[rat(-1), rat(-1)]);
        assert_eq!(z3.galois_act(1).unwrap(), z3);
        assert!(matches!(z3.galois_act(3), Err(Error::NotAUnit { .. })));
        let x = CycloElt::new(8, vec![rat(1), ratio(2, 3), rat(0), rat(-5)]).unwrap();
        for &u in &[1, 3, 5, 7] {
            for &v in &[1, 3, 5, 7] {
                let lhs = x.galois_act(v).unwrap().galois_act(u).unwrap();
                assert_eq!(lhs, x.galois_act(u * v % 8).unwrap());
            }
        }
    }

    #[test]
    fn fixed_field_examples() {
        assert_eq!(fixed_field_basis(7, &[1]).unwrap().len(), 6);
        let b5 = fixed_field_basis(5, &[1, 4]).unwrap();
        assert_eq!(b5.len(), 2);
        let periods = [
            &CycloElt::zeta_pow(5, 1) + &CycloElt::zeta_pow(5, 4),
            &CycloElt::zeta_pow(5, 2) + &CycloElt::zeta_pow(5, 3),
        ];
        let span = |v: &[CycloElt]| Matrix::from_rows(v.iter().map(|x| x.coeffs().to_vec()).collect(), 4);
        let mut both: Vec<CycloElt> = b5.clone();
        both.extend(periods.iter().cloned());
        assert_eq!(span(&both).rank(), 2);
        assert_eq!(fixed_field_basis(4, &[1, 3]).unwrap(), vec![CycloElt::one(4)]);
        assert!(fixed_field_basis(8, &[1, 3, 5]).is_err());
        assert!(fixed_field_basis(8, &[2]).is_err());
    }

    #[test]
    fn subfield_descent() {
        let emb = SubfieldEmbedding::get(3, 12);
        let x = CycloElt::new(3, vec![ratio(1, 2), rat(3)]).unwrap();
        let y = emb.embed(&x);
        assert_eq!(emb.descend(&y), Some(x));
        assert_eq!(emb.descend(&CycloElt::zeta_pow(12, 1)), None);
        assert_eq!(conductor(12, &[1, 5, 7, 11]), 1);
        assert_eq!(conductor(12, &[1, 7]), 3);
        assert_eq!(conductor(12, &[1, 5]), 4);
        assert_eq!(conductor(12, &[1]), 12);
    }
}
