//! Lattices in `Q^n` as `(1/D)·(row span of an integer HNF basis)`.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::json::{int_from_str, int_to_string};
use crate::matrix::Matrix;
use crate::scalar::{common_denominator, Int, Rat};

/// A ℤ-lattice of rank `k` in `Q^n`, stored in normal form: the basis is in
/// row Hermite normal form (positive pivots, entries above a pivot reduced
/// into `[0, pivot)`), and `gcd(entries, den) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntLattice {
    dim: usize,
    basis: Vec<Vec<Int>>,
    pivots: Vec<usize>,
    den: Int,
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
/// Zero rows are dropped; the result has one row per pivot.
pub fn hnf(rows: &[Vec<Int>], dim: usize) -> Vec<Vec<Int>> {
    let mut basis: Vec<Option<Vec<Int>>> = vec![None; dim];
    for row in rows {
        assert_eq!(row.len(), dim, "row length");
        insert_row(&mut basis, row.clone());
        reduce_basis(&mut basis);
    }
    basis.into_iter().flatten().collect()
}

/// Reduce every entry above a pivot into `[0, pivot)`.
fn reduce_basis(basis: &mut [Option<Vec<Int>>]) {
    for p in 0..basis.len() {
        let Some(pivot_row) = basis[p].clone() else {
            continue;
        };
        for row in basis[..p].iter_mut().flatten() {
            let q = row[p].div_floor(&pivot_row[p]);
            if !q.is_zero() {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
            }
        }
    }
}

/// Fold `v` into a basis indexed by pivot column, by unimodular row operations.
fn insert_row(basis: &mut [Option<Vec<Int>>], mut v: Vec<Int>) {
    let dim = v.len();
    for col in 0..dim {
        if v[col].is_zero() {
            continue;
        }
        match basis[col].take() {
            None => {
                if v[col].is_negative() {
                    v.iter_mut().for_each(|x| *x = -x.clone());
                }
                basis[col] = Some(v);
                return;
            }
            Some(b) => {
                let e = b[col].extended_gcd(&v[col]);
                let (bp, vp) = (&b[col] / &e.gcd, &v[col] / &e.gcd);
                let mut new_b: Vec<Int> = b.iter().zip(&v).map(|(x, y)| &e.x * x + &e.y * y).collect();
                let new_v: Vec<Int> = v.iter().zip(&b).map(|(y, x)| &bp * y - &vp * x).collect();
                if new_b[col].is_negative() {
                    new_b.iter_mut().for_each(|x| *x = -x.clone());
                }
                basis[col] = Some(new_b);
                v = new_v;
                debug_assert!(v[col].is_zero());
                reduce_row_by(&mut v, basis, col + 1);
            }
        }
    }
}

/// Reduce the entries of `v` at pivot columns `>= from` into `[0, pivot)`.
fn reduce_row_by(v: &mut [Int], basis: &[Option<Vec<Int>>], from: usize) {
    for col in from..v.len() {
        if let Some(b) = &basis[col] {
            let q = v[col].div_floor(&b[col]);
            if !q.is_zero() {
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= &q * y;
                }
            }
        }
    }
}

fn pivot_of(row: &[Int]) -> usize {
    row.iter().position(|x| !x.is_zero()).expect("nonzero row")
}

impl IntLattice {
    /// The ℤ-span of integer rows.
    pub fn from_integer_rows(rows: &[Vec<Int>], dim: usize) -> Self {
        Self::normalize(hnf(rows, dim), Int::one(), dim)
    }

    /// The ℤ-span of rational rows.
    pub fn from_rational_rows(rows: &[Vec<Rat>], dim: usize) -> Self {
        let den = common_denominator(rows.iter().flatten());
        let ints: Vec<Vec<Int>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| (x * Rat::from_integer(den.clone())).to_integer())
                    .collect()
            })
            .collect();
        Self::normalize(hnf(&ints, dim), den, dim)
    }

    fn normalize(mut basis: Vec<Vec<Int>>, mut den: Int, dim: usize) -> Self {
        let g = basis.iter().flatten().fold(den.clone(), |g, x| g.gcd(x));
        if !g.is_one() {
            basis.iter_mut().flatten().for_each(|x| *x /= &g);
            den /= &g;
        }
        let pivots = basis.iter().map(|r| pivot_of(r)).collect();
        IntLattice {
            dim,
            basis,
            pivots,
            den,
        }
    }

    /// `Z^n`
    pub fn standard(dim: usize) -> Self {
        let rows: Vec<Vec<Int>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { Int::one() } else { Int::zero() })
                    .collect()
            })
            .collect();
        Self::from_integer_rows(&rows, dim)
    }

    pub fn zero(dim: usize) -> Self {
        IntLattice {
            dim,
            basis: Vec::new(),
            pivots: Vec::new(),
            den: Int::one(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    pub fn den(&self) -> &Int {
        &self.den
    }

    pub fn integer_basis(&self) -> &[Vec<Int>] {
        &self.basis
    }

    /// Basis vectors as rationals (already divided by the denominator).
    pub fn basis(&self) -> Vec<Vec<Rat>> {
        self.basis
            .iter()
            .map(|r| r.iter().map(|x| Rat::new(x.clone(), self.den.clone())).collect())
            .collect()
    }

    /// Integer coordinates of `v` in the HNF basis, if `v` is in the lattice.
    pub fn coordinates(&self, v: &[Rat]) -> Option<Vec<Int>> {
        assert_eq!(v.len(), self.dim, "vector length");
        let scale = Rat::from_integer(self.den.clone());
        let mut x: Vec<Int> = Vec::with_capacity(self.dim);
        for c in v {
            let y = c * &scale;
            if !y.is_integer() {
                return None;
            }
            x.push(y.to_integer());
        }
        let mut coords = Vec::with_capacity(self.rank());
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            let (q, r) = x[p].div_rem(&row[p]);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for (a, b) in x.iter_mut().zip(row) {
                    *a -= &q * b;
                }
            }
            coords.push(q);
        }
        x.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &IntLattice) -> bool {
        other.basis().iter().all(|v| self.contains(v))
    }

    /// `self + other`
    pub fn sum(&self, other: &IntLattice) -> IntLattice {
        assert_eq!(self.dim, other.dim);
        let mut rows = self.basis();
        rows.extend(other.basis());
        Self::from_rational_rows(&rows, self.dim)
    }

    pub fn scale(&self, c: &Rat) -> IntLattice {
        let rows: Vec<Vec<Rat>> = self
            .basis()
            .into_iter()
            .map(|r| r.iter().map(|x| x * c).collect())
            .collect();
        Self::from_rational_rows(&rows, self.dim)
    }

    /// Covolume of a full-rank lattice: `|det(basis)|`.
    pub fn covolume(&self) -> Option<Rat> {
        if !self.is_full_rank() {
            return None;
        }
        // HNF is triangular
        let det: Int = self
            .basis
            .iter()
            .zip(&self.pivots)
            .map(|(r, &p)| r[p].clone())
            .product();
        Some(Rat::new(det, num_traits::pow(self.den.clone(), self.dim)))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "rank": self.rank(),
            "den": int_to_string(&self.den),
            "basis": self.basis.iter().map(|r| r.iter().map(int_to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Decode(format!("lattice: {m}"));
        let dim = v["dim"].as_u64().ok_or_else(|| bad("dim"))? as usize;
        let den = int_from_str(v["den"].as_str().ok_or_else(|| bad("den"))?)?;
        if !den.is_positive() {
            return Err(bad("den must be positive"));
        }
        let rows = v["basis"].as_array().ok_or_else(|| bad("basis"))?;
        let mut basis = Vec::new();
        for row in rows {
            let row = row.as_array().ok_or_else(|| bad("row"))?;
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            let ints = row
                .iter()
                .map(|x| x.as_str().ok_or_else(|| bad("entry")).and_then(int_from_str))
                .collect::<Result<Vec<_>>>()?;
            basis.push(ints.into_iter().map(|x| Rat::new(x, den.clone())).collect());
        }
        Ok(Self::from_rational_rows(&basis, dim))
    }
}

/// `[outer : inner]` for `inner ⊆ outer` of equal full rank.
pub fn index(inner: &IntLattice, outer: &IntLattice) -> Result<Int> {
    if !outer.contains_lattice(inner) {
        return Err(Error::NotContained);
    }
    let (a, b) = match (inner.covolume(), outer.covolume()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::NotContained),
    };
    let q = a / b;
    debug_assert!(q.is_integer());
    Ok(q.to_integer())
}

/// `covol(l1) / covol(l2)` for full-rank lattices, no containment needed.
pub fn relative_index(l1: &IntLattice, l2: &IntLattice) -> Option<Rat> {
    Some(l1.covolume()? / l2.covolume()?)
}

/// `{x ∈ Q^n : A x ∈ Z^k}` for a `k × n` rational matrix `A` of rank `n`.
pub fn preimage_lattice(a: &Matrix<Rat>) -> Result<IntLattice> {
    let n = a.cols();
    if n == 0 {
        return Ok(IntLattice::zero(0));
    }
    let rank = a.rank();
    if rank < n {
        return Err(Error::NotDiscrete(n - rank));
    }
    // The solution set is the dual of the row lattice of A.
    let rows = IntLattice::from_rational_rows(&a.to_rows(), n);
    let b = Matrix::from_rows(rows.basis(), n);
    let inv = b.inverse().expect("full-rank row lattice");
    Ok(IntLattice::from_rational_rows(&inv.transpose().to_rows(), n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, ratio};

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Int>> {
        rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect()
    }

    #[test]
    fn hnf_normal_form() {
        let h = hnf(&ints(&[&[2, 4], &[3, 5]]), 2);
        // span of (2,4),(3,5) = span of (1,1),(0,2)
        assert_eq!(h, ints(&[&[1, 1], &[0, 2]]));
        let h = hnf(&ints(&[&[0, 0], &[-3, 0], &[6, 0]]), 2);
        assert_eq!(h, ints(&[&[3, 0]]));
    }

    #[test]
    fn membership() {
        let l = IntLattice::from_rational_rows(&[vec![ratio(1, 2), rat(0)], vec![rat(0), rat(3)]], 2);
        assert!(l.contains(&[ratio(3, 2), rat(-6)]));
        assert!(!l.contains(&[ratio(1, 3), rat(0)]));
        assert!(!l.contains(&[rat(0), rat(1)]));
        assert_eq!(l.covolume(), Some(ratio(3, 2)));
        assert_eq!(l.coordinates(&[rat(1), rat(3)]), Some(vec![Int::from(2), Int::from(1)]));
    }

    #[test]
    fn preimage_examples() {
        let id = Matrix::<Rat>::identity(3);
        assert_eq!(preimage_lattice(&id).unwrap(), IntLattice::standard(3));
        let half = Matrix::from_rows(vec![vec![ratio(1, 2)]], 1);
        assert_eq!(
            preimage_lattice(&half).unwrap(),
            IntLattice::from_integer_rows(&ints(&[&[2]]), 1)
        );
        let singular = Matrix::from_rows(vec![vec![rat(1), rat(1)]], 2);
        assert_eq!(preimage_lattice(&singular), Err(Error::NotDiscrete(1)));
    }

    #[test]
    fn index_examples() {
        let z = IntLattice::standard(1);
        let two_z = IntLattice::from_integer_rows(&ints(&[&[2]]), 1);
        assert_eq!(index(&two_z, &z).unwrap(), Int::from(2));
        assert_eq!(index(&z, &z).unwrap(), Int::from(1));
        assert_eq!(index(&z, &two_z), Err(Error::NotContained));
    }

    #[test]
    fn json_round_trip() {
        let l = IntLattice::from_rational_rows(&[vec![ratio(1, 2), rat(1)], vec![rat(0), rat(3)]], 2);
        let v = l.to_json();
        assert_eq!(v["den"], json!("2"));
        assert_eq!(IntLattice::from_json(&v).unwrap(), l);
    }
}
