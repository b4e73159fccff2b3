//! The finite étale Q-algebra with ψ-operators attached to a `(Z/r)°`-set.
//!
//! For a set `S` at level `r` the algebra is the space of functions
//! `f: S -> Q(ζ_r)` with `f(u·s) = σ_u(f(s))` for every unit `u`, with
//! pointwise operations and `(ψ_a f)(s) = f(a·s)`. Each unit orbit `O` with
//! representative `s` and stabilizer `H` contributes the basis functions
//! determined by their value at `s`, taken from the fixed-field basis of
//! `Q(ζ_r)^H`.
//!
//! Elements are coordinate row vectors over that basis. `ψ_a` is stored as
//! the matrix whose row `i` holds the coordinates of `ψ_a(f_i)`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::arith::{totient, units};
use crate::cyclotomic::{conductor, fixed_field_basis, CycloElt};
use crate::error::{Error, Result};
use crate::json::rat_to_string;
use crate::matrix::{Matrix, RowCoordinates};
use crate::monoid::MSet;
use crate::scalar::Rat;

#[derive(Clone, Debug)]
struct Orbit {
    points: Vec<usize>,
    rep: usize,
    stabilizer: Vec<u64>,
    /// first basis index of this orbit
    offset: usize,
    fixed: RowCoordinates<Rat>,
}

#[derive(Clone, Debug)]
pub struct LambdaAlgebra {
    mset: MSet,
    orbits: Vec<Orbit>,
    orbit_of: Vec<usize>,
    /// `values[i][s] = f_i(s)`
    values: Vec<Vec<CycloElt>>,
    /// `structure[i][j]` = coordinates of `f_i f_j`
    structure: Vec<Vec<Vec<Rat>>>,
    unit: Vec<Rat>,
    psi: Vec<Matrix<Rat>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentField {
    pub orbit: Vec<usize>,
    /// conductor of the stabilizer: the field is a subfield of `Q(ζ_conductor)`
    pub conductor: u64,
    pub degree: usize,
}

/// One `(Z/r)*`-orbit per entry, ordered by smallest point.
pub fn component_fields(s: &MSet) -> Vec<ComponentField> {
    let r = s.level().get();
    s.unit_orbits()
        .into_iter()
        .map(|orbit| {
            let h = s.stabilizer(orbit[0]);
            ComponentField {
                degree: orbit.len(),
                conductor: conductor(r, &h),
                orbit,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCheck {
    pub is_field: bool,
    /// A point of `0S` and the coordinates of the idempotent supported on it.
    pub idempotent: Option<(usize, Vec<Rat>)>,
}

impl LambdaAlgebra {
    pub fn from_mset(s: &MSet) -> Self {
        let r = s.level().get();
        let phi_r = totient(r) as usize;
        let us = units(r);
        let mut orbits = Vec::new();
        let mut orbit_of = vec![0; s.size()];
        let mut values: Vec<Vec<CycloElt>> = Vec::new();
        for (oi, points) in s.unit_orbits().into_iter().enumerate() {
            let rep = points[0];
            let stabilizer = s.stabilizer(rep);
            let basis = fixed_field_basis(r, &stabilizer).expect("stabilizers are subgroups");
            debug_assert_eq!(basis.len(), points.len());
            for &t in &points {
                orbit_of[t] = oi;
            }
            // a unit carrying the representative to each point of the orbit
            let carrier: BTreeMap<usize, u64> = us.iter().rev().map(|&u| (s.act(u, rep), u)).collect();
            for b in &basis {
                let mut f = vec![CycloElt::zero(r); s.size()];
                for &t in &points {
                    f[t] = b.galois_act(carrier[&t]).expect("unit");
                }
                values.push(f);
            }
            let rows = basis.iter().map(|b| b.coeffs().to_vec()).collect();
            let fixed = RowCoordinates::new(Matrix::from_rows(rows, phi_r)).expect("basis is independent");
            orbits.push(Orbit {
                offset: values.len() - basis.len(),
                points,
                rep,
                stabilizer,
                fixed,
            });
        }
        let mut alg = LambdaAlgebra {
            mset: s.clone(),
            orbits,
            orbit_of,
            values,
            structure: Vec::new(),
            unit: Vec::new(),
            psi: Vec::new(),
        };
        let n = alg.dim();
        alg.structure = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if alg.orbit_index(i) != alg.orbit_index(j) {
                            return vec![Rat::zero(); n];
                        }
                        let prod: Vec<CycloElt> =
                            alg.values[i].iter().zip(&alg.values[j]).map(|(a, b)| a * b).collect();
                        alg.coords_unchecked(&prod)
                    })
                    .collect()
            })
            .collect();
        alg.unit = alg.coords_unchecked(&vec![CycloElt::one(r); s.size()]);
        alg.psi = (0..r)
            .map(|a| {
                let rows = (0..n)
                    .map(|i| {
                        let shifted: Vec<CycloElt> =
                            (0..s.size()).map(|t| alg.values[i][s.act(a, t)].clone()).collect();
                        alg.coords_unchecked(&shifted)
                    })
                    .collect();
                Matrix::from_rows(rows, n)
            })
            .collect();
        alg
    }

    fn orbit_index(&self, basis_index: usize) -> usize {
        self.orbits
            .iter()
            .rposition(|o| o.offset <= basis_index)
            .expect("offsets start at 0")
    }

    /// Coordinates of an equivariant function, reading only representatives.
    fn coords_unchecked(&self, f: &[CycloElt]) -> Vec<Rat> {
        let mut out = vec![Rat::zero(); self.dim()];
        for o in &self.orbits {
            let c = o
                .fixed
                .coords(f[o.rep].coeffs())
                .expect("value at a representative lies in the fixed field");
            for (k, x) in c.into_iter().enumerate() {
                out[o.offset + k] = x;
            }
        }
        out
    }

    /// Coordinates of a function given by its values at every point; fails
    /// if the function is not equivariant.
    pub fn coords_of_function(&self, f: &[CycloElt]) -> Result<Vec<Rat>> {
        let r = self.level();
        if f.len() != self.mset.size() {
            return Err(Error::DimensionMismatch {
                expected: self.mset.size(),
                got: f.len(),
            });
        }
        for o in &self.orbits {
            if o.fixed.coords(f[o.rep].coeffs()).is_none() {
                return Err(Error::NotEquivariant {
                    a: o.stabilizer[0],
                    s: o.rep,
                });
            }
        }
        for u in units(r) {
            for s in 0..f.len() {
                if f[self.mset.act(u, s)] != f[s].galois_act(u)? {
                    return Err(Error::NotEquivariant { a: u, s });
                }
            }
        }
        Ok(self.coords_unchecked(f))
    }

    pub fn mset(&self) -> &MSet {
        &self.mset
    }

    pub fn level(&self) -> u64 {
        self.mset.level().get()
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn unit(&self) -> &[Rat] {
        &self.unit
    }

    pub fn zero(&self) -> Vec<Rat> {
        vec![Rat::zero(); self.dim()]
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rat> {
        let mut v = self.zero();
        v[i] = Rat::one();
        v
    }

    pub fn structure_constants(&self) -> &[Vec<Vec<Rat>>] {
        &self.structure
    }

    /// `ψ_a` as a matrix acting on row vectors.
    pub fn psi_matrix(&self, a: u64) -> &Matrix<Rat> {
        &self.psi[(a % self.level()) as usize]
    }

    pub fn psi(&self, a: u64, x: &[Rat]) -> Vec<Rat> {
        self.psi_matrix(a).left_apply(x)
    }

    pub fn mul(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let n = self.dim();
        let mut out = self.zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            let oi = self.orbit_of_basis(i);
            for j in self.orbit_range(oi) {
                if y[j].is_zero() {
                    continue;
                }
                let xy = &x[i] * &y[j];
                for (o, c) in out.iter_mut().zip(&self.structure[i][j]) {
                    if !c.is_zero() {
                        *o += &xy * c;
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, x: &[Rat], e: u64) -> Vec<Rat> {
        let mut acc = self.unit.clone();
        let mut base = x.to_vec();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn orbit_of_basis(&self, i: usize) -> usize {
        self.orbit_index(i)
    }

    fn orbit_range(&self, oi: usize) -> std::ops::Range<usize> {
        let o = &self.orbits[oi];
        o.offset..o.offset + o.points.len()
    }

    /// Values of an element at every point.
    pub fn element_values(&self, x: &[Rat]) -> Vec<CycloElt> {
        let r = self.level();
        (0..self.mset.size())
            .map(|s| {
                let mut acc = CycloElt::zero(r);
                for i in self.orbit_range(self.orbit_of[s]) {
                    if !x[i].is_zero() {
                        acc = &acc + &self.values[i][s].scale(&x[i]);
                    }
                }
                acc
            })
            .collect()
    }

    /// Value of basis function `i` at point `s`.
    pub fn basis_value(&self, i: usize, s: usize) -> &CycloElt {
        &self.values[i][s]
    }

    /// The idempotent that is 1 on the orbit `oi` and 0 elsewhere.
    pub fn orbit_idempotent(&self, oi: usize) -> Vec<Rat> {
        let r = self.level();
        let f: Vec<CycloElt> = (0..self.mset.size())
            .map(|s| {
                if self.orbit_of[s] == oi {
                    CycloElt::one(r)
                } else {
                    CycloElt::zero(r)
                }
            })
            .collect();
        self.coords_unchecked(&f)
    }

    /// The primitive idempotents, one per unit orbit.
    pub fn primitive_idempotents(&self) -> Vec<Vec<Rat>> {
        (0..self.orbits.len()).map(|oi| self.orbit_idempotent(oi)).collect()
    }

    /// Recover the `(Z/r)°`-set from the algebra: the points are the ring
    /// maps to `Q(ζ_r)` given by evaluation, and `a` sends the map `ev_s`
    /// to `ev_s ∘ ψ_a`. Everything is re-derived from the structure
    /// constants and ψ-matrices and checked along the way.
    pub fn points(&self) -> Result<MSet> {
        let n = self.dim();
        let r = self.level();
        let size = self.mset.size();
        let idems = self.primitive_idempotents();
        let mut total = self.zero();
        for (a, e) in idems.iter().enumerate() {
            if self.mul(e, e) != *e {
                return Err(Error::NotEtale(format!("orbit idempotent {a} is not idempotent")));
            }
            for (b, f) in idems.iter().enumerate() {
                if a != b && self.mul(e, f) != self.zero() {
                    return Err(Error::NotEtale(format!("idempotents {a}, {b} not orthogonal")));
                }
            }
            let block: Vec<Vec<Rat>> = (0..n).map(|i| self.mul(e, &self.basis_vector(i))).collect();
            if Matrix::from_rows(block, n).rank() != self.orbits[a].points.len() {
                return Err(Error::NotEtale(format!("component {a} has the wrong degree")));
            }
            total = total.iter().zip(e).map(|(x, y)| x + y).collect();
        }
        if total != self.unit {
            return Err(Error::NotEtale("idempotents do not sum to 1".into()));
        }
        let evals: Vec<Vec<CycloElt>> = (0..size)
            .map(|s| (0..n).map(|i| self.values[i][s].clone()).collect())
            .collect();
        let apply = |ev: &[CycloElt], x: &[Rat]| -> CycloElt {
            x.iter()
                .zip(ev)
                .filter(|(c, _)| !c.is_zero())
                .fold(CycloElt::zero(r), |acc, (c, v)| &acc + &v.scale(c))
        };
        for (s, ev) in evals.iter().enumerate() {
            if apply(ev, &self.unit) != CycloElt::one(r) {
                return Err(Error::NotEtale(format!("evaluation at {s} is not unital")));
            }
            for i in 0..n {
                for j in 0..n {
                    if apply(ev, &self.structure[i][j]) != &ev[i] * &ev[j] {
                        return Err(Error::NotEtale(format!("evaluation at {s} is not multiplicative")));
                    }
                }
            }
        }
        let table = (0..r)
            .map(|a| {
                let psi = self.psi_matrix(a);
                evals
                    .iter()
                    .map(|ev| {
                        let pulled: Vec<CycloElt> = (0..n).map(|i| apply(ev, psi.row(i))).collect();
                        evals
                            .iter()
                            .position(|other| *other == pulled)
                            .ok_or_else(|| Error::NotEtale("ψ does not permute evaluations".into()))
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        MSet::with_size(self.mset.level(), size, table)
            .map_err(|e| Error::NotEtale(format!("recovered action is invalid: {e}")))
    }

    /// Dimension 1 means `Q`. Otherwise a point of `0S` is fixed by every
    /// residue, so its indicator is a nontrivial idempotent.
    pub fn is_field_check(&self) -> FieldCheck {
        if self.dim() == 1 {
            return FieldCheck {
                is_field: true,
                idempotent: None,
            };
        }
        let idempotent = self.mset.zero_image().first().map(|&t| {
            let e = self.orbit_idempotent(self.orbit_of[t]);
            debug_assert_eq!(self.mul(&e, &e), e);
            (t, e)
        });
        FieldCheck {
            is_field: false,
            idempotent,
        }
    }

    /// Structural self-check: commutative associative unital multiplication,
    /// ψ-operators are unital ring endomorphisms obeying the monoid law.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.dim();
        let r = self.level();
        let e: Vec<Vec<Rat>> = (0..n).map(|i| self.basis_vector(i)).collect();
        for i in 0..n {
            if self.mul(&self.unit, &e[i]) != e[i] {
                return Err(format!("unit fails on basis {i}"));
            }
            for j in 0..n {
                let ij = self.mul(&e[i], &e[j]);
                if ij != self.mul(&e[j], &e[i]) {
                    return Err(format!("not commutative at ({i},{j})"));
                }
                for k in 0..n {
                    if self.mul(&ij, &e[k]) != self.mul(&e[i], &self.mul(&e[j], &e[k])) {
                        return Err(format!("not associative at ({i},{j},{k})"));
                    }
                }
            }
        }
        if self.psi_matrix(1) != &Matrix::identity(n) {
            return Err("ψ_1 is not the identity".into());
        }
        for a in 0..r {
            if self.psi(a, &self.unit) != self.unit {
                return Err(format!("ψ_{a} is not unital"));
            }
            for i in 0..n {
                for j in 0..n {
                    let lhs = self.psi(a, &self.mul(&e[i], &e[j]));
                    let rhs = self.mul(&self.psi(a, &e[i]), &self.psi(a, &e[j]));
                    if lhs != rhs {
                        return Err(format!("ψ_{a} not multiplicative at ({i},{j})"));
                    }
                }
            }
            for b in 0..r {
                if &(self.psi_matrix(b) * self.psi_matrix(a)) != self.psi_matrix(a * b) {
                    return Err(format!("ψ_{a}ψ_{b} != ψ_{}", (a * b) % r));
                }
            }
        }
        Ok(())
    }

    /// Golden-file dump: dimension, structure constants, unit and ψ-matrices
    /// as rational strings.
    pub fn to_json(&self) -> Value {
        let strs = |v: &[Rat]| v.iter().map(rat_to_string).collect::<Vec<_>>();
        let psi: BTreeMap<String, Vec<Vec<String>>> = (0..self.level())
            .map(|a| {
                (
                    a.to_string(),
                    self.psi_matrix(a).to_rows().iter().map(|r| strs(r)).collect(),
                )
            })
            .collect();
        json!({
            "dimension": self.dim(),
            "level": self.level(),
            "structure_constants": self.structure.iter()
                .map(|row| row.iter().map(|v| strs(v)).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "unit": strs(&self.unit),
            "psi": psi,
        })
    }
}

/// `x^p` in the algebra.
pub fn frobenius_defect(k: &LambdaAlgebra, p: u64, x: &[Rat]) -> Vec<Rat> {
    let xp = k.pow(x, p);
    k.psi(p, x).iter().zip(&xp).map(|(a, b)| a - b).collect()
}
