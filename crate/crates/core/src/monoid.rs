//! Finite sets with an action of the multiplicative monoid of `Z/r`.
//!
//! Points are indexed `0..n`. The action table has one row per residue
//! `a in 0..r`, and `table[a][s]` is the point `a·s`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, units};
use crate::error::{Error, Result};

/// A positive modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Level(u64);

impl Level {
    pub fn new(r: u64) -> Result<Self> {
        if r == 0 {
            return Err(Error::MalformedTable("level must be at least 1".into()));
        }
        Ok(Level(r))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn lcm(self, other: Level) -> Level {
        Level(self.0.lcm(&other.0))
    }
}

impl TryFrom<u64> for Level {
    type Error = Error;
    fn try_from(r: u64) -> Result<Self> {
        Level::new(r)
    }
}

impl From<Level> for u64 {
    fn from(l: Level) -> u64 {
        l.0
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A validated `(Z/r)°`-set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MSetJson", into = "MSetJson")]
pub struct MSet {
    level: Level,
    size: usize,
    action: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct MSetJson {
    level: u64,
    size: usize,
    action: Vec<Vec<usize>>,
}

impl TryFrom<MSetJson> for MSet {
    type Error = Error;
    fn try_from(j: MSetJson) -> Result<Self> {
        MSet::with_size(Level::new(j.level)?, j.size, j.action)
    }
}

impl From<MSet> for MSetJson {
    fn from(m: MSet) -> Self {
        MSetJson {
            level: m.level.0,
            size: m.size,
            action: m.action,
        }
    }
}

impl MSet {
    /// Validate an action table with `r` rows. The size is read from the
    /// rows, so an empty set needs `r` empty rows.
    pub fn new(level: Level, table: Vec<Vec<usize>>) -> Result<Self> {
        let size = table.first().map_or(0, Vec::len);
        Self::with_size(level, size, table)
    }

    pub fn with_size(level: Level, size: usize, table: Vec<Vec<usize>>) -> Result<Self> {
        let r = level.0;
        if table.len() as u64 != r {
            return Err(Error::MalformedTable(format!(
                "expected {r} rows, found {}",
                table.len()
            )));
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != size {
                return Err(Error::MalformedTable(format!(
                    "row {a} has length {}, expected {size}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&t| t >= size) {
                return Err(Error::MalformedTable(format!("row {a} contains {bad} >= {size}")));
            }
        }
        let one = (1 % r) as usize;
        if let Some(s) = (0..size).find(|&s| table[one][s] != s) {
            return Err(Error::IdentityAxiomViolated(s));
        }
        for a in 0..r {
            for b in 0..r {
                let ab = ((a * b) % r) as usize;
                for s in 0..size {
                    if table[a as usize][table[b as usize][s]] != table[ab][s] {
                        return Err(Error::AssociativityViolated { a, b, s });
                    }
                }
            }
        }
        Ok(MSet {
            level,
            size,
            action: table,
        })
    }

    /// Build from a rule `(a, s) -> a·s` and validate.
    pub fn from_fn(level: Level, size: usize, f: impl Fn(u64, usize) -> usize) -> Result<Self> {
        let table = (0..level.0).map(|a| (0..size).map(|s| f(a, s)).collect()).collect();
        Self::with_size(level, size, table)
    }

    /// `Z/r` acting on itself by multiplication: the free set on one generator.
    pub fn regular(level: Level) -> Self {
        let r = level.0;
        Self::from_fn(level, r as usize, |a, s| ((a * s as u64) % r) as usize).expect("regular action is valid")
    }

    /// `n` points, every residue acting as the identity.
    pub fn trivial(level: Level, n: usize) -> Self {
        Self::from_fn(level, n, |_, s| s).expect("trivial action is valid")
    }

    pub fn singleton(level: Level) -> Self {
        Self::trivial(level, 1)
    }

    pub fn empty(level: Level) -> Self {
        Self::trivial(level, 0)
    }

    /// `(Z/p)^k` at level `p` with `a·v = av`; points are base-`p` digit
    /// strings, most significant coordinate first.
    pub fn vector_space(p: u64, k: u32) -> Self {
        let n = p.pow(k) as usize;
        Self::from_fn(Level(p), n, |a, s| {
            let mut s = s as u64;
            let mut out = 0;
            let mut place = 1;
            for _ in 0..k {
                out += ((s % p) * a % p) * place;
                s /= p;
                place *= p;
            }
            out as usize
        })
        .expect("scalar action is valid")
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// `a·s`, with `a` read modulo the level.
    pub fn act(&self, a: u64, s: usize) -> usize {
        self.action[(a % self.level.0) as usize][s]
    }

    pub fn row(&self, a: u64) -> &[usize] {
        &self.action[(a % self.level.0) as usize]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.action
    }

    /// Regard as a set over `Z/m` for a multiple `m` of the level.
    pub fn lift(&self, m: Level) -> Result<Self> {
        if !m.0.is_multiple_of(self.level.0) {
            return Err(Error::LevelMismatch(self.level.0, m.0));
        }
        let table = (0..m.0).map(|a| self.row(a).to_vec()).collect();
        Ok(MSet {
            level: m,
            size: self.size,
            action: table,
        })
    }

    fn lift_unchecked(&self, m: Level) -> Self {
        self.lift(m).expect("target level is a multiple")
    }

    /// Product with the diagonal action; point `(s, t)` has index `s*|T| + t`.
    pub fn product(&self, other: &MSet) -> MSet {
        let level = self.level.lcm(other.level);
        let (a_set, b_set) = (self.lift_unchecked(level), other.lift_unchecked(level));
        let m = b_set.size;
        Self::from_fn(level, self.size * m, |a, st| {
            a_set.act(a, st / m) * m + b_set.act(a, st % m)
        })
        .expect("diagonal action is valid")
    }

    /// Disjoint union; points of `other` are shifted by `|self|`.
    pub fn coproduct(&self, other: &MSet) -> MSet {
        let level = self.level.lcm(other.level);
        let n = self.size;
        Self::from_fn(level, n + other.size, |a, s| {
            if s < n {
                self.act(a, s)
            } else {
                n + other.act(a, s - n)
            }
        })
        .expect("disjoint union is valid")
    }

    /// The subset `0S`, sorted.
    pub fn zero_image(&self) -> Vec<usize> {
        self.row(0)
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// The involution given by `-1`.
    pub fn psi_minus_one(&self) -> Vec<usize> {
        self.row(self.level.0 - 1).to_vec()
    }

    /// Smallest divisor `r'` of the level through which the action factors,
    /// and the reduced set at that level.
    pub fn minimal_level(&self) -> MSet {
        let r = self.level.0;
        for d in divisors(r) {
            let constant = (0..r).all(|a| self.row(a) == self.row(a % d));
            if constant {
                let table = (0..d).map(|a| self.row(a).to_vec()).collect();
                return MSet::with_size(Level(d), self.size, table).expect("reduction of a valid action is valid");
            }
        }
        unreachable!("r itself always works")
    }

    /// Orbits under the unit group `(Z/r)*`, each sorted, ordered by their
    /// smallest element.
    pub fn unit_orbits(&self) -> Vec<Vec<usize>> {
        let us = units(self.level.0);
        let mut seen = vec![false; self.size];
        let mut orbits = Vec::new();
        for s in 0..self.size {
            if seen[s] {
                continue;
            }
            let orbit: BTreeSet<usize> = us.iter().map(|&u| self.act(u, s)).collect();
            for &t in &orbit {
                seen[t] = true;
            }
            orbits.push(orbit.into_iter().collect());
        }
        orbits
    }

    /// Units fixing `s`.
    pub fn stabilizer(&self, s: usize) -> Vec<u64> {
        units(self.level.0)
            .into_iter()
            .filter(|&u| self.act(u, s) == s)
            .collect()
    }

    /// An isomorphism `self -> other` as a point bijection, if one exists.
    pub fn isomorphism(&self, other: &MSet) -> Option<Vec<usize>> {
        if self.size != other.size {
            return None;
        }
        let level = self.level.lcm(other.level);
        let (a, b) = (self.lift_unchecked(level), other.lift_unchecked(level));
        let sig_a: Vec<_> = (0..a.size).map(|s| a.signature(s)).collect();
        let sig_b: Vec<_> = (0..b.size).map(|s| b.signature(s)).collect();
        let mut assignment = vec![None; a.size];
        let mut used = vec![false; b.size];
        if iso_search(&a, &b, &sig_a, &sig_b, &mut assignment, &mut used) {
            Some(assignment.into_iter().map(|t| t.unwrap()).collect())
        } else {
            None
        }
    }

    pub fn is_isomorphic(&self, other: &MSet) -> bool {
        self.isomorphism(other).is_some()
    }

    /// Isomorphism-invariant data of a point: for each residue, whether it
    /// fixes the point, and the size of the forward orbit.
    fn signature(&self, s: usize) -> (Vec<bool>, usize) {
        let fixes = (0..self.level.0).map(|a| self.act(a, s) == s).collect();
        let orbit: BTreeSet<usize> = (0..self.level.0).map(|a| self.act(a, s)).collect();
        (fixes, orbit.len())
    }
}

fn iso_search(
    a: &MSet,
    b: &MSet,
    sig_a: &[(Vec<bool>, usize)],
    sig_b: &[(Vec<bool>, usize)],
    assignment: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
) -> bool {
    let Some(s) = assignment.iter().position(Option::is_none) else {
        return true;
    };
    for t in 0..b.size {
        if used[t] || sig_a[s] != sig_b[t] {
            continue;
        }
        let saved_assignment = assignment.clone();
        let saved_used = used.clone();
        if propagate(a, b, s, t, assignment, used) && iso_search(a, b, sig_a, sig_b, assignment, used) {
            return true;
        }
        *assignment = saved_assignment;
        *used = saved_used;
    }
    false
}

/// Force `s -> t` and everything equivariance implies; false on conflict.
fn propagate(a: &MSet, b: &MSet, s: usize, t: usize, assignment: &mut [Option<usize>], used: &mut [bool]) -> bool {
    let mut queue = VecDeque::from([(s, t)]);
    while let Some((x, y)) = queue.pop_front() {
        match assignment[x] {
            Some(prev) if prev == y => continue,
            Some(_) => return false,
            None => {
                if used[y] {
                    return false;
                }
                assignment[x] = Some(y);
                used[y] = true;
            }
        }
        for r in 0..a.level.0 {
            queue.push_back((a.act(r, x), b.act(r, y)));
        }
    }
    true
}

/// An equivariant map of sets over a common level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MSetMap {
    source: MSet,
    target: MSet,
    values: Vec<usize>,
}

impl MSetMap {
    /// Lifts both sides to the lcm of their levels and checks equivariance.
    pub fn new(source: &MSet, target: &MSet, values: Vec<usize>) -> Result<Self> {
        let level = source.level.lcm(target.level);
        let (source, target) = (source.lift(level)?, target.lift(level)?);
        if values.len() != source.size {
            return Err(Error::MalformedTable(format!(
                "map has {} values for {} points",
                values.len(),
                source.size
            )));
        }
        if let Some(&bad) = values.iter().find(|&&t| t >= target.size) {
            return Err(Error::MalformedTable(format!("map value {bad} out of range")));
        }
        for a in 0..level.0 {
            for s in 0..source.size {
                if values[source.act(a, s)] != target.act(a, values[s]) {
                    return Err(Error::NotEquivariant { a, s });
                }
            }
        }
        Ok(MSetMap { source, target, values })
    }

    pub fn identity(s: &MSet) -> Self {
        MSetMap {
            source: s.clone(),
            target: s.clone(),
            values: (0..s.size).collect(),
        }
    }

    /// The surjection from the free set `∐_S Z/r` onto `S`, sending the
    /// point `(s, a)` (index `s*r + a`) to `a·s`.
    pub fn free_cover(s: &MSet) -> Self {
        let level = s.level;
        let r = level.0 as usize;
        let free = (0..s.size).fold(MSet::empty(level), |acc, _| acc.coproduct(&MSet::regular(level)));
        let values = (0..s.size * r).map(|i| s.act((i % r) as u64, i / r)).collect();
        MSetMap::new(&free, s, values).expect("free cover is equivariant")
    }

    pub fn source(&self) -> &MSet {
        &self.source
    }

    pub fn target(&self) -> &MSet {
        &self.target
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn is_surjective(&self) -> bool {
        let hit: BTreeSet<_> = self.values.iter().collect();
        hit.len() == self.target.size
    }

    pub fn is_injective(&self) -> bool {
        let hit: BTreeSet<_> = self.values.iter().collect();
        hit.len() == self.values.len()
    }

    /// Epi-mono factorization through the set-theoretic image.
    pub fn image(&self) -> ImageFactorization {
        let points: Vec<usize> = self
            .values
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index_of = |t: usize| points.binary_search(&t).expect("image is closed");
        let level = self.target.level;
        let image = MSet::from_fn(level, points.len(), |a, i| index_of(self.target.act(a, points[i])))
            .expect("image of an equivariant map is a sub-object");
        let surjection = MSetMap::new(&self.source, &image, self.values.iter().map(|&t| index_of(t)).collect())
            .expect("corestriction is equivariant");
        let injection = MSetMap::new(&image, &self.target, points).expect("inclusion is equivariant");
        ImageFactorization {
            image,
            surjection,
            injection,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ImageFactorization {
    pub image: MSet,
    pub surjection: MSetMap,
    pub injection: MSetMap,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(r: u64) -> Level {
        Level::new(r).unwrap()
    }

    #[test]
    fn make_mset_examples() {
        assert_eq!(MSet::new(lv(1), vec![vec![0]]).unwrap().size(), 1);
        let reg4 = MSet::from_fn(lv(4), 4, |a, s| ((a * s as u64) % 4) as usize).unwrap();
        assert_eq!(reg4, MSet::regular(lv(4)));
        let bad = MSet::new(lv(2), vec![vec![0, 0], vec![1, 1]]);
        assert_eq!(bad, Err(Error::IdentityAxiomViolated(0)));
    }

    #[test]
    fn associativity_is_checked() {
        // 0 acting as a swap is not idempotent
        let bad = MSet::new(lv(2), vec![vec![1, 0], vec![0, 1]]);
        assert!(matches!(bad, Err(Error::AssociativityViolated { .. })));
        let ragged = MSet::new(lv(2), vec![vec![0, 0], vec![0]]);
        assert!(matches!(ragged, Err(Error::MalformedTable(_))));
        assert!(Level::new(0).is_err());
    }

    #[test]
    fn regular_examples() {
        let r2 = MSet::regular(lv(2));
        assert_eq!(r2.act(0, 1), 0);
        assert_eq!(r2.act(1, 1), 1);
        assert_eq!(MSet::regular(lv(6)).act(2, 3), 0);
        assert_eq!(MSet::regular(lv(1)).size(), 1);
    }

    #[test]
    fn product_and_coproduct() {
        let r2 = MSet::regular(lv(2));
        let p = r2.product(&r2);
        assert_eq!(p.size(), 4);
        assert!(p.is_isomorphic(&MSet::vector_space(2, 2)));
        let c = MSet::singleton(lv(1)).coproduct(&MSet::singleton(lv(1)));
        assert_eq!(c, MSet::trivial(lv(1), 2));
        let s = MSet::regular(lv(6));
        assert!(s.product(&MSet::singleton(lv(1))).is_isomorphic(&s));
        // mixed levels lift to the lcm
        assert_eq!(MSet::regular(lv(2)).product(&MSet::regular(lv(3))).level(), lv(6));
    }

    #[test]
    fn zero_image_and_conjugation() {
        assert_eq!(MSet::regular(lv(7)).zero_image(), vec![0]);
        assert_eq!(MSet::vector_space(2, 2).zero_image(), vec![0]);
        let c = MSet::regular(lv(5)).psi_minus_one();
        assert_eq!(c[1], 4);
        assert_eq!(c[2], 3);
        assert!((0..5).all(|s| c[c[s]] == s));
    }

    #[test]
    fn minimal_level_examples() {
        assert_eq!(MSet::trivial(lv(6), 3).minimal_level().level(), lv(1));
        let lifted = MSet::regular(lv(4)).lift(lv(8)).unwrap();
        assert_eq!(lifted.minimal_level(), MSet::regular(lv(4)));
        assert_eq!(MSet::regular(lv(4)).minimal_level().level(), lv(4));
    }

    #[test]
    fn image_examples() {
        let s = MSet::regular(lv(4));
        let id = MSetMap::identity(&s);
        assert_eq!(id.image().image, s);

        // 0 is fixed by everything, so the constant map to it is equivariant
        let t = MSet::regular(lv(3));
        let f = MSetMap::new(&s, &t, vec![0; 4]).unwrap();
        assert_eq!(f.image().image.size(), 1);
        assert_eq!(f.source().level(), lv(12));
        assert!(MSetMap::new(&s, &t, vec![1; 4]).is_err());
    }

    #[test]
    fn constant_map_to_fixed_point() {
        let s = MSet::regular(lv(4));
        let t = MSet::regular(lv(4));
        let f = MSetMap::new(&s, &t, vec![0; 4]).unwrap();
        let im = f.image();
        assert_eq!(im.image.size(), 1);
        assert!(im.surjection.is_surjective());
        assert!(im.injection.is_injective());
    }

    #[test]
    fn free_cover_surjects() {
        let s = MSet::vector_space(2, 2);
        let cover = MSetMap::free_cover(&s);
        assert_eq!(cover.source().size(), 8);
        assert!(cover.is_surjective());
        assert_eq!(cover.image().image, s);
    }

    #[test]
    fn isomorphism_search() {
        let a = MSet::regular(lv(2)).coproduct(&MSet::singleton(lv(2)));
        let b = MSet::singleton(lv(2)).coproduct(&MSet::regular(lv(2)));
        let f = a.isomorphism(&b).unwrap();
        assert!(MSetMap::new(&a, &b, f).is_ok());
        assert!(!MSet::regular(lv(4)).is_isomorphic(&MSet::trivial(lv(4), 4)));
        assert!(MSet::empty(lv(3)).is_isomorphic(&MSet::empty(lv(1))));
    }
}
