//! Deciding whether an action of `Ẑ* × N'` on a finite set factors through
//! the multiplicative monoid `Ẑ°`, i.e. through some `Z/r`.
//!
//! A presentation gives the unit action at a finite level `c` and the maps
//! of finitely many exceptional primes. Every other prime `p` acts as the
//! unit `p mod c`.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::{divisors, factorize, is_prime, lcm_all, prime_divisors, primes_up_to, units};
use crate::error::{Error, Result};
use crate::monoid::{Level, MSet};

/// A self-map of `0..n` as its value table.
pub type PointMap = Vec<usize>;

/// `f ∘ g`
pub fn compose(f: &[usize], g: &[usize]) -> PointMap {
    g.iter().map(|&x| f[x]).collect()
}

fn identity(n: usize) -> PointMap {
    (0..n).collect()
}

fn image_set(f: &[usize]) -> BTreeSet<usize> {
    f.iter().copied().collect()
}

/// Finite presentation of an action of `Ẑ* × N'` on `0..size`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobActionPresentation {
    size: usize,
    c: u64,
    unit_action: BTreeMap<u64, PointMap>,
    exceptional: BTreeMap<u64, PointMap>,
}

impl FrobActionPresentation {
    /// Validate a presentation. Unit keys are read modulo `c`; an empty
    /// `unit_action` means every unit acts trivially.
    pub fn new(
        size: usize,
        c: u64,
        unit_action: BTreeMap<u64, PointMap>,
        exceptional: BTreeMap<u64, PointMap>,
    ) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidPresentation(msg));
        if c == 0 {
            return bad("c must be positive".into());
        }
        let us = units(c);
        let mut ua = BTreeMap::new();
        if unit_action.is_empty() {
            for &u in &us {
                ua.insert(u, identity(size));
            }
        } else {
            for (u, perm) in unit_action {
                let key = u % c;
                if key.gcd(&c) != 1 {
                    return bad(format!("{u} is not a unit mod {c}"));
                }
                if ua.insert(key, perm).is_some() {
                    return bad(format!("unit {key} given twice"));
                }
            }
        }
        for &u in &us {
            let Some(perm) = ua.get(&u) else {
                return bad(format!("missing action of unit {u}"));
            };
            if perm.len() != size || image_set(perm).len() != size || perm.iter().any(|&x| x >= size) {
                return bad(format!("unit {u} does not act by a permutation of {size} points"));
            }
        }
        if ua[&(1 % c)] != identity(size) {
            return bad("unit 1 must act as the identity".into());
        }
        for &u in &us {
            for &v in &us {
                if compose(&ua[&u], &ua[&v]) != ua[&((u * v) % c)] {
                    return bad(format!("units {u} and {v} do not compose"));
                }
            }
        }
        for (&p, f) in &exceptional {
            if !is_prime(p) {
                return bad(format!("exceptional key {p} is not prime"));
            }
            if f.len() != size || f.iter().any(|&x| x >= size) {
                return bad(format!("map of prime {p} is not a self-map of {size} points"));
            }
            for (&u, g) in &ua {
                if compose(f, g) != compose(g, f) {
                    return bad(format!("prime {p} does not commute with unit {u}"));
                }
            }
            for (&q, g) in &exceptional {
                if q > p && compose(f, g) != compose(g, f) {
                    return bad(format!("primes {p} and {q} do not commute"));
                }
            }
        }
        for p in prime_divisors(c) {
            if !exceptional.contains_key(&p) {
                return bad(format!("prime {p} divides c = {c} but is not listed"));
            }
        }
        Ok(FrobActionPresentation {
            size,
            c,
            unit_action: ua,
            exceptional,
        })
    }

    /// The trivial presentation on `n` points.
    pub fn trivial(n: usize) -> Self {
        Self::new(n, 1, BTreeMap::new(), BTreeMap::new()).expect("trivial presentation")
    }

    /// Restriction of a `(Z/r)°`-set along `Ẑ* × N' -> Z/r`.
    pub fn from_mset(s: &MSet) -> Self {
        let r = s.level().get();
        let unit_action = units(r).into_iter().map(|u| (u, s.row(u).to_vec())).collect();
        let exceptional = prime_divisors(r).into_iter().map(|p| (p, s.row(p).to_vec())).collect();
        Self::new(s.size(), r, unit_action, exceptional).expect("restriction of a valid set")
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn unit_action(&self) -> &BTreeMap<u64, PointMap> {
        &self.unit_action
    }

    pub fn exceptional(&self) -> &BTreeMap<u64, PointMap> {
        &self.exceptional
    }

    /// Action of an integer unit `u` (coprime to `c`) through `(Z/c)*`.
    pub fn unit(&self, u: u64) -> &PointMap {
        &self.unit_action[&(u % self.c)]
    }

    /// Action of a single prime.
    pub fn prime_map(&self, p: u64) -> &PointMap {
        self.exceptional.get(&p).unwrap_or_else(|| self.unit(p))
    }

    /// `ψ_n`, extended multiplicatively from the primes.
    pub fn psi(&self, n: u64) -> PointMap {
        assert!(n >= 1, "psi is defined on positive integers");
        let mut acc = identity(self.size);
        for (p, e) in factorize(n) {
            let f = self.prime_map(p);
            for _ in 0..e {
                acc = compose(f, &acc);
            }
        }
        acc
    }

    /// Action of `(u, n)` with `u` a unit.
    pub fn act(&self, u: u64, n: u64) -> PointMap {
        compose(self.unit(u), &self.psi(n))
    }

    fn subset_of(&self, n: u64) -> BTreeSet<usize> {
        image_set(&self.psi(n))
    }

    /// Smallest divisor `k` of `c` such that units `≡ 1 mod k` fix `subset`
    /// pointwise.
    fn conductor_on(&self, subset: &BTreeSet<usize>) -> u64 {
        let us = units(self.c);
        divisors(self.c)
            .into_iter()
            .find(|&k| {
                us.iter()
                    .filter(|&&u| u % k == 1 % k)
                    .all(|&u| subset.iter().all(|&s| self.unit(u)[s] == s))
            })
            .expect("k = c always qualifies")
    }

    /// A unit mod `c` reducing to `p` mod `k`, for `k | c` and `gcd(p, k) = 1`.
    fn unit_lifting(&self, p: u64, k: u64) -> u64 {
        units(self.c)
            .into_iter()
            .find(|&u| u % k == p % k)
            .expect("(Z/c)* surjects onto (Z/k)*")
    }

    /// Stabilization exponents, `r0`, the subsets `dT` and their conductors.
    pub fn stabilization(&self) -> StabilizationData {
        let mut exponents = BTreeMap::new();
        for &p in self.exceptional.keys() {
            let mut a = 0u32;
            let mut current = self.subset_of(1);
            loop {
                let next = self.subset_of(p.pow(a + 1));
                if next == current {
                    break;
                }
                current = next;
                a += 1;
            }
            exponents.insert(p, a);
        }
        let r0 = exponents.iter().map(|(&p, &a)| p.pow(a)).product();
        let mut images = BTreeMap::new();
        let mut conductors = BTreeMap::new();
        for d in divisors(r0) {
            let sub = self.subset_of(d);
            conductors.insert(d, self.conductor_on(&sub));
            images.insert(d, sub.into_iter().collect());
        }
        StabilizationData {
            exponents,
            r0,
            images,
            conductors,
        }
    }

    /// Decide whether the action factors through some `Z/r`.
    pub fn check_factors(&self) -> Verdict {
        let stab = self.stabilization();
        for (&d, sub) in &stab.images {
            let c_d = stab.conductors[&d];
            let sub_set: BTreeSet<usize> = sub.iter().copied().collect();
            for (&p, f) in &self.exceptional {
                let moved: BTreeSet<usize> = sub.iter().map(|&s| f[s]).collect();
                if moved != sub_set {
                    continue;
                }
                if p.gcd(&c_d) != 1 {
                    return Verdict::DoesNotFactor(Witness {
                        d,
                        p,
                        c_d,
                        clause: Clause::NotCoprime,
                        point: None,
                    });
                }
                let u = self.unit_lifting(p, c_d);
                let g = self.unit(u);
                if let Some(&s) = sub.iter().find(|&&s| f[s] != g[s]) {
                    return Verdict::DoesNotFactor(Witness {
                        d,
                        p,
                        c_d,
                        clause: Clause::ActionDiffers,
                        point: Some(s),
                    });
                }
            }
        }
        let r = lcm_all(
            [self.c, stab.r0]
                .into_iter()
                .chain(stab.conductors.iter().map(|(&d, &c_d)| d * c_d)),
        );
        match self.build_mset(r) {
            Ok(mset) => Verdict::Factors { r, mset },
            Err(e) => panic!("criterion accepted but the table is not an action: {e}"),
        }
    }

    /// The `(Z/r)°`-set obtained by letting the residue `a = u·n` act as the
    /// unit `u` after `ψ_n`, where `n` collects the primes of `a` dividing `r`.
    pub fn build_mset(&self, r: u64) -> Result<MSet> {
        let level = Level::new(r)?;
        if !r.is_multiple_of(self.c) {
            return Err(Error::InconsistentPresentation(format!(
                "c = {} does not divide r = {r}",
                self.c
            )));
        }
        let rp = prime_divisors(r);
        let table = (0..r)
            .map(|a| {
                let rep = if a == 0 { r } else { a };
                let n: u64 = rp.iter().map(|&p| p.pow(crate::arith::valuation(rep, p))).product();
                self.act(rep / n, n)
            })
            .collect();
        let mset =
            MSet::with_size(level, self.size, table).map_err(|e| Error::InconsistentPresentation(e.to_string()))?;
        if !self.is_restriction_of(&mset) {
            return Err(Error::InconsistentPresentation(format!(
                "level-{r} table does not restrict to the presentation"
            )));
        }
        Ok(mset)
    }

    /// Whether `s`, restricted along `Ẑ* × N' -> Z/r`, is this presentation.
    pub fn is_restriction_of(&self, s: &MSet) -> bool {
        if s.size() != self.size {
            return false;
        }
        let r = s.level().get();
        let l = r.lcm(&self.c);
        let units_ok = units(l).into_iter().all(|u| s.row(u) == self.unit(u).as_slice());
        let primes: BTreeSet<u64> = prime_divisors(r)
            .into_iter()
            .chain(self.exceptional.keys().copied())
            .collect();
        units_ok && primes.into_iter().all(|p| s.row(p) == self.prime_map(p).as_slice())
    }

    /// Exhaustive search over levels `1..=r_max` for a monoid map
    /// `Z/r -> Map(T, T)` compatible with the presentation.
    ///
    /// Such a map is pinned down on the images of the generators (all units
    /// mod `lcm(r, c)` and all primes up to a bound, which includes every
    /// prime dividing `r`, `c` or an exceptional prime); the search closes
    /// those assignments under multiplication and rejects `r` on the first
    /// conflict. This does not use any of the stabilization data.
    pub fn brute_force_factor(&self, r_max: u64) -> Option<(u64, MSet)> {
        (1..=r_max).find_map(|r| self.brute_force_at(r).map(|m| (r, m)))
    }

    fn brute_force_at(&self, r: u64) -> Option<MSet> {
        let l = r.lcm(&self.c);
        let mut table: Vec<Option<PointMap>> = vec![None; r as usize];
        let assign = |table: &mut Vec<Option<PointMap>>, a: u64, f: PointMap| -> bool {
            let slot = &mut table[(a % r) as usize];
            match slot {
                Some(g) => *g == f,
                None => {
                    *slot = Some(f);
                    true
                }
            }
        };
        for u in units(l) {
            if !assign(&mut table, u, self.unit(u).clone()) {
                return None;
            }
        }
        let bound = r
            .max(self.c)
            .max(self.exceptional.keys().copied().max().unwrap_or(0))
            .max(13);
        for p in primes_up_to(bound) {
            if !assign(&mut table, p, self.prime_map(p).clone()) {
                return None;
            }
        }
        // close under products until nothing new appears
        loop {
            let known: Vec<(u64, PointMap)> = table
                .iter()
                .enumerate()
                .filter_map(|(a, f)| f.clone().map(|f| (a as u64, f)))
                .collect();
            let before = known.len();
            for (a, f) in &known {
                for (b, g) in &known {
                    if !assign(&mut table, a * b, compose(f, g)) {
                        return None;
                    }
                }
            }
            if table.iter().filter(|f| f.is_some()).count() == before {
                break;
            }
        }
        let rows: Option<Vec<PointMap>> = table.into_iter().collect();
        let mset = MSet::with_size(Level::new(r).ok()?, self.size, rows?).ok()?;
        self.is_restriction_of(&mset).then_some(mset)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizationData {
    /// `a_p` for every exceptional prime (non-exceptional primes have `a_p = 0`).
    pub exponents: BTreeMap<u64, u32>,
    pub r0: u64,
    /// `dT` for each `d | r0`, sorted.
    pub images: BTreeMap<u64, Vec<usize>>,
    /// `c_d` for each `d | r0`.
    pub conductors: BTreeMap<u64, u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// `p` permutes `dT` but shares a factor with `c_d`.
    NotCoprime,
    /// `p` permutes `dT` but differs there from the unit `p mod c_d`.
    ActionDiffers,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub d: u64,
    pub p: u64,
    pub c_d: u64,
    pub clause: Clause,
    pub point: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Factors { r: u64, mset: MSet },
    DoesNotFactor(Witness),
}

impl Verdict {
    pub fn factors(&self) -> bool {
        matches!(self, Verdict::Factors { .. })
    }

    pub fn to_json(&self) -> Value {
        match self {
            Verdict::Factors { r, mset } => json!({"factors": true, "r": r, "mset": mset}),
            Verdict::DoesNotFactor(w) => json!({
                "factors": false,
                "witness": {"d": w.d, "p": w.p, "c_d": w.c_d, "clause": w.clause, "point": w.point},
            }),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PresentationJson {
    size: usize,
    c: u64,
    #[serde(default)]
    unit_action: BTreeMap<String, PointMap>,
    #[serde(default)]
    exceptional: BTreeMap<String, PointMap>,
}

fn parse_keys(m: BTreeMap<String, PointMap>) -> Result<BTreeMap<u64, PointMap>> {
    m.into_iter()
        .map(|(k, v)| {
            k.trim()
                .parse::<u64>()
                .map(|k| (k, v))
                .map_err(|_| Error::Decode(format!("bad key {k:?}")))
        })
        .collect()
}

impl FrobActionPresentation {
    pub fn from_json(v: &Value) -> Result<Self> {
        let raw: PresentationJson = serde_json::from_value(v.clone()).map_err(|e| Error::Decode(e.to_string()))?;
        Self::new(
            raw.size,
            raw.c,
            parse_keys(raw.unit_action)?,
            parse_keys(raw.exceptional)?,
        )
    }

    pub fn to_json(&self) -> Value {
        let keyed = |m: &BTreeMap<u64, PointMap>| -> BTreeMap<String, PointMap> {
            m.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
        };
        json!({
            "size": self.size,
            "c": self.c,
            "unit_action": keyed(&self.unit_action),
            "exceptional": keyed(&self.exceptional),
        })
    }
}

/// Every presentation with `|T| <= max_size`, `c` in `levels`, and
/// exceptional primes a subset of `primes` containing the primes of `c`.
pub fn exhaustive_corpus(max_size: usize, levels: &[u64], primes: &[u64]) -> Vec<FrobActionPresentation> {
    let mut out = Vec::new();
    for n in 0..=max_size {
        let maps = all_maps(n);
        let perms: Vec<PointMap> = maps.iter().filter(|f| image_set(f).len() == n).cloned().collect();
        for &c in levels {
            let us = units(c);
            let unit_choices = cartesian(&vec![perms.clone(); us.len()]);
            for mask in 0..(1u32 << primes.len()) {
                let chosen: Vec<u64> = (0..primes.len())
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| primes[i])
                    .collect();
                if prime_divisors(c).iter().any(|p| !chosen.contains(p)) {
                    continue;
                }
                let exc_choices = cartesian(&vec![maps.clone(); chosen.len()]);
                for uc in &unit_choices {
                    let ua: BTreeMap<u64, PointMap> = us.iter().copied().zip(uc.iter().cloned()).collect();
                    for ec in &exc_choices {
                        let ex = chosen.iter().copied().zip(ec.iter().cloned()).collect();
                        if let Ok(p) = FrobActionPresentation::new(n, c, ua.clone(), ex) {
                            out.push(p);
                        }
                    }
                }
            }
        }
    }
    out
}

fn all_maps(n: usize) -> Vec<PointMap> {
    cartesian(&vec![(0..n).collect::<Vec<_>>(); n])
}

fn cartesian<T: Clone>(choices: &[Vec<T>]) -> Vec<Vec<T>> {
    choices.iter().fold(vec![Vec::new()], |acc, opts| {
        acc.into_iter()
            .flat_map(|prefix| {
                opts.iter().map(move |o| {
                    let mut v = prefix.clone();
                    v.push(o.clone());
                    v
                })
            })
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap_presentation() -> FrobActionPresentation {
        FrobActionPresentation::new(2, 1, BTreeMap::new(), BTreeMap::from([(2, vec![1, 0])])).unwrap()
    }

    /// Characters of `(Z/2)^2`; doubling sends everything to the origin.
    fn character_set() -> FrobActionPresentation {
        FrobActionPresentation::new(4, 1, BTreeMap::new(), BTreeMap::from([(2, vec![0; 4])])).unwrap()
    }

    #[test]
    fn psi_examples() {
        let p = FrobActionPresentation::new(
            2,
            1,
            BTreeMap::new(),
            BTreeMap::from([(2, vec![1, 0]), (3, vec![0, 1])]),
        )
        .unwrap();
        assert_eq!(p.psi(1), vec![0, 1]);
        assert_eq!(p.psi(4), vec![0, 1]);
        assert_eq!(p.psi(6), vec![1, 0]);
        for m in 1..20 {
            for n in 1..20 {
                assert_eq!(p.psi(m * n), compose(&p.psi(m), &p.psi(n)));
            }
        }
    }

    #[test]
    fn validation_errors() {
        // 2 divides c but is not listed
        let e = FrobActionPresentation::new(1, 2, BTreeMap::new(), BTreeMap::new());
        assert!(matches!(e, Err(Error::InvalidPresentation(_))));
        // non-commuting exceptional primes
        let e = FrobActionPresentation::new(
            2,
            1,
            BTreeMap::new(),
            BTreeMap::from([(2, vec![1, 0]), (3, vec![0, 0])]),
        );
        assert!(e.is_err());
        let e = FrobActionPresentation::new(1, 1, BTreeMap::new(), BTreeMap::from([(4, vec![0])]));
        assert!(e.is_err());
        // unit 3 mod 4 acting by a non-involution on 3 points
        let e = FrobActionPresentation::new(
            3,
            4,
            BTreeMap::from([(1, vec![0, 1, 2]), (3, vec![1, 2, 0])]),
            BTreeMap::from([(2, vec![0, 1, 2])]),
        );
        assert!(e.is_err());
    }

    #[test]
    fn stabilization_examples() {
        let bij = swap_presentation().stabilization();
        assert_eq!(bij.r0, 1);
        assert_eq!(bij.images.keys().copied().collect::<Vec<_>>(), vec![1]);

        let chars = character_set().stabilization();
        assert_eq!(chars.exponents[&2], 1);
        assert_eq!(chars.r0, 2);
        assert_eq!(chars.images[&2], vec![0]);
        assert_eq!(chars.conductors[&1], 1);
        assert_eq!(chars.conductors[&2], 1);

        // (Z/4)* acting on itself, 2 swaps the two points
        let faithful = FrobActionPresentation::new(
            2,
            4,
            BTreeMap::from([(1, vec![0, 1]), (3, vec![1, 0])]),
            BTreeMap::from([(2, vec![1, 0])]),
        )
        .unwrap();
        assert_eq!(faithful.stabilization().conductors[&1], 4);
    }

    #[test]
    fn check_factors_examples() {
        match swap_presentation().check_factors() {
            Verdict::DoesNotFactor(w) => {
                assert_eq!((w.d, w.p, w.c_d), (1, 2, 1));
                assert_eq!(w.clause, Clause::ActionDiffers);
            }
            v => panic!("expected failure, got {v:?}"),
        }
        match character_set().check_factors() {
            Verdict::Factors { r, mset } => {
                assert_eq!(r, 2);
                assert!(mset.is_isomorphic(&MSet::vector_space(2, 2)));
            }
            v => panic!("expected success, got {v:?}"),
        }
        match FrobActionPresentation::trivial(3).check_factors() {
            Verdict::Factors { r, mset } => {
                assert_eq!(r, 1);
                assert_eq!(mset, MSet::trivial(Level::new(1).unwrap(), 3));
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn build_mset_round_trip() {
        let reg6 = MSet::regular(Level::new(6).unwrap());
        let pres = FrobActionPresentation::from_mset(&reg6);
        let Verdict::Factors { r, mset } = pres.check_factors() else {
            panic!("regular set must factor");
        };
        assert_eq!(r % 6, 0);
        assert_eq!(mset.minimal_level(), reg6);
        assert!(pres.build_mset(5).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let (r, m) = FrobActionPresentation::trivial(2).brute_force_factor(1).unwrap();
        assert_eq!((r, m.size()), (1, 2));
        assert!(swap_presentation().brute_force_factor(36).is_none());
        let (r, m) = character_set().brute_force_factor(4).unwrap();
        assert_eq!(r, 2);
        assert_eq!(m, MSet::vector_space(2, 2));
    }

    #[test]
    fn json_round_trip() {
        let v: Value =
            serde_json::from_str(r#"{"size": 2, "c": 1, "unit_action": {}, "exceptional": {"2": [1, 0]}}"#).unwrap();
        let p = FrobActionPresentation::from_json(&v).unwrap();
        assert_eq!(p, swap_presentation());
        assert_eq!(FrobActionPresentation::from_json(&p.to_json()).unwrap(), p);
        let verdict = p.check_factors().to_json();
        assert_eq!(verdict["factors"], json!(false));
        assert_eq!(verdict["witness"]["c_d"], json!(1));
    }
}
