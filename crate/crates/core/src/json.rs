//! JSON encodings. Big integers and rationals travel as decimal strings.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::GroupAlgebraElt;
use crate::error::{Error, Result};
use crate::scalar::{Int, Rat};

pub fn int_to_string(x: &Int) -> String {
    x.to_string()
}

pub fn int_from_str(s: &str) -> Result<Int> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|e| Error::Decode(format!("bad integer {s:?}: {e}")))
}

/// `[numerator, denominator]`
pub fn rat_to_pair(x: &Rat) -> [String; 2] {
    [x.numer().to_string(), x.denom().to_string()]
}

pub fn rat_from_pair(p: &[String; 2]) -> Result<Rat> {
    let (n, d) = (int_from_str(&p[0])?, int_from_str(&p[1])?);
    if d == BigInt::from(0) {
        return Err(Error::Decode("zero denominator".into()));
    }
    Ok(Rat::new(n, d))
}

/// Compact `"n"` or `"n/d"` form, used in dumps meant for humans and golden files.
pub fn rat_to_string(x: &Rat) -> String {
    x.to_string()
}

#[derive(Serialize, Deserialize)]
pub(crate) struct GroupAlgebraJson {
    r: u64,
    coeffs: Vec<[String; 2]>,
}

impl TryFrom<GroupAlgebraJson> for GroupAlgebraElt {
    type Error = Error;
    fn try_from(j: GroupAlgebraJson) -> Result<Self> {
        let coeffs = j.coeffs.iter().map(rat_from_pair).collect::<Result<Vec<_>>>()?;
        GroupAlgebraElt::new(j.r, coeffs)
    }
}

impl From<GroupAlgebraElt> for GroupAlgebraJson {
    fn from(e: GroupAlgebraElt) -> Self {
        GroupAlgebraJson {
            r: e.level(),
            coeffs: e.coeffs().iter().map(rat_to_pair).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn group_algebra_json_shape() {
        let e = GroupAlgebraElt::new(2, vec![ratio(1, 2), ratio(-3, 1)]).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"r":2,"coeffs":[["1","2"],["-3","1"]]}"#);
        let back: GroupAlgebraElt = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<GroupAlgebraElt>(r#"{"r":3,"coeffs":[["1","1"]]}"#).is_err());
        assert!(serde_json::from_str::<GroupAlgebraElt>(r#"{"r":1,"coeffs":[["1","0"]]}"#).is_err());
    }
}
