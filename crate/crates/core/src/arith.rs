//! Rationals, global square classes and the group Q(S, 2).

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ArithError;
use crate::f2::F2Vec;
use crate::factor::factorize;
use crate::localfield::{split_valuation, LocalPlace, LocalSquareClass};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"a"` or `"a/b"` with integer `a`, `b`.
pub fn parse_rational(s: &str) -> Result<Rational, ArithError> {
    let err = || ArithError::Parse(s.to_string());
    let t = s.trim();
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
        None => BigInt::from_str(t).map(Rational::from_integer).map_err(|_| err()),
    }
}

pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Exact square root of a rational, if it has one.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

/// Serde adapter writing a rational as a string such as `"-3/4"`.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// A class in Q*/(Q*)^2, stored as its squarefree integer representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SquareClass {
    negative: bool,
    primes: Vec<u64>,
}

impl SquareClass {
    pub fn one() -> Self {
        SquareClass::default()
    }

    pub fn minus_one() -> Self {
        SquareClass {
            negative: true,
            primes: Vec::new(),
        }
    }

    pub fn prime(p: u64) -> Self {
        SquareClass {
            negative: false,
            primes: vec![p],
        }
    }

    pub fn from_parts(negative: bool, mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        primes.dedup();
        SquareClass { negative, primes }
    }

    pub fn of(q: &Rational) -> Result<Self, ArithError> {
        squarefree_reduce(q)
    }

    pub fn of_int(n: i64) -> Self {
        squarefree_reduce(&int(n)).expect("small nonzero integer")
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn is_trivial(&self) -> bool {
        !self.negative && self.primes.is_empty()
    }

    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        let mut primes = Vec::with_capacity(self.primes.len() + other.primes.len());
        let (mut i, mut j) = (0, 0);
        while i < self.primes.len() || j < other.primes.len() {
            match (self.primes.get(i), other.primes.get(j)) {
                (Some(a), Some(b)) if a == b => {
                    i += 1;
                    j += 1;
                }
                (Some(a), Some(b)) if a < b => {
                    primes.push(*a);
                    i += 1;
                }
                (Some(_), Some(b)) => {
                    primes.push(*b);
                    j += 1;
                }
                (Some(a), None) => {
                    primes.push(*a);
                    i += 1;
                }
                (None, Some(b)) => {
                    primes.push(*b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        SquareClass {
            negative: self.negative != other.negative,
            primes,
        }
    }

    pub fn to_integer(&self) -> BigInt {
        let mut n = BigInt::one();
        for p in &self.primes {
            n *= BigInt::from(*p);
        }
        if self.negative {
            -n
        } else {
            n
        }
    }

    pub fn to_rational(&self) -> Rational {
        Rational::from_integer(self.to_integer())
    }

    /// Coordinates with respect to the basis (-1, p_1, ..., p_k) of Q(S, 2).
    pub fn coordinates(&self, places: &PlaceSet) -> Result<F2Vec, ArithError> {
        let mut v = F2Vec::zeros(places.rank());
        v.set(0, self.negative);
        for p in &self.primes {
            let idx = places
                .finite
                .binary_search(p)
                .map_err(|_| ArithError::OutsidePlaceSet(*p))?;
            v.set(idx + 1, true);
        }
        Ok(v)
    }

    pub fn from_coordinates(v: &F2Vec, places: &PlaceSet) -> SquareClass {
        assert_eq!(v.len(), places.rank(), "coordinate length mismatch");
        SquareClass {
            negative: v.get(0),
            primes: places
                .finite
                .iter()
                .enumerate()
                .filter(|(i, _)| v.get(i + 1))
                .map(|(_, p)| *p)
                .collect(),
        }
    }

    /// Image in Q_v*/(Q_v*)^2.
    pub fn localize(&self, place: LocalPlace) -> LocalSquareClass {
        match place {
            LocalPlace::Infinite => {
                LocalSquareClass::from_parts(place, false, &BigInt::from(if self.negative { -1 } else { 1 }))
            }
            LocalPlace::Finite(p) => {
                let n = self.to_integer();
                let (v, unit) = split_valuation(&n, p);
                LocalSquareClass::from_parts(place, v == 1, &unit)
            }
        }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_integer())
    }
}

impl Serialize for SquareClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_integer().to_string())
    }
}

impl<'de> Deserialize<'de> for SquareClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let q = parse_rational(&s).map_err(serde::de::Error::custom)?;
        squarefree_reduce(&q).map_err(serde::de::Error::custom)
    }
}

/// Squarefree representative of the class of a nonzero rational.
pub fn squarefree_reduce(q: &Rational) -> Result<SquareClass, ArithError> {
    if q.is_zero() {
        return Err(ArithError::Zero);
    }
    let odd_primes = |n: &BigInt| -> Result<Vec<u64>, ArithError> {
        let mag: BigUint = n.magnitude().clone();
        Ok(factorize(&mag)?
            .into_iter()
            .filter(|(_, e)| e % 2 == 1)
            .map(|(p, _)| p)
            .collect())
    };
    let a = SquareClass::from_parts(false, odd_primes(q.numer())?);
    let b = SquareClass::from_parts(false, odd_primes(q.denom())?);
    let mut c = a.mul(&b);
    c.negative = q.numer().sign() == Sign::Minus;
    Ok(c)
}

/// A finite set of rational primes together with the real place.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlaceSet {
    finite: Vec<u64>,
}

impl PlaceSet {
    pub fn new<I: IntoIterator<Item = u64>>(primes: I) -> Self {
        let mut finite: Vec<u64> = primes.into_iter().collect();
        finite.sort_unstable();
        finite.dedup();
        PlaceSet { finite }
    }

    pub fn primes(&self) -> &[u64] {
        &self.finite
    }

    pub fn contains_prime(&self, p: u64) -> bool {
        self.finite.binary_search(&p).is_ok()
    }

    /// All places, the real place first and then primes in increasing order.
    pub fn places(&self) -> Vec<LocalPlace> {
        std::iter::once(LocalPlace::Infinite)
            .chain(self.finite.iter().map(|p| LocalPlace::Finite(*p)))
            .collect()
    }

    /// Dimension of Q(S, 2) over GF(2).
    pub fn rank(&self) -> usize {
        1 + self.finite.len()
    }

    /// Basis (-1, p_1, ..., p_k).
    pub fn basis(&self) -> Vec<SquareClass> {
        std::iter::once(SquareClass::minus_one())
            .chain(self.finite.iter().map(|p| SquareClass::prime(*p)))
            .collect()
    }

    pub fn union(&self, other: &PlaceSet) -> PlaceSet {
        PlaceSet::new(self.finite.iter().chain(&other.finite).copied())
    }
}

impl fmt::Display for PlaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{inf")?;
        for p in &self.finite {
            write!(f, ", {p}")?;
        }
        f.write_str("}")
    }
}

/// All elements of Q(S, 2), ordered by their coordinate bitmask.
pub fn enumerate_q_s2(places: &PlaceSet) -> Vec<SquareClass> {
    let r = places.rank();
    assert!(r < 30, "Q(S, 2) too large to enumerate");
    (0u64..1 << r)
        .map(|mask| {
            SquareClass::from_coordinates(&F2Vec::from_bits((0..r).map(|i| (mask >> i) & 1 == 1)), places)
        })
        .collect()
}

/// Primes dividing a nonzero rational.
pub fn prime_support(q: &Rational) -> Result<Vec<u64>, ArithError> {
    let mut out = Vec::new();
    for n in [q.numer(), q.denom()] {
        out.extend(factorize(n.magnitude())?.into_iter().map(|(p, _)| p));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_and_prints() {
        assert_eq!(parse_rational(" -3/6 ").unwrap(), frac(-1, 2));
        assert_eq!(parse_rational("226").unwrap(), int(226));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(fmt_rational(&frac(6, -4)), "-3/2");
    }

    #[test]
    fn squarefree_parts() {
        let q = squarefree_reduce(&frac(-14 * 113 * 113, 9 * 7)).unwrap();
        assert_eq!(q.to_integer(), BigInt::from(-2));
        assert_eq!(SquareClass::of_int(-7 * 113 * 113).to_integer(), BigInt::from(-7));
    }

    #[test]
    fn enumeration_is_a_group() {
        let s = PlaceSet::new([2, 3, 7, 113]);
        let all = enumerate_q_s2(&s);
        assert_eq!(all.len(), 32);
        let set: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), 32);
        for a in &all {
            for b in &all {
                assert!(set.contains(&a.mul(b)));
            }
        }
        assert_eq!(s.places().len(), 5);
    }

    #[test]
    fn serde_as_integer_string() {
        let c = SquareClass::of_int(-791);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, "\"-791\"");
        assert_eq!(serde_json::from_str::<SquareClass>(&json).unwrap(), c);
    }

    proptest! {
        #[test]
        fn class_multiplication_matches_rationals(a in -5000i64..5000, b in -5000i64..5000) {
            prop_assume!(a != 0 && b != 0);
            let ca = SquareClass::of_int(a);
            let cb = SquareClass::of_int(b);
            prop_assert_eq!(ca.mul(&cb), squarefree_reduce(&int(a * b)).unwrap());
        }

        #[test]
        fn localization_agrees_with_direct_class(a in -5000i64..5000) {
            prop_assume!(a != 0);
            let c = SquareClass::of_int(a);
            for place in [LocalPlace::Infinite, LocalPlace::Finite(2), LocalPlace::Finite(3), LocalPlace::Finite(113)] {
                prop_assert_eq!(c.localize(place), LocalSquareClass::of(&int(a), place).unwrap());
            }
        }

        #[test]
        fn coordinates_round_trip(mask in 0u32..32) {
            let s = PlaceSet::new([2, 3, 7, 113]);
            let v = F2Vec::from_bits((0..5).map(|i| (mask >> i) & 1 == 1));
            let c = SquareClass::from_coordinates(&v, &s);
            prop_assert_eq!(c.coordinates(&s).unwrap(), v);
        }
    }
}
