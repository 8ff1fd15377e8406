//! Local arithmetic at a place of Q: square classes of Q_v and Hilbert symbols.
//!
//! Square classes of rationals are decided exactly from the valuation parity
//! and the unit residue (mod p for odd p, mod 8 for p = 2, sign at infinity).

pub mod oracle;
pub mod padic;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::Rational;
use crate::error::ArithError;
use crate::f2::F2Vec;
use crate::factor::pow_mod;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalPlace {
    Infinite,
    Finite(u64),
}

impl LocalPlace {
    pub fn prime(&self) -> Option<u64> {
        match self {
            LocalPlace::Infinite => None,
            LocalPlace::Finite(p) => Some(*p),
        }
    }

    /// Dimension of Q_v*/(Q_v*)^2 over GF(2).
    pub fn class_rank(&self) -> usize {
        match self {
            LocalPlace::Infinite => 1,
            LocalPlace::Finite(2) => 3,
            LocalPlace::Finite(_) => 2,
        }
    }

    pub fn parse(s: &str) -> Option<LocalPlace> {
        let s = s.trim();
        match s {
            "inf" | "infinity" | "oo" | "∞" => Some(LocalPlace::Infinite),
            _ => s
                .parse::<u64>()
                .ok()
                .filter(|p| crate::factor::is_prime_u64(*p))
                .map(LocalPlace::Finite),
        }
    }
}

impl fmt::Display for LocalPlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalPlace::Infinite => f.write_str("inf"),
            LocalPlace::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for LocalPlace {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LocalPlace {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        LocalPlace::parse(&s).ok_or_else(|| D::Error::custom(format!("not a place: {s:?}")))
    }
}

/// Element of Q_v*/(Q_v*)^2 in F2 coordinates.
///
/// Bit layout: odd p uses (valuation parity, unit is a non-residue);
/// p = 2 uses (valuation parity, unit = 3 mod 4, unit = ±3 mod 8);
/// the real place uses a single sign bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LocalSquareClass {
    place: LocalPlace,
    bits: u8,
}

fn legendre_bit(u: u64, p: u64) -> bool {
    debug_assert!(u % p != 0);
    pow_mod(u, (p - 1) / 2, p) != 1
}

/// Strip all factors `p` from `n`, returning (count, remaining).
pub(crate) fn split_valuation(n: &BigInt, p: u64) -> (i64, BigInt) {
    let big_p = BigInt::from(p);
    let mut rest = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = rest.div_rem(&big_p);
        if !r.is_zero() {
            break;
        }
        rest = q;
        v += 1;
    }
    (v, rest)
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(x: &Rational, p: u64) -> i64 {
    split_valuation(x.numer(), p).0 - split_valuation(x.denom(), p).0
}

impl LocalSquareClass {
    pub fn trivial(place: LocalPlace) -> Self {
        LocalSquareClass { place, bits: 0 }
    }

    pub fn from_bits(place: LocalPlace, bits: u8) -> Self {
        let mask = (1u8 << place.class_rank()) - 1;
        LocalSquareClass {
            place,
            bits: bits & mask,
        }
    }

    /// Class of `p^val * unit`, where `unit` is a nonzero integer prime to p.
    pub(crate) fn from_parts(place: LocalPlace, odd_valuation: bool, unit: &BigInt) -> Self {
        match place {
            LocalPlace::Infinite => LocalSquareClass {
                place,
                bits: unit.is_negative() as u8,
            },
            LocalPlace::Finite(2) => {
                let u = unit.mod_floor(&BigInt::from(8)).to_u64().unwrap();
                debug_assert!(u % 2 == 1);
                let eps = (u % 4 == 3) as u8;
                let omega = (u == 3 || u == 5) as u8;
                LocalSquareClass {
                    place,
                    bits: odd_valuation as u8 | eps << 1 | omega << 2,
                }
            }
            LocalPlace::Finite(p) => {
                let u = unit.mod_floor(&BigInt::from(p)).to_u64().unwrap();
                LocalSquareClass {
                    place,
                    bits: odd_valuation as u8 | (legendre_bit(u, p) as u8) << 1,
                }
            }
        }
    }

    pub fn of(x: &Rational, place: LocalPlace) -> Result<Self, ArithError> {
        if x.is_zero() {
            return Err(ArithError::Zero);
        }
        Ok(match place {
            LocalPlace::Infinite => LocalSquareClass {
                place,
                bits: x.is_negative() as u8,
            },
            LocalPlace::Finite(p) => {
                let (vn, un) = split_valuation(x.numer(), p);
                let (vd, ud) = split_valuation(x.denom(), p);
                // n/d and n*d differ by the square d^2.
                Self::from_parts(place, (vn - vd).rem_euclid(2) == 1, &(un * ud))
            }
        })
    }

    pub fn place(&self) -> LocalPlace {
        self.place
    }

    pub fn bits(&self) -> u8 {
        self.bits
    }

    pub fn is_trivial(&self) -> bool {
        self.bits == 0
    }

    pub fn odd_valuation(&self) -> bool {
        self.place != LocalPlace::Infinite && self.bits & 1 == 1
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.place, other.place, "square classes at different places");
        LocalSquareClass {
            place: self.place,
            bits: self.bits ^ other.bits,
        }
    }

    pub fn coordinates(&self) -> F2Vec {
        F2Vec::from_bits((0..self.place.class_rank()).map(|i| (self.bits >> i) & 1 == 1))
    }

    /// All classes at a place, in bit order.
    pub fn all(place: LocalPlace) -> Vec<Self> {
        (0..1u8 << place.class_rank())
            .map(|bits| LocalSquareClass { place, bits })
            .collect()
    }

    /// Small integer representative: a sign at infinity; `p^e * u` otherwise,
    /// with `u` in {1, -1, 3, -3} at 2 and, at odd p, `u = 1` or the
    /// non-residue -1 (p = 3 mod 4) or the least positive non-residue.
    pub fn representative(&self) -> BigInt {
        match self.place {
            LocalPlace::Infinite => BigInt::from(if self.bits == 1 { -1 } else { 1 }),
            LocalPlace::Finite(2) => {
                let unit: i64 = match (self.bits >> 1) & 3 {
                    0 => 1,
                    1 => -1,
                    2 => -3,
                    _ => 3,
                };
                BigInt::from(unit) * if self.bits & 1 == 1 { 2 } else { 1 }
            }
            LocalPlace::Finite(p) => {
                let unit = if self.bits & 2 == 0 {
                    BigInt::from(1)
                } else if p % 4 == 3 {
                    BigInt::from(-1)
                } else {
                    let q = (2..p).find(|&q| legendre_bit(q, p)).unwrap();
                    BigInt::from(q)
                };
                if self.bits & 1 == 1 {
                    unit * BigInt::from(p)
                } else {
                    unit
                }
            }
        }
    }
}

impl fmt::Display for LocalSquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.representative())
    }
}

/// Square class of a nonzero rational in Q_v.
pub fn local_square_class(x: &Rational, place: LocalPlace) -> Result<LocalSquareClass, ArithError> {
    LocalSquareClass::of(x, place)
}

pub fn is_local_square(x: &Rational, place: LocalPlace) -> bool {
    LocalSquareClass::of(x, place).map(|c| c.is_trivial()).unwrap_or(false)
}

/// Hilbert symbol of two local square classes at the same place.
pub fn hilbert_symbol_classes(a: &LocalSquareClass, b: &LocalSquareClass) -> i8 {
    assert_eq!(a.place, b.place, "Hilbert symbol across places");
    let bit = |c: &LocalSquareClass, i: u8| (c.bits >> i) & 1;
    let exponent = match a.place {
        LocalPlace::Infinite => bit(a, 0) & bit(b, 0),
        LocalPlace::Finite(2) => {
            (bit(a, 1) & bit(b, 1)) ^ (bit(a, 0) & bit(b, 2)) ^ (bit(b, 0) & bit(a, 2))
        }
        LocalPlace::Finite(p) => {
            let eps = (p % 4 == 3) as u8;
            (bit(a, 0) & bit(b, 0) & eps) ^ (bit(a, 0) & bit(b, 1)) ^ (bit(b, 0) & bit(a, 1))
        }
    };
    if exponent == 1 {
        -1
    } else {
        1
    }
}

/// Hilbert symbol (a, b)_v: +1 iff z^2 = a x^2 + b y^2 has a nonzero solution over Q_v.
pub fn hilbert_symbol(a: &Rational, b: &Rational, place: LocalPlace) -> Result<i8, ArithError> {
    Ok(hilbert_symbol_classes(
        &LocalSquareClass::of(a, place)?,
        &LocalSquareClass::of(b, place)?,
    ))
}

/// Signature of a pluggable Hilbert-symbol evaluator on square classes.
pub type HilbertFn = fn(&LocalSquareClass, &LocalSquareClass) -> i8;
