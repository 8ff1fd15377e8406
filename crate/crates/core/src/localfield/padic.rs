//! Fixed-precision p-adic numbers, enough to take square roots and decide
//! squareness in quadratic extensions of Q_p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{split_valuation, LocalPlace, LocalSquareClass};
use crate::arith::Rational;
use crate::error::SearchError;
use crate::factor::pow_mod;

/// `p^shift * digits`, known modulo `p^prec` (absolute precision).
/// When `digits` is zero the number is only known to be divisible by `p^prec`.
#[derive(Clone, Debug)]
pub struct PAdic {
    p: u64,
    shift: i64,
    digits: BigInt,
    prec: i64,
}

fn pow(p: u64, e: i64) -> BigInt {
    BigInt::from(p).pow(e.max(0) as u32)
}

impl PAdic {
    fn normalized(p: u64, shift: i64, digits: BigInt, prec: i64) -> PAdic {
        if shift >= prec {
            return PAdic {
                p,
                shift: prec,
                digits: BigInt::zero(),
                prec,
            };
        }
        let modulus = pow(p, prec - shift);
        let digits = digits.mod_floor(&modulus);
        if digits.is_zero() {
            return PAdic {
                p,
                shift: prec,
                digits,
                prec,
            };
        }
        let (v, unit) = split_valuation(&digits, p);
        PAdic {
            p,
            shift: shift + v,
            digits: unit,
            prec,
        }
    }

    pub fn from_rational(q: &Rational, p: u64, prec: i64) -> PAdic {
        if q.is_zero() {
            return PAdic::normalized(p, prec, BigInt::zero(), prec);
        }
        let (vn, un) = split_valuation(q.numer(), p);
        let (vd, ud) = split_valuation(q.denom(), p);
        let shift = vn - vd;
        let modulus = pow(p, (prec - shift).max(1));
        let inv = ud.mod_floor(&modulus).modinv(&modulus).expect("unit denominator");
        PAdic::normalized(p, shift, un * inv, prec)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// Valuation, or `None` if the number is zero to the known precision.
    pub fn valuation(&self) -> Option<i64> {
        (!self.digits.is_zero()).then_some(self.shift)
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_zero()
    }

    /// Relative precision: how many digits of the unit part are known.
    pub fn relative_precision(&self) -> i64 {
        self.prec - self.shift
    }

    pub fn add(&self, other: &PAdic) -> PAdic {
        assert_eq!(self.p, other.p);
        let prec = self.prec.min(other.prec);
        let shift = self.shift.min(other.shift);
        let a = &self.digits * pow(self.p, self.shift - shift);
        let b = &other.digits * pow(self.p, other.shift - shift);
        PAdic::normalized(self.p, shift, a + b, prec)
    }

    pub fn neg(&self) -> PAdic {
        PAdic::normalized(self.p, self.shift, -&self.digits, self.prec)
    }

    pub fn sub(&self, other: &PAdic) -> PAdic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PAdic) -> PAdic {
        assert_eq!(self.p, other.p);
        if self.is_zero() || other.is_zero() {
            let prec = (self.prec + other.shift).min(other.prec + self.shift);
            return PAdic::normalized(self.p, prec, BigInt::zero(), prec);
        }
        let prec = (self.prec + other.shift).min(other.prec + self.shift);
        PAdic::normalized(self.p, self.shift + other.shift, &self.digits * &other.digits, prec)
    }

    pub fn scale(&self, q: &Rational) -> PAdic {
        self.mul(&PAdic::from_rational(q, self.p, self.prec + 64))
    }

    /// Square class, if enough digits are known to decide it.
    pub fn square_class(&self) -> Option<LocalSquareClass> {
        let need = if self.p == 2 { 3 } else { 1 };
        if self.is_zero() || self.relative_precision() < need {
            return None;
        }
        Some(LocalSquareClass::from_parts(
            LocalPlace::Finite(self.p),
            self.shift.rem_euclid(2) == 1,
            &self.digits,
        ))
    }

    /// A square root, `Ok(None)` if the number is not a square.
    pub fn sqrt(&self) -> Result<Option<PAdic>, SearchError> {
        let class = self
            .square_class()
            .ok_or(SearchError::InsufficientPrecision(self.prec.max(0) as u32))?;
        if !class.is_trivial() {
            return Ok(None);
        }
        let rel = self.relative_precision();
        let half = self.shift / 2;
        let root = if self.p == 2 {
            let modulus = pow(2, rel);
            let u = self.digits.mod_floor(&modulus);
            let mut r = BigInt::one();
            for j in 3..rel {
                let diff: BigInt = (&r * &r - &u).mod_floor(&modulus);
                if diff.bit(j as u64) {
                    r += BigInt::one() << (j - 1);
                }
            }
            // r is determined modulo 2^(rel - 1).
            PAdic::normalized(2, half, r, half + rel - 1)
        } else {
            let modulus = pow(self.p, rel);
            let u = self.digits.mod_floor(&modulus);
            let u0 = u.mod_floor(&BigInt::from(self.p)).to_u64().unwrap();
            let mut r = BigInt::from(sqrt_mod_prime(u0, self.p));
            let mut known = 1;
            while known < rel {
                known = (known * 2).min(rel);
                let m = pow(self.p, known);
                let inv = (BigInt::from(2) * &r).modinv(&m).expect("unit");
                r = (&r - (&r * &r - &u) * inv).mod_floor(&m);
            }
            PAdic::normalized(self.p, half, r, half + rel)
        };
        Ok(Some(root))
    }
}

/// Square root of a quadratic residue modulo an odd prime (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: u64, p: u64) -> u64 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z, (p - 1) / 2, p) == p - 1).unwrap();
    let mul = |x: u64, y: u64| ((x as u128 * y as u128) % p as u128) as u64;
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul(t2, t2);
            i += 1;
        }
        let mut b = c;
        for _ in 0..(m - i - 1) {
            b = mul(b, b);
        }
        m = i;
        c = mul(b, b);
        t = mul(t, c);
        r = mul(r, b);
    }
    r
}

/// Is `c0 + c1 t` a square in `Q_p[t]/(t^2 + a t + b)`?
///
/// Uses the identity: z is a square iff `Tr(z) + 2m` is a nonzero square in
/// Q_p for some square root `m` of `N(z)`. Precision is doubled up to
/// `max_prec` before giving up.
pub fn is_square_in_quadratic(
    c0: &Rational,
    c1: &Rational,
    a: &Rational,
    b: &Rational,
    p: u64,
    max_prec: i64,
) -> Result<bool, SearchError> {
    let place = LocalPlace::Finite(p);
    let disc = a * a - Rational::from_integer(BigInt::from(4)) * b;
    let split = !disc.is_zero() && LocalSquareClass::of(&disc, place).unwrap().is_trivial();
    if c1.is_zero() {
        if c0.is_zero() {
            return Ok(true);
        }
        let cls = LocalSquareClass::of(c0, place).unwrap();
        if cls.is_trivial() {
            return Ok(true);
        }
        return Ok(!split && cls.mul(&LocalSquareClass::of(&disc, place).unwrap()).is_trivial());
    }
    let norm = c0 * c0 - a * c0 * c1 + b * c1 * c1;
    let trace = Rational::from_integer(BigInt::from(2)) * c0 - a * c1;
    if norm.is_zero() {
        // Only possible in the split case: one component vanishes and the
        // other equals the trace.
        return Ok(LocalSquareClass::of(&trace, place).map(|c| c.is_trivial()).unwrap_or(true));
    }
    if !LocalSquareClass::of(&norm, place).unwrap().is_trivial() {
        return Ok(false);
    }
    let mut prec = 24;
    loop {
        let n = PAdic::from_rational(&norm, p, prec);
        let m = n.sqrt()?.expect("norm is a local square");
        let two_m = m.scale(&Rational::from_integer(BigInt::from(2)));
        let tr = PAdic::from_rational(&trace, p, prec);
        let mut decided = true;
        for cand in [tr.add(&two_m), tr.sub(&two_m)] {
            match cand.square_class() {
                Some(c) if c.is_trivial() => return Ok(true),
                Some(_) => {}
                None => decided = false,
            }
        }
        if decided {
            return Ok(false);
        }
        if prec >= max_prec {
            return Err(SearchError::InsufficientPrecision(prec as u32));
        }
        prec *= 2;
    }
}
