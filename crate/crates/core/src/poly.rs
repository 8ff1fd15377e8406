//! Dense univariate polynomials over Q.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{fmt_rational, rational_sqrt, Rational};

/// Coefficients in increasing degree; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Poly {
        Poly::new(coeffs.iter().map(|c| Rational::from_integer(BigInt::from(*c))).collect())
    }

    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Poly {
        Poly::new(vec![c])
    }

    /// `c * prod (x - r)`.
    pub fn from_roots(c: Rational, roots: &[Rational]) -> Poly {
        roots.iter().fold(Poly::constant(c), |acc, r| {
            acc.mul(&Poly::new(vec![-r.clone(), Rational::one()]))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial at -1, for error messages.
    pub fn signed_degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `p(x + r)`.
    pub fn shift(&self, r: &Rational) -> Poly {
        let lin = Poly::new(vec![r.clone(), Rational::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| acc.mul(&lin).add(&Poly::constant(c.clone())))
    }

    /// `t^d p(1/t)` for `d >= deg p`.
    pub fn reverse(&self, d: usize) -> Poly {
        assert!(self.coeffs.len() <= d + 1, "reverse degree too small");
        let mut out = vec![Rational::zero(); d + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[d - i] = c.clone();
        }
        Poly::new(out)
    }

    /// Remainder modulo the monic quadratic `x^2 + a x + b`, as `(c0, c1)`.
    pub fn rem_monic_quadratic(&self, a: &Rational, b: &Rational) -> (Rational, Rational) {
        let mut c = self.coeffs.clone();
        for n in (2..c.len()).rev() {
            let top = std::mem::take(&mut c[n]);
            c[n - 1] -= &top * a;
            c[n - 2] -= &top * b;
        }
        c.resize(2, Rational::zero());
        (c[0].clone(), c[1].clone())
    }

    /// Roots of a polynomial of degree at most 2 when all are rational, in
    /// ascending order with multiplicity. `None` if a root is irrational.
    pub fn rational_roots(&self) -> Option<Vec<Rational>> {
        match self.degree() {
            None | Some(0) => Some(Vec::new()),
            Some(1) => Some(vec![-self.coeff(0) / self.coeff(1)]),
            Some(2) => {
                let (a, b, c) = (self.coeff(2), self.coeff(1), self.coeff(0));
                let disc = &b * &b - Rational::from_integer(BigInt::from(4)) * &a * &c;
                let s = rational_sqrt(&disc)?;
                let two_a = Rational::from_integer(BigInt::from(2)) * &a;
                let mut roots = vec![(-&b - &s) / &two_a, (-&b + &s) / &two_a];
                roots.sort();
                Some(roots)
            }
            Some(_) => panic!("rational_roots only handles degree <= 2"),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let body = fmt_rational(&mag);
            match i {
                0 => f.write_str(&body)?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{body}*")?;
                    }
                    f.write_str("x")?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
