//! Brute-force Hilbert symbol: search for primitive solutions of
//! z^2 = a x^2 + b y^2 modulo p^d.
//!
//! A primitive solution over Z_p has x or y a unit (a and b are reduced to
//! valuation 0 or 1), so it suffices to look at the charts x = 1 and y = 1.
//! In the chart x = 1 we need y in Z_p with a + b y^2 a square. Changing y by
//! p^d moves a + b y^2 by something of valuation at least v(b) + d (+1 at 2),
//! so a residue y mod p^d decides squareness whenever the valuation of
//! a + b y^2 is small enough. The answer is certified either by a decided
//! square, or by every residue being decided and none a square.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{split_valuation, LocalPlace};
use crate::arith::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    Plus,
    Minus,
    Inconclusive,
}

impl OracleVerdict {
    pub fn sign(self) -> Option<i8> {
        match self {
            OracleVerdict::Plus => Some(1),
            OracleVerdict::Minus => Some(-1),
            OracleVerdict::Inconclusive => None,
        }
    }
}

/// Reduce a nonzero rational to (alpha, u) with x = p^alpha u mod squares,
/// alpha in {0, 1}, and u an integer prime to p (up to the square of its
/// denominator).
fn reduce(x: &Rational, p: u64) -> (u32, BigInt) {
    let (vn, un) = split_valuation(x.numer(), p);
    let (vd, ud) = split_valuation(x.denom(), p);
    ((vn - vd).rem_euclid(2) as u32, un * ud)
}

fn valuation_mod(w: u128, p: u128, cap: u32) -> u32 {
    let mut v = 0;
    let mut w = w;
    while v < cap && w % p == 0 {
        w /= p;
        v += 1;
    }
    v
}

struct Chart {
    p: u128,
    modulus: u128,
    full_exp: u32,
    squares_mod_p: Vec<bool>,
}

enum ChartResult {
    Square,
    AllNonSquare,
    Undecided,
}

impl Chart {
    fn new(p: u64, d: u32) -> Chart {
        let p128 = p as u128;
        let full_exp = d + 4;
        let squares_mod_p = if p == 2 {
            Vec::new()
        } else {
            let mut t = vec![false; p as usize];
            for z in 0..p {
                t[((z as u128 * z as u128) % p128) as usize] = true;
            }
            t
        };
        Chart {
            p: p128,
            modulus: p128.pow(full_exp),
            full_exp,
            squares_mod_p,
        }
    }

    /// Is there t mod p^d with c + e t^2 a decided square? `e_val` is v(e).
    fn search(&self, c: u128, e: u128, e_val: u32, d: u32) -> ChartResult {
        let two = self.p == 2;
        let mut undecided = false;
        let step_count = self.p.pow(d);
        for t in 0..step_count {
            let w = (c + e * ((t * t) % self.modulus)) % self.modulus;
            if w == 0 {
                // a + b t^2 may vanish p-adically near t; cannot decide here.
                undecided = true;
                continue;
            }
            let v = valuation_mod(w, self.p, self.full_exp);
            let need = if two { v + 3 } else { v + 1 };
            let bound = if two { e_val + d + 1 } else { e_val + d };
            if need > bound || need > self.full_exp {
                undecided = true;
                continue;
            }
            if v % 2 == 1 {
                continue;
            }
            let unit = w / self.p.pow(v);
            let square = if two {
                unit % 8 == 1
            } else {
                self.squares_mod_p[(unit % self.p) as usize]
            };
            if square {
                return ChartResult::Square;
            }
        }
        if undecided {
            ChartResult::Undecided
        } else {
            ChartResult::AllNonSquare
        }
    }
}

fn real_oracle(a: &Rational, b: &Rational) -> OracleVerdict {
    for (x, y) in [(1, 0), (0, 1), (1, 1)] {
        let s = a * Rational::from_integer(BigInt::from(x)) + b * Rational::from_integer(BigInt::from(y));
        if !s.is_negative() {
            return OracleVerdict::Plus;
        }
    }
    OracleVerdict::Minus
}

/// Decide (a, b)_v by searching for solutions, deepening up to `max_depth`.
pub fn hilbert_oracle(a: &Rational, b: &Rational, place: LocalPlace, max_depth: u32) -> OracleVerdict {
    assert!(!a.is_zero() && !b.is_zero(), "Hilbert symbol of zero");
    let p = match place {
        LocalPlace::Infinite => return real_oracle(a, b),
        LocalPlace::Finite(p) => p,
    };
    let (alpha, u) = reduce(a, p);
    let (beta, w) = reduce(b, p);
    for d in 1..=max_depth {
        let chart = Chart::new(p, d);
        let m = BigInt::from(chart.modulus);
        let pa = BigInt::from(p).pow(alpha);
        let pb = BigInt::from(p).pow(beta);
        let a_mod = (&pa * &u).mod_floor(&m).to_u128().unwrap();
        let b_mod = (&pb * &w).mod_floor(&m).to_u128().unwrap();
        let x_chart = chart.search(a_mod, b_mod, beta, d);
        if matches!(x_chart, ChartResult::Square) {
            return OracleVerdict::Plus;
        }
        let y_chart = chart.search(b_mod, a_mod, alpha, d);
        match (x_chart, y_chart) {
            (_, ChartResult::Square) => return OracleVerdict::Plus,
            (ChartResult::AllNonSquare, ChartResult::AllNonSquare) => return OracleVerdict::Minus,
            _ => {}
        }
    }
    OracleVerdict::Inconclusive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::localfield::hilbert_symbol;

    #[test]
    fn oracle_agrees_on_small_integers() {
        for place in [LocalPlace::Infinite, LocalPlace::Finite(2), LocalPlace::Finite(3), LocalPlace::Finite(5)] {
            for a in -12i64..=12 {
                for b in -12i64..=12 {
                    if a == 0 || b == 0 {
                        continue;
                    }
                    let verdict = hilbert_oracle(&int(a), &int(b), place, 6);
                    assert_eq!(
                        verdict.sign(),
                        Some(hilbert_symbol(&int(a), &int(b), place).unwrap()),
                        "({a}, {b}) at {place}"
                    );
                }
            }
        }
    }
}
