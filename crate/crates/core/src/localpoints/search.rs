//! Candidate generation for local point searches.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CurvePoint, DescentModel, MumfordDivisor};
use crate::arith::Rational;
use crate::localfield::LocalPlace;
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Largest |k| in candidates `x = c ± r p^k`.
    pub val_bound: u32,
    /// Residues `r` run over units below `p^m` for this `m`.
    pub residue_exponent: u32,
    /// Extra rounds, each doubling the valuation bound and residue budget.
    pub escalations: u32,
    /// Cap on residues per (center, k) in the first round.
    pub residue_budget: usize,
    /// Cap on `a` and `b` values tried for quadratic divisors.
    pub quadratic_budget: usize,
    /// Maximal p-adic precision for squareness in quadratic extensions.
    pub precision: u32,
    /// Shuffles candidate order when set.
    pub shuffle_seed: Option<u64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            val_bound: 6,
            residue_exponent: 4,
            escalations: 2,
            residue_budget: 2000,
            quadratic_budget: 40,
            precision: 384,
            shuffle_seed: None,
        }
    }
}

/// Parameters of one search round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Round {
    pub val_bound: u32,
    pub residue_exponent: u32,
    pub budget: usize,
}

impl SearchConfig {
    pub fn rounds(&self) -> Vec<Round> {
        (0..=self.escalations)
            .map(|e| Round {
                val_bound: self.val_bound << e,
                residue_exponent: self.residue_exponent + e,
                budget: self.residue_budget << e,
            })
            .collect()
    }
}

/// Exponents in the order 0, 1, -1, 2, -2, ...
pub fn exponent_order(bound: u32) -> Vec<i64> {
    let mut out = vec![0];
    for k in 1..=bound as i64 {
        out.push(k);
        out.push(-k);
    }
    out
}

fn p_power(p: u64, k: i64) -> Rational {
    let m = Rational::from_integer(BigInt::from(p).pow(k.unsigned_abs() as u32));
    if k >= 0 {
        m
    } else {
        Rational::one() / m
    }
}

/// Units `r` with `1 <= r < p^m`, at most `budget` of them.
pub fn residues(p: u64, m: u32, budget: usize) -> Vec<u64> {
    let limit = (p as u128).checked_pow(m).unwrap_or(u128::MAX);
    (1u64..)
        .take_while(|&r| (r as u128) < limit)
        .filter(|r| r % p != 0)
        .take(budget)
        .collect()
}

/// Centers for candidate x: zero and the rational Weierstrass abscissae.
pub fn centers(models: &[&DescentModel]) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    for m in models {
        for w in m.weierstrass() {
            if let CurvePoint::Affine(x) = &w.point {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
        }
    }
    out
}

/// Candidates `c ± r p^k` for a fixed k, over all centers.
pub fn finite_batch(centers: &[Rational], p: u64, k: i64, residues: &[u64]) -> Vec<Rational> {
    let scale = p_power(p, k);
    let mut out = Vec::with_capacity(centers.len() * residues.len() * 2);
    for c in centers {
        for &r in residues {
            let step = Rational::from_integer(BigInt::from(r)) * &scale;
            out.push(c + &step);
            out.push(c - step);
        }
    }
    out
}

/// Coefficient values for quadratic divisors: 0 and `± r p^k` for small r.
pub fn quadratic_coefficients(p: u64, bound: u32, budget: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    'outer: for k in exponent_order(bound) {
        for r in residues(p, 2, 8) {
            for s in [1i64, -1] {
                if out.len() >= budget {
                    break 'outer;
                }
                out.push(Rational::from_integer(BigInt::from(s * r as i64)) * p_power(p, k));
            }
        }
    }
    out
}

fn sqrt_bounds(d: &Rational, width: &Rational) -> (Rational, Rational) {
    let mut lo = Rational::zero();
    let mut hi = if *d > Rational::one() { d.clone() } else { Rational::one() };
    let two = Rational::from_integer(BigInt::from(2));
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / &two;
        if &mid * &mid <= *d {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Rational points between and around the real roots of the factors, so
/// that every sign pattern of `(H1, H2, H3)` on R is sampled exactly once.
pub fn real_samples(model: &DescentModel) -> Vec<Rational> {
    let two = Rational::from_integer(BigInt::from(2));
    let four = Rational::from_integer(BigInt::from(4));
    // Exact roots, and irrational ones as (center, squared half-width, sign).
    let mut exact: Vec<Rational> = Vec::new();
    let mut irrational: Vec<(Rational, Rational, bool)> = Vec::new();
    for h in model.h() {
        match h.degree() {
            Some(1) => exact.push(-h.coeff(0) / h.coeff(1)),
            Some(2) => {
                let (c2, c1, c0) = (h.coeff(2), h.coeff(1), h.coeff(0));
                let disc = &c1 * &c1 - &four * &c2 * &c0;
                if let Some(roots) = h.rational_roots() {
                    exact.extend(roots);
                } else if disc.is_positive() {
                    let center = -&c1 / (&two * &c2);
                    let half = disc / (&four * &c2 * &c2);
                    irrational.push((center.clone(), half.clone(), false));
                    irrational.push((center, half, true));
                }
            }
            _ => {}
        }
    }
    let mut width = Rational::one();
    let intervals = loop {
        let mut iv: Vec<(Rational, Rational)> = exact.iter().map(|r| (r.clone(), r.clone())).collect();
        for (c, half, plus) in &irrational {
            let (lo, hi) = sqrt_bounds(half, &width);
            iv.push(if *plus { (c + lo, c + hi) } else { (c - hi, c - lo) });
        }
        iv.sort();
        if iv.windows(2).all(|w| w[0].1 < w[1].0) {
            break iv;
        }
        width /= Rational::from_integer(BigInt::from(16));
    };
    let mut out = Vec::new();
    match (intervals.first(), intervals.last()) {
        (Some(first), Some(last)) => {
            out.push(&first.0 - Rational::one());
            for w in intervals.windows(2) {
                out.push((&w[0].1 + &w[1].0) / &two);
            }
            out.push(&last.1 + Rational::one());
        }
        _ => out.push(Rational::zero()),
    }
    out
}

/// A random divisor defining a point of J(Q_v): a pair of local points or
/// an irreducible quadratic whose roots give local points.
pub fn random_local_divisor<R: Rng>(model: &DescentModel, place: LocalPlace, rng: &mut R) -> MumfordDivisor {
    let p = place.prime().unwrap_or(2);
    let pick = |rng: &mut R| -> Rational {
        let r = rng.random_range(1..=200i64) * if rng.random::<bool>() { 1 } else { -1 };
        let k = rng.random_range(-2..=3i64);
        Rational::from_integer(BigInt::from(r)) * p_power(p, k)
    };
    let torsion = model.torsion_divisors();
    for _ in 0..10_000 {
        let choice = rng.random_range(0..10);
        let d = if choice < 5 {
            let x = pick(rng);
            let y = pick(rng);
            if x == y {
                continue;
            }
            let p = CurvePoint::Affine(x);
            let q = if rng.random::<bool>() && model.has_infinity(place) {
                CurvePoint::Infinity
            } else {
                CurvePoint::Affine(y)
            };
            MumfordDivisor::RationalPair { p, q }
        } else if choice < 9 {
            let (a, b) = (pick(rng), pick(rng));
            let monic = Poly::new(vec![b.clone(), a.clone(), Rational::one()]);
            if monic.rational_roots().is_some() {
                continue;
            }
            let (c0, c1) = model.f().rem_monic_quadratic(&a, &b);
            if (&c0 * &c0 - &a * &c0 * &c1 + &b * &c1 * &c1).is_zero() {
                continue;
            }
            MumfordDivisor::Quadratic { a, b }
        } else {
            torsion.choose(rng).unwrap().clone()
        };
        if model.is_local_divisor(&d, place).unwrap_or(false) {
            return d;
        }
    }
    MumfordDivisor::Identity
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::curve::RichelotPair;

    #[test]
    fn real_samples_hit_every_interval() {
        let c = RichelotPair::build(
            &int(1),
            &Poly::from_ints(&[226, 1]),
            &Poly::from_ints(&[0, -678, 1]),
            &Poly::from_ints(&[-113 * 791, -678, 1]),
        )
        .unwrap();
        let m = DescentModel::domain(&c);
        let xs = real_samples(&m);
        assert_eq!(xs.len(), 6);
        let roots = c.roots();
        for w in xs.windows(2) {
            assert_eq!(roots.iter().filter(|r| **r > w[0] && **r < w[1]).count(), 1);
        }
        // x^2 - 2 has irrational roots.
        let d = RichelotPair::build(
            &int(1),
            &Poly::from_ints(&[0, 1]),
            &Poly::from_ints(&[-1, 0, 1]),
            &Poly::from_ints(&[6, -5, 1]),
        )
        .unwrap();
        let cod = DescentModel::codomain(&d);
        let xs = real_samples(&cod);
        for w in xs.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn exponent_and_residue_orders() {
        assert_eq!(exponent_order(2), vec![0, 1, -1, 2, -2]);
        assert_eq!(residues(3, 2, 100), vec![1, 2, 4, 5, 7, 8]);
        assert_eq!(residues(113, 4, 5), vec![1, 2, 3, 4, 5]);
    }
}
