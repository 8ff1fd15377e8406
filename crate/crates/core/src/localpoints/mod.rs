//! Points of the Jacobians over Q_v and their images under the descent maps
//! μ (to H^1(J[2])), μ^φ̂ (domain curve) and μ^φ (codomain curve).
//!
//! A point of J is written as an unordered pair of curve points. On a
//! degree-5 model the pair `{P, ∞}` is the class of `P - ∞`; on a degree-6
//! model pairs are taken relative to `∞+ + ∞-`. Each curve point `P` gets a
//! triple `v(P)` and a pair maps to the product `v(P1) v(P2)`.

pub mod image;
pub mod search;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{fmt_rational, rational_str, squarefree_reduce, Rational};
use crate::cohomology::{Kummer, KummerQuintuple, KummerTriple, LocalQuintuple, LocalTriple};
use crate::curve::{RichelotPair, TwoTorsionPoint, INFINITY_SLOT};
use crate::error::{ArithError, SearchError};
use crate::localfield::padic::is_square_in_quadratic;
use crate::localfield::{is_local_square, LocalPlace, LocalSquareClass};
use crate::poly::Poly;

pub use image::{find_local_point, ImageStatus, LocalImage, LocalImagePair, LocalImageRecord, LocalImages, SideRecord};
pub use search::SearchConfig;

/// Which descent map: `Phi` works on the codomain curve and `Ĵ(Q)/φ(J(Q))`,
/// `PhiHat` on the domain curve and `J(Q)/φ̂(Ĵ(Q))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Phi,
    #[serde(rename = "phihat")]
    PhiHat,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Phi => "phi",
            Side::PhiHat => "phihat",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvePoint {
    Infinity,
    /// A point with this x-coordinate; y is determined up to sign.
    Affine(#[serde(with = "rational_str")] Rational),
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => f.write_str("inf"),
            CurvePoint::Affine(x) => write!(f, "x={}", fmt_rational(x)),
        }
    }
}

/// A point of the Jacobian over Q_v.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MumfordDivisor {
    Identity,
    /// Two distinct Weierstrass points, as indices into the model's list.
    WeierstrassPair { i: usize, j: usize },
    RationalPair { p: CurvePoint, q: CurvePoint },
    /// The two points with x-coordinates the roots of `x^2 + a x + b`,
    /// irreducible over Q.
    Quadratic {
        #[serde(with = "rational_str")]
        a: Rational,
        #[serde(with = "rational_str")]
        b: Rational,
    },
}

/// A formal sum of divisors; the descent maps are homomorphisms, so its
/// image is the product of the images of the parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocalPoint {
    pub parts: Vec<MumfordDivisor>,
}

impl LocalPoint {
    pub fn identity() -> Self {
        LocalPoint::default()
    }

    pub fn single(d: MumfordDivisor) -> Self {
        LocalPoint { parts: vec![d] }
    }

    pub fn plus(mut self, other: &LocalPoint) -> Self {
        self.parts.extend(other.parts.iter().cloned());
        self.parts.retain(|d| *d != MumfordDivisor::Identity);
        self
    }

    pub fn is_identity(&self) -> bool {
        self.parts.iter().all(|d| *d == MumfordDivisor::Identity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassPoint {
    pub point: CurvePoint,
    /// Index of the factor H_i vanishing there (the linear factor for ∞).
    pub factor: usize,
}

/// One side of the descent: a curve `scale * y^2 = H1 H2 H3` and its map
/// `P ↦ (H1(x), H2(x), H3(x))`.
#[derive(Clone, Debug)]
pub struct DescentModel {
    side: Side,
    h: [Poly; 3],
    scale: Rational,
    f: Poly,
    weierstrass: Vec<WeierstrassPoint>,
    quadratic_factors: Vec<usize>,
    linear_factor: Option<usize>,
    infinity_value: [Rational; 3],
}

impl DescentModel {
    fn build(side: Side, h: [Poly; 3], scale: Rational) -> DescentModel {
        let f = h[0].mul(&h[1]).mul(&h[2]).scale(&(Rational::one() / &scale));
        let linear_factor = (f.degree() == Some(5)).then(|| {
            (0..3)
                .find(|&i| h[i].degree() == Some(1))
                .expect("degree-5 model has a linear factor")
        });
        let mut weierstrass = Vec::new();
        let mut quadratic_factors = Vec::new();
        for (i, hi) in h.iter().enumerate() {
            match hi.rational_roots() {
                Some(roots) => weierstrass.extend(roots.into_iter().map(|x| WeierstrassPoint {
                    point: CurvePoint::Affine(x),
                    factor: i,
                })),
                None => quadratic_factors.push(i),
            }
        }
        if let Some(k) = linear_factor {
            weierstrass.push(WeierstrassPoint {
                point: CurvePoint::Infinity,
                factor: k,
            });
        }
        let lcs: [Rational; 3] = std::array::from_fn(|i| h[i].leading());
        let infinity_value = std::array::from_fn(|i| match linear_factor {
            Some(k) if k == i => {
                let others: Rational = (0..3).filter(|&l| l != k).map(|l| lcs[l].clone()).product();
                &scale * others
            }
            _ => lcs[i].clone(),
        });
        DescentModel {
            side,
            h,
            scale,
            f,
            weierstrass,
            quadratic_factors,
            linear_factor,
            infinity_value,
        }
    }

    /// The domain curve with `G1, G2, G3`; Weierstrass points are listed as
    /// ω1, ..., ω5, ∞, matching the 2-torsion slots.
    pub fn domain(curve: &RichelotPair) -> DescentModel {
        DescentModel::build(Side::PhiHat, curve.g().clone(), Rational::one())
    }

    /// The codomain `Δ y^2 = L1 L2 L3`.
    pub fn codomain(curve: &RichelotPair) -> DescentModel {
        DescentModel::build(Side::Phi, curve.l().clone(), curve.delta().clone())
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn h(&self) -> &[Poly; 3] {
        &self.h
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    /// `y^2 = f(x)`.
    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn weierstrass(&self) -> &[WeierstrassPoint] {
        &self.weierstrass
    }

    pub fn quadratic_factors(&self) -> &[usize] {
        &self.quadratic_factors
    }

    pub fn odd_degree(&self) -> bool {
        self.linear_factor.is_some()
    }

    /// Whether ∞ gives points over Q_v: always on a degree-5 model, and on a
    /// degree-6 model iff the leading coefficient is a local square.
    pub fn has_infinity(&self, place: LocalPlace) -> bool {
        self.odd_degree() || is_local_square(&self.f.leading(), place)
    }

    /// Is there a point with this x (or at ∞) over Q_v?
    pub fn is_local_point(&self, p: &CurvePoint, place: LocalPlace) -> bool {
        match p {
            CurvePoint::Infinity => self.has_infinity(place),
            CurvePoint::Affine(x) => {
                let y2 = self.f.eval(x);
                y2.is_zero() || is_local_square(&y2, place)
            }
        }
    }

    /// `v(P)` with the special cases at roots of `H_i` and at infinity.
    pub fn point_value(&self, p: &CurvePoint) -> [Rational; 3] {
        match p {
            CurvePoint::Infinity => self.infinity_value.clone(),
            CurvePoint::Affine(x) => {
                let vals: [Rational; 3] = std::array::from_fn(|i| self.h[i].eval(x));
                std::array::from_fn(|i| {
                    if vals[i].is_zero() {
                        (0..3)
                            .filter(|&l| l != i)
                            .fold(self.scale.clone(), |acc, l| acc * &vals[l])
                    } else {
                        vals[i].clone()
                    }
                })
            }
        }
    }

    /// `H(x1) H(x2)` for the roots of `x^2 + a x + b`, from `s = x1 + x2`
    /// and `q = x1 x2`.
    fn symmetric_value(h: &Poly, a: &Rational, b: &Rational) -> Rational {
        let s = -a;
        let q = b.clone();
        let two = Rational::from_integer(BigInt::from(2));
        let (h0, h1, h2) = (h.coeff(0), h.coeff(1), h.coeff(2));
        &h2 * &h2 * &q * &q
            + &h2 * &h1 * &q * &s
            + &h2 * &h0 * (&s * &s - two * &q)
            + &h1 * &h1 * &q
            + &h1 * &h0 * &s
            + &h0 * &h0
    }

    pub fn divisor_points(&self, d: &MumfordDivisor) -> Option<[CurvePoint; 2]> {
        match d {
            MumfordDivisor::WeierstrassPair { i, j } => Some([
                self.weierstrass[*i].point.clone(),
                self.weierstrass[*j].point.clone(),
            ]),
            MumfordDivisor::RationalPair { p, q } => Some([p.clone(), q.clone()]),
            _ => None,
        }
    }

    /// Raw rational triple whose classes are the image of `d`.
    pub fn divisor_value(&self, d: &MumfordDivisor) -> [Rational; 3] {
        match d {
            MumfordDivisor::Identity => std::array::from_fn(|_| Rational::one()),
            MumfordDivisor::Quadratic { a, b } => {
                let monic = Poly::new(vec![b.clone(), a.clone(), Rational::one()]);
                let raw: [Rational; 3] = std::array::from_fn(|i| Self::symmetric_value(&self.h[i], a, b));
                std::array::from_fn(|i| {
                    let proportional = self.h[i].degree() == Some(2)
                        && self.h[i].scale(&(Rational::one() / self.h[i].leading())) == monic;
                    if proportional {
                        (0..3).filter(|&l| l != i).map(|l| raw[l].clone()).product()
                    } else {
                        raw[i].clone()
                    }
                })
            }
            _ => {
                let [p, q] = self.divisor_points(d).unwrap();
                let (vp, vq) = (self.point_value(&p), self.point_value(&q));
                std::array::from_fn(|i| &vp[i] * &vq[i])
            }
        }
    }

    pub fn mu_local(&self, d: &MumfordDivisor, place: LocalPlace) -> LocalTriple {
        let v = self.divisor_value(d);
        Kummer(std::array::from_fn(|i| {
            LocalSquareClass::of(&v[i], place).expect("descent map values are nonzero")
        }))
    }

    pub fn mu_global(&self, d: &MumfordDivisor) -> Result<KummerTriple, ArithError> {
        let v = self.divisor_value(d);
        Ok(Kummer([
            squarefree_reduce(&v[0])?,
            squarefree_reduce(&v[1])?,
            squarefree_reduce(&v[2])?,
        ]))
    }

    pub fn mu_point(&self, pt: &LocalPoint, place: LocalPlace) -> LocalTriple {
        pt.parts
            .iter()
            .fold(Kummer::identity_at(place), |acc, d| acc.mul(&self.mu_local(d, place)))
    }

    /// Does `d` define a point of the Jacobian over Q_v?
    pub fn is_local_divisor(&self, d: &MumfordDivisor, place: LocalPlace) -> Result<bool, SearchError> {
        self.is_local_divisor_with(d, place, 384)
    }

    /// As `is_local_divisor`, with a cap on p-adic precision in digits.
    pub fn is_local_divisor_with(
        &self,
        d: &MumfordDivisor,
        place: LocalPlace,
        precision: u32,
    ) -> Result<bool, SearchError> {
        match d {
            MumfordDivisor::Identity | MumfordDivisor::WeierstrassPair { .. } => Ok(true),
            MumfordDivisor::RationalPair { p, q } => {
                Ok(self.is_local_point(p, place) && self.is_local_point(q, place))
            }
            MumfordDivisor::Quadratic { a, b } => {
                let disc = a * a - Rational::from_integer(BigInt::from(4)) * b;
                match place {
                    // Complex conjugate pairs always lie on the curve over R.
                    LocalPlace::Infinite => Ok(disc < Rational::zero()),
                    LocalPlace::Finite(p) => {
                        let (c0, c1) = self.f.rem_monic_quadratic(a, b);
                        is_square_in_quadratic(&c0, &c1, a, b, p, precision as i64)
                    }
                }
            }
        }
    }

    /// The rational 2-torsion divisors: pairs of rational Weierstrass points
    /// and the divisors of irreducible quadratic factors.
    pub fn torsion_divisors(&self) -> Vec<MumfordDivisor> {
        let n = self.weierstrass.len();
        let mut out = vec![MumfordDivisor::Identity];
        for i in 0..n {
            for j in i + 1..n {
                out.push(MumfordDivisor::WeierstrassPair { i, j });
            }
        }
        for &k in &self.quadratic_factors {
            let hk = &self.h[k];
            let lc = hk.leading();
            out.push(MumfordDivisor::Quadratic {
                a: hk.coeff(1) / &lc,
                b: hk.coeff(0) / lc,
            });
        }
        out
    }

    /// Divisor cut out by `H_k = 0`: a generator of the rational kernel.
    pub fn factor_divisor(&self, k: usize) -> MumfordDivisor {
        let idx: Vec<usize> = (0..self.weierstrass.len())
            .filter(|&i| self.weierstrass[i].factor == k)
            .collect();
        match idx.as_slice() {
            [i, j] => MumfordDivisor::WeierstrassPair { i: *i, j: *j },
            _ => {
                let hk = &self.h[k];
                let lc = hk.leading();
                MumfordDivisor::Quadratic {
                    a: hk.coeff(1) / &lc,
                    b: hk.coeff(0) / lc,
                }
            }
        }
    }

    pub fn describe(&self, d: &MumfordDivisor) -> String {
        let show = |p: &CurvePoint, weier: bool| match (p, weier) {
            (CurvePoint::Infinity, _) => "inf".to_string(),
            (CurvePoint::Affine(x), true) => format!("({}, 0)", fmt_rational(x)),
            (CurvePoint::Affine(x), false) => format!("(x = {})", fmt_rational(x)),
        };
        match d {
            MumfordDivisor::Identity => "id".into(),
            MumfordDivisor::WeierstrassPair { i, j } => format!(
                "{{{}, {}}}",
                show(&self.weierstrass[*i].point, true),
                show(&self.weierstrass[*j].point, true)
            ),
            MumfordDivisor::RationalPair { p, q } => {
                format!("{{{}, {}}}", show(p, false), show(q, false))
            }
            MumfordDivisor::Quadratic { a, b } => {
                format!("{{x^2 + ({})x + ({}) = 0}}", fmt_rational(a), fmt_rational(b))
            }
        }
    }

    pub fn describe_point(&self, pt: &LocalPoint) -> String {
        if pt.is_identity() {
            return "id".into();
        }
        pt.parts
            .iter()
            .filter(|d| **d != MumfordDivisor::Identity)
            .map(|d| self.describe(d))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Divisor on the domain curve for a 2-torsion point.
pub fn torsion_divisor(t: &TwoTorsionPoint) -> MumfordDivisor {
    match t.support().as_slice() {
        [] => MumfordDivisor::Identity,
        [i, j] => MumfordDivisor::WeierstrassPair { i: *i, j: *j },
        _ => unreachable!("canonical 2-torsion points have at most two points"),
    }
}

fn mu_two_point(curve: &RichelotPair, p: &CurvePoint) -> [Rational; 5] {
    let roots = curve.roots();
    let lambda = curve.lambda();
    match p {
        CurvePoint::Infinity => std::array::from_fn(|_| lambda.clone()),
        CurvePoint::Affine(x) => std::array::from_fn(|i| {
            if *x == roots[i] {
                (0..5)
                    .filter(|&l| l != i)
                    .fold(lambda.clone(), |acc, l| acc * (&roots[i] - &roots[l]))
            } else {
                x - &roots[i]
            }
        }),
    }
}

/// Raw rational quintuple for μ of a divisor on the domain curve.
pub fn mu_two_value(curve: &RichelotPair, d: &MumfordDivisor) -> [Rational; 5] {
    let weier = |k: usize| {
        if k == INFINITY_SLOT {
            CurvePoint::Infinity
        } else {
            CurvePoint::Affine(curve.roots()[k].clone())
        }
    };
    let pair = |p: &CurvePoint, q: &CurvePoint| {
        let (a, b) = (mu_two_point(curve, p), mu_two_point(curve, q));
        std::array::from_fn(|i| &a[i] * &b[i])
    };
    match d {
        MumfordDivisor::Identity => std::array::from_fn(|_| Rational::one()),
        MumfordDivisor::WeierstrassPair { i, j } => pair(&weier(*i), &weier(*j)),
        MumfordDivisor::RationalPair { p, q } => pair(p, q),
        MumfordDivisor::Quadratic { a, b } => {
            let monic = Poly::new(vec![b.clone(), a.clone(), Rational::one()]);
            std::array::from_fn(|i| monic.eval(&curve.roots()[i]))
        }
    }
}

/// μ: J(Q_v) → H^1(Q_v, J[2]) on a divisor of the domain curve.
pub fn mu_two(curve: &RichelotPair, d: &MumfordDivisor, place: LocalPlace) -> LocalQuintuple {
    let v = mu_two_value(curve, d);
    Kummer(std::array::from_fn(|i| {
        LocalSquareClass::of(&v[i], place).expect("nonzero quintuple entry")
    }))
}

pub fn mu_two_point_sum(curve: &RichelotPair, pt: &LocalPoint, place: LocalPlace) -> LocalQuintuple {
    pt.parts
        .iter()
        .fold(Kummer::identity_at(place), |acc, d| acc.mul(&mu_two(curve, d, place)))
}

pub fn mu_two_global(curve: &RichelotPair, d: &MumfordDivisor) -> Result<KummerQuintuple, ArithError> {
    let v = mu_two_value(curve, d);
    let classes = v
        .iter()
        .map(squarefree_reduce)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Kummer(classes.try_into().unwrap()))
}

pub fn mu_phihat(curve: &RichelotPair, d: &MumfordDivisor, place: LocalPlace) -> LocalTriple {
    DescentModel::domain(curve).mu_local(d, place)
}

pub fn mu_phi(curve: &RichelotPair, d: &MumfordDivisor, place: LocalPlace) -> LocalTriple {
    DescentModel::codomain(curve).mu_local(d, place)
}
