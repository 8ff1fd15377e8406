//! Square-class tuples standing for H^1 of J[φ], J[2] and Ĵ[φ̂], and the maps
//! between them.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{PlaceSet, SquareClass};
use crate::error::{ArithError, CohomologyError};
use crate::f2::F2Vec;
use crate::localfield::{HilbertFn, LocalPlace, LocalSquareClass};

/// A component group of a Kummer tuple: global or local square classes.
pub trait ClassElement: Clone + PartialEq + Eq + fmt::Debug + fmt::Display {
    fn mul(&self, other: &Self) -> Self;
    fn is_trivial(&self) -> bool;
    /// The identity of the group this element lives in.
    fn one_like(&self) -> Self;
}

impl ClassElement for SquareClass {
    fn mul(&self, other: &Self) -> Self {
        SquareClass::mul(self, other)
    }
    fn is_trivial(&self) -> bool {
        SquareClass::is_trivial(self)
    }
    fn one_like(&self) -> Self {
        SquareClass::one()
    }
}

impl ClassElement for LocalSquareClass {
    fn mul(&self, other: &Self) -> Self {
        LocalSquareClass::mul(self, other)
    }
    fn is_trivial(&self) -> bool {
        LocalSquareClass::is_trivial(self)
    }
    fn one_like(&self) -> Self {
        LocalSquareClass::trivial(self.place())
    }
}

/// An `N`-tuple of square classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Kummer<C, const N: usize>(pub [C; N]);

pub type KummerTriple = Kummer<SquareClass, 3>;
pub type KummerQuintuple = Kummer<SquareClass, 5>;
pub type LocalTriple = Kummer<LocalSquareClass, 3>;
pub type LocalQuintuple = Kummer<LocalSquareClass, 5>;

impl<C: ClassElement, const N: usize> Kummer<C, N> {
    /// Build a tuple, rejecting it unless the product of its entries is trivial.
    pub fn new(components: [C; N]) -> Result<Self, CohomologyError> {
        let t = Kummer(components);
        if t.satisfies_norm() {
            Ok(t)
        } else {
            Err(CohomologyError::NormViolation)
        }
    }

    pub fn norm(&self) -> C {
        let first = self.0[0].clone();
        self.0[1..].iter().fold(first, |acc, c| acc.mul(c))
    }

    pub fn satisfies_norm(&self) -> bool {
        self.norm().is_trivial()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|c| c.is_trivial())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Kummer(std::array::from_fn(|i| self.0[i].mul(&other.0[i])))
    }

    pub fn identity_like(&self) -> Self {
        Kummer(std::array::from_fn(|i| self.0[i].one_like()))
    }
}

impl<const N: usize> Kummer<SquareClass, N> {
    pub fn identity() -> Self {
        Kummer(std::array::from_fn(|_| SquareClass::one()))
    }

    pub fn from_ints(values: [i64; N]) -> Self {
        Kummer(values.map(SquareClass::of_int))
    }

    pub fn localize(&self, place: LocalPlace) -> Kummer<LocalSquareClass, N> {
        Kummer(std::array::from_fn(|i| self.0[i].localize(place)))
    }

    /// Concatenated coordinates over the basis (-1, p_1, ..., p_k) per slot.
    pub fn coordinates(&self, places: &PlaceSet) -> Result<F2Vec, ArithError> {
        let parts = self
            .0
            .iter()
            .map(|c| c.coordinates(places))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(F2Vec::concat(&parts))
    }

    pub fn from_coordinates(v: &F2Vec, places: &PlaceSet) -> Self {
        let r = places.rank();
        Kummer(std::array::from_fn(|i| SquareClass::from_coordinates(&v.slice(i * r, r), places)))
    }
}

impl<const N: usize> Kummer<LocalSquareClass, N> {
    pub fn identity_at(place: LocalPlace) -> Self {
        Kummer(std::array::from_fn(|_| LocalSquareClass::trivial(place)))
    }

    pub fn place(&self) -> LocalPlace {
        self.0[0].place()
    }

    pub fn coordinates(&self) -> F2Vec {
        F2Vec::concat(&self.0.iter().map(|c| c.coordinates()).collect::<Vec<_>>())
    }

    pub fn from_coordinates(v: &F2Vec, place: LocalPlace) -> Self {
        let r = place.class_rank();
        Kummer(std::array::from_fn(|i| {
            let bits = v.slice(i * r, r);
            let b = bits.ones().fold(0u8, |acc, k| acc | 1 << k);
            LocalSquareClass::from_bits(place, b)
        }))
    }
}

impl<C: fmt::Display, const N: usize> fmt::Display for Kummer<C, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl<C: Serialize, const N: usize> Serialize for Kummer<C, N> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter())
    }
}

impl<'de, C: Deserialize<'de>, const N: usize> Deserialize<'de> for Kummer<C, N> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<C> = Vec::deserialize(d)?;
        let len = v.len();
        let arr: [C; N] = v
            .try_into()
            .map_err(|_| D::Error::custom(format!("expected {N} components, got {len}")))?;
        Ok(Kummer(arr))
    }
}

/// `(a, b, c) ↦ (1, c, c, b, b)`: H^1(J[φ]) → H^1(J[2]).
pub fn psi_phi_to_two<C: ClassElement>(t: &Kummer<C, 3>) -> Result<Kummer<C, 5>, CohomologyError> {
    if !t.satisfies_norm() {
        return Err(CohomologyError::NormViolation);
    }
    let [_, b, c] = &t.0;
    Ok(Kummer([b.one_like(), c.clone(), c.clone(), b.clone(), b.clone()]))
}

/// `(a1, ..., a5) ↦ (a1, a2 a3, a4 a5)`: H^1(J[2]) → H^1(Ĵ[φ̂]).
pub fn psi_two_to_phihat<C: ClassElement>(q: &Kummer<C, 5>) -> Result<Kummer<C, 3>, CohomologyError> {
    if !q.satisfies_norm() {
        return Err(CohomologyError::NormViolation);
    }
    let [a1, a2, a3, a4, a5] = &q.0;
    Ok(Kummer([a1.clone(), a2.mul(a3), a4.mul(a5)]))
}

/// The preimage `(α1, 1, α2, 1, α3)` of `(α1, α2, α3)`.
pub fn lift_phihat_to_two<C: ClassElement>(t: &Kummer<C, 3>) -> Kummer<C, 5> {
    let [a, b, c] = &t.0;
    let one = a.one_like();
    Kummer([a.clone(), one.clone(), b.clone(), one, c.clone()])
}

/// Componentwise difference, which in these 2-torsion groups is the product.
pub fn quotient<C: ClassElement, const N: usize>(x: &Kummer<C, N>, y: &Kummer<C, N>) -> Kummer<C, N> {
    x.mul(y)
}

/// Preimage under `psi_phi_to_two` of a local quintuple: `(c2 c4, c4, c2)`.
/// The quintuple must have the shape `(1, b, b, c, c)`.
pub fn descend_to_phi(c: &LocalQuintuple) -> Result<LocalTriple, CohomologyError> {
    let place = c.place();
    let [c1, c2, c3, c4, c5] = &c.0;
    let fail = |reason: String| CohomologyError::NotInImage { place, reason };
    if !c1.is_trivial() {
        return Err(fail(format!("first slot {c1} is not a square")));
    }
    if c2 != c3 {
        return Err(fail(format!("slots 2 and 3 differ: {c2} vs {c3}")));
    }
    if c4 != c5 {
        return Err(fail(format!("slots 4 and 5 differ: {c4} vs {c5}")));
    }
    Ok(Kummer([c2.mul(c4), *c4, *c2]))
}

/// Local invariant of the cup product `ρ ∪ t`: 0 when
/// `(ρ1, t1)(ρ2, t2)(ρ3, t3) = +1`, else 1.
pub fn cup_invariant_with(rho: &LocalTriple, t: &LocalTriple, symbol: HilbertFn) -> u8 {
    let sign: i8 = rho.0.iter().zip(&t.0).map(|(a, b)| symbol(a, b)).product();
    (sign == -1) as u8
}

pub fn cup_invariant(rho: &LocalTriple, t: &LocalTriple) -> u8 {
    cup_invariant_with(rho, t, crate::localfield::hilbert_symbol_classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q5(v: [i64; 5]) -> KummerQuintuple {
        Kummer::from_ints(v)
    }

    fn t3(v: [i64; 3]) -> KummerTriple {
        Kummer::from_ints(v)
    }

    #[test]
    fn explicit_maps() {
        assert_eq!(psi_phi_to_two(&t3([2, 3, 6])).unwrap(), q5([1, 6, 6, 3, 3]));
        assert_eq!(
            psi_phi_to_two(&t3([113, -7 * 113, -7])).unwrap(),
            q5([1, -7, -7, -7 * 113, -7 * 113])
        );
        assert_eq!(psi_two_to_phihat(&q5([113, 1, 113, 1, 1])).unwrap(), t3([113, 113, 1]));
        assert_eq!(psi_two_to_phihat(&q5([2, 6, 3, -1, -1])).unwrap(), t3([2, 2, 1]));
        assert_eq!(lift_phihat_to_two(&t3([113, 113, 1])), q5([113, 1, 113, 1, 1]));
        assert_eq!(lift_phihat_to_two(&t3([2, 2, 1])), q5([2, 1, 2, 1, 1]));
        assert_eq!(lift_phihat_to_two(&t3([1, 7, 7])), q5([1, 1, 7, 1, 7]));
        assert_eq!(psi_phi_to_two(&t3([2, 3, 5])), Err(CohomologyError::NormViolation));
    }

    #[test]
    fn quotients_and_descent() {
        let d = quotient(&q5([-1, 3, -3, -1, -1]), &q5([-1, 1, -1, 1, 1]));
        assert_eq!(d, q5([1, 3, 3, -1, -1]));
        let d = quotient(&q5([113, 339, 3, 1, 1]), &q5([113, 1, 113, 1, 1]));
        assert_eq!(d, q5([1, 339, 339, 1, 1]));
        let three = LocalPlace::Finite(3);
        assert_eq!(
            descend_to_phi(&q5([1, 3, 3, -1, -1]).localize(three)).unwrap(),
            t3([-3, -1, 3]).localize(three)
        );
        let two = LocalPlace::Finite(2);
        assert_eq!(
            descend_to_phi(&q5([1, 6, 6, -1, -1]).localize(two)).unwrap(),
            t3([-6, -1, 6]).localize(two)
        );
        let seven = LocalPlace::Finite(7);
        assert_eq!(
            descend_to_phi(&q5([1, 1, 1, 7, 7]).localize(seven)).unwrap(),
            t3([7, 7, 1]).localize(seven)
        );
        assert!(matches!(
            descend_to_phi(&q5([1, 3, 1, 3, 1]).localize(seven)),
            Err(CohomologyError::NotInImage { .. })
        ));
    }

    #[test]
    fn cup_values() {
        let three = LocalPlace::Finite(3);
        let p113 = LocalPlace::Finite(113);
        assert_eq!(
            cup_invariant(&t3([-3, -1, 3]).localize(three), &t3([2, 2, 1]).localize(three)),
            1
        );
        assert_eq!(
            cup_invariant(&t3([339, 1, 339]).localize(p113), &t3([2, 2, 1]).localize(p113)),
            0
        );
    }

    #[test]
    fn serde_round_trip() {
        let t = t3([226, -14 * 113, -7]);
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"["226","-1582","-7"]"#);
        assert_eq!(serde_json::from_str::<KummerTriple>(&json).unwrap(), t);
        assert!(serde_json::from_str::<KummerTriple>(r#"["1","2"]"#).is_err());
    }

    fn classes() -> impl Strategy<Value = i64> {
        prop::sample::select(vec![1i64, -1, 2, -2, 3, -3, 6, 7, -7, 113, -113, 14, 226, 339])
    }

    fn triple() -> impl Strategy<Value = KummerTriple> {
        (classes(), classes()).prop_map(|(a, b)| {
            let (a, b) = (SquareClass::of_int(a), SquareClass::of_int(b));
            let c = a.mul(&b);
            Kummer([a, b, c])
        })
    }

    proptest! {
        #[test]
        fn exactness(t in triple(), s in triple()) {
            let q = psi_phi_to_two(&t).unwrap();
            prop_assert!(q.satisfies_norm());
            prop_assert!(psi_two_to_phihat(&q).unwrap().is_trivial());
            let lifted = lift_phihat_to_two(&s);
            prop_assert!(lifted.satisfies_norm());
            prop_assert_eq!(psi_two_to_phihat(&lifted).unwrap(), s.clone());
            for place in [LocalPlace::Infinite, LocalPlace::Finite(2), LocalPlace::Finite(3), LocalPlace::Finite(113)] {
                let local = t.localize(place);
                let back = descend_to_phi(&psi_phi_to_two(&local).unwrap()).unwrap();
                // (bc, b, c) with b = t2, c = t3 recovers t since t1 = t2 t3.
                prop_assert_eq!(back, local);
            }
        }

        #[test]
        fn cup_is_bilinear(a in triple(), b in triple(), c in triple()) {
            for place in [LocalPlace::Infinite, LocalPlace::Finite(2), LocalPlace::Finite(3), LocalPlace::Finite(7)] {
                let (a, b, c) = (a.localize(place), b.localize(place), c.localize(place));
                prop_assert_eq!(cup_invariant(&a.mul(&b), &c), cup_invariant(&a, &c) ^ cup_invariant(&b, &c));
                prop_assert_eq!(cup_invariant(&c, &a.mul(&b)), cup_invariant(&c, &a) ^ cup_invariant(&c, &b));
            }
        }
    }
}
