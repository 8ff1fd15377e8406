//! Genus-2 curves y^2 = G1 G2 G3 with all Weierstrass points rational, the
//! Richelot codomain, and the 2-torsion combinatorics.

use std::fmt;

use num_traits::{One, Zero};

use crate::arith::{fmt_rational, prime_support, PlaceSet, Rational};
use crate::error::{ArithError, CurveError};
use crate::poly::Poly;

/// Slot of the point at infinity in 2-torsion masks.
pub const INFINITY_SLOT: usize = 5;

/// A Richelot-split curve `y^2 = G1 G2 G3` in normalized form: `G1 = λ(x - ω1)`,
/// `G2 = (x - ω2)(x - ω3)`, `G3 = (x - ω4)(x - ω5)`, together with the
/// codomain `Δ y^2 = L1 L2 L3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RichelotPair {
    lambda: Rational,
    g: [Poly; 3],
    roots: [Rational; 5],
    delta: Rational,
    l: [Poly; 3],
    /// When the input had a quadratic G1, the root `r` used for the change of
    /// variables `x = r + 1/t` that moved it to infinity.
    moved_root: Option<Rational>,
}

fn det3(rows: &[[Rational; 3]; 3]) -> Rational {
    let m = rows;
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

/// `det(g_ji)` with rows `(g_j0, g_j1, g_j2)`.
pub fn coefficient_determinant(g: &[Poly; 3]) -> Rational {
    let rows = [0, 1, 2].map(|j| [0, 1, 2].map(|i| g[j].coeff(i)));
    det3(&rows)
}

/// `L_i = G_j' G_k - G_j G_k'` for `[i, j, k]` cyclic.
pub fn richelot_dual(g: &[Poly; 3]) -> [Poly; 3] {
    [0, 1, 2].map(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        g[j].derivative().mul(&g[k]).sub(&g[j].mul(&g[k].derivative()))
    })
}

impl RichelotPair {
    /// Validate and normalize `y^2 = λ G1 G2 G3`.
    ///
    /// G1 must have degree 1 or 2 and G2, G3 degree 2, all with rational
    /// roots that are pairwise distinct. A quadratic G1 is moved to degree 1
    /// by sending its smaller root to infinity. Leading coefficients of G2, G3
    /// are folded into G1.
    pub fn build(lambda: &Rational, g1: &Poly, g2: &Poly, g3: &Poly) -> Result<RichelotPair, CurveError> {
        if lambda.is_zero() {
            return Err(CurveError::ZeroLambda);
        }
        let input = [g1.clone(), g2.clone(), g3.clone()];
        for (idx, g) in input.iter().enumerate() {
            let deg = g.degree();
            let ok = match idx {
                0 => matches!(deg, Some(1) | Some(2)),
                _ => deg == Some(2),
            };
            if !ok {
                return Err(CurveError::BadDegree {
                    index: idx + 1,
                    degree: g.signed_degree(),
                    expected: if idx == 0 { "1 or 2" } else { "2" },
                });
            }
        }
        let mut all_roots: Vec<Rational> = Vec::new();
        for (idx, g) in input.iter().enumerate() {
            let roots = g.rational_roots().ok_or(CurveError::NonSplit(idx + 1))?;
            all_roots.extend(roots);
        }
        let mut sorted = all_roots.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(CurveError::SingularModel(fmt_rational(&w[0])));
        }
        if coefficient_determinant(&input).is_zero() {
            return Err(CurveError::ProductOfElliptic);
        }

        let mut g = input;
        g[0] = g[0].scale(lambda);
        let mut moved_root = None;
        if g[0].degree() == Some(2) {
            let r = g[0].rational_roots().unwrap()[0].clone();
            g = g.map(|p| p.shift(&r).reverse(2));
            moved_root = Some(r);
        }
        let c2 = g[1].leading();
        let c3 = g[2].leading();
        g[0] = g[0].scale(&(&c2 * &c3));
        g[1] = g[1].scale(&(Rational::one() / c2));
        g[2] = g[2].scale(&(Rational::one() / c3));

        let lambda = g[0].leading();
        let r1 = g[0].rational_roots().unwrap();
        let r2 = g[1].rational_roots().unwrap();
        let r3 = g[2].rational_roots().unwrap();
        let roots = [
            r1[0].clone(),
            r2[0].clone(),
            r2[1].clone(),
            r3[0].clone(),
            r3[1].clone(),
        ];
        let delta = coefficient_determinant(&g);
        let l = richelot_dual(&g);
        Ok(RichelotPair {
            lambda,
            g,
            roots,
            delta,
            l,
            moved_root,
        })
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn g(&self) -> &[Poly; 3] {
        &self.g
    }

    /// `ω1, ..., ω5` (zero-based here).
    pub fn roots(&self) -> &[Rational; 5] {
        &self.roots
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn l(&self) -> &[Poly; 3] {
        &self.l
    }

    pub fn moved_root(&self) -> Option<&Rational> {
        self.moved_root.as_ref()
    }

    /// `f = G1 G2 G3`.
    pub fn f(&self) -> Poly {
        self.g[0].mul(&self.g[1]).mul(&self.g[2])
    }

    /// Right-hand side of the codomain in the form `y^2 = L1 L2 L3 / Δ`.
    pub fn codomain_f(&self) -> Poly {
        self.l[0]
            .mul(&self.l[1])
            .mul(&self.l[2])
            .scale(&(Rational::one() / &self.delta))
    }

    /// Primes of bad reduction for the pair together with 2: those dividing
    /// λ, Δ or a difference of roots, or a denominator of a root.
    pub fn bad_places(&self) -> Result<PlaceSet, ArithError> {
        let mut primes = vec![2];
        primes.extend(prime_support(&self.lambda)?);
        primes.extend(prime_support(&self.delta)?);
        for (i, a) in self.roots.iter().enumerate() {
            if !a.is_zero() {
                primes.extend(prime_support(a)?.into_iter().filter(|_| !a.is_integer()));
            }
            for b in &self.roots[i + 1..] {
                primes.extend(prime_support(&(a - b))?);
            }
        }
        Ok(PlaceSet::new(primes))
    }

    /// Which G_i vanishes at root `k`.
    pub fn factor_of_root(k: usize) -> usize {
        match k {
            0 => 0,
            1 | 2 => 1,
            _ => 2,
        }
    }

    /// Generators of J[φ]: the divisors cut out by G1, G2, G3.
    pub fn kernel(&self) -> [TwoTorsionPoint; 3] {
        [
            TwoTorsionPoint::pair(0, INFINITY_SLOT),
            TwoTorsionPoint::pair(1, 2),
            TwoTorsionPoint::pair(3, 4),
        ]
    }
}

impl fmt::Display for RichelotPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "y^2 = ({})({})({})",
            self.g[0], self.g[1], self.g[2]
        )
    }
}

/// Element of J[2]: an even subset of the six Weierstrass points (five
/// roots plus infinity) modulo complement, stored with at most two points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TwoTorsionPoint {
    mask: u8,
}

impl TwoTorsionPoint {
    pub const IDENTITY: TwoTorsionPoint = TwoTorsionPoint { mask: 0 };

    fn canonical(mask: u8) -> TwoTorsionPoint {
        let mask = mask & 0x3f;
        assert!(mask.count_ones() % 2 == 0, "odd Weierstrass subset");
        let mask = if mask.count_ones() > 2 { !mask & 0x3f } else { mask };
        TwoTorsionPoint { mask }
    }

    pub fn pair(i: usize, j: usize) -> TwoTorsionPoint {
        assert!(i != j && i < 6 && j < 6, "invalid Weierstrass pair");
        TwoTorsionPoint::canonical(1 << i | 1 << j)
    }

    /// All 16 points, identity first, then pairs in lexicographic order of
    /// (root index, root index) with infinity last.
    pub fn all() -> Vec<TwoTorsionPoint> {
        let mut out = vec![TwoTorsionPoint::IDENTITY];
        for i in 0..6 {
            for j in i + 1..6 {
                out.push(TwoTorsionPoint::pair(i, j));
            }
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.mask == 0
    }

    /// Support slots (0..=4 roots, 5 infinity); empty for the identity.
    pub fn support(&self) -> Vec<usize> {
        (0..6).filter(|i| self.mask >> i & 1 == 1).collect()
    }

    pub fn add(&self, other: &TwoTorsionPoint) -> TwoTorsionPoint {
        TwoTorsionPoint::canonical(self.mask ^ other.mask)
    }
}

impl fmt::Display for TwoTorsionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("id");
        }
        let names: Vec<String> = self
            .support()
            .into_iter()
            .map(|i| if i == INFINITY_SLOT { "inf".into() } else { format!("w{}", i + 1) })
            .collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// The Weil pairing on J[2]: `(-1)^{|supports intersect|}`.
pub fn weil_e2(p: &TwoTorsionPoint, q: &TwoTorsionPoint) -> i8 {
    if (p.mask & q.mask).count_ones() % 2 == 1 {
        -1
    } else {
        1
    }
}

/// A preimage under φ of the codomain kernel point `P_j'` (0-based): one
/// Weierstrass point from each of the two other factors.
pub fn phi_preimage(j: usize) -> TwoTorsionPoint {
    let slots: [[usize; 2]; 3] = [[0, INFINITY_SLOT], [1, 2], [3, 4]];
    let (k, l) = ((j + 1) % 3, (j + 2) % 3);
    TwoTorsionPoint::pair(slots[k][0], slots[l][0])
}

/// `e_φ(P_i, P_j')` for kernel indices `i, j` in 1..=3, computed as
/// `e_2(P_i, Q)` with `φ(Q) = P_j'`.
pub fn weil_ephi(i: usize, j: usize) -> i8 {
    assert!((1..=3).contains(&i) && (1..=3).contains(&j), "kernel index out of range");
    let kernel = [
        TwoTorsionPoint::pair(0, INFINITY_SLOT),
        TwoTorsionPoint::pair(1, 2),
        TwoTorsionPoint::pair(3, 4),
    ];
    weil_e2(&kernel[i - 1], &phi_preimage(j - 1))
}

/// Human-readable `c(x - r1)(x - r2)` form when the roots are rational.
pub fn factored(p: &Poly) -> String {
    let Some(roots) = p.rational_roots() else {
        return p.to_string();
    };
    let lc = p.leading();
    let mut s = if lc == Rational::one() {
        String::new()
    } else if lc == -Rational::one() {
        "-".to_string()
    } else {
        fmt_rational(&lc)
    };
    for r in roots {
        if r.is_zero() {
            s.push('x');
        } else if r > Rational::zero() {
            s.push_str(&format!("(x - {})", fmt_rational(&r)));
        } else {
            s.push_str(&format!("(x + {})", fmt_rational(&-r)));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn example() -> RichelotPair {
        RichelotPair::build(
            &int(1),
            &Poly::from_ints(&[226, 1]),
            &Poly::from_ints(&[0, -678, 1]),
            &Poly::from_ints(&[-113 * 791, -678, 1]),
        )
        .unwrap()
    }

    #[test]
    fn worked_example_codomain() {
        let c = example();
        assert_eq!(*c.delta(), int(-7 * 113 * 113));
        assert_eq!(c.l()[0], Poly::from_roots(int(-14 * 113 * 113), &[int(339)]));
        assert_eq!(c.l()[1], Poly::from_roots(int(1), &[int(-565), int(113)]));
        assert_eq!(c.l()[2], Poly::from_roots(int(-1), &[int(-678), int(226)]));
        assert_eq!(
            c.roots().to_vec(),
            vec![int(-226), int(0), int(678), int(-113), int(791)]
        );
    }

    #[test]
    fn bad_places_of_worked_example() {
        assert_eq!(example().bad_places().unwrap(), PlaceSet::new([2, 3, 7, 113]));
    }

    #[test]
    fn dual_determinant_is_minus_two_delta_squared() {
        let cases = [
            [[226, 1, 0], [0, -678, 1], [-113 * 791, -678, 1]],
            [[0, 1, 0], [-1, 0, 1], [-4, 0, 1]],
            [[3, 5, 0], [7, 2, 1], [-11, 0, 1]],
            [[1, 2, 3], [4, 5, 7], [-2, 9, 1]],
        ];
        for rows in cases {
            let g = rows.map(|r| Poly::from_ints(&r));
            let d = coefficient_determinant(&g);
            let l = richelot_dual(&g);
            let two = Rational::from_integer(2.into());
            assert_eq!(coefficient_determinant(&l), -(two * &d * &d));
        }
    }

    #[test]
    fn toy_curve_by_hand() {
        // G1 = x, G2 = x^2 - 1, G3 = x^2 - 4: det [[0,1,0],[-1,0,1],[-4,0,1]] = -3.
        let c = RichelotPair::build(
            &int(1),
            &Poly::from_ints(&[0, 1]),
            &Poly::from_ints(&[-1, 0, 1]),
            &Poly::from_ints(&[-4, 0, 1]),
        )
        .unwrap();
        assert_eq!(*c.delta(), int(-3));
        assert_eq!(c.l()[0], Poly::from_ints(&[0, -6]));
        assert_eq!(c.l()[1], Poly::from_ints(&[4, 0, 1]));
        assert_eq!(c.l()[2], Poly::from_ints(&[-1, 0, -1]));
    }

    #[test]
    fn validation_errors() {
        let g1 = Poly::from_ints(&[0, 1]);
        let g3 = Poly::from_ints(&[-4, 0, 1]);
        let sq = Poly::from_ints(&[1, -2, 1]);
        assert!(matches!(
            RichelotPair::build(&int(1), &g1, &sq, &g3),
            Err(CurveError::SingularModel(_))
        ));
        let irr = Poly::from_ints(&[-2, 0, 1]);
        assert_eq!(RichelotPair::build(&int(1), &g1, &irr, &g3), Err(CurveError::NonSplit(2)));
        assert_eq!(
            RichelotPair::build(&int(0), &g1, &g3, &g3).unwrap_err(),
            CurveError::ZeroLambda
        );
        assert!(matches!(
            RichelotPair::build(&int(1), &g1, &g1, &g3),
            Err(CurveError::BadDegree { index: 2, .. })
        ));
        // G3 = G2 + 2 G1 with all roots rational and distinct: rows are dependent.
        let g1 = Poly::from_ints(&[4, 1]);
        let g2 = Poly::from_ints(&[-6, 1, 1]);
        let g3 = Poly::from_ints(&[2, 3, 1]);
        assert_eq!(
            RichelotPair::build(&int(1), &g1, &g2, &g3),
            Err(CurveError::ProductOfElliptic)
        );
    }

    #[test]
    fn quadratic_g1_moves_a_root_to_infinity() {
        // G1 = (x - 1)(x - 3), G2 = x(x + 2), G3 = (x - 5)(x + 7).
        let c = RichelotPair::build(
            &int(1),
            &Poly::from_ints(&[3, -4, 1]),
            &Poly::from_ints(&[0, 2, 1]),
            &Poly::from_ints(&[-35, 2, 1]),
        )
        .unwrap();
        assert_eq!(c.moved_root(), Some(&int(1)));
        assert_eq!(c.g()[0].degree(), Some(1));
        // Roots map to t = 1/(x - 1).
        let expected: Vec<Rational> = [3, 0, -2, 5, -7]
            .iter()
            .map(|x| Rational::one() / (int(*x) - int(1)))
            .collect();
        let mut got = c.roots().to_vec();
        let mut exp = expected;
        got.sort();
        exp.sort();
        assert_eq!(got, exp);
        assert!(!c.delta().is_zero());
    }

    #[test]
    fn weil_pairing_tables() {
        let all = TwoTorsionPoint::all();
        assert_eq!(all.len(), 16);
        for p in &all {
            assert_eq!(weil_e2(p, p), 1);
            for q in &all {
                assert_eq!(weil_e2(p, q), weil_e2(q, p));
                for r in &all {
                    assert_eq!(weil_e2(&p.add(q), r), weil_e2(p, r) * weil_e2(q, r));
                }
            }
        }
        assert_eq!(weil_e2(&TwoTorsionPoint::pair(0, 1), &TwoTorsionPoint::pair(1, 2)), -1);
        assert_eq!(weil_e2(&TwoTorsionPoint::pair(0, 1), &TwoTorsionPoint::pair(2, 3)), 1);
        let c = example();
        for p in c.kernel() {
            for q in c.kernel() {
                assert_eq!(weil_e2(&p, &q), 1);
            }
        }
        for i in 1..=3 {
            for j in 1..=3 {
                assert_eq!(weil_ephi(i, j), if i == j { 1 } else { -1 });
            }
        }
    }
}
