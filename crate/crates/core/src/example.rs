//! The worked example with k = 113 and a checker for its published values.
//!
//! The curve is `y^2 = (x + 2k) x (x - 6k) (x + k)(x - 7k)` with k = 113.

use crate::arith::{int, PlaceSet};
use crate::cohomology::{
    descend_to_phi, lift_phihat_to_two, psi_phi_to_two, psi_two_to_phihat, quotient, Kummer, KummerQuintuple,
    KummerTriple,
};
use crate::ctp::{analyze_with, ctp_global, ctp_local, ctp_matrix, CtpOptions};
use crate::curve::{weil_e2, weil_ephi, RichelotPair, TwoTorsionPoint};
use crate::localfield::LocalPlace;
use crate::localpoints::{
    find_local_point, mu_two, DescentModel, ImageStatus, LocalImages, MumfordDivisor, SearchConfig,
};
use crate::poly::Poly;

pub const K: i64 = 113;

pub fn curve() -> RichelotPair {
    RichelotPair::build(
        &int(1),
        &Poly::from_ints(&[2 * K, 1]),
        &Poly::from_ints(&[0, -6 * K, 1]),
        &Poly::from_ints(&[-7 * K * K, -6 * K, 1]),
    )
    .expect("the example curve is valid")
}

pub fn sel_phihat_basis() -> Vec<KummerTriple> {
    [
        [2 * K, -14 * K, -7],
        [K, 7, 7 * K],
        [K, K, 1],
        [2, 2, 1],
        [1, 7, 7],
    ]
    .map(Kummer::from_ints)
    .to_vec()
}

pub fn sel_phi_basis() -> Vec<KummerTriple> {
    [[K, -7 * K, -7], [2 * K, 7, 14 * K], [K, 1, K]]
        .map(Kummer::from_ints)
        .to_vec()
}

/// One column of a local table; `None` stands for the identity.
#[derive(Clone, Debug)]
pub struct TableColumn {
    pub place: LocalPlace,
    pub point: Option<(i64, i64)>,
    pub delta2: [i64; 5],
    pub lift: [i64; 5],
    pub difference: [i64; 5],
    pub rho: [i64; 3],
}

#[derive(Clone, Debug)]
pub struct Table {
    pub a: [i64; 3],
    pub columns: Vec<TableColumn>,
}

const ID5: [i64; 5] = [1; 5];
const ID3: [i64; 3] = [1; 3];

fn col(
    place: LocalPlace,
    point: Option<(i64, i64)>,
    delta2: [i64; 5],
    lift: [i64; 5],
    difference: [i64; 5],
    rho: [i64; 3],
) -> TableColumn {
    TableColumn {
        place,
        point,
        delta2,
        lift,
        difference,
        rho,
    }
}

fn trivial(place: LocalPlace) -> TableColumn {
    col(place, None, ID5, ID5, ID5, ID3)
}

/// The three local tables for `(k, k, 1)`, `(2, 2, 1)` and `(1, 7, 7)`.
pub fn tables() -> Vec<Table> {
    use LocalPlace::{Finite as F, Infinite as Inf};
    vec![
        Table {
            a: [K, K, 1],
            columns: vec![
                trivial(Inf),
                trivial(F(2)),
                col(F(3), Some((0, -K)), [-1, 3, -3, -1, -1], [-1, 1, -1, 1, 1], [1, 3, 3, -1, -1], [-3, -1, 3]),
                trivial(F(7)),
                col(F(113), Some((0, -2 * K)), [K, 3 * K, 3, 1, 1], [K, 1, K, 1, 1], [1, 3 * K, 3 * K, 1, 1], [3 * K, 1, 3 * K]),
            ],
        },
        Table {
            a: [2, 2, 1],
            columns: vec![
                trivial(Inf),
                col(F(2), Some((0, -2 * K)), [2, 6, 3, -1, -1], [2, 1, 2, 1, 1], [1, 6, 6, -1, -1], [-6, -1, 6]),
                col(F(3), Some((0, -K)), [-1, 3, -3, -1, -1], [-1, 1, -1, 1, 1], [1, 3, 3, -1, -1], [-3, -1, 3]),
                trivial(F(7)),
                trivial(F(113)),
            ],
        },
        Table {
            a: [1, 7, 7],
            columns: vec![
                trivial(Inf),
                col(F(2), Some((-2 * K, -K)), [1, 2, -2, -2, 2], [1, 1, -1, 1, -1], [1, 2, 2, -2, -2], [-1, -2, 2]),
                trivial(F(3)),
                col(F(7), Some((-2 * K, -K)), [1, 1, 7, 7, 1], [1, 1, 7, 1, 7], [1, 1, 1, 7, 7], [7, 7, 1]),
                trivial(F(113)),
            ],
        },
    ]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

struct Checks(Vec<Check>);

impl Checks {
    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn eq<T: PartialEq + std::fmt::Display>(&mut self, name: impl Into<String>, got: T, want: T) {
        let passed = got == want;
        self.check(name, passed, format!("got {got}, expected {want}"));
    }
}

fn q5(v: [i64; 5]) -> KummerQuintuple {
    Kummer::from_ints(v)
}

fn weierstrass_pair(c: &RichelotPair, x1: i64, x2: i64) -> MumfordDivisor {
    let idx = |x: i64| c.roots().iter().position(|r| *r == int(x)).expect("a root");
    MumfordDivisor::WeierstrassPair { i: idx(x1), j: idx(x2) }
}

/// Check every published value of the example. `options.symbol` is used for
/// every pairing evaluation, so a wrong Hilbert symbol shows up here.
pub fn verify(config: SearchConfig, options: &CtpOptions) -> Vec<Check> {
    let mut out = Checks(Vec::new());
    let c = curve();
    let places = PlaceSet::new([2, 3, 7, 113]);
    match c.bad_places() {
        Ok(s) => out.eq("bad places", s, places.clone()),
        Err(e) => out.check("bad places", false, e.to_string()),
    }

    out.eq("delta", c.delta().clone(), int(-7 * K * K));
    let l = [
        Poly::from_roots(int(-14 * K * K), &[int(3 * K)]),
        Poly::from_roots(int(1), &[int(-5 * K), int(K)]),
        Poly::from_roots(int(-1), &[int(-6 * K), int(2 * K)]),
    ];
    for (i, want) in l.into_iter().enumerate() {
        out.eq(format!("L{}", i + 1), c.l()[i].clone(), want);
    }

    let e = |i, j| TwoTorsionPoint::pair(i, j);
    out.eq("e2({w1, w2}, {w2, w3})", weil_e2(&e(0, 1), &e(1, 2)), -1);
    out.eq("e2({w1, w2}, {w3, w4})", weil_e2(&e(0, 1), &e(2, 3)), 1);
    out.eq("e_phi(1, 1)", weil_ephi(1, 1), 1);
    out.eq("e_phi(1, 2)", weil_ephi(1, 2), -1);
    out.eq("e_phi(3, 2)", weil_ephi(3, 2), -1);

    match psi_phi_to_two(&Kummer::from_ints([K, -7 * K, -7])) {
        Ok(q) => out.eq("psi_phi_to_two", q, q5([1, -7, -7, -7 * K, -7 * K])),
        Err(e) => out.check("psi_phi_to_two", false, e.to_string()),
    }
    for (q, t) in [([K, 1, K, 1, 1], [K, K, 1]), ([2, 6, 3, -1, -1], [2, 2, 1])] {
        match psi_two_to_phihat(&q5(q)) {
            Ok(got) => out.eq(format!("psi_two_to_phihat {q:?}"), got, Kummer::from_ints(t)),
            Err(e) => out.check(format!("psi_two_to_phihat {q:?}"), false, e.to_string()),
        }
    }
    for (t, q) in [([K, K, 1], [K, 1, K, 1, 1]), ([2, 2, 1], [2, 1, 2, 1, 1]), ([1, 7, 7], [1, 1, 7, 1, 7])] {
        out.eq(format!("lift {t:?}"), lift_phihat_to_two(&Kummer::from_ints(t)), q5(q));
    }
    let v3 = LocalPlace::Finite(3);
    let v113 = LocalPlace::Finite(113);
    out.eq(
        "quotient at 3",
        quotient(&q5([-1, 3, -3, -1, -1]).localize(v3), &q5([-1, 1, -1, 1, 1]).localize(v3)),
        q5([1, 3, 3, -1, -1]).localize(v3),
    );
    out.eq(
        "quotient at 113",
        quotient(&q5([K, 3 * K, 3, 1, 1]).localize(v113), &q5([K, 1, K, 1, 1]).localize(v113)),
        q5([1, 3 * K, 3 * K, 1, 1]).localize(v113),
    );
    for (p, q, t) in [
        (3, [1, 3, 3, -1, -1], [-3, -1, 3]),
        (2, [1, 6, 6, -1, -1], [-6, -1, 6]),
        (7, [1, 1, 1, 7, 7], [7, 7, 1]),
    ] {
        let v = LocalPlace::Finite(p);
        match descend_to_phi(&q5(q).localize(v)) {
            Ok(got) => out.eq(format!("descend at {p}"), got, Kummer::from_ints(t).localize(v)),
            Err(e) => out.check(format!("descend at {p}"), false, e.to_string()),
        }
    }

    out.eq(
        "mu_two {(0, 0), (-113, 0)} at 3",
        mu_two(&c, &weierstrass_pair(&c, 0, -K), v3),
        q5([-1, 3, -3, -1, -1]).localize(v3),
    );
    out.eq(
        "mu_two {(0, 0), (-226, 0)} at 113",
        mu_two(&c, &weierstrass_pair(&c, 0, -2 * K), v113),
        q5([K, 3 * K, 3, 1, 1]).localize(v113),
    );
    let domain = DescentModel::domain(&c);
    for ((x1, x2), t) in [((0, -2 * K), [2 * K, -14 * K, -7]), ((-2 * K, -K), [K, 7, 7 * K])] {
        let name = format!("mu_phihat {{({x1}, 0), ({x2}, 0)}}");
        match domain.mu_global(&weierstrass_pair(&c, x1, x2)) {
            Ok(got) => out.eq(name, got, Kummer::from_ints(t)),
            Err(e) => out.check(name, false, e.to_string()),
        }
    }

    let images = LocalImages::new(&c, config);
    for (t, p, want) in [([K, K, 1], 113, (0, -2 * K)), ([1, 7, 7], 2, (-2 * K, -K))] {
        let v = LocalPlace::Finite(p);
        let target = Kummer::from_ints(t).localize(v);
        let name = format!("local point for {t:?} at {p}");
        match find_local_point(&images, v, &target, None) {
            Ok(pt) => {
                let got = domain.mu_point(&pt, v);
                let published = domain.mu_local(&weierstrass_pair(&c, want.0, want.1), v);
                out.check(
                    name,
                    got == target && published == target,
                    format!("found {}", domain.describe_point(&pt)),
                );
            }
            Err(e) => out.check(name, false, e.to_string()),
        }
    }

    let report = match analyze_with(&images, None, options) {
        Ok(r) => r,
        Err(e) => {
            out.check("pipeline", false, e.to_string());
            return out.0;
        }
    };
    for t in &sel_phihat_basis()[..2] {
        out.check(
            format!("torsion image {t} in Sel^phihat"),
            report.sel_phihat.torsion_images.contains(t),
            "",
        );
    }
    for (name, group, published) in [
        ("Sel^phihat", &report.sel_phihat, sel_phihat_basis()),
        ("Sel^phi", &report.sel_phi, sel_phi_basis()),
    ] {
        let same = group.same_span(&published).unwrap_or(false);
        out.check(
            name,
            same && group.dim() == published.len() && group.status == ImageStatus::Certified,
            format!("dimension {}, status {:?}", group.dim(), group.status),
        );
    }

    let local = |a: [i64; 3], v: LocalPlace| {
        ctp_local(&images, &Kummer::from_ints(a), &Kummer::from_ints([2, 2, 1]), v, options).map(|r| r.0)
    };
    for (v, want) in [(v3, 1), (v113, 0)] {
        match local([K, K, 1], v) {
            Ok(x) => out.eq(format!("local pairing <(113, 113, 1), (2, 2, 1)> at {v}"), x, want),
            Err(e) => out.check(format!("local pairing at {v}"), false, e.to_string()),
        }
    }
    let global = |a: &KummerTriple, b: &KummerTriple| ctp_global(&images, &places, a, b, options);
    let basis = sel_phihat_basis();
    for (i, j, want) in [(2, 3, 1u8), (2, 4, 0)] {
        match global(&basis[i], &basis[j]) {
            Ok(x) => out.eq(format!("<{}, {}>", basis[i], basis[j]), x, want),
            Err(e) => out.check(format!("<{}, {}>", basis[i], basis[j]), false, e.to_string()),
        }
    }
    let kernel_ok = report
        .sel_phihat
        .elements()
        .iter()
        .all(|x| global(&basis[0], x).is_ok_and(|v| v == 0));
    out.check(format!("{} pairs trivially with the group", basis[0]), kernel_ok, "");

    match ctp_matrix(&images, &places, &basis, options) {
        Ok(m) => {
            let mut want = vec![vec![0u8; 5]; 5];
            want[2][3] = 1;
            want[3][2] = 1;
            out.check("pairing matrix", m.entries == want, format!("{:?}", m.entries));
            out.eq("radical dimension", m.radical_dim(), 3);
            for table in tables() {
                let a = Kummer::from_ints(table.a);
                let Some(prep) = m.prepared.iter().find(|p| p.a == a) else {
                    out.check(format!("table for {a}"), false, "not prepared");
                    continue;
                };
                for col in &table.columns {
                    let Some(step) = prep.steps.iter().find(|s| s.place == col.place) else {
                        out.check(format!("table for {a} at {}", col.place), false, "missing place");
                        continue;
                    };
                    let v = col.place;
                    let ok = step.delta2 == q5(col.delta2).localize(v)
                        && step.lift == q5(col.lift).localize(v)
                        && step.difference == q5(col.difference).localize(v)
                        && step.rho == Kummer::from_ints(col.rho).localize(v);
                    out.check(
                        format!("table for {a} at {v}"),
                        ok,
                        format!("P_v = {}, rho = {}", step.point_text, step.rho),
                    );
                }
            }
        }
        Err(e) => out.check("pairing matrix", false, e.to_string()),
    }

    let b = &report.bounds;
    out.eq("rank bound before", b.bound_before, 4);
    out.eq("rank bound after", b.bound_after, 2);
    out.eq("inferred dim Sel^2", b.inferred_sel2, 6);
    out.check(
        "exact sequence",
        b.exact_sequence == [2, 4, 2, 3, 6, 3] && b.alternating_sum == 0,
        format!("{:?}, sum {}", b.exact_sequence, b.alternating_sum),
    );
    out.check("images are certified", report.status == ImageStatus::Certified, "");
    out.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::localfield::{hilbert_symbol_classes, LocalSquareClass};

    #[test]
    fn every_published_value_checks_out() {
        let failed: Vec<Check> = verify(SearchConfig::default(), &CtpOptions::default())
            .into_iter()
            .filter(|c| !c.passed)
            .collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }

    fn broken_at_three(a: &LocalSquareClass, b: &LocalSquareClass) -> i8 {
        let s = hilbert_symbol_classes(a, b);
        if a.place() == LocalPlace::Finite(3) && !a.is_trivial() && !b.is_trivial() {
            -s
        } else {
            s
        }
    }

    #[test]
    fn a_wrong_symbol_is_caught() {
        let options = CtpOptions {
            symbol: broken_at_three,
            ..CtpOptions::default()
        };
        assert!(verify(SearchConfig::default(), &options).iter().any(|c| !c.passed));
    }
}
