use richelot::arith::{int, PlaceSet};
use richelot::cohomology::{Kummer, KummerTriple};
use richelot::ctp::{analyze, ctp_matrix, CtpOptions};
use richelot::curve::RichelotPair;
use richelot::localfield::LocalPlace;
use richelot::localpoints::{ImageStatus, LocalImages, SearchConfig, Side};
use richelot::poly::Poly;
use richelot::selmer::selmer_group;

fn curve() -> RichelotPair {
    RichelotPair::build(
        &int(1),
        &Poly::from_ints(&[226, 1]),
        &Poly::from_ints(&[0, -678, 1]),
        &Poly::from_ints(&[-113 * 791, -678, 1]),
    )
    .unwrap()
}

fn t(v: [i64; 3]) -> KummerTriple {
    Kummer::from_ints(v)
}

fn published_phihat() -> Vec<KummerTriple> {
    vec![
        t([2 * 113, -14 * 113, -7]),
        t([113, 7, 7 * 113]),
        t([113, 113, 1]),
        t([2, 2, 1]),
        t([1, 7, 7]),
    ]
}

#[test]
fn selmer_groups_match() {
    let c = curve();
    let images = LocalImages::new(&c, SearchConfig::default());
    let places = c.bad_places().unwrap();
    let hat = selmer_group(&images, Side::PhiHat, &places).unwrap();
    assert_eq!(hat.dim(), 5);
    assert!(hat.same_span(&published_phihat()).unwrap());
    assert_eq!(hat.status, ImageStatus::Certified);
    let phi = selmer_group(&images, Side::Phi, &places).unwrap();
    assert_eq!(phi.dim(), 3);
    let published = [t([113, -7 * 113, -7]), t([2 * 113, 7, 14 * 113]), t([113, 1, 113])];
    assert!(phi.same_span(&published).unwrap());
}

#[test]
fn pairing_matrix_and_local_tables() {
    let c = curve();
    let images = LocalImages::new(&c, SearchConfig::default());
    let places = PlaceSet::new([2, 3, 7, 113]);
    let m = ctp_matrix(&images, &places, &published_phihat(), &CtpOptions::default()).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let expect = ((i, j) == (2, 3) || (i, j) == (3, 2)) as u8;
            assert_eq!(m.entries[i][j], expect, "entry ({i}, {j})");
        }
    }
    assert_eq!(m.radical_dim(), 3);
    // a = (113, 113, 1) at v = 3 and v = 113.
    let steps = &m.prepared[2].steps;
    let at = |p: u64| steps.iter().find(|s| s.place == LocalPlace::Finite(p)).unwrap();
    let three = LocalPlace::Finite(3);
    assert_eq!(at(3).point_text, "{(0, 0), (-113, 0)}");
    assert_eq!(at(3).delta2, Kummer::from_ints([-1, 3, -3, -1, -1]).localize(three));
    assert_eq!(at(3).rho, t([-3, -1, 3]).localize(three));
    let p = LocalPlace::Finite(113);
    assert_eq!(at(113).point_text, "{(-226, 0), (0, 0)}");
    assert_eq!(at(113).rho, t([3 * 113, 1, 3 * 113]).localize(p));
}

#[test]
fn full_pipeline_bounds() {
    let (report, _) = analyze(&curve(), SearchConfig::default(), None, &CtpOptions::default()).unwrap();
    let b = &report.bounds;
    assert_eq!((b.bound_before, b.bound_after), (4, 2));
    assert_eq!(b.inferred_sel2, 6);
    assert_eq!(b.exact_sequence, [2, 4, 2, 3, 6, 3]);
    assert_eq!(b.alternating_sum, 0);
    assert!(report.torsion_in_radical);
    assert!(report.warnings.is_empty(), "{:?}", report.warnings);
}
