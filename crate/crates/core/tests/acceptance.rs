//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use richelot::arith::{int, prime_support, PlaceSet, Rational};
use richelot::cohomology::{
    descend_to_phi, lift_phihat_to_two, psi_phi_to_two, psi_two_to_phihat, Kummer, KummerTriple, LocalQuintuple,
};
use richelot::ctp::{analyze_with, ctp_matrix, prepare, CtpOptions, PairingMatrix};
use richelot::curve::RichelotPair;
use richelot::localfield::oracle::hilbert_oracle;
use richelot::localfield::{hilbert_symbol, LocalPlace, LocalSquareClass};
use richelot::localpoints::search::random_local_divisor;
use richelot::localpoints::{mu_phihat, mu_two, DescentModel, ImageStatus, LocalImages, SearchConfig, Side};
use richelot::poly::Poly;
use richelot::selmer::selmer_group;

type Outcome = Result<String, String>;

const K: i64 = 113;

fn curve() -> RichelotPair {
    RichelotPair::build(
        &int(1),
        &Poly::from_ints(&[2 * K, 1]),
        &Poly::from_ints(&[0, -6 * K, 1]),
        &Poly::from_ints(&[-7 * K * K, -6 * K, 1]),
    )
    .unwrap()
}

fn places() -> PlaceSet {
    PlaceSet::new([2, 3, 7, 113])
}

fn t3(v: [i64; 3]) -> KummerTriple {
    Kummer::from_ints(v)
}

fn basis() -> Vec<KummerTriple> {
    vec![
        t3([2 * K, -14 * K, -7]),
        t3([K, 7, 7 * K]),
        t3([K, K, 1]),
        t3([2, 2, 1]),
        t3([1, 7, 7]),
    ]
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn isogeny() -> Outcome {
    let c = curve();
    ensure(*c.delta() == int(-7 * K * K), || format!("delta = {}", c.delta()))?;
    let want = [
        Poly::from_ints(&[14 * K * K * 3 * K, -14 * K * K]),
        Poly::from_ints(&[-5 * K * K, 4 * K, 1]),
        Poly::from_ints(&[12 * K * K, -4 * K, -1]),
    ];
    for i in 0..3 {
        ensure(c.l()[i] == want[i], || format!("L{} = {}", i + 1, c.l()[i]))?;
    }
    Ok("delta and L1, L2, L3 exact".into())
}

fn selmer(images: &LocalImages) -> Outcome {
    let hat = selmer_group(images, Side::PhiHat, &places()).map_err(|e| e.to_string())?;
    let phi = selmer_group(images, Side::Phi, &places()).map_err(|e| e.to_string())?;
    ensure(hat.dim() == 5 && hat.same_span(&basis()).unwrap(), || {
        format!("Sel^phihat basis {:?}", hat.basis.iter().map(|t| t.to_string()).collect::<Vec<_>>())
    })?;
    let published = [t3([K, -7 * K, -7]), t3([2 * K, 7, 14 * K]), t3([K, 1, K])];
    ensure(phi.dim() == 3 && phi.same_span(&published).unwrap(), || {
        format!("Sel^phi basis {:?}", phi.basis.iter().map(|t| t.to_string()).collect::<Vec<_>>())
    })?;
    ensure(
        hat.status == ImageStatus::Certified && phi.status == ImageStatus::Certified,
        || "local images not certified".into(),
    )?;
    Ok("2^5 and 2^3, same span as published, certified".into())
}

struct Column {
    place: LocalPlace,
    delta2: [i64; 5],
    difference: [i64; 5],
    rho: [i64; 3],
}

fn column(place: LocalPlace, delta2: [i64; 5], difference: [i64; 5], rho: [i64; 3]) -> Column {
    Column {
        place,
        delta2,
        difference,
        rho,
    }
}

fn tables() -> Vec<([i64; 3], Vec<Column>)> {
    use LocalPlace::{Finite as F, Infinite as Inf};
    let id = |v| column(v, [1; 5], [1; 5], [1; 3]);
    vec![
        (
            [K, K, 1],
            vec![
                id(Inf),
                id(F(2)),
                column(F(3), [-1, 3, -3, -1, -1], [1, 3, 3, -1, -1], [-3, -1, 3]),
                id(F(7)),
                column(F(113), [K, 3 * K, 3, 1, 1], [1, 3 * K, 3 * K, 1, 1], [3 * K, 1, 3 * K]),
            ],
        ),
        (
            [2, 2, 1],
            vec![
                id(Inf),
                column(F(2), [2, 6, 3, -1, -1], [1, 6, 6, -1, -1], [-6, -1, 6]),
                column(F(3), [-1, 3, -3, -1, -1], [1, 3, 3, -1, -1], [-3, -1, 3]),
                id(F(7)),
                id(F(113)),
            ],
        ),
        (
            [1, 7, 7],
            vec![
                id(Inf),
                column(F(2), [1, 2, -2, -2, 2], [1, 2, 2, -2, -2], [-1, -2, 2]),
                id(F(3)),
                column(F(7), [1, 1, 7, 7, 1], [1, 1, 1, 7, 7], [7, 7, 1]),
                id(F(113)),
            ],
        ),
    ]
}

fn local_tables(matrix: &PairingMatrix) -> Outcome {
    let mut cells = 0;
    for (a, columns) in tables() {
        let a = t3(a);
        let prep = matrix.prepared.iter().find(|p| p.a == a).ok_or(format!("{a} missing"))?;
        for col in columns {
            let v = col.place;
            let step = prep.steps.iter().find(|s| s.place == v).ok_or(format!("{v} missing"))?;
            let q = |x: [i64; 5]| Kummer::from_ints(x).localize(v);
            ensure(step.delta2 == q(col.delta2), || format!("delta2 for {a} at {v}: {}", step.delta2))?;
            ensure(step.difference == q(col.difference), || {
                format!("difference for {a} at {v}: {}", step.difference)
            })?;
            ensure(step.rho == t3(col.rho).localize(v), || format!("rho for {a} at {v}: {}", step.rho))?;
            cells += 3;
        }
    }
    Ok(format!("{cells} table entries agree as local square classes"))
}

fn pairing_matrix(matrix: &PairingMatrix) -> Outcome {
    for i in 0..5 {
        for j in 0..5 {
            let want = ((i, j) == (2, 3) || (i, j) == (3, 2)) as u8;
            ensure(matrix.entries[i][j] == want, || format!("entry ({}, {}) = {}", i + 1, j + 1, matrix.entries[i][j]))?;
        }
    }
    ensure(matrix.radical_dim() == 3, || format!("radical dimension {}", matrix.radical_dim()))?;
    Ok("only (3,4) and (4,3) nontrivial; radical dimension 3".into())
}

fn bookkeeping(images: &LocalImages, start: Instant) -> Outcome {
    let report = analyze_with(images, None, &CtpOptions::default()).map_err(|e| e.to_string())?;
    let b = &report.bounds;
    ensure(b.bound_before == 4 && b.bound_after == 2, || {
        format!("bounds {} -> {}", b.bound_before, b.bound_after)
    })?;
    ensure(b.inferred_sel2 == 6, || format!("inferred dim Sel^2 = {}", b.inferred_sel2))?;
    ensure(b.exact_sequence == [2, 4, 2, 3, 6, 3] && b.alternating_sum == 0, || {
        format!("exact sequence {:?}, sum {}", b.exact_sequence, b.alternating_sum)
    })?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 300.0, || format!("pipeline took {secs:.1}s"))?;
    Ok(format!("bounds 4 -> 2, Sel^2 dim 6, dims (2,4,2,3,6,3); pipeline {secs:.1}s"))
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let mut n = int(rng.random_range(1..=30));
    for p in [2i64, 3, 5, 7, 113] {
        let e = rng.random_range(-1..=2i32);
        let pe = int(p).pow(e.unsigned_abs() as i32);
        n = if e >= 0 { n * pe } else { n / pe };
    }
    if rng.random::<bool>() {
        -n
    } else {
        n
    }
}

fn hilbert_suite() -> Outcome {
    let start = Instant::now();
    let place_list = [
        LocalPlace::Infinite,
        LocalPlace::Finite(2),
        LocalPlace::Finite(3),
        LocalPlace::Finite(5),
        LocalPlace::Finite(7),
        LocalPlace::Finite(113),
    ];
    let trials = 1200;
    let failures: Vec<String> = (0..trials)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ i as u64);
            let (a, b, c) = (random_rational(&mut rng), random_rational(&mut rng), random_rational(&mut rng));
            let v = place_list[i % place_list.len()];
            let h = |x: &Rational, y: &Rational| hilbert_symbol(x, y, v).unwrap();
            let mut bad = Vec::new();
            if h(&a, &b) != h(&b, &a) {
                bad.push("symmetry");
            }
            if h(&a, &(&b * &c)) != h(&a, &b) * h(&a, &c) {
                bad.push("bimultiplicativity");
            }
            if h(&a, &-a.clone()) != 1 {
                bad.push("(a, -a)");
            }
            let one_minus = int(1) - &a;
            if one_minus != int(0) && h(&a, &one_minus) != 1 {
                bad.push("(a, 1 - a)");
            }
            let mut support = prime_support(&a).unwrap();
            support.extend(prime_support(&b).unwrap());
            support.push(2);
            support.sort_unstable();
            support.dedup();
            let symbols: Vec<(LocalPlace, i8)> = std::iter::once(LocalPlace::Infinite)
                .chain(support.into_iter().map(LocalPlace::Finite))
                .map(|w| (w, hilbert_symbol(&a, &b, w).unwrap()))
                .collect();
            if symbols.iter().map(|s| s.1).product::<i8>() != 1 {
                bad.push("product formula");
            }
            match hilbert_oracle(&a, &b, v, 8).sign() {
                Some(s) if s == h(&a, &b) => {}
                Some(_) => bad.push("oracle disagrees"),
                None => bad.push("oracle inconclusive"),
            }
            (!bad.is_empty()).then(|| format!("({a}, {b}) at {v}: {}", bad.join(", ")))
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    ensure(failures.is_empty(), || format!("{} failures, first: {}", failures.len(), failures[0]))?;
    ensure(secs < 60.0, || format!("suite took {secs:.1}s"))?;
    Ok(format!("{trials} random triples, oracle agrees everywhere ({secs:.1}s)"))
}

fn choice_independence(baseline: &PairingMatrix) -> Outcome {
    let start = Instant::now();
    let c = curve();
    let results: Vec<Result<(PairingMatrix, bool), String>> = (1..=20u64)
        .into_par_iter()
        .map(|seed| {
            let config = SearchConfig {
                shuffle_seed: Some(seed),
                ..SearchConfig::default()
            };
            let images = LocalImages::new(&c, config);
            let options = CtpOptions {
                seed: Some(seed),
                perturb_lift: true,
                ..CtpOptions::default()
            };
            // The entries are the global pairings of every pair of basis elements.
            let m = ctp_matrix(&images, &places(), &basis(), &options).map_err(|e| e.to_string())?;
            let changed = m
                .prepared
                .iter()
                .zip(&baseline.prepared)
                .any(|(x, y)| x.lift != y.lift || x.steps.iter().zip(&y.steps).any(|(s, t)| s.point != t.point));
            Ok((m, changed))
        })
        .collect();
    let mut varied = 0;
    for (k, r) in results.into_iter().enumerate() {
        let (m, changed) = r?;
        ensure(m.entries == baseline.entries, || format!("rerun {} changed the matrix: {:?}", k + 1, m.entries))?;
        varied += changed as usize;
    }
    ensure(varied > 0, || "no rerun changed any choice".into())?;
    let secs = start.elapsed().as_secs_f64();
    Ok(format!("20 reruns, {varied} with different lifts or points, all values unchanged ({secs:.1}s)"))
}

fn all_local_quintuples(v: LocalPlace) -> Vec<LocalQuintuple> {
    let classes = LocalSquareClass::all(v);
    let n = classes.len();
    (0..n.pow(5))
        .map(|mut m| {
            Kummer(std::array::from_fn(|_| {
                let c = classes[m % n];
                m /= n;
                c
            }))
        })
        .collect()
}

fn structural(images: &LocalImages) -> Outcome {
    let start = Instant::now();
    let c = curve();
    // Exactness of H^1(J[phi]) -> H^1(J[2]) -> H^1(J^[phi^]) and norms.
    for v in [LocalPlace::Finite(2), LocalPlace::Finite(3), LocalPlace::Infinite] {
        for q in all_local_quintuples(v).into_iter().filter(|q| q.satisfies_norm()) {
            let image = psi_two_to_phihat(&q).map_err(|e| e.to_string())?;
            ensure(image.satisfies_norm(), || format!("psi_two_to_phihat({q}) breaks the norm"))?;
            let lifted = lift_phihat_to_two(&image);
            ensure(lifted.satisfies_norm() && psi_two_to_phihat(&lifted).unwrap() == image, || {
                format!("lift of {image} is not a preimage")
            })?;
            match descend_to_phi(&q) {
                Ok(t) => {
                    ensure(image.is_trivial(), || format!("{q} descends but maps to {image}"))?;
                    ensure(psi_phi_to_two(&t).unwrap() == q, || format!("{q} does not come from {t}"))?;
                }
                Err(_) => ensure(!image.is_trivial(), || format!("{q} is in the kernel but does not descend"))?,
            }
        }
    }
    // Commutativity of the descent maps on random local divisors.
    let domain = DescentModel::domain(&c);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let place_list = places().places();
    for i in 0..100 {
        let v = place_list[i % place_list.len()];
        let d = random_local_divisor(&domain, v, &mut rng);
        let two = mu_two(&c, &d, v);
        ensure(two.satisfies_norm(), || format!("mu_two breaks the norm on {d:?}"))?;
        ensure(psi_two_to_phihat(&two).unwrap() == mu_phihat(&c, &d, v), || {
            format!("diagram does not commute on {} at {v}", domain.describe(&d))
        })?;
    }
    // Torsion in the radical and bilinearity on the whole group.
    let report = analyze_with(images, None, &CtpOptions::default()).map_err(|e| e.to_string())?;
    ensure(report.torsion_in_radical, || "a torsion image pairs nontrivially".into())?;
    let group = report.sel_phihat.elements();
    let options = CtpOptions::default();
    let prepared = group
        .par_iter()
        .enumerate()
        .map(|(i, a)| prepare(images, &places(), a, &options, i as u64))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let n = group.len();
    let table: Vec<Vec<u8>> = prepared
        .iter()
        .map(|p| group.iter().map(|b| p.pair_with(b, options.symbol).0).collect())
        .collect();
    let index = |t: &KummerTriple| group.iter().position(|g| g == t).unwrap();
    for t in &report.sel_phihat.torsion_images {
        let i = index(t);
        ensure(table[i].iter().all(|&x| x == 0), || format!("{t} pairs nontrivially"))?;
    }
    for i in 0..n {
        for j in 0..n {
            let ij = index(&group[i].mul(&group[j]));
            for k in 0..n {
                ensure(table[ij][k] == table[i][k] ^ table[j][k], || {
                    format!("not additive in the first argument at ({i}, {j}, {k})")
                })?;
                let jk = index(&group[j].mul(&group[k]));
                ensure(table[i][jk] == table[i][j] ^ table[i][k], || {
                    format!("not additive in the second argument at ({i}, {j}, {k})")
                })?;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("suite took {secs:.1}s"))?;
    Ok(format!("exactness, norms, 100 divisors, torsion in radical, bilinear on all {n}^2 pairs ({secs:.1}s)"))
}

fn main() {
    let start = Instant::now();
    let images = LocalImages::new(&curve(), SearchConfig::default());
    let matrix = ctp_matrix(&images, &places(), &basis(), &CtpOptions::default());
    let with_matrix = |f: &dyn Fn(&PairingMatrix) -> Outcome| match &matrix {
        Ok(m) => f(m),
        Err(e) => Err(e.to_string()),
    };
    let results: Vec<(&str, Outcome)> = vec![
        ("isogeny construction", isogeny()),
        ("Selmer groups", selmer(&images)),
        ("local tables", with_matrix(&local_tables)),
        ("pairing matrix", with_matrix(&pairing_matrix)),
        ("rank bookkeeping", bookkeeping(&images, start)),
        ("Hilbert symbol suite", hilbert_suite()),
        ("choice independence", with_matrix(&choice_independence)),
        ("structural invariants", structural(&images)),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {}: {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
