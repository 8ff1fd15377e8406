//! The Cassels-Tate pairing on Sel^φ̂ and the rank bounds it gives.
//!
//! For `a = (α1, α2, α3)` take the global lift `a1 = (α1, 1, α2, 1, α3)`.
//! At each place pick `P_v ∈ J(Q_v)` with `μ^φ̂(P_v) = a_v`; then
//! `μ(P_v) a1_v` has the shape `(1, b, b, c, c)` and descends to
//! `ρ_v = (bc, c, b)`. The pairing with `a'` is the sum over v of the local
//! invariants of `ρ_v ∪ a'_v`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{enumerate_q_s2, PlaceSet};
use crate::cohomology::{
    cup_invariant_with, descend_to_phi, lift_phihat_to_two, psi_phi_to_two, Kummer, KummerQuintuple,
    KummerTriple, LocalQuintuple, LocalTriple,
};
use crate::curve::RichelotPair;
use crate::error::DescentError;
use crate::f2::{left_radical, right_radical, F2Vec, Subspace};
use crate::localfield::{hilbert_symbol_classes, HilbertFn, LocalPlace};
use crate::localpoints::{
    find_local_point, mu_two_point_sum, ImageStatus, LocalImages, LocalPoint, SearchConfig, Side,
};
use crate::selmer::{selmer_group, SelmerGroup};

#[derive(Clone, Copy, Debug)]
pub struct CtpOptions {
    /// Randomizes the choice of local points and, with `perturb_lift`, the
    /// global lift. The pairing must not depend on either.
    pub seed: Option<u64>,
    /// Multiply the lift by `psi_phi_to_two(t)` for a random `t`.
    pub perturb_lift: bool,
    pub symbol: HilbertFn,
}

impl Default for CtpOptions {
    fn default() -> Self {
        CtpOptions {
            seed: None,
            perturb_lift: false,
            symbol: hilbert_symbol_classes,
        }
    }
}

/// One column of the local computation for a fixed `a`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalStep {
    pub place: LocalPlace,
    pub point: LocalPoint,
    /// `P_v` in the notation of the curve, e.g. `{(0, 0), (-113, 0)}`.
    pub point_text: String,
    pub delta2: LocalQuintuple,
    pub lift: LocalQuintuple,
    pub difference: LocalQuintuple,
    pub rho: LocalTriple,
}

/// Everything about `a` that does not depend on the second argument.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PreparedElement {
    pub a: KummerTriple,
    pub lift: KummerQuintuple,
    pub steps: Vec<LocalStep>,
}

impl PreparedElement {
    /// Local invariants of `ρ_v ∪ a'_v`, one per place, and their sum.
    pub fn pair_with(&self, a_prime: &KummerTriple, symbol: HilbertFn) -> (u8, Vec<u8>) {
        let local: Vec<u8> = self
            .steps
            .iter()
            .map(|s| cup_invariant_with(&s.rho, &a_prime.localize(s.place), symbol))
            .collect();
        (local.iter().fold(0, |acc, x| acc ^ x), local)
    }
}

fn random_twist(places: &PlaceSet, rng: &mut ChaCha8Rng) -> KummerTriple {
    let q = enumerate_q_s2(places);
    let b = q[rng.random_range(0..q.len())].clone();
    let c = q[rng.random_range(0..q.len())].clone();
    let a = b.mul(&c);
    Kummer([a, b, c])
}

/// Check `a` against the local images and do the local steps.
pub fn prepare(
    images: &LocalImages,
    places: &PlaceSet,
    a: &KummerTriple,
    options: &CtpOptions,
    stream: u64,
) -> Result<PreparedElement, DescentError> {
    if !a.satisfies_norm() {
        return Err(DescentError::NotSelmer(format!("{a} (norm is not a square)")));
    }
    let mut rng = options.seed.map(|s| {
        let mut r = ChaCha8Rng::seed_from_u64(s);
        r.set_stream(stream);
        r
    });
    let mut lift = lift_phihat_to_two(a);
    if options.perturb_lift {
        if let Some(rng) = rng.as_mut() {
            lift = lift.mul(&psi_phi_to_two(&random_twist(places, rng))?);
        }
    }
    let curve = images.curve();
    let model = images.model(Side::PhiHat);
    let mut steps = Vec::new();
    for place in places.places() {
        let target = a.localize(place);
        let pair = images.get(place)?;
        if !pair.phihat.contains(&target) {
            return Err(DescentError::NotSelmer(format!("{a} (fails at {place})")));
        }
        let point = find_local_point(images, place, &target, rng.as_mut())?;
        let delta2 = mu_two_point_sum(curve, &point, place);
        let lift_v = lift.localize(place);
        let difference = delta2.mul(&lift_v);
        let rho = descend_to_phi(&difference)?;
        steps.push(LocalStep {
            place,
            point_text: model.describe_point(&point),
            point,
            delta2,
            lift: lift_v,
            difference,
            rho,
        });
    }
    Ok(PreparedElement {
        a: a.clone(),
        lift,
        steps,
    })
}

/// Local invariant of the pairing at one place.
pub fn ctp_local(
    images: &LocalImages,
    a: &KummerTriple,
    a_prime: &KummerTriple,
    place: LocalPlace,
    options: &CtpOptions,
) -> Result<(u8, LocalStep), DescentError> {
    let places = PlaceSet::new(place.prime());
    let prepared = prepare(images, &places, a, options, 0)?;
    let step = prepared
        .steps
        .into_iter()
        .find(|s| s.place == place)
        .expect("place was included");
    let value = cup_invariant_with(&step.rho, &a_prime.localize(place), options.symbol);
    Ok((value, step))
}

/// `<a, a'>` as an element of Z/2 (0 for +1, 1 for -1).
pub fn ctp_global(
    images: &LocalImages,
    places: &PlaceSet,
    a: &KummerTriple,
    a_prime: &KummerTriple,
    options: &CtpOptions,
) -> Result<u8, DescentError> {
    check_selmer(images, places, a_prime)?;
    let prepared = prepare(images, places, a, options, 0)?;
    Ok(prepared.pair_with(a_prime, options.symbol).0)
}

fn check_selmer(images: &LocalImages, places: &PlaceSet, t: &KummerTriple) -> Result<(), DescentError> {
    for place in places.places() {
        if !images.get(place)?.phihat.contains(&t.localize(place)) {
            return Err(DescentError::NotSelmer(format!("{t} (fails at {place})")));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairingMatrix {
    pub basis: Vec<KummerTriple>,
    /// Entries in Z/2; 1 means the pairing is -1.
    pub entries: Vec<Vec<u8>>,
    pub per_place: Vec<(LocalPlace, Vec<Vec<u8>>)>,
    pub symmetric: bool,
    /// Basis of the (left) radical as elements of the group.
    pub radical: Vec<KummerTriple>,
    pub prepared: Vec<PreparedElement>,
}

impl PairingMatrix {
    pub fn radical_dim(&self) -> usize {
        self.radical.len()
    }

    /// Entries as signs, the way the pairing is usually written.
    pub fn signs(&self) -> Vec<Vec<i8>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|&e| if e == 1 { -1 } else { 1 }).collect())
            .collect()
    }
}

pub fn ctp_matrix(
    images: &LocalImages,
    places: &PlaceSet,
    basis: &[KummerTriple],
    options: &CtpOptions,
) -> Result<PairingMatrix, DescentError> {
    for t in basis {
        check_selmer(images, places, t)?;
    }
    let prepared: Vec<PreparedElement> = basis
        .par_iter()
        .enumerate()
        .map(|(i, a)| prepare(images, places, a, options, i as u64))
        .collect::<Result<_, _>>()?;
    let n = basis.len();
    let place_list = places.places();
    let mut entries = vec![vec![0u8; n]; n];
    let mut per_place: Vec<(LocalPlace, Vec<Vec<u8>>)> =
        place_list.iter().map(|v| (*v, vec![vec![0u8; n]; n])).collect();
    for (i, p) in prepared.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let (total, local) = p.pair_with(b, options.symbol);
            entries[i][j] = total;
            for (k, x) in local.into_iter().enumerate() {
                per_place[k].1[i][j] = x;
            }
        }
    }
    let symmetric = (0..n).all(|i| (0..n).all(|j| entries[i][j] == entries[j][i]));
    let combine = |c: &F2Vec| c.ones().fold(Kummer::identity(), |acc: KummerTriple, k| acc.mul(&basis[k]));
    let radical = left_radical(&entries).iter().map(combine).collect();
    Ok(PairingMatrix {
        basis: basis.to_vec(),
        entries,
        per_place,
        symmetric,
        radical,
        prepared,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescentReport {
    pub kernel_phi: usize,
    pub kernel_phihat: usize,
    pub sel_phi: usize,
    pub sel_phihat: usize,
    pub torsion_phi: usize,
    pub torsion_phihat: usize,
    pub radical: usize,
    /// Dimension of the image of Ĵ[φ̂](Q) in Sel^φ.
    pub torsion_kernel: usize,
    pub bound_before: usize,
    pub bound_after: usize,
    /// Upper bound for dim Sel^2(J), exact when the image of Sel^2(J) in
    /// Sel^φ̂ is the whole radical.
    pub inferred_sel2: usize,
    /// Dimensions of J[φ](Q), J[2](Q), Ĵ[φ̂](Q), Sel^φ, Sel^2, im(Sel^2).
    pub exact_sequence: [usize; 6],
    pub alternating_sum: i64,
}

pub fn rank_report(
    images: &LocalImages,
    sel_phi: &SelmerGroup,
    sel_phihat: &SelmerGroup,
    radical: usize,
) -> Result<DescentReport, DescentError> {
    let codomain = images.model(Side::Phi);
    let mut span = Subspace::new(3 * sel_phi.places.rank());
    for k in 0..3 {
        let t = codomain.mu_global(&codomain.factor_divisor(k))?;
        span.insert(&t.coordinates(&sel_phi.places)?);
    }
    let k = span.dim();
    if k != 0 {
        return Err(DescentError::Inconsistent(format!(
            "the kernel of the dual isogeny maps to a subgroup of dimension {k} in Sel^phi"
        )));
    }
    let (s, t) = (sel_phi.dim(), sel_phihat.dim());
    let (tp, th) = (sel_phi.torsion_images.len(), sel_phihat.torsion_images.len());
    // All of J[2] is rational, so J[φ](Q), J[2](Q), Ĵ[φ̂](Q) have dimensions 2, 4, 2.
    let (kp, kh) = (2, 2);
    let exact_sequence = [kp, 4, kh, s, s - k + radical, radical];
    let alternating_sum = exact_sequence
        .iter()
        .enumerate()
        .map(|(i, &d)| if i % 2 == 0 { d as i64 } else { -(d as i64) })
        .sum();
    Ok(DescentReport {
        kernel_phi: kp,
        kernel_phihat: kh,
        sel_phi: s,
        sel_phihat: t,
        torsion_phi: tp,
        torsion_phihat: th,
        radical,
        torsion_kernel: k,
        bound_before: (s + t).saturating_sub(kp + kh),
        bound_after: (s + radical).saturating_sub(kp + kh),
        inferred_sel2: s - k + radical,
        exact_sequence,
        alternating_sum,
    })
}

/// The whole computation for one curve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineReport {
    pub places: PlaceSet,
    pub sel_phihat: SelmerGroup,
    pub sel_phi: SelmerGroup,
    pub matrix: PairingMatrix,
    pub bounds: DescentReport,
    /// Set when the pairing was evaluated on a subset of S only.
    pub partial: bool,
    pub torsion_in_radical: bool,
    pub status: ImageStatus,
    pub warnings: Vec<String>,
}

pub fn analyze(
    curve: &RichelotPair,
    config: SearchConfig,
    restrict: Option<PlaceSet>,
    options: &CtpOptions,
) -> Result<(PipelineReport, LocalImages), DescentError> {
    let images = LocalImages::new(curve, config);
    let report = analyze_with(&images, restrict, options)?;
    Ok((report, images))
}

/// With `restrict`, the pairing is evaluated only at those places (plus
/// the real place); the local breakdown is exact but the global values and
/// bounds are partial.
pub fn analyze_with(
    images: &LocalImages,
    restrict: Option<PlaceSet>,
    options: &CtpOptions,
) -> Result<PipelineReport, DescentError> {
    let places = images.curve().bad_places()?;
    let partial = restrict.as_ref().is_some_and(|r| *r != places);
    let pairing_places = restrict.unwrap_or_else(|| places.clone());
    let sel_phihat = selmer_group(images, Side::PhiHat, &places)?;
    let sel_phi = selmer_group(images, Side::Phi, &places)?;
    let matrix = ctp_matrix(images, &pairing_places, &sel_phihat.basis, options)?;
    let mut warnings = Vec::new();
    if partial {
        warnings.push(format!(
            "pairing restricted to {pairing_places}; global values and bounds are partial"
        ));
    }
    if !matrix.symmetric {
        warnings.push("pairing matrix is not symmetric; using its left radical".to_string());
        let right = right_radical(&matrix.entries).len();
        if right != matrix.radical_dim() {
            warnings.push(format!(
                "left and right radicals differ in dimension ({} vs {right})",
                matrix.radical_dim()
            ));
        }
    }
    let radical_space = Subspace::from_vectors(
        3 * places.rank(),
        matrix
            .radical
            .iter()
            .map(|t| t.coordinates(&places))
            .collect::<Result<Vec<_>, _>>()?
            .iter(),
    );
    let mut torsion_in_radical = true;
    for t in &sel_phihat.torsion_images {
        if !radical_space.contains(&t.coordinates(&places)?) {
            torsion_in_radical = false;
            warnings.push(format!("torsion image {t} pairs nontrivially"));
        }
    }
    let status = if sel_phi.status == ImageStatus::Certified && sel_phihat.status == ImageStatus::Certified {
        ImageStatus::Certified
    } else {
        warnings.push("some local images are heuristic; Selmer groups may be too small".to_string());
        ImageStatus::Heuristic
    };
    let bounds = rank_report(images, &sel_phi, &sel_phihat, matrix.radical_dim())?;
    Ok(PipelineReport {
        places,
        sel_phihat,
        sel_phi,
        matrix,
        bounds,
        partial,
        torsion_in_radical,
        status,
        warnings,
    })
}
