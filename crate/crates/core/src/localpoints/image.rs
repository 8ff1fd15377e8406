//! Local images of the descent maps and their certification.
//!
//! At each place the images of `J(Q_v)` under μ^φ̂ and of `Ĵ(Q_v)` under μ^φ
//! are exact annihilators of each other under the sum of Hilbert symbols,
//! so their dimensions add up to `2 dim Q_v*/(Q_v*)^2`. A search that reaches
//! that total has found both images completely.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::search::{
    centers, exponent_order, finite_batch, quadratic_coefficients, real_samples, residues, SearchConfig,
};
use super::{CurvePoint, DescentModel, LocalPoint, MumfordDivisor, Side};
use crate::cohomology::{cup_invariant, Kummer, LocalTriple};
use crate::curve::RichelotPair;
use crate::error::{CohomologyError, DescentError};
use crate::f2::{F2Vec, Subspace};
use crate::localfield::LocalPlace;
use crate::poly::Poly;

const MAX_RELATIONS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImageStatus {
    /// Both images found completely.
    Certified,
    /// The search stopped short; the images found may be too small.
    Heuristic,
}

/// Image of one descent map at one place, with a point of the Jacobian
/// behind every basis vector.
#[derive(Clone, Debug)]
pub struct LocalImage {
    place: LocalPlace,
    side: Side,
    basis: Vec<LocalTriple>,
    witnesses: Vec<LocalPoint>,
    subspace: Subspace,
    relations: Vec<LocalPoint>,
}

impl LocalImage {
    fn new(place: LocalPlace, side: Side) -> LocalImage {
        LocalImage {
            place,
            side,
            basis: Vec::new(),
            witnesses: Vec::new(),
            subspace: Subspace::new(3 * place.class_rank()),
            relations: Vec::new(),
        }
    }

    pub fn place(&self) -> LocalPlace {
        self.place
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[LocalTriple] {
        &self.basis
    }

    pub fn witnesses(&self) -> &[LocalPoint] {
        &self.witnesses
    }

    /// Local points with trivial image, found along the way.
    pub fn relations(&self) -> &[LocalPoint] {
        &self.relations
    }

    pub fn contains(&self, t: &LocalTriple) -> bool {
        self.subspace.contains(&t.coordinates())
    }

    /// A local point with image `t`, built from the witnesses.
    pub fn express(&self, t: &LocalTriple) -> Option<LocalPoint> {
        let combo = self.subspace.express(&t.coordinates())?;
        Some(
            combo
                .ones()
                .fold(LocalPoint::identity(), |acc, k| acc.plus(&self.witnesses[k])),
        )
    }

    /// Every element of the image.
    pub fn elements(&self) -> Vec<LocalTriple> {
        let n = self.basis.len();
        (0u32..1 << n)
            .map(|mask| {
                (0..n)
                    .filter(|k| mask >> k & 1 == 1)
                    .fold(Kummer::identity_at(self.place), |acc, k| acc.mul(&self.basis[k]))
            })
            .collect()
    }

    /// Record the image of `pt`; returns `true` if the span grew.
    fn offer(&mut self, model: &DescentModel, pt: LocalPoint) -> bool {
        let image = model.mu_point(&pt, self.place);
        let coords = image.coordinates();
        if self.subspace.insert(&coords) {
            self.basis.push(image);
            self.witnesses.push(pt);
            return true;
        }
        if self.relations.len() < MAX_RELATIONS && !pt.is_identity() {
            let back = self.express(&image).expect("image lies in the span");
            let relation = pt.plus(&back);
            if !relation.is_identity() && !self.relations.contains(&relation) {
                self.relations.push(relation);
            }
        }
        false
    }
}

/// The two local images at one place.
#[derive(Clone, Debug)]
pub struct LocalImagePair {
    pub place: LocalPlace,
    pub phihat: LocalImage,
    pub phi: LocalImage,
    pub status: ImageStatus,
}

impl LocalImagePair {
    pub fn image(&self, side: Side) -> &LocalImage {
        match side {
            Side::Phi => &self.phi,
            Side::PhiHat => &self.phihat,
        }
    }

    /// `2 dim Q_v*/(Q_v*)^2`, the sum of the two dimensions when complete.
    pub fn expected_total(&self) -> usize {
        2 * self.place.class_rank()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.phihat.dim(), self.phi.dim())
    }

    fn finish(mut self) -> Result<LocalImagePair, DescentError> {
        for a in &self.phihat.basis {
            for b in &self.phi.basis {
                if cup_invariant(a, b) != 0 {
                    return Err(DescentError::Inconsistent(format!(
                        "local images at {} are not orthogonal: {a} and {b}",
                        self.place
                    )));
                }
            }
        }
        let total = self.phihat.dim() + self.phi.dim();
        if total > self.expected_total() {
            return Err(DescentError::Inconsistent(format!(
                "local images at {} have total dimension {total} > {}",
                self.place,
                self.expected_total()
            )));
        }
        self.status = if total == self.expected_total() {
            ImageStatus::Certified
        } else {
            ImageStatus::Heuristic
        };
        Ok(self)
    }
}

struct Collector<'a> {
    model: &'a DescentModel,
    image: LocalImage,
    base: Option<CurvePoint>,
}

impl<'a> Collector<'a> {
    fn new(model: &'a DescentModel, place: LocalPlace) -> Collector<'a> {
        let base = model.has_infinity(place).then_some(CurvePoint::Infinity);
        let mut c = Collector {
            model,
            image: LocalImage::new(place, model.side()),
            base,
        };
        for d in model.torsion_divisors() {
            c.image.offer(model, LocalPoint::single(d));
        }
        c
    }

    fn offer_x(&mut self, x: &crate::arith::Rational) {
        let p = CurvePoint::Affine(x.clone());
        if !self.model.is_local_point(&p, self.image.place) {
            return;
        }
        match &self.base {
            None => self.base = Some(p),
            Some(b) => {
                let d = MumfordDivisor::RationalPair { p, q: b.clone() };
                self.image.offer(self.model, LocalPoint::single(d));
            }
        }
    }
}

fn total(a: &Collector, b: &Collector) -> usize {
    a.image.dim() + b.image.dim()
}

/// Search for both local images at `place`.
pub fn compute_pair(
    domain: &DescentModel,
    codomain: &DescentModel,
    place: LocalPlace,
    config: &SearchConfig,
) -> Result<LocalImagePair, DescentError> {
    let mut hat = Collector::new(domain, place);
    let mut phi = Collector::new(codomain, place);
    let target = 2 * place.class_rank();
    let mut rng = config.shuffle_seed.map(ChaCha8Rng::seed_from_u64);
    match place {
        LocalPlace::Infinite => {
            for x in real_samples(domain) {
                hat.offer_x(&x);
            }
            for x in real_samples(codomain) {
                phi.offer_x(&x);
            }
        }
        LocalPlace::Finite(p) => {
            let cs = centers(&[domain, codomain]);
            'rounds: for round in config.rounds() {
                let rs = residues(p, round.residue_exponent, round.budget);
                for k in exponent_order(round.val_bound) {
                    let mut batch = finite_batch(&cs, p, k, &rs);
                    if let Some(rng) = rng.as_mut() {
                        batch.shuffle(rng);
                    }
                    for x in &batch {
                        hat.offer_x(x);
                        phi.offer_x(x);
                        if total(&hat, &phi) >= target {
                            break 'rounds;
                        }
                    }
                }
            }
            if total(&hat, &phi) < target {
                quadratic_stage(&mut hat, &mut phi, p, config, target);
            }
        }
    }
    LocalImagePair {
        place,
        phihat: hat.image,
        phi: phi.image,
        status: ImageStatus::Heuristic,
    }
    .finish()
}

fn quadratic_stage<'a>(hat: &mut Collector<'a>, phi: &mut Collector<'a>, p: u64, config: &SearchConfig, target: usize) {
    let coeffs = quadratic_coefficients(p, config.val_bound, config.quadratic_budget);
    let one = crate::arith::int(1);
    for a in &coeffs {
        for b in &coeffs {
            let monic = Poly::new(vec![b.clone(), a.clone(), one.clone()]);
            if monic.rational_roots().is_some() {
                continue;
            }
            for c in [&mut *hat, &mut *phi] {
                let (c0, c1) = c.model.f().rem_monic_quadratic(a, b);
                let norm = &c0 * &c0 - a * &c0 * &c1 + b * &c1 * &c1;
                if norm.is_zero() {
                    continue;
                }
                let d = MumfordDivisor::Quadratic { a: a.clone(), b: b.clone() };
                if c.model.is_local_divisor_with(&d, c.image.place, config.precision).unwrap_or(false) {
                    c.image.offer(c.model, LocalPoint::single(d));
                }
            }
            if total(hat, phi) >= target {
                return;
            }
        }
    }
}

/// Local images at every place, computed on demand and cached.
pub struct LocalImages {
    curve: RichelotPair,
    domain: DescentModel,
    codomain: DescentModel,
    config: SearchConfig,
    cache: RwLock<HashMap<LocalPlace, Arc<LocalImagePair>>>,
}

impl LocalImages {
    pub fn new(curve: &RichelotPair, config: SearchConfig) -> LocalImages {
        LocalImages {
            curve: curve.clone(),
            domain: DescentModel::domain(curve),
            codomain: DescentModel::codomain(curve),
            config,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn curve(&self) -> &RichelotPair {
        &self.curve
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn model(&self, side: Side) -> &DescentModel {
        match side {
            Side::Phi => &self.codomain,
            Side::PhiHat => &self.domain,
        }
    }

    pub fn get(&self, place: LocalPlace) -> Result<Arc<LocalImagePair>, DescentError> {
        if let Some(pair) = self.cache.read().unwrap().get(&place) {
            return Ok(pair.clone());
        }
        let pair = Arc::new(compute_pair(&self.domain, &self.codomain, place, &self.config)?);
        let mut cache = self.cache.write().unwrap();
        Ok(cache.entry(place).or_insert(pair).clone())
    }

    pub fn export(&self) -> Vec<LocalImageRecord> {
        let cache = self.cache.read().unwrap();
        let mut places: Vec<_> = cache.keys().copied().collect();
        places.sort();
        places
            .into_iter()
            .map(|place| {
                let pair = &cache[&place];
                let side = |img: &LocalImage| SideRecord {
                    basis: img.basis.clone(),
                    witnesses: img.witnesses.clone(),
                    relations: img.relations.clone(),
                };
                LocalImageRecord {
                    place,
                    status: pair.status,
                    phihat: side(&pair.phihat),
                    phi: side(&pair.phi),
                }
            })
            .collect()
    }

    /// Load stored images after checking every witness again.
    pub fn import(&self, records: &[LocalImageRecord]) -> Result<(), DescentError> {
        for rec in records {
            let rebuild = |model: &DescentModel, side: &SideRecord| -> Result<LocalImage, DescentError> {
                let mut img = LocalImage::new(rec.place, model.side());
                for d in model.torsion_divisors() {
                    img.offer(model, LocalPoint::single(d));
                }
                for w in &side.witnesses {
                    for d in &w.parts {
                        if !model.is_local_divisor(d, rec.place)? {
                            return Err(stale(rec.place, "witness is not a local point"));
                        }
                    }
                    img.offer(model, w.clone());
                }
                let stored = Subspace::from_vectors(img.subspace.ambient(), side.basis.iter().map(|t| t.coordinates()).collect::<Vec<F2Vec>>().iter());
                if !stored.same_span(&img.subspace) {
                    return Err(stale(rec.place, "stored basis does not match its witnesses"));
                }
                for r in &side.relations {
                    if model.mu_point(r, rec.place).is_trivial() && img.relations.len() < MAX_RELATIONS {
                        img.relations.push(r.clone());
                    }
                }
                Ok(img)
            };
            let pair = LocalImagePair {
                place: rec.place,
                phihat: rebuild(&self.domain, &rec.phihat)?,
                phi: rebuild(&self.codomain, &rec.phi)?,
                status: ImageStatus::Heuristic,
            }
            .finish()?;
            if pair.status != rec.status {
                return Err(stale(rec.place, "stored status does not match"));
            }
            self.cache.write().unwrap().insert(rec.place, Arc::new(pair));
        }
        Ok(())
    }
}

fn stale(place: LocalPlace, reason: &str) -> DescentError {
    DescentError::Inconsistent(format!("cached local image at {place}: {reason}"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideRecord {
    pub basis: Vec<LocalTriple>,
    pub witnesses: Vec<LocalPoint>,
    pub relations: Vec<LocalPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalImageRecord {
    pub place: LocalPlace,
    pub status: ImageStatus,
    pub phihat: SideRecord,
    pub phi: SideRecord,
}

/// A point `P_v` of `J(Q_v)` with `μ^φ̂(P_v) = target`.
///
/// Rational 2-torsion points are tried first, in the order of
/// `TwoTorsionPoint::all`; otherwise the point is assembled from the search
/// witnesses. With `rng`, the torsion order is shuffled and a random
/// combination of trivial-image points is added.
pub fn find_local_point(
    images: &LocalImages,
    place: LocalPlace,
    target: &LocalTriple,
    rng: Option<&mut ChaCha8Rng>,
) -> Result<LocalPoint, DescentError> {
    let pair = images.get(place)?;
    let model = images.model(Side::PhiHat);
    let mut torsion: Vec<LocalPoint> = model
        .torsion_divisors()
        .into_iter()
        .filter(|d| model.mu_local(d, place) == *target)
        .map(LocalPoint::single)
        .collect();
    let not_found = || {
        DescentError::Cohomology(CohomologyError::NotInImage {
            place,
            reason: format!("{target} is not in the local image of J"),
        })
    };
    match rng {
        None => match torsion.into_iter().next() {
            Some(pt) => Ok(pt),
            None => pair.phihat.express(target).ok_or_else(not_found),
        },
        Some(rng) => {
            torsion.shuffle(rng);
            let mut pt = match torsion.choose(rng) {
                Some(pt) => pt.clone(),
                None => pair.phihat.express(target).ok_or_else(not_found)?,
            };
            for r in pair.phihat.relations() {
                if rng.random::<bool>() {
                    pt = pt.plus(r);
                }
            }
            Ok(pt)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::poly::Poly;

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
    fn worked_example_dimensions() {
        let images = LocalImages::new(&example(), SearchConfig::default());
        let expect = [
            (LocalPlace::Infinite, (1, 1)),
            (LocalPlace::Finite(2), (4, 2)),
            (LocalPlace::Finite(3), (3, 1)),
            (LocalPlace::Finite(7), (2, 2)),
            (LocalPlace::Finite(113), (2, 2)),
        ];
        for (place, dims) in expect {
            let pair = images.get(place).unwrap();
            assert_eq!(pair.dims(), dims, "at {place}");
            assert_eq!(pair.status, ImageStatus::Certified);
        }
    }

    #[test]
    fn witnesses_reproduce_their_images() {
        let images = LocalImages::new(&example(), SearchConfig::default());
        let place = LocalPlace::Finite(2);
        let pair = images.get(place).unwrap();
        for img in [&pair.phihat, &pair.phi] {
            let model = images.model(img.side());
            for (b, w) in img.basis().iter().zip(img.witnesses()) {
                assert_eq!(model.mu_point(w, place), *b);
            }
            for r in img.relations() {
                assert!(model.mu_point(r, place).is_trivial());
            }
            for t in img.elements() {
                let pt = img.express(&t).unwrap();
                assert_eq!(model.mu_point(&pt, place), t);
            }
        }
        let records = images.export();
        let fresh = LocalImages::new(&example(), SearchConfig::default());
        fresh.import(&records).unwrap();
        assert_eq!(fresh.export(), records);
    }
}
