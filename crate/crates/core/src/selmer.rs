//! Selmer groups of the two isogenies.
//!
//! Candidates are the triples `(α1, α2, α1 α2)` with `α1, α2 ∈ Q(S, 2)`; a
//! candidate is kept when it lies in the local image at every place of S.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{enumerate_q_s2, PlaceSet};
use crate::cohomology::{Kummer, KummerTriple};
use crate::error::DescentError;
use crate::f2::{F2Vec, Subspace};
use crate::localfield::LocalPlace;
use crate::localpoints::{ImageStatus, LocalImagePair, LocalImages, Side};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SelmerGroup {
    pub side: Side,
    pub places: PlaceSet,
    /// Images of rational 2-torsion first, then the remaining generators
    /// in enumeration order.
    pub basis: Vec<KummerTriple>,
    pub torsion_images: Vec<KummerTriple>,
    pub status: ImageStatus,
}

impl SelmerGroup {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn subspace(&self) -> Subspace {
        let coords: Vec<F2Vec> = self
            .basis
            .iter()
            .map(|t| t.coordinates(&self.places).expect("basis is supported on S"))
            .collect();
        Subspace::from_vectors(3 * self.places.rank(), coords.iter())
    }

    pub fn contains(&self, t: &KummerTriple) -> bool {
        match t.coordinates(&self.places) {
            Ok(c) => self.subspace().contains(&c),
            Err(_) => false,
        }
    }

    /// Coordinates of `t` in the basis.
    pub fn express(&self, t: &KummerTriple) -> Option<F2Vec> {
        self.subspace().express(&t.coordinates(&self.places).ok()?)
    }

    /// The element with the given coordinates in the basis.
    pub fn combine(&self, coords: &F2Vec) -> KummerTriple {
        coords
            .ones()
            .fold(Kummer::identity(), |acc, k| acc.mul(&self.basis[k]))
    }

    pub fn elements(&self) -> Vec<KummerTriple> {
        let n = self.dim();
        (0u64..1 << n)
            .map(|m| self.combine(&F2Vec::from_bits((0..n).map(|k| m >> k & 1 == 1))))
            .collect()
    }

    /// Do these triples span the same subgroup?
    pub fn same_span(&self, others: &[KummerTriple]) -> Result<bool, DescentError> {
        let coords = others
            .iter()
            .map(|t| t.coordinates(&self.places))
            .collect::<Result<Vec<_>, _>>()?;
        let theirs = Subspace::from_vectors(3 * self.places.rank(), coords.iter());
        Ok(theirs.same_span(&self.subspace()))
    }
}

/// Global images of the rational 2-torsion divisors of one model.
pub fn torsion_images(images: &LocalImages, side: Side) -> Result<Vec<KummerTriple>, DescentError> {
    let model = images.model(side);
    let mut out = Vec::new();
    for d in model.torsion_divisors() {
        out.push(model.mu_global(&d)?);
    }
    Ok(out)
}

/// Local image pairs at every place of S, computed in parallel.
pub fn local_images_at(
    images: &LocalImages,
    places: &PlaceSet,
) -> Result<Vec<Arc<LocalImagePair>>, DescentError> {
    places.places().par_iter().map(|v| images.get(*v)).collect()
}

fn in_local_image(t: &KummerTriple, pair: &LocalImagePair, side: Side) -> bool {
    pair.image(side).contains(&t.localize(pair.place))
}

pub fn selmer_group(images: &LocalImages, side: Side, places: &PlaceSet) -> Result<SelmerGroup, DescentError> {
    let mut local = local_images_at(images, places)?;
    let status = if local.iter().all(|p| p.status == ImageStatus::Certified) {
        ImageStatus::Certified
    } else {
        ImageStatus::Heuristic
    };
    // Most restrictive places first: the fraction passing is 2^(dim - 2 rank).
    local.sort_by_key(|p| {
        let dim = p.image(side).dim() as i64;
        (dim - 2 * p.place.class_rank() as i64, p.place)
    });
    let q = enumerate_q_s2(places);
    let passing: Vec<KummerTriple> = q
        .par_iter()
        .flat_map_iter(|a1| {
            let local = &local;
            q.iter().filter_map(move |a2| {
                let t = Kummer([a1.clone(), a2.clone(), a1.mul(a2)]);
                local.iter().all(|p| in_local_image(&t, p, side)).then_some(t)
            })
        })
        .collect();

    let torsion = torsion_images(images, side)?;
    let ambient = 3 * places.rank();
    let mut span = Subspace::new(ambient);
    let mut basis = Vec::new();
    let mut torsion_basis = Vec::new();
    for t in &torsion {
        let c = t.coordinates(places)?;
        if !passing.contains(t) {
            return Err(DescentError::Inconsistent(format!(
                "torsion image {t} is not in the {side} Selmer group"
            )));
        }
        if span.insert(&c) {
            basis.push(t.clone());
            torsion_basis.push(t.clone());
        }
    }
    for t in &passing {
        if span.insert(&t.coordinates(places)?) {
            basis.push(t.clone());
        }
    }
    if passing.len() != 1 << basis.len() {
        return Err(DescentError::Inconsistent(format!(
            "{} {side} Selmer candidates pass but they span a group of order 2^{}",
            passing.len(),
            basis.len()
        )));
    }
    Ok(SelmerGroup {
        side,
        places: places.clone(),
        basis,
        torsion_images: torsion_basis,
        status,
    })
}

/// Which places of S cut a candidate out; useful when explaining why a
/// triple is not in the Selmer group.
pub fn failing_places(
    images: &LocalImages,
    side: Side,
    places: &PlaceSet,
    t: &KummerTriple,
) -> Result<Vec<LocalPlace>, DescentError> {
    let mut out = Vec::new();
    for v in places.places() {
        if !in_local_image(t, &*images.get(v)?, side) {
            out.push(v);
        }
    }
    Ok(out)
}
