use thiserror::Error;

use crate::localfield::LocalPlace;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("zero has no square class")]
    Zero,
    #[error("prime factor {0} does not fit in 64 bits")]
    PrimeTooLarge(String),
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("square class has a prime outside the place set: {0}")]
    OutsidePlaceSet(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error("G{index} has degree {degree}; expected {expected}")]
    BadDegree {
        index: usize,
        degree: isize,
        expected: &'static str,
    },
    #[error("G{0} has an irrational root")]
    NonSplit(usize),
    #[error("G1*G2*G3 has a repeated root at {0}")]
    SingularModel(String),
    #[error("determinant of the G coefficient matrix vanishes; the Jacobian is a product of elliptic curves")]
    ProductOfElliptic,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("norm of the tuple is not a square")]
    NormViolation,
    #[error("local class at {place} is not in the image of the phi-to-2 map: {reason}")]
    NotInImage { place: LocalPlace, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("no local point with the requested image found at {place} (val_bound {val_bound}, residue exponent {residue_exponent}, {escalations} escalations)")]
    Exhausted {
        place: LocalPlace,
        val_bound: u32,
        residue_exponent: u32,
        escalations: u32,
    },
    #[error("p-adic precision {0} digits is insufficient")]
    InsufficientPrecision(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescentError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error("exact sequence bookkeeping is inconsistent: {0}")]
    Inconsistent(String),
    #[error("pairing requires elements of the phi-hat Selmer group; {0} is not one")]
    NotSelmer(String),
}
