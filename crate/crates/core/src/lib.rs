//! Cassels-Tate pairing on Selmer groups of Richelot-isogenous Jacobians of
//! genus-2 curves over Q.

pub mod arith;
pub mod error;
pub mod f2;
pub mod factor;
pub mod localfield;
pub mod curve;
pub mod poly;
pub mod cohomology;
pub mod localpoints;
pub mod selmer;
pub mod ctp;
pub mod example;
