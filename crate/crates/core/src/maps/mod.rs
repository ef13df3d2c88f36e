//! Chain maps between complexes of diagrams related by grid moves.

pub mod commutation;
pub mod cyclic;
pub mod domains;
pub mod fine;
pub mod signing;
pub mod sparse;
pub mod stabilization;
