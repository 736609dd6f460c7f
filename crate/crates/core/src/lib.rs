pub mod geometry;
pub mod mst;
pub mod observables;
pub mod poles;
pub mod specfun;
pub mod cli;
