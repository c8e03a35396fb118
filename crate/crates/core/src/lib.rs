pub mod catalog;
pub mod certify;
pub mod geometry;
pub mod graphs;
pub mod izmestiev;
pub mod metrics;
pub mod spectra;
pub mod symmetry;
