//! Entanglement dynamics of the double Jaynes–Cummings model.

pub mod analytic;
pub mod angle;
pub mod cli;
pub mod entanglement;
pub mod family;
pub mod geometry;
pub mod hilbert;
pub mod table;
