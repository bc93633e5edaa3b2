pub mod algebra;
pub mod grid;
pub mod quad;
pub mod spec;
pub mod models;
pub mod simulate;
pub mod perturb;
pub mod cli;
