//! Closed-form generating functionals and densities for local models.
//!
//! Every evaluator works on the periodic box of its [`ModelSpec`]. Functions
//! of `H = μ − DΔ` act by their spectral symbol in momentum space, so
//! convolutions with the heat kernel are exact for the grid's trigonometric
//! interpolant.

mod death;
mod heat;
mod local;
mod tree;

pub use death::{death_diffusion_density, death_diffusion_density_grid, death_diffusion_fn, death_diffusion_log_gf};
pub use heat::{heat_kernel, heat_kernel_wrapped};
pub use local::{
    birth_death_timedep_density, convert_ab_densities, discrete_death_distribution, discrete_death_gf,
    spont_birth_density,
};
pub use tree::{
    brownian_tree_density, brownian_tree_density_grid, brownian_tree_log_gf, brownian_tree_partial_density, stirling2,
    SeriesConfig,
};

use thiserror::Error;

use crate::grid::{FieldGrid, GridError};
use crate::quad::QuadError;
use crate::spec::{ModelKind, ModelSpec, SpecError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("heat kernel needs t > 0 and D > 0 (the t = 0 limit is a delta)")]
    DegenerateTime,
    #[error("closed form needs a constant `{0}`")]
    NonconstantRate(&'static str),
    #[error("series did not converge within {terms} terms (partial value {partial})")]
    SeriesDivergence { partial: f64, terms: usize },
    #[error("operation expects a {expected:?} model, got {got:?}")]
    WrongKind { expected: ModelKind, got: ModelKind },
    #[error("no closed form for {0:?} models")]
    NoClosedForm(ModelKind),
    #[error("test function lives on a different grid than the model")]
    GridMismatch,
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// Test function and time at which a generating functional is evaluated.
#[derive(Clone, Debug)]
pub struct GfQuery {
    pub u: FieldGrid,
    /// Test function for species B where a model has two; defaults to `u`.
    pub u_b: Option<FieldGrid>,
    pub t: f64,
}

impl GfQuery {
    pub fn new(u: FieldGrid, t: f64) -> Self {
        GfQuery { u, u_b: None, t }
    }
}

pub(crate) fn expect_kind(spec: &ModelSpec, kind: ModelKind) -> Result<()> {
    if spec.kind == kind {
        Ok(())
    } else {
        Err(ModelError::WrongKind { expected: kind, got: spec.kind })
    }
}

pub(crate) fn const_rate(field: &crate::spec::FieldSpec, name: &'static str) -> Result<f64> {
    match field {
        crate::spec::FieldSpec::Const(c) => Ok(*c),
        _ => Err(ModelError::NonconstantRate(name)),
    }
}

/// Log of the normalised generating functional `E[∏ u(x_i)]` for any local model.
pub fn log_gf(spec: &ModelSpec, q: &GfQuery) -> Result<f64> {
    match spec.kind {
        ModelKind::DeathDiffusion => death_diffusion_log_gf(spec, q),
        ModelKind::BrownianTree => brownian_tree_log_gf(spec, q, &SeriesConfig::default()),
        ModelKind::ConvertAb
        | ModelKind::SpontBirth
        | ModelKind::BirthDeathTimedep
        | ModelKind::DiscreteDeath => local::local_log_gf(spec, q),
        ModelKind::Annihilation => Err(ModelError::NoClosedForm(spec.kind)),
    }
}

/// Named density fields of a model at time `t`, sampled on its grid.
pub fn density_fields(spec: &ModelSpec, t: f64) -> Result<Vec<(String, FieldGrid)>> {
    let torus = spec.validate()?;
    let one = |g: FieldGrid| Ok(vec![("X".to_string(), g)]);
    match spec.kind {
        ModelKind::DeathDiffusion => one(death_diffusion_density_grid(spec, t)?),
        ModelKind::BrownianTree => one(brownian_tree_density_grid(spec, t, &SeriesConfig::default())?),
        ModelKind::ConvertAb => {
            let pairs: Vec<(f64, f64)> =
                (0..torus.len()).map(|i| convert_ab_densities(spec, &torus.position(i), t)).collect::<Result<_>>()?;
            let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            Ok(vec![
                ("X_a".to_string(), FieldGrid::from_real(&torus, &a)),
                ("X_b".to_string(), FieldGrid::from_real(&torus, &b)),
            ])
        }
        ModelKind::SpontBirth | ModelKind::BirthDeathTimedep => one(local::local_density_grid(spec, t)?),
        ModelKind::DiscreteDeath => {
            let mean = const_rate(&spec.v, "v")? * (-const_rate(spec.mu()?, "mu")? * t).exp();
            one(FieldGrid::constant(&torus, mean))
        }
        ModelKind::Annihilation => Err(ModelError::NoClosedForm(spec.kind)),
    }
}
