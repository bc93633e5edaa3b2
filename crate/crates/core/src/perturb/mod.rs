//! Perturbation theory for pairwise annihilation `A + A → ∅` with a
//! non-local kernel `R`: free propagators, simplex time integrals, a
//! third-order diagram, and the tree-level (mean-field) resummation.
//!
//! Momentum-space fields use the unitary transform of [`crate::grid`];
//! `R_k` and `v_k` below are the transforms of `R(p)` and `v(p)`.

mod diagram;
mod dyson;
mod propagator;
mod simplex;

pub use diagram::third_order_term;
pub use dyson::{dyson_tree_density, mean_field_pde, mean_field_pde_on, memory_form_deviation, nonlinear_term, TimeSeries};
pub use propagator::{derive_propagator, propagator, THETA_AT_ZERO};
pub use simplex::{simplex_time_factor, ExpProduct};

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::grid::{FieldGrid, GridError, Representation, Torus};
use crate::spec::{ModelKind, ModelSpec, SpecError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerturbError {
    #[error("momentum grid too coarse: boundary summand {tail:e} vs total {total:e}")]
    GridTooCoarse { tail: f64, total: f64 },
    #[error("fixed point did not converge at step {step} (correction {correction:e})")]
    NonConvergence { step: usize, correction: f64 },
    #[error("expected an annihilation model, got {0:?}")]
    WrongKind(ModelKind),
    #[error("symbolic derivation produced an unexpected form: {0}")]
    Derivation(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

pub type Result<T> = std::result::Result<T, PerturbError>;

/// Transformed kernel and initial intensity on a periodic momentum lattice.
#[derive(Clone, Debug)]
pub struct MomentumGrid {
    pub torus: Torus,
    pub diffusion: f64,
    pub r_hat: FieldGrid,
    pub v_hat: FieldGrid,
}

impl MomentumGrid {
    pub fn new(diffusion: f64, r_hat: FieldGrid, v_hat: FieldGrid) -> Result<Self> {
        for g in [&r_hat, &v_hat] {
            if g.representation != Representation::Momentum {
                return Err(GridError::WrongRepresentation(Representation::Momentum).into());
            }
        }
        if r_hat.torus != v_hat.torus {
            return Err(GridError::DimensionMismatch { shape: r_hat.torus.dim(), lengths: v_hat.torus.dim() }.into());
        }
        Ok(MomentumGrid { torus: r_hat.torus.clone(), diffusion, r_hat, v_hat })
    }

    /// Samples `R` and `v` of an annihilation model and transforms them.
    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        if spec.kind != ModelKind::Annihilation {
            return Err(PerturbError::WrongKind(spec.kind));
        }
        let torus = spec.validate()?;
        let r = spec.kernel()?.sample(&torus);
        let v = spec.v.sample(&torus, 0.0);
        MomentumGrid::new(spec.diffusion, r.to_momentum()?, v.to_momentum()?)
    }

    /// The same lattice with the kernel scaled by `eps`.
    pub fn scale_kernel(&self, eps: f64) -> Self {
        let mut g = self.clone();
        g.r_hat.values.iter_mut().for_each(|v| *v *= eps);
        g
    }
}
