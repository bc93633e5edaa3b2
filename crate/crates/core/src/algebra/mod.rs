//! Symbolic bosonic operator algebra.
//!
//! Terms are spatially labelled products of creation and annihilation
//! operators with opaque coefficient kernels. Products are put into normal
//! order by Wick contraction, and restricting the integration regions to an
//! infinitesimal cell `dp` turns them into quantum Itô products from which
//! multiplication tables are derived automatically.

mod canon;
mod families;
mod ito;
mod shift;
mod table;
mod term;
mod wick;

pub use canon::{canonical_key, simplify};
pub use families::{recognize, Family, FamilyInstance, Recognized};
pub use ito::{ito_chain, ito_product, ito_product_many, leading_order};
pub use shift::doi_shift;
pub use table::{derive_table, table_for, ItoTable, TableEntry};
pub use term::{
    CoeffKernel, FieldOp, KernelFactor, KernelKind, KernelSymbol, OperatorExpr, OperatorTerm, PositionId,
    Region, Species, Var,
};
pub use wick::{normal_order, normal_order_with, wick_expand, WickConfig, DEFAULT_MAX_OPS};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("variable {0:?} is neither bound by its term nor declared free")]
    UnboundVariable(Var),
    #[error("term has {ops} operators, above the contraction limit of {max}")]
    ContractionOverflow { ops: usize, max: usize },
    #[error("operands are not differentials over an infinitesimal region")]
    RegionMismatch,
    #[error("unknown noise family `{0}`")]
    UnknownFamily(String),
}
