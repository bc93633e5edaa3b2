//! Leading-order products of differentials over an infinitesimal cell.

use super::term::OperatorExpr;
use super::wick::normal_order;
use super::AlgebraError;

/// Keep the terms at the lowest surviving power of `dp`, provided that power
/// does not exceed `cap` (the largest operand order). Anything of higher
/// order than its factors is negligible and the product is zero.
pub fn leading_order(expr: &OperatorExpr, cap: usize) -> OperatorExpr {
    match expr.order() {
        Some(min) if min <= cap => OperatorExpr {
            terms: expr.terms.iter().filter(|t| t.measure_power() == min).cloned().collect(),
            free: expr.free.clone(),
        },
        _ => OperatorExpr { terms: Vec::new(), free: expr.free.clone() },
    }
}

/// Order of a differential; `None` for the zero differential.
fn differential_order(x: &OperatorExpr) -> Result<Option<usize>, AlgebraError> {
    match x.order() {
        Some(0) => Err(AlgebraError::RegionMismatch),
        o => Ok(o),
    }
}

/// Brute-force leading-order product `x₁·x₂·…·xₙ`: the whole product is
/// normal ordered at once and then truncated.
pub fn ito_product_many(factors: &[OperatorExpr]) -> Result<OperatorExpr, AlgebraError> {
    let mut cap = 0;
    for f in factors {
        match differential_order(f)? {
            Some(o) => cap = cap.max(o),
            None => return Ok(OperatorExpr::zero()),
        }
    }
    let Some((first, rest)) = factors.split_first() else {
        return Ok(OperatorExpr::zero());
    };
    let raw = rest.iter().fold(first.clone(), |acc, f| acc.mul(f));
    Ok(leading_order(&normal_order(&raw)?, cap))
}

/// Leading-order product `x·y`. Chains are grouped from the right, since the
/// right operand's creators are moved left first: `x·y·z = x·(y·z)`.
pub fn ito_product(x: &OperatorExpr, y: &OperatorExpr) -> Result<OperatorExpr, AlgebraError> {
    ito_product_many(&[x.clone(), y.clone()])
}

/// Right-grouped chain `x₁·(x₂·(…·xₙ))` of pairwise products.
pub fn ito_chain(factors: &[OperatorExpr]) -> Result<OperatorExpr, AlgebraError> {
    let Some((last, rest)) = factors.split_last() else {
        return Ok(OperatorExpr::zero());
    };
    rest.iter().rev().try_fold(last.clone(), |acc, f| ito_product(f, &acc))
}
