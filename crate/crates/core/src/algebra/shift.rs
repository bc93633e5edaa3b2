//! The Doi shift `a† → a† + 1`.

use super::canon::simplify;
use super::term::{OperatorExpr, OperatorTerm, Species, Var};

/// `∫ (G a)(x) dx` vanishes when `G` annihilates constants and nothing else
/// in the term depends on `x` through a creator.
fn integrates_to_zero(t: &OperatorTerm) -> bool {
    t.coeff.factors.iter().any(|f| {
        f.symbol.kills_constants()
            && f.vars.iter().all(|v| matches!(v, Var::Bound(_)) && !t.ops.iter().any(|o| o.dagger && o.var == *v))
    })
}

/// Replace every creator of `species` by itself plus one and re-expand.
/// This is conjugation by `exp(∫ a_p dp)` acting from the left.
pub fn doi_shift(expr: &OperatorExpr, species: Species) -> OperatorExpr {
    let mut terms = Vec::new();
    for t in &expr.terms {
        let idx: Vec<usize> = (0..t.ops.len()).filter(|&i| t.ops[i].dagger && t.ops[i].species == species).collect();
        for mask in 0u64..(1u64 << idx.len()) {
            let dropped: Vec<usize> = idx.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, i)| *i).collect();
            let ops = t.ops.iter().enumerate().filter(|(i, _)| !dropped.contains(i)).map(|(_, o)| *o).collect();
            let nt = OperatorTerm { ops, ..t.clone() };
            if !integrates_to_zero(&nt) {
                terms.push(nt);
            }
        }
    }
    simplify(&OperatorExpr { terms, free: expr.free.clone() })
}
