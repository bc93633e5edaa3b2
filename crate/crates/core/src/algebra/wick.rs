//! Normal ordering by Wick contraction.

use std::sync::{Arc, LazyLock};

use super::canon::simplify;
use super::term::{KernelFactor, KernelSymbol, OperatorExpr, OperatorTerm, Var};
use super::AlgebraError;

pub const DEFAULT_MAX_OPS: usize = 16;

static DELTA: LazyLock<Arc<KernelSymbol>> = LazyLock::new(|| KernelSymbol::radial("delta"));

#[derive(Clone, Copy, Debug)]
pub struct WickConfig {
    /// Terms with more operators than this are rejected, since the number of
    /// contraction patterns grows factorially.
    pub max_ops: usize,
}

impl Default for WickConfig {
    fn default() -> Self {
        WickConfig { max_ops: DEFAULT_MAX_OPS }
    }
}

/// Every partial matching of contractible pairs, as lists of
/// (annihilator index, creator index).
fn matchings(term: &OperatorTerm) -> Vec<Vec<(usize, usize)>> {
    fn go(
        term: &OperatorTerm,
        annihilators: &[usize],
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        let Some((&i, rest)) = annihilators.split_first() else {
            out.push(cur.clone());
            return;
        };
        go(term, rest, used, cur, out);
        let sp = term.ops[i].species;
        for j in i + 1..term.ops.len() {
            let o = term.ops[j];
            if o.dagger && o.species == sp && !used[j] {
                used[j] = true;
                cur.push((i, j));
                go(term, rest, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
    }
    let annihilators: Vec<usize> = (0..term.ops.len()).filter(|&i| !term.ops[i].dagger).collect();
    let mut out = Vec::new();
    go(term, &annihilators, &mut vec![false; term.ops.len()], &mut Vec::new(), &mut out);
    out
}

/// Apply one set of contractions. `None` when a delta links two disjoint
/// infinitesimal regions.
fn contract(term: &OperatorTerm, pairs: &[(usize, usize)]) -> Option<OperatorTerm> {
    let mut t = term.clone();
    for &(i, j) in pairs {
        let (x, y) = (t.ops[i].var, t.ops[j].var);
        match (x, y) {
            (Var::Bound(bx), Var::Bound(by)) if bx != by => {
                let region = t.bound[&bx].meet(t.bound[&by])?;
                let (keep, drop) = if bx < by { (bx, by) } else { (by, bx) };
                t.substitute(Var::Bound(drop), Var::Bound(keep));
                t.bound.remove(&drop);
                t.bound.insert(keep, region);
            }
            _ => t.coeff.factors.push(KernelFactor::new(&DELTA, &[x, y])),
        }
    }
    let removed: Vec<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
    let rest: Vec<_> = t
        .ops
        .iter()
        .enumerate()
        .filter(|(k, _)| !removed.contains(k))
        .map(|(_, o)| *o)
        .collect();
    let (mut ops, annihilators): (Vec<_>, Vec<_>) = rest.into_iter().partition(|o| o.dagger);
    ops.extend(annihilators);
    t.ops = ops;
    Some(t)
}

/// All Wick terms of every input term, unmerged and in matching order.
pub fn wick_expand(expr: &OperatorExpr, config: WickConfig) -> Result<Vec<OperatorTerm>, AlgebraError> {
    expr.validate()?;
    let mut out = Vec::new();
    for term in &expr.terms {
        if term.ops.len() > config.max_ops {
            return Err(AlgebraError::ContractionOverflow { ops: term.ops.len(), max: config.max_ops });
        }
        out.extend(matchings(term).iter().filter_map(|m| contract(term, m)));
    }
    Ok(out)
}

pub fn normal_order_with(expr: &OperatorExpr, config: WickConfig) -> Result<OperatorExpr, AlgebraError> {
    let terms = wick_expand(expr, config)?;
    Ok(simplify(&OperatorExpr { terms, free: expr.free.clone() }))
}

/// Normal-ordered, merged form of `expr`.
pub fn normal_order(expr: &OperatorExpr) -> Result<OperatorExpr, AlgebraError> {
    normal_order_with(expr, WickConfig::default())
}
