//! Canonical forms for operator terms, used to merge structurally equal
//! terms after Wick expansion.

use std::collections::BTreeMap;

use num_rational::Rational64;

use super::term::{CoeffKernel, FieldOp, KernelFactor, OperatorExpr, OperatorTerm, Region, Var};

/// Largest number of bound-variable relabelings tried per term.
const MAX_RELABELINGS: usize = 40_320;

/// Structural identity of a term, numeric prefactor excluded.
pub type TermKey = (Vec<(u32, Region)>, Vec<FieldOp>, Vec<KernelFactor>);

fn relabel(term: &OperatorTerm, map: &BTreeMap<u32, u32>) -> OperatorTerm {
    let mv = |v: Var| match v {
        Var::Bound(i) => Var::Bound(map[&i]),
        f => f,
    };
    let mut factors: Vec<KernelFactor> = term
        .coeff
        .factors
        .iter()
        .map(|f| {
            let mut vars: Vec<Var> = f.vars.iter().map(|v| mv(*v)).collect();
            if f.symbol.symmetric {
                vars.sort();
            }
            KernelFactor { symbol: f.symbol.clone(), vars }
        })
        .collect();
    factors = factor_normal_form(factors);

    let mut ops: Vec<FieldOp> = term.ops.iter().map(|o| FieldOp { var: mv(o.var), ..*o }).collect();
    let out = OperatorTerm {
        coeff: CoeffKernel { numeric: term.coeff.numeric, factors },
        ops: ops.clone(),
        bound: term.bound.iter().map(|(k, r)| (map[k], *r)).collect(),
    };
    if out.is_normal() {
        ops.sort_by_key(|o| (!o.dagger, o.species, o.var));
        OperatorTerm { ops, ..out }
    } else {
        out
    }
}

/// Lexicographically least ordering of the factor list that is reachable by
/// swapping adjacent commuting factors.
fn factor_normal_form(mut rest: Vec<KernelFactor>) -> Vec<KernelFactor> {
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for i in 0..rest.len() {
            let free = rest[..i].iter().all(|p| p.symbol.commutes(&rest[i].symbol));
            if free && best.is_none_or(|b| rest[i] < rest[b]) {
                best = Some(i);
            }
        }
        out.push(rest.remove(best.expect("first factor is always available")));
    }
    out
}

fn key_of(t: &OperatorTerm) -> TermKey {
    (
        t.bound.iter().map(|(k, r)| (*k, *r)).collect(),
        t.ops.clone(),
        t.coeff.factors.clone(),
    )
}

/// Relabel-invariant signature of a bound variable.
fn colour(term: &OperatorTerm, id: u32) -> (Region, Vec<(bool, u8)>, Vec<(String, usize)>) {
    let v = Var::Bound(id);
    let mut ops: Vec<(bool, u8)> = term.ops.iter().filter(|o| o.var == v).map(|o| (o.dagger, o.species.0)).collect();
    ops.sort();
    let mut slots = Vec::new();
    for f in &term.coeff.factors {
        for (pos, fv) in f.vars.iter().enumerate() {
            if *fv == v {
                slots.push((f.symbol.name.clone(), if f.symbol.symmetric { 0 } else { pos }));
            }
        }
    }
    slots.sort();
    (term.bound[&id], ops, slots)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Canonical representative of a term: bound variables renamed to
/// `0..n`, commuting operators and kernel factors sorted.
pub fn canonical_term(term: &OperatorTerm) -> OperatorTerm {
    let mut ids: Vec<u32> = term.bound.keys().copied().collect();
    let colours: BTreeMap<u32, _> = ids.iter().map(|i| (*i, colour(term, *i))).collect();
    ids.sort_by(|a, b| colours[a].cmp(&colours[b]).then(a.cmp(b)));

    let mut blocks: Vec<Vec<u32>> = Vec::new();
    for id in &ids {
        match blocks.last_mut() {
            Some(b) if colours[&b[0]] == colours[id] => b.push(*id),
            _ => blocks.push(vec![*id]),
        }
    }
    let count = blocks.iter().try_fold(1usize, |acc, b| {
        (1..=b.len()).try_fold(acc, |a, k| a.checked_mul(k))
    });
    let exhaustive = count.is_some_and(|c| c <= MAX_RELABELINGS);

    let mut perms: Vec<Vec<usize>> = blocks.iter().map(|b| (0..b.len()).collect()).collect();
    let mut best: Option<(TermKey, OperatorTerm)> = None;
    loop {
        let mut map = BTreeMap::new();
        let mut next = 0u32;
        for (b, p) in blocks.iter().zip(&perms) {
            for &k in p {
                map.insert(b[k], next);
                next += 1;
            }
        }
        let cand = relabel(term, &map);
        let key = key_of(&cand);
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, cand));
        }
        if !exhaustive {
            break;
        }
        // odometer over the per-block permutations
        let mut advanced = false;
        for p in perms.iter_mut() {
            if next_permutation(p) {
                advanced = true;
                break;
            }
            p.sort();
        }
        if !advanced {
            break;
        }
    }
    best.expect("at least one relabeling").1
}

pub fn canonical_key(term: &OperatorTerm) -> TermKey {
    key_of(&canonical_term(term))
}

/// Canonicalize every term, merge equal structures by summing prefactors and
/// drop terms that cancel. Output order is deterministic.
pub fn simplify(expr: &OperatorExpr) -> OperatorExpr {
    let mut merged: BTreeMap<TermKey, (Rational64, OperatorTerm)> = BTreeMap::new();
    for t in &expr.terms {
        let c = canonical_term(t);
        let key = key_of(&c);
        merged
            .entry(key)
            .and_modify(|(n, _)| *n += c.coeff.numeric)
            .or_insert((c.coeff.numeric, c));
    }
    let zero = Rational64::from_integer(0);
    let terms = merged
        .into_values()
        .filter(|(n, _)| *n != zero)
        .map(|(n, mut t)| {
            t.coeff.numeric = n;
            t
        })
        .collect();
    OperatorExpr { terms, free: expr.free.clone() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::term::{KernelSymbol, PositionId, Species};

    fn bound(ids: &[u32]) -> BTreeMap<u32, Region> {
        ids.iter().map(|i| (*i, Region::Infinitesimal(PositionId(0)))).collect()
    }

    #[test]
    fn relabeled_terms_merge() {
        let r = KernelSymbol::radial("R");
        let a = Species(0);
        let mk = |p: u32, q: u32| {
            OperatorTerm::new(
                CoeffKernel { numeric: Rational64::new(1, 2), factors: vec![KernelFactor::new(&r, &[Var::Bound(p), Var::Bound(q)])] },
                vec![FieldOp::create(a, Var::Bound(p)), FieldOp::annihilate(a, Var::Bound(p)), FieldOp::annihilate(a, Var::Bound(q))],
                bound(&[p, q]),
            )
        };
        let e = OperatorExpr::from_terms(vec![mk(0, 1), mk(1, 0), mk(5, 3)]);
        let s = simplify(&e);
        assert_eq!(s.terms.len(), 1);
        assert_eq!(s.terms[0].coeff.numeric, Rational64::new(3, 2));
    }

    #[test]
    fn operator_factors_keep_order() {
        let f = KernelSymbol::operator("F", false, &[]);
        let g = KernelSymbol::operator("G", false, &[]);
        let p = Var::Bound(0);
        let t = |fs: Vec<KernelFactor>| {
            OperatorTerm::new(CoeffKernel { numeric: 1.into(), factors: fs }, vec![], bound(&[0]))
        };
        let fg = t(vec![KernelFactor::new(&f, &[p]), KernelFactor::new(&g, &[p])]);
        let gf = t(vec![KernelFactor::new(&g, &[p]), KernelFactor::new(&f, &[p])]);
        assert_ne!(canonical_key(&fg), canonical_key(&gf));

        let mu = KernelSymbol::scalar("mu");
        let nu = KernelSymbol::scalar("nu");
        let a = t(vec![KernelFactor::new(&mu, &[p]), KernelFactor::new(&nu, &[p])]);
        let b = t(vec![KernelFactor::new(&nu, &[p]), KernelFactor::new(&mu, &[p])]);
        assert_eq!(canonical_key(&a), canonical_key(&b));
    }

    #[test]
    fn normal_terms_sort_within_blocks() {
        let a = Species(0);
        let t = |ops| OperatorTerm::new(CoeffKernel::one(), ops, bound(&[0, 1]));
        let x = t(vec![FieldOp::create(a, Var::Bound(0)), FieldOp::create(a, Var::Bound(1)), FieldOp::annihilate(a, Var::Bound(1))]);
        let y = t(vec![FieldOp::create(a, Var::Bound(1)), FieldOp::create(a, Var::Bound(0)), FieldOp::annihilate(a, Var::Bound(1))]);
        assert_eq!(canonical_key(&x), canonical_key(&y));
    }
}
