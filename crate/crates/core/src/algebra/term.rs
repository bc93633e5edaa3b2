//! Operator terms: spatially labelled creation/annihilation monomials with
//! symbolic coefficient kernels.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_rational::Rational64;

use super::AlgebraError;

/// Position variable. Bound variables are integrated over by the term that
/// declares them; free variables belong to the enclosing expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Bound(u32),
    Free(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Species(pub u8);

/// Label of an infinitesimal hypercube `dp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PositionId(pub u32);

/// Integration region of a bound variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    Full,
    Infinitesimal(PositionId),
}

impl Region {
    /// Region of a variable obtained by identifying two variables through a
    /// delta function. `None` when the supports are disjoint.
    pub fn meet(self, other: Region) -> Option<Region> {
        match (self, other) {
            (Region::Full, r) | (r, Region::Full) => Some(r),
            (Region::Infinitesimal(a), Region::Infinitesimal(b)) => {
                (a == b).then_some(Region::Infinitesimal(a))
            }
        }
    }

    pub fn is_infinitesimal(self) -> bool {
        matches!(self, Region::Infinitesimal(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldOp {
    pub dagger: bool,
    pub species: Species,
    pub var: Var,
}

impl FieldOp {
    pub fn create(species: Species, var: Var) -> Self {
        FieldOp { dagger: true, species, var }
    }

    pub fn annihilate(species: Species, var: Var) -> Self {
        FieldOp { dagger: false, species, var }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KernelKind {
    /// Ordinary function of the positions; commutes with every other scalar.
    Scalar,
    /// Operator acting on the coefficient function (e.g. `D·Δ`, `μ − DΔ`).
    Operator {
        /// `G†1 = 0`, so `∫ G a_p dp` vanishes on the torus.
        kills_constants: bool,
        /// Names of kernel symbols this operator commutes with.
        commutes_with: Vec<String>,
    },
}

/// An opaque kernel symbol such as `mu`, `R` or `DDelta`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KernelSymbol {
    pub name: String,
    pub arity: usize,
    /// Invariant under permutation of its arguments, e.g. `R(p−q) = R(q−p)`.
    pub symmetric: bool,
    pub kind: KernelKind,
}

impl KernelSymbol {
    pub fn scalar(name: &str) -> Arc<Self> {
        Arc::new(KernelSymbol {
            name: name.to_string(),
            arity: 1,
            symmetric: false,
            kind: KernelKind::Scalar,
        })
    }

    /// Two-point radial kernel.
    pub fn radial(name: &str) -> Arc<Self> {
        Arc::new(KernelSymbol {
            name: name.to_string(),
            arity: 2,
            symmetric: true,
            kind: KernelKind::Scalar,
        })
    }

    pub fn operator(name: &str, kills_constants: bool, commutes_with: &[&str]) -> Arc<Self> {
        Arc::new(KernelSymbol {
            name: name.to_string(),
            arity: 1,
            symmetric: false,
            kind: KernelKind::Operator {
                kills_constants,
                commutes_with: commutes_with.iter().map(|s| s.to_string()).collect(),
            },
        })
    }

    pub fn is_operator(&self) -> bool {
        matches!(self.kind, KernelKind::Operator { .. })
    }

    pub fn kills_constants(&self) -> bool {
        matches!(self.kind, KernelKind::Operator { kills_constants: true, .. })
    }

    pub fn commutes(&self, other: &KernelSymbol) -> bool {
        let listed = |a: &KernelSymbol, b: &KernelSymbol| match &a.kind {
            KernelKind::Scalar => false,
            KernelKind::Operator { commutes_with, .. } => commutes_with.iter().any(|n| *n == b.name),
        };
        match (&self.kind, &other.kind) {
            (KernelKind::Scalar, KernelKind::Scalar) => true,
            _ => listed(self, other) || listed(other, self),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KernelFactor {
    pub symbol: Arc<KernelSymbol>,
    pub vars: Vec<Var>,
}

impl KernelFactor {
    pub fn new(symbol: &Arc<KernelSymbol>, vars: &[Var]) -> Self {
        KernelFactor { symbol: symbol.clone(), vars: vars.to_vec() }
    }
}

/// Rational prefactor times an ordered product of kernel factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffKernel {
    pub numeric: Rational64,
    pub factors: Vec<KernelFactor>,
}

impl CoeffKernel {
    pub fn one() -> Self {
        CoeffKernel { numeric: Rational64::from_integer(1), factors: Vec::new() }
    }

    pub fn number(numeric: Rational64) -> Self {
        CoeffKernel { numeric, factors: Vec::new() }
    }

    /// Product in order `self · other`.
    pub fn mul(&self, other: &CoeffKernel) -> CoeffKernel {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        CoeffKernel { numeric: self.numeric * other.numeric, factors }
    }
}

/// `coeff · ops` integrated over the bound variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorTerm {
    pub coeff: CoeffKernel,
    pub ops: Vec<FieldOp>,
    pub bound: BTreeMap<u32, Region>,
}

impl OperatorTerm {
    pub fn new(coeff: CoeffKernel, ops: Vec<FieldOp>, bound: BTreeMap<u32, Region>) -> Self {
        OperatorTerm { coeff, ops, bound }
    }

    pub fn scalar(numeric: Rational64) -> Self {
        OperatorTerm { coeff: CoeffKernel::number(numeric), ops: Vec::new(), bound: BTreeMap::new() }
    }

    /// No annihilator precedes a creator of the same species.
    pub fn is_normal(&self) -> bool {
        for (i, a) in self.ops.iter().enumerate() {
            if a.dagger {
                continue;
            }
            if self.ops[i + 1..].iter().any(|c| c.dagger && c.species == a.species) {
                return false;
            }
        }
        true
    }

    /// Power of `dp` carried by the term: number of bound variables over an
    /// infinitesimal region.
    pub fn measure_power(&self) -> usize {
        self.bound.values().filter(|r| r.is_infinitesimal()).count()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out: BTreeSet<Var> = self.ops.iter().map(|o| o.var).collect();
        for f in &self.coeff.factors {
            out.extend(f.vars.iter().copied());
        }
        out
    }

    pub fn max_bound_id(&self) -> Option<u32> {
        self.bound.keys().next_back().copied()
    }

    /// Rename every bound variable `Bound(i)` to `Bound(i + offset)`.
    pub fn shift_bound(&self, offset: u32) -> OperatorTerm {
        let map = |v: Var| match v {
            Var::Bound(i) => Var::Bound(i + offset),
            f => f,
        };
        OperatorTerm {
            coeff: CoeffKernel {
                numeric: self.coeff.numeric,
                factors: self
                    .coeff
                    .factors
                    .iter()
                    .map(|f| KernelFactor {
                        symbol: f.symbol.clone(),
                        vars: f.vars.iter().map(|v| map(*v)).collect(),
                    })
                    .collect(),
            },
            ops: self.ops.iter().map(|o| FieldOp { var: map(o.var), ..*o }).collect(),
            bound: self.bound.iter().map(|(k, r)| (k + offset, *r)).collect(),
        }
    }

    /// Substitute `from` by `to` everywhere in ops and kernels.
    pub(crate) fn substitute(&mut self, from: Var, to: Var) {
        for o in &mut self.ops {
            if o.var == from {
                o.var = to;
            }
        }
        for f in &mut self.coeff.factors {
            for v in &mut f.vars {
                if *v == from {
                    *v = to;
                }
            }
        }
    }

    /// Product `self · other`; the caller guarantees disjoint bound ids.
    pub fn concat(&self, other: &OperatorTerm) -> OperatorTerm {
        let mut ops = self.ops.clone();
        ops.extend(other.ops.iter().copied());
        let mut bound = self.bound.clone();
        bound.extend(other.bound.iter().map(|(k, r)| (*k, *r)));
        OperatorTerm { coeff: self.coeff.mul(&other.coeff), ops, bound }
    }

    pub(crate) fn check_vars(&self, free: &BTreeMap<u32, String>) -> Result<(), AlgebraError> {
        for v in self.vars() {
            let ok = match v {
                Var::Bound(i) => self.bound.contains_key(&i),
                Var::Free(i) => free.contains_key(&i),
            };
            if !ok {
                return Err(AlgebraError::UnboundVariable(v));
            }
        }
        Ok(())
    }
}

/// Formal sum of operator terms.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OperatorExpr {
    pub terms: Vec<OperatorTerm>,
    /// Declared free variables and their display names.
    pub free: BTreeMap<u32, String>,
}

impl OperatorExpr {
    pub fn zero() -> Self {
        OperatorExpr::default()
    }

    pub fn from_term(term: OperatorTerm) -> Self {
        OperatorExpr { terms: vec![term], free: BTreeMap::new() }
    }

    pub fn from_terms(terms: Vec<OperatorTerm>) -> Self {
        OperatorExpr { terms, free: BTreeMap::new() }
    }

    pub fn with_free(mut self, id: u32, name: &str) -> Self {
        self.free.insert(id, name.to_string());
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff.numeric == Rational64::from_integer(0))
    }

    pub fn validate(&self) -> Result<(), AlgebraError> {
        self.terms.iter().try_for_each(|t| t.check_vars(&self.free))
    }

    /// Lowest power of `dp` among the terms (`None` for the empty sum).
    pub fn order(&self) -> Option<usize> {
        self.terms.iter().map(OperatorTerm::measure_power).min()
    }

    pub fn max_bound_id(&self) -> Option<u32> {
        self.terms.iter().filter_map(OperatorTerm::max_bound_id).max()
    }

    pub fn scale(&self, factor: Rational64) -> OperatorExpr {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.coeff.numeric *= factor;
        }
        out
    }

    /// Formal sum; terms are merged by [`super::canon::simplify`].
    pub fn add(&self, other: &OperatorExpr) -> OperatorExpr {
        let mut out = self.clone();
        out.terms.extend(other.terms.iter().cloned());
        out.free.extend(other.free.iter().map(|(k, v)| (*k, v.clone())));
        out
    }

    pub fn sub(&self, other: &OperatorExpr) -> OperatorExpr {
        self.add(&other.scale(Rational64::from_integer(-1)))
    }

    /// Raw product `self · other` with the right operand's bound variables
    /// renamed apart.
    pub fn mul(&self, other: &OperatorExpr) -> OperatorExpr {
        let offset = self.max_bound_id().map_or(0, |m| m + 1);
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.concat(&b.shift_bound(offset)));
            }
        }
        let mut free = self.free.clone();
        free.extend(other.free.iter().map(|(k, v)| (*k, v.clone())));
        OperatorExpr { terms, free }
    }
}

fn bound_name(i: u32) -> String {
    const NAMES: [&str; 8] = ["p", "q", "r", "s", "w", "x", "y", "z"];
    match NAMES.get(i as usize) {
        Some(n) => n.to_string(),
        None => format!("p{i}"),
    }
}

pub(crate) fn var_name(v: Var, free: &BTreeMap<u32, String>) -> String {
    match v {
        Var::Bound(i) => bound_name(i),
        Var::Free(i) => free.get(&i).cloned().unwrap_or_else(|| format!("x{i}")),
    }
}

pub(crate) fn render_term(t: &OperatorTerm, free: &BTreeMap<u32, String>) -> String {
    let mut s = String::new();
    let n = t.coeff.numeric;
    s.push_str(&if *n.denom() == 1 { n.numer().to_string() } else { format!("{}/{}", n.numer(), n.denom()) });
    if !t.bound.is_empty() {
        s.push_str(" ∫[");
        let parts: Vec<String> = t
            .bound
            .iter()
            .map(|(i, r)| match r {
                Region::Full => format!("d{}", bound_name(*i)),
                Region::Infinitesimal(pid) => format!("d{}@{}", bound_name(*i), pid.0),
            })
            .collect();
        s.push_str(&parts.join(" "));
        s.push(']');
    }
    for f in &t.coeff.factors {
        let args: Vec<String> = f.vars.iter().map(|v| var_name(*v, free)).collect();
        s.push_str(&format!(" {}({})", f.symbol.name, args.join(",")));
    }
    for o in &t.ops {
        let sp = if o.species.0 == 0 { "a".to_string() } else { format!("a{}", o.species.0) };
        let dag = if o.dagger { "†" } else { "" };
        s.push_str(&format!(" {sp}{dag}_{}", var_name(o.var, free)));
    }
    s
}

impl fmt::Display for OperatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|t| render_term(t, &self.free)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}
