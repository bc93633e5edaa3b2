//! Named noise families and recognition of products back into them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Rational64;

use super::canon::simplify;
use super::term::{
    CoeffKernel, FieldOp, KernelFactor, KernelSymbol, OperatorExpr, OperatorTerm, PositionId, Region, Species, Var,
};
use super::AlgebraError;

const A: Species = Species(0);
const B: Species = Species(1);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// `f(p) a_p`
    A,
    /// `g(p) a†_p`
    Adag,
    /// `a†_p G a_p`
    Lambda,
    /// Bare `dp`.
    Dt,
    /// `G(p) (a†_p)^m a_p`
    B(u32),
    /// `½ R(p−q) a†_p a†_q a_p a_q`
    Xi,
    /// `½ R(p−q) a_p a_q`
    Omega,
    /// `R(p−q) a†_p a_p a_q`, the cubic vertex left by the Doi shift.
    OmegaCubic,
    /// `G(p) b†_p a_p`: conversion of species a into species b.
    M,
    /// `ν(p)(a†_p − 1)`
    X,
    /// `μ(p)(a_p − a†_p a_p)`
    Y,
}

struct Template {
    /// Variables the kernel is applied to, as bound ids.
    slot: Vec<u32>,
    terms: Vec<(Rational64, Vec<FieldOp>)>,
}

fn p() -> Var {
    Var::Bound(0)
}

fn q() -> Var {
    Var::Bound(1)
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

impl Family {
    fn template(self) -> Template {
        let c = |s, v| FieldOp::create(s, v);
        let n = |s, v| FieldOp::annihilate(s, v);
        let one = |terms| Template { slot: vec![0], terms };
        let two = |terms| Template { slot: vec![0, 1], terms };
        match self {
            Family::A => one(vec![(r(1, 1), vec![n(A, p())])]),
            Family::Adag => one(vec![(r(1, 1), vec![c(A, p())])]),
            Family::Lambda => one(vec![(r(1, 1), vec![c(A, p()), n(A, p())])]),
            Family::Dt => one(vec![(r(1, 1), vec![])]),
            Family::B(m) => {
                let mut ops = vec![c(A, p()); m as usize];
                ops.push(n(A, p()));
                one(vec![(r(1, 1), ops)])
            }
            Family::Xi => two(vec![(r(1, 2), vec![c(A, p()), c(A, q()), n(A, p()), n(A, q())])]),
            Family::Omega => two(vec![(r(1, 2), vec![n(A, p()), n(A, q())])]),
            Family::OmegaCubic => two(vec![(r(1, 1), vec![c(A, p()), n(A, p()), n(A, q())])]),
            Family::M => one(vec![(r(1, 1), vec![c(B, p()), n(A, p())])]),
            Family::X => one(vec![(r(1, 1), vec![c(A, p())]), (r(-1, 1), vec![])]),
            Family::Y => one(vec![(r(1, 1), vec![n(A, p())]), (r(-1, 1), vec![c(A, p()), n(A, p())])]),
        }
    }

    /// Row and column kernel symbols used when tabulating this family.
    pub fn table_symbols(self) -> (Arc<KernelSymbol>, Arc<KernelSymbol>) {
        let op = |n: &str| KernelSymbol::operator(n, false, &[]);
        match self {
            Family::Lambda | Family::B(_) | Family::M => (op("F"), op("G")),
            Family::A | Family::Adag => (KernelSymbol::scalar("f"), KernelSymbol::scalar("g")),
            Family::Xi | Family::Omega | Family::OmegaCubic => (KernelSymbol::radial("R"), KernelSymbol::radial("S")),
            Family::X => (KernelSymbol::scalar("nu"), KernelSymbol::scalar("nu'")),
            Family::Y => (KernelSymbol::scalar("mu"), KernelSymbol::scalar("mu'")),
            Family::Dt => (KernelSymbol::scalar("1"), KernelSymbol::scalar("1")),
        }
    }

    /// Number of kernel symbols the family takes when tabulated.
    pub fn kernel_count(self) -> usize {
        usize::from(self != Family::Dt)
    }

    pub fn instantiate_in(self, kernels: &[Arc<KernelSymbol>], region: Region, scale: Rational64) -> OperatorExpr {
        let tpl = self.template();
        let slot: Vec<Var> = tpl.slot.iter().map(|i| Var::Bound(*i)).collect();
        let factors: Vec<KernelFactor> = kernels.iter().map(|k| KernelFactor::new(k, &slot)).collect();
        let bound: BTreeMap<u32, Region> = tpl.slot.iter().map(|i| (*i, region)).collect();
        let terms = tpl
            .terms
            .into_iter()
            .map(|(n, ops)| {
                OperatorTerm::new(CoeffKernel { numeric: n * scale, factors: factors.clone() }, ops, bound.clone())
            })
            .collect();
        OperatorExpr::from_terms(terms)
    }

    /// Differential over the cell `dp` labelled `pos`.
    pub fn instantiate(self, kernels: &[Arc<KernelSymbol>], pos: PositionId) -> OperatorExpr {
        self.instantiate_in(kernels, Region::Infinitesimal(pos), Rational64::from_integer(1))
    }

    /// The integrated operator over the whole space.
    pub fn instantiate_full(self, kernels: &[Arc<KernelSymbol>]) -> OperatorExpr {
        self.instantiate_in(kernels, Region::Full, Rational64::from_integer(1))
    }

    fn catalog() -> Vec<Family> {
        use Family::*;
        vec![A, Adag, Lambda, Xi, Omega, OmegaCubic, M, X, Y]
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::A => write!(f, "A"),
            Family::Adag => write!(f, "Adag"),
            Family::Lambda => write!(f, "Lambda"),
            Family::Dt => write!(f, "dt"),
            Family::B(m) => write!(f, "B{m}"),
            Family::Xi => write!(f, "Xi"),
            Family::Omega => write!(f, "Omega"),
            Family::OmegaCubic => write!(f, "OmegaCubic"),
            Family::M => write!(f, "M"),
            Family::X => write!(f, "X"),
            Family::Y => write!(f, "Y"),
        }
    }
}

impl FromStr for Family {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fam = match s {
            "A" => Family::A,
            "Adag" => Family::Adag,
            "Lambda" => Family::Lambda,
            "dt" => Family::Dt,
            "Xi" => Family::Xi,
            "Omega" => Family::Omega,
            "OmegaCubic" => Family::OmegaCubic,
            "M" => Family::M,
            "X" => Family::X,
            "Y" => Family::Y,
            _ => {
                let m = s
                    .strip_prefix('B')
                    .map(|rest| rest.trim_start_matches('(').trim_end_matches(')'))
                    .and_then(|m| m.parse::<u32>().ok())
                    .filter(|m| *m >= 1);
                match m {
                    Some(m) => Family::B(m),
                    None => return Err(AlgebraError::UnknownFamily(s.to_string())),
                }
            }
        };
        Ok(fam)
    }
}

/// A family scaled by a rational and carrying a composed kernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyInstance {
    pub family: Family,
    pub scale: Rational64,
    /// Kernel factors in product order, each applied to the family's slot.
    pub kernels: Vec<Arc<KernelSymbol>>,
}

impl FamilyInstance {
    pub fn new(family: Family, kernels: &[Arc<KernelSymbol>]) -> Self {
        FamilyInstance { family, scale: Rational64::from_integer(1), kernels: kernels.to_vec() }
    }

    pub fn to_expr(&self, region: Region) -> OperatorExpr {
        self.family.instantiate_in(&self.kernels, region, self.scale)
    }
}

pub(crate) fn scale_prefix(scale: Rational64) -> String {
    if scale == Rational64::from_integer(1) {
        String::new()
    } else if scale == Rational64::from_integer(-1) {
        "-".to_string()
    } else if *scale.denom() == 1 {
        format!("{} ", scale.numer())
    } else {
        format!("{}/{} ", scale.numer(), scale.denom())
    }
}

pub(crate) fn join_kernels(kernels: &[Arc<KernelSymbol>], sep: &str) -> String {
    kernels.iter().map(|k| k.name.as_str()).collect::<Vec<_>>().join(sep)
}

impl fmt::Display for FamilyInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}d{}[{}]", scale_prefix(self.scale), self.family, join_kernels(&self.kernels, "·"))
    }
}

/// A product expressed in the vocabulary of noise families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recognized {
    Zero,
    Instance(FamilyInstance),
    /// A pure number times `dp`: `scale·⟨k₁,k₂,…⟩ dp`.
    ScalarDt { scale: Rational64, kernels: Vec<Arc<KernelSymbol>> },
    Unrecognized(OperatorExpr),
}

impl fmt::Display for Recognized {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recognized::Zero => write!(f, "0"),
            Recognized::Instance(i) => write!(f, "{i}"),
            Recognized::ScalarDt { scale, kernels } => {
                write!(f, "{}<{}> dt", scale_prefix(*scale), join_kernels(kernels, ","))
            }
            Recognized::Unrecognized(e) => write!(f, "{e}"),
        }
    }
}

/// All bijections from `from` onto `to` (both short).
fn bijections(from: &[u32], to: &[u32]) -> Vec<BTreeMap<u32, u32>> {
    if from.len() != to.len() {
        return Vec::new();
    }
    if from.is_empty() {
        return vec![BTreeMap::new()];
    }
    let mut out = Vec::new();
    for (k, t) in to.iter().enumerate() {
        let mut rest = to.to_vec();
        rest.remove(k);
        for mut m in bijections(&from[1..], &rest) {
            m.insert(from[0], *t);
            out.push(m);
        }
    }
    out
}

fn sorted_ops(ops: &[FieldOp]) -> Vec<FieldOp> {
    let mut v = ops.to_vec();
    v.sort();
    v
}

fn try_family(fam: Family, expr: &OperatorExpr) -> Option<FamilyInstance> {
    let e0 = expr.terms.first()?;
    let region = *e0.bound.values().next()?;
    let tpl_expr = fam.instantiate_in(&[], region, Rational64::from_integer(1));
    if tpl_expr.terms.len() != expr.terms.len() {
        return None;
    }
    let slot: Vec<Var> = fam.template().slot.iter().map(|i| Var::Bound(*i)).collect();
    let e_ids: Vec<u32> = e0.bound.keys().copied().collect();
    for tj in &tpl_expr.terms {
        if tj.ops.len() != e0.ops.len() {
            continue;
        }
        let t_ids: Vec<u32> = tj.bound.keys().copied().collect();
        for map in bijections(&e_ids, &t_ids) {
            let mv = |v: Var| match v {
                Var::Bound(i) => Var::Bound(map[&i]),
                f => f,
            };
            let mapped: Vec<FieldOp> = e0.ops.iter().map(|o| FieldOp { var: mv(o.var), ..*o }).collect();
            if sorted_ops(&mapped) != sorted_ops(&tj.ops) {
                continue;
            }
            let fits = e0.coeff.factors.iter().all(|f| {
                let mut vars: Vec<Var> = f.vars.iter().map(|v| mv(*v)).collect();
                let mut want = slot.clone();
                if f.symbol.symmetric {
                    vars.sort();
                    want.sort();
                }
                vars == want
            });
            if !fits {
                continue;
            }
            let inst = FamilyInstance {
                family: fam,
                scale: e0.coeff.numeric / tj.coeff.numeric,
                kernels: e0.coeff.factors.iter().map(|f| f.symbol.clone()).collect(),
            };
            if simplify(&inst.to_expr(region)).terms == expr.terms {
                return Some(inst);
            }
        }
    }
    None
}

/// Express `expr` as a family instance, trying `preferred` families first.
pub fn recognize(expr: &OperatorExpr, preferred: &[Family]) -> Recognized {
    let e = simplify(expr);
    let Some(e0) = e.terms.first() else {
        return Recognized::Zero;
    };
    if e.terms.len() == 1 && e0.ops.is_empty() && e0.bound.len() == 1 {
        let (&id, region) = e0.bound.iter().next().expect("one bound variable");
        let on_slot = e0.coeff.factors.iter().all(|f| f.vars == [Var::Bound(id)]);
        if region.is_infinitesimal() && on_slot {
            return Recognized::ScalarDt {
                scale: e0.coeff.numeric,
                kernels: e0.coeff.factors.iter().map(|f| f.symbol.clone()).collect(),
            };
        }
    }
    let mut order: Vec<Family> = preferred.to_vec();
    order.extend(Family::catalog());
    let creators = e0.ops.iter().filter(|o| o.dagger).count() as u32;
    if creators >= 1 {
        order.push(Family::B(creators));
    }
    for fam in order {
        if let Some(inst) = try_family(fam, &e) {
            return Recognized::Instance(inst);
        }
    }
    Recognized::Unrecognized(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names_round_trip() {
        for name in ["A", "Adag", "Lambda", "dt", "B3", "Xi", "Omega", "OmegaCubic", "M", "X", "Y"] {
            assert_eq!(name.parse::<Family>().unwrap().to_string(), name);
        }
        assert_eq!("B(2)".parse::<Family>().unwrap(), Family::B(2));
        assert!(matches!("Q".parse::<Family>(), Err(AlgebraError::UnknownFamily(_))));
        assert!("B0".parse::<Family>().is_err());
    }

    #[test]
    fn instances_recognize_themselves() {
        for fam in [Family::A, Family::Adag, Family::Lambda, Family::B(3), Family::Xi, Family::Omega, Family::M, Family::X, Family::Y] {
            let (k, _) = fam.table_symbols();
            let e = fam.instantiate_in(&[k.clone()], Region::Infinitesimal(PositionId(0)), Rational64::new(-3, 2));
            match recognize(&e, &[fam]) {
                Recognized::Instance(i) => {
                    assert_eq!(i.family, fam);
                    assert_eq!(i.scale, Rational64::new(-3, 2));
                    assert_eq!(i.kernels, vec![k]);
                }
                other => panic!("{fam}: {other}"),
            }
        }
    }
}
