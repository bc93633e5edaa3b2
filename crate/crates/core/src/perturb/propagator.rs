use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::Rational64;

use super::{PerturbError, Result};
use crate::algebra::{ito_chain, ito_product, recognize, Family, KernelSymbol, OperatorExpr, PositionId, Recognized};

/// Value of the step function at equal times.
pub const THETA_AT_ZERO: f64 = 1.0;

/// Free propagator `θ(t−s) e^{−(t−s)D|k|²}` for `|k|² = k2`.
pub fn propagator(k2: f64, t: f64, s: f64, diffusion: f64) -> f64 {
    let theta = if t > s {
        1.0
    } else if t == s {
        THETA_AT_ZERO
    } else {
        0.0
    };
    theta * (-(t - s) * diffusion * k2).exp()
}

fn ratio(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Numeric value of a recognised product of a given family, with kernel
/// symbols looked up in `values`.
fn evaluate(r: &Recognized, family: Family, values: &BTreeMap<String, f64>) -> Result<f64> {
    let product = |ks: &[Arc<KernelSymbol>]| -> Result<f64> {
        ks.iter()
            .map(|k| values.get(&k.name).copied().ok_or_else(|| PerturbError::Derivation(format!("no value for {}", k.name))))
            .product()
    };
    match r {
        Recognized::Zero => Ok(0.0),
        Recognized::Instance(i) if i.family == family => Ok(ratio(i.scale) * product(&i.kernels)?),
        Recognized::ScalarDt { scale, kernels } if family == Family::Dt => Ok(ratio(*scale) * product(kernels)?),
        other => Err(PerturbError::Derivation(other.to_string())),
    }
}

/// `e^{x dΛ_h} − 1 = dΛ_α` with `α = Σ_n xⁿ/n!·(value of the derived n-fold product)`.
fn exp_lambda(h: &Arc<KernelSymbol>, x: f64, values: &BTreeMap<String, f64>, pos: PositionId) -> Result<f64> {
    let d_lambda = Family::Lambda.instantiate(std::slice::from_ref(h), pos);
    let mut alpha = 0.0;
    let mut coeff = 1.0;
    let mut factors = Vec::new();
    for n in 1..200 {
        factors.push(d_lambda.clone());
        coeff *= x / n as f64;
        let power = recognize(&ito_chain(&factors)?, &[Family::Lambda]);
        let term = coeff * evaluate(&power, Family::Lambda, values)?;
        alpha += term;
        if term.abs() <= 1e-17 * alpha.abs().max(1.0) && n as f64 > x.abs() {
            break;
        }
    }
    Ok(alpha)
}

/// Coefficient `c` of `(1 + dΛ_α) dF_f (1 + dΛ_β) = c·dF_f` for `F` one of
/// the creation or annihilation families, expanded into Itô products.
fn sandwich(family: Family, alpha: f64, beta: f64, pos: PositionId) -> Result<f64> {
    let a = KernelSymbol::scalar("alpha");
    let b = KernelSymbol::scalar("beta");
    let f = KernelSymbol::scalar("f");
    let values: BTreeMap<String, f64> =
        [("alpha".to_string(), alpha), ("beta".to_string(), beta), ("f".to_string(), 1.0)].into();
    let la = Family::Lambda.instantiate(&[a], pos);
    let lb = Family::Lambda.instantiate(&[b], pos);
    let df = family.instantiate(&[f], pos);
    let mut total = 0.0;
    for chain in [vec![df.clone()], vec![la.clone(), df.clone()], vec![df.clone(), lb.clone()], vec![la, df, lb]] {
        total += evaluate(&recognize(&ito_chain(&chain)?, &[family]), family, &values)?;
    }
    Ok(total)
}

/// Propagator `⟨T a_k(t) a_l†(s)⟩` derived from the Itô rules: both
/// operators are moved to the interaction picture by `e^{±t dΛ_{D|k|²}}`,
/// and the time-ordered product of the two differentials is reduced by the
/// table. `k` and `l` label momentum cells; distinct cells give zero.
pub fn derive_propagator(k: u32, l: u32, k2: f64, t: f64, s: f64, diffusion: f64) -> Result<f64> {
    let h = KernelSymbol::scalar("Dk2");
    let values: BTreeMap<String, f64> = [("Dk2".to_string(), diffusion * k2)].into();
    let (pk, pl) = (PositionId(k), PositionId(l));

    // dA_k(t) = e^{t dΛ} dA_k e^{−t dΛ};  dA†_l(s) = e^{s dΛ} dA†_l e^{−s dΛ}
    let c_a = sandwich(Family::A, exp_lambda(&h, t, &values, pk)?, exp_lambda(&h, -t, &values, pk)?, pk)?;
    let c_adag = sandwich(Family::Adag, exp_lambda(&h, s, &values, pl)?, exp_lambda(&h, -s, &values, pl)?, pl)?;

    let f = KernelSymbol::scalar("f");
    let g = KernelSymbol::scalar("g");
    let da = Family::A.instantiate(&[f], pk);
    let dadag = Family::Adag.instantiate(&[g], pl);
    let later_first = t > s || (t == s && THETA_AT_ZERO == 1.0);
    let product: OperatorExpr = if later_first { ito_product(&da, &dadag)? } else { ito_product(&dadag, &da)? };
    let unit: BTreeMap<String, f64> = [("f".to_string(), 1.0), ("g".to_string(), 1.0)].into();
    let contraction = evaluate(&recognize(&product, &[]), Family::Dt, &unit)?;
    Ok(contraction * c_a * c_adag)
}
