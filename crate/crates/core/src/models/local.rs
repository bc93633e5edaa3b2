use super::{const_rate, expect_kind, GfQuery, ModelError, Result};
use crate::grid::FieldGrid;
use crate::quad::integrate;
use crate::spec::{FieldSpec, ModelKind, ModelSpec};

const OUTER_TOL: f64 = 1e-10;
const INNER_TOL: f64 = 1e-12;

/// `(X_a, X_b) = (v_a e^{−μt}, v_b + v_a(1 − e^{−μt}))` for static conversion A→B.
pub fn convert_ab_densities(spec: &ModelSpec, p: &[f64], t: f64) -> Result<(f64, f64)> {
    expect_kind(spec, ModelKind::ConvertAb)?;
    let torus = spec.torus()?;
    let va = spec.v.eval(&torus, p, 0.0);
    let vb = spec.v_b.as_ref().map_or(0.0, |f| f.eval(&torus, p, 0.0));
    let survive = (-spec.mu()?.eval(&torus, p, 0.0) * t).exp();
    Ok((va * survive, vb + va * (1.0 - survive)))
}

/// `∫_a^b f(p, s) ds`.
fn cumulative(f: &FieldSpec, torus: &crate::grid::Torus, p: &[f64], a: f64, b: f64, tol: f64) -> Result<f64> {
    if !f.is_time_dependent() {
        return Ok(f.eval(torus, p, a) * (b - a));
    }
    Ok(integrate(|s| f.eval(torus, p, s), a, b, tol, 0.0)?)
}

/// `v(p) + ∫₀ᵗ μ(p,s) ds`.
pub fn spont_birth_density(spec: &ModelSpec, p: &[f64], t: f64) -> Result<f64> {
    expect_kind(spec, ModelKind::SpontBirth)?;
    let torus = spec.torus()?;
    Ok(spec.v.eval(&torus, p, 0.0) + cumulative(spec.mu()?, &torus, p, 0.0, t, OUTER_TOL)?)
}

/// `v(p)e^{−∫₀ᵗν} + ∫₀ᵗ μ(p,s) e^{−∫ₛᵗ ν} ds` by nested quadrature.
pub fn birth_death_timedep_density(spec: &ModelSpec, p: &[f64], t: f64) -> Result<f64> {
    expect_kind(spec, ModelKind::BirthDeathTimedep)?;
    let torus = spec.torus()?;
    let (mu, nu) = (spec.mu()?, spec.nu()?);
    let survival = cumulative(nu, &torus, p, 0.0, t, INNER_TOL)?;
    let mut inner_err = None;
    let births = integrate(
        |s| match cumulative(nu, &torus, p, s, t, INNER_TOL) {
            Ok(c) => mu.eval(&torus, p, s) * (-c).exp(),
            Err(e) => {
                inner_err.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        t,
        OUTER_TOL,
        0.0,
    );
    if let Some(e) = inner_err {
        return Err(e);
    }
    Ok(spec.v.eval(&torus, p, 0.0) * (-survival).exp() + births?)
}

/// `exp((u − 1) v e^{−μt})` for a Poisson(v) population under death at rate μ.
pub fn discrete_death_gf(v: f64, mu: f64, t: f64, u: f64) -> f64 {
    ((u - 1.0) * v * (-mu * t).exp()).exp()
}

/// `P(N = n)` for `n ≤ n_max`: the Taylor coefficients of the generating
/// function in `u`, a Poisson law with mean `v e^{−μt}`.
pub fn discrete_death_distribution(v: f64, mu: f64, t: f64, n_max: usize) -> Vec<f64> {
    let lambda = v * (-mu * t).exp();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut p = (-lambda).exp();
    for n in 0..=n_max {
        out.push(p);
        p *= lambda / (n + 1) as f64;
    }
    out
}

pub(super) fn local_density_grid(spec: &ModelSpec, t: f64) -> Result<FieldGrid> {
    let torus = spec.validate()?;
    let f = match spec.kind {
        ModelKind::SpontBirth => spont_birth_density,
        ModelKind::BirthDeathTimedep => birth_death_timedep_density,
        other => return Err(ModelError::WrongKind { expected: ModelKind::SpontBirth, got: other }),
    };
    let vals: Vec<f64> = (0..torus.len()).map(|i| f(spec, &torus.position(i), t)).collect::<Result<_>>()?;
    Ok(FieldGrid::from_real(&torus, &vals))
}

/// Log generating functionals of the Poisson-preserving local models.
pub(super) fn local_log_gf(spec: &ModelSpec, q: &GfQuery) -> Result<f64> {
    let torus = spec.validate()?;
    if q.u.torus != torus {
        return Err(ModelError::GridMismatch);
    }
    let u = q.u.real();
    let h = torus.cell_volume();
    match spec.kind {
        ModelKind::DiscreteDeath => {
            let (v, mu) = (const_rate(&spec.v, "v")?, const_rate(spec.mu()?, "mu")?);
            Ok((u[0] - 1.0) * v * (-mu * q.t).exp())
        }
        ModelKind::ConvertAb => {
            let ub = q.u_b.as_ref().map_or_else(|| u.clone(), |g| g.real());
            let mut s = 0.0;
            for i in 0..torus.len() {
                let p = torus.position(i);
                let va = spec.v.eval(&torus, &p, 0.0);
                let vb = spec.v_b.as_ref().map_or(0.0, |f| f.eval(&torus, &p, 0.0));
                let survive = (-spec.mu()?.eval(&torus, &p, 0.0) * q.t).exp();
                s += va * (u[i] * survive + ub[i] * (1.0 - survive) - 1.0) + vb * (ub[i] - 1.0);
            }
            Ok(s * h)
        }
        _ => {
            let x = local_density_grid(spec, q.t)?.real();
            Ok(u.iter().zip(&x).map(|(ui, xi)| (ui - 1.0) * xi).sum::<f64>() * h)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson_law_sums_to_one() {
        let p = discrete_death_distribution(5.0, 0.3, 1.0, 80);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((discrete_death_gf(5.0, 0.3, 0.0, 0.2) - (-0.8f64 * 5.0).exp()).abs() < 1e-15);
    }
}
