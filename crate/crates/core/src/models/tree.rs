use super::{const_rate, expect_kind, GfQuery, ModelError, Result};
use crate::grid::{FieldGrid, Torus};
use crate::spec::{ModelKind, ModelSpec};

/// Stirling number of the second kind by the triangular recurrence
/// `S(n,k) = k·S(n−1,k) + S(n−1,k−1)`; `None` on `u128` overflow.
pub fn stirling2(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = (j as u128).checked_mul(row[j])?.checked_add(row[j - 1])?;
        }
        row[0] = 0;
    }
    Some(row[k])
}

/// Truncation control for the branching series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesConfig {
    pub k_max: usize,
    pub rel_tol: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig { k_max: 500, rel_tol: 1e-14 }
    }
}

/// `(1 − e^{−x})/x`, equal to 1 at 0.
fn phi1(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0 - 0.5 * x
    } else {
        -(-x).exp_m1() / x
    }
}

/// Symbols of the two operators in the series at spectral value `h`:
/// `e^{−th}` and `−μ e₁(h,t) = μ(1 − e^{−th})/h`.
fn symbols(mu: f64, h: f64, t: f64) -> (f64, f64) {
    ((-t * h).exp(), mu * t * phi1(t * h))
}

/// The branching model as a family of `H`-symbols. With `D = 0` the symbol
/// is `μ(p)` pointwise in space; with diffusion `μ` must be constant and the
/// symbol is `μ + D|k|²` in momentum space.
enum Representation {
    Static(Vec<f64>),
    Spectral(f64),
}

fn setup(spec: &ModelSpec) -> Result<(Torus, Representation)> {
    expect_kind(spec, ModelKind::BrownianTree)?;
    let torus = spec.validate()?;
    let mu = spec.mu()?;
    let rep = if spec.diffusion == 0.0 {
        Representation::Static(mu.sample(&torus, 0.0).real())
    } else {
        Representation::Spectral(const_rate(mu, "mu")?)
    };
    Ok((torus, rep))
}

/// Applies `f(μ, h)` as a function of `H` to `v`.
fn apply(torus: &Torus, rep: &Representation, d: f64, v: &FieldGrid, f: impl Fn(f64, f64) -> f64) -> Result<FieldGrid> {
    match rep {
        Representation::Static(mu) => {
            let vals: Vec<f64> = v.real().iter().zip(mu).map(|(x, m)| f(*m, *m) * x).collect();
            Ok(FieldGrid::from_real(torus, &vals))
        }
        Representation::Spectral(mu) => Ok(v.spectral(|k2| f(*mu, mu + d * k2))?),
    }
}

/// `Σ_{j=0}^{K} (j+1) e^{−tH}(−μe₁(H,t))^j v` for a fixed `K`.
pub fn brownian_tree_partial_density(spec: &ModelSpec, t: f64, k: usize) -> Result<FieldGrid> {
    let (torus, rep) = setup(spec)?;
    let v = spec.v.sample(&torus, 0.0);
    apply(&torus, &rep, spec.diffusion, &v, |mu, h| {
        let (e, r) = symbols(mu, h, t);
        (0..=k).map(|j| (j + 1) as f64 * r.powi(j as i32)).sum::<f64>() * e
    })
}

/// Density `Σ_k (k+1) e^{−tH}(−μe₁(H,t))^k v`, summed until the last term
/// is below `rel_tol` of the partial sum in sup norm.
pub fn brownian_tree_density_grid(spec: &ModelSpec, t: f64, cfg: &SeriesConfig) -> Result<FieldGrid> {
    let (torus, rep) = setup(spec)?;
    let v = spec.v.sample(&torus, 0.0);
    let base = apply(&torus, &rep, spec.diffusion, &v, |mu, h| symbols(mu, h, t).0)?;
    let mut power = base.clone();
    let mut sum = base;
    for j in 1..=cfg.k_max {
        power = apply(&torus, &rep, spec.diffusion, &power, |mu, h| symbols(mu, h, t).1)?;
        let term = power.map(|x| (j + 1) as f64 * x);
        sum = sum.zip_with(&term, |a, b| a + b);
        let size = sup(&term);
        if !size.is_finite() {
            break;
        }
        if size <= cfg.rel_tol * sup(&sum) {
            return Ok(sum);
        }
    }
    Err(ModelError::SeriesDivergence { partial: sum.integral()?, terms: cfg.k_max })
}

fn sup(g: &FieldGrid) -> f64 {
    g.values.iter().map(|v| v.re.abs()).fold(0.0, f64::max)
}

pub fn brownian_tree_density(spec: &ModelSpec, p: &[f64], t: f64, cfg: &SeriesConfig) -> Result<f64> {
    Ok(brownian_tree_density_grid(spec, t, cfg)?.eval_at(p)?)
}

/// Normalised log generating functional
/// `∫ u·Σ_k u^k e^{−tH}(−μe₁(H,t))^k v dp − ∫v dp`, with `H` acting on `v`
/// only. Each term's integral must fall below `rel_tol` of the running sum.
pub fn brownian_tree_log_gf(spec: &ModelSpec, q: &GfQuery, cfg: &SeriesConfig) -> Result<f64> {
    let (torus, rep) = setup(spec)?;
    if q.u.torus != torus {
        return Err(ModelError::GridMismatch);
    }
    let v = spec.v.sample(&torus, 0.0);
    let u = q.u.real();
    let h = torus.cell_volume();
    let mass = v.integral()?;
    let mut power = apply(&torus, &rep, spec.diffusion, &v, |mu, hh| symbols(mu, hh, q.t).0)?;
    let mut total = 0.0;
    let mut scale = 0.0f64;
    for j in 0..=cfg.k_max {
        if j > 0 {
            power = apply(&torus, &rep, spec.diffusion, &power, |mu, hh| symbols(mu, hh, q.t).1)?;
        }
        let mut term = 0.0;
        let mut abs = 0.0;
        for (x, ui) in power.values.iter().zip(&u) {
            let c = ui.powi(j as i32 + 1) * x.re;
            term += c;
            abs += c.abs();
        }
        term *= h;
        abs *= h;
        total += term;
        scale = scale.max(total.abs()).max(mass);
        if !abs.is_finite() {
            break;
        }
        if abs <= cfg.rel_tol * scale {
            return Ok(total - mass);
        }
    }
    Err(ModelError::SeriesDivergence { partial: total - mass, terms: cfg.k_max })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_stirling_values() {
        assert_eq!(stirling2(4, 2), Some(7));
        assert_eq!(stirling2(0, 0), Some(1));
        assert_eq!(stirling2(5, 0), Some(0));
        assert_eq!(stirling2(7, 7), Some(1));
        assert_eq!(stirling2(7, 1), Some(1));
        assert_eq!(stirling2(10, 3), Some(9330));
        assert_eq!(stirling2(3, 5), Some(0));
        assert!(stirling2(300, 150).is_none());
    }

    #[test]
    fn phi1_is_smooth_at_zero() {
        assert!((phi1(1e-13) - 1.0).abs() < 1e-12);
        assert!((phi1(1e-6) - (1.0 - 0.5e-6)).abs() < 1e-12);
    }
}
