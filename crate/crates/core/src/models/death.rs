use super::{const_rate, expect_kind, GfQuery, ModelError, Result};
use crate::grid::FieldGrid;
use crate::spec::{ModelKind, ModelSpec};

/// `(μ, D, Φ(t)∗v)` for a death-diffusion model.
fn evolved(spec: &ModelSpec, t: f64) -> Result<(f64, FieldGrid)> {
    expect_kind(spec, ModelKind::DeathDiffusion)?;
    let torus = spec.validate()?;
    let mu = const_rate(spec.mu()?, "mu")?;
    let v = spec.v.sample(&torus, 0.0);
    let conv = if t == 0.0 || spec.diffusion == 0.0 { v } else { v.heat(spec.diffusion, t)? };
    Ok((mu, conv))
}

/// `e^{−μt}∬ u(p)Φ(p−q;t)v(q) − e^{−μt}∫v`.
pub fn death_diffusion_log_gf(spec: &ModelSpec, q: &GfQuery) -> Result<f64> {
    let (mu, conv) = evolved(spec, q.t)?;
    if q.u.torus != conv.torus {
        return Err(ModelError::GridMismatch);
    }
    let h = conv.torus.cell_volume();
    let overlap: f64 = q.u.values.iter().zip(&conv.values).map(|(u, x)| u.re * x.re).sum::<f64>() * h;
    let mass: f64 = conv.integral()?;
    Ok((-mu * q.t).exp() * (overlap - mass))
}

/// Density `e^{−μt}(Φ(t)∗v)` on the model grid.
pub fn death_diffusion_density_grid(spec: &ModelSpec, t: f64) -> Result<FieldGrid> {
    let (mu, conv) = evolved(spec, t)?;
    let decay = (-mu * t).exp();
    Ok(conv.map(|x| decay * x))
}

/// Density at an arbitrary point.
pub fn death_diffusion_density(spec: &ModelSpec, p: &[f64], t: f64) -> Result<f64> {
    Ok(death_diffusion_density_grid(spec, t)?.eval_at(p)?)
}

/// Janossy density of finding exactly the particles at `points` and no others:
/// the `n`-th functional derivative of the generating functional at `u = 0`,
/// `exp(−e^{−μt}∫v)·∏ e^{−μt}(Φ∗v)(p_i)`.
pub fn death_diffusion_fn(spec: &ModelSpec, points: &[Vec<f64>], t: f64) -> Result<f64> {
    let (mu, conv) = evolved(spec, t)?;
    let decay = (-mu * t).exp();
    let mut out = (-decay * conv.integral()?).exp();
    if !points.is_empty() {
        let m = conv.to_momentum()?;
        for p in points {
            out *= decay * m.eval_at(p)?;
        }
    }
    Ok(out)
}
