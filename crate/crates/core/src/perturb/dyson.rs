use std::f64::consts::PI;

use num_complex::Complex64;

use super::{MomentumGrid, PerturbError, Result};
use crate::grid::{FieldGrid, Representation};
use crate::spec::ModelSpec;

const FIXED_POINT_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 50;

/// Fields at successive times.
#[derive(Clone, Debug)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub fields: Vec<FieldGrid>,
}

impl TimeSeries {
    pub fn last(&self) -> &FieldGrid {
        self.fields.last().expect("series holds the initial field")
    }
}

/// The tree vertex `N_k = Σ_m dm R_m X_m X_{k−m}` with the circular
/// convolution of the grid, i.e. the transform of `X·(R∗X)`.
pub fn nonlinear_term(r_hat: &FieldGrid, x_hat: &FieldGrid) -> Result<FieldGrid> {
    let d = r_hat.torus.dim() as i32;
    let rx = r_hat.zip_with(x_hat, |a, b| a * b).to_position()?;
    let x = x_hat.to_position()?;
    let prod = rx.zip_with(&x, |a, b| a * b).to_momentum()?;
    let c = (2.0 * PI).powi(d).sqrt();
    Ok(FieldGrid { values: prod.values.iter().map(|v| v * c).collect(), ..prod })
}

fn decay(grid: &MomentumGrid, tau: f64) -> Vec<f64> {
    (0..grid.torus.len()).map(|i| (-grid.diffusion * tau * grid.torus.k_squared(i)).exp()).collect()
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Sum of all tree diagrams for the density, in momentum space:
///
/// `X(k,t) = e^{−Dtk²} v_k − ∫₀ᵗ ds e^{−D(t−s)k²} Σ_m dm R_m X(m,s) X(k−m,s)`.
///
/// The time integral uses the trapezoid rule on `steps` equal steps; the
/// implicit end-point term is resolved by fixed-point sweeps.
pub fn dyson_tree_density(grid: &MomentumGrid, t_end: f64, steps: usize) -> Result<TimeSeries> {
    let steps = steps.max(1);
    let h = t_end / steps as f64;
    let e_h = decay(grid, h);
    let n = grid.torus.len();
    let zero = Complex64::new(0.0, 0.0);

    let mut times = vec![0.0];
    let mut fields = vec![grid.v_hat.clone()];
    let mut x = grid.v_hat.clone();
    let mut free = grid.v_hat.values.clone();
    // history S_j = h[½ e^{−t_j Dk²} N_0 + Σ_{0<i<j} e^{−(t_j−t_i)Dk²} N_i]
    let mut history = vec![zero; n];
    let mut nl = nonlinear_term(&grid.r_hat, &x)?;
    for step in 1..=steps {
        let weight = if step == 1 { 0.5 } else { 1.0 };
        for i in 0..n {
            history[i] = e_h[i] * (history[i] + h * weight * nl.values[i]);
            free[i] *= e_h[i];
        }
        let explicit: Vec<Complex64> = (0..n).map(|i| free[i] - history[i]).collect();
        let mut next = x.clone();
        next.values = (0..n).map(|i| explicit[i] - 0.5 * h * nl.values[i] * e_h[i]).collect();
        let mut converged = false;
        let mut correction = f64::INFINITY;
        for _ in 0..MAX_SWEEPS {
            let n_next = nonlinear_term(&grid.r_hat, &next)?;
            let updated: Vec<Complex64> = (0..n).map(|i| explicit[i] - 0.5 * h * n_next.values[i]).collect();
            correction = updated.iter().zip(&next.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            next.values = updated;
            if !next.values.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(PerturbError::NonConvergence { step, correction: f64::INFINITY });
            }
            if correction <= FIXED_POINT_TOL * sup(&next.values).max(f64::MIN_POSITIVE) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(PerturbError::NonConvergence { step, correction });
        }
        nl = nonlinear_term(&grid.r_hat, &next)?;
        x = next;
        times.push(step as f64 * h);
        fields.push(x.clone());
    }
    Ok(TimeSeries { times, fields })
}

/// `−X·(R∗X)` in position space, with the convolution done spectrally.
fn reaction(grid: &MomentumGrid, x: &FieldGrid) -> Result<FieldGrid> {
    let d = grid.torus.dim() as i32;
    let c = (2.0 * PI).powi(d).sqrt();
    let conv = grid.r_hat.zip_with(&x.to_momentum()?, |a, b| a * b * c).to_position()?;
    Ok(x.zip_with(&conv, |a, b| -(a * b)))
}

fn axpy(x: &FieldGrid, a: f64, y: &FieldGrid) -> FieldGrid {
    x.zip_with(y, |p, q| p + a * q)
}

/// Position-space mean-field equation `∂X/∂t = DΔX − X·(R∗X)` for an
/// annihilation model, by Strang splitting: exact spectral diffusion half
/// steps around a fourth-order Runge–Kutta reaction step.
pub fn mean_field_pde(spec: &ModelSpec, t_end: f64, steps: usize) -> Result<TimeSeries> {
    mean_field_pde_on(&MomentumGrid::from_spec(spec)?, t_end, steps)
}

/// [`mean_field_pde`] on an explicit momentum grid.
pub fn mean_field_pde_on(grid: &MomentumGrid, t_end: f64, steps: usize) -> Result<TimeSeries> {
    let steps = steps.max(1);
    let h = t_end / steps as f64;
    let half = decay(grid, 0.5 * h);
    let diffuse = |x: &FieldGrid| -> Result<FieldGrid> {
        let mut m = x.to_momentum()?;
        m.values.iter_mut().zip(&half).for_each(|(v, e)| *v *= e);
        Ok(m.to_position()?)
    };
    // rounding leaves tiny imaginary parts after each transform; drop them
    let mut x = grid.v_hat.to_position()?.map(|v| v);
    let mut times = vec![0.0];
    let mut fields = vec![x.clone()];
    for step in 1..=steps {
        let y = diffuse(&x)?;
        let k1 = reaction(grid, &y)?;
        let k2 = reaction(grid, &axpy(&y, 0.5 * h, &k1))?;
        let k3 = reaction(grid, &axpy(&y, 0.5 * h, &k2))?;
        let k4 = reaction(grid, &axpy(&y, h, &k3))?;
        let mut z = y.clone();
        for i in 0..z.values.len() {
            z.values[i] += h / 6.0 * (k1.values[i] + 2.0 * k2.values[i] + 2.0 * k3.values[i] + k4.values[i]);
        }
        x = diffuse(&z)?.map(|v| v);
        times.push(step as f64 * h);
        fields.push(x.clone());
    }
    Ok(TimeSeries { times, fields })
}

/// Evaluates the memory form of the tree-level equation at `series.times[index]`,
///
/// `X(t) = e^{tDΔ}v − ∫₀ᵗ ds [Φ(t−s)∗X(s)]·[R∗Φ(t−s)∗X(s)]`,
///
/// with `X(s)` taken from `series` and the `s` integral done by the
/// trapezoid rule over its stored times, and returns its largest deviation
/// from `series` at that time relative to the field's sup norm. The two
/// forms agree to leading order in `t`.
pub fn memory_form_deviation(grid: &MomentumGrid, series: &TimeSeries, index: usize) -> Result<f64> {
    let momentum = |f: &FieldGrid| -> Result<FieldGrid> {
        Ok(match f.representation {
            Representation::Momentum => f.clone(),
            Representation::Position => f.to_momentum()?,
        })
    };
    let t = series.times[index];
    let mut acc: Vec<Complex64> = grid.v_hat.values.iter().zip(decay(grid, t)).map(|(v, e)| v * e).collect();
    for j in 0..=index {
        if index == 0 {
            break;
        }
        let w = if j == 0 {
            0.5 * (series.times[1] - series.times[0])
        } else if j == index {
            0.5 * (series.times[j] - series.times[j - 1])
        } else {
            0.5 * (series.times[j + 1] - series.times[j - 1])
        };
        let mut xs = momentum(&series.fields[j])?;
        xs.values.iter_mut().zip(decay(grid, t - series.times[j])).for_each(|(v, e)| *v *= e);
        let vertex = nonlinear_term(&grid.r_hat, &xs)?;
        acc.iter_mut().zip(&vertex.values).for_each(|(a, b)| *a -= w * b);
    }
    let mem = FieldGrid { values: acc, ..grid.v_hat.clone() }.to_position()?;
    let target = match series.fields[index].representation {
        Representation::Position => series.fields[index].clone(),
        Representation::Momentum => series.fields[index].to_position()?,
    };
    Ok(mem.sup_distance(&target) / sup(&target.values).max(f64::MIN_POSITIVE))
}
