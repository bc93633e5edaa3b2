use std::f64::consts::PI;

use super::{ModelError, Result};
use crate::grid::Torus;

/// Free-space heat kernel `(4πDt)^{-d/2} exp(−|x|²/4Dt)`.
pub fn heat_kernel(d: usize, diffusion: f64, x: &[f64], t: f64) -> Result<f64> {
    if !(t > 0.0 && diffusion > 0.0) {
        return Err(ModelError::DegenerateTime);
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    Ok((4.0 * PI * diffusion * t).powf(-(d as f64) / 2.0) * (-r2 / (4.0 * diffusion * t)).exp())
}

/// Heat kernel on the torus: the sum over periodic images, which factorises
/// over axes. Images are added until they change the axis sum by less than
/// 1e-14 relative.
pub fn heat_kernel_wrapped(torus: &Torus, diffusion: f64, x: &[f64], t: f64) -> Result<f64> {
    if !(t > 0.0 && diffusion > 0.0) {
        return Err(ModelError::DegenerateTime);
    }
    let var4 = 4.0 * diffusion * t;
    let norm = (PI * var4).sqrt();
    let mut out = 1.0;
    for (a, xa) in torus.min_image(x, &vec![0.0; x.len()]).iter().enumerate() {
        let l = torus.lengths[a];
        let mut s = (-xa * xa / var4).exp();
        for n in 1.. {
            let y1 = xa + n as f64 * l;
            let y2 = xa - n as f64 * l;
            let add = (-y1 * y1 / var4).exp() + (-y2 * y2 / var4).exp();
            s += add;
            if add < 1e-14 * s {
                break;
            }
        }
        out *= s / norm;
    }
    Ok(out)
}
