//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use rdito::quad::integrate;

/// `∫_{0<s_n<…<s_1<t} ∏ e^{−a_i(s_{i−1}−s_i)}` by nested adaptive quadrature:
/// `F(a₁,…,a_n)(t) = ∫₀ᵗ e^{−a₁(t−s)} F(a₂,…,a_n)(s) ds`.
pub fn nested_simplex(rates: &[f64], t: f64) -> f64 {
    if rates.len() == 1 {
        return (-rates[0] * t).exp();
    }
    integrate(|s| (-rates[0] * (t - s)).exp() * nested_simplex(&rates[1..], s), 0.0, t, 1e-14, 1e-12).unwrap()
}

/// Gaussian annihilation data on a 1-D box: kernel `rbar·N(0, σ_R²)` and
/// initial intensity `mass·N(0, σ_v²)`, both through their exact transforms.
pub struct GaussianDiagram {
    pub l: f64,
    pub n: usize,
    pub rbar: f64,
    pub sigma_r: f64,
    pub mass: f64,
    pub sigma_v: f64,
    pub diffusion: f64,
}

impl GaussianDiagram {
    /// Third-order term at integer frequency `kf`, summing the four-rate
    /// simplex integral over the truncated lattice with nested quadrature.
    pub fn third_order(&self, kf: i64, t: f64) -> f64 {
        let dk = 2.0 * PI / self.l;
        let c = (2.0 * PI).powf(-0.5);
        let d = self.diffusion;
        let r_hat = |f: i64| self.rbar * c * (-0.5 * (self.sigma_r * dk * f as f64).powi(2)).exp();
        let v_hat = |f: i64| self.mass * c * (-0.5 * (self.sigma_v * dk * f as f64).powi(2)).exp();
        let hi = (self.n / 2) as i64;
        let freqs: Vec<i64> = (hi + 1 - self.n as i64..=hi).collect();
        let k = kf as f64 * dk;
        let mut sum = 0.0;
        for &mf in &freqs {
            for &nf in &freqs {
                let qf = kf - mf - nf;
                if !freqs.contains(&qf) {
                    continue;
                }
                for &lf in &freqs {
                    let (m, nn, lq) = (mf as f64 * dk, nf as f64 * dk, lf as f64 * dk);
                    let rates = [
                        d * k * k,
                        d * ((k - m - nn + lq).powi(2) + (m + nn - lq).powi(2)),
                        d * ((k - m - nn + lq).powi(2) + (m - lq).powi(2) + nn * nn),
                        d * ((k - m - nn).powi(2) + m * m + nn * nn),
                    ];
                    sum += r_hat(lf) * r_hat(mf) * r_hat(nf) * v_hat(qf) * v_hat(mf) * v_hat(nf) * nested_simplex(&rates, t);
                }
            }
        }
        -sum * dk.powi(3) / (2.0 * 2.0 * PI)
    }
}
