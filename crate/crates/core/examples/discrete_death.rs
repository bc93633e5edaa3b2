//! Discrete death: count distribution of a Poisson population under death.

use rdito::models::{discrete_death_distribution, discrete_death_gf};

fn main() {
    let (v, mu, t) = (12.0, 0.4, 1.5);
    let p = discrete_death_distribution(v, mu, t, 40);
    let mean: f64 = p.iter().enumerate().map(|(k, q)| k as f64 * q).sum();
    println!("mean {mean:.6} (v e^(-μt) = {:.6})", v * (-mu * t).exp());
    println!("P(N=0) {:.6} = G(0) {:.6}", p[0], discrete_death_gf(v, mu, t, 0.0));
    for (k, q) in p.iter().enumerate().take(12) {
        println!("{k:>3} {q:.6} {}", "#".repeat((q * 200.0) as usize));
    }
}
