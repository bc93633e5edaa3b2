//! Brownian tree (A → A + A): the branching series, its truncation, and
//! the static case where the density is exactly v·e^{μt}.

use rdito::grid::Torus;
use rdito::models::{brownian_tree_density_grid, brownian_tree_partial_density, stirling2, SeriesConfig};
use rdito::spec::{FieldSpec, ModelKind, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("S(n+1, k+1) weights of the ordered products:");
    for n in 0..6 {
        let row: Vec<String> = (0..=n).map(|k| stirling2(n + 1, k + 1).unwrap().to_string()).collect();
        println!("  n={n}: {}", row.join(" "));
    }

    let torus = Torus::cube(1, 64, 10.0);
    let v = FieldSpec::gaussian(20.0, vec![5.0], 1.0);
    let (mu, t) = (0.5, 1.0);
    let fixed = ModelSpec::new(ModelKind::BrownianTree, &torus, v.clone()).with_mu(FieldSpec::Const(mu));
    let x = brownian_tree_density_grid(&fixed, t, &SeriesConfig::default())?;
    let exact = fixed.v.sample(&torus, 0.0).map(|p| p * (mu * t).exp());
    println!("static: sup |X − v e^(μt)| = {:.2e}", x.sup_distance(&exact));

    let moving = fixed.with_diffusion(1.0);
    for k in [0, 2, 5, 10, 20] {
        let part = brownian_tree_partial_density(&moving, t, k)?;
        println!("diffusive, K={k:>2}: mass {:.6}", part.integral()?);
    }
    println!("mean count 20·e^(μt) = {:.6}", 20.0 * (mu * t).exp());
    Ok(())
}
