//! Propagator from the Itô rules, simplex time integrals and the
//! third-order annihilation diagram.

use rdito::grid::Torus;
use rdito::perturb::{derive_propagator, propagator, simplex_time_factor, third_order_term, ExpProduct, MomentumGrid};
use rdito::spec::{FieldSpec, KernelSpec, ModelKind, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (k2, t, s) in [(0.0, 1.0, 0.0), (1.0, 1.0, 0.5), (4.0, 0.5, 0.0), (1.0, 0.2, 0.6)] {
        let derived = derive_propagator(0, 0, k2, t, s, 1.0)?;
        println!("G(|k|²={k2}, t={t}, s={s}) derived {derived:.12} closed {:.12}", propagator(k2, t, s, 1.0));
    }

    for rates in [vec![1.0, 2.0], vec![1.0, 1.0, 1.0], vec![0.3, 0.3 + 1e-9, 2.0, 5.0]] {
        println!("simplex {rates:?} at t=1: {:.12}", simplex_time_factor(&ExpProduct::new(rates.clone()), 1.0));
    }

    let torus = Torus::cube(1, 16, 10.0);
    let spec = ModelSpec::new(ModelKind::Annihilation, &torus, FieldSpec::gaussian(2.0, vec![0.0], 1.0))
        .with_diffusion(1.0)
        .with_kernel(KernelSpec::Gaussian { integral: 0.3, sigma: 1.0, cutoff: 5.0 });
    let grid = MomentumGrid::from_spec(&spec)?;
    for k in 0..4 {
        println!("third-order term at k={k}: {:.6e}", third_order_term(&grid, &[k], 1.0)?.re);
    }
    Ok(())
}
