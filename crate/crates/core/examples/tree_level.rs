//! Tree-level annihilation: the Dyson recursion in momentum space against
//! the mean-field PDE, and the diffusion-limited logistic law.

use rdito::grid::Torus;
use rdito::perturb::{dyson_tree_density, mean_field_pde, MomentumGrid};
use rdito::spec::{FieldSpec, KernelSpec, ModelKind, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let torus = Torus::cube(1, 32, 10.0);
    let spec = ModelSpec::new(ModelKind::Annihilation, &torus, FieldSpec::gaussian(8.0, vec![5.0], 1.2))
        .with_diffusion(0.5)
        .with_kernel(KernelSpec::Gaussian { integral: 0.6, sigma: 0.5, cutoff: 5.0 });
    let dyson = dyson_tree_density(&MomentumGrid::from_spec(&spec)?, 0.5, 500)?;
    let pde = mean_field_pde(&spec, 0.5, 500)?;
    for i in (0..=500).step_by(100) {
        let a = dyson.fields[i].to_position()?;
        println!(
            "t={:.2} mass {:.6} gap to PDE {:.2e}",
            dyson.times[i],
            a.integral()?,
            a.sup_distance(&pde.fields[i])
        );
    }

    let (v, r) = (1.5, 0.8);
    let flat = ModelSpec::new(ModelKind::Annihilation, &Torus::cube(1, 8, 4.0), FieldSpec::Const(v))
        .with_diffusion(1.0)
        .with_kernel(KernelSpec::Delta { integral: r });
    let series = dyson_tree_density(&MomentumGrid::from_spec(&flat)?, 2.0, 400)?;
    for i in (0..=400).step_by(100) {
        let t = series.times[i];
        let x = series.fields[i].to_position()?.values[0].re;
        println!("t={t:.1} X={x:.8} logistic={:.8}", v / (1.0 + r * v * t));
    }
    Ok(())
}
