//! Death-diffusion: density, log generating functional and Janossy densities.

use rdito::grid::Torus;
use rdito::models::{death_diffusion_density, death_diffusion_fn, log_gf, GfQuery};
use rdito::spec::{FieldSpec, ModelKind, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let torus = Torus::cube(1, 128, 10.0);
    let spec = ModelSpec::new(ModelKind::DeathDiffusion, &torus, FieldSpec::gaussian(20.0, vec![5.0], 1.0))
        .with_mu(FieldSpec::Const(1.0))
        .with_diffusion(1.0);

    let u = FieldSpec::bump(1.0, -0.5, vec![5.0], 1.0).sample(&torus, 0.0);
    for t in [0.0, 0.5, 1.0, 2.0] {
        let centre = death_diffusion_density(&spec, &[5.0], t)?;
        let lg = log_gf(&spec, &GfQuery::new(u.clone(), t))?;
        // probability density of finding exactly two particles, at 4 and 6
        let pair = death_diffusion_fn(&spec, &[vec![4.0], vec![6.0]], t)?;
        println!("t={t:<4} X(5)={centre:.6}  log GF={lg:.6}  f2(4,6)={pair:.3e}");
    }
    Ok(())
}
