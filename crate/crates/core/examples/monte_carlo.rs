//! Particle Monte Carlo against the death-diffusion closed form.

use rdito::grid::Torus;
use rdito::models::{density_fields, log_gf, GfQuery};
use rdito::simulate::{run, SimConfig};
use rdito::spec::{FieldSpec, ModelKind, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let torus = Torus::cube(1, 32, 10.0);
    let spec = ModelSpec::new(ModelKind::DeathDiffusion, &torus, FieldSpec::gaussian(20.0, vec![5.0], 1.0))
        .with_mu(FieldSpec::Const(1.0))
        .with_diffusion(1.0);
    let u = FieldSpec::bump(1.0, -0.5, vec![5.0], 1.0);
    let mut cfg = SimConfig::new(0.05, 20_000, 1);
    cfg.gf = vec![u.clone()];
    let t = 1.0;
    let report = run(&spec, &cfg, t)?;

    let analytic = density_fields(&spec, t)?.remove(0).1.cell_average()?;
    println!("{:>6} {:>10} {:>10} {:>7}", "x", "analytic", "mc", "z");
    for i in (0..torus.len()).step_by(2) {
        let (a, m, s) = (analytic.values[i].re, report.density[0].values[i].re, report.density_se[0].values[i].re);
        println!("{:>6.3} {a:>10.5} {m:>10.5} {:>7.2}", torus.position(i)[0], (m - a) / s.max(1e-12));
    }
    let exact = log_gf(&spec, &GfQuery::new(u.sample(&torus, 0.0), t))?;
    let est = report.log_gf(0);
    println!("log GF: exact {exact:.5}, MC {:.5} ± {:.5}", est.mean, est.se);
    Ok(())
}
