//! Spontaneous birth with a sin²(t) intensity, and birth-death with a
//! linearly ramped death rate, both by quadrature.

use rdito::grid::Torus;
use rdito::models::{birth_death_timedep_density, spont_birth_density};
use rdito::spec::{Builtin, FieldSpec, ModelKind, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let torus = Torus::cube(1, 32, 10.0);
    let v = FieldSpec::gaussian(10.0, vec![5.0], 1.0);
    let seasonal = FieldSpec::Expr(Builtin::Sin2Time { scale: 2.0, spatial: Box::new(FieldSpec::Const(1.0)) });
    let births = ModelSpec::new(ModelKind::SpontBirth, &torus, v.clone()).with_mu(seasonal);

    let ramp = FieldSpec::Expr(Builtin::Ramp { a: 0.1, b: 0.2, spatial: Box::new(FieldSpec::Const(1.0)) });
    let turnover = ModelSpec::new(ModelKind::BirthDeathTimedep, &torus, v)
        .with_mu(FieldSpec::Const(0.5))
        .with_nu(ramp);

    for t in [0.0, 1.0, 2.0, 4.0, 8.0] {
        let a = spont_birth_density(&births, &[5.0], t)?;
        let b = birth_death_timedep_density(&turnover, &[5.0], t)?;
        println!("t={t:<4} spontaneous {a:.6}  birth-death {b:.6}");
    }
    Ok(())
}
