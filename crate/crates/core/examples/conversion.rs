//! Conversion A → B: species densities and mass conservation.

use rdito::grid::Torus;
use rdito::models::density_fields;
use rdito::spec::{FieldSpec, ModelKind, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let torus = Torus::cube(1, 64, 10.0);
    let spec = ModelSpec::new(ModelKind::ConvertAb, &torus, FieldSpec::gaussian(20.0, vec![5.0], 1.5))
        .with_v_b(FieldSpec::Const(0.5))
        .with_mu(FieldSpec::Const(0.6));
    for t in [0.0, 0.5, 1.0, 3.0] {
        let fields = density_fields(&spec, t)?;
        let masses: Vec<f64> = fields.iter().map(|f| f.1.integral()).collect::<Result<_, _>>()?;
        println!("t={t:<4} mass A={:.4} B={:.4} total={:.12}", masses[0], masses[1], masses[0] + masses[1]);
    }
    Ok(())
}
