//! Lorentz quasinorms from the distribution function, and Orlicz averages.

use gradbound::field::{lp_norm, GridSpec, ScalarField};
use gradbound::geometry::Cube;
use gradbound::lorentz::{associate, lorentz_norm, orlicz_avg, LorentzIndex, YoungFunction};

fn main() -> gradbound::Result<()> {
    let grid = GridSpec::new(2, 64, 2.0)?;
    let f = ScalarField::from_fn(grid, |x| (x[0] * x[0] + x[1] * x[1] + 0.01).powf(-0.25))?;
    for q in [1.0, 2.0, 4.0, f64::INFINITY] {
        println!("‖f‖_L(3,{q}) = {:.5}", lorentz_norm(&f, LorentzIndex::new(3.0, q)?, None)?);
    }
    println!("‖f‖_3 = {:.5}", lp_norm(&f, 3.0, None)?);

    let phi = YoungFunction::power_log(2.0, 1.0)?;
    let q = Cube::new(2, [16, 16, 0], 32);
    println!("{} average on the central cube: {:.5}", phi.label(), orlicz_avg(&f, &q, &phi)?);
    println!("associate: {}", associate(&phi)?.label());
    Ok(())
}
