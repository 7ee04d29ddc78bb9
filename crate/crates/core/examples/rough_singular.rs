//! Maximal truncations of a rough kernel, Riesz transforms and the Beurling operator.

use gradbound::field::{make_bump, GridSpec};
use gradbound::harness::suite::default_quadrature;
use gradbound::singular::{
    beurling, maximal_rough, project_mean_zero, riesz_transform, sphere_weak_norm, BeurlingMode, ComplexField, RieszMode,
    SphereFunction,
};

fn main() -> gradbound::Result<()> {
    let grid = GridSpec::new(2, 64, 4.0)?;
    let f = make_bump(&grid, &[0.0; 3], 1.0, 1.0)?;
    let quad = default_quadrature(2)?;
    // a kernel with a jump, then forced to mean zero
    let omega = project_mean_zero(&SphereFunction::from_fn(quad.clone(), |y| if y[1] > 0.3 { 2.0 } else { -0.5 })?);
    println!("‖Ω‖_L(1,∞)(S^1) = {:.4}", sphere_weak_norm(&omega));
    println!("sup T★_Ω f = {:.4}", maximal_rough(&f, &omega)?.max_abs());
    for mode in [RieszMode::Pv, RieszMode::Maximal] {
        println!("R_1 f ({mode:?}): sup {:.4}", riesz_transform(&f, 0, mode, &quad)?.max_abs());
    }
    let s = beurling(&ComplexField::real(f), BeurlingMode::S, &quad)?;
    println!("|S f|: sup {:.4}", s.modulus().max_abs());
    Ok(())
}
