//! Cube, iterated, Lorentz and sharp maximal functions of one bump.

use gradbound::field::{make_bump, GridSpec};
use gradbound::geometry::CubeFamily;
use gradbound::harness::suite::default_quadrature;
use gradbound::maximal::{cube_maximal, iterated_maximal, sharp_maximal, sphere_maximal, MaximalGauge, RadiusLadder};

fn main() -> gradbound::Result<()> {
    let grid = GridSpec::new(2, 64, 4.0)?;
    let f = make_bump(&grid, &[0.0; 3], 1.0, 1.0)?;
    let fam = CubeFamily::standard(&grid);
    let far = grid.flat_index([60, 32, 0]);
    let report = |name: &str, v: &gradbound::field::ScalarField| {
        println!("{name:<14} sup {:.4}   at x = {:?}: {:.3e}", v.max_abs(), grid.center(far), v.values()[far]);
    };
    report("M", &cube_maximal(&f, &MaximalGauge::mean(), &fam)?);
    report("M^2", &iterated_maximal(&f, 2, &fam)?);
    report("M_L(2,1)", &cube_maximal(&f, &MaximalGauge::lorentz(2.0, 1.0)?, &fam)?);
    report("M_1/2 (frac)", &cube_maximal(&f, &MaximalGauge::mean().fractional(0.5), &fam)?);
    report("M#", &sharp_maximal(&f, &fam)?);
    let quad = default_quadrature(2)?;
    let radii = RadiusLadder::for_grid(&grid).radii();
    report("spherical", &sphere_maximal(&f, &quad, &radii)?);
    Ok(())
}
