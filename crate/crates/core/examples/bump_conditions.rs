//! Two-weight bump and testing conditions, and the tail classes they rely on.

use gradbound::field::{GridSpec, ScalarField};
use gradbound::geometry::CubeFamily;
use gradbound::lorentz::{bp_classify, BClass, YoungFunction};
use gradbound::weights::{bump_check, testing_check, BumpMode};

fn main() -> gradbound::Result<()> {
    for (name, phi) in [
        ("t^2", YoungFunction::power(2.0)?),
        ("t^2 log^-1.5", YoungFunction::power_log(2.0, -1.5)?),
        ("t^1.5", YoungFunction::power(1.5)?),
    ] {
        let r = bp_classify(&phi, 2.0, BClass::Bp);
        println!("{name:<14} in B_2: {} (slope {:.3}, log power {:.3})", r.verdict, r.slope, r.log_exponent);
    }

    let grid = GridSpec::new(2, 32, 1.0)?;
    let u = ScalarField::from_fn(grid, |x| 1.0 + x[0] * x[0])?;
    let v = ScalarField::constant(grid, 1.0);
    let bump = bump_check(&u, &v, 1.5, 6.0, 1.0, &BumpMode::LogBump { delta: 0.5 }, &CubeFamily::for_weights(&grid))?;
    println!("log bump: {:.4} over {} term(s)", bump.value, bump.terms.len());
    let t = testing_check(&u, &v, 1.5, 6.0, &CubeFamily::dyadic_inside(&grid))?;
    println!("testing: forward {:.4}, dual {:.4}", t.forward.value, t.dual.value);
    Ok(())
}
