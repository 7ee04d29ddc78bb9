//! Sample a bump, take its gradient and measure a few norms.

use gradbound::field::{gradient, lp_norm, make_bump, GridSpec};

fn main() -> gradbound::Result<()> {
    let grid = GridSpec::new(2, 128, 4.0)?;
    let f = make_bump(&grid, &[0.5, -0.25, 0.0], 1.5, 1.0)?;
    let grad = gradient(&f).magnitude();
    println!("h = {}, cells = {}", grid.spacing(), grid.len());
    for p in [1.0, 2.0, f64::INFINITY] {
        println!("‖f‖_{p} = {:.6}   ‖∇f‖_{p} = {:.6}", lp_norm(&f, p, None)?, lp_norm(&grad, p, None)?);
    }
    println!("support ball: {:?}", f.support_ball());
    Ok(())
}
