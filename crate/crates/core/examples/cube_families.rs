//! Shifted dyadic cube families and the cubes that see a point.

use gradbound::field::{make_bump, GridSpec};
use gradbound::geometry::{average, CubeFamily};

fn main() -> gradbound::Result<()> {
    let grid = GridSpec::new(2, 32, 2.0)?;
    let f = make_bump(&grid, &[0.0; 3], 1.0, 1.0)?;
    for (name, fam) in [
        ("standard", CubeFamily::standard(&grid)),
        ("dyadic", CubeFamily::dyadic(&grid)),
        ("for_weights", CubeFamily::for_weights(&grid)),
    ] {
        println!("{name:<12} {} scales, {} cubes", fam.scales().len(), fam.len());
    }
    let fam = CubeFamily::standard(&grid);
    let x = [0.3, 0.1, 0.0];
    let best = fam
        .cubes_containing(&x)
        .into_iter()
        .map(|q| (average(&f.abs(), &q).unwrap(), q.sidelength(&grid)))
        .fold((0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a });
    println!("largest average around {x:?}: {:.5} on a cube of side {}", best.0, best.1);
    Ok(())
}
