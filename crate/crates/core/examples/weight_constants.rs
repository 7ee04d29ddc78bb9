//! Muckenhoupt-type constants of power weights, with the divergence flag.

use gradbound::field::GridSpec;
use gradbound::geometry::CubeFamily;
use gradbound::weights::{a1_constant, a1n_constant, ainf_constant, ap_constant, apq_constant, WeightSpec};

fn main() -> gradbound::Result<()> {
    let grid = GridSpec::new(2, 128, 4.0)?;
    let fam = CubeFamily::for_weights(&grid);
    println!("{:>5} {:>9} {:>9} {:>9} {:>9} {:>9}", "a", "A1", "A2", "A(1.5,6)", "Ainf", "A1,n");
    for a in [0.0, 0.5, 1.0, 1.5] {
        let w = WeightSpec::Power { a, center: vec![] }.build(&grid)?;
        let cells = [
            a1_constant(&w, &fam)?,
            ap_constant(&w, 2.0, &fam)?,
            apq_constant(&w, 1.5, 6.0, &fam)?,
            ainf_constant(&w, &fam)?,
            a1n_constant(&w, &fam)?,
        ]
        .map(|r| if r.divergent { format!("{:.3}*", r.value) } else { format!("{:.3}", r.value) });
        println!("{a:>5} {:>9} {:>9} {:>9} {:>9} {:>9}", cells[0], cells[1], cells[2], cells[3], cells[4]);
    }
    println!("* still growing across scales");
    Ok(())
}
