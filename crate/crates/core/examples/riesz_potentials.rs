//! Riesz potentials of a field and of point masses, and the A_1 power weight.

use gradbound::field::{make_bump, GridSpec};
use gradbound::geometry::Cube;
use gradbound::potential::{a1_power_weight, kolmogorov_local_estimate, riesz_potential, DiscreteMeasure};

fn main() -> gradbound::Result<()> {
    let grid = GridSpec::new(2, 64, 4.0)?;
    let f = make_bump(&grid, &[0.0; 3], 1.0, 1.0)?;
    let wider = grid.with_half_width(8.0)?;
    let i1 = riesz_potential(&f, 1.0, &wider)?;
    println!("I_1 f: sup {:.4} on a box twice as wide", i1.max_abs());

    let mu = DiscreteMeasure::new(2, vec![[0.05, 0.05, 0.0], [-1.3, 0.9, 0.0]], vec![1.0, 0.5])?;
    let w = a1_power_weight(&mu, 1.0, 1.5, &grid)?;
    println!("(I_1 μ)^1.5: min {:.4}, max {:.4}", w.values().iter().cloned().fold(f64::INFINITY, f64::min), w.max_abs());
    let q = Cube::new(2, [24, 24, 0], 16);
    let k = kolmogorov_local_estimate(&mu, 1.0, &q, 1.5, &grid)?;
    println!("local average over cube / infimum: {:.4}", k.ratio());
    Ok(())
}
