//! Convergence of the planar identities behind the estimates.

use gradbound::field::GridSpec;
use gradbound::harness::identity::identity_suite;
use gradbound::harness::suite::default_quadrature;

fn main() -> gradbound::Result<()> {
    let report = identity_suite(&GridSpec::new(2, 64, 4.0)?, &*default_quadrature(2)?)?;
    for r in [&report.spherical_mean, &report.riesz] {
        let res: Vec<String> = r.residuals.iter().map(|(h, e)| format!("h={h:.4}: {e:.2e}")).collect();
        println!("{:<16} {}  order {:.2?}", r.name, res.join(", "), r.order);
    }
    if let Some(b) = &report.beurling {
        println!("{:<16} finest residual {:.2e}", b.name, b.finest());
    }
    for (k, lhs, rhs) in &report.ball_weak_norm {
        println!("ball vs sphere weak norm at 2^{k}: {lhs:.4} / {rhs:.4}");
    }
    Ok(())
}
