//! Growth of the constant of an inequality that fails, against one that holds.

use gradbound::harness::probe::{divergence_probe, refinement_study, ProbeAxis};
use gradbound::harness::suite::{OmegaSpec, Suite};
use gradbound::harness::{CaseId, InequalityCase};

fn main() -> gradbound::Result<()> {
    let suite = Suite::generate(2, 3, 0, 1, &OmegaSpec::Random)?;
    let axis = ProbeAxis::Domain { radii: vec![4.0, 8.0, 16.0, 32.0], spacing: 0.25 };
    for id in [CaseId::Negative, CaseId::Repr] {
        let p = divergence_probe(&InequalityCase::new(id), &suite, &axis)?;
        println!("{:<12} exponent {:+.3}  series {:.3?}", id.as_str(), p.exponent, p.series);
    }
    let s = refinement_study(&InequalityCase::new(CaseId::PointMax), &suite, 4.0, &[32, 64, 128])?;
    println!("pointmax-8 under refinement: drift {:.3}, stable {}", s.drift, s.stable);
    Ok(())
}
