//! Empirical constants of a few inequalities over a small random suite.

use gradbound::field::GridSpec;
use gradbound::harness::suite::{OmegaSpec, Suite};
use gradbound::harness::{run_case, CaseId, InequalityCase};

fn main() -> gradbound::Result<()> {
    let grid = GridSpec::new(2, 64, 4.0)?;
    let suite = Suite::generate(2, 5, 3, 1, &OmegaSpec::Random)?;
    for id in [CaseId::Repr, CaseId::PointMax, CaseId::LorentzMaximal, CaseId::MaximalRough, CaseId::WeakEndpoint] {
        let r = run_case(&InequalityCase::new(id), &suite, &grid)?;
        println!(
            "{:<12} c_emp {:.4}  spread {:.2}  members {:>2}  argmax {:?}",
            id.as_str(),
            r.aggregate.c_emp,
            r.spread,
            r.members.len(),
            r.aggregate.argmax.map(|x| [x[0], x[1]])
        );
    }
    Ok(())
}
