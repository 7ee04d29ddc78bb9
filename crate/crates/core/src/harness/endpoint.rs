//! Weak-type norms for the endpoint inequalities.

use crate::error::Result;
use crate::field::ScalarField;
use crate::geometry::CubeFamily;
use crate::lorentz::{lorentz_norm, LorentzIndex, YoungFunction};
use crate::maximal::{cube_maximal, MaximalGauge};

/// `‖g‖_{L^{q,∞}(u dx)}`, with Lebesgue measure when `density` is absent.
pub fn weak_type_norm(g: &ScalarField, q: f64, density: Option<&ScalarField>) -> Result<f64> {
    lorentz_norm(g, LorentzIndex::weak(q)?, density)
}

/// `M_1(M_{L(log L)^ε} w)`, the density on the gradient side of the
/// weak-(1,1) endpoint bound.
pub fn log_endpoint_rhs_density(w: &ScalarField, eps: f64) -> Result<ScalarField> {
    let family = CubeFamily::standard(w.grid());
    let inner = cube_maximal(w, &MaximalGauge::orlicz(YoungFunction::power_log(1.0, eps)?), &family)?;
    cube_maximal(&inner, &MaximalGauge::mean().fractional(1.0), &family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpec;

    #[test]
    fn indicator_weak_norm() {
        let g = GridSpec::new(2, 16, 1.0).unwrap();
        let e = ScalarField::from_fn(g, |x| if x[0] < 0.0 && x[1] < 0.5 { 1.0 } else { 0.0 }).unwrap();
        let u = ScalarField::from_fn(g, |x| 1.0 + x[1] * x[1]).unwrap();
        let ue = e.mul(&u).unwrap().integral();
        for q in [1.0, 2.0, 3.5] {
            let v = weak_type_norm(&e, q, Some(&u)).unwrap();
            assert!((v - ue.powf(1.0 / q)).abs() < 1e-12 * v);
        }
    }

    #[test]
    fn endpoint_density_dominates_the_weight_scale() {
        // M_1(M_Φ w) ≥ ℓ(Q)·⨍_Q w on the whole box for w ≡ 1
        let g = GridSpec::new(2, 16, 1.0).unwrap();
        let d = log_endpoint_rhs_density(&ScalarField::constant(g, 1.0), 0.5).unwrap();
        assert!(d.values().iter().all(|v| *v >= 2.0 * 0.999));
    }
}
