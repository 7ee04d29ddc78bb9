//! The named inequalities and how each side is computed.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{lp_norm, GridSpec, ScalarField};
use crate::geometry::CubeFamily;
use crate::lorentz::conjugate;
use crate::maximal::{cube_maximal, iterated_maximal, rough_maximal, sharp_maximal, sphere_maximal, MaximalGauge, RadiusLadder};
use crate::potential::{a1_power_weight, riesz_potential};
use crate::singular::{maximal_rough_batch, project_mean_zero, riesz_transform, RieszMode, SphereFunction};
use crate::weights::{a1_constant, apq_constant, WeightSpec};

use super::endpoint::{log_endpoint_rhs_density, weak_type_norm};
use super::poincare::{poincare_check, random_balls, PoincareVariant, Region};
use super::sobolev::sobolev_ratio;
use super::suite::{BumpParams, Suite};
use super::{empirical_constant, spread, EmpiricalConstantReport, DEFAULT_THETA};

/// Identifier of an inequality case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseId {
    /// `|f| ≤ C I_1(|∇f|)`
    Repr,
    /// `Mf ≤ C I_1(|∇f|)`
    PointMax,
    /// `M^k f ≤ C I_1(|∇f|)`
    Iterated,
    /// `M^# f ≤ C M_1(|∇f|)`
    Sharp,
    /// `M_{L^{n'}} f ≤ C I_1(|∇f|)`
    CriticalPower,
    /// `M_{L^{n',1}} f ≤ C (M_1(|∇f|) + Mf)`
    LorentzMaximal,
    /// `M_Ω f ≤ C ‖Ω‖_{L^{n,∞}} I_1(|∇f|)`
    RoughMaximal,
    /// `T★_Ω f ≤ C ‖Ω‖_{L^{n,∞}} I_1(|∇f|)`
    MaximalRough,
    /// `M_{L^r}(R_1 f) ≤ C I_1(|∇f|)`, `r < n'`
    SelfImprovement,
    /// `‖R_1 f‖_{L^p(w)} ≤ C ‖M_1(|∇f|)‖_{L^p(w)}`
    CzGradient,
    /// `[(I_α μ)^r]_{A_1}`
    PowerA1,
    /// `M_{L^{n'+ε}} f` against `I_1(|∇f|)`: no uniform constant exists
    Negative,
    /// `M_{S^{n-1}} f ≤ I_1(|∇f|)`
    SphereMaximal,
    /// `‖wf‖_{p*} ≤ C [w]_{A_{p,p*}}^{1/n'} ‖w∇f‖_p`
    Sobolev,
    /// `‖Tf‖_{L^{1,∞}(w)} ≤ C ∫|∇f| M_1(M_{L(log L)^ε} w)` for `T = M` and `T★_Ω`
    LogEndpoint,
    /// `‖M_{L^{n',1}} f‖_{L^{n',∞}} ≤ C ‖∇f‖_1`
    WeakEndpoint,
    /// `⨍_B|f - f_B| ≤ C r ⨍_B|∇f|`
    PoincareOneOne,
    /// `(⨍_B|f - f_B|^q)^{1/q} ≤ C r (⨍_B|∇f|^p)^{1/p}`
    PoincareClassical,
    /// `‖f - f_B‖_{L^{n',1}(B)} ≤ C r ⨍_B|∇f|`
    PoincareLorentz,
}

impl CaseId {
    pub const ALL: [CaseId; 19] = [
        Self::Repr,
        Self::PointMax,
        Self::Iterated,
        Self::Sharp,
        Self::CriticalPower,
        Self::LorentzMaximal,
        Self::RoughMaximal,
        Self::MaximalRough,
        Self::SelfImprovement,
        Self::CzGradient,
        Self::PowerA1,
        Self::Negative,
        Self::SphereMaximal,
        Self::Sobolev,
        Self::LogEndpoint,
        Self::WeakEndpoint,
        Self::PoincareOneOne,
        Self::PoincareClassical,
        Self::PoincareLorentz,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Repr => "repr-2",
            Self::PointMax => "pointmax-8",
            Self::Iterated => "iter-9",
            Self::Sharp => "sharp-12",
            Self::CriticalPower => "Mn'-22",
            Self::LorentzMaximal => "thm-1.1",
            Self::RoughMaximal => "cor-1.2",
            Self::MaximalRough => "main-1.4",
            Self::SelfImprovement => "selfimp-1.6",
            Self::CzGradient => "CZ-grad-14",
            Self::PowerA1 => "lemma-1.5",
            Self::Negative => "neg-Mn'+ε",
            Self::SphereMaximal => "sphere-max",
            Self::Sobolev => "sobolev-31",
            Self::LogEndpoint => "endpoint-43",
            Self::WeakEndpoint => "weak-Mn'1",
            Self::PoincareOneOne => "poincare-1-1",
            Self::PoincareClassical => "poincare-classical",
            Self::PoincareLorentz => "poincare-lorentz",
        }
    }

    fn uses_omega(&self) -> bool {
        matches!(self, Self::RoughMaximal | Self::MaximalRough)
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neg" | "neg-Mn'+eps" => Ok(Self::Negative),
            _ => Self::ALL.iter().find(|c| c.as_str() == s).copied().ok_or_else(|| Error::UnknownCase(s.to_string())),
        }
    }
}

impl Serialize for CaseId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for CaseId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exponents and switches shared by the cases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CaseParams {
    /// Number of iterations of `M`.
    pub k: usize,
    /// Power in the self-improvement and `A_1` power cases.
    pub r: f64,
    /// Excess over `n'` in the negative case.
    pub eps: f64,
    /// Lebesgue exponent of norm cases.
    pub p: f64,
    /// Order of the potential in the `A_1` power case.
    pub alpha: f64,
    /// Exponent `a` of the power weight `|x|^{-a}` used by weighted cases.
    pub weight_a: f64,
    /// Log power of the Orlicz maximal function at the endpoint.
    pub log_eps: f64,
    /// Project the sphere kernels to mean zero before `T★_Ω`.
    pub mean_zero: bool,
    /// Random balls per bump in the Poincaré cases.
    pub balls: usize,
}

impl Default for CaseParams {
    fn default() -> Self {
        Self { k: 2, r: 1.5, eps: 1.0, p: 1.5, alpha: 1.0, weight_a: 0.2, log_eps: 0.5, mean_zero: true, balls: 50 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCase {
    pub id: CaseId,
    pub params: CaseParams,
    /// Mask threshold relative to the largest right-hand side.
    pub theta: f64,
}

impl InequalityCase {
    pub fn new(id: CaseId) -> Self {
        Self { id, params: CaseParams::default(), theta: DEFAULT_THETA }
    }

    pub fn with_params(id: CaseId, params: CaseParams) -> Self {
        Self { params, ..Self::new(id) }
    }

    /// Whether the case is expected to have a uniform constant.
    pub fn is_positive(&self, dim: usize) -> bool {
        match self.id {
            CaseId::Negative => false,
            CaseId::PowerA1 => self.params.r < dim as f64 / (dim as f64 - self.params.alpha),
            CaseId::MaximalRough => self.params.mean_zero,
            _ => true,
        }
    }
}

/// One suite element's constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberReport {
    pub field_id: Option<usize>,
    pub omega_id: Option<usize>,
    pub report: EmpiricalConstantReport,
    /// Wall time of this member; left out of serialized reports.
    #[serde(skip)]
    pub runtime_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseReport {
    pub case_id: CaseId,
    pub n: usize,
    pub cells: usize,
    pub half_width: f64,
    pub theta: f64,
    pub members: Vec<MemberReport>,
    /// The member with the largest constant.
    pub aggregate: EmpiricalConstantReport,
    /// `max/min` of the member constants.
    pub spread: f64,
    pub warnings: Vec<String>,
}

impl CaseReport {
    pub fn constants(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.report.c_emp).collect()
    }
}

fn i1_of_gradient(b: &BumpParams, grid: &GridSpec) -> Result<(ScalarField, ScalarField)> {
    let grad = b.gradient_magnitude(grid)?;
    let i1 = riesz_potential(&grad, 1.0, grid)?;
    Ok((grad, i1))
}

fn power_weight(grid: &GridSpec, a: f64) -> Result<ScalarField> {
    WeightSpec::Power { a, center: vec![] }.build(grid)
}

/// State computed once per case and shared by all suite members.
enum Shared {
    None,
    Density(ScalarField),
    Omegas(Vec<SphereFunction>),
    Endpoint { weight: ScalarField, density: ScalarField, omegas: Vec<SphereFunction> },
}

fn shared(case: &InequalityCase, suite: &Suite, grid: &GridSpec, warnings: &mut Vec<String>) -> Result<Shared> {
    let p = &case.params;
    Ok(match case.id {
        CaseId::LogEndpoint => {
            let weight = power_weight(grid, p.weight_a)?;
            Shared::Endpoint {
                density: log_endpoint_rhs_density(&weight, p.log_eps)?,
                weight,
                omegas: suite.omegas.iter().map(project_mean_zero).collect(),
            }
        }
        CaseId::CzGradient | CaseId::Sobolev => Shared::Density(power_weight(grid, p.weight_a)?),
        CaseId::MaximalRough => {
            if !p.mean_zero {
                let msg = "sphere kernels used without mean-zero projection; constants pick up the kernel's mean".to_string();
                warn!("{msg}");
                warnings.push(msg);
            }
            let omegas = suite.omegas.iter().map(|o| if p.mean_zero { project_mean_zero(o) } else { o.clone() }).collect();
            Shared::Omegas(omegas)
        }
        CaseId::RoughMaximal => Shared::Omegas(suite.omegas.clone()),
        _ => Shared::None,
    })
}

fn need_dim(grid: &GridSpec, min: usize) -> Result<()> {
    if grid.dim() < min {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    Ok(())
}

fn member(
    case: &InequalityCase,
    suite: &Suite,
    shared: &Shared,
    b: &BumpParams,
    index: usize,
    grid: &GridSpec,
) -> Result<Vec<(Option<usize>, EmpiricalConstantReport)>> {
    let p = &case.params;
    let theta = case.theta;
    let n = grid.dim() as f64;
    let family = CubeFamily::standard(grid);
    let f = b.field(grid)?;
    let one = |lhs: &ScalarField, rhs: &ScalarField| -> Result<Vec<(Option<usize>, EmpiricalConstantReport)>> {
        Ok(vec![(None, empirical_constant(lhs, rhs, theta)?)])
    };
    match case.id {
        CaseId::Repr => one(&f.abs(), &i1_of_gradient(b, grid)?.1),
        CaseId::PointMax => one(&cube_maximal(&f, &MaximalGauge::mean(), &family)?, &i1_of_gradient(b, grid)?.1),
        CaseId::Iterated => one(&iterated_maximal(&f, p.k, &family)?, &i1_of_gradient(b, grid)?.1),
        CaseId::Sharp => {
            let grad = b.gradient_magnitude(grid)?;
            let m1 = cube_maximal(&grad, &MaximalGauge::mean().fractional(1.0), &family)?;
            one(&sharp_maximal(&f, &family)?, &m1)
        }
        CaseId::CriticalPower => {
            need_dim(grid, 2)?;
            one(&cube_maximal(&f, &MaximalGauge::power(conjugate(n))?, &family)?, &i1_of_gradient(b, grid)?.1)
        }
        CaseId::Negative => {
            need_dim(grid, 2)?;
            let gauge = MaximalGauge::power(conjugate(n) + p.eps)?;
            one(&cube_maximal(&f, &gauge, &family)?, &i1_of_gradient(b, grid)?.1)
        }
        CaseId::LorentzMaximal => {
            need_dim(grid, 2)?;
            let grad = b.gradient_magnitude(grid)?;
            let lhs = cube_maximal(&f, &MaximalGauge::lorentz(conjugate(n), 1.0)?, &family)?;
            let m1 = cube_maximal(&grad, &MaximalGauge::mean().fractional(1.0), &family)?;
            let rhs = m1.add(&cube_maximal(&f, &MaximalGauge::mean(), &family)?)?;
            one(&lhs, &rhs)
        }
        CaseId::RoughMaximal => {
            let Shared::Omegas(omegas) = shared else { unreachable!() };
            let i1 = i1_of_gradient(b, grid)?.1;
            let ladder = RadiusLadder::for_grid(grid);
            omegas
                .iter()
                .enumerate()
                .map(|(k, o)| {
                    let lhs = rough_maximal(&f, o, &ladder)?;
                    Ok((Some(k), empirical_constant(&lhs, &i1.scale(o.weak_norm()), theta)?))
                })
                .collect()
        }
        CaseId::MaximalRough => {
            let Shared::Omegas(omegas) = shared else { unreachable!() };
            let i1 = i1_of_gradient(b, grid)?.1;
            let refs: Vec<&SphereFunction> = omegas.iter().collect();
            let lhs = maximal_rough_batch(&f, &refs)?;
            lhs.iter()
                .zip(omegas)
                .enumerate()
                .map(|(k, (l, o))| Ok((Some(k), empirical_constant(l, &i1.scale(o.weak_norm()), theta)?)))
                .collect()
        }
        CaseId::SelfImprovement => {
            need_dim(grid, 2)?;
            if !(p.r >= 1.0 && p.r < conjugate(n)) {
                return Err(Error::InvalidParameter(format!("self-improvement needs 1 <= r < n', got {}", p.r)));
            }
            let t = riesz_transform(&f, 0, RieszMode::Pv, &suite.quad)?;
            one(&cube_maximal(&t, &MaximalGauge::power(p.r)?, &family)?, &i1_of_gradient(b, grid)?.1)
        }
        CaseId::CzGradient => {
            need_dim(grid, 2)?;
            let Shared::Density(w) = shared else { unreachable!() };
            let t = riesz_transform(&f, 0, RieszMode::Pv, &suite.quad)?;
            let grad = b.gradient_magnitude(grid)?;
            let m1 = cube_maximal(&grad, &MaximalGauge::mean().fractional(1.0), &family)?;
            let r = EmpiricalConstantReport::scalar(lp_norm(&t, p.p, Some(w))?, lp_norm(&m1, p.p, Some(w))?)?;
            Ok(vec![(None, r)])
        }
        CaseId::SphereMaximal => {
            let radii = RadiusLadder::for_grid(grid).radii();
            one(&sphere_maximal(&f, &suite.quad, &radii)?, &i1_of_gradient(b, grid)?.1)
        }
        CaseId::Sobolev => {
            let Shared::Density(w) = shared else { unreachable!() };
            let grad = b.gradient_magnitude(grid)?;
            let r = sobolev_ratio(&f, &grad, w, p.p)?;
            let ps = n * p.p / (n - p.p);
            let c = apq_constant(w, p.p, ps, &CubeFamily::for_weights(grid))?.value;
            let scale = c.powf(1.0 / conjugate(n));
            Ok(vec![(None, EmpiricalConstantReport::scalar(r.lhs, scale * r.rhs)?)])
        }
        CaseId::LogEndpoint => {
            let Shared::Endpoint { weight, density, omegas } = shared else { unreachable!() };
            let grad = b.gradient_magnitude(grid)?;
            let rhs = grad.mul(density)?.integral();
            let mut rows = vec![(
                None,
                EmpiricalConstantReport::scalar(
                    weak_type_norm(&cube_maximal(&f, &MaximalGauge::mean(), &family)?, 1.0, Some(weight))?,
                    rhs,
                )?,
            )];
            if !omegas.is_empty() {
                let refs: Vec<&SphereFunction> = omegas.iter().collect();
                for (k, t) in maximal_rough_batch(&f, &refs)?.iter().enumerate() {
                    rows.push((Some(k), EmpiricalConstantReport::scalar(weak_type_norm(t, 1.0, Some(weight))?, rhs)?));
                }
            }
            Ok(rows)
        }
        CaseId::WeakEndpoint => {
            need_dim(grid, 2)?;
            let np = conjugate(n);
            let m = cube_maximal(&f, &MaximalGauge::lorentz(np, 1.0)?, &family)?;
            let grad = b.gradient_magnitude(grid)?;
            let r = EmpiricalConstantReport::scalar(weak_type_norm(&m, np, None)?, grad.integral())?;
            Ok(vec![(None, r)])
        }
        CaseId::PoincareOneOne | CaseId::PoincareClassical | CaseId::PoincareLorentz => {
            let variant = match case.id {
                CaseId::PoincareOneOne => PoincareVariant::OneOne,
                CaseId::PoincareClassical => {
                    need_dim(grid, 2)?;
                    PoincareVariant::Classical { p: 1.0, q: conjugate(n) }
                }
                _ => {
                    need_dim(grid, 2)?;
                    PoincareVariant::Lorentz
                }
            };
            let grad = b.gradient_magnitude(grid)?;
            let balls = random_balls(grid, p.balls, suite.seed.wrapping_add(index as u64), &b.center, b.radius)?;
            let regions: Vec<Region> = balls.into_iter().map(Region::Ball).collect();
            let r = poincare_check(&f, &grad, &regions, variant)?;
            let mut rep = EmpiricalConstantReport::scalar(r.max_ratio, 1.0)?;
            rep.masked_points = r.evaluated;
            rep.argmax = r.worst.map(|k| match regions[k] {
                Region::Ball(b) => b.center,
                Region::Cube(q) => q.center(grid),
            });
            Ok(vec![(None, rep)])
        }
        CaseId::PowerA1 => unreachable!(),
    }
}

fn power_a1_member(case: &InequalityCase, suite: &Suite, grid: &GridSpec) -> Result<EmpiricalConstantReport> {
    let p = &case.params;
    let w = a1_power_weight(&suite.measure, p.alpha, p.r, grid)?;
    let rep = a1_constant(&w, &CubeFamily::for_weights(grid))?;
    let mut out = EmpiricalConstantReport::scalar(rep.value, 1.0)?;
    out.argmax = rep.witness.map(|q| q.center(grid));
    out.masked_points = rep.cube_count;
    Ok(out)
}

/// Runs one case over every member of the suite on `grid`.
pub fn run_case(case: &InequalityCase, suite: &Suite, grid: &GridSpec) -> Result<CaseReport> {
    if suite.dim != grid.dim() {
        return Err(Error::InvalidParameter(format!(
            "suite is {}-dimensional but the grid is {}-dimensional",
            suite.dim,
            grid.dim()
        )));
    }
    let mut warnings = Vec::new();
    let mut members = Vec::new();
    if case.id == CaseId::PowerA1 {
        let start = Instant::now();
        let report = power_a1_member(case, suite, grid)?;
        members.push(MemberReport { field_id: None, omega_id: None, report, runtime_ms: start.elapsed().as_millis() });
    } else {
        if suite.bumps.is_empty() || (case.id.uses_omega() && suite.omegas.is_empty()) {
            return Err(Error::InvalidParameter(format!("case {} needs a nonempty suite", case.id)));
        }
        let shared = shared(case, suite, grid, &mut warnings)?;
        for (i, b) in suite.bumps.iter().enumerate() {
            let start = Instant::now();
            let rows = member(case, suite, &shared, b, i, grid)?;
            let per = start.elapsed().as_millis() / rows.len().max(1) as u128;
            for (omega_id, report) in rows {
                members.push(MemberReport { field_id: Some(i), omega_id, report, runtime_ms: per });
            }
        }
    }
    let best = members
        .iter()
        .max_by(|a, b| a.report.c_emp.total_cmp(&b.report.c_emp))
        .map(|m| m.report.clone())
        .ok_or(Error::EmptyMask)?;
    let constants: Vec<f64> = members.iter().map(|m| m.report.c_emp).collect();
    Ok(CaseReport {
        case_id: case.id,
        n: grid.dim(),
        cells: grid.cells(),
        half_width: grid.half_width(),
        theta: case.theta,
        spread: spread(&constants),
        members,
        aggregate: best,
        warnings,
    })
}

/// `M_gauge f` against `I_1(|∇f|)` for a user-chosen gauge. Exploratory:
/// nothing is asserted about the outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExploreReport {
    pub gauge: MaximalGauge,
    pub label: String,
    pub members: Vec<MemberReport>,
    pub aggregate: EmpiricalConstantReport,
}

pub fn explore_gauge(gauge: &MaximalGauge, suite: &Suite, grid: &GridSpec, theta: f64) -> Result<ExploreReport> {
    gauge.validate(grid.dim())?;
    let family = CubeFamily::standard(grid);
    let mut members = Vec::with_capacity(suite.bumps.len());
    for (i, b) in suite.bumps.iter().enumerate() {
        let start = Instant::now();
        let lhs = cube_maximal(&b.field(grid)?, gauge, &family)?;
        let report = empirical_constant(&lhs, &i1_of_gradient(b, grid)?.1, theta)?;
        members.push(MemberReport { field_id: Some(i), omega_id: None, report, runtime_ms: start.elapsed().as_millis() });
    }
    let aggregate = members
        .iter()
        .max_by(|a, b| a.report.c_emp.total_cmp(&b.report.c_emp))
        .map(|m| m.report.clone())
        .ok_or(Error::EmptyMask)?;
    Ok(ExploreReport { gauge: *gauge, label: gauge.label(), members, aggregate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::suite::OmegaSpec;

    fn small() -> (Suite, GridSpec) {
        (Suite::generate(2, 2, 2, 5, &OmegaSpec::Random).unwrap(), GridSpec::new(2, 32, 4.0).unwrap())
    }

    #[test]
    fn ids_round_trip() {
        for id in CaseId::ALL {
            assert_eq!(id.as_str().parse::<CaseId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(serde_json::from_str::<CaseId>(&json).unwrap(), id);
        }
        assert_eq!("neg".parse::<CaseId>().unwrap(), CaseId::Negative);
        assert!(matches!("nope".parse::<CaseId>(), Err(Error::UnknownCase(_))));
    }

    #[test]
    fn every_case_runs_on_a_small_grid() {
        let (suite, grid) = small();
        for id in CaseId::ALL {
            let mut case = InequalityCase::new(id);
            case.params.balls = 5;
            let r = run_case(&case, &suite, &grid).unwrap_or_else(|e| panic!("{id}: {e}"));
            assert!(r.aggregate.c_emp.is_finite() && r.aggregate.c_emp >= 0.0, "{id}");
            let expected = if id == CaseId::PowerA1 {
                1
            } else if id.uses_omega() {
                4
            } else if id == CaseId::LogEndpoint {
                6
            } else {
                2
            };
            assert_eq!(r.members.len(), expected, "{id}");
        }
    }

    #[test]
    fn maximal_dominates_identity_memberwise() {
        let (suite, grid) = small();
        let id = run_case(&InequalityCase::new(CaseId::Repr), &suite, &grid).unwrap();
        let m = run_case(&InequalityCase::new(CaseId::PointMax), &suite, &grid).unwrap();
        let m2 = run_case(&InequalityCase::new(CaseId::Iterated), &suite, &grid).unwrap();
        for k in 0..2 {
            assert!(m.constants()[k] >= id.constants()[k]);
            assert!(m2.constants()[k] >= m.constants()[k]);
        }
    }

    #[test]
    fn unprojected_kernels_warn() {
        let (suite, grid) = small();
        let mut case = InequalityCase::new(CaseId::MaximalRough);
        case.params.mean_zero = false;
        assert!(!case.is_positive(2));
        let r = run_case(&case, &suite.truncated(1, 1), &grid).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn exploring_the_mean_gauge_matches_the_pointwise_case() {
        let (suite, grid) = small();
        let e = explore_gauge(&MaximalGauge::mean(), &suite, &grid, DEFAULT_THETA).unwrap();
        let m = run_case(&InequalityCase::new(CaseId::PointMax), &suite, &grid).unwrap();
        assert_eq!(e.aggregate.c_emp, m.aggregate.c_emp);
    }

    #[test]
    fn sign_of_the_power_case() {
        let mut case = InequalityCase::new(CaseId::PowerA1);
        assert!(case.is_positive(2));
        case.params.r = 2.5;
        assert!(!case.is_positive(2));
    }

    #[test]
    fn suite_dimension_must_match() {
        let (suite, _) = small();
        let g1 = GridSpec::new(1, 32, 4.0).unwrap();
        assert!(run_case(&InequalityCase::new(CaseId::Repr), &suite, &g1).is_err());
    }
}
