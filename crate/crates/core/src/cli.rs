//! Configuration-driven experiments writing CSV and JSON reports.
//!
//! Exit codes: 0 when every assertion holds, 1 when one fails, 2 for usage
//! or configuration errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::GridSpec;
use crate::geometry::CubeFamily;
use crate::harness::cases::{
    explore_gauge, run_case, CaseId, CaseParams, CaseReport, ExploreReport, InequalityCase, MemberReport,
};
use crate::harness::probe::{divergence_probe, refinement_study, ProbeAxis};
use crate::harness::suite::{OmegaSpec, Suite};
use crate::harness::{drift, DEFAULT_THETA, STABILITY_TOLERANCE};
use crate::maximal::MaximalGauge;
use crate::numeric::log_log_slope;
use crate::weights::{a1_constant, a1n_constant, ainf_constant, ap_constant, apq_constant, WeightConstantReport, WeightSpec};

/// Growth exponent above which a case counts as divergent, and below which
/// (in absolute value) it counts as bounded.
pub const GROWTH_THRESHOLD: f64 = 0.1;

#[derive(Debug, Parser)]
#[command(name = "gradbound", version, about = "Empirical constants for gradient-controlled inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run each case at N and N/2 and check that positive cases are stable.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Weight constants for each weight in the config.
    Constants {
        #[arg(long)]
        config: PathBuf,
    },
    /// Domain or refinement sweeps with fitted growth exponents.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Merge the JSON reports in a directory into one CSV.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Radii or resolutions for `sweep`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    /// Half-widths at the spacing of the base grid; four or more, geometric.
    pub radii: Vec<f64>,
    /// Resolutions on the base box; two or more.
    pub cells: Vec<usize>,
}

/// One JSON document describing a run. Every field has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub half_width: f64,
    pub cells: usize,
    pub seed: u64,
    pub cases: Vec<CaseId>,
    pub bumps: usize,
    pub omegas: usize,
    pub omega: OmegaSpec,
    pub params: CaseParams,
    pub theta: f64,
    pub weights: Vec<WeightSpec>,
    /// Extra gauges compared against `I_1(|∇f|)` without a verdict.
    pub explore: Vec<MaximalGauge>,
    pub sweep: SweepSpec,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dimension: 2,
            half_width: 4.0,
            cells: 128,
            seed: 1,
            cases: vec![CaseId::Repr],
            bumps: 20,
            omegas: 10,
            omega: OmegaSpec::Random,
            params: CaseParams::default(),
            theta: DEFAULT_THETA,
            weights: Vec::new(),
            explore: Vec::new(),
            sweep: SweepSpec::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let config: Self = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dimension) {
            return Err(Error::Config(format!("dimension {} must be 1, 2 or 3", self.dimension)));
        }
        if self.cells == 0 || !self.cells.is_multiple_of(2) {
            return Err(Error::Config(format!("cells = {} must be even and positive", self.cells)));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::Config(format!("half_width = {} must be positive", self.half_width)));
        }
        if !(0.0..1.0).contains(&self.theta) {
            return Err(Error::Config(format!("theta = {} must lie in [0, 1)", self.theta)));
        }
        if self.bumps == 0 {
            return Err(Error::Config("bumps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.dimension, self.cells, self.half_width)
    }

    pub fn suite(&self) -> Result<Suite> {
        Suite::generate(self.dimension, self.bumps, self.omegas, self.seed, &self.omega)
    }

    fn case(&self, id: CaseId) -> InequalityCase {
        InequalityCase { id, params: self.params.clone(), theta: self.theta }
    }
}

/// Whether a command's assertions held.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

pub fn exit_code(result: &Result<Outcome>) -> u8 {
    match result {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail) => 1,
        Err(_) => 2,
    }
}

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Verify { config } => cmd_verify(&ExperimentConfig::load(config)?),
        Command::Constants { config } => cmd_constants(&ExperimentConfig::load(config)?),
        Command::Sweep { config } => cmd_sweep(&ExperimentConfig::load(config)?),
        Command::Report { input, out } => cmd_report(input, out),
    }
}

fn timestamp() -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    secs.to_string()
}

/// One line of the fixed CSV schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub case_id: String,
    pub field_id: Option<usize>,
    pub omega_id: Option<usize>,
    pub n: usize,
    #[serde(rename = "N")]
    pub cells: usize,
    #[serde(rename = "R")]
    pub half_width: f64,
    pub theta: f64,
    pub c_emp: f64,
    pub argmax_x1: Option<f64>,
    pub argmax_x2: Option<f64>,
    pub argmax_x3: Option<f64>,
    pub masked_points: usize,
    pub runtime_ms: Option<u128>,
}

fn rows_for(
    case_id: &str,
    n: usize,
    cells: usize,
    half_width: f64,
    theta: f64,
    members: &[MemberReport],
    with_runtime: bool,
) -> Vec<CsvRow> {
    members
        .iter()
        .map(|m| {
            let coord = |ax: usize| m.report.argmax.filter(|_| ax < n).map(|x| x[ax]);
            CsvRow {
                case_id: case_id.to_string(),
                field_id: m.field_id,
                omega_id: m.omega_id,
                n,
                cells,
                half_width,
                theta,
                c_emp: m.report.c_emp,
                argmax_x1: coord(0),
                argmax_x2: coord(1),
                argmax_x3: coord(2),
                masked_points: m.report.masked_points,
                runtime_ms: with_runtime.then_some(m.runtime_ms),
            }
        })
        .collect()
}

fn case_rows(r: &CaseReport, with_runtime: bool) -> Vec<CsvRow> {
    rows_for(r.case_id.as_str(), r.n, r.cells, r.half_width, r.theta, &r.members, with_runtime)
}

fn explore_rows(e: &ExploreReport, grid: &GridSpec, theta: f64, with_runtime: bool) -> Vec<CsvRow> {
    rows_for(&format!("explore:{}", e.label), grid.dim(), grid.cells(), grid.half_width(), theta, &e.members, with_runtime)
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn output_dir(config: &ExperimentConfig) -> Result<&Path> {
    fs::create_dir_all(&config.output_dir)?;
    Ok(&config.output_dir)
}

/// Aggregate constants at `N/2` and `N` for a positive case.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityCheck {
    pub case_id: CaseId,
    pub coarse: f64,
    pub fine: f64,
    pub drift: f64,
    pub stable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub generated_at: String,
    pub config: ExperimentConfig,
    pub cases: Vec<CaseReport>,
    pub stability: Vec<StabilityCheck>,
    pub explore: Vec<ExploreReport>,
    pub passed: bool,
}

pub fn cmd_verify(config: &ExperimentConfig) -> Result<Outcome> {
    let grid = config.grid()?;
    let suite = config.suite()?;
    let coarse_grid = config
        .cells
        .is_multiple_of(4)
        .then(|| GridSpec::new(config.dimension, config.cells / 2, config.half_width))
        .transpose()?;
    let results = config
        .cases
        .par_iter()
        .map(|&id| {
            let case = config.case(id);
            let fine = run_case(&case, &suite, &grid)?;
            let check = match (&coarse_grid, case.is_positive(grid.dim())) {
                (Some(g), true) => {
                    let coarse = run_case(&case, &suite, g)?.aggregate.c_emp;
                    let d = drift(&[coarse, fine.aggregate.c_emp]);
                    Some(StabilityCheck {
                        case_id: id,
                        coarse,
                        fine: fine.aggregate.c_emp,
                        drift: d,
                        stable: d <= STABILITY_TOLERANCE,
                    })
                }
                (None, true) => {
                    warn!("{id}: N = {} is not divisible by 4, stability not checked", config.cells);
                    None
                }
                _ => None,
            };
            Ok((fine, check))
        })
        .collect::<Result<Vec<_>>>()?;
    let explore = config.explore.iter().map(|g| explore_gauge(g, &suite, &grid, config.theta)).collect::<Result<Vec<_>>>()?;
    let (cases, checks): (Vec<CaseReport>, Vec<Option<StabilityCheck>>) = results.into_iter().unzip();
    let stability: Vec<StabilityCheck> = checks.into_iter().flatten().collect();
    let passed = stability.iter().all(|s| s.stable);
    for r in &cases {
        info!("{}: c_emp = {:.6e} over {} members", r.case_id, r.aggregate.c_emp, r.members.len());
    }
    for s in &stability {
        println!(
            "{:<20} c_emp(N/2) = {:<12.6e} c_emp(N) = {:<12.6e} drift = {:.3} {}",
            s.case_id.as_str(),
            s.coarse,
            s.fine,
            s.drift,
            if s.stable { "stable" } else { "UNSTABLE" }
        );
    }
    let mut rows: Vec<CsvRow> = cases.iter().flat_map(|r| case_rows(r, true)).collect();
    rows.extend(explore.iter().flat_map(|e| explore_rows(e, &grid, config.theta, true)));
    let dir = output_dir(config)?;
    write_csv(&dir.join("verify.csv"), &rows)?;
    write_json(
        &dir.join("verify.json"),
        &VerifyReport { generated_at: timestamp(), config: config.clone(), cases, stability, explore, passed },
    )?;
    Ok(Outcome::from_bool(passed))
}

/// One constant of one weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantRow {
    pub weight: usize,
    pub constant: String,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub value: f64,
    pub divergent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub generated_at: String,
    pub config: ExperimentConfig,
    pub weights: Vec<Vec<(String, WeightConstantReport)>>,
}

pub fn cmd_constants(config: &ExperimentConfig) -> Result<Outcome> {
    if config.weights.is_empty() {
        return Err(Error::Config("constants needs at least one weight".into()));
    }
    let grid = config.grid()?;
    let family = CubeFamily::for_weights(&grid);
    let n = grid.dim() as f64;
    let p = config.params.p;
    let mut rows = Vec::new();
    let mut all = Vec::new();
    for (i, spec) in config.weights.iter().enumerate() {
        let w = spec.build(&grid)?;
        let mut named = vec![
            ("A1".to_string(), None, None, a1_constant(&w, &family)?),
            ("Ap".to_string(), Some(p), None, ap_constant(&w, p, &family)?),
        ];
        if p < n {
            let ps = n * p / (n - p);
            named.push(("Apq".to_string(), Some(p), Some(ps), apq_constant(&w, p, ps, &family)?));
        }
        named.push(("Ainf".to_string(), None, None, ainf_constant(&w, &family)?));
        named.push(("A1n".to_string(), None, None, a1n_constant(&w, &family)?));
        for (name, p, q, r) in &named {
            println!("weight {i} {name:<5} {:.6e}{}", r.value, if r.divergent { " (divergent)" } else { "" });
            rows.push(ConstantRow { weight: i, constant: name.clone(), p: *p, q: *q, value: r.value, divergent: r.divergent });
        }
        all.push(named.into_iter().map(|(name, _, _, r)| (name, r)).collect());
    }
    let dir = output_dir(config)?;
    write_csv(&dir.join("constants.csv"), &rows)?;
    write_json(
        &dir.join("constants.json"),
        &ConstantsReport { generated_at: timestamp(), config: config.clone(), weights: all },
    )?;
    Ok(Outcome::Pass)
}

/// One point of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub case_id: String,
    pub axis: String,
    /// `R` for domain sweeps, `N` for refinement sweeps.
    pub x: f64,
    pub c_emp: f64,
}

/// Fitted behaviour of one case along one axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub case_id: String,
    pub axis: String,
    pub points: usize,
    pub positive: bool,
    /// Slope of `log c_emp` against `log R` or `log(1/h)`; needs four points.
    pub exponent: Option<f64>,
    /// Largest relative change between neighbouring points.
    pub drift: f64,
    /// `drift ≤ 0.2`.
    pub stable: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub generated_at: String,
    pub config: ExperimentConfig,
    pub series: Vec<SeriesRow>,
    pub summary: Vec<SweepSummary>,
}

fn verdict(positive: bool, exponent: Option<f64>, stable: bool, refinement: bool) -> bool {
    match (positive, exponent) {
        (false, Some(e)) => e > GROWTH_THRESHOLD,
        (false, None) => true,
        (true, Some(e)) if !refinement => e.abs() <= GROWTH_THRESHOLD,
        (true, _) => stable,
    }
}

pub fn cmd_sweep(config: &ExperimentConfig) -> Result<Outcome> {
    let spec = &config.sweep;
    if !spec.radii.is_empty() && spec.radii.len() < 4 {
        return Err(Error::Config(format!("a domain sweep needs at least 4 radii, got {}", spec.radii.len())));
    }
    if !spec.cells.is_empty() && spec.cells.len() < 2 {
        return Err(Error::Config("a refinement sweep needs at least 2 resolutions".into()));
    }
    if spec.radii.is_empty() && spec.cells.is_empty() {
        return Err(Error::Config("sweep needs radii or cells".into()));
    }
    let grid = config.grid()?;
    let suite = config.suite()?;
    let dim = grid.dim();
    let mut series = Vec::new();
    let mut summary = Vec::new();
    for &id in &config.cases {
        let case = config.case(id);
        let positive = case.is_positive(dim);
        if !spec.radii.is_empty() {
            let axis = ProbeAxis::Domain { radii: spec.radii.clone(), spacing: grid.spacing() };
            let probe = divergence_probe(&case, &suite, &axis).map_err(|e| Error::DegenerateSeries(format!("{id}: {e}")))?;
            let cs: Vec<f64> = probe.series.iter().map(|s| s.1).collect();
            let d = drift(&cs);
            let stable = d <= STABILITY_TOLERANCE;
            for (x, c) in &probe.series {
                series.push(SeriesRow { case_id: id.to_string(), axis: "domain".into(), x: *x, c_emp: *c });
            }
            summary.push(SweepSummary {
                case_id: id.to_string(),
                axis: "domain".into(),
                points: cs.len(),
                positive,
                exponent: Some(probe.exponent),
                drift: d,
                stable,
                pass: verdict(positive, Some(probe.exponent), stable, false),
            });
        }
        if !spec.cells.is_empty() {
            let study = refinement_study(&case, &suite, config.half_width, &spec.cells)?;
            let exponent = (spec.cells.len() >= 4).then(|| {
                let xs: Vec<f64> = study.series.iter().map(|s| 1.0 / s.0).collect();
                let ys: Vec<f64> = study.series.iter().map(|s| s.1).collect();
                log_log_slope(&xs, &ys)
            });
            for (c, (_, v)) in spec.cells.iter().zip(&study.series) {
                series.push(SeriesRow { case_id: id.to_string(), axis: "refinement".into(), x: *c as f64, c_emp: *v });
            }
            summary.push(SweepSummary {
                case_id: id.to_string(),
                axis: "refinement".into(),
                points: study.series.len(),
                positive,
                exponent,
                drift: study.drift,
                stable: study.stable,
                pass: verdict(positive, exponent, study.stable, true),
            });
        }
    }
    for s in &summary {
        println!(
            "{:<20} {:<10} exponent = {:<10} drift = {:.3} {}",
            s.case_id,
            s.axis,
            s.exponent.map_or("-".to_string(), |e| format!("{e:.3}")),
            s.drift,
            if s.pass { "pass" } else { "FAIL" }
        );
    }
    let passed = summary.iter().all(|s| s.pass);
    let dir = output_dir(config)?;
    write_csv(&dir.join("sweep_series.csv"), &series)?;
    write_csv(&dir.join("sweep.csv"), &summary)?;
    write_json(&dir.join("sweep.json"), &SweepReport { generated_at: timestamp(), config: config.clone(), series, summary })?;
    Ok(Outcome::from_bool(passed))
}

/// The parts of a verify report that `report` reads.
#[derive(Deserialize)]
struct MergeInput {
    cases: Vec<CaseReport>,
    #[serde(default)]
    explore: Vec<ExploreReport>,
    config: ExperimentConfig,
}

/// Rows of every verify report in `input`, in file-name order. Other JSON
/// documents are skipped.
pub fn cmd_report(input: &Path, out: &Path) -> Result<Outcome> {
    let mut paths: Vec<PathBuf> = fs::read_dir(input)
        .map_err(|e| Error::Config(format!("{}: {e}", input.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut rows = Vec::new();
    let mut merged = 0;
    for p in &paths {
        let text = fs::read_to_string(p)?;
        match serde_json::from_str::<MergeInput>(&text) {
            Ok(doc) => {
                merged += 1;
                rows.extend(doc.cases.iter().flat_map(|r| case_rows(r, false)));
                let grid = doc.config.grid()?;
                rows.extend(doc.explore.iter().flat_map(|e| explore_rows(e, &grid, doc.config.theta, false)));
            }
            Err(e) => warn!("skipping {}: {e}", p.display()),
        }
    }
    if merged == 0 {
        return Err(Error::Config(format!("no verify reports in {}", input.display())));
    }
    write_csv(out, &rows)?;
    info!("merged {merged} reports into {} rows", rows.len());
    Ok(Outcome::Pass)
}
