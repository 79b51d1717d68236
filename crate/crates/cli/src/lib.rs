//! Input ingestion, command dispatch and exact export for `wittsum`.
//!
//! Exit codes: `0` success, `2` invalid input, `3` arithmetic inconsistency,
//! `4` budget exceeded.

pub mod input;
pub mod report;

use thiserror::Error;

use wittsum::artin_hasse::EstimateError;
use wittsum::cohomology::CohomologyError;
use wittsum::engine::{EngineConfig, EngineError};
use wittsum::lfunction::LFunctionError;
use wittsum::sum::{ExponentialSum, SumError};

pub use input::{parse_input, InputDoc};
pub use report::RunReport;
use report::Pipeline;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {from}")]
    Io { path: String, from: std::io::Error },
    #[error("schema: {0}")]
    Schema(serde_json::Error),
    #[error("input: {0}")]
    Input(String),
    #[error(transparent)]
    Sum(#[from] SumError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    LFunction(#[from] LFunctionError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("inconsistent: {0}")]
    Inconsistent(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } | Self::Schema(_) | Self::Input(_) | Self::Sum(_) => 2,
            Self::Engine(e) | Self::LFunction(LFunctionError::Engine(e)) => match e {
                EngineError::BudgetExceeded { .. } => 4,
                EngineError::Sum(_) | EngineError::ZeroExtension => 2,
                _ => 3,
            },
            Self::Estimate(EstimateError::TooManyCompositions(_)) => 4,
            Self::LFunction(_) | Self::Estimate(_) | Self::Cohomology(_) | Self::Inconsistent(_) => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Degree,
    Sums { max_k: u32 },
    Lfun { buffer: Option<u32> },
    Newton,
    Hodge,
    Compare,
    Cohom,
    AhBattery,
    Report,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Validate => "validate",
            Self::Degree => "degree",
            Self::Sums { .. } => "sums",
            Self::Lfun { .. } => "lfun",
            Self::Newton => "newton",
            Self::Hodge => "hodge",
            Self::Compare => "compare",
            Self::Cohom => "cohom",
            Self::AhBattery => "ah-battery",
            Self::Report => "report",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub threads: Option<usize>,
    pub budget_points: Option<u64>,
    pub timing: bool,
}

/// Execute `command`; a report with failed checks is still returned.
pub fn run(command: Command, doc: &InputDoc, sum: &ExponentialSum, opts: &RunOptions) -> Result<RunReport, CliError> {
    let cfg = EngineConfig {
        budget_points: opts.budget_points.unwrap_or(doc.options.budget_points),
        threads: opts.threads,
        ..EngineConfig::default()
    };
    let buffer = match command {
        Command::Lfun { buffer: Some(b) } => b,
        _ => doc.options.buffer,
    };
    let mut pipe = Pipeline::new(sum, cfg, buffer, opts.timing);
    let mut report = RunReport { command: command.name().into(), echo: Some(doc.clone()), ..RunReport::default() };
    let full = command == Command::Report;
    if command != Command::Validate && !matches!(command, Command::Sums { .. } | Command::AhBattery) {
        report.degree = Some(pipe.degree());
    }
    if let Command::Sums { max_k } = command {
        report.sums = Some(pipe.sums(max_k)?);
    }
    if full || matches!(command, Command::Lfun { .. } | Command::Newton | Command::Compare) {
        let lfun = pipe.lfun()?;
        report.checks.insert("identity".into(), lfun.identity.passed);
        if !sum.is_trivial() {
            report.checks.insert("degree".into(), lfun.verified);
        }
        let needed = (sum.degree_formula() + buffer as u64) as u32;
        report.sums = Some(pipe.sums(needed)?);
        report.lfun = Some(lfun);
    }
    if full || matches!(command, Command::Newton | Command::Compare) {
        report.newton = Some((&pipe.newton_polygon()?).into());
    }
    if full || matches!(command, Command::Hodge | Command::Compare) {
        report.hodge = Some(pipe.hodge().0);
    }
    if (full || command == Command::Compare) && !sum.is_trivial() {
        let (comparison, coincidence) = pipe.comparison()?;
        report.checks.insert("newton_above_hodge".into(), comparison.newton_above_hodge.above);
        report.checks.insert("hodge_above_truncated".into(), comparison.hodge_above_truncated.above);
        report.checks.insert("newton_origin".into(), comparison.newton_starts_at_origin);
        report.comparison = Some(comparison);
        report.coincidence = Some(coincidence);
    }
    if full || command == Command::Cohom {
        let cohom = pipe.cohomology()?;
        report.checks.insert("h0_dimension".into(), cohom.h0_dimension == cohom.degree_formula);
        if let (Some(image), Some(with_basis)) = (cohom.image_rank, cohom.with_basis_rank) {
            report.checks.insert("basis_independent".into(), with_basis - image == cohom.basis.len());
        }
        report.cohomology = Some(cohom);
    }
    if full || command == Command::AhBattery {
        let ah = pipe.artin_hasse()?;
        report.checks.insert("artin_hasse".into(), ah.passed);
        report.artin_hasse = Some(ah);
    }
    report.meta = pipe.meta();
    Ok(report)
}

/// Polygon and histogram CSV exports keyed by file name.
pub fn csv_exports(report: &RunReport) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let polygon_csv = |poly: &report::PolygonDoc| {
        let mut s = String::from("x,num,den\n");
        for v in &poly.vertices {
            let (num, den) = v.y.split_once('/').expect("num/den");
            s.push_str(&format!("{},{num},{den}\n", v.x));
        }
        s
    };
    if let Some(np) = &report.newton {
        out.push(("newton.csv".into(), polygon_csv(np)));
    }
    if let Some(h) = &report.hodge {
        out.push(("hodge.csv".into(), polygon_csv(&h.comparison)));
        out.push(("hodge_truncated.csv".into(), polygon_csv(&h.truncated)));
    }
    for s in report.sums.iter().flatten() {
        let mut csv = String::from("residue,count\n");
        for (residue, count) in s.histogram.iter().enumerate() {
            csv.push_str(&format!("{residue},{count}\n"));
        }
        out.push((format!("histogram_k{}.csv", s.k), csv));
    }
    out
}
