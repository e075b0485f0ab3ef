//! Per-day workflow on observed data: univariate jump screening, bipower-scaled
//! truncation, both tests and the day category.

use cojump::estimators::WindowSpec;
use cojump::resampling::default_draws;
use cojump::testing::{bipower_truncation, univariate_jump_prefilter, JumpScreen};
use cojump::{CojumpError, DisjointCutoffMethod, IncrementSeries, JointCutoffMethod, RngStream, StatReport, TestConfig};
use rayon::prelude::*;

use crate::config::MAX_DEFAULT_DRAWS;
use crate::error::Result;
use crate::ingest::DayData;

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeSettings {
    pub k: usize,
    /// Truncation is `trunc_mult · √(BV_j) · Δ^varpi` per component.
    pub trunc_mult: f64,
    pub varpi: f64,
    pub kn: Option<usize>,
    pub level: f64,
    pub n_draws: Option<usize>,
    pub joint: JointCutoffMethod,
    pub disjoint: DisjointCutoffMethod,
    /// Level of the univariate screen; `None` analyzes every day.
    pub prefilter_level: Option<f64>,
    pub seed: u64,
}

impl Default for AnalyzeSettings {
    fn default() -> Self {
        Self {
            k: 2,
            trunc_mult: 3.0,
            varpi: 0.49,
            kn: None,
            level: 0.01,
            n_draws: None,
            joint: JointCutoffMethod::Simulated,
            disjoint: DisjointCutoffMethod::parse("simulated-truncated").expect("known method"),
            prefilter_level: Some(0.01),
            seed: 0,
        }
    }
}

impl AnalyzeSettings {
    pub fn draws(&self) -> usize {
        self.n_draws.unwrap_or_else(|| default_draws(self.level).min(MAX_DEFAULT_DRAWS))
    }

    pub fn config(&self, series: &IncrementSeries<f64>) -> cojump::Result<TestConfig<f64>> {
        let window = match self.kn {
            Some(k_n) => WindowSpec::new(k_n)?,
            None => WindowSpec::default_for(series.delta()),
        };
        let cfg = TestConfig {
            k: self.k,
            level: self.level,
            trunc: bipower_truncation(series, self.trunc_mult, self.varpi)?,
            window,
            n_draws: self.draws(),
            power_guard: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    /// The screen finds no jump in at least one component.
    Continuous,
    /// A statistic or standardizer is undefined.
    Inapplicable,
    /// Too few observations or no variation.
    Data,
}

impl SkipReason {
    pub fn name(self) -> &'static str {
        match self {
            SkipReason::Continuous => "CONTINUOUS",
            SkipReason::Inapplicable => "INAPPLICABLE",
            SkipReason::Data => "DATA",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DayOutcome {
    Skipped { reason: SkipReason, detail: String },
    Reported(StatReport<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DayResult {
    pub label: String,
    pub outcome: DayOutcome,
}

fn skipped(reason: SkipReason, detail: impl Into<String>) -> DayOutcome {
    DayOutcome::Skipped { reason, detail: detail.into() }
}

fn data_problem(e: &CojumpError) -> bool {
    matches!(e, CojumpError::InsufficientData { .. } | CojumpError::DenominatorZero(_))
}

pub fn analyze_day(series: &IncrementSeries<f64>, settings: &AnalyzeSettings, stream: &RngStream) -> Result<DayOutcome> {
    if let Some(level) = settings.prefilter_level {
        for component in [1, 2] {
            match univariate_jump_prefilter(series, component, level) {
                Ok(JumpScreen::Jump) => {}
                Ok(JumpScreen::NoJump) => {
                    return Ok(skipped(SkipReason::Continuous, format!("no jump detected in component {component}")))
                }
                Err(e) if data_problem(&e) => return Ok(skipped(SkipReason::Data, e.to_string())),
                Err(e) => return Err(e.into()),
            }
        }
    }
    let cfg = match settings.config(series) {
        Ok(c) => c,
        Err(e) if data_problem(&e) => return Ok(skipped(SkipReason::Data, e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let report = cojump::run_tests(series, &cfg, settings.joint, settings.disjoint, stream)?;
    if report.category.is_none() {
        return Ok(skipped(SkipReason::Inapplicable, "a test is inapplicable on this day"));
    }
    Ok(DayOutcome::Reported(report))
}

/// Analyzes every day; day `i` draws its copies from stream cell `i` of the seed.
pub fn analyze_days(days: &[DayData], settings: &AnalyzeSettings) -> Result<Vec<DayResult>> {
    let root = RngStream::new(settings.seed);
    days.par_iter()
        .enumerate()
        .map(|(i, d)| {
            Ok(DayResult { label: d.label.clone(), outcome: analyze_day(&d.series, settings, &root.derive(i as u64))? })
        })
        .collect()
}
