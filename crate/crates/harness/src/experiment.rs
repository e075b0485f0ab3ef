//! Monte-Carlo batches over a scenario: rejection-rate grids and statistic samples.
//!
//! Every replication owns its random streams: the path for attempt `a` of
//! replication `r` at `n` observations comes from cell `(r, a)` of a stream keyed
//! by `n`, and its copies from a stream keyed by `(n, r)`. Results are gathered
//! in replication order, so output does not depend on the worker count.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cojump::testing::Evaluation;
use cojump::{
    simulate_path, Decision, DisjointCutoffKind, DisjointCutoffMethod, JointCutoffMethod, PathClass, RngStream,
    ScenarioConfig,
};
use rayon::prelude::*;

use crate::config::ExperimentSpec;
use crate::error::{HarnessError, Result};

const PATH_STREAM: u64 = 1;
const COPY_STREAM: u64 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Joint,
    Disjoint,
}

/// Outcome of one replication at one sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationRecord {
    pub n_obs: usize,
    pub replication: usize,
    pub attempts: usize,
    /// `None` when screening dropped the replication.
    pub class: Option<PathClass>,
    pub phi_joint: Option<f64>,
    pub phi_disjoint: Option<f64>,
    /// Decisions indexed `[method][level]`.
    pub joint: Vec<Vec<Decision>>,
    pub disjoint: Vec<Vec<Decision>>,
}

impl ReplicationRecord {
    pub fn kept(&self) -> bool {
        self.class.is_some()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub n_draws: usize,
    pub joint_methods: Vec<JointCutoffMethod>,
    pub disjoint_methods: Vec<DisjointCutoffMethod>,
    /// Ordered by sample size (as listed), then replication.
    pub records: Vec<ReplicationRecord>,
}

fn fmt_rate(x: f64) -> String {
    format!("{x:.6}")
}

impl ExperimentResult {
    pub fn records_for(&self, n_obs: usize) -> impl Iterator<Item = &ReplicationRecord> {
        self.records.iter().filter(move |r| r.n_obs == n_obs)
    }

    pub fn kept(&self, n_obs: usize) -> usize {
        self.records_for(n_obs).filter(|r| r.kept()).count()
    }

    /// Rejection count and kept count for a test, method and level.
    pub fn rejections(&self, test: TestKind, method: usize, n_obs: usize, level: usize) -> (usize, usize) {
        let mut hits = 0;
        let mut kept = 0;
        for r in self.records_for(n_obs).filter(|r| r.kept()) {
            kept += 1;
            let d = match test {
                TestKind::Joint => r.joint[method][level],
                TestKind::Disjoint => r.disjoint[method][level],
            };
            hits += (d == Decision::Reject) as usize;
        }
        (hits, kept)
    }

    pub fn rejection_rate(&self, test: TestKind, method: usize, n_obs: usize, level: usize) -> f64 {
        let (hits, kept) = self.rejections(test, method, n_obs, level);
        if kept == 0 {
            0.0
        } else {
            hits as f64 / kept as f64
        }
    }

    pub fn phi_samples(&self, test: TestKind, n_obs: usize) -> Vec<f64> {
        self.records_for(n_obs)
            .filter(|r| r.kept())
            .filter_map(|r| match test {
                TestKind::Joint => r.phi_joint,
                TestKind::Disjoint => r.phi_disjoint,
            })
            .collect()
    }

    fn rejection_table(&self, test: TestKind, method: usize) -> String {
        let mut out = String::from("level");
        for n in &self.spec.n_obs_list {
            write!(out, ",n={n}").unwrap();
        }
        out.push('\n');
        for (li, level) in self.spec.levels.iter().enumerate() {
            write!(out, "{level}").unwrap();
            for &n in &self.spec.n_obs_list {
                write!(out, ",{}", fmt_rate(self.rejection_rate(test, method, n, li))).unwrap();
            }
            out.push('\n');
        }
        out
    }

    fn sample_table(&self, test: TestKind) -> String {
        let name = match test {
            TestKind::Joint => "phi_joint",
            TestKind::Disjoint => "phi_disjoint",
        };
        let mut out = format!("n_obs,replication,{name}\n");
        for r in self.records.iter().filter(|r| r.kept()) {
            let v = match test {
                TestKind::Joint => r.phi_joint,
                TestKind::Disjoint => r.phi_disjoint,
            };
            if let Some(v) = v {
                writeln!(out, "{},{},{v:e}", r.n_obs, r.replication).unwrap();
            }
        }
        out
    }

    fn summary_table(&self) -> String {
        let mut out = String::from("n_obs,replications,kept,dropped,attempts,joint_paths,disjoint_paths,continuous_paths\n");
        for &n in &self.spec.n_obs_list {
            let recs: Vec<_> = self.records_for(n).collect();
            let count = |c: PathClass| recs.iter().filter(|r| r.class == Some(c)).count();
            let kept = recs.iter().filter(|r| r.kept()).count();
            let attempts: usize = recs.iter().map(|r| r.attempts).sum();
            writeln!(
                out,
                "{n},{},{kept},{},{attempts},{},{},{}",
                recs.len(),
                recs.len() - kept,
                count(PathClass::Joint),
                count(PathClass::Disjoint),
                count(PathClass::ContinuousAny)
            )
            .unwrap();
        }
        out
    }

    /// All output tables as `(file name, contents)`.
    pub fn tables(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (i, m) in self.joint_methods.iter().enumerate() {
            out.push((format!("rejection_joint_{}.csv", m.name()), self.rejection_table(TestKind::Joint, i)));
        }
        for (i, m) in self.disjoint_methods.iter().enumerate() {
            out.push((format!("rejection_disjoint_{}.csv", m.name()), self.rejection_table(TestKind::Disjoint, i)));
        }
        out.push(("phi_joint_samples.csv".into(), self.sample_table(TestKind::Joint)));
        out.push(("phi_disjoint_samples.csv".into(), self.sample_table(TestKind::Disjoint)));
        out.push(("summary.csv".into(), self.summary_table()));
        out
    }

    pub fn write_csvs(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        self.tables()
            .into_iter()
            .map(|(name, body)| {
                let path = dir.join(name);
                std::fs::write(&path, body).map_err(|e| HarnessError::io(&path, e))?;
                Ok(path)
            })
            .collect()
    }
}

struct Plan<'a> {
    spec: &'a ExperimentSpec,
    scenario: ScenarioConfig,
    n_draws: usize,
    joint: Vec<JointCutoffMethod>,
    disjoint: Vec<DisjointCutoffMethod>,
    needs_copies: bool,
    root: RngStream,
}

impl Plan<'_> {
    fn replication(&self, n_obs: usize, rep: usize) -> Result<ReplicationRecord> {
        let spec = self.spec;
        let paths = self.root.derive(PATH_STREAM).derive(n_obs as u64);
        let mut record = ReplicationRecord {
            n_obs,
            replication: rep,
            attempts: 0,
            class: None,
            phi_joint: None,
            phi_disjoint: None,
            joint: Vec::new(),
            disjoint: Vec::new(),
        };
        let mut found = None;
        for attempt in 0..spec.max_attempts {
            record.attempts = attempt + 1;
            let (series, truth) = simulate_path(&self.scenario, n_obs, &mut paths.rng(rep as u64, attempt as u64))?;
            if spec.keep_classes.is_empty() || spec.keep_classes.contains(&truth.class) {
                found = Some((series, truth.class));
                break;
            }
        }
        let Some((series, class)) = found else {
            return Ok(record);
        };
        let cfg = spec.test.config(series.delta(), spec.levels[0], self.n_draws)?;
        let copies = self.root.derive(COPY_STREAM).derive(n_obs as u64).derive(rep as u64);
        let eval = Evaluation::new(&series, &cfg, &copies, self.needs_copies)?;
        record.class = Some(class);
        record.phi_joint = eval.phi_joint();
        record.phi_disjoint = eval.phi_disjoint();
        record.joint = self
            .joint
            .iter()
            .map(|&m| spec.levels.iter().map(|&l| eval.joint(m, l).map(|o| o.decision)).collect())
            .collect::<cojump::Result<_>>()?;
        record.disjoint = self
            .disjoint
            .iter()
            .map(|&m| spec.levels.iter().map(|&l| eval.disjoint(m, l).map(|o| o.decision)).collect())
            .collect::<cojump::Result<_>>()?;
        Ok(record)
    }
}

/// Runs every replication at every sample size on `workers` threads (0: rayon default).
pub fn run_experiment(spec: &ExperimentSpec, workers: usize) -> Result<ExperimentResult> {
    spec.validate()?;
    let joint = spec.methods.joint_methods()?;
    let disjoint = spec.methods.disjoint_methods()?;
    let needs_copies =
        joint.contains(&JointCutoffMethod::Simulated) || disjoint.iter().any(|d| d.kind == DisjointCutoffKind::Simulated);
    let plan = Plan {
        spec,
        scenario: spec.scenario.resolve()?,
        n_draws: spec.n_draws(),
        joint: joint.clone(),
        disjoint: disjoint.clone(),
        needs_copies,
        root: RngStream::new(spec.seed),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("worker pool: {e}")))?;
    let cells: Vec<(usize, usize)> =
        spec.n_obs_list.iter().flat_map(|&n| (0..spec.replications).map(move |r| (n, r))).collect();
    let records = pool.install(|| {
        cells.par_iter().map(|&(n, r)| plan.replication(n, r)).collect::<Result<Vec<_>>>()
    })?;
    Ok(ExperimentResult {
        spec: spec.clone(),
        n_draws: plan.n_draws,
        joint_methods: joint,
        disjoint_methods: disjoint,
        records,
    })
}
