//! Critical regions, decisions and p-values for both null hypotheses.
//!
//! The joint-jump test rejects "common jumps" when `|Φ⁽ʲ⁾ − 1| ≥ c⁽ʲ⁾`; the
//! disjoint-jump test rejects "no common jumps" when `Φ⁽ᵈ⁾ ≥ c⁽ᵈ⁾`. Simulated
//! cutoffs compare the rescaled statistic with the order statistic of the
//! copy set directly, so decisions and p-values computed from one copy set
//! agree exactly.

mod prefilter;

pub use prefilter::{bipower_truncation, bipower_variation, log_ratio_statistic, univariate_jump_prefilter, JumpScreen};

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

use crate::error::{CojumpError, Result};
use crate::estimators::{EstimatorInputs, StandardizerReport, TruncationSpec, WindowSpec};
use crate::num::Scalar;
use crate::resampling::{check_draws, CopySet, ResamplingPlan};
use crate::rng::RngStream;
use crate::series::IncrementSeries;
use crate::stats::{phi_disjoint, phi_joint};

/// Cap on the power-guarded standardizer: `V̂⁽ʲ⁾ ∧ α′Δ^ϖ′`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerGuard<T> {
    pub alpha_prime: T,
    pub varpi_prime: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig<T> {
    /// Coarsening factor of `Φ⁽ʲ⁾`, at least 2.
    pub k: usize,
    /// Significance level.
    pub level: f64,
    pub trunc: TruncationSpec<T>,
    pub window: WindowSpec,
    /// Number of resampled copies `N_n`.
    pub n_draws: usize,
    pub power_guard: Option<PowerGuard<T>>,
}

impl<T: Scalar> TestConfig<T> {
    /// Simulation-mode defaults for a series with step `delta`: k = 2,
    /// `0.03 Δ^0.49` truncation, `k_n = round(Δ^{-1/2})`, `N = ⌈1000/α⌉`.
    pub fn simulation_defaults(delta: T, level: f64) -> Self {
        Self {
            k: 2,
            level,
            trunc: TruncationSpec::simulation_default(),
            window: WindowSpec::default_for(delta),
            n_draws: crate::resampling::default_draws(level),
            power_guard: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(CojumpError::InvalidParameter(format!("k must be >= 2, got {}", self.k)));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(CojumpError::InvalidParameter(format!("level must lie in (0,1), got {}", self.level)));
        }
        self.trunc.validated()?;
        WindowSpec::new(self.window.k_n)?;
        if let Some(g) = self.power_guard {
            if !(g.alpha_prime > T::zero() && g.varpi_prime > T::zero() && g.varpi_prime < T::lit(0.5)) {
                return Err(CojumpError::InvalidParameter("power guard needs alpha' > 0 and varpi' in (0,1/2)".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JointCutoffMethod {
    /// `z_α V̂⁽ʲ⁾`; exact level only if X and σ never jump together.
    NormalQuantile,
    /// `V̂⁽ʲ⁾ / √α`.
    Chebyshev,
    /// Absolute quantile of the `Ĝ` copies.
    Simulated,
    NormalTruncated,
    ChebyshevTruncated,
}

impl JointCutoffMethod {
    pub const ALL: [JointCutoffMethod; 5] = [
        JointCutoffMethod::NormalQuantile,
        JointCutoffMethod::Chebyshev,
        JointCutoffMethod::Simulated,
        JointCutoffMethod::NormalTruncated,
        JointCutoffMethod::ChebyshevTruncated,
    ];

    pub fn name(self) -> &'static str {
        match self {
            JointCutoffMethod::NormalQuantile => "normal",
            JointCutoffMethod::Chebyshev => "chebyshev",
            JointCutoffMethod::Simulated => "simulated",
            JointCutoffMethod::NormalTruncated => "normal-truncated",
            JointCutoffMethod::ChebyshevTruncated => "chebyshev-truncated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }

    /// Normal cutoffs when the caller asserts X and σ have no common jumps, otherwise simulated.
    pub fn recommended(no_common_jumps_with_volatility: bool) -> Self {
        if no_common_jumps_with_volatility {
            JointCutoffMethod::NormalQuantile
        } else {
            JointCutoffMethod::Simulated
        }
    }

    fn is_guarded(self) -> bool {
        matches!(self, JointCutoffMethod::NormalTruncated | JointCutoffMethod::ChebyshevTruncated)
    }
}

/// Which estimate of `C_T` enters the disjoint cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CEstimator {
    Multipower,
    Truncated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DisjointCutoffKind {
    /// `V̂ / α`.
    Markov,
    /// `(Z⁽ᵈ⁾(α) + Â) Δ / √(V(g₁)V(g₂))`.
    Simulated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DisjointCutoffMethod {
    pub kind: DisjointCutoffKind,
    pub estimator: CEstimator,
}

impl DisjointCutoffMethod {
    pub const ALL: [DisjointCutoffMethod; 4] = [
        DisjointCutoffMethod { kind: DisjointCutoffKind::Simulated, estimator: CEstimator::Multipower },
        DisjointCutoffMethod { kind: DisjointCutoffKind::Simulated, estimator: CEstimator::Truncated },
        DisjointCutoffMethod { kind: DisjointCutoffKind::Markov, estimator: CEstimator::Multipower },
        DisjointCutoffMethod { kind: DisjointCutoffKind::Markov, estimator: CEstimator::Truncated },
    ];

    pub fn simulated() -> Self {
        Self::ALL[0]
    }

    pub fn markov() -> Self {
        Self::ALL[2]
    }

    pub fn name(self) -> &'static str {
        match (self.kind, self.estimator) {
            (DisjointCutoffKind::Simulated, CEstimator::Multipower) => "simulated",
            (DisjointCutoffKind::Simulated, CEstimator::Truncated) => "simulated-truncated",
            (DisjointCutoffKind::Markov, CEstimator::Multipower) => "markov",
            (DisjointCutoffKind::Markov, CEstimator::Truncated) => "markov-truncated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Reject,
    Retain,
    /// The statistic or its standardizer is undefined, or the input is fully degenerate.
    Inapplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome<T> {
    pub decision: Decision,
    /// Cutoff on the scale of the raw statistic.
    pub cutoff: Option<T>,
    pub p_value: Option<f64>,
}

impl<T> TestOutcome<T> {
    pub fn inapplicable() -> Self {
        Self { decision: Decision::Inapplicable, cutoff: None, p_value: None }
    }
}

/// Day taxonomy from the two decisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Category {
    /// Disjoint null rejected, joint null retained: common jumps.
    CommonJumps = 1,
    /// Joint null rejected, disjoint null retained: disjoint jumps.
    DisjointJumps = 2,
    /// Neither null rejected.
    NeitherRejected = 3,
    /// Both nulls rejected.
    BothRejected = 4,
}

impl Category {
    pub fn from_decisions(disjoint: Decision, joint: Decision) -> Option<Self> {
        use Decision::*;
        match (disjoint, joint) {
            (Reject, Retain) => Some(Category::CommonJumps),
            (Retain, Reject) => Some(Category::DisjointJumps),
            (Retain, Retain) => Some(Category::NeitherRejected),
            (Reject, Reject) => Some(Category::BothRejected),
            _ => None,
        }
    }

    /// Category from two p-values: a null is rejected when `p < level`.
    pub fn from_p_values(p_disjoint: f64, p_joint: f64, level: f64) -> Self {
        let d = if p_disjoint < level { Decision::Reject } else { Decision::Retain };
        let j = if p_joint < level { Decision::Reject } else { Decision::Retain };
        Self::from_decisions(d, j).expect("both decisions applicable")
    }

    pub fn number(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatReport<T> {
    pub phi_joint: Option<T>,
    pub phi_disjoint: Option<T>,
    pub standardizers: Option<StandardizerReport<T>>,
    pub joint: TestOutcome<T>,
    pub disjoint: TestOutcome<T>,
    pub category: Option<Category>,
}

/// Two-sided standard normal quantile: `P(|N(0,1)| ≥ z_α) = α`.
pub fn normal_abs_quantile(level: f64) -> f64 {
    Normal::standard().inverse_cdf(1.0 - level / 2.0)
}

/// `P(|N(0,1)| > t)`.
pub fn normal_two_sided_p(t: f64) -> f64 {
    erfc(t.abs() / std::f64::consts::SQRT_2)
}

/// Statistics, estimators and (optionally) one copy set for a series.
///
/// Outcomes at several levels and methods can be read off one evaluation;
/// simulated methods then share the same copies.
#[derive(Debug, Clone)]
pub struct Evaluation<T> {
    k: usize,
    phi_joint: Option<T>,
    phi_disjoint: Option<T>,
    inputs: Option<EstimatorInputs<T>>,
    copies: Option<CopySet<T>>,
    power_guard: Option<PowerGuard<T>>,
}

impl<T: Scalar> Evaluation<T> {
    pub fn new(series: &IncrementSeries<T>, cfg: &TestConfig<T>, stream: &RngStream, draw_copies: bool) -> Result<Self> {
        cfg.validate()?;
        let inputs = match EstimatorInputs::compute(series, cfg.k, &cfg.window, &cfg.trunc) {
            Ok(i) => Some(i),
            Err(CojumpError::InsufficientData { .. }) => None,
            Err(e) => return Err(e),
        };
        let copies = match (&inputs, draw_copies) {
            (Some(inp), true) => Some(ResamplingPlan::from_sites(&inp.sites, cfg.k).copy_set(stream, cfg.n_draws)),
            _ => None,
        };
        Ok(Self {
            k: cfg.k,
            phi_joint: phi_joint(series, cfg.k).ok(),
            phi_disjoint: phi_disjoint(series).ok(),
            inputs,
            copies,
            power_guard: cfg.power_guard,
        })
    }

    pub fn phi_joint(&self) -> Option<T> {
        self.phi_joint
    }

    pub fn phi_disjoint(&self) -> Option<T> {
        self.phi_disjoint
    }

    pub fn inputs(&self) -> Option<&EstimatorInputs<T>> {
        self.inputs.as_ref()
    }

    pub fn copies(&self) -> Option<&CopySet<T>> {
        self.copies.as_ref()
    }

    pub fn standardizers(&self) -> Option<StandardizerReport<T>> {
        self.inputs.as_ref().and_then(|i| i.report(self.k).ok())
    }

    fn copy_set(&self) -> Result<&CopySet<T>> {
        self.copies
            .as_ref()
            .ok_or_else(|| CojumpError::InvalidParameter("simulated cutoff needs an evaluation with copies".into()))
    }

    fn guarded(&self, v: T, delta: T) -> Result<T> {
        let g = self.power_guard.ok_or(CojumpError::MissingPowerGuard)?;
        Ok(v.min(g.alpha_prime * delta.powf(g.varpi_prime)))
    }

    /// Joint-jump test at `level`.
    pub fn joint(&self, method: JointCutoffMethod, level: f64) -> Result<TestOutcome<T>> {
        if method.is_guarded() && self.power_guard.is_none() {
            return Err(CojumpError::MissingPowerGuard);
        }
        let (Some(phi), Some(inp)) = (self.phi_joint, self.inputs.as_ref()) else {
            return Ok(TestOutcome::inapplicable());
        };
        let dist = (phi - T::one()).abs();
        match method {
            JointCutoffMethod::Simulated => {
                let set = self.copy_set()?;
                let z = set.quantile_g(level)?;
                let root_delta = inp.delta.sqrt();
                let scaled = (inp.v_f_coarse - inp.v_f).abs() / root_delta;
                let decision = decide(scaled, z);
                let p = set.g_exceeding(scaled) as f64 / set.len() as f64;
                Ok(TestOutcome { decision, cutoff: Some(z * root_delta / inp.v_f), p_value: Some(p) })
            }
            _ => {
                let mut v = inp.v_joint(self.k)?;
                if method.is_guarded() {
                    v = self.guarded(v, inp.delta)?;
                }
                let normal = matches!(method, JointCutoffMethod::NormalQuantile | JointCutoffMethod::NormalTruncated);
                let cutoff = if normal { T::lit(normal_abs_quantile(level)) * v } else { v / T::lit(level.sqrt()) };
                let p = if v == T::zero() {
                    if dist > T::zero() {
                        0.0
                    } else {
                        1.0
                    }
                } else {
                    let t = (dist / v).as_f64();
                    if normal {
                        normal_two_sided_p(t)
                    } else {
                        (1.0 / (t * t)).min(1.0)
                    }
                };
                Ok(TestOutcome { decision: decide(dist, cutoff), cutoff: Some(cutoff), p_value: Some(p) })
            }
        }
    }

    /// Disjoint-jump test at `level`.
    pub fn disjoint(&self, method: DisjointCutoffMethod, level: f64) -> Result<TestOutcome<T>> {
        let (Some(phi), Some(inp)) = (self.phi_disjoint, self.inputs.as_ref()) else {
            return Ok(TestOutcome::inapplicable());
        };
        let a = match method.estimator {
            CEstimator::Multipower => inp.a_hat,
            CEstimator::Truncated => inp.a_hat_trunc,
        }
        .max(T::zero());
        match method.kind {
            DisjointCutoffKind::Markov => {
                let v = inp.v_disjoint(a)?;
                let cutoff = v / T::lit(level);
                let p = if phi == T::zero() { 1.0 } else { (v / phi).as_f64().min(1.0) };
                Ok(TestOutcome { decision: decide(phi, cutoff), cutoff: Some(cutoff), p_value: Some(p) })
            }
            DisjointCutoffKind::Simulated => {
                let set = self.copy_set()?;
                let z = set.quantile_d(level)?;
                let norm = inp.quartic_norm();
                let cutoff = (z + a) * inp.delta / norm;
                // Φ⁽ᵈ⁾ ≥ cutoff  ⇔  V(f,Δ)/Δ − Â ≥ Z
                let scaled = inp.v_f / inp.delta - a;
                let decision = if cutoff == T::zero() && phi == T::zero() {
                    Decision::Inapplicable
                } else if scaled >= z {
                    Decision::Reject
                } else {
                    Decision::Retain
                };
                let p = set.d_exceeding(scaled) as f64 / set.len() as f64;
                Ok(TestOutcome { decision, cutoff: Some(cutoff), p_value: Some(p) })
            }
        }
    }

    pub fn report(&self, joint: JointCutoffMethod, disjoint: DisjointCutoffMethod, level: f64) -> Result<StatReport<T>> {
        let j = self.joint(joint, level)?;
        let d = self.disjoint(disjoint, level)?;
        Ok(StatReport {
            phi_joint: self.phi_joint,
            phi_disjoint: self.phi_disjoint,
            standardizers: self.standardizers(),
            joint: j,
            disjoint: d,
            category: Category::from_decisions(d.decision, j.decision),
        })
    }
}

/// `distance ≥ cutoff` rejects; both exactly zero is a degenerate input.
fn decide<T: Scalar>(distance: T, cutoff: T) -> Decision {
    if cutoff == T::zero() && distance == T::zero() {
        Decision::Inapplicable
    } else if distance >= cutoff {
        Decision::Reject
    } else {
        Decision::Retain
    }
}

fn needs_copies(joint: Option<JointCutoffMethod>, disjoint: Option<DisjointCutoffMethod>) -> bool {
    joint == Some(JointCutoffMethod::Simulated) || disjoint.is_some_and(|d| d.kind == DisjointCutoffKind::Simulated)
}

/// Cutoff `c⁽ʲ⁾` for the joint-jump test.
pub fn joint_cutoff<T: Scalar>(
    series: &IncrementSeries<T>,
    cfg: &TestConfig<T>,
    method: JointCutoffMethod,
    stream: &RngStream,
) -> Result<T> {
    if method == JointCutoffMethod::Simulated {
        check_draws(cfg.level, cfg.n_draws)?;
    }
    let eval = Evaluation::new(series, cfg, stream, needs_copies(Some(method), None))?;
    phi_joint(series, cfg.k)?;
    if eval.inputs.is_none() {
        cfg.window.check(series)?;
    }
    eval.joint(method, cfg.level)?.cutoff.ok_or(CojumpError::DenominatorZero("V(f, Δ) = 0"))
}

/// Cutoff `c⁽ᵈ⁾` for the disjoint-jump test.
pub fn disjoint_cutoff<T: Scalar>(
    series: &IncrementSeries<T>,
    cfg: &TestConfig<T>,
    method: DisjointCutoffMethod,
    stream: &RngStream,
) -> Result<T> {
    if method.kind == DisjointCutoffKind::Simulated {
        check_draws(cfg.level, cfg.n_draws)?;
    }
    let eval = Evaluation::new(series, cfg, stream, needs_copies(None, Some(method)))?;
    phi_disjoint(series)?;
    if eval.inputs.is_none() {
        cfg.window.check(series)?;
    }
    eval.disjoint(method, cfg.level)?.cutoff.ok_or(CojumpError::DenominatorZero("V(g1, Δ) V(g2, Δ) = 0"))
}

/// Both tests on one series at `cfg.level`.
pub fn run_tests<T: Scalar>(
    series: &IncrementSeries<T>,
    cfg: &TestConfig<T>,
    joint: JointCutoffMethod,
    disjoint: DisjointCutoffMethod,
    stream: &RngStream,
) -> Result<StatReport<T>> {
    let copies = needs_copies(Some(joint), Some(disjoint));
    if copies {
        check_draws(cfg.level, cfg.n_draws)?;
    }
    if joint.is_guarded() && cfg.power_guard.is_none() {
        return Err(CojumpError::MissingPowerGuard);
    }
    Evaluation::new(series, cfg, stream, copies)?.report(joint, disjoint, cfg.level)
}
