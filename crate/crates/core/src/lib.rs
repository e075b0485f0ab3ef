//! Tests for common versus disjoint jump arrivals in a discretely observed
//! bivariate process.
//!
//! The statistics, estimators, resampler and tests are generic over the
//! floating-point type (`f32` or `f64`); the aliases at the crate root fix it
//! to `f64`. The simulator and oracle work in `f64`.

pub mod error;
pub mod estimators;
pub mod linalg;
pub mod num;
pub mod oracle;
pub mod resampling;
pub mod rng;
pub mod series;
pub mod simulator;
pub mod stats;
pub mod testing;

pub use error::{CojumpError, Result};
pub use estimators::{
    f_hat, fprime_hat, jump_sites, multipower_c, spot_cov, standardizers, truncated_c, EstimatorInputs, JumpSite,
    SpotCovPair, StandardizerReport, Threshold, TruncationMode, TruncationSpec, WindowSpec,
};
pub use linalg::{psd_sqrt, Sym2};
pub use num::Scalar;
pub use oracle::{limit_quantities, sample_limit_law, LimitLaw, LimitLawSample, LimitQuantities};
pub use resampling::{draw_r, quantile_d, quantile_g, CopySet, QuantileEstimate, ResampleDraw, ResamplingPlan};
pub use rng::RngStream;
pub use series::{IncrementSeries, SamplingGrid};
pub use simulator::{
    classify_path, simulate_path, JumpEvent, JumpSource, PathClass, PathTruth, ScenarioConfig, PRESET_NAMES,
};
pub use stats::{phi_disjoint, phi_joint, realized_functional, TestFunction};
pub use testing::{
    disjoint_cutoff, joint_cutoff, run_tests, univariate_jump_prefilter, CEstimator, Category, Decision,
    DisjointCutoffKind, DisjointCutoffMethod, Evaluation, JointCutoffMethod, JumpScreen, PowerGuard, StatReport,
    TestConfig, TestOutcome,
};

pub type Series = IncrementSeries<f64>;
pub type Grid = SamplingGrid<f64>;
pub type Config = TestConfig<f64>;
pub type Report = StatReport<f64>;
pub type Outcome = TestOutcome<f64>;
pub type Standardizers = StandardizerReport<f64>;
pub type Truncation = TruncationSpec<f64>;
pub type Spot = SpotCovPair<f64>;
pub type Matrix2 = Sym2<f64>;
pub type Series32 = IncrementSeries<f32>;
