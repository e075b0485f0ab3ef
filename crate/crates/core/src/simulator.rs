//! Exact simulation of the two-dimensional geometric model with multiplicative
//! compound-Poisson jumps, with full ground truth.
//!
//! Between jumps each component is a geometric Brownian motion solved exactly.
//! Three independent jump sources act on X¹ only, X² only, and both (with
//! the same mark). A jump with mark x multiplies the affected levels by `1 + αx`.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{CojumpError, Result};
use crate::linalg::Sym2;
use crate::series::IncrementSeries;

/// One compound-Poisson source: intensity `lambda`, marks uniform on `±[low, high]`, scaled by `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpSource {
    pub alpha: f64,
    pub lambda: f64,
    pub low: f64,
    pub high: f64,
}

impl JumpSource {
    pub const NONE: JumpSource = JumpSource { alpha: 0.0, lambda: 0.0, low: 0.0, high: 0.0 };

    pub fn new(alpha: f64, lambda: f64, low: f64, high: f64) -> Self {
        Self { alpha, lambda, low, high }
    }

    pub fn is_active(&self) -> bool {
        self.lambda > 0.0
    }

    /// `E[x²]` of the mark law.
    pub fn mark_second_moment(&self) -> f64 {
        let (l, h) = (self.low, self.high);
        (h * h * h - l * l * l) / (3.0 * (h - l))
    }

    /// Variance rate `λ α² E[x²]` of the relative jumps.
    pub fn jump_variance(&self) -> f64 {
        if !self.is_active() {
            return 0.0;
        }
        self.lambda * self.alpha * self.alpha * self.mark_second_moment()
    }

    fn sample_mark<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let m = self.low + (self.high - self.low) * rng.random::<f64>();
        if rng.random::<bool>() {
            m
        } else {
            -m
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub rho: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    /// Sources acting on X¹, X² and both.
    pub sources: [JumpSource; 3],
    pub x0: [f64; 2],
    pub horizon: f64,
    pub fine_steps_per_obs: usize,
}

/// Names of the Table 1 scenarios.
pub const PRESET_NAMES: [&str; 12] =
    ["I-j", "II-j", "III-j", "I-m", "II-m", "III-m", "I-d0", "II-d0", "III-d0", "I-d1", "II-d1", "III-d1"];

impl ScenarioConfig {
    /// A continuous scenario with σᵢ² = 8e−5, unit levels and T = 1.
    pub fn continuous(rho: f64) -> Self {
        let s = 8e-5f64.sqrt();
        Self {
            rho,
            sigma1: s,
            sigma2: s,
            sources: [JumpSource::NONE; 3],
            x0: [1.0, 1.0],
            horizon: 1.0,
            fine_steps_per_obs: 1,
        }
    }

    /// Table 1 row by name, e.g. `"I-j"` or `"III-d1"`.
    pub fn preset(name: &str) -> Option<Self> {
        let (level, kind) = name.split_once('-')?;
        let (lambda, high) = match level {
            "I" => (1.0, 0.7484),
            "II" => (5.0, 0.3187),
            "III" => (25.0, 0.1238),
            _ => return None,
        };
        let src = JumpSource::new(0.01, lambda, 0.05, high);
        let none = JumpSource::NONE;
        let (rho, sources) = match kind {
            "j" => (0.0, [none, none, src]),
            "m" => (0.5, [src, src, src]),
            "d0" => (0.0, [src, src, none]),
            "d1" => (1.0, [src, src, none]),
            _ => return None,
        };
        Some(Self { rho, sources, ..Self::continuous(rho) })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CojumpError::InvalidParameter(m));
        if !(-1.0..=1.0).contains(&self.rho) {
            return bad(format!("rho must lie in [-1,1], got {}", self.rho));
        }
        if !(self.sigma1 >= 0.0 && self.sigma2 >= 0.0) {
            return bad("volatilities must be nonnegative".into());
        }
        if !(self.x0[0] > 0.0 && self.x0[1] > 0.0) {
            return bad("initial levels must be positive".into());
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("horizon must be positive, got {}", self.horizon));
        }
        if self.fine_steps_per_obs == 0 {
            return bad("fine_steps_per_obs must be >= 1".into());
        }
        for (s, src) in self.sources.iter().enumerate() {
            if src.lambda < 0.0 || !src.lambda.is_finite() {
                return bad(format!("source {}: intensity must be nonnegative", s + 1));
            }
            if src.is_active() {
                if !(src.low > 0.0 && src.low < src.high) {
                    return bad(format!("source {}: need 0 < l < h", s + 1));
                }
                if src.alpha.abs() * src.high >= 1.0 {
                    return Err(CojumpError::DegenerateConfig(format!(
                        "source {}: |alpha| h = {} >= 1 breaks positivity",
                        s + 1,
                        src.alpha.abs() * src.high
                    )));
                }
            }
        }
        Ok(())
    }

    /// `c_t` at levels `x`.
    pub fn spot_cov(&self, x: [f64; 2]) -> Sym2<f64> {
        let s1 = x[0] * self.sigma1;
        let s2 = x[1] * self.sigma2;
        Sym2::new(s1 * s1, self.rho * s1 * s2, s2 * s2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PathClass {
    Joint,
    Disjoint,
    ContinuousAny,
}

impl PathClass {
    pub fn name(self) -> &'static str {
        match self {
            PathClass::Joint => "JOINT",
            PathClass::Disjoint => "DISJOINT",
            PathClass::ContinuousAny => "CONTINUOUS_ANY",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [PathClass::Joint, PathClass::Disjoint, PathClass::ContinuousAny].into_iter().find(|c| c.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpEvent {
    pub time: f64,
    /// 1, 2 or 3.
    pub source: u8,
    pub mark: f64,
    /// `(ΔX¹, ΔX²)`.
    pub jump: [f64; 2],
    pub cov_left: Sym2<f64>,
    pub cov_right: Sym2<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathTruth {
    /// Sorted by time.
    pub jump_events: Vec<JumpEvent>,
    pub fine_times: Vec<f64>,
    pub fine_levels: Vec<[f64; 2]>,
    /// `c_t` at `fine_times`.
    pub spot_cov_path: Vec<Sym2<f64>>,
    pub class: PathClass,
}

/// Class of a path from its events up to `horizon`.
pub fn classify_path(truth: &PathTruth, horizon: f64) -> PathClass {
    classify_events(truth.jump_events.iter().filter(|e| e.time <= horizon))
}

fn classify_events<'a>(events: impl Iterator<Item = &'a JumpEvent>) -> PathClass {
    let (mut first, mut second) = (false, false);
    for e in events {
        if e.jump[0] * e.jump[1] != 0.0 {
            return PathClass::Joint;
        }
        first |= e.jump[0] != 0.0;
        second |= e.jump[1] != 0.0;
    }
    if first && second {
        PathClass::Disjoint
    } else {
        PathClass::ContinuousAny
    }
}

/// Simulates one path observed at `n_obs` regular times on `[0, T]`.
pub fn simulate_path<R: Rng + ?Sized>(
    cfg: &ScenarioConfig,
    n_obs: usize,
    rng: &mut R,
) -> Result<(IncrementSeries<f64>, PathTruth)> {
    cfg.validate()?;
    if n_obs == 0 {
        return Err(CojumpError::InvalidParameter("n_obs must be >= 1".into()));
    }
    let horizon = cfg.horizon;

    let mut pending: Vec<(f64, u8, f64)> = Vec::new();
    for (s, src) in cfg.sources.iter().enumerate() {
        if !src.is_active() {
            continue;
        }
        let count = Poisson::new(src.lambda * horizon)
            .map_err(|e| CojumpError::InvalidParameter(e.to_string()))?
            .sample(rng) as usize;
        for _ in 0..count {
            let t = horizon * rng.random::<f64>();
            let mark = src.sample_mark(rng);
            pending.push((t, s as u8 + 1, mark));
        }
    }
    pending.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n_fine = n_obs * cfg.fine_steps_per_obs;
    let rho_c = (1.0 - cfg.rho * cfg.rho).max(0.0).sqrt();
    let mut x = cfg.x0;
    let mut t = 0.0;
    let mut next = 0;
    let mut events = Vec::with_capacity(pending.len());
    let mut fine_times = Vec::with_capacity(n_fine + 1);
    let mut fine_levels = Vec::with_capacity(n_fine + 1);
    fine_times.push(0.0);
    fine_levels.push(x);

    let diffuse = |x: &mut [f64; 2], dt: f64, rng: &mut R| {
        if dt <= 0.0 {
            return;
        }
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let w1 = dt.sqrt() * z1;
        let w2 = dt.sqrt() * (cfg.rho * z1 + rho_c * z2);
        x[0] *= (-0.5 * cfg.sigma1 * cfg.sigma1 * dt + cfg.sigma1 * w1).exp();
        x[1] *= (-0.5 * cfg.sigma2 * cfg.sigma2 * dt + cfg.sigma2 * w2).exp();
    };

    for j in 1..=n_fine {
        let t_end = horizon * j as f64 / n_fine as f64;
        while next < pending.len() && pending[next].0 <= t_end {
            let (tau, source, mark) = pending[next];
            diffuse(&mut x, tau - t, rng);
            t = tau;
            let alpha = cfg.sources[source as usize - 1].alpha;
            let before = x;
            if source != 2 {
                x[0] *= 1.0 + alpha * mark;
            }
            if source != 1 {
                x[1] *= 1.0 + alpha * mark;
            }
            events.push(JumpEvent {
                time: tau,
                source,
                mark,
                jump: [x[0] - before[0], x[1] - before[1]],
                cov_left: cfg.spot_cov(before),
                cov_right: cfg.spot_cov(x),
            });
            next += 1;
        }
        diffuse(&mut x, t_end - t, rng);
        t = t_end;
        fine_times.push(t_end);
        fine_levels.push(x);
    }

    let obs: Vec<[f64; 2]> = fine_levels.iter().step_by(cfg.fine_steps_per_obs).copied().collect();
    let series = IncrementSeries::from_levels(horizon, &obs)?;
    let spot_cov_path = fine_levels.iter().map(|&l| cfg.spot_cov(l)).collect();
    let class = classify_events(events.iter());
    Ok((series, PathTruth { jump_events: events, fine_times, fine_levels, spot_cov_path, class }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn event(source: u8, jump: [f64; 2], time: f64) -> JumpEvent {
        JumpEvent { time, source, mark: 0.0, jump, cov_left: Sym2::zero(), cov_right: Sym2::zero() }
    }

    fn truth(events: Vec<JumpEvent>) -> PathTruth {
        PathTruth {
            jump_events: events,
            fine_times: vec![],
            fine_levels: vec![],
            spot_cov_path: vec![],
            class: PathClass::ContinuousAny,
        }
    }

    #[test]
    fn constant_path() {
        let cfg = ScenarioConfig { sigma1: 0.0, sigma2: 0.0, ..ScenarioConfig::continuous(0.0) };
        let (s, t) = simulate_path(&cfg, 50, &mut RngStream::new(1).rng(0, 0)).unwrap();
        assert!(s.increments().iter().all(|x| *x == [0.0, 0.0]));
        assert_eq!(t.class, PathClass::ContinuousAny);
    }

    #[test]
    fn classification() {
        assert_eq!(classify_path(&truth(vec![event(3, [0.1, 0.2], 0.5)]), 1.0), PathClass::Joint);
        let d = truth(vec![event(1, [0.1, 0.0], 0.2), event(2, [0.0, 0.1], 0.7)]);
        assert_eq!(classify_path(&d, 1.0), PathClass::Disjoint);
        assert_eq!(classify_path(&d, 0.5), PathClass::ContinuousAny);
        assert_eq!(classify_path(&truth(vec![event(1, [0.1, 0.0], 0.2)]), 1.0), PathClass::ContinuousAny);
    }

    #[test]
    fn presets_match_table() {
        for name in PRESET_NAMES {
            let cfg = ScenarioConfig::preset(name).unwrap();
            cfg.validate().unwrap();
            assert!((cfg.sigma1 * cfg.sigma1 - 8e-5).abs() < 1e-18);
            for src in cfg.sources.iter().filter(|s| s.is_active()) {
                assert!((src.jump_variance() - 2e-5).abs() < 2e-8, "{name}: {}", src.jump_variance());
            }
        }
        assert_eq!(ScenarioConfig::preset("I-m").unwrap().rho, 0.5);
        assert_eq!(ScenarioConfig::preset("III-d1").unwrap().rho, 1.0);
        assert!(ScenarioConfig::preset("IV-j").is_none());
    }

    #[test]
    fn mark_moment_against_quadrature() {
        let src = ScenarioConfig::preset("I-j").unwrap().sources[2];
        let m = 10_000;
        let h = (src.high - src.low) / m as f64;
        let mut acc = 0.0;
        for i in 0..=m {
            let x = src.low + i as f64 * h;
            let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * x * x;
        }
        let quad = acc * h / 3.0 / (src.high - src.low);
        assert!((quad - src.mark_second_moment()).abs() < 1e-12);
        assert!((src.alpha * src.alpha * src.lambda * quad - 2e-5).abs() < 1e-8);
    }

    #[test]
    fn common_jump_scenario_is_joint() {
        let cfg = ScenarioConfig::preset("I-j").unwrap();
        let stream = RngStream::new(5);
        for rep in 0..200 {
            let (_, t) = simulate_path(&cfg, 100, &mut stream.rng(rep, 0)).unwrap();
            assert!(t.jump_events.iter().all(|e| e.source == 3 && e.jump[0] * e.jump[1] != 0.0));
            let expect = if t.jump_events.is_empty() { PathClass::ContinuousAny } else { PathClass::Joint };
            assert_eq!(t.class, expect);
        }
    }

    #[test]
    fn jump_counts_and_positivity() {
        let cfg = ScenarioConfig::preset("II-m").unwrap();
        let stream = RngStream::new(9);
        let reps = 2000;
        let mut counts = [0usize; 3];
        for rep in 0..reps {
            let (s, t) = simulate_path(&cfg, 50, &mut stream.rng(rep, 0)).unwrap();
            for e in &t.jump_events {
                counts[e.source as usize - 1] += 1;
            }
            assert!(t.fine_levels.iter().all(|l| l[0] > 0.0 && l[1] > 0.0));
            assert_eq!(s.len(), 50);
        }
        for c in counts {
            let mean = c as f64 / reps as f64;
            let se = (5.0 / reps as f64).sqrt();
            assert!((mean - 5.0).abs() < 3.0 * se, "mean count {mean}");
        }
    }

    #[test]
    fn degenerate_marks_rejected() {
        let mut cfg = ScenarioConfig::preset("I-d0").unwrap();
        cfg.sources[0].alpha = 2.0;
        assert!(matches!(cfg.validate(), Err(CojumpError::DegenerateConfig(_))));
    }

    #[test]
    fn gbm_moments_independent_of_refinement() {
        let base = ScenarioConfig { sigma1: 0.2, sigma2: 0.3, ..ScenarioConfig::continuous(0.5) };
        let reps = 20_000;
        for fine in [1, 4] {
            let cfg = ScenarioConfig { fine_steps_per_obs: fine, ..base.clone() };
            let stream = RngStream::new(11 + fine as u64);
            let (mut m, mut v, mut cross) = ([0.0; 2], [0.0; 2], 0.0);
            for rep in 0..reps {
                let (s, _) = simulate_path(&cfg, 1, &mut stream.rng(rep, 0)).unwrap();
                let x = s.increments()[0];
                for i in 0..2 {
                    m[i] += x[i];
                    v[i] += x[i] * x[i];
                }
                cross += x[0] * x[1];
            }
            let sig = [0.2f64, 0.3];
            for i in 0..2 {
                let var = (sig[i] * sig[i]).exp_m1();
                assert!((m[i] / reps as f64).abs() < 4.0 * (var / reps as f64).sqrt());
                assert!(((v[i] / reps as f64) / var - 1.0).abs() < 0.05);
            }
            let cov = (0.5f64 * 0.2 * 0.3).exp_m1();
            assert!(((cross / reps as f64) / cov - 1.0).abs() < 0.08);
        }
    }

    #[test]
    fn seeded_determinism() {
        let cfg = ScenarioConfig::preset("III-m").unwrap();
        let a = simulate_path(&cfg, 400, &mut RngStream::new(3).rng(7, 0)).unwrap();
        let b = simulate_path(&cfg, 400, &mut RngStream::new(3).rng(7, 0)).unwrap();
        assert_eq!(a, b);
    }
}
