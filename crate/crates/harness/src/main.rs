use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cojump::{simulate_path, RngStream, ScenarioConfig};
use cojump_harness::config::{parse_disjoint, parse_joint, ScenarioSpec};
use cojump_harness::{
    analyze_day, analyze_days, format_skipped, format_table2, ingest_csv, rows_from_results, run_experiment,
    AnalyzeSettings, Columns, DayOutcome, ExperimentSpec, HarnessError, InputFormat, Result,
};

#[derive(Parser)]
#[command(name = "cojump", version, about = "Tests for common and disjoint jumps in bivariate high-frequency data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct TestArgs {
    /// Coarsening factor of the joint-jump statistic.
    #[arg(long)]
    k: Option<usize>,
    /// Truncation multiplier.
    #[arg(long)]
    alpha: Option<f64>,
    /// Truncation exponent.
    #[arg(long)]
    varpi: Option<f64>,
    /// Spot covariance window size.
    #[arg(long)]
    kn: Option<usize>,
    /// Significance level.
    #[arg(long)]
    level: Option<f64>,
    /// Number of simulated copies.
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// normal, chebyshev, simulated, normal-truncated, chebyshev-truncated
    #[arg(long)]
    method_joint: Option<String>,
    /// simulated, simulated-truncated, markov, markov-truncated
    #[arg(long)]
    method_disjoint: Option<String>,
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// levels, log-levels or returns
    #[arg(long, default_value = "log-levels")]
    format: String,
    #[arg(long, default_value = "day")]
    day_column: String,
    #[arg(long, default_value = "time")]
    time_column: String,
    #[arg(long, default_value = "x1")]
    x1_column: String,
    #[arg(long, default_value = "x2")]
    x2_column: String,
}

impl InputArgs {
    fn load(&self) -> Result<cojump_harness::ingest::Ingested> {
        let format = InputFormat::parse(&self.format)
            .ok_or_else(|| HarnessError::Config(format!("unknown input format {:?}", self.format)))?;
        let columns = Columns {
            day: self.day_column.clone(),
            time: self.time_column.clone(),
            x1: self.x1_column.clone(),
            x2: self.x2_column.clone(),
        };
        Ok(ingest_csv(&self.input, format, &columns)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate days from a Table 1 scenario and write levels (and optionally the true jumps).
    Simulate {
        #[arg(long, default_value = "I-j")]
        preset: String,
        #[arg(long, default_value_t = 288)]
        n_obs: usize,
        #[arg(long, default_value_t = 1)]
        days: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Levels CSV (`day,time,x1,x2`); stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Jump events CSV.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Run both tests on one day of a CSV file.
    Test {
        #[command(flatten)]
        input: InputArgs,
        /// Day label; the first day when absent.
        #[arg(long)]
        day: Option<String>,
        #[command(flatten)]
        test: TestArgs,
    },
    /// Run a Monte-Carlo experiment from a TOML specification.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "results")]
        out: PathBuf,
        /// Worker threads; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Replace the scenario with a Table 1 preset.
        #[arg(long)]
        preset: Option<String>,
        #[command(flatten)]
        test: TestArgs,
    },
    /// Screen and test every day of a CSV file, writing a Table-2 style report.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        /// Report CSV; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV listing skipped days and reasons.
        #[arg(long)]
        skipped: Option<PathBuf>,
        /// Level of the univariate jump screen, or "none".
        #[arg(long, default_value = "0.01")]
        prefilter_level: String,
        #[command(flatten)]
        test: TestArgs,
    },
}

fn analyze_settings(t: &TestArgs) -> Result<AnalyzeSettings> {
    let mut s = AnalyzeSettings::default();
    if let Some(k) = t.k {
        s.k = k;
    }
    if let Some(a) = t.alpha {
        s.trunc_mult = a;
    }
    if let Some(v) = t.varpi {
        s.varpi = v;
    }
    s.kn = t.kn.or(s.kn);
    if let Some(l) = t.level {
        s.level = l;
    }
    s.n_draws = t.draws;
    s.seed = t.seed.unwrap_or(0);
    if let Some(m) = &t.method_joint {
        s.joint = parse_joint(m)?;
    }
    if let Some(m) = &t.method_disjoint {
        s.disjoint = parse_disjoint(m)?;
    }
    Ok(s)
}

fn write_out(path: Option<&PathBuf>, body: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| HarnessError::io(p, e)),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| HarnessError::io("<stdout>", e)),
    }
}

fn simulate(preset: &str, n_obs: usize, days: usize, seed: u64, out: Option<&PathBuf>, truth: Option<&PathBuf>) -> Result<()> {
    let cfg = ScenarioConfig::preset(preset).ok_or_else(|| HarnessError::Config(format!("unknown preset {preset:?}")))?;
    let stream = RngStream::new(seed);
    let mut levels = String::from("day,time,x1,x2\n");
    let mut events = String::from("day,time,source,mark,jump1,jump2,class\n");
    for d in 0..days {
        let (_, t) = simulate_path(&cfg, n_obs, &mut stream.rng(d as u64, 0))?;
        let step = cfg.fine_steps_per_obs;
        for (i, x) in t.fine_levels.iter().step_by(step).enumerate() {
            writeln!(levels, "{d},{},{},{}", t.fine_times[i * step], x[0], x[1]).unwrap();
        }
        for e in &t.jump_events {
            writeln!(events, "{d},{},{},{},{},{},{}", e.time, e.source, e.mark, e.jump[0], e.jump[1], t.class.name()).unwrap();
        }
    }
    write_out(out, &levels)?;
    if let Some(p) = truth {
        write_out(Some(p), &events)?;
    }
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "NA".into())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { preset, n_obs, days, seed, out, truth } => {
            simulate(&preset, n_obs, days, seed, out.as_ref(), truth.as_ref())
        }
        Command::Test { input, day, test } => {
            let data = input.load()?;
            let settings = AnalyzeSettings { prefilter_level: None, ..analyze_settings(&test)? };
            let d = match &day {
                Some(label) => data.days.iter().find(|d| &d.label == label),
                None => data.days.first(),
            }
            .ok_or_else(|| HarnessError::Config("requested day not found among complete days".into()))?;
            let mut text = format!("day={}\nincrements={}\n", d.label, d.series.len());
            match analyze_day(&d.series, &settings, &RngStream::new(settings.seed))? {
                DayOutcome::Skipped { reason, detail } => {
                    writeln!(text, "status={}\ndetail={detail}", reason.name()).unwrap();
                }
                DayOutcome::Reported(r) => {
                    writeln!(text, "phi_disjoint={}", fmt_opt(r.phi_disjoint)).unwrap();
                    writeln!(text, "phi_joint={}", fmt_opt(r.phi_joint)).unwrap();
                    writeln!(text, "cutoff_disjoint={}", fmt_opt(r.disjoint.cutoff)).unwrap();
                    writeln!(text, "cutoff_joint={}", fmt_opt(r.joint.cutoff)).unwrap();
                    writeln!(text, "p_disjoint={}", fmt_opt(r.disjoint.p_value)).unwrap();
                    writeln!(text, "p_joint={}", fmt_opt(r.joint.p_value)).unwrap();
                    writeln!(text, "decision_disjoint={:?}", r.disjoint.decision).unwrap();
                    writeln!(text, "decision_joint={:?}", r.joint.decision).unwrap();
                    let cat = r.category.map(|c| c.number().to_string()).unwrap_or_else(|| "NA".into());
                    writeln!(text, "category={cat}").unwrap();
                }
            }
            write_out(None, &text)
        }
        Command::Experiment { config, out, workers, preset, test } => {
            let mut spec = ExperimentSpec::load(&config)?;
            if let Some(p) = preset {
                spec.scenario = ScenarioSpec::Preset { preset: p };
            }
            if let Some(s) = test.seed {
                spec.seed = s;
            }
            if let Some(k) = test.k {
                spec.test.k = k;
            }
            if let Some(a) = test.alpha {
                spec.test.alpha = a;
            }
            if let Some(v) = test.varpi {
                spec.test.varpi = v;
            }
            spec.test.kn = test.kn.or(spec.test.kn);
            spec.test.draws = test.draws.or(spec.test.draws);
            if let Some(l) = test.level {
                spec.levels = vec![l];
            }
            if let Some(m) = test.method_joint {
                spec.methods.joint = m.split(',').map(str::to_string).collect();
            }
            if let Some(m) = test.method_disjoint {
                spec.methods.disjoint = m.split(',').map(str::to_string).collect();
            }
            let result = run_experiment(&spec, workers)?;
            for p in result.write_csvs(&out)? {
                eprintln!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Analyze { input, out, skipped, prefilter_level, test } => {
            let data = input.load()?;
            let mut settings = analyze_settings(&test)?;
            settings.prefilter_level = match prefilter_level.as_str() {
                "none" => None,
                s => Some(s.parse().map_err(|_| HarnessError::Config(format!("bad prefilter level {s:?}")))?),
            };
            let results = analyze_days(&data.days, &settings)?;
            write_out(out.as_ref(), &format_table2(&rows_from_results(&results)))?;
            if let Some(p) = skipped {
                let mut body = format_skipped(&results);
                for r in &data.rejected {
                    writeln!(body, "{},DATA,\"{}\"", r.label, r.reason).unwrap();
                }
                write_out(Some(&p), &body)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
