//! `belleff` command line.
//!
//! Exit codes: 0 success (or local behavior), 1 invalid input or any other
//! error, 2 no violation in range, 3 nonlocal behavior.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use belleff::detector::make_behavior;
use belleff::format::{parse_check_input, write_behavior_json, CheckInput, Header};
use belleff::inequality::{ch_lhs, chsh_conditional, chsh_joint};
use belleff::lhv::{is_local, Certificate};
use belleff::optimizer::{find_threshold, noise_curve, StateFamily};
use belleff::simulate::{estimate_behavior, estimate_inequalities, run_trials, InequalityEstimate};
use belleff::{make_state, DetectorModel, Error, Functional, PureState, Scenario, SearchSpace, SettingsPair, SweepConfig};

use output::{CheckReport, ReportLine};

const EXIT_ERROR: u8 = 1;
const EXIT_NO_VIOLATION: u8 = 2;
const EXIT_NONLOCAL: u8 = 3;

#[derive(Parser)]
#[command(name = "belleff", version, about = "Detection-efficiency and noise thresholds for Bell tests")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smallest photon efficiency admitting a violation.
    Threshold(ThresholdArgs),
    /// Largest tolerable background probability over a grid of efficiencies.
    Curve(CurveArgs),
    /// Locality verdict and inequality reports for a behavior or counts file.
    Check(CheckArgs),
    /// Monte Carlo run producing a counts table.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ScenarioArg {
    AtomPhoton,
    Symmetric,
    /// Atom efficiency fixed by --eta-a.
    FixedAtom,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FunctionalArg {
    Ch,
    #[value(alias = "chsh-conditional")]
    Chsh,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FamilyArg {
    General,
    Constructed,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CheckFormat {
    Text,
    Json,
}

#[derive(Args, Debug, Serialize)]
struct SweepArgs {
    #[arg(long, value_enum)]
    scenario: ScenarioArg,
    #[arg(long, value_enum)]
    functional: FunctionalArg,
    /// Atom efficiency for --scenario fixed-atom.
    #[arg(long)]
    eta_a: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FamilyArg::General)]
    family: FamilyArg,
    /// Multi-start count of each search.
    #[arg(long, default_value_t = 32)]
    starts: usize,
}

impl SweepArgs {
    fn config(&self, beta: f64) -> anyhow::Result<SweepConfig> {
        let scenario = match (self.scenario, self.eta_a) {
            (ScenarioArg::AtomPhoton, None) => Scenario::AtomPhoton,
            (ScenarioArg::Symmetric, None) => Scenario::Symmetric,
            (ScenarioArg::FixedAtom, Some(e)) => Scenario::FixedAtom(e),
            (ScenarioArg::FixedAtom, None) => bail!(Error::InvalidConfig("--scenario fixed-atom needs --eta-a".into())),
            (_, Some(_)) => bail!(Error::InvalidConfig("--eta-a only applies to --scenario fixed-atom".into())),
        };
        let functional = match self.functional {
            FunctionalArg::Ch => Functional::Ch,
            FunctionalArg::Chsh => Functional::ChshConditional,
        };
        let mut cfg = SweepConfig::new(scenario, functional, beta);
        cfg.seed = self.seed;
        cfg.space = SearchSpace {
            family: match self.family {
                FamilyArg::General => StateFamily::General,
                FamilyArg::Constructed => StateFamily::Constructed,
            },
            starts: self.starts,
            ..SearchSpace::default()
        };
        Ok(cfg)
    }
}

#[derive(Args, Debug, Serialize)]
struct ThresholdArgs {
    #[command(flatten)]
    #[serde(flatten)]
    sweep: SweepArgs,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Bisection width in eta_B.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Also write the certificate's behavior as behavior JSON.
    #[arg(long)]
    #[serde(skip)]
    behavior_out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CurveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    sweep: SweepArgs,
    /// Comma-separated eta_B values, or `start:end:count`.
    #[arg(long)]
    eta_grid: String,
    /// Relative bisection width in beta.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Args, Debug, Serialize)]
struct CheckArgs {
    /// Behavior JSON, counts CSV or counts JSON.
    file: PathBuf,
    /// Max-norm distance to the local set still counted as local.
    #[arg(long, default_value_t = belleff::lhv::DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CheckFormat::Text)]
    format: CheckFormat,
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    /// Use `make_state(theta)`.
    #[arg(long, conflicts_with = "amplitudes")]
    theta: Option<f64>,
    /// Real amplitudes `a00,a01,a10,a11` (normalized on input).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    amplitudes: Option<Vec<f64>>,
    /// Angles `A,a,B,b` in radians (default: CHSH-optimal).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    angles: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    eta_a: f64,
    #[arg(long, default_value_t = 1.0)]
    eta_b: f64,
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Number of trials.
    #[arg(long, short = 'n')]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

fn header<T: Serialize>(command: &str, seed: u64, args: &T) -> Header {
    let mut config = serde_json::to_value(args).expect("arguments serialize");
    if let Some(obj) = config.as_object_mut() {
        obj.insert("command".into(), command.into());
    }
    Header::new(seed, config)
}

fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_threshold(args: &ThresholdArgs) -> anyhow::Result<u8> {
    let mut cfg = args.sweep.config(args.beta)?;
    cfg.tol = args.tol;
    let point = match find_threshold(&cfg) {
        Ok(p) => p,
        Err(e @ Error::NoViolationInRange(_)) => {
            eprintln!("belleff: {e}");
            return Ok(EXIT_NO_VIOLATION);
        }
        Err(e) => return Err(e.into()),
    };
    let h = header("threshold", cfg.seed, args);
    let text = match args.format {
        FormatArg::Csv => output::threshold_csv(&h, &point),
        FormatArg::Json => output::threshold_json(&h, &point),
    };
    emit(args.out.as_ref(), &text)?;
    if let Some(p) = &args.behavior_out {
        let c = &point.certificate;
        let b = make_behavior(&c.state, &c.settings, &c.model);
        std::fs::write(p, write_behavior_json(&b, Some(&h))).with_context(|| format!("writing {}", p.display()))?;
    }
    if args.out.is_some() {
        println!("threshold etaB = {:.6} (margin {:.3e})", point.threshold, point.certificate.margin);
    }
    Ok(0)
}

fn parse_grid(s: &str) -> anyhow::Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("cannot read eta grid '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [start, end, count] => {
            let (a, b): (f64, f64) = (start.trim().parse().map_err(|_| bad())?, end.trim().parse().map_err(|_| bad())?);
            let n: usize = count.trim().parse().map_err(|_| bad())?;
            match n {
                0 => Err(bad().into()),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()),
            }
        }
        [list] => list.split(',').map(|v| v.trim().parse::<f64>().map_err(|_| bad().into())).collect(),
        _ => Err(bad().into()),
    }
}

fn cmd_curve(args: &CurveArgs) -> anyhow::Result<u8> {
    let mut cfg = args.sweep.config(0.0)?;
    cfg.beta_tol = args.tol;
    let grid = parse_grid(&args.eta_grid)?;
    let points = noise_curve(&cfg, &grid)?;
    let h = header("curve", cfg.seed, args);
    let text = match args.format {
        FormatArg::Csv => output::curve_csv(&h, &grid, &points)?,
        FormatArg::Json => output::curve_json(&h, &grid, &points),
    };
    emit(args.out.as_ref(), &text)?;
    Ok(0)
}

fn cmd_check(args: &CheckArgs) -> anyhow::Result<u8> {
    let text = std::fs::read_to_string(&args.file).with_context(|| format!("reading {}", args.file.display()))?;
    let input = parse_check_input(&text).with_context(|| format!("in {}", args.file.display()))?;
    let (behavior, reports, source) = match input {
        CheckInput::Behavior(b) => {
            let mut r = vec![match chsh_conditional(&b) {
                Ok(rep) => ReportLine::exact(rep),
                Err(e) => ReportLine::failed("CHSH-conditional", &e),
            }];
            r.push(ReportLine::exact(chsh_joint(&b)));
            r.push(ReportLine::exact(ch_lhs(&b)));
            (b, r, "behavior")
        }
        CheckInput::Counts(t) => {
            let (b, _) = estimate_behavior(&t)?;
            let r = match estimate_inequalities(&t) {
                Ok(est) => est.into_iter().map(ReportLine::estimated).collect(),
                Err(e) => vec![ReportLine::failed("all", &e)],
            };
            (b, r, "counts")
        }
    };
    let verdict = is_local(&behavior, args.tol)?;
    let report = CheckReport::new(source, &verdict, reports);
    let h = header("check", 0, args);
    let out = match args.format {
        CheckFormat::Json => report.json(&h),
        CheckFormat::Text => report.text(),
    };
    emit(args.out.as_ref(), &out)?;
    if let Certificate::Separator { gap, .. } = verdict.certificate {
        eprintln!("nonlocal: separating functional exceeds the local maximum by {gap:.3e}");
    }
    Ok(if verdict.is_local { 0 } else { EXIT_NONLOCAL })
}

fn cmd_simulate(args: &SimulateArgs) -> anyhow::Result<u8> {
    let four = |v: &Vec<f64>, what: &str| -> anyhow::Result<[f64; 4]> {
        <[f64; 4]>::try_from(v.as_slice())
            .map_err(|_| Error::InvalidConfig(format!("--{what} takes 4 comma-separated values, got {}", v.len())).into())
    };
    let state = match (&args.theta, &args.amplitudes) {
        (Some(t), _) => make_state(*t)?,
        (None, Some(a)) => PureState::from_amplitudes(four(a, "amplitudes")?)?,
        (None, None) => make_state(std::f64::consts::FRAC_PI_3)?,
    };
    let settings = match &args.angles {
        Some(a) => SettingsPair::from_radians(four(a, "angles")?)?,
        None => SettingsPair::chsh_optimal(),
    };
    let model = DetectorModel::new(args.eta_a, args.eta_b, args.beta)?;
    let counts = run_trials(&state, &settings, &model, args.trials, args.seed)?;
    let h = header("simulate", args.seed, args);
    let text = match args.format {
        FormatArg::Csv => belleff::format::write_counts_csv(&counts, &h),
        FormatArg::Json => belleff::format::write_counts_json(&counts, &h),
    };
    emit(args.out.as_ref(), &text)?;
    let summary: String = match estimate_inequalities(&counts) {
        Ok(est) => est.iter().map(|e: &InequalityEstimate| ReportLine::estimated(*e).text() + "\n").collect(),
        Err(e) => format!("estimates unavailable: {e}\n"),
    };
    if args.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("belleff: {e}");
            return ExitCode::from(EXIT_ERROR);
        }
    }
    let result = match &cli.command {
        Command::Threshold(a) => cmd_threshold(a),
        Command::Curve(a) => cmd_curve(a),
        Command::Check(a) => cmd_check(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("belleff: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
