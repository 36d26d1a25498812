use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use floquet_qa::conditions::{analyze_with, AnalysisOptions, Threshold};
use floquet_qa::floquet::DEGENERACY_TOL;
use floquet_qa::spectrum::DEFAULT_PROFILE_SAMPLES;
use floquet_qa_cli::config::{IntegratorSettings, ModelSpec, SchemeName};
use floquet_qa_cli::experiments::{self, Fig1Options, Fig2Options};
use floquet_qa_cli::output::{self, Metadata, Table};
use floquet_qa_cli::sweep::{self, Axis, SweepSpec};
use floquet_qa_cli::{report, verify, AppError, AppResult};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "floquet", version, about = "Adiabaticity conditions for periodically driven quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every adiabaticity condition for one model.
    Analyze(AnalyzeArgs),
    /// Overlap time series |d_m(t)| for every level.
    Evolve(EvolveArgs),
    /// Grid sweep described by a JSON file.
    Sweep(SweepArgs),
    /// Peak excited population against 2 delta for the driven two-level model.
    Fig1(Fig1Args),
    /// Condition regions of the dual model on a theta x omega grid.
    Fig2(Fig2Args),
    /// The two counterexample points for the traditional condition.
    Counterexamples(CounterexampleArgs),
    /// Run the acceptance invariants and print one line per criterion.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelName {
    #[value(alias = "schwinger_rabi")]
    SchwingerRabi,
    Dual,
    #[value(alias = "two_tone")]
    TwoTone,
}

#[derive(Args)]
struct ModelArgs {
    /// JSON model file `{"model": ..., "params": {...}}`; flags below override its parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<ModelName>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    v: Option<f64>,
    #[arg(long = "v-prime")]
    v_prime: Option<f64>,
    #[arg(long = "n-tone")]
    n_tone: Option<u32>,
    /// Drop the V' tone of the two-tone model.
    #[arg(long)]
    truncated: bool,
}

impl ModelArgs {
    fn overrides(&self) -> Vec<(&'static str, Option<f64>)> {
        vec![
            ("omega0", self.omega0),
            ("theta", self.theta),
            ("omega", self.omega),
            ("v", self.v),
            ("v_prime", self.v_prime),
            ("n_tone", self.n_tone.map(f64::from)),
        ]
    }

    fn spec(&self) -> AppResult<ModelSpec> {
        let mut spec = match (&self.config, self.model) {
            (Some(path), _) => ModelSpec::load(path)?,
            (None, Some(name)) => self.spec_from_flags(name)?,
            (None, None) => return Err(AppError::config("give --model or --config")),
        };
        if self.config.is_some() {
            for (name, value) in self.overrides() {
                if let Some(x) = value {
                    spec.set_param(name, x)?;
                }
            }
        }
        Ok(spec)
    }

    fn spec_from_flags(&self, name: ModelName) -> AppResult<ModelSpec> {
        let need =
            |value: Option<f64>, flag: &str| value.ok_or_else(|| AppError::config(format!("--{flag} is required")));
        let omega0 = self.omega0.unwrap_or(1.0);
        let spec = match name {
            ModelName::SchwingerRabi | ModelName::Dual => {
                let (theta, omega) = (need(self.theta, "theta")?, need(self.omega, "omega")?);
                if matches!(name, ModelName::Dual) {
                    ModelSpec::Dual { omega0, theta, omega }
                } else {
                    ModelSpec::SchwingerRabi { omega0, theta, omega }
                }
            }
            ModelName::TwoTone => ModelSpec::TwoTone {
                omega0,
                v: need(self.v, "v")?,
                v_prime: self.v_prime.unwrap_or(0.0),
                omega: need(self.omega, "omega")?,
                n_tone: self.n_tone.ok_or_else(|| AppError::config("--n-tone is required"))?,
                truncated: self.truncated,
            },
        };
        if self.truncated && !matches!(spec, ModelSpec::TwoTone { .. }) {
            return Err(AppError::config("--truncated applies to the two-tone model only"));
        }
        Ok(spec)
    }
}

#[derive(Args)]
struct IntegratorArgs {
    /// Integrator steps per period.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeName>,
    /// Largest accepted |U†U - I|.
    #[arg(long = "unitarity-tol")]
    unitarity_tol: Option<f64>,
}

impl IntegratorArgs {
    fn apply(&self, mut base: IntegratorSettings) -> IntegratorSettings {
        if let Some(steps) = self.steps {
            base.steps_per_period = steps;
        }
        if let Some(scheme) = self.scheme {
            base.scheme = scheme;
        }
        if let Some(tol) = self.unitarity_tol {
            base.unitarity_tol = tol;
        }
        base
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    integrator: IntegratorArgs,
    #[arg(long = "delta-t", default_value_t = 0.05)]
    delta_t: f64,
    #[arg(long = "profile-samples", default_value_t = DEFAULT_PROFILE_SAMPLES)]
    profile_samples: usize,
    #[arg(long = "degeneracy-tol", default_value_t = DEGENERACY_TOL)]
    degeneracy_tol: f64,
    /// Start of the analyzed period.
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    /// Print the JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Write the JSON report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    integrator: IntegratorArgs,
    #[arg(long, default_value_t = 20.0)]
    periods: f64,
    /// Record every n-th integrator step.
    #[arg(long, default_value_t = 16)]
    stride: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep description.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Fig1Args {
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.05, 0.1, 0.2])]
    thetas: Vec<f64>,
    #[arg(long = "omega0", default_value_t = 1.0)]
    omega0: f64,
    /// Lower end of omega/omega0.
    #[arg(long = "omega-min", default_value_t = 0.1)]
    omega_min: f64,
    #[arg(long = "omega-max", default_value_t = 3.0)]
    omega_max: f64,
    #[arg(long, default_value_t = 256)]
    points: usize,
    #[arg(long = "inset-min", default_value_t = 0.8)]
    inset_min: f64,
    #[arg(long = "inset-max", default_value_t = 1.2)]
    inset_max: f64,
    #[arg(long = "inset-points", default_value_t = 129)]
    inset_points: usize,
    #[arg(long = "no-inset")]
    no_inset: bool,
    #[arg(long = "resonance-orders", default_value_t = floquet_qa::oracle::DEFAULT_RESONANCE_ORDERS)]
    resonance_orders: u32,
    #[command(flatten)]
    integrator: IntegratorArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Fig2Args {
    #[arg(long = "theta-points", default_value_t = 200)]
    theta_points: usize,
    #[arg(long = "omega-points", default_value_t = 200)]
    omega_points: usize,
    #[arg(long = "theta-min", default_value_t = 0.0)]
    theta_min: f64,
    #[arg(long = "theta-max", default_value_t = FRAC_PI_2)]
    theta_max: f64,
    /// Lower end of omega/omega0.
    #[arg(long = "omega-min", default_value_t = 0.01)]
    omega_min: f64,
    #[arg(long = "omega-max", default_value_t = 3.0)]
    omega_max: f64,
    #[arg(long = "delta-t", default_value_t = 0.05)]
    delta_t: f64,
    #[command(flatten)]
    integrator: IntegratorArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CounterexampleArgs {
    #[command(flatten)]
    integrator: IntegratorArgs,
    #[arg(long, default_value_t = 20.0)]
    periods: f64,
    #[arg(long = "delta-t", default_value_t = 0.05)]
    delta_t: f64,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Criteria to run, e.g. `--only 1,5,6`.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(command: Command) -> AppResult<ExitCode> {
    match command {
        Command::Analyze(args) => analyze(args)?,
        Command::Evolve(args) => evolve(args)?,
        Command::Sweep(args) => {
            let spec = SweepSpec::load(&args.config)?;
            let result = sweep::run_sweep(&spec)?;
            emit_table(&result.table, &result.metadata, args.out.as_deref())?;
        }
        Command::Fig1(args) => fig1(args)?,
        Command::Fig2(args) => fig2(args)?,
        Command::Counterexamples(args) => counterexamples(args)?,
        Command::Verify(args) => return verify_all(&args.only),
    }
    Ok(ExitCode::SUCCESS)
}

/// CSV to `out` (with its metadata sidecar) or to stdout.
fn emit_table(table: &Table, meta: &Metadata, out: Option<&Path>) -> AppResult<()> {
    match out {
        Some(path) => output::write_table(path, table, meta),
        None => print_stdout(&table.to_csv()?),
    }
}

fn print_stdout(text: &str) -> AppResult<()> {
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(text.as_bytes())
        .and_then(|()| stdout.flush())
        .map_err(|source| AppError::Io { path: PathBuf::from("<stdout>"), source })
}

/// Summary as JSON to `<out>.summary.json` and as text on stderr.
fn emit_summary<T: Serialize>(summary: &T, out: Option<&Path>) -> AppResult<()> {
    let text = serde_json::to_string_pretty(summary)?;
    if let Some(path) = out {
        let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".summary.json");
        output::write_text(&path.with_file_name(name), &(text.clone() + "\n"))?;
    }
    eprintln!("{text}");
    Ok(())
}

fn analyze(args: AnalyzeArgs) -> AppResult<()> {
    let spec = args.model.spec()?;
    let settings = args.integrator.apply(IntegratorSettings::default());
    let opts = AnalysisOptions {
        integrator: settings.to_config()?,
        threshold: Threshold::new(args.delta_t)?,
        profile_samples: args.profile_samples,
        degeneracy_tol: args.degeneracy_tol,
    };
    let h = spec.build(&opts.integrator)?;
    let r = analyze_with(&h, args.t0, &opts).map_err(|e| AppError::at(h.label(), e))?;
    let json = serde_json::to_string_pretty(&report::to_json(&spec, &r, settings))? + "\n";
    if let Some(path) = &args.out {
        output::write_text(path, &json)?;
    }
    if args.json {
        print_stdout(&json)
    } else {
        print_stdout(&report::to_text(&r))
    }
}

fn evolve(args: EvolveArgs) -> AppResult<()> {
    let spec = args.model.spec()?;
    let settings = args.integrator.apply(IntegratorSettings::default());
    let table = experiments::evolve_table(&spec, args.periods, &settings.to_config()?, args.stride)?;
    let meta = Metadata::new(
        json!({ "command": "evolve", "model": spec, "integrator": settings, "periods": args.periods, "stride": args.stride }),
        table.rows.len(),
    );
    emit_table(&table, &meta, args.out.as_deref())
}

fn fig1(args: Fig1Args) -> AppResult<()> {
    let defaults = Fig1Options::default();
    let opts = Fig1Options {
        omega0: args.omega0,
        thetas: args.thetas,
        omega: Axis::linear("omega", args.omega_min, args.omega_max, args.points),
        inset: (!args.no_inset).then(|| Axis::linear("omega", args.inset_min, args.inset_max, args.inset_points)),
        resonance_orders: args.resonance_orders,
        integrator: args.integrator.apply(defaults.integrator),
        ..defaults
    };
    let result = experiments::fig1(&opts)?;
    emit_table(&result.table, &result.metadata, args.out.as_deref())?;
    emit_summary(&result.summary, args.out.as_deref())
}

fn fig2(args: Fig2Args) -> AppResult<()> {
    let defaults = Fig2Options::default();
    let opts = Fig2Options {
        theta: Axis::linear("theta", args.theta_min, args.theta_max, args.theta_points),
        omega: Axis::linear("omega", args.omega_min, args.omega_max, args.omega_points),
        delta_t: args.delta_t,
        integrator: args.integrator.apply(defaults.integrator),
        ..defaults
    };
    let result = experiments::fig2(&opts)?;
    emit_table(&result.table, &result.metadata, args.out.as_deref())?;
    emit_summary(&result.counts, args.out.as_deref())
}

fn counterexamples(args: CounterexampleArgs) -> AppResult<()> {
    let settings = args.integrator.apply(IntegratorSettings::default());
    let rows = experiments::counterexamples(&settings.to_config()?, Threshold::new(args.delta_t)?, args.periods)?;
    let table = experiments::counterexample_table(&rows);
    if args.json {
        print_stdout(&(serde_json::to_string_pretty(&table.to_json_rows())? + "\n"))?;
    } else {
        let mut text = String::new();
        for r in &rows {
            text.push_str(&format!(
                "{} (omega0={}, theta={:.6}, omega={})\n{}  min overlap     {:.6} (closed form {:.6})\n  exact criterion {:.6}  {}\n\n",
                r.name,
                r.params.omega0,
                r.params.theta,
                r.params.omega,
                report::to_text(&r.report),
                r.min_overlap,
                r.min_overlap_oracle,
                r.exact_criterion,
                if r.exact_adiabatic { "adiabatic" } else { "not adiabatic" },
            ));
        }
        print_stdout(&text)?;
    }
    if let Some(path) = &args.out {
        let meta = Metadata::new(
            json!({ "command": "counterexamples", "integrator": settings, "periods": args.periods, "delta_t": args.delta_t }),
            table.rows.len(),
        );
        output::write_table(path, &table, &meta)?;
    }
    Ok(())
}

fn verify_all(only: &[u8]) -> AppResult<ExitCode> {
    verify::check_ids(only)?;
    let records = verify::run_all(only, |r| {
        println!("{}", r.line());
        for note in &r.notes {
            println!("      note: {note}");
        }
    });
    let failed = records.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed", records.len() - failed, records.len());
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(3) })
}
