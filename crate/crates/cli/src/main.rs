//! `hbar-lpt`: energy series, renormalized sums, numerical levels, the
//! benchmark table and the self-check suite from the command line.

mod output;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hbar_lpt::renorm::default_interval;
use hbar_lpt::scalar::parse_rational;
use hbar_lpt::table::{converged_checks, low_order_checks};
use hbar_lpt::{
    compute_table, optimize_sequence, parallel, parse_config, raw_energy, solve_eigenvalue,
    Backend, BigFloat, Check, DifferenceTarget, EnergySeries, Error, Execution, GridConfig, Param,
    PotentialSpec, Precision, QuantumState, Rational, RenormConfig, Scalar, ScalarConfig, Scheme,
    Suite, TableConfig,
};

use output::{Cell, Format, Rows};

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_NO_ROOT: u8 = 4;
const EXIT_CHECKS: u8 = 5;

#[derive(Parser)]
#[command(
    name = "hbar-lpt",
    version,
    about = "Logarithmic perturbation theory for the spherical anharmonic oscillator"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Print every digit of the working precision instead of six decimals.
    #[arg(long, global = true)]
    full_precision: bool,
    /// Cap on worker threads.
    #[arg(long, env = "HBAR_LPT_THREADS", global = true)]
    threads: Option<usize>,
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Unrenormalized corrections E_1..E_K and their partial sums.
    Series(SeriesArgs),
    /// Partial sums with the trial frequency optimized order by order.
    Renorm(RenormArgs),
    /// Eigenvalue from direct numerical integration.
    Numerov(NumerovArgs),
    /// Reproduce the benchmark table for r²/2 + λr⁴ + λr⁶.
    Table1(TableArgs),
    /// Run the self-check suite.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct SystemArgs {
    /// JSON configuration file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    mass: Option<String>,
    /// Harmonic frequency ω in ω²r²/2 terms.
    #[arg(long)]
    omega: Option<String>,
    /// r⁴ coefficient.
    #[arg(long, conflicts_with = "coefficients")]
    lambda: Option<String>,
    /// r⁶ coefficient.
    #[arg(long, conflicts_with = "coefficients")]
    mu: Option<String>,
    /// Coefficients of r⁴, r⁶, r⁸, ...
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    coefficients: Option<Vec<String>>,
    /// Radial quantum number (number of nodes).
    #[arg(short, long)]
    n: Option<u32>,
    /// Angular momentum.
    #[arg(short, long)]
    l: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Rational,
    Float,
}

#[derive(Args)]
struct SeriesArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Number of corrections.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Significant digits for the float backend; 15 or fewer uses doubles.
    #[arg(long)]
    digits: Option<u32>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Sensitivity,
    Difference,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Correction,
    Sum,
}

#[derive(Args)]
struct RenormArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Orders to optimize.
    #[arg(long, value_delimiter = ',')]
    order: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "sensitivity")]
    scheme: SchemeArg,
    /// Quantity set to zero by the difference scheme.
    #[arg(long, value_enum, default_value = "correction")]
    target: TargetArg,
    /// Trial-frequency interval as `a:b`.
    #[arg(long)]
    search: Option<String>,
    #[arg(long, default_value_t = 2000)]
    grid_points: usize,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    #[arg(long)]
    digits: Option<u32>,
    /// List every candidate root, not only the selected one.
    #[arg(long)]
    all_roots: bool,
}

#[derive(Args)]
struct NumerovArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Box radius; sized from the potential by default.
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long, default_value_t = GridConfig::DEFAULT_STEPS)]
    steps: usize,
    /// Energy window as `a:b` holding only the wanted state.
    #[arg(long)]
    bracket: Option<String>,
    #[arg(long, default_value_t = GridConfig::DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, default_value_t = 40)]
    max_order: usize,
    #[arg(long, default_value_t = ScalarConfig::DEFAULT_DIGITS)]
    digits: u32,
    #[arg(long, default_value_t = 2000)]
    grid_points: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Fewer states and sample points.
    #[arg(long)]
    quick: bool,
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::InvalidPotential(_)
            | Error::Config(_)
            | Error::InvalidArgument(_)
            | Error::SingularFrequency
            | Error::Backend(_) => EXIT_CONFIG,
            Error::NoRoot { .. } | Error::NoEigenvalue { .. } => EXIT_NO_ROOT,
            Error::Numerical(_) => EXIT_NUMERICAL,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Failure {
            code: EXIT_NUMERICAL,
            message: format!("output error: {err}"),
        }
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

fn param(text: &str, what: &str) -> Result<Param, Failure> {
    if let Some(exact) = parse_rational(text) {
        return Ok(Param::Exact(exact));
    }
    text.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Param::Approx)
        .ok_or_else(|| config_error(format!("cannot read {what} from `{text}`")))
}

fn interval(text: &str, what: &str) -> Result<(f64, f64), Failure> {
    let parsed = text
        .split_once(':')
        .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
    parsed.ok_or_else(|| config_error(format!("{what} must look like `a:b`, got `{text}`")))
}

/// The physical system plus whatever else the config file set.
struct System {
    potential: PotentialSpec,
    state: QuantumState,
    order: Option<usize>,
    scalar: Option<ScalarConfig>,
}

impl SystemArgs {
    fn resolve(&self) -> Result<System, Failure> {
        let base = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
                Some(parse_config(&text)?)
            }
            None => None,
        };
        let from_base = |f: fn(&PotentialSpec) -> Param, default: Param| {
            base.as_ref().map_or(default, |b| f(&b.potential))
        };
        let mass = match &self.mass {
            Some(t) => param(t, "mass")?,
            None => from_base(|p| p.mass().clone(), Param::int(1)),
        };
        let omega = match &self.omega {
            Some(t) => param(t, "omega")?,
            None => from_base(|p| p.omega().clone(), Param::int(1)),
        };
        let mut anharmonic = base
            .as_ref()
            .map_or_else(Vec::new, |b| b.potential.anharmonic().to_vec());
        if let Some(list) = &self.coefficients {
            anharmonic = list
                .iter()
                .map(|t| param(t, "coefficient"))
                .collect::<Result<_, _>>()?;
        }
        for (slot, text) in [(0, &self.lambda), (1, &self.mu)] {
            if let Some(t) = text {
                if anharmonic.len() <= slot {
                    anharmonic.resize(slot + 1, Param::int(0));
                }
                anharmonic[slot] = param(t, "coefficient")?;
            }
        }
        while anharmonic.last().is_some_and(Param::is_zero) {
            anharmonic.pop();
        }
        let potential = PotentialSpec::new(mass, omega, anharmonic)?;
        let base_state = base.as_ref().map_or(QuantumState::GROUND, |b| b.state);
        let state = QuantumState::new(
            self.n.unwrap_or(base_state.n),
            self.l.unwrap_or(base_state.l),
        );
        Ok(System {
            potential,
            state,
            order: base.as_ref().and_then(|b| b.order),
            scalar: base.as_ref().map(|b| b.scalar),
        })
    }
}

fn scalar_config(
    backend: Option<BackendArg>,
    digits: Option<u32>,
    from_file: Option<ScalarConfig>,
) -> Result<ScalarConfig, Failure> {
    let base = from_file.unwrap_or_default();
    let digits = digits.unwrap_or(base.digits);
    let config = match backend {
        Some(BackendArg::Rational) => ScalarConfig::rational(),
        Some(BackendArg::Float) => ScalarConfig::float(digits)?,
        None if base.backend == Backend::Rational => ScalarConfig::rational(),
        None => ScalarConfig::float(digits)?,
    };
    Ok(config)
}

fn series_rows<S: Scalar>(series: &EnergySeries<S>) -> Rows {
    let mut rows = Rows::new(vec!["k", "correction", "partial_sum"]);
    for (k, (term, sum)) in series
        .corrections()
        .iter()
        .zip(series.partial_sums())
        .enumerate()
    {
        rows.push(vec![
            Cell::Int(k as i64 + 1),
            Cell::Fixed(term.to_f64(), Some(term.render())),
            Cell::Fixed(sum.to_f64(), Some(sum.render())),
        ]);
    }
    rows
}

/// Magnitudes of the last correction and the one at half the order.
fn growth<S: Scalar>(series: &EnergySeries<S>) -> Option<(usize, f64, f64)> {
    let order = series.order();
    if order < 4 {
        return None;
    }
    let half = order / 2;
    let last = series.corrections()[order - 1].to_f64().abs();
    let mid = series.corrections()[half - 1].to_f64().abs();
    (last > mid).then_some((half, last, mid))
}

fn cmd_series(args: &SeriesArgs, cli: &Cli) -> Result<(), Failure> {
    let system = args.system.resolve()?;
    let order = args.order.or(system.order).unwrap_or(10);
    let scalar = scalar_config(args.backend, args.digits, system.scalar)?;
    scalar.check_potential(&system.potential)?;
    let (rows, growth) = match scalar.backend {
        Backend::Rational => {
            let series = raw_energy::<Rational>(&system.potential, system.state, order, &())?;
            (series_rows(&series), growth(&series))
        }
        Backend::Float if scalar.uses_hardware_float() => {
            let series = raw_energy::<f64>(&system.potential, system.state, order, &())?;
            (series_rows(&series), growth(&series))
        }
        Backend::Float => {
            let ctx = Precision::from_digits(scalar.digits);
            let series = raw_energy::<BigFloat>(&system.potential, system.state, order, &ctx)?;
            (series_rows(&series), growth(&series))
        }
    };
    if let Some((half, last, mid)) = growth {
        eprintln!(
            "warning: |E_{order}| = {last:.3e} exceeds |E_{half}| = {mid:.3e}; the series is diverging, see `renorm`"
        );
    }
    emit(&rows, cli)
}

fn cmd_renorm(args: &RenormArgs, cli: &Cli, execution: Execution) -> Result<(), Failure> {
    let system = args.system.resolve()?;
    let orders = args
        .order
        .clone()
        .or(system.order.map(|o| vec![o]))
        .unwrap_or_else(|| vec![10]);
    let scalar = scalar_config(args.backend, args.digits, system.scalar)?;
    if scalar.backend == Backend::Rational {
        return Err(config_error(
            "the rational backend cannot optimize the trial frequency; its stationary points are irrational",
        ));
    }
    let config = RenormConfig {
        scheme: match args.scheme {
            SchemeArg::Sensitivity => Scheme::MinimalSensitivity,
            SchemeArg::Difference => Scheme::MinimalDifference,
        },
        difference_target: match args.target {
            TargetArg::Correction => DifferenceTarget::LastCorrection,
            TargetArg::Sum => DifferenceTarget::PartialSum,
        },
        search: args
            .search
            .as_deref()
            .map(|s| interval(s, "--search"))
            .transpose()?,
        grid_points: args.grid_points,
        digits: scalar.digits,
        execution,
        ..RenormConfig::default()
    };
    if system.potential.omega().is_zero() {
        let (a, b) = config
            .search
            .unwrap_or_else(|| default_interval(&system.potential));
        eprintln!("note: no harmonic term; renormalizing around a pure anharmonic potential, searching [{a}, {b}]");
    }
    let results = optimize_sequence(&system.potential, system.state, &orders, &config)?;
    let mut rows = if args.all_roots {
        Rows::new(vec!["order", "omega0", "partial_sum", "score", "selected"])
    } else {
        Rows::new(vec![
            "order",
            "omega0",
            "partial_sum",
            "derivative",
            "curvature",
            "candidates",
        ])
    };
    for (order, result) in orders.iter().zip(results) {
        let r = result?;
        if args.all_roots {
            for c in &r.all_roots {
                rows.push(vec![
                    Cell::Int(*order as i64),
                    Cell::fixed(c.omega0),
                    Cell::fixed(c.partial_sum),
                    Cell::Sci(c.score),
                    Cell::Bool(c.omega0 == r.omega0),
                ]);
            }
        } else {
            rows.push(vec![
                Cell::Int(*order as i64),
                Cell::fixed(r.omega0),
                Cell::Fixed(r.partial_sum, Some(r.partial_sum_text.clone())),
                Cell::Sci(r.derivative),
                Cell::Sci(r.curvature),
                Cell::Int(r.all_roots.len() as i64),
            ]);
        }
    }
    emit(&rows, cli)
}

fn cmd_numerov(args: &NumerovArgs, cli: &Cli) -> Result<(), Failure> {
    let system = args.system.resolve()?;
    let mut grid = match args.r_max {
        Some(r_max) => GridConfig::new(r_max, args.steps)?,
        None => GridConfig {
            steps: args.steps,
            ..GridConfig::auto(&system.potential, system.state)?
        },
    };
    grid.bracket = args
        .bracket
        .as_deref()
        .map(|s| interval(s, "--bracket"))
        .transpose()?;
    grid.tolerance = args.tolerance;
    let level = solve_eigenvalue(&system.potential, system.state, &grid)?;
    let mut rows = Rows::new(vec!["n", "l", "energy", "r_max", "step"]);
    rows.push(vec![
        Cell::Int(system.state.n as i64),
        Cell::Int(system.state.l as i64),
        Cell::Fixed(level.energy, Some(format!("{:e}", level.energy))),
        Cell::fixed(level.r_max),
        Cell::Sci(level.step),
    ]);
    emit(&rows, cli)
}

fn cmd_table1(args: &TableArgs, cli: &Cli, execution: Execution) -> Result<(), Failure> {
    let config = TableConfig {
        max_order: args.max_order,
        renorm: RenormConfig {
            digits: args.digits,
            grid_points: args.grid_points,
            execution,
            ..RenormConfig::default()
        },
        execution,
    };
    let report = compute_table(&config)?;
    let mut rows = Rows::new(vec![
        "row", "n", "l", "lambda", "omega0", "ours", "paper", "delta",
    ]);
    for col in &report.columns {
        let lambda: f64 = col.column.coupling.parse().expect("coupling literal");
        let base = |row: Cell| {
            vec![
                row,
                Cell::Int(col.column.state.n as i64),
                Cell::Int(col.column.state.l as i64),
                Cell::fixed(lambda),
            ]
        };
        for cell in &col.cells {
            let mut row = base(Cell::Int(cell.order as i64));
            row.push(Cell::maybe(cell.omega0));
            row.push(
                cell.value
                    .map_or(Cell::Empty, |v| Cell::Fixed(v, cell.text.clone())),
            );
            row.push(Cell::maybe(cell.published));
            row.push(match (cell.value, cell.published) {
                (Some(v), Some(p)) => Cell::Sci(v - p),
                _ => Cell::Empty,
            });
            rows.push(row);
            if let Some(err) = &cell.error {
                eprintln!("N={} {}: {err}", cell.order, col.column.state);
            }
        }
        let mut row = base(Cell::Text("E_num".into()));
        row.push(Cell::Empty);
        row.push(Cell::maybe(col.numerical));
        row.push(Cell::fixed(col.column.published_numerical));
        row.push(col.numerical.map_or(Cell::Empty, |v| {
            Cell::Sci(v - col.column.published_numerical)
        }));
        rows.push(row);
        if let Some(err) = &col.numerical_error {
            eprintln!("E_num {}: {err}", col.column.state);
        }
    }
    emit(&rows, cli)?;

    let mut checks = Vec::new();
    if report.orders.last() == Some(&40) {
        checks.extend(converged_checks(&report, 2e-3, 2e-5));
    }
    let low: Vec<usize> = [2, 5]
        .into_iter()
        .filter(|o| report.orders.contains(o))
        .collect();
    let monotone: Vec<usize> = [2, 10, 40]
        .into_iter()
        .filter(|o| report.orders.contains(o))
        .collect();
    checks.extend(low_order_checks(&report, &low, 1e-2, &monotone));
    finish_checks(&checks)
}

fn finish_checks(checks: &[Check]) -> Result<(), Failure> {
    for check in checks {
        eprintln!("{check}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(Failure {
            code: EXIT_CHECKS,
            message: format!("{failed} of {} checks failed", checks.len()),
        });
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, cli: &Cli) -> Result<(), Failure> {
    let suite = Suite {
        quick: args.quick,
        ..Suite::default()
    };
    let checks = suite.run();
    let mut rows = Rows::new(vec!["check", "passed", "detail", "seconds"]);
    for check in &checks {
        rows.push(vec![
            Cell::Text(check.name.clone()),
            Cell::Bool(check.passed),
            Cell::Text(check.detail.clone()),
            Cell::Sci(check.elapsed.as_secs_f64()),
        ]);
    }
    emit(&rows, cli)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(Failure {
            code: EXIT_CHECKS,
            message: format!("{failed} of {} checks failed", checks.len()),
        });
    }
    Ok(())
}

fn emit(rows: &Rows, cli: &Cli) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    output::write(&mut out, rows, cli.format, cli.full_precision)?;
    out.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(config_error("thread cap must be at least 1"));
        }
        parallel::set_worker_limit(threads);
    }
    let execution = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match &cli.command {
        Command::Series(args) => cmd_series(args, cli),
        Command::Renorm(args) => cmd_renorm(args, cli, execution),
        Command::Numerov(args) => cmd_numerov(args, cli),
        Command::Table1(args) => cmd_table1(args, cli, execution),
        Command::Verify(args) => cmd_verify(args, cli),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
