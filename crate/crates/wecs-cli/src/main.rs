//! `wecs`: batch front end for the simulation core. Subcommands cover
//! coefficient fitting, curve tabulation, voltage setpoints, a PWM inverter
//! demo, THD analysis of CSV traces, scenario simulation, and equilibrium
//! solving. Exit codes: 0 success, 1 validation/configuration error (the
//! message names the offending key or path), 2 numerical failure.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use wecs_core::converter::{simulate_rl_load, DcLink, PwmConfig, RlLoad};
use wecs_core::scenario::Scenario;
use wecs_core::setpoint::{preset_voltage, RatedPoint, VoltageLaw};
use wecs_core::sim::{find_equilibrium, integrate};
use wecs_core::thd::harmonic_analysis;
use wecs_core::turbine::fit_coefficients;
use wecs_core::{electromagnetic_torque, TimeSeries};

#[derive(Parser)]
#[command(
    name = "wecs",
    version,
    about = "Wind energy conversion system simulator",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the turbine performance-curve coefficients for a design point
    Fit(FitArgs),
    /// Tabulate cp(lambda) and cm(lambda) as CSV
    Curve(CurveArgs),
    /// Stator voltage setpoint for a commanded frequency
    Setpoint(SetpointArgs),
    /// Simulate the PWM inverter into an RL load and report THD
    InverterDemo(InverterDemoArgs),
    /// Total harmonic distortion of one column of a CSV trace
    Thd(ThdArgs),
    /// Run scenario files and write their traces as CSV
    Simulate(SimulateArgs),
    /// Solve a scenario's steady state without running it
    Equilibrium(EquilibriumArgs),
}

#[derive(Args)]
struct FitShape {
    /// Design tip-speed ratio (where cp peaks)
    #[arg(long)]
    lambda0: f64,
    /// First fit exponent
    #[arg(long, default_value_t = 2.25)]
    alpha: f64,
    /// Second fit exponent
    #[arg(long, default_value_t = 2.55)]
    beta: f64,
    /// Drop the starting-torque term (faster designs)
    #[arg(long)]
    simplified: bool,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    shape: FitShape,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    shape: FitShape,
    /// Largest tip-speed ratio to tabulate
    #[arg(long)]
    lambda_max: f64,
    /// Number of rows (including both endpoints)
    #[arg(long)]
    samples: usize,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SetpointArgs {
    /// Voltage law: torque-ratio, quadratic, or linear
    #[arg(long)]
    law: VoltageLaw,
    /// Rated voltage [V]
    #[arg(long)]
    un: f64,
    /// Rated frequency [Hz]
    #[arg(long = "fn")]
    f_n: f64,
    /// Commanded frequency [Hz]
    #[arg(long)]
    f: f64,
    /// Torque demand as a fraction of rated (torque-ratio law only)
    #[arg(long)]
    torque_ratio: Option<f64>,
}

#[derive(Args)]
struct InverterDemoArgs {
    /// DC link voltage [V]
    #[arg(long)]
    vcc: f64,
    /// Carrier frequency [Hz]
    #[arg(long, default_value_t = 3000.0)]
    fc: f64,
    /// Reference (fundamental) frequency [Hz]
    #[arg(long, default_value_t = 60.0)]
    f0: f64,
    /// Amplitude modulation index in (0, 1]
    #[arg(long, default_value_t = 0.9)]
    ma: f64,
    /// Load resistance per phase [ohm]
    #[arg(long)]
    load_r: f64,
    /// Load inductance per phase [H]
    #[arg(long)]
    load_l: f64,
    /// Output CSV path for the waveforms
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ThdArgs {
    /// CSV file with a `t` column and named channels
    #[arg(long)]
    input: PathBuf,
    /// Channel (column) to analyse
    #[arg(long)]
    column: String,
    /// Fundamental frequency [Hz]
    #[arg(long)]
    f0: f64,
    /// Highest harmonic order to include
    #[arg(long, default_value_t = wecs_core::thd::DEFAULT_MAX_HARMONIC)]
    max_harmonic: usize,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario TOML file (repeat to run several)
    #[arg(long, required = true, num_args = 1)]
    scenario: Vec<PathBuf>,
    /// Directory for the output CSV files (one per scenario, named after it)
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Print each scenario back as TOML (with defaults filled in) and exit
    /// without simulating
    #[arg(long)]
    dump_config: bool,
    /// Run up to N scenarios concurrently
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct EquilibriumArgs {
    /// Scenario TOML file
    #[arg(long)]
    scenario: PathBuf,
}

/// Failure carrying its process exit code: 1 for validation/configuration
/// problems, 2 for numerical ones.
struct Failure {
    message: String,
    code: i32,
}

impl Failure {
    fn validation(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            code: 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<wecs_core::Error> for Failure {
    fn from(e: wecs_core::Error) -> Self {
        Failure {
            code: if e.is_numerical() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::validation(format!("cannot read {}: {e}", path.display())))
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    let text = read_file(path)?;
    Scenario::from_toml_str(&text)
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("WECS_LOG", "warn"))
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version displays are successful outcomes; anything
            // else is a configuration error.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(failure) = run(cli.command) {
        eprintln!("error: {failure}");
        std::process::exit(failure.code);
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Fit(args) => run_fit(args),
        Command::Curve(args) => run_curve(args),
        Command::Setpoint(args) => run_setpoint(args),
        Command::InverterDemo(args) => run_inverter_demo(args),
        Command::Thd(args) => run_thd(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Equilibrium(args) => run_equilibrium(args),
    }
}

fn run_fit(args: FitArgs) -> Result<(), Failure> {
    let s = &args.shape;
    let c = fit_coefficients(s.lambda0, s.alpha, s.beta, s.simplified)?;
    println!("coefficient  value");
    println!("lambda0      {}", c.lambda0);
    println!("alpha        {}", c.alpha);
    println!("beta         {}", c.beta);
    println!("cp_max       {}", c.cp_max);
    println!("c_m0         {}", c.c_m0);
    println!("a            {}", c.a);
    println!("b            {}", c.b);
    println!(
        "fit: lambda0={} cp_max={:.6} a={:.6} b={:.6} c_m0={:.7} ({})",
        c.lambda0,
        c.cp_max,
        c.a,
        c.b,
        c.c_m0,
        if s.simplified { "simplified" } else { "full" }
    );
    Ok(())
}

fn run_curve(args: CurveArgs) -> Result<(), Failure> {
    let s = &args.shape;
    let c = fit_coefficients(s.lambda0, s.alpha, s.beta, s.simplified)?;
    if !(args.lambda_max.is_finite() && args.lambda_max > 0.0) {
        return Err(Failure::validation(format!(
            "lambda_max: must be positive, got {}",
            args.lambda_max
        )));
    }
    if args.samples < 2 {
        return Err(Failure::validation(format!(
            "samples: need at least 2 to span [0, lambda_max], got {}",
            args.samples
        )));
    }

    let mut csv = String::from("lambda,cp,cm\n");
    let mut first_negative = None;
    for i in 0..args.samples {
        let lambda = args.lambda_max * i as f64 / (args.samples - 1) as f64;
        let cp = c.cp(lambda)?;
        let cm = c.cm(lambda)?;
        if cp < 0.0 && first_negative.is_none() {
            first_negative = Some(lambda);
        }
        csv.push_str(&format!("{lambda},{cp},{cm}\n"));
    }
    match &args.out {
        Some(path) => {
            fs::write(path, &csv).map_err(|e| {
                Failure::validation(format!("cannot write {}: {e}", path.display()))
            })?;
            println!(
                "curve: {} samples on [0, {}] -> {}{}",
                args.samples,
                args.lambda_max,
                path.display(),
                negative_note(first_negative)
            );
        }
        None => {
            print!("{csv}");
            eprintln!(
                "curve: {} samples on [0, {}]{}",
                args.samples,
                args.lambda_max,
                negative_note(first_negative)
            );
        }
    }
    Ok(())
}

fn negative_note(first_negative: Option<f64>) -> String {
    match first_negative {
        Some(lambda) => format!(" (cp turns negative from lambda = {lambda:.4}: braking region)"),
        None => String::new(),
    }
}

fn run_setpoint(args: SetpointArgs) -> Result<(), Failure> {
    // The torque-ratio law consumes the demand as a ratio directly, so the
    // rated torque itself never enters; any positive placeholder works.
    let rated = RatedPoint::new(args.un, args.f_n, 1.0)?;
    let u = preset_voltage(&rated, args.law, args.f, args.torque_ratio)?;
    println!(
        "setpoint: law={} f={} Hz -> U={} V (U_N={} V, f_N={} Hz)",
        args.law, args.f, u, args.un, args.f_n
    );
    Ok(())
}

fn run_inverter_demo(args: InverterDemoArgs) -> Result<(), Failure> {
    let dc = DcLink::new(args.vcc)?;
    let cfg = PwmConfig::new(args.fc, args.f0, args.ma)?;
    let load = RlLoad::new(args.load_r, args.load_l)?;

    // Choose dt as an exact submultiple of the fundamental period so whole
    // periods land on the sample grid, and run five settle periods plus a
    // ten-period analysis window.
    let steps_per_period = ((200.0 * args.fc) / args.f0).ceil() as usize;
    let dt = 1.0 / (args.f0 * steps_per_period as f64);
    let settle_periods = 5usize;
    let window_periods = 10usize;
    let total_periods = settle_periods + window_periods;
    let duration = total_periods as f64 / args.f0;

    let series = simulate_rl_load(&dc, &cfg, &load, duration, dt)?;
    write_csv(&series, &args.out)?;

    // DFT windows count n samples as spanning n·dt, so a whole-period
    // window excludes the sample that would duplicate its start phase.
    let window = window_periods * steps_per_period;
    let current = series
        .channel("i_a")
        .expect("simulate_rl_load always emits i_a");
    let tail = &current[current.len() - window..];
    let analysis = harmonic_analysis(tail, dt, args.f0, wecs_core::thd::DEFAULT_MAX_HARMONIC)?;
    println!(
        "inverter-demo: Vcc={} V fc={} Hz f0={} Hz ma={} R={} ohm L={} H -> {} \
         | i_a fundamental {:.4} A, THD {:.2}%",
        args.vcc,
        args.fc,
        args.f0,
        args.ma,
        args.load_r,
        args.load_l,
        args.out.display(),
        analysis.fundamental_amplitude,
        analysis.thd_percent,
    );
    Ok(())
}

fn run_thd(args: ThdArgs) -> Result<(), Failure> {
    let (t, samples) = read_csv_column(&args.input, &args.column)?;
    if t.len() < 2 {
        return Err(Failure::validation(format!(
            "{}: need at least two rows to infer the sample interval",
            args.input.display()
        )));
    }
    let dt = t[1] - t[0];
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Failure::validation(format!(
            "{}: time column must increase (first step {dt})",
            args.input.display()
        )));
    }

    // Use the longest whole number of fundamental periods at the end of the
    // trace, where transients have settled. A window of n samples spans
    // n·dt in the DFT sense.
    let span = samples.len() as f64 * dt;
    let mut whole_periods = (span * args.f0 * (1.0 + 1e-12)).floor();
    if whole_periods < 1.0 {
        return Err(Failure::validation(format!(
            "column {}: trace spans {span} s, less than one {} Hz period",
            args.column, args.f0
        )));
    }
    let mut window = (whole_periods / (args.f0 * dt)).round() as usize;
    if window > samples.len() {
        whole_periods -= 1.0;
        window = (whole_periods / (args.f0 * dt)).round() as usize;
    }
    let tail = &samples[samples.len() - window..];

    let analysis = harmonic_analysis(tail, dt, args.f0, args.max_harmonic)?;
    println!(
        "thd: {} column {} at f0={} Hz over {} samples -> fundamental {:.6}, THD {:.4}%",
        args.input.display(),
        args.column,
        args.f0,
        window,
        analysis.fundamental_amplitude,
        analysis.thd_percent,
    );
    Ok(())
}

fn read_csv_column(path: &Path, column: &str) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Failure::validation(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?
        .clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let t_idx = find("t").ok_or_else(|| {
        Failure::validation(format!("{}: no `t` column in header", path.display()))
    })?;
    let col_idx = find(column).ok_or_else(|| {
        Failure::validation(format!(
            "{}: no `{column}` column in header (have: {})",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(", ")
        ))
    })?;

    let mut t = Vec::new();
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
        let parse = |idx: usize, name: &str| -> Result<f64, Failure> {
            record
                .get(idx)
                .ok_or_else(|| {
                    Failure::validation(format!(
                        "{} row {}: missing field {name}",
                        path.display(),
                        row + 2
                    ))
                })?
                .trim()
                .parse::<f64>()
                .map_err(|e| {
                    Failure::validation(format!(
                        "{} row {} column {name}: {e}",
                        path.display(),
                        row + 2
                    ))
                })
        };
        t.push(parse(t_idx, "t")?);
        values.push(parse(col_idx, column)?);
    }
    Ok((t, values))
}

fn write_csv(series: &TimeSeries, path: &Path) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| {
                Failure::validation(format!("cannot create {}: {e}", parent.display()))
            })?;
        }
    }
    let file = fs::File::create(path)
        .map_err(|e| Failure::validation(format!("cannot write {}: {e}", path.display())))?;
    let mut out = std::io::BufWriter::new(file);
    series
        .write_csv(&mut out)
        .and_then(|()| out.flush())
        .map_err(|e| Failure::validation(format!("cannot write {}: {e}", path.display())))
}

fn run_simulate(args: SimulateArgs) -> Result<(), Failure> {
    if args.jobs == 0 {
        return Err(Failure::validation("jobs: must be at least 1"));
    }

    if args.dump_config {
        for path in &args.scenario {
            let scenario = load_scenario(path)?;
            print!("{}", scenario.to_toml_string()?);
        }
        return Ok(());
    }

    // Parse and validate everything up front so a bad file fails the batch
    // before any work starts.
    let mut runs = Vec::new();
    for path in &args.scenario {
        let scenario = load_scenario(path)?;
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| {
                Failure::validation(format!("{}: cannot derive an output name", path.display()))
            })?;
        let out_path = args.out.join(format!("{stem}.csv"));
        runs.push((path.clone(), scenario, out_path));
    }

    let results: Vec<Result<String, Failure>> = if args.jobs <= 1 || runs.len() <= 1 {
        runs.iter().map(run_one_scenario).collect()
    } else {
        let mut results: Vec<Option<Result<String, Failure>>> = Vec::new();
        results.resize_with(runs.len(), || None);
        let next = std::sync::atomic::AtomicUsize::new(0);
        let results_mutex = std::sync::Mutex::new(&mut results);
        std::thread::scope(|scope| {
            for _ in 0..args.jobs.min(runs.len()) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    if i >= runs.len() {
                        break;
                    }
                    let result = run_one_scenario(&runs[i]);
                    results_mutex.lock().unwrap()[i] = Some(result);
                });
            }
        });
        results
            .into_iter()
            .map(|r| r.expect("every run slot is filled"))
            .collect()
    };

    let mut worst = 0;
    for result in results {
        match result {
            Ok(summary) => println!("{summary}"),
            Err(failure) => {
                eprintln!("error: {failure}");
                worst = worst.max(failure.code);
            }
        }
    }
    if worst != 0 {
        std::process::exit(worst);
    }
    Ok(())
}

fn run_one_scenario(
    (path, scenario, out_path): &(PathBuf, Scenario, PathBuf),
) -> Result<String, Failure> {
    let started = Instant::now();
    let series = integrate(scenario).map_err(|e| {
        let mut failure = Failure::from(e);
        failure.message = format!("{}: {}", path.display(), failure.message);
        failure
    })?;
    write_csv(&series, out_path)?;
    let elapsed = started.elapsed();
    Ok(format!(
        "simulate: {} -> {} ({} samples x {} channels over {} s, {:.0} ms)",
        path.display(),
        out_path.display(),
        series.len(),
        series.names().len(),
        scenario.solver.t_end,
        elapsed.as_secs_f64() * 1e3,
    ))
}

fn run_equilibrium(args: EquilibriumArgs) -> Result<(), Failure> {
    let scenario = load_scenario(&args.scenario)?;
    let state = find_equilibrium(&scenario).map_err(|e| {
        let mut failure = Failure::from(e);
        failure.message = format!("{}: {}", args.scenario.display(), failure.message);
        failure
    })?;
    let params = scenario.coupled_params()?;
    let gen = state.generator;
    let m_eg = electromagnetic_torque(&params.generator, &gen);
    let v = scenario.wind.speed_at(0.0);
    let m_ut = params.turbine_torque(v, state.omega_r)?;
    println!(
        "equilibrium: {} -> slip={:.6} omega_r={:.4} rad/s Id={:.4} Iq={:.4} Idr={:.4} \
         Iqr={:.4} A MuT={:.4} MeG={:.4} N.m at v={} m/s",
        args.scenario.display(),
        gen.slip,
        state.omega_r,
        gen.i_d,
        gen.i_q,
        gen.i_dr,
        gen.i_qr,
        m_ut,
        m_eg,
        v,
    );
    Ok(())
}
