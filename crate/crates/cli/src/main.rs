use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chemowave::harness::{
    emit_outputs, run_compare, ExperimentConfig, ExperimentSource, OutputFormat, SweepConfig, SweepResult,
};
use chemowave::layer::CompositeSolution;
use chemowave::microdevice::{Drive, MicrodeviceSpec, Regime as DeviceRegime};
use chemowave::numerics::linspace;
use chemowave::oscillatory::Regime as OscRegime;
use chemowave::pde::Grid;
use chemowave::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Chemotaxis wave analytics and reference solver.
#[derive(Parser)]
#[command(name = "chemowave", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the finite-volume solver and write the snapshots.
    SolvePde(Common),
    /// Evaluate the outer and composite densities at the comparison times.
    SolveAnalytic(Common),
    /// Compare analytic and numeric solutions and write the full output set.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Exit with status 3 when any tolerance is exceeded.
        #[arg(long)]
        enforce: bool,
    },
    /// Sample the front trajectory x*(t).
    Front {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Tabulate an oscillatory-growth regime against the reference integrator.
    Oscillatory {
        #[command(flatten)]
        common: Common,
        /// Override the configured (or auto-selected) regime.
        #[arg(long, value_parser = parse_osc_regime)]
        regime: Option<OscRegime>,
    },
    /// Closed-form microdevice fronts and densities, optionally with the coupled solver.
    Microdevice(DeviceArgs),
    /// Run a parameter sweep over a base experiment.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct DeviceArgs {
    /// JSON microdevice spec; omit to use a built-in scenario.
    #[arg(long, conflicts_with_all = ["regime", "drive"])]
    config: Option<PathBuf>,
    #[arg(long, value_parser = parse_device_regime, default_value = "high_nutrient")]
    regime: DeviceRegime,
    #[arg(long, value_parser = parse_drive, default_value = "steady")]
    drive: Drive,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Also run the coupled solver at t_end.
    #[arg(long)]
    solve: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

fn parse_named<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|e| e.to_string())
}

fn parse_osc_regime(s: &str) -> Result<OscRegime, String> {
    parse_named(s)
}

fn parse_device_regime(s: &str) -> Result<DeviceRegime, String> {
    parse_named(s)
}

fn parse_drive(s: &str) -> Result<Drive, String> {
    parse_named(s)
}

enum Failure {
    Input(Error),
    Numeric(Error),
    Acceptance(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Input(e)
        } else {
            Failure::Numeric(e)
        }
    }
}

type Outcome = Result<(), Failure>;

fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    let cfg = ExperimentConfig::load(path).map_err(Failure::Input)?;
    for w in cfg.validate().map_err(Failure::Input)? {
        eprintln!("warning: {w}");
    }
    Ok(cfg)
}

fn write(dir: &Path, name: &str, text: &str) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| Failure::Numeric(io_error(dir, e)))?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Failure::Numeric(io_error(&path, e)))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Config(format!("{}: {e}", path.display()))
}

fn json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    Ok(serde_json::to_string_pretty(value).map_err(Error::from)? + "\n")
}

fn solve_pde(c: &Common) -> Outcome {
    let cfg = load(&c.config)?;
    let sol = cfg.solve()?;
    let d = &sol.diagnostics;
    println!(
        "{}: {} steps ({} rejected), u in [{:.6e}, {:.6e}]",
        cfg.name, d.steps, d.rejected, d.min_u, d.max_u
    );
    match c.format {
        Format::Csv => write(&c.out, "solution.csv", &sol.to_csv()),
        Format::Json => write(&c.out, "solution.json", &json(&sol)?),
    }
}

fn solve_analytic(c: &Common) -> Outcome {
    let cfg = load(&c.config)?;
    let composite = CompositeSolution::from_outer(cfg.analytic()?);
    let spec = composite.outer().spec();
    let xs = Grid::new(spec.domain.cells, spec.domain.length).centers();
    #[derive(serde::Serialize)]
    struct Snapshot {
        t: f64,
        x: Vec<f64>,
        outer: Vec<f64>,
        composite: Vec<f64>,
    }
    let mut snaps = Vec::new();
    for t in cfg.comparison_times() {
        let outer = xs
            .iter()
            .map(|&x| composite.outer().outer_density(t, x))
            .collect::<Result<Vec<_>, _>>()?;
        snaps.push(Snapshot {
            t,
            x: xs.clone(),
            outer,
            composite: composite.profile(t, &xs)?,
        });
    }
    match c.format {
        Format::Csv => {
            let mut s = String::from("t,x,u_outer,u_composite\n");
            for snap in &snaps {
                for i in 0..snap.x.len() {
                    s.push_str(&format!(
                        "{},{},{},{}\n",
                        snap.t, snap.x[i], snap.outer[i], snap.composite[i]
                    ));
                }
            }
            write(&c.out, "analytic.csv", &s)
        }
        Format::Json => write(&c.out, "analytic.json", &json(&snaps)?),
    }
}

fn compare(c: &Common, enforce: bool) -> Outcome {
    let cfg = load(&c.config)?;
    let report = run_compare(&cfg);
    for tr in &report.times {
        println!(
            "t = {:<8} front error {} (tol {:.3e})  sup error {}  {}",
            tr.t,
            opt(tr.front_error),
            tr.front_tolerance,
            opt(tr.sup_error),
            if tr.passed { "PASS" } else { "FAIL" }
        );
    }
    if let Some(re) = &report.regime {
        println!(
            "regime {} (score {:.3e}): sup error {:.6e}",
            re.regime.name(),
            re.score,
            re.sup_error
        );
    }
    if report.window_empty() {
        println!("warning: comparison window empty at some times");
    }
    for p in emit_outputs(&c.out, &[cfg], std::slice::from_ref(&report), c.format.into())? {
        println!("wrote {}", p.display());
    }
    if let Some(f) = &report.failure {
        return Err(Failure::Numeric(Error::Config(f.clone())));
    }
    if enforce && !report.passed {
        return Err(Failure::Acceptance(format!(
            "{} exceeded its tolerances",
            report.experiment
        )));
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.3e}"))
}

fn front(c: &Common, samples: usize) -> Outcome {
    let cfg = load(&c.config)?;
    let outer = cfg.analytic()?;
    let times = linspace(0.0, cfg.t_end(), samples.max(2));
    let tr = outer.front_trajectory(&times)?;
    if let Some(te) = tr.exit_time {
        println!("front leaves the domain at t = {te}");
    }
    match c.format {
        Format::Csv => write(&c.out, "front.csv", &tr.to_csv()),
        Format::Json => write(&c.out, "front.json", &json(&tr)?),
    }
}

fn oscillatory(c: &Common, regime: Option<OscRegime>) -> Outcome {
    let cfg = load(&c.config)?;
    let ExperimentSource::Oscillatory {
        spec,
        regime: configured,
        t_max,
        samples,
    } = &cfg.problem
    else {
        return Err(Failure::Input(Error::Config(
            "oscillatory needs an oscillatory experiment".into(),
        )));
    };
    let (selected, score) = spec.regime_select();
    let regime = regime.or(*configured).unwrap_or(selected);
    println!(
        "selected regime {} (small parameter {score:.3e}); tabulating {}",
        selected.name(),
        regime.name()
    );
    let rows = spec.table(regime, &linspace(0.0, *t_max, *samples))?;
    let sup = rows.iter().map(|r| r[3]).fold(0.0, f64::max);
    println!("sup error {sup:.6e}");
    match c.format {
        Format::Csv => {
            let mut s = String::from("t,r_approx,r_reference,error\n");
            for [t, v, r, e] in rows {
                s.push_str(&format!("{t},{v},{r},{e}\n"));
            }
            write(&c.out, "oscillatory.csv", &s)
        }
        Format::Json => write(&c.out, "oscillatory.json", &json(&rows)?),
    }
}

fn microdevice(a: &DeviceArgs) -> Outcome {
    let spec = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::Input(io_error(path, e)))?;
            serde_json::from_str::<MicrodeviceSpec>(&text).map_err(|e| Failure::Input(e.into()))?
        }
        None => MicrodeviceSpec::scenario(a.regime, a.drive),
    };
    for w in spec.validate().map_err(Failure::Input)? {
        eprintln!("warning: {w}");
    }
    let times = linspace(0.0, spec.t_end, a.samples.max(2));
    let mut fronts = Vec::with_capacity(times.len());
    for &t in &times {
        match spec.closed_form_front(t) {
            Ok(x) => fronts.push([t, x]),
            Err(Error::FrontBlowup { critical_time, .. }) => {
                println!("closed-form front blows up at t = {critical_time:?}");
                break;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let grid = Grid::new(spec.cells, 1.0);
    let density = grid
        .centers()
        .iter()
        .map(|&x| spec.closed_form_density(spec.t_end, x).map(|u| [x, u]))
        .collect::<Result<Vec<_>, _>>()?;
    println!(
        "{} regime, x*({}) = {}",
        spec.regime.name(),
        spec.t_end,
        fronts.last().map_or(f64::NAN, |f| f[1])
    );
    let solution = if a.solve {
        Some(chemowave::pde::solve_coupled(
            &spec,
            &Default::default(),
            &[spec.t_end],
        )?)
    } else {
        None
    };
    match a.format {
        Format::Csv => {
            let mut s = String::from("t,x_star\n");
            for [t, x] in &fronts {
                s.push_str(&format!("{t},{x}\n"));
            }
            write(&a.out, "front.csv", &s)?;
            let mut s = String::from("x,u\n");
            for [x, u] in &density {
                s.push_str(&format!("{x},{u}\n"));
            }
            write(&a.out, "density.csv", &s)?;
            if let Some(sol) = &solution {
                write(&a.out, "solution.csv", &sol.to_csv())?;
            }
            Ok(())
        }
        Format::Json => {
            let doc = serde_json::json!({
                "spec": spec,
                "front": fronts,
                "density": density,
                "solution": solution,
            });
            write(&a.out, "microdevice.json", &json(&doc)?)
        }
    }
}

fn sweep(c: &Common) -> Outcome {
    let cfg = SweepConfig::load(&c.config).map_err(Failure::Input)?;
    let result: SweepResult = cfg.run().map_err(Failure::Input)?;
    let mut s = String::from("index,experiment,passed,error_ratio,failure\n");
    for p in &result.points {
        println!(
            "{:>3} {} {}{}",
            p.index,
            p.report.experiment,
            if p.report.passed { "PASS" } else { "FAIL" },
            p.error_ratio.map_or(String::new(), |r| format!(" ratio {r:.4}"))
        );
        s.push_str(&format!(
            "{},\"{}\",{},{},\"{}\"\n",
            p.index,
            p.report.experiment.replace('"', "\"\""),
            p.report.passed,
            p.error_ratio.map_or(String::new(), |r| r.to_string()),
            p.report.failure.as_deref().unwrap_or("").replace('"', "\"\"")
        ));
    }
    let configs: Vec<ExperimentConfig> = vec![cfg.base.clone()];
    for path in emit_outputs(&c.out, &configs, &result.reports(), c.format.into())? {
        println!("wrote {}", path.display());
    }
    write(&c.out, "sweep.csv", &s)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::SolvePde(c) => solve_pde(c),
        Command::SolveAnalytic(c) => solve_analytic(c),
        Command::Compare { common, enforce } => compare(common, *enforce),
        Command::Front { common, samples } => front(common, *samples),
        Command::Oscillatory { common, regime } => oscillatory(common, *regime),
        Command::Microdevice(a) => microdevice(a),
        Command::Sweep(c) => sweep(c),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Acceptance(m)) => {
            eprintln!("acceptance failure: {m}");
            ExitCode::from(3)
        }
    }
}
