use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cvtele_cli::emit::{self, write_text, Format, Table};
use cvtele_cli::observables::{fidelity, ObservableRegistry};
use cvtele_cli::scenario::{Point, Scenario};
use cvtele_cli::{run_scenario_with_jobs, verify, CliError, Result};
use cvtele_core::{
    db_to_natural, delta_opt_fidelity, delta_opt_variance, delta_subopt, output_moments, sigma,
    StrategyRegistry,
};

#[derive(Parser)]
#[command(
    name = "cvtele",
    version,
    about = "Continuous-variable teleportation sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario file over its sweep.
    Run {
        /// Scenario file (TOML).
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        scenario: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
        /// Worker threads; defaults to the number of CPUs.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Fidelity and variances of every resource at one parameter point.
    CompareResources {
        #[command(flatten)]
        point: PointArgs,
        /// Comma-separated resource names; all registered ones by default.
        #[arg(long, value_delimiter = ',')]
        resources: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fidelity- and variance-optimal mixing angles over a range of r.
    OptimalAngles {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value_t = 0.0)]
        from_db: f64,
        #[arg(long, default_value_t = 30.0)]
        to_db: f64,
        #[arg(long, default_value_t = 31)]
        points: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the closed-form versus numerical oracle checks.
    Verify {
        /// Replace every check's tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Random cases per randomized check.
        #[arg(long, default_value_t = 40)]
        cases: usize,
    },
    /// List resource strategies and observables.
    List,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PointArgs {
    /// Resource squeezing in dB.
    #[arg(long, default_value_t = 10.0)]
    r_db: f64,
    /// Input squeezing in dB.
    #[arg(long, default_value_t = 0.0)]
    s_db: f64,
    #[arg(long, default_value_t = cvtele_core::optimize::DEFAULT_S_BAR_DB)]
    s_bar_db: f64,
    #[arg(long, default_value_t = 0.0)]
    beta_re: f64,
    #[arg(long, default_value_t = 0.0)]
    beta_im: f64,
    #[arg(long, default_value_t = 0.0)]
    varphi: f64,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    #[arg(long, default_value_t = 0.0)]
    n_th: f64,
    /// Beam-splitter reflectivity R^2.
    #[arg(long, default_value_t = 0.0)]
    r2: f64,
    /// Fixed gain; unit effective gain if absent.
    #[arg(long)]
    gain: Option<f64>,
}

impl PointArgs {
    fn point(&self) -> Result<Point> {
        if !(0.0..1.0).contains(&self.r2) {
            return Err(CliError::config(format!(
                "--r2 must be in [0, 1), got {}",
                self.r2
            )));
        }
        let p = Point {
            r_db: self.r_db,
            s_db: self.s_db,
            s_bar_db: self.s_bar_db,
            beta_re: self.beta_re,
            beta_im: self.beta_im,
            varphi: self.varphi,
            phi_res: std::f64::consts::PI,
            delta: 0.0,
            theta: 0.0,
            t: (1.0 - self.r2).sqrt(),
            tau: self.tau,
            n_th: self.n_th,
            g: self.gain,
        };
        p.input().map_err(|e| CliError::config(e.to_string()))?;
        p.params().map_err(|e| CliError::config(e.to_string()))?;
        if !(self.r_db.is_finite() && self.r_db >= 0.0) {
            return Err(CliError::config("--r-db must be >= 0"));
        }
        Ok(p)
    }
}

fn compare_resources(point: &Point, names: &[String]) -> Result<Table> {
    let strategies = StrategyRegistry::with_defaults();
    let names: Vec<String> = if names.is_empty() {
        strategies
            .names()
            .filter(|n| *n != "sb-free")
            .map(String::from)
            .collect()
    } else {
        names.to_vec()
    };
    let input = point.input().map_err(|e| CliError::config(e.to_string()))?;
    let params = point
        .params()
        .map_err(|e| CliError::config(e.to_string()))?;
    let ctx = point.context(params);
    let mut rows = Vec::new();
    for name in names {
        let strategy = strategies
            .lookup(&name)
            .map_err(|e| CliError::config(e.to_string()))?;
        let res = strategy
            .resolve(&ctx)
            .map_err(|e| CliError::compute(format!("{name}: {e}")))?;
        let f = fidelity(&input, &res, &params)
            .map_err(|e| CliError::compute(format!("{name}: {e}")))?;
        let m = output_moments(&input, &res, &params);
        rows.push((
            name,
            vec![res.delta(), f, sigma(&res, &params), m.var_x, m.var_p],
        ));
    }
    Ok(Table {
        label: "resource".into(),
        columns: ["delta", "fidelity", "sigma", "var_x", "var_p"]
            .map(String::from)
            .to_vec(),
        rows,
    })
}

fn optimal_angles(point: &Point, from_db: f64, to_db: f64, points: usize) -> Result<Table> {
    if points < 2 || !(from_db.is_finite() && to_db.is_finite()) || from_db < 0.0 || to_db < 0.0 {
        return Err(CliError::config(
            "need at least 2 points over a finite, non-negative dB range",
        ));
    }
    let params = point
        .params()
        .map_err(|e| CliError::config(e.to_string()))?;
    let (s, s_bar) = (db_to_natural(point.s_db), db_to_natural(point.s_bar_db));
    let rows = (0..points)
        .map(|i| {
            let r_db = from_db + (to_db - from_db) * i as f64 / (points - 1) as f64;
            let r = db_to_natural(r_db);
            (
                emit::format_value(r_db),
                vec![
                    delta_opt_fidelity(s, r, &params),
                    delta_subopt(s_bar, r, &params),
                    delta_opt_variance(r, params.tau()),
                ],
            )
        })
        .collect();
    Ok(Table {
        label: "r_db".into(),
        columns: ["delta_opt", "delta_subopt", "delta_optvar"]
            .map(String::from)
            .to_vec(),
        rows,
    })
}

fn list() -> String {
    let mut s = String::from("resources:\n");
    for st in StrategyRegistry::with_defaults().iter() {
        s += &format!("  {:<10} {}\n", st.name(), st.description());
    }
    s += "observables:\n";
    let reg = ObservableRegistry::with_defaults();
    for o in reg.iter() {
        s += &format!("  {:<13} {}\n", o.name(), o.description());
    }
    s += "  deviations    d_x, d_p, d_var_x, d_var_p, d_cov_xp\n";
    s
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            file,
            scenario,
            output,
            jobs,
        } => {
            let path = file
                .or(scenario)
                .ok_or_else(|| CliError::config("no scenario file given"))?;
            let sc = Scenario::load(&path)?;
            let jobs =
                jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            if jobs == 0 {
                return Err(CliError::config("--jobs must be at least 1"));
            }
            let result = run_scenario_with_jobs(&sc, jobs)?;
            emit::emit(&result, output.format, output.out.as_deref())
        }
        Command::CompareResources {
            point,
            resources,
            output,
        } => {
            let table = compare_resources(&point.point()?, &resources)?;
            write_text(&table.to_string(output.format)?, output.out.as_deref())
        }
        Command::OptimalAngles {
            point,
            from_db,
            to_db,
            points,
            output,
        } => {
            let table = optimal_angles(&point.point()?, from_db, to_db, points)?;
            write_text(&table.to_string(output.format)?, output.out.as_deref())
        }
        Command::Verify { tolerance, cases } => {
            if let Some(t) = tolerance {
                if !(t.is_finite() && t >= 0.0) {
                    return Err(CliError::config(
                        "--tolerance must be finite and non-negative",
                    ));
                }
            }
            if cases == 0 {
                return Err(CliError::config("--cases must be at least 1"));
            }
            let outcomes = verify::run_suite(cases, tolerance)?;
            print!("{}", verify::render(&outcomes));
            let failed = outcomes.iter().filter(|o| !o.passed()).count();
            if failed > 0 {
                return Err(CliError::compute(format!("{failed} check(s) failed")));
            }
            Ok(())
        }
        Command::List => {
            print!("{}", list());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
