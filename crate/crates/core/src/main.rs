use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use flatdisk::config::RunConfig;
use flatdisk::lie_oracle::verify_objective;
use flatdisk::objectives::ObjectiveKind;
use flatdisk::plot::{emit_plots, file_stem};
use flatdisk::simulation::{builtin_scenarios, run, Scenario};
use flatdisk::summary::summarize;
use flatdisk::trace_csv::{write_trace_csv, write_trace_csv_with_attitude};
use flatdisk::Error;

const EXIT_VERIFICATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "flatdisk",
    version,
    about = "Inertia-shaping control of a spinning flat disk"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Simulate one or more scenarios and write their traces.
    Run {
        /// Built-in scenario name, `all`, or a path to a scenario file.
        /// Repeat to run several scenarios in parallel.
        #[arg(long, required = true)]
        scenario: Vec<String>,
        #[arg(long)]
        dt: Option<String>,
        #[arg(long = "t-end")]
        t_end: Option<String>,
        #[arg(long)]
        gain: Option<String>,
        #[arg(long)]
        deadband: Option<String>,
        /// Product m·r² of the disk.
        #[arg(long)]
        mr2: Option<String>,
        /// Initial body rates, e.g. `10,4,1`.
        #[arg(long, allow_hyphen_values = true)]
        omega0: Option<String>,
        /// Objective schedule, e.g. `20:alignment;40:precession`.
        #[arg(long)]
        plan: Option<String>,
        /// Control sampling: `step` (zero-order hold) or `stage`.
        #[arg(long)]
        sampling: Option<String>,
        /// Disable the zero-input fallback for drift-free objectives.
        #[arg(long)]
        no_guard: bool,
        /// Keep the mass pairs inside the disk radius.
        #[arg(long)]
        clamp_l: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write the four SVG panels.
        #[arg(long)]
        plots: bool,
        /// Append the attitude matrix to every CSV row.
        #[arg(long)]
        include_attitude: bool,
    },
    /// Check analytic Lie derivatives against finite differences.
    Verify {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// List the built-in scenarios.
    List,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Run {
            scenario,
            dt,
            t_end,
            gain,
            deadband,
            mr2,
            omega0,
            plan,
            sampling,
            no_guard,
            clamp_l,
            out,
            plots,
            include_attitude,
        } => {
            let mut overrides = Vec::new();
            let mut set = |k: &str, v: Option<String>| {
                if let Some(v) = v {
                    overrides.push((k.to_string(), v));
                }
            };
            set("dt", dt);
            set("t_end", t_end);
            set("gain", gain);
            set("deadband", deadband);
            set("mr2", mr2);
            set("omega0", omega0);
            set("plan", plan);
            set("sampling", sampling);
            if no_guard {
                set("guard", Some("false".into()));
            }
            if clamp_l {
                set("clamp_l", Some("true".into()));
            }
            let cfg = RunConfig {
                selectors: scenario,
                overrides,
                out_dir: out,
                plots,
                include_attitude,
            };
            match run_all(&cfg) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::Verify { samples, tol, seed } => {
            if samples == 0 || tol.is_nan() || tol <= 0.0 {
                eprintln!("error: --samples must be at least 1 and --tol positive");
                return ExitCode::from(1);
            }
            let mut ok = true;
            for kind in ObjectiveKind::ALL {
                let r = verify_objective(kind, samples, tol, seed);
                println!(
                    "{:<10} {}  samples={} grad={:.3e} Lf={:.3e} Lg1={:.3e} Lg2={:.3e}",
                    kind.name(),
                    if r.pass { "PASS" } else { "FAIL" },
                    r.samples,
                    r.max_rel_error_grad,
                    r.max_rel_error_lf,
                    r.max_rel_error_lg1,
                    r.max_rel_error_lg2,
                );
                if !r.pass {
                    let w = r.worst_state;
                    println!(
                        "           worst state ({}, {}, {}, {}, {})",
                        w[0], w[1], w[2], w[3], w[4]
                    );
                }
                ok &= r.pass;
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERIFICATION)
            }
        }
        Command::List => {
            for s in builtin_scenarios() {
                let plan: Vec<String> = s
                    .plan
                    .segments()
                    .iter()
                    .map(|(end, kind)| format!("{kind} until {end}"))
                    .collect();
                let w = s.omega0;
                println!(
                    "{:<11} omega0=({}, {}, {})  t_end={}  {}",
                    s.name,
                    w.x,
                    w.y,
                    w.z,
                    s.t_end,
                    plan.join(", then ")
                );
            }
            ExitCode::SUCCESS
        }
    }
}

fn run_all(cfg: &RunConfig) -> flatdisk::Result<()> {
    let scenarios = cfg.scenarios()?;
    if scenarios.len() == 1 {
        return run_one(&scenarios[0], &cfg.out_dir, cfg);
    }
    // independent runs, one output directory each
    std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|s| {
                let dir = cfg.out_dir.join(file_stem(&s.name));
                scope.spawn(move || run_one(s, &dir, cfg))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario thread panicked"))
            .collect::<flatdisk::Result<Vec<()>>>()
    })?;
    Ok(())
}

fn run_one(scenario: &Scenario, dir: &Path, cfg: &RunConfig) -> flatdisk::Result<()> {
    let trace = run(scenario)?;
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{}.csv", file_stem(&scenario.name)));
    let file = BufWriter::new(File::create(&path).map_err(Error::Io)?);
    if cfg.include_attitude {
        write_trace_csv_with_attitude(&trace, file)?;
    } else {
        write_trace_csv(&trace, file)?;
    }
    let mut report = format!("{}  trace: {}\n", summarize(&trace)?, path.display());
    if cfg.plots {
        for p in emit_plots(&trace, dir)? {
            report.push_str(&format!("  plot: {}\n", p.display()));
        }
    }
    print!("{report}");
    Ok(())
}
