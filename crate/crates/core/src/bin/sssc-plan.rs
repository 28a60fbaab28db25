use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sssc_expansion::analysis::{run_pair_detailed, sweep_sssc_caps, PairOptions};
use sssc_expansion::lp::{available_backends, backend_by_name, SolverBackend};
use sssc_expansion::network::{load_network, Network};
use sssc_expansion::planner::{plan, ConvergenceConfig, Norm, PlanOutcome};
use sssc_expansion::report::{emit_report, write_bcr, write_value_report, ReportOptions};
use sssc_expansion::scenario::{load_scenario, Scenario};
use sssc_expansion::Error;

#[derive(Parser)]
#[command(name = "sssc-plan", version, about = "Transmission and SSSC expansion planning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Common,
}

#[derive(Args)]
struct Common {
    /// LP backend
    #[arg(long, global = true, default_value = "microlp")]
    backend: String,
    /// Relative tolerance of the capacity iteration
    #[arg(long, global = true, default_value_t = 1e-3)]
    eps: f64,
    #[arg(long, global = true, default_value_t = 25)]
    max_iters: usize,
    /// Step length of the capacity update, in (0, 1]
    #[arg(long, global = true, default_value_t = 1.0)]
    damping: f64,
    /// Use the max-norm instead of the 2-norm for convergence
    #[arg(long, global = true)]
    linf: bool,
    /// Drop line losses
    #[arg(long, global = true)]
    lossless: bool,
    /// Pieces of the loss envelope per line
    #[arg(long, global = true, default_value_t = 3)]
    loss_segments: usize,
    /// Recorded in run.json; the planner itself is deterministic
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write wall-clock times into iterations.csv
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one scenario
    Plan {
        network: PathBuf,
        scenario: PathBuf,
        /// Forbid SSSCs regardless of the scenario
        #[arg(long)]
        no_sssc: bool,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Plan with and without SSSCs and report the difference
    Compare {
        network: PathBuf,
        scenario: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Skip the avoided-transmission search
        #[arg(long)]
        no_avoided: bool,
    },
    /// Sweep caps on total SSSC capacity (GVAr; `inf` for none)
    Sweep {
        network: PathBuf,
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0,1,10,50")]
        caps: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

impl Common {
    fn config(&self) -> ConvergenceConfig {
        ConvergenceConfig {
            eps: self.eps,
            max_iterations: self.max_iters,
            damping: self.damping,
            norm: if self.linf { Norm::Linf } else { Norm::L2 },
            lossless: self.lossless,
            loss_segments: self.loss_segments,
            ..Default::default()
        }
    }
}

fn inputs(network: &Path, scenario: &Path) -> Result<(Network, Scenario), Error> {
    let net = load_network(network)?;
    let sc = load_scenario(scenario)?;
    sc.check_against(&net)?;
    Ok((net, sc))
}

fn write_run(out: &Path, opts: &Common, command: &str) -> Result<(), Error> {
    std::fs::create_dir_all(out).map_err(|e| Error::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    let run = json!({
        "command": command,
        "backend": opts.backend,
        "eps": opts.eps,
        "max_iters": opts.max_iters,
        "damping": opts.damping,
        "norm": if opts.linf { "linf" } else { "l2" },
        "lossless": opts.lossless,
        "loss_segments": opts.loss_segments,
        "seed": opts.seed,
    });
    let path = out.join("run.json");
    let text = serde_json::to_string_pretty(&run).expect("static json") + "\n";
    std::fs::write(&path, text).map_err(|e| Error::Io { path, source: e })
}

fn summarize(label: &str, o: &PlanOutcome) {
    println!(
        "{label}: cost {:.2} $/yr, {} iteration(s){}, SSSC {:.4} GVAr",
        o.objective(),
        o.state.iterations(),
        if o.converged { "" } else { " (not converged)" },
        o.solution.total_sssc_gvar()
    );
}

fn parse_caps(caps: &[String]) -> Result<Vec<f64>, Error> {
    caps.iter()
        .map(|c| match c.trim() {
            "inf" | "none" => Ok(f64::INFINITY),
            s => s
                .parse::<f64>()
                .map_err(|_| Error::Domain(format!("invalid cap `{s}`"))),
        })
        .collect()
}

/// Returns whether every plan converged.
fn run(cli: &Cli, backend: &dyn SolverBackend) -> Result<bool, Error> {
    let opts = &cli.opts;
    let config = opts.config();
    config.validate()?;
    let report_opts = ReportOptions { timings: opts.timings };
    match &cli.command {
        Command::Plan {
            network,
            scenario,
            no_sssc,
            out,
        } => {
            let (net, mut sc) = inputs(network, scenario)?;
            if *no_sssc {
                sc = sc.without_sssc();
            }
            let o = plan(&net, &sc, &config, backend)?;
            summarize(&sc.name, &o);
            write_run(out, opts, "plan")?;
            emit_report(out, &net, &o, report_opts)?;
            Ok(o.converged)
        }
        Command::Compare {
            network,
            scenario,
            out,
            no_avoided,
        } => {
            let (net, sc) = inputs(network, scenario)?;
            let pair = run_pair_detailed(
                &net,
                &sc,
                &config,
                backend,
                PairOptions {
                    avoided_transmission: !no_avoided,
                },
            )?;
            write_run(out, opts, "compare")?;
            let mut converged = true;
            for (label, o) in [("without_sssc", &pair.without_sssc), ("with_sssc", &pair.with_sssc)] {
                match o {
                    Some(o) => {
                        summarize(label, o);
                        emit_report(&out.join(label), &net, o, report_opts)?;
                        converged &= o.converged;
                    }
                    None => println!("{label}: infeasible"),
                }
            }
            let r = &pair.report;
            write_value_report(&out.join("value.json"), r)?;
            if let Some(s) = r.cost_saving {
                println!("saving {s:.2} $/yr");
            }
            if let Some(b) = r.benefit_cost_ratio {
                println!("benefit-cost ratio {b:.4}");
            }
            if pair.without_sssc.is_none() && pair.with_sssc.is_none() {
                return Err(Error::InfeasibleScenario(sc.name.clone()));
            }
            Ok(converged)
        }
        Command::Sweep {
            network,
            scenario,
            caps,
            out,
        } => {
            let (net, sc) = inputs(network, scenario)?;
            let caps = parse_caps(caps)?;
            let curve = sweep_sssc_caps(&net, &sc, &caps, &config, backend)?;
            write_run(out, opts, "sweep")?;
            write_bcr(&out.join("bcr.csv"), &curve)?;
            for p in &curve.points {
                println!(
                    "cap {:>8} GVAr: saving {:.2} $/yr, installed {:.4} GVAr, interval BCR {}",
                    p.cap_gvar,
                    p.saving,
                    p.installed_gvar,
                    p.interval_bcr.map_or("-".into(), |b| format!("{b:.4}"))
                );
            }
            Ok(curve.points.iter().all(|p| p.converged))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let backend = match backend_by_name(&cli.opts.backend) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e} (available: {})", available_backends().join(", "));
            return ExitCode::from(1);
        }
    };
    match run(&cli, backend.as_ref()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warning: capacity iteration did not converge");
            ExitCode::from(2)
        }
        Err(e @ Error::NotConverged { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e @ (Error::InfeasibleScenario(_) | Error::InfeasibleBase)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
