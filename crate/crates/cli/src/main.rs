mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use steadyfsi::config::{parse_config, RunConfig};
use steadyfsi::continuation::{
    find_kappa0, run_continuation, ContinuationSchedule, KappaRow, TrendRow,
};
use steadyfsi::diagnostics::{diagnose, DiagnosticsReport};
use steadyfsi::discrete::MassBalance;
use steadyfsi::fixedpoint::{solve_fixed_point, FixedPointOutcome};
use steadyfsi::{IterateState, SolverConfig};

use output::{beam_csv, fields_csv, kappa_csv, trend_csv, OutDir};

#[derive(Parser)]
#[command(
    name = "steadyfsi",
    version,
    about = "Steady compressible fluid / clamped beam solver"
)]
struct Cli {
    /// TOML configuration; defaults are used for missing keys or a missing file flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides run.out_dir.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Overrides run.seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Solve the fixed point at the configured parameters.
    Solve,
    /// Halve ε along the configured number of stages.
    ContinueEps,
    /// Halve δ along the configured number of stages, down to the floor.
    ContinueDelta,
    /// Locate the smallest stiffness with an inactive correction.
    SweepKappa,
    /// Solve, then evaluate identities, estimates and weak residuals.
    Diagnose,
}

#[derive(Serialize)]
struct StateSummary {
    converged: bool,
    iterations: usize,
    final_residual: f64,
    max_w: f64,
    lip: f64,
    correction_active: bool,
    rho_min: f64,
    rho_max: f64,
    mass_balance: MassBalance,
}

impl StateSummary {
    fn new(out: &FixedPointOutcome) -> Self {
        let s = &out.state;
        let lip = s.lip();
        StateSummary {
            converged: out.report.converged,
            iterations: out.report.iterations,
            final_residual: out.report.final_residual,
            max_w: s.w.max_abs(),
            lip,
            correction_active: lip > 0.25,
            rho_min: s.fluid.rho.iter().copied().fold(f64::INFINITY, f64::min),
            rho_max: s
                .fluid
                .rho
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max),
            mass_balance: s.mass_balance,
        }
    }
}

#[derive(Serialize)]
struct Params {
    eps: f64,
    delta: f64,
    kappa: f64,
    nx: usize,
    nz: usize,
    seed: u64,
}

#[derive(Serialize)]
struct Summary<'a> {
    command: &'a str,
    params: Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<StateSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trend: Option<&'a [TrendRow]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kappa_rows: Option<&'a [KappaRow]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    diagnostics: Option<DiagnosticsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
}

fn threads() -> usize {
    std::env::var("STEADYFSI_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn write_state(out: &OutDir, s: &IterateState) -> std::io::Result<()> {
    out.write("fields.csv", &fields_csv(&s.fluid))?;
    out.write("beam.csv", &beam_csv(&s.w, s.w_cor()))
}

fn run(cli: &Cli) -> Result<bool, Box<dyn std::error::Error>> {
    let mut rc = match &cli.config {
        Some(p) => parse_config(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = &cli.out_dir {
        rc.run.out_dir = d.display().to_string();
    }
    if let Some(s) = cli.seed {
        rc.run.seed = s;
    }
    rc.validate()?;
    let cfg: SolverConfig = rc.solver_config()?;
    let out = OutDir::create(std::path::Path::new(&rc.run.out_dir))?;
    out.write("config.toml", &rc.to_toml())?;

    let params = Params {
        eps: cfg.reg.eps,
        delta: cfg.reg.delta,
        kappa: cfg.params.kappa,
        nx: cfg.layout.nx,
        nz: cfg.layout.nz,
        seed: rc.run.seed,
    };
    let mut summary = Summary {
        command: "",
        params,
        state: None,
        trend: None,
        kappa0: None,
        kappa_rows: None,
        diagnostics: None,
        failure: None,
    };

    let converged = match cli.command {
        Command::Solve | Command::Diagnose => {
            let fp = solve_fixed_point(&cfg)?;
            out.write("run.log", &fp.log.text())?;
            write_state(&out, &fp.state)?;
            summary.state = Some(StateSummary::new(&fp));
            if matches!(cli.command, Command::Diagnose) {
                summary.command = "diagnose";
                let d = &rc.diagnostics;
                summary.diagnostics = Some(diagnose(
                    &fp.state,
                    &cfg,
                    rc.run.seed,
                    d.bank_size,
                    d.alpha,
                )?);
            } else {
                summary.command = "solve";
            }
            out.write_json("summary.json", &summary)?;
            fp.report.converged
        }
        Command::ContinueEps | Command::ContinueDelta => {
            let c = &rc.continuation;
            let (name, schedule) = if matches!(cli.command, Command::ContinueEps) {
                (
                    "continue-eps",
                    ContinuationSchedule::halving_eps(cfg.reg.eps, c.stages)?,
                )
            } else {
                (
                    "continue-delta",
                    ContinuationSchedule::halving_delta(cfg.reg.delta, c.stages, c.delta_floor)?,
                )
            };
            let res = run_continuation(&cfg, &schedule)?;
            out.write("run.log", &res.log.text())?;
            out.write("trend.csv", &trend_csv(&res.rows))?;
            if let Some(s) = &res.state {
                write_state(&out, s)?;
            }
            summary.command = name;
            summary.trend = Some(&res.rows);
            summary.failure = res.failure.clone();
            out.write_json("summary.json", &summary)?;
            if let Some(f) = &res.failure {
                eprintln!("continuation stopped early: {f}");
            }
            res.all_converged()
        }
        Command::SweepKappa => {
            let s = &rc.sweep;
            let sweep = find_kappa0(
                &cfg,
                s.kappa_lo,
                s.kappa_hi,
                s.scan_points,
                s.bracket,
                threads(),
            )?;
            out.write("kappa.csv", &kappa_csv(&sweep.rows))?;
            let mut log = String::new();
            for r in &sweep.rows {
                log.push_str(&format!(
                    "kappa={:e} lip={:e} converged={} admissible={}\n",
                    r.kappa,
                    r.lip_norm,
                    r.converged,
                    r.admissible()
                ));
            }
            log.push_str(&format!("kappa0={:e}\n", sweep.kappa0));
            out.write("run.log", &log)?;
            summary.command = "sweep-kappa";
            summary.kappa0 = Some(sweep.kappa0);
            summary.kappa_rows = Some(&sweep.rows);
            out.write_json("summary.json", &summary)?;
            true
        }
    };
    Ok(converged)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("not converged; see run.log");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
