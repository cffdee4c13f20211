//! Warm-started parameter continuation in ε, δ or κ, and the bisection for the
//! smallest stiffness at which the correction stays inactive.

use serde::Serialize;

use crate::config::SolverConfig;
use crate::diagnostics::{energy_report, mass_balance, pressure_report};
use crate::eos::build_renorm_pair;
use crate::error::{Error, Result};
use crate::fixedpoint::{initial_state, iterate_from, solve_fixed_point, IterateState, RunLog};
use crate::geometry::{extend_by_zero, l2_distance_ambient, AmbientLattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    Eps,
    Delta,
    Kappa,
}

impl std::fmt::Display for Param {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Param::Eps => "eps",
            Param::Delta => "delta",
            Param::Kappa => "kappa",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationSchedule {
    param: Param,
    values: Vec<f64>,
}

impl ContinuationSchedule {
    /// Values must be positive and strictly monotone.
    pub fn new(param: Param, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("empty continuation schedule"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Domain {
                what: "continuation value",
                value: *v,
                reason: "must be positive and finite",
            });
        }
        let dec = values.windows(2).all(|p| p[1] < p[0]);
        let inc = values.windows(2).all(|p| p[1] > p[0]);
        if !(dec || inc) {
            return Err(Error::invalid(
                "continuation schedule must be strictly monotone",
            ));
        }
        Ok(Self { param, values })
    }

    /// ε₀ 2^{-k}, k < stages.
    pub fn halving_eps(eps0: f64, stages: usize) -> Result<Self> {
        Self::new(
            Param::Eps,
            (0..stages).map(|k| eps0 * 0.5f64.powi(k as i32)).collect(),
        )
    }

    /// δ₀ 2^{-k}, k < stages, stopping at the first value not above `floor`.
    pub fn halving_delta(delta0: f64, stages: usize, floor: f64) -> Result<Self> {
        let mut v = Vec::new();
        for k in 0..stages {
            let d = (delta0 * 0.5f64.powi(k as i32)).max(floor);
            if v.last().is_some_and(|&l| d >= l) {
                break;
            }
            v.push(d);
        }
        Self::new(Param::Delta, v)
    }

    pub fn param(&self) -> Param {
        self.param
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn apply(&self, cfg: &SolverConfig, v: f64) -> Result<SolverConfig> {
        match self.param {
            Param::Eps => cfg.with_reg(v, cfg.reg.delta),
            Param::Delta => cfg.with_reg(cfg.reg.eps, v),
            Param::Kappa => cfg.with_kappa(v),
        }
    }
}

/// One row of the continuation trend table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendRow {
    pub value: f64,
    pub eps: f64,
    pub delta: f64,
    pub kappa: f64,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub h1_u: f64,
    pub pressure_l2: f64,
    pub pressure_l32: f64,
    pub rho_max: f64,
    pub beta_margin: Option<f64>,
    pub lip: f64,
    pub mass_balance: f64,
    pub delta34_grad_rho: f64,
    pub energy_ratio: f64,
    /// L² distance of zero-extended (ρ, u) to the previous stage.
    pub cauchy: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ContinuationOutcome {
    pub param: Param,
    pub rows: Vec<TrendRow>,
    pub state: Option<IterateState>,
    /// Stage failure that truncated the run, if any.
    pub failure: Option<String>,
    pub log: RunLog,
}

impl ContinuationOutcome {
    pub fn all_converged(&self) -> bool {
        self.failure.is_none() && self.rows.iter().all(|r| r.converged)
    }
}

fn ambient_for(state: &IterateState) -> AmbientLattice {
    AmbientLattice {
        nx: 2 * state.fluid.grid.nx,
        nz: 3 * state.fluid.grid.nz,
    }
}

pub fn trend_row(
    state: &IterateState,
    cfg: &SolverConfig,
    value: f64,
    converged: bool,
    iterations: usize,
    residual: f64,
) -> Result<TrendRow> {
    let renorm = build_renorm_pair(&cfg.law, &cfg.reg, 2048)?;
    let e = energy_report(&state.fluid, &cfg.bc, &cfg.reg, &renorm);
    let p = pressure_report(&state.fluid, &cfg.law, &cfg.reg);
    let mb = mass_balance(&state.fluid, &cfg.law, &cfg.reg, &cfg.bc);
    Ok(TrendRow {
        value,
        eps: cfg.reg.eps,
        delta: cfg.reg.delta,
        kappa: cfg.params.kappa,
        converged,
        iterations,
        residual,
        h1_u: e.h1_norm_u,
        pressure_l2: p.pressure_l2,
        pressure_l32: p.pressure_l32,
        rho_max: p.rho_max,
        beta_margin: p.beta_margin,
        lip: state.lip(),
        mass_balance: mb.relative,
        delta34_grad_rho: e.delta34_grad_rho,
        energy_ratio: e.energy_ratio,
        cauchy: None,
    })
}

/// Runs the schedule, warm-starting each stage from the previous solution.
/// A stage that errors ends the run; completed rows are kept.
pub fn run_continuation(
    cfg: &SolverConfig,
    schedule: &ContinuationSchedule,
) -> Result<ContinuationOutcome> {
    let mut log = RunLog::new();
    let mut rows: Vec<TrendRow> = Vec::new();
    let mut state: Option<IterateState> = None;
    let mut failure = None;
    for &v in schedule.values() {
        let stage_cfg = schedule.apply(cfg, v)?;
        let start = match &state {
            Some(s) => s.clone(),
            None => initial_state(&stage_cfg)?,
        };
        let out = match iterate_from(&stage_cfg, start, 1.0) {
            Ok(o) => o,
            Err(e) => {
                log.push(format!("{}={v:e} failed: {e}", schedule.param()));
                failure = Some(e.to_string());
                break;
            }
        };
        log.push(format!(
            "{}={v:e} converged={} iterations={} residual={:.6e}",
            schedule.param(),
            out.report.converged,
            out.report.iterations,
            out.report.final_residual
        ));
        log.lines.extend(out.log.lines);
        let mut row = trend_row(
            &out.state,
            &stage_cfg,
            v,
            out.report.converged,
            out.report.iterations,
            out.report.final_residual,
        )?;
        if let Some(prev) = &state {
            let lat = ambient_for(&out.state);
            let a = extend_by_zero(&prev.fluid, lat)?;
            let b = extend_by_zero(&out.state.fluid, lat)?;
            row.cauchy = Some(l2_distance_ambient(&a, &b)?);
        }
        rows.push(row);
        state = Some(out.state);
    }
    Ok(ContinuationOutcome {
        param: schedule.param(),
        rows,
        state,
        failure,
        log,
    })
}

/// One row of the stiffness table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaRow {
    pub kappa: f64,
    pub lip_norm: f64,
    pub kappa_times_lip: f64,
    pub converged: bool,
    pub beta_margin: Option<f64>,
}

impl KappaRow {
    /// Converged with the correction inactive.
    pub fn admissible(&self) -> bool {
        self.converged && self.lip_norm <= 0.25
    }
}

#[derive(Debug, Clone)]
pub struct KappaSweep {
    pub kappa0: f64,
    /// Every evaluated κ, sorted ascending.
    pub rows: Vec<KappaRow>,
}

pub fn kappa_row(cfg: &SolverConfig, kappa: f64) -> Result<KappaRow> {
    let c = cfg.with_kappa(kappa)?;
    let row = match solve_fixed_point(&c) {
        Ok(out) => {
            let lip = out.state.lip();
            let p = pressure_report(&out.state.fluid, &c.law, &c.reg);
            KappaRow {
                kappa,
                lip_norm: lip,
                kappa_times_lip: kappa * lip,
                converged: out.report.converged,
                beta_margin: p.beta_margin,
            }
        }
        // A blowout or a failed inner solve counts as not admissible.
        Err(Error::Blowout(_)) | Err(Error::NotConverged { .. }) | Err(Error::Stage { .. }) => {
            KappaRow {
                kappa,
                lip_norm: f64::NAN,
                kappa_times_lip: f64::NAN,
                converged: false,
                beta_margin: None,
            }
        }
        Err(e) => return Err(e),
    };
    Ok(row)
}

fn eval_parallel(cfg: &SolverConfig, kappas: &[f64], threads: usize) -> Result<Vec<KappaRow>> {
    let threads = threads.max(1).min(kappas.len().max(1));
    let chunk = kappas.len().div_ceil(threads).max(1);
    let results: Vec<Result<Vec<KappaRow>>> = std::thread::scope(|s| {
        let handles: Vec<_> = kappas
            .chunks(chunk)
            .map(|ks| {
                s.spawn(move || {
                    ks.iter()
                        .map(|&k| kappa_row(cfg, k))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("kappa worker panicked"))
            .collect()
    });
    let mut rows = Vec::with_capacity(kappas.len());
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Smallest κ in [lo, hi] (to relative width `bracket`) whose solve converges
/// with lip(w) ≤ 1/4. A coarse geometric scan runs in parallel, then the
/// bracket around the last inadmissible scan point is bisected geometrically.
pub fn find_kappa0(
    cfg: &SolverConfig,
    lo: f64,
    hi: f64,
    scan_points: usize,
    bracket: f64,
    threads: usize,
) -> Result<KappaSweep> {
    if !(lo > 0.0 && hi > lo && bracket > 0.0 && scan_points >= 2) {
        return Err(Error::invalid(
            "kappa sweep needs 0 < lo < hi, bracket > 0 and at least two scan points",
        ));
    }
    let ratio = (hi / lo).powf(1.0 / (scan_points - 1) as f64);
    let mut kappas: Vec<f64> = (0..scan_points)
        .map(|k| lo * ratio.powi(k as i32))
        .collect();
    kappas[scan_points - 1] = hi;
    let mut rows = eval_parallel(cfg, &kappas, threads)?;
    rows.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));

    if !rows.last().expect("scan rows").admissible() {
        return Err(Error::invalid(format!(
            "kappa sweep: upper end {hi:e} is not admissible; raise kappa_hi"
        )));
    }
    if rows[0].admissible() {
        return Ok(KappaSweep { kappa0: lo, rows });
    }
    // Last inadmissible point followed by an admissible one.
    let i = rows
        .iter()
        .rposition(|r| !r.admissible())
        .expect("lo is inadmissible");
    let (mut a, mut b) = (rows[i].kappa, rows[i + 1].kappa);
    while b / a > 1.0 + bracket {
        let m = (a * b).sqrt();
        let r = kappa_row(cfg, m)?;
        rows.push(r);
        if r.admissible() {
            b = m;
        } else {
            a = m;
        }
    }
    rows.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));
    Ok(KappaSweep { kappa0: b, rows })
}
