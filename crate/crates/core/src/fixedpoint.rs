//! The operator 𝒯 (continuity, then momentum, then plate, each on the grid of
//! the corrected previous deflection) and its damped Picard iteration.

use crate::config::SolverConfig;
use crate::discrete::{
    assemble_plate_load, beam_diff, beam_h2_norm, h1_norm, solve_beam, solve_continuity,
    solve_momentum, transfer_vector, FluidState, MassBalance, VectorField,
};
use crate::error::{Error, Result, Stage, StageExt};
use crate::geometry::{build_grid, correct_displacement, f_cor, lipschitz_norm, BeamDisplacement};
use crate::operators::{velocity_extension, LiftOperator};

/// Guard against runaway deflections.
pub const BLOWOUT_LIMIT: f64 = 10.0;

/// Text log, one entry per line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunLog {
    pub lines: Vec<String>,
}

impl RunLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn text(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub fluid: FluidState,
    pub w: BeamDisplacement,
    w_cor: BeamDisplacement,
    /// ‖u − ũ‖_{H¹} + ‖w − w̃‖_{H²} against the state this one was computed from.
    pub residual: f64,
    pub iteration: usize,
    pub continuity_converged: bool,
    pub mass_balance: MassBalance,
}

impl IterateState {
    pub fn new(
        fluid: FluidState,
        w: BeamDisplacement,
        residual: f64,
        iteration: usize,
        continuity_converged: bool,
        mass_balance: MassBalance,
    ) -> Self {
        let w_cor = correct_displacement(&w);
        Self {
            fluid,
            w,
            w_cor,
            residual,
            iteration,
            continuity_converged,
            mass_balance,
        }
    }

    pub fn w_cor(&self) -> &BeamDisplacement {
        &self.w_cor
    }

    pub fn lip(&self) -> f64 {
        lipschitz_norm(&self.w)
    }
}

/// ‖u_a − u_b‖_{H¹} + ‖w_a − w_b‖_{H²}, with u_a resampled onto b's grid.
pub fn state_distance(a: &IterateState, b: &IterateState) -> Result<f64> {
    let ua = transfer_vector(&a.fluid.u, &a.fluid.grid, &b.fluid.grid)?;
    let diff = VectorField {
        x: b.fluid.u.x.iter().zip(&ua.x).map(|(p, q)| p - q).collect(),
        z: b.fluid.u.z.iter().zip(&ua.z).map(|(p, q)| p - q).collect(),
    };
    Ok(h1_norm(&diff, &b.fluid.grid) + beam_h2_norm(&beam_diff(&a.w, &b.w)))
}

fn state_from_velocity(
    cfg: &SolverConfig,
    w: BeamDisplacement,
    u_on: impl FnOnce(&crate::geometry::MappedGrid) -> Result<VectorField>,
) -> Result<IterateState> {
    let grid = build_grid(&correct_displacement(&w), &cfg.layout).stage(Stage::Grid)?;
    let u = u_on(&grid)?;
    let c = solve_continuity(&u, &grid, &cfg.law, &cfg.reg, &cfg.bc, &cfg.continuity)
        .stage(Stage::Continuity)?;
    Ok(IterateState::new(
        FluidState {
            grid,
            rho: c.rho,
            u,
        },
        w,
        0.0,
        0,
        c.converged,
        c.balance,
    ))
}

/// w = 0, u = the strip extension, ρ from the continuity solve at that u.
pub fn initial_state(cfg: &SolverConfig) -> Result<IterateState> {
    let w = BeamDisplacement::zeros(cfg.gamma.0, cfg.gamma.1, cfg.n_beam())?;
    state_from_velocity(cfg, w, |g| velocity_extension(&cfg.bc, g))
}

/// u = 0, w = 0 (the θ = 0 end of the homotopy).
pub fn zero_state(cfg: &SolverConfig) -> Result<IterateState> {
    let w = BeamDisplacement::zeros(cfg.gamma.0, cfg.gamma.1, cfg.n_beam())?;
    state_from_velocity(cfg, w, |g| Ok(VectorField::zeros(g.n_nodes())))
}

/// One application of θ𝒯.
pub fn apply_t_theta(
    prev: &IterateState,
    cfg: &SolverConfig,
    theta: f64,
    log: &mut RunLog,
) -> Result<IterateState> {
    let grid = build_grid(prev.w_cor(), &cfg.layout).stage(Stage::Grid)?;
    let u_tilde = transfer_vector(&prev.fluid.u, &prev.fluid.grid, &grid).stage(Stage::Grid)?;

    let cont = solve_continuity(
        &u_tilde,
        &grid,
        &cfg.law,
        &cfg.reg,
        &cfg.bc,
        &cfg.continuity,
    )
    .stage(Stage::Continuity)?;
    log.push(format!(
        "stage=continuity sweeps={} converged={} mass_balance={:.3e}",
        cont.sweeps, cont.converged, cont.balance.absolute
    ));

    let u = solve_momentum(
        &cont.rho,
        &u_tilde,
        &grid,
        &cfg.params,
        &cfg.law,
        &cfg.reg,
        &cfg.bc,
    )
    .stage(Stage::Momentum)?;
    log.push("stage=momentum");

    let lift = LiftOperator::new(&grid).stage(Stage::Lift)?;
    let load = assemble_plate_load(
        &cont.rho,
        &u,
        &u_tilde,
        &grid,
        &cfg.params,
        &cfg.law,
        &cfg.reg,
        &lift,
    )
    .stage(Stage::Plate)?;
    let w = solve_beam(&load.density, cfg.params.kappa, cfg.gamma).stage(Stage::Plate)?;
    log.push(format!(
        "stage=plate max_load={:.6e}",
        load.density.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    ));

    let (u, w) = if theta == 1.0 {
        (u, w)
    } else {
        (u.scaled(theta), w.scaled(theta))
    };
    let max_w = w.max_abs();
    if !(max_w <= BLOWOUT_LIMIT) {
        return Err(Error::Blowout(max_w));
    }
    let du = VectorField {
        x: u.x.iter().zip(&u_tilde.x).map(|(p, q)| p - q).collect(),
        z: u.z.iter().zip(&u_tilde.z).map(|(p, q)| p - q).collect(),
    };
    let residual = h1_norm(&du, &grid) + beam_h2_norm(&beam_diff(&w, &prev.w));
    Ok(IterateState::new(
        FluidState {
            grid,
            rho: cont.rho,
            u,
        },
        w,
        residual,
        prev.iteration + 1,
        cont.converged,
        cont.balance,
    ))
}

pub fn apply_t(prev: &IterateState, cfg: &SolverConfig, log: &mut RunLog) -> Result<IterateState> {
    apply_t_theta(prev, cfg, 1.0, log)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub converged: bool,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub final_residual: f64,
}

#[derive(Debug, Clone)]
pub struct FixedPointOutcome {
    pub state: IterateState,
    pub report: ConvergenceReport,
    pub log: RunLog,
}

/// Smallest damping factor the adaptive relaxation may reach.
pub const MIN_RELAX: f64 = 1.0 / 64.0;

/// Damped iteration s ← (1 − ω) s + ω θ𝒯(s) from `start`. The residual is
/// that of the undamped map, ‖θ𝒯(s) − s‖; on convergence θ𝒯(s) is returned.
/// ω starts at the configured value and is halved whenever the residual grows.
pub fn iterate_from(
    cfg: &SolverConfig,
    start: IterateState,
    theta: f64,
) -> Result<FixedPointOutcome> {
    let mut log = RunLog::new();
    let mut omega = cfg.relax;
    let mut prev_r = f64::INFINITY;
    let mut s = start;
    s.iteration = 0;
    let mut history = Vec::new();
    let mut best: Option<IterateState> = None;
    for k in 1..=cfg.max_outer {
        let t = apply_t_theta(&s, cfg, theta, &mut log)?;
        let r = t.residual;
        history.push(r);
        let lip = t.lip();
        log.push(format!(
            "iter={k} residual={r:.6e} max_w={:.6e} lip={lip:.6e} fcor_arg={lip:.6e} fcor={:.6} mass_balance={:.3e}",
            t.w.max_abs(),
            f_cor(lip),
            t.mass_balance.absolute
        ));
        if !r.is_finite() {
            return Err(Error::NotConverged {
                context: "fixed point",
                iterations: k,
                residual: r,
            });
        }
        if r < cfg.tol {
            let mut out = t;
            out.iteration = k;
            log.push(format!("converged iterations={k} residual={r:.6e}"));
            return Ok(FixedPointOutcome {
                state: out,
                report: ConvergenceReport {
                    converged: true,
                    iterations: k,
                    final_residual: r,
                    residual_history: history,
                },
                log,
            });
        }
        if best.as_ref().is_none_or(|b| r < b.residual) {
            let mut b = t.clone();
            b.iteration = k;
            best = Some(b);
        }
        if r > prev_r && omega > MIN_RELAX {
            omega = (0.5 * omega).max(MIN_RELAX);
            log.push(format!("relax={omega}"));
        }
        prev_r = r;
        let u_tilde = transfer_vector(&s.fluid.u, &s.fluid.grid, &t.fluid.grid)?;
        let u = u_tilde.lerp(&t.fluid.u, omega);
        let w = BeamDisplacement {
            values: s
                .w
                .values
                .iter()
                .zip(&t.w.values)
                .map(|(a, b)| (1.0 - omega) * a + omega * b)
                .collect(),
            ..t.w.clone()
        };
        s = IterateState::new(
            FluidState {
                grid: t.fluid.grid,
                rho: t.fluid.rho,
                u,
            },
            w,
            r,
            k,
            t.continuity_converged,
            t.mass_balance,
        );
    }
    let best = best.expect("at least one iteration");
    let final_residual = best.residual;
    log.push(format!(
        "not converged after {} iterations; best residual={final_residual:.6e}",
        cfg.max_outer
    ));
    Ok(FixedPointOutcome {
        state: best,
        report: ConvergenceReport {
            converged: false,
            iterations: cfg.max_outer,
            final_residual,
            residual_history: history,
        },
        log,
    })
}

pub fn solve_fixed_point(cfg: &SolverConfig) -> Result<FixedPointOutcome> {
    iterate_from(cfg, initial_state(cfg)?, 1.0)
}

#[derive(Debug, Clone)]
pub struct HomotopyStage {
    pub theta: f64,
    pub report: ConvergenceReport,
    pub max_w: f64,
}

#[derive(Debug, Clone)]
pub struct HomotopyOutcome {
    pub state: IterateState,
    pub stages: Vec<HomotopyStage>,
    pub converged: bool,
    pub log: RunLog,
}

/// Solves (u, w) = θ𝒯(u, w) along an increasing schedule, warm-starting each
/// stage from the last, beginning at the zero state.
pub fn theta_homotopy(cfg: &SolverConfig, schedule: &[f64]) -> Result<HomotopyOutcome> {
    let ok = !schedule.is_empty()
        && schedule.windows(2).all(|p| p[0] < p[1])
        && schedule.iter().all(|t| (0.0..=1.0).contains(t))
        && *schedule.last().unwrap() == 1.0;
    if !ok {
        return Err(Error::invalid(
            "theta schedule must increase strictly within [0, 1] and end at 1",
        ));
    }
    let mut state = zero_state(cfg)?;
    let mut stages = Vec::new();
    let mut log = RunLog::new();
    let mut converged = true;
    for &theta in schedule {
        let out = iterate_from(cfg, state, theta)?;
        log.push(format!(
            "theta={theta} converged={} iterations={}",
            out.report.converged, out.report.iterations
        ));
        log.lines.extend(out.log.lines);
        converged &= out.report.converged;
        stages.push(HomotopyStage {
            theta,
            max_w: out.state.w.max_abs(),
            report: out.report,
        });
        state = out.state;
    }
    Ok(HomotopyOutcome {
        state,
        stages,
        converged,
        log,
    })
}
