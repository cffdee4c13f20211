//! End-to-end acceptance suite. Each criterion prints one PASS/FAIL line; the
//! test fails if any criterion does.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use steadyfsi::config::{parse_config_str, RunConfig};
use steadyfsi::continuation::{find_kappa0, kappa_row, run_continuation, ContinuationSchedule};
use steadyfsi::diagnostics::{weak_residuals, WEAK_RESIDUAL_TOL};
use steadyfsi::discrete::clamped_beam;
use steadyfsi::eos::{build_renorm_pair, eval_dp_eps, eval_p_eps};
use steadyfsi::fixedpoint::{
    apply_t, initial_state, solve_fixed_point, state_distance, theta_homotopy, RunLog,
};
use steadyfsi::geometry::{build_grid, correct_displacement, lipschitz_norm};
use steadyfsi::operators::{harmonic_lift, BogovskiiSolver, LiftOperator};
use steadyfsi::{BeamDisplacement, MappedGrid, SolverConfig};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: String) -> Check {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn default_cfg() -> SolverConfig {
    RunConfig::default().solver_config().unwrap()
}

fn with_peak(peak: f64) -> SolverConfig {
    parse_config_str(&format!(
        "[bc]\nprofile = {{ kind = \"parabolic\", peak = {peak} }}\n"
    ))
    .unwrap()
    .solver_config()
    .unwrap()
}

fn bump_beam(amp: f64, n: usize) -> BeamDisplacement {
    BeamDisplacement::from_fn(0.25, 0.75, n, |x| {
        let s = (x - 0.25) / 0.5;
        amp * (std::f64::consts::PI * s).sin().powi(2)
    })
    .unwrap()
}

fn c1_eos() -> Check {
    let cfg = default_cfg();
    let (law, reg) = (cfg.law, cfg.reg);
    let rb = law.rho_bar;
    let mut prev = law.eval_p(0.0).unwrap();
    for k in 1..1000 {
        let p = law.eval_p(rb * k as f64 / 1000.0).unwrap();
        if p <= prev || p.is_nan() {
            return Err(format!("p not increasing at sample {k}"));
        }
        prev = p;
    }
    let near = law.eval_p(rb * (1.0 - 1e-6)).unwrap();
    if near <= 1e5 * law.a || near.is_nan() {
        return Err(format!("p(rho_bar(1-1e-6)) = {near:e}"));
    }
    let knot = rb - reg.eps;
    for k in 0..=1000 {
        let r = knot * k as f64 / 1000.0;
        if eval_p_eps(&law, &reg, r).unwrap() != law.eval_p(r).unwrap() {
            return Err(format!("p_eps differs from p at {r}"));
        }
    }
    let h = 1e-7;
    let (pl, pr) = (
        law.eval_p(knot).unwrap(),
        eval_p_eps(&law, &reg, knot + h).unwrap(),
    );
    let (dl, dr) = (
        law.eval_dp(knot).unwrap(),
        eval_dp_eps(&law, &reg, knot + h).unwrap(),
    );
    let c0 = (pr - pl - h * dl).abs() / pl;
    let c1 = (dr - dl).abs() / dl;
    if c0 > 1e-6 || c1 > 1e-6 {
        return Err(format!("knot mismatch value {c0:e} slope {c1:e}"));
    }
    let pair = build_renorm_pair(&law, &reg, 4096).unwrap();
    let id = pair.identity_residual();
    let g2 = pair.min_g2();
    let floor = reg.delta.sqrt() / rb;
    ensure(
        id <= 1e-8 && g2 >= floor,
        format!("identity residual {id:.2e}, min G'' {g2:.4} (floor {floor:.4})"),
    )
}

fn c2_beam() -> Check {
    let exact = 1.0 / 384.0;
    // 200 cells so that the midpoint is a node
    let w = clamped_beam(&vec![1.0; 201], 1.0, 1.0).unwrap();
    let rel = (w[100] - exact).abs() / exact;
    let err = |cells: usize| {
        let w = clamped_beam(&vec![1.0; cells + 1], 1.0, 1.0).unwrap();
        (w[cells / 2] - exact).abs()
    };
    let ratios = [err(50) / err(100), err(100) / err(200)];
    let ok = rel < 1e-4 && ratios.iter().all(|r| (3.2..=4.8).contains(r));
    ensure(
        ok,
        format!(
            "midpoint rel err {rel:.3e} at h = 1/200 (< 1e-4), ratios {:.3} {:.3}",
            ratios[0], ratios[1]
        ),
    )
}

fn c3_barrier() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut identity_checked = 0;
    for _ in 0..1000 {
        let n = rng.random_range(5..65);
        let amp = 10f64.powf(rng.random_range(-4.0..1.0));
        let mut vals: Vec<f64> = (0..n).map(|_| amp * rng.random_range(-1.0..1.0)).collect();
        vals[0] = 0.0;
        vals[n - 1] = 0.0;
        let w = BeamDisplacement::new(0.25, 0.75, vals).unwrap();
        let c = correct_displacement(&w);
        worst = worst.max(c.max_abs());
        if lipschitz_norm(&w) <= 0.25 {
            identity_checked += 1;
            if c.values
                .iter()
                .zip(&w.values)
                .any(|(a, b)| a.to_bits() != b.to_bits())
            {
                return Err("correction altered an admissible state".into());
            }
        }
    }
    ensure(
        worst <= 0.25 + 1e-15 && identity_checked > 0,
        format!("max |w_cor| = {worst:.6}, identity checked on {identity_checked} states"),
    )
}

fn c4_mass_balance() -> Check {
    let mut worst: f64 = 0.0;
    let mut solves = 0;
    for peak in [0.0, 0.5, 2.0] {
        let cfg = with_peak(peak);
        let mut s = initial_state(&cfg).unwrap();
        let mut log = RunLog::new();
        for _ in 0..6 {
            if s.continuity_converged {
                worst = worst.max(s.mass_balance.relative);
                solves += 1;
            }
            s = apply_t(&s, &cfg, &mut log).unwrap();
        }
        let out = solve_fixed_point(&cfg).unwrap();
        worst = worst.max(out.state.mass_balance.relative);
        solves += 1;
    }
    ensure(
        worst <= 1e-10,
        format!("worst relative imbalance {worst:.2e} over {solves} solves"),
    )
}

fn c5_density_bounds() -> Check {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut runs = 0;
    let mut cfgs = vec![default_cfg(), with_peak(0.0), with_peak(2.0)];
    let base = default_cfg();
    for d in [0.05, 0.025] {
        cfgs.push(base.with_reg(base.reg.eps, d).unwrap());
    }
    for cfg in &cfgs {
        let out = solve_fixed_point(cfg).unwrap();
        if out.report.converged {
            runs += 1;
            for &r in &out.state.fluid.rho {
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
    }
    let rb = base.law.rho_bar;
    ensure(
        runs == cfgs.len() && lo >= -1e-12 && hi < rb,
        format!(
            "rho in [{lo:.3e}, {hi:.4}] over {runs}/{} converged runs",
            cfgs.len()
        ),
    )
}

fn deformed_grid(n: usize, amp: f64) -> MappedGrid {
    let cfg = default_cfg().with_resolution(n);
    let w = bump_beam(amp, cfg.n_beam());
    build_grid(&correct_displacement(&w), &cfg.layout).unwrap()
}

fn c6_lift() -> Check {
    let grid = deformed_grid(64, 0.04);
    let lift = LiftOperator::new(&grid).unwrap();
    let nb = grid.n_beam();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut trace: f64 = 0.0;
    let mut direct: f64 = 0.0;
    let mut maxp: f64 = 0.0;
    let mut lin: f64 = 0.0;
    for _ in 0..5 {
        let mut a: Vec<f64> = (0..nb).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut b: Vec<f64> = (0..nb).map(|_| rng.random_range(-1.0..1.0)).collect();
        for v in [&mut a, &mut b] {
            v[0] = 0.0;
            v[nb - 1] = 0.0;
        }
        let ra = lift.apply(&a).unwrap();
        let rb = lift.apply(&b).unwrap();
        let da = harmonic_lift(&a, &grid).unwrap();
        let bound = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        maxp = maxp.max(ra.iter().fold(0.0f64, |m, v| m.max(v.abs())) - bound);
        for (i, &psi) in a.iter().enumerate() {
            let k = grid.node(grid.gamma_cols.0 + i, 0);
            trace = trace.max((ra[k] - psi).abs()).max((da.z[k] - psi).abs());
        }
        for (x, y) in ra.iter().zip(&da.z) {
            direct = direct.max((x - y).abs());
        }
        let comb: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - 3.0 * y).collect();
        let rc = lift.apply(&comb).unwrap();
        for ((c, x), y) in rc.iter().zip(&ra).zip(&rb) {
            lin = lin.max((c - (2.0 * x - 3.0 * y)).abs());
        }
    }
    ensure(
        maxp <= 1e-12 && trace <= 1e-10 && direct <= 1e-10 && lin <= 1e-9,
        format!(
            "max principle excess {maxp:.1e}, trace {trace:.1e}, direct {direct:.1e}, linearity {lin:.1e}"
        ),
    )
}

fn c7_bogovskii() -> Check {
    let grid = deformed_grid(32, 0.03);
    let solver = BogovskiiSolver::new(&grid).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mut g: Vec<f64> = (0..grid.n_nodes())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        g.iter_mut().for_each(|v| *v -= mean);
        worst = worst.max(solver.solve(&g).unwrap().residual);
    }
    let cfg = default_cfg();
    let mut consts = Vec::new();
    for amp in [0.0, 0.02, 0.05, 0.1, 0.5] {
        let w = bump_beam(amp, cfg.n_beam());
        let grid = build_grid(&correct_displacement(&w), &cfg.layout).unwrap();
        let s = BogovskiiSolver::new(&grid).unwrap();
        let mut c: f64 = 0.0;
        for m in 1..=3 {
            let g: Vec<f64> = (0..grid.n_nodes())
                .map(|k| {
                    let (i, j) = grid.ij(k);
                    let (x, e) = (grid.x(i), grid.eta(j));
                    (m as f64 * std::f64::consts::PI * x).cos() * (1.0 + e)
                })
                .collect();
            c = c.max(s.solve(&g).unwrap().constant);
        }
        consts.push(c);
    }
    let spread = consts.iter().cloned().fold(0.0, f64::max)
        / consts.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure(
        worst <= 1e-6 && spread <= 2.0,
        format!("worst residual {worst:.2e}, constant spread {spread:.3} over {consts:.3?}"),
    )
}

fn c8_fixed_point() -> Check {
    let cfg = default_cfg();
    let direct = solve_fixed_point(&cfg).unwrap();
    let homotopy = theta_homotopy(&cfg, &[0.25, 0.5, 0.75, 1.0]).unwrap();
    let gap = state_distance(&direct.state, &homotopy.state).unwrap();
    let zero = solve_fixed_point(&with_peak(0.0)).unwrap();
    let zero_ok = zero.report.converged
        && zero.report.iterations == 1
        && zero.state.w.max_abs() == 0.0
        && zero.state.fluid.u.max_abs() == 0.0
        && zero.state.fluid.rho.iter().all(|&r| r == 0.0);
    ensure(
        direct.report.converged
            && direct.report.final_residual < 1e-8
            && direct.report.iterations <= 200
            && homotopy.converged
            && gap <= 1e-6
            && zero_ok,
        format!(
            "default: {} iterations, residual {:.2e}; homotopy gap {gap:.2e}; zero data: {} iteration(s)",
            direct.report.iterations, direct.report.final_residual, zero.report.iterations
        ),
    )
}

fn c9_stiffness() -> Check {
    let rc = RunConfig::default();
    let cfg = rc.solver_config().unwrap();
    let sw = &rc.sweep;
    let sweep = find_kappa0(
        &cfg,
        sw.kappa_lo,
        sw.kappa_hi,
        sw.scan_points,
        sw.bracket,
        4,
    )
    .map_err(|e| e.to_string())?;
    let k0 = sweep.kappa0;
    let below = sweep
        .rows
        .iter()
        .filter(|r| r.kappa < k0)
        .map(|r| r.kappa)
        .fold(0.0, f64::max);
    let width = k0 / below - 1.0;
    let at = sweep
        .rows
        .iter()
        .find(|r| r.kappa == k0)
        .map(|r| r.admissible());
    let under = kappa_row(&cfg, k0 / 1.1).map_err(|e| e.to_string())?;
    let prods: Vec<f64> = sweep
        .rows
        .iter()
        .filter(|r| r.converged)
        .map(|r| r.kappa_times_lip)
        .collect();
    let spread = prods.iter().cloned().fold(0.0, f64::max)
        / prods.iter().cloned().fold(f64::INFINITY, f64::min);

    let c2 = cfg.with_kappa(2.0 * k0).unwrap();
    let out = solve_fixed_point(&c2).unwrap();
    let cor = weak_residuals(&out.state, &c2, 9, 64, true).unwrap();
    let unc = weak_residuals(&out.state, &c2, 9, 64, false).unwrap();
    let same_tol =
        out.report.converged && cor.passes(WEAK_RESIDUAL_TOL) && unc.passes(WEAK_RESIDUAL_TOL);
    ensure(
        width <= 0.05 && at == Some(true) && !under.admissible() && spread < 10.0 && same_tol,
        format!(
            "kappa0 {k0:.4e}, bracket width {width:.3}, lip at kappa0/1.1 {:.4}, kappa*lip spread {spread:.3}, \
             2kappa0 residuals corrected ({:.3e}, {:.3e}) uncorrected ({:.3e}, {:.3e})",
            under.lip_norm, cor.continuity, cor.momentum, unc.continuity, unc.momentum
        ),
    )
}

fn c10_weak_residuals() -> Check {
    let base = default_cfg();
    let mut rows = Vec::new();
    for n in [32, 64, 128] {
        let cfg = base.with_resolution(n);
        let out = solve_fixed_point(&cfg).unwrap();
        let a = weak_residuals(&out.state, &cfg, 11, 64, true).unwrap();
        if n == 32 {
            let b = weak_residuals(&out.state, &cfg, 11, 64, true).unwrap();
            if a.continuity.to_bits() != b.continuity.to_bits()
                || a.momentum.to_bits() != b.momentum.to_bits()
            {
                return Err("weak residuals not reproducible".into());
            }
        }
        rows.push((a.continuity, a.momentum));
    }
    let rc = [rows[1].0 / rows[0].0, rows[2].0 / rows[1].0];
    let rm = [rows[1].1 / rows[0].1, rows[2].1 / rows[1].1];
    ensure(
        rc.iter().chain(&rm).all(|r| *r < 0.6),
        format!(
            "continuity ratios {:.3} {:.3}, momentum ratios {:.3} {:.3}",
            rc[0], rc[1], rm[0], rm[1]
        ),
    )
}

fn c11_trends() -> Check {
    let rc = RunConfig::default();
    let cfg = rc.solver_config().unwrap();
    let s = ContinuationSchedule::halving_delta(
        cfg.reg.delta,
        rc.continuation.stages,
        rc.continuation.delta_floor,
    )
    .unwrap();
    let out = run_continuation(&cfg, &s).unwrap();
    let spread = |f: &dyn Fn(&steadyfsi::continuation::TrendRow) -> f64| {
        let v: Vec<f64> = out.rows.iter().map(f).collect();
        v.iter().cloned().fold(0.0, f64::max) / v.iter().cloned().fold(f64::INFINITY, f64::min)
    };
    let e = spread(&|r| r.energy_ratio);
    let g = spread(&|r| r.delta34_grad_rho);
    for r in &out.rows {
        println!(
            "    delta={:.4} converged={} energy_ratio={:.4} delta34_grad_rho={:.4e} rho_max={:.4}",
            r.delta, r.converged, r.energy_ratio, r.delta34_grad_rho, r.rho_max
        );
    }
    ensure(
        out.all_converged() && out.rows.len() == rc.continuation.stages && e < 2.0 && g < 10.0,
        format!(
            "{} stages, energy_ratio spread {e:.3}, delta^(3/4)|grad rho| spread {g:.3}",
            out.rows.len()
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 11] = [
        ("C1 eos suite", c1_eos),
        ("C2 beam oracle", c2_beam),
        ("C3 correction barrier", c3_barrier),
        ("C4 mass balance", c4_mass_balance),
        ("C5 density bounds", c5_density_bounds),
        ("C6 harmonic lift", c6_lift),
        ("C7 bogovskii", c7_bogovskii),
        ("C8 fixed point", c8_fixed_point),
        ("C9 stiffness threshold", c9_stiffness),
        ("C10 weak residuals", c10_weak_residuals),
        ("C11 continuation trends", c11_trends),
    ];
    let mut failed = Vec::new();
    for (name, f) in criteria {
        match f() {
            Ok(msg) => println!("[PASS] {name}: {msg}"),
            Err(msg) => {
                println!("[FAIL] {name}: {msg}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
