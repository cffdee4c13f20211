use steadyfsi::config::{parse_config_str, RunConfig};
use steadyfsi::continuation::{run_continuation, ContinuationSchedule};
use steadyfsi::diagnostics::{diagnose, weak_residuals};
use steadyfsi::discrete::{assemble_plate_load, PhysicalParams};
use steadyfsi::eos::eval_p_eps_delta;
use steadyfsi::fixedpoint::{solve_fixed_point, theta_homotopy};
use steadyfsi::geometry::{build_grid, correct_displacement, extend_by_zero, AmbientLattice};
use steadyfsi::operators::{velocity_extension, ExtensionField, LiftOperator};
use steadyfsi::{BeamDisplacement, Error, VectorField};

fn cfg() -> steadyfsi::SolverConfig {
    RunConfig::default().solver_config().unwrap()
}

#[test]
fn fixed_point_is_deterministic() {
    let c = cfg().with_resolution(16);
    let a = solve_fixed_point(&c).unwrap();
    let b = solve_fixed_point(&c).unwrap();
    assert_eq!(a.state, b.state);
    assert_eq!(a.log.text(), b.log.text());
    assert!(a.report.converged);
}

#[test]
fn extension_ignores_the_interface() {
    let c = cfg();
    let w1 = BeamDisplacement::from_fn(0.25, 0.75, c.n_beam(), |x| {
        0.1 * ((x - 0.25) * (0.75 - x) * 16.0).powi(2)
    })
    .unwrap();
    let w2 = w1.scaled(-1.5);
    let g1 = build_grid(&correct_displacement(&w1), &c.layout).unwrap();
    let g2 = build_grid(&correct_displacement(&w2), &c.layout).unwrap();
    let u1 = velocity_extension(&c.bc, &g1).unwrap();
    let u2 = velocity_extension(&c.bc, &g2).unwrap();
    // nodes that sit at the same physical point carry bit-identical values
    let mut shared = 0;
    for k in 0..g1.n_nodes() {
        let (i, j) = g1.ij(k);
        if g1.z(i, j) == g2.z(i, j) {
            shared += 1;
            assert_eq!(u1.x[k].to_bits(), u2.x[k].to_bits());
            assert_eq!(u1.z[k].to_bits(), u2.z[k].to_bits());
        }
    }
    assert!(shared > g1.n_nodes() / 2);
    // the analytic field vanishes on the band the interface can reach
    let f = ExtensionField { bd: c.bc.clone() };
    for z in [-0.25, 0.0, 0.1, 0.25, 0.3] {
        assert_eq!(f.value(0.5, z), [0.0, 0.0]);
    }
}

#[test]
fn hydrostatic_plate_load() {
    let c = cfg().with_resolution(64);
    let w = BeamDisplacement::zeros(0.25, 0.75, c.n_beam()).unwrap();
    let grid = build_grid(&w, &c.layout).unwrap();
    let n = grid.n_nodes();
    let rho = vec![0.3; n];
    let zero = VectorField::zeros(n);
    let params = PhysicalParams::new(1.0, 1.0, 1.0).unwrap();
    let lift = LiftOperator::new(&grid).unwrap();
    let load =
        assemble_plate_load(&rho, &zero, &zero, &grid, &params, &c.law, &c.reg, &lift).unwrap();
    let p = eval_p_eps_delta(&c.law, &c.reg, 0.3).unwrap();
    // the fluid pushes the plate downwards: ℓ_i = −p ∫ψ_i = −p h on interior nodes
    let h = 1.0 / 64.0;
    for (i, l) in load
        .functional
        .iter()
        .enumerate()
        .skip(1)
        .take(load.functional.len() - 2)
    {
        assert!(
            (l + p * h).abs() <= 0.02 * p * h,
            "node {i}: {l} vs {}",
            -p * h
        );
    }
}

#[test]
fn homotopy_validates_schedule() {
    let c = cfg().with_resolution(16);
    assert!(matches!(
        theta_homotopy(&c, &[0.5, 0.25, 1.0]),
        Err(Error::Invalid(_))
    ));
    assert!(matches!(theta_homotopy(&c, &[0.5]), Err(Error::Invalid(_))));
}

#[test]
fn schedules_are_validated() {
    use steadyfsi::continuation::Param;
    assert!(ContinuationSchedule::new(Param::Delta, vec![0.1, 0.1]).is_err());
    assert!(ContinuationSchedule::new(Param::Eps, vec![0.1, -0.05]).is_err());
    assert!(ContinuationSchedule::new(Param::Kappa, vec![]).is_err());
    let d = ContinuationSchedule::halving_delta(0.1, 10, 0.02).unwrap();
    assert_eq!(d.values(), &[0.1, 0.05, 0.025, 0.02]);
}

#[test]
fn eps_continuation_is_flat_below_the_knot() {
    let c = cfg().with_resolution(16);
    let s = ContinuationSchedule::halving_eps(0.1, 3).unwrap();
    let out = run_continuation(&c, &s).unwrap();
    assert!(out.all_converged());
    // densities stay far below ρ̄ − ε, so the law does not change along the schedule
    for r in &out.rows[1..] {
        assert!(r.cauchy.unwrap() < 1e-6);
    }
}

#[test]
fn diagnostics_on_default_state() {
    let c = cfg().with_resolution(16);
    let out = solve_fixed_point(&c).unwrap();
    let d = diagnose(&out.state, &c, 1, 16, 0.5).unwrap();
    assert!(d.mass_balance.relative < 1e-10);
    assert!(d.bogovskii.closure_relative < 1e-6);
    assert!(d.pressure.beta_margin.unwrap() > 1.0);
    assert!(!d.correction_active);
    assert_eq!(d.weak_residual_mom, d.weak_residual_mom_uncorrected);
    let again = weak_residuals(&out.state, &c, 1, 16, true).unwrap();
    assert_eq!(again.momentum.to_bits(), d.weak_residual_mom.to_bits());
}

#[test]
fn ambient_extension_is_zero_outside() {
    let c = cfg().with_resolution(16);
    let out = solve_fixed_point(&c).unwrap();
    let lat = AmbientLattice { nx: 32, nz: 48 };
    let a = extend_by_zero(&out.state.fluid, lat).unwrap();
    // rows with z < 0 lie below the flat-ish interface
    for j in 0..lat.nz {
        for i in 0..lat.nx {
            let (_, z) = lat.point(i, j);
            if z < -0.01 {
                assert_eq!(a.rho[j * lat.nx + i], 0.0);
            }
        }
    }
    assert!(extend_by_zero(&out.state.fluid, AmbientLattice { nx: 8, nz: 8 }).is_err());
}

#[test]
fn config_errors_name_the_key() {
    let e = parse_config_str("[reg]\ndelta = -1.0\n")
        .unwrap_err()
        .to_string();
    assert!(e.contains("delta"), "{e}");
}
