use dualflow::benchio::epe;
use dualflow::operators::{build_pyramid, compute_derivatives, upsample_flow};
use dualflow::solvers::primal_energy;
use dualflow::{solve_flow, FlowError, FlowField, PyramidConfig64, ScalarField, SolverKind};

fn texture(x: f64, y: f64) -> f64 {
    0.5 + 0.2 * (0.45 * x).sin() * (0.3 * y).cos() + 0.15 * (0.23 * x + 0.37 * y).sin() + 0.1 * (0.7 * x - 0.2 * y).cos()
}

fn shifted_pair(n: usize, du: f64, dv: f64) -> (ScalarField, ScalarField) {
    (
        ScalarField::from_fn(n, n, |i, j| texture(j as f64, i as f64)),
        ScalarField::from_fn(n, n, |i, j| texture(j as f64 - du, i as f64 - dv)),
    )
}

#[test]
fn every_solver_recovers_a_diagonal_shift() {
    let (f0, f1) = shifted_pair(48, 1.5, -1.0);
    let gt = FlowField::constant(48, 48, 1.5, -1.0);
    for kind in SolverKind::ALL {
        let solution = solve_flow(&f0, &f1, &PyramidConfig64::for_kind(kind)).unwrap();
        let err = epe(&solution.flow, &gt).unwrap();
        assert!(err <= 0.5, "{kind}: {err}");
    }
}

#[test]
fn no_warp_increases_the_energy_it_minimizes() {
    let (f0, f1) = shifted_pair(64, 3.0, 0.0);
    for kind in SolverKind::ALL {
        let solution = solve_flow(&f0, &f1, &PyramidConfig64::for_kind(kind)).unwrap();
        for t in &solution.trace {
            assert!(t.energy <= t.initial_energy, "{kind}: {t:?}");
        }
    }
}

#[test]
fn runs_are_bit_identical() {
    let (f0, f1) = shifted_pair(32, 1.0, 0.5);
    for kind in [SolverKind::RpadmmII, SolverKind::Pdr] {
        let cfg = PyramidConfig64::for_kind(kind);
        let a = solve_flow(&f0, &f1, &cfg).unwrap();
        let b = solve_flow(&f0, &f1, &cfg).unwrap();
        assert_eq!(a.flow, b.flow);
        assert_eq!(a.illumination, b.illumination);
    }
}

#[test]
fn static_pair_gives_zero_flow_and_zero_energy() {
    let (f0, _) = shifted_pair(32, 0.0, 0.0);
    let solution = solve_flow(&f0, &f0, &PyramidConfig64::default()).unwrap();
    assert!(solution.flow.u.as_slice().iter().chain(solution.flow.v.as_slice()).all(|&x| x == 0.0));
    let data = compute_derivatives(&f0, &f0, &solution.flow, 0.05).unwrap();
    let e = primal_energy(&solution.illumination, &solution.flow, 40.0, &data).unwrap();
    assert_eq!(e, 0.0);
}

#[test]
fn trace_covers_every_level_and_warp() {
    let (f0, f1) = shifted_pair(64, 1.0, 0.0);
    let mut cfg = PyramidConfig64::default();
    cfg.levels = Some(3);
    cfg.warps_per_level = 2;
    let solution = solve_flow(&f0, &f1, &cfg).unwrap();
    let visited: Vec<(usize, usize)> = solution.trace.iter().map(|t| (t.level, t.warp)).collect();
    assert_eq!(visited, vec![(2, 0), (2, 1), (1, 0), (1, 1), (0, 0), (0, 1)]);
    assert_eq!(solution.flow.dims(), (64, 64));
}

#[test]
fn bad_configurations_are_rejected() {
    let (f0, f1) = shifted_pair(16, 0.0, 0.0);
    let mut cfg = PyramidConfig64::default();
    cfg.levels = Some(3);
    assert!(matches!(solve_flow(&f0, &f1, &cfg), Err(FlowError::Config(_))));

    let mut cfg = PyramidConfig64::for_kind(SolverKind::RpadmmI);
    cfg.solver.r = 2.0;
    let msg = solve_flow(&f0, &f1, &cfg).unwrap_err().to_string();
    assert!(msg.contains("(0, (sqrt(5)+1)/2)"), "{msg}");

    let mut cfg = PyramidConfig64::for_kind(SolverKind::ZachPadmm);
    cfg.solver.beta = 0.05;
    assert!(matches!(solve_flow(&f0, &f1, &cfg), Err(FlowError::Config(_))));

    let g = ScalarField::zeros(16, 12);
    assert!(matches!(solve_flow(&f0, &g, &PyramidConfig64::default()), Err(FlowError::Dimension { .. })));
}

#[test]
fn pyramid_levels_and_prolongation_agree() {
    let (f0, _) = shifted_pair(40, 0.0, 0.0);
    let levels = build_pyramid(&f0, 3, 0.5).unwrap();
    assert_eq!(levels[2].dims(), (10, 10));
    let coarse = FlowField::constant(10, 10, 0.5, -0.25);
    let fine = upsample_flow(&coarse, 40, 40);
    assert!(fine.u.as_slice().iter().all(|&x| (x - 2.0).abs() < 1e-12));
    assert!(fine.v.as_slice().iter().all(|&x| (x + 1.0).abs() < 1e-12));
}

#[test]
fn single_precision_pipeline_runs() {
    let (f0, f1) = shifted_pair(32, 1.0, 0.0);
    let (f0, f1) = (f0.cast::<f32>(), f1.cast::<f32>());
    let solution = solve_flow(&f0, &f1, &dualflow::PyramidConfig32::default()).unwrap();
    let gt = dualflow::FlowField32::constant(32, 32, 1.0, 0.0);
    assert!(epe(&solution.flow, &gt).unwrap() < 0.5);
}
