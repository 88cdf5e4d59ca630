//! Acceptance suite. Prints one PASS/FAIL/SKIP line per criterion and exits
//! non-zero when any executed criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dualflow::benchio::{self, data_root_from_env, locate_sequence};
use dualflow::grid::{Field, VectorField4};
use dualflow::operators::{compute_derivatives, divergence, grad_div_adjoint, gradient, laplacian_apply};
use dualflow::prox::{project_p, project_q, project_s, resolvent_pixel, DualState};
use dualflow::solvers::{
    dual_objective, max_residual, primal_energy, rpadmm1_step, rpadmm2_step, srbgs_preconditioner_inverse, step,
    zach_padmm_step,
};
use dualflow::{
    solve_flow, FlowField, FlowField32, ImageData64, PyramidConfig64, ScalarField, SolverConfig64, SolverKind,
    SolverState64, VectorField2,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

type Check = fn() -> Outcome;

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn field(rng: &mut ChaCha8Rng, w: usize, h: usize, amp: f64) -> ScalarField {
    ScalarField::from_fn(w, h, |_, _| rng.gen_range(-amp..amp))
}

fn vec2(rng: &mut ChaCha8Rng, w: usize, h: usize, amp: f64) -> VectorField2 {
    VectorField2::from_channels(field(rng, w, h, amp), field(rng, w, h, amp)).unwrap()
}

fn vec4(rng: &mut ChaCha8Rng, w: usize, h: usize, amp: f64) -> VectorField4<f64> {
    VectorField4::from_parts(vec2(rng, w, h, amp), vec2(rng, w, h, amp)).unwrap()
}

fn operator_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (w, h) = (rng.gen_range(1..=64), rng.gen_range(1..=64));
        let f = field(&mut rng, w, h, 1.0);
        let v = vec2(&mut rng, w, h, 1.0);
        let g = gradient(&f);
        let lhs = g.inner_product(&v).unwrap();
        let rhs = -f.inner_product(&divergence(&v)).unwrap();
        let scale = g.norm_squared().sqrt() * v.norm_squared().sqrt();
        if scale > 0.0 {
            worst = worst.max((lhs - rhs).abs() / scale);
        }
    }

    let mut p = vec2(&mut rng, 64, 64, 1.0);
    let mut estimate = 0.0;
    for _ in 0..2000 {
        let next = grad_div_adjoint(&p);
        let norm = next.norm_squared().sqrt();
        estimate = next.inner_product(&p).unwrap() / p.norm_squared();
        p = next.scaled(1.0 / norm);
    }
    ensure(
        worst <= 1e-10 && estimate <= 8.0 + 1e-6,
        format!("adjointness rel err {worst:.2e}, power iteration {estimate:.9}"),
    )
}

/// Minimizer of `lambda*|rho0 + e.dx| + |dx|^2/(2 sigma)` by bisection on the
/// subgradient along `e`, the only direction the data term sees.
fn brute_force_resolvent(x: [f64; 3], e: [f64; 3], it: f64, sigma: f64, lambda: f64) -> [f64; 3] {
    let e2: f64 = e.iter().map(|c| c * c).sum();
    if e2 == 0.0 {
        return x;
    }
    let rho0 = e[0] * x[0] + e[1] * x[1] + e[2] * x[2] + it;
    // objective(t) = lambda*|rho0 - t e2| + t^2 e2 / (2 sigma) along x - t e
    let subgrad = |t: f64| {
        let r = rho0 - t * e2;
        let sign = if r > 0.0 { 1.0 } else if r < 0.0 { -1.0 } else { 0.0 };
        t * e2 / sigma - lambda * e2 * sign
    };
    let (mut lo, mut hi) = (-2.0 * sigma * lambda - 1.0, 2.0 * sigma * lambda + 1.0);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if subgrad(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // The kink, if bracketed, is the exact minimizer.
    let kink = rho0 / e2;
    let t = if lo <= kink && kink <= hi { kink } else { 0.5 * (lo + hi) };
    [x[0] - t * e[0], x[1] - t * e[1], x[2] - t * e[2]]
}

fn prox_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst: f64 = 0.0;
    for beta in [0.0, 0.05] {
        for _ in 0..1000 {
            let x = [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            let (ix, iy, it) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let sigma = rng.gen_range(0.05..5.0);
            let lambda = rng.gen_range(0.1..50.0);
            let r = resolvent_pixel(x[0], x[1], x[2], beta, ix, iy, it, sigma, lambda);
            let oracle = brute_force_resolvent(x, [beta, ix, iy], it, sigma, lambda);
            let err = (r.w - oracle[0]).abs().max((r.u - oracle[1]).abs()).max((r.v - oracle[2]).abs());
            worst = worst.max(err);
        }
    }

    let mut proj_ok = true;
    for _ in 0..300 {
        let (w, h) = (rng.gen_range(1..6), rng.gen_range(1..6));
        let lambda = rng.gen_range(0.1..5.0);
        let (a, b) = (vec2(&mut rng, w, h, 3.0), vec2(&mut rng, w, h, 3.0));
        let (pa, pb) = (project_p(&a), project_p(&b));
        let mut d = pa.clone();
        d.add_scaled(-1.0, &pb);
        let mut raw = a.clone();
        raw.add_scaled(-1.0, &b);
        proj_ok &= project_p(&pa) == pa && d.norm_squared() <= raw.norm_squared();

        let (a, b) = (vec4(&mut rng, w, h, 3.0), vec4(&mut rng, w, h, 3.0));
        let (pa, pb) = (project_q(&a), project_q(&b));
        let mut d = pa.clone();
        d.add_scaled(-1.0, &pb);
        let mut raw = a.clone();
        raw.add_scaled(-1.0, &b);
        proj_ok &= project_q(&pa) == pa && d.norm_squared() <= raw.norm_squared();

        let (a, b) = (field(&mut rng, w, h, 3.0 * lambda), field(&mut rng, w, h, 3.0 * lambda));
        let (pa, pb) = (project_s(&a, lambda), project_s(&b, lambda));
        let d = pa.zip_map(&pb, |x, y| x - y).norm_squared();
        proj_ok &= project_s(&pa, lambda) == pa && d <= a.zip_map(&b, |x, y| x - y).norm_squared();
    }
    ensure(
        worst <= 1e-8 && proj_ok,
        format!("resolvent max err {worst:.2e} over 2000 pixels, projections {}", if proj_ok { "ok" } else { "violated" }),
    )
}

fn random_state(rng: &mut ChaCha8Rng, n: usize, lambda: f64) -> SolverState64 {
    SolverState64 {
        w: field(rng, n, n, 1.0),
        flow: FlowField::new(field(rng, n, n, 1.0), field(rng, n, n, 1.0)).unwrap(),
        dual: DualState {
            p: vec2(rng, n, n, 0.7),
            q: vec4(rng, n, n, 0.5),
            s: field(rng, n, n, lambda),
        },
        shadow: None,
    }
}

fn state_diff(a: &SolverState64, b: &SolverState64) -> f64 {
    let d = |x: &ScalarField, y: &ScalarField| x.zip_map(y, |p, q| p - q).inf_norm();
    let mut pa = a.dual.p.clone();
    pa.add_scaled(-1.0, &b.dual.p);
    let mut qa = a.dual.q.clone();
    qa.add_scaled(-1.0, &b.dual.q);
    [
        d(&a.w, &b.w),
        d(&a.flow.u, &b.flow.u),
        d(&a.flow.v, &b.flow.v),
        d(&a.dual.s, &b.dual.s),
        pa.inf_norm(),
        qa.inf_norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

fn random_data(rng: &mut ChaCha8Rng, n: usize, beta: f64) -> ImageData64 {
    ImageData64::new(field(rng, n, n, 0.5), field(rng, n, n, 0.5), field(rng, n, n, 0.2), beta).unwrap()
}

fn algebraic_reductions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut cfg = SolverConfig64::default();
    cfg.r = 1.0;
    cfg.rho = 1.0;
    let data = random_data(&mut rng, 8, cfg.beta);
    let mut a = random_state(&mut rng, 8, cfg.lambda);
    let mut b = a.clone();
    let mut worst_rho: f64 = 0.0;
    for _ in 0..50 {
        rpadmm1_step(&mut a, &cfg, &data).unwrap();
        rpadmm2_step(&mut b, &cfg, &data).unwrap();
        worst_rho = worst_rho.max(state_diff(&a, &b));
    }

    cfg.beta = 0.0;
    let data = random_data(&mut rng, 8, 0.0);
    let mut a = random_state(&mut rng, 8, cfg.lambda);
    a.w = ScalarField::zeros(8, 8);
    a.dual.p = VectorField2::zeros(8, 8);
    let mut b = a.clone();
    let mut worst_beta: f64 = 0.0;
    for _ in 0..50 {
        rpadmm1_step(&mut a, &cfg, &data).unwrap();
        zach_padmm_step(&mut b, &cfg, &data).unwrap();
        worst_beta = worst_beta.max(state_diff(&a, &b));
    }
    ensure(
        worst_rho <= 1e-12 && worst_beta <= 1e-12,
        format!("rho=1 diff {worst_rho:.2e}, beta=0 diff {worst_beta:.2e}"),
    )
}

fn synthetic_instance(seed: u64, n: usize, beta: f64) -> ImageData64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f0 = ScalarField::from_fn(n, n, |i, j| {
        ((i as f64) * 0.7).sin() * ((j as f64) * 0.5).cos() * 0.5 + 0.5 + rng.gen_range(-0.05..0.05)
    });
    let f1 = ScalarField::from_fn(n, n, |i, j| {
        (((i as f64) + 0.3) * 0.7).sin() * (((j as f64) - 0.8) * 0.5).cos() * 0.5 + 0.5
    });
    compute_derivatives(&f0, &f1, &FlowField::zeros(n, n), beta).unwrap()
}

fn convergence_properties() -> Outcome {
    let runs = [
        (SolverKind::RpadmmI, 1.0, 1.9),
        (SolverKind::RpadmmI, 1.618, 1.9),
        (SolverKind::RpadmmII, 1.618, 1.0),
        (SolverKind::RpadmmII, 1.618, 1.9),
        (SolverKind::ZachPadmm, 1.618, 1.9),
        (SolverKind::Pdr, 1.618, 1.9),
    ];
    let mut failures = Vec::new();
    let (mut max_iters, mut max_gap) = (0usize, 0.0f64);
    for seed in [1, 2] {
        for (kind, r, rho) in runs {
            let mut cfg = SolverConfig64::default();
            (cfg.r, cfg.rho) = (r, rho);
            if !kind.uses_illumination() {
                cfg.beta = 0.0;
            }
            let data = synthetic_instance(seed, 16, cfg.beta);
            let mut st = SolverState64::zeros(16, 16);
            let mut reached = None;
            for k in 1..=5000 {
                step(kind, &mut st, &cfg, &data).unwrap();
                if max_residual(&st, &data).unwrap() < 1e-6 {
                    reached = Some(k);
                    break;
                }
            }
            let energy = primal_energy(&st.w, &st.flow, cfg.lambda, &data).unwrap();
            let gap = (energy - dual_objective(&st.dual.s, &data).unwrap()).abs() / energy.abs();
            max_gap = max_gap.max(gap);
            match reached {
                Some(k) if gap <= 1e-4 => max_iters = max_iters.max(k),
                _ => failures.push(format!("{kind}(r={r}, rho={rho}, seed {seed}): iters {reached:?}, gap {gap:.2e}")),
            }
        }
    }
    let summary = format!("max iterations {max_iters}, max relative gap {max_gap:.2e}");
    if failures.is_empty() {
        Outcome::Pass(summary)
    } else {
        Outcome::Fail(format!("{summary}; {}", failures.join("; ")))
    }
}

fn srbgs_feasibility() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let (w, h, sigma_tau) = (8, 8, 2.0 * 0.4);
    let n = w * h;
    let mut t = DMatrix::zeros(n, n);
    for k in 0..n {
        let mut e = ScalarField::zeros(w, h);
        e.as_mut_slice()[k] = 1.0;
        t.set_column(k, &DVector::from_column_slice(laplacian_apply(&e, sigma_tau).as_slice()));
    }
    let mut worst = f64::INFINITY;
    for sweeps in [1, 2, 4] {
        let mut m_inv = DMatrix::zeros(n, n);
        for k in 0..n {
            let mut e = ScalarField::zeros(w, h);
            e.as_mut_slice()[k] = 1.0;
            let col = srbgs_preconditioner_inverse(&e, sigma_tau, sweeps);
            m_inv.set_column(k, &DVector::from_column_slice(col.as_slice()));
        }
        let Some(m) = m_inv.try_inverse() else {
            return Outcome::Fail(format!("preconditioner for {sweeps} sweeps is singular"));
        };
        let diff = m - &t;
        for _ in 0..100 {
            let f = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            worst = worst.min(f.dot(&(&diff * &f)));
        }
    }
    ensure(worst >= -1e-10, format!("min <(M-T)f, f> = {worst:.3e}"))
}

fn texture(x: f64, y: f64) -> f64 {
    0.5 + 0.2 * (0.45 * x).sin() * (0.3 * y).cos() + 0.15 * (0.23 * x + 0.37 * y).sin() + 0.1 * (0.7 * x - 0.2 * y).cos()
}

fn end_to_end_shift() -> Outcome {
    let n = 64;
    let f0 = ScalarField::from_fn(n, n, |i, j| texture(j as f64, i as f64));
    let f1 = ScalarField::from_fn(n, n, |i, j| texture(j as f64 - 3.0, i as f64));
    let gt = FlowField::constant(n, n, 3.0, 0.0);
    let mut parts = Vec::new();
    let mut ok = true;
    for kind in SolverKind::ALL {
        let start = Instant::now();
        let solution = solve_flow(&f0, &f1, &PyramidConfig64::for_kind(kind)).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let epe = benchio::epe(&solution.flow, &gt).unwrap();
        ok &= epe <= 0.3 && secs < 30.0;
        parts.push(format!("{kind} {epe:.3} px {secs:.1} s"));
    }
    ensure(ok, parts.join(", "))
}

fn middlebury_reference() -> Outcome {
    let Some(root) = data_root_from_env() else {
        return Outcome::Skip(format!("set {} to a Middlebury root to run", benchio::DATA_ROOT_ENV));
    };
    let cfg = PyramidConfig64::for_kind(SolverKind::Padmm);
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, aae_target, aae_band, epe_target) in [
        ("Dimetrodon", 2.62, 0.75, Some((0.13, 0.05))),
        ("Venus", 4.36, 1.0, None),
    ] {
        let result = (|| {
            let seq = locate_sequence(&root, name)?;
            let gt_path = seq.ground_truth.clone().ok_or_else(|| dualflow::FlowError::Ingestion {
                path: seq.frame0.display().to_string(),
                reason: "no ground truth".into(),
            })?;
            let f0 = benchio::read_gray_image(&seq.frame0)?;
            let f1 = benchio::read_gray_image(&seq.frame1)?;
            let gt = benchio::read_flo(&gt_path)?;
            let solution = solve_flow(&f0, &f1, &cfg)?;
            benchio::evaluate(&solution.flow, &gt)
        })();
        match result {
            Ok(eval) => {
                let mut good = (eval.aae_deg - aae_target).abs() <= aae_band;
                if let Some((target, band)) = epe_target {
                    good &= (eval.epe_px - target).abs() <= band;
                }
                ok &= good;
                parts.push(format!("{name} AAE {:.2} EPE {:.3}", eval.aae_deg, eval.epe_px));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{name}: {e}"));
            }
        }
    }
    ensure(ok, parts.join(", "))
}

fn flo_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut identical = true;
    for _ in 0..1000 {
        let (w, h) = (rng.gen_range(1..20), rng.gen_range(1..20));
        let mut f = || dualflow::grid::ScalarField::from_fn(w, h, |_, _| rng.gen_range(-50.0f32..50.0));
        let flow = FlowField32::new(f(), f()).unwrap();
        let back: FlowField32 = benchio::decode_flo(&benchio::encode_flo(&flow)).unwrap();
        identical &= back == flow;
    }

    let mut golden = Vec::new();
    golden.extend_from_slice(b"PIEH");
    golden.extend_from_slice(&1i32.to_le_bytes());
    golden.extend_from_slice(&1i32.to_le_bytes());
    golden.extend_from_slice(&1.5f32.to_le_bytes());
    golden.extend_from_slice(&(-2.0f32).to_le_bytes());
    let one = FlowField::constant(1, 1, 1.5, -2.0);
    let encoded = benchio::encode_flo(&one);
    let decoded: FlowField = benchio::decode_flo(&golden).unwrap();
    let golden_ok = encoded == golden && decoded == one && golden.len() == 20;
    ensure(
        identical && golden_ok,
        format!(
            "1000 round trips {}, 20-byte golden file {}",
            if identical { "identical" } else { "differ" },
            if golden_ok { "matches" } else { "differs" }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, Check); 8] = [
        (1, "operator correctness", Duration::from_secs(5), operator_correctness),
        (2, "prox oracles", Duration::from_secs(10), prox_oracles),
        (3, "algebraic reductions", Duration::from_secs(5), algebraic_reductions),
        (4, "convergence properties", Duration::from_secs(60), convergence_properties),
        (5, "SRBGS feasibility", Duration::from_secs(5), srbgs_feasibility),
        (6, "end-to-end synthetic shift", Duration::from_secs(150), end_to_end_shift),
        (7, "Middlebury reference numbers", Duration::MAX, middlebury_reference),
        (8, ".flo round trip", Duration::from_secs(2), flo_round_trip),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let over = elapsed > budget;
        let (status, detail) = match outcome {
            Outcome::Pass(d) if !over => ("PASS", d),
            Outcome::Pass(d) => ("FAIL", format!("{d}; over time budget {budget:?}")),
            Outcome::Fail(d) => ("FAIL", d),
            Outcome::Skip(d) => ("SKIP", d),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {id} {name}: {status} ({:.2} s) {detail}", elapsed.as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
