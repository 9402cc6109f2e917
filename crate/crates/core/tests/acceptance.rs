//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and exits nonzero if any
//! criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use knotfield_core::beltrami::{
    build_beltrami_mode, build_beltrami_sum, gradient_flow_evolve, lambda_1, relax_to_minimizer, BeltramiMode, FlowOptions,
    Helicity, RelaxOptions,
};
use knotfield_core::contact::{
    helicity_contact, hopfion_single_pair, normalization_constants, ClebschData, ClebschPair, ContactDomain,
};
use knotfield_core::em_fields::{build_hopfion, frame_velocity, monopole_flux, null_residuals_at};
use knotfield_core::functionals::{
    arnold_report, chern_density_identity_check, cs_variation_check, flow_equality_check, helicity_v_with,
    mechanical_analogy, HelicityOptions,
};
use knotfield_core::grid_forms::{GridSpec3, Sampler, ScalarClosure, VectorField3};
use knotfield_core::knotlines::{
    advection_invariants_check, build_invariant_torus_field, build_torus_field_with_rotation, hopf_invariant, resonant_seed,
    torus_knot_classify, trace_field_line, trace_vector_field, AdvectionDrift, HopfOptions, KnotType, TraceOptions,
};
use knotfield_core::linalg::{cross, dot, norm, Vec3};
use knotfield_core::spectral::project_solenoidal;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit {
        Ok(())
    } else {
        Err(format!("runtime {:.2}s exceeds {limit}s", elapsed.as_secs_f64()))
    }
}

fn hopfion_nullness() -> Outcome {
    let t = Instant::now();
    let f = build_hopfion(GridSpec3::centered([4; 3], [8.0; 3]).map_err(|e| e.to_string())?, 1.0).map_err(|e| e.to_string())?;
    let pts = Sampler::Random(2024).points([-4.0; 3], [4.0; 3], 10_000);
    let r = null_residuals_at(&f, &pts);
    within(t.elapsed(), 5.0)?;
    check(
        !r.degenerate && r.dot < 1e-10 && r.norm < 1e-10,
        format!("dot {:.2e}, norm {:.2e} over 10^4 points", r.dot, r.norm),
    )
}

fn hopfion_hopf_invariant() -> Outcome {
    let t = Instant::now();
    let g = GridSpec3::centered([64; 3], [16.0; 3]).map_err(|e| e.to_string())?;
    let f = build_hopfion(g, 1.0).map_err(|e| e.to_string())?;
    let opts = HopfOptions::default();
    let h = hopf_invariant(&f, &opts).map_err(|e| e.to_string())?;
    within(t.elapsed(), 120.0)?;
    check(
        (h.helicity_raw - 1.0).abs() < 0.01 && h.linking.integer == 1 && (h.linking.raw - 1.0).abs() < 0.05,
        format!("helicity {:.6}, linking {} (raw {:.6})", h.helicity_raw, h.linking.integer, h.linking.raw),
    )
}

fn monopole_unit_flux() -> Outcome {
    let t = Instant::now();
    let f = monopole_flux(64, 1.0).map_err(|e| e.to_string())?;
    within(t.elapsed(), 1.0)?;
    check(
        (f.stokes - 1.0).abs() < 1e-8 && (f.direct - 1.0).abs() < 1e-8,
        format!("stokes {:.15}, direct {:.15}", f.stokes, f.direct),
    )
}

fn fubini_study_constants() -> Outcome {
    let k = normalization_constants(64).map_err(|e| e.to_string())?;
    check(
        k.c == Ratio::from_integer(2) && k.g == Ratio::from_integer(1) && (k.c_numeric - 2.0).abs() < 1e-10 && (k.g_numeric - 1.0).abs() < 1e-10,
        format!("C = {} ({:.15}), g = {} ({:.15})", k.c, k.c_numeric, k.g, k.g_numeric),
    )
}

fn random_solenoidal(g: GridSpec3, rng: &mut ChaCha8Rng) -> Result<VectorField3, String> {
    let comps = [0, 1, 2].map(|_| (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<f64>>());
    let raw = VectorField3::from_components(g, comps).map_err(|e| e.to_string())?;
    project_solenoidal(&raw).map_err(|e| e.to_string())
}

fn arnold_equality_case() -> Outcome {
    let t = Instant::now();
    let g = GridSpec3::cube(16, 2.0 * PI).map_err(|e| e.to_string())?;
    let lowest = build_beltrami_mode(BeltramiMode::new([0, 0, 1], Helicity::Positive, 1.0), g).map_err(|e| e.to_string())?;
    let eq = arnold_report(&lowest).map_err(|e| e.to_string())?;
    let equality = (eq.lhs - eq.rhs).abs() <= 1e-12 * eq.lhs;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut min_gap = f64::INFINITY;
    let mut all = true;
    for _ in 0..20 {
        let v = random_solenoidal(g, &mut rng)?;
        let r = arnold_report(&v).map_err(|e| e.to_string())?;
        all &= r.lhs >= r.rhs;
        min_gap = min_gap.min(r.relative_gap());
    }
    within(t.elapsed(), 30.0)?;
    check(
        equality && all,
        format!("lowest shell |E - lambda1 H|/E = {:.2e}; 20 random fields, smallest relative margin {min_gap:.3}", eq.relative_gap().abs()),
    )
}

fn crucial_identity() -> Outcome {
    let a = |x: [f64; 4]| {
        let [t, x, y, z] = x;
        [(x + 0.3 * t).sin() * y.cos(), (y - t).cos() * z.sin(), (z + 2.0 * x).sin() + t * y.cos(), (x * 0.5 + t).cos() * y.sin()]
    };
    let r = chern_density_identity_check(&a, [2.0 * PI; 3], 0.3, 6, &[16, 32, 64]).map_err(|e| e.to_string())?;
    check(
        (r.order - 2.0).abs() <= 0.2,
        format!("residuals {:?}, observed order {:.3}", r.residuals.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>(), r.order),
    )
}

fn cs_gradient() -> Outcome {
    let g = GridSpec3::cube(64, 1.0).map_err(|e| e.to_string())?;
    let mut worst_mode: f64 = 0.0;
    for (k, h) in [([0, 1, 1], Helicity::Negative), ([1, 0, 0], Helicity::Positive), ([1, 2, 0], Helicity::Positive)] {
        let a = build_beltrami_mode(BeltramiMode::new(k, h, 1.0), g).map_err(|e| e.to_string())?;
        worst_mode = worst_mode.max(cs_variation_check(&a, 6, 1e-3, 1).map_err(|e| e.to_string())?);
    }
    let tau = 2.0 * PI;
    let smooth = project_solenoidal(&VectorField3::from_fn(g, move |p| {
        [(tau * p[1]).sin() + 0.3 * (2.0 * tau * p[2]).cos(), (tau * p[2]).cos() * (tau * p[0]).sin(), (2.0 * tau * p[0]).cos() * (tau * p[1]).sin()]
    }))
    .map_err(|e| e.to_string())?;
    let worst_smooth = cs_variation_check(&smooth, 6, 1e-3, 3).map_err(|e| e.to_string())?;
    check(
        worst_mode < 1e-6 && worst_smooth < 1e-4,
        format!("Beltrami modes {worst_mode:.2e}, smooth field {worst_smooth:.2e}"),
    )
}

fn gradient_flow() -> Outcome {
    let g = GridSpec3::cube(16, 1.0).map_err(|e| e.to_string())?;
    let mode = BeltramiMode::new([0, 1, 1], Helicity::Positive, 0.7);
    let kappa = mode.kappa(g.lengths());
    let a0 = build_beltrami_mode(mode, g).map_err(|e| e.to_string())?;
    let s = gradient_flow_evolve(&a0, 1.0, 1e-3, FlowOptions { save_every: 50, ..Default::default() }).map_err(|e| e.to_string())?;
    let n0 = a0.rms();
    let growth = s.times.iter().zip(&s.slices).map(|(t, v)| (v.rms() / n0 / (kappa * t).exp() - 1.0).abs()).fold(0.0, f64::max);
    let a1 = build_beltrami_sum(
        &[BeltramiMode::new([0, 0, 1], Helicity::Positive, 1.0), BeltramiMode::new([1, 1, 0], Helicity::Negative, 0.5)],
        g,
    )
    .map_err(|e| e.to_string())?;
    let s1 = gradient_flow_evolve(&a1, 0.2, 1e-3, FlowOptions { save_every: 200, ..Default::default() }).map_err(|e| e.to_string())?;
    let eq = flow_equality_check(&s1).map_err(|e| e.to_string())?;
    check(
        growth < 1e-8 && eq.relative_gap < 1e-6,
        format!("growth deviation {growth:.2e} over t in [0,1]; flow integral vs delta CS {:.2e}", eq.relative_gap),
    )
}

fn relaxation() -> Outcome {
    let t = Instant::now();
    let g = GridSpec3::cube(32, 1.0).map_err(|e| e.to_string())?;
    let v0 = build_beltrami_sum(
        &[BeltramiMode::new([0, 0, 1], Helicity::Positive, 1.0), BeltramiMode::new([0, 2, 1], Helicity::Positive, 1.0)],
        g,
    )
    .map_err(|e| e.to_string())?;
    let r = relax_to_minimizer(&v0, RelaxOptions::default()).map_err(|e| e.to_string())?;
    within(t.elapsed(), 120.0)?;
    let h0 = r.trace[0].helicity;
    let drift = r.trace.iter().map(|row| (row.helicity - h0).abs() / h0.abs()).fold(0.0, f64::max);
    // Energy may only rise by rounding once the decrease is below machine resolution.
    let rise = r.trace.windows(2).map(|w| (w[1].energy - w[0].energy) / w[0].energy).fold(f64::NEG_INFINITY, f64::max);
    let l1 = lambda_1(g.lengths());
    let gap = (r.ratio() - l1).abs() / l1;
    check(
        drift < 1e-9 && rise <= 1e-14 && gap < 1e-6,
        format!("{} iterations, helicity drift {drift:.2e}, largest energy step {rise:.2e}, |E/H - lambda1|/lambda1 {gap:.2e}", r.iterations),
    )
}

fn torus_knots() -> Outcome {
    let g = GridSpec3::centered([16, 16, 8], [4.0, 4.0, 2.0]).map_err(|e| e.to_string())?;
    let opts = TraceOptions { max_arc: 200.0, ..Default::default() };
    let trefoil = build_invariant_torus_field(2, 3, g).map_err(|e| e.to_string())?;
    let l = trace_vector_field(&trefoil, resonant_seed(), &opts).map_err(|e| e.to_string())?;
    let k23 = torus_knot_classify(&l, None);
    let ring = build_invariant_torus_field(1, 1, g).map_err(|e| e.to_string())?;
    let k11 = torus_knot_classify(&trace_vector_field(&ring, resonant_seed(), &opts).map_err(|e| e.to_string())?, None);
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let dense = TraceOptions { max_arc: 64.0 * norm(g.lengths()), ..Default::default() };
    let control = trace_vector_field(&build_torus_field_with_rotation(golden, g).map_err(|e| e.to_string())?, resonant_seed(), &dense)
        .map_err(|e| e.to_string())?;
    check(
        k23 == KnotType::Torus { p: 2, q: 3 } && k11 == KnotType::Unknot && !control.closed,
        format!("(2,3) -> {k23}, (1,1) -> {k11}, irrational control closed = {}", control.closed),
    )
}

/// Lorentz boost of `(E, B)` into the frame moving with velocity `v` (units with `c = 1`).
fn boost(e: Vec3, b: Vec3, v: Vec3) -> (Vec3, Vec3) {
    let g = 1.0 / (1.0 - dot(v, v)).sqrt();
    let k = g * g / (g + 1.0);
    let (ve, vb, vxb, vxe) = (dot(v, e), dot(v, b), cross(v, b), cross(v, e));
    (
        [0, 1, 2].map(|a| g * (e[a] + vxb[a]) - k * v[a] * ve),
        [0, 1, 2].map(|a| g * (b[a] - vxe[a]) - k * v[a] * vb),
    )
}

fn frame_velocity_criterion() -> Outcome {
    let mut null_dev: f64 = 0.0;
    let f = build_hopfion(GridSpec3::centered([4; 3], [4.0; 3]).map_err(|e| e.to_string())?, 1.0).map_err(|e| e.to_string())?;
    let mut pairs = vec![([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]), ([0.0, 3.0, 4.0], [5.0, 0.0, 0.0])];
    pairs.extend(Sampler::Halton.points([-1.0; 3], [1.0; 3], 20).into_iter().map(|p| (f.eval_e(p), f.eval_b(p))));
    for (e, b) in pairs {
        let v = frame_velocity(e, b).map_err(|e| e.to_string())?;
        null_dev = null_dev.max((norm(v.minus) - 1.0).abs());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let e: Vec3 = [0, 1, 2].map(|_| rng.gen_range(-1.0..1.0));
        let b: Vec3 = [0, 1, 2].map(|_| rng.gen_range(-1.0..1.0));
        let v = frame_velocity(e, b).map_err(|e| e.to_string())?;
        let (e2, b2) = boost(e, b, v.minus);
        worst = worst.max(norm(cross(e2, b2)) / (norm(e2) * norm(b2)));
    }
    check(null_dev < 1e-12 && worst < 1e-8, format!("null inputs ||v| - c| {null_dev:.2e}; boosted non-null pairs {worst:.2e}"))
}

fn mechanical() -> Outcome {
    let sigma = |q: &[f64]| 0.5 * q.iter().map(|x| x * x).sum::<f64>();
    let r = mechanical_analogy(&sigma, &[1.0, -0.5, 0.25], 1.0, 1e-4).map_err(|e| e.to_string())?;
    check(r.action_gap() < 1e-8, format!("|action - delta sigma| = {:.2e}", r.action_gap()))
}

fn clebsch_advection() -> Outcome {
    let data = hopfion_single_pair(1.0).map_err(|e| e.to_string())?;
    let f = build_hopfion(GridSpec3::centered([8; 3], [8.0; 3]).map_err(|e| e.to_string())?, 1.0).map_err(|e| e.to_string())?;
    let drift = |tol: f64| -> Result<AdvectionDrift, String> {
        let opts = TraceOptions { tol, ..Default::default() };
        let mut worst = AdvectionDrift { alpha: 0.0, beta: 0.0 };
        for seed in [[0.5, 0.0, 0.0], [1.0, 0.3, -0.2], [0.2, -0.6, 0.4]] {
            let l = trace_field_line(&|p| f.eval_b(p), seed, &opts).map_err(|e| e.to_string())?;
            let d = advection_invariants_check(&l, &data).map_err(|e| e.to_string())?;
            worst.alpha = worst.alpha.max(d.alpha);
            worst.beta = worst.beta.max(d.beta);
        }
        Ok(worst)
    };
    let (coarse, fine) = (drift(1e-8)?, drift(5e-9)?);
    check(
        coarse.alpha < 1e-6 && coarse.beta < 1e-6 && fine.alpha <= 0.5 * coarse.alpha && fine.beta <= 0.5 * coarse.beta,
        format!(
            "drift (alpha, beta) at tol 1e-8: ({:.2e}, {:.2e}); at 5e-9: ({:.2e}, {:.2e})",
            coarse.alpha, coarse.beta, fine.alpha, fine.beta
        ),
    )
}

fn sc(f: impl Fn(Vec3) -> f64 + Send + Sync + 'static) -> ScalarClosure {
    Arc::new(f)
}

fn single_pair_helicity() -> Outcome {
    let tau = 2.0 * PI;
    let g = GridSpec3::cube(32, 1.0).map_err(|e| e.to_string())?;
    let pairs = [
        ClebschPair::new(sc(move |p| (tau * p[0]).sin() * (tau * p[1]).sin() / tau), sc(|p| p[2])),
        ClebschPair::new(sc(move |p| (tau * p[1]).cos() + 0.5 * (tau * p[2]).sin()), sc(move |p| p[0] + 0.3 * (tau * p[1]).sin())),
        ClebschPair::new(sc(move |p| (tau * (p[0] + p[1])).sin() * (tau * p[2]).cos()), sc(move |p| (tau * p[0]).sin() + (tau * p[2]).cos())),
    ];
    let mut worst: f64 = 0.0;
    let mut worst_pointwise: f64 = 0.0;
    for pair in pairs {
        let data = ClebschData::new(None, vec![pair]).map_err(|e| e.to_string())?;
        let b = data.two_form_field(g);
        let energy: f64 = knotfield_core::grid_forms::integrate(&b.norm_sq());
        let opts = HelicityOptions { remove_mean: true, divergence_tol: Some(1e-6), ..Default::default() };
        let h = helicity_v_with(&b, opts).map_err(|e| e.to_string())?;
        // Relative to the largest helicity the same energy admits on this box.
        worst = worst.max(h.abs() * lambda_1(g.lengths()) / energy);
        let direct = helicity_contact(&data, &ContactDomain::Box(g)).map_err(|e| e.to_string())?;
        worst_pointwise = worst_pointwise.max(direct.abs() * lambda_1(g.lengths()) / energy);
    }
    check(
        worst < 1e-8 && worst_pointwise < 1e-8,
        format!("|H| lambda1 / E: spectral {worst:.2e}, from the Clebsch form {worst_pointwise:.2e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("hopfion nullness", hopfion_nullness),
        ("hopfion Hopf invariant", hopfion_hopf_invariant),
        ("monopole unit flux", monopole_unit_flux),
        ("Fubini-Study normalization", fubini_study_constants),
        ("Arnold equality case", arnold_equality_case),
        ("Chern density identity", crucial_identity),
        ("Chern-Simons gradient", cs_gradient),
        ("gradient flow", gradient_flow),
        ("relaxation", relaxation),
        ("torus knots", torus_knots),
        ("frame velocity", frame_velocity_criterion),
        ("mechanical analogy", mechanical),
        ("Clebsch advection", clebsch_advection),
        ("single-pair helicity", single_pair_helicity),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
