//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::time::{Duration, Instant};

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use flatdisk::dynamics::{drift_field, DiskParams};
use flatdisk::lie_oracle::{sample_state, verify_objective};
use flatdisk::objectives::{evaluate, ObjectiveKind};
use flatdisk::simulation::{builtin, builtin_scenarios, run, ControlSampling, Scenario, Trace};
use flatdisk::summary::{summarize, MONOTONE_SLACK};
use flatdisk::trace_csv::write_trace_csv;

const MOMENTUM_DRIFT_TOL: f64 = 1e-5;
const RUNTIME_LIMIT: Duration = Duration::from_secs(10);
const CLOSED_FORM_TOL: f64 = 1e-12;
const CLOSED_FORM_SAMPLES: usize = 10_000;
const ORACLE_TOL: f64 = 1e-6;
const ORACLE_SAMPLES: usize = 1000;
const ORACLE_SEED: u64 = 42;
const PRECESSION_RATIO: f64 = 1e-4;
const INERTIA_RETURN_TOL: f64 = 0.05;
const PASSIVE_RATIO: f64 = 1e-2;
const ENDPOINT_TOL: f64 = 0.1;
const MOMENTUM_ENDPOINT_TOL: f64 = 0.02;
const RICHARDSON_MIN_RATIO: f64 = 12.0;
const RICHARDSON_DT: f64 = 0.01;
const RICHARDSON_HORIZON: f64 = 1.0;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed_run(s: &Scenario) -> (Trace, Duration) {
    let start = Instant::now();
    let trace = run(s).unwrap_or_else(|e| panic!("{} failed: {e}", s.name));
    (trace, start.elapsed())
}

fn conservation() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in builtin_scenarios() {
        assert_eq!(s.dt, 1e-3);
        let (trace, elapsed) = timed_run(&s);
        let drift = summarize(&trace).unwrap().max_momentum_drift;
        let ok = drift < MOMENTUM_DRIFT_TOL && elapsed < RUNTIME_LIMIT;
        pass &= ok;
        parts.push(format!(
            "{} {:.2e} in {:.2}s",
            s.name,
            drift,
            elapsed.as_secs_f64()
        ));
    }
    outcome(
        pass,
        format!("max |L(t)-L(0)|/|L(0)|: {}", parts.join(", ")),
    )
}

fn rel(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / (1.0 + reference.abs())
}

fn closed_forms() -> Outcome {
    let params = DiskParams::default();
    let (b2, b3) = (params.nominal_i2(), params.nominal_i3());
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_lg: f64 = 0.0;
    let mut worst_lf: f64 = 0.0;
    for _ in 0..CLOSED_FORM_SAMPLES {
        let x = sample_state(&mut rng, &params);
        let (w1, w2, w3, i2, i3) = (x[0], x[1], x[2], x[3], x[4]);
        let f = drift_field(&x).unwrap();

        let a = evaluate(ObjectiveKind::Alignment, &x, &params).unwrap();
        worst_lg = worst_lg
            .max(rel(a.lg1, -w2 * w2 / i2 + (i2 - b2)))
            .max(rel(a.lg2, -w3 * w3 / i3 + (i3 - b3)));

        let p = evaluate(ObjectiveKind::Passive, &x, &params).unwrap();
        worst_lg = worst_lg
            .max(rel(p.lg1, -0.5 * w1 * w1 - 0.5 * w2 * w2 + i2 - b2))
            .max(rel(p.lg2, -0.5 * w1 * w1 - 0.5 * w3 * w3 + i3 - b3));

        for e in [a, p] {
            let scale = 1.0 + e.grad.norm() * f.norm();
            worst_lf = worst_lf.max(e.lf.abs() / scale);
        }
    }
    outcome(
        worst_lg < CLOSED_FORM_TOL && worst_lf < CLOSED_FORM_TOL,
        format!(
            "{CLOSED_FORM_SAMPLES} states: max rel err Lg1V/Lg2V {worst_lg:.2e}, max scaled |LfV| {worst_lf:.2e} (tol {CLOSED_FORM_TOL:e})"
        ),
    )
}

fn oracle() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for kind in ObjectiveKind::ALL {
        let r = verify_objective(kind, ORACLE_SAMPLES, ORACLE_TOL, ORACLE_SEED);
        pass &= r.pass;
        parts.push(format!("{} {:.2e}", kind, r.max_error()));
    }
    outcome(
        pass,
        format!(
            "max rel error vs finite differences (tol {ORACLE_TOL:e}): {}",
            parts.join(", ")
        ),
    )
}

fn descent() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["alignment", "passive", "precession"] {
        let (trace, _) = timed_run(&builtin(name).unwrap());
        let summary = summarize(&trace).unwrap();
        let rise = summary
            .segments
            .iter()
            .map(|s| s.max_rise)
            .fold(f64::NEG_INFINITY, f64::max);
        let ok = rise <= MONOTONE_SLACK;
        pass &= ok;
        parts.push(format!(
            "{name} max step rise {rise:.2e} {}",
            if ok { "ok" } else { "VIOLATED" }
        ));
    }
    outcome(
        pass,
        format!("slack {MONOTONE_SLACK:e}/step: {}", parts.join(", ")),
    )
}

fn precession_cancelled() -> Outcome {
    let s = builtin("precession").unwrap();
    let (trace, _) = timed_run(&s);
    let first = &trace.rows[0];
    let last = trace.rows.last().unwrap();
    let ratio = last.precession_norm_sq / first.precession_norm_sq;
    let nominal = s.params.nominal_inertia();
    let di = (last.i2 - nominal.i2())
        .abs()
        .max((last.i3 - nominal.i3()).abs());
    outcome(
        ratio < PRECESSION_RATIO && di < INERTIA_RETURN_TOL,
        format!(
            "prec2(80)/prec2(0) = {ratio:.2e} (< {PRECESSION_RATIO:e}), max |I - Ibar| = {di:.4} (< {INERTIA_RETURN_TOL})"
        ),
    )
}

fn passive_insufficient() -> Outcome {
    let (trace, _) = timed_run(&builtin("passive").unwrap());
    let first = &trace.rows[0];
    let last = trace.rows.last().unwrap();
    let ratio = last.precession_norm_sq / first.precession_norm_sq;
    outcome(
        ratio > PASSIVE_RATIO && last.value < first.value,
        format!(
            "prec2(40)/prec2(0) = {ratio:.3} (> {PASSIVE_RATIO:e}), V {:.3} -> {:.3}",
            first.value, last.value
        ),
    )
}

fn combined_endpoint() -> Outcome {
    let s = builtin("combined").unwrap();
    let (trace, _) = timed_run(&s);
    let w = trace.rows.last().unwrap().omega;
    let err = (w - Vector3::new(5.0, 0.0, 0.0)).amax();
    let forced = trace.rows[0].momentum.norm() / s.params.nominal_i1();
    let momentum_err = (w.x - forced).abs();
    outcome(
        err < ENDPOINT_TOL && momentum_err < MOMENTUM_ENDPOINT_TOL,
        format!(
            "final omega ({:.4}, {:.4}, {:.4}), max deviation from (5,0,0) {err:.4} (< {ENDPOINT_TOL}); |w1 - |L0|/Ibar1| = {momentum_err:.4} (< {MOMENTUM_ENDPOINT_TOL})",
            w.x, w.y, w.z
        ),
    )
}

fn final_error(a: &Trace, b: &Trace) -> f64 {
    let (ra, rb) = (a.rows.last().unwrap(), b.rows.last().unwrap());
    assert_eq!(ra.t, rb.t);
    let state = (ra.omega - rb.omega).norm_squared()
        + (ra.i2 - rb.i2).powi(2)
        + (ra.i3 - rb.i3).powi(2)
        + (ra.attitude - rb.attitude).norm_squared();
    state.sqrt()
}

fn richardson_ratio(sampling: ControlSampling) -> f64 {
    let traces: Vec<Trace> = [1.0, 2.0, 4.0]
        .iter()
        .map(|k| {
            let mut s = builtin("passive").unwrap();
            s.sampling = sampling;
            s.dt = RICHARDSON_DT / k;
            s.t_end = RICHARDSON_HORIZON;
            run(&s).unwrap()
        })
        .collect();
    final_error(&traces[0], &traces[1]) / final_error(&traces[1], &traces[2])
}

fn integrator_order() -> Outcome {
    let ratio = richardson_ratio(ControlSampling::Stage);
    let held = richardson_ratio(ControlSampling::Step);
    outcome(
        ratio >= RICHARDSON_MIN_RATIO,
        format!(
            "passive, 1 s, dt {RICHARDSON_DT} -> {} -> {}: error ratio {ratio:.2} with per-stage feedback (>= {RICHARDSON_MIN_RATIO}); zero-order-hold sampling gives {held:.2}",
            RICHARDSON_DT / 2.0,
            RICHARDSON_DT / 4.0
        ),
    )
}

fn determinism() -> Outcome {
    let s = builtin("combined").unwrap();
    let csv = || {
        let mut buf = Vec::new();
        write_trace_csv(&run(&s).unwrap(), &mut buf).unwrap();
        buf
    };
    let (a, b) = (csv(), csv());
    outcome(
        a == b,
        format!("combined trace, {} bytes, identical = {}", a.len(), a == b),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("momentum conservation", conservation),
        ("closed-form Lie derivatives", closed_forms),
        ("finite-difference oracle", oracle),
        ("descent of V", descent),
        ("precession cancellation", precession_cancelled),
        ("passive control leaves precession", passive_insufficient),
        ("combined endpoint", combined_endpoint),
        ("RK4 order", integrator_order),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "[{}] {}. {}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            name,
            o.detail
        );
    }
    println!(
        "acceptance: {} passed, {} failed",
        criteria.len() - failed,
        failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
