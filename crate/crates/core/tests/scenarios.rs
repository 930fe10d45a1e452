use nalgebra::Vector3;

use flatdisk::dynamics::InertiaState;
use flatdisk::objectives::{ObjectiveKind, SchedulePlan};
use flatdisk::simulation::{builtin, builtin_scenarios, run, Scenario, Trace};
use flatdisk::so3::orthonormality_error;
use flatdisk::summary::{summarize, MONOTONE_SLACK};
use flatdisk::trace_csv::write_trace_csv;

fn run_builtin(name: &str) -> Trace {
    run(&builtin(name).unwrap()).unwrap()
}

fn max_rise(trace: &Trace) -> f64 {
    trace
        .rows
        .windows(2)
        .filter(|w| w[0].segment == w[1].segment)
        .map(|w| w[1].value - w[0].value)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn alignment_descends() {
    let trace = run_builtin("alignment");
    let (first, last) = (&trace.rows[0], trace.rows.last().unwrap());
    assert!(last.value < first.value);
    assert!(max_rise(&trace) <= MONOTONE_SLACK);
}

#[test]
fn precession_is_cancelled() {
    let trace = run_builtin("precession");
    let (first, last) = (&trace.rows[0], trace.rows.last().unwrap());
    assert_eq!(last.t, 80.0);
    assert!(last.precession_norm_sq < 1e-4 * first.precession_norm_sq);
}

#[test]
fn passive_descends_but_keeps_precessing() {
    let trace = run_builtin("passive");
    let (first, last) = (&trace.rows[0], trace.rows.last().unwrap());
    assert!(max_rise(&trace) <= MONOTONE_SLACK);
    assert!(last.value < first.value);
    assert!(last.precession_norm_sq > 1e-2 * first.precession_norm_sq);
}

#[test]
fn combined_switches_at_twenty() {
    let trace = run_builtin("combined");
    let at = |t: f64| trace.rows.iter().find(|r| r.t >= t).unwrap();
    assert_eq!(at(19.999).objective, ObjectiveKind::Alignment);
    assert_eq!(at(20.0).objective, ObjectiveKind::Precession);
    let summary = summarize(&trace).unwrap();
    assert_eq!(summary.segments.len(), 2);
    assert_eq!(summary.segments[1].t_start, 20.0);
}

#[test]
fn trajectories_stay_on_so3_and_flat() {
    for s in builtin_scenarios() {
        let trace = run(&s).unwrap();
        for r in &trace.rows {
            assert!(
                orthonormality_error(&r.attitude) < 1e-9,
                "{} t={}",
                s.name,
                r.t
            );
            let i1 = r.i2 + r.i3;
            let w = r.omega;
            let ke = 0.5 * (i1 * w.x * w.x + r.i2 * w.y * w.y + r.i3 * w.z * w.z);
            assert!(
                (ke - r.kinetic_energy).abs() <= 1e-12 * (1.0 + ke),
                "{} t={}",
                s.name,
                r.t
            );
        }
    }
}

#[test]
fn rows_are_evenly_spaced_through_t_end() {
    let mut s = builtin("combined").unwrap();
    s.t_end = 0.5;
    s.dt = 0.01;
    let trace = run(&s).unwrap();
    assert_eq!(trace.rows.len(), 51);
    for (i, r) in trace.rows.iter().enumerate() {
        assert!((r.t - i as f64 * 0.01).abs() < 1e-12);
    }
    assert_eq!(trace.rows.last().unwrap().t, 0.5);
}

#[test]
fn free_rotation_conserves_momentum() {
    let mut s = Scenario::new(
        "free",
        Vector3::new(10.0, 4.0, 1.0),
        SchedulePlan::single(40.0, ObjectiveKind::Passive),
        40.0,
    );
    s.inertia0 = InertiaState::new(1.0, 1.0).unwrap();
    s.open_loop = true;
    let summary = summarize(&run(&s).unwrap()).unwrap();
    assert!(
        summary.max_momentum_drift < 1e-8,
        "{}",
        summary.max_momentum_drift
    );
    assert_eq!(summary.final_inertia, (1.0, 1.0));
}

#[test]
fn parallel_runs_match_sequential() {
    let csv = |t: &Trace| {
        let mut buf = Vec::new();
        write_trace_csv(t, &mut buf).unwrap();
        buf
    };
    let scenarios: Vec<Scenario> = builtin_scenarios()
        .into_iter()
        .map(|mut s| {
            s.t_end = 2.0;
            s
        })
        .collect();
    let sequential: Vec<Vec<u8>> = scenarios.iter().map(|s| csv(&run(s).unwrap())).collect();
    let parallel: Vec<Vec<u8>> = std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|s| scope.spawn(move || csv(&run(s).unwrap())))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    assert_eq!(sequential, parallel);
}
