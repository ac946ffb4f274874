//! Random execution-report pairs for the oracle laws.

use rand::seq::IndexedRandom;
use rand::Rng;

use evofuzz_core::oracle::{BackendId, ExecStatus, ExecutionReport, ToleranceSpec, ValueKind, ValueSnapshot};

fn element<R: Rng>(rng: &mut R) -> f64 {
    match rng.random_range(0..10) {
        0 => f64::NAN,
        1 => f64::INFINITY,
        2 => f64::NEG_INFINITY,
        3 => 0.0,
        4 => rng.random_range(-1e-6..1e-6),
        _ => rng.random_range(-1e3..1e3),
    }
}

fn perturb<R: Rng>(rng: &mut R, x: f64) -> f64 {
    match rng.random_range(0..12) {
        0 => f64::NAN,
        1 => -x,
        2 => element(rng),
        3..=6 => {
            let scale = 10f64.powi(rng.random_range(-9..0));
            x + x.abs().max(1e-6) * scale * rng.random_range(-1.0..1.0)
        }
        _ => x,
    }
}

/// A cpu report and an accelerator report of the same shape with some
/// elements perturbed. Small caps force some payloads into summary form.
pub fn report_pair<R: Rng>(rng: &mut R) -> (ExecutionReport, ExecutionReport) {
    let mut a = ExecutionReport::new(BackendId::Cpu, ExecStatus::Ok);
    let mut b = ExecutionReport::new(BackendId::Accelerator, ExecStatus::Ok);
    let cap = *[2usize, 4096].choose(rng).unwrap();
    for stmt in 0..rng.random_range(1..4) {
        let n = rng.random_range(0..6);
        let xs: Vec<f64> = (0..n).map(|_| element(rng)).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| perturb(rng, x)).collect();
        let var = format!("v{stmt}");
        a.snapshots.push(ValueSnapshot::numeric(&var, stmt, ValueKind::Tensor, "float32", vec![n], xs, cap));
        b.snapshots.push(ValueSnapshot::numeric(&var, stmt, ValueKind::Tensor, "float32", vec![n], ys, cap));
    }
    (a, b)
}

pub fn tolerance<R: Rng>(rng: &mut R) -> ToleranceSpec {
    let mut pick = || if rng.random_bool(0.2) { 0.0 } else { 10f64.powf(rng.random_range(-9.0..-1.0)) };
    ToleranceSpec { rtol: pick(), atol: pick() }
}

/// A tolerance at least as loose as `t` in both components.
pub fn looser<R: Rng>(rng: &mut R, t: ToleranceSpec) -> ToleranceSpec {
    let mut grow = |x: f64| if rng.random_bool(0.3) { x } else { x * rng.random_range(1.0..1e3) + rng.random_range(0.0..1e-3) };
    ToleranceSpec { rtol: grow(t.rtol), atol: grow(t.atol) }
}
