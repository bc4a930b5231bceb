#![allow(dead_code)]

use reebcheck::expr::{eval_dual, eval_scalar, parse};

/// Smooth test expressions, each well defined on the sample box below.
pub const CORPUS: [&str; 20] = [
    "x1",
    "x1*x2*x3",
    "x1^2 + 3*x2 - x3/2",
    "sin(x1)*cos(x2)",
    "exp(x1*x2) - x3",
    "log(x1^2 + x2^2 + 1)",
    "sqrt(1 + x1^2 + x3^2)",
    "tan(x1/4)",
    "sinh(x2) + cosh(x3)",
    "tanh(x1*x2 - x3)",
    "1/(1 + x1^2)",
    "x3^3 - 2*x3^2 + x1",
    "(x1 + x2)/(2 + x3^2)",
    "exp(-x1^2)*sin(x2)",
    "4/(1 + x1^2 + x2^2 + x3^2)^2",
    "(x1 + x3*x2)/(1 + x3^2)",
    "cos(x1*x2*x3)",
    "(x1^2 + 2)^1.5",
    "-x2*exp(x3/3)",
    "abs(x1) + 2",
];

/// Half-width of the coordinate box the corpus is sampled on. `abs` is kept
/// smooth by shifting its sample points away from zero.
pub const BOX: f64 = 1.5;

pub const FD_STEP: f64 = 1e-6;
pub const DUAL_REL_TOL: f64 = 1e-6;

/// Worst relative mismatch between dual partials and central differences.
pub fn dual_vs_fd(src: &str, p: [f64; 3]) -> f64 {
    let e = parse(src).expect("corpus parses");
    let d = eval_dual(&e, p).expect("corpus evaluates");
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        let (mut a, mut b) = (p, p);
        a[i] += FD_STEP;
        b[i] -= FD_STEP;
        let fd = (eval_scalar(&e, a).unwrap() - eval_scalar(&e, b).unwrap()) / (2.0 * FD_STEP);
        worst = worst.max((d.partials[i] - fd).abs() / d.partials[i].abs().max(1.0));
    }
    worst
}

/// Ten sample points per expression from a fixed stream.
pub fn sample_points(seed: u64) -> Vec<[f64; 3]> {
    use rand::{RngExt, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..10)
        .map(|_| {
            let mut p = [0.0; 3];
            for c in &mut p {
                let v: f64 = rng.random_range(-BOX..BOX);
                *c = if v.abs() < 0.1 { v + 0.2 } else { v };
            }
            p
        })
        .collect()
}

pub fn orbit_of(name: &str, t_end: f64, step: f64) -> reebcheck::flow::Trajectory {
    let e = reebcheck::catalog::builtin(name).unwrap();
    reebcheck::flow::integrate_orbit(&e.manifold, &e.field, &e.orbit_start, t_end, step).unwrap()
}
