//! Orbits of `X` with parallel frames and adapted Jacobi fields, plus the
//! residual checks and the closed-form space-form solutions.
//!
//! One fixed-step RK4 system carries the orbit point, the parallel frame
//! `(e1, e2)` and two Jacobi fields `J`, `J̃` written in that frame with
//! `J(0) = e1`, `J̃(0) = e2` and `J'(0) = β(J(0))`. Because the frame is
//! parallel, `J'' + R_X J = 0` becomes `J̈ + M(t) J = 0` on the components.

use nalgebra::{SVector, Vector2};
use serde::Serialize;

use crate::curvature::{curvature_at, JacobiTensor, LocalCurvature};
use crate::error::{Error, Result};
use crate::field::{classify_2x2, contact_defect, EigenClass, FieldJet, TangentField, Tolerances};
use crate::geometry::{ChartedManifold, Frame, Mat2, Metric3, Point3, Vec3};

pub const DEFAULT_STEP: f64 = 1e-3;
const FRAME_DRIFT_LIMIT: f64 = 1e-6;
const RIGIDITY_EPS: f64 = 1e-9;

type State = SVector<f64, 17>;

// state layout
const P: usize = 0;
const E1: usize = 3;
const E2: usize = 6;
const J: usize = 9;
const JD: usize = 11;
const JT: usize = 13;
const JTD: usize = 15;

fn v3(s: &State, at: usize) -> Vec3 {
    Vec3::new(s[at], s[at + 1], s[at + 2])
}

fn v2(s: &State, at: usize) -> Vector2<f64> {
    Vector2::new(s[at], s[at + 1])
}

fn put3(s: &mut State, at: usize, v: &Vec3) {
    s.fixed_rows_mut::<3>(at).copy_from(v);
}

fn put2(s: &mut State, at: usize, v: &Vector2<f64>) {
    s.fixed_rows_mut::<2>(at).copy_from(v);
}

/// One sample along an orbit.
#[derive(Debug, Clone, Copy)]
pub struct OrbitSample {
    pub t: f64,
    pub p: Point3,
    pub metric: Metric3,
    /// `x` is the field value at `p`; `e1`, `e2` are parallel transported.
    pub frame: Frame,
    /// `β` in the transported frame.
    pub beta: Mat2,
    /// `R_X` in the transported frame.
    pub jacobi: JacobiTensor,
    /// Components of `J` and `J̃` in the transported frame.
    pub j: [Vector2<f64>; 2],
    pub j_dot: [Vector2<f64>; 2],
    pub frame_residual: f64,
}

impl OrbitSample {
    pub fn ric_x(&self) -> f64 {
        self.jacobi.matrix.trace()
    }

    /// `A = J1 J̃2 − J2 J̃1`.
    pub fn wronskian(&self) -> f64 {
        self.j[0].x * self.j[1].y - self.j[0].y * self.j[1].x
    }

    pub fn contact_defect(&self) -> f64 {
        self.beta[(1, 0)] - self.beta[(0, 1)]
    }

    /// Frame components to a chart vector.
    pub fn to_chart(&self, c: &Vector2<f64>) -> Vec3 {
        self.frame.e1 * c.x + self.frame.e2 * c.y
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Residuals {
    pub riccati: f64,
    pub trace: f64,
    pub adapted: f64,
    pub wronskian: f64,
    pub wronskian_relative: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<OrbitSample>,
    /// Effective step: `t_end / ceil(t_end / requested)`.
    pub step: f64,
    /// The orbit left the chart before `t_end`.
    pub truncated: bool,
    pub residuals: Residuals,
}

impl Trajectory {
    pub fn start(&self) -> &OrbitSample {
        &self.samples[0]
    }

    pub fn end(&self) -> &OrbitSample {
        self.samples.last().expect("non-empty trajectory")
    }
}

fn step_count(t_end: f64, step: f64) -> Result<(usize, f64)> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidInput(format!("step must be positive, got {step}")));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidInput(format!("t_end must be non-negative, got {t_end}")));
    }
    if t_end == 0.0 {
        return Ok((0, step));
    }
    let n = ((t_end / step) - 1e-9).ceil().max(1.0) as usize;
    Ok((n, t_end / n as f64))
}

struct System<'a> {
    man: &'a ChartedManifold,
    field: &'a dyn TangentField,
}

impl System<'_> {
    fn rhs_with(&self, curv: &LocalCurvature, s: &State) -> Result<State> {
        let p = Point3::from(v3(s, P));
        let x = self.field.value(&p)?;
        let e = [v3(s, E1), v3(s, E2)];
        let frame = Frame { x, e1: e[0], e2: e[1] };
        let m = curv.jacobi_tensor(&frame).matrix;
        let mut d = State::zeros();
        put3(&mut d, P, &x);
        put3(&mut d, E1, &-curv.christoffel.contract(&x, &e[0]));
        put3(&mut d, E2, &-curv.christoffel.contract(&x, &e[1]));
        put2(&mut d, J, &v2(s, JD));
        put2(&mut d, JD, &-(m * v2(s, J)));
        put2(&mut d, JT, &v2(s, JTD));
        put2(&mut d, JTD, &-(m * v2(s, JT)));
        Ok(d)
    }

    fn rhs(&self, s: &State) -> Result<State> {
        let p = Point3::from(v3(s, P));
        let curv = curvature_at(self.man, &p)?;
        self.rhs_with(&curv, s)
    }

    fn sample(&self, t: f64, s: &State) -> Result<(OrbitSample, LocalCurvature)> {
        let p = Point3::from(v3(s, P));
        let curv = curvature_at(self.man, &p)?;
        let jet = FieldJet::with_connection(curv.metric, &curv.christoffel, self.field, &p)?;
        let frame = Frame {
            x: jet.x,
            e1: v3(s, E1),
            e2: v3(s, E2),
        };
        let sample = OrbitSample {
            t,
            p,
            metric: curv.metric,
            frame,
            beta: jet.beta(&frame).matrix,
            jacobi: curv.jacobi_tensor(&frame),
            j: [v2(s, J), v2(s, JT)],
            j_dot: [v2(s, JD), v2(s, JTD)],
            frame_residual: frame.orthonormality_residual(&curv.metric),
        };
        Ok((sample, curv))
    }
}

fn is_chart_exit(e: &Error) -> bool {
    matches!(e, Error::OutOfChart(_) | Error::Expr(_) | Error::SingularMetric { .. })
}

/// Integrate the orbit of `X` through `p0` for `t ∈ [0, t_end]` with fixed-step RK4.
pub fn integrate_orbit(
    man: &ChartedManifold,
    field: &dyn TangentField,
    p0: &Point3,
    t_end: f64,
    step: f64,
) -> Result<Trajectory> {
    let (n, h) = step_count(t_end, step)?;
    man.require(p0)?;
    let jet = FieldJet::at(man, field, p0)?;
    let unit = jet.unit_defect();
    if unit > Tolerances::default().unit {
        return Err(Error::NotUnit(unit));
    }
    let frame0 = jet.frame()?;
    let b0 = jet.beta(&frame0).matrix;

    let mut s = State::zeros();
    put3(&mut s, P, &p0.coords);
    put3(&mut s, E1, &frame0.e1);
    put3(&mut s, E2, &frame0.e2);
    put2(&mut s, J, &Vector2::new(1.0, 0.0));
    put2(&mut s, JD, &b0.column(0).into_owned());
    put2(&mut s, JT, &Vector2::new(0.0, 1.0));
    put2(&mut s, JTD, &b0.column(1).into_owned());

    let sys = System { man, field };
    let (first, mut curv) = sys.sample(0.0, &s)?;
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(first);
    let mut truncated = false;

    for k in 0..n {
        let advanced = (|| -> Result<State> {
            let k1 = sys.rhs_with(&curv, &s)?;
            let k2 = sys.rhs(&(s + k1 * (h / 2.0)))?;
            let k3 = sys.rhs(&(s + k2 * (h / 2.0)))?;
            let k4 = sys.rhs(&(s + k3 * h))?;
            Ok(s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
        })();
        let next = match advanced {
            Ok(next) if man.contains(&Point3::from(v3(&next, P))) => next,
            Ok(_) => {
                truncated = true;
                break;
            }
            Err(e) if is_chart_exit(&e) => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let t = if k + 1 == n { t_end } else { (k + 1) as f64 * h };
        match sys.sample(t, &next) {
            Ok((sample, c)) => {
                if sample.frame_residual > FRAME_DRIFT_LIMIT {
                    return Err(Error::StepTooLarge {
                        drift: sample.frame_residual,
                        t,
                    });
                }
                samples.push(sample);
                curv = c;
                s = next;
            }
            Err(e) if is_chart_exit(&e) => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        }
    }

    let mut traj = Trajectory {
        samples,
        step: h,
        truncated,
        residuals: Residuals::default(),
    };
    let w = wronskian(&traj);
    traj.residuals = Residuals {
        riccati: riccati_residual(&traj),
        trace: trace_evolution_residual(&traj),
        adapted: adaptedness_residual(&traj),
        wronskian: w.max_abs,
        wronskian_relative: w.max_relative,
    };
    Ok(traj)
}

/// Orbit points only, on the same step grid as [`integrate_orbit`].
pub fn flow_positions(
    man: &ChartedManifold,
    field: &dyn TangentField,
    p0: &Point3,
    t_end: f64,
    step: f64,
) -> Result<Vec<Point3>> {
    let (n, h) = step_count(t_end, step)?;
    man.require(p0)?;
    let f = |p: &Vec3| -> Result<Vec3> {
        let q = Point3::from(*p);
        man.require(&q)?;
        field.value(&q)
    };
    let mut p = p0.coords;
    let mut out = vec![*p0];
    for _ in 0..n {
        let k1 = f(&p)?;
        let k2 = f(&(p + k1 * (h / 2.0)))?;
        let k3 = f(&(p + k2 * (h / 2.0)))?;
        let k4 = f(&(p + k3 * h))?;
        p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        out.push(Point3::from(p));
    }
    Ok(out)
}

/// Components of the adapted Jacobi field with `J(0) = v0` along a trajectory.
#[derive(Debug, Clone)]
pub struct AdaptedJacobi {
    pub components: Vec<Vector2<f64>>,
    pub derivatives: Vec<Vector2<f64>>,
    /// `max_t |J̇ − B J|`
    pub residual: f64,
}

/// The equation is linear, so the solution is the combination of the two
/// integrated fields with the frame coefficients of `v0`.
pub fn adapted_jacobi(traj: &Trajectory, v0: &Vec3) -> Result<AdaptedJacobi> {
    let s0 = traj.start();
    let g = &s0.metric;
    let along = g.inner(v0, &s0.frame.x);
    if along.abs() > 1e-8 * g.norm(v0).max(1.0) {
        return Err(Error::InvalidInput(format!("v0 is not orthogonal to X (⟨v0, X⟩ = {along:e})")));
    }
    let c = Vector2::new(g.inner(v0, &s0.frame.e1), g.inner(v0, &s0.frame.e2));
    let mut components = Vec::with_capacity(traj.samples.len());
    let mut derivatives = Vec::with_capacity(traj.samples.len());
    let mut residual: f64 = 0.0;
    for s in &traj.samples {
        let j = s.j[0] * c.x + s.j[1] * c.y;
        let jd = s.j_dot[0] * c.x + s.j_dot[1] * c.y;
        residual = residual.max((jd - s.beta * j).norm());
        components.push(j);
        derivatives.push(jd);
    }
    Ok(AdaptedJacobi {
        components,
        derivatives,
        residual,
    })
}

/// `max |J̇ − B J|` over both integrated fields.
pub fn adaptedness_residual(traj: &Trajectory) -> f64 {
    traj.samples
        .iter()
        .flat_map(|s| (0..2).map(move |a| (s.j_dot[a] - s.beta * s.j[a]).norm()))
        .fold(0.0, f64::max)
}

fn central_derivative<T>(traj: &Trajectory, k: usize, f: impl Fn(&OrbitSample) -> T) -> T
where
    T: std::ops::Sub<Output = T> + std::ops::Div<f64, Output = T>,
{
    let (a, b) = (&traj.samples[k - 1], &traj.samples[k + 1]);
    (f(b) - f(a)) / (b.t - a.t)
}

/// `max ‖β' + β² + R_X‖_F` over interior samples.
pub fn riccati_residual(traj: &Trajectory) -> f64 {
    let n = traj.samples.len();
    if n < 3 {
        return 0.0;
    }
    (1..n - 1)
        .map(|k| {
            let s = &traj.samples[k];
            let db = central_derivative(traj, k, |s| s.beta);
            (db + s.beta * s.beta + s.jacobi.matrix).norm()
        })
        .fold(0.0, f64::max)
}

/// `‖β' + β² + R_X‖_F` per sample; one-sided differences at the two ends.
pub fn riccati_profile(traj: &Trajectory) -> Vec<f64> {
    let s = &traj.samples;
    let n = s.len();
    (0..n)
        .map(|k| {
            if n < 2 {
                return 0.0;
            }
            let (a, b) = (k.saturating_sub(1), (k + 1).min(n - 1));
            let db = (s[b].beta - s[a].beta) / (s[b].t - s[a].t);
            (db + s[k].beta * s[k].beta + s[k].jacobi.matrix).norm()
        })
        .collect()
}

/// `max |(tr β)' + Ric(X) + tr β²|` over interior samples.
pub fn trace_evolution_residual(traj: &Trajectory) -> f64 {
    let n = traj.samples.len();
    if n < 3 {
        return 0.0;
    }
    (1..n - 1)
        .map(|k| {
            let s = &traj.samples[k];
            let dtr = central_derivative(traj, k, |s| s.beta.trace());
            (dtr + s.ric_x() + (s.beta * s.beta).trace()).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Serialize)]
pub struct WronskianReport {
    pub numeric: Vec<f64>,
    /// `exp ∫₀ᵗ tr β`, trapezoid rule on the sample grid.
    pub expected: Vec<f64>,
    pub max_abs: f64,
    /// `max |A − exp ∫ tr β| / max(1, |A|)`
    pub max_relative: f64,
}

pub fn wronskian(traj: &Trajectory) -> WronskianReport {
    let mut integral = 0.0;
    let mut numeric = Vec::with_capacity(traj.samples.len());
    let mut expected = Vec::with_capacity(traj.samples.len());
    let (mut max_abs, mut max_relative) = (0.0f64, 0.0f64);
    for (k, s) in traj.samples.iter().enumerate() {
        if k > 0 {
            let prev = &traj.samples[k - 1];
            integral += 0.5 * (s.t - prev.t) * (s.beta.trace() + prev.beta.trace());
        }
        let a = s.wronskian();
        let e = integral.exp();
        max_abs = max_abs.max((a - e).abs());
        max_relative = max_relative.max((a - e).abs() / a.abs().max(1.0));
        numeric.push(a);
        expected.push(e);
    }
    WronskianReport {
        numeric,
        expected,
        max_abs,
        max_relative,
    }
}

/// `max_t |(Φ_t(p0 + s e1) − Φ_t(p0))/s − J(t)|_g / max(1, |J|_g)` where `J(0) = e1`.
/// Adapted Jacobi fields commute with `X`, so they are flow-transported transversals.
pub fn transversal_defect(
    man: &ChartedManifold,
    field: &dyn TangentField,
    traj: &Trajectory,
    s: f64,
    t_max: f64,
) -> Result<f64> {
    let s0 = traj.start();
    let t_end = traj.end().t;
    let base = flow_positions(man, field, &s0.p, t_end, traj.step)?;
    let shifted = flow_positions(man, field, &(s0.p + s0.frame.e1 * s), t_end, traj.step)?;
    let mut worst: f64 = 0.0;
    for (k, sample) in traj.samples.iter().enumerate() {
        if sample.t > t_max + 1e-12 {
            break;
        }
        let fd = (shifted[k] - base[k]) / s;
        let j = sample.to_chart(&sample.j[0]);
        let err = sample.metric.norm(&(fd - j)) / sample.metric.norm(&j).max(1.0);
        worst = worst.max(err);
    }
    Ok(worst)
}

/// First sample time where an adapted field with unit initial length vanishes.
pub fn rigidity_zero(traj: &Trajectory) -> Option<f64> {
    traj.samples
        .iter()
        .skip(1)
        .find(|s| s.j.iter().any(|j| j.norm() < RIGIDITY_EPS))
        .map(|s| s.t)
}

/// Along orbits where every sample is non-contact, the largest drift of the
/// real eigenvalues of `β` from their initial values. Report-only.
pub fn eigenvalue_drift(traj: &Trajectory, tol: &Tolerances) -> Option<f64> {
    if traj.samples.iter().any(|s| s.contact_defect().abs() > tol.self_adjoint) {
        return None;
    }
    let eig = |m: &Mat2| match classify_2x2(&((m + m.transpose()) * 0.5)) {
        EigenClass::RealPair { lambda, mu } => (lambda, mu),
        EigenClass::ComplexPair { a, .. } => (a, a),
    };
    let (l0, m0) = eig(&traj.start().beta);
    Some(
        traj.samples
            .iter()
            .map(|s| {
                let (l, m) = eig(&s.beta);
                (l - l0).abs().max((m - m0).abs())
            })
            .fold(0.0, f64::max),
    )
}

/// Signed contact defect per sample.
pub fn contact_profile(traj: &Trajectory) -> Vec<f64> {
    traj.samples
        .iter()
        .map(|s| {
            contact_defect(&crate::field::BetaMatrix {
                matrix: s.beta,
                frame: s.frame,
                normal_leak: 0.0,
            })
        })
        .collect()
}

/// `j'' + κ j = 0`, `j(0) = j0`, `j'(0) = jp0`.
pub fn jacobi_component_closed_form(kappa: f64, j0: f64, jp0: f64, t: f64) -> f64 {
    if kappa > 0.0 {
        let w = kappa.sqrt();
        j0 * (w * t).cos() + jp0 / w * (w * t).sin()
    } else if kappa < 0.0 {
        let w = (-kappa).sqrt();
        j0 * (w * t).cosh() + jp0 / w * (w * t).sinh()
    } else {
        j0 + jp0 * t
    }
}

/// `arcoth(x) = ½ ln((x+1)/(x−1))` for `|x| > 1`.
pub fn arcoth(x: f64) -> f64 {
    0.5 * ((x + 1.0) / (x - 1.0)).ln()
}

/// `arccot` with range `(0, π)`.
fn arccot(x: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 - x.atan()
}

/// Smallest positive zero of the solution with `j(0) = 1`, `j'(0) = λ` in
/// constant curvature `c`, if any.
pub fn first_zero_space_form(c: f64, lambda: f64) -> Option<f64> {
    if c > 0.0 {
        let w = c.sqrt();
        Some(arccot(-lambda / w) / w)
    } else if c < 0.0 {
        let w = (-c).sqrt();
        let r = -lambda / w;
        (r > 1.0).then(|| arcoth(r) / w)
    } else {
        (lambda < 0.0).then(|| -1.0 / lambda)
    }
}

/// Closed-form solution of `f' + f²/2 = 0`: `f(t) = (t/2 + 1/f0)⁻¹`.
pub fn trace_comparison(f0: f64, t: f64) -> Result<f64> {
    if f0 == 0.0 {
        return Ok(0.0);
    }
    let d = t / 2.0 + 1.0 / f0;
    if (t + 2.0 / f0).abs() < 1e-12 {
        return Err(Error::PoleReached(t));
    }
    Ok(1.0 / d)
}

fn scalar_rk4(kappa: f64, y: Vector2<f64>, h: f64) -> Vector2<f64> {
    let f = |y: Vector2<f64>| Vector2::new(y.y, -kappa * y.x);
    let k1 = f(y);
    let k2 = f(y + k1 * (h / 2.0));
    let k3 = f(y + k2 * (h / 2.0));
    let k4 = f(y + k3 * h);
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// First positive zero of the numerically integrated `j'' + κ j = 0`,
/// bracketed on the step grid and refined by bisection on a partial step.
pub fn jacobi_component_numeric_zero(kappa: f64, j0: f64, jp0: f64, t_max: f64, step: f64) -> Option<f64> {
    let n = (t_max / step).ceil() as usize;
    let mut y = Vector2::new(j0, jp0);
    for k in 0..n {
        let next = scalar_rk4(kappa, y, step);
        if next.x == 0.0 {
            return Some((k + 1) as f64 * step);
        }
        if y.x * next.x < 0.0 {
            let (mut lo, mut hi) = (0.0, step);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if scalar_rk4(kappa, y, mid).x * y.x > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Some(k as f64 * step + 0.5 * (lo + hi));
        }
        y = next;
    }
    None
}
