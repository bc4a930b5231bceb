//! Charts, metrics, orthonormal frames and the metric differentiation backend.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::expr::{self, ExprAst};

pub type Point3 = nalgebra::Point3<f64>;
pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;
pub type Mat2 = nalgebra::Matrix2<f64>;

/// `∂_k g_ij`, indexed `[k]` then `(i, j)`.
pub type MetricPartials = [Mat3; 3];

pub const DEFAULT_DIFF_STEP: f64 = 1e-5;
const MAX_CONDITION: f64 = 1e12;
/// Seeds closer than this angle to span(X) are rejected by Gram–Schmidt.
const SEED_ANGLE: f64 = 1e-6;

/// Symmetric 3×3 metric. Only the upper triangle is ever read on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric3(Mat3);

impl Metric3 {
    /// Entries in the order `g11, g12, g13, g22, g23, g33`.
    pub fn from_upper(u: [f64; 6]) -> Self {
        Metric3(Mat3::new(u[0], u[1], u[2], u[1], u[3], u[4], u[2], u[4], u[5]))
    }

    pub fn from_matrix(m: &Mat3) -> Self {
        Self::from_upper([m[(0, 0)], m[(0, 1)], m[(0, 2)], m[(1, 1)], m[(1, 2)], m[(2, 2)]])
    }

    pub fn identity() -> Self {
        Metric3(Mat3::identity())
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn inner(&self, v: &Vec3, w: &Vec3) -> f64 {
        v.dot(&(self.0 * w))
    }

    pub fn norm(&self, v: &Vec3) -> f64 {
        self.inner(v, v).max(0.0).sqrt()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let mut ev: Vec<f64> = self.0.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        [ev[0], ev[1], ev[2]]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.eigenvalues()[0] > 0.0
    }

    pub fn condition_number(&self) -> f64 {
        let ev = self.eigenvalues();
        if ev[0] <= 0.0 {
            f64::INFINITY
        } else {
            ev[2] / ev[0]
        }
    }

    /// Inverse metric `g^ij`; fails for indefinite or badly conditioned metrics.
    pub fn inverse_at(&self, p: &Point3) -> Result<Mat3> {
        let condition = self.condition_number();
        let singular = || Error::SingularMetric {
            point: [p.x, p.y, p.z],
            condition,
        };
        if !(condition <= MAX_CONDITION) {
            return Err(singular());
        }
        self.0.try_inverse().ok_or_else(singular)
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }
}

/// `vᵀ g w`.
pub fn inner(gm: &Metric3, v: &Vec3, w: &Vec3) -> f64 {
    gm.inner(v, w)
}

pub type MetricFn = dyn Fn(&Point3) -> Mat3 + Send + Sync;
pub type PredicateFn = dyn Fn(&Point3) -> bool + Send + Sync;
pub type ParamMapFn = dyn Fn([f64; 3]) -> Point3 + Send + Sync;
pub type DensityFn = dyn Fn([f64; 3]) -> f64 + Send + Sync;

#[derive(Clone)]
pub enum MetricSource {
    /// Upper triangle `g11, g12, g13, g22, g23, g33`.
    Expr(Arc<[ExprAst; 6]>),
    Function(Arc<MetricFn>),
}

#[derive(Clone)]
pub enum Domain {
    Everywhere,
    /// Points where the expression evaluates to a strictly positive number.
    Positive(ExprAst),
    Predicate(Arc<PredicateFn>),
}

impl Domain {
    pub fn contains(&self, p: &Point3) -> bool {
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
            return false;
        }
        match self {
            Domain::Everywhere => true,
            Domain::Positive(e) => matches!(expr::eval_scalar(e, [p.x, p.y, p.z]), Ok(v) if v > 0.0),
            Domain::Predicate(f) => f(p),
        }
    }
}

/// How metric derivatives are obtained.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffMode {
    /// Dual-number evaluation; only meaningful for expression metrics.
    Dual,
    Central,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiffConfig {
    pub mode: DiffMode,
    /// Central-difference step, also used for derivatives of Christoffel symbols.
    pub step: f64,
}

impl Default for DiffConfig {
    fn default() -> Self {
        DiffConfig {
            mode: DiffMode::Dual,
            step: DEFAULT_DIFF_STEP,
        }
    }
}

/// A box in parameter space mapped onto the chart, with the Riemannian volume
/// density expressed against `dq1 dq2 dq3`.
#[derive(Clone)]
pub struct Parametrization {
    pub name: String,
    pub bounds: [(f64, f64); 3],
    pub map: Arc<ParamMapFn>,
    pub density: Arc<DensityFn>,
}

impl fmt::Debug for Parametrization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Parametrization")
            .field("name", &self.name)
            .field("bounds", &self.bounds)
            .finish_non_exhaustive()
    }
}

/// Single-chart Riemannian 3-manifold.
#[derive(Clone)]
pub struct ChartedManifold {
    pub name: String,
    metric: MetricSource,
    domain: Domain,
    diff: DiffConfig,
    parametrization: Option<Parametrization>,
}

impl fmt::Debug for ChartedManifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartedManifold")
            .field("name", &self.name)
            .field("diff", &self.diff)
            .field("parametrization", &self.parametrization)
            .finish_non_exhaustive()
    }
}

impl ChartedManifold {
    /// Metric from upper-triangle expressions; `domain` is `None` for the whole chart
    /// or an expression that must be strictly positive.
    pub fn from_expressions(name: &str, upper: [&str; 6], domain: Option<&str>) -> Result<Self> {
        let parsed: Vec<ExprAst> = upper.iter().map(|s| expr::parse(s)).collect::<Result<_, _>>()?;
        let entries: [ExprAst; 6] = parsed.try_into().expect("six entries");
        let domain = match domain {
            None => Domain::Everywhere,
            Some(src) => Domain::Positive(expr::parse(src)?),
        };
        Ok(ChartedManifold {
            name: name.to_string(),
            metric: MetricSource::Expr(Arc::new(entries)),
            domain,
            diff: DiffConfig::default(),
            parametrization: None,
        })
    }

    /// Opaque metric function; derivatives always by central differences.
    pub fn from_fn(
        name: &str,
        metric: impl Fn(&Point3) -> Mat3 + Send + Sync + 'static,
        domain: Domain,
    ) -> Self {
        ChartedManifold {
            name: name.to_string(),
            metric: MetricSource::Function(Arc::new(metric)),
            domain,
            diff: DiffConfig {
                mode: DiffMode::Central,
                step: DEFAULT_DIFF_STEP,
            },
            parametrization: None,
        }
    }

    pub fn with_diff(mut self, diff: DiffConfig) -> Self {
        self.diff = match self.metric {
            MetricSource::Function(_) => DiffConfig {
                mode: DiffMode::Central,
                ..diff
            },
            MetricSource::Expr(_) => diff,
        };
        self
    }

    pub fn with_parametrization(mut self, p: Parametrization) -> Self {
        self.parametrization = Some(p);
        self
    }

    pub fn diff(&self) -> DiffConfig {
        self.diff
    }

    pub fn parametrization(&self) -> Option<&Parametrization> {
        self.parametrization.as_ref()
    }

    pub fn contains(&self, p: &Point3) -> bool {
        self.domain.contains(p)
    }

    pub fn require(&self, p: &Point3) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutOfChart([p.x, p.y, p.z]))
        }
    }

    fn raw_metric(&self, p: &Point3) -> Result<Metric3> {
        match &self.metric {
            MetricSource::Expr(entries) => {
                let c = [p.x, p.y, p.z];
                let mut u = [0.0; 6];
                for (slot, e) in u.iter_mut().zip(entries.iter()) {
                    *slot = expr::eval_scalar(e, c)?;
                }
                Ok(Metric3::from_upper(u))
            }
            MetricSource::Function(f) => Ok(Metric3::from_matrix(&f(p))),
        }
    }

    pub fn metric_at(&self, p: &Point3) -> Result<Metric3> {
        self.require(p)?;
        self.raw_metric(p)
    }

    /// Metric and its first partials at `p`.
    pub fn metric_with_partials(&self, p: &Point3) -> Result<(Metric3, MetricPartials)> {
        self.require(p)?;
        match (&self.metric, self.diff.mode) {
            (MetricSource::Expr(entries), DiffMode::Dual) => {
                let c = [p.x, p.y, p.z];
                let mut u = [0.0; 6];
                let mut du = [[0.0; 6]; 3];
                for (n, e) in entries.iter().enumerate() {
                    let d = expr::eval_dual(e, c)?;
                    u[n] = d.value;
                    for k in 0..3 {
                        du[k][n] = d.partials[k];
                    }
                }
                let partials = du.map(|row| *Metric3::from_upper(row).matrix());
                Ok((Metric3::from_upper(u), partials))
            }
            _ => {
                let g = self.raw_metric(p)?;
                let h = self.diff.step;
                let mut partials = [Mat3::zeros(); 3];
                for (k, slot) in partials.iter_mut().enumerate() {
                    let mut fwd = *p;
                    let mut bwd = *p;
                    fwd[k] += h;
                    bwd[k] -= h;
                    self.require(&fwd)?;
                    self.require(&bwd)?;
                    let gp = self.raw_metric(&fwd)?;
                    let gm = self.raw_metric(&bwd)?;
                    *slot = (gp.matrix() - gm.matrix()) / (2.0 * h);
                }
                Ok((g, partials))
            }
        }
    }

    pub fn metric_partials(&self, p: &Point3) -> Result<MetricPartials> {
        Ok(self.metric_with_partials(p)?.1)
    }

    /// Checks positive definiteness at `p`.
    pub fn check_positive_definite(&self, p: &Point3) -> Result<()> {
        let g = self.metric_at(p)?;
        if g.is_positive_definite() {
            Ok(())
        } else {
            Err(Error::SingularMetric {
                point: [p.x, p.y, p.z],
                condition: g.condition_number(),
            })
        }
    }
}

/// Free-function form of [`ChartedManifold::metric_partials`].
pub fn metric_partials(man: &ChartedManifold, p: &Point3) -> Result<MetricPartials> {
    man.metric_partials(p)
}

/// `(X, e1, e2)` with `X` the unit field value and `e1, e2` spanning `X⊥`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub x: Vec3,
    pub e1: Vec3,
    pub e2: Vec3,
}

impl Frame {
    pub fn vectors(&self) -> [Vec3; 3] {
        [self.x, self.e1, self.e2]
    }

    /// Same plane, opposite orientation (`e1 ↔ e2`).
    pub fn reversed(&self) -> Frame {
        Frame {
            x: self.x,
            e1: self.e2,
            e2: self.e1,
        }
    }

    /// Rotate `(e1, e2)` by `angle` within `X⊥`.
    pub fn rotated(&self, angle: f64) -> Frame {
        let (s, c) = angle.sin_cos();
        Frame {
            x: self.x,
            e1: self.e1 * c + self.e2 * s,
            e2: -self.e1 * s + self.e2 * c,
        }
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_residual(&self, gm: &Metric3) -> f64 {
        let v = self.vectors();
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in i..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gm.inner(&v[i], &v[j]) - target).abs());
            }
        }
        worst
    }

    /// Chart orientation sign of `(X, e1, e2)`.
    pub fn orientation(&self) -> f64 {
        Mat3::from_columns(&self.vectors()).determinant().signum()
    }

    /// Flip `e1`, `e2` independently so each has positive inner product with
    /// its counterpart in `prev`.
    pub fn aligned_with(mut self, prev: &Frame, gm: &Metric3) -> Frame {
        if gm.inner(&self.e1, &prev.e1) < 0.0 {
            self.e1 = -self.e1;
        }
        if gm.inner(&self.e2, &prev.e2) < 0.0 {
            self.e2 = -self.e2;
        }
        self
    }
}

pub fn standard_basis() -> [Vec3; 3] {
    [Vec3::x(), Vec3::y(), Vec3::z()]
}

/// Gram–Schmidt of the seeds against `X` under `g`. A seed within
/// 1e-6 rad of the span of the vectors already accepted is skipped and the
/// standard basis fills in. The result is oriented so that `(X, e1, e2)` is
/// positive in the chart orientation.
pub fn orthonormal_complement(gm: &Metric3, x: &Vec3, seeds: [Vec3; 2]) -> Result<(Vec3, Vec3)> {
    let xn = x / gm.norm(x);
    let mut accepted: Vec<Vec3> = Vec::with_capacity(2);
    let mut seed_hits = 0;
    let candidates = seeds.iter().chain(standard_basis().iter()).copied().collect::<Vec<_>>();
    for (idx, s) in candidates.iter().enumerate() {
        if accepted.len() == 2 {
            break;
        }
        let mut r = *s - xn * gm.inner(&xn, s);
        for a in &accepted {
            r -= a * gm.inner(a, &r);
        }
        let len = gm.norm(&r);
        let scale = gm.norm(s);
        if scale == 0.0 || len <= SEED_ANGLE.sin() * scale {
            continue;
        }
        // second pass keeps the frame orthonormal to rounding
        let mut r = r / len;
        r -= xn * gm.inner(&xn, &r);
        for a in &accepted {
            r -= a * gm.inner(a, &r);
        }
        accepted.push(r / gm.norm(&r));
        if idx < 2 {
            seed_hits += 1;
        }
    }
    if seed_hits == 0 {
        return Err(Error::DegenerateSeed);
    }
    let (e1, mut e2) = (accepted[0], accepted[1]);
    if Mat3::from_columns(&[xn, e1, e2]).determinant() < 0.0 {
        e2 = -e2;
    }
    Ok((e1, e2))
}

/// Frame at a point from the default seeds `∂1, ∂2`, with the standard-basis
/// fallback when both are degenerate.
pub fn frame_at(gm: &Metric3, x: &Vec3) -> Result<Frame> {
    let basis = standard_basis();
    let (e1, e2) = match orthonormal_complement(gm, x, [basis[0], basis[1]]) {
        Ok(pair) => pair,
        Err(Error::DegenerateSeed) => orthonormal_complement(gm, x, [basis[1], basis[2]])?,
        Err(e) => return Err(e),
    };
    Ok(Frame {
        x: x / gm.norm(x),
        e1,
        e2,
    })
}

/// Axis-aligned lattice of chart points.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: [f64; 3],
    pub max: [f64; 3],
    pub counts: [usize; 3],
}

impl Grid {
    pub fn new(min: [f64; 3], max: [f64; 3], counts: [usize; 3]) -> Self {
        Grid { min, max, counts }
    }

    pub fn cube(lo: f64, hi: f64, n: usize) -> Self {
        Grid::new([lo; 3], [hi; 3], [n; 3])
    }

    pub fn len(&self) -> usize {
        self.counts.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coord(&self, axis: usize, i: usize) -> f64 {
        let n = self.counts[axis];
        if n <= 1 {
            self.min[axis]
        } else {
            self.min[axis] + (self.max[axis] - self.min[axis]) * i as f64 / (n - 1) as f64
        }
    }

    /// Points in lexicographic order (`x3` fastest).
    pub fn points(&self) -> Vec<Point3> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.counts[0] {
            for j in 0..self.counts[1] {
                for k in 0..self.counts[2] {
                    out.push(Point3::new(self.coord(0, i), self.coord(1, j), self.coord(2, k)));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h3() -> ChartedManifold {
        ChartedManifold::from_expressions("h3", ["1/x3^2", "0", "0", "1/x3^2", "0", "1/x3^2"], Some("x3")).unwrap()
    }

    fn h2xr() -> ChartedManifold {
        ChartedManifold::from_expressions("h2xr", ["1/x2^2", "0", "0", "1/x2^2", "0", "1"], Some("x2")).unwrap()
    }

    #[test]
    fn euclidean_partials_vanish() {
        let m = ChartedManifold::from_expressions("e", ["1", "0", "0", "1", "0", "1"], None).unwrap();
        let d = m.metric_partials(&Point3::new(0.3, -2.0, 5.0)).unwrap();
        assert!(d.iter().all(|m| m.norm() == 0.0));
    }

    #[test]
    fn hyperbolic_partials_match_analytic_derivative() {
        // d/dx3 x3^-2 = -2 x3^-3
        let d = h3().metric_partials(&Point3::new(0.0, 0.0, 2.0)).unwrap();
        assert!((d[2][(0, 0)] - (-2.0 / 8.0)).abs() < 1e-15);
        assert_eq!(d[0][(0, 0)], 0.0);

        let d = h2xr().metric_partials(&Point3::new(0.0, 1.0, 0.0)).unwrap();
        assert!((d[1][(0, 0)] + 2.0).abs() < 1e-15);
        assert_eq!(d[1][(2, 2)], 0.0);
    }

    #[test]
    fn central_backend_agrees_with_dual() {
        let p = Point3::new(0.1, 0.2, 1.3);
        let central = h3().with_diff(DiffConfig {
            mode: DiffMode::Central,
            step: 1e-5,
        });
        let a = h3().metric_partials(&p).unwrap();
        let b = central.metric_partials(&p).unwrap();
        for k in 0..3 {
            assert!((a[k] - b[k]).norm() < 1e-9);
        }
    }

    #[test]
    fn central_differences_converge_at_second_order() {
        let f = ChartedManifold::from_fn(
            "s3",
            |p: &Point3| Mat3::identity() * (4.0 / (1.0 + p.coords.norm_squared()).powi(2)),
            Domain::Everywhere,
        );
        let exact = ChartedManifold::from_expressions(
            "s3",
            ["4/(1+x1^2+x2^2+x3^2)^2", "0", "0", "4/(1+x1^2+x2^2+x3^2)^2", "0", "4/(1+x1^2+x2^2+x3^2)^2"],
            None,
        )
        .unwrap();
        let p = Point3::new(0.4, -0.3, 0.7);
        let truth = exact.metric_partials(&p).unwrap();
        let err = |h: f64| {
            let d = f
                .clone()
                .with_diff(DiffConfig {
                    mode: DiffMode::Central,
                    step: h,
                })
                .metric_partials(&p)
                .unwrap();
            (0..3).map(|k| (d[k] - truth[k]).norm()).fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(1e-2), err(5e-3));
        assert!(coarse / fine >= 3.0, "{coarse} {fine}");
    }

    #[test]
    fn stencil_leaving_domain_is_out_of_chart() {
        let m = h3().with_diff(DiffConfig {
            mode: DiffMode::Central,
            step: 1e-3,
        });
        let err = m.metric_partials(&Point3::new(0.0, 0.0, 5e-4)).unwrap_err();
        assert!(matches!(err, Error::OutOfChart(_)));
        assert!(matches!(h3().metric_at(&Point3::new(0.0, 0.0, 0.0)), Err(Error::OutOfChart(_))));
    }

    #[test]
    fn inner_products() {
        let id = Metric3::identity();
        assert_eq!(inner(&id, &Vec3::x(), &Vec3::y()), 0.0);
        let g = h3().metric_at(&Point3::new(0.0, 0.0, 2.0)).unwrap();
        assert_eq!(inner(&g, &Vec3::z(), &Vec3::z()), 0.25);
        assert!(g.is_positive_definite());
    }

    #[test]
    fn upper_triangle_is_authoritative() {
        let m = Mat3::new(1.0, 2.0, 3.0, 9.0, 4.0, 5.0, 9.0, 9.0, 6.0);
        let g = Metric3::from_matrix(&m);
        assert_eq!(g.matrix()[(1, 0)], 2.0);
        assert_eq!(g.matrix()[(2, 1)], 5.0);
    }

    #[test]
    fn complements() {
        let id = Metric3::identity();
        let seeds = [Vec3::x(), Vec3::y()];
        let (e1, e2) = orthonormal_complement(&id, &Vec3::z(), seeds).unwrap();
        assert_eq!((e1, e2), (Vec3::x(), Vec3::y()));

        let (e1, e2) = orthonormal_complement(&id, &Vec3::x(), seeds).unwrap();
        assert_eq!((e1, e2), (Vec3::y(), Vec3::z()));

        let g = h3().metric_at(&Point3::new(0.0, 0.0, 2.0)).unwrap();
        let (e1, e2) = orthonormal_complement(&g, &Vec3::new(0.0, 0.0, 2.0), seeds).unwrap();
        assert!((e1 - Vec3::new(2.0, 0.0, 0.0)).norm() < 1e-15);
        assert!((e2 - Vec3::new(0.0, 2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn degenerate_seeds() {
        let id = Metric3::identity();
        let err = orthonormal_complement(&id, &Vec3::x(), [Vec3::x(), Vec3::x() * 2.0]).unwrap_err();
        assert_eq!(err, Error::DegenerateSeed);
        let f = frame_at(&id, &Vec3::x()).unwrap();
        assert!(f.orthonormality_residual(&id) < 1e-15);
    }

    #[test]
    fn frames_are_positively_oriented() {
        let id = Metric3::identity();
        for x in [Vec3::x(), Vec3::y(), Vec3::z(), -Vec3::y(), Vec3::new(1.0, -2.0, 0.5).normalize()] {
            let f = frame_at(&id, &x).unwrap();
            assert_eq!(f.orientation(), 1.0);
            assert!(f.orthonormality_residual(&id) < 1e-14);
        }
    }

    #[test]
    fn grid_order_is_lexicographic() {
        let g = Grid::new([0.0; 3], [1.0; 3], [2, 1, 3]);
        let pts = g.points();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], Point3::new(0.0, 0.0, 0.0));
        assert_eq!(pts[1], Point3::new(0.0, 0.0, 0.5));
        assert_eq!(pts[3], Point3::new(1.0, 0.0, 0.0));
    }
}
