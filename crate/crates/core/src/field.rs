//! Pointwise analysis of a candidate geodesic unit field `X`: defects, the
//! shape operator `β = ∇X|X⊥`, the contact defect and eigenvalue classes.

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::curvature::{self, DISCRIMINANT_EPS};
use crate::error::{Error, Result};
use crate::expr::{self, ExprAst};
use crate::geometry::{frame_at, ChartedManifold, Frame, Mat2, Mat3, Metric3, Point3, Vec3, DEFAULT_DIFF_STEP};

/// A vector field on the chart with a Jacobian `[(k, i)] = ∂_i W^k`.
pub trait TangentField: Send + Sync {
    fn value(&self, p: &Point3) -> Result<Vec3>;

    /// Central differences with the default step unless overridden.
    fn jacobian(&self, p: &Point3) -> Result<Mat3> {
        let h = DEFAULT_DIFF_STEP;
        let mut jac = Mat3::zeros();
        for i in 0..3 {
            let mut fwd = *p;
            let mut bwd = *p;
            fwd[i] += h;
            bwd[i] -= h;
            let col = (self.value(&fwd)? - self.value(&bwd)?) / (2.0 * h);
            jac.set_column(i, &col);
        }
        Ok(jac)
    }
}

pub type FieldFn = dyn Fn(&Point3) -> Vec3 + Send + Sync;

#[derive(Clone)]
enum FieldSource {
    Expr(Arc<[ExprAst; 3]>),
    Function { f: Arc<FieldFn>, step: f64 },
}

/// Candidate geodesic unit field given by its chart components.
#[derive(Clone)]
pub struct UnitField {
    pub name: String,
    source: FieldSource,
}

impl fmt::Debug for UnitField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UnitField").field("name", &self.name).finish_non_exhaustive()
    }
}

impl UnitField {
    pub fn from_expressions(name: &str, components: [&str; 3]) -> Result<Self> {
        let parsed: Vec<ExprAst> = components.iter().map(|s| expr::parse(s)).collect::<Result<_, _>>()?;
        Ok(UnitField {
            name: name.to_string(),
            source: FieldSource::Expr(Arc::new(parsed.try_into().expect("three components"))),
        })
    }

    pub fn from_fn(name: &str, f: impl Fn(&Point3) -> Vec3 + Send + Sync + 'static) -> Self {
        UnitField {
            name: name.to_string(),
            source: FieldSource::Function {
                f: Arc::new(f),
                step: DEFAULT_DIFF_STEP,
            },
        }
    }
}

impl TangentField for UnitField {
    fn value(&self, p: &Point3) -> Result<Vec3> {
        match &self.source {
            FieldSource::Expr(c) => {
                let q = [p.x, p.y, p.z];
                Ok(Vec3::new(
                    expr::eval_scalar(&c[0], q)?,
                    expr::eval_scalar(&c[1], q)?,
                    expr::eval_scalar(&c[2], q)?,
                ))
            }
            FieldSource::Function { f, .. } => Ok(f(p)),
        }
    }

    fn jacobian(&self, p: &Point3) -> Result<Mat3> {
        match &self.source {
            FieldSource::Expr(c) => {
                let q = [p.x, p.y, p.z];
                let mut jac = Mat3::zeros();
                for k in 0..3 {
                    let d = expr::eval_dual(&c[k], q)?;
                    for i in 0..3 {
                        jac[(k, i)] = d.partials[i];
                    }
                }
                Ok(jac)
            }
            FieldSource::Function { f, step } => {
                let mut jac = Mat3::zeros();
                for i in 0..3 {
                    let mut fwd = *p;
                    let mut bwd = *p;
                    fwd[i] += step;
                    bwd[i] -= step;
                    jac.set_column(i, &((f(&fwd) - f(&bwd)) / (2.0 * step)));
                }
                Ok(jac)
            }
        }
    }
}

/// Numerical thresholds for verdicts. The theory is exact; these make it decidable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub unit: f64,
    pub geodesic: f64,
    /// `|B21 − B12|` below this is "not contact".
    pub self_adjoint: f64,
    pub rank_relative: f64,
    pub rank_absolute: f64,
    pub hypothesis: f64,
    /// `|contact_defect|` above this is "contact".
    pub defect_floor: f64,
    pub killing: f64,
    pub residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            unit: 1e-6,
            geodesic: 1e-6,
            self_adjoint: 1e-8,
            rank_relative: 1e-6,
            rank_absolute: 1e-9,
            hypothesis: 1e-6,
            defect_floor: 1e-6,
            killing: 1e-6,
            residual: 1e-4,
        }
    }
}

/// First-order data of `X` at a point: `nabla * v = ∇_v X`.
#[derive(Debug, Clone, Copy)]
pub struct FieldJet {
    pub metric: Metric3,
    pub x: Vec3,
    pub nabla: Mat3,
}

impl FieldJet {
    pub fn at(man: &ChartedManifold, x: &dyn TangentField, p: &Point3) -> Result<Self> {
        let (metric, gamma) = curvature::metric_and_christoffel(man, p)?;
        Self::with_connection(metric, &gamma, x, p)
    }

    pub(crate) fn with_connection(
        metric: Metric3,
        gamma: &curvature::Christoffel,
        x: &dyn TangentField,
        p: &Point3,
    ) -> Result<Self> {
        let value = x.value(p)?;
        let nabla = x.jacobian(p)? + gamma.along(&value);
        Ok(FieldJet { metric, x: value, nabla })
    }

    pub fn unit_defect(&self) -> f64 {
        (self.metric.inner(&self.x, &self.x) - 1.0).abs()
    }

    pub fn geodesic_defect(&self) -> f64 {
        self.metric.norm(&(self.nabla * self.x))
    }

    pub fn frame(&self) -> Result<Frame> {
        frame_at(&self.metric, &self.x)
    }

    pub fn killing_defect(&self, frame: &Frame) -> f64 {
        let f = frame.vectors();
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in i..3 {
                let s = self.metric.inner(&(self.nabla * f[i]), &f[j]) + self.metric.inner(&(self.nabla * f[j]), &f[i]);
                worst = worst.max(s.abs());
            }
        }
        worst
    }

    pub fn beta(&self, frame: &Frame) -> BetaMatrix {
        let e = [frame.e1, frame.e2];
        let images = e.map(|ej| self.nabla * ej);
        let matrix = Matrix2::from_fn(|i, j| self.metric.inner(&images[j], &e[i]));
        let normal_leak = images
            .iter()
            .map(|im| self.metric.inner(im, &frame.x).abs())
            .fold(0.0, f64::max);
        BetaMatrix {
            matrix,
            frame: *frame,
            normal_leak,
        }
    }
}

/// `β` in an orthonormal frame of `X⊥`: `B_ij = ⟨β(e_j), e_i⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaMatrix {
    pub matrix: Mat2,
    pub frame: Frame,
    /// `max_j |⟨∇_{e_j} X, X⟩|`; vanishes for unit fields.
    pub normal_leak: f64,
}

impl BetaMatrix {
    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    pub fn discriminant(&self) -> f64 {
        let t = self.trace();
        t * t - 4.0 * self.determinant()
    }

    /// Largest and smallest singular value.
    pub fn singular_values(&self) -> (f64, f64) {
        let m = &self.matrix;
        let frob2 = m.norm_squared();
        let det = m.determinant();
        let root = (frob2 * frob2 - 4.0 * det * det).max(0.0).sqrt();
        (((frob2 + root) / 2.0).sqrt(), ((frob2 - root) / 2.0).max(0.0).sqrt())
    }

    pub fn rank(&self, tol: &Tolerances) -> u8 {
        let (s1, s2) = self.singular_values();
        if s1 <= tol.rank_absolute {
            0
        } else if s2 > tol.rank_relative * s1 {
            2
        } else {
            1
        }
    }
}

/// Eigenvalues of a 2×2 real matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EigenClass {
    /// `lambda ≥ mu`
    RealPair { lambda: f64, mu: f64 },
    /// `a ± b i`, `b > 0`
    ComplexPair { a: f64, b: f64 },
}

impl EigenClass {
    pub fn is_real(&self) -> bool {
        matches!(self, EigenClass::RealPair { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            EigenClass::RealPair { .. } => "real",
            EigenClass::ComplexPair { .. } => "complex",
        }
    }

    /// `(re1, im1, re2, im2)`
    pub fn parts(&self) -> [f64; 4] {
        match *self {
            EigenClass::RealPair { lambda, mu } => [lambda, 0.0, mu, 0.0],
            EigenClass::ComplexPair { a, b } => [a, b, a, -b],
        }
    }

    /// Largest absolute value among real eigenvalues.
    pub fn max_abs_real(&self) -> Option<f64> {
        match *self {
            EigenClass::RealPair { lambda, mu } => Some(lambda.abs().max(mu.abs())),
            EigenClass::ComplexPair { .. } => None,
        }
    }
}

pub fn eigen_classify(b: &BetaMatrix) -> EigenClass {
    classify_2x2(&b.matrix)
}

pub fn classify_2x2(m: &Mat2) -> EigenClass {
    let tr = m.trace();
    let disc = tr * tr - 4.0 * m.determinant();
    if disc < -DISCRIMINANT_EPS {
        EigenClass::ComplexPair {
            a: tr / 2.0,
            b: (-disc).sqrt() / 2.0,
        }
    } else {
        let root = if disc <= DISCRIMINANT_EPS { 0.0 } else { disc.sqrt() };
        EigenClass::RealPair {
            lambda: (tr + root) / 2.0,
            mu: (tr - root) / 2.0,
        }
    }
}

/// `dα(e1, e2) = B21 − B12` for `α = i_X g`.
pub fn contact_defect(b: &BetaMatrix) -> f64 {
    b.matrix[(1, 0)] - b.matrix[(0, 1)]
}

pub fn unit_defect(man: &ChartedManifold, x: &dyn TangentField, p: &Point3) -> Result<f64> {
    let g = man.metric_at(p)?;
    let v = x.value(p)?;
    Ok((g.inner(&v, &v) - 1.0).abs())
}

pub fn geodesic_defect(man: &ChartedManifold, x: &dyn TangentField, p: &Point3) -> Result<f64> {
    Ok(FieldJet::at(man, x, p)?.geodesic_defect())
}

pub fn killing_defect(man: &ChartedManifold, x: &dyn TangentField, p: &Point3) -> Result<f64> {
    let jet = FieldJet::at(man, x, p)?;
    Ok(jet.killing_defect(&jet.frame()?))
}

pub fn beta_matrix(man: &ChartedManifold, x: &dyn TangentField, p: &Point3, frame: &Frame) -> Result<BetaMatrix> {
    let jet = FieldJet::at(man, x, p)?;
    let defect = jet.unit_defect();
    if defect > Tolerances::default().unit {
        return Err(Error::NotUnit(defect));
    }
    Ok(jet.beta(frame))
}

/// Everything measured at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointDiagnosis {
    pub p: [f64; 3],
    pub unit_defect: f64,
    pub geodesic_defect: f64,
    pub killing_defect: f64,
    pub contact_defect: f64,
    pub eigen: EigenClass,
    pub ric_x: f64,
    #[serde(rename = "Delta")]
    pub delta_max: f64,
    #[serde(rename = "delta")]
    pub delta_min: f64,
    pub beta_rank: u8,
    /// Row-major `B`.
    pub beta: [[f64; 2]; 2],
    pub beta_normal_leak: f64,
}

impl PointDiagnosis {
    pub fn beta_matrix(&self) -> Mat2 {
        Mat2::new(self.beta[0][0], self.beta[0][1], self.beta[1][0], self.beta[1][1])
    }

    pub fn beta_norm(&self) -> f64 {
        self.beta_matrix().norm()
    }

    pub fn is_contact(&self, tol: &Tolerances) -> bool {
        self.contact_defect.abs() > tol.defect_floor
    }

    pub fn is_self_adjoint(&self, tol: &Tolerances) -> bool {
        self.contact_defect.abs() <= tol.self_adjoint
    }
}

pub fn diagnose_point(man: &ChartedManifold, x: &dyn TangentField, p: &Point3) -> Result<PointDiagnosis> {
    diagnose_point_with(man, x, p, &Tolerances::default())
}

pub fn diagnose_point_with(
    man: &ChartedManifold,
    x: &dyn TangentField,
    p: &Point3,
    tol: &Tolerances,
) -> Result<PointDiagnosis> {
    let curv = curvature::curvature_at(man, p)?;
    let jet = FieldJet::with_connection(curv.metric, &curv.christoffel, x, p)?;
    let unit = jet.unit_defect();
    if unit > tol.unit {
        return Err(Error::NotUnit(unit));
    }
    let frame = jet.frame()?;
    let beta = jet.beta(&frame);
    let jacobi = curv.jacobi_tensor(&frame);
    let m = &beta.matrix;
    Ok(PointDiagnosis {
        p: [p.x, p.y, p.z],
        unit_defect: unit,
        geodesic_defect: jet.geodesic_defect(),
        killing_defect: jet.killing_defect(&frame),
        contact_defect: contact_defect(&beta),
        eigen: eigen_classify(&beta),
        ric_x: jacobi.matrix.trace(),
        delta_max: jacobi.max,
        delta_min: jacobi.min,
        beta_rank: beta.rank(tol),
        beta: [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]],
        beta_normal_leak: beta.normal_leak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Metric3;

    fn euclid() -> ChartedManifold {
        ChartedManifold::from_expressions("e", ["1", "0", "0", "1", "0", "1"], None).unwrap()
    }

    fn h3() -> ChartedManifold {
        ChartedManifold::from_expressions("h3", ["1/x3^2", "0", "0", "1/x3^2", "0", "1/x3^2"], Some("x3")).unwrap()
    }

    fn field(c: [&str; 3]) -> UnitField {
        UnitField::from_expressions("f", c).unwrap()
    }

    #[test]
    fn unit_defects() {
        let p = Point3::new(0.1, 0.2, 0.7);
        assert_eq!(unit_defect(&euclid(), &field(["0", "0", "1"]), &p).unwrap(), 0.0);
        assert!(unit_defect(&h3(), &field(["0", "0", "x3"]), &p).unwrap() < 1e-15);
        assert_eq!(unit_defect(&euclid(), &field(["0", "0", "2"]), &p).unwrap(), 3.0);
    }

    #[test]
    fn geodesic_defects() {
        let p = Point3::new(0.0, 0.0, 1.4);
        assert!(geodesic_defect(&h3(), &field(["0", "0", "x3"]), &p).unwrap() < 1e-14);
        // X = (1, 0, x1)/sqrt(1+x1²); ∇_X X at x1 = 0 is (0, 0, 1)
        let bent = field(["1/sqrt(1+x1^2)", "0", "x1/sqrt(1+x1^2)"]);
        let d = geodesic_defect(&euclid(), &bent, &Point3::origin()).unwrap();
        assert!((d - 1.0).abs() < 1e-14);
    }

    #[test]
    fn hyperbolic_beta_is_minus_identity() {
        let m = h3();
        let x = field(["0", "0", "x3"]);
        let p = Point3::new(0.3, -0.1, 2.0);
        let jet = FieldJet::at(&m, &x, &p).unwrap();
        let frame = jet.frame().unwrap();
        let b = beta_matrix(&m, &x, &p, &frame).unwrap();
        assert!((b.matrix + Mat2::identity()).norm() < 1e-14);
        assert_eq!(contact_defect(&b), 0.0);
        assert!((killing_defect(&m, &x, &p).unwrap() - 2.0).abs() < 1e-14);
        assert!(b.normal_leak < 1e-14);
    }

    #[test]
    fn not_unit_is_rejected() {
        let m = euclid();
        let x = field(["0", "0", "2"]);
        let frame = frame_at(&Metric3::identity(), &Vec3::z()).unwrap();
        assert!(matches!(beta_matrix(&m, &x, &Point3::origin(), &frame), Err(Error::NotUnit(_))));
        assert!(matches!(diagnose_point(&m, &x, &Point3::origin()), Err(Error::NotUnit(_))));
    }

    #[test]
    fn eigen_classes() {
        let mk = |m: Mat2| BetaMatrix {
            matrix: m,
            frame: frame_at(&Metric3::identity(), &Vec3::z()).unwrap(),
            normal_leak: 0.0,
        };
        assert_eq!(eigen_classify(&mk(-Mat2::identity())), EigenClass::RealPair { lambda: -1.0, mu: -1.0 });
        assert_eq!(
            eigen_classify(&mk(Mat2::new(0.0, -1.0, 1.0, 0.0))),
            EigenClass::ComplexPair { a: 0.0, b: 1.0 }
        );
        assert_eq!(
            eigen_classify(&mk(Mat2::new(0.0, 0.0, 0.0, -1.0))),
            EigenClass::RealPair { lambda: 0.0, mu: -1.0 }
        );
        let rot = mk(Mat2::new(0.0, -1.0, 1.0, 0.0));
        assert_eq!(contact_defect(&rot), 2.0);
        assert_eq!(rot.rank(&Tolerances::default()), 2);
        assert_eq!(mk(Mat2::new(0.0, 0.0, 0.0, -1.0)).rank(&Tolerances::default()), 1);
        assert_eq!(mk(Mat2::zeros()).rank(&Tolerances::default()), 0);
    }

    #[test]
    fn diagnosis_of_flat_parallel_field() {
        let d = diagnose_point(&euclid(), &field(["0", "0", "1"]), &Point3::new(1.0, 2.0, 3.0)).unwrap();
        assert_eq!(d.unit_defect, 0.0);
        assert_eq!(d.geodesic_defect, 0.0);
        assert_eq!(d.killing_defect, 0.0);
        assert_eq!(d.contact_defect, 0.0);
        assert_eq!(d.beta_rank, 0);
        assert_eq!(d.eigen, EigenClass::RealPair { lambda: 0.0, mu: 0.0 });
        assert!(!d.is_contact(&Tolerances::default()));
    }

    #[test]
    fn closure_fields_use_central_differences() {
        let m = h3();
        let x = UnitField::from_fn("v", |p: &Point3| Vec3::new(0.0, 0.0, p.z));
        let d = diagnose_point(&m, &x, &Point3::new(0.0, 0.0, 1.0)).unwrap();
        assert!((d.beta_matrix() + Mat2::identity()).norm() < 1e-8);
    }
}
