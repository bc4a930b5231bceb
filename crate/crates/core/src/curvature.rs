//! Levi-Civita connection and curvature in a single chart.
//!
//! Sign convention: `R(x,y)z = ∇_x∇_y z − ∇_y∇_x z − ∇_[x,y] z`, so that the
//! round sphere has sectional curvature +1.

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::field::TangentField;
use crate::flow::OrbitSample;
use crate::geometry::{ChartedManifold, Frame, Mat2, Metric3, Point3, Vec3};

/// Repeated-eigenvalue threshold on the 2×2 discriminant.
pub const DISCRIMINANT_EPS: f64 = 1e-12;
const GRAM_EPS: f64 = 1e-12;

/// `Γ^k_ij`, stored `[k][i][j]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Christoffel(pub [[[f64; 3]; 3]; 3]);

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.0[k][i][j]
    }

    /// `Γ(v, w)^k = Γ^k_ij v^i w^j`.
    pub fn contract(&self, v: &Vec3, w: &Vec3) -> Vec3 {
        let mut out = Vec3::zeros();
        for k in 0..3 {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += self.0[k][i][j] * v[i] * w[j];
                }
            }
            out[k] = s;
        }
        out
    }

    /// Matrix `A` with `A w = Γ(v, w)`.
    pub fn along(&self, v: &Vec3) -> crate::geometry::Mat3 {
        let mut a = crate::geometry::Mat3::zeros();
        for k in 0..3 {
            for j in 0..3 {
                a[(k, j)] = (0..3).map(|i| self.0[k][i][j] * v[i]).sum();
            }
        }
        a
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    worst = worst.max((self.0[k][i][j] - self.0[k][j][i]).abs());
                }
            }
        }
        worst
    }

    fn sub_scaled(a: &Self, b: &Self, scale: f64) -> [[[f64; 3]; 3]; 3] {
        let mut out = [[[0.0; 3]; 3]; 3];
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    out[k][i][j] = (a.0[k][i][j] - b.0[k][i][j]) * scale;
                }
            }
        }
        out
    }
}

/// Metric and Christoffel symbols at `p`.
pub fn metric_and_christoffel(man: &ChartedManifold, p: &Point3) -> Result<(Metric3, Christoffel)> {
    let (g, d) = man.metric_with_partials(p)?;
    let ginv = g.inverse_at(p)?;
    let mut first = [[[0.0; 3]; 3]; 3]; // [l][i][j] = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    for l in 0..3 {
        for i in 0..3 {
            for j in i..3 {
                let v = 0.5 * (d[i][(j, l)] + d[j][(i, l)] - d[l][(i, j)]);
                first[l][i][j] = v;
                first[l][j][i] = v;
            }
        }
    }
    let mut gamma = [[[0.0; 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in i..3 {
                let v: f64 = (0..3).map(|l| ginv[(k, l)] * first[l][i][j]).sum();
                gamma[k][i][j] = v;
                gamma[k][j][i] = v;
            }
        }
    }
    Ok((g, Christoffel(gamma)))
}

pub fn christoffel(man: &ChartedManifold, p: &Point3) -> Result<Christoffel> {
    Ok(metric_and_christoffel(man, p)?.1)
}

/// `R^l_ijk` with `R(∂_i, ∂_j)∂_k = R^l_ijk ∂_l`, stored `[l][i][j][k]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannTensor(pub [[[[f64; 3]; 3]; 3]; 3]);

impl RiemannTensor {
    pub fn apply(&self, x: &Vec3, y: &Vec3, z: &Vec3) -> Vec3 {
        let mut out = Vec3::zeros();
        for l in 0..3 {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    let xy = x[i] * y[j];
                    if xy == 0.0 {
                        continue;
                    }
                    for k in 0..3 {
                        s += self.0[l][i][j][k] * xy * z[k];
                    }
                }
            }
            out[l] = s;
        }
        out
    }
}

/// Everything curvature-related at one point.
#[derive(Debug, Clone, Copy)]
pub struct LocalCurvature {
    pub point: Point3,
    pub metric: Metric3,
    pub christoffel: Christoffel,
    pub riemann: RiemannTensor,
}

/// Christoffel symbols at `p` and the Riemann tensor from central differences
/// of the Christoffel symbols with the manifold's step.
pub fn curvature_at(man: &ChartedManifold, p: &Point3) -> Result<LocalCurvature> {
    let (metric, gamma) = metric_and_christoffel(man, p)?;
    let h = man.diff().step;
    let mut dgamma = [[[[0.0; 3]; 3]; 3]; 3]; // [m][k][i][j] = ∂_m Γ^k_ij
    for (m, slot) in dgamma.iter_mut().enumerate() {
        let mut fwd = *p;
        let mut bwd = *p;
        fwd[m] += h;
        bwd[m] -= h;
        let gp = christoffel(man, &fwd)?;
        let gm = christoffel(man, &bwd)?;
        *slot = Christoffel::sub_scaled(&gp, &gm, 0.5 / h);
    }
    let g = &gamma.0;
    let mut r = [[[[0.0; 3]; 3]; 3]; 3];
    for l in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let mut v = dgamma[i][l][j][k] - dgamma[j][l][i][k];
                    for m in 0..3 {
                        v += g[l][i][m] * g[m][j][k] - g[l][j][m] * g[m][i][k];
                    }
                    r[l][i][j][k] = v;
                }
            }
        }
    }
    Ok(LocalCurvature {
        point: *p,
        metric,
        christoffel: gamma,
        riemann: RiemannTensor(r),
    })
}

/// Closed-form eigenvalues `(max, min)` of the symmetric part of a 2×2 matrix.
pub fn symmetric_eigenvalues(m: &Mat2) -> (f64, f64) {
    let s = (m + m.transpose()) * 0.5;
    let tr = s.trace();
    let disc = tr * tr - 4.0 * s.determinant();
    let root = if disc.abs() <= DISCRIMINANT_EPS { 0.0 } else { disc.max(0.0).sqrt() };
    ((tr + root) / 2.0, (tr - root) / 2.0)
}

/// `R_X = R(·, X)X` on `X⊥` in a frame, with its eigenvalues `Δ ≥ δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTensor {
    /// `M_ij = ⟨R(e_j, X)X, e_i⟩`
    pub matrix: Mat2,
    pub max: f64,
    pub min: f64,
}

impl JacobiTensor {
    pub fn asymmetry(&self) -> f64 {
        (self.matrix[(0, 1)] - self.matrix[(1, 0)]).abs()
    }
}

impl LocalCurvature {
    pub fn riemann(&self, x: &Vec3, y: &Vec3, z: &Vec3) -> Vec3 {
        self.riemann.apply(x, y, z)
    }

    /// `⟨R(x,y)z, w⟩`
    pub fn riemann_form(&self, x: &Vec3, y: &Vec3, z: &Vec3, w: &Vec3) -> f64 {
        self.metric.inner(&self.riemann(x, y, z), w)
    }

    pub fn sectional(&self, v: &Vec3, w: &Vec3) -> Result<f64> {
        let g = &self.metric;
        let gram = g.inner(v, v) * g.inner(w, w) - g.inner(v, w).powi(2);
        let scale = g.inner(v, v) * g.inner(w, w);
        if !(gram > GRAM_EPS * scale.max(1.0)) {
            return Err(Error::DegeneratePlane(gram));
        }
        Ok(self.riemann_form(v, w, w, v) / gram)
    }

    pub fn jacobi_tensor(&self, frame: &Frame) -> JacobiTensor {
        let e = [frame.e1, frame.e2];
        let x = frame.x;
        let re = e.map(|ej| self.riemann(&ej, &x, &x));
        let matrix = Matrix2::from_fn(|i, j| self.metric.inner(&re[j], &e[i]));
        let (max, min) = symmetric_eigenvalues(&matrix);
        JacobiTensor { matrix, max, min }
    }

    /// `Ric(X) = K(e1, X) + K(e2, X)` for unit `X` and an orthonormal frame.
    pub fn ricci(&self, frame: &Frame) -> f64 {
        self.jacobi_tensor(frame).matrix.trace()
    }
}

pub fn riemann(man: &ChartedManifold, p: &Point3, x: &Vec3, y: &Vec3, z: &Vec3) -> Result<Vec3> {
    Ok(curvature_at(man, p)?.riemann(x, y, z))
}

pub fn sectional(man: &ChartedManifold, p: &Point3, v: &Vec3, w: &Vec3) -> Result<f64> {
    curvature_at(man, p)?.sectional(v, w)
}

pub fn ricci_direction(man: &ChartedManifold, p: &Point3, x: &Vec3) -> Result<f64> {
    let c = curvature_at(man, p)?;
    let frame = crate::geometry::frame_at(&c.metric, x)?;
    Ok(c.sectional(&frame.e1, &frame.x)? + c.sectional(&frame.e2, &frame.x)?)
}

pub fn jacobi_tensor(man: &ChartedManifold, p: &Point3, frame: &Frame) -> Result<JacobiTensor> {
    Ok(curvature_at(man, p)?.jacobi_tensor(frame))
}

/// `(∇_v W)_p = v(W) + Γ(v, W)`.
pub fn covariant_derivative(
    man: &ChartedManifold,
    p: &Point3,
    w: &dyn TangentField,
    v: &Vec3,
) -> Result<Vec3> {
    let gamma = christoffel(man, p)?;
    let value = w.value(p)?;
    let jac = w.jacobian(p)?;
    Ok(jac * v + gamma.contract(v, &value))
}

/// `‖M(b) − M(a)‖_F / (t_b − t_a)` for the Jacobi-tensor matrices stored in
/// two orbit samples with parallel frames; approximates `‖∇_X R_X‖`.
pub fn parallel_jacobi_defect(a: &OrbitSample, b: &OrbitSample) -> f64 {
    (b.jacobi.matrix - a.jacobi.matrix).norm() / (b.t - a.t).abs()
}
