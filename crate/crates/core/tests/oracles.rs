//! Worked examples of every module, checked against independent values.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use reebcheck::catalog::builtin;
use reebcheck::curvature::{christoffel, covariant_derivative, jacobi_tensor, ricci_direction, riemann, sectional};
use reebcheck::expr::{eval_dual, eval_scalar, parse, ExprAst};
use reebcheck::field::{
    classify_2x2, diagnose_point, geodesic_defect, killing_defect, unit_defect, EigenClass, FieldJet, UnitField,
};
use reebcheck::flow::{
    adapted_jacobi, first_zero_space_form, integrate_orbit, jacobi_component_closed_form, rigidity_zero,
    trace_comparison, trace_evolution_residual,
};
use reebcheck::geometry::{frame_at, inner, metric_partials, orthonormal_complement, ChartedManifold, Mat2, Metric3, Point3, Vec3};
use reebcheck::verify::{verify_parallel_jacobi, Verdict};
use reebcheck::field::TangentField;
use reebcheck::Error;

fn euclid() -> ChartedManifold {
    ChartedManifold::from_expressions("e", ["1", "0", "0", "1", "0", "1"], None).unwrap()
}

fn h3() -> ChartedManifold {
    builtin("h3_vertical").unwrap().manifold
}

fn h2xr() -> ChartedManifold {
    builtin("h2xr_vertical").unwrap().manifold
}

fn s3() -> ChartedManifold {
    builtin("s3_hopf").unwrap().manifold
}

fn field(c: [&str; 3]) -> UnitField {
    UnitField::from_expressions("f", c).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// expressions

#[test]
fn parse_examples() {
    assert_eq!(parse("x3").unwrap(), ExprAst::var(reebcheck::expr::Var::X3));
    assert_eq!(parse("1/x3^2").unwrap().to_string(), "(1.0/(x3^2.0))");
    assert_eq!(parse("sin(x1)*x2 + -x3").unwrap().to_string(), "((sin(x1)*x2)+(-x3))");
}

#[test]
fn eval_examples() {
    assert_eq!(eval_scalar(&parse("1/x3^2").unwrap(), [0.0, 0.0, 2.0]).unwrap(), 0.25);
    assert_eq!(eval_scalar(&parse("x1+x2+x3").unwrap(), [1.0, 2.0, 3.0]).unwrap(), 6.0);
    assert_eq!(eval_scalar(&parse("sqrt(x1^2+x2^2+x3^2)").unwrap(), [3.0, 4.0, 0.0]).unwrap(), 5.0);
    assert!(eval_scalar(&parse("x1^-1").unwrap(), [0.0; 3]).is_err());
}

#[test]
fn dual_examples() {
    let d = eval_dual(&parse("sin(x1)*x2").unwrap(), [0.0, 2.0, 0.0]).unwrap();
    assert_eq!((d.value, d.partials), (0.0, [2.0, 0.0, 0.0]));
    let d = eval_dual(&parse("x3").unwrap(), [0.4, -1.0, 7.0]).unwrap();
    assert_eq!(d.partials, [0.0, 0.0, 1.0]);
    let d = eval_dual(&parse("1/x3^2").unwrap(), [0.0, 0.0, 2.0]).unwrap();
    assert_eq!(d.partials[2], -0.25);
}

// geometry

#[test]
fn metric_partial_examples() {
    assert!(metric_partials(&euclid(), &Point3::new(1.0, 2.0, 3.0)).unwrap().iter().all(|m| m.norm() == 0.0));
    let d = metric_partials(&h3(), &Point3::new(0.0, 0.0, 2.0)).unwrap();
    assert!(close(d[2][(0, 0)], -0.25, 1e-14));
    let d = metric_partials(&h2xr(), &Point3::new(0.0, 1.0, 0.0)).unwrap();
    assert!(close(d[1][(0, 0)], -2.0, 1e-14));
}

#[test]
fn inner_examples() {
    assert_eq!(inner(&Metric3::identity(), &Vec3::x(), &Vec3::y()), 0.0);
    let g = h3().metric_at(&Point3::new(0.0, 0.0, 2.0)).unwrap();
    assert_eq!(inner(&g, &Vec3::z(), &Vec3::z()), 0.25);
    let s = s3().metric_at(&Point3::new(0.3, 0.1, -0.2)).unwrap();
    assert!(inner(&s, &Vec3::new(1.0, -2.0, 0.5), &Vec3::new(1.0, -2.0, 0.5)) > 0.0);
}

#[test]
fn complement_examples() {
    let id = Metric3::identity();
    assert_eq!(orthonormal_complement(&id, &Vec3::z(), [Vec3::x(), Vec3::y()]).unwrap(), (Vec3::x(), Vec3::y()));
    assert_eq!(orthonormal_complement(&id, &Vec3::x(), [Vec3::x(), Vec3::y()]).unwrap(), (Vec3::y(), Vec3::z()));
    let g = h3().metric_at(&Point3::new(0.0, 0.0, 2.0)).unwrap();
    let (e1, e2) = orthonormal_complement(&g, &Vec3::new(0.0, 0.0, 2.0), [Vec3::x(), Vec3::y()]).unwrap();
    assert!((e1 - Vec3::new(2.0, 0.0, 0.0)).norm() < 1e-14 && (e2 - Vec3::new(0.0, 2.0, 0.0)).norm() < 1e-14);
    assert!(matches!(
        orthonormal_complement(&id, &Vec3::x(), [Vec3::x(), Vec3::x() * 2.0]),
        Err(Error::DegenerateSeed)
    ));
}

#[test]
fn chart_boundary_is_outside() {
    let m = h3();
    assert!(!m.contains(&Point3::new(0.0, 0.0, 0.0)));
    assert!(matches!(m.metric_at(&Point3::new(0.0, 0.0, -1.0)), Err(Error::OutOfChart(_))));
}

// curvature

#[test]
fn christoffel_examples() {
    assert!(christoffel(&euclid(), &Point3::new(1.0, 1.0, 1.0)).unwrap().0.iter().flatten().flatten().all(|v| *v == 0.0));
    for x3 in [0.5, 1.0, 3.0] {
        let g = christoffel(&h3(), &Point3::new(0.2, -0.1, x3)).unwrap();
        assert!(close(g.get(0, 0, 2), -1.0 / x3, 1e-12));
        assert!(close(g.get(2, 0, 0), 1.0 / x3, 1e-12));
        assert!(close(g.get(2, 2, 2), -1.0 / x3, 1e-12));
    }
    for x2 in [0.5, 2.0] {
        let g = christoffel(&h2xr(), &Point3::new(0.0, x2, 0.0)).unwrap();
        assert!(close(g.get(0, 0, 1), -1.0 / x2, 1e-12));
        assert!(close(g.get(1, 0, 0), 1.0 / x2, 1e-12));
        assert!(close(g.get(1, 1, 1), -1.0 / x2, 1e-12));
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(g.get(2, a, b), 0.0);
                assert_eq!(g.get(a, 2, b), 0.0);
            }
        }
    }
}

#[test]
fn covariant_derivative_examples() {
    let c = field(["1", "2", "3"]);
    assert_eq!(covariant_derivative(&euclid(), &Point3::origin(), &c, &Vec3::x()).unwrap(), Vec3::zeros());
    let x = field(["0", "0", "x3"]);
    let p = Point3::new(0.0, 0.0, 1.0);
    assert!(covariant_derivative(&h3(), &p, &x, &Vec3::z()).unwrap().norm() < 1e-14);
    assert!((covariant_derivative(&h3(), &p, &x, &Vec3::x()).unwrap() + Vec3::x()).norm() < 1e-14);
}

#[test]
fn riemann_examples() {
    let (u, v) = (Vec3::new(0.3, -1.0, 0.2), Vec3::new(1.1, 0.4, -0.7));
    assert!(riemann(&euclid(), &Point3::origin(), &u, &v, &v).unwrap().norm() == 0.0);
    for (m, p, k) in [(s3(), Point3::new(0.4, -0.3, 0.5), 1.0), (h3(), Point3::new(0.1, 0.2, 0.8), -1.0)] {
        let g = m.metric_at(&p).unwrap();
        let lhs = g.inner(&riemann(&m, &p, &u, &v, &v).unwrap(), &u);
        let area = g.inner(&u, &u) * g.inner(&v, &v) - g.inner(&u, &v).powi(2);
        assert!(close(lhs, k * area, 1e-6 * area.abs().max(1.0)), "{lhs} {area}");
    }
}

#[test]
fn sectional_and_ricci_examples() {
    let p = Point3::new(0.0, 0.0, 1.0);
    assert_eq!(sectional(&euclid(), &p, &Vec3::x(), &Vec3::z()).unwrap(), 0.0);
    assert!(close(sectional(&h3(), &p, &Vec3::y(), &Vec3::new(0.0, 0.0, 1.0)).unwrap(), -1.0, 1e-6));
    let q = Point3::new(0.0, 1.0, 0.0);
    assert!(close(sectional(&h2xr(), &q, &Vec3::z(), &Vec3::y()).unwrap(), 0.0, 1e-9));
    assert!(matches!(sectional(&euclid(), &p, &Vec3::x(), &(Vec3::x() * 2.0)), Err(Error::DegeneratePlane(_))));

    assert_eq!(ricci_direction(&euclid(), &p, &Vec3::z()).unwrap(), 0.0);
    let u = Point3::new(0.2, 0.5, -0.4);
    let g = s3().metric_at(&u).unwrap();
    let x = Vec3::new(1.0, 2.0, -1.0);
    assert!(close(ricci_direction(&s3(), &u, &(x / g.norm(&x))).unwrap(), 2.0, 1e-6));
    assert!(close(ricci_direction(&h2xr(), &q, &Vec3::y()).unwrap(), -1.0, 1e-6));
}

#[test]
fn jacobi_tensor_examples() {
    let p = Point3::new(0.0, 0.0, 1.0);
    let f = frame_at(&Metric3::identity(), &Vec3::z()).unwrap();
    let j = jacobi_tensor(&euclid(), &p, &f).unwrap();
    assert_eq!((j.matrix, j.max, j.min), (Mat2::zeros(), 0.0, 0.0));

    let g = h3().metric_at(&p).unwrap();
    let j = jacobi_tensor(&h3(), &p, &frame_at(&g, &Vec3::z()).unwrap()).unwrap();
    assert!((j.matrix + Mat2::identity()).norm() < 1e-6 && close(j.max, -1.0, 1e-6) && close(j.min, -1.0, 1e-6));

    let q = Point3::new(0.0, 1.0, 0.0);
    let g = h2xr().metric_at(&q).unwrap();
    let j = jacobi_tensor(&h2xr(), &q, &frame_at(&g, &Vec3::y()).unwrap()).unwrap();
    // frame (∂x1, ∂x3) up to sign
    assert!((j.matrix - Mat2::new(-1.0, 0.0, 0.0, 0.0)).norm() < 1e-6);
    assert!(close(j.max, 0.0, 1e-6) && close(j.min, -1.0, 1e-6));
}

#[test]
fn parallel_jacobi_defect_examples() {
    for name in ["h3_vertical", "heisenberg_reeb", "h2xr_vertical"] {
        let e = builtin(name).unwrap();
        let d = reebcheck::verify::orbit_parallel_jacobi_defect(&e, &e.orbit_start, 0.5, 1e-3).unwrap();
        assert!(d < 1e-6, "{name}: {d}");
    }
}

// field analysis

#[test]
fn unit_and_geodesic_examples() {
    let p = Point3::new(0.3, 0.1, 1.5);
    assert_eq!(unit_defect(&euclid(), &field(["0", "0", "1"]), &p).unwrap(), 0.0);
    assert!(unit_defect(&h3(), &field(["0", "0", "x3"]), &p).unwrap() < 1e-15);
    assert_eq!(unit_defect(&euclid(), &field(["0", "0", "2"]), &p).unwrap(), 3.0);
    assert!(geodesic_defect(&h3(), &field(["0", "0", "x3"]), &p).unwrap() < 1e-14);
    let skew = builtin("euclidean_skew").unwrap();
    for q in skew.grid.points() {
        assert!(geodesic_defect(&skew.manifold, &skew.field, &q).unwrap() < 1e-6);
    }
    let bent = field(["1/sqrt(1+x1^2)", "0", "x1/sqrt(1+x1^2)"]);
    assert!(geodesic_defect(&euclid(), &bent, &Point3::origin()).unwrap() > 0.5);
}

#[test]
fn killing_examples() {
    let hopf = builtin("s3_hopf").unwrap();
    let heis = builtin("heisenberg_reeb").unwrap();
    let h3e = builtin("h3_vertical").unwrap();
    let p = Point3::new(0.4, -0.2, 0.7);
    assert!(killing_defect(&hopf.manifold, &hopf.field, &p).unwrap() < 1e-8);
    assert!(killing_defect(&heis.manifold, &heis.field, &p).unwrap() < 1e-8);
    assert!(close(killing_defect(&h3e.manifold, &h3e.field, &Point3::new(0.0, 0.0, 1.0)).unwrap(), 2.0, 1e-9));
}

#[test]
fn beta_and_contact_examples() {
    let h3e = builtin("h3_vertical").unwrap();
    let d = diagnose_point(&h3e.manifold, &h3e.field, &Point3::new(0.0, 0.0, 1.0)).unwrap();
    assert!((d.beta_matrix() + Mat2::identity()).norm() < 1e-12);
    assert_eq!(d.contact_defect, 0.0);
    assert_eq!(d.eigen, EigenClass::RealPair { lambda: -1.0, mu: -1.0 });
    assert!(d.geodesic_defect < 1e-14 && close(d.ric_x, -2.0, 1e-6));
    assert!(close(d.delta_max, -1.0, 1e-6) && close(d.delta_min, -1.0, 1e-6) && d.beta_rank == 2);

    let h2 = builtin("h2xr_vertical").unwrap();
    let d = diagnose_point(&h2.manifold, &h2.field, &Point3::new(0.0, 1.0, 0.0)).unwrap();
    assert_eq!((d.contact_defect, d.beta_rank), (0.0, 1));
    assert!(close(d.delta_max, 0.0, 1e-6) && close(d.delta_min, -1.0, 1e-6));
    match d.eigen {
        EigenClass::RealPair { lambda, mu } => assert!(lambda.abs() < 1e-12 && mu < -0.1),
        e => panic!("{e:?}"),
    }

    let e = builtin("euclidean_parallel").unwrap();
    let d = diagnose_point(&e.manifold, &e.field, &Point3::new(1.0, -1.0, 0.5)).unwrap();
    assert_eq!(d.beta_matrix(), Mat2::zeros());
    assert!(!d.is_contact(&Default::default()));

    let hopf = builtin("s3_hopf").unwrap();
    let d = diagnose_point(&hopf.manifold, &hopf.field, &Point3::new(0.2, 0.3, -0.4)).unwrap();
    assert!(close(d.contact_defect.abs(), 2.0, 1e-9));
}

#[test]
fn eigen_examples() {
    assert_eq!(classify_2x2(&-Mat2::identity()), EigenClass::RealPair { lambda: -1.0, mu: -1.0 });
    assert_eq!(classify_2x2(&Mat2::new(0.0, -1.0, 1.0, 0.0)), EigenClass::ComplexPair { a: 0.0, b: 1.0 });
    assert_eq!(classify_2x2(&Mat2::new(0.0, 0.0, 0.0, -1.0)), EigenClass::RealPair { lambda: 0.0, mu: -1.0 });
}

#[test]
fn frame_free_beta_on_h3() {
    let h3e = builtin("h3_vertical").unwrap();
    let p = Point3::new(0.0, 0.0, 1.0);
    let jet = FieldJet::at(&h3e.manifold, &h3e.field, &p).unwrap();
    assert!((jet.nabla * Vec3::x() + Vec3::x()).norm() < 1e-14);
}

// flow

#[test]
fn orbit_examples() {
    let e = builtin("euclidean_parallel").unwrap();
    let t = integrate_orbit(&e.manifold, &e.field, &Point3::origin(), 1.0, 1e-3).unwrap();
    assert!((t.end().p - Point3::new(0.0, 0.0, 1.0)).norm() < 1e-12);

    let h = builtin("h3_vertical").unwrap();
    for big_t in [0.5, 2.0] {
        let t = integrate_orbit(&h.manifold, &h.field, &Point3::new(0.0, 0.0, 1.0), big_t, 1e-3).unwrap();
        assert!((t.end().p.z / big_t.exp() - 1.0).abs() < 1e-8);
    }

    let hopf = builtin("s3_hopf").unwrap();
    let t = integrate_orbit(&hopf.manifold, &hopf.field, &hopf.orbit_start, TAU, 1e-3).unwrap();
    assert!((t.end().p - hopf.orbit_start).norm() < 1e-6);
}

#[test]
fn chart_origin_hopf_orbit_meets_the_pole() {
    // the great circle through u = 0 passes through the projection pole
    let hopf = builtin("s3_hopf").unwrap();
    let t = integrate_orbit(&hopf.manifold, &hopf.field, &Point3::origin(), PI, 1e-3);
    let escaped = match t {
        Ok(t) => t.samples.iter().any(|s| s.p.coords.norm() > 1e3),
        Err(_) => true,
    };
    assert!(escaped);
}

#[test]
fn adapted_jacobi_examples() {
    let h = builtin("h3_vertical").unwrap();
    let t = integrate_orbit(&h.manifold, &h.field, &Point3::new(0.0, 0.0, 1.0), 2.0, 1e-3).unwrap();
    let j = adapted_jacobi(&t, &t.start().frame.e1).unwrap();
    for (s, c) in t.samples.iter().zip(&j.components) {
        assert!((c.x / (-s.t).exp() - 1.0).abs() < 1e-6 && c.y.abs() < 1e-9);
    }

    let e = builtin("euclidean_parallel").unwrap();
    let t = integrate_orbit(&e.manifold, &e.field, &Point3::origin(), 2.0, 1e-2).unwrap();
    let j = adapted_jacobi(&t, &Vec3::new(0.3, -0.4, 0.0)).unwrap();
    assert!(j.components.iter().all(|c| (c - j.components[0]).norm() < 1e-15));

    let hopf = builtin("s3_hopf").unwrap();
    let t = integrate_orbit(&hopf.manifold, &hopf.field, &hopf.orbit_start, 2.0, 1e-3).unwrap();
    let j = adapted_jacobi(&t, &t.start().frame.e1).unwrap();
    assert!(j.components.iter().all(|c| (c.norm() - 1.0).abs() < 1e-5));
}

#[test]
fn residual_examples() {
    let run = |name: &str| {
        let e = builtin(name).unwrap();
        integrate_orbit(&e.manifold, &e.field, &e.orbit_start, 2.0, 1e-3).unwrap()
    };
    let h = run("h3_vertical");
    assert!(h.residuals.riccati < 1e-6 && h.residuals.trace < 1e-6);
    assert!(run("s3_hopf").residuals.riccati < 1e-4);
    let e = run("euclidean_parallel");
    assert_eq!((e.residuals.riccati, e.residuals.trace), (0.0, 0.0));
    assert!(trace_evolution_residual(&run("heisenberg_reeb")) < 1e-5);
}

#[test]
fn wronskian_examples() {
    let run = |name: &str| {
        let e = builtin(name).unwrap();
        integrate_orbit(&e.manifold, &e.field, &e.orbit_start, 2.0, 1e-3).unwrap()
    };
    for s in &run("h3_vertical").samples {
        assert!((s.wronskian() / (-2.0 * s.t).exp() - 1.0).abs() < 1e-4);
    }
    assert!(run("euclidean_parallel").samples.iter().all(|s| s.wronskian() == 1.0));
    assert!(run("s3_hopf").samples.iter().all(|s| (s.wronskian() - 1.0).abs() < 1e-4));
}

#[test]
fn closed_form_examples() {
    assert!(jacobi_component_closed_form(1.0, 1.0, 0.0, FRAC_PI_2).abs() < 1e-15);
    assert_eq!(jacobi_component_closed_form(0.0, 1.0, -2.0, 0.5), 0.0);
    let t0 = 0.5 * 3f64.ln();
    assert!(close(t0, 0.549306, 1e-6));
    assert!(jacobi_component_closed_form(-1.0, 1.0, -2.0, t0).abs() < 1e-15);

    assert!(close(first_zero_space_form(1.0, 0.0).unwrap(), FRAC_PI_2, 1e-15));
    assert_eq!(first_zero_space_form(0.0, -2.0), Some(0.5));
    assert_eq!(first_zero_space_form(-1.0, -0.5), None);

    assert_eq!(trace_comparison(-1.0, 0.0).unwrap(), -1.0);
    assert_eq!(trace_comparison(-1.0, 1.0).unwrap(), -2.0);
    assert!(trace_comparison(-1.0, 2.0 - 1e-6).unwrap() < -1e6);
}

#[test]
fn no_rigidity_zero_on_complete_entries() {
    for name in ["s3_hopf", "euclidean_parallel", "euclidean_skew", "heisenberg_reeb", "h3_vertical"] {
        let e = builtin(name).unwrap();
        let t = integrate_orbit(&e.manifold, &e.field, &e.orbit_start, 2.0, 1e-3).unwrap();
        assert_eq!(rigidity_zero(&t), None, "{name}");
    }
}

#[test]
fn parallel_jacobi_verdicts() {
    let tol = Default::default();
    for (name, verdict) in [
        ("heisenberg_reeb", Verdict::Consistent),
        ("h2xr_vertical", Verdict::HypothesesNotMet),
        ("h3_vertical", Verdict::HypothesesNotMet),
    ] {
        let e = builtin(name).unwrap();
        assert_eq!(verify_parallel_jacobi(&e, &e.grid, &tol).unwrap().verdict, verdict, "{name}");
    }
}

#[test]
fn skew_fibration_flow_lines_are_straight() {
    let e = builtin("euclidean_skew").unwrap();
    for p0 in [Point3::origin(), Point3::new(1.0, -0.5, 0.7), Point3::new(-1.5, 1.2, -1.0)] {
        let t = integrate_orbit(&e.manifold, &e.field, &p0, 2.0, 1e-3).unwrap();
        let dir = e.field.value(&p0).unwrap();
        let worst = t.samples.iter().map(|s| (s.p - (p0 + dir * s.t)).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "{p0:?}: {worst}");
    }
}
