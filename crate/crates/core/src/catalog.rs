//! Built-in (manifold, field) pairs with their expected diagnostics.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{diagnose_point_with, EigenClass, PointDiagnosis, Tolerances, UnitField};
use crate::geometry::{ChartedManifold, Grid, Parametrization, Point3};

pub const NAMES: [&str; 7] = [
    "euclidean_parallel",
    "euclidean_skew",
    "s3_hopf",
    "s3_weighted",
    "h2xr_vertical",
    "h3_vertical",
    "heisenberg_reeb",
];

pub const DEFAULT_WEIGHTS: (f64, f64) = (2.0, 3.0);

/// A scalar read off a [`PointDiagnosis`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    ContactDefectAbs,
    KillingDefect,
    RicX,
    DeltaMax,
    DeltaMin,
    BetaRank,
    /// `(tr β)² − 4 det β`
    Discriminant,
    BetaEntry(usize, usize),
    /// Smallest and largest `|λ|` over real eigenvalues; `NaN` for a complex pair.
    MinAbsEigen,
    MaxAbsEigen,
}

impl Quantity {
    pub fn measure(&self, d: &PointDiagnosis) -> f64 {
        let real = |pick: fn(f64, f64) -> f64| match d.eigen {
            EigenClass::RealPair { lambda, mu } => pick(lambda.abs(), mu.abs()),
            EigenClass::ComplexPair { .. } => f64::NAN,
        };
        match *self {
            Quantity::ContactDefectAbs => d.contact_defect.abs(),
            Quantity::KillingDefect => d.killing_defect,
            Quantity::RicX => d.ric_x,
            Quantity::DeltaMax => d.delta_max,
            Quantity::DeltaMin => d.delta_min,
            Quantity::BetaRank => d.beta_rank as f64,
            Quantity::Discriminant => {
                let b = d.beta_matrix();
                b.trace().powi(2) - 4.0 * b.determinant()
            }
            Quantity::BetaEntry(i, j) => d.beta[i][j],
            Quantity::MinAbsEigen => real(f64::min),
            Quantity::MaxAbsEigen => real(f64::max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expect {
    Near { value: f64, tol: f64 },
    Above { min: f64 },
    Below { max: f64 },
}

impl Expect {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Expect::Near { value, tol } => (v - value).abs() <= tol,
            Expect::Above { min } => v > min,
            Expect::Below { max } => v < max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Expectation {
    pub quantity: Quantity,
    pub expect: Expect,
}

fn near(quantity: Quantity, value: f64, tol: f64) -> Expectation {
    Expectation {
        quantity,
        expect: Expect::Near { value, tol },
    }
}

fn above(quantity: Quantity, min: f64) -> Expectation {
    Expectation {
        quantity,
        expect: Expect::Above { min },
    }
}

fn below(quantity: Quantity, max: f64) -> Expectation {
    Expectation {
        quantity,
        expect: Expect::Below { max },
    }
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub manifold: ChartedManifold,
    pub field: UnitField,
    pub grid: Grid,
    pub orbit_start: Point3,
    /// Constant sectional curvature, when the metric is a space form.
    pub space_form_curvature: Option<f64>,
    pub expected: Vec<Expectation>,
}

impl CatalogEntry {
    /// A user-supplied pair with no expectations.
    pub fn custom(name: &str, manifold: ChartedManifold, field: UnitField, grid: Grid, orbit_start: Point3) -> Self {
        CatalogEntry {
            name: name.to_string(),
            description: "custom metric and field".to_string(),
            manifold,
            field,
            grid,
            orbit_start,
            space_form_curvature: None,
            expected: Vec::new(),
        }
    }
}

/// Look up an entry. `s3_weighted` takes optional weights: `s3_weighted(k1,k2)`.
pub fn builtin(name: &str) -> Result<CatalogEntry> {
    let name = name.trim();
    match name {
        "euclidean_parallel" => Ok(euclidean_parallel()),
        "euclidean_skew" => Ok(euclidean_skew()),
        "s3_hopf" => Ok(s3_hopf()),
        "s3_weighted" => s3_weighted(DEFAULT_WEIGHTS.0, DEFAULT_WEIGHTS.1),
        "h2xr_vertical" => Ok(h2xr_vertical()),
        "h3_vertical" => Ok(h3_vertical()),
        "heisenberg_reeb" => Ok(heisenberg_reeb()),
        _ => match parse_weights(name) {
            Some((k1, k2)) => s3_weighted(k1, k2),
            None => Err(Error::UnknownEntry(name.to_string())),
        },
    }
}

fn parse_weights(name: &str) -> Option<(f64, f64)> {
    let args = name.strip_prefix("s3_weighted(")?.strip_suffix(')')?;
    let (a, b) = args.split_once(',')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

pub fn all() -> Vec<CatalogEntry> {
    NAMES.iter().map(|n| builtin(n).expect("builtin entry")).collect()
}

const FLAT: [&str; 6] = ["1", "0", "0", "1", "0", "1"];

fn expr_manifold(name: &str, upper: [&str; 6], domain: Option<&str>) -> ChartedManifold {
    ChartedManifold::from_expressions(name, upper, domain).expect("builtin metric parses")
}

fn expr_field(name: &str, c: [&str; 3]) -> UnitField {
    UnitField::from_expressions(name, c).expect("builtin field parses")
}

fn euclidean_parallel() -> CatalogEntry {
    CatalogEntry {
        name: "euclidean_parallel".into(),
        description: "flat R^3 with the parallel field d/dx3; beta vanishes".into(),
        manifold: expr_manifold("euclidean_parallel", FLAT, None),
        field: expr_field("d/dx3", ["0", "0", "1"]),
        grid: Grid::cube(-2.0, 2.0, 5),
        orbit_start: Point3::origin(),
        space_form_curvature: Some(0.0),
        expected: vec![
            near(Quantity::BetaEntry(0, 0), 0.0, 1e-12),
            near(Quantity::BetaEntry(0, 1), 0.0, 1e-12),
            near(Quantity::BetaEntry(1, 0), 0.0, 1e-12),
            near(Quantity::BetaEntry(1, 1), 0.0, 1e-12),
            near(Quantity::ContactDefectAbs, 0.0, 1e-12),
            near(Quantity::BetaRank, 0.0, 0.0),
        ],
    }
}

fn euclidean_skew() -> CatalogEntry {
    // Lines through (x, y, 0) with direction (-b, a, 1) where (a, b) is
    // constant along each line.
    let a = "((x1+x3*x2)/(1+x3^2))";
    let b = "((x2-x3*x1)/(1+x3^2))";
    let n = format!("sqrt(1+{a}^2+{b}^2)");
    let c = [format!("-{b}/{n}"), format!("{a}/{n}"), format!("1/{n}")];
    CatalogEntry {
        name: "euclidean_skew".into(),
        description: "flat R^3 with the unit field of a skew line fibration; contact everywhere".into(),
        manifold: expr_manifold("euclidean_skew", FLAT, None),
        field: expr_field("skew lines", [&c[0], &c[1], &c[2]]),
        grid: Grid::cube(-2.0, 2.0, 5),
        orbit_start: Point3::origin(),
        space_form_curvature: Some(0.0),
        expected: vec![above(Quantity::ContactDefectAbs, 1e-3)],
    }
}

const S3_METRIC: &str = "4/(1+x1^2+x2^2+x3^2)^2";
const S3_HOPF_FIELD: [&str; 3] = ["-x2+x1*x3", "x1+x2*x3", "(1-x1^2-x2^2+x3^2)/2"];

/// Stereographic chart of the unit sphere from the pole `(0, 0, 0, 1)`.
pub fn stereographic(y: [f64; 4]) -> Point3 {
    let d = 1.0 - y[3];
    Point3::new(y[0] / d, y[1] / d, y[2] / d)
}

pub fn inverse_stereographic(u: &Point3) -> [f64; 4] {
    let r2 = u.coords.norm_squared();
    let s = 1.0 + r2;
    [2.0 * u.x / s, 2.0 * u.y / s, 2.0 * u.z / s, (r2 - 1.0) / s]
}

/// Hopf coordinates `(η, ξ1, ξ2) ∈ [0, π/2] × [0, 2π]²`.
pub fn hopf_point(q: [f64; 3]) -> [f64; 4] {
    let (se, ce) = q[0].sin_cos();
    [se * q[1].cos(), se * q[1].sin(), ce * q[2].cos(), ce * q[2].sin()]
}

fn hopf_parametrization(k1: f64, k2: f64, weighted: bool) -> Parametrization {
    let map = |q: [f64; 3]| stereographic(hopf_point(q));
    let density = move |q: [f64; 3]| {
        let (se, ce) = q[0].sin_cos();
        let round = se * ce;
        if weighted {
            let v2 = k1 * k1 * se * se + k2 * k2 * ce * ce;
            round / v2.powf(1.5)
        } else {
            round
        }
    };
    Parametrization {
        name: "hopf".into(),
        bounds: [(0.0, FRAC_PI_2), (0.0, TAU), (0.0, TAU)],
        map: Arc::new(map),
        density: Arc::new(density),
    }
}

fn s3_hopf() -> CatalogEntry {
    CatalogEntry {
        name: "s3_hopf".into(),
        description: "round S^3 in a stereographic chart with the Hopf field; no real eigenvalues".into(),
        manifold: expr_manifold("s3_hopf", [S3_METRIC, "0", "0", S3_METRIC, "0", S3_METRIC], None)
            .with_parametrization(hopf_parametrization(1.0, 1.0, false)),
        field: expr_field("hopf", S3_HOPF_FIELD),
        grid: Grid::cube(-1.0, 1.0, 5),
        orbit_start: Point3::new(0.5, 0.0, 0.0),
        space_form_curvature: Some(1.0),
        expected: vec![
            below(Quantity::Discriminant, -0.5),
            near(Quantity::ContactDefectAbs, 2.0, 1e-5),
            below(Quantity::KillingDefect, 1e-6),
            near(Quantity::RicX, 2.0, 1e-5),
            near(Quantity::DeltaMax, 1.0, 1e-5),
            near(Quantity::DeltaMin, 1.0, 1e-5),
        ],
    }
}

/// Weighted Hopf field `k1 (-y1, x1, 0, 0) + k2 (0, 0, -y2, x2)`. Equal weights keep the
/// round metric and rescale the field; otherwise the metric is divided by the squared
/// length of the field, which makes it unit and geodesic.
pub fn s3_weighted(k1: f64, k2: f64) -> Result<CatalogEntry> {
    if !(k1 > 0.0 && k2 > 0.0 && k1.is_finite() && k2.is_finite()) {
        return Err(Error::InvalidInput(format!("weights must be positive, got ({k1}, {k2})")));
    }
    let name = format!("s3_weighted({k1},{k2})");
    let w = [
        format!("(-{k1:?}*x2+{k2:?}*x1*x3)"),
        format!("({k1:?}*x1+{k2:?}*x2*x3)"),
        format!("({k2:?}*(1-x1^2-x2^2+x3^2)/2)"),
    ];
    let (manifold, field, curvature) = if k1 == k2 {
        let c = w.clone().map(|s| format!("{s}/{k1:?}"));
        (
            expr_manifold(&name, [S3_METRIC, "0", "0", S3_METRIC, "0", S3_METRIC], None)
                .with_parametrization(hopf_parametrization(1.0, 1.0, false)),
            expr_field("weighted hopf", [&c[0], &c[1], &c[2]]),
            Some(1.0),
        )
    } else {
        let s = "(1+x1^2+x2^2+x3^2)";
        let r1 = format!("(4*(x1^2+x2^2)/{s}^2)");
        let len2 = format!("({k1:?}^2*{r1}+{k2:?}^2*(1-{r1}))");
        let g = format!("4/{s}^2/{len2}");
        (
            expr_manifold(&name, [&g, "0", "0", &g, "0", &g], None)
                .with_parametrization(hopf_parametrization(k1, k2, true)),
            expr_field("weighted hopf", [&w[0], &w[1], &w[2]]),
            None,
        )
    };
    Ok(CatalogEntry {
        name,
        description: "S^3 with a weighted Hopf field, metric rescaled to make it unit; contact everywhere".into(),
        manifold,
        field,
        grid: Grid::cube(-1.0, 1.0, 5),
        orbit_start: Point3::new(0.5, 0.0, 0.0),
        space_form_curvature: curvature,
        expected: vec![above(Quantity::ContactDefectAbs, 1e-3)],
    })
}

fn h2xr_vertical() -> CatalogEntry {
    CatalogEntry {
        name: "h2xr_vertical".into(),
        description: "H^2 x R in half-plane coordinates with x2 d/dx2; beta has rank one".into(),
        manifold: expr_manifold("h2xr_vertical", ["1/x2^2", "0", "0", "1/x2^2", "0", "1"], Some("x2")),
        field: expr_field("x2 d/dx2", ["0", "x2", "0"]),
        grid: Grid::new([-1.0, 0.2, -1.0], [1.0, 3.0, 1.0], [5, 5, 5]),
        orbit_start: Point3::new(0.0, 1.0, 0.0),
        space_form_curvature: None,
        expected: vec![
            near(Quantity::BetaRank, 1.0, 0.0),
            near(Quantity::ContactDefectAbs, 0.0, 1e-8),
            near(Quantity::DeltaMax, 0.0, 1e-6),
            near(Quantity::DeltaMin, -1.0, 1e-6),
            near(Quantity::MinAbsEigen, 0.0, 1e-6),
            above(Quantity::MaxAbsEigen, 0.1),
        ],
    }
}

fn h3_vertical() -> CatalogEntry {
    CatalogEntry {
        name: "h3_vertical".into(),
        description: "H^3 in the upper half-space with x3 d/dx3; beta = -id".into(),
        manifold: expr_manifold("h3_vertical", ["1/x3^2", "0", "0", "1/x3^2", "0", "1/x3^2"], Some("x3")),
        field: expr_field("x3 d/dx3", ["0", "0", "x3"]),
        grid: Grid::new([-1.0, -1.0, 0.2], [1.0, 1.0, 3.0], [5, 5, 5]),
        orbit_start: Point3::new(0.0, 0.0, 1.0),
        space_form_curvature: Some(-1.0),
        expected: vec![
            near(Quantity::BetaEntry(0, 0), -1.0, 1e-6),
            near(Quantity::BetaEntry(0, 1), 0.0, 1e-6),
            near(Quantity::BetaEntry(1, 0), 0.0, 1e-6),
            near(Quantity::BetaEntry(1, 1), -1.0, 1e-6),
            near(Quantity::ContactDefectAbs, 0.0, 1e-8),
            near(Quantity::DeltaMax, -1.0, 1e-6),
            near(Quantity::DeltaMin, -1.0, 1e-6),
        ],
    }
}

fn heisenberg_reeb() -> CatalogEntry {
    CatalogEntry {
        name: "heisenberg_reeb".into(),
        description: "Heisenberg group dx1^2 + dx2^2 + (dx3 - x1 dx2)^2 with its Reeb field d/dx3".into(),
        manifold: expr_manifold("heisenberg_reeb", ["1", "0", "0", "1+x1^2", "-x1", "1"], None),
        field: expr_field("d/dx3", ["0", "0", "1"]),
        grid: Grid::cube(-1.0, 1.0, 5),
        orbit_start: Point3::origin(),
        space_form_curvature: None,
        expected: vec![
            below(Quantity::KillingDefect, 1e-8),
            near(Quantity::ContactDefectAbs, 1.0, 1e-6),
            near(Quantity::DeltaMax, 0.25, 1e-5),
            near(Quantity::DeltaMin, 0.25, 1e-5),
            near(Quantity::RicX, 0.5, 1e-5),
        ],
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfTestFailure {
    pub point: [f64; 3],
    pub check: String,
    pub measured: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfTest {
    pub entry: String,
    pub samples: usize,
    pub out_of_chart: usize,
    pub max_unit_defect: f64,
    pub max_geodesic_defect: f64,
    pub failures: Vec<SelfTestFailure>,
}

impl SelfTest {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.samples > 0
    }
}

pub const SELF_TEST_UNIT: f64 = 1e-8;
pub const SELF_TEST_GEODESIC: f64 = 1e-6;

/// Diagnose every grid point inside the chart and compare against the template.
pub fn self_test(entry: &CatalogEntry) -> Result<SelfTest> {
    let tol = Tolerances::default();
    let mut report = SelfTest {
        entry: entry.name.clone(),
        samples: 0,
        out_of_chart: 0,
        max_unit_defect: 0.0,
        max_geodesic_defect: 0.0,
        failures: Vec::new(),
    };
    for p in entry.grid.points() {
        if !entry.manifold.contains(&p) {
            report.out_of_chart += 1;
            continue;
        }
        let d = diagnose_point_with(&entry.manifold, &entry.field, &p, &tol)?;
        report.samples += 1;
        report.max_unit_defect = report.max_unit_defect.max(d.unit_defect);
        report.max_geodesic_defect = report.max_geodesic_defect.max(d.geodesic_defect);
        let mut fail = |check: String, measured: f64| {
            report.failures.push(SelfTestFailure {
                point: d.p,
                check,
                measured,
            })
        };
        if d.unit_defect >= SELF_TEST_UNIT {
            fail("unit_defect".into(), d.unit_defect);
        }
        if d.geodesic_defect >= SELF_TEST_GEODESIC {
            fail("geodesic_defect".into(), d.geodesic_defect);
        }
        for e in &entry.expected {
            let v = e.quantity.measure(&d);
            if !e.expect.holds(v) {
                fail(format!("{:?} {:?}", e.quantity, e.expect), v);
            }
        }
    }
    Ok(report)
}
