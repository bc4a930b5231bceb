//! Theorem-level verdicts over grids and orbits, and the contact volume.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::CatalogEntry;
use crate::curvature::{curvature_at, metric_and_christoffel, parallel_jacobi_defect};
use crate::error::{Error, Result};
use crate::field::{contact_defect, diagnose_point_with, EigenClass, FieldJet, PointDiagnosis, TangentField, Tolerances};
use crate::flow::integrate_orbit;
use crate::geometry::{frame_at, ChartedManifold, Grid, Point3, Vec3};

/// Sectional curvatures must stay within this of `c` for a space-form verdict.
pub const CONSTANT_CURVATURE_TOL: f64 = 1e-4;
pub const PLANES_PER_POINT: usize = 4;
pub const CURVATURE_SEED: u64 = 0x5eed;
/// Short orbits used to estimate `∇_X R_X`.
pub const PARALLEL_ORBIT_T: f64 = 0.01;
pub const PARALLEL_ORBIT_STEP: f64 = 1e-3;
pub const DEFAULT_VOLUME_NODES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TheoremId {
    #[serde(rename = "T3.1")]
    T3_1,
    #[serde(rename = "C3.2")]
    C3_2,
    #[serde(rename = "T5.1")]
    T5_1,
    #[serde(rename = "C5.2")]
    C5_2,
    #[serde(rename = "T6.1")]
    T6_1,
    #[serde(rename = "P7.6")]
    P7_6,
}

impl TheoremId {
    pub const ALL: [TheoremId; 6] = [
        TheoremId::T3_1,
        TheoremId::C3_2,
        TheoremId::T5_1,
        TheoremId::C5_2,
        TheoremId::T6_1,
        TheoremId::P7_6,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::T3_1 => "T3.1",
            TheoremId::C3_2 => "C3.2",
            TheoremId::T5_1 => "T5.1",
            TheoremId::C5_2 => "C5.2",
            TheoremId::T6_1 => "T6.1",
            TheoremId::P7_6 => "P7.6",
        }
    }

    pub fn statement(&self) -> &'static str {
        match self {
            TheoremId::T3_1 => "where X is not contact: Ric(X) < 0, or Ric(X) = 0 and beta = 0",
            TheoremId::C3_2 => "Ric(X) >= 0 and beta != 0 imply contact",
            TheoremId::T5_1 => "space form of curvature c: no real eigenvalue if c > 0, lambda = 0 if c = 0, |lambda| <= sqrt|c| if c < 0",
            TheoremId::C5_2 => "space form of curvature c: contact if c > 0; otherwise non-contact points have beta = 0 (c = 0) or real eigenvalues |lambda| <= sqrt|c| (c < 0)",
            TheoremId::T6_1 => "nabla_X R_X = 0 with max K(v,X) > 0, or max K(v,X) = 0 and rank beta = 2, imply contact",
            TheoremId::P7_6 => "a Killing field on a closed manifold is Reeb iff its contact volume is nonzero",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidInput(format!("unknown theorem id `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "consistent")]
    Consistent,
    #[serde(rename = "violated")]
    Violated,
    #[serde(rename = "hypotheses-not-met")]
    HypothesesNotMet,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Violated => "violated",
            Verdict::HypothesesNotMet => "hypotheses-not-met",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub point: [f64; 3],
    pub diagnosis: PointDiagnosis,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub theorem: TheoremId,
    pub entry: String,
    pub samples: usize,
    pub hypothesis_satisfied: usize,
    pub conclusion_satisfied: usize,
    pub violations: Vec<Violation>,
    pub verdict: Verdict,
    /// Measured aggregates, keyed by name.
    pub measured: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

struct Tally {
    report: TheoremReport,
}

impl Tally {
    fn new(theorem: TheoremId, entry: &str) -> Self {
        Tally {
            report: TheoremReport {
                theorem,
                entry: entry.to_string(),
                samples: 0,
                hypothesis_satisfied: 0,
                conclusion_satisfied: 0,
                violations: Vec::new(),
                verdict: Verdict::HypothesesNotMet,
                measured: BTreeMap::new(),
                notes: Vec::new(),
            },
        }
    }

    /// `conclusion` is `Err(reason)` when it fails.
    fn record(&mut self, d: &PointDiagnosis, hypothesis: bool, conclusion: std::result::Result<(), String>) {
        if !hypothesis {
            return;
        }
        self.report.hypothesis_satisfied += 1;
        match conclusion {
            Ok(()) => self.report.conclusion_satisfied += 1,
            Err(reason) => self.report.violations.push(Violation {
                point: d.p,
                diagnosis: *d,
                reason,
            }),
        }
    }

    fn measure(&mut self, key: &str, v: f64) {
        self.report.measured.insert(key.to_string(), v);
    }

    fn note(&mut self, s: impl Into<String>) {
        self.report.notes.push(s.into());
    }

    fn finish(mut self) -> TheoremReport {
        self.report.verdict = if !self.report.violations.is_empty() {
            Verdict::Violated
        } else if self.report.hypothesis_satisfied == 0 {
            Verdict::HypothesesNotMet
        } else {
            Verdict::Consistent
        };
        self.report
    }
}

/// Per-point diagnoses over the grid, in grid order.
#[derive(Debug, Clone, Default, Serialize)]
pub struct GridDiagnosis {
    pub points: Vec<PointDiagnosis>,
    pub out_of_chart: Vec<[f64; 3]>,
    /// Points where `X` is not unit, with the measured defect.
    pub not_unit: Vec<([f64; 3], f64)>,
}

impl GridDiagnosis {
    /// Samples where `X` is a geodesic unit field within tolerance.
    pub fn geodesic_unit(&self, tol: &Tolerances) -> impl Iterator<Item = &PointDiagnosis> + '_ {
        let g = tol.geodesic;
        self.points.iter().filter(move |d| d.geodesic_defect <= g)
    }

    pub fn max_of(&self, f: impl Fn(&PointDiagnosis) -> f64) -> f64 {
        self.points.iter().map(f).fold(0.0, f64::max)
    }
}

pub fn diagnose_grid(man: &ChartedManifold, x: &dyn TangentField, grid: &Grid, tol: &Tolerances) -> Result<GridDiagnosis> {
    enum Outcome {
        Point(PointDiagnosis),
        Outside([f64; 3]),
        NotUnit([f64; 3], f64),
    }
    let outcomes: Vec<Outcome> = grid
        .points()
        .par_iter()
        .map(|p| {
            let q = [p.x, p.y, p.z];
            if !man.contains(p) {
                return Ok(Outcome::Outside(q));
            }
            match diagnose_point_with(man, x, p, tol) {
                Ok(d) => Ok(Outcome::Point(d)),
                Err(Error::OutOfChart(_)) => Ok(Outcome::Outside(q)),
                Err(Error::NotUnit(u)) => Ok(Outcome::NotUnit(q, u)),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let mut out = GridDiagnosis::default();
    for o in outcomes {
        match o {
            Outcome::Point(d) => out.points.push(d),
            Outcome::Outside(q) => out.out_of_chart.push(q),
            Outcome::NotUnit(q, u) => out.not_unit.push((q, u)),
        }
    }
    Ok(out)
}

fn note_skipped(t: &mut Tally, diag: &GridDiagnosis, tol: &Tolerances) {
    t.report.samples = diag.points.len() + diag.not_unit.len();
    let non_geodesic = diag.points.iter().filter(|d| d.geodesic_defect > tol.geodesic).count();
    if !diag.not_unit.is_empty() {
        t.note(format!("{} samples where X is not unit", diag.not_unit.len()));
    }
    if non_geodesic > 0 {
        t.note(format!("{non_geodesic} samples where X is not geodesic"));
    }
    if !diag.out_of_chart.is_empty() {
        t.note(format!("{} grid points outside the chart", diag.out_of_chart.len()));
    }
}

/// Minimum and maximum sectional curvature over seeded random planes at each grid point.
pub fn sectional_range(man: &ChartedManifold, grid: &Grid) -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(CURVATURE_SEED);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in grid.points().iter().filter(|p| man.contains(p)) {
        let curv = curvature_at(man, p)?;
        let mut k = 0;
        while k < PLANES_PER_POINT {
            let mut v = || Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let (a, b) = (v(), v());
            match curv.sectional(&a, &b) {
                Ok(s) => {
                    lo = lo.min(s);
                    hi = hi.max(s);
                    k += 1;
                }
                Err(Error::DegeneratePlane(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok((lo, hi))
}

pub fn check_constant_curvature(man: &ChartedManifold, c: f64, grid: &Grid) -> Result<()> {
    let (min, max) = sectional_range(man, grid)?;
    if (min - c).abs() > CONSTANT_CURVATURE_TOL || (max - c).abs() > CONSTANT_CURVATURE_TOL {
        return Err(Error::NotConstantCurvature { c, min, max });
    }
    Ok(())
}

fn abs_eigen_bound(d: &PointDiagnosis) -> Option<f64> {
    d.eigen.max_abs_real()
}

/// Eigenvalue constraints in constant curvature `c`.
pub fn verify_space_form(entry: &CatalogEntry, c: f64, grid: &Grid, tol: &Tolerances) -> Result<TheoremReport> {
    check_constant_curvature(&entry.manifold, c, grid)?;
    let diag = diagnose_grid(&entry.manifold, &entry.field, grid, tol)?;
    let mut t = Tally::new(TheoremId::T5_1, &entry.name);
    note_skipped(&mut t, &diag, tol);
    t.measure("c", c);
    let mut worst: f64 = 0.0;
    for d in diag.geodesic_unit(tol) {
        let conclusion = match abs_eigen_bound(d) {
            None => Ok(()),
            Some(m) => {
                worst = worst.max(m);
                if c > 0.0 {
                    Err(format!("real eigenvalues with c = {c} > 0"))
                } else if c == 0.0 && m > tol.hypothesis {
                    Err(format!("nonzero real eigenvalue {m:e} with c = 0"))
                } else if c < 0.0 && m > (-c).sqrt() + tol.hypothesis {
                    Err(format!("|lambda| = {m} exceeds sqrt|c| = {}", (-c).sqrt()))
                } else {
                    Ok(())
                }
            }
        };
        t.record(d, true, conclusion);
    }
    t.measure("max_abs_real_eigenvalue", worst);
    Ok(t.finish())
}

/// Contact criteria in constant curvature `c`.
pub fn verify_space_form_contact(entry: &CatalogEntry, c: f64, grid: &Grid, tol: &Tolerances) -> Result<TheoremReport> {
    check_constant_curvature(&entry.manifold, c, grid)?;
    let diag = diagnose_grid(&entry.manifold, &entry.field, grid, tol)?;
    let mut t = Tally::new(TheoremId::C5_2, &entry.name);
    note_skipped(&mut t, &diag, tol);
    t.measure("c", c);
    for d in diag.geodesic_unit(tol) {
        let contact = d.is_contact(tol);
        let conclusion = if c > 0.0 {
            if contact {
                Ok(())
            } else {
                Err("not contact with c > 0".to_string())
            }
        } else if contact {
            Ok(())
        } else if c == 0.0 {
            if d.beta_norm() <= tol.hypothesis {
                Ok(())
            } else {
                Err(format!("not contact but |beta| = {:e} with c = 0", d.beta_norm()))
            }
        } else {
            match d.eigen {
                EigenClass::RealPair { lambda, mu } if lambda.abs().max(mu.abs()) <= (-c).sqrt() + tol.hypothesis => Ok(()),
                _ => Err("not contact but eigenvalues exceed sqrt|c|".to_string()),
            }
        };
        t.record(d, true, conclusion);
    }
    Ok(t.finish())
}

/// The Ricci dichotomy at non-contact points and the Ricci-positive contact criterion.
pub fn verify_ricci(entry: &CatalogEntry, grid: &Grid, tol: &Tolerances) -> Result<[TheoremReport; 2]> {
    let diag = diagnose_grid(&entry.manifold, &entry.field, grid, tol)?;
    let mut dichotomy = Tally::new(TheoremId::T3_1, &entry.name);
    let mut positive = Tally::new(TheoremId::C3_2, &entry.name);
    note_skipped(&mut dichotomy, &diag, tol);
    note_skipped(&mut positive, &diag, tol);
    let mut margin = f64::INFINITY;
    for d in diag.geodesic_unit(tol) {
        let gap = match d.eigen {
            EigenClass::RealPair { lambda, mu } => (lambda - mu).powi(2),
            EigenClass::ComplexPair { b, .. } => 4.0 * b * b,
        };
        margin = margin.min(d.ric_x + gap / 2.0);
        let flat = d.ric_x.abs() <= tol.hypothesis && d.beta_norm() <= tol.hypothesis;
        let case = if d.ric_x < tol.hypothesis || flat {
            Ok(())
        } else {
            Err(format!("not contact with Ric(X) = {} and |beta| = {:e}", d.ric_x, d.beta_norm()))
        };
        dichotomy.record(d, !d.is_contact(tol), case);

        let hyp = d.ric_x >= -tol.hypothesis && d.beta_norm() > tol.hypothesis;
        let contact = if d.is_contact(tol) {
            Ok(())
        } else {
            Err(format!("Ric(X) = {} >= 0, beta != 0, contact defect {:e}", d.ric_x, d.contact_defect))
        };
        positive.record(d, hyp, contact);
    }
    if margin.is_finite() {
        dichotomy.measure("min_ric_plus_half_eigen_gap", margin);
        if margin < -tol.hypothesis {
            dichotomy.note("Ric(X) + |lambda - mu|^2 / 2 is negative somewhere; the dichotomy is still checked pointwise");
        }
    }
    Ok([dichotomy.finish(), positive.finish()])
}

/// Largest `‖∇_X R_X‖` estimate along a short orbit from `p`.
pub fn orbit_parallel_jacobi_defect(entry: &CatalogEntry, p: &Point3, t_end: f64, step: f64) -> Result<f64> {
    let traj = integrate_orbit(&entry.manifold, &entry.field, p, t_end, step)?;
    Ok(traj
        .samples
        .windows(3)
        .map(|w| parallel_jacobi_defect(&w[0], &w[2]))
        .fold(0.0, f64::max))
}

/// Locally symmetric Jacobi tensor with positive or zero-and-full-rank curvature implies contact.
pub fn verify_parallel_jacobi(entry: &CatalogEntry, grid: &Grid, tol: &Tolerances) -> Result<TheoremReport> {
    let diag = diagnose_grid(&entry.manifold, &entry.field, grid, tol)?;
    let mut t = Tally::new(TheoremId::T6_1, &entry.name);
    note_skipped(&mut t, &diag, tol);
    let candidates: Vec<&PointDiagnosis> = diag.geodesic_unit(tol).collect();
    let defects: Vec<Option<f64>> = candidates
        .par_iter()
        .map(|d| {
            let p = Point3::from(d.p);
            match orbit_parallel_jacobi_defect(entry, &p, PARALLEL_ORBIT_T, PARALLEL_ORBIT_STEP) {
                Ok(v) => Ok(Some(v)),
                Err(Error::OutOfChart(_) | Error::StepTooLarge { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    let (mut case_i, mut case_ii) = (0usize, 0usize);
    for (d, defect) in candidates.iter().zip(&defects) {
        let Some(defect) = *defect else { continue };
        worst = worst.max(defect);
        let parallel = defect < tol.hypothesis;
        let positive = d.delta_max > tol.hypothesis;
        let zero_full_rank = d.delta_max.abs() <= tol.hypothesis && d.beta_rank == 2;
        case_i += (parallel && positive) as usize;
        case_ii += (parallel && zero_full_rank) as usize;
        let conclusion = if d.is_contact(tol) {
            Ok(())
        } else {
            Err(format!("hypotheses hold but contact defect is {:e}", d.contact_defect))
        };
        t.record(d, parallel && (positive || zero_full_rank), conclusion);
    }
    t.measure("max_parallel_jacobi_defect", worst);
    t.measure("case_i_samples", case_i as f64);
    t.measure("case_ii_samples", case_ii as f64);
    t.note("completeness of X is assumed");
    Ok(t.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Orientation {
    /// Frames with `det[X, e1, e2] > 0` in the chart, pushed to the parametrization's orientation.
    Parametrization,
    Reversed,
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumeResult {
    pub value: f64,
    /// Nodes per axis.
    pub nodes: usize,
    /// `|value(n) − value(n/2)|`
    pub estimated_error: f64,
    pub parametrization: String,
}

fn neumaier_sum(values: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &v in values {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + comp
}

fn contact_defect_at(man: &ChartedManifold, x: &dyn TangentField, p: &Point3, orientation: Orientation) -> Result<f64> {
    let (metric, gamma) = metric_and_christoffel(man, p)?;
    let jet = FieldJet::with_connection(metric, &gamma, x, p)?;
    let frame = frame_at(&metric, &jet.x)?;
    let frame = match orientation {
        Orientation::Parametrization => frame,
        Orientation::Reversed => frame.reversed(),
    };
    Ok(contact_defect(&jet.beta(&frame)))
}

/// Midpoint rule for `∫ contact_defect dV` on the parameter box with `n` nodes per axis.
pub fn volume_sum(man: &ChartedManifold, x: &dyn TangentField, n: usize, orientation: Orientation) -> Result<f64> {
    let par = man
        .parametrization()
        .ok_or_else(|| Error::NoParametrization(man.name.clone()))?;
    if n == 0 {
        return Err(Error::InvalidInput("volume needs at least one node per axis".into()));
    }
    let h = par.bounds.map(|(a, b)| (b - a) / n as f64);
    let node = |i: usize, axis: usize| par.bounds[axis].0 + (i as f64 + 0.5) * h[axis];
    let cell = h[0] * h[1] * h[2];
    let map_sign = |q: [f64; 3]| {
        let eps = 1e-6;
        let mut jac = crate::geometry::Mat3::zeros();
        for k in 0..3 {
            let (mut a, mut b) = (q, q);
            a[k] += eps;
            b[k] -= eps;
            jac.set_column(k, &(((par.map)(a) - (par.map)(b)) / (2.0 * eps)));
        }
        jac.determinant().signum()
    };
    let slabs: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(n * n);
            for j in 0..n {
                for k in 0..n {
                    let q = [node(i, 0), node(j, 1), node(k, 2)];
                    let p = (par.map)(q);
                    let cd = contact_defect_at(man, x, &p, orientation)?;
                    row.push(cd * (par.density)(q) * map_sign(q) * cell);
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let flat: Vec<f64> = slabs.concat();
    Ok(neumaier_sum(&flat))
}

pub fn volume_integral(entry: &CatalogEntry, nodes: usize) -> Result<VolumeResult> {
    volume_integral_oriented(&entry.manifold, &entry.field, nodes, Orientation::Parametrization)
}

pub fn volume_integral_oriented(
    man: &ChartedManifold,
    x: &dyn TangentField,
    nodes: usize,
    orientation: Orientation,
) -> Result<VolumeResult> {
    let par = man
        .parametrization()
        .ok_or_else(|| Error::NoParametrization(man.name.clone()))?;
    let value = volume_sum(man, x, nodes, orientation)?;
    let coarse = volume_sum(man, x, (nodes / 2).max(1), orientation)?;
    Ok(VolumeResult {
        value,
        nodes,
        estimated_error: (value - coarse).abs(),
        parametrization: par.name.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Reebability {
    #[serde(rename = "reeb-realizable")]
    ReebRealizable,
    #[serde(rename = "not-reeb")]
    NotReeb,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl Reebability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Reebability::ReebRealizable => "reeb-realizable",
            Reebability::NotReeb => "not-reeb",
            Reebability::Inconclusive => "inconclusive",
        }
    }
}

pub fn reebability_verdict(volume: Option<&VolumeResult>, killing_defect_max: f64, tol: &Tolerances) -> Reebability {
    match volume {
        Some(v) if killing_defect_max < tol.killing => {
            if v.value.abs() > 3.0 * v.estimated_error {
                Reebability::ReebRealizable
            } else if v.value.abs() <= v.estimated_error {
                Reebability::NotReeb
            } else {
                Reebability::Inconclusive
            }
        }
        _ => Reebability::Inconclusive,
    }
}

/// Killing fields with a closed parametrization: contact everywhere on the grid must come
/// with a nonzero volume, and a vanishing volume rules out contact everywhere.
pub fn verify_reebability(entry: &CatalogEntry, grid: &Grid, nodes: usize, tol: &Tolerances) -> Result<TheoremReport> {
    let diag = diagnose_grid(&entry.manifold, &entry.field, grid, tol)?;
    let mut t = Tally::new(TheoremId::P7_6, &entry.name);
    note_skipped(&mut t, &diag, tol);
    let killing_max = diag.max_of(|d| d.killing_defect);
    t.measure("max_killing_defect", killing_max);
    if entry.manifold.parametrization().is_none() {
        t.note("no closed parametrization");
        return Ok(t.finish());
    }
    if killing_max >= tol.killing {
        t.note("X is not Killing");
        return Ok(t.finish());
    }
    let vol = volume_integral(entry, nodes)?;
    let verdict = reebability_verdict(Some(&vol), killing_max, tol);
    t.measure("volume", vol.value);
    t.measure("volume_estimated_error", vol.estimated_error);
    t.note(format!("reebability: {}", verdict.as_str()));
    let all_contact = diag.geodesic_unit(tol).all(|d| d.is_contact(tol));
    for d in diag.geodesic_unit(tol) {
        let conclusion = match verdict {
            Reebability::NotReeb if all_contact => Err("contact everywhere but the volume vanishes".to_string()),
            Reebability::ReebRealizable if !d.is_contact(tol) && d.beta_norm() <= tol.hypothesis => {
                Err("nonzero volume recorded, but beta vanishes here".to_string())
            }
            _ => Ok(()),
        };
        t.record(d, true, conclusion);
    }
    Ok(t.finish())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    /// Overrides the entry's space-form curvature for T5.1 and C5.2.
    pub c: Option<f64>,
    pub volume_nodes: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            c: None,
            volume_nodes: DEFAULT_VOLUME_NODES,
        }
    }
}

fn not_applicable(theorem: TheoremId, entry: &str, why: &str) -> TheoremReport {
    let mut t = Tally::new(theorem, entry);
    t.note(why);
    t.finish()
}

/// Run the requested theorems on one entry and grid, in the order given.
pub fn verify_entry(
    entry: &CatalogEntry,
    grid: &Grid,
    theorems: &[TheoremId],
    opts: &VerifyOptions,
    tol: &Tolerances,
) -> Result<Vec<TheoremReport>> {
    let c = opts.c.or(entry.space_form_curvature);
    let mut ricci: Option<[TheoremReport; 2]> = None;
    let mut out = Vec::with_capacity(theorems.len());
    for th in theorems {
        let report = match th {
            TheoremId::T3_1 | TheoremId::C3_2 => {
                if ricci.is_none() {
                    ricci = Some(verify_ricci(entry, grid, tol)?);
                }
                let r = ricci.as_ref().expect("computed");
                r[(*th == TheoremId::C3_2) as usize].clone()
            }
            TheoremId::T5_1 | TheoremId::C5_2 => match c {
                None => not_applicable(*th, &entry.name, "not a space form"),
                Some(c) if *th == TheoremId::T5_1 => verify_space_form(entry, c, grid, tol)?,
                Some(c) => verify_space_form_contact(entry, c, grid, tol)?,
            },
            TheoremId::T6_1 => verify_parallel_jacobi(entry, grid, tol)?,
            TheoremId::P7_6 => verify_reebability(entry, grid, opts.volume_nodes, tol)?,
        };
        out.push(report);
    }
    Ok(out)
}

/// Every theorem on every given entry over its default grid.
pub fn verify_all(entries: &[CatalogEntry], tol: &Tolerances) -> Result<Vec<TheoremReport>> {
    let per: Vec<Vec<TheoremReport>> = entries
        .par_iter()
        .map(|e| verify_entry(e, &e.grid, &TheoremId::ALL, &VerifyOptions::default(), tol))
        .collect::<Result<_>>()?;
    Ok(per.concat())
}
