//! CSV and JSON report bodies. Floats carry 17 significant digits, LF line ends.

use std::fmt::Write;

use serde_json::json;

use super::{Config, TOOL, VERSION};
use crate::field::classify_2x2;
use crate::flow::{riccati_profile, wronskian, Trajectory};
use crate::verify::GridDiagnosis;

pub const ANALYZE_HEADER: &str = "x1,x2,x3,unit_defect,geodesic_defect,killing_defect,contact_defect,eig_kind,eig_re1,eig_im1,eig_re2,eig_im2,ric_X,Delta,delta,beta_rank";
pub const ORBIT_HEADER: &str = "t,x1,x2,x3,tr_beta,det_beta,discriminant,contact_defect,A_numeric,A_expected,riccati_residual,adapted_residual";

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn row(values: &[f64]) -> String {
    values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(",")
}

fn footer(out: &mut String, cfg: &Config) {
    let _ = writeln!(out, "# {TOOL} {VERSION}");
    let _ = writeln!(out, "# config {}", cfg.echo());
}

pub fn analyze_csv(diag: &GridDiagnosis, cfg: &Config) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{ANALYZE_HEADER}");
    for d in &diag.points {
        let e = d.eigen.parts();
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row(&[d.p[0], d.p[1], d.p[2], d.unit_defect, d.geodesic_defect, d.killing_defect, d.contact_defect]),
            d.eigen.kind(),
            row(&[e[0], e[1], e[2], e[3], d.ric_x, d.delta_max, d.delta_min]),
            d.beta_rank,
        );
    }
    if !diag.out_of_chart.is_empty() {
        let _ = writeln!(out, "# out_of_chart");
        let _ = writeln!(out, "# x1,x2,x3");
        for p in &diag.out_of_chart {
            let _ = writeln!(out, "# {}", row(p));
        }
    }
    if !diag.not_unit.is_empty() {
        let _ = writeln!(out, "# not_unit");
        let _ = writeln!(out, "# x1,x2,x3,unit_defect");
        for (p, u) in &diag.not_unit {
            let _ = writeln!(out, "# {}", row(&[p[0], p[1], p[2], *u]));
        }
    }
    footer(&mut out, cfg);
    out
}

pub fn orbit_csv(traj: &Trajectory, cfg: &Config) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{ORBIT_HEADER}");
    let w = wronskian(traj);
    let ric = riccati_profile(traj);
    for (k, s) in traj.samples.iter().enumerate() {
        let b = &s.beta;
        let adapted = (0..2).map(|a| (s.j_dot[a] - b * s.j[a]).norm()).fold(0.0, f64::max);
        let tr = b.trace();
        let det = b.determinant();
        let _ = writeln!(
            out,
            "{}",
            row(&[
                s.t,
                s.p.x,
                s.p.y,
                s.p.z,
                tr,
                det,
                tr * tr - 4.0 * det,
                s.contact_defect(),
                w.numeric[k],
                w.expected[k],
                ric[k],
                adapted,
            ])
        );
    }
    if traj.truncated {
        let _ = writeln!(out, "# truncated: orbit left the chart at t = {}", num(traj.end().t));
    }
    let r = traj.residuals;
    let _ = writeln!(
        out,
        "# max riccati={} trace={} adapted={} wronskian_relative={}",
        num(r.riccati),
        num(r.trace),
        num(r.adapted),
        num(r.wronskian_relative)
    );
    footer(&mut out, cfg);
    out
}

pub fn orbit_json(traj: &Trajectory, cfg: &Config) -> String {
    let w = wronskian(traj);
    let ric = riccati_profile(traj);
    let samples: Vec<_> = traj
        .samples
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let b = &s.beta;
            json!({
                "t": s.t,
                "p": [s.p.x, s.p.y, s.p.z],
                "beta": [[b[(0, 0)], b[(0, 1)]], [b[(1, 0)], b[(1, 1)]]],
                "eigen": classify_2x2(b),
                "contact_defect": s.contact_defect(),
                "ric_X": s.ric_x(),
                "A_numeric": w.numeric[k],
                "A_expected": w.expected[k],
                "riccati_residual": ric[k],
            })
        })
        .collect();
    let doc = json!({
        "tool": TOOL,
        "version": VERSION,
        "config": cfg,
        "step": traj.step,
        "truncated": traj.truncated,
        "residuals": traj.residuals,
        "samples": samples,
    });
    format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializes"))
}
