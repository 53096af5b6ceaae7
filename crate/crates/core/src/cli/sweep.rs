//! Parameter sweeps: classify every point of a one- or two-axis grid.

use std::io::Write;

use rayon::prelude::*;

use crate::classify::{classify_face, classify_global, Face};
use crate::error::{Error, Result};
use crate::model::{nash_vertices, validate, Branch, Params, ValidatedParams};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepAxis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl SweepAxis {
    /// Evenly spaced values, both ends included.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let k = i as f64;
                (self.min * (last - k) + self.max * k) / last
            })
            .collect()
    }
}

/// Parses `NAME=MIN:MAX:STEPS`.
pub fn parse_axis(s: &str) -> Result<SweepAxis> {
    let bad = || Error::InvalidConfig(format!("axis `{s}` is not NAME=MIN:MAX:STEPS"));
    let (name, range) = s.split_once('=').ok_or_else(bad)?;
    let name = name.trim();
    if !Params::NAMES.contains(&name) {
        return Err(Error::UnknownParameter(name.to_string()));
    }
    let parts: Vec<&str> = range.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(bad());
    };
    let min: f64 = lo.trim().parse().map_err(|_| bad())?;
    let max: f64 = hi.trim().parse().map_err(|_| bad())?;
    let steps: usize = n.trim().parse().map_err(|_| bad())?;
    if steps < 2 || !min.is_finite() || !max.is_finite() || !(min < max) {
        return Err(Error::InvalidConfig(format!(
            "axis `{s}` needs MIN < MAX and at least 2 steps"
        )));
    }
    Ok(SweepAxis {
        name: name.to_string(),
        min,
        max,
        steps,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub values: Vec<f64>,
    /// Passed full validation.
    pub valid: bool,
    /// Some classifying quantity sits within tolerance of zero.
    pub degenerate: bool,
    pub branch: Option<Branch>,
    /// Letters of the Nash vertices, or `None` when degenerate.
    pub nash: Option<String>,
    /// Figure label per face in `Face::ALL` order; `degenerate` or `invalid`
    /// when that face's own conditions are not met.
    pub faces: [String; 4],
    /// Global attractor labels, only for valid rows.
    pub attractors: Option<Vec<String>>,
}

fn face_cell(face: Face, p: &Params, tol: f64) -> String {
    match classify_face(face, p, tol) {
        Ok(r) => r.figure,
        Err(Error::Degenerate(_)) => "degenerate".to_string(),
        Err(_) => "invalid".to_string(),
    }
}

fn classify_point(p: Params, values: Vec<f64>, tol: f64) -> Result<SweepRow> {
    let report = validate(&p, tol);
    let nash = nash_vertices(&p, tol).ok().map(|v| {
        v.iter()
            .filter(|n| n.nash)
            .map(|n| n.strategy.letter())
            .collect::<String>()
    });
    let faces = Face::ALL.map(|f| face_cell(f, &p, tol));
    let (valid, attractors) = match ValidatedParams::new(p, tol) {
        Ok(vp) => {
            let r = classify_global(&vp)?;
            (true, Some(r.global.attractors.into_iter().map(|a| a.label).collect()))
        }
        Err(_) => (false, None),
    };
    Ok(SweepRow {
        values,
        valid,
        degenerate: !report.degenerate_quantities.is_empty(),
        branch: report.branch,
        nash,
        faces,
        attractors,
    })
}

/// One row per grid point, first axis varying slowest. Runs on the current
/// rayon pool.
pub fn run_sweep(base: &Params, axes: &[SweepAxis], tol: f64) -> Result<Vec<SweepRow>> {
    if axes.is_empty() {
        return Err(Error::InvalidConfig("a sweep needs at least one axis".into()));
    }
    let mut grid: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        let vals = axis.values();
        grid = grid
            .into_iter()
            .flat_map(|prefix| {
                vals.iter().map(move |&v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    grid.into_par_iter()
        .map(|values| {
            let mut p = *base;
            for (axis, &v) in axes.iter().zip(&values) {
                p.set(&axis.name, v)?;
            }
            classify_point(p, values, tol)
        })
        .collect()
}

pub fn write_csv<W: Write>(axes: &[SweepAxis], rows: &[SweepRow], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = axes.iter().map(|a| a.name.clone()).collect();
    header.extend(
        ["valid", "degenerate", "branch", "nash"]
            .iter()
            .map(|s| s.to_string()),
    );
    header.extend(Face::ALL.iter().map(|f| f.to_string()));
    header.extend(["attractor_count".to_string(), "attractors".to_string()]);
    w.write_record(&header)?;
    for r in rows {
        let mut rec: Vec<String> = r.values.iter().map(|v| v.to_string()).collect();
        rec.push(r.valid.to_string());
        rec.push(r.degenerate.to_string());
        rec.push(r.branch.map(|b| b.to_string()).unwrap_or_default());
        rec.push(r.nash.clone().unwrap_or_else(|| "degenerate".into()));
        rec.extend(r.faces.iter().cloned());
        match &r.attractors {
            Some(a) => {
                rec.push(a.len().to_string());
                rec.push(a.join(" "));
            }
            None => {
                rec.push(String::new());
                rec.push(String::new());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DEFAULT_TOL;

    fn set_a() -> Params {
        Params::new(2.0, 1.0, 1.0, 1.0, 2.0, 0.5)
    }

    #[test]
    fn axis_parsing() {
        let a = parse_axis("eta=0.1:1.4:14").unwrap();
        assert_eq!(a.values().len(), 14);
        assert_eq!(a.values()[13], 1.4);
        assert!(parse_axis("eta=0.1:1.4:1").is_err());
        assert!(parse_axis("eta=1:0:5").is_err());
        assert!(parse_axis("zeta=0:1:5").is_err());
        assert!(parse_axis("eta=0:1").is_err());
    }

    #[test]
    fn beta_sweep_marks_invalid_rows() {
        let axis = parse_axis("beta=-3:2:11").unwrap();
        let rows = run_sweep(&set_a(), &[axis], DEFAULT_TOL).unwrap();
        for r in &rows {
            let beta = r.values[0];
            let at_zero = [beta, beta - 0.5, 2.0 * beta + 1.0]
                .iter()
                .any(|q| q.abs() <= DEFAULT_TOL);
            let expect_valid = beta + 1.0 > DEFAULT_TOL && !at_zero;
            assert_eq!(r.valid, expect_valid, "beta = {beta}");
        }
        let h_nash = |b: f64| rows.iter().find(|r| r.values[0] == b).unwrap().nash.clone().unwrap();
        assert!(!h_nash(0.0).contains('H'));
        assert!(h_nash(1.0).contains('H'));
    }

    #[test]
    fn two_axis_grid_order() {
        let axes = [parse_axis("beta=0.5:1.5:3").unwrap(), parse_axis("gamma=0.2:1.8:3").unwrap()];
        let rows = run_sweep(&set_a(), &axes, DEFAULT_TOL).unwrap();
        assert_eq!(rows.len(), 9);
        assert_eq!(rows[1].values, vec![0.5, 1.0]);
        assert_eq!(rows[3].values, vec![1.0, 0.2]);
    }
}
