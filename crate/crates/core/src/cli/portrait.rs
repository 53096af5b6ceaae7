//! Planar-net drawing: the face without N in the middle, the three faces
//! through N folded out along its edges.

use std::fmt::Write as _;

use crate::classify::{enumerate_stationary_states, Face, Stability, StationaryState};
use crate::dynamics::{integrate, IntegratorConfig, Trajectory};
use crate::error::Result;
use crate::model::{SimplexState, Strategy, ValidatedParams};

const SCALE: f64 = 300.0;
const MARGIN: f64 = 40.0;
const MAX_POLYLINE_POINTS: usize = 400;
const OUTSET: f64 = 0.02;

fn height() -> f64 {
    3f64.sqrt() / 2.0
}

/// Net coordinates of strategy `s` as a corner of `face`.
fn corner(face: Face, s: Strategy) -> (f64, f64) {
    let h = height();
    match s {
        Strategy::O => (0.0, 0.0),
        Strategy::H => (1.0, 0.0),
        Strategy::P => (0.5, h),
        Strategy::N => match face {
            Face::SP => (0.5, -h),
            Face::SH => (-0.5, h),
            Face::SO => (1.5, h),
            Face::SN => unreachable!("N is not a corner of S_N"),
        },
    }
}

fn to_svg((x, y): (f64, f64)) -> (f64, f64) {
    (MARGIN + (x + 0.5) * SCALE, MARGIN + (height() - y) * SCALE)
}

fn position(face: Face, x: &[f64; 4]) -> (f64, f64) {
    let (mut px, mut py) = (0.0, 0.0);
    for s in face.strategies() {
        let (cx, cy) = corner(face, s);
        px += x[s.index()] * cx;
        py += x[s.index()] * cy;
    }
    to_svg((px, py))
}

pub(crate) struct Net {
    pub svg: String,
    pub csv: Vec<u8>,
}

/// Interior lattice points `(i, j, k) / n` of a face, at least `count` of them.
fn lattice_starts(face: Face, count: usize) -> Vec<SimplexState> {
    if count == 0 {
        return Vec::new();
    }
    let mut n = 3;
    while (n - 1) * (n - 2) / 2 < count {
        n += 1;
    }
    let [a, b, c] = face.strategies();
    let mut out = Vec::new();
    for i in 1..n {
        for j in 1..(n - i) {
            let k = n - i - j;
            let mut x = [0.0; 4];
            x[a.index()] = i as f64 / n as f64;
            x[b.index()] = j as f64 / n as f64;
            x[c.index()] = k as f64 / n as f64;
            out.push(SimplexState::normalized(x).expect("lattice point on the simplex"));
        }
    }
    out.truncate(count);
    out
}

/// Starts just off each non-attractive boundary or face state, pushed
/// toward each corner of the face.
fn outset_starts(face: Face, states: &[StationaryState]) -> Vec<SimplexState> {
    let mut out = Vec::new();
    for s in states {
        let n = s.support.len();
        if !(2..=3).contains(&n) || !face.contains(&s.support) || s.is_attractive() {
            continue;
        }
        for c in face.strategies() {
            let mut x = s.location.as_array().map(|v| v * (1.0 - OUTSET));
            x[c.index()] += OUTSET;
            if let Ok(st) = SimplexState::normalized(x) {
                out.push(st);
            }
        }
    }
    out
}

fn marker(out: &mut String, (x, y): (f64, f64), s: &StationaryState) {
    let class = match s.stability {
        Stability::Attractive => "attractive",
        Stability::Repulsive => "repulsive",
        Stability::Saddle => "saddle",
        Stability::Degenerate => "degenerate",
    };
    let r = 6.0;
    let _ = write!(out, r#"<g class="state {class}" data-label="{}">"#, s.label);
    match s.stability {
        Stability::Attractive => {
            let _ = write!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="black" stroke="black"/>"#);
        }
        Stability::Saddle => {
            let _ = write!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="white" stroke="black"/>"#);
            let _ = write!(
                out,
                r#"<path d="M {:.2} {y:.2} A {r} {r} 0 0 0 {:.2} {y:.2} Z" fill="black"/>"#,
                x - r,
                x + r
            );
        }
        Stability::Repulsive => {
            let _ = write!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="white" stroke="black"/>"#);
        }
        Stability::Degenerate => {
            let _ = write!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="gray" stroke="black"/>"#);
        }
    }
    out.push_str("</g>\n");
}

fn polyline(out: &mut String, face: Face, tr: &Trajectory) {
    let stride = tr.states.len().div_ceil(MAX_POLYLINE_POINTS).max(1);
    let mut pts = String::new();
    let last = tr.states.len() - 1;
    for (i, s) in tr.states.iter().enumerate() {
        if i % stride == 0 || i == last {
            let (x, y) = position(face, &s.as_array());
            let _ = write!(pts, "{x:.2},{y:.2} ");
        }
    }
    let _ = writeln!(
        out,
        r#"<polyline class="trajectory" data-face="{face}" points="{}" fill="none" stroke="steelblue" stroke-width="1"/>"#,
        pts.trim_end()
    );
}

pub(crate) fn render(vp: &ValidatedParams, per_face: usize, max_time: f64) -> Result<Net> {
    let p = vp.params();
    let states = enumerate_stationary_states(p, vp.tol())?;
    let cfg = IntegratorConfig::default().with_max_time(max_time);

    let width = 2.0 * SCALE + 2.0 * MARGIN;
    let height_px = 2.0 * height() * SCALE + 2.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height_px:.0}" viewBox="0 0 {width:.0} {height_px:.0}" font-family="sans-serif" font-size="14">"#
    );

    for face in Face::ALL {
        let pts: Vec<String> = face
            .strategies()
            .iter()
            .map(|&s| {
                let (x, y) = to_svg(corner(face, s));
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<polygon class="face" data-face="{face}" points="{}" fill="none" stroke="black"/>"#,
            pts.join(" ")
        );
        let centroid: [f64; 4] = {
            let mut x = [0.0; 4];
            for s in face.strategies() {
                x[s.index()] = 1.0 / 3.0;
            }
            x
        };
        let (cx, cy) = position(face, &centroid);
        let _ = writeln!(
            svg,
            r#"<text class="face-label" x="{cx:.2}" y="{cy:.2}" text-anchor="middle" fill="gray">{face}</text>"#
        );
    }

    let mut csv = csv::Writer::from_writer(Vec::new());
    csv.write_record(["face", "trajectory", "t", "x1", "x2", "x3", "x4"])
        .map_err(|e| crate::Error::Io(e.to_string()))?;
    for face in Face::ALL {
        let mut starts = lattice_starts(face, per_face);
        starts.extend(outset_starts(face, &states));
        for (k, x0) in starts.iter().enumerate() {
            let tr = integrate(x0, p, &cfg)?;
            polyline(&mut svg, face, &tr);
            for (t, s) in tr.times.iter().zip(&tr.states) {
                let x = s.as_array();
                csv.write_record([
                    face.to_string(),
                    k.to_string(),
                    t.to_string(),
                    x[0].to_string(),
                    x[1].to_string(),
                    x[2].to_string(),
                    x[3].to_string(),
                ])
                .map_err(|e| crate::Error::Io(e.to_string()))?;
            }
        }
    }

    let mut drawn: Vec<(String, i64, i64)> = Vec::new();
    for face in Face::ALL {
        for s in states.iter().filter(|s| s.support.len() <= 3 && face.contains(&s.support)) {
            let pos = position(face, &s.location.as_array());
            let key = (s.label.clone(), pos.0.round() as i64, pos.1.round() as i64);
            if drawn.contains(&key) {
                continue;
            }
            drawn.push(key);
            marker(&mut svg, pos, s);
        }
        for c in face.strategies() {
            let (x, y) = to_svg(corner(face, c));
            let dy = if y > MARGIN + height() * SCALE { 22.0 } else { -12.0 };
            let _ = writeln!(
                svg,
                r#"<text class="vertex-label" x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                y + dy,
                c.vertex_label()
            );
        }
    }
    svg.push_str("</svg>\n");

    let csv = csv
        .into_inner()
        .map_err(|e| crate::Error::Io(e.to_string()))?;
    Ok(Net { svg, csv })
}
