#![allow(dead_code)]

use std::path::PathBuf;

use rand::Rng;
use socdyn::model::{classifying_quantities, Branch, Params, ValidatedParams, DEFAULT_TOL};

pub const SET_A: [f64; 6] = [2.0, 1.0, 1.0, 1.0, 2.0, 0.5];
pub const SET_B: [f64; 6] = [2.0, -2.0, 1.5, 1.0, 1.0, 0.2];
pub const SET_C: [f64; 6] = [2.0, -0.5, 1.2, 1.0, 2.0, 0.3];

/// Draws keep every classifying quantity at least this far from zero, so
/// finite-difference signs are unambiguous.
pub const DRAW_MARGIN: f64 = 0.02;

pub fn params(v: [f64; 6]) -> Params {
    Params::new(v[0], v[1], v[2], v[3], v[4], v[5])
}

pub fn validated(v: [f64; 6]) -> ValidatedParams {
    ValidatedParams::new(params(v), DEFAULT_TOL).expect("reference set validates")
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn well_conditioned(p: &Params) -> bool {
    classifying_quantities(p, DEFAULT_TOL)
        .iter()
        .all(|(_, q)| q.abs() > DRAW_MARGIN)
}

/// Rejection-samples a validated, well-conditioned parameter set on `branch`.
pub fn draw_params<R: Rng>(rng: &mut R, branch: Branch) -> ValidatedParams {
    loop {
        let alpha = rng.random_range(0.1..4.0);
        let delta = rng.random_range(0.1..3.0);
        let epsilon = rng.random_range(0.1..4.0);
        let eta = rng.random_range(0.05..3.0);
        let (beta, gamma) = match branch {
            Branch::BPlus => (
                rng.random_range(-delta..4.0),
                rng.random_range(-3.0..epsilon),
            ),
            Branch::BMinus => (
                rng.random_range(-6.0..-delta),
                rng.random_range(epsilon..epsilon + 4.0),
            ),
        };
        let p = Params::new(alpha, beta, gamma, delta, epsilon, eta);
        if !well_conditioned(&p) {
            continue;
        }
        if let Ok(vp) = ValidatedParams::new(p, DEFAULT_TOL) {
            debug_assert_eq!(vp.branch(), branch);
            return vp;
        }
    }
}

pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_cli(args: &[&str]) -> CliOutput {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["socdyn"];
    argv.extend_from_slice(args);
    let code = socdyn::cli::run(argv, &mut out, &mut err);
    CliOutput {
        code,
        stdout: String::from_utf8(out).expect("utf-8 stdout"),
        stderr: String::from_utf8(err).expect("utf-8 stderr"),
    }
}
