//! Monte Carlo estimates of basin-of-attraction volumes.

use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::classify_global;
use crate::dynamics::{find_attractor, IntegratorConfig};
use crate::error::{Error, Result};
use crate::model::{SimplexState, ValidatedParams};

/// Default max-norm distance within which an endpoint counts as reaching
/// an attractor.
pub const DEFAULT_MATCH_TOL: f64 = 1e-6;

pub const SAMPLING_MEASURE: &str = "uniform (flat Dirichlet) on the open simplex";

/// The `index`-th start of the stream for `seed`. Each index has its own
/// ChaCha stream, so any subset can be regenerated independently.
pub fn sample_at(seed: u64, index: u64) -> SimplexState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    loop {
        let x: [f64; 4] = std::array::from_fn(|_| Exp1.sample(&mut rng));
        if x.iter().all(|&v| v > 0.0) {
            if let Ok(s) = SimplexState::normalized(x) {
                if s.as_array().iter().all(|&v| v > 0.0) {
                    return s;
                }
            }
        }
    }
}

/// `n` points uniform on the open simplex.
pub fn sample_simplex(n: usize, seed: u64) -> Vec<SimplexState> {
    (0..n as u64).map(|i| sample_at(seed, i)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasinEntry {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<SimplexState>,
    pub hits: usize,
    pub fraction: f64,
    /// Binomial standard error of `fraction`.
    pub std_error: f64,
}

impl BasinEntry {
    fn new(label: String, location: Option<SimplexState>, hits: usize, n: usize) -> Self {
        let fraction = hits as f64 / n as f64;
        BasinEntry {
            label,
            location,
            hits,
            fraction,
            std_error: (fraction * (1.0 - fraction) / n as f64).sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasinReport {
    pub samples: usize,
    pub seed: u64,
    pub measure: String,
    pub match_tol: f64,
    pub attractors: Vec<BasinEntry>,
    /// Starts that hit no attractor: slow convergence, a stable manifold,
    /// or an integrator failure.
    pub unresolved: BasinEntry,
}

impl BasinReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are always serializable")
    }

    pub fn entry(&self, label: &str) -> Option<&BasinEntry> {
        self.attractors.iter().find(|e| e.label == label)
    }

    /// One row per attractor plus an `unresolved` row.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["attractor", "hits", "fraction", "std_error"])?;
        for e in self.attractors.iter().chain(std::iter::once(&self.unresolved)) {
            w.write_record([
                e.label.clone(),
                e.hits.to_string(),
                e.fraction.to_string(),
                e.std_error.to_string(),
            ])?;
        }
        w.flush()
    }
}

/// Integrates `n` uniform starts and tallies which classified attractor
/// each one reaches. Runs on the current rayon pool; the result does not
/// depend on the pool size.
pub fn estimate_basins(
    vp: &ValidatedParams,
    n: usize,
    seed: u64,
    cfg: &IntegratorConfig,
    match_tol: f64,
) -> Result<BasinReport> {
    if n == 0 {
        return Err(Error::InvalidConfig("sample count must be at least 1".into()));
    }
    cfg.check()?;
    let attractors = classify_global(vp)?.global.attractors;
    let p = vp.params();

    let landings: Vec<Option<usize>> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let x0 = sample_at(seed, i);
            match find_attractor(&x0, p, &attractors, cfg, match_tol) {
                Ok(l) => Ok(l.matched),
                Err(Error::StepFailure { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;

    let mut hits = vec![0usize; attractors.len()];
    let mut unresolved = 0;
    for l in landings {
        match l {
            Some(i) => hits[i] += 1,
            None => unresolved += 1,
        }
    }
    Ok(BasinReport {
        samples: n,
        seed,
        measure: SAMPLING_MEASURE.to_string(),
        match_tol,
        attractors: attractors
            .iter()
            .zip(hits)
            .map(|(a, h)| BasinEntry::new(a.label.clone(), Some(a.location), h, n))
            .collect(),
        unresolved: BasinEntry::new("unresolved".into(), None, unresolved, n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Params, DEFAULT_TOL};

    #[test]
    fn samples_are_interior_and_deterministic() {
        let a = sample_simplex(50, 7);
        assert_eq!(a, sample_simplex(50, 7));
        assert_ne!(a, sample_simplex(50, 8));
        assert!(a.iter().all(|s| s.as_array().iter().all(|&v| v > 0.0)));
        assert_eq!(sample_simplex(1, 3)[0], sample_at(3, 0));
    }

    #[test]
    fn sample_means_are_a_quarter() {
        let s = sample_simplex(100_000, 42);
        for k in 0..4 {
            let mean = s.iter().map(|x| x.as_array()[k]).sum::<f64>() / s.len() as f64;
            assert!((mean - 0.25).abs() < 0.005, "coordinate {k}: {mean}");
        }
    }

    #[test]
    fn zero_samples_rejected() {
        let vp = ValidatedParams::new(Params::new(2.0, 1.0, 1.0, 1.0, 2.0, 0.5), DEFAULT_TOL).unwrap();
        assert!(estimate_basins(&vp, 0, 1, &IntegratorConfig::default(), DEFAULT_MATCH_TOL).is_err());
    }

    #[test]
    fn small_run_fractions_sum_to_one() {
        let vp = ValidatedParams::new(Params::new(2.0, -2.0, 1.5, 1.0, 1.0, 0.2), DEFAULT_TOL).unwrap();
        let r = estimate_basins(&vp, 64, 42, &IntegratorConfig::default(), DEFAULT_MATCH_TOL).unwrap();
        let total: f64 = r.attractors.iter().map(|e| e.fraction).sum::<f64>() + r.unresolved.fraction;
        assert!((total - 1.0).abs() < 1e-12);
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
    }
}
