use std::io::Write;

use serde::{Deserialize, Serialize};

use super::ode::{rk4_step, Dopri5};
use super::{lv_field, max_norm, replicator_field, LvState};
use crate::classify::StationaryState;
use crate::error::{Error, Result};
use crate::model::{Params, SimplexState};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Method {
    /// Classical fixed-step RK4.
    Rk4 { step: f64 },
    /// Adaptive embedded Dormand–Prince 5(4).
    Rk45 { abs_tol: f64, rel_tol: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub max_time: f64,
    /// Max-norm of the field below which the run counts as converged.
    pub convergence_threshold: f64,
    /// Shares below this are set to exactly zero after each step.
    pub extinction_floor: f64,
    /// Keep every accepted step; otherwise only the endpoints.
    pub record: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            // The absolute tolerance must sit well below the convergence
            // threshold, or a decaying share stalls at the tolerance scale.
            method: Method::Rk45 {
                abs_tol: 1e-12,
                rel_tol: 1e-10,
            },
            max_time: 1e4,
            convergence_threshold: 1e-10,
            extinction_floor: 1e-14,
            record: true,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(step: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk4 { step },
            ..Default::default()
        }
    }

    pub fn rk45(abs_tol: f64, rel_tol: f64) -> Self {
        IntegratorConfig {
            method: Method::Rk45 { abs_tol, rel_tol },
            ..Default::default()
        }
    }

    pub fn with_max_time(mut self, max_time: f64) -> Self {
        self.max_time = max_time;
        self
    }

    pub fn with_record(mut self, record: bool) -> Self {
        self.record = record;
        self
    }

    pub fn check(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive, got {v}")))
            }
        };
        match self.method {
            Method::Rk4 { step } => positive("step", step)?,
            Method::Rk45 { abs_tol, rel_tol } => {
                positive("abs_tol", abs_tol)?;
                positive("rel_tol", rel_tol)?;
            }
        }
        positive("max_time", self.max_time)?;
        positive("convergence_threshold", self.convergence_threshold)?;
        positive("extinction_floor", self.extinction_floor)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converged,
    MaxTimeReached,
    StepFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SimplexState>,
    /// Max-norm of the replicator field at the last sample.
    pub terminal_velocity: f64,
    pub verdict: Verdict,
}

impl Trajectory {
    pub fn final_state(&self) -> &SimplexState {
        self.states.last().expect("a trajectory holds at least its start")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("a trajectory holds at least its start")
    }

    /// Writes `t,x1,x2,x3,x4` rows with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x1", "x2", "x3", "x4"])?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let x = s.as_array();
            w.write_record([t, &x[0], &x[1], &x[2], &x[3]].map(|v| v.to_string()))?;
        }
        w.flush()
    }
}

/// Rescale onto the simplex, zero out extinct shares, rescale again if
/// anything was zeroed.
fn project(x: &mut [f64; 4], floor: f64) {
    let sum: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= sum);
    let mut clamped = false;
    for v in x.iter_mut() {
        if *v < floor && *v != 0.0 {
            *v = 0.0;
            clamped = true;
        }
    }
    if clamped {
        let sum: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= sum);
    }
}

struct Stepper<'a> {
    p: &'a Params,
    cfg: &'a IntegratorConfig,
    dopri: Option<Dopri5>,
    t: f64,
    x: [f64; 4],
}

impl<'a> Stepper<'a> {
    fn new(x0: &SimplexState, p: &'a Params, cfg: &'a IntegratorConfig) -> Self {
        let dopri = match cfg.method {
            Method::Rk45 { abs_tol, rel_tol } => Some(Dopri5::new(abs_tol, rel_tol)),
            Method::Rk4 { .. } => None,
        };
        Stepper {
            p,
            cfg,
            dopri,
            t: 0.0,
            x: x0.as_array(),
        }
    }

    /// One accepted step, not past `t_limit`.
    fn advance(&mut self, t_limit: f64) -> std::result::Result<(), ()> {
        let f = |x: &[f64; 4]| replicator_field(x, self.p);
        let remaining = t_limit - self.t;
        let (h, mut x) = match (&mut self.dopri, self.cfg.method) {
            (Some(d), _) => d.step(&f, &self.x, remaining).map_err(|_| ())?,
            (None, Method::Rk4 { step }) => {
                let h = step.min(remaining);
                (h, rk4_step(&f, &self.x, h))
            }
            (None, Method::Rk45 { .. }) => unreachable!(),
        };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(());
        }
        project(&mut x, self.cfg.extinction_floor);
        self.t = if h >= remaining { t_limit } else { self.t + h };
        self.x = x;
        Ok(())
    }

    fn velocity(&self) -> f64 {
        max_norm(&replicator_field(&self.x, self.p))
    }

    fn state(&self) -> SimplexState {
        SimplexState::from_raw(self.x)
    }
}

/// Integrates the replicator system from `x0` until the field norm drops
/// below the convergence threshold or `max_time` is reached.
pub fn integrate(x0: &SimplexState, p: &Params, cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.check()?;
    let mut s = Stepper::new(x0, p, cfg);
    let mut times = vec![0.0];
    let mut states = vec![*x0];
    let mut velocity = s.velocity();

    let verdict = loop {
        if velocity < cfg.convergence_threshold {
            break Verdict::Converged;
        }
        if s.t >= cfg.max_time {
            break Verdict::MaxTimeReached;
        }
        if s.advance(cfg.max_time).is_err() {
            if !cfg.record && *times.last().unwrap() != s.t {
                times.push(s.t);
                states.push(s.state());
            }
            let t = s.t;
            return Err(Error::StepFailure {
                t,
                trajectory: Box::new(Trajectory {
                    times,
                    states,
                    terminal_velocity: velocity,
                    verdict: Verdict::StepFailure,
                }),
            });
        }
        velocity = s.velocity();
        if cfg.record {
            times.push(s.t);
            states.push(s.state());
        }
    };

    if !cfg.record && s.t > 0.0 {
        times.push(s.t);
        states.push(s.state());
    }
    Ok(Trajectory {
        times,
        states,
        terminal_velocity: velocity,
        verdict,
    })
}

/// States at the requested (nondecreasing) times, stepping exactly onto each.
pub fn integrate_at(
    x0: &SimplexState,
    p: &Params,
    cfg: &IntegratorConfig,
    times: &[f64],
) -> Result<Vec<SimplexState>> {
    cfg.check()?;
    let mut s = Stepper::new(x0, p, cfg);
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        while s.t < target {
            if s.advance(target).is_err() {
                let trajectory = Trajectory {
                    times: vec![s.t],
                    states: vec![s.state()],
                    terminal_velocity: s.velocity(),
                    verdict: Verdict::StepFailure,
                };
                return Err(Error::StepFailure {
                    t: s.t,
                    trajectory: Box::new(trajectory),
                });
            }
        }
        out.push(s.state());
    }
    Ok(out)
}

/// Integrates the three-dimensional Lotka–Volterra system and reports the
/// ratio state at the requested replicator times.
///
/// The conjugacy with the replicator flow carries the time change
/// `dτ = x1 dt`; the field is integrated in the replicator clock, i.e.
/// scaled by `x1 = 1 / (1 + y + z + w)`, so outputs line up with
/// [`integrate_at`] sample for sample.
pub fn integrate_lv(
    start: &LvState,
    p: &Params,
    times: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Vec<LvState>> {
    let f = |v: &[f64; 3]| {
        let x1 = 1.0 / (1.0 + v[0] + v[1] + v[2]);
        lv_field(v, p).map(|d| d * x1)
    };
    let mut stepper = Dopri5::new(abs_tol, rel_tol);
    let mut t = 0.0;
    let mut v = start.as_array();
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        while t < target {
            let remaining = target - t;
            let (h, vn) = stepper
                .step(&f, &v, remaining)
                .map_err(|_| Error::LvStepFailure(t))?;
            t = if h >= remaining { target } else { t + h };
            v = vn.map(|c| c.max(0.0));
        }
        out.push(LvState::new(v[0], v[1], v[2])?);
    }
    Ok(out)
}

/// Where a trajectory from some start ended up.
#[derive(Clone, Debug, PartialEq)]
pub struct Landing {
    /// Index into the attractor list, if the endpoint lies within the
    /// matching tolerance of one.
    pub matched: Option<usize>,
    pub final_state: SimplexState,
    pub final_time: f64,
    pub verdict: Verdict,
}

/// Integrates from `x0` and matches the endpoint against `attractors` in
/// max-norm.
pub fn find_attractor(
    x0: &SimplexState,
    p: &Params,
    attractors: &[StationaryState],
    cfg: &IntegratorConfig,
    match_tol: f64,
) -> Result<Landing> {
    let cfg = cfg.with_record(false);
    let traj = integrate(x0, p, &cfg)?;
    let end = *traj.final_state();
    let matched = attractors
        .iter()
        .enumerate()
        .map(|(i, a)| (i, a.location.max_norm_distance(&end)))
        .filter(|(_, d)| *d <= match_tol)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i);
    Ok(Landing {
        matched,
        final_state: end,
        final_time: traj.final_time(),
        verdict: traj.verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Strategy;

    fn set_a() -> Params {
        Params::new(2.0, 1.0, 1.0, 1.0, 2.0, 0.5)
    }

    fn st(x: [f64; 4]) -> SimplexState {
        SimplexState::new(x).unwrap()
    }

    #[test]
    fn np_edge_below_threshold_goes_to_n() {
        let tr = integrate(&st([0.0, 0.0, 0.1, 0.9]), &set_a(), &IntegratorConfig::default())
            .unwrap();
        assert_eq!(tr.verdict, Verdict::Converged, "{:?} {} {}", tr.final_state(), tr.final_time(), tr.terminal_velocity);
        assert!(tr.final_state().max_norm_distance(&SimplexState::vertex(Strategy::N)) < 1e-9);
    }

    #[test]
    fn np_edge_above_threshold_goes_to_p() {
        let tr = integrate(&st([0.0, 0.0, 0.6, 0.4]), &set_a(), &IntegratorConfig::default())
            .unwrap();
        assert_eq!(tr.verdict, Verdict::Converged);
        assert!(tr.final_state().max_norm_distance(&SimplexState::vertex(Strategy::P)) < 1e-9);
    }

    #[test]
    fn vertex_start_converges_immediately() {
        let n = SimplexState::vertex(Strategy::N);
        let tr = integrate(&n, &set_a(), &IntegratorConfig::default()).unwrap();
        assert_eq!(tr.verdict, Verdict::Converged);
        assert_eq!(tr.times, vec![0.0]);
        assert_eq!(tr.states, vec![n]);
    }

    #[test]
    fn rk4_matches_rk45_on_short_horizon() {
        let x0 = st([0.3, 0.2, 0.3, 0.2]);
        let times = [1.0, 2.0, 5.0];
        let a = integrate_at(&x0, &set_a(), &IntegratorConfig::rk4(1e-3), &times).unwrap();
        let b = integrate_at(&x0, &set_a(), &IntegratorConfig::rk45(1e-12, 1e-12), &times)
            .unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!(u.max_norm_distance(v) < 1e-10);
        }
    }

    #[test]
    fn max_time_verdict() {
        let cfg = IntegratorConfig::default().with_max_time(0.5);
        let tr = integrate(&st([0.3, 0.2, 0.3, 0.2]), &set_a(), &cfg).unwrap();
        assert_eq!(tr.verdict, Verdict::MaxTimeReached);
        assert_eq!(tr.final_time(), 0.5);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = IntegratorConfig::rk4(0.0);
        assert!(matches!(
            integrate(&st([0.25; 4]), &set_a(), &cfg),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let cfg = IntegratorConfig::rk4(0.1).with_max_time(0.3);
        let tr = integrate(&st([0.25; 4]), &set_a(), &cfg).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,x1,x2,x3,x4");
        assert_eq!(lines.len(), tr.times.len() + 1);
        assert!(lines[1].starts_with("0,0.25,"));
    }
}
