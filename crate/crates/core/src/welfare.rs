//! Per-capita payoffs at stationary states and the welfare ordering of the
//! attractors.

use serde::{Deserialize, Serialize};

use crate::classify::StationaryState;
use crate::error::{Error, Result};
use crate::model::{payoff_vector, Params, Strategy};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttractorPayoff {
    pub label: String,
    pub payoff: f64,
}

/// Attractors whose payoffs agree within tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WelfareTier {
    pub payoff: f64,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WelfareReport {
    pub payoffs: Vec<AttractorPayoff>,
    /// Descending payoff; ties share a tier.
    pub ordering: Vec<WelfareTier>,
    /// N̂ is strictly worst among the attractors.
    pub trap_dominated: bool,
    /// Pairs ordered here numerically that the model leaves unranked.
    pub incomparable_pairs: Vec<[String; 2]>,
}

/// Common payoff at a stationary state: the diagonal entry at a vertex, the
/// closed form at the H–P coexistence state, the evaluated payoff elsewhere.
pub fn stationary_payoff(s: &StationaryState, p: &Params) -> f64 {
    match s.support.as_slice() {
        [v] => p.payoff_matrix().entry(*v, *v),
        [Strategy::H, Strategy::P] => p.coexistence_payoff(),
        support => payoff_vector(&s.location, p)[support[0].index()],
    }
}

fn tie(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Orders `attractors` by payoff and checks the inequalities the model
/// guarantees between them.
pub fn welfare_report(attractors: &[StationaryState], p: &Params, tol: f64) -> Result<WelfareReport> {
    let payoffs: Vec<AttractorPayoff> = attractors
        .iter()
        .map(|s| AttractorPayoff {
            label: s.label.clone(),
            payoff: stationary_payoff(s, p),
        })
        .collect();

    let mut sorted = payoffs.clone();
    sorted.sort_by(|a, b| b.payoff.total_cmp(&a.payoff));
    let mut ordering: Vec<WelfareTier> = Vec::new();
    for ap in sorted {
        match ordering.last_mut() {
            Some(t) if tie(t.payoff, ap.payoff, tol) => t.labels.push(ap.label),
            _ => ordering.push(WelfareTier {
                payoff: ap.payoff,
                labels: vec![ap.label],
            }),
        }
    }

    let trap = payoffs.iter().find(|a| a.label == "N");
    let trap_dominated = match trap {
        Some(n) => payoffs
            .iter()
            .filter(|a| a.label != "N")
            .all(|a| a.payoff > n.payoff && !tie(a.payoff, n.payoff, tol)),
        None => true,
    };
    if trap.is_some() && !trap_dominated {
        return Err(Error::OrderingViolation(format!(
            "eta = {} is not strictly below every other attractor payoff",
            p.eta
        )));
    }

    let mut incomparable_pairs = Vec::new();
    if let Some(c) = payoffs.iter().find(|a| a.label == "HP") {
        if !(p.epsilon > c.payoff && c.payoff > p.beta) {
            return Err(Error::OrderingViolation(format!(
                "coexistence payoff {} not strictly between beta = {} and epsilon = {}",
                c.payoff, p.beta, p.epsilon
            )));
        }
        if c.payoff <= p.eta {
            return Err(Error::OrderingViolation(format!(
                "coexistence payoff {} does not exceed eta = {}",
                c.payoff, p.eta
            )));
        }
        if payoffs.iter().any(|a| a.label == "O") {
            incomparable_pairs.push(["O".to_string(), "HP".to_string()]);
        }
    }

    Ok(WelfareReport {
        payoffs,
        ordering,
        trap_dominated,
        incomparable_pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify_global, vertex_state};
    use crate::model::{SimplexState, ValidatedParams, DEFAULT_TOL};

    fn report(p: [f64; 6]) -> WelfareReport {
        let vp = ValidatedParams::new(Params::new(p[0], p[1], p[2], p[3], p[4], p[5]), DEFAULT_TOL)
            .unwrap();
        classify_global(&vp).unwrap().global.welfare
    }

    #[test]
    fn set_a_ordering_with_tie() {
        let w = report([2.0, 1.0, 1.0, 1.0, 2.0, 0.5]);
        let tiers: Vec<(f64, Vec<&str>)> = w
            .ordering
            .iter()
            .map(|t| (t.payoff, t.labels.iter().map(String::as_str).collect()))
            .collect();
        assert_eq!(
            tiers,
            vec![(2.0, vec!["O", "P"]), (1.0, vec!["H"]), (0.5, vec!["N"])]
        );
        assert!(w.trap_dominated);
        assert!(w.incomparable_pairs.is_empty());
    }

    #[test]
    fn set_b_ordering() {
        let w = report([2.0, -2.0, 1.5, 1.0, 1.0, 0.2]);
        let order: Vec<&str> = w.ordering.iter().map(|t| t.labels[0].as_str()).collect();
        assert_eq!(order, vec!["O", "HP", "N"]);
        assert!((w.ordering[1].payoff - 1.0 / 3.0).abs() < 1e-15);
        assert!(w.trap_dominated);
        assert_eq!(w.incomparable_pairs, vec![["O".to_string(), "HP".to_string()]]);
    }

    #[test]
    fn coexistence_payoff_matches_direct_evaluation() {
        let p = Params::new(2.0, 1.0, 1.0, 1.0, 2.0, 0.5);
        let x2 = p.coexistence_share();
        let x = SimplexState::new([0.0, x2, 1.0 - x2, 0.0]).unwrap();
        let pay = payoff_vector(&x, &p);
        assert!((pay[1] - p.coexistence_payoff()).abs() < 1e-12);
        assert!((pay[2] - p.coexistence_payoff()).abs() < 1e-12);
        assert!((p.coexistence_payoff() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_attractor_is_vacuous() {
        let p = Params::new(2.0, 1.0, 1.0, 1.0, 2.0, 0.5);
        let n = vertex_state(Strategy::N, &p, &Strategy::ALL, DEFAULT_TOL);
        let w = welfare_report(&[n], &p, DEFAULT_TOL).unwrap();
        assert!(w.trap_dominated);
        assert!(w.incomparable_pairs.is_empty());
    }

    #[test]
    fn vertex_payoffs() {
        let p = Params::new(2.0, 1.0, 1.0, 1.0, 2.0, 0.5);
        let v: Vec<f64> = Strategy::ALL
            .iter()
            .map(|&s| stationary_payoff(&vertex_state(s, &p, &Strategy::ALL, DEFAULT_TOL), &p))
            .collect();
        assert_eq!(v, vec![2.0, 1.0, 2.0, 0.5]);
    }
}
