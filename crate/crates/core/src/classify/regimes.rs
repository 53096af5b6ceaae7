//! Phase-portrait regime of each face and the global attractor set.

use serde::{Deserialize, Serialize};

use super::states::{edge_state, vertex_state};
use super::{Face, StationaryState};
use crate::error::{Error, Result};
use crate::model::{Branch, Params, Strategy, ValidatedParams, ValidationReport};
use crate::welfare::{welfare_report, WelfareReport};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRegime {
    pub edge: Face,
    /// Phase-portrait number in Bomze's classification of planar
    /// replicator systems.
    pub pp: u8,
    pub figure: String,
    /// States attractive within the face, with in-face eigen-signs.
    pub attractors: Vec<StationaryState>,
}

/// Which half of the non-dominance condition the global set comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlobalCase {
    /// `β > −δ`, `γ < ε`: Ô, P̂ and N̂ always attract.
    PoliteStable,
    /// `β < −δ`, `γ > ε`: Ĥ and P̂ never attract.
    PoliteUnstable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalRegime {
    pub case: GlobalCase,
    /// Attractors with eigen-signs in the full simplex.
    pub attractors: Vec<StationaryState>,
    pub welfare: WelfareReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub params: Params,
    pub branch: Branch,
    pub validation: ValidationReport,
    pub degenerate: bool,
    pub edges: Vec<EdgeRegime>,
    pub global: GlobalRegime,
}

impl RegimeReport {
    pub fn edge(&self, face: Face) -> &EdgeRegime {
        self.edges
            .iter()
            .find(|e| e.edge == face)
            .expect("a report carries all four faces")
    }

    /// Canonical pretty JSON; parsing and re-serializing is byte-identical.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are always serializable")
    }
}

fn check_face_conditions(face: Face, p: &Params, tol: f64) -> Result<()> {
    let mut positive: Vec<(&str, f64)> = Vec::new();
    let mut degenerate: Vec<(&str, f64)> = Vec::new();
    let (bd, eg) = (p.beta + p.delta, p.epsilon - p.gamma);
    let branch_ok = (bd > tol && eg > tol) || (bd < -tol && eg < -tol);
    match face {
        Face::SN => {
            positive.extend([("alpha", p.alpha), ("delta", p.delta), ("epsilon", p.epsilon)]);
            degenerate.extend([
                ("beta", p.beta),
                ("beta+delta", bd),
                ("epsilon-gamma", eg),
                ("beta*epsilon+gamma*delta", p.cross_term()),
            ]);
        }
        Face::SO => {
            positive.extend([
                ("delta", p.delta),
                ("epsilon", p.epsilon),
                ("eta", p.eta),
                ("epsilon-eta", p.epsilon - p.eta),
                ("max(beta,gamma)-eta", p.beta.max(p.gamma) - p.eta),
            ]);
            degenerate.extend([
                ("beta+delta", bd),
                ("epsilon-gamma", eg),
                ("epsilon-gamma+beta+delta", bd + eg),
            ]);
            if eg > 0.0 {
                degenerate.push(("beta-eta", p.beta - p.eta));
            }
            if (bd + eg).abs() > tol {
                degenerate.push(("coexistence payoff-eta", p.coexistence_payoff() - p.eta));
            }
        }
        Face::SH => {
            positive.extend([
                ("alpha", p.alpha),
                ("epsilon", p.epsilon),
                ("eta", p.eta),
                ("alpha-eta", p.alpha - p.eta),
                ("epsilon-eta", p.epsilon - p.eta),
            ]);
            degenerate.push((
                "alpha*epsilon/(alpha+epsilon)-eta",
                p.alpha * p.epsilon / (p.alpha + p.epsilon) - p.eta,
            ));
        }
        Face::SP => {
            positive.extend([("alpha", p.alpha), ("eta", p.eta), ("alpha-eta", p.alpha - p.eta)]);
            degenerate.push(("beta-eta", p.beta - p.eta));
            if p.beta - p.eta > tol {
                degenerate.push((
                    "alpha*beta/(alpha+beta)-eta",
                    p.alpha * p.beta / (p.alpha + p.beta) - p.eta,
                ));
            }
        }
    }

    let at_zero: Vec<String> = positive
        .iter()
        .chain(&degenerate)
        .filter(|(_, v)| v.abs() <= tol)
        .map(|(n, _)| n.to_string())
        .collect();
    if !at_zero.is_empty() {
        return Err(Error::Degenerate(at_zero));
    }
    let mut messages: Vec<String> = positive
        .iter()
        .filter(|(_, v)| *v < 0.0)
        .map(|(n, v)| format!("{n} must be positive on {face}, got {v}"))
        .collect();
    let needs_branch = matches!(face, Face::SN | Face::SO);
    if needs_branch && !branch_ok {
        messages.push(format!("{face} needs beta+delta and epsilon-gamma of one strict sign"));
    }
    if messages.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidParams(Box::new(ValidationReport {
            positivity_ok: false,
            nondominance_ok: false,
            branch: None,
            degenerate_quantities: Vec::new(),
            messages,
        })))
    }
}

/// Regime of one face from the parameter inequalities alone. Only the
/// conditions on the parameters that enter that face's payoffs are checked,
/// so a face can be classified even when the full game is rejected.
pub fn classify_face(face: Face, p: &Params, tol: f64) -> Result<EdgeRegime> {
    use Strategy::*;
    check_face_conditions(face, p, tol)?;
    let within = face.strategies();
    let vertex = |s| vertex_state(s, p, &within, tol);
    let coexistence = || {
        edge_state(H, P, p, &within, tol).expect("the H-P state lies in the open edge on both branches")
    };
    let beta_wins = p.beta > 0.0;
    let polite_wins = p.gamma < p.epsilon;
    let (pp, figure, attractors): (u8, &str, Vec<StationaryState>) = match face {
        Face::SN => {
            let c7 = p.cross_term() > 0.0;
            match (beta_wins, polite_wins, c7) {
                (true, true, true) => (7, "2a", vec![vertex(O), vertex(H), vertex(P)]),
                (true, true, false) => (35, "2b", vec![vertex(O), vertex(H), vertex(P)]),
                (false, true, true) => (9, "2c", vec![vertex(O), vertex(P)]),
                (false, true, false) => (37, "2d", vec![vertex(O), vertex(P)]),
                (false, false, false) => (11, "2e", vec![vertex(O), coexistence()]),
                (false, false, true) => (36, "2f", vec![vertex(O)]),
                (true, false, _) => unreachable!("beta > 0 with gamma > epsilon breaks the branch condition"),
            }
        }
        Face::SO => {
            let c9 = p.coexistence_payoff() > p.eta;
            match (polite_wins, p.beta > p.eta, c9) {
                (true, true, true) => (7, "3a", vec![vertex(H), vertex(P), vertex(N)]),
                (true, true, false) => (35, "3b", vec![vertex(H), vertex(P), vertex(N)]),
                (true, false, true) => (9, "3c", vec![vertex(P), vertex(N)]),
                (true, false, false) => (37, "3d", vec![vertex(P), vertex(N)]),
                (false, _, true) => (11, "3e", vec![coexistence(), vertex(N)]),
                (false, _, false) => (36, "3f", vec![vertex(N)]),
            }
        }
        Face::SH => {
            let c10 = p.eta < p.alpha * p.epsilon / (p.alpha + p.epsilon);
            let att = vec![vertex(O), vertex(P), vertex(N)];
            if c10 {
                (7, "4a", att)
            } else {
                (35, "4b", att)
            }
        }
        Face::SP => {
            if p.beta > p.eta {
                let att = vec![vertex(O), vertex(H), vertex(N)];
                if p.eta < p.alpha * p.beta / (p.alpha + p.beta) {
                    (7, "5a", att)
                } else {
                    (35, "5b", att)
                }
            } else {
                (37, "5c", vec![vertex(O), vertex(N)])
            }
        }
    };
    Ok(EdgeRegime {
        edge: face,
        pp,
        figure: figure.to_string(),
        attractors,
    })
}

pub fn classify_edge_sn(vp: &ValidatedParams) -> Result<EdgeRegime> {
    classify_face(Face::SN, vp.params(), vp.tol())
}

pub fn classify_edge_so(vp: &ValidatedParams) -> Result<EdgeRegime> {
    classify_face(Face::SO, vp.params(), vp.tol())
}

pub fn classify_edge_sh(vp: &ValidatedParams) -> Result<EdgeRegime> {
    classify_face(Face::SH, vp.params(), vp.tol())
}

pub fn classify_edge_sp(vp: &ValidatedParams) -> Result<EdgeRegime> {
    classify_face(Face::SP, vp.params(), vp.tol())
}

/// Composes the four face regimes: a state attracts in the full simplex iff
/// it attracts in every face that contains it.
pub fn classify_global(vp: &ValidatedParams) -> Result<RegimeReport> {
    let p = vp.params();
    let tol = vp.tol();
    let edges = Face::ALL
        .into_iter()
        .map(|f| classify_face(f, p, tol))
        .collect::<Result<Vec<_>>>()?;

    let mut candidates: Vec<StationaryState> = Strategy::ALL
        .into_iter()
        .map(|s| vertex_state(s, p, &Strategy::ALL, tol))
        .collect();
    candidates.extend(edge_state(Strategy::H, Strategy::P, p, &Strategy::ALL, tol));

    let attractors: Vec<StationaryState> = candidates
        .into_iter()
        .filter(|c| {
            edges
                .iter()
                .filter(|e| e.edge.contains(&c.support))
                .all(|e| e.attractors.iter().any(|a| a.label == c.label))
        })
        .collect();

    let case = match vp.branch() {
        Branch::BPlus => GlobalCase::PoliteStable,
        Branch::BMinus => GlobalCase::PoliteUnstable,
    };
    let welfare = welfare_report(&attractors, p, tol)?;
    Ok(RegimeReport {
        params: *p,
        branch: vp.branch(),
        validation: vp.report().clone(),
        degenerate: false,
        edges,
        global: GlobalRegime {
            case,
            attractors,
            welfare,
        },
    })
}
