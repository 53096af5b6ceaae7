//! Game parameters, population states, payoffs and the static equilibrium
//! tests (Nash vertices, dominance, admissibility of a parameter set).

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for every strict inequality on parameters.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Allowed deviation of a state's coordinate sum from one.
pub const SIMPLEX_SUM_TOL: f64 = 1e-9;

/// Negative entries down to this magnitude are treated as rounding noise.
pub const NEGATIVE_CLAMP: f64 = 1e-12;

/// The four strategies, in coordinate order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    /// Offline-only interaction.
    O,
    /// Online and offline, uncivil online.
    H,
    /// Online and offline, polite online.
    P,
    /// No social participation.
    N,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::O, Strategy::H, Strategy::P, Strategy::N];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Strategy {
        Strategy::ALL[i]
    }

    pub fn letter(self) -> char {
        match self {
            Strategy::O => 'O',
            Strategy::H => 'H',
            Strategy::P => 'P',
            Strategy::N => 'N',
        }
    }

    /// Label of the pure population state, e.g. `Ô`.
    pub fn vertex_label(self) -> &'static str {
        match self {
            Strategy::O => "Ô",
            Strategy::H => "Ĥ",
            Strategy::P => "P̂",
            Strategy::N => "N̂",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Concatenated letters of a support set in coordinate order, e.g. `"HP"`.
pub fn support_label(support: &[Strategy]) -> String {
    let mut s: Vec<Strategy> = support.to_vec();
    s.sort();
    s.iter().map(|s| s.letter()).collect()
}

/// The six payoff parameters of one game instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// O meeting O.
    pub alpha: f64,
    /// H meeting H.
    pub beta: f64,
    /// H meeting P.
    pub gamma: f64,
    /// Magnitude of the loss of P meeting H.
    pub delta: f64,
    /// P meeting P.
    pub epsilon: f64,
    /// Constant payoff of N.
    pub eta: f64,
}

impl Params {
    pub const NAMES: [&'static str; 6] = ["alpha", "beta", "gamma", "delta", "epsilon", "eta"];

    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64, epsilon: f64, eta: f64) -> Self {
        Params {
            alpha,
            beta,
            gamma,
            delta,
            epsilon,
            eta,
        }
    }

    pub fn get(&self, name: &str) -> Result<f64> {
        Ok(match name {
            "alpha" => self.alpha,
            "beta" => self.beta,
            "gamma" => self.gamma,
            "delta" => self.delta,
            "epsilon" => self.epsilon,
            "eta" => self.eta,
            _ => return Err(Error::UnknownParameter(name.to_string())),
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "alpha" => &mut self.alpha,
            "beta" => &mut self.beta,
            "gamma" => &mut self.gamma,
            "delta" => &mut self.delta,
            "epsilon" => &mut self.epsilon,
            "eta" => &mut self.eta,
            _ => return Err(Error::UnknownParameter(name.to_string())),
        };
        *slot = value;
        Ok(())
    }

    pub fn with(mut self, name: &str, value: f64) -> Result<Self> {
        self.set(name, value)?;
        Ok(self)
    }

    pub fn payoff_matrix(&self) -> PayoffMatrix {
        let Params {
            alpha: a,
            beta: b,
            gamma: g,
            delta: d,
            epsilon: e,
            eta: n,
        } = *self;
        PayoffMatrix {
            entries: [
                [a, 0.0, 0.0, 0.0],
                [0.0, b, g, 0.0],
                [0.0, -d, e, 0.0],
                [n, n, n, n],
            ],
        }
    }

    /// Share of H at the H–P coexistence state: `(ε−γ)/(β+δ+ε−γ)`.
    pub fn coexistence_share(&self) -> f64 {
        (self.epsilon - self.gamma) / (self.beta + self.delta + self.epsilon - self.gamma)
    }

    /// Common payoff at the H–P coexistence state: `(βε+γδ)/(β+δ+ε−γ)`.
    pub fn coexistence_payoff(&self) -> f64 {
        (self.beta * self.epsilon + self.gamma * self.delta)
            / (self.beta + self.delta + self.epsilon - self.gamma)
    }

    /// `βε + γδ`, the sign that separates the paired phase portraits.
    pub fn cross_term(&self) -> f64 {
        self.beta * self.epsilon + self.gamma * self.delta
    }
}

/// Payoff of each focal strategy (rows) against a homogeneous population
/// playing each strategy (columns).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    pub entries: [[f64; 4]; 4],
}

impl PayoffMatrix {
    pub fn entry(&self, focal: Strategy, population: Strategy) -> f64 {
        self.entries[focal.index()][population.index()]
    }
}

/// A point of the 3-simplex of strategy shares `(x1, x2, x3, x4)` for
/// `(O, H, P, N)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct SimplexState([f64; 4]);

impl SimplexState {
    /// Checks nonnegativity and the unit sum. Entries in `[-1e-12, 0)` are
    /// clamped to zero.
    pub fn new(mut x: [f64; 4]) -> Result<Self> {
        for v in x.iter_mut() {
            if !v.is_finite() {
                return Err(Error::InvalidState(format!("non-finite coordinate {v}")));
            }
            if *v < 0.0 {
                if *v >= -NEGATIVE_CLAMP {
                    *v = 0.0;
                } else {
                    return Err(Error::InvalidState(format!("negative coordinate {v}")));
                }
            }
        }
        let sum: f64 = x.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
            return Err(Error::InvalidState(format!("coordinates sum to {sum}")));
        }
        Ok(SimplexState(x))
    }

    /// Scales a nonnegative vector onto the simplex.
    pub fn normalized(x: [f64; 4]) -> Result<Self> {
        let sum: f64 = x.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::InvalidState(format!("cannot normalize {x:?}")));
        }
        SimplexState::new(x.map(|v| v / sum))
    }

    pub fn vertex(s: Strategy) -> Self {
        let mut x = [0.0; 4];
        x[s.index()] = 1.0;
        SimplexState(x)
    }

    /// Caller guarantees the invariants.
    pub(crate) fn from_raw(x: [f64; 4]) -> Self {
        debug_assert!(x.iter().all(|v| *v >= 0.0));
        debug_assert!((x.iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_SUM_TOL);
        SimplexState(x)
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.0
    }

    pub fn share(&self, s: Strategy) -> f64 {
        self.0[s.index()]
    }

    pub fn x1(&self) -> f64 {
        self.0[0]
    }
    pub fn x2(&self) -> f64 {
        self.0[1]
    }
    pub fn x3(&self) -> f64 {
        self.0[2]
    }
    pub fn x4(&self) -> f64 {
        self.0[3]
    }

    /// Strategies with a strictly positive share.
    pub fn support(&self) -> Vec<Strategy> {
        Strategy::ALL
            .into_iter()
            .filter(|s| self.0[s.index()] > 0.0)
            .collect()
    }

    pub fn max_norm_distance(&self, other: &SimplexState) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<[f64; 4]> for SimplexState {
    type Error = Error;
    fn try_from(x: [f64; 4]) -> Result<Self> {
        SimplexState::new(x)
    }
}

impl From<SimplexState> for [f64; 4] {
    fn from(s: SimplexState) -> [f64; 4] {
        s.0
    }
}

/// Payoffs evaluated on an arbitrary vector; the formulas read only the
/// first three coordinates.
pub(crate) fn payoffs_raw(x: &[f64; 4], p: &Params) -> [f64; 4] {
    [
        p.alpha * x[0],
        p.beta * x[1] + p.gamma * x[2],
        -p.delta * x[1] + p.epsilon * x[2],
        p.eta,
    ]
}

pub(crate) fn average_raw(x: &[f64; 4], pay: &[f64; 4]) -> f64 {
    x.iter().zip(pay.iter()).map(|(a, b)| a * b).sum()
}

/// `(Π_O, Π_H, Π_P, Π_N)` at `state`.
pub fn payoff_vector(state: &SimplexState, p: &Params) -> [f64; 4] {
    payoffs_raw(&state.0, p)
}

/// Population-wide average payoff.
pub fn average_payoff(state: &SimplexState, p: &Params) -> f64 {
    average_raw(&state.0, &payoff_vector(state, p))
}

/// Which half of the non-dominance condition holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `β > −δ` and `γ < ε`.
    #[serde(rename = "B-plus")]
    BPlus,
    /// `β < −δ` and `γ > ε`.
    #[serde(rename = "B-minus")]
    BMinus,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::BPlus => "B-plus",
            Branch::BMinus => "B-minus",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub positivity_ok: bool,
    pub nondominance_ok: bool,
    pub branch: Option<Branch>,
    pub degenerate_quantities: Vec<String>,
    pub messages: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.positivity_ok && self.nondominance_ok && self.degenerate_quantities.is_empty()
    }
}

/// Every quantity whose sign feeds a classification decision, by name.
/// Quantities that only matter inside a sub-case are listed only when that
/// sub-case applies.
pub fn classifying_quantities(p: &Params, tol: f64) -> Vec<(&'static str, f64)> {
    let Params {
        alpha,
        beta,
        gamma,
        delta,
        epsilon,
        eta,
    } = *p;
    let denom9 = epsilon - gamma + beta + delta;
    let mut q = vec![
        ("beta+delta", beta + delta),
        ("epsilon-gamma", epsilon - gamma),
        ("beta*epsilon+gamma*delta", p.cross_term()),
        ("alpha-eta", alpha - eta),
        ("epsilon-eta", epsilon - eta),
        ("max(beta,gamma)-eta", beta.max(gamma) - eta),
        ("beta", beta),
        ("beta-eta", beta - eta),
        ("epsilon-gamma+beta+delta", denom9),
        ("alpha+epsilon", alpha + epsilon),
    ];
    if denom9.abs() > tol {
        q.push(("coexistence payoff-eta", p.coexistence_payoff() - eta));
    }
    if alpha + epsilon > tol {
        q.push(("alpha*epsilon/(alpha+epsilon)-eta", alpha * epsilon / (alpha + epsilon) - eta));
    }
    if beta - eta > tol {
        q.push(("alpha+beta", alpha + beta));
        q.push(("alpha*beta/(alpha+beta)-eta", alpha * beta / (alpha + beta) - eta));
    }
    q
}

/// Checks positivity, strict non-dominance and robustness of `p`.
pub fn validate(p: &Params, tol: f64) -> ValidationReport {
    let mut messages = Vec::new();
    let values = [p.alpha, p.beta, p.gamma, p.delta, p.epsilon, p.eta];
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return ValidationReport {
            positivity_ok: false,
            nondominance_ok: false,
            branch: None,
            degenerate_quantities: Vec::new(),
            messages: vec![format!("{} is not finite", Params::NAMES[i])],
        };
    }

    let mut positivity_ok = true;
    for (name, v) in [
        ("alpha", p.alpha),
        ("delta", p.delta),
        ("epsilon", p.epsilon),
        ("eta", p.eta),
    ] {
        if v <= tol {
            positivity_ok = false;
            messages.push(format!("{name} must be positive, got {v}"));
        }
    }

    let mut nondominance_ok = true;
    for (label, v) in [
        ("alpha > eta", p.alpha - p.eta),
        ("epsilon > eta", p.epsilon - p.eta),
        ("max(beta, gamma) > eta", p.beta.max(p.gamma) - p.eta),
    ] {
        if v <= tol {
            nondominance_ok = false;
            messages.push(format!("{label} fails ({v:+})"));
        }
    }
    let bd = p.beta + p.delta;
    let eg = p.epsilon - p.gamma;
    let branch = if bd > tol && eg > tol {
        Some(Branch::BPlus)
    } else if bd < -tol && eg < -tol {
        Some(Branch::BMinus)
    } else {
        nondominance_ok = false;
        messages.push(format!(
            "need beta > -delta with gamma < epsilon, or beta < -delta with gamma > epsilon \
             (beta+delta = {bd:+}, epsilon-gamma = {eg:+})"
        ));
        None
    };

    let degenerate_quantities: Vec<String> = classifying_quantities(p, tol)
        .into_iter()
        .filter(|(_, v)| v.abs() <= tol)
        .map(|(name, _)| name.to_string())
        .collect();
    if !degenerate_quantities.is_empty() {
        messages.push(format!(
            "non-robust regime, at zero: {}",
            degenerate_quantities.join(", ")
        ));
    }

    ValidationReport {
        positivity_ok,
        nondominance_ok,
        branch: if nondominance_ok { branch } else { None },
        degenerate_quantities,
        messages,
    }
}

/// Parameters that passed [`validate`] with no degeneracies. Every
/// classification entry point takes this type.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidatedParams {
    params: Params,
    tol: f64,
    report: ValidationReport,
}

impl ValidatedParams {
    pub fn new(params: Params, tol: f64) -> Result<Self> {
        let report = validate(&params, tol);
        if !report.degenerate_quantities.is_empty() {
            return Err(Error::Degenerate(report.degenerate_quantities));
        }
        if !report.positivity_ok || !report.nondominance_ok {
            return Err(Error::InvalidParams(Box::new(report)));
        }
        Ok(ValidatedParams {
            params,
            tol,
            report,
        })
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn branch(&self) -> Branch {
        self.report
            .branch
            .expect("validated parameters always carry a branch")
    }
}

impl Deref for ValidatedParams {
    type Target = Params;
    fn deref(&self) -> &Params {
        &self.params
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NashVertex {
    pub strategy: Strategy,
    pub nash: bool,
}

/// Nash status of the four pure population states.
pub fn nash_vertices(p: &Params, tol: f64) -> Result<Vec<NashVertex>> {
    let checks = [
        ("alpha-eta", p.alpha - p.eta),
        ("beta-eta", p.beta - p.eta),
        ("epsilon-gamma", p.epsilon - p.gamma),
        ("epsilon-eta", p.epsilon - p.eta),
    ];
    let degenerate: Vec<String> = checks
        .iter()
        .filter(|(_, v)| v.abs() <= tol)
        .map(|(n, _)| n.to_string())
        .collect();
    if !degenerate.is_empty() {
        return Err(Error::Degenerate(degenerate));
    }
    Ok(vec![
        NashVertex {
            strategy: Strategy::O,
            nash: p.alpha > p.eta,
        },
        NashVertex {
            strategy: Strategy::H,
            nash: p.beta > p.eta,
        },
        NashVertex {
            strategy: Strategy::P,
            nash: p.epsilon > p.gamma && p.epsilon > p.eta,
        },
        NashVertex {
            strategy: Strategy::N,
            nash: true,
        },
    ])
}

/// `(dominated, dominating)` pairs among pure strategies, weak inequalities.
pub fn dominance_relations(p: &Params) -> Vec<(Strategy, Strategy)> {
    use Strategy::*;
    let mut out = Vec::new();
    if p.alpha <= p.eta {
        out.push((O, N));
    }
    if p.eta >= p.beta.max(p.gamma) {
        out.push((H, N));
    }
    if p.beta <= -p.delta && p.gamma <= p.epsilon {
        out.push((H, P));
    }
    if p.epsilon <= p.eta {
        out.push((P, N));
    }
    if p.beta >= -p.delta && p.gamma >= p.epsilon {
        out.push((P, H));
    }
    out
}
