//! Stationary states of the replicator system, their eigen-sign structure,
//! the per-face phase-portrait regimes and the global attractor set.

mod jacobian;
mod regimes;
mod states;

pub use jacobian::{numeric_jacobian, tangent_direction, Jacobian, JacobianPoint, JacobianSystem};
pub use regimes::{
    classify_edge_sh, classify_edge_sn, classify_edge_so, classify_edge_sp, classify_face,
    classify_global, EdgeRegime, GlobalCase, GlobalRegime, RegimeReport,
};
pub use states::{
    edge_interior_states, edge_state, enumerate_stationary_states, face_interior_state,
    full_interior_state, vertex_eigensigns, vertex_state,
};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{Params, SimplexState, Strategy};

/// Numeric eigenvalue real parts closer to zero than this are not signed.
pub const NUMERIC_SIGN_FLOOR: f64 = 1e-7;

/// A two-dimensional face of the simplex, named by its absent strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Face {
    #[serde(rename = "S_N")]
    SN,
    #[serde(rename = "S_O")]
    SO,
    #[serde(rename = "S_H")]
    SH,
    #[serde(rename = "S_P")]
    SP,
}

impl Face {
    pub const ALL: [Face; 4] = [Face::SN, Face::SO, Face::SH, Face::SP];

    pub fn absent(self) -> Strategy {
        match self {
            Face::SN => Strategy::N,
            Face::SO => Strategy::O,
            Face::SH => Strategy::H,
            Face::SP => Strategy::P,
        }
    }

    /// The three strategies present, in coordinate order.
    pub fn strategies(self) -> [Strategy; 3] {
        let mut out = [Strategy::O; 3];
        let mut k = 0;
        for s in Strategy::ALL {
            if s != self.absent() {
                out[k] = s;
                k += 1;
            }
        }
        out
    }

    pub fn contains(self, support: &[Strategy]) -> bool {
        !support.contains(&self.absent())
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S_{}", self.absent())
    }
}

/// `B = A − (first row of A)` for the face game on `S_N`, with rows and
/// columns ordered O, H, P.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    /// The face game's payoff matrix before normalization.
    pub source: [[f64; 3]; 3],
}

impl NormalizedMatrix {
    pub fn rows(&self) -> [[f64; 3]; 3] {
        [[0.0; 3], [self.a, self.b, self.c], [self.d, self.e, self.f]]
    }
}

/// Subtracts the first row from every row; columns are unchanged up to a
/// constant, so the dynamics are too.
pub fn normalize_matrix(p: &Params) -> NormalizedMatrix {
    let m = p.payoff_matrix().entries;
    let mut source = [[0.0; 3]; 3];
    for (i, row) in source.iter_mut().enumerate() {
        row.copy_from_slice(&m[i][..3]);
    }
    let r = |i: usize, j: usize| source[i][j] - source[0][j];
    NormalizedMatrix {
        a: r(1, 0),
        b: r(1, 1),
        c: r(1, 2),
        d: r(2, 0),
        e: r(2, 1),
        f: r(2, 2),
        source,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "degenerate")]
    Degenerate,
}

impl Sign {
    pub fn of(v: f64, tol: f64) -> Sign {
        if v > tol {
            Sign::Positive
        } else if v < -tol {
            Sign::Negative
        } else {
            Sign::Degenerate
        }
    }
}

/// One eigen-direction of a stationary state. `value` has the sign of the
/// eigenvalue; for vertices and enumerated states it is the eigenvalue.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenSign {
    pub direction: String,
    pub value: f64,
    pub sign: Sign,
}

impl EigenSign {
    pub fn new(direction: impl Into<String>, value: f64, tol: f64) -> Self {
        EigenSign {
            direction: direction.into(),
            value,
            sign: Sign::of(value, tol),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    Vertex,
    EdgeInterior,
    FaceInterior,
    SimplexInterior,
}

impl StateKind {
    fn for_support(n: usize) -> StateKind {
        match n {
            1 => StateKind::Vertex,
            2 => StateKind::EdgeInterior,
            3 => StateKind::FaceInterior,
            _ => StateKind::SimplexInterior,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    Attractive,
    Saddle,
    Repulsive,
    Degenerate,
}

impl Stability {
    pub fn from_signs(signs: &[EigenSign]) -> Stability {
        if signs.iter().any(|s| s.sign == Sign::Degenerate) {
            Stability::Degenerate
        } else if signs.iter().all(|s| s.sign == Sign::Negative) {
            Stability::Attractive
        } else if signs.iter().all(|s| s.sign == Sign::Positive) {
            Stability::Repulsive
        } else {
            Stability::Saddle
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryState {
    /// Support letters in coordinate order, e.g. `"HP"`.
    pub label: String,
    pub location: SimplexState,
    pub kind: StateKind,
    pub support: Vec<Strategy>,
    pub eigen_signs: Vec<EigenSign>,
    pub stability: Stability,
    /// Common payoff of the supporting strategies.
    pub payoff: f64,
    /// The analytic positive eigenvalue `η·x4/x1` of a full-interior state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unstable_rate: Option<f64>,
}

impl StationaryState {
    pub(crate) fn build(
        location: SimplexState,
        support: Vec<Strategy>,
        eigen_signs: Vec<EigenSign>,
        payoff: f64,
    ) -> Self {
        StationaryState {
            label: crate::model::support_label(&support),
            location,
            kind: StateKind::for_support(support.len()),
            stability: Stability::from_signs(&eigen_signs),
            support,
            eigen_signs,
            payoff,
            unstable_rate: None,
        }
    }

    pub fn is_attractive(&self) -> bool {
        self.stability == Stability::Attractive
    }

    /// `Ô` for vertices, the support letters in brackets otherwise.
    pub fn display_name(&self) -> String {
        match self.support.as_slice() {
            [s] => s.vertex_label().to_string(),
            _ => format!("({})", self.label),
        }
    }
}
