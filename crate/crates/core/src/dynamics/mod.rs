//! Replicator vector field on the simplex, the conjugate Lotka–Volterra
//! system in ratio coordinates, and numerical integration of both.

mod integrate;
pub(crate) mod ode;

pub use integrate::{
    find_attractor, integrate, integrate_at, integrate_lv, IntegratorConfig, Landing, Method,
    Trajectory, Verdict,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{average_raw, payoffs_raw, Params, SimplexState};

/// Ratios `(y, z, w) = (x2/x1, x3/x1, x4/x1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LvState {
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

impl LvState {
    pub fn new(y: f64, z: f64, w: f64) -> Result<Self> {
        for v in [y, z, w] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidState(format!("ratio coordinate {v} out of range")));
            }
        }
        Ok(LvState { y, z, w })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.y, self.z, self.w]
    }
}

/// Replicator field on all of R^4. Polynomial, so it is also usable off the
/// simplex (finite differences step outside near the boundary).
pub(crate) fn replicator_field(x: &[f64; 4], p: &Params) -> [f64; 4] {
    let pay = payoffs_raw(x, p);
    let avg = average_raw(x, &pay);
    [
        x[0] * (pay[0] - avg),
        x[1] * (pay[1] - avg),
        x[2] * (pay[2] - avg),
        x[3] * (pay[3] - avg),
    ]
}

pub(crate) fn max_norm<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `ẋ_i = x_i (Π_i − Π̄)`.
pub fn replicator_rhs(state: &SimplexState, p: &Params) -> [f64; 4] {
    replicator_field(&state.as_array(), p)
}

/// The replicator field restricted to the face where N is absent.
pub fn face_rhs(state: &SimplexState, p: &Params) -> Result<[f64; 4]> {
    if state.x4() != 0.0 {
        return Err(Error::NotOnFace(state.as_array()));
    }
    Ok(replicator_rhs(state, p))
}

/// `(ẏ, ż)` of the planar Lotka–Volterra system; independent of `w`.
pub fn lv_rhs_2d(yz: [f64; 2], p: &Params) -> [f64; 2] {
    let [y, z] = yz;
    [
        y * (-p.alpha + p.beta * y + p.gamma * z),
        z * (-p.alpha - p.delta * y + p.epsilon * z),
    ]
}

/// `(ẏ, ż, ẇ)` of the three-dimensional Lotka–Volterra system.
pub fn lv_rhs_3d(s: &LvState, p: &Params) -> [f64; 3] {
    let [dy, dz] = lv_rhs_2d([s.y, s.z], p);
    let dw = s.w * (-p.alpha + p.eta * (1.0 + s.y + s.z + s.w));
    [dy, dz, dw]
}

pub(crate) fn lv_field(v: &[f64; 3], p: &Params) -> [f64; 3] {
    lv_rhs_3d(
        &LvState {
            y: v[0],
            z: v[1],
            w: v[2],
        },
        p,
    )
}

/// Simplex to ratio chart. Undefined on the face `x1 = 0`.
pub fn to_lv(state: &SimplexState) -> Result<LvState> {
    let [x1, x2, x3, x4] = state.as_array();
    if x1 <= 0.0 {
        return Err(Error::UndefinedChart);
    }
    Ok(LvState {
        y: x2 / x1,
        z: x3 / x1,
        w: x4 / x1,
    })
}

/// Ratio chart to simplex: `(1, y, z, w) / (1 + y + z + w)`.
pub fn from_lv(s: &LvState) -> SimplexState {
    let total = 1.0 + s.y + s.z + s.w;
    let mut x = [1.0 / total, s.y / total, s.z / total, s.w / total];
    // Absorb the rounding of the sum into the largest share.
    let err = x.iter().sum::<f64>() - 1.0;
    let imax = (0..4)
        .max_by(|&i, &j| x[i].total_cmp(&x[j]))
        .unwrap_or(0);
    x[imax] -= err;
    SimplexState::from_raw(x)
}
