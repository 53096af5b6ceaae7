//! Finite-difference Jacobians at stationary points.

use nalgebra::{Complex, DMatrix};

use super::Face;
use crate::dynamics::{lv_rhs_2d, lv_rhs_3d, max_norm, replicator_field, LvState};
use crate::error::{Error, Result};
use crate::model::{Params, SimplexState, Strategy};

/// Largest field residual accepted as stationary.
pub const STATIONARY_RESIDUAL: f64 = 1e-10;

const RELATIVE_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacobianSystem {
    /// Replicator flow on one face, in the face's tangent plane.
    Face(Face),
    /// Replicator flow on the whole simplex, in its tangent space.
    Simplex,
    /// Planar Lotka–Volterra system in `(y, z)`.
    Lv2d,
    /// Lotka–Volterra system in `(y, z, w)`.
    Lv3d,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum JacobianPoint {
    Simplex(SimplexState),
    Lv(LvState),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jacobian {
    pub matrix: DMatrix<f64>,
    /// Sorted by real part, ascending.
    pub eigenvalues: Vec<Complex<f64>>,
}

impl Jacobian {
    fn from_matrix(matrix: DMatrix<f64>) -> Self {
        let mut eigenvalues: Vec<Complex<f64>> =
            matrix.clone().complex_eigenvalues().iter().copied().collect();
        eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re));
        Jacobian {
            matrix,
            eigenvalues,
        }
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|c| c.re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// `vᵀJv / vᵀv`; the eigenvalue itself when `v` is an eigenvector.
    pub fn rate_along(&self, v: &[f64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(v);
        v.dot(&(&self.matrix * &v)) / v.dot(&v)
    }
}

/// Coordinates of `e_to − e_from` in the tangent basis `e_{s_k} − e_{s_0}`,
/// `k ≥ 1`, of the given support.
pub fn tangent_direction(support: &[Strategy], from: Strategy, to: Strategy) -> Vec<f64> {
    support[1..]
        .iter()
        .map(|&s| f64::from(u8::from(s == to)) - f64::from(u8::from(s == from)))
        .collect()
}

fn step_for(v: f64) -> f64 {
    RELATIVE_STEP * v.abs().max(1.0)
}

/// Replicator Jacobian restricted to the affine hull of `support`.
pub(crate) fn support_jacobian(x: &[f64; 4], p: &Params, support: &[Strategy]) -> Result<Jacobian> {
    let residual = max_norm(&replicator_field(x, p));
    if residual > STATIONARY_RESIDUAL {
        return Err(Error::NonStationary(residual));
    }
    let m = support.len() - 1;
    let h = step_for(x.iter().fold(0.0_f64, |a, v| a.max(v.abs())));
    let basis: Vec<[f64; 4]> = support[1..]
        .iter()
        .map(|s| {
            let mut u = [0.0; 4];
            u[s.index()] = 1.0;
            u[support[0].index()] = -1.0;
            u
        })
        .collect();
    let mut j = DMatrix::zeros(m, m);
    for (c, u) in basis.iter().enumerate() {
        let plus: [f64; 4] = std::array::from_fn(|i| x[i] + h * u[i]);
        let minus: [f64; 4] = std::array::from_fn(|i| x[i] - h * u[i]);
        let fp = replicator_field(&plus, p);
        let fm = replicator_field(&minus, p);
        for (r, s) in support[1..].iter().enumerate() {
            j[(r, c)] = (fp[s.index()] - fm[s.index()]) / (2.0 * h);
        }
    }
    Ok(Jacobian::from_matrix(j))
}

fn coordinate_jacobian<const N: usize>(v: &[f64; N], f: impl Fn(&[f64; N]) -> [f64; N]) -> Result<Jacobian> {
    let residual = max_norm(&f(v));
    if residual > STATIONARY_RESIDUAL {
        return Err(Error::NonStationary(residual));
    }
    let mut j = DMatrix::zeros(N, N);
    for c in 0..N {
        let h = step_for(v[c]);
        let mut plus = *v;
        let mut minus = *v;
        plus[c] += h;
        minus[c] -= h;
        let (fp, fm) = (f(&plus), f(&minus));
        for r in 0..N {
            j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    Ok(Jacobian::from_matrix(j))
}

/// Central-difference Jacobian of `system` at a stationary `point`.
pub fn numeric_jacobian(point: &JacobianPoint, p: &Params, system: JacobianSystem) -> Result<Jacobian> {
    match (system, point) {
        (JacobianSystem::Face(face), JacobianPoint::Simplex(x)) => {
            if x.share(face.absent()) != 0.0 {
                return Err(Error::InvalidState(format!(
                    "{:?} does not lie on {face}",
                    x.as_array()
                )));
            }
            support_jacobian(&x.as_array(), p, &face.strategies())
        }
        (JacobianSystem::Simplex, JacobianPoint::Simplex(x)) => {
            support_jacobian(&x.as_array(), p, &Strategy::ALL)
        }
        (JacobianSystem::Lv2d, JacobianPoint::Lv(s)) => {
            coordinate_jacobian(&[s.y, s.z], |v| lv_rhs_2d(*v, p))
        }
        (JacobianSystem::Lv3d, JacobianPoint::Lv(s)) => coordinate_jacobian(&s.as_array(), |v| {
            lv_rhs_3d(
                &LvState {
                    y: v[0],
                    z: v[1],
                    w: v[2],
                },
                p,
            )
        }),
        (system, _) => Err(Error::InvalidState(format!(
            "point type does not match the {system:?} system"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set_a() -> Params {
        Params::new(2.0, 1.0, 1.0, 1.0, 2.0, 0.5)
    }

    #[test]
    fn h_vertex_in_face() {
        let p = set_a();
        let j = numeric_jacobian(
            &JacobianPoint::Simplex(SimplexState::vertex(Strategy::H)),
            &p,
            JacobianSystem::Face(Face::SN),
        )
        .unwrap();
        let support = Face::SN.strategies();
        let to_o = j.rate_along(&tangent_direction(&support, Strategy::H, Strategy::O));
        let to_p = j.rate_along(&tangent_direction(&support, Strategy::H, Strategy::P));
        assert!((to_o + 1.0).abs() < 1e-8);
        assert!((to_p + 2.0).abs() < 1e-8);
        assert!(j.real_parts().iter().all(|&r| r < 0.0));
    }

    #[test]
    fn lv3d_interior_has_eta_w_eigenvalue() {
        let p = set_a();
        let s = LvState::new(2.0 / 3.0, 4.0 / 3.0, 1.0).unwrap();
        let j = numeric_jacobian(&JacobianPoint::Lv(s), &p, JacobianSystem::Lv3d).unwrap();
        assert!(j
            .eigenvalues
            .iter()
            .any(|c| (c.re - 0.5).abs() < 1e-4 && c.im.abs() < 1e-4));
    }

    #[test]
    fn lv2d_origin() {
        let j = numeric_jacobian(
            &JacobianPoint::Lv(LvState::new(0.0, 0.0, 0.0).unwrap()),
            &set_a(),
            JacobianSystem::Lv2d,
        )
        .unwrap();
        assert_eq!(j.matrix.shape(), (2, 2));
        assert!(j.real_parts().iter().all(|r| (r + 2.0).abs() < 1e-8));
    }

    #[test]
    fn rejects_non_stationary_point() {
        let x = SimplexState::new([0.25; 4]).unwrap();
        assert!(matches!(
            numeric_jacobian(&JacobianPoint::Simplex(x), &set_a(), JacobianSystem::Simplex),
            Err(Error::NonStationary(_))
        ));
    }

    #[test]
    fn rejects_point_off_face() {
        let x = SimplexState::vertex(Strategy::N);
        assert!(numeric_jacobian(&JacobianPoint::Simplex(x), &set_a(), JacobianSystem::Face(Face::SN)).is_err());
    }

    #[test]
    fn tangent_coordinates() {
        let s = [Strategy::O, Strategy::H, Strategy::P];
        assert_eq!(tangent_direction(&s, Strategy::O, Strategy::H), vec![1.0, 0.0]);
        assert_eq!(tangent_direction(&s, Strategy::H, Strategy::P), vec![-1.0, 1.0]);
    }
}
