//! Stationary states: closed forms from the eigenvalue propositions and a
//! generic enumeration over all supports.

use nalgebra::{DMatrix, DVector};

use super::jacobian::support_jacobian;
use super::{EigenSign, Face, Sign, StationaryState, NUMERIC_SIGN_FLOOR};
use crate::error::{Error, Result};
use crate::model::{payoffs_raw, Params, SimplexState, Strategy, ValidatedParams};

fn degenerate_check(quantities: &[(&str, f64)], tol: f64) -> Result<()> {
    let bad: Vec<String> = quantities
        .iter()
        .filter(|(_, v)| v.abs() <= tol)
        .map(|(n, _)| n.to_string())
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Degenerate(bad))
    }
}

fn toward(s: Strategy) -> String {
    format!("toward {s}")
}

fn location_on(support: &[(Strategy, f64)]) -> Result<SimplexState> {
    let mut x = [0.0; 4];
    for &(s, v) in support {
        x[s.index()] = v;
    }
    SimplexState::new(x)
}

/// Pure state `s` with one eigen-direction toward each other strategy in
/// `within`; the eigenvalue toward `j` is `M[j][s] − M[s][s]`.
pub fn vertex_state(s: Strategy, p: &Params, within: &[Strategy], tol: f64) -> StationaryState {
    let m = p.payoff_matrix().entries;
    let i = s.index();
    let signs = within
        .iter()
        .filter(|&&j| j != s)
        .map(|&j| EigenSign::new(toward(j), m[j.index()][i] - m[i][i], tol))
        .collect();
    StationaryState::build(SimplexState::vertex(s), vec![s], signs, m[i][i])
}

/// The equal-payoff state in the open edge between `i` and `j`, if any, with
/// its along-edge eigenvalue and one transversal eigenvalue per other
/// strategy in `within`.
pub fn edge_state(
    i: Strategy,
    j: Strategy,
    p: &Params,
    within: &[Strategy],
    tol: f64,
) -> Option<StationaryState> {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    let m = p.payoff_matrix().entries;
    let (ii, jj) = (i.index(), j.index());
    // Π_i − Π_j = a t + b (1 − t) with t = x_i.
    let a = m[ii][ii] - m[jj][ii];
    let b = m[ii][jj] - m[jj][jj];
    let slope = a - b;
    if slope.abs() <= tol {
        return None;
    }
    let t = -b / slope;
    if !(t > tol && t < 1.0 - tol) {
        return None;
    }
    let mut x = [0.0; 4];
    x[ii] = t;
    x[jj] = 1.0 - t;
    let location = SimplexState::new(x).ok()?;
    let pay = payoffs_raw(&location.as_array(), p);
    let common = pay[ii];
    let mut signs = vec![EigenSign::new(
        format!("along {i}-{j}"),
        t * (1.0 - t) * slope,
        tol,
    )];
    for &k in within {
        if k != i && k != j {
            signs.push(EigenSign::new(toward(k), pay[k.index()] - common, tol));
        }
    }
    Some(StationaryState::build(location, vec![i, j], signs, common))
}

/// Eigen-signs of Ô, Ĥ and P̂ inside the face without N, from the closed
/// forms in the normalized matrix.
pub fn vertex_eigensigns(vp: &ValidatedParams) -> Result<Vec<StationaryState>> {
    use Strategy::*;
    let p = vp.params();
    let tol = vp.tol();
    let table = [
        (O, p.alpha, [(H, -p.alpha), (P, -p.alpha)]),
        (H, p.beta, [(O, -p.beta), (P, -p.beta - p.delta)]),
        (P, p.epsilon, [(O, -p.epsilon), (H, p.gamma - p.epsilon)]),
    ];
    let mut out = Vec::new();
    for (s, payoff, dirs) in table {
        degenerate_check(
            &dirs.map(|(_, v)| (s.vertex_label(), v)),
            tol,
        )?;
        let signs = dirs
            .iter()
            .map(|&(d, v)| EigenSign::new(toward(d), v, tol))
            .collect();
        out.push(StationaryState::build(SimplexState::vertex(s), vec![s], signs, payoff));
    }
    Ok(out)
}

/// States in the open edges Ô–Ĥ, Ô–P̂ and Ĥ–P̂ of the face without N.
/// Transversal values are the closed-form sign carriers; along-edge values
/// are the exact eigenvalues.
pub fn edge_interior_states(vp: &ValidatedParams) -> Result<Vec<StationaryState>> {
    use Strategy::*;
    let p = vp.params();
    let tol = vp.tol();
    let Params {
        alpha,
        beta,
        gamma,
        delta,
        epsilon,
        ..
    } = *p;
    degenerate_check(
        &[
            ("beta", beta),
            ("beta+delta", beta + delta),
            ("epsilon-gamma", epsilon - gamma),
            ("beta*epsilon+gamma*delta", p.cross_term()),
        ],
        tol,
    )?;

    let mut out = Vec::new();
    if beta > 0.0 {
        let s = alpha + beta;
        let (x1, x2) = (beta / s, alpha / s);
        out.push(StationaryState::build(
            location_on(&[(O, x1), (H, x2)])?,
            vec![O, H],
            vec![
                EigenSign::new("along O-H", x1 * x2 * s, tol),
                EigenSign::new(toward(P), -(alpha / beta) * (beta + delta), tol),
            ],
            alpha * x1,
        ));
    }

    let s = alpha + epsilon;
    let (x1, x3) = (epsilon / s, alpha / s);
    out.push(StationaryState::build(
        location_on(&[(O, x1), (P, x3)])?,
        vec![O, P],
        vec![
            EigenSign::new("along O-P", x1 * x3 * s, tol),
            EigenSign::new(toward(H), (alpha / epsilon) * (gamma - epsilon), tol),
        ],
        alpha * x1,
    ));

    let (bd, eg) = (beta + delta, epsilon - gamma);
    let sum = bd + eg;
    let x2 = p.coexistence_share();
    out.push(StationaryState::build(
        location_on(&[(H, x2), (P, 1.0 - x2)])?,
        vec![H, P],
        vec![
            EigenSign::new("along H-P", bd * eg / sum, tol),
            EigenSign::new(toward(O), -p.cross_term() / sum, tol),
        ],
        p.coexistence_payoff(),
    ));
    Ok(out)
}

/// Solves `Π_s = v` for all `s` in `support`, with unit sum. `None` when the
/// system is singular.
fn equal_payoff_solve(p: &Params, support: &[Strategy]) -> Option<([f64; 4], f64)> {
    let m = p.payoff_matrix().entries;
    let k = support.len();
    let mut a = DMatrix::zeros(k + 1, k + 1);
    let mut rhs = DVector::zeros(k + 1);
    for (r, s) in support.iter().enumerate() {
        for (c, t) in support.iter().enumerate() {
            a[(r, c)] = m[s.index()][t.index()];
        }
        a[(r, k)] = -1.0;
    }
    for c in 0..k {
        a[(k, c)] = 1.0;
    }
    rhs[k] = 1.0;
    let lu = a.lu();
    if lu.determinant().abs() < 1e-12 {
        return None;
    }
    let sol = lu.solve(&rhs)?;
    let mut x = [0.0; 4];
    for (c, s) in support.iter().enumerate() {
        x[s.index()] = sol[c];
    }
    Some((x, sol[k]))
}

fn numeric_modes(x: &[f64; 4], p: &Params, support: &[Strategy], prefix: &str) -> Result<Vec<EigenSign>> {
    let j = support_jacobian(x, p, support)?;
    Ok(j.real_parts()
        .into_iter()
        .enumerate()
        .map(|(k, re)| EigenSign::new(format!("{prefix} {}", k + 1), re, NUMERIC_SIGN_FLOOR))
        .collect())
}

/// The state in the open face without N where O, H and P earn the same
/// payoff. Stability comes from the numeric Jacobian.
pub fn face_interior_state(vp: &ValidatedParams) -> Result<Option<StationaryState>> {
    let p = vp.params();
    let tol = vp.tol();
    let exprs = [
        ("beta*epsilon+gamma*delta", p.cross_term()),
        ("alpha*(beta+delta)", p.alpha * (p.beta + p.delta)),
        ("alpha*(epsilon-gamma)", p.alpha * (p.epsilon - p.gamma)),
    ];
    degenerate_check(&exprs, tol)?;
    let signs: Vec<Sign> = exprs.iter().map(|(_, v)| Sign::of(*v, tol)).collect();
    if signs.iter().any(|&s| s != signs[0]) {
        return Ok(None);
    }
    let support = Face::SN.strategies();
    let (x, v) = equal_payoff_solve(p, &support)
        .ok_or_else(|| Error::Degenerate(vec!["face equal-payoff system".into()]))?;
    if support.iter().any(|s| x[s.index()] <= 0.0) {
        return Err(Error::InfeasibleLocation(x));
    }
    let location = SimplexState::new(x).map_err(|_| Error::InfeasibleLocation(x))?;
    let modes = numeric_modes(&location.as_array(), p, &support, "face mode")?;
    Ok(Some(StationaryState::build(location, support.to_vec(), modes, v)))
}

/// The isolated state with all four strategies present, if it exists.
/// Always carries the analytic positive eigenvalue `η·x4/x1`.
pub fn full_interior_state(vp: &ValidatedParams) -> Result<Option<StationaryState>> {
    let p = vp.params();
    let det = p.cross_term();
    if det.abs() <= vp.tol() {
        return Ok(None);
    }
    let x1 = p.eta / p.alpha;
    let x2 = p.eta * (p.epsilon - p.gamma) / det;
    let x3 = p.eta * (p.beta + p.delta) / det;
    let x4 = 1.0 - x1 - x2 - x3;
    let x = [x1, x2, x3, x4];
    if x.iter().any(|&v| v <= vp.tol()) {
        return Ok(None);
    }
    let location = SimplexState::new(x)?;
    let modes = numeric_modes(&x, p, &Strategy::ALL, "mode")?;
    let mut state = StationaryState::build(location, Strategy::ALL.to_vec(), modes, p.eta);
    state.unstable_rate = Some(p.eta * x4 / x1);
    Ok(Some(state))
}

/// Every isolated stationary state of the full simplex, by support, with
/// eigen-signs in the full tangent space: exact transversal and along-edge
/// eigenvalues, numeric ones inside faces and the interior.
pub fn enumerate_stationary_states(p: &Params, tol: f64) -> Result<Vec<StationaryState>> {
    let mut out = Vec::new();
    for mask in 1u8..16 {
        let support: Vec<Strategy> = Strategy::ALL
            .into_iter()
            .filter(|s| mask & (1 << s.index()) != 0)
            .collect();
        match support.len() {
            1 => out.push(vertex_state(support[0], p, &Strategy::ALL, tol)),
            2 => out.extend(edge_state(support[0], support[1], p, &Strategy::ALL, tol)),
            n => {
                let Some((x, v)) = equal_payoff_solve(p, &support) else {
                    continue;
                };
                if support.iter().any(|s| x[s.index()] <= tol) {
                    continue;
                }
                let location = SimplexState::new(x)?;
                let x = location.as_array();
                let prefix = if n == 3 { "face mode" } else { "mode" };
                let mut signs = numeric_modes(&x, p, &support, prefix)?;
                let pay = payoffs_raw(&x, p);
                for k in Strategy::ALL {
                    if !support.contains(&k) {
                        signs.push(EigenSign::new(toward(k), pay[k.index()] - v, tol));
                    }
                }
                let mut state = StationaryState::build(location, support, signs, v);
                if n == 4 {
                    state.unstable_rate = Some(p.eta * x[3] / x[0]);
                }
                out.push(state);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::Stability;
    use crate::model::DEFAULT_TOL;

    fn vp(p: [f64; 6]) -> ValidatedParams {
        ValidatedParams::new(Params::new(p[0], p[1], p[2], p[3], p[4], p[5]), DEFAULT_TOL).unwrap()
    }

    fn set_a() -> ValidatedParams {
        vp([2.0, 1.0, 1.0, 1.0, 2.0, 0.5])
    }

    fn set_b() -> ValidatedParams {
        vp([2.0, -2.0, 1.5, 1.0, 1.0, 0.2])
    }

    fn set_c() -> ValidatedParams {
        vp([2.0, -0.5, 1.2, 1.0, 2.0, 0.3])
    }

    fn signs(s: &StationaryState) -> Vec<Sign> {
        s.eigen_signs.iter().map(|e| e.sign).collect()
    }

    fn close(a: [f64; 4], b: [f64; 4], tol: f64) -> bool {
        a.iter().zip(&b).all(|(u, v)| (u - v).abs() <= tol)
    }

    #[test]
    fn vertex_signs_set_a_all_attractive() {
        let v = vertex_eigensigns(&set_a()).unwrap();
        assert!(v.iter().all(|s| s.stability == Stability::Attractive));
    }

    #[test]
    fn vertex_signs_set_b() {
        let v = vertex_eigensigns(&set_b()).unwrap();
        assert_eq!(v[0].stability, Stability::Attractive);
        assert_eq!(signs(&v[1]), vec![Sign::Positive, Sign::Positive]);
        assert_eq!(v[1].stability, Stability::Repulsive);
        assert_eq!(signs(&v[2]), vec![Sign::Negative, Sign::Positive]);
        assert_eq!(v[2].stability, Stability::Saddle);
    }

    #[test]
    fn edge_states_set_a() {
        let e = edge_interior_states(&set_a()).unwrap();
        assert_eq!(e.len(), 3);
        let hp = &e[2];
        assert!(close(hp.location.as_array(), [0.0, 1.0 / 3.0, 2.0 / 3.0, 0.0], 1e-15));
        assert_eq!(signs(hp), vec![Sign::Positive, Sign::Negative]);
        assert!((hp.payoff - 1.0).abs() < 1e-15);
    }

    #[test]
    fn edge_states_set_b() {
        let e = edge_interior_states(&set_b()).unwrap();
        assert_eq!(e.len(), 2, "no O-H state when beta < 0");
        let hp = &e[1];
        assert!(close(hp.location.as_array(), [0.0, 1.0 / 3.0, 2.0 / 3.0, 0.0], 1e-15));
        assert_eq!(hp.stability, Stability::Attractive);
    }

    #[test]
    fn face_interior_examples() {
        let f = face_interior_state(&set_a()).unwrap().unwrap();
        assert!(close(f.location.as_array(), [1.0 / 3.0, 2.0 / 9.0, 4.0 / 9.0, 0.0], 1e-14));
        assert!((f.payoff - 2.0 / 3.0).abs() < 1e-14);

        let f = face_interior_state(&set_b()).unwrap().unwrap();
        assert!(close(f.location.as_array(), [1.0 / 7.0, 2.0 / 7.0, 4.0 / 7.0, 0.0], 1e-14));
        assert_eq!(f.stability, Stability::Saddle);

        assert!(face_interior_state(&set_c()).unwrap().is_some());
    }

    #[test]
    fn full_interior_examples() {
        let f = full_interior_state(&set_a()).unwrap().unwrap();
        assert!(close(f.location.as_array(), [0.25, 1.0 / 6.0, 1.0 / 3.0, 0.25], 1e-14));
        assert!((f.unstable_rate.unwrap() - 0.5).abs() < 1e-14);
        assert_ne!(f.stability, Stability::Attractive);

        let f = full_interior_state(&set_b()).unwrap().unwrap();
        assert!(close(f.location.as_array(), [0.1, 0.2, 0.4, 0.3], 1e-14));
    }

    #[test]
    fn enumeration_contains_closed_forms() {
        let p = set_a();
        let all = enumerate_stationary_states(p.params(), p.tol()).unwrap();
        for want in [
            [0.0, 1.0 / 3.0, 2.0 / 3.0, 0.0],
            [1.0 / 3.0, 2.0 / 9.0, 4.0 / 9.0, 0.0],
            [0.25, 1.0 / 6.0, 1.0 / 3.0, 0.25],
        ] {
            assert!(all.iter().any(|s| close(s.location.as_array(), want, 1e-12)), "{want:?}");
        }
        let attractive: Vec<&str> = all
            .iter()
            .filter(|s| s.is_attractive())
            .map(|s| s.label.as_str())
            .collect();
        assert_eq!(attractive, vec!["O", "H", "P", "N"]);
    }

    #[test]
    fn edge_state_matches_closed_form_coexistence() {
        let p = set_b();
        let s = edge_state(Strategy::P, Strategy::H, p.params(), &Strategy::ALL, p.tol()).unwrap();
        assert_eq!(s.label, "HP");
        assert!((s.location.x2() - p.coexistence_share()).abs() < 1e-15);
        assert_eq!(s.stability, Stability::Attractive);
    }
}
