//! Explicit Runge–Kutta steppers for small autonomous systems.

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth minus fourth order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += c * k[i];
        }
    }
    out
}

/// One classical RK4 step of size `h`.
pub(crate) fn rk4_step<const N: usize, F>(f: &F, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(&[f64; N]) -> [f64; N],
{
    let k1 = f(y);
    let k2 = f(&axpy(y, &[(0.5 * h, &k1)]));
    let k3 = f(&axpy(y, &[(0.5 * h, &k2)]));
    let k4 = f(&axpy(y, &[(h, &k3)]));
    axpy(
        y,
        &[(h / 6.0, &k1), (h / 3.0, &k2), (h / 3.0, &k3), (h / 6.0, &k4)],
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct StepUnderflow;

/// Adaptive Dormand–Prince stepper with a standard I-controller.
#[derive(Clone, Debug)]
pub(crate) struct Dopri5 {
    abs_tol: f64,
    rel_tol: f64,
    h: f64,
    min_step: f64,
}

impl Dopri5 {
    pub(crate) fn new(abs_tol: f64, rel_tol: f64) -> Self {
        Dopri5 {
            abs_tol,
            rel_tol,
            h: 1e-3,
            min_step: 1e-13,
        }
    }

    /// Takes one accepted step no longer than `h_cap`, returning its length
    /// and the new state.
    pub(crate) fn step<const N: usize, F>(
        &mut self,
        f: &F,
        y: &[f64; N],
        h_cap: f64,
    ) -> Result<(f64, [f64; N]), StepUnderflow>
    where
        F: Fn(&[f64; N]) -> [f64; N],
    {
        let k1 = f(y);
        loop {
            let h = self.h.min(h_cap);
            if h < self.min_step && h < h_cap {
                return Err(StepUnderflow);
            }
            let k2 = f(&axpy(y, &[(h * A21, &k1)]));
            let k3 = f(&axpy(y, &[(h * A31, &k1), (h * A32, &k2)]));
            let k4 = f(&axpy(y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]));
            let k5 = f(&axpy(
                y,
                &[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)],
            ));
            let k6 = f(&axpy(
                y,
                &[
                    (h * A61, &k1),
                    (h * A62, &k2),
                    (h * A63, &k3),
                    (h * A64, &k4),
                    (h * A65, &k5),
                ],
            ));
            let y_new = axpy(
                y,
                &[(h * B1, &k1), (h * B3, &k3), (h * B4, &k4), (h * B5, &k5), (h * B6, &k6)],
            );
            let k7 = f(&y_new);

            let mut acc = 0.0;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i]
                        + E7 * k7[i]);
                let scale = self.abs_tol + self.rel_tol * y[i].abs().max(y_new[i].abs());
                acc += (e / scale).powi(2);
            }
            let err = (acc / N as f64).sqrt();

            if err.is_finite() && err <= 1.0 {
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                // A step shortened by the cap says nothing about the controller.
                if h >= self.h {
                    self.h = h * factor;
                } else {
                    self.h = self.h.max(h * factor);
                }
                return Ok((h, y_new));
            }
            let factor = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.2, 1.0)
            } else {
                0.2
            };
            self.h = h * factor;
            if self.h < self.min_step {
                return Err(StepUnderflow);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_exponential_decay() {
        let f = |y: &[f64; 1]| [-0.5 * y[0]];
        let mut y = [1.0];
        for _ in 0..1000 {
            y = rk4_step(&f, &y, 0.01);
        }
        assert!((y[0] - (-5.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn dopri_harmonic_oscillator() {
        let f = |y: &[f64; 2]| [y[1], -y[0]];
        let mut s = Dopri5::new(1e-11, 1e-11);
        let mut y = [1.0, 0.0];
        let mut t = 0.0;
        let t_end = 10.0;
        while t < t_end {
            let (h, yn) = s.step(&f, &y, t_end - t).unwrap();
            t = if h == t_end - t { t_end } else { t + h };
            y = yn;
        }
        assert!((y[0] - t_end.cos()).abs() < 1e-8, "{y:?}");
        assert!((y[1] + t_end.sin()).abs() < 1e-8);
    }

    #[test]
    fn dopri_reports_underflow_on_blowup() {
        // y' = y^2 from y=1 blows up at t=1.
        let f = |y: &[f64; 1]| [y[0] * y[0]];
        let mut s = Dopri5::new(1e-9, 1e-9);
        let mut y = [1.0];
        let mut failed = false;
        for _ in 0..100_000 {
            match s.step(&f, &y, 2.0) {
                Ok((_, yn)) => y = yn,
                Err(StepUnderflow) => {
                    failed = true;
                    break;
                }
            }
        }
        assert!(failed);
    }
}
