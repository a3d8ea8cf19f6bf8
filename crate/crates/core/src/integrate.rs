//! Dormand–Prince 5(4) integrator for the planar system `(r, ṙ)`.
//!
//! Supports forward and backward integration and can be advanced to a
//! sequence of output abscissae while keeping its step size between calls.

use crate::error::{Error, Result};

pub(crate) type State = [f64; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// 5th order weights minus embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const MAX_STEPS: usize = 200_000;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub blowup_cap: f64,
}

/// Integration state of a single trajectory.
pub(crate) struct Dopri5<F> {
    f: F,
    tol: Tolerances,
    pub t: f64,
    pub y: State,
    h: f64,
    dy: State,
    pub steps: usize,
}

#[inline]
fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for &(c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

impl<F> Dopri5<F>
where
    F: Fn(f64, &State) -> State,
{
    /// `h0` is the magnitude of the first trial step; the direction is taken
    /// from each call to [`Dopri5::advance_to`].
    pub fn new(f: F, tol: Tolerances, t0: f64, y0: State, h0: f64) -> Self {
        let dy = f(t0, &y0);
        Self {
            f,
            tol,
            t: t0,
            y: y0,
            h: h0.abs(),
            dy,
            steps: 0,
        }
    }

    fn check_escape(&self) -> Result<()> {
        let [r, rdot] = self.y;
        if !(r.is_finite() && rdot.is_finite()) || r.abs() > self.tol.blowup_cap || rdot.abs() > self.tol.blowup_cap {
            return Err(Error::TrajectoryEscaped { t: self.t, r, rdot });
        }
        Ok(())
    }

    /// Integrates until `t_end` is reached exactly.
    pub fn advance_to(&mut self, t_end: f64) -> Result<()> {
        let dir = if t_end >= self.t { 1.0 } else { -1.0 };
        let h_min = 1e-14 * self.t.abs().max(t_end.abs()).max(1e-300);
        while (t_end - self.t) * dir > 0.0 {
            if self.steps >= MAX_STEPS {
                return Err(Error::IntegratorStall { t: self.t, h: self.h });
            }
            let remaining = (t_end - self.t).abs();
            let last = self.h >= remaining;
            let h = dir * if last { remaining } else { self.h };

            let (y_new, dy_new, err) = self.trial(h);
            self.steps += 1;
            if !err.is_finite() {
                self.h *= MIN_FACTOR;
            } else if err <= 1.0 {
                self.t = if last { t_end } else { self.t + h };
                self.y = y_new;
                self.dy = dy_new;
                let factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                };
                let proposal = h.abs() * factor;
                // A step clipped at an output point keeps the previous proposal
                // unless the error estimate asks for a smaller one.
                self.h = match (last, factor >= 1.0) {
                    (false, _) => proposal,
                    (true, true) => self.h.max(proposal),
                    (true, false) => self.h.min(proposal),
                };
                self.check_escape()?;
            } else {
                self.h = h.abs() * (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
            }
            if self.h < h_min {
                return Err(Error::IntegratorStall { t: self.t, h: self.h });
            }
        }
        Ok(())
    }

    fn trial(&self, h: f64) -> (State, State, f64) {
        let (t, y, f) = (self.t, &self.y, &self.f);
        let k1 = self.dy;
        let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(
            y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = f(t + h, &y_new);
        let mut acc = 0.0;
        for i in 0..2 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.tol.abs + self.tol.rel * y[i].abs().max(y_new[i].abs());
            acc += (e / sc).powi(2);
        }
        (y_new, k7, (acc / 2.0).sqrt())
    }
}
