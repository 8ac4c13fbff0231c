//! Taylor-series integrator for `psi'' = P(q) psi` with polynomial `P`,
//! along straight segments of the complex plane.
//!
//! The state carries a separate complex log-scale so that exponentially
//! large or small solutions never overflow.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly;

const ORDER: usize = 32;

/// `psi = exp(log_scale) * value`, `psi' = exp(log_scale) * deriv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState {
    pub value: Complex64,
    pub deriv: Complex64,
    pub log_scale: Complex64,
}

impl OdeState {
    pub fn new(value: Complex64, deriv: Complex64) -> Self {
        OdeState { value, deriv, log_scale: Complex64::new(0.0, 0.0) }
    }

    /// From `log psi` and the log-derivative `psi'/psi`.
    pub fn from_log(log_psi: Complex64, y: Complex64) -> Self {
        OdeState { value: Complex64::new(1.0, 0.0), deriv: y, log_scale: log_psi }
    }

    pub fn log_value(&self) -> Complex64 {
        self.log_scale + self.value.ln()
    }

    pub fn log_deriv(&self) -> Complex64 {
        self.log_scale + self.deriv.ln()
    }

    fn renormalize(&mut self) {
        let n = self.value.norm().max(self.deriv.norm());
        if n > 1e50 || (n < 1e-50 && n > 0.0) {
            self.value /= n;
            self.deriv /= n;
            self.log_scale += Complex64::new(n.ln(), 0.0);
        }
    }
}

/// Integration statistics.
#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub steps: usize,
}

fn taylor(p: &[Complex64], a0: Complex64, a1: Complex64, h: Complex64) -> (Complex64, Complex64, f64, f64) {
    let mut a = [Complex64::new(0.0, 0.0); ORDER + 1];
    a[0] = a0;
    a[1] = a1;
    for n in 0..ORDER - 1 {
        let mut s = Complex64::new(0.0, 0.0);
        for (m, pm) in p.iter().enumerate().take(n + 1) {
            s += pm * a[n - m];
        }
        a[n + 2] = s / ((n + 2) as f64 * (n + 1) as f64);
    }
    let mut psi = Complex64::new(0.0, 0.0);
    let mut dpsi = Complex64::new(0.0, 0.0);
    let mut hp = Complex64::new(1.0, 0.0);
    let mut biggest = 0.0f64;
    let mut tail = 0.0f64;
    for (n, an) in a.iter().enumerate() {
        let t = an * hp;
        biggest = biggest.max(t.norm());
        if n >= ORDER - 2 {
            tail += t.norm();
        }
        psi += t;
        if n > 0 {
            dpsi += an * (n as f64) * (hp / h);
        }
        hp *= h;
    }
    (psi, dpsi, tail, biggest)
}

/// Propagate from `from` to `to` along the straight segment.
pub fn propagate(
    p: &[Complex64],
    from: Complex64,
    to: Complex64,
    init: OdeState,
    stats: &mut OdeStats,
) -> Result<OdeState> {
    propagate_scaled(p, from, to, init, stats, 1.0)
}

/// As [`propagate`], with the trial step multiplied by `step_scale`.
pub fn propagate_scaled(
    p: &[Complex64],
    from: Complex64,
    to: Complex64,
    init: OdeState,
    stats: &mut OdeStats,
    step_scale: f64,
) -> Result<OdeState> {
    let mut st = init;
    let total = (to - from).norm();
    if total == 0.0 {
        return Ok(st);
    }
    let dir = (to - from) / total;
    let mut done = 0.0;
    while done < total {
        let q0 = from + dir * done;
        let sp = poly::shift(p, q0);
        // local length scale of the equation
        let mut kappa = 1e-3f64;
        for (m, c) in sp.iter().enumerate() {
            if c.norm() > 0.0 {
                kappa = kappa.max(c.norm().powf(1.0 / (m as f64 + 2.0)));
            }
        }
        let mut h = (2.0 * step_scale / kappa).min(total - done);
        let mut tries = 0;
        loop {
            let hc = dir * h;
            let (psi, dpsi, tail, big) = taylor(&sp, st.value, st.deriv, hc);
            if tail <= 1e-17 * big || h < 1e-300 {
                st.value = psi;
                st.deriv = dpsi;
                break;
            }
            h *= 0.5;
            tries += 1;
            if tries > 60 {
                return Err(Error::StepCollapse { re: q0.re, im: q0.im });
            }
        }
        done = if total - done - h < 1e-15 * total { total } else { done + h };
        st.renormalize();
        stats.steps += 1;
        if !(st.value.norm().is_finite() && st.deriv.norm().is_finite()) {
            return Err(Error::Numeric(format!("non-finite ODE state near q = {q0}")));
        }
    }
    Ok(st)
}
