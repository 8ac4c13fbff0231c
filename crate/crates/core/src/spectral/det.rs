//! Zeta-regularized determinants from the spectrum, anchored on the
//! classical large-`lambda` behavior.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::{eigenvalues, ParitySpectrum};
use super::recessive::real_action;
use super::zeta::{tail_sum, zeta_zero};
use super::{DetMethod, DeterminantValue, Parity};
use crate::error::{Error, Result};
use crate::specfun::{ln_gamma, rgamma};
use crate::trinomial::TrinomialMomentum;
use crate::wkb::{riccati_corrections, riccati_tail_integral, MomentumBranch};

type C64 = Complex64;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `log(1 + z)` without cancellation for small `z`.
pub(crate) fn ln1p(z: C64) -> C64 {
    if z.norm() > 1e-2 {
        return (c(1.0) + z).ln();
    }
    let mut acc = C64::new(0.0, 0.0);
    let mut p = z;
    for k in 1..=12 {
        let term = p / k as f64;
        acc += if k % 2 == 1 { term } else { -term };
        p *= z;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetOptions {
    /// Explicit levels per parity.
    pub count: usize,
    /// Large-`lambda` anchor where the classical form is matched.
    pub anchor: f64,
    pub tol: f64,
}

impl Default for DetOptions {
    fn default() -> Self {
        DetOptions { count: 100, anchor: 400.0, tol: 1e-8 }
    }
}

/// `D_2^+(L) = 2^{1 - L/2} sqrt(pi) / Gamma((1 + L)/4)`,
/// `D_2^-(L) = 2^{-L/2} sqrt(pi) / Gamma((3 + L)/4)` for `-d^2/dq^2 + q^2 + L`.
pub fn harmonic_det(parity: Parity, lambda: C64) -> DeterminantValue {
    let (pre, shift) = match parity {
        Parity::Even => (1.0, 1.0),
        Parity::Odd => (0.0, 3.0),
    };
    let ln2 = std::f64::consts::LN_2;
    let a = (lambda + shift) / 4.0;
    let log_pref = (c(pre) - lambda / 2.0) * ln2 + 0.5 * std::f64::consts::PI.ln();
    let value = (log_pref).exp() * rgamma(a);
    let log_value = match ln_gamma(a) {
        Ok(lg) => log_pref - lg,
        Err(_) => C64::new(f64::NEG_INFINITY, 0.0),
    };
    DeterminantValue { value, log_value, parity, method: DetMethod::HarmonicClosedForm, error_estimate: 1e-14 }
}

/// Classical anchor at real `L`: `log D(L)` from the canonical action and the
/// integrated higher Riccati corrections, accurate for large `L`.
fn anchor_log(m: &TrinomialMomentum<f64>, parity: Parity, big: f64) -> Result<(f64, f64)> {
    let ml = m.with_lambda(c(big));
    let (action, aerr) = real_action(&ml)?;
    let branch = MomentumBranch::new(&ml)?;
    let pi0 = branch.at(0.0);
    let scale = big.powf(1.0 / m.n() as f64);
    let (w, werr) = riccati_tail_integral(&branch, 0.0, scale)?;
    let log_minus = c(action) - 0.5 * pi0.ln() - w;
    let lv = match parity {
        Parity::Odd => log_minus,
        Parity::Even => {
            let (y1, y) = riccati_corrections(&branch, 0.0);
            log_minus + (pi0 - y1 - y).ln()
        }
    };
    Ok((lv.re, aerr + werr))
}

/// `-sum_k h(E_k)` over the whole spectrum (explicit levels plus tail).
fn level_sum<F, G, D>(spec: &ParitySpectrum, h: F, hk: G, dh: D, p: f64) -> Result<(C64, f64)>
where
    F: Fn(f64) -> C64,
    G: Fn(f64, f64) -> C64,
    D: Fn(f64) -> C64,
{
    let head: C64 = spec.eigenvalues.iter().map(|&e| h(e)).sum();
    let (tail, err) = tail_sum(spec, hk, dh, p)?;
    Ok((head + tail, err))
}

fn log_det_anchored(spec: &ParitySpectrum, m: &TrinomialMomentum<f64>, lambda: f64, big: f64) -> Result<(f64, f64)> {
    let g0 = 1.0 / spec.weyl.growth_exponent;
    let (anchor, aerr) = anchor_log(m, spec.parity, big)?;
    if m.n() == 2 {
        // subtract the linear term so the level sum converges
        let diff = |h: f64| -> Result<f64> {
            Ok((anchor_log(m, spec.parity, big + h)?.0 - anchor_log(m, spec.parity, big - h)?.0) / (2.0 * h))
        };
        let hstep = 0.005 * big;
        let slope = (4.0 * diff(0.5 * hstep)? - diff(hstep)?) / 3.0;
        let h = |e: f64| ln1p(c((big - lambda) / (e + lambda))) + (lambda - big) / (e + big);
        let dh = |e: f64| c(1.0 / (e + big) - 1.0 / (e + lambda) - (lambda - big) / ((e + big) * (e + big)));
        let (sum, err) = level_sum(spec, h, |e, kp| h(e) * kp, dh, 2.0 - g0 + 1.0)?;
        return Ok((anchor - (big - lambda) * slope - sum.re, aerr + err));
    }
    let h = |e: f64| ln1p(c((big - lambda) / (e + lambda)));
    let dh = |e: f64| c(1.0 / (e + big) - 1.0 / (e + lambda));
    let (sum, err) = level_sum(spec, h, |e, kp| h(e) * kp, dh, 1.0 - g0 + 1.0)?;
    Ok((anchor - sum.re, aerr + err))
}

/// `log D(lambda)` for real `lambda >= 0` from a computed spectrum.
pub fn log_det_with(
    spec: &ParitySpectrum,
    m: &TrinomialMomentum<f64>,
    lambda: f64,
    opts: DetOptions,
) -> Result<DeterminantValue> {
    if m.n() == 2 && m.m() != 0 {
        return Err(Error::Domain("N = 2 needs M = 0".into()));
    }
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("log_det needs real lambda >= 0, got {lambda}")));
    }
    let big = opts.anchor.max(2.0 * lambda);
    let (a, ea) = log_det_anchored(spec, m, lambda, big)?;
    let (b, _) = log_det_anchored(spec, m, lambda, 1.5 * big)?;
    let err = ea + (a - b).abs();
    if err > opts.tol {
        return Err(Error::TailBudget { estimate: err, tol: opts.tol });
    }
    Ok(DeterminantValue::from_log(c(a), spec.parity, DetMethod::ZetaIntegrated, err))
}

/// `log D(lambda)` by integrating `Z(1, lambda)` down from the classical
/// large-`lambda` anchor.
pub fn log_det(m: &TrinomialMomentum<f64>, parity: Parity, lambda: f64, tol: f64) -> Result<DeterminantValue> {
    let opts = DetOptions { tol, ..DetOptions::default() };
    let spec = eigenvalues(m, parity, opts.count, 1e-12)?;
    log_det_with(&spec, m, lambda, opts)
}

/// `D(lambda) = D(0) prod_k (1 + lambda/lambda_k)` at complex `lambda`.
pub fn det_entire_with(
    spec: &ParitySpectrum,
    m: &TrinomialMomentum<f64>,
    lambda: C64,
    opts: DetOptions,
) -> Result<DeterminantValue> {
    if m.n() < 4 {
        return Err(Error::Domain("the product form needs N >= 4".into()));
    }
    let d0 = log_det_with(spec, m, 0.0, opts)?;
    let g0 = 1.0 / spec.weyl.growth_exponent;
    let h = |e: f64| ln1p(lambda / e);
    let dh = |e: f64| -lambda / (e * (c(e) + lambda));
    let (sum, err) = level_sum(spec, h, |e, kp| h(e) * kp, dh, 1.0 - g0 + 1.0)?;
    let err = err + d0.error_estimate;
    if err > opts.tol.max(1e-12) * 10.0 {
        return Err(Error::TailBudget { estimate: err, tol: opts.tol });
    }
    Ok(DeterminantValue::from_log(d0.log_value + sum, spec.parity, DetMethod::HadamardProduct, err))
}

pub fn det_entire(m: &TrinomialMomentum<f64>, parity: Parity, lambda: C64) -> Result<DeterminantValue> {
    let opts = DetOptions::default();
    let spec = eigenvalues(m, parity, opts.count, 1e-12)?;
    det_entire_with(&spec, m, lambda, opts)
}

/// Result of `q -> c x`: `H + lambda = r (H' + lambda')`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymanzikScaling {
    pub scaled: TrinomialMomentum<f64>,
    pub lambda_scaled: C64,
    pub r: f64,
    /// `Z'(0, lambda')` of the scaled problem for each parity.
    pub zeta0_even: C64,
    pub zeta0_odd: C64,
}

impl SymanzikScaling {
    /// `log det(H + lambda) - log det(H' + lambda') = Z'(0, lambda') log r`.
    pub fn log_factor(&self, parity: Parity) -> C64 {
        let z = match parity {
            Parity::Even => self.zeta0_even,
            Parity::Odd => self.zeta0_odd,
        };
        z * self.r.ln()
    }

    pub fn factor(&self, parity: Parity) -> C64 {
        self.log_factor(parity).exp()
    }
}

/// Normalizes the `x^M` coefficient to one (or the leading coefficient when
/// `M = 0`).
pub fn symanzik_rescale(m: &TrinomialMomentum<f64>, lambda: C64) -> Result<SymanzikScaling> {
    let (n, mm) = (m.n() as f64, m.m() as f64);
    let (r, scaled) = if m.m() == 0 {
        let r = m.u().powf(2.0 / (n + 2.0));
        let scaled = TrinomialMomentum::new(m.n(), 0, 1.0, m.v() / r, c(0.0))?;
        (r, scaled)
    } else {
        let v = m.v();
        if v.im != 0.0 || !(v.re > 0.0) {
            return Err(Error::Domain("Symanzik scaling needs v > 0".into()));
        }
        let r = v.re.powf(2.0 / (mm + 2.0));
        let u = m.u() * v.re.powf(-(n + 2.0) / (mm + 2.0));
        (r, TrinomialMomentum::new(m.n(), m.m(), u, c(1.0), c(0.0))?)
    };
    let lambda_scaled = lambda / r;
    let scaled = scaled.with_lambda(lambda_scaled);
    Ok(SymanzikScaling {
        scaled,
        lambda_scaled,
        r,
        zeta0_even: zeta_zero(&scaled, Parity::Even, lambda_scaled),
        zeta0_odd: zeta_zero(&scaled, Parity::Odd, lambda_scaled),
    })
}

/// `det[r (H + lambda)] / det(H + lambda) = r^{Z(0, lambda)}`.
pub fn scaling_factor(m: &TrinomialMomentum<f64>, parity: Parity, r: f64, lambda: C64) -> C64 {
    (zeta_zero(m, parity, lambda) * r.ln()).exp()
}
