//! Determinants from the recessive solution, integrated inward from a
//! matching radius `R` with WKB data built on the canonical action.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{DetMethod, DeterminantValue, Parity};
use crate::actions::{action_binomial, action_numeric, action_quartic};
use crate::error::{Error, Result};
use crate::ode::{propagate, OdeState, OdeStats};
use crate::trinomial::TrinomialMomentum;
use crate::wkb::{
    action_tail_from_value, action_tail_series, expansion_radius, riccati_corrections, riccati_tail_integral,
    MomentumBranch,
};

type C64 = Complex64;

/// `Theta = (M + 2) pi / (N + 2)`.
pub fn sector_theta(n: u32, m: u32) -> f64 {
    (m as f64 + 2.0) * std::f64::consts::PI / (n as f64 + 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecessiveSolution {
    pub psi0: C64,
    pub dpsi0: C64,
    /// `log psi(0)` and `log(-psi'(0))`, tracked through the log-scale.
    pub log_psi0: C64,
    pub log_minus_dpsi0: C64,
    #[serde(rename = "R")]
    pub r: f64,
    pub wkb_order: usize,
    /// `D / D_cl` at the origin for each parity: `(D^+, D^-)` over
    /// `exp(I) Pi(0)^{+-1/2}`, when `Pi(0) != 0`.
    pub jost_factor: Option<(C64, C64)>,
}

#[derive(Debug, Clone, Copy)]
pub struct RecessiveOptions {
    /// Matching radius; chosen from the expansion radius when `None`.
    pub r: Option<f64>,
    /// Skip the sector check (experimental probing beyond `Theta`).
    pub allow_outside_sector: bool,
}

impl Default for RecessiveOptions {
    fn default() -> Self {
        RecessiveOptions { r: None, allow_outside_sector: false }
    }
}

/// Canonical action for real non-negative parameters.
pub(crate) fn real_action(m: &TrinomialMomentum<f64>) -> Result<(f64, f64)> {
    let (v, lam) = (m.v().re, m.lambda().re);
    if m.n() == 4 && m.m() == 2 && m.u() == 1.0 && (v > 0.0 || lam > 0.0) {
        return Ok((action_quartic(v, lam)?.value.re, 0.0));
    }
    if m.m() == 0 || v == 0.0 {
        let a = action_binomial(m.u(), C64::new(v + lam, 0.0), m.n(), 0)?;
        return Ok((a.value.re, 0.0));
    }
    if lam == 0.0 {
        return Ok((action_binomial(m.u(), m.v(), m.n(), m.m())?.value.re, 0.0));
    }
    let a = action_numeric(m, 1e-9)?;
    Ok((a.value.re, a.error_estimate))
}

fn tail_at(m: &TrinomialMomentum<f64>, branch: &MomentumBranch, r: f64) -> Result<(C64, f64)> {
    if m.residue_structurally_null() || m.n() == 2 {
        return Ok((action_tail_series(m, r)?, 0.0));
    }
    if m.is_real_nonnegative() {
        let (i, err) = real_action(m)?;
        return Ok((action_tail_from_value(branch, C64::new(i, 0.0), r)?, err));
    }
    Err(Error::Unsupported(
        "complex parameters with a non-vanishing residue: the canonical action constant is not available".into(),
    ))
}

fn solve_at(m: &TrinomialMomentum<f64>, branch: &MomentumBranch, r: f64) -> Result<(OdeState, f64)> {
    let (t, terr) = tail_at(m, branch, r)?;
    let pi_r = branch.at(r);
    let (y1, big_y) = riccati_corrections(branch, r);
    let (w, _) = riccati_tail_integral(branch, r, r)?;
    let log_psi = t - 0.5 * pi_r.ln() - w;
    let y = -pi_r + y1 + big_y;
    let init = OdeState::from_log(log_psi, y);
    let mut stats = OdeStats::default();
    let out = propagate(branch.coeffs(), C64::new(r, 0.0), C64::new(0.0, 0.0), init, &mut stats)?;
    Ok((out, terr))
}

fn check_sector(m: &TrinomialMomentum<f64>) -> Result<()> {
    if m.m() == 0 || m.v().norm() == 0.0 {
        return Ok(());
    }
    let theta = sector_theta(m.n(), m.m());
    let arg = m.v().arg().abs();
    if arg > theta * (1.0 + 1e-12) {
        return Err(Error::SectorViolation { arg, theta });
    }
    Ok(())
}

/// Recessive solution data at the origin, with an `R`-enlargement error
/// estimate on `log psi(0)`.
pub fn recessive_solution(m: &TrinomialMomentum<f64>, opts: RecessiveOptions) -> Result<(RecessiveSolution, f64)> {
    if !opts.allow_outside_sector {
        check_sector(m)?;
    }
    let branch = MomentumBranch::new(m)?;
    let r = opts.r.unwrap_or_else(|| (1.5 * expansion_radius(m, 0.05)).max(4.0));
    let (s1, terr) = solve_at(m, &branch, r)?;
    let (s2, _) = solve_at(m, &branch, 1.5 * r)?;
    let lp1 = s1.log_value();
    let ld1 = s1.log_scale + (-s1.deriv).ln();
    let lp2 = s2.log_value();
    let ld2 = s2.log_scale + (-s2.deriv).ln();
    let wrap = |z: C64| {
        let tau = 2.0 * std::f64::consts::PI;
        C64::new(z.re, z.im - tau * (z.im / tau).round())
    };
    let err = wrap(lp1 - lp2).norm().max(wrap(ld1 - ld2).norm()) + terr;
    let pi0 = branch.at(0.0);
    let jost_factor = if pi0.norm() > 0.0 && (m.is_real_nonnegative()) {
        real_action(m).ok().map(|(i, _)| {
            let cl_minus = C64::new(i, 0.0) - 0.5 * pi0.ln();
            let cl_plus = C64::new(i, 0.0) + 0.5 * pi0.ln();
            ((ld1 - cl_plus).exp(), (lp1 - cl_minus).exp())
        })
    } else {
        None
    };
    let sol = RecessiveSolution {
        psi0: lp1.exp(),
        dpsi0: -(ld1.exp()),
        log_psi0: lp1,
        log_minus_dpsi0: ld1,
        r,
        wkb_order: 1,
        jost_factor,
    };
    Ok((sol, err.max(1e-15)))
}

/// `D^-(lambda) = psi(0)`, `D^+(lambda) = -psi'(0)` for the recessive
/// solution normalized as `Pi^{-1/2} exp(I - int_0^q Pi)` at `+inf`.
pub fn det_complex(m: &TrinomialMomentum<f64>, parity: Parity, opts: RecessiveOptions) -> Result<DeterminantValue> {
    let (sol, err) = recessive_solution(m, opts)?;
    let lv = match parity {
        Parity::Even => sol.log_minus_dpsi0,
        Parity::Odd => sol.log_psi0,
    };
    Ok(DeterminantValue::from_log(lv, parity, DetMethod::RecessiveSolution, err))
}
