//! Canonical primitive for general even trinomials, from the convergent
//! `lambda`-derivative `dI/dlambda = 1/2 int_0^inf (V + lambda)^{-1/2} dq`.
//!
//! The integration constant is fixed by the large-`lambda` expansion of
//! `dI/dlambda`, which is a pure power series in
//! `eps = v u^{-M/N} lambda^{M/N - 1}`; its term-by-term primitive carries
//! no `lambda^0` term.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::specfun::ln_gamma;
use crate::trinomial::{gen_binomial, TrinomialMomentum};

use super::{action_binomial, ActionMethod, RegularizedAction};

const EPS_REF: f64 = 0.1;
const GRID: usize = 3;
const DILATION: f64 = 16.0;

fn check_real(m: &TrinomialMomentum<f64>) -> Result<(f64, f64, f64)> {
    if !m.is_real_nonnegative() {
        return Err(Error::Domain("numeric canonical action needs real v, lambda >= 0".into()));
    }
    Ok((m.u(), m.v().re, m.lambda().re))
}

fn ln_beta(a: f64, b: f64) -> Result<f64> {
    let lg = |x: f64| ln_gamma(Complex64::new(x, 0.0)).map(|z| z.re);
    Ok(lg(a)? + lg(b)? - lg(a + b)?)
}

/// `1/2 int_0^inf (V(q) + lambda)^{-1/2} dq` with its error estimate.
pub fn dlambda_integral(m: &TrinomialMomentum<f64>, lambda: f64) -> Result<(f64, f64)> {
    let (u, v, _) = check_real(m)?;
    if m.n() < 4 {
        return Err(Error::Domain("dI/dlambda diverges for N = 2".into()));
    }
    if !(lambda > 0.0) && !(m.m() == 0 && v > 0.0) {
        return Err(Error::Domain(format!("need lambda > 0, got {lambda}")));
    }
    let (n, mm) = (m.n() as i32, m.m() as i32);
    let nf = n as f64;
    let gap = (n - mm) as f64;
    let mut qcut = (1e4 * lambda / u).powf(1.0 / nf);
    if v > 0.0 {
        qcut = qcut.max((1e3 * v / u).powf(1.0 / gap));
    }
    let mut breaks = Vec::new();
    let mut scales = vec![(lambda / u).powf(1.0 / nf)];
    if v > 0.0 {
        scales.push((v / u).powf(1.0 / gap));
        if mm > 0 && lambda > 0.0 {
            scales.push((lambda / v).powf(1.0 / mm as f64));
        }
    }
    for s in scales {
        for f in [0.1, 0.3, 1.0, 3.0, 10.0] {
            breaks.push(s * f);
        }
    }
    let f = |q: f64| 1.0 / (u * q.powi(n) + v * q.powi(mm) + lambda).sqrt();
    let body = integrate(f, 0.0, qcut, &breaks, QuadOptions::new(0.0, 1e-15))?;

    // tail from the binomial expansion of (V + lambda)^{-1/2}
    let tm = m.with_lambda(Complex64::new(lambda, 0.0));
    let depth = 8 * m.n() as usize;
    let s1 = Complex64::new(1.0, 0.0);
    let mut tail = 0.0;
    let mut last = 0.0;
    for d in 0..=depth {
        let rho = (m.n() / 2) as i64 - d as i64;
        let b = tm.beta_coeff(rho, s1, depth)?.re;
        if b == 0.0 {
            continue;
        }
        let e = nf / 2.0 + d as f64 - 1.0;
        last = b * qcut.powf(-e) / e;
        tail += last;
    }
    let value = 0.5 * (body.value + tail);
    Ok((value, 0.5 * (body.error + last.abs() + 1e-16 * value.abs())))
}

/// Term-by-term primitive of the large-`lambda` series of `dI/dlambda`,
/// evaluated at `lambda` (must satisfy `eps(lambda)` small).
pub fn canonical_series(m: &TrinomialMomentum<f64>, lambda: f64) -> Result<f64> {
    let (u, v, _) = check_real(m)?;
    let nf = m.n() as f64;
    let mf = m.m() as f64;
    let jr = m.j_exact();
    let pref = 0.5 * u.powf(-1.0 / nf);
    let w = v * u.powf(-mf / nf);
    let half = Complex64::new(-0.5, 0.0);
    let mut acc = 0.0;
    for k in 0..400usize {
        let kf = k as f64;
        let a = (kf * mf + 1.0) / nf;
        let b = 0.5 + kf - a;
        let bk = ln_beta(a, b)?.exp() / nf;
        let coef = pref * gen_binomial(half, k).re * if k == 0 { 1.0 } else { w.powi(k as i32) } * bk;
        let e1 = 1.0 / nf + 0.5 + kf * (mf - nf) / nf;
        let term = if jr.is_integer() && jr.to_integer() == k as i64 {
            coef * lambda.ln()
        } else {
            coef * lambda.powf(e1) / e1
        };
        acc += term;
        if w == 0.0 || (k > 2 && term.abs() < 1e-18 * acc.abs()) {
            return Ok(acc);
        }
    }
    Err(Error::Numeric("large-lambda series did not converge".into()))
}

fn eps_at(m: &TrinomialMomentum<f64>, lambda: f64) -> f64 {
    let (nf, mf) = (m.n() as f64, m.m() as f64);
    m.v().re * m.u().powf(-mf / nf) * lambda.powf(mf / nf - 1.0)
}

fn integral_between(m: &TrinomialMomentum<f64>, a: f64, b: f64) -> Result<(f64, f64)> {
    let mut inner_err = 0.0f64;
    let mut fail = None;
    let g = |t: f64| {
        let x = t.exp();
        match dlambda_integral(m, x) {
            Ok((val, err)) => {
                inner_err = inner_err.max(err * x);
                val * x
            }
            Err(e) => {
                fail.get_or_insert(e);
                0.0
            }
        }
    };
    let q = integrate(g, a.ln(), b.ln(), &[], QuadOptions::new(0.0, 1e-14))?;
    if let Some(e) = fail {
        return Err(e);
    }
    Ok((q.value, q.error + inner_err * (b.ln() - a.ln()).abs()))
}

/// Canonical action by `lambda`-integration of `dI/dlambda`.
///
/// Requires real non-negative parameters and `N >= 4`.  `lambda = 0`
/// delegates to the binomial closed form.
pub fn action_numeric(m: &TrinomialMomentum<f64>, tol: f64) -> Result<RegularizedAction<f64>> {
    let (u, v, lambda) = check_real(m)?;
    if m.n() < 4 {
        return Err(Error::Domain(format!("numeric canonical action needs N >= 4, got N = {}", m.n())));
    }
    let residue = m.residue();
    if lambda == 0.0 {
        let mut a = action_binomial(u, Complex64::new(v, 0.0), m.n(), m.m())?;
        a.residue = residue;
        return Ok(a);
    }
    let (nf, mf) = (m.n() as f64, m.m() as f64);
    let mut lam_ref = (2.0 * lambda).max(1.0);
    if v > 0.0 {
        let need = (v * u.powf(-mf / nf) / EPS_REF).powf(nf / (nf - mf));
        lam_ref = lam_ref.max(need);
    }
    debug_assert!(eps_at(m, lam_ref) <= EPS_REF * 1.000001);

    let (base, mut err) = integral_between(m, lambda, lam_ref)?;
    let mut estimates = Vec::new();
    for start in [lam_ref, lam_ref * DILATION] {
        let (mut acc, e) = if start == lam_ref { (0.0, 0.0) } else { integral_between(m, lam_ref, start)? };
        err += e;
        let mut at = start;
        let mut grid = Vec::new();
        for i in 0..GRID {
            if i > 0 {
                let (d, e) = integral_between(m, at, at * 2.0)?;
                acc += d;
                err += e;
                at *= 2.0;
            }
            grid.push(canonical_series(m, at)? - (base + acc));
        }
        estimates.push(grid);
    }
    let mean = |g: &Vec<f64>| g.iter().sum::<f64>() / g.len() as f64;
    let (c0, c1) = (mean(&estimates[0]), mean(&estimates[1]));
    let moved = (c0 - c1).abs();
    if moved > tol {
        return Err(Error::FitUnstable { moved, tol });
    }
    let spread = estimates
        .iter()
        .flatten()
        .map(|x| (x - c0).abs())
        .fold(0.0, f64::max);
    let value = 0.5 * (c0 + c1);
    let error_estimate = err.max(moved).max(spread).max(1e-15 * value.abs()).max(f64::MIN_POSITIVE);
    Ok(RegularizedAction {
        value: Complex64::new(value, 0.0),
        method: ActionMethod::NumericCanonical,
        residue,
        error_estimate,
        logarithmic: false,
    })
}
