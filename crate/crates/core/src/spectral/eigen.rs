//! Parity-resolved eigenvalues by shooting, and the Weyl tail model.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Parity;
use crate::error::{Error, Result};
use crate::ode::{propagate_scaled, OdeState, OdeStats};
use crate::quad::{integrate, QuadOptions};
use crate::roots1d::brent;
use crate::specfun::gamma_real;
use crate::trinomial::TrinomialMomentum;

type C64 = Complex64;

/// Real potential `u q^N + v q^M` with `u > 0`, `v >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub(crate) struct RealPotential {
    pub n: u32,
    pub m: u32,
    pub u: f64,
    pub v: f64,
}

impl RealPotential {
    pub fn from(m: &TrinomialMomentum<f64>) -> Result<Self> {
        if m.v().im != 0.0 || m.v().re < 0.0 {
            return Err(Error::Domain("eigenvalues need real v >= 0".into()));
        }
        Ok(RealPotential { n: m.n(), m: m.m(), u: m.u(), v: m.v().re })
    }

    pub fn at(&self, q: f64) -> f64 {
        self.u * q.powi(self.n as i32) + self.v * q.powi(self.m as i32)
    }

    fn coeffs(&self, e: f64) -> Vec<C64> {
        let mut c = vec![C64::new(0.0, 0.0); self.n as usize + 1];
        c[self.n as usize] = C64::new(self.u, 0.0);
        c[self.m as usize] += C64::new(self.v, 0.0);
        c[0] -= C64::new(e, 0.0);
        c
    }

    /// Positive turning point `V(a) = E`.
    fn turning_point(&self, e: f64) -> f64 {
        let mut hi = (e / self.u).powf(1.0 / self.n as f64).max(1e-300);
        if self.m > 0 && self.v > 0.0 {
            hi = hi.max((e / self.v).powf(1.0 / self.m as f64).min(hi));
        }
        let mut hi = hi.max(1.0);
        while self.at(hi) < e {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if self.at(mid) < e {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Newton polish
        let mut a = 0.5 * (lo + hi);
        for _ in 0..3 {
            let nf = self.n as f64;
            let mf = self.m as f64;
            let dv = self.u * nf * a.powi(self.n as i32 - 1)
                + if self.m > 0 { self.v * mf * a.powi(self.m as i32 - 1) } else { 0.0 };
            if dv > 0.0 {
                a -= (self.at(a) - e) / dv;
            }
        }
        a
    }

    // (V(a) - V(q)) / (a - q)
    fn slope(&self, a: f64, q: f64) -> f64 {
        let sum = |k: u32| -> f64 { (0..k).map(|i| a.powi(i as i32) * q.powi((k - 1 - i) as i32)).sum() };
        self.u * sum(self.n) + if self.m > 0 { self.v * sum(self.m) } else { 0.0 }
    }
}

/// `S(E) = 2 int_0^a (E - V)^{1/2} dq` and `S'(E)`.
pub(crate) fn bs_action(pot: &RealPotential, e: f64) -> Result<(f64, f64)> {
    if !(e > 0.0) {
        return Ok((0.0, 0.0));
    }
    let a = pot.turning_point(e);
    // q = a (1 - t^2): E - V = a t^2 g(q)
    let opts = QuadOptions::new(0.0, 1e-14);
    let s = integrate(
        |t: f64| {
            let q = a * (1.0 - t * t);
            let g = pot.slope(a, q).max(0.0);
            4.0 * a * t * t * (a * g).sqrt()
        },
        0.0,
        1.0,
        &[],
        opts,
    )?;
    let ds = integrate(
        |t: f64| {
            let q = a * (1.0 - t * t);
            let g = pot.slope(a, q);
            2.0 * (a / g).sqrt()
        },
        0.0,
        1.0,
        &[],
        opts,
    )?;
    Ok((s.value, ds.value))
}

/// Bohr–Sommerfeld action `S(E) = 2 int_0^a (E - V)^{1/2} dq` of a real
/// potential.
pub fn bohr_sommerfeld_action(m: &TrinomialMomentum<f64>, e: f64) -> Result<f64> {
    Ok(bs_action(&RealPotential::from(m)?, e)?.0)
}

/// Tail model `S(E) - r(E) = pi (n + 1/2)` with
/// `r(E) = sum_i c_i E^{-gamma_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylModel {
    /// Eigenvalues grow like `n^{growth_exponent}`.
    pub growth_exponent: f64,
    /// `S(E) ~ amplitude E^{(N+2)/(2N)}`.
    pub amplitude: f64,
    pub exponents: Vec<f64>,
    pub coeffs: Vec<f64>,
    /// Relative error of the model at the last computed level.
    pub self_check: f64,
}

impl WeylModel {
    fn residual(&self, e: f64) -> (f64, f64) {
        let mut r = 0.0;
        let mut dr = 0.0;
        for (g, c) in self.exponents.iter().zip(&self.coeffs) {
            r += c * e.powf(-g);
            dr -= c * g * e.powf(-g - 1.0);
        }
        (r, dr)
    }
}

/// Eigenvalues of one parity sector plus the fitted tail model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParitySpectrum {
    pub parity: Parity,
    pub eigenvalues: Vec<f64>,
    pub weyl: WeylModel,
    pub count: usize,
    /// Same fit with one correction order fewer; the spread between the
    /// two drives tail error estimates.
    pub(crate) weyl_low: WeylModel,
    pub(crate) potential: RealPotential,
}

impl ParitySpectrum {
    /// Continuous level index `k(E)` (level `k` of this parity sits at
    /// `k(E) = k`) and `dk/dE`.
    pub fn level_index(&self, e: f64) -> Result<(f64, f64)> {
        self.level_index_with(&self.weyl, e)
    }

    pub(crate) fn level_index_with(&self, model: &WeylModel, e: f64) -> Result<(f64, f64)> {
        let (s, ds) = bs_action(&self.potential, e)?;
        let (r, dr) = model.residual(e);
        let n = (s - r) / std::f64::consts::PI - 0.5;
        let k = 0.5 * (n - self.parity.offset() as f64);
        Ok((k, 0.5 * (ds - dr) / std::f64::consts::PI))
    }

    /// Model energy of level `k` (fractional `k` allowed).
    pub fn model_level(&self, k: f64) -> Result<f64> {
        self.model_level_with(&self.weyl, k)
    }

    pub(crate) fn model_level_with(&self, model: &WeylModel, k: f64) -> Result<f64> {
        let target = k;
        let mut e = self.eigenvalues.last().copied().unwrap_or(1.0).max(1e-3);
        for _ in 0..100 {
            let (kk, dk) = self.level_index_with(model, e)?;
            let step = (kk - target) / dk;
            let next = (e - step).max(0.5 * e);
            if (next - e).abs() <= 1e-15 * e {
                return Ok(next);
            }
            e = next;
        }
        Ok(e)
    }
}

fn bs_level(pot: &RealPotential, n: f64) -> Result<f64> {
    let target = std::f64::consts::PI * (n + 0.5);
    // S(E) ~ A E^{(N+2)/(2N)} start
    let nf = pot.n as f64;
    let p = (nf + 2.0) / (2.0 * nf);
    let amp = 2.0 * pot.u.powf(-1.0 / nf) * gamma_real(1.0 / nf)? * gamma_real(1.5)? / (nf * gamma_real(1.5 + 1.0 / nf)?);
    let mut e = (target / amp).powf(1.0 / p);
    for _ in 0..100 {
        let (s, ds) = bs_action(pot, e)?;
        let next = (e - (s - target) / ds).max(0.25 * e);
        if (next - e).abs() <= 1e-14 * e {
            return Ok(next);
        }
        e = next;
    }
    Ok(e)
}

/// Shooting functional: normalized `psi'(0)` (even) or `psi(0)` (odd) of
/// the solution recessive at large `q`.
fn shoot(pot: &RealPotential, e: f64, parity: Parity, step_scale: f64) -> Result<f64> {
    let a = if e > 0.0 { pot.turning_point(e) } else { 0.0 };
    let decay = |r: f64| -> Result<f64> {
        let q = integrate(|q: f64| (pot.at(q) - e).max(0.0).sqrt(), a, r, &[], QuadOptions::new(1e-10, 1e-8))?;
        Ok(q.value)
    };
    let mut r = a + 1.0;
    while decay(r)? < 25.0 {
        r = a + 1.5 * (r - a);
    }
    let c = pot.coeffs(e);
    let pr = (pot.at(r) - e).sqrt();
    let dv = pot.u * pot.n as f64 * r.powi(pot.n as i32 - 1)
        + if pot.m > 0 { pot.v * pot.m as f64 * r.powi(pot.m as i32 - 1) } else { 0.0 };
    let y = -(pr + dv / (4.0 * pr * pr));
    let init = OdeState::new(C64::new(1.0, 0.0), C64::new(y, 0.0));
    let mut stats = OdeStats::default();
    let st = propagate_scaled(&c, C64::new(r, 0.0), C64::new(0.0, 0.0), init, &mut stats, step_scale)?;
    let norm = (st.value.norm_sqr() + st.deriv.norm_sqr()).sqrt();
    Ok(match parity {
        Parity::Even => st.deriv.re / norm,
        Parity::Odd => st.value.re / norm,
    })
}

/// First `count` eigenvalues of one parity sector.
pub fn eigenvalues(m: &TrinomialMomentum<f64>, parity: Parity, count: usize, tol: f64) -> Result<ParitySpectrum> {
    eigenvalues_scaled(m, parity, count, tol, 1.0)
}

/// As [`eigenvalues`] with the integrator trial step scaled by `step_scale`.
pub fn eigenvalues_scaled(
    m: &TrinomialMomentum<f64>,
    parity: Parity,
    count: usize,
    tol: f64,
    step_scale: f64,
) -> Result<ParitySpectrum> {
    if count == 0 {
        return Err(Error::Domain("count must be >= 1".into()));
    }
    let pot = RealPotential::from(m)?;
    let p = parity.offset();
    let top = 2 * count + p + 3;
    let mut bs = Vec::with_capacity(top + 1);
    for n in 0..=top {
        bs.push(bs_level(&pot, n as f64)?);
    }
    let mid = |i: isize| -> f64 {
        if i < 0 {
            0.0
        } else {
            0.5 * (bs[i as usize] + bs[i as usize + 1])
        }
    };
    let f = |e: f64| shoot(&pot, e, parity, step_scale);
    let mut levels = Vec::with_capacity(count);
    for k in 0..count {
        let n = (2 * k + p) as isize;
        let (mut lo, mut hi) = (mid(n - 1), mid(n));
        let (mut flo, mut fhi) = (f(lo)?, f(hi)?);
        if flo.signum() == fhi.signum() {
            lo = mid(n - 2).max(0.0);
            hi = mid(n + 1);
            flo = f(lo)?;
            fhi = f(hi)?;
            if flo.signum() == fhi.signum() {
                return Err(Error::NotBracketed { level: k, lo, hi });
            }
        }
        let _ = (flo, fhi);
        let e = brent(f, lo, hi, tol.min(1e-6) * 1e-2 * bs[n as usize].max(1.0), 200)?;
        if let Some(&prev) = levels.last() {
            if e <= prev {
                return Err(Error::Numeric(format!("non-increasing levels at k = {k}")));
            }
        }
        levels.push(e);
    }
    let weyl = fit_weyl(&pot, parity, &levels, 4)?;
    let weyl_low = fit_weyl(&pot, parity, &levels, weyl.coeffs.len().saturating_sub(1))?;
    Ok(ParitySpectrum { parity, eigenvalues: levels, weyl, count, weyl_low, potential: pot })
}

fn fit_weyl(pot: &RealPotential, parity: Parity, levels: &[f64], max_terms: usize) -> Result<WeylModel> {
    let nf = pot.n as f64;
    let gap = (pot.n - pot.m) as f64 / nf;
    let g0 = (nf + 2.0) / (2.0 * nf);
    let amp = 2.0 * pot.u.powf(-1.0 / nf) * gamma_real(1.0 / nf)? * gamma_real(1.5)? / (nf * gamma_real(1.5 + 1.0 / nf)?);
    let k = levels.len();
    let start = k / 2;
    let nterms = ((k - start).saturating_sub(2)).min(max_terms);
    let exponents: Vec<f64> = (0..nterms).map(|i| g0 + i as f64 * gap).collect();
    let mut coeffs = vec![0.0; nterms];
    let resid: Vec<(f64, f64)> = levels
        .iter()
        .enumerate()
        .skip(start)
        .map(|(i, &e)| {
            let n = (2 * i + parity.offset()) as f64;
            Ok((e, bs_action(pot, e)?.0 - std::f64::consts::PI * (n + 0.5)))
        })
        .collect::<Result<_>>()?;
    if nterms > 0 {
        // scale columns by the first-level value for conditioning
        let e0 = resid[0].0;
        let a = DMatrix::from_fn(resid.len(), nterms, |r, c| (resid[r].0 / e0).powf(-exponents[c]));
        let b = DVector::from_iterator(resid.len(), resid.iter().map(|x| x.1));
        let svd = a.svd(true, true);
        let x = svd.solve(&b, 1e-14).map_err(|e| Error::Numeric(e.to_string()))?;
        for c in 0..nterms {
            coeffs[c] = x[c] * e0.powf(exponents[c]);
        }
    }
    let mut model = WeylModel { growth_exponent: 1.0 / g0, amplitude: amp, exponents, coeffs, self_check: 0.0 };
    if let Some(&last) = levels.last() {
        let spec = ParitySpectrum {
            parity,
            eigenvalues: levels.to_vec(),
            weyl: model.clone(),
            weyl_low: model.clone(),
            count: k,
            potential: *pot,
        };
        let pred = spec.model_level((k - 1) as f64)?;
        model.self_check = ((pred - last) / last).abs();
    }
    Ok(model)
}
