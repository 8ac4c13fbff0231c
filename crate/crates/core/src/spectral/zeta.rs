//! Parity zeta functions `Z(s, lambda) = sum_k (lambda_k + lambda)^{-s}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eigen::{eigenvalues, ParitySpectrum, WeylModel};
use super::Parity;
use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};
use crate::trinomial::TrinomialMomentum;

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub value: C64,
    pub error_estimate: f64,
}

/// `Z(0, lambda) = -beta_{-1}(0)/N +- 1/4`.
pub fn zeta_zero(m: &TrinomialMomentum<f64>, parity: Parity, lambda: C64) -> C64 {
    let res = m.with_lambda(lambda).residue();
    -res / m.n() as f64 + 0.25 * parity.sign()
}

/// Smallest `Re s` for which the level sum converges.
pub fn convergence_abscissa(n: u32) -> f64 {
    0.5 + 1.0 / n as f64
}

/// Level sum over `k >= count` of `f(E_k)` from the tail model: Euler–Maclaurin
/// with the integral done in `E`. `p` is the decay exponent of `f(E) k'(E)`
/// in `E` (must exceed 1). Returns `(value, remainder_bound, E_start)`.
fn tail_with<F, D>(spec: &ParitySpectrum, model: &WeylModel, f: &F, df: &D, p: f64, shift: f64) -> Result<(C64, f64, f64)>
where
    F: Fn(f64, f64) -> C64,
    D: Fn(f64) -> C64,
{
    // a few model levels summed directly, then Euler–Maclaurin from k0
    const DIRECT: usize = 8;
    let mut direct = C64::new(0.0, 0.0);
    let mut gs = Vec::with_capacity(DIRECT + 3);
    for j in 0..DIRECT + 3 {
        let e = spec.model_level_with(model, (spec.count + j) as f64)?;
        let g = f(e, 1.0);
        if j < DIRECT {
            direct += g;
        }
        gs.push(g);
    }
    let k0 = (spec.count + DIRECT) as f64;
    let ek = spec.model_level_with(model, k0)?;
    let (_, dk) = spec.level_index_with(model, ek)?;
    let alpha = 1.0 / (p - 1.0);
    // E = E_K t^{-alpha}
    let mut failure = None;
    let q = integrate(
        |t: f64| {
            if t <= 0.0 {
                return C64::new(0.0, 0.0);
            }
            let e = ek * t.powf(-alpha);
            if !e.is_finite() {
                return C64::new(0.0, 0.0);
            }
            match spec.level_index_with(model, e) {
                Ok((_, kp)) => f(e, kp - shift) * (alpha * e / t),
                Err(err) => {
                    failure.get_or_insert(err);
                    C64::new(0.0, 0.0)
                }
            }
        },
        0.0,
        1.0,
        &[],
        QuadOptions::new(1e-15, 1e-11),
    )?;
    if let Some(err) = failure {
        return Err(err);
    }
    let g = gs[DIRECT];
    let dg = df(ek) / dk;
    let d3 = (gs[DIRECT + 2] - gs[DIRECT + 1] * 2.0 + gs[DIRECT - 1] * 2.0 - gs[DIRECT - 2]) * 0.5;
    let b4 = d3 / 720.0;
    let val = direct + q.value + g * 0.5 - dg / 12.0 + b4;
    let a = (p - 1.0 + 1.0 / spec.weyl.growth_exponent) * spec.weyl.growth_exponent;
    let rem = g.norm() * a * (a + 1.0) * (a + 2.0) * (a + 3.0) * (a + 4.0) / (30240.0 * k0.powi(5)) + 0.05 * b4.norm();
    Ok((val, rem + q.error, ek))
}

/// Tail sum `sum_{k >= count} f(E_k)`; `f(E, k'(E))` returns the summand
/// times `k'`, and `df` is `d f / dE` of the bare summand.
pub(crate) fn tail_sum<F, D>(spec: &ParitySpectrum, f: F, df: D, p: f64) -> Result<(C64, f64)>
where
    F: Fn(f64, f64) -> C64,
    D: Fn(f64) -> C64,
{
    let (a, ea, _) = tail_with(spec, &spec.weyl, &f, &df, p, 0.0)?;
    let (b, _, _) = tail_with(spec, &spec.weyl_low, &f, &df, p, 0.0)?;
    Ok((a, ea + (a - b).norm()))
}

/// `Z(s, lambda)` from a computed spectrum.
///
/// `s = 0` returns the closed value. For `N = 2` the sum diverges at `s = 1`
/// and the finite part of the continuation is returned.
pub fn zeta_with(
    spec: &ParitySpectrum,
    m: &TrinomialMomentum<f64>,
    s: C64,
    lambda: C64,
) -> Result<ZetaValue> {
    if s == C64::new(0.0, 0.0) {
        return Ok(ZetaValue { value: zeta_zero(m, spec.parity, lambda), error_estimate: 0.0 });
    }
    let g0 = 1.0 / spec.weyl.growth_exponent;
    let abscissa = convergence_abscissa(m.n());
    let finite_part = m.n() == 2 && s == C64::new(1.0, 0.0);
    if s.re <= abscissa && !finite_part {
        return Err(Error::ConvergenceAbscissa { s: s.re, abscissa });
    }
    let mut head = C64::new(0.0, 0.0);
    for &e in &spec.eigenvalues {
        head += (C64::new(e, 0.0) + lambda).powc(-s);
    }
    let pw = |e: f64| (C64::new(e, 0.0) + lambda).powc(-s);
    let dpw = |e: f64| -s * (C64::new(e, 0.0) + lambda).powc(-s - 1.0);
    let (tail, err) = if finite_part {
        // k'(E) -> c for the harmonic well; the constant part of the
        // integral continues to -c log(E_K + lambda)
        let c = spec.weyl.amplitude * g0 / (2.0 * std::f64::consts::PI);
        let run = |model: &WeylModel| -> Result<(C64, f64)> {
            let (rest, e, ek) = tail_with(spec, model, &|e, kp| pw(e) * kp, &dpw, 3.0, c)?;
            Ok((rest - c * (C64::new(ek, 0.0) + lambda).ln(), e))
        };
        let (a, ea) = run(&spec.weyl)?;
        let (b, _) = run(&spec.weyl_low)?;
        (a, ea + (a - b).norm())
    } else {
        tail_sum(spec, |e, kp| pw(e) * kp, dpw, s.re - g0 + 1.0)?
    };
    Ok(ZetaValue { value: head + tail, error_estimate: err })
}

/// `Z(s, lambda)` for one parity sector with `count` explicit levels.
pub fn zeta(
    m: &TrinomialMomentum<f64>,
    parity: Parity,
    s: C64,
    lambda: C64,
    count: usize,
) -> Result<ZetaValue> {
    if s == C64::new(0.0, 0.0) {
        return Ok(ZetaValue { value: zeta_zero(m, parity, lambda), error_estimate: 0.0 });
    }
    let spec = eigenvalues(m, parity, count, 1e-12)?;
    zeta_with(&spec, m, s, lambda)
}
