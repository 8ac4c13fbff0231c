//! WKB data for the recessive solution: the momentum on a branch continuous
//! along the positive real axis, the higher Riccati corrections and the
//! regularized remainder `T(R) = I - int_0^R Pi`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly;
use crate::quad::{integrate, integrate_to_infinity, QuadOptions};
use crate::trinomial::TrinomialMomentum;

type C64 = Complex64;

const JET: usize = 26;

/// `Pi(q)` on the branch continuous along `q >= 0` and positive as
/// `q -> +inf`.
#[derive(Debug, Clone)]
pub struct MomentumBranch {
    coeffs: Vec<C64>,
    roots: Vec<C64>,
    real_positive: bool,
    sqrt_u: f64,
}

impl MomentumBranch {
    pub fn new(m: &TrinomialMomentum<f64>) -> Result<Self> {
        let coeffs = m.coefficients();
        let real_positive = m.is_real_nonnegative();
        let roots = if real_positive { Vec::new() } else { poly::roots(&coeffs)? };
        for r in &roots {
            if r.im.abs() <= 1e-12 * (1.0 + r.norm()) && r.re > 0.0 {
                return Err(Error::Domain(format!("turning point {r} on the positive real axis")));
            }
        }
        Ok(MomentumBranch { coeffs, roots, real_positive, sqrt_u: m.u().sqrt() })
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// `Pi(q)` for real `q >= 0`.
    pub fn at(&self, q: f64) -> C64 {
        if self.real_positive {
            return poly::eval(&self.coeffs, C64::new(q, 0.0)).sqrt();
        }
        let zq = C64::new(q, 0.0);
        let s: C64 = self.roots.iter().map(|r| (zq - r).ln()).sum();
        (s * 0.5).exp() * self.sqrt_u
    }
}

fn jet_mul(a: &[C64], b: &[C64], len: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); len];
    for i in 0..len.min(a.len()) {
        for k in 0..(len - i).min(b.len()) {
            out[i + k] += a[i] * b[k];
        }
    }
    out
}

fn jet_div(a: &[C64], b: &[C64], len: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); len];
    for i in 0..len {
        let mut s = a[i];
        for k in 1..=i.min(b.len() - 1) {
            s -= b[k] * out[i - k];
        }
        out[i] = s / b[0];
    }
    out
}

fn jet_d(a: &[C64]) -> Vec<C64> {
    (1..a.len()).map(|k| a[k] * k as f64).collect()
}

/// Riccati corrections at `q`: returns `(y_1(q), Y(q))` where
/// `y = -Pi + y_1 + Y` is the log-derivative of the recessive solution and
/// `Y = sum_{n >= 2} y_n` is truncated near its smallest term.
pub fn riccati_corrections(branch: &MomentumBranch, q: f64) -> (C64, C64) {
    let q0 = C64::new(q, 0.0);
    let sp = poly::shift(branch.coeffs(), q0);
    let pi0 = branch.at(q);
    // sqrt jet with the prescribed leading value
    let mut s = vec![C64::new(0.0, 0.0); JET];
    s[0] = pi0;
    for k in 1..JET {
        let mut acc = if k < sp.len() { sp[k] } else { C64::new(0.0, 0.0) };
        for i in 1..k {
            acc -= s[i] * s[k - i];
        }
        s[k] = acc / (pi0 * 2.0);
    }
    let y0: Vec<C64> = s.iter().map(|x| -x).collect();
    let mut ys: Vec<Vec<C64>> = vec![y0.clone()];
    let two_y0: Vec<C64> = y0.iter().map(|x| x * 2.0).collect();
    let d0 = jet_d(&y0);
    ys.push(jet_div(&d0.iter().map(|x| -x).collect::<Vec<_>>(), &two_y0, JET - 1));
    let mut total = C64::new(0.0, 0.0);
    let mut best = f64::INFINITY;
    let floor = 1e-18 * (pi0.norm() + 1.0);
    let mut small_run = 0;
    // low orders can vanish identically at a symmetric point (up to the
    // degree), so growth is judged on a window that long
    let window = (branch.coeffs().len() - 1).max(2);
    let mut norms: Vec<f64> = Vec::with_capacity(JET);
    for n in 2..JET {
        let len = JET - n;
        let mut num = jet_d(&ys[n - 1]);
        num.truncate(len);
        for a in 1..n {
            let prod = jet_mul(&ys[a], &ys[n - a], len);
            for i in 0..len {
                num[i] += prod[i];
            }
        }
        let neg: Vec<C64> = num.iter().map(|x| -x).collect();
        let yn = jet_div(&neg, &two_y0, len);
        norms.push(yn[0].norm());
        let t = norms[norms.len().saturating_sub(window)..].iter().cloned().fold(0.0, f64::max);
        if t > 2.0 * best && norms.len() > window {
            break;
        }
        total += yn[0];
        if norms.len() >= window {
            best = best.min(t.max(floor));
        }
        ys.push(yn);
        small_run = if t < floor { small_run + 1 } else { 0 };
        if small_run >= window || len <= 1 {
            break;
        }
    }
    (ys[1][0], total)
}

/// `int_{q0}^inf Y(q) dq` with `Y` from [`riccati_corrections`].
pub fn riccati_tail_integral(branch: &MomentumBranch, q0: f64, scale: f64) -> Result<(C64, f64)> {
    let r = integrate_to_infinity(|q: f64| riccati_corrections(branch, q).1, q0, scale, QuadOptions::new(1e-15, 1e-12))?;
    Ok((r.value, r.error))
}

/// `T(R) = I - int_0^R Pi dq` from the large-`q` expansion of `Pi`,
/// valid when the expansion converges at `R`.
///
/// Available when the residue vanishes identically (the expansion is then
/// the whole story) and for `N = 2`, where the logarithmic term carries the
/// constant `-beta_{-1} (log 2 + log(u)/2)`.
pub fn action_tail_series(m: &TrinomialMomentum<f64>, r: f64) -> Result<C64> {
    let n = m.n();
    if !(m.residue_structurally_null() || n == 2) {
        return Err(Error::Unsupported("series remainder needs a structurally null residue or N = 2".into()));
    }
    let z0 = C64::new(0.0, 0.0);
    let top = (n / 2) as i64;
    let depth = 2000usize;
    let mut acc = z0;
    let mut quiet = 0;
    let mut rho = top;
    // u q^N alone: the expansion stops after the leading term
    let monomial = m.coefficients()[..n as usize].iter().all(|c| c.norm() == 0.0);
    while (top - rho) as usize <= depth {
        if monomial && rho < -1 {
            return Ok(acc);
        }
        let b = m.beta_coeff(rho, z0, depth)?;
        if rho == -1 {
            if b.norm() != 0.0 {
                acc -= b * r.ln();
                acc -= b * (std::f64::consts::LN_2 + 0.5 * m.u().ln());
            }
        } else if b.norm() != 0.0 {
            let p = (rho + 1) as f64;
            let t = b * r.powf(p) / p;
            acc -= t;
            if t.norm() < 1e-18 * acc.norm().max(1e-300) {
                quiet += 1;
            } else {
                quiet = 0;
            }
            if quiet >= 3 && rho < -1 {
                return Ok(acc);
            }
        }
        rho -= 1;
    }
    Err(Error::TruncationTooShallow { requested: depth + 1, available: depth })
}

/// `T(R)` from a known canonical action and quadrature of `Pi` on `[0, R]`.
pub fn action_tail_from_value(branch: &MomentumBranch, action: C64, r: f64) -> Result<C64> {
    let q = integrate(|x: f64| branch.at(x), 0.0, r, &[0.25 * r, 0.5 * r], QuadOptions::new(1e-15, 1e-14))?;
    Ok(action - q.value)
}

/// Radius beyond which the large-`q` binomial expansion converges quickly.
pub fn expansion_radius(m: &TrinomialMomentum<f64>, ratio: f64) -> f64 {
    let (n, mm) = (m.n() as f64, m.m() as f64);
    let u = m.u();
    let mut r = 1.0f64;
    if m.v().norm() > 0.0 {
        r = r.max((m.v().norm() / (ratio * u)).powf(1.0 / (n - mm)));
    }
    if m.lambda().norm() > 0.0 {
        r = r.max((m.lambda().norm() / (ratio * u)).powf(1.0 / n));
    }
    r
}
