//! Canonical (zeta-regularized) actions `I = int_0^inf Pi(q) dq`.
//!
//! Closed forms cover binomial, perfect-square and quartic momenta; the
//! general even trinomial goes through [`action_numeric`].

mod large_v;
mod numeric;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};
use crate::specfun::{ellip_ke, gamma, rgamma, Modulus};
use crate::trinomial::{exponent_j, TrinomialMomentum};

pub use large_v::{quartic_large_v_expansion, LargeVSeries, LargeVTerm, LARGE_V_MAX_ORDER};
pub use numeric::{action_numeric, canonical_series, dlambda_integral};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionMethod {
    BinomialClosed,
    PerfectSquare,
    QuarticElliptic,
    NumericCanonical,
    Asymptotic,
}

/// A regularized action with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularizedAction<T> {
    pub value: C<T>,
    pub method: ActionMethod,
    /// `beta_{-1}(0)`.
    pub residue: C<T>,
    pub error_estimate: T,
    /// Binomial path only: the logarithmic (`j` integer) branch fired.
    pub logarithmic: bool,
}

impl<T: Real> RegularizedAction<T> {
    fn closed(value: C<T>, method: ActionMethod, residue: C<T>) -> Self {
        RegularizedAction { value, method, residue, error_estimate: T::zero(), logarithmic: false }
    }
}

fn cpow<T: Real>(z: C<T>, e: T) -> C<T> {
    if z == cr(T::zero()) {
        return cr(T::zero());
    }
    (z.ln() * cr(e)).exp()
}

/// `int_0^inf (u q^N + v q^M)^{1/2} dq`, principal branch in `v`.
///
/// With `M = 0` the constant term `v` plays the role of `lambda`.
pub fn action_binomial<T: Real>(u: T, v: C<T>, n: u32, m: u32) -> Result<RegularizedAction<T>> {
    let tm = TrinomialMomentum::new(n, m, u, v, cr(T::zero()))?;
    let residue = tm.residue();
    let jr = exponent_j(n, m);
    let j = tm.j();
    if v == cr(T::zero()) {
        let mut a = RegularizedAction::closed(cr(T::zero()), ActionMethod::BinomialClosed, residue);
        a.logarithmic = jr.is_integer();
        return Ok(a);
    }
    let half = T::lit(0.5);
    let uj = u.powf(half - j);
    if !jr.is_integer() {
        let num = gamma(cr(j - half))? * gamma(cr(-j))?;
        let den = cr(T::int((n - m) as i64)) * gamma(cr(-half))?;
        let value = num / den * cr(uj) * cpow(v, j);
        return Ok(RegularizedAction::closed(value, ActionMethod::BinomialClosed, residue));
    }
    let ji = jr.to_integer();
    let mut h1 = T::zero();
    for k in 1..=ji {
        h1 = h1 + T::one() / T::int(k);
    }
    let mut h2 = T::zero();
    for k in 1..ji {
        h2 = h2 + T::one() / T::int(2 * k - 1);
    }
    let nf = T::int(n as i64);
    let mf = T::int(m as i64);
    let bracket = v.ln() - cr(h1) - cr(T::int(2) * mf / nf * (T::LN_2() + half * u.ln() - h2));
    let value = cr(-T::int(2 * ji) / (nf + T::int(2))) * residue * bracket;
    let mut a = RegularizedAction::closed(value, ActionMethod::BinomialClosed, residue);
    a.logarithmic = true;
    Ok(a)
}

/// `beta_{-1}(0)` of a binomial with integer `j`, in closed form.
pub fn binomial_log_residue<T: Real>(u: T, v: C<T>, j: i64) -> C<T> {
    let mut f = T::one();
    // (2j-2)! / ((j-1)! j!)
    for k in 1..=(2 * j - 2) {
        f = f * T::int(k);
    }
    for k in 1..j {
        f = f / T::int(k);
    }
    for k in 1..=j {
        f = f / T::int(k);
    }
    let sign = if (j - 1) % 2 == 0 { T::one() } else { -T::one() };
    let p = T::int(2).powi(2 * j as i32 - 1);
    cr(sign * f / p * u.powf(T::lit(0.5) - T::int(j))) * v.powu(j as u32)
}

/// `int_0^inf [(q^M + w q^L)^2]^{1/2 - s} dq`, analytically continued in `s`.
pub fn perfect_square_integral<T: Real>(m: u32, l: u32, w: T, s: C<T>) -> Result<C<T>> {
    if m <= l {
        return Err(Error::Domain(format!("need M > L, got M = {m}, L = {l}")));
    }
    if !(w > T::zero()) {
        return Err(Error::Domain(format!("need w > 0, got {w}")));
    }
    let one = cr(T::one());
    let two = cr(T::int(2));
    let d = T::int((m - l) as i64);
    let mf = cr(T::int(m as i64));
    let lf = cr(T::int(l as i64));
    let a = (lf * (one - two * s) + one) / cr(d);
    let b = (mf * (one - two * s) + one) / cr(d);
    let r = rgamma(two * s - one);
    if r == cr(T::zero()) {
        return Ok(cr(T::zero()));
    }
    let g = gamma(a)? * gamma(-b)?;
    Ok(g * r / cr(d) * (b * cr(w.ln())).exp())
}

/// Action of the perfect square `(q^{N/2} + sqrt(lambda))^2`; identically 0.
pub fn action_perfect_square<T: Real>(n: u32, lambda: T) -> Result<RegularizedAction<T>> {
    if n % 4 != 0 || n == 0 {
        return Err(Error::Domain(format!("perfect square needs N/2 even, got N = {n}")));
    }
    if lambda < T::zero() {
        return Err(Error::Domain(format!("need lambda >= 0, got {lambda}")));
    }
    let value = if lambda == T::zero() {
        cr(T::zero())
    } else {
        perfect_square_integral(n / 2, 0, lambda.sqrt(), cr(T::zero()))?
    };
    let v = T::int(2) * lambda.sqrt();
    let residue = TrinomialMomentum::new(n, n / 2, T::one(), cr(v), cr(lambda))?.residue();
    Ok(RegularizedAction::closed(value, ActionMethod::PerfectSquare, residue))
}

/// `int_0^inf (q^4 + v q^2 + lambda)^{1/2} dq` for `v, lambda >= 0`.
pub fn action_quartic<T: Real>(v: T, lambda: T) -> Result<RegularizedAction<T>> {
    if !(v >= T::zero() && lambda >= T::zero()) || (v == T::zero() && lambda == T::zero()) {
        return Err(Error::Domain(format!("need v, lambda >= 0 not both 0, got v = {v}, lambda = {lambda}")));
    }
    let zero = cr(T::zero());
    let third = T::one() / T::int(3);
    let two = T::int(2);
    let s = lambda.sqrt();
    let value = if lambda == T::zero() {
        -third * v * v.sqrt()
    } else if v >= two * s {
        let kp = (two * two * s / (v + two * s)).sqrt();
        let (kk, ee) = ellip_ke(&Modulus::from_kprime(kp.min(T::one()))?)?;
        third * (v + two * s).sqrt() * (two * s * kk - v * ee)
    } else {
        let kt = (two * s - v).sqrt() / (two * lambda.sqrt().sqrt());
        let (kk, ee) = ellip_ke(&Modulus::from_k(kt)?)?;
        third * lambda.sqrt().sqrt() * ((two * s + v) * kk - two * v * ee)
    };
    Ok(RegularizedAction::closed(cr(value), ActionMethod::QuarticElliptic, zero))
}

/// Turning-point moduli `q_+ >= q_- >= 0` of `q^4 + v q^2 + lambda`
/// (the roots are `i q_+-`); needs `v >= 2 sqrt(lambda)`.
pub fn quartic_turning_moduli<T: Real>(v: T, lambda: T) -> Result<(T, T)> {
    let two = T::int(2);
    if !(lambda >= T::zero() && v >= two * lambda.sqrt()) {
        return Err(Error::Domain(format!("need v >= 2 sqrt(lambda), got v = {v}, lambda = {lambda}")));
    }
    let disc = (v * v - two * two * lambda).max(T::zero()).sqrt();
    let half = T::lit(0.5);
    let qp = (half * (v + disc)).sqrt();
    // q_- from the product q_+ q_- = sqrt(lambda), stable for small lambda
    let qm = if qp > T::zero() { lambda.sqrt() / qp } else { T::zero() };
    Ok((qp, qm))
}

/// Closed-form contour primitive `-(1/3) q_+ [v E(kd) - 2 q_-^2 K(kd)]`.
pub fn contour_primitive_quartic<T: Real>(v: T, lambda: T) -> Result<C<T>> {
    let (qp, qm) = quartic_turning_moduli(v, lambda)?;
    if !(qp > T::zero()) {
        return Err(Error::Domain("degenerate quartic v = lambda = 0".into()));
    }
    let third = T::one() / T::int(3);
    let two = T::int(2);
    if qm == T::zero() {
        return Ok(cr(-third * qp * v));
    }
    let (kk, ee) = ellip_ke(&Modulus::from_kprime(qm / qp)?)?;
    Ok(cr(-third * qp * (v * ee - two * qm * qm * kk)))
}

/// Large-`v` form: the two binomial actions plus the `M = 2` logarithm.
pub fn action_large_v<T: Real>(n: u32, m: u32, lambda: T, v: T) -> Result<RegularizedAction<T>> {
    if m < 2 || !(v > T::zero()) || lambda < T::zero() {
        return Err(Error::Domain(format!("need M >= 2, v > 0, lambda >= 0 (M = {m}, v = {v}, lambda = {lambda})")));
    }
    let a = action_binomial(T::one(), cr(v), n, m)?;
    let b = action_binomial(v, cr(lambda), m, 0)?;
    let mut value = a.value + b.value;
    if m == 2 {
        let nf = T::int(n as i64);
        let corr = nf / (T::int(4) * (nf - T::int(2))) * lambda / v.sqrt() * (v.ln() + T::int(2) * T::LN_2());
        value = value + cr(corr);
    }
    let residue = TrinomialMomentum::new(n, m, T::one(), cr(v), cr(lambda))?.residue();
    Ok(RegularizedAction { value, method: ActionMethod::Asymptotic, residue, error_estimate: T::zero(), logarithmic: false })
}
