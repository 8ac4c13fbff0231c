//! The classical data `Pi(q)^2 = u q^N + v q^M + lambda` and its large-`q`
//! expansion coefficients.

use num_complex::Complex;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

/// Momentum-squared trinomial `u q^N + v q^M + lambda` with even `N > M >= 0`.
///
/// `Pi(q) = (V(q) + lambda)^{1/2}` is taken on the branch that is positive
/// on the positive real axis for positive parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrinomialMomentum<T> {
    n: u32,
    m: u32,
    u: T,
    v: C<T>,
    lambda: C<T>,
}

impl<T: Real> TrinomialMomentum<T> {
    pub fn new(n: u32, m: u32, u: T, v: C<T>, lambda: C<T>) -> Result<Self> {
        if n % 2 != 0 || m % 2 != 0 {
            return Err(Error::Domain(format!("degrees must be even, got N = {n}, M = {m}")));
        }
        if n < 2 || m >= n {
            return Err(Error::Domain(format!("need N >= 2 and 0 <= M < N, got N = {n}, M = {m}")));
        }
        if !(u > T::zero()) {
            return Err(Error::Domain(format!("leading coefficient u must be positive, got {u}")));
        }
        Ok(TrinomialMomentum { n, m, u, v, lambda })
    }

    /// Real-parameter convenience constructor with `u = 1`.
    pub fn real(n: u32, m: u32, v: T, lambda: T) -> Result<Self> {
        Self::new(n, m, T::one(), cr(v), cr(lambda))
    }

    /// `u q^N + lambda` (no middle term).
    pub fn binomial_shift(n: u32, u: T, lambda: C<T>) -> Result<Self> {
        Self::new(n, 0, u, cr(T::zero()), lambda)
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn u(&self) -> T {
        self.u
    }
    pub fn v(&self) -> C<T> {
        self.v
    }
    pub fn lambda(&self) -> C<T> {
        self.lambda
    }

    pub fn with_lambda(&self, lambda: C<T>) -> Self {
        TrinomialMomentum { lambda, ..*self }
    }

    pub fn with_v(&self, v: C<T>) -> Self {
        TrinomialMomentum { v, ..*self }
    }

    /// `j = (N + 2) / (2 (N - M))`, exactly.
    pub fn j_exact(&self) -> Ratio<i64> {
        exponent_j(self.n, self.m)
    }

    pub fn j(&self) -> T {
        let r = self.j_exact();
        T::int(*r.numer()) / T::int(*r.denom())
    }

    /// True when `j` is a positive integer (logarithmic case).
    pub fn j_is_integer(&self) -> bool {
        self.j_exact().is_integer()
    }

    /// All parameters real with `v >= 0`, `lambda >= 0`.
    pub fn is_real_nonnegative(&self) -> bool {
        self.v.im == T::zero() && self.lambda.im == T::zero() && self.v.re >= T::zero() && self.lambda.re >= T::zero()
    }

    /// Ascending coefficients of `Pi(q)^2` (length `N + 1`).
    pub fn coefficients(&self) -> Vec<C<T>> {
        let mut c = vec![cr(T::zero()); self.n as usize + 1];
        c[self.n as usize] = cr(self.u);
        c[self.m as usize] = c[self.m as usize] + self.v;
        c[0] = c[0] + self.lambda;
        c
    }

    /// `Pi(q)^2` at complex `q`.
    pub fn momentum_squared(&self, q: C<T>) -> C<T> {
        cr(self.u) * q.powu(self.n) + self.v * q.powu(self.m) + self.lambda
    }

    /// `V(q) = u q^N + v q^M` at real `q` (real parts only; real parameters).
    pub fn potential_real(&self, q: T) -> T {
        self.u * q.powi(self.n as i32) + self.v.re * q.powi(self.m as i32)
    }

    /// Coefficient `beta_rho(s)` of `q^{rho - N s}` in the large-`q`
    /// expansion of `(V + lambda)^{1/2 - s}`; `rho = N/2 - d` with
    /// `d <= depth`.
    pub fn beta_coeff(&self, rho: i64, s: C<T>, depth: usize) -> Result<C<T>> {
        let top = (self.n / 2) as i64;
        if rho > top {
            return Ok(cr(T::zero()));
        }
        let d = (top - rho) as usize;
        if d > depth {
            return Err(Error::TruncationTooShallow { requested: d, available: depth });
        }
        Ok(self.beta_by_drop(d, s))
    }

    /// Residue `beta_{-1}(0)` of `Pi` at infinity.
    pub fn residue(&self) -> C<T> {
        let top = (self.n / 2) as usize;
        self.beta_by_drop(top + 1, cr(T::zero()))
    }

    /// True when `beta_{-1}(s)` vanishes identically in `s` and in the
    /// parameters (no term of the binomial expansion lands on `q^{-1}`).
    pub fn residue_structurally_null(&self) -> bool {
        let target = (self.n / 2 + 1) as usize;
        ladder_terms(self.n as usize, self.m as usize, target).is_empty()
    }

    fn beta_by_drop(&self, d: usize, s: C<T>) -> C<T> {
        let a = cr(T::lit(0.5)) - s;
        let vu = self.v / cr(self.u);
        let lu = self.lambda / cr(self.u);
        let mut acc = cr(T::zero());
        for (n, k) in ladder_terms(self.n as usize, self.m as usize, d) {
            let term = gen_binomial(a, n) * cr(T::lit(binomial(n, k))) * pow_or_one(vu, k) * pow_or_one(lu, n - k);
            acc = acc + term;
        }
        // u^a for real positive u
        let ua = (a * cr(self.u.ln())).exp();
        acc * ua
    }
}

fn pow_or_one<T: Real>(z: C<T>, k: usize) -> C<T> {
    if k == 0 {
        cr(T::one())
    } else {
        z.powu(k as u32)
    }
}

/// Pairs `(n, k)` with `k (N - M) + (n - k) N = d`.
fn ladder_terms(n_deg: usize, m_deg: usize, d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let gap = n_deg - m_deg;
    let mut n = 0;
    while n * gap.min(n_deg) <= d {
        for k in 0..=n {
            if k * gap + (n - k) * n_deg == d {
                out.push((n, k));
            }
        }
        n += 1;
    }
    out
}

/// `j = (N + 2) / (2 (N - M))` as an exact rational.
pub fn exponent_j(n: u32, m: u32) -> Ratio<i64> {
    Ratio::new(n as i64 + 2, 2 * (n as i64 - m as i64))
}

/// Generalized binomial coefficient `binom(a, n)` for complex `a`.
pub fn gen_binomial<T: Real>(a: C<T>, n: usize) -> C<T> {
    let mut acc = cr(T::one());
    for i in 0..n {
        acc = acc * (a - cr(T::int(i as i64))) / cr(T::int(i as i64 + 1));
    }
    acc
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Complex helper: `Complex::new(re, im)`.
pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}
