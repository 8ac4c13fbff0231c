//! Expansion of the quartic action for `v -> +inf` at fixed `lambda`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::specfun::unit_modulus_series;

pub const LARGE_V_MAX_ORDER: usize = 12;

/// `coeff * v^{v_power}` or `coeff * v^{v_power} log v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LargeVTerm<T> {
    pub v_power: T,
    pub log_v: bool,
    pub coeff: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeVSeries<T> {
    pub order: usize,
    pub terms: Vec<LargeVTerm<T>>,
}

impl<T: Real> LargeVSeries<T> {
    pub fn eval(&self, v: T) -> T {
        self.terms.iter().fold(T::zero(), |acc, t| {
            let p = v.powf(t.v_power) * t.coeff;
            acc + if t.log_v { p * v.ln() } else { p }
        })
    }

    /// Coefficient of `v^{power}` (or `v^{power} log v`), zero if absent.
    pub fn coefficient(&self, power: T, log_v: bool) -> T {
        self.terms
            .iter()
            .filter(|t| t.log_v == log_v && (t.v_power - power).abs() < T::lit(1e-9))
            .fold(T::zero(), |a, t| a + t.coeff)
    }
}

// Power series in eps whose coefficients are linear in l = log(eps).
#[derive(Clone)]
struct Ser<T>(Vec<[T; 2]>);

impl<T: Real> Ser<T> {
    fn zero(n: usize) -> Self {
        Ser(vec![[T::zero(); 2]; n + 1])
    }
    fn len(&self) -> usize {
        self.0.len()
    }
    fn constant(n: usize, c: T) -> Self {
        let mut s = Self::zero(n);
        s.0[0][0] = c;
        s
    }
    fn add(&self, o: &Self) -> Self {
        Ser(self.0.iter().zip(&o.0).map(|(a, b)| [a[0] + b[0], a[1] + b[1]]).collect())
    }
    fn scale(&self, c: T) -> Self {
        Ser(self.0.iter().map(|a| [a[0] * c, a[1] * c]).collect())
    }
    // One factor must be free of l.
    fn mul(&self, o: &Self) -> Self {
        let n = self.len();
        let mut out = Self::zero(n - 1);
        for i in 0..n {
            for k in 0..n - i {
                let (a, b) = (self.0[i], o.0[k]);
                debug_assert!(a[1] == T::zero() || b[1] == T::zero());
                out.0[i + k][0] = out.0[i + k][0] + a[0] * b[0];
                out.0[i + k][1] = out.0[i + k][1] + a[0] * b[1] + a[1] * b[0];
            }
        }
        out
    }
}

/// Expansion of the quartic action in `v^{3/2 - n}` and `v^{3/2 - n} log v`
/// for `n = 0..=order`.
///
/// Fails if the `v^{1/2}`, `v^{1/2} log v` or `v^{3/2} log v` coefficients
/// do not cancel.
pub fn quartic_large_v_expansion<T: Real>(v: T, lambda: T, order: usize) -> Result<LargeVSeries<T>> {
    if order > LARGE_V_MAX_ORDER {
        return Err(Error::TruncationTooShallow { requested: order, available: LARGE_V_MAX_ORDER });
    }
    if !(lambda > T::zero() && v > T::int(2) * lambda.sqrt()) {
        return Err(Error::Domain(format!("need v > 2 sqrt(lambda) > 0, got v = {v}, lambda = {lambda}")));
    }
    let n = order;
    let two = T::int(2);
    // 1/(1 + 2 eps), log(1 + 2 eps), (1 + 2 eps)^{3/2}
    let mut geo = Ser::zero(n);
    let mut log1p = Ser::zero(n);
    let mut pre = Ser::zero(n);
    let mut binom = T::one();
    for i in 0..=n {
        let p = two.powi(i as i32);
        geo.0[i][0] = if i % 2 == 0 { p } else { -p };
        if i > 0 {
            let t = p / T::int(i as i64);
            log1p.0[i][0] = if i % 2 == 1 { t } else { -t };
        }
        pre.0[i][0] = binom * p;
        binom = binom * (T::lit(1.5) - T::int(i as i64)) / T::int(i as i64 + 1);
    }
    // k'^2 = 4 eps / (1 + 2 eps)
    let mut kp2 = Ser::zero(n);
    for i in 1..=n {
        kp2.0[i][0] = T::int(4) * geo.0[i - 1][0];
    }
    // log(4/k') = log 2 - l/2 + log(1 + 2 eps)/2
    let mut big_l = log1p.scale(T::lit(0.5));
    big_l.0[0][0] = big_l.0[0][0] + T::LN_2();
    big_l.0[0][1] = -T::lit(0.5);

    let (kc, ec) = unit_modulus_series::<T>(n);
    let mut kk = Ser::zero(n);
    let mut ee = Ser::zero(n);
    let mut pw = Ser::constant(n, T::one());
    for i in 0..=n {
        let kt = big_l.scale(kc[i].0).add(&Ser::constant(n, kc[i].1));
        let et = big_l.scale(ec[i].0).add(&Ser::constant(n, ec[i].1));
        kk = kk.add(&pw.mul(&kt));
        ee = ee.add(&pw.mul(&et));
        pw = pw.mul(&kp2);
    }
    // G = (2 - k'^2) E - k'^2 K
    let two_minus = Ser::constant(n, two).add(&kp2.scale(-T::one()));
    let g = two_minus.mul(&ee).add(&kp2.mul(&kk).scale(-T::one()));
    let total = pre.mul(&g).scale(-T::one() / T::int(6));

    let scale = T::one() + v.abs();
    let tol = T::lit(1e-10) * scale;
    let c = &total.0;
    if c[0][1].abs() > tol || (n >= 1 && (c[1][0].abs() > tol || c[1][1].abs() > tol)) {
        return Err(Error::Numeric(format!(
            "large-v cancellation failed: c0l = {}, c1 = {}, c1l = {}",
            c[0][1],
            c[1][0],
            c[1][1]
        )));
    }
    // eps^n = lambda^{n/2} v^{-n}, l = log(lambda)/2 - log v
    let half_log_lam = T::lit(0.5) * lambda.ln();
    let mut terms = Vec::new();
    for (i, ci) in c.iter().enumerate() {
        if i == 1 {
            continue;
        }
        let lp = lambda.powf(T::lit(0.5) * T::int(i as i64));
        let power = T::lit(1.5) - T::int(i as i64);
        terms.push(LargeVTerm { v_power: power, log_v: false, coeff: lp * (ci[0] + ci[1] * half_log_lam) });
        if ci[1] != T::zero() {
            terms.push(LargeVTerm { v_power: power, log_v: true, coeff: -lp * ci[1] });
        }
    }
    Ok(LargeVSeries { order, terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::action_quartic;

    #[test]
    fn leading_terms() {
        let (v, lam) = (100.0f64, 1.7f64);
        let s = quartic_large_v_expansion(v, lam, 4).unwrap();
        assert!((s.coefficient(1.5, false) + 1.0 / 3.0).abs() < 1e-14);
        assert_eq!(s.coefficient(0.5, false), 0.0);
        assert_eq!(s.coefficient(0.5, true), 0.0);
        // -(1/4) lam v^{-1/2} (log lam - 2 log v - 4 log 2 - 1)
        let c0 = -0.25 * lam * (lam.ln() - 4.0 * std::f64::consts::LN_2 - 1.0);
        assert!((s.coefficient(-0.5, false) - c0).abs() < 1e-13);
        assert!((s.coefficient(-0.5, true) - 0.5 * lam).abs() < 1e-13);
    }

    #[test]
    fn converges_to_closed_form() {
        let (v, lam) = (100.0f64, 1.0f64);
        let exact = action_quartic(v, lam).unwrap().value.re;
        let mut prev = f64::INFINITY;
        for order in [2usize, 4, 6, 8] {
            let d = (quartic_large_v_expansion(v, lam, order).unwrap().eval(v) - exact).abs();
            assert!(d < prev.max(1e-12));
            prev = d;
        }
        assert!(prev < 1e-11);
    }

    #[test]
    fn too_deep() {
        assert!(matches!(
            quartic_large_v_expansion(100.0f64, 1.0, 40),
            Err(Error::TruncationTooShallow { .. })
        ));
    }
}
