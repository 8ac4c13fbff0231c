//! Complex polynomials in ascending coefficient order.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `sum c_k z^k` by Horner.
pub fn eval(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Value and first derivative.
pub fn eval_d(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Coefficients of `p(z0 + w)` in powers of `w`.
pub fn shift(c: &[Complex64], z0: Complex64) -> Vec<Complex64> {
    let mut a = c.to_vec();
    let n = a.len();
    for i in 0..n {
        for k in (i..n - 1).rev() {
            let t = a[k + 1] * z0;
            a[k] += t;
        }
    }
    a
}

/// All roots of a polynomial (leading coefficient nonzero) from the
/// companion matrix, each polished by Newton steps on the original
/// polynomial.
pub fn roots(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut c = c.to_vec();
    while c.len() > 1 && c.last().map_or(false, |x| x.norm() == 0.0) {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    // factor out exact zero roots
    let mut zeros = 0;
    while zeros < deg && c[zeros].norm() == 0.0 {
        zeros += 1;
    }
    let red = &c[zeros..];
    let d = red.len() - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); zeros];
    if d > 0 {
        let lead = red[d];
        let mut m = DMatrix::<Complex64>::zeros(d, d);
        for i in 1..d {
            m[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..d {
            m[(i, d - 1)] = -red[i] / lead;
        }
        let ev = m
            .schur()
            .eigenvalues()
            .ok_or_else(|| Error::Numeric("companion eigenvalues failed".into()))?;
        for &z0 in ev.iter() {
            let mut z = z0;
            for _ in 0..8 {
                let (p, dp) = eval_d(red, z);
                if dp.norm() == 0.0 {
                    break;
                }
                let step = p / dp;
                z -= step;
                if step.norm() <= 1e-16 * z.norm().max(1e-300) {
                    break;
                }
            }
            // keep the unpolished value if Newton wandered (clustered roots)
            if eval(red, z).norm() <= eval(red, z0).norm() {
                out.push(z);
            } else {
                out.push(z0);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shift_matches_eval() {
        let p = [c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 0.0), c(3.0, -1.0)];
        let z0 = c(0.3, -0.7);
        let s = shift(&p, z0);
        let w = c(-0.2, 0.4);
        assert!((eval(&s, w) - eval(&p, z0 + w)).norm() < 1e-14);
    }

    #[test]
    fn quartic_roots() {
        // q^4 + v q^2 + lam, roots i q_+-
        let (v, lam) = (5.0f64, 0.5f64);
        let p = [c(lam, 0.0), c(0.0, 0.0), c(v, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let r = roots(&p).unwrap();
        assert_eq!(r.len(), 4);
        let disc = (v * v - 4.0 * lam).sqrt();
        for q in [(0.5 * (v + disc)).sqrt(), (0.5 * (v - disc)).sqrt()] {
            for s in [1.0, -1.0] {
                let t = c(0.0, s * q);
                assert!(r.iter().any(|z| (z - t).norm() < 1e-13));
            }
        }
    }

    #[test]
    fn zero_root_multiplicity() {
        let p = [c(0.0, 0.0), c(0.0, 0.0), c(5.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let r = roots(&p).unwrap();
        assert_eq!(r.iter().filter(|z| z.norm() == 0.0).count(), 2);
    }
}
