//! Complex Gamma function and complete elliptic integrals.
//!
//! `K` and `E` are evaluated by the arithmetic-geometric mean for real
//! modulus; pure-imaginary modulus goes through the imaginary-modulus
//! transformation only, never through a complex AGM.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

// Godfrey's coefficients for g = 607/128.
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_091_82,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

fn non_positive_integer<T: Real>(z: C<T>) -> bool {
    z.im == T::zero() && z.re <= T::zero() && z.re == z.re.round()
}

/// `ln Gamma(z)` for `Re z >= 1/2` (principal-ish branch via Lanczos).
fn ln_gamma_right<T: Real>(z: C<T>) -> C<T> {
    let half = T::lit(0.5);
    let z = z - cr(T::one());
    let mut acc = cr(T::lit(LANCZOS[0]));
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + cr(T::lit(c)) / (z + cr(T::int(k as i64)));
    }
    let t = z + cr(T::lit(LANCZOS_G) + half);
    let half_ln_2pi = T::lit(0.918_938_533_204_672_741_780_329_736_4);
    cr(half_ln_2pi) + (z + cr(half)) * t.ln() - t + acc.ln()
}

/// Complex Gamma function.
///
/// Reflection-stabilized Lanczos approximation; relative error near 1e-15
/// on moderate arguments.
pub fn gamma<T: Real>(z: C<T>) -> Result<C<T>> {
    if non_positive_integer(z) {
        return Err(Error::GammaPole(z.re.to_f64().unwrap_or(f64::NAN)));
    }
    let half = T::lit(0.5);
    if z.re < half {
        let pi = T::PI();
        let s = sin_pi(z);
        let g = ln_gamma_right(cr(T::one()) - z).exp();
        Ok(cr(pi) / (s * g))
    } else {
        Ok(ln_gamma_right(z).exp())
    }
}

/// `1/Gamma(z)`, entire; exactly zero at the poles of Gamma.
pub fn rgamma<T: Real>(z: C<T>) -> C<T> {
    if non_positive_integer(z) {
        return cr(T::zero());
    }
    let half = T::lit(0.5);
    if z.re < half {
        let s = sin_pi(z);
        s * ln_gamma_right(cr(T::one()) - z).exp() / cr(T::PI())
    } else {
        (-ln_gamma_right(z)).exp()
    }
}

/// `ln Gamma(z)` on a branch that is continuous for `Re z >= 1/2`.
pub fn ln_gamma<T: Real>(z: C<T>) -> Result<C<T>> {
    if non_positive_integer(z) {
        return Err(Error::GammaPole(z.re.to_f64().unwrap_or(f64::NAN)));
    }
    if z.re < T::lit(0.5) {
        Ok(cr(T::PI()).ln() - sin_pi(z).ln() - ln_gamma_right(cr(T::one()) - z))
    } else {
        Ok(ln_gamma_right(z))
    }
}

/// Real Gamma function.
pub fn gamma_real<T: Real>(x: T) -> Result<T> {
    gamma(cr(x)).map(|g| g.re)
}

/// `1/Gamma(x)` for real `x`.
pub fn rgamma_real<T: Real>(x: T) -> T {
    rgamma(cr(x)).re
}

/// `sin(pi z)` with the real part reduced modulo 2 first.
fn sin_pi<T: Real>(z: C<T>) -> C<T> {
    let two = T::int(2);
    let r = z.re - two * (z.re / two).floor();
    // exact zeros at integers
    if z.im == T::zero() && r == r.round() {
        return cr(T::zero());
    }
    (Complex::new(r, z.im) * cr(T::PI())).sin()
}

/// Which family a modulus belongs to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModulusKind<T> {
    /// Real `k` in `[0, 1]`.
    Real,
    /// `k = i ktilde / ktilde'` with real `ktilde` in `[0, 1)`.
    Imaginary { ktilde: T },
}

/// Modulus `k` of a complete elliptic integral, with its complement `k'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus<T> {
    k: C<T>,
    kprime: T,
    kind: ModulusKind<T>,
}

impl<T: Real> Modulus<T> {
    /// Real modulus `k` in `[0, 1]`.
    pub fn from_k(k: T) -> Result<Self> {
        if !(k >= T::zero() && k <= T::one()) {
            return Err(Error::Domain(format!("real modulus must lie in [0, 1], got {k}")));
        }
        let kprime = ((T::one() - k) * (T::one() + k)).sqrt();
        Ok(Modulus { k: cr(k), kprime, kind: ModulusKind::Real })
    }

    /// Real modulus given through its complement `k'` in `(0, 1]`; keeps `k'`
    /// exact when `k` is close to 1.
    pub fn from_kprime(kprime: T) -> Result<Self> {
        if !(kprime > T::zero() && kprime <= T::one()) {
            return Err(Error::Domain(format!("complementary modulus must lie in (0, 1], got {kprime}")));
        }
        let k = ((T::one() - kprime) * (T::one() + kprime)).sqrt();
        Ok(Modulus { k: cr(k), kprime, kind: ModulusKind::Real })
    }

    /// Pure-imaginary modulus `k = i ktilde / ktilde'`.
    pub fn imaginary(ktilde: T) -> Result<Self> {
        if !(ktilde >= T::zero() && ktilde < T::one()) {
            return Err(Error::Domain(format!("ktilde must lie in [0, 1), got {ktilde}")));
        }
        let ktp = ((T::one() - ktilde) * (T::one() + ktilde)).sqrt();
        Ok(Modulus {
            k: Complex::new(T::zero(), ktilde / ktp),
            kprime: T::one() / ktp,
            kind: ModulusKind::Imaginary { ktilde },
        })
    }

    pub fn k(&self) -> C<T> {
        self.k
    }

    pub fn kprime(&self) -> T {
        self.kprime
    }

    pub fn kind(&self) -> ModulusKind<T> {
        self.kind
    }

    /// Real `k`, or a domain error for imaginary moduli.
    pub fn real_k(&self) -> Result<T> {
        match self.kind {
            ModulusKind::Real => Ok(self.k.re),
            ModulusKind::Imaginary { .. } => Err(Error::Domain("modulus is not real".into())),
        }
    }
}

/// AGM of `(1, kprime)` together with `sum 2^{n-1} c_n^2` (with `c_0 = k`).
fn agm<T: Real>(k: T, kprime: T) -> (T, T) {
    let mut a = T::one();
    let mut b = kprime;
    let half = T::lit(0.5);
    let mut sum = half * k * k;
    let mut pow = half;
    let tol = T::epsilon() * T::lit(0.5);
    for _ in 0..64 {
        let c = half * (a - b);
        let an = half * (a + b);
        let bn = (a * b).sqrt();
        pow = pow + pow;
        sum = sum + pow * c * c;
        a = an;
        b = bn;
        // stop once the next c^2 is below roundoff; 2^n c^2 would otherwise
        // accumulate ulp noise
        if (a - b).abs() <= T::lit(4.0) * tol * a {
            break;
        }
    }
    (a, sum)
}

fn real_k_e<T: Real>(m: &Modulus<T>) -> Result<(T, T)> {
    let k = m.k.re;
    if m.kprime == T::zero() {
        return Err(Error::EllipticDivergence);
    }
    let (a, sum) = agm(k, m.kprime);
    let kk = T::PI() / (T::int(2) * a);
    Ok((kk, kk * (T::one() - sum)))
}

/// Complete elliptic integral of the first kind.
pub fn ellip_k<T: Real>(m: &Modulus<T>) -> Result<T> {
    match m.kind {
        ModulusKind::Real => real_k_e(m).map(|p| p.0),
        ModulusKind::Imaginary { ktilde } => imaginary_modulus_transform(ktilde).map(|p| p.0),
    }
}

/// Complete elliptic integral of the second kind; `E(1) = 1`.
pub fn ellip_e<T: Real>(m: &Modulus<T>) -> Result<T> {
    match m.kind {
        ModulusKind::Real => {
            if m.kprime == T::zero() {
                return Ok(T::one());
            }
            real_k_e(m).map(|p| p.1)
        }
        ModulusKind::Imaginary { ktilde } => imaginary_modulus_transform(ktilde).map(|p| p.1),
    }
}

/// Both `K` and `E` in one AGM pass.
pub fn ellip_ke<T: Real>(m: &Modulus<T>) -> Result<(T, T)> {
    match m.kind {
        ModulusKind::Real => real_k_e(m),
        ModulusKind::Imaginary { ktilde } => imaginary_modulus_transform(ktilde),
    }
}

/// `dK/dk = E/(k k'^2) - K/k` for real `k` in `(0, 1)`.
pub fn dk_dk<T: Real>(m: &Modulus<T>) -> Result<T> {
    let k = m.real_k()?;
    if !(k > T::zero() && k < T::one()) {
        return Err(Error::Domain(format!("dK/dk needs k in (0, 1), got {k}")));
    }
    let (kk, ee) = real_k_e(m)?;
    let kp2 = m.kprime * m.kprime;
    Ok(ee / (k * kp2) - kk / k)
}

/// Coefficients of `K` and `E` in powers of `k'^2` near `k = 1`, as pairs
/// `(coefficient of log(4/k'), constant)`.
fn unit_modulus_coefficients<T: Real>(order: usize) -> (Vec<(T, T)>, Vec<(T, T)>) {
    let half = T::lit(0.5);
    let mut kc = Vec::with_capacity(order + 1);
    let mut ec = Vec::with_capacity(order + 1);
    // a_n = ((1/2)_n / n!)^2, d_n = sum_{i<=n} 2/((2i-1)(2i))
    let mut poch = T::one();
    let mut d = T::zero();
    let mut prev_a = T::one();
    for n in 0..=order {
        if n > 0 {
            let nf = T::int(n as i64);
            poch = poch * (half + nf - T::one()) / nf;
            d = d + T::int(2) / (T::int(2 * n as i64 - 1) * T::int(2 * n as i64));
        }
        let a = poch * poch;
        kc.push((a, -a * d));
        if n == 0 {
            ec.push((T::zero(), T::one()));
        } else {
            let c = prev_a * T::int(2 * n as i64 - 1) / T::int(2 * n as i64);
            let shift = T::one() / T::int((2 * n * (2 * n - 1)) as i64);
            ec.push((c, -c * (d - shift)));
        }
        prev_a = a;
    }
    (kc, ec)
}

/// Truncated expansions of `K` and `E` for `k -> 1`, through `k'^{2 order}`.
///
/// `order = 1` gives `K ~ log(4/k') + (log(4/k') - 1) k'^2 / 4` and
/// `E ~ 1 + (log(4/k') - 1/2) k'^2 / 2`.
pub fn k_e_near_unit_modulus<T: Real>(kprime: T, order: usize) -> Result<(T, T)> {
    if !(kprime > T::zero() && kprime <= T::lit(0.3)) {
        return Err(Error::Domain(format!("near-unit expansion needs 0 < k' <= 0.3, got {kprime}")));
    }
    let l = (T::int(4) / kprime).ln();
    let kp2 = kprime * kprime;
    let (kc, ec) = unit_modulus_coefficients::<T>(order);
    let mut kk = T::zero();
    let mut ee = T::zero();
    let mut p = T::one();
    for n in 0..=order {
        kk = kk + p * (kc[n].0 * l + kc[n].1);
        ee = ee + p * (ec[n].0 * l + ec[n].1);
        p = p * kp2;
    }
    Ok((kk, ee))
}

/// Coefficients of the near-unit expansions, exposed for series work.
pub fn unit_modulus_series<T: Real>(order: usize) -> (Vec<(T, T)>, Vec<(T, T)>) {
    unit_modulus_coefficients(order)
}

/// Descending Landen transformation: for `k = (1 - kd')/(1 + kd')`,
/// `K(k) = (1 + kd')/2 K(kd)` and `E(k) = (E(kd) + kd' K(kd))/(1 + kd')`.
///
/// Takes `kd'` (the complement of the transformed modulus) and returns
/// `(K(k), E(k))`.
pub fn landen_transform<T: Real>(kd_prime: T) -> Result<(T, T)> {
    if !(kd_prime > T::zero() && kd_prime <= T::one()) {
        return Err(Error::Domain(format!("Landen transform needs kd' in (0, 1], got {kd_prime}")));
    }
    let md = Modulus::from_kprime(kd_prime)?;
    let (kd, ed) = ellip_ke(&md)?;
    let one = T::one();
    let kk = (one + kd_prime) / T::int(2) * kd;
    let ee = (ed + kd_prime * kd) / (one + kd_prime);
    Ok((kk, ee))
}

/// The modulus `k = (1 - kd')/(1 + kd')` targeted by [`landen_transform`].
pub fn landen_modulus<T: Real>(kd_prime: T) -> T {
    (T::one() - kd_prime) / (T::one() + kd_prime)
}

/// Inverse of the descending Landen step: given real `k` in `[0, 1)`,
/// returns `kd' = (1 - k)/(1 + k)` and recovers `(K(kd), E(kd))` from
/// `(K(k), E(k))`.
pub fn inverse_landen<T: Real>(k: T, kk: T, ee: T) -> (T, T, T) {
    let one = T::one();
    let kdp = (one - k) / (one + k);
    let kd = T::int(2) * kk / (one + kdp);
    let ed = ee * (one + kdp) - kdp * kd;
    (kdp, kd, ed)
}

/// `K` and `E` at `k = i ktilde / ktilde'` via
/// `K(k) = ktilde' K(ktilde)` and `E(k) = E(ktilde) / ktilde'`.
pub fn imaginary_modulus_transform<T: Real>(ktilde: T) -> Result<(T, T)> {
    if !(ktilde >= T::zero() && ktilde < T::one()) {
        return Err(Error::Domain(format!("ktilde must lie in [0, 1), got {ktilde}")));
    }
    let mt = Modulus::from_k(ktilde)?;
    let (kt, et) = real_k_e(&mt)?;
    let ktp = mt.kprime();
    Ok((ktp * kt, et / ktp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_half_and_integers() {
        let g = gamma(c(0.5, 0.0)).unwrap();
        assert!((g.re - PI.sqrt()).abs() < 1e-15 * PI.sqrt());
        let g5 = gamma(c(5.0, 0.0)).unwrap();
        assert!((g5.re - 24.0).abs() < 1e-13);
        let gm = gamma(c(-0.5, 0.0)).unwrap();
        assert!((gm.re + 2.0 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn gamma_reflection() {
        for &(x, y) in &[(0.3, 0.1), (-2.7, 1.5), (4.2, -3.3), (0.5, 8.0), (-7.3, -0.4)] {
            let z = c(x, y);
            let lhs = gamma(z).unwrap() * gamma(c(1.0, 0.0) - z).unwrap() * (z * PI).sin() / PI;
            assert!((lhs - c(1.0, 0.0)).norm() < 1e-13, "{z} -> {lhs}");
        }
    }

    #[test]
    fn gamma_poles() {
        assert!(matches!(gamma(c(0.0, 0.0)), Err(Error::GammaPole(_))));
        assert!(matches!(gamma(c(-3.0, 0.0)), Err(Error::GammaPole(_))));
        assert_eq!(rgamma(c(-2.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn gamma_f32_instantiation() {
        let g: f32 = gamma_real(0.25f32).unwrap();
        assert!((g - 3.625_61).abs() < 1e-4);
    }

    #[test]
    fn special_moduli() {
        let m0 = Modulus::from_k(0.0).unwrap();
        assert_eq!(ellip_k(&m0).unwrap(), PI / 2.0);
        assert!((ellip_e(&m0).unwrap() - PI / 2.0).abs() < 1e-15);
        let m1 = Modulus::from_k(1.0).unwrap();
        assert_eq!(ellip_e(&m1).unwrap(), 1.0);
        assert!(matches!(ellip_k(&m1), Err(Error::EllipticDivergence)));
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(Modulus::from_k(1.5).is_err());
        assert!(Modulus::from_k(-0.1).is_err());
        assert!(Modulus::from_kprime(0.0).is_err());
        assert!(Modulus::imaginary(1.0).is_err());
        assert!(dk_dk(&Modulus::from_k(0.0).unwrap()).is_err());
    }

    #[test]
    fn derivative_small_k() {
        // dK/dk ~ (pi/4) k
        let k = 1e-3;
        let d = dk_dk(&Modulus::from_k(k).unwrap()).unwrap();
        assert!((d / (PI / 4.0 * k) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn landen_fixed_point() {
        let (kk, ee) = landen_transform(1.0).unwrap();
        assert!((kk - PI / 2.0).abs() < 1e-15 && (ee - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn imaginary_modulus_has_real_complement() {
        let m = Modulus::imaginary(0.5).unwrap();
        let k = m.k();
        let kp = m.kprime();
        assert!((k * k + kp * kp - 1.0).norm() < 1e-14);
    }

    #[test]
    fn unit_expansion_leading_terms() {
        let (kk, ee) = k_e_near_unit_modulus(1e-3, 1).unwrap();
        let l = (4.0f64 / 1e-3).ln();
        assert!((kk - (l + 0.25 * (l - 1.0) * 1e-6)).abs() < 1e-15);
        assert!((ee - 1.0 - 0.5 * (l - 0.5) * 1e-6).abs() < 1e-15);
        assert!(k_e_near_unit_modulus(0.5, 1).is_err());
    }
}
