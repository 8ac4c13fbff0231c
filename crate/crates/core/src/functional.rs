//! The conjugate problem, the bilinear Wronskian identity, large-`v`
//! factorization of the determinants and the `v -> inf` transition.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::actions::action_binomial;
use crate::error::{Error, Result};
use crate::phase::{sector_angle, symmetry_angle, transition_phases, PiPhase, TransitionPhases, Q};
use crate::specfun::gamma_real;
use crate::spectral::{
    det_complex, det_entire_with, eigenvalues, harmonic_det, DetOptions, Parity, RecessiveOptions,
};
use crate::trinomial::{exponent_j, TrinomialMomentum};

type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

fn phase(x: f64) -> C64 {
    C64::from_polar(1.0, x)
}

/// `v^p` with `arg v` taken as given (not reduced).
fn pow_arg(modulus: f64, arg: f64, p: f64) -> C64 {
    C64::from_polar(modulus.powf(p), arg * p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugateProblem {
    pub n: u32,
    pub m: u32,
    /// `phi_N = 4 pi / (N + 2)`.
    pub phi_n: f64,
    pub lambda1: C64,
    pub v1: C64,
    /// `Lambda = v^{-2/(M+2)} lambda` and its image `e^{-i phi_M} Lambda`.
    pub big_lambda: C64,
    pub big_lambda1: C64,
    /// `e^{i phi_M / 4}`.
    pub z: C64,
}

/// `lambda^[1] = e^{-i phi_N} lambda`, `v^[1] = e^{i pi/j} v`.
pub fn conjugate_params(n: u32, m: u32, lambda: C64, v: C64) -> Result<ConjugateProblem> {
    TrinomialMomentum::<f64>::new(n, m, 1.0, v, lambda)?;
    let phi_n = PiPhase::new(symmetry_angle(n)).radians();
    let phi_m = symmetry_angle(m);
    let inv_j = exponent_j(n, m).recip();
    let pi_over_j = std::f64::consts::PI * (*inv_j.numer() as f64) / (*inv_j.denom() as f64);
    let lambda1 = phase(-phi_n) * lambda;
    let (r, th) = (v.norm(), v.arg());
    let v1 = phase(pi_over_j) * v;
    let p = -2.0 / (m as f64 + 2.0);
    let big_lambda = pow_arg(r, th, p) * lambda;
    // v^[1] on the unreduced argument th + pi/j
    let via_v1 = pow_arg(r, th + pi_over_j, p) * lambda1;
    let phi_m_rad = std::f64::consts::PI * (*phi_m.numer() as f64) / (*phi_m.denom() as f64);
    let big_lambda1 = phase(-phi_m_rad) * big_lambda;
    if (via_v1 - big_lambda1).norm() > 1e-12 * (1.0 + big_lambda.norm()) {
        return Err(Error::Numeric(format!("Lambda^[1] mismatch: {via_v1} vs {big_lambda1}")));
    }
    Ok(ConjugateProblem { n, m, phi_n, lambda1, v1, big_lambda, big_lambda1, z: phase(phi_m_rad / 4.0) })
}

impl ConjugateProblem {
    /// Parameters after applying the transform `k` times to `(lambda, v)`.
    pub fn iterate(n: u32, m: u32, lambda: C64, v: C64, k: u32) -> Result<(C64, C64)> {
        let (mut l, mut w) = (lambda, v);
        for _ in 0..k {
            let c = conjugate_params(n, m, l, w)?;
            l = c.lambda1;
            w = c.v1;
        }
        Ok((l, w))
    }
}

/// `D^+` and `D^-` from the recessive solution.
fn det_pair(m: &TrinomialMomentum<f64>, opts: RecessiveOptions) -> Result<([C64; 2], f64)> {
    let p = det_complex(m, Parity::Even, opts)?;
    let q = det_complex(m, Parity::Odd, opts)?;
    Ok(([p.value, q.value], p.error_estimate.max(q.error_estimate)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WronskianCheck {
    pub lhs: C64,
    /// `2 i e^{i phi_N beta_{-1}(0) / 2}`.
    pub rhs: C64,
    pub residual: C64,
    pub relative: f64,
    /// Determinant error budget propagated to the left side.
    pub error_estimate: f64,
}

/// `e^{i phi_N/4} D^{+[1]} D^- - e^{-i phi_N/4} D^+ D^{-[1]} - 2 i e^{i phi_N beta_{-1}(0)/2}`
/// for the problem `m` (its `lambda` included).
pub fn wronskian_residual(m: &TrinomialMomentum<f64>) -> Result<WronskianCheck> {
    wronskian_residual_with(m, RecessiveOptions::default())
}

pub fn wronskian_residual_with(m: &TrinomialMomentum<f64>, opts: RecessiveOptions) -> Result<WronskianCheck> {
    let c = conjugate_params(m.n(), m.m(), m.lambda(), m.v())?;
    let m1 = TrinomialMomentum::new(m.n(), m.m(), m.u(), c.v1, c.lambda1)?;
    let (d, e0) = det_pair(m, opts)?;
    let (d1, e1) = det_pair(&m1, opts)?;
    let w = phase(c.phi_n / 4.0);
    let t1 = w * d1[0] * d[1];
    let t2 = w.conj() * d[0] * d1[1];
    let lhs = t1 - t2;
    let rhs = 2.0 * I * (I * c.phi_n * m.residue() / 2.0).exp();
    let residual = lhs - rhs;
    let error_estimate = (e0 + e1) * (t1.norm() + t2.norm());
    Ok(WronskianCheck { lhs, rhs, residual, relative: residual.norm() / rhs.norm(), error_estimate })
}

/// `A(lambda, v) = [(N + 2) log v + 4 N log 2] Lambda / (8 (N - 2))` (for `M = 2`).
pub fn anomaly_a(n: u32, big_lambda: C64, log_v: C64) -> C64 {
    let nf = n as f64;
    ((nf + 2.0) * log_v + 4.0 * nf * std::f64::consts::LN_2) * big_lambda / (8.0 * (nf - 2.0))
}

/// `log D_M^+-(Lambda)` for `-d^2/dq^2 + q^M + Lambda`.
pub fn limit_log_det(m_deg: u32, parity: Parity, big_lambda: C64) -> Result<C64> {
    if m_deg == 2 {
        return Ok(harmonic_det(parity, big_lambda).log_value);
    }
    let b = TrinomialMomentum::new(m_deg, 0, 1.0, C64::new(0.0, 0.0), big_lambda)?;
    Ok(det_complex(&b, parity, RecessiveOptions::default())?.log_value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LargeVFactorization {
    pub big_lambda: C64,
    /// `I(v)` of `q^N + v q^M`.
    pub action: C64,
    /// `A(lambda, v)` when `M = 2`, else zero.
    pub anomaly: C64,
    /// `(even, odd)` log-values.
    pub log_predicted: [C64; 2],
    pub log_computed: [C64; 2],
    /// computed / predicted.
    pub ratio: [C64; 2],
}

/// `D_N^+-(lambda, v) ~ e^{I(v)} e^{delta_{M,2} A} v^{+-1/(2(M+2))} D_M^+-(Lambda)`.
pub fn large_v_factorization(n: u32, m: u32, lambda: C64, v: C64) -> Result<LargeVFactorization> {
    let problem = TrinomialMomentum::new(n, m, 1.0, v, lambda)?;
    if m == 0 {
        return Err(Error::Domain("large-v factorization needs M >= 2".into()));
    }
    let c = conjugate_params(n, m, lambda, v)?;
    let action = action_binomial(1.0, v, n, m)?.value;
    let log_v = v.ln();
    let anomaly = if m == 2 { anomaly_a(n, c.big_lambda, log_v) } else { C64::new(0.0, 0.0) };
    let mut log_predicted = [C64::new(0.0, 0.0); 2];
    let mut log_computed = [C64::new(0.0, 0.0); 2];
    let mut ratio = [C64::new(0.0, 0.0); 2];
    for (i, parity) in [Parity::Even, Parity::Odd].into_iter().enumerate() {
        let lm = limit_log_det(m, parity, c.big_lambda)?;
        log_predicted[i] = action + anomaly + parity.sign() * log_v / (2.0 * (m as f64 + 2.0)) + lm;
        log_computed[i] = det_complex(&problem, parity, RecessiveOptions::default())?.log_value;
        ratio[i] = (log_computed[i] - log_predicted[i]).exp();
    }
    Ok(LargeVFactorization { big_lambda: c.big_lambda, action, anomaly, log_predicted, log_computed, ratio })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Instanton {
    /// `int_0^{q0} (q^N + v q^M)^{1/2} dq`.
    pub action: C64,
    /// First outer turning point `e^{-i pi/(N-M)} v^{1/(N-M)}`.
    pub q0: C64,
    pub theta: f64,
    /// Smallest `arg v > 0` where the action is real positive, over `pi`.
    pub first_real_arg: Q,
    pub matches_theta: bool,
}

/// `Theta = (M + 2) pi / (N + 2)`.
pub fn sector_theta(n: u32, m: u32) -> f64 {
    crate::spectral::sector_theta(n, m)
}

pub fn instanton_action(n: u32, m: u32, v: C64) -> Result<Instanton> {
    TrinomialMomentum::<f64>::new(n, m, 1.0, v, C64::new(0.0, 0.0))?;
    let (nf, mf) = (n as f64, m as f64);
    let d = nf - mf;
    let pi = std::f64::consts::PI;
    let pref = pi.sqrt() / (nf + 2.0) * gamma_real((mf + 2.0) / (2.0 * d))? / gamma_real((nf + 2.0) / (2.0 * d))?;
    let (r, th) = (v.norm(), v.arg());
    // [e^{-i (M+2) pi} v^{N+2}]^{1/(2(N-M))} on the continuous argument
    let arg = (-(mf + 2.0) * pi + (nf + 2.0) * th) / (2.0 * d);
    let action = C64::from_polar(pref * r.powf((nf + 2.0) / (2.0 * d)), arg);
    let q0 = C64::from_polar(r.powf(1.0 / d), (th - pi) / d);
    // ((M+2) + 4k(N-M)) / (N+2) for the smallest positive value
    let (nn, mm) = (n as i64, m as i64);
    let mut k = -((mm + 2) / (4 * (nn - mm))) - 1;
    let first_real_arg = loop {
        let t = Q::new(mm + 2 + 4 * k * (nn - mm), nn + 2);
        if t > Q::from_integer(0) {
            break t;
        }
        k += 1;
    };
    Ok(Instanton {
        action,
        q0,
        theta: sector_theta(n, m),
        first_real_arg,
        matches_theta: first_real_arg == sector_angle(n, m),
    })
}

/// `e^{i phi_M/4} D_M^+(e^{-i phi_M} L) D_M^-(L) - e^{-i phi_M/4} D_M^+(L) D_M^-(e^{-i phi_M} L)
/// - 2 i e^{delta_{M,2} i pi L / 4}`, returned with the right side.
pub fn limit_relation_residual(m_deg: u32, big_lambda: C64) -> Result<(C64, C64)> {
    if m_deg < 2 || m_deg % 2 != 0 {
        return Err(Error::Domain(format!("M must be even and >= 2, got {m_deg}")));
    }
    let phi = PiPhase::new(symmetry_angle(m_deg)).radians();
    let l1 = phase(-phi) * big_lambda;
    let rhs = if m_deg == 2 { 2.0 * I * (I * std::f64::consts::PI * big_lambda / 4.0).exp() } else { 2.0 * I };
    let (dp, dm, dp1, dm1) = if m_deg == 2 {
        (
            harmonic_det(Parity::Even, big_lambda).value,
            harmonic_det(Parity::Odd, big_lambda).value,
            harmonic_det(Parity::Even, l1).value,
            harmonic_det(Parity::Odd, l1).value,
        )
    } else {
        let b = TrinomialMomentum::new(m_deg, 0, 1.0, C64::new(0.0, 0.0), C64::new(0.0, 0.0))?;
        let opts = DetOptions::default();
        let se = eigenvalues(&b, Parity::Even, opts.count, 1e-12)?;
        let so = eigenvalues(&b, Parity::Odd, opts.count, 1e-12)?;
        (
            det_entire_with(&se, &b, big_lambda, opts)?.value,
            det_entire_with(&so, &b, big_lambda, opts)?.value,
            det_entire_with(&se, &b, l1, opts)?.value,
            det_entire_with(&so, &b, l1, opts)?.value,
        )
    };
    let lhs = phase(phi / 4.0) * dp1 * dm - phase(-phi / 4.0) * dp * dm1;
    Ok((lhs - rhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditPoint {
    pub modulus: f64,
    pub v: C64,
    pub v1: C64,
    pub big_lambda: C64,
    pub big_lambda1: C64,
    /// Left side of the Wronskian identity over `e^{I + I^[1]} e^{A + A^[1]}`.
    pub bracket: C64,
    /// `z D_M^+(Lambda^[1]) D_M^-(Lambda) - z^{-1} D_M^+(Lambda) D_M^-(Lambda^[1])`.
    pub target: C64,
    pub deviation: f64,
    /// `|term_N / term_M - 1|` for the two products separately.
    pub term_deviation: [f64; 2],
    /// `I(v) + I(v^[1])` and `i phi_N beta_{-1}(0) / 2`.
    pub action_sum: C64,
    pub action_sum_expected: C64,
    /// `A + A^[1]` and `-i pi Lambda / 4` (zero unless `M = 2`).
    pub anomaly_sum: C64,
    pub anomaly_sum_expected: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionAudit {
    pub n: u32,
    pub m: u32,
    pub lambda: C64,
    pub phases: TransitionPhases,
    pub points: Vec<AuditPoint>,
    /// Term deviations shrink with ratio of successive differences < 0.6.
    pub converged: bool,
}

pub const AUDIT_LADDER: [f64; 5] = [5.0, 10.0, 20.0, 40.0, 80.0];

fn check_transition_domain(n: u32, m: u32) -> Result<()> {
    if exponent_j(n, m) <= Q::from_integer(1) {
        return Err(Error::Restriction(format!(
            "j = {} <= 1: the transition holds only formally for (N, M) = ({n}, {m})",
            exponent_j(n, m)
        )));
    }
    Ok(())
}

/// One ladder point at `v = |v| e^{-i pi / (2j)}`.
pub fn audit_point(n: u32, m: u32, lambda: C64, modulus: f64) -> Result<AuditPoint> {
    check_transition_domain(n, m)?;
    let inv_j = exponent_j(n, m).recip();
    let pi_over_j = std::f64::consts::PI * (*inv_j.numer() as f64) / (*inv_j.denom() as f64);
    let v = C64::from_polar(modulus, -pi_over_j / 2.0);
    let c = conjugate_params(n, m, lambda, v)?;
    let problem = TrinomialMomentum::new(n, m, 1.0, v, lambda)?;
    let m1 = TrinomialMomentum::new(n, m, 1.0, c.v1, c.lambda1)?;
    let (d, _) = det_pair(&problem, RecessiveOptions::default())?;
    let (d1, _) = det_pair(&m1, RecessiveOptions::default())?;
    let action_sum = action_binomial(1.0, v, n, m)?.value + action_binomial(1.0, c.v1, n, m)?.value;
    let action_sum_expected = I * c.phi_n * problem.residue() / 2.0;
    let (anomaly_sum, anomaly_sum_expected) = if m == 2 {
        (
            anomaly_a(n, c.big_lambda, v.ln()) + anomaly_a(n, c.big_lambda1, c.v1.ln()),
            -I * std::f64::consts::PI * c.big_lambda / 4.0,
        )
    } else {
        (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    };
    let scale = (action_sum + anomaly_sum).exp();
    let w = phase(c.phi_n / 4.0);
    let t1 = w * d1[0] * d[1] / scale;
    let t2 = w.conj() * d[0] * d1[1] / scale;
    let bracket = t1 - t2;
    let lp = |p, l| limit_log_det(m, p, l).map(|x| x.exp());
    let s1 = c.z * lp(Parity::Even, c.big_lambda1)? * lp(Parity::Odd, c.big_lambda)?;
    let s2 = c.z.conj() * lp(Parity::Even, c.big_lambda)? * lp(Parity::Odd, c.big_lambda1)?;
    let target = s1 - s2;
    Ok(AuditPoint {
        modulus,
        v,
        v1: c.v1,
        big_lambda: c.big_lambda,
        big_lambda1: c.big_lambda1,
        bracket,
        target,
        deviation: (bracket - target).norm() / target.norm(),
        term_deviation: [(t1 / s1 - 1.0).norm(), (t2 / s2 - 1.0).norm()],
        action_sum,
        action_sum_expected,
        anomaly_sum,
        anomaly_sum_expected,
    })
}

/// Ratio-of-differences test on a decreasing sequence.
pub fn ladder_converges(devs: &[f64], floor: f64) -> bool {
    if devs.len() < 3 {
        return false;
    }
    let last = devs.len() - 1;
    if devs[last] < floor {
        return true;
    }
    let r1 = devs[last] / devs[last - 1];
    let r2 = devs[last - 1] / devs[last - 2];
    r1 < 0.6 && r2 < 0.6
}

/// Evaluates the audit along `ladder` (sequentially; see [`audit_point`]
/// for concurrent use).
pub fn transition_audit(n: u32, m: u32, lambda: C64, ladder: &[f64]) -> Result<TransitionAudit> {
    check_transition_domain(n, m)?;
    let points = ladder.iter().map(|&r| audit_point(n, m, lambda, r)).collect::<Result<Vec<_>>>()?;
    Ok(assemble_audit(n, m, lambda, points))
}

pub fn assemble_audit(n: u32, m: u32, lambda: C64, points: Vec<AuditPoint>) -> TransitionAudit {
    let devs: Vec<f64> = points.iter().map(|p| p.term_deviation[0].max(p.term_deviation[1])).collect();
    TransitionAudit { n, m, lambda, phases: transition_phases(n, m), converged: ladder_converges(&devs, 1e-9), points }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadOptions};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn conjugate_quartic() {
        let cp = conjugate_params(4, 2, c(0.7, 0.0), c(2.0, 0.0)).unwrap();
        assert!((cp.phi_n - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-15);
        assert!((cp.v1 - 2.0 * phase(2.0 * std::f64::consts::PI / 3.0)).norm() < 1e-15);
        assert!((cp.big_lambda1 + cp.big_lambda).norm() < 1e-15);
        assert!((cp.z.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cyclic_closure() {
        for (n, m) in [(4u32, 2u32), (6, 2), (6, 4), (8, 2), (8, 4)] {
            let (l0, v0) = (c(0.3, -1.1), c(2.5, 0.4));
            let (l, v) = ConjugateProblem::iterate(n, m, l0, v0, n / 2 + 1).unwrap();
            assert!((l - l0).norm() < 1e-13 && (v - v0).norm() < 1e-13, "({n},{m})");
        }
    }

    #[test]
    fn phase_identities_exact() {
        for n in [4u32, 6, 8] {
            for m in [2u32, 4] {
                if m < n {
                    assert!(transition_phases(n, m).all_hold(), "({n},{m})");
                }
            }
        }
    }

    #[test]
    fn harmonic_limit_relation() {
        for l in [c(0.3, 0.1), c(0.0, 0.0), c(-1.7, 2.0)] {
            let (res, rhs) = limit_relation_residual(2, l).unwrap();
            assert!(res.norm() < 1e-12 * rhs.norm(), "{l}: {res}");
        }
    }

    #[test]
    fn quartic_wronskian() {
        for (l, v) in [(0.7, 2.0), (1.5, 3.0), (0.3, 5.0)] {
            let w = wronskian_residual(&TrinomialMomentum::real(4, 2, v, l).unwrap()).unwrap();
            assert!(w.relative < 1e-6, "{l} {v}: {w:?}");
            assert_eq!(w.rhs, c(0.0, 2.0));
        }
    }

    #[test]
    fn large_v_ratio_trend() {
        let mut prev = [f64::INFINITY; 2];
        for v in [5.0, 10.0, 20.0, 40.0] {
            let f = large_v_factorization(4, 2, c(1.0, 0.0), c(v, 0.0)).unwrap();
            for k in 0..2 {
                let dev = (f.ratio[k] - 1.0).norm();
                assert!(dev < prev[k]);
                prev[k] = dev;
            }
        }
        assert!(prev[0] < 0.02 && prev[1] < 0.02);
        // A for (4, 2): [6 log v + 16 log 2] Lambda / 16
        let a = anomaly_a(4, c(1.0, 0.0), c(3f64.ln(), 0.0));
        assert!((a.re - (6.0 * 3f64.ln() + 16.0 * 2f64.ln()) / 16.0).abs() < 1e-15);
    }

    #[test]
    fn instanton_values() {
        let ins = instanton_action(4, 2, c(5.0, 0.0)).unwrap();
        assert!((ins.theta - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-15);
        assert!(ins.matches_theta);
        assert_eq!(ins.first_real_arg, Q::new(2, 3));
        // straight-ray quadrature from 0 to q0: q = q0 t, q^N + v q^M = q0^M t^M v (1 - t^{N-M})
        for (n, m, v) in [(4u32, 2u32, c(5.0, 0.0)), (6, 4, c(2.0, 0.0)), (8, 2, c(3.0, 0.0))] {
            let ins = instanton_action(n, m, v).unwrap();
            let d = (n - m) as i32;
            let q = integrate(|t: f64| t.powi(m as i32 / 2) * (1.0 - t.powi(d)).sqrt(), 0.0, 1.0, &[], QuadOptions::new(1e-15, 1e-13)).unwrap();
            let mag = ins.q0.norm().powi(m as i32 / 2 + 1) * v.norm().sqrt() * q.value;
            assert!((ins.action.norm() - mag).abs() < 1e-10 * mag, "({n},{m})");
        }
        // supersymmetric family M = N/2 - 1 taken formally: Theta = pi/2
        assert_eq!(sector_angle(6, 2), Q::new(1, 2));
        // Im I = 0 at arg v = Theta
        let at = instanton_action(4, 2, C64::from_polar(5.0, 2.0 * std::f64::consts::PI / 3.0)).unwrap();
        assert!(at.action.im.abs() < 1e-12 * at.action.norm() && at.action.re > 0.0);
    }

    #[test]
    fn audit_restriction() {
        assert!(matches!(transition_audit(6, 2, c(0.5, 0.0), &AUDIT_LADDER), Err(Error::Restriction(_))));
    }

    #[test]
    fn audit_quartic() {
        let a = transition_audit(4, 2, c(0.5, 0.0), &AUDIT_LADDER).unwrap();
        assert!(a.converged);
        assert!(a.phases.all_hold());
        for p in &a.points {
            assert!(p.deviation < 1e-8);
            assert!((p.action_sum - p.action_sum_expected).norm() < 1e-9 * (1.0 + p.modulus.powf(1.5)));
            assert!((p.anomaly_sum - p.anomaly_sum_expected).norm() < 1e-13);
        }
    }

    #[test]
    fn quartic_limit_relation_via_product() {
        let (res, rhs) = limit_relation_residual(4, c(0.8, 0.0)).unwrap();
        assert!(res.norm() < 1e-6 * rhs.norm(), "{res}");
    }

    #[test]
    fn null_residue_degree_eight() {
        let m = TrinomialMomentum::real(8, 6, 1.5, 0.4).unwrap();
        assert!(m.residue_structurally_null());
        let w = wronskian_residual(&m).unwrap();
        assert_eq!(w.rhs, c(0.0, 2.0));
        assert!(w.relative < 1e-6, "{w:?}");
        // (8, 4): the conjugate point lies outside the sector
        let m = TrinomialMomentum::real(8, 4, 1.5, 0.4).unwrap();
        assert!(matches!(wronskian_residual(&m), Err(Error::SectorViolation { .. })));
        let opts = RecessiveOptions { allow_outside_sector: true, ..Default::default() };
        assert!(wronskian_residual_with(&m, opts).unwrap().relative < 1e-6);
    }
}
