use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use proptest::prelude::*;

use wkbdet::actions::{action_binomial, action_large_v, action_numeric, action_quartic};
use wkbdet::functional::{wronskian_residual_with, ConjugateProblem};
use wkbdet::phase::{transition_phases, PiPhase};
use wkbdet::specfun::{
    dk_dk, ellip_k, ellip_ke, inverse_landen, k_e_near_unit_modulus, landen_modulus, landen_transform,
};
use wkbdet::spectral::{harmonic_det, log_det, Parity, RecessiveOptions};
use wkbdet::stokes::{trace_stokes_curves, turning_points, CurveEnd, StokesOptions};
use wkbdet::wkb::MomentumBranch;
use wkbdet::{Modulus64, TrinomialMomentum64};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn degrees() -> impl Strategy<Value = (u32, u32)> {
    (1u32..=5).prop_flat_map(|h| (Just(2 * h), 0..h)).prop_map(|(n, mh)| (n, 2 * mh))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_identity(k in 0.05f64..0.95) {
        let h = 2e-3 * (1.0 - k);
        let kk = |x: f64| ellip_k(&Modulus64::from_k(x).unwrap()).unwrap();
        let fd = (8.0 * (kk(k + h) - kk(k - h)) - (kk(k + 2.0 * h) - kk(k - 2.0 * h))) / (12.0 * h);
        let d = dk_dk(&Modulus64::from_k(k).unwrap()).unwrap();
        prop_assert!((d - fd).abs() < 1e-8 * d.abs().max(1.0), "{} {}", d, fd);
    }

    #[test]
    fn series_remainder_order(log_kp in -6.0f64..-0.53, order in 1usize..4) {
        let kp = 10f64.powf(log_kp);
        let (k0, e0) = ellip_ke(&Modulus64::from_kprime(kp).unwrap()).unwrap();
        let (ks, es) = k_e_near_unit_modulus(kp, order).unwrap();
        let bound = kp.powi(2 * order as i32 + 2) * ((4.0 / kp).ln() + 1.0) + 2e-15 * k0;
        prop_assert!((ks - k0).abs() <= bound && (es - e0).abs() <= bound, "{} {}", ks - k0, es - e0);
    }

    #[test]
    fn landen_closure(kdp in 0.01f64..1.0) {
        let (kk, ee) = landen_transform(kdp).unwrap();
        let k = landen_modulus(kdp);
        let (back, kd, ed) = inverse_landen(k, kk, ee);
        let (kd0, ed0) = ellip_ke(&Modulus64::from_kprime(kdp).unwrap()).unwrap();
        prop_assert!((back - kdp).abs() < 1e-14);
        prop_assert!((kd - kd0).abs() < 1e-12 * kd0 && (ed - ed0).abs() < 1e-12 * ed0);
    }

    #[test]
    fn quartic_homogeneity(v in 0.0f64..6.0, lam in 0.01f64..6.0, s in 0.3f64..3.0) {
        // q -> s q: I(s^2 v, s^4 lambda) = s^3 I(v, lambda)
        let a = action_quartic(v, lam).unwrap().value.re;
        let b = action_quartic(s * s * v, s.powi(4) * lam).unwrap().value.re;
        prop_assert!((b - s.powi(3) * a).abs() < 1e-11 * (1.0 + b.abs()), "{} {}", b, s.powi(3) * a);
    }

    #[test]
    fn quartic_continuous_across_perfect_square(lam in 0.05f64..8.0, eps in 1e-7f64..1e-4) {
        let v0 = 2.0 * lam.sqrt();
        prop_assert!(action_quartic(v0, lam).unwrap().value.re.abs() < 1e-10);
        let lo = action_quartic(v0 * (1.0 - eps), lam).unwrap().value.re;
        let hi = action_quartic(v0 * (1.0 + eps), lam).unwrap().value.re;
        // I is smooth in v there, with slope dI/dv
        let slope = (hi - lo) / (2.0 * eps * v0);
        let mid = 0.5 * (hi + lo);
        prop_assert!(mid.abs() < 1e-10 + (slope * eps * v0).abs() * eps, "{} {}", lo, hi);
        prop_assert!(lo.signum() != hi.signum() || lo.abs() < 1e-12);
    }

    #[test]
    fn binomial_scaling_covariance((n, m) in degrees(), u in 0.2f64..3.0, v in 0.1f64..3.0, s in 0.4f64..2.5) {
        let a = action_binomial(u, c(v, 0.0), n, m).unwrap();
        let b = action_binomial(u * s.powi(n as i32 + 2), c(v * s.powi(m as i32 + 2), 0.0), n, m).unwrap();
        // the finite part picks up -(2/N) beta_{-1} log s when the residue is live
        let t = TrinomialMomentum64::new(n, m, u, c(v, 0.0), c(0.0, 0.0)).unwrap();
        let anomaly = -2.0 / n as f64 * t.residue() * s.ln();
        let scale = 1.0 + a.value.norm() + b.value.norm();
        prop_assert!((b.value - a.value - anomaly).norm() < 1e-12 * scale, "({},{}) {} {}", n, m, b.value - a.value, anomaly);
    }

    #[test]
    fn residue_consistency((n, m) in degrees(), u in 0.2f64..3.0, v in 0.1f64..3.0, lam in 0.0f64..3.0) {
        let t = TrinomialMomentum64::new(n, m, u, c(v, 0.0), c(0.0, 0.0)).unwrap();
        let a = action_binomial(u, c(v, 0.0), n, m).unwrap();
        prop_assert!((a.residue - t.residue()).norm() < 1e-13 * (1.0 + t.residue().norm()));
        let q = action_quartic(v, lam).unwrap();
        let tq = TrinomialMomentum64::real(4, 2, v, lam).unwrap();
        prop_assert_eq!(q.residue, tq.residue());
        if m >= 2 {
            let l = action_large_v(n, m, lam, v).unwrap();
            let tl = TrinomialMomentum64::new(n, m, 1.0, c(v, 0.0), c(lam, 0.0)).unwrap();
            prop_assert!((l.residue - tl.residue()).norm() < 1e-13 * (1.0 + tl.residue().norm()));
        }
    }

    #[test]
    fn pi_phase_algebra(a in -40i64..40, b in 1i64..24, x in -40i64..40, y in 1i64..24) {
        let p = PiPhase::new(Ratio::new(a, b));
        let q = PiPhase::new(Ratio::new(x, y));
        let two = Ratio::from_integer(2);
        prop_assert!(p.turns() >= Ratio::from_integer(0) && p.turns() < two);
        prop_assert!((p + (-p)).is_identity());
        prop_assert_eq!(p + q, q + p);
        let z = (p + q).to_complex() - p.to_complex() * q.to_complex();
        prop_assert!(z.norm() < 1e-12);
        prop_assert_eq!(PiPhase::new(Ratio::new(a, b) + two), p);
    }

    #[test]
    fn harmonic_log_value_consistent(re in -20.0f64..20.0, im in -20.0f64..20.0) {
        for parity in [Parity::Even, Parity::Odd] {
            let d = harmonic_det(parity, c(re, im));
            if d.value.norm() > 1e-200 && d.value.is_finite() {
                prop_assert!((d.log_value.exp() - d.value).norm() <= 1e-12 * d.value.norm());
            }
        }
    }

    #[test]
    fn branch_continuity(vr in -4.0f64..4.0, vi in 0.3f64..4.0, lr in -1.0f64..1.0, li in -1.0f64..1.0) {
        let t = TrinomialMomentum64::new(4, 2, 1.0, c(vr, vi), c(lr, li)).unwrap();
        let b = match MomentumBranch::new(&t) {
            Ok(b) => b,
            Err(_) => return Ok(()),
        };
        let mut prev = b.at(0.0);
        for i in 1..2000 {
            let q = i as f64 * 0.005;
            let p = b.at(q);
            prop_assert!((p - prev).norm() < (p + prev).norm(), "sheet flip at {}", q);
            prop_assert!((p * p - t.momentum_squared(c(q, 0.0))).norm() < 1e-9 * (1.0 + p.norm_sqr()));
            prev = p;
        }
        prop_assert!(b.at(10.0).re > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn oracle_equivalence(v in 0.1f64..10.0, lam in 0.1f64..10.0) {
        let q = action_quartic(v, lam).unwrap().value.re;
        let n = action_numeric(&TrinomialMomentum64::real(4, 2, v, lam).unwrap(), 1e-10).unwrap();
        prop_assert!((q - n.value.re).abs() <= n.error_estimate.max(1e-8), "{} {}", q, n.value.re);
    }

    #[test]
    fn cyclic_closure(idx in 0usize..6, lr in -3.0f64..3.0, li in -3.0f64..3.0, vr in -3.0f64..3.0, vi in -3.0f64..3.0) {
        let (n, m) = [(4u32, 2u32), (6, 2), (6, 4), (8, 2), (8, 4), (8, 6)][idx];
        let (l0, v0) = (c(lr, li), c(vr, vi));
        let (l, v) = ConjugateProblem::iterate(n, m, l0, v0, n / 2 + 1).unwrap();
        prop_assert!((l - l0).norm() < 1e-12 * (1.0 + l0.norm()) && (v - v0).norm() < 1e-12 * (1.0 + v0.norm()));
    }

    #[test]
    fn turning_point_multiplicities((n, m) in degrees(), r in 0.5f64..8.0, th in -3.0f64..3.0, lam in 0.0f64..2.0) {
        let tp = turning_points(n, m, Complex64::from_polar(r, th), c(lam, 0.0)).unwrap();
        prop_assert_eq!(tp.points.iter().map(|p| p.multiplicity).sum::<usize>(), n as usize);
        // q -> -q symmetry of the root set
        for p in &tp.points {
            prop_assert!(tp.points.iter().any(|o| (o.q + p.q).norm() < 1e-7 * (1.0 + p.q.norm())));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stokes_curve_count_and_symmetry(th in -2.9f64..2.9, lr in 0.05f64..1.0, li in -0.5f64..0.5) {
        let d = trace_stokes_curves(4, 2, Complex64::from_polar(5.0, th), c(lr, li), &StokesOptions::default()).unwrap();
        // each root launches multiplicity + 2 curves; joined pairs are kept once
        let launched: usize = d.turning_points.iter().map(|p| p.multiplicity + 2).sum();
        let joined = d.curves.iter().filter(|cv| matches!(cv.end, CurveEnd::TurningPoint { .. })).count();
        prop_assert_eq!(d.curves.len() + joined, launched);
        for a in &d.curves {
            let mirrored = d.curves.iter().any(|b| {
                b.samples.len() == a.samples.len()
                    && a.samples.iter().zip(&b.samples).all(|(x, y)| (*x + *y).norm() < 1e-7)
            });
            let joined_a = matches!(a.end, CurveEnd::TurningPoint { .. });
            prop_assert!(mirrored || joined_a);
        }
    }
}

#[test]
fn classical_part_extraction() {
    // pure quartic: log D+ + log D- - 2 I and log D+ - log D- - log(lambda)/2 vanish as lambda grows
    let m = TrinomialMomentum64::real(4, 2, 0.0, 0.0).unwrap();
    let mut prev = [f64::INFINITY; 2];
    for lam in [5.0, 20.0, 80.0, 320.0] {
        let p = log_det(&m, Parity::Even, lam, 1e-8).unwrap().log_value.re;
        let q = log_det(&m, Parity::Odd, lam, 1e-8).unwrap().log_value.re;
        let i = action_quartic(0.0, lam).unwrap().value.re;
        let s = (p + q - 2.0 * i).abs();
        let d = (p - q - 0.5 * lam.ln()).abs();
        assert!(s < prev[0] && d < prev[1], "lambda {lam}: {s} {d}");
        prev = [s, d];
    }
    assert!(prev[0] < 5e-3 && prev[1] < 1e-6, "{prev:?}");
}

#[test]
fn wronskian_residual_tracks_estimate() {
    // shrinking the matching radius degrades the determinants; the residual follows the estimate
    let m = TrinomialMomentum64::real(4, 2, 2.0, 0.7).unwrap();
    let mut last = 0.0;
    for r in [4.0, 3.0, 2.0, 1.5] {
        let w = wronskian_residual_with(&m, RecessiveOptions { r: Some(r), allow_outside_sector: false }).unwrap();
        let res = w.residual.norm();
        assert!(res <= w.error_estimate + 1e-13, "R = {r}: {res} > {}", w.error_estimate);
        if r < 4.0 {
            assert!(res >= 0.1 * w.error_estimate, "R = {r}: estimate not proportional");
            assert!(res > last);
        }
        last = res;
    }
}

#[test]
fn sector_angle_matches_closed_form() {
    for (n, m) in [(4u32, 2u32), (6, 2), (6, 4), (8, 2)] {
        let th = wkbdet::spectral::sector_theta(n, m);
        assert!((th - (m as f64 + 2.0) * PI / (n as f64 + 2.0)).abs() < 1e-15);
        assert!(transition_phases(n, m).all_hold());
    }
}
