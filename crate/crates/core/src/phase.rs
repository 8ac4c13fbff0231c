//! Exact phase bookkeeping: angles as rational multiples of `pi`.

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::trinomial::exponent_j;

pub type Q = Ratio<i64>;

/// The phase `exp(i pi r)`, with `r` reduced to `[0, 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PiPhase(Q);

impl PiPhase {
    pub fn new(r: Q) -> Self {
        let two = Q::from_integer(2);
        let mut x = r % two;
        if x < Q::zero() {
            x += two;
        }
        PiPhase(x)
    }

    pub fn turns(self) -> Q {
        self.0
    }

    pub fn radians(self) -> f64 {
        std::f64::consts::PI * (*self.0.numer() as f64) / (*self.0.denom() as f64)
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(1.0, self.radians())
    }

    pub fn is_identity(self) -> bool {
        self.0.is_zero()
    }
}

impl std::ops::Add for PiPhase {
    type Output = PiPhase;
    fn add(self, o: PiPhase) -> PiPhase {
        PiPhase::new(self.0 + o.0)
    }
}

impl std::ops::Neg for PiPhase {
    type Output = PiPhase;
    fn neg(self) -> PiPhase {
        PiPhase::new(-self.0)
    }
}

impl std::ops::Mul<Q> for PiPhase {
    type Output = PiPhase;
    fn mul(self, k: Q) -> PiPhase {
        PiPhase::new(self.0 * k)
    }
}

/// `phi_N / pi = 4 / (N + 2)`.
pub fn symmetry_angle(n: u32) -> Q {
    Q::new(4, n as i64 + 2)
}

/// `Theta / pi = (M + 2) / (N + 2)`.
pub fn sector_angle(n: u32, m: u32) -> Q {
    Q::new(m as i64 + 2, n as i64 + 2)
}

/// One exact identity `lhs == rhs` between rational coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalIdentity {
    pub lhs: Q,
    pub rhs: Q,
    pub holds: bool,
}

impl RationalIdentity {
    fn new(lhs: Q, rhs: Q) -> Self {
        RationalIdentity { lhs, rhs, holds: lhs == rhs }
    }

    fn modulo_two(lhs: Q, rhs: Q) -> Self {
        RationalIdentity { lhs, rhs, holds: PiPhase::new(lhs) == PiPhase::new(rhs) }
    }
}

/// The closed-phase identities of the `v -> inf` transition, all as
/// coefficients of `i pi` (times `beta_{-1}(0)` or `Lambda` where relevant).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionPhases {
    /// `I(v) + I(v^[1])` against `phi_N beta_{-1}(0) / 2`, per unit `i pi beta`.
    pub action_sum: RationalIdentity,
    /// `v^[1]`-phase of `I`'s power law: `(pi/j) j` must be `pi` (sign flip).
    pub action_flip: RationalIdentity,
    /// `phi_N/4 + pi/(2 (M+2) j)` against `phi_M / 4`.
    pub z: RationalIdentity,
    /// Rotation of `Lambda` against `-phi_M` (mod `2 pi`).
    pub lambda_rotation: RationalIdentity,
    /// `A + A^[1]` against `-pi Lambda / 4`, per unit `i pi Lambda`; only for `M = 2`.
    pub a_sum: Option<RationalIdentity>,
    /// `(N/2 + 1)`-fold transform on `lambda` and `v` (mod `2 pi`).
    pub cyclic_lambda: RationalIdentity,
    pub cyclic_v: RationalIdentity,
}

impl TransitionPhases {
    pub fn all_hold(&self) -> bool {
        self.action_sum.holds
            && self.action_flip.holds
            && self.z.holds
            && self.lambda_rotation.holds
            && self.a_sum.map_or(true, |a| a.holds)
            && self.cyclic_lambda.holds
            && self.cyclic_v.holds
    }
}

pub fn transition_phases(n: u32, m: u32) -> TransitionPhases {
    let j = exponent_j(n, m);
    let inv_j = j.recip();
    let phi_n = symmetry_angle(n);
    let phi_m = symmetry_angle(m);
    let nn = n as i64;
    let mm = m as i64;
    let action_sum = if j.is_integer() {
        // I = -(2j/(N+2)) beta [log v + c], beta -> -beta, log v -> log v + i pi/j
        RationalIdentity::new(Q::new(2, 1) * j / Q::from_integer(nn + 2) * inv_j, phi_n / Q::from_integer(2))
    } else {
        // I ~ v^j flips sign; beta_{-1}(0) = 0
        RationalIdentity::new(Q::zero(), Q::zero())
    };
    let action_flip = RationalIdentity::modulo_two(inv_j * j, Q::one());
    let z = RationalIdentity::new(phi_n / Q::from_integer(4) + inv_j / Q::from_integer(2 * (mm + 2)), phi_m / Q::from_integer(4));
    let lambda_rotation = RationalIdentity::modulo_two(
        -Q::new(2, mm + 2) * Q::new(nn - mm, 2) * phi_n - phi_n,
        -phi_m,
    );
    let a_sum = (m == 2).then(|| {
        RationalIdentity::new(-Q::from_integer(nn + 2) / Q::from_integer(8 * (nn - 2)) * inv_j, -Q::new(1, 4))
    });
    let order = Q::from_integer(nn / 2 + 1);
    TransitionPhases {
        action_sum,
        action_flip,
        z,
        lambda_rotation,
        a_sum,
        cyclic_lambda: RationalIdentity::modulo_two(-phi_n * order, Q::zero()),
        cyclic_v: RationalIdentity::modulo_two(inv_j * order, Q::zero()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction() {
        assert_eq!(PiPhase::new(Q::new(-1, 2)).turns(), Q::new(3, 2));
        assert!(PiPhase::new(Q::from_integer(4)).is_identity());
        assert!((PiPhase::new(Q::new(1, 2)).to_complex() - Complex64::new(0.0, 1.0)).norm() < 1e-16);
    }

    #[test]
    fn quartic_values() {
        assert_eq!(symmetry_angle(4), Q::new(2, 3));
        assert_eq!(sector_angle(4, 2), Q::new(2, 3));
        assert_eq!(exponent_j(4, 2).recip(), Q::new(2, 3));
        assert_eq!(symmetry_angle(2), Q::from_integer(1));
    }
}
