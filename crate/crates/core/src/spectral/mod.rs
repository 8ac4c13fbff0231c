//! Eigenvalues, zeta functions and spectral determinants of
//! `-d^2/dq^2 + u q^N + v q^M + lambda` on the half-line, by parity.

mod det;
mod eigen;
mod recessive;
mod zeta;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use det::{
    det_entire, det_entire_with, harmonic_det, log_det, log_det_with, scaling_factor, symanzik_rescale, DetOptions,
    SymanzikScaling,
};
pub use eigen::{bohr_sommerfeld_action, eigenvalues, eigenvalues_scaled, ParitySpectrum, WeylModel};
pub use recessive::{det_complex, recessive_solution, sector_theta, RecessiveOptions, RecessiveSolution};
pub use zeta::{convergence_abscissa, zeta, zeta_with, zeta_zero, ZetaValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// `+1` for even, `-1` for odd.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn offset(self) -> usize {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetMethod {
    ZetaIntegrated,
    HadamardProduct,
    RecessiveSolution,
    HarmonicClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeterminantValue {
    pub value: Complex64,
    pub log_value: Complex64,
    pub parity: Parity,
    pub method: DetMethod,
    pub error_estimate: f64,
}

impl DeterminantValue {
    pub(crate) fn from_log(log_value: Complex64, parity: Parity, method: DetMethod, error_estimate: f64) -> Self {
        DeterminantValue { value: log_value.exp(), log_value, parity, method, error_estimate }
    }
}
