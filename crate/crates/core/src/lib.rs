//! WKB actions, spectral determinants and exact functional relations for
//! trinomial potentials `u q^N + v q^M`.

pub mod actions;
pub mod error;
pub mod functional;
pub mod ode;
pub mod phase;
pub mod poly;
pub mod quad;
pub mod roots1d;
pub mod scalar;
pub mod specfun;
pub mod spectral;
pub mod stokes;
pub mod trinomial;
pub mod wkb;

pub use actions::{ActionMethod, RegularizedAction};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use scalar::{cis, Real, C};
pub use specfun::{Modulus, ModulusKind};
pub use trinomial::TrinomialMomentum;

pub type Modulus64 = Modulus<f64>;
pub type TrinomialMomentum64 = TrinomialMomentum<f64>;
pub type RegularizedAction64 = RegularizedAction<f64>;
