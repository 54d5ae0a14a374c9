//! Character sums and polynomial exponential sums over generalized
//! arithmetic progressions, with the completion-method bounds and exact
//! small-scale oracles for every step.

pub mod characters;
pub mod congruence;
pub mod constants;
pub mod error;
pub mod fourier;
pub mod gap;
pub mod harness;
pub mod modring;
pub mod sums;
pub mod verify;

pub use characters::{CharacterGroup, CharacterRecord, DirichletCharacter, GaussSumValue};
pub use congruence::{BoxInterval, CongruenceInstance};
pub use error::{Error, Result};
pub use fourier::FourierProfile;
pub use gap::Gap;
pub use harness::{ExtremalResult, ReportFormat, SweepConfig};
pub use modring::{ComplexValue, Modulus};
pub use sums::{PolynomialModQ, SumKind, SumReport};
