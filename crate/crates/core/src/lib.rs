//! Explicit lower bounds for smooth Yamabe invariants, computed exactly.
//!
//! Constants of the form `rational * pi^(m/2)` are kept as [`PiMonomial`]s and
//! compared without floating point; decimal output always comes with a
//! [`CertifiedInterval`] enclosure.

pub mod asymptotics;
pub mod error;
pub mod exactnum;
pub mod invariants;
pub mod scans;
pub mod surgery_bounds;
pub mod yamabe_ode;

pub use error::{Error, Result};
pub use exactnum::{CertifiedInterval, PiMonomial};
