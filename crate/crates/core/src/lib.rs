//! Exact intersection theory of divisor and F-curve classes on the moduli
//! space `M̄_{0,n}` of stable `n`-pointed rational curves, together with a
//! verifier for an F-nef divisor on `M̄_{0,12}` built from the (11,5,2)
//! biplane that is not an effective sum of boundary divisors.
//!
//! Module map:
//!
//! * [`setcore`]: subset masks, generator keys, F-curve enumeration.
//! * [`biplane`]: the (11,5,2) biplane and its automorphism group.
//! * [`picard`]: divisor classes, relations, named divisors, pullback.
//! * [`curves`]: the intersection pairing and curve functionals.
//! * [`fcone`]: F-nef scans, certificates and extremality.
//! * [`formats`]: text and JSON file formats.

pub mod biplane;
pub mod curves;
pub mod error;
pub mod fcone;
pub mod formats;
pub mod modrank;
pub mod picard;
pub mod setcore;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
