//! Chaotic affine dynamics on quotients `R^N / G` of crystallographic
//! groups, exact chaos diagnostics, and a dead-beat observer that masks and
//! recovers a byte stream sent over a truncated scalar channel.

pub mod codec;
pub mod diagnostics;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod ops;
pub mod poly;
pub mod scalar;
pub mod sync;
pub mod tiling;

pub use dynamics::{AffineSystem, ChaosReport};
pub use error::{Error, Result};
pub use linalg::{IntMatrix, RatMatrix};
pub use poly::IntPoly;
pub use scalar::{Rational, Scalar};
pub use sync::ObserverKey;
pub use tiling::{builtin_group, FundamentalDomain, GroupSpec, Isometry};
