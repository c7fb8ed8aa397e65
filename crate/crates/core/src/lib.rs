//! Differential geometry on coordinate charts, with exact jets, for
//! hyper-Kähler metrics with a rotating circle action and the quaternionic
//! Kähler metrics they correspond to.

pub mod cli;
pub mod error;
pub mod hkside;
pub mod jet;
pub mod qkside;
pub mod quad;
pub mod sampling;
pub mod tensorlab;
pub mod verify;

pub use error::{GeoError, Result};
