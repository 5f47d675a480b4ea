pub mod discrete;
pub mod error;
pub mod gsip;
pub mod orthopoly;
pub mod pointconfig;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
