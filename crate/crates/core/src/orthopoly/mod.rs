//! Monic Charlier, Meixner and Krawtchouk polynomials, the counting laws they are
//! orthogonal for, and the factorial functions behind their closed forms.
//!
//! Charlier pairs with independent walkers (Poisson marginals), Meixner with the
//! inclusion process (negative binomial marginals) and Krawtchouk with the
//! exclusion process (binomial marginals).

mod distribution;
mod factorial;
mod families;
mod krawtchouk;

pub use distribution::{stirling2, CountDistribution};
pub use factorial::{factorial, falling_factorial, rising_factorial};
pub use families::{charlier, krawtchouk, meixner, meixner_generating, PolyParams, QUADRATURE_TAIL};
pub use krawtchouk::KrawtchoukBasis;
