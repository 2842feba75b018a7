//! Scalar abstraction shared by the LP core and the network model.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point scalar the solver stack is generic over (`f32` or `f64`).
///
/// The associated tolerances are the defaults used when no explicit option is
/// given; they scale with the precision of the type.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Absolute primal feasibility tolerance.
    const FEASIBILITY_TOL: f64;
    /// Relative optimality tolerance on reduced costs.
    const OPTIMALITY_TOL: f64;
    /// Smallest pivot magnitude accepted by the ratio test.
    const PIVOT_TOL: f64;
    /// Reduced-cost threshold for declaring a route violating.
    const PRICING_TOL: f64;

    /// Converts an `f64` literal; every finite `f64` is representable (possibly rounded).
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f64 {
    const FEASIBILITY_TOL: f64 = 1e-9;
    const OPTIMALITY_TOL: f64 = 1e-9;
    const PIVOT_TOL: f64 = 1e-11;
    const PRICING_TOL: f64 = 1e-7;
}

impl Scalar for f32 {
    const FEASIBILITY_TOL: f64 = 1e-5;
    const OPTIMALITY_TOL: f64 = 1e-5;
    const PIVOT_TOL: f64 = 1e-6;
    const PRICING_TOL: f64 = 1e-4;
}
