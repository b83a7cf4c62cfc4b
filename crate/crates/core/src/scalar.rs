//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point scalar the maps, vector fields and solvers are generic over.
///
/// Implemented for `f32` and `f64`. Tolerances are specified in `f64` and
/// converted with [`Real::lit`]; with `f32` the tightest defaults are below
/// machine precision, so callers should loosen them.
pub trait Real:
    Float + FromPrimitive + NumAssign + Debug + Display + LowerExp + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into the scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    /// Lossy conversion used for diagnostics and error payloads.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + NumAssign + Debug + Display + LowerExp + Sum + Send + Sync + 'static
{
}
