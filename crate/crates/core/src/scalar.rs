//! Scalar abstraction: every numerical routine in this crate is generic over a
//! floating-point type through [`Real`], with `f32`/`f64` picked up by the
//! blanket impl. Concrete f64 aliases live at the crate root.

use num_complex::Complex;
use num_traits::{Float, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Shorthand for pulling a literal into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }

    fn pi() -> Self {
        Self::of(std::f64::consts::PI)
    }

    /// `self` as f64, for diagnostics and wire formats. Exact for f32/f64.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl<T> Real for T where
    T: Float + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
}

/// Complex number over the crate scalar.
pub type C<T> = Complex<T>;

/// Complex constant from f64 parts.
pub fn cx<T: Real>(re: f64, im: f64) -> C<T> {
    Complex::new(T::of(re), T::of(im))
}

/// Real constant lifted to a complex value.
pub fn cre<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}
