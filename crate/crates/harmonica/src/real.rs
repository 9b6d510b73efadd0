//! Scalar abstraction for the numeric core.
//!
//! Everything downstream of tick arithmetic (chroma weights, profile
//! correlations, entropy, regression) is generic over [`Real`] so the same
//! code runs in `f32` or `f64`. The crate root exports `f64` aliases, which
//! is what the pipeline uses.

use std::fmt::{Debug, Display};
use std::ops::AddAssign;

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FromPrimitive + AddAssign + Debug + Display + Send + Sync + 'static
{
    /// Lossless for every count this crate produces (token counts stay far
    /// below 2^53; f32 use is for experimentation, not corpus scale).
    fn of_u64(n: u64) -> Self {
        Self::from_u64(n).expect("count representable as scalar")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as scalar")
    }

    fn of_f64(x: f64) -> Self {
        Self::from_f64(x).expect("constant representable as scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Kahan compensated accumulator.
///
/// Entropy and filling sums run over up to 4096 terms per dataset and the
/// acceptance bound on the uniform table is exact equality, so plain
/// left-to-right summation is not good enough to rely on.
#[derive(Clone, Copy, Debug)]
pub struct KahanSum<R: Real> {
    sum: R,
    carry: R,
}

impl<R: Real> KahanSum<R> {
    pub fn new() -> Self {
        Self {
            sum: R::zero(),
            carry: R::zero(),
        }
    }

    pub fn add(&mut self, value: R) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> R {
        self.sum
    }
}

impl<R: Real> Default for KahanSum<R> {
    fn default() -> Self {
        Self::new()
    }
}
