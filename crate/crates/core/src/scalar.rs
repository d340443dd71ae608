//! Scalar abstraction for repairability values.
//!
//! Exact estimators count surviving fault sequences and convert the count
//! into the caller's scalar; Monte Carlo estimators additionally need a
//! square root for confidence intervals and therefore require [`Float`].

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Float, Num};

/// Exact rational repairability value.
pub type Rational = Ratio<u128>;

/// A numeric type that can hold a repairability fraction.
pub trait Scalar: Num + Clone + Debug + PartialOrd + Send + Sync {
    /// Builds `num / den`. `den` must be non-zero.
    fn from_counts(num: u128, den: u128) -> Self;

    /// Lossy conversion used for reporting.
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_counts(num: u128, den: u128) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    fn from_counts(num: u128, den: u128) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

impl Scalar for Rational {
    fn from_counts(num: u128, den: u128) -> Self {
        Ratio::new(num, den)
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// Floating-point scalar, required wherever a standard error is computed.
pub trait FloatScalar: Scalar + Float {}

impl<T: Scalar + Float> FloatScalar for T {}

/// Half-width of the normal-approximation 95% interval for a proportion.
pub fn ci95_half_width<T: FloatScalar>(p: T, trials: u64) -> T {
    if trials == 0 {
        return T::zero();
    }
    let z = T::from(1.96).unwrap();
    let n = T::from(trials).unwrap();
    z * (p * (T::one() - p) / n).sqrt()
}
