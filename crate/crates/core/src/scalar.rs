use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num};

/// Numeric type usable for distances and costs.
///
/// Exact types (`Ratio<i64>`, `BigRational`) give exact tie detection in the
/// equilibrium engines. Floating point types work too, but ties between
/// costs are then only as reliable as the rounding allows.
pub trait Scalar: Num + Clone + PartialOrd + Debug + Display + Send + Sync + 'static {
    fn from_count(n: usize) -> Self;

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }
}

impl<T> Scalar for T
where
    T: Num + Clone + PartialOrd + Debug + Display + FromPrimitive + Send + Sync + 'static,
{
    fn from_count(n: usize) -> Self {
        T::from_usize(n).expect("count not representable in scalar type")
    }
}

/// Larger of two partially ordered values; `a` wins ties and incomparable pairs.
pub(crate) fn max_of<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}
