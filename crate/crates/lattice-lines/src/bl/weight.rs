//! Edge-weight arithmetic shared by the integer (geometric) and real
//! (exponential/continuum) modes.
//!
//! The combinatorial theory is exact, so integer fields are compared
//! exactly; real fields only ever differ by floating accumulation error
//! and are compared with absolute tolerance 1e-9.

use std::fmt::Debug;

use serde::{de::DeserializeOwned, Serialize};

pub const REAL_TOLERANCE: f64 = 1e-9;

pub trait Weight:
    Copy + PartialOrd + Debug + Send + Sync + Serialize + DeserializeOwned + 'static
{
    const ZERO: Self;
    const IS_INT: bool;

    fn add(self, other: Self) -> Self;
    /// Plain subtraction; callers only subtract when `self >= other` holds
    /// exactly (integers) or up to accumulation error (reals).
    fn sub(self, other: Self) -> Self;
    /// max(self - other, 0).
    fn pos_diff(self, other: Self) -> Self;
    fn min(self, other: Self) -> Self;
    fn max(self, other: Self) -> Self;
    fn to_f64(self) -> f64;
    /// Mode tolerance: exact for integers, 1e-9 absolute for reals.
    fn approx_eq(self, other: Self) -> bool;
    /// True when two potential levels are distinct beyond tolerance, i.e.
    /// belong to different bricks.
    fn distinct_level(self, other: Self) -> bool;
    fn is_nonnegative(self) -> bool;
}

impl Weight for u64 {
    const ZERO: Self = 0;
    const IS_INT: bool = true;

    fn add(self, other: Self) -> Self {
        self + other
    }

    fn sub(self, other: Self) -> Self {
        debug_assert!(self >= other, "integer weight underflow: {self} - {other}");
        self - other
    }

    fn pos_diff(self, other: Self) -> Self {
        self.saturating_sub(other)
    }

    fn min(self, other: Self) -> Self {
        Ord::min(self, other)
    }

    fn max(self, other: Self) -> Self {
        Ord::max(self, other)
    }

    fn to_f64(self) -> f64 {
        self as f64
    }

    fn approx_eq(self, other: Self) -> bool {
        self == other
    }

    fn distinct_level(self, other: Self) -> bool {
        self != other
    }

    fn is_nonnegative(self) -> bool {
        true
    }
}

impl Weight for f64 {
    const ZERO: Self = 0.0;
    const IS_INT: bool = false;

    fn add(self, other: Self) -> Self {
        self + other
    }

    fn sub(self, other: Self) -> Self {
        self - other
    }

    fn pos_diff(self, other: Self) -> Self {
        (self - other).max(0.0)
    }

    fn min(self, other: Self) -> Self {
        f64::min(self, other)
    }

    fn max(self, other: Self) -> Self {
        f64::max(self, other)
    }

    fn to_f64(self) -> f64 {
        self
    }

    fn approx_eq(self, other: Self) -> bool {
        (self - other).abs() <= REAL_TOLERANCE
    }

    fn distinct_level(self, other: Self) -> bool {
        (self - other).abs() > REAL_TOLERANCE
    }

    fn is_nonnegative(self) -> bool {
        self >= 0.0 && self.is_finite()
    }
}
