use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Real scalar used for features, outcomes and losses: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Debug
    + Display
    + FromStr
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` constant.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every float type")
    }

    /// Lossy conversion from a count.
    fn of_count(n: u64) -> Self {
        Self::from_u64(n).expect("count is representable in every float type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Compensated (Kahan) summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum<T> {
    sum: T,
    carry: T,
}

impl<T: Scalar> KahanSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }

    pub fn add(&mut self, v: T) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn total(&self) -> T {
        self.sum
    }
}

impl<T: Scalar> FromIterator<T> for KahanSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Exact running sum (nonoverlapping partials); `total` is the correctly
/// rounded value of the exact sum, so it does not depend on the order in
/// which terms were added.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExactSum<T> {
    partials: Vec<T>,
}

impl<T: Scalar> ExactSum<T> {
    pub fn new() -> Self {
        Self { partials: Vec::new() }
    }

    pub fn add(&mut self, v: T) {
        let mut x = v;
        let mut kept = 0;
        for j in 0..self.partials.len() {
            let mut y = self.partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != T::zero() {
                self.partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        self.partials.truncate(kept);
        self.partials.push(x);
    }

    pub fn total(&self) -> T {
        let mut n = self.partials.len();
        if n == 0 {
            return T::zero();
        }
        n -= 1;
        let mut hi = self.partials[n];
        let mut lo = T::zero();
        while n > 0 {
            let x = hi;
            n -= 1;
            let y = self.partials[n];
            hi = x + y;
            lo = y - (hi - x);
            if lo != T::zero() {
                break;
            }
        }
        // round half to even across the remaining partials
        if n > 0 {
            let next = self.partials[n - 1];
            if (lo < T::zero() && next < T::zero()) || (lo > T::zero() && next > T::zero()) {
                let y = lo + lo;
                let x = hi + y;
                if y == x - hi {
                    hi = x;
                }
            }
        }
        hi
    }
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&u, &v)| acc + u * v)
}

pub(crate) fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&u, &v)| {
        let diff = u - v;
        acc + diff * diff
    })
}
