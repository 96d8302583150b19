//! Exact Gaussian integers.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

/// A Gaussian integer `re + im·i` with exact `i64` parts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };
    pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };
    pub const NEG_ONE: GaussInt = GaussInt { re: -1, im: 0 };
    pub const I: GaussInt = GaussInt { re: 0, im: 1 };
    pub const NEG_I: GaussInt = GaussInt { re: 0, im: -1 };
    /// The four units in the order 1, i, -1, -i.
    pub const UNITS: [GaussInt; 4] = [Self::ONE, Self::I, Self::NEG_ONE, Self::NEG_I];

    pub const fn new(re: i64, im: i64) -> Self {
        GaussInt { re, im }
    }

    pub const fn real(re: i64) -> Self {
        GaussInt { re, im: 0 }
    }

    pub const fn conj(self) -> Self {
        GaussInt { re: self.re, im: -self.im }
    }

    /// Squared modulus `re² + im²`.
    pub const fn norm(self) -> i64 {
        self.re * self.re + self.im * self.im
    }

    pub const fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    /// True for `±1` and `±i`.
    pub const fn is_unit(self) -> bool {
        self.norm() == 1
    }

    /// True for `0`, `±1` and `±i`.
    pub const fn is_phase(self) -> bool {
        self.norm() <= 1
    }

    /// `i^k` for `k` taken mod 4.
    pub const fn unit(k: u32) -> Self {
        Self::UNITS[(k % 4) as usize]
    }

    /// Exponent `k` with `self = i^k`, for units only.
    pub fn unit_exponent(self) -> Option<u32> {
        Self::UNITS.iter().position(|&u| u == self).map(|k| k as u32)
    }

    /// Exact division by an integer; `None` when some part is not divisible.
    pub fn div_exact(self, d: i64) -> Option<Self> {
        if d != 0 && self.re % d == 0 && self.im % d == 0 {
            Some(GaussInt::new(self.re / d, self.im / d))
        } else {
            None
        }
    }
}

impl From<i64> for GaussInt {
    fn from(re: i64) -> Self {
        GaussInt::real(re)
    }
}

impl Add for GaussInt {
    type Output = GaussInt;
    fn add(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re + o.re, self.im + o.im)
    }
}

impl AddAssign for GaussInt {
    fn add_assign(&mut self, o: GaussInt) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl Sub for GaussInt {
    type Output = GaussInt;
    fn sub(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re - o.re, self.im - o.im)
    }
}

impl SubAssign for GaussInt {
    fn sub_assign(&mut self, o: GaussInt) {
        self.re -= o.re;
        self.im -= o.im;
    }
}

impl Mul for GaussInt {
    type Output = GaussInt;
    fn mul(self, o: GaussInt) -> GaussInt {
        GaussInt::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

impl Mul<i64> for GaussInt {
    type Output = GaussInt;
    fn mul(self, k: i64) -> GaussInt {
        GaussInt::new(self.re * k, self.im * k)
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt::new(-self.re, -self.im)
    }
}

impl std::iter::Sum for GaussInt {
    fn sum<I: Iterator<Item = GaussInt>>(iter: I) -> GaussInt {
        iter.fold(GaussInt::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for GaussInt {
    /// Phase entries print as `0`, `1`, `-1`, `i`, `-i`; others as `a+bi`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, 1) => write!(f, "i"),
            (0, -1) => write!(f, "-i"),
            (0, im) => write!(f, "{im}i"),
            (re, im) if im < 0 => write!(f, "{re}{im}i"),
            (re, im) => write!(f, "{re}+{im}i"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_arithmetic() {
        assert_eq!(GaussInt::I * GaussInt::I, GaussInt::NEG_ONE);
        assert_eq!(GaussInt::I.conj(), GaussInt::NEG_I);
        for k in 0..4 {
            assert_eq!(GaussInt::unit(k).unit_exponent(), Some(k));
            assert!(GaussInt::unit(k).is_unit());
        }
        assert!(GaussInt::ZERO.is_phase());
        assert!(!GaussInt::new(1, 1).is_phase());
    }

    #[test]
    fn conj_involution_and_norm() {
        for re in -3..=3 {
            for im in -3..=3 {
                let x = GaussInt::new(re, im);
                assert_eq!(x.conj().conj(), x);
                assert_eq!((x * x.conj()).re, x.norm());
                assert_eq!((x * x.conj()).im, 0);
            }
        }
    }

    #[test]
    fn display_tokens() {
        let s: Vec<String> = [0, 1, 2, 3].iter().map(|&k| GaussInt::unit(k).to_string()).collect();
        assert_eq!(s, ["1", "i", "-1", "-i"]);
        assert_eq!(GaussInt::new(2, -3).to_string(), "2-3i");
        assert_eq!(GaussInt::new(0, 4).to_string(), "4i");
    }

    #[test]
    fn exact_division() {
        assert_eq!(GaussInt::new(4, -8).div_exact(4), Some(GaussInt::new(1, -2)));
        assert_eq!(GaussInt::new(2, 4).div_exact(4), None);
    }
}
