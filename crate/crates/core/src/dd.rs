//! Double-double arithmetic.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, giving
//! roughly 106 bits of significand. Only the operations the engine needs are
//! provided: the four basic operations, exact conversion from integers, and
//! logarithms of integers and of `1 + 1/g` via the `artanh` series.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// ln 2 as a double-double.
const LN2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };

    pub const fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    /// Exact for every `x < 2^106`.
    pub fn from_u128(x: u128) -> Self {
        let hi = x as f64;
        // `hi` may round up past `x`, so the remainder is signed.
        let rem = x as i128 - hi as u128 as i128;
        let (hi, lo) = quick_two_sum(hi, rem as f64);
        DoubleDouble { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }

    pub fn recip(self) -> Self {
        DoubleDouble::ONE / self
    }

    /// `2 * artanh(w)` for `|w| < 1/2`; terms are summed until they vanish
    /// relative to the accumulated value.
    fn two_artanh_series(w: DoubleDouble) -> DoubleDouble {
        if w.is_zero() {
            return DoubleDouble::ZERO;
        }
        let w2 = w * w;
        let mut power = w;
        let mut sum = w;
        let mut k = 3.0;
        loop {
            power = power * w2;
            let term = power / DoubleDouble::from_f64(k);
            sum += term;
            if term.hi.abs() <= sum.hi.abs() * 1e-34 {
                break;
            }
            k += 2.0;
        }
        sum.mul_f64(2.0)
    }

    /// Natural logarithm of a positive integer below `2^53`.
    pub fn ln_u64(x: u64) -> Self {
        assert!(x > 0, "ln of zero");
        if x == 1 {
            return DoubleDouble::ZERO;
        }
        let mut k = 63 - x.leading_zeros() as i32;
        // m = x / 2^k lies in [1, 2); fold into [1/sqrt 2, sqrt 2).
        let mut m = x as f64 / f64::powi(2.0, k);
        if m > std::f64::consts::SQRT_2 {
            m /= 2.0;
            k += 1;
        }
        let m = DoubleDouble::from_f64(m);
        let w = (m - DoubleDouble::ONE) / (m + DoubleDouble::ONE);
        LN2.mul_f64(k as f64) + Self::two_artanh_series(w)
    }

    /// `ln(1 + 1/g)` for an integer `g >= 1`.
    pub fn ln1p_recip(g: u128) -> Self {
        assert!(g >= 1, "ln1p_recip needs g >= 1");
        // 1 + 1/g = (1 + w)/(1 - w) with w = 1/(2g + 1).
        let w = DoubleDouble::from_u128(2 * g + 1).recip();
        Self::two_artanh_series(w)
    }

    /// `ln(1 + z)` for `z` in `[0, 1]`.
    pub fn ln1p(z: DoubleDouble) -> Self {
        let w = z / (DoubleDouble::from_f64(2.0) + z);
        Self::two_artanh_series(w)
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
}

impl Neg for DoubleDouble {
    type Output = DoubleDouble;
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = DoubleDouble;
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        DoubleDouble { hi, lo }
    }
}

impl AddAssign for DoubleDouble {
    fn add_assign(&mut self, b: Self) {
        *self = *self + b;
    }
}

impl Sub for DoubleDouble {
    type Output = DoubleDouble;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = DoubleDouble;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = DoubleDouble;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        DoubleDouble { hi: q1, lo: q2 } + DoubleDouble::from_f64(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi)? {
            Ordering::Equal => self.lo.partial_cmp(&other.lo),
            ord => Some(ord),
        }
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} + {:e}", self.hi, self.lo)
    }
}
