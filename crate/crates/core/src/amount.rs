//! Budget and bid amounts.
//!
//! `Amount` is a binary float with a 53-bit mantissa and an `i64` exponent.
//! Long mean-payoff plays drive bids down to `z^-n` for `n` in the thousands,
//! far below the smallest `f64`; the wide exponent keeps those bids nonzero
//! and comparable.

use crate::num::{f64_to_q, fmt_f64, Q};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Debug)]
pub struct Amount {
    // value = m * 2^e with 0.5 <= |m| < 1, or m = 0 and e = 0
    m: f64,
    e: i64,
}

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    if exp == 0 {
        let (m, e) = frexp(x * 2f64.powi(64));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, exp - 1022)
}

fn ldexp(mut m: f64, mut e: i64) -> f64 {
    while e > 1000 {
        m *= 2f64.powi(1000);
        e -= 1000;
        if m.is_infinite() {
            return m;
        }
    }
    while e < -1000 {
        m *= 2f64.powi(-1000);
        e += 1000;
        if m == 0.0 {
            return m;
        }
    }
    m * 2f64.powi(e as i32)
}

impl Amount {
    pub const ZERO: Amount = Amount { m: 0.0, e: 0 };

    fn norm(m: f64, e: i64) -> Amount {
        assert!(m.is_finite(), "non-finite amount");
        if m == 0.0 {
            return Amount::ZERO;
        }
        let (fm, fe) = frexp(m);
        Amount { m: fm, e: e + fe }
    }

    pub fn from_f64(x: f64) -> Amount {
        Amount::norm(x, 0)
    }

    pub fn one() -> Amount {
        Amount::from_f64(1.0)
    }

    /// Nearest amount to a rational, without underflow.
    pub fn from_q(x: &Q) -> Amount {
        if x.is_zero() {
            return Amount::ZERO;
        }
        let neg = x.is_negative();
        let n = x.numer().abs();
        let d = x.denom().clone();
        let k = n.bits() as i64 - d.bits() as i64;
        let shift = 64 - k;
        let r: BigInt = if shift >= 0 { (n << shift as usize) / d } else { n / (d << (-shift) as usize) };
        let rf = r.to_f64().unwrap_or(0.0);
        let a = Amount::norm(rf, -shift);
        if neg {
            -a
        } else {
            a
        }
    }

    /// Exact rational value.
    pub fn to_q(&self) -> Q {
        if self.m == 0.0 {
            return Q::zero();
        }
        let mq = f64_to_q(self.m);
        let p = Q::from_integer(BigInt::from(1) << (self.e.unsigned_abs() as usize));
        if self.e >= 0 {
            mq * p
        } else {
            mq / p
        }
    }

    /// Saturates to 0 or infinity outside the `f64` range.
    pub fn to_f64(&self) -> f64 {
        ldexp(self.m, self.e)
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0.0
    }

    pub fn is_negative(&self) -> bool {
        self.m < 0.0
    }

    pub fn abs(&self) -> Amount {
        Amount { m: self.m.abs(), e: self.e }
    }

    /// Base-2 logarithm of the absolute value (negative infinity at zero).
    pub fn log2(&self) -> f64 {
        if self.m == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.m.abs().log2() + self.e as f64
        }
    }

    /// `2^t` for real `t`.
    pub fn exp2(t: f64) -> Amount {
        let fl = t.floor();
        Amount::norm((t - fl).exp2(), fl as i64)
    }

    /// Integer power by repeated squaring.
    pub fn powi(self, mut n: i64) -> Amount {
        let (mut base, mut acc) = if n < 0 {
            n = -n;
            (Amount::one() / self, Amount::one())
        } else {
            (self, Amount::one())
        };
        while n > 0 {
            if n & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            n >>= 1;
        }
        acc
    }

    pub fn min(self, other: Amount) -> Amount {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Amount) -> Amount {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl From<f64> for Amount {
    fn from(x: f64) -> Self {
        Amount::from_f64(x)
    }
}

impl Add for Amount {
    type Output = Amount;
    fn add(self, o: Amount) -> Amount {
        if self.m == 0.0 {
            return o;
        }
        if o.m == 0.0 {
            return self;
        }
        let (hi, lo) = if self.e >= o.e { (self, o) } else { (o, self) };
        let d = hi.e - lo.e;
        if d > 60 {
            return hi;
        }
        Amount::norm(hi.m + ldexp(lo.m, -d), hi.e)
    }
}

impl Neg for Amount {
    type Output = Amount;
    fn neg(self) -> Amount {
        Amount { m: -self.m, e: self.e }
    }
}

impl Sub for Amount {
    type Output = Amount;
    fn sub(self, o: Amount) -> Amount {
        self + (-o)
    }
}

impl Mul for Amount {
    type Output = Amount;
    fn mul(self, o: Amount) -> Amount {
        if self.m == 0.0 || o.m == 0.0 {
            return Amount::ZERO;
        }
        Amount::norm(self.m * o.m, self.e + o.e)
    }
}

impl Div for Amount {
    type Output = Amount;
    fn div(self, o: Amount) -> Amount {
        assert!(o.m != 0.0, "division by zero amount");
        if self.m == 0.0 {
            return Amount::ZERO;
        }
        Amount::norm(self.m / o.m, self.e - o.e)
    }
}

impl Mul<f64> for Amount {
    type Output = Amount;
    fn mul(self, o: f64) -> Amount {
        self * Amount::from_f64(o)
    }
}

impl AddAssign for Amount {
    fn add_assign(&mut self, o: Amount) {
        *self = *self + o;
    }
}

impl SubAssign for Amount {
    fn sub_assign(&mut self, o: Amount) {
        *self = *self - o;
    }
}

impl PartialEq for Amount {
    fn eq(&self, o: &Amount) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Amount {}

impl PartialOrd for Amount {
    fn partial_cmp(&self, o: &Amount) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Amount {
    fn cmp(&self, o: &Amount) -> Ordering {
        let sign = |a: &Amount| if a.m > 0.0 { 1 } else if a.m < 0.0 { -1 } else { 0 };
        let (sa, so) = (sign(self), sign(o));
        if sa != so || sa == 0 {
            return sa.cmp(&so);
        }
        let mag = self.e.cmp(&o.e).then(self.m.abs().partial_cmp(&o.m.abs()).unwrap());
        if sa > 0 {
            mag
        } else {
            mag.reverse()
        }
    }
}

impl fmt::Display for Amount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e.abs() < 1000 {
            return write!(f, "{}", fmt_f64(self.to_f64()));
        }
        // m * 2^e = 10^t
        let t = self.m.abs().log10() + self.e as f64 * std::f64::consts::LOG10_2;
        let exp10 = t.floor();
        let mant = 10f64.powf(t - exp10);
        let sign = if self.m < 0.0 { "-" } else { "" };
        write!(f, "{}{}e{}", sign, fmt_f64(mant), exp10 as i64)
    }
}

impl Serialize for Amount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.e.abs() < 1000 {
            s.serialize_f64(self.to_f64())
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::q;

    #[test]
    fn round_trips_floats() {
        for x in [1.0, 0.2, -3.5, 1e-300, 5e-320, 123456.789] {
            assert_eq!(Amount::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn tiny_values_stay_ordered() {
        let a = Amount::from_f64(2.0).powi(-5000);
        let b = Amount::from_f64(2.0).powi(-5001);
        assert!(a > b && b > Amount::ZERO);
        assert_eq!(a.to_f64(), 0.0);
        assert!((a.log2() + 5000.0).abs() < 1e-9);
        assert_eq!((a - b) * Amount::from_f64(2.0), a);
    }

    #[test]
    fn rational_conversion() {
        let a = Amount::from_q(&q(1, 56));
        assert_eq!(a.to_f64(), 1.0 / 56.0);
        let x = Amount::from_f64(0.1);
        assert_eq!(Amount::from_q(&x.to_q()), x);
        assert_eq!(Amount::from_q(&q(-3, 4)).to_f64(), -0.75);
    }

    #[test]
    fn display() {
        assert_eq!(Amount::from_f64(0.25).to_string(), "0.25");
        let a = Amount::from_f64(10.0).powi(-400);
        assert!(a.to_string().ends_with("e-400"), "{}", a);
    }
}
