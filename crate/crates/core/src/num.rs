//! Exact rationals, a scalar abstraction shared by the exact and float
//! solvers, dense linear solves and number formatting.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.76` (kept exact).
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().ok()?;
        let d: BigInt = b.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if frac.is_empty() && int_digits.is_empty() {
            return None;
        }
        if !frac.chars().all(|c| c.is_ascii_digit()) || !int_digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{}{}", int_digits, frac);
        let n: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let v = Q::new(n, d);
        return Some(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().ok()?;
    Some(Q::from_integer(n))
}

/// `p/q`, or `p` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| if x.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Exact binary value of a finite float.
pub fn f64_to_q(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(Q::zero)
}

/// Twelve significant digits, `%g` style.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        trim_zeros(&s)
    } else {
        let s = format!("{:.11e}", x);
        let (m, e) = s.split_once('e').unwrap();
        format!("{}e{}", trim_zeros(m), e)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Field operations needed by the fixed-point and linear solvers.
pub trait Scalar:
    Clone
    + PartialOrd
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn s_zero() -> Self;
    fn s_one() -> Self;
    fn from_q(x: &Q) -> Self;
    fn as_f64(&self) -> f64;
    fn magnitude(&self) -> Self;
    /// Whether `self` is zero relative to the magnitude `scale`.
    fn negligible(&self, scale: f64) -> bool;
    fn half() -> Self {
        Self::s_one() / (Self::s_one() + Self::s_one())
    }
    fn is_exact() -> bool;
}

impl Scalar for Q {
    fn s_zero() -> Self {
        Zero::zero()
    }
    fn s_one() -> Self {
        One::one()
    }
    fn from_q(x: &Q) -> Self {
        x.clone()
    }
    fn as_f64(&self) -> f64 {
        q_to_f64(self)
    }
    fn magnitude(&self) -> Self {
        Signed::abs(self)
    }
    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
    fn half() -> Self {
        q(1, 2)
    }
    fn is_exact() -> bool {
        true
    }
}

/// Relative tolerance used when the scalar is a float.
pub const FLOAT_TOL: f64 = 1e-12;

impl Scalar for f64 {
    fn s_zero() -> Self {
        0.0
    }
    fn s_one() -> Self {
        1.0
    }
    fn from_q(x: &Q) -> Self {
        q_to_f64(x)
    }
    fn as_f64(&self) -> f64 {
        *self
    }
    fn magnitude(&self) -> Self {
        f64::abs(*self)
    }
    fn negligible(&self, scale: f64) -> bool {
        f64::abs(*self) <= FLOAT_TOL * scale.abs().max(1.0)
    }
    fn half() -> Self {
        0.5
    }
    fn is_exact() -> bool {
        false
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when the matrix is singular.
pub fn solve_linear<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x.as_f64().abs())
        .fold(0.0f64, f64::max);
    for col in 0..n {
        let mut best: Option<usize> = None;
        for row in col..n {
            if a[row][col].negligible(scale) {
                continue;
            }
            match best {
                None => best = Some(row),
                Some(r) if !T::is_exact() && a[row][col].magnitude() > a[r][col].magnitude() => best = Some(row),
                _ => {}
            }
            if T::is_exact() && best.is_some() {
                break;
            }
        }
        let p = best?;
        a.swap(col, p);
        b.swap(col, p);
        let pivot = a[col][col].clone();
        for row in (col + 1)..n {
            if a[row][col].negligible(0.0) && T::is_exact() {
                continue;
            }
            let f = a[row][col].clone() / pivot.clone();
            if f.negligible(0.0) && T::is_exact() {
                continue;
            }
            for k in col..n {
                let t = a[col][k].clone() * f.clone();
                a[row][k] = a[row][k].clone() - t;
            }
            let t = b[col].clone() * f;
            b[row] = b[row].clone() - t;
        }
    }
    let mut x = vec![T::s_zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in (row + 1)..n {
            acc = acc - a[row][k].clone() * x[k].clone();
        }
        x[row] = acc / a[row][row].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(parse_q("2/3"), Some(q(2, 3)));
        assert_eq!(parse_q("-4"), Some(qi(-4)));
        assert_eq!(parse_q("0.76"), Some(q(19, 25)));
        assert_eq!(parse_q("-.5"), Some(q(-1, 2)));
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(parse_q("abc"), None);
    }

    #[test]
    fn formats() {
        assert_eq!(fmt_q(&q(4, 6)), "2/3");
        assert_eq!(fmt_q(&qi(-3)), "-3");
        assert_eq!(fmt_f64(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_f64(1.0), "1");
        assert_eq!(fmt_f64(1e-20), "1e-20");
    }

    #[test]
    fn exact_solve() {
        // p0 = 1/2 p2, p2 = 1/2 + 1/2 p0
        let a = vec![vec![qi(1), q(-1, 2)], vec![q(-1, 2), qi(1)]];
        let b = vec![qi(0), q(1, 2)];
        let x = solve_linear(a, b).unwrap();
        assert_eq!(x, vec![q(1, 3), q(2, 3)]);
    }

    #[test]
    fn singular_detected() {
        let a = vec![vec![qi(1), qi(1)], vec![qi(2), qi(2)]];
        assert!(solve_linear(a, vec![qi(0), qi(1)]).is_none());
        let a = vec![vec![1.0, 1.0], vec![1.0, 1.0]];
        assert!(solve_linear(a, vec![0.0, 1.0]).is_none());
    }
}
