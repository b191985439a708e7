//! q-numbers, q-factorials, Gaussian binomials and q-Pochhammer symbols.
//!
//! Everything is generic over [`Scalar`], which has three backends:
//! exact rationals ([`Rational`]), plain `f64`, and [`LogReal`] (sign plus
//! log-magnitude) for products that would otherwise leave the `f64` range.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary precision rational number.
pub type Rational = BigRational;

/// Build the rational `num / den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Exponent magnitude beyond which `f64` powers are taken through `exp`/`ln`.
const LOG_POW_THRESHOLD: f64 = 500.0;

/// Field-like scalar used by all q-arithmetic.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    /// `self` raised to an integer power; negative powers invert.
    fn powi(&self, e: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn is_positive(&self) -> bool;

    fn recip(&self) -> Self {
        Self::one() / self.clone()
    }

    /// `1 - self^m`. Floating backends override this to avoid cancellation
    /// when `self` is close to one.
    fn one_minus_pow(&self, m: i64) -> Self {
        Self::one() - self.powi(m)
    }
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn powi(&self, e: i64) -> Self {
        let mut base = if e < 0 { Scalar::recip(self) } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc: Rational = One::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc *= &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn recip(&self) -> Self {
        BigRational::recip(self)
    }
}

/// Convert a rational to the nearest-ish `f64`, tolerating numerators and
/// denominators that individually overflow.
pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() && (v != 0.0 || Zero::is_zero(r)) {
            return v;
        }
    }
    let num = r.numer();
    let den = r.denom();
    let shift = num.bits() as i64 - den.bits() as i64;
    // scale to about 2^60 before the division
    let scaled = if shift > 60 {
        Rational::new(num.clone(), den.clone() << (shift - 60) as usize)
    } else {
        Rational::new(num.clone() << (60 - shift) as usize, den.clone())
    };
    let mantissa = ToPrimitive::to_f64(&scaled.to_integer()).unwrap_or(f64::NAN);
    mantissa * 2f64.powi((shift - 60) as i32)
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_one(&self) -> bool {
        *self == 1.0
    }
    fn powi(&self, e: i64) -> Self {
        if e == 0 {
            return 1.0;
        }
        let ln = self.abs().ln();
        if (e as f64 * ln).abs() > LOG_POW_THRESHOLD || i32::try_from(e).is_err() {
            let mag = (e as f64 * ln).exp();
            if *self < 0.0 && e % 2 != 0 {
                -mag
            } else {
                mag
            }
        } else {
            f64::powi(*self, e as i32)
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_positive(&self) -> bool {
        *self > 0.0
    }
    fn one_minus_pow(&self, m: i64) -> Self {
        if *self > 0.0 {
            -(m as f64 * self.ln()).exp_m1()
        } else {
            1.0 - Scalar::powi(self, m)
        }
    }
}

/// A real number stored as a sign and the natural log of its magnitude.
///
/// Multiplication and division are exact in the exponent; addition uses
/// `ln_1p`/`exp_m1` so that `1 - q^m` keeps full relative precision for `q`
/// near one.
#[derive(Clone, Copy, Debug)]
pub struct LogReal {
    sign: i8,
    ln_abs: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogReal {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_abs: x.abs().ln(),
            }
        }
    }

    /// The positive number `exp(ln)`.
    pub fn from_ln(ln: f64) -> Self {
        LogReal { sign: 1, ln_abs: ln }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Natural log of the magnitude (`-inf` for zero).
    pub fn ln_abs(&self) -> f64 {
        self.ln_abs
    }
}

impl PartialEq for LogReal {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign && (self.sign == 0 || self.ln_abs == other.ln_abs)
    }
}

impl PartialOrd for LogReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Some(Ordering::Equal),
                1 => self.ln_abs.partial_cmp(&other.ln_abs),
                _ => other.ln_abs.partial_cmp(&self.ln_abs),
            },
            ord => Some(ord),
        }
    }
}

impl Neg for LogReal {
    type Output = LogReal;
    fn neg(self) -> LogReal {
        LogReal {
            sign: -self.sign,
            ln_abs: self.ln_abs,
        }
    }
}

impl Add for LogReal {
    type Output = LogReal;
    fn add(self, rhs: LogReal) -> LogReal {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if self.ln_abs >= rhs.ln_abs {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let d = small.ln_abs - big.ln_abs;
        if big.sign == small.sign {
            LogReal {
                sign: big.sign,
                ln_abs: big.ln_abs + d.exp().ln_1p(),
            }
        } else if d == 0.0 {
            LogReal::ZERO
        } else {
            LogReal {
                sign: big.sign,
                ln_abs: big.ln_abs + (-d.exp_m1()).ln(),
            }
        }
    }
}

impl Sub for LogReal {
    type Output = LogReal;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: LogReal) -> LogReal {
        self + (-rhs)
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: LogReal) -> LogReal {
        if self.sign == 0 || rhs.sign == 0 {
            return LogReal::ZERO;
        }
        LogReal {
            sign: self.sign * rhs.sign,
            ln_abs: self.ln_abs + rhs.ln_abs,
        }
    }
}

impl Div for LogReal {
    type Output = LogReal;
    fn div(self, rhs: LogReal) -> LogReal {
        assert!(rhs.sign != 0, "LogReal division by zero");
        if self.sign == 0 {
            return LogReal::ZERO;
        }
        LogReal {
            sign: self.sign * rhs.sign,
            ln_abs: self.ln_abs - rhs.ln_abs,
        }
    }
}

impl Scalar for LogReal {
    fn zero() -> Self {
        LogReal::ZERO
    }
    fn one() -> Self {
        LogReal {
            sign: 1,
            ln_abs: 0.0,
        }
    }
    fn from_i64(v: i64) -> Self {
        LogReal::from_f64(v as f64)
    }
    fn is_zero(&self) -> bool {
        self.sign == 0
    }
    fn is_one(&self) -> bool {
        self.sign == 1 && self.ln_abs == 0.0
    }
    fn powi(&self, e: i64) -> Self {
        if e == 0 {
            return Self::one();
        }
        if self.sign == 0 {
            assert!(e > 0, "zero raised to a negative power");
            return LogReal::ZERO;
        }
        LogReal {
            sign: if self.sign < 0 && e % 2 != 0 { -1 } else { 1 },
            ln_abs: self.ln_abs * e as f64,
        }
    }
    fn to_f64(&self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }
    fn is_positive(&self) -> bool {
        self.sign > 0
    }
}

/// `[m]_q = (1 - q^m)/(1 - q)`, equal to `m` at `q = 1`.
pub fn q_number<S: Scalar>(m: u64, q: &S) -> S {
    if q.is_one() {
        return S::from_i64(m as i64);
    }
    if m == 0 {
        return S::zero();
    }
    q.one_minus_pow(m as i64) / q.one_minus_pow(1)
}

/// `[m]_q! = [1]_q [2]_q ... [m]_q`.
pub fn q_factorial<S: Scalar>(m: u64, q: &S) -> S {
    (1..=m).fold(S::one(), |acc, i| acc * q_number(i, q))
}

/// Gaussian binomial `[n choose m]_q`; zero when `m` is outside `0..=n`.
pub fn q_binomial<S: Scalar>(n: u64, m: i64, q: &S) -> S {
    if m < 0 || m as u64 > n {
        return S::zero();
    }
    let m = m as u64;
    let m = m.min(n - m);
    if q.is_one() {
        let mut acc = S::one();
        for i in 1..=m {
            acc = acc * S::from_i64((n - m + i) as i64) / S::from_i64(i as i64);
        }
        return acc;
    }
    let mut num = S::one();
    let mut den = S::one();
    for i in 1..=m {
        num = num * q.one_minus_pow((n - m + i) as i64);
        den = den * q.one_minus_pow(i as i64);
    }
    num / den
}

/// `(a; q)_m = (1 - a)(1 - a q) ... (1 - a q^{m-1})`.
pub fn q_pochhammer<S: Scalar>(a: &S, q: &S, m: u64) -> S {
    let mut acc = S::one();
    let mut term = a.clone();
    for i in 0..m {
        acc = acc * (S::one() - term.clone());
        if i + 1 < m {
            term = term * q.clone();
        }
    }
    acc
}

/// Table of `[m]_q` and `[m]_q!` for `m = 0..=max`.
#[derive(Clone, Debug)]
pub struct QTable<S> {
    numbers: Vec<S>,
    factorials: Vec<S>,
}

impl<S: Scalar> QTable<S> {
    pub fn new(max: usize, q: &S) -> Self {
        let numbers: Vec<S> = (0..=max as u64).map(|m| q_number(m, q)).collect();
        let mut factorials = Vec::with_capacity(max + 1);
        factorials.push(S::one());
        for m in 1..=max {
            let next = factorials[m - 1].clone() * numbers[m].clone();
            factorials.push(next);
        }
        QTable {
            numbers,
            factorials,
        }
    }

    pub fn number(&self, m: usize) -> &S {
        &self.numbers[m]
    }

    pub fn factorial(&self, m: usize) -> &S {
        &self.factorials[m]
    }

    pub fn binomial(&self, n: usize, m: usize) -> S {
        if m > n {
            return S::zero();
        }
        self.factorials[n].clone() / (self.factorials[m].clone() * self.factorials[n - m].clone())
    }
}

/// `a (a - 1) / 2` for possibly negative `a`.
pub fn choose2(a: i64) -> i64 {
    a * (a - 1) / 2
}
