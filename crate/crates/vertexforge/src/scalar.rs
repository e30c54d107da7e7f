//! Exact Gaussian-rational scalars.
//!
//! Every number in the library is an element of Q(i): a pair of
//! arbitrary-precision rationals `re + im·i`. There is no floating point
//! anywhere, so all computations are bit-reproducible and equality is
//! decidable.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// An exact Gaussian rational `re + im·i`.
///
/// `BigRational` keeps itself in lowest terms with a positive denominator,
/// which gives us canonical representatives for free.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

impl Scalar {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn zero() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Scalar {
            re: BigRational::one(),
            im: BigRational::zero(),
        }
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Scalar {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    /// Exact rational `num/den`. Panics on a zero denominator.
    pub fn from_ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Scalar {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "division by zero scalar");
        // 1/(a+bi) = (a-bi)/(a^2+b^2)
        let norm = &self.re * &self.re + &self.im * &self.im;
        Scalar {
            re: &self.re / &norm,
            im: -(&self.im / &norm),
        }
    }

    pub fn conj(&self) -> Self {
        Scalar {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_integer(n)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return fmt_rational(&self.re, f);
        }
        if self.re.is_zero() {
            if self.im.is_one() {
                return write!(f, "i");
            }
            if (-&self.im).is_one() {
                return write!(f, "-i");
            }
            fmt_rational(&self.im, f)?;
            return write!(f, "i");
        }
        fmt_rational(&self.re, f)?;
        if self.im.is_positive() {
            write!(f, "+")?;
        }
        if self.im.is_one() {
            return write!(f, "i");
        }
        if (-&self.im).is_one() {
            return write!(f, "-i");
        }
        fmt_rational(&self.im, f)?;
        write!(f, "i")
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Binomial coefficient C(n, k) for integer (possibly negative) `n` and
/// k ≥ 0, as an exact scalar: n(n-1)···(n-k+1)/k!.
pub fn binomial(n: i64, k: u32) -> Scalar {
    let mut num = BigRational::one();
    for j in 0..k as i64 {
        num *= BigRational::from_integer(BigInt::from(n - j));
        num /= BigRational::from_integer(BigInt::from(j + 1));
    }
    Scalar::new(num, BigRational::zero())
}

/// Exact k! as a scalar.
pub fn factorial(k: u32) -> Scalar {
    let mut out = BigRational::one();
    for j in 1..=k as i64 {
        out *= BigRational::from_integer(BigInt::from(j));
    }
    Scalar::new(out, BigRational::zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_basics() {
        let a = Scalar::from_ratio(3, 2);
        let b = Scalar::i();
        let c = &a + &b; // 3/2 + i
        assert_eq!(&c - &b, a);
        assert!((&c * &c.inv()).is_one());
        assert_eq!(&b * &b, Scalar::from_integer(-1));
    }

    #[test]
    fn display_forms() {
        assert_eq!(Scalar::from_ratio(-1, 2).to_string(), "-1/2");
        let z = &Scalar::from_integer(2) + &(&Scalar::from_ratio(1, 3) * &Scalar::i());
        assert_eq!(z.to_string(), "2+1/3i");
        assert_eq!((-Scalar::i()).to_string(), "-i");
    }

    #[test]
    fn binomial_negative_upper() {
        // C(-1, k) = (-1)^k
        assert_eq!(binomial(-1, 3), Scalar::from_integer(-1));
        assert_eq!(binomial(-3, 2), Scalar::from_integer(6));
        assert_eq!(binomial(4, 2), Scalar::from_integer(6));
        assert_eq!(binomial(2, 5), Scalar::zero());
    }
}
