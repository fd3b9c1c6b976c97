//! Exact complex rationals a + b·i with arbitrary-precision components.
//!
//! This is the scalar type for the exact Bohemian paths: populations such
//! as {1, i} are represented without rounding, so determinant and
//! characteristic-polynomial statistics are exact set counts.

use crate::exact::Rational;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("cannot parse {0:?} as a Gaussian rational (expected forms like 2, -1/3, i, 1-2i, 1/2+3/4i)")]
pub struct ParseGaussianError(pub String);

/// A Gaussian rational: re + im·i with exact rational parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GaussianRational {
    re: Rational,
    im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::new(Rational::from_integer(BigInt::from(n)), Rational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// |z|² = re² + im², an exact non-negative rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Exact division; None when dividing by zero.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        let n = other.norm_sqr();
        if n.is_zero() {
            return None;
        }
        let num = self.clone() * other.conj();
        Some(Self::new(num.re / &n, num.im / &n))
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::new(Rational::one(), Rational::zero())
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl AddAssign for GaussianRational {
    fn add_assign(&mut self, rhs: Self) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div for GaussianRational {
    type Output = Self;
    /// Panics on division by zero; use [`GaussianRational::checked_div`]
    /// when the divisor may vanish.
    fn div(self, rhs: Self) -> Self {
        self.checked_div(&rhs).expect("division by zero Gaussian rational")
    }
}

fn fmt_rational(r: &Rational) -> String {
    r.to_string()
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rational(&self.re));
        }
        let imag = if self.im == Rational::one() {
            "i".to_string()
        } else if self.im == -Rational::one() {
            "-i".to_string()
        } else {
            format!("{}i", fmt_rational(&self.im))
        };
        if self.re.is_zero() {
            return write!(f, "{imag}");
        }
        if self.im.is_negative() {
            write!(f, "{}{}", fmt_rational(&self.re), imag)
        } else {
            write!(f, "{}+{}", fmt_rational(&self.re), imag)
        }
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Rational::new(num, den))
}

/// One additive part, e.g. "3/4i", "-i", "2".
fn parse_part(s: &str) -> Option<(Rational, bool)> {
    if let Some(coeff) = s.strip_suffix(['i', 'I']) {
        let r = match coeff {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            other => parse_rational(other)?,
        };
        Some((r, true))
    } else {
        Some((parse_rational(s)?, false))
    }
}

impl FromStr for GaussianRational {
    type Err = ParseGaussianError;

    /// Accepts integers, fractions `p/q`, pure imaginaries (`i`, `-2i`,
    /// `3/4i`) and sums such as `1+i`, `-1/2-3i`.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || ParseGaussianError(input.to_string());
        if s.is_empty() {
            return Err(err());
        }
        // find a '+'/'-' separating two parts (not the leading sign)
        let split = s
            .char_indices()
            .skip(1)
            .find(|(_, c)| *c == '+' || *c == '-')
            .map(|(i, _)| i);
        let parts: Vec<&str> = match split {
            Some(i) => vec![&s[..i], &s[i..]],
            None => vec![&s[..]],
        };
        let mut re = Rational::zero();
        let mut im = Rational::zero();
        let mut seen_re = false;
        let mut seen_im = false;
        for part in parts {
            let part = part.strip_prefix('+').unwrap_or(part);
            let (value, imaginary) = parse_part(part).ok_or_else(err)?;
            if imaginary {
                if seen_im {
                    return Err(err());
                }
                im = value;
                seen_im = true;
            } else {
                if seen_re {
                    return Err(err());
                }
                re = value;
                seen_re = true;
            }
        }
        Ok(Self::new(re, im))
    }
}

/// Conversion used by the generic matrix builder to instantiate a family
/// either exactly or as its double-precision image.
pub trait FromGaussian {
    fn from_gaussian(g: &GaussianRational) -> Self;
}

impl FromGaussian for GaussianRational {
    fn from_gaussian(g: &GaussianRational) -> Self {
        g.clone()
    }
}

impl FromGaussian for Complex64 {
    fn from_gaussian(g: &GaussianRational) -> Self {
        g.to_complex()
    }
}
