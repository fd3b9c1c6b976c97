//! Dense univariate polynomials over a commutative ring, plus the field
//! operations (division, gcd, squarefree degree) needed for exact
//! multiple-eigenvalue and distinct-eigenvalue counting over the Gaussian
//! rationals.

use super::gaussian::GaussianRational;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::ops::{Add, Mul, Neg};

/// Coefficients in ascending degree order with no trailing zeros; the
/// empty vector is the zero polynomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly<T> {
    coeffs: Vec<T>,
}

impl<T: Clone + Zero> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Degree, with the convention that the zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }
}

impl<T: Clone + Zero> Zero for Poly<T> {
    fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<T: Clone + Zero + One> One for Poly<T> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

impl<T: Clone + Zero> Add for Poly<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + rhs.coeff(k));
        }
        Self::new(out)
    }
}

impl<T: Clone + Zero + Neg<Output = T>> Neg for Poly<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<T: Clone + Zero + Mul<Output = T>> Mul for Poly<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let prod = a.clone() * b.clone();
                let cell = &mut out[i + j];
                *cell = std::mem::replace(cell, T::zero()) + prod;
            }
        }
        Self::new(out)
    }
}

/// Field-only operations, used on Q(i)[λ].
impl Poly<GaussianRational> {
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| {
                let k = GaussianRational::new(
                    crate::exact::Rational::from_integer(BigInt::from(k)),
                    crate::exact::Rational::zero(),
                );
                c.clone() * k
            })
            .collect();
        Self::new(coeffs)
    }

    /// Monic rescaling (zero polynomial stays zero).
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lead) => {
                let inv = GaussianRational::one()
                    .checked_div(lead)
                    .expect("nonzero leading coefficient");
                Self::new(
                    self.coeffs
                        .iter()
                        .map(|c| c.clone() * inv.clone())
                        .collect(),
                )
            }
        }
    }

    /// Euclidean division: self = q·div + r with deg r < deg div.
    /// Panics when dividing by zero.
    pub fn divrem(&self, div: &Self) -> (Self, Self) {
        assert!(!div.is_zero(), "polynomial division by zero");
        if self.degree() < div.degree() || self.is_zero() {
            return (Self::zero(), self.clone());
        }
        let lead_inv = GaussianRational::one()
            .checked_div(div.leading().unwrap())
            .unwrap();
        let mut rem = self.coeffs.clone();
        let dq = self.degree() - div.degree();
        let mut quot = vec![GaussianRational::zero(); dq + 1];
        for k in (0..=dq).rev() {
            let factor = rem[k + div.degree()].clone() * lead_inv.clone();
            if !factor.is_zero() {
                for (j, dc) in div.coeffs.iter().enumerate() {
                    let sub = factor.clone() * dc.clone();
                    let cell = &mut rem[k + j];
                    *cell = std::mem::replace(cell, GaussianRational::zero()) - sub;
                }
            }
            quot[k] = factor;
        }
        rem.truncate(div.degree());
        (Self::new(quot), Self::new(rem))
    }

    /// Exact quotient; panics if the division leaves a remainder.
    pub fn div_exact(&self, div: &Self) -> Self {
        let (q, r) = self.divrem(div);
        assert!(r.is_zero(), "polynomial division was not exact");
        q
    }

    /// Monic gcd by the Euclidean algorithm (remainders are re-normalized
    /// each step to keep coefficient growth polynomial).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.monic();
        let mut b = other.monic();
        if a.is_zero() {
            return b;
        }
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Number of distinct roots: deg p − deg gcd(p, p′).
    pub fn distinct_root_count(&self) -> usize {
        if self.degree() == 0 {
            return 0;
        }
        self.degree() - self.gcd(&self.derivative()).degree()
    }

    /// True when the polynomial has a repeated root (gcd(p, p′) is
    /// nonconstant).
    pub fn has_repeated_root(&self) -> bool {
        self.degree() >= 2 && self.gcd(&self.derivative()).degree() > 0
    }
}
