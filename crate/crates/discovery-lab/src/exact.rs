//! Exact rational arithmetic for the square-root Newton iteration.
//!
//! Everything in this module is exact: iterates of x ← (x + m/x)/2 as
//! reduced big-integer fractions, their residuals x² − m, canonical finite
//! continued fractions, and the closed-form iterate computed in the
//! quadratic field Q(√m). There is deliberately no floating point here;
//! progress of the iteration is observed through residual shrinkage rather
//! than a numeric limit.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

/// Arbitrary-precision rational, always stored reduced with a positive
/// denominator (guaranteed by `num-rational` at construction).
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),
    #[error("{what} must be positive")]
    NonPositive { what: &'static str },
    #[error("continued fraction must have at least one term")]
    EmptyContinuedFraction,
    #[error("continued fraction term #{index} is {value}; terms after the first must be >= 1")]
    NonCanonicalTerm { index: usize, value: BigInt },
    #[error("modulus {m} must be a square-free integer >= 2")]
    InvalidModulus { m: u64 },
    #[error("division by the zero element of Q(sqrt {m})")]
    ZeroDivisor { m: u64 },
}

fn rational_from_u64(m: u64) -> Rational {
    Rational::from_integer(BigInt::from(m))
}

/// One Newton step for √m: returns (x + m/x)/2 in lowest terms.
pub fn newton_sqrt_step(x: &Rational, m: u64) -> Result<Rational, ExactError> {
    if m == 0 {
        return Err(ExactError::NonPositive { what: "m" });
    }
    if x.is_zero() {
        return Err(ExactError::DivisionByZero("newton_sqrt_step"));
    }
    let m = rational_from_u64(m);
    Ok((x + m / x) / Rational::from_integer(BigInt::from(2)))
}

/// The iterates [x₀, x₁, …, xₙ] of `newton_sqrt_step` starting from `x0`.
pub fn newton_sqrt_sequence(m: u64, x0: &Rational, n: usize) -> Result<Vec<Rational>, ExactError> {
    let mut seq = Vec::with_capacity(n + 1);
    seq.push(x0.clone());
    for _ in 0..n {
        let next = newton_sqrt_step(seq.last().unwrap(), m)?;
        seq.push(next);
    }
    Ok(seq)
}

/// The exact residual x² − m. For an iterate x this says which number x
/// is the exact square root of: x = √(m + residual).
pub fn residual(x: &Rational, m: u64) -> Rational {
    x * x - rational_from_u64(m)
}

/// A finite simple continued fraction [a₀; a₁, a₂, …] in canonical form:
/// every term after the first is ≥ 1 and the last term is ≥ 2 whenever
/// there is more than one term (a trailing 1 is merged into its
/// predecessor at construction, so each rational has a unique form).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuedFraction {
    terms: Vec<BigInt>,
}

impl ContinuedFraction {
    pub fn new<I: Into<BigInt>>(terms: Vec<I>) -> Result<Self, ExactError> {
        let mut terms: Vec<BigInt> = terms.into_iter().map(Into::into).collect();
        if terms.is_empty() {
            return Err(ExactError::EmptyContinuedFraction);
        }
        // Merge a trailing [..., a, 1] into [..., a+1].
        if terms.len() > 1 && terms.last().unwrap().is_one() {
            terms.pop();
            let last = terms.last_mut().unwrap();
            *last += 1;
        }
        for (index, value) in terms.iter().enumerate().skip(1) {
            if value < &BigInt::one() {
                return Err(ExactError::NonCanonicalTerm {
                    index,
                    value: value.clone(),
                });
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty term lists
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}", self.terms[0])?;
        if self.terms.len() > 1 {
            write!(f, "; ")?;
            for (i, t) in self.terms[1..].iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{t}")?;
            }
        }
        write!(f, "]")
    }
}

/// Canonical continued fraction of a positive rational via the Euclidean
/// algorithm. `from_continued_fraction` inverts this exactly.
pub fn to_continued_fraction(x: &Rational) -> Result<ContinuedFraction, ExactError> {
    if !x.is_positive() {
        return Err(ExactError::NonPositive { what: "x" });
    }
    let mut p = x.numer().clone();
    let mut q = x.denom().clone();
    let mut terms = Vec::new();
    while !q.is_zero() {
        let (a, r) = p.div_rem(&q);
        terms.push(a);
        p = q;
        q = r;
    }
    ContinuedFraction::new(terms)
}

/// Exact value of a finite continued fraction.
pub fn from_continued_fraction(cf: &ContinuedFraction) -> Rational {
    let mut value = Rational::from_integer(cf.terms.last().unwrap().clone());
    for term in cf.terms.iter().rev().skip(1) {
        // term + 1/value; intermediate values are >= 1, never zero
        value = Rational::from_integer(term.clone()) + value.recip();
    }
    value
}

/// Checks that `m` is square-free and at least 2 (so √m is irrational and
/// Q(√m) is a genuine quadratic field).
pub fn valid_field_modulus(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    let mut rest = m;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        if rest % p == 0 {
            rest /= p;
            if rest % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// An element a + b√m of the quadratic field Q(√m), with exact rational
/// coordinates. Arithmetic between elements of different fields is a
/// programming error and panics; division by the zero element reports
/// [`ExactError::ZeroDivisor`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticFieldElement {
    a: Rational,
    b: Rational,
    m: u64,
}

impl QuadraticFieldElement {
    pub fn new(a: Rational, b: Rational, m: u64) -> Result<Self, ExactError> {
        if !valid_field_modulus(m) {
            return Err(ExactError::InvalidModulus { m });
        }
        Ok(Self { a, b, m })
    }

    /// The rational unit of Q(√m).
    pub fn one(m: u64) -> Result<Self, ExactError> {
        Self::new(Rational::one(), Rational::zero(), m)
    }

    /// √m itself, i.e. 0 + 1·√m.
    pub fn sqrt_m(m: u64) -> Result<Self, ExactError> {
        Self::new(Rational::zero(), Rational::one(), m)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn surd_part(&self) -> &Rational {
        &self.b
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    fn check_field(&self, other: &Self) {
        assert_eq!(
            self.m, other.m,
            "mixed quadratic fields: Q(sqrt {}) vs Q(sqrt {})",
            self.m, other.m
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_field(other);
        Self {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            m: self.m,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_field(other);
        Self {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
            m: self.m,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_field(other);
        let m = rational_from_u64(self.m);
        Self {
            a: &self.a * &other.a + &(&self.b * &other.b) * &m,
            b: &self.a * &other.b + &self.b * &other.a,
            m: self.m,
        }
    }

    /// Field conjugate a − b√m.
    pub fn conjugate(&self) -> Self {
        Self {
            a: self.a.clone(),
            b: -self.b.clone(),
            m: self.m,
        }
    }

    /// Field norm a² − m·b² (zero exactly for the zero element, since m is
    /// not a perfect square).
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &(&self.b * &self.b) * &rational_from_u64(self.m)
    }

    pub fn div(&self, other: &Self) -> Result<Self, ExactError> {
        self.check_field(other);
        let norm = other.norm();
        if norm.is_zero() {
            return Err(ExactError::ZeroDivisor { m: self.m });
        }
        let num = self.mul(&other.conjugate());
        Ok(Self {
            a: num.a / &norm,
            b: num.b / &norm,
            m: self.m,
        })
    }

    /// self^(2^k) by k repeated squarings.
    pub fn power_2k(&self, k: u32) -> Self {
        let mut value = self.clone();
        for _ in 0..k {
            value = value.mul(&value);
        }
        value
    }
}

impl fmt::Display for QuadraticFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.a, self.b, self.m)
    }
}

/// The nth Newton iterate for √m from x₀ = a/b, computed in closed form as
/// zₙ = √m·(1 + r^(2ⁿ))/(1 − r^(2ⁿ)) with r = (a − b√m)/(a + b√m), entirely
/// in Q(√m). The √m-component cancels exactly and the rational part equals
/// the nth element of [`newton_sqrt_sequence`] started at a/b.
pub fn closed_form_iterate(a: i64, b: i64, m: u64, n: u32) -> Result<Rational, ExactError> {
    if a <= 0 {
        return Err(ExactError::NonPositive { what: "a" });
    }
    if b <= 0 {
        return Err(ExactError::NonPositive { what: "b" });
    }
    let a = Rational::from_integer(BigInt::from(a));
    let b = Rational::from_integer(BigInt::from(b));
    let sqrt_m = QuadraticFieldElement::sqrt_m(m)?;
    let plus = QuadraticFieldElement::new(a.clone(), b.clone(), m)?;
    let minus = QuadraticFieldElement::new(a, -b, m)?;
    let r = minus.div(&plus)?;
    let s = r.power_2k(n);
    let one = QuadraticFieldElement::one(m)?;
    // |r| < 1 strictly for positive a, b, so 1 - r^(2^n) is never zero;
    // div still guards it through the norm check.
    let ratio = one.add(&s).div(&one.sub(&s))?;
    let z = sqrt_m.mul(&ratio);
    assert!(
        z.surd_part().is_zero(),
        "closed-form Newton iterate must be rational"
    );
    Ok(z.rational_part().clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(num: i64, den: i64) -> Rational {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn rat_str(s: &str) -> Rational {
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n, d),
            None => (s, "1"),
        };
        Rational::new(n.parse().unwrap(), d.parse().unwrap())
    }

    #[test]
    fn newton_step_matches_printed_sequence() {
        assert_eq!(newton_sqrt_step(&rat(1, 1), 2).unwrap(), rat(3, 2));
        assert_eq!(newton_sqrt_step(&rat(3, 2), 2).unwrap(), rat(17, 12));
        // exact square root is a fixed point
        assert_eq!(newton_sqrt_step(&rat(2, 1), 4).unwrap(), rat(2, 1));
    }

    #[test]
    fn newton_step_rejects_zero() {
        assert!(matches!(
            newton_sqrt_step(&rat(0, 1), 2),
            Err(ExactError::DivisionByZero(_))
        ));
    }

    #[test]
    fn sequence_for_sqrt2_and_its_squares() {
        let seq = newton_sqrt_sequence(2, &rat(1, 1), 4).unwrap();
        let expect = ["1", "3/2", "17/12", "577/408", "665857/470832"];
        assert_eq!(seq.len(), 5);
        for (x, e) in seq.iter().zip(expect) {
            assert_eq!(x, &rat_str(e));
        }
        let squares: Vec<Rational> = seq.iter().map(|x| x * x).collect();
        let expect_sq = [
            "1",
            "9/4",
            "289/144",
            "332929/166464",
            "443365544449/221682772224",
        ];
        for (x, e) in squares.iter().zip(expect_sq) {
            assert_eq!(x, &rat_str(e));
        }
        assert_eq!(newton_sqrt_sequence(2, &rat(1, 1), 0).unwrap(), vec![rat(1, 1)]);
    }

    #[test]
    fn denominators_follow_the_doubling_recurrence() {
        // Denominators of the sqrt(2) iterates (OEIS A051009). The frozen
        // values were produced by the unreduced recurrence
        // num' = num^2 + 2 den^2, den' = 2 num den, which the reduced
        // iterates must reproduce term by term.
        let seq = newton_sqrt_sequence(2, &rat(1, 1), 7).unwrap();
        let expect_dens = [
            "1",
            "2",
            "12",
            "408",
            "470832",
            "627013566048",
            "1111984844349868137938112",
            "3497379255757941172020851852070562919437964212608",
        ];
        let mut num = BigInt::from(1);
        let mut den = BigInt::from(1);
        for (k, x) in seq.iter().enumerate() {
            assert_eq!(x.denom(), &expect_dens[k].parse::<BigInt>().unwrap());
            assert_eq!(x.denom(), &den, "reduction must not change the denominator");
            assert_eq!(x.numer(), &num);
            let next_num = &num * &num + 2 * &den * &den;
            den = 2 * &num * &den;
            num = next_num;
        }
    }

    #[test]
    fn residuals_are_reciprocal_squared_denominators() {
        assert_eq!(residual(&rat(17, 12), 2), rat(1, 144));
        assert_eq!(residual(&rat(577, 408), 2), rat(1, 166464));
        assert_eq!(residual(&rat(2, 1), 4), rat(0, 1));

        let seq = newton_sqrt_sequence(2, &rat(1, 1), 10).unwrap();
        let mut prev: Option<Rational> = None;
        for x in seq.iter().skip(1) {
            let r = residual(x, 2);
            let den = x.denom().clone();
            assert_eq!(r, Rational::new(BigInt::one(), &den * &den));
            assert!(r.is_positive());
            if let Some(p) = prev {
                assert!(r < p, "residuals must strictly decrease");
            }
            prev = Some(r);
        }
    }

    #[test]
    fn continued_fractions_of_the_iterates() {
        let cf = to_continued_fraction(&rat(17, 12)).unwrap();
        assert_eq!(cf, ContinuedFraction::new(vec![1, 2, 2, 2]).unwrap());
        let cf = to_continued_fraction(&rat(577, 408)).unwrap();
        assert_eq!(
            cf,
            ContinuedFraction::new(vec![1, 2, 2, 2, 2, 2, 2, 2]).unwrap()
        );
        let cf = to_continued_fraction(&rat(5, 1)).unwrap();
        assert_eq!(cf.terms(), &[BigInt::from(5)]);

        // [1; 2 repeated 2^k - 1 times] for k <= 10
        let seq = newton_sqrt_sequence(2, &rat(1, 1), 10).unwrap();
        for (k, x) in seq.iter().enumerate() {
            let cf = to_continued_fraction(x).unwrap();
            let mut expected = vec![BigInt::from(1)];
            expected.extend(std::iter::repeat(BigInt::from(2)).take((1 << k) - 1));
            assert_eq!(cf.terms(), &expected[..], "k = {k}");
        }
    }

    #[test]
    fn continued_fraction_round_trips() {
        let cf = ContinuedFraction::new(vec![1, 2, 2, 2]).unwrap();
        assert_eq!(from_continued_fraction(&cf), rat(17, 12));
        let cf = ContinuedFraction::new(vec![5]).unwrap();
        assert_eq!(from_continued_fraction(&cf), rat(5, 1));

        // [1; 2 x 15] equals the 4th iterate
        let mut terms = vec![1i64];
        terms.extend(std::iter::repeat(2).take((1 << 4) - 1));
        let cf = ContinuedFraction::new(terms).unwrap();
        assert_eq!(
            from_continued_fraction(&cf),
            newton_sqrt_sequence(2, &rat(1, 1), 4).unwrap()[4]
        );
    }

    #[test]
    fn continued_fraction_canonical_form() {
        // trailing 1 merges
        let cf = ContinuedFraction::new(vec![1, 2, 1]).unwrap();
        assert_eq!(cf.terms(), &[BigInt::from(1), BigInt::from(3)]);
        assert!(matches!(
            ContinuedFraction::new(vec![1, 0, 2]),
            Err(ExactError::NonCanonicalTerm { index: 1, .. })
        ));
        assert!(matches!(
            ContinuedFraction::new(Vec::<i64>::new()),
            Err(ExactError::EmptyContinuedFraction)
        ));
        assert!(to_continued_fraction(&rat(-1, 2)).is_err());
        assert!(to_continued_fraction(&rat(0, 1)).is_err());
    }

    proptest! {
        #[test]
        fn cf_round_trip_random_rationals(p in 1i64..=1_000_000, q in 1i64..=1_000_000) {
            let x = rat(p, q);
            let cf = to_continued_fraction(&x).unwrap();
            prop_assert_eq!(from_continued_fraction(&cf), x);
            // canonical: no trailing 1 when longer than one term
            if cf.len() > 1 {
                prop_assert!(cf.terms().last().unwrap() >= &BigInt::from(2));
            }
        }
    }

    #[test]
    fn quadratic_field_arithmetic() {
        let one_plus = QuadraticFieldElement::new(rat(1, 1), rat(1, 1), 2).unwrap();
        let one_minus = one_plus.conjugate();
        // (1+sqrt2)(1-sqrt2) = -1
        let prod = one_plus.mul(&one_minus);
        assert_eq!(prod.rational_part(), &rat(-1, 1));
        assert!(prod.surd_part().is_zero());

        // ((1-sqrt2)/(1+sqrt2))^2 = 17 - 12 sqrt2
        let r = one_minus.div(&one_plus).unwrap();
        let r2 = r.power_2k(1);
        assert_eq!(r2.rational_part(), &rat(17, 1));
        assert_eq!(r2.surd_part(), &rat(-12, 1));

        // the rational subfield is closed under multiplication
        let p = QuadraticFieldElement::new(rat(3, 4), rat(0, 1), 5).unwrap();
        let q = QuadraticFieldElement::new(rat(-2, 3), rat(0, 1), 5).unwrap();
        let pq = p.mul(&q);
        assert_eq!(pq.rational_part(), &rat(-1, 2));
        assert!(pq.surd_part().is_zero());
    }

    #[test]
    fn quadratic_field_rejects_bad_moduli_and_zero_division() {
        for m in [0u64, 1, 4, 9, 12, 18, 50] {
            assert!(QuadraticFieldElement::new(rat(1, 1), rat(1, 1), m).is_err());
        }
        for m in [2u64, 3, 5, 6, 7, 10, 2021] {
            assert!(QuadraticFieldElement::new(rat(1, 1), rat(1, 1), m).is_ok());
        }
        let zero = QuadraticFieldElement::new(rat(0, 1), rat(0, 1), 2).unwrap();
        let one = QuadraticFieldElement::one(2).unwrap();
        assert!(matches!(
            one.div(&zero),
            Err(ExactError::ZeroDivisor { m: 2 })
        ));
    }

    #[test]
    fn closed_form_matches_small_examples() {
        assert_eq!(closed_form_iterate(1, 1, 2, 2).unwrap(), rat(17, 12));
        assert_eq!(closed_form_iterate(1, 1, 2, 0).unwrap(), rat(1, 1));
        let iterated = newton_sqrt_sequence(3, &rat(3, 2), 3).unwrap();
        assert_eq!(closed_form_iterate(3, 2, 3, 3).unwrap(), iterated[3]);
    }

    #[test]
    fn closed_form_agrees_with_iteration_on_a_grid() {
        for a in 1..=5i64 {
            for b in 1..=5i64 {
                for m in [2u64, 3, 5, 6, 7] {
                    let x0 = rat(a, b);
                    let seq = newton_sqrt_sequence(m, &x0, 8).unwrap();
                    for n in 0..=8u32 {
                        assert_eq!(
                            closed_form_iterate(a, b, m, n).unwrap(),
                            seq[n as usize],
                            "a={a} b={b} m={m} n={n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_rejects_bad_inputs() {
        assert!(closed_form_iterate(0, 1, 2, 1).is_err());
        assert!(closed_form_iterate(1, -1, 2, 1).is_err());
        assert!(closed_form_iterate(1, 1, 4, 1).is_err());
        assert!(closed_form_iterate(1, 1, 1, 1).is_err());
    }
}
