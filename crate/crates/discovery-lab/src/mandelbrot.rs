//! Mandelbrot polynomials zₙ(c): z₀ = 0, z_{n+1} = zₙ² + c, viewed as
//! polynomials in c of degree 2^{n−1}.
//!
//! Zero finding evaluates through the recurrence (with its derivative),
//! never through monomial coefficients — the coefficient path is
//! exponentially ill-conditioned and exists here only for the condition
//! number Bₙ, the unimodality check, and small-index cross-checks.

use crate::polyroot::RootSet;
use crate::raster::Window;
use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

/// Exact coefficient work beyond this index is refused by the default
/// entry points (degree 2^{n−1} = 2048 at the cap).
pub const DEFAULT_INDEX_CAP: u32 = 12;

const MAX_SWEEPS_WARM: usize = 500;
const MAX_SWEEPS_COLD: usize = 1500;

#[derive(Debug, Error)]
pub enum MandelbrotError {
    #[error(
        "index {n} exceeds the cap {cap}: degree would be {degree} \
         (~{cost} big-integer multiplies)"
    )]
    IndexTooLarge { n: u32, cap: u32, degree: u128, cost: u128 },
    #[error("zeros need index n >= 1")]
    IndexTooSmall,
    #[error("tolerance must be positive (got {0})")]
    BadTolerance(f64),
    #[error("escape radius must be >= 2 (got {0})")]
    BadEscapeRadius(f64),
    #[error("image dimensions must be nonzero")]
    ZeroSize,
    #[error("zero finding did not converge at level {level} (worst residual {worst:.3e})")]
    NonConvergence { level: u32, worst: f64 },
}

/// zₙ(c) and its derivative dzₙ/dc by the forward recurrence
/// z ← z² + c, z′ ← 2zz′ + 1 from (0, 0). Escaping values overflow to
/// infinity in the usual IEEE way; the renderer and the zero finder both
/// guard for that.
pub fn eval_with_derivative(n: u32, c: Complex64) -> (Complex64, Complex64) {
    let mut z = Complex64::new(0.0, 0.0);
    let mut dz = Complex64::new(0.0, 0.0);
    for _ in 0..n {
        dz = 2.0 * z * dz + Complex64::new(1.0, 0.0);
        z = z * z + c;
    }
    (z, dz)
}

/// Exact zₙ at an integer point (coefficient cross-checks).
pub fn eval_exact_integer(n: u32, x: &BigInt) -> BigInt {
    let mut z = BigInt::zero();
    for _ in 0..n {
        z = &z * &z + x;
    }
    z
}

fn check_cap(n: u32, cap: u32) -> Result<(), MandelbrotError> {
    if n > cap {
        let degree = 1u128 << (n - 1).min(127);
        Err(MandelbrotError::IndexTooLarge {
            n,
            cap,
            degree,
            cost: degree.saturating_mul(degree) / 2,
        })
    } else {
        Ok(())
    }
}

/// Exact monomial coefficients a₀..a_{dₙ} of zₙ(c), ascending. Computed by
/// big-integer convolution: square the previous vector, add 1 to the c¹
/// term. All coefficients are non-negative.
pub fn coefficients(n: u32) -> Result<Vec<BigUint>, MandelbrotError> {
    coefficients_with_cap(n, DEFAULT_INDEX_CAP)
}

pub fn coefficients_with_cap(n: u32, cap: u32) -> Result<Vec<BigUint>, MandelbrotError> {
    check_cap(n, cap)?;
    if n == 0 {
        return Ok(vec![BigUint::zero()]);
    }
    let mut coeffs = vec![BigUint::zero(), BigUint::one()]; // z₁ = c
    for _ in 1..n {
        let mut next = vec![BigUint::zero(); 2 * coeffs.len() - 1];
        for (i, a) in coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in coeffs.iter().enumerate() {
                if !b.is_zero() {
                    next[i + j] += a * b;
                }
            }
        }
        next[1] += 1u32;
        coeffs = next;
    }
    Ok(coeffs)
}

/// Exact condition number Bₙ(ρ) = Σ aₖ ρᵏ (the coefficients are
/// non-negative, so no absolute values are needed).
pub fn condition_number_exact(
    n: u32,
    radius: &crate::exact::Rational,
) -> Result<crate::exact::Rational, MandelbrotError> {
    use crate::exact::Rational;
    let coeffs = coefficients(n)?;
    // Horner from the top keeps everything in one running value
    let mut acc = Rational::zero();
    for a in coeffs.iter().rev() {
        acc = acc * radius.clone() + Rational::from_integer(BigInt::from(a.clone()));
    }
    Ok(acc)
}

/// Bₙ(radius) as a double, accumulated exactly and rounded once at the
/// end (may round to infinity: Bₙ grows doubly exponentially in n).
pub fn condition_number(n: u32, radius: f64) -> Result<f64, MandelbrotError> {
    use crate::exact::Rational;
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(MandelbrotError::BadTolerance(radius));
    }
    let exact_radius = Rational::from_float(radius).expect("finite radius");
    let value = condition_number_exact(n, &exact_radius)?;
    Ok(value.to_f64().unwrap_or(f64::INFINITY))
}

/// Outcome of the unimodality check on the nonzero coefficients of zₙ:
/// positive, non-decreasing up to the maximum, then non-increasing.
/// `argmax_index` is the position (in the full coefficient vector) of the
/// first coefficient attaining the maximum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unimodality {
    pub is_unimodal: bool,
    pub argmax_index: usize,
    pub first_violation: Option<usize>,
}

pub fn unimodality_check(n: u32) -> Result<Unimodality, MandelbrotError> {
    let coeffs = coefficients(n)?;
    let nonzero: Vec<(usize, &BigUint)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .collect();
    if nonzero.is_empty() {
        return Ok(Unimodality {
            is_unimodal: true,
            argmax_index: 0,
            first_violation: None,
        });
    }
    let max = nonzero.iter().map(|(_, a)| (*a).clone()).max().unwrap();
    let peak = nonzero.iter().position(|(_, a)| **a == max).unwrap();
    let argmax_index = nonzero[peak].0;
    for k in 1..nonzero.len() {
        let rising = k <= peak;
        let (prev, cur) = (nonzero[k - 1].1, nonzero[k].1);
        let ok = if rising { cur >= prev } else { cur <= prev };
        if !ok {
            return Ok(Unimodality {
                is_unimodal: false,
                argmax_index,
                first_violation: Some(nonzero[k].0),
            });
        }
    }
    Ok(Unimodality {
        is_unimodal: true,
        argmax_index,
        first_violation: None,
    })
}

/// One Jacobi sweep state for the recurrence-based Ehrlich–Aberth solver.
/// Returns (estimates, newton residuals, sweeps used) on convergence.
fn aberth_recurrence(
    level: u32,
    mut z: Vec<Complex64>,
    tol: f64,
    max_sweeps: usize,
) -> Result<(Vec<Complex64>, Vec<f64>, usize), (Vec<Complex64>, f64)> {
    let d = z.len();
    let mut worst = f64::INFINITY;
    for sweep in 0..=max_sweeps {
        // Newton corrections at the current estimates (previous sweep's
        // values only — keeps parallel updates deterministic)
        let newton: Vec<Complex64> = z
            .par_iter()
            .map(|&c| {
                let (v, dv) = eval_with_derivative(level, c);
                if v.is_finite() && dv.is_finite() && dv.norm_sqr() > 0.0 {
                    v / dv
                } else {
                    Complex64::new(f64::NAN, f64::NAN)
                }
            })
            .collect();
        let residuals: Vec<f64> = newton
            .iter()
            .map(|w| if w.is_finite() { w.norm() } else { f64::INFINITY })
            .collect();
        worst = residuals.iter().cloned().fold(0.0, f64::max);
        if worst <= tol {
            return Ok((z, residuals, sweep));
        }
        if sweep == max_sweeps {
            break;
        }
        let next: Vec<Complex64> = (0..d)
            .into_par_iter()
            .map(|i| {
                let zi = z[i];
                let ni = newton[i];
                if !ni.is_finite() {
                    // runaway estimate: pull it toward the origin
                    return zi * 0.5;
                }
                let mut repulsion = Complex64::new(0.0, 0.0);
                for (j, &zj) in z.iter().enumerate() {
                    if j != i {
                        let diff = zi - zj;
                        if diff.norm_sqr() > 0.0 {
                            repulsion += diff.inv();
                        } else {
                            repulsion += Complex64::new(1e12, 0.0);
                        }
                    }
                }
                let den = Complex64::new(1.0, 0.0) - ni * repulsion;
                let w = if den.norm_sqr() == 0.0 { ni } else { ni / den };
                if w.is_finite() {
                    zi - w
                } else {
                    zi * 0.5
                }
            })
            .collect();
        z = next;
    }
    Err((z, worst))
}

fn golden_angle(k: usize) -> f64 {
    2.399_963_229_728_653 * k as f64
}

fn circle_guesses(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| {
            Complex64::from_polar(
                1.2,
                2.0 * std::f64::consts::PI * k as f64 / count as f64 + 0.4,
            )
        })
        .collect()
}

/// All 2^{n−1} zeros of zₙ — the hyperbolic centers whose period divides n.
///
/// Ehrlich–Aberth on the recurrence evaluation, warm-started level by
/// level: each zero of z_{n−1} is duplicated with ± perturbations, which in
/// practice lands close to the next level's zero cloud. A plain circle
/// start is the fallback when a warm-started level stalls. Residuals are
/// the scale-free Newton corrections |zₙ/zₙ′|.
pub fn zeros(n: u32, tol: f64) -> Result<RootSet, MandelbrotError> {
    zeros_with_cap(n, tol, DEFAULT_INDEX_CAP)
}

pub fn zeros_with_cap(n: u32, tol: f64, cap: u32) -> Result<RootSet, MandelbrotError> {
    if n < 1 {
        return Err(MandelbrotError::IndexTooSmall);
    }
    check_cap(n, cap)?;
    if !(tol > 0.0) {
        return Err(MandelbrotError::BadTolerance(tol));
    }

    // z₁(c) = c: its zero is exact
    let mut current = vec![Complex64::new(0.0, 0.0)];
    let mut residuals = vec![0.0f64];
    let mut total_sweeps = 0usize;

    for level in 2..=n {
        let mut guesses = Vec::with_capacity(current.len() * 2);
        for (k, &root) in current.iter().enumerate() {
            let delta = Complex64::from_polar(1e-3, golden_angle(k));
            guesses.push(root + delta);
            guesses.push(root - delta);
        }
        let attempt = aberth_recurrence(level, guesses, tol, MAX_SWEEPS_WARM);
        let (roots, res, sweeps) = match attempt {
            Ok(done) => done,
            Err(_) => {
                // documented fallback: plain circle start
                let cold = circle_guesses(1 << (level - 1));
                aberth_recurrence(level, cold, tol, MAX_SWEEPS_COLD).map_err(
                    |(_, worst)| MandelbrotError::NonConvergence { level, worst },
                )?
            }
        };
        total_sweeps += sweeps;
        current = roots;
        residuals = res;
    }

    Ok(RootSet {
        roots: current,
        residuals,
        iterations: total_sweeps,
    })
}

/// Zeros of zₙ split by exact period: `kept` are the zeros far from every
/// zero of every z_d with d a proper divisor of n (those have period
/// exactly n), `removed` are the lower-period centers, and `ambiguous`
/// lists tolerance collisions (distance between 10·tol and 20·tol of the
/// lower-period set).
#[derive(Debug, Clone)]
pub struct PeriodSubset {
    pub kept: RootSet,
    pub removed: Vec<Complex64>,
    pub ambiguous: Vec<Complex64>,
}

pub fn exact_period_subset(n: u32, tol: f64) -> Result<PeriodSubset, MandelbrotError> {
    let full = zeros(n, tol)?;
    let mut lower: Vec<Complex64> = Vec::new();
    for d in 1..n {
        if n % d == 0 {
            lower.extend(zeros(d, tol)?.roots);
        }
    }
    let mut kept = RootSet {
        roots: Vec::new(),
        residuals: Vec::new(),
        iterations: full.iterations,
    };
    let mut removed = Vec::new();
    let mut ambiguous = Vec::new();
    for (&root, &res) in full.roots.iter().zip(&full.residuals) {
        let dist = lower
            .iter()
            .map(|l| (l - root).norm())
            .fold(f64::INFINITY, f64::min);
        if dist <= 10.0 * tol {
            removed.push(root);
        } else if dist <= 20.0 * tol {
            ambiguous.push(root);
        } else {
            kept.roots.push(root);
            kept.residuals.push(res);
        }
    }
    Ok(PeriodSubset {
        kept,
        removed,
        ambiguous,
    })
}

/// First iteration count n with |zₙ(c)| > radius, or None within the
/// budget (c behaves as a member of the Mandelbrot set at this depth).
pub fn escapes(c: Complex64, max_iter: u32, radius: f64) -> Option<u32> {
    let r2 = radius * radius;
    let mut z = Complex64::new(0.0, 0.0);
    for k in 1..=max_iter {
        z = z * z + c;
        if !z.is_finite() || z.norm_sqr() > r2 {
            return Some(k);
        }
    }
    None
}

/// Escape-time grid over a window; row 0 is the top of the image. Interior
/// pixels hold `max_iter`.
#[derive(Debug, Clone, PartialEq)]
pub struct EscapeGrid {
    pub width: usize,
    pub height: usize,
    pub window: Window,
    pub counts: Vec<u32>,
    pub max_iter: u32,
}

pub fn escape_time_render(
    window: Window,
    width: usize,
    height: usize,
    max_iter: u32,
    escape_radius: f64,
) -> Result<EscapeGrid, MandelbrotError> {
    if width == 0 || height == 0 {
        return Err(MandelbrotError::ZeroSize);
    }
    if !(escape_radius >= 2.0) {
        return Err(MandelbrotError::BadEscapeRadius(escape_radius));
    }
    let mut counts = vec![0u32; width * height];
    counts
        .par_chunks_mut(width)
        .enumerate()
        .for_each(|(row, out)| {
            for (col, cell) in out.iter_mut().enumerate() {
                let c = window.pixel_center(col, row, width, height);
                *cell = escapes(c, max_iter, escape_radius).unwrap_or(max_iter);
            }
        });
    Ok(EscapeGrid {
        width,
        height,
        window,
        counts,
        max_iter,
    })
}
