//! Iteration maps (Newton, Halley, Householder, Schröder, secant) and the
//! basin-of-attraction rasterizer.
//!
//! Convergence of an orbit is judged by proximity to a precomputed root,
//! not by |f| getting small, so basins are colored by the *limit* each
//! starting point reaches. A step with a vanishing denominator marks the
//! starting pixel unconverged instead of aborting the render.

use crate::polyroot::{aberth_roots, ComplexPolynomial, PolyrootError};
use crate::raster::Window;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IterateError {
    #[error("root finding for the render target failed: {0}")]
    RootFinding(#[from] PolyrootError),
    #[error("image dimensions must be nonzero")]
    ZeroSize,
    #[error("f'(z) vanishes at the requested point")]
    DerivativeZero,
    #[error("Halley denominator 2f'^2 - f f'' vanishes at the requested point")]
    HalleyDegenerate,
}

/// Signal that a single iteration step could not be taken (vanishing
/// denominator or non-finite result).
#[derive(Debug, Clone, Copy, Error)]
#[error("iteration step failed (vanishing denominator)")]
pub struct StepFailure;

/// Anything that can report f, f′, f″ at a point. Only polynomials are
/// exercised by the test suite, but the maps themselves don't care.
pub trait Evaluator {
    fn eval3(&self, z: Complex64) -> (Complex64, Complex64, Complex64);

    fn eval(&self, z: Complex64) -> Complex64 {
        self.eval3(z).0
    }
}

impl Evaluator for ComplexPolynomial {
    fn eval3(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        self.horner2(z)
    }
}

/// Which one-point (or, for secant, two-point) iteration to run.
///
/// The secant variant carries an optional absolute offset `h` used to seed
/// its second starting point z₋₁ = z₀ + h; `None` picks 10⁻³·(1 + |z₀|).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IterationKind {
    Newton,
    Halley,
    Householder,
    Schroeder,
    Secant { h: Option<f64> },
}

impl IterationKind {
    pub fn name(&self) -> &'static str {
        match self {
            IterationKind::Newton => "newton",
            IterationKind::Halley => "halley",
            IterationKind::Householder => "householder",
            IterationKind::Schroeder => "schroeder",
            IterationKind::Secant { .. } => "secant",
        }
    }

    fn secant_start(&self, z0: Complex64) -> Complex64 {
        let h = match self {
            IterationKind::Secant { h: Some(h) } => *h,
            _ => 1e-3 * (1.0 + z0.norm()),
        };
        z0 + Complex64::new(h, 0.0)
    }
}

fn finite_or_fail(z: Complex64) -> Result<Complex64, StepFailure> {
    if z.is_finite() {
        Ok(z)
    } else {
        Err(StepFailure)
    }
}

/// One iteration step at `z`. Secant additionally needs the previous point
/// `z_prev`; other kinds ignore it.
///
/// Formulas: Newton z − f/f′; Halley z − 2ff′/(2f′² − ff″); Householder
/// (order 3) z − (f/f′)(1 + ff″/(2f′²)); Schröder z − ff′/(f′² − ff″);
/// secant z − f(z)(z − z₋)/(f(z) − f(z₋)).
pub fn step(
    kind: IterationKind,
    f: &impl Evaluator,
    z: Complex64,
    z_prev: Option<Complex64>,
) -> Result<Complex64, StepFailure> {
    match kind {
        IterationKind::Newton => {
            let (fv, dv, _) = f.eval3(z);
            if dv.norm_sqr() == 0.0 {
                return Err(StepFailure);
            }
            finite_or_fail(z - fv / dv)
        }
        IterationKind::Halley => {
            let (fv, dv, d2v) = f.eval3(z);
            let den = 2.0 * dv * dv - fv * d2v;
            if den.norm_sqr() == 0.0 {
                return Err(StepFailure);
            }
            finite_or_fail(z - 2.0 * fv * dv / den)
        }
        IterationKind::Householder => {
            let (fv, dv, d2v) = f.eval3(z);
            if dv.norm_sqr() == 0.0 {
                return Err(StepFailure);
            }
            let newton = fv / dv;
            finite_or_fail(z - newton * (1.0 + fv * d2v / (2.0 * dv * dv)))
        }
        IterationKind::Schroeder => {
            let (fv, dv, d2v) = f.eval3(z);
            let den = dv * dv - fv * d2v;
            if den.norm_sqr() == 0.0 {
                return Err(StepFailure);
            }
            finite_or_fail(z - fv * dv / den)
        }
        IterationKind::Secant { .. } => {
            let prev = z_prev.unwrap_or_else(|| kind.secant_start(z));
            if (z - prev).norm_sqr() == 0.0 {
                // degenerate chord; the point is its own successor
                return Ok(z);
            }
            let fz = f.eval(z);
            let fp = f.eval(prev);
            let den = fz - fp;
            if den.norm_sqr() == 0.0 {
                return Err(StepFailure);
            }
            finite_or_fail(z - fz * (z - prev) / den)
        }
    }
}

/// Runs an orbit from `z0` until it lands within `tol` of one of the given
/// roots (returning that root's index and the number of steps taken) or
/// the step budget is exhausted. A failed step reports `None` with the
/// number of completed steps.
pub fn iterate_to_root(
    kind: IterationKind,
    f: &impl Evaluator,
    z0: Complex64,
    roots: &[Complex64],
    tol: f64,
    max_iter: u32,
) -> (Option<usize>, u32) {
    let tol_sqr = tol * tol;
    let nearest_within = |z: Complex64| -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (j, &r) in roots.iter().enumerate() {
            let d = (z - r).norm_sqr();
            if d <= tol_sqr && best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        best.map(|(j, _)| j)
    };

    let mut prev = match kind {
        IterationKind::Secant { .. } => Some(kind.secant_start(z0)),
        _ => None,
    };
    let mut z = z0;
    for n in 0..=max_iter {
        if let Some(j) = nearest_within(z) {
            return (Some(j), n);
        }
        if n == max_iter {
            break;
        }
        match step(kind, f, z, prev) {
            Ok(next) => {
                prev = Some(z);
                z = next;
            }
            Err(StepFailure) => return (None, n),
        }
    }
    (None, max_iter)
}

/// Per-pixel outcome of iterating from every pixel center of a window:
/// which root the orbit reached (−1 when none) and how many steps it took.
/// Row 0 is the top of the image (largest imaginary part).
#[derive(Debug, Clone, PartialEq)]
pub struct BasinImage {
    pub width: usize,
    pub height: usize,
    pub window: Window,
    pub root_index: Vec<i32>,
    pub iter_count: Vec<u32>,
    /// The roots the pixels were classified against, in index order.
    pub roots: Vec<Complex64>,
    pub max_iter: u32,
}

/// Rasterizes basins of attraction for `p` over `window`. Roots are found
/// once with a tolerance well below `tol`, then every pixel-center orbit is
/// classified. Deterministic for fixed inputs regardless of thread count
/// (pixels are partitioned by row and never race).
pub fn render_basins(
    p: &ComplexPolynomial,
    kind: IterationKind,
    window: Window,
    width: usize,
    height: usize,
    tol: f64,
    max_iter: u32,
) -> Result<BasinImage, IterateError> {
    if width == 0 || height == 0 {
        return Err(IterateError::ZeroSize);
    }
    let root_tol = (tol * 1e-4).clamp(1e-13, 1e-9);
    let roots = aberth_roots(p, root_tol, 600)?.roots;

    let mut root_index = vec![-1i32; width * height];
    let mut iter_count = vec![0u32; width * height];
    root_index
        .par_chunks_mut(width)
        .zip(iter_count.par_chunks_mut(width))
        .enumerate()
        .for_each(|(row, (idx_row, iter_row))| {
            for col in 0..width {
                let z0 = window.pixel_center(col, row, width, height);
                let (hit, iters) = iterate_to_root(kind, p, z0, &roots, tol, max_iter);
                idx_row[col] = hit.map_or(-1, |j| j as i32);
                iter_row[col] = iters;
            }
        });

    Ok(BasinImage {
        width,
        height,
        window,
        root_index,
        iter_count,
        roots,
        max_iter,
    })
}

/// Computes the same step two ways: Halley's iteration on f, and Newton's
/// iteration on g = f/√(f′) evaluated through g′/g = f′/f − f″/(2f′) (no
/// branch cuts involved). The two agree to roundoff; the pair is returned
/// so callers can see both routes.
pub fn halley_equivalence_check(
    f: &impl Evaluator,
    z: Complex64,
) -> Result<(Complex64, Complex64), IterateError> {
    let (fv, dv, d2v) = f.eval3(z);
    if dv.norm_sqr() == 0.0 {
        return Err(IterateError::DerivativeZero);
    }
    let den = 2.0 * dv * dv - fv * d2v;
    if den.norm_sqr() == 0.0 {
        return Err(IterateError::HalleyDegenerate);
    }
    if fv.norm_sqr() == 0.0 {
        // exactly at a root: both maps fix it
        return Ok((z, z));
    }
    let halley = z - 2.0 * fv * dv / den;
    let log_deriv = dv / fv - d2v / (2.0 * dv);
    let newton_on_g = z - log_deriv.inv();
    Ok((halley, newton_on_g))
}
