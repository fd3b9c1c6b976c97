//! Dense complex polynomials and simultaneous root finding.
//!
//! This is the double-precision root oracle used by the fractal renderer,
//! the Bohemian cross-checks, and the small-index Mandelbrot zeros. Roots
//! come from the Ehrlich–Aberth iteration with all estimates updated
//! simultaneously (Jacobi style, so a run is deterministic no matter how
//! callers parallelize around it).

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyrootError {
    #[error("root finding needs degree >= 1 (got degree {0})")]
    DegreeTooSmall(usize),
    #[error("tolerance must be positive (got {0})")]
    BadTolerance(f64),
    #[error("invalid derivative order {0}; only 0, 1, 2 are supported")]
    BadDerivativeOrder(usize),
    #[error(
        "Ehrlich-Aberth did not converge in {max_iter} sweeps (worst correction {worst:.3e})"
    )]
    NonConvergence {
        max_iter: usize,
        worst: f64,
        /// Best estimates at the point of failure.
        best: RootSet,
    },
}

/// Dense complex polynomial, coefficients in ascending degree order with
/// trailing zeros trimmed at construction. The empty list is the zero
/// polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| c.norm_sqr() == 0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.horner2(z).0
    }

    /// Horner evaluation of p, p′ and p″ in one pass.
    #[inline]
    pub fn horner2(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let (mut p, mut dp, mut d2p) = (zero, zero, zero);
        for &c in self.coeffs.iter().rev() {
            d2p = d2p * z + dp;
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp, d2p * 2.0)
    }

    /// Scale factor Σ|aₖ||z|ᵏ used for relative residuals; this is the
    /// conditioning quantity of the monomial basis at z.
    pub fn coefficient_scale(&self, z: Complex64) -> f64 {
        let r = z.norm();
        let mut scale = 0.0;
        let mut rk = 1.0;
        for c in &self.coeffs {
            scale += c.norm() * rk;
            rk *= r;
        }
        scale
    }

    /// Residual |p(z)| / Σ|aₖ||z|ᵏ, dimensionless and meaningful even for
    /// ill-conditioned polynomials. Exact zeros report 0 even when the
    /// scale vanishes (e.g. z = 0 with a zero constant term).
    pub fn scaled_residual(&self, z: Complex64) -> f64 {
        let pv = self.eval(z).norm();
        if pv == 0.0 {
            return 0.0;
        }
        pv / self.coefficient_scale(z).max(f64::MIN_POSITIVE)
    }
}

/// Values of p and its first `k` derivatives at z (k ≤ 2).
pub fn eval_derivs(
    p: &ComplexPolynomial,
    z: Complex64,
    k: usize,
) -> Result<Vec<Complex64>, PolyrootError> {
    if k > 2 {
        return Err(PolyrootError::BadDerivativeOrder(k));
    }
    let (v, d1, d2) = p.horner2(z);
    Ok([v, d1, d2][..=k].to_vec())
}

/// All roots of a polynomial together with scaled residuals and the number
/// of Ehrlich–Aberth sweeps it took to find them.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl RootSet {
    /// Greedy clustering for multiplicity reporting: roots closer than
    /// `cluster_tol` to an already-open cluster join it. Aberth returns a
    /// multiple root as a tight clump of simple estimates; callers pick the
    /// tolerance (10³·tol is the documented default heuristic).
    pub fn clusters(&self, cluster_tol: f64) -> Vec<(Complex64, usize)> {
        let mut clusters: Vec<(Complex64, usize)> = Vec::new();
        for &r in &self.roots {
            match clusters
                .iter_mut()
                .find(|(c, n)| (*c / *n as f64 - r).norm() <= cluster_tol)
            {
                Some((c, n)) => {
                    *c += r;
                    *n += 1;
                }
                None => clusters.push((r, 1)),
            }
        }
        clusters
            .into_iter()
            .map(|(sum, n)| (sum / n as f64, n))
            .collect()
    }
}

fn initial_guesses(p: &ComplexPolynomial) -> Vec<Complex64> {
    let d = p.degree();
    let lead = p.coeffs[d].norm();
    let radius = 1.0
        + p.coeffs[..d]
            .iter()
            .map(|c| c.norm() / lead)
            .fold(0.0, f64::max);
    // Offset angle keeps the start set off the symmetry axes of real
    // polynomials, which can trap the simultaneous iteration.
    (0..d)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / d as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect()
}

/// Simultaneous Ehrlich–Aberth root finding.
///
/// Converged when every correction satisfies |w| ≤ tol·(1 + |root|).
/// Multiple roots come back with multiplicity as clustered estimates. On
/// failure the error carries the best iterates reached.
pub fn aberth_roots(
    p: &ComplexPolynomial,
    tol: f64,
    max_iter: usize,
) -> Result<RootSet, PolyrootError> {
    if p.degree() < 1 || p.is_zero() {
        return Err(PolyrootError::DegreeTooSmall(p.degree()));
    }
    if !(tol > 0.0) {
        return Err(PolyrootError::BadTolerance(tol));
    }
    let d = p.degree();
    let mut z = initial_guesses(p);
    let mut corrections = vec![f64::INFINITY; d];

    for sweep in 1..=max_iter {
        // Jacobi sweep: every update reads the previous sweep's estimates.
        let mut next = z.clone();
        for i in 0..d {
            let zi = z[i];
            let (pv, dpv, _) = p.horner2(zi);
            if pv.norm_sqr() == 0.0 {
                corrections[i] = 0.0;
                continue;
            }
            let newton = if dpv.norm_sqr() == 0.0 {
                // stationary point: nudge deterministically and retry next sweep
                next[i] = zi + Complex64::from_polar(1e-6 * (1.0 + zi.norm()), 0.7);
                corrections[i] = f64::INFINITY;
                continue;
            } else {
                pv / dpv
            };
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    let diff = zi - zj;
                    if diff.norm_sqr() > 0.0 {
                        repulsion += diff.inv();
                    } else {
                        // coincident estimates: separate them
                        repulsion += Complex64::new(1e12, 0.0);
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let w = if denom.norm_sqr() == 0.0 { newton } else { newton / denom };
            if w.is_finite() {
                next[i] = zi - w;
                corrections[i] = w.norm();
            } else {
                next[i] = zi * 0.5;
                corrections[i] = f64::INFINITY;
            }
        }
        z = next;
        let done = z
            .iter()
            .zip(&corrections)
            .all(|(zi, w)| *w <= tol * (1.0 + zi.norm()));
        if done {
            let residuals = z.iter().map(|&r| p.scaled_residual(r)).collect();
            return Ok(RootSet {
                roots: z,
                residuals,
                iterations: sweep,
            });
        }
    }

    let worst = corrections.iter().cloned().fold(0.0, f64::max);
    let residuals = z.iter().map(|&r| p.scaled_residual(r)).collect();
    Err(PolyrootError::NonConvergence {
        max_iter,
        worst,
        best: RootSet {
            roots: z,
            residuals,
            iterations: max_iter,
        },
    })
}

/// Newton polish of a root estimate. Steps are accepted only while |p|
/// does not increase (with up to 20 halvings per step); a vanishing
/// derivative returns the input flagged unpolished.
pub fn polish_root(p: &ComplexPolynomial, z0: Complex64) -> (Complex64, bool) {
    let mut z = z0;
    let mut pv = p.eval(z).norm();
    let mut polished = false;
    for _ in 0..60 {
        if pv == 0.0 {
            return (z, true);
        }
        let (v, dv, _) = p.horner2(z);
        if dv.norm_sqr() < f64::MIN_POSITIVE {
            return (z, polished);
        }
        let mut step = v / dv;
        if !step.is_finite() {
            return (z, polished);
        }
        let mut accepted = false;
        for _ in 0..20 {
            let cand = z - step;
            let cand_pv = p.eval(cand).norm();
            if cand_pv <= pv {
                if (cand - z).norm_sqr() == 0.0 {
                    return (cand, true);
                }
                z = cand;
                pv = cand_pv;
                accepted = true;
                polished = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (z, polished)
}

/// The degree-8 polynomial behind the basin figure:
/// z^8+3z^7+5z^6+5z^5+4z^4+2z^3+z^2+z.
#[cfg(test)]
pub(crate) fn figure_poly() -> ComplexPolynomial {
    ComplexPolynomial::from_real(&[0.0, 1.0, 1.0, 2.0, 4.0, 5.0, 5.0, 3.0, 1.0])
}
