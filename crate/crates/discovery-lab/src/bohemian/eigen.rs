//! Dense complex eigensolver: balance, unitary reduction to upper
//! Hessenberg form, then single-shift QR with deflation. Self-contained on
//! purpose — the matrices here are small (family members of dimension ten
//! or so) and come in the hundreds of thousands, so a lean fixed-cost
//! solver beats a general library hookup.

use super::matrix::Mat;
use num_complex::Complex64;
use thiserror::Error;

type C = Complex64;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("QR iteration did not converge within {sweeps} sweeps on a {dim}x{dim} matrix")]
    NonConvergence { dim: usize, sweeps: usize },
}

#[inline]
fn abs1(z: C) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Parlett–Reinsch balancing: a diagonal similarity with powers of two
/// (exact in floating point) that roughly equalizes row and column norms.
fn balance(h: &mut Mat<C>) {
    let n = h.dim();
    const RADIX: f64 = 2.0;
    for _ in 0..32 {
        let mut converged = true;
        for i in 0..n {
            let mut col_norm = 0.0;
            let mut row_norm = 0.0;
            for j in 0..n {
                if j != i {
                    col_norm += abs1(*h.at(j, i));
                    row_norm += abs1(*h.at(i, j));
                }
            }
            if col_norm == 0.0 || row_norm == 0.0 {
                continue;
            }
            let total = col_norm + row_norm;
            let mut factor = 1.0;
            let mut c = col_norm;
            while c < row_norm / RADIX {
                factor *= RADIX;
                c *= RADIX * RADIX;
            }
            while c > row_norm * RADIX {
                factor /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + row_norm) / factor < 0.95 * total && factor != 1.0 {
                converged = false;
                let inv = 1.0 / factor;
                for j in 0..n {
                    *h.at_mut(i, j) *= inv;
                    *h.at_mut(j, i) *= factor;
                }
            }
        }
        if converged {
            break;
        }
    }
}

/// Complex Givens rotation G = [[c, s], [-s̄, c]] with real c, chosen so
/// that G·(f, g)ᵀ = (r, 0)ᵀ.
#[derive(Clone, Copy)]
struct Givens {
    c: f64,
    s: C,
}

fn make_givens(f: C, g: C) -> (Givens, C) {
    if g.norm_sqr() == 0.0 {
        return (Givens { c: 1.0, s: C::new(0.0, 0.0) }, f);
    }
    if f.norm_sqr() == 0.0 {
        let g_abs = g.norm();
        return (
            Givens {
                c: 0.0,
                s: g.conj() / g_abs,
            },
            C::new(g_abs, 0.0),
        );
    }
    // scale to avoid overflow in the intermediate squares
    let scale = f.re.abs().max(f.im.abs()).max(g.re.abs()).max(g.im.abs());
    let fs = f / scale;
    let gs = g / scale;
    let d = scale * (fs.norm_sqr() + gs.norm_sqr()).sqrt();
    let f_abs = f.norm();
    let phase = f / f_abs;
    let c = f_abs / d;
    let s = phase * g.conj() / d;
    (Givens { c, s }, phase * d)
}

/// Applies G to rows (p, q) on columns `cols`.
fn rotate_rows(h: &mut Mat<C>, p: usize, q: usize, giv: Givens, cols: std::ops::Range<usize>) {
    for j in cols {
        let u = *h.at(p, j);
        let v = *h.at(q, j);
        *h.at_mut(p, j) = giv.c * u + giv.s * v;
        *h.at_mut(q, j) = -giv.s.conj() * u + giv.c * v;
    }
}

/// Applies Gᴴ to columns (p, q) on rows `rows`.
fn rotate_cols(h: &mut Mat<C>, p: usize, q: usize, giv: Givens, rows: std::ops::Range<usize>) {
    for i in rows {
        let u = *h.at(i, p);
        let v = *h.at(i, q);
        *h.at_mut(i, p) = giv.c * u + giv.s.conj() * v;
        *h.at_mut(i, q) = -giv.s * u + giv.c * v;
    }
}

/// Unitary similarity reduction to upper Hessenberg form.
fn hessenberg(h: &mut Mat<C>) {
    let n = h.dim();
    for k in 0..n.saturating_sub(2) {
        for i in k + 2..n {
            if h.at(i, k).norm_sqr() == 0.0 {
                continue;
            }
            let (giv, r) = make_givens(*h.at(k + 1, k), *h.at(i, k));
            *h.at_mut(k + 1, k) = r;
            *h.at_mut(i, k) = C::new(0.0, 0.0);
            rotate_rows(h, k + 1, i, giv, k + 1..n);
            rotate_cols(h, k + 1, i, giv, 0..n);
        }
    }
}

/// Eigenvalues of a 2×2 block, the larger-magnitude one computed from the
/// quadratic formula and the other recovered from the determinant.
fn eig22(a: C, b: C, c: C, d: C) -> (C, C) {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let l1 = if abs1(half_tr + disc) >= abs1(half_tr - disc) {
        half_tr + disc
    } else {
        half_tr - disc
    };
    if l1.norm_sqr() == 0.0 {
        return (l1, half_tr * 2.0 - l1);
    }
    (l1, det / l1)
}

/// One explicit single-shift QR sweep on the active block [lo, hi):
/// H − σI = QR, then H ← RQ + σI. Hessenberg structure is preserved.
fn qr_step(h: &mut Mat<C>, lo: usize, hi: usize, sigma: C) {
    for i in lo..hi {
        let v = *h.at(i, i);
        *h.at_mut(i, i) = v - sigma;
    }
    let mut rotations = Vec::with_capacity(hi - lo - 1);
    for k in lo..hi - 1 {
        let (giv, r) = make_givens(*h.at(k, k), *h.at(k + 1, k));
        *h.at_mut(k, k) = r;
        *h.at_mut(k + 1, k) = C::new(0.0, 0.0);
        rotate_rows(h, k, k + 1, giv, k + 1..hi);
        rotations.push(giv);
    }
    for (offset, giv) in rotations.into_iter().enumerate() {
        let k = lo + offset;
        rotate_cols(h, k, k + 1, giv, lo..(k + 2).min(hi));
    }
    for i in lo..hi {
        let v = *h.at(i, i);
        *h.at_mut(i, i) = v + sigma;
    }
}

/// All eigenvalues of a dense complex matrix.
///
/// Accuracy contract: for each returned λ there is a unit vector v with
/// ‖Av − λv‖ ≤ tol·‖A‖_F (spot-checked by inverse iteration in the test
/// suite). The deflation threshold is derived from `tol` but never looser
/// than 10⁻⁶ relative, so small tolerances cost sweeps, not correctness.
pub fn eigenvalues(a: &Mat<C>, tol: f64) -> Result<Vec<C>, EigenError> {
    let n = a.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![*a.at(0, 0)]);
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);

    let thresh = if tol > 0.0 {
        (tol / 100.0).clamp(f64::EPSILON, 1e-6)
    } else {
        f64::EPSILON
    };
    let hnorm = h_frobenius(&h).max(f64::MIN_POSITIVE);
    let max_sweeps = 40 * n;
    let mut sweeps = 0;
    let mut stagnation = 0;
    let mut eigs = vec![C::new(0.0, 0.0); n];
    let mut hi = n;

    while hi > 0 {
        if hi == 1 {
            eigs[0] = *h.at(0, 0);
            break;
        }
        // flush negligible subdiagonals in the live region
        for i in 1..hi {
            let sub = abs1(*h.at(i, i - 1));
            if sub == 0.0 {
                continue;
            }
            let local = abs1(*h.at(i - 1, i - 1)) + abs1(*h.at(i, i));
            let cutoff = if local > 0.0 {
                thresh * local
            } else {
                f64::EPSILON * hnorm
            };
            if sub <= cutoff {
                *h.at_mut(i, i - 1) = C::new(0.0, 0.0);
            }
        }
        // active block [lo, hi)
        let mut lo = hi - 1;
        while lo > 0 && h.at(lo, lo - 1).norm_sqr() != 0.0 {
            lo -= 1;
        }
        if lo == hi - 1 {
            eigs[hi - 1] = *h.at(hi - 1, hi - 1);
            hi -= 1;
            stagnation = 0;
            continue;
        }
        if lo == hi - 2 {
            let (l1, l2) = eig22(
                *h.at(hi - 2, hi - 2),
                *h.at(hi - 2, hi - 1),
                *h.at(hi - 1, hi - 2),
                *h.at(hi - 1, hi - 1),
            );
            eigs[hi - 2] = l1;
            eigs[hi - 1] = l2;
            hi -= 2;
            stagnation = 0;
            continue;
        }

        sweeps += 1;
        if sweeps > max_sweeps {
            return Err(EigenError::NonConvergence { dim: n, sweeps });
        }
        stagnation += 1;
        let sigma = if stagnation % 10 == 0 {
            // exceptional shift to break limit cycles
            *h.at(hi - 1, hi - 1) + C::new(0.75 * abs1(*h.at(hi - 1, hi - 2)), 0.0)
        } else {
            // Wilkinson: the trailing 2x2 eigenvalue nearest the corner
            let corner = *h.at(hi - 1, hi - 1);
            let (l1, l2) = eig22(
                *h.at(hi - 2, hi - 2),
                *h.at(hi - 2, hi - 1),
                *h.at(hi - 1, hi - 2),
                corner,
            );
            if abs1(l1 - corner) <= abs1(l2 - corner) {
                l1
            } else {
                l2
            }
        };
        qr_step(&mut h, lo, hi, sigma);
    }
    Ok(eigs)
}

fn h_frobenius(h: &Mat<C>) -> f64 {
    let n = h.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += h.at(i, j).norm_sqr();
        }
    }
    s.sqrt()
}

// ---- LU with partial pivoting (inverse-iteration spot checks) ----

#[cfg(test)]
pub(crate) struct Lu {
    lu: Mat<C>,
    piv: Vec<usize>,
}

#[cfg(test)]
pub(crate) fn lu_decompose(a: &Mat<C>) -> Lu {
    let n = a.dim();
    let mut lu = a.clone();
    let mut piv: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if abs1(*lu.at(i, k)) > abs1(*lu.at(p, k)) {
                p = i;
            }
        }
        if p != k {
            for j in 0..n {
                let tmp = *lu.at(k, j);
                *lu.at_mut(k, j) = *lu.at(p, j);
                *lu.at_mut(p, j) = tmp;
            }
            piv.swap(k, p);
        }
        let mut pivot = *lu.at(k, k);
        if pivot.norm_sqr() == 0.0 {
            // keep the factorization usable on (numerically) singular input
            pivot = C::new(1e-300, 0.0);
            *lu.at_mut(k, k) = pivot;
        }
        for i in k + 1..n {
            let factor = *lu.at(i, k) / pivot;
            *lu.at_mut(i, k) = factor;
            for j in k + 1..n {
                let sub = factor * *lu.at(k, j);
                let v = *lu.at(i, j);
                *lu.at_mut(i, j) = v - sub;
            }
        }
    }
    Lu { lu, piv }
}

#[cfg(test)]
pub(crate) fn lu_solve(lu: &Lu, b: &[C]) -> Vec<C> {
    let n = lu.lu.dim();
    let mut x: Vec<C> = lu.piv.iter().map(|&p| b[p]).collect();
    for k in 0..n {
        for i in k + 1..n {
            let sub = *lu.lu.at(i, k) * x[k];
            x[i] -= sub;
        }
    }
    for k in (0..n).rev() {
        x[k] /= *lu.lu.at(k, k);
        for i in 0..k {
            let sub = *lu.lu.at(i, k) * x[k];
            x[i] -= sub;
        }
    }
    x
}

/// ‖Av − λv‖₂ for the best unit v found by a few inverse-iteration steps.
#[cfg(test)]
pub(crate) fn eigen_residual(a: &Mat<C>, lambda: C) -> f64 {
    let n = a.dim();
    let delta = 1e-11 * (1.0 + lambda.norm());
    let shifted = Mat::from_fn(n, |i, j| {
        let base = *a.at(i, j);
        if i == j {
            base - lambda - C::new(delta, delta)
        } else {
            base
        }
    });
    let lu = lu_decompose(&shifted);
    let mut v: Vec<C> = (0..n)
        .map(|k| C::new(1.0, 0.5 + k as f64 / n as f64))
        .collect();
    for _ in 0..3 {
        v = lu_solve(&lu, &v);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            break;
        }
        for z in &mut v {
            *z /= norm;
        }
    }
    let mut worst = 0.0f64;
    let mut res = vec![C::new(0.0, 0.0); n];
    for i in 0..n {
        let mut acc = C::new(0.0, 0.0);
        for j in 0..n {
            acc += *a.at(i, j) * v[j];
        }
        res[i] = acc - lambda * v[i];
        worst += res[i].norm_sqr();
    }
    worst.sqrt()
}
