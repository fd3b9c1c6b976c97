//! Bohemian matrix families: structured matrices whose entries range over
//! a small finite population. The module enumerates whole families,
//! computes exact determinants and characteristic polynomials (Toeplitz
//! recurrence for the Hessenberg family, Faddeev–LeVerrier for the rest),
//! runs a dense complex eigensolver over every member, and aggregates
//! eigenvalues into density grids and exact statistics.

mod eigen;
mod gaussian;
mod matrix;
mod polyring;

pub use eigen::{eigenvalues, EigenError};
pub use gaussian::{FromGaussian, GaussianRational, ParseGaussianError};
pub use matrix::Mat;
pub use polyring::Poly;

use crate::polyroot::{aberth_roots, ComplexPolynomial, PolyrootError};
use crate::raster::{DensityGrid, RasterError, Window};
use num_complex::Complex64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::HashMap;
use std::ops::Neg;
use thiserror::Error;

/// Enumerating more matrices than this is refused outright.
const DENSITY_SIZE_CAP: u128 = 1 << 24;
/// Statistics enumerate the whole family exactly; keep that desk-scale.
const STATS_SIZE_CAP: u128 = 1 << 20;
/// Faddeev–LeVerrier is O(dim⁴) exact work per matrix.
const FL_COST_CAP: u128 = 1 << 27;
/// Exact distinct-eigenvalue counting works on the lcm of the distinct
/// characteristic polynomials; beyond this total degree fall back to
/// clustered floating-point roots.
const EXACT_EIG_DEGREE_CAP: usize = 256;
const NUMERIC_EIG_ROOT_CAP: usize = 300_000;

#[derive(Debug, Error)]
pub enum BohemianError {
    #[error("{kind} families need dimension >= {min} (got {dim})")]
    InvalidDimension {
        kind: &'static str,
        dim: usize,
        min: usize,
    },
    #[error("population must not be empty")]
    EmptyPopulation,
    #[error("population values must be pairwise distinct (duplicate {0})")]
    DuplicatePopulationValue(String),
    #[error("custom pattern must be a nonempty square grid")]
    PatternNotSquare,
    #[error("custom pattern slots must be numbered contiguously from 1 (missing s{missing})")]
    PatternSlotsNotContiguous { missing: usize },
    #[error("pattern line {line}: cannot parse token {token:?}")]
    PatternParse { line: usize, token: String },
    #[error("assignment has {got} values but the family has {expected} parameters")]
    SlotCountMismatch { expected: usize, got: usize },
    #[error("family size overflows the addressable range")]
    SizeOverflow,
    #[error("{what} is infeasible for a family of {size} matrices (cap {cap}); sample a subset instead")]
    Infeasible {
        what: &'static str,
        size: u128,
        cap: u128,
    },
    #[error("eigensolver failed on family member #{index}: {source}")]
    Eigen { index: u128, source: EigenError },
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error("root finding on a characteristic polynomial failed: {0}")]
    Polyroot(#[from] PolyrootError),
}

/// The finite set of values family entries are drawn from, kept both as
/// exact Gaussian rationals and as their double-precision images.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    values: Vec<GaussianRational>,
    floats: Vec<Complex64>,
}

impl Population {
    pub fn new(values: Vec<GaussianRational>) -> Result<Self, BohemianError> {
        if values.is_empty() {
            return Err(BohemianError::EmptyPopulation);
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(BohemianError::DuplicatePopulationValue(v.to_string()));
            }
        }
        let floats = values.iter().map(|v| v.to_complex()).collect();
        Ok(Self { values, floats })
    }

    /// Parses a comma-separated population such as `1,i` or `-1,0,1`.
    pub fn parse(text: &str) -> Result<Self, BohemianError> {
        let values = text
            .split(',')
            .map(|tok| {
                tok.parse::<GaussianRational>()
                    .map_err(|e| BohemianError::PatternParse {
                        line: 0,
                        token: e.0,
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty populations
    }

    pub fn values(&self) -> &[GaussianRational] {
        &self.values
    }

    pub fn floats(&self) -> &[Complex64] {
        &self.floats
    }
}

/// One cell of a custom family pattern.
#[derive(Debug, Clone, PartialEq)]
pub enum PatternEntry {
    Fixed(GaussianRational),
    Slot(usize),
    NegSlot(usize),
}

/// A structured matrix family over a finite population.
#[derive(Debug, Clone, PartialEq)]
pub enum BohemianFamily {
    /// Upper triangular Toeplitz band t₁…t_m (diagonal t₁) with constant −1
    /// first subdiagonal and zeros below.
    HessenbergToeplitz { dim: usize },
    /// Skew-symmetric (A = −Aᵀ) with free first and second superdiagonals:
    /// t₁…t_{n−1} then t_n…t_{2n−3}.
    SkewPentadiagonal { dim: usize },
    /// Arbitrary square pattern of fixed values, slots, and negated slots.
    Custom { pattern: Vec<Vec<PatternEntry>> },
}

impl BohemianFamily {
    pub fn hessenberg_toeplitz(dim: usize) -> Result<Self, BohemianError> {
        if dim < 1 {
            return Err(BohemianError::InvalidDimension {
                kind: "Hessenberg-Toeplitz",
                dim,
                min: 1,
            });
        }
        Ok(Self::HessenbergToeplitz { dim })
    }

    pub fn skew_pentadiagonal(dim: usize) -> Result<Self, BohemianError> {
        if dim < 3 {
            return Err(BohemianError::InvalidDimension {
                kind: "skew-pentadiagonal",
                dim,
                min: 3,
            });
        }
        Ok(Self::SkewPentadiagonal { dim })
    }

    pub fn custom(pattern: Vec<Vec<PatternEntry>>) -> Result<Self, BohemianError> {
        let dim = pattern.len();
        if dim == 0 || pattern.iter().any(|row| row.len() != dim) {
            return Err(BohemianError::PatternNotSquare);
        }
        let mut max_slot = 0usize;
        let mut seen = Vec::new();
        for row in &pattern {
            for cell in row {
                if let PatternEntry::Slot(k) | PatternEntry::NegSlot(k) = cell {
                    if *k == 0 {
                        return Err(BohemianError::PatternSlotsNotContiguous { missing: 0 });
                    }
                    max_slot = max_slot.max(*k);
                    if !seen.contains(k) {
                        seen.push(*k);
                    }
                }
            }
        }
        for k in 1..=max_slot {
            if !seen.contains(&k) {
                return Err(BohemianError::PatternSlotsNotContiguous { missing: k });
            }
        }
        Ok(Self::Custom { pattern })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::HessenbergToeplitz { dim } | Self::SkewPentadiagonal { dim } => *dim,
            Self::Custom { pattern } => pattern.len(),
        }
    }

    /// Number of free population-valued parameters.
    pub fn parameter_count(&self) -> usize {
        match self {
            Self::HessenbergToeplitz { dim } => *dim,
            Self::SkewPentadiagonal { dim } => 2 * dim - 3,
            Self::Custom { pattern } => pattern
                .iter()
                .flatten()
                .filter_map(|cell| match cell {
                    PatternEntry::Slot(k) | PatternEntry::NegSlot(k) => Some(*k),
                    PatternEntry::Fixed(_) => None,
                })
                .max()
                .unwrap_or(0),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::HessenbergToeplitz { .. } => "hessenberg-toeplitz",
            Self::SkewPentadiagonal { .. } => "skew-pentadiagonal",
            Self::Custom { .. } => "custom",
        }
    }
}

/// Parses a custom pattern from text: one row per line, whitespace-
/// separated cells, each `s<k>`, `-s<k>`, or a Gaussian-rational literal.
/// Blank lines and `#` comments are skipped.
pub fn parse_pattern(text: &str) -> Result<Vec<Vec<PatternEntry>>, BohemianError> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for token in line.split_whitespace() {
            let entry = if let Some(rest) = token.strip_prefix("-s") {
                PatternEntry::NegSlot(rest.parse().map_err(|_| BohemianError::PatternParse {
                    line: lineno + 1,
                    token: token.to_string(),
                })?)
            } else if let Some(rest) = token.strip_prefix('s') {
                PatternEntry::Slot(rest.parse().map_err(|_| BohemianError::PatternParse {
                    line: lineno + 1,
                    token: token.to_string(),
                })?)
            } else {
                PatternEntry::Fixed(token.parse().map_err(|_| BohemianError::PatternParse {
                    line: lineno + 1,
                    token: token.to_string(),
                })?)
            };
            row.push(entry);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// |population|^parameter_count, the number of matrices in the family.
pub fn family_size(
    family: &BohemianFamily,
    population: &Population,
) -> Result<u128, BohemianError> {
    let base = population.len() as u128;
    let mut size: u128 = 1;
    for _ in 0..family.parameter_count() {
        size = size.checked_mul(base).ok_or(BohemianError::SizeOverflow)?;
    }
    Ok(size)
}

/// Assignment (population indices per slot) at a lexicographic position.
/// Index 0 is all-first-value; index size−1 is all-last-value; adjacent
/// indices differ in the trailing slots (big-endian mixed radix).
pub fn assignment_at(pop_size: usize, slots: usize, index: u128) -> Vec<usize> {
    let base = pop_size as u128;
    let mut digits = vec![0usize; slots];
    let mut rest = index;
    for d in digits.iter_mut().rev() {
        *d = (rest % base) as usize;
        rest /= base;
    }
    digits
}

/// Inverse of [`assignment_at`].
pub fn index_of(pop_size: usize, assignment: &[usize]) -> u128 {
    let base = pop_size as u128;
    assignment
        .iter()
        .fold(0u128, |acc, &d| acc * base + d as u128)
}

/// Lexicographic stream of all assignments of a family.
pub struct Assignments {
    pop_size: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Assignments {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.current.take()?;
        let mut next = current.clone();
        // odometer increment; drop out once every digit wraps
        let mut pos = next.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            next[pos] += 1;
            if next[pos] < self.pop_size {
                self.current = Some(next);
                break;
            }
            next[pos] = 0;
        }
        if current.is_empty() {
            // zero-parameter family: a single empty assignment
            self.current = None;
        }
        Some(current)
    }
}

/// Deterministic enumeration of every assignment, lexicographic over slot
/// values. The index↔assignment bijection ([`assignment_at`]) serves
/// parallel chunking.
pub fn enumerate(
    family: &BohemianFamily,
    population: &Population,
) -> Result<Assignments, BohemianError> {
    family_size(family, population)?; // reject unaddressable families
    Ok(Assignments {
        pop_size: population.len(),
        current: Some(vec![0; family.parameter_count()]),
    })
}

/// Maps an index assignment to concrete values (exact or floating).
pub fn assignment_values<T: FromGaussian>(
    population: &Population,
    assignment: &[usize],
) -> Vec<T> {
    assignment
        .iter()
        .map(|&k| T::from_gaussian(&population.values()[k]))
        .collect()
}

/// Builds the family member for one assignment of parameter values.
pub fn build_matrix<T>(family: &BohemianFamily, values: &[T]) -> Result<Mat<T>, BohemianError>
where
    T: Clone + Zero + One + Neg<Output = T> + FromGaussian,
{
    if values.len() != family.parameter_count() {
        return Err(BohemianError::SlotCountMismatch {
            expected: family.parameter_count(),
            got: values.len(),
        });
    }
    let dim = family.dim();
    let mat = match family {
        BohemianFamily::HessenbergToeplitz { .. } => Mat::from_fn(dim, |i, j| {
            if j >= i {
                values[j - i].clone()
            } else if j + 1 == i {
                -T::one()
            } else {
                T::zero()
            }
        }),
        BohemianFamily::SkewPentadiagonal { .. } => Mat::from_fn(dim, |i, j| {
            if j == i + 1 {
                values[i].clone()
            } else if j == i + 2 {
                values[dim - 1 + i].clone()
            } else if i == j + 1 {
                -values[j].clone()
            } else if i == j + 2 {
                -values[dim - 1 + j].clone()
            } else {
                T::zero()
            }
        }),
        BohemianFamily::Custom { pattern } => Mat::from_fn(dim, |i, j| match &pattern[i][j] {
            PatternEntry::Fixed(g) => T::from_gaussian(g),
            PatternEntry::Slot(k) => values[k - 1].clone(),
            PatternEntry::NegSlot(k) => -values[k - 1].clone(),
        }),
    };
    Ok(mat)
}

/// Determinant of the m×m Hessenberg–Toeplitz member with band t₁…t_m via
/// the recurrence D₀ = 1, D_m = Σ_{k=1..m} t_k·D_{m−k} (valid because the
/// subdiagonal is the constant −1).
pub fn det_hessenberg_toeplitz<T>(t: &[T]) -> T
where
    T: Clone + Zero + One,
{
    let m = t.len();
    let mut d: Vec<T> = Vec::with_capacity(m + 1);
    d.push(T::one());
    for k in 1..=m {
        let mut acc = T::zero();
        for j in 1..=k {
            acc = acc + t[j - 1].clone() * d[k - j].clone();
        }
        d.push(acc);
    }
    d.pop().unwrap()
}

/// Characteristic polynomial det(A − λI) with exact Gaussian-rational
/// coefficients, ascending in λ. The leading coefficient is (−1)^dim; this
/// sign convention makes distinctness counts canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharPoly {
    coeffs: Vec<GaussianRational>,
}

impl CharPoly {
    fn from_poly(p: Poly<GaussianRational>, dim: usize) -> Self {
        let mut coeffs: Vec<GaussianRational> = p.coeffs().to_vec();
        assert_eq!(coeffs.len(), dim + 1, "characteristic polynomial degree");
        coeffs.shrink_to_fit();
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[GaussianRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Constant term, equal to det(A).
    pub fn constant_term(&self) -> &GaussianRational {
        &self.coeffs[0]
    }

    pub fn to_poly(&self) -> Poly<GaussianRational> {
        Poly::new(self.coeffs.clone())
    }

    pub fn to_complex_polynomial(&self) -> ComplexPolynomial {
        ComplexPolynomial::new(self.coeffs.iter().map(|c| c.to_complex()).collect())
    }
}

/// Characteristic polynomial of the Hessenberg–Toeplitz member: the same
/// determinant recurrence run with t₁ replaced by the degree-1 polynomial
/// t₁ − λ, all arithmetic exact.
pub fn charpoly_hessenberg_toeplitz(t: &[GaussianRational]) -> CharPoly {
    let elements: Vec<Poly<GaussianRational>> = t
        .iter()
        .enumerate()
        .map(|(k, tk)| {
            if k == 0 {
                Poly::new(vec![tk.clone(), -GaussianRational::one()])
            } else {
                Poly::constant(tk.clone())
            }
        })
        .collect();
    CharPoly::from_poly(det_hessenberg_toeplitz(&elements), t.len())
}

/// Characteristic polynomial of an arbitrary exact matrix by the
/// Faddeev–LeVerrier recurrence (exact; only divisions by 1..dim occur).
pub fn charpoly_exact(a: &Mat<GaussianRational>) -> CharPoly {
    let n = a.dim();
    // coefficients of det(λI − A), ascending
    let mut up = vec![GaussianRational::zero(); n + 1];
    up[n] = GaussianRational::one();
    let mut am: Mat<GaussianRational> = Mat::zeros(n);
    for k in 1..=n {
        let mut mk = am.clone();
        for i in 0..n {
            let v = mk.at(i, i).clone() + up[n - k + 1].clone();
            *mk.at_mut(i, i) = v;
        }
        am = a.mul_mat(&mk);
        let tr = am.trace();
        let divisor = GaussianRational::from_integer(k as i64);
        up[n - k] = -(tr.checked_div(&divisor).unwrap());
    }
    // det(A − λI) = (−1)^n det(λI − A)
    if n % 2 == 1 {
        for c in &mut up {
            *c = -c.clone();
        }
    }
    CharPoly::from_poly(Poly::new(up), n)
}

/// Aggregate counts over a whole family, computed from exact
/// characteristic polynomials. `distinct_eigenvalue_count` is exact (lcm /
/// squarefree degree over Q(i)) when the combined degree is small, and
/// falls back to clustered floating-point roots (tolerance 10⁻⁶) for
/// larger families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyStatistics {
    pub matrix_count: u64,
    pub distinct_charpoly_count: u64,
    pub distinct_eigenvalue_count: u64,
    pub singular_count: u64,
    pub multiple_eigenvalue_matrix_count: u64,
}

pub fn family_statistics(
    family: &BohemianFamily,
    population: &Population,
) -> Result<FamilyStatistics, BohemianError> {
    let size = family_size(family, population)?;
    if size > STATS_SIZE_CAP {
        return Err(BohemianError::Infeasible {
            what: "exact family statistics",
            size,
            cap: STATS_SIZE_CAP,
        });
    }
    let dim = family.dim() as u128;
    let toeplitz = matches!(family, BohemianFamily::HessenbergToeplitz { .. });
    if !toeplitz && size.saturating_mul(dim.pow(4)) > FL_COST_CAP {
        return Err(BohemianError::Infeasible {
            what: "exact characteristic polynomials",
            size,
            cap: FL_COST_CAP / dim.pow(4).max(1),
        });
    }

    let mut counts: HashMap<CharPoly, u64> = HashMap::new();
    for assignment in enumerate(family, population)? {
        let values: Vec<GaussianRational> = assignment_values(population, &assignment);
        let cp = if toeplitz {
            charpoly_hessenberg_toeplitz(&values)
        } else {
            charpoly_exact(&build_matrix(family, &values)?)
        };
        *counts.entry(cp).or_insert(0) += 1;
    }

    let matrix_count = size as u64;
    let distinct_charpoly_count = counts.len() as u64;
    let mut singular_count = 0u64;
    let mut multiple_eigenvalue_matrix_count = 0u64;
    for (cp, n) in &counts {
        if cp.constant_term().is_zero() {
            singular_count += n;
        }
        if cp.to_poly().has_repeated_root() {
            multiple_eigenvalue_matrix_count += n;
        }
    }

    let total_degree: usize = counts.keys().map(|cp| cp.degree()).sum();
    let distinct_eigenvalue_count = if total_degree <= EXACT_EIG_DEGREE_CAP {
        let mut lcm = Poly::<GaussianRational>::one();
        for cp in counts.keys() {
            let p = cp.to_poly().monic();
            let g = lcm.gcd(&p);
            lcm = (lcm * p.div_exact(&g)).monic();
        }
        lcm.distinct_root_count() as u64
    } else {
        if total_degree > NUMERIC_EIG_ROOT_CAP {
            return Err(BohemianError::Infeasible {
                what: "distinct-eigenvalue counting",
                size,
                cap: NUMERIC_EIG_ROOT_CAP as u128,
            });
        }
        let mut roots: Vec<Complex64> = Vec::with_capacity(total_degree);
        for cp in counts.keys() {
            let p = cp.to_complex_polynomial();
            match aberth_roots(&p, 1e-10, 400) {
                Ok(rs) => roots.extend(rs.roots),
                // multiple roots stall above tight tolerances; the cluster
                // pass below absorbs the residual scatter
                Err(PolyrootError::NonConvergence { best, .. }) => roots.extend(best.roots),
                Err(e) => return Err(e.into()),
            }
        }
        cluster_count(&roots, 1e-6) as u64
    };

    Ok(FamilyStatistics {
        matrix_count,
        distinct_charpoly_count,
        distinct_eigenvalue_count,
        singular_count,
        multiple_eigenvalue_matrix_count,
    })
}

/// Number of tolerance-clusters in a point cloud (spatial hash, so large
/// clouds stay linear).
fn cluster_count(points: &[Complex64], tol: f64) -> usize {
    let mut cells: HashMap<(i64, i64), Vec<Complex64>> = HashMap::new();
    let mut count = 0usize;
    for &p in points {
        let cx = (p.re / tol).floor() as i64;
        let cy = (p.im / tol).floor() as i64;
        let mut found = false;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(reps) = cells.get(&(cx + dx, cy + dy)) {
                    if reps.iter().any(|r| (r - p).norm() <= tol) {
                        found = true;
                        break 'search;
                    }
                }
            }
        }
        if !found {
            count += 1;
            cells.entry((cx, cy)).or_default().push(p);
        }
    }
    count
}

/// Histogram of the eigenvalues of every family member over a window.
/// Eigenvalues outside the window are dropped and counted, never clamped.
/// Deterministic: per-chunk grids merge by integer addition.
pub fn density_plot(
    family: &BohemianFamily,
    population: &Population,
    window: Window,
    bins_w: usize,
    bins_h: usize,
) -> Result<DensityGrid, BohemianError> {
    let size = family_size(family, population)?;
    if size > DENSITY_SIZE_CAP {
        return Err(BohemianError::Infeasible {
            what: "density enumeration",
            size,
            cap: DENSITY_SIZE_CAP,
        });
    }
    let size = size as u64;
    let slots = family.parameter_count();
    let pop_size = population.len();
    let eigen_tol = 1e-10;

    const CHUNK: u64 = 512;
    let n_chunks = size.div_ceil(CHUNK);
    DensityGrid::new(window, bins_w, bins_h)?; // validate window/bins once
    let empty = || DensityGrid::new(window, bins_w, bins_h).expect("validated above");

    (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut grid = empty();
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(size);
            for index in start..end {
                let assignment = assignment_at(pop_size, slots, index as u128);
                let values: Vec<Complex64> = assignment_values(population, &assignment);
                let matrix = build_matrix(family, &values)?;
                let eigs = eigenvalues(&matrix, eigen_tol).map_err(|source| {
                    BohemianError::Eigen {
                        index: index as u128,
                        source,
                    }
                })?;
                grid.accumulate(&eigs);
            }
            Ok(grid)
        })
        .try_reduce(empty, |mut a, b| {
            a.merge(&b);
            Ok(a)
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Rational;
    use num_bigint::BigInt;
    use std::collections::HashSet;

    fn gi(n: i64) -> GaussianRational {
        GaussianRational::from_integer(n)
    }

    fn pop(text: &str) -> Population {
        Population::parse(text).unwrap()
    }

    // ---- a tiny multivariate polynomial ring for symbolic oracles ----

    #[derive(Debug, Clone, PartialEq, Eq)]
    struct MultiPoly {
        terms: std::collections::BTreeMap<[u8; 5], i64>,
    }

    impl MultiPoly {
        fn var(k: usize) -> Self {
            let mut e = [0u8; 5];
            e[k] = 1;
            Self {
                terms: [(e, 1)].into(),
            }
        }

        fn term(coeff: i64, exps: [u8; 5]) -> Self {
            Self {
                terms: [(exps, coeff)].into(),
            }
        }

        fn normalized(mut self) -> Self {
            self.terms.retain(|_, c| *c != 0);
            self
        }
    }

    impl Zero for MultiPoly {
        fn zero() -> Self {
            Self {
                terms: Default::default(),
            }
        }
        fn is_zero(&self) -> bool {
            self.terms.is_empty()
        }
    }

    impl One for MultiPoly {
        fn one() -> Self {
            Self::term(1, [0; 5])
        }
    }

    impl std::ops::Add for MultiPoly {
        type Output = Self;
        fn add(mut self, rhs: Self) -> Self {
            for (e, c) in rhs.terms {
                *self.terms.entry(e).or_insert(0) += c;
            }
            self.normalized()
        }
    }

    impl std::ops::Mul for MultiPoly {
        type Output = Self;
        fn mul(self, rhs: Self) -> Self {
            let mut out = Self::zero();
            for (ea, ca) in &self.terms {
                for (eb, cb) in &rhs.terms {
                    let mut e = *ea;
                    for (x, y) in e.iter_mut().zip(eb) {
                        *x += y;
                    }
                    *out.terms.entry(e).or_insert(0) += ca * cb;
                }
            }
            out.normalized()
        }
    }

    /// O(n!) cofactor determinant for cross-checking, generic over rings.
    fn cofactor_det<T>(m: &Mat<T>) -> T
    where
        T: Clone + Zero + One + std::ops::Neg<Output = T>,
    {
        let n = m.dim();
        if n == 1 {
            return m.at(0, 0).clone();
        }
        let mut det = T::zero();
        for j in 0..n {
            if m.at(0, j).is_zero() {
                continue;
            }
            let minor = Mat::from_fn(n - 1, |r, c| {
                m.at(r + 1, if c < j { c } else { c + 1 }).clone()
            });
            let mut term = m.at(0, j).clone() * cofactor_det(&minor);
            if j % 2 == 1 {
                term = -term;
            }
            det = det + term;
        }
        det
    }

    #[test]
    fn family_sizes_match_the_counts() {
        let skew5 = BohemianFamily::skew_pentadiagonal(5).unwrap();
        assert_eq!(family_size(&skew5, &pop("1,i")).unwrap(), 128);
        let skew10 = BohemianFamily::skew_pentadiagonal(10).unwrap();
        assert_eq!(family_size(&skew10, &pop("1,i")).unwrap(), 131072);
        let ht10 = BohemianFamily::hessenberg_toeplitz(10).unwrap();
        assert_eq!(family_size(&ht10, &pop("-1,0,1")).unwrap(), 59049);
        assert!(BohemianFamily::skew_pentadiagonal(2).is_err());
        assert!(BohemianFamily::hessenberg_toeplitz(0).is_err());
    }

    #[test]
    fn enumeration_is_a_lexicographic_bijection() {
        let family = BohemianFamily::hessenberg_toeplitz(6).unwrap();
        let p = pop("-1,0,1");
        let size = family_size(&family, &p).unwrap();
        assert_eq!(size, 729);
        let all: Vec<Vec<usize>> = enumerate(&family, &p).unwrap().collect();
        assert_eq!(all.len(), 729);
        assert_eq!(all[0], vec![0; 6]);
        assert_eq!(all[1], vec![0, 0, 0, 0, 0, 1]); // last slot only
        assert_eq!(all[728], vec![2; 6]);
        let distinct: HashSet<&Vec<usize>> = all.iter().collect();
        assert_eq!(distinct.len(), 729);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(sorted, all, "stream must be lexicographic");
        for (i, a) in all.iter().enumerate() {
            assert_eq!(assignment_at(3, 6, i as u128), *a);
            assert_eq!(index_of(3, a), i as u128);
        }
    }

    #[test]
    fn skew_pentadiagonal_matches_the_displayed_five_by_five() {
        let family = BohemianFamily::skew_pentadiagonal(5).unwrap();
        let t: Vec<GaussianRational> = (1..=7).map(gi).collect();
        let m = build_matrix(&family, &t).unwrap();
        let expect: [[i64; 5]; 5] = [
            [0, 1, 5, 0, 0],
            [-1, 0, 2, 6, 0],
            [-5, -2, 0, 3, 7],
            [0, -6, -3, 0, 4],
            [0, 0, -7, -4, 0],
        ];
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(m.at(i, j), &gi(expect[i][j]), "entry ({i},{j})");
            }
        }
        // A + A^T = 0 exactly
        for i in 0..5 {
            for j in 0..5 {
                let sum = m.at(i, j).clone() + m.at(j, i).clone();
                assert!(sum.is_zero());
            }
        }
    }

    #[test]
    fn hessenberg_toeplitz_layout() {
        let family = BohemianFamily::hessenberg_toeplitz(3).unwrap();
        let t: Vec<GaussianRational> = vec![gi(7), gi(8), gi(9)];
        let m = build_matrix(&family, &t).unwrap();
        let expect: [[i64; 3]; 3] = [[7, 8, 9], [-1, 7, 8], [0, -1, 7]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m.at(i, j), &gi(expect[i][j]));
            }
        }
        assert!(matches!(
            build_matrix(&family, &[gi(1)]),
            Err(BohemianError::SlotCountMismatch { expected: 3, got: 1 })
        ));
    }

    #[test]
    fn determinant_recurrence_symbolic_forms() {
        let t: Vec<MultiPoly> = (0..5).map(MultiPoly::var).collect();

        let d2 = det_hessenberg_toeplitz(&t[..2]);
        let expect2 = MultiPoly::term(1, [2, 0, 0, 0, 0]) + MultiPoly::term(1, [0, 1, 0, 0, 0]);
        assert_eq!(d2, expect2); // t1^2 + t2

        let d3 = det_hessenberg_toeplitz(&t[..3]);
        let expect3 = MultiPoly::term(1, [3, 0, 0, 0, 0])
            + MultiPoly::term(2, [1, 1, 0, 0, 0])
            + MultiPoly::term(1, [0, 0, 1, 0, 0]);
        assert_eq!(d3, expect3); // t1^3 + 2 t1 t2 + t3

        let d4 = det_hessenberg_toeplitz(&t[..4]);
        let expect4 = MultiPoly::term(1, [4, 0, 0, 0, 0])
            + MultiPoly::term(3, [2, 1, 0, 0, 0])
            + MultiPoly::term(2, [1, 0, 1, 0, 0])
            + MultiPoly::term(1, [0, 2, 0, 0, 0])
            + MultiPoly::term(1, [0, 0, 0, 1, 0]);
        assert_eq!(d4, expect4); // t1^4 + 3 t1^2 t2 + 2 t1 t3 + t2^2 + t4

        let d5 = det_hessenberg_toeplitz(&t[..5]);
        let expect5 = MultiPoly::term(1, [5, 0, 0, 0, 0])
            + MultiPoly::term(4, [3, 1, 0, 0, 0])
            + MultiPoly::term(3, [2, 0, 1, 0, 0])
            + MultiPoly::term(3, [1, 2, 0, 0, 0])
            + MultiPoly::term(2, [1, 0, 0, 1, 0])
            + MultiPoly::term(2, [0, 1, 1, 0, 0])
            + MultiPoly::term(1, [0, 0, 0, 0, 1]);
        assert_eq!(d5, expect5);
    }

    #[test]
    fn determinant_recurrence_vs_cofactor_expansion() {
        assert_eq!(det_hessenberg_toeplitz(&[gi(1), gi(1), gi(1)]), gi(4));

        let family_values = [-1i64, 0, 1];
        for m in 1..=5usize {
            let family = BohemianFamily::hessenberg_toeplitz(m).unwrap();
            let count = 3usize.pow(m as u32);
            for idx in 0..count {
                let assignment = assignment_at(3, m, idx as u128);
                let t: Vec<GaussianRational> = assignment
                    .iter()
                    .map(|&k| gi(family_values[k]))
                    .collect();
                let fast = det_hessenberg_toeplitz(&t);
                let brute = cofactor_det(&build_matrix(&family, &t).unwrap());
                assert_eq!(fast, brute, "m={m} idx={idx}");
            }
        }
    }

    #[test]
    fn charpoly_small_cases() {
        let cp = charpoly_hessenberg_toeplitz(&[gi(5)]);
        assert_eq!(cp.coeffs(), &[gi(5), gi(-1)]); // t1 - λ

        let cp = charpoly_hessenberg_toeplitz(&[gi(1), gi(1)]);
        assert_eq!(cp.coeffs(), &[gi(2), gi(-2), gi(1)]); // λ² − 2λ + 2

        // three-by-three: recurrence matches both Faddeev–LeVerrier and a
        // symbolic cofactor expansion of det(A - λI)
        for t in [[0i64, 1, 0], [1, 1, 1], [-1, 2, 1], [2, -1, 3]] {
            let tg: Vec<GaussianRational> = t.iter().map(|&x| gi(x)).collect();
            let fast = charpoly_hessenberg_toeplitz(&tg);
            let family = BohemianFamily::hessenberg_toeplitz(3).unwrap();
            let a = build_matrix(&family, &tg).unwrap();
            let fl = charpoly_exact(&a);
            assert_eq!(fast, fl, "t={t:?}");

            let lambda_mat = Mat::from_fn(3, |i, j| {
                let base = Poly::constant(a.at(i, j).clone());
                if i == j {
                    base + Poly::new(vec![GaussianRational::zero(), -GaussianRational::one()])
                } else {
                    base
                }
            });
            let brute = cofactor_det(&lambda_mat);
            assert_eq!(fast.to_poly(), brute, "t={t:?}");
        }
    }

    #[test]
    fn charpoly_constant_term_is_the_determinant() {
        for t in [[1i64, 0, 1], [0, 0, 1], [1, 1, 1]] {
            let tg: Vec<GaussianRational> = t.iter().map(|&x| gi(x)).collect();
            let cp = charpoly_hessenberg_toeplitz(&tg);
            assert_eq!(cp.constant_term(), &det_hessenberg_toeplitz(&tg));
        }
    }

    #[test]
    fn eigenvalues_cross_checked_against_charpoly_roots() {
        let t = vec![gi(0), gi(1), gi(0)];
        let family = BohemianFamily::hessenberg_toeplitz(3).unwrap();
        let exact = build_matrix::<GaussianRational>(&family, &t).unwrap();
        let cp = charpoly_exact(&exact);

        let floats: Vec<Complex64> = t.iter().map(|g| g.to_complex()).collect();
        let a = build_matrix::<Complex64>(&family, &floats).unwrap();
        let eigs = eigenvalues(&a, 1e-10).unwrap();
        let roots = aberth_roots(&cp.to_complex_polynomial(), 1e-12, 400)
            .unwrap()
            .roots;
        for e in &eigs {
            assert!(
                roots.iter().any(|r| (r - e).norm() < 1e-8),
                "eigenvalue {e} is not a charpoly root"
            );
        }
    }

    #[test]
    fn statistics_dimension_one_and_two() {
        let p = pop("-1,0,1");
        let s = family_statistics(&BohemianFamily::hessenberg_toeplitz(1).unwrap(), &p).unwrap();
        assert_eq!(
            s,
            FamilyStatistics {
                matrix_count: 3,
                distinct_charpoly_count: 3,
                distinct_eigenvalue_count: 3,
                singular_count: 1,
                multiple_eigenvalue_matrix_count: 0,
            }
        );

        // dimension 2: charpoly λ² − 2 t1 λ + (t1² + t2); singular iff
        // t1² + t2 = 0; repeated root iff discriminant −4 t2 = 0; the
        // eigenvalues t1 ± √(−t2) over the 9 assignments give 11 values
        let s = family_statistics(&BohemianFamily::hessenberg_toeplitz(2).unwrap(), &p).unwrap();
        assert_eq!(
            s,
            FamilyStatistics {
                matrix_count: 9,
                distinct_charpoly_count: 9,
                distinct_eigenvalue_count: 11,
                singular_count: 3,
                multiple_eigenvalue_matrix_count: 3,
            }
        );
    }

    #[test]
    fn statistics_skew_three_by_three() {
        // char poly is −λ³ − (t1²+t2²+t3²)λ; over {1, i} the sum takes the
        // four values {3, 1, −1, −3}; odd skew matrices are always singular
        let s = family_statistics(
            &BohemianFamily::skew_pentadiagonal(3).unwrap(),
            &pop("1,i"),
        )
        .unwrap();
        assert_eq!(
            s,
            FamilyStatistics {
                matrix_count: 8,
                distinct_charpoly_count: 4,
                distinct_eigenvalue_count: 9,
                singular_count: 8,
                multiple_eigenvalue_matrix_count: 0,
            }
        );
    }

    #[test]
    fn statistics_refuse_oversized_families() {
        let family = BohemianFamily::skew_pentadiagonal(10).unwrap();
        let err = family_statistics(&family, &pop("1,i")).unwrap_err();
        assert!(matches!(err, BohemianError::Infeasible { .. }), "{err}");
    }

    #[test]
    fn density_conserves_and_rotates() {
        let family = BohemianFamily::skew_pentadiagonal(3).unwrap();
        let p = pop("1,i");
        let window = Window::new(-3.0, 3.0, -3.0, 3.0).unwrap();
        let grid = density_plot(&family, &p, window, 25, 25).unwrap();
        assert_eq!(grid.total_binned() + grid.dropped(), 8 * 3);

        // spec(A) = −spec(A) for skew families ⇒ the grid equals its own
        // 180° rotation (odd bin count keeps 0 off the bin boundaries)
        for row in 0..25 {
            for col in 0..25 {
                let a = grid.counts()[row * 25 + col];
                let b = grid.counts()[(24 - row) * 25 + (24 - col)];
                assert_eq!(a, b, "rotation mismatch at ({col},{row})");
            }
        }

        // per-matrix invariants: eigenvalue sum vs trace, spectrum vs its
        // negation as multisets
        for assignment in enumerate(&family, &p).unwrap() {
            let values: Vec<Complex64> = assignment_values(&p, &assignment);
            let a = build_matrix(&family, &values).unwrap();
            let eigs = eigenvalues(&a, 1e-10).unwrap();
            let sum: Complex64 = eigs.iter().sum();
            assert!((sum - a.trace()).norm() <= 1e-8 * a.frobenius_norm().max(1.0));
            for e in &eigs {
                assert!(
                    eigs.iter().any(|f| (f + e).norm() < 1e-6),
                    "spectrum not negation-symmetric"
                );
            }
        }

        // a window that misses the spectrum drops everything
        let far = Window::new(50.0, 51.0, 50.0, 51.0).unwrap();
        let grid = density_plot(&family, &p, far, 4, 4).unwrap();
        assert_eq!(grid.total_binned(), 0);
        assert_eq!(grid.dropped(), 24);
    }

    #[test]
    fn custom_patterns_build_and_validate() {
        let text = "s1 s2\n-1 s1\n";
        let pattern = parse_pattern(text).unwrap();
        let custom = BohemianFamily::custom(pattern).unwrap();
        assert_eq!(custom.parameter_count(), 2);
        let values = vec![gi(3), gi(5)];
        let m = build_matrix(&custom, &values).unwrap();
        let ht = build_matrix(
            &BohemianFamily::hessenberg_toeplitz(2).unwrap(),
            &values,
        )
        .unwrap();
        assert_eq!(m, ht);

        // negated slots and fixed rationals
        let skewish = parse_pattern("0 s1\n-s1 1/2\n").unwrap();
        let fam = BohemianFamily::custom(skewish).unwrap();
        let m = build_matrix(&fam, &[gi(2)]).unwrap();
        assert_eq!(m.at(1, 0), &gi(-2));
        assert_eq!(
            m.at(1, 1),
            &GaussianRational::new(Rational::new(BigInt::from(1), BigInt::from(2)), Rational::zero())
        );

        assert!(matches!(
            BohemianFamily::custom(parse_pattern("s1 s2\n").unwrap()),
            Err(BohemianError::PatternNotSquare)
        ));
        assert!(matches!(
            BohemianFamily::custom(parse_pattern("s1 s3\ns3 s1\n").unwrap()),
            Err(BohemianError::PatternSlotsNotContiguous { missing: 2 })
        ));
        assert!(parse_pattern("s1 wat\n0 s1\n").is_err());
    }

    #[test]
    fn population_validation() {
        assert!(matches!(
            Population::parse("1,1"),
            Err(BohemianError::DuplicatePopulationValue(_))
        ));
        assert!(Population::new(vec![]).is_err());
        let p = pop("1,i");
        assert_eq!(p.len(), 2);
        assert_eq!(p.floats()[1], Complex64::new(0.0, 1.0));
    }
}
