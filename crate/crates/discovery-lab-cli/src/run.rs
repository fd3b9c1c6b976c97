//! Command execution: each runner writes its declared artifacts and
//! returns a one-line summary; errors map onto the documented exit codes.

use crate::parse;
use crate::Command;
use discovery_lab::bohemian::{self, BohemianError, BohemianFamily, Population};
use discovery_lab::exact::{self, ExactError, Rational};
use discovery_lab::iterate::{self, IterateError, IterationKind};
use discovery_lab::mandelbrot::{self, MandelbrotError};
use discovery_lab::oeis::{self, OeisError};
use discovery_lab::polyroot::{aberth_roots, ComplexPolynomial, PolyrootError, RootSet};
use discovery_lab::raster::{self, ColorScheme, RasterError, RGBImage};
use num_complex::Complex64;
use num_traits::Signed;
use rayon::prelude::*;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Eigenvalue CSVs beyond this many rows are refused.
const EIGEN_CSV_CAP: u128 = 4_000_000;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
    Io(String),
    Network(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) => 3,
            CliError::Io(_) => 4,
            CliError::Network(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m)
            | CliError::Compute(m)
            | CliError::Io(m)
            | CliError::Network(m) => write!(f, "{m}"),
        }
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<PolyrootError> for CliError {
    fn from(e: PolyrootError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<IterateError> for CliError {
    fn from(e: IterateError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<MandelbrotError> for CliError {
    fn from(e: MandelbrotError) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<BohemianError> for CliError {
    fn from(e: BohemianError) -> Self {
        match e {
            BohemianError::Raster(RasterError::Io(io)) => CliError::Io(io.to_string()),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<RasterError> for CliError {
    fn from(e: RasterError) -> Self {
        match e {
            RasterError::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<OeisError> for CliError {
    fn from(e: OeisError) -> Self {
        match e {
            OeisError::BadTermCount(_) => CliError::Usage(e.to_string()),
            other => CliError::Network(other.to_string()),
        }
    }
}

fn usage<T>(message: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(message.into()))
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn save_ppm(img: &RGBImage, path: &Path) -> Result<(), CliError> {
    let mut bytes = Vec::with_capacity(img.pixels.len() + 32);
    raster::write_ppm(img, &mut bytes)?;
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn write_roots_csv(dest: &mut impl Write, roots: &RootSet) -> std::io::Result<()> {
    writeln!(dest, "re,im,residual")?;
    for (r, res) in roots.roots.iter().zip(&roots.residuals) {
        writeln!(dest, "{},{},{}", r.re, r.im, res)?;
    }
    Ok(())
}

pub fn run(command: Command) -> Result<String, CliError> {
    match command {
        Command::SqrtDemo { m, x0, n, csv } => run_sqrt_demo(m, &x0, n, csv.as_deref()),
        Command::Fractal {
            poly,
            kind,
            secant_h,
            window,
            size,
            tol,
            max_iter,
            palette_seed,
            out,
        } => run_fractal(
            &poly,
            &kind,
            secant_h,
            &window,
            &size,
            tol,
            max_iter,
            palette_seed,
            &out,
        ),
        Command::Roots {
            poly,
            tol,
            max_iter,
            out,
        } => run_roots(&poly, tol, max_iter, out.as_deref()),
        Command::Bohemian {
            family,
            dim,
            pattern_file,
            population,
            window,
            bins,
            out,
            stats,
            csv,
        } => run_bohemian(
            &family,
            dim,
            pattern_file.as_deref(),
            &population,
            &window,
            &bins,
            out.as_deref(),
            stats.as_deref(),
            csv.as_deref(),
        ),
        Command::Mandelbrot {
            zeros,
            period_subset,
            tol,
            render,
            window,
            size,
            max_iter,
            escape_radius,
            coeffs,
            condition,
            radius,
            out,
        } => run_mandelbrot(MandelbrotArgs {
            zeros,
            period_subset,
            tol,
            render,
            window,
            size,
            max_iter,
            escape_radius,
            coeffs,
            condition,
            radius,
            out,
        }),
        Command::Oeis { terms, limit } => run_oeis(&terms, limit),
    }
}

fn run_sqrt_demo(m: u64, x0: &str, n: usize, csv: Option<&Path>) -> Result<String, CliError> {
    let x0 = parse::parse_rational(x0).map_err(CliError::Usage)?;
    let start = Instant::now();
    let seq = exact::newton_sqrt_sequence(m, &x0, n)?;
    for (k, x) in seq.iter().enumerate() {
        println!("x_{k} = {x}");
        println!("    square:    {}", x * x);
        println!("    residual:  {}", exact::residual(x, m));
        if x.is_positive() {
            println!("    cf:        {}", exact::to_continued_fraction(x)?);
        }
    }
    if let Some(path) = csv {
        let mut text = String::new();
        for x in &seq {
            text.push_str(&x.to_string());
            text.push('\n');
        }
        fs::write(path, text).map_err(|e| io_err(path, e))?;
    }
    let digits = seq.last().unwrap().denom().to_string().len();
    Ok(format!(
        "sqrt-demo: m={m}, {} iterates, final denominator has {digits} digits ({:.3}s)",
        seq.len(),
        start.elapsed().as_secs_f64()
    ))
}

fn parse_kind(kind: &str, secant_h: Option<f64>) -> Result<IterationKind, CliError> {
    if secant_h.is_some() && kind != "secant" {
        return usage("--secant-h only applies to --kind secant");
    }
    if let Some(h) = secant_h {
        if !(h != 0.0 && h.is_finite()) {
            return usage("--secant-h must be finite and nonzero");
        }
    }
    match kind {
        "newton" => Ok(IterationKind::Newton),
        "halley" => Ok(IterationKind::Halley),
        "householder" => Ok(IterationKind::Householder),
        "schroeder" => Ok(IterationKind::Schroeder),
        "secant" => Ok(IterationKind::Secant { h: secant_h }),
        other => usage(format!(
            "unknown iteration kind {other:?} (expected newton, halley, householder, schroeder, or secant)"
        )),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_fractal(
    poly: &str,
    kind: &str,
    secant_h: Option<f64>,
    window: &str,
    size: &str,
    tol: f64,
    max_iter: u32,
    palette_seed: u64,
    out: &Path,
) -> Result<String, CliError> {
    let coeffs = parse::parse_poly(poly).map_err(CliError::Usage)?;
    let p = ComplexPolynomial::new(coeffs);
    let kind = parse_kind(kind, secant_h)?;
    let window = parse::parse_window(window).map_err(CliError::Usage)?;
    let (width, height) = parse::parse_size(size).map_err(CliError::Usage)?;
    if !(tol > 0.0) {
        return usage("--tol must be positive");
    }

    let start = Instant::now();
    let basins = iterate::render_basins(&p, kind, window, width, height, tol, max_iter)?;
    let img = raster::colorize_basins(&basins, palette_seed);
    save_ppm(&img, out)?;

    let sidecar = out.with_extension("roots.csv");
    let mut csv = Vec::new();
    writeln!(&mut csv, "re,im,residual").map_err(|e| io_err(&sidecar, e))?;
    for r in &basins.roots {
        writeln!(&mut csv, "{},{},{}", r.re, r.im, p.scaled_residual(*r))
            .map_err(|e| io_err(&sidecar, e))?;
    }
    fs::write(&sidecar, csv).map_err(|e| io_err(&sidecar, e))?;

    let converged = basins.root_index.iter().filter(|&&i| i >= 0).count();
    let pct = 100.0 * converged as f64 / (width * height) as f64;
    Ok(format!(
        "fractal: {} on degree {}, {} roots, {pct:.2}% of {width}x{height} pixels converged, wrote {} and {} ({:.2}s)",
        kind.name(),
        p.degree(),
        basins.roots.len(),
        out.display(),
        sidecar.display(),
        start.elapsed().as_secs_f64()
    ))
}

fn run_roots(
    poly: &str,
    tol: f64,
    max_iter: usize,
    out: Option<&Path>,
) -> Result<String, CliError> {
    let coeffs = parse::parse_poly(poly).map_err(CliError::Usage)?;
    let p = ComplexPolynomial::new(coeffs);
    let start = Instant::now();
    let roots = aberth_roots(&p, tol, max_iter)?;
    match out {
        Some(path) => {
            let mut bytes = Vec::new();
            write_roots_csv(&mut bytes, &roots).map_err(|e| io_err(path, e))?;
            fs::write(path, bytes).map_err(|e| io_err(path, e))?;
        }
        None => {
            let stdout = std::io::stdout();
            write_roots_csv(&mut stdout.lock(), &roots)
                .map_err(|e| CliError::Io(e.to_string()))?;
        }
    }
    let worst = roots.residuals.iter().cloned().fold(0.0, f64::max);
    Ok(format!(
        "roots: degree {}, {} roots in {} sweeps, max residual {worst:.3e} ({:.3}s)",
        p.degree(),
        roots.roots.len(),
        roots.iterations,
        start.elapsed().as_secs_f64()
    ))
}

fn build_family(
    family: &str,
    dim: usize,
    pattern_file: Option<&Path>,
) -> Result<BohemianFamily, CliError> {
    match family {
        "toeplitz" => BohemianFamily::hessenberg_toeplitz(dim).map_err(|e| CliError::Usage(e.to_string())),
        "skewpenta" => BohemianFamily::skew_pentadiagonal(dim).map_err(|e| CliError::Usage(e.to_string())),
        "custom" => {
            let path = pattern_file
                .ok_or_else(|| CliError::Usage("--family custom needs --pattern-file".into()))?;
            let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            let pattern =
                bohemian::parse_pattern(&text).map_err(|e| CliError::Usage(e.to_string()))?;
            BohemianFamily::custom(pattern).map_err(|e| CliError::Usage(e.to_string()))
        }
        other => usage(format!(
            "unknown family {other:?} (expected toeplitz, skewpenta, or custom)"
        )),
    }
}

/// All eigenvalues of the family in enumeration order (chunked in
/// parallel; chunk order is preserved, so the output is deterministic).
fn collect_eigenvalues(
    family: &BohemianFamily,
    population: &Population,
    size: u64,
) -> Result<Vec<Complex64>, CliError> {
    const CHUNK: u64 = 512;
    let slots = family.parameter_count();
    let pop_size = population.len();
    let chunks: Vec<Vec<Complex64>> = (0..size.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| -> Result<Vec<Complex64>, CliError> {
            let mut local = Vec::new();
            for index in chunk * CHUNK..((chunk + 1) * CHUNK).min(size) {
                let assignment = bohemian::assignment_at(pop_size, slots, index as u128);
                let values: Vec<Complex64> =
                    bohemian::assignment_values(population, &assignment);
                let matrix = bohemian::build_matrix(family, &values)?;
                let eigs = bohemian::eigenvalues(&matrix, 1e-10)
                    .map_err(|e| CliError::Compute(format!("matrix #{index}: {e}")))?;
                local.extend(eigs);
            }
            Ok(local)
        })
        .collect::<Result<_, _>>()?;
    Ok(chunks.concat())
}

#[allow(clippy::too_many_arguments)]
fn run_bohemian(
    family: &str,
    dim: usize,
    pattern_file: Option<&Path>,
    population: &str,
    window: &str,
    bins: &str,
    out: Option<&Path>,
    stats: Option<&Path>,
    csv: Option<&Path>,
) -> Result<String, CliError> {
    let family = build_family(family, dim, pattern_file)?;
    let population = Population::parse(population).map_err(|e| CliError::Usage(e.to_string()))?;
    let size = bohemian::family_size(&family, &population)?;
    let start = Instant::now();
    let mut notes = vec![format!(
        "bohemian {} dim={} |P|={}: {size} matrices",
        family.name(),
        family.dim(),
        population.len()
    )];

    if let Some(stats_path) = stats {
        let s = bohemian::family_statistics(&family, &population)?;
        let json = serde_json::json!({
            "matrix_count": s.matrix_count,
            "distinct_charpoly_count": s.distinct_charpoly_count,
            "distinct_eigenvalue_count": s.distinct_eigenvalue_count,
            "singular_count": s.singular_count,
            "multiple_eigenvalue_matrix_count": s.multiple_eigenvalue_matrix_count,
        });
        let text = serde_json::to_string_pretty(&json).expect("stats serialize");
        if stats_path == Path::new("-") {
            println!("{text}");
        } else {
            fs::write(stats_path, text).map_err(|e| io_err(stats_path, e))?;
        }
        notes.push(format!(
            "{} distinct charpolys, {} singular, {} with multiple eigenvalues, {} distinct eigenvalues",
            s.distinct_charpoly_count,
            s.singular_count,
            s.multiple_eigenvalue_matrix_count,
            s.distinct_eigenvalue_count
        ));
    }

    if let Some(out_path) = out {
        let window = parse::parse_window(window).map_err(CliError::Usage)?;
        let (bins_w, bins_h) = parse::parse_size(bins).map_err(CliError::Usage)?;
        let grid = bohemian::density_plot(&family, &population, window, bins_w, bins_h)?;
        let img = raster::colorize_density(&grid, ColorScheme::HotLog);
        save_ppm(&img, out_path)?;
        notes.push(format!(
            "{} eigenvalues binned + {} dropped -> {}",
            grid.total_binned(),
            grid.dropped(),
            out_path.display()
        ));
    }

    if let Some(csv_path) = csv {
        let rows = size.saturating_mul(family.dim() as u128);
        if rows > EIGEN_CSV_CAP {
            return Err(CliError::Compute(format!(
                "eigenvalue CSV would hold {rows} rows (cap {EIGEN_CSV_CAP}); narrow the family"
            )));
        }
        let eigs = collect_eigenvalues(&family, &population, size as u64)?;
        let mut bytes = Vec::with_capacity(eigs.len() * 24);
        writeln!(&mut bytes, "re,im").map_err(|e| io_err(csv_path, e))?;
        for e in &eigs {
            writeln!(&mut bytes, "{},{}", e.re, e.im).map_err(|e| io_err(csv_path, e))?;
        }
        fs::write(csv_path, bytes).map_err(|e| io_err(csv_path, e))?;
        notes.push(format!("{} eigenvalues -> {}", eigs.len(), csv_path.display()));
    }

    notes.push(format!("({:.2}s)", start.elapsed().as_secs_f64()));
    Ok(notes.join("; "))
}

struct MandelbrotArgs {
    zeros: Option<u32>,
    period_subset: bool,
    tol: f64,
    render: bool,
    window: String,
    size: String,
    max_iter: u32,
    escape_radius: f64,
    coeffs: Option<u32>,
    condition: Option<u32>,
    radius: f64,
    out: Option<PathBuf>,
}

fn run_mandelbrot(args: MandelbrotArgs) -> Result<String, CliError> {
    if args.period_subset && args.zeros.is_none() {
        return usage("--period-subset only applies with --zeros");
    }
    let start = Instant::now();

    if let Some(n) = args.coeffs {
        let coeffs = mandelbrot::coefficients(n)?;
        for c in &coeffs {
            println!("{c}");
        }
        let u = mandelbrot::unimodality_check(n)?;
        return Ok(format!(
            "mandelbrot coeffs: n={n}, degree {}, unimodal={} (argmax index {}) ({:.2}s)",
            coeffs.len() - 1,
            u.is_unimodal,
            u.argmax_index,
            start.elapsed().as_secs_f64()
        ));
    }

    if let Some(n) = args.condition {
        let value = mandelbrot::condition_number(n, args.radius)?;
        let exact = Rational::from_float(args.radius)
            .map(|r| mandelbrot::condition_number_exact(n, &r))
            .transpose()?;
        match &exact {
            Some(e) if e.denom() == &num_bigint::BigInt::from(1) => println!("{}", e.numer()),
            Some(e) => println!("{e} (~{value:.6e})"),
            None => println!("{value:.17e}"),
        }
        return Ok(format!(
            "mandelbrot condition: B_{n}({}) = {value:.6e} ({:.2}s)",
            args.radius,
            start.elapsed().as_secs_f64()
        ));
    }

    if let Some(n) = args.zeros {
        let full = mandelbrot::zeros(n, args.tol)?;
        let (set, filter_note) = if args.period_subset {
            let ps = mandelbrot::exact_period_subset(n, args.tol)?;
            let note = format!(
                ", period-{n} subset: {} kept / {} removed / {} ambiguous",
                ps.kept.roots.len(),
                ps.removed.len(),
                ps.ambiguous.len()
            );
            (ps.kept, note)
        } else {
            (full, String::new())
        };
        match args.out.as_deref() {
            Some(path) => {
                let mut bytes = Vec::new();
                write_roots_csv(&mut bytes, &set).map_err(|e| io_err(path, e))?;
                fs::write(path, bytes).map_err(|e| io_err(path, e))?;
            }
            None => {
                let stdout = std::io::stdout();
                write_roots_csv(&mut stdout.lock(), &set)
                    .map_err(|e| CliError::Io(e.to_string()))?;
            }
        }
        let worst = set.residuals.iter().cloned().fold(0.0, f64::max);
        return Ok(format!(
            "mandelbrot zeros: n={n}, {} zeros, max residual {worst:.3e}, {} sweeps{filter_note} ({:.2}s)",
            set.roots.len(),
            set.iterations,
            start.elapsed().as_secs_f64()
        ));
    }

    if !args.render {
        return usage("choose one of --zeros, --render, --coeffs, --condition");
    }
    let out = args
        .out
        .as_deref()
        .ok_or_else(|| CliError::Usage("--render needs --out <file.ppm>".into()))?;
    let window = parse::parse_window(&args.window).map_err(CliError::Usage)?;
    let (width, height) = parse::parse_size(&args.size).map_err(CliError::Usage)?;
    let grid = mandelbrot::escape_time_render(
        window,
        width,
        height,
        args.max_iter,
        args.escape_radius,
    )?;
    let img = raster::colorize_escape(&grid.counts, width, height, grid.max_iter);
    save_ppm(&img, out)?;
    let interior = grid.counts.iter().filter(|&&c| c >= grid.max_iter).count();
    Ok(format!(
        "mandelbrot render: {width}x{height}, max_iter {}, {interior} interior pixels, wrote {} ({:.2}s)",
        grid.max_iter,
        out.display(),
        start.elapsed().as_secs_f64()
    ))
}

fn run_oeis(terms: &str, limit: usize) -> Result<String, CliError> {
    let terms = parse::parse_terms(terms).map_err(CliError::Usage)?;
    oeis::validate_terms(&terms)?;
    let result = oeis::lookup(&terms)?;
    for m in result.matches.iter().take(limit) {
        println!("{}  {}", m.id, m.name);
    }
    Ok(format!(
        "oeis: {} match(es) for {} terms",
        result.matches.len(),
        terms.len()
    ))
}
