//! Command-line front end for the discovery-lab toolkit.

mod parse;
mod run;

use clap::{ArgGroup, Parser, Subcommand};
use std::path::PathBuf;

const EXIT_CODE_HELP: &str = "EXIT CODES:
  0  success
  2  usage error (unknown flag, malformed value)
  3  computation failed (non-convergence, infeasible family size, ...)
  4  could not write an output artifact
  5  network failure or unparseable OEIS response";

#[derive(Parser, Debug)]
#[command(
    name = "discovery-lab",
    version,
    about = "Newton fractals, Bohemian matrix densities, and Mandelbrot polynomials",
    after_help = EXIT_CODE_HELP
)]
pub struct Cli {
    /// Worker threads (defaults to all cores; the DISCOVERY_LAB_THREADS
    /// environment variable overrides the default, the flag wins over both)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact Newton iterates for sqrt(m): fractions, squares, residuals,
    /// and continued fractions
    SqrtDemo {
        /// The number whose square root is approximated
        #[arg(long, default_value_t = 2)]
        m: u64,
        /// Starting value, as `p` or `p/q`
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        x0: String,
        /// Number of iterations
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Also write the iterates to a CSV file (one `num/den` per line)
        #[arg(long)]
        csv: Option<PathBuf>,
    },

    /// Render basins of attraction for an iteration on a polynomial
    Fractal {
        /// Coefficients, ascending degree, comma-separated (a+bi entries)
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        /// Iteration: newton, halley, householder, schroeder, or secant
        #[arg(long, default_value = "newton")]
        kind: String,
        /// Absolute offset for the secant method's second start point
        #[arg(long, allow_hyphen_values = true)]
        secant_h: Option<f64>,
        /// View rectangle x_min,x_max,y_min,y_max
        #[arg(long, default_value = "-2,2,-2,2", allow_hyphen_values = true)]
        window: String,
        /// Image size WxH
        #[arg(long, default_value = "400x400")]
        size: String,
        /// Convergence tolerance (distance to a root)
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Iteration budget per pixel
        #[arg(long, default_value_t = 100)]
        max_iter: u32,
        /// Rotates the basin palette
        #[arg(long, default_value_t = 0)]
        palette_seed: u64,
        /// Output PPM; a `<stem>.roots.csv` sidecar is written next to it
        #[arg(long)]
        out: PathBuf,
    },

    /// Find all roots of a polynomial (CSV: re,im,residual)
    Roots {
        /// Coefficients, ascending degree, comma-separated (a+bi entries)
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 400)]
        max_iter: usize,
        /// Output CSV (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Enumerate a Bohemian family: density plot, statistics, eigenvalue CSV
    #[command(group(ArgGroup::new("artifact").required(true).multiple(true).args(["out", "stats", "csv"])))]
    Bohemian {
        /// Family: toeplitz, skewpenta, or custom
        #[arg(long, default_value = "toeplitz")]
        family: String,
        /// Matrix dimension (ignored for custom patterns)
        #[arg(long, default_value_t = 5)]
        dim: usize,
        /// Pattern file for --family custom (cells: s<k>, -s<k>, or a value)
        #[arg(long)]
        pattern_file: Option<PathBuf>,
        /// Population values, comma-separated exact Gaussian rationals
        #[arg(long, default_value = "1,i", allow_hyphen_values = true)]
        population: String,
        /// Histogram window x_min,x_max,y_min,y_max
        #[arg(long, default_value = "-3.25,3.25,-3.25,3.25", allow_hyphen_values = true)]
        window: String,
        /// Histogram bins WxH
        #[arg(long, default_value = "1024x1024")]
        bins: String,
        /// Eigenvalue density plot (PPM)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exact family statistics as flat JSON (`-` for stdout)
        #[arg(long)]
        stats: Option<PathBuf>,
        /// Every eigenvalue as CSV re,im (size-gated)
        #[arg(long)]
        csv: Option<PathBuf>,
    },

    /// Mandelbrot polynomials: zeros, coefficients, condition numbers,
    /// escape-time renders
    #[command(group(ArgGroup::new("mode").required(true).args(["zeros", "render", "coeffs", "condition"])))]
    Mandelbrot {
        /// Find the 2^(N-1) zeros of z_N (hyperbolic centers)
        #[arg(long)]
        zeros: Option<u32>,
        /// With --zeros: keep only zeros of exact period N
        #[arg(long)]
        period_subset: bool,
        /// Newton-correction residual target for zero finding
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Render the Mandelbrot set by escape time
        #[arg(long)]
        render: bool,
        /// View rectangle for --render
        #[arg(long, default_value = "-2.1,0.7,-1.4,1.4", allow_hyphen_values = true)]
        window: String,
        /// Image size for --render
        #[arg(long, default_value = "800x800")]
        size: String,
        #[arg(long, default_value_t = 500)]
        max_iter: u32,
        #[arg(long, default_value_t = 2.0)]
        escape_radius: f64,
        /// Print the exact coefficients of z_N, one per line
        #[arg(long)]
        coeffs: Option<u32>,
        /// Print the condition number B_N(radius)
        #[arg(long)]
        condition: Option<u32>,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Output file (CSV for --zeros, PPM for --render)
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Look up an integer sequence on the OEIS (requires network)
    Oeis {
        /// Comma-separated terms, between 3 and 20 of them
        #[arg(long, allow_hyphen_values = true)]
        terms: String,
        /// Maximum matches to print
        #[arg(long, default_value_t = 10)]
        limit: usize,
    },
}

fn resolve_threads(flag: Option<usize>) -> Result<usize, String> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var("DISCOVERY_LAB_THREADS") {
        Ok(value) => value
            .parse::<usize>()
            .map_err(|_| format!("DISCOVERY_LAB_THREADS={value:?} is not a thread count")),
        Err(_) => Ok(0), // rayon default: all cores
    }
}

fn main() {
    let cli = Cli::parse();
    let threads = match resolve_threads(cli.threads) {
        Ok(n) => n,
        Err(message) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
    };
    if threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: could not configure {threads} worker threads: {e}");
            std::process::exit(3);
        }
    }
    match run::run(cli.command) {
        Ok(summary) => println!("{summary}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.code());
        }
    }
}
