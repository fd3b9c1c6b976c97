//! Computational-discovery toolkit: Newton-type iterations with exact
//! rational arithmetic, basin-of-attraction fractals, Bohemian matrix
//! eigenvalue densities, and Mandelbrot polynomials.
//!
//! The crate is organized around three threads of exploration plus shared
//! plumbing:
//!
//! * [`exact`] — arbitrary-precision rationals for the square-root Newton
//!   iteration, continued fractions, and closed-form iterates in Q(√m).
//! * [`polyroot`] / [`iterate`] — dense complex polynomials, simultaneous
//!   root finding, iteration maps (Newton, Halley, …) and basin rasters.
//! * [`bohemian`] — matrix families over finite populations: exact
//!   determinants and characteristic polynomials, a dense complex
//!   eigensolver, density grids, and family statistics.
//! * [`mandelbrot`] — the recurrence z ← z² + c as a polynomial family:
//!   exact coefficients, condition numbers, hyperbolic-center zeros, and
//!   an escape-time renderer.
//! * [`raster`] — density grids, colormaps, and bit-exact PPM output.
//! * [`oeis`] — a small client for the OEIS search endpoint (network code
//!   is behind the `oeis-net` feature; response parsing is always built).

pub mod bohemian;
pub mod exact;
pub mod iterate;
pub mod mandelbrot;
pub mod oeis;
pub mod polyroot;
pub mod raster;
