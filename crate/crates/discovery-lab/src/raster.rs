//! Density grids, colormaps, and bit-exact PPM output shared by the
//! fractal, Bohemian, and Mandelbrot renderers.

use crate::iterate::BasinImage;
use num_complex::Complex64;
use std::io::{self, Read, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("window must span positive area (got x: {x_min}..{x_max}, y: {y_min}..{y_max})")]
    EmptyWindow {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    },
    #[error("image dimensions must be nonzero")]
    ZeroSize,
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("not a P6 PPM stream: {0}")]
    PpmFormat(String),
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self, RasterError> {
        if !(x_max > x_min && y_max > y_min)
            || !(x_min.is_finite() && x_max.is_finite() && y_min.is_finite() && y_max.is_finite())
        {
            return Err(RasterError::EmptyWindow {
                x_min,
                x_max,
                y_min,
                y_max,
            });
        }
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn contains(&self, p: Complex64) -> bool {
        p.re >= self.x_min && p.re <= self.x_max && p.im >= self.y_min && p.im <= self.y_max
    }

    /// Complex value at the center of pixel (col, row) of a cols×rows
    /// raster. Row 0 is the top of the image (largest imaginary part).
    pub fn pixel_center(&self, col: usize, row: usize, cols: usize, rows: usize) -> Complex64 {
        let dx = self.width() / cols as f64;
        let dy = self.height() / rows as f64;
        Complex64::new(
            self.x_min + (col as f64 + 0.5) * dx,
            self.y_max - (row as f64 + 0.5) * dy,
        )
    }
}

/// 2-D histogram of complex points over a window. Row 0 holds the largest
/// imaginary parts so grids and images share an orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    width: usize,
    height: usize,
    window: Window,
    counts: Vec<u64>,
    dropped: u64,
}

impl DensityGrid {
    pub fn new(window: Window, width: usize, height: usize) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::ZeroSize);
        }
        Ok(Self {
            width,
            height,
            window,
            counts: vec![0; width * height],
            dropped: 0,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    pub fn total_binned(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Bin coordinates of a point, or None when it lies outside the window.
    /// Bins are half-open with the tie at each upper edge assigned to the
    /// last bin, so every in-window point lands somewhere.
    pub fn bin_of(&self, p: Complex64) -> Option<(usize, usize)> {
        if !self.window.contains(p) {
            return None;
        }
        let dx = self.window.width() / self.width as f64;
        let dy = self.window.height() / self.height as f64;
        let col = (((p.re - self.window.x_min) / dx) as usize).min(self.width - 1);
        let row = (((self.window.y_max - p.im) / dy) as usize).min(self.height - 1);
        Some((col, row))
    }

    /// Bins every point, counting the ones that fall outside the window in
    /// `dropped`. Conservation: binned + dropped grows by `points.len()`.
    pub fn accumulate(&mut self, points: &[Complex64]) {
        for &p in points {
            match self.bin_of(p) {
                Some((col, row)) => self.counts[row * self.width + col] += 1,
                None => self.dropped += 1,
            }
        }
    }

    /// Adds another grid's counts into this one. Panics on mismatched
    /// shapes; merging independently accumulated partial grids is the
    /// supported parallel pattern.
    pub fn merge(&mut self, other: &DensityGrid) {
        assert_eq!(self.width, other.width);
        assert_eq!(self.height, other.height);
        assert_eq!(self.window, other.window);
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.dropped += other.dropped;
    }

    /// Center of a bin as a complex value (for CSV emission).
    pub fn bin_center(&self, col: usize, row: usize) -> Complex64 {
        self.window.pixel_center(col, row, self.width, self.height)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorScheme {
    /// log(1+count)/log(1+max) through a black→red→yellow→white ramp.
    HotLog,
    /// Same ramp with linear count scaling.
    HotLinear,
}

/// 8-bit RGB image, row-major, top row first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RGBImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl RGBImage {
    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        let mut pixels = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            pixels.extend_from_slice(&rgb);
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn pixel(&self, col: usize, row: usize) -> [u8; 3] {
        let k = (row * self.width + col) * 3;
        [self.pixels[k], self.pixels[k + 1], self.pixels[k + 2]]
    }

    pub fn set_pixel(&mut self, col: usize, row: usize, rgb: [u8; 3]) {
        let k = (row * self.width + col) * 3;
        self.pixels[k..k + 3].copy_from_slice(&rgb);
    }
}

fn hot_ramp(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    let seg = |v: f64| (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    [seg(3.0 * t), seg(3.0 * t - 1.0), seg(3.0 * t - 2.0)]
}

/// Renders a density grid through the hot colormap: zero counts are black,
/// the maximum count is white, and intensity is monotone in the count.
pub fn colorize_density(grid: &DensityGrid, scheme: ColorScheme) -> RGBImage {
    let max = grid.counts.iter().copied().max().unwrap_or(0);
    let mut img = RGBImage::filled(grid.width, grid.height, [0, 0, 0]);
    if max == 0 {
        return img;
    }
    let log_max = ((max as f64) + 1.0).ln();
    for row in 0..grid.height {
        for col in 0..grid.width {
            let count = grid.counts[row * grid.width + col];
            if count == 0 {
                continue;
            }
            let t = match scheme {
                ColorScheme::HotLog => ((count as f64) + 1.0).ln() / log_max,
                ColorScheme::HotLinear => count as f64 / max as f64,
            };
            img.set_pixel(col, row, hot_ramp(t));
        }
    }
    img
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let h = (h.rem_euclid(1.0)) * 6.0;
    let i = h.floor() as u32 % 6;
    let f = h - h.floor();
    let p = v * (1.0 - s);
    let q = v * (1.0 - s * f);
    let t = v * (1.0 - s * (1.0 - f));
    let (r, g, b) = match i {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [
        (r * 255.0).round() as u8,
        (g * 255.0).round() as u8,
        (b * 255.0).round() as u8,
    ]
}

/// Hue for root index `i` of `n`: evenly spaced around the wheel, rotated
/// by a seed-derived offset so different runs can recolor the same basins.
pub fn basin_hue(index: usize, n_roots: usize, palette_seed: u64) -> f64 {
    let rotation = (palette_seed as f64 * 0.618_033_988_749_894_9).fract();
    (index as f64 / n_roots.max(1) as f64 + rotation).fract()
}

/// Colors a basin image: hue by root index, brightness by iteration count
/// (1 − iters/max_iter), unconverged pixels black.
pub fn colorize_basins(basins: &BasinImage, palette_seed: u64) -> RGBImage {
    let n_roots = basins.roots.len();
    let mut img = RGBImage::filled(basins.width, basins.height, [0, 0, 0]);
    for row in 0..basins.height {
        for col in 0..basins.width {
            let k = row * basins.width + col;
            let root = basins.root_index[k];
            if root < 0 {
                continue;
            }
            let hue = basin_hue(root as usize, n_roots, palette_seed);
            let value = 1.0 - basins.iter_count[k] as f64 / basins.max_iter.max(1) as f64;
            img.set_pixel(col, row, hsv_to_rgb(hue, 1.0, value.clamp(0.0, 1.0)));
        }
    }
    img
}

/// Colors an escape-time grid: interior points (count == max_iter) black,
/// escaping points through the hot ramp on a log scale.
pub fn colorize_escape(counts: &[u32], width: usize, height: usize, max_iter: u32) -> RGBImage {
    assert_eq!(counts.len(), width * height);
    let mut img = RGBImage::filled(width, height, [0, 0, 0]);
    let log_max = (max_iter as f64 + 1.0).ln();
    for row in 0..height {
        for col in 0..width {
            let n = counts[row * width + col];
            if n >= max_iter {
                continue;
            }
            let t = ((n as f64) + 1.0).ln() / log_max;
            img.set_pixel(col, row, hot_ramp(t));
        }
    }
    img
}

/// Binary PPM (P6): ASCII header `P6\n<w> <h>\n255\n` followed by
/// width·height RGB triples, top row first. Bit-exact for equal inputs.
pub fn write_ppm(img: &RGBImage, dest: &mut impl Write) -> Result<(), RasterError> {
    write!(dest, "P6\n{} {}\n255\n", img.width, img.height)?;
    dest.write_all(&img.pixels)?;
    Ok(())
}

/// Reads back a P6 stream produced by [`write_ppm`] (testing aid).
pub fn read_ppm(src: &mut impl Read) -> Result<RGBImage, RasterError> {
    let mut bytes = Vec::new();
    src.read_to_end(&mut bytes)?;
    let header_end = bytes
        .windows(1)
        .enumerate()
        .filter(|(_, w)| w[0] == b'\n')
        .map(|(i, _)| i)
        .nth(2)
        .ok_or_else(|| RasterError::PpmFormat("truncated header".into()))?;
    let header = std::str::from_utf8(&bytes[..header_end])
        .map_err(|_| RasterError::PpmFormat("non-utf8 header".into()))?;
    let mut lines = header.lines();
    if lines.next() != Some("P6") {
        return Err(RasterError::PpmFormat("missing P6 magic".into()));
    }
    let dims = lines
        .next()
        .ok_or_else(|| RasterError::PpmFormat("missing dimensions".into()))?;
    let (w, h) = dims
        .split_once(' ')
        .ok_or_else(|| RasterError::PpmFormat("bad dimension line".into()))?;
    let (width, height): (usize, usize) = (
        w.parse()
            .map_err(|_| RasterError::PpmFormat("bad width".into()))?,
        h.parse()
            .map_err(|_| RasterError::PpmFormat("bad height".into()))?,
    );
    if lines.next() != Some("255") {
        return Err(RasterError::PpmFormat("expected maxval 255".into()));
    }
    let pixels = bytes[header_end + 1..].to_vec();
    if pixels.len() != width * height * 3 {
        return Err(RasterError::PpmFormat(format!(
            "expected {} pixel bytes, got {}",
            width * height * 3,
            pixels.len()
        )));
    }
    Ok(RGBImage {
        width,
        height,
        pixels,
    })
}

/// CSV rows for the nonzero bins of a grid: `re,im` or `re,im,count`.
pub fn write_density_csv(
    grid: &DensityGrid,
    dest: &mut impl Write,
    include_count: bool,
) -> Result<(), RasterError> {
    if include_count {
        writeln!(dest, "re,im,count")?;
    } else {
        writeln!(dest, "re,im")?;
    }
    for row in 0..grid.height {
        for col in 0..grid.width {
            let count = grid.counts[row * grid.width + col];
            if count == 0 {
                continue;
            }
            let center = grid.bin_center(col, row);
            if include_count {
                writeln!(dest, "{},{},{}", center.re, center.im, count)?;
            } else {
                writeln!(dest, "{},{}", center.re, center.im)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn test_grid() -> DensityGrid {
        DensityGrid::new(Window::new(-1.0, 1.0, -1.0, 1.0).unwrap(), 4, 4).unwrap()
    }

    #[test]
    fn window_rejects_empty_area() {
        assert!(Window::new(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(Window::new(0.0, 1.0, 2.0, 1.0).is_err());
        assert!(Window::new(0.0, f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn accumulate_bins_and_drops() {
        let mut g = test_grid();
        g.accumulate(&[c(0.0, 0.0)]);
        // center lands on interior edges; tie rule sends it down-right of center
        assert_eq!(g.total_binned(), 1);
        g.accumulate(&[c(5.0, 0.0), c(0.0, -2.0)]);
        assert_eq!(g.dropped(), 2);
        let before = g.total_binned();
        g.accumulate(&[c(0.25, 0.25); 7]);
        assert_eq!(g.total_binned(), before + 7);
        let (col, row) = g.bin_of(c(0.25, 0.25)).unwrap();
        assert_eq!(g.counts()[row * 4 + col], 7);
    }

    #[test]
    fn upper_edge_ties_go_to_last_bin() {
        let g = test_grid();
        assert_eq!(g.bin_of(c(1.0, 0.5)), Some((3, 1)));
        assert_eq!(g.bin_of(c(-1.0, 1.0)), Some((0, 0)));
        assert_eq!(g.bin_of(c(1.0, -1.0)), Some((3, 3)));
        assert_eq!(g.bin_of(c(1.0000001, 0.0)), None);
    }

    #[test]
    fn conservation_under_merge() {
        let mut a = test_grid();
        let mut b = test_grid();
        a.accumulate(&[c(0.1, 0.1), c(2.0, 0.0)]);
        b.accumulate(&[c(-0.4, 0.9), c(0.1, 0.1)]);
        let total = a.total_binned() + a.dropped() + b.total_binned() + b.dropped();
        a.merge(&b);
        assert_eq!(a.total_binned() + a.dropped(), total);
        assert_eq!(total, 4);
    }

    #[test]
    fn density_colors_hit_the_extremes() {
        let mut g = test_grid();
        g.accumulate(&[c(-0.9, 0.9)]); // one count
        g.accumulate(&[c(0.9, -0.9); 10]); // max count
        let img = colorize_density(&g, ColorScheme::HotLog);
        assert_eq!(img.pixel(3, 3), [255, 255, 255]);
        assert_eq!(img.pixel(1, 1), [0, 0, 0]);
        let low = img.pixel(0, 0);
        assert!(low != [0, 0, 0] && low != [255, 255, 255]);

        let empty = test_grid();
        let img = colorize_density(&empty, ColorScheme::HotLog);
        assert!(img.pixels.iter().all(|&b| b == 0));
    }

    #[test]
    fn density_intensity_is_monotone() {
        let mut g = DensityGrid::new(Window::new(0.0, 4.0, 0.0, 1.0).unwrap(), 4, 1).unwrap();
        for (i, reps) in [(0usize, 1u32), (1, 5), (2, 20), (3, 100)] {
            for _ in 0..reps {
                g.accumulate(&[c(i as f64 + 0.5, 0.5)]);
            }
        }
        for scheme in [ColorScheme::HotLog, ColorScheme::HotLinear] {
            let img = colorize_density(&g, scheme);
            let intensity =
                |p: [u8; 3]| p[0] as u32 + p[1] as u32 + p[2] as u32;
            for i in 1..4 {
                assert!(intensity(img.pixel(i, 0)) >= intensity(img.pixel(i - 1, 0)));
            }
        }
    }

    #[test]
    fn ppm_bytes_are_exact() {
        let img = RGBImage::filled(1, 1, [255, 255, 255]);
        let mut out = Vec::new();
        write_ppm(&img, &mut out).unwrap();
        assert_eq!(out, b"P6\n1 1\n255\n\xff\xff\xff");

        let mut img = RGBImage::filled(2, 1, [0, 0, 0]);
        img.set_pixel(1, 0, [255, 255, 255]);
        let mut out = Vec::new();
        write_ppm(&img, &mut out).unwrap();
        assert_eq!(out, b"P6\n2 1\n255\n\x00\x00\x00\xff\xff\xff");
        assert_eq!(out.len(), "P6\n2 1\n255\n".len() + 3 * 2);

        let back = read_ppm(&mut &out[..]).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn density_csv_lists_nonzero_bins() {
        let mut g = test_grid();
        g.accumulate(&[c(0.25, 0.25), c(0.25, 0.25), c(-0.75, -0.75)]);
        let mut out = Vec::new();
        write_density_csv(&g, &mut out, true).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "re,im,count");
        assert_eq!(lines.len(), 3);
        assert!(lines.iter().any(|l| l.ends_with(",2")));
    }
}
