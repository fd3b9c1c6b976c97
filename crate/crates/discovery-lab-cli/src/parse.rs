//! Flag-value parsers: complex numbers, windows, sizes, rationals.
//! Every parser returns a message naming what was wrong, so clap surfaces
//! a distinct usage error per malformed value.

use discovery_lab::exact::Rational;
use discovery_lab::raster::Window;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

/// Splits `a±bi` at the sign that separates the two parts, ignoring a
/// leading sign and signs inside exponents (`1e-3+2i`).
fn split_parts(s: &str) -> Option<(usize, char)> {
    let bytes: Vec<char> = s.chars().collect();
    for k in 1..bytes.len() {
        let c = bytes[k];
        if (c == '+' || c == '-') && !matches!(bytes[k - 1], 'e' | 'E') {
            return Some((k, c));
        }
    }
    None
}

fn parse_imag_coeff(s: &str) -> Result<f64, String> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        other => other
            .parse::<f64>()
            .map_err(|_| format!("bad imaginary coefficient {other:?}")),
    }
}

/// Parses one complex token: `1.5`, `2i`, `-i`, `1+2i`, `3e-2-0.5i`, or the
/// pair form `re,im`.
pub fn parse_complex(token: &str) -> Result<Complex64, String> {
    let s: String = token.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    if let Some((re, im)) = s.split_once(',') {
        let re = re
            .parse::<f64>()
            .map_err(|_| format!("bad real part {re:?} in {token:?}"))?;
        let im = im
            .parse::<f64>()
            .map_err(|_| format!("bad imaginary part {im:?} in {token:?}"))?;
        return Ok(Complex64::new(re, im));
    }
    if let Some(coeff) = s.strip_suffix(['i', 'I']) {
        if let Some((split, _)) = split_parts(coeff) {
            // a+bi: real part then imaginary coefficient
            let re = coeff[..split]
                .parse::<f64>()
                .map_err(|_| format!("bad real part in {token:?}"))?;
            let im = parse_imag_coeff(&coeff[split..])?;
            return Ok(Complex64::new(re, im));
        }
        return Ok(Complex64::new(0.0, parse_imag_coeff(coeff)?));
    }
    if let Some((split, _)) = split_parts(&s) {
        return Err(format!(
            "two-part complex value {token:?} must end in 'i' (as in {}i)",
            &s[..split]
        ));
    }
    s.parse::<f64>()
        .map(|re| Complex64::new(re, 0.0))
        .map_err(|_| format!("cannot parse {token:?} as a number"))
}

/// Comma-separated coefficient list, ascending degree (`0,1,1,2,4,5,5,3,1`).
/// Entries are complex tokens in the `a+bi` form.
pub fn parse_poly(s: &str) -> Result<Vec<Complex64>, String> {
    let coeffs = s
        .split(',')
        .map(|tok| parse_complex(tok.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    if coeffs.is_empty() || coeffs.iter().all(|c| c.norm_sqr() == 0.0) {
        return Err("polynomial must have at least one nonzero coefficient".into());
    }
    Ok(coeffs)
}

/// `x_min,x_max,y_min,y_max`.
pub fn parse_window(s: &str) -> Result<Window, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!(
            "window must be x_min,x_max,y_min,y_max (got {} values)",
            parts.len()
        ));
    }
    let mut v = [0.0f64; 4];
    for (slot, part) in v.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| format!("bad window coordinate {part:?}"))?;
    }
    Window::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

/// `WxH`, e.g. `400x400`.
pub fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("size must be WxH (got {s:?})"))?;
    let w: usize = w.parse().map_err(|_| format!("bad width {w:?}"))?;
    let h: usize = h.parse().map_err(|_| format!("bad height {h:?}"))?;
    if w == 0 || h == 0 {
        return Err("size must be nonzero".into());
    }
    Ok((w, h))
}

/// `p` or `p/q` with big-integer parts.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num
        .trim()
        .parse()
        .map_err(|_| format!("bad numerator {num:?}"))?;
    let den: BigInt = den
        .trim()
        .parse()
        .map_err(|_| format!("bad denominator {den:?}"))?;
    if den.is_zero() {
        return Err("denominator must be nonzero".into());
    }
    Ok(Rational::new(num, den))
}

/// Comma-separated integer list for OEIS queries.
pub fn parse_terms(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<i64>()
                .map_err(|_| format!("bad integer term {tok:?}"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_tokens() {
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(parse_complex("1-i").unwrap(), Complex64::new(1.0, -1.0));
        assert_eq!(
            parse_complex("1e-3+2e+1i").unwrap(),
            Complex64::new(1e-3, 20.0)
        );
        assert_eq!(parse_complex("0.5,-2").unwrap(), Complex64::new(0.5, -2.0));
        for bad in ["", "wat", "1+2", "i+i", "1,,2"] {
            assert!(parse_complex(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn windows_sizes_rationals_terms() {
        let w = parse_window("-1.8,1.0,-1.4,1.4").unwrap();
        assert_eq!((w.x_min, w.x_max, w.y_min, w.y_max), (-1.8, 1.0, -1.4, 1.4));
        assert!(parse_window("1,2,3").is_err());
        assert!(parse_window("2,1,0,1").is_err());

        assert_eq!(parse_size("400x300").unwrap(), (400, 300));
        assert!(parse_size("400").is_err());
        assert!(parse_size("0x4").is_err());

        assert_eq!(parse_rational("17/12").unwrap().to_string(), "17/12");
        assert_eq!(parse_rational("5").unwrap().to_string(), "5");
        assert!(parse_rational("1/0").is_err());

        assert_eq!(parse_terms("1,2,12").unwrap(), vec![1, 2, 12]);
        assert!(parse_terms("1,x").is_err());
    }

    #[test]
    fn poly_lists() {
        let p = parse_poly("0,1,1,2,4,5,5,3,1").unwrap();
        assert_eq!(p.len(), 9);
        assert_eq!(p[8], Complex64::new(1.0, 0.0));
        assert!(parse_poly("0,0").is_err());
        let p = parse_poly("1+i,-2i,1").unwrap();
        assert_eq!(p[0], Complex64::new(1.0, 1.0));
        assert_eq!(p[1], Complex64::new(0.0, -2.0));
    }
}
