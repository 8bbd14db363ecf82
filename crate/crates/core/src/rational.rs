//! Rational helpers: parsing, fractional parts, the sawtooth function and
//! bounded-denominator reconstruction.

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};

pub fn r(p: i64, q: i64) -> Rational64 {
    Rational64::new(p, q)
}

/// Parse `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Option<Rational64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            (q != 0).then(|| Rational64::new(p, q))
        }
        None => s.parse().ok().map(Rational64::from_integer),
    }
}

pub fn format_rational(q: Rational64) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Representative of `q mod 1` in `[0, 1)`.
pub fn frac(q: Rational64) -> Rational64 {
    q - q.floor()
}

/// `((t)) = t - floor(t) - 1/2` off the integers, `0` on them.
pub fn sawtooth(t: Rational64) -> Rational64 {
    if t.is_integer() {
        Rational64::zero()
    } else {
        frac(t) - r(1, 2)
    }
}

/// Representative of `q mod m` in `[0, m)`.
pub fn mod_rational(q: Rational64, m: i64) -> Rational64 {
    let m = Rational64::from_integer(m);
    q - m * (q / m).floor()
}

/// The rational with smallest denominator `<= max_den` within `window` of `x`.
pub fn reconstruct(x: f64, max_den: i64, window: f64) -> Result<Rational64> {
    for q in 1..=max_den.max(1) {
        let p = (x * q as f64).round();
        if (x - p / q as f64).abs() <= window {
            return Ok(Rational64::new(p as i64, q));
        }
    }
    Err(Error::ReconstructionFailed {
        value: x,
        max_den,
        window,
    })
}

pub fn to_f64(q: Rational64) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sawtooth_values() {
        assert_eq!(sawtooth(r(2, 3)), r(1, 6));
        assert_eq!(sawtooth(r(0, 1)), r(0, 1));
        assert_eq!(sawtooth(r(-1, 4)), r(1, 4));
        assert_eq!(sawtooth(r(1, 2)), r(0, 1));
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational(" 2/6 "), Some(r(1, 3)));
        assert_eq!(parse_rational("-5"), Some(r(-5, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("0.5"), None);
        assert_eq!(format_rational(r(-2, 6)), "-1/3");
        assert_eq!(format_rational(r(4, 2)), "2");
    }

    #[test]
    fn reconstruction_window() {
        assert_eq!(reconstruct(0.333333333334, 18, 1e-9).unwrap(), r(1, 3));
        assert_eq!(reconstruct(-1.0 + 1e-12, 6, 1e-9).unwrap(), r(-1, 1));
        assert!(reconstruct(0.3172, 6, 1e-9).is_err());
    }
}
