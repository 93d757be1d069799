//! Helpers around [`BigRational`] shared by the exact modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Renders as `n` or `n/d`, the format used in every report.
pub fn fmt_q(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(Q::new(num, den))
}

pub fn to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or_else(|| {
        // numerator or denominator beyond f64 range
        let n = v.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = v.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn sqrt_exact(v: &Q) -> Option<Q> {
    if v.is_negative() {
        return None;
    }
    let n = v.numer().sqrt();
    let d = v.denom().sqrt();
    if &(&n * &n) == v.numer() && &(&d * &d) == v.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

/// Closest rational with denominator `den` to a float.
pub fn from_f64_grid(x: f64, den: i64) -> Q {
    Q::new(BigInt::from((x * den as f64).round() as i64), BigInt::from(den))
}

/// Random rational in `[lo, hi]` whose denominator is at most `2^bits`.
pub fn random_q<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64, bits: u32) -> Q {
    let den = 1i64 << bits;
    let x: f64 = rng.gen_range(lo..=hi);
    from_f64_grid(x, den)
}

pub fn abs(v: &Q) -> Q {
    v.abs()
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_parse() {
        assert_eq!(fmt_q(&ratio(24, 23)), "24/23");
        assert_eq!(fmt_q(&ratio(-6, 3)), "-2");
        assert_eq!(parse_q("48/46"), Some(ratio(24, 23)));
        assert_eq!(parse_q("1/0"), None);
    }

    #[test]
    fn exact_roots() {
        assert_eq!(sqrt_exact(&ratio(9, 4)), Some(ratio(3, 2)));
        assert_eq!(sqrt_exact(&ratio(2, 1)), None);
        assert_eq!(sqrt_exact(&ratio(-4, 1)), None);
        assert_eq!(sqrt_exact(&Q::zero()), Some(Q::zero()));
    }
}
