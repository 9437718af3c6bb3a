//! Exact rational helpers: the `p/q` wire syntax and exact comparisons
//! against `exp(eps)` for log-scale thresholds.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Exact rational number used for every length and stretch factor.
pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `2^-k` as an exact rational.
pub fn pow2_inv(k: u32) -> Q {
    Q::new(BigInt::one(), BigInt::one() << k)
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`. Whitespace around the parts is ignored.
pub fn parse_q(s: &str) -> Result<Q, Error> {
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// Lowest-terms `p/q`; integers are written without a denominator.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Comma separated list of rationals, e.g. a pinch schedule.
pub fn parse_q_list(s: &str) -> Result<Vec<Q>, Error> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_q)
        .collect()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Natural log of a positive rational, for display only.
pub fn ln_q(x: &Q) -> f64 {
    // numerator and denominator may exceed f64 range separately
    let ln_big = |n: &BigInt| -> f64 {
        let bits = n.bits();
        if bits < 1000 {
            n.to_f64().unwrap().ln()
        } else {
            let shift = bits - 64;
            let top: BigInt = n >> shift;
            top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
        }
    };
    ln_big(x.numer()) - ln_big(x.denom())
}

/// Twelve significant digits, the precision used when logs are displayed.
pub fn display_log(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let digits = 12 - 1 - x.abs().log10().floor() as i32;
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

/// Exact comparison of a positive rational `f` with `exp(eps)`.
///
/// `exp(eps)` is irrational for rational `eps != 0`, so refining Taylor
/// brackets always separates the two; `Equal` only occurs for `eps == 0, f == 1`.
pub fn cmp_exp(f: &Q, eps: &Q) -> Ordering {
    assert!(f.is_positive(), "cmp_exp needs a positive rational");
    if eps.is_zero() {
        return f.cmp(&Q::one());
    }
    if eps.is_negative() {
        // f ? e^eps  <=>  1/f ? e^-eps, reversed
        return cmp_exp(&f.recip(), &-eps).reverse();
    }
    let mut term = Q::one();
    let mut lower = Q::one();
    let mut k: i64 = 0;
    loop {
        k += 1;
        term = term * eps / qi(k);
        lower += &term;
        // remainder after the k-th term: term * eps/(k+1) * 1/(1 - eps/(k+2))
        let kk = qi(k + 2);
        if eps < &kk {
            let next = &term * eps / qi(k + 1);
            let tail = next * &kk / (&kk - eps);
            let upper = &lower + tail;
            if f < &lower {
                return Ordering::Less;
            }
            if f > &upper {
                return Ordering::Greater;
            }
        }
        if k > 10_000 {
            unreachable!("exp bracket failed to separate");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("6/4").unwrap(), q(3, 2));
        assert_eq!(format_q(&q(3, 2)), "3/2");
        assert_eq!(format_q(&qi(2)), "2");
        assert_eq!(parse_q(" 0 ").unwrap(), qi(0));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn exp_comparisons() {
        // e^1 = 2.718...
        assert_eq!(cmp_exp(&q(27, 10), &qi(1)), Ordering::Less);
        assert_eq!(cmp_exp(&q(272, 100), &qi(1)), Ordering::Greater);
        // e^(1/8) = 1.133148...
        assert_eq!(cmp_exp(&q(113314, 100000), &q(1, 8)), Ordering::Less);
        assert_eq!(cmp_exp(&q(113315, 100000), &q(1, 8)), Ordering::Greater);
        assert_eq!(cmp_exp(&qi(1), &qi(0)), Ordering::Equal);
        assert_eq!(cmp_exp(&q(1, 2), &q(-1, 2)), Ordering::Less);
        // large exponent
        assert_eq!(cmp_exp(&qi(22026), &qi(10)), Ordering::Less);
        assert_eq!(cmp_exp(&qi(22027), &qi(10)), Ordering::Greater);
    }

    #[test]
    fn logs_for_display() {
        assert!((ln_q(&q(3, 2)) - 1.5f64.ln()).abs() < 1e-15);
        assert_eq!(display_log(0.4054651081081644), 0.405465108108);
    }
}
