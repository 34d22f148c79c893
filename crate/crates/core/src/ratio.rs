//! Exact rational arithmetic helpers.
//!
//! Every probability and weight in the pipeline is a [`Ratio`]; no floating
//! point enters measure construction or validation.

use num::bigint::BigInt;
use num::{BigRational, One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, the numeric type of the whole crate.
pub type Ratio = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatioParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer `{0}`")]
    BadInt(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Integer as a `Ratio`.
pub fn int(n: i64) -> Ratio {
    Ratio::from_integer(BigInt::from(n))
}

/// `n/d` as a reduced `Ratio`. Panics on `d == 0`.
pub fn frac(n: i64, d: i64) -> Ratio {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `p`, `p/q` or `-p/q` (base 10).
pub fn parse_ratio(s: &str) -> Result<Ratio, RatioParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RatioParseError::Empty);
    }
    let parse_int = |t: &str| -> Result<BigInt, RatioParseError> {
        t.parse::<BigInt>()
            .map_err(|_| RatioParseError::BadInt(t.to_string()))
    };
    match s.split_once('/') {
        None => Ok(Ratio::from_integer(parse_int(s)?)),
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(RatioParseError::ZeroDenominator(s.to_string()));
            }
            Ok(Ratio::new(num, den))
        }
    }
}

/// Render as `p` (integral) or `p/q`.
pub fn fmt_ratio(r: &Ratio) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `|a - b|`.
pub fn abs_diff(a: &Ratio, b: &Ratio) -> Ratio {
    (a - b).abs()
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// via the continued-fraction expansion of `x`. The result is the closest
/// rational to `x` among all rationals with denominator `<= max_den`
/// (ties resolved towards the convergent, which keeps the map deterministic).
pub fn best_approx_within(x: &Ratio, max_den: &BigInt) -> Ratio {
    assert!(max_den >= &BigInt::one(), "denominator bound must be >= 1");
    if x.denom() <= max_den {
        return x.clone();
    }
    // Walk the continued fraction, tracking convergents h/k.
    let (mut h0, mut k0) = (BigInt::one(), BigInt::zero()); // h_{-1}/k_{-1}
    let (mut h1, mut k1) = (x.to_integer(), BigInt::one()); // h_0/k_0
    let mut frac = x - Ratio::from_integer(h1.clone());
    while !frac.is_zero() {
        let inv = frac.recip();
        let a = inv.to_integer();
        frac = inv - Ratio::from_integer(a.clone());
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        if k2 > *max_den {
            // Semiconvergent: largest t with k0 + t*k1 <= max_den.
            let t = (max_den - &k0) / &k1;
            let sh = &t * &h1 + &h0;
            let sk = &t * &k1 + &k0;
            let conv = Ratio::new(h1.clone(), k1.clone());
            // The semiconvergent competes with the previous convergent only
            // when t >= a/2; compare distances exactly.
            if sk.is_zero() {
                return conv;
            }
            let semi = Ratio::new(sh, sk);
            return if abs_diff(&semi, x) < abs_diff(&conv, x) {
                semi
            } else {
                conv
            };
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
    }
    Ratio::new(h1, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "1", "-3", "1/2", "-7/3", "333333/1000000"] {
            let r = parse_ratio(s).unwrap();
            assert_eq!(parse_ratio(&fmt_ratio(&r)).unwrap(), r);
        }
        assert_eq!(parse_ratio("2/4").unwrap(), frac(1, 2));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("").is_err());
        assert!(parse_ratio("x").is_err());
    }

    #[test]
    fn best_approx_recovers_simple_fractions() {
        let x = parse_ratio("333333/1000000").unwrap();
        assert_eq!(best_approx_within(&x, &BigInt::from(100)), frac(1, 3));
        let pi = parse_ratio("3141592653589793/1000000000000000").unwrap();
        assert_eq!(best_approx_within(&pi, &BigInt::from(120)), frac(355, 113));
        // Already representable: unchanged.
        assert_eq!(best_approx_within(&frac(2, 7), &BigInt::from(10)), frac(2, 7));
    }

    #[test]
    fn best_approx_is_optimal_among_small_denominators() {
        // Exhaustive oracle: among all p/q with q <= D the returned value
        // minimizes the distance to x.
        let x = parse_ratio("416/1000").unwrap();
        for bound in 1..=25i64 {
            let got = best_approx_within(&x, &BigInt::from(bound));
            let err = abs_diff(&got, &x);
            for q in 1..=bound {
                let p = (x.clone() * int(q)).round().to_integer();
                let cand = Ratio::new(p, BigInt::from(q));
                assert!(
                    err <= abs_diff(&cand, &x),
                    "bound {bound}: {} not optimal vs {}",
                    fmt_ratio(&got),
                    fmt_ratio(&cand)
                );
            }
            assert!(got.denom() <= &BigInt::from(bound));
        }
    }
}
