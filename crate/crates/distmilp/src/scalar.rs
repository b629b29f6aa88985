//! Exact rational scalars.
//!
//! Every coefficient in the crate (constraint rows, costs, points) is a
//! [`Scalar`]: an arbitrary-precision rational kept in canonical form
//! (positive denominator, fully reduced). Arithmetic never rounds, so
//! equality checks and invariant assertions are exact.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Exact rational number. `num_rational::BigRational` already maintains the
/// canonical form this crate relies on: denominator > 0 and
/// gcd(|num|, den) = 1.
pub type Scalar = num_rational::BigRational;

/// Scalar from an integer.
pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

/// Scalar from a numerator/denominator pair.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Scalar {
    assert!(den != 0, "zero denominator");
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

/// Denominator used when snapping sampled doubles to rationals.
pub const SNAP_DEN: i64 = 1 << 30;

/// Snap a double to the nearest rational with denominator 2^30.
///
/// Keeps double-precision draws reproducible while feeding the exact
/// pipeline downstream.
pub fn snap_f64(x: f64) -> Scalar {
    let scaled = (x * SNAP_DEN as f64).round();
    assert!(
        scaled.is_finite() && scaled.abs() < 9e18,
        "value {x} cannot be snapped to a rational"
    );
    Scalar::new(BigInt::from(scaled as i64), BigInt::from(SNAP_DEN))
}

/// Exact dot product.
///
/// Panics if the slices have different lengths.
pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    assert_eq!(a.len(), b.len(), "dot product dimension mismatch");
    let mut acc = Scalar::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Whether the scalar is an integer.
pub fn is_integer(s: &Scalar) -> bool {
    s.denom().is_one()
}

/// Zero vector of a given length.
pub fn zeros(len: usize) -> Vec<Scalar> {
    vec![Scalar::zero(); len]
}

/// Canonical basis vector `e_coord` of a given length.
pub fn unit(len: usize, coord: usize) -> Vec<Scalar> {
    assert!(coord < len);
    let mut v = zeros(len);
    v[coord] = Scalar::one();
    v
}

/// Render as `num` when integral, `num/den` otherwise. Round-trips through
/// [`parse_token`] losslessly.
pub fn token(s: &Scalar) -> String {
    if is_integer(s) {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Parse the `num` / `num/den` token format produced by [`token`].
pub fn parse_token(tok: &str) -> Result<Scalar> {
    let parse_int = |s: &str| -> Result<BigInt> {
        s.parse::<BigInt>()
            .map_err(|_| Error::InvalidInput(format!("bad rational token `{tok}`")))
    };
    match tok.split_once('/') {
        None => Ok(Scalar::from_integer(parse_int(tok)?)),
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::InvalidInput(format!("zero denominator in `{tok}`")));
            }
            Ok(Scalar::new(parse_int(n)?, den))
        }
    }
}

/// Approximate f64 value, for reporting only.
pub fn approx(s: &Scalar) -> f64 {
    s.to_f64().unwrap_or_else(|| {
        let n = s.numer().to_f64().unwrap_or(f64::NAN);
        let d = s.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Sum of absolute values.
pub fn l1_norm(v: &[Scalar]) -> Scalar {
    v.iter().fold(Scalar::zero(), |acc, x| acc + x.abs())
}
