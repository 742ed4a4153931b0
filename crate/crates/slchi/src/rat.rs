//! Exact rationals in reports: serialised as `"num/den"` strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serializer;

pub fn rat(n: impl Into<BigInt>, d: impl Into<BigInt>) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `b^k` for a possibly negative exponent.
pub fn pow(b: u64, k: i64) -> BigRational {
    let m = BigRational::from_integer(BigInt::from(b)).pow(k.unsigned_abs() as i32);
    if k >= 0 {
        m
    } else {
        m.recip()
    }
}

pub fn show(x: &BigRational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// A rational `>= x`, for `x` computed in floating point with relative error
/// well below `1e-9` (a handful of `exp`/`ln`/`powf` calls).
pub fn upper(x: f64) -> BigRational {
    if x.is_nan() {
        return BigRational::zero();
    }
    let y = if x.is_finite() { x * (1.0 + 1e-9) + f64::MIN_POSITIVE } else { f64::MAX };
    BigRational::from_float(y).expect("finite")
}

pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&show(x))
}

pub mod opt {
    use super::*;
    pub fn serialize<S: Serializer>(x: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_str(&show(v)),
            None => s.serialize_none(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_rounds_up() {
        for x in [1e-30, 0.1, 1.0 / 3.0, 2.5e10, 7.0] {
            assert!(upper(x) > BigRational::from_float(x).unwrap());
        }
        assert_eq!(show(&rat(6, 4)), "3/2");
        assert_eq!(show(&pow(3, -2)), "1/9");
        assert_eq!(show(&int(5)), "5");
    }
}
