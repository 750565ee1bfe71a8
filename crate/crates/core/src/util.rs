use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Natural logarithm of a big integer, accurate to double precision.
pub(crate) fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_u64().map(|v| (v as f64).ln()).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX) as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub(crate) fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back to scaled integer division for very large numerators.
    let (n, d) = (r.numer(), r.denom());
    let shift = n.bits().max(d.bits()).saturating_sub(900);
    let n = (n >> shift).to_f64().unwrap_or(f64::NAN);
    let d = (d >> shift).to_f64().unwrap_or(f64::NAN);
    n / d
}

pub(crate) fn big_ratio(num: &BigUint, den: &BigUint) -> BigRational {
    if den.is_zero() {
        return BigRational::zero();
    }
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

pub(crate) fn product_u64(values: impl IntoIterator<Item = usize>) -> BigUint {
    values
        .into_iter()
        .fold(BigUint::one(), |acc, v| acc * BigUint::from(v))
}

/// Serde helpers that write big numbers as decimal strings.
pub mod serde_big {
    use num_bigint::BigUint;
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }

    pub mod rational {
        use super::*;

        pub fn serialize<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
            s.serialize_str(&v.to_string())
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
            let s = String::deserialize(d)?;
            s.parse().map_err(serde::de::Error::custom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_big_matches_small_and_large_values() {
        assert_eq!(ln_big(&BigUint::from(1u32)), 0.0);
        assert!((ln_big(&BigUint::from(1000u32)) - 1000f64.ln()).abs() < 1e-12);
        let big = BigUint::from(3u32).pow(200);
        assert!((ln_big(&big) - 200.0 * 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn rational_to_f64_handles_huge_terms() {
        let n = BigUint::from(7u32).pow(800);
        let d = BigUint::from(7u32).pow(799);
        assert!((rational_to_f64(&big_ratio(&n, &d)) - 7.0).abs() < 1e-12);
    }
}
