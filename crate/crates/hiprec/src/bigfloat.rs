//! Arbitrary-precision binary floating point on top of `BigInt`.
//!
//! A value is `mantissa * 2^exp` with an unbounded integer mantissa.
//! Addition, subtraction, and multiplication are exact; division, square
//! root, and the constants take an explicit precision in bits and truncate.
//! Long-running sums should call [`BigFloat::truncate`] periodically so the
//! mantissa does not grow without bound.  This is oracle code: speed does
//! not matter, and misuse (division by zero, square root of a negative)
//! panics rather than returning errors.

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigFloat {
    mantissa: BigInt,
    exp: i64,
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat { mantissa: BigInt::zero(), exp: 0 }
    }

    pub fn from_i64(v: i64) -> Self {
        BigFloat { mantissa: BigInt::from(v), exp: 0 }
    }

    /// Exact conversion: every finite f64 is a dyadic rational.
    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "cannot convert non-finite {v} to BigFloat");
        if v == 0.0 {
            return Self::zero();
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { Sign::Minus } else { Sign::Plus };
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if exp_bits == 0 {
            (frac, -1074) // subnormal
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        BigFloat { mantissa: BigInt::from_biguint(sign, mant.into()), exp }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    /// Bit length of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mantissa.bits()
    }

    /// Binary exponent of the value itself, i.e. floor(log2 |x|) + 1.
    pub fn magnitude_exp(&self) -> i64 {
        self.bits() as i64 + self.exp
    }

    /// Keeps only the top `prec` bits of the mantissa (truncation toward zero).
    pub fn truncate(&self, prec: u64) -> Self {
        let bits = self.bits();
        if bits <= prec {
            return self.clone();
        }
        let shift = bits - prec;
        BigFloat { mantissa: &self.mantissa >> shift, exp: self.exp + shift as i64 }
    }

    pub fn neg(&self) -> Self {
        BigFloat { mantissa: -&self.mantissa, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        BigFloat { mantissa: self.mantissa.abs(), exp: self.exp }
    }

    /// Exact sum.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let exp = self.exp.min(other.exp);
        let a = &self.mantissa << (self.exp - exp) as u64;
        let b = &other.mantissa << (other.exp - exp) as u64;
        BigFloat { mantissa: a + b, exp }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Exact product.
    pub fn mul(&self, other: &Self) -> Self {
        BigFloat { mantissa: &self.mantissa * &other.mantissa, exp: self.exp + other.exp }
    }

    pub fn mul_u64(&self, k: u64) -> Self {
        BigFloat { mantissa: &self.mantissa * k, exp: self.exp }
    }

    /// Exact scaling by 2^k.
    pub fn scl2(&self, k: i64) -> Self {
        BigFloat { mantissa: self.mantissa.clone(), exp: self.exp + k }
    }

    /// Quotient truncated to `prec` significant bits.
    pub fn div(&self, other: &Self, prec: u64) -> Self {
        assert!(!other.is_zero(), "BigFloat division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        // Scale the numerator so the integer quotient carries prec guard bits.
        let shift = (prec + other.bits()).saturating_sub(self.bits()) + 8;
        let num = &self.mantissa << shift;
        BigFloat { mantissa: num / &other.mantissa, exp: self.exp - other.exp - shift as i64 }
            .truncate(prec)
    }

    /// Quotient by a small integer, truncated to `prec` significant bits.
    pub fn div_u64(&self, k: u64, prec: u64) -> Self {
        assert!(k != 0, "BigFloat division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let shift = (prec + 64).saturating_sub(self.bits());
        let num = &self.mantissa << shift;
        BigFloat { mantissa: num / k, exp: self.exp - shift as i64 }.truncate(prec)
    }

    /// Square root truncated to `prec` significant bits; panics on negatives.
    pub fn sqrt(&self, prec: u64) -> Self {
        assert!(!self.is_negative(), "BigFloat sqrt of a negative value");
        if self.is_zero() {
            return Self::zero();
        }
        // Shift so the working mantissa has >= 2*prec+2 bits and an even exponent.
        let mut shift = (2 * prec + 16).saturating_sub(self.bits());
        if (self.exp - shift as i64) % 2 != 0 {
            shift += 1;
        }
        let m = &self.mantissa << shift;
        BigFloat { mantissa: m.sqrt(), exp: (self.exp - shift as i64) / 2 }.truncate(prec)
    }

    /// Nearest f64 (round half up in magnitude on the 54th bit).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.bits();
        let (q, e) = if bits > 55 {
            let shift = bits - 55;
            ((&self.mantissa >> shift).to_i64().unwrap(), self.exp + shift as i64)
        } else {
            (self.mantissa.to_i64().unwrap(), self.exp)
        };
        // Round the spare low bit away.
        let (q, e) = if q.unsigned_abs() > (1 << 54) {
            (((q >> 1) + (q & 1) * q.signum()), e + 1)
        } else {
            (q, e)
        };
        q as f64 * pow2(e)
    }

    /// |self| compared with |other|.
    pub fn abs_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.abs().sub(&other.abs()).mantissa.sign().partial_cmp(&Sign::NoSign).unwrap()
    }
}

/// 2^e as f64, staged so intermediate factors stay representable.
fn pow2(e: i64) -> f64 {
    if e >= -1022 && e <= 1023 {
        f64::from_bits(((1023 + e) as u64) << 52)
    } else if e > 1023 {
        if e > 2100 {
            f64::INFINITY
        } else {
            pow2(1023) * pow2(e - 1023)
        }
    } else if e < -2150 {
        0.0
    } else {
        pow2(-1022) * pow2(e + 1022)
    }
}

/// pi truncated to `prec` significant bits (Machin's formula,
/// 16 atan(1/5) - 4 atan(1/239), evaluated in scaled integers).
pub fn pi(prec: u64) -> BigFloat {
    let work = prec + 32;
    let a = atan_inv(5, work).mul_u64(16);
    let b = atan_inv(239, work).mul_u64(4);
    a.sub(&b).truncate(prec)
}

/// atan(1/n) at `prec` bits for integer n >= 2.
fn atan_inv(n: u64, prec: u64) -> BigFloat {
    let one = BigInt::from(1) << prec;
    let n2 = BigInt::from(n) * n;
    let mut term = one / n; // (1/n) scaled by 2^prec
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !term.is_zero() {
        let contrib = &term / (2 * k + 1);
        if k % 2 == 0 {
            sum += contrib;
        } else {
            sum -= contrib;
        }
        term /= &n2;
        k += 1;
    }
    BigFloat { mantissa: sum, exp: -(prec as i64) }
}
