use rug::Float;

use crate::error::{Error, Result};

/// Working precision and the tolerances derived from it.
///
/// `tol_rel = 2^(-bits/2)`: identities are accepted once half the working
/// bits agree. Coefficients below `drop()` (relative) are treated as zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    bits: u32,
}

impl PrecisionContext {
    pub const MIN_BITS: u32 = 64;

    pub fn new(bits: u32) -> Result<Self> {
        if bits < Self::MIN_BITS {
            return Err(Error::InvalidPrecision(format!(
                "bits = {bits} is below the minimum of {}",
                Self::MIN_BITS
            )));
        }
        Ok(Self { bits })
    }

    /// Default policy for ladders up to order `n`: max(128, 24 n) bits.
    pub fn for_order(n: usize) -> Self {
        Self {
            bits: Self::recommended_bits(n),
        }
    }

    pub fn recommended_bits(n: usize) -> u32 {
        (24 * n as u32).max(128)
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn tol_rel(&self) -> Float {
        Float::with_val(self.bits, Float::i_exp(1, -((self.bits / 2) as i32)))
    }

    /// Relative threshold below which a coefficient counts as rounding dust.
    pub fn drop(&self) -> Float {
        Float::with_val(self.bits, Float::i_exp(1, -(self.bits as i32 - 16)))
    }

    pub fn zero(&self) -> Float {
        Float::new(self.bits)
    }

    pub fn float<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.bits, v)
    }

    /// Parses a decimal string such as "0.3" or "-1/2" at working precision.
    pub fn parse(&self, s: &str) -> Result<Float> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = self.parse(n)?;
            let d = self.parse(d)?;
            if d.is_zero() {
                return Err(Error::InvalidParameter(format!("zero denominator in {s:?}")));
            }
            return Ok(Float::with_val(self.bits, &n / &d));
        }
        let parsed = Float::parse(s)
            .map_err(|e| Error::InvalidParameter(format!("cannot parse {s:?}: {e}")))?;
        Ok(Float::with_val(self.bits, parsed))
    }
}

/// |l - r| / (1 + |l| + |r|)
pub fn rel_residual(l: &Float, r: &Float) -> Float {
    let prec = l.prec().max(r.prec());
    let num = Float::with_val(prec, l - r).abs();
    let den = Float::with_val(prec, l.abs_ref()) + Float::with_val(prec, r.abs_ref()) + 1u32;
    num / den
}

/// Full-precision decimal rendering that round-trips through `Float::parse`.
pub fn to_decimal(x: &Float) -> String {
    x.to_string_radix(10, None)
}
