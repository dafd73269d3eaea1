use num_bigint::BigInt;
use num_traits::Zero;

/// Exact q-expansion Σ_{n≥1} a(n)qⁿ truncated after `precision` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpansion {
    weight: u32,
    coeffs: Vec<BigInt>,
}

impl QExpansion {
    /// `coeffs[i]` is a(i + 1).
    pub fn new(weight: u32, coeffs: Vec<BigInt>) -> Self {
        QExpansion { weight, coeffs }
    }

    /// Build from a full series with constant term at index 0, which must vanish.
    pub(crate) fn from_series(weight: u32, series: &[BigInt]) -> Self {
        debug_assert!(series.first().map_or(true, |c| c.is_zero()));
        QExpansion { weight, coeffs: series.iter().skip(1).cloned().collect() }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    /// a(n) for 1 ≤ n ≤ precision; a(0) = 0.
    pub fn coeff(&self, n: usize) -> BigInt {
        if n == 0 {
            BigInt::zero()
        } else {
            self.coeffs[n - 1].clone()
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Largest coefficient bit length, a proxy for the working precision required.
    pub fn max_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }
}

/// Truncated product of two series with constant term at index 0.
pub(crate) fn mul_trunc(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}
