//! Prime sieving and the prime sums that arise from the explicit formula.

use rayon::prelude::*;

use crate::arith::{divisors, gcd, sigma1};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::testfuncs::TestFunction;

const SEGMENT: u64 = 1 << 18;
const BLOCK: usize = 4096;

/// Primes up to a cutoff with cached natural logarithms.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    cutoff: u64,
    primes: Vec<u64>,
    logs: Vec<f64>,
}

/// Plain sieve of Eratosthenes over [0, n].
pub fn simple_sieve(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut is = vec![true; n as usize + 1];
    is[0] = false;
    is[1] = false;
    let mut i = 2usize;
    while i * i <= n as usize {
        if is[i] {
            let mut j = i * i;
            while j <= n as usize {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u64).collect()
}

fn sieve_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    let len = (hi - lo) as usize;
    let mut is = vec![true; len];
    for &p in base {
        if p * p >= hi {
            break;
        }
        let start = (p * p).max(lo.div_ceil(p) * p);
        let mut j = start;
        while j < hi {
            is[(j - lo) as usize] = false;
            j += p;
        }
    }
    (0..len)
        .filter(|&i| is[i] && lo + i as u64 >= 2)
        .map(|i| lo + i as u64)
        .collect()
}

impl PrimeTable {
    /// Segmented sieve of all primes ≤ cutoff; segments are sieved in parallel.
    pub fn new(cutoff: u64) -> Self {
        let root = (cutoff as f64).sqrt() as u64 + 2;
        let base = simple_sieve(root);
        let nseg = (cutoff + 1).div_ceil(SEGMENT);
        let segments: Vec<Vec<u64>> = (0..nseg)
            .into_par_iter()
            .map(|s| {
                let lo = s * SEGMENT;
                let hi = ((s + 1) * SEGMENT).min(cutoff + 1);
                sieve_segment(lo, hi, &base)
            })
            .collect();
        let primes: Vec<u64> = segments.into_iter().flatten().collect();
        let logs = primes.iter().map(|&p| (p as f64).ln()).collect();
        PrimeTable { cutoff, primes, logs }
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn logs(&self) -> &[f64] {
        &self.logs
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Primes ≤ x as a prefix of the table.
    pub fn upto(&self, x: u64) -> Result<&[u64]> {
        if x > self.cutoff {
            return Err(Error::Precision {
                what: "prime table".into(),
                required: x as usize,
                available: self.cutoff as usize,
            });
        }
        let end = self.primes.partition_point(|&p| p <= x);
        Ok(&self.primes[..end])
    }
}

/// Sum a sequence by fixed-size blocks followed by an adjacent-pair tree, so the
/// result does not depend on the thread count and trailing zeros change nothing.
pub fn deterministic_sum<F>(len: usize, term: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    let nblocks = len.div_ceil(BLOCK);
    let mut level: Vec<f64> = (0..nblocks)
        .into_par_iter()
        .map(|b| {
            let mut s = 0.0;
            for i in b * BLOCK..((b + 1) * BLOCK).min(len) {
                s += term(i);
            }
            s
        })
        .collect();
    if level.is_empty() {
        return 0.0;
    }
    while level.len() > 1 {
        level = level.chunks(2).map(|c| if c.len() == 2 { c[0] + c[1] } else { c[0] }).collect();
    }
    level[0]
}

/// σ₁(gcd(r, q^m)).
pub fn sigma1_gcd(r: u64, q: u64, m: u32) -> u64 {
    let mut g = 1u64;
    let mut rr = r;
    for _ in 0..m {
        if rr % q == 0 {
            rr /= q;
            g *= q;
        } else {
            break;
        }
    }
    sigma1(g)
}

/// Both sides of f(m)f(n) = Σ_{d | (m,n)} d·f(mn/d²) with f(x) = σ₁((r, x)).
pub fn divisor_identity_sides(r: u64, m: u64, n: u64) -> (u64, u64) {
    let f = |x: u64| sigma1(gcd(r, x));
    let lhs = f(m) * f(n);
    let rhs = divisors(gcd(m, n)).into_iter().map(|d| d * f(m * n / (d * d))).sum();
    (lhs, rhs)
}

/// Whether the divisor-sum identity holds at (r, m, n).
pub fn divisor_identity_check(r: u64, m: u64, n: u64) -> bool {
    let (a, b) = divisor_identity_sides(r, m, n);
    a == b
}

/// One evaluation of a prime sum with its predicted limit.
#[derive(Clone, Debug, PartialEq)]
pub struct PrimeSumResult {
    pub q: f64,
    pub value: f64,
    pub predicted_limit: f64,
    pub deviation: f64,
    pub primes_used: usize,
}

/// Limit of the (m, n) prime sum as Q → ∞.
pub fn predicted_limit(m: u32, n: u32, chi: &DirichletCharacter, phi: &TestFunction<f64>) -> f64 {
    match (m, n) {
        (0, 2) => phi.sigma2() / 4.0,
        (1, 1) if chi.is_trivial() => phi.phi0() / 2.0,
        _ => 0.0,
    }
}

/// Σ_{q ≤ Q^β, q ∤ N} φ̂(log q/log Q)ⁿ χ(q)^m (log q)ⁿ / (q^{(m+n)/2} (log Q)ⁿ) · σ₁((r, q^m)).
pub fn lemma_sum(
    m: u32,
    n: u32,
    chi: &DirichletCharacter,
    phi: &TestFunction<f64>,
    q: f64,
    r: u64,
    level: u64,
    table: &PrimeTable,
) -> Result<PrimeSumResult> {
    let cutoff = (q.powf(phi.beta())).floor() as u64;
    lemma_sum_to(m, n, chi, phi, q, r, level, table, cutoff)
}

/// As [`lemma_sum`] but summing over all primes up to an explicit cutoff.
#[allow(clippy::too_many_arguments)]
pub fn lemma_sum_to(
    m: u32,
    n: u32,
    chi: &DirichletCharacter,
    phi: &TestFunction<f64>,
    q: f64,
    r: u64,
    level: u64,
    table: &PrimeTable,
    cutoff: u64,
) -> Result<PrimeSumResult> {
    if m > n || (n - m) % 2 != 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("(m, n) = ({m}, {n}) needs m ≤ n, m ≡ n mod 2, n ≥ 1")));
    }
    if !(q > 1.0) {
        return Err(Error::InvalidArgument(format!("Q = {q} must exceed 1")));
    }
    let primes = table.upto(cutoff)?;
    let logs = &table.logs()[..primes.len()];
    let log_q = q.ln();
    let value = deterministic_sum(primes.len(), |i| {
        let p = primes[i];
        if level > 1 && level % p == 0 {
            return 0.0;
        }
        let u = logs[i] / log_q;
        let h = phi.phi_hat(&u);
        if h == 0.0 {
            return 0.0;
        }
        let cm = match m % 2 {
            1 => chi.value(p as i64) as f64,
            _ if m > 0 && chi.value(p as i64) == 0 => 0.0,
            _ => 1.0,
        };
        let s = sigma1_gcd(r, p, m) as f64;
        (h * u).powi(n as i32) * cm * s / (p as f64).powf((m + n) as f64 / 2.0)
    });
    let predicted = predicted_limit(m, n, chi, phi);
    Ok(PrimeSumResult {
        q,
        value,
        predicted_limit: predicted,
        deviation: (value - predicted).abs(),
        primes_used: primes.len(),
    })
}

/// Σ_{p ≤ X} log²p/p divided by log²X/2.
pub fn mertens_ratio(table: &PrimeTable, x: u64) -> Result<f64> {
    let primes = table.upto(x)?;
    let logs = &table.logs()[..primes.len()];
    let s = deterministic_sum(primes.len(), |i| logs[i] * logs[i] / primes[i] as f64);
    let lx = (x as f64).ln();
    Ok(s / (lx * lx / 2.0))
}
