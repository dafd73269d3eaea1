//! Exact combinatorics behind the moment computation: power expansions of
//! Hecke eigenvalues, multinomial tuple counts, Gaussian moments, the
//! combinatorial sum ℭ, and the sum/product switch over distinct primes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, Zero};

use crate::error::{Error, Result};

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Binomial coefficient, zero outside 0 ≤ r ≤ n.
pub fn binomial(n: i64, r: i64) -> BigInt {
    if r < 0 || n < 0 || r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Coefficients c_{n,m} with λ(p)ⁿ = Σ_m c_{n,m} λ(p^m) at level one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerExpansionCoeffs {
    pub n: u32,
    pub coeffs: BTreeMap<u32, BigInt>,
}

impl PowerExpansionCoeffs {
    pub fn get(&self, m: u32) -> BigInt {
        self.coeffs.get(&m).cloned().unwrap_or_else(BigInt::zero)
    }
}

/// c_{n,m} = C(n, (n−m)/2) − C(n, (n−m)/2 − 1) for m ≡ n (mod 2).
pub fn power_coeffs(n: u32) -> PowerExpansionCoeffs {
    let mut coeffs = BTreeMap::new();
    for m in (0..=n).filter(|m| (n - m) % 2 == 0) {
        let j = ((n - m) / 2) as i64;
        coeffs.insert(m, binomial(n as i64, j) - binomial(n as i64, j - 1));
    }
    PowerExpansionCoeffs { n, coeffs }
}

/// An ordered composition (n₁, …, n_ℓ) of t into positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Composition {
    parts: Vec<u32>,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() || parts.iter().any(|&p| p == 0) {
            return Err(Error::InvalidArgument(format!("invalid composition {parts:?}")));
        }
        Ok(Composition { parts })
    }

    pub fn total(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// All compositions of t.
pub fn compositions(t: u32) -> Vec<Composition> {
    fn rec(rest: u32, cur: &mut Vec<u32>, out: &mut Vec<Composition>) {
        if rest == 0 {
            out.push(Composition { parts: cur.clone() });
            return;
        }
        for p in 1..=rest {
            cur.push(p);
            rec(rest - p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if t > 0 {
        rec(t, &mut Vec::new(), &mut out);
    }
    out
}

/// t!/(ℓ!·n₁!⋯n_ℓ!).
pub fn multinomial_factor(c: &Composition) -> BigRational {
    let num = factorial(c.total() as u64);
    let den = c
        .parts
        .iter()
        .fold(factorial(c.len() as u64), |acc, &p| acc * factorial(p as u64));
    BigRational::new(num, den)
}

/// Brute-force count of ordered t-tuples of primes realising the multiset
/// {q_j^{n_j}}, divided by the ℓ! orderings of the distinct primes.
pub fn tuple_count_oracle(prime_multiset: &[(u64, u32)]) -> BigRational {
    let primes: Vec<u64> = prime_multiset.iter().map(|&(p, _)| p).collect();
    let t: u32 = prime_multiset.iter().map(|&(_, n)| n).sum();
    let l = primes.len();
    let mut count = 0u64;
    let mut idx = vec![0usize; t as usize];
    loop {
        let mut hist = vec![0u32; l];
        for &i in &idx {
            hist[i] += 1;
        }
        if hist.iter().zip(prime_multiset).all(|(h, &(_, n))| *h == n) {
            count += 1;
        }
        // odometer over {0..ℓ−1}^t
        let mut pos = 0;
        loop {
            if pos == idx.len() {
                let orderings = factorial(l as u64);
                return BigRational::new(BigInt::from(count), orderings);
            }
            idx[pos] += 1;
            if idx[pos] < l {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Generic exact-or-float scalar for the identities below.
pub trait CombScalar: Clone + Num + FromPrimitive + std::fmt::Debug {}
impl<T: Clone + Num + FromPrimitive + std::fmt::Debug> CombScalar for T {}

fn from_bigint<T: CombScalar>(b: &BigInt) -> T {
    // Only small integers reach here for float scalars; exact types go through decimal text.
    let s = b.to_str_radix(10);
    T::from_str_radix(&s, 10).unwrap_or_else(|_| {
        let f: f64 = s.parse().unwrap_or(f64::NAN);
        T::from_f64(f).expect("representable")
    })
}

fn pow<T: CombScalar>(x: &T, e: u32) -> T {
    let mut r = T::one();
    for _ in 0..e {
        r = r * x.clone();
    }
    r
}

/// E[Xⁿ] for X ~ N(0, variance): 0 for odd n, (n−1)!!·variance^{n/2} otherwise.
pub fn gaussian_moment<T: CombScalar>(n: u32, variance: &T) -> T {
    if n % 2 == 1 {
        return T::zero();
    }
    let dfact = (1..n).step_by(2).fold(BigInt::one(), |a, i| a * BigInt::from(i));
    from_bigint::<T>(&dfact) * pow(variance, n / 2)
}

/// ℭ = Σ_t C(n,t)(−2)^t φ(0)^{n−t} Σ_s t!/(2^s (t−s)!)·C(t−s, s)·(φ(0)/2)^{t−2s}(σ²/4)^s,
/// evaluated term by term. The factor φ(0)^{n−t} comes from expanding
/// (D − 𝒜D)ⁿ = (−2)ⁿ(P − φ(0)/2)ⁿ; without it the sum is not a centered moment.
pub fn frak_c<T: CombScalar>(n: u32, phi0: &T, sigma2: &T) -> T {
    frak_c_terms(n, phi0, sigma2, true)
}

/// The same triple sum with the factor φ(0)^{n−t} left out, as it is usually
/// displayed. Equals 1 − φ(0) at n = 1, so it is kept only for comparison.
pub fn frak_c_as_printed<T: CombScalar>(n: u32, phi0: &T, sigma2: &T) -> T {
    frak_c_terms(n, phi0, sigma2, false)
}

/// φ(0)ⁿ Σ_t C(n,t)(−1)^t Σ_s t!/(t−s)!·C(t−s, s)·(σ²/(2φ(0)²))^s, the regrouped form.
/// Needs φ(0) ≠ 0.
pub fn frak_c_regrouped<T: CombScalar>(n: u32, phi0: &T, sigma2: &T) -> Result<T> {
    if phi0.is_zero() {
        return Err(Error::InvalidArgument("the regrouped sum divides by φ(0)".into()));
    }
    let x = sigma2.clone() / (T::from_u64(2).unwrap() * phi0.clone() * phi0.clone());
    let mut total = T::zero();
    for t in 0..=n {
        let mut inner = T::zero();
        for s in 0..=t / 2 {
            let c = factorial(t as u64) / factorial((t - s) as u64) * binomial((t - s) as i64, s as i64);
            inner = inner + from_bigint::<T>(&c) * pow(&x, s);
        }
        let outer = binomial(n as i64, t as i64) * BigInt::from(-1).pow(t);
        total = total + from_bigint::<T>(&outer) * inner;
    }
    Ok(pow(phi0, n) * total)
}

fn frak_c_terms<T: CombScalar>(n: u32, phi0: &T, sigma2: &T, centered: bool) -> T {
    let two = T::from_u64(2).unwrap();
    let four = T::from_u64(4).unwrap();
    let half_phi = phi0.clone() / two.clone();
    let quarter_sigma = sigma2.clone() / four;
    let mut total = T::zero();
    for t in 0..=n {
        let outer = binomial(n as i64, t as i64) * BigInt::from(-2).pow(t);
        let mut inner = T::zero();
        for s in 0..=t / 2 {
            let num = factorial(t as u64) * binomial((t - s) as i64, s as i64);
            let den = BigInt::from(2).pow(s) * factorial((t - s) as u64);
            let (q, r) = num.div_rem(&den);
            let coef = if r.is_zero() {
                from_bigint::<T>(&q)
            } else {
                from_bigint::<T>(&num) / from_bigint::<T>(&den)
            };
            inner = inner + coef * pow(&half_phi, t - 2 * s) * pow(&quarter_sigma, s);
        }
        let mut term = from_bigint::<T>(&outer) * inner;
        if centered {
            term = term * pow(phi0, n - t);
        }
        total = total + term;
    }
    total
}

/// Result of the distinct-prime sum/product switch.
#[derive(Clone, Debug, PartialEq)]
pub struct SwitchCheck {
    /// Σ over ℓ-tuples of pairwise distinct primes of Π_j T(q_j, n_j, m_j).
    pub distinct_sum: BigRational,
    /// Π_j Σ_q T(q, n_j, m_j).
    pub product: BigRational,
    /// product − distinct_sum.
    pub difference: BigRational,
    /// Σ over tuples with at least one coincidence q_i = q_j, enumerated directly.
    pub coincidence_sum: BigRational,
    /// Pairwise over-count Σ_{i<j} (Σ_q T_i T_j) Π_{l≠i,j} Σ_q T_l.
    pub bound: BigRational,
}

impl SwitchCheck {
    /// difference equals the enumerated coincidence sum.
    pub fn identity_holds(&self) -> bool {
        self.difference == self.coincidence_sum
    }

    /// difference ≤ bound.
    pub fn bound_holds(&self) -> bool {
        self.difference <= self.bound
    }

    pub fn strict(&self) -> bool {
        self.difference < self.bound
    }
}

/// Rational surrogate of the analytic factor: T(q, n, m) = χ(q)^m·w_q^n / q^{(n+m)/2},
/// where w_q = 1 − 1/q stands in for log q/log Q.
pub fn surrogate_factor(q: u64, n: u32, m: u32, chi_q: i8) -> BigRational {
    let w = BigRational::new(BigInt::from(q - 1), BigInt::from(q));
    let mut v = BigRational::one();
    for _ in 0..n {
        v *= w.clone();
    }
    let den = BigInt::from(q).pow((n + m) / 2);
    let sign = if m % 2 == 1 { chi_q as i64 } else if chi_q == 0 && m > 0 { 0 } else { 1 };
    v * BigRational::new(BigInt::from(sign), den)
}

/// Compare the sum over distinct prime tuples with the product of single sums.
///
/// `pairs[j] = (n_j, m_j)` with m_j ≤ n_j and m_j ≡ n_j (mod 2); `chi` gives χ(q).
pub fn switch_check(pairs: &[(u32, u32)], primes: &[u64], chi: &dyn Fn(u64) -> i8) -> Result<SwitchCheck> {
    let l = pairs.len();
    if l < 2 {
        return Err(Error::InvalidArgument("switch_check needs ℓ ≥ 2".into()));
    }
    if pairs.iter().any(|&(n, m)| m > n || (n - m) % 2 != 0 || n == 0) {
        return Err(Error::InvalidArgument(format!("invalid exponent pairs {pairs:?}")));
    }
    let table: Vec<Vec<BigRational>> = pairs
        .iter()
        .map(|&(n, m)| primes.iter().map(|&q| surrogate_factor(q, n, m, chi(q))).collect())
        .collect();
    let sums: Vec<BigRational> = table.iter().map(|row| row.iter().sum()).collect();
    let product: BigRational = sums.iter().fold(BigRational::one(), |a, s| a * s);

    let mut distinct = BigRational::zero();
    let mut coincident = BigRational::zero();
    let np = primes.len();
    let mut idx = vec![0usize; l];
    if np > 0 {
        loop {
            let term = idx.iter().enumerate().fold(BigRational::one(), |a, (j, &i)| a * &table[j][i]);
            let mut seen = idx.clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                coincident += term;
            } else {
                distinct += term;
            }
            let mut pos = 0;
            while pos < l {
                idx[pos] += 1;
                if idx[pos] < np {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == l {
                break;
            }
        }
    }

    let mut bound = BigRational::zero();
    for i in 0..l {
        for j in i + 1..l {
            let diag: BigRational = (0..np).map(|q| &table[i][q] * &table[j][q]).sum();
            let rest = (0..l)
                .filter(|&x| x != i && x != j)
                .fold(BigRational::one(), |a, x| a * &sums[x]);
            bound += diag * rest;
        }
    }
    let difference = &product - &distinct;
    Ok(SwitchCheck { distinct_sum: distinct, product, difference, coincidence_sum: coincident, bound })
}

/// Exact rational from a decimal-free integer pair, convenient for grids.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// λ(p^m) for a level-one Hecke eigenvalue seed x = λ(p): U_m(x/2) Chebyshev values.
pub fn chebyshev_sequence(x: &BigRational, len: usize) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    out.push(BigRational::one());
    if len == 1 {
        return out;
    }
    out.push(x.clone());
    while out.len() < len {
        let n = out.len();
        let next = x * &out[n - 1] - &out[n - 2];
        out.push(next);
    }
    out
}

/// Σ_m c_{n,m} λ(p^m) for a seed λ(p) = x.
pub fn contract_power(n: u32, x: &BigRational) -> BigRational {
    let seq = chebyshev_sequence(x, n as usize + 1);
    power_coeffs(n)
        .coeffs
        .iter()
        .map(|(&m, c)| BigRational::from_integer(c.clone()) * &seq[m as usize])
        .sum()
}

/// Whether a rational is non-negative.
pub fn nonneg(x: &BigRational) -> bool {
    !x.is_negative()
}
