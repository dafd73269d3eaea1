//! Small integer arithmetic helpers.

pub use num_integer::gcd;

/// Prime factorisation by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

/// All positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

/// Sum of divisors.
pub fn sigma1(n: u64) -> u64 {
    divisors(n).iter().sum()
}

/// Sum of the `k`-th powers of the divisors.
pub fn sigma_pow(n: u64, k: u32) -> num_bigint::BigInt {
    divisors(n)
        .iter()
        .map(|&d| num_bigint::BigInt::from(d).pow(k))
        .sum()
}

/// Number of divisors.
pub fn tau(n: u64) -> u64 {
    divisors(n).len() as u64
}

/// Squarefree test.
pub fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}
