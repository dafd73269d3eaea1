use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::qexp::{mul_trunc, QExpansion};
use crate::error::{Error, Result};

/// dim S_k(SL₂(ℤ)) by the classical dimension formula.
pub fn dim_cusp(k: u32) -> usize {
    if k % 2 == 1 || k < 12 {
        return 0;
    }
    let base = (k / 12) as usize;
    if k % 12 == 2 {
        base - 1
    } else {
        base
    }
}

fn divisor_power_sums(len: usize, power: u32) -> Vec<BigInt> {
    let mut s = vec![BigInt::zero(); len];
    for d in 1..len {
        let dp = BigInt::from(d).pow(power);
        let mut m = d;
        while m < len {
            s[m] += &dp;
            m += d;
        }
    }
    s
}

fn eisenstein(len: usize, power: u32, scale: i64) -> Vec<BigInt> {
    let mut s = divisor_power_sums(len, power);
    for c in s.iter_mut().skip(1) {
        *c *= scale;
    }
    if len > 0 {
        s[0] = BigInt::one();
    }
    s
}

/// E₄ = 1 + 240 Σ σ₃(n)qⁿ, coefficients of q⁰..q^{len−1}.
pub fn eisenstein_e4(len: usize) -> Vec<BigInt> {
    eisenstein(len, 3, 240)
}

/// E₆ = 1 − 504 Σ σ₅(n)qⁿ, coefficients of q⁰..q^{len−1}.
pub fn eisenstein_e6(len: usize) -> Vec<BigInt> {
    eisenstein(len, 5, -504)
}

/// Δ = (E₄³ − E₆²)/1728, coefficients of q⁰..q^{len−1}.
pub fn delta(len: usize) -> Vec<BigInt> {
    let e4 = eisenstein_e4(len);
    let e6 = eisenstein_e6(len);
    let e4c = mul_trunc(&mul_trunc(&e4, &e4, len), &e4, len);
    let e6s = mul_trunc(&e6, &e6, len);
    let d = BigInt::from(1728);
    e4c.iter().zip(&e6s).map(|(a, b)| (a - b) / &d).collect()
}

/// Echelonised integral basis of S_k(1) with a_{f_i}(j) = δ_{ij} for i, j ≤ dim,
/// each expansion holding `m` coefficients.
pub fn victor_miller_basis(k: u32, m: usize) -> Result<Vec<QExpansion>> {
    let d = dim_cusp(k);
    if d == 0 {
        return Err(Error::EmptySpace { weight: k });
    }
    if m < d + 10 {
        return Err(Error::Precision {
            what: format!("basis of S_{k}"),
            required: d + 10,
            available: m,
        });
    }
    let len = m + 1;
    let e = match k % 12 {
        2 => 14,
        r => r,
    };
    let e4 = eisenstein_e4(len);
    let e6 = eisenstein_e6(len);
    let a = match e {
        0 => {
            let mut one = vec![BigInt::zero(); len];
            one[0] = BigInt::one();
            one
        }
        4 => e4.clone(),
        6 => e6.clone(),
        8 => mul_trunc(&e4, &e4, len),
        10 => mul_trunc(&e4, &e6, len),
        _ => mul_trunc(&mul_trunc(&e4, &e4, len), &e6, len),
    };
    let dl = delta(len);
    let e6sq = mul_trunc(&e6, &e6, len);

    // e6_pows[j] = E₆^{2j}
    let mut e6_pows = vec![a];
    for _ in 1..d {
        let next = mul_trunc(e6_pows.last().unwrap(), &e6sq, len);
        e6_pows.push(next);
    }
    let mut ls: Vec<Vec<BigInt>> = Vec::with_capacity(d);
    let mut dpow = dl.clone();
    for i in 1..=d {
        ls.push(mul_trunc(&dpow, &e6_pows[d - i], len));
        if i < d {
            dpow = mul_trunc(&dpow, &dl, len);
        }
    }
    // ls[i] = q^{i+1} + O(q^{i+2}); clear the entries above the diagonal.
    for i in 1..d {
        for j in 0..i {
            let c = ls[j][i + 1].clone();
            if c.is_zero() {
                continue;
            }
            let (head, tail) = ls.split_at_mut(i);
            for (x, y) in head[j].iter_mut().zip(&tail[0]) {
                *x -= &c * y;
            }
        }
    }
    Ok(ls.iter().map(|s| QExpansion::from_series(k, s)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_start() {
        let d = delta(6);
        let v: Vec<i64> = d.iter().map(|c| i64::try_from(c).unwrap()).collect();
        assert_eq!(v, vec![0, 1, -24, 252, -1472, 4830]);
    }

    #[test]
    fn dims() {
        let table = [(2, 0), (10, 0), (12, 1), (14, 0), (24, 2), (26, 1), (60, 5), (120, 10), (140, 11)];
        for (k, d) in table {
            assert_eq!(dim_cusp(k), d, "k = {k}");
        }
    }

    #[test]
    fn empty_and_short() {
        assert!(matches!(victor_miller_basis(10, 30), Err(Error::EmptySpace { .. })));
        assert!(matches!(victor_miller_basis(11, 30), Err(Error::EmptySpace { .. })));
        assert!(matches!(victor_miller_basis(24, 5), Err(Error::Precision { .. })));
    }
}
