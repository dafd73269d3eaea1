//! Exact univariate polynomials used for Hecke characteristic polynomials.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::{Mp, Real};

/// Polynomial with integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPoly {
    pub coeffs: Vec<BigInt>,
}

type RatPoly = Vec<BigRational>;

impl IntPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        }
    }

    pub fn eval_rat(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_mp(&self, x: &Mp) -> Mp {
        let mut acc = Mp::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Mp::from_bigint(c);
        }
        acc
    }

    fn to_rat(&self) -> RatPoly {
        self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect()
    }

    /// Whether the polynomial has no repeated roots.
    pub fn is_squarefree(&self) -> bool {
        let g = rat_gcd(self.to_rat(), self.derivative().to_rat());
        g.len() <= 1
    }

    /// Cauchy bound on the absolute value of every root.
    pub fn root_bound(&self) -> BigRational {
        let lead = BigRational::from_integer(self.coeffs.last().cloned().unwrap_or_else(BigInt::one));
        let m = self
            .coeffs
            .iter()
            .take(self.degree())
            .map(|c| (BigRational::from_integer(c.clone()) / &lead).abs())
            .fold(BigRational::zero(), |a, b| if b > a { b } else { a });
        m + BigRational::one()
    }

    /// Isolating intervals (a, b] each containing exactly one real root, ascending.
    pub fn isolate_real_roots(&self) -> Vec<(BigRational, BigRational)> {
        let b = self.root_bound();
        let e = (b.ceil().to_integer().bits() + 1) as i64;
        self.isolate_real_roots_within(e)
    }

    /// Root isolation restricted to |x| ≤ 2^e, the roots being known to lie there.
    pub fn isolate_real_roots_within(&self, e: i64) -> Vec<(BigRational, BigRational)> {
        let sturm: Vec<Vec<BigInt>> = sturm_sequence(self.to_rat()).into_iter().map(integer_scaled).collect();
        // Intervals are integer pairs (lo, hi) at scale 2^{−s}.
        let mut out = Vec::new();
        let lo0 = -(BigInt::one() << e as usize);
        let hi0 = BigInt::one() << e as usize;
        let mut stack = vec![(lo0, hi0, 0i64)];
        while let Some((lo, hi, s)) = stack.pop() {
            let n = sign_changes_dyadic(&sturm, &lo, s) as i64 - sign_changes_dyadic(&sturm, &hi, s) as i64;
            if n == 0 {
                continue;
            }
            if n == 1 {
                out.push((dyadic(&lo, s), dyadic(&hi, s)));
                continue;
            }
            let (lo2, hi2) = (lo << 1usize, hi << 1usize);
            let mid = (&lo2 + &hi2) / BigInt::from(2);
            stack.push((lo2, mid.clone(), s + 1));
            stack.push((mid, hi2, s + 1));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Refine a root isolated in (lo, hi] by bisection at the working precision.
    pub fn refine_root(&self, lo: &BigRational, hi: &BigRational) -> Mp {
        let mut a = Mp::from_ratio(lo);
        let mut b = Mp::from_ratio(hi);
        let fb = self.eval_mp(&b);
        if fb.is_zero() {
            return b;
        }
        let sb = fb > Mp::zero();
        let bits = crate::scalar::working_bits() as usize;
        let half = Mp::half();
        for _ in 0..(bits + 64) {
            let m = (a.clone() + b.clone()) * half.clone();
            if m <= a || m >= b {
                break;
            }
            let fm = self.eval_mp(&m);
            if fm.is_zero() {
                return m;
            }
            if (fm > Mp::zero()) == sb {
                b = m;
            } else {
                a = m;
            }
        }
        (a + b) * half
    }
}

fn trim(p: &mut RatPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn rat_rem(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut r = a.clone();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let q = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &q * c;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn rat_gcd(mut a: RatPoly, mut b: RatPoly) -> RatPoly {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rat_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn sturm_sequence(p: RatPoly) -> Vec<RatPoly> {
    let mut p0 = p;
    trim(&mut p0);
    let mut p1: RatPoly = p0
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    trim(&mut p1);
    let mut seq = vec![p0];
    while !p1.is_empty() {
        let r = rat_rem(seq.last().unwrap(), &p1);
        seq.push(p1);
        p1 = r.into_iter().map(|c| -c).collect();
        trim(&mut p1);
    }
    seq
}

fn dyadic(a: &BigInt, s: i64) -> BigRational {
    BigRational::new(a.clone(), BigInt::one() << s as usize)
}

// Positive multiple of a rational polynomial with integer coefficients.
fn integer_scaled(p: RatPoly) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for c in &p {
        l = num_integer::Integer::lcm(&l, c.denom());
    }
    p.iter().map(|c| c.numer() * (&l / c.denom())).collect()
}

// Sign of p(a·2^{−s}) from the homogenised Horner scheme
// acc ← acc·a + c_i·2^{s(d−i)}, which equals 2^{sd}·p(a·2^{−s}).
fn sign_at_dyadic(p: &[BigInt], a: &BigInt, s: i64) -> i8 {
    let d = p.len().saturating_sub(1);
    let mut acc = BigInt::zero();
    for (i, c) in p.iter().enumerate().rev() {
        acc = acc * a + (c << (s as usize * (d - i)));
    }
    if acc.is_positive() {
        1
    } else if acc.is_negative() {
        -1
    } else {
        0
    }
}

fn sign_changes_dyadic(seq: &[Vec<BigInt>], a: &BigInt, s: i64) -> usize {
    let signs: Vec<i8> = seq.iter().map(|p| sign_at_dyadic(p, a, s)).filter(|&x| x != 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Characteristic polynomial det(xI − A) of an integer matrix (Faddeev–LeVerrier).
pub fn char_poly(a: &[Vec<BigInt>]) -> IntPoly {
    let n = a.len();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut m: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n]; n];
    for i in 1..=n {
        // M_i = A·M_{i−1} + c_{n−i+1}·I
        let mut next = vec![vec![BigInt::zero(); n]; n];
        for r in 0..n {
            for c in 0..n {
                let mut s = BigInt::zero();
                for l in 0..n {
                    s += &a[r][l] * &m[l][c];
                }
                next[r][c] = s;
            }
            next[r][r] += &coeffs[n - i + 1];
        }
        m = next;
        let mut tr = BigInt::zero();
        for r in 0..n {
            for l in 0..n {
                tr += &a[r][l] * &m[l][r];
            }
        }
        coeffs[n - i] = -tr / BigInt::from(i);
    }
    IntPoly { coeffs }
}
