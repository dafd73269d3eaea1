use std::collections::BTreeMap;

use lowlying::combinatorics::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn r(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

// λ(p^m) from the level-one Hecke relation λ(p)λ(p^m) = λ(p^{m+1}) + λ(p^{m−1}).
fn hecke_powers(x: &BigRational, len: usize) -> Vec<BigRational> {
    let mut v = vec![BigRational::one(), x.clone()];
    while v.len() < len {
        let m = v.len() - 1;
        let next = x * &v[m] - &v[m - 1];
        v.push(next);
    }
    v.truncate(len);
    v
}

fn pow(x: &BigRational, n: u32) -> BigRational {
    (0..n).fold(BigRational::one(), |a, _| a * x)
}

#[test]
fn power_expansion_examples() {
    let c = |n: u32| -> BTreeMap<u32, i64> {
        power_coeffs(n).coeffs.iter().map(|(&m, v)| (m, i64::try_from(v).unwrap())).collect()
    };
    assert_eq!(c(1), BTreeMap::from([(1, 1)]));
    assert_eq!(c(2), BTreeMap::from([(0, 1), (2, 1)]));
    assert_eq!(c(3), BTreeMap::from([(1, 2), (3, 1)]));
    // Catalan numbers sit at m = 0 for even n
    assert_eq!(c(8)[&0], 14);
}

#[test]
fn power_expansion_against_hecke_recurrence() {
    let seeds: Vec<BigRational> = (0..20).map(|i| r(7 * i - 61, 13 + 2 * i)).collect();
    for n in 0..=14u32 {
        let coeffs = power_coeffs(n);
        for x in &seeds {
            let lam = hecke_powers(x, n as usize + 1);
            let s: BigRational =
                coeffs.coeffs.iter().map(|(&m, c)| BigRational::from_integer(c.clone()) * &lam[m as usize]).sum();
            assert_eq!(s, pow(x, n), "n = {n}");
        }
    }
}

#[test]
fn multinomial_examples() {
    assert_eq!(multinomial_factor(&Composition::new(vec![1, 1]).unwrap()), r(1, 1));
    assert_eq!(multinomial_factor(&Composition::new(vec![3]).unwrap()), r(1, 1));
    assert_eq!(multinomial_factor(&Composition::new(vec![2, 2]).unwrap()), r(3, 1));
}

#[test]
fn tuple_count_examples() {
    assert_eq!(tuple_count_oracle(&[(2, 1), (3, 1)]), r(1, 1));
    assert_eq!(tuple_count_oracle(&[(2, 2)]), r(1, 1));
    // 3 ordered tuples over 2 orderings of the distinct primes
    assert_eq!(tuple_count_oracle(&[(2, 2), (3, 1)]), r(3, 2));
}

// Every multiset over {2, 3, 5, 7} with total multiplicity t ≤ 6.
#[test]
fn multinomial_matches_enumeration() {
    let primes = [2u64, 3, 5, 7];
    for t in 1..=6u32 {
        for c in compositions(t) {
            if c.len() > primes.len() {
                continue;
            }
            let ms: Vec<(u64, u32)> = c.parts().iter().zip(primes).map(|(&n, p)| (p, n)).collect();
            assert_eq!(multinomial_factor(&c), tuple_count_oracle(&ms), "{:?}", c.parts());
        }
    }
}

#[test]
fn gaussian_moment_examples() {
    let s = r(7, 3);
    assert_eq!(gaussian_moment(2, &s), s);
    assert_eq!(gaussian_moment(3, &s), BigRational::zero());
    assert_eq!(gaussian_moment(6, &r(1, 1)), r(15, 1));
}

#[test]
fn frak_c_examples() {
    assert_eq!(frak_c(1, &r(5, 2), &r(1, 3)), BigRational::zero());
    assert_eq!(frak_c(2, &r(5, 2), &r(1, 3)), r(1, 3));
    assert_eq!(frak_c(4, &r(3, 1), &r(7, 1)), r(147, 1));
    // no division by φ(0)
    assert_eq!(frak_c(4, &r(0, 1), &r(7, 1)), r(147, 1));
    assert!(frak_c_regrouped(4, &r(0, 1), &r(7, 1)).is_err());
}

// The displayed triple sum without φ(0)^{n−t} is not a centered moment.
#[test]
fn printed_sum_differs() {
    let (p0, s2) = (r(5, 2), r(1, 3));
    assert_eq!(frak_c_as_printed(1, &p0, &s2), r(1, 1) - &p0);
    assert_eq!(frak_c_as_printed(2, &p0, &s2), pow(&(r(1, 1) - &p0), 2) + &s2);
    assert_eq!(frak_c_as_printed(2, &r(1, 1), &s2), s2);
}

#[test]
fn frak_c_is_gaussian_on_grid() {
    let grid = [r(-3, 2), r(0, 1), r(1, 3), r(2, 1), r(9, 4)];
    let vars = [r(0, 1), r(1, 6), r(1, 150), r(7, 1), r(5, 2)];
    for n in 0..=12u32 {
        for p in &grid {
            for v in &vars {
                let want = gaussian_moment(n, v);
                assert_eq!(frak_c(n, p, v), want, "n = {n}, φ(0) = {p}, σ² = {v}");
                if !p.is_zero() {
                    assert_eq!(frak_c_regrouped(n, p, v).unwrap(), want);
                }
            }
        }
    }
}

#[test]
fn switch_examples() {
    let triv = |_: u64| 1i8;
    let two = switch_check(&[(1, 1), (2, 0)], &[2, 3, 5], &triv).unwrap();
    assert!(two.identity_holds());
    assert_eq!(two.difference, two.bound);
    let single = switch_check(&[(1, 1), (1, 1)], &[2], &triv).unwrap();
    assert_eq!(single.distinct_sum, BigRational::zero());
    assert_eq!(single.product, single.coincidence_sum);
    let three = switch_check(&[(2, 0), (2, 0), (2, 0)], &[2, 3], &triv).unwrap();
    assert!(three.identity_holds());
    assert!(three.strict());
    assert!(switch_check(&[(1, 1)], &[2, 3], &triv).is_err());
    assert!(switch_check(&[(1, 1), (2, 1)], &[2, 3], &triv).is_err());
}

#[test]
fn switch_identities_exhaustive() {
    let chi = |q: u64| -> i8 {
        match q % 4 {
            1 => 1,
            3 => -1,
            _ => 0,
        }
    };
    let pairs: Vec<(u32, u32)> =
        (1..=4u32).flat_map(|n| (0..=n).filter(move |m| (n - m) % 2 == 0 && n + m <= 4).map(move |m| (n, m))).collect();
    let primes = [2u64, 3, 5, 7];
    for l in 2..=4usize {
        let mut idx = vec![0usize; l];
        loop {
            let ps: Vec<(u32, u32)> = idx.iter().map(|&i| pairs[i]).collect();
            for c in [&chi as &dyn Fn(u64) -> i8, &|_| 1] {
                let s = switch_check(&ps, &primes, c).unwrap();
                assert!(s.identity_holds(), "{ps:?}");
                if ps.iter().all(|&(_, m)| m % 2 == 0) {
                    // all factors positive: pairwise over-count bounds the coincidences
                    assert!(s.bound_holds(), "{ps:?}");
                    if l == 2 {
                        assert_eq!(s.difference, s.bound);
                    }
                }
            }
            let mut pos = 0;
            while pos < l {
                idx[pos] += 1;
                if idx[pos] < pairs.len() {
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
}

proptest! {
    #[test]
    fn frak_c_gaussian_random(n in 0u32..13, a in -50i64..50, b in 1i64..30, c in 0i64..50, d in 1i64..30) {
        let p = r(a, b);
        let v = r(c, d);
        prop_assert_eq!(frak_c(n, &p, &v), gaussian_moment(n, &v));
    }

    #[test]
    fn power_expansion_random_seed(n in 0u32..12, a in -40i64..40, b in 1i64..20) {
        let x = r(a, b);
        let lam = hecke_powers(&x, n as usize + 1);
        let s: BigRational = power_coeffs(n)
            .coeffs
            .iter()
            .map(|(&m, c)| BigRational::from_integer(c.clone()) * &lam[m as usize])
            .sum();
        prop_assert_eq!(s, pow(&x, n));
    }

    #[test]
    fn power_coeffs_nonnegative_with_parity(n in 0u32..30) {
        for (&m, c) in &power_coeffs(n).coeffs {
            prop_assert!(m <= n && (n - m) % 2 == 0);
            prop_assert!(*c > BigInt::zero());
        }
    }
}
