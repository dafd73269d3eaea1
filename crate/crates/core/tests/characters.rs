use lowlying::characters::*;
use proptest::prelude::*;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

// Every homomorphism (Z/D)* → {±1}, found by assigning signs to units one at a
// time and closing under multiplication.
fn brute_real_characters(d: u64) -> Vec<Vec<i8>> {
    fn close(v: &mut [i8]) -> bool {
        let d = v.len();
        loop {
            let mut changed = false;
            for a in 0..d {
                if v[a] == 0 || v[a] == 2 {
                    continue;
                }
                for b in 0..d {
                    if v[b] == 0 || v[b] == 2 {
                        continue;
                    }
                    let ab = (a * b) % d;
                    let want = v[a] * v[b];
                    if v[ab] == 2 {
                        v[ab] = want;
                        changed = true;
                    } else if v[ab] != want {
                        return false;
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }
    fn extend(v: Vec<i8>, out: &mut Vec<Vec<i8>>) {
        match v.iter().position(|&x| x == 2) {
            None => out.push(v),
            Some(u) => {
                for s in [1i8, -1] {
                    let mut w = v.clone();
                    w[u] = s;
                    if close(&mut w) {
                        extend(w, out);
                    }
                }
            }
        }
    }
    // 2 marks an unassigned unit
    let mut v: Vec<i8> = (0..d).map(|m| if gcd(m, d) == 1 { 2 } else { 0 }).collect();
    v[(1 % d) as usize] = 1;
    let mut out = Vec::new();
    if close(&mut v) {
        extend(v, &mut out);
    }
    out
}

// χ is induced from e < D when it is constant on each class mod e among units.
fn brute_primitive(v: &[i8]) -> bool {
    let d = v.len() as u64;
    (1..d).filter(|e| d % e == 0).all(|e| {
        let mut seen = vec![0i8; e as usize];
        for a in 0..d {
            if v[a as usize] == 0 {
                continue;
            }
            let c = (a % e) as usize;
            if seen[c] == 0 {
                seen[c] = v[a as usize];
            } else if seen[c] != v[a as usize] {
                return true;
            }
        }
        false
    })
}

#[test]
fn enumeration_matches_brute_force() {
    for d in 1..=60u64 {
        let mut want: Vec<Vec<i8>> = brute_real_characters(d).into_iter().filter(|t| brute_primitive(t)).collect();
        let mut got: Vec<Vec<i8>> = enumerate_real_primitive(d).iter().map(|c| c.values().to_vec()).collect();
        want.sort();
        got.sort();
        assert_eq!(got, want, "D = {d}");
    }
}

#[test]
fn small_moduli() {
    let c1 = enumerate_real_primitive(1);
    assert_eq!(c1.len(), 1);
    assert!(c1[0].is_trivial());
    let c4 = enumerate_real_primitive(4);
    assert_eq!(c4[0].values(), &[0, 1, 0, -1]);
    assert!(enumerate_real_primitive(6).is_empty());
}

#[test]
fn gauss_sum_norm_and_square() {
    for d in 1..=500u64 {
        for chi in enumerate_real_primitive(d) {
            let t = gauss_sum::<f64>(&chi).unwrap();
            let df = d as f64;
            assert!((t.norm_sqr() / df - 1.0).abs() < 1e-12, "D = {d}");
            let (re, im) = t.square();
            assert!((re - chi.parity() as f64 * df).abs() < 1e-12 * df.max(1.0), "D = {d}");
            assert!(im.abs() < 1e-12 * df.max(1.0), "D = {d}");
        }
    }
}

#[test]
fn gauss_sum_examples() {
    let t4 = gauss_sum::<f64>(&enumerate_real_primitive(4)[0]).unwrap();
    assert!(t4.re.abs() < 1e-14 && (t4.im - 2.0).abs() < 1e-14);
    let t5 = gauss_sum::<f64>(&enumerate_real_primitive(5)[0]).unwrap();
    assert!((t5.square().0 - 5.0).abs() < 1e-13);
    // τ(χ₅) = √5 for the even character of conductor 5
    assert!((t5.re - 5f64.sqrt()).abs() < 1e-13 && t5.im.abs() < 1e-13);
}

#[test]
fn sign_examples() {
    let triv = DirichletCharacter::trivial();
    assert_eq!(fe_sign(&triv, 12).unwrap(), 1);
    assert_eq!(fe_sign(&triv, 18).unwrap(), -1);
    let c4 = &enumerate_real_primitive(4)[0];
    assert_eq!(fe_sign(c4, 16).unwrap(), -1);
    assert!(!in_first_family(c4, 16).unwrap());
    let c5 = &enumerate_real_primitive(5)[0];
    assert_eq!(fe_sign(c5, 22).unwrap(), -1);
    assert_eq!(fe_sign(c5, 24).unwrap(), 1);
    assert!(fe_sign(c5, 13).is_err());
}

#[test]
fn non_primitive_rejected() {
    let principal = DirichletCharacter::from_table(vec![0, 1, 0, 0, 0, 1]).unwrap();
    assert!(!principal.is_primitive());
    assert!(gauss_sum::<f64>(&principal).is_err());
    assert!(fe_sign(&principal, 12).is_err());
}

proptest! {
    #[test]
    fn completely_multiplicative_and_periodic(d in 1u64..400, a in -1000i64..1000, b in -1000i64..1000) {
        for chi in enumerate_real_primitive(d) {
            prop_assert_eq!(chi.value(a * b), chi.value(a) * chi.value(b));
            prop_assert_eq!(chi.value(a + d as i64), chi.value(a));
            prop_assert_eq!(chi.value(a) == 0, gcd(a.unsigned_abs(), d) != 1);
        }
    }

    #[test]
    fn fe_sign_is_unit(d in 1u64..200, half in 6u32..80) {
        for chi in enumerate_real_primitive(d) {
            let s = fe_sign(&chi, 2 * half).unwrap();
            prop_assert!(s == 1 || s == -1);
            let ik = if half % 2 == 0 { 1 } else { -1 };
            prop_assert_eq!(s, ik * chi.parity());
        }
    }

    #[test]
    fn tables_validated(values in proptest::collection::vec(-1i8..=1, 1..13)) {
        if let Ok(chi) = DirichletCharacter::from_table(values.clone()) {
            let d = values.len() as i64;
            for a in 0..d {
                for b in 0..d {
                    prop_assert_eq!(chi.value(a * b), chi.value(a) * chi.value(b));
                }
            }
        }
    }
}
