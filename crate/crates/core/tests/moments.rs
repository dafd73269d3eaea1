use lowlying::characters::{character_by_label, DirichletCharacter};
use lowlying::lvalues::DirectOptions;
use lowlying::moments::*;
use lowlying::primesums::simple_sieve;
use lowlying::scalar::{digits_to_bits, scoped_bits};
use lowlying::testfuncs::{fejer, piecewise_linear, TestFunction};
use lowlying::{Error, Real};
use proptest::prelude::*;

fn direct_family(k: u32, chi: &DirichletCharacter, r: u64) -> lowlying::Result<FamilySnapshot<f64>> {
    let mut opts = FamilyOptions::new(NormSource::Direct(DirectOptions { digits: 30, ..DirectOptions::default() }));
    opts.digits = 30;
    build_family(k, chi, r, &opts)
}

// Explicit formula written out again, with λ(p²) = λ(p)² − 1 from the Hecke
// relation instead of the stored multiplicative extension.
fn density_by_hand(fam: &FamilySnapshot<f64>, idx: usize, phi: &TestFunction<f64>) -> f64 {
    let log_q = fam.q.ln();
    let f = &fam.forms[idx];
    let mut d = phi.phi_hat0() + phi.phi0() / 2.0;
    for p in simple_sieve(fam.q.powf(phi.beta()) as u64) {
        let lp = (p as f64).ln();
        let lam = f.lambda(p as usize).to_f64();
        d -= 2.0 * lam * phi.phi_hat(&(lp / log_q)) * lp / ((p as f64).sqrt() * log_q);
        d -= 2.0 * (lam * lam - 1.0) * phi.phi_hat(&(2.0 * lp / log_q)) * lp / (p as f64 * log_q);
    }
    d
}

#[test]
fn family_construction() {
    let _g = scoped_bits(digits_to_bits(30));
    let triv = DirichletCharacter::trivial();
    let f12 = direct_family(12, &triv, 1).unwrap();
    assert_eq!(f12.forms.len(), 1);
    assert_eq!(f12.q, 144.0);
    assert!(f12.weights[0].value > 0.0);
    assert!(!f12.is_degenerate());

    assert!(matches!(direct_family(2, &triv, 1), Err(Error::EmptyFamily { weight: 2 })));
    assert!(matches!(direct_family(14, &triv, 1), Err(Error::EmptyFamily { .. })));
    assert!(direct_family(13, &triv, 1).is_err());
    let chi5 = character_by_label(5).unwrap();
    assert!(matches!(direct_family(12, &chi5, 10), Err(Error::NotCoprime { r: 10, modulus: 5, gcd: 5 })));

    let chi4 = character_by_label(-4).unwrap();
    match direct_family(12, &chi4, 1) {
        Err(Error::Rejected(msg)) => assert!(msg.contains("fe_sign")),
        other => panic!("{other:?}"),
    }
    let mut opts = FamilyOptions::new(NormSource::Direct(DirectOptions { digits: 30, ..DirectOptions::default() }));
    opts.digits = 30;
    opts.allow_vanishing = true;
    let vanishing: FamilySnapshot<f64> = build_family(12, &chi4, 1, &opts).unwrap();
    assert_eq!(vanishing.fe_sign, -1);
    assert!(vanishing.is_degenerate());
    assert!(matches!(weighted_average_eigenvalue(&vanishing, 2), Err(Error::DegenerateWeights(_))));
}

#[test]
fn weighted_average_basics() {
    let _g = scoped_bits(digits_to_bits(30));
    let triv = DirichletCharacter::trivial();
    let fam = direct_family(24, &triv, 1).unwrap();
    assert_eq!(fam.forms.len(), 2);
    assert!((weighted_average_eigenvalue(&fam, 1).unwrap() - 1.0).abs() < 1e-14);

    // dim 1: the ratio is λ(m) whatever the weight
    let mut one = direct_family(16, &triv, 1).unwrap();
    for m in [2u64, 3, 7, 12] {
        let lam = one.forms[0].lambda_ext(m).unwrap().to_f64();
        let a = weighted_average_eigenvalue(&one, m).unwrap();
        assert!((a - lam).abs() <= 1e-14 * lam.abs().max(1.0));
        for c in [4.0, 37.5] {
            for w in &mut one.weights {
                w.value *= c;
                w.tail_bound *= c;
            }
            let b = weighted_average_eigenvalue(&one, m).unwrap();
            // a power of two rescales without rounding
            if c == 4.0 {
                assert_eq!(b, a);
            } else {
                assert!((b - a).abs() <= 1e-15 * a.abs());
            }
            for w in &mut one.weights {
                w.value /= c;
                w.tail_bound /= c;
            }
        }
    }
}

#[test]
fn trace_main_term_examples() {
    let triv = DirichletCharacter::trivial();
    let chi4 = character_by_label(-4).unwrap();
    assert_eq!(trace_main_term::<f64>(1, &triv, 1), 1.0);
    assert!((trace_main_term::<f64>(6, &triv, 1) - 6f64.sqrt().recip()).abs() < 1e-16);
    assert_eq!(trace_main_term::<f64>(6, &chi4, 1), 0.0);
    assert!((trace_main_term::<f64>(2, &triv, 1) - 0.7071067811865476).abs() < 1e-15);
    // (r, m) = 2, where the two main-term forms part ways
    assert!((trace_main_term::<f64>(2, &triv, 2) - 3.0 / 2f64.sqrt()).abs() < 1e-15);
    let u = trace_main_term_unsimplified::<f64>(2, &triv, 2);
    // d = 1: σ₁((2, 4)) = 3; d = 2: 2·σ₁((2, 1)) = 2; over σ₁(2) = 3
    assert!((u - 5.0 / (3.0 * 2f64.sqrt())).abs() < 1e-15);
}

#[test]
fn sum_formula_signs_and_vanishing() {
    let _g = scoped_bits(digits_to_bits(30));
    let triv = DirichletCharacter::trivial();
    let fam = direct_family(24, &triv, 1).unwrap();
    let rep = kr_sum_formula(&fam, 1).unwrap();
    assert!(rep.main > 0.0);
    assert!(rep.normalized_error.abs() <= 1.0, "{rep:?}");

    let chi4 = character_by_label(-4).unwrap();
    let mut opts = FamilyOptions::new(NormSource::Direct(DirectOptions { digits: 30, ..DirectOptions::default() }));
    opts.digits = 30;
    opts.allow_vanishing = true;
    let v: FamilySnapshot<f64> = build_family(12, &chi4, 1, &opts).unwrap();
    let rep = kr_sum_formula(&v, 1).unwrap();
    assert_eq!(rep.main, 0.0);
    assert!(rep.lhs.abs() < 1e-20, "{}", rep.lhs);

    let chi5 = character_by_label(5).unwrap();
    let f5 = direct_family(12, &chi5, 1).unwrap();
    assert_eq!(f5.fe_sign, 1);
    assert_eq!(kr_sum_formula(&f5, 5).unwrap().main, 0.0);
}

// Σw over the closed-form main term tends to 1 once the error shape is small.
#[test]
fn sum_formula_anchor_tends_to_one() {
    let _g = scoped_bits(digits_to_bits(30));
    let triv = DirichletCharacter::trivial();
    let mut gaps = Vec::new();
    for k in [40u32, 48, 56] {
        let fam = direct_family(k, &triv, 1).unwrap();
        let rep = kr_sum_formula(&fam, 1).unwrap();
        assert!(!rep.below_crossover, "k = {k}");
        assert!(rep.normalized_error.abs() <= 1.0, "k = {k}");
        gaps.push((rep.lhs / rep.main - 1.0).abs());
    }
    assert!(monotone_toward_zero(&gaps), "{gaps:?}");
    assert!(gaps[2] < 1e-6, "{gaps:?}");
}

#[test]
fn density_matches_explicit_formula_by_hand() {
    let _g = scoped_bits(digits_to_bits(30));
    let triv = DirichletCharacter::trivial();
    let phi = fejer(0.45).unwrap();
    for k in [24u32, 36] {
        let fam = direct_family(k, &triv, 1).unwrap();
        let rep = one_level_density(&fam, &phi).unwrap();
        assert_eq!(rep.per_form.len(), fam.forms.len());
        assert!((rep.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        for (i, d) in rep.per_form.iter().enumerate() {
            assert!((d.value - density_by_hand(&fam, i, &phi)).abs() < 1e-12, "k = {k}");
        }
        assert_eq!(rep.predicted_avg, 1.0 - 0.225);
    }
    let chi5 = character_by_label(5).unwrap();
    let fam = direct_family(24, &chi5, 1).unwrap();
    assert_eq!(one_level_density(&fam, &phi).unwrap().predicted_avg, 1.0 + 0.225);
}

#[test]
fn density_is_linear() {
    let _g = scoped_bits(digits_to_bits(30));
    let fam = direct_family(36, &DirichletCharacter::trivial(), 1).unwrap();
    let a = fejer(0.2).unwrap();
    let b = fejer(0.4).unwrap();
    // φ̂_a + φ̂_b is again piecewise linear
    let sum = piecewise_linear(vec![(0.0, 2.0), (0.2, 0.5), (0.4, 0.0)]).unwrap();
    let da = one_level_density(&fam, &a).unwrap();
    let db = one_level_density(&fam, &b).unwrap();
    let ds = one_level_density(&fam, &sum).unwrap();
    for i in 0..fam.forms.len() {
        assert!((ds.per_form[i].value - da.per_form[i].value - db.per_form[i].value).abs() < 1e-12);
    }
    let zero = one_level_density(&fam, &a.zero_like()).unwrap();
    assert!(zero.per_form.iter().all(|d| d.value == 0.0));
    let tripled = one_level_density(&fam, &a.scaled(3.0)).unwrap();
    assert!((tripled.average - 3.0 * da.average).abs() < 1e-12);
}

#[test]
fn density_needs_enough_coefficients() {
    let _g = scoped_bits(digits_to_bits(30));
    let mut fam = direct_family(24, &DirichletCharacter::trivial(), 1).unwrap();
    fam.q = 1e12;
    assert!(matches!(one_level_density(&fam, &fejer(0.45).unwrap()), Err(Error::Precision { .. })));
    assert!(matches!(one_level_density(&fam, &fejer(1.0).unwrap()), Err(Error::Support(_))));
}

#[test]
fn centered_moment_small_ladder() {
    let _g = scoped_bits(digits_to_bits(30));
    let triv = DirichletCharacter::trivial();
    let ladder: Vec<_> = [24u32, 28, 32].iter().map(|&k| direct_family(k, &triv, 1).unwrap()).collect();
    let phi = fejer(0.2).unwrap();
    let m1 = centered_moment(&ladder, &phi, 1).unwrap();
    assert_eq!(m1.predicted, 0.0);
    assert!(m1.rows.iter().all(|r| r.computed.abs() < 1e-14));
    let m2 = centered_moment(&ladder, &phi, 2).unwrap();
    assert!((m2.predicted - 0.04 / 6.0).abs() < 1e-17);
    assert!(m2.rows.iter().all(|r| r.computed >= 0.0));
    assert_eq!(m2.rows.len(), 3);
    // by hand from the per-form densities
    let d = one_level_density(&ladder[2], &phi).unwrap();
    let var: f64 = d.weights.iter().zip(&d.per_form).map(|(w, f)| w * (f.value - d.average).powi(2)).sum();
    assert_eq!(m2.computed(), Some(var));
    assert_eq!(centered_moment(&ladder, &fejer(0.45).unwrap(), 4).unwrap_err().to_string().contains("1/(2n)"), true);
}

#[test]
fn degenerate_families_are_skipped() {
    let _g = scoped_bits(digits_to_bits(30));
    let chi4 = character_by_label(-4).unwrap();
    let mut opts = FamilyOptions::new(NormSource::Direct(DirectOptions { digits: 30, ..DirectOptions::default() }));
    opts.digits = 30;
    opts.allow_vanishing = true;
    let ladder: Vec<FamilySnapshot<f64>> =
        [12u32, 18].iter().map(|&k| build_family(k, &chi4, 1, &opts).unwrap()).collect();
    assert_eq!(ladder[1].fe_sign, 1);
    let rep = centered_moment(&ladder, &fejer(0.2).unwrap(), 2).unwrap();
    assert_eq!(rep.rows.len(), 1);
    assert_eq!(rep.skipped.len(), 1);
    assert_eq!(rep.skipped[0].0, 12);
}

#[test]
fn envelope_examples() {
    let ok = error_envelope_check(0.24, 2, 1, &[40, 80, 160]).unwrap();
    assert!(ok.decreasing && ok.tends_to_zero);
    let bad = error_envelope_check(0.26, 2, 1, &[40, 80, 160]).unwrap();
    assert!(!bad.decreasing && !bad.tends_to_zero);
    assert!(error_envelope_check(0.45, 1, 1, &[40, 80, 160]).unwrap().decreasing);
    // the level direction
    assert!(error_envelope_check(0.24, 2, 101, &[40, 80, 160]).unwrap().decreasing);
    assert!(error_envelope_check(0.2, 0, 1, &[40]).is_err());
}

#[test]
fn monotone_helpers() {
    assert!(monotone_toward_zero(&[0.3, -0.2, 0.1]));
    assert!(!monotone_toward_zero(&[0.3, 0.3]));
    assert!(monotone_toward_zero(&[1e-13, 2e-13, 1e-14]));
    assert!(!monotone_toward_zero_with(&[1e-13, 2e-13], 1e-14));
    assert!(monotone_toward_zero(&[]));
}

proptest! {
    #[test]
    fn main_terms_agree_when_coprime(m in 1u64..500, r in 1u64..200, di in 0usize..4) {
        let chi = [DirichletCharacter::trivial(), character_by_label(-4).unwrap(), character_by_label(5).unwrap(), character_by_label(-3).unwrap()][di].clone();
        let a = trace_main_term::<f64>(m, &chi, r);
        let b = trace_main_term_unsimplified::<f64>(m, &chi, r);
        let g = (1..=m.min(r)).rev().find(|d| m % d == 0 && r % d == 0).unwrap();
        if g == 1 {
            prop_assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn envelope_log_linear(beta in 0.01f64..0.49, k in 12u32..400) {
        let rep = error_envelope_check(beta, 1, 1, &[k]).unwrap();
        let kf = k as f64;
        let want = (kf * beta / 2.0 - beta + 1.0) * 2.0 * kf.ln() - (kf / 2.0 - 1.0) * kf.ln();
        prop_assert!((rep.rows[0].ln_envelope - want).abs() < 1e-9 * want.abs().max(1.0));
    }
}
