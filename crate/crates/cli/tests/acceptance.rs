//! Acceptance run: one line per criterion.
//!
//! Runs without the libtest harness so the lines reach stdout. Criteria whose
//! failure is a documented discrepancy are listed in `KNOWN_FAILING`; the
//! process fails if any other criterion fails or if a listed one starts passing.

use std::collections::BTreeMap;
use std::time::Instant;

use lowlying::characters::{enumerate_real_primitive, fe_sign, gauss_sum};
use lowlying::combinatorics::{
    compositions, frak_c, gaussian_moment, multinomial_factor, power_coeffs, ratio, switch_check, tuple_count_oracle,
};
use lowlying::lvalues::{calibrate, completed_l, verify_calibration, DirectOptions, SymSquareOptions};
use lowlying::modforms::eigenforms;
use lowlying::moments::{
    centered_moment, kr_sum_formula, monotone_toward_zero, monotone_toward_zero_with, trace_main_term,
    weighted_average_eigenvalue, FamilySnapshot,
};
use lowlying::primesums::{lemma_sum, PrimeTable};
use lowlying::rmt::{centered_moment_of, statistic_samples};
use lowlying::scalar::set_default_digits;
use lowlying::testfuncs::{fejer, SymmetryGroup};
use lowlying::{Mp, Real};
use lowlying_cli::pipelines::{comb_grid, ladder};
use lowlying_cli::{run, ExperimentConfig, RunReport};
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIGITS: u32 = 50;
const KLADDER: [u32; 5] = [60, 80, 100, 120, 140];
const KNOWN_FAILING: [u32; 3] = [9, 10, 11];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

// λ(p^j) of a level-one form from λ(p) = x by λ(p)λ(p^j) = λ(p^{j+1}) + λ(p^{j−1}).
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

fn c1_frak_c() -> Outcome {
    let t = Instant::now();
    let (phis, vars) = comb_grid();
    let mut bad = 0;
    for n in 0..=12 {
        for p in &phis {
            for v in &vars {
                if frak_c(n, p, v) != gaussian_moment(n, v) {
                    bad += 1;
                }
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(bad == 0 && secs < 10.0, format!("{bad} mismatches over n ≤ 12 × 25 grid points, {secs:.2} s (limit 10 s)"))
}

fn c2_power_coeffs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let seeds: Vec<BigRational> = (0..20).map(|_| ratio(rng.gen_range(-200..=200), rng.gen_range(1..=60))).collect();
    let mut bad = 0;
    for n in 0..=10u32 {
        let coeffs = power_coeffs(n);
        for x in &seeds {
            let lam = hecke_powers(x, n as usize + 1);
            let s: BigRational =
                coeffs.coeffs.iter().map(|(&m, c)| BigRational::from_integer(c.clone()) * &lam[m as usize]).sum();
            let pow = (0..n).fold(BigRational::one(), |a, _| a * x);
            if s != pow {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{bad} mismatches over n ≤ 10 × 20 random rational seeds"))
}

fn c3_multinomial() -> Outcome {
    let primes = [2u64, 3, 5, 7];
    let (mut checked, mut bad) = (0, 0);
    for t in 1..=6u32 {
        for c in compositions(t).into_iter().filter(|c| c.len() <= primes.len()) {
            let ms: Vec<(u64, u32)> = c.parts().iter().zip(primes).map(|(&n, p)| (p, n)).collect();
            checked += 1;
            if multinomial_factor(&c) != tuple_count_oracle(&ms) {
                bad += 1;
            }
        }
    }
    outcome(bad == 0 && checked > 0, format!("{checked} multisets, {bad} mismatches"))
}

fn c4_switch() -> Outcome {
    let chi4 = |q: u64| -> i8 {
        match q % 4 {
            1 => 1,
            3 => -1,
            _ => 0,
        }
    };
    let pairs: Vec<(u32, u32)> =
        (1..=4u32).flat_map(|n| (0..=n).filter(move |m| (n - m) % 2 == 0 && n + m <= 4).map(move |m| (n, m))).collect();
    let primes = [2u64, 3, 5, 7];
    let (mut cases, mut identity_bad, mut bound_bad) = (0, 0, 0);
    for l in 2..=4usize {
        let mut idx = vec![0usize; l];
        'outer: loop {
            let ps: Vec<(u32, u32)> = idx.iter().map(|&i| pairs[i]).collect();
            for c in [&chi4 as &dyn Fn(u64) -> i8, &|_| 1] {
                let s = switch_check(&ps, &primes, c).expect("valid pairs");
                cases += 1;
                identity_bad += !s.identity_holds() as u32;
                if ps.iter().all(|&(_, m)| m % 2 == 0) && !s.bound_holds() {
                    bound_bad += 1;
                }
            }
            for pos in 0..l {
                idx[pos] += 1;
                if idx[pos] < pairs.len() {
                    continue 'outer;
                }
                idx[pos] = 0;
            }
            break;
        }
    }
    let strict = switch_check(&[(2, 0), (2, 0), (2, 0)], &[2, 3], &|_| 1).expect("valid").strict();
    outcome(
        identity_bad == 0 && bound_bad == 0 && strict,
        format!("{cases} cases, {identity_bad} identity and {bound_bad} bound failures, strict at ℓ = 3: {strict}"),
    )
}

fn c5_gauss_and_vanishing() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for d in 1..=500u64 {
        for chi in enumerate_real_primitive(d) {
            let tau = gauss_sum::<Mp>(&chi).expect("primitive");
            let (re, im) = tau.square();
            let dev = ((re - Mp::from_i64(chi.parity() as i64 * d as i64)).abs() + im.abs()).to_f64();
            worst = worst.max(dev);
            count += 1;
        }
    }
    let (mut vanishing, mut vanish_bad) = (0, 0);
    for k in [12u32, 16, 18, 20, 22, 26] {
        let f = eigenforms(k, 600).expect("dim 1").remove(0);
        for d in [4u64, 5, 8] {
            for chi in enumerate_real_primitive(d) {
                if fe_sign(&chi, k).expect("even k") == -1 {
                    let v = completed_l::<Mp>(&f, &chi).expect("enough terms");
                    vanishing += 1;
                    vanish_bad += (v.value.abs() > v.tail_bound) as u32;
                }
            }
        }
    }
    outcome(
        worst < 1e-12 && vanish_bad == 0 && vanishing > 0,
        format!(
            "{count} characters D ≤ 500, max |τ² − χ(−1)D| = {worst:.1e} (tol 1e-12); {vanishing} sign −1 pairs, {vanish_bad} not vanishing"
        ),
    )
}

fn c6_norms() -> Outcome {
    let delta = eigenforms(12, 200).expect("Δ").remove(0);
    let direct = DirectOptions::default();
    let sym = SymSquareOptions::default();
    let cal = calibrate::<Mp>(&delta, &direct, &sym).expect("calibration");
    let mut forms = vec![delta];
    for k in (16..=26).step_by(2) {
        forms.extend(eigenforms(k, 200).expect("forms"));
    }
    match verify_calibration(&cal, &forms, &direct, &sym) {
        Ok(drifts) => {
            let worst = drifts.iter().map(|d| d.1).fold(0.0, f64::max);
            outcome(worst <= 1e-8, format!("{} forms k = 12..26, max relative drift {worst:.2e} (tol 1e-8)", drifts.len()))
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c7_trace(fams: &[FamilySnapshot<Mp>]) -> Outcome {
    let triv = lowlying::characters::DirichletCharacter::trivial();
    let floor = 10f64.powi(-(DIGITS as i32));
    let mut parts = Vec::new();
    let mut ok = true;
    for m in [2u64, 3, 5, 6] {
        let main: Mp = trace_main_term(m, &triv, 1);
        let gaps: Vec<f64> = fams
            .iter()
            .map(|f| (weighted_average_eigenvalue(f, m).expect("non-degenerate") - main.clone()).abs().to_f64())
            .collect();
        let dec = monotone_toward_zero_with(&gaps, floor);
        ok &= dec;
        parts.push(format!("m={m}: {} → {:.1e}{}", sci(gaps[0]), gaps[gaps.len() - 1], if dec { "" } else { " (not monotone)" }));
    }
    outcome(ok, parts.join("; "))
}

fn c8_kr(fams: &[FamilySnapshot<Mp>]) -> Outcome {
    let mut worst = 0.0f64;
    for f in fams {
        for m in 1..=3 {
            let r = kr_sum_formula(f, m).expect("sum formula");
            worst = worst.max(r.normalized_error.abs().to_f64());
        }
    }
    outcome(worst <= 1.0, format!("max |normalized error| = {worst:.3e} over m ≤ 3 (bound 1)"))
}

fn c9_prime_sums() -> Outcome {
    let t = Instant::now();
    let phi = fejer(0.45).expect("β");
    let ladder = [1e4, 1e6, 1e8];
    let table = PrimeTable::new(1e8f64.powf(0.45) as u64 + 1);
    let triv = lowlying::characters::DirichletCharacter::trivial();
    let chi4 = lowlying::characters::character_by_label(-4).expect("χ₋₄");
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, m, n, chi) in [("(0,2)", 0, 2, &triv), ("(1,1) trivial", 1, 1, &triv), ("(1,1) χ₋₄", 1, 1, &chi4), ("(2,2)", 2, 2, &triv)] {
        let res: Vec<_> =
            ladder.iter().map(|&q| lemma_sum(m, n, chi, &phi, q, 1, chi.modulus(), &table).expect("sum")).collect();
        let dev: Vec<f64> = res.iter().map(|r| r.deviation).collect();
        let dec = monotone_toward_zero(&dev);
        ok &= dec;
        let mut s = format!("{label} → {:.5}: {}", res[0].predicted_limit, if dec { "ok" } else { "not decreasing" });
        if (m, n) == (0, 2) {
            let alt: Vec<f64> = res.iter().map(|r| (r.value - phi.sigma2() / 2.0).abs()).collect();
            s += &format!(
                " [values {:.5}, {:.5}, {:.5}; vs σ²/2 = {:.5} deviations decrease: {}]",
                res[0].value,
                res[1].value,
                res[2].value,
                phi.sigma2() / 2.0,
                monotone_toward_zero(&alt)
            );
        }
        parts.push(s);
    }
    let secs = t.elapsed().as_secs_f64();
    outcome(ok && secs < 300.0, format!("{}; {secs:.1} s", parts.join("; ")))
}

fn sci(x: f64) -> String {
    format!("{x:.1e}")
}

fn c10_moments(fams: &[FamilySnapshot<Mp>]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, beta) in [(1u32, 0.45), (2, 0.2), (3, 0.16)] {
        let phi = fejer(beta).expect("β");
        let rep = centered_moment(fams, &phi, n).expect("moment");
        let vals: Vec<String> = rep.rows.iter().map(|r| format!("{:.3e}", r.computed)).collect();
        ok &= rep.trend_ok && rep.skipped.is_empty();
        let mut s = format!("n={n} β={beta}: [{}] → {:.3e} trend {}", vals.join(", "), rep.predicted, if rep.trend_ok { "ok" } else { "no" });
        if n == 2 {
            let end = rep.computed().expect("rows");
            let rel = (end - rep.predicted).abs() / rep.predicted;
            ok &= rel <= 0.25;
            s += &format!(
                ", endpoint off by {:.0}% (limit 25%), 2σ² = {:.3e} off by {:.0}%",
                100.0 * rel,
                2.0 * rep.predicted,
                100.0 * (end - 2.0 * rep.predicted).abs() / (2.0 * rep.predicted)
            );
        }
        parts.push(s);
    }
    outcome(ok, parts.join("; "))
}

fn c11_rmt() -> Outcome {
    let t = Instant::now();
    let phi = fejer(0.2).expect("β");
    let s2 = phi.sigma2();
    let mut ok = true;
    let mut parts = Vec::new();
    let mut second = Vec::new();
    for g in [SymmetryGroup::SoEven, SymmetryGroup::Sp] {
        let v = statistic_samples(g, 100, &phi, 10_000, 42).expect("samples");
        let (m2, se2) = centered_moment_of(&v, 2);
        let (m3, se3) = centered_moment_of(&v, 3);
        let z2 = (m2 - s2) / se2;
        let z3 = m3 / se3;
        ok &= z2.abs() <= 3.0 && z3.abs() <= 3.0;
        parts.push(format!(
            "{}: n=2 {m2:.5}±{se2:.5} ({z2:+.1}σ vs 1/150; {:+.1}σ vs 2σ² = 1/75), n=3 {m3:.2e}±{se3:.1e} ({z3:+.1}σ)",
            g.name(),
            (m2 - 2.0 * s2) / se2
        ));
        second.push((m2, se2));
    }
    let (a, b) = (second[0], second[1]);
    let zd = (a.0 - b.0) / (a.1 * a.1 + b.1 * b.1).sqrt();
    ok &= zd.abs() <= 3.0;
    let secs = t.elapsed().as_secs_f64();
    ok &= secs < 600.0;
    outcome(ok, format!("{}; so-even − sp = {zd:+.1}σ; {secs:.0} s", parts.join("; ")))
}

fn light_configs() -> Vec<BTreeMap<String, String>> {
    let raw = [
        "command=gauss-check;dmax=200",
        "command=hecke-table;k=36;nmax=40",
        "command=weights;k=24;chi=5",
        "command=comb-verify;nmax=12",
        "command=prime-sums;case=1,1;chi=-4;beta=0.45;qladder=1e4,1e6",
        "command=trace-check;m=3;kladder=24,28,32",
        "command=moments;n=2;beta=0.2;kladder=24,28,32;digits=30",
        "command=rmt-compare;group=sp;size=20;samples=1000;beta=0.2;n=2;seed=9",
    ];
    raw.iter()
        .map(|s| s.split(';').map(|kv| kv.split_once('=').expect("kv")).map(|(k, v)| (k.to_string(), v.to_string())).collect())
        .collect()
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut differing = Vec::new();
    let mut runs = 0;
    for map in light_configs() {
        let mut outputs = Vec::new();
        for (i, threads) in [1usize, 3].into_iter().enumerate() {
            let c = ExperimentConfig::from_map(&map).expect("valid config");
            let out = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("pool")
                .install(|| run(&c))
                .expect("pipeline");
            let report = RunReport::new(&c, &out);
            let sub = dir.path().join(format!("{}-{i}", c.command.name()));
            let w = lowlying_cli::write_outputs(&sub, &report, &out).expect("write");
            outputs.push((std::fs::read(w.data).expect("data"), std::fs::read(w.summary).expect("summary")));
            runs += 1;
        }
        if outputs[0] != outputs[1] {
            differing.push(map["command"].clone());
        }
    }
    set_default_digits(DIGITS);
    outcome(
        differing.is_empty(),
        format!("{runs} runs of 8 pipelines, 1 and 3 threads; differing: {differing:?}"),
    )
}

fn main() {
    set_default_digits(DIGITS);
    let start = Instant::now();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut record = |id: u32, name: &'static str, o: Outcome| {
        let known = KNOWN_FAILING.contains(&id);
        let tag = match (o.passed, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known, see decisions ledger)",
            (false, false) => "FAIL",
        };
        println!("criterion {id:>2} [{tag}] {name}: {}", o.detail);
        results.push((id, name, o));
    };
    record(1, "exact combinatorial identity", c1_frak_c());
    record(2, "power-expansion coefficients", c2_power_coeffs());
    record(3, "multinomial factor", c3_multinomial());
    record(4, "sum/product switch", c4_switch());
    record(5, "Gauss sums and forced vanishing", c5_gauss_and_vanishing());
    record(6, "Petersson norm cross-validation", c6_norms());

    let t = Instant::now();
    let triv = lowlying::characters::DirichletCharacter::trivial();
    let fams = ladder(&KLADDER, &triv, 1, DIGITS).expect("ladder");
    let ladder_secs = t.elapsed().as_secs_f64();
    let c7 = c7_trace(&fams);
    let secs7 = t.elapsed().as_secs_f64();
    record(
        7,
        "weighted trace formula trend",
        outcome(c7.passed && secs7 < 1800.0, format!("{}; {secs7:.0} s incl. ladder {ladder_secs:.0} s", c7.detail)),
    );
    record(8, "sum formula error bounded", c8_kr(&fams));
    record(9, "prime-sum limits", c9_prime_sums());
    record(10, "centered moments at desk scale", c10_moments(&fams));
    record(11, "random-matrix moments", c11_rmt());
    record(12, "determinism", c12_determinism());

    let unexpected: Vec<u32> =
        results.iter().filter(|(id, _, o)| o.passed == KNOWN_FAILING.contains(id)).map(|(id, _, _)| *id).collect();
    let passed = results.iter().filter(|r| r.2.passed).count();
    println!("{passed}/{} criteria pass; total {:.0} s", results.len(), start.elapsed().as_secs_f64());
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
