//! One pipeline per subcommand. Each returns its data file contents and the
//! checks it ran; nothing here touches the filesystem.

use std::time::Instant;

use anyhow::{Context, Result};
use lowlying::characters::{character_by_label, enumerate_real_primitive, gauss_sum, DirichletCharacter};
use lowlying::combinatorics::{frak_c, gaussian_moment, ratio};
use lowlying::lvalues::{calibrate, DirectOptions, NormCalibration, SymSquareOptions};
use lowlying::modforms::{eigenforms_with, EigenOptions};
use lowlying::moments::{
    build_family, centered_moment, monotone_toward_zero, monotone_toward_zero_with, trace_main_term,
    weighted_average_eigenvalue, FamilyOptions, FamilySnapshot, NormSource,
};
use lowlying::primesums::{lemma_sum, PrimeTable};
use lowlying::rmt::{centered_moment_mc, expected_statistic};
use lowlying::testfuncs::{fejer, kernel_integral};
use lowlying::{Mp, Real};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, ExperimentConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// A hard invariant; failure makes the run fail.
    Hard,
    /// A convergence trend; fails the run only under `--strict`.
    Trend,
    /// A Monte-Carlo comparison; fails the run only under `--strict`.
    Statistical,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, kind: CheckKind, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), kind, passed, detail: detail.into() }
    }
}

/// Everything a pipeline produced.
#[derive(Clone, Debug)]
pub struct RunOutput {
    /// File name of the data artifact, e.g. `moments.csv`.
    pub data_name: String,
    pub data: String,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub diagnostics: Value,
    /// Wall-clock seconds per phase; kept out of the deterministic summary.
    pub timings: Vec<(String, f64)>,
}

struct Timer {
    start: Instant,
    phases: Vec<(String, f64)>,
}

impl Timer {
    fn new() -> Self {
        Timer { start: Instant::now(), phases: Vec::new() }
    }

    fn lap(&mut self, name: &str) {
        let done: f64 = self.phases.iter().map(|p| p.1).sum();
        self.phases.push((name.to_string(), self.start.elapsed().as_secs_f64() - done));
    }

    fn finish(mut self) -> Vec<(String, f64)> {
        let total = self.start.elapsed().as_secs_f64();
        self.phases.push(("total".into(), total));
        self.phases
    }
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn e(x: f64) -> String {
    format!("{x:e}")
}

fn mp(x: &Mp, digits: u32) -> String {
    x.to_sci(digits as usize)
}

pub fn run(c: &ExperimentConfig) -> Result<RunOutput> {
    lowlying::scalar::set_default_digits(c.digits);
    match c.command {
        Command::GaussCheck => gauss_check(c),
        Command::HeckeTable => hecke_table(c),
        Command::Weights => weights(c),
        Command::CombVerify => comb_verify(c),
        Command::PrimeSums => prime_sums(c),
        Command::TraceCheck => trace_check(c),
        Command::Moments => moments(c),
        Command::RmtCompare => rmt_compare(c),
    }
}

fn gauss_check(c: &ExperimentConfig) -> Result<RunOutput> {
    let mut t = Timer::new();
    let rows: Vec<(u64, i8, Mp, Mp, Mp)> = (1..=c.dmax)
        .into_par_iter()
        .map(|d| {
            enumerate_real_primitive(d)
                .into_iter()
                .map(|chi| {
                    let tau = gauss_sum::<Mp>(&chi)?;
                    let (re, im) = tau.square();
                    let dev = (re - Mp::from_i64(chi.parity() as i64 * d as i64)).abs() + im.abs();
                    Ok((d, chi.parity(), tau.re, tau.im, dev))
                })
                .collect::<lowlying::Result<Vec<_>>>()
        })
        .collect::<lowlying::Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    t.lap("gauss sums");
    let worst = rows.iter().map(|r| r.4.to_f64()).fold(0.0, f64::max);
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|(d, p, re, im, dev)| vec![d.to_string(), p.to_string(), mp(re, 20), mp(im, 20), mp(dev, 3)])
        .collect();
    let data = csv_text(&["D", "parity", "tau_re", "tau_im", "tau_sq_minus_chi_minus1_D"], &table)?;
    let checks = vec![Check::new(
        "gauss_sum_square",
        CheckKind::Hard,
        worst < 1e-12,
        format!("{} characters, max |τ² − χ(−1)D| = {worst:e}", rows.len()),
    )];
    Ok(RunOutput {
        data_name: "gauss-check.csv".into(),
        data,
        checks,
        notes: vec![],
        diagnostics: json!({ "characters": rows.len(), "max_deviation": worst }),
        timings: t.finish(),
    })
}

fn hecke_table(c: &ExperimentConfig) -> Result<RunOutput> {
    let mut t = Timer::new();
    let mut opts = EigenOptions::new(c.nmax.max(2));
    opts.digits = c.digits;
    let forms = eigenforms_with(c.k, &opts)?;
    t.lap("eigenforms");
    let mut rows = Vec::new();
    let tol = Mp::from_f64(10f64.powi(-(c.digits as i32) + 10));
    let mut mult = Mp::from_i64(0);
    let mut rec = Mp::from_i64(0);
    for f in &forms {
        for n in 1..=c.nmax {
            rows.push(vec![
                c.k.to_string(),
                f.index().to_string(),
                n.to_string(),
                mp(f.fourier(n), c.digits),
                mp(f.lambda(n), c.digits),
                e(f.residual()),
            ]);
        }
        // multiplicativity on coprime pairs and the prime-power recurrence
        for a in 2..=c.nmax {
            for b in 2..=c.nmax / a {
                if num_integer::gcd(a, b) == 1 {
                    let d = (f.lambda(a * b).clone() - f.lambda(a).clone() * f.lambda(b).clone()).abs();
                    mult = mult.max_of(d);
                }
            }
        }
        for p in lowlying::primesums::simple_sieve(c.nmax as u64) {
            let p = p as usize;
            let mut q = p;
            while q * p <= c.nmax {
                let lower = if q == p { Mp::from_i64(1) } else { f.lambda(q / p).clone() };
                let d = (f.lambda(p).clone() * f.lambda(q).clone() - f.lambda(q * p).clone() - lower).abs();
                rec = rec.max_of(d);
                q *= p;
            }
        }
    }
    t.lap("table");
    let worst_residual = forms.iter().map(|f| f.residual()).fold(0.0, f64::max);
    let checks = vec![
        Check::new(
            "eigen_residual",
            CheckKind::Hard,
            worst_residual <= 10f64.powi(-(c.digits as i32) / 2),
            format!("max relative defect {worst_residual:e}"),
        ),
        Check::new("multiplicativity", CheckKind::Hard, mult <= tol, format!("max |λ(ab) − λ(a)λ(b)| = {}", mult.to_sci(3))),
        Check::new(
            "hecke_recurrence",
            CheckKind::Hard,
            rec <= tol,
            format!("max |λ(p)λ(pʲ) − λ(pʲ⁺¹) − λ(pʲ⁻¹)| = {}", rec.to_sci(3)),
        ),
    ];
    Ok(RunOutput {
        data_name: "hecke-table.csv".into(),
        data: csv_text(&["k", "form_index", "n", "a_n", "lambda_n", "residual"], &rows)?,
        checks,
        notes: vec![],
        diagnostics: json!({ "forms": forms.len() }),
        timings: t.finish(),
    })
}

/// Symmetric-square calibration on Δ against the direct integral.
pub fn delta_calibration(digits: u32) -> Result<NormCalibration<Mp>> {
    let mut eo = EigenOptions::new(200);
    eo.digits = digits;
    let delta = eigenforms_with(12, &eo)?.remove(0);
    let direct = DirectOptions { digits, ..DirectOptions::default() };
    let sym = SymSquareOptions { digits, ..SymSquareOptions::default() };
    Ok(calibrate::<Mp>(&delta, &direct, &sym)?)
}

fn norm_source(k: u32, digits: u32, cal: &Option<NormCalibration<Mp>>) -> NormSource<Mp> {
    let direct = DirectOptions { digits, ..DirectOptions::default() };
    match cal {
        Some(cal) if k > direct.max_weight => NormSource::Calibrated(cal.clone()),
        _ => NormSource::Direct(direct),
    }
}

fn family(k: u32, chi: &DirichletCharacter, r: u64, digits: u32, cal: &Option<NormCalibration<Mp>>) -> Result<FamilySnapshot<Mp>> {
    let mut opts = FamilyOptions::new(norm_source(k, digits, cal));
    opts.digits = digits;
    opts.allow_vanishing = true;
    build_family(k, chi, r, &opts).with_context(|| format!("building the family at k = {k}"))
}

/// Families for every weight of a ladder, built in parallel and kept in order.
pub fn ladder(
    kladder: &[u32],
    chi: &DirichletCharacter,
    r: u64,
    digits: u32,
) -> Result<Vec<FamilySnapshot<Mp>>> {
    let cal = if kladder.iter().any(|&k| k > DirectOptions::default().max_weight) {
        Some(delta_calibration(digits)?)
    } else {
        None
    };
    kladder.par_iter().map(|&k| family(k, chi, r, digits, &cal)).collect()
}

fn weights(c: &ExperimentConfig) -> Result<RunOutput> {
    let mut t = Timer::new();
    let chi = character_by_label(c.chi)?;
    let fam = ladder(&[c.k], &chi, c.r, c.digits)?.remove(0);
    t.lap("family");
    let mut rows = Vec::new();
    let mut nonneg = true;
    let mut vanish = true;
    for (f, w) in fam.forms.iter().zip(&fam.weights) {
        nonneg &= w.value >= -w.tail_bound.clone();
        vanish &= w.central.value.clone().abs() <= w.central.tail_bound;
        rows.push(vec![
            c.k.to_string(),
            f.index().to_string(),
            mp(&w.central.value, 20),
            mp(&w.norm, 20),
            mp(&w.value, 20),
            mp(&w.tail_bound, 3),
        ]);
    }
    let mut checks = vec![Check::new(
        "weights_nonnegative",
        CheckKind::Hard,
        nonneg,
        "w(f) ≥ −tail bound for every form",
    )];
    let mut notes = vec![format!("fe_sign = {}", fam.fe_sign)];
    if fam.fe_sign == -1 {
        checks.push(Check::new(
            "forced_vanishing",
            CheckKind::Hard,
            vanish,
            "|Λ(1/2, f×χ)| within its tail bound for every form",
        ));
        notes.push("the sign −1 forces every central value to vanish; the family is degenerate".into());
    }
    Ok(RunOutput {
        data_name: "weights.csv".into(),
        data: csv_text(&["k", "form_index", "lambda_central", "norm", "weight", "tail_bound"], &rows)?,
        checks,
        notes,
        diagnostics: json!({ "fe_sign": fam.fe_sign, "forms": fam.forms.len(), "degenerate": fam.is_degenerate() }),
        timings: t.finish(),
    })
}

#[derive(Serialize)]
struct IdentityRow {
    identity: String,
    n: u32,
    status: String,
    lhs: String,
    rhs: String,
}

/// The 5×5 rational grid of (φ(0), σ²) values the identity is checked on.
pub fn comb_grid() -> (Vec<BigRational>, Vec<BigRational>) {
    (
        vec![ratio(-3, 2), ratio(0, 1), ratio(1, 5), ratio(2, 1), ratio(9, 4)],
        vec![ratio(0, 1), ratio(1, 150), ratio(1, 6), ratio(7, 3), ratio(5, 1)],
    )
}

fn comb_verify(c: &ExperimentConfig) -> Result<RunOutput> {
    let mut t = Timer::new();
    let (phis, vars) = comb_grid();
    let rows: Vec<IdentityRow> = (0..=c.nmax as u32)
        .into_par_iter()
        .map(|n| {
            let ok = phis.iter().all(|p| vars.iter().all(|v| frak_c(n, p, v) == gaussian_moment(n, v)));
            IdentityRow {
                identity: "frakC(n, phi0, sigma2) = gaussian_moment(n, sigma2)".into(),
                n,
                status: if ok { "pass" } else { "fail" }.into(),
                lhs: frak_c(n, &phis[2], &vars[1]).to_string(),
                rhs: gaussian_moment(n, &vars[1]).to_string(),
            }
        })
        .collect();
    t.lap("identities");
    let checks = rows
        .iter()
        .map(|r| Check::new(format!("frak_c_n{}", r.n), CheckKind::Hard, r.status == "pass", "exact over the 5×5 grid"))
        .collect();
    Ok(RunOutput {
        data_name: "comb-verify.data.json".into(),
        data: serde_json::to_string_pretty(&rows)? + "\n",
        checks,
        notes: vec!["lhs and rhs are shown at φ(0) = 1/5, σ² = 1/150".into()],
        diagnostics: json!({ "grid_points": phis.len() * vars.len() }),
        timings: t.finish(),
    })
}

fn prime_sums(c: &ExperimentConfig) -> Result<RunOutput> {
    let mut t = Timer::new();
    let chi = character_by_label(c.chi)?;
    let phi = fejer(c.beta)?;
    let qmax = c.qladder.iter().cloned().fold(0.0, f64::max);
    let table = PrimeTable::new(qmax.powf(c.beta) as u64 + 1);
    t.lap("sieve");
    let (m, n) = c.case;
    let res = c
        .qladder
        .iter()
        .map(|&q| lemma_sum(m, n, &chi, &phi, q, c.r, chi.modulus(), &table))
        .collect::<lowlying::Result<Vec<_>>>()?;
    t.lap("sums");
    let rows: Vec<Vec<String>> =
        res.iter().map(|s| vec![e(s.q), e(s.value), e(s.predicted_limit), e(s.deviation)]).collect();
    let devs: Vec<f64> = res.iter().map(|s| s.deviation).collect();
    let checks = vec![Check::new(
        "deviation_decreasing",
        CheckKind::Trend,
        monotone_toward_zero_with(&devs, 1e-15),
        format!("deviations {devs:?}"),
    )];
    let mut notes = Vec::new();
    if (m, n) == (0, 2) {
        notes.push(format!(
            "the prime number theorem gives ∫₀^β φ̂(u)²u du = σ²/2 = {:e} for this sum",
            phi.sigma2() / 2.0
        ));
    }
    Ok(RunOutput {
        data_name: "prime-sums.csv".into(),
        data: csv_text(&["Q", "value", "predicted", "deviation"], &rows)?,
        checks,
        notes,
        diagnostics: json!({ "primes_used": res.iter().map(|s| s.primes_used).collect::<Vec<_>>() }),
        timings: t.finish(),
    })
}

fn trace_check(c: &ExperimentConfig) -> Result<RunOutput> {
    let mut t = Timer::new();
    let chi = character_by_label(c.chi)?;
    let fams = ladder(&c.kladder, &chi, c.r, c.digits)?;
    t.lap("families");
    let main: Mp = trace_main_term(c.m, &chi, c.r);
    let mut rows = Vec::new();
    let mut gaps = Vec::new();
    let mut notes = Vec::new();
    for fam in &fams {
        if fam.is_degenerate() {
            notes.push(format!("k = {} skipped: degenerate weights (fe_sign = {})", fam.k, fam.fe_sign));
            continue;
        }
        let avg = weighted_average_eigenvalue(fam, c.m)?;
        let gap = (avg.clone() - main.clone()).abs();
        rows.push(vec![fam.k.to_string(), c.m.to_string(), mp(&avg, c.digits), mp(&main, c.digits), mp(&gap, 6)]);
        gaps.push(gap.to_f64());
    }
    t.lap("averages");
    let floor = 10f64.powi(-(c.digits as i32));
    let checks = vec![Check::new(
        "gap_decreasing",
        CheckKind::Trend,
        !gaps.is_empty() && monotone_toward_zero_with(&gaps, floor),
        format!("gaps {gaps:?}"),
    )];
    Ok(RunOutput {
        data_name: "trace-check.csv".into(),
        data: csv_text(&["k", "m", "avg_lambda", "main_term", "gap"], &rows)?,
        checks,
        notes,
        diagnostics: json!({ "gaps": gaps }),
        timings: t.finish(),
    })
}

fn moments(c: &ExperimentConfig) -> Result<RunOutput> {
    let mut t = Timer::new();
    let chi = character_by_label(c.chi)?;
    let phi = fejer(c.beta)?;
    let fams = ladder(&c.kladder, &chi, c.r, c.digits)?;
    t.lap("families");
    let rep = centered_moment(&fams, &phi, c.n)?;
    t.lap("moments");
    let rows: Vec<Vec<String>> = rep
        .rows
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                e(r.q),
                e(r.avg_density),
                e(r.predicted_avg),
                e(r.computed),
                e(rep.predicted),
                e(r.residual),
            ]
        })
        .collect();
    let avg_gaps: Vec<f64> = rep.rows.iter().map(|r| r.avg_density - r.predicted_avg).collect();
    let squares: Vec<f64> = rep.rows.iter().map(|r| r.square_term_avg).collect();
    let checks = vec![
        Check::new(
            "moment_trend",
            CheckKind::Trend,
            !rep.rows.is_empty() && rep.trend_ok,
            format!("residuals {:?}", rep.rows.iter().map(|r| r.residual).collect::<Vec<_>>()),
        ),
        Check::new(
            "average_trend",
            CheckKind::Trend,
            !rep.rows.is_empty() && monotone_toward_zero(&avg_gaps),
            format!("avg − predicted {avg_gaps:?}"),
        ),
    ];
    let notes = rep.skipped.iter().map(|(k, why)| format!("k = {k} skipped: {why}")).collect();
    Ok(RunOutput {
        data_name: "moments.csv".into(),
        data: csv_text(&["k", "Q", "avg_density", "predicted_avg", "moment_n", "predicted_moment", "residual"], &rows)?,
        checks,
        notes,
        diagnostics: json!({ "sigma2": phi.sigma2(), "square_term_avg": squares }),
        timings: t.finish(),
    })
}

fn rmt_compare(c: &ExperimentConfig) -> Result<RunOutput> {
    let mut t = Timer::new();
    let g = c.group();
    let phi = fejer(c.beta)?;
    let est = centered_moment_mc(g, c.size, &phi, c.n, c.samples, c.seed)?;
    t.lap("sampling");
    let predicted = gaussian_moment(c.n, &phi.sigma2());
    let row = vec![
        g.name().to_string(),
        c.size.to_string(),
        c.n.to_string(),
        e(est.estimate),
        e(est.stderr),
        e(predicted),
    ];
    let z = (est.estimate - predicted) / est.stderr;
    let checks = vec![Check::new(
        "within_3_stderr",
        CheckKind::Statistical,
        z.abs() <= 3.0,
        format!("(estimate − predicted)/stderr = {z:.3}"),
    )];
    let diagnostics = json!({
        "mean": est.mean,
        "mean_stderr": est.mean_stderr,
        "finite_rank_mean": expected_statistic(g, c.size, &phi)?,
        "kernel_integral": kernel_integral(&phi, g)?,
        "twice_sigma2_moment": gaussian_moment(c.n, &(2.0 * phi.sigma2())),
    });
    Ok(RunOutput {
        data_name: "rmt-compare.csv".into(),
        data: csv_text(&["group", "size", "n", "estimate", "stderr", "predicted"], &[row])?,
        checks,
        notes: vec![],
        diagnostics,
        timings: t.finish(),
    })
}
