use crate::error::{Error, Result};
use crate::primesums::simple_sieve;
use crate::scalar::Real;
use crate::testfuncs::{check_support, TestFunction};

use super::family::FamilySnapshot;

/// Explicit-formula pieces of D(f, φ) for one form.
#[derive(Clone, Debug, PartialEq)]
pub struct FormDensity {
    pub value: f64,
    /// −2Σ_p λ(p)φ̂(log p/log Q)·log p/(√p·log Q)
    pub prime_term: f64,
    /// −2Σ_p λ(p²)φ̂(2log p/log Q)·log p/(p·log Q)
    pub square_term: f64,
}

/// One-level densities of a family with their weighted average.
#[derive(Clone, Debug)]
pub struct DensityReport {
    pub k: u32,
    pub q: f64,
    pub per_form: Vec<FormDensity>,
    pub weights: Vec<f64>,
    pub average: f64,
    pub predicted_avg: f64,
    pub square_term_avg: f64,
}

/// D(f, φ) for every form via the explicit formula, truncated exactly by the
/// support of φ̂, and the weighted family average.
pub fn one_level_density<T: Real>(family: &FamilySnapshot<T>, phi: &TestFunction<f64>) -> Result<DensityReport> {
    let beta = phi.beta();
    if beta >= 1.0 {
        return Err(Error::Support(format!("support β = {beta} must be below 1")));
    }
    let log_q = family.q.ln();
    let cutoff = family.q.powf(beta).floor() as u64;
    let m = family.forms.first().map_or(0, |f| f.len());
    if cutoff as usize > m {
        return Err(Error::Precision {
            what: format!("λ(p) for p ≤ Q^β at k = {}", family.k),
            required: cutoff as usize,
            available: m,
        });
    }
    let primes = simple_sieve(cutoff);
    let base = phi.phi_hat0() + phi.phi0() / 2.0;
    let mut per_form = Vec::with_capacity(family.forms.len());
    for f in &family.forms {
        let mut prime_term = 0.0;
        let mut square_term = 0.0;
        for &p in &primes {
            let lp = (p as f64).ln();
            let h = phi.phi_hat(&(lp / log_q));
            if h != 0.0 {
                prime_term -= 2.0 * f.lambda(p as usize).to_f64() * h * lp / ((p as f64).sqrt() * log_q);
            }
            let h2 = phi.phi_hat(&(2.0 * lp / log_q));
            if h2 != 0.0 {
                let l2 = f.lambda_ext(p * p)?.to_f64();
                square_term -= 2.0 * l2 * h2 * lp / (p as f64 * log_q);
            }
        }
        per_form.push(FormDensity { value: base + prime_term + square_term, prime_term, square_term });
    }
    let weights = family.normalized_weights()?;
    let average = weights.iter().zip(&per_form).map(|(w, d)| w * d.value).sum();
    let square_term_avg = weights.iter().zip(&per_form).map(|(w, d)| w * d.square_term).sum();
    let sign = if family.chi.is_trivial() { -1.0 } else { 1.0 };
    Ok(DensityReport {
        k: family.k,
        q: family.q,
        per_form,
        weights,
        average,
        predicted_avg: phi.phi_hat0() + sign * phi.phi0() / 2.0,
        square_term_avg,
    })
}

/// Residuals below this are treated as rounding noise by the trend checks.
pub const TREND_FLOOR: f64 = 1e-12;

/// Whether |values| strictly decrease, entries below [`TREND_FLOOR`] counting as converged.
pub fn monotone_toward_zero(values: &[f64]) -> bool {
    monotone_toward_zero_with(values, TREND_FLOOR)
}

/// As [`monotone_toward_zero`] with an explicit noise floor.
pub fn monotone_toward_zero_with(values: &[f64], floor: f64) -> bool {
    values.windows(2).all(|w| w[1].abs() <= floor || w[1].abs() < w[0].abs())
}

/// One ladder step of a centered moment.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentRow {
    pub k: u32,
    pub q: f64,
    pub avg_density: f64,
    pub predicted_avg: f64,
    pub computed: f64,
    pub residual: f64,
    pub square_term_avg: f64,
}

/// 𝒜^w[(D − 𝒜^w(D))ⁿ] along a weight ladder against the Gaussian moment.
#[derive(Clone, Debug)]
pub struct MomentReport {
    pub n: u32,
    pub predicted: f64,
    pub rows: Vec<MomentRow>,
    /// Weights left out of the ladder, with the reason.
    pub skipped: Vec<(u32, String)>,
    /// |computed − predicted| strictly decreases along the ladder, steps already
    /// within [`TREND_FLOOR`] of the prediction counting as converged.
    pub trend_ok: bool,
}

impl MomentReport {
    pub fn computed(&self) -> Option<f64> {
        self.rows.last().map(|r| r.computed)
    }

    pub fn avg_density(&self) -> Option<f64> {
        self.rows.last().map(|r| r.avg_density)
    }

    pub fn predicted_avg(&self) -> Option<f64> {
        self.rows.last().map(|r| r.predicted_avg)
    }
}

fn double_factorial(n: u32) -> f64 {
    (1..=n).rev().step_by(2).map(|j| j as f64).product()
}

/// Centered n-th moment of the one-level density over each family of a ladder.
pub fn centered_moment<T: Real>(ladder: &[FamilySnapshot<T>], phi: &TestFunction<f64>, n: u32) -> Result<MomentReport> {
    if !check_support(phi, n) {
        return Err(Error::Support(format!(
            "β = {} violates the moment hypothesis supp φ̂ ⊂ (−1/(2n), 1/(2n)) for n = {n}",
            phi.beta()
        )));
    }
    let sigma2 = phi.sigma2();
    let predicted = if n % 2 == 1 { 0.0 } else { double_factorial(n.saturating_sub(1)) * sigma2.powi(n as i32 / 2) };
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for fam in ladder {
        if fam.is_degenerate() {
            skipped.push((fam.k, "degenerate weights: total below 10³ tail bounds".to_string()));
            continue;
        }
        let d = one_level_density(fam, phi)?;
        let computed: f64 =
            d.weights.iter().zip(&d.per_form).map(|(w, f)| w * (f.value - d.average).powi(n as i32)).sum();
        rows.push(MomentRow {
            k: fam.k,
            q: fam.q,
            avg_density: d.average,
            predicted_avg: d.predicted_avg,
            computed,
            residual: computed - predicted,
            square_term_avg: d.square_term_avg,
        });
    }
    let residuals: Vec<f64> = rows.iter().map(|r| r.residual).collect();
    let trend_ok = monotone_toward_zero(&residuals);
    Ok(MomentReport { n, predicted, rows, skipped, trend_ok })
}

/// One evaluation of the moment error envelope.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeRow {
    pub k: u32,
    pub ln_envelope: f64,
    pub envelope: f64,
}

/// The envelope Q^{nkβ/2 − nβ + n}/(N^{(k−1)/2}·k^{k/2−1}) with unit base constant.
#[derive(Clone, Debug)]
pub struct EnvelopeReport {
    pub beta: f64,
    pub n: u32,
    pub level: u64,
    pub rows: Vec<EnvelopeRow>,
    pub decreasing: bool,
    /// The leading k·log k coefficient is negative, so the envelope tends to zero.
    pub tends_to_zero: bool,
}

/// Evaluate the envelope in log space along a weight ladder.
pub fn error_envelope_check(beta: f64, n: u32, level: u64, ks: &[u32]) -> Result<EnvelopeReport> {
    if level == 0 || n == 0 {
        return Err(Error::InvalidArgument("level and n must be positive".into()));
    }
    let nf = n as f64;
    let ln_n = (level as f64).ln();
    let rows: Vec<EnvelopeRow> = ks
        .iter()
        .map(|&k| {
            let kf = k as f64;
            let ln_q = 2.0 * kf.ln() + ln_n;
            let ln_envelope =
                (nf * kf * beta / 2.0 - nf * beta + nf) * ln_q - (kf - 1.0) / 2.0 * ln_n - (kf / 2.0 - 1.0) * kf.ln();
            EnvelopeRow { k, ln_envelope, envelope: ln_envelope.exp() }
        })
        .collect();
    let decreasing = rows.windows(2).all(|w| w[1].ln_envelope < w[0].ln_envelope);
    let tends_to_zero = nf * beta < 0.5 || (nf * beta == 0.5 && level > 1);
    Ok(EnvelopeReport { beta, n, level, rows, decreasing, tends_to_zero })
}
