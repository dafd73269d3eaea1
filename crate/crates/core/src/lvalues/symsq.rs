use crate::error::{Error, Result};
use crate::modforms::HeckeEigenform;
use crate::quadrature::GaussLegendre;
use crate::scalar::{working_digits, Real};

use super::norm::{petersson_norm_direct, DirectOptions, NormMethod, PeterssonNorm};

const PANEL_NODES: usize = 28;

/// Controls for L(1, sym²f).
#[derive(Clone, Debug)]
pub struct SymSquareOptions {
    /// Splitting point A of the symmetrised integral.
    pub split: f64,
    /// Second splitting point used for the error estimate; `None` skips it.
    pub check_split: Option<f64>,
    pub digits: u32,
}

impl Default for SymSquareOptions {
    fn default() -> Self {
        SymSquareOptions { split: 1.0, check_split: Some(1.25), digits: working_digits() }
    }
}

/// L(1, sym²f) with the number of Dirichlet coefficients used.
#[derive(Clone, Debug)]
pub struct SymSquareValue<T> {
    pub value: T,
    pub terms_used: usize,
    /// Disagreement between two splitting points plus a rounding term.
    pub est_error: T,
}

/// Proportionality constant in ‖f‖² = C·Γ(k)(4π)^{−k}·L(1, sym²f), fitted on one form.
#[derive(Clone, Debug)]
pub struct NormCalibration<T> {
    pub constant: T,
    pub reference_weight: u32,
    pub direct_norm: T,
    pub l1: T,
}

// b_n = Σ_{d²|n} λ((n/d²)²), the coefficients of ζ(2s)Σλ(m²)m^{−s}.
fn sym_coeffs<T: Real>(f: &HeckeEigenform, n: usize) -> Result<Vec<T>> {
    let mut sq = Vec::with_capacity(n);
    for m in 1..=n as u64 {
        sq.push(T::from_mp(&f.lambda_ext(m * m)?));
    }
    let mut b = vec![T::zero(); n];
    let mut d = 1usize;
    while d * d <= n {
        let mut m = 1usize;
        while m * d * d <= n {
            b[m * d * d - 1] += sq[m - 1].clone();
            m += 1;
        }
        d += 1;
    }
    Ok(b)
}

// ln of an upper bound for h_A(a) = e^{−πa²/A²}/(πa) + erfc(√π·a·A).
fn ln_h_bound(a: f64, split: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let t1 = -pi * a * a / (split * split) - (pi * a).ln();
    let t2 = -pi * a * a * split * split - (pi * a * split).ln();
    let tail = t1.max(t2) + (1.0 + (-(t1 - t2).abs()).exp()).ln();
    let small = (1.0 + 1.0 / (pi * a)).ln();
    tail.min(small)
}

// erfc to absolute accuracy. Small arguments use 1 − erf(z) with the positive series
// erf(z) = (2/√π)e^{−z²}Σ 2^j z^{2j+1}/(2j+1)!!; larger ones the Laplace continued
// fraction, evaluated bottom-up with a depth fixed from its convergence rate.
fn erfc_abs<T: Real>(z: &T, ln_eps: f64) -> T {
    let z64 = z.to_f64();
    let z2 = z.clone() * z.clone();
    if z64 * z64 > -ln_eps + 2.0 {
        return T::zero();
    }
    let series_len = 2.0 * z64 * z64 + 40.0;
    let cf_len = (-ln_eps / (2.0 * std::f64::consts::SQRT_2 * z64.max(1e-300))).powi(2) + 10.0;
    if cf_len < series_len {
        // erfc(z) = e^{−z²}/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + …))))
        let mut acc = z.clone();
        for j in (1..=cf_len.ceil() as u64).rev() {
            acc = z.clone() + T::from_u64(j) / (T::two() * acc);
        }
        return (-z2).exp() / (T::pi().sqrt() * acc);
    }
    let two_z2 = T::two() * z2.clone();
    let eps = T::epsilon();
    let mut term = z.clone();
    let mut sum = z.clone();
    let mut j = 1u64;
    loop {
        term = term * two_z2.clone() / T::from_u64(2 * j + 1);
        sum += term.clone();
        if (j as f64) > z64 * z64 && term <= eps.clone() * sum.clone() {
            break;
        }
        j += 1;
    }
    T::one() - T::two() / T::pi().sqrt() * (-z2).exp() * sum
}

fn h<T: Real>(a: &T, split: &T, ln_eps: f64) -> T {
    let pi = T::pi();
    let e = (-(pi.clone() * a.clone() * a.clone() / (split.clone() * split.clone()))).exp() / (pi.clone() * a.clone());
    e + erfc_abs(&(pi.sqrt() * a.clone() * split.clone()), ln_eps)
}

struct Node<T> {
    v: T,
    weight: T,
    ln_weight: f64,
    v64: f64,
}

// Quadrature for E over t ~ Gamma(k−1, rate 2π) in the variable u = ln t, where
// the integrand is analytic in the strip |Im u| < π/2. Composite panels cover the
// range where n = 1 still contributes above the cut.
fn gamma_nodes<T: Real>(k: u32, ln_tol: f64, splits: &[f64]) -> Vec<Node<T>> {
    let two_pi = 2.0 * std::f64::consts::PI;
    let shape = (k - 1) as f64;
    let ln_pdf_u = |u: f64| shape * two_pi.ln() + shape * u - two_pi * u.exp() - libm::lgamma(shape);
    let ln_h1 = |u: f64| splits.iter().map(|&s| ln_h_bound((-u).exp(), s)).fold(f64::MIN, f64::max);
    let live = |u: f64| ln_pdf_u(u) + ln_h1(u) > ln_tol - 20.0;
    let mode = (shape / two_pi).ln();
    let width = (2.0 / shape.sqrt()).min(0.3);
    let mut lo = mode;
    while live(lo) {
        lo -= width;
    }
    let mut hi = mode;
    while live(hi) {
        hi += width;
    }
    let panels = ((hi - lo) / width).round() as usize;
    let g = GaussLegendre::<T>::new(PANEL_NODES);
    let ln_norm = T::from_u64(k as u64 - 1).ln_gamma();
    let two_pi_t = T::two() * T::pi();
    let shape_t = T::from_u64(k as u64 - 1);
    let mut nodes = Vec::with_capacity(panels * PANEL_NODES);
    for p in 0..panels {
        let a = T::from_f64(lo + p as f64 * width);
        let b = T::from_f64(lo + (p + 1) as f64 * width);
        for (u, w) in g.mapped(&a, &b) {
            let v = u.exp();
            let lp = shape_t.clone() * (two_pi_t.ln() + u) - two_pi_t.clone() * v.clone() - ln_norm.clone();
            let weight = w * lp.exp();
            let v64 = v.to_f64();
            let ln_weight = weight.to_f64().ln();
            nodes.push(Node { v, weight, ln_weight, v64 });
        }
    }
    nodes
}

fn l1_at_split<T: Real>(k: u32, b: &dyn Fn(usize) -> Result<T>, nodes: &[Node<T>], split: f64, ln_tol: f64) -> Result<(T, usize)> {
    let split_t = T::from_f64(split);
    let ln_eps = T::epsilon().to_f64().ln();
    let ln_nodes = (nodes.len() as f64).ln();
    let mut total = T::zero();
    let mut n = 1usize;
    loop {
        let skip = ln_tol - 2.0 * ((n + 1) as f64).ln() - ln_nodes;
        let live: Vec<&Node<T>> = nodes
            .iter()
            .filter(|nd| nd.ln_weight + ln_h_bound(n as f64 / nd.v64, split) > skip)
            .collect();
        if live.is_empty() {
            break;
        }
        let bn = b(n)?;
        if bn != T::zero() {
            let nt = T::from_u64(n as u64);
            let mut e = T::zero();
            for nd in live {
                e += nd.weight.clone() * h(&(nt.clone() / nd.v.clone()), &split_t, ln_eps);
            }
            total += bn * e;
        }
        n += 1;
    }
    let pi = T::pi();
    Ok((T::two() * pi.clone() * pi * total / T::from_u64(k as u64 - 1), n - 1))
}

/// L(1, sym²f) = (2π²/(k−1))·Σ b_n·E[h_A(n/t)], t ~ Gamma(k−1, rate 2π).
pub fn l1_symmetric_square<T: Real>(f: &HeckeEigenform, opts: &SymSquareOptions) -> Result<SymSquareValue<T>> {
    let k = f.weight();
    let digits = opts.digits.min(T::digits());
    let ln_tol = -(digits as f64 + 5.0) * std::f64::consts::LN_10;
    let mut splits = vec![opts.split];
    splits.extend(opts.check_split);
    let nodes = gamma_nodes::<T>(k, ln_tol, &splits);
    let table = std::cell::RefCell::new(Vec::<T>::new());
    let coeff = |n: usize| -> Result<T> {
        let mut t = table.borrow_mut();
        if t.len() < n {
            let want = (2 * n).max(64).min(f.len()).max(n);
            *t = sym_coeffs(f, want)?;
        }
        Ok(t[n - 1].clone())
    };
    let (value, terms) = l1_at_split(k, &coeff, &nodes, opts.split, ln_tol)?;
    let rounding = T::epsilon() * T::from_u64(64 * (terms as u64 + 1)) * value.abs();
    let est_error = match opts.check_split {
        Some(s) => {
            let (v2, _) = l1_at_split(k, &coeff, &nodes, s, ln_tol)?;
            (v2 - value.clone()).abs() + rounding
        }
        None => rounding,
    };
    Ok(SymSquareValue { value, terms_used: terms, est_error })
}

fn norm_factor<T: Real>(k: u32) -> T {
    T::from_u64(k as u64).gamma() / (T::from_i64(4) * T::pi()).powi(k as i32)
}

/// Fit C on one form, normally Δ, against the direct integration.
pub fn calibrate<T: Real>(
    reference: &HeckeEigenform,
    direct: &DirectOptions,
    opts: &SymSquareOptions,
) -> Result<NormCalibration<T>> {
    let k = reference.weight();
    let d = petersson_norm_direct::<T>(reference, direct)?;
    let l = l1_symmetric_square::<T>(reference, opts)?;
    let constant = d.value.clone() / (norm_factor::<T>(k) * l.value.clone());
    Ok(NormCalibration { constant, reference_weight: k, direct_norm: d.value, l1: l.value })
}

/// ‖f‖² through L(1, sym²f) and a fitted calibration.
pub fn petersson_norm_symsq<T: Real>(
    f: &HeckeEigenform,
    cal: &NormCalibration<T>,
    opts: &SymSquareOptions,
) -> Result<PeterssonNorm<T>> {
    let l = l1_symmetric_square::<T>(f, opts)?;
    let s = cal.constant.clone() * norm_factor::<T>(f.weight());
    Ok(PeterssonNorm {
        value: s.clone() * l.value,
        method: NormMethod::SymmetricSquare,
        est_error: s * l.est_error,
    })
}

/// Compare both routes on further forms; drift above 10⁻⁸ is an error.
pub fn verify_calibration<T: Real>(
    cal: &NormCalibration<T>,
    forms: &[HeckeEigenform],
    direct: &DirectOptions,
    opts: &SymSquareOptions,
) -> Result<Vec<(u32, f64)>> {
    let mut out = Vec::new();
    for f in forms {
        let d = petersson_norm_direct::<T>(f, direct)?;
        let s = petersson_norm_symsq(f, cal, opts)?;
        let drift = ((s.value - d.value.clone()) / d.value).abs().to_f64();
        if !(drift <= 1e-8) {
            return Err(Error::CalibrationDrift { weight: f.weight(), drift });
        }
        out.push((f.weight(), drift));
    }
    Ok(out)
}
