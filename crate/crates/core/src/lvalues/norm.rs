use crate::error::{Error, Result};
use crate::modforms::HeckeEigenform;
use crate::quadrature::GaussLegendre;
use crate::scalar::{working_digits, Real};

use super::afe::upper_gamma_int;

/// How a Petersson norm was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMethod {
    Direct,
    SymmetricSquare,
}

/// ‖f‖² = ∫_{SL₂(ℤ)\ℍ} |f(z)|² y^k dx dy/y² with an error estimate.
#[derive(Clone, Debug)]
pub struct PeterssonNorm<T> {
    pub value: T,
    pub method: NormMethod,
    pub est_error: T,
}

/// Controls for the direct integration over the fundamental domain.
#[derive(Clone, Debug)]
pub struct DirectOptions {
    /// Largest weight accepted; the cusp-form sums lose digits beyond it.
    pub max_weight: u32,
    /// Node count of the first quadrature pass in each variable.
    pub initial_nodes: usize,
    pub max_nodes: usize,
    /// Target relative accuracy in decimal digits.
    pub digits: u32,
}

impl Default for DirectOptions {
    fn default() -> Self {
        DirectOptions { max_weight: 60, initial_nodes: 24, max_nodes: 260, digits: working_digits() }
    }
}

/// Direct Petersson norm of an eigenform.
pub fn petersson_norm_direct<T: Real>(f: &HeckeEigenform, opts: &DirectOptions) -> Result<PeterssonNorm<T>> {
    let coeffs: Vec<T> = f.fourier_table().iter().map(T::from_mp).collect();
    petersson_norm_direct_coeffs(f.weight(), &coeffs, opts)
}

/// Direct Petersson norm of Σ a(n)qⁿ with `coeffs[n−1] = a(n)`.
///
/// The domain splits at y = 1: above, the x-integral kills the cross terms and
/// leaves Σ a(n)²Γ(k−1, 4πn)/(4πn)^{k−1}; below, a product Gauss–Legendre rule
/// covers 2∫_0^{1/2}∫_{√(1−x²)}^1. The rule is refined by a factor 3/2 until two
/// passes agree.
pub fn petersson_norm_direct_coeffs<T: Real>(k: u32, coeffs: &[T], opts: &DirectOptions) -> Result<PeterssonNorm<T>> {
    if k > opts.max_weight {
        return Err(Error::UnsupportedWeight {
            weight: k,
            reason: format!("direct integration is limited to k ≤ {}", opts.max_weight),
        });
    }
    if k < 2 {
        return Err(Error::UnsupportedWeight { weight: k, reason: "weight must be at least 2".into() });
    }
    let digits = opts.digits.min(T::digits());
    let n = needed_terms(k, digits);
    if n > coeffs.len() {
        return Err(Error::Precision {
            what: format!("coefficients for the direct norm at k = {k}"),
            required: n,
            available: coeffs.len(),
        });
    }
    let a = &coeffs[..n];
    let four_pi = T::from_i64(4) * T::pi();
    let mut upper = T::zero();
    for (i, c) in a.iter().enumerate() {
        let x = four_pi.clone() * T::from_u64(i as u64 + 1);
        upper += c.clone() * c.clone() * upper_gamma_int(k - 1, &x) / x.powi(k as i32 - 1);
    }
    let tol = T::from_f64(10f64.powi(-(digits as i32)));
    let mut nodes = opts.initial_nodes;
    let mut prev = lower_region(k, a, nodes);
    loop {
        let next_nodes = nodes * 3 / 2;
        if next_nodes > opts.max_nodes {
            return Err(Error::NonConvergent(format!(
                "direct Petersson norm at k = {k} did not settle within {} nodes",
                opts.max_nodes
            )));
        }
        let cur = lower_region(k, a, next_nodes);
        let total = upper.clone() + cur.clone();
        let diff = (cur.clone() - prev).abs();
        if diff <= tol.clone() * total.abs() {
            let est_error = diff + T::epsilon() * T::from_u64(n as u64 * 16) * total.abs();
            return Ok(PeterssonNorm { value: total, method: NormMethod::Direct, est_error });
        }
        prev = cur;
        nodes = next_nodes;
    }
}

// Terms of Σ a(n)qⁿ that matter for y ≥ √3/2: |a(n)| ≤ d(n)n^{(k−1)/2}.
fn needed_terms(k: u32, digits: u32) -> usize {
    let y = 3f64.sqrt() / 2.0;
    let h = (k as f64 - 1.0) / 2.0;
    let ln_term = |n: f64| (2.0 * n.sqrt()).ln() + h * n.ln() - 2.0 * std::f64::consts::PI * n * y;
    let peak = (1..200).map(|n| ln_term(n as f64)).fold(f64::MIN, f64::max);
    let target = peak - (digits as f64 + 10.0) * std::f64::consts::LN_10;
    let mut n = 1usize;
    while n as f64 <= h / (2.0 * std::f64::consts::PI * y) + 1.0 || ln_term(n as f64) > target {
        n += 1;
    }
    n
}

fn lower_region<T: Real>(k: u32, a: &[T], nodes: usize) -> T {
    let g = GaussLegendre::<T>::new(nodes);
    let two_pi = T::two() * T::pi();
    let mut acc = T::zero();
    for (x, wx) in g.mapped(&T::zero(), &T::half()) {
        let b = (T::one() - x.clone() * x.clone()).sqrt();
        let (c, s) = ((two_pi.clone() * x.clone()).cos(), (two_pi.clone() * x.clone()).sin());
        let mut inner = T::zero();
        for (y, wy) in g.mapped(&b, &T::one()) {
            let r = (-(two_pi.clone() * y.clone())).exp();
            let (qr, qi) = (r.clone() * c.clone(), r * s.clone());
            let (mut pr, mut pi) = (qr.clone(), qi.clone());
            let (mut fr, mut fi) = (T::zero(), T::zero());
            for an in a {
                fr += an.clone() * pr.clone();
                fi += an.clone() * pi.clone();
                let nr = pr.clone() * qr.clone() - pi.clone() * qi.clone();
                pi = pr * qi.clone() + pi * qr.clone();
                pr = nr;
            }
            inner += wy * (fr.clone() * fr + fi.clone() * fi) * y.powi(k as i32 - 2);
        }
        acc += wx * inner;
    }
    acc * T::two()
}
