use crate::characters::{fe_sign, DirichletCharacter};
use crate::error::{Error, Result};
use crate::modforms::HeckeEigenform;
use crate::scalar::{working_digits, Real};

/// Λ(1/2, f×χ) with the truncation data of its evaluation.
#[derive(Clone, Debug)]
pub struct CompletedLValue<T> {
    /// Real and imaginary part of the evaluation point.
    pub s: (f64, f64),
    pub value: T,
    pub terms_used: usize,
    pub tail_bound: T,
    /// Sign of the functional equation used in the symmetrisation.
    pub sign: i8,
}

/// Controls for the approximate functional equation.
#[derive(Clone, Debug)]
pub struct AfeOptions {
    /// Splitting point of the symmetrisation; any t₀ > 0 gives the same value.
    pub t0: f64,
    /// Target decimal digits relative to the scale Γ(k/2)(2π)^{−k/2}.
    pub digits: u32,
    /// Force a number of terms instead of choosing it from the tail bound.
    pub terms: Option<usize>,
}

impl Default for AfeOptions {
    fn default() -> Self {
        AfeOptions { t0: 1.0, digits: working_digits(), terms: None }
    }
}

/// Γ(a, x) for a positive integer a: (a−1)!·e^{−x}·Σ_{j<a} x^j/j!.
pub fn upper_gamma_int<T: Real>(a: u32, x: &T) -> T {
    regularized_upper(a, x) * T::from_u64(a as u64).gamma()
}

// Q(a, x) = e^{−x}Σ_{j<a} x^j/j!, a sum of positive terms.
pub(crate) fn regularized_upper<T: Real>(a: u32, x: &T) -> T {
    let mut term = T::one();
    let mut sum = T::one();
    for j in 1..a {
        term = term * x.clone() / T::from_u64(j as u64);
        sum += term.clone();
    }
    sum * (-x.clone()).exp()
}

// ln of an upper bound for Q(a, x), valid for x > a − 1.
fn ln_q_bound(a: u32, x: f64) -> f64 {
    let am1 = a as f64 - 1.0;
    if x <= am1 + 1.0 {
        return 0.0;
    }
    -x + am1 * x.ln() - libm::lgamma(a as f64) - (1.0 - am1 / x).ln()
}

// ln of a bound for Σ_{n>N} Q(a, c·n).
fn ln_tail(a: u32, c: f64, n: usize) -> f64 {
    let am1 = a as f64 - 1.0;
    let x = c * (n as f64 + 1.0);
    if x <= am1 + 1.0 {
        return f64::INFINITY;
    }
    let rho = (-c + am1 / (n as f64 + 1.0)).exp();
    if rho >= 1.0 {
        return f64::INFINITY;
    }
    ln_q_bound(a, x) - (1.0 - rho).ln()
}

/// Λ(1/2, f×χ) = Γ(k/2)(2π)^{−k/2} Σ χ(n)λ_f(n)n^{−1/2}[Q(k/2, 2πnt₀/D) + ε·Q(k/2, 2πn/(t₀D))]
/// with default options.
pub fn completed_l<T: Real>(f: &HeckeEigenform, chi: &DirichletCharacter) -> Result<CompletedLValue<T>> {
    completed_l_with(f, chi, &AfeOptions::default())
}

/// Approximate functional equation with explicit options.
pub fn completed_l_with<T: Real>(
    f: &HeckeEigenform,
    chi: &DirichletCharacter,
    opts: &AfeOptions,
) -> Result<CompletedLValue<T>> {
    if !chi.is_primitive() {
        return Err(Error::NonPrimitive { modulus: chi.modulus() });
    }
    if !(opts.t0 > 0.0) {
        return Err(Error::InvalidArgument(format!("t0 = {} must be positive", opts.t0)));
    }
    let k = f.weight();
    let a = k / 2;
    let eps = fe_sign(chi, k)?;
    let d = chi.modulus() as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    let c1 = two_pi * opts.t0 / d;
    let c2 = two_pi / (opts.t0 * d);
    let digits = opts.digits.min(T::digits() + 5);
    let ln_target = -(digits as f64) * std::f64::consts::LN_10;
    // d(n)/√n ≤ 2 bounds each coefficient weight.
    let ln_total_tail = |n: usize| {
        let t1 = ln_tail(a, c1, n);
        let t2 = ln_tail(a, c2, n);
        2f64.ln() + t1.max(t2) + 2f64.ln()
    };
    let terms = match opts.terms {
        Some(n) => n,
        None => {
            let mut n = 1usize;
            while ln_total_tail(n) > ln_target {
                n += 1;
                if n > 10_000_000 {
                    return Err(Error::Numerical("approximate functional equation cutoff diverged".into()));
                }
            }
            n
        }
    };
    if terms > f.len() {
        return Err(Error::Precision {
            what: format!("coefficients of Λ(1/2, f×χ) at k = {k}, D = {}", chi.modulus()),
            required: terms,
            available: f.len(),
        });
    }
    let c1t = T::two() * T::pi() * T::from_f64(opts.t0) / T::from_f64(d);
    let c2t = T::two() * T::pi() / (T::from_f64(opts.t0) * T::from_f64(d));
    let epst = T::from_i64(eps as i64);
    let mut sum = T::zero();
    for n in 1..=terms {
        let x = chi.value(n as i64);
        if x == 0 {
            continue;
        }
        let nt = T::from_u64(n as u64);
        let w = regularized_upper(a, &(c1t.clone() * nt.clone()))
            + epst.clone() * regularized_upper(a, &(c2t.clone() * nt.clone()));
        let term = f.lambda_as::<T>(n) * w / nt.sqrt();
        if x > 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let scale = T::from_u64(a as u64).gamma() / (T::two() * T::pi()).powi(a as i32);
    let value = scale.clone() * sum;
    let trunc = ln_total_tail(terms).exp();
    let rounding = T::epsilon() * T::from_u64(8 * (terms as u64 + 1));
    let tail_bound = scale * (T::from_f64(trunc) + rounding);
    Ok(CompletedLValue { s: (0.5, 0.0), value, terms_used: terms, tail_bound, sign: eps })
}
