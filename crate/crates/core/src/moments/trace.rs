use crate::arith::{divisors, gcd, sigma1};
use crate::characters::DirichletCharacter;
use crate::error::Result;
use crate::scalar::Real;

use super::family::FamilySnapshot;

/// 𝒜^w(λ(m)) = Σ_f w(f)λ_f(m) / Σ_f w(f).
pub fn weighted_average_eigenvalue<T: Real>(family: &FamilySnapshot<T>, m: u64) -> Result<T> {
    // Degenerate families have no meaningful ratio.
    family.normalized_weights()?;
    let mut num = T::zero();
    for (f, w) in family.forms.iter().zip(&family.weights) {
        num += w.value.clone() * T::from_mp(&f.lambda_ext(m)?);
    }
    Ok(num / family.total_weight())
}

/// m^{−1/2}·χ(m)·σ₁((r, m)), the limit of the weighted average of λ(m).
pub fn trace_main_term<T: Real>(m: u64, chi: &DirichletCharacter, r: u64) -> T {
    T::from_i64(chi.value(m as i64) as i64 * sigma1(gcd(r, m)) as i64) / T::from_u64(m).sqrt()
}

/// m^{−1/2}·χ(m)·Σ_{d|(r,m)} d·σ₁((r, rm/d²)) / σ₁(r), the ratio of the two
/// Knightly–Reno main terms before any divisor-sum simplification. It agrees with
/// [`trace_main_term`] whenever (r, m) = 1.
pub fn trace_main_term_unsimplified<T: Real>(m: u64, chi: &DirichletCharacter, r: u64) -> T {
    let s: u64 = divisors(gcd(r, m)).into_iter().map(|d| d * sigma1(gcd(r, r * m / (d * d)))).sum();
    T::from_i64(chi.value(m as i64) as i64 * s as i64) / (T::from_u64(sigma1(r)) * T::from_u64(m).sqrt())
}

/// Direct and predicted sides of Σ_f w′(f)a_f(m) with w′ = Λ(1/2, f×χ)·a_f(r)/‖f‖².
#[derive(Clone, Debug)]
pub struct KrReport<T> {
    pub k: u32,
    pub m: u64,
    pub lhs: T,
    pub main: T,
    /// (4πrm)^{k−1}·D^{(k−1)/2}/(k−2)!, the error shape with unit constant.
    pub err_envelope: T,
    /// (lhs − main)/err_envelope.
    pub normalized_error: T,
    /// The envelope exceeds the size of the main term.
    pub below_crossover: bool,
}

/// Compare the weighted Fourier-coefficient sum with its closed-form main term.
pub fn kr_sum_formula<T: Real>(family: &FamilySnapshot<T>, m: u64) -> Result<KrReport<T>> {
    let k = family.k;
    let r = family.r;
    let mut lhs = T::zero();
    let root_m = T::from_u64(m).sqrt().powi(k as i32 - 1);
    for (f, w) in family.forms.iter().zip(&family.weights) {
        let a_r = T::from_mp(f.fourier(r as usize));
        let a_m = T::from_mp(&f.lambda_ext(m)?) * root_m.clone();
        lhs += w.central.value.clone() * a_r * a_m / w.norm.clone();
    }
    let two = T::two();
    let fact = T::from_u64(k as u64 - 1).gamma();
    let rm = T::from_u64(r * m);
    let chi_rm = family.chi.value((r * m) as i64) as i64;
    let magnitude = two.powi(k as i32 - 1) * (two.clone() * T::pi()).powi(k as i32 / 2 - 1)
        * T::from_u64(k as u64 / 2).gamma()
        / fact.clone()
        * rm.powi(k as i32 / 2 - 1)
        * T::from_u64(sigma1(gcd(r, m)));
    let main = magnitude.clone() * T::from_i64((1 + family.fe_sign as i64) * chi_rm);
    let d = T::from_u64(family.chi.modulus());
    let err_envelope =
        (T::from_i64(4) * T::pi() * rm).powi(k as i32 - 1) * d.sqrt().powi(k as i32 - 1) / fact;
    let normalized_error = (lhs.clone() - main.clone()) / err_envelope.clone();
    let below_crossover = err_envelope > two * magnitude;
    Ok(KrReport { k, m, lhs, main, err_envelope, normalized_error, below_crossover })
}
