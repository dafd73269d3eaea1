use crate::arith::gcd;
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::modforms::HeckeEigenform;
use crate::scalar::Real;

use super::afe::{completed_l_with, AfeOptions, CompletedLValue};
use super::norm::PeterssonNorm;

/// ω_f(χ, r) = Λ(1/2, f×χ)·a_f(r)²/‖f‖².
#[derive(Clone, Debug)]
pub struct Weight<T> {
    pub value: T,
    pub central: CompletedLValue<T>,
    pub norm: T,
    pub a_r_squared: T,
    /// Propagated truncation bound of the L-value.
    pub tail_bound: T,
}

/// Harmonic weight of f twisted by χ at shift r, given its Petersson norm.
pub fn weight<T: Real>(
    f: &HeckeEigenform,
    chi: &DirichletCharacter,
    r: u64,
    norm: &PeterssonNorm<T>,
    opts: &AfeOptions,
) -> Result<Weight<T>> {
    check_shift(f, chi, r)?;
    let central = completed_l_with::<T>(f, chi, opts)?;
    weight_from_parts(f, r, central, norm.value.clone())
}

fn check_shift(f: &HeckeEigenform, chi: &DirichletCharacter, r: u64) -> Result<()> {
    let g = gcd(r, chi.modulus());
    if r == 0 || g != 1 {
        return Err(Error::NotCoprime { r, modulus: chi.modulus(), gcd: g });
    }
    if r as usize > f.len() {
        return Err(Error::Precision { what: "a_f(r)".into(), required: r as usize, available: f.len() });
    }
    Ok(())
}

/// Assemble a weight from an L-value and a norm already at hand.
pub fn weight_from_parts<T: Real>(f: &HeckeEigenform, r: u64, central: CompletedLValue<T>, norm: T) -> Result<Weight<T>> {
    if r == 0 || r as usize > f.len() {
        return Err(Error::Precision { what: "a_f(r)".into(), required: r as usize, available: f.len() });
    }
    let ar = T::from_mp(f.fourier(r as usize));
    let a_r_squared = ar.clone() * ar;
    let scale = a_r_squared.clone() / norm.clone();
    Ok(Weight {
        value: central.value.clone() * scale.clone(),
        tail_bound: central.tail_bound.clone() * scale,
        central,
        norm,
        a_r_squared,
    })
}
