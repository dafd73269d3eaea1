use crate::arith::gcd;
use crate::characters::{fe_sign, DirichletCharacter};
use crate::error::{Error, Result};
use crate::lvalues::{
    completed_l_with, petersson_norm_direct, petersson_norm_symsq, weight_from_parts, AfeOptions, DirectOptions,
    NormCalibration, PeterssonNorm, SymSquareOptions, Weight,
};
use crate::modforms::{dim_cusp, eigenforms_with, EigenOptions, HeckeEigenform};
use crate::scalar::{working_digits, Real};

/// Where Petersson norms come from.
#[derive(Clone, Debug)]
pub enum NormSource<T> {
    /// Symmetric-square route with a constant fitted on a reference form.
    Calibrated(NormCalibration<T>),
    /// Fundamental-domain integration (small weights only).
    Direct(DirectOptions),
}

/// Controls for [`build_family`].
#[derive(Clone, Debug)]
pub struct FamilyOptions<T> {
    pub norms: NormSource<T>,
    /// Lower bound on the number of Fourier coefficients; more are taken when
    /// the L-values or norms need them.
    pub min_terms: usize,
    pub digits: u32,
    /// Build families whose functional-equation sign forces every weight to vanish.
    pub allow_vanishing: bool,
}

impl<T: Real> FamilyOptions<T> {
    pub fn new(norms: NormSource<T>) -> Self {
        FamilyOptions { norms, min_terms: 0, digits: working_digits(), allow_vanishing: false }
    }
}

/// 𝓕_k(1)′ twisted by χ at shift r, with all eigenforms and weights.
#[derive(Clone, Debug)]
pub struct FamilySnapshot<T> {
    pub k: u32,
    pub level: u64,
    pub chi: DirichletCharacter,
    pub r: u64,
    pub forms: Vec<HeckeEigenform>,
    pub weights: Vec<Weight<T>>,
    /// Analytic conductor k²N.
    pub q: f64,
    pub fe_sign: i8,
}

impl<T: Real> FamilySnapshot<T> {
    pub fn total_weight(&self) -> T {
        self.weights.iter().map(|w| w.value.clone()).sum()
    }

    pub fn max_tail_bound(&self) -> T {
        self.weights.iter().map(|w| w.tail_bound.clone()).fold(T::zero(), T::max_of)
    }

    /// Whether Σw falls below 10³ times the largest truncation bound.
    pub fn is_degenerate(&self) -> bool {
        self.total_weight() < T::from_i64(1000) * self.max_tail_bound()
    }

    /// Weights divided by their sum, as doubles.
    pub fn normalized_weights(&self) -> Result<Vec<f64>> {
        if self.is_degenerate() {
            return Err(Error::DegenerateWeights(format!(
                "k = {}, D = {}: total weight {} is within 10³ tail bounds {}",
                self.k,
                self.chi.modulus(),
                self.total_weight().to_sci(6),
                self.max_tail_bound().to_sci(3)
            )));
        }
        let s = self.total_weight();
        Ok(self.weights.iter().map(|w| (w.value.clone() / s.clone()).to_f64()).collect())
    }
}

fn default_terms(k: u32) -> usize {
    (100usize).max((23 * k as usize) / 10 + 20)
}

/// Build the family of weight k, level one.
pub fn build_family<T: Real>(
    k: u32,
    chi: &DirichletCharacter,
    r: u64,
    opts: &FamilyOptions<T>,
) -> Result<FamilySnapshot<T>> {
    if k % 2 != 0 {
        return Err(Error::InvalidArgument(format!("weight {k} is odd")));
    }
    if dim_cusp(k) == 0 {
        return Err(Error::EmptyFamily { weight: k });
    }
    let g = gcd(r, chi.modulus());
    if r == 0 || g != 1 {
        return Err(Error::NotCoprime { r, modulus: chi.modulus(), gcd: g });
    }
    let eps = fe_sign(chi, k)?;
    if eps == -1 && !opts.allow_vanishing {
        return Err(Error::Rejected(format!(
            "fe_sign(χ mod {}, k = {k}) = −1 forces every central value to vanish",
            chi.modulus()
        )));
    }
    let mut terms = default_terms(k).max(opts.min_terms).max(r as usize);
    for _ in 0..4 {
        match try_build(k, chi, r, terms, eps, opts) {
            Err(Error::Precision { required, .. }) if required >= terms => terms = required + 16,
            other => return other,
        }
    }
    try_build(k, chi, r, terms, eps, opts)
}

fn try_build<T: Real>(
    k: u32,
    chi: &DirichletCharacter,
    r: u64,
    terms: usize,
    eps: i8,
    opts: &FamilyOptions<T>,
) -> Result<FamilySnapshot<T>> {
    let mut eo = EigenOptions::new(terms);
    eo.digits = opts.digits;
    let forms = eigenforms_with(k, &eo)?;
    let afe = AfeOptions { digits: opts.digits, ..Default::default() };
    let sym = SymSquareOptions { check_split: None, digits: opts.digits, ..Default::default() };
    let mut weights = Vec::with_capacity(forms.len());
    for f in &forms {
        let norm: PeterssonNorm<T> = match &opts.norms {
            NormSource::Calibrated(cal) => petersson_norm_symsq(f, cal, &sym)?,
            NormSource::Direct(d) => petersson_norm_direct(f, d)?,
        };
        let central = completed_l_with::<T>(f, chi, &afe)?;
        weights.push(weight_from_parts(f, r, central, norm.value)?);
    }
    Ok(FamilySnapshot {
        k,
        level: 1,
        chi: chi.clone(),
        r,
        forms,
        weights,
        q: (k as f64) * (k as f64),
        fe_sign: eps,
    })
}
