use num_bigint::BigInt;
use num_traits::Zero;

use super::basis::{dim_cusp, victor_miller_basis};
use super::hecke::{hecke_matrix, HeckeMatrix};
use super::poly::{char_poly, IntPoly};
use super::qexp::QExpansion;
use crate::arith::factorize;
use crate::error::{Error, Result};
use crate::scalar::{digits_to_bits, scoped_bits, working_bits, working_digits, Mp, Real};

/// A normalised Hecke eigenform with multiple-precision coefficient tables.
#[derive(Clone, Debug)]
pub struct HeckeEigenform {
    weight: u32,
    index: usize,
    coords: Vec<Mp>,
    fourier: Vec<Mp>,
    eigen: Vec<Mp>,
    residual: f64,
    digits: u32,
}

impl HeckeEigenform {
    pub fn weight(&self) -> u32 {
        self.weight
    }

    /// Position of the form within its weight, ordered by λ(2).
    pub fn index(&self) -> usize {
        self.index
    }

    /// Number of stored coefficients M.
    pub fn len(&self) -> usize {
        self.fourier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fourier.is_empty()
    }

    /// Coordinates in the echelon basis (first entry 1).
    pub fn coords(&self) -> &[Mp] {
        &self.coords
    }

    /// a_f(n), 1 ≤ n ≤ M.
    pub fn fourier(&self, n: usize) -> &Mp {
        &self.fourier[n - 1]
    }

    /// λ_f(n) = a_f(n)·n^{−(k−1)/2}, 1 ≤ n ≤ M.
    pub fn lambda(&self, n: usize) -> &Mp {
        &self.eigen[n - 1]
    }

    pub fn fourier_table(&self) -> &[Mp] {
        &self.fourier
    }

    pub fn eigen_table(&self) -> &[Mp] {
        &self.eigen
    }

    /// Relative defect of the eigen-equation in the echelon basis.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Decimal digits certified by the precision-doubling comparison.
    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// λ_f(n) converted to the scalar type `T`.
    pub fn lambda_as<T: Real>(&self, n: usize) -> T {
        T::from_mp(self.lambda(n))
    }

    /// λ_f(n) for any n whose prime factors are within the table, using
    /// multiplicativity and the level-one recurrence λ(p^{j+1}) = λ(p)λ(p^j) − λ(p^{j−1})
    /// beyond the stored range.
    pub fn lambda_ext(&self, n: u64) -> Result<Mp> {
        if n == 0 {
            return Err(Error::InvalidArgument("λ(0) is undefined".into()));
        }
        if (n as usize) <= self.len() {
            return Ok(self.lambda(n as usize).clone());
        }
        let mut acc = Mp::from_i64(1);
        for (p, e) in factorize(n) {
            let pe = p.pow(e);
            if (pe as usize) <= self.len() {
                acc *= self.lambda(pe as usize).clone();
                continue;
            }
            if p as usize > self.len() {
                return Err(Error::Precision {
                    what: format!("λ({p}) for weight {}", self.weight),
                    required: p as usize,
                    available: self.len(),
                });
            }
            acc *= self.prime_power(p, e);
        }
        Ok(acc)
    }

    fn prime_power(&self, p: u64, e: u32) -> Mp {
        let lp = self.lambda(p as usize).clone();
        let mut prev = Mp::from_i64(1);
        let mut cur = lp.clone();
        for _ in 1..e {
            let next = lp.clone() * cur.clone() - prev;
            prev = cur;
            cur = next;
        }
        cur
    }
}

/// Controls for [`eigenforms_with`].
#[derive(Clone, Debug)]
pub struct EigenOptions {
    /// Number of Fourier coefficients to tabulate.
    pub terms: usize,
    /// Target decimal digits of the λ tables.
    pub digits: u32,
    /// Upper bound on the working precision during refinement.
    pub max_bits: u32,
}

impl EigenOptions {
    pub fn new(terms: usize) -> Self {
        EigenOptions { terms, digits: working_digits(), max_bits: 1 << 15 }
    }
}

/// Hecke eigenforms of S_k(1) with `m` coefficients at the working precision.
pub fn eigenforms(k: u32, m: usize) -> Result<Vec<HeckeEigenform>> {
    eigenforms_with(k, &EigenOptions::new(m))
}

fn to_mp_matrix(a: &[Vec<BigInt>]) -> Vec<Vec<Mp>> {
    a.iter().map(|r| r.iter().map(Mp::from_bigint).collect()).collect()
}

// Null vector of (Aᵀ − λI) by Gaussian elimination with full pivoting.
fn left_null_vector(a: &[Vec<Mp>], lambda: &Mp) -> Result<Vec<Mp>> {
    let d = a.len();
    let mut m: Vec<Vec<Mp>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let v = a[j][i].clone();
                    if i == j {
                        v - lambda.clone()
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let mut cols: Vec<usize> = (0..d).collect();
    for step in 0..d.saturating_sub(1) {
        let mut best = (step, step);
        let mut bv = Mp::zero();
        for r in step..d {
            for c in step..d {
                let v = m[r][c].abs();
                if v > bv {
                    bv = v;
                    best = (r, c);
                }
            }
        }
        if bv.is_zero() {
            return Err(Error::Numerical("eigenvalue with a multi-dimensional eigenspace".into()));
        }
        m.swap(step, best.0);
        for row in m.iter_mut() {
            row.swap(step, best.1);
        }
        cols.swap(step, best.1);
        let piv = m[step][step].clone();
        for r in step + 1..d {
            let f = m[r][step].clone() / piv.clone();
            if f.is_zero() {
                continue;
            }
            for c in step..d {
                let t = f.clone() * m[step][c].clone();
                m[r][c] -= t;
            }
        }
    }
    // The last pivot is numerically zero; fix the free variable to 1.
    let mut x = vec![Mp::zero(); d];
    x[d - 1] = Mp::from_i64(1);
    for r in (0..d - 1).rev() {
        let mut s = Mp::zero();
        for c in r + 1..d {
            s += m[r][c].clone() * x[c].clone();
        }
        x[r] = -s / m[r][r].clone();
    }
    let mut out = vec![Mp::zero(); d];
    for (pos, &c) in cols.iter().enumerate() {
        out[c] = x[pos].clone();
    }
    if out[0].is_zero() {
        return Err(Error::Numerical("eigenvector with vanishing first coefficient".into()));
    }
    let c0 = out[0].clone();
    Ok(out.into_iter().map(|v| v / c0.clone()).collect())
}

struct Candidate {
    coords: Vec<Mp>,
    fourier: Vec<Mp>,
    eigen: Vec<Mp>,
    residual: f64,
}

// Operator with a simple spectrum, its characteristic polynomial, and e with every
// eigenvalue in [−2^e, 2^e] (from |λ(n)| ≤ d(n) at level one).
fn splitting_operator(k: u32, basis: &[QExpansion]) -> Result<(Vec<Vec<BigInt>>, IntPoly, i64)> {
    let half = (k as i64 - 1 + 1) / 2;
    let t2 = hecke_matrix(k, 2, basis)?;
    let p = char_poly(&t2.entries);
    if p.is_squarefree() {
        // |a(2)| ≤ 2·2^{(k−1)/2}
        return Ok((t2.entries, p, half + 2));
    }
    // Degenerate T₂ spectrum: try T₂ + c·T₃.
    let t3: HeckeMatrix = hecke_matrix(k, 3, basis)?;
    for c in 1..=16i64 {
        let comb: Vec<Vec<BigInt>> = t2
            .entries
            .iter()
            .zip(&t3.entries)
            .map(|(r2, r3)| r2.iter().zip(r3).map(|(a, b)| a + b * BigInt::from(c)).collect())
            .collect();
        let p = char_poly(&comb);
        if p.is_squarefree() {
            // |a(2)| + c|a(3)| ≤ 2·2^{(k−1)/2} + 2c·3^{(k−1)/2} < 2^{e}
            let e = (((k as f64 - 1.0) / 2.0) * 3f64.log2() + ((4 * c) as f64).log2()).ceil() as i64 + 2;
            return Ok((comb, p, e));
        }
    }
    Err(Error::Numerical(format!("could not split the Hecke spectrum at weight {k}")))
}

fn solve_at(
    k: u32,
    basis: &[QExpansion],
    op: &[Vec<BigInt>],
    poly: &IntPoly,
    roots: &[(num_rational::BigRational, num_rational::BigRational)],
    bits: u32,
) -> Result<Vec<Candidate>> {
    let _g = scoped_bits(bits);
    let a = to_mp_matrix(op);
    let m = basis[0].precision();
    let basis_mp: Vec<Vec<Mp>> =
        basis.iter().map(|f| f.coeffs().iter().map(Mp::from_bigint).collect()).collect();
    let half_k = Mp::from_i64(k as i64 - 1) / Mp::from_i64(2);
    let norms: Vec<Mp> = (1..=m).map(|n| Mp::from_u64(n as u64).powf(&half_k)).collect();
    let mut out = Vec::new();
    for (lo, hi) in roots {
        let lambda = poly.refine_root(lo, hi);
        let c = left_null_vector(&a, &lambda)?;
        // residual ‖cᵀA − λcᵀ‖∞ / (|λ|·‖c‖∞)
        let d = c.len();
        let mut worst = Mp::zero();
        let mut cmax = Mp::zero();
        for j in 0..d {
            let mut s = Mp::zero();
            for (i, ci) in c.iter().enumerate() {
                s += ci.clone() * a[i][j].clone();
            }
            s -= lambda.clone() * c[j].clone();
            worst = worst.max_of(s.abs());
            cmax = cmax.max_of(c[j].abs());
        }
        let scale = lambda.abs().max_of(Mp::from_i64(1)) * cmax;
        let residual = (worst / scale).to_f64();
        let fourier: Vec<Mp> = (0..m)
            .map(|n| {
                let mut s = Mp::zero();
                for (ci, b) in c.iter().zip(&basis_mp) {
                    if !b[n].is_zero() {
                        s += ci.clone() * b[n].clone();
                    }
                }
                s
            })
            .collect();
        let eigen: Vec<Mp> = fourier.iter().zip(&norms).map(|(a, n)| a.clone() / n.clone()).collect();
        out.push(Candidate { coords: c, fourier, eigen, residual });
    }
    Ok(out)
}

fn max_abs_diff(a: &[Candidate], b: &[Candidate]) -> f64 {
    let mut worst = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        for (u, v) in x.eigen.iter().zip(&y.eigen) {
            let diff = (u.clone() - v.clone()).abs().to_f64();
            let scale = v.abs().to_f64().max(1.0);
            worst = worst.max(diff / scale);
        }
    }
    worst
}

/// Hecke eigenforms with explicit options.
///
/// The spectrum of T₂ (or T₂ + c·T₃ when T₂ is degenerate) is isolated exactly
/// with a Sturm sequence and refined in multiple precision. The whole solve is
/// repeated at doubled precision until the λ tables agree to the target digits.
pub fn eigenforms_with(k: u32, opts: &EigenOptions) -> Result<Vec<HeckeEigenform>> {
    let d = dim_cusp(k);
    if d == 0 {
        return Err(Error::EmptySpace { weight: k });
    }
    let m = opts.terms.max(3 * d).max(d + 10);
    let basis = victor_miller_basis(k, m)?;
    let (op, poly, e) = splitting_operator(k, &basis)?;
    let roots = poly.isolate_real_roots_within(e);
    if roots.len() != d {
        return Err(Error::Numerical(format!(
            "found {} real eigenvalues for a space of dimension {d}",
            roots.len()
        )));
    }
    let target = digits_to_bits(opts.digits);
    let coeff_bits = basis.iter().map(|b| b.max_bits()).max().unwrap_or(0) as u32;
    let mut bits = target + coeff_bits / 4 + 64;
    let tol = 10f64.powi(-(opts.digits as i32));
    let mut prev = solve_at(k, &basis, &op, &poly, &roots, bits)?;
    loop {
        let next_bits = bits * 2;
        if next_bits > opts.max_bits {
            return Err(Error::Numerical(format!(
                "eigenvalues at weight {k} unresolved below {} bits",
                opts.max_bits
            )));
        }
        let cur = solve_at(k, &basis, &op, &poly, &roots, next_bits)?;
        let diff = max_abs_diff(&prev, &cur);
        bits = next_bits;
        prev = cur;
        if diff < tol {
            break;
        }
    }
    let keep_bits = working_bits().max(target);
    let _g = scoped_bits(keep_bits);
    let mut forms: Vec<HeckeEigenform> = prev
        .into_iter()
        .map(|c| HeckeEigenform {
            weight: k,
            index: 0,
            coords: c.coords.iter().map(Mp::rounded).collect(),
            fourier: c.fourier.iter().map(Mp::rounded).collect(),
            eigen: c.eigen.iter().map(Mp::rounded).collect(),
            residual: c.residual,
            digits: opts.digits,
        })
        .collect();
    forms.sort_by(|a, b| a.eigen[1].partial_cmp(&b.eigen[1]).expect("finite eigenvalues"));
    for (i, f) in forms.iter_mut().enumerate() {
        f.index = i;
    }
    Ok(forms)
}
