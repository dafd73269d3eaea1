use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::qexp::QExpansion;
use crate::error::{Error, Result};

/// Exact matrix of T_n on the echelon basis: row i holds the first `dim`
/// coefficients of T_n f_i, so T_n f_i = Σ_j entries[i][j] f_j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeMatrix {
    pub weight: u32,
    pub operator_index: u64,
    pub entries: Vec<Vec<BigInt>>,
}

impl HeckeMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn mul(&self, other: &HeckeMatrix) -> Vec<Vec<BigInt>> {
        let d = self.dim();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..d).map(|l| &self.entries[i][l] * &other.entries[l][j]).sum())
                    .collect()
            })
            .collect()
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim()).map(|i| self.entries[i][i].clone()).sum()
    }
}

/// T_n applied to a level-one q-expansion of weight k.
///
/// Expanding n^{k−1} Σ_{ad=n} Σ_{b mod d} d^{−k} f((az+b)/d) term by term, the
/// sum over b of e^{2πi·mb/d} equals d when d | m and vanishes otherwise, which
/// leaves b(j) = Σ_{a | (n, j)} a^{k−1} a(nj/a²). The result keeps ⌊M/n⌋ terms.
pub fn apply_hecke(f: &QExpansion, n: u64) -> QExpansion {
    let k = f.weight();
    let len = f.precision() / n as usize;
    let coeffs = (1..=len as u64)
        .map(|j| {
            let g = n.gcd(&j);
            let mut acc = BigInt::zero();
            for a in 1..=g {
                if g % a == 0 {
                    let idx = (n / a) * (j / a);
                    acc += BigInt::from(a).pow(k - 1) * f.coeff(idx as usize);
                }
            }
            acc
        })
        .collect();
    QExpansion::new(k, coeffs)
}

/// Exact matrix of T_n with respect to an echelon basis of S_k(1).
pub fn hecke_matrix(k: u32, n: u64, basis: &[QExpansion]) -> Result<HeckeMatrix> {
    let d = basis.len();
    if d == 0 {
        return Err(Error::EmptySpace { weight: k });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("Hecke operator index must be positive".into()));
    }
    let need = n as usize * d;
    let have = basis.iter().map(|b| b.precision()).min().unwrap_or(0);
    if have < need {
        return Err(Error::Precision {
            what: format!("T_{n} on S_{k}"),
            required: need,
            available: have,
        });
    }
    if basis.iter().any(|b| b.weight() != k) {
        return Err(Error::InvalidArgument(format!("basis is not of weight {k}")));
    }
    let entries = basis
        .iter()
        .map(|f| {
            let t = apply_hecke(f, n);
            (1..=d).map(|j| t.coeff(j)).collect()
        })
        .collect();
    Ok(HeckeMatrix { weight: k, operator_index: n, entries })
}

#[cfg(test)]
fn identity(d: usize) -> Vec<Vec<BigInt>> {
    use num_traits::One;
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modforms::victor_miller_basis;

    #[test]
    fn t1_is_identity() {
        let b = victor_miller_basis(36, 40).unwrap();
        let t = hecke_matrix(36, 1, &b).unwrap();
        assert_eq!(t.entries, identity(3));
    }

    #[test]
    fn delta_t2() {
        let b = victor_miller_basis(12, 20).unwrap();
        let t = hecke_matrix(12, 2, &b).unwrap();
        assert_eq!(t.entries, vec![vec![BigInt::from(-24)]]);
    }

    #[test]
    fn short_precision_is_an_error() {
        let b = victor_miller_basis(24, 12).unwrap();
        assert!(matches!(hecke_matrix(24, 7, &b), Err(Error::Precision { .. })));
    }
}
