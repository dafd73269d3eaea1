//! Real primitive Dirichlet characters and their Gauss sums.

use crate::arith::{factorize, gcd};
use crate::error::{Error, Result};
use crate::scalar::{digits_to_bits, scoped_bits, working_bits, Mp, Real};

/// A real Dirichlet character stored as a dense value table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DirichletCharacter {
    modulus: u64,
    values: Vec<i8>,
    parity: i8,
    primitive: bool,
}

impl DirichletCharacter {
    /// Validate a value table of length `D`: values in {−1, 0, 1}, zeros exactly
    /// at residues sharing a factor with `D`, and complete multiplicativity.
    pub fn from_table(values: Vec<i8>) -> Result<Self> {
        let d = values.len() as u64;
        if d == 0 {
            return Err(Error::InvalidCharacter("empty table".into()));
        }
        for (m, &v) in values.iter().enumerate() {
            if !(-1..=1).contains(&v) {
                return Err(Error::InvalidCharacter(format!("value {v} at residue {m} is not real")));
            }
            let coprime = gcd(m as u64, d) == 1;
            if coprime != (v != 0) {
                return Err(Error::InvalidCharacter(format!(
                    "value {v} at residue {m} contradicts gcd({m}, {d})"
                )));
            }
        }
        for a in 0..d {
            for b in a..d {
                let ab = ((a * b) % d) as usize;
                if values[ab] != values[a as usize] * values[b as usize] {
                    return Err(Error::InvalidCharacter(format!(
                        "not multiplicative at ({a}, {b}) mod {d}"
                    )));
                }
            }
        }
        let parity = values[((d - 1) % d) as usize];
        let primitive = is_primitive_table(&values);
        Ok(DirichletCharacter { modulus: d, values, parity, primitive })
    }

    /// The trivial character of modulus 1.
    pub fn trivial() -> Self {
        DirichletCharacter { modulus: 1, values: vec![1], parity: 1, primitive: true }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// χ(−1).
    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn is_trivial(&self) -> bool {
        self.modulus == 1
    }

    /// χ(n) for any integer n.
    pub fn value(&self, n: i64) -> i8 {
        let d = self.modulus as i64;
        self.values[n.rem_euclid(d) as usize]
    }

    /// Signed discriminant label: `D` for even characters, `−D` for odd ones.
    pub fn discriminant(&self) -> i64 {
        self.parity as i64 * self.modulus as i64
    }
}

fn is_primitive_table(values: &[i8]) -> bool {
    let d = values.len() as u64;
    if d == 1 {
        return true;
    }
    // χ is induced from modulus e | D iff it is constant (= 1) on units a ≡ 1 mod e.
    crate::arith::divisors(d).into_iter().filter(|&e| e < d).all(|e| {
        (0..d).any(|a| a % e == 1 % e && gcd(a, d) == 1 && values[a as usize] != 1)
    })
}

fn legendre_table(p: u64, d: u64) -> Vec<i8> {
    let mut squares = vec![false; p as usize];
    for x in 1..p {
        squares[((x * x) % p) as usize] = true;
    }
    (0..d)
        .map(|m| {
            let r = m % p;
            if r == 0 {
                0
            } else if squares[r as usize] {
                1
            } else {
                -1
            }
        })
        .collect()
}

fn two_part_table(kind: i8, d: u64) -> Vec<i8> {
    // kind: 4 → χ_{−4}; 8 → χ_8; −8 → χ_{−8}
    (0..d)
        .map(|m| {
            if m % 2 == 0 {
                return 0;
            }
            match kind {
                4 => {
                    if m % 4 == 1 {
                        1
                    } else {
                        -1
                    }
                }
                8 => {
                    if m % 8 == 1 || m % 8 == 7 {
                        1
                    } else {
                        -1
                    }
                }
                _ => {
                    if m % 8 == 1 || m % 8 == 3 {
                        1
                    } else {
                        -1
                    }
                }
            }
        })
        .collect()
}

/// All real primitive characters of modulus exactly `D`, ordered even before odd.
pub fn enumerate_real_primitive(d: u64) -> Vec<DirichletCharacter> {
    if d == 0 {
        return Vec::new();
    }
    if d == 1 {
        return vec![DirichletCharacter::trivial()];
    }
    let fac = factorize(d);
    let mut odd_tables: Vec<Vec<i8>> = Vec::new();
    let mut two_kinds: Vec<i8> = vec![];
    for &(p, e) in &fac {
        if p == 2 {
            match e {
                2 => two_kinds = vec![4],
                3 => two_kinds = vec![8, -8],
                _ => return Vec::new(),
            }
        } else if e != 1 {
            return Vec::new();
        } else {
            odd_tables.push(legendre_table(p, d));
        }
    }
    let odd_part: Vec<i8> = (0..d as usize)
        .map(|m| odd_tables.iter().map(|t| t[m]).product::<i8>())
        .collect();
    let combos: Vec<Vec<i8>> = if two_kinds.is_empty() {
        vec![odd_part]
    } else {
        two_kinds
            .iter()
            .map(|&k| {
                let t = two_part_table(k, d);
                t.iter().zip(&odd_part).map(|(a, b)| a * b).collect()
            })
            .collect()
    };
    let mut out: Vec<DirichletCharacter> = combos
        .into_iter()
        .map(|t| DirichletCharacter::from_table(t).expect("constructed table is a character"))
        .filter(|c| c.is_primitive())
        .collect();
    out.sort_by_key(|c| -c.parity);
    out
}

/// Complex value of a Gauss sum.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussSumValue<T> {
    pub re: T,
    pub im: T,
}

impl<T: Real> GaussSumValue<T> {
    pub fn norm_sqr(&self) -> T {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    /// Real and imaginary parts of τ².
    pub fn square(&self) -> (T, T) {
        let re = self.re.clone() * self.re.clone() - self.im.clone() * self.im.clone();
        let im = T::two() * self.re.clone() * self.im.clone();
        (re, im)
    }
}

/// τ(χ) = Σ_{m=1}^{D} χ(m) e^{2πim/D} at the working precision of `T`.
pub fn gauss_sum<T: Real>(chi: &DirichletCharacter) -> Result<GaussSumValue<T>> {
    if !chi.is_primitive() {
        return Err(Error::NonPrimitive { modulus: chi.modulus() });
    }
    let d = chi.modulus();
    let step = T::two() * T::pi() / T::from_u64(d);
    let mut re = T::zero();
    let mut im = T::zero();
    for m in 1..=d {
        let v = chi.value(m as i64);
        if v == 0 {
            continue;
        }
        let theta = step.clone() * T::from_u64(m);
        let (c, s) = (theta.cos(), theta.sin());
        if v > 0 {
            re += c;
            im += s;
        } else {
            re -= c;
            im -= s;
        }
    }
    Ok(GaussSumValue { re, im })
}

/// Sign i^k·τ(χ)²/D of the functional equation of Λ(s, f×χ) at level one.
pub fn fe_sign(chi: &DirichletCharacter, k: u32) -> Result<i8> {
    if k % 2 != 0 {
        return Err(Error::InvalidArgument(format!("weight {k} is odd")));
    }
    let bits = working_bits().max(digits_to_bits(64));
    let _g = scoped_bits(bits);
    let tau = gauss_sum::<Mp>(chi)?;
    let (re, im) = tau.square();
    let d = Mp::from_u64(chi.modulus());
    let ratio = re / d.clone();
    let tol = Mp::from_f64(1e-40);
    if (im / d).abs() > tol {
        return Err(Error::Numerical("τ(χ)² is not real".into()));
    }
    let ik: i8 = if k % 4 == 0 { 1 } else { -1 };
    let r = ratio.to_f64();
    if (r.abs() - 1.0).abs() > 1e-30 {
        return Err(Error::Numerical(format!("τ(χ)²/D = {r} is not ±1")));
    }
    Ok(ik * if r > 0.0 { 1 } else { -1 })
}

/// Whether (χ, k) satisfies the first-family condition τ(χ)² ≠ −i^k·D.
pub fn in_first_family(chi: &DirichletCharacter, k: u32) -> Result<bool> {
    Ok(fe_sign(chi, k)? == 1)
}

/// The unique real primitive character selected by a signed discriminant label.
///
/// A positive label picks the even character of that modulus when two exist,
/// a negative label picks the odd one; otherwise the sign is ignored.
pub fn character_by_label(label: i64) -> Result<DirichletCharacter> {
    let d = label.unsigned_abs();
    let chars = enumerate_real_primitive(d);
    match chars.len() {
        0 => Err(Error::InvalidCharacter(format!("no real primitive character of modulus {d}"))),
        1 => Ok(chars[0].clone()),
        _ => {
            let want = if label < 0 { -1 } else { 1 };
            Ok(chars.into_iter().find(|c| c.parity() == want).expect("both parities present"))
        }
    }
}
