//! Haar sampling from the classical compact groups and Monte-Carlo statistics
//! of their eigenangles near 1.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::testfuncs::{SymmetryGroup, TestFunction};

type C64 = Complex<f64>;

/// Minimum number of Monte-Carlo samples accepted by [`centered_moment_mc`].
pub const MIN_SAMPLES: usize = 1000;

/// Eigenangles of one matrix.
///
/// For U the angles are all N eigenangles in [0, 2π). For the other groups
/// each conjugate pair e^{±iθ} is stored once as θ ∈ [0, π], and eigenvalues
/// ±1 forced by the determinant and the parity of the rank are kept apart
/// in `forced` (0 for +1, π for −1).
#[derive(Clone, Debug, PartialEq)]
pub struct EigenangleSample {
    pub group: SymmetryGroup,
    pub size: usize,
    pub angles: Vec<f64>,
    pub forced: Vec<f64>,
    pub seed: u64,
}

impl EigenangleSample {
    /// The identity matrix, all eigenangles 0.
    pub fn identity(group: SymmetryGroup, size: usize) -> Result<Self> {
        validate(group, size)?;
        let (pairs, forced) = match group {
            SymmetryGroup::U => (size, vec![]),
            SymmetryGroup::SoOdd | SymmetryGroup::O if size % 2 == 1 => (size / 2, vec![0.0]),
            _ => (size / 2, vec![]),
        };
        Ok(EigenangleSample { group, size, angles: vec![0.0; pairs], forced, seed: 0 })
    }

    /// Total number of eigenvalues, counting both members of each pair.
    pub fn eigenvalue_count(&self) -> usize {
        match self.group {
            SymmetryGroup::U => self.angles.len(),
            _ => 2 * self.angles.len() + self.forced.len(),
        }
    }

    /// Full multiset of angles in (−π, π], each pair unfolded to ±θ.
    pub fn unfolded(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.eigenvalue_count());
        match self.group {
            SymmetryGroup::U => out.extend(self.angles.iter().map(|&t| if t > PI { t - 2.0 * PI } else { t })),
            _ => {
                for &t in &self.angles {
                    out.push(t);
                    out.push(-t);
                }
                out.extend(&self.forced);
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

/// A Haar-distributed matrix, real for O and SO, complex for U and Sp.
#[derive(Clone, Debug)]
pub enum HaarMatrix {
    Real(DMatrix<f64>),
    Complex(DMatrix<C64>),
}

impl HaarMatrix {
    pub fn dim(&self) -> usize {
        match self {
            HaarMatrix::Real(m) => m.nrows(),
            HaarMatrix::Complex(m) => m.nrows(),
        }
    }

    pub fn determinant(&self) -> C64 {
        match self {
            HaarMatrix::Real(m) => C64::new(m.clone().determinant(), 0.0),
            HaarMatrix::Complex(m) => m.clone().determinant(),
        }
    }

    pub fn trace(&self) -> C64 {
        match self {
            HaarMatrix::Real(m) => C64::new(m.trace(), 0.0),
            HaarMatrix::Complex(m) => m.trace(),
        }
    }

    /// max |(M*M − I)_ij|.
    pub fn unitarity_defect(&self) -> f64 {
        match self {
            HaarMatrix::Real(m) => {
                let e = m.transpose() * m - DMatrix::<f64>::identity(m.nrows(), m.nrows());
                e.iter().fold(0.0, |a, x| a.max(x.abs()))
            }
            HaarMatrix::Complex(m) => {
                let e = m.adjoint() * m - DMatrix::<C64>::identity(m.nrows(), m.nrows());
                e.iter().fold(0.0, |a, x| a.max(x.norm()))
            }
        }
    }

    /// max |(MᵀJM − J)_ij| for the standard form J of the 2×2 block embedding;
    /// meaningful for Sp only.
    pub fn symplectic_defect(&self) -> f64 {
        let HaarMatrix::Complex(m) = self else { return f64::NAN };
        let n = m.nrows();
        let mut j = DMatrix::<C64>::zeros(n, n);
        for b in 0..n / 2 {
            j[(2 * b, 2 * b + 1)] = C64::new(1.0, 0.0);
            j[(2 * b + 1, 2 * b)] = C64::new(-1.0, 0.0);
        }
        let e = m.transpose() * &j * m - j;
        e.iter().fold(0.0, |a, x| a.max(x.norm()))
    }
}

fn validate(group: SymmetryGroup, size: usize) -> Result<()> {
    if size < 2 {
        return Err(Error::InvalidArgument(format!("rank {size} < 2")));
    }
    match group {
        SymmetryGroup::SoEven | SymmetryGroup::Sp if size % 2 == 1 => {
            Err(Error::InvalidArgument(format!("{} needs even rank, got {size}", group.name())))
        }
        SymmetryGroup::SoOdd if size % 2 == 0 => {
            Err(Error::InvalidArgument(format!("so-odd needs odd rank, got {size}")))
        }
        _ => Ok(()),
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

// Q from a Householder QR of a real Ginibre matrix, with the columns rescaled
// by sign(R_ii) so that the law is Haar on O(n).
fn haar_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for i in 0..n {
        if r[(i, i)] < 0.0 {
            q.column_mut(i).neg_mut();
        }
    }
    q
}

fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let g = DMatrix::from_fn(n, n, |_, _| C64::new(gaussian(rng) * s, gaussian(rng) * s));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for i in 0..n {
        let d = r[(i, i)];
        let a = d.norm();
        if a > 0.0 {
            let ph = d / a;
            for x in q.column_mut(i).iter_mut() {
                *x *= ph;
            }
        }
    }
    q
}

#[derive(Clone, Copy, Debug)]
struct Quat([f64; 4]);

impl Quat {
    fn conj(self) -> Quat {
        let [a, b, c, d] = self.0;
        Quat([a, -b, -c, -d])
    }

    fn mul(self, o: Quat) -> Quat {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = o.0;
        Quat([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }

    fn add(self, o: Quat) -> Quat {
        Quat(std::array::from_fn(|i| self.0[i] + o.0[i]))
    }

    fn sub(self, o: Quat) -> Quat {
        Quat(std::array::from_fn(|i| self.0[i] - o.0[i]))
    }

    fn norm_sqr(self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }
}

// Modified Gram–Schmidt over the quaternions on the columns of an n×n
// quaternionic Ginibre matrix (right module: v ← v − q·(q*v)). The result is
// Haar on the compact symplectic group, embedded as a 2n×2n complex unitary
// through a + bi + cj + dk ↦ [[a+bi, c+di], [−c+di, a−bi]].
fn haar_symplectic(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let mut cols: Vec<Vec<Quat>> =
        (0..n).map(|_| (0..n).map(|_| Quat(std::array::from_fn(|_| gaussian(rng)))).collect()).collect();
    for j in 0..n {
        for i in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let q = &done[i];
            let v = &mut rest[0];
            let mut s = Quat([0.0; 4]);
            for (ql, vl) in q.iter().zip(v.iter()) {
                s = s.add(ql.conj().mul(*vl));
            }
            for (ql, vl) in q.iter().zip(v.iter_mut()) {
                *vl = vl.sub(ql.mul(s));
            }
        }
        let nrm = cols[j].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            for c in x.0.iter_mut() {
                *c /= nrm;
            }
        }
    }
    let mut m = DMatrix::<C64>::zeros(2 * n, 2 * n);
    for (j, col) in cols.iter().enumerate() {
        for (l, q) in col.iter().enumerate() {
            let [a, b, c, d] = q.0;
            m[(2 * l, 2 * j)] = C64::new(a, b);
            m[(2 * l, 2 * j + 1)] = C64::new(c, d);
            m[(2 * l + 1, 2 * j)] = C64::new(-c, d);
            m[(2 * l + 1, 2 * j + 1)] = C64::new(a, -b);
        }
    }
    m
}

/// A Haar matrix from the given generator.
pub fn haar_matrix(group: SymmetryGroup, size: usize, rng: &mut ChaCha8Rng) -> Result<HaarMatrix> {
    validate(group, size)?;
    Ok(match group {
        SymmetryGroup::U => HaarMatrix::Complex(haar_unitary(size, rng)),
        SymmetryGroup::Sp => HaarMatrix::Complex(haar_symplectic(size / 2, rng)),
        SymmetryGroup::O => HaarMatrix::Real(haar_orthogonal(size, rng)),
        SymmetryGroup::SoEven | SymmetryGroup::SoOdd => {
            let mut q = haar_orthogonal(size, rng);
            if q.clone().determinant() < 0.0 {
                q.column_mut(0).neg_mut();
            }
            HaarMatrix::Real(q)
        }
    })
}

/// Generator for sample `stream` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

// Paired angles from cos θ, the spectrum of the Hermitian part, in which every
// pair appears twice. Forced ±1 are removed from the ends first.
fn paired_angles(mut cosines: Vec<f64>, plus: usize, minus: usize) -> Vec<f64> {
    cosines.sort_by(|a, b| b.total_cmp(a));
    let inner = &cosines[plus..cosines.len() - minus];
    let mut out: Vec<f64> = inner.chunks(2).map(|c| (0.5 * (c[0] + c[1])).clamp(-1.0, 1.0).acos()).collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Eigenangles of a matrix of the given group.
pub fn eigenangles(group: SymmetryGroup, m: &HaarMatrix, seed: u64) -> EigenangleSample {
    let size = m.dim();
    match (group, m) {
        (SymmetryGroup::U, HaarMatrix::Complex(u)) => {
            // Cayley transform i(I − U)(I + U)⁻¹ is Hermitian with eigenvalues tan(θ/2).
            let id = DMatrix::<C64>::identity(size, size);
            let lhs = (&id + u).adjoint();
            let rhs = (&id - u).adjoint() * C64::new(0.0, -1.0);
            let a = lhs.lu().solve(&rhs).expect("−1 is almost surely not an eigenvalue").adjoint();
            let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
            let mut angles: Vec<f64> =
                h.symmetric_eigenvalues().iter().map(|&t| (2.0 * t.atan()).rem_euclid(2.0 * PI)).collect();
            angles.sort_by(f64::total_cmp);
            EigenangleSample { group, size, angles, forced: vec![], seed }
        }
        (_, HaarMatrix::Real(q)) => {
            let h = (q + q.transpose()) * 0.5;
            let det_pos = q.clone().determinant() > 0.0;
            let (plus, minus) = match (size % 2 == 1, det_pos) {
                (true, true) => (1, 0),
                (true, false) => (0, 1),
                (false, true) => (0, 0),
                (false, false) => (1, 1),
            };
            let angles = paired_angles(h.symmetric_eigenvalues().iter().copied().collect(), plus, minus);
            let mut forced = vec![0.0; plus];
            forced.extend(std::iter::repeat(PI).take(minus));
            EigenangleSample { group, size, angles, forced, seed }
        }
        (_, HaarMatrix::Complex(u)) => {
            let h = (u + u.adjoint()) * C64::new(0.5, 0.0);
            let angles = paired_angles(h.symmetric_eigenvalues().iter().copied().collect(), 0, 0);
            EigenangleSample { group, size, angles, forced: vec![], seed }
        }
    }
}

/// Eigenangles of one Haar sample drawn from stream `stream` of `seed`.
pub fn sample_haar_stream(group: SymmetryGroup, size: usize, seed: u64, stream: u64) -> Result<EigenangleSample> {
    let mut rng = sample_rng(seed, stream);
    let m = haar_matrix(group, size, &mut rng)?;
    Ok(eigenangles(group, &m, seed))
}

/// Eigenangles of a Haar sample; deterministic in `seed`.
pub fn sample_haar(group: SymmetryGroup, size: usize, seed: u64) -> Result<EigenangleSample> {
    sample_haar_stream(group, size, seed, 0)
}

/// Σ_j φ(N·θ_j/2π) over all eigenangles θ_j ∈ (−π, π], N the rank.
pub fn density_statistic(s: &EigenangleSample, phi: &TestFunction<f64>) -> f64 {
    let scale = s.size as f64 / (2.0 * PI);
    match s.group {
        SymmetryGroup::U => s
            .angles
            .iter()
            .map(|&t| phi.phi(&(scale * if t > PI { t - 2.0 * PI } else { t })))
            .sum(),
        _ => {
            let paired: f64 = s.angles.iter().map(|&t| 2.0 * phi.phi(&(scale * t))).sum();
            paired + s.forced.iter().map(|&t| phi.phi(&(scale * t))).sum::<f64>()
        }
    }
}

// Components (probability, a, ε, forced angles) of the rank-m one-level density
// (1/2π)[a + ε·sin(aθ)/sin θ] of the paired angles on [0, π]; O is the even
// mixture of its two cosets.
fn density_components(group: SymmetryGroup, m: usize) -> Vec<(f64, f64, f64, Vec<f64>)> {
    let a = m as f64;
    match group {
        SymmetryGroup::U => vec![(1.0, a, 0.0, vec![])],
        SymmetryGroup::SoEven => vec![(1.0, a - 1.0, 1.0, vec![])],
        SymmetryGroup::SoOdd => vec![(1.0, a - 1.0, -1.0, vec![0.0])],
        SymmetryGroup::Sp => vec![(1.0, a + 1.0, -1.0, vec![])],
        SymmetryGroup::O if m % 2 == 0 => {
            vec![(0.5, a - 1.0, 1.0, vec![]), (0.5, a - 1.0, -1.0, vec![0.0, PI])]
        }
        SymmetryGroup::O => vec![(0.5, a - 1.0, -1.0, vec![0.0]), (0.5, a - 1.0, 1.0, vec![PI])],
    }
}

/// Exact Haar expectation of [`density_statistic`] at finite rank, from the
/// rank-N one-level densities. Its limit as N → ∞ is ∫φW_G.
pub fn expected_statistic(group: SymmetryGroup, size: usize, phi: &TestFunction<f64>) -> Result<f64> {
    validate(group, size)?;
    let scale = size as f64 / (2.0 * PI);
    let gl = GaussLegendre::<f64>::new(12);
    let panels = 2 * size;
    let h = PI / panels as f64;
    let mut total = 0.0;
    for (prob, a, eps, forced) in density_components(group, size) {
        let mut acc = 0.0;
        for p in 0..panels {
            let lo = p as f64 * h;
            acc += gl.integrate(&lo, &(lo + h), |&t| {
                let rho = (a + eps * (a * t).sin() / t.sin()) / (2.0 * PI);
                2.0 * rho * phi.phi(&(scale * t))
            });
        }
        acc += forced.iter().map(|&t| phi.phi(&(scale * t))).sum::<f64>();
        total += prob * acc;
    }
    Ok(total)
}

/// Density statistic of `samples` independent Haar matrices, in stream order.
pub fn statistic_samples(
    group: SymmetryGroup,
    size: usize,
    phi: &TestFunction<f64>,
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    validate(group, size)?;
    (0..samples as u64)
        .into_par_iter()
        .map(|i| sample_haar_stream(group, size, seed, i).map(|s| density_statistic(&s, phi)))
        .collect()
}

/// Monte-Carlo centered moment with its standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct RmtMomentEstimate {
    pub group: SymmetryGroup,
    pub size: usize,
    pub n: u32,
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    /// Sample mean of the statistic and its standard error.
    pub mean: f64,
    pub mean_stderr: f64,
}

/// Mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// n-th centered moment of a sample, centred at the sample mean.
pub fn centered_moment_of(values: &[f64], n: u32) -> (f64, f64) {
    let (m, _) = mean_stderr(values);
    let powers: Vec<f64> = values.iter().map(|x| (x - m).powi(n as i32)).collect();
    mean_stderr(&powers)
}

/// n-th centered moment of the density statistic over `samples` Haar matrices.
pub fn centered_moment_mc(
    group: SymmetryGroup,
    size: usize,
    phi: &TestFunction<f64>,
    n: u32,
    samples: usize,
    seed: u64,
) -> Result<RmtMomentEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!("{samples} samples, need at least {MIN_SAMPLES}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("moment order must be positive".into()));
    }
    if !(phi.beta() < 1.0) {
        return Err(Error::Support(format!("β = {} ≥ 1", phi.beta())));
    }
    let values = statistic_samples(group, size, phi, samples, seed)?;
    let (mean, mean_se) = mean_stderr(&values);
    let (estimate, stderr) = centered_moment_of(&values, n);
    Ok(RmtMomentEstimate { group, size, n, estimate, stderr, samples, mean, mean_stderr: mean_se })
}
