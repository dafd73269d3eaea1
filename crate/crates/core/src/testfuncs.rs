//! Even test functions φ whose Fourier transform φ̂ is piecewise linear with
//! compact support [−β, β].
//!
//! Fourier convention: φ̂(y) = ∫ φ(x) e^{−2πixy} dx.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Symmetry types of the classical compact groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymmetryGroup {
    U,
    O,
    SoEven,
    SoOdd,
    Sp,
}

impl SymmetryGroup {
    pub fn name(&self) -> &'static str {
        match self {
            SymmetryGroup::U => "u",
            SymmetryGroup::O => "o",
            SymmetryGroup::SoEven => "so-even",
            SymmetryGroup::SoOdd => "so-odd",
            SymmetryGroup::Sp => "sp",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "u" | "unitary" => Ok(SymmetryGroup::U),
            "o" | "orthogonal" => Ok(SymmetryGroup::O),
            "so-even" | "so_even" | "soeven" => Ok(SymmetryGroup::SoEven),
            "so-odd" | "so_odd" | "soodd" => Ok(SymmetryGroup::SoOdd),
            "sp" | "usp" | "symplectic" => Ok(SymmetryGroup::Sp),
            other => Err(Error::InvalidArgument(format!("unknown group {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TestFnKind {
    Fejer,
    PiecewiseLinear,
}

impl TestFnKind {
    pub fn name(&self) -> &'static str {
        match self {
            TestFnKind::Fejer => "fejer",
            TestFnKind::PiecewiseLinear => "piecewise",
        }
    }
}

/// An admissible pair (φ, φ̂) given by the knots (y_i, φ̂(y_i)) on [0, β].
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction<T> {
    kind: TestFnKind,
    knots: Vec<(T, T)>,
}

/// Fejér kernel: φ̂(y) = (1 − |y|/β)₊, φ(x) = β·(sin(πβx)/(πβx))².
pub fn fejer<T: Real>(beta: T) -> Result<TestFunction<T>> {
    if !(beta > T::zero()) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("Fejér support β = {beta} must be positive")));
    }
    Ok(TestFunction { kind: TestFnKind::Fejer, knots: vec![(T::zero(), T::one()), (beta, T::zero())] })
}

/// Custom even φ̂, linear between the given knots (0 = y₀ < … < y_m = β) with φ̂(β) = 0.
pub fn piecewise_linear<T: Real>(knots: Vec<(T, T)>) -> Result<TestFunction<T>> {
    if knots.len() < 2 {
        return Err(Error::InvalidArgument("need at least two knots".into()));
    }
    if !knots[0].0.is_zero() {
        return Err(Error::InvalidArgument("first knot must sit at y = 0".into()));
    }
    if knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidArgument("knots must be strictly increasing".into()));
    }
    if !knots.last().unwrap().1.is_zero() {
        return Err(Error::InvalidArgument("φ̂ must vanish at the support edge".into()));
    }
    Ok(TestFunction { kind: TestFnKind::PiecewiseLinear, knots })
}

impl<T: Real> TestFunction<T> {
    pub fn kind(&self) -> TestFnKind {
        self.kind
    }

    /// Support half-width β of φ̂.
    pub fn beta(&self) -> T {
        self.knots.last().unwrap().0.clone()
    }

    pub fn knots(&self) -> &[(T, T)] {
        &self.knots
    }

    /// c·φ, with the same support.
    pub fn scaled(&self, c: T) -> Self {
        TestFunction {
            kind: self.kind,
            knots: self.knots.iter().map(|(y, v)| (y.clone(), v.clone() * c.clone())).collect(),
        }
    }

    /// The identically zero function with this support.
    pub fn zero_like(&self) -> Self {
        self.scaled(T::zero())
    }

    /// φ̂(y).
    pub fn phi_hat(&self, y: &T) -> T {
        let y = y.abs();
        for w in self.knots.windows(2) {
            let (a, va) = &w[0];
            let (b, vb) = &w[1];
            if y <= *b {
                let t = (y.clone() - a.clone()) / (b.clone() - a.clone());
                return va.clone() + (vb.clone() - va.clone()) * t;
            }
        }
        T::zero()
    }

    /// φ(0) = ∫ φ̂.
    pub fn phi0(&self) -> T {
        let mut acc = T::zero();
        for w in self.knots.windows(2) {
            acc += (w[0].1.clone() + w[1].1.clone()) * (w[1].0.clone() - w[0].0.clone());
        }
        acc
    }

    /// φ̂(0).
    pub fn phi_hat0(&self) -> T {
        self.knots[0].1.clone()
    }

    /// φ(x) = 2∫₀^β φ̂(y)cos(2πxy) dy in closed form.
    pub fn phi(&self, x: &T) -> T {
        if self.kind == TestFnKind::Fejer {
            let beta = self.beta();
            let amp = self.knots[0].1.clone();
            let u = T::pi() * beta.clone() * x.clone();
            return amp * beta * sinc_sq(&u);
        }
        let omega = T::two() * T::pi() * x.abs();
        if omega.clone() * self.beta() < T::from_f64(1e-2) {
            return self.phi_series(&omega);
        }
        let mut acc = T::zero();
        for w in self.knots.windows(2) {
            let (a, va) = &w[0];
            let (b, vb) = &w[1];
            let s = (vb.clone() - va.clone()) / (b.clone() - a.clone());
            let prim = |y: &T, v: &T| {
                let wy = omega.clone() * y.clone();
                v.clone() * wy.sin() / omega.clone() + s.clone() * wy.cos() / (omega.clone() * omega.clone())
            };
            acc += prim(b, vb) - prim(a, va);
        }
        T::two() * acc
    }

    // Taylor expansion of cos for small ω·β.
    fn phi_series(&self, omega: &T) -> T {
        let mut acc = T::zero();
        let w2 = omega.clone() * omega.clone();
        let mut coef = T::one();
        for j in 0..8u32 {
            let p = 2 * j;
            let mut mom = T::zero();
            for w in self.knots.windows(2) {
                mom += segment_moment(&w[0], &w[1], p);
            }
            acc += coef.clone() * mom;
            coef = -coef * w2.clone() / T::from_u64(((p + 1) * (p + 2)) as u64);
        }
        T::two() * acc
    }

    /// σ_φ² = ∫ φ̂(y)²|y| dy in closed form.
    pub fn sigma2(&self) -> T {
        let mut acc = T::zero();
        for w in self.knots.windows(2) {
            let (a, va) = &w[0];
            let (b, vb) = &w[1];
            let h = b.clone() - a.clone();
            let s = (vb.clone() - va.clone()) / h.clone();
            let h2 = h.clone() * h.clone();
            let h3 = h2.clone() * h.clone();
            let h4 = h3.clone() * h.clone();
            let t1 = va.clone() * va.clone() * (h2.clone() * T::half() + a.clone() * h.clone());
            let t2 = T::two()
                * va.clone()
                * s.clone()
                * (h3.clone() / T::from_i64(3) + a.clone() * h2.clone() * T::half());
            let t3 = s.clone() * s * (h4 / T::from_i64(4) + a.clone() * h3 / T::from_i64(3));
            acc += t1 + t2 + t3;
        }
        T::two() * acc
    }
}

// ∫_a^b v(y)·y^p dy for v linear between the knots.
fn segment_moment<T: Real>(ka: &(T, T), kb: &(T, T), p: u32) -> T {
    let (a, va) = ka;
    let (b, vb) = kb;
    let s = (vb.clone() - va.clone()) / (b.clone() - a.clone());
    let c0 = va.clone() - s.clone() * a.clone();
    let pow = |y: &T, e: u32| -> T {
        let mut r = T::one();
        for _ in 0..e {
            r *= y.clone();
        }
        r
    };
    let p1 = T::from_u64((p + 1) as u64);
    let p2 = T::from_u64((p + 2) as u64);
    c0 * (pow(b, p + 1) - pow(a, p + 1)) / p1 + s * (pow(b, p + 2) - pow(a, p + 2)) / p2
}

fn sinc_sq<T: Real>(u: &T) -> T {
    if u.abs() < T::from_f64(1e-4) {
        let u2 = u.clone() * u.clone();
        // (sin u/u)² = 1 − u²/3 + 2u⁴/45 − u⁶/315 + …
        return T::one() - u2.clone() / T::from_i64(3) + T::two() * u2.clone() * u2.clone() / T::from_i64(45)
            - u2.clone() * u2.clone() * u2 / T::from_i64(315);
    }
    let s = u.sin() / u.clone();
    s.clone() * s
}

/// Whether supp φ̂ ⊂ (−1/(2n), 1/(2n)), the open interval required for the n-th moment.
pub fn check_support<T: Real>(phi: &TestFunction<T>, n: u32) -> bool {
    n >= 1 && phi.beta() * T::from_u64(2 * n as u64) < T::one()
}

/// ∫ φ(x)W_G(x) dx via Plancherel; valid for supp φ̂ ⊂ (−1, 1).
pub fn kernel_integral<T: Real>(phi: &TestFunction<T>, group: SymmetryGroup) -> Result<T> {
    if !(phi.beta() < T::one()) {
        return Err(Error::Support(format!(
            "β = {} ≥ 1: the Plancherel evaluation of ∫φW_G needs supp φ̂ ⊂ (−1, 1)",
            phi.beta()
        )));
    }
    let h0 = phi.phi_hat0();
    let half = phi.phi0() * T::half();
    Ok(match group {
        SymmetryGroup::U => h0,
        SymmetryGroup::Sp => h0 - half,
        SymmetryGroup::SoEven | SymmetryGroup::O => h0 + half,
        SymmetryGroup::SoOdd => h0 - half + phi.phi0(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fejer_values() {
        let f = fejer(1.0f64).unwrap();
        assert!((f.phi(&0.0) - 1.0).abs() < 1e-15);
        assert!((f.phi_hat0() - 1.0).abs() < 1e-15);
        assert!((f.sigma2() - 1.0 / 6.0).abs() < 1e-15);
        assert!((fejer(0.25f64).unwrap().sigma2() - 1.0 / 96.0).abs() < 1e-16);
        assert!(fejer(0.0f64).is_err() && fejer(-1.0f64).is_err());
    }

    #[test]
    fn support_boundary_is_open() {
        assert!(check_support(&fejer(0.2f64).unwrap(), 2));
        assert!(!check_support(&fejer(0.25f64).unwrap(), 2));
        assert!(check_support(&fejer(0.4f64).unwrap(), 1));
    }

    #[test]
    fn kernels() {
        let f = fejer(0.5f64).unwrap();
        assert_eq!(kernel_integral(&f, SymmetryGroup::U).unwrap(), 1.0);
        assert!((kernel_integral(&f, SymmetryGroup::SoEven).unwrap() - 1.25).abs() < 1e-15);
        assert_eq!(
            kernel_integral(&f, SymmetryGroup::O).unwrap(),
            kernel_integral(&f, SymmetryGroup::SoEven).unwrap()
        );
        assert!((kernel_integral(&f, SymmetryGroup::Sp).unwrap() - 0.75).abs() < 1e-15);
        // the point mass of SO(odd) exactly offsets the sign of its sine kernel
        assert!(
            (kernel_integral(&f, SymmetryGroup::SoOdd).unwrap() - kernel_integral(&f, SymmetryGroup::SoEven).unwrap())
                .abs()
                < 1e-15
        );
        assert!(kernel_integral(&fejer(1.0f64).unwrap(), SymmetryGroup::U).is_err());
    }

    #[test]
    fn generic_formula_matches_fejer_closed_form() {
        let f = fejer(0.3f64).unwrap();
        let g = piecewise_linear(vec![(0.0, 1.0), (0.3, 0.0)]).unwrap();
        for i in 0..200 {
            let x = i as f64 * 0.37 - 20.0;
            assert!((f.phi(&x) - g.phi(&x)).abs() < 1e-13, "x = {x}");
        }
        assert!((f.sigma2() - g.sigma2()).abs() < 1e-16);
    }
}
