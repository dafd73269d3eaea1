//! Gauss–Legendre quadrature at the working precision of any [`Real`] type.

use crate::scalar::Real;

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let tol = T::epsilon() * T::from_i64(16);
        for i in 0..n.div_ceil(2) {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut x = T::from_f64(guess);
            let mut dp = T::one();
            for _ in 0..200 {
                let (p, d) = legendre(n, &x);
                dp = d.clone();
                let dx = p / d;
                x -= dx.clone();
                if dx.abs() <= tol.clone() * x.abs().max_of(T::one()) {
                    let (_, d) = legendre(n, &x);
                    dp = d;
                    break;
                }
            }
            let w = T::two() / ((T::one() - x.clone() * x.clone()) * dp.clone() * dp);
            nodes[i] = -x.clone();
            nodes[n - 1 - i] = x;
            weights[i] = w.clone();
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// ∫_a^b f using the rule mapped affinely onto [a, b].
    pub fn integrate<F: FnMut(&T) -> T>(&self, a: &T, b: &T, mut f: F) -> T {
        let half = (b.clone() - a.clone()) * T::half();
        let mid = (b.clone() + a.clone()) * T::half();
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let t = mid.clone() + half.clone() * x.clone();
            acc += w.clone() * f(&t);
        }
        acc * half
    }

    /// Mapped nodes and weights on [a, b].
    pub fn mapped(&self, a: &T, b: &T) -> Vec<(T, T)> {
        let half = (b.clone() - a.clone()) * T::half();
        let mid = (b.clone() + a.clone()) * T::half();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| (mid.clone() + half.clone() * x.clone(), w.clone() * half.clone()))
            .collect()
    }
}

// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre<T: Real>(n: usize, x: &T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x.clone();
    for j in 2..=n {
        let jj = T::from_u64(j as u64);
        let p2 = ((T::two() * jj.clone() - T::one()) * x.clone() * p1.clone()
            - (jj.clone() - T::one()) * p0)
            / jj;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let nn = T::from_u64(n as u64);
    let d = nn * (x.clone() * p1.clone() - p0) / (x.clone() * x.clone() - T::one());
    (p1, d)
}
