//! Small numerical building blocks shared by the other modules: pairwise
//! summation, centered difference stencils, Gauss rules for symmetric Jacobi
//! weights and the sphere-area recurrence.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Pairwise (cascade) summation. Deterministic for a fixed input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Uniform one-dimensional grid `start + i * step`, `i < count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl UniformGrid {
    pub fn new(start: f64, step: f64, count: usize) -> Self {
        Self { start, step, count }
    }

    /// Grid of `count` nodes whose interior `count - 4` cells span `[a, b]`,
    /// i.e. two extra nodes are appended beyond each end.
    pub fn padded(a: f64, b: f64, count: usize) -> Self {
        assert!(count >= 6 && b > a);
        let step = (b - a) / (count - 5) as f64;
        Self { start: a - 2.0 * step, step, count }
    }

    pub fn node(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.node(i)).collect()
    }

    pub fn end(&self) -> f64 {
        self.node(self.count.saturating_sub(1))
    }
}

/// How a stencil continues a sampled function past the ends of its array.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Values beyond the ends are zero (compactly supported data).
    Zero,
    /// Mirror about the half-cell points outside each end with sign `+1`
    /// (even) or `-1` (odd). Matches a midpoint grid on `(0, pi)`.
    Reflect(Parity),
    /// Periodic continuation.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Stencil accuracy for centered differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StencilOrder {
    #[default]
    Second,
    Fourth,
}

#[inline]
fn ghost(f: &[f64], i: isize, boundary: Boundary) -> f64 {
    let n = f.len() as isize;
    if (0..n).contains(&i) {
        return f[i as usize];
    }
    match boundary {
        Boundary::Zero => 0.0,
        Boundary::Periodic => f[i.rem_euclid(n) as usize],
        Boundary::Reflect(p) => {
            // node -1 mirrors node 0, node -2 mirrors node 1, ...
            let j = if i < 0 { -i - 1 } else { 2 * n - 1 - i };
            p.sign() * f[j as usize]
        }
    }
}

/// Centered first derivative.
pub fn diff1(f: &[f64], h: f64, boundary: Boundary, order: StencilOrder) -> Vec<f64> {
    let n = f.len() as isize;
    (0..n)
        .map(|i| match order {
            StencilOrder::Second => (ghost(f, i + 1, boundary) - ghost(f, i - 1, boundary)) / (2.0 * h),
            StencilOrder::Fourth => {
                (-ghost(f, i + 2, boundary) + 8.0 * ghost(f, i + 1, boundary)
                    - 8.0 * ghost(f, i - 1, boundary)
                    + ghost(f, i - 2, boundary))
                    / (12.0 * h)
            }
        })
        .collect()
}

/// Centered second derivative.
pub fn diff2(f: &[f64], h: f64, boundary: Boundary, order: StencilOrder) -> Vec<f64> {
    let n = f.len() as isize;
    (0..n)
        .map(|i| {
            let c = f[i as usize];
            match order {
                StencilOrder::Second => {
                    (ghost(f, i + 1, boundary) - 2.0 * c + ghost(f, i - 1, boundary)) / (h * h)
                }
                StencilOrder::Fourth => {
                    (-ghost(f, i + 2, boundary) + 16.0 * ghost(f, i + 1, boundary) - 30.0 * c
                        + 16.0 * ghost(f, i - 1, boundary)
                        - ghost(f, i - 2, boundary))
                        / (12.0 * h * h)
                }
            }
        })
        .collect()
}

/// Centered derivative of order `k <= 3`, built by repeated application of
/// the first/second derivative stencils.
pub fn diff(f: &[f64], k: usize, h: f64, boundary: Boundary, order: StencilOrder) -> Vec<f64> {
    match k {
        0 => f.to_vec(),
        1 => diff1(f, h, boundary, order),
        2 => diff2(f, h, boundary, order),
        3 => {
            let b1 = match boundary {
                Boundary::Reflect(p) => Boundary::Reflect(p.flip()),
                b => b,
            };
            diff2(&diff1(f, h, boundary, order), h, b1, order)
        }
        _ => unreachable!("callers validate the order"),
    }
}

/// Surface area of the unit sphere `S^{d}` in `R^{d+1}`.
pub fn sphere_area(d: usize) -> f64 {
    match d {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 1.0) * sphere_area(d - 2),
    }
}

/// `int_{-1}^{1} (1 - x^2)^mu dx` for `mu = m/2`, `m >= -1`.
pub fn symmetric_jacobi_mass(twice_mu: i32) -> f64 {
    match twice_mu {
        -1 => PI,
        0 => 2.0,
        m => {
            let mu = m as f64 / 2.0;
            symmetric_jacobi_mass(m - 2) * (2.0 * mu) / (2.0 * mu + 1.0)
        }
    }
}

/// Gauss rule with `order` nodes for the weight `(1 - x^2)^mu` on `[-1, 1]`,
/// `mu = twice_mu / 2 >= 0`, via the eigen-decomposition of the Jacobi matrix.
/// Nodes are returned in increasing order.
pub fn gauss_symmetric_jacobi(order: usize, twice_mu: i32) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let mu = twice_mu as f64 / 2.0;
    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let kf = k as f64;
        let b = (kf * (kf + 2.0 * mu) / (4.0 * (kf + mu).powi(2) - 1.0)).sqrt();
        jacobi[(k, k - 1)] = b;
        jacobi[(k - 1, k)] = b;
    }
    let mass = symmetric_jacobi_mass(twice_mu);
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..order)
        .map(|i| (eig.eigenvalues[i], mass * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Enforce the exact reflection symmetry of the rule.
    for i in 0..order / 2 {
        let j = order - 1 - i;
        let x = 0.5 * (pairs[j].0 - pairs[i].0);
        let w = 0.5 * (pairs[i].1 + pairs[j].1);
        pairs[i] = (-x, w);
        pairs[j] = (x, w);
    }
    if order % 2 == 1 {
        pairs[order / 2].0 = 0.0;
    }
    pairs.into_iter().unzip()
}

/// Least-squares fit of `q = limit + c / n^2` to the given samples.
/// Returns `(limit, c)`.
pub fn fit_inverse_square(samples: &[(f64, f64)]) -> (f64, f64) {
    match samples.len() {
        0 => (f64::NAN, f64::NAN),
        1 => (samples[0].1, 0.0),
        len => {
            let m = len as f64;
            let xs: Vec<f64> = samples.iter().map(|(n, _)| 1.0 / (n * n)).collect();
            let ys: Vec<f64> = samples.iter().map(|(_, q)| *q).collect();
            let mx = xs.iter().sum::<f64>() / m;
            let my = ys.iter().sum::<f64>() / m;
            let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
            let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let c = sxy / sxx;
            (my - c * mx, c)
        }
    }
}

/// Richardson extrapolation to `n -> infinity` of samples `(n, q_n)` whose
/// error expands in powers of `1/n^2`: the polynomial in `x = 1/n^2` through
/// all samples, evaluated at `x = 0` (Neville's scheme).
pub fn richardson_inverse_square(samples: &[(f64, f64)]) -> f64 {
    let x: Vec<f64> = samples.iter().map(|(n, _)| 1.0 / (n * n)).collect();
    let mut p: Vec<f64> = samples.iter().map(|(_, q)| *q).collect();
    if p.is_empty() {
        return f64::NAN;
    }
    let m = p.len();
    for level in 1..m {
        for i in 0..m - level {
            let j = i + level;
            p[i] = (x[j] * p[i] - x[i] * p[i + 1]) / (x[j] - x[i]);
        }
    }
    p[0]
}

/// Observed convergence order `log(e_coarse / e_fine) / log(ratio)`.
pub fn observed_order(coarse: f64, fine: f64, ratio: f64) -> f64 {
    (coarse / fine).ln() / ratio.ln()
}
