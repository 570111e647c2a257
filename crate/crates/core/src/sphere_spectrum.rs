//! Spectrum of the Laplace–Beltrami operator on `S^{N-1}`.
//!
//! Eigenvalues are `alpha_nu = nu (nu + N - 2)`. Every eigenvalue has a zonal
//! representative depending only on the first colatitude `theta_1`: a
//! Gegenbauer polynomial `C_nu^{(N-2)/2}(cos theta_1)` for `N >= 3`, and
//! `cos(nu theta_1)` on the circle. All representatives returned here are
//! normalized to unit norm in `L^2(S^{N-1})`.
//!
//! [`ZonalGrid`] carries the finite-difference machinery for zonal scalars
//! and for axisymmetric vector fields `a(theta) e_rho + b(theta) e_theta1`,
//! which are handled through their Cartesian components (see
//! [`ZonalGrid::vector_laplacian`]).

use crate::error::{Error, Result};
use crate::numerics::{
    diff1, diff2, gauss_symmetric_jacobi, pairwise_sum, sphere_area, symmetric_jacobi_mass,
    Boundary, Parity, StencilOrder,
};
use num::{FromPrimitive, Num};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// One spherical-harmonic eigenvalue level of `-Delta_sigma` on `S^{N-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub nu: usize,
    pub alpha: f64,
    pub dimension: usize,
}

impl Mode {
    pub fn new(nu: usize, dimension: usize) -> Self {
        Self { nu, alpha: eigenvalue(nu, dimension), dimension }
    }

    pub fn value(&self, theta1: f64) -> f64 {
        zonal_eigenfunction(self.nu, self.dimension, theta1)
    }

    pub fn derivative(&self, theta1: f64) -> f64 {
        zonal_derivative(self.nu, self.dimension, theta1)
    }
}

/// `nu (nu + N - 2)`, computed in integer arithmetic.
pub fn eigenvalue(nu: usize, dimension: usize) -> f64 {
    let nu = nu as u64;
    (nu * (nu + dimension as u64 - 2)) as f64
}

/// `alpha_s = s (s + N - 2)` for real `s`.
pub fn alpha_s(s: f64, dimension: usize) -> f64 {
    s * (s + dimension as f64 - 2.0)
}

/// Gegenbauer polynomial `C_n^lambda(x)` by the three-term recurrence.
///
/// Generic so that the recurrence can be run in exact rational arithmetic.
pub fn gegenbauer<T>(n: usize, lambda: T, x: T) -> T
where
    T: Clone + Num + FromPrimitive,
{
    let two = T::from_u8(2).unwrap();
    let mut prev = T::one();
    if n == 0 {
        return prev;
    }
    let mut cur = two.clone() * lambda.clone() * x.clone();
    for k in 2..=n {
        let kf = T::from_usize(k).unwrap();
        let next = (two.clone() * x.clone() * (kf.clone() + lambda.clone() - T::one()) * cur.clone()
            - (kf.clone() + two.clone() * lambda.clone() - two.clone()) * prev)
            / kf;
        prev = cur;
        cur = next;
    }
    cur
}

/// `d^k/dx^k C_n^lambda(x) = 2^k (lambda)_k C_{n-k}^{lambda+k}(x)`.
fn gegenbauer_dx(n: usize, lambda: f64, x: f64, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let rising: f64 = (0..k).map(|j| lambda + j as f64).product();
    2f64.powi(k as i32) * rising * gegenbauer(n - k, lambda + k as f64, x)
}

/// Squared `L^2(S^{N-1})` norm of `C_nu^{(N-2)/2}(cos theta_1)`, `N >= 3`.
fn gegenbauer_sphere_norm2(nu: usize, dimension: usize) -> f64 {
    let lambda = (dimension as f64 - 2.0) / 2.0;
    let mut h = symmetric_jacobi_mass(dimension as i32 - 3);
    for k in 1..=nu {
        let k = k as f64;
        h *= (k + 2.0 * lambda - 1.0) / k * (k + lambda - 1.0) / (k + lambda);
    }
    sphere_area(dimension - 2) * h
}

/// Value and first three `theta_1`-derivatives of the normalized zonal
/// eigenfunction `psi_nu`.
pub fn zonal_jet(nu: usize, dimension: usize, theta1: f64) -> [f64; 4] {
    assert!(dimension >= 2, "N must be at least 2");
    if dimension == 2 {
        let c = if nu == 0 { (2.0 * PI).sqrt().recip() } else { PI.sqrt().recip() };
        let v = nu as f64;
        let (s, co) = (v * theta1).sin_cos();
        return [c * co, -c * v * s, -c * v * v * co, c * v * v * v * s];
    }
    let lambda = (dimension as f64 - 2.0) / 2.0;
    let c = gegenbauer_sphere_norm2(nu, dimension).sqrt().recip();
    let (s, x) = theta1.sin_cos();
    let d: Vec<f64> = (0..4).map(|k| gegenbauer_dx(nu, lambda, x, k)).collect();
    [
        c * d[0],
        -c * s * d[1],
        c * (s * s * d[2] - x * d[1]),
        c * (-s * s * s * d[3] + 3.0 * s * x * d[2] + s * d[1]),
    ]
}

/// Normalized zonal eigenfunction `psi_nu(theta_1)`.
pub fn zonal_eigenfunction(nu: usize, dimension: usize, theta1: f64) -> f64 {
    zonal_jet(nu, dimension, theta1)[0]
}

/// `d psi_nu / d theta_1`; the surface gradient is this times `e_theta1`.
pub fn zonal_derivative(nu: usize, dimension: usize, theta1: f64) -> f64 {
    zonal_jet(nu, dimension, theta1)[1]
}

/// Product quadrature on `S^{N-1}` in polar angles.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    pub dimension: usize,
    pub order: usize,
    /// Each node is `(theta_1, ..., theta_{N-1})`.
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Set when the weights miss the sphere area by more than `1e-12`
    /// relative.
    pub degraded: bool,
}

impl SphereQuadrature {
    pub fn total_weight(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }
}

/// Product rule: Gauss nodes in `cos theta_k` for the weight
/// `(sin theta_k)^{N-k-1}` (`k <= N-2`) and `2 * order` uniform nodes in the
/// azimuth `theta_{N-1}`. The node count is `order^{N-2} * 2 order`, so this
/// is meant for small `N`; zonal integrands should use [`zonal_quadrature`].
pub fn sphere_quadrature(dimension: usize, order: usize) -> Result<SphereQuadrature> {
    if dimension < 2 {
        return Err(Error::InvalidDimension(dimension));
    }
    if order == 0 {
        return Err(Error::InvalidGrid("quadrature order must be at least 1".into()));
    }
    let azimuth: Vec<f64> = (0..2 * order).map(|j| PI * j as f64 / order as f64).collect();
    let mut nodes: Vec<Vec<f64>> = vec![Vec::new()];
    let mut weights = vec![1.0];
    for k in 1..dimension - 1 {
        let (x, w) = gauss_symmetric_jacobi(order, (dimension - k) as i32 - 2);
        let mut next_nodes = Vec::with_capacity(nodes.len() * order);
        let mut next_weights = Vec::with_capacity(nodes.len() * order);
        for (node, weight) in nodes.iter().zip(&weights) {
            for (xi, wi) in x.iter().zip(&w) {
                let mut n = node.clone();
                n.push(xi.acos());
                next_nodes.push(n);
                next_weights.push(weight * wi);
            }
        }
        nodes = next_nodes;
        weights = next_weights;
    }
    let mut out_nodes = Vec::with_capacity(nodes.len() * azimuth.len());
    let mut out_weights = Vec::with_capacity(nodes.len() * azimuth.len());
    let dphi = PI / order as f64;
    for (node, weight) in nodes.iter().zip(&weights) {
        for phi in &azimuth {
            let mut n = node.clone();
            n.push(*phi);
            out_nodes.push(n);
            out_weights.push(weight * dphi);
        }
    }
    let area = sphere_area(dimension - 1);
    let total = pairwise_sum(&out_weights);
    Ok(SphereQuadrature {
        dimension,
        order,
        nodes: out_nodes,
        weights: out_weights,
        degraded: ((total - area) / area).abs() > 1e-12,
    })
}

/// Quadrature for zonal integrands `int_{S^{N-1}} g(theta_1) d sigma`.
#[derive(Debug, Clone)]
pub struct ZonalQuadrature {
    pub theta: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ZonalQuadrature {
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self.theta.iter().zip(&self.weights).map(|(t, w)| w * g(*t)).collect();
        pairwise_sum(&terms)
    }
}

/// Gauss rule in `cos theta_1` times `|S^{N-2}|` for `N >= 3`; `2 * order`
/// uniform nodes on the circle for `N = 2`.
pub fn zonal_quadrature(dimension: usize, order: usize) -> ZonalQuadrature {
    if dimension == 2 {
        let m = 2 * order;
        let h = 2.0 * PI / m as f64;
        return ZonalQuadrature { theta: (0..m).map(|j| j as f64 * h).collect(), weights: vec![h; m] };
    }
    let (x, w) = gauss_symmetric_jacobi(order, dimension as i32 - 3);
    let ring = sphere_area(dimension - 2);
    ZonalQuadrature {
        theta: x.iter().map(|x| x.acos()).collect(),
        weights: w.iter().map(|w| w * ring).collect(),
    }
}

/// Angular sampling of zonal data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaLayout {
    /// Midpoint grid `theta_j = (j + 1/2) pi / M` on the open interval
    /// `(0, pi)`. Scalars are even and `e_theta1` components odd about both
    /// poles.
    #[default]
    Zonal,
    /// Periodic grid `theta_j = 2 pi j / M` on the full circle (`N = 2`).
    Circle,
}

/// Finite-difference operators on a zonal angular grid.
#[derive(Debug, Clone)]
pub struct ZonalGrid {
    dimension: usize,
    layout: ThetaLayout,
    count: usize,
    order: StencilOrder,
    theta: Vec<f64>,
}

impl ZonalGrid {
    pub fn new(dimension: usize, layout: ThetaLayout, count: usize) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::InvalidDimension(dimension));
        }
        if count < 5 {
            return Err(Error::InvalidGrid(format!("need at least 5 angular nodes, got {count}")));
        }
        if layout == ThetaLayout::Circle && dimension != 2 {
            return Err(Error::InvalidGrid("circle layout requires N = 2".into()));
        }
        let h = match layout {
            ThetaLayout::Zonal => PI / count as f64,
            ThetaLayout::Circle => 2.0 * PI / count as f64,
        };
        let shift = if layout == ThetaLayout::Zonal { 0.5 } else { 0.0 };
        let theta = (0..count).map(|j| (j as f64 + shift) * h).collect();
        Ok(Self { dimension, layout, count, order: StencilOrder::Second, theta })
    }

    pub fn with_order(mut self, order: StencilOrder) -> Self {
        self.order = order;
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn layout(&self) -> ThetaLayout {
        self.layout
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn step(&self) -> f64 {
        match self.layout {
            ThetaLayout::Zonal => PI / self.count as f64,
            ThetaLayout::Circle => 2.0 * PI / self.count as f64,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.theta
    }

    /// Weights of the midpoint rule for `int_{S^{N-1}} g d sigma`.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.step();
        match self.layout {
            ThetaLayout::Circle => vec![h; self.count],
            ThetaLayout::Zonal => {
                let ring = sphere_area(self.dimension - 2);
                let p = self.dimension as i32 - 2;
                self.theta.iter().map(|t| ring * h * t.sin().powi(p)).collect()
            }
        }
    }

    pub fn integrate(&self, g: &[f64]) -> f64 {
        let terms: Vec<f64> = g.iter().zip(self.weights()).map(|(g, w)| g * w).collect();
        pairwise_sum(&terms)
    }

    fn boundary(&self, parity: Parity) -> Boundary {
        match self.layout {
            ThetaLayout::Zonal => Boundary::Reflect(parity),
            ThetaLayout::Circle => Boundary::Periodic,
        }
    }

    /// `d/d theta_1` of samples with the given pole parity.
    pub fn derivative(&self, f: &[f64], parity: Parity) -> Vec<f64> {
        diff1(f, self.step(), self.boundary(parity), self.order)
    }

    pub fn second_derivative(&self, f: &[f64], parity: Parity) -> Vec<f64> {
        diff2(f, self.step(), self.boundary(parity), self.order)
    }

    /// Zonal `Delta_sigma` in `dim` dimensions applied to an even function.
    fn zonal_laplacian_in(&self, f: &[f64], dim: usize) -> Vec<f64> {
        let d2 = self.second_derivative(f, Parity::Even);
        if self.layout == ThetaLayout::Circle || dim == 2 {
            return d2;
        }
        let d1 = self.derivative(f, Parity::Even);
        let c = dim as f64 - 2.0;
        self.theta
            .iter()
            .zip(d2.iter().zip(&d1))
            .map(|(t, (d2, d1))| d2 + c * d1 / t.tan())
            .collect()
    }

    /// `Delta_sigma f = (sin)^{2-N} d/dtheta ((sin)^{N-2} df/dtheta)` for a
    /// zonal scalar.
    pub fn laplace_beltrami(&self, f: &[f64]) -> Vec<f64> {
        self.zonal_laplacian_in(f, self.dimension)
    }

    /// Cartesian components `(w1, w2)` of `a e_rho + b e_theta1`: `w1` is the
    /// `x_1` component and the remaining components are `w2` times a unit
    /// vector on `S^{N-2}`.
    pub fn cartesian(&self, a: &[f64], b: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut w1 = Vec::with_capacity(self.count);
        let mut w2 = Vec::with_capacity(self.count);
        for ((t, a), b) in self.theta.iter().zip(a).zip(b) {
            let (s, c) = t.sin_cos();
            w1.push(a * c - b * s);
            w2.push(a * s + b * c);
        }
        (w1, w2)
    }

    /// Inverse of [`ZonalGrid::cartesian`].
    pub fn polar(&self, w1: &[f64], w2: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut a = Vec::with_capacity(self.count);
        let mut b = Vec::with_capacity(self.count);
        for ((t, w1), w2) in self.theta.iter().zip(w1).zip(w2) {
            let (s, c) = t.sin_cos();
            a.push(w1 * c + w2 * s);
            b.push(-w1 * s + w2 * c);
        }
        (a, b)
    }

    /// Componentwise `Delta_sigma` of an axisymmetric vector field given by
    /// its Cartesian components.
    ///
    /// For `w2` times a unit vector `phi` on `S^{N-2}` one has
    /// `Delta_sigma(w2 phi) = sin * (L_{N+2} q - (N-1) q) phi` with
    /// `q = w2 / sin` even, which keeps every stencil regular at the poles.
    pub fn vector_laplacian(&self, w1: &[f64], w2: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let l1 = self.laplace_beltrami(w1);
        if self.layout == ThetaLayout::Circle {
            return (l1, self.second_derivative(w2, Parity::Even));
        }
        let q: Vec<f64> = w2.iter().zip(&self.theta).map(|(w, t)| w / t.sin()).collect();
        let lq = self.zonal_laplacian_in(&q, self.dimension + 2);
        let n1 = self.dimension as f64 - 1.0;
        let l2 = self
            .theta
            .iter()
            .zip(lq.iter().zip(&q))
            .map(|(t, (lq, q))| t.sin() * (lq - n1 * q))
            .collect();
        (l1, l2)
    }

    /// Pointwise `|nabla_sigma v|^2` (sum over Cartesian components).
    pub fn vector_gradient_sq(&self, w1: &[f64], w2: &[f64]) -> Vec<f64> {
        match self.layout {
            ThetaLayout::Circle => {
                let d1 = self.derivative(w1, Parity::Even);
                let d2 = self.derivative(w2, Parity::Even);
                d1.iter().zip(&d2).map(|(a, b)| a * a + b * b).collect()
            }
            ThetaLayout::Zonal => {
                let d1 = self.derivative(w1, Parity::Even);
                let d2 = self.derivative(w2, Parity::Odd);
                let c = self.dimension as f64 - 2.0;
                (0..self.count)
                    .map(|j| {
                        let q = w2[j] / self.theta[j].sin();
                        d1[j] * d1[j] + d2[j] * d2[j] + c * q * q
                    })
                    .collect()
            }
        }
    }

    /// Cartesian components of `nabla_sigma f = f' e_theta1`.
    pub fn scalar_gradient(&self, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let d = self.derivative(f, Parity::Even);
        self.cartesian(&vec![0.0; self.count], &d)
    }

    /// Samples of `psi_nu` on the grid nodes.
    pub fn sample_mode(&self, nu: usize) -> Vec<f64> {
        self.theta.iter().map(|t| zonal_eigenfunction(nu, self.dimension, *t)).collect()
    }
}

/// `Delta_sigma f` for zonal samples on the open midpoint grid of
/// `f.len()` nodes.
pub fn laplace_beltrami_zonal(f: &[f64], dimension: usize) -> Result<Vec<f64>> {
    let grid = ZonalGrid::new(dimension, ThetaLayout::Zonal, f.len())?;
    Ok(grid.laplace_beltrami(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eigenvalue_examples() {
        assert_eq!(eigenvalue(0, 7), 0.0);
        assert_eq!(eigenvalue(1, 5), 4.0);
        for n in 2..10 {
            assert_eq!(eigenvalue(2, n), 2.0 * n as f64);
            assert_eq!(eigenvalue(1, n), n as f64 - 1.0);
        }
        assert_eq!(alpha_s(2.0, 4), 8.0);
    }

    #[test]
    fn constant_mode_is_normalized_constant() {
        for n in 2..8 {
            let c = sphere_area(n - 1).sqrt().recip();
            for t in [0.1, 1.0, 2.5] {
                assert_relative_eq!(zonal_eigenfunction(0, n, t), c, epsilon = 1e-14);
                assert_eq!(zonal_derivative(0, n, t), 0.0);
            }
        }
    }

    #[test]
    fn first_mode_is_odd() {
        let r = zonal_eigenfunction(1, 3, 0.0) / zonal_eigenfunction(1, 3, PI);
        assert_relative_eq!(r, -1.0, epsilon = 1e-14);
        let r = zonal_eigenfunction(1, 3, 0.7) / 0.7f64.cos();
        assert_relative_eq!(r, zonal_eigenfunction(1, 3, 0.0), epsilon = 1e-14);
    }

    #[test]
    fn derivative_vanishes_at_poles() {
        for n in 2..7 {
            for nu in 0..6 {
                assert!(zonal_derivative(nu, n, 0.0).abs() < 1e-13);
                assert!(zonal_derivative(nu, n, PI).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jet_matches_finite_differences() {
        let h = 1e-4;
        for n in [2, 3, 5] {
            for nu in [1, 3, 4] {
                let t = 0.83;
                let j = zonal_jet(nu, n, t);
                let jp = zonal_jet(nu, n, t + h);
                let jm = zonal_jet(nu, n, t - h);
                for k in 0..3 {
                    let fd = (jp[k] - jm[k]) / (2.0 * h);
                    assert!((fd - j[k + 1]).abs() < 1e-6 * (1.0 + j[k + 1].abs()), "N={n} nu={nu} k={k}");
                }
            }
        }
    }

    #[test]
    fn derivative_peaks_at_equator_for_first_mode() {
        let m = 1001;
        let grid: Vec<f64> = (0..m).map(|j| PI * j as f64 / (m - 1) as f64).collect();
        let h = 1e-5;
        let fd: Vec<f64> = grid
            .iter()
            .map(|t| ((zonal_eigenfunction(1, 3, t + h) - zonal_eigenfunction(1, 3, t - h)) / (2.0 * h)).abs())
            .collect();
        let argmax = (0..m).max_by(|&a, &b| fd[a].total_cmp(&fd[b])).unwrap();
        assert_eq!(argmax, m / 2);
        let exact: Vec<f64> = grid.iter().map(|t| zonal_derivative(1, 3, *t).abs()).collect();
        let argmax_exact = (0..m).max_by(|&a, &b| exact[a].total_cmp(&exact[b])).unwrap();
        assert_eq!(argmax_exact, m / 2);
    }

    #[test]
    fn orthogonality_of_second_and_constant_modes() {
        let q = zonal_quadrature(3, 20);
        let ip = q.integrate(|t| zonal_eigenfunction(2, 3, t) * zonal_eigenfunction(0, 3, t));
        assert!(ip.abs() < 1e-10);
    }

    #[test]
    fn circle_quadrature() {
        for m in [1, 3, 8] {
            let q = sphere_quadrature(2, m).unwrap();
            assert_eq!(q.nodes.len(), 2 * m);
            assert_relative_eq!(q.total_weight(), 2.0 * PI, epsilon = 1e-13);
            let h = q.nodes[1][0] - q.nodes[0][0];
            assert!(q.nodes.windows(2).all(|w| ((w[1][0] - w[0][0]) - h).abs() < 1e-14));
        }
    }

    #[test]
    fn sphere_areas_from_quadrature() {
        let q = sphere_quadrature(3, 6).unwrap();
        assert!(((q.total_weight() - 4.0 * PI) / (4.0 * PI)).abs() < 1e-12);
        assert!(!q.degraded);
        let q = sphere_quadrature(4, 5).unwrap();
        assert!(((q.total_weight() - 2.0 * PI * PI) / (2.0 * PI * PI)).abs() < 1e-12);
    }

    #[test]
    fn grid_rejects_tiny_grids() {
        assert!(matches!(laplace_beltrami_zonal(&[1.0; 4], 3), Err(Error::InvalidGrid(_))));
        assert!(ZonalGrid::new(3, ThetaLayout::Circle, 10).is_err());
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let f = vec![2.5; 64];
        for n in 2..6 {
            let l = laplace_beltrami_zonal(&f, n).unwrap();
            assert!(l.iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn cartesian_and_polar_are_inverse() {
        let g = ZonalGrid::new(4, ThetaLayout::Zonal, 17).unwrap();
        let a: Vec<f64> = g.nodes().iter().map(|t| t.cos()).collect();
        let b: Vec<f64> = g.nodes().iter().map(|t| (2.0 * t).sin()).collect();
        let (w1, w2) = g.cartesian(&a, &b);
        let (a2, b2) = g.polar(&w1, &w2);
        for j in 0..17 {
            assert_relative_eq!(a[j], a2[j], epsilon = 1e-15);
            assert_relative_eq!(b[j], b2[j], epsilon = 1e-15);
        }
    }

    #[test]
    fn frame_gradient_formula_matches_cartesian() {
        // |grad_sigma v|^2 = (a' - b)^2 + (a + b')^2 + (N-2)(a + b cot)^2
        let n = 5;
        let g = ZonalGrid::new(n, ThetaLayout::Zonal, 4000).unwrap();
        let th = g.nodes();
        let a: Vec<f64> = th.iter().map(|t| zonal_eigenfunction(2, n, *t)).collect();
        let b: Vec<f64> = th.iter().map(|t| 0.3 * zonal_derivative(3, n, *t)).collect();
        let (w1, w2) = g.cartesian(&a, &b);
        let grad = g.vector_gradient_sq(&w1, &w2);
        let scale = grad.iter().cloned().fold(0.0, f64::max);
        for j in (0..4000).step_by(37) {
            let t = th[j];
            let [_, ap, _, _] = zonal_jet(2, n, t);
            let bp = 0.3 * zonal_jet(3, n, t)[2];
            let exact = (ap - b[j]).powi(2) + (a[j] + bp).powi(2) + (n as f64 - 2.0) * (a[j] + b[j] / t.tan()).powi(2);
            assert!((grad[j] - exact).abs() < 1e-5 * scale, "j={j}: {} vs {exact}", grad[j]);
        }
    }
}
