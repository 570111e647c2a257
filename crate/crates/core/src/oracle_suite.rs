//! Independent checks: Cartesian finite-difference quotients at N = 2, 3,
//! the sphere commutation and integral identities behind the polynomial
//! reduction, the infimum lemma on exact rationals, and monotonicity scans of
//! the reduced quotients.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, Complex, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numerics::{observed_order, pairwise_sum, UniformGrid};
use crate::quotient_polynomials::{f_hardy, f_rellich, p1, p2, p3};
use crate::sphere_spectrum::{alpha_s, eigenvalue, zonal_jet, zonal_quadrature, ThetaLayout, ZonalGrid};
use crate::weight_transforms::{make_setup, ProblemKind, ProblemSetup};

/// Seed used when a caller does not supply one.
pub const DEFAULT_SEED: u64 = 20_160_117;

/// Outcome of one verification check, serialized as the report JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub parameters: BTreeMap<String, Value>,
    pub residuals: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub raw_residuals: Vec<f64>,
    pub violations: usize,
    pub samples: usize,
    pub resolution: Option<usize>,
    pub convergence_order: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerificationReport {
    fn new(check: &str, tolerance: f64) -> Self {
        Self {
            check: check.to_string(),
            parameters: BTreeMap::new(),
            residuals: Vec::new(),
            raw_residuals: Vec::new(),
            violations: 0,
            samples: 0,
            resolution: None,
            convergence_order: None,
            tolerance,
            pass: false,
        }
    }

    fn param(mut self, key: &str, value: Value) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

// ---------------------------------------------------------------------------
// Cartesian oracle

/// Smooth potential `((r-1)(2-r))^p P(x)` supported in `1 <= |x| <= 2`,
/// with `P` a polynomial of degree at most two.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusPotential {
    pub dimension: usize,
    pub power: i32,
    /// `[1, x_1, .., x_N, x_1 x_1, x_1 x_2, .., x_N x_N]` coefficients
    /// (upper triangle of the quadratic part, row by row).
    pub coefficients: Vec<f64>,
}

impl AnnulusPotential {
    fn term_count(dimension: usize) -> usize {
        1 + dimension + dimension * (dimension + 1) / 2
    }

    /// Random coefficients in `[-1, 1]`.
    pub fn random(dimension: usize, rng: &mut impl Rng) -> Self {
        let coefficients = (0..Self::term_count(dimension)).map(|_| rng.random_range(-1.0..=1.0)).collect();
        Self { dimension, power: 6, coefficients }
    }

    /// `B(r) psi(theta_1)`-type separable potential with `P = x_1` (a zonal
    /// mode-1 field).
    pub fn zonal_first_mode(dimension: usize) -> Self {
        let mut coefficients = vec![0.0; Self::term_count(dimension)];
        coefficients[1] = 1.0;
        Self { dimension, power: 6, coefficients }
    }

    fn check(&self) -> Result<()> {
        if !(2..=3).contains(&self.dimension) {
            return Err(Error::InvalidDimension(self.dimension));
        }
        if self.coefficients.len() != Self::term_count(self.dimension) {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                Self::term_count(self.dimension),
                self.coefficients.len()
            )));
        }
        if self.power < 3 {
            return Err(Error::Support("cutoff power must be at least 3".into()));
        }
        Ok(())
    }

    fn radial(&self, r: f64) -> (f64, f64) {
        if r <= 1.0 || r >= 2.0 {
            return (0.0, 0.0);
        }
        let p = self.power;
        let s = (r - 1.0) * (2.0 - r);
        (s.powi(p), p as f64 * s.powi(p - 1) * (3.0 - 2.0 * r))
    }

    /// `P(x)` and its gradient.
    fn poly(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let n = self.dimension;
        let c = &self.coefficients;
        let mut value = c[0];
        let mut grad = vec![0.0; n];
        for i in 0..n {
            value += c[1 + i] * x[i];
            grad[i] += c[1 + i];
        }
        let mut k = 1 + n;
        for i in 0..n {
            for j in i..n {
                value += c[k] * x[i] * x[j];
                grad[i] += c[k] * x[j];
                grad[j] += c[k] * x[i];
                k += 1;
            }
        }
        (value, grad)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (b, _) = self.radial(r);
        if b == 0.0 {
            return 0.0;
        }
        b * self.poly(x).0
    }

    /// `u = grad phi`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (b, db) = self.radial(r);
        if b == 0.0 && db == 0.0 {
            return vec![0.0; x.len()];
        }
        let (p, dp) = self.poly(x);
        x.iter().zip(&dp).map(|(xi, dpi)| db * xi / r * p + b * dpi).collect()
    }

    /// Samples on the cube `[-L, L]^N` with `L` just above `2 + 2 step`.
    pub fn sample(&self, step: f64) -> Result<CartesianPotential> {
        self.check()?;
        if !(step > 0.0 && step <= 0.05) {
            return Err(Error::InvalidGrid(format!("Cartesian step must lie in (0, 0.05], got {step}")));
        }
        let half = ((2.0 + 3.0 * step) / step).ceil() as usize;
        let count = 2 * half + 1;
        let grid = UniformGrid::new(-(half as f64) * step, step, count);
        let n = self.dimension;
        let total = count.pow(n as u32);
        let phi = (0..total)
            .into_par_iter()
            .map(|idx| self.value(&node_coords(idx, n, &grid)))
            .collect();
        let p = CartesianPotential { dimension: n, grid, phi };
        p.validate()?;
        Ok(p)
    }
}

fn node_index(idx: usize, axis: usize, dimension: usize, count: usize) -> usize {
    (idx / count.pow((dimension - 1 - axis) as u32)) % count
}

fn node_coords(idx: usize, dimension: usize, grid: &UniformGrid) -> Vec<f64> {
    (0..dimension).map(|a| grid.node(node_index(idx, a, dimension, grid.count))).collect()
}

/// Samples of a potential on a uniform Cartesian box, row-major with the
/// last axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartesianPotential {
    pub dimension: usize,
    pub grid: UniformGrid,
    pub phi: Vec<f64>,
}

impl CartesianPotential {
    /// Shape and support: `phi` vanishes on the two outermost shells of the
    /// box and at every node with `|x| <= 0.9`, so the first two centered
    /// differences vanish there as well whenever `step <= 0.05`.
    pub fn validate(&self) -> Result<()> {
        let n = self.dimension;
        if !(2..=3).contains(&n) {
            return Err(Error::InvalidDimension(n));
        }
        let count = self.grid.count;
        if count < 9 || self.phi.len() != count.pow(n as u32) {
            return Err(Error::InvalidGrid(format!("phi has {} samples for {count}^{n} nodes", self.phi.len())));
        }
        if !(self.grid.step > 0.0 && self.grid.step <= 0.05) {
            return Err(Error::Support(format!("step {} exceeds 0.05", self.grid.step)));
        }
        for (idx, v) in self.phi.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Support(format!("non-finite sample at node {idx}")));
            }
            if *v == 0.0 {
                continue;
            }
            let outer = (0..n).any(|a| {
                let i = node_index(idx, a, n, count);
                i < 2 || i + 2 >= count
            });
            if outer {
                return Err(Error::Support(format!("nonzero sample on the outer shells at node {idx}")));
            }
            let x = node_coords(idx, n, &self.grid);
            let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r <= 0.9 {
                return Err(Error::Support(format!("nonzero sample at |x| = {r:.4} <= 0.9")));
            }
        }
        Ok(())
    }

    /// Per-node integrands, reusable across weights.
    pub fn densities(&self) -> Result<CartesianDensities> {
        self.validate()?;
        let n = self.dimension;
        let count = self.grid.count;
        let h = self.grid.step;
        let strides: Vec<usize> = (0..n).map(|a| count.pow((n - 1 - a) as u32)).collect();
        let total = self.phi.len();
        let shifted = |f: &[f64], idx: usize, axis: usize, forward: bool| -> f64 {
            let i = node_index(idx, axis, n, count);
            if forward {
                if i + 1 < count {
                    f[idx + strides[axis]]
                } else {
                    0.0
                }
            } else if i > 0 {
                f[idx - strides[axis]]
            } else {
                0.0
            }
        };
        let u: Vec<Vec<f64>> = (0..n)
            .map(|a| {
                (0..total)
                    .into_par_iter()
                    .map(|idx| (shifted(&self.phi, idx, a, true) - shifted(&self.phi, idx, a, false)) / (2.0 * h))
                    .collect()
            })
            .collect();
        let rows: Vec<Option<[f64; 4]>> = (0..total)
            .into_par_iter()
            .map(|idx| {
                let mut u2 = 0.0;
                let mut grad = 0.0;
                let mut lap = 0.0;
                for comp in &u {
                    let c = comp[idx];
                    u2 += c * c;
                    let mut l = 0.0;
                    for a in 0..n {
                        let (fwd, bwd) = (shifted(comp, idx, a, true), shifted(comp, idx, a, false));
                        let g = (fwd - bwd) / (2.0 * h);
                        grad += g * g;
                        l += (fwd - 2.0 * c + bwd) / (h * h);
                    }
                    lap += l * l;
                }
                if u2 == 0.0 && grad == 0.0 && lap == 0.0 {
                    return None;
                }
                let x = node_coords(idx, n, &self.grid);
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                Some([r, u2, grad, lap])
            })
            .collect();
        let nodes: Vec<[f64; 4]> = rows.into_iter().flatten().collect();
        if nodes.iter().all(|row| row[1] == 0.0) {
            return Err(Error::ZeroField);
        }
        Ok(CartesianDensities { dimension: n, cell: h.powi(n as i32), nodes })
    }
}

/// `(|x|, |u|^2, |grad u|^2, |Delta u|^2)` at every node where any of them
/// is nonzero.
#[derive(Debug, Clone)]
pub struct CartesianDensities {
    pub dimension: usize,
    pub cell: f64,
    nodes: Vec<[f64; 4]>,
}

impl CartesianDensities {
    /// Weighted quotient: Hardy `int |grad u|^2 |x|^{2g} / int |u|^2 |x|^{2g-2}`,
    /// Rellich `int |Delta u|^2 |x|^{2g} / int |u|^2 |x|^{2g-4}`.
    pub fn quotient(&self, gamma: f64, kind: ProblemKind) -> Result<f64> {
        let (col, shift) = match kind {
            ProblemKind::Hardy => (2, 2.0),
            ProblemKind::Rellich => (3, 4.0),
        };
        let num: Vec<f64> = self.nodes.iter().map(|n| n[col] * n[0].powf(2.0 * gamma)).collect();
        let den: Vec<f64> = self.nodes.iter().map(|n| n[1] * n[0].powf(2.0 * gamma - shift)).collect();
        let (num, den) = (pairwise_sum(&num) * self.cell, pairwise_sum(&den) * self.cell);
        if den == 0.0 {
            return Err(Error::ZeroField);
        }
        Ok(num / den)
    }
}

/// Hardy or Rellich quotient of `u = grad phi` by trapezoid quadrature with
/// centered differences.
pub fn cartesian_quotient(p: &CartesianPotential, gamma: f64, kind: ProblemKind) -> Result<f64> {
    p.densities()?.quotient(gamma, kind)
}

// ---------------------------------------------------------------------------
// Commutation identities on the sphere

/// `(eps + i lambda)^{-1}` at `(eps, lambda) = (1/2, 1)`.
pub fn default_commutation_alpha() -> Complex<f64> {
    Complex::new(0.5, 1.0).inv()
}

/// Pointwise residual fields (Cartesian `(w1, w2)` pairs) of the three
/// identities, the third split into real and imaginary parts.
fn commutation_fields(grid: &ZonalGrid, modes: &[(usize, f64)], alpha: Complex<f64>) -> [Vec<f64>; 8] {
    let n = grid.dimension();
    let nf = n as f64;
    let m = grid.len();
    // exact scalar data: f, f', Delta f, and (Delta f)'
    let mut f = vec![0.0; m];
    let mut df = vec![0.0; m];
    let mut lf = vec![0.0; m];
    let mut dlf = vec![0.0; m];
    for (j, t) in grid.nodes().iter().enumerate() {
        for &(nu, c) in modes {
            let jet = zonal_jet(nu, n, *t);
            let a = eigenvalue(nu, n);
            f[j] += c * jet[0];
            df[j] += c * jet[1];
            lf[j] -= c * a * jet[0];
            dlf[j] -= c * a * jet[1];
        }
    }
    let zero = vec![0.0; m];
    let (er1, er2) = grid.cartesian(&f, &zero); // e_rho f
    let (g1, g2) = grid.cartesian(&zero, &df); // grad f
    let (el1, el2) = grid.cartesian(&lf, &zero); // e_rho Delta f
    let (gl1, gl2) = grid.cartesian(&zero, &dlf); // grad Delta f
    let (ef1, ef2) = (er1.clone(), er2.clone());

    let (a1, a2) = grid.vector_laplacian(&er1, &er2);
    let (b1, b2) = grid.vector_laplacian(&g1, &g2);

    let mut out: [Vec<f64>; 8] = Default::default();
    for v in out.iter_mut() {
        v.resize(m, 0.0);
    }
    // third identity with the field f e_rho + alpha grad f computed directly
    let re: Vec<(f64, f64)> = (0..m).map(|j| (er1[j] + alpha.re * g1[j], er2[j] + alpha.re * g2[j])).collect();
    let (lr1, lr2) = grid.vector_laplacian(&re.iter().map(|x| x.0).collect::<Vec<_>>(), &re.iter().map(|x| x.1).collect::<Vec<_>>());
    let im1: Vec<f64> = g1.iter().map(|g| alpha.im * g).collect();
    let im2: Vec<f64> = g2.iter().map(|g| alpha.im * g).collect();
    let (li1, li2) = grid.vector_laplacian(&im1, &im2);

    for j in 0..m {
        let e = [(el1[j], ef1[j], g1[j], gl1[j]), (el2[j], ef2[j], g2[j], gl2[j])];
        for (c, (el, ef, g, gl)) in e.into_iter().enumerate() {
            let (lhs1, lhs2) = if c == 0 { (a1[j], b1[j]) } else { (a2[j], b2[j]) };
            out[c][j] = lhs1 - el - (2.0 * g - (nf - 1.0) * ef);
            out[2 + c][j] = lhs2 - gl - ((nf - 3.0) * g - 2.0 * el);
            // e_rho((1 - 2 alpha) Delta f - (N-1) f) + (2 + (N-3) alpha) grad f + alpha grad Delta f
            let rhs_re = (1.0 - 2.0 * alpha.re) * el - (nf - 1.0) * ef + (2.0 + (nf - 3.0) * alpha.re) * g + alpha.re * gl;
            let rhs_im = -2.0 * alpha.im * el + (nf - 3.0) * alpha.im * g + alpha.im * gl;
            let (lre, lim) = if c == 0 { (lr1[j], li1[j]) } else { (lr2[j], li2[j]) };
            out[4 + c][j] = lre - rhs_re;
            out[6 + c][j] = lim - rhs_im;
        }
    }
    out
}

fn pair_max(fields: &[Vec<f64>; 8], k: usize) -> f64 {
    max_abs(&fields[2 * k]).max(max_abs(&fields[2 * k + 1]))
}

/// Maximum residuals of the three commutation identities with
/// `alpha = (1/2 + i)^{-1}`; see [`verify_commutation_with`].
pub fn verify_commutation(dimension: usize, modes: &[(usize, f64)], resolution: usize) -> Result<VerificationReport> {
    verify_commutation_with(dimension, modes, resolution, default_commutation_alpha(), 1e-6)
}

/// Commutation identities with every `Delta_sigma` of a vector field applied
/// componentwise to Cartesian components by second-order differences on the
/// midpoint `theta_1` grid; scalar data (`f`, `grad f`, `Delta f`,
/// `grad Delta f`) are exact.
///
/// `raw_residuals` are max-norm residuals at `resolution` nodes:
/// `[first, second, third (real), third (imaginary)]`. The raw error is a pure
/// `O(h^2)` truncation term, so `residuals` holds the Richardson combination
/// `(9 r_{3M} - r_M) / 8` on the nested `M / 3M` grids, and
/// `convergence_order` the smallest order measured between `M/2` and `M`
/// (at `3M` the smallest raw residuals already carry rounding noise of
/// relative size `1e-2`). Passing needs every extrapolated residual within `tolerance` and every
/// measured order in `[1.8, 2.2]` (orders of residuals already at rounding
/// level, below `1e-10`, are not measured).
pub fn verify_commutation_with(
    dimension: usize,
    modes: &[(usize, f64)],
    resolution: usize,
    alpha: Complex<f64>,
    tolerance: f64,
) -> Result<VerificationReport> {
    if !(2..=3).contains(&dimension) {
        return Err(Error::InvalidDimension(dimension));
    }
    if let Some((nu, _)) = modes.iter().find(|(nu, _)| *nu > 6) {
        return Err(Error::Domain(format!("mode nu = {nu} exceeds the band limit 6")));
    }
    let coarse = ZonalGrid::new(dimension, ThetaLayout::Zonal, resolution)?;
    let fine = ZonalGrid::new(dimension, ThetaLayout::Zonal, 3 * resolution)?;
    let half = ZonalGrid::new(dimension, ThetaLayout::Zonal, resolution / 2)?;
    let rc = commutation_fields(&coarse, modes, alpha);
    let rf = commutation_fields(&fine, modes, alpha);
    let rh = commutation_fields(&half, modes, alpha);
    let mut extrapolated: [Vec<f64>; 8] = Default::default();
    for (k, out) in extrapolated.iter_mut().enumerate() {
        *out = (0..resolution).map(|j| (9.0 * rf[k][3 * j + 1] - rc[k][j]) / 8.0).collect();
    }
    let mut report = VerificationReport::new("commutation", tolerance)
        .param("N", json!(dimension))
        .param("modes", json!(modes))
        .param("alpha", json!([alpha.re, alpha.im]));
    report.resolution = Some(resolution);
    report.samples = resolution;
    let mut orders = Vec::new();
    for k in 0..4 {
        let (raw, raw_half) = (pair_max(&rc, k), pair_max(&rh, k));
        report.raw_residuals.push(raw);
        report.residuals.push(pair_max(&extrapolated, k));
        if raw > 1e-10 {
            orders.push(observed_order(raw_half, raw, 2.0));
        }
    }
    report.convergence_order = orders.iter().copied().reduce(f64::min);
    report.violations = report.residuals.iter().filter(|r| **r > tolerance).count()
        + orders.iter().filter(|o| !(1.8..=2.2).contains(*o)).count();
    report.pass = report.violations == 0;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Integral identities

/// Pointwise `(|v|^2, |grad_sigma v|^2, |Delta_sigma v|^2)` of
/// `v = f e_rho + beta grad_sigma f` from exact jets.
fn identity_densities(dimension: usize, modes: &[(usize, f64)], beta: Complex<f64>, theta: f64) -> [f64; 3] {
    let mut jet = [0.0; 4];
    for &(nu, c) in modes {
        let z = zonal_jet(nu, dimension, theta);
        for k in 0..4 {
            jet[k] += c * z[k];
        }
    }
    let re = |x: f64| Complex::new(x, 0.0);
    let (a, a1, a2) = (re(jet[0]), re(jet[1]), re(jet[2]));
    let (b, b1, b2) = (beta * jet[1], beta * jet[2], beta * jet[3]);
    let (s, c) = theta.sin_cos();
    let k = dimension as f64 - 2.0;
    let w1 = a * c - b * s;
    let w1d = a1 * c - a * s - b1 * s - b * c;
    let w1dd = a2 * c - a1 * s * 2.0 - a * c - b2 * s - b1 * c * 2.0 + b * s;
    let w2 = a * s + b * c;
    let w2d = a1 * s + a * c + b1 * c - b * s;
    let w2dd = a2 * s + a1 * c * 2.0 - a * s + b2 * c - b1 * s * 2.0 - b * c;
    let lap1 = w1dd + w1d * (k * c / s);
    let lap2 = w2dd + w2d * (k * c / s) - w2 * (k / (s * s));
    [
        w1.norm_sqr() + w2.norm_sqr(),
        w1d.norm_sqr() + w2d.norm_sqr() + k * w2.norm_sqr() / (s * s),
        lap1.norm_sqr() + lap2.norm_sqr(),
    ]
}

/// Relative residuals between quadrature of `int |v|^2`, `int |grad v|^2`,
/// `int |Delta v|^2` for `v = f e_rho + (eps + i lambda)^{-1} grad f` and the
/// spectral sides `sum c_nu^2 P_k(lambda, alpha_nu)`.
pub fn verify_integral_identities(setup: &ProblemSetup, lambda: f64, modes: &[(usize, f64)]) -> Result<VerificationReport> {
    let n = setup.dimension;
    if let Some((nu, _)) = modes.iter().find(|(nu, _)| *nu > 6) {
        return Err(Error::Domain(format!("mode nu = {nu} exceeds the band limit 6")));
    }
    let e = setup.epsilon;
    if e * e + lambda * lambda == 0.0 {
        return Err(Error::Pole);
    }
    let beta = Complex::new(e, lambda).inv();
    // Gauss nodes avoid the poles; N = 2 uses the midpoint rule on the
    // half circle, doubled.
    let (theta, weights) = if n == 2 {
        let m = 256;
        let h = PI / m as f64;
        ((0..m).map(|j| (j as f64 + 0.5) * h).collect::<Vec<_>>(), vec![2.0 * h; m])
    } else {
        let q = zonal_quadrature(n, 64);
        (q.theta, q.weights)
    };
    let dens: Vec<[f64; 3]> = theta.iter().map(|t| identity_densities(n, modes, beta, *t)).collect();
    let mut lhs = [0.0; 3];
    for (k, l) in lhs.iter_mut().enumerate() {
        let terms: Vec<f64> = dens.iter().zip(&weights).map(|(d, w)| d[k] * w).collect();
        *l = pairwise_sum(&terms);
    }
    // repeated modes add up before the spectral side is formed
    let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
    for &(nu, c) in modes {
        *merged.entry(nu).or_insert(0.0) += c;
    }
    let mut rhs = [0.0; 3];
    for (&nu, &c) in &merged {
        let a = eigenvalue(nu, n);
        rhs[0] += c * c * p1(setup, lambda, a)?;
        rhs[1] += c * c * p2(setup, lambda, a)?;
        rhs[2] += c * c * p3(setup, lambda, a)?;
    }
    let tolerance = 1e-8;
    let mut report = VerificationReport::new("integral_identities", tolerance)
        .param("N", json!(n))
        .param("epsilon", json!(e))
        .param("lambda", json!(lambda))
        .param("modes", json!(modes))
        .param("lhs", json!(lhs))
        .param("rhs", json!(rhs));
    report.resolution = Some(theta.len());
    report.samples = theta.len();
    report.residuals = (0..3)
        .map(|k| {
            let scale = rhs[k].abs().max(lhs[k].abs());
            if scale == 0.0 {
                0.0
            } else {
                (lhs[k] - rhs[k]).abs() / scale
            }
        })
        .collect();
    report.violations = report.residuals.iter().filter(|r| **r > tolerance).count();
    report.pass = report.violations == 0;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Infimum lemma

/// Finite discrete measure with atoms `mu_i > 0` and data `xi_i != 0`,
/// `eta_i`, `g_i` (`xi_i g_i >= 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct InfimumInstance {
    pub mu: Vec<BigRational>,
    pub xi: Vec<BigRational>,
    pub eta: Vec<BigRational>,
    pub g: Vec<BigRational>,
}

fn small_rational(rng: &mut impl Rng, lo: i64, hi: i64) -> BigRational {
    BigRational::new(BigInt::from(rng.random_range(lo..=hi)), BigInt::from(rng.random_range(1..=9i64)))
}

impl InfimumInstance {
    pub fn random(atoms: usize, rng: &mut impl Rng) -> Self {
        let mut inst = Self { mu: vec![], xi: vec![], eta: vec![], g: vec![] };
        for _ in 0..atoms {
            let mu = small_rational(rng, 1, 9);
            let mut xi = small_rational(rng, -9, 9);
            while xi.is_zero() {
                xi = small_rational(rng, -9, 9);
            }
            let g = if rng.random_bool(0.2) {
                BigRational::zero()
            } else {
                small_rational(rng, 1, 9) * xi.signum()
            };
            inst.mu.push(mu);
            inst.eta.push(small_rational(rng, -20, 20));
            inst.g.push(g);
            inst.xi.push(xi);
        }
        if inst.g.iter().all(Zero::is_zero) {
            inst.g[0] = inst.xi[0].signum();
        }
        inst
    }

    /// `(int eta g / int xi g, ess inf eta / xi)`, or `None` outside the
    /// hypotheses.
    pub fn sides(&self) -> Option<(BigRational, BigRational)> {
        let len = self.mu.len();
        if len == 0 || [self.xi.len(), self.eta.len(), self.g.len()].iter().any(|l| *l != len) {
            return None;
        }
        let mut num = BigRational::zero();
        let mut den = BigRational::zero();
        let mut inf: Option<BigRational> = None;
        for i in 0..len {
            if !self.mu[i].is_positive() || self.xi[i].is_zero() || (&self.xi[i] * &self.g[i]).is_negative() {
                return None;
            }
            num += &self.eta[i] * &self.g[i] * &self.mu[i];
            den += &self.xi[i] * &self.g[i] * &self.mu[i];
            let q = &self.eta[i] / &self.xi[i];
            inf = Some(match inf {
                Some(m) if m <= q => m,
                _ => q,
            });
        }
        if !den.is_positive() {
            return None;
        }
        Some((num / den, inf?))
    }
}

/// Random 50-atom instances checked in exact arithmetic.
pub fn verify_infimum_lemma(trials: usize, seed: u64) -> VerificationReport {
    verify_infimum_lemma_with(trials, 50, seed)
}

pub fn verify_infimum_lemma_with(trials: usize, atoms: usize, seed: u64) -> VerificationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instances: Vec<InfimumInstance> = (0..trials).map(|_| InfimumInstance::random(atoms, &mut rng)).collect();
    let outcomes: Vec<Option<bool>> =
        instances.par_iter().map(|inst| inst.sides().map(|(ratio, inf)| ratio >= inf)).collect();
    let failures = outcomes.iter().filter(|o| **o != Some(true)).count();
    let mut report = VerificationReport::new("infimum_lemma", 0.0)
        .param("trials", json!(trials))
        .param("atoms", json!(atoms))
        .param("seed", json!(seed));
    report.samples = trials;
    report.violations = failures;
    report.pass = failures == 0;
    report
}

// ---------------------------------------------------------------------------
// Monotonicity scans

/// Sign claims on the reduced quotients `F(kappa, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotonicityRegion {
    /// Hardy, `eps < 1 - N/2`: `dF/d alpha > 0` for `kappa > 0`, `alpha >= 0`.
    HardyAlpha,
    /// Hardy, `eps >= 1 - N/2`: `dF/d kappa >= 0`.
    HardyKappa,
    /// Rellich, `eps != 1`: `dF/d kappa >= 0`.
    RellichKappa,
    /// Rellich: `d F(0, alpha) / d alpha >= 0` for `alpha >= max(alpha_1, alpha_eps)`.
    RellichShiftAlpha,
}

impl MonotonicityRegion {
    pub const ALL: [MonotonicityRegion; 4] = [
        MonotonicityRegion::HardyAlpha,
        MonotonicityRegion::HardyKappa,
        MonotonicityRegion::RellichKappa,
        MonotonicityRegion::RellichShiftAlpha,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MonotonicityRegion::HardyAlpha => "hardy_alpha",
            MonotonicityRegion::HardyKappa => "hardy_kappa",
            MonotonicityRegion::RellichKappa => "rellich_kappa",
            MonotonicityRegion::RellichShiftAlpha => "rellich_shift_alpha",
        }
    }

    fn kind(self) -> ProblemKind {
        match self {
            MonotonicityRegion::HardyAlpha | MonotonicityRegion::HardyKappa => ProblemKind::Hardy,
            _ => ProblemKind::Rellich,
        }
    }

    /// Whether the setup meets the hypothesis of the claim.
    pub fn admits(self, setup: &ProblemSetup) -> bool {
        let edge = 1.0 - setup.dimension as f64 / 2.0;
        setup.kind == self.kind()
            && match self {
                MonotonicityRegion::HardyAlpha => setup.epsilon < edge,
                MonotonicityRegion::HardyKappa => setup.epsilon >= edge,
                _ => true,
            }
    }
}

impl fmt::Display for MonotonicityRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Slack for the sampled sign conditions, relative to `max(1, |F|)`.
pub const MONOTONICITY_SLACK: f64 = 1e-9;

/// Central difference with one Richardson step, base step
/// `1e-5 max(1, |x|)`.
fn derivative(g: impl Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-5 * x.abs().max(1.0);
    let d = |h: f64| (g(x + h) - g(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Samples `kappa in (0, 50]`, `alpha in [0, 200]` (for the shifted case
/// `alpha in [max(alpha_1, alpha_eps), +200]`) and counts sampled
/// derivatives below `-slack max(1, |F|)`.
pub fn verify_monotonicity(
    setup: &ProblemSetup,
    region: MonotonicityRegion,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    if !region.admits(setup) {
        return Err(Error::Domain(format!(
            "{region} needs a {} setup inside its hypothesis (N = {}, eps = {})",
            region.kind(),
            setup.dimension,
            setup.epsilon
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (violations, worst) = scan_region(setup, region, samples, &mut rng);
    let mut report = VerificationReport::new("monotonicity", MONOTONICITY_SLACK)
        .param("region", json!(region.name()))
        .param("N", json!(setup.dimension))
        .param("epsilon", json!(setup.epsilon))
        .param("seed", json!(seed));
    report.samples = samples;
    report.violations = violations;
    report.residuals = vec![worst];
    report.pass = violations == 0;
    Ok(report)
}

/// `(violations, smallest normalized derivative)`.
fn scan_region(setup: &ProblemSetup, region: MonotonicityRegion, samples: usize, rng: &mut impl Rng) -> (usize, f64) {
    let n = setup.dimension;
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    let floor = alpha_s(1.0, n).max(setup.alpha_epsilon());
    for _ in 0..samples {
        let kappa = 50.0 * (1.0 - rng.random::<f64>());
        let (d, value) = match region {
            MonotonicityRegion::HardyAlpha => {
                let alpha = 200.0 * rng.random::<f64>();
                (derivative(|a| f_hardy(setup, kappa, a), alpha), f_hardy(setup, kappa, alpha))
            }
            MonotonicityRegion::HardyKappa => {
                let alpha = 200.0 * rng.random::<f64>();
                (derivative(|k| f_hardy(setup, k, alpha), kappa), f_hardy(setup, kappa, alpha))
            }
            MonotonicityRegion::RellichKappa => {
                let alpha = 200.0 * rng.random::<f64>();
                (derivative(|k| f_rellich(setup, k, alpha), kappa), f_rellich(setup, kappa, alpha))
            }
            MonotonicityRegion::RellichShiftAlpha => {
                let alpha = floor + 200.0 * rng.random::<f64>();
                // one-sided near the floor so the stencil stays in the region
                let g = |a: f64| f_rellich(setup, 0.0, a);
                let x = alpha.max(floor + 1e-4 * floor.abs().max(1.0));
                (derivative(g, x), g(x))
            }
        };
        let normalized = d / value.abs().max(1.0);
        worst = worst.min(normalized);
        if normalized < -MONOTONICITY_SLACK {
            violations += 1;
        }
    }
    (violations, worst)
}

/// The shifted-alpha claim sampled across `eps in [-6, 6] \ {0}` and
/// `N in 2..=10` (`eps = 1` is skipped, the setup being critical).
pub fn verify_shift_monotonicity(samples: usize, seed: u64) -> VerificationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    let mut drawn = 0;
    while drawn < samples {
        let n = rng.random_range(2..=10usize);
        let eps: f64 = rng.random_range(-6.0..=6.0);
        let gamma = 3.0 - n as f64 / 2.0 - eps;
        let Ok(setup) = make_setup(n, gamma, ProblemKind::Rellich) else { continue };
        if setup.epsilon_is_zero() {
            continue;
        }
        let (v, w) = scan_region(&setup, MonotonicityRegion::RellichShiftAlpha, 1, &mut rng);
        violations += v;
        worst = worst.min(w);
        drawn += 1;
    }
    let mut report = VerificationReport::new("monotonicity", MONOTONICITY_SLACK)
        .param("region", json!(MonotonicityRegion::RellichShiftAlpha.name()))
        .param("epsilon_range", json!([-6.0, 6.0]))
        .param("seed", json!(seed));
    report.samples = samples;
    report.violations = violations;
    report.residuals = vec![worst];
    report.pass = violations == 0;
    report
}

/// `eps^4 - 6 eps^3 + 8 eps^2 - 2 eps + N^2 - 1`.
pub fn quartic(dimension: usize, eps: f64) -> f64 {
    let n = dimension as f64;
    eps.powi(4) - 6.0 * eps.powi(3) + 8.0 * eps * eps - 2.0 * eps + n * n - 1.0
}

/// Uniform scan of the quartic on `-(N-1) <= eps <= 1`.
pub fn quartic_scan(dimension: usize, samples: usize) -> VerificationReport {
    let lo = -(dimension as f64 - 1.0);
    let values: Vec<f64> =
        (0..samples).map(|i| quartic(dimension, lo + (1.0 - lo) * i as f64 / (samples.max(2) - 1) as f64)).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut report = VerificationReport::new("quartic", 0.0).param("N", json!(dimension));
    report.samples = samples;
    report.violations = values.iter().filter(|v| **v < 0.0).count();
    report.residuals = vec![min];
    report.pass = report.violations == 0;
    report
}

// ---------------------------------------------------------------------------
// Suites

/// Named groups of checks for [`run_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Commutation,
    IntegralIdentities,
    Infimum,
    Monotonicity,
    Cartesian,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["commutation", "integral_identities", "infimum", "monotonicity", "cartesian", "all"];
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "commutation" => Ok(Suite::Commutation),
            "integral_identities" | "integral" => Ok(Suite::IntegralIdentities),
            "infimum" => Ok(Suite::Infimum),
            "monotonicity" => Ok(Suite::Monotonicity),
            "cartesian" => Ok(Suite::Cartesian),
            "all" => Ok(Suite::All),
            _ => Err(Error::Domain(format!("unknown suite {s:?}; expected one of {:?}", Suite::NAMES))),
        }
    }
}

/// Mode mixtures used by the identity suites.
pub fn standard_mixtures() -> Vec<Vec<(usize, f64)>> {
    let mut out: Vec<Vec<(usize, f64)>> = (0..=6).map(|nu| vec![(nu, 1.0)]).collect();
    out.push(vec![(1, 1.0), (3, 2.0)]);
    out.push(vec![(0, 0.5), (2, -1.0), (4, 0.25), (6, 0.125)]);
    out
}

fn random_mixture(rng: &mut impl Rng) -> Vec<(usize, f64)> {
    let k = rng.random_range(1..=4usize);
    (0..k).map(|_| (rng.random_range(0..=6usize), rng.random_range(-2.0..=2.0))).collect()
}

/// Lemma-style identity checks at ten random `(eps, lambda)` with random
/// mode mixtures.
pub fn random_integral_identities(count: usize, seed: u64) -> Result<Vec<VerificationReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.random_range(2..=6usize);
        let eps: f64 = rng.random_range(-4.0..=4.0);
        let lambda: f64 = rng.random_range(-3.0..=3.0);
        let Ok(setup) = make_setup(n, 2.0 - n as f64 / 2.0 - eps, ProblemKind::Hardy) else { continue };
        let modes = random_mixture(&mut rng);
        out.push(verify_integral_identities(&setup, lambda, &modes)?);
    }
    Ok(out)
}

/// Cartesian validity check: random annulus potentials, quotient against the
/// sharp constant with relative tolerance `5e-3`, and a refinement test on any
/// deficit.
#[derive(Debug, Clone)]
pub struct CartesianCheck {
    pub dimension: usize,
    pub gammas: Vec<f64>,
    pub potentials: usize,
    pub step: f64,
}

impl CartesianCheck {
    /// Reference step: `0.01` for `N = 2`, `0.04` for `N = 3`.
    pub fn reference(dimension: usize, potentials: usize) -> Self {
        let step = if dimension == 2 { 0.01 } else { 0.04 };
        Self { dimension, gammas: vec![-1.0, 0.0, 1.0, 2.0], potentials, step }
    }
}

/// One report per `(kind, gamma)`; critical weights are skipped. `residuals`
/// holds the smallest `quotient / constant - 1`.
pub fn verify_cartesian(check: &CartesianCheck, seed: u64) -> Result<Vec<VerificationReport>> {
    use crate::sharp_constants::{hardy_constant, rellich_constant};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let potentials: Vec<AnnulusPotential> =
        (0..check.potentials).map(|_| AnnulusPotential::random(check.dimension, &mut rng)).collect();
    let densities = potentials.iter().map(|p| p.sample(check.step)?.densities()).collect::<Result<Vec<_>>>()?;
    let tolerance = 5e-3;
    let mut reports = Vec::new();
    for kind in [ProblemKind::Hardy, ProblemKind::Rellich] {
        for &gamma in &check.gammas {
            let constant = match kind {
                ProblemKind::Hardy => hardy_constant(check.dimension, gamma),
                ProblemKind::Rellich => rellich_constant(check.dimension, gamma),
            };
            let constant = match constant {
                Ok(c) => c.value,
                Err(Error::CriticalWeight { .. }) => continue,
                Err(e) => return Err(e),
            };
            let mut worst = f64::INFINITY;
            let mut violations = 0;
            for (p, d) in potentials.iter().zip(&densities) {
                let q = d.quotient(gamma, kind)?;
                let gap = q / constant - 1.0;
                worst = worst.min(gap);
                if gap < -tolerance {
                    violations += 1;
                }
                if gap < 0.0 {
                    // any deficit must shrink at least threefold when the step halves
                    let fine = p.sample(check.step / 2.0)?.densities()?.quotient(gamma, kind)? / constant - 1.0;
                    if fine < 0.0 && fine.abs() * 3.0 > gap.abs() {
                        violations += 1;
                    }
                }
            }
            let mut report = VerificationReport::new("cartesian", tolerance)
                .param("N", json!(check.dimension))
                .param("gamma", json!(gamma))
                .param("kind", json!(kind.name()))
                .param("constant", json!(constant))
                .param("step", json!(check.step))
                .param("seed", json!(seed));
            report.samples = check.potentials;
            report.residuals = vec![worst];
            report.violations = violations;
            report.pass = violations == 0;
            reports.push(report);
        }
    }
    Ok(reports)
}

/// Runs a suite deterministically for a seed; reports come back in a fixed
/// order.
pub fn run_suite(suite: Suite, seed: u64) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    let all = suite == Suite::All;
    if all || suite == Suite::Commutation {
        for n in [3, 2] {
            for modes in standard_mixtures() {
                out.push(verify_commutation(n, &modes, 4000)?);
            }
        }
    }
    if all || suite == Suite::IntegralIdentities {
        let setup = make_setup(3, 0.0, ProblemKind::Hardy)?; // eps = 1/2
        for modes in standard_mixtures() {
            out.push(verify_integral_identities(&setup, 1.0, &modes)?);
        }
        out.extend(random_integral_identities(10, seed)?);
    }
    if all || suite == Suite::Infimum {
        out.push(verify_infimum_lemma(1000, seed));
    }
    if all || suite == Suite::Monotonicity {
        let cases = [
            (4, 3.0, MonotonicityRegion::HardyAlpha), // eps = -3
            (3, 0.0, MonotonicityRegion::HardyKappa),  // eps = 1/2
            (3, -3.5, MonotonicityRegion::RellichKappa), // eps = 5
            (4, 1.0, MonotonicityRegion::RellichKappa),  // eps = 0
            (5, 0.5, MonotonicityRegion::RellichKappa),  // eps = 0
            (3, 0.0, MonotonicityRegion::RellichShiftAlpha),
        ];
        for (n, gamma, region) in cases {
            let setup = make_setup(n, gamma, region.kind())?;
            out.push(verify_monotonicity(&setup, region, 10_000, seed)?);
        }
        out.push(verify_shift_monotonicity(10_000, seed));
        for n in 2..=10 {
            out.push(quartic_scan(n, 10_001));
        }
    }
    if all || suite == Suite::Cartesian {
        for n in [2, 3] {
            out.extend(verify_cartesian(&CartesianCheck::reference(n, 4), seed)?);
        }
    }
    Ok(out)
}
