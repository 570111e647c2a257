//! Near-optimal curl-free test fields and their Rayleigh quotients.
//!
//! After the field rescaling the test fields are
//! `v_n = (eps h_n + h_n') psi_nu0 e_rho + h_n grad_sigma psi_nu0` with
//! `h_n(t) = h(t / n)`. Their quotients are computed two ways: exactly from
//! the profile moments `M_k = int |h^{(k)}|^2` (the mode integrands are
//! polynomials in `lambda^2`), and by finite differences and quadrature on a
//! `(t, theta_1)` grid.

use crate::error::{Error, Result};
use crate::numerics::{diff1, diff2, pairwise_sum, richardson_inverse_square, Boundary, Parity, StencilOrder};
use crate::quotient_polynomials::{p01_coeffs, q01_coeffs, q02_coeffs};
use crate::sharp_constants::{hardy_constant_via_min, rellich_constant, ConstantReport};
use crate::sphere_spectrum::{alpha_s, eigenvalue, zonal_derivative, ThetaLayout, ZonalGrid};
use crate::weight_transforms::{
    best_moments, curl_free_residual, l2_norm, PolarField, ProblemKind, ProblemSetup, RadialProfile, Weight,
};
use rayon::prelude::*;
use serde::Serialize;

/// How derivatives of the test field are formed on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FieldDerivatives {
    /// The same centered stencils the curl check uses, so the field is
    /// discretely curl-free to rounding.
    #[default]
    Discrete,
    /// Exact derivatives of the profile and the eigenfunction; the discrete
    /// curl defect is then `O(h^2)`.
    Analytic,
}

#[derive(Debug, Clone)]
pub struct TestFieldSpec {
    pub setup: ProblemSetup,
    pub nu0: usize,
    /// Undilated profile `h`.
    pub profile: RadialProfile,
    /// Dilation `n >= 1`.
    pub n: f64,
    pub theta_count: usize,
    pub derivatives: FieldDerivatives,
}

/// Default grid: 2001 `t` nodes and 1001 `theta_1` nodes.
pub const REFERENCE_T_NODES: usize = 2001;
pub const REFERENCE_THETA_NODES: usize = 1001;

impl TestFieldSpec {
    /// Default bump profile at reference resolution.
    pub fn new(setup: ProblemSetup, nu0: usize, n: f64) -> Self {
        Self {
            setup,
            nu0,
            profile: RadialProfile::bump(REFERENCE_T_NODES),
            n,
            theta_count: REFERENCE_THETA_NODES,
            derivatives: FieldDerivatives::Discrete,
        }
    }

    pub fn with_resolution(mut self, t_nodes: usize, theta_nodes: usize) -> Self {
        self.profile = match self.profile.shape {
            Some((shape, n)) => RadialProfile::dilated(shape, n, t_nodes).with_order(self.profile.order),
            None => self.profile,
        };
        self.theta_count = theta_nodes;
        self
    }

    pub fn with_profile(mut self, profile: RadialProfile) -> Self {
        self.profile = profile;
        self
    }

    pub fn with_derivatives(mut self, derivatives: FieldDerivatives) -> Self {
        self.derivatives = derivatives;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.n >= 1.0) || !self.n.is_finite() {
            return Err(Error::Domain(format!("dilation must be at least 1, got {}", self.n)));
        }
        Ok(())
    }

    /// `h_n(t) = h(t / n)`: the same samples on a grid stretched by `n`.
    pub fn dilated_profile(&self) -> RadialProfile {
        let mut p = self.profile.clone();
        p.t_grid.start *= self.n;
        p.t_grid.step *= self.n;
        p.shape = p.shape.map(|(s, m)| (s, m * self.n));
        p
    }
}

/// Builds `v_n` on the `(t, theta_1)` grid.
pub fn build_test_field(spec: &TestFieldSpec) -> Result<PolarField> {
    spec.validate()?;
    let n = spec.setup.dimension;
    let grid = ZonalGrid::new(n, ThetaLayout::Zonal, spec.theta_count)?;
    let h = spec.dilated_profile();
    let dh = match spec.derivatives {
        FieldDerivatives::Discrete => diff1(&h.h, h.t_grid.step, Boundary::Zero, h.order),
        FieldDerivatives::Analytic => h.best_derivative(1)?,
    };
    let psi = grid.sample_mode(spec.nu0);
    let dpsi = match spec.derivatives {
        FieldDerivatives::Discrete => grid.derivative(&psi, Parity::Even),
        FieldDerivatives::Analytic => grid.nodes().iter().map(|t| zonal_derivative(spec.nu0, n, *t)).collect(),
    };
    let e = spec.setup.epsilon;
    let mut field = PolarField::zeros(h.t_grid, spec.theta_count, ThetaLayout::Zonal);
    let nth = spec.theta_count;
    for i in 0..h.t_grid.count {
        let radial = e * h.h[i] + dh[i];
        for j in 0..nth {
            field.v_rho[i * nth + j] = radial * psi[j];
            field.v_theta1[i * nth + j] = h.h[i] * dpsi[j];
        }
    }
    Ok(field)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Spectral,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientResult {
    pub value: f64,
    pub route: Route,
    pub numerator: f64,
    pub denominator: f64,
    /// `t` and `theta_1` node counts (grid route) or the profile node count
    /// (spectral route).
    pub t_nodes: usize,
    pub theta_nodes: Option<usize>,
    /// Relative curl-free defect of the field (grid route).
    pub curl_residual: Option<f64>,
}

/// `sum_k c_k M_k(h_n)` with `M_k(h_n) = n^{1-2k} M_k(h)`; the common factor
/// `n` is dropped.
fn moment_pairing(coeffs: &[f64], moments: &[f64], n: f64) -> f64 {
    let terms: Vec<f64> = coeffs.iter().zip(moments).enumerate().map(|(k, (c, m))| c * m * n.powi(-2 * k as i32)).collect();
    pairwise_sum(&terms)
}

fn spectral(spec: &TestFieldSpec, numerator_coeffs: Vec<f64>) -> Result<QuotientResult> {
    spec.validate()?;
    let alpha = eigenvalue(spec.nu0, spec.setup.dimension);
    let den_coeffs = p01_coeffs(&spec.setup, alpha);
    let moments = best_moments(&spec.profile, numerator_coeffs.len() - 1)?;
    let numerator = moment_pairing(&numerator_coeffs, &moments, spec.n);
    let denominator = moment_pairing(&den_coeffs, &moments, spec.n);
    if denominator == 0.0 || spec.profile.is_zero() {
        return Err(Error::ZeroField);
    }
    Ok(QuotientResult {
        value: numerator / denominator,
        route: Route::Spectral,
        numerator,
        denominator,
        t_nodes: spec.profile.t_grid.count,
        theta_nodes: None,
        curl_residual: None,
    })
}

fn require_kind(setup: &ProblemSetup, family: &'static str, expected: ProblemKind) -> Result<()> {
    if setup.kind == expected {
        Ok(())
    } else {
        Err(Error::KindMismatch { family, expected })
    }
}

/// `int Q01 |h_n^|^2 / int P01 |h_n^|^2` from profile moments.
pub fn hardy_quotient_spectral(spec: &TestFieldSpec) -> Result<QuotientResult> {
    require_kind(&spec.setup, "hardy quotient", ProblemKind::Hardy)?;
    let alpha = eigenvalue(spec.nu0, spec.setup.dimension);
    spectral(spec, q01_coeffs(&spec.setup, alpha))
}

/// `int Q02 |h_n^|^2 / int P01 |h_n^|^2` from profile moments.
pub fn rellich_quotient_spectral(spec: &TestFieldSpec) -> Result<QuotientResult> {
    require_kind(&spec.setup, "rellich quotient", ProblemKind::Rellich)?;
    let alpha = eigenvalue(spec.nu0, spec.setup.dimension);
    spectral(spec, q02_coeffs(&spec.setup, alpha))
}

pub fn quotient_spectral(spec: &TestFieldSpec) -> Result<QuotientResult> {
    match spec.setup.kind {
        ProblemKind::Hardy => hardy_quotient_spectral(spec),
        ProblemKind::Rellich => rellich_quotient_spectral(spec),
    }
}

/// Quotient of `sum_nu c_nu psi_nu`-type fields built from one profile:
/// modes are orthogonal, so numerators and denominators add.
pub fn mixture_quotient_spectral(
    setup: &ProblemSetup,
    modes: &[(usize, f64)],
    profile: &RadialProfile,
    n: f64,
) -> Result<QuotientResult> {
    let mut num = 0.0;
    let mut den = 0.0;
    for &(nu, c) in modes {
        let spec = TestFieldSpec { setup: setup.clone(), nu0: nu, profile: profile.clone(), n, theta_count: 5, derivatives: FieldDerivatives::Discrete };
        match quotient_spectral(&spec) {
            Ok(q) => {
                num += c * c * q.numerator;
                den += c * c * q.denominator;
            }
            Err(Error::ZeroField) => {}
            Err(e) => return Err(e),
        }
    }
    if den == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(QuotientResult {
        value: num / den,
        route: Route::Spectral,
        numerator: num,
        denominator: den,
        t_nodes: profile.t_grid.count,
        theta_nodes: None,
        curl_residual: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptions {
    /// Largest accepted `||curl defect|| / ||v||`.
    pub curl_tolerance: f64,
    pub order: StencilOrder,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { curl_tolerance: 1e-4, order: StencilOrder::Second }
    }
}

/// Applies a `t` stencil to every `theta_1` column of row-major samples.
fn t_columns(f: &[f64], nt: usize, nth: usize, dt: f64, second: bool, order: StencilOrder) -> Vec<f64> {
    let cols: Vec<Vec<f64>> = (0..nth)
        .into_par_iter()
        .map(|j| {
            let col: Vec<f64> = (0..nt).map(|i| f[i * nth + j]).collect();
            if second {
                diff2(&col, dt, Boundary::Zero, order)
            } else {
                diff1(&col, dt, Boundary::Zero, order)
            }
        })
        .collect();
    let mut out = vec![0.0; nt * nth];
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            out[i * nth + j] = *v;
        }
    }
    out
}

/// Grid quadrature of the Hardy or Rellich quotient of a polar field.
///
/// Hardy: `(eps-1)^2 |v|^2 + |d_t v|^2 + |grad_sigma v|^2` over `|v|^2`.
/// Rellich: `|alpha_{eps-1} v + (2 eps + N - 4) d_t v + d_t^2 v + Delta_sigma v|^2`
/// over `|v|^2`, with `Delta_sigma` acting on Cartesian components.
pub fn quotient_grid(field: &PolarField, setup: &ProblemSetup) -> Result<QuotientResult> {
    quotient_grid_with(field, setup, GridOptions::default())
}

pub fn quotient_grid_with(field: &PolarField, setup: &ProblemSetup, options: GridOptions) -> Result<QuotientResult> {
    field.validate()?;
    if field.is_zero() {
        return Err(Error::ZeroField);
    }
    let grid = field.theta_grid(setup.dimension)?.with_order(options.order);
    let weights = grid.weights();
    let (nt, nth) = field.shape();
    let dt = field.t_grid.step;

    let norm = {
        let sq: Vec<f64> = field.v_rho.iter().zip(&field.v_theta1).map(|(a, b)| (a * a + b * b).sqrt()).collect();
        l2_norm(&sq, &weights, dt)
    };
    let curl = curl_free_residual(field, setup)? / norm;
    if curl > options.curl_tolerance {
        return Err(Error::CurlConstraintViolated { residual: curl, tolerance: options.curl_tolerance });
    }

    // Cartesian components, row by row
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..nt)
        .into_par_iter()
        .map(|i| {
            let r = i * nth..(i + 1) * nth;
            grid.cartesian(&field.v_rho[r.clone()], &field.v_theta1[r])
        })
        .collect();
    let mut w1 = Vec::with_capacity(nt * nth);
    let mut w2 = Vec::with_capacity(nt * nth);
    for (a, b) in &rows {
        w1.extend_from_slice(a);
        w2.extend_from_slice(b);
    }
    let d1 = (t_columns(&w1, nt, nth, dt, false, options.order), t_columns(&w2, nt, nth, dt, false, options.order));
    let e = setup.epsilon;
    let nf = setup.dimension as f64;

    let row_sums: Vec<(f64, f64)> = match setup.kind {
        ProblemKind::Hardy => (0..nt)
            .into_par_iter()
            .map(|i| {
                let r = i * nth..(i + 1) * nth;
                let grad = grid.vector_gradient_sq(&w1[r.clone()], &w2[r.clone()]);
                let mut num = Vec::with_capacity(nth);
                let mut den = Vec::with_capacity(nth);
                for j in 0..nth {
                    let k = i * nth + j;
                    let v2 = w1[k] * w1[k] + w2[k] * w2[k];
                    let dt2 = d1.0[k] * d1.0[k] + d1.1[k] * d1.1[k];
                    num.push(((e - 1.0).powi(2) * v2 + dt2 + grad[j]) * weights[j]);
                    den.push(v2 * weights[j]);
                }
                (pairwise_sum(&num), pairwise_sum(&den))
            })
            .collect(),
        ProblemKind::Rellich => {
            let d2 = (t_columns(&w1, nt, nth, dt, true, options.order), t_columns(&w2, nt, nth, dt, true, options.order));
            let a = alpha_s(e - 1.0, setup.dimension);
            let b = 2.0 * e + nf - 4.0;
            (0..nt)
                .into_par_iter()
                .map(|i| {
                    let r = i * nth..(i + 1) * nth;
                    let (l1, l2) = grid.vector_laplacian(&w1[r.clone()], &w2[r.clone()]);
                    let mut num = Vec::with_capacity(nth);
                    let mut den = Vec::with_capacity(nth);
                    for j in 0..nth {
                        let k = i * nth + j;
                        let e1 = a * w1[k] + b * d1.0[k] + d2.0[k] + l1[j];
                        let e2 = a * w2[k] + b * d1.1[k] + d2.1[k] + l2[j];
                        num.push((e1 * e1 + e2 * e2) * weights[j]);
                        den.push((w1[k] * w1[k] + w2[k] * w2[k]) * weights[j]);
                    }
                    (pairwise_sum(&num), pairwise_sum(&den))
                })
                .collect()
        }
    };
    let numerator = pairwise_sum(&row_sums.iter().map(|r| r.0).collect::<Vec<_>>()) * dt;
    let denominator = pairwise_sum(&row_sums.iter().map(|r| r.1).collect::<Vec<_>>()) * dt;
    if denominator == 0.0 {
        return Err(Error::ZeroField);
    }
    Ok(QuotientResult {
        value: numerator / denominator,
        route: Route::Grid,
        numerator,
        denominator,
        t_nodes: nt,
        theta_nodes: Some(nth),
        curl_residual: Some(curl),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessRow {
    pub n: f64,
    pub q_n: f64,
    /// Richardson extrapolation in `1/n^2` over the last three rows up to
    /// this one.
    pub limit_estimate: f64,
    pub target_constant: f64,
    /// `|q_n - target| / target`, or the absolute gap when the target is 0.
    pub relative_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessStudy {
    pub nu0: usize,
    pub target: ConstantReport,
    pub rows: Vec<SharpnessRow>,
}

impl SharpnessStudy {
    pub fn limit(&self) -> f64 {
        self.rows.last().map(|r| r.limit_estimate).unwrap_or(f64::NAN)
    }
}

fn gap(q: f64, target: f64) -> f64 {
    if target == 0.0 {
        (q - target).abs()
    } else {
        (q - target).abs() / target.abs()
    }
}

/// The sharp constant for the kind together with its minimizing mode.
pub fn target_constant(dimension: usize, gamma: impl Into<Weight>, kind: ProblemKind) -> Result<ConstantReport> {
    match kind {
        ProblemKind::Hardy => hardy_constant_via_min(dimension, gamma),
        ProblemKind::Rellich => rellich_constant(dimension, gamma),
    }
}

/// Spectral quotients `q_n` of the test sequence with `nu0` the minimizing
/// mode, and the extrapolation of their limit from the last three `n`
/// (the error expands in powers of `1/n^2`; both the `1/n^2` and the `1/n^4`
/// terms are eliminated).
pub fn sharpness_study(dimension: usize, gamma: impl Into<Weight>, kind: ProblemKind, n_list: &[f64]) -> Result<SharpnessStudy> {
    sharpness_study_with(dimension, gamma, kind, n_list, None, RadialProfile::bump(REFERENCE_T_NODES))
}

/// As [`sharpness_study`] with an explicit mode and profile. The target
/// constant is then `F(0, alpha_nu0)` when `nu0` differs from the argmin.
pub fn sharpness_study_with(
    dimension: usize,
    gamma: impl Into<Weight>,
    kind: ProblemKind,
    n_list: &[f64],
    nu0: Option<usize>,
    profile: RadialProfile,
) -> Result<SharpnessStudy> {
    if n_list.is_empty() || n_list.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("n list must be nonempty and strictly increasing".into()));
    }
    let gamma: Weight = gamma.into();
    let mut target = target_constant(dimension, gamma.clone(), kind)?;
    let nu0 = nu0.unwrap_or_else(|| target.argmin_nu.unwrap_or(0));
    if Some(nu0) != target.argmin_nu {
        target.value = crate::quotient_polynomials::f_reduced(&target.setup, 0.0, eigenvalue(nu0, dimension));
        target.argmin_nu = Some(nu0);
        target.branch = "fixed-mode";
    }
    let mut rows = Vec::with_capacity(n_list.len());
    let mut samples = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let spec = TestFieldSpec {
            setup: target.setup.clone(),
            nu0,
            profile: profile.clone(),
            n,
            theta_count: 5,
            derivatives: FieldDerivatives::Discrete,
        };
        let q = quotient_spectral(&spec)?.value;
        samples.push((n, q));
        let window = &samples[samples.len().saturating_sub(3)..];
        let limit = richardson_inverse_square(window);
        rows.push(SharpnessRow { n, q_n: q, limit_estimate: limit, target_constant: target.value, relative_gap: gap(q, target.value) });
    }
    Ok(SharpnessStudy { nu0, target, rows })
}
