//! Problem parameters and the transforms that turn a weighted inequality on
//! `R^N` into a translation-invariant problem on `R x S^{N-1}`.
//!
//! With `t = log rho` and `v = rho^{1-eps} u` the weight disappears; the
//! shift `eps` is `2 - N/2 - gamma` (Hardy) or `3 - N/2 - gamma` (Rellich).
//! Fields are stored by polar components on a `(t, theta_1)` product grid.

use crate::error::{Error, Result};
use crate::numerics::{diff, diff1, pairwise_sum, Boundary, StencilOrder, UniformGrid};
use crate::sphere_spectrum::{ThetaLayout, ZonalGrid};
use num::bigint::BigInt;
use num::{BigRational, Complex, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Hardy,
    Rellich,
}

impl ProblemKind {
    /// The constant `c` in `eps = c - N/2 - gamma`.
    fn shift(self) -> i64 {
        match self {
            ProblemKind::Hardy => 2,
            ProblemKind::Rellich => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Hardy => "hardy",
            ProblemKind::Rellich => "rellich",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hardy" => Ok(ProblemKind::Hardy),
            "rellich" => Ok(ProblemKind::Rellich),
            _ => Err(Error::Domain(format!("unknown problem kind {s:?}"))),
        }
    }
}

/// A weight exponent kept both as a double and as an exact rational.
///
/// Decimal strings (`"0.5"`, `"-1.25e-1"`, `"3/2"`) parse exactly; a double
/// maps to its exact dyadic value. Branch decisions use the rational.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    value: f64,
    exact: BigRational,
}

impl Weight {
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> &BigRational {
        &self.exact
    }

    pub fn from_rational(exact: BigRational) -> Self {
        Self { value: exact.to_f64().unwrap_or(f64::NAN), exact }
    }
}

impl From<f64> for Weight {
    fn from(value: f64) -> Self {
        let exact = BigRational::from_float(value).expect("weights must be finite");
        Self { value, exact }
    }
}

impl From<i64> for Weight {
    fn from(value: i64) -> Self {
        Self::from_rational(BigRational::from_integer(value.into()))
    }
}

impl From<&Weight> for Weight {
    fn from(w: &Weight) -> Self {
        w.clone()
    }
}

impl FromStr for Weight {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s.trim()).map(Weight::from_rational).ok_or_else(|| Error::ParseWeight(s.to_string()))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.trim_start_matches('+').parse().ok()
}

fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((p, q)) = s.split_once('/') {
        let q = parse_int(q.trim())?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(parse_int(p.trim())?, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (sign, body) = match mantissa.as_bytes().first()? {
        b'-' => (-1, &mantissa[1..]),
        b'+' => (1, &mantissa[1..]),
        _ => (1, mantissa),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let n: BigInt = digits.parse().ok()?;
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(n * num::pow(ten, scale as usize))
    } else {
        BigRational::new(n, num::pow(ten, (-scale) as usize))
    };
    Some(if sign < 0 { -r } else { r })
}

/// Dimension, weight and kind together with the derived shift `eps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemSetup {
    pub dimension: usize,
    pub gamma: f64,
    pub kind: ProblemKind,
    pub epsilon: f64,
    #[serde(skip)]
    gamma_exact: BigRational,
    #[serde(skip)]
    epsilon_exact: BigRational,
}

impl ProblemSetup {
    pub fn gamma_exact(&self) -> &BigRational {
        &self.gamma_exact
    }

    pub fn epsilon_exact(&self) -> &BigRational {
        &self.epsilon_exact
    }

    /// Exact test `eps == 0`.
    pub fn epsilon_is_zero(&self) -> bool {
        self.epsilon_exact.is_zero()
    }

    pub fn weight(&self) -> Weight {
        Weight { value: self.gamma, exact: self.gamma_exact.clone() }
    }

    /// `alpha_eps = eps (eps + N - 2)`.
    pub fn alpha_epsilon(&self) -> f64 {
        crate::sphere_spectrum::alpha_s(self.epsilon, self.dimension)
    }

    /// The same `(N, gamma)` read as the other kind of problem.
    pub fn with_kind(&self, kind: ProblemKind) -> Result<ProblemSetup> {
        make_setup(self.dimension, self.weight(), kind)
    }
}

/// `eps` and the excluded weight `gamma` with `eps = 1`.
pub fn critical_gamma(dimension: usize, kind: ProblemKind) -> f64 {
    kind.shift() as f64 - 1.0 - dimension as f64 / 2.0
}

pub fn make_setup(dimension: usize, gamma: impl Into<Weight>, kind: ProblemKind) -> Result<ProblemSetup> {
    if dimension < 2 {
        return Err(Error::InvalidDimension(dimension));
    }
    let gamma = gamma.into();
    let shift = BigRational::new(BigInt::from(2 * kind.shift() - dimension as i64), BigInt::from(2));
    let epsilon_exact = shift - &gamma.exact;
    if epsilon_exact.is_one() {
        return Err(Error::CriticalWeight { dimension, kind, excluded: critical_gamma(dimension, kind) });
    }
    let epsilon = if gamma.exact.to_f64() == Some(gamma.value) {
        epsilon_exact.to_f64().unwrap_or(f64::NAN)
    } else {
        kind.shift() as f64 - dimension as f64 / 2.0 - gamma.value
    };
    Ok(ProblemSetup { dimension, gamma: gamma.value, kind, epsilon, gamma_exact: gamma.exact, epsilon_exact })
}

/// Axisymmetric vector field `v_rho e_rho + v_theta1 e_theta1` sampled on a
/// `(t, theta_1)` product grid. Arrays are row-major with one row per `t`
/// node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarField {
    pub t_grid: UniformGrid,
    pub theta_count: usize,
    #[serde(default, skip_serializing_if = "is_zonal")]
    pub theta_layout: ThetaLayout,
    pub v_rho: Vec<f64>,
    pub v_theta1: Vec<f64>,
}

fn is_zonal(layout: &ThetaLayout) -> bool {
    *layout == ThetaLayout::Zonal
}

impl PolarField {
    pub fn zeros(t_grid: UniformGrid, theta_count: usize, theta_layout: ThetaLayout) -> Self {
        let n = t_grid.count * theta_count;
        Self { t_grid, theta_count, theta_layout, v_rho: vec![0.0; n], v_theta1: vec![0.0; n] }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.t_grid.count, self.theta_count)
    }

    pub fn theta_grid(&self, dimension: usize) -> Result<ZonalGrid> {
        ZonalGrid::new(dimension, self.theta_layout, self.theta_count)
    }

    /// Checks array shapes and that the first and last two `t` rows vanish.
    pub fn validate(&self) -> Result<()> {
        let (nt, nth) = self.shape();
        let n = nt * nth;
        if self.v_rho.len() != n || self.v_theta1.len() != n {
            return Err(Error::InvalidGrid(format!(
                "component arrays must have {nt} x {nth} = {n} entries, got {} and {}",
                self.v_rho.len(),
                self.v_theta1.len()
            )));
        }
        if nt < 5 || !(self.t_grid.step > 0.0) {
            return Err(Error::InvalidGrid("t grid needs at least 5 increasing nodes".into()));
        }
        let rows = [0, 1, nt - 2, nt - 1];
        for r in rows {
            let row = r * nth..(r + 1) * nth;
            if self.v_rho[row.clone()].iter().chain(&self.v_theta1[row]).any(|v| *v != 0.0) {
                return Err(Error::Support(format!("field does not vanish on t row {r}")));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.v_rho.iter().chain(&self.v_theta1).all(|v| *v == 0.0)
    }

    fn scale_rows(&self, factor: impl Fn(f64) -> f64) -> PolarField {
        let mut out = self.clone();
        for i in 0..self.t_grid.count {
            let c = factor(self.t_grid.node(i));
            let row = i * self.theta_count..(i + 1) * self.theta_count;
            out.v_rho[row.clone()].iter_mut().for_each(|v| *v *= c);
            out.v_theta1[row].iter_mut().for_each(|v| *v *= c);
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: PolarField = serde_json::from_str(s)?;
        f.validate()?;
        Ok(f)
    }
}

/// `v(t, sigma) = e^{(1 - eps) t} u(e^t sigma)` for `u` sampled at
/// `rho = e^t`.
pub fn bv_forward(u: &PolarField, setup: &ProblemSetup) -> PolarField {
    let e = setup.epsilon;
    u.scale_rows(|t| ((1.0 - e) * t).exp())
}

/// Inverse of [`bv_forward`].
pub fn bv_inverse(v: &PolarField, setup: &ProblemSetup) -> PolarField {
    let e = setup.epsilon;
    v.scale_rows(|t| ((e - 1.0) * t).exp())
}

/// Pointwise defect `(eps + d_t) v_theta1 - d_theta1 v_rho` of the polar
/// curl-free condition, by centered differences.
pub fn curl_defect(v: &PolarField, setup: &ProblemSetup) -> Result<Vec<f64>> {
    let grid = v.theta_grid(setup.dimension)?;
    let (nt, nth) = v.shape();
    let dt = v.t_grid.step;
    let mut out = vec![0.0; nt * nth];
    for j in 0..nth {
        let col: Vec<f64> = (0..nt).map(|i| v.v_theta1[i * nth + j]).collect();
        let d = diff1(&col, dt, Boundary::Zero, StencilOrder::Second);
        for i in 0..nt {
            out[i * nth + j] = setup.epsilon * col[i] + d[i];
        }
    }
    for i in 0..nt {
        let row = &v.v_rho[i * nth..(i + 1) * nth];
        let d = grid.derivative(row, crate::numerics::Parity::Even);
        for j in 0..nth {
            out[i * nth + j] -= d[j];
        }
    }
    Ok(out)
}

/// `L^2(dt d sigma)` norm of [`curl_defect`].
pub fn curl_free_residual(v: &PolarField, setup: &ProblemSetup) -> Result<f64> {
    v.validate()?;
    let defect = curl_defect(v, setup)?;
    let grid = v.theta_grid(setup.dimension)?;
    Ok(l2_norm(&defect, &grid.weights(), v.t_grid.step))
}

/// `L^2(dt d sigma)` norm of row-major samples.
pub(crate) fn l2_norm(f: &[f64], theta_weights: &[f64], dt: f64) -> f64 {
    let nth = theta_weights.len();
    let rows: Vec<f64> = f
        .chunks(nth)
        .map(|row| {
            let terms: Vec<f64> = row.iter().zip(theta_weights).map(|(x, w)| x * x * w).collect();
            pairwise_sum(&terms)
        })
        .collect();
    (pairwise_sum(&rows) * dt).sqrt()
}

/// Closed-form profile shapes with exact derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ProfileShape {
    /// `exp(-1 / (1 - s^2))` on `(-1, 1)`.
    #[default]
    Bump,
}

impl ProfileShape {
    /// Value and first three derivatives at `s`.
    pub fn jet(self, s: f64) -> [f64; 4] {
        match self {
            ProfileShape::Bump => bump_jet(s),
        }
    }

    /// Support `[a, b]`.
    pub fn support(self) -> (f64, f64) {
        match self {
            ProfileShape::Bump => (-1.0, 1.0),
        }
    }
}

fn bump_jet(s: f64) -> [f64; 4] {
    if s.abs() >= 1.0 {
        return [0.0; 4];
    }
    let u = 1.0 - s * s;
    let b = (-1.0 / u).exp();
    if b == 0.0 {
        return [0.0; 4];
    }
    let (u2, u3) = (u * u, u * u * u);
    let g1 = -2.0 * s / u2;
    let g2 = -2.0 / u2 - 8.0 * s * s / u3;
    let g3 = -24.0 * s / u3 - 48.0 * s * s * s / (u3 * u);
    [b, g1 * b, (g2 + g1 * g1) * b, (g3 + 3.0 * g1 * g2 + g1 * g1 * g1) * b]
}

/// Samples of a compactly supported profile `h(t)` on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub t_grid: UniformGrid,
    pub h: Vec<f64>,
    #[serde(skip)]
    pub order: StencilOrder,
    /// Closed form and dilation behind the samples, when known: the samples
    /// are `shape(t / n)`.
    #[serde(skip)]
    pub shape: Option<(ProfileShape, f64)>,
}

impl RadialProfile {
    pub fn from_samples(t_grid: UniformGrid, h: Vec<f64>) -> Result<Self> {
        if h.len() != t_grid.count {
            return Err(Error::InvalidGrid(format!("{} samples for {} nodes", h.len(), t_grid.count)));
        }
        if t_grid.count < 5 {
            return Err(Error::InvalidGrid("profile needs at least 5 nodes".into()));
        }
        Ok(Self { t_grid, h, order: StencilOrder::Second, shape: None })
    }

    /// `shape(t / n)` on `count` nodes spanning `n * support` plus two
    /// padding nodes on each side.
    pub fn dilated(shape: ProfileShape, n: f64, count: usize) -> Self {
        let (a, b) = shape.support();
        let t_grid = UniformGrid::padded(n * a, n * b, count);
        let h = t_grid.nodes().iter().map(|t| shape.jet(t / n)[0]).collect();
        Self { t_grid, h, order: StencilOrder::Second, shape: Some((shape, n)) }
    }

    /// Default bump `exp(-1/(1-t^2))` sampled on `count` nodes.
    pub fn bump(count: usize) -> Self {
        Self::dilated(ProfileShape::Bump, 1.0, count)
    }

    pub fn with_order(mut self, order: StencilOrder) -> Self {
        self.order = order;
        self
    }

    /// Finite-difference derivative of order `k <= 3`.
    pub fn derivative(&self, k: usize) -> Result<Vec<f64>> {
        if k > 3 {
            return Err(Error::UnsupportedOrder(k));
        }
        Ok(diff(&self.h, k, self.t_grid.step, Boundary::Zero, self.order))
    }

    /// Exact derivative of order `k <= 3` when the closed form is known.
    pub fn exact_derivative(&self, k: usize) -> Option<Vec<f64>> {
        let (shape, n) = self.shape?;
        if k > 3 {
            return None;
        }
        let scale = n.powi(-(k as i32));
        Some(self.t_grid.nodes().iter().map(|t| scale * shape.jet(t / n)[k]).collect())
    }

    /// `d^k h / dt^k`: exact when the closed form is known, finite
    /// differences otherwise.
    pub fn best_derivative(&self, k: usize) -> Result<Vec<f64>> {
        match self.exact_derivative(k) {
            Some(d) => Ok(d),
            None => self.derivative(k),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.h.iter().all(|v| *v == 0.0)
    }

    /// Largest `|h^{(k)}|`, `k <= 3`, over the two nodes at each end.
    pub fn end_defect(&self) -> Result<f64> {
        let n = self.h.len();
        let mut m: f64 = 0.0;
        for k in 0..=3 {
            let d = self.derivative(k)?;
            for i in [0, 1, n - 2, n - 1] {
                m = m.max(d[i].abs());
            }
        }
        Ok(m)
    }
}

fn trapezoid(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    if n == 0 {
        return 0.0;
    }
    let mut terms = f.to_vec();
    terms[0] *= 0.5;
    terms[n - 1] *= 0.5;
    pairwise_sum(&terms) * h
}

/// Unitary transform `(2 pi)^{-1/2} int h(t) e^{-i lambda t} dt` by the
/// trapezoid rule, on a uniform `lambda` grid.
///
/// Fails with [`Error::Bandwidth`] when the discrete Plancherel identity is
/// off by more than `1e-6` relative, i.e. the grid misses part of the
/// spectrum.
pub fn fourier_profile(p: &RadialProfile, lambda_grid: &UniformGrid) -> Result<Vec<Complex<f64>>> {
    let spectrum = fourier_samples(p, lambda_grid);
    let energy_t = trapezoid(&p.h.iter().map(|h| h * h).collect::<Vec<_>>(), p.t_grid.step);
    let energy_l = trapezoid(&spectrum.iter().map(|c| c.norm_sqr()).collect::<Vec<_>>(), lambda_grid.step);
    if energy_t > 0.0 {
        let defect = ((energy_l - energy_t) / energy_t).abs();
        if defect > 1e-6 {
            return Err(Error::Bandwidth { defect });
        }
    }
    Ok(spectrum)
}

/// Trapezoid transform without the bandwidth check.
pub fn fourier_samples(p: &RadialProfile, lambda_grid: &UniformGrid) -> Vec<Complex<f64>> {
    use rayon::prelude::*;
    let nodes = p.t_grid.nodes();
    let c = p.t_grid.step / (2.0 * PI).sqrt();
    let n = nodes.len();
    (0..lambda_grid.count)
        .into_par_iter()
        .map(|i| {
            let lambda = lambda_grid.node(i);
            let mut re = Vec::with_capacity(n);
            let mut im = Vec::with_capacity(n);
            for (j, (t, h)) in nodes.iter().zip(&p.h).enumerate() {
                let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                let (s, co) = (lambda * t).sin_cos();
                re.push(w * h * co);
                im.push(-w * h * s);
            }
            Complex::new(c * pairwise_sum(&re), c * pairwise_sum(&im))
        })
        .collect()
}

/// `M_k = int |h^{(k)}(t)|^2 dt` for `k = 0..=k_max`, from finite-difference
/// derivatives and the trapezoid rule.
pub fn profile_moments(p: &RadialProfile, k_max: usize) -> Result<Vec<f64>> {
    if k_max > 3 {
        return Err(Error::UnsupportedOrder(k_max));
    }
    (0..=k_max)
        .map(|k| {
            let d = p.derivative(k)?;
            Ok(trapezoid(&d.iter().map(|x| x * x).collect::<Vec<_>>(), p.t_grid.step))
        })
        .collect()
}

/// Same moments from exact derivatives when the closed form is known.
pub(crate) fn best_moments(p: &RadialProfile, k_max: usize) -> Result<Vec<f64>> {
    if p.shape.is_none() {
        return profile_moments(p, k_max);
    }
    (0..=k_max)
        .map(|k| {
            let d = p.best_derivative(k)?;
            Ok(trapezoid(&d.iter().map(|x| x * x).collect::<Vec<_>>(), p.t_grid.step))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn setup_examples() {
        let s = make_setup(3, 0.0, ProblemKind::Hardy).unwrap();
        assert_eq!(s.epsilon, 0.5);
        match make_setup(2, 0.0, ProblemKind::Hardy) {
            Err(Error::CriticalWeight { excluded, .. }) => assert_eq!(excluded, 0.0),
            other => panic!("expected critical weight, got {other:?}"),
        }
        let s = make_setup(6, 0.0, ProblemKind::Rellich).unwrap();
        assert!(s.epsilon_is_zero());
        assert!(make_setup(4, 0.0, ProblemKind::Rellich).is_err());
        assert!(matches!(make_setup(1, 0.0, ProblemKind::Hardy), Err(Error::InvalidDimension(1))));
    }

    #[test]
    fn decimal_weights_parse_exactly() {
        let w: Weight = "0.1".parse().unwrap();
        assert_eq!(*w.exact(), BigRational::new(1.into(), 10.into()));
        let w: Weight = "-2.5e-1".parse().unwrap();
        assert_eq!(w.value(), -0.25);
        let w: Weight = "3/2".parse().unwrap();
        assert_eq!(w.value(), 1.5);
        let w: Weight = "7".parse().unwrap();
        assert_eq!(w.value(), 7.0);
        for bad in ["", "abc", "1/0", "1.2.3", "-", "1e"] {
            assert!(bad.parse::<Weight>().is_err(), "{bad}");
        }
        let s = make_setup(3, "1.5".parse::<Weight>().unwrap(), ProblemKind::Rellich).unwrap();
        assert!(s.epsilon_is_zero());
    }

    #[test]
    fn kind_roundtrip() {
        assert_eq!("Hardy".parse::<ProblemKind>().unwrap(), ProblemKind::Hardy);
        assert_eq!(ProblemKind::Rellich.to_string(), "rellich");
        assert!("stokes".parse::<ProblemKind>().is_err());
    }

    fn random_field(nt: usize, nth: usize) -> PolarField {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut f = PolarField::zeros(UniformGrid::padded(-1.0, 1.0, nt), nth, ThetaLayout::Zonal);
        for i in 2..nt - 2 {
            for j in 0..nth {
                f.v_rho[i * nth + j] = rng.random_range(-1.0..1.0);
                f.v_theta1[i * nth + j] = rng.random_range(-1.0..1.0);
            }
        }
        f
    }

    #[test]
    fn bv_roundtrip() {
        let s = make_setup(3, 0.3, ProblemKind::Hardy).unwrap();
        let u = random_field(40, 12);
        let back = bv_inverse(&bv_forward(&u, &s), &s);
        for (a, b) in u.v_rho.iter().zip(&back.v_rho).chain(u.v_theta1.iter().zip(&back.v_theta1)) {
            assert!((a - b).abs() <= 1e-13);
        }
        assert!(bv_forward(&u, &s).validate().is_ok());
        let z = PolarField::zeros(u.t_grid, 12, ThetaLayout::Zonal);
        assert!(bv_forward(&z, &s).is_zero());
    }

    #[test]
    fn bv_of_power_profile_is_stationary() {
        // u = rho^{eps-1} g(theta) gives v = g(theta) for every t
        let s = make_setup(4, 0.7, ProblemKind::Rellich).unwrap();
        let grid = UniformGrid::new(-1.0, 0.1, 21);
        let mut u = PolarField::zeros(grid, 6, ThetaLayout::Zonal);
        for i in 0..21 {
            let rho = grid.node(i).exp();
            for j in 0..6 {
                u.v_rho[i * 6 + j] = rho.powf(s.epsilon - 1.0) * (j as f64 + 1.0);
            }
        }
        let v = bv_forward(&u, &s);
        for i in 0..21 {
            for j in 0..6 {
                assert_relative_eq!(v.v_rho[i * 6 + j], j as f64 + 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn curl_residual_detects_violation() {
        let s = make_setup(3, 0.0, ProblemKind::Hardy).unwrap();
        let p = RadialProfile::bump(101);
        let g = ZonalGrid::new(3, ThetaLayout::Zonal, 50).unwrap();
        let mut f = PolarField::zeros(p.t_grid, 50, ThetaLayout::Zonal);
        for i in 0..101 {
            for (j, t) in g.nodes().iter().enumerate() {
                f.v_theta1[i * 50 + j] = p.h[i] * crate::sphere_spectrum::zonal_derivative(1, 3, *t);
            }
        }
        assert!(curl_free_residual(&f, &s).unwrap() > 1e-2);
        let z = PolarField::zeros(p.t_grid, 50, ThetaLayout::Zonal);
        assert_eq!(curl_free_residual(&z, &s).unwrap(), 0.0);
    }

    #[test]
    fn json_shape() {
        let f = random_field(8, 5);
        let j = f.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        for key in ["t_grid", "theta_count", "v_rho", "v_theta1"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v.get("theta_layout").is_none());
        assert_eq!(PolarField::from_json(&j).unwrap(), f);
        let p = RadialProfile::bump(11);
        let pj: serde_json::Value = serde_json::to_value(&p).unwrap();
        assert!(pj.get("h").is_some() && pj.get("t_grid").is_some());
    }

    #[test]
    fn bump_vanishes_at_ends() {
        let p = RadialProfile::bump(2001);
        assert!(p.end_defect().unwrap() <= 1e-14);
        assert!(matches!(p.derivative(4), Err(Error::UnsupportedOrder(4))));
    }

    #[test]
    fn bump_derivatives_match_differences() {
        let h = 1e-5;
        for s in [-0.7, -0.2, 0.1, 0.55] {
            let j = bump_jet(s);
            let (jp, jm) = (bump_jet(s + h), bump_jet(s - h));
            for k in 0..3 {
                let fd = (jp[k] - jm[k]) / (2.0 * h);
                assert!((fd - j[k + 1]).abs() < 1e-6 * (1.0 + j[k + 1].abs()));
            }
        }
    }

    #[test]
    fn zero_profile_transform_and_moments() {
        let p = RadialProfile::from_samples(UniformGrid::new(-1.0, 0.1, 21), vec![0.0; 21]).unwrap();
        let l = UniformGrid::new(-10.0, 0.1, 201);
        assert!(fourier_profile(&p, &l).unwrap().iter().all(|c| c.norm() == 0.0));
        assert!(profile_moments(&p, 3).unwrap().iter().all(|m| *m == 0.0));
    }

    #[test]
    fn narrow_lambda_grid_is_rejected() {
        let p = RadialProfile::bump(401);
        let l = UniformGrid::new(-2.0, 0.05, 81);
        assert!(matches!(fourier_profile(&p, &l), Err(Error::Bandwidth { .. })));
    }
}
