//! Sharp constants: the curl-free Hardy constant `H_{N,gamma}`, the
//! curl-free Rellich constant `R_{N,gamma}`, and two comparison constants,
//! the axisymmetric divergence-free Hardy constant `C_{N,gamma}` and the
//! second-order constant `A_{N,gamma}` for `int |Delta phi|^2` over
//! `int |grad phi|^2 / |x|^2`.
//!
//! Branch decisions (which closed form applies, which mode is the argmin when
//! two candidates are within rounding of each other) are made in exact
//! rational arithmetic on the setup's weight.

use crate::error::{Error, Result};
use crate::quotient_polynomials::f_rellich;
use crate::sphere_spectrum::eigenvalue;
use crate::weight_transforms::{critical_gamma, make_setup, ProblemKind, ProblemSetup, Weight};
use num::{BigRational, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::fmt;

/// Which constant a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantKind {
    Hardy,
    Rellich,
    CostinMazya,
    GhoussoubMoradifam,
}

impl ConstantKind {
    pub const ALL: [ConstantKind; 4] =
        [ConstantKind::Hardy, ConstantKind::Rellich, ConstantKind::CostinMazya, ConstantKind::GhoussoubMoradifam];

    pub fn name(self) -> &'static str {
        match self {
            ConstantKind::Hardy => "hardy",
            ConstantKind::Rellich => "rellich",
            ConstantKind::CostinMazya => "costin_mazya",
            ConstantKind::GhoussoubMoradifam => "ghoussoub_moradifam",
        }
    }

    /// Short symbol used in tables.
    pub fn symbol(self) -> &'static str {
        match self {
            ConstantKind::Hardy => "H",
            ConstantKind::Rellich => "R",
            ConstantKind::CostinMazya => "C",
            ConstantKind::GhoussoubMoradifam => "A",
        }
    }

    pub fn compute(self, dimension: usize, gamma: impl Into<Weight>) -> Result<ConstantReport> {
        match self {
            ConstantKind::Hardy => hardy_constant(dimension, gamma),
            ConstantKind::Rellich => rellich_constant(dimension, gamma),
            ConstantKind::CostinMazya => costin_mazya_constant(dimension, gamma),
            ConstantKind::GhoussoubMoradifam => ghoussoub_moradifam_constant(dimension, gamma),
        }
    }
}

impl fmt::Display for ConstantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ConstantKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.to_ascii_lowercase().replace('-', "_");
        ConstantKind::ALL
            .into_iter()
            .find(|k| k.name() == s || k.symbol().eq_ignore_ascii_case(&s))
            .ok_or_else(|| Error::Domain(format!("unknown constant {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantReport {
    pub constant: ConstantKind,
    pub value: f64,
    pub argmin_nu: Option<usize>,
    pub branch: &'static str,
    pub setup: ProblemSetup,
}

fn rational(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn half(n: i64) -> BigRational {
    BigRational::new(n.into(), 2.into())
}

/// `x^2 <= n` decided exactly.
fn square_at_most(x: &BigRational, n: i64) -> bool {
    x * x <= rational(n)
}

/// Among `(nu, value)` candidates pick the smallest value; candidates within
/// `1e-9` relative of the float minimum are compared with `exact`, and
/// `prefer_larger` breaks exact ties.
fn exact_argmin(
    candidates: &[(usize, f64)],
    exact: impl Fn(usize) -> BigRational,
    prefer_larger: bool,
) -> (usize, f64) {
    let fmin = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let slack = 1e-9 * (1.0 + fmin.abs());
    let close: Vec<(usize, f64)> = candidates.iter().copied().filter(|c| c.1 <= fmin + slack).collect();
    if close.len() == 1 {
        return close[0];
    }
    let mut best: Option<(usize, f64, BigRational)> = None;
    for (nu, v) in close {
        let e = exact(nu);
        best = match best {
            None => Some((nu, v, e)),
            Some((bn, bv, be)) => {
                let take = e < be || (e == be && (nu > bn) == prefer_larger);
                if take {
                    Some((nu, v, e))
                } else {
                    Some((bn, bv, be))
                }
            }
        };
    }
    let (nu, _, e) = best.expect("candidates are nonempty");
    (nu, e.to_f64().unwrap_or(fmin))
}

/// Closed form of `H_{N,gamma}`:
/// `(gamma+N/2-1)^2 (3(N-1) + (gamma+N/2-2)^2) / (N-1 + (gamma+N/2-2)^2)`
/// when `|gamma + N/2| <= sqrt(N+1)`, else `(gamma+N/2-1)^2 + N - 1`.
pub fn hardy_constant(dimension: usize, gamma: impl Into<Weight>) -> Result<ConstantReport> {
    let setup = make_setup(dimension, gamma, ProblemKind::Hardy)?;
    let n = dimension as f64;
    let x = setup.gamma + n / 2.0;
    let x_exact = setup.gamma_exact() + half(dimension as i64);
    let (value, branch) = if square_at_most(&x_exact, dimension as i64 + 1) {
        let y2 = (x - 2.0).powi(2);
        ((x - 1.0).powi(2) * (3.0 * (n - 1.0) + y2) / (n - 1.0 + y2), "first-mode")
    } else {
        ((x - 1.0).powi(2) + n - 1.0, "radial-mode")
    };
    Ok(ConstantReport { constant: ConstantKind::Hardy, value, argmin_nu: None, branch, setup })
}

/// Exact `F_hardy(0, alpha)`.
fn f_hardy_zero_exact(setup: &ProblemSetup, alpha: i64) -> BigRational {
    let e = setup.epsilon_exact();
    let n = setup.dimension as i64;
    let one = rational(1);
    let base = (e - &one) * (e - &one) + rational(n - 1);
    if alpha == 0 {
        return base;
    }
    let a = rational(alpha);
    let num = rational(2) * &a * (rational(2) * e + rational(n - 2));
    base + &a - num / (e * e + &a)
}

/// `H_{N,gamma} = min(F(0, alpha_0), F(0, alpha_1))`; ties go to `nu = 1`.
///
/// Both mode values are evaluated in exact arithmetic: near `eps = 1` the
/// float form of `F(0, alpha_1)` cancels down to `(eps-1)^2`-sized values.
pub fn hardy_constant_via_min(dimension: usize, gamma: impl Into<Weight>) -> Result<ConstantReport> {
    let setup = make_setup(dimension, gamma, ProblemKind::Hardy)?;
    let r0 = f_hardy_zero_exact(&setup, 0);
    let r1 = f_hardy_zero_exact(&setup, eigenvalue(1, dimension) as i64);
    let (nu, exact) = if r1 <= r0 { (1, r1) } else { (0, r0) };
    let value = exact.to_f64().unwrap_or(f64::NAN);
    let branch = if nu == 1 { "first-mode" } else { "radial-mode" };
    Ok(ConstantReport { constant: ConstantKind::Hardy, value, argmin_nu: Some(nu), branch, setup })
}

/// `((eps-2)^2 + alpha) / (eps^2 + alpha) * (alpha_eps - alpha)^2`, the
/// mode value of the Rellich quotient at `kappa = 0` for `eps != 0`.
fn rellich_mode_exact(setup: &ProblemSetup, alpha: i64) -> BigRational {
    let e = setup.epsilon_exact();
    let a = rational(alpha);
    let n = setup.dimension as i64;
    let ae = e * (e + rational(n - 2));
    let two = rational(2);
    ((e - &two) * (e - &two) + &a) / (e * e + &a) * (&ae - &a) * (&ae - &a)
}

/// Index bound of the Rellich mode search: one past the first `nu` with
/// `alpha_nu >= max(alpha_1, alpha_eps)`, beyond which the mode value is
/// nondecreasing.
pub fn rellich_truncation(setup: &ProblemSetup) -> usize {
    let n = setup.dimension;
    let bound = eigenvalue(1, n).max(setup.alpha_epsilon());
    let mut nu = 0;
    while eigenvalue(nu, n) < bound {
        nu += 1;
    }
    nu + 1
}

/// `R_{N,gamma} = min_nu F_rellich(0, alpha_nu)` with the mode search cut at
/// [`rellich_truncation`]. Exact ties go to the larger `nu` (at `N = 4`,
/// `gamma = -1` both `nu = 0` and `nu = 2` give 0; the reported mode is the
/// one where `alpha_nu = alpha_eps`).
pub fn rellich_constant(dimension: usize, gamma: impl Into<Weight>) -> Result<ConstantReport> {
    let setup = make_setup(dimension, gamma, ProblemKind::Rellich)?;
    let limit = rellich_truncation(&setup);
    Ok(rellich_constant_upto(setup, limit))
}

/// Same minimization scanning `nu = 0..=nu_max` (used to audit the cut).
pub fn rellich_constant_with_limit(dimension: usize, gamma: impl Into<Weight>, nu_max: usize) -> Result<ConstantReport> {
    let setup = make_setup(dimension, gamma, ProblemKind::Rellich)?;
    Ok(rellich_constant_upto(setup, nu_max))
}

fn rellich_constant_upto(setup: ProblemSetup, nu_max: usize) -> ConstantReport {
    let n = setup.dimension;
    if setup.epsilon_is_zero() {
        // F(0, 0) = 4(N-2)^2 and F(0, alpha) = (4 + alpha) alpha for alpha > 0,
        // increasing, so only nu = 0 and nu = 1 compete.
        let r0 = 4 * (n as i64 - 2).pow(2);
        let a1 = eigenvalue(1, n) as i64;
        let r1 = (4 + a1) * a1;
        let (nu, value, branch) = if r0 < r1 { (0, r0, "shift-zero-radial") } else { (1, r1, "shift-zero-first-mode") };
        debug_assert_eq!(value as f64, f_rellich(&setup, 0.0, eigenvalue(nu, n)));
        return ConstantReport {
            constant: ConstantKind::Rellich,
            value: value as f64,
            argmin_nu: Some(nu),
            branch,
            setup,
        };
    }
    let candidates: Vec<(usize, f64)> =
        (0..=nu_max).map(|nu| (nu, f_rellich(&setup, 0.0, eigenvalue(nu, n)))).collect();
    let (nu, value) = exact_argmin(&candidates, |nu| rellich_mode_exact(&setup, eigenvalue(nu, n) as i64), true);
    ConstantReport { constant: ConstantKind::Rellich, value, argmin_nu: Some(nu), branch: "mode-min", setup }
}

/// How the inner `min_{kappa >= 0} (kappa + A / (kappa + B))` is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InnerMin {
    #[default]
    ClosedForm,
    GoldenSection,
}

/// `min_{kappa >= 0} kappa + a / (kappa + b)` for `a > 0`, `b > 0`.
pub fn inner_min(a: f64, b: f64, method: InnerMin) -> f64 {
    let g = |k: f64| k + a / (k + b);
    match method {
        InnerMin::ClosedForm => {
            if a >= b * b {
                2.0 * a.sqrt() - b
            } else {
                a / b
            }
        }
        InnerMin::GoldenSection => {
            // the function is convex with its minimizer in [0, sqrt(a)]
            let r = (5f64.sqrt() - 1.0) / 2.0;
            let (mut lo, mut hi) = (0.0, a.sqrt() + 1.0);
            let mut x1 = hi - r * (hi - lo);
            let mut x2 = lo + r * (hi - lo);
            let (mut f1, mut f2) = (g(x1), g(x2));
            for _ in 0..200 {
                if f1 <= f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - r * (hi - lo);
                    f1 = g(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + r * (hi - lo);
                    f2 = g(x2);
                }
            }
            g(0.5 * (lo + hi)).min(g(0.0))
        }
    }
}

/// Axisymmetric divergence-free Hardy constant `C_{N,gamma}` (`N >= 3`) and
/// the planar divergence-free constant `C_{2,gamma}`.
pub fn costin_mazya_constant(dimension: usize, gamma: impl Into<Weight>) -> Result<ConstantReport> {
    costin_mazya_constant_with(dimension, gamma, InnerMin::ClosedForm)
}

pub fn costin_mazya_constant_with(
    dimension: usize,
    gamma: impl Into<Weight>,
    method: InnerMin,
) -> Result<ConstantReport> {
    let setup = make_setup(dimension, gamma, ProblemKind::Hardy)?;
    let g = setup.gamma;
    let n = dimension as f64;
    let report = |value: f64, branch: &'static str, setup: ProblemSetup| ConstantReport {
        constant: ConstantKind::CostinMazya,
        value,
        argmin_nu: None,
        branch,
        setup,
    };
    if dimension == 2 {
        let shifted = setup.gamma_exact() + rational(1);
        if square_at_most(&shifted, 3) {
            let y2 = (g - 1.0).powi(2);
            return Ok(report(g * g * (3.0 + y2) / (1.0 + y2), "planar-inner", setup));
        }
        return Ok(report(g * g + 1.0, "planar-outer", setup));
    }
    let lead = (g + n / 2.0 - 1.0).powi(2);
    let y2 = (g - n / 2.0).powi(2);
    if *setup.gamma_exact() <= rational(1) {
        return Ok(report(lead * (n + 1.0 + y2) / (n - 1.0 + y2), "gamma-at-most-one", setup));
    }
    if dimension == 3 {
        return Ok(report((g + 0.5).powi(2) + 2.0, "three-dim-gamma-above-one", setup));
    }
    let a = 4.0 * (n - 1.0) * (g - 1.0);
    let b = n - 1.0 + y2;
    Ok(report(lead + 2.0 + inner_min(a, b, method), "gamma-above-one", setup))
}

/// `(c + alpha)^2 / (d + alpha)` with `c = (N-4+2 gamma)(N-2 gamma)/4` and
/// `d = ((N-4+2 gamma)/2)^2`. At `alpha = d = 0` the removable value
/// `((N - 2 gamma)/2)^2` (continuous in `gamma`) is used.
fn gm_mode_value(dimension: usize, gamma: f64, gamma_exact: &BigRational, alpha: f64) -> f64 {
    let n = dimension as f64;
    let p = n - 4.0 + 2.0 * gamma;
    let q = n - 2.0 * gamma;
    let c = p * q / 4.0;
    let d = (p / 2.0).powi(2);
    let p_exact_zero = (rational(dimension as i64 - 4) + rational(2) * gamma_exact).is_zero();
    if alpha == 0.0 && (p_exact_zero || d == 0.0) {
        return (q / 2.0).powi(2);
    }
    (c + alpha).powi(2) / (d + alpha)
}

/// Ghoussoub–Moradifam constant `A_{N,gamma} = min_nu (c + alpha_nu)^2 /
/// (d + alpha_nu)`, defined for `gamma >= 1 - N/2`.
///
/// The mode value is nondecreasing once `alpha >= max(-c, c - 2d, 0)`; the
/// scan runs one index past that point and is confirmed against a window of
/// twice the length.
pub fn ghoussoub_moradifam_constant(dimension: usize, gamma: impl Into<Weight>) -> Result<ConstantReport> {
    if dimension < 2 {
        return Err(Error::InvalidDimension(dimension));
    }
    let w: Weight = gamma.into();
    let lower = half(2 - dimension as i64);
    if *w.exact() < lower {
        return Err(Error::Domain(format!(
            "A_(N,gamma) needs gamma >= 1 - N/2 = {}, got {}",
            critical_gamma(dimension, ProblemKind::Hardy),
            w.value()
        )));
    }
    // The record carries the Hardy-kind shift; at gamma = 1 - N/2 that shift
    // is critical, so fall back to the Rellich reading of the same weight.
    let setup = make_setup(dimension, w.clone(), ProblemKind::Hardy)
        .or_else(|_| make_setup(dimension, w.clone(), ProblemKind::Rellich))?;
    let n = dimension as f64;
    let g = w.value();
    let p = n - 4.0 + 2.0 * g;
    let c = p * (n - 2.0 * g) / 4.0;
    let d = (p / 2.0).powi(2);
    let bound = (-c).max(c - 2.0 * d).max(0.0);
    let mut nu_max = 0;
    while eigenvalue(nu_max, dimension) < bound {
        nu_max += 1;
    }
    nu_max += 1;
    let scan = |upto: usize| -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for nu in 0..=upto {
            let v = gm_mode_value(dimension, g, w.exact(), eigenvalue(nu, dimension));
            if v < best.1 {
                best = (nu, v);
            }
        }
        best
    };
    let mut best = scan(nu_max);
    let wider = scan(2 * nu_max + 2);
    if wider.1 < best.1 {
        best = wider;
    }
    Ok(ConstantReport {
        constant: ConstantKind::GhoussoubMoradifam,
        value: best.1,
        argmin_nu: Some(best.0),
        branch: "mode-min",
        setup,
    })
}

/// One row of a weight sweep. `value` is absent on marker rows for excluded
/// or out-of-domain weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub dimension: usize,
    pub gamma: f64,
    pub epsilon: Option<f64>,
    pub kind: ConstantKind,
    pub value: Option<f64>,
    pub argmin_nu: Option<usize>,
    pub branch: String,
}

impl SweepRow {
    fn from_result(dimension: usize, gamma: &Weight, kind: ConstantKind, r: Result<ConstantReport>) -> Self {
        match r {
            Ok(r) => SweepRow {
                dimension,
                gamma: gamma.value(),
                epsilon: Some(r.setup.epsilon),
                kind,
                value: Some(r.value),
                argmin_nu: r.argmin_nu,
                branch: r.branch.to_string(),
            },
            Err(e) => SweepRow {
                dimension,
                gamma: gamma.value(),
                epsilon: None,
                kind,
                value: None,
                argmin_nu: None,
                branch: match e {
                    Error::CriticalWeight { .. } => "excluded-critical-weight".to_string(),
                    Error::Domain(_) => "outside-domain".to_string(),
                    other => format!("error: {other}"),
                },
            },
        }
    }
}

/// Evaluate the requested constants on the weights
/// `gamma_min + i * step <= gamma_max`, generated in exact arithmetic so that
/// critical weights are hit exactly. Rows are ordered by weight, then by the
/// order of `kinds`.
pub fn gamma_sweep(
    dimension: usize,
    gamma_min: impl Into<Weight>,
    gamma_max: impl Into<Weight>,
    step: impl Into<Weight>,
    kinds: &[ConstantKind],
) -> Result<Vec<SweepRow>> {
    use rayon::prelude::*;
    if dimension < 2 {
        return Err(Error::InvalidDimension(dimension));
    }
    let (lo, hi, step): (Weight, Weight, Weight) = (gamma_min.into(), gamma_max.into(), step.into());
    if !step.exact().is_positive() {
        return Err(Error::Domain("sweep step must be positive".into()));
    }
    if hi.exact() < lo.exact() {
        return Err(Error::Domain("gamma_max must not be below gamma_min".into()));
    }
    let count = ((hi.exact() - lo.exact()) / step.exact()).floor().to_integer().to_usize().unwrap_or(0) + 1;
    let weights: Vec<Weight> = (0..count)
        .map(|i| Weight::from_rational(lo.exact() + step.exact() * BigRational::from_integer(i.into())))
        .collect();
    let rows: Vec<Vec<SweepRow>> = weights
        .par_iter()
        .map(|w| {
            kinds
                .iter()
                .map(|k| SweepRow::from_result(dimension, w, *k, k.compute(dimension, w.clone())))
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn hardy_examples() {
        assert_eq!(hardy_constant(2, 0.0).map(|_| ()).unwrap_err().to_string().contains("critical"), true);
        assert_relative_eq!(hardy_constant(3, 0.0).unwrap().value, 25.0 / 36.0, epsilon = 1e-15);
        let r = hardy_constant(3, 1.0).unwrap();
        assert_relative_eq!(r.value, 17.0 / 4.0, epsilon = 1e-15);
        assert_eq!(r.branch, "radial-mode");
        assert_eq!(hardy_constant(2, 0.5).unwrap().value, costin_mazya_constant(2, 0.5).unwrap().value);
        assert_relative_eq!(hardy_constant(4, 1.0).unwrap().value, 7.0, epsilon = 1e-14);
        assert_relative_eq!(hardy_constant(2, 2.0).unwrap().value, 5.0, epsilon = 1e-14);
    }

    #[test]
    fn hardy_planar_prefactor_vanishes() {
        // gamma = 0 is critical at N = 2; near it the prefactor gamma^2 drives H to 0
        let r = hardy_constant(2, 1e-8).unwrap();
        assert!(r.value < 1e-15);
    }

    #[test]
    fn via_min_examples() {
        let r = hardy_constant_via_min(3, 0.0).unwrap();
        assert_eq!(r.argmin_nu, Some(1));
        assert_relative_eq!(r.value, 25.0 / 36.0, epsilon = 1e-15);
        let r = hardy_constant_via_min(4, 1.0).unwrap();
        assert_eq!(r.argmin_nu, Some(0));
    }

    #[test]
    fn via_min_tie_goes_to_first_mode() {
        // |gamma + N/2| = sqrt(N + 1) with a rational weight: N = 3, gamma = 2 - 3/2
        let r = hardy_constant_via_min(3, 0.5).unwrap();
        let c = hardy_constant(3, 0.5).unwrap();
        assert_eq!(r.argmin_nu, Some(1));
        assert_relative_eq!(r.value, c.value, epsilon = 1e-14);
        assert_eq!(f_hardy_zero_exact(&r.setup, 0), f_hardy_zero_exact(&r.setup, 2));
    }

    #[test]
    fn rellich_examples() {
        let r = rellich_constant(3, 1.5).unwrap();
        assert_eq!(r.value, 4.0);
        assert_eq!(rellich_constant(5, 0.5).unwrap().value, 32.0);
        let r = rellich_constant(4, -1.0).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.argmin_nu, Some(2));
        let r = rellich_constant(6, 0.0).unwrap();
        assert_eq!((r.value, r.argmin_nu), (45.0, Some(1)));
        assert_relative_eq!(rellich_constant(3, 0.0).unwrap().value, 1.5625, epsilon = 1e-14);
        assert!(rellich_constant(4, 0.0).is_err());
    }

    #[test]
    fn shift_zero_values() {
        for n in 2..12usize {
            let g = "3".parse::<BigRational>().unwrap() - half(n as i64);
            let r = rellich_constant(n, Weight::from_rational(g)).unwrap();
            let expected = if n <= 4 { 4 * (n - 2) * (n - 2) } else { (n + 3) * (n - 1) };
            assert_eq!(r.value, expected as f64, "N = {n}");
        }
    }

    #[test]
    fn costin_mazya_examples() {
        for n in 3..10usize {
            let nf = n as f64;
            let expected = (nf / 2.0 - 1.0).powi(2) * (nf * nf + 4.0 * nf + 4.0) / (nf * nf + 4.0 * nf - 4.0);
            assert_relative_eq!(costin_mazya_constant(n, 0.0).unwrap().value, expected, epsilon = 1e-13);
        }
        assert_relative_eq!(costin_mazya_constant(3, 2.0).unwrap().value, 8.25, epsilon = 1e-14);
        assert_relative_eq!(costin_mazya_constant(2, 3.0).unwrap().value, 10.0, epsilon = 1e-14);
        assert_relative_eq!(costin_mazya_constant(3, 0.0).unwrap().value, 0.25 * 25.0 / 17.0, epsilon = 1e-15);
        assert!(costin_mazya_constant(4, -1.0).is_err());
    }

    #[test]
    fn inner_min_methods_agree() {
        for (a, b) in [(1.0, 0.5), (12.0, 3.0), (100.0, 2.0), (0.3, 7.0)] {
            let c = inner_min(a, b, InnerMin::ClosedForm);
            let g = inner_min(a, b, InnerMin::GoldenSection);
            assert!((c - g).abs() < 1e-9 * (1.0 + c), "{a} {b}: {c} {g}");
        }
        for n in 4..8 {
            for g in [1.5, 3.0, 7.25] {
                let c = costin_mazya_constant_with(n, g, InnerMin::ClosedForm).unwrap().value;
                let s = costin_mazya_constant_with(n, g, InnerMin::GoldenSection).unwrap().value;
                assert!((c - s).abs() < 1e-9 * c);
            }
        }
    }

    #[test]
    fn ghoussoub_moradifam_examples() {
        let a = ghoussoub_moradifam_constant(4, 0.0).unwrap();
        assert_eq!(a.value, 3.0);
        assert_eq!(a.argmin_nu, Some(1));
        for n in 3..10 {
            let h = hardy_constant(n, 0.0).unwrap().value;
            let a = ghoussoub_moradifam_constant(n, 0.0).unwrap().value;
            assert_relative_eq!(a, h, epsilon = 1e-12, max_relative = 1e-12);
        }
        assert!(matches!(ghoussoub_moradifam_constant(3, -0.6), Err(Error::Domain(_))));
        assert!(ghoussoub_moradifam_constant(3, -0.5).is_ok());
    }

    #[test]
    fn sweep_skips_critical_weight() {
        let rows = gamma_sweep(4, -2.0, 0.0, 0.5, &[ConstantKind::Hardy, ConstantKind::Rellich]).unwrap();
        assert_eq!(rows.len(), 10);
        let marker = rows.iter().find(|r| r.gamma == -1.0 && r.kind == ConstantKind::Hardy).unwrap();
        assert!(marker.value.is_none());
        assert_eq!(marker.branch, "excluded-critical-weight");
        let zero = rows.iter().find(|r| r.gamma == -1.0 && r.kind == ConstantKind::Rellich).unwrap();
        assert_eq!(zero.value, Some(0.0));
        assert!(rows.windows(2).all(|w| w[0].gamma <= w[1].gamma));
    }

    #[test]
    fn rellich_zeros_on_integer_shifts() {
        for n in [3usize, 5, 6] {
            let rows = gamma_sweep(n, "-8".parse::<Weight>().unwrap(), "2".parse::<Weight>().unwrap(), "0.5".parse::<Weight>().unwrap(), &[ConstantKind::Rellich]).unwrap();
            for r in rows {
                let shift = 3.0 - n as f64 / 2.0 - r.gamma;
                let integer = shift.fract() == 0.0 && shift >= 2.0;
                if integer {
                    assert_eq!(r.value, Some(0.0), "N={n} gamma={}", r.gamma);
                } else if let Some(v) = r.value {
                    assert!(v > 0.0 || shift.fract() != 0.0 || shift < 2.0);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn routes_agree(n in 2usize..=10, g in -10.0f64..10.0) {
            if let (Ok(a), Ok(b)) = (hardy_constant(n, g), hardy_constant_via_min(n, g)) {
                prop_assert!((a.value - b.value).abs() <= 1e-12 * (1.0 + a.value));
            }
        }

        #[test]
        fn constrained_dominates_unconstrained(n in 2usize..=10, g in -10.0f64..10.0) {
            if let Ok(h) = hardy_constant(n, g) {
                let plain = (g + n as f64 / 2.0 - 1.0).powi(2);
                prop_assert!(h.value >= plain * (1.0 - 1e-14));
            }
        }

        #[test]
        fn doubling_truncation_is_neutral(n in 2usize..=10, g in -10.0f64..10.0) {
            if let Ok(r) = rellich_constant(n, g) {
                let limit = rellich_truncation(&r.setup);
                let wide = rellich_constant_with_limit(n, g, 2 * limit).unwrap();
                prop_assert_eq!(r.value, wide.value);
                prop_assert_eq!(r.argmin_nu, wide.argmin_nu);
            }
        }
    }
}
