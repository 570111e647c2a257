//! Rational functions of `(lambda, alpha)` that encode the Hardy and Rellich
//! quotients of a single Fourier-spherical mode, and the reduced functions
//! `F(kappa, alpha)` with `kappa = lambda^2`.
//!
//! `P1, P2, P3` are the mode weights of `int |v|^2`, `int |grad_sigma v|^2`
//! and `int |Delta_sigma v|^2` for `v = f e_rho + (eps + i lambda)^{-1}
//! grad_sigma f`. They share the single denominator `eps^2 + lambda^2`; the
//! `P01, Q01, Q02` forms multiply it out and are polynomials in `lambda^2`.

use crate::error::{Error, Result};
use crate::sphere_spectrum::alpha_s;
use crate::weight_transforms::{ProblemKind, ProblemSetup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolyFamily {
    P1,
    P2,
    P3,
    Q1,
    Q2,
    P01,
    Q01,
    Q02,
}

impl PolyFamily {
    pub const ALL: [PolyFamily; 8] = [
        PolyFamily::P1,
        PolyFamily::P2,
        PolyFamily::P3,
        PolyFamily::Q1,
        PolyFamily::Q2,
        PolyFamily::P01,
        PolyFamily::Q01,
        PolyFamily::Q02,
    ];

    /// True for the families without the `eps^2 + lambda^2` denominator.
    pub fn is_polynomial(self) -> bool {
        matches!(self, PolyFamily::P01 | PolyFamily::Q01 | PolyFamily::Q02)
    }
}

/// One family bound to a setup.
#[derive(Debug, Clone)]
pub struct PolyEval {
    pub setup: ProblemSetup,
    pub family: PolyFamily,
}

impl PolyEval {
    pub fn new(setup: ProblemSetup, family: PolyFamily) -> Self {
        Self { setup, family }
    }

    pub fn eval(&self, lambda: f64, alpha: f64) -> Result<f64> {
        let s = &self.setup;
        match self.family {
            PolyFamily::P1 => p1(s, lambda, alpha),
            PolyFamily::P2 => p2(s, lambda, alpha),
            PolyFamily::P3 => p3(s, lambda, alpha),
            PolyFamily::Q1 => q1(s, lambda, alpha),
            PolyFamily::Q2 => q2(s, lambda, alpha),
            PolyFamily::P01 => Ok(p01(s, lambda, alpha)),
            PolyFamily::Q01 => Ok(q01(s, lambda, alpha)),
            PolyFamily::Q02 => Ok(q02(s, lambda, alpha)),
        }
    }
}

fn denominator(setup: &ProblemSetup, lambda: f64) -> Result<f64> {
    let d = setup.epsilon * setup.epsilon + lambda * lambda;
    if d == 0.0 {
        Err(Error::Pole)
    } else {
        Ok(d)
    }
}

pub fn p1(setup: &ProblemSetup, lambda: f64, alpha: f64) -> Result<f64> {
    let d = denominator(setup, lambda)?;
    Ok(1.0 + alpha / d)
}

pub fn p2(setup: &ProblemSetup, lambda: f64, alpha: f64) -> Result<f64> {
    let d = denominator(setup, lambda)?;
    let (n, e) = (setup.dimension as f64, setup.epsilon);
    Ok(n - 1.0 + (1.0 + (3.0 - 4.0 * e - n) / d) * alpha + alpha * alpha / d)
}

pub fn p3(setup: &ProblemSetup, lambda: f64, alpha: f64) -> Result<f64> {
    let d = denominator(setup, lambda)?;
    let (n, e) = (setup.dimension as f64, setup.epsilon);
    Ok((n - 1.0).powi(2)
        + (2.0 * n + 2.0 + ((n - 3.0).powi(2) - 8.0 * e) / d) * alpha
        + (1.0 + (10.0 - 8.0 * e - 2.0 * n) / d) * alpha * alpha
        + alpha.powi(3) / d)
}

fn require(setup: &ProblemSetup, family: &'static str, expected: ProblemKind) -> Result<()> {
    if setup.kind == expected {
        Ok(())
    } else {
        Err(Error::KindMismatch { family, expected })
    }
}

/// `((eps-1)^2 + lambda^2) P1 + P2`.
pub fn q1(setup: &ProblemSetup, lambda: f64, alpha: f64) -> Result<f64> {
    require(setup, "Q1", ProblemKind::Hardy)?;
    let e = setup.epsilon;
    Ok(((e - 1.0).powi(2) + lambda * lambda) * p1(setup, lambda, alpha)? + p2(setup, lambda, alpha)?)
}

/// `(A^2 + ((N-2)^2 + 2A) lambda^2 + lambda^4) P1 + 2 (lambda^2 - A) P2 + P3`
/// with `A = alpha_{eps-1}`.
pub fn q2(setup: &ProblemSetup, lambda: f64, alpha: f64) -> Result<f64> {
    require(setup, "Q2", ProblemKind::Rellich)?;
    let n = setup.dimension as f64;
    let a = alpha_s(setup.epsilon - 1.0, setup.dimension);
    let l2 = lambda * lambda;
    Ok((a * a + ((n - 2.0).powi(2) + 2.0 * a) * l2 + l2 * l2) * p1(setup, lambda, alpha)?
        + 2.0 * (l2 - a) * p2(setup, lambda, alpha)?
        + p3(setup, lambda, alpha)?)
}

/// Polynomial in `s = lambda^2`, lowest degree first.
pub type SPoly = Vec<f64>;

fn poly_add(a: &[f64], b: &[f64]) -> SPoly {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] += x;
    }
    out
}

fn poly_mul(a: &[f64], b: &[f64]) -> SPoly {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_scale(a: &[f64], c: f64) -> SPoly {
    a.iter().map(|x| c * x).collect()
}

/// Horner evaluation of an [`SPoly`] at `s`.
pub fn poly_eval(p: &[f64], s: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

/// `(eps^2 + s) P2` expanded.
fn d_p2_coeffs(setup: &ProblemSetup, alpha: f64) -> SPoly {
    let (n, e) = (setup.dimension as f64, setup.epsilon);
    let d = [e * e, 1.0];
    poly_add(&poly_scale(&d, n - 1.0 + alpha), &[(3.0 - 4.0 * e - n) * alpha + alpha * alpha])
}

/// `(eps^2 + s) P3` expanded.
fn d_p3_coeffs(setup: &ProblemSetup, alpha: f64) -> SPoly {
    let (n, e) = (setup.dimension as f64, setup.epsilon);
    let d = [e * e, 1.0];
    let along = (n - 1.0).powi(2) + (2.0 * n + 2.0) * alpha + alpha * alpha;
    let constant = ((n - 3.0).powi(2) - 8.0 * e) * alpha + (10.0 - 8.0 * e - 2.0 * n) * alpha * alpha + alpha.powi(3);
    poly_add(&poly_scale(&d, along), &[constant])
}

/// Coefficients of `P01 = eps^2 + alpha + s`.
pub fn p01_coeffs(setup: &ProblemSetup, alpha: f64) -> SPoly {
    vec![setup.epsilon * setup.epsilon + alpha, 1.0]
}

/// Coefficients of `Q01 = (eps^2 + s) Q1`.
pub fn q01_coeffs(setup: &ProblemSetup, alpha: f64) -> SPoly {
    let e = setup.epsilon;
    poly_add(&poly_mul(&[(e - 1.0).powi(2), 1.0], &p01_coeffs(setup, alpha)), &d_p2_coeffs(setup, alpha))
}

/// Coefficients of `Q02 = (eps^2 + s) Q2`.
pub fn q02_coeffs(setup: &ProblemSetup, alpha: f64) -> SPoly {
    let n = setup.dimension as f64;
    let a = alpha_s(setup.epsilon - 1.0, setup.dimension);
    let first = poly_mul(&[a * a, (n - 2.0).powi(2) + 2.0 * a, 1.0], &p01_coeffs(setup, alpha));
    let second = poly_mul(&[-2.0 * a, 2.0], &d_p2_coeffs(setup, alpha));
    poly_add(&poly_add(&first, &second), &d_p3_coeffs(setup, alpha))
}

pub fn p01(setup: &ProblemSetup, lambda: f64, alpha: f64) -> f64 {
    poly_eval(&p01_coeffs(setup, alpha), lambda * lambda)
}

pub fn q01(setup: &ProblemSetup, lambda: f64, alpha: f64) -> f64 {
    poly_eval(&q01_coeffs(setup, alpha), lambda * lambda)
}

pub fn q02(setup: &ProblemSetup, lambda: f64, alpha: f64) -> f64 {
    poly_eval(&q02_coeffs(setup, alpha), lambda * lambda)
}

/// Reduced Hardy quotient
/// `(eps-1)^2 + N - 1 + kappa + alpha - 2 alpha (2 eps + N - 2) / (eps^2 + kappa + alpha)`,
/// equal to `(eps-1)^2 + N - 1` at the removable point `eps = kappa = alpha = 0`.
pub fn f_hardy(setup: &ProblemSetup, kappa: f64, alpha: f64) -> f64 {
    let (n, e) = (setup.dimension as f64, setup.epsilon);
    let base = (e - 1.0).powi(2) + n - 1.0;
    let d = e * e + kappa + alpha;
    if alpha == 0.0 {
        return base + kappa;
    }
    base + kappa + alpha - 2.0 * alpha * (2.0 * e + n - 2.0) / d
}

/// Reduced Rellich quotient. The `eps = 0` formula is selected by an exact
/// test on the setup; at `eps = kappa = alpha = 0` it takes the limit value
/// `4 (N-2)^2`.
pub fn f_rellich(setup: &ProblemSetup, kappa: f64, alpha: f64) -> f64 {
    let n = setup.dimension as f64;
    if setup.epsilon_is_zero() {
        let cross = if kappa == 0.0 && alpha == 0.0 { 1.0 } else { kappa / (kappa + alpha) };
        return kappa * kappa
            + 4.0 * (n - 2.0).powi(2) * cross
            + ((n - 2.0).powi(2) + 4.0 + 2.0 * alpha) * kappa
            + (4.0 + alpha) * alpha;
    }
    let e = setup.epsilon;
    let e2a = e * e + alpha;
    let ae = alpha_s(e, setup.dimension);
    kappa * kappa
        + 4.0 * alpha * (1.0 - e) * (n + 2.0 * e - 2.0).powi(2) * kappa / (e2a * (kappa + e2a))
        + (n * n / 2.0 + 2.0 * (e + (n - 4.0) / 2.0).powi(2) + 2.0 * alpha) * kappa
        + ((e - 2.0).powi(2) + alpha) / e2a * (ae - alpha).powi(2)
}

/// `F(kappa, alpha)` for the setup's kind.
pub fn f_reduced(setup: &ProblemSetup, kappa: f64, alpha: f64) -> f64 {
    match setup.kind {
        ProblemKind::Hardy => f_hardy(setup, kappa, alpha),
        ProblemKind::Rellich => f_rellich(setup, kappa, alpha),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere_spectrum::eigenvalue;
    use crate::weight_transforms::make_setup;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn hardy(n: usize, g: f64) -> ProblemSetup {
        make_setup(n, g, ProblemKind::Hardy).unwrap()
    }

    fn rellich(n: usize, g: f64) -> ProblemSetup {
        make_setup(n, g, ProblemKind::Rellich).unwrap()
    }

    #[test]
    fn alpha_zero_values() {
        let s = hardy(5, 0.3);
        for l in [0.1, 1.0, 7.0] {
            assert_eq!(p1(&s, l, 0.0).unwrap(), 1.0);
            assert_eq!(p2(&s, l, 0.0).unwrap(), 4.0);
            let e = s.epsilon;
            assert_relative_eq!(q1(&s, l, 0.0).unwrap(), (e - 1.0).powi(2) + l * l + 4.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn pole_is_reported() {
        let s = rellich(6, 0.0);
        assert!(matches!(p1(&s, 0.0, 1.0), Err(Error::Pole)));
        assert!(matches!(q2(&s, 0.0, 1.0), Err(Error::Pole)));
        assert_eq!(p01(&s, 0.0, 0.0), 0.0);
    }

    #[test]
    fn kind_is_checked() {
        assert!(matches!(q2(&hardy(3, 0.0), 1.0, 1.0), Err(Error::KindMismatch { .. })));
        assert!(matches!(q1(&rellich(3, 0.0), 1.0, 1.0), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn pole_free_forms_at_zero_shift() {
        for n in 2..9 {
            let nf = n as f64;
            let s = hardy(n, 2.0 - nf / 2.0);
            assert!(s.epsilon_is_zero());
            for l in [0.0, 0.3, 2.0] {
                let l2 = l * l;
                assert_relative_eq!(q01(&s, l, 0.0), nf * l2 + l2 * l2, epsilon = 1e-12);
            }
            let r = make_setup(n, 3.0 - nf / 2.0, ProblemKind::Rellich).unwrap();
            for l in [0.0, 0.3, 2.0] {
                let l2 = l * l;
                let exact = 4.0 * (nf - 2.0).powi(2) * l2 + (nf * nf - 4.0 * nf + 8.0) * l2 * l2 + l2 * l2 * l2;
                assert_relative_eq!(q02(&r, l, 0.0), exact, epsilon = 1e-10, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn first_mode_hardy_value() {
        let s = hardy(3, 0.0);
        let a1 = eigenvalue(1, 3);
        let e = s.epsilon;
        let printed = (e - 1.0).powi(2) * (e * e + 3.0 * 2.0) / (e * e + 2.0);
        assert_relative_eq!(f_hardy(&s, 0.0, a1), 25.0 / 36.0, epsilon = 1e-14);
        assert_relative_eq!(f_hardy(&s, 0.0, a1), printed, epsilon = 1e-14);
        assert_relative_eq!(f_hardy(&s, 0.0, 0.0), 2.25, epsilon = 1e-14);
    }

    #[test]
    fn rellich_special_branch() {
        let s = rellich(6, 0.0);
        assert_eq!(f_rellich(&s, 0.0, 0.0), 64.0);
        assert_eq!(f_rellich(&s, 0.0, 5.0), 45.0);
        let s = rellich(3, 0.0);
        let e = s.epsilon;
        for a in [0.0, 2.0, 6.0] {
            let printed = ((e - 2.0).powi(2) + a) / (e * e + a) * (alpha_s(e, 3) - a).powi(2);
            assert_relative_eq!(f_rellich(&s, 0.0, a), printed, epsilon = 1e-12);
        }
    }

    #[test]
    fn vanishing_factor_at_matching_mode() {
        let s = rellich(4, -1.0);
        assert_eq!(s.epsilon, 2.0);
        let a = s.alpha_epsilon();
        assert_eq!(a, 8.0);
        let tiny = q2(&s, 1e-7, a).unwrap() / p1(&s, 1e-7, a).unwrap();
        assert!(tiny.abs() < 1e-10);
    }

    #[test]
    fn two_dimensional_hardy_structure() {
        // With N = 2 every mode satisfies Q1/P1 = gamma^2 + 1 + kappa + 1 - 2(2 - 2 gamma)/(..)
        let s = hardy(2, 0.4);
        let e = s.epsilon;
        assert_relative_eq!(e, 0.6, epsilon = 1e-15);
        for l in [0.2, 0.9, 1.7, 3.1, 5.0] {
            let k = l * l;
            let expected = 0.16 + 1.0 + k + 1.0 - 2.0 * (2.0 * e) / (e * e + k + 1.0);
            let got = q1(&s, l, 1.0).unwrap() / p1(&s, l, 1.0).unwrap();
            assert_relative_eq!(got, expected, epsilon = 1e-12);
        }
    }

    fn arb_setup(kind: ProblemKind) -> impl Strategy<Value = ProblemSetup> {
        (2usize..=10, -10.0f64..10.0).prop_filter_map("critical", move |(n, g)| make_setup(n, g, kind).ok())
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / (1.0 + a.abs().max(b.abs()))
    }

    proptest! {
        #[test]
        fn hardy_quotient_reduces(s in arb_setup(ProblemKind::Hardy), l in 0.01f64..10.0, nu in 0usize..12) {
            let a = eigenvalue(nu, s.dimension);
            let lhs = q1(&s, l, a).unwrap() / p1(&s, l, a).unwrap();
            prop_assert!(rel(lhs, f_hardy(&s, l * l, a)) < 1e-10);
        }

        #[test]
        fn rellich_quotient_reduces(s in arb_setup(ProblemKind::Rellich), l in 0.01f64..10.0, nu in 0usize..12) {
            let a = eigenvalue(nu, s.dimension);
            let lhs = q2(&s, l, a).unwrap() / p1(&s, l, a).unwrap();
            prop_assert!(rel(lhs, f_rellich(&s, l * l, a)) < 1e-10);
        }

        #[test]
        fn pole_free_identities(s in arb_setup(ProblemKind::Rellich), l in 0.01f64..5.0, a in 0.0f64..50.0) {
            let d = s.epsilon * s.epsilon + l * l;
            prop_assert!(rel(d * p1(&s, l, a).unwrap(), p01(&s, l, a)) < 1e-12);
            prop_assert!(rel(d * q2(&s, l, a).unwrap(), q02(&s, l, a)) < 1e-12);
            if let Ok(h) = s.with_kind(ProblemKind::Hardy) {
                let dh = h.epsilon * h.epsilon + l * l;
                prop_assert!(rel(dh * q1(&h, l, a).unwrap(), q01(&h, l, a)) < 1e-12);
            }
        }
    }
}
