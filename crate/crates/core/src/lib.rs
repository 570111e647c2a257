//! Sharp constants of the curl-free Hardy–Leray and Rellich–Leray
//! inequalities
//!
//! ```text
//! H_{N,gamma} int |u|^2 |x|^{2 gamma - 2}  <=  int |grad u|^2 |x|^{2 gamma}
//! R_{N,gamma} int |u|^2 |x|^{2 gamma - 4}  <=  int |Delta u|^2 |x|^{2 gamma}
//! ```
//!
//! for `u = grad phi`, together with the machinery that reduces them to a
//! one-parameter family of mode quotients and the numerical oracles that
//! check the reduction.
//!
//! * [`sphere_spectrum`]: eigenvalues and zonal eigenfunctions of the
//!   Laplace–Beltrami operator, sphere quadrature, zonal grids.
//! * [`weight_transforms`]: problem setup, Emden and field rescaling, polar
//!   fields, radial profiles and their Fourier moments.
//! * [`quotient_polynomials`]: the `P`/`Q` families and `F(kappa, alpha)`.
//! * [`sharp_constants`]: `H`, `R` and the comparison constants.
//! * [`field_lab`]: near-optimal test fields and their quotients.
//! * [`oracle_suite`]: independent checks.
//!
//! ```
//! use hllab::sharp_constants::hardy_constant;
//!
//! let h = hardy_constant(3, 0.0).unwrap();
//! assert!((h.value - 25.0 / 36.0).abs() < 1e-15);
//! ```

pub mod error;
pub mod field_lab;
pub mod numerics;
pub mod oracle_suite;
pub mod quotient_polynomials;
pub mod sharp_constants;
pub mod sphere_spectrum;
pub mod weight_transforms;

pub use error::{Error, Result};
pub use weight_transforms::{make_setup, ProblemKind, ProblemSetup, Weight};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/setup.md")]
    pub struct Setup;
    #[doc = include_str!("../../../book/src/spectrum.md")]
    pub struct Spectrum;
    #[doc = include_str!("../../../book/src/polynomials.md")]
    pub struct Polynomials;
    #[doc = include_str!("../../../book/src/constants.md")]
    pub struct Constants;
    #[doc = include_str!("../../../book/src/test_fields.md")]
    pub struct TestFields;
    #[doc = include_str!("../../../book/src/oracles.md")]
    pub struct Oracles;
}
