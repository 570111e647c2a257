use approx::assert_relative_eq;
use hllab::field_lab::{
    build_test_field, quotient_grid, rellich_quotient_spectral, sharpness_study, TestFieldSpec,
};
use hllab::quotient_polynomials::{f_hardy, f_rellich, p1, p2, q01, q02};
use hllab::sharp_constants::{
    costin_mazya_constant, gamma_sweep, ghoussoub_moradifam_constant, hardy_constant, rellich_constant,
    ConstantKind,
};
use hllab::sphere_spectrum::{eigenvalue, sphere_quadrature};
use hllab::weight_transforms::curl_free_residual;
use hllab::{make_setup, Error, ProblemKind};

#[test]
fn eigenvalues_and_quadrature() {
    assert_eq!(eigenvalue(1, 5), 4.0);
    assert_eq!(eigenvalue(2, 7), 14.0);
    let q = sphere_quadrature(4, 12).unwrap();
    assert_relative_eq!(q.total_weight(), 2.0 * std::f64::consts::PI.powi(2), max_relative = 1e-12);
}

#[test]
fn setups() {
    assert_relative_eq!(make_setup(3, 0.0, ProblemKind::Hardy).unwrap().epsilon, 0.5);
    assert!(matches!(make_setup(2, 0.0, ProblemKind::Hardy), Err(Error::CriticalWeight { .. })));
    assert!(make_setup(6, 0.0, ProblemKind::Rellich).unwrap().epsilon_is_zero());
}

#[test]
fn polynomial_values() {
    let hardy = make_setup(3, 0.0, ProblemKind::Hardy).unwrap();
    assert_eq!(p1(&hardy, 0.8, 0.0).unwrap(), 1.0);
    assert_eq!(p2(&hardy, 0.8, 0.0).unwrap(), 2.0);
    assert_relative_eq!(f_hardy(&hardy, 0.0, 2.0), 25.0 / 36.0, max_relative = 1e-14);

    let h0 = make_setup(4, 0.0, ProblemKind::Hardy).unwrap();
    assert_relative_eq!(q01(&h0, 0.7, 0.0), 4.0 * 0.49 + 0.49 * 0.49, max_relative = 1e-14);

    let r0 = make_setup(6, 0.0, ProblemKind::Rellich).unwrap();
    let l2: f64 = 0.3 * 0.3;
    assert_relative_eq!(q02(&r0, 0.3, 0.0), 64.0 * l2 + 20.0 * l2 * l2 + l2.powi(3), max_relative = 1e-14);
    assert_eq!(f_rellich(&r0, 0.0, 0.0), 64.0);
    assert_eq!(f_rellich(&r0, 0.0, 5.0), 45.0);
}

#[test]
fn constant_table() {
    assert_relative_eq!(hardy_constant(3, 0.0).unwrap().value, 25.0 / 36.0, max_relative = 1e-15);
    assert_relative_eq!(hardy_constant(3, 1.0).unwrap().value, 17.0 / 4.0, max_relative = 1e-15);
    assert_relative_eq!(costin_mazya_constant(3, 2.0).unwrap().value, 8.25, max_relative = 1e-15);
    let n = 5.0f64;
    let c50 = (n / 2.0 - 1.0).powi(2) * (n * n + 4.0 * n + 4.0) / (n * n + 4.0 * n - 4.0);
    assert_relative_eq!(costin_mazya_constant(5, 0.0).unwrap().value, c50, max_relative = 1e-14);
    assert_relative_eq!(ghoussoub_moradifam_constant(4, 0.0).unwrap().value, 3.0, max_relative = 1e-14);
    assert!(matches!(ghoussoub_moradifam_constant(4, -1.5), Err(Error::Domain(_))));
    assert_eq!(rellich_constant(5, 0.5).unwrap().value, 32.0);
}

fn w(s: &str) -> hllab::Weight {
    s.parse().unwrap()
}

#[test]
fn sweep_markers_and_zeros() {
    let rows = gamma_sweep(4, w("-3"), w("1"), w("1/2"), &[ConstantKind::Hardy, ConstantKind::Rellich]).unwrap();
    assert!(rows.iter().any(|r| r.branch == "excluded-critical-weight"));
    // Rellich zeros at gamma = 3 - N/2 - nu for nu >= 2
    for g in [-1.0, -2.0, -3.0] {
        let r = rows.iter().find(|r| r.gamma == g && r.kind == ConstantKind::Rellich).unwrap();
        assert_eq!(r.value, Some(0.0), "gamma = {g}");
    }
}

#[test]
fn test_fields() {
    let setup = make_setup(4, -1.0, ProblemKind::Rellich).unwrap();
    let q = |n: f64| rellich_quotient_spectral(&TestFieldSpec::new(setup.clone(), 2, n)).unwrap().value;
    assert!(q(16.0) <= 0.05 * q(1.0));

    let hardy = make_setup(3, 0.0, ProblemKind::Hardy).unwrap();
    let spec = TestFieldSpec::new(hardy.clone(), 1, 2.0).with_resolution(801, 400);
    let field = build_test_field(&spec).unwrap();
    assert!(curl_free_residual(&field, &hardy).unwrap() <= 1e-8);
    assert!(quotient_grid(&field, &hardy).unwrap().value >= hardy_constant(3, 0.0).unwrap().value);

    let study = sharpness_study(5, w("1/2"), ProblemKind::Rellich, &[1.0, 2.0, 4.0, 8.0, 16.0]).unwrap();
    assert!((study.limit() - 32.0).abs() <= 1e-3 * 32.0);
    assert!(study.rows.windows(2).all(|w| w[1].q_n <= w[0].q_n));
}
