//! Distribution-level properties: the density normalizes, matches the
//! CF-inversion oracle pointwise, reduces to the univariate Laplace, and
//! the moment formulas stay valid for semidefinite sigma.

mod common;

use galkit::core::GalParams;
use galkit::dist;
use ndarray::{arr1, arr2, Array1, Array2};

fn gal1(sigma: f64, mu: f64, s: f64) -> GalParams {
    GalParams::new(arr2(&[[sigma]]), arr1(&[mu]), s).unwrap()
}

/// The five univariate parameter sets used across the quadrature checks;
/// all have s > 1/2 so the density is bounded.
fn param_sets_1d() -> Vec<GalParams> {
    vec![
        gal1(2.0, 0.0, 1.0),
        gal1(2.0, 1.0, 1.0),
        gal1(1.0, 0.5, 1.5),
        gal1(3.0, -1.0, 2.0),
        gal1(0.5, 0.25, 2.5),
    ]
}

#[test]
fn density_normalizes_1d() {
    for params in param_sets_1d() {
        let m = dist::moments(&params);
        let sd = m.covariance[(0, 0)].sqrt();
        let lim = 40.0 * sd;
        let f = |x: f64| dist::logpdf(&params, &arr1(&[x])).unwrap().exp();
        // Split at the origin: the density has a kink (or cusp) there.
        let total = common::integrate(&f, -lim, 0.0, 5e-10) + common::integrate(&f, 0.0, lim, 5e-10);
        assert!(
            (total - 1.0).abs() <= 1e-8,
            "s = {}, mu = {}: integral {total}",
            params.s(),
            params.mu()[0]
        );
    }
}

#[test]
fn density_normalizes_2d() {
    let params = GalParams::new(
        arr2(&[[4.0, 2.0], [2.0, 5.0]]),
        arr1(&[1.0, -1.0]),
        2.5,
    )
    .unwrap();
    let f = |x: f64, y: f64| dist::logpdf(&params, &arr1(&[x, y])).unwrap().exp();
    let total = common::integrate_2d(&f, 75.0);
    assert!((total - 1.0).abs() <= 1e-5, "integral {total}");
}

#[test]
fn logpdf_matches_cf_inversion_on_grid() {
    for params in param_sets_1d() {
        for i in 0..50 {
            let x = -10.0 + 20.0 * i as f64 / 49.0;
            let direct = dist::logpdf(&params, &arr1(&[x])).unwrap().exp();
            let oracle = dist::cf_inversion_pdf_1d(&params, x).unwrap();
            assert!(
                (direct - oracle).abs() <= 1e-8,
                "s = {}, mu = {}, x = {x}: direct {direct}, oracle {oracle}",
                params.s(),
                params.mu()[0]
            );
        }
    }
}

#[test]
fn cf_inversion_handles_origin() {
    // x = 0 is the non-oscillatory branch; compare with the analytic
    // limit of the density for s > p/2.
    for params in param_sets_1d() {
        let direct = dist::logpdf(&params, &arr1(&[0.0])).unwrap().exp();
        let oracle = dist::cf_inversion_pdf_1d(&params, 0.0).unwrap();
        assert!(
            (direct - oracle).abs() <= 1e-8,
            "s = {}: direct {direct}, oracle {oracle}",
            params.s()
        );
    }
}

#[test]
fn laplace_reduction_is_tight() {
    // exp(logpdf(GAL_1(2 b^2, 0, 1), x)) = e^{-|x|/b} / (2b).
    for b in [0.5, 1.0, 3.0] {
        let params = gal1(2.0 * b * b, 0.0, 1.0);
        for i in 0..=200 {
            let x = -10.0 + 0.1 * i as f64;
            let got = dist::logpdf(&params, &arr1(&[x])).unwrap().exp();
            let want = (-x.abs() / b).exp() / (2.0 * b);
            assert!(
                (got - want).abs() <= 1e-10 * want,
                "b = {b}, x = {x}: got {got}, want {want}"
            );
        }
    }
}

#[test]
fn moments_remain_valid_for_semidefinite_sigma() {
    // Density evaluation rejects semidefinite sigma, but the moment
    // formulas are total over valid parameters.
    let params = GalParams::new(
        arr2(&[[1.0, 1.0], [1.0, 1.0]]),
        arr1(&[0.5, -0.5]),
        2.0,
    )
    .unwrap();
    let m = dist::moments(&params);
    assert_eq!(m.mean, arr1(&[1.0, -1.0]));
    assert_eq!(
        m.covariance,
        arr2(&[[2.5, 1.5], [1.5, 2.5]])
    );
    assert!(dist::logpdf(&params, &arr1(&[0.1, 0.2])).is_err());
}

#[test]
fn pdf_wrapper_underflows_gracefully() {
    let params = gal1(2.0, 0.0, 1.0);
    let v = dist::pdf(&params, &arr1(&[800.0])).unwrap();
    assert_eq!(v, 0.0);
    let lp = dist::logpdf(&params, &arr1(&[800.0])).unwrap();
    assert!(lp.is_finite() && lp < -700.0);
}

#[test]
fn moments_match_numerical_integration() {
    // Mean and covariance from Proposition-style formulas vs. direct
    // quadrature of x f(x) and x^2 f(x) in one dimension.
    let params = gal1(1.5, 0.7, 1.8);
    let m = dist::moments(&params);
    let sd = m.covariance[(0, 0)].sqrt();
    let lim = 50.0 * sd;
    let f = |x: f64| dist::logpdf(&params, &arr1(&[x])).unwrap().exp();
    let mean_num = common::integrate_graded(&|x: f64| x * f(x), -lim, lim, 1e-10);
    assert!((mean_num - m.mean[0]).abs() <= 1e-7, "mean {mean_num}");
    let second = common::integrate_graded(&|x: f64| x * x * f(x), -lim, lim, 1e-10);
    let var_num = second - mean_num * mean_num;
    assert!(
        (var_num - m.covariance[(0, 0)]).abs() <= 1e-6,
        "var {var_num} vs {}",
        m.covariance[(0, 0)]
    );
}

#[allow(dead_code)]
fn unused_type_params(_: Array1<f64>, _: Array2<f64>) {}
