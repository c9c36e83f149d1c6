//! The analytic surface of the generalized asymmetric Laplace law:
//! characteristic function, log-density, exact moments, convolution of
//! parameter triples, and a quadrature-based one-dimensional density
//! oracle driven purely by Fourier inversion of the characteristic
//! function.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::core::{GalParams, SpdFactor, SYMMETRY_TOL};
use crate::error::{GalError, Result};
use crate::quad;
use crate::specfun::{log_bessel_k, log_gamma};

const LN_2PI: f64 = 1.8378770664093454836;
const LN_2: f64 = std::f64::consts::LN_2;

/// Exact first and second moments: `mean = s mu`,
/// `covariance = s (sigma + mu mu^T)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub mean: Array1<f64>,
    pub covariance: Array2<f64>,
}

/// Characteristic function `phi(u) = (1 + u^T sigma u / 2 - i mu^T u)^{-s}`,
/// evaluated through the principal-branch complex logarithm. The base has
/// real part `>= 1`, so the principal branch never crosses the cut and
/// `|phi(u)| <= 1` for every `u`.
pub fn cf(params: &GalParams, u: &Array1<f64>) -> Result<Complex64> {
    if u.len() != params.p() {
        return Err(GalError::DimensionMismatch(format!(
            "u has length {}, expected {}",
            u.len(),
            params.p()
        )));
    }
    let quad = u.dot(&params.sigma().dot(u));
    let drift = params.mu().dot(u);
    let w = Complex64::new(1.0 + 0.5 * quad, -drift);
    let s = params.s();
    // Small integer shapes take the exact power-and-divide route; it
    // avoids the ulp noise of the exp/log path.
    if s.fract() == 0.0 && (1.0..=64.0).contains(&s) {
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..(s as u32) {
            acc *= w;
        }
        return Ok(Complex64::new(1.0, 0.0) / acc);
    }
    Ok((-s * w.ln()).exp())
}

/// Log-density of the GAL law at `x`, assembled entirely in log space.
///
/// Requires strictly positive definite sigma. At `x = 0` the analytic
/// limit is returned when finite (`s > p/2`); the genuine integrable pole
/// for `s <= p/2` is signalled as `f64::INFINITY`.
pub fn logpdf(params: &GalParams, x: &Array1<f64>) -> Result<f64> {
    if x.len() != params.p() {
        return Err(GalError::DimensionMismatch(format!(
            "x has length {}, expected {}",
            x.len(),
            params.p()
        )));
    }
    let factor = SpdFactor::factorize(params.sigma())?;
    if !factor.is_strict() {
        return Err(GalError::SingularSigma);
    }
    let p = params.p() as f64;
    let s = params.s();
    let nu = s - 0.5 * p;
    let wmu = factor.whiten(params.mu())?;
    let c = (2.0 + wmu.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let wx = factor.whiten(x)?;
    let q = wx.iter().map(|v| v * v).sum::<f64>().sqrt();
    let base = LN_2 - 0.5 * p * LN_2PI - log_gamma(s)? - 0.5 * factor.log_det();

    if q == 0.0 {
        if nu > 0.0 {
            // Limit from K_nu(z) ~ Gamma(nu) 2^{nu-1} z^{-nu} as z -> 0.
            return Ok(base + log_gamma(nu)? + (nu - 1.0) * LN_2 - 2.0 * nu * c.ln());
        }
        return Ok(f64::INFINITY);
    }
    let drift = wmu.dot(&wx); // mu^T sigma^{-1} x via the whitened vectors
    let bessel = log_bessel_k(nu, q * c)?;
    Ok(base + drift + nu * (q.ln() - c.ln()) + bessel.log_value)
}

/// Density wrapper around [`logpdf`]; may underflow to zero for large
/// `||x||`, which is why the log form is the primary interface.
pub fn pdf(params: &GalParams, x: &Array1<f64>) -> Result<f64> {
    Ok(logpdf(params, x)?.exp())
}

pub fn moments(params: &GalParams) -> Moments {
    let s = params.s();
    let mean = params.mu().mapv(|v| s * v);
    let p = params.p();
    let mut covariance = params.sigma().clone();
    for i in 0..p {
        for j in 0..p {
            covariance[(i, j)] = s * (covariance[(i, j)] + params.mu()[i] * params.mu()[j]);
        }
    }
    Moments { mean, covariance }
}

/// Convolution closure: two independent GAL laws sharing `(sigma, mu)`
/// sum to a GAL law with added shapes.
pub fn convolve_params(a: &GalParams, b: &GalParams) -> Result<GalParams> {
    if a.p() != b.p() {
        return Err(GalError::DimensionMismatch(format!(
            "dimension {} vs {}",
            a.p(),
            b.p()
        )));
    }
    let sig_scale = a
        .sigma()
        .iter()
        .chain(b.sigma().iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let sig_dev = a
        .sigma()
        .iter()
        .zip(b.sigma().iter())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if sig_dev > SYMMETRY_TOL * sig_scale {
        return Err(GalError::IncompatibleParams(format!(
            "sigma matrices differ by {sig_dev:e} (tolerance {:e})",
            SYMMETRY_TOL * sig_scale
        )));
    }
    let mu_scale = a
        .mu()
        .iter()
        .chain(b.mu().iter())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let mu_dev = a
        .mu()
        .iter()
        .zip(b.mu().iter())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    if mu_dev > SYMMETRY_TOL * mu_scale {
        return Err(GalError::IncompatibleParams(format!(
            "mu vectors differ by {mu_dev:e} (tolerance {:e})",
            SYMMETRY_TOL * mu_scale
        )));
    }
    GalParams::new(a.sigma().clone(), a.mu().clone(), a.s() + b.s())
}

/// One-dimensional density by Fourier inversion of the characteristic
/// function: `f(x) = (1/pi) Int_0^inf Re[phi(u) e^{-iux}] du`.
///
/// Independent of the Bessel-based [`logpdf`] path; used as its oracle.
/// The head of the integral is handled adaptively, the oscillatory tail
/// by fixed Gauss-Legendre panels between phase nodes accelerated with
/// Wynn's epsilon algorithm (an asymptotic tail expansion covers the
/// non-oscillatory `x = 0` case).
pub fn cf_inversion_pdf_1d(params: &GalParams, x: f64) -> Result<f64> {
    if params.p() != 1 {
        return Err(GalError::DimensionMismatch(format!(
            "cf_inversion_pdf_1d requires p = 1, got p = {}",
            params.p()
        )));
    }
    let sig = params.sigma()[(0, 0)];
    if !(sig > 0.0) {
        return Err(GalError::SingularSigma);
    }
    let m = params.mu()[0];
    let s = params.s();
    let integrand = |u: f64| {
        let w = Complex64::new(1.0 + 0.5 * sig * u * u, -m * u);
        let phi = (-s * w.ln()).exp();
        (phi * Complex64::new(0.0, -u * x).exp()).re
    };
    let half = sig / 2.0;

    if x == 0.0 {
        // No oscillation: adaptive head (split where the integrand is
        // O(1) vs. the far power-law region) plus a two-term asymptotic
        // tail in inverse powers of u (odd powers vanish because the
        // drift term is purely imaginary).
        let mid = 50.0f64.max(20.0 / half.sqrt());
        let cut = (1e4 / half.sqrt()).max(1e4).max(2.0 * mid);
        let near = quad::adaptive_simpson(&integrand, 0.0, mid, 1e-13, 52).ok_or_else(|| {
            GalError::QuadratureNonConvergence("head integral did not converge".into())
        })?;
        let far = quad::adaptive_simpson(&integrand, mid, cut, 1e-13, 52).ok_or_else(|| {
            GalError::QuadratureNonConvergence("far integral did not converge".into())
        })?;
        let beta = -2.0 * s / sig - 2.0 * s * (s + 1.0) * m * m / (sig * sig);
        let tail = half.powf(-s)
            * (cut.powf(1.0 - 2.0 * s) / (2.0 * s - 1.0)
                + beta * cut.powf(-1.0 - 2.0 * s) / (2.0 * s + 1.0));
        return Ok((near + far + tail) / std::f64::consts::PI);
    }

    // Oscillatory case: adaptive head over the low-frequency region, then
    // Gauss-Legendre panels spanning half-periods pi/|x|, accelerated.
    let delta = std::f64::consts::PI / x.abs();
    let scale = 10.0 * (1.0 + 1.0 / half.sqrt());
    let u_head = delta * (scale / delta).ceil().max(1.0);
    let head = quad::adaptive_simpson(&integrand, 0.0, u_head, 1e-13, 52).ok_or_else(|| {
        GalError::QuadratureNonConvergence("head integral did not converge".into())
    })?;

    const BATCH: usize = 16;
    const MAX_SEGMENTS: usize = 512;
    let mut partial = Vec::with_capacity(64);
    let mut sum = head;
    let mut k = 0usize;
    loop {
        for _ in 0..BATCH {
            let a = u_head + k as f64 * delta;
            sum += quad::gauss_legendre_15(&integrand, a, a + delta);
            partial.push(sum);
            k += 1;
        }
        let last_inc = (partial[partial.len() - 1] - partial[partial.len() - 2]).abs();
        if last_inc <= 1e-13 {
            return Ok(partial[partial.len() - 1] / std::f64::consts::PI);
        }
        if partial.len() >= 8 {
            let window = &partial[partial.len().saturating_sub(32)..];
            let (limit, err) = quad::wynn_epsilon(window);
            if err <= 1e-12 && limit.is_finite() {
                return Ok(limit / std::f64::consts::PI);
            }
        }
        if k >= MAX_SEGMENTS {
            return Err(GalError::QuadratureNonConvergence(format!(
                "oscillatory tail did not stabilize after {k} segments at x = {x}"
            )));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::{arr1, arr2};
    use proptest::prelude::*;

    fn gal1(sigma: f64, mu: f64, s: f64) -> GalParams {
        GalParams::new(arr2(&[[sigma]]), arr1(&[mu]), s).unwrap()
    }

    #[test]
    fn cf_at_zero_is_one() {
        let params = GalParams::new(
            arr2(&[[4.0, 2.0], [2.0, 5.0]]),
            arr1(&[1.0, -1.0]),
            2.5,
        )
        .unwrap();
        let v = cf(&params, &arr1(&[0.0, 0.0])).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn cf_hand_checked_values() {
        let v = cf(&gal1(2.0, 0.0, 1.0), &arr1(&[1.0])).unwrap();
        assert_relative_eq!(v.re, 0.5, max_relative = 1e-15);
        assert_eq!(v.im, 0.0);

        // 1 / (2 - i) = 0.4 + 0.2i
        let v = cf(&gal1(2.0, 1.0, 1.0), &arr1(&[1.0])).unwrap();
        assert_relative_eq!(v.re, 0.4, max_relative = 1e-14);
        assert_relative_eq!(v.im, 0.2, max_relative = 1e-14);
    }

    #[test]
    fn cf_dimension_mismatch() {
        let err = cf(&gal1(2.0, 0.0, 1.0), &arr1(&[1.0, 2.0])).unwrap_err();
        assert!(matches!(err, GalError::DimensionMismatch(_)));
    }

    #[test]
    fn logpdf_laplace_reduction_point() {
        // GAL_1(2, 0, 1) is the standard Laplace: ln f(1) = -1 - ln 2.
        let lp = logpdf(&gal1(2.0, 0.0, 1.0), &arr1(&[1.0])).unwrap();
        assert_relative_eq!(lp, -1.0 - LN_2, max_relative = 1e-13);
    }

    #[test]
    fn logpdf_finite_limit_at_origin() {
        let lp = logpdf(&gal1(2.0, 0.0, 1.0), &arr1(&[0.0])).unwrap();
        assert_relative_eq!(lp, -LN_2, max_relative = 1e-13);
    }

    #[test]
    fn logpdf_pole_at_origin() {
        // p = 2, s = 1: s = p/2, logarithmic pole from K_0.
        let params = GalParams::new(Array2::eye(2), arr1(&[0.0, 0.0]), 1.0).unwrap();
        let lp = logpdf(&params, &arr1(&[0.0, 0.0])).unwrap();
        assert_eq!(lp, f64::INFINITY);
        // s < p/2 also diverges.
        let params = GalParams::new(Array2::eye(2), arr1(&[0.0, 0.0]), 0.75).unwrap();
        assert_eq!(logpdf(&params, &arr1(&[0.0, 0.0])).unwrap(), f64::INFINITY);
    }

    #[test]
    fn logpdf_frozen_asymmetric_values() {
        let lp = logpdf(&gal1(2.0, 1.0, 1.0), &arr1(&[0.5])).unwrap();
        assert_relative_eq!(lp, -1.1137359505919976114, max_relative = 1e-12);

        let params = GalParams::new(
            arr2(&[[4.0, 2.0], [2.0, 5.0]]),
            arr1(&[1.0, -1.0]),
            2.5,
        )
        .unwrap();
        let lp = logpdf(&params, &arr1(&[0.7, -0.3])).unwrap();
        assert_relative_eq!(lp, -3.9349345060626986936, max_relative = 1e-12);
    }

    #[test]
    fn logpdf_symmetric_when_mu_zero() {
        let params = GalParams::new(
            arr2(&[[4.0, 2.0], [2.0, 5.0]]),
            arr1(&[0.0, 0.0]),
            1.5,
        )
        .unwrap();
        for x in [[0.3, 1.7], [2.0, -0.4], [-1.1, -0.6]] {
            let pos = logpdf(&params, &arr1(&x)).unwrap();
            let neg = logpdf(&params, &arr1(&[-x[0], -x[1]])).unwrap();
            assert_relative_eq!(pos, neg, max_relative = 1e-13);
        }
    }

    #[test]
    fn logpdf_rejects_singular_sigma() {
        let params = GalParams::new(
            arr2(&[[1.0, 1.0], [1.0, 1.0]]),
            arr1(&[0.0, 0.0]),
            1.0,
        )
        .unwrap();
        assert_eq!(
            logpdf(&params, &arr1(&[0.5, 0.5])).unwrap_err(),
            GalError::SingularSigma
        );
    }

    #[test]
    fn moments_examples() {
        let m = moments(&GalParams::new(Array2::eye(2), arr1(&[0.0, 0.0]), 1.0).unwrap());
        assert_eq!(m.mean, arr1(&[0.0, 0.0]));
        assert_eq!(m.covariance, Array2::<f64>::eye(2));

        let m = moments(&GalParams::new(Array2::eye(2), arr1(&[1.0, 0.0]), 2.0).unwrap());
        assert_eq!(m.mean, arr1(&[2.0, 0.0]));
        assert_eq!(m.covariance, arr2(&[[4.0, 0.0], [0.0, 2.0]]));

        // Parameters produced by the matrix-product construction with
        // sigma_0 = 1, mu_0 = 1, d = 4: (2, 2, 2).
        let m = moments(&gal1(2.0, 2.0, 2.0));
        assert_eq!(m.mean, arr1(&[4.0]));
        assert_eq!(m.covariance, arr2(&[[12.0]]));
    }

    #[test]
    fn convolve_examples() {
        let sigma = arr2(&[[4.0, 2.0], [2.0, 5.0]]);
        let mu = arr1(&[1.0, -1.0]);
        let a = GalParams::new(sigma.clone(), mu.clone(), 1.0).unwrap();
        let b = GalParams::new(sigma.clone(), mu.clone(), 1.5).unwrap();
        let c = convolve_params(&a, &b).unwrap();
        assert_eq!(c.s(), 2.5);
        assert_eq!(c.sigma(), &sigma);

        let a = GalParams::new(Array2::eye(2), arr1(&[0.0, 0.0]), 0.5).unwrap();
        let b = GalParams::new(Array2::eye(2), arr1(&[0.0, 0.0]), 0.5).unwrap();
        assert_eq!(convolve_params(&a, &b).unwrap().s(), 1.0);

        let a = GalParams::new(Array2::eye(2), arr1(&[0.0, 0.0]), 1.0).unwrap();
        let b = GalParams::new(Array2::eye(2) * 2.0, arr1(&[0.0, 0.0]), 1.0).unwrap();
        assert!(matches!(
            convolve_params(&a, &b),
            Err(GalError::IncompatibleParams(_))
        ));
    }

    #[test]
    fn cf_inversion_matches_closed_forms() {
        // Laplace point value e^{-1}/2.
        let f = cf_inversion_pdf_1d(&gal1(2.0, 0.0, 1.0), 1.0).unwrap();
        assert_relative_eq!(f, (-1.0f64).exp() / 2.0, epsilon = 1e-9);
        // At the origin.
        let f = cf_inversion_pdf_1d(&gal1(2.0, 0.0, 1.0), 0.0).unwrap();
        assert_relative_eq!(f, 0.5, epsilon = 1e-9);
        // Asymmetric case, frozen from high-precision quadrature.
        let f = cf_inversion_pdf_1d(&gal1(2.0, 1.0, 1.0), 0.5).unwrap();
        assert_relative_eq!(f, 0.32833004209911849642, epsilon = 1e-9);
    }

    use ndarray::Array2;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn cf_modulus_bounded_and_conjugate_symmetric(
            sig in 0.1f64..10.0,
            off in -0.9f64..0.9,
            mu0 in -3.0f64..3.0,
            mu1 in -3.0f64..3.0,
            s in 0.1f64..8.0,
            u0 in -20.0f64..20.0,
            u1 in -20.0f64..20.0,
        ) {
            let sigma = arr2(&[[sig, off * sig], [off * sig, sig]]);
            let params = GalParams::new(sigma, arr1(&[mu0, mu1]), s).unwrap();
            let u = arr1(&[u0, u1]);
            let v = cf(&params, &u).unwrap();
            prop_assert!(v.norm() <= 1.0 + 1e-14);
            let neg = cf(&params, &u.mapv(|t| -t)).unwrap();
            prop_assert!((neg - v.conj()).norm() <= 1e-14);
        }

        #[test]
        fn cf_of_convolution_is_product(
            s1 in 0.2f64..4.0,
            s2 in 0.2f64..4.0,
            u0 in -10.0f64..10.0,
            u1 in -10.0f64..10.0,
        ) {
            let sigma = arr2(&[[4.0, 2.0], [2.0, 5.0]]);
            let mu = arr1(&[1.0, -1.0]);
            let a = GalParams::new(sigma.clone(), mu.clone(), s1).unwrap();
            let b = GalParams::new(sigma, mu, s2).unwrap();
            let c = convolve_params(&a, &b).unwrap();
            let u = arr1(&[u0, u1]);
            let lhs = cf(&c, &u).unwrap();
            let rhs = cf(&a, &u).unwrap() * cf(&b, &u).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12);
        }
    }
}
