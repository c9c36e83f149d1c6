//! Seedable random variate generation: scalar primitives (uniform,
//! normal, gamma), the multivariate normal, and the three GAL
//! constructions — the gamma variance-mean mixture, the Gaussian
//! matrix-vector product, and its isotropic corollary.
//!
//! Everything is a pure function of an [`RngStream`]; identical
//! `(seed, stream_id)` reproduce identical draws.

use ndarray::{Array1, Array2};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::core::{GalParams, MatrixProductParams, SpdFactor};
use crate::error::{GalError, Result};

/// Counter-based deterministic random stream.
///
/// Backed by ChaCha8 keyed on `seed` with the ChaCha stream word set to
/// `stream_id`: distinct stream ids from one seed give statistically
/// independent sequences. A stream is single-owner; parallel consumers
/// should derive [`RngStream::child`] streams instead of sharing one.
///
/// Normal variates use the Marsaglia polar method (pairs are generated
/// and the spare is cached), gamma variates the Marsaglia-Tsang squeeze
/// with the power-of-uniform boost below shape 1. These choices are
/// fixed: they are part of the reproducibility contract.
#[derive(Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
            spare_normal: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Derives an independent stream for parallel work. The mapping
    /// `(stream_id, index) -> child id` is a fixed bijective-ish mix, so
    /// results never depend on scheduling.
    pub fn child(&self, index: u64) -> Self {
        let mut x = self
            .stream_id
            .wrapping_mul(0x9E3779B97F4A7C15)
            .wrapping_add(index)
            .wrapping_add(0xD1B54A32D192ED03);
        x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
        x ^= x >> 31;
        Self::new(self.seed, x)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `(0, 1)`.
    fn next_open01(&mut self) -> f64 {
        loop {
            let v = self.next_f64();
            if v > 0.0 {
                return v;
            }
        }
    }

    /// Unbiased integer in `[0, bound)` by rejection on the top range.
    pub(crate) fn next_index(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        let bound = bound as u64;
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let v = self.next_u64();
            if v < zone {
                return (v % bound) as usize;
            }
        }
    }

    /// One standard normal draw (Marsaglia polar, cached spare).
    pub fn next_std_normal(&mut self) -> f64 {
        if let Some(v) = self.spare_normal.take() {
            return v;
        }
        loop {
            let a = 2.0 * self.next_f64() - 1.0;
            let b = 2.0 * self.next_f64() - 1.0;
            let r2 = a * a + b * b;
            if r2 >= 1.0 || r2 == 0.0 {
                continue;
            }
            let f = (-2.0 * r2.ln() / r2).sqrt();
            self.spare_normal = Some(b * f);
            return a * f;
        }
    }

    /// One `Gamma(shape, rate = 1)` draw.
    pub fn next_gamma(&mut self, shape: f64) -> Result<f64> {
        if !(shape > 0.0) || !shape.is_finite() {
            return Err(GalError::Domain(format!(
                "gamma shape must be > 0, got {shape}"
            )));
        }
        if shape < 1.0 {
            // Boosting identity: u = u' * U^{1/shape}, u' ~ Gamma(shape+1).
            let boost = self.marsaglia_tsang(shape + 1.0);
            let u = self.next_open01();
            return Ok(boost * u.powf(1.0 / shape));
        }
        Ok(self.marsaglia_tsang(shape))
    }

    /// Marsaglia-Tsang squeeze rejection, valid for shape >= 1.
    fn marsaglia_tsang(&mut self, shape: f64) -> f64 {
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.next_std_normal();
            let v_cbrt = 1.0 + c * x;
            if v_cbrt <= 0.0 {
                continue;
            }
            let v = v_cbrt * v_cbrt * v_cbrt;
            let u = self.next_open01();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2
                || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln())
            {
                return d * v;
            }
        }
    }
}

/// Provenance attached to every generated sample set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleMeta {
    pub sampler: String,
    pub params: String,
    pub seed: u64,
    pub stream: u64,
}

/// An n x p matrix of draws (rows are observations) plus provenance.
#[derive(Debug, Clone)]
pub struct SampleMatrix {
    pub data: Array2<f64>,
    pub meta: SampleMeta,
}

impl SampleMatrix {
    pub fn n(&self) -> usize {
        self.data.nrows()
    }

    pub fn p(&self) -> usize {
        self.data.ncols()
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(GalError::Domain("sample count must be at least 1".into()));
    }
    Ok(())
}

/// `n` i.i.d. standard normal draws.
pub fn gen_std_normal(rng: &mut RngStream, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.next_std_normal()).collect()
}

/// `n` i.i.d. `Gamma(shape, rate = 1)` draws.
pub fn gen_gamma(rng: &mut RngStream, shape: f64, n: usize) -> Result<Vec<f64>> {
    (0..n).map(|_| rng.next_gamma(shape)).collect()
}

/// `n` draws from `N(0, sigma)` through the factored map `row = B eps`.
/// Accepts rank-deficient factors (degenerate normals).
pub fn gen_mvn(rng: &mut RngStream, factor: &SpdFactor, n: usize) -> Result<SampleMatrix> {
    check_count(n)?;
    let p = factor.p();
    let mut data = Array2::<f64>::zeros((n, p));
    let mut eps = vec![0.0f64; p];
    for i in 0..n {
        for e in eps.iter_mut() {
            *e = rng.next_std_normal();
        }
        data.row_mut(i).assign(&factor.apply_factor(&eps));
    }
    Ok(SampleMatrix {
        data,
        meta: SampleMeta {
            sampler: "mvn".into(),
            params: format!("N(0, sigma), p={p}"),
            seed: rng.seed(),
            stream: rng.stream_id(),
        },
    })
}

/// Gamma variance-mean mixture: each row is `u mu + sqrt(u) x` with
/// `u ~ Gamma(s, 1)` and `x ~ N(0, sigma)` independent, i.i.d.
/// `GAL_p(sigma, mu, s)`.
pub fn sample_mixture(rng: &mut RngStream, params: &GalParams, n: usize) -> Result<SampleMatrix> {
    check_count(n)?;
    let factor = SpdFactor::factorize(params.sigma())?;
    let p = params.p();
    let mut data = Array2::<f64>::zeros((n, p));
    let mut eps = vec![0.0f64; p];
    for i in 0..n {
        let u = rng.next_gamma(params.s())?;
        for e in eps.iter_mut() {
            *e = rng.next_std_normal();
        }
        let x = factor.apply_factor(&eps);
        let root_u = u.sqrt();
        let mut row = data.row_mut(i);
        for j in 0..p {
            row[j] = u * params.mu()[j] + root_u * x[j];
        }
    }
    Ok(SampleMatrix {
        data,
        meta: SampleMeta {
            sampler: "mixture".into(),
            params: format!("GAL(p={p}, s={})", params.s()),
            seed: rng.seed(),
            stream: rng.stream_id(),
        },
    })
}

/// The single-column term of the matrix-product construction: each row is
/// `y w + y^2 mu` with scalar `y ~ N(0,1)` and `w ~ N(0, sigma)`
/// independent; distributed `GAL_p(2 sigma, 2 mu, 1/2)`.
pub fn sample_column_term(
    rng: &mut RngStream,
    sigma: &Array2<f64>,
    mu: &Array1<f64>,
    n: usize,
) -> Result<SampleMatrix> {
    check_count(n)?;
    let factor = SpdFactor::factorize(sigma)?;
    let p = factor.p();
    if mu.len() != p {
        return Err(GalError::DimensionMismatch(format!(
            "mu has length {}, sigma is {p}x{p}",
            mu.len()
        )));
    }
    let mut data = Array2::<f64>::zeros((n, p));
    let mut eps = vec![0.0f64; p];
    for i in 0..n {
        let y = rng.next_std_normal();
        for e in eps.iter_mut() {
            *e = rng.next_std_normal();
        }
        let w = factor.apply_factor(&eps);
        let mut row = data.row_mut(i);
        for j in 0..p {
            row[j] = y * w[j] + y * y * mu[j];
        }
    }
    Ok(SampleMatrix {
        data,
        meta: SampleMeta {
            sampler: "column-term".into(),
            params: format!("xi = y w + y^2 mu, p={p}"),
            seed: rng.seed(),
            stream: rng.stream_id(),
        },
    })
}

/// The matrix-product construction: each row materializes `W` (p x d,
/// i.i.d. `N(0, sigma)` columns) and `y ~ N(0, I_d)` column by column,
/// returning `W y + ||y||^2 mu`; rows are i.i.d.
/// `GAL_p(2 sigma, 2 mu, d/2)`. Memory is O(p) per draw.
///
/// Requires `alpha = 1` (the construction's `y` is standard isotropic);
/// use [`sample_isotropic_product`] for general `alpha`.
pub fn sample_matrix_product(
    rng: &mut RngStream,
    mp: &MatrixProductParams,
    n: usize,
) -> Result<SampleMatrix> {
    if mp.alpha() != 1.0 {
        return Err(GalError::Domain(format!(
            "sample_matrix_product requires alpha = 1, got {}",
            mp.alpha()
        )));
    }
    product_draws(rng, mp, n, true, "matrix-product")
}

/// The symmetric corollary: rows are `W y` with `y ~ N(0, alpha I_d)`;
/// distributed `GAL_p(2 alpha sigma, 0, d/2)`, equal in law to
/// `sqrt(u) x` with `u ~ Gamma(d/2, 1)`, `x ~ N(0, 2 alpha sigma)`.
pub fn sample_isotropic_product(
    rng: &mut RngStream,
    mp: &MatrixProductParams,
    n: usize,
) -> Result<SampleMatrix> {
    product_draws(rng, mp, n, false, "isotropic")
}

fn product_draws(
    rng: &mut RngStream,
    mp: &MatrixProductParams,
    n: usize,
    add_drift: bool,
    name: &str,
) -> Result<SampleMatrix> {
    check_count(n)?;
    let factor = SpdFactor::factorize(mp.sigma())?;
    let p = mp.p();
    let d = mp.d();
    let root_alpha = mp.alpha().sqrt();
    let mut data = Array2::<f64>::zeros((n, p));
    let mut eps = vec![0.0f64; p];
    for i in 0..n {
        let mut row = data.row_mut(i);
        let mut y_sq = 0.0;
        for _ in 0..d {
            let y = root_alpha * rng.next_std_normal();
            y_sq += y * y;
            for e in eps.iter_mut() {
                *e = rng.next_std_normal();
            }
            let col = factor.apply_factor(&eps);
            for j in 0..p {
                row[j] += y * col[j];
            }
        }
        if add_drift {
            for j in 0..p {
                row[j] += y_sq * mp.mu()[j];
            }
        }
    }
    Ok(SampleMatrix {
        data,
        meta: SampleMeta {
            sampler: name.into(),
            params: format!("p={p}, d={d}, alpha={}", mp.alpha()),
            seed: rng.seed(),
            stream: rng.stream_id(),
        },
    })
}
