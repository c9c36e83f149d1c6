//! Parameter types, validation, and the dense linear algebra every other
//! module consumes: symmetric eigenvalue screening, (pivoted) Cholesky
//! factorization, triangular solves, and quadratic forms.
//!
//! Matrix inverses are never formed explicitly anywhere in this crate;
//! everything goes through [`SpdFactor::whiten`].

use ndarray::{Array1, Array2};

use crate::error::{GalError, Result};

/// Relative tolerance for accepting (and silently repairing) asymmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Relative tolerance for the positive semidefiniteness check and for
/// Cholesky pivots: eigenvalues/pivots below `-PSD_TOL * scale` reject.
pub const PSD_TOL: f64 = 1e-10;

/// Parameters of the p-dimensional generalized asymmetric Laplace
/// distribution: a covariance-like matrix `sigma`, an asymmetry vector
/// `mu`, and a positive shape `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct GalParams {
    sigma: Array2<f64>,
    mu: Array1<f64>,
    s: f64,
}

impl GalParams {
    /// Validates and constructs the parameter triple.
    ///
    /// `sigma` must be square, match `mu`'s length, be symmetric to within
    /// `SYMMETRY_TOL` relative (small asymmetry is repaired by averaging),
    /// and be positive semidefinite to within `PSD_TOL` relative. `s` must
    /// be strictly positive.
    pub fn new(sigma: Array2<f64>, mu: Array1<f64>, s: f64) -> Result<Self> {
        let sigma = validate_sigma(sigma)?;
        let p = sigma.nrows();
        if mu.len() != p {
            return Err(GalError::DimensionMismatch(format!(
                "mu has length {}, sigma is {p}x{p}",
                mu.len()
            )));
        }
        if mu.iter().any(|v| !v.is_finite()) {
            return Err(GalError::Domain("mu contains a non-finite entry".into()));
        }
        if !(s > 0.0) || !s.is_finite() {
            return Err(GalError::NonPositiveShape(s));
        }
        Ok(Self { sigma, mu, s })
    }

    pub fn p(&self) -> usize {
        self.mu.len()
    }

    pub fn sigma(&self) -> &Array2<f64> {
        &self.sigma
    }

    pub fn mu(&self) -> &Array1<f64> {
        &self.mu
    }

    pub fn s(&self) -> f64 {
        self.s
    }
}

/// Parameters of the `W y + ||y||^2 mu` construction: `W` is p x d with
/// i.i.d. `N(0, sigma)` columns and `y ~ N(0, alpha I_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixProductParams {
    sigma: Array2<f64>,
    mu: Array1<f64>,
    d: usize,
    alpha: f64,
}

impl MatrixProductParams {
    pub fn new(sigma: Array2<f64>, mu: Array1<f64>, d: usize, alpha: f64) -> Result<Self> {
        let sigma = validate_sigma(sigma)?;
        let p = sigma.nrows();
        if mu.len() != p {
            return Err(GalError::DimensionMismatch(format!(
                "mu has length {}, sigma is {p}x{p}",
                mu.len()
            )));
        }
        if mu.iter().any(|v| !v.is_finite()) {
            return Err(GalError::Domain("mu contains a non-finite entry".into()));
        }
        if d < 1 {
            return Err(GalError::Domain("d must be at least 1".into()));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(GalError::Domain(format!(
                "alpha must be a positive real, got {alpha}"
            )));
        }
        Ok(Self { sigma, mu, d, alpha })
    }

    pub fn p(&self) -> usize {
        self.mu.len()
    }

    pub fn sigma(&self) -> &Array2<f64> {
        &self.sigma
    }

    pub fn mu(&self) -> &Array1<f64> {
        &self.mu
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Shared sigma checks: squareness, finiteness, symmetry (with repair),
/// and the eigenvalue-based PSD screen.
fn validate_sigma(sigma: Array2<f64>) -> Result<Array2<f64>> {
    let p = sigma.nrows();
    if p == 0 || sigma.ncols() != p {
        return Err(GalError::DimensionMismatch(format!(
            "sigma must be square and non-empty, got {}x{}",
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    if sigma.iter().any(|v| !v.is_finite()) {
        return Err(GalError::Domain("sigma contains a non-finite entry".into()));
    }
    let scale = sigma.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = SYMMETRY_TOL * scale;
    let mut max_abs_diff = 0.0f64;
    for i in 0..p {
        for j in (i + 1)..p {
            max_abs_diff = max_abs_diff.max((sigma[(i, j)] - sigma[(j, i)]).abs());
        }
    }
    if !(max_abs_diff <= tol) {
        return Err(GalError::NonSymmetric { max_abs_diff, tol });
    }
    let mut sym = sigma;
    for i in 0..p {
        for j in (i + 1)..p {
            let avg = 0.5 * (sym[(i, j)] + sym[(j, i)]);
            sym[(i, j)] = avg;
            sym[(j, i)] = avg;
        }
    }
    let eigs = sym_eigenvalues(&sym);
    let lambda_max = eigs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lambda_min = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    if lambda_min < -PSD_TOL * lambda_max {
        return Err(GalError::NotPsd(format!(
            "min eigenvalue {lambda_min:e} is below -{PSD_TOL:e} * max eigenvalue {lambda_max:e}"
        )));
    }
    Ok(sym)
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
///
/// Intended for validation at small p; converges quadratically and is
/// backward stable for symmetric input.
pub fn sym_eigenvalues(a: &Array2<f64>) -> Vec<f64> {
    let p = a.nrows();
    let mut m = a.clone();
    if p == 1 {
        return vec![m[(0, 0)]];
    }
    let norm = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    let stop = 1e-15 * norm.max(f64::MIN_POSITIVE);
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..p {
            for j in (i + 1)..p {
                off += 2.0 * m[(i, j)] * m[(i, j)];
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for i in 0..(p - 1) {
            for j in (i + 1)..p {
                let apq = m[(i, j)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(j, j)] - m[(i, i)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..p {
                    let mik = m[(i, k)];
                    let mjk = m[(j, k)];
                    m[(i, k)] = c * mik - s * mjk;
                    m[(j, k)] = s * mik + c * mjk;
                }
                for k in 0..p {
                    let mki = m[(k, i)];
                    let mkj = m[(k, j)];
                    m[(k, i)] = c * mki - s * mkj;
                    m[(k, j)] = s * mki + c * mkj;
                }
            }
        }
    }
    (0..p).map(|i| m[(i, i)]).collect()
}

/// Cholesky-style factorization of a symmetric PSD matrix.
///
/// Strictly positive definite input yields the classic unpivoted factor
/// with `sigma = L L^T` and `log_det = 2 sum(ln L[i][i])`. Semidefinite
/// input falls back to a diagonal-pivoted factorization: `sigma = B B^T`
/// with `B` the row-permuted factor, `rank < p`, and `log_det = -inf`.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    lower: Array2<f64>,
    /// `perm[k]` is the original row index placed at pivoted position k;
    /// `None` on the unpivoted path.
    perm: Option<Vec<usize>>,
    log_det: f64,
    rank: usize,
}

impl SpdFactor {
    /// Factorizes `sigma`. Fails with `NotPsd` when a pivot falls below
    /// `-PSD_TOL * max(diag)`.
    pub fn factorize(sigma: &Array2<f64>) -> Result<Self> {
        let p = sigma.nrows();
        if p == 0 || sigma.ncols() != p {
            return Err(GalError::DimensionMismatch(format!(
                "sigma must be square and non-empty, got {}x{}",
                sigma.nrows(),
                sigma.ncols()
            )));
        }
        let scale = (0..p).fold(0.0f64, |m, i| m.max(sigma[(i, i)].abs()));
        let tol = PSD_TOL * scale;

        // Unpivoted attempt first: keeps the classic triangular factor for
        // the common strictly-PD case.
        let mut lower = Array2::<f64>::zeros((p, p));
        let mut log_det = 0.0;
        let mut needs_pivoting = false;
        'plain: for k in 0..p {
            let mut d = sigma[(k, k)];
            for j in 0..k {
                d -= lower[(k, j)] * lower[(k, j)];
            }
            if d < -tol {
                return Err(GalError::NotPsd(format!(
                    "pivot {d:e} at step {k} is below -{PSD_TOL:e} * max diagonal {scale:e}"
                )));
            }
            if d <= tol {
                needs_pivoting = true;
                break 'plain;
            }
            let l = d.sqrt();
            lower[(k, k)] = l;
            log_det += 2.0 * l.ln();
            for i in (k + 1)..p {
                let mut v = sigma[(i, k)];
                for j in 0..k {
                    v -= lower[(i, j)] * lower[(k, j)];
                }
                lower[(i, k)] = v / l;
            }
        }
        if !needs_pivoting {
            return Ok(Self { lower, perm: None, log_det, rank: p });
        }

        // Diagonal-pivoted pass for semidefinite input.
        let mut l = Array2::<f64>::zeros((p, p));
        let mut perm: Vec<usize> = (0..p).collect();
        let mut diag: Vec<f64> = (0..p).map(|i| sigma[(i, i)]).collect();
        let mut rank = p;
        for k in 0..p {
            let (q, &dmax) = diag[k..]
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, v)| (k + i, v))
                .expect("non-empty diagonal");
            if dmax <= tol {
                let dmin = diag[k..].iter().cloned().fold(f64::INFINITY, f64::min);
                if dmin < -tol {
                    return Err(GalError::NotPsd(format!(
                        "residual diagonal {dmin:e} is below -{PSD_TOL:e} * max diagonal {scale:e}"
                    )));
                }
                rank = k;
                break;
            }
            perm.swap(k, q);
            diag.swap(k, q);
            for j in 0..k {
                let tmp = l[(k, j)];
                l[(k, j)] = l[(q, j)];
                l[(q, j)] = tmp;
            }
            let piv = dmax.sqrt();
            l[(k, k)] = piv;
            for i in (k + 1)..p {
                let mut v = sigma[(perm[i], perm[k])];
                for j in 0..k {
                    v -= l[(i, j)] * l[(k, j)];
                }
                let lik = v / piv;
                l[(i, k)] = lik;
                diag[i] -= lik * lik;
            }
        }
        Ok(Self {
            lower: l,
            perm: Some(perm),
            log_det: f64::NEG_INFINITY,
            rank,
        })
    }

    pub fn p(&self) -> usize {
        self.lower.nrows()
    }

    /// The triangular factor (in pivoted row order when `perm` is set).
    pub fn lower(&self) -> &Array2<f64> {
        &self.lower
    }

    /// `ln det(sigma)`; `-inf` for rank-deficient input.
    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// True when the factorization certified strict positive definiteness.
    pub fn is_strict(&self) -> bool {
        self.rank == self.p()
    }

    /// Solves `L w = P^T v`, i.e. the whitening map with
    /// `||whiten(v)||^2 = v^T sigma^{-1} v`. Requires a strict factor.
    pub fn whiten(&self, v: &Array1<f64>) -> Result<Array1<f64>> {
        if !self.is_strict() {
            return Err(GalError::SingularSigma);
        }
        let p = self.p();
        if v.len() != p {
            return Err(GalError::DimensionMismatch(format!(
                "vector has length {}, factor is {p}x{p}",
                v.len()
            )));
        }
        let mut w = Array1::<f64>::zeros(p);
        for i in 0..p {
            let vi = match &self.perm {
                Some(perm) => v[perm[i]],
                None => v[i],
            };
            let mut acc = vi;
            for j in 0..i {
                acc -= self.lower[(i, j)] * w[j];
            }
            w[i] = acc / self.lower[(i, i)];
        }
        Ok(w)
    }

    /// `Q_sigma(x) = sqrt(x^T sigma^{-1} x)`, via a triangular solve.
    pub fn quad_form(&self, x: &Array1<f64>) -> Result<f64> {
        let w = self.whiten(x)?;
        Ok(w.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// `C(sigma, mu) = sqrt(2 + mu^T sigma^{-1} mu)`.
    pub fn asym_const(&self, mu: &Array1<f64>) -> Result<f64> {
        let w = self.whiten(mu)?;
        Ok((2.0 + w.iter().map(|v| v * v).sum::<f64>()).sqrt())
    }

    /// Applies the sampling map `z -> B z` with `B B^T = sigma`.
    /// Valid for both strict and rank-deficient factors.
    pub fn apply_factor(&self, z: &[f64]) -> Array1<f64> {
        let p = self.p();
        debug_assert_eq!(z.len(), p);
        let mut out = Array1::<f64>::zeros(p);
        for i in 0..p {
            let mut acc = 0.0;
            for j in 0..self.rank.min(i + 1) {
                acc += self.lower[(i, j)] * z[j];
            }
            let row = match &self.perm {
                Some(perm) => perm[i],
                None => i,
            };
            out[row] = acc;
        }
        out
    }

    /// Reconstructs `B B^T` (equals sigma up to factorization error).
    pub fn reconstruct(&self) -> Array2<f64> {
        let p = self.p();
        let mut out = Array2::<f64>::zeros((p, p));
        for i in 0..p {
            for j in 0..p {
                let mut acc = 0.0;
                for k in 0..p {
                    acc += self.lower[(i, k)] * self.lower[(j, k)];
                }
                let (ri, rj) = match &self.perm {
                    Some(perm) => (perm[i], perm[j]),
                    None => (i, j),
                };
                out[(ri, rj)] = acc;
            }
        }
        out
    }
}
