//! Validated SPD matrices and the dense linear-algebra kernels the rest of
//! the crate is built on: Cholesky factorization, symmetric
//! eigendecomposition, generalized extremal eigenvalues of SPD pencils, the
//! matrix logarithm, and the affine-invariant Riemannian distance/geodesic.
//!
//! Generalized eigenvalues are always computed by Cholesky whitening — the
//! extremal eigenvalues of `L⁻¹ B L⁻ᵀ` where `A = L Lᵀ` — never by forming
//! `A⁻¹` explicitly.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::thompson::GeodesicWeight;

/// Default relative symmetry tolerance accepted at construction.
pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-9;

/// A validated symmetric positive definite matrix.
///
/// Invariants enforced at construction: the stored entries are exactly
/// symmetric (the input is symmetrized as `(M + Mᵀ)/2`), the matrix admits a
/// Cholesky factorization, and `dim >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    dim: usize,
    m: DMatrix<f64>,
}

/// Extremal generalized eigenvalues of an SPD pencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl EigenPair {
    fn ordered(a: f64, b: f64) -> Self {
        if a <= b {
            Self { lambda_min: a, lambda_max: b }
        } else {
            Self { lambda_min: b, lambda_max: a }
        }
    }
}

/// Lower-triangular Cholesky factor of an [`SpdMatrix`].
#[derive(Debug, Clone)]
pub struct SpdCholesky {
    l: DMatrix<f64>,
}

impl SpdMatrix {
    /// Validates `raw` as an SPD matrix using the default symmetry tolerance.
    pub fn new(raw: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(raw, DEFAULT_SYMMETRY_TOL)
    }

    /// Validates `raw` as an SPD matrix.
    ///
    /// The input must be square, symmetric up to `max|M - Mᵀ| <= tol·max|M|`,
    /// and positive definite (checked by Cholesky factorization of the
    /// symmetrized matrix). The stored entries are `(M + Mᵀ)/2`.
    pub fn with_tolerance(raw: DMatrix<f64>, tol: f64) -> Result<Self> {
        Self::validate(raw, tol).map(|(spd, _)| spd)
    }

    fn validate(raw: DMatrix<f64>, tol: f64) -> Result<(Self, SpdCholesky)> {
        let (rows, cols) = raw.shape();
        if rows != cols {
            return Err(Error::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(Error::EmptyInput);
        }
        let mut max_abs = 0.0f64;
        let mut max_asym = 0.0f64;
        for i in 0..rows {
            for j in 0..rows {
                max_abs = max_abs.max(raw[(i, j)].abs());
                if j > i {
                    max_asym = max_asym.max((raw[(i, j)] - raw[(j, i)]).abs());
                }
            }
        }
        if !max_abs.is_finite() || !max_asym.is_finite() {
            return Err(Error::NotPositiveDefinite);
        }
        if max_asym > tol * max_abs {
            return Err(Error::AsymmetryExceedsTolerance {
                max_asymmetry: max_asym,
                tolerance: tol * max_abs,
            });
        }
        let mut m = raw;
        for i in 0..rows {
            for j in (i + 1)..rows {
                let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = avg;
                m[(j, i)] = avg;
            }
        }
        let chol = nalgebra::Cholesky::new(m.clone()).ok_or(Error::NotPositiveDefinite)?;
        Ok((Self { dim: rows, m }, SpdCholesky { l: chol.l() }))
    }

    /// The d×d identity.
    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self { dim, m: DMatrix::identity(dim, dim) }
    }

    /// Diagonal SPD matrix from strictly positive entries.
    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::EmptyInput);
        }
        if diag.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::NotPositiveDefinite);
        }
        let dim = diag.len();
        Ok(Self {
            dim,
            m: DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    /// Scale by a strictly positive constant (stays SPD exactly).
    pub(crate) fn scaled(&self, c: f64) -> Self {
        debug_assert!(c > 0.0 && c.is_finite());
        Self { dim: self.dim, m: &self.m * c }
    }

    /// Symmetrize-and-wrap for matrices known to be SPD by construction.
    pub(crate) fn from_symmetric_parts(dim: usize, mut m: DMatrix<f64>) -> Result<(Self, SpdCholesky)> {
        for i in 0..dim {
            for j in (i + 1)..dim {
                let avg = 0.5 * (m[(i, j)] + m[(j, i)]);
                m[(i, j)] = avg;
                m[(j, i)] = avg;
            }
        }
        let chol = nalgebra::Cholesky::new(m.clone()).ok_or(Error::NotPositiveDefinite)?;
        Ok((Self { dim, m }, SpdCholesky { l: chol.l() }))
    }

    /// Lower-triangular Cholesky factor `L` with `A = L·Lᵀ`.
    pub fn cholesky(&self) -> Result<SpdCholesky> {
        let chol = nalgebra::Cholesky::new(self.m.clone()).ok_or(Error::NotPositiveDefinite)?;
        Ok(SpdCholesky { l: chol.l() })
    }
}

impl SpdCholesky {
    /// The lower-triangular factor.
    pub fn lower(&self) -> &DMatrix<f64> {
        &self.l
    }

    pub fn into_lower(self) -> DMatrix<f64> {
        self.l
    }

    fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// `W = L⁻¹ B L⁻ᵀ`, symmetrized.
    pub(crate) fn whiten(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let s1 = self
            .l
            .solve_lower_triangular(b)
            .expect("Cholesky factor has positive diagonal");
        let mut w = self
            .l
            .solve_lower_triangular(&s1.transpose())
            .expect("Cholesky factor has positive diagonal");
        let d = w.nrows();
        for i in 0..d {
            for j in (i + 1)..d {
                let avg = 0.5 * (w[(i, j)] + w[(j, i)]);
                w[(i, j)] = avg;
                w[(j, i)] = avg;
            }
        }
        w
    }

    /// Extremal generalized eigenvalues of the pencil `(B, A)` where `A` is
    /// the factored matrix, i.e. the extremal eigenvalues of `B·A⁻¹`.
    ///
    /// Dimensions 1 and 2 use closed forms; everything else whitens and
    /// takes the extremes of the dense eigenvalue-only spectrum, which on
    /// small dense matrices outruns iterative extremal solvers by a wide
    /// margin while being exact.
    pub(crate) fn extremal_pencil(&self, b: &DMatrix<f64>) -> EigenPair {
        let d = self.dim();
        match d {
            1 => {
                let l00 = self.l[(0, 0)];
                let lam = b[(0, 0)] / (l00 * l00);
                EigenPair::ordered(lam, lam)
            }
            2 => self.extremal_pencil_2x2(b),
            _ => {
                let w = self.whiten(b);
                dense_extremes(w)
            }
        }
    }

    /// Closed-form 2×2 path: whiten by hand and solve the characteristic
    /// quadratic of the symmetric 2×2 result.
    fn extremal_pencil_2x2(&self, b: &DMatrix<f64>) -> EigenPair {
        let l11 = self.l[(0, 0)];
        let l21 = self.l[(1, 0)];
        let l22 = self.l[(1, 1)];
        // Rows of L⁻¹: [1/l11, 0], [-l21/(l11 l22), 1/l22].
        let i11 = 1.0 / l11;
        let i21 = -l21 / (l11 * l22);
        let i22 = 1.0 / l22;
        let (b11, b12, b22) = (b[(0, 0)], 0.5 * (b[(0, 1)] + b[(1, 0)]), b[(1, 1)]);
        // W = L⁻¹ B L⁻ᵀ for symmetric B.
        let w11 = i11 * i11 * b11;
        let w12 = i11 * (i21 * b11 + i22 * b12);
        let w22 = i21 * i21 * b11 + 2.0 * i21 * i22 * b12 + i22 * i22 * b22;
        let mean = 0.5 * (w11 + w22);
        let half_diff = 0.5 * (w11 - w22);
        let delta = (half_diff * half_diff + w12 * w12).sqrt();
        EigenPair::ordered(mean - delta, mean + delta)
    }

    /// Full generalized spectrum of the pencil `(B, A)`, ascending.
    pub(crate) fn pencil_spectrum(&self, b: &DMatrix<f64>) -> DVector<f64> {
        let w = self.whiten(b);
        let mut ev = w.symmetric_eigenvalues();
        ev.as_mut_slice().sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        ev
    }
}

fn dense_extremes(w: DMatrix<f64>) -> EigenPair {
    let (diag, off) = tridiagonalize_sym(w);
    tridiag_extremes(&diag, &off)
}

/// Householder tridiagonalization of a symmetric matrix, eigenvalues-only
/// variant: no orthogonal factor is accumulated and only the lower triangle
/// is read and updated (symv/syr2-style column sweeps).
fn tridiagonalize_sym(mut a: DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let n = a.nrows();
    let mut off = vec![0.0f64; n.saturating_sub(1)];
    let mut v = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    for k in 0..n.saturating_sub(2) {
        let x0 = a[(k + 1, k)];
        let mut alpha2 = 0.0;
        for i in (k + 1)..n {
            let x = a[(i, k)];
            alpha2 += x * x;
        }
        let below2 = alpha2 - x0 * x0;
        if !(below2 > f64::EPSILON * f64::EPSILON * alpha2) {
            off[k] = x0;
            continue;
        }
        let norm = alpha2.sqrt();
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        let v0 = x0 - alpha;
        let vtv = below2 + v0 * v0;
        let beta = 2.0 / vtv;
        v[k + 1] = v0;
        for i in (k + 2)..n {
            v[i] = a[(i, k)];
        }
        // w = β·A·v on the trailing block, reading the lower triangle once.
        for i in (k + 1)..n {
            w[i] = 0.0;
        }
        for c in (k + 1)..n {
            let vc = v[c];
            let col = a.column(c);
            w[c] += col[c] * vc;
            let mut acc = 0.0;
            for i in (c + 1)..n {
                let aic = col[i];
                w[i] += aic * vc;
                acc += aic * v[i];
            }
            w[c] += acc;
        }
        let mut vtw = 0.0;
        for i in (k + 1)..n {
            w[i] *= beta;
            vtw += v[i] * w[i];
        }
        let c2 = 0.5 * beta * vtw;
        for i in (k + 1)..n {
            w[i] -= c2 * v[i];
        }
        // Symmetric rank-2 update A ← A − v·wᵀ − w·vᵀ, lower triangle only.
        for c in (k + 1)..n {
            let (vc, wc) = (v[c], w[c]);
            let mut col = a.column_mut(c);
            for i in c..n {
                col[i] -= v[i] * wc + w[i] * vc;
            }
        }
        off[k] = alpha;
    }
    if n >= 2 {
        off[n - 2] = a[(n - 1, n - 2)];
    }
    let diag = (0..n).map(|i| a[(i, i)]).collect();
    (diag, off)
}

/// Extremal eigenvalues of a symmetric tridiagonal matrix by Sturm-sequence
/// bisection to machine precision.
fn tridiag_extremes(diag: &[f64], off: &[f64]) -> EigenPair {
    let n = diag.len();
    if n == 1 {
        return EigenPair::ordered(diag[0], diag[0]);
    }
    // Gershgorin enclosure.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i == 0 {
            off[0].abs()
        } else if i == n - 1 {
            off[n - 2].abs()
        } else {
            off[i - 1].abs() + off[i].abs()
        };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    // Eigenvalues strictly below x, counted by the signs of the Sturm
    // sequence of leading-principal-minor ratios.
    let count_below = |x: f64| -> usize {
        let mut count = 0usize;
        let mut q = diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let denom = if q == 0.0 { f64::MIN_POSITIVE * scale.max(1.0) } else { q };
            q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    let bisect = |target: usize| -> f64 {
        // Smallest x with count_below(x) >= target.
        let mut a = lo - 1e-12 * scale;
        let mut b = hi + 1e-12 * scale;
        while b - a > 1e-14 * scale {
            let mid = 0.5 * (a + b);
            if count_below(mid) >= target {
                b = mid;
            } else {
                a = mid;
            }
        }
        0.5 * (a + b)
    };
    EigenPair::ordered(bisect(1), bisect(n))
}

/// Symmetric eigendecomposition with eigenvalues in ascending order and
/// orthonormal eigenvectors as columns. The input is symmetrized first.
pub fn sym_eig(m: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if rows == 0 {
        return Err(Error::EmptyInput);
    }
    let mut sym = m.clone();
    for i in 0..rows {
        for j in (i + 1)..rows {
            let avg = 0.5 * (sym[(i, j)] + sym[(j, i)]);
            sym[(i, j)] = avg;
            sym[(j, i)] = avg;
        }
    }
    let max_sweeps = 100 * rows;
    let eig = nalgebra::SymmetricEigen::try_new(sym, f64::EPSILON, max_sweeps)
        .ok_or(Error::NoConvergence { max_sweeps })?;
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let values = DVector::from_fn(rows, |i, _| eig.eigenvalues[order[i]]);
    let vectors = DMatrix::from_fn(rows, rows, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Extremal generalized eigenvalues of the pair `(A, B)`: the smallest and
/// largest eigenvalues of `B·A⁻¹`, computed from the whitened matrix
/// `L⁻¹ B L⁻ᵀ` with `A = L·Lᵀ`.
pub fn gen_extremal_eig(a: &SpdMatrix, b: &SpdMatrix) -> Result<EigenPair> {
    check_dims(a, b)?;
    let chol = a.cholesky()?;
    Ok(chol.extremal_pencil(b.matrix()))
}

/// Matrix logarithm of an SPD matrix (symmetric result).
pub fn matrix_log(a: &SpdMatrix) -> Result<DMatrix<f64>> {
    let (values, vectors) = sym_eig(a.matrix())?;
    Ok(spectral_map(&values, &vectors, f64::ln))
}

/// Matrix exponential of a symmetric matrix (SPD result, returned raw).
pub fn matrix_exp_sym(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (values, vectors) = sym_eig(s)?;
    Ok(spectral_map(&values, &vectors, f64::exp))
}

pub(crate) fn spectral_map(
    values: &DVector<f64>,
    vectors: &DMatrix<f64>,
    f: impl Fn(f64) -> f64,
) -> DMatrix<f64> {
    let mapped = DVector::from_fn(values.len(), |i, _| f(values[i]));
    let mut out: DMatrix<f64> = vectors * DMatrix::from_diagonal(&mapped) * vectors.transpose();
    let d = out.nrows();
    for i in 0..d {
        for j in (i + 1)..d {
            let avg = 0.5 * (out[(i, j)] + out[(j, i)]);
            out[(i, j)] = avg;
            out[(j, i)] = avg;
        }
    }
    out
}

/// Affine-invariant Riemannian distance `(Σᵢ log² λᵢ)^{1/2}` over the full
/// generalized spectrum of `B·A⁻¹`.
pub fn riemannian_distance(a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
    check_dims(a, b)?;
    let chol = a.cholesky()?;
    let spectrum = chol.pencil_spectrum(b.matrix());
    let mut sum = 0.0;
    for &lam in spectrum.iter() {
        let l = lam.ln();
        sum += l * l;
    }
    Ok(sum.sqrt())
}

/// Riemannian geodesic `A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}`.
pub fn riemannian_geodesic(a: &SpdMatrix, b: &SpdMatrix, t: GeodesicWeight) -> Result<SpdMatrix> {
    check_dims(a, b)?;
    let t = t.value();
    let (values, vectors) = sym_eig(a.matrix())?;
    let a_half = spectral_map(&values, &vectors, f64::sqrt);
    let a_neg_half = spectral_map(&values, &vectors, |v| 1.0 / v.sqrt());
    let mid: DMatrix<f64> = &a_neg_half * b.matrix() * &a_neg_half;
    let (mv, mvec) = sym_eig(&mid)?;
    let powered = spectral_map(&mv, &mvec, |v| v.powf(t));
    let out: DMatrix<f64> = &a_half * powered * &a_half;
    SpdMatrix::from_symmetric_parts(a.dim(), out).map(|(spd, _)| spd)
}

/// Bijection of 2×2 SPD matrices `[[a,b],[b,c]]` into the interior of the
/// circular cone `z > sqrt(x² + y²)`: `(√2·b, (a−c)/√2, (a+c)/√2)`.
pub fn cone_projection(a: &SpdMatrix) -> Result<(f64, f64, f64)> {
    if a.dim() != 2 {
        return Err(Error::WrongDimension { expected: 2, actual: a.dim() });
    }
    let m = a.matrix();
    let (p, b, c) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let sqrt2 = std::f64::consts::SQRT_2;
    Ok((sqrt2 * b, (p - c) / sqrt2, (p + c) / sqrt2))
}

/// Löwner order check `A ⪯ B` up to `tol` on the smallest eigenvalue of
/// `B − A`, relative to the larger entry scale of the two inputs.
pub fn is_loewner_leq(a: &SpdMatrix, b: &SpdMatrix, tol: f64) -> Result<bool> {
    check_dims(a, b)?;
    let diff = b.matrix() - a.matrix();
    let ev = diff.symmetric_eigenvalues();
    let scale = a
        .matrix()
        .iter()
        .chain(b.matrix().iter())
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    Ok(ev.iter().all(|&v| v >= -tol * scale.max(1.0)))
}

pub(crate) fn check_dims(a: &SpdMatrix, b: &SpdMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: b.dim() });
    }
    Ok(())
}
