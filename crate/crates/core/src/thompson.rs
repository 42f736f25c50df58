//! Thompson metric on the SPD cone, the Nussbaum geodesic (equivalently the
//! weighted geometric midrange), d∞-sphere sampling, and congruence
//! transport.
//!
//! Both the distance and the geodesic rely only on the extremal generalized
//! eigenvalues of the pencil, which is what makes this geometry cheap
//! compared to the full-spectrum Riemannian machinery.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::spd::{check_dims, matrix_exp_sym, sym_eig, EigenPair, SpdCholesky, SpdMatrix};

/// Relative eigenvalue gap below which the Nussbaum formula switches to its
/// degenerate branch `λ_m^t · A`. Below this the general formula divides by a
/// vanishing gap and loses all precision, while the limit branch is exact.
pub const DEGENERACY_GAP: f64 = 1e-12;

/// Resampling cap for degenerate sphere directions.
const MAX_DIRECTION_ATTEMPTS: usize = 100;

/// Interpolation parameter on a geodesic, restricted to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicWeight(f64);

impl GeodesicWeight {
    /// Thompson midpoint weight.
    pub const MIDPOINT: GeodesicWeight = GeodesicWeight(0.5);

    pub fn new(t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) || !t.is_finite() {
            return Err(Error::WeightOutOfRange { value: t });
        }
        Ok(Self(t))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Thompson distance `log max{λ_max(A·B⁻¹), λ_max(B·A⁻¹)}`.
pub fn thompson_distance(a: &SpdMatrix, b: &SpdMatrix) -> Result<f64> {
    check_dims(a, b)?;
    let chol = a.cholesky()?;
    Ok(distance_from_pair(&chol.extremal_pencil(b.matrix())))
}

/// Distance given the extremal eigenvalues of `B·A⁻¹`:
/// `max(log λ_max, -log λ_min)`.
pub(crate) fn distance_from_pair(pair: &EigenPair) -> f64 {
    let d = pair.lambda_max.ln().max(-pair.lambda_min.ln());
    // Exact zero for the identity pencil; clamp fp residue on near-equal
    // inputs so the metric never reports a negative distance.
    d.max(0.0)
}

/// Nussbaum geodesic of the Thompson metric from `A` to `B`, which equals
/// the weighted geometric midrange `M(A, B, t)`.
pub fn thompson_geodesic(a: &SpdMatrix, b: &SpdMatrix, t: GeodesicWeight) -> Result<SpdMatrix> {
    check_dims(a, b)?;
    let chol = a.cholesky()?;
    let pair = chol.extremal_pencil(b.matrix());
    combine_from_pair(a, b, t.value(), &pair).map(|(spd, _)| spd)
}

/// Analytic extension of the Nussbaum geodesic to any real parameter.
///
/// The closed form stays SPD for all real `t`; parameters outside `[0, 1]`
/// are used internally for sphere retraction, extension, and antipodes.
pub(crate) fn geodesic_extended(a: &SpdMatrix, b: &SpdMatrix, t: f64) -> Result<SpdMatrix> {
    check_dims(a, b)?;
    let chol = a.cholesky()?;
    let pair = chol.extremal_pencil(b.matrix());
    combine_from_pair(a, b, t, &pair).map(|(spd, _)| spd)
}

/// Nussbaum combination
/// `A ∗_t B = ((λ_M^t − λ_m^t)·B + (λ_M·λ_m^t − λ_m·λ_M^t)·A) / (λ_M − λ_m)`
/// given precomputed extremal eigenvalues of `B·A⁻¹`.
///
/// Powers are taken in log-space (`exp(t·log λ)`) to avoid overflow on
/// ill-conditioned pencils; the degenerate branch (`λ_M ≈ λ_m`, i.e.
/// `B ≈ λ_m·A`) returns `λ_m^t·A`. Returns the validated result together
/// with its Cholesky factor so iterative callers can reuse it.
pub(crate) fn combine_from_pair(
    a: &SpdMatrix,
    b: &SpdMatrix,
    t: f64,
    pair: &EigenPair,
) -> Result<(SpdMatrix, SpdCholesky)> {
    let (lm, lam_max) = (pair.lambda_min, pair.lambda_max);
    if !(lm > 0.0) || !lam_max.is_finite() {
        return Err(Error::NotPositiveDefinite);
    }
    let gap = lam_max - lm;
    if gap <= DEGENERACY_GAP * lam_max {
        let spd = a.scaled((t * lm.ln()).exp());
        let chol = spd.cholesky()?;
        return Ok((spd, chol));
    }
    let lm_t = (t * lm.ln()).exp();
    let lmax_t = (t * lam_max.ln()).exp();
    let coeff_b = (lmax_t - lm_t) / gap;
    let coeff_a = (lam_max * lm_t - lm * lmax_t) / gap;
    let m = b.matrix() * coeff_b + a.matrix() * coeff_a;
    SpdMatrix::from_symmetric_parts(a.dim(), m)
}

/// Congruence transform `G·A·Gᵀ` for invertible `G`.
pub fn congruence(a: &SpdMatrix, g: &DMatrix<f64>) -> Result<SpdMatrix> {
    let (rows, cols) = g.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if rows != a.dim() {
        return Err(Error::DimensionMismatch { left: a.dim(), right: rows });
    }
    if !g.clone().lu().is_invertible() {
        return Err(Error::SingularTransform);
    }
    let m = g * a.matrix() * g.transpose();
    SpdMatrix::from_symmetric_parts(a.dim(), m)
        .map(|(spd, _)| spd)
        .map_err(|_| Error::SingularTransform)
}

/// A point at exact Thompson distance `radius` from `center`.
#[derive(Debug, Clone)]
pub struct SphereSample {
    center: SpdMatrix,
    radius: f64,
    point: SpdMatrix,
}

impl SphereSample {
    pub fn center(&self) -> &SpdMatrix {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn point(&self) -> &SpdMatrix {
        &self.point
    }

    pub fn into_point(self) -> SpdMatrix {
        self.point
    }

    /// The geodesic antipode: the point at parameter −1 on the geodesic from
    /// the center through the sample, also at distance `radius`.
    pub fn antipode(&self) -> Result<SpdMatrix> {
        geodesic_extended(&self.center, &self.point, -1.0)
    }
}

/// Draws a random point on the d∞-sphere of the given radius around
/// `center`.
///
/// A symmetric Gaussian direction `S` (independent standard normal entries
/// on and above the diagonal, mirrored) is exponentiated to `P = exp(S)`,
/// re-parameterized along the Nussbaum geodesic from the identity so that
/// its Thompson distance from the identity is exactly `radius` (extending
/// past the endpoint when needed), and transported to the center by the
/// congruence `Σ ↦ C^{1/2} Σ C^{1/2}`.
///
/// Directions whose eigenvalues are all equal within tolerance carry no
/// angular information and are resampled, at most [`MAX_DIRECTION_ATTEMPTS`]
/// times.
pub fn sphere_sample<R: Rng + ?Sized>(
    center: &SpdMatrix,
    radius: f64,
    rng: &mut R,
) -> Result<SphereSample> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "sphere radius must be positive and finite, got {radius}"
        )));
    }
    let d = center.dim();
    for _ in 0..MAX_DIRECTION_ATTEMPTS {
        let s = random_symmetric_direction(d, rng);
        let (values, vectors) = sym_eig(&s)?;
        let spread = values[d - 1] - values[0];
        if spread <= 1e-12 * values[d - 1].abs().max(1.0) {
            continue;
        }
        // Eigenvalues of P = exp(S) are exp(λᵢ); the pencil (P, I) therefore
        // has known extremes, and d∞(I, P) = max(λ_max, -λ_min).
        let p_raw = crate::spd::spectral_map(&values, &vectors, f64::exp);
        let identity = SpdMatrix::identity(d);
        let p = SpdMatrix::new(p_raw)?;
        let pair = EigenPair {
            lambda_min: values[0].exp(),
            lambda_max: values[d - 1].exp(),
        };
        let r0 = distance_from_pair(&pair);
        let t_star = radius / r0;
        let (on_unit_sphere, _) = combine_from_pair(&identity, &p, t_star, &pair)?;
        // Transport to the center by congruence with C^{1/2}.
        let (cv, cvec) = sym_eig(center.matrix())?;
        let c_half = crate::spd::spectral_map(&cv, &cvec, f64::sqrt);
        let transported: DMatrix<f64> = &c_half * on_unit_sphere.matrix() * &c_half;
        let (point, _) = SpdMatrix::from_symmetric_parts(d, transported)?;
        return Ok(SphereSample { center: center.clone(), radius, point });
    }
    Err(Error::DegenerateDirection { attempts: MAX_DIRECTION_ATTEMPTS })
}

fn random_symmetric_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let v: f64 = StandardNormal.sample(rng);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    s
}

/// Matrix exponential of a symmetric Gaussian direction — the crate's
/// canonical well-conditioned random SPD law. `scale` multiplies the
/// direction before exponentiation; eigenvalue magnitudes stay around
/// `scale·2√d`.
pub fn random_spd_log_gaussian<R: Rng + ?Sized>(
    dim: usize,
    scale: f64,
    rng: &mut R,
) -> Result<SpdMatrix> {
    let s = random_symmetric_direction(dim, rng) * scale;
    SpdMatrix::new(matrix_exp_sym(&s)?)
}
