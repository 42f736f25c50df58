//! Thompson-metric geometry on the cone of symmetric positive definite
//! matrices, inductive midrange (IMR) centroids, and midrange-based
//! clustering.
//!
//! The crate is organized around five pieces:
//!
//! * [`spd`] — the validated [`SpdMatrix`] type and dense kernels: Cholesky,
//!   symmetric eigendecomposition, generalized extremal eigenvalues by
//!   Cholesky whitening, matrix logarithm, and the affine-invariant
//!   Riemannian distance and geodesic.
//! * [`thompson`] — the Thompson metric `d∞`, the closed-form Nussbaum
//!   geodesic (the weighted geometric midrange), d∞-sphere sampling, and
//!   congruence transport.
//! * [`midrange`] — the IMR iteration with trace recording, the scalar
//!   validation recursion, the minimax cost, a d = 2 optimization-midrange
//!   oracle, and active-data detection.
//! * [`clustering`] — Thompson K-means with IMR centroids, K-means++
//!   seeding, X-means with BIC-scored binary splits, and accuracy scoring.
//! * [`experiments`] — dataset generators and the experiment suites behind
//!   the convergence, invariance, and clustering-accuracy tables.
//!
//! All operations are pure functions of immutable inputs; randomized
//! operations consume explicit seeded streams (see [`rng::stream`]), so
//! every result is reproducible from a master seed.

pub mod clustering;
pub mod dataset;
pub mod error;
pub mod experiments;
pub mod io;
pub mod midrange;
pub mod rng;
pub mod spd;
pub mod thompson;

#[doc(hidden)]
pub mod test_support;

pub use clustering::{
    bic_score, kmeans, kmeans_pp_indices, kmeans_pp_init, score_accuracy, xmeans,
    AccuracyReport, BicScore, ClusterModel, InitStrategy, KmeansConfig,
};
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use experiments::{gen_clustered_dataset, gen_random_spd, ExperimentConfig};
pub use midrange::{
    detect_active_data, imr_cost, inductive_midrange, optimization_midrange_2d,
    scalar_inductive_midrange, ActiveDataReport, ImrConfig, ImrInit, ImrTrace,
};
pub use spd::{
    cone_projection, gen_extremal_eig, matrix_log, riemannian_distance, riemannian_geodesic,
    sym_eig, EigenPair, SpdCholesky, SpdMatrix,
};
pub use thompson::{
    congruence, sphere_sample, thompson_distance, thompson_geodesic, GeodesicWeight, SphereSample,
};
