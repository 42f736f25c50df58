//! The inductive midrange (IMR) iteration and its companions: the scalar
//! validation recursion, the minimax cost, a d = 2 grid-search oracle for
//! the optimization midrange, and active/external data classification.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spd::{SpdMatrix, check_dims};
use crate::thompson::distance_from_pair;

/// Early-stop threshold on the step distance.
const EARLY_STOP_STEP: f64 = 1e-12;
/// Consecutive tiny steps required before an early stop triggers.
const EARLY_STOP_RUN: usize = 100;
/// Absolute slack added per step to the pruning bounds so floating-point
/// error can never hide the true farthest point.
const PRUNE_SLACK: f64 = 1e-10;

/// Initialization of the IMR iteration.
#[derive(Debug, Clone)]
pub enum ImrInit {
    /// Start from a data point.
    DataIndex(usize),
    /// Start from an explicit matrix.
    Matrix(SpdMatrix),
}

/// Tie-breaking rule for equidistant farthest points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Deterministic: the lowest data index wins.
    #[default]
    LowestIndex,
}

/// Configuration of an IMR run.
#[derive(Debug, Clone)]
pub struct ImrConfig {
    pub num_iters: usize,
    pub init: ImrInit,
    pub tie_break: TieBreak,
    pub record_trace: bool,
    /// Optional early stop once the step distance stays below 1e-12 for 100
    /// consecutive steps. The 1/k weights shrink steps regardless, so this
    /// is off by default.
    pub early_stop: bool,
}

impl Default for ImrConfig {
    fn default() -> Self {
        Self {
            num_iters: 10_000,
            init: ImrInit::DataIndex(0),
            tie_break: TieBreak::LowestIndex,
            record_trace: false,
            early_stop: false,
        }
    }
}

impl ImrConfig {
    pub fn with_num_iters(mut self, num_iters: usize) -> Self {
        self.num_iters = num_iters;
        self
    }

    pub fn with_init(mut self, init: ImrInit) -> Self {
        self.init = init;
        self
    }

    pub fn with_trace(mut self, record: bool) -> Self {
        self.record_trace = record;
        self
    }

    pub fn with_early_stop(mut self, early_stop: bool) -> Self {
        self.early_stop = early_stop;
        self
    }
}

/// Trace of an IMR run: the iterates X_k, the targeted data index at each
/// step, and the step distances d∞(X_k, X_{k+1}).
#[derive(Debug, Clone)]
pub struct ImrTrace {
    iterates: Vec<SpdMatrix>,
    targets: Vec<usize>,
    step_distances: Vec<f64>,
}

impl ImrTrace {
    pub fn iterates(&self) -> &[SpdMatrix] {
        &self.iterates
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn step_distances(&self) -> &[f64] {
        &self.step_distances
    }

    pub fn final_iterate(&self) -> &SpdMatrix {
        self.iterates.last().expect("trace always holds the initial iterate")
    }
}

/// Scalar inductive midrange: `x_{k+1} = (1-w)·x_k + w·y↑` with `w = 1/(k+1)`
/// and `y↑` the farthest value (ties to the lowest index). Performs
/// `num_iters` steps and returns the final iterate, which converges to
/// `(min + max)/2` at rate O(1/k).
pub fn scalar_inductive_midrange(values: &[f64], init: f64, num_iters: usize) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut x = init;
    for k in 1..=num_iters {
        let mut far_idx = 0;
        let mut far_dist = f64::NEG_INFINITY;
        for (i, &y) in values.iter().enumerate() {
            let d = (x - y).abs();
            if d > far_dist {
                far_dist = d;
                far_idx = i;
            }
        }
        if far_dist == 0.0 {
            // Already at the farthest value; the step is a no-op and skipping
            // it keeps fixed points exact.
            continue;
        }
        let w = 1.0 / (k as f64 + 1.0);
        x = (1.0 - w) * x + w * values[far_idx];
    }
    Ok(x)
}

fn validate_data(data: &[SpdMatrix]) -> Result<usize> {
    let first = data.first().ok_or(Error::EmptyDataset)?;
    let dim = first.dim();
    for m in data {
        if m.dim() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: m.dim() });
        }
    }
    Ok(dim)
}

fn resolve_init(data: &[SpdMatrix], init: &ImrInit) -> Result<SpdMatrix> {
    match init {
        ImrInit::DataIndex(i) => data
            .get(*i)
            .cloned()
            .ok_or(Error::InvalidInitIndex { index: *i, len: data.len() }),
        ImrInit::Matrix(m) => {
            check_dims(m, &data[0])?;
            Ok(m.clone())
        }
    }
}

/// Core IMR loop. Calls the observer after every step with
/// `(k, X_{k+1}, target index, step distance)` and returns the final
/// iterate.
///
/// The farthest-point search keeps triangle-inequality bounds on every
/// distance: after a step of length `s`, each previous distance can move by
/// at most `s`, so points whose upper bound falls below the best lower bound
/// cannot be the farthest and are skipped. Candidates are resolved exactly,
/// so the selected target (including ties, broken by lowest index) matches a
/// full scan.
pub(crate) fn run_imr<F>(
    data: &[SpdMatrix],
    init: SpdMatrix,
    num_iters: usize,
    early_stop: bool,
    mut observer: F,
) -> Result<SpdMatrix>
where
    F: FnMut(usize, &SpdMatrix, usize, f64),
{
    let n = data.len();
    let mut x = init;
    let mut chol = x.cholesky()?;
    let mut lower = vec![f64::NEG_INFINITY; n];
    let mut upper = vec![f64::INFINITY; n];
    let mut tiny_steps = 0usize;

    for k in 1..=num_iters {
        let best_lower = lower.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut far_idx = usize::MAX;
        let mut far_dist = f64::NEG_INFINITY;
        let mut far_pair = None;
        for i in 0..n {
            if upper[i] + PRUNE_SLACK < best_lower.max(far_dist) {
                continue;
            }
            let pair = chol.extremal_pencil(data[i].matrix());
            let d = distance_from_pair(&pair);
            lower[i] = d;
            upper[i] = d;
            if d > far_dist {
                far_dist = d;
                far_idx = i;
                far_pair = Some(pair);
            }
        }
        debug_assert!(far_idx != usize::MAX);
        let pair = far_pair.expect("at least one candidate is always evaluated");

        let w = 1.0 / (k as f64 + 1.0);
        let (next, next_chol) = crate::thompson::combine_from_pair(&x, &data[far_idx], w, &pair)?;
        // The Nussbaum geodesic is parameterized proportionally to Thompson
        // distance, so the step length is w·d∞(X_k, Y↑) exactly.
        let step = w * far_dist;
        for i in 0..n {
            lower[i] -= step + PRUNE_SLACK;
            upper[i] += step + PRUNE_SLACK;
        }

        x = next;
        chol = next_chol;
        observer(k, &x, far_idx, step);

        if early_stop {
            if step < EARLY_STOP_STEP {
                tiny_steps += 1;
                if tiny_steps >= EARLY_STOP_RUN {
                    break;
                }
            } else {
                tiny_steps = 0;
            }
        }
    }
    Ok(x)
}

/// Inductive midrange of a dataset of SPD matrices.
///
/// Starting from the configured initialization, each step targets the
/// farthest data point in Thompson distance (ties broken to the lowest
/// index) and moves toward it along the Nussbaum geodesic with weight
/// `1/(k+1)`. Returns the final iterate and, when requested, the full trace.
pub fn inductive_midrange(
    data: &[SpdMatrix],
    cfg: &ImrConfig,
) -> Result<(SpdMatrix, Option<ImrTrace>)> {
    validate_data(data)?;
    let init = resolve_init(data, &cfg.init)?;
    let TieBreak::LowestIndex = cfg.tie_break;
    if cfg.record_trace {
        let mut trace = ImrTrace {
            iterates: Vec::with_capacity(cfg.num_iters + 1),
            targets: Vec::with_capacity(cfg.num_iters),
            step_distances: Vec::with_capacity(cfg.num_iters),
        };
        trace.iterates.push(init.clone());
        let result = run_imr(data, init, cfg.num_iters, cfg.early_stop, |_, x, target, step| {
            trace.iterates.push(x.clone());
            trace.targets.push(target);
            trace.step_distances.push(step);
        })?;
        Ok((result, Some(trace)))
    } else {
        let result = run_imr(data, init, cfg.num_iters, cfg.early_stop, |_, _, _, _| {})?;
        Ok((result, None))
    }
}

/// Minimax cost `max_i d∞(X, Y_i)` — the objective the optimization
/// midrange minimizes.
pub fn imr_cost(x: &SpdMatrix, data: &[SpdMatrix]) -> Result<f64> {
    validate_data(data)?;
    check_dims(x, &data[0])?;
    let chol = x.cholesky()?;
    let mut cost = 0.0f64;
    for y in data {
        cost = cost.max(distance_from_pair(&chol.extremal_pencil(y.matrix())));
    }
    Ok(cost)
}

/// Number of grid points per axis in the d = 2 oracle.
const ORACLE_GRID: usize = 50;
/// Pattern-search termination step.
const ORACLE_MIN_STEP: f64 = 1e-5;
/// Number of best grid points refined by pattern search.
const ORACLE_REFINE_STARTS: usize = 5;

/// Grid-search oracle for the optimization midrange of 2×2 data:
/// minimizes `imr_cost` over `(a, b, c)` parameters of `[[a,b],[b,c]]` on a
/// coarse grid bounded by the data's parameter envelope, then refines the
/// best grid points by coordinate pattern search with shrinking steps.
pub fn optimization_midrange_2d(data: &[SpdMatrix]) -> Result<SpdMatrix> {
    let dim = validate_data(data)?;
    if dim != 2 {
        return Err(Error::WrongDimension { expected: 2, actual: dim });
    }
    let cost_of = |a: f64, b: f64, c: f64| -> f64 {
        if !(a > 0.0) || !(c > 0.0) || b * b >= a * c {
            return f64::INFINITY;
        }
        match SpdMatrix::new(nalgebra::DMatrix::from_row_slice(2, 2, &[a, b, b, c])) {
            Ok(x) => match imr_cost(&x, data) {
                Ok(v) => v,
                Err(_) => f64::INFINITY,
            },
            Err(_) => f64::INFINITY,
        }
    };

    let a_lo = data.iter().map(|m| m.matrix()[(0, 0)]).fold(f64::INFINITY, f64::min);
    let a_hi = data.iter().map(|m| m.matrix()[(0, 0)]).fold(f64::NEG_INFINITY, f64::max);
    let c_lo = data.iter().map(|m| m.matrix()[(1, 1)]).fold(f64::INFINITY, f64::min);
    let c_hi = data.iter().map(|m| m.matrix()[(1, 1)]).fold(f64::NEG_INFINITY, f64::max);

    let axis = |lo: f64, hi: f64, i: usize| {
        if hi > lo {
            lo + (hi - lo) * i as f64 / (ORACLE_GRID - 1) as f64
        } else {
            lo
        }
    };

    // Coarse grid, keeping the best few points as refinement starts.
    let mut best: Vec<(f64, [f64; 3])> = Vec::new();
    for ia in 0..ORACLE_GRID {
        let a = axis(a_lo, a_hi, ia);
        for ic in 0..ORACLE_GRID {
            let c = axis(c_lo, c_hi, ic);
            let b_max = (a * c).sqrt();
            for ib in 0..ORACLE_GRID {
                let b = -b_max + 2.0 * b_max * ib as f64 / (ORACLE_GRID - 1) as f64;
                let cost = cost_of(a, b, c);
                if cost.is_finite() {
                    if best.len() < ORACLE_REFINE_STARTS {
                        best.push((cost, [a, b, c]));
                        best.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite costs"));
                    } else if cost < best[ORACLE_REFINE_STARTS - 1].0 {
                        best[ORACLE_REFINE_STARTS - 1] = (cost, [a, b, c]);
                        best.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite costs"));
                    }
                }
            }
        }
        if a_hi <= a_lo {
            break;
        }
    }
    if best.is_empty() {
        return Err(Error::NotPositiveDefinite);
    }

    let grid_step = ((a_hi - a_lo).max(c_hi - c_lo) / (ORACLE_GRID - 1) as f64).max(1e-3);
    // Direction set for the pattern search: the minimax objective has kinks
    // where the active constraint set changes, and axis-aligned moves alone
    // stall on them; the full sign-combination stencil spans every octant.
    let mut directions: Vec<[f64; 3]> = Vec::new();
    for sa in -1i32..=1 {
        for sb in -1i32..=1 {
            for sc in -1i32..=1 {
                if sa == 0 && sb == 0 && sc == 0 {
                    continue;
                }
                let v = [sa as f64, sb as f64, sc as f64];
                let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                directions.push([v[0] / norm, v[1] / norm, v[2] / norm]);
            }
        }
    }
    let mut overall = best[0];
    for &(start_cost, start) in &best {
        let mut point = start;
        let mut cost = start_cost;
        let mut step = grid_step;
        while step >= ORACLE_MIN_STEP {
            let mut improved = false;
            for dir in &directions {
                let candidate = [
                    point[0] + dir[0] * step,
                    point[1] + dir[1] * step,
                    point[2] + dir[2] * step,
                ];
                let c = cost_of(candidate[0], candidate[1], candidate[2]);
                if c < cost {
                    cost = c;
                    point = candidate;
                    improved = true;
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        if cost < overall.0 {
            overall = (cost, point);
        }
    }
    let [a, b, c] = overall.1;
    SpdMatrix::new(nalgebra::DMatrix::from_row_slice(2, 2, &[a, b, b, c]))
}

/// Classification of a dataset into active, external, and internal points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveDataReport {
    /// Indices targeted after the burn-in cutoff in some run: the points the
    /// convergence point depends on.
    pub active: BTreeSet<usize>,
    /// Indices ever targeted by any run.
    pub external: BTreeSet<usize>,
    /// Complement of the external set.
    pub internal: BTreeSet<usize>,
}

/// Runs IMR once from every data point as initialization and classifies the
/// dataset: `external` is every index ever targeted, `active` is every index
/// targeted after `floor(burn_in_fraction · num_iters)` steps, and
/// `internal` is the complement of `external`.
pub fn detect_active_data(
    data: &[SpdMatrix],
    num_iters: usize,
    burn_in_fraction: f64,
) -> Result<ActiveDataReport> {
    validate_data(data)?;
    assert!(
        burn_in_fraction > 0.0 && burn_in_fraction < 1.0,
        "burn_in_fraction must lie in (0, 1)"
    );
    let cutoff = (burn_in_fraction * num_iters as f64).floor() as usize;
    let n = data.len();
    let per_run: Vec<(BTreeSet<usize>, BTreeSet<usize>)> = (0..n)
        .into_par_iter()
        .map(|start| {
            let mut external = BTreeSet::new();
            let mut active = BTreeSet::new();
            run_imr(data, data[start].clone(), num_iters, false, |k, _, target, _| {
                external.insert(target);
                if k > cutoff {
                    active.insert(target);
                }
            })
            .map(|_| (external, active))
        })
        .collect::<Result<_>>()?;

    let mut external = BTreeSet::new();
    let mut active = BTreeSet::new();
    for (e, a) in per_run {
        external.extend(e);
        active.extend(a);
    }
    let internal: BTreeSet<usize> = (0..n).filter(|i| !external.contains(i)).collect();
    Ok(ActiveDataReport { active, external, internal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{max_abs_diff, paper_dataset, random_spd_exp};
    use crate::thompson::{thompson_distance, thompson_geodesic, GeodesicWeight};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn scalar_midrange_of_three_values() {
        let x = scalar_inductive_midrange(&[1.0, 2.0, 5.0], 2.0, 100_000).unwrap();
        assert!((x - 3.0).abs() <= 1e-4);
    }

    #[test]
    fn scalar_midrange_singleton_is_exact() {
        let x = scalar_inductive_midrange(&[7.0], 7.0, 1000).unwrap();
        assert_eq!(x, 7.0);
    }

    #[test]
    fn scalar_midrange_rejects_empty() {
        assert!(matches!(
            scalar_inductive_midrange(&[], 0.0, 10),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn scalar_midrange_error_bound_along_trace() {
        // Once iterates straddle the midrange, |x_{m+2k} - x*| <= (m/2k)|x_m - x*|.
        let values = [0.3, 1.9, 4.1, 0.05];
        let x_star = (0.05 + 4.1) / 2.0;
        let mut xs = vec![1.0f64];
        let mut x = 1.0f64;
        for k in 1..=4000usize {
            let far = values
                .iter()
                .cloned()
                .max_by(|a, b| {
                    ((x - a).abs())
                        .partial_cmp(&(x - b).abs())
                        .expect("finite")
                })
                .unwrap();
            let w = 1.0 / (k as f64 + 1.0);
            x = (1.0 - w) * x + w * far;
            xs.push(x);
        }
        let m = xs
            .windows(2)
            .position(|w| (w[0] - x_star).signum() != (w[1] - x_star).signum())
            .expect("iterates straddle the midrange")
            + 1;
        let base_err = (xs[m - 1] - x_star).abs();
        for k in 1..=((xs.len() - m) / 2) {
            let err = (xs[m - 1 + 2 * k] - x_star).abs();
            let bound = (m as f64 / (2.0 * k as f64)) * base_err;
            assert!(
                err <= bound + 1e-12,
                "error bound violated at k={k}: {err:.3e} > {bound:.3e}"
            );
        }
    }

    #[test]
    fn imr_single_point_dataset_stays_put() {
        let a = SpdMatrix::from_diagonal(&[2.0, 0.5]).unwrap();
        let data = vec![a.clone()];
        let cfg = ImrConfig::default().with_num_iters(50).with_trace(true);
        let (result, trace) = inductive_midrange(&data, &cfg).unwrap();
        assert!(max_abs_diff(result.matrix(), a.matrix()) <= 1e-14);
        let trace = trace.unwrap();
        for it in trace.iterates() {
            assert!(max_abs_diff(it.matrix(), a.matrix()) <= 1e-14);
        }
        assert!(trace.step_distances().iter().all(|&s| s <= 1e-14));
    }

    #[test]
    fn imr_matches_paper_worked_example() {
        let data = paper_dataset();
        let cfg = ImrConfig::default();
        let (m_imr, _) = inductive_midrange(&data, &cfg).unwrap();
        let expected = [[1.14, -0.25], [-0.25, 1.25]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (m_imr.matrix()[(i, j)] - expected[i][j]).abs() <= 0.01,
                    "entry ({i},{j}) = {} vs {}",
                    m_imr.matrix()[(i, j)],
                    expected[i][j]
                );
            }
        }
        let cost = imr_cost(&m_imr, &data).unwrap();
        assert!((cost - 0.811).abs() <= 0.005, "IMR cost {cost}");
    }

    #[test]
    fn imr_two_point_limit_is_thompson_midpoint() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let a = random_spd_exp(3, 1.0, &mut rng);
        let b = random_spd_exp(3, 1.0, &mut rng);
        let data = vec![a.clone(), b.clone()];
        let (result, _) = inductive_midrange(&data, &ImrConfig::default()).unwrap();
        let midpoint = thompson_geodesic(&a, &b, GeodesicWeight::MIDPOINT).unwrap();
        let err = thompson_distance(&result, &midpoint).unwrap();
        assert!(err <= 2e-3, "midpoint error {err:.3e}");
    }

    #[test]
    fn imr_trace_shapes_are_consistent() {
        let data = paper_dataset();
        let cfg = ImrConfig::default().with_num_iters(100).with_trace(true);
        let (_, trace) = inductive_midrange(&data, &cfg).unwrap();
        let trace = trace.unwrap();
        assert_eq!(trace.iterates().len(), 101);
        assert_eq!(trace.targets().len(), 100);
        assert_eq!(trace.step_distances().len(), 100);
        assert!(trace.targets().iter().all(|&t| t < data.len()));
    }

    #[test]
    fn imr_is_deterministic() {
        let data = paper_dataset();
        let cfg = ImrConfig::default().with_num_iters(500).with_trace(true);
        let (r1, t1) = inductive_midrange(&data, &cfg).unwrap();
        let (r2, t2) = inductive_midrange(&data, &cfg).unwrap();
        assert_eq!(r1, r2);
        let (t1, t2) = (t1.unwrap(), t2.unwrap());
        assert_eq!(t1.targets(), t2.targets());
        assert_eq!(t1.step_distances(), t2.step_distances());
        assert_eq!(t1.iterates(), t2.iterates());
    }

    #[test]
    fn imr_pruned_search_selects_a_true_farthest_point() {
        // Soundness of the bounds-based search: at every recorded step the
        // chosen target must be farthest up to floating-point noise (exact
        // ties between near-equidistant points may resolve either way).
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        let data: Vec<SpdMatrix> = (0..8).map(|_| random_spd_exp(3, 1.0, &mut rng)).collect();
        let cfg = ImrConfig::default().with_num_iters(400).with_trace(true);
        let (_, trace) = inductive_midrange(&data, &cfg).unwrap();
        let trace = trace.unwrap();
        for (step, &target) in trace.targets().iter().enumerate() {
            let x = &trace.iterates()[step];
            let chol = x.cholesky().unwrap();
            let mut max_d = f64::NEG_INFINITY;
            for y in &data {
                max_d = max_d.max(distance_from_pair(&chol.extremal_pencil(y.matrix())));
            }
            let chosen = distance_from_pair(&chol.extremal_pencil(data[target].matrix()));
            assert!(
                chosen >= max_d - 1e-9 * max_d.max(1.0),
                "step {step}: chose {chosen:.12}, true max {max_d:.12}"
            );
        }
    }

    #[test]
    fn imr_rejects_empty_and_mismatched() {
        assert!(matches!(
            inductive_midrange(&[], &ImrConfig::default()),
            Err(Error::EmptyDataset)
        ));
        let data = vec![SpdMatrix::identity(2), SpdMatrix::identity(3)];
        assert!(matches!(
            inductive_midrange(&data, &ImrConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn imr_cost_on_paper_optimum() {
        let data = paper_dataset();
        let m_opt = SpdMatrix::new(nalgebra::DMatrix::from_row_slice(
            2,
            2,
            &[1.32, -0.53, -0.53, 1.62],
        ))
        .unwrap();
        let cost = imr_cost(&m_opt, &data).unwrap();
        assert!((cost - 0.790).abs() <= 0.005, "cost at printed optimum {cost}");
    }

    #[test]
    fn imr_cost_singleton_zero() {
        let a = SpdMatrix::identity(2);
        assert_eq!(imr_cost(&a, &[a.clone()]).unwrap(), 0.0);
    }

    #[test]
    fn oracle_matches_paper_optimum() {
        let data = paper_dataset();
        let m = optimization_midrange_2d(&data).unwrap();
        let expected = [[1.32, -0.53], [-0.53, 1.62]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (m.matrix()[(i, j)] - expected[i][j]).abs() <= 0.02,
                    "oracle entry ({i},{j}) = {}",
                    m.matrix()[(i, j)]
                );
            }
        }
        let cost = imr_cost(&m, &data).unwrap();
        assert!((cost - 0.790).abs() <= 0.005, "oracle cost {cost}");
    }

    #[test]
    fn oracle_singleton_recovers_the_point() {
        let a = SpdMatrix::new(nalgebra::DMatrix::from_row_slice(2, 2, &[1.8, 0.3, 0.3, 0.9]))
            .unwrap();
        let m = optimization_midrange_2d(&[a.clone()]).unwrap();
        assert!(imr_cost(&m, &[a]).unwrap() <= 1e-3);
    }

    #[test]
    fn oracle_scalar_dilation_cost_is_half_distance() {
        // y1·I and y2·I: the optimum is sqrt(y1·y2)·I with cost half the
        // Thompson distance |log(y2/y1)|/2.
        let y1 = 0.8;
        let y2 = 3.1;
        let a = SpdMatrix::from_diagonal(&[y1, y1]).unwrap();
        let b = SpdMatrix::from_diagonal(&[y2, y2]).unwrap();
        let expected_cost = 0.5 * (y2 / y1 as f64).ln().abs();
        let m = optimization_midrange_2d(&[a.clone(), b.clone()]).unwrap();
        let cost = imr_cost(&m, &[a, b]).unwrap();
        assert!((cost - expected_cost).abs() <= 1e-3, "cost {cost} vs {expected_cost}");
    }

    #[test]
    fn oracle_cost_lower_bounds_imr_cost() {
        let mut rng = ChaCha12Rng::seed_from_u64(44);
        for _ in 0..5 {
            let data: Vec<SpdMatrix> = (0..4).map(|_| random_spd_exp(2, 1.0, &mut rng)).collect();
            let (m_imr, _) =
                inductive_midrange(&data, &ImrConfig::default().with_num_iters(2000)).unwrap();
            let m_opt = optimization_midrange_2d(&data).unwrap();
            let c_imr = imr_cost(&m_imr, &data).unwrap();
            let c_opt = imr_cost(&m_opt, &data).unwrap();
            assert!(
                c_imr >= c_opt - 1e-3,
                "oracle cost {c_opt} above IMR cost {c_imr}"
            );
        }
    }

    #[test]
    fn active_data_two_points_both_active() {
        let a = SpdMatrix::from_diagonal(&[1.0, 1.0]).unwrap();
        let b = SpdMatrix::from_diagonal(&[4.0, 4.0]).unwrap();
        let report = detect_active_data(&[a, b], 2000, 0.5).unwrap();
        assert_eq!(report.active, BTreeSet::from([0, 1]));
        assert_eq!(report.external, BTreeSet::from([0, 1]));
        assert!(report.internal.is_empty());
    }

    #[test]
    fn active_data_outlier_is_active() {
        let mut rng = ChaCha12Rng::seed_from_u64(55);
        // Tight cluster near the identity plus one extreme outlier.
        let mut data: Vec<SpdMatrix> =
            (0..6).map(|_| random_spd_exp(2, 0.03, &mut rng)).collect();
        let outlier = SpdMatrix::identity(2).scaled((10.0f64).exp());
        data.push(outlier);
        let report = detect_active_data(&data, 2000, 0.5).unwrap();
        assert!(report.active.contains(&6), "outlier missing from {:?}", report.active);
    }
}
