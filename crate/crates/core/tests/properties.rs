//! Property-based tests for the validated matrix type, exchange formats,
//! and scale/containment invariants.

use nalgebra::DMatrix;
use proptest::prelude::*;

use spdrange::io::{matrix_from_csv, matrix_from_json, matrix_to_csv, matrix_to_json};
use spdrange::midrange::scalar_inductive_midrange;
use spdrange::spd::{cone_projection, SpdMatrix};
use spdrange::thompson::{thompson_distance, GeodesicWeight};

/// Strategy: SPD matrices built as G·Gᵀ + I from bounded entries.
fn spd_strategy(dim: usize) -> impl Strategy<Value = SpdMatrix> {
    prop::collection::vec(-2.0f64..2.0, dim * dim).prop_map(move |entries| {
        let g = DMatrix::from_row_slice(dim, dim, &entries);
        let mut m: DMatrix<f64> = &g * g.transpose();
        for i in 0..dim {
            m[(i, i)] += 1.0;
        }
        SpdMatrix::new(m).expect("G·Gᵀ + I is SPD")
    })
}

proptest! {
    #[test]
    fn construction_is_exactly_symmetric(a in spd_strategy(3)) {
        let m = a.matrix();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert_eq!(m[(i, j)], m[(j, i)]);
            }
        }
    }

    #[test]
    fn matrix_json_round_trips(a in spd_strategy(2)) {
        let back = matrix_from_json(&matrix_to_json(&a).unwrap()).unwrap();
        prop_assert_eq!(a, back);
    }

    #[test]
    fn matrix_csv_round_trips(a in spd_strategy(3)) {
        let back = matrix_from_csv(&matrix_to_csv(&a)).unwrap();
        let err = (a.matrix() - back.matrix()).abs().max();
        // CSV goes through shortest-roundtrip float formatting.
        prop_assert!(err == 0.0, "round-trip error {err}");
    }

    #[test]
    fn geodesic_weight_accepts_exactly_unit_interval(t in -2.0f64..3.0) {
        let ok = GeodesicWeight::new(t).is_ok();
        prop_assert_eq!(ok, (0.0..=1.0).contains(&t));
    }

    #[test]
    fn scalar_midrange_stays_in_hull(
        values in prop::collection::vec(-100.0f64..100.0, 1..12),
        init in -100.0f64..100.0,
        iters in 1usize..200,
    ) {
        let x = scalar_inductive_midrange(&values, init, iters).unwrap();
        let lo = values.iter().cloned().fold(init, f64::min);
        let hi = values.iter().cloned().fold(init, f64::max);
        prop_assert!(x >= lo - 1e-9 && x <= hi + 1e-9, "{x} outside [{lo}, {hi}]");
    }

    #[test]
    fn cone_projection_lands_strictly_inside(a in spd_strategy(2)) {
        let (x, y, z) = cone_projection(&a).unwrap();
        prop_assert!(z > (x * x + y * y).sqrt());
    }

    #[test]
    fn thompson_distance_is_scale_invariant(a in spd_strategy(3), b in spd_strategy(3), s in 0.1f64..10.0) {
        let d = thompson_distance(&a, &b).unwrap();
        let sa = SpdMatrix::new(a.matrix() * s).unwrap();
        let sb = SpdMatrix::new(b.matrix() * s).unwrap();
        let ds = thompson_distance(&sa, &sb).unwrap();
        prop_assert!((d - ds).abs() <= 1e-10 * d.max(1.0));
    }
}
