use floquet_qa_cli::config::ModelSpec;
use floquet_qa_cli::output::Cell;
use floquet_qa_cli::sweep::{run_sweep, Axis, Quantity, Scale, SweepSpec};
use proptest::prelude::*;

fn spec(outer: usize, inner: usize, quantities: Vec<Quantity>) -> SweepSpec {
    let model = ModelSpec::SchwingerRabi { omega0: 1.0, theta: 0.2, omega: 1.0 };
    let mut s = SweepSpec::new(
        &model,
        vec![
            Axis::linear("theta", 0.05, 0.4, outer),
            Axis { scale: Scale::Log, ..Axis::linear("omega", 0.3, 2.5, inner) },
        ],
        quantities,
    );
    s.integrator.steps_per_period = 256;
    s.profile_samples = 64;
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rows_cover_the_grid_in_row_major_order(outer in 2usize..5, inner in 2usize..6) {
        let s = spec(outer, inner, vec![Quantity::TwoDelta, Quantity::Verdicts]);
        let t = run_sweep(&s).unwrap().table;
        prop_assert_eq!(t.rows.len(), outer * inner);
        let thetas = s.axes[0].values();
        let omegas = s.axes[1].values();
        for (k, row) in t.rows.iter().enumerate() {
            prop_assert_eq!(row.len(), t.columns.len());
            prop_assert_eq!(&row[0], &Cell::Float(thetas[k / inner]));
            prop_assert_eq!(&row[1], &Cell::Float(omegas[k % inner]));
        }
    }

    #[test]
    fn verdicts_follow_ratios(outer in 2usize..4, inner in 2usize..4) {
        let s = spec(outer, inner, vec![Quantity::Ratios, Quantity::Verdicts]);
        let t = run_sweep(&s).unwrap().table;
        for k in 0..t.rows.len() {
            for (ratio, verdict) in [("traditional_ratio", "traditional"), ("frequency_ratio", "frequency"), ("floquet_ratio", "floquet")] {
                let Some(r) = t.get(k, ratio).and_then(Cell::as_f64) else { continue };
                prop_assert!(r >= 0.0);
                prop_assert_eq!(t.get(k, verdict).and_then(Cell::as_bool), Some(r <= s.delta_t));
            }
        }
    }

    #[test]
    fn log_axes_are_geometric(min in 0.01f64..1.0, span in 1.5f64..100.0, points in 3usize..40) {
        let axis = Axis { scale: Scale::Log, ..Axis::linear("omega", min, min * span, points) };
        let v = axis.values();
        prop_assert_eq!(v.len(), points);
        prop_assert!((v[0] - min).abs() <= 1e-12 * min);
        prop_assert!((v[points - 1] - min * span).abs() <= 1e-12 * min * span);
        let ratio = v[1] / v[0];
        for w in v.windows(2) {
            prop_assert!((w[1] / w[0] - ratio).abs() < 1e-9);
        }
    }

    #[test]
    fn float_cells_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(Cell::Float(x).render().parse::<f64>().unwrap(), x);
    }
}
