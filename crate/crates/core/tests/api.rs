use dap_core::{
    assemble, build_mesh, find_all_solutions, local_index, trace_branch, weight_cell_integral, ContinuationOptions,
    Nonlinearity, ProblemSpec, SolveOptions,
};
use proptest::prelude::*;

fn problem(alpha: f64, n: usize, a: f64, b: f64) -> ProblemSpec {
    let mesh = build_mesh((-1.0, 1.0), n, 2.0, 1).unwrap();
    let op = assemble(&mesh, alpha).unwrap();
    let dim = op.dim();
    ProblemSpec::new(op, Nonlinearity::piecewise_linear(a, b).unwrap(), vec![1.0; dim], vec![0.0; dim]).unwrap()
}

#[test]
fn piecewise_linear_is_a_weighted_absolute_value() {
    let nl = Nonlinearity::piecewise_linear(2.0, 0.5).unwrap();
    for u in [-3.0, -0.25, 0.0, 0.4, 7.0] {
        let expect = 2.0 * f64::max(u, 0.0) + 0.5 * f64::max(-u, 0.0);
        assert!((nl.eval(u) - expect).abs() < 1e-15, "u = {u}");
    }
}

#[test]
fn branch_from_the_minimal_solution_folds_at_zero() {
    let spec = problem(0.5, 200, 1.0, 1.0);
    let sols = find_all_solutions(&spec, -2.0, &SolveOptions::default());
    let b = trace_branch(&spec, -2.0, &sols[0], 0.1, 1.0, &ContinuationOptions::default()).unwrap();
    assert!(b.fold.unwrap().t.abs() < 1e-6);
    assert!(b.points.iter().all(|p| p.t <= 1e-6));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // With mu_1 = pi^2/4 above both slopes only the two constant levels exist.
    #[test]
    fn flat_counts_match_constant_levels(a in 0.2f64..2.0, b in 0.2f64..2.0, t in -3.0f64..-0.05) {
        let spec = problem(0.0, 60, a, b);
        let sols = find_all_solutions(&spec, t, &SolveOptions::default());
        prop_assert_eq!(sols.len(), 2);
        let levels = [t / b, -t / a];
        for (s, c) in sols.iter().zip(levels) {
            prop_assert!(s.u.iter().all(|v| (v - c).abs() < 1e-8));
            prop_assert!(s.compatibility_defect.abs() < 1e-8);
        }
        prop_assert_eq!(local_index(&spec, &sols[0].u), 1);
        prop_assert_eq!(local_index(&spec, &sols[1].u), -1);
    }

    #[test]
    fn nothing_above_the_necessary_bound(alpha in 0.0f64..1.5, t in 0.01f64..2.0) {
        let spec = problem(alpha, 40, 1.0, 1.0);
        prop_assert!(t > spec.necessary_upper_bound());
        prop_assert!(find_all_solutions(&spec, t, &SolveOptions::default()).is_empty());
    }

    #[test]
    fn shifted_solve_preserves_order(
        alpha in 0.0f64..1.9,
        n in 8usize..80,
        shift in 0.1f64..5.0,
        seed in proptest::collection::vec(0.0f64..1.0, 81),
    ) {
        let mesh = build_mesh((-1.0, 1.0), n, 2.0, 1).unwrap();
        let op = assemble(&mesh, alpha).unwrap();
        let v: Vec<f64> = seed[..op.dim()].to_vec();
        let w = op.solve_shifted(shift, &v).unwrap().solution;
        prop_assert!(w.iter().all(|x| *x >= -1e-12));
    }

    // cells may touch the degeneracy point but not straddle it
    #[test]
    fn weight_integral_is_additive(alpha in 0.0f64..1.9, lo in 0.0f64..1.0, len in 0.01f64..1.0, s in 0.05f64..0.95, left in any::<bool>()) {
        let (lo, hi) = if left { (-lo - len, -lo) } else { (lo, lo + len) };
        let mid = lo + s * (hi - lo);
        let whole = weight_cell_integral((lo, hi), alpha, 1).unwrap();
        let parts = weight_cell_integral((lo, mid), alpha, 1).unwrap() + weight_cell_integral((mid, hi), alpha, 1).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-12 * whole.max(1.0));
    }
}
