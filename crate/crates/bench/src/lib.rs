//! Shared fixtures for the benchmarks.

use dap_core::{assemble, build_mesh, Nonlinearity, ProblemSpec};

/// The pl11 model: piecewise-linear `f` with unit slopes, `φ ≡ 1`, `h ≡ 0`,
/// `α = 0.5` on `(−1, 1)` with a graded mesh of `n_cells` cells.
pub fn pl11(n_cells: usize) -> ProblemSpec {
    let mesh = build_mesh((-1.0, 1.0), n_cells, 2.0, 1).expect("mesh");
    let op = assemble(&mesh, 0.5).expect("operator");
    let n = op.dim();
    let nl = Nonlinearity::piecewise_linear(1.0, 1.0).expect("nonlinearity");
    ProblemSpec::new(op, nl, vec![1.0; n], vec![0.0; n]).expect("problem")
}
