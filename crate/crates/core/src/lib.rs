//! Weighted finite elements and fixed-point machinery for the degenerate Neumann
//! problem
//!
//! ```text
//! −div(|x|^α ∇u) = f(u) + t·φ(x) + h(x)  in Ω,   ∂u/∂ν = 0  on ∂Ω,
//! ```
//!
//! with `α ∈ [0, 2)`. The crate discretizes the operator with P1 elements and a
//! lumped mass, realizes the fixed-point map `S_t`, and locates, continues and
//! classifies solutions as `t` varies.
//!
//! ```
//! use dap_core::{assemble, build_mesh, find_all_solutions, Nonlinearity, ProblemSpec, SolveOptions};
//!
//! let mesh = build_mesh((-1.0, 1.0), 100, 2.0, 1).unwrap();
//! let op = assemble(&mesh, 0.5).unwrap();
//! let n = op.dim();
//! let nl = Nonlinearity::piecewise_linear(1.0, 1.0).unwrap();
//! let spec = ProblemSpec::new(op, nl, vec![1.0; n], vec![0.0; n]).unwrap();
//! let sols = find_all_solutions(&spec, -1.0, &SolveOptions::default());
//! assert_eq!(sols.len(), 2);
//! ```

pub mod continuation;
pub mod domain;
pub mod error;
pub mod linalg;
pub mod mms;
pub mod operators;
pub mod problem;
pub mod solvers;

pub use continuation::{
    bracket_t_star, bracket_t_star_auto, degree_over_region, degree_table, detect_fold, fold_agrees_with_bracket,
    homotopy_rho_minus, local_index, trace_branch, verify_homotopy_boundary, BoundaryReport, Branch, BranchPoint,
    ContinuationOptions, DegreeReport, DegreeTable, Fold, Region, RegionSpec, Termination,
};
pub use domain::{build_mesh, weight_cell_integral, Mesh};
pub use error::{Error, Result};
pub use mms::{manufactured_convergence, MmsReport, MmsRow};
pub use operators::{assemble, EigenOptions, LinearSolveReport, WeightedOperator};
pub use problem::{Constants, Forcing, Method, Nonlinearity, NonlinearityKind, ProblemSpec, Solution, TraceRecord};
pub use solvers::{
    deflated_newton, find_all_solutions, monotone_iterate, newton, MonotoneOutcome, SolveOptions, Start, DEFECT_TOL,
};
