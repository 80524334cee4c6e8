//! Experiments behind each subcommand. Every command returns a [`RunReport`];
//! writing files is left to [`crate::output::write_report`].

use std::time::{Duration, Instant};

use dap_core::linalg::norm_inf;
use dap_core::{
    bracket_t_star, bracket_t_star_auto, degree_table, fold_agrees_with_bracket, homotopy_rho_minus,
    manufactured_convergence, trace_branch, verify_homotopy_boundary, Branch, ContinuationOptions, DegreeTable,
    EigenOptions, MmsReport, MonotoneOutcome, ProblemSpec, RegionSpec, Solution, SolveOptions, Start, DEFECT_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{Cap, ConfigError, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] dap_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckItem {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckItem {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub t: f64,
    pub solutions: Vec<Solution>,
    /// Outcome of the monotone iteration from the constant subsolution.
    pub monotone: &'static str,
}

impl SweepRow {
    pub fn count(&self) -> usize {
        self.solutions.len()
    }

    pub fn max_sup(&self) -> f64 {
        self.solutions.iter().map(Solution::sup_norm).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: String,
    pub config_echo: String,
    pub nodes: Vec<f64>,
    pub necessary_bound: f64,
    pub solutions: Vec<Solution>,
    pub sweep: Vec<SweepRow>,
    pub branch: Option<Branch>,
    pub t_star_fold: Option<f64>,
    pub t_star_bracket: Option<(f64, f64)>,
    pub t_lower_star: Option<f64>,
    pub degree: Option<DegreeTable>,
    pub mu1: Option<f64>,
    pub checks: Vec<CheckItem>,
    pub mms: Vec<MmsReport>,
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl RunReport {
    fn new(command: &str, cfg: &RunConfig, spec: &ProblemSpec) -> Self {
        Self {
            command: command.to_string(),
            config_echo: cfg.echo(),
            nodes: spec.operator().mesh().nodes().to_vec(),
            necessary_bound: spec.necessary_upper_bound(),
            solutions: Vec::new(),
            sweep: Vec::new(),
            branch: None,
            t_star_fold: None,
            t_star_bracket: None,
            t_lower_star: None,
            degree: None,
            mu1: None,
            checks: Vec::new(),
            mms: Vec::new(),
            notes: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn monotone_tag(spec: &ProblemSpec, t: f64, opts: &SolveOptions) -> &'static str {
    match dap_core::monotone_iterate(spec, t, Start::Subsolution, opts) {
        Ok(MonotoneOutcome::Converged(_)) => "converged",
        Ok(MonotoneOutcome::Diverged { .. }) => "diverged",
        Ok(MonotoneOutcome::Exhausted { .. }) => "exhausted",
        Err(_) => "non_monotone",
    }
}

/// Enumerates solutions at a single `t`.
pub fn cmd_solve(cfg: &RunConfig, t: f64) -> CliResult<RunReport> {
    let start = Instant::now();
    let spec = cfg.problem()?;
    let mut report = RunReport::new("solve", cfg, &spec);
    report.solutions = dap_core::find_all_solutions(&spec, t, &cfg.solver);
    if report.solutions.is_empty() && t > report.necessary_bound {
        report.notes.push(format!(
            "no solutions: t = {t} exceeds the necessary bound {}",
            report.necessary_bound
        ));
    }
    report.sweep.push(SweepRow {
        t,
        solutions: report.solutions.clone(),
        monotone: monotone_tag(&spec, t, &cfg.solver),
    });
    report.elapsed = start.elapsed();
    Ok(report)
}

fn pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if jobs > 0 {
        b = b.num_threads(jobs);
    }
    b.build().map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}

/// Largest grid value below which every count is at least two.
pub fn lower_critical_estimate(rows: &[SweepRow]) -> Option<f64> {
    rows.iter().take_while(|r| r.count() >= 2).last().map(|r| r.t)
}

/// Solution counts over a grid of `t`, parallel over grid points.
pub fn cmd_sweep(cfg: &RunConfig, grid: &[f64]) -> CliResult<RunReport> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CliError::Usage("the t grid must be nonempty and increasing".into()));
    }
    let start = Instant::now();
    let spec = cfg.problem()?;
    let mut report = RunReport::new("sweep", cfg, &spec);
    let rows: Vec<SweepRow> = pool(cfg.jobs)?.install(|| {
        grid.par_iter()
            .map(|&t| SweepRow {
                t,
                solutions: dap_core::find_all_solutions(&spec, t, &cfg.solver),
                monotone: monotone_tag(&spec, t, &cfg.solver),
            })
            .collect()
    });
    report.t_lower_star = lower_critical_estimate(&rows);
    report.solutions = rows.iter().flat_map(|r| r.solutions.iter().cloned()).collect();
    report.sweep = rows;
    report.elapsed = start.elapsed();
    Ok(report)
}

fn continuation_branch(spec: &ProblemSpec, cfg: &RunConfig, t_start: f64, step: f64, t_stop: f64) -> CliResult<Branch> {
    let sols = dap_core::find_all_solutions(spec, t_start, &cfg.solver);
    let Some(first) = sols.first() else {
        return Err(CliError::Usage(format!("no solution at t_start = {t_start} to start the branch from")));
    };
    Ok(trace_branch(spec, t_start, first, step, t_stop, &ContinuationOptions::default())?)
}

/// Traces the branch through the minimal solution at `t_start`.
pub fn cmd_branch(cfg: &RunConfig, t_start: f64, step: f64, t_stop: f64) -> CliResult<RunReport> {
    let start = Instant::now();
    let spec = cfg.problem()?;
    let mut report = RunReport::new("branch", cfg, &spec);
    let branch = continuation_branch(&spec, cfg, t_start, step, t_stop)?;
    report.t_star_fold = branch.fold.as_ref().map(|f| f.t);
    if branch.fold.is_none() {
        report.notes.push("no fold in the traced range".into());
    }
    report.branch = Some(branch);
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Bisection on solvability, cross-checked against the fold of the traced branch.
pub fn cmd_bracket(cfg: &RunConfig) -> CliResult<RunReport> {
    let start = Instant::now();
    let spec = cfg.problem()?;
    let mut report = RunReport::new("bracket", cfg, &spec);
    let tol = cfg.bracket_tol;
    let bracket = match (cfg.bracket_t_lo, cfg.bracket_t_hi) {
        (Cap::Auto, _) => bracket_t_star_auto(&spec, tol, &cfg.solver)?,
        (Cap::Value(lo), Cap::Auto) => bracket_t_star(&spec, lo, report.necessary_bound + 1.0, tol, &cfg.solver)?,
        (Cap::Value(lo), Cap::Value(hi)) => bracket_t_star(&spec, lo, hi, tol, &cfg.solver)?,
    };
    report.t_star_bracket = Some(bracket);
    match continuation_branch(&spec, cfg, cfg.branch_t_start, cfg.branch_step, cfg.branch_t_stop) {
        Ok(branch) => {
            report.t_star_fold = branch.fold.as_ref().map(|f| f.t);
            if let Some(tf) = report.t_star_fold {
                let agree = fold_agrees_with_bracket(tf, bracket, tol);
                report.checks.push(CheckItem::new(
                    "fold_vs_bracket",
                    agree,
                    format!("t_fold = {tf:.10e}, bracket = [{:.10e}, {:.10e}]", bracket.0, bracket.1),
                ));
            }
            report.branch = Some(branch);
        }
        Err(e) => report.notes.push(format!("branch not traced: {e}")),
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Region caps with `rho_minus = auto` resolved to the homotopy bound at `t`.
pub fn region_at(cfg: &RunConfig, spec: &ProblemSpec, t: f64) -> CliResult<RegionSpec> {
    let rho_minus = match cfg.rho_minus {
        Cap::Value(v) => v,
        Cap::Auto => homotopy_rho_minus(spec, t, cfg.check_s_samples)?,
    };
    let radius = cfg.radius.max(1.5 * rho_minus.max(cfg.rho_plus));
    Ok(RegionSpec::new(cfg.rho_plus, rho_minus, radius)?)
}

/// Degree bookkeeping needs an exhaustive enumeration, so ramp starts are enabled.
fn degree_solutions(spec: &ProblemSpec, cfg: &RunConfig, t: f64) -> Vec<Solution> {
    let opts = SolveOptions {
        ramp_starts: true,
        ..cfg.solver.clone()
    };
    dap_core::find_all_solutions(spec, t, &opts)
}

/// Local indices and the degree table over `G`, `B(0,R)` and `B(0,R) \ G`.
pub fn cmd_index(cfg: &RunConfig, t: f64) -> CliResult<RunReport> {
    let start = Instant::now();
    let spec = cfg.problem()?;
    let mut report = RunReport::new("index", cfg, &spec);
    report.solutions = degree_solutions(&spec, cfg, t);
    report.mu1 = Some(spec.operator().smallest_nonzero_eigenvalue(&EigenOptions::default())?);
    let region = region_at(cfg, &spec, t)?;
    report.notes.push(format!(
        "region: rho_plus = {}, rho_minus = {}, R = {}",
        region.rho_plus, region.rho_minus, region.radius
    ));
    match degree_table(&spec, &region, &report.solutions) {
        Ok(table) => report.degree = Some(table),
        Err(e) => report.notes.push(format!("degree refused: {e}")),
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Operator positivity, comparison and the constant identity on random inputs.
pub fn operator_checks(spec: &ProblemSpec, samples: usize, seed: u64) -> CliResult<Vec<CheckItem>> {
    let op = spec.operator();
    let c = spec.nonlinearity().c_f();
    let n = op.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_nonneg = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        if rng.gen_bool(0.5) {
            (0..n).map(|_| rng.gen_range(0.0..1.0)).collect()
        } else {
            // sparse spikes stress the off-diagonal couplings
            let mut v = vec![0.0; n];
            for _ in 0..3 {
                v[rng.gen_range(0..n)] = rng.gen_range(0.0..10.0);
            }
            v
        }
    };
    let mut min_pos = f64::INFINITY;
    let mut min_cmp = f64::INFINITY;
    for _ in 0..samples {
        let v = random_nonneg(&mut rng);
        let tv = op.solve_shifted(c, &v)?.solution;
        min_pos = min_pos.min(tv.iter().copied().fold(f64::INFINITY, f64::min));

        let base: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let gap = random_nonneg(&mut rng);
        let upper: Vec<f64> = base.iter().zip(&gap).map(|(a, g)| a + g).collect();
        let tb = op.solve_shifted(c, &base)?.solution;
        let tu = op.solve_shifted(c, &upper)?.solution;
        min_cmp = min_cmp.min(tu.iter().zip(&tb).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min));
    }
    let one = op.solve_shifted(c, &vec![1.0; n])?.solution;
    let const_err = one.iter().map(|v| (c * v - 1.0).abs()).fold(0.0, f64::max);
    Ok(vec![
        CheckItem::new("positivity", min_pos >= -1e-12, format!("min T v = {min_pos:.3e} over {samples} samples")),
        CheckItem::new("comparison", min_cmp >= -1e-12, format!("min (T w - T v) = {min_cmp:.3e} over {samples} pairs")),
        CheckItem::new("constant_identity", const_err <= 1e-12, format!("max |C_f T1 - 1| = {const_err:.3e}")),
    ])
}

/// Compares found solutions with the constant roots of `f(c) + tφ + h = 0`.
pub fn constant_oracle_check(spec: &ProblemSpec, t: f64, sols: &[Solution]) -> Option<(bool, String)> {
    let levels = spec.constant_solution_levels(t)?;
    let ok = levels.len() == sols.len()
        && levels
            .iter()
            .zip(sols)
            .all(|(c, s)| s.u.iter().all(|v| (v - c).abs() <= 1e-8));
    Some((ok, format!("t = {t}: oracle {levels:?}, found {}", sols.len())))
}

fn mms_threshold(alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.9
    } else {
        1.5
    }
}

/// The full invariant suite; failures are recorded, not thrown.
pub fn cmd_check(cfg: &RunConfig) -> CliResult<RunReport> {
    let start = Instant::now();
    let spec = cfg.problem()?;
    let mut report = RunReport::new("check", cfg, &spec);
    let mut checks = Vec::new();

    let cert = spec.nonlinearity().certify();
    checks.push(match cert {
        Ok(r) => CheckItem::new(
            "certification",
            true,
            format!(
                "{} samples, slacks growth {:.3e} coercive {:.3e} lower {:.3e} slope {:.3e}",
                r.samples, r.growth_slack, r.coercive_slack, r.lower_slack, r.monotone_slack
            ),
        ),
        Err(e) => CheckItem::new("certification", false, e.to_string()),
    });
    checks.extend(operator_checks(&spec, cfg.check_operator_samples, cfg.seed)?);

    let mut defect_max = 0.0f64;
    let mut oracle_ok = true;
    let mut oracle_detail = Vec::new();
    for t in cfg.sweep_grid() {
        let sols = dap_core::find_all_solutions(&spec, t, &cfg.solver);
        defect_max = sols.iter().map(|s| s.compatibility_defect.abs()).fold(defect_max, f64::max);
        if let Some((ok, d)) = constant_oracle_check(&spec, t, &sols) {
            oracle_ok &= ok;
            oracle_detail.push(d);
        }
    }
    if oracle_detail.is_empty() {
        checks.push(CheckItem::new("constant_oracle", true, "skipped: forcing is not constant".into()));
    } else {
        checks.push(CheckItem::new("constant_oracle", oracle_ok, oracle_detail.join("; ")));
    }

    let above = report.necessary_bound + 1.0;
    let none = dap_core::find_all_solutions(&spec, above, &cfg.solver);
    checks.push(CheckItem::new(
        "necessary_bound",
        none.is_empty(),
        format!("bound {:.6e}; {} solutions at t = {above}", report.necessary_bound, none.len()),
    ));

    let t_deg = cfg.check_degree_t;
    let sols = degree_solutions(&spec, cfg, t_deg);
    defect_max = sols.iter().map(|s| s.compatibility_defect.abs()).fold(defect_max, f64::max);
    let mu1 = spec.operator().smallest_nonzero_eigenvalue(&EigenOptions::default())?;
    report.mu1 = Some(mu1);
    let minimal_plus = sols.first().map(|s| s.index == Some(1)).unwrap_or(false);
    checks.push(CheckItem::new(
        "minimal_solution_index",
        minimal_plus,
        format!(
            "t = {t_deg}: indices {:?}; mu_1 = {mu1:.6e}",
            sols.iter().map(|s| s.index.unwrap_or(0)).collect::<Vec<_>>()
        ),
    ));
    let region = region_at(cfg, &spec, t_deg)?;
    match degree_table(&spec, &region, &sols) {
        Ok(table) => {
            let got = (table.g.degree, table.ball.degree, table.ball_minus_g.degree);
            checks.push(CheckItem::new(
                "degree_table",
                got == (1, 0, -1),
                format!("t = {t_deg}: G {:+}, B {:+}, B\\G {:+} over {} solutions", got.0, got.1, got.2, sols.len()),
            ));
            report.degree = Some(table);
        }
        Err(e) => checks.push(CheckItem::new("degree_table", false, e.to_string())),
    }
    report.solutions = sols;

    let boundary_region = region_at(cfg, &spec, cfg.check_t)?;
    let b = verify_homotopy_boundary(
        &spec,
        cfg.check_t,
        &boundary_region,
        cfg.check_s_samples,
        cfg.check_v_samples,
        cfg.seed,
    )?;
    checks.push(CheckItem::new(
        "homotopy_boundary",
        b.margin > 0.0,
        format!(
            "t = {}: margin {:.6e} (plus face {:.6e}, minus face {:.6e}, rho_minus {:.6e})",
            cfg.check_t, b.margin, b.plus_margin, b.minus_margin, boundary_region.rho_minus
        ),
    ));

    let mms = manufactured_convergence(cfg.alpha, 2.0, &[100, 200, 400, 800], 1.0)?;
    let threshold = mms_threshold(cfg.alpha);
    checks.push(CheckItem::new(
        "mms_rate",
        mms.min_rate() >= threshold,
        format!("alpha = {}: min rate {:.4} (need {threshold})", cfg.alpha, mms.min_rate()),
    ));
    report.mms.push(mms);

    checks.push(CheckItem::new(
        "compatibility_defect",
        defect_max <= DEFECT_TOL,
        format!("max |defect| = {defect_max:.3e}"),
    ));
    report.checks = checks;
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Relative error of `μ₁` against `π²` for the Neumann Laplacian on `(0, 1)`.
pub fn laplacian_eigen_error(n_cells: usize) -> CliResult<f64> {
    let mesh = dap_core::build_mesh((0.0, 1.0), n_cells, 1.0, 1)?;
    let op = dap_core::assemble(&mesh, 0.0)?;
    let mu1 = op.smallest_nonzero_eigenvalue(&EigenOptions::default())?;
    let exact = std::f64::consts::PI.powi(2);
    Ok((mu1 - exact).abs() / exact)
}

/// Manufactured-solution rates for each `alpha` on graded meshes.
pub fn cmd_mms(cfg: &RunConfig, alphas: &[f64], grading: f64, n_list: &[usize]) -> CliResult<RunReport> {
    let start = Instant::now();
    let spec = cfg.problem()?;
    let mut report = RunReport::new("mms", cfg, &spec);
    for &alpha in alphas {
        let r = manufactured_convergence(alpha, grading, n_list, 1.0)?;
        let threshold = mms_threshold(alpha);
        report.checks.push(CheckItem::new(
            &format!("mms_rate_alpha_{alpha}"),
            r.min_rate() >= threshold,
            format!("min rate {:.4} (need {threshold})", r.min_rate()),
        ));
        report.mms.push(r);
    }
    let err = laplacian_eigen_error(200)?;
    report.checks.push(CheckItem::new(
        "laplacian_mu1",
        err <= 1e-3,
        format!("relative error of mu_1 against pi^2 on (0, 1): {err:.3e}"),
    ));
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Largest `‖u‖∞` over all solutions of a report.
pub fn max_sup(report: &RunReport) -> f64 {
    report.solutions.iter().map(|s| norm_inf(&s.u)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(model: &str) -> RunConfig {
        let mut c = RunConfig::from_model(model).unwrap();
        c.n_cells = 100;
        c.check_operator_samples = 50;
        c.check_v_samples = 20;
        c
    }

    #[test]
    fn solve_examples() {
        let c = small("pl11");
        assert_eq!(cmd_solve(&c, -1.0).unwrap().solutions.len(), 2);
        let r = cmd_solve(&c, 0.5).unwrap();
        assert!(r.solutions.is_empty());
        assert_eq!(r.necessary_bound, 0.0);
        assert!(r.notes[0].contains("necessary bound 0"));
        assert_eq!(cmd_solve(&c, 0.0).unwrap().solutions.len(), 1);
    }

    #[test]
    fn sweep_examples() {
        let c = small("pl11");
        let r = cmd_sweep(&c, &c.sweep_grid()).unwrap();
        let counts: Vec<usize> = r.sweep.iter().map(SweepRow::count).collect();
        assert_eq!(counts, vec![2, 2, 2, 2, 1, 0, 0]);
        assert_eq!(r.t_lower_star, Some(-0.1));
        let one = cmd_sweep(&c, &[-1.0]).unwrap();
        assert_eq!(one.solutions, cmd_solve(&c, -1.0).unwrap().solutions);
        let s = small("smoothabs");
        let r = cmd_sweep(&s, &[-3.0, 0.0, 0.5]).unwrap();
        assert_eq!(r.sweep.iter().map(SweepRow::count).collect::<Vec<_>>(), vec![2, 1, 0]);
        assert!(cmd_sweep(&c, &[0.0, -1.0]).is_err());
    }

    #[test]
    fn branch_examples() {
        let c = small("pl11");
        let r = cmd_branch(&c, -2.0, 0.1, 1.0).unwrap();
        assert!(r.t_star_fold.unwrap().abs() < 1e-6);
        let r = cmd_branch(&c, -2.0, 0.1, -1.0).unwrap();
        assert!(r.t_star_fold.is_none());
        let s = small("smoothabs");
        let r = cmd_branch(&s, -3.0, 0.1, 1.0).unwrap();
        let first = &r.branch.as_ref().unwrap().points[0];
        assert!(first.u.iter().all(|v| (v + 15f64.sqrt()).abs() < 1e-8));
        assert!(r.t_star_fold.unwrap().abs() < 1e-6);
    }

    #[test]
    fn check_suite_passes_on_builtins() {
        for m in ["pl11", "smoothabs"] {
            let r = cmd_check(&small(m)).unwrap();
            for c in &r.checks {
                assert!(c.passed, "{m}: {} failed: {}", c.name, c.detail);
            }
            let d = r.degree.unwrap();
            assert_eq!((d.g.degree, d.ball.degree, d.ball_minus_g.degree), (1, 0, -1));
        }
    }

    #[test]
    fn bracket_agrees_with_fold() {
        let r = cmd_bracket(&small("pl11")).unwrap();
        let (lo, hi) = r.t_star_bracket.unwrap();
        assert!(lo <= 0.0 && 0.0 < hi);
        assert!(r.checks.iter().all(|c| c.passed));
    }

    #[test]
    fn operator_checks_detect_a_broken_sign() {
        let spec = small("pl11").problem().unwrap();
        let items = operator_checks(&spec, 20, 3).unwrap();
        assert!(items.iter().all(|c| c.passed));
    }
}
