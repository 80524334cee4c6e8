//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use dap_cli::commands::{self, constant_oracle_check, laplacian_eigen_error, operator_checks, region_at};
use dap_cli::config::RunConfig;
use dap_core::linalg::max_abs_diff;
use dap_core::{
    bracket_t_star, degree_table, find_all_solutions, manufactured_convergence, monotone_iterate, trace_branch,
    verify_homotopy_boundary, ContinuationOptions, EigenOptions, MonotoneOutcome, ProblemSpec, RegionSpec, Solution,
    SolveOptions, Start,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            passed: true,
            lines: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: String) {
        self.passed &= ok;
        self.lines.push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
    }
}

/// Largest compatibility defect over every accepted solution.
#[derive(Default)]
struct Defects {
    max: f64,
    count: usize,
}

impl Defects {
    fn record(&mut self, sols: &[Solution]) {
        for s in sols {
            self.max = self.max.max(s.compatibility_defect.abs());
            self.count += 1;
        }
    }
}

fn model(name: &str) -> RunConfig {
    RunConfig::from_model(name).expect("built-in model")
}

fn criterion_1(defects: &mut Defects) -> Outcome {
    let mut out = Outcome::new();
    let cfg = model("pl11");
    let grid = [-2.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5];
    let start = Instant::now();
    let report = commands::cmd_sweep(&cfg, &grid).expect("sweep");
    let elapsed = start.elapsed().as_secs_f64();
    let counts: Vec<usize> = report.sweep.iter().map(|r| r.count()).collect();
    out.require(counts == [2, 2, 2, 2, 1, 0, 0], format!("counts {counts:?}, expected [2, 2, 2, 2, 1, 0, 0]"));
    let spec = cfg.problem().expect("problem");
    for row in &report.sweep {
        defects.record(&row.solutions);
        let (ok, detail) = constant_oracle_check(&spec, row.t, &row.solutions).expect("constant forcing");
        out.require(ok, format!("constant oracle, {detail}"));
    }
    out.require(elapsed <= 10.0, format!("runtime {elapsed:.2} s (limit 10 s)"));
    let ramps = SolveOptions {
        ramp_starts: true,
        ..cfg.solver.clone()
    };
    let extra = find_all_solutions(&spec, -1.0, &ramps);
    defects.record(&extra);
    out.lines.push(format!(
        "note with ramp starts t = -1 has {} solutions (two sign-changing, since mu_1 < a)",
        extra.len()
    ));
    out
}

fn criterion_2(defects: &mut Defects) -> Outcome {
    let mut out = Outcome::new();
    for (name, bound) in [("pl11", 0.0), ("smoothabs", 1.0)] {
        let cfg = model(name);
        let spec = cfg.problem().expect("problem");
        let nb = spec.necessary_upper_bound();
        out.require((nb - bound).abs() <= 1e-12, format!("{name}: necessary bound {nb} (expected {bound})"));
        let (lo, hi) = bracket_t_star(&spec, -1.0, nb + 1.0, 1e-4, &cfg.solver).expect("bracket");
        out.require(
            hi - lo <= 1e-4 && lo <= 1e-4 && hi >= -1e-4,
            format!("{name}: bracket [{lo:.6e}, {hi:.6e}]"),
        );
        let start = find_all_solutions(&spec, cfg.branch_t_start, &cfg.solver);
        defects.record(&start);
        let branch = trace_branch(
            &spec,
            cfg.branch_t_start,
            &start[0],
            cfg.branch_step,
            cfg.branch_t_stop,
            &ContinuationOptions::default(),
        )
        .expect("branch");
        match branch.fold {
            Some(f) => out.require(
                f.t.abs() <= 1e-4 && f.t >= lo - 1e-4 && f.t <= hi + 1e-4,
                format!("{name}: fold at t = {:.3e}, inside the bracket", f.t),
            ),
            None => out.require(false, format!("{name}: no fold detected")),
        }
    }
    out
}

fn criterion_3(defects: &mut Defects) -> Outcome {
    let mut out = Outcome::new();
    let cfg = model("pl11");
    let spec = cfg.problem().expect("problem");
    let start = Instant::now();
    let opts = SolveOptions {
        ramp_starts: true,
        ..cfg.solver.clone()
    };
    let sols = find_all_solutions(&spec, -1.0, &opts);
    defects.record(&sols);
    let constant_index = |c: f64| {
        sols.iter()
            .find(|s| s.u.iter().all(|v| (v - c).abs() <= 1e-8))
            .and_then(|s| s.index)
    };
    let neg = constant_index(-1.0);
    let pos = constant_index(1.0);
    out.require(neg == Some(1), format!("index of u = -1 is {neg:?} (expected Some(1))"));
    out.require(pos == Some(-1), format!("index of u = +1 is {pos:?} (expected Some(-1))"));
    let region = RegionSpec::new(0.5, 2.0, 10.0).expect("region");
    match degree_table(&spec, &region, &sols) {
        Ok(d) => {
            let got = (d.g.degree, d.ball.degree, d.ball_minus_g.degree);
            out.require(
                got == (1, 0, -1),
                format!("degrees G {:+}, B {:+}, B\\G {:+} over {} solutions", got.0, got.1, got.2, sols.len()),
            );
        }
        Err(e) => out.require(false, format!("degree table refused: {e}")),
    }
    let mu1 = spec
        .operator()
        .smallest_nonzero_eigenvalue(&EigenOptions::default())
        .expect("eigenvalue");
    out.require(mu1 > 1.0, format!("spectral prerequisite a = 1 < mu_1 = {mu1:.6}"));
    let elapsed = start.elapsed().as_secs_f64();
    out.require(elapsed <= 5.0, format!("runtime {elapsed:.2} s (limit 5 s)"));
    out
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new();
    for name in ["pl11", "smoothabs"] {
        let cfg = model(name);
        let spec = cfg.problem().expect("problem");
        for item in operator_checks(&spec, 1000, cfg.seed).expect("operator checks") {
            out.require(item.passed, format!("{name}: {}: {}", item.name, item.detail));
        }
    }
    out
}

/// Plain Picard iteration from the constant subsolution, checking the order of
/// every iterate.
fn picard_from_subsolution(spec: &ProblemSpec, t: f64) -> (bool, Vec<f64>) {
    let mut u = vec![spec.constant_subsolution(t); spec.dim()];
    let mut ordered = true;
    for _ in 0..50_000 {
        let next = spec.apply_s(&u, t).expect("apply S");
        ordered &= next.iter().zip(&u).all(|(a, b)| a >= &(b - 1e-12));
        let step = max_abs_diff(&next, &u);
        u = next;
        if step <= 1e-13 {
            break;
        }
    }
    (ordered, u)
}

fn criterion_5(defects: &mut Defects) -> Outcome {
    let mut out = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for name in ["pl11", "smoothabs"] {
        let cfg = model(name);
        let spec = cfg.problem().expect("problem");
        let (mut ordered, mut minimal, mut converged) = (0, 0, 0);
        let draws = 50;
        for _ in 0..draws {
            let t = rng.gen_range(-3.0..-0.1);
            let (ok, limit) = picard_from_subsolution(&spec, t);
            ordered += ok as usize;
            let sols = find_all_solutions(&spec, t, &cfg.solver);
            defects.record(&sols);
            if let Ok(MonotoneOutcome::Converged(s)) = monotone_iterate(&spec, t, Start::Subsolution, &cfg.solver) {
                converged += (max_abs_diff(&s.u, &limit) <= 1e-8) as usize;
                defects.record(std::slice::from_ref(&s));
                let below = sols
                    .iter()
                    .all(|o| s.u.iter().zip(&o.u).all(|(a, b)| *a <= b + 1e-8));
                minimal += (below && !sols.is_empty()) as usize;
            }
        }
        out.require(ordered == draws, format!("{name}: nondecreasing iterates in {ordered}/{draws} draws"));
        out.require(converged == draws, format!("{name}: converged to the Picard limit in {converged}/{draws}"));
        out.require(minimal == draws, format!("{name}: limit below every found solution in {minimal}/{draws}"));
    }
    out
}

fn criterion_6(defects: &Defects) -> Outcome {
    let mut out = Outcome::new();
    out.require(
        defects.max <= 1e-8,
        format!("max |defect| = {:.3e} over {} accepted solutions", defects.max, defects.count),
    );
    out
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new();
    let n = [100, 200, 400, 800];
    for (alpha, need) in [(0.5, 1.5), (1.0, 1.5), (1.5, 1.5), (0.0, 1.9)] {
        let r = manufactured_convergence(alpha, 2.0, &n, 1.0).expect("mms");
        let rates: Vec<String> = r.rates.iter().map(|v| format!("{v:.3}")).collect();
        out.require(
            r.min_rate() >= need,
            format!("alpha = {alpha}: rates [{}] (need {need})", rates.join(", ")),
        );
    }
    let err = laplacian_eigen_error(200).expect("eigenvalue");
    out.require(err <= 1e-3, format!("mu_1 on (0, 1) vs pi^2: relative error {err:.3e}"));
    out
}

fn criterion_8() -> Outcome {
    let mut out = Outcome::new();
    let cfg = model("pl11");
    let spec = cfg.problem().expect("problem");
    let region = region_at(&cfg, &spec, -2.0).expect("region");
    let r = verify_homotopy_boundary(&spec, -2.0, &region, 11, 200, cfg.seed).expect("boundary");
    out.require(
        r.margin > 0.0,
        format!(
            "margin {:.4e} (plus face {:.4e}, minus face {:.4e}; caps {} / {:.4})",
            r.margin, r.plus_margin, r.minus_margin, region.rho_plus, region.rho_minus
        ),
    );
    out
}

fn main() -> ExitCode {
    let mut defects = Defects::default();
    let results = vec![
        ("trichotomy on pl11", criterion_1(&mut defects)),
        ("fold and bracket agree on t* = 0", criterion_2(&mut defects)),
        ("degree bookkeeping at t = -1", criterion_3(&mut defects)),
        ("operator T positivity and comparison", criterion_4()),
        ("monotone method reaches the minimal solution", criterion_5(&mut defects)),
        ("compatibility identity", criterion_6(&defects)),
        ("discretization quality", criterion_7()),
        ("homotopy boundary margin", criterion_8()),
    ];
    let mut all = true;
    for (k, (name, outcome)) in results.iter().enumerate() {
        all &= outcome.passed;
        println!("criterion {}: {}: {name}", k + 1, if outcome.passed { "PASS" } else { "FAIL" });
        for line in &outcome.lines {
            println!("    {line}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
