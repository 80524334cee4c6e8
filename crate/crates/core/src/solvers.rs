//! Root finding for `F(u; t) = 0`: monotone iteration from the constant
//! subsolution, damped semismooth Newton, and deflated Newton.

use crate::continuation::local_index;
use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, norm2, norm_inf, TridiagonalLu};
use crate::problem::{Method, ProblemSpec, Solution, TraceRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub tol_residual: f64,
    pub max_iters: usize,
    /// Backtracking factor of the line search.
    pub damping: f64,
    pub deflation_shift: f64,
    pub deflation_power: f64,
    pub monotone_max_iters: usize,
    /// Sup-norm beyond which the monotone iteration is declared divergent.
    pub divergence_ceiling: f64,
    pub monotone_slack: f64,
    /// Number of constant Newton starts spanning `[c_sub, -c_sub]`.
    pub multistart: usize,
    pub dedup_tol: f64,
    pub distinct_tol: f64,
    /// Newton stops once the last step is below `step_tol·(1 + ‖u‖∞)`.
    pub step_tol: f64,
    /// Add Newton starts `c + A·x̂` with `x̂` the coordinate rescaled to `[-1, 1]`,
    /// which reach sign-changing solutions that constant starts miss.
    pub ramp_starts: bool,
    pub record_trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol_residual: 1e-10,
            max_iters: 200,
            damping: 0.5,
            deflation_shift: 1.0,
            deflation_power: 2.0,
            monotone_max_iters: 20_000,
            divergence_ceiling: 1e6,
            monotone_slack: 1e-12,
            multistart: 9,
            dedup_tol: 1e-6,
            distinct_tol: 1e-4,
            step_tol: 1e-9,
            ramp_starts: false,
            record_trace: false,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_residual > 0.0) {
            return Err(Error::InvalidOptions(format!("tol_residual = {} must be positive", self.tol_residual)));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(Error::InvalidOptions(format!("damping = {} must lie in (0, 1)", self.damping)));
        }
        if !(self.deflation_shift >= 0.0 && self.deflation_power > 0.0) {
            return Err(Error::InvalidOptions("deflation needs shift >= 0 and power > 0".into()));
        }
        if self.max_iters == 0 || self.monotone_max_iters == 0 {
            return Err(Error::InvalidOptions("iteration caps must be positive".into()));
        }
        if !(self.divergence_ceiling > 0.0 && self.monotone_slack >= 0.0) {
            return Err(Error::InvalidOptions("divergence ceiling and monotone slack must be positive".into()));
        }
        Ok(())
    }
}

/// Starting point of the monotone iteration.
#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    /// The constant subsolution of the problem at this `t`.
    Subsolution,
    Constant(f64),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MonotoneOutcome {
    Converged(Solution),
    /// The iterates left the ball of radius `divergence_ceiling`; evidence of nonexistence.
    Diverged { iterations: usize, sup_norm: f64 },
    /// Iteration cap reached while still increasing.
    Exhausted { last: Vec<f64>, iterations: usize, residual: f64 },
}

impl MonotoneOutcome {
    pub fn solution(&self) -> Option<&Solution> {
        match self {
            MonotoneOutcome::Converged(s) => Some(s),
            _ => None,
        }
    }
}

/// `u_{k+1} = S_t(u_k)` from a subsolution. The sequence must be nondecreasing;
/// a drop beyond the slack means the hypotheses on `f` fail and aborts.
pub fn monotone_iterate(spec: &ProblemSpec, t: f64, start: Start, opts: &SolveOptions) -> Result<MonotoneOutcome> {
    opts.validate()?;
    let n = spec.dim();
    let mut u = match start {
        Start::Subsolution => vec![spec.constant_subsolution(t); n],
        Start::Constant(c) => vec![c; n],
        Start::Vector(v) => {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
            v
        }
    };
    let op = spec.operator();
    let c_f = spec.nonlinearity().c_f();
    let (factor, _) = op.shifted_factor(c_f)?;
    let mass = op.mass();
    let mut trace = Vec::new();

    let mut residual = spec.residual_norm(&u, t);
    if residual <= opts.tol_residual {
        return Ok(MonotoneOutcome::Converged(spec.make_solution(u, t, Method::Monotone, 0)));
    }
    for k in 1..=opts.monotone_max_iters {
        let src = spec.source(&u, t);
        let mut next: Vec<f64> = src
            .iter()
            .zip(&u)
            .zip(mass)
            .map(|((s, ui), m)| m * (s + c_f * ui))
            .collect();
        factor.solve_in_place(&mut next);

        let scale = 1f64.max(norm_inf(&u));
        let drop = u.iter().zip(&next).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
        if drop > opts.monotone_slack * scale {
            return Err(Error::NonMonotone { iteration: k, drop });
        }
        let step = max_abs_diff(&u, &next);
        u = next;
        let sup = norm_inf(&u);
        if !(sup <= opts.divergence_ceiling) {
            return Ok(MonotoneOutcome::Diverged {
                iterations: k,
                sup_norm: sup,
            });
        }
        residual = spec.residual_norm(&u, t);
        if opts.record_trace {
            trace.push(TraceRecord {
                method: Method::Monotone,
                iteration: k,
                residual,
                step,
            });
        }
        if residual <= opts.tol_residual {
            let mut sol = spec.make_solution(u, t, Method::Monotone, k);
            sol.trace = trace;
            return Ok(MonotoneOutcome::Converged(sol));
        }
        if step == 0.0 {
            // stationary in floating point but not a root at this tolerance
            return Ok(MonotoneOutcome::Exhausted {
                last: u,
                iterations: k,
                residual,
            });
        }
    }
    Ok(MonotoneOutcome::Exhausted {
        last: u,
        iterations: opts.monotone_max_iters,
        residual,
    })
}

fn newton_direction(spec: &ProblemSpec, u: &[f64], f: &[f64], iteration: usize) -> Result<Vec<f64>> {
    let lu = TridiagonalLu::factor_symmetric(&spec.jacobian(u));
    let mut d: Vec<f64> = f.iter().map(|v| -v).collect();
    lu.solve_in_place(&mut d).map_err(|_| Error::SingularJacobian {
        iteration,
        iterate: u.to_vec(),
    })?;
    Ok(d)
}

fn axpy(u: &[f64], lambda: f64, d: &[f64]) -> Vec<f64> {
    u.iter().zip(d).map(|(a, b)| a + lambda * b).collect()
}

/// Damped semismooth Newton with backtracking on `‖F‖₂`.
pub fn newton(spec: &ProblemSpec, t: f64, u0: &[f64], opts: &SolveOptions) -> Result<Solution> {
    opts.validate()?;
    if u0.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: u0.len(),
        });
    }
    let mut u = u0.to_vec();
    let mut f = spec.residual(&u, t);
    let mut r = norm2(&f);
    let mut trace = Vec::new();
    let finish = |u: Vec<f64>, it: usize, trace: Vec<TraceRecord>| {
        let mut s = spec.make_solution(u, t, Method::Newton, it);
        s.trace = trace;
        s
    };

    for it in 1..=opts.max_iters {
        let d = newton_direction(spec, &u, &f, it)?;
        let mut lambda = 1.0;
        let (trial, f_trial, r_trial) = loop {
            let trial = axpy(&u, lambda, &d);
            let f_trial = spec.residual(&trial, t);
            let r_trial = norm2(&f_trial);
            if r_trial <= (1.0 - 1e-4 * lambda) * r {
                break (trial, f_trial, r_trial);
            }
            if r <= opts.tol_residual && r_trial <= opts.tol_residual {
                // noise level: accept without decrease
                break (trial, f_trial, r_trial);
            }
            lambda *= opts.damping;
            if lambda < 1e-10 {
                if r <= opts.tol_residual {
                    return Ok(finish(u, it - 1, trace));
                }
                return Err(Error::LineSearchStagnation { iteration: it, residual: r });
            }
        };
        let step = lambda * norm_inf(&d);
        u = trial;
        f = f_trial;
        r = r_trial;
        if opts.record_trace {
            trace.push(TraceRecord {
                method: Method::Newton,
                iteration: it,
                residual: r,
                step,
            });
        }
        if r <= opts.tol_residual && step <= opts.step_tol * (1.0 + norm_inf(&u)) {
            return Ok(finish(u, it, trace));
        }
    }
    if r <= opts.tol_residual {
        return Ok(finish(u, opts.max_iters, trace));
    }
    Err(Error::NotConverged {
        iterations: opts.max_iters,
        residual: r,
    })
}

/// Newton on `G(u) = m(u)·F(u)` with `m(u) = Π_k (shift + ‖u − u_k‖^{-p})`, the norm
/// being the `M`-weighted mean square. Known solutions become poles of `1/m`.
pub fn deflated_newton(
    spec: &ProblemSpec,
    t: f64,
    u0: &[f64],
    known: &[Solution],
    opts: &SolveOptions,
) -> Result<Solution> {
    opts.validate()?;
    if known.is_empty() {
        return Err(Error::InvalidOptions("deflation needs at least one known solution".into()));
    }
    if u0.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            got: u0.len(),
        });
    }
    let op = spec.operator();
    let measure = op.domain_measure();
    let p = opts.deflation_power;
    let shift = opts.deflation_shift;

    // returns (m, ∇m/m)
    let deflation = |u: &[f64]| -> (f64, Vec<f64>) {
        let mut m = 1.0;
        let mut grad = vec![0.0; u.len()];
        for k in known {
            let diff: Vec<f64> = u.iter().zip(&k.u).map(|(a, b)| a - b).collect();
            let d2 = op.mass_inner(&diff, &diff) / measure;
            let d = d2.sqrt();
            let mk = shift + d.powf(-p);
            m *= mk;
            let coef = -p * d.powf(-p - 2.0) / (mk * measure);
            for ((g, di), mi) in grad.iter_mut().zip(&diff).zip(op.mass()) {
                *g += coef * mi * di;
            }
        }
        (m, grad)
    };

    let mut u = u0.to_vec();
    let mut f = spec.residual(&u, t);
    let (m0, mut g) = deflation(&u);
    let mut rg = m0 * norm2(&f);
    let mut trace = Vec::new();
    for it in 1..=opts.max_iters {
        let d = newton_direction(spec, &u, &f, it)?;
        let denom = 1.0 - g.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>();
        let dir: Vec<f64> = d.iter().map(|v| v / denom).collect();
        if !dir.iter().all(|v| v.is_finite()) {
            return Err(Error::SingularJacobian {
                iteration: it,
                iterate: u,
            });
        }
        let mut lambda = 1.0;
        loop {
            let trial = axpy(&u, lambda, &dir);
            let f_trial = spec.residual(&trial, t);
            let (m_trial, g_trial) = deflation(&trial);
            let rg_trial = m_trial * norm2(&f_trial);
            let noise = norm2(&f) <= opts.tol_residual && norm2(&f_trial) <= opts.tol_residual;
            if rg_trial <= (1.0 - 1e-4 * lambda) * rg || noise {
                let step = lambda * norm_inf(&dir);
                u = trial;
                f = f_trial;
                g = g_trial;
                rg = rg_trial;
                let r = norm2(&f);
                if opts.record_trace {
                    trace.push(TraceRecord {
                        method: Method::Deflation,
                        iteration: it,
                        residual: r,
                        step,
                    });
                }
                if r <= opts.tol_residual && step <= opts.step_tol * (1.0 + norm_inf(&u)) {
                    return accept_deflated(spec, u, t, it, known, trace, opts);
                }
                break;
            }
            lambda *= opts.damping;
            if lambda < 1e-10 {
                if norm2(&f) <= opts.tol_residual {
                    return accept_deflated(spec, u, t, it, known, trace, opts);
                }
                return Err(Error::LineSearchStagnation {
                    iteration: it,
                    residual: norm2(&f),
                });
            }
        }
    }
    let r = norm2(&f);
    if r <= opts.tol_residual {
        return accept_deflated(spec, u, t, opts.max_iters, known, trace, opts);
    }
    Err(Error::NotConverged {
        iterations: opts.max_iters,
        residual: r,
    })
}

fn accept_deflated(
    spec: &ProblemSpec,
    u: Vec<f64>,
    t: f64,
    iterations: usize,
    known: &[Solution],
    trace: Vec<TraceRecord>,
    opts: &SolveOptions,
) -> Result<Solution> {
    let distance = known.iter().map(|k| max_abs_diff(&u, &k.u)).fold(f64::INFINITY, f64::min);
    if distance < opts.distinct_tol {
        return Err(Error::DeflationCollapsed { distance });
    }
    let mut s = spec.make_solution(u, t, Method::Deflation, iterations);
    s.trace = trace;
    Ok(s)
}

/// Largest accepted compatibility defect `|1ᵀM(f(u) + tφ + h)|`.
pub const DEFECT_TOL: f64 = 1e-8;

/// Monotone iteration, a grid of constant Newton starts, then deflation from every
/// solution found. Returns deduplicated solutions sorted by mean, with indices.
pub fn find_all_solutions(spec: &ProblemSpec, t: f64, opts: &SolveOptions) -> Vec<Solution> {
    let n = spec.dim();
    let mut found: Vec<Solution> = Vec::new();
    let accept = |s: Solution, found: &mut Vec<Solution>| -> bool {
        if !(s.residual_norm <= opts.tol_residual && s.compatibility_defect.abs() <= DEFECT_TOL) {
            return false;
        }
        if found.iter().any(|k| max_abs_diff(&k.u, &s.u) < opts.dedup_tol) {
            return false;
        }
        found.push(s);
        true
    };

    match monotone_iterate(spec, t, Start::Subsolution, opts) {
        Ok(MonotoneOutcome::Converged(mut s)) => {
            // polishing keeps the monotone provenance
            if let Ok(p) = newton(spec, t, &s.u, opts) {
                s.iterations += p.iterations;
                s.residual_norm = p.residual_norm;
                s.compatibility_defect = p.compatibility_defect;
                s.u = p.u;
            }
            accept(s, &mut found);
        }
        Ok(MonotoneOutcome::Exhausted { last, iterations, .. }) => {
            if let Ok(mut p) = newton(spec, t, &last, opts) {
                p.method = Method::Monotone;
                p.iterations += iterations;
                accept(p, &mut found);
            }
        }
        Ok(MonotoneOutcome::Diverged { .. }) | Err(_) => {}
    }

    let c_sub = spec.constant_subsolution(t);
    let span = c_sub.abs().max(1.0);
    let k = opts.multistart;
    for i in 0..k {
        let c = if k == 1 {
            0.0
        } else {
            -span + 2.0 * span * i as f64 / (k - 1) as f64
        };
        if let Ok(s) = newton(spec, t, &vec![c; n], opts) {
            accept(s, &mut found);
        }
    }

    if opts.ramp_starts {
        let (a, b) = spec.operator().mesh().interval();
        let xhat: Vec<f64> = spec.operator().mesh().nodes().iter().map(|x| (2.0 * x - a - b) / (b - a)).collect();
        for center in [-0.5 * span, 0.0, 0.5 * span] {
            for amp in [0.5, 1.0, 2.0, -0.5, -1.0, -2.0] {
                let u0: Vec<f64> = xhat.iter().map(|x| center + amp * span * x).collect();
                if let Ok(s) = newton(spec, t, &u0, opts) {
                    accept(s, &mut found);
                }
            }
        }
    }

    let mut next = 0;
    while next < found.len() && found.len() < 64 {
        let base = found[next].u.clone();
        let delta = 0.5 * norm_inf(&base).max(1.0);
        for sign in [1.0, -1.0] {
            let u0: Vec<f64> = base.iter().map(|v| v + sign * delta).collect();
            if let Ok(s) = deflated_newton(spec, t, &u0, &found, opts) {
                accept(s, &mut found);
            }
        }
        next += 1;
    }

    for s in found.iter_mut() {
        s.index = Some(local_index(spec, &s.u));
    }
    let op = spec.operator();
    found.sort_by(|a, b| op.mean(&a.u).total_cmp(&op.mean(&b.u)));
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_mesh;
    use crate::operators::assemble;
    use crate::problem::Nonlinearity;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn constant_spec(nl: Nonlinearity, n: usize, h: f64) -> ProblemSpec {
        spec_alpha(nl, n, h, 0.5)
    }

    fn spec_alpha(nl: Nonlinearity, n: usize, h: f64, alpha: f64) -> ProblemSpec {
        let mesh = build_mesh((-1.0, 1.0), n, 2.0, 1).unwrap();
        let op = assemble(&mesh, alpha).unwrap();
        let dim = op.dim();
        ProblemSpec::new(op, nl, vec![1.0; dim], vec![h; dim]).unwrap()
    }

    fn pl11() -> ProblemSpec {
        constant_spec(Nonlinearity::piecewise_linear(1.0, 1.0).unwrap(), 100, 0.0)
    }

    fn smooth() -> ProblemSpec {
        constant_spec(Nonlinearity::smooth_abs(), 100, 0.0)
    }

    fn is_constant(u: &[f64], c: f64, tol: f64) -> bool {
        u.iter().all(|v| (v - c).abs() <= tol)
    }

    #[test]
    fn monotone_examples() {
        let s = pl11();
        let o = SolveOptions::default();
        let out = monotone_iterate(&s, -1.0, Start::Constant(-2.0), &o).unwrap();
        assert!(is_constant(&out.solution().unwrap().u, -1.0, 1e-9));
        let out = monotone_iterate(&s, 0.0, Start::Subsolution, &o).unwrap();
        assert!(is_constant(&out.solution().unwrap().u, 0.0, 1e-9));
        let out = monotone_iterate(&s, 0.5, Start::Subsolution, &o).unwrap();
        assert!(matches!(out, MonotoneOutcome::Diverged { .. }));
    }

    #[test]
    fn monotone_rejects_supersolution_start() {
        // starting above the minimal solution, the iterates decrease
        let s = pl11();
        let r = monotone_iterate(&s, -1.0, Start::Constant(0.0), &SolveOptions::default());
        assert!(matches!(r, Err(Error::NonMonotone { .. })));
    }

    #[test]
    fn newton_examples() {
        let s = pl11();
        let o = SolveOptions::default();
        let n = s.dim();
        let a = newton(&s, -1.0, &vec![-0.9; n], &o).unwrap();
        assert!(is_constant(&a.u, -1.0, 1e-12) && a.iterations <= 3);
        let b = newton(&s, -1.0, &vec![0.9; n], &o).unwrap();
        assert!(is_constant(&b.u, 1.0, 1e-12) && b.iterations <= 3);
        let c = newton(&smooth(), 0.0, &vec![0.0; n], &o).unwrap();
        assert!(is_constant(&c.u, 0.0, 0.0));
    }

    #[test]
    fn newton_reports_nonconvergence_without_solutions() {
        let s = pl11();
        let o = SolveOptions {
            max_iters: 30,
            ..SolveOptions::default()
        };
        assert!(newton(&s, 1.0, &vec![0.3; s.dim()], &o).is_err());
    }

    #[test]
    fn deflation_examples() {
        let o = SolveOptions::default();
        let s = pl11();
        let n = s.dim();
        let known = vec![s.make_solution(vec![-1.0; n], -1.0, Method::Newton, 0)];
        let u = deflated_newton(&s, -1.0, &vec![0.1; n], &known, &o).unwrap();
        assert!(is_constant(&u.u, 1.0, 1e-9));

        let sa = smooth();
        let r3 = 3f64.sqrt();
        let known = vec![sa.make_solution(vec![-r3; n], -1.0, Method::Newton, 0)];
        let u = deflated_newton(&sa, -1.0, &vec![-r3 + 0.5 * r3; n], &known, &o).unwrap();
        assert!(is_constant(&u.u, r3, 1e-9));

        let known = vec![s.make_solution(vec![0.0; n], 0.0, Method::Newton, 0)];
        assert!(deflated_newton(&s, 0.0, &vec![0.5; n], &known, &o).is_err());
        assert!(deflated_newton(&s, 0.0, &vec![-0.5; n], &known, &o).is_err());
    }

    #[test]
    fn find_all_examples() {
        let s = pl11();
        let o = SolveOptions::default();
        let sols = find_all_solutions(&s, -1.0, &o);
        assert_eq!(sols.len(), 2);
        assert!(is_constant(&sols[0].u, -1.0, 1e-8) && is_constant(&sols[1].u, 1.0, 1e-8));
        assert_eq!(sols[0].index, Some(1));
        assert_eq!(sols[0].method, Method::Monotone);
        assert!(find_all_solutions(&s, 1.0, &o).is_empty());
        let sols = find_all_solutions(&s, 0.0, &o);
        assert_eq!(sols.len(), 1);
        assert!(is_constant(&sols[0].u, 0.0, 1e-8));
    }

    #[test]
    fn smooth_abs_double_root_at_fold() {
        let sols = find_all_solutions(&smooth(), 0.0, &SolveOptions::default());
        assert_eq!(sols.len(), 1);
        assert!(is_constant(&sols[0].u, 0.0, 1e-4));
    }

    #[test]
    fn shifted_forcing_moves_roots() {
        // f(c) + t − 0.5 = 0
        let s = constant_spec(Nonlinearity::piecewise_linear(1.0, 1.0).unwrap(), 80, -0.5);
        let sols = find_all_solutions(&s, 0.0, &SolveOptions::default());
        assert_eq!(sols.len(), 2);
        assert!(is_constant(&sols[0].u, -0.5, 1e-8) && is_constant(&sols[1].u, 0.5, 1e-8));
    }

    #[test]
    fn monotone_is_minimal_and_nondecreasing_on_random_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let o = SolveOptions::default();
        for (i, s) in [pl11(), smooth()].iter().enumerate() {
            for _ in 0..10 {
                let t = rng.gen_range(-3.0..-0.1);
                let out = monotone_iterate(s, t, Start::Subsolution, &o).unwrap();
                let m = out.solution().unwrap_or_else(|| panic!("model {i} t {t}"));
                let polished = newton(s, t, &m.u, &o).unwrap();
                assert!(max_abs_diff(&m.u, &polished.u) < 1e-8);
                for other in find_all_solutions(s, t, &o) {
                    assert!(m.u.iter().zip(&other.u).all(|(a, b)| *a <= b + 1e-8));
                }
            }
        }
    }

    #[test]
    fn nonconstant_forcing_two_solutions() {
        let mesh = build_mesh((-1.0, 1.0), 120, 2.0, 1).unwrap();
        let op = assemble(&mesh, 0.0).unwrap();
        let phi: Vec<f64> = mesh.nodes().iter().map(|x| 1.0 + 0.5 * x).collect();
        let h: Vec<f64> = mesh.nodes().iter().map(|x| 0.2 * (3.0 * x).sin()).collect();
        let s = ProblemSpec::new(op, Nonlinearity::smooth_abs(), phi, h).unwrap();
        let sols = find_all_solutions(&s, -2.0, &SolveOptions::default());
        assert_eq!(sols.len(), 2);
        assert_eq!(sols[0].index, Some(1));
        assert_eq!(sols[1].index, Some(-1));
        for sol in &sols {
            assert!(sol.compatibility_defect.abs() <= DEFECT_TOL);
        }
    }

    #[test]
    fn ramp_starts_find_mirror_pair() {
        let s = pl11();
        let o = SolveOptions {
            ramp_starts: true,
            ..SolveOptions::default()
        };
        let sols = find_all_solutions(&s, -1.0, &o);
        assert_eq!(sols.len(), 4);
        let changing: Vec<&Solution> = sols.iter().filter(|x| x.min() < 0.0 && x.max() > 0.0).collect();
        assert_eq!(changing.len(), 2);
        // the mesh is symmetric, so the pair are reflections of each other
        let mirrored: Vec<f64> = changing[1].u.iter().rev().copied().collect();
        assert!(max_abs_diff(&changing[0].u, &mirrored) < 1e-8);
        for c in &changing {
            assert_eq!(c.index, Some(-1));
            assert!(c.compatibility_defect.abs() <= DEFECT_TOL);
        }
        // positive homogeneity of f: solutions at t scale linearly in t
        let half = find_all_solutions(&s, -0.5, &o);
        for (a, b) in sols.iter().zip(&half) {
            let scaled: Vec<f64> = a.u.iter().map(|v| 0.5 * v).collect();
            assert!(max_abs_diff(&scaled, &b.u) < 1e-8);
        }
    }

    #[test]
    fn solution_set_stable_under_refinement() {
        let o = SolveOptions::default();
        for nl in [Nonlinearity::piecewise_linear(1.0, 1.0).unwrap(), Nonlinearity::smooth_abs()] {
            let coarse = find_all_solutions(&constant_spec(nl.clone(), 200, 0.0), -1.5, &o);
            let fine = find_all_solutions(&constant_spec(nl, 400, 0.0), -1.5, &o);
            assert_eq!(coarse.len(), fine.len());
            for (a, b) in coarse.iter().zip(&fine) {
                assert!((norm_inf(&a.u) - norm_inf(&b.u)).abs() < 1e-6);
                assert!((a.min() - b.min()).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn rejects_bad_options() {
        let s = pl11();
        let o = SolveOptions {
            damping: 1.0,
            ..SolveOptions::default()
        };
        assert!(newton(&s, -1.0, &vec![0.0; s.dim()], &o).is_err());
    }
}
