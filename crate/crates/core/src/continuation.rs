//! Pseudo-arclength continuation in `(u, t)`, fold detection, bracketing of the
//! critical parameter, local fixed-point indices and degree bookkeeping.
//!
//! Indices use `sign det(I − DS_t(u)) = sign det(K − M diag f'(u))`, which holds
//! because `I − DS_t(u) = (K + C_f M)^{-1}(K − M diag f'(u))` and `K + C_f M` is
//! positive definite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{norm2, norm_inf, solve_bordered, TridiagonalLu};
use crate::problem::{Method, ProblemSpec, Solution};
use crate::solvers::{find_all_solutions, SolveOptions};

/// Indices with `min|pivot| / max|pivot|` below this are reported as degenerate.
pub const DEGENERATE_PIVOT_RATIO: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationOptions {
    pub tol_residual: f64,
    pub max_corrector_iters: usize,
    pub max_points: usize,
    /// Stall once the step falls below this fraction of the initial step.
    pub min_step_ratio: f64,
    /// Clean steps before the step is doubled.
    pub grow_after: usize,
    pub fold_t_tol: f64,
    /// Apply `detect_fold` to the finished branch.
    pub detect_fold: bool,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            tol_residual: 1e-10,
            max_corrector_iters: 25,
            max_points: 5000,
            min_step_ratio: 1e-10,
            grow_after: 4,
            fold_t_tol: 1e-8,
            detect_fold: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchPoint {
    pub t: f64,
    pub u: Vec<f64>,
    pub arclength: f64,
    pub index: i32,
    /// `dt/ds` of the unit tangent in the weighted norm.
    pub tangent_dt: f64,
    pub residual_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fold {
    pub t: f64,
    pub u: Vec<f64>,
    pub arclength: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// `t` left the window between `t_start` and `t_stop`.
    LeftWindow,
    MaxPoints,
    /// The step fell below `min_step_ratio` of the initial step.
    Stall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
    pub fold: Option<Fold>,
    pub termination: Termination,
}

/// Weighted inner product on `(u, t)`: `uᵀ M v / |Ω| + t·s`.
struct Geometry<'a> {
    spec: &'a ProblemSpec,
    measure: f64,
    dfdt: Vec<f64>,
}

#[derive(Clone)]
struct State {
    u: Vec<f64>,
    t: f64,
}

impl<'a> Geometry<'a> {
    fn new(spec: &'a ProblemSpec) -> Self {
        Self {
            spec,
            measure: spec.operator().domain_measure(),
            dfdt: spec.parameter_derivative(),
        }
    }

    fn inner(&self, a: &State, b: &State) -> f64 {
        self.spec.operator().mass_inner(&a.u, &b.u) / self.measure + a.t * b.t
    }

    fn norm(&self, a: &State) -> f64 {
        self.inner(a, a).sqrt()
    }

    fn u_norm(&self, u: &[f64]) -> f64 {
        (self.spec.operator().mass_inner(u, u) / self.measure).sqrt()
    }

    fn diff(a: &State, b: &State) -> State {
        State {
            u: a.u.iter().zip(&b.u).map(|(x, y)| x - y).collect(),
            t: a.t - b.t,
        }
    }

    fn scaled(&self, a: &State) -> State {
        let n = self.norm(a);
        State {
            u: a.u.iter().map(|v| v / n).collect(),
            t: a.t / n,
        }
    }

    fn weighted_row(&self, dir: &State) -> Vec<f64> {
        dir.u
            .iter()
            .zip(self.spec.operator().mass())
            .map(|(v, m)| v * m / self.measure)
            .collect()
    }

    /// Unit tangent at `x` with positive weighted inner product against `reference`.
    fn tangent(&self, x: &State, reference: &State) -> Result<State> {
        let j = self.spec.jacobian(&x.u);
        let row = self.weighted_row(reference);
        let zeros = vec![0.0; x.u.len()];
        let (z, zeta) = solve_bordered(&j, &self.dfdt, &row, reference.t, &zeros, 1.0)?;
        let tau = State { u: z, t: zeta };
        if !(tau.u.iter().all(|v| v.is_finite()) && zeta.is_finite()) {
            return Err(Error::Singular { row: x.u.len() });
        }
        Ok(self.scaled(&tau))
    }

    /// Newton on `{F(u;t) = 0, ⟨dir, x − anchor⟩ = ds}` from `anchor + ds·dir`.
    fn correct(&self, anchor: &State, dir: &State, ds: f64, opts: &ContinuationOptions) -> Option<State> {
        let mut x = State {
            u: anchor.u.iter().zip(&dir.u).map(|(a, d)| a + ds * d).collect(),
            t: anchor.t + ds * dir.t,
        };
        let row = self.weighted_row(dir);
        for _ in 0..opts.max_corrector_iters {
            let f = self.spec.residual(&x.u, x.t);
            let n_res = self.inner(dir, &Geometry::diff(&x, anchor)) - ds;
            let j = self.spec.jacobian(&x.u);
            let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
            let (du, dt) = solve_bordered(&j, &self.dfdt, &row, dir.t, &rhs, -n_res).ok()?;
            if !(du.iter().all(|v| v.is_finite()) && dt.is_finite()) {
                return None;
            }
            for (a, b) in x.u.iter_mut().zip(&du) {
                *a += b;
            }
            x.t += dt;
            let step = norm_inf(&du).max(dt.abs());
            let r = norm2(&self.spec.residual(&x.u, x.t));
            if r <= opts.tol_residual && step <= 1e-9 * (1.0 + norm_inf(&x.u) + x.t.abs()) {
                return Some(x);
            }
        }
        let r = norm2(&self.spec.residual(&x.u, x.t));
        (r <= opts.tol_residual).then_some(x)
    }
}

/// Traces the solution branch through `(t_start, u_start)` towards `t_stop` with
/// pseudo-arclength steps of at most `step`.
///
/// At a corner of a piecewise-linear nonlinearity the branch has no tangent and the
/// corrector fails; a predictor with reflected `t`-component is then tried and
/// accepted only if it makes progress in `u` and reverses the sign of `dt/ds`.
pub fn trace_branch(
    spec: &ProblemSpec,
    t_start: f64,
    u_start: &Solution,
    step: f64,
    t_stop: f64,
    opts: &ContinuationOptions,
) -> Result<Branch> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidOptions(format!("continuation step {step} must be positive")));
    }
    if !(t_stop != t_start && t_stop.is_finite()) {
        return Err(Error::InvalidOptions("t_stop must differ from t_start".into()));
    }
    let r0 = spec.residual_norm(&u_start.u, t_start);
    if !(r0 <= 1e-8) {
        return Err(Error::InvalidOptions(format!("start point is not a solution (residual {r0:e})")));
    }
    let geo = Geometry::new(spec);
    let (t_min, t_max) = (t_start.min(t_stop), t_start.max(t_stop));
    let dir = (t_stop - t_start).signum();

    let mut x = State {
        u: u_start.u.clone(),
        t: t_start,
    };
    let mut tau = geo.tangent(
        &x,
        &State {
            u: vec![0.0; x.u.len()],
            t: dir,
        },
    )?;
    let mut points = vec![BranchPoint {
        t: x.t,
        u: x.u.clone(),
        arclength: 0.0,
        index: local_index(spec, &x.u),
        tangent_dt: tau.t,
        residual_norm: r0,
    }];
    let mut ds = step;
    let mut clean = 0;
    let mut arclength = 0.0;
    let termination = loop {
        if points.len() >= opts.max_points {
            break Termination::MaxPoints;
        }
        let mut accepted = None;
        if let Some(next) = geo.correct(&x, &tau, ds, opts) {
            if let Ok(t_next) = geo.tangent(&next, &tau) {
                accepted = Some((next, t_next));
            }
        }
        if accepted.is_none() && geo.u_norm(&tau.u) >= 0.1 {
            let reflected = State {
                u: tau.u.clone(),
                t: -tau.t,
            };
            if let Some(next) = geo.correct(&x, &reflected, ds, opts) {
                let secant = Geometry::diff(&next, &x);
                let progress = spec.operator().mass_inner(&secant.u, &tau.u);
                if let Ok(t_next) = geo.tangent(&next, &secant) {
                    if progress > 0.0 && t_next.t * tau.t < 0.0 {
                        accepted = Some((next, t_next));
                    }
                }
            }
        }
        match accepted {
            Some((next, t_next)) => {
                arclength += geo.norm(&Geometry::diff(&next, &x));
                x = next;
                tau = t_next;
                points.push(BranchPoint {
                    t: x.t,
                    u: x.u.clone(),
                    arclength,
                    index: local_index(spec, &x.u),
                    tangent_dt: tau.t,
                    residual_norm: spec.residual_norm(&x.u, x.t),
                });
                clean += 1;
                if clean >= opts.grow_after {
                    ds = (2.0 * ds).min(step);
                    clean = 0;
                }
                if x.t < t_min || x.t > t_max {
                    break Termination::LeftWindow;
                }
            }
            None => {
                ds *= 0.5;
                clean = 0;
                if ds < opts.min_step_ratio * step {
                    break Termination::Stall;
                }
            }
        }
    };
    let mut branch = Branch {
        points,
        fold: None,
        termination,
    };
    if opts.detect_fold {
        branch.fold = detect_fold(spec, &branch, opts);
    }
    Ok(branch)
}

/// Locates the first sign change of `tangent_dt` and refines it by bisection on
/// arclength until `|Δt| ≤ fold_t_tol`. Returns the extreme-`t` end of the final
/// bracket.
pub fn detect_fold(spec: &ProblemSpec, branch: &Branch, opts: &ContinuationOptions) -> Option<Fold> {
    let pts = &branch.points;
    if pts.len() < 3 {
        return None;
    }
    let i = (0..pts.len() - 1).find(|&i| pts[i].tangent_dt * pts[i + 1].tangent_dt <= 0.0 && pts[i].tangent_dt != 0.0)?;
    if pts[i + 1].tangent_dt == 0.0 {
        let p = &pts[i + 1];
        return Some(Fold {
            t: p.t,
            u: p.u.clone(),
            arclength: p.arclength,
        });
    }
    let geo = Geometry::new(spec);
    let s_lo = pts[i].tangent_dt.signum();
    let mut lo = (State { u: pts[i].u.clone(), t: pts[i].t }, pts[i].arclength);
    let mut hi = (State { u: pts[i + 1].u.clone(), t: pts[i + 1].t }, pts[i + 1].arclength);
    for _ in 0..200 {
        if (lo.0.t - hi.0.t).abs() <= opts.fold_t_tol {
            break;
        }
        let secant = Geometry::diff(&hi.0, &lo.0);
        let len = geo.norm(&secant);
        if !(len > 0.0) {
            break;
        }
        let dir = geo.scaled(&secant);
        let Some(mid) = geo.correct(&lo.0, &dir, 0.5 * len, opts) else {
            break;
        };
        let Ok(tau) = geo.tangent(&mid, &dir) else {
            break;
        };
        let arc = lo.1 + geo.norm(&Geometry::diff(&mid, &lo.0));
        if tau.t * s_lo > 0.0 {
            lo = (mid, arc);
        } else {
            hi = (mid, arc);
        }
    }
    let best = if (hi.0.t - lo.0.t) * s_lo > 0.0 { hi } else { lo };
    Some(Fold {
        t: best.0.t,
        u: best.0.u,
        arclength: best.1,
    })
}

/// Bisection on the solvability predicate `find_all_solutions ≠ ∅`.
pub fn bracket_t_star(spec: &ProblemSpec, t_lo: f64, t_hi: f64, tol: f64, opts: &SolveOptions) -> Result<(f64, f64)> {
    if !(tol > 0.0 && t_lo < t_hi) {
        return Err(Error::Bracket(format!("need t_lo < t_hi and tol > 0, got ({t_lo}, {t_hi}), {tol}")));
    }
    let solvable = |t: f64| !find_all_solutions(spec, t, opts).is_empty();
    if !solvable(t_lo) {
        return Err(Error::Bracket(format!("no solution found at t_lo = {t_lo}")));
    }
    if solvable(t_hi) {
        return Err(Error::Bracket(format!("solution found at t_hi = {t_hi}")));
    }
    let (mut lo, mut hi) = (t_lo, t_hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if solvable(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Seeds `t_hi = necessary_upper_bound + 1` and walks `t_lo` down until solvable.
pub fn bracket_t_star_auto(spec: &ProblemSpec, tol: f64, opts: &SolveOptions) -> Result<(f64, f64)> {
    let t_hi = spec.necessary_upper_bound() + 1.0;
    let mut width = 1.0;
    for _ in 0..30 {
        let t_lo = t_hi - 1.0 - width;
        if !find_all_solutions(spec, t_lo, opts).is_empty() {
            return bracket_t_star(spec, t_lo, t_hi, tol, opts);
        }
        width *= 2.0;
    }
    Err(Error::Bracket("no solvable t found below the necessary bound".into()))
}

/// `|t_fold − midpoint| ≤ 10·tol`.
pub fn fold_agrees_with_bracket(t_fold: f64, bracket: (f64, f64), tol: f64) -> bool {
    (t_fold - 0.5 * (bracket.0 + bracket.1)).abs() <= 10.0 * tol
}

fn index_for_slopes(spec: &ProblemSpec, slopes: &[f64]) -> i32 {
    let lu = TridiagonalLu::factor_symmetric(&spec.jacobian_with_slopes(slopes));
    if lu.pivot_ratio() < DEGENERATE_PIVOT_RATIO {
        0
    } else {
        lu.det_sign()
    }
}

/// `sign det(K − M diag f'(u))`, or `0` when degenerate.
///
/// Where nodal values sit on a kink of `f` the generalized Jacobian is a family of
/// matrices; slopes at those nodes are swept from the left to the right derivative
/// and the index is `0` unless every sampled member is nondegenerate with one sign.
pub fn local_index(spec: &ProblemSpec, u: &[f64]) -> i32 {
    let nl = spec.nonlinearity();
    let kinks = nl.kinks();
    let on_kink = |v: f64| kinks.iter().any(|&k| (v - k).abs() <= 1e-8 * k.abs().max(1.0));
    let right: Vec<f64> = u.iter().map(|&v| nl.slope(v)).collect();
    let idx = index_for_slopes(spec, &right);
    if idx == 0 || !u.iter().any(|&v| on_kink(v)) {
        return idx;
    }
    for k in 0..KINK_SAMPLES - 1 {
        let theta = k as f64 / (KINK_SAMPLES - 1) as f64;
        let slopes: Vec<f64> = u
            .iter()
            .zip(&right)
            .map(|(&v, &r)| if on_kink(v) { nl.slope_left(v) + theta * (r - nl.slope_left(v)) } else { r })
            .collect();
        if index_for_slopes(spec, &slopes) != idx {
            return 0;
        }
    }
    idx
}

const KINK_SAMPLES: usize = 9;

/// Caps defining `G = {‖v⁺‖∞ < rho_plus, ‖v⁻‖∞ < rho_minus}` and the ball `‖v‖∞ < radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSpec {
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    G,
    Ball,
    BallMinusG,
    Empty,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Region::G => "G",
            Region::Ball => "B(0,R)",
            Region::BallMinusG => "B(0,R)\\G",
            Region::Empty => "empty",
        })
    }
}

pub const EXHAUSTIVENESS_CAVEAT: &str =
    "degree is the index sum over the solutions found; it equals the true degree only if no solution in the region was missed";

impl RegionSpec {
    pub fn new(rho_plus: f64, rho_minus: f64, radius: f64) -> Result<Self> {
        if !(rho_plus > 0.0 && rho_minus > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidRegion(format!(
                "caps must be positive, got rho_plus = {rho_plus}, rho_minus = {rho_minus}"
            )));
        }
        if !(radius > rho_plus.max(rho_minus)) {
            return Err(Error::InvalidRegion(format!(
                "R = {radius} must exceed max(rho_plus, rho_minus) = {}",
                rho_plus.max(rho_minus)
            )));
        }
        Ok(Self {
            rho_plus,
            rho_minus,
            radius,
        })
    }

    fn classify(&self, u: &[f64]) -> Option<(bool, bool)> {
        let plus = u.iter().fold(0.0f64, |m, &v| m.max(v));
        let minus = u.iter().fold(0.0f64, |m, &v| m.max(-v));
        let sup = plus.max(minus);
        let near = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.max(1.0);
        if near(plus, self.rho_plus) || near(minus, self.rho_minus) || near(sup, self.radius) {
            return None;
        }
        Some((plus < self.rho_plus && minus < self.rho_minus, sup < self.radius))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub position: usize,
    pub index: i32,
    pub inside: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeReport {
    pub region: Region,
    pub degree: i32,
    pub members: Vec<Membership>,
    pub caveat: &'static str,
}

/// Sum of local indices over the solutions inside `region`.
pub fn degree_over_region(
    spec: &ProblemSpec,
    region_spec: &RegionSpec,
    region: Region,
    solutions: &[Solution],
) -> Result<DegreeReport> {
    let mut members = Vec::with_capacity(solutions.len());
    let mut degree = 0;
    for (position, s) in solutions.iter().enumerate() {
        let (in_g, in_ball) = region_spec.classify(&s.u).ok_or_else(|| {
            Error::InvalidRegion(format!("solution {position} lies on the boundary of the region"))
        })?;
        let inside = match region {
            Region::G => in_g,
            Region::Ball => in_ball,
            Region::BallMinusG => in_ball && !in_g,
            Region::Empty => false,
        };
        let index = s.index.unwrap_or_else(|| local_index(spec, &s.u));
        if inside {
            if index == 0 {
                return Err(Error::DegenerateIndex { position });
            }
            degree += index;
        }
        members.push(Membership {
            position,
            index,
            inside,
        });
    }
    Ok(DegreeReport {
        region,
        degree,
        members,
        caveat: EXHAUSTIVENESS_CAVEAT,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeTable {
    pub g: DegreeReport,
    pub ball: DegreeReport,
    pub ball_minus_g: DegreeReport,
}

pub fn degree_table(spec: &ProblemSpec, region_spec: &RegionSpec, solutions: &[Solution]) -> Result<DegreeTable> {
    Ok(DegreeTable {
        g: degree_over_region(spec, region_spec, Region::G, solutions)?,
        ball: degree_over_region(spec, region_spec, Region::Ball, solutions)?,
        ball_minus_g: degree_over_region(spec, region_spec, Region::BallMinusG, solutions)?,
    })
}

/// `1 + max_s ‖w(s)‖∞`, where `w(s)` solves
/// `(K + (sC_3 + (1−s)C_f)M) w = M s(tφ + h − C_4)`; a cap on `‖v⁻‖∞` that no fixed
/// point of `sS_t` can reach.
pub fn homotopy_rho_minus(spec: &ProblemSpec, t: f64, s_samples: usize) -> Result<f64> {
    let c = spec.nonlinearity().constants();
    let base: Vec<f64> = spec.phi().iter().zip(spec.h()).map(|(p, h)| t * p + h - c.c4).collect();
    let samples = s_samples.max(2);
    let mut c0 = 0.0f64;
    for k in 0..samples {
        let s = k as f64 / (samples - 1) as f64;
        let shift = s * c.c3 + (1.0 - s) * c.c_f;
        let rhs: Vec<f64> = base.iter().map(|v| s * v).collect();
        let w = spec.operator().solve_shifted(shift, &rhs)?.solution;
        c0 = c0.max(norm_inf(&w));
    }
    Ok(c0 + 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryReport {
    /// Minimum of `‖v − sS_t(v)‖∞` over profiles with `‖v⁺‖∞ = rho_plus`.
    pub plus_margin: f64,
    /// Same over profiles with `‖v⁻‖∞ = rho_minus`.
    pub minus_margin: f64,
    pub margin: f64,
    pub worst_s: f64,
    pub s_samples: usize,
    pub v_samples: usize,
}

fn random_profile(rng: &mut ChaCha8Rng, nodes: &[f64], smooth: bool) -> Vec<f64> {
    if smooth {
        let (a, b) = (nodes[0], nodes[nodes.len() - 1]);
        let modes: Vec<(f64, f64, f64)> = (0..4)
            .map(|_| {
                (
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(0.0..6.0),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        nodes
            .iter()
            .map(|&x| {
                let y = (x - a) / (b - a);
                modes.iter().map(|(c, k, p)| c * (std::f64::consts::PI * k * y + p).cos()).sum()
            })
            .collect()
    } else {
        nodes.iter().map(|_| rng.gen_range(-1.0..1.0)).collect()
    }
}

/// Affine image of `p` onto `[lo, hi]`; `hi` and `lo` are attained.
fn rescale(p: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let min = p.iter().copied().fold(f64::INFINITY, f64::min);
    let max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    p.iter()
        .map(|&v| if span > 0.0 { lo + (v - min) / span * (hi - lo) } else { hi })
        .collect()
}

/// Sampled check that `v ≠ sS_t(v)` on both faces of `∂G`. Half of the profiles are
/// nodal noise and half are smooth; each is rescaled so the face norm is attained
/// while the other one stays within its cap.
pub fn verify_homotopy_boundary(
    spec: &ProblemSpec,
    t: f64,
    region: &RegionSpec,
    s_samples: usize,
    v_samples: usize,
    seed: u64,
) -> Result<BoundaryReport> {
    if s_samples < 2 || v_samples == 0 {
        return Err(Error::InvalidOptions("need at least 2 s-samples and 1 v-sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = spec.operator().mesh().nodes().to_vec();
    let s_grid: Vec<f64> = (0..s_samples).map(|k| k as f64 / (s_samples - 1) as f64).collect();
    let mut plus_margin = f64::INFINITY;
    let mut minus_margin = f64::INFINITY;
    let mut worst = (f64::INFINITY, 0.0);
    for i in 0..v_samples {
        let p = random_profile(&mut rng, &nodes, i % 2 == 1);
        let theta: f64 = rng.gen_range(0.0..1.0);
        let faces = [
            (true, rescale(&p, -theta * region.rho_minus, region.rho_plus)),
            (false, rescale(&p, -region.rho_minus, theta * region.rho_plus)),
        ];
        for (plus_face, v) in faces {
            let sv = spec.apply_s(&v, t)?;
            for &s in &s_grid {
                let gap = v.iter().zip(&sv).fold(0.0f64, |m, (a, b)| m.max((a - s * b).abs()));
                if plus_face {
                    plus_margin = plus_margin.min(gap);
                } else {
                    minus_margin = minus_margin.min(gap);
                }
                if gap < worst.0 {
                    worst = (gap, s);
                }
            }
        }
    }
    Ok(BoundaryReport {
        plus_margin,
        minus_margin,
        margin: plus_margin.min(minus_margin),
        worst_s: worst.1,
        s_samples,
        v_samples,
    })
}

/// Convenience: the continuation-provenance `Solution` for a branch point.
pub fn branch_point_solution(spec: &ProblemSpec, p: &BranchPoint) -> Solution {
    let mut s = spec.make_solution(p.u.clone(), p.t, Method::Continuation, 0);
    s.index = Some(p.index);
    s
}
