//! The nonlinear Neumann problem `-div(|x|^alpha grad u) = f(u) + t·phi + h`.
//!
//! [`Nonlinearity`] carries `f` together with the constants the existence theory
//! consumes:
//!
//! * `|f(u)| <= C_f (1 + |u|)`
//! * `f(u) >= C_1 |u| - C_2`
//! * `f(u) >= -C_3 u - C_4` with `0 < C_3 < C_f`
//!
//! Constants are stored, never inferred; every constructor certifies them on a
//! sampled logarithmic grid before returning.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{norm2, norm_inf, SymTridiagonal};
use crate::operators::WeightedOperator;

/// Default threshold beyond which the asymptotic sign of `f(u)/u` is checked.
pub const DEFAULT_U_CHECK: f64 = 1e3;
const CERTIFICATION_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub c_f: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum NonlinearityKind {
    /// `f(u) = a·u⁺ + b·u⁻`.
    PiecewiseLinear { a: f64, b: f64 },
    /// `f(u) = √(1 + u²) − 1`.
    SmoothAbs,
    /// Piecewise-linear interpolation of `(u, f)` pairs, extended linearly.
    Table { points: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    kind: NonlinearityKind,
    constants: Constants,
    u_check: f64,
}

/// Smallest observed slack of each certified inequality over the sampling grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificationReport {
    pub samples: usize,
    pub growth_slack: f64,
    pub coercive_slack: f64,
    pub lower_slack: f64,
    /// `min (f'(u) + C_f)`; nonnegative means `f(u) + C_f u` is nondecreasing.
    pub monotone_slack: f64,
}

impl Nonlinearity {
    pub fn piecewise_linear(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidNonlinearity(format!(
                "piecewise_linear needs a, b > 0, got a = {a}, b = {b}"
            )));
        }
        let constants = Constants {
            c_f: a.max(b),
            c1: a.min(b),
            c2: 0.0,
            c3: 0.5 * b,
            c4: 0.0,
        };
        Self::with_constants(NonlinearityKind::PiecewiseLinear { a, b }, constants, DEFAULT_U_CHECK)
    }

    pub fn smooth_abs() -> Self {
        let constants = Constants {
            c_f: 1.0,
            c1: 1.0,
            c2: 1.0,
            c3: 0.5,
            c4: 1.0,
        };
        Self::with_constants(NonlinearityKind::SmoothAbs, constants, DEFAULT_U_CHECK)
            .expect("built-in constants certify")
    }

    pub fn table(points: Vec<(f64, f64)>, constants: Constants) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidNonlinearity("table needs at least two points".into()));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidNonlinearity("table abscissae must be strictly increasing".into()));
        }
        if points.iter().any(|(u, f)| !(u.is_finite() && f.is_finite())) {
            return Err(Error::InvalidNonlinearity("table entries must be finite".into()));
        }
        Self::with_constants(NonlinearityKind::Table { points }, constants, DEFAULT_U_CHECK)
    }

    /// Validates the constants and runs the sampled certification.
    pub fn with_constants(kind: NonlinearityKind, constants: Constants, u_check: f64) -> Result<Self> {
        let Constants { c_f, c1, c2, c3, c4 } = constants;
        if !(c_f > 0.0) {
            return Err(Error::InvalidNonlinearity(format!("C_f = {c_f} must be positive")));
        }
        if !(c1 > 0.0) {
            return Err(Error::InvalidNonlinearity(format!("C_1 = {c1} must be positive")));
        }
        if !(c2 >= 0.0 && c4 >= 0.0) {
            return Err(Error::InvalidNonlinearity(format!("C_2 = {c2}, C_4 = {c4} must be nonnegative")));
        }
        if !(c3 > 0.0 && c3 < c_f) {
            return Err(Error::InvalidNonlinearity(format!("need 0 < C_3 < C_f, got C_3 = {c3}, C_f = {c_f}")));
        }
        if !(u_check > 0.0 && u_check < 1e6) {
            return Err(Error::InvalidNonlinearity(format!("u_check = {u_check} must lie in (0, 1e6)")));
        }
        let nl = Self { kind, constants, u_check };
        nl.certify()?;
        Ok(nl)
    }

    pub fn kind(&self) -> &NonlinearityKind {
        &self.kind
    }

    pub fn constants(&self) -> Constants {
        self.constants
    }

    pub fn c_f(&self) -> f64 {
        self.constants.c_f
    }

    pub fn u_check(&self) -> f64 {
        self.u_check
    }

    pub fn eval(&self, u: f64) -> f64 {
        match &self.kind {
            NonlinearityKind::PiecewiseLinear { a, b } => {
                if u >= 0.0 {
                    a * u
                } else {
                    -b * u
                }
            }
            // u²/(√(1+u²)+1) avoids cancellation near 0
            NonlinearityKind::SmoothAbs => u * u / ((1.0 + u * u).sqrt() + 1.0),
            NonlinearityKind::Table { points } => {
                let (i, j) = table_segment(points, u);
                let (u0, f0) = points[i];
                let (u1, f1) = points[j];
                f0 + (f1 - f0) * (u - u0) / (u1 - u0)
            }
        }
    }

    /// Right derivative.
    pub fn slope(&self, u: f64) -> f64 {
        match &self.kind {
            NonlinearityKind::PiecewiseLinear { a, b } => {
                if u >= 0.0 {
                    *a
                } else {
                    -*b
                }
            }
            NonlinearityKind::SmoothAbs => u / (1.0 + u * u).sqrt(),
            NonlinearityKind::Table { points } => {
                let (i, j) = table_segment_right(points, u);
                (points[j].1 - points[i].1) / (points[j].0 - points[i].0)
            }
        }
    }

    /// Left derivative.
    pub fn slope_left(&self, u: f64) -> f64 {
        match &self.kind {
            NonlinearityKind::PiecewiseLinear { a, b } => {
                if u > 0.0 {
                    *a
                } else {
                    -*b
                }
            }
            NonlinearityKind::SmoothAbs => self.slope(u),
            NonlinearityKind::Table { points } => {
                let (i, j) = table_segment_left(points, u);
                (points[j].1 - points[i].1) / (points[j].0 - points[i].0)
            }
        }
    }

    /// Points where the one-sided derivatives differ.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.kind {
            NonlinearityKind::PiecewiseLinear { a, b } => {
                if (a + b).abs() > 0.0 {
                    vec![0.0]
                } else {
                    vec![]
                }
            }
            NonlinearityKind::SmoothAbs => vec![],
            NonlinearityKind::Table { points } => {
                points[1..points.len() - 1].iter().map(|p| p.0).collect()
            }
        }
    }

    /// All real `c` with `f(c) = target`, sorted.
    pub fn level_set(&self, target: f64) -> Vec<f64> {
        match &self.kind {
            NonlinearityKind::PiecewiseLinear { a, b } => {
                if target > 0.0 {
                    vec![-target / b, target / a]
                } else if target == 0.0 {
                    vec![0.0]
                } else {
                    vec![]
                }
            }
            NonlinearityKind::SmoothAbs => {
                if target > 0.0 {
                    let c = ((1.0 + target).powi(2) - 1.0).sqrt();
                    vec![-c, c]
                } else if target == 0.0 {
                    vec![0.0]
                } else {
                    vec![]
                }
            }
            NonlinearityKind::Table { points } => {
                let g = |u: f64| self.eval(u) - target;
                let mut knots: Vec<f64> = points.iter().map(|p| p.0).collect();
                let span = 1e6_f64.max(knots.iter().fold(0.0f64, |m, u| m.max(u.abs())) * 10.0);
                knots.insert(0, -span);
                knots.push(span);
                let mut roots = Vec::new();
                for w in knots.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    let (ga, gb) = (g(a), g(b));
                    if ga == 0.0 {
                        roots.push(a);
                    }
                    if ga * gb < 0.0 {
                        // linear on the segment
                        roots.push(a - ga * (b - a) / (gb - ga));
                    }
                }
                if g(span) == 0.0 {
                    roots.push(span);
                }
                roots.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
                roots
            }
        }
    }

    /// Checks the stored constants, the monotonicity of `f + C_f u`, and the
    /// asymptotic sign of `f(u)/u` on a logarithmic grid of `[-1e6, 1e6]`.
    pub fn certify(&self) -> Result<CertificationReport> {
        let Constants { c_f, c1, c2, c3, c4 } = self.constants;
        let grid = certification_grid(&self.kinks());
        let mut rep = CertificationReport {
            samples: grid.len(),
            growth_slack: f64::INFINITY,
            coercive_slack: f64::INFINITY,
            lower_slack: f64::INFINITY,
            monotone_slack: f64::INFINITY,
        };
        for &u in &grid {
            let f = self.eval(u);
            rep.growth_slack = rep.growth_slack.min(c_f * (1.0 + u.abs()) - f.abs());
            rep.coercive_slack = rep.coercive_slack.min(f - (c1 * u.abs() - c2));
            rep.lower_slack = rep.lower_slack.min(f - (-c3 * u - c4));
            rep.monotone_slack = rep
                .monotone_slack
                .min(self.slope(u) + c_f)
                .min(self.slope_left(u) + c_f);
            if u >= self.u_check && !(f / u > 0.0) {
                return Err(Error::Certification(format!("f(u)/u = {} is not positive at u = {u}", f / u)));
            }
            if u <= -self.u_check && !(f / u < 0.0) {
                return Err(Error::Certification(format!("f(u)/u = {} is not negative at u = {u}", f / u)));
            }
        }
        let checks = [
            ("|f(u)| <= C_f(1+|u|)", rep.growth_slack),
            ("f(u) >= C_1|u| - C_2", rep.coercive_slack),
            ("f(u) >= -C_3 u - C_4", rep.lower_slack),
            ("f'(u) >= -C_f", rep.monotone_slack),
        ];
        for (name, slack) in checks {
            if !(slack >= -CERTIFICATION_SLACK) {
                return Err(Error::Certification(format!("{name} violated (slack {slack:e})")));
            }
        }
        Ok(rep)
    }
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            NonlinearityKind::PiecewiseLinear { a, b } => write!(f, "piecewise_linear({a}, {b})"),
            NonlinearityKind::SmoothAbs => write!(f, "smooth_abs"),
            NonlinearityKind::Table { points } => write!(f, "table({} points)", points.len()),
        }
    }
}

fn table_segment(points: &[(f64, f64)], u: f64) -> (usize, usize) {
    let n = points.len();
    match points.iter().position(|p| p.0 > u) {
        None => (n - 2, n - 1),
        Some(0) => (0, 1),
        Some(j) => (j - 1, j),
    }
}

fn table_segment_right(points: &[(f64, f64)], u: f64) -> (usize, usize) {
    table_segment(points, u)
}

fn table_segment_left(points: &[(f64, f64)], u: f64) -> (usize, usize) {
    let n = points.len();
    match points.iter().position(|p| p.0 >= u) {
        None => (n - 2, n - 1),
        Some(0) => (0, 1),
        Some(j) => (j - 1, j),
    }
}

/// `0`, the kinks, and `±10^k` for `k` in `[-6, 6]` at 40 points per decade.
pub fn certification_grid(extra: &[f64]) -> Vec<f64> {
    let mut grid = vec![0.0];
    for i in 0..=480 {
        let u = 10f64.powf(-6.0 + f64::from(i) / 40.0);
        grid.push(u);
        grid.push(-u);
    }
    grid.extend_from_slice(extra);
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid
}

/// A source term sampled at mesh nodes.
#[derive(Debug, Clone, PartialEq)]
pub enum Forcing {
    Constant(f64),
    /// `(x, value)` pairs, interpolated linearly and held constant outside.
    Table(Vec<(f64, f64)>),
    Nodal(Vec<f64>),
}

impl Forcing {
    pub fn sample(&self, nodes: &[f64]) -> Result<Vec<f64>> {
        match self {
            Forcing::Constant(c) => Ok(vec![*c; nodes.len()]),
            Forcing::Nodal(v) => {
                if v.len() != nodes.len() {
                    return Err(Error::DimensionMismatch {
                        expected: nodes.len(),
                        got: v.len(),
                    });
                }
                Ok(v.clone())
            }
            Forcing::Table(points) => {
                if points.is_empty() || points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::InvalidProblem(
                        "forcing table needs strictly increasing abscissae".into(),
                    ));
                }
                Ok(nodes
                    .iter()
                    .map(|&x| {
                        let n = points.len();
                        if x <= points[0].0 {
                            points[0].1
                        } else if x >= points[n - 1].0 {
                            points[n - 1].1
                        } else {
                            let j = points.iter().position(|p| p.0 >= x).unwrap();
                            let (x0, v0) = points[j - 1];
                            let (x1, v1) = points[j];
                            v0 + (v1 - v0) * (x - x0) / (x1 - x0)
                        }
                    })
                    .collect())
            }
        }
    }
}

/// The discrete problem: operator, nonlinearity and forcing pair `(phi, h)`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    op: WeightedOperator,
    nonlinearity: Nonlinearity,
    phi: Vec<f64>,
    h: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Monotone,
    Newton,
    Deflation,
    Continuation,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Monotone => "monotone",
            Method::Newton => "newton",
            Method::Deflation => "deflation",
            Method::Continuation => "continuation",
        })
    }
}

/// One row of a solver trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub method: Method,
    pub iteration: usize,
    pub residual: f64,
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub u: Vec<f64>,
    pub t: f64,
    /// Euclidean norm of the assembled residual `Ku − M(f(u) + tφ + h)`.
    pub residual_norm: f64,
    pub compatibility_defect: f64,
    /// Fixed-point index: `+1`, `-1`, `0` (degenerate) or `None` when not computed.
    pub index: Option<i32>,
    pub method: Method,
    pub iterations: usize,
    pub trace: Vec<TraceRecord>,
}

impl Solution {
    pub fn min(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.u.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        norm_inf(&self.u)
    }
}

impl ProblemSpec {
    pub fn new(op: WeightedOperator, nonlinearity: Nonlinearity, phi: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        let n = op.dim();
        for (name, v) in [("phi", &phi), ("h", &h)] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: v.len() });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidProblem(format!("{name} must be finite")));
            }
        }
        if phi.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidProblem("phi must be nonnegative".into()));
        }
        if !(norm_inf(&phi) > 0.0) {
            return Err(Error::InvalidProblem("phi must not vanish identically".into()));
        }
        Ok(Self {
            op,
            nonlinearity,
            phi,
            h,
        })
    }

    pub fn operator(&self) -> &WeightedOperator {
        &self.op
    }

    pub fn nonlinearity(&self) -> &Nonlinearity {
        &self.nonlinearity
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn alpha(&self) -> f64 {
        self.op.alpha()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// `f(u) + tφ + h`, nodewise.
    pub fn source(&self, u: &[f64], t: f64) -> Vec<f64> {
        assert_eq!(u.len(), self.dim(), "nodal vector has wrong length");
        u.iter()
            .zip(&self.phi)
            .zip(&self.h)
            .map(|((&ui, &p), &hi)| self.nonlinearity.eval(ui) + t * p + hi)
            .collect()
    }

    /// `F(u; t) = Ku − M(f(u) + tφ + h)`; zero exactly at discrete solutions.
    pub fn residual(&self, u: &[f64], t: f64) -> Vec<f64> {
        let mut r = self.op.apply_stiffness(u);
        let s = self.source(u, t);
        for ((ri, si), m) in r.iter_mut().zip(&s).zip(self.op.mass()) {
            *ri -= m * si;
        }
        r
    }

    pub fn residual_norm(&self, u: &[f64], t: f64) -> f64 {
        norm2(&self.residual(u, t))
    }

    /// `J(u) = K − M·diag(f'(u))` with right derivatives at kinks.
    pub fn jacobian(&self, u: &[f64]) -> SymTridiagonal {
        let slopes: Vec<f64> = u.iter().map(|&v| self.nonlinearity.slope(v)).collect();
        self.jacobian_with_slopes(&slopes)
    }

    pub fn jacobian_with_slopes(&self, slopes: &[f64]) -> SymTridiagonal {
        let d: Vec<f64> = slopes.iter().zip(self.op.mass()).map(|(s, m)| -s * m).collect();
        self.op.stiffness().plus_diagonal(&d)
    }

    /// `∂F/∂t = −Mφ`.
    pub fn parameter_derivative(&self) -> Vec<f64> {
        self.phi.iter().zip(self.op.mass()).map(|(p, m)| -p * m).collect()
    }

    /// `S_t(v) = T(f(v) + C_f v + tφ + h)` with `T = (K + C_f M)^{-1} M`.
    pub fn apply_s(&self, v: &[f64], t: f64) -> Result<Vec<f64>> {
        let c_f = self.nonlinearity.c_f();
        let mut rhs = self.source(v, t);
        for (r, vi) in rhs.iter_mut().zip(v) {
            *r += c_f * vi;
        }
        Ok(self.op.solve_shifted(c_f, &rhs)?.solution)
    }

    /// `1ᵀM(f(u) + tφ + h)`, which vanishes for exact discrete solutions.
    pub fn compatibility_defect(&self, u: &[f64], t: f64) -> f64 {
        self.op.integrate(&self.source(u, t))
    }

    /// `(C_2|Ω| − ∫h) / ∫φ`: no solution exists for larger `t`.
    pub fn necessary_upper_bound(&self) -> f64 {
        let c2 = self.nonlinearity.constants().c2;
        (c2 * self.op.domain_measure() - self.op.integrate(&self.h)) / self.op.integrate(&self.phi)
    }

    /// The constant `−(|t|‖φ‖∞ + ‖h‖∞ + C_4)/C_3`. It satisfies
    /// `F(c; t) ≤ 0` componentwise, i.e. it is a subsolution.
    pub fn constant_subsolution(&self, t: f64) -> f64 {
        let Constants { c3, c4, .. } = self.nonlinearity.constants();
        -(t.abs() * norm_inf(&self.phi) + norm_inf(&self.h) + c4) / c3
    }

    pub fn make_solution(&self, u: Vec<f64>, t: f64, method: Method, iterations: usize) -> Solution {
        let residual_norm = self.residual_norm(&u, t);
        let compatibility_defect = self.compatibility_defect(&u, t);
        Solution {
            u,
            t,
            residual_norm,
            compatibility_defect,
            index: None,
            method,
            iterations,
            trace: Vec::new(),
        }
    }

    /// Roots `c` of `f(c) + tφ + h = 0` when `φ` and `h` are constant; these are the
    /// constant discrete solutions. `None` when the forcing is not constant.
    pub fn constant_solution_levels(&self, t: f64) -> Option<Vec<f64>> {
        let p0 = self.phi[0];
        let h0 = self.h[0];
        if self.phi.iter().any(|&p| p != p0) || self.h.iter().any(|&v| v != h0) {
            return None;
        }
        Some(self.nonlinearity.level_set(-(t * p0 + h0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::build_mesh;
    use crate::linalg::max_abs_diff;
    use crate::operators::assemble;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(nl: Nonlinearity, interval: (f64, f64), n: usize, phi: f64, h: f64) -> ProblemSpec {
        let mesh = build_mesh(interval, n, 2.0, 1).unwrap();
        let op = assemble(&mesh, 0.5).unwrap();
        let dim = op.dim();
        ProblemSpec::new(op, nl, vec![phi; dim], vec![h; dim]).unwrap()
    }

    fn pl11() -> ProblemSpec {
        spec(Nonlinearity::piecewise_linear(1.0, 1.0).unwrap(), (-1.0, 1.0), 100, 1.0, 0.0)
    }

    #[test]
    fn builtin_constants_certify() {
        let rep = Nonlinearity::piecewise_linear(1.0, 1.0).unwrap().certify().unwrap();
        assert!(rep.growth_slack >= 0.0 && rep.lower_slack >= 0.0);
        Nonlinearity::piecewise_linear(3.0, 0.2).unwrap();
        Nonlinearity::piecewise_linear(0.2, 3.0).unwrap();
        let rep = Nonlinearity::smooth_abs().certify().unwrap();
        assert!(rep.coercive_slack >= 0.0 && rep.monotone_slack >= 0.0);
    }

    #[test]
    fn smooth_abs_inequalities_by_algebra() {
        // √(1+u²) ≥ |u| gives both lower bounds; check the identities on a dense sweep
        let f = Nonlinearity::smooth_abs();
        for i in -2000..=2000 {
            let u = f64::from(i) * 0.01;
            let v = f.eval(u);
            assert!(v >= u.abs() - 1.0 - 1e-15);
            assert!(v >= -0.5 * u - 1.0);
            assert!(v.abs() <= 1.0 + u.abs());
        }
    }

    #[test]
    fn rejects_bad_constants() {
        let c = Constants { c_f: 1.0, c1: 1.0, c2: 0.0, c3: 0.5, c4: 0.0 };
        // claims C_2 = 0 for smooth_abs, which is false near u = 0
        let bad = Nonlinearity::with_constants(NonlinearityKind::SmoothAbs, c, DEFAULT_U_CHECK);
        assert!(matches!(bad, Err(Error::Certification(_))));
        let c = Constants { c_f: 1.0, c1: 1.0, c2: 1.0, c3: 1.0, c4: 1.0 };
        assert!(Nonlinearity::with_constants(NonlinearityKind::SmoothAbs, c, DEFAULT_U_CHECK).is_err());
        assert!(Nonlinearity::piecewise_linear(0.0, 1.0).is_err());
    }

    #[test]
    fn table_nonlinearity_behaves_like_its_interpolant() {
        let c = Constants { c_f: 2.0, c1: 0.5, c2: 0.0, c3: 0.5, c4: 0.0 };
        let nl = Nonlinearity::table(vec![(-1.0, 1.0), (0.0, 0.0), (1.0, 2.0)], c).unwrap();
        assert_eq!(nl.eval(0.5), 1.0);
        assert_eq!(nl.eval(-3.0), 3.0);
        assert_eq!(nl.eval(4.0), 8.0);
        assert_eq!(nl.slope(0.0), 2.0);
        assert_eq!(nl.slope_left(0.0), -1.0);
        assert_eq!(nl.kinks(), vec![0.0]);
        assert_eq!(nl.level_set(1.0), vec![-1.0, 0.5]);
        // f(u)/u has the wrong sign at -inf
        let wrong = Nonlinearity::table(vec![(-1.0, -1.0), (0.0, 0.0), (1.0, 1.0)], c);
        assert!(wrong.is_err());
    }

    #[test]
    fn level_sets_of_builtins() {
        let pl = Nonlinearity::piecewise_linear(1.0, 1.0).unwrap();
        assert_eq!(pl.level_set(1.0), vec![-1.0, 1.0]);
        assert_eq!(pl.level_set(0.0), vec![0.0]);
        assert!(pl.level_set(-0.5).is_empty());
        let sa = Nonlinearity::smooth_abs();
        let r = sa.level_set(1.0);
        assert!((r[1] - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn residual_vanishes_on_constant_solutions() {
        let s = pl11();
        let n = s.dim();
        assert!(norm_inf(&s.residual(&vec![1.0; n], -1.0)) < 1e-12);
        assert!(norm_inf(&s.residual(&vec![-1.0; n], -1.0)) < 1e-12);
        let sa = spec(Nonlinearity::smooth_abs(), (-1.0, 1.0), 100, 1.0, 0.0);
        // √(1+3) − 1 = 1 cancels t = −1
        let r = sa.residual(&vec![3f64.sqrt(); n], -1.0);
        assert!(norm_inf(&r) < 1e-12);
    }

    #[test]
    fn jacobian_examples() {
        let s = pl11();
        let n = s.dim();
        let j = s.jacobian(&vec![0.7; n]);
        let expected = s.operator().shifted_matrix(-1.0);
        assert!(max_abs_diff(&j.diag, &expected.diag) < 1e-14);
        assert_eq!(j.off, expected.off);
        let k = s.jacobian_with_slopes(&vec![0.0; n]);
        assert_eq!(&k, s.operator().stiffness());
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let s = spec(Nonlinearity::smooth_abs(), (-1.0, 2.0), 40, 1.0, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let eps = 1e-6;
        for _ in 0..5 {
            let u: Vec<f64> = (0..s.dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let t = rng.gen_range(-2.0..0.0);
            let f0 = s.residual(&u, t);
            let j = s.jacobian(&u);
            for i in 0..s.dim() {
                let mut up = u.clone();
                up[i] += eps;
                let fd: Vec<f64> = s.residual(&up, t).iter().zip(&f0).map(|(a, b)| (a - b) / eps).collect();
                let mut e = vec![0.0; s.dim()];
                e[i] = 1.0;
                let col = j.matvec(&e);
                let diff: f64 = fd.iter().zip(&col).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                assert!(diff <= 10.0 * eps, "column {i}: {diff}");
            }
        }
    }

    #[test]
    fn s_map_fixes_constant_solution() {
        let s = pl11();
        let v = s.apply_s(&vec![-1.0; s.dim()], -1.0).unwrap();
        assert!(v.iter().all(|x| (x + 1.0).abs() < 1e-12));
    }

    #[test]
    fn s_map_is_monotone_in_t() {
        let s = spec(Nonlinearity::smooth_abs(), (-1.0, 1.0), 60, 1.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let v: Vec<f64> = (0..s.dim()).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let t1 = rng.gen_range(-3.0..1.0);
            let t2 = t1 + rng.gen_range(0.0..2.0);
            let a = s.apply_s(&v, t1).unwrap();
            let b = s.apply_s(&v, t2).unwrap();
            assert!(a.iter().zip(&b).all(|(x, y)| *x <= y + 1e-12));
        }
    }

    #[test]
    fn compatibility_defect_examples() {
        let s = spec(Nonlinearity::piecewise_linear(1.0, 1.0).unwrap(), (0.0, 1.0), 50, 1.0, 0.0);
        assert_eq!(s.compatibility_defect(&vec![-1.0; s.dim()], -1.0), 0.0);
        assert!((s.compatibility_defect(&vec![0.0; s.dim()], -1.0) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn necessary_bound_examples() {
        let sa = spec(Nonlinearity::smooth_abs(), (-1.0, 1.0), 50, 1.0, 0.0);
        assert!((sa.necessary_upper_bound() - 1.0).abs() < 1e-14);
        assert_eq!(pl11().necessary_upper_bound(), 0.0);
        let shifted = spec(Nonlinearity::piecewise_linear(1.0, 1.0).unwrap(), (0.0, 1.0), 50, 1.0, -1.0);
        assert!((shifted.necessary_upper_bound() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn subsolution_examples() {
        assert_eq!(pl11().constant_subsolution(-1.0), -2.0);
        let sa = spec(Nonlinearity::smooth_abs(), (-1.0, 1.0), 50, 1.0, 0.0);
        assert_eq!(sa.constant_subsolution(0.0), -2.0);
    }

    #[test]
    fn subsolution_has_nonpositive_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for draw in 0..100 {
            let nl = if draw % 2 == 0 {
                Nonlinearity::piecewise_linear(rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0)).unwrap()
            } else {
                Nonlinearity::smooth_abs()
            };
            let mesh = build_mesh((-1.0, 1.5), 30, 2.0, 1).unwrap();
            let op = assemble(&mesh, rng.gen_range(0.0..1.9)).unwrap();
            let n = op.dim();
            let phi: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
            let h: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let s = ProblemSpec::new(op, nl, phi, h).unwrap();
            let t = rng.gen_range(-5.0..5.0);
            let c = s.constant_subsolution(t);
            let src = s.source(&vec![c; n], t);
            let m = s.operator().mass();
            assert!(src.iter().zip(m).all(|(v, mi)| mi * v >= -1e-12));
            let r = s.residual(&vec![c; n], t);
            assert!(r.iter().all(|&v| v <= 1e-12));
        }
    }

    #[test]
    fn rejects_invalid_forcing() {
        let mesh = build_mesh((0.0, 1.0), 10, 1.0, 1).unwrap();
        let op = assemble(&mesh, 0.5).unwrap();
        let nl = Nonlinearity::smooth_abs();
        assert!(ProblemSpec::new(op.clone(), nl.clone(), vec![0.0; 11], vec![0.0; 11]).is_err());
        let mut phi = vec![1.0; 11];
        phi[3] = -0.1;
        assert!(ProblemSpec::new(op.clone(), nl.clone(), phi, vec![0.0; 11]).is_err());
        assert!(ProblemSpec::new(op, nl, vec![1.0; 10], vec![0.0; 11]).is_err());
    }

    #[test]
    fn forcing_table_sampling() {
        let f = Forcing::Table(vec![(-1.0, 0.0), (0.0, 1.0), (1.0, 0.0)]);
        let v = f.sample(&[-2.0, -0.5, 0.0, 0.25, 3.0]).unwrap();
        assert_eq!(v, vec![0.0, 0.5, 1.0, 0.75, 0.0]);
    }

    proptest! {
        #[test]
        fn fixed_point_gap_controls_residual(seed in 0u64..500, t in -3.0f64..1.0) {
            let s = spec(Nonlinearity::smooth_abs(), (-1.0, 1.0), 50, 1.0, 0.2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u: Vec<f64> = (0..s.dim()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let su = s.apply_s(&u, t).unwrap();
            let gap = max_abs_diff(&u, &su);
            let bound = s.operator().shifted_matrix(s.nonlinearity().c_f()).norm_inf() * gap;
            let r = norm_inf(&s.residual(&u, t));
            prop_assert!(r <= bound * (1.0 + 1e-9) + 1e-12);
        }
    }
}
