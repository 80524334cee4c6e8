//! Flat `section.key = value` run configuration.
//!
//! ```text
//! # comments start with '#'
//! model = pl11              # optional built-in base, later keys override it
//! mesh.interval = -1, 1
//! mesh.n_cells = 400
//! problem.alpha = 0.5
//! nonlinearity.kind = piecewise_linear
//! forcing.phi = table(-1:0, 0:1, 1:0)
//! forcing.h = file(h.txt)
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dap_core::{
    assemble, build_mesh, Constants, Forcing, Nonlinearity, NonlinearityKind, ProblemSpec, SolveOptions,
};
use thiserror::Error;

use crate::models;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: field `{field}`: {message}")]
    Field { line: usize, field: String, message: String },
    #[error("field `{field}`: {message}")]
    Invalid { field: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid problem: {0}")]
    Problem(#[from] dap_core::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NonlinearityConfig {
    PiecewiseLinear { a: f64, b: f64 },
    SmoothAbs,
    Table { points: Vec<(f64, f64)>, constants: Constants },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForcingConfig {
    Constant(f64),
    Table(Vec<(f64, f64)>),
    /// One value per node, or `x value` pairs interpolated like a table.
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cap {
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Option<String>,
    pub interval: (f64, f64),
    pub n_cells: usize,
    pub grading: f64,
    pub radial_dimension: u32,
    pub alpha: f64,
    pub nonlinearity: NonlinearityConfig,
    pub u_check: f64,
    pub phi: ForcingConfig,
    pub h: ForcingConfig,
    pub t: f64,
    pub t_range: Option<(f64, f64, f64)>,
    pub t_values: Option<Vec<f64>>,
    pub solver: SolveOptions,
    pub rho_plus: f64,
    pub rho_minus: Cap,
    pub radius: f64,
    pub branch_t_start: f64,
    pub branch_step: f64,
    pub branch_t_stop: f64,
    pub bracket_t_lo: Cap,
    pub bracket_t_hi: Cap,
    pub bracket_tol: f64,
    pub check_t: f64,
    pub check_degree_t: f64,
    pub check_s_samples: usize,
    pub check_v_samples: usize,
    pub check_operator_samples: usize,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub jobs: usize,
    /// Directory that relative `file(...)` paths resolve against.
    pub base_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: None,
            interval: (-1.0, 1.0),
            n_cells: 400,
            grading: 2.0,
            radial_dimension: 1,
            alpha: 0.5,
            nonlinearity: NonlinearityConfig::PiecewiseLinear { a: 1.0, b: 1.0 },
            u_check: dap_core::problem::DEFAULT_U_CHECK,
            phi: ForcingConfig::Constant(1.0),
            h: ForcingConfig::Constant(0.0),
            t: -1.0,
            t_range: None,
            t_values: None,
            solver: SolveOptions::default(),
            rho_plus: 0.5,
            rho_minus: Cap::Auto,
            radius: 10.0,
            branch_t_start: -2.0,
            branch_step: 0.1,
            branch_t_stop: 1.0,
            bracket_t_lo: Cap::Auto,
            bracket_t_hi: Cap::Auto,
            bracket_tol: 1e-4,
            check_t: -2.0,
            check_degree_t: -1.0,
            check_s_samples: 11,
            check_v_samples: 200,
            check_operator_samples: 1000,
            output_dir: PathBuf::from("out"),
            seed: 0,
            jobs: 0,
            base_dir: PathBuf::from("."),
        }
    }
}

struct Entry {
    line: usize,
    value: String,
}

fn parse_lines(text: &str) -> Result<BTreeMap<String, Entry>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            });
        };
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                message: "empty key".into(),
            });
        }
        if map.contains_key(&key) {
            return Err(ConfigError::Field {
                line,
                field: key,
                message: "duplicate key".into(),
            });
        }
        map.insert(
            key,
            Entry {
                line,
                value: value.trim().to_string(),
            },
        );
    }
    Ok(map)
}

fn field_err(key: &str, e: &Entry, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        line: e.line,
        field: key.to_string(),
        message: message.into(),
    }
}

fn real(key: &str, e: &Entry) -> Result<f64, ConfigError> {
    let v: f64 = e
        .value
        .parse()
        .map_err(|_| field_err(key, e, format!("expected a number, got `{}`", e.value)))?;
    if !v.is_finite() {
        return Err(field_err(key, e, "must be finite"));
    }
    Ok(v)
}

fn integer<T: std::str::FromStr>(key: &str, e: &Entry) -> Result<T, ConfigError> {
    e.value
        .parse()
        .map_err(|_| field_err(key, e, format!("expected a nonnegative integer, got `{}`", e.value)))
}

fn boolean(key: &str, e: &Entry) -> Result<bool, ConfigError> {
    match e.value.as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(field_err(key, e, format!("expected true or false, got `{other}`"))),
    }
}

fn cap(key: &str, e: &Entry) -> Result<Cap, ConfigError> {
    if e.value == "auto" {
        Ok(Cap::Auto)
    } else {
        Ok(Cap::Value(real(key, e)?))
    }
}

fn real_list(key: &str, e: &Entry) -> Result<Vec<f64>, ConfigError> {
    e.value
        .split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| field_err(key, e, format!("bad number `{s}`")))
        })
        .collect()
}

fn pairs(key: &str, e: &Entry, body: &str) -> Result<Vec<(f64, f64)>, ConfigError> {
    body.split(',')
        .map(|item| {
            let item = item.trim();
            let (x, y) = item
                .split_once(':')
                .ok_or_else(|| field_err(key, e, format!("expected `x:value`, got `{item}`")))?;
            match (x.trim().parse::<f64>(), y.trim().parse::<f64>()) {
                (Ok(x), Ok(y)) if x.is_finite() && y.is_finite() => Ok((x, y)),
                _ => Err(field_err(key, e, format!("bad pair `{item}`"))),
            }
        })
        .collect()
}

/// `LO:HI:STEP` with `STEP > 0` and `LO <= HI`.
pub fn parse_t_range(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected LO:HI:STEP, got `{s}`"));
    }
    let v: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number `{p}`")))
        .collect::<Result<_, _>>()?;
    if !(v[2] > 0.0 && v[0] <= v[1] && v.iter().all(|x| x.is_finite())) {
        return Err(format!("need LO <= HI and STEP > 0, got `{s}`"));
    }
    Ok((v[0], v[1], v[2]))
}

/// Grid `lo, lo + step, ...` up to `hi` inclusive.
pub fn t_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| lo + k as f64 * step).collect()
}

impl RunConfig {
    pub fn from_model(name: &str) -> Result<Self, ConfigError> {
        let text = models::lookup(name).ok_or_else(|| ConfigError::Invalid {
            field: "model".into(),
            message: format!("unknown model `{name}` (known: {})", models::NAMES.join(", ")),
        })?;
        let mut c = Self::parse_layer(Self::default(), text)?;
        c.model = Some(name.to_string());
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
        Self::from_str_in(&text, &base)
    }

    /// Parses `text`, resolving `file(...)` paths against `base_dir`.
    pub fn from_str_in(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let map = parse_lines(text)?;
        let mut base = Self::default();
        if let Some(e) = map.get("model") {
            let name = e.value.clone();
            base = Self::parse_layer(Self::default(), models::lookup(&name).ok_or_else(|| {
                field_err("model", e, format!("unknown model `{name}` (known: {})", models::NAMES.join(", ")))
            })?)?;
            base.model = Some(name);
        }
        base.base_dir = base_dir.to_path_buf();
        let c = Self::apply(base, map)?;
        c.validate()?;
        Ok(c)
    }

    fn parse_layer(base: Self, text: &str) -> Result<Self, ConfigError> {
        Self::apply(base, parse_lines(text)?)
    }

    fn apply(mut c: Self, map: BTreeMap<String, Entry>) -> Result<Self, ConfigError> {
        let mut nl_kind: Option<(String, &Entry)> = None;
        let mut nl_a = None;
        let mut nl_b = None;
        let mut nl_points = None;
        let mut nl_consts: [Option<f64>; 5] = [None; 5];
        for (key, e) in &map {
            let k = key.as_str();
            match k {
                "model" => {}
                "mesh.interval" => {
                    let v = real_list(k, e)?;
                    if v.len() != 2 {
                        return Err(field_err(k, e, "expected `left, right`"));
                    }
                    c.interval = (v[0], v[1]);
                }
                "mesh.n_cells" => c.n_cells = integer(k, e)?,
                "mesh.grading" => c.grading = real(k, e)?,
                "mesh.radial_dimension" => c.radial_dimension = integer(k, e)?,
                "problem.alpha" => c.alpha = real(k, e)?,
                "nonlinearity.kind" => nl_kind = Some((e.value.clone(), e)),
                "nonlinearity.a" => nl_a = Some(real(k, e)?),
                "nonlinearity.b" => nl_b = Some(real(k, e)?),
                "nonlinearity.points" => nl_points = Some(pairs(k, e, &e.value)?),
                "nonlinearity.c_f" => nl_consts[0] = Some(real(k, e)?),
                "nonlinearity.c1" => nl_consts[1] = Some(real(k, e)?),
                "nonlinearity.c2" => nl_consts[2] = Some(real(k, e)?),
                "nonlinearity.c3" => nl_consts[3] = Some(real(k, e)?),
                "nonlinearity.c4" => nl_consts[4] = Some(real(k, e)?),
                "nonlinearity.u_check" => c.u_check = real(k, e)?,
                "forcing.phi" => c.phi = forcing(k, e)?,
                "forcing.h" => c.h = forcing(k, e)?,
                "t" => c.t = real(k, e)?,
                "t_range" => c.t_range = Some(parse_t_range(&e.value).map_err(|m| field_err(k, e, m))?),
                "sweep.t_values" => c.t_values = Some(real_list(k, e)?),
                "solver.tol_residual" => c.solver.tol_residual = real(k, e)?,
                "solver.max_iters" => c.solver.max_iters = integer(k, e)?,
                "solver.damping" => c.solver.damping = real(k, e)?,
                "solver.deflation_shift" => c.solver.deflation_shift = real(k, e)?,
                "solver.deflation_power" => c.solver.deflation_power = real(k, e)?,
                "solver.multistart" => c.solver.multistart = integer(k, e)?,
                "solver.ramp_starts" => c.solver.ramp_starts = boolean(k, e)?,
                "solver.monotone_max_iters" => c.solver.monotone_max_iters = integer(k, e)?,
                "solver.divergence_ceiling" => c.solver.divergence_ceiling = real(k, e)?,
                "region.rho_plus" => c.rho_plus = real(k, e)?,
                "region.rho_minus" => c.rho_minus = cap(k, e)?,
                "region.radius" => c.radius = real(k, e)?,
                "branch.t_start" => c.branch_t_start = real(k, e)?,
                "branch.step" => c.branch_step = real(k, e)?,
                "branch.t_stop" => c.branch_t_stop = real(k, e)?,
                "bracket.t_lo" => c.bracket_t_lo = cap(k, e)?,
                "bracket.t_hi" => c.bracket_t_hi = cap(k, e)?,
                "bracket.tol" => c.bracket_tol = real(k, e)?,
                "check.t" => c.check_t = real(k, e)?,
                "check.degree_t" => c.check_degree_t = real(k, e)?,
                "check.s_samples" => c.check_s_samples = integer(k, e)?,
                "check.v_samples" => c.check_v_samples = integer(k, e)?,
                "check.operator_samples" => c.check_operator_samples = integer(k, e)?,
                "output.dir" => c.output_dir = PathBuf::from(&e.value),
                "seed" => c.seed = integer(k, e)?,
                "jobs" => c.jobs = integer(k, e)?,
                _ => return Err(field_err(k, e, "unknown key")),
            }
        }

        let kind = match &nl_kind {
            Some((name, e)) => match name.as_str() {
                "piecewise_linear" => "piecewise_linear",
                "smooth_abs" => "smooth_abs",
                "table" => "table",
                other => return Err(field_err("nonlinearity.kind", e, format!("unknown kind `{other}`"))),
            },
            None => match c.nonlinearity {
                NonlinearityConfig::PiecewiseLinear { .. } => "piecewise_linear",
                NonlinearityConfig::SmoothAbs => "smooth_abs",
                NonlinearityConfig::Table { .. } => "table",
            },
        };
        c.nonlinearity = match kind {
            "piecewise_linear" => {
                let (a0, b0) = match c.nonlinearity {
                    NonlinearityConfig::PiecewiseLinear { a, b } => (a, b),
                    _ => (1.0, 1.0),
                };
                NonlinearityConfig::PiecewiseLinear {
                    a: nl_a.unwrap_or(a0),
                    b: nl_b.unwrap_or(b0),
                }
            }
            "smooth_abs" => NonlinearityConfig::SmoothAbs,
            _ => {
                let (p0, k0) = match &c.nonlinearity {
                    NonlinearityConfig::Table { points, constants } => (Some(points.clone()), Some(*constants)),
                    _ => (None, None),
                };
                let points = nl_points.or(p0).ok_or_else(|| ConfigError::Invalid {
                    field: "nonlinearity.points".into(),
                    message: "table nonlinearity needs points".into(),
                })?;
                let names = ["c_f", "c1", "c2", "c3", "c4"];
                let mut vals = [0.0; 5];
                for i in 0..5 {
                    vals[i] = match (nl_consts[i], k0) {
                        (Some(v), _) => v,
                        (None, Some(k)) => [k.c_f, k.c1, k.c2, k.c3, k.c4][i],
                        (None, None) => {
                            return Err(ConfigError::Invalid {
                                field: format!("nonlinearity.{}", names[i]),
                                message: "table nonlinearity needs all five constants".into(),
                            })
                        }
                    };
                }
                NonlinearityConfig::Table {
                    points,
                    constants: Constants {
                        c_f: vals[0],
                        c1: vals[1],
                        c2: vals[2],
                        c3: vals[3],
                        c4: vals[4],
                    },
                }
            }
        };
        Ok(c)
    }

    fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
        ConfigError::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Checks option ranges and builds the problem once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.solver
            .validate()
            .map_err(|e| Self::invalid("solver", e.to_string()))?;
        if !(self.alpha >= 0.0 && self.alpha < 2.0) {
            return Err(Self::invalid("problem.alpha", format!("alpha = {} must lie in [0, 2)", self.alpha)));
        }
        if !(self.rho_plus > 0.0 && self.radius > 0.0) {
            return Err(Self::invalid("region", "rho_plus and radius must be positive"));
        }
        if let Cap::Value(v) = self.rho_minus {
            if !(v > 0.0) {
                return Err(Self::invalid("region.rho_minus", "must be positive"));
            }
        }
        if !(self.branch_step > 0.0) {
            return Err(Self::invalid("branch.step", "must be positive"));
        }
        if !(self.bracket_tol > 0.0) {
            return Err(Self::invalid("bracket.tol", "must be positive"));
        }
        if self.check_s_samples < 2 || self.check_v_samples == 0 {
            return Err(Self::invalid("check", "need s_samples >= 2 and v_samples >= 1"));
        }
        if let Some(v) = &self.t_values {
            if v.is_empty() || v.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Self::invalid("sweep.t_values", "must be nonempty and increasing"));
            }
        }
        self.problem()?;
        Ok(())
    }

    pub fn nonlinearity(&self) -> Result<Nonlinearity, ConfigError> {
        let nl = match &self.nonlinearity {
            NonlinearityConfig::PiecewiseLinear { a, b } => {
                let base = Nonlinearity::piecewise_linear(*a, *b)?;
                Nonlinearity::with_constants(base.kind().clone(), base.constants(), self.u_check)?
            }
            NonlinearityConfig::SmoothAbs => {
                let base = Nonlinearity::smooth_abs();
                Nonlinearity::with_constants(NonlinearityKind::SmoothAbs, base.constants(), self.u_check)?
            }
            NonlinearityConfig::Table { points, constants } => Nonlinearity::with_constants(
                NonlinearityKind::Table { points: points.clone() },
                *constants,
                self.u_check,
            )?,
        };
        Ok(nl)
    }

    fn sample(&self, name: &str, f: &ForcingConfig, nodes: &[f64]) -> Result<Vec<f64>, ConfigError> {
        let forcing = match f {
            ForcingConfig::Constant(v) => Forcing::Constant(*v),
            ForcingConfig::Table(p) => Forcing::Table(p.clone()),
            ForcingConfig::File(path) => {
                let full = if path.is_absolute() { path.clone() } else { self.base_dir.join(path) };
                let text = std::fs::read_to_string(&full).map_err(|source| ConfigError::Io {
                    path: full.clone(),
                    source,
                })?;
                read_forcing_file(&text).map_err(|m| Self::invalid(name, format!("{}: {m}", full.display())))?
            }
        };
        Ok(forcing.sample(nodes)?)
    }

    pub fn problem(&self) -> Result<ProblemSpec, ConfigError> {
        let mesh = build_mesh(self.interval, self.n_cells, self.grading, self.radial_dimension)?;
        let op = assemble(&mesh, self.alpha)?;
        let phi = self.sample("forcing.phi", &self.phi, mesh.nodes())?;
        let h = self.sample("forcing.h", &self.h, mesh.nodes())?;
        Ok(ProblemSpec::new(op, self.nonlinearity()?, phi, h)?)
    }

    /// The sweep grid: explicit values, else the range, else the single `t`.
    pub fn sweep_grid(&self) -> Vec<f64> {
        if let Some(v) = &self.t_values {
            return v.clone();
        }
        match self.t_range {
            Some((lo, hi, step)) => t_grid(lo, hi, step),
            None => vec![self.t],
        }
    }

    /// Resolved configuration as sorted `key = value` lines.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        if let Some(m) = &self.model {
            put("model", m.clone());
        }
        put("mesh.interval", format!("{}, {}", self.interval.0, self.interval.1));
        put("mesh.n_cells", self.n_cells.to_string());
        put("mesh.grading", self.grading.to_string());
        put("mesh.radial_dimension", self.radial_dimension.to_string());
        put("problem.alpha", self.alpha.to_string());
        match &self.nonlinearity {
            NonlinearityConfig::PiecewiseLinear { a, b } => {
                put("nonlinearity.kind", "piecewise_linear".into());
                put("nonlinearity.a", a.to_string());
                put("nonlinearity.b", b.to_string());
            }
            NonlinearityConfig::SmoothAbs => put("nonlinearity.kind", "smooth_abs".into()),
            NonlinearityConfig::Table { points, constants } => {
                put("nonlinearity.kind", "table".into());
                put("nonlinearity.points", join_pairs(points));
                put("nonlinearity.c_f", constants.c_f.to_string());
                put("nonlinearity.c1", constants.c1.to_string());
                put("nonlinearity.c2", constants.c2.to_string());
                put("nonlinearity.c3", constants.c3.to_string());
                put("nonlinearity.c4", constants.c4.to_string());
            }
        }
        put("nonlinearity.u_check", self.u_check.to_string());
        put("forcing.phi", forcing_text(&self.phi));
        put("forcing.h", forcing_text(&self.h));
        put("t", self.t.to_string());
        if let Some((lo, hi, step)) = self.t_range {
            put("t_range", format!("{lo}:{hi}:{step}"));
        }
        if let Some(v) = &self.t_values {
            put("sweep.t_values", v.iter().map(f64::to_string).collect::<Vec<_>>().join(", "));
        }
        put("solver.tol_residual", self.solver.tol_residual.to_string());
        put("solver.max_iters", self.solver.max_iters.to_string());
        put("solver.damping", self.solver.damping.to_string());
        put("solver.deflation_shift", self.solver.deflation_shift.to_string());
        put("solver.deflation_power", self.solver.deflation_power.to_string());
        put("solver.multistart", self.solver.multistart.to_string());
        put("solver.ramp_starts", self.solver.ramp_starts.to_string());
        put("region.rho_plus", self.rho_plus.to_string());
        put("region.rho_minus", cap_text(self.rho_minus));
        put("region.radius", self.radius.to_string());
        put("branch.t_start", self.branch_t_start.to_string());
        put("branch.step", self.branch_step.to_string());
        put("branch.t_stop", self.branch_t_stop.to_string());
        put("bracket.t_lo", cap_text(self.bracket_t_lo));
        put("bracket.t_hi", cap_text(self.bracket_t_hi));
        put("bracket.tol", self.bracket_tol.to_string());
        put("check.t", self.check_t.to_string());
        put("check.degree_t", self.check_degree_t.to_string());
        put("check.s_samples", self.check_s_samples.to_string());
        put("check.v_samples", self.check_v_samples.to_string());
        put("check.operator_samples", self.check_operator_samples.to_string());
        put("output.dir", self.output_dir.display().to_string());
        put("seed", self.seed.to_string());
        put("jobs", self.jobs.to_string());
        out
    }
}

fn forcing(key: &str, e: &Entry) -> Result<ForcingConfig, ConfigError> {
    let v = e.value.as_str();
    if let Some(body) = v.strip_prefix("table(").and_then(|s| s.strip_suffix(')')) {
        let p = pairs(key, e, body)?;
        if p.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(field_err(key, e, "table abscissae must increase"));
        }
        return Ok(ForcingConfig::Table(p));
    }
    if let Some(body) = v.strip_prefix("file(").and_then(|s| s.strip_suffix(')')) {
        return Ok(ForcingConfig::File(PathBuf::from(body.trim())));
    }
    Ok(ForcingConfig::Constant(real(key, e)?))
}

fn read_forcing_file(text: &str) -> Result<Forcing, String> {
    let rows: Vec<Vec<f64>> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| format!("bad number `{t}`")))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    if rows.is_empty() {
        return Err("empty file".into());
    }
    match rows[0].len() {
        1 if rows.iter().all(|r| r.len() == 1) => Ok(Forcing::Nodal(rows.iter().map(|r| r[0]).collect())),
        2 if rows.iter().all(|r| r.len() == 2) => Ok(Forcing::Table(rows.iter().map(|r| (r[0], r[1])).collect())),
        _ => Err("expected one value or an `x value` pair per line".into()),
    }
}

fn join_pairs(p: &[(f64, f64)]) -> String {
    p.iter().map(|(x, y)| format!("{x}:{y}")).collect::<Vec<_>>().join(", ")
}

fn forcing_text(f: &ForcingConfig) -> String {
    match f {
        ForcingConfig::Constant(v) => v.to_string(),
        ForcingConfig::Table(p) => format!("table({})", join_pairs(p)),
        ForcingConfig::File(p) => format!("file({})", p.display()),
    }
}

fn cap_text(c: Cap) -> String {
    match c {
        Cap::Auto => "auto".into(),
        Cap::Value(v) => v.to_string(),
    }
}
