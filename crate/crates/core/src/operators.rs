//! Discrete weighted Neumann operator.
//!
//! Piecewise-linear elements on a [`Mesh`] give a symmetric tridiagonal stiffness
//! `K` realizing `-div(|x|^alpha grad ·)` with natural Neumann conditions, and a
//! lumped (diagonal) mass `M`. With `c > 0` the matrix `K + cM` is an SPD M-matrix,
//! so `T = (K + cM)^{-1} M` is a positive operator.

use std::sync::{Arc, RwLock};

use crate::domain::{weight_cell_integral, Mesh};
use crate::error::{Error, Result};
use crate::linalg::{dot, norm_inf, BandCholesky, SymTridiagonal};

const FACTOR_CACHE_CAPACITY: usize = 32;

#[derive(Debug)]
pub struct WeightedOperator {
    mesh: Mesh,
    alpha: f64,
    stiffness: SymTridiagonal,
    mass: Vec<f64>,
    linear_tol: f64,
    factors: RwLock<Vec<(u64, Arc<BandCholesky>)>>,
}

impl Clone for WeightedOperator {
    fn clone(&self) -> Self {
        Self {
            mesh: self.mesh.clone(),
            alpha: self.alpha,
            stiffness: self.stiffness.clone(),
            mass: self.mass.clone(),
            linear_tol: self.linear_tol,
            factors: RwLock::new(Vec::new()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolveReport {
    pub solution: Vec<f64>,
    /// Normwise backward error `‖(K+cM)w − Mv‖∞ / (‖K+cM‖∞‖w‖∞ + ‖Mv‖∞)`.
    pub residual_norm: f64,
    pub factorization_reused: bool,
}

/// Lumped mass contributions `(∫ φ_left x^(N-1), ∫ φ_right x^(N-1))` of a cell,
/// summed from nonnegative binomial terms.
fn lumped_cell_mass(a: f64, b: f64, radial_dimension: u32) -> (f64, f64) {
    let h = b - a;
    if radial_dimension == 1 {
        return (0.5 * h, 0.5 * h);
    }
    // x = a + h s, a >= 0 on radial meshes
    let m = (radial_dimension - 1) as i32;
    let (mut left, mut right) = (0.0, 0.0);
    let mut binom = 1.0;
    for j in 0..=m {
        let jf = f64::from(j);
        let term = binom * a.powi(m - j) * h.powi(j + 1);
        left += term / ((jf + 1.0) * (jf + 2.0));
        right += term / (jf + 2.0);
        binom = binom * f64::from(m - j) / (jf + 1.0);
    }
    (left, right)
}

/// Assembles stiffness and lumped mass for `-div(|x|^alpha grad u)` on `mesh`.
pub fn assemble(mesh: &Mesh, alpha: f64) -> Result<WeightedOperator> {
    if !(0.0..2.0).contains(&alpha) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let n = mesh.n_nodes();
    let dim = mesh.radial_dimension();
    let mut stiffness = SymTridiagonal::zeros(n);
    let mut mass = vec![0.0; n];
    for (e, (a, b)) in mesh.cells().enumerate() {
        let h = b - a;
        let k = weight_cell_integral((a, b), alpha, dim)? / (h * h);
        stiffness.diag[e] += k;
        stiffness.diag[e + 1] += k;
        stiffness.off[e] = -k;
        let (ml, mr) = lumped_cell_mass(a, b, dim);
        mass[e] += ml;
        mass[e + 1] += mr;
    }
    Ok(WeightedOperator {
        mesh: mesh.clone(),
        alpha,
        stiffness,
        mass,
        linear_tol: 1e-12,
        factors: RwLock::new(Vec::new()),
    })
}

impl WeightedOperator {
    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    pub fn stiffness(&self) -> &SymTridiagonal {
        &self.stiffness
    }

    /// Diagonal of the lumped mass matrix.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn linear_tol(&self) -> f64 {
        self.linear_tol
    }

    pub fn set_linear_tol(&mut self, tol: f64) {
        self.linear_tol = tol;
    }

    /// `|Ω|` in the lumped measure; equals `1ᵀM1`.
    pub fn domain_measure(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// `1ᵀ M v`, the discrete integral of a nodal function.
    pub fn integrate(&self, v: &[f64]) -> f64 {
        dot(&self.mass, v)
    }

    pub fn mean(&self, v: &[f64]) -> f64 {
        self.integrate(v) / self.domain_measure()
    }

    /// `aᵀ M b`.
    pub fn mass_inner(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).zip(&self.mass).map(|((x, y), m)| x * y * m).sum()
    }

    pub fn apply_mass(&self, v: &[f64]) -> Vec<f64> {
        v.iter().zip(&self.mass).map(|(x, m)| x * m).collect()
    }

    pub fn apply_stiffness(&self, v: &[f64]) -> Vec<f64> {
        self.stiffness.matvec(v)
    }

    /// `K + c M` as a symmetric tridiagonal matrix.
    pub fn shifted_matrix(&self, c: f64) -> SymTridiagonal {
        let d: Vec<f64> = self.mass.iter().map(|m| c * m).collect();
        self.stiffness.plus_diagonal(&d)
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Cached Cholesky factor of `K + cM`; the flag reports a cache hit.
    pub fn shifted_factor(&self, c: f64) -> Result<(Arc<BandCholesky>, bool)> {
        let key = c.to_bits();
        if let Some((_, f)) = self.factors.read().unwrap().iter().find(|(k, _)| *k == key) {
            return Ok((Arc::clone(f), true));
        }
        let factor = Arc::new(BandCholesky::factor(&self.shifted_matrix(c))?);
        let mut cache = self.factors.write().unwrap();
        if cache.len() >= FACTOR_CACHE_CAPACITY {
            cache.remove(0);
        }
        cache.push((key, Arc::clone(&factor)));
        Ok((factor, false))
    }

    /// Solves `(K + cM) w = M v`, i.e. `w = T v` for the shift `c`.
    pub fn solve_shifted(&self, c: f64, v: &[f64]) -> Result<LinearSolveReport> {
        self.check_dim(v)?;
        if !(c > 0.0) {
            return Err(Error::NotPositiveDefinite { row: 0, pivot: c });
        }
        let (factor, reused) = self.shifted_factor(c)?;
        let rhs = self.apply_mass(v);
        let mut w = rhs.clone();
        factor.solve_in_place(&mut w);

        let a = self.shifted_matrix(c);
        let aw = a.matvec(&w);
        let r = aw.iter().zip(&rhs).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        let denom = a.norm_inf() * norm_inf(&w) + norm_inf(&rhs);
        let residual_norm = if denom > 0.0 { r / denom } else { 0.0 };
        if !(residual_norm <= self.linear_tol) {
            return Err(Error::LinearResidual {
                residual: residual_norm,
                tolerance: self.linear_tol,
            });
        }
        Ok(LinearSolveReport {
            solution: w,
            residual_norm,
            factorization_reused: reused,
        })
    }

    /// `√(uᵀKu + uᵀMu)`.
    pub fn norm_alpha(&self, u: &[f64]) -> Result<f64> {
        self.check_dim(u)?;
        let ku = self.stiffness.matvec(u);
        Ok((dot(u, &ku).max(0.0) + self.mass_inner(u, u)).sqrt())
    }

    /// Removes the constant component in the `M` inner product.
    pub fn deflate_constants(&self, v: &mut [f64]) {
        let m = self.mean(v);
        for x in v.iter_mut() {
            *x -= m;
        }
    }

    /// Smallest eigenvalue of `Ku = μMu` on the `M`-orthogonal complement of the
    /// constants, by shifted inverse iteration with explicit constant deflation.
    pub fn smallest_nonzero_eigenvalue(&self, opts: &EigenOptions) -> Result<f64> {
        let n = self.dim();
        let nodes = self.mesh.nodes();
        let (a, b) = self.mesh.interval();
        let mut x: Vec<f64> = nodes
            .iter()
            .enumerate()
            .map(|(i, &xi)| {
                // ramp plus a deterministic scramble so no mode starts with zero weight
                let s = ((i as f64 + 1.0) * 12.9898).sin() * 43758.5453;
                (xi - a) / (b - a) + 1e-2 * (s - s.floor() - 0.5)
            })
            .collect();
        self.deflate_constants(&mut x);
        let rayleigh = |v: &[f64]| dot(v, &self.stiffness.matvec(v)) / self.mass_inner(v, v);
        let shift = 0.1 * rayleigh(&x);
        let factor = BandCholesky::factor(&self.shifted_matrix(shift))?;

        let mut lambda = rayleigh(&x);
        for _ in 0..opts.max_iters {
            let mut y = self.apply_mass(&x);
            factor.solve_in_place(&mut y);
            self.deflate_constants(&mut y);
            let norm = self.mass_inner(&y, &y).sqrt();
            if !(norm > 0.0) || n < 2 {
                return Err(Error::EigenNotConverged { iterations: 0 });
            }
            for v in y.iter_mut() {
                *v /= norm;
            }
            x = y;
            let next = rayleigh(&x);
            let done = (next - lambda).abs() <= 1e-2 * opts.rel_tol * next.abs();
            lambda = next;
            if done {
                return Ok(lambda);
            }
        }
        Err(Error::EigenNotConverged {
            iterations: opts.max_iters,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub rel_tol: f64,
    pub max_iters: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            max_iters: 10_000,
        }
    }
}
