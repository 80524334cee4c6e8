//! Manufactured-solution convergence study for the weighted operator.
//!
//! `u(x) = cos(πx)` on `(−1, 1)` satisfies the Neumann condition and solves
//! `−(|x|^α u')' + c·u = g` with
//! `g = πα|x|^{α−1} sign(x) sin(πx) + π²|x|^α cos(πx) + c·cos(πx)`.

use std::f64::consts::PI;

use crate::domain::build_mesh;
use crate::error::{Error, Result};
use crate::operators::assemble;

#[derive(Debug, Clone, PartialEq)]
pub struct MmsRow {
    pub n_cells: usize,
    pub h_max: f64,
    /// Lumped-mass discrete L² error at the nodes.
    pub l2_error: f64,
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmsReport {
    pub alpha: f64,
    pub grading: f64,
    pub shift: f64,
    pub rows: Vec<MmsRow>,
    /// `log2(e_k / e_{k+1})` between consecutive rows.
    pub rates: Vec<f64>,
}

impl MmsReport {
    pub fn min_rate(&self) -> f64 {
        self.rates.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn exact(x: f64) -> f64 {
    (PI * x).cos()
}

pub fn forcing(x: f64, alpha: f64, shift: f64) -> f64 {
    let transport = if x == 0.0 || alpha == 0.0 {
        0.0
    } else {
        PI * alpha * x.abs().powf(alpha - 1.0) * x.signum() * (PI * x).sin()
    };
    transport + PI * PI * x.abs().powf(alpha) * (PI * x).cos() + shift * (PI * x).cos()
}

/// Solves `(K + cM) u = M g` on graded meshes of `(−1, 1)` and reports errors and
/// observed rates. Consecutive entries of `n_list` must double.
pub fn manufactured_convergence(alpha: f64, grading: f64, n_list: &[usize], shift: f64) -> Result<MmsReport> {
    if n_list.len() < 2 {
        return Err(Error::InvalidOptions("need at least two mesh sizes".into()));
    }
    if n_list.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidOptions("mesh sizes must double".into()));
    }
    if !(shift > 0.0) {
        return Err(Error::InvalidOptions(format!("shift {shift} must be positive")));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let mesh = build_mesh((-1.0, 1.0), n, grading, 1)?;
        let op = assemble(&mesh, alpha)?;
        let g: Vec<f64> = mesh.nodes().iter().map(|&x| forcing(x, alpha, shift)).collect();
        let uh = op.solve_shifted(shift, &g)?.solution;
        let err: Vec<f64> = uh.iter().zip(mesh.nodes()).map(|(a, &x)| a - exact(x)).collect();
        rows.push(MmsRow {
            n_cells: n,
            h_max: mesh.max_cell_width(),
            l2_error: op.mass_inner(&err, &err).sqrt(),
            max_error: err.iter().fold(0.0f64, |m, e| m.max(e.abs())),
        });
    }
    let rates = rows
        .windows(2)
        .map(|w| (w[0].l2_error / w[1].l2_error).log2())
        .collect();
    Ok(MmsReport {
        alpha,
        grading,
        shift,
        rows,
        rates,
    })
}
