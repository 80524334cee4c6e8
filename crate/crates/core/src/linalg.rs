//! Tridiagonal kernels: band Cholesky for the SPD shifted operator, LU with partial
//! pivoting for indefinite Jacobians, and a bordered solver for continuation systems.

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix; `off[i]` couples rows `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
    }

    /// `self + diag(d)`.
    pub fn plus_diagonal(&self, d: &[f64]) -> Self {
        Self {
            diag: self.diag.iter().zip(d).map(|(a, b)| a + b).collect(),
            off: self.off.clone(),
        }
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
            if i + 1 < n {
                a[i][i + 1] = self.off[i];
                a[i + 1][i] = self.off[i];
            }
        }
        a
    }

    /// Coordinate-format dump `row col value` (0-based), both triangles.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = String::new();
        let n = self.dim();
        for i in 0..n {
            if i > 0 {
                out.push_str(&format!("{} {} {:.17e}\n", i, i - 1, self.off[i - 1]));
            }
            out.push_str(&format!("{} {} {:.17e}\n", i, i, self.diag[i]));
            if i + 1 < n {
                out.push_str(&format!("{} {} {:.17e}\n", i, i + 1, self.off[i]));
            }
        }
        out
    }
}

/// Cholesky factor `L` of an SPD tridiagonal matrix (bandwidth one).
#[derive(Debug, Clone)]
pub struct BandCholesky {
    diag: Vec<f64>,
    sub: Vec<f64>,
}

impl BandCholesky {
    pub fn factor(a: &SymTridiagonal) -> Result<Self> {
        let n = a.dim();
        let mut diag = vec![0.0; n];
        let mut sub = vec![0.0; n.saturating_sub(1)];
        for i in 0..n {
            let mut d = a.diag[i];
            if i > 0 {
                d -= sub[i - 1] * sub[i - 1];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { row: i, pivot: d });
            }
            diag[i] = d.sqrt();
            if i + 1 < n {
                sub[i] = a.off[i] / diag[i];
            }
        }
        Ok(Self { diag, sub })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            if i > 0 {
                x[i] -= self.sub[i - 1] * x[i - 1];
            }
            x[i] /= self.diag[i];
        }
        for i in (0..n).rev() {
            if i + 1 < n {
                x[i] -= self.sub[i] * x[i + 1];
            }
            x[i] /= self.diag[i];
        }
    }
}

/// LU factorization with partial pivoting of a tridiagonal matrix. `U` has two
/// superdiagonals after row interchanges.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    /// Factors the matrix with subdiagonal `sub`, diagonal `diag`, superdiagonal `sup`.
    pub fn factor(sub: &[f64], diag: &[f64], sup: &[f64]) -> Self {
        let n = diag.len();
        let mut u0 = diag.to_vec();
        let mut u1: Vec<f64> = (0..n).map(|i| if i + 1 < n { sup[i] } else { 0.0 }).collect();
        let mut u2 = vec![0.0; n];
        let mut lower: Vec<f64> = sub.to_vec();
        let mut mult = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for k in 0..n.saturating_sub(1) {
            // rows k and k+1 compete for the pivot in column k
            if lower[k].abs() > u0[k].abs() {
                swapped[k] = true;
                let (r0, r1, r2) = (u0[k], u1[k], u2[k]);
                u0[k] = lower[k];
                u1[k] = u0[k + 1];
                u2[k] = u1[k + 1];
                lower[k] = r0;
                u0[k + 1] = r1;
                u1[k + 1] = r2;
            }
            let m = if u0[k] != 0.0 { lower[k] / u0[k] } else { 0.0 };
            mult[k] = m;
            u0[k + 1] -= m * u1[k];
            u1[k + 1] -= m * u2[k];
        }
        Self {
            u0,
            u1,
            u2,
            mult,
            swapped,
        }
    }

    pub fn factor_symmetric(a: &SymTridiagonal) -> Self {
        Self::factor(&a.off, &a.diag, &a.off)
    }

    pub fn dim(&self) -> usize {
        self.u0.len()
    }

    /// Diagonal of `U`.
    pub fn pivots(&self) -> &[f64] {
        &self.u0
    }

    /// Sign of the determinant: `+1`, `-1`, or `0` when a pivot vanishes.
    pub fn det_sign(&self) -> i32 {
        let mut sign = if self.swapped.iter().filter(|&&s| s).count() % 2 == 0 { 1 } else { -1 };
        for &p in &self.u0 {
            if p == 0.0 {
                return 0;
            }
            if p < 0.0 {
                sign = -sign;
            }
        }
        sign
    }

    /// Ratio of the smallest to the largest pivot magnitude.
    pub fn pivot_ratio(&self) -> f64 {
        let max = self.u0.iter().fold(0.0f64, |m, p| m.max(p.abs()));
        let min = self.u0.iter().fold(f64::INFINITY, |m, p| m.min(p.abs()));
        if max == 0.0 {
            0.0
        } else {
            min / max
        }
    }

    pub fn solve_in_place(&self, x: &mut [f64]) -> Result<()> {
        let n = self.dim();
        for k in 0..n.saturating_sub(1) {
            if self.swapped[k] {
                x.swap(k, k + 1);
            }
            x[k + 1] -= self.mult[k] * x[k];
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            if k + 1 < n {
                s -= self.u1[k] * x[k + 1];
            }
            if k + 2 < n {
                s -= self.u2[k] * x[k + 2];
            }
            if self.u0[k] == 0.0 {
                return Err(Error::Singular { row: k });
            }
            x[k] = s / self.u0[k];
        }
        if x.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Singular { row: n.saturating_sub(1) })
        }
    }
}

/// Solves the bordered system
///
/// ```text
/// [ A    col ] [x]   [rhs     ]
/// [ rowᵀ d   ] [y] = [rhs_last]
/// ```
///
/// with `A` symmetric tridiagonal. Elimination pivots between adjacent rows of `A`
/// and lets the border row compete only for the last column of `A`, which keeps the
/// band structure. For an irreducible `A` (nonzero off-diagonals) a rank deficiency
/// of `A` can only surface in that last column, so a singular `A` with a
/// nonsingular bordered matrix is handled.
pub fn solve_bordered(
    a: &SymTridiagonal,
    col: &[f64],
    row: &[f64],
    corner: f64,
    rhs: &[f64],
    rhs_last: f64,
) -> Result<(Vec<f64>, f64)> {
    let n = a.dim();
    // pivot rows of U: entries at columns k, k+1, k+2 plus the border column
    let mut u = vec![[0.0f64; 3]; n];
    let mut ub = vec![0.0; n];
    let mut ur = vec![0.0; n];

    let mut brow = row.to_vec();
    brow.push(0.0);
    brow.push(0.0);
    let mut bcorner = corner;
    let mut brhs = rhs_last;

    // the current (not yet pivoted) row, stored relative to column k
    let mut cur = [a.diag[0], if n > 1 { a.off[0] } else { 0.0 }, 0.0];
    let mut cur_b = col[0];
    let mut cur_r = rhs[0];

    for k in 0..n {
        if k + 1 < n {
            let mut next = [a.off[k], a.diag[k + 1], if k + 2 < n { a.off[k + 1] } else { 0.0 }];
            let mut next_b = col[k + 1];
            let mut next_r = rhs[k + 1];
            if next[0].abs() > cur[0].abs() {
                std::mem::swap(&mut cur, &mut next);
                std::mem::swap(&mut cur_b, &mut next_b);
                std::mem::swap(&mut cur_r, &mut next_r);
            }
            if cur[0] == 0.0 {
                return Err(Error::Singular { row: k });
            }
            let m = next[0] / cur[0];
            for j in 0..3 {
                next[j] -= m * cur[j];
            }
            next_b -= m * cur_b;
            next_r -= m * cur_r;

            let mb = brow[k] / cur[0];
            brow[k + 1] -= mb * cur[1];
            brow[k + 2] -= mb * cur[2];
            bcorner -= mb * cur_b;
            brhs -= mb * cur_r;

            u[k] = cur;
            ub[k] = cur_b;
            ur[k] = cur_r;
            cur = [next[1], next[2], 0.0];
            cur_b = next_b;
            cur_r = next_r;
        } else {
            // last column of A: the border row may take the pivot
            if brow[k].abs() > cur[0].abs() {
                let (c0, cb, cr) = (cur[0], cur_b, cur_r);
                cur = [brow[k], 0.0, 0.0];
                cur_b = bcorner;
                cur_r = brhs;
                brow[k] = c0;
                bcorner = cb;
                brhs = cr;
            }
            if cur[0] == 0.0 {
                return Err(Error::Singular { row: k });
            }
            let mb = brow[k] / cur[0];
            bcorner -= mb * cur_b;
            brhs -= mb * cur_r;
            u[k] = cur;
            ub[k] = cur_b;
            ur[k] = cur_r;
        }
    }

    if bcorner == 0.0 {
        return Err(Error::Singular { row: n });
    }
    let y = brhs / bcorner;
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = ur[k] - ub[k] * y;
        if k + 1 < n {
            s -= u[k][1] * x[k + 1];
        }
        if k + 2 < n {
            s -= u[k][2] * x[k + 2];
        }
        x[k] = s / u[k][0];
    }
    if !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular { row: n });
    }
    Ok((x, y))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}
