//! Graded one-dimensional meshes and exact cell moments of the weight `|x|^alpha`.
//!
//! The degeneracy point of the weight is always `x = 0`. Whenever `0` lies in the
//! closed interval it is forced to be a node, so every cell carries a one-signed
//! weight and the moments below are exact closed forms.
//!
//! A mesh with `radial_dimension = N > 1` lives on `[0, r]` and represents radial
//! functions on the `N`-dimensional ball; every cell integral then carries the extra
//! factor `x^(N-1)` from the radial measure.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    nodes: Vec<f64>,
    interval: (f64, f64),
    grading_exponent: f64,
    radial_dimension: u32,
}

impl Mesh {
    /// Node coordinates, strictly increasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_cells(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn grading_exponent(&self) -> f64 {
        self.grading_exponent
    }

    pub fn radial_dimension(&self) -> u32 {
        self.radial_dimension
    }

    /// The point where the weight vanishes.
    pub fn degeneracy_point(&self) -> f64 {
        0.0
    }

    /// Consecutive node pairs.
    pub fn cells(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.nodes.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn max_cell_width(&self) -> f64 {
        self.cells().map(|(a, b)| b - a).fold(0.0, f64::max)
    }

    pub fn min_cell_width(&self) -> f64 {
        self.cells().map(|(a, b)| b - a).fold(f64::INFINITY, f64::min)
    }

    /// Measure of the domain in the (possibly radial) reduced measure `x^(N-1) dx`.
    pub fn measure(&self) -> f64 {
        let p = f64::from(self.radial_dimension - 1);
        self.cells().map(|(a, b)| power_moment(a, b, p)).sum()
    }

    /// Index of the node closest to `x`.
    pub fn nearest_node(&self, x: f64) -> usize {
        let mut best = 0;
        for (i, &xi) in self.nodes.iter().enumerate() {
            if (xi - x).abs() < (self.nodes[best] - x).abs() {
                best = i;
            }
        }
        best
    }

    /// Plain-text table `index<TAB>coordinate` with a one-line header.
    pub fn to_table(&self) -> String {
        let mut out = String::from("index\tx\n");
        for (i, x) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "{i}\t{x:.15e}");
        }
        out
    }
}

/// Builds a mesh on `interval` with `n_cells` cells whose nodes accumulate toward the
/// degeneracy point as `|xi|^grading_exponent` of a uniform parameter `xi`.
///
/// If `0` lies strictly inside the interval the cells are split between the two sides
/// in proportion to their lengths and `0` becomes a node. If the interval does not
/// contain `0`, grading is toward the endpoint nearest to it.
pub fn build_mesh(
    interval: (f64, f64),
    n_cells: usize,
    grading_exponent: f64,
    radial_dimension: u32,
) -> Result<Mesh> {
    let (a, b) = interval;
    if n_cells < 2 {
        return Err(Error::InvalidMesh(format!("need at least 2 cells, got {n_cells}")));
    }
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::InvalidMesh(format!("interval ({a}, {b}) is not a nondegenerate interval")));
    }
    if !(grading_exponent.is_finite() && grading_exponent >= 1.0) {
        return Err(Error::InvalidMesh(format!("grading exponent {grading_exponent} must be >= 1")));
    }
    if radial_dimension == 0 {
        return Err(Error::InvalidMesh("radial dimension must be >= 1".into()));
    }
    if radial_dimension > 1 && a != 0.0 {
        return Err(Error::InvalidMesh(format!(
            "radial mesh (N = {radial_dimension}) must start at 0, got x_left = {a}"
        )));
    }

    let graded = |xi: f64| xi.powf(grading_exponent);
    let mut nodes = Vec::with_capacity(n_cells + 1);
    if a < 0.0 && b > 0.0 {
        let share = (n_cells as f64 * (-a) / (b - a)).round() as usize;
        let n_left = share.clamp(1, n_cells - 1);
        let n_right = n_cells - n_left;
        for k in 0..n_left {
            let xi = (n_left - k) as f64 / n_left as f64;
            nodes.push(a * graded(xi));
        }
        nodes.push(0.0);
        for k in 1..=n_right {
            let xi = k as f64 / n_right as f64;
            nodes.push(b * graded(xi));
        }
    } else if a >= 0.0 {
        for k in 0..=n_cells {
            let xi = k as f64 / n_cells as f64;
            nodes.push(a + (b - a) * graded(xi));
        }
    } else {
        for k in 0..=n_cells {
            let xi = (n_cells - k) as f64 / n_cells as f64;
            nodes.push(b - (b - a) * graded(xi));
        }
    }
    nodes[0] = a;
    nodes[n_cells] = b;

    if let Some(w) = nodes.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::InvalidMesh(format!(
            "grading produced coincident nodes near {} (too many cells for f64 resolution)",
            w[0]
        )));
    }

    Ok(Mesh {
        nodes,
        interval,
        grading_exponent,
        radial_dimension,
    })
}

/// `∫_a^b |x|^p dx` for a cell that does not straddle 0, computed without cancellation.
pub(crate) fn power_moment(a: f64, b: f64, p: f64) -> f64 {
    let (lo, hi) = if b <= 0.0 { (-b, -a) } else { (a, b) };
    let q = p + 1.0;
    if lo == 0.0 {
        hi.powf(q) / q
    } else {
        hi.powf(q) * -(q * (lo / hi).ln()).exp_m1() / q
    }
}

/// Exact integral of `|x|^alpha · |x|^(N-1)` over `cell`.
pub fn weight_cell_integral(cell: (f64, f64), alpha: f64, radial_dimension: u32) -> Result<f64> {
    let (a, b) = cell;
    if !(0.0..2.0).contains(&alpha) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if a < 0.0 && b > 0.0 {
        return Err(Error::StraddlingCell(a, b));
    }
    if !(a < b) {
        return Err(Error::InvalidMesh(format!("cell ({a}, {b}) is empty or inverted")));
    }
    if radial_dimension == 0 || (radial_dimension > 1 && a < 0.0) {
        return Err(Error::InvalidMesh(format!(
            "radial dimension {radial_dimension} needs a nonnegative cell, got ({a}, {b})"
        )));
    }
    Ok(power_moment(a, b, alpha + f64::from(radial_dimension - 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn uniform_mesh_forces_zero_node() {
        let mesh = build_mesh((-1.0, 1.0), 4, 1.0, 1).unwrap();
        assert_eq!(mesh.nodes(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn quadratic_grading_toward_left_endpoint() {
        let mesh = build_mesh((0.0, 1.0), 2, 2.0, 1).unwrap();
        assert_eq!(mesh.nodes(), &[0.0, 0.25, 1.0]);
    }

    #[test]
    fn radial_mesh_accepted_at_origin() {
        let mesh = build_mesh((0.0, 1.0), 100, 2.0, 3).unwrap();
        assert_eq!(mesh.radial_dimension(), 3);
        assert_eq!(mesh.n_cells(), 100);
    }

    #[test]
    fn rejects_bad_meshes() {
        assert!(build_mesh((0.0, 1.0), 1, 1.0, 1).is_err());
        assert!(build_mesh((1.0, 0.0), 4, 1.0, 1).is_err());
        assert!(build_mesh((0.5, 0.5), 4, 1.0, 1).is_err());
        assert!(build_mesh((-1.0, 1.0), 4, 1.0, 2).is_err());
        assert!(build_mesh((0.0, 1.0), 4, 0.5, 1).is_err());
    }

    #[test]
    fn zero_is_a_node_for_asymmetric_interval() {
        let mesh = build_mesh((-0.3, 1.0), 17, 2.0, 1).unwrap();
        assert!(mesh.nodes().contains(&0.0));
        assert!(mesh.cells().all(|(a, b)| !(a < 0.0 && b > 0.0)));
    }

    #[test]
    fn negative_interval_grades_toward_right_end() {
        let mesh = build_mesh((-2.0, -1.0), 4, 2.0, 1).unwrap();
        let w: Vec<f64> = mesh.cells().map(|(a, b)| b - a).collect();
        assert!(w.windows(2).all(|p| p[1] < p[0]));
        assert_eq!(mesh.nodes()[4], -1.0);
    }

    #[test]
    fn cell_integrals_match_closed_forms() {
        assert_relative_eq!(weight_cell_integral((0.0, 1.0), 0.5, 1).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        let h: f64 = 0.37;
        let alpha = 1.3;
        assert_relative_eq!(
            weight_cell_integral((0.0, h), alpha, 1).unwrap(),
            h.powf(alpha + 1.0) / (alpha + 1.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(weight_cell_integral((-1.0, -0.5), 1.0, 1).unwrap(), 0.375, epsilon = 1e-15);
    }

    #[test]
    fn negative_cell_matches_composite_simpson() {
        // independent check of the mirrored branch
        let (a, b) = (-1.0f64, -0.5f64);
        let m = 2000;
        let hh = (b - a) / m as f64;
        let f = |x: f64| x.abs();
        let mut s = f(a) + f(b);
        for i in 1..m {
            let x = a + i as f64 * hh;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        let simpson = s * hh / 3.0;
        assert_relative_eq!(weight_cell_integral((a, b), 1.0, 1).unwrap(), simpson, max_relative = 1e-12);
    }

    #[test]
    fn cell_integral_errors() {
        assert!(matches!(weight_cell_integral((-1.0, 1.0), 0.5, 1), Err(Error::StraddlingCell(..))));
        assert!(matches!(weight_cell_integral((0.0, 1.0), 2.0, 1), Err(Error::InvalidAlpha(_))));
        assert!(matches!(weight_cell_integral((0.0, 1.0), -0.1, 1), Err(Error::InvalidAlpha(_))));
    }

    #[test]
    fn mesh_table_has_header_and_rows() {
        let mesh = build_mesh((0.0, 1.0), 2, 1.0, 1).unwrap();
        let table = mesh.to_table();
        assert_eq!(table.lines().count(), 4);
        assert!(table.starts_with("index\tx\n0\t"));
    }

    proptest! {
        #[test]
        fn weight_moments_sum_to_total(alpha in 0.0f64..2.0, n in 2usize..300, grading in 1.0f64..3.0, dim in 1u32..4) {
            let mesh = build_mesh((0.0, 1.0), n, grading, dim).unwrap();
            let total: f64 = mesh.cells().map(|c| weight_cell_integral(c, alpha, dim).unwrap()).sum();
            let exact = 1.0 / (alpha + f64::from(dim));
            prop_assert!(((total - exact) / exact).abs() < 1e-12);
        }

        #[test]
        fn uniform_refinement_nests(n in 1usize..200) {
            for interval in [(0.0, 1.0), (-1.0, 1.0), (-3.0, -1.0)] {
                let coarse = build_mesh(interval, 2 * n, 1.0, 1).unwrap();
                let fine = build_mesh(interval, 4 * n, 1.0, 1).unwrap();
                for (i, x) in coarse.nodes().iter().enumerate() {
                    prop_assert_eq!(*x, fine.nodes()[2 * i]);
                }
            }
        }
    }
}
