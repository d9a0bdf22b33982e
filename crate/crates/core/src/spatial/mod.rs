//! Tensor-product grids on boxes, diffusion laws and the finite-difference
//! quasilinear operator `−div(a(u)∇u)` with Dirichlet rows.

mod law;
mod operator;

pub use law::{ellipticity_check, DiffusionLaw, EllipticityReport, LawKind};
pub use operator::{
    assemble_jacobian, assemble_quasilinear_operator, dirichlet_form, poincare_lambda1,
    PoincareEstimate,
};

use crate::{Error, Result};

/// Nodal values on a [`SpatialGrid`], x-index fastest.
pub type Field = Vec<f64>;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpatialGrid {
    extents: Vec<(f64, f64)>,
    points: Vec<usize>,
    spacing: Vec<f64>,
}

/// Smallest admissible number of points per axis (three interior nodes).
pub const MIN_POINTS: usize = 5;

impl SpatialGrid {
    /// Uniform grid with `points[i]` nodes (boundary included) on `extents[i]`.
    pub fn new(extents: &[(f64, f64)], points: &[usize]) -> Result<Self> {
        if extents.is_empty() || extents.len() > 2 {
            return Err(Error::Grid(format!("dimension must be 1 or 2, got {}", extents.len())));
        }
        if extents.len() != points.len() {
            return Err(Error::Grid("one resolution per axis required".into()));
        }
        for (axis, (&(a, b), &p)) in extents.iter().zip(points).enumerate() {
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(Error::Grid(format!("degenerate extent ({a}, {b}) on axis {axis}")));
            }
            if p < MIN_POINTS {
                return Err(Error::Grid(format!(
                    "axis {axis} needs at least {MIN_POINTS} points, got {p}"
                )));
            }
        }
        let spacing = extents
            .iter()
            .zip(points)
            .map(|(&(a, b), &p)| (b - a) / (p - 1) as f64)
            .collect();
        Ok(Self { extents: extents.to_vec(), points: points.to_vec(), spacing })
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[(f64, f64)] {
        &self.extents
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Per-axis index of node `idx`.
    pub fn multi_index(&self, idx: usize) -> [usize; 2] {
        let nx = self.points[0];
        [idx % nx, idx / nx]
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.points[0] * j
    }

    pub fn coordinate(&self, idx: usize) -> [f64; 2] {
        let [i, j] = self.multi_index(idx);
        let x = self.axis_coordinate(0, i);
        let y = if self.dim() == 2 { self.axis_coordinate(1, j) } else { 0.0 };
        [x, y]
    }

    fn axis_coordinate(&self, axis: usize, i: usize) -> f64 {
        let (a, b) = self.extents[axis];
        if i + 1 == self.points[axis] {
            b
        } else {
            a + i as f64 * self.spacing[axis]
        }
    }

    pub fn axis_nodes(&self, axis: usize) -> Vec<f64> {
        (0..self.points[axis]).map(|i| self.axis_coordinate(axis, i)).collect()
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        let mi = self.multi_index(idx);
        (0..self.dim()).any(|ax| mi[ax] == 0 || mi[ax] + 1 == self.points[ax])
    }

    pub fn boundary_mask(&self) -> Vec<bool> {
        (0..self.len()).map(|i| self.is_boundary(i)).collect()
    }

    /// Trapezoidal quadrature weights.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        (0..self.len())
            .map(|idx| {
                let mi = self.multi_index(idx);
                (0..self.dim())
                    .map(|ax| {
                        let edge = mi[ax] == 0 || mi[ax] + 1 == self.points[ax];
                        if edge {
                            0.5 * self.spacing[ax]
                        } else {
                            self.spacing[ax]
                        }
                    })
                    .product()
            })
            .collect()
    }

    /// Samples `f` at every node.
    pub fn sample(&self, f: impl Fn([f64; 2]) -> f64) -> Field {
        (0..self.len()).map(|i| f(self.coordinate(i))).collect()
    }

    /// Neighbour pairs `(i, j, h)` with `j` the next node along an axis.
    pub(crate) fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let nx = self.points[0];
        (0..self.len()).flat_map(move |idx| {
            let [i, j] = self.multi_index(idx);
            let mut out = [None, None];
            if i + 1 < nx {
                out[0] = Some((idx, idx + 1, self.spacing[0]));
            }
            if self.dim() == 2 && j + 1 < self.points[1] {
                out[1] = Some((idx, idx + nx, self.spacing[1]));
            }
            out.into_iter().flatten()
        })
    }

    pub(crate) fn bandwidth(&self) -> usize {
        if self.dim() == 1 {
            1
        } else {
            self.points[0]
        }
    }
}

/// Builds a tensor-product grid; `resolution` counts nodes per axis.
pub fn build_grid(extents: &[(f64, f64)], resolution: &[usize]) -> Result<SpatialGrid> {
    SpatialGrid::new(extents, resolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn one_dimensional_nodes() {
        let g = build_grid(&[(0.0, PI)], &[5]).unwrap();
        let x = g.axis_nodes(0);
        let expect = [0.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0, PI];
        for (a, b) in x.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(g.boundary_mask().iter().filter(|&&b| b).count(), 2);
    }

    #[test]
    fn two_dimensional_counts() {
        let g = build_grid(&[(0.0, PI), (0.0, PI)], &[9, 9]).unwrap();
        assert_eq!(g.len(), 81);
        assert_eq!(g.boundary_mask().iter().filter(|&&b| b).count(), 32);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(build_grid(&[(0.0, 1.0)], &[2]).is_err());
        assert!(build_grid(&[(1.0, 1.0)], &[9]).is_err());
        assert!(build_grid(&[(0.0, 1.0); 3], &[9; 3]).is_err());
        assert!(build_grid(&[(0.0, 1.0)], &[9, 9]).is_err());
    }

    #[test]
    fn quadrature_integrates_area() {
        let g = build_grid(&[(0.0, 2.0), (-1.0, 2.0)], &[7, 11]).unwrap();
        let area: f64 = g.quadrature_weights().iter().sum();
        assert!((area - 6.0).abs() < 1e-13);
    }
}
