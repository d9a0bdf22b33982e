use std::f64::consts::PI;

use super::{DiffusionLaw, SpatialGrid};
use crate::banded::BandedMatrix;
use crate::{Error, Result};

fn check_finite(u: &[f64], grid: &SpatialGrid) -> Result<()> {
    if u.len() != grid.len() {
        return Err(Error::Contract(format!("field has {} values, grid has {} nodes", u.len(), grid.len())));
    }
    if let Some(i) = u.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite field value at node {i}")));
    }
    Ok(())
}

/// Divergence-form stencil of `−div(a(u)∇·)` frozen at `u`, with face
/// coefficients `a((u_i + u_j)/2)`. Boundary rows are identity rows.
pub fn assemble_quasilinear_operator(grid: &SpatialGrid, law: &DiffusionLaw, u: &[f64]) -> Result<BandedMatrix> {
    check_finite(u, grid)?;
    let boundary = grid.boundary_mask();
    let mut a = BandedMatrix::zeros(grid.len(), grid.bandwidth());
    for (i, j, h) in grid.edges() {
        let c = law.coefficient(0.5 * (u[i] + u[j])) / (h * h);
        if !boundary[i] {
            a.add(i, i, c);
            a.add(i, j, -c);
        }
        if !boundary[j] {
            a.add(j, j, c);
            a.add(j, i, -c);
        }
    }
    for (idx, &b) in boundary.iter().enumerate() {
        if b {
            a.set_identity_row(idx, 1.0);
        }
    }
    Ok(a)
}

/// Jacobian of `u ↦ A(u) u` on interior rows, including the `a′` terms of the
/// face coefficients. Boundary rows are identity rows.
pub fn assemble_jacobian(grid: &SpatialGrid, law: &DiffusionLaw, u: &[f64]) -> Result<BandedMatrix> {
    check_finite(u, grid)?;
    let boundary = grid.boundary_mask();
    let mut jac = BandedMatrix::zeros(grid.len(), grid.bandwidth());
    for (i, j, h) in grid.edges() {
        let m = 0.5 * (u[i] + u[j]);
        let h2 = h * h;
        let c = law.coefficient(m) / h2;
        let dc = 0.5 * law.derivative(m) / h2;
        // F_i ∋ c (u_i − u_j), F_j ∋ c (u_j − u_i)
        if !boundary[i] {
            let g = dc * (u[i] - u[j]);
            jac.add(i, i, c + g);
            jac.add(i, j, -c + g);
        }
        if !boundary[j] {
            let g = dc * (u[j] - u[i]);
            jac.add(j, j, c + g);
            jac.add(j, i, -c + g);
        }
    }
    for (idx, &b) in boundary.iter().enumerate() {
        if b {
            jac.set_identity_row(idx, 1.0);
        }
    }
    Ok(jac)
}

/// Discrete Dirichlet form `Σ_faces a(ū) (u_j − u_i)(η_j − η_i) / h² · |cell|`,
/// equal to `Σ_i |cell| η_i (A(u)u)_i` whenever `η` vanishes on the boundary.
pub fn dirichlet_form(grid: &SpatialGrid, law: &DiffusionLaw, u: &[f64], eta: &[f64]) -> f64 {
    let vol: f64 = grid.spacing().iter().product();
    grid.edges()
        .map(|(i, j, h)| law.coefficient(0.5 * (u[i] + u[j])) * (u[j] - u[i]) * (eta[j] - eta[i]) / (h * h))
        .sum::<f64>()
        * vol
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PoincareEstimate {
    /// `Σ_axes (π / L)²`.
    pub continuous: f64,
    /// Smallest eigenvalue of the assembled Laplacian's interior block.
    pub discrete: f64,
}

/// Smallest Dirichlet eigenvalue of `−Δ` on the box, with the discrete value
/// from inverse iteration on the a ≡ 1 operator.
pub fn poincare_lambda1(grid: &SpatialGrid) -> Result<PoincareEstimate> {
    let continuous = grid
        .extents()
        .iter()
        .map(|(a, b)| (PI / (b - a)).powi(2))
        .sum();
    let law = DiffusionLaw::constant(1.0);
    let zero = vec![0.0; grid.len()];
    let op = assemble_quasilinear_operator(grid, &law, &zero)?;
    let boundary = grid.boundary_mask();
    let mut x: Vec<f64> = boundary.iter().map(|&b| if b { 0.0 } else { 1.0 }).collect();
    let mut lambda = 0.0;
    for _ in 0..500 {
        let y = op.clone().solve(&x)?;
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        let next: Vec<f64> = y.iter().map(|v| v / norm).collect();
        let ax = op.matvec(&next);
        let rq = next.iter().zip(&ax).map(|(a, b)| a * b).sum::<f64>();
        x = next;
        if (rq - lambda).abs() <= 1e-15 * rq {
            lambda = rq;
            break;
        }
        lambda = rq;
    }
    Ok(PoincareEstimate { continuous, discrete: lambda })
}
