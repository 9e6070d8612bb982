//! Nodal recovery of plastic strain increments and evaluation of the
//! effective plastic strain gradient.
//!
//! After each converged increment, the plastic strain increments known at
//! the quadrature points are linearly interpolated over the whole model
//! (Delaunay triangulation of the quadrature-point cloud) and sampled at
//! the nodal locations. Differentiating the accumulated nodal field
//! through the element shape functions then yields the plastic strain
//! gradient, and from it the effective gradient, at every quadrature
//! point for the next increment.

use crate::elements::physical_gradients;
use crate::interp::ScatteredInterp;
use crate::material::{effective_gradient, gradient_tensor};
use crate::mesh::Mesh;
use crate::tensor::SymTensor2;

/// Nodal field of one tensor component set recovered from Gauss data.
pub struct RecoveredField {
    /// Per-node tensor values.
    pub nodal: Vec<SymTensor2>,
    /// Per-node flag: true when the value came from inside the
    /// interpolation hull.
    pub inside: Vec<bool>,
}

/// Samples per-Gauss tensor values at the nodes. Nodes outside the cloud
/// hull use a linear extension of the nearest triangle (exact for linear
/// fields); with a degenerate cloud every node is flagged and zeroed.
pub fn recover_nodal_increments(
    mesh: &Mesh,
    gp_pos: &[[f64; 2]],
    gp_vals: &[SymTensor2],
) -> RecoveredField {
    let n = mesh.n_nodes();
    let interp = match ScatteredInterp::new(gp_pos.to_vec()) {
        Some(i) => i,
        None => {
            return RecoveredField {
                nodal: vec![SymTensor2::ZERO; n],
                inside: vec![false; n],
            }
        }
    };
    let comps: [Vec<f64>; 4] = [
        gp_vals.iter().map(|t| t.xx).collect(),
        gp_vals.iter().map(|t| t.yy).collect(),
        gp_vals.iter().map(|t| t.zz).collect(),
        gp_vals.iter().map(|t| t.xy).collect(),
    ];
    let mut nodal = vec![SymTensor2::ZERO; n];
    let mut inside = vec![true; n];
    for node in 0..n {
        let p = mesh.coords[node];
        let mut vals = [0.0; 4];
        for (c, comp) in comps.iter().enumerate() {
            let s = interp.sample_extrapolate(p, comp);
            vals[c] = s.value;
            inside[node] &= s.inside;
        }
        nodal[node] = SymTensor2::from_array(vals);
    }
    RecoveredField { nodal, inside }
}

/// In-plane gradient of a nodal tensor field at a reference point of one
/// element: returns (d/dx, d/dy) of the tensor.
pub fn nodal_field_gradient(
    mesh: &Mesh,
    elem: usize,
    xi: f64,
    eta: f64,
    nodal: &[SymTensor2],
) -> (SymTensor2, SymTensor2) {
    let conn = &mesh.elems[elem];
    let coords: Vec<[f64; 2]> = conn.iter().map(|&n| mesh.coords[n]).collect();
    let (_, grads) = physical_gradients(mesh.order, xi, eta, &coords)
        .expect("gradient recovery on a valid element");
    let mut dx = SymTensor2::ZERO;
    let mut dy = SymTensor2::ZERO;
    for (a, &node) in conn.iter().enumerate() {
        dx += nodal[node].scale(grads[a][0]);
        dy += nodal[node].scale(grads[a][1]);
    }
    (dx, dy)
}

/// Effective plastic strain gradient from the recovered nodal field at a
/// quadrature point.
pub fn eta_p_at(
    mesh: &Mesh,
    elem: usize,
    xi: f64,
    eta: f64,
    nodal_total_eps_p: &[SymTensor2],
) -> f64 {
    let (dx, dy) = nodal_field_gradient(mesh, elem, xi, eta, nodal_total_eps_p);
    let tensor = gradient_tensor(&dx, &dy);
    effective_gradient(&tensor)
}
