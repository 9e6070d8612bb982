//! Isoparametric quadrilateral shape functions, Gauss rules on the
//! reference square, and the inverse bilinear map used to pull physical
//! sub-triangle quadrature points back to reference coordinates.

use crate::error::{Error, Result};

/// 2x2 Gauss points on [-1,1]^2: (xi, eta, weight).
pub const GAUSS_2X2: &[(f64, f64, f64)] = &[
    (-0.577_350_269_189_625_8, -0.577_350_269_189_625_8, 1.0),
    (0.577_350_269_189_625_8, -0.577_350_269_189_625_8, 1.0),
    (0.577_350_269_189_625_8, 0.577_350_269_189_625_8, 1.0),
    (-0.577_350_269_189_625_8, 0.577_350_269_189_625_8, 1.0),
];

/// 3x3 Gauss points on [-1,1]^2.
pub fn gauss_3x3() -> Vec<(f64, f64, f64)> {
    let p = 0.774_596_669_241_483_4_f64;
    let w = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let x = [-p, 0.0, p];
    let mut out = Vec::with_capacity(9);
    for j in 0..3 {
        for i in 0..3 {
            out.push((x[i], x[j], w[i] * w[j]));
        }
    }
    out
}

/// Shape functions and reference-space gradients for the given order.
/// Returns (N, dN) with dN[a] = [dN_a/dxi, dN_a/deta].
pub fn shape_functions(order: u8, xi: f64, eta: f64) -> (Vec<f64>, Vec<[f64; 2]>) {
    match order {
        1 => {
            let n = vec![
                0.25 * (1.0 - xi) * (1.0 - eta),
                0.25 * (1.0 + xi) * (1.0 - eta),
                0.25 * (1.0 + xi) * (1.0 + eta),
                0.25 * (1.0 - xi) * (1.0 + eta),
            ];
            let d = vec![
                [-0.25 * (1.0 - eta), -0.25 * (1.0 - xi)],
                [0.25 * (1.0 - eta), -0.25 * (1.0 + xi)],
                [0.25 * (1.0 + eta), 0.25 * (1.0 + xi)],
                [-0.25 * (1.0 + eta), 0.25 * (1.0 - xi)],
            ];
            (n, d)
        }
        2 => {
            // Serendipity 8-node: corners then midsides (bottom, right, top, left).
            let corner_xi = [-1.0, 1.0, 1.0, -1.0];
            let corner_eta = [-1.0, -1.0, 1.0, 1.0];
            let mut n = vec![0.0; 8];
            let mut d = vec![[0.0; 2]; 8];
            for a in 0..4 {
                let sx = corner_xi[a];
                let se = corner_eta[a];
                n[a] = 0.25 * (1.0 + sx * xi) * (1.0 + se * eta) * (sx * xi + se * eta - 1.0);
                d[a][0] = 0.25 * sx * (1.0 + se * eta) * (2.0 * sx * xi + se * eta);
                d[a][1] = 0.25 * se * (1.0 + sx * xi) * (sx * xi + 2.0 * se * eta);
            }
            // midside 4: (0,-1); 5: (1,0); 6: (0,1); 7: (-1,0)
            n[4] = 0.5 * (1.0 - xi * xi) * (1.0 - eta);
            d[4] = [-xi * (1.0 - eta), -0.5 * (1.0 - xi * xi)];
            n[5] = 0.5 * (1.0 + xi) * (1.0 - eta * eta);
            d[5] = [0.5 * (1.0 - eta * eta), -eta * (1.0 + xi)];
            n[6] = 0.5 * (1.0 - xi * xi) * (1.0 + eta);
            d[6] = [-xi * (1.0 + eta), 0.5 * (1.0 - xi * xi)];
            n[7] = 0.5 * (1.0 - xi) * (1.0 - eta * eta);
            d[7] = [-0.5 * (1.0 - eta * eta), -eta * (1.0 - xi)];
            (n, d)
        }
        _ => panic!("unsupported element order {order}"),
    }
}

/// Jacobian of the isoparametric map at (xi, eta) for nodal coordinates.
/// Returns (detJ, physical shape gradients dN/dx).
pub fn physical_gradients(
    order: u8,
    xi: f64,
    eta: f64,
    coords: &[[f64; 2]],
) -> Result<(f64, Vec<[f64; 2]>)> {
    let (_, dn) = shape_functions(order, xi, eta);
    let mut j = [[0.0_f64; 2]; 2];
    for (a, d) in dn.iter().enumerate() {
        j[0][0] += d[0] * coords[a][0];
        j[0][1] += d[0] * coords[a][1];
        j[1][0] += d[1] * coords[a][0];
        j[1][1] += d[1] * coords[a][1];
    }
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    if det <= 0.0 || !det.is_finite() {
        return Err(Error::mesh(format!("non-positive Jacobian {det:.3e}")));
    }
    // dN/dx_c = sum_r (dxi_r/dx_c) dN/dxi_r with (dxi/dx) the inverse of
    // the row-major J_rc = dx_c/dxi_r stored above.
    let inv_t = [
        [j[1][1] / det, -j[0][1] / det],
        [-j[1][0] / det, j[0][0] / det],
    ];
    let grads = dn
        .iter()
        .map(|d| {
            [
                inv_t[0][0] * d[0] + inv_t[0][1] * d[1],
                inv_t[1][0] * d[0] + inv_t[1][1] * d[1],
            ]
        })
        .collect();
    Ok((det, grads))
}

/// Physical position of a reference point.
pub fn map_to_physical(order: u8, xi: f64, eta: f64, coords: &[[f64; 2]]) -> [f64; 2] {
    let (n, _) = shape_functions(order, xi, eta);
    let mut p = [0.0, 0.0];
    for (a, na) in n.iter().enumerate() {
        p[0] += na * coords[a][0];
        p[1] += na * coords[a][1];
    }
    p
}

/// Inverse bilinear map of the corner quad: physical point -> (xi, eta).
/// Newton iteration; the structured meshes used here have straight edges
/// with midside nodes at edge midpoints, so the corner bilinear map is the
/// exact geometry map for both element orders.
pub fn inverse_map(corners: &[[f64; 2]; 4], p: [f64; 2]) -> Result<[f64; 2]> {
    let mut xi = 0.0_f64;
    let mut eta = 0.0_f64;
    for _ in 0..50 {
        let (n, dn) = shape_functions(1, xi, eta);
        let mut x = [0.0, 0.0];
        let mut j = [[0.0; 2]; 2];
        for a in 0..4 {
            x[0] += n[a] * corners[a][0];
            x[1] += n[a] * corners[a][1];
            j[0][0] += dn[a][0] * corners[a][0];
            j[0][1] += dn[a][0] * corners[a][1];
            j[1][0] += dn[a][1] * corners[a][0];
            j[1][1] += dn[a][1] * corners[a][1];
        }
        let r = [p[0] - x[0], p[1] - x[1]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            return Err(Error::mesh("degenerate element in inverse map".to_string()));
        }
        // solve J^T [dxi, deta] = r  (x = sum N_a(xi) c_a, dx/dxi = J^T)
        let dxi = (j[1][1] * r[0] - j[1][0] * r[1]) / det;
        let deta = (-j[0][1] * r[0] + j[0][0] * r[1]) / det;
        xi += dxi;
        eta += deta;
        if dxi.abs() < 1e-14 && deta.abs() < 1e-14 {
            break;
        }
    }
    Ok([xi, eta])
}
