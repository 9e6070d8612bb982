//! Structured quadrilateral meshes (4-node linear, 8-node serendipity),
//! boundary node sets, and the native plain-text mesh format.
//!
//! Lengths are millimetres throughout. Element connectivity is
//! counterclockwise with corners first; 8-node elements append the edge
//! midside nodes in (bottom, right, top, left) order.

mod crack;
mod generate;
mod io;

pub use crack::{CrackGeometry, LevelSetPair};
pub use generate::{
    generate_half_disc_mesh, generate_structured_mesh, AxisSpec, FocusAlign, GradedAxis,
};

use crate::elements::{shape_functions, GAUSS_2X2};
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Default bound on the size ratio of adjacent elements in graded meshes.
pub const DEFAULT_GRADING_RATIO_BOUND: f64 = 1.5;

#[derive(Clone, Debug)]
pub struct Mesh {
    /// 1 for 4-node, 2 for 8-node elements.
    pub order: u8,
    /// Node coordinates (mm).
    pub coords: Vec<[f64; 2]>,
    /// Element connectivity (4 or 8 node indices each).
    pub elems: Vec<Vec<usize>>,
    /// Named boundary/feature node sets.
    pub sets: BTreeMap<String, Vec<usize>>,
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn n_elems(&self) -> usize {
        self.elems.len()
    }

    pub fn nodes_per_elem(&self) -> usize {
        if self.order == 1 {
            4
        } else {
            8
        }
    }

    /// Corner node indices of an element (first four connectivity entries).
    pub fn corners(&self, e: usize) -> [usize; 4] {
        let c = &self.elems[e];
        [c[0], c[1], c[2], c[3]]
    }

    pub fn corner_coords(&self, e: usize) -> [[f64; 2]; 4] {
        let c = self.corners(e);
        [
            self.coords[c[0]],
            self.coords[c[1]],
            self.coords[c[2]],
            self.coords[c[3]],
        ]
    }

    /// Signed polygon area of the corner quad (shoelace relative to the
    /// first corner to avoid cancellation far from the origin).
    pub fn elem_area(&self, e: usize) -> f64 {
        let p = self.corner_coords(e);
        let mut a = 0.0;
        for i in 1..3 {
            let u = [p[i][0] - p[0][0], p[i][1] - p[0][1]];
            let v = [p[i + 1][0] - p[0][0], p[i + 1][1] - p[0][1]];
            a += u[0] * v[1] - v[0] * u[1];
        }
        0.5 * a
    }

    /// Characteristic element size, sqrt(area).
    pub fn char_size(&self, e: usize) -> f64 {
        self.elem_area(e).abs().sqrt()
    }

    /// Smallest characteristic size over the mesh.
    pub fn min_char_size(&self) -> f64 {
        (0..self.n_elems())
            .map(|e| self.char_size(e))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn set(&self, name: &str) -> Result<&[usize]> {
        self.sets
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::config(format!("missing node set '{name}'")))
    }

    pub fn centroid(&self, e: usize) -> [f64; 2] {
        let p = self.corner_coords(e);
        [
            0.25 * (p[0][0] + p[1][0] + p[2][0] + p[3][0]),
            0.25 * (p[0][1] + p[1][1] + p[2][1] + p[3][1]),
        ]
    }

    /// Whether a point lies in (or on the boundary of) the corner quad of
    /// element `e`, with tolerance `tol` on the edge cross products.
    pub fn point_in_elem(&self, e: usize, p: [f64; 2], tol: f64) -> bool {
        let c = self.corner_coords(e);
        for i in 0..4 {
            let a = c[i];
            let b = c[(i + 1) % 4];
            let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
            if cross < -tol {
                return false;
            }
        }
        true
    }

    /// Brute-force element lookup for a point.
    pub fn find_elem(&self, p: [f64; 2]) -> Option<usize> {
        let tol = 1e-9 * self.min_char_size().max(1e-12);
        (0..self.n_elems()).find(|&e| self.point_in_elem(e, p, tol))
    }

    /// Elements adjacent to each node (the shape-function support).
    pub fn node_supports(&self) -> Vec<Vec<usize>> {
        let mut sup = vec![Vec::new(); self.n_nodes()];
        for (e, conn) in self.elems.iter().enumerate() {
            for &n in conn {
                sup[n].push(e);
            }
        }
        sup
    }

    /// Validates connectivity, orientation and Jacobian positivity at the
    /// quadrature points actually used on the undeformed mesh. Collapsed
    /// (repeated-node) quads are allowed as long as interior quadrature
    /// points keep a positive Jacobian.
    pub fn validate(&self) -> Result<()> {
        if self.order != 1 && self.order != 2 {
            return Err(Error::mesh(format!("unsupported element order {}", self.order)));
        }
        let npe = self.nodes_per_elem();
        for (e, conn) in self.elems.iter().enumerate() {
            if conn.len() != npe {
                return Err(Error::mesh(format!(
                    "element {e} has {} nodes, expected {npe}",
                    conn.len()
                )));
            }
            for &n in conn {
                if n >= self.n_nodes() {
                    return Err(Error::mesh(format!("element {e} references missing node {n}")));
                }
            }
            if self.elem_area(e) <= 0.0 {
                return Err(Error::mesh(format!(
                    "element {e} is not counterclockwise (signed area {:.3e})",
                    self.elem_area(e)
                )));
            }
            // Jacobian positivity at the 2x2 points used by every element class.
            let coords: Vec<[f64; 2]> = conn.iter().map(|&n| self.coords[n]).collect();
            for &(xi, eta, _) in GAUSS_2X2 {
                let (_, dn) = shape_functions(self.order, xi, eta);
                let mut j = [[0.0; 2]; 2];
                for (a, d) in dn.iter().enumerate() {
                    for r in 0..2 {
                        j[r][0] += d[r] * coords[a][0];
                        j[r][1] += d[r] * coords[a][1];
                    }
                }
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                if det <= 0.0 {
                    return Err(Error::mesh(format!(
                        "element {e} has non-positive Jacobian {det:.3e} at ({xi:.3}, {eta:.3})"
                    )));
                }
            }
        }
        for (name, set) in &self.sets {
            for &n in set {
                if n >= self.n_nodes() {
                    return Err(Error::mesh(format!("set '{name}' references missing node {n}")));
                }
            }
        }
        Ok(())
    }

    pub fn add_set(&mut self, name: &str, mut nodes: Vec<usize>) {
        nodes.sort_unstable();
        nodes.dedup();
        self.sets.insert(name.to_string(), nodes);
    }

    /// Collects nodes matching a coordinate predicate into a named set.
    pub fn tag_nodes<F: Fn([f64; 2]) -> bool>(&mut self, name: &str, pred: F) {
        let nodes: Vec<usize> = self
            .coords
            .iter()
            .enumerate()
            .filter(|(_, &c)| pred(c))
            .map(|(i, _)| i)
            .collect();
        self.add_set(name, nodes);
    }
}
