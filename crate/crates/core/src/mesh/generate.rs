//! Structured mesh generation: graded rectangles and the half-disc
//! crack-region mesh loaded on its remote boundary.

use super::Mesh;
use crate::error::{Error, Result};
use std::collections::BTreeMap;

/// Where the grading focus falls relative to the cell layout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FocusAlign {
    /// Focus coincides with a grid line (crack tip at a node).
    Node,
    /// Focus sits inside a focus cell at the given fraction from its low
    /// edge (0.5 centers the cell on the focus; small values push the
    /// focus toward the cell's low edge).
    CellFraction(f64),
}

#[derive(Clone, Debug)]
pub struct GradedAxis {
    /// Coordinate of the grading focus along the axis.
    pub focus: f64,
    /// Target cell size at the focus.
    pub tip_size: f64,
    /// Geometric growth ratio bound (> 1).
    pub ratio: f64,
    /// Number of tip-size cells kept uniform on each side of the focus.
    pub uniform_band: usize,
    pub align: FocusAlign,
}

#[derive(Clone, Debug)]
pub enum AxisSpec {
    Uniform { n: usize },
    Graded(GradedAxis),
}

/// Cell sizes marching away from the focus over a distance `dist`,
/// starting from `first` uniform cells of size `a`, then geometric growth.
/// The growth ratio is solved (below the `ratio` bound) so the sizes fit
/// `dist` exactly.
fn march_sizes(dist: f64, a: f64, ratio: f64, uniform: usize) -> Result<Vec<f64>> {
    if dist <= 0.0 {
        return Ok(Vec::new());
    }
    if a <= 0.0 {
        return Err(Error::mesh("tip cell size must be positive".to_string()));
    }
    if !(ratio > 1.0) {
        return Err(Error::mesh(format!("grading ratio {ratio} must exceed 1")));
    }
    let mut sizes = Vec::new();
    let mut rem = dist;
    let nu = uniform.max(1);
    for _ in 0..nu {
        if rem < 1.5 * a {
            break;
        }
        sizes.push(a);
        rem -= a;
    }
    if rem <= 1e-12 * dist {
        return Ok(sizes);
    }
    if rem < a {
        // Absorb the remainder into the last uniform cell.
        match sizes.last_mut() {
            Some(s) => *s += rem,
            None => sizes.push(rem),
        }
        return Ok(sizes);
    }
    // Geometric tail: find the smallest k whose capacity at the ratio
    // bound reaches rem, then bisect the actual ratio for an exact fit.
    let capacity = |r: f64, k: usize| -> f64 {
        if (r - 1.0).abs() < 1e-14 {
            a * k as f64
        } else {
            a * r * (r.powi(k as i32) - 1.0) / (r - 1.0)
        }
    };
    let mut k = 1usize;
    while capacity(ratio, k) < rem {
        k += 1;
        if k > 100_000 {
            return Err(Error::mesh("grading does not reach the boundary".to_string()));
        }
    }
    // Guarantee the solved ratio stays >= 1 (cells never shrink outward).
    while capacity(1.0, k) > rem && k > 1 {
        k -= 1;
    }
    let (mut lo, mut hi) = (1.0, ratio);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if capacity(mid, k) < rem {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    let mut s = a;
    let mut placed = 0.0;
    for i in 0..k {
        s *= r;
        if i == k - 1 {
            sizes.push(rem - placed);
        } else {
            sizes.push(s);
            placed += s;
        }
    }
    Ok(sizes)
}

/// 1D grid coordinates on [0, len] for an axis spec.
pub fn axis_coords(len: f64, spec: &AxisSpec) -> Result<Vec<f64>> {
    if len <= 0.0 {
        return Err(Error::mesh(format!("axis length {len} must be positive")));
    }
    match spec {
        AxisSpec::Uniform { n } => {
            if *n == 0 {
                return Err(Error::mesh("axis needs at least one element".to_string()));
            }
            Ok((0..=*n).map(|i| len * i as f64 / *n as f64).collect())
        }
        AxisSpec::Graded(g) => {
            if g.focus < 0.0 || g.focus > len {
                return Err(Error::mesh(format!(
                    "grading focus {} outside axis [0, {len}]",
                    g.focus
                )));
            }
            let (lo_edge, hi_edge) = match g.align {
                FocusAlign::Node => (g.focus, g.focus),
                FocusAlign::CellFraction(f) => {
                    if !(0.0..1.0).contains(&f) && f != 0.0 {
                        if !(0.0..=1.0).contains(&f) {
                            return Err(Error::mesh(format!("cell fraction {f} outside [0,1]")));
                        }
                    }
                    let lo = (g.focus - f * g.tip_size).max(0.0);
                    let hi = (lo + g.tip_size).min(len);
                    (lo, hi)
                }
            };
            let left = march_sizes(lo_edge, g.tip_size, g.ratio, g.uniform_band)?;
            let right = march_sizes(len - hi_edge, g.tip_size, g.ratio, g.uniform_band)?;
            let mut coords = Vec::with_capacity(left.len() + right.len() + 2);
            let mut x = lo_edge;
            coords.push(x);
            for s in &left {
                x -= s;
                coords.push(x);
            }
            coords.reverse();
            if hi_edge > lo_edge {
                coords.push(hi_edge);
            }
            let mut x = hi_edge;
            for s in &right {
                x += s;
                coords.push(x);
            }
            // Snap the extremes exactly onto the domain boundary.
            if let Some(first) = coords.first_mut() {
                if first.abs() < 1e-9 * len {
                    *first = 0.0;
                }
            }
            if let Some(last) = coords.last_mut() {
                if (*last - len).abs() < 1e-9 * len {
                    *last = len;
                }
            }
            if coords.len() < 2 {
                return Err(Error::mesh("grading produced no cells".to_string()));
            }
            Ok(coords)
        }
    }
}

/// Checks the adjacent-cell size ratio along an axis.
fn check_ratio(coords: &[f64], bound: f64) -> Result<()> {
    for w in coords.windows(3) {
        let a = w[1] - w[0];
        let b = w[2] - w[1];
        let r = (a / b).max(b / a);
        if r > bound * (1.0 + 1e-9) {
            return Err(Error::mesh(format!(
                "adjacent element size ratio {r:.3} exceeds bound {bound}"
            )));
        }
    }
    Ok(())
}

/// Structured rectangle [0, width] x [0, height].
///
/// Boundary sets: `left`, `right`, `bottom`, `top`.
pub fn generate_structured_mesh(
    width: f64,
    height: f64,
    x_spec: &AxisSpec,
    y_spec: &AxisSpec,
    order: u8,
    ratio_bound: f64,
) -> Result<Mesh> {
    if width <= 0.0 || height <= 0.0 {
        return Err(Error::mesh(format!(
            "dimensions must be positive (got {width} x {height})"
        )));
    }
    let xs = axis_coords(width, x_spec)?;
    let ys = axis_coords(height, y_spec)?;
    check_ratio(&xs, ratio_bound)?;
    check_ratio(&ys, ratio_bound)?;
    let nx = xs.len() - 1;
    let ny = ys.len() - 1;

    let mut coords: Vec<[f64; 2]> = Vec::new();
    let corner = |i: usize, j: usize| j * (nx + 1) + i;
    for y in &ys {
        for x in &xs {
            coords.push([*x, *y]);
        }
    }
    let mut hmid = vec![usize::MAX; nx * (ny + 1)];
    let mut vmid = vec![usize::MAX; (nx + 1) * ny];
    if order == 2 {
        for j in 0..=ny {
            for i in 0..nx {
                hmid[j * nx + i] = coords.len();
                coords.push([0.5 * (xs[i] + xs[i + 1]), ys[j]]);
            }
        }
        for j in 0..ny {
            for i in 0..=nx {
                vmid[j * (nx + 1) + i] = coords.len();
                coords.push([xs[i], 0.5 * (ys[j] + ys[j + 1])]);
            }
        }
    } else if order != 1 {
        return Err(Error::mesh(format!("unsupported element order {order}")));
    }

    let mut elems = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let c = [
                corner(i, j),
                corner(i + 1, j),
                corner(i + 1, j + 1),
                corner(i, j + 1),
            ];
            if order == 1 {
                elems.push(c.to_vec());
            } else {
                elems.push(vec![
                    c[0],
                    c[1],
                    c[2],
                    c[3],
                    hmid[j * nx + i],
                    vmid[j * (nx + 1) + i + 1],
                    hmid[(j + 1) * nx + i],
                    vmid[j * (nx + 1) + i],
                ]);
            }
        }
    }

    let mut mesh = Mesh {
        order,
        coords,
        elems,
        sets: BTreeMap::new(),
    };
    let tol = 1e-9 * width.max(height);
    mesh.tag_nodes("left", |c| c[0].abs() < tol);
    mesh.tag_nodes("right", |c| (c[0] - width).abs() < tol);
    mesh.tag_nodes("bottom", |c| c[1].abs() < tol);
    mesh.tag_nodes("top", |c| (c[1] - height).abs() < tol);
    mesh.validate()?;
    Ok(mesh)
}

/// Half-disc "spider web" mesh of radius `outer_r` centered at the origin,
/// covering theta in [0, pi]. The innermost ring is collapsed quads sharing
/// the tip node at the origin; ring radii grow geometrically from
/// `tip_size` outward.
///
/// Sets: `remote` (outer arc), `ligament` (theta = 0, tip included),
/// `crack_face` (theta = pi, tip excluded), `tip`.
pub fn generate_half_disc_mesh(
    outer_r: f64,
    tip_size: f64,
    ratio: f64,
    n_sectors: usize,
    order: u8,
) -> Result<Mesh> {
    if outer_r <= 0.0 || tip_size <= 0.0 || tip_size >= outer_r {
        return Err(Error::mesh(format!(
            "invalid half-disc radii (outer {outer_r}, tip {tip_size})"
        )));
    }
    if n_sectors < 2 {
        return Err(Error::mesh("half disc needs at least 2 sectors".to_string()));
    }
    let axis = AxisSpec::Graded(GradedAxis {
        focus: 0.0,
        tip_size,
        ratio,
        uniform_band: 2,
        align: FocusAlign::Node,
    });
    let radii = axis_coords(outer_r, &axis)?; // radii[0] = 0
    let n_rings = radii.len() - 1;
    let thetas: Vec<f64> = (0..=n_sectors)
        .map(|j| std::f64::consts::PI * j as f64 / n_sectors as f64)
        .collect();

    let mut coords: Vec<[f64; 2]> = vec![[0.0, 0.0]]; // tip node 0
    let ring_node = |ring: usize, j: usize, ns: usize| 1 + (ring - 1) * (ns + 1) + j;
    for r in radii.iter().skip(1) {
        for th in &thetas {
            coords.push([r * th.cos(), r * th.sin()]);
        }
    }

    // Midside bookkeeping for order 2: radial midsides between rings and
    // circumferential midsides within each ring, all on straight chords.
    let mut elems: Vec<Vec<usize>> = Vec::new();
    let mut radial_mid = vec![usize::MAX; (n_rings + 1) * (n_sectors + 1)];
    let mut circ_mid = vec![usize::MAX; (n_rings + 1) * n_sectors];
    if order == 2 {
        let base: Vec<[f64; 2]> = coords.clone();
        let node_at = |ring: usize, j: usize| -> usize {
            if ring == 0 {
                0
            } else {
                ring_node(ring, j, n_sectors)
            }
        };
        for ring in 1..=n_rings {
            for j in 0..=n_sectors {
                let a = base[node_at(ring - 1, j)];
                let b = base[node_at(ring, j)];
                radial_mid[ring * (n_sectors + 1) + j] = coords.len();
                coords.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
            }
            for j in 0..n_sectors {
                let a = base[node_at(ring, j)];
                let b = base[node_at(ring, j + 1)];
                circ_mid[ring * n_sectors + j] = coords.len();
                coords.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
            }
        }
    }

    let node_at = |ring: usize, j: usize| -> usize {
        if ring == 0 {
            0
        } else {
            ring_node(ring, j, n_sectors)
        }
    };
    for ring in 1..=n_rings {
        for j in 0..n_sectors {
            // Corner order: inner-j, outer-j, outer-j+1, inner-j+1 is
            // clockwise for growing theta; use (inner-j, outer-j, outer-j1,
            // inner-j1) -> check orientation: theta grows ccw, radius grows
            // outward, so ccw order is (inner j, outer j, outer j+1, inner j+1).
            let c = [
                node_at(ring - 1, j),
                node_at(ring, j),
                node_at(ring, j + 1),
                node_at(ring - 1, j + 1),
            ];
            if order == 1 {
                elems.push(c.to_vec());
            } else {
                let m_bottom = radial_mid[ring * (n_sectors + 1) + j];
                let m_right = circ_mid[ring * n_sectors + j];
                let m_top = radial_mid[ring * (n_sectors + 1) + j + 1];
                let m_left = if ring == 1 {
                    // Collapsed edge of the innermost ring: midside at the tip.
                    0
                } else {
                    circ_mid[(ring - 1) * n_sectors + j]
                };
                elems.push(vec![c[0], c[1], c[2], c[3], m_bottom, m_right, m_top, m_left]);
            }
        }
    }

    let mut mesh = Mesh {
        order,
        coords,
        elems,
        sets: BTreeMap::new(),
    };
    let tol = 1e-9 * outer_r;
    let mut remote = Vec::new();
    for j in 0..=n_sectors {
        remote.push(node_at(n_rings, j));
    }
    if order == 2 {
        for j in 0..n_sectors {
            remote.push(circ_mid[n_rings * n_sectors + j]);
        }
    }
    mesh.add_set("remote", remote);
    mesh.tag_nodes("ligament", |c| c[1].abs() < tol && c[0] > -tol);
    mesh.tag_nodes("crack_face", |c| c[1].abs() < tol && c[0] < -tol);
    mesh.add_set("tip", vec![0]);
    // The tip node belongs to the ligament (symmetry plane).
    let mut lig = mesh.sets["ligament"].clone();
    lig.push(0);
    mesh.add_set("ligament", lig);
    mesh.validate()?;
    Ok(mesh)
}
