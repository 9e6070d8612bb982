//! Symmetric triangle quadrature rules, partitioning of cut and tip
//! elements into crack-conforming triangles, and geometric subdivision of
//! tip-fan triangles toward the singularity.

use crate::error::{Error, Result};
use crate::mesh::CrackGeometry;

/// Barycentric rule entry: (l1, l2, weight), weights summing to 1.
type BaryRule = &'static [(f64, f64, f64)];

const RULE_DEG1: BaryRule = &[(1.0 / 3.0, 1.0 / 3.0, 1.0)];

const RULE_DEG2: BaryRule = &[
    (2.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0),
    (1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0),
    (1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0),
];

// Dunavant degree-4, 6 points, all weights positive.
const RULE_DEG4: BaryRule = &[
    (0.108_103_018_168_070, 0.445_948_490_915_965, 0.223_381_589_678_011),
    (0.445_948_490_915_965, 0.108_103_018_168_070, 0.223_381_589_678_011),
    (0.445_948_490_915_965, 0.445_948_490_915_965, 0.223_381_589_678_011),
    (0.816_847_572_980_459, 0.091_576_213_509_771, 0.109_951_743_655_322),
    (0.091_576_213_509_771, 0.816_847_572_980_459, 0.109_951_743_655_322),
    (0.091_576_213_509_771, 0.091_576_213_509_771, 0.109_951_743_655_322),
];

// Dunavant degree-5, 7 points, all weights positive.
const RULE_DEG5: BaryRule = &[
    (1.0 / 3.0, 1.0 / 3.0, 0.225),
    (0.059_715_871_789_770, 0.470_142_064_105_115, 0.132_394_152_788_506),
    (0.470_142_064_105_115, 0.059_715_871_789_770, 0.132_394_152_788_506),
    (0.470_142_064_105_115, 0.470_142_064_105_115, 0.132_394_152_788_506),
    (0.797_426_985_353_087, 0.101_286_507_323_456, 0.125_939_180_544_827),
    (0.101_286_507_323_456, 0.797_426_985_353_087, 0.125_939_180_544_827),
    (0.101_286_507_323_456, 0.101_286_507_323_456, 0.125_939_180_544_827),
];

/// Symmetric triangle rule of at least the requested polynomial degree.
/// All shipped rules have positive weights.
pub fn triangle_rule(order: usize) -> Result<BaryRule> {
    match order {
        1 => Ok(RULE_DEG1),
        2 => Ok(RULE_DEG2),
        3 | 4 => Ok(RULE_DEG4),
        5 => Ok(RULE_DEG5),
        _ => Err(Error::enrichment(format!(
            "unsupported triangle quadrature order {order}"
        ))),
    }
}

pub type Triangle = [[f64; 2]; 3];

pub fn triangle_area(t: &Triangle) -> f64 {
    0.5 * ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[2][0] - t[0][0]) * (t[1][1] - t[0][1]))
}

/// Physical quadrature points and weights (weights sum to the triangle
/// area) for one triangle.
pub fn triangle_points(t: &Triangle, order: usize) -> Result<Vec<([f64; 2], f64)>> {
    let rule = triangle_rule(order)?;
    let area = triangle_area(t).abs();
    Ok(rule
        .iter()
        .map(|&(l1, l2, w)| {
            let l3 = 1.0 - l1 - l2;
            let x = l1 * t[0][0] + l2 * t[1][0] + l3 * t[2][0];
            let y = l1 * t[0][1] + l2 * t[1][1] + l3 * t[2][1];
            ([x, y], w * area)
        })
        .collect())
}

/// Recursively splits a triangle toward its `apex` vertex: each level
/// halves the edges adjacent to the apex, keeping a geometrically shrinking
/// triangle at the apex. Used to concentrate quadrature near the crack tip.
pub fn subdivide_toward(t: Triangle, apex: usize, levels: usize) -> Vec<Triangle> {
    if levels == 0 {
        return vec![t];
    }
    let a = t[apex];
    let b = t[(apex + 1) % 3];
    let c = t[(apex + 2) % 3];
    let mb = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    let mc = [0.5 * (a[0] + c[0]), 0.5 * (a[1] + c[1])];
    let mut out = vec![[mb, b, c], [mb, c, mc]];
    out.extend(subdivide_toward([a, mb, mc], 0, levels - 1));
    out
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    // shoelace relative to the first vertex; avoids cancellation for
    // small polygons far from the origin
    let o = poly[0];
    let mut a = 0.0;
    for i in 1..poly.len() - 1 {
        let p = [poly[i][0] - o[0], poly[i][1] - o[1]];
        let q = [poly[i + 1][0] - o[0], poly[i + 1][1] - o[1]];
        a += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * a
}

/// Fan triangulation of a convex polygon from its first vertex.
fn fan_triangulate(poly: &[[f64; 2]], min_area: f64, out: &mut Vec<Triangle>) {
    for i in 1..poly.len() - 1 {
        let t = [poly[0], poly[i], poly[i + 1]];
        if triangle_area(&t).abs() > min_area {
            out.push(t);
        }
    }
}

/// Splits a convex polygon by the infinite line through `p0` with
/// direction `dir`; returns (left side, right side) polygons.
pub fn split_polygon(poly: &[[f64; 2]], p0: [f64; 2], dir: [f64; 2]) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let side = |p: [f64; 2]| dir[0] * (p[1] - p0[1]) - dir[1] * (p[0] - p0[0]);
    let mut left = Vec::new();
    let mut right = Vec::new();
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let sa = side(a);
        let sb = side(b);
        if sa >= 0.0 {
            left.push(a);
        }
        if sa <= 0.0 {
            right.push(a);
        }
        if (sa > 0.0 && sb < 0.0) || (sa < 0.0 && sb > 0.0) {
            let t = sa / (sa - sb);
            let x = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            left.push(x);
            right.push(x);
        }
    }
    (left, right)
}

/// Partition of a cut or tip element into crack-conforming triangles.
///
/// * Uncut element: the two fan triangles of the quad.
/// * Fully cut element: the quad is split by the crack line; each part is
///   fan-triangulated, so no triangle straddles the crack.
/// * Tip element: a fan centered at the tip with the crack entry point
///   inserted on the perimeter, so the segment entry-tip is a triangle
///   edge on both sides of the crack.
///
/// Degenerate slivers (area below 1e-12 of the element area) are dropped,
/// with the total area re-verified afterwards.
pub fn partition_element(corners: &[[f64; 2]; 4], crack: &CrackGeometry) -> Result<Vec<Triangle>> {
    let elem_area = polygon_area(corners.as_slice());
    if elem_area <= 0.0 {
        return Err(Error::mesh("element not counterclockwise".to_string()));
    }
    let min_area = 1e-12 * elem_area;
    let tol = 1e-12 * elem_area.sqrt();

    let tip = crack.tip();
    let tip_inside = point_in_convex(corners, tip, tol);

    // Crack-edge crossings of the element boundary.
    let mut crossings: Vec<(usize, f64, [f64; 2])> = Vec::new(); // (edge, param, point)
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        for (t, p) in crack.intersect_segment(a, b) {
            // Only count crossings on the crack interior side (psi <= 0);
            // the tangent extension ahead of the tip does not cut.
            crossings.push((e, t, p));
        }
    }
    // Dedupe corner hits shared by adjacent edges.
    crossings.sort_by(|x, y| (x.0, x.1).partial_cmp(&(y.0, y.1)).unwrap());
    crossings.dedup_by(|a, b| {
        let d = ((a.2[0] - b.2[0]).powi(2) + (a.2[1] - b.2[1]).powi(2)).sqrt();
        d < tol
    });

    let mut tris = Vec::new();
    if tip_inside {
        // Perimeter loop with the entry point inserted.
        let entry = crossings.first().map(|c| (c.0, c.1, c.2));
        let mut loop_pts: Vec<[f64; 2]> = Vec::new();
        for e in 0..4 {
            loop_pts.push(corners[e]);
            if let Some((edge, _, p)) = entry {
                if edge == e {
                    let d0 = dist(corners[e], p);
                    let d1 = dist(corners[(e + 1) % 4], p);
                    if d0 > tol && d1 > tol {
                        loop_pts.push(p);
                    }
                }
            }
        }
        let n = loop_pts.len();
        for i in 0..n {
            let t = [tip, loop_pts[i], loop_pts[(i + 1) % n]];
            if triangle_area(&t).abs() > min_area {
                tris.push(t);
            }
        }
    } else if crossings.len() >= 2 {
        // Fully cut: split by the line through the two crossing points.
        let p0 = crossings[0].2;
        let p1 = crossings[crossings.len() - 1].2;
        let dir = [p1[0] - p0[0], p1[1] - p0[1]];
        let (a, b) = split_polygon(corners.as_slice(), p0, dir);
        if a.len() >= 3 {
            fan_triangulate(&a, min_area, &mut tris);
        }
        if b.len() >= 3 {
            fan_triangulate(&b, min_area, &mut tris);
        }
    } else {
        // Uncut: plain pair of triangles.
        fan_triangulate(corners.as_slice(), min_area, &mut tris);
    }

    let total: f64 = tris.iter().map(|t| triangle_area(t).abs()).sum();
    if (total - elem_area).abs() > 1e-12 * elem_area {
        return Err(Error::enrichment(format!(
            "partition lost area: {total} vs {elem_area}"
        )));
    }
    Ok(tris)
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

fn point_in_convex(corners: &[[f64; 2]; 4], p: [f64; 2], tol: f64) -> bool {
    for i in 0..4 {
        let a = corners[i];
        let b = corners[(i + 1) % 4];
        let cr = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        if cr < -tol {
            return false;
        }
    }
    true
}
