//! Crack geometry as a polyline with paired level sets: normal signed
//! distance phi and tangential coordinate psi built from the tip tangent
//! line (straight-crack assumption for psi).

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct LevelSetPair {
    /// Normal signed distance to the crack surface (mm).
    pub phi: f64,
    /// Tangential coordinate along the crack direction, negative behind
    /// the tip, zero at the tip (mm).
    pub psi: f64,
}

#[derive(Clone, Debug)]
pub struct CrackGeometry {
    pts: Vec<[f64; 2]>,
    tangent: [f64; 2],
    normal: [f64; 2],
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn norm(a: [f64; 2]) -> f64 {
    dot(a, a).sqrt()
}

/// Proper intersection test of segments (a,b) and (c,d), excluding shared
/// endpoints.
fn segments_cross(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let d1 = cross(sub(b, a), sub(c, a));
    let d2 = cross(sub(b, a), sub(d, a));
    let d3 = cross(sub(d, c), sub(a, c));
    let d4 = cross(sub(d, c), sub(b, c));
    (d1 * d2 < 0.0) && (d3 * d4 < 0.0)
}

impl CrackGeometry {
    /// Builds a crack from a polyline; the tip is the last vertex.
    pub fn new(polyline: Vec<[f64; 2]>) -> Result<Self> {
        if polyline.len() < 2 {
            return Err(Error::mesh("crack polyline needs at least two points".to_string()));
        }
        for w in polyline.windows(2) {
            if norm(sub(w[1], w[0])) < 1e-14 {
                return Err(Error::mesh("crack polyline has a zero-length segment".to_string()));
            }
        }
        // Non-self-intersection: no pair of non-adjacent segments crosses.
        let n = polyline.len() - 1;
        for i in 0..n {
            for j in (i + 2)..n {
                if segments_cross(polyline[i], polyline[i + 1], polyline[j], polyline[j + 1]) {
                    return Err(Error::mesh("crack polyline self-intersects".to_string()));
                }
            }
        }
        let tip = polyline[n];
        let prev = polyline[n - 1];
        let t = sub(tip, prev);
        let len = norm(t);
        let tangent = [t[0] / len, t[1] / len];
        let normal = [-tangent[1], tangent[0]];
        Ok(CrackGeometry {
            pts: polyline,
            tangent,
            normal,
        })
    }

    /// Horizontal crack from `mouth` to `tip` along +x.
    pub fn straight(mouth: [f64; 2], tip: [f64; 2]) -> Result<Self> {
        CrackGeometry::new(vec![mouth, tip])
    }

    pub fn polyline(&self) -> &[[f64; 2]] {
        &self.pts
    }

    pub fn tip(&self) -> [f64; 2] {
        *self.pts.last().unwrap()
    }

    pub fn mouth(&self) -> [f64; 2] {
        self.pts[0]
    }

    /// Unit tangent at the tip, pointing ahead of the crack.
    pub fn tip_tangent(&self) -> [f64; 2] {
        self.tangent
    }

    /// Unit normal at the tip (90 degrees counterclockwise from the tangent).
    pub fn tip_normal(&self) -> [f64; 2] {
        self.normal
    }

    /// Normal signed distance to the crack surface.
    ///
    /// For points whose projection falls on a crack segment this is the
    /// perpendicular signed distance. For points nearest to the tip vertex
    /// the tangent-line extension is used (projection onto the tip normal),
    /// which keeps the polar pair (r, theta) consistent ahead of the tip.
    pub fn signed_distance(&self, p: [f64; 2]) -> f64 {
        let n = self.pts.len() - 1;
        let mut best_d2 = f64::INFINITY;
        let mut best: (usize, f64) = (0, 0.0); // segment index, parameter
        for i in 0..n {
            let a = self.pts[i];
            let b = self.pts[i + 1];
            let ab = sub(b, a);
            let t = (dot(sub(p, a), ab) / dot(ab, ab)).clamp(0.0, 1.0);
            let proj = [a[0] + t * ab[0], a[1] + t * ab[1]];
            let d2 = {
                let d = sub(p, proj);
                dot(d, d)
            };
            if d2 < best_d2 - 1e-30 {
                best_d2 = d2;
                best = (i, t);
            }
        }
        let (i, t) = best;
        let nearest_is_tip = i == n - 1 && t >= 1.0 - 1e-14;
        if nearest_is_tip {
            // Projection onto the tip normal (tangent-line extension).
            return dot(self.normal, sub(p, self.tip()));
        }
        let a = self.pts[i];
        let b = self.pts[i + 1];
        let ab = sub(b, a);
        let seg_len = norm(ab);
        let seg_normal = [-ab[1] / seg_len, ab[0] / seg_len];
        let proj = [a[0] + t * ab[0], a[1] + t * ab[1]];
        let dist = norm(sub(p, proj));
        let sign = dot(seg_normal, sub(p, proj));
        if sign >= 0.0 {
            dist
        } else {
            -dist
        }
    }

    /// Tangential coordinate measured along the tip tangent line.
    pub fn tangential(&self, p: [f64; 2]) -> f64 {
        dot(self.tangent, sub(p, self.tip()))
    }

    pub fn level_set(&self, p: [f64; 2]) -> LevelSetPair {
        LevelSetPair {
            phi: self.signed_distance(p),
            psi: self.tangential(p),
        }
    }

    /// Polar coordinates centered at the tip: r = sqrt(phi^2 + psi^2),
    /// theta = atan2(phi, psi) in (-pi, pi]. theta = 0 ahead of the tip,
    /// +/-pi on the crack faces.
    pub fn polar(&self, p: [f64; 2]) -> (f64, f64) {
        let ls = self.level_set(p);
        let r = (ls.phi * ls.phi + ls.psi * ls.psi).sqrt();
        let theta = ls.phi.atan2(ls.psi);
        (r, theta)
    }

    /// Intersections of the crack polyline with segment (a, b), returned
    /// with the parameter along (a, b).
    pub fn intersect_segment(&self, a: [f64; 2], b: [f64; 2]) -> Vec<(f64, [f64; 2])> {
        let mut out = Vec::new();
        let ab = sub(b, a);
        for w in self.pts.windows(2) {
            let (c, d) = (w[0], w[1]);
            let cd = sub(d, c);
            let denom = cross(ab, cd);
            if denom.abs() < 1e-30 {
                continue;
            }
            let s = cross(sub(c, a), cd) / denom; // along ab
            let u = cross(sub(c, a), ab) / denom; // along cd
            let eps = 1e-12;
            if s >= -eps && s <= 1.0 + eps && u >= -eps && u <= 1.0 + eps {
                out.push((s.clamp(0.0, 1.0), [a[0] + s * ab[0], a[1] + s * ab[1]]));
            }
        }
        out.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        out.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-10);
        out
    }
}
