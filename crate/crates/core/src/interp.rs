//! Linear interpolation on a Delaunay triangulation of scattered points
//! (quadrature-point clouds). Used both for sampling stress profiles and
//! for sampling plastic strain increments at nodal locations during
//! gradient recovery.

use delaunator::{triangulate, Point};

/// Triangulated point cloud with a uniform-grid spatial index.
pub struct ScatteredInterp {
    pts: Vec<[f64; 2]>,
    /// Flat triangle list (3 vertex ids each).
    tris: Vec<usize>,
    // grid index over triangle bounding boxes
    nx: usize,
    ny: usize,
    x0: f64,
    y0: f64,
    dx: f64,
    dy: f64,
    cells: Vec<Vec<u32>>,
    // grid index over points for nearest-point fallback
    pcells: Vec<Vec<u32>>,
}

/// Result of a single sample.
#[derive(Clone, Copy, Debug)]
pub struct Sample {
    pub value: f64,
    /// False when the point fell outside the hull and a fallback was used.
    pub inside: bool,
}

impl ScatteredInterp {
    /// Builds the triangulation; returns None for degenerate clouds
    /// (fewer than 3 points or all collinear).
    pub fn new(pts: Vec<[f64; 2]>) -> Option<Self> {
        if pts.len() < 3 {
            return None;
        }
        let dpts: Vec<Point> = pts.iter().map(|p| Point { x: p[0], y: p[1] }).collect();
        let tri = triangulate(&dpts);
        if tri.triangles.is_empty() {
            return None;
        }
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in &pts {
            xmin = xmin.min(p[0]);
            xmax = xmax.max(p[0]);
            ymin = ymin.min(p[1]);
            ymax = ymax.max(p[1]);
        }
        let ntri = tri.triangles.len() / 3;
        let n = (ntri as f64).sqrt().ceil() as usize;
        let nx = n.clamp(1, 512);
        let ny = n.clamp(1, 512);
        let dx = ((xmax - xmin) / nx as f64).max(1e-300);
        let dy = ((ymax - ymin) / ny as f64).max(1e-300);
        let mut cells = vec![Vec::new(); nx * ny];
        let clampi = |v: isize, hi: usize| v.clamp(0, hi as isize - 1) as usize;
        for t in 0..ntri {
            let (mut txmin, mut txmax) = (f64::INFINITY, f64::NEG_INFINITY);
            let (mut tymin, mut tymax) = (f64::INFINITY, f64::NEG_INFINITY);
            for k in 0..3 {
                let p = pts[tri.triangles[3 * t + k]];
                txmin = txmin.min(p[0]);
                txmax = txmax.max(p[0]);
                tymin = tymin.min(p[1]);
                tymax = tymax.max(p[1]);
            }
            let i0 = clampi(((txmin - xmin) / dx).floor() as isize, nx);
            let i1 = clampi(((txmax - xmin) / dx).floor() as isize, nx);
            let j0 = clampi(((tymin - ymin) / dy).floor() as isize, ny);
            let j1 = clampi(((tymax - ymin) / dy).floor() as isize, ny);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    cells[j * nx + i].push(t as u32);
                }
            }
        }
        let mut pcells = vec![Vec::new(); nx * ny];
        for (idx, p) in pts.iter().enumerate() {
            let i = clampi(((p[0] - xmin) / dx).floor() as isize, nx);
            let j = clampi(((p[1] - ymin) / dy).floor() as isize, ny);
            pcells[j * nx + i].push(idx as u32);
        }
        Some(ScatteredInterp {
            pts,
            tris: tri.triangles,
            nx,
            ny,
            x0: xmin,
            y0: ymin,
            dx,
            dy,
            cells,
            pcells,
        })
    }

    pub fn n_points(&self) -> usize {
        self.pts.len()
    }

    fn cell_of(&self, p: [f64; 2]) -> (usize, usize) {
        let i = (((p[0] - self.x0) / self.dx).floor() as isize).clamp(0, self.nx as isize - 1);
        let j = (((p[1] - self.y0) / self.dy).floor() as isize).clamp(0, self.ny as isize - 1);
        (i as usize, j as usize)
    }

    /// Barycentric coordinates of `p` in triangle `t`; None for slivers
    /// whose barycentric weights would be numerically meaningless
    /// (quadrature-point clouds contain many nearly collinear groups).
    fn barycentric(&self, t: usize, p: [f64; 2]) -> Option<[f64; 3]> {
        let a = self.pts[self.tris[3 * t]];
        let b = self.pts[self.tris[3 * t + 1]];
        let c = self.pts[self.tris[3 * t + 2]];
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let scale = (b[0] - a[0])
            .abs()
            .max((b[1] - a[1]).abs())
            .max((c[0] - a[0]).abs())
            .max((c[1] - a[1]).abs());
        if det.abs() < 1e-10 * scale * scale {
            return None;
        }
        let l1 = ((b[0] - p[0]) * (c[1] - p[1]) - (c[0] - p[0]) * (b[1] - p[1])) / det;
        let l2 = ((c[0] - p[0]) * (a[1] - p[1]) - (a[0] - p[0]) * (c[1] - p[1])) / det;
        Some([l1, l2, 1.0 - l1 - l2])
    }

    /// Triangle containing `p`, if any.
    fn locate(&self, p: [f64; 2]) -> Option<(usize, [f64; 3])> {
        let (i, j) = self.cell_of(p);
        let tol = -1e-10;
        for &t in &self.cells[j * self.nx + i] {
            if let Some(l) = self.barycentric(t as usize, p) {
                if l.iter().all(|&v| v >= tol) {
                    return Some((t as usize, l));
                }
            }
        }
        None
    }

    /// Nearest cloud point (grid-accelerated with ring expansion).
    pub fn nearest_point(&self, p: [f64; 2]) -> usize {
        let (ci, cj) = self.cell_of(p);
        let mut best = usize::MAX;
        let mut best_d2 = f64::INFINITY;
        let maxr = self.nx.max(self.ny);
        for radius in 0..=maxr {
            let r = radius as isize;
            let mut any = false;
            for j in (cj as isize - r)..=(cj as isize + r) {
                for i in (ci as isize - r)..=(ci as isize + r) {
                    if i < 0 || j < 0 || i >= self.nx as isize || j >= self.ny as isize {
                        continue;
                    }
                    // ring only
                    if radius > 0
                        && (i - ci as isize).abs() != r
                        && (j - cj as isize).abs() != r
                    {
                        continue;
                    }
                    any = true;
                    for &idx in &self.pcells[j as usize * self.nx + i as usize] {
                        let q = self.pts[idx as usize];
                        let d2 = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
                        if d2 < best_d2 {
                            best_d2 = d2;
                            best = idx as usize;
                        }
                    }
                }
            }
            // One extra ring after the first hit guarantees correctness.
            if best != usize::MAX && radius >= 1 {
                break;
            }
            if !any && radius == maxr {
                break;
            }
        }
        if best == usize::MAX {
            0
        } else {
            best
        }
    }

    /// Linear barycentric interpolation of nodal `values`; outside the
    /// hull the nearest point's value is returned with `inside = false`.
    /// Inside, the result never leaves the min/max of the triangle's
    /// vertex values.
    pub fn sample(&self, p: [f64; 2], values: &[f64]) -> Sample {
        if let Some((t, l)) = self.locate(p) {
            let v0 = values[self.tris[3 * t]];
            let v1 = values[self.tris[3 * t + 1]];
            let v2 = values[self.tris[3 * t + 2]];
            let l = [l[0].max(0.0), l[1].max(0.0), l[2].max(0.0)];
            let s: f64 = l.iter().sum();
            Sample {
                value: (l[0] * v0 + l[1] * v1 + l[2] * v2) / s,
                inside: true,
            }
        } else {
            Sample {
                value: values[self.nearest_point(p)],
                inside: false,
            }
        }
    }

    /// Like `sample`, but outside the hull the plane of a triangle incident
    /// to the nearest point is extended (exact for globally linear fields).
    pub fn sample_extrapolate(&self, p: [f64; 2], values: &[f64]) -> Sample {
        if let Some((t, l)) = self.locate(p) {
            let v0 = values[self.tris[3 * t]];
            let v1 = values[self.tris[3 * t + 1]];
            let v2 = values[self.tris[3 * t + 2]];
            return Sample {
                value: l[0] * v0 + l[1] * v1 + l[2] * v2,
                inside: true,
            };
        }
        let near = self.nearest_point(p);
        // best-conditioned triangle incident to the nearest point
        let mut best: Option<(f64, [f64; 3], usize)> = None;
        for t in 0..self.tris.len() / 3 {
            if (0..3).any(|k| self.tris[3 * t + k] == near) {
                let a = self.pts[self.tris[3 * t]];
                let b = self.pts[self.tris[3 * t + 1]];
                let c = self.pts[self.tris[3 * t + 2]];
                let det =
                    ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs();
                if let Some(l) = self.barycentric(t, p) {
                    if best.as_ref().map(|(d, _, _)| det > *d).unwrap_or(true) {
                        best = Some((det, l, t));
                    }
                }
            }
        }
        if let Some((_, l, t)) = best {
            let v0 = values[self.tris[3 * t]];
            let v1 = values[self.tris[3 * t + 1]];
            let v2 = values[self.tris[3 * t + 2]];
            return Sample {
                value: l[0] * v0 + l[1] * v1 + l[2] * v2,
                inside: false,
            };
        }
        Sample {
            value: values[near],
            inside: false,
        }
    }
}
