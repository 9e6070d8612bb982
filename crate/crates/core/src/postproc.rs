//! Extraction of crack-plane stress profiles, the domain-integral J,
//! crack opening displacement, element distortion metrics, and the CSV /
//! VTK output writers.

use crate::error::{Error, Result};
use crate::interp::ScatteredInterp;
use crate::solver::{CaseContext, FieldSnapshot};
use std::fmt::Write as _;
use std::path::Path;

/// Stress profile sampled ahead of the crack tip.
#[derive(Clone, Debug)]
pub struct LineProfile {
    /// Sample radii (mm), strictly increasing.
    pub r: Vec<f64>,
    /// Angular offset from the crack plane (radians).
    pub theta: f64,
    /// sigma_22 normalized by sigma_y (crack-normal stress).
    pub sigma22_over_sy: Vec<f64>,
    /// von Mises stress normalized by sigma_y.
    pub sigmae_over_sy: Vec<f64>,
    /// True where the sample fell outside the interpolation hull and the
    /// nearest-point fallback was used.
    pub fallback: Vec<bool>,
}

/// Log-spaced radii between r0 and r1.
pub fn log_radii(r0: f64, r1: f64, n: usize) -> Vec<f64> {
    let (l0, l1) = (r0.ln(), r1.ln());
    (0..n)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Samples the stress field along a ray at angle `theta` from the crack
/// plane (Delaunay triangulation of the integration points, linear
/// interpolation within each triangle).
pub fn extract_line(
    ctx: &CaseContext,
    snap: &FieldSnapshot,
    theta: f64,
    radii: &[f64],
) -> Result<LineProfile> {
    let crack = ctx
        .crack
        .as_ref()
        .ok_or_else(|| Error::postproc("profile extraction needs a crack".to_string()))?;
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::postproc("sample radii must be strictly increasing".to_string()));
    }
    let tip = crack.tip();
    let t = crack.tip_tangent();
    let nrm = crack.tip_normal();
    let (s, c) = theta.sin_cos();
    let dir = [t[0] * c + nrm[0] * s, t[1] * c + nrm[1] * s];
    let points: Vec<[f64; 2]> = radii
        .iter()
        .map(|&r| [tip[0] + r * dir[0], tip[1] + r * dir[1]])
        .collect();
    sample_profile(ctx, snap, points, radii.to_vec(), theta)
}

/// Samples along the line offset `offset` above the crack plane; useful
/// when the quadrature-point cloud does not reach the plane itself. The
/// radius column is the tangential distance ahead of the tip.
pub fn extract_offset_line(
    ctx: &CaseContext,
    snap: &FieldSnapshot,
    offset: f64,
    radii: &[f64],
) -> Result<LineProfile> {
    let crack = ctx
        .crack
        .as_ref()
        .ok_or_else(|| Error::postproc("profile extraction needs a crack".to_string()))?;
    let tip = crack.tip();
    let t = crack.tip_tangent();
    let nrm = crack.tip_normal();
    let points: Vec<[f64; 2]> = radii
        .iter()
        .map(|&r| {
            [
                tip[0] + r * t[0] + offset * nrm[0],
                tip[1] + r * t[1] + offset * nrm[1],
            ]
        })
        .collect();
    sample_profile(ctx, snap, points, radii.to_vec(), 0.0)
}

fn sample_profile(
    ctx: &CaseContext,
    snap: &FieldSnapshot,
    points: Vec<[f64; 2]>,
    radii: Vec<f64>,
    theta: f64,
) -> Result<LineProfile> {
    let mut pos = Vec::new();
    let mut s22 = Vec::new();
    let mut se = Vec::new();
    for (e, elem) in snap.states.iter().enumerate() {
        for (q, st) in elem.iter().enumerate() {
            pos.push(ctx.elems[e].qps[q].pos);
            s22.push(st.stress.yy);
            se.push(st.stress.von_mises());
        }
    }
    let interp = ScatteredInterp::new(pos)
        .ok_or_else(|| Error::postproc("too few integration points to interpolate".to_string()))?;
    let sy = ctx.material.sigma_y;
    let mut p22 = Vec::with_capacity(points.len());
    let mut pe = Vec::with_capacity(points.len());
    let mut fb = Vec::with_capacity(points.len());
    for p in &points {
        let a = interp.sample(*p, &s22);
        let b = interp.sample(*p, &se);
        if !a.value.is_finite() || !b.value.is_finite() {
            return Err(Error::postproc("non-finite profile sample".to_string()));
        }
        p22.push(a.value / sy);
        pe.push(b.value / sy);
        fb.push(!a.inside);
    }
    Ok(LineProfile {
        r: radii,
        theta,
        sigma22_over_sy: p22,
        sigmae_over_sy: pe,
        fallback: fb,
    })
}

/// Least-squares slope of log(y) against log(x) over the window
/// [x_lo, x_hi]; pairs with non-positive values are skipped.
pub fn loglog_slope(x: &[f64], y: &[f64], x_lo: f64, x_hi: f64) -> Option<f64> {
    let mut pts = Vec::new();
    for (xi, yi) in x.iter().zip(y.iter()) {
        if *xi >= x_lo && *xi <= x_hi && *xi > 0.0 && *yi > 0.0 {
            pts.push((xi.ln(), yi.ln()));
        }
    }
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Domain-integral J for nested annular domains around the tip.
///
/// The weighting function q falls linearly from 1 at the inner radius to 0
/// at the outer radius of each domain. Strain energy density is taken
/// from the per-point accumulated stress work. On symmetric half models
/// the result is doubled.
pub fn j_integral(
    ctx: &CaseContext,
    snap: &FieldSnapshot,
    domains: &[(f64, f64)],
    boundary_sets: &[&str],
) -> Result<Vec<f64>> {
    let crack = ctx
        .crack
        .as_ref()
        .ok_or_else(|| Error::postproc("J-integral needs a crack".to_string()))?;
    let tip = crack.tip();
    let t = crack.tip_tangent();

    // outer-boundary clearance check
    let mut min_boundary_r = f64::INFINITY;
    for set in boundary_sets {
        for &n in ctx.mesh.set(set)? {
            let c = ctx.mesh.coords[n];
            let d = ((c[0] - tip[0]).powi(2) + (c[1] - tip[1]).powi(2)).sqrt();
            min_boundary_r = min_boundary_r.min(d);
        }
    }
    let mut out = Vec::with_capacity(domains.len());
    for &(r_in, r_out) in domains {
        if !(r_out > r_in && r_in > 0.0) {
            return Err(Error::postproc(format!("bad J domain ({r_in}, {r_out})")));
        }
        if r_out >= min_boundary_r {
            return Err(Error::postproc(format!(
                "J domain outer radius {r_out} reaches the external boundary (min distance {min_boundary_r})"
            )));
        }
        // nodal q values
        let q_of = |p: [f64; 2]| -> f64 {
            let r = ((p[0] - tip[0]).powi(2) + (p[1] - tip[1]).powi(2)).sqrt();
            if r <= r_in {
                1.0
            } else if r >= r_out {
                0.0
            } else {
                (r_out - r) / (r_out - r_in)
            }
        };
        let qn: Vec<f64> = ctx.mesh.coords.iter().map(|&c| q_of(c)).collect();
        let mut j = 0.0;
        for (e, ed) in ctx.elems.iter().enumerate() {
            let conn = &ctx.mesh.elems[e];
            // skip elements with q identically 0 or 1 over all nodes
            let mut qmin = f64::INFINITY;
            let mut qmax = f64::NEG_INFINITY;
            for &n in conn {
                qmin = qmin.min(qn[n]);
                qmax = qmax.max(qn[n]);
            }
            if qmax <= 0.0 || qmin >= 1.0 {
                continue;
            }
            for (qp_idx, qp) in ed.qps.iter().enumerate() {
                // grad q via standard shape functions
                let (_, grads) = crate::elements::physical_gradients(
                    ctx.mesh.order,
                    qp.xi,
                    qp.eta,
                    &conn.iter().map(|&n| ctx.mesh.coords[n]).collect::<Vec<_>>(),
                )?;
                let mut gq = [0.0, 0.0];
                for (a, &n) in conn.iter().enumerate() {
                    gq[0] += grads[a][0] * qn[n];
                    gq[1] += grads[a][1] * qn[n];
                }
                let gu = ctx.grad_u_at(qp, &ed.dofs, &snap.u);
                // du_i / dx_t (derivative along the crack tangent)
                let du_dt = [
                    gu[0][0] * t[0] + gu[0][1] * t[1],
                    gu[1][0] * t[0] + gu[1][1] * t[1],
                ];
                let st = &snap.states[e][qp_idx];
                let s = st.stress;
                // sigma_ij du_i/dxt * dq/dxj summed over i, j (2D in-plane)
                let sig = [[s.xx, s.xy], [s.xy, s.yy]];
                let mut term = 0.0;
                for i in 0..2 {
                    for jj in 0..2 {
                        term += sig[i][jj] * du_dt[i] * gq[jj];
                    }
                }
                let gq_t = gq[0] * t[0] + gq[1] * t[1];
                term -= st.energy * gq_t;
                j += qp.weight * term;
            }
        }
        if ctx.symmetric_half {
            j *= 2.0;
        }
        out.push(j);
    }
    Ok(out)
}

/// Crack opening displacement at the crack mouth: the relative normal
/// separation of the two faces. On symmetric half models the mouth node's
/// normal displacement is doubled; on enriched full models the enrichment
/// jump is evaluated at the mouth.
pub fn crack_opening_displacement(ctx: &CaseContext, snap: &FieldSnapshot) -> Result<f64> {
    let crack = ctx
        .crack
        .as_ref()
        .ok_or_else(|| Error::postproc("no crack: opening displacement undefined".to_string()))?;
    let mouth = crack.mouth();
    let nrm = crack.tip_normal();
    if ctx.symmetric_half {
        // nearest node to the mouth on the crack face
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for (n, c) in ctx.mesh.coords.iter().enumerate() {
            let d = ((c[0] - mouth[0]).powi(2) + (c[1] - mouth[1]).powi(2)).sqrt();
            if d < best_d {
                best_d = d;
                best = n;
            }
        }
        let un = snap.u[2 * best] * nrm[0] + snap.u[2 * best + 1] * nrm[1];
        Ok(2.0 * un)
    } else {
        // nudge the evaluation point just inside the domain
        let t = crack.tip_tangent();
        let eps = 1e-6 * ctx.mesh.min_char_size().max(1e-9);
        let p = [mouth[0] + eps * t[0], mouth[1] + eps * t[1]];
        let jump = ctx.crack_jump(p, &snap.u)?;
        Ok(jump[0] * nrm[0] + jump[1] * nrm[1])
    }
}

/// Quadrilateral shape parameters from deformed corner coordinates
/// (counterclockwise, first node bottom-left), evaluated in the
/// centroid-translated local frame.
#[derive(Clone, Copy, Debug)]
pub struct DistortionReport {
    pub e2: f64,
    pub f3: f64,
    pub f4: f64,
    /// Aspect ratio, max(e2/f3, f3/e2); >= 1 when well defined.
    pub aspect: f64,
    /// Taper in the x-direction, f4/f3.
    pub taper_x: f64,
    /// Set when e2 or f3 vanished and the ratios overflowed.
    pub degenerate: bool,
}

pub fn distortion_metrics(corners: &[[f64; 2]; 4]) -> DistortionReport {
    let cx = 0.25 * (corners[0][0] + corners[1][0] + corners[2][0] + corners[3][0]);
    let cy = 0.25 * (corners[0][1] + corners[1][1] + corners[2][1] + corners[3][1]);
    let x: Vec<f64> = corners.iter().map(|c| c[0] - cx).collect();
    let y: Vec<f64> = corners.iter().map(|c| c[1] - cy).collect();
    let e2 = 0.25 * (-x[0] + x[1] + x[2] - x[3]);
    let f3 = 0.25 * (-y[0] - y[1] + y[2] + y[3]);
    let f4 = 0.25 * (y[0] - y[1] + y[2] - y[3]);
    let degenerate = e2 == 0.0 || f3 == 0.0;
    let aspect = if degenerate {
        f64::INFINITY
    } else {
        (e2 / f3).max(f3 / e2)
    };
    let taper_x = if f3 == 0.0 { f64::INFINITY } else { f4 / f3 };
    DistortionReport {
        e2,
        f3,
        f4,
        aspect,
        taper_x,
        degenerate,
    }
}

/// Deformed corner coordinates of an element (corner displacements come
/// from the standard dofs; the shifted enrichment vanishes at nodes).
pub fn deformed_corners(ctx: &CaseContext, elem: usize, u: &[f64]) -> [[f64; 2]; 4] {
    let c = ctx.mesh.corners(elem);
    let mut out = [[0.0; 2]; 4];
    for (k, &n) in c.iter().enumerate() {
        out[k] = [
            ctx.mesh.coords[n][0] + u[2 * n],
            ctx.mesh.coords[n][1] + u[2 * n + 1],
        ];
    }
    out
}

/// One row of the scalar history written per increment.
#[derive(Clone, Copy, Debug)]
pub struct HistoryRow {
    pub increment: usize,
    pub remote_strain: f64,
    pub j: f64,
    pub delta: f64,
    pub aspect_ratio: f64,
    pub taper_x: f64,
}

pub fn write_history_csv(path: &Path, rows: &[HistoryRow]) -> Result<()> {
    let mut s = String::from("increment,remote_strain,J_N_per_mm,delta_mm,aspect_ratio,taper_x\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{}",
            r.increment, r.remote_strain, r.j, r.delta, r.aspect_ratio, r.taper_x
        )
        .unwrap();
    }
    std::fs::write(path, s)?;
    Ok(())
}

pub fn write_profile_csv(path: &Path, profile: &LineProfile, l: f64) -> Result<()> {
    let mut s = String::from("r_mm,r_over_l,sigma22_over_sy,sigmae_over_sy\n");
    let l = if l > 0.0 { l } else { f64::NAN };
    for i in 0..profile.r.len() {
        writeln!(
            s,
            "{},{},{},{}",
            profile.r[i],
            profile.r[i] / l,
            profile.sigma22_over_sy[i],
            profile.sigmae_over_sy[i]
        )
        .unwrap();
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Legacy ASCII VTK (version 2.0) unstructured-grid snapshot: nodal
/// displacements and element-averaged stress measures.
pub fn write_vtk(path: &Path, ctx: &CaseContext, snap: &FieldSnapshot) -> Result<()> {
    let mesh = &ctx.mesh;
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 2.0\n");
    s.push_str("crack tip field snapshot\n");
    s.push_str("ASCII\n");
    s.push_str("DATASET UNSTRUCTURED_GRID\n");
    writeln!(s, "POINTS {} double", mesh.n_nodes()).unwrap();
    for c in &mesh.coords {
        writeln!(s, "{:.12e} {:.12e} 0.0", c[0], c[1]).unwrap();
    }
    let npe = mesh.nodes_per_elem();
    writeln!(s, "CELLS {} {}", mesh.n_elems(), mesh.n_elems() * (npe + 1)).unwrap();
    for conn in &mesh.elems {
        write!(s, "{npe}").unwrap();
        for &n in conn {
            write!(s, " {n}").unwrap();
        }
        s.push('\n');
    }
    writeln!(s, "CELL_TYPES {}", mesh.n_elems()).unwrap();
    let ct = if mesh.order == 1 { 9 } else { 23 };
    for _ in 0..mesh.n_elems() {
        writeln!(s, "{ct}").unwrap();
    }
    writeln!(s, "POINT_DATA {}", mesh.n_nodes()).unwrap();
    s.push_str("VECTORS displacement double\n");
    for n in 0..mesh.n_nodes() {
        writeln!(s, "{:.12e} {:.12e} 0.0", snap.u[2 * n], snap.u[2 * n + 1]).unwrap();
    }
    writeln!(s, "CELL_DATA {}", mesh.n_elems()).unwrap();
    let averages = |f: &dyn Fn(&crate::material::GaussPointState) -> f64| -> Vec<f64> {
        snap.states
            .iter()
            .map(|elem| {
                if elem.is_empty() {
                    0.0
                } else {
                    elem.iter().map(|st| f(st)).sum::<f64>() / elem.len() as f64
                }
            })
            .collect()
    };
    for (name, vals) in [
        ("sigma_e", averages(&|st| st.stress.von_mises())),
        ("sigma_22", averages(&|st| st.stress.yy)),
        ("eps_p", averages(&|st| st.eps_p)),
        ("eta_p", averages(&|st| st.eta_p)),
    ] {
        writeln!(s, "SCALARS {name} double 1").unwrap();
        s.push_str("LOOKUP_TABLE default\n");
        for v in vals {
            writeln!(s, "{v:.12e}").unwrap();
        }
    }
    std::fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distortion_unit_square() {
        let r = distortion_metrics(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert!((r.e2 - 0.5).abs() < 1e-14);
        assert!((r.f3 - 0.5).abs() < 1e-14);
        assert!(r.f4.abs() < 1e-14);
        assert!((r.aspect - 1.0).abs() < 1e-14);
        assert!(r.taper_x.abs() < 1e-14);
        assert!(!r.degenerate);
    }

    #[test]
    fn distortion_rectangle_and_trapezoid() {
        let r = distortion_metrics(&[[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]]);
        assert!((r.e2 - 1.0).abs() < 1e-14);
        assert!((r.f3 - 0.5).abs() < 1e-14);
        assert!((r.aspect - 2.0).abs() < 1e-14);
        assert!(r.taper_x.abs() < 1e-14);

        let t = distortion_metrics(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.5], [0.0, 1.0]]);
        assert!((t.f3 - 0.625).abs() < 1e-14);
        assert!((t.f4 - 0.125).abs() < 1e-14);
        assert!((t.taper_x - 0.2).abs() < 1e-14);
    }

    #[test]
    fn distortion_invariances() {
        let base = [[0.1, 0.2], [1.3, 0.15], [1.2, 1.4], [0.05, 1.1]];
        let r0 = distortion_metrics(&base);
        // rigid translation
        let shifted: [[f64; 2]; 4] = core::array::from_fn(|i| [base[i][0] + 5.0, base[i][1] - 3.0]);
        let r1 = distortion_metrics(&shifted);
        assert!((r0.e2 - r1.e2).abs() < 1e-12);
        assert!((r0.f3 - r1.f3).abs() < 1e-12);
        assert!((r0.f4 - r1.f4).abs() < 1e-12);
        // uniform scaling leaves the ratios unchanged
        let scaled: [[f64; 2]; 4] = core::array::from_fn(|i| [2.5 * base[i][0], 2.5 * base[i][1]]);
        let r2 = distortion_metrics(&scaled);
        assert!((r0.aspect - r2.aspect).abs() < 1e-12);
        assert!((r0.taper_x - r2.taper_x).abs() < 1e-12);
    }

    #[test]
    fn degenerate_quad_flagged() {
        let r = distortion_metrics(&[[0.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 1.0]]);
        assert!(r.degenerate);
        assert!(r.aspect.is_infinite());
    }

    #[test]
    fn loglog_slope_of_power_law() {
        let x: Vec<f64> = (1..50).map(|i| 0.01 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(-2.0 / 3.0)).collect();
        let s = loglog_slope(&x, &y, 0.02, 0.4).unwrap();
        assert!((s + 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn history_csv_schema() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("history.csv");
        write_history_csv(
            &path,
            &[HistoryRow {
                increment: 1,
                remote_strain: 1e-5,
                j: 0.5,
                delta: 1e-4,
                aspect_ratio: 1.5,
                taper_x: -0.1,
            }],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "increment,remote_strain,J_N_per_mm,delta_mm,aspect_ratio,taper_x"
        );
        assert_eq!(lines.count(), 1);
    }

    #[test]
    fn profile_csv_has_header_plus_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("profile_sigma22.csv");
        let p = LineProfile {
            r: vec![0.001, 0.01, 0.1],
            theta: 0.0,
            sigma22_over_sy: vec![5.0, 3.0, 1.5],
            sigmae_over_sy: vec![4.0, 2.5, 1.2],
            fallback: vec![false; 3],
        };
        write_profile_csv(&path, &p, 0.005).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("r_mm,r_over_l,"));
    }
}
