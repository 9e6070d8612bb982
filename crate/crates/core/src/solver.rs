//! Global DOF management, element integration and assembly of internal
//! force and consistent stiffness, boundary conditions, incremental
//! loading, and Newton-Raphson solution of the nonlinear system.
//!
//! All element geometry, quadrature layouts and enrichment-function
//! values are precomputed once per case (small-strain, fixed mesh and
//! crack), so each Newton iteration only gathers local displacement
//! increments, runs the constitutive update, and assembles.

use crate::elements::{gauss_3x3, inverse_map, physical_gradients, shape_functions, GAUSS_2X2};
use crate::error::{Error, NewtonFailure, Result};
use crate::material::{stress_update, GaussPointState, MaterialParams};
use crate::mesh::{CrackGeometry, Mesh};
use crate::quadrature::{partition_element, subdivide_toward, triangle_points};
use crate::recovery::{eta_p_at, recover_nodal_increments};
use crate::tensor::SymTensor2;
use crate::xfem::{
    blending_weight, classify_nodes, heaviside, tip_function_gradients, tip_functions,
    ElemClass, EnrichStrategy, EnrichedDofMap, EnrichmentConfig, R_MIN_CLAMP,
};
use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use rayon::prelude::*;
use std::sync::Once;

static FAER_SEQ: Once = Once::new();

fn init_faer() {
    // Sequential factorization keeps result archives bit-identical across
    // thread counts; element loops carry the parallelism instead.
    FAER_SEQ.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

/// One scalar approximation function evaluated at a quadrature point
/// (standard shape function, shifted Heaviside term, or weighted shifted
/// tip term); each drives an (x, y) dof pair.
#[derive(Clone, Copy, Debug)]
pub struct ScalarFn {
    pub val: f64,
    pub grad: [f64; 2],
}

#[derive(Clone, Debug)]
pub struct QpData {
    /// Physical integration weight (area measure, unit thickness).
    pub weight: f64,
    pub pos: [f64; 2],
    pub xi: f64,
    pub eta: f64,
    pub fns: Vec<ScalarFn>,
}

#[derive(Clone, Debug)]
pub struct ElemData {
    /// Global dof indices, two per scalar function (x then y).
    pub dofs: Vec<usize>,
    pub qps: Vec<QpData>,
}

/// Prescribed displacement on one dof, scaled by the load factor.
#[derive(Clone, Copy, Debug)]
pub struct Constraint {
    pub dof: usize,
    pub unit: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverSettings {
    /// Relative residual tolerance.
    pub tol: f64,
    pub max_iter: usize,
    /// Bisection levels before giving up.
    pub max_bisections: usize,
    pub parallel: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            tol: 1e-6,
            max_iter: 25,
            max_bisections: 4,
            parallel: true,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(Error::config(format!(
                "newton tolerance {} outside (0, 1e-2]",
                self.tol
            )));
        }
        if self.max_iter < 1 {
            return Err(Error::config("newton needs at least one iteration".to_string()));
        }
        Ok(())
    }
}

/// Precomputed case geometry: mesh, crack, enrichment and per-element
/// integration tables.
pub struct CaseContext {
    pub mesh: Mesh,
    pub crack: Option<CrackGeometry>,
    pub cfg: EnrichmentConfig,
    pub map: EnrichedDofMap,
    pub material: MaterialParams,
    pub elems: Vec<ElemData>,
    /// Doubles J and COD computed on a symmetric half model.
    pub symmetric_half: bool,
}

impl CaseContext {
    pub fn new(
        mesh: Mesh,
        crack: Option<CrackGeometry>,
        cfg: EnrichmentConfig,
        material: MaterialParams,
    ) -> Result<Self> {
        material.validate()?;
        mesh.validate()?;
        let map = match (&crack, cfg.strategy) {
            (Some(c), s) if s != EnrichStrategy::None => classify_nodes(&mesh, c, &cfg)?,
            _ => EnrichedDofMap::empty(&mesh),
        };
        let mut elems = Vec::with_capacity(mesh.n_elems());
        for e in 0..mesh.n_elems() {
            elems.push(build_elem(&mesh, crack.as_ref(), &cfg, &map, e)?);
        }
        Ok(CaseContext {
            mesh,
            crack,
            cfg,
            map,
            material,
            elems,
            symmetric_half: false,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.map.n_dofs
    }

    /// Displacement at a precomputed quadrature point.
    pub fn displacement_at(&self, qp: &QpData, dofs: &[usize], u: &[f64]) -> [f64; 2] {
        let mut d = [0.0, 0.0];
        for (k, f) in qp.fns.iter().enumerate() {
            d[0] += f.val * u[dofs[2 * k]];
            d[1] += f.val * u[dofs[2 * k + 1]];
        }
        d
    }

    /// Displacement gradient du_i/dx_j at a quadrature point.
    pub fn grad_u_at(&self, qp: &QpData, dofs: &[usize], u: &[f64]) -> [[f64; 2]; 2] {
        let mut g = [[0.0; 2]; 2];
        for (k, f) in qp.fns.iter().enumerate() {
            let ux = u[dofs[2 * k]];
            let uy = u[dofs[2 * k + 1]];
            for j in 0..2 {
                g[0][j] += f.grad[j] * ux;
                g[1][j] += f.grad[j] * uy;
            }
        }
        g
    }

    /// Strain increment tensor at a qp from a local displacement increment.
    fn strain_at(&self, qp: &QpData, dofs: &[usize], du: &[f64]) -> SymTensor2 {
        let mut exx = 0.0;
        let mut eyy = 0.0;
        let mut exy = 0.0;
        for (k, f) in qp.fns.iter().enumerate() {
            let ux = du[dofs[2 * k]];
            let uy = du[dofs[2 * k + 1]];
            exx += f.grad[0] * ux;
            eyy += f.grad[1] * uy;
            exy += 0.5 * (f.grad[1] * ux + f.grad[0] * uy);
        }
        SymTensor2::new(exx, eyy, 0.0, exy)
    }

    /// Displacement jump across the crack at a point on the crack surface
    /// (behind the tip): 2 sum N_J a_J from Heaviside terms plus the jump
    /// of the first tip function, 2 r^lambda, from tip terms.
    pub fn crack_jump(&self, point: [f64; 2], u: &[f64]) -> Result<[f64; 2]> {
        let crack = self
            .crack
            .as_ref()
            .ok_or_else(|| Error::postproc("no crack in this case".to_string()))?;
        let e = self
            .mesh
            .find_elem(point)
            .ok_or_else(|| Error::postproc("jump point outside mesh".to_string()))?;
        let corners = self.mesh.corner_coords(e);
        let refc = inverse_map(&corners, point)?;
        let (n, _) = shape_functions(self.mesh.order, refc[0], refc[1]);
        let conn = &self.mesh.elems[e];
        let mut jump = [0.0, 0.0];
        let w = if self.cfg.corrected_blending {
            blending_weight(&n, conn, &self.map)
        } else {
            1.0
        };
        let (r, _) = crack.polar(point);
        let f1_jump = 2.0 * r.max(R_MIN_CLAMP).powf(self.cfg.lambda);
        for (a, &node) in conn.iter().enumerate() {
            if let Some(&base) = self.map.heaviside.get(&node) {
                jump[0] += 2.0 * n[a] * u[base];
                jump[1] += 2.0 * n[a] * u[base + 1];
            }
            if let Some(&base) = self.map.tip.get(&node) {
                // only F1 = r^l sin(theta/2) jumps across the faces
                jump[0] += n[a] * w * f1_jump * u[base];
                jump[1] += n[a] * w * f1_jump * u[base + 1];
            }
        }
        Ok(jump)
    }
}

/// Quadrature layout for one element by its class.
fn element_quadrature(
    mesh: &Mesh,
    crack: Option<&CrackGeometry>,
    cfg: &EnrichmentConfig,
    class: ElemClass,
    e: usize,
) -> Result<Vec<(f64, f64, f64, [f64; 2])>> {
    // returns (xi, eta, physical weight, physical pos)
    let conn = &mesh.elems[e];
    let coords: Vec<[f64; 2]> = conn.iter().map(|&n| mesh.coords[n]).collect();
    let corners = mesh.corner_coords(e);
    let mut out = Vec::new();
    match class {
        ElemClass::Standard => {
            for &(xi, eta, w) in GAUSS_2X2 {
                let (det, _) = physical_gradients(mesh.order, xi, eta, &coords)?;
                let pos = crate::elements::map_to_physical(mesh.order, xi, eta, &coords);
                out.push((xi, eta, w * det, pos));
            }
        }
        ElemClass::NearTip => {
            // Elevated quadrature: uncut pair of triangles with the full
            // triangle rule, or a 3x3 tensor rule as a floor.
            let tris = [
                [corners[0], corners[1], corners[2]],
                [corners[0], corners[2], corners[3]],
            ];
            for t in &tris {
                for (pos, w) in triangle_points(t, cfg.tri_order)? {
                    let rc = inverse_map(&corners, pos)?;
                    out.push((rc[0], rc[1], w, pos));
                }
            }
            if out.is_empty() {
                for (xi, eta, w) in gauss_3x3() {
                    let (det, _) = physical_gradients(mesh.order, xi, eta, &coords)?;
                    let pos = crate::elements::map_to_physical(mesh.order, xi, eta, &coords);
                    out.push((xi, eta, w * det, pos));
                }
            }
        }
        ElemClass::Cut | ElemClass::Tip => {
            let crack = crack.ok_or_else(|| Error::enrichment("cut element without crack".to_string()))?;
            let tris = partition_element(&corners, crack)?;
            let tip = crack.tip();
            for t in tris {
                let tip_vertex = (0..3).find(|&k| {
                    let d = ((t[k][0] - tip[0]).powi(2) + (t[k][1] - tip[1]).powi(2)).sqrt();
                    d < 1e-12 * (1.0 + tip[0].abs() + tip[1].abs())
                });
                let parts = match (class, tip_vertex) {
                    (ElemClass::Tip, Some(apex)) => subdivide_toward(t, apex, cfg.tip_subdiv),
                    _ => vec![t],
                };
                for part in parts {
                    for (pos, w) in triangle_points(&part, cfg.tri_order)? {
                        let rc = inverse_map(&corners, pos)?;
                        out.push((rc[0], rc[1], w, pos));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn build_elem(
    mesh: &Mesh,
    crack: Option<&CrackGeometry>,
    cfg: &EnrichmentConfig,
    map: &EnrichedDofMap,
    e: usize,
) -> Result<ElemData> {
    let class = map.elem_class[e];
    let conn = &mesh.elems[e];
    let coords: Vec<[f64; 2]> = conn.iter().map(|&n| mesh.coords[n]).collect();

    // Local dof table: standard pairs, Heaviside pairs, tip pairs.
    let mut dofs: Vec<usize> = Vec::new();
    for &n in conn.iter() {
        dofs.push(2 * n);
        dofs.push(2 * n + 1);
    }
    let h_nodes: Vec<(usize, usize)> = conn
        .iter()
        .enumerate()
        .filter_map(|(a, n)| map.heaviside.get(n).map(|&b| (a, b)))
        .collect();
    for &(_, base) in &h_nodes {
        dofs.push(base);
        dofs.push(base + 1);
    }
    let t_nodes: Vec<(usize, usize)> = conn
        .iter()
        .enumerate()
        .filter_map(|(a, n)| map.tip.get(n).map(|&b| (a, b)))
        .collect();
    for &(_, base) in &t_nodes {
        for alpha in 0..4 {
            dofs.push(base + 2 * alpha);
            dofs.push(base + 2 * alpha + 1);
        }
    }

    let qp_geo = element_quadrature(mesh, crack, cfg, class, e)?;
    let mut qps = Vec::with_capacity(qp_geo.len());
    for (xi, eta, weight, pos) in qp_geo {
        let (nvals, _) = shape_functions(mesh.order, xi, eta);
        let (_, grads) = physical_gradients(mesh.order, xi, eta, &coords)?;
        let mut fns: Vec<ScalarFn> = Vec::with_capacity(dofs.len() / 2);
        for a in 0..conn.len() {
            fns.push(ScalarFn {
                val: nvals[a],
                grad: grads[a],
            });
        }
        if !h_nodes.is_empty() || !t_nodes.is_empty() {
            let crack = crack.expect("enriched element requires a crack");
            if !h_nodes.is_empty() {
                let h = heaviside(crack.signed_distance(pos));
                for &(a, _) in &h_nodes {
                    let shift = h - map.h_at_node[&conn[a]];
                    fns.push(ScalarFn {
                        val: nvals[a] * shift,
                        grad: [grads[a][0] * shift, grads[a][1] * shift],
                    });
                }
            }
            if !t_nodes.is_empty() {
                let (r, th) = crack.polar(pos);
                let r = r.max(R_MIN_CLAMP);
                let f = tip_functions(r, th, cfg.lambda)?;
                let df = tip_function_gradients(crack, r, th, cfg.lambda)?;
                let (w, dw) = if cfg.corrected_blending {
                    let mut w = 0.0;
                    let mut dw = [0.0, 0.0];
                    for (a, n) in conn.iter().enumerate() {
                        if map.tip.contains_key(n) {
                            w += nvals[a];
                            dw[0] += grads[a][0];
                            dw[1] += grads[a][1];
                        }
                    }
                    (w, dw)
                } else {
                    (1.0, [0.0, 0.0])
                };
                for &(a, _) in &t_nodes {
                    let fa = map.f_at_node[&conn[a]];
                    for alpha in 0..4 {
                        let s = f[alpha] - fa[alpha];
                        fns.push(ScalarFn {
                            val: nvals[a] * w * s,
                            grad: [
                                grads[a][0] * w * s
                                    + nvals[a] * dw[0] * s
                                    + nvals[a] * w * df[alpha][0],
                                grads[a][1] * w * s
                                    + nvals[a] * dw[1] * s
                                    + nvals[a] * w * df[alpha][1],
                            ],
                        });
                    }
                }
            }
        }
        qps.push(QpData {
            weight,
            pos,
            xi,
            eta,
            fns,
        });
    }
    Ok(ElemData { dofs, qps })
}

/// Condenses the 4x4 tensor-component tangent to the plane-strain 3x3
/// engineering form (rows/cols xx, yy, xy with engineering shear).
///
/// The viscoplastic flow rule normalizes by the strain-rate direction, so
/// the exact algorithmic tangent is mildly nonsymmetric wherever the
/// stress deviator is not aligned with the strain increment; it is kept
/// as-is (exact Newton operator, symmetric sparsity pattern). The elastic
/// tangent stays exactly symmetric.
pub fn condense_tangent(s: &[[f64; 4]; 4]) -> [[f64; 3]; 3] {
    let rows = [0usize, 1, 3];
    let mut d = [[0.0; 3]; 3];
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in rows.iter().enumerate() {
            let col = s[r][c];
            d[i][j] = if j == 2 { 0.5 * col } else { col };
        }
    }
    d
}

/// Element internal force and stiffness result.
pub struct ElemForceStiffness {
    pub f: Vec<f64>,
    pub k: Vec<f64>, // row-major n x n
    pub trial: Vec<GaussPointState>,
    pub dplast: Vec<SymTensor2>,
}

/// Integrates one element: f = int B^T sigma, K = int B^T D B over the
/// element's quadrature, with the constitutive update run from the
/// committed state through the accumulated displacement increment.
pub fn element_force_stiffness(
    ctx: &CaseContext,
    e: usize,
    du: &[f64],
    committed: &[GaussPointState],
) -> Result<ElemForceStiffness> {
    let ed = &ctx.elems[e];
    let n = ed.dofs.len();
    let mut f = vec![0.0; n];
    let mut k = vec![0.0; n * n];
    let mut trial = Vec::with_capacity(ed.qps.len());
    let mut dplast = Vec::with_capacity(ed.qps.len());
    for (q, qp) in ed.qps.iter().enumerate() {
        let deps = ctx.strain_at(qp, &ed.dofs, du);
        let up = stress_update(deps, &committed[q], &ctx.material).map_err(|err| {
            let msg = format!(
                "element {e} qp {q} at ({:.4}, {:.4}): {err}",
                qp.pos[0], qp.pos[1]
            );
            match err {
                Error::MaterialUnstable(_) => Error::MaterialUnstable(msg),
                _ => Error::Material(msg),
            }
        })?;
        let d3 = condense_tangent(&up.tangent);
        let s = &up.state.stress;
        let sig = [s.xx, s.yy, s.xy];
        // B columns: per scalar fn, x-dof: [gx, 0, gy]; y-dof: [0, gy, gx]
        let w = qp.weight;
        for (a, fa) in qp.fns.iter().enumerate() {
            let (gx, gy) = (fa.grad[0], fa.grad[1]);
            f[2 * a] += w * (gx * sig[0] + gy * sig[2]);
            f[2 * a + 1] += w * (gy * sig[1] + gx * sig[2]);
        }
        for (a, fa) in qp.fns.iter().enumerate() {
            let ba: [[f64; 3]; 2] = [
                [fa.grad[0], 0.0, fa.grad[1]],
                [0.0, fa.grad[1], fa.grad[0]],
            ];
            for (b, fb) in qp.fns.iter().enumerate() {
                let bb: [[f64; 3]; 2] = [
                    [fb.grad[0], 0.0, fb.grad[1]],
                    [0.0, fb.grad[1], fb.grad[0]],
                ];
                for ca in 0..2 {
                    for cb in 0..2 {
                        let mut v = 0.0;
                        for i in 0..3 {
                            for j in 0..3 {
                                v += ba[ca][i] * d3[i][j] * bb[cb][j];
                            }
                        }
                        k[(2 * a + ca) * n + (2 * b + cb)] += w * v;
                    }
                }
            }
        }
        if !f.iter().all(|v| v.is_finite()) {
            return Err(Error::Material(format!(
                "non-finite element force in element {e}"
            )));
        }
        trial.push(up.state);
        dplast.push(up.plastic_increment);
    }
    Ok(ElemForceStiffness {
        f,
        k,
        trial,
        dplast,
    })
}

/// Assembly output: global internal force, stiffness triplets, and the
/// per-element trial states.
pub struct Assembled {
    pub f_int: Vec<f64>,
    pub triplets: Vec<(usize, usize, f64)>,
    pub trial: Vec<Vec<GaussPointState>>,
    pub dplast: Vec<Vec<SymTensor2>>,
}

/// Assembles force and stiffness over all elements. Element contributions
/// are computed in parallel and reduced in element order, so the result is
/// identical to the serial loop.
pub fn assemble(
    ctx: &CaseContext,
    du: &[f64],
    committed: &[Vec<GaussPointState>],
    parallel: bool,
) -> Result<Assembled> {
    let ne = ctx.mesh.n_elems();
    let per_elem: Vec<Result<ElemForceStiffness>> = if parallel {
        (0..ne)
            .into_par_iter()
            .map(|e| element_force_stiffness(ctx, e, du, &committed[e]))
            .collect()
    } else {
        (0..ne)
            .map(|e| element_force_stiffness(ctx, e, du, &committed[e]))
            .collect()
    };
    let mut f_int = vec![0.0; ctx.n_dofs()];
    let mut triplets = Vec::new();
    let mut trial = Vec::with_capacity(ne);
    let mut dplast = Vec::with_capacity(ne);
    for (e, res) in per_elem.into_iter().enumerate() {
        let efs = res?;
        let dofs = &ctx.elems[e].dofs;
        let n = dofs.len();
        for (a, &ga) in dofs.iter().enumerate() {
            f_int[ga] += efs.f[a];
            for (b, &gb) in dofs.iter().enumerate() {
                let v = efs.k[a * n + b];
                if v != 0.0 {
                    triplets.push((ga, gb, v));
                }
            }
        }
        trial.push(efs.trial);
        dplast.push(efs.dplast);
    }
    Ok(Assembled {
        f_int,
        triplets,
        trial,
        dplast,
    })
}

/// Direct sparse solve of the reduced (free-dof) system K d = r.
fn solve_reduced(
    triplets: &[(usize, usize, f64)],
    rhs: &[f64],
    free_index: &[usize],
    n_free: usize,
) -> Result<Vec<f64>> {
    init_faer();
    let mut t: Vec<Triplet<usize, usize, f64>> = Vec::with_capacity(triplets.len());
    for &(r, c, v) in triplets {
        let (fr, fc) = (free_index[r], free_index[c]);
        if fr != usize::MAX && fc != usize::MAX {
            t.push(Triplet::new(fr, fc, v));
        }
    }
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n_free, n_free, &t)
        .map_err(|e| Error::Singular {
            dof: 0,
            detail: format!("matrix build failed: {e:?}"),
        })?;
    let lu = mat.sp_lu().map_err(|e| {
        let dof = weakest_diagonal(triplets, free_index, n_free);
        Error::Singular {
            dof,
            detail: format!("sparse LU failed: {e:?}"),
        }
    })?;
    let b = faer::Mat::<f64>::from_fn(n_free, 1, |i, _| rhs[i]);
    let x = lu.solve(&b);
    let sol: Vec<f64> = (0..n_free).map(|i| x[(i, 0)]).collect();
    if !sol.iter().all(|v| v.is_finite()) {
        let dof = weakest_diagonal(triplets, free_index, n_free);
        return Err(Error::Singular {
            dof,
            detail: "non-finite solution (zero pivot)".to_string(),
        });
    }
    Ok(sol)
}

/// Reports the free dof with the smallest assembled diagonal, the most
/// likely offending pivot for singular systems.
fn weakest_diagonal(triplets: &[(usize, usize, f64)], free_index: &[usize], n_free: usize) -> usize {
    let mut diag = vec![0.0_f64; n_free];
    for &(r, c, v) in triplets {
        if r == c && free_index[r] != usize::MAX {
            diag[free_index[r]] += v;
        }
    }
    let mut weakest = 0usize;
    let mut best = f64::INFINITY;
    for (i, d) in diag.iter().enumerate() {
        if d.abs() < best {
            best = d.abs();
            weakest = i;
        }
    }
    // map back to global numbering
    free_index
        .iter()
        .position(|&f| f == weakest)
        .unwrap_or(weakest)
}

/// Per-increment convergence report.
#[derive(Clone, Debug)]
pub struct IncrementStats {
    pub iterations: usize,
    pub residuals: Vec<f64>,
    pub bisections: usize,
}

/// Field snapshot of one committed increment.
#[derive(Clone, Debug)]
pub struct FieldSnapshot {
    pub load: f64,
    pub u: Vec<f64>,
    pub states: Vec<Vec<GaussPointState>>,
}

/// Incremental nonlinear simulation with committed Gauss states, lagged
/// effective gradient, and automatic step bisection.
pub struct Simulation {
    pub ctx: CaseContext,
    pub constraints: Vec<Constraint>,
    pub settings: SolverSettings,
    pub u: Vec<f64>,
    u_committed: Vec<f64>,
    pub states: Vec<Vec<GaussPointState>>,
    pub nodal_eps_p: Vec<SymTensor2>,
    pub load: f64,
    pub log: Vec<String>,
    last_f_int: Vec<f64>,
    free_index: Vec<usize>,
    n_free: usize,
}

impl Simulation {
    pub fn new(ctx: CaseContext, constraints: Vec<Constraint>, settings: SolverSettings) -> Result<Self> {
        settings.validate()?;
        let n = ctx.n_dofs();
        let mut constrained = vec![false; n];
        for c in &constraints {
            if c.dof >= n {
                return Err(Error::config(format!("constraint dof {} out of range", c.dof)));
            }
            constrained[c.dof] = true;
        }
        let mut free_index = vec![usize::MAX; n];
        let mut n_free = 0;
        for (d, &is_c) in constrained.iter().enumerate() {
            if !is_c {
                free_index[d] = n_free;
                n_free += 1;
            }
        }
        let states: Vec<Vec<GaussPointState>> = ctx
            .elems
            .iter()
            .map(|ed| vec![GaussPointState::default(); ed.qps.len()])
            .collect();
        let nodal_eps_p = vec![SymTensor2::ZERO; ctx.mesh.n_nodes()];
        Ok(Simulation {
            u: vec![0.0; n],
            u_committed: vec![0.0; n],
            states,
            nodal_eps_p,
            load: 0.0,
            log: Vec::new(),
            last_f_int: vec![0.0; n],
            free_index,
            n_free,
            ctx,
            constraints,
            settings,
        })
    }

    fn apply_constraints(&mut self, load: f64) {
        for c in &self.constraints {
            self.u[c.dof] = c.unit * load;
        }
    }

    fn residual_norm(&self, f_int: &[f64]) -> f64 {
        let mut s = 0.0;
        for (d, &fi) in f_int.iter().enumerate() {
            if self.free_index[d] != usize::MAX {
                s += fi * fi;
            }
        }
        s.sqrt()
    }

    fn try_assemble(&self) -> Result<Option<Assembled>> {
        let du: Vec<f64> = self
            .u
            .iter()
            .zip(self.u_committed.iter())
            .map(|(a, b)| a - b)
            .collect();
        match assemble(&self.ctx, &du, &self.states, self.settings.parallel) {
            Ok(a) => Ok(Some(a)),
            // a runaway trial state; recoverable by shrinking the step
            Err(Error::MaterialUnstable(_)) => Ok(None),
            Err(other) => Err(other),
        }
    }

    /// One Newton solve toward the target load factor, globalized by a
    /// backtracking line search on the residual norm. Returns stats and
    /// leaves trial states ready to commit on success.
    fn newton(
        &mut self,
        inc_label: usize,
        target: f64,
    ) -> Result<(bool, Vec<f64>, Option<(Vec<Vec<GaussPointState>>, Vec<Vec<SymTensor2>>, Vec<f64>)>)>
    {
        self.apply_constraints(target);
        let mut asm = match self.try_assemble()? {
            Some(a) => a,
            None => {
                self.log
                    .push(format!("{inc_label} 0 unstable at increment start"));
                return Ok((false, Vec::new(), None));
            }
        };
        let mut rnorm = self.residual_norm(&asm.f_int);
        let r0 = rnorm;
        let mut residuals = Vec::new();
        for it in 0..=self.settings.max_iter {
            let rel = if r0 > 0.0 { rnorm / r0 } else { 0.0 };
            residuals.push(rel);
            self.log.push(format!("{inc_label} {it} {rel:.6e}"));
            let force_scale = asm
                .f_int
                .iter()
                .enumerate()
                .filter(|(d, _)| self.free_index[*d] == usize::MAX)
                .map(|(_, f)| f.abs())
                .fold(0.0_f64, f64::max)
                .max(r0);
            let abs_floor = 1e-12 * force_scale;
            let converged = r0 <= f64::MIN_POSITIVE
                || (it > 0 && (rel <= self.settings.tol || rnorm <= abs_floor));
            if converged {
                return Ok((true, residuals, Some((asm.trial, asm.dplast, asm.f_int))));
            }
            if it == self.settings.max_iter {
                break;
            }
            // solve K d = -R_free
            let rhs: Vec<f64> = {
                let mut r = vec![0.0; self.n_free];
                for (d, &fi) in asm.f_int.iter().enumerate() {
                    let fi_idx = self.free_index[d];
                    if fi_idx != usize::MAX {
                        r[fi_idx] = -fi;
                    }
                }
                r
            };
            let delta = solve_reduced(&asm.triplets, &rhs, &self.free_index, self.n_free)?;
            // backtracking line search on ||R||
            let u_base = self.u.clone();
            let mut alpha = 1.0_f64;
            let mut accepted = false;
            let mut probes = Vec::new();
            for _ in 0..10 {
                for (d, &fi_idx) in self.free_index.iter().enumerate() {
                    if fi_idx != usize::MAX {
                        self.u[d] = u_base[d] + alpha * delta[fi_idx];
                    }
                }
                if let Some(asm_try) = self.try_assemble()? {
                    let rn = self.residual_norm(&asm_try.f_int);
                    probes.push((alpha, rn / rnorm));
                    if rn.is_finite() && (rn <= rnorm * (1.0 - 1e-4 * alpha) || rn <= abs_floor) {
                        asm = asm_try;
                        rnorm = rn;
                        accepted = true;
                        break;
                    }
                } else {
                    probes.push((alpha, f64::NAN));
                }
                alpha *= 0.5;
            }
            if !accepted {
                // no descent direction left: report divergence for bisection
                self.u = u_base;
                self.log.push(format!(
                    "{inc_label} {it} line search exhausted: {probes:?}"
                ));
                return Ok((false, residuals, None));
            }
        }
        Ok((false, residuals, None))
    }

    fn commit(
        &mut self,
        target: f64,
        trial: Vec<Vec<GaussPointState>>,
        dplast: Vec<Vec<SymTensor2>>,
        f_int: Vec<f64>,
    ) {
        // Monotonic plasticity bookkeeping.
        for (e, elem) in trial.iter().enumerate() {
            for (q, st) in elem.iter().enumerate() {
                debug_assert!(st.eps_p >= self.states[e][q].eps_p - 1e-12);
            }
        }
        self.states = trial;
        self.u_committed = self.u.clone();
        self.load = target;
        self.last_f_int = f_int;
        // Recover nodal plastic increments and refresh the lagged gradient.
        if self.ctx.material.l > 0.0 {
            let mut pos = Vec::new();
            let mut vals = Vec::new();
            for (e, elem) in dplast.iter().enumerate() {
                for (q, dp) in elem.iter().enumerate() {
                    pos.push(self.ctx.elems[e].qps[q].pos);
                    vals.push(*dp);
                }
            }
            let rec = recover_nodal_increments(&self.ctx.mesh, &pos, &vals);
            for (n, v) in rec.nodal.iter().enumerate() {
                self.nodal_eps_p[n] += *v;
            }
            for e in 0..self.ctx.elems.len() {
                for q in 0..self.ctx.elems[e].qps.len() {
                    let qp = &self.ctx.elems[e].qps[q];
                    let eta = eta_p_at(&self.ctx.mesh, e, qp.xi, qp.eta, &self.nodal_eps_p);
                    self.states[e][q].eta_p = eta;
                }
            }
        }
    }

    /// Advances the committed solution to the target load factor, with
    /// automatic bisection on divergence.
    pub fn increment_to(&mut self, inc_label: usize, target: f64) -> Result<IncrementStats> {
        self.increment_recursive(inc_label, target, 0)
    }

    fn increment_recursive(
        &mut self,
        inc_label: usize,
        target: f64,
        depth: usize,
    ) -> Result<IncrementStats> {
        let (ok, residuals, payload) = self.newton(inc_label, target)?;
        if ok {
            let (trial, dplast, f_int) = payload.unwrap();
            self.commit(target, trial, dplast, f_int);
            return Ok(IncrementStats {
                iterations: residuals.len().saturating_sub(1),
                residuals,
                bisections: depth,
            });
        }
        // restore and bisect
        self.u = self.u_committed.clone();
        if depth >= self.settings.max_bisections {
            return Err(Error::Newton(Box::new(NewtonFailure {
                increment: inc_label,
                bisections: depth,
                residuals,
                committed_load: self.load,
            })));
        }
        let mid = 0.5 * (self.load + target);
        let s1 = self.increment_recursive(inc_label, mid, depth + 1)?;
        let s2 = self.increment_recursive(inc_label, target, depth + 1)?;
        Ok(IncrementStats {
            iterations: s1.iterations + s2.iterations,
            residuals: s2.residuals,
            bisections: depth + 1,
        })
    }

    /// Internal forces at constrained dofs of the last committed increment.
    pub fn reactions(&self) -> &[f64] {
        &self.last_f_int
    }

    /// Sum of reaction components over a node set (component 0 = x, 1 = y).
    pub fn reaction_sum(&self, set: &str, component: usize) -> Result<f64> {
        let nodes = self.ctx.mesh.set(set)?;
        Ok(nodes.iter().map(|&n| self.last_f_int[2 * n + component]).sum())
    }

    /// Displacements of the last committed increment.
    pub fn committed_u(&self) -> &[f64] {
        &self.u_committed
    }

    pub fn snapshot(&self) -> FieldSnapshot {
        FieldSnapshot {
            load: self.load,
            u: self.u_committed.clone(),
            states: self.states.clone(),
        }
    }

    pub fn convergence_log(&self) -> String {
        let mut s = self.log.join("\n");
        s.push('\n');
        s
    }
}

/// Helper assembling the constraint list for prescribed displacements on a
/// node set: fixed component values per unit load.
pub fn constrain_set(
    mesh: &Mesh,
    set: &str,
    component: usize,
    unit: f64,
    out: &mut Vec<Constraint>,
) -> Result<()> {
    for &n in mesh.set(set)? {
        out.push(Constraint {
            dof: 2 * n + component,
            unit,
        });
    }
    Ok(())
}
