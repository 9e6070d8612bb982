//! Benchmark case definitions: the mode-I boundary layer (K-field
//! displacements on the remote boundary) and the single-edge cracked
//! plate, plus a standalone material-point driver.

use crate::config::{CaseConfig, Discretization};
use crate::error::{Error, Result};
use crate::material::{stress_update, GaussPointState, MaterialParams};
use crate::mesh::{
    generate_half_disc_mesh, generate_structured_mesh, AxisSpec, CrackGeometry, FocusAlign,
    GradedAxis, Mesh, DEFAULT_GRADING_RATIO_BOUND,
};
use crate::postproc::{
    crack_opening_displacement, deformed_corners, distortion_metrics, extract_line,
    extract_offset_line, j_integral, log_radii, write_history_csv, write_profile_csv, write_vtk,
    HistoryRow, LineProfile,
};
use crate::solver::{constrain_set, CaseContext, Constraint, SolverSettings, Simulation};
use crate::tensor::SymTensor2;
use crate::xfem::{EnrichStrategy, EnrichmentConfig};
use std::path::Path;

/// Mode-I K-field displacement (Williams expansion) at polar coordinates
/// (r, theta) from the tip, plane strain:
/// u = K (1+nu)/E sqrt(r/2pi) cos(t/2) (3 - 4 nu - cos t),
/// v = likewise with sin.
pub fn kfield_displacement(r: f64, theta: f64, k_i: f64, e: f64, nu: f64) -> (f64, f64) {
    let amp = k_i * (1.0 + nu) / e * (r / (2.0 * std::f64::consts::PI)).sqrt();
    let kappa = 3.0 - 4.0 * nu - theta.cos();
    (
        amp * (0.5 * theta).cos() * kappa,
        amp * (0.5 * theta).sin() * kappa,
    )
}

/// Everything needed to run one benchmark: context, constraints, load
/// schedule, and the postprocessing hooks.
pub struct CaseSetup {
    pub ctx: CaseContext,
    pub constraints: Vec<Constraint>,
    pub settings: SolverSettings,
    pub increments: usize,
    /// Remote-strain measure per unit load factor (plate: 2U/H; boundary
    /// layer: K_I / (sigma_y sqrt(l)) when l > 0, otherwise K_I).
    pub remote_strain_unit: f64,
    /// Nested J domains (r_in, r_out) in mm.
    pub j_domains: Vec<(f64, f64)>,
    /// Node sets forming the external boundary (J domain clearance check).
    pub boundary_sets: Vec<&'static str>,
    /// Element tracked for the distortion report.
    pub tracked_elem: Option<usize>,
    /// Profile sampling: ray angle (radians) or offset line.
    pub profile: ProfileSpec,
    /// Profile radii (mm).
    pub radii: Vec<f64>,
}

#[derive(Clone, Copy, Debug)]
pub enum ProfileSpec {
    Ray(f64),
    OffsetLine(f64),
}

/// Results of a completed run.
pub struct CaseRun {
    pub sim: Simulation,
    pub history: Vec<HistoryRow>,
    pub profile: Option<LineProfile>,
    /// J per requested domain at the final increment.
    pub j_final: Vec<f64>,
    pub cod: f64,
    pub n_dofs: usize,
}

fn tip_radii(l: f64, r_max: f64) -> Vec<f64> {
    let l = if l > 0.0 { l } else { r_max / 1000.0 };
    log_radii(0.01 * l, r_max.min(4000.0 * l), 60)
}

/// Builds the boundary-layer case: half-disc conforming mesh for the FEM
/// discretization, or a square domain with the crack represented by
/// enrichment and the K-field prescribed on the whole outer contour.
pub fn build_boundary_layer(cfg: &CaseConfig) -> Result<CaseSetup> {
    cfg.validate()?;
    let mat = cfg.material;
    let k_amp = cfg
        .load
        .k_i
        .ok_or_else(|| Error::config("boundary layer needs load.K_I".to_string()))?;
    let radius = cfg.outer_radius();
    if radius <= 0.0 {
        return Err(Error::config("outer radius must be positive".to_string()));
    }
    let settings = SolverSettings {
        tol: cfg.solver.newton_tol,
        max_iter: cfg.solver.newton_max_iter,
        ..SolverSettings::default()
    };
    let remote_strain_unit = if mat.l > 0.0 {
        k_amp / (mat.sigma_y * mat.l.sqrt())
    } else {
        k_amp
    };
    match cfg.discretization {
        Discretization::Fem => {
            let mesh = generate_half_disc_mesh(
                radius,
                cfg.mesh.tip_element,
                cfg.mesh.ratio,
                cfg.geometry.sectors,
                cfg.mesh.order,
            )?;
            // crack along the negative x axis, tip at the origin
            let crack = CrackGeometry::straight([-radius, 0.0], [0.0, 0.0])?;
            let enrich = EnrichmentConfig {
                strategy: EnrichStrategy::None,
                ..cfg.enrich
            };
            let tracked = Some(0);
            let mut ctx = CaseContext::new(mesh, Some(crack), enrich, mat)?;
            ctx.symmetric_half = true;
            let mut constraints = Vec::new();
            for &n in ctx.mesh.set("remote")? {
                let c = ctx.mesh.coords[n];
                let r = (c[0] * c[0] + c[1] * c[1]).sqrt();
                let th = c[1].atan2(c[0]);
                let (u, v) = kfield_displacement(r, th, k_amp, mat.e, mat.nu);
                constraints.push(Constraint { dof: 2 * n, unit: u });
                constraints.push(Constraint {
                    dof: 2 * n + 1,
                    unit: v,
                });
            }
            constrain_set(&ctx.mesh, "ligament", 1, 0.0, &mut constraints)?;
            let j_domains = vec![
                (0.02 * radius, 0.06 * radius),
                (0.06 * radius, 0.14 * radius),
                (0.14 * radius, 0.30 * radius),
            ];
            Ok(CaseSetup {
                ctx,
                constraints,
                settings,
                increments: cfg.load.increments,
                remote_strain_unit,
                j_domains,
                boundary_sets: vec!["remote"],
                tracked_elem: tracked,
                profile: ProfileSpec::Ray(cfg.output.profile_theta_deg.to_radians()),
                radii: tip_radii(mat.l, radius),
            })
        }
        Discretization::Xfem => {
            // square [0, 2R]^2, crack from the left edge to the center
            let side = 2.0 * radius;
            let tip = [radius, radius];
            let x_spec = AxisSpec::Graded(GradedAxis {
                focus: tip[0],
                tip_size: cfg.mesh.tip_element,
                ratio: cfg.mesh.ratio,
                uniform_band: cfg.mesh.uniform_band,
                align: FocusAlign::CellFraction(cfg.mesh.tip_fraction),
            });
            let y_spec = AxisSpec::Graded(GradedAxis {
                focus: tip[1],
                tip_size: cfg.mesh.tip_element,
                ratio: cfg.mesh.ratio,
                uniform_band: cfg.mesh.uniform_band,
                align: FocusAlign::CellFraction(0.5),
            });
            let mesh = generate_structured_mesh(
                side,
                side,
                &x_spec,
                &y_spec,
                cfg.mesh.order,
                DEFAULT_GRADING_RATIO_BOUND,
            )?;
            let crack = CrackGeometry::straight([0.0, radius], tip)?;
            let ctx = CaseContext::new(mesh, Some(crack), cfg.enrich, mat)?;
            let mut constraints = Vec::new();
            for set in ["left", "right", "bottom", "top"] {
                for &n in ctx.mesh.set(set)? {
                    let c = ctx.mesh.coords[n];
                    let (r, th) = ctx.crack.as_ref().unwrap().polar(c);
                    let (u, v) = kfield_displacement(r.max(1e-12), th, k_amp, mat.e, mat.nu);
                    constraints.push(Constraint { dof: 2 * n, unit: u });
                    constraints.push(Constraint {
                        dof: 2 * n + 1,
                        unit: v,
                    });
                }
            }
            // dedupe corner nodes constrained twice
            constraints.sort_by_key(|c| c.dof);
            constraints.dedup_by_key(|c| c.dof);
            let tracked = ctx.mesh.find_elem([tip[0] + 1e-9, tip[1]]);
            let j_domains = vec![
                (0.10 * radius, 0.25 * radius),
                (0.25 * radius, 0.45 * radius),
                (0.45 * radius, 0.70 * radius),
            ];
            Ok(CaseSetup {
                ctx,
                constraints,
                settings,
                increments: cfg.load.increments,
                remote_strain_unit,
                j_domains,
                boundary_sets: vec!["left", "right", "bottom", "top"],
                tracked_elem: tracked,
                profile: ProfileSpec::Ray(cfg.output.profile_theta_deg.to_radians()),
                radii: tip_radii(mat.l, radius),
            })
        }
    }
}

/// Builds the cracked-plate case: symmetric half model (conforming crack)
/// for the FEM discretization, or the full plate with the crack cutting
/// through a mid-height element row for the enriched discretization.
pub fn build_plate(cfg: &CaseConfig) -> Result<CaseSetup> {
    cfg.validate()?;
    let mat = cfg.material;
    let (w, h, a) = (
        cfg.geometry.width,
        cfg.geometry.height,
        cfg.geometry.crack_length,
    );
    let u_amp = cfg
        .load
        .u
        .ok_or_else(|| Error::config("plate needs load.U".to_string()))?;
    let settings = SolverSettings {
        tol: cfg.solver.newton_tol,
        max_iter: cfg.solver.newton_max_iter,
        ..SolverSettings::default()
    };
    let remote_strain_unit = 2.0 * u_amp / h;
    let y_mid = 0.5 * h;
    let x_spec_focus = |align: FocusAlign| {
        AxisSpec::Graded(GradedAxis {
            focus: a,
            tip_size: cfg.mesh.tip_element,
            ratio: cfg.mesh.ratio,
            uniform_band: cfg.mesh.uniform_band,
            align,
        })
    };
    let j_domains = {
        // nested annuli kept clear of the external boundary
        let min_dist = a.min(w - a).min(0.5 * h);
        let r_hi = 0.6 * min_dist;
        let r_lo = (0.02 * a)
            .max(2.0 * cfg.mesh.tip_element)
            .min(0.3 * r_hi);
        let g = (r_hi / r_lo).powf(1.0 / 3.0);
        vec![
            (r_lo, r_lo * g),
            (r_lo * g, r_lo * g * g),
            (r_lo * g * g, r_hi),
        ]
    };
    match cfg.discretization {
        Discretization::Fem => {
            // upper half, shifted so the ligament lies at y = h/2
            let y_spec = AxisSpec::Graded(GradedAxis {
                focus: 0.0,
                tip_size: cfg.mesh.tip_element,
                ratio: cfg.mesh.ratio,
                uniform_band: cfg.mesh.uniform_band,
                align: FocusAlign::Node,
            });
            let mut mesh = generate_structured_mesh(
                w,
                0.5 * h,
                &x_spec_focus(FocusAlign::Node),
                &y_spec,
                cfg.mesh.order,
                DEFAULT_GRADING_RATIO_BOUND,
            )?;
            for c in mesh.coords.iter_mut() {
                c[1] += y_mid;
            }
            let tol = 1e-9 * h;
            mesh.tag_nodes("ligament", |c| (c[1] - y_mid).abs() < tol && c[0] >= a - tol);
            mesh.tag_nodes("crack_face", |c| (c[1] - y_mid).abs() < tol && c[0] < a - tol);
            let crack = CrackGeometry::straight([0.0, y_mid], [a, y_mid])?;
            let enrich = EnrichmentConfig {
                strategy: EnrichStrategy::None,
                ..cfg.enrich
            };
            let mut ctx = CaseContext::new(mesh, Some(crack), enrich, mat)?;
            ctx.symmetric_half = true;
            let mut constraints = Vec::new();
            constrain_set(&ctx.mesh, "top", 1, u_amp, &mut constraints)?;
            constrain_set(&ctx.mesh, "ligament", 1, 0.0, &mut constraints)?;
            // restrain horizontal motion at (W, H/2)
            let pin = nearest_node(&ctx.mesh, [w, y_mid]);
            constraints.push(Constraint {
                dof: 2 * pin,
                unit: 0.0,
            });
            // tracked element: ligament element whose lower-left corner is the tip
            let tracked = (0..ctx.mesh.n_elems()).find(|&e| {
                let c = ctx.mesh.corner_coords(e);
                (c[0][0] - a).abs() < tol && (c[0][1] - y_mid).abs() < tol
            });
            Ok(CaseSetup {
                ctx,
                constraints,
                settings,
                increments: cfg.load.increments,
                remote_strain_unit,
                j_domains,
                boundary_sets: vec!["left", "right", "top"],
                tracked_elem: tracked,
                profile: ProfileSpec::OffsetLine(plate_profile_offset(cfg)),
                radii: tip_radii(mat.l, (w - a).min(0.5 * h)),
            })
        }
        Discretization::Xfem => {
            let y_spec = AxisSpec::Graded(GradedAxis {
                focus: y_mid,
                tip_size: cfg.mesh.tip_element,
                ratio: cfg.mesh.ratio,
                uniform_band: cfg.mesh.uniform_band,
                align: FocusAlign::CellFraction(0.5),
            });
            let mesh = generate_structured_mesh(
                w,
                h,
                &x_spec_focus(FocusAlign::CellFraction(cfg.mesh.tip_fraction)),
                &y_spec,
                cfg.mesh.order,
                DEFAULT_GRADING_RATIO_BOUND,
            )?;
            let crack = CrackGeometry::straight([0.0, y_mid], [a, y_mid])?;
            let ctx = CaseContext::new(mesh, Some(crack), cfg.enrich, mat)?;
            let mut constraints = Vec::new();
            constrain_set(&ctx.mesh, "top", 1, u_amp, &mut constraints)?;
            constrain_set(&ctx.mesh, "bottom", 1, -u_amp, &mut constraints)?;
            let pin = nearest_node(&ctx.mesh, [w, y_mid]);
            constraints.push(Constraint {
                dof: 2 * pin,
                unit: 0.0,
            });
            let tracked = ctx.mesh.find_elem([a + 1e-9 * h, y_mid]);
            Ok(CaseSetup {
                ctx,
                constraints,
                settings,
                increments: cfg.load.increments,
                remote_strain_unit,
                j_domains,
                boundary_sets: vec!["left", "right", "top", "bottom"],
                tracked_elem: tracked,
                profile: ProfileSpec::OffsetLine(plate_profile_offset(cfg)),
                radii: tip_radii(mat.l, (w - a).min(0.5 * h)),
            })
        }
    }
}

/// Plate profiles sample along a line slightly above the crack plane,
/// where integration points exist on both discretizations; half the tip
/// element height unless configured.
fn plate_profile_offset(cfg: &CaseConfig) -> f64 {
    cfg.output
        .profile_offset
        .unwrap_or(0.5 * cfg.mesh.tip_element)
}

fn nearest_node(mesh: &Mesh, p: [f64; 2]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (n, c) in mesh.coords.iter().enumerate() {
        let d = (c[0] - p[0]).powi(2) + (c[1] - p[1]).powi(2);
        if d < best_d {
            best_d = d;
            best = n;
        }
    }
    best
}

/// Runs a prepared case through its load schedule, recording the scalar
/// history each increment and extracting the stress profile at the end.
pub fn run_case(setup: CaseSetup) -> Result<CaseRun> {
    let CaseSetup {
        ctx,
        constraints,
        settings,
        increments,
        remote_strain_unit,
        j_domains,
        boundary_sets,
        tracked_elem,
        profile,
        radii,
    } = setup;
    let mut sim = Simulation::new(ctx, constraints, settings)?;
    let mut history = Vec::with_capacity(increments);
    for inc in 1..=increments {
        let target = inc as f64 / increments as f64;
        sim.increment_to(inc, target)?;
        let snap = sim.snapshot();
        let j = match j_integral(&sim.ctx, &snap, &j_domains, &boundary_sets) {
            Ok(vals) => vals.iter().sum::<f64>() / vals.len() as f64,
            Err(_) => f64::NAN,
        };
        let delta = crack_opening_displacement(&sim.ctx, &snap).unwrap_or(f64::NAN);
        let (aspect, taper) = match tracked_elem {
            Some(e) => {
                let d = distortion_metrics(&deformed_corners(&sim.ctx, e, &snap.u));
                (d.aspect, d.taper_x)
            }
            None => (f64::NAN, f64::NAN),
        };
        history.push(HistoryRow {
            increment: inc,
            remote_strain: remote_strain_unit * target,
            j,
            delta,
            aspect_ratio: aspect,
            taper_x: taper,
        });
    }
    let snap = sim.snapshot();
    let j_final = j_integral(&sim.ctx, &snap, &j_domains, &boundary_sets)?;
    let cod = crack_opening_displacement(&sim.ctx, &snap)?;
    let prof = match profile {
        ProfileSpec::Ray(theta) => extract_line(&sim.ctx, &snap, theta, &radii)?,
        ProfileSpec::OffsetLine(off) => extract_offset_line(&sim.ctx, &snap, off, &radii)?,
    };
    let n_dofs = sim.ctx.n_dofs();
    Ok(CaseRun {
        sim,
        history,
        profile: Some(prof),
        j_final,
        cod,
        n_dofs,
    })
}

/// Writes the standard output set under `out_dir`.
pub fn write_outputs(run: &CaseRun, l: f64, out_dir: &Path, write_vtk_file: bool) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    if let Some(p) = &run.profile {
        write_profile_csv(&out_dir.join("profile_sigma22.csv"), p, l)?;
    }
    write_history_csv(&out_dir.join("history.csv"), &run.history)?;
    std::fs::write(
        out_dir.join("convergence.log"),
        run.sim.convergence_log(),
    )?;
    if write_vtk_file {
        let snap = run.sim.snapshot();
        let name = format!("field_inc{}.vtk", run.history.len());
        write_vtk(&out_dir.join(name), &run.sim.ctx, &snap)?;
    }
    Ok(())
}

pub fn run_boundary_layer(cfg: &CaseConfig) -> Result<CaseRun> {
    let setup = build_boundary_layer(cfg)?;
    let run = run_case(setup)?;
    if let Some(dir) = &cfg.output.out_dir {
        write_outputs(&run, cfg.material.l, Path::new(dir), cfg.output.write_vtk)?;
    }
    Ok(run)
}

pub fn run_plate(cfg: &CaseConfig) -> Result<CaseRun> {
    let setup = build_plate(cfg)?;
    let run = run_case(setup)?;
    if let Some(dir) = &cfg.output.out_dir {
        write_outputs(&run, cfg.material.l, Path::new(dir), cfg.output.write_vtk)?;
    }
    Ok(run)
}

/// Uniaxial-stress material-point driver: drives the axial strain while
/// iterating the lateral strain so the lateral stress vanishes; returns
/// (total strain, axial stress, effective plastic strain) per step.
pub fn run_material_point(
    mat: &MaterialParams,
    eps_max: f64,
    steps: usize,
    eta_p: f64,
) -> Result<Vec<(f64, f64, f64)>> {
    mat.validate()?;
    if steps == 0 {
        return Err(Error::config("material point needs steps > 0".to_string()));
    }
    let mut state = GaussPointState {
        eta_p,
        ..GaussPointState::default()
    };
    let de = eps_max / steps as f64;
    let mut out = vec![(0.0, 0.0, 0.0)];
    let mut dlat_guess = -mat.nu * de;
    for i in 0..steps {
        let mut dlat = dlat_guess;
        let mut committed = None;
        for _ in 0..40 {
            let deps = SymTensor2::new(de, dlat, dlat, 0.0);
            let up = stress_update(deps, &state, mat)?;
            let resid = up.state.stress.yy;
            let slope = up.tangent[1][1] + up.tangent[1][2];
            committed = Some(up);
            if resid.abs() < 1e-10 * mat.sigma_y {
                break;
            }
            dlat -= resid / slope;
        }
        let up = committed.expect("at least one lateral iteration");
        state = up.state;
        dlat_guess = dlat;
        out.push((de * (i + 1) as f64, state.stress.xx, state.eps_p));
    }
    Ok(out)
}

/// Writes the material-point curve as CSV `strain, stress, eps_p`.
pub fn write_material_point_csv(path: &Path, curve: &[(f64, f64, f64)]) -> Result<()> {
    let mut s = String::from("strain,stress,eps_p\n");
    for (e, sig, ep) in curve {
        s.push_str(&format!("{e},{sig},{ep}\n"));
    }
    std::fs::write(path, s)?;
    Ok(())
}
