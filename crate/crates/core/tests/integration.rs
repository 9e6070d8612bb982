//! Cross-module checks: pipeline equivalence with enrichment disabled,
//! the rigid-opening patch test, partition of unity on sub-triangulated
//! quadrature, and jump evaluation.

use cracktip_core::material::{GaussPointState, MaterialParams};
use cracktip_core::mesh::{generate_structured_mesh, AxisSpec, CrackGeometry};
use cracktip_core::solver::{assemble, constrain_set, CaseContext, Constraint, SolverSettings, Simulation};
use cracktip_core::xfem::{EnrichStrategy, EnrichmentConfig};

fn elastic() -> MaterialParams {
    MaterialParams {
        e: 200_000.0,
        nu: 0.3,
        sigma_y: 1e9,
        n: 5.0,
        l: 0.0,
        m: 20.0,
    }
}

fn cut_mesh() -> (cracktip_core::mesh::Mesh, CrackGeometry) {
    // 4x3 unit square; crack through the middle row from the left edge,
    // tip inside the last column
    let mesh = generate_structured_mesh(
        1.0,
        1.0,
        &AxisSpec::Uniform { n: 4 },
        &AxisSpec::Uniform { n: 3 },
        1,
        1.5,
    )
    .unwrap();
    let crack = CrackGeometry::straight([-0.1, 0.5], [0.95, 0.5]).unwrap();
    (mesh, crack)
}

/// With no enrichment, the extended pipeline must reproduce the plain FEM
/// pipeline exactly (same mesh, same loads).
#[test]
fn enrichment_off_matches_fem_pipeline() {
    let run = |with_crack: bool| -> Vec<f64> {
        let mesh = generate_structured_mesh(
            2.0,
            1.0,
            &AxisSpec::Uniform { n: 6 },
            &AxisSpec::Uniform { n: 3 },
            2,
            1.5,
        )
        .unwrap();
        let crack = if with_crack {
            Some(CrackGeometry::straight([-0.5, 0.4], [1.0, 0.4]).unwrap())
        } else {
            None
        };
        let cfg = EnrichmentConfig {
            strategy: EnrichStrategy::None,
            ..EnrichmentConfig::default()
        };
        let ctx = CaseContext::new(mesh, crack, cfg, elastic()).unwrap();
        let mut constraints = Vec::new();
        constrain_set(&ctx.mesh, "bottom", 1, 0.0, &mut constraints).unwrap();
        constrain_set(&ctx.mesh, "top", 1, 0.002, &mut constraints).unwrap();
        constraints.push(Constraint { dof: 0, unit: 0.0 });
        let mut sim = Simulation::new(ctx, constraints, SolverSettings::default()).unwrap();
        sim.increment_to(1, 1.0).unwrap();
        sim.u.clone()
    };
    let fem = run(false);
    let xfem_off = run(true);
    let scale = fem.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
    for (a, b) in fem.iter().zip(xfem_off.iter()) {
        assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
    }
}

/// Prescribing equal-magnitude opposite Heaviside dofs (with the matching
/// standard dofs of the shifted basis) on a fully cut patch produces a
/// rigid opening: jump 2a across the crack and zero strain away from it.
#[test]
fn heaviside_patch_rigid_opening() {
    let (mesh, crack) = cut_mesh();
    let cfg = EnrichmentConfig {
        strategy: EnrichStrategy::HeavisideOnly,
        ..EnrichmentConfig::default()
    };
    let ctx = CaseContext::new(mesh, Some(crack.clone()), cfg, elastic()).unwrap();
    assert!(ctx.map.n_heaviside() > 0);
    let a = 0.013;
    let mut u = vec![0.0; ctx.n_dofs()];
    for node in 0..ctx.mesh.n_nodes() {
        let h = if crack.signed_distance(ctx.mesh.coords[node]) > 0.0 {
            1.0
        } else {
            -1.0
        };
        u[2 * node + 1] = a * h; // normal (y) opening
    }
    for (&node, &base) in &ctx.map.heaviside {
        let _ = node;
        u[base + 1] = a;
    }
    // jump at the crack surface inside the fully enriched region
    let jump = ctx.crack_jump([0.1, 0.5], &u).unwrap();
    assert!((jump[1] - 2.0 * a).abs() < 1e-12, "jump {jump:?}");
    assert!(jump[0].abs() < 1e-12);
    // strain-free in elements whose nodes are all enriched or all on one
    // side: check via internal forces of the leftmost two columns
    let committed: Vec<Vec<GaussPointState>> = ctx
        .elems
        .iter()
        .map(|ed| vec![GaussPointState::default(); ed.qps.len()])
        .collect();
    let asm = assemble(&ctx, &u, &committed, false).unwrap();
    for e in 0..ctx.mesh.n_elems() {
        let max_x = ctx
            .mesh
            .corner_coords(e)
            .iter()
            .map(|c| c[0])
            .fold(f64::NEG_INFINITY, f64::max);
        if max_x <= 0.5 + 1e-12 {
            for (q, st) in asm.trial[e].iter().enumerate() {
                let vm = st.stress.von_mises();
                assert!(
                    vm < 1e-6,
                    "element {e} qp {q}: von mises {vm} under rigid opening"
                );
            }
        }
    }
}

/// Partition of unity of the standard shape functions holds at every
/// quadrature point, including inside sub-triangles of cut and tip
/// elements.
#[test]
fn partition_of_unity_on_all_quadrature() {
    let (mesh, crack) = cut_mesh();
    let cfg = EnrichmentConfig::default(); // topological + corrected
    let ctx = CaseContext::new(mesh, Some(crack), cfg, elastic()).unwrap();
    let mut checked_subtri = false;
    for (e, ed) in ctx.elems.iter().enumerate() {
        let n_std = ctx.mesh.elems[e].len();
        if ed.qps.len() > 4 {
            checked_subtri = true;
        }
        for qp in &ed.qps {
            let sum: f64 = qp.fns.iter().take(n_std).map(|f| f.val).sum();
            assert!((sum - 1.0).abs() < 1e-12, "element {e}: PU sum {sum}");
            let gsum: [f64; 2] = qp
                .fns
                .iter()
                .take(n_std)
                .fold([0.0, 0.0], |acc, f| [acc[0] + f.grad[0], acc[1] + f.grad[1]]);
            assert!(gsum[0].abs() < 1e-9 && gsum[1].abs() < 1e-9);
        }
    }
    assert!(checked_subtri, "no sub-triangulated element exercised");
}

/// Quadrature weights of every element sum to its area, including the
/// partitioned cut/tip elements (conservation within 1e-12 relative).
#[test]
fn quadrature_weights_conserve_element_areas() {
    let (mesh, crack) = cut_mesh();
    let cfg = EnrichmentConfig::default();
    let ctx = CaseContext::new(mesh, Some(crack), cfg, elastic()).unwrap();
    for (e, ed) in ctx.elems.iter().enumerate() {
        let area = ctx.mesh.elem_area(e);
        let total: f64 = ed.qps.iter().map(|q| q.weight).sum();
        assert!(
            (total - area).abs() <= 1e-12 * area,
            "element {e}: quadrature {total} vs area {area}"
        );
    }
}

/// An enriched elastic run on a cut mesh converges in one iteration and
/// opens the crack (positive jump) under tension.
#[test]
fn enriched_elastic_tension_opens_crack() {
    let (mesh, crack) = cut_mesh();
    let cfg = EnrichmentConfig::default();
    let ctx = CaseContext::new(mesh, Some(crack), cfg, elastic()).unwrap();
    let mut constraints = Vec::new();
    constrain_set(&ctx.mesh, "bottom", 1, -0.001, &mut constraints).unwrap();
    constrain_set(&ctx.mesh, "top", 1, 0.001, &mut constraints).unwrap();
    // pin x at two corner nodes to remove the remaining rigid mode
    let pin = ctx
        .mesh
        .coords
        .iter()
        .position(|c| (c[0] - 1.0).abs() < 1e-12 && c[1].abs() < 1e-12)
        .unwrap();
    constraints.push(Constraint {
        dof: 2 * pin,
        unit: 0.0,
    });
    let pin2 = ctx
        .mesh
        .coords
        .iter()
        .position(|c| (c[0] - 1.0).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12)
        .unwrap();
    constraints.push(Constraint {
        dof: 2 * pin2,
        unit: 0.0,
    });
    let mut sim = Simulation::new(ctx, constraints, SolverSettings::default()).unwrap();
    let stats = sim.increment_to(1, 1.0).unwrap();
    assert_eq!(stats.iterations, 1);
    let jump = sim.ctx.crack_jump([0.2, 0.5], &sim.u).unwrap();
    assert!(jump[1] > 1e-5, "crack should open, jump = {jump:?}");
    // reactions balance
    let top = sim.reaction_sum("top", 1).unwrap();
    let bottom = sim.reaction_sum("bottom", 1).unwrap();
    assert!((top + bottom).abs() <= 1e-8 * top.abs());
}
