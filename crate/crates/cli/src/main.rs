//! Command-line driver: boundary-layer and cracked-plate benchmarks, a
//! material-point driver, and mesh inspection.
//!
//! Exit codes: 0 success, 1 solver failure, 2 configuration error.

use clap::{Args, Parser, Subcommand};
use cracktip_core::cases::{
    build_boundary_layer, build_plate, run_boundary_layer, run_material_point, run_plate,
    write_material_point_csv,
};
use cracktip_core::config::{preset, CaseConfig, CaseKind, Discretization};
use cracktip_core::error::Error;
use cracktip_core::xfem::EnrichStrategy;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cracktip",
    version,
    about = "Plane-strain crack-tip solver for gradient plasticity with enriched finite elements"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Case configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named preset applied before the config file.
    #[arg(long)]
    preset: Option<String>,
    /// Tip radial exponent override.
    #[arg(long)]
    lambda: Option<f64>,
    /// Enrichment strategy: none | heaviside | topological | geometrical.
    #[arg(long)]
    enrichment: Option<String>,
    /// Geometrical enrichment radius (mm).
    #[arg(long = "r-e")]
    r_e: Option<f64>,
    /// Number of load increments.
    #[arg(long)]
    increments: Option<usize>,
    /// Output directory.
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Mode-I boundary layer: K-field displacements on the remote boundary.
    BoundaryLayer(CommonOpts),
    /// Single-edge cracked plate under uniaxial displacement.
    Plate(CommonOpts),
    /// Standalone uniaxial-stress material-point driver.
    MaterialPoint(CommonOpts),
    /// Generate the case mesh and print its statistics.
    MeshInfo {
        #[command(flatten)]
        opts: CommonOpts,
        /// Write the mesh in the native plain-text format.
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

fn load_config(opts: &CommonOpts, kind: CaseKind) -> Result<CaseConfig, Error> {
    let mut cfg = match (&opts.preset, &opts.config) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            CaseConfig::parse(&text)?
        }
        (Some(name), Some(path)) => {
            // preset first, then the file's overrides
            let base = preset(name)?.serialize();
            let text = std::fs::read_to_string(path)?;
            CaseConfig::parse(&format!("{base}\n{text}"))?
        }
        (None, None) => {
            return Err(Error::config(
                "either --config or --preset is required".to_string(),
            ))
        }
    };
    cfg.kind = kind;
    if let Some(lambda) = opts.lambda {
        cfg.enrich.lambda = lambda;
    }
    if let Some(e) = &opts.enrichment {
        cfg.enrich.strategy = match e.as_str() {
            "none" => EnrichStrategy::None,
            "heaviside" => EnrichStrategy::HeavisideOnly,
            "topological" => EnrichStrategy::Topological,
            "geometrical" => EnrichStrategy::Geometrical,
            other => {
                return Err(Error::config(format!("unknown enrichment '{other}'")));
            }
        };
        if cfg.enrich.strategy != EnrichStrategy::None {
            cfg.discretization = Discretization::Xfem;
        }
    }
    if let Some(r) = opts.r_e {
        cfg.enrich.r_e = r;
    }
    if let Some(n) = opts.increments {
        cfg.load.increments = n;
    }
    if let Some(dir) = &opts.out_dir {
        cfg.output.out_dir = Some(dir.display().to_string());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::BoundaryLayer(opts) => {
            let cfg = load_config(&opts, CaseKind::BoundaryLayer)?;
            let run = run_boundary_layer(&cfg)?;
            let j = run.j_final.iter().sum::<f64>() / run.j_final.len().max(1) as f64;
            println!(
                "boundary layer: {} dofs, {} increments, J = {:.6e} N/mm, COD = {:.6e} mm",
                run.n_dofs,
                run.history.len(),
                j,
                run.cod
            );
        }
        Command::Plate(opts) => {
            let cfg = load_config(&opts, CaseKind::Plate)?;
            let run = run_plate(&cfg)?;
            let j = run.j_final.iter().sum::<f64>() / run.j_final.len().max(1) as f64;
            println!(
                "plate: {} dofs, {} increments, J = {:.6e} N/mm, COD = {:.6e} mm",
                run.n_dofs,
                run.history.len(),
                j,
                run.cod
            );
        }
        Command::MaterialPoint(opts) => {
            let cfg = load_config(&opts, CaseKind::MaterialPoint)?;
            let curve = run_material_point(
                &cfg.material,
                cfg.load.strain,
                cfg.load.steps,
                cfg.load.eta_p,
            )?;
            match &cfg.output.out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    let path = PathBuf::from(dir).join("material_point.csv");
                    write_material_point_csv(&path, &curve)?;
                    println!("material point: wrote {}", path.display());
                }
                None => {
                    println!("strain,stress,eps_p");
                    for (e, s, ep) in &curve {
                        println!("{e},{s},{ep}");
                    }
                }
            }
        }
        Command::MeshInfo { opts, write } => {
            // build the case to size its mesh and dof map
            let cfg = load_config(
                &opts,
                if opts
                    .preset
                    .as_deref()
                    .map(|p| p.contains("plate"))
                    .unwrap_or(true)
                {
                    CaseKind::Plate
                } else {
                    CaseKind::BoundaryLayer
                },
            )?;
            let setup = match cfg.kind {
                CaseKind::Plate => build_plate(&cfg)?,
                CaseKind::BoundaryLayer => build_boundary_layer(&cfg)?,
                CaseKind::MaterialPoint => {
                    return Err(Error::config(
                        "mesh-info applies to plate or boundary layer cases".to_string(),
                    ))
                }
            };
            let mesh = &setup.ctx.mesh;
            println!(
                "nodes {} elements {} order {} dofs {} (heaviside {}, tip {})",
                mesh.n_nodes(),
                mesh.n_elems(),
                mesh.order,
                setup.ctx.n_dofs(),
                setup.ctx.map.n_heaviside(),
                setup.ctx.map.n_tip()
            );
            println!(
                "smallest element {:.4e} mm, sets: {}",
                mesh.min_char_size(),
                mesh.sets
                    .keys()
                    .map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            );
            if let Some(path) = write {
                mesh.write_native(&path)?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Mesh(_) | Error::Material(_) | Error::Enrichment(_)
                | Error::Io(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
