//! Case configuration: flat key-value text with section headers, length
//! suffixes (nm / um / mm), named presets for the shipped benchmarks, and
//! a canonical serializer (parse -> serialize -> parse is identity).

use crate::error::{Error, Result};
use crate::material::{MaterialParams, TaylorParams};
use crate::xfem::{EnrichStrategy, EnrichmentConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseKind {
    BoundaryLayer,
    Plate,
    MaterialPoint,
}

impl CaseKind {
    fn as_str(&self) -> &'static str {
        match self {
            CaseKind::BoundaryLayer => "boundary_layer",
            CaseKind::Plate => "plate",
            CaseKind::MaterialPoint => "material_point",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Discretization {
    /// Conforming mesh, symmetry half model where applicable.
    Fem,
    /// Crack represented by enrichment on a full model.
    Xfem,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometryConfig {
    /// Plate width (mm).
    pub width: f64,
    /// Plate height (mm).
    pub height: f64,
    /// Edge-to-tip crack length (mm).
    pub crack_length: f64,
    /// Boundary-layer outer radius (mm); default 5000 l.
    pub outer_radius: Option<f64>,
    /// Angular sectors of the half-disc mesh.
    pub sectors: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeshConfig {
    pub order: u8,
    /// Element size at the crack tip (mm).
    pub tip_element: f64,
    /// Geometric grading ratio.
    pub ratio: f64,
    /// Uniform tip-size cells on each side of the focus.
    pub uniform_band: usize,
    /// Position of the tip inside its element (0-1) for enriched meshes.
    pub tip_fraction: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadConfig {
    /// Prescribed displacement amplitude (mm), plate case.
    pub u: Option<f64>,
    /// Stress intensity amplitude (MPa sqrt(mm)), boundary layer.
    pub k_i: Option<f64>,
    pub increments: usize,
    /// Material-point driver: total axial strain and step count.
    pub strain: f64,
    pub steps: usize,
    /// Material-point driver: imposed constant effective gradient (1/mm).
    pub eta_p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub out_dir: Option<String>,
    /// Profile ray angle (degrees) for boundary-layer cases.
    pub profile_theta_deg: f64,
    /// Offset of the plate profile line above the crack plane (mm);
    /// defaults to half the tip element height.
    pub profile_offset: Option<f64>,
    pub write_vtk: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseConfig {
    pub kind: CaseKind,
    pub discretization: Discretization,
    pub geometry: GeometryConfig,
    pub material: MaterialParams,
    pub taylor: Option<TaylorParams>,
    pub mesh: MeshConfig,
    pub enrich: EnrichmentConfig,
    pub load: LoadConfig,
    pub solver: SolverConfig,
    pub output: OutputConfig,
}

impl Default for CaseConfig {
    fn default() -> Self {
        CaseConfig {
            kind: CaseKind::Plate,
            discretization: Discretization::Fem,
            geometry: GeometryConfig {
                width: 35.0,
                height: 100.0,
                crack_length: 14.0,
                outer_radius: None,
                sectors: 40,
            },
            material: MaterialParams {
                e: 260_000.0,
                nu: 0.3,
                sigma_y: 200.0,
                n: 5.0,
                l: 0.005,
                m: 20.0,
            },
            taylor: None,
            mesh: MeshConfig {
                order: 2,
                tip_element: 2e-5,
                ratio: 1.2,
                uniform_band: 3,
                tip_fraction: 0.5,
            },
            enrich: EnrichmentConfig::default(),
            load: LoadConfig {
                u: None,
                k_i: None,
                increments: 100,
                strain: 0.105,
                steps: 1000,
                eta_p: 0.0,
            },
            solver: SolverConfig {
                newton_tol: 1e-6,
                newton_max_iter: 25,
            },
            output: OutputConfig {
                out_dir: None,
                profile_theta_deg: 1.014,
                profile_offset: None,
                write_vtk: false,
            },
        }
    }
}

/// Named presets carrying the benchmark parameter sets.
pub fn preset(name: &str) -> Result<CaseConfig> {
    let mut cfg = CaseConfig::default();
    match name {
        // Mode-I boundary layer validation: n = 5, sigma_y/E = 0.2%,
        // nu = 0.3, l = 3.53 um, K_I = 20 sigma_y sqrt(l).
        "fig2_validation" => {
            cfg.kind = CaseKind::BoundaryLayer;
            cfg.discretization = Discretization::Fem;
            cfg.material = MaterialParams {
                e: 260_000.0,
                nu: 0.3,
                sigma_y: 520.0,
                n: 5.0,
                l: 0.00353,
                m: 20.0,
            };
            cfg.mesh.order = 2;
            cfg.mesh.tip_element = cfg.material.l / 120.0;
            cfg.mesh.ratio = 1.3;
            cfg.enrich.strategy = EnrichStrategy::None;
            cfg.load.u = None;
            cfg.load.k_i = Some(20.0 * cfg.material.sigma_y * cfg.material.l.sqrt());
            cfg.load.increments = 50;
        }
        // Single-edge cracked plate, refined conforming mesh.
        "plate_reference" => {
            cfg.kind = CaseKind::Plate;
            cfg.discretization = Discretization::Fem;
            cfg.load.u = Some(0.0011);
            cfg.mesh.order = 2;
            cfg.mesh.tip_element = 2e-5; // 20 nm desk-scale reference
            cfg.mesh.ratio = 1.2;
            cfg.enrich.strategy = EnrichStrategy::None;
        }
        // Single-edge cracked plate, coarse enriched mesh (tip 1 um).
        "plate_coarse_xfem" => {
            cfg.kind = CaseKind::Plate;
            cfg.discretization = Discretization::Xfem;
            cfg.load.u = Some(0.0011);
            cfg.mesh.order = 1;
            cfg.mesh.tip_element = 0.001;
            cfg.mesh.ratio = 1.25;
            cfg.mesh.uniform_band = 3;
            cfg.mesh.tip_fraction = 0.01;
            cfg.enrich.strategy = EnrichStrategy::Topological;
            cfg.enrich.lambda = 2.0 / 3.0;
        }
        // Elastic enriched sanity case: K-field displacements on a square
        // contour, lambda = 1/2 tip basis.
        "elastic_xfem" => {
            cfg.kind = CaseKind::BoundaryLayer;
            cfg.discretization = Discretization::Xfem;
            cfg.material = MaterialParams {
                e: 200_000.0,
                nu: 0.3,
                sigma_y: 1e9,
                n: 5.0,
                l: 0.0,
                m: 20.0,
            };
            cfg.geometry.outer_radius = Some(1.0);
            cfg.mesh.order = 1;
            cfg.mesh.tip_element = 0.03;
            cfg.mesh.ratio = 1.3;
            cfg.enrich.strategy = EnrichStrategy::Geometrical;
            cfg.enrich.r_e = 0.12;
            cfg.enrich.lambda = 0.5;
            cfg.load.u = None;
            cfg.load.k_i = Some(100.0);
            cfg.load.increments = 1;
        }
        other => {
            return Err(Error::config(format!("unknown preset '{other}'")));
        }
    }
    Ok(cfg)
}

/// Parses a length with optional nm / um / mm suffix into millimetres.
pub fn parse_length(text: &str) -> Result<f64> {
    let t = text.trim();
    let (num, scale) = if let Some(v) = t.strip_suffix("nm") {
        (v, 1e-6)
    } else if let Some(v) = t.strip_suffix("um") {
        (v, 1e-3)
    } else if let Some(v) = t.strip_suffix("mm") {
        (v, 1.0)
    } else {
        (t, 1.0)
    };
    num.trim()
        .parse::<f64>()
        .map(|v| v * scale)
        .map_err(|_| Error::config(format!("bad length value '{text}'")))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .map_err(|_| Error::config(format!("key '{key}': bad number '{v}'")))
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse::<usize>()
        .map_err(|_| Error::config(format!("key '{key}': bad integer '{v}'")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::config(format!("key '{key}': bad boolean '{other}'"))),
    }
}

impl CaseConfig {
    /// Parses the flat sectioned key-value format. Unknown keys are
    /// reported by name.
    pub fn parse(text: &str) -> Result<CaseConfig> {
        let mut cfg = CaseConfig::default();
        let mut section = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('[') && line.ends_with(']') {
                section = line[1..line.len() - 1].trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if section.is_empty() && key == "preset" {
                cfg = preset(value)?;
                continue;
            }
            cfg.apply(&section, key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, section: &str, key: &str, value: &str) -> Result<()> {
        let full = if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        match (section, key) {
            ("case", "kind") => {
                self.kind = match value {
                    "boundary_layer" => CaseKind::BoundaryLayer,
                    "plate" => CaseKind::Plate,
                    "material_point" => CaseKind::MaterialPoint,
                    other => return Err(Error::config(format!("key 'case.kind': unknown case '{other}'"))),
                }
            }
            ("case", "discretization") => {
                self.discretization = match value {
                    "fem" => Discretization::Fem,
                    "xfem" => Discretization::Xfem,
                    other => {
                        return Err(Error::config(format!(
                            "key 'case.discretization': unknown value '{other}'"
                        )))
                    }
                }
            }
            ("geometry", "width") => self.geometry.width = parse_length(value)?,
            ("geometry", "height") => self.geometry.height = parse_length(value)?,
            ("geometry", "crack_length") => self.geometry.crack_length = parse_length(value)?,
            ("geometry", "outer_radius") => self.geometry.outer_radius = Some(parse_length(value)?),
            ("geometry", "sectors") => self.geometry.sectors = parse_usize(&full, value)?,
            ("material", "E") => self.material.e = parse_f64(&full, value)?,
            ("material", "nu") => self.material.nu = parse_f64(&full, value)?,
            ("material", "sigma_y") => self.material.sigma_y = parse_f64(&full, value)?,
            ("material", "n") => self.material.n = parse_f64(&full, value)?,
            ("material", "l") => self.material.l = parse_length(value)?,
            ("material", "m") => self.material.m = parse_f64(&full, value)?,
            ("material", "taylor_alpha") => {
                let t = self.taylor.get_or_insert_with(TaylorParams::default);
                t.alpha = parse_f64(&full, value)?;
            }
            ("material", "burgers_b") => {
                let t = self.taylor.get_or_insert_with(TaylorParams::default);
                t.burgers_b = parse_length(value)?;
            }
            ("mesh", "order") => self.mesh.order = parse_usize(&full, value)? as u8,
            ("mesh", "tip_element") => self.mesh.tip_element = parse_length(value)?,
            ("mesh", "ratio") => self.mesh.ratio = parse_f64(&full, value)?,
            ("mesh", "uniform_band") => self.mesh.uniform_band = parse_usize(&full, value)?,
            ("mesh", "tip_fraction") => self.mesh.tip_fraction = parse_f64(&full, value)?,
            ("enrichment", "enrichment") => {
                self.enrich.strategy = match value {
                    "none" => EnrichStrategy::None,
                    "heaviside" => EnrichStrategy::HeavisideOnly,
                    "topological" => EnrichStrategy::Topological,
                    "geometrical" => EnrichStrategy::Geometrical,
                    other => {
                        return Err(Error::config(format!(
                            "key 'enrichment.enrichment': unknown strategy '{other}'"
                        )))
                    }
                }
            }
            ("enrichment", "r_e") => self.enrich.r_e = parse_length(value)?,
            ("enrichment", "lambda") => self.enrich.lambda = parse_f64(&full, value)?,
            ("enrichment", "blending") => {
                self.enrich.corrected_blending = match value {
                    "corrected" => true,
                    "uncorrected" => false,
                    other => {
                        return Err(Error::config(format!(
                            "key 'enrichment.blending': unknown value '{other}'"
                        )))
                    }
                }
            }
            ("enrichment", "tri_order") => self.enrich.tri_order = parse_usize(&full, value)?,
            ("enrichment", "tip_subdiv_levels") => {
                self.enrich.tip_subdiv = parse_usize(&full, value)?
            }
            ("load", "U") => self.load.u = Some(parse_length(value)?),
            ("load", "K_I") => self.load.k_i = Some(parse_f64(&full, value)?),
            ("load", "increments") => self.load.increments = parse_usize(&full, value)?,
            ("load", "strain") => self.load.strain = parse_f64(&full, value)?,
            ("load", "steps") => self.load.steps = parse_usize(&full, value)?,
            ("load", "eta_p") => self.load.eta_p = parse_f64(&full, value)?,
            ("solver", "newton_tol") => self.solver.newton_tol = parse_f64(&full, value)?,
            ("solver", "newton_max_iter") => {
                self.solver.newton_max_iter = parse_usize(&full, value)?
            }
            ("output", "out_dir") => self.output.out_dir = Some(value.to_string()),
            ("output", "profile_theta_deg") => {
                self.output.profile_theta_deg = parse_f64(&full, value)?
            }
            ("output", "profile_offset") => {
                self.output.profile_offset = Some(parse_length(value)?)
            }
            ("output", "write_vtk") => self.output.write_vtk = parse_bool(&full, value)?,
            _ => {
                return Err(Error::config(format!("unknown key '{full}'")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        if let Some(t) = &self.taylor {
            t.validate()?;
        }
        self.enrich.validate()?;
        if self.geometry.width <= 0.0 || self.geometry.height <= 0.0 {
            return Err(Error::config("geometry dimensions must be positive".to_string()));
        }
        if self.kind == CaseKind::Plate
            && !(self.geometry.crack_length > 0.0
                && self.geometry.crack_length < self.geometry.width)
        {
            return Err(Error::config(
                "crack tip must lie inside the plate width".to_string(),
            ));
        }
        if self.mesh.order != 1 && self.mesh.order != 2 {
            return Err(Error::config(format!("mesh.order {} must be 1 or 2", self.mesh.order)));
        }
        if !(self.mesh.tip_element > 0.0) {
            return Err(Error::config("mesh.tip_element must be positive".to_string()));
        }
        if !(self.mesh.ratio > 1.0 && self.mesh.ratio <= 1.5) {
            return Err(Error::config(format!(
                "mesh.ratio {} outside (1, 1.5]",
                self.mesh.ratio
            )));
        }
        if !(self.mesh.tip_fraction > 0.0 && self.mesh.tip_fraction < 1.0) {
            return Err(Error::config("mesh.tip_fraction outside (0, 1)".to_string()));
        }
        if self.load.increments == 0 {
            return Err(Error::config("load.increments must be at least 1".to_string()));
        }
        if !(self.solver.newton_tol > 0.0 && self.solver.newton_tol <= 1e-2) {
            return Err(Error::config("solver.newton_tol outside (0, 1e-2]".to_string()));
        }
        match self.kind {
            CaseKind::Plate => {
                if self.load.u.is_none() {
                    return Err(Error::config("plate case needs load.U".to_string()));
                }
            }
            CaseKind::BoundaryLayer => {
                if self.load.k_i.is_none() {
                    return Err(Error::config("boundary layer case needs load.K_I".to_string()));
                }
                if self.geometry.outer_radius.is_none() && self.material.l <= 0.0 {
                    return Err(Error::config(
                        "boundary layer with l = 0 needs geometry.outer_radius".to_string(),
                    ));
                }
            }
            CaseKind::MaterialPoint => {
                if self.load.steps == 0 {
                    return Err(Error::config("material point needs load.steps > 0".to_string()));
                }
            }
        }
        Ok(())
    }

    /// Boundary-layer outer radius: configured or 5000 l.
    pub fn outer_radius(&self) -> f64 {
        self.geometry
            .outer_radius
            .unwrap_or(5000.0 * self.material.l)
    }

    /// Canonical serialization; `parse(serialize(c)) == c`.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        s.push_str("[case]\n");
        s.push_str(&format!("kind = {}\n", self.kind.as_str()));
        s.push_str(&format!(
            "discretization = {}\n",
            match self.discretization {
                Discretization::Fem => "fem",
                Discretization::Xfem => "xfem",
            }
        ));
        s.push_str("\n[geometry]\n");
        s.push_str(&format!("width = {}\n", self.geometry.width));
        s.push_str(&format!("height = {}\n", self.geometry.height));
        s.push_str(&format!("crack_length = {}\n", self.geometry.crack_length));
        if let Some(r) = self.geometry.outer_radius {
            s.push_str(&format!("outer_radius = {r}\n"));
        }
        s.push_str(&format!("sectors = {}\n", self.geometry.sectors));
        s.push_str("\n[material]\n");
        s.push_str(&format!("E = {}\n", self.material.e));
        s.push_str(&format!("nu = {}\n", self.material.nu));
        s.push_str(&format!("sigma_y = {}\n", self.material.sigma_y));
        s.push_str(&format!("n = {}\n", self.material.n));
        s.push_str(&format!("l = {}\n", self.material.l));
        s.push_str(&format!("m = {}\n", self.material.m));
        if let Some(t) = &self.taylor {
            s.push_str(&format!("taylor_alpha = {}\n", t.alpha));
            s.push_str(&format!("burgers_b = {}\n", t.burgers_b));
        }
        s.push_str("\n[mesh]\n");
        s.push_str(&format!("order = {}\n", self.mesh.order));
        s.push_str(&format!("tip_element = {}\n", self.mesh.tip_element));
        s.push_str(&format!("ratio = {}\n", self.mesh.ratio));
        s.push_str(&format!("uniform_band = {}\n", self.mesh.uniform_band));
        s.push_str(&format!("tip_fraction = {}\n", self.mesh.tip_fraction));
        s.push_str("\n[enrichment]\n");
        s.push_str(&format!(
            "enrichment = {}\n",
            match self.enrich.strategy {
                EnrichStrategy::None => "none",
                EnrichStrategy::HeavisideOnly => "heaviside",
                EnrichStrategy::Topological => "topological",
                EnrichStrategy::Geometrical => "geometrical",
            }
        ));
        s.push_str(&format!("r_e = {}\n", self.enrich.r_e));
        s.push_str(&format!("lambda = {}\n", self.enrich.lambda));
        s.push_str(&format!(
            "blending = {}\n",
            if self.enrich.corrected_blending {
                "corrected"
            } else {
                "uncorrected"
            }
        ));
        s.push_str(&format!("tri_order = {}\n", self.enrich.tri_order));
        s.push_str(&format!("tip_subdiv_levels = {}\n", self.enrich.tip_subdiv));
        s.push_str("\n[load]\n");
        if let Some(u) = self.load.u {
            s.push_str(&format!("U = {u}\n"));
        }
        if let Some(k) = self.load.k_i {
            s.push_str(&format!("K_I = {k}\n"));
        }
        s.push_str(&format!("increments = {}\n", self.load.increments));
        s.push_str(&format!("strain = {}\n", self.load.strain));
        s.push_str(&format!("steps = {}\n", self.load.steps));
        s.push_str(&format!("eta_p = {}\n", self.load.eta_p));
        s.push_str("\n[solver]\n");
        s.push_str(&format!("newton_tol = {}\n", self.solver.newton_tol));
        s.push_str(&format!("newton_max_iter = {}\n", self.solver.newton_max_iter));
        s.push_str("\n[output]\n");
        if let Some(d) = &self.output.out_dir {
            s.push_str(&format!("out_dir = {d}\n"));
        }
        s.push_str(&format!(
            "profile_theta_deg = {}\n",
            self.output.profile_theta_deg
        ));
        if let Some(off) = self.output.profile_offset {
            s.push_str(&format!("profile_offset = {off}\n"));
        }
        s.push_str(&format!("write_vtk = {}\n", self.output.write_vtk));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_identity() {
        for name in ["fig2_validation", "plate_reference", "plate_coarse_xfem", "elastic_xfem"] {
            let cfg = preset(name).unwrap();
            let text = cfg.serialize();
            let back = CaseConfig::parse(&text).unwrap();
            assert_eq!(back, cfg, "round trip failed for preset {name}");
            // and a second round trip is bytewise identical
            assert_eq!(back.serialize(), text);
        }
    }

    #[test]
    fn presets_pin_the_benchmark_parameters() {
        let v = preset("fig2_validation").unwrap();
        assert_eq!(v.material.n, 5.0);
        assert!((v.material.sigma_y / v.material.e - 0.002).abs() < 1e-15);
        assert_eq!(v.material.nu, 0.3);
        assert_eq!(v.material.m, 20.0);
        assert!((v.material.l - 0.00353).abs() < 1e-15);
        let k = v.load.k_i.unwrap();
        assert!((k - 20.0 * v.material.sigma_y * v.material.l.sqrt()).abs() < 1e-9);

        let p = preset("plate_reference").unwrap();
        assert_eq!(p.material.e, 260_000.0);
        assert_eq!(p.material.nu, 0.3);
        assert_eq!(p.material.sigma_y, 200.0);
        assert_eq!(p.material.n, 5.0);
        assert!((p.material.l - 0.005).abs() < 1e-15); // 5 um
        assert_eq!(p.geometry.width, 35.0);
        assert_eq!(p.geometry.height, 100.0);
        assert_eq!(p.geometry.crack_length, 14.0);
        assert_eq!(p.load.u, Some(0.0011));

        let x = preset("plate_coarse_xfem").unwrap();
        assert_eq!(x.mesh.tip_element, 0.001); // 1 um
        assert_eq!(x.mesh.order, 1);
        assert!((x.enrich.lambda - 2.0 / 3.0).abs() < 1e-15);
        assert!((x.enrich.r_e - 0.0005).abs() < 1e-15); // 0.5 um
    }

    #[test]
    fn length_suffixes() {
        assert!((parse_length("5um").unwrap() - 0.005).abs() < 1e-15);
        assert!((parse_length("1000nm").unwrap() - 0.001).abs() < 1e-15);
        assert!((parse_length("2.5mm").unwrap() - 2.5).abs() < 1e-15);
        assert!((parse_length("0.0011").unwrap() - 0.0011).abs() < 1e-18);
        assert!(parse_length("five").is_err());
    }

    #[test]
    fn unknown_key_named_in_error() {
        let text = "[material]\nbogus_key = 3\n";
        let err = CaseConfig::parse(text).unwrap_err();
        assert!(err.to_string().contains("bogus_key"), "{err}");
    }

    #[test]
    fn bad_value_named_in_error() {
        let text = "[material]\nE = strong\n";
        let err = CaseConfig::parse(text).unwrap_err();
        assert!(err.to_string().contains("material.E"), "{err}");
    }

    #[test]
    fn preset_then_override() {
        let text = "preset = plate_coarse_xfem\n[enrichment]\nlambda = 0.5\n[load]\nincrements = 7\n";
        let cfg = CaseConfig::parse(text).unwrap();
        assert_eq!(cfg.enrich.lambda, 0.5);
        assert_eq!(cfg.load.increments, 7);
        assert_eq!(cfg.mesh.tip_element, 0.001);
    }

    #[test]
    fn validation_catches_bad_cases() {
        let mut cfg = preset("plate_reference").unwrap();
        cfg.load.u = None;
        assert!(cfg.validate().is_err());
        let mut cfg = preset("plate_reference").unwrap();
        cfg.geometry.crack_length = 40.0;
        assert!(cfg.validate().is_err());
    }
}
