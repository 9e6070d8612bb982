//! Plane-strain solid-mechanics solver for crack-tip fields under
//! mechanism-based strain gradient plasticity, with an enriched
//! (extended) finite element mode whose tip basis carries the
//! gradient-plasticity stress singularity.
//!
//! The crate is organized around the pipeline
//! mesh -> material -> enrichment -> nonlinear solve -> postprocessing:
//!
//! * [`mesh`] — structured quadrilateral meshes, crack geometry and level sets
//! * [`material`] — Taylor-dislocation flow stress and the viscoplastic update
//! * [`xfem`] — node classification, enrichment functions, cut-element quadrature
//! * [`elements`] — shape functions and element integration
//! * [`solver`] — degree-of-freedom management, assembly, Newton iteration
//! * [`recovery`] — nodal recovery of plastic strain increments and the
//!   effective plastic strain gradient
//! * [`postproc`] — stress profiles, J-integral, crack opening, distortion
//! * [`config`] / [`cases`] — case definitions and the benchmark drivers

pub mod cases;
pub mod config;
pub mod elements;
pub mod error;
pub mod interp;
pub mod material;
pub mod mesh;
pub mod postproc;
pub mod quadrature;
pub mod recovery;
pub mod solver;
pub mod tensor;
pub mod xfem;

pub use error::{Error, Result};
pub use tensor::SymTensor2;
