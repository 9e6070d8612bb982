//! Taylor-dislocation flow stress with an effective plastic strain
//! gradient, and the viscoplastic stress update that keeps the governing
//! equations of conventional plasticity.
//!
//! The flow stress is
//!
//! ```text
//! sigma_flow = sigma_ref * sqrt(f(eps_p)^2 + l * eta_p)
//! ```
//!
//! with `f(eps_p) = (eps_p + sigma_y/E)^(1/n)` and
//! `sigma_ref = sigma_y (E/sigma_y)^(1/n)`, so `sigma_ref * f(0) = sigma_y`
//! exactly. The plastic strain rate follows a viscoplastic power law in
//! the ratio of the von Mises stress to the flow stress; large exponents
//! (`m >= 20`) suppress rate effects. The effective gradient `eta_p` is
//! held frozen within an increment and refreshed from nodal recovery
//! after each converged increment.

use crate::error::{Error, Result};
use crate::tensor::SymTensor2;

/// Elastic/plastic material constants. Units: MPa and mm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialParams {
    /// Young's modulus (MPa).
    pub e: f64,
    /// Poisson ratio.
    pub nu: f64,
    /// Initial yield stress (MPa).
    pub sigma_y: f64,
    /// Hardening exponent (sigma ~ eps^(1/n)).
    pub n: f64,
    /// Intrinsic material length (mm); zero recovers conventional J2.
    pub l: f64,
    /// Viscoplastic rate exponent.
    pub m: f64,
}

impl MaterialParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.e > 0.0) {
            return Err(Error::material(format!("E = {} must be positive", self.e)));
        }
        if !(self.nu > 0.0 && self.nu < 0.5) {
            return Err(Error::material(format!("nu = {} outside (0, 0.5)", self.nu)));
        }
        if !(self.sigma_y > 0.0) {
            return Err(Error::material(format!(
                "sigma_y = {} must be positive",
                self.sigma_y
            )));
        }
        if !(self.n >= 1.0) {
            return Err(Error::material(format!("n = {} must be >= 1", self.n)));
        }
        if !(self.l >= 0.0) {
            return Err(Error::material(format!("l = {} must be >= 0", self.l)));
        }
        if !(self.m >= 5.0) {
            return Err(Error::material(format!("m = {} must be >= 5", self.m)));
        }
        Ok(())
    }

    /// Shear modulus.
    pub fn mu(&self) -> f64 {
        self.e / (2.0 * (1.0 + self.nu))
    }

    /// Bulk modulus.
    pub fn bulk(&self) -> f64 {
        self.e / (3.0 * (1.0 - 2.0 * self.nu))
    }

    /// Reference stress sigma_y (E/sigma_y)^(1/n).
    pub fn sigma_ref(&self) -> f64 {
        self.sigma_y * (self.e / self.sigma_y).powf(1.0 / self.n)
    }

    /// Conventional J2 reference mode: gradient term removed.
    pub fn j2_mode(&self) -> MaterialParams {
        MaterialParams { l: 0.0, ..*self }
    }
}

/// Parameters of the Taylor dislocation model feeding the intrinsic length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaylorParams {
    /// Empirical coefficient, 0.3 - 0.5.
    pub alpha: f64,
    /// Burgers vector magnitude (mm).
    pub burgers_b: f64,
    /// Taylor factor (3.06 for fcc).
    pub taylor_m: f64,
    /// Nye factor (1.90 for fcc).
    pub nye_r: f64,
}

impl Default for TaylorParams {
    fn default() -> Self {
        TaylorParams {
            alpha: 0.5,
            burgers_b: 0.255e-6, // mm, typical fcc
            taylor_m: 3.06,
            nye_r: 1.90,
        }
    }
}

impl TaylorParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.3..=0.5).contains(&self.alpha) {
            return Err(Error::material(format!(
                "alpha = {} outside [0.3, 0.5]",
                self.alpha
            )));
        }
        if !(self.burgers_b > 0.0) {
            return Err(Error::material("burgers vector must be positive".to_string()));
        }
        Ok(())
    }
}

/// Intrinsic material length l = M^2 rbar alpha^2 (mu/sigma_ref)^2 b.
pub fn intrinsic_length(t: &TaylorParams, mu: f64, sigma_ref: f64) -> f64 {
    let ratio = mu / sigma_ref;
    t.taylor_m * t.taylor_m * t.nye_r * t.alpha * t.alpha * ratio * ratio * t.burgers_b
}

/// Nondimensional hardening function f(eps_p) = (eps_p + sigma_y/E)^(1/n).
pub fn hardening_f(eps_p: f64, mat: &MaterialParams) -> f64 {
    (eps_p + mat.sigma_y / mat.e).powf(1.0 / mat.n)
}

/// d f / d eps_p.
fn hardening_f_prime(eps_p: f64, mat: &MaterialParams) -> f64 {
    let inv_n = 1.0 / mat.n;
    inv_n * (eps_p + mat.sigma_y / mat.e).powf(inv_n - 1.0)
}

/// Flow stress sigma_ref sqrt(f^2 + l eta_p).
pub fn flow_stress(eps_p: f64, eta_p: f64, mat: &MaterialParams) -> f64 {
    let f = hardening_f(eps_p, mat);
    mat.sigma_ref() * (f * f + mat.l * eta_p).max(0.0).sqrt()
}

/// Uniaxial power-law curve sigma = sigma_y (1 + E eps_p / sigma_y)^(1/n).
pub fn power_law_stress(eps_p: f64, mat: &MaterialParams) -> f64 {
    mat.sigma_y * (1.0 + mat.e * eps_p / mat.sigma_y).powf(1.0 / mat.n)
}

/// Third-order plastic strain gradient tensor
/// eta_ijk = eps_ik,j + eps_jk,i - eps_ij,k from the in-plane spatial
/// derivatives of the plastic strain tensor (out-of-plane derivatives are
/// zero in plane strain).
pub fn gradient_tensor(deps_dx: &SymTensor2, deps_dy: &SymTensor2) -> [[[f64; 3]; 3]; 3] {
    let d = [deps_dx.full(), deps_dy.full(), [[0.0; 3]; 3]];
    // d[k][i][j] = d eps_ij / d x_k
    let mut eta = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                eta[i][j][k] = d[j][i][k] + d[i][j][k] - d[k][i][j];
            }
        }
    }
    eta
}

/// Effective plastic strain gradient eta_p = sqrt(1/4 eta_ijk eta_ijk).
pub fn effective_gradient(eta: &[[[f64; 3]; 3]; 3]) -> f64 {
    let mut s = 0.0;
    for plane in eta {
        for row in plane {
            for v in row {
                s += v * v;
            }
        }
    }
    (0.25 * s).sqrt()
}

/// State carried at each quadrature point.
#[derive(Clone, Copy, Debug, Default)]
pub struct GaussPointState {
    /// Cauchy stress (MPa), plane strain with sigma_zz carried.
    pub stress: SymTensor2,
    /// Plastic strain tensor (deviatoric).
    pub eps_p_tensor: SymTensor2,
    /// Effective plastic strain.
    pub eps_p: f64,
    /// Effective plastic strain gradient (1/mm), lagged one increment.
    pub eta_p: f64,
    /// Accumulated strain energy density (N/mm^2 = MPa), total strain work.
    pub energy: f64,
}

/// Output of the stress update.
#[derive(Clone, Debug)]
pub struct StressUpdate {
    pub state: GaussPointState,
    /// Algorithmic tangent d sigma_i / d deps_j in tensor components
    /// (order xx, yy, zz, xy).
    pub tangent: [[f64; 4]; 4],
    /// Plastic strain tensor increment of this update.
    pub plastic_increment: SymTensor2,
}

/// Isotropic elastic tangent in tensor components (xx, yy, zz, xy).
pub fn elastic_tangent(mat: &MaterialParams) -> [[f64; 4]; 4] {
    let k = mat.bulk();
    let g = mat.mu();
    let mut d = [[0.0; 4]; 4];
    for i in 0..3 {
        for j in 0..3 {
            d[i][j] = k - 2.0 / 3.0 * g;
        }
        d[i][i] += 2.0 * g;
    }
    d[3][3] = 2.0 * g;
    d
}

// State vector layout for the substepped ODE:
//   y[0..4]   stress (xx, yy, zz, xy)
//   y[4..8]   plastic strain tensor
//   y[8]      effective plastic strain
//   y[9..25]  d stress / d deps (row major 4x4)
//   y[25..29] d eps_p / d deps
const NY: usize = 29;

struct OdeCtx<'a> {
    mat: &'a MaterialParams,
    tr_rate: f64,
    dev_rate: [f64; 4],
    eff_rate: f64,
    /// d eff_rate / d deps_c
    deff: [f64; 4],
    eta_p: f64,
}

const IDENT: [f64; 4] = [1.0, 1.0, 1.0, 0.0];
const W: [f64; 4] = [1.0, 1.0, 1.0, 2.0];

fn rhs(ctx: &OdeCtx, y: &[f64; NY], dy: &mut [f64; NY]) {
    let mat = ctx.mat;
    let kb = mat.bulk();
    let g2 = 2.0 * mat.mu();

    let sigma = [y[0], y[1], y[2], y[3]];
    let eps_p = y[8];
    let tr = (sigma[0] + sigma[1] + sigma[2]) / 3.0;
    let sdev = [sigma[0] - tr, sigma[1] - tr, sigma[2] - tr, sigma[3]];
    let mut j2 = 0.0;
    for c in 0..4 {
        j2 += W[c] * sdev[c] * sdev[c];
    }
    let sigma_e = (1.5 * j2).max(0.0).sqrt();

    let f = hardening_f(eps_p.max(0.0), mat);
    let sigma_f = mat.sigma_ref() * (f * f + mat.l * ctx.eta_p).max(1e-300).sqrt();

    // plastic scalar rate and its partials
    let (pdot, dpdot_dsig, dpdot_deps_p, dpdot_ddeps): (f64, [f64; 4], f64, [f64; 4]);
    if sigma_e <= 1e-12 * mat.sigma_y || ctx.eff_rate <= 0.0 {
        pdot = 0.0;
        dpdot_dsig = [0.0; 4];
        dpdot_deps_p = 0.0;
        dpdot_ddeps = [0.0; 4];
    } else {
        let ratio = sigma_e / sigma_f;
        // cap the overstress power so transient overshoots stay finite;
        // the step controller shrinks into the relaxation layer anyway
        let gpow = (mat.m * ratio.ln()).min(60.0).exp();
        pdot = ctx.eff_rate * gpow;
        // d sigma_e / d sigma_c = 1.5 w_c sdev_c / sigma_e
        let mut ds = [0.0; 4];
        for c in 0..4 {
            ds[c] = 1.5 * W[c] * sdev[c] / sigma_e;
        }
        let dg_dse = mat.m * gpow / sigma_e;
        let fp = hardening_f_prime(eps_p.max(0.0), mat);
        let dsf_deps_p = mat.sigma_ref() * mat.sigma_ref() * f * fp / sigma_f;
        let dg_deps_p = -mat.m * gpow * dsf_deps_p / sigma_f;
        let mut dps = [0.0; 4];
        for c in 0..4 {
            dps[c] = ctx.eff_rate * dg_dse * ds[c];
        }
        dpdot_dsig = dps;
        dpdot_deps_p = ctx.eff_rate * dg_deps_p;
        let mut dpd = [0.0; 4];
        for c in 0..4 {
            dpd[c] = ctx.deff[c] * gpow;
        }
        dpdot_ddeps = dpd;
    }

    // plastic strain rate tensor: beta * sdev, beta = 1.5 pdot / sigma_e
    let beta = if sigma_e > 1e-12 * mat.sigma_y {
        1.5 * pdot / sigma_e
    } else {
        0.0
    };

    // stress rate
    for c in 0..4 {
        dy[c] = kb * ctx.tr_rate * IDENT[c] + g2 * (ctx.dev_rate[c] - beta * sdev[c]);
    }
    // plastic tensor rate and scalar rate
    for c in 0..4 {
        dy[4 + c] = beta * sdev[c];
    }
    dy[8] = pdot;

    // sensitivities
    // dbeta/dX = 1.5 (dpdot/dX sigma_e - pdot dse/dX) / sigma_e^2
    let mut dse = [0.0; 4];
    if sigma_e > 1e-12 * mat.sigma_y {
        for c in 0..4 {
            dse[c] = 1.5 * W[c] * sdev[c] / sigma_e;
        }
    }
    // A[c][d] = d sigdot_c / d sigma_d, b_eps[c] = d sigdot_c / d eps_p
    let mut a = [[0.0; 4]; 4];
    let mut b_eps = [0.0; 4];
    let mut f_dep = [[0.0; 4]; 4]; // d sigdot_c / d deps_d (explicit)
    // dp row: d pdot / d sigma_d etc. reused below
    if beta != 0.0 || pdot != 0.0 {
        let se2 = sigma_e * sigma_e;
        for c in 0..4 {
            for d in 0..4 {
                // d sdev_c / d sigma_d
                let dsdev = if c == d { 1.0 } else { 0.0 } - IDENT[c] * IDENT[d] / 3.0;
                let dbeta_dsig = 1.5 * (dpdot_dsig[d] * sigma_e - pdot * dse[d]) / se2;
                a[c][d] = -g2 * (dbeta_dsig * sdev[c] + beta * dsdev);
            }
            let dbeta_deps = 1.5 * dpdot_deps_p / sigma_e;
            b_eps[c] = -g2 * dbeta_deps * sdev[c];
            for d in 0..4 {
                let dbeta_ddeps = 1.5 * dpdot_ddeps[d] / sigma_e;
                f_dep[c][d] = -g2 * dbeta_ddeps * sdev[c];
            }
        }
    }
    // elastic part of d sigdot / d deps
    for c in 0..4 {
        for d in 0..4 {
            let ddev = if c == d { 1.0 } else { 0.0 } - IDENT[c] * IDENT[d] / 3.0;
            f_dep[c][d] += kb * IDENT[c] * IDENT[d] + g2 * ddev;
        }
    }

    // S_sigma' = A S_sigma + b_eps S_p + F
    for c in 0..4 {
        for d in 0..4 {
            let mut v = f_dep[c][d];
            for k in 0..4 {
                v += a[c][k] * y[9 + 4 * k + d];
            }
            v += b_eps[c] * y[25 + d];
            dy[9 + 4 * c + d] = v;
        }
    }
    // S_p' = dpdot/dsig . S_sigma + dpdot/deps_p S_p + dpdot/ddeps
    for d in 0..4 {
        let mut v = dpdot_ddeps[d];
        for k in 0..4 {
            v += dpdot_dsig[k] * y[9 + 4 * k + d];
        }
        v += dpdot_deps_p * y[25 + d];
        dy[25 + d] = v;
    }
}

/// Dormand-Prince 5(4) adaptive integration of the viscoplastic rate
/// equations over the strain increment, carrying forward-sensitivity
/// equations for the algorithmic tangent.
pub fn stress_update(
    deps: SymTensor2,
    state: &GaussPointState,
    mat: &MaterialParams,
) -> Result<StressUpdate> {
    if !deps.is_finite() || !state.stress.is_finite() {
        return Err(Error::material("non-finite input to stress update".to_string()));
    }
    let depsa = deps.as_array();
    let tr_rate = deps.trace();
    let dev = deps.dev();
    let dev_rate = dev.as_array();
    let eff_rate = deps.eff_dev();

    // Elastic shortcut: with the path entirely below ~0.3 sigma_flow the
    // plastic term is below (0.3)^m ~ 1e-10 relative and Hooke's law applies.
    let del = elastic_tangent(mat);
    let mut trial = state.stress;
    {
        let mut ds = [0.0; 4];
        for c in 0..4 {
            for d in 0..4 {
                ds[c] += del[c][d] * depsa[d];
            }
        }
        trial += SymTensor2::from_array(ds);
    }
    let sigma_f0 = flow_stress(state.eps_p, state.eta_p, mat);
    let se_start = state.stress.von_mises();
    let se_trial = trial.von_mises();
    let cutoff = 10.0_f64.powf(-10.0 / mat.m); // plastic term <= 1e-10 relative
    if se_start.max(se_trial) < cutoff * sigma_f0 {
        let mut new_state = *state;
        let mid = state.stress + trial.scale(1.0);
        new_state.energy += 0.5 * mid.ddot(&deps);
        new_state.stress = trial;
        return Ok(StressUpdate {
            state: new_state,
            tangent: del,
            plastic_increment: SymTensor2::ZERO,
        });
    }

    let mut deff = [0.0; 4];
    if eff_rate > 0.0 {
        for c in 0..4 {
            deff[c] = (2.0 / 3.0) * W[c] * dev_rate[c] / eff_rate;
        }
    }
    let ctx = OdeCtx {
        mat,
        tr_rate,
        dev_rate,
        eff_rate,
        deff,
        eta_p: state.eta_p,
    };

    let mut y = [0.0_f64; NY];
    y[0..4].copy_from_slice(&state.stress.as_array());
    y[4..8].copy_from_slice(&state.eps_p_tensor.as_array());
    y[8] = state.eps_p;
    // sensitivities start at zero

    // Dormand-Prince coefficients (autonomous system, abscissae unused)
    const A: [[f64; 6]; 7] = [
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let rtol = 1e-8;
    let atol_sigma = 1e-10 * mat.sigma_ref().max(1.0);
    let atol_eps = 1e-14;

    let mut t = 0.0_f64;
    let mut h = 1.0_f64;
    let mut k = [[0.0_f64; NY]; 7];
    let mut nsteps = 0usize;
    let mut energy = state.energy;
    let mut last_sigma = state.stress;

    while t < 1.0 - 1e-14 {
        h = h.min(1.0 - t);
        nsteps += 1;
        if nsteps > 500_000 {
            return Err(Error::MaterialUnstable(format!(
                "stress update exceeded substep budget: t {t:.3e} h {h:.3e} deps {:?} \
                 state(se {:.3e}, eps_p {:.3e}, eta_p {:.3e}, sf {:.3e})",
                deps.as_array(),
                state.stress.von_mises(),
                state.eps_p,
                state.eta_p,
                flow_stress(state.eps_p, state.eta_p, mat)
            )));
        }
        for s in 0..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let aij = A[s][j];
                if aij != 0.0 {
                    for i in 0..NY {
                        ys[i] += h * aij * kj[i];
                    }
                }
            }
            let mut dy = [0.0; NY];
            rhs(&ctx, &ys, &mut dy);
            k[s] = dy;
        }
        let mut y5 = y;
        let mut y4 = y;
        for s in 0..7 {
            for i in 0..NY {
                y5[i] += h * B5[s] * k[s][i];
                y4[i] += h * B4[s] * k[s][i];
            }
        }
        // error norm over stress and effective plastic strain
        let finite = y5.iter().take(9).all(|v| v.is_finite());
        let mut err: f64 = if finite { 0.0 } else { f64::INFINITY };
        if finite {
            for i in 0..4 {
                let sc = atol_sigma + rtol * y5[i].abs().max(y[i].abs());
                err = err.max(((y5[i] - y4[i]) / sc).abs());
            }
            let sc = atol_eps + rtol * y5[8].abs().max(y[8].abs());
            err = err.max(((y5[8] - y4[8]) / sc).abs());
            if !err.is_finite() {
                err = f64::INFINITY;
            }
        }
        if err <= 1.0 {
            // accept; accumulate strain work with midpoint stress
            let new_sigma = SymTensor2::new(y5[0], y5[1], y5[2], y5[3]);
            let mid = (last_sigma + new_sigma).scale(0.5);
            energy += mid.ddot(&deps) * h;
            last_sigma = new_sigma;
            t += h;
            y = y5;
        } else if h <= 1e-16 {
            return Err(Error::MaterialUnstable(
                "stress update step control stalled".to_string(),
            ));
        }
        let fac = if err.is_finite() && err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else if err == 0.0 {
            5.0
        } else {
            0.2
        };
        h = (h * fac).clamp(1e-16, 1.0);
    }

    let new_stress = SymTensor2::new(y[0], y[1], y[2], y[3]);
    let new_eps_tensor = SymTensor2::new(y[4], y[5], y[6], y[7]);
    let mut tangent = [[0.0; 4]; 4];
    for c in 0..4 {
        for d in 0..4 {
            tangent[c][d] = y[9 + 4 * c + d];
        }
    }
    let plastic_increment = new_eps_tensor - state.eps_p_tensor;
    let new_state = GaussPointState {
        stress: new_stress,
        eps_p_tensor: new_eps_tensor,
        eps_p: y[8],
        eta_p: state.eta_p,
        energy,
    };
    Ok(StressUpdate {
        state: new_state,
        tangent,
        plastic_increment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_n5() -> MaterialParams {
        MaterialParams {
            e: 260_000.0,
            nu: 0.3,
            sigma_y: 520.0, // sigma_y / E = 0.002
            n: 5.0,
            l: 0.005,
            m: 20.0,
        }
    }

    #[test]
    fn sigma_ref_exceeds_yield() {
        let m = mat_n5();
        assert!(m.sigma_ref() >= m.sigma_y);
    }

    #[test]
    fn intrinsic_length_hand_values() {
        // alpha = 0.5, mu/sigma_ref = 1, b = 1e-6 mm -> 18 alpha^2 b = 4.5e-6
        let t = TaylorParams {
            alpha: 0.5,
            burgers_b: 1e-6,
            ..TaylorParams::default()
        };
        let l = intrinsic_length(&t, 1.0, 1.0);
        let l18 = 18.0 * 0.25 * 1e-6;
        assert!((l - l18).abs() / l18 < 0.015, "l = {l}");

        // 18 alpha^2 = 4.5, (mu/sigma_ref)^2 = 100, b = 0.25e-6 -> 1.125e-4
        let t2 = TaylorParams {
            alpha: 0.5,
            burgers_b: 0.25e-6,
            ..TaylorParams::default()
        };
        let l2 = intrinsic_length(&t2, 10.0, 1.0);
        let expect = 1.125e-4;
        assert!((l2 - expect).abs() / expect < 0.015, "l2 = {l2}");

        // exact prefactor vs the rounded 18 alpha^2 form: within 1.5 percent
        let exact: f64 = 3.06 * 3.06 * 1.90;
        assert!((exact - 18.0).abs() / 18.0 < 0.015);
    }

    #[test]
    fn hardening_hand_values() {
        let m = mat_n5();
        let f0 = hardening_f(0.0, &m);
        assert!((f0 - 0.002_f64.powf(0.2)).abs() < 1e-12);
        assert!((f0 - 0.28854).abs() < 1e-4);
        // sigma_ref * f(0) = sigma_y exactly
        assert!((m.sigma_ref() * f0 - m.sigma_y).abs() < 1e-9 * m.sigma_y);
        // eps_p + sigma_y/E = 0.1
        let f = hardening_f(0.098, &m);
        assert!((f - 0.1_f64.powf(0.2)).abs() < 1e-12);
        assert!((f - 0.63096).abs() < 1e-4);
    }

    #[test]
    fn flow_stress_limits() {
        let m = mat_n5();
        // zero gradient reduces to conventional hardening
        for ep in [0.0, 0.01, 0.2] {
            assert!(
                (flow_stress(ep, 0.0, &m) - m.sigma_ref() * hardening_f(ep, &m)).abs()
                    < 1e-9 * m.sigma_y
            );
        }
        // identity at yield
        assert!((flow_stress(0.0, 0.0, &m) - m.sigma_y).abs() < 1e-9 * m.sigma_y);
        // gradient-dominated asymptote
        let ep = 0.01;
        let f = hardening_f(ep, &m);
        let eta = 100.0 * f * f / m.l; // l*eta = 100 f^2
        let full = flow_stress(ep, eta, &m);
        let asym = m.sigma_ref() * (m.l * eta).sqrt();
        assert!((full - asym).abs() / full < 0.005);
    }

    #[test]
    fn flow_stress_monotone() {
        let m = mat_n5();
        let mut prev_rows = Vec::new();
        for i in 0..20 {
            let ep = 0.3 * i as f64 / 19.0;
            let mut row = Vec::new();
            for j in 0..20 {
                let eta = 5000.0 * j as f64 / 19.0;
                let s = flow_stress(ep, eta, &m);
                if let Some(pj) = row.last() {
                    assert!(s >= *pj - 1e-9);
                }
                row.push(s);
            }
            if let Some(prev) = prev_rows.last() {
                let prev: &Vec<f64> = prev;
                for (a, b) in row.iter().zip(prev.iter()) {
                    assert!(a >= b);
                }
            }
            prev_rows.push(row);
        }
    }

    #[test]
    fn j2_mode_removes_gradient() {
        let m = mat_n5().j2_mode();
        for eta in [0.0, 10.0, 1e6] {
            assert!(
                (flow_stress(0.05, eta, &m) - m.sigma_ref() * hardening_f(0.05, &m)).abs()
                    < 1e-9 * m.sigma_y
            );
        }
    }

    #[test]
    fn gradient_tensor_uniform_field_is_zero() {
        let eta = gradient_tensor(&SymTensor2::ZERO, &SymTensor2::ZERO);
        assert_eq!(effective_gradient(&eta), 0.0);
    }

    #[test]
    fn gradient_tensor_manufactured_linear_field() {
        // eps_11 = c x_1: only eta_111 = c survives; eta_p = |c| / 2
        let c = 0.37;
        let eta = gradient_tensor(&SymTensor2::new(c, 0.0, 0.0, 0.0), &SymTensor2::ZERO);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let expect = if (i, j, k) == (0, 0, 0) { c } else { 0.0 };
                    assert!(
                        (eta[i][j][k] - expect).abs() < 1e-14,
                        "eta[{i}][{j}][{k}] = {}",
                        eta[i][j][k]
                    );
                }
            }
        }
        assert!((effective_gradient(&eta) - c / 2.0).abs() < 1e-14);
    }

    #[test]
    fn gradient_tensor_symmetry_and_scaling() {
        let dx = SymTensor2::new(0.3, -0.1, 0.7, 0.2);
        let dy = SymTensor2::new(-0.4, 0.9, 0.05, -0.6);
        let eta = gradient_tensor(&dx, &dy);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!((eta[i][j][k] - eta[j][i][k]).abs() < 1e-14);
                }
            }
        }
        let e1 = effective_gradient(&eta);
        let eta2 = gradient_tensor(&dx.scale(-2.5), &dy.scale(-2.5));
        assert!((effective_gradient(&eta2) - 2.5 * e1).abs() < 1e-12 * e1.max(1.0));
    }

    #[test]
    fn hydrostatic_increment_is_elastic() {
        let m = mat_n5();
        let e = 1e-4;
        let deps = SymTensor2::new(e, e, e, 0.0);
        let up = stress_update(deps, &GaussPointState::default(), &m).unwrap();
        let expect = m.bulk() * 3.0 * e;
        for (i, v) in up.state.stress.as_array().iter().enumerate() {
            let target = if i < 3 { expect } else { 0.0 };
            assert!((v - target).abs() < 1e-8 * expect.abs());
        }
        assert_eq!(up.state.eps_p, 0.0);
    }

    #[test]
    fn small_elastic_step_matches_hooke() {
        let m = mat_n5();
        let deps = SymTensor2::new(1e-5, -2e-6, 0.0, 4e-6);
        let up = stress_update(deps, &GaussPointState::default(), &m).unwrap();
        let del = elastic_tangent(&m);
        let d = deps.as_array();
        for c in 0..4 {
            let mut hooke = 0.0;
            for k in 0..4 {
                hooke += del[c][k] * d[k];
            }
            let got = up.state.stress.as_array()[c];
            assert!(
                (got - hooke).abs() <= 1e-8 * hooke.abs().max(1.0),
                "component {c}: {got} vs {hooke}"
            );
        }
    }

    /// Independent scalar oracle: uniaxial-stress response integrated from
    /// the viscoplastic rate equation reduced to one dimension.
    fn uniaxial_oracle(mat: &MaterialParams, eps_max: f64, nsub: usize) -> Vec<(f64, f64, f64)> {
        let mut sigma = 0.0_f64;
        let mut eps_p = 0.0_f64;
        let mut out = vec![(0.0, 0.0, 0.0)];
        let de = eps_max / nsub as f64;
        for i in 0..nsub {
            // rate form per unit axial strain, solved by fixed point:
            //   sdot = E (1 - epdot)
            //   eff = epdot + 2(1+nu)/(3E) sdot
            //   epdot = eff (sigma/sigma_f)^m
            let sf = flow_stress(eps_p, 0.0, mat);
            let mut epdot = 0.0_f64;
            for _ in 0..200 {
                let sdot = mat.e * (1.0 - epdot);
                let eff = epdot + 2.0 * (1.0 + mat.nu) / (3.0 * mat.e) * sdot;
                let next = eff * (sigma / sf).max(0.0).powf(mat.m);
                if (next - epdot).abs() < 1e-14 {
                    epdot = next;
                    break;
                }
                epdot = 0.5 * (next + epdot);
            }
            let epdot = epdot.min(1.0);
            sigma += mat.e * (1.0 - epdot) * de;
            eps_p += epdot * de;
            out.push((de * (i + 1) as f64, sigma, eps_p));
        }
        out
    }

    /// Uniaxial stress driving of the tensor update: lateral strain solved
    /// so the lateral stress vanishes.
    pub(crate) fn drive_uniaxial(
        mat: &MaterialParams,
        eps_max: f64,
        nsteps: usize,
        eta_p: f64,
    ) -> Vec<(f64, GaussPointState)> {
        let mut state = GaussPointState {
            eta_p,
            ..GaussPointState::default()
        };
        let de = eps_max / nsteps as f64;
        let mut out = vec![(0.0, state)];
        let mut dlat_guess = -mat.nu * de;
        for i in 0..nsteps {
            let mut dlat = dlat_guess;
            let mut last = None;
            for _ in 0..30 {
                let deps = SymTensor2::new(de, dlat, dlat, 0.0);
                let up = stress_update(deps, &state, mat).unwrap();
                let resid = up.state.stress.yy;
                let dr = up.tangent[1][1] + up.tangent[1][2];
                last = Some(up);
                if resid.abs() < 1e-10 * mat.sigma_y {
                    break;
                }
                dlat -= resid / dr;
            }
            state = last.unwrap().state;
            dlat_guess = dlat;
            out.push((de * (i + 1) as f64, state));
        }
        out
    }

    #[test]
    fn uniaxial_matches_power_law_and_oracle() {
        let m = mat_n5();
        // strain to reach eps_p = 0.1 approximately: eps ~ eps_p + sigma/E
        let hist = drive_uniaxial(&m, 0.105, 1000, 0.0);
        let oracle = uniaxial_oracle(&m, 0.105, 4000);
        for (eps, st) in hist.iter().skip(20) {
            // the viscoplastic knee (eps_p below ~5e-4) lags the
            // rate-independent curve by construction; compare past it
            if st.eps_p < 1e-3 {
                continue;
            }
            let sigma = st.stress.xx;
            // against the closed-form power law
            let pl = power_law_stress(st.eps_p, &m);
            assert!(
                (sigma - pl).abs() / pl < 0.01,
                "eps {eps}: sigma {sigma} vs power law {pl}"
            );
            // against the independent 1D oracle at the same total strain
            let idx = ((eps / 0.105) * 4000.0).round() as usize;
            let (_, so, _) = oracle[idx.min(4000)];
            assert!(
                (sigma - so).abs() / so < 0.005,
                "eps {eps}: sigma {sigma} vs oracle {so}"
            );
        }
        let last = hist.last().unwrap().1;
        assert!(last.eps_p > 0.09, "final eps_p = {}", last.eps_p);
    }

    #[test]
    fn overstress_bounded_for_m20() {
        let m = mat_n5();
        let hist = drive_uniaxial(&m, 0.08, 400, 0.0);
        for (_, st) in hist.iter().skip(10) {
            if st.eps_p > 1e-4 {
                let ratio = st.stress.von_mises() / flow_stress(st.eps_p, st.eta_p, &m);
                assert!(ratio <= 1.05, "overstress ratio {ratio}");
            }
        }
    }

    #[test]
    fn plastic_increment_traceless_and_monotone() {
        let m = mat_n5();
        let mut state = GaussPointState::default();
        let deps = SymTensor2::new(2e-3, -0.5e-3, -0.5e-3, 1e-3);
        let mut prev = 0.0;
        for _ in 0..10 {
            let up = stress_update(deps, &state, &m).unwrap();
            assert!(up.plastic_increment.trace().abs() < 1e-10);
            assert!(up.state.eps_p >= prev - 1e-15);
            prev = up.state.eps_p;
            state = up.state;
        }
        assert!(state.eps_p > 0.0);
    }

    #[test]
    fn tangent_matches_finite_differences() {
        let m = mat_n5();
        // reach a plastically flowing state first
        let mut state = GaussPointState::default();
        for _ in 0..5 {
            let up = stress_update(SymTensor2::new(1.5e-3, -4e-4, -4e-4, 6e-4), &state, &m).unwrap();
            state = up.state;
        }
        state.eta_p = 50.0; // exercise the gradient term too
        let base_deps = SymTensor2::new(8e-4, -2e-4, -1e-4, 5e-4);
        let up = stress_update(base_deps, &state, &m).unwrap();
        let h = 1e-8;
        for d in 0..4 {
            let mut plus = base_deps.as_array();
            let mut minus = base_deps.as_array();
            plus[d] += h;
            minus[d] -= h;
            let sp = stress_update(SymTensor2::from_array(plus), &state, &m).unwrap();
            let sm = stress_update(SymTensor2::from_array(minus), &state, &m).unwrap();
            for c in 0..4 {
                let fd = (sp.state.stress.as_array()[c] - sm.state.stress.as_array()[c]) / (2.0 * h);
                let an = up.tangent[c][d];
                let scale = m.mu().max(an.abs());
                assert!(
                    (fd - an).abs() / scale < 1e-5,
                    "tangent[{c}][{d}] analytic {an} vs fd {fd}"
                );
            }
        }
    }

    #[test]
    fn rejects_non_finite_input() {
        let m = mat_n5();
        let deps = SymTensor2::new(f64::NAN, 0.0, 0.0, 0.0);
        assert!(stress_update(deps, &GaussPointState::default(), &m).is_err());
    }

    #[test]
    fn gradient_term_raises_uniaxial_curve() {
        let m = mat_n5();
        let eta = 2.0 / m.l; // l * eta = 2
        let plain = drive_uniaxial(&m, 0.05, 200, 0.0);
        let grad = drive_uniaxial(&m, 0.05, 200, eta);
        let s0 = plain.last().unwrap().1;
        let s1 = grad.last().unwrap().1;
        assert!(s1.stress.xx > s0.stress.xx * 1.2);
        // flow stress level reflects Eq-style gradient hardening
        let expect = flow_stress(s1.eps_p, eta, &m);
        let ratio = s1.stress.von_mises() / expect;
        assert!((ratio - 1.0).abs() < 0.03, "ratio {ratio}");
    }

    #[test]
    fn validates_parameter_ranges() {
        let mut m = mat_n5();
        assert!(m.validate().is_ok());
        m.nu = 0.5;
        assert!(m.validate().is_err());
        m.nu = 0.3;
        m.m = 2.0;
        assert!(m.validate().is_err());
    }
}
