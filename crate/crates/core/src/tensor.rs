//! Symmetric second-order tensors for plane-strain states.
//!
//! The out-of-plane normal component is carried explicitly (plane strain
//! keeps `zz` stress and plastic strain nonzero) while the out-of-plane
//! shears are identically zero. `xy` stores the tensor component, not the
//! engineering shear.

use std::ops::{Add, AddAssign, Mul, Sub};

/// Component weights for double contraction: the `xy` entry represents the
/// symmetric pair (xy, yx).
const W: [f64; 4] = [1.0, 1.0, 1.0, 2.0];

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymTensor2 {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub xy: f64,
}

impl SymTensor2 {
    pub const ZERO: SymTensor2 = SymTensor2 {
        xx: 0.0,
        yy: 0.0,
        zz: 0.0,
        xy: 0.0,
    };

    pub fn new(xx: f64, yy: f64, zz: f64, xy: f64) -> Self {
        SymTensor2 { xx, yy, zz, xy }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        SymTensor2::new(a[0], a[1], a[2], a[3])
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.xx, self.yy, self.zz, self.xy]
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    /// Deviatoric part.
    pub fn dev(&self) -> SymTensor2 {
        let m = self.trace() / 3.0;
        SymTensor2::new(self.xx - m, self.yy - m, self.zz - m, self.xy)
    }

    /// Full double contraction a : b (xy counted twice).
    pub fn ddot(&self, other: &SymTensor2) -> f64 {
        let a = self.as_array();
        let b = other.as_array();
        (0..4).map(|i| W[i] * a[i] * b[i]).sum()
    }

    /// Von Mises equivalent stress sqrt(3/2 s':s').
    pub fn von_mises(&self) -> f64 {
        let d = self.dev();
        (1.5 * d.ddot(&d)).max(0.0).sqrt()
    }

    /// Effective deviatoric strain measure sqrt(2/3 e':e').
    pub fn eff_dev(&self) -> f64 {
        let d = self.dev();
        (2.0 / 3.0 * d.ddot(&d)).max(0.0).sqrt()
    }

    pub fn scale(&self, c: f64) -> SymTensor2 {
        SymTensor2::new(c * self.xx, c * self.yy, c * self.zz, c * self.xy)
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }

    /// Expands to the full 3x3 matrix (out-of-plane shears zero).
    pub fn full(&self) -> [[f64; 3]; 3] {
        [
            [self.xx, self.xy, 0.0],
            [self.xy, self.yy, 0.0],
            [0.0, 0.0, self.zz],
        ]
    }
}

impl Add for SymTensor2 {
    type Output = SymTensor2;
    fn add(self, o: SymTensor2) -> SymTensor2 {
        SymTensor2::new(self.xx + o.xx, self.yy + o.yy, self.zz + o.zz, self.xy + o.xy)
    }
}

impl AddAssign for SymTensor2 {
    fn add_assign(&mut self, o: SymTensor2) {
        self.xx += o.xx;
        self.yy += o.yy;
        self.zz += o.zz;
        self.xy += o.xy;
    }
}

impl Sub for SymTensor2 {
    type Output = SymTensor2;
    fn sub(self, o: SymTensor2) -> SymTensor2 {
        SymTensor2::new(self.xx - o.xx, self.yy - o.yy, self.zz - o.zz, self.xy - o.xy)
    }
}

impl Mul<f64> for SymTensor2 {
    type Output = SymTensor2;
    fn mul(self, c: f64) -> SymTensor2 {
        self.scale(c)
    }
}
