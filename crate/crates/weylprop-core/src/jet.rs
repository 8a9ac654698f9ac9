//! Second-order truncated Taylor arithmetic in the three spatial directions.
//!
//! A [`Jet2`] carries a complex value together with its gradient and
//! symmetric Hessian with respect to the evaluation point x.  Integrating
//! the Hamilton–Jacobi coefficient ODEs in this arithmetic is exactly the
//! forward-sensitivity (variational-equation) route: every arithmetic step
//! transports first and second x-derivatives alongside the value.
//!
//! Some derived quantities are built from *extracted gradients* (see
//! [`Jet2::grad_component`]); their Hessian slots would need third
//! derivatives of the base quantity and are deliberately zeroed — consumers
//! must only read value and gradient of such jets.

use core::ops::{Add, AddAssign, Mul, Neg, Sub};
use num_complex::Complex64;

use crate::grassmann::sym_index;

const ZERO_C: Complex64 = Complex64::new(0.0, 0.0);

/// Value + gradient + symmetric Hessian (packed [11,22,33,12,13,23]).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet2 {
    pub v: Complex64,
    pub g: [Complex64; 3],
    pub h: [Complex64; 6],
}

impl Jet2 {
    pub const ZERO: Jet2 = Jet2 {
        v: ZERO_C,
        g: [ZERO_C; 3],
        h: [ZERO_C; 6],
    };

    pub fn constant(v: Complex64) -> Self {
        Jet2 { v, ..Self::ZERO }
    }

    pub fn from_re(x: f64) -> Self {
        Self::constant(Complex64::new(x, 0.0))
    }

    /// The j-th gradient component as a jet of its own.  Its gradient is the
    /// corresponding Hessian row; its Hessian is unknown and zeroed.
    pub fn grad_component(&self, j: usize) -> Jet2 {
        let mut out = Jet2::constant(self.g[j]);
        for k in 0..3 {
            out.g[k] = self.h[sym_index(j, k)];
        }
        out
    }

    pub fn scale(&self, z: Complex64) -> Jet2 {
        let mut out = *self;
        out.v *= z;
        for g in out.g.iter_mut() {
            *g *= z;
        }
        for h in out.h.iter_mut() {
            *h *= z;
        }
        out
    }

    pub fn scale_re(&self, x: f64) -> Jet2 {
        self.scale(Complex64::new(x, 0.0))
    }

    /// exp, propagated through value, gradient and Hessian.
    pub fn exp(&self) -> Jet2 {
        let e = self.v.exp();
        let mut out = Jet2::constant(e);
        for k in 0..3 {
            out.g[k] = e * self.g[k];
        }
        for i in 0..3 {
            for j in i..3 {
                let idx = sym_index(i, j);
                out.h[idx] = e * (self.h[idx] + self.g[i] * self.g[j]);
            }
        }
        out
    }

    pub fn norm_value(&self) -> f64 {
        self.v.norm()
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: Jet2) -> Jet2 {
        self.v += rhs.v;
        for k in 0..3 {
            self.g[k] += rhs.g[k];
        }
        for k in 0..6 {
            self.h[k] += rhs.h[k];
        }
        self
    }
}

impl AddAssign for Jet2 {
    fn add_assign(&mut self, rhs: Jet2) {
        *self = *self + rhs;
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: Jet2) -> Jet2 {
        self.v -= rhs.v;
        for k in 0..3 {
            self.g[k] -= rhs.g[k];
        }
        for k in 0..6 {
            self.h[k] -= rhs.h[k];
        }
        self
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale_re(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let mut out = Jet2::constant(self.v * rhs.v);
        for k in 0..3 {
            out.g[k] = self.v * rhs.g[k] + self.g[k] * rhs.v;
        }
        for i in 0..3 {
            for j in i..3 {
                let idx = sym_index(i, j);
                out.h[idx] = self.v * rhs.h[idx]
                    + self.g[i] * rhs.g[j]
                    + self.g[j] * rhs.g[i]
                    + self.h[idx] * rhs.v;
            }
        }
        out
    }
}

impl Mul<Complex64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Complex64) -> Jet2 {
        self.scale(rhs)
    }
}
