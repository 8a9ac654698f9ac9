//! Electromagnetic potentials A₀…A₃ with analytic space derivatives to
//! third order.
//!
//! Each component is a linear combination of closed-form profiles with
//! complex amplitudes (real for the shipped families; the matrix-potential
//! reduction can produce genuinely complex combinations).  All shipped
//! families are time-independent, so the time integrals ∫ₛᵗ ∂A₀ dr reduce
//! to (t−s)·∂A₀; the time argument is kept in the interfaces.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::grassmann::{sym_index, ScalarJet2};
use crate::jet::Jet2;

/// Packed index for a symmetric third-derivative tensor, i ≤ j ≤ k, in
/// lexicographic order (000,001,002,011,012,022,111,112,122,222).
pub const fn sym3_index(i: usize, j: usize, k: usize) -> usize {
    // sort the triple
    let (a, b, c) = {
        let (x, y, z) = (i, j, k);
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        let (y, z) = if y <= z { (y, z) } else { (z, y) };
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        (x, y, z)
    };
    match (a, b, c) {
        (0, 0, 0) => 0,
        (0, 0, 1) => 1,
        (0, 0, 2) => 2,
        (0, 1, 1) => 3,
        (0, 1, 2) => 4,
        (0, 2, 2) => 5,
        (1, 1, 1) => 6,
        (1, 1, 2) => 7,
        (1, 2, 2) => 8,
        _ => 9, // (2,2,2)
    }
}

/// Value and derivatives of one potential component at a point, to order 3.
#[derive(Clone, Copy, Debug, Default)]
pub struct Derivs3 {
    pub v: Complex64,
    pub d1: [Complex64; 3],
    pub d2: [Complex64; 6],
    pub d3: [Complex64; 10],
}

impl Derivs3 {
    fn accumulate(&mut self, amp: Complex64, other: &Derivs3) {
        self.v += amp * other.v;
        for k in 0..3 {
            self.d1[k] += amp * other.d1[k];
        }
        for k in 0..6 {
            self.d2[k] += amp * other.d2[k];
        }
        for k in 0..10 {
            self.d3[k] += amp * other.d3[k];
        }
    }

    /// Order-2 jet of the component value (for Grassmann continuation and
    /// sensitivity arithmetic).
    pub fn jet2(&self) -> ScalarJet2 {
        ScalarJet2 {
            f: self.v,
            df: self.d1,
            d2f: self.d2,
        }
    }

    /// Order-2 jet of the first derivative ∂_dir (consumes third derivatives).
    pub fn grad_jet2(&self, dir: usize) -> ScalarJet2 {
        let mut df = [Complex64::new(0.0, 0.0); 3];
        let mut d2f = [Complex64::new(0.0, 0.0); 6];
        for k in 0..3 {
            df[k] = self.d2[sym_index(dir, k)];
        }
        for i in 0..3 {
            for j in i..3 {
                d2f[sym_index(i, j)] = self.d3[sym3_index(dir, i, j)];
            }
        }
        ScalarJet2 {
            f: self.d1[dir],
            df,
            d2f,
        }
    }

    /// AD jet (value + gradient + Hessian) for the coefficient-ODE solver.
    pub fn ad_jet(&self) -> Jet2 {
        Jet2 {
            v: self.v,
            g: self.d1,
            h: self.d2,
        }
    }

    /// AD jet of ∂_dir of the component.
    pub fn ad_grad_jet(&self, dir: usize) -> Jet2 {
        let j = self.grad_jet2(dir);
        Jet2 {
            v: j.f,
            g: j.df,
            h: j.d2f,
        }
    }
}

/// Closed-form spatial profile of one additive term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    Const,
    /// q ↦ q_k − c (shifted coordinate)
    Coordinate { axis: usize, center: f64 },
    /// q ↦ exp(−|q − center|²/(2 width²))
    Gaussian { center: [f64; 3], width: f64 },
}

impl Profile {
    fn derivs(&self, q: [f64; 3]) -> Derivs3 {
        let mut out = Derivs3::default();
        match *self {
            Profile::Const => {
                out.v = Complex64::new(1.0, 0.0);
            }
            Profile::Coordinate { axis, center } => {
                out.v = Complex64::new(q[axis] - center, 0.0);
                out.d1[axis] = Complex64::new(1.0, 0.0);
            }
            Profile::Gaussian { center, width } => {
                let w2 = width * width;
                let mut r2 = 0.0;
                let mut u = [0.0f64; 3];
                for k in 0..3 {
                    let d = q[k] - center[k];
                    r2 += d * d;
                    u[k] = d / w2;
                }
                let g = libm::exp(-r2 / (2.0 * w2));
                out.v = Complex64::new(g, 0.0);
                for k in 0..3 {
                    out.d1[k] = Complex64::new(-u[k] * g, 0.0);
                }
                for i in 0..3 {
                    for j in i..3 {
                        let delta = if i == j { 1.0 / w2 } else { 0.0 };
                        out.d2[sym_index(i, j)] = Complex64::new((u[i] * u[j] - delta) * g, 0.0);
                    }
                }
                for i in 0..3 {
                    for j in i..3 {
                        for k in j..3 {
                            let mut t = -u[i] * u[j] * u[k];
                            if i == j {
                                t += u[k] / w2;
                            }
                            if i == k {
                                t += u[j] / w2;
                            }
                            if j == k {
                                t += u[i] / w2;
                            }
                            out.d3[sym3_index(i, j, k)] = Complex64::new(t * g, 0.0);
                        }
                    }
                }
            }
        }
        out
    }
}

/// One additive term of a potential component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub amp: Complex64,
    pub profile: Profile,
}

/// A potential component as a finite linear combination of profiles.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Component {
    pub terms: Vec<Term>,
}

impl Component {
    pub fn zero() -> Self {
        Component { terms: Vec::new() }
    }

    pub fn constant(a: Complex64) -> Self {
        Component {
            terms: vec![Term {
                amp: a,
                profile: Profile::Const,
            }],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.amp.norm_sqr() == 0.0)
    }

    pub fn derivs(&self, q: [f64; 3]) -> Derivs3 {
        let mut out = Derivs3::default();
        for term in &self.terms {
            if term.amp.norm_sqr() == 0.0 {
                continue;
            }
            out.accumulate(term.amp, &term.profile.derivs(q));
        }
        out
    }

    /// True when every amplitude is real.
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.amp.im == 0.0)
    }
}

/// The four potentials (A₀, A₁, A₂, A₃) with order-3 derivative jets.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EMPotential {
    pub a: [Component; 4],
    pub satisfies_g: bool,
}

impl EMPotential {
    pub fn none() -> Self {
        EMPotential {
            a: Default::default(),
            satisfies_g: true,
        }
    }

    /// Constant scalar potential A₀ = a₀.
    pub fn constant_a0(a0: f64) -> Self {
        let mut p = Self::none();
        p.a[0] = Component::constant(Complex64::new(a0, 0.0));
        p
    }

    /// Linear scalar potential A₀ = e·(q − center) (uniform electric field).
    pub fn linear_a0(e: [f64; 3], center: [f64; 3]) -> Self {
        let mut p = Self::none();
        p.a[0].terms = e
            .iter()
            .enumerate()
            .filter(|(_, &ek)| ek != 0.0)
            .map(|(k, &ek)| Term {
                amp: Complex64::new(ek, 0.0),
                profile: Profile::Coordinate {
                    axis: k,
                    center: center[k],
                },
            })
            .collect();
        p
    }

    /// Symmetric-gauge uniform magnetic field B ẑ about `center`:
    /// A = (−B(q₂−c₂)/2, B(q₁−c₁)/2, 0).
    pub fn uniform_b(b: f64, center: [f64; 3]) -> Self {
        let mut p = Self::none();
        p.a[1].terms = vec![Term {
            amp: Complex64::new(-b / 2.0, 0.0),
            profile: Profile::Coordinate {
                axis: 1,
                center: center[1],
            },
        }];
        p.a[2].terms = vec![Term {
            amp: Complex64::new(b / 2.0, 0.0),
            profile: Profile::Coordinate {
                axis: 0,
                center: center[0],
            },
        }];
        p
    }

    /// Gaussian bumps: for each (component j, amplitude, center, width).
    pub fn gaussian_bumps(bumps: &[(usize, f64, [f64; 3], f64)]) -> Self {
        let mut p = Self::none();
        for &(j, amp, center, width) in bumps {
            assert!(j < 4, "component index out of range");
            assert!(width > 0.0, "gaussian width must be positive");
            p.a[j].terms.push(Term {
                amp: Complex64::new(amp, 0.0),
                profile: Profile::Gaussian { center, width },
            });
        }
        p
    }

    /// All four components identically zero (enables the Fourier-multiplier
    /// fast path in the propagator).
    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|c| c.is_zero())
    }

    pub fn a0_is_zero(&self) -> bool {
        self.a[0].is_zero()
    }

    /// Value + derivatives of component j at (t, q).  Shipped families are
    /// time-independent; `_t` is kept for interface stability.
    pub fn derivs(&self, j: usize, _t: f64, q: [f64; 3]) -> Derivs3 {
        self.a[j].derivs(q)
    }

    pub fn value(&self, j: usize, t: f64, q: [f64; 3]) -> Complex64 {
        self.derivs(j, t, q).v
    }
}
