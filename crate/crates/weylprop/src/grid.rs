//! Periodic 3D grid, its ħ-scaled momentum lattice, FFTs, and the
//! two-component wavefunction living on it.
//!
//! The spatial transform convention is
//!   û(ξ) = (2πħ)^{−3/2} Σₓ u(x) e^{−i⟨x|ξ⟩/ħ} dx³,
//!   u(x) = (2πħ)^{−3/2} Σ_ξ û(ξ) e^{+i⟨x|ξ⟩/ħ} dξ³,
//! with x on the uniform lattice (L/n)·{0..n−1}³ and ξ on the signed dual
//! lattice (2πħ/L)·{−n/2..n/2−1}³.  With those weights the two maps compose
//! to the identity exactly.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::sync::Arc;

/// Uniform periodic grid: `n` points per axis on a box of side `l`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid3D {
    pub n: usize,
    pub l: f64,
}

impl Grid3D {
    pub fn new(n: usize, l: f64) -> Self {
        assert!(n >= 8 && n.is_power_of_two(), "grid size must be a power of two >= 8");
        assert!(l > 0.0, "box side must be positive");
        Grid3D { n, l }
    }

    /// Total node count n³.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spatial spacing L/n.
    pub fn dx(&self) -> f64 {
        self.l / self.n as f64
    }

    /// Momentum spacing 2πħ/L.
    pub fn dxi(&self, hbar: f64) -> f64 {
        2.0 * PI * hbar / self.l
    }

    /// Flat index with z fastest (row-major in (ix, iy, iz)).
    pub fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.n + iy) * self.n + iz
    }

    /// Inverse of [`Grid3D::index`].
    pub fn coords(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.n;
        (idx / (n * n), (idx / n) % n, idx % n)
    }

    /// Spatial node for a flat index.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let (ix, iy, iz) = self.coords(idx);
        let dx = self.dx();
        [ix as f64 * dx, iy as f64 * dx, iz as f64 * dx]
    }

    /// Signed momentum node for a flat index: bin k maps to the integer
    /// k < n/2 ? k : k − n, scaled by 2πħ/L.
    pub fn momentum(&self, idx: usize, hbar: f64) -> [f64; 3] {
        let (kx, ky, kz) = self.coords(idx);
        let d = self.dxi(hbar);
        let signed = |k: usize| -> f64 {
            if k < self.n / 2 {
                k as f64
            } else {
                k as f64 - self.n as f64
            }
        };
        [signed(kx) * d, signed(ky) * d, signed(kz) * d]
    }
}

/// Reusable 3D FFT plan (three 1D passes per direction).
pub struct FftPlan3 {
    n: usize,
    forward: Arc<dyn rustfft::Fft<f64>>,
    inverse: Arc<dyn rustfft::Fft<f64>>,
}

impl FftPlan3 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        FftPlan3 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    /// Unnormalized 3D DFT in place (forward: e^{−2πi jk/n} per axis).
    pub fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "buffer size mismatch");
        let fft = if inverse { &self.inverse } else { &self.forward };
        // z axis: contiguous lines
        for line in data.chunks_exact_mut(n) {
            fft.process(line);
        }
        // y and x axes: gather strided lines into scratch
        let mut scratch = vec![Complex64::new(0.0, 0.0); n];
        // y axis
        for ix in 0..n {
            for iz in 0..n {
                let base = ix * n * n + iz;
                for iy in 0..n {
                    scratch[iy] = data[base + iy * n];
                }
                fft.process(&mut scratch);
                for iy in 0..n {
                    data[base + iy * n] = scratch[iy];
                }
            }
        }
        // x axis
        for iy in 0..n {
            for iz in 0..n {
                let base = iy * n + iz;
                for ix in 0..n {
                    scratch[ix] = data[base + ix * n * n];
                }
                fft.process(&mut scratch);
                for ix in 0..n {
                    data[base + ix * n * n] = scratch[ix];
                }
            }
        }
    }
}

/// Forward transform with a caller-held plan (hot loops reuse one plan).
pub fn forward_with(plan: &FftPlan3, grid: &Grid3D, hbar: f64, field: &[Complex64]) -> Vec<Complex64> {
    let mut out = field.to_vec();
    plan.transform(&mut out, false);
    let scale = (2.0 * PI * hbar).powf(-1.5) * grid.dx().powi(3);
    for z in &mut out {
        *z *= scale;
    }
    out
}

/// Inverse transform with a caller-held plan.
pub fn inverse_with(plan: &FftPlan3, grid: &Grid3D, hbar: f64, field: &[Complex64]) -> Vec<Complex64> {
    let mut out = field.to_vec();
    plan.transform(&mut out, true);
    let scale = (2.0 * PI * hbar).powf(-1.5) * grid.dxi(hbar).powi(3);
    for z in &mut out {
        *z *= scale;
    }
    out
}

/// Forward transform of one scalar field: physical samples → momentum
/// samples on the signed lattice, with the (2πħ)^{−3/2} dx³ weight.
pub fn forward_field(grid: &Grid3D, hbar: f64, field: &[Complex64]) -> Vec<Complex64> {
    forward_with(&FftPlan3::new(grid.n), grid, hbar, field)
}

/// Inverse transform: momentum samples → physical samples, with the
/// (2πħ)^{−3/2} dξ³ weight.  Composes with [`forward_field`] to identity.
pub fn inverse_field(grid: &Grid3D, hbar: f64, field: &[Complex64]) -> Vec<Complex64> {
    inverse_with(&FftPlan3::new(grid.n), grid, hbar, field)
}

/// Two-component state u = u0 + u1·θ1θ2 sampled on a grid.
#[derive(Clone, Debug)]
pub struct SuperWaveFunction {
    pub u0: Vec<Complex64>,
    pub u1: Vec<Complex64>,
    pub grid: Grid3D,
}

impl SuperWaveFunction {
    pub fn zero(grid: Grid3D) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.len()];
        SuperWaveFunction {
            u0: z.clone(),
            u1: z,
            grid,
        }
    }

    /// L² norm: ‖u‖² = (‖u0‖² + ‖u1‖²)·dx³.
    pub fn norm(&self) -> f64 {
        let terms: Vec<f64> = self
            .u0
            .iter()
            .zip(&self.u1)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect();
        (pairwise_sum(&terms) * self.grid.dx().powi(3)).sqrt()
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        SuperWaveFunction {
            u0: self.u0.iter().map(|v| v * z).collect(),
            u1: self.u1.iter().map(|v| v * z).collect(),
            grid: self.grid,
        }
    }

    pub fn add(&self, other: &SuperWaveFunction) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        SuperWaveFunction {
            u0: self.u0.iter().zip(&other.u0).map(|(a, b)| a + b).collect(),
            u1: self.u1.iter().zip(&other.u1).map(|(a, b)| a + b).collect(),
            grid: self.grid,
        }
    }

    pub fn sub(&self, other: &SuperWaveFunction) -> Self {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }
}

/// Fixed-order pairwise summation (deterministic and accurate regardless of
/// thread count — callers sum per-node contributions through this).
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Pairwise summation for complex contributions.
pub fn pairwise_sum_c(v: &[Complex64]) -> Complex64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum_c(&v[..mid]) + pairwise_sum_c(&v[mid..])
}
