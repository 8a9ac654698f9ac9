//! Quantum side: the super Fourier transform, Weyl-quantized Hamiltonian,
//! the short-time parametrix U(t,s) as an oscillatory quadrature with a
//! 2×2 kernel matrix, Trotter composition over time slices, and defect
//! diagnostics.
//!
//! The kernel matrix is assembled from the phase/amplitude coefficient
//! solves: with i = √−1 and the coefficient names of the core crate,
//!   B₀₀ = a00,
//!   B₁₀ = a10 + iħ⁻¹·a00·s10,
//!   B₀₁ = a01 + iħ⁻¹·a00·s01,
//!   B₁₁ = ħ²a11 + iħ(a00·s11 + a10·s01 + a01·s10 − ac1d1·sc2d2 − ac2d2·sc1d1)
//!         − a00(s10·s01 − sc1d1·sc2d2),
//! and the scalar phase is s00.  The parametrix acts as
//!   v_b(x) = (2πħ)^{−3/2} Σ_ξ dξ³ · B_{ba}(x,ξ) e^{i s00(x,ξ)/ħ} û_a(ξ).

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use weylprop_core::hjcoeffs::{self, CoeffError};
use weylprop_core::potential::EMPotential;
use weylprop_core::superflow::{HamiltonianParams, SuperflowError};

use crate::grid::{
    forward_with, inverse_with, pairwise_sum, pairwise_sum_c, FftPlan3, Grid3D, SuperWaveFunction,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, thiserror::Error)]
pub enum PropagatorError {
    /// The coefficient solves did not survive the requested time span.
    #[error("time step too large for the short-time parametrix ({reason}); increase slices")]
    StepTooLarge { reason: String },
}

impl From<CoeffError> for PropagatorError {
    fn from(e: CoeffError) -> Self {
        PropagatorError::StepTooLarge {
            reason: format!("{e}"),
        }
    }
}

impl From<SuperflowError> for PropagatorError {
    fn from(e: SuperflowError) -> Self {
        PropagatorError::StepTooLarge {
            reason: format!("{e}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FftDirection {
    Forward,
    Inverse,
}

/// Spatial Fourier transform tensored with the odd transform on the
/// coefficient pair: the forward map sends (u0, u1) to (ħ·û1, ħ⁻¹·û0)
/// (spatial hats with the grid's (2πħ)^{−3/2} convention); the inverse
/// undoes both, so the two compose to the identity.
pub fn super_fft(
    u: &SuperWaveFunction,
    hp: &HamiltonianParams,
    direction: FftDirection,
) -> SuperWaveFunction {
    let grid = u.grid;
    let plan = FftPlan3::new(grid.n);
    let hb = hp.hbar;
    match direction {
        FftDirection::Forward => {
            let h0 = forward_with(&plan, &grid, hb, &u.u0);
            let h1 = forward_with(&plan, &grid, hb, &u.u1);
            SuperWaveFunction {
                u0: h1.into_iter().map(|z| z * hb).collect(),
                u1: h0.into_iter().map(|z| z / hb).collect(),
                grid,
            }
        }
        FftDirection::Inverse => {
            let hat0: Vec<Complex64> = u.u1.iter().map(|z| z * hb).collect();
            let hat1: Vec<Complex64> = u.u0.iter().map(|z| z / hb).collect();
            SuperWaveFunction {
                u0: inverse_with(&plan, &grid, hb, &hat0),
                u1: inverse_with(&plan, &grid, hb, &hat1),
                grid,
            }
        }
    }
}

/// The 2×2 kernel matrix and scalar phase on all (x, ξ) node pairs,
/// flattened as pair index p = x_index·n³ + ξ_index.
#[derive(Clone, Debug)]
pub struct KernelMatrix {
    pub s: f64,
    pub t: f64,
    pub grid: Grid3D,
    pub b00: Vec<Complex64>,
    pub b10: Vec<Complex64>,
    pub b01: Vec<Complex64>,
    pub b11: Vec<Complex64>,
    pub phase: Vec<Complex64>,
}

/// Coefficient-solver step size for a span: the ODEs are smooth on the
/// short-time scales of interest, so a handful of RK4 steps suffices.
fn coeff_dt(span: f64) -> f64 {
    let steps = (span / 0.02).ceil().max(2.0);
    span / steps
}

fn kernel_entries(
    sol: &hjcoeffs::CoeffSolution,
    hb: f64,
) -> (Complex64, Complex64, Complex64, Complex64, Complex64) {
    let sc = &sol.s;
    let ac = &sol.a;
    let b00 = ac.a00;
    let b10 = ac.a10 + I / hb * ac.a00 * sc.s10;
    let b01 = ac.a01 + I / hb * ac.a00 * sc.s01;
    let b11 = hb * hb * ac.a11
        + I * hb
            * (ac.a00 * sc.s11 + ac.a10 * sc.s01 + ac.a01 * sc.s10
                - ac.ac1d1 * sc.sc2d2
                - ac.ac2d2 * sc.sc1d1)
        - ac.a00 * (sc.s10 * sc.s01 - sc.sc1d1 * sc.sc2d2);
    (b00, b10, b01, b11, sc.s00)
}

/// Identity kernel (t = s): B = I, phase = ⟨x|ξ⟩.
fn identity_kernel(s: f64, grid: Grid3D, hp: &HamiltonianParams) -> KernelMatrix {
    let nn = grid.len();
    let mut k = KernelMatrix {
        s,
        t: s,
        grid,
        b00: vec![Complex64::new(1.0, 0.0); nn * nn],
        b10: vec![Complex64::new(0.0, 0.0); nn * nn],
        b01: vec![Complex64::new(0.0, 0.0); nn * nn],
        b11: vec![Complex64::new(1.0, 0.0); nn * nn],
        phase: vec![Complex64::new(0.0, 0.0); nn * nn],
    };
    for xi_idx in 0..nn {
        let xi = grid.momentum(xi_idx, hp.hbar);
        for x_idx in 0..nn {
            let x = grid.point(x_idx);
            k.phase[x_idx * nn + xi_idx] =
                Complex64::new(x[0] * xi[0] + x[1] * xi[1] + x[2] * xi[2], 0.0);
        }
    }
    k
}

/// Build kernels at several output times with one coefficient sweep per
/// (x, ξ) pair.  Times must be ascending and ≥ s.
pub fn build_kernels(
    s: f64,
    times: &[f64],
    grid: Grid3D,
    pot: &EMPotential,
    hp: &HamiltonianParams,
) -> Result<Vec<KernelMatrix>, PropagatorError> {
    assert!(!times.is_empty());
    let span = times.last().unwrap() - s;
    assert!(span >= 0.0, "output times must not precede the start time");
    if span == 0.0 {
        return Ok(times.iter().map(|_| identity_kernel(s, grid, hp)).collect());
    }
    let dt = coeff_dt(span);
    let nn = grid.len();
    let hb = hp.hbar;

    // parallel over x rows; each row solves the coefficient system once per
    // ξ node and emits all requested times from the same sweep
    let rows: Result<Vec<_>, PropagatorError> = (0..nn)
        .into_par_iter()
        .map(|x_idx| {
            let x = grid.point(x_idx);
            let mut row = Vec::with_capacity(nn);
            for xi_idx in 0..nn {
                let xi = grid.momentum(xi_idx, hb);
                let sols = hjcoeffs::solve_range(s, times, x, xi, pot, hp, dt)?;
                row.push(
                    sols.iter()
                        .map(|sol| kernel_entries(sol, hb))
                        .collect::<Vec<_>>(),
                );
            }
            Ok(row)
        })
        .collect();
    let rows = rows?;

    let mut kernels: Vec<KernelMatrix> = times
        .iter()
        .map(|&t| KernelMatrix {
            s,
            t,
            grid,
            b00: vec![Complex64::new(0.0, 0.0); nn * nn],
            b10: vec![Complex64::new(0.0, 0.0); nn * nn],
            b01: vec![Complex64::new(0.0, 0.0); nn * nn],
            b11: vec![Complex64::new(0.0, 0.0); nn * nn],
            phase: vec![Complex64::new(0.0, 0.0); nn * nn],
        })
        .collect();
    for (x_idx, row) in rows.iter().enumerate() {
        for (xi_idx, per_time) in row.iter().enumerate() {
            let p = x_idx * nn + xi_idx;
            for (ti, &(b00, b10, b01, b11, phase)) in per_time.iter().enumerate() {
                kernels[ti].b00[p] = b00;
                kernels[ti].b10[p] = b10;
                kernels[ti].b01[p] = b01;
                kernels[ti].b11[p] = b11;
                kernels[ti].phase[p] = phase;
            }
        }
    }
    Ok(kernels)
}

/// Single-time kernel build.
pub fn build_kernel(
    s: f64,
    t: f64,
    grid: Grid3D,
    pot: &EMPotential,
    hp: &HamiltonianParams,
) -> Result<KernelMatrix, PropagatorError> {
    Ok(build_kernels(s, &[t], grid, pot, hp)?.pop().unwrap())
}

/// Apply a prebuilt kernel: direct oscillatory quadrature over all (x, ξ)
/// pairs, parallel over output x nodes with a fixed pairwise reduction in ξ.
pub fn apply_with_kernel(
    kernel: &KernelMatrix,
    u: &SuperWaveFunction,
    hp: &HamiltonianParams,
) -> SuperWaveFunction {
    let grid = kernel.grid;
    assert_eq!(grid, u.grid, "kernel and state grids differ");
    let nn = grid.len();
    let hb = hp.hbar;
    let plan = FftPlan3::new(grid.n);
    let w0 = forward_with(&plan, &grid, hb, &u.u0);
    let w1 = forward_with(&plan, &grid, hb, &u.u1);
    let scale = (2.0 * PI * hb).powf(-1.5) * grid.dxi(hb).powi(3);

    let out: Vec<(Complex64, Complex64)> = (0..nn)
        .into_par_iter()
        .map(|x_idx| {
            let base = x_idx * nn;
            let mut t0 = vec![Complex64::new(0.0, 0.0); nn];
            let mut t1 = vec![Complex64::new(0.0, 0.0); nn];
            for xi_idx in 0..nn {
                let p = base + xi_idx;
                let osc = (I * kernel.phase[p] / hb).exp();
                let a0 = w0[xi_idx];
                let a1 = w1[xi_idx];
                t0[xi_idx] = osc * (kernel.b00[p] * a0 + kernel.b01[p] * a1);
                t1[xi_idx] = osc * (kernel.b10[p] * a0 + kernel.b11[p] * a1);
            }
            (pairwise_sum_c(&t0) * scale, pairwise_sum_c(&t1) * scale)
        })
        .collect();

    let mut v = SuperWaveFunction::zero(grid);
    for (idx, (a, b)) in out.into_iter().enumerate() {
        v.u0[idx] = a;
        v.u1[idx] = b;
    }
    v
}

/// Kernel rows of the zero-potential parametrix at one momentum node — the
/// closed-form limit of the kernel entries (independent of x, so the
/// parametrix reduces to a Fourier multiplier).
pub fn free_kernel_rows(
    tau: f64,
    xi: [f64; 3],
    hp: &HamiltonianParams,
) -> ((Complex64, Complex64), (Complex64, Complex64)) {
    let xin = (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
    if xin == 0.0 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        return ((one, zero), (zero, one));
    }
    let gamma = hp.c / hp.hbar * tau * xin;
    let (sg, cg) = (gamma.sin(), gamma.cos());
    let (hx, hy, hz) = (xi[0] / xin, xi[1] / xin, xi[2] / xin);
    let hb2 = hp.hbar * hp.hbar;
    // rows (B₀₀ B₀₁; B₁₀ B₁₁) with the ħ-weights of the kernel assembly
    (
        (
            Complex64::new(cg, -sg * hz),
            -I * sg * Complex64::new(hx, -hy) / hb2,
        ),
        (
            -I * sg * Complex64::new(hx, hy),
            Complex64::new(cg, sg * hz),
        ),
    )
}

/// Fourier-multiplier fast path for zero potentials.
fn apply_free(tau: f64, u: &SuperWaveFunction, hp: &HamiltonianParams) -> SuperWaveFunction {
    let grid = u.grid;
    let plan = FftPlan3::new(grid.n);
    let mut h0 = forward_with(&plan, &grid, hp.hbar, &u.u0);
    let mut h1 = forward_with(&plan, &grid, hp.hbar, &u.u1);
    for idx in 0..grid.len() {
        let xi = grid.momentum(idx, hp.hbar);
        let (r0, r1) = free_kernel_rows(tau, xi, hp);
        let (a, b) = (h0[idx], h1[idx]);
        h0[idx] = r0.0 * a + r0.1 * b;
        h1[idx] = r1.0 * a + r1.1 * b;
    }
    SuperWaveFunction {
        u0: inverse_with(&plan, &grid, hp.hbar, &h0),
        u1: inverse_with(&plan, &grid, hp.hbar, &h1),
        grid,
    }
}

/// Short-time parametrix U(t,s)u.  Zero potentials take the multiplier
/// fast path; otherwise the kernel is built from the coefficient ODEs and
/// applied by direct quadrature (O(n⁶)).
pub fn apply_parametrix(
    s: f64,
    t: f64,
    u: &SuperWaveFunction,
    pot: &EMPotential,
    hp: &HamiltonianParams,
) -> Result<SuperWaveFunction, PropagatorError> {
    if pot.is_zero() {
        return Ok(apply_free(t - s, u, hp));
    }
    let kernel = build_kernel(s, t, u.grid, pot, hp)?;
    Ok(apply_with_kernel(&kernel, u, hp))
}

/// Weyl-quantized Hamiltonian on the component pair:
/// Ĥu = Σ_k c·σ̂_k[(−iħ∂_k − (ε/c)A_k)u] + εA₀·u, with the σ̂_k action
/// σ̂₁(u0,u1) = (u1,u0), σ̂₂ = (−iu1, iu0), σ̂₃ = (u0,−u1); derivatives are
/// spectral, assembled as one momentum-space multiplier pass plus pointwise
/// potential terms.
pub fn apply_hamiltonian(
    t: f64,
    u: &SuperWaveFunction,
    pot: &EMPotential,
    hp: &HamiltonianParams,
) -> SuperWaveFunction {
    let grid = u.grid;
    let plan = FftPlan3::new(grid.n);
    let h0 = forward_with(&plan, &grid, hp.hbar, &u.u0);
    let h1 = forward_with(&plan, &grid, hp.hbar, &u.u1);
    // momentum part: Σ c·σ̂_k(ξ_k û) as a single 2×2 multiplier c·σ·ξ
    let mut g0 = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut g1 = vec![Complex64::new(0.0, 0.0); grid.len()];
    for idx in 0..grid.len() {
        let xi = grid.momentum(idx, hp.hbar);
        let (a, b) = (h0[idx], h1[idx]);
        g0[idx] = hp.c * (xi[2] * a + Complex64::new(xi[0], -xi[1]) * b);
        g1[idx] = hp.c * (Complex64::new(xi[0], xi[1]) * a - xi[2] * b);
    }
    let mut v = SuperWaveFunction {
        u0: inverse_with(&plan, &grid, hp.hbar, &g0),
        u1: inverse_with(&plan, &grid, hp.hbar, &g1),
        grid,
    };
    // potential part, pointwise
    if !pot.is_zero() {
        for idx in 0..grid.len() {
            let q = grid.point(idx);
            let a0 = pot.value(0, t, q) * hp.epsilon;
            let ak = [
                pot.value(1, t, q) * hp.epsilon,
                pot.value(2, t, q) * hp.epsilon,
                pot.value(3, t, q) * hp.epsilon,
            ];
            let (a, b) = (u.u0[idx], u.u1[idx]);
            // −σ̂·A u + A₀ u (the c from cσ̂_k cancels the ε/c weight)
            v.u0[idx] += a0 * a - (ak[0] * b - I * ak[1] * b + ak[2] * a);
            v.u1[idx] += a0 * b - (ak[0] * a + I * ak[1] * a - ak[2] * b);
        }
    }
    v
}

/// Defect ‖iħ·∂ₜU(t,s)u − ĤU(t,s)u‖ with centered time differencing of the
/// parametrix at spacing dτ.
pub fn defect_norm(
    s: f64,
    t: f64,
    u: &SuperWaveFunction,
    pot: &EMPotential,
    hp: &HamiltonianParams,
    dtau: f64,
) -> Result<f64, PropagatorError> {
    assert!(dtau > 0.0 && t - dtau > s, "need s < t − dτ");
    let (vm, v0, vp) = if pot.is_zero() {
        (
            apply_free(t - dtau - s, u, hp),
            apply_free(t - s, u, hp),
            apply_free(t + dtau - s, u, hp),
        )
    } else {
        let ks = build_kernels(s, &[t - dtau, t, t + dtau], u.grid, pot, hp)?;
        (
            apply_with_kernel(&ks[0], u, hp),
            apply_with_kernel(&ks[1], u, hp),
            apply_with_kernel(&ks[2], u, hp),
        )
    };
    let hu = apply_hamiltonian(t, &v0, pot, hp);
    let diff = vp.sub(&vm).scaled(I * hp.hbar / (2.0 * dtau));
    Ok(diff.sub(&hu).norm())
}

/// Left-to-right product of short-time parametrices over an equispaced
/// subdivision of [s, t].  The shipped potentials are time-independent, so
/// every slice shares one kernel.
pub fn trotter_compose(
    s: f64,
    t: f64,
    slices: usize,
    u: &SuperWaveFunction,
    pot: &EMPotential,
    hp: &HamiltonianParams,
) -> Result<SuperWaveFunction, PropagatorError> {
    assert!(slices >= 1);
    let delta = (t - s) / slices as f64;
    if pot.is_zero() {
        let mut state = u.clone();
        for _ in 0..slices {
            state = apply_free(delta, &state, hp);
        }
        return Ok(state);
    }
    let kernel = build_kernel(s, s + delta, u.grid, pot, hp)?;
    let mut state = u.clone();
    for _ in 0..slices {
        state = apply_with_kernel(&kernel, &state, hp);
    }
    Ok(state)
}

/// Relative L² distance, used throughout the diagnostics.
pub fn rel_error(a: &SuperWaveFunction, b: &SuperWaveFunction) -> f64 {
    a.sub(b).norm() / b.norm().max(1e-300)
}

/// Least-squares slope of log(err) against log(step) — the convergence-order
/// estimate used by the diagnostics and the batch driver.
pub fn fit_slope(steps: &[f64], errors: &[f64]) -> f64 {
    assert_eq!(steps.len(), errors.len());
    let pts: Vec<(f64, f64)> = steps
        .iter()
        .zip(errors)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&h, &e)| (h.ln(), e.ln()))
        .collect();
    let n = pts.len() as f64;
    let sx = pairwise_sum(&pts.iter().map(|p| p.0).collect::<Vec<_>>());
    let sy = pairwise_sum(&pts.iter().map(|p| p.1).collect::<Vec<_>>());
    let sxx = pairwise_sum(&pts.iter().map(|p| p.0 * p.0).collect::<Vec<_>>());
    let sxy = pairwise_sum(&pts.iter().map(|p| p.0 * p.1).collect::<Vec<_>>());
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}
