//! Ground-truth spinor side: ℂ²-fields, the ♯/♭ identification with
//! two-component superfunctions, the exact free propagator, a Strang
//! split-step reference solver, and the reduction of matrix-valued
//! potentials to an equivalent scalar four-potential.

use num_complex::Complex64;
use weylprop_core::potential::{Component, EMPotential};
use weylprop_core::superflow::HamiltonianParams;

use crate::grid::{forward_with, inverse_with, FftPlan3, Grid3D, SuperWaveFunction};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Two-component spinor field ψ = (ψ1, ψ2) on a grid.
#[derive(Clone, Debug)]
pub struct SpinorField {
    pub psi1: Vec<Complex64>,
    pub psi2: Vec<Complex64>,
    pub grid: Grid3D,
}

impl SpinorField {
    pub fn zero(grid: Grid3D) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); grid.len()];
        SpinorField {
            psi1: z.clone(),
            psi2: z,
            grid,
        }
    }

    pub fn norm(&self) -> f64 {
        let s: f64 = self
            .psi1
            .iter()
            .zip(&self.psi2)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .sum();
        (s * self.grid.dx().powi(3)).sqrt()
    }

    pub fn sub(&self, other: &SpinorField) -> SpinorField {
        SpinorField {
            psi1: self.psi1.iter().zip(&other.psi1).map(|(a, b)| a - b).collect(),
            psi2: self.psi2.iter().zip(&other.psi2).map(|(a, b)| a - b).collect(),
            grid: self.grid,
        }
    }
}

/// ♯: identify a spinor (ψ1, ψ2) with the even superfunction ψ1 + ψ2·θ1θ2.
pub fn sharp(psi: &SpinorField) -> SuperWaveFunction {
    SuperWaveFunction {
        u0: psi.psi1.clone(),
        u1: psi.psi2.clone(),
        grid: psi.grid,
    }
}

/// ♭: the inverse identification.
pub fn flat(u: &SuperWaveFunction) -> SpinorField {
    SpinorField {
        psi1: u.u0.clone(),
        psi2: u.u1.clone(),
        grid: u.grid,
    }
}

/// Pauli-matrix action on a component pair, j ∈ {1,2,3}.
pub fn pauli_apply(j: usize, v: (Complex64, Complex64)) -> (Complex64, Complex64) {
    match j {
        1 => (v.1, v.0),
        2 => (-I * v.1, I * v.0),
        3 => (v.0, -v.1),
        _ => panic!("pauli index out of range"),
    }
}

/// Exact free evolution (A ≡ 0): momentum-space multiplier
/// cos(γ)·I − i sin(γ)·σ·ξ/|ξ| with γ = cħ⁻¹(t−s)|ξ|; the ξ = 0 mode is the
/// identity (the |ξ| → 0 limit of the multiplier).
pub fn exact_free_propagator(
    s: f64,
    t: f64,
    psi: &SpinorField,
    hp: &HamiltonianParams,
) -> SpinorField {
    let grid = psi.grid;
    let plan = FftPlan3::new(grid.n);
    let mut h1 = forward_with(&plan, &grid, hp.hbar, &psi.psi1);
    let mut h2 = forward_with(&plan, &grid, hp.hbar, &psi.psi2);
    for idx in 0..grid.len() {
        let xi = grid.momentum(idx, hp.hbar);
        let (m1, m2) = free_multiplier_rows(t - s, xi, hp);
        let (a, b) = (h1[idx], h2[idx]);
        h1[idx] = m1.0 * a + m1.1 * b;
        h2[idx] = m2.0 * a + m2.1 * b;
    }
    SpinorField {
        psi1: inverse_with(&plan, &grid, hp.hbar, &h1),
        psi2: inverse_with(&plan, &grid, hp.hbar, &h2),
        grid,
    }
}

/// Rows of the free 2×2 multiplier at one momentum node.
pub fn free_multiplier_rows(
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
    let hx = xi[0] / xin;
    let hy = xi[1] / xin;
    let hz = xi[2] / xin;
    // cos(γ)·I − i sin(γ)(σ·ξ̂)
    (
        (
            Complex64::new(cg, -sg * hz),
            -I * sg * Complex64::new(hx, -hy),
        ),
        (
            -I * sg * Complex64::new(hx, hy),
            Complex64::new(cg, sg * hz),
        ),
    )
}

/// exp(−iτ·M) for a 2×2 matrix M = w·I + v·σ with complex w, v.
fn exp_minus_i_tau(w: Complex64, v: [Complex64; 3], tau: f64) -> [[Complex64; 2]; 2] {
    let lam2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let lam = lam2.sqrt();
    let phase = (-I * tau * w).exp();
    // cos(τλ) and sin(τλ)/λ, stable as λ → 0
    let (cosl, sincl) = if lam.norm() * tau < 1e-6 {
        let z = lam * tau;
        (
            Complex64::new(1.0, 0.0) - z * z / 2.0,
            Complex64::new(tau, 0.0) * (Complex64::new(1.0, 0.0) - z * z / 6.0),
        )
    } else {
        ((lam * tau).cos(), (lam * tau).sin() / lam)
    };
    let d = -I * sincl;
    [
        [phase * (cosl + d * v[2]), phase * d * (v[0] - I * v[1])],
        [phase * d * (v[0] + I * v[1]), phase * (cosl - d * v[2])],
    ]
}

/// Strang split-step reference: half-step exact exponential of the
/// pointwise potential matrix εA₀·I − ε·σ·A, full free step, half step
/// again.  Second order in dt and exactly unitary for real potentials.
pub fn split_step_reference(
    s: f64,
    t: f64,
    psi: &SpinorField,
    pot: &EMPotential,
    hp: &HamiltonianParams,
    dt: f64,
) -> SpinorField {
    assert!(t >= s && dt > 0.0);
    let grid = psi.grid;
    if t == s {
        return psi.clone();
    }
    let nsteps = ((t - s) / dt).ceil().max(1.0) as usize;
    let h = (t - s) / nsteps as f64;

    // potentials are time-independent, so the half-step matrices can be
    // precomputed once per node
    let half: Vec<[[Complex64; 2]; 2]> = (0..grid.len())
        .map(|idx| {
            let q = grid.point(idx);
            let a0 = pot.value(0, s, q);
            let v = [
                -hp.epsilon * pot.value(1, s, q) / hp.hbar,
                -hp.epsilon * pot.value(2, s, q) / hp.hbar,
                -hp.epsilon * pot.value(3, s, q) / hp.hbar,
            ];
            exp_minus_i_tau(hp.epsilon * a0 / hp.hbar, v, h / 2.0)
        })
        .collect();

    let apply_half = |f: &mut SpinorField| {
        for idx in 0..f.grid.len() {
            let m = &half[idx];
            let (a, b) = (f.psi1[idx], f.psi2[idx]);
            f.psi1[idx] = m[0][0] * a + m[0][1] * b;
            f.psi2[idx] = m[1][0] * a + m[1][1] * b;
        }
    };

    let plan = FftPlan3::new(grid.n);
    let mut state = psi.clone();
    for _ in 0..nsteps {
        apply_half(&mut state);
        // free step via the exact multiplier, reusing the plan
        let mut h1 = forward_with(&plan, &grid, hp.hbar, &state.psi1);
        let mut h2 = forward_with(&plan, &grid, hp.hbar, &state.psi2);
        for idx in 0..grid.len() {
            let xi = grid.momentum(idx, hp.hbar);
            let (m1, m2) = free_multiplier_rows(h, xi, hp);
            let (a, b) = (h1[idx], h2[idx]);
            h1[idx] = m1.0 * a + m1.1 * b;
            h2[idx] = m2.0 * a + m2.1 * b;
        }
        state.psi1 = inverse_with(&plan, &grid, hp.hbar, &h1);
        state.psi2 = inverse_with(&plan, &grid, hp.hbar, &h2);
        apply_half(&mut state);
    }
    state
}

/// Right-hand side operator 𝔹(t)ψ = Σ c·σ_k(−iħ∂_k − (ε/c)A_k)ψ + εA₀ψ,
/// with spectral derivatives.
pub fn weyl_rhs(
    t: f64,
    psi: &SpinorField,
    pot: &EMPotential,
    hp: &HamiltonianParams,
) -> SpinorField {
    let grid = psi.grid;
    let plan = FftPlan3::new(grid.n);
    let h1 = forward_with(&plan, &grid, hp.hbar, &psi.psi1);
    let h2 = forward_with(&plan, &grid, hp.hbar, &psi.psi2);
    // d[k] = −iħ∂_k ψ: multiplier ξ_k on the signed lattice
    let mut d = Vec::with_capacity(3);
    for k in 0..3 {
        let mut g1 = h1.clone();
        let mut g2 = h2.clone();
        for idx in 0..grid.len() {
            let xi = grid.momentum(idx, hp.hbar)[k];
            g1[idx] *= xi;
            g2[idx] *= xi;
        }
        d.push((
            inverse_with(&plan, &grid, hp.hbar, &g1),
            inverse_with(&plan, &grid, hp.hbar, &g2),
        ));
    }
    let mut out = SpinorField::zero(grid);
    for idx in 0..grid.len() {
        let q = grid.point(idx);
        let a0 = pot.value(0, t, q);
        let mut acc = (
            hp.epsilon * a0 * psi.psi1[idx],
            hp.epsilon * a0 * psi.psi2[idx],
        );
        for k in 0..3 {
            let ak = pot.value(k + 1, t, q);
            let gk = (
                d[k].0[idx] - hp.epsilon / hp.c * ak * psi.psi1[idx],
                d[k].1[idx] - hp.epsilon / hp.c * ak * psi.psi2[idx],
            );
            let sg = pauli_apply(k + 1, gk);
            acc.0 += hp.c * sg.0;
            acc.1 += hp.c * sg.1;
        }
        out.psi1[idx] = acc.0;
        out.psi2[idx] = acc.1;
    }
    out
}

fn component_add(acc: &mut Component, c: &Component, amp: Complex64) {
    for term in &c.terms {
        let scaled = term.amp * amp;
        if scaled.norm_sqr() == 0.0 {
            continue;
        }
        // combine like profiles so realness checks see cancelled imaginaries
        if let Some(existing) = acc.terms.iter_mut().find(|t| t.profile == term.profile) {
            existing.amp += scaled;
        } else {
            acc.terms.push(weylprop_core::potential::Term {
                amp: scaled,
                profile: term.profile,
            });
        }
    }
}

/// Reduce a matrix-valued potential Σ_k A_j^{[k]}·σ_k (σ_0 = I) to an
/// equivalent scalar four-potential:
///   Ã₁ = A₁⁰ + A₀¹ + i(A₂³ − A₃²),   Ã₂ = A₂⁰ + A₀² + i(A₃¹ − A₁³),
///   Ã₃ = A₃⁰ + A₀³ + i(A₁² − A₂¹),   Ã₀ = A₀⁰ + A₁¹ + A₂² + A₃³.
/// The returned flag is false when Ã₀ fails to be real-valued (the
/// applicability condition of the reduction).
pub fn matrix_potential_reduce(blocks: &[[Component; 4]; 4]) -> (EMPotential, bool) {
    let one = Complex64::new(1.0, 0.0);
    let mut pot = EMPotential::none();
    // indexing: blocks[j][k] = A_j^{[k]}
    let spatial: [[(usize, usize, Complex64); 4]; 3] = [
        [(1, 0, one), (0, 1, one), (2, 3, I), (3, 2, -I)],
        [(2, 0, one), (0, 2, one), (3, 1, I), (1, 3, -I)],
        [(3, 0, one), (0, 3, one), (1, 2, I), (2, 1, -I)],
    ];
    for (axis, parts) in spatial.iter().enumerate() {
        let mut comp = Component::zero();
        for &(j, k, amp) in parts {
            component_add(&mut comp, &blocks[j][k], amp);
        }
        pot.a[axis + 1] = comp;
    }
    let mut a0 = Component::zero();
    for j in 0..4 {
        component_add(&mut a0, &blocks[j][j], one);
    }
    let flag = a0.is_real();
    pot.a[0] = a0;
    pot.satisfies_g = flag;
    (pot, flag)
}
