//! Scalar coefficient route to the short-time phase and amplitude.
//!
//! The phase S and amplitude 𝒜 of the parametrix kernel are polynomials in
//! the four odd generators; their scalar coefficients obey a closed system
//! of ODEs in t at fixed (x, ξ): a Riccati equation drives the θ₁θ₂
//! coefficient, everything else is linear transport with source terms
//! (w₀…w₄) built from x-derivatives of already-solved coefficients.
//!
//! All ODEs are integrated in [`Jet2`] arithmetic, so the x-gradients (and,
//! where valid, Hessians) of every coefficient are transported alongside the
//! values — that is exactly the forward-sensitivity route, and it is what
//! makes the w-source terms computable without finite differences.
//!
//! The zero-potential case has explicit closed forms ([`closed_form_free`])
//! used both as a fast path and as an oracle in tests.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::jet::Jet2;
use crate::potential::EMPotential;
use crate::superflow::HamiltonianParams;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO_C: Complex64 = Complex64::new(0.0, 0.0);

/// If the Riccati variable passes this magnitude the step size was too large
/// or a focal point was hit; either way the result is meaningless.
const RICCATI_LIMIT: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffError {
    /// The Riccati coefficient blew up (step too large or focal point).
    RiccatiBlowup,
    /// Closed free-field forms need |ξ| > 0.
    ZeroMomentum,
}

impl core::fmt::Display for CoeffError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CoeffError::RiccatiBlowup => write!(f, "Riccati coefficient blew up"),
            CoeffError::ZeroMomentum => write!(f, "closed free form requires nonzero momentum"),
        }
    }
}

/// Phase coefficients in the odd-monomial basis
/// S = s00 + s10 θ₁θ₂ + Σ s_{c_j d_k} θ_j π_k + s01 π₁π₂ + s11 θ₁θ₂π₁π₂.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SCoefficients {
    pub s00: Complex64,
    pub s10: Complex64,
    pub sc1d1: Complex64,
    pub sc2d2: Complex64,
    pub sc1d2: Complex64,
    pub sc2d1: Complex64,
    pub s01: Complex64,
    pub s11: Complex64,
}

/// Amplitude coefficients in the same basis.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ACoefficients {
    pub a00: Complex64,
    pub a10: Complex64,
    pub ac1d1: Complex64,
    pub ac2d2: Complex64,
    pub ac1d2: Complex64,
    pub ac2d1: Complex64,
    pub a01: Complex64,
    pub a11: Complex64,
}

/// x-gradients of every phase and amplitude coefficient.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SensitivityState {
    pub s00: [Complex64; 3],
    pub s10: [Complex64; 3],
    pub sc1d1: [Complex64; 3],
    pub sc2d2: [Complex64; 3],
    pub sc1d2: [Complex64; 3],
    pub sc2d1: [Complex64; 3],
    pub s01: [Complex64; 3],
    pub s11: [Complex64; 3],
    pub a00: [Complex64; 3],
    pub a10: [Complex64; 3],
    pub ac1d1: [Complex64; 3],
    pub ac2d2: [Complex64; 3],
    pub ac1d2: [Complex64; 3],
    pub ac2d1: [Complex64; 3],
    pub a01: [Complex64; 3],
    pub a11: [Complex64; 3],
}

/// Second symbol derivatives of the effective Hamiltonian along the phase
/// gradient (the inputs to every transport coefficient).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymbolDerivatives {
    /// ∂²H/∂π₁∂θ₁ = ∂²H/∂π₂∂θ₂
    pub h_pi1_theta1: Complex64,
    /// ∂²H/∂π₂∂π₁
    pub h_pi2_pi1: Complex64,
    /// ∂²H/∂θ₂∂θ₁
    pub h_theta2_theta1: Complex64,
}

/// The damping rate w₀ and the four transport sources w₁…w₄, with the
/// symbol derivatives they were assembled from.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct WTerms {
    pub w0: Complex64,
    pub w1: Complex64,
    pub w2: Complex64,
    pub w3: Complex64,
    pub w4: Complex64,
    pub symbols: SymbolDerivatives,
}

/// Everything the kernel assembly needs at one output time.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CoeffSolution {
    pub t: f64,
    pub s: SCoefficients,
    pub a: ACoefficients,
    pub sens: SensitivityState,
}

// ---------------------------------------------------------------------------
// hoisted potential data at the evaluation point

/// Potential jets hoisted out of the time loop (shipped potential families
/// are time-independent, so one evaluation per (x,ξ) pair suffices).
struct PotJets {
    /// m_j(τ) = m0_j + (τ−s)·md_j, the gauge-shifted momentum that all
    /// symbol derivatives are built from.
    m0: [Jet2; 3],
    md: [Jet2; 3],
    /// scalar potential value jet (for the s00 quadrature)
    a0: Jet2,
}

fn pot_jets(x: [f64; 3], xi: [f64; 3], pot: &EMPotential, hp: &HamiltonianParams) -> PotJets {
    let eps = hp.epsilon;
    let a0d = pot.derivs(0, 0.0, x);
    let mut m0 = [Jet2::ZERO; 3];
    let mut md = [Jet2::ZERO; 3];
    for j in 0..3 {
        let aj = pot.derivs(j + 1, 0.0, x).ad_jet();
        m0[j] = Jet2::from_re(hp.c * xi[j]) - aj.scale_re(eps);
        md[j] = a0d.ad_grad_jet(j).scale_re(-hp.c * eps);
    }
    PotJets {
        m0,
        md,
        a0: a0d.ad_jet(),
    }
}

// ---------------------------------------------------------------------------
// the joint coefficient ODE system in jet arithmetic

/// State layout: [s10, E=∫w₀, s01, s11, a10, acd, a01, a11].
/// sc1d1 = sc2d2 = e^{−E} and a00 = e^{E} are derived, never stored.
type State = [Jet2; 8];

fn grad3(q: &Jet2) -> [Jet2; 3] {
    [
        q.grad_component(0),
        q.grad_component(1),
        q.grad_component(2),
    ]
}

/// Constant third symbol derivatives, as ξ-contraction weights: for a
/// gradient vector G_j the contraction Σ_j G_j·∂³H/∂ξ_j∂·∂· collapses to a
/// fixed complex combination of the components.
struct Contractions {
    /// weights of ∂³H/∂ξ_j∂π₂∂π₁ = (cħ⁻², −icħ⁻², 0)
    pp: [Complex64; 3],
    /// weights of ∂³H/∂ξ_j∂θ₂∂θ₁ = (c, ic, 0)
    tt: [Complex64; 3],
    /// weights of ∂³H/∂ξ_j∂π₁∂θ₁ = ∂³H/∂ξ_j∂π₂∂θ₂ = (0, 0, −icħ⁻¹)
    pt: [Complex64; 3],
}

impl Contractions {
    fn new(hp: &HamiltonianParams) -> Self {
        let c = hp.c;
        let hb = hp.hbar;
        Contractions {
            pp: [
                Complex64::new(c / (hb * hb), 0.0),
                -I * (c / (hb * hb)),
                ZERO_C,
            ],
            tt: [Complex64::new(c, 0.0), I * c, ZERO_C],
            pt: [ZERO_C, ZERO_C, -I * (c / hb)],
        }
    }
}

fn contract(g: &[Jet2; 3], w: &[Complex64; 3]) -> Jet2 {
    g[0].scale(w[0]) + g[1].scale(w[1]) + g[2].scale(w[2])
}

/// Symbol second derivatives as jets at elapsed time τ−s.
fn symbol_jets(pj: &PotJets, elapsed: f64, hp: &HamiltonianParams) -> (Jet2, Jet2, Jet2) {
    let m: [Jet2; 3] = core::array::from_fn(|j| pj.m0[j] + pj.md[j].scale_re(elapsed));
    let hb = hp.hbar;
    let b = m[2].scale(-I / hb); // ∂²H/∂π₁∂θ₁ = ∂²H/∂π₂∂θ₂
    let a = (m[0] - m[1].scale(I)).scale_re(1.0 / (hb * hb)); // ∂²H/∂π₂∂π₁
    let e = m[0] + m[1].scale(I); // ∂²H/∂θ₂∂θ₁
    (a, b, e)
}

#[allow(clippy::many_single_char_names)]
fn rhs(pj: &PotJets, ctr: &Contractions, elapsed: f64, st: &State, hp: &HamiltonianParams) -> State {
    let (a, b, e) = symbol_jets(pj, elapsed, hp);
    let [s10, e_int, s01, s11, a10, acd, a01, a11] = *st;

    let w0 = b + a * s10;
    let sc = (-e_int).exp();
    let a00 = e_int.exp();
    let sc2 = sc * sc;

    // Riccati and the two quadratures
    let ds10 = -(a * s10 * s10 + (b * s10).scale_re(2.0) + e);
    let de = w0;
    let ds01 = -(a * sc2);

    // gradient contractions (one per gradient vector, reused across sources)
    let g01 = grad3(&s01);
    let gsc = grad3(&sc);
    let gsc2 = grad3(&sc2);
    let ga00 = grad3(&a00);
    let g10 = grad3(&s10);
    let g11 = grad3(&s11);
    let ga10 = grad3(&a10);
    let gacd = grad3(&acd);
    let ga01 = grad3(&a01);

    let pp_g01 = contract(&g01, &ctr.pp);
    let tt_g01 = contract(&g01, &ctr.tt);
    let pt_g01 = contract(&g01, &ctr.pt);
    let pt_gsc = contract(&gsc, &ctr.pt);
    let pp_gsc = contract(&gsc, &ctr.pp);
    let pp_gsc2 = contract(&gsc2, &ctr.pp);
    let pp_ga00 = contract(&ga00, &ctr.pp);
    let tt_ga00 = contract(&ga00, &ctr.tt);
    let pt_ga00 = contract(&ga00, &ctr.pt);
    let pp_g10 = contract(&g10, &ctr.pp);
    let pt_g10 = contract(&g10, &ctr.pt);
    let pp_g11 = contract(&g11, &ctr.pp);
    let pt_g11 = contract(&g11, &ctr.pt);
    let pp_ga10 = contract(&ga10, &ctr.pp);
    let pp_gacd = contract(&gacd, &ctr.pp);
    let pt_gacd = contract(&gacd, &ctr.pt);
    let pp_ga01 = contract(&ga01, &ctr.pp);
    let tt_ga01 = contract(&ga01, &ctr.tt);
    let pt_ga01 = contract(&ga01, &ctr.pt);

    // w₁: source of the θ₁θ₂π₁π₂ phase coefficient (from the top odd
    // component of the Hamilton–Jacobi equation; note the sc²-weighted slot
    // carries the gradient of the θ₁θ₂ coefficient, not of the π₁π₂ one)
    let w1 = (s10 * pt_g01 - sc * pt_gsc).scale_re(2.0)
        + (s10 * s10 * pp_g01 + sc2 * pp_g10 - s10 * pp_gsc2)
        + tt_g01;
    let ds11 = -((w0 * s11).scale_re(2.0) + w1);

    // w₂: source of the θ₁θ₂ amplitude coefficient
    let w2 = tt_ga00
        + (s10 * pt_ga00).scale_re(2.0)
        + s10 * s10 * pp_ga00
        + a00 * (pt_g10 + s10 * pp_g10);
    let da10 = -(w0 * a10 + w2);

    // θ_jπ_j amplitude transport; ∂³H/∂ξ∂π₁∂π₂ = −∂³H/∂ξ∂π₂∂π₁
    let dacd = -(sc * (pt_ga00 + s10 * pp_ga00 + a10 * a + a00 * pp_g10));

    // w₃: source of the π₁π₂ amplitude coefficient (derived from the π₁π₂
    // component of the amplitude continuity equation; the last term is
    // absent from the transport display but required by the continuity
    // equation and confirmed by the trajectory oracle)
    let w3 = ((acd * sc).scale_re(2.0) - a00 * s11) * a
        + (sc2 * pp_ga00 + a00 * pp_gsc2 - a00 * s10 * pp_g01)
        - a00 * pt_g01;
    let da01 = w0 * a01 - w3;

    // w₄: source of the θ₁θ₂π₁π₂ amplitude coefficient, assembled term by
    // term from the transport displays (some pairs cancel; kept verbatim)
    let w4 = tt_ga01
        + s10 * (pt_ga01.scale_re(2.0) + s10 * pp_ga01)
        + s11 * (pt_ga00 + s10 * pp_ga00).scale_re(2.0)
        + sc2 * pp_ga10
        - (sc * (pt_gacd + s10 * pp_gacd)).scale_re(2.0)
        + a10 * (pt_g10 + s10 * pp_g10).scale_re(2.0)
        - a10 * pp_gsc2
        + (acd * sc * pp_g10).scale_re(2.0)
        - (acd * (pt_gsc + s10 * pp_gsc)).scale_re(2.0)
        + a00 * (pt_g11 + s10 * pp_g11)
        + (a01 - a10) * (pt_g10 + s10 * pp_g10)
        + a10 * pp_gsc2
        - (acd * sc * pp_g10).scale_re(2.0);
    let da11 = w0 * a11 - w4;

    [ds10, de, ds01, ds11, da10, dacd, da01, da11]
}

fn axpy(st: &State, k: &State, h: f64) -> State {
    core::array::from_fn(|i| st[i] + k[i].scale_re(h))
}

fn rk4_step(
    pj: &PotJets,
    ctr: &Contractions,
    elapsed: f64,
    st: &State,
    h: f64,
    hp: &HamiltonianParams,
) -> State {
    let k1 = rhs(pj, ctr, elapsed, st, hp);
    let k2 = rhs(pj, ctr, elapsed + 0.5 * h, &axpy(st, &k1, 0.5 * h), hp);
    let k3 = rhs(pj, ctr, elapsed + 0.5 * h, &axpy(st, &k2, 0.5 * h), hp);
    let k4 = rhs(pj, ctr, elapsed + h, &axpy(st, &k3, h), hp);
    core::array::from_fn(|i| {
        st[i] + (k1[i] + (k2[i] + k3[i]).scale_re(2.0) + k4[i]).scale_re(h / 6.0)
    })
}

// ---------------------------------------------------------------------------
// emission

fn emit(
    t: f64,
    s: f64,
    x: [f64; 3],
    xi: [f64; 3],
    pj: &PotJets,
    st: &State,
    hp: &HamiltonianParams,
) -> CoeffSolution {
    let tau = t - s;
    let eps = hp.epsilon;
    let dot = x[0] * xi[0] + x[1] * xi[1] + x[2] * xi[2];
    let e_int = st[1];
    let sc = (-e_int).exp();
    let a00 = e_int.exp();

    let sco = SCoefficients {
        s00: Complex64::new(dot, 0.0) - pj.a0.v * (eps * tau),
        s10: st[0].v,
        sc1d1: sc.v,
        sc2d2: sc.v,
        sc1d2: ZERO_C,
        sc2d1: ZERO_C,
        s01: st[2].v,
        s11: st[3].v,
    };
    let aco = ACoefficients {
        a00: a00.v,
        a10: st[4].v,
        ac1d1: st[5].v,
        ac2d2: st[5].v,
        ac1d2: ZERO_C,
        ac2d1: ZERO_C,
        a01: st[6].v,
        a11: st[7].v,
    };
    let mut sens = SensitivityState::default();
    for j in 0..3 {
        sens.s00[j] = Complex64::new(xi[j], 0.0) - pj.a0.g[j] * (eps * tau);
        sens.s10[j] = st[0].g[j];
        sens.sc1d1[j] = sc.g[j];
        sens.sc2d2[j] = sc.g[j];
        sens.s01[j] = st[2].g[j];
        sens.s11[j] = st[3].g[j];
        sens.a00[j] = a00.g[j];
        sens.a10[j] = st[4].g[j];
        sens.ac1d1[j] = st[5].g[j];
        sens.ac2d2[j] = st[5].g[j];
        sens.a01[j] = st[6].g[j];
        // the transported gradient of the top coefficient would need third
        // x-derivatives of the base coefficients, which order-2 jets do not
        // carry; left at zero here, filled by finite differences in
        // `sensitivities`
        sens.a11[j] = ZERO_C;
    }
    CoeffSolution {
        t,
        s: sco,
        a: aco,
        sens,
    }
}

// ---------------------------------------------------------------------------
// public solve API

/// Integrate the full coefficient system from start time `s`, emitting the
/// solution at every requested time (ascending, all ≥ s).  One potential
/// evaluation and one forward sweep serve all output times.
pub fn solve_range(
    s: f64,
    times: &[f64],
    x: [f64; 3],
    xi: [f64; 3],
    pot: &EMPotential,
    hp: &HamiltonianParams,
    dt: f64,
) -> Result<Vec<CoeffSolution>, CoeffError> {
    assert!(dt > 0.0, "step size must be positive");
    let pj = pot_jets(x, xi, pot, hp);
    let ctr = Contractions::new(hp);
    let mut st: State = [Jet2::ZERO; 8];
    let mut out = Vec::with_capacity(times.len());
    let mut t_cur = s;
    for &t_req in times {
        assert!(t_req >= t_cur - 1e-15, "output times must be ascending and >= start");
        let span = t_req - t_cur;
        if span > 1e-15 {
            let n = libm::ceil(span / dt) as usize;
            let h = span / n as f64;
            for k in 0..n {
                let elapsed = (t_cur - s) + k as f64 * h;
                st = rk4_step(&pj, &ctr, elapsed, &st, h, hp);
                if st[0].v.norm() > RICCATI_LIMIT {
                    return Err(CoeffError::RiccatiBlowup);
                }
            }
            t_cur = t_req;
        }
        out.push(emit(t_req, s, x, xi, &pj, &st, hp));
    }
    Ok(out)
}

/// Single-time convenience wrapper around [`solve_range`].
pub fn solve_at(
    s: f64,
    t: f64,
    x: [f64; 3],
    xi: [f64; 3],
    pot: &EMPotential,
    hp: &HamiltonianParams,
    dt: f64,
) -> Result<CoeffSolution, CoeffError> {
    Ok(solve_range(s, &[t], x, xi, pot, hp, dt)?.pop().unwrap())
}

/// Phase coefficients at (t,s; x,ξ).
pub fn integrate_s(
    s: f64,
    t: f64,
    x: [f64; 3],
    xi: [f64; 3],
    pot: &EMPotential,
    hp: &HamiltonianParams,
    dt: f64,
) -> Result<SCoefficients, CoeffError> {
    Ok(solve_at(s, t, x, xi, pot, hp, dt)?.s)
}

/// Amplitude coefficients at (t,s; x,ξ).  The sensitivity argument is part
/// of the interface (the transport sources are built from it); the solver
/// transports the same quantities internally, so it is only used as a
/// consistency check in debug builds.
pub fn integrate_a(
    s: f64,
    t: f64,
    x: [f64; 3],
    xi: [f64; 3],
    pot: &EMPotential,
    hp: &HamiltonianParams,
    dt: f64,
    sens: &SensitivityState,
) -> Result<ACoefficients, CoeffError> {
    let sol = solve_at(s, t, x, xi, pot, hp, dt)?;
    debug_assert!(
        (0..3).all(|j| (sol.sens.s10[j] - sens.s10[j]).norm() < 1e-6),
        "sensitivity state inconsistent with (x, ξ)"
    );
    Ok(sol.a)
}

/// x-gradients of all coefficients at (t,s; x,ξ).
pub fn sensitivities(
    s: f64,
    t: f64,
    x: [f64; 3],
    xi: [f64; 3],
    pot: &EMPotential,
    hp: &HamiltonianParams,
    dt: f64,
) -> Result<SensitivityState, CoeffError> {
    let mut sens = solve_at(s, t, x, xi, pot, hp, dt)?.sens;
    // top amplitude coefficient: central finite differences (its gradient is
    // the one quantity the jet transport cannot reach; nothing in the kernel
    // assembly consumes it, but the interface promises it)
    let h = 1e-4;
    for j in 0..3 {
        let mut xp = x;
        let mut xm = x;
        xp[j] += h;
        xm[j] -= h;
        let p = solve_at(s, t, xp, xi, pot, hp, dt)?;
        let m = solve_at(s, t, xm, xi, pot, hp, dt)?;
        sens.a11[j] = (p.a.a11 - m.a.a11) / (2.0 * h);
    }
    Ok(sens)
}

/// Second symbol derivatives at (t; x,ξ) for time-independent potentials,
/// where ∫ₛᵗ ∂A₀ dr = (t−s)·∂A₀(x).
pub fn symbol_derivatives(
    t: f64,
    s: f64,
    x: [f64; 3],
    xi: [f64; 3],
    pot: &EMPotential,
    hp: &HamiltonianParams,
) -> SymbolDerivatives {
    let pj = pot_jets(x, xi, pot, hp);
    let m: [Complex64; 3] = core::array::from_fn(|j| pj.m0[j].v + pj.md[j].v * (t - s));
    let hb = hp.hbar;
    SymbolDerivatives {
        h_pi1_theta1: -I / hb * m[2],
        h_pi2_pi1: (m[0] - I * m[1]) / (hb * hb),
        h_theta2_theta1: m[0] + I * m[1],
    }
}

/// Damping rate and transport sources at the end time of a solve.
pub fn w_terms(
    s: f64,
    t: f64,
    x: [f64; 3],
    xi: [f64; 3],
    pot: &EMPotential,
    hp: &HamiltonianParams,
    dt: f64,
) -> Result<WTerms, CoeffError> {
    // replay the solve, then evaluate the source assembly at the final state
    let pj = pot_jets(x, xi, pot, hp);
    let ctr = Contractions::new(hp);
    let mut st: State = [Jet2::ZERO; 8];
    let span = t - s;
    if span > 1e-15 {
        let n = libm::ceil(span / dt) as usize;
        let h = span / n as f64;
        for k in 0..n {
            st = rk4_step(&pj, &ctr, k as f64 * h, &st, h, hp);
            if st[0].v.norm() > RICCATI_LIMIT {
                return Err(CoeffError::RiccatiBlowup);
            }
        }
    }
    let (a, b, _e) = symbol_jets(&pj, span, hp);
    let w0 = (b + a * st[0]).v;
    // recover the sources from the transport right-hand sides
    let d = rhs(&pj, &ctr, span, &st, hp);
    let w1 = (-(d[3] + (Jet2::constant(w0) * st[3]).scale_re(2.0))).v;
    let w2 = (-(d[4] + Jet2::constant(w0) * st[4])).v;
    let w3 = (Jet2::constant(w0) * st[6] - d[6]).v;
    let w4 = (Jet2::constant(w0) * st[7] - d[7]).v;
    Ok(WTerms {
        w0,
        w1,
        w2,
        w3,
        w4,
        symbols: symbol_derivatives(t, s, x, xi, pot, hp),
    })
}

/// Closed-form coefficients for vanishing potential: with γ = cħ⁻¹(t−s)|ξ|
/// and δ = |ξ|cosγ − iξ₃sinγ, the phase is ⟨x|ξ⟩ plus a rank-one odd part
/// and the amplitude is δ/|ξ| (continuous from 1 at t = s).
pub fn closed_form_free(
    s: f64,
    t: f64,
    x: [f64; 3],
    xi: [f64; 3],
    hp: &HamiltonianParams,
) -> Result<(SCoefficients, ACoefficients, f64, Complex64), CoeffError> {
    let xin = libm::sqrt(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]);
    if xin == 0.0 {
        return Err(CoeffError::ZeroMomentum);
    }
    let gamma = hp.c / hp.hbar * (t - s) * xin;
    let (sing, cosg) = (libm::sin(gamma), libm::cos(gamma));
    let delta = Complex64::new(xin * cosg, 0.0) - I * xi[2] * sing;
    let dot = x[0] * xi[0] + x[1] * xi[1] + x[2] * xi[2];
    let sc = Complex64::new(xin, 0.0) / delta;
    let sco = SCoefficients {
        s00: Complex64::new(dot, 0.0),
        s10: -Complex64::new(hp.hbar * sing, 0.0) * Complex64::new(xi[0], xi[1]) / delta,
        sc1d1: sc,
        sc2d2: sc,
        sc1d2: ZERO_C,
        sc2d1: ZERO_C,
        s01: -Complex64::new(sing / hp.hbar, 0.0) * Complex64::new(xi[0], -xi[1]) / delta,
        s11: ZERO_C,
    };
    let aco = ACoefficients {
        a00: delta / xin,
        ..Default::default()
    };
    Ok((sco, aco, gamma, delta))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn equal_times_give_initial_data() {
        let hp = HamiltonianParams::new(1.0, 1.0, 0.3);
        let pot = EMPotential::gaussian_bumps(&[(0, 0.4, [0.1, 0.0, -0.2], 1.0)]);
        let x = [0.3, -0.4, 0.5];
        let xi = [0.7, 0.2, -0.9];
        let sol = solve_at(0.1, 0.1, x, xi, &pot, &hp, 1e-3).unwrap();
        let dot = x[0] * xi[0] + x[1] * xi[1] + x[2] * xi[2];
        assert!(close(sol.s.s00, Complex64::new(dot, 0.0), 1e-14));
        assert!(close(sol.s.sc1d1, Complex64::new(1.0, 0.0), 1e-14));
        assert!(close(sol.s.sc2d2, Complex64::new(1.0, 0.0), 1e-14));
        for z in [sol.s.s10, sol.s.s01, sol.s.s11] {
            assert!(z.norm() < 1e-14);
        }
        assert!(close(sol.a.a00, Complex64::new(1.0, 0.0), 1e-14));
        for z in [sol.a.a10, sol.a.ac1d1, sol.a.a01, sol.a.a11] {
            assert!(z.norm() < 1e-14);
        }
    }

    #[test]
    fn riccati_stays_zero_for_axial_momentum() {
        // zero potential, ξ ∥ ẑ: the Riccati source vanishes identically
        let hp = HamiltonianParams::new(1.0, 1.0, 0.0);
        let pot = EMPotential::none();
        let sol = solve_at(0.0, 0.3, [0.1, 0.2, 0.3], [0.0, 0.0, 1.4], &pot, &hp, 1e-3).unwrap();
        assert!(sol.s.s10.norm() < 1e-14);
        assert!(sol.s.s01.norm() < 1e-14);
    }

    #[test]
    fn free_solve_matches_closed_form() {
        let hp = HamiltonianParams::new(0.9, 1.2, 0.0);
        let pot = EMPotential::none();
        let x = [0.3, -0.5, 0.2];
        let xi = [0.8, 0.45, -0.65];
        let t = 0.12;
        let sol = solve_at(0.0, t, x, xi, &pot, &hp, 1e-3).unwrap();
        let (sc, ac, _gamma, _delta) = closed_form_free(0.0, t, x, xi, &hp).unwrap();
        assert!(close(sol.s.s00, sc.s00, 1e-6), "s00");
        assert!(close(sol.s.s10, sc.s10, 1e-6), "s10");
        assert!(close(sol.s.sc1d1, sc.sc1d1, 1e-6), "sc1d1");
        assert!(close(sol.s.s01, sc.s01, 1e-6), "s01");
        assert!(close(sol.s.s11, sc.s11, 1e-6), "s11");
        assert!(close(sol.a.a00, ac.a00, 1e-6), "a00");
        for z in [sol.a.a10, sol.a.ac1d1, sol.a.a01, sol.a.a11] {
            assert!(z.norm() < 1e-6, "free amplitude corrections must vanish");
        }
        // and all x-sensitivities except s00's are zero
        for j in 0..3 {
            assert!(close(sol.sens.s00[j], Complex64::new(xi[j], 0.0), 1e-10));
            assert!(sol.sens.s10[j].norm() < 1e-10);
            assert!(sol.sens.a00[j].norm() < 1e-10);
        }
    }

    #[test]
    fn closed_form_axial_quarter_turn() {
        // ξ = ẑ, γ = π/2: δ = −i, the θπ coefficients become i, amplitude² = −1
        let hp = HamiltonianParams::new(1.0, 1.0, 0.0);
        let t = core::f64::consts::FRAC_PI_2;
        let (sc, ac, gamma, delta) =
            closed_form_free(0.0, t, [0.0; 3], [0.0, 0.0, 1.0], &hp).unwrap();
        assert!((gamma - core::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert!(close(delta, -I, 1e-14));
        assert!(close(sc.sc1d1, I, 1e-14));
        assert!(sc.s10.norm() < 1e-14);
        assert!(close(ac.a00 * ac.a00, Complex64::new(-1.0, 0.0), 1e-14));
        assert!(matches!(
            closed_form_free(0.0, 0.1, [0.0; 3], [0.0; 3], &hp),
            Err(CoeffError::ZeroMomentum)
        ));
    }

    #[test]
    fn constant_potentials_leave_amplitude_corrections_zero() {
        // all spatial gradients vanish, so every transport source is zero
        let hp = HamiltonianParams::new(1.0, 1.0, 0.4);
        let pot = EMPotential::constant_a0(0.7);
        let sol = solve_at(0.0, 0.2, [0.3, 0.1, -0.2], [0.5, -0.3, 0.8], &pot, &hp, 1e-3).unwrap();
        for z in [sol.a.a10, sol.a.ac1d1, sol.a.a01, sol.a.a11] {
            assert!(z.norm() < 1e-12);
        }
        assert!(sol.s.s11.norm() < 1e-12);
    }

    #[test]
    fn linear_scalar_potential_phase_gradient() {
        // A₀ = E·(q − q₀): ∂ⱼs00 = ξⱼ − εEⱼ(t−s)
        let hp = HamiltonianParams::new(1.0, 1.0, 0.3);
        let efield = [0.4, -0.7, 0.2];
        let pot = EMPotential::linear_a0(efield, [0.0; 3]);
        let t = 0.15;
        let xi = [0.6, 0.1, -0.4];
        let sens = sensitivities(0.0, t, [0.2, 0.3, -0.1], xi, &pot, &hp, 1e-3).unwrap();
        for j in 0..3 {
            let want = Complex64::new(xi[j] - hp.epsilon * efield[j] * t, 0.0);
            assert!(close(sens.s00[j], want, 1e-12), "s00 gradient [{j}]");
        }
    }

    #[test]
    fn symbol_derivative_values() {
        let hp = HamiltonianParams::new(1.0, 1.0, 0.0);
        let pot = EMPotential::none();
        let sd = symbol_derivatives(0.2, 0.0, [0.0; 3], [0.0, 0.0, 1.3], &pot, &hp);
        assert!(close(sd.h_pi1_theta1, -I * 1.3, 1e-14));
        let sd = symbol_derivatives(0.2, 0.0, [0.0; 3], [1.0, 0.0, 0.0], &pot, &hp);
        assert!(close(sd.h_pi2_pi1, Complex64::new(1.0, 0.0), 1e-14));
        assert!(close(sd.h_theta2_theta1, Complex64::new(1.0, 0.0), 1e-14));
    }

    #[test]
    fn damping_rate_consistent_with_both_expressions() {
        // w₀ must agree whether built from the (π₁,θ₁) or (π₂,θ₂) symbol
        // derivative — they are equal by construction, so this pins the
        // assembly path instead
        let hp = HamiltonianParams::new(1.0, 1.0, 0.25);
        let pot = EMPotential::gaussian_bumps(&[(3, 0.6, [0.0, 0.1, -0.1], 1.0)]);
        let x = [0.2, -0.3, 0.4];
        let xi = [0.5, 0.6, -0.2];
        let t = 0.1;
        let w = w_terms(0.0, t, x, xi, &pot, &hp, 1e-3).unwrap();
        let sol = solve_at(0.0, t, x, xi, &pot, &hp, 1e-3).unwrap();
        let expect = w.symbols.h_pi1_theta1 + sol.s.s10 * w.symbols.h_pi2_pi1;
        assert!(close(w.w0, expect, 1e-10));
    }
}
