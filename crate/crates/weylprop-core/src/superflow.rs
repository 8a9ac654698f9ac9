//! Super Hamiltonian classical mechanics.
//!
//! The phase space is (x, ξ, θ, π) with even Grassmann 3-vectors x, ξ and
//! odd 2-vectors θ, π.  The Hamiltonian is
//!
//!   H = Σⱼ c σⱼ(θ,π) (ξⱼ − (ε/c)Aⱼ(t,x)) + ε A₀(t,x),
//!
//! with the potentials Grassmann-continued around the body of x.  This
//! module integrates the Hamilton equations with fixed-step RK4 in the full
//! 16-dimensional algebra, inverts the (x̲,θ̲) ↦ (x(t),θ(t)) half of the
//! flow, and produces the phase S and van Vleck superdeterminant D directly
//! from the flow (the "oracle" route, used to validate the coefficient-ODE
//! route in `hjcoeffs`).

use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;

use crate::grassmann::{
    even_inverse, gmul, grassmann_continuation, odd_derivative, sdet, GrassmannError,
    GrassmannNumber, SuperMatrix,
};
use crate::potential::EMPotential;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Physical parameters ħ, c and the coupling ε.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianParams {
    pub hbar: f64,
    pub c: f64,
    pub epsilon: f64,
}

impl HamiltonianParams {
    pub fn new(hbar: f64, c: f64, epsilon: f64) -> Self {
        assert!(hbar > 0.0 && c > 0.0, "hbar and c must be positive");
        HamiltonianParams { hbar, c, epsilon }
    }
}

/// A super phase-space point (or tangent vector — same layout).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    pub x: [GrassmannNumber; 3],
    pub xi: [GrassmannNumber; 3],
    pub theta: [GrassmannNumber; 2],
    pub pi: [GrassmannNumber; 2],
}

impl PhasePoint {
    pub fn zero() -> Self {
        PhasePoint {
            x: [GrassmannNumber::ZERO; 3],
            xi: [GrassmannNumber::ZERO; 3],
            theta: [GrassmannNumber::ZERO; 2],
            pi: [GrassmannNumber::ZERO; 2],
        }
    }

    /// Body-only point from real vectors.
    pub fn from_real(x: [f64; 3], xi: [f64; 3]) -> Self {
        let mut p = Self::zero();
        for j in 0..3 {
            p.x[j] = GrassmannNumber::from_real(x[j]);
            p.xi[j] = GrassmannNumber::from_real(xi[j]);
        }
        p
    }

    fn axpy(&mut self, a: f64, rhs: &PhasePoint) {
        for j in 0..3 {
            self.x[j] += rhs.x[j].scale_re(a);
            self.xi[j] += rhs.xi[j].scale_re(a);
        }
        for j in 0..2 {
            self.theta[j] += rhs.theta[j].scale_re(a);
            self.pi[j] += rhs.pi[j].scale_re(a);
        }
    }

    /// Coefficient-wise max-abs distance.
    pub fn distance(&self, other: &PhasePoint) -> f64 {
        let mut d: f64 = 0.0;
        for j in 0..3 {
            d = d.max((self.x[j] - other.x[j]).max_abs());
            d = d.max((self.xi[j] - other.xi[j]).max_abs());
        }
        for j in 0..2 {
            d = d.max((self.theta[j] - other.theta[j]).max_abs());
            d = d.max((self.pi[j] - other.pi[j]).max_abs());
        }
        d
    }
}

/// Errors from the flow-inversion and oracle computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuperflowError {
    /// The Newton iteration for the inverse map did not reach tolerance —
    /// |t−s| is too large for the inversion to be well posed.
    NoConvergence,
    /// Algebra failure (singular superdeterminant block etc.).
    Algebra(GrassmannError),
}

impl fmt::Display for SuperflowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuperflowError::NoConvergence => {
                write!(f, "flow inversion did not converge; shrink |t-s|")
            }
            SuperflowError::Algebra(e) => write!(f, "algebra error: {e}"),
        }
    }
}

impl From<GrassmannError> for SuperflowError {
    fn from(e: GrassmannError) -> Self {
        SuperflowError::Algebra(e)
    }
}

/// The Weyl symbols σ₁, σ₂, σ₃ of the Pauli matrices as quadratics in the
/// odd variables.
pub fn sigma_symbols(
    theta: &[GrassmannNumber; 2],
    pi: &[GrassmannNumber; 2],
    hbar: f64,
) -> [GrassmannNumber; 3] {
    let tt = gmul(&theta[0], &theta[1]);
    let pp = gmul(&pi[0], &pi[1]).scale_re(1.0 / (hbar * hbar));
    let pairing = gmul(&theta[0], &pi[0]) + gmul(&theta[1], &pi[1]);
    [
        tt + pp,
        (tt - pp).scale(I),
        pairing.scale(-I / hbar),
    ]
}

/// Potential data at the body of x, cached per RHS evaluation.
struct PotentialEval {
    /// A₀…A₃ continued to the even Grassmann argument x.
    a: [GrassmannNumber; 4],
    /// ∂ₖA₀…∂ₖA₃ continued likewise; index [component][k].
    da: [[GrassmannNumber; 3]; 4],
}

fn eval_potential(
    t: f64,
    x: &[GrassmannNumber; 3],
    pot: &EMPotential,
    need_gradients: bool,
) -> PotentialEval {
    let q = [x[0].body().re, x[1].body().re, x[2].body().re];
    let mut a = [GrassmannNumber::ZERO; 4];
    let mut da = [[GrassmannNumber::ZERO; 3]; 4];
    for j in 0..4 {
        if pot.a[j].is_zero() {
            continue;
        }
        let d = pot.derivs(j, t, q);
        a[j] = grassmann_continuation(&d.jet2(), x);
        if need_gradients {
            for k in 0..3 {
                da[j][k] = grassmann_continuation(&d.grad_jet2(k), x);
            }
        }
    }
    PotentialEval { a, da }
}

/// H(t, p) per the super Hamiltonian (σ·(ξ − (ε/c)A) scaled by c, plus εA₀).
pub fn hamiltonian(
    t: f64,
    p: &PhasePoint,
    pot: &EMPotential,
    hp: &HamiltonianParams,
) -> GrassmannNumber {
    let pe = eval_potential(t, &p.x, pot, false);
    let sigma = sigma_symbols(&p.theta, &p.pi, hp.hbar);
    let mut h = pe.a[0].scale_re(hp.epsilon);
    for j in 0..3 {
        let eta = p.xi[j] - pe.a[j + 1].scale_re(hp.epsilon / hp.c);
        h += gmul(&sigma[j], &eta).scale_re(hp.c);
    }
    h
}

/// Right-hand sides of the Hamilton equations (even and odd sectors).
pub fn hamilton_rhs(
    t: f64,
    p: &PhasePoint,
    pot: &EMPotential,
    hp: &HamiltonianParams,
) -> PhasePoint {
    let c = hp.c;
    let hbar = hp.hbar;
    let eps = hp.epsilon;
    let pe = eval_potential(t, &p.x, pot, eps != 0.0 && !pot.is_zero());
    let sigma = sigma_symbols(&p.theta, &p.pi, hbar);

    let mut out = PhasePoint::zero();
    // dx_j/dt = c σ_j
    for j in 0..3 {
        out.x[j] = sigma[j].scale_re(c);
    }
    // dξ_j/dt = ε Σ_k σ_k ∂A_k/∂x_j − ε ∂A₀/∂x_j
    if eps != 0.0 {
        for j in 0..3 {
            let mut acc = GrassmannNumber::ZERO;
            for k in 0..3 {
                if !pe.da[k + 1][j].is_zero() {
                    acc += gmul(&sigma[k], &pe.da[k + 1][j]);
                }
            }
            out.xi[j] = acc.scale_re(eps) - pe.da[0][j].scale_re(eps);
        }
    }
    // η_j = ξ_j − (ε/c)A_j
    let eta: [GrassmannNumber; 3] = core::array::from_fn(|j| {
        p.xi[j] - pe.a[j + 1].scale_re(eps / c)
    });
    // odd sector
    let em = eta[0] - eta[1].scale(I); // η₁ − iη₂
    let ep = eta[0] + eta[1].scale(I); // η₁ + iη₂
    let ch2 = c / (hbar * hbar);
    let ich = I * (c / hbar);
    out.theta[0] = -gmul(&em, &p.pi[1]).scale_re(ch2) - gmul(&eta[2], &p.theta[0]).scale(ich);
    out.theta[1] = gmul(&em, &p.pi[0]).scale_re(ch2) - gmul(&eta[2], &p.theta[1]).scale(ich);
    out.pi[0] = -gmul(&ep, &p.theta[1]).scale_re(c) + gmul(&eta[2], &p.pi[0]).scale(ich);
    out.pi[1] = gmul(&ep, &p.theta[0]).scale_re(c) + gmul(&eta[2], &p.pi[1]).scale(ich);
    out
}

/// A stored flow trajectory at the integrator's step times.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
}

impl Trajectory {
    pub fn end(&self) -> &PhasePoint {
        self.states.last().expect("trajectory is never empty")
    }
}

fn rk4_step(
    t: f64,
    dt: f64,
    p: &PhasePoint,
    pot: &EMPotential,
    hp: &HamiltonianParams,
) -> PhasePoint {
    let k1 = hamilton_rhs(t, p, pot, hp);
    let mut p2 = *p;
    p2.axpy(dt / 2.0, &k1);
    let k2 = hamilton_rhs(t + dt / 2.0, &p2, pot, hp);
    let mut p3 = *p;
    p3.axpy(dt / 2.0, &k2);
    let k3 = hamilton_rhs(t + dt / 2.0, &p3, pot, hp);
    let mut p4 = *p;
    p4.axpy(dt, &k3);
    let k4 = hamilton_rhs(t + dt, &p4, pot, hp);
    let mut out = *p;
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    out
}

/// Classical RK4 flow from s to t (t ≥ s); steps of length `dt`, last step
/// shortened to land exactly on t.  Returns all intermediate states.
pub fn flow_integrate(
    s: f64,
    t: f64,
    init: &PhasePoint,
    pot: &EMPotential,
    hp: &HamiltonianParams,
    dt: f64,
) -> Trajectory {
    assert!(dt > 0.0, "dt must be positive");
    assert!(t >= s, "backward flows are not supported");
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut time = s;
    let mut state = *init;
    times.push(time);
    states.push(state);
    while time < t - 1e-14 * (1.0 + t.abs()) {
        let step = dt.min(t - time);
        state = rk4_step(time, step, &state, pot, hp);
        time += step;
        times.push(time);
        states.push(state);
    }
    Trajectory { times, states }
}

/// Endpoint-only variant of [`flow_integrate`] (no trajectory storage).
pub fn flow_endpoint(
    s: f64,
    t: f64,
    init: &PhasePoint,
    pot: &EMPotential,
    hp: &HamiltonianParams,
    dt: f64,
) -> PhasePoint {
    let mut time = s;
    let mut state = *init;
    while time < t - 1e-14 * (1.0 + t.abs()) {
        let step = dt.min(t - time);
        state = rk4_step(time, step, &state, pot, hp);
        time += step;
    }
    state
}

/// Action integral S₀ = ∫ (⟨ẋ|ξ⟩ + ⟨θ̇|π⟩ − H) dr over a stored trajectory.
///
/// Composite Simpson over uniform step pairs; a leftover interval (odd step
/// count or shortened final step) is handled by the trapezoid rule, whose
/// single-interval error is below the RK4 floor for the step sizes in use.
pub fn action_integral(
    traj: &Trajectory,
    pot: &EMPotential,
    hp: &HamiltonianParams,
) -> GrassmannNumber {
    let n = traj.times.len();
    if n < 2 {
        return GrassmannNumber::ZERO;
    }
    let integrand: Vec<GrassmannNumber> = (0..n)
        .map(|i| {
            let t = traj.times[i];
            let p = &traj.states[i];
            let rhs = hamilton_rhs(t, p, pot, hp);
            let mut f = -hamiltonian(t, p, pot, hp);
            for j in 0..3 {
                f += gmul(&rhs.x[j], &p.xi[j]);
            }
            for j in 0..2 {
                f += gmul(&rhs.theta[j], &p.pi[j]);
            }
            f
        })
        .collect();
    let mut total = GrassmannNumber::ZERO;
    let mut i = 0;
    while i + 2 < n + 1 {
        if i + 2 < n {
            let h1 = traj.times[i + 1] - traj.times[i];
            let h2 = traj.times[i + 2] - traj.times[i + 1];
            if (h1 - h2).abs() < 1e-12 * h1 {
                // Simpson on the uniform pair
                total += (integrand[i] + integrand[i + 1].scale_re(4.0) + integrand[i + 2])
                    .scale_re(h1 / 3.0);
                i += 2;
                continue;
            }
        }
        let h = traj.times[i + 1] - traj.times[i];
        total += (integrand[i] + integrand[i + 1]).scale_re(h / 2.0);
        i += 1;
    }
    total
}

// ---- flow inversion -------------------------------------------------------

/// Masks of even / odd basis monomials, fixed orderings for packing.
const EVEN_MASKS: [usize; 8] = [0b0000, 0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100, 0b1111];
const ODD_MASKS: [usize; 8] = [0b0001, 0b0010, 0b0100, 0b1000, 0b0111, 0b1011, 0b1101, 0b1110];

const NU: usize = 3 * 8 + 2 * 8; // unknowns: even coeffs of y, odd coeffs of ω

fn pack(y: &[GrassmannNumber; 3], omega: &[GrassmannNumber; 2], z: &mut [Complex64; NU]) {
    let mut i = 0;
    for g in y {
        for &m in &EVEN_MASKS {
            z[i] = g.c[m];
            i += 1;
        }
    }
    for g in omega {
        for &m in &ODD_MASKS {
            z[i] = g.c[m];
            i += 1;
        }
    }
}

fn unpack(z: &[Complex64; NU]) -> ([GrassmannNumber; 3], [GrassmannNumber; 2]) {
    let mut y = [GrassmannNumber::ZERO; 3];
    let mut omega = [GrassmannNumber::ZERO; 2];
    let mut i = 0;
    for g in y.iter_mut() {
        for &m in &EVEN_MASKS {
            g.c[m] = z[i];
            i += 1;
        }
    }
    for g in omega.iter_mut() {
        for &m in &ODD_MASKS {
            g.c[m] = z[i];
            i += 1;
        }
    }
    (y, omega)
}

/// Dense complex LU solve with partial pivoting; returns false on a
/// (numerically) singular matrix.  a is row-major n×n and is destroyed.
fn lu_solve(a: &mut [Complex64], n: usize, b: &mut [Complex64]) -> bool {
    for col in 0..n {
        // pivot
        let mut piv = col;
        let mut best = a[col * n + col].norm_sqr();
        for r in (col + 1)..n {
            let v = a[r * n + col].norm_sqr();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return false;
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for r in (col + 1)..n {
            let f = a[r * n + col] / d;
            if f.norm_sqr() == 0.0 {
                continue;
            }
            a[r * n + col] = f;
            for k in (col + 1)..n {
                let v = a[col * n + k];
                a[r * n + k] -= f * v;
            }
            let bv = b[col];
            b[r] -= f * bv;
        }
    }
    for col in (0..n).rev() {
        let mut v = b[col];
        for k in (col + 1)..n {
            v -= a[col * n + k] * b[k];
        }
        b[col] = v / a[col * n + col];
    }
    true
}

struct InversionProblem<'a> {
    s: f64,
    t: f64,
    x_bar: [GrassmannNumber; 3],
    theta_bar: [GrassmannNumber; 2],
    xi: [GrassmannNumber; 3],
    pi: [GrassmannNumber; 2],
    pot: &'a EMPotential,
    hp: &'a HamiltonianParams,
    dt: f64,
}

impl InversionProblem<'_> {
    fn residual(&self, z: &[Complex64; NU]) -> [Complex64; NU] {
        let (y, omega) = unpack(z);
        let init = PhasePoint {
            x: y,
            xi: self.xi,
            theta: omega,
            pi: self.pi,
        };
        let end = flow_endpoint(self.s, self.t, &init, self.pot, self.hp, self.dt);
        let dx: [GrassmannNumber; 3] = core::array::from_fn(|j| end.x[j] - self.x_bar[j]);
        let dth: [GrassmannNumber; 2] = core::array::from_fn(|j| end.theta[j] - self.theta_bar[j]);
        let mut r = [Complex64::new(0.0, 0.0); NU];
        pack(&dx, &dth, &mut r);
        r
    }
}

fn max_abs(v: &[Complex64; NU]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Chord-Newton solver state reusable across nearby inversion problems
/// (the oracle's finite-difference stencil reuses one Jacobian).
struct NewtonCache {
    jac: Vec<Complex64>,
}

fn newton_invert(
    prob: &InversionProblem<'_>,
    z0: &[Complex64; NU],
    cache: &mut Option<NewtonCache>,
) -> Result<[Complex64; NU], SuperflowError> {
    const TOL: f64 = 1e-12;
    const MAX_ITER: usize = 30;
    const FD_STEP: f64 = 1e-6;
    let mut z = *z0;
    let mut r = prob.residual(&z);
    for iter in 0..MAX_ITER {
        if max_abs(&r) < TOL {
            return Ok(z);
        }
        if cache.is_none() || (iter > 0 && iter % 8 == 0) {
            // (Re)build the Jacobian by forward differences.  The map is a
            // polynomial in the complex coefficients, hence holomorphic, so
            // a real step per complex coordinate suffices.
            let mut jac = alloc::vec![Complex64::new(0.0, 0.0); NU * NU];
            for col in 0..NU {
                let mut zp = z;
                zp[col] += Complex64::new(FD_STEP, 0.0);
                let rp = prob.residual(&zp);
                for row in 0..NU {
                    jac[row * NU + col] = (rp[row] - r[row]) / FD_STEP;
                }
            }
            *cache = Some(NewtonCache { jac });
        }
        let cache_ref = cache.as_ref().expect("jacobian just built");
        let mut a = cache_ref.jac.clone();
        let mut step = r;
        if !lu_solve(&mut a, NU, &mut step) {
            return Err(SuperflowError::NoConvergence);
        }
        for k in 0..NU {
            z[k] -= step[k];
        }
        r = prob.residual(&z);
    }
    Err(SuperflowError::NoConvergence)
}

/// Invert the (x̲, θ̲) half of the flow: find (y, ω) such that the flow
/// started at (y, ξ̲, ω, π̲) reaches x(t) = x̄, θ(t) = θ̄.
///
/// The body of y equals the body of x̄ (body invariance of x under the
/// flow); the soul is found by a chord-Newton iteration on the generator
/// coefficients, which converges in a few steps because the nonlinear part
/// of the map is nilpotent in the souls.
pub fn invert_flow(
    s: f64,
    t: f64,
    target: (&[GrassmannNumber; 3], &[GrassmannNumber; 2]),
    fixed: (&[GrassmannNumber; 3], &[GrassmannNumber; 2]),
    pot: &EMPotential,
    hp: &HamiltonianParams,
    dt: f64,
) -> Result<([GrassmannNumber; 3], [GrassmannNumber; 2]), SuperflowError> {
    let prob = InversionProblem {
        s,
        t,
        x_bar: *target.0,
        theta_bar: *target.1,
        xi: *fixed.0,
        pi: *fixed.1,
        pot,
        hp,
        dt,
    };
    let mut z0 = [Complex64::new(0.0, 0.0); NU];
    pack(target.0, target.1, &mut z0);
    let mut cache = None;
    let z = newton_invert(&prob, &z0, &mut cache)?;
    Ok(unpack(&z))
}

/// Phase S and van Vleck superdeterminant D at (t, s; x̄, ξ̲) from the flow.
///
/// The odd arguments are the algebra generators themselves: θ̄ ↦ (g₁, g₂)
/// and π̲ ↦ (g₃, g₄), so S and D come out as Grassmann numbers whose
/// monomial coefficients are the phase/amplitude expansion coefficients.
///
/// D = sdet of the second-derivative supermatrix of S in (x̄, θ̄) × (ξ̲, π̲).
/// The gradient identities ∂S/∂ξ̲ = y, ∂S/∂π̲ = ω let the x̄-blocks be
/// central differences of the inversion output (step 1e-5), while the
/// θ̄-blocks are exact odd derivatives.
pub fn oracle_phase_and_amplitude(
    s: f64,
    t: f64,
    x_bar: [f64; 3],
    xi: [f64; 3],
    pot: &EMPotential,
    hp: &HamiltonianParams,
    dt: f64,
) -> Result<(GrassmannNumber, GrassmannNumber), SuperflowError> {
    let theta_bar = [GrassmannNumber::generator(1), GrassmannNumber::generator(2)];
    let pi_fixed = [GrassmannNumber::generator(3), GrassmannNumber::generator(4)];
    let xi_g: [GrassmannNumber; 3] = core::array::from_fn(|j| GrassmannNumber::from_real(xi[j]));

    let solve_at = |xb: [f64; 3],
                    cache: &mut Option<NewtonCache>,
                    warm: Option<&[Complex64; NU]>|
     -> Result<([GrassmannNumber; 3], [GrassmannNumber; 2]), SuperflowError> {
        let xg: [GrassmannNumber; 3] = core::array::from_fn(|j| GrassmannNumber::from_real(xb[j]));
        let prob = InversionProblem {
            s,
            t,
            x_bar: xg,
            theta_bar,
            xi: xi_g,
            pi: pi_fixed,
            pot,
            hp,
            dt,
        };
        let mut z0 = [Complex64::new(0.0, 0.0); NU];
        match warm {
            Some(w) => z0 = *w,
            None => pack(&xg, &theta_bar, &mut z0),
        }
        let z = newton_invert(&prob, &z0, cache)?;
        Ok(unpack(&z))
    };

    let mut cache = None;
    let (y, omega) = solve_at(x_bar, &mut cache, None)?;
    let mut z_base = [Complex64::new(0.0, 0.0); NU];
    pack(&y, &omega, &mut z_base);

    // Phase: S = ⟨y|ξ̲⟩ + ⟨ω|π̲⟩ + S₀ along the flow from the inverse point.
    let init = PhasePoint {
        x: y,
        xi: xi_g,
        theta: omega,
        pi: pi_fixed,
    };
    let traj = flow_integrate(s, t, &init, pot, hp, dt);
    let mut phase = action_integral(&traj, pot, hp);
    for j in 0..3 {
        phase += y[j].scale_re(xi[j]);
    }
    for j in 0..2 {
        phase += gmul(&omega[j], &pi_fixed[j]);
    }

    // Supermatrix blocks.  Rows: (x̄_1..3, θ̄_1..2); columns: (ξ̲_1..3, π̲_1..2).
    const H: f64 = 1e-5;
    let mut dy_dx = [[GrassmannNumber::ZERO; 3]; 3]; // [j][k] = ∂y_k/∂x̄_j
    let mut domega_dx = [[GrassmannNumber::ZERO; 2]; 3]; // [j][m] = ∂ω_m/∂x̄_j
    for j in 0..3 {
        let mut xp = x_bar;
        let mut xm = x_bar;
        xp[j] += H;
        xm[j] -= H;
        let (yp, op) = solve_at(xp, &mut cache, Some(&z_base))?;
        let (ym, om) = solve_at(xm, &mut cache, Some(&z_base))?;
        for k in 0..3 {
            dy_dx[j][k] = (yp[k] - ym[k]).scale_re(1.0 / (2.0 * H));
        }
        for m in 0..2 {
            domega_dx[j][m] = (op[m] - om[m]).scale_re(1.0 / (2.0 * H));
        }
    }

    let a_block: Vec<Vec<GrassmannNumber>> = (0..3)
        .map(|j| (0..3).map(|k| dy_dx[j][k]).collect())
        .collect();
    let b_block: Vec<Vec<GrassmannNumber>> = (0..3)
        .map(|j| (0..2).map(|m| domega_dx[j][m]).collect())
        .collect();
    let c_block: Vec<Vec<GrassmannNumber>> = (0..2)
        .map(|l| (0..3).map(|k| odd_derivative(&y[k], l + 1)).collect())
        .collect();
    let d_block: Vec<Vec<GrassmannNumber>> = (0..2)
        .map(|l| (0..2).map(|m| odd_derivative(&omega[m], l + 1)).collect())
        .collect();

    let m = SuperMatrix::new(a_block, b_block, c_block, d_block);
    let d = sdet(&m)?;
    Ok((phase, d))
}

/// Energy drift |H(t_end) − H(t_start)| along a trajectory, coefficient-wise.
pub fn energy_drift(
    traj: &Trajectory,
    pot: &EMPotential,
    hp: &HamiltonianParams,
) -> f64 {
    let h0 = hamiltonian(traj.times[0], &traj.states[0], pot, hp);
    let h1 = hamiltonian(
        *traj.times.last().expect("nonempty"),
        traj.end(),
        pot,
        hp,
    );
    (h1 - h0).max_abs()
}

/// Continuity / inverse-consistency helper used by tests: the Grassmann part
/// of an even element divided by another even element.
pub fn even_div(
    num: &GrassmannNumber,
    den: &GrassmannNumber,
) -> Result<GrassmannNumber, GrassmannError> {
    Ok(gmul(num, &even_inverse(den)?))
}
