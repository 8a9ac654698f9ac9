//! Coefficient-route checks: agreement with the trajectory-based oracle,
//! sensitivity finite differences, the exponential and integral
//! representations, and the short-time smallness estimates.

use num_complex::Complex64;
use weylprop_core::grassmann::GrassmannNumber;
use weylprop_core::hjcoeffs::*;
use weylprop_core::potential::EMPotential;
use weylprop_core::superflow::{oracle_phase_and_amplitude, HamiltonianParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

// occupancy masks of the odd monomials (generators 1,2 ↦ θ₁,θ₂; 3,4 ↦ π₁,π₂)
const M_T1T2: usize = 0b0011;
const M_T1P1: usize = 0b0101;
const M_T2P1: usize = 0b0110;
const M_T1P2: usize = 0b1001;
const M_T2P2: usize = 0b1010;
const M_P1P2: usize = 0b1100;
const M_FULL: usize = 0b1111;

fn phase_coefficients(g: &GrassmannNumber) -> SCoefficients {
    SCoefficients {
        s00: g.c[0],
        s10: g.c[M_T1T2],
        sc1d1: g.c[M_T1P1],
        sc2d2: g.c[M_T2P2],
        sc1d2: g.c[M_T1P2],
        sc2d1: g.c[M_T2P1],
        s01: g.c[M_P1P2],
        s11: g.c[M_FULL],
    }
}

fn assemble_amplitude(a: &ACoefficients) -> GrassmannNumber {
    GrassmannNumber::scalar(a.a00)
        + GrassmannNumber::monomial(M_T1T2).scale(a.a10)
        + GrassmannNumber::monomial(M_T1P1).scale(a.ac1d1)
        + GrassmannNumber::monomial(M_T2P2).scale(a.ac2d2)
        + GrassmannNumber::monomial(M_T1P2).scale(a.ac1d2)
        + GrassmannNumber::monomial(M_T2P1).scale(a.ac2d1)
        + GrassmannNumber::monomial(M_P1P2).scale(a.a01)
        + GrassmannNumber::monomial(M_FULL).scale(a.a11)
}

fn bump_potential() -> EMPotential {
    EMPotential::gaussian_bumps(&[
        (3, 0.7, [0.2, -0.1, 0.4], 1.1),
        (1, -0.4, [-0.3, 0.5, 0.0], 0.9),
        (0, 0.5, [0.0, 0.2, -0.2], 1.3),
    ])
}

/// The decisive consistency check: the coefficient ODE route and the
/// trajectory/inversion oracle must produce the same phase monomials and the
/// same van Vleck superdeterminant (which equals the amplitude squared).
#[test]
fn coefficient_route_matches_trajectory_oracle() {
    let hp = HamiltonianParams::new(1.0, 1.0, 0.2);
    let pot = bump_potential();
    let points = [
        ([0.3, -0.2, 0.1], [0.8, -0.6, 0.4]),
        ([-0.1, 0.4, 0.3], [0.3, 0.9, -0.5]),
    ];
    for &(x, xi) in &points {
        for &t in &[0.05, 0.1] {
            let (s_or, d_or) = oracle_phase_and_amplitude(0.0, t, x, xi, &pot, &hp, 2e-3)
                .expect("oracle converges");
            let oc = phase_coefficients(&s_or);
            let sol = solve_at(0.0, t, x, xi, &pot, &hp, 1e-3).unwrap();
            let tol = 1e-5;
            for (got, want, name) in [
                (sol.s.s00, oc.s00, "s00"),
                (sol.s.s10, oc.s10, "s10"),
                (sol.s.sc1d1, oc.sc1d1, "sc1d1"),
                (sol.s.sc2d2, oc.sc2d2, "sc2d2"),
                (sol.s.sc1d2, oc.sc1d2, "sc1d2"),
                (sol.s.sc2d1, oc.sc2d1, "sc2d1"),
                (sol.s.s01, oc.s01, "s01"),
                (sol.s.s11, oc.s11, "s11"),
            ] {
                assert!(
                    (got - want).norm() < tol,
                    "phase {name} at t={t}: ode {got} vs oracle {want}"
                );
            }
            let amp = assemble_amplitude(&sol.a);
            let diff = amp * amp - d_or;
            assert!(
                diff.max_abs() < tol,
                "amplitude² vs superdeterminant at t={t}: {diff:?}"
            );
        }
    }
}

#[test]
fn sensitivities_match_finite_differences() {
    let hp = HamiltonianParams::new(1.0, 1.0, 0.25);
    let pot = bump_potential();
    let x = [0.25, -0.15, 0.35];
    let xi = [0.6, -0.4, 0.5];
    let t = 0.08;
    let dt = 1e-3;
    let sol = solve_at(0.0, t, x, xi, &pot, &hp, dt).unwrap();
    let sens_full = sensitivities(0.0, t, x, xi, &pot, &hp, dt).unwrap();
    let h = 1e-4;
    for j in 0..3 {
        let mut xp = x;
        let mut xm = x;
        xp[j] += h;
        xm[j] -= h;
        let sp = solve_at(0.0, t, xp, xi, &pot, &hp, dt).unwrap();
        let sm = solve_at(0.0, t, xm, xi, &pot, &hp, dt).unwrap();
        let fd = |p: Complex64, m: Complex64| (p - m) / (2.0 * h);
        for (got, want, name) in [
            (sol.sens.s00[j], fd(sp.s.s00, sm.s.s00), "s00"),
            (sol.sens.s10[j], fd(sp.s.s10, sm.s.s10), "s10"),
            (sol.sens.sc1d1[j], fd(sp.s.sc1d1, sm.s.sc1d1), "sc1d1"),
            (sol.sens.s01[j], fd(sp.s.s01, sm.s.s01), "s01"),
            (sol.sens.s11[j], fd(sp.s.s11, sm.s.s11), "s11"),
            (sol.sens.a00[j], fd(sp.a.a00, sm.a.a00), "a00"),
            (sol.sens.a10[j], fd(sp.a.a10, sm.a.a10), "a10"),
            (sol.sens.ac1d1[j], fd(sp.a.ac1d1, sm.a.ac1d1), "ac1d1"),
            (sol.sens.a01[j], fd(sp.a.a01, sm.a.a01), "a01"),
            (sens_full.a11[j], fd(sp.a.a11, sm.a.a11), "a11"),
        ] {
            assert!(
                (got - want).norm() < 1e-6,
                "sensitivity {name}[{j}]: transported {got} vs finite diff {want}"
            );
        }
    }
}

/// Integrate the damping ODE directly (plain scalars, no jets) and compare
/// the θπ coefficient against the exponential formula used by the solver;
/// also rebuild the π₁π₂ coefficient from its integral representation.
#[test]
fn exponential_and_integral_representations_agree() {
    let hp = HamiltonianParams::new(1.0, 1.0, 0.3);
    let pot = bump_potential();
    let x = [0.2, 0.1, -0.3];
    let xi = [0.7, 0.3, -0.6];
    let t = 0.1;
    let n = 200usize;
    let h = t / n as f64;

    // symbol second derivatives as plain values at elapsed time r
    let symbols = |r: f64| {
        let sd = symbol_derivatives(r, 0.0, x, xi, &pot, &hp);
        (sd.h_pi2_pi1, sd.h_pi1_theta1)
    };
    // joint scalar RK4 on (s10, E, sc_direct)
    let rhs = |r: f64, st: [Complex64; 3]| {
        let (a, b) = symbols(r);
        let e_src = {
            let sd = symbol_derivatives(r, 0.0, x, xi, &pot, &hp);
            sd.h_theta2_theta1
        };
        let w0 = b + a * st[0];
        [
            -(a * st[0] * st[0] + 2.0 * b * st[0] + e_src),
            w0,
            -w0 * st[2],
        ]
    };
    let mut st = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ];
    // store e^{−2E} nodes for the quadrature below
    let mut integrand = Vec::with_capacity(n + 1);
    let push = |st: &[Complex64; 3], r: f64, out: &mut Vec<Complex64>| {
        let (a, _) = symbols(r);
        out.push(a * (-2.0 * st[1]).exp());
    };
    push(&st, 0.0, &mut integrand);
    for k in 0..n {
        let r = k as f64 * h;
        let k1 = rhs(r, st);
        let half = [
            st[0] + 0.5 * h * k1[0],
            st[1] + 0.5 * h * k1[1],
            st[2] + 0.5 * h * k1[2],
        ];
        let k2 = rhs(r + 0.5 * h, half);
        let half2 = [
            st[0] + 0.5 * h * k2[0],
            st[1] + 0.5 * h * k2[1],
            st[2] + 0.5 * h * k2[2],
        ];
        let k3 = rhs(r + 0.5 * h, half2);
        let full = [st[0] + h * k3[0], st[1] + h * k3[1], st[2] + h * k3[2]];
        let k4 = rhs(r + h, full);
        for i in 0..3 {
            st[i] += h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
        }
        push(&st, r + h, &mut integrand);
    }

    let sol = solve_at(0.0, t, x, xi, &pot, &hp, 5e-4).unwrap();
    // exponential formula (solver) vs direct linear ODE
    assert!(
        (sol.s.sc1d1 - st[2]).norm() < 1e-8,
        "exponential vs ODE: {} vs {}",
        sol.s.sc1d1,
        st[2]
    );
    // π₁π₂ coefficient vs its integral representation (Simpson)
    let mut integral = Complex64::new(0.0, 0.0);
    for seg in 0..n / 2 {
        integral += h / 3.0
            * (integrand[2 * seg]
                + 4.0 * integrand[2 * seg + 1]
                + integrand[2 * seg + 2]);
    }
    let s01_rep = -integral;
    assert!(
        (sol.s.s01 - s01_rep).norm() < 1e-8,
        "integral representation: {} vs {}",
        sol.s.s01,
        s01_rep
    );
}

/// Every off-initial coefficient must vanish linearly in the elapsed time:
/// log-log slope ≥ 0.9 over τ ∈ [10⁻³, 10⁻¹].
#[test]
fn short_time_smallness_slopes()
{
    let hp = HamiltonianParams::new(1.0, 1.0, 0.3);
    let pot = bump_potential();
    let x = [0.15, -0.25, 0.3];
    let xi = [0.7, 0.4, -0.5];
    let taus = [1e-3, 3.16e-3, 1e-2, 3.16e-2, 1e-1];
    let sols = solve_range(0.0, &taus, x, xi, &pot, &hp, 1e-3).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let dot = Complex64::new(x[0] * xi[0] + x[1] * xi[1] + x[2] * xi[2], 0.0);

    let series: Vec<(&str, Vec<f64>)> = vec![
        ("s00-<x|xi>", sols.iter().map(|s| (s.s.s00 - dot).norm()).collect()),
        ("s10", sols.iter().map(|s| s.s.s10.norm()).collect()),
        ("sc1d1-1", sols.iter().map(|s| (s.s.sc1d1 - one).norm()).collect()),
        ("s01", sols.iter().map(|s| s.s.s01.norm()).collect()),
        ("s11", sols.iter().map(|s| s.s.s11.norm()).collect()),
        ("a00-1", sols.iter().map(|s| (s.a.a00 - one).norm()).collect()),
        ("a10", sols.iter().map(|s| s.a.a10.norm()).collect()),
        ("a01", sols.iter().map(|s| s.a.a01.norm()).collect()),
        ("a11", sols.iter().map(|s| s.a.a11.norm()).collect()),
    ];
    for (name, vals) in series {
        // least-squares slope of log|v| against log τ
        let logs: Vec<(f64, f64)> = taus
            .iter()
            .zip(&vals)
            .filter(|(_, v)| **v > 1e-14)
            .map(|(t, v)| (t.ln(), v.ln()))
            .collect();
        assert!(logs.len() >= 4, "{name}: too many vanishing samples");
        let n = logs.len() as f64;
        let sx: f64 = logs.iter().map(|p| p.0).sum();
        let sy: f64 = logs.iter().map(|p| p.1).sum();
        let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!(slope >= 0.9, "{name}: smallness slope {slope} < 0.9");
    }
}

/// The amplitude squared must reproduce the free van Vleck factor δ²/|ξ|²,
/// and the branch must track continuously through the quarter turn where a
/// principal square root would jump.
#[test]
fn amplitude_branch_is_continuous()
{
    let hp = HamiltonianParams::new(1.0, 1.0, 0.0);
    let xi = [0.0, 0.0, 1.0];
    let mut prev = Complex64::new(1.0, 0.0);
    for k in 1..=40 {
        let t = k as f64 * (core::f64::consts::PI / 20.0) / 2.0;
        let (_, ac, _, delta) = closed_form_free(0.0, t, [0.0; 3], xi, &hp).unwrap();
        assert!((ac.a00 * ac.a00 - delta * delta).norm() < 1e-12);
        assert!((ac.a00 - prev).norm() < 0.3, "branch jump at t={t}");
        prev = ac.a00;
    }
    // the quarter turn itself: a00 = −i, not the principal root +i of −1
    let (_, ac, _, _) =
        closed_form_free(0.0, core::f64::consts::FRAC_PI_2, [0.0; 3], xi, &hp).unwrap();
    assert!((ac.a00 + I).norm() < 1e-12);
}
