//! Shared diagnostics helpers: translate between Grassmann-valued phase /
//! amplitude data and the scalar coefficient structs, for cross-route
//! comparisons (flow oracle vs coefficient ODEs vs closed forms).

use weylprop_core::grassmann::GrassmannNumber;
use weylprop_core::hjcoeffs::{ACoefficients, SCoefficients};

// basis masks for the four generators θ1, θ2, π1, π2 (bits 0..3)
pub const M_T1T2: usize = 0b0011;
pub const M_T1P1: usize = 0b0101;
pub const M_T2P1: usize = 0b0110;
pub const M_T1P2: usize = 0b1001;
pub const M_T2P2: usize = 0b1010;
pub const M_P1P2: usize = 0b1100;
pub const M_FULL: usize = 0b1111;

/// Read the phase coefficients off a Grassmann-valued phase
/// S = s00 + s10·θ1θ2 + sc1d1·θ1π1 + … + s11·θ1θ2π1π2.
pub fn phase_coefficients(s: &GrassmannNumber) -> SCoefficients {
    SCoefficients {
        s00: s.c[0],
        s10: s.c[M_T1T2],
        sc1d1: s.c[M_T1P1],
        sc2d2: s.c[M_T2P2],
        sc1d2: s.c[M_T1P2],
        sc2d1: s.c[M_T2P1],
        s01: s.c[M_P1P2],
        s11: s.c[M_FULL],
    }
}

/// Assemble the Grassmann-valued amplitude from its coefficients.
pub fn assemble_amplitude(a: &ACoefficients) -> GrassmannNumber {
    let mut out = GrassmannNumber::scalar(a.a00);
    out += GrassmannNumber::monomial(M_T1T2).scale(a.a10);
    out += GrassmannNumber::monomial(M_T1P1).scale(a.ac1d1);
    out += GrassmannNumber::monomial(M_T2P2).scale(a.ac2d2);
    out += GrassmannNumber::monomial(M_T1P2).scale(a.ac1d2);
    out += GrassmannNumber::monomial(M_T2P1).scale(a.ac2d1);
    out += GrassmannNumber::monomial(M_P1P2).scale(a.a01);
    out += GrassmannNumber::monomial(M_FULL).scale(a.a11);
    out
}

/// Largest coefficient-wise difference between two coefficient sets.
pub fn max_coeff_diff(a: &SCoefficients, b: &SCoefficients) -> f64 {
    [
        a.s00 - b.s00,
        a.s10 - b.s10,
        a.sc1d1 - b.sc1d1,
        a.sc2d2 - b.sc2d2,
        a.sc1d2 - b.sc1d2,
        a.sc2d1 - b.sc2d1,
        a.s01 - b.s01,
        a.s11 - b.s11,
    ]
    .iter()
    .map(|z| z.norm())
    .fold(0.0, f64::max)
}

/// Largest coefficient-wise difference between two amplitude sets.
pub fn max_amp_diff(a: &ACoefficients, b: &ACoefficients) -> f64 {
    [
        a.a00 - b.a00,
        a.a10 - b.a10,
        a.ac1d1 - b.ac1d1,
        a.ac2d2 - b.ac2d2,
        a.ac1d2 - b.ac1d2,
        a.ac2d1 - b.ac2d1,
        a.a01 - b.a01,
        a.a11 - b.a11,
    ]
    .iter()
    .map(|z| z.norm())
    .fold(0.0, f64::max)
}
