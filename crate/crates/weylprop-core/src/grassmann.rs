//! The 16-dimensional complex Grassmann algebra on four odd generators.
//!
//! Generators are fixed as g₁ = θ̲₁, g₂ = θ̲₂, g₃ = π̲₁, g₄ = π̲₂.  A basis
//! monomial is an ascending product of generators and is addressed by a
//! 4-bit occupancy mask (bit k ↔ g_{k+1}), so every element is a dense
//! array of 16 complex coefficients.  Multiplication signs come from the
//! inversion count needed to merge two ascending monomials.
//!
//! Conventions that are not forced by the algebra itself (left derivative,
//! Berezin measure ordering) are pinned operationally: the odd Fourier
//! transform must reproduce (v₀, v₁) ↦ (ħv₁, ħ⁻¹v₀) and the σ̂ operators
//! must flat/sharp to the Pauli matrices; both are enforced by tests.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use num_complex::Complex64;

/// Number of basis monomials (2⁴).
pub const DIM: usize = 16;
/// Number of odd generators.
pub const N_GEN: usize = 4;

const fn merge_sign(a: usize, b: usize) -> i8 {
    // Sign of reordering monomial(a)·monomial(b) into ascending order:
    // (−1)^{#(i,j): i ∈ a, j ∈ b, i > j}.
    let mut inversions = 0u32;
    let mut j = 0;
    while j < N_GEN {
        if b & (1 << j) != 0 {
            inversions += (a >> (j + 1)).count_ones();
        }
        j += 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

const fn build_sign_table() -> [[i8; DIM]; DIM] {
    let mut t = [[0i8; DIM]; DIM];
    let mut a = 0;
    while a < DIM {
        let mut b = 0;
        while b < DIM {
            if a & b == 0 {
                t[a][b] = merge_sign(a, b);
            }
            b += 1;
        }
        a += 1;
    }
    t
}

/// Precomputed product signs; zero entries mark vanishing products (shared generator).
static SIGN: [[i8; DIM]; DIM] = build_sign_table();

/// Errors raised by the partial operations of the algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrassmannError {
    /// `even_inverse` of an element with vanishing body.
    ZeroBody,
    /// `even_sqrt` with the body on the branch cut (−∞, 0].
    BranchCut,
    /// `sdet` where a diagonal block has a singular body determinant.
    SingularBlock,
}

impl fmt::Display for GrassmannError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrassmannError::ZeroBody => write!(f, "even_inverse: body of the element is zero"),
            GrassmannError::BranchCut => {
                write!(f, "even_sqrt: body lies on the negative real axis")
            }
            GrassmannError::SingularBlock => {
                write!(f, "sdet: a diagonal block has zero body determinant")
            }
        }
    }
}

/// An element of the Grassmann algebra: 16 complex coefficients indexed by
/// generator occupancy mask.
#[derive(Clone, Copy, PartialEq)]
pub struct GrassmannNumber {
    pub c: [Complex64; DIM],
}

impl fmt::Debug for GrassmannNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G[")?;
        let mut first = true;
        for (idx, v) in self.c.iter().enumerate() {
            if v.norm_sqr() != 0.0 {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "({:?})·m{:04b}", v, idx)?;
                first = false;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, "]")
    }
}

const ZERO_C: Complex64 = Complex64::new(0.0, 0.0);

impl GrassmannNumber {
    pub const ZERO: GrassmannNumber = GrassmannNumber { c: [ZERO_C; DIM] };

    pub fn zero() -> Self {
        Self::ZERO
    }

    pub fn one() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn scalar(z: Complex64) -> Self {
        let mut g = Self::ZERO;
        g.c[0] = z;
        g
    }

    pub fn from_real(x: f64) -> Self {
        Self::scalar(Complex64::new(x, 0.0))
    }

    /// The generator g_k, k ∈ 1..=4.
    pub fn generator(k: usize) -> Self {
        assert!((1..=N_GEN).contains(&k), "generator index out of range");
        let mut g = Self::ZERO;
        g.c[1 << (k - 1)] = Complex64::new(1.0, 0.0);
        g
    }

    /// Basis monomial for an occupancy mask.
    pub fn monomial(mask: usize) -> Self {
        let mut g = Self::ZERO;
        g.c[mask] = Complex64::new(1.0, 0.0);
        g
    }

    /// Degree-0 coefficient.
    pub fn body(&self) -> Complex64 {
        self.c[0]
    }

    /// Everything except the body (nilpotent).
    pub fn soul(&self) -> Self {
        let mut s = *self;
        s.c[0] = ZERO_C;
        s
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|z| z.norm_sqr() == 0.0)
    }

    /// True when only even-degree coefficients are populated.
    pub fn is_even(&self) -> bool {
        self.c
            .iter()
            .enumerate()
            .all(|(i, z)| i.count_ones() % 2 == 0 || z.norm_sqr() == 0.0)
    }

    /// True when only odd-degree coefficients are populated.
    pub fn is_odd(&self) -> bool {
        self.c
            .iter()
            .enumerate()
            .all(|(i, z)| i.count_ones() % 2 == 1 || z.norm_sqr() == 0.0)
    }

    /// Projection onto even degrees.
    pub fn even_part(&self) -> Self {
        let mut g = *self;
        for i in 0..DIM {
            if i.count_ones() % 2 == 1 {
                g.c[i] = ZERO_C;
            }
        }
        g
    }

    /// Projection onto odd degrees.
    pub fn odd_part(&self) -> Self {
        *self - self.even_part()
    }

    pub fn scale(&self, z: Complex64) -> Self {
        let mut g = *self;
        for v in g.c.iter_mut() {
            *v *= z;
        }
        g
    }

    pub fn scale_re(&self, x: f64) -> Self {
        self.scale(Complex64::new(x, 0.0))
    }

    /// Largest coefficient magnitude (used as a convergence norm).
    pub fn max_abs(&self) -> f64 {
        self.c.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn gmul(x: &GrassmannNumber, y: &GrassmannNumber) -> GrassmannNumber {
    let mut out = GrassmannNumber::ZERO;
    for a in 0..DIM {
        let xa = x.c[a];
        if xa.norm_sqr() == 0.0 {
            continue;
        }
        let row = &SIGN[a];
        for b in 0..DIM {
            let s = row[b];
            if s == 0 {
                continue;
            }
            let yb = y.c[b];
            if yb.norm_sqr() == 0.0 {
                continue;
            }
            let term = xa * yb;
            if s > 0 {
                out.c[a | b] += term;
            } else {
                out.c[a | b] -= term;
            }
        }
    }
    out
}

impl Add for GrassmannNumber {
    type Output = GrassmannNumber;
    fn add(mut self, rhs: GrassmannNumber) -> GrassmannNumber {
        for i in 0..DIM {
            self.c[i] += rhs.c[i];
        }
        self
    }
}

impl AddAssign for GrassmannNumber {
    fn add_assign(&mut self, rhs: GrassmannNumber) {
        for i in 0..DIM {
            self.c[i] += rhs.c[i];
        }
    }
}

impl Sub for GrassmannNumber {
    type Output = GrassmannNumber;
    fn sub(mut self, rhs: GrassmannNumber) -> GrassmannNumber {
        for i in 0..DIM {
            self.c[i] -= rhs.c[i];
        }
        self
    }
}

impl SubAssign for GrassmannNumber {
    fn sub_assign(&mut self, rhs: GrassmannNumber) {
        for i in 0..DIM {
            self.c[i] -= rhs.c[i];
        }
    }
}

impl Neg for GrassmannNumber {
    type Output = GrassmannNumber;
    fn neg(mut self) -> GrassmannNumber {
        for v in self.c.iter_mut() {
            *v = -*v;
        }
        self
    }
}

impl Mul for GrassmannNumber {
    type Output = GrassmannNumber;
    fn mul(self, rhs: GrassmannNumber) -> GrassmannNumber {
        gmul(&self, &rhs)
    }
}

impl Mul<Complex64> for GrassmannNumber {
    type Output = GrassmannNumber;
    fn mul(self, rhs: Complex64) -> GrassmannNumber {
        self.scale(rhs)
    }
}

impl Mul<f64> for GrassmannNumber {
    type Output = GrassmannNumber;
    fn mul(self, rhs: f64) -> GrassmannNumber {
        self.scale_re(rhs)
    }
}

/// Inverse of an even element with nonzero body.
///
/// Writes x = b(1 + u) with u = soul/b; since u is even its cube vanishes,
/// so the geometric series 1 − u + u² is exact.
pub fn even_inverse(x: &GrassmannNumber) -> Result<GrassmannNumber, GrassmannError> {
    debug_assert!(x.is_even(), "even_inverse expects an even element");
    let b = x.body();
    if b.norm_sqr() == 0.0 {
        return Err(GrassmannError::ZeroBody);
    }
    let u = x.soul().scale(b.inv());
    let u2 = gmul(&u, &u);
    Ok((GrassmannNumber::one() - u + u2).scale(b.inv()))
}

/// Principal square root of an even element, continuous from √body.
///
/// Uses the binomial series (1+u)^{1/2} = 1 + u/2 − u²/8 (exact, u³ = 0).
pub fn even_sqrt(x: &GrassmannNumber) -> Result<GrassmannNumber, GrassmannError> {
    debug_assert!(x.is_even(), "even_sqrt expects an even element");
    let b = x.body();
    if b.im == 0.0 && b.re <= 0.0 {
        return Err(GrassmannError::BranchCut);
    }
    let u = x.soul().scale(b.inv());
    let u2 = gmul(&u, &u);
    let series = GrassmannNumber::one() + u.scale_re(0.5) - u2.scale_re(0.125);
    Ok(series.scale(b.sqrt()))
}

/// Left derivative with respect to generator g_k, k ∈ 1..=4.
///
/// ∂_k(g_k y) = y for y free of g_k; the sign from moving g_k to the front
/// of an ascending monomial is (−1)^{#generators below k in the monomial}.
pub fn odd_derivative(x: &GrassmannNumber, k: usize) -> GrassmannNumber {
    assert!((1..=N_GEN).contains(&k), "generator index out of range");
    let bit = 1usize << (k - 1);
    let below = bit - 1;
    let mut out = GrassmannNumber::ZERO;
    for idx in 0..DIM {
        if idx & bit == 0 {
            continue;
        }
        let sign = if ((idx & below).count_ones()) % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        out.c[idx & !bit] = x.c[idx] * sign;
    }
    out
}

/// Berezin integral over an ordered list of generators (indices 1..=4).
///
/// For each monomial containing all listed generators, the coefficient of
/// the reordering  g_{i₁}⋯g_{i_k}·(remaining generators ascending)  is kept
/// on the remaining monomial.  With the list (θ̲₁, θ̲₂) this is exactly the
/// measure that makes the odd Fourier transform come out as
/// (v₀, v₁) ↦ (ħv₁, ħ⁻¹v₀).
pub fn berezin_integral(v: &GrassmannNumber, over: &[usize]) -> GrassmannNumber {
    let mut mask = 0usize;
    for &k in over {
        assert!((1..=N_GEN).contains(&k), "generator index out of range");
        let bit = 1 << (k - 1);
        assert!(mask & bit == 0, "repeated generator in Berezin measure");
        mask |= bit;
    }
    let mut out = GrassmannNumber::ZERO;
    for idx in 0..DIM {
        if idx & mask != mask {
            continue;
        }
        // Sign of permuting the ascending monomial `idx` into the order
        // [over..., rest ascending]: count inversions of that target order.
        let rest = idx & !mask;
        let mut order: Vec<usize> = over.iter().map(|&k| k - 1).collect();
        for j in 0..N_GEN {
            if rest & (1 << j) != 0 {
                order.push(j);
            }
        }
        let mut inv = 0usize;
        for i in 0..order.len() {
            for j in (i + 1)..order.len() {
                if order[i] > order[j] {
                    inv += 1;
                }
            }
        }
        let sign = if inv % 2 == 0 { 1.0 } else { -1.0 };
        out.c[rest] += v.c[idx] * sign;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FourierDirection {
    Forward,
    Inverse,
}

/// Odd Fourier transform on the coefficient pair of u = v₀ + v₁θ₁θ₂.
///
/// Both directions map (v₀, v₁) ↦ (ħv₁, ħ⁻¹v₀); composing them is the
/// identity.  The direction argument is kept for call-site clarity.
pub fn super_fourier_odd(
    v: (Complex64, Complex64),
    hbar: f64,
    _direction: FourierDirection,
) -> (Complex64, Complex64) {
    assert!(hbar > 0.0, "hbar must be positive");
    (v.1 * hbar, v.0 / hbar)
}

/// Block supermatrix (A B; C D): A is m×m and D is n×n with even entries,
/// B (m×n) and C (n×m) have odd entries.
#[derive(Clone, Debug)]
pub struct SuperMatrix {
    pub a: Vec<Vec<GrassmannNumber>>,
    pub b: Vec<Vec<GrassmannNumber>>,
    pub c: Vec<Vec<GrassmannNumber>>,
    pub d: Vec<Vec<GrassmannNumber>>,
}

impl SuperMatrix {
    pub fn new(
        a: Vec<Vec<GrassmannNumber>>,
        b: Vec<Vec<GrassmannNumber>>,
        c: Vec<Vec<GrassmannNumber>>,
        d: Vec<Vec<GrassmannNumber>>,
    ) -> Self {
        let m = a.len();
        let n = d.len();
        assert!(a.iter().all(|r| r.len() == m), "A must be square");
        assert!(d.iter().all(|r| r.len() == n), "D must be square");
        assert!(b.len() == m && b.iter().all(|r| r.len() == n), "B must be m×n");
        assert!(c.len() == n && c.iter().all(|r| r.len() == m), "C must be n×m");
        SuperMatrix { a, b, c, d }
    }
}

/// Determinant of a square matrix with even (hence commuting) entries,
/// by cofactor expansion along the first row.
pub fn even_det(m: &[Vec<GrassmannNumber>]) -> GrassmannNumber {
    let n = m.len();
    match n {
        0 => GrassmannNumber::one(),
        1 => m[0][0],
        _ => {
            let mut det = GrassmannNumber::ZERO;
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<GrassmannNumber>> = (1..n)
                    .map(|i| {
                        (0..n)
                            .filter(|&k| k != j)
                            .map(|k| m[i][k])
                            .collect()
                    })
                    .collect();
                let term = gmul(&m[0][j], &even_det(&minor));
                if j % 2 == 0 {
                    det += term;
                } else {
                    det -= term;
                }
            }
            det
        }
    }
}

fn even_matrix_inverse(
    m: &[Vec<GrassmannNumber>],
) -> Result<Vec<Vec<GrassmannNumber>>, GrassmannError> {
    let n = m.len();
    let det = even_det(m);
    let det_inv = even_inverse(&det).map_err(|_| GrassmannError::SingularBlock)?;
    let mut inv = alloc::vec![alloc::vec![GrassmannNumber::ZERO; n]; n];
    for i in 0..n {
        for j in 0..n {
            // Cofactor C_ji / det (adjugate transpose).
            let minor: Vec<Vec<GrassmannNumber>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| {
                    (0..n)
                        .filter(|&c| c != i)
                        .map(|c| m[r][c])
                        .collect()
                })
                .collect();
            let mut cof = gmul(&even_det(&minor), &det_inv);
            if (i + j) % 2 == 1 {
                cof = -cof;
            }
            inv[i][j] = cof;
        }
    }
    Ok(inv)
}

/// Superdeterminant sdet M = det(A − B D⁻¹ C) · det(D)⁻¹.
pub fn sdet(m: &SuperMatrix) -> Result<GrassmannNumber, GrassmannError> {
    let det_d = even_det(&m.d);
    let det_d_inv = even_inverse(&det_d).map_err(|_| GrassmannError::SingularBlock)?;
    let d_inv = even_matrix_inverse(&m.d)?;
    let mm = m.a.len();
    let n = m.d.len();
    // Schur complement A − B D⁻¹ C (even entries: odd·even·odd).
    let mut schur = m.a.clone();
    for i in 0..mm {
        for j in 0..mm {
            let mut acc = GrassmannNumber::ZERO;
            for p in 0..n {
                for q in 0..n {
                    acc += gmul(&gmul(&m.b[i][p], &d_inv[p][q]), &m.c[q][j]);
                }
            }
            schur[i][j] -= acc;
        }
    }
    let det_schur = even_det(&schur);
    if det_schur.body().norm_sqr() == 0.0 {
        return Err(GrassmannError::SingularBlock);
    }
    Ok(gmul(&det_schur, &det_d_inv))
}

/// Jet of a scalar function at a real point: value, gradient and symmetric
/// Hessian (order [11, 22, 33, 12, 13, 23]).
#[derive(Clone, Copy, Debug, Default)]
pub struct ScalarJet2 {
    pub f: Complex64,
    pub df: [Complex64; 3],
    pub d2f: [Complex64; 6],
}

/// Position of the (i, j) Hessian entry in the packed order [11,22,33,12,13,23].
pub const fn sym_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    match (a, b) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (0, 1) => 3,
        (0, 2) => 4,
        _ => 5, // (1,2)
    }
}

/// Taylor continuation of a scalar function to an even Grassmann 3-vector
/// argument: f(x) = Σ_{|α| ≤ 2} ∂^α f(x_B)/α! · soul(x)^α.  Exact, because
/// products of three even souls vanish in the 4-generator algebra.
pub fn grassmann_continuation(jet: &ScalarJet2, x: &[GrassmannNumber; 3]) -> GrassmannNumber {
    let souls = [x[0].soul(), x[1].soul(), x[2].soul()];
    let mut out = GrassmannNumber::scalar(jet.f);
    for j in 0..3 {
        out += souls[j].scale(jet.df[j]);
    }
    for i in 0..3 {
        for j in i..3 {
            let w = if i == j { 0.5 } else { 1.0 };
            out += gmul(&souls[i], &souls[j]).scale(jet.d2f[sym_index(i, j)] * w);
        }
    }
    out
}
