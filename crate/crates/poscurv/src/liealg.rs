//! Matrix Lie-algebra substrate: u(5) as 5x5 complex skew-Hermitian
//! matrices, the block subalgebra k = u(4) + u(1) and its complement p, the
//! symplectic subalgebra sp(2) inside su(4), brackets, the trace inner
//! product, adjoint actions, matrix exponentials and Haar-random unitaries.

use nalgebra::{Complex, DMatrix, Matrix5, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rand::SeedableRng;

use crate::error::{Error, Result};

/// Structural tolerance for algebraic side conditions (skew-Hermiticity,
/// unitarity, diagonality) of values that are exact up to rounding.
pub const STRUCTURAL_TOL: f64 = 1e-12;

/// Tolerance for derived floating-point identities (invariance properties,
/// orthogonality of computed frames against computed generators).
pub const DERIVED_TOL: f64 = 1e-10;

pub type C64 = Complex<f64>;
pub type CMatrix5 = Matrix5<C64>;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Element of u(5): a 5x5 complex matrix X with X + X* = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LieVector {
    pub m: CMatrix5,
}

impl LieVector {
    /// Wraps a matrix after checking skew-Hermiticity within
    /// [`STRUCTURAL_TOL`].
    pub fn new(m: CMatrix5) -> Result<Self> {
        let deviation = (m + m.adjoint()).norm();
        if deviation > STRUCTURAL_TOL {
            return Err(Error::NotSkewHermitian { deviation });
        }
        Ok(LieVector { m })
    }

    /// Wraps a matrix that is skew-Hermitian by construction.
    pub fn new_unchecked(m: CMatrix5) -> Self {
        LieVector { m }
    }

    pub fn zero() -> Self {
        LieVector {
            m: CMatrix5::zeros(),
        }
    }

    /// i * diag(d1, ..., d5).
    pub fn imaginary_diag(d: [f64; 5]) -> Self {
        let mut m = CMatrix5::zeros();
        for (i, &di) in d.iter().enumerate() {
            m[(i, i)] = c64(0.0, di);
        }
        LieVector { m }
    }

    pub fn scale(&self, s: f64) -> Self {
        LieVector {
            m: self.m.map(|v| v * s),
        }
    }

    pub fn add(&self, other: &LieVector) -> Self {
        LieVector {
            m: self.m + other.m,
        }
    }

    pub fn sub(&self, other: &LieVector) -> Self {
        LieVector {
            m: self.m - other.m,
        }
    }
}

/// Decomposition of x into its k-part (diagonal 4x4 and 1x1 blocks) and
/// p-part (the off-diagonal 4x1 / 1x4 strips); xk + xp = x exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSplit {
    pub xk: LieVector,
    pub xp: LieVector,
}

/// Element of U(5): a 5x5 complex unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub u: CMatrix5,
}

impl GroupElement {
    /// Wraps a matrix after checking unitarity within [`STRUCTURAL_TOL`].
    pub fn new(u: CMatrix5) -> Result<Self> {
        let deviation = (u * u.adjoint() - CMatrix5::identity()).norm();
        if deviation > STRUCTURAL_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(GroupElement { u })
    }

    pub fn new_unchecked(u: CMatrix5) -> Self {
        GroupElement { u }
    }

    pub fn identity() -> Self {
        GroupElement {
            u: CMatrix5::identity(),
        }
    }

    /// Haar-random element of U(5), deterministic per seed.
    pub fn haar(seed: u64) -> Self {
        let d = haar_unitary(seed, 5);
        let mut u = CMatrix5::zeros();
        for i in 0..5 {
            for j in 0..5 {
                u[(i, j)] = d[(i, j)];
            }
        }
        GroupElement { u }
    }

    /// Group inverse; for a unitary matrix this is the adjoint.
    pub fn inverse(&self) -> Self {
        GroupElement {
            u: self.u.adjoint(),
        }
    }

    pub fn mul(&self, other: &GroupElement) -> Self {
        GroupElement {
            u: self.u * other.u,
        }
    }

    /// Adjoint action Ad(g) x = g x g^{-1}.
    pub fn adjoint_action(&self, x: &LieVector) -> LieVector {
        LieVector {
            m: self.u * x.m * self.u.adjoint(),
        }
    }

    /// Ad(g^{-1}) x = g^{-1} x g.
    pub fn adjoint_action_inv(&self, x: &LieVector) -> LieVector {
        LieVector {
            m: self.u.adjoint() * x.m * self.u,
        }
    }
}

/// Lie bracket xy - yx.
pub fn bracket(x: &LieVector, y: &LieVector) -> LieVector {
    LieVector {
        m: x.m * y.m - y.m * x.m,
    }
}

/// The bi-invariant inner product Re trace(X Y*).
pub fn inner0(x: &LieVector, y: &LieVector) -> f64 {
    x.m.iter()
        .zip(y.m.iter())
        .map(|(a, b)| (a * b.conj()).re)
        .sum()
}

/// Norm induced by [`inner0`].
pub fn norm0(x: &LieVector) -> f64 {
    inner0(x, x).max(0.0).sqrt()
}

/// Splits x into k- and p-parts by block masking; exact and idempotent.
pub fn block_split(x: &LieVector) -> BlockSplit {
    let mut k = CMatrix5::zeros();
    let mut p = CMatrix5::zeros();
    for i in 0..5 {
        for j in 0..5 {
            let in_k = (i < 4 && j < 4) || (i == 4 && j == 4);
            if in_k {
                k[(i, j)] = x.m[(i, j)];
            } else {
                p[(i, j)] = x.m[(i, j)];
            }
        }
    }
    BlockSplit {
        xk: LieVector { m: k },
        xp: LieVector { m: p },
    }
}

/// Basis of the symplectic subalgebra sp(2) inside su(4), embedded as the
/// top-left 4x4 block of u(5).
///
/// Elements have the form [[A, B], [-conj(B), conj(A)]] with A in u(2) and B
/// complex symmetric; each satisfies Z^T J + J Z = 0 for
/// J = [[0, I2], [-I2, 0]]. The 10 returned vectors are pairwise
/// inner0-orthogonal and scaled to inner0-norm sqrt(2).
pub fn sp2_basis() -> Vec<LieVector> {
    let mut basis = Vec::with_capacity(10);

    // a_blocks: basis of u(2); b_blocks: real basis of symmetric complex 2x2
    let i = c64(0.0, 1.0);
    let one = c64(1.0, 0.0);
    let a_blocks: [[[C64; 2]; 2]; 4] = [
        [[i, c64(0.0, 0.0)], [c64(0.0, 0.0), c64(0.0, 0.0)]],
        [[c64(0.0, 0.0), c64(0.0, 0.0)], [c64(0.0, 0.0), i]],
        [[c64(0.0, 0.0), one], [-one, c64(0.0, 0.0)]],
        [[c64(0.0, 0.0), i], [i, c64(0.0, 0.0)]],
    ];
    for a in a_blocks {
        let mut m = CMatrix5::zeros();
        for r in 0..2 {
            for c in 0..2 {
                m[(r, c)] = a[r][c];
                m[(r + 2, c + 2)] = a[r][c].conj();
            }
        }
        basis.push(LieVector { m });
    }

    let b_blocks: [[[C64; 2]; 2]; 6] = [
        [[one, c64(0.0, 0.0)], [c64(0.0, 0.0), c64(0.0, 0.0)]],
        [[i, c64(0.0, 0.0)], [c64(0.0, 0.0), c64(0.0, 0.0)]],
        [[c64(0.0, 0.0), c64(0.0, 0.0)], [c64(0.0, 0.0), one]],
        [[c64(0.0, 0.0), c64(0.0, 0.0)], [c64(0.0, 0.0), i]],
        [[c64(0.0, 0.0), one], [one, c64(0.0, 0.0)]],
        [[c64(0.0, 0.0), i], [i, c64(0.0, 0.0)]],
    ];
    for b in b_blocks {
        let mut m = CMatrix5::zeros();
        for r in 0..2 {
            for c in 0..2 {
                m[(r, c + 2)] = b[r][c];
                m[(r + 2, c)] = -b[r][c].conj();
            }
        }
        basis.push(LieVector { m });
    }

    let target = 2.0f64.sqrt();
    for z in &mut basis {
        let n = norm0(z);
        *z = z.scale(target / n);
    }
    basis
}

/// Haar-distributed n x n unitary, deterministic per seed: QR of a complex
/// Gaussian matrix with each column rescaled so the triangular factor has
/// positive real diagonal.
pub fn haar_unitary(seed: u64, n: usize) -> DMatrix<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_unitary_from_rng(&mut rng, n)
}

/// Same as [`haar_unitary`] but drawing from a caller-owned generator.
pub fn haar_unitary_from_rng<R: Rng>(rng: &mut R, n: usize) -> DMatrix<C64> {
    assert!(n >= 1, "dimension must be positive");
    let g = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im)
    });
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c64(1.0, 0.0)
        };
        for i in 0..n {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Haar-random special unitary: a Haar unitary with the determinant phase
/// divided out evenly across a global scalar factor.
pub fn haar_special_unitary(seed: u64, n: usize) -> DMatrix<C64> {
    let u = haar_unitary(seed, n);
    let det = u.determinant();
    let theta = det.arg() / n as f64;
    let correction = c64(0.0, -theta).exp();
    u * correction
}

/// Matrix exponential of a skew-Hermitian matrix via the eigendecomposition
/// of its Hermitian companion; the result is unitary.
pub fn exp_skew(x: &LieVector) -> GroupElement {
    // x = i h with h Hermitian; exp(x) = V diag(exp(i lambda)) V*
    let h = x.m.map(|v| v * c64(0.0, -1.0));
    let eig = SymmetricEigen::new(h);
    let mut d = CMatrix5::zeros();
    for k in 0..5 {
        d[(k, k)] = c64(0.0, eig.eigenvalues[k]).exp();
    }
    GroupElement {
        u: eig.eigenvectors * d * eig.eigenvectors.adjoint(),
    }
}

/// The six pairwise differences x_i - x_j (i < j) of the first four diagonal
/// imaginary parts of a diagonal element of su(4) embedded in u(5), ordered
/// (1,2), (1,3), (1,4), (2,3), (2,4), (3,4).
pub fn root_pattern(h: &LieVector) -> Result<[f64; 6]> {
    let mut off = 0.0f64;
    for i in 0..5 {
        for j in 0..5 {
            if i != j {
                off += h.m[(i, j)].norm_sqr();
            }
        }
    }
    let deviation = off.sqrt();
    if deviation > STRUCTURAL_TOL {
        return Err(Error::NotDiagonal { deviation });
    }
    let x: Vec<f64> = (0..4).map(|i| h.m[(i, i)].im).collect();
    let mut out = [0.0f64; 6];
    let mut k = 0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            out[k] = x[i] - x[j];
            k += 1;
        }
    }
    Ok(out)
}

/// Random element of u(5) with independent Gaussian coordinates, for
/// property tests and randomized verification.
pub fn random_skew_hermitian<R: Rng>(rng: &mut R) -> LieVector {
    let mut m = CMatrix5::zeros();
    for i in 0..5 {
        m[(i, i)] = c64(0.0, rng.sample(StandardNormal));
        for j in (i + 1)..5 {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let v = c64(re, im) * std::f64::consts::FRAC_1_SQRT_2;
            m[(i, j)] = v;
            m[(j, i)] = -v.conj();
        }
    }
    LieVector { m }
}

/// Matrix entries as nested [re, im] pairs, row-major, for JSON dumps.
pub fn matrix_entries(m: &CMatrix5) -> Vec<Vec<[f64; 2]>> {
    (0..5)
        .map(|i| (0..5).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}
