//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A matrix expected to be skew-Hermitian is not, within tolerance.
    #[error("matrix is not skew-Hermitian (max deviation {deviation:.3e})")]
    NotSkewHermitian { deviation: f64 },

    /// A matrix expected to be unitary is not, within tolerance.
    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    /// A matrix expected to lie in Sp(2) fails the symplectic or unitarity check.
    #[error("matrix is not in Sp(2) (max deviation {deviation:.3e})")]
    NotSymplectic { deviation: f64 },

    /// An operation requiring a diagonal matrix received a non-diagonal one.
    #[error("matrix is not diagonal (max off-diagonal magnitude {deviation:.3e})")]
    NotDiagonal { deviation: f64 },

    /// Curvature evaluation requires an orthonormal input pair.
    #[error("input pair is not orthonormal (Gram deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    /// Two vectors that should span a 2-plane are numerically dependent.
    #[error("degenerate plane: Gram determinant {gram_det:.3e} below threshold")]
    DegeneratePlane { gram_det: f64 },

    /// The vertical space at a base point has unexpected rank.
    #[error("vertical space rank {rank}, expected 12 (non-free point or numerical failure)")]
    RankDeficient { rank: usize },

    /// The tuple does not induce a free action; carries the divisor witness.
    #[error("action is not free: gcd {divisor} > 1 at split (+{i1},+{i2},-{i3},-{i4} | {i5})")]
    NotFree {
        divisor: i128,
        i1: usize,
        i2: usize,
        i3: usize,
        i4: usize,
        i5: usize,
    },

    /// The degree-6 relation matrix needs odd sigma_1 so that (1 - sigma_1)/2 is integral.
    #[error("sigma_1 = {sigma1} is even: space is not simply connected, relation matrix undefined")]
    EvenSigma1 { sigma1: i128 },

    /// A pairwise split difference vanished, so no shift multiplier exists.
    #[error("split p{i}+p{j}-p{k}-p{l} vanishes; shift multiplier undefined")]
    ZeroSplit { i: usize, j: usize, k: usize, l: usize },

    /// Integer overflow while computing a shifted tuple.
    #[error("shifted tuple entry exceeds the i64 range")]
    ShiftOverflow,

    /// Malformed user input (CLI layer).
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
