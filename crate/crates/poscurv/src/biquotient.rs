//! The biquotient structure behind each weight tuple: the two-sided circle
//! and symplectic action on U(5), its freeness test, the vertical space of
//! the quotient submersion at a base point, orthonormal horizontal frames,
//! and the numerical positivity certification of the curvature lower bound
//! over sampled base points.

use std::sync::OnceLock;
use std::time::Instant;

use nalgebra::{DMatrix, DVector, Matrix4, SMatrix, SymmetricEigen};
use num_integer::Integer;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::liealg::{
    c64, sp2_basis, CMatrix5, GroupElement, LieVector, C64, STRUCTURAL_TOL,
};
use crate::metric::{curvature_lower_bound_g, metric_inner};
use crate::tuples::{all_splits, split_value, Tuple5};

/// Eigenvalue threshold on metric Gram matrices for numerical rank
/// decisions.
pub const RANK_EIGEN_TOL: f64 = 1e-8;

/// Symplectic-condition tolerance for action parameters.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Finite-difference step for the Grassmannian descent gradient.
const GRAD_STEP: f64 = 1e-5;

/// The 12 generators of the vertical space at a base point g, together with
/// their numerical rank under the submersion metric.
///
/// Generators are, in order: Ad(g^{-1})(i diag(p1..p5)), i diag(1,1,1,1,0),
/// and the 10 symplectic basis elements. All of them live at the identity;
/// left translation carries them to g.
#[derive(Debug, Clone)]
pub struct VerticalFrame {
    pub g: GroupElement,
    pub generators: Vec<LieVector>,
    pub rank: usize,
}

/// A metric-orthonormal basis of the 13-dimensional horizontal space at g:
/// the orthogonal complement of the vertical generators in u(5).
#[derive(Debug, Clone)]
pub struct HorizontalFrame {
    pub g: GroupElement,
    pub basis: Vec<LieVector>,
}

/// Freeness verdict with the offending split when the action is not free:
/// `permutation` = [i1, i2, i3, i4, i5] such that p_{i1} + p_{i3} - p_{i2}
/// - p_{i4} shares the divisor with p_{i5}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreenessWitness {
    pub permutation: [usize; 5],
    pub divisor: i128,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreenessReport {
    pub free: bool,
    pub witness: Option<FreenessWitness>,
}

/// Configuration of a certification run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyConfig {
    pub num_points: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            num_points: 20,
            restarts: 50,
            max_iters: 500,
            tol: 1e-10,
            seed: 0,
        }
    }
}

/// Witness plane of the smallest lower bound found.
#[derive(Debug, Clone)]
pub struct PlaneArgMin {
    pub g: GroupElement,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    pub point_index: usize,
    pub restart_index: usize,
}

/// Outcome of a certification run: numerical evidence, not a proof. The
/// minimum is over all sampled base points and restarts; `min_evaluated`
/// additionally tracks every objective evaluation made along the way,
/// including rejected line-search candidates.
#[derive(Debug, Clone)]
pub struct CurvatureCertificate {
    pub tuple: Tuple5,
    pub config: CertifyConfig,
    pub min_value: f64,
    pub min_evaluated: f64,
    pub argmin: PlaneArgMin,
    pub per_point_minima: Vec<f64>,
    pub converged: bool,
    pub runtime_ms: u128,
}

/// Applies the two-sided action of parameters (z1, a, z2) to x:
/// diag(z1^{p1}, ..., z1^{p5}) * x * blockdiag(a^* conj(z2), 1).
///
/// z1, z2 must be unit complex numbers; a must be unitary and satisfy the
/// symplectic condition a^T J a = J within [`SYMPLECTIC_TOL`].
pub fn action_apply(
    t: &Tuple5,
    z1: C64,
    a: &Matrix4<C64>,
    z2: C64,
    x: &GroupElement,
) -> Result<GroupElement> {
    if (z1.norm() - 1.0).abs() > STRUCTURAL_TOL || (z2.norm() - 1.0).abs() > STRUCTURAL_TOL {
        return Err(Error::InvalidArgument(
            "z1 and z2 must be unit complex numbers".into(),
        ));
    }
    let unitary_dev = (a * a.adjoint() - Matrix4::identity()).norm();
    if unitary_dev > STRUCTURAL_TOL {
        return Err(Error::NotUnitary {
            deviation: unitary_dev,
        });
    }
    let mut j = Matrix4::<C64>::zeros();
    j[(0, 2)] = c64(1.0, 0.0);
    j[(1, 3)] = c64(1.0, 0.0);
    j[(2, 0)] = c64(-1.0, 0.0);
    j[(3, 1)] = c64(-1.0, 0.0);
    let sympl_dev = (a.transpose() * j * a - j).norm();
    if sympl_dev > SYMPLECTIC_TOL {
        return Err(Error::NotSymplectic {
            deviation: sympl_dev,
        });
    }

    let theta = z1.arg();
    let mut left = CMatrix5::zeros();
    for (i, &p) in t.0.iter().enumerate() {
        left[(i, i)] = C64::from_polar(1.0, p as f64 * theta);
    }
    let block = a.adjoint() * z2.conj();
    let mut right = CMatrix5::zeros();
    for r in 0..4 {
        for c in 0..4 {
            right[(r, c)] = block[(r, c)];
        }
    }
    right[(4, 4)] = c64(1.0, 0.0);

    Ok(GroupElement {
        u: left * x.u * right,
    })
}

/// Whether the action of the tuple is free: every split difference
/// p_i + p_j - p_k - p_l must be coprime to the leftover entry. On failure
/// the witness carries the offending arrangement and the common divisor
/// d > 1 (a primitive d-th root of unity as z1 then stabilizes a point).
pub fn free_action_check(t: &Tuple5) -> FreenessReport {
    for s in all_splits() {
        let diff = split_value(t, &s);
        let out = t.0[s.out] as i128;
        let d = diff.abs().gcd(&out.abs());
        if d != 1 {
            return FreenessReport {
                free: false,
                witness: Some(FreenessWitness {
                    permutation: [s.plus[0], s.minus[0], s.plus[1], s.minus[1], s.out],
                    divisor: d,
                }),
            };
        }
    }
    FreenessReport {
        free: true,
        witness: None,
    }
}

/// A metric-orthonormal basis of u(5), split-pure (each element lies wholly
/// in k or in p), used to coordinatize frame computations.
fn metric_basis() -> &'static Vec<LieVector> {
    static BASIS: OnceLock<Vec<LieVector>> = OnceLock::new();
    BASIS.get_or_init(|| {
        let sqrt2 = 2.0f64.sqrt();
        let mut basis = Vec::with_capacity(25);
        // diagonal directions (in k): metric norm of i E_jj is 1/sqrt(2)
        for jj in 0..5 {
            let mut d = [0.0; 5];
            d[jj] = sqrt2;
            basis.push(LieVector::imaginary_diag(d));
        }
        for i in 0..5 {
            for j in (i + 1)..5 {
                // E_ij - E_ji and i(E_ij + E_ji); inside the 4x4 block these
                // have metric norm 1 as-is, on the strips they need 1/sqrt(2)
                let scale = if j < 4 { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
                let mut m = CMatrix5::zeros();
                m[(i, j)] = c64(scale, 0.0);
                m[(j, i)] = c64(-scale, 0.0);
                basis.push(LieVector::new_unchecked(m));
                let mut m = CMatrix5::zeros();
                m[(i, j)] = c64(0.0, scale);
                m[(j, i)] = c64(0.0, scale);
                basis.push(LieVector::new_unchecked(m));
            }
        }
        basis
    })
}

fn to_coords(x: &LieVector) -> DVector<f64> {
    let basis = metric_basis();
    DVector::from_fn(25, |a, _| metric_inner(x, &basis[a]))
}

fn from_coords(c: &DVector<f64>) -> LieVector {
    let basis = metric_basis();
    let mut m = CMatrix5::zeros();
    for (a, b) in basis.iter().enumerate() {
        m += b.m.map(|v| v * c[a]);
    }
    LieVector::new_unchecked(m)
}

/// The 12 vertical generators at g (identity representatives). Entries of
/// the tuple are converted to floating point, so magnitudes beyond 2^53
/// lose exactness; certification is intended for desk-scale tuples.
pub fn vertical_generators(t: &Tuple5, g: &GroupElement) -> Vec<LieVector> {
    let p_diag = LieVector::imaginary_diag([
        t.0[0] as f64,
        t.0[1] as f64,
        t.0[2] as f64,
        t.0[3] as f64,
        t.0[4] as f64,
    ]);
    let mut gens = Vec::with_capacity(12);
    gens.push(g.adjoint_action_inv(&p_diag));
    gens.push(LieVector::imaginary_diag([1.0, 1.0, 1.0, 1.0, 0.0]));
    gens.extend(sp2_basis());
    gens
}

/// Vertical space of the quotient at base point g, with its numerical rank
/// under the submersion metric. A full rank of 12 is required (the quotient
/// is 25 - 12 = 13 dimensional); lower rank signals a non-free tuple or a
/// numerically degenerate point.
pub fn vertical_frame(t: &Tuple5, g: &GroupElement) -> Result<VerticalFrame> {
    let generators = vertical_generators(t, g);
    let gram = DMatrix::from_fn(12, 12, |i, j| metric_inner(&generators[i], &generators[j]));
    let eig = SymmetricEigen::new(gram);
    let rank = eig
        .eigenvalues
        .iter()
        .filter(|&&l| l > RANK_EIGEN_TOL)
        .count();
    if rank < 12 {
        return Err(Error::RankDeficient { rank });
    }
    Ok(VerticalFrame {
        g: g.clone(),
        generators,
        rank,
    })
}

/// Metric-orthonormal basis of the 13-dimensional horizontal space at g:
/// the orthogonal complement of the vertical generators under the
/// submersion metric, refined so that every basis vector is orthogonal to
/// every generator to near machine precision.
pub fn horizontal_frame(t: &Tuple5, g: &GroupElement) -> Result<HorizontalFrame> {
    let vf = vertical_frame(t, g)?;
    let coords: Vec<DVector<f64>> = vf.generators.iter().map(to_coords).collect();
    let v = DMatrix::from_fn(12, 25, |i, a| coords[i][a]);
    let projector = v.transpose() * &v; // 25x25, PSD
    let eig = SymmetricEigen::new(projector);

    let mut row_space: Vec<DVector<f64>> = Vec::new();
    let mut null_space: Vec<DVector<f64>> = Vec::new();
    for (idx, &l) in eig.eigenvalues.iter().enumerate() {
        let col = DVector::from_column_slice(eig.eigenvectors.column(idx).as_slice());
        if l > RANK_EIGEN_TOL {
            row_space.push(col);
        } else {
            null_space.push(col);
        }
    }
    if row_space.len() != 12 {
        return Err(Error::RankDeficient {
            rank: row_space.len(),
        });
    }

    // two projection passes against the vertical row space, then modified
    // Gram-Schmidt among the horizontal candidates
    for n in null_space.iter_mut() {
        for _ in 0..2 {
            for w in &row_space {
                let c = n.dot(w);
                *n -= w * c;
            }
        }
    }
    for i in 0..null_space.len() {
        for _ in 0..2 {
            for j in 0..i {
                let (head, tail) = null_space.split_at_mut(i);
                let c = tail[0].dot(&head[j]);
                tail[0] -= &head[j] * c;
            }
        }
        let norm = null_space[i].norm();
        null_space[i] /= norm;
    }

    let basis: Vec<LieVector> = null_space.iter().map(from_coords).collect();
    Ok(HorizontalFrame {
        g: g.clone(),
        basis,
    })
}

/// Curvature lower bound of the horizontal plane spanned by the two
/// coefficient vectors against a prepared frame.
pub fn plane_lower_bound_in_frame(
    frame: &HorizontalFrame,
    c1: &[f64],
    c2: &[f64],
) -> Result<f64> {
    if c1.len() != frame.basis.len() || c2.len() != frame.basis.len() {
        return Err(Error::InvalidArgument(format!(
            "coefficient vectors must have length {}",
            frame.basis.len()
        )));
    }
    let combine = |c: &[f64]| {
        let mut m = CMatrix5::zeros();
        for (coeff, b) in c.iter().zip(&frame.basis) {
            m += b.m.map(|v| v * *coeff);
        }
        LieVector::new_unchecked(m)
    };
    curvature_lower_bound_g(&combine(c1), &combine(c2))
}

/// Curvature lower bound for the horizontal plane at g spanned by the two
/// coefficient combinations of the horizontal frame. This bounds the
/// sectional curvature of the quotient at the image of g from below.
pub fn plane_lower_bound(t: &Tuple5, g: &GroupElement, c1: &[f64], c2: &[f64]) -> Result<f64> {
    let frame = horizontal_frame(t, g)?;
    plane_lower_bound_in_frame(&frame, c1, c2)
}

/// splitmix64 step, used to derive independent per-task seeds.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn derive_seed(seed: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b)
}

struct DescentOutcome {
    value: f64,
    c: SMatrix<f64, 13, 2>,
    converged: bool,
    min_evaluated: f64,
}

fn qr_retract(c: &SMatrix<f64, 13, 2>) -> SMatrix<f64, 13, 2> {
    let qr = (*c).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..2 {
        if r[(j, j)] < 0.0 {
            for i in 0..13 {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// One multi-start unit: projected gradient descent over the Stiefel
/// parameterization of horizontal 2-planes, gradients by central
/// differences, Armijo backtracking, QR retraction. Stops at projected
/// gradient norm below tol, at numerical stationarity (no improving step),
/// or at the iteration cap; only the cap counts as non-converged.
fn minimize_plane(
    frame: &HorizontalFrame,
    rng: &mut ChaCha8Rng,
    config: &CertifyConfig,
) -> DescentOutcome {
    let mut min_evaluated = f64::INFINITY;
    let mut eval = |c: &SMatrix<f64, 13, 2>| -> f64 {
        let c1: Vec<f64> = (0..13).map(|i| c[(i, 0)]).collect();
        let c2: Vec<f64> = (0..13).map(|i| c[(i, 1)]).collect();
        match plane_lower_bound_in_frame(frame, &c1, &c2) {
            Ok(v) => {
                if v < min_evaluated {
                    min_evaluated = v;
                }
                v
            }
            Err(_) => f64::INFINITY,
        }
    };

    let start = SMatrix::<f64, 13, 2>::from_fn(|_, _| rng.sample(StandardNormal));
    let mut c = qr_retract(&start);
    let mut f = eval(&c);
    let mut converged = false;

    for _ in 0..config.max_iters {
        let mut grad = SMatrix::<f64, 13, 2>::zeros();
        for i in 0..13 {
            for j in 0..2 {
                let mut plus = c;
                plus[(i, j)] += GRAD_STEP;
                let mut minus = c;
                minus[(i, j)] -= GRAD_STEP;
                grad[(i, j)] = (eval(&plus) - eval(&minus)) / (2.0 * GRAD_STEP);
            }
        }
        // tangent projection on the Stiefel manifold
        let ctg = c.transpose() * grad;
        let sym = (ctg + ctg.transpose()) * 0.5;
        let tangent = grad - c * sym;
        let tnorm = tangent.norm();
        if tnorm < config.tol {
            converged = true;
            break;
        }
        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = qr_retract(&(c - tangent * alpha));
            let fc = eval(&cand);
            if fc <= f - 1e-4 * alpha * tnorm * tnorm {
                c = cand;
                f = fc;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            // no improving step at the smallest trial size: numerically
            // stationary for this start
            converged = true;
            break;
        }
    }

    DescentOutcome {
        value: f,
        c,
        converged,
        min_evaluated,
    }
}

struct PointOutcome {
    g: GroupElement,
    minimum: f64,
    best_restart: usize,
    best_c: SMatrix<f64, 13, 2>,
    best_converged: bool,
    min_evaluated: f64,
}

/// Certifies positivity of the curvature lower bound numerically: samples
/// Haar base points, minimizes the plane lower bound over horizontal
/// 2-planes at each with multi-start descent, and reports the smallest
/// value found with its witness plane.
///
/// The result is deterministic per (tuple, config) regardless of thread
/// schedule: every task derives its own generator from (seed, point,
/// restart), and minima are merged with explicit index tie-breaks. A
/// positive `min_value` is evidence, not a proof, of positive curvature;
/// the certificate never asserts a global bound.
///
/// Rejects non-free tuples with the freeness witness. Admissibility is not
/// required: condition-violating free tuples may be certified to observe
/// how close to flat their planes get.
pub fn certify_positivity(t: &Tuple5, config: &CertifyConfig) -> Result<CurvatureCertificate> {
    if config.num_points == 0 || config.restarts == 0 || config.max_iters == 0 {
        return Err(Error::InvalidArgument(
            "num_points, restarts and max_iters must be positive".into(),
        ));
    }
    if !(config.tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let freeness = free_action_check(t);
    if let Some(w) = freeness.witness {
        return Err(Error::NotFree {
            divisor: w.divisor,
            i1: w.permutation[0],
            i2: w.permutation[1],
            i3: w.permutation[2],
            i4: w.permutation[3],
            i5: w.permutation[4],
        });
    }

    let started = Instant::now();
    let points: Vec<PointOutcome> = (0..config.num_points)
        .into_par_iter()
        .map(|pt| -> Result<PointOutcome> {
            let g = GroupElement::haar(derive_seed(config.seed, pt as u64, u64::MAX));
            let frame = horizontal_frame(t, &g)?;
            let runs: Vec<DescentOutcome> = (0..config.restarts)
                .into_par_iter()
                .map(|rs| {
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(derive_seed(config.seed, pt as u64, rs as u64));
                    minimize_plane(&frame, &mut rng, config)
                })
                .collect();
            let best_idx = (0..runs.len())
                .min_by(|&a, &b| runs[a].value.total_cmp(&runs[b].value).then(a.cmp(&b)))
                .expect("at least one restart");
            let min_evaluated = runs
                .iter()
                .map(|r| r.min_evaluated)
                .fold(f64::INFINITY, f64::min);
            Ok(PointOutcome {
                g,
                minimum: runs[best_idx].value,
                best_restart: best_idx,
                best_c: runs[best_idx].c,
                best_converged: runs[best_idx].converged,
                min_evaluated,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let best_point = (0..points.len())
        .min_by(|&a, &b| {
            points[a]
                .minimum
                .total_cmp(&points[b].minimum)
                .then(a.cmp(&b))
        })
        .expect("at least one point");
    let winner = &points[best_point];
    let argmin = PlaneArgMin {
        g: winner.g.clone(),
        c1: (0..13).map(|i| winner.best_c[(i, 0)]).collect(),
        c2: (0..13).map(|i| winner.best_c[(i, 1)]).collect(),
        point_index: best_point,
        restart_index: winner.best_restart,
    };
    Ok(CurvatureCertificate {
        tuple: *t,
        config: *config,
        min_value: winner.minimum,
        min_evaluated: points
            .iter()
            .map(|p| p.min_evaluated)
            .fold(f64::INFINITY, f64::min),
        argmin,
        per_point_minima: points.iter().map(|p| p.minimum).collect(),
        converged: winner.best_converged,
        runtime_ms: started.elapsed().as_millis(),
    })
}
