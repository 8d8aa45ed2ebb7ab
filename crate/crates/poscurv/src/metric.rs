//! The left-invariant submersion metric on U(5): horizontal lifts into
//! u(5) + k, metric evaluation, the bi-invariant curvature form of lifted
//! pairs, curvature lower bounds for 2-planes, and a flat-plane predicate.

use nalgebra::{Matrix2, SymmetricEigen};

use crate::error::{Error, Result};
use crate::liealg::{block_split, bracket, inner0, norm0, LieVector};

/// Tolerance on the Gram matrix when an operation requires an orthonormal
/// input pair.
pub const GRAM_ORTHONORMAL_TOL: f64 = 1e-8;

/// Gram determinants below this are treated as degenerate planes, which are
/// errors rather than zero-curvature findings.
pub const DEGENERATE_PLANE_TOL: f64 = 1e-14;

/// Horizontal lift of a tangent vector x into u(5) + k: with x = xk + xp the
/// lift is (xk/2 + xp, -xk/2). Both components are skew-Hermitian; the
/// second is supported on k.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedVector {
    pub a: LieVector,
    pub b: LieVector,
}

/// The submersion metric: inner0(xk, yk)/2 + inner0(xp, yp).
pub fn metric_inner(x: &LieVector, y: &LieVector) -> f64 {
    let xs = block_split(x);
    let ys = block_split(y);
    0.5 * inner0(&xs.xk, &ys.xk) + inner0(&xs.xp, &ys.xp)
}

/// Norm induced by [`metric_inner`].
pub fn metric_norm(x: &LieVector) -> f64 {
    metric_inner(x, x).max(0.0).sqrt()
}

/// Horizontal lift (xk/2 + xp, -xk/2); linear and an isometry onto its image
/// with the componentwise bi-invariant product.
pub fn lift(x: &LieVector) -> LiftedVector {
    let s = block_split(x);
    LiftedVector {
        a: s.xk.scale(0.5).add(&s.xp),
        b: s.xk.scale(-0.5),
    }
}

/// Componentwise bi-invariant inner product on u(5) + k.
pub fn lifted_inner0(x: &LiftedVector, y: &LiftedVector) -> f64 {
    inner0(&x.a, &y.a) + inner0(&x.b, &y.b)
}

/// Sectional curvature of the bi-invariant metric on U(5) x K at the plane
/// spanned by an orthonormal lifted pair: ||([xa,ya], [xb,yb])||^2 / 4.
///
/// The pair must be orthonormal under [`lifted_inner0`] within
/// [`GRAM_ORTHONORMAL_TOL`].
pub fn biinvariant_curvature(x: &LiftedVector, y: &LiftedVector) -> Result<f64> {
    let gxx = lifted_inner0(x, x);
    let gyy = lifted_inner0(y, y);
    let gxy = lifted_inner0(x, y);
    let deviation = (gxx - 1.0).abs().max((gyy - 1.0).abs()).max(gxy.abs());
    if deviation > GRAM_ORTHONORMAL_TOL {
        return Err(Error::NotOrthonormal { deviation });
    }
    let ba = bracket(&x.a, &y.a);
    let bb = bracket(&x.b, &y.b);
    Ok(0.25 * (inner0(&ba, &ba) + inner0(&bb, &bb)))
}

/// Gram-Schmidt in the submersion metric with a re-orthogonalization pass.
/// Errors when the metric Gram determinant of the pair is below
/// [`DEGENERATE_PLANE_TOL`].
pub(crate) fn metric_orthonormalize_pair(
    x: &LieVector,
    y: &LieVector,
) -> Result<(LieVector, LieVector)> {
    let gxx = metric_inner(x, x);
    let gyy = metric_inner(y, y);
    let gxy = metric_inner(x, y);
    let gram_det = gxx * gyy - gxy * gxy;
    if gram_det < DEGENERATE_PLANE_TOL {
        return Err(Error::DegeneratePlane { gram_det });
    }
    let e1 = x.scale(1.0 / gxx.sqrt());
    let mut w = y.sub(&e1.scale(metric_inner(y, &e1)));
    w = w.sub(&e1.scale(metric_inner(&w, &e1)));
    let e2 = w.scale(1.0 / metric_norm(&w));
    Ok((e1, e2))
}

/// Lower bound for the sectional curvature of (U(5), submersion metric) on
/// the plane spanned by x and y: the pair is orthonormalized in the metric,
/// lifted, and fed to [`biinvariant_curvature`]. The submersion can only
/// increase curvature, so a positive value certifies a positively curved
/// plane downstream.
pub fn curvature_lower_bound_g(x: &LieVector, y: &LieVector) -> Result<f64> {
    let (e1, e2) = metric_orthonormalize_pair(x, y)?;
    biinvariant_curvature(&lift(&e1), &lift(&e2))
}

/// Whether the plane spanned by (x, y) is flat for the submersion metric:
/// true iff it admits a basis (x', y') with y' in k (up to tol) and both
/// ||[x'_k, y']|| and ||[x'_p, y']|| at most tol.
///
/// The candidate y' is the plane direction minimizing the p-component norm,
/// found by a 2x2 eigenproblem; degenerate input pairs return false.
pub fn is_flat_plane(x: &LieVector, y: &LieVector, tol: f64) -> bool {
    let Ok((e1, e2)) = metric_orthonormalize_pair(x, y) else {
        return false;
    };
    let p1 = block_split(&e1).xp;
    let p2 = block_split(&e2).xp;
    let gram = Matrix2::new(
        inner0(&p1, &p1),
        inner0(&p1, &p2),
        inner0(&p2, &p1),
        inner0(&p2, &p2),
    );
    let eig = SymmetricEigen::new(gram);
    let (min_idx, _) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("2x2 eigenproblem");
    let v = eig.eigenvectors.column(min_idx);
    let y_cand = e1.scale(v[0]).add(&e2.scale(v[1]));
    // the orthogonal direction in the plane (e1, e2 are metric-orthonormal)
    let x_cand = e1.scale(-v[1]).add(&e2.scale(v[0]));

    let ys = block_split(&y_cand);
    if norm0(&ys.xp) > tol {
        return false; // the plane does not meet k
    }
    let xs = block_split(&x_cand);
    norm0(&bracket(&xs.xk, &ys.xk)) <= tol && norm0(&bracket(&xs.xp, &ys.xk)) <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{c64, random_skew_hermitian, CMatrix5};
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn random_k(rng: &mut StdRng) -> LieVector {
        block_split(&random_skew_hermitian(rng)).xk
    }

    fn random_p(rng: &mut StdRng) -> LieVector {
        block_split(&random_skew_hermitian(rng)).xp
    }

    /// E_{ij} - E_{ji} as a skew-Hermitian rotation generator.
    fn rotation(i: usize, j: usize) -> LieVector {
        let mut m = CMatrix5::zeros();
        m[(i, j)] = c64(1.0, 0.0);
        m[(j, i)] = c64(-1.0, 0.0);
        LieVector::new(m).unwrap()
    }

    #[test]
    fn metric_halves_inner0_on_k() {
        let mut rng = StdRng::seed_from_u64(10);
        for _ in 0..1000 {
            let x = random_skew_hermitian(&mut rng);
            let y = random_k(&mut rng);
            let diff = metric_inner(&x, &y) - 0.5 * inner0(&x, &y);
            assert!(diff.abs() < 1e-12);
        }
    }

    #[test]
    fn metric_equals_inner0_on_p() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..200 {
            let x = random_p(&mut rng);
            let y = random_p(&mut rng);
            assert!((metric_inner(&x, &y) - inner0(&x, &y)).abs() < 1e-12);
        }
    }

    #[test]
    fn metric_positive_definite() {
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..100 {
            let x = random_skew_hermitian(&mut rng);
            assert!(metric_inner(&x, &x) > 0.0);
        }
    }

    #[test]
    fn lift_block_cases() {
        let mut rng = StdRng::seed_from_u64(13);
        let k = random_k(&mut rng);
        let lk = lift(&k);
        assert!(norm0(&lk.a.sub(&k.scale(0.5))) < 1e-15);
        assert!(norm0(&lk.b.add(&k.scale(0.5))) < 1e-15);

        let p = random_p(&mut rng);
        let lp = lift(&p);
        assert!(norm0(&lp.a.sub(&p)) < 1e-15);
        assert!(norm0(&lp.b) == 0.0);
    }

    #[test]
    fn lift_is_isometry() {
        let mut rng = StdRng::seed_from_u64(14);
        for _ in 0..1000 {
            let x = random_skew_hermitian(&mut rng);
            let y = random_skew_hermitian(&mut rng);
            let diff = lifted_inner0(&lift(&x), &lift(&y)) - metric_inner(&x, &y);
            assert!(diff.abs() < 1e-12);
        }
    }

    #[test]
    fn lift_is_horizontal() {
        // fiber directions of the submersion are the pairs (z, z), z in k
        let mut rng = StdRng::seed_from_u64(15);
        for _ in 0..100 {
            let x = random_skew_hermitian(&mut rng);
            let z = random_k(&mut rng);
            let fiber = LiftedVector {
                a: z.clone(),
                b: z.clone(),
            };
            assert!(lifted_inner0(&lift(&x), &fiber).abs() < 1e-12);
        }
    }

    #[test]
    fn biinvariant_curvature_examples() {
        // commuting diagonal pair, orthonormalized
        let x = LieVector::imaginary_diag([1.0, 0.0, 0.0, 0.0, 0.0]);
        let y = LieVector::imaginary_diag([0.0, 1.0, 0.0, 0.0, 0.0]);
        let (e1, e2) = metric_orthonormalize_pair(&x, &y).unwrap();
        let k = biinvariant_curvature(&lift(&e1), &lift(&e2)).unwrap();
        assert!(k.abs() < 1e-15);

        // rotation pair in the 4x4 block: hand value 1/16
        let x = rotation(0, 1);
        let y = rotation(1, 2);
        let k = biinvariant_curvature(&lift(&x), &lift(&y)).unwrap();
        assert_relative_eq!(k, 1.0 / 16.0, max_relative = 1e-12);

        // non-orthonormal input rejected
        let too_long = x.scale(3.0);
        assert!(matches!(
            biinvariant_curvature(&lift(&too_long), &lift(&y)),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn biinvariant_curvature_rotation_invariant_in_plane() {
        let x = rotation(0, 1);
        let y = rotation(1, 2);
        let base = biinvariant_curvature(&lift(&x), &lift(&y)).unwrap();
        for k in 1..8 {
            let t = k as f64 * 0.7;
            let xr = x.scale(t.cos()).add(&y.scale(t.sin()));
            let yr = x.scale(-t.sin()).add(&y.scale(t.cos()));
            let v = biinvariant_curvature(&lift(&xr), &lift(&yr)).unwrap();
            assert_relative_eq!(v, base, max_relative = 1e-9);
        }
    }

    #[test]
    fn lower_bound_zero_on_commuting_k_pair() {
        let x = LieVector::imaginary_diag([0.0, 0.0, 0.0, 0.0, 1.0]);
        let y = LieVector::imaginary_diag([1.0, 1.0, 1.0, 1.0, 0.0]);
        let v = curvature_lower_bound_g(&x, &y).unwrap();
        assert!(v.abs() < 1e-15);
    }

    #[test]
    fn lower_bound_positive_generically_and_basis_invariant() {
        let mut rng = StdRng::seed_from_u64(16);
        for _ in 0..50 {
            let x = random_skew_hermitian(&mut rng);
            let y = random_skew_hermitian(&mut rng);
            let v = curvature_lower_bound_g(&x, &y).unwrap();
            assert!(v >= 0.0);
            assert!(v > 1e-8, "generic plane should be positively curved");

            // invariance under an invertible recombination of the basis
            let x2 = x.scale(1.3).add(&y.scale(-0.4));
            let y2 = x.scale(0.2).add(&y.scale(2.1));
            let v2 = curvature_lower_bound_g(&x2, &y2).unwrap();
            assert_relative_eq!(v2, v, max_relative = 1e-9);
        }
    }

    #[test]
    fn lower_bound_rejects_degenerate_plane() {
        let mut rng = StdRng::seed_from_u64(17);
        let x = random_skew_hermitian(&mut rng);
        let y = x.scale(2.0);
        assert!(matches!(
            curvature_lower_bound_g(&x, &y),
            Err(Error::DegeneratePlane { .. })
        ));
    }

    #[test]
    fn zero_characterization_via_brackets() {
        let mut rng = StdRng::seed_from_u64(18);
        let mut flats = 0;
        for case in 0..60 {
            let (x, y) = if case % 3 == 0 {
                // flat construction: x with a p-strip, y in k commuting with it
                let mut m = CMatrix5::zeros();
                m[(0, 4)] = c64(0.7, 0.3);
                m[(4, 0)] = -c64(0.7, -0.3);
                m[(1, 1)] = c64(0.0, 0.5);
                let x = LieVector::new(m).unwrap();
                let y = LieVector::imaginary_diag([1.0, 0.0, 0.0, 0.0, 1.0]);
                (x, y)
            } else {
                (
                    random_skew_hermitian(&mut rng),
                    random_skew_hermitian(&mut rng),
                )
            };
            let Ok((e1, e2)) = metric_orthonormalize_pair(&x, &y) else {
                continue;
            };
            let v = biinvariant_curvature(&lift(&e1), &lift(&e2)).unwrap();
            let s1 = block_split(&e1);
            let s2 = block_split(&e2);
            let brackets_vanish = norm0(&bracket(&s1.xk, &s2.xk)) < 1e-7
                && norm0(&bracket(&s1.xp, &s2.xp)) < 1e-7
                && norm0(&bracket(&s1.xk, &s2.xp).add(&bracket(&s1.xp, &s2.xk))) < 1e-7;
            assert_eq!(v <= 1e-14, brackets_vanish, "case {case}");
            if v <= 1e-14 {
                flats += 1;
            }
        }
        assert!(flats > 0, "the flat construction must appear in the sample");
    }

    #[test]
    fn flat_plane_detection() {
        // commuting pair inside k
        let x = LieVector::imaginary_diag([0.0, 0.0, 0.0, 0.0, 1.0]);
        let y = LieVector::imaginary_diag([1.0, 1.0, 1.0, 1.0, 0.0]);
        assert!(is_flat_plane(&x, &y, 1e-9));

        // mixed flat plane: p-strip plus commuting k direction
        let mut m = CMatrix5::zeros();
        m[(0, 4)] = c64(1.0, 0.0);
        m[(4, 0)] = c64(-1.0, 0.0);
        let x = LieVector::new(m).unwrap();
        let y = LieVector::imaginary_diag([1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(is_flat_plane(&x, &y, 1e-9));

        // generic positively curved plane
        let mut rng = StdRng::seed_from_u64(19);
        for _ in 0..20 {
            let x = random_skew_hermitian(&mut rng);
            let y = random_skew_hermitian(&mut rng);
            if curvature_lower_bound_g(&x, &y).unwrap() > 1e-4 {
                assert!(!is_flat_plane(&x, &y, 1e-9));
            }
        }

        // plane entirely inside p
        let mut m1 = CMatrix5::zeros();
        m1[(0, 4)] = c64(1.0, 0.0);
        m1[(4, 0)] = c64(-1.0, 0.0);
        let mut m2 = CMatrix5::zeros();
        m2[(1, 4)] = c64(1.0, 0.0);
        m2[(4, 1)] = c64(-1.0, 0.0);
        assert!(!is_flat_plane(
            &LieVector::new(m1).unwrap(),
            &LieVector::new(m2).unwrap(),
            1e-9
        ));
    }
}
