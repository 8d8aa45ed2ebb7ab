//! Exact cohomology data of the quotient spaces: the 6x6 integer relation
//! matrix presenting the middle-degree group H^6, fraction-free determinants,
//! Smith normal form over big integers, and the assembled summary
//! (Betti pattern, torsion order r, invariant factors of H^6).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::tuples::{invariant_r_from_sigma, symmetric_invariants, Tuple5};

/// The 6x6 integer matrix presenting H^6 of the quotient as a quotient of
/// Z^6, together with the values it was built from.
///
/// Rows are exactly, in order (with n = (1 - sigma_1)/2):
///
/// ```text
/// (s1, -2,  0,  0,  0,  0)
/// ( 0, s1, -2,  0,  0,  0)
/// ( 0,  0, s1, -2,  0,  0)
/// ( 0,  0,  0,  0, s1, -2)
/// (n*s2, s2, -n, -1,  n,  1)
/// (s3,  0,  0,  0,  0,  1)
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationMatrix {
    pub tuple: Tuple5,
    pub sigma1: BigInt,
    pub sigma2: BigInt,
    pub sigma3: BigInt,
    pub n: BigInt,
    pub rows: Vec<Vec<BigInt>>,
}

/// A finitely generated abelian group as free rank plus invariant factors
/// d_1 | d_2 | ... Factors equal to 1 are retained here; reports omit them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroupPresentation {
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
}

impl AbelianGroupPresentation {
    /// Factors greater than 1, the ones worth printing.
    pub fn nontrivial_factors(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| **d > BigInt::one())
            .cloned()
            .collect()
    }

    /// Order of the group when finite (free_rank = 0), None otherwise.
    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            return None;
        }
        Some(self.invariant_factors.iter().product())
    }
}

/// Smith decomposition left * m * right = diag(diagonal), with both
/// transforms unimodular and the diagonal a nonnegative divisibility chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub left: Vec<Vec<BigInt>>,
    pub diagonal: Vec<BigInt>,
    pub right: Vec<Vec<BigInt>>,
}

impl SmithDecomposition {
    /// Group presented by the matrix acting on column vectors: one factor
    /// per nonzero diagonal entry, one free generator per zero one (plus
    /// one per column beyond the row count, which cannot occur for square
    /// input).
    pub fn presented_group(&self, cols: usize) -> AbelianGroupPresentation {
        let nonzero: Vec<BigInt> = self
            .diagonal
            .iter()
            .filter(|d| !d.is_zero())
            .cloned()
            .collect();
        AbelianGroupPresentation {
            free_rank: cols - nonzero.len(),
            invariant_factors: nonzero,
        }
    }
}

/// Topological summary for an admissible tuple: free ranks of H^i for
/// i = 0..=13, the common torsion order r of H^6 and H^8, and the invariant
/// factors of H^6 read off the relation matrix. H^8 carries order r but no
/// derived factor structure, so only its order is reported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologySummary {
    pub tuple: Tuple5,
    pub betti: [u32; 14],
    pub r: BigInt,
    pub h6: AbelianGroupPresentation,
}

/// Degrees in which the cohomology is an infinite cyclic group; everywhere
/// else it is finite (trivial except H^6 and H^8, which have order r).
pub const FREE_DEGREES: [usize; 6] = [0, 2, 4, 9, 11, 13];

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

/// Builds the presentation matrix of H^6 for a tuple with odd entry sum.
///
/// Requires sigma_1 odd so that n = (1 - sigma_1)/2 is an integer; an even
/// sum means the space is not simply connected and this presentation does
/// not apply.
pub fn relation_matrix(t: &Tuple5) -> Result<RelationMatrix> {
    let inv = symmetric_invariants(t);
    let n = inv.n.clone().ok_or(Error::EvenSigma1 {
        sigma1: t.sum(),
    })?;
    let [s1, s2, s3, _, _] = inv.sigma;
    let z = BigInt::zero;
    let rows = vec![
        vec![s1.clone(), big(-2), z(), z(), z(), z()],
        vec![z(), s1.clone(), big(-2), z(), z(), z()],
        vec![z(), z(), s1.clone(), big(-2), z(), z()],
        vec![z(), z(), z(), z(), s1.clone(), big(-2)],
        vec![&n * &s2, s2.clone(), -&n, big(-1), n.clone(), big(1)],
        vec![s3.clone(), z(), z(), z(), z(), big(1)],
    ];
    Ok(RelationMatrix {
        tuple: *t,
        sigma1: s1,
        sigma2: s2,
        sigma3: s3,
        n,
        rows,
    })
}

/// Exact determinant of a square integer matrix by fraction-free Bareiss
/// elimination; every division along the way is exact.
pub fn det_exact(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    assert!(m.iter().all(|row| row.len() == n), "matrix must be square");
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// Smith normal form of a rectangular integer matrix with exact arithmetic.
///
/// Returns unimodular transforms left, right and the diagonal such that
/// left * m * right is diagonal, entries nonnegative and each dividing the
/// next.
pub fn smith_normal_form(m: &[Vec<BigInt>]) -> SmithDecomposition {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    assert!(
        m.iter().all(|row| row.len() == cols),
        "matrix must be rectangular"
    );
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut left = identity(rows);
    let mut right = identity(cols);

    let steps = rows.min(cols);
    'outer: for t in 0..steps {
        loop {
            // smallest-magnitude nonzero pivot in the trailing block
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    let better = match pivot {
                        None => true,
                        Some((pi, pj)) => a[i][j].abs() < a[pi][pj].abs(),
                    };
                    if better {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                break 'outer; // trailing block is all zero
            };
            if pi != t {
                a.swap(t, pi);
                left.swap(t, pi);
            }
            if pj != t {
                for row in a.iter_mut() {
                    row.swap(t, pj);
                }
                for row in right.iter_mut() {
                    row.swap(t, pj);
                }
            }

            // clear below and to the right of the pivot by euclidean steps
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = &a[i][t] / &a[t][t];
                if !q.is_zero() {
                    for j in 0..cols {
                        let sub = &q * &a[t][j];
                        a[i][j] -= sub;
                    }
                    for j in 0..rows {
                        let sub = &q * &left[t][j];
                        left[i][j] -= sub;
                    }
                }
                if !a[i][t].is_zero() {
                    dirty = true; // remainder left; next pass picks a smaller pivot
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = &a[t][j] / &a[t][t];
                if !q.is_zero() {
                    for i in 0..rows {
                        let sub = &q * &a[i][t];
                        a[i][j] -= sub;
                    }
                    for i in 0..cols {
                        let sub = &q * &right[i][t];
                        right[i][j] -= sub;
                    }
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }

            // enforce divisibility of the whole trailing block by the pivot
            let mut fixed = true;
            'scan: for i in t + 1..rows {
                for j in t + 1..cols {
                    if (&a[i][j] % &a[t][t]).is_zero() {
                        continue;
                    }
                    for jj in 0..cols {
                        let add = a[i][jj].clone();
                        a[t][jj] += add;
                    }
                    for jj in 0..rows {
                        let add = left[i][jj].clone();
                        left[t][jj] += add;
                    }
                    fixed = false;
                    break 'scan;
                }
            }
            if fixed {
                break;
            }
        }
    }

    // nonnegative diagonal
    for t in 0..steps {
        if a[t][t].is_negative() {
            for j in 0..cols {
                a[t][j] = -a[t][j].clone();
            }
            for j in 0..rows {
                left[t][j] = -left[t][j].clone();
            }
        }
    }

    let diagonal: Vec<BigInt> = (0..steps).map(|t| a[t][t].clone()).collect();
    SmithDecomposition {
        left,
        diagonal,
        right,
    }
}

/// Full summary: fixed Betti pattern, torsion order r, invariant factors of
/// H^6 computed from the Smith normal form of the relation matrix.
///
/// Callers are expected to pass admissible tuples; the only condition
/// enforced here is the parity of the entry sum (propagated from
/// [`relation_matrix`]).
pub fn cohomology_summary(t: &Tuple5) -> Result<CohomologySummary> {
    let rm = relation_matrix(t)?;
    let snf = smith_normal_form(&rm.rows);
    let h6 = snf.presented_group(6);
    let r = invariant_r_from_sigma(&rm.sigma1, &rm.sigma2, &rm.sigma3);
    let mut betti = [0u32; 14];
    for &i in &FREE_DEGREES {
        betti[i] = 1;
    }
    Ok(CohomologySummary {
        tuple: *t,
        betti,
        r,
        h6,
    })
}
