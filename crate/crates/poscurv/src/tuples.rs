//! Exact integer arithmetic over the weight 5-tuples: admissibility,
//! elementary symmetric invariants, fundamental group order, enumeration,
//! invariant collisions and split-preserving shifts.
//!
//! Everything here is exact. Entries are `i64`; linear combinations are
//! evaluated in `i128` and products of entries in `BigInt`, so no input
//! magnitude can overflow.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered 5-tuple of integer weights (p1, ..., p5).
///
/// Every derived quantity is invariant under permutation of the entries;
/// [`Tuple5::canonical`] gives the sorted representative used for
/// enumeration and deduplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tuple5(pub [i64; 5]);

impl Tuple5 {
    pub fn new(p: [i64; 5]) -> Self {
        Tuple5(p)
    }

    /// Sorted-nondecreasing representative.
    pub fn canonical(&self) -> Self {
        let mut p = self.0;
        p.sort_unstable();
        Tuple5(p)
    }

    pub fn entries(&self) -> [i64; 5] {
        self.0
    }

    /// Sum of the entries, exactly.
    pub fn sum(&self) -> i128 {
        self.0.iter().map(|&p| p as i128).sum()
    }
}

impl fmt::Display for Tuple5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl FromStr for Tuple5 {
    type Err = Error;

    /// Parses a comma-separated list of five integers, no spaces.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 5 {
            return Err(Error::InvalidArgument(format!(
                "expected 5 comma-separated integers, got {}",
                parts.len()
            )));
        }
        let mut p = [0i64; 5];
        for (i, part) in parts.iter().enumerate() {
            p[i] = part.parse::<i64>().map_err(|_| {
                Error::InvalidArgument(format!("entry {:?} is not an integer", part))
            })?;
        }
        Ok(Tuple5(p))
    }
}

/// One of the 15 unordered ways to split {0,..,4} into two pairs and a
/// leftover index: the value p[plus0]+p[plus1]-p[minus0]-p[minus1] is paired
/// with entry p[out] in the coprimality condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Split {
    pub plus: [usize; 2],
    pub minus: [usize; 2],
    pub out: usize,
}

/// All 15 splits, in a fixed deterministic order.
pub fn all_splits() -> Vec<Split> {
    let mut splits = Vec::with_capacity(15);
    for out in 0..5 {
        let rest: Vec<usize> = (0..5).filter(|&i| i != out).collect();
        // three pairings of the remaining four indices
        for &(a, b, c, d) in &[(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
            splits.push(Split {
                plus: [rest[a], rest[b]],
                minus: [rest[c], rest[d]],
                out,
            });
        }
    }
    splits
}

/// The signed value p[plus0]+p[plus1]-p[minus0]-p[minus1] of a split.
pub fn split_value(t: &Tuple5, s: &Split) -> i128 {
    let p = t.0;
    p[s.plus[0]] as i128 + p[s.plus[1]] as i128 - p[s.minus[0]] as i128 - p[s.minus[1]] as i128
}

/// Elementary symmetric values sigma_1..sigma_5 of the tuple, the torsion
/// invariant r = |sigma_1^3 - 4 sigma_1 sigma_2 + 8 sigma_3|, and
/// n = (1 - sigma_1)/2 when sigma_1 is odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricInvariants {
    pub sigma: [BigInt; 5],
    pub r: BigInt,
    /// Defined only when sigma_1 is odd, so that sigma_1 + 2n = 1 exactly.
    pub n: Option<BigInt>,
}

/// Computes the elementary symmetric values and derived invariants, exactly.
pub fn symmetric_invariants(t: &Tuple5) -> SymmetricInvariants {
    // coefficients of prod (x + p_i): c[k] = sigma_k
    let mut c = vec![BigInt::from(0); 6];
    c[0] = BigInt::from(1);
    for &p in &t.0 {
        let p = BigInt::from(p);
        for k in (1..6).rev() {
            let add = &c[k - 1] * &p;
            c[k] += add;
        }
    }
    let sigma: [BigInt; 5] = [
        c[1].clone(),
        c[2].clone(),
        c[3].clone(),
        c[4].clone(),
        c[5].clone(),
    ];
    let r = invariant_r_from_sigma(&sigma[0], &sigma[1], &sigma[2]);
    let n = if sigma[0].is_odd() {
        Some((BigInt::from(1) - &sigma[0]) / 2)
    } else {
        None
    };
    SymmetricInvariants { sigma, r, n }
}

pub(crate) fn invariant_r_from_sigma(s1: &BigInt, s2: &BigInt, s3: &BigInt) -> BigInt {
    let v = s1 * s1 * s1 - BigInt::from(4) * s1 * s2 + BigInt::from(8) * s3;
    if v.sign() == num_bigint::Sign::Minus {
        -v
    } else {
        v
    }
}

/// Shorthand for the torsion invariant r of a tuple.
pub fn invariant_r(t: &Tuple5) -> BigInt {
    symmetric_invariants(t).r
}

/// Admissibility conditions. The letters match the report vocabulary:
///
/// - `A`: every split difference p_i+p_j-p_k-p_l is coprime to the leftover
///   entry p_m (with gcd(0, m) = |m|);
/// - `B`: any three entries outsum the other two;
/// - `C`: any four entries outsum three times the fifth;
/// - `D`: three times any two entries outsums the other three;
/// - `Positivity`: every entry is positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    A,
    B,
    C,
    D,
    Positivity,
}

/// A single failed condition with its witnessing arrangement of indices and
/// the offending integer: the gcd for `A`, the (non-positive) margin
/// lhs - rhs for `B`/`C`/`D`, the entry value for `Positivity`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionFailure {
    pub condition: Condition,
    /// Indices into the tuple realizing the failure. For `A` the first two
    /// are the plus pair, the next two the minus pair, the last the entry
    /// tested for coprimality.
    pub permutation: [usize; 5],
    pub value: i128,
}

/// Outcome of the full admissibility check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub failures: Vec<ConditionFailure>,
}

/// Checks all admissibility conditions.
///
/// Conditions `B`-`D` are permutation-closed with the binding arrangement at
/// sorted order, so only that arrangement is tested; condition `A` ranges
/// over the 15 splits. A full 120-permutation oracle backs this up in tests.
pub fn check_admissibility(t: &Tuple5) -> AdmissibilityReport {
    let mut failures = Vec::new();
    let p = t.0;

    for (i, &pi) in p.iter().enumerate() {
        if pi <= 0 {
            let mut perm = [0usize; 5];
            perm[0] = i;
            let mut k = 1;
            for j in 0..5 {
                if j != i {
                    perm[k] = j;
                    k += 1;
                }
            }
            failures.push(ConditionFailure {
                condition: Condition::Positivity,
                permutation: perm,
                value: pi as i128,
            });
        }
    }

    for s in all_splits() {
        let diff = split_value(t, &s);
        let g = diff.abs().gcd(&(p[s.out] as i128).abs());
        if g != 1 {
            failures.push(ConditionFailure {
                condition: Condition::A,
                permutation: [s.plus[0], s.plus[1], s.minus[0], s.minus[1], s.out],
                value: g,
            });
        }
    }

    // sorted index order: idx[0] smallest entry
    let mut idx = [0usize, 1, 2, 3, 4];
    idx.sort_by_key(|&i| p[i]);
    let q: Vec<i128> = idx.iter().map(|&i| p[i] as i128).collect();

    let margin_b = q[0] + q[1] + q[2] - q[3] - q[4];
    if margin_b <= 0 {
        failures.push(ConditionFailure {
            condition: Condition::B,
            permutation: idx,
            value: margin_b,
        });
    }
    let margin_c = q[0] + q[1] + q[2] + q[3] - 3 * q[4];
    if margin_c <= 0 {
        failures.push(ConditionFailure {
            condition: Condition::C,
            permutation: idx,
            value: margin_c,
        });
    }
    let margin_d = 3 * (q[0] + q[1]) - q[2] - q[3] - q[4];
    if margin_d <= 0 {
        failures.push(ConditionFailure {
            condition: Condition::D,
            permutation: idx,
            value: margin_d,
        });
    }

    AdmissibilityReport {
        admissible: failures.is_empty(),
        failures,
    }
}

/// All values of the three extremal families over the unordered index
/// splits, as a sorted multiset (25 values):
///
/// - p_i+p_j+p_k-p_l-p_m over the 10 three-element subsets,
/// - 3(p_i+p_j)-p_k-p_l-p_m over the 10 two-element subsets,
/// - p_i+p_j+p_k+p_l-3 p_m over the 5 singletons.
///
/// The minimum is positive exactly when conditions `B`, `C`, `D` all hold.
pub fn extremal_values(t: &Tuple5) -> Vec<i128> {
    let p: Vec<i128> = t.0.iter().map(|&x| x as i128).collect();
    let total: i128 = p.iter().sum();
    let mut values = Vec::with_capacity(25);

    // three plus, two minus: sum(S) - (total - sum(S))
    for i in 0..5 {
        for j in (i + 1)..5 {
            for k in (j + 1)..5 {
                let s = p[i] + p[j] + p[k];
                values.push(2 * s - total);
            }
        }
    }
    // tripled pair minus the rest: 3(p_i+p_j) - (total - p_i - p_j)
    for i in 0..5 {
        for j in (i + 1)..5 {
            values.push(4 * (p[i] + p[j]) - total);
        }
    }
    // four plus, one tripled minus: (total - p_m) - 3 p_m
    for m in 0..5 {
        values.push(total - 4 * p[m]);
    }

    values.sort_unstable();
    values
}

/// Order of the fundamental group: gcd(sigma_1, 2), i.e. 1 when the entry
/// sum is odd (simply connected) and 2 when it is even.
pub fn fundamental_group_order(t: &Tuple5) -> u32 {
    if t.sum().rem_euclid(2) == 1 {
        1
    } else {
        2
    }
}

/// All admissible sorted tuples with entries in 1..=max_entry, in
/// lexicographic order.
pub fn enumerate_admissible(max_entry: i64) -> Vec<Tuple5> {
    assert!(max_entry >= 1, "max_entry must be at least 1");
    let mut out: Vec<Tuple5> = (1..=max_entry)
        .into_par_iter()
        .flat_map_iter(|p1| {
            let mut local = Vec::new();
            for p2 in p1..=max_entry {
                for p3 in p2..=max_entry {
                    for p4 in p3..=max_entry {
                        for p5 in p4..=max_entry {
                            let t = Tuple5([p1, p2, p3, p4, p5]);
                            if check_admissibility(&t).admissible {
                                local.push(t);
                            }
                        }
                    }
                }
            }
            local
        })
        .collect();
    out.sort_unstable();
    out
}

/// Groups the admissible tuples up to max_entry by their invariant r and
/// keeps only the groups of size >= 2: tuples sharing r are candidates that
/// the invariant cannot distinguish.
pub fn invariant_collisions(max_entry: i64) -> BTreeMap<BigInt, Vec<Tuple5>> {
    let mut by_r: BTreeMap<BigInt, Vec<Tuple5>> = BTreeMap::new();
    for t in enumerate_admissible(max_entry) {
        by_r.entry(invariant_r(&t)).or_default().push(t);
    }
    by_r.retain(|_, v| v.len() >= 2);
    by_r
}

/// Least common multiple of the 15 split magnitudes |p_i+p_j-p_k-p_l|.
///
/// Errors with the offending split when any of them vanishes.
pub fn split_lcm(t: &Tuple5) -> Result<BigInt> {
    let mut l = BigInt::from(1);
    for s in all_splits() {
        let d = split_value(t, &s);
        if d == 0 {
            return Err(Error::ZeroSplit {
                i: s.plus[0],
                j: s.plus[1],
                k: s.minus[0],
                l: s.minus[1],
            });
        }
        l = l.lcm(&BigInt::from(d.abs()));
    }
    Ok(l)
}

/// Adds n * lcm(split magnitudes) to every entry. The common shift leaves
/// every split difference unchanged and is divisible by each of them, so the
/// coprimality condition `A` survives; for large enough n the inequalities
/// `B`-`D` hold as well.
pub fn shift_by_split_lcm(t: &Tuple5, n: u64) -> Result<Tuple5> {
    let l = split_lcm(t)?;
    let a = BigInt::from(n) * l;
    let mut p = [0i64; 5];
    for (i, &pi) in t.0.iter().enumerate() {
        let shifted = BigInt::from(pi) + &a;
        p[i] = i64::try_from(shifted).map_err(|_| Error::ShiftOverflow)?;
    }
    Ok(Tuple5(p))
}
