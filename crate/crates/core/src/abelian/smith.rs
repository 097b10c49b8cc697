//! Smith normal form over the integers.
//!
//! For an integer matrix `M` the decomposition is `U * M * V = D` with `U`,
//! `V` unimodular and `D` diagonal, non-negative, each entry dividing the
//! next.  `D` is unique; `U` and `V` are not.  Pivots are chosen by minimal
//! absolute value, which keeps intermediate entries small on the sparse 0/1
//! systems this crate mostly reduces, but entries can still outgrow machine
//! width, hence `BigInt` throughout.

use super::matrix::IntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// The result of [`snf`]: `u * m * v == d`.
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Replays the defining equations: `U*M*V = D`, `D` diagonal and
    /// non-negative with a divisibility chain, and `U`, `V` unimodular.
    pub fn verify(&self, m: &IntMatrix) -> bool {
        if self.u.mul(m).mul(&self.v) != self.d {
            return false;
        }
        if !self.d.is_diagonal() {
            return false;
        }
        let diag = self.d.diagonal_entries();
        if diag.iter().any(|e| e.is_negative()) {
            return false;
        }
        for w in diag.windows(2) {
            // every entry divides the next; everything divides 0
            if !w[0].is_zero() && !(&w[1] % &w[0]).is_zero() {
                return false;
            }
            if w[0].is_zero() && !w[1].is_zero() {
                return false;
            }
        }
        self.u.is_unimodular() && self.v.is_unimodular()
    }
}

/// Full Smith decomposition with both transforms tracked.
pub fn snf(m: &IntMatrix) -> SmithDecomposition {
    let mut a = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut v = IntMatrix::identity(m.cols());
    reduce(&mut a, Some(&mut u), Some(&mut v));
    SmithDecomposition { u, d: a, v }
}

/// Diagonalizes `a` in place.  Row operations are mirrored on `u`, column
/// operations on `v`; callers that only need one transform pass `None` for
/// the other and skip its bookkeeping entirely.
fn reduce(a: &mut IntMatrix, mut u: Option<&mut IntMatrix>, mut v: Option<&mut IntMatrix>) {
    let (m, n) = (a.rows(), a.cols());
    for t in 0..m.min(n) {
        let Some((pi, pj)) = find_pivot(a, t) else {
            break; // the remaining block is zero
        };
        move_pivot(a, &mut u, &mut v, t, pi, pj);
        'pivot: loop {
            if a.get(t, t).is_negative() {
                a.negate_row(t);
                if let Some(u) = u.as_deref_mut() {
                    u.negate_row(t);
                }
            }
            let p = a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..m {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = -a.get(i, t).div_floor(&p);
                a.add_multiple_of_row(i, t, &q);
                if let Some(u) = u.as_deref_mut() {
                    u.add_multiple_of_row(i, t, &q);
                }
                // the floored quotient leaves a remainder in [0, p)
                if !a.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = -a.get(t, j).div_floor(&p);
                a.add_multiple_of_col(j, t, &q);
                if let Some(v) = v.as_deref_mut() {
                    v.add_multiple_of_col(j, t, &q);
                }
                if !a.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // some remainder is smaller than the pivot; promote it
                let (pi, pj) = find_pivot(a, t).expect("nonzero remainder exists");
                move_pivot(a, &mut u, &mut v, t, pi, pj);
                continue;
            }
            // cross is clear; force the divisibility chain
            for i in t + 1..m {
                if (t + 1..n).any(|j| !(a.get(i, j) % &p).is_zero()) {
                    let one = BigInt::one();
                    a.add_multiple_of_row(t, i, &one);
                    if let Some(u) = u.as_deref_mut() {
                        u.add_multiple_of_row(t, i, &one);
                    }
                    continue 'pivot;
                }
            }
            break;
        }
    }
}

/// Smallest-absolute-value nonzero entry of the block at `(t.., t..)`,
/// ties broken by position, so reductions are reproducible.
fn find_pivot(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(BigInt, usize, usize)> = None;
    for i in t..a.rows() {
        for (j, val) in a.row(i).iter().enumerate().skip(t) {
            if val.is_zero() {
                continue;
            }
            let mag = val.abs();
            if mag.is_one() {
                return Some((i, j)); // cannot do better
            }
            match &best {
                Some((m, _, _)) if *m <= mag => {}
                _ => best = Some((mag, i, j)),
            }
        }
    }
    best.map(|(_, i, j)| (i, j))
}

fn move_pivot(
    a: &mut IntMatrix,
    u: &mut Option<&mut IntMatrix>,
    v: &mut Option<&mut IntMatrix>,
    t: usize,
    pi: usize,
    pj: usize,
) {
    if pi != t {
        a.swap_rows(t, pi);
        if let Some(u) = u.as_deref_mut() {
            u.swap_rows(t, pi);
        }
    }
    if pj != t {
        a.swap_cols(t, pj);
        if let Some(v) = v.as_deref_mut() {
            v.swap_cols(t, pj);
        }
    }
}

/// Diagonal of the Smith form plus the column transform, without paying for
/// `U`.  This is all the kernel computation needs (`x = V z`).
pub(crate) fn diagonal_with_col_transform(m: &IntMatrix) -> (Vec<BigInt>, IntMatrix) {
    let mut a = m.clone();
    let mut v = IntMatrix::identity(m.cols());
    reduce(&mut a, None, Some(&mut v));
    (a.diagonal_entries(), v)
}

/// Generators of `{ x : M x = 0 mod d }`.
///
/// With `U M V = D` and `x = V z`, the system becomes `d_i z_i = 0 mod d`
/// independently per coordinate.  For `d = 0` the result is a basis of the
/// integer kernel; for `d > 0` each constrained coordinate contributes the
/// generator `(d / gcd(d_i, d)) * V e_i`, reduced mod `d`, whenever that
/// stride is a proper residue.
pub fn kernel_mod(m: &IntMatrix, d: u64) -> Vec<Vec<BigInt>> {
    let (diag, v) = diagonal_with_col_transform(m);
    let n = m.cols();
    let mut gens = Vec::new();
    for j in 0..n {
        let dj = diag.get(j).cloned().unwrap_or_else(BigInt::zero);
        if d == 0 {
            if dj.is_zero() {
                gens.push(v.col(j));
            }
            continue;
        }
        let dd = BigInt::from(d);
        let stride = if dj.is_zero() { BigInt::one() } else { &dd / dj.gcd(&dd) };
        if stride == dd {
            continue; // only the zero residue solves d_j z = 0
        }
        let col = v
            .col(j)
            .into_iter()
            .map(|x| (x * &stride).mod_floor(&dd))
            .collect();
        gens.push(col);
    }
    gens
}

/// Invariant factors of a direct sum of cyclic groups given by `mods`
/// (0 meaning `Z`): Smith-reduce the diagonal relation matrix, drop unit
/// factors, keep zeros (the free rank) at the end.
pub fn canonical_invariant_factors(mods: &[u64]) -> Vec<u64> {
    let entries: Vec<BigInt> = mods.iter().map(|&d| BigInt::from(d)).collect();
    let dec = snf(&IntMatrix::diagonal(&entries));
    dec.d
        .diagonal_entries()
        .into_iter()
        .filter(|e| !e.is_one())
        .map(|e| u64::try_from(&e).expect("invariant factor exceeds u64"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag_u64(d: &IntMatrix) -> Vec<u64> {
        d.diagonal_entries().iter().map(|e| e.to_u64().unwrap()).collect()
    }

    #[test]
    fn worked_two_by_two_example() {
        // gcd-based reduction by hand: [[2,4],[6,8]] -> diag(2,4):
        // r2 -= 3 r1 gives [[2,4],[0,-4]]; c2 -= 2 c1 gives [[2,0],[0,-4]];
        // negating the last row leaves diag(2,4), and 2 | 4.
        let m = IntMatrix::from_rows_i64(&[vec![2, 4], vec![6, 8]]);
        let dec = snf(&m);
        assert_eq!(diag_u64(&dec.d), vec![2, 4]);
        assert!(dec.verify(&m));
    }

    #[test]
    fn zero_and_identity_matrices() {
        let z = IntMatrix::zero(3, 2);
        let dec = snf(&z);
        assert_eq!(diag_u64(&dec.d), vec![0, 0]);
        assert!(dec.verify(&z));

        let i = IntMatrix::identity(4);
        let dec = snf(&i);
        assert_eq!(diag_u64(&dec.d), vec![1, 1, 1, 1]);
        assert!(dec.verify(&i));
    }

    #[test]
    fn divisibility_chain_is_forced() {
        // diag(4, 6) is not in Smith form; the chain is (2, 12).
        let m = IntMatrix::from_rows_i64(&[vec![4, 0], vec![0, 6]]);
        let dec = snf(&m);
        assert_eq!(diag_u64(&dec.d), vec![2, 12]);
        assert!(dec.verify(&m));
    }

    #[test]
    fn random_matrices_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let rows = rng.gen_range(0..=6);
            let cols = rng.gen_range(0..=6);
            let m = IntMatrix::from_rows(
                (0..rows)
                    .map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect())
                    .collect::<Vec<_>>(),
            );
            let m = if rows == 0 { IntMatrix::zero(0, cols) } else { m };
            let dec = snf(&m);
            assert!(dec.verify(&m), "failed on {m:?}");
        }
    }

    /// Brute-force oracle: enumerate all of (Z/d)^n and keep the vectors
    /// annihilated by M.  Only for tiny d and n.
    fn kernel_by_enumeration(m: &IntMatrix, d: u64) -> Vec<Vec<u64>> {
        let n = m.cols();
        let mut out = Vec::new();
        let total = d.pow(n as u32);
        for code in 0..total {
            let mut x = Vec::with_capacity(n);
            let mut c = code;
            for _ in 0..n {
                x.push(c % d);
                c /= d;
            }
            let ok = (0..m.rows()).all(|i| {
                let s: u64 = (0..n)
                    .map(|j| {
                        let a = m.get(i, j).mod_floor(&BigInt::from(d)).to_u64().unwrap();
                        a * x[j] % d
                    })
                    .sum();
                s.is_multiple_of(d)
            });
            if ok {
                out.push(x);
            }
        }
        out
    }

    /// Closure of the generated subgroup of (Z/d)^n.
    fn span_mod(gens: &[Vec<BigInt>], d: u64, n: usize) -> std::collections::BTreeSet<Vec<u64>> {
        let mut seen = std::collections::BTreeSet::new();
        seen.insert(vec![0u64; n]);
        let gens: Vec<Vec<u64>> = gens
            .iter()
            .map(|g| g.iter().map(|x| x.mod_floor(&BigInt::from(d)).to_u64().unwrap()).collect())
            .collect();
        let mut frontier: Vec<Vec<u64>> = seen.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y: Vec<u64> = x.iter().zip(g).map(|(a, b)| (a + b) % d).collect();
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        seen
    }

    #[test]
    fn kernel_mod_documented_cases() {
        // 2x = 0 mod 4 is solved exactly by multiples of 2
        let gens = kernel_mod(&IntMatrix::from_rows_i64(&[vec![2]]), 4);
        assert_eq!(gens, vec![vec![BigInt::from(2)]]);

        // x + y = 0 over Z: the line through (1, -1)
        let gens = kernel_mod(&IntMatrix::from_rows_i64(&[vec![1, 1]]), 0);
        assert_eq!(gens.len(), 1);
        let g0 = &gens[0];
        assert!(
            (g0[0] == BigInt::one() && g0[1] == BigInt::from(-1))
                || (g0[0] == BigInt::from(-1) && g0[1] == BigInt::one()),
            "generator should span the anti-diagonal, got {g0:?}"
        );

        // the identity has no kernel mod 5
        let gens = kernel_mod(&IntMatrix::identity(2), 5);
        assert!(gens.is_empty());
    }

    #[test]
    fn kernel_mod_agrees_with_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..40 {
            let rows = rng.gen_range(1..=3);
            let cols = rng.gen_range(1..=3);
            let d = *[2u64, 3, 4, 6, 8].get(rng.gen_range(0..5)).unwrap();
            let m = IntMatrix::from_rows(
                (0..rows)
                    .map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect())
                    .collect::<Vec<_>>(),
            );
            let gens = kernel_mod(&m, d);
            let expected: std::collections::BTreeSet<Vec<u64>> =
                kernel_by_enumeration(&m, d).into_iter().collect();
            let got = span_mod(&gens, d, cols);
            assert_eq!(got, expected, "kernel mismatch for {m:?} mod {d}");
        }
    }

    #[test]
    fn integer_kernel_rank_and_membership() {
        // rank 1 with 3 columns, so the kernel is free of rank 2
        let m = IntMatrix::from_rows_i64(&[vec![2, -1, 3], vec![4, -2, 6]]);
        let gens = kernel_mod(&m, 0);
        assert_eq!(gens.len(), 2);
        for g in &gens {
            for i in 0..m.rows() {
                let s: BigInt = (0..3).map(|j| m.get(i, j) * &g[j]).sum();
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn canonical_factors_examples() {
        assert_eq!(canonical_invariant_factors(&[2, 3]), vec![6]);
        assert_eq!(canonical_invariant_factors(&[2, 4]), vec![2, 4]);
        assert_eq!(canonical_invariant_factors(&[4, 6]), vec![2, 12]);
        assert_eq!(canonical_invariant_factors(&[0, 2, 0]), vec![2, 0, 0]);
        assert_eq!(canonical_invariant_factors(&[]), Vec::<u64>::new());
    }
}
