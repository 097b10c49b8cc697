//! Homogeneous systems `M x = 0` over a direct sum of cyclic groups.
//!
//! The system splits across the factors of the group: a vector over
//! `Z/d_1 + ... + Z/d_r` solves `M x = 0` exactly when its i-th coordinate
//! slice solves `M x = 0 mod d_i`.  The solution set is therefore described
//! by one generator list per factor, each obtained from [`kernel_mod`].

use super::matrix::IntMatrix;
use super::smith::diagonal_with_col_transform;
use super::{GroupElement, GroupSpec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

/// The solution set of one homogeneous system over one group: for factor `i`
/// every integer combination of `generators(i)` taken mod `d_i`, assembled
/// coordinate-wise across factors.
#[derive(Clone)]
pub struct SolutionSpace {
    group: GroupSpec,
    cols: usize,
    /// `gens[factor][k][col]`, reduced mod `d_factor`.
    gens: Vec<Vec<Vec<BigInt>>>,
}

/// Solves `M x = 0` over `g` by reducing `M` once and specializing the
/// diagonal conditions to each factor's modulus.
pub fn solve_homogeneous(m: &IntMatrix, g: &GroupSpec) -> SolutionSpace {
    let (diag, v) = diagonal_with_col_transform(m);
    solution_space_from_reduction(&diag, &v, m.cols(), g)
}

/// Specializes an already-computed reduction to `g`, so callers holding many
/// groups against one matrix pay for the reduction once.
pub(crate) fn solution_space_from_reduction(
    diag: &[BigInt],
    v: &IntMatrix,
    cols: usize,
    g: &GroupSpec,
) -> SolutionSpace {
    let gens = g
        .factors()
        .iter()
        .map(|&d| kernel_from_reduction(diag, v, cols, d))
        .collect();
    SolutionSpace { group: g.clone(), cols, gens }
}

/// Same residue logic as [`kernel_mod`], reusing an existing reduction so a
/// matrix factored once can serve every modulus.
fn kernel_from_reduction(diag: &[BigInt], v: &IntMatrix, n: usize, d: u64) -> Vec<Vec<BigInt>> {
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
        let stride = if dj.is_zero() {
            BigInt::from(1)
        } else {
            &dd / dj.gcd(&dd)
        };
        if stride == dd {
            continue;
        }
        gens.push(v.col(j).into_iter().map(|x| (x * &stride).mod_floor(&dd)).collect());
    }
    gens
}

impl SolutionSpace {
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// Length of the solution vectors (columns of the solved matrix).
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Generator list for one factor, as raw residue vectors.
    pub fn factor_generators(&self, factor: usize) -> &[Vec<BigInt>] {
        &self.gens[factor]
    }

    pub fn generator_count(&self) -> usize {
        self.gens.iter().map(Vec::len).sum()
    }

    /// Each generator as a full vector over the group: factor `i`'s k-th
    /// generator occupies coordinate `i`, all other coordinates zero.  Every
    /// one of these is itself a solution.
    pub fn generator_vectors(&self) -> Vec<Vec<GroupElement>> {
        let rank = self.group.rank();
        let mut out = Vec::new();
        for (factor, gens) in self.gens.iter().enumerate() {
            for g in gens {
                let vector = (0..self.cols)
                    .map(|col| {
                        let mut coords = vec![BigInt::zero(); rank];
                        coords[factor] = g[col].clone();
                        self.group.element(coords).expect("arity fixed")
                    })
                    .collect();
                out.push(vector);
            }
        }
        out
    }

    /// Assembles the solution with the given integer coefficients,
    /// `coeffs[factor][k]` weighting the k-th generator of factor `factor`.
    pub fn assemble(&self, coeffs: &[Vec<BigInt>]) -> Vec<GroupElement> {
        assert_eq!(coeffs.len(), self.group.rank(), "one coefficient list per factor");
        let rank = self.group.rank();
        (0..self.cols)
            .map(|col| {
                let coords = (0..rank)
                    .map(|factor| {
                        let cs = &coeffs[factor];
                        assert_eq!(cs.len(), self.gens[factor].len(), "one coefficient per generator");
                        cs.iter()
                            .zip(&self.gens[factor])
                            .map(|(c, g)| c * &g[col])
                            .sum()
                    })
                    .collect();
                self.group.element(coords).expect("arity is fixed by construction")
            })
            .collect()
    }

    /// Draws a deterministic random solution: one coefficient per generator,
    /// uniform in `[0, 2*max(d_i, 7)]` where `d_i` is the generator's factor
    /// order.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<GroupElement> {
        let coeffs = self
            .group
            .factors()
            .iter()
            .enumerate()
            .map(|(factor, &d)| {
                let bound = 2 * d.max(7);
                (0..self.gens[factor].len())
                    .map(|_| BigInt::from(rng.gen_range(0..=bound)))
                    .collect()
            })
            .collect::<Vec<_>>();
        self.assemble(&coeffs)
    }

    /// Exhaustive enumeration when the solution set is finite and no larger
    /// than `limit`; `None` otherwise.  The set is finite exactly when every
    /// infinite factor has an empty generator list.
    pub fn enumerate(&self, limit: usize) -> Option<SolutionEnumerator> {
        let mut per_factor = Vec::new();
        let mut total: u128 = 1;
        for (factor, &d) in self.group.factors().iter().enumerate() {
            if d == 0 {
                if !self.gens[factor].is_empty() {
                    return None; // an infinite direction
                }
                per_factor.push(vec![vec![0u64; self.cols]]);
                continue;
            }
            let elems = span_mod(&self.gens[factor], d, self.cols, limit)?;
            total = total.checked_mul(elems.len() as u128)?;
            if total > limit as u128 {
                return None;
            }
            per_factor.push(elems);
        }
        Some(SolutionEnumerator {
            group: self.group.clone(),
            cols: self.cols,
            per_factor,
            index: 0,
        })
    }
}

/// All elements of the subgroup of `(Z/d)^n` spanned by `gens`, or `None`
/// if the closure exceeds `limit`.  Sorted, so enumeration order is stable.
fn span_mod(gens: &[Vec<BigInt>], d: u64, n: usize, limit: usize) -> Option<Vec<Vec<u64>>> {
    let gens: Vec<Vec<u64>> = gens
        .iter()
        .map(|g| {
            g.iter()
                .map(|x| x.mod_floor(&BigInt::from(d)).to_u64().expect("residue fits"))
                .collect()
        })
        .collect();
    let mut seen = std::collections::BTreeSet::new();
    seen.insert(vec![0u64; n]);
    let mut frontier = vec![vec![0u64; n]];
    while let Some(x) = frontier.pop() {
        for g in &gens {
            let y: Vec<u64> = x.iter().zip(g).map(|(a, b)| (a + b) % d).collect();
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return None;
                }
                frontier.push(y);
            }
        }
    }
    Some(seen.into_iter().collect())
}

/// Iterator over every solution of a finite solution space.
pub struct SolutionEnumerator {
    group: GroupSpec,
    cols: usize,
    /// `per_factor[factor]` lists all residue vectors of that factor's
    /// solution subgroup.
    per_factor: Vec<Vec<Vec<u64>>>,
    index: u128,
}

impl SolutionEnumerator {
    pub fn total(&self) -> u128 {
        self.per_factor.iter().map(|v| v.len() as u128).product()
    }
}

impl Iterator for SolutionEnumerator {
    type Item = Vec<GroupElement>;

    fn next(&mut self) -> Option<Vec<GroupElement>> {
        if self.index >= self.total() {
            return None;
        }
        // mixed-radix digits of `index` select one subgroup element per factor
        let mut rest = self.index;
        let picks: Vec<usize> = self
            .per_factor
            .iter()
            .map(|elems| {
                let k = (rest % elems.len() as u128) as usize;
                rest /= elems.len() as u128;
                k
            })
            .collect();
        self.index += 1;
        let vector = (0..self.cols)
            .map(|col| {
                let coords = picks
                    .iter()
                    .enumerate()
                    .map(|(factor, &k)| BigInt::from(self.per_factor[factor][k][col]))
                    .collect();
                self.group.element(coords).expect("arity fixed")
            })
            .collect();
        Some(vector)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_mixed_group_system() {
        // 2x = 0 over Z/4 + Z/3: the Z/4 slice contributes multiples of 2,
        // the Z/3 slice only zero (2 is invertible mod 3).
        let m = IntMatrix::from_rows_i64(&[vec![2]]);
        let g: GroupSpec = "Z/4 x Z/3".parse().unwrap();
        let sol = solve_homogeneous(&m, &g);
        assert_eq!(sol.factor_generators(0), &[vec![BigInt::from(2)]]);
        assert!(sol.factor_generators(1).is_empty());

        let vecs = sol.generator_vectors();
        assert_eq!(vecs.len(), 1);
        assert_eq!(vecs[0][0], g.element_from_i64(&[2, 0]).unwrap());
    }

    #[test]
    fn enumeration_matches_the_subgroup_order() {
        let m = IntMatrix::from_rows_i64(&[vec![2]]);
        let g: GroupSpec = "Z/4 x Z/3".parse().unwrap();
        let sol = solve_homogeneous(&m, &g);
        let all: Vec<_> = sol.enumerate(100).unwrap().collect();
        // {0, 2} in the Z/4 slice, {0} in the Z/3 slice
        assert_eq!(all.len(), 2);
        for v in &all {
            let x = &v[0];
            assert!(x.scale_i64(2).is_zero());
        }
    }

    #[test]
    fn infinite_spaces_refuse_enumeration() {
        let m = IntMatrix::from_rows_i64(&[vec![0]]);
        let g: GroupSpec = "Z".parse().unwrap();
        let sol = solve_homogeneous(&m, &g);
        assert_eq!(sol.generator_count(), 1);
        assert!(sol.enumerate(1000).is_none());
    }

    #[test]
    fn sampling_is_deterministic_and_solves() {
        use rand::SeedableRng;
        let m = IntMatrix::from_rows_i64(&[vec![2, 4], vec![0, 2]]);
        let g: GroupSpec = "Z/8 x Z/6".parse().unwrap();
        let sol = solve_homogeneous(&m, &g);
        let a = sol.sample(&mut rand_chacha::ChaCha8Rng::seed_from_u64(5));
        let b = sol.sample(&mut rand_chacha::ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
        // verify M a = 0 over the group
        for i in 0..m.rows() {
            let mut acc = g.zero();
            for (j, aj) in a.iter().enumerate() {
                acc = &acc + &aj.scale(m.get(i, j));
            }
            assert!(acc.is_zero());
        }
    }
}
