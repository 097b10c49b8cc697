//! The per-tetrahedron obstruction class and its global sum.
//!
//! A vertex-valid tetrahedron with order `(a, b, c, d)` contributes
//!
//! ```text
//! psi = 4 (k_ab ^ k_ac) + k_ad ^ k_ad + k_bc ^ k_bc
//! ```
//!
//! in the antisymmetric square of the coefficient group.  The class does not
//! depend on which even reordering of the tetrahedron is used — a fact that
//! is itself a tested property (see [`psi_representative_check`]) — so the
//! stored orientation of each tetrahedron serves as the representative.  The
//! headline statement of the library is that the sum of these classes over a
//! closed oriented triangulation vanishes for every angled structure; see
//! [`total_invariant`], and the proof replay in [`crate::trace`].

use crate::angles::AngleStructure;
use crate::complex::Triangulation;
use crate::error::{Error, Result};
use crate::exterior::{wedge, Wedge2Element};
use std::fmt;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// The invariant of one structure on one triangulation: every summand and
/// the verdict.
#[derive(Debug, Clone)]
pub struct PsiReport {
    pub per_tet: Vec<Wedge2Element>,
    pub total: Wedge2Element,
    pub holds: bool,
}

impl fmt::Display for PsiReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, psi) in self.per_tet.iter().enumerate() {
            writeln!(f, "tet {i}: {psi}")?;
        }
        write!(f, "TOTAL: {}", self.total)
    }
}

/// The class of tetrahedron `idx` with an explicit vertex order.
///
/// `order` must be a permutation of the tetrahedron's labels, and the
/// tetrahedron must pass its vertex equations (without them the class would
/// depend on the chosen representative).
pub fn psi_tetra_in_order(
    s: &AngleStructure,
    idx: usize,
    order: [&str; 4],
) -> Result<Wedge2Element> {
    check_order(s, idx, &order)?;
    if !s.vertex_valid_at(idx) {
        return Err(Error::PreconditionFailed(format!(
            "tetrahedron {idx} fails its vertex equations"
        )));
    }
    Ok(psi_raw(s, idx, &order))
}

/// The class of tetrahedron `idx` in its stored order in `t`.
pub fn psi_tetra(t: &Triangulation, s: &AngleStructure, idx: usize) -> Result<Wedge2Element> {
    s.matches(t)?;
    let tet = t.tets().get(idx).ok_or(Error::NoSuchTetrahedron(idx))?;
    psi_tetra_in_order(s, idx, [tet[0].as_str(), tet[1].as_str(), tet[2].as_str(), tet[3].as_str()])
}

/// The formula with no precondition checks; callers guarantee `order` spans
/// the tetrahedron.
fn psi_raw(s: &AngleStructure, idx: usize, order: &[&str; 4]) -> Wedge2Element {
    let [a, b, c, d] = *order;
    let kab = s.value(idx, a, b);
    let kac = s.value(idx, a, c);
    let kad = s.value(idx, a, d);
    let kbc = s.value(idx, b, c);
    let quad = wedge(kab, kac).expect("one structure, one group").scale_i64(4);
    let diag1 = wedge(kad, kad).expect("one structure, one group");
    let diag2 = wedge(kbc, kbc).expect("one structure, one group");
    &(&quad + &diag1) + &diag2
}

fn check_order(s: &AngleStructure, idx: usize, order: &[&str; 4]) -> Result<()> {
    if idx >= s.len() {
        return Err(Error::NoSuchTetrahedron(idx));
    }
    let mut sorted: Vec<&str> = order.to_vec();
    sorted.sort_unstable();
    if !sorted.iter().zip(s.labels_of(idx)).all(|(x, l)| *x == l.as_str()) {
        return Err(Error::ShapeMismatch(format!(
            "order {order:?} does not span tetrahedron {idx} ({:?})",
            s.labels_of(idx)
        )));
    }
    Ok(())
}

/// Sums the class over the whole triangulation.
///
/// Refuses — rather than reporting a spurious nonzero — when `t` is invalid
/// or `s` is not angled, because the vanishing statement assumes both.
pub fn total_invariant(t: &Triangulation, s: &AngleStructure) -> Result<PsiReport> {
    let report = t.validate();
    if !report.is_valid() {
        return Err(Error::PreconditionFailed(format!(
            "triangulation is invalid: {report}"
        )));
    }
    s.matches(t)?;
    let vertex = s.check_vertex_equations();
    if !vertex.is_ok() {
        return Err(Error::PreconditionFailed(format!(
            "vertex equations fail: {vertex}"
        )));
    }
    let edge_failures = s.edge_equation_failures(t)?;
    if let Some(first) = edge_failures.first() {
        return Err(Error::PreconditionFailed(format!(
            "structure is not angled: {first}"
        )));
    }

    let tets = t.tets();
    let class_of = |i: usize| {
        let tet = &tets[i];
        psi_raw(s, i, &[tet[0].as_str(), tet[1].as_str(), tet[2].as_str(), tet[3].as_str()])
    };
    #[cfg(feature = "parallel")]
    let per_tet: Vec<Wedge2Element> = (0..tets.len()).into_par_iter().map(class_of).collect();
    #[cfg(not(feature = "parallel"))]
    let per_tet: Vec<Wedge2Element> = (0..tets.len()).map(class_of).collect();

    let total = per_tet
        .iter()
        .fold(Wedge2Element::zero(s.group()), |acc, x| &acc + x);
    let holds = total.is_zero();
    Ok(PsiReport { per_tet, total, holds })
}

/// All 24 vertex orders of tetrahedron `idx`, compared against the sorted
/// representative: even reorderings must agree, odd ones must negate.
///
/// Runs regardless of the vertex equations (and will typically return
/// `false` without them, which is exactly their role).
pub fn psi_representative_check(s: &AngleStructure, idx: usize) -> Result<bool> {
    if idx >= s.len() {
        return Err(Error::NoSuchTetrahedron(idx));
    }
    let labels = s.labels_of(idx);
    let base = psi_raw(s, idx, &[&labels[0], &labels[1], &labels[2], &labels[3]]);
    let negated = -&base;
    for (perm, even) in permutations4() {
        let order = [
            labels[perm[0]].as_str(),
            labels[perm[1]].as_str(),
            labels[perm[2]].as_str(),
            labels[perm[3]].as_str(),
        ];
        let value = psi_raw(s, idx, &order);
        let expected = if even { &base } else { &negated };
        if &value != expected {
            return Ok(false);
        }
    }
    Ok(true)
}

/// When every group factor is odd, the diagonal classes vanish and the
/// invariant collapses to `4 (k_ab ^ k_ac)`; since 4 is then invertible,
/// the wedge is recoverable from psi.  Returns whether both directions of
/// that collapse hold on tetrahedron `idx`.
pub fn odd_group_specialization(s: &AngleStructure, idx: usize) -> Result<bool> {
    if s.group().has_even_or_infinite_part() {
        return Err(Error::GroupHasEvenTorsion(s.group().clone()));
    }
    if idx >= s.len() {
        return Err(Error::NoSuchTetrahedron(idx));
    }
    if !s.vertex_valid_at(idx) {
        return Err(Error::PreconditionFailed(format!(
            "tetrahedron {idx} fails its vertex equations"
        )));
    }
    let [a, b, c, d] = s.labels_of(idx).clone();
    let psi = psi_raw(s, idx, &[a.as_str(), b.as_str(), c.as_str(), d.as_str()]);
    let w = wedge(s.value(idx, &a, &b), s.value(idx, &a, &c)).expect("one structure, one group");
    Ok(psi == w.scale_i64(4) && w == psi.scale_by_inverse_of(4)?)
}

/// The 24 permutations of four positions, tagged with their parity.
pub(crate) fn permutations4() -> Vec<([usize; 4], bool)> {
    let mut out = Vec::with_capacity(24);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let p = [i, j, k, l];
                    let mut seen = [false; 4];
                    for &x in &p {
                        seen[x] = true;
                    }
                    if seen != [true; 4] {
                        continue;
                    }
                    let inversions = (0..4)
                        .flat_map(|x| (x + 1..4).map(move |y| (x, y)))
                        .filter(|&(x, y)| p[x] > p[y])
                        .count();
                    out.push((p, inversions % 2 == 0));
                }
            }
        }
    }
    out
}
