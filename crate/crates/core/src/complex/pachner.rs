//! Bistellar (Pachner) moves.
//!
//! Both moves preserve the underlying manifold and the coherent orientation,
//! so they generate arbitrarily large test triangulations from the builtin
//! seeds.  The 1-4 move stars a tetrahedron from a fresh interior vertex;
//! the 2-3 move replaces two tetrahedra sharing a face by three around the
//! new edge joining their apexes.

use super::{canonical_cycle, Label, Tet, Triangulation};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

impl Triangulation {
    /// 1-4 move: subdivide tetrahedron `idx` by coning its boundary from a
    /// new vertex.  Replacing the vertex at position `i` by the new label
    /// keeps the outer face opposite position `i` with its original
    /// orientation, so the four replacements orient coherently.
    pub fn pachner_14(&self, idx: usize, new_label: &str) -> Result<Triangulation> {
        if idx >= self.tets.len() {
            return Err(Error::NoSuchTetrahedron(idx));
        }
        if new_label.is_empty() {
            return Err(Error::EmptyLabel);
        }
        if self.labels().contains(new_label) {
            return Err(Error::LabelInUse(new_label.to_string()));
        }
        let old = &self.tets[idx];
        let mut replacements: Vec<Tet> = Vec::with_capacity(4);
        for i in 0..4 {
            let mut t = old.clone();
            t[i] = new_label.to_string();
            replacements.push(t);
        }
        let mut tets = self.tets.clone();
        tets.splice(idx..=idx, replacements);
        Ok(Triangulation::new(tets))
    }

    /// 2-3 move across the interior face spanned by `face` (in any order).
    ///
    /// With apexes `u`, `w` and the shared face oriented `(p, q, r)` as seen
    /// outward from `u`'s tetrahedron, the replacements are
    /// `(u, w, p, q)`, `(u, w, q, r)`, `(u, w, r, p)`.  Refuses when the
    /// apexes already span an edge, since the result would pinch it.
    pub fn pachner_23(&self, face: &[Label; 3]) -> Result<Triangulation> {
        let refs: Vec<&str> = face.iter().map(Label::as_str).collect();
        let not_a_face = || Error::NoSuchFace(face[0].clone(), face[1].clone(), face[2].clone());
        if refs[0] == refs[1] || refs[0] == refs[2] || refs[1] == refs[2] {
            return Err(not_a_face());
        }
        let owners = self.tets_containing(&refs);
        if owners.len() != 2 {
            return Err(not_a_face());
        }
        let (i1, i2) = (owners[0], owners[1]);
        let apex = |ti: usize| -> Label {
            self.tets[ti]
                .iter()
                .find(|v| !face.contains(v))
                .expect("a tetrahedron has a vertex off any of its faces")
                .clone()
        };
        let (u, w) = (apex(i1), apex(i2));
        if u == w {
            return Err(Error::PreconditionFailed(format!(
                "tetrahedra {i1} and {i2} share face and apex {u:?}; input is not simplicial"
            )));
        }
        if self.has_edge(&u, &w) {
            return Err(Error::ApexesAdjacent(u, w));
        }
        // orientation of the shared face as the outward face of tet i1
        let outward = self
            .oriented_faces(i1)
            .into_iter()
            .find(|f| {
                let mut s = f.clone();
                s.sort();
                let mut key = face.clone();
                key.sort();
                s == key
            })
            .expect("shared face is a face of its owner");
        let [p, q, r] = canonical_cycle(&outward);
        let mk = |x: &Label, y: &Label| -> Tet { [u.clone(), w.clone(), x.clone(), y.clone()] };
        let replacements = vec![mk(&p, &q), mk(&q, &r), mk(&r, &p)];
        let (lo, hi) = (i1.min(i2), i1.max(i2));
        let mut tets = self.tets.clone();
        tets.remove(hi);
        tets.splice(lo..=lo, replacements);
        Ok(Triangulation::new(tets))
    }

    /// Interior faces on which a 2-3 move is currently legal, sorted.
    pub fn legal_23_faces(&self) -> Vec<[Label; 3]> {
        self.triangles()
            .into_iter()
            .filter(|face| {
                let refs: Vec<&str> = face.iter().map(Label::as_str).collect();
                let owners = self.tets_containing(&refs);
                if owners.len() != 2 {
                    return false;
                }
                let apex = |ti: usize| {
                    self.tets[ti].iter().find(|v| !face.contains(v)).expect("apex exists")
                };
                let (u, w) = (apex(owners[0]), apex(owners[1]));
                u != w && !self.has_edge(u, w)
            })
            .collect()
    }
}

/// A deterministic random walk of exactly `moves` Pachner moves.
///
/// Each step flips a coin between move types; when no 2-3 move is legal the
/// step falls back to 1-4.  Fresh vertices are labelled `p0, p1, ...`
/// (skipping collisions), so walked triangulations stay readable.
pub fn random_walk(start: &Triangulation, seed: u64, moves: usize) -> Triangulation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = start.clone();
    let mut fresh = 0usize;
    for _ in 0..moves {
        let candidates = t.legal_23_faces();
        let do_23 = !candidates.is_empty() && rng.gen_bool(0.5);
        if do_23 {
            let face = &candidates[rng.gen_range(0..candidates.len())];
            t = t.pachner_23(face).expect("face was checked legal");
        } else {
            let idx = rng.gen_range(0..t.len());
            let label = loop {
                let candidate = format!("p{fresh}");
                fresh += 1;
                if !t.labels().contains(candidate.as_str()) {
                    break candidate;
                }
            };
            t = t.pachner_14(idx, &label).expect("fresh label and valid index");
        }
    }
    t
}
