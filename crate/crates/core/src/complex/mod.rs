//! Closed oriented triangulated 3-manifolds.
//!
//! A triangulation is a list of tetrahedra, each an ordered 4-tuple of
//! string labels.  The tuple order *is* the orientation: the face opposite
//! position `i` carries the sign `(-1)^i` in the boundary, and the complex
//! is coherently oriented when every oriented face occurs exactly once and
//! its orientation reversal occurs exactly once (in another tetrahedron).
//!
//! Only closed complexes are accepted as valid: every face must be shared
//! by exactly two tetrahedra, every edge must have a circular star, and
//! every vertex link must be a 2-sphere (connected, Euler characteristic 2 —
//! enough, given the closed pseudo-manifold checks before it).

mod pachner;
mod star;

pub use pachner::random_walk;
pub use star::{EdgeStar, StarStep, VertexLink};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub type Label = String;

/// An ordered, oriented tetrahedron.
pub type Tet = [Label; 4];

#[derive(Clone, PartialEq, Eq)]
pub struct Triangulation {
    tets: Vec<Tet>,
}

impl Triangulation {
    pub fn new(tets: Vec<Tet>) -> Triangulation {
        Triangulation { tets }
    }

    pub fn tets(&self) -> &[Tet] {
        &self.tets
    }

    pub fn len(&self) -> usize {
        self.tets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tets.is_empty()
    }

    /// All vertex labels, sorted.
    pub fn labels(&self) -> BTreeSet<Label> {
        self.tets.iter().flatten().cloned().collect()
    }

    /// All edges as sorted label pairs.
    pub fn edges(&self) -> BTreeSet<(Label, Label)> {
        let mut out = BTreeSet::new();
        for t in &self.tets {
            for i in 0..4 {
                for j in i + 1..4 {
                    out.insert(sorted_pair(&t[i], &t[j]));
                }
            }
        }
        out
    }

    /// All triangles as sorted label triples.
    pub fn triangles(&self) -> BTreeSet<[Label; 3]> {
        let mut out = BTreeSet::new();
        for t in &self.tets {
            for skip in 0..4 {
                let mut tri: Vec<Label> = (0..4).filter(|&i| i != skip).map(|i| t[i].clone()).collect();
                tri.sort();
                out.insert([tri[0].clone(), tri[1].clone(), tri[2].clone()]);
            }
        }
        out
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        self.tets.iter().any(|t| t.iter().any(|v| v == a) && t.iter().any(|v| v == b))
    }

    /// Indices of tetrahedra containing every one of `verts`.
    pub fn tets_containing(&self, verts: &[&str]) -> Vec<usize> {
        self.tets
            .iter()
            .enumerate()
            .filter(|(_, t)| verts.iter().all(|v| t.iter().any(|w| w == v)))
            .map(|(i, _)| i)
            .collect()
    }

    /// The four outward faces of tetrahedron `idx` with the boundary sign
    /// folded into the orientation: face opposite position `i` is reversed
    /// when `i` is odd.
    pub fn oriented_faces(&self, idx: usize) -> [[Label; 3]; 4] {
        oriented_faces_of(&self.tets[idx])
    }

    /// Checks every structural invariant and reports all violations.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        // labels and simpliciality
        let mut seen_sets: BTreeMap<Vec<Label>, usize> = BTreeMap::new();
        for (i, t) in self.tets.iter().enumerate() {
            if t.iter().any(String::is_empty) {
                violations.push(Violation::EmptyLabel { tet: i });
            }
            let set: BTreeSet<&Label> = t.iter().collect();
            if set.len() != 4 {
                violations.push(Violation::RepeatedVertex { tet: i });
                continue;
            }
            let key: Vec<Label> = set.into_iter().cloned().collect();
            if let Some(&first) = seen_sets.get(&key) {
                violations.push(Violation::DuplicateTetrahedron { first, second: i });
            } else {
                seen_sets.insert(key, i);
            }
        }
        if !violations.is_empty() {
            // face/link analysis assumes simpliciality; stop at the first layer
            return ValidationReport { violations };
        }

        // closedness and coherent orientation: pair oriented faces
        let mut by_triple: BTreeMap<[Label; 3], Vec<[Label; 3]>> = BTreeMap::new();
        for i in 0..self.tets.len() {
            for face in self.oriented_faces(i) {
                let mut key: [Label; 3] = face.clone();
                key.sort();
                by_triple.entry(key).or_default().push(canonical_cycle(&face));
            }
        }
        for (key, faces) in &by_triple {
            match faces.len() {
                2 => {
                    if faces[0] == faces[1] {
                        violations.push(Violation::SameOrientationPair { face: key.clone() });
                    }
                    // distinct canonical cycles on 3 labels are automatically
                    // mutual reversals
                }
                1 => violations.push(Violation::NotClosed { face: key.clone() }),
                n => violations.push(Violation::OverusedFace { face: key.clone(), count: n }),
            }
        }
        if !violations.is_empty() {
            return ValidationReport { violations };
        }

        // every edge star must close into a single cycle
        for (a, b) in self.edges() {
            if let Err(e) = self.edge_star(&a, &b) {
                violations.push(Violation::BrokenEdgeStar { edge: (a, b), reason: e.to_string() });
            }
        }

        // every vertex link must be a connected surface with chi = 2
        for v in self.labels() {
            let link = self.vertex_link(&v).expect("vertex taken from labels()");
            if !link.is_connected() {
                violations.push(Violation::DisconnectedLink { vertex: v.clone() });
            } else if link.euler_characteristic() != 2 {
                violations.push(Violation::NonSphereLink {
                    vertex: v.clone(),
                    euler: link.euler_characteristic(),
                });
            }
        }

        ValidationReport { violations }
    }

    /// The boundary of the 4-simplex: five tetrahedra on five vertices, the
    /// smallest closed orientable 3-manifold triangulation (a 3-sphere).
    pub fn boundary_4_simplex() -> Triangulation {
        let v: Vec<Label> = (0..5).map(|i| i.to_string()).collect();
        let mut tets = Vec::new();
        for skip in 0..5 {
            let mut t: Vec<Label> = (0..5).filter(|&i| i != skip).map(|i| v[i].clone()).collect();
            if skip % 2 == 1 {
                t.swap(2, 3); // fold the boundary sign (-1)^skip into the order
            }
            tets.push([t[0].clone(), t[1].clone(), t[2].clone(), t[3].clone()]);
        }
        Triangulation::new(tets)
    }

    /// The boundary of the 4-dimensional cross-polytope: 16 tetrahedra on 8
    /// vertices (also a 3-sphere), with every edge of valence 4.  Vertices
    /// are the signed axes `a+..d-`; each tetrahedron picks one sign per
    /// axis, ordered so that all 16 orient coherently.
    pub fn cross_polytope_boundary() -> Triangulation {
        let name = |axis: usize, sign: usize| -> Label {
            format!("{}{}", b"abcd"[axis] as char, ['+', '-'][sign])
        };
        let mut tets = Vec::new();
        for bits in 0..16u32 {
            let s: Vec<usize> = (0..4).map(|ax| ((bits >> ax) & 1) as usize).collect();
            let mut t = [name(0, s[0]), name(1, s[1]), name(2, s[2]), name(3, s[3])];
            // det(+-e1, ..) = product of the signs; swap once when negative
            let parity = s.iter().filter(|&&x| x == 1).count() % 2;
            if parity == 1 {
                t.swap(0, 1);
            }
            tets.push(t);
        }
        Triangulation::new(tets)
    }
}

/// Sorted pair, for unordered-edge keys.
pub fn sorted_pair(a: &str, b: &str) -> (Label, Label) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

pub(crate) fn oriented_faces_of(t: &Tet) -> [[Label; 3]; 4] {
    let mut out: Vec<[Label; 3]> = Vec::with_capacity(4);
    for skip in 0..4 {
        let mut f: Vec<Label> = (0..4).filter(|&i| i != skip).map(|i| t[i].clone()).collect();
        if skip % 2 == 1 {
            f.swap(1, 2);
        }
        out.push([f[0].clone(), f[1].clone(), f[2].clone()]);
    }
    out.try_into().unwrap()
}

/// Rotates an oriented triangle so its least label comes first; two oriented
/// triangles are equal as cycles iff their canonical forms are equal.
pub(crate) fn canonical_cycle(f: &[Label; 3]) -> [Label; 3] {
    let least = (0..3).min_by_key(|&i| &f[i]).unwrap();
    [
        f[least].clone(),
        f[(least + 1) % 3].clone(),
        f[(least + 2) % 3].clone(),
    ]
}

/// Parity of the permutation taking `from` to `to` (both must be
/// arrangements of the same four distinct labels): true for even.
pub(crate) fn even_permutation(from: &Tet, to: &[&Label; 4]) -> bool {
    let perm: Vec<usize> = to
        .iter()
        .map(|l| from.iter().position(|x| x == *l).expect("label present"))
        .collect();
    let mut inversions = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EmptyLabel { tet: usize },
    RepeatedVertex { tet: usize },
    DuplicateTetrahedron { first: usize, second: usize },
    NotClosed { face: [Label; 3] },
    OverusedFace { face: [Label; 3], count: usize },
    SameOrientationPair { face: [Label; 3] },
    BrokenEdgeStar { edge: (Label, Label), reason: String },
    DisconnectedLink { vertex: Label },
    NonSphereLink { vertex: Label, euler: i64 },
}

impl Violation {
    /// Stable, greppable tag for the violation class; each report line
    /// starts with one.
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::EmptyLabel { .. } => "EmptyLabel",
            Violation::RepeatedVertex { .. } => "RepeatedVertex",
            Violation::DuplicateTetrahedron { .. } => "DuplicateTetrahedron",
            Violation::NotClosed { .. } => "NotClosed",
            Violation::OverusedFace { .. } => "OverusedFace",
            Violation::SameOrientationPair { .. } => "SameOrientationPair",
            Violation::BrokenEdgeStar { .. } => "BrokenEdgeStar",
            Violation::DisconnectedLink { .. } => "DisconnectedLink",
            Violation::NonSphereLink { .. } => "NonSphereLink",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.kind())?;
        match self {
            Violation::EmptyLabel { tet } => write!(f, "tetrahedron {tet} has an empty label"),
            Violation::RepeatedVertex { tet } => {
                write!(f, "tetrahedron {tet} repeats a vertex (not simplicial)")
            }
            Violation::DuplicateTetrahedron { first, second } => write!(
                f,
                "tetrahedra {first} and {second} span the same vertices (not simplicial)"
            ),
            Violation::NotClosed { face } => write!(
                f,
                "face {{{}, {}, {}}} belongs to only one tetrahedron",
                face[0], face[1], face[2]
            ),
            Violation::OverusedFace { face, count } => write!(
                f,
                "face {{{}, {}, {}}} belongs to {count} tetrahedra (not a manifold)",
                face[0], face[1], face[2]
            ),
            Violation::SameOrientationPair { face } => write!(
                f,
                "face {{{}, {}, {}}} is induced twice with the same orientation (incoherent)",
                face[0], face[1], face[2]
            ),
            Violation::BrokenEdgeStar { edge, reason } => {
                write!(f, "edge {{{}, {}}}: {reason}", edge.0, edge.1)
            }
            Violation::DisconnectedLink { vertex } => {
                write!(f, "link of vertex {vertex:?} is disconnected")
            }
            Violation::NonSphereLink { vertex, euler } => write!(
                f,
                "link of vertex {vertex:?} has Euler characteristic {euler}, expected 2"
            ),
        }
    }
}

/// Everything [`Triangulation::validate`] found wrong; empty means valid.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Triangulation [")?;
        for t in &self.tets {
            writeln!(f, "  ({}, {}, {}, {})", t[0], t[1], t[2], t[3])?;
        }
        write!(f, "]")
    }
}
