//! Angle structures: one coefficient per tetrahedron edge.
//!
//! A structure assigns to each tetrahedron a symmetric system `k_xy` over
//! its six unordered vertex pairs.  It is *vertex-valid* when within every
//! tetrahedron each vertex `x` satisfies `k_xy + k_xz + k_xw = 0` over the
//! other three vertices.  Summing pairs of these equations forces the
//! opposite-pair relations
//!
//! ```text
//! k_ab - k_cd = k_ac - k_bd = k_bc - k_ad,   2 (k_ab - k_cd) = 0,
//! ```
//!
//! which the checker re-derives as a self-test.  The structure is *angled*
//! when additionally the values around every edge of the complex sum to
//! zero.  Both conditions together are one homogeneous linear system whose
//! 0/1 matrix depends only on the triangulation, so it is factored once and
//! reused across coefficient groups.

use crate::abelian::{solution_space_from_reduction, GroupElement, GroupSpec, IntMatrix, SolutionSpace};
use crate::abelian::diagonal_with_col_transform;
use crate::complex::{sorted_pair, Label, Triangulation};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt;

/// Per-tetrahedron symmetric edge coefficients over one group.
#[derive(Clone, PartialEq, Eq)]
pub struct AngleStructure {
    group: GroupSpec,
    /// One map per tetrahedron, keyed by sorted vertex pairs; always exactly
    /// the six pairs of four labels.
    tets: Vec<BTreeMap<(Label, Label), GroupElement>>,
    /// The four labels of each tetrahedron, sorted (derived from the keys).
    labels: Vec<[Label; 4]>,
}

impl AngleStructure {
    /// Builds a structure, checking that every tetrahedron entry covers the
    /// six pairs of exactly four labels and that all values share `group`.
    pub fn new(
        group: GroupSpec,
        tets: Vec<BTreeMap<(Label, Label), GroupElement>>,
    ) -> Result<AngleStructure> {
        let mut labels = Vec::with_capacity(tets.len());
        for (i, k) in tets.iter().enumerate() {
            let mut verts: Vec<&Label> = Vec::new();
            for ((x, y), v) in k {
                if x >= y {
                    return Err(Error::ShapeMismatch(format!(
                        "tetrahedron {i}: pair ({x:?}, {y:?}) is not sorted"
                    )));
                }
                if v.group() != &group {
                    return Err(Error::MismatchedGroup(group.clone(), v.group().clone()));
                }
                for l in [x, y] {
                    if !verts.contains(&l) {
                        verts.push(l);
                    }
                }
            }
            if verts.len() != 4 || k.len() != 6 {
                return Err(Error::ShapeMismatch(format!(
                    "tetrahedron {i}: expected the 6 pairs of 4 labels, got {} pairs of {} labels",
                    k.len(),
                    verts.len()
                )));
            }
            let mut sorted: Vec<Label> = verts.into_iter().cloned().collect();
            sorted.sort();
            for a in 0..4 {
                for b in a + 1..4 {
                    if !k.contains_key(&(sorted[a].clone(), sorted[b].clone())) {
                        return Err(Error::ShapeMismatch(format!(
                            "tetrahedron {i}: missing pair ({:?}, {:?})",
                            sorted[a], sorted[b]
                        )));
                    }
                }
            }
            labels.push([
                sorted[0].clone(),
                sorted[1].clone(),
                sorted[2].clone(),
                sorted[3].clone(),
            ]);
        }
        Ok(AngleStructure { group, tets, labels })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.tets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tets.is_empty()
    }

    /// Sorted labels of tetrahedron `idx`.
    pub fn labels_of(&self, idx: usize) -> &[Label; 4] {
        &self.labels[idx]
    }

    pub fn pairs_of(&self, idx: usize) -> impl Iterator<Item = (&(Label, Label), &GroupElement)> {
        self.tets[idx].iter()
    }

    /// The coefficient `k_xy` of tetrahedron `idx`; panics when the pair is
    /// not an edge of that tetrahedron (see [`AngleStructure::get`]).
    pub fn value(&self, idx: usize, x: &str, y: &str) -> &GroupElement {
        self.get(idx, x, y).expect("pair belongs to the tetrahedron")
    }

    pub fn get(&self, idx: usize, x: &str, y: &str) -> Result<&GroupElement> {
        self.tets
            .get(idx)
            .ok_or(Error::NoSuchTetrahedron(idx))?
            .get(&sorted_pair(x, y))
            .ok_or_else(|| Error::NoSuchEdge(x.to_string(), y.to_string()))
    }

    /// Checks that the structure's tetrahedra align with `t` index by index.
    pub fn matches(&self, t: &Triangulation) -> Result<()> {
        if self.len() != t.len() {
            return Err(Error::ShapeMismatch(format!(
                "structure has {} tetrahedra, triangulation has {}",
                self.len(),
                t.len()
            )));
        }
        for (i, tet) in t.tets().iter().enumerate() {
            let mut sorted: Vec<&Label> = tet.iter().collect();
            sorted.sort();
            if !sorted.iter().zip(self.labels[i].iter()).all(|(a, b)| *a == b) {
                return Err(Error::ShapeMismatch(format!(
                    "tetrahedron {i}: structure spans {:?}, triangulation spans {:?}",
                    self.labels[i], tet
                )));
            }
        }
        Ok(())
    }

    /// All vertex equations, plus the derived opposite-pair relations on
    /// every tetrahedron that passes them (those can only fail on an
    /// internal arithmetic bug, so a failure is loudly labelled).
    pub fn check_vertex_equations(&self) -> AngleCheck {
        let mut violations = Vec::new();
        for idx in 0..self.len() {
            let [a, b, c, d] = &self.labels[idx];
            let mut tet_ok = true;
            for x in [a, b, c, d] {
                let others = [a, b, c, d].into_iter().filter(|y| *y != x);
                let mut sum = self.group.zero();
                for y in others {
                    sum = &sum + self.value(idx, x, y);
                }
                if !sum.is_zero() {
                    tet_ok = false;
                    violations.push(AngleViolation::VertexSum {
                        tet: idx,
                        vertex: x.clone(),
                        sum,
                    });
                }
            }
            if tet_ok {
                // derived relations; see the module header
                let kab = self.value(idx, a, b);
                let kcd = self.value(idx, c, d);
                let kac = self.value(idx, a, c);
                let kbd = self.value(idx, b, d);
                let kbc = self.value(idx, b, c);
                let kad = self.value(idx, a, d);
                let d1 = kab - kcd;
                let d2 = kac - kbd;
                let d3 = kbc - kad;
                if d1 != d3 || d2 != d3 || !d1.scale_i64(2).is_zero() {
                    violations.push(AngleViolation::OppositePairs {
                        tet: idx,
                        detail: format!(
                            "k_ab-k_cd={d1}, k_ac-k_bd={d2}, k_bc-k_ad={d3} (internal bug: these must coincide and be 2-torsion)"
                        ),
                    });
                }
            }
        }
        AngleCheck { violations }
    }

    /// True when tetrahedron `idx` passes its four vertex equations.
    pub fn vertex_valid_at(&self, idx: usize) -> bool {
        let [a, b, c, d] = &self.labels[idx];
        [a, b, c, d].into_iter().all(|x| {
            let mut sum = self.group.zero();
            for y in [a, b, c, d] {
                if y != x {
                    sum = &sum + self.value(idx, x, y);
                }
            }
            sum.is_zero()
        })
    }

    /// Sum of the structure around each edge class of `t`, in sorted edge
    /// order.
    pub fn edge_sums(&self, t: &Triangulation) -> Result<Vec<((Label, Label), GroupElement)>> {
        self.matches(t)?;
        let mut sums: BTreeMap<(Label, Label), GroupElement> = BTreeMap::new();
        for k in &self.tets {
            for (pair, v) in k {
                sums.entry(pair.clone())
                    .and_modify(|acc| *acc = &*acc + v)
                    .or_insert_with(|| v.clone());
            }
        }
        Ok(sums.into_iter().collect())
    }

    /// Edge equations alone, without the vertex precondition; used where a
    /// complete failure report is wanted.
    pub fn edge_equation_failures(&self, t: &Triangulation) -> Result<Vec<AngleViolation>> {
        Ok(self
            .edge_sums(t)?
            .into_iter()
            .filter(|(_, sum)| !sum.is_zero())
            .map(|(edge, sum)| AngleViolation::EdgeSum { edge, sum })
            .collect())
    }

    /// Edge equations, requiring vertex validity first.
    pub fn check_edge_equations(&self, t: &Triangulation) -> Result<AngleCheck> {
        let vertex = self.check_vertex_equations();
        if !vertex.is_ok() {
            return Err(Error::PreconditionFailed(
                "edge equations assume the vertex equations hold".into(),
            ));
        }
        Ok(AngleCheck { violations: self.edge_equation_failures(t)? })
    }

    /// Vertex and edge equations together.
    pub fn is_angled(&self, t: &Triangulation) -> Result<bool> {
        if !self.check_vertex_equations().is_ok() {
            return Ok(false);
        }
        Ok(self.edge_equation_failures(t)?.is_empty())
    }

    /// A copy with `delta` added to one coefficient — the negative control
    /// for the checkers.
    pub fn perturbed(&self, idx: usize, x: &str, y: &str, delta: &GroupElement) -> Result<AngleStructure> {
        let mut out = self.clone();
        let slot = out
            .tets
            .get_mut(idx)
            .ok_or(Error::NoSuchTetrahedron(idx))?
            .get_mut(&sorted_pair(x, y))
            .ok_or_else(|| Error::NoSuchEdge(x.to_string(), y.to_string()))?;
        *slot = &*slot + delta;
        Ok(out)
    }
}

impl fmt::Debug for AngleStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "AngleStructure over {} [", self.group)?;
        for (i, k) in self.tets.iter().enumerate() {
            write!(f, "  tet {i}:")?;
            for ((x, y), v) in k {
                write!(f, " k({x},{y})={v}")?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone)]
pub enum AngleViolation {
    VertexSum { tet: usize, vertex: Label, sum: GroupElement },
    OppositePairs { tet: usize, detail: String },
    EdgeSum { edge: (Label, Label), sum: GroupElement },
}

impl fmt::Display for AngleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AngleViolation::VertexSum { tet, vertex, sum } => {
                write!(f, "tetrahedron {tet}, vertex {vertex:?}: sum {sum} != 0")
            }
            AngleViolation::OppositePairs { tet, detail } => {
                write!(f, "tetrahedron {tet}: opposite-pair relations broken: {detail}")
            }
            AngleViolation::EdgeSum { edge, sum } => {
                write!(f, "edge {{{}, {}}}: sum {sum} != 0", edge.0, edge.1)
            }
        }
    }
}

/// Outcome of an equation check; empty violations means the check passed.
#[derive(Debug, Clone)]
pub struct AngleCheck {
    pub violations: Vec<AngleViolation>,
}

impl AngleCheck {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for AngleCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
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

/// One column of the constraint matrix: a `(tetrahedron, vertex pair)` slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnKey {
    pub tet: usize,
    pub pair: (Label, Label),
}

/// The combined vertex + edge system of a triangulation as a 0/1 matrix.
///
/// Columns are the `(tetrahedron, sorted pair)` slots, tetrahedra in file
/// order and the six pairs of each in lexicographic order.  Rows are the
/// four vertex equations of every tetrahedron (vertices sorted) followed by
/// one row per edge class (edges sorted).  Every vertex row has exactly
/// three ones; the row of edge `e` has one 1 per incidence, `n_e` in all.
pub fn constraint_matrix(t: &Triangulation) -> (IntMatrix, Vec<ColumnKey>) {
    let mut columns = Vec::new();
    let mut col_of: BTreeMap<(usize, (Label, Label)), usize> = BTreeMap::new();
    for (idx, tet) in t.tets().iter().enumerate() {
        let mut pairs: Vec<(Label, Label)> = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                pairs.push(sorted_pair(&tet[i], &tet[j]));
            }
        }
        pairs.sort();
        for pair in pairs {
            col_of.insert((idx, pair.clone()), columns.len());
            columns.push(ColumnKey { tet: idx, pair });
        }
    }
    let edges: Vec<(Label, Label)> = t.edges().into_iter().collect();
    let rows = 4 * t.len() + edges.len();
    let mut m = IntMatrix::zero(rows, columns.len());
    let one = BigInt::from(1);
    let mut r = 0;
    for (idx, tet) in t.tets().iter().enumerate() {
        let mut verts: Vec<&Label> = tet.iter().collect();
        verts.sort();
        for x in verts.iter() {
            for y in tet.iter() {
                if *x != y {
                    let j = col_of[&(idx, sorted_pair(x, y))];
                    m.set(r, j, one.clone());
                }
            }
            r += 1;
        }
    }
    for edge in &edges {
        for (idx, _) in t.tets().iter().enumerate() {
            if let Some(&j) = col_of.get(&(idx, edge.clone())) {
                m.set(r, j, one.clone());
            }
        }
        r += 1;
    }
    (m, columns)
}

/// A triangulation's constraint system, factored once so that solution
/// spaces over any number of coefficient groups reuse the same reduction.
pub struct AngleSystem {
    columns: Vec<ColumnKey>,
    matrix: IntMatrix,
    diag: Vec<BigInt>,
    col_transform: IntMatrix,
}

impl AngleSystem {
    /// Builds and factors the system.  The triangulation must be valid.
    pub fn new(t: &Triangulation) -> Result<AngleSystem> {
        let report = t.validate();
        if !report.is_valid() {
            return Err(Error::PreconditionFailed(format!(
                "triangulation is invalid: {report}"
            )));
        }
        let (matrix, columns) = constraint_matrix(t);
        let (diag, col_transform) = diagonal_with_col_transform(&matrix);
        Ok(AngleSystem { columns, matrix, diag, col_transform })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn columns(&self) -> &[ColumnKey] {
        &self.columns
    }

    /// The solution space over `g`, from the cached reduction.
    pub fn solutions(&self, g: &GroupSpec) -> SolutionSpace {
        solution_space_from_reduction(&self.diag, &self.col_transform, self.columns.len(), g)
    }

    /// Reassembles a solution vector (one element per column) into a
    /// structure.
    pub fn structure(&self, g: &GroupSpec, vector: &[GroupElement]) -> Result<AngleStructure> {
        if vector.len() != self.columns.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} column values, got {}",
                self.columns.len(),
                vector.len()
            )));
        }
        let tet_count = self.columns.iter().map(|c| c.tet + 1).max().unwrap_or(0);
        let mut tets = vec![BTreeMap::new(); tet_count];
        for (key, v) in self.columns.iter().zip(vector) {
            tets[key.tet].insert(key.pair.clone(), v.clone());
        }
        AngleStructure::new(g.clone(), tets)
    }

    /// All solution-space generators over `g`, as structures.  Each is
    /// itself a solution, hence angled.
    pub fn generator_structures(&self, g: &GroupSpec) -> Result<Vec<AngleStructure>> {
        self.solutions(g)
            .generator_vectors()
            .iter()
            .map(|v| self.structure(g, v))
            .collect()
    }

    /// Deterministic random angled structure for `seed`.
    pub fn random_structure(&self, g: &GroupSpec, seed: u64) -> Result<AngleStructure> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vector = self.solutions(g).sample(&mut rng);
        self.structure(g, &vector)
    }
}

/// One-call solve: factor the system of `t` and return it with its space
/// over `g`.
pub fn solve(t: &Triangulation, g: &GroupSpec) -> Result<(AngleSystem, SolutionSpace)> {
    let system = AngleSystem::new(t)?;
    let space = system.solutions(g);
    Ok((system, space))
}

/// Deterministic random angled structure (see [`AngleSystem`] to amortize
/// the factorization over many draws).
pub fn random_angled(t: &Triangulation, g: &GroupSpec, seed: u64) -> Result<AngleStructure> {
    AngleSystem::new(t)?.random_structure(g, seed)
}

/// The vertex-equation system of a single tetrahedron on labels
/// `a, b, c, d`: four rows over the six sorted pairs.
pub fn single_tet_vertex_matrix() -> IntMatrix {
    // columns: (a,b), (a,c), (a,d), (b,c), (b,d), (c,d)
    IntMatrix::from_rows_i64(&[
        vec![1, 1, 1, 0, 0, 0], // vertex a
        vec![1, 0, 0, 1, 1, 0], // vertex b
        vec![0, 1, 0, 1, 0, 1], // vertex c
        vec![0, 0, 1, 0, 1, 1], // vertex d
    ])
}

/// A deterministic vertex-valid single tetrahedron on labels `a, b, c, d`,
/// for exercising the per-tetrahedron operations in isolation.
pub fn random_vertex_valid_tet(g: &GroupSpec, seed: u64) -> AngleStructure {
    let m = single_tet_vertex_matrix();
    let space = crate::abelian::solve_homogeneous(&m, g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vector = space.sample(&mut rng);
    let names = ["a", "b", "c", "d"];
    let mut k = BTreeMap::new();
    let mut col = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            k.insert(
                (names[i].to_string(), names[j].to_string()),
                vector[col].clone(),
            );
            col += 1;
        }
    }
    AngleStructure::new(g.clone(), vec![k]).expect("six pairs of four labels")
}
