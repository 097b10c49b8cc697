//! Step-by-step replay of the construction behind the vanishing theorem.
//!
//! The invariant module states *that* the global class vanishes; this module
//! re-derives *why*, as executable checks.  The pipeline builds a family
//! `h_{ab}^c` (one value per oriented edge `(a, b)` and incident triangle
//! `abc`) whose differences recover the angles, normalizes it to be
//! symmetric in `b <-> c`, extracts per-edge sums `q_ab`, forms a triangle
//! class `phi`, and shows that each tetrahedron's invariant is the
//! alternating `phi`-sum over its faces — at which point the global sum
//! telescopes away over the face pairing of a closed triangulation.
//!
//! Every identity on that path is checked exactly, and [`run_trace`]
//! aggregates the outcome as one report line per identity class.  The
//! combinatorial scaffolding (edge stars, vertex links, spanning trees) is
//! shared through a [`TraceContext`] so that replaying many structures on
//! one triangulation does not rebuild it each time.

use crate::abelian::{GroupElement, GroupSpec};
use crate::angles::AngleStructure;
use crate::complex::{sorted_pair, EdgeStar, Label, Triangulation, VertexLink};
use crate::error::{Error, Result};
use crate::exterior::{wedge, Wedge2Element};
use crate::invariant::{permutations4, psi_tetra_in_order};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;

/// Shared combinatorial data for replays on one triangulation: the star of
/// every oriented edge and the link of every vertex, plus the triangle
/// list.  Construction validates the triangulation once; everything built
/// from a context may assume validity.
pub struct TraceContext<'a> {
    t: &'a Triangulation,
    stars: BTreeMap<(Label, Label), EdgeStar>,
    links: BTreeMap<Label, VertexLink>,
    triangles: Vec<[Label; 3]>,
}

impl<'a> TraceContext<'a> {
    pub fn new(t: &'a Triangulation) -> Result<TraceContext<'a>> {
        let report = t.validate();
        if !report.is_valid() {
            return Err(Error::PreconditionFailed(format!(
                "triangulation is invalid: {report}"
            )));
        }
        let mut stars = BTreeMap::new();
        for (a, b) in t.edges() {
            stars.insert((a.clone(), b.clone()), t.edge_star(&a, &b)?);
            stars.insert((b.clone(), a.clone()), t.edge_star(&b, &a)?);
        }
        let mut links = BTreeMap::new();
        for v in t.labels() {
            links.insert(v.clone(), t.vertex_link(&v)?);
        }
        let triangles = t.triangles().into_iter().collect();
        Ok(TraceContext { t, stars, links, triangles })
    }

    pub fn triangulation(&self) -> &Triangulation {
        self.t
    }

    pub fn star(&self, a: &str, b: &str) -> Result<&EdgeStar> {
        self.stars
            .get(&(a.to_string(), b.to_string()))
            .ok_or_else(|| Error::NoSuchEdge(a.to_string(), b.to_string()))
    }

    pub fn link(&self, v: &str) -> Result<&VertexLink> {
        self.links
            .get(v)
            .ok_or_else(|| Error::NoSuchVertex(v.to_string()))
    }

    /// Sorted vertex triples of all triangles.
    pub fn triangles(&self) -> &[[Label; 3]] {
        &self.triangles
    }
}

/// The primitive family: `get(a, b, c)` is the value attached to the
/// oriented edge `(a, b)` within the triangle `abc`, written `h_{ab}^c`.
/// Its defining property is that opposite-vertex differences recover the
/// angles: for every even tetrahedron representative `(a, b, c, d)`,
/// `k_ab = h_{ab}^d - h_{ab}^c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HFamily {
    group: GroupSpec,
    values: BTreeMap<Label, BTreeMap<Label, BTreeMap<Label, GroupElement>>>,
}

impl HFamily {
    fn empty(group: GroupSpec) -> HFamily {
        HFamily { group, values: BTreeMap::new() }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn get(&self, a: &str, b: &str, c: &str) -> Result<&GroupElement> {
        self.values
            .get(a)
            .and_then(|m| m.get(b))
            .and_then(|m| m.get(c))
            .ok_or_else(|| Error::NoSuchFace(a.to_string(), b.to_string(), c.to_string()))
    }

    fn set(&mut self, a: &str, b: &str, c: &str, v: GroupElement) {
        self.values
            .entry(a.to_string())
            .or_default()
            .entry(b.to_string())
            .or_default()
            .insert(c.to_string(), v);
    }

    /// All entries as `((a, b, c), value)`, in sorted key order.
    pub fn iter(&self) -> impl Iterator<Item = ((&Label, &Label, &Label), &GroupElement)> {
        self.values.iter().flat_map(|(a, m)| {
            m.iter()
                .flat_map(move |(b, m2)| m2.iter().map(move |(c, v)| ((a, b, c), v)))
        })
    }

    pub fn len(&self) -> usize {
        self.iter().count()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Per-vertex normalization offsets: `get(a, b)` is the correction `q_ab`
/// applied to every `h_{ab}^·`, built from path sums in the link of `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QVertexFamily {
    group: GroupSpec,
    values: BTreeMap<Label, BTreeMap<Label, GroupElement>>,
}

impl QVertexFamily {
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn get(&self, a: &str, b: &str) -> Result<&GroupElement> {
        self.values
            .get(a)
            .and_then(|m| m.get(b))
            .ok_or(Error::NotInLink { vertex: a.to_string(), node: b.to_string() })
    }
}

/// Per-edge sums of the symmetric family: `get(x, y)` is
/// `h_{xy}^c + h_{yx}^c`, which does not depend on the triangle `c` used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QEdgeFamily {
    group: GroupSpec,
    values: BTreeMap<(Label, Label), GroupElement>,
}

impl QEdgeFamily {
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn get(&self, x: &str, y: &str) -> Result<&GroupElement> {
        self.values
            .get(&sorted_pair(x, y))
            .ok_or_else(|| Error::NoSuchEdge(x.to_string(), y.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Label, Label), &GroupElement)> {
        self.values.iter()
    }
}

/// Builds the primitive family by integrating the angles around every
/// oriented edge: the star of `(a, b)` lists the incident triangles in
/// cyclic order, the base triangle gets zero, and each step adds the angle
/// of the tetrahedron between consecutive triangles.  The cycle closes
/// exactly when the edge equation holds, so a failure to close reports the
/// offending edge as [`Error::NotAngled`].
pub fn build_h_raw(ctx: &TraceContext, s: &AngleStructure) -> Result<HFamily> {
    build_h_with_bases(ctx, s, |_, _, g| g.zero())
}

fn build_h_with_bases(
    ctx: &TraceContext,
    s: &AngleStructure,
    mut base: impl FnMut(&str, &str, &GroupSpec) -> GroupElement,
) -> Result<HFamily> {
    s.matches(ctx.t)?;
    let g = s.group().clone();
    let mut h = HFamily::empty(g.clone());
    for ((a, b), star) in &ctx.stars {
        let steps = star.steps();
        let mut value = base(a, b, &g);
        h.set(a, b, &steps[0].opposite, value.clone());
        for i in 0..steps.len() {
            let k = s.value(steps[i].tet, a, b);
            value = &value + k;
            if i + 1 < steps.len() {
                h.set(a, b, &steps[i + 1].opposite, value.clone());
            } else if &value != h.get(a, b, &steps[0].opposite)? {
                // the cycle sum is the edge equation
                return Err(Error::NotAngled(a.clone(), b.clone()));
            }
        }
    }
    Ok(h)
}

/// The path sum `m_a(b, b')` along the spanning tree of the link of `a`:
/// `sum_i (h_{a n_i}^{n_{i+1}} - h_{a n_{i+1}}^{n_i})` over consecutive
/// path nodes.  Path independence (checked by [`symmetrize`] on every
/// fundamental cycle) makes the tree choice immaterial.
pub fn m_value(
    ctx: &TraceContext,
    h: &HFamily,
    a: &str,
    b: &str,
    b2: &str,
) -> Result<GroupElement> {
    let path = ctx.link(a)?.tree_path(b, b2)?;
    let mut sum = h.group().zero();
    for w in path.windows(2) {
        let fwd = h.get(a, &w[0], &w[1])?;
        let back = h.get(a, &w[1], &w[0])?;
        sum = &sum + &(fwd - back);
    }
    Ok(sum)
}

/// Normalizes a primitive family so that `h_{ab}^c = h_{ac}^b` on every
/// triangle, by adding the per-vertex offsets `q_ab` obtained from tree
/// path sums (root offset zero).  Returns the corrected family together
/// with the offsets.  The difference property survives unchanged because
/// the offset does not depend on the triangle.
pub fn symmetrize(ctx: &TraceContext, h: &HFamily) -> Result<(HFamily, QVertexFamily)> {
    symmetrize_with_roots(ctx, h, |_, g| g.zero())
}

fn symmetrize_with_roots(
    ctx: &TraceContext,
    h: &HFamily,
    mut root_offset: impl FnMut(&str, &GroupSpec) -> GroupElement,
) -> Result<(HFamily, QVertexFamily)> {
    let g = h.group().clone();
    let mut q = QVertexFamily { group: g.clone(), values: BTreeMap::new() };
    for (a, link) in &ctx.links {
        let gauge = root_offset(a, &g);
        let mut per_vertex = BTreeMap::new();
        for b in link.nodes() {
            let m = m_value(ctx, h, a, link.root(), b)?;
            per_vertex.insert(b.clone(), &gauge + &m);
        }
        // every non-tree arc closes a cycle; the offsets must agree across it
        for (u, v) in link.non_tree_arcs() {
            let step = &(h.get(a, &u, &v)? - h.get(a, &v, &u)?);
            let got = &per_vertex[&u] + step;
            if got != per_vertex[&v] {
                return Err(Error::PathInconsistency(format!(
                    "link of {a:?}: arc ({u:?}, {v:?}) disagrees with the tree path"
                )));
            }
        }
        q.values.insert(a.clone(), per_vertex);
    }
    let mut out = HFamily::empty(g);
    for ((a, b, c), v) in h.iter() {
        out.set(a, b, c, v + q.get(a, b)?);
    }
    Ok((out, q))
}

/// One-call construction of a symmetric family with seeded gauge freedom:
/// the integration bases and the per-vertex root offsets are drawn from the
/// seed instead of being zero.  Any seed yields a valid symmetric family;
/// different seeds differ by per-vertex constants (see
/// [`h_ambiguity_check`]).
pub fn symmetric_family_seeded(
    ctx: &TraceContext,
    s: &AngleStructure,
    seed: u64,
) -> Result<(HFamily, QVertexFamily)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // draw in deterministic key order: oriented edges first, then vertices
    let mut bases = BTreeMap::new();
    for (a, b) in ctx.stars.keys() {
        bases.insert((a.clone(), b.clone()), random_element(s.group(), &mut rng));
    }
    let mut roots = BTreeMap::new();
    for v in ctx.links.keys() {
        roots.insert(v.clone(), random_element(s.group(), &mut rng));
    }
    let raw = build_h_with_bases(ctx, s, |a, b, _| bases[&(a.to_string(), b.to_string())].clone())?;
    symmetrize_with_roots(ctx, &raw, |v, _| roots[v].clone())
}

fn random_element<R: Rng>(g: &GroupSpec, rng: &mut R) -> GroupElement {
    let coords = g
        .factors()
        .iter()
        .map(|&d| {
            if d == 0 {
                rng.gen_range(-13i64..=13).into()
            } else {
                num_bigint::BigInt::from(rng.gen_range(0..d))
            }
        })
        .collect();
    g.element(coords).expect("arity matches")
}

/// Collapses a symmetric family to one value per edge: `h_{ab}^c + h_{ba}^c`
/// is checked to be constant over the incident triangles `c`, and the
/// doubling identity `q_ab + q_ac - q_bc = 2 h_{ab}^c` is verified on every
/// triangle.  A constancy failure names the edge; it signals a broken
/// family, not a property of the structure.
pub fn edge_q(ctx: &TraceContext, h: &HFamily) -> Result<QEdgeFamily> {
    let mut q = QEdgeFamily { group: h.group().clone(), values: BTreeMap::new() };
    for ((a, b), star) in &ctx.stars {
        if a > b {
            continue;
        }
        let mut value: Option<GroupElement> = None;
        for step in star.steps() {
            let c = &step.opposite;
            let sum = h.get(a, b, c)? + h.get(b, a, c)?;
            match &value {
                None => value = Some(sum),
                Some(prev) if *prev == sum => {}
                Some(_) => {
                    return Err(Error::NotConstantOverTriangles(a.clone(), b.clone()));
                }
            }
        }
        q.values
            .insert((a.clone(), b.clone()), value.expect("valence at least 3"));
    }
    for tri in ctx.triangles() {
        let [x, y, z] = tri;
        for (a, b, c) in ordered_versions(x, y, z) {
            let lhs = &(q.get(a, b)? + q.get(a, c)?) - q.get(b, c)?;
            let rhs = h.get(a, b, c)?.scale_i64(2);
            if lhs != rhs {
                return Err(Error::IdentityFailed(format!(
                    "q_{a}{b} + q_{a}{c} - q_{b}{c} != 2 h_{a}{b}^{c}"
                )));
            }
        }
    }
    Ok(q)
}

/// The six ordered readings of a triangle.
fn ordered_versions<'l>(
    x: &'l Label,
    y: &'l Label,
    z: &'l Label,
) -> [(&'l Label, &'l Label, &'l Label); 6] {
    [
        (x, y, z),
        (y, z, x),
        (z, x, y),
        (x, z, y),
        (z, y, x),
        (y, x, z),
    ]
}

/// The triangle class `phi_abc = h_ab^c ^ h_bc^a + h_bc^a ^ h_ca^b +
/// h_ca^b ^ h_ab^c`.  Exactly invariant under cyclic rotation; negated
/// under reversal once the family is symmetric.
pub fn phi(h: &HFamily, a: &str, b: &str, c: &str) -> Result<Wedge2Element> {
    let h1 = h.get(a, b, c)?;
    let h2 = h.get(b, c, a)?;
    let h3 = h.get(c, a, b)?;
    let w1 = wedge(h1, h2)?;
    let w2 = wedge(h2, h3)?;
    let w3 = wedge(h3, h1)?;
    Ok(&(&w1 + &w2) + &w3)
}

/// The edge-sum part: `phi0_abc = q_ac ^ q_ab + q_ab ^ q_bc + q_bc ^ q_ac`.
pub fn phi0(q: &QEdgeFamily, a: &str, b: &str, c: &str) -> Result<Wedge2Element> {
    let qab = q.get(a, b)?;
    let qbc = q.get(b, c)?;
    let qac = q.get(a, c)?;
    let w1 = wedge(qac, qab)?;
    let w2 = wedge(qab, qbc)?;
    let w3 = wedge(qbc, qac)?;
    Ok(&(&w1 + &w2) + &w3)
}

/// The diagonal remainder: `phi1_abc = q_bc ^ q_bc + h_ab^c ^ h_ab^c`.
/// Together: `phi = phi0 + phi1` (each diagonal class is its own negative,
/// so the cross terms of expanding the `q`'s drop out in pairs).
pub fn phi1(q: &QEdgeFamily, h: &HFamily, a: &str, b: &str, c: &str) -> Result<Wedge2Element> {
    let qbc = q.get(b, c)?;
    let hab = h.get(a, b, c)?;
    Ok(&wedge(qbc, qbc)? + &wedge(hab, hab)?)
}

/// The alternating face sum for tetrahedron `idx` in its stored order
/// `(a, b, c, d)`: `phi_bcd - phi_acd + phi_abd - phi_abc`.  This equals
/// the sum of `phi` over the four boundary-oriented faces, and — the heart
/// of the construction — equals the direct per-tetrahedron invariant.
pub fn psi_via_faces(ctx: &TraceContext, h: &HFamily, idx: usize) -> Result<Wedge2Element> {
    let tet = ctx
        .t
        .tets()
        .get(idx)
        .ok_or(Error::NoSuchTetrahedron(idx))?;
    let [a, b, c, d] = [&tet[0], &tet[1], &tet[2], &tet[3]];
    let f1 = phi(h, b, c, d)?;
    let f2 = phi(h, a, c, d)?;
    let f3 = phi(h, a, b, d)?;
    let f4 = phi(h, a, b, c)?;
    Ok(&(&f1 - &f2) + &(&f3 - &f4))
}

/// Outcome of the global cancellation check: every interior triangle is
/// seen once with each orientation, and the two `phi` values must cancel.
#[derive(Debug, Clone)]
pub struct TelescopeReport {
    /// Unordered triangles examined.
    pub face_pairs: usize,
    /// Triangles whose two oriented `phi` values fail to cancel (or that
    /// are not seen exactly twice), by sorted vertex triple.
    pub unmatched: Vec<[Label; 3]>,
    /// Whether the raw sum of `phi` over all oriented faces is zero.
    pub total_zero: bool,
}

impl TelescopeReport {
    pub fn holds(&self) -> bool {
        self.unmatched.is_empty() && self.total_zero
    }
}

impl fmt::Display for TelescopeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.holds() {
            return write!(f, "{} face pairs cancel; total zero", self.face_pairs);
        }
        write!(f, "total zero: {}; unmatched faces:", self.total_zero)?;
        for tri in &self.unmatched {
            write!(f, " ({}, {}, {})", tri[0], tri[1], tri[2])?;
        }
        Ok(())
    }
}

/// Evaluates `phi` on every boundary-oriented face of every tetrahedron and
/// checks the pairwise cancellation plus the vanishing of the raw sum.
pub fn telescope_check(ctx: &TraceContext, h: &HFamily) -> Result<TelescopeReport> {
    let mut table = Vec::with_capacity(4 * ctx.t.len());
    for idx in 0..ctx.t.len() {
        for face in ctx.t.oriented_faces(idx) {
            let value = phi(h, &face[0], &face[1], &face[2])?;
            table.push((face, value));
        }
    }
    Ok(telescope_pairing(h.group(), &table))
}

/// The pairing logic on an explicit `(face, phi)` table, separated out so
/// that corrupted tables can be fed in directly.
pub fn telescope_pairing(
    g: &GroupSpec,
    table: &[([Label; 3], Wedge2Element)],
) -> TelescopeReport {
    let mut total = Wedge2Element::zero(g);
    let mut by_triple: BTreeMap<[Label; 3], Vec<&Wedge2Element>> = BTreeMap::new();
    for (face, value) in table {
        total = &total + value;
        let mut key = face.clone();
        key.sort();
        by_triple.entry(key).or_default().push(value);
    }
    let mut unmatched = Vec::new();
    for (triple, values) in &by_triple {
        let cancels = values.len() == 2 && (values[0] + values[1]).is_zero();
        if !cancels {
            unmatched.push(triple.clone());
        }
    }
    TelescopeReport {
        face_pairs: by_triple.len(),
        unmatched,
        total_zero: total.is_zero(),
    }
}

/// Builds two symmetric families from different seeds and checks that
/// their difference is constant over everything except the first vertex —
/// the entire gauge freedom of the construction.
pub fn h_ambiguity_check(
    ctx: &TraceContext,
    s: &AngleStructure,
    seed1: u64,
    seed2: u64,
) -> Result<bool> {
    let (h1, _) = symmetric_family_seeded(ctx, s, seed1)?;
    let (h2, _) = symmetric_family_seeded(ctx, s, seed2)?;
    let mut per_vertex: BTreeMap<&Label, GroupElement> = BTreeMap::new();
    for ((a, b, c), v1) in h1.iter() {
        let d = v1 - h2.get(a, b, c)?;
        match per_vertex.get(a) {
            None => {
                per_vertex.insert(a, d);
            }
            Some(p) if *p == d => {}
            Some(_) => return Ok(false),
        }
    }
    Ok(true)
}

/// One verified identity class: how many individual checks ran and what
/// failed (empty means the class passed).
#[derive(Debug, Clone)]
pub struct TraceStep {
    pub name: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl TraceStep {
    fn ok(name: &'static str, checks: usize) -> TraceStep {
        TraceStep { name, checks, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The full replay outcome: one entry per identity class, in pipeline
/// order.
#[derive(Debug, Clone)]
pub struct TraceReport {
    pub steps: Vec<TraceStep>,
}

impl TraceReport {
    pub fn passed(&self) -> bool {
        self.steps.iter().all(TraceStep::passed)
    }

    pub fn total_checks(&self) -> usize {
        self.steps.iter().map(|s| s.checks).sum()
    }
}

impl fmt::Display for TraceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            if step.passed() {
                writeln!(f, "ok   {} ({} checks)", step.name, step.checks)?;
            } else {
                writeln!(f, "FAIL {} ({} checks)", step.name, step.checks)?;
                for detail in &step.failures {
                    writeln!(f, "     {detail}")?;
                }
            }
        }
        if self.passed() {
            write!(f, "RESULT: all identities verified ({} checks)", self.total_checks())
        } else {
            write!(f, "RESULT: FAILED")
        }
    }
}

/// Replays the whole construction for one structure on one triangulation.
/// Convenience wrapper over [`run_trace_with`]; batch callers should build
/// the [`TraceContext`] once.
pub fn run_trace(t: &Triangulation, s: &AngleStructure) -> Result<TraceReport> {
    let ctx = TraceContext::new(t)?;
    run_trace_with(&ctx, s)
}

/// Replays the construction using shared combinatorial data.
///
/// Precondition violations (mismatched shapes, a structure that is not
/// angled) are errors; a structure that satisfies the preconditions always
/// yields a report, with any identity failure recorded in the offending
/// step rather than thrown.
pub fn run_trace_with(ctx: &TraceContext, s: &AngleStructure) -> Result<TraceReport> {
    s.matches(ctx.t)?;
    let vertex = s.check_vertex_equations();
    if !vertex.is_ok() {
        return Err(Error::PreconditionFailed(format!(
            "vertex equations fail: {vertex}"
        )));
    }
    if let Some(first) = s.edge_equation_failures(ctx.t)?.first() {
        if let crate::angles::AngleViolation::EdgeSum { edge, .. } = first {
            return Err(Error::NotAngled(edge.0.clone(), edge.1.clone()));
        }
        return Err(Error::PreconditionFailed(first.to_string()));
    }

    let mut steps = Vec::new();
    let h_raw = build_h_raw(ctx, s)?;
    steps.push(check_difference(ctx, s, &h_raw, "difference property (raw family)"));
    steps.push(check_path_independence(ctx, &h_raw));

    let (h, _offsets) = symmetrize(ctx, &h_raw)?;
    steps.push(check_difference(ctx, s, &h, "difference property (symmetrized)"));
    steps.push(check_symmetry(ctx, &h));

    let q = match edge_q(ctx, &h) {
        Ok(q) => q,
        Err(e) => {
            steps.push(TraceStep {
                name: "edge sums and doubling identity",
                checks: 0,
                failures: vec![e.to_string()],
            });
            return Ok(TraceReport { steps });
        }
    };
    steps.push(TraceStep::ok(
        "edge sums constant over triangles, doubling identity",
        ctx.stars.len() / 2 + 6 * ctx.triangles.len(),
    ));

    steps.push(check_phi_symmetries(ctx, &h)?);
    steps.push(check_phi_split(ctx, &h, &q)?);
    steps.push(check_psi_via_faces(ctx, s, &h, &q)?);

    let telescope = telescope_check(ctx, &h)?;
    let mut step = TraceStep::ok("telescoping cancellation", telescope.face_pairs + 1);
    if !telescope.holds() {
        step.failures.push(telescope.to_string());
    }
    steps.push(step);

    let mut gauge = TraceStep::ok("gauge difference is a vertex constant", h.len());
    if !h_ambiguity_check(ctx, s, 1, 2)? {
        gauge.failures.push("seeded families differ by more than per-vertex constants".into());
    }
    steps.push(gauge);

    Ok(TraceReport { steps })
}

/// `k_ab = h_{ab}^d - h_{ab}^c` over all twelve even representatives of
/// every tetrahedron.  Tetrahedra are independent, so the sweep is
/// data-parallel; failures are merged back in index order.
fn check_difference(
    ctx: &TraceContext,
    s: &AngleStructure,
    h: &HFamily,
    name: &'static str,
) -> TraceStep {
    let tets = ctx.t.tets();
    let tet_failures = |idx: usize| -> Vec<String> {
        let tet = &tets[idx];
        let mut failures = Vec::new();
        for (perm, even) in permutations4() {
            if !even {
                continue;
            }
            let [a, b, c, d] = [&tet[perm[0]], &tet[perm[1]], &tet[perm[2]], &tet[perm[3]]];
            let lhs = s.value(idx, a, b);
            match (h.get(a, b, d), h.get(a, b, c)) {
                (Ok(hd), Ok(hc)) => {
                    if *lhs != hd - hc {
                        failures.push(format!(
                            "tet {idx}: k({a},{b}) != h_{a}{b}^{d} - h_{a}{b}^{c}"
                        ));
                    }
                }
                _ => failures.push(format!("tet {idx}: missing h at ({a},{b})")),
            }
        }
        failures
    };
    #[cfg(feature = "parallel")]
    let per_tet: Vec<Vec<String>> = (0..tets.len()).into_par_iter().map(tet_failures).collect();
    #[cfg(not(feature = "parallel"))]
    let per_tet: Vec<Vec<String>> = (0..tets.len()).map(tet_failures).collect();
    TraceStep {
        name,
        checks: 12 * tets.len(),
        failures: per_tet.into_iter().flatten().collect(),
    }
}

/// Path sums around every fundamental cycle of every vertex link vanish.
fn check_path_independence(ctx: &TraceContext, h: &HFamily) -> TraceStep {
    let mut step = TraceStep::ok("link path independence", 0);
    for (a, link) in &ctx.links {
        for (u, v) in link.non_tree_arcs() {
            step.checks += 1;
            let around = m_value(ctx, h, a, &u, &v)
                .and_then(|tree| Ok(&tree - &(h.get(a, &u, &v)? - h.get(a, &v, &u)?)));
            match around {
                Ok(zero) if zero.is_zero() => {}
                Ok(_) => step.failures.push(format!(
                    "link of {a}: cycle through ({u}, {v}) has nonzero sum"
                )),
                Err(e) => step.failures.push(e.to_string()),
            }
        }
    }
    step
}

/// `h_{ab}^c = h_{ac}^b` for every triangle and every first vertex.
fn check_symmetry(ctx: &TraceContext, h: &HFamily) -> TraceStep {
    let mut step = TraceStep::ok("symmetry after normalization", 0);
    for tri in ctx.triangles() {
        let [x, y, z] = tri;
        for (a, b, c) in [(x, y, z), (y, x, z), (z, x, y)] {
            step.checks += 1;
            match (h.get(a, b, c), h.get(a, c, b)) {
                (Ok(p), Ok(r)) if p == r => {}
                _ => step.failures.push(format!("h_{a}{b}^{c} != h_{a}{c}^{b}")),
            }
        }
    }
    step
}

/// Cyclic invariance and reversal antisymmetry of `phi`.
fn check_phi_symmetries(ctx: &TraceContext, h: &HFamily) -> Result<TraceStep> {
    let mut step = TraceStep::ok("phi cyclic invariance and reversal antisymmetry", 0);
    for tri in ctx.triangles() {
        let [x, y, z] = tri;
        let base = phi(h, x, y, z)?;
        step.checks += 3;
        if phi(h, y, z, x)? != base || phi(h, z, x, y)? != base {
            step.failures.push(format!("phi({x},{y},{z}) not cyclic"));
        }
        if phi(h, x, z, y)? != -&base {
            step.failures.push(format!("phi({x},{z},{y}) != -phi({x},{y},{z})"));
        }
    }
    Ok(step)
}

/// `phi = phi0 + phi1` on every triangle.
fn check_phi_split(ctx: &TraceContext, h: &HFamily, q: &QEdgeFamily) -> Result<TraceStep> {
    let mut step = TraceStep::ok("phi splits as phi0 + phi1", 0);
    for tri in ctx.triangles() {
        let [x, y, z] = tri;
        step.checks += 1;
        let whole = phi(h, x, y, z)?;
        let split = &phi0(q, x, y, z)? + &phi1(q, h, x, y, z)?;
        if whole != split {
            step.failures.push(format!("phi({x},{y},{z}) != phi0 + phi1"));
        }
    }
    Ok(step)
}

/// The alternating face sum reproduces the direct invariant on every
/// tetrahedron, and its own split through `phi0`/`phi1` is consistent.
/// This is the most expensive step (twelve `phi` evaluations per
/// tetrahedron), so tetrahedra are processed data-parallel.
fn check_psi_via_faces(
    ctx: &TraceContext,
    s: &AngleStructure,
    h: &HFamily,
    q: &QEdgeFamily,
) -> Result<TraceStep> {
    let tets = ctx.t.tets();
    let tet_failures = |idx: usize| -> Result<Vec<String>> {
        let tet = &tets[idx];
        let [a, b, c, d] = [&tet[0], &tet[1], &tet[2], &tet[3]];
        let mut failures = Vec::new();
        let via_faces = psi_via_faces(ctx, h, idx)?;
        let direct = psi_tetra_in_order(s, idx, [a.as_str(), b.as_str(), c.as_str(), d.as_str()])?;
        if via_faces != direct {
            // emitted verbatim: the difference localizes any discrepancy
            let diff = &via_faces - &direct;
            failures.push(format!(
                "tet {idx} over {}: face sum differs from direct value by {diff}",
                s.group()
            ));
        }
        let part0 = alternating_faces(|p, r, w| phi0(q, p, r, w), a, b, c, d)?;
        let part1 = alternating_faces(|p, r, w| phi1(q, h, p, r, w), a, b, c, d)?;
        if via_faces != &part0 + &part1 {
            failures.push(format!("tet {idx}: face sum does not split"));
        }
        Ok(failures)
    };
    #[cfg(feature = "parallel")]
    let per_tet: Vec<Vec<String>> =
        (0..tets.len()).into_par_iter().map(tet_failures).collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let per_tet: Vec<Vec<String>> =
        (0..tets.len()).map(tet_failures).collect::<Result<_>>()?;
    Ok(TraceStep {
        name: "per-tetrahedron class via faces",
        checks: 2 * tets.len(),
        failures: per_tet.into_iter().flatten().collect(),
    })
}

fn alternating_faces(
    mut f: impl FnMut(&str, &str, &str) -> Result<Wedge2Element>,
    a: &str,
    b: &str,
    c: &str,
    d: &str,
) -> Result<Wedge2Element> {
    let f1 = f(b, c, d)?;
    let f2 = f(a, c, d)?;
    let f3 = f(a, b, d)?;
    let f4 = f(a, b, c)?;
    Ok(&(&f1 - &f2) + &(&f3 - &f4))
}
