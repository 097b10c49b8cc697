//! Edge stars and vertex links.

use super::{even_permutation, sorted_pair, Label, Triangulation};
use crate::error::{Error, Result};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// One step of an edge star: the opposite vertex `x_i`, and the tetrahedron
/// carrying the transition from `x_i` to the next opposite vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarStep {
    pub opposite: Label,
    pub tet: usize,
}

/// The cyclic fan of tetrahedra around an oriented edge `(a, b)`.
///
/// Opposite vertices are ordered so that `(a, b, x_i, x_{i+1})` is an even
/// permutation of the stored order of `steps[i].tet`, indices mod `n`; the
/// traversal starts at the lexicographically least opposite vertex.  The
/// reversed edge `(b, a)` yields the reversed cycle.
#[derive(Debug, Clone)]
pub struct EdgeStar {
    pub a: Label,
    pub b: Label,
    steps: Vec<StarStep>,
}

impl EdgeStar {
    pub fn steps(&self) -> &[StarStep] {
        &self.steps
    }

    /// Valence of the edge.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn opposites(&self) -> Vec<&Label> {
        self.steps.iter().map(|s| &s.opposite).collect()
    }
}

impl Triangulation {
    /// Builds the star of the oriented edge `(a, b)`.
    ///
    /// Fails with [`Error::NoSuchEdge`] when the edge is absent, and with
    /// [`Error::PreconditionFailed`] when the incident tetrahedra do not
    /// close into a single cycle (a non-manifold input).
    pub fn edge_star(&self, a: &str, b: &str) -> Result<EdgeStar> {
        let incident = self.tets_containing(&[a, b]);
        if incident.is_empty() || a == b {
            return Err(Error::NoSuchEdge(a.to_string(), b.to_string()));
        }
        // each incident tetrahedron carries exactly one even transition x -> y
        let mut successor: BTreeMap<&Label, (&Label, usize)> = BTreeMap::new();
        for &ti in &incident {
            let tet = &self.tets[ti];
            let rest: Vec<&Label> = tet.iter().filter(|v| *v != a && *v != b).collect();
            debug_assert_eq!(rest.len(), 2);
            let (x, y) = (rest[0], rest[1]);
            let a_lbl = a.to_string();
            let b_lbl = b.to_string();
            let (from, to) = if even_permutation(tet, &[&a_lbl, &b_lbl, x, y]) {
                (x, y)
            } else {
                (y, x)
            };
            if successor.insert(from, (to, ti)).is_some() {
                return Err(Error::PreconditionFailed(format!(
                    "edge ({a}, {b}): two tetrahedra leave opposite vertex {from:?} in the same direction"
                )));
            }
        }
        let n = incident.len();
        if n < 3 {
            return Err(Error::PreconditionFailed(format!(
                "edge ({a}, {b}) has valence {n}; a simplicial edge needs at least 3"
            )));
        }
        let start = *successor.keys().next().expect("nonempty");
        let mut steps = Vec::with_capacity(n);
        let mut current = start;
        let mut seen = BTreeSet::new();
        loop {
            if !seen.insert(current) {
                return Err(Error::PreconditionFailed(format!(
                    "edge ({a}, {b}): transitions revisit {current:?} before closing"
                )));
            }
            let Some(&(next, tet)) = successor.get(current) else {
                return Err(Error::PreconditionFailed(format!(
                    "edge ({a}, {b}): no outgoing transition at {current:?}; star does not close"
                )));
            };
            steps.push(StarStep { opposite: current.clone(), tet });
            current = next;
            if current == start {
                break;
            }
        }
        if steps.len() != n {
            return Err(Error::PreconditionFailed(format!(
                "edge ({a}, {b}): star splits into more than one cycle"
            )));
        }
        Ok(EdgeStar {
            a: a.to_string(),
            b: b.to_string(),
            steps,
        })
    }

    /// Builds the link of `vertex`: nodes are its neighbours, arcs the
    /// triangles through it, faces the tetrahedra through it.  The spanning
    /// tree is grown breadth-first from the least node, neighbours in
    /// lexicographic order, so paths are reproducible.
    pub fn vertex_link(&self, vertex: &str) -> Result<VertexLink> {
        let incident = self.tets_containing(&[vertex]);
        if incident.is_empty() {
            return Err(Error::NoSuchVertex(vertex.to_string()));
        }
        let mut arcs: BTreeSet<(Label, Label)> = BTreeSet::new();
        let mut adjacency: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
        for &ti in &incident {
            let rest: Vec<&Label> = self.tets[ti].iter().filter(|v| *v != vertex).collect();
            for i in 0..3 {
                for j in i + 1..3 {
                    arcs.insert(sorted_pair(rest[i], rest[j]));
                    adjacency.entry(rest[i].clone()).or_default().insert(rest[j].clone());
                    adjacency.entry(rest[j].clone()).or_default().insert(rest[i].clone());
                }
            }
        }
        let nodes: Vec<Label> = adjacency.keys().cloned().collect();
        let root = nodes[0].clone();
        let mut parent: BTreeMap<Label, Label> = BTreeMap::new();
        let mut reached: BTreeSet<Label> = BTreeSet::new();
        reached.insert(root.clone());
        let mut queue = VecDeque::from([root.clone()]);
        while let Some(node) = queue.pop_front() {
            for next in &adjacency[&node] {
                if reached.insert(next.clone()) {
                    parent.insert(next.clone(), node.clone());
                    queue.push_back(next.clone());
                }
            }
        }
        Ok(VertexLink {
            vertex: vertex.to_string(),
            root,
            nodes,
            arcs,
            parent,
            reached,
            face_count: incident.len(),
        })
    }
}

/// The link of a vertex, with a fixed breadth-first spanning tree.
#[derive(Debug, Clone)]
pub struct VertexLink {
    vertex: Label,
    root: Label,
    nodes: Vec<Label>,
    arcs: BTreeSet<(Label, Label)>,
    parent: BTreeMap<Label, Label>,
    reached: BTreeSet<Label>,
    face_count: usize,
}

impl VertexLink {
    pub fn vertex(&self) -> &Label {
        &self.vertex
    }

    pub fn root(&self) -> &Label {
        &self.root
    }

    /// Link vertices (= edges of the complex through `vertex`), sorted.
    pub fn nodes(&self) -> &[Label] {
        &self.nodes
    }

    /// Link edges (= triangles of the complex through `vertex`).
    pub fn arcs(&self) -> &BTreeSet<(Label, Label)> {
        &self.arcs
    }

    /// Link faces (= tetrahedra of the complex through `vertex`).
    pub fn face_count(&self) -> usize {
        self.face_count
    }

    pub fn contains(&self, node: &str) -> bool {
        self.reached.contains(node) || self.nodes.iter().any(|n| n == node)
    }

    pub fn is_connected(&self) -> bool {
        self.reached.len() == self.nodes.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.nodes.len() as i64 - self.arcs.len() as i64 + self.face_count as i64
    }

    /// Arcs not used by the spanning tree; each one closes a fundamental
    /// cycle.
    pub fn non_tree_arcs(&self) -> Vec<(Label, Label)> {
        self.arcs
            .iter()
            .filter(|(x, y)| {
                self.parent.get(x) != Some(y) && self.parent.get(y) != Some(x)
            })
            .cloned()
            .collect()
    }

    /// The unique tree path from `from` to `to`, both endpoints included.
    pub fn tree_path(&self, from: &str, to: &str) -> Result<Vec<Label>> {
        for node in [from, to] {
            if !self.nodes.iter().any(|n| n == node) {
                return Err(Error::NotInLink {
                    vertex: self.vertex.clone(),
                    node: node.to_string(),
                });
            }
        }
        let up = |start: &str| -> Vec<Label> {
            let mut path = vec![start.to_string()];
            let mut cur = start.to_string();
            while let Some(p) = self.parent.get(&cur) {
                path.push(p.clone());
                cur = p.clone();
            }
            path
        };
        let a = up(from); // from .. root
        let b = up(to); // to .. root
        // strip the common tail above the meeting point
        let mut ai = a.len();
        let mut bi = b.len();
        while ai > 0 && bi > 0 && a[ai - 1] == b[bi - 1] {
            ai -= 1;
            bi -= 1;
        }
        let mut path: Vec<Label> = a[..=ai.min(a.len() - 1)].to_vec();
        // a[ai] is the meeting point (common ancestor)
        for i in (0..bi).rev() {
            path.push(b[i].clone());
        }
        Ok(path)
    }
}
