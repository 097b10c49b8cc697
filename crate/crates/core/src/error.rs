use crate::abelian::GroupSpec;
use thiserror::Error;

/// Crate-wide error type.
///
/// Structural misuse (mismatched coefficient groups, references to simplices
/// that do not exist, violated operation preconditions) is reported through
/// this enum.  Checks that can legitimately come back negative on well-formed
/// input (equation failures, a non-zero invariant) are *not* errors; they are
/// carried by the report types of the individual modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mismatched coefficient groups: {0} vs {1}")]
    MismatchedGroup(GroupSpec, GroupSpec),

    #[error("invalid group spec: {0}")]
    BadGroupSpec(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("group rank {rank} exceeds the supported bound {max} for the presentation oracle")]
    RankTooLarge { rank: usize, max: usize },

    #[error("no edge {{{0}, {1}}} in the triangulation")]
    NoSuchEdge(String, String),

    #[error("no vertex {0:?} in the triangulation")]
    NoSuchVertex(String),

    #[error("no tetrahedron with index {0}")]
    NoSuchTetrahedron(usize),

    #[error("face {{{0}, {1}, {2}}} is not an interior face of exactly two tetrahedra")]
    NoSuchFace(String, String, String),

    #[error("label {0:?} is already in use")]
    LabelInUse(String),

    #[error("vertex labels must be non-empty")]
    EmptyLabel,

    #[error("cannot perform 2-3 move: apexes {0:?} and {1:?} already span an edge")]
    ApexesAdjacent(String, String),

    #[error("precondition violated: {0}")]
    PreconditionFailed(String),

    #[error("structure is not angled: edge equation fails on {{{0}, {1}}}")]
    NotAngled(String, String),

    #[error("vertex {node:?} is not in the link of {vertex:?}")]
    NotInLink { vertex: String, node: String },

    #[error("path independence violated: {0}")]
    PathInconsistency(String),

    #[error("edge value not constant over incident triangles at {{{0}, {1}}}")]
    NotConstantOverTriangles(String, String),

    #[error("group {0} has even or infinite torsion; 2 is not invertible")]
    GroupHasEvenTorsion(GroupSpec),

    #[error("identity violated: {0}")]
    IdentityFailed(String),

    #[error("malformed input: {0}")]
    MalformedFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
