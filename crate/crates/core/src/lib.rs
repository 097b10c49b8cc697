//! Angle structures on closed oriented triangulated 3-manifolds, with values
//! in an arbitrary finitely generated abelian group.
//!
//! The crate is organized around one pipeline:
//!
//! * [`complex`] — triangulations, edge stars, vertex links, Pachner moves;
//! * [`angles`] — the linear system an angle structure must satisfy, and
//!   solvers for its solution space over a chosen coefficient group;
//! * [`invariant`] — the exterior-square obstruction `psi` attached to each
//!   structure, which always sums to zero over a closed triangulation;
//! * [`trace`] — a machine-checked replay of the identities behind that
//!   vanishing theorem, reported step by step;
//! * [`abelian`] / [`exterior`] — the underlying group arithmetic, Smith
//!   normal form, and the exterior square `Λ²A`;
//! * [`io`] — JSON file formats for triangulations and structures.
//!
//! Heavy per-tetrahedron work is data-parallel by default (the `parallel`
//! feature, on rayon); disabling it leaves a sequential fallback with
//! identical results.

pub mod abelian;
pub mod angles;
pub mod complex;
pub mod error;
pub mod exterior;
pub mod invariant;
pub mod io;
pub mod trace;

pub use error::{Error, Result};
