//! Auslander-Reiten theory of path algebras over the rationals.
//!
//! [`quiver`] and [`format`] hold translation quivers and their text form,
//! [`mesh`] the mesh category with its radical filtration, [`cover`] the
//! truncated generic covering, [`rep`] representations and knitting, and
//! [`degree`] the degree computations built on top of all of them.

pub mod cover;
pub mod degree;
pub mod error;
pub mod format;
pub mod linalg;
pub mod mesh;
pub mod quiver;
pub mod rep;

pub use error::{Error, Result};
pub use quiver::{ArrowId, PathWord, TranslationQuiver, VertexId};
