use crate::quiver::{ArrowId, VertexId};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("quiver is disconnected; components: {components:?}")]
    Disconnected { components: Vec<Vec<VertexId>> },

    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("unknown arrow {0}")]
    UnknownArrow(ArrowId),

    #[error("duplicate {kind} id {id}")]
    Duplicate { kind: &'static str, id: u32 },

    #[error("path is not composable at position {position}")]
    NotComposable { position: usize },

    #[error("unbounded path spaces: quiver has no length function")]
    UnboundedPathSpaces,

    #[error("radius exceeded at cover vertex {0}")]
    RadiusExceeded(VertexId),

    #[error("path algebra infinite-dimensional: quiver has an oriented cycle")]
    Cyclic,

    #[error("representations over different quivers")]
    QuiverMismatch,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("morphism is not irreducible: {0}")]
    NotIrreducible(String),

    #[error("module is outside the component: {0}")]
    OutsideComponent(String),

    #[error("sectional family rejected, condition ({condition}): {detail}")]
    InvalidFamily { condition: char, detail: String },

    #[error("hypothesis X'≠0 violated")]
    EmptyComplement,

    #[error("assignment blocked at cover vertex {vertex}: {reason}")]
    Blocked { vertex: VertexId, reason: String },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
