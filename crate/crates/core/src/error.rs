use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid subset: {0}")]
    InvalidSubset(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("newick syntax error at byte {pos}: {msg}")]
    NewickSyntax { pos: usize, msg: String },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("unknown leaf {0}")]
    UnknownLeaf(usize),

    #[error("unknown edge {0}")]
    UnknownEdge(usize),

    #[error("invalid number {0:?}")]
    InvalidNumber(String),

    #[error("invalid vector: {0}")]
    InvalidVector(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error(
        "not a tree metric: quadruple {quadruple:?} has its maximum pairing sum attained once"
    )]
    NotTreeMetric { quadruple: [usize; 4] },

    #[error("zero coordinate: {0}")]
    ZeroCoordinate(String),

    #[error("vector is not a weighted dissimilarity vector")]
    NotMember,

    #[error("internal error: {0}")]
    Internal(String),
}
