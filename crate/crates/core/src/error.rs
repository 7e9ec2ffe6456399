use thiserror::Error;

/// Errors produced by the word engine and its supporting modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("homology class has length {got}, expected {want}")]
    ClassLength { want: usize, got: usize },

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("unknown curve name `{0}`")]
    UnknownCurve(String),

    #[error("curve index out of range: {0}")]
    IndexRange(String),

    #[error("move index {index} out of range for word of length {len}")]
    MoveIndex { index: usize, len: usize },

    #[error("letters at positions {i}, {j} are not registered as disjoint")]
    NotDisjoint { i: usize, j: usize },

    #[error("no braid pattern t_a t_b t_a at position {0}")]
    BraidPattern(usize),

    #[error("action fact `{id}` does not match the word at position {at}")]
    FactMismatch { id: String, at: usize },

    #[error("action fact rejected: {0}")]
    FactInvalid(String),

    #[error("relator `{id}` does not match the word at position {at}")]
    SubstMismatch { id: String, at: usize },

    #[error("unknown relator `{0}`")]
    UnknownRelator(String),

    #[error("unknown named word `{0}`")]
    UnknownWord(String),

    #[error("invalid parameters for `{id}`: {reason}")]
    WordParams { id: String, reason: String },

    #[error("script step {step} ({text}): {source}")]
    ScriptStep {
        step: usize,
        text: String,
        #[source]
        source: Box<Error>,
    },

    #[error("script checkpoint failed at step {step}: {reason}")]
    Checkpoint { step: usize, reason: String },

    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("signature formula gave non-integer {num}/{den}; census is inconsistent")]
    NonIntegerSignature { num: i64, den: i64 },

    #[error("cycle census incomplete: {0} separating cycles of unknown genus")]
    UnknownSeparatingGenus(usize),

    #[error("insufficient provenance to compute the signature: {0}")]
    Provenance(String),

    #[error("section audit failed: {0}")]
    SectionAudit(String),

    #[error("catalog validation failed: {0}")]
    CatalogInvalid(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
