use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("{what} cap exceeded: limit {limit}, requested {requested}")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        requested: usize,
    },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid tree layout: {0}")]
    InvalidTree(String),
    #[error("matrix is not unitary within tolerance")]
    NonUnitary,
    #[error("invalid POVM element: {0}")]
    InvalidPovm(String),
    #[error("forced outcome has probability {probability:.3e}, below the degenerate-branch floor")]
    DegenerateBranch { probability: f64 },
    #[error("tensor label {label} has dimension {a} on one tensor and {b} on another")]
    DimMismatch { label: u32, a: usize, b: usize },
    #[error("malformed contraction sequence: {0}")]
    MalformedSequence(String),
    #[error("contraction step {step} would materialize {entries} entries (cap {cap})")]
    EntryCapExceeded {
        step: usize,
        entries: u128,
        cap: usize,
    },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("gate prefix {cut} out of range for a {gates}-gate circuit")]
    InvalidPrefix { cut: usize, gates: usize },
    #[error("pattern evaluation stuck: {0}")]
    PatternDeadlock(String),
    #[error("pair extraction stalled: {0}")]
    ExtractionStall(String),
    #[error("bound `{name}` violated: {detail}")]
    BoundViolated { name: &'static str, detail: String },
    #[error("inconsistent outcome specification: {0}")]
    OutcomeSpec(String),
    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
