use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("no rating records supplied")]
    EmptyInput,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("rating {rating} for ({user}, {item}) is outside 1..=5")]
    RatingOutOfRange { user: String, item: String, rating: i64 },

    #[error("conflicting duplicate ratings for ({user}, {item}): {first} then {second}; use the keep-last policy to accept")]
    DuplicateRating { user: String, item: String, first: u8, second: u8 },

    #[error("edge weight {weight} for ({user}, {item}) must be positive and finite")]
    InvalidWeight { user: String, item: String, weight: f64 },

    #[error("duplicate edge ({user}, {item})")]
    DuplicateEdge { user: String, item: String },

    #[error("graph is empty")]
    EmptyGraph,

    #[error("unknown user {0:?}")]
    UnknownUser(String),

    #[error("unknown item {0:?}")]
    UnknownItem(String),

    #[error("node {0} is not in the graph")]
    UnknownNode(usize),

    #[error("node {0:?} has no incident edges; prune it before building transition probabilities")]
    IsolatedNode(String),

    #[error("graph has {} connected components (sizes {sizes:?}); restrict to the largest one first", sizes.len())]
    Disconnected { sizes: Vec<usize> },

    #[error("seed set is empty")]
    EmptySeeds,

    #[error("absorbing set is empty")]
    EmptyAbsorbingSet,

    #[error("user {0:?} is missing from the entropy table")]
    MissingEntropy(String),

    #[error("user {0:?} has no ratings")]
    UnratedUser(String),

    #[error("distribution sums to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("invalid parameter {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("topic-based entropy requires a trained topic model")]
    TopicModelRequired,

    #[error("topic model has not completed any Gibbs sweep")]
    Untrained,

    #[error("user {0:?} is not covered by the topic model")]
    UserNotInModel(String),

    #[error("linear system with {size} transient nodes exceeds the dense solver limit of {limit}")]
    SystemTooLarge { size: usize, limit: usize },

    #[error("absorbing-time linear system is singular")]
    SingularSystem,

    #[error("need {needed} eligible test ratings but only {available} exist ({shortfall} short)", shortfall = needed - available)]
    InsufficientCases { needed: usize, available: usize },

    #[error("user {user:?} has only {available} unrated items, cannot sample {needed} decoys")]
    InsufficientDecoys { user: String, needed: usize, available: usize },

    #[error("item {0:?} has no category path")]
    UnmappedItem(String),

    #[error("no rated item of user {0:?} has a category path")]
    EmptyProfile(String),

    #[error("category path is empty")]
    EmptyCategoryPath,

    #[error("missing artifact {0}; run the stage that produces it first")]
    MissingArtifact(PathBuf),

    #[error("unknown algorithm {tag:?}; valid tags are {valid}")]
    UnknownAlgorithm { tag: String, valid: String },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter { name, message: message.into() }
    }
}
