use std::path::PathBuf;

use crate::ratings::{ArtifactId, PersonId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed record: {0}")]
    Malformed(String),

    #[error("rating {value} outside scale {min}..={max}")]
    RatingOutOfScale { value: i64, min: u8, max: u8 },

    #[error("invalid rating scale {min}..={max}")]
    InvalidScale { min: u8, max: u8 },

    #[error("duplicate rating for person {person}, artifact {artifact}")]
    DuplicateRating {
        person: PersonId,
        artifact: ArtifactId,
    },

    #[error("person {0} already present")]
    DuplicatePerson(PersonId),

    #[error("unknown person {0}")]
    UnknownPerson(PersonId),

    #[error("unknown artifact {0}")]
    UnknownArtifact(ArtifactId),

    #[error("person {0} of the social network is absent from the rating graph")]
    MismatchedGraphs(PersonId),

    #[error(
        "person {person} already rated artifact {artifact}; path length 0 queries are rejected"
    )]
    SelfRatingQuery {
        person: PersonId,
        artifact: ArtifactId,
    },

    #[error("graph has no edges")]
    NoEdges,

    #[error("hammock width must be at least 1")]
    ZeroWidth,

    #[error("path length must be at least 1")]
    ZeroPathLength,

    #[error("invalid wreath parameters n={n}, k={k}: k must be even, positive and below n")]
    InvalidWreath { n: usize, k: usize },

    #[error("rewiring probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("cannot reach a minimum of {min} ratings with at most {max} artifacts")]
    InfeasibleCalibration { max: usize, min: usize },

    #[error("need at least 2 samples to estimate a derivative, got {0}")]
    TooFewSamples(usize),

    #[error("sample parameters must be strictly increasing (offending value {0})")]
    UnorderedParameters(f64),

    #[error("parameter grid is empty")]
    EmptyGrid,

    #[error("baseline width {0} missing from the sweep range or its social network has no edges")]
    InvalidBaseline(u32),

    #[error("artifact {0} has no raters other than the queried person")]
    NoCandidateRaters(ArtifactId),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn at_line(self, line: usize) -> Self {
        Error::AtLine {
            line,
            source: Box::new(self),
        }
    }
}
