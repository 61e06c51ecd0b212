//! Hammock jumps over bipartite rating graphs: induced social networks,
//! their small-world structure, and the personalization trade-offs they expose.

pub mod error;
pub mod generators;
pub mod jump;
pub mod metrics;
pub mod personalization;
pub mod predictor;
pub mod ratings;
pub mod topology;

pub use error::{Error, Result};
pub use jump::{
    build_recommender_graph, cooccurrence_counts, induce_social_network, CooccurrenceCounts,
    JumpKind, JumpSpec, RecommenderGraph, SocialNetworkGraph,
};
pub use metrics::{PathLengthMode, PathLengthResult, ReachabilityOptions, ReachableFractions};
pub use ratings::{
    load_ratings, parse_ratings, ArtifactId, ArtifactTitles, BipartiteRatingGraph, PersonId,
    RatingFormat, RatingScale, RatingValue,
};
pub use topology::{Topology, UndirectedGraph};
