//! Offline evaluation: long-tail split, held-out recall, popularity,
//! diversity and ontology similarity.

mod metrics;
mod ontology;
mod recall;
mod report;
mod split;

pub use metrics::{diversity, diversity_at_n, item_popularity, popularity_at_n};
pub use ontology::{
    category_similarity, read_ontology, similarity_at_n, user_item_similarity, CategoryPath, Ontology,
};
pub use recall::{
    make_recall_protocol, rank_cases, read_ranks_csv, recall_at_n, recall_from_ranks, target_rank, write_ranks_csv,
    AlgorithmScorer, CandidateScorer, OracleScorer, RandomScorer, RecallProtocol, TestCase, DEFAULT_CASES,
    DEFAULT_DECOYS,
};
pub use report::{Metric, MetricRow, Report};
pub use split::{longtail_split, LongTailSplit};
