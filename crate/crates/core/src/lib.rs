//! Long-tail recommendation over user-item rating graphs.
//!
//! Users and items form a weighted bipartite graph. Items are ranked for a
//! query user by random-walk hitting time, by absorbing time into the user's
//! rated items, or by absorbing cost, which charges each step by how
//! focused the visited user's tastes are. Personalized PageRank, its
//! popularity-discounted variant and an LDA mixture model serve as
//! baselines, and the [`eval`] module reproduces the offline evaluation
//! protocol around a long-tail split.
//!
//! ```
//! use longtail::graph::{build_graph, DuplicatePolicy, RatingRecord};
//! use longtail::recommend::{recommend_at, Params};
//!
//! let records: Vec<RatingRecord> = [("1", "a", 5), ("1", "b", 4), ("2", "b", 5), ("2", "c", 3)]
//!     .into_iter()
//!     .map(|(u, i, r)| RatingRecord::new(u, i, r).unwrap())
//!     .collect();
//! let g = build_graph(&records, DuplicatePolicy::default()).unwrap();
//! let list = recommend_at(&g, "1", 5, &Params::default()).unwrap();
//! assert_eq!(list.items[0].0, "c");
//! ```

pub mod dataset;
pub mod entropy;
pub mod error;
pub mod eval;
pub mod graph;
pub mod lda;
pub mod pipeline;
pub mod recommend;
pub mod rng;
pub mod synthetic;
pub mod walk;

pub use error::{Error, Result};
