//! Batch stages behind the command-line tool. Each stage reads the artifacts
//! of earlier stages from the output directory, writes its own, and records
//! a manifest with the digests of everything it touched.

mod config;
mod manifest;

pub use config::{RunConfig, DEFAULT_OUTPUT_DIR, OUTPUT_DIR_ENV};
pub use manifest::{file_digest, Manifest};

use std::collections::HashMap;
use std::fs::{self, File};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rand::seq::index::sample;
use serde::Serialize;

use crate::dataset::{load_ratings, write_edge_list, write_ratings_csv, RatingFormat};
use crate::entropy::{build_entropy_table, EntropyKind};
use crate::error::{Error, Result};
use crate::eval::{
    diversity_at_n, item_popularity, longtail_split, make_recall_protocol, popularity_at_n, rank_cases, read_ontology,
    read_ranks_csv, recall_from_ranks, similarity_at_n, write_ranks_csv, AlgorithmScorer, Metric, RecallProtocol,
    Report,
};
use crate::graph::{build_graph, dedup_records, largest_connected_component, natural_cmp, BipartiteGraph, DuplicatePolicy, RatingRecord};
use crate::lda::{train, LdaConfig, TopicCounts, TopicEstimates};
use crate::recommend::{read_recommendations_csv, write_recommendations_csv, Algorithm, Recommenders};
use crate::rng;

pub const GRAPH_FILE: &str = "graph.tsv";
pub const STATS_FILE: &str = "stats.json";
pub const SPLIT_FILE: &str = "split.csv";
pub const TRAIN_FILE: &str = "train.csv";
pub const PROTOCOL_FILE: &str = "protocol.csv";
pub const MODEL_FILE: &str = "lda-model.json";
pub const THETA_FILE: &str = "theta.csv";
pub const PHI_FILE: &str = "phi.csv";
pub const ITEM_ENTROPY_FILE: &str = "entropy-item.csv";
pub const TOPIC_ENTROPY_FILE: &str = "entropy-topic.csv";
pub const METRICS_FILE: &str = "metrics.csv";

pub fn recs_file(a: Algorithm) -> String {
    format!("recs-{a}.csv")
}

pub fn ranks_file(a: Algorithm) -> String {
    format!("ranks-{a}.csv")
}

/// Process exit status for an error: 1 usage or configuration, 2 bad or
/// missing data, 3 anything else.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidParameter { .. } | Error::UnknownAlgorithm { .. } | Error::MissingArtifact(_) => 1,
        Error::EmptyInput
        | Error::Parse { .. }
        | Error::RatingOutOfRange { .. }
        | Error::DuplicateRating { .. }
        | Error::InvalidWeight { .. }
        | Error::DuplicateEdge { .. }
        | Error::EmptyGraph
        | Error::UnknownUser(_)
        | Error::UnknownItem(_)
        | Error::UnratedUser(_)
        | Error::InsufficientCases { .. }
        | Error::InsufficientDecoys { .. }
        | Error::UnmappedItem(_)
        | Error::EmptyProfile(_)
        | Error::EmptyCategoryPath
        | Error::Checkpoint(_)
        | Error::Io(_)
        | Error::Csv(_)
        | Error::Json(_) => 2,
        _ => 3,
    }
}

fn artifact(config: &RunConfig, name: &str) -> Result<PathBuf> {
    let path = config.output_dir.join(name);
    if path.is_file() {
        Ok(path)
    } else {
        Err(Error::MissingArtifact(path))
    }
}

fn prepare(config: &RunConfig) -> Result<()> {
    config.validate()?;
    fs::create_dir_all(&config.output_dir)?;
    Ok(())
}

fn load_input(config: &RunConfig, manifest: &mut Manifest) -> Result<Vec<RatingRecord>> {
    let path = config.input_path()?;
    if !path.is_file() {
        return Err(Error::MissingArtifact(path.to_path_buf()));
    }
    let records = load_ratings(path, config.input_format()?)?;
    manifest.input(path)?;
    Ok(records)
}

fn load_training(config: &RunConfig, manifest: &mut Manifest) -> Result<(Vec<RatingRecord>, BipartiteGraph)> {
    let path = artifact(config, TRAIN_FILE)?;
    let records = load_ratings(&path, RatingFormat::Csv)?;
    manifest.input(&path)?;
    let g = rating_graph(&records)?;
    Ok((records, g))
}

/// The largest connected component of the rating graph.
fn rating_graph(records: &[RatingRecord]) -> Result<BipartiteGraph> {
    let full = build_graph(records, DuplicatePolicy::KeepLast)?;
    let g = largest_connected_component(&full)?;
    if g.num_nodes() < full.num_nodes() {
        warn!(
            "dropped {} users and {} items outside the largest connected component",
            full.num_users() - g.num_users(),
            full.num_items() - g.num_items()
        );
    }
    Ok(g)
}

fn create(config: &RunConfig, name: &str) -> Result<(PathBuf, File)> {
    let path = config.output_dir.join(name);
    let file = File::create(&path)?;
    Ok((path, file))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IngestReport {
    pub users: usize,
    pub items: usize,
    pub ratings: usize,
    pub density: f64,
}

/// Builds the rating graph and writes it as an edge list with summary
/// statistics.
pub fn cmd_ingest(config: &RunConfig) -> Result<IngestReport> {
    prepare(config)?;
    let mut manifest = Manifest::new("ingest", config);
    let records = load_input(config, &mut manifest)?;
    let g = rating_graph(&records)?;
    let report = IngestReport { users: g.num_users(), items: g.num_items(), ratings: g.num_edges(), density: g.density() };
    let (path, file) = create(config, GRAPH_FILE)?;
    write_edge_list(&g, file)?;
    manifest.output(&path)?;
    let (path, file) = create(config, STATS_FILE)?;
    serde_json::to_writer_pretty(file, &report)?;
    manifest.output(&path)?;
    manifest.write(&config.output_dir)?;
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SplitSummary {
    pub items: usize,
    pub tail_items: usize,
    pub cases: usize,
    pub decoys: usize,
    pub training_ratings: usize,
}

/// Long-tail split plus the held-out recall protocol. Case and decoy counts
/// shrink with a warning when the corpus cannot supply them.
pub fn cmd_split(config: &RunConfig) -> Result<SplitSummary> {
    prepare(config)?;
    let mut manifest = Manifest::new("split", config);
    let records = dedup_records(&load_input(config, &mut manifest)?, DuplicatePolicy::KeepLast)?;
    let split = longtail_split(&records, config.r_percent)?;
    let (mut n_cases, mut n_decoys) = (config.n_cases, config.n_decoys);
    let (training, protocol) = loop {
        match make_recall_protocol(&records, &split, n_cases, n_decoys, config.seed) {
            Err(Error::InsufficientCases { needed, available }) if available > 0 => {
                warn!("only {available} eligible test ratings; reducing cases from {needed}");
                n_cases = available;
            }
            Err(Error::InsufficientDecoys { user, needed, available }) if available > 0 => {
                warn!("user {user} has {available} unrated items; reducing decoys from {needed}");
                n_decoys = available;
            }
            other => break other?,
        }
    };
    info!(
        "{} of {} items in the tail; {} test cases with {} decoys",
        split.num_tail(),
        split.num_items(),
        protocol.len(),
        n_decoys
    );
    let (path, file) = create(config, SPLIT_FILE)?;
    split.write_csv(file)?;
    manifest.output(&path)?;
    let (path, file) = create(config, TRAIN_FILE)?;
    write_ratings_csv(&training, file)?;
    manifest.output(&path)?;
    let (path, file) = create(config, PROTOCOL_FILE)?;
    protocol.write_csv(file)?;
    manifest.output(&path)?;
    manifest.write(&config.output_dir)?;
    Ok(SplitSummary {
        items: split.num_items(),
        tail_items: split.num_tail(),
        cases: protocol.len(),
        decoys: n_decoys,
        training_ratings: training.len(),
    })
}

/// Fits the topic model on the training ratings.
pub fn cmd_train_lda(config: &RunConfig) -> Result<TopicEstimates> {
    prepare(config)?;
    let mut manifest = Manifest::new("train-lda", config);
    let (_, g) = load_training(config, &mut manifest)?;
    let lda = LdaConfig {
        topics: config.topics,
        sweeps: config.sweeps,
        alpha: config.alpha,
        beta: config.beta,
        seed: rng::sub_seed(config.seed, "lda"),
    };
    info!("training {} topics for {} sweeps", lda.topics, lda.sweeps);
    let model = train(&g, &lda)?;
    let estimates = model.estimate()?;
    let (path, file) = create(config, MODEL_FILE)?;
    model.counts().write_checkpoint(file)?;
    manifest.output(&path)?;
    let (path, file) = create(config, THETA_FILE)?;
    estimates.write_theta_csv(file)?;
    manifest.output(&path)?;
    let (path, file) = create(config, PHI_FILE)?;
    estimates.write_phi_csv(file)?;
    manifest.output(&path)?;
    manifest.write(&config.output_dir)?;
    Ok(estimates)
}

fn load_topics(config: &RunConfig, manifest: &mut Manifest) -> Result<TopicEstimates> {
    let path = artifact(config, MODEL_FILE)?;
    let counts = TopicCounts::read_checkpoint(File::open(&path)?)?;
    manifest.input(&path)?;
    counts.estimate()
}

fn load_protocol(config: &RunConfig, manifest: &mut Manifest) -> Result<RecallProtocol> {
    let path = artifact(config, PROTOCOL_FILE)?;
    let protocol = RecallProtocol::read_csv(File::open(&path)?, config.seed)?;
    manifest.input(&path)?;
    Ok(protocol)
}

/// Test users present in the training graph, at most `eval_users` of them,
/// in natural id order.
pub fn evaluation_users(config: &RunConfig, protocol: &RecallProtocol, g: &BipartiteGraph) -> Vec<String> {
    let mut users: Vec<String> = protocol.users().into_iter().filter(|u| g.user(u).is_some()).collect();
    users.sort_by(|a, b| natural_cmp(a, b));
    if users.len() > config.eval_users {
        let mut rng = rng::stream(config.seed, "users");
        let mut keep = sample(&mut rng, users.len(), config.eval_users).into_vec();
        keep.sort_unstable();
        users = keep.into_iter().map(|k| users[k].clone()).collect();
    }
    users
}

/// Top-k lists for the evaluation users and held-out ranks for every test
/// case, per configured algorithm.
pub fn cmd_recommend(config: &RunConfig) -> Result<()> {
    prepare(config)?;
    let mut manifest = Manifest::new("recommend", config);
    let (_, g) = load_training(config, &mut manifest)?;
    let protocol = load_protocol(config, &mut manifest)?;
    let topics = if config.algorithms.iter().any(|a| a.needs_topics()) {
        Some(load_topics(config, &mut manifest)?)
    } else {
        None
    };

    let item_table = build_entropy_table(&g, EntropyKind::ItemBased, None)?;
    let (path, file) = create(config, ITEM_ENTROPY_FILE)?;
    item_table.write_csv(file)?;
    manifest.output(&path)?;
    let mut recs = Recommenders::new(&g, config.params()).with_item_entropy(&item_table, config.c)?;
    if let Some(t) = &topics {
        let table = build_entropy_table(&g, EntropyKind::TopicBased, Some(t))?;
        let (path, file) = create(config, TOPIC_ENTROPY_FILE)?;
        table.write_csv(file)?;
        manifest.output(&path)?;
        recs = recs.with_topics(t, config.c)?;
    }

    let users = evaluation_users(config, &protocol, &g);
    let k = config.k.max(config.max_n());
    for &algorithm in &config.algorithms {
        info!("{algorithm}: {} lists, {} test cases", users.len(), protocol.len());
        let lists: Vec<_> = recs
            .recommend_many(algorithm, &users, k)
            .into_iter()
            .zip(&users)
            .filter_map(|(r, u)| r.map_err(|e| warn!("{algorithm} for user {u}: {e}")).ok())
            .collect();
        let (path, file) = create(config, &recs_file(algorithm))?;
        write_recommendations_csv(&lists, file)?;
        manifest.output(&path)?;

        let ranks = rank_cases(&protocol, &AlgorithmScorer { recommenders: &recs, algorithm });
        let (path, file) = create(config, &ranks_file(algorithm))?;
        write_ranks_csv(&protocol, &ranks, file)?;
        manifest.output(&path)?;
    }
    manifest.write(&config.output_dir)
}

/// Merges every configured algorithm's outputs into one metrics report.
pub fn cmd_evaluate(config: &RunConfig) -> Result<Report> {
    prepare(config)?;
    let mut manifest = Manifest::new("evaluate", config);
    let (training, g) = load_training(config, &mut manifest)?;
    let popularity = item_popularity(&training);
    let universe = config.item_universe.unwrap_or(g.num_items());
    let ontology = match &config.ontology {
        Some(path) => {
            let ont = read_ontology(File::open(path).map_err(|_| Error::MissingArtifact(path.clone()))?)?;
            manifest.input(path)?;
            Some(ont)
        }
        None => None,
    };
    let profiles: HashMap<String, Vec<String>> = g
        .user_nodes()
        .map(|u| (g.label(u).to_string(), g.rated_items(u).iter().map(|&i| g.label(i).to_string()).collect()))
        .collect();

    let mut report = Report::new();
    for &algorithm in &config.algorithms {
        let path = artifact(config, &ranks_file(algorithm))?;
        let ranks = read_ranks_csv(File::open(&path)?)?;
        manifest.input(&path)?;
        let path = artifact(config, &recs_file(algorithm))?;
        let lists = read_recommendations_csv(File::open(&path)?)?;
        manifest.input(&path)?;

        for (n, v) in recall_from_ranks(&ranks, &config.recall_n) {
            report.push(Metric::Recall, algorithm, n, v);
        }
        if lists.is_empty() {
            warn!("{algorithm}: no recommendation lists; list metrics skipped");
            continue;
        }
        for (n, v) in popularity_at_n(&lists, &popularity, &config.popularity_n) {
            report.push(Metric::Popularity, algorithm, n, v);
        }
        for &n in &config.diversity_n {
            report.push(Metric::Diversity, algorithm, n, diversity_at_n(&lists, n, universe)?);
        }
        if let Some(ont) = &ontology {
            for &n in &config.diversity_n {
                match similarity_at_n(&lists, &profiles, ont, n) {
                    Some(v) => report.push(Metric::Similarity, algorithm, n, v),
                    None => warn!("{algorithm}: no categorised recommendations at N={n}"),
                }
            }
        }
    }
    let (path, file) = create(config, METRICS_FILE)?;
    report.write_csv(file)?;
    manifest.output(&path)?;
    manifest.write(&config.output_dir)?;
    Ok(report)
}

/// Every stage in order. The topic model is trained only when a selected
/// algorithm needs it.
pub fn cmd_run(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    cmd_split(config)?;
    if config.algorithms.iter().any(|a| a.needs_topics()) {
        cmd_train_lda(config)?;
    }
    cmd_recommend(config)?;
    cmd_evaluate(config)
}

/// Reads a stage manifest back.
pub fn read_manifest(dir: &Path, stage: &str) -> Result<serde_json::Value> {
    let path = dir.join(format!("manifest-{stage}.json"));
    let file = File::open(&path).map_err(|_| Error::MissingArtifact(path.clone()))?;
    Ok(serde_json::from_reader(file)?)
}
