//! Acceptance criteria, one report line each. Criteria that need the real
//! MovieLens-1M ratings read them from `LONGTAIL_MOVIELENS_1M` (the
//! `ratings.dat` file or its directory) and report NOT RUN without it.

mod common;

use std::collections::HashMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{cosine, ml_like_graph, monte_carlo_absorbing_time, movielens_path, random_bipartite, spearman};
use longtail::dataset::{load_ratings, write_ratings_csv, RatingFormat};
use longtail::entropy::{EntropyKind, EntropyTable};
use longtail::eval::{
    category_similarity, diversity_at_n, item_popularity, longtail_split, make_recall_protocol, popularity_at_n,
    rank_cases, recall_at_n, recall_from_ranks, AlgorithmScorer, CategoryPath, LongTailSplit, OracleScorer,
    RandomScorer, RecallProtocol,
};
use longtail::graph::{build_graph, dedup_records, BipartiteGraph, DuplicatePolicy, NodeId, RatingRecord};
use longtail::lda::{init_assignments, train, LdaConfig, TopicEstimates};
use longtail::pipeline::{cmd_run, RunConfig};
use longtail::recommend::{recommend_ac, recommend_at, Algorithm, Params, RecommendationList, Recommenders};
use longtail::synthetic::{generate, planted_topics, SyntheticConfig, SyntheticData};
use longtail::walk::{self, AbsorbingSpec};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

enum Status {
    Pass,
    Fail,
    NotRun,
}

struct Outcome {
    status: Status,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { status: Status::Pass, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { status: Status::Fail, detail: detail.into() }
}

fn not_run(detail: impl Into<String>) -> Outcome {
    Outcome { status: Status::NotRun, detail: detail.into() }
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        pass(detail)
    } else {
        fail(detail)
    }
}

const NO_DATA: &str = "MovieLens-1M unavailable; set LONGTAIL_MOVIELENS_1M to ratings.dat";

// ---------------------------------------------------------------------------

fn absorbing_time_oracles() -> Outcome {
    let start = Instant::now();
    let mut worst_mc = 0.0f64;
    let mut worst_trunc = 0.0f64;
    for seed in 0..20u64 {
        let g = random_bipartite(seed, 60, 90, 0.08);
        assert!(g.num_nodes() <= 200);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let items: Vec<NodeId> = g.item_nodes().collect();
        let absorbing: Vec<NodeId> =
            sample(&mut rng, items.len(), items.len() * 3 / 5).into_iter().map(|k| items[k]).collect();
        let spec = AbsorbingSpec::unit(&g, absorbing.clone()).unwrap();
        let exact = walk::absorbing_time_exact(&g, &spec).unwrap();
        let truncated = walk::absorbing_time_truncated(&g, &spec, 50).unwrap();
        let mc = monte_carlo_absorbing_time(&g, &absorbing, 100_000, seed);
        for v in 0..g.num_nodes() {
            let e = exact.value(NodeId(v as u32));
            worst_trunc = worst_trunc.max((truncated.values[v] - e).abs());
            if e > 0.0 {
                worst_mc = worst_mc.max((mc[v] - e).abs() / e);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst_mc <= 0.02 && worst_trunc <= 1e-6 && secs < 60.0,
        format!(
            "20 graphs: worst Monte-Carlo rel. error {:.4} (<= 0.02), worst tau=50 abs. error {worst_trunc:.2e} (<= 1e-6), {secs:.1}s",
            worst_mc
        ),
    )
}

fn truncation_claim() -> Outcome {
    let mut min_rho = f64::INFINITY;
    let mut min_overlap = usize::MAX;
    let mut runs = 0;
    for seed in 0..10u64 {
        // MovieLens density: about 4.5% of the catalogue per user
        let g = ml_like_graph(100 + seed, 800, 1150, 50.0);
        assert!(g.num_nodes() <= 2000);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..2 {
            let q = g.user_node(sample(&mut rng, g.num_users(), 1).index(0));
            let rated = g.rated_items(q).to_vec();
            let spec = AbsorbingSpec::unit(&g, rated.iter().copied()).unwrap();
            let exact = walk::absorbing_time_exact(&g, &spec).unwrap();
            let fast = walk::absorbing_time_truncated(&g, &spec, 15).unwrap();
            let cands: Vec<NodeId> = g.item_nodes().filter(|i| !rated.contains(i)).collect();
            let e: Vec<f64> = cands.iter().map(|&i| exact.value(i)).collect();
            let f: Vec<f64> = cands.iter().map(|&i| fast.value(i)).collect();
            min_rho = min_rho.min(spearman(&e, &f));
            let top = |x: &[f64]| {
                let mut k: Vec<usize> = (0..x.len()).collect();
                k.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
                k.truncate(10);
                k
            };
            let (te, tf) = (top(&e), top(&f));
            min_overlap = min_overlap.min(te.iter().filter(|k| tf.contains(k)).count());
            runs += 1;
        }
    }
    verdict(
        min_rho >= 0.99 && min_overlap >= 9,
        format!("{runs} queries on 10 graphs of 1950 nodes: min Spearman {min_rho:.4} (>= 0.99), min top-10 overlap {min_overlap}/10 (>= 9)"),
    )
}

fn same_lists(g: &BipartiteGraph, users: &[String], params: &Params) -> (usize, usize) {
    let ones = EntropyTable::constant(g, EntropyKind::ItemBased, 1.0);
    let mut equal = 0;
    for u in users {
        let at = recommend_at(g, u, 10, params).unwrap();
        let ac = recommend_ac(g, u, 10, params, &ones, 1.0).unwrap();
        if at.items == ac.items {
            equal += 1;
        }
    }
    (equal, users.len())
}

fn ac_degeneracy(ml: Option<&MovieLens>) -> Outcome {
    let params = Params::default();
    let mut fixtures = Vec::new();
    for seed in 0..10 {
        fixtures.push(random_bipartite(seed, 15, 25, 0.2));
    }
    for seed in 0..3 {
        fixtures.push(ml_like_graph(seed, 200, 300, 15.0));
    }
    let (mut equal, mut total) = (0, 0);
    for g in &fixtures {
        let users: Vec<String> = g.user_ids().iter().map(|s| s.to_string()).collect();
        let (e, t) = same_lists(g, &users, &params);
        equal += e;
        total += t;
    }
    let fixture_part = format!("fixtures {equal}/{total} users identical");
    if equal != total {
        return fail(fixture_part);
    }
    match ml {
        None => not_run(format!("{fixture_part}; MovieLens part: {NO_DATA}")),
        Some(ml) => {
            let users = ml.sample_users(100, 3);
            let (e, t) = same_lists(&ml.graph, &users, &params);
            verdict(e == t, format!("{fixture_part}; MovieLens {e}/{t} users identical"))
        }
    }
}

fn longtail_share(ml: Option<&MovieLens>) -> Outcome {
    let Some(ml) = ml else {
        return not_run(NO_DATA);
    };
    let share = ml.split.tail_fraction();
    let secs = ml.split_time.as_secs_f64();
    verdict(
        (share - 0.66).abs() <= 0.05 && secs < 60.0,
        format!("{:.1}% of {} movies in the 20% tail (66 +/- 5), split in {secs:.2}s", 100.0 * share, ml.split.num_items()),
    )
}

fn recall_sanity() -> Outcome {
    let data = generate(&SyntheticConfig::movielens_like(11)).unwrap();
    let split = longtail_split(&data.records, 0.2).unwrap();
    let (_, protocol) = make_recall_protocol(&data.records, &split, 4000, 1000, 11).unwrap();
    let random = recall_at_n(&protocol, &RandomScorer { seed: 5 }, &[10])[0].1;
    let oracle = recall_at_n(&protocol, &OracleScorer::new(&protocol), &[1])[0].1;
    let expected = 10.0 / 1001.0;
    verdict(
        (random - expected).abs() <= 0.01 && oracle == 1.0,
        format!("4000 cases x 1000 decoys: random Recall@10 {random:.4} (expected {expected:.4} +/- 0.01), oracle Recall@1 {oracle}"),
    )
}

struct TrendRun {
    recall50: HashMap<Algorithm, f64>,
    pop10: HashMap<Algorithm, f64>,
    div10: HashMap<Algorithm, f64>,
}

/// Recall, popularity and diversity for the given algorithms on one split.
fn trend_run(
    g: &BipartiteGraph,
    training: &[RatingRecord],
    protocol: &RecallProtocol,
    topics: &TopicEstimates,
    users: &[String],
    recall_algs: &[Algorithm],
    list_algs: &[Algorithm],
) -> TrendRun {
    let recs = Recommenders::new(g, Params::default())
        .with_default_item_entropy(None)
        .unwrap()
        .with_topics(topics, None)
        .unwrap();
    let mut out = TrendRun { recall50: HashMap::new(), pop10: HashMap::new(), div10: HashMap::new() };
    for &a in recall_algs {
        let ranks = rank_cases(protocol, &AlgorithmScorer { recommenders: &recs, algorithm: a });
        out.recall50.insert(a, recall_from_ranks(&ranks, &[50])[0].1);
    }
    let popularity = item_popularity(training);
    for &a in list_algs {
        let lists: Vec<RecommendationList> =
            recs.recommend_many(a, users, 10).into_iter().filter_map(Result::ok).collect();
        out.pop10.insert(a, popularity_at_n(&lists, &popularity, &[10])[0].1);
        out.div10.insert(a, diversity_at_n(&lists, 10, g.num_items()).unwrap());
    }
    out
}

/// The same measurements on a planted-taste synthetic corpus, reported for
/// orientation only.
fn surrogate_trends() -> TrendRun {
    let config = SyntheticConfig { users: 1500, items: 1200, mean_ratings: 60.0, ..SyntheticConfig::small(21) };
    let data = generate(&config).unwrap();
    let split = longtail_split(&data.records, 0.2).unwrap();
    let (training, protocol) = make_recall_protocol(&data.records, &split, 600, 500, 21).unwrap();
    let g = build_graph(&training, DuplicatePolicy::KeepLast).unwrap();
    let lda = LdaConfig { topics: 12, sweeps: 60, seed: 21, ..LdaConfig::default() };
    let topics = train(&g, &lda).unwrap().estimate().unwrap();
    let mut users = protocol.users();
    users.retain(|u| g.user(u).is_some());
    users.truncate(300);
    trend_run(
        &g,
        &training,
        &protocol,
        &topics,
        &users,
        &[Algorithm::Ht, Algorithm::At, Algorithm::Ac2],
        &[Algorithm::At, Algorithm::Ppr, Algorithm::Lda],
    )
}

fn accuracy_trend(ml: Option<&MovieLens>) -> Outcome {
    let Some(ml) = ml else {
        return not_run(NO_DATA);
    };
    let start = Instant::now();
    let users = ml.sample_users(500, 7);
    let run = trend_run(
        &ml.graph,
        &ml.training,
        &ml.protocol,
        &ml.topics,
        &users,
        &[Algorithm::Ht, Algorithm::At, Algorithm::Ac2],
        &[],
    );
    let (ht, at, ac2) = (run.recall50[&Algorithm::Ht], run.recall50[&Algorithm::At], run.recall50[&Algorithm::Ac2]);
    verdict(
        ac2 >= at && at >= ht && ac2 >= 0.30,
        format!(
            "Recall@50 AC2 {ac2:.3} >= AT {at:.3} >= HT {ht:.3}, AC2 >= 0.30; {:.0}s",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn popularity_trend(ml: Option<&MovieLens>, list_run: Option<&TrendRun>) -> Outcome {
    match (ml, list_run) {
        (Some(_), Some(run)) => {
            let (at, ppr) = (run.pop10[&Algorithm::At], run.pop10[&Algorithm::Ppr]);
            verdict(at < ppr, format!("500 users: Popularity@10 AT {at:.1} < PPR {ppr:.1}"))
        }
        _ => not_run(NO_DATA),
    }
}

fn diversity_trend(ml: Option<&MovieLens>, list_run: Option<&TrendRun>) -> Outcome {
    match (ml, list_run) {
        (Some(_), Some(run)) => {
            let (at, lda) = (run.div10[&Algorithm::At], run.div10[&Algorithm::Lda]);
            verdict(at > 3.0 * lda, format!("500 users: diversity AT {at:.4} > 3 x LDA {lda:.4}"))
        }
        _ => not_run(NO_DATA),
    }
}

fn lda_correctness() -> Outcome {
    // conservation after every sweep
    let g = ml_like_graph(31, 80, 100, 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut m = init_assignments(&g, 6, 50.0 / 6.0, 0.1, &mut rng).unwrap();
    let mut conserved = m.recount() == *m.counts();
    for _ in 0..50 {
        m.gibbs_sweep(&mut rng);
        conserved &= m.recount() == *m.counts();
    }

    // planted two-topic recovery
    let items = 40;
    let phi: Vec<Vec<f64>> = (0..2)
        .map(|z| {
            let raw: Vec<f64> =
                (0..items).map(|i| if (i < items / 2) == (z == 0) { 1.0 + (i % 5) as f64 } else { 0.05 }).collect();
            let s: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / s).collect()
        })
        .collect();
    let theta: Vec<Vec<f64>> = (0..200).map(|u| if u % 2 == 0 { vec![0.9, 0.1] } else { vec![0.1, 0.9] }).collect();
    let recs = planted_topics(&theta, &phi, 12, 9).unwrap();
    let pg = build_graph(&recs, DuplicatePolicy::Reject).unwrap();
    let t = train(&pg, &LdaConfig { topics: 2, sweeps: 200, seed: 9, ..LdaConfig::default() })
        .unwrap()
        .estimate()
        .unwrap();
    let found: Vec<Vec<f64>> = (0..2)
        .map(|z| (0..items).map(|i| t.item_position(&SyntheticData::item_id(i)).map_or(0.0, |p| t.phi_row(z)[p])).collect())
        .collect();
    let straight = cosine(&found[0], &phi[0]).min(cosine(&found[1], &phi[1]));
    let swapped = cosine(&found[0], &phi[1]).min(cosine(&found[1], &phi[0]));
    let recovery = straight.max(swapped);

    // normalization
    let est = m.estimate().unwrap();
    let mut worst = 0.0f64;
    for u in 0..est.users().len() {
        worst = worst.max((est.theta_row(u).iter().sum::<f64>() - 1.0).abs());
    }
    for z in 0..est.topics() {
        worst = worst.max((est.phi_row(z).iter().sum::<f64>() - 1.0).abs());
    }
    verdict(
        conserved && recovery >= 0.9 && worst <= 1e-9,
        format!("counts conserved over 50 sweeps: {conserved}; planted best-permutation cosine {recovery:.4} (>= 0.9); worst row-sum error {worst:.1e}"),
    )
}

fn worked_category_example() -> Outcome {
    let a: CategoryPath = "Book: Computer & Internet: Database: Data Mining and Data Warehouse: Introduction to Data Mining"
        .parse()
        .unwrap();
    let b: CategoryPath = "Book: Computer & Internet: Database: Data Management: Information Storage and Management"
        .parse()
        .unwrap();
    let s = category_similarity(&a, &b);
    verdict(s == 2.0 / 4.0, format!("two database books: similarity {s} (exactly 2/4)"))
}

fn pipeline_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let data = generate(&SyntheticConfig::small(17)).unwrap();
    let input = dir.path().join("ratings.csv");
    write_ratings_csv(&data.records, std::fs::File::create(&input).unwrap()).unwrap();
    let run = |out: &str| {
        let config = RunConfig {
            input: Some(input.clone()),
            output_dir: dir.path().join(out),
            seed: 2012,
            n_cases: 300,
            n_decoys: 100,
            eval_users: 100,
            sweeps: 30,
            topics: 5,
            ..RunConfig::default()
        };
        cmd_run(&config).unwrap();
        std::fs::read(dir.path().join(out).join("metrics.csv")).unwrap()
    };
    let (a, b) = (run("first"), run("second"));
    verdict(a == b, format!("split, train, recommend, evaluate twice: metrics.csv {} bytes, identical: {}", a.len(), a == b))
}

fn time_ac2(g: &BipartiteGraph, topics: &TopicEstimates, users: &[String]) -> (Duration, Duration) {
    let recs = Recommenders::new(g, Params::default())
        .with_default_item_entropy(None)
        .unwrap()
        .with_topics(topics, None)
        .unwrap();
    let mut worst = Duration::ZERO;
    let mut total = Duration::ZERO;
    for u in users {
        let t = Instant::now();
        recs.recommend(Algorithm::Ac2, u, 10).unwrap();
        let d = t.elapsed();
        worst = worst.max(d);
        total += d;
    }
    (worst, total / users.len() as u32)
}

fn efficiency(ml: Option<&MovieLens>) -> Outcome {
    let Some(ml) = ml else {
        return not_run(NO_DATA);
    };
    let users = ml.sample_users(50, 12);
    let (worst, mean) = time_ac2(&ml.graph, &ml.topics, &users);
    verdict(
        worst <= Duration::from_secs(2),
        format!("AC2 per user at mu=6000, tau=15 over 50 users: worst {worst:.2?}, mean {mean:.2?} (<= 2s)"),
    )
}

fn surrogate_efficiency() -> String {
    let data = generate(&SyntheticConfig::movielens_like(12)).unwrap();
    let g = build_graph(&data.records, DuplicatePolicy::KeepLast).unwrap();
    // per-query cost does not depend on how long the sampler ran
    let topics = train(&g, &LdaConfig { sweeps: 2, seed: 12, ..LdaConfig::default() }).unwrap().estimate().unwrap();
    let users: Vec<String> = (0..20).map(|u| SyntheticData::user_id(u * 300)).collect();
    let (worst, mean) = time_ac2(&g, &topics, &users);
    format!(
        "{} users, {} items, {} ratings: AC2 worst {worst:.2?}, mean {mean:.2?} per user",
        g.num_users(),
        g.num_items(),
        g.num_edges()
    )
}

// ---------------------------------------------------------------------------

struct MovieLens {
    split: LongTailSplit,
    split_time: Duration,
    training: Vec<RatingRecord>,
    protocol: RecallProtocol,
    graph: BipartiteGraph,
    topics: TopicEstimates,
}

impl MovieLens {
    fn load(path: &Path) -> MovieLens {
        let records = dedup_records(&load_ratings(path, RatingFormat::MovieLens).unwrap(), DuplicatePolicy::KeepLast).unwrap();
        let t = Instant::now();
        let split = longtail_split(&records, 0.2).unwrap();
        let split_time = t.elapsed();
        let (training, protocol) = make_recall_protocol(&records, &split, 4000, 1000, 2012).unwrap();
        let graph = build_graph(&training, DuplicatePolicy::KeepLast).unwrap();
        let topics = train(&graph, &LdaConfig { seed: 2012, ..LdaConfig::default() }).unwrap().estimate().unwrap();
        MovieLens { split, split_time, training, protocol, graph, topics }
    }

    /// Test users present in training, `n` of them chosen with `seed`.
    fn sample_users(&self, n: usize, seed: u64) -> Vec<String> {
        let users: Vec<String> = self.protocol.users().into_iter().filter(|u| self.graph.user(u).is_some()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut k = sample(&mut rng, users.len(), n.min(users.len())).into_vec();
        k.sort_unstable();
        k.into_iter().map(|i| users[i].clone()).collect()
    }
}

fn main() -> ExitCode {
    // `cargo test --test acceptance -- 1 5` runs only criteria 1 and 5
    let ml = movielens_path().map(|p| {
        println!("loading MovieLens-1M from {}", p.display());
        MovieLens::load(&p)
    });
    let ml = ml.as_ref();
    let list_run = ml.map(|ml| {
        let users = ml.sample_users(500, 8);
        trend_run(&ml.graph, &ml.training, &ml.protocol, &ml.topics, &users, &[], &[Algorithm::At, Algorithm::Ppr, Algorithm::Lda])
    });

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("oracle equivalence, absorbing time", Box::new(absorbing_time_oracles)),
        ("truncation at 15 sweeps", Box::new(truncation_claim)),
        ("AC degeneracy under unit costs", Box::new(|| ac_degeneracy(ml))),
        ("long-tail split share", Box::new(|| longtail_share(ml))),
        ("recall protocol sanity", Box::new(recall_sanity)),
        ("accuracy trend", Box::new(|| accuracy_trend(ml))),
        ("popularity trend", Box::new(|| popularity_trend(ml, list_run.as_ref()))),
        ("diversity trend", Box::new(|| diversity_trend(ml, list_run.as_ref()))),
        ("LDA correctness", Box::new(lda_correctness)),
        ("category similarity worked example", Box::new(worked_category_example)),
        ("pipeline determinism", Box::new(pipeline_determinism)),
        ("AC2 efficiency envelope", Box::new(|| efficiency(ml))),
    ];

    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        if !selected.is_empty() && !selected.contains(&(k + 1)) {
            continue;
        }
        let outcome = check();
        let tag = match outcome.status {
            Status::Pass => "PASS",
            Status::Fail => {
                failed += 1;
                "FAIL"
            }
            Status::NotRun => "NOT RUN",
        };
        println!("criterion {:>2} [{tag}] {name}: {}", k + 1, outcome.detail);
    }

    if ml.is_none() && selected.is_empty() {
        println!("synthetic stand-ins for the MovieLens criteria (orientation only, not pass/fail):");
        let s = surrogate_trends();
        println!(
            "  surrogate accuracy: Recall@50 AC2 {:.3}, AT {:.3}, HT {:.3}",
            s.recall50[&Algorithm::Ac2],
            s.recall50[&Algorithm::At],
            s.recall50[&Algorithm::Ht]
        );
        println!(
            "  surrogate popularity: Popularity@10 AT {:.1}, PPR {:.1}",
            s.pop10[&Algorithm::At],
            s.pop10[&Algorithm::Ppr]
        );
        println!(
            "  surrogate diversity: AT {:.4}, LDA {:.4}",
            s.div10[&Algorithm::At],
            s.div10[&Algorithm::Lda]
        );
        let data = generate(&SyntheticConfig::movielens_like(4)).unwrap();
        let share = longtail_split(&data.records, 0.2).unwrap().tail_fraction();
        println!("  surrogate tail share: {:.1}% of items (generator tuned toward this shape)", 100.0 * share);
        println!("  surrogate efficiency: {}", surrogate_efficiency());
    }

    if failed > 0 {
        println!("{failed} criterion/criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
