use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use longtail::dataset::RatingFormat;
use longtail::pipeline::{self, RunConfig, OUTPUT_DIR_ENV};
use longtail::recommend::Algorithm;
use longtail::Result;

#[derive(Parser)]
#[command(name = "longtail", version, about = "Long-tail recommendation over user-item rating graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Overrides,
}

#[derive(Subcommand)]
enum Command {
    /// Build the rating graph and print its size and density
    Ingest,
    /// Long-tail split and held-out recall protocol
    Split,
    /// Fit the LDA topic model on the training split
    TrainLda,
    /// Recommendation lists and held-out ranks per algorithm
    Recommend,
    /// Metrics report over the recommend outputs
    Evaluate,
    /// split, train-lda, recommend and evaluate in sequence
    Run,
    /// Print the effective configuration as TOML
    Config,
}

#[derive(Args)]
struct Overrides {
    /// TOML config file; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Rating file
    #[arg(long, short, global = true)]
    input: Option<PathBuf>,
    /// movielens or csv; inferred from the extension by default
    #[arg(long, global = true)]
    format: Option<RatingFormat>,
    /// Comma separated tags: HT, AT, AC1, AC2, PPR, DPPR, LDA
    #[arg(long, short, global = true, value_delimiter = ',')]
    algorithms: Option<Vec<Algorithm>>,
    /// List length
    #[arg(long, short, global = true)]
    k: Option<usize>,
    /// Item bound of the candidate region around the query
    #[arg(long, global = true)]
    mu: Option<usize>,
    /// Sweeps of the truncated walk solvers
    #[arg(long, global = true)]
    tau: Option<usize>,
    /// Solve hitting time exactly
    #[arg(long, global = true)]
    exact_hitting_time: bool,
    /// Absorbing-cost user to item step cost
    #[arg(long, global = true)]
    c: Option<f64>,
    /// Number of LDA topics
    #[arg(long, global = true)]
    topics: Option<usize>,
    /// LDA user-topic prior; 50 / topics when unset
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// LDA topic-item prior
    #[arg(long, global = true)]
    beta: Option<f64>,
    /// Gibbs sweeps
    #[arg(long, global = true)]
    sweeps: Option<usize>,
    /// PPR restart probability
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Share of ratings covered by the long tail
    #[arg(long, global = true)]
    r_percent: Option<f64>,
    /// Held-out test cases
    #[arg(long, global = true)]
    n_cases: Option<usize>,
    /// Unrated decoy items per test case
    #[arg(long, global = true)]
    n_decoys: Option<usize>,
    /// Users receiving lists for the list metrics
    #[arg(long, global = true)]
    eval_users: Option<usize>,
    /// Item count for diversity; the training catalogue when unset
    #[arg(long, global = true)]
    item_universe: Option<usize>,
    /// item_id<TAB>Category:Sub:... file for the similarity metric
    #[arg(long, global = true)]
    ontology: Option<PathBuf>,
    /// Master seed for every random stream
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, short, global = true, env = OUTPUT_DIR_ENV)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn resolve(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => { $(if let Some(v) = self.$field { c.$field = v; })* };
        }
        set!(k, mu, tau, topics, beta, sweeps, lambda, r_percent, n_cases, n_decoys, eval_users, seed, algorithms);
        if self.input.is_some() {
            c.input = self.input;
        }
        if self.format.is_some() {
            c.format = self.format;
        }
        if self.c.is_some() {
            c.c = self.c;
        }
        if self.alpha.is_some() {
            c.alpha = self.alpha;
        }
        if self.item_universe.is_some() {
            c.item_universe = self.item_universe;
        }
        if self.ontology.is_some() {
            c.ontology = self.ontology;
        }
        if let Some(out) = self.out {
            c.output_dir = out;
        }
        c.exact_hitting_time |= self.exact_hitting_time;
        c.validate()?;
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<()> {
    let config = cli.opts.resolve()?;
    match cli.command {
        Command::Ingest => {
            let r = pipeline::cmd_ingest(&config)?;
            println!("users\t{}\nitems\t{}\nratings\t{}\ndensity\t{:.4}%", r.users, r.items, r.ratings, 100.0 * r.density);
        }
        Command::Split => {
            let s = pipeline::cmd_split(&config)?;
            println!(
                "tail items\t{} of {}\ntest cases\t{}\ndecoys\t{}\ntraining ratings\t{}",
                s.tail_items, s.items, s.cases, s.decoys, s.training_ratings
            );
        }
        Command::TrainLda => {
            let t = pipeline::cmd_train_lda(&config)?;
            println!("topics\t{}\nusers\t{}\nitems\t{}", t.topics(), t.users().len(), t.items().len());
        }
        Command::Recommend => pipeline::cmd_recommend(&config)?,
        Command::Evaluate => print!("{}", pipeline::cmd_evaluate(&config)?.summary()),
        Command::Run => print!("{}", pipeline::cmd_run(&config)?.summary()),
        Command::Config => print!("{}", config.to_toml_string()),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(pipeline::exit_code(&e) as u8)
        }
    }
}
