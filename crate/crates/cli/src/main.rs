use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use descent_core::corpus::SearchMode;
use descent_core::present::Limits;

mod commands;

/// Decide descent properties of functors between finite categories.
#[derive(Debug, Parser)]
#[command(name = "fincat-descent", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a category, functor or presentation file.
    Validate {
        file: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Check a single property of a functor.
    Check {
        property: Property,
        functor: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Karoubi envelope of a category.
    Karoubi {
        category: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Codescent presentation of a functor and its finitization.
    Codescent {
        functor: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Descent and effective descent verdicts.
    Descent {
        functor: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Descent report checked against the bounded brute-force oracle.
    Oracle {
        functor: PathBuf,
        /// Largest set size of enumerated functors.
        #[arg(long, default_value_t = 2)]
        bound: usize,
        /// Require gluing maps to be bijections.
        #[arg(long)]
        invertible: bool,
        /// Most presheaves and descent data enumerated.
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
        #[command(flatten)]
        limits: LimitArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Check every invariant over curated, exhaustive and random functors.
    Corpus(CorpusArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Property {
    Ff,
    Laxepi,
    Equiv,
}

#[derive(Debug, Args)]
struct LimitArgs {
    /// Longest rewrite rule and longest enumerated normal form.
    #[arg(long, default_value_t = Limits::default().max_word_len)]
    max_word_len: usize,
    /// Most rules created during completion.
    #[arg(long, default_value_t = Limits::default().max_rules)]
    max_rules: usize,
}

impl LimitArgs {
    fn limits(&self) -> Limits {
        Limits {
            max_word_len: self.max_word_len,
            max_rules: self.max_rules,
            ..Limits::default()
        }
    }
}

#[derive(Debug, Args)]
struct Output {
    /// Also write the JSON report here (`-` for standard output).
    #[arg(long, value_name = "PATH")]
    json_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Sweep every functor between small categories.
    #[arg(long)]
    exhaustive: bool,
    /// Object bound of the exhaustive sweep.
    #[arg(long, default_value_t = 2)]
    max_objects: usize,
    /// Morphism bound of the exhaustive sweep.
    #[arg(long, default_value_t = 5)]
    max_morphisms: usize,
    /// Number of random functors.
    #[arg(long, default_value_t = 500)]
    random: usize,
    #[arg(long, default_value_t = 3)]
    random_max_objects: usize,
    #[arg(long, default_value_t = 8)]
    random_max_morphisms: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exploratory search, e.g. `descent-not-effective`.
    #[arg(long)]
    search: Option<SearchMode>,
    /// Skip the curated examples.
    #[arg(long)]
    no_curated: bool,
    #[command(flatten)]
    limits: LimitArgs,
    #[command(flatten)]
    output: Output,
}

fn main() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => ExitCode::from(commands::run(cli.command)),
        Err(e) => {
            let _ = e.print();
            // usage errors are invalid input, not an undecided verdict
            ExitCode::from(if e.use_stderr() { 3 } else { 0 })
        }
    }
}
