use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use topicmodel::corpus::{read_lines, StopList};
use topicmodel::run::{self, ModelKind, ModelOptions, RunConfig};

#[derive(Parser)]
#[command(name = "topicmodel", version, about = "Fit and evaluate topic models on text corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenize, lemmatize and remove stopwords, one document per line.
    Preprocess {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value = "utf-8")]
        encoding: String,
        /// One stopword per line; defaults to the bundled English list.
        #[arg(long)]
        stoplist: Option<PathBuf>,
    },
    /// Fit a model and write its output files.
    Fit {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        output_dir: PathBuf,
    },
    /// Fit a model and print average coherence for 5, 10 and 20 top words.
    Eval {
        #[command(flatten)]
        model: ModelArgs,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_parser = parse_model)]
    model: ModelKind,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "utf-8")]
    encoding: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    #[arg(long, default_value_t = 5)]
    top_words: usize,
    #[arg(short = 'k', long)]
    topics: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    pseudo_docs: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    label_topics: Option<usize>,
    /// Sentence or tag separator.
    #[arg(long)]
    separator: Option<String>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    #[arg(long)]
    pi: Option<f64>,
    #[arg(long)]
    pi_bar: Option<f64>,
    #[arg(long)]
    gamma_strong: Option<f64>,
    #[arg(long)]
    gamma_bar: Option<f64>,
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = ModelKind::ALL.iter().map(|m| m.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

impl ModelArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            model: self.model,
            iterations: self.iterations,
            top_words: self.top_words,
            seed: self.seed,
            options: ModelOptions {
                topics: self.topics,
                alpha: self.alpha,
                beta: self.beta,
                gamma: self.gamma,
                lambda: self.lambda,
                pseudo_docs: self.pseudo_docs,
                window: self.window,
                label_topics: self.label_topics,
                separator: self.separator.clone(),
                s: self.s,
                t: self.t,
                x: self.x,
                y: self.y,
                pi: self.pi,
                pi_bar: self.pi_bar,
                gamma_strong: self.gamma_strong,
                gamma_bar: self.gamma_bar,
            },
        }
    }
}

fn execute(command: Command) -> topicmodel::Result<()> {
    match command {
        Command::Preprocess {
            input,
            output,
            encoding,
            stoplist,
        } => {
            let stoplist = match stoplist {
                Some(path) => StopList::from_file(path)?,
                None => StopList::english(),
            };
            let summary = run::preprocess_file(&input, &encoding, &stoplist, &output)?;
            eprintln!(
                "wrote {} documents to {}, dropped {} empty lines",
                summary.written,
                output.display(),
                summary.dropped
            );
        }
        Command::Fit { model, output_dir } => {
            let config = model.config();
            for path in run::run(&config, &model.input, &model.encoding, &output_dir)? {
                eprintln!("wrote {}", path.display());
            }
        }
        Command::Eval { model } => {
            let config = model.config();
            config.validate()?;
            let corpus = run::parse_corpus(&config, &read_lines(&model.input, &model.encoding)?)?;
            let out = run::fit_model(&config, &corpus)?;
            print!("{}", run::coherence_report(&corpus, &out.phi)?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match execute(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
