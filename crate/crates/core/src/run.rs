//! Model selection, hyperparameter resolution and the output files of a fit.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::corpus::{self, parse_plain, parse_sentences, parse_tagged, Corpus, StopList, TagKind};
use crate::counts::Matrix;
use crate::dual_sparse::{self, SparseHyper};
use crate::error::{Error, Result};
use crate::eval::average_coherence;
use crate::hdp::{self, HdpHyper};
use crate::lda::{fit_cvb0, fit_gibbs, FittedLda, LdaHyper};
use crate::linked::{fit_atm, fit_link_lda, LinkLdaHyper};
use crate::mixture::{fit_dmm, fit_dpmm, MixtureFit, MixtureHyper};
use crate::report::{
    render_column, DocTopicFile, NamedRowsFile, SparsityFile, SparsityKind, TopicHeader, TopicWordFile,
};
use crate::sampling::SeededRng;
use crate::sentence_lda;
use crate::short_text::{fit_btm, fit_ptm, BtmHyper, PtmHyper};
use crate::supervised::{fit_labeled, fit_plda, PldaHyper, TopicLabel};

/// The thirteen fitting algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    LdaGibbs,
    LdaCvb0,
    SentenceLda,
    Hdp,
    Dmm,
    Dpmm,
    Ptm,
    Btm,
    Atm,
    LinkLda,
    LabeledLda,
    Plda,
    DualSparse,
}

/// Layout of the input file a model reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputFormat {
    Plain,
    Sentences,
    Tagged(TagKind),
}

impl ModelKind {
    pub const ALL: [ModelKind; 13] = [
        ModelKind::LdaGibbs,
        ModelKind::LdaCvb0,
        ModelKind::SentenceLda,
        ModelKind::Hdp,
        ModelKind::Dmm,
        ModelKind::Dpmm,
        ModelKind::Ptm,
        ModelKind::Btm,
        ModelKind::Atm,
        ModelKind::LinkLda,
        ModelKind::LabeledLda,
        ModelKind::Plda,
        ModelKind::DualSparse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::LdaGibbs => "lda-gibbs",
            ModelKind::LdaCvb0 => "lda-cvb0",
            ModelKind::SentenceLda => "sentence-lda",
            ModelKind::Hdp => "hdp",
            ModelKind::Dmm => "dmm",
            ModelKind::Dpmm => "dpmm",
            ModelKind::Ptm => "ptm",
            ModelKind::Btm => "btm",
            ModelKind::Atm => "atm",
            ModelKind::LinkLda => "link-lda",
            ModelKind::LabeledLda => "labeled-lda",
            ModelKind::Plda => "plda",
            ModelKind::DualSparse => "dual-sparse",
        }
    }

    pub fn input_format(self) -> InputFormat {
        match self {
            ModelKind::SentenceLda => InputFormat::Sentences,
            ModelKind::Atm => InputFormat::Tagged(TagKind::Authors),
            ModelKind::LinkLda => InputFormat::Tagged(TagKind::Links),
            ModelKind::LabeledLda | ModelKind::Plda => InputFormat::Tagged(TagKind::Labels),
            _ => InputFormat::Plain,
        }
    }

    /// Sentence or tag separator used when none is given.
    pub fn default_separator(self) -> Option<&'static str> {
        match self.input_format() {
            InputFormat::Plain => None,
            InputFormat::Sentences | InputFormat::Tagged(TagKind::Links) => Some("--"),
            InputFormat::Tagged(_) => Some(","),
        }
    }

    fn accepts(self, option: Opt) -> bool {
        use Opt::*;
        let allowed: &[Opt] = match self {
            ModelKind::LdaGibbs | ModelKind::LdaCvb0 | ModelKind::Dmm | ModelKind::Dpmm => {
                &[Topics, Alpha, Beta]
            }
            ModelKind::SentenceLda | ModelKind::Atm => &[Topics, Alpha, Beta, Separator],
            ModelKind::Hdp => &[Topics, Alpha, Beta, Gamma],
            ModelKind::Ptm => &[Topics, Alpha, Beta, Lambda, PseudoDocs],
            ModelKind::Btm => &[Topics, Alpha, Beta, Window],
            ModelKind::LinkLda => &[Topics, Alpha, Beta, Gamma, Separator],
            ModelKind::LabeledLda => &[Alpha, Beta, Separator],
            ModelKind::Plda => &[Alpha, Beta, LabelTopics, Separator],
            ModelKind::DualSparse => &[Topics, S, T, X, Y, Pi, PiBar, GammaStrong, GammaBar],
        };
        allowed.contains(&option)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid("model", format!("unknown model {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Opt {
    Topics,
    Alpha,
    Beta,
    Gamma,
    Lambda,
    PseudoDocs,
    Window,
    LabelTopics,
    Separator,
    S,
    T,
    X,
    Y,
    Pi,
    PiBar,
    GammaStrong,
    GammaBar,
}

impl Opt {
    fn flag(self) -> &'static str {
        match self {
            Opt::Topics => "--topics",
            Opt::Alpha => "--alpha",
            Opt::Beta => "--beta",
            Opt::Gamma => "--gamma",
            Opt::Lambda => "--lambda",
            Opt::PseudoDocs => "--pseudo-docs",
            Opt::Window => "--window",
            Opt::LabelTopics => "--label-topics",
            Opt::Separator => "--separator",
            Opt::S => "--s",
            Opt::T => "--t",
            Opt::X => "--x",
            Opt::Y => "--y",
            Opt::Pi => "--pi",
            Opt::PiBar => "--pi-bar",
            Opt::GammaStrong => "--gamma-strong",
            Opt::GammaBar => "--gamma-bar",
        }
    }
}

/// Model-specific settings; `None` selects the default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelOptions {
    pub topics: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub pseudo_docs: Option<usize>,
    pub window: Option<usize>,
    pub label_topics: Option<usize>,
    pub separator: Option<String>,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub pi: Option<f64>,
    pub pi_bar: Option<f64>,
    pub gamma_strong: Option<f64>,
    pub gamma_bar: Option<f64>,
}

impl ModelOptions {
    fn given(&self) -> Vec<Opt> {
        let flags = [
            (Opt::Topics, self.topics.is_some()),
            (Opt::Alpha, self.alpha.is_some()),
            (Opt::Beta, self.beta.is_some()),
            (Opt::Gamma, self.gamma.is_some()),
            (Opt::Lambda, self.lambda.is_some()),
            (Opt::PseudoDocs, self.pseudo_docs.is_some()),
            (Opt::Window, self.window.is_some()),
            (Opt::LabelTopics, self.label_topics.is_some()),
            (Opt::Separator, self.separator.is_some()),
            (Opt::S, self.s.is_some()),
            (Opt::T, self.t.is_some()),
            (Opt::X, self.x.is_some()),
            (Opt::Y, self.y.is_some()),
            (Opt::Pi, self.pi.is_some()),
            (Opt::PiBar, self.pi_bar.is_some()),
            (Opt::GammaStrong, self.gamma_strong.is_some()),
            (Opt::GammaBar, self.gamma_bar.is_some()),
        ];
        flags.into_iter().filter(|f| f.1).map(|f| f.0).collect()
    }
}

/// Everything a fit needs besides the corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub iterations: usize,
    pub top_words: usize,
    pub seed: u64,
    pub options: ModelOptions,
}

impl RunConfig {
    pub fn new(model: ModelKind) -> Self {
        RunConfig {
            model,
            iterations: 1000,
            top_words: 5,
            seed: 42,
            options: ModelOptions::default(),
        }
    }

    /// Rejects options the chosen model does not read.
    pub fn validate(&self) -> Result<()> {
        if let Some(opt) = self.options.given().into_iter().find(|&o| !self.model.accepts(o)) {
            return Err(Error::invalid(opt.flag(), format!("not used by model {}", self.model)));
        }
        if self.top_words == 0 {
            return Err(Error::invalid("--top-words", "must be at least 1"));
        }
        Ok(())
    }

    fn topics(&self) -> usize {
        self.options.topics.unwrap_or(10)
    }

    fn alpha(&self) -> f64 {
        self.options.alpha.unwrap_or(0.1)
    }

    fn beta(&self) -> f64 {
        let default = if self.model == ModelKind::Ptm { 0.1 } else { 0.01 };
        self.options.beta.unwrap_or(default)
    }

    fn gamma(&self) -> f64 {
        self.options.gamma.unwrap_or(0.1)
    }

    fn lda_hyper(&self) -> LdaHyper {
        LdaHyper::new(self.topics(), self.alpha(), self.beta(), self.iterations)
    }

    pub fn separator(&self) -> Option<&str> {
        self.options.separator.as_deref().or(self.model.default_separator())
    }

    fn sparse_hyper(&self) -> SparseHyper {
        let o = &self.options;
        SparseHyper {
            topics: self.topics(),
            s: o.s.unwrap_or(1.0),
            t: o.t.unwrap_or(1.0),
            x: o.x.unwrap_or(1.0),
            y: o.y.unwrap_or(1.0),
            pi: o.pi.unwrap_or(0.1),
            pi_bar: o.pi_bar.unwrap_or(1e-12),
            gamma: o.gamma_strong.unwrap_or(0.1),
            gamma_bar: o.gamma_bar.unwrap_or(1e-12),
            iterations: self.iterations,
        }
    }
}

/// Parses input lines in the layout the model expects.
pub fn parse_corpus<S: AsRef<str>>(config: &RunConfig, lines: &[S]) -> Result<Corpus> {
    let lines = lines.iter().map(AsRef::as_ref);
    let sep = config.separator().unwrap_or_default();
    match config.model.input_format() {
        InputFormat::Plain => parse_plain(lines),
        InputFormat::Sentences => parse_sentences(lines, sep),
        InputFormat::Tagged(kind) => parse_tagged(lines, sep, kind),
    }
}

/// Output files of a fit plus the topic-word matrix used for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOutput {
    /// `(file name, content)` in write order.
    pub files: Vec<(String, String)>,
    pub phi: Matrix<f64>,
}

fn plain(_: usize) -> TopicHeader {
    TopicHeader::Plain
}

fn topic_words(phi: &Matrix<f64>, corpus: &Corpus, top: usize, header: impl Fn(usize) -> TopicHeader) -> String {
    TopicWordFile::from_rows(phi, top, |v| corpus.vocab().word(v), header).render()
}

fn doc_topic(theta: &Matrix<f64>) -> String {
    DocTopicFile { theta: theta.clone() }.render()
}

fn lda_files(prefix: &str, fit: FittedLda, corpus: &Corpus, top: usize) -> FitOutput {
    let k = fit.topics();
    FitOutput {
        files: vec![
            (format!("{prefix}_topic_word_{k}.txt"), topic_words(&fit.phi, corpus, top, plain)),
            (format!("{prefix}_doc_topic{k}.txt"), doc_topic(&fit.theta)),
        ],
        phi: fit.phi,
    }
}

fn mixture_files(prefix: &str, fit: MixtureFit, corpus: &Corpus, top: usize) -> FitOutput {
    let k = fit.theta.len();
    let ids: Vec<usize> = fit.doc_cluster.iter().map(|c| c + 1).collect();
    FitOutput {
        files: vec![
            (format!("{prefix}_doc_cluster{k}.txt"), render_column(&ids)),
            (format!("{prefix}_cluster_word_{k}.txt"), topic_words(&fit.phi, corpus, top, plain)),
            (format!("{prefix}_theta_{k}.txt"), render_column(&fit.theta)),
        ],
        phi: fit.phi,
    }
}

fn tags(corpus: &Corpus, kind: TagKind) -> Result<&corpus::Tags> {
    corpus.tags(kind).ok_or(Error::MissingStructure("tags"))
}

fn transpose(m: &Matrix<f64>) -> Matrix<f64> {
    let mut t = Matrix::zeros(m.cols(), m.rows());
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            t.set(c, r, m.get(r, c));
        }
    }
    t
}

/// Fits the configured model and renders its output files.
pub fn fit_model(config: &RunConfig, corpus: &Corpus) -> Result<FitOutput> {
    config.validate()?;
    let mut rng = SeededRng::from_u64(config.seed);
    let rng = &mut rng;
    let top = config.top_words;
    let out = match config.model {
        ModelKind::LdaGibbs => lda_files("LDAGibbs", fit_gibbs(corpus, config.lda_hyper(), rng)?, corpus, top),
        ModelKind::LdaCvb0 => lda_files("CVBLDA", fit_cvb0(corpus, config.lda_hyper(), rng)?, corpus, top),
        ModelKind::Hdp => {
            let hyper = HdpHyper {
                initial_topics: config.topics(),
                alpha0: config.alpha(),
                beta: config.beta(),
                gamma: config.gamma(),
                iterations: config.iterations,
            };
            lda_files("HDP", hdp::fit(corpus, hyper, rng)?, corpus, top)
        }
        ModelKind::SentenceLda => {
            let fit = sentence_lda::fit(corpus, config.lda_hyper(), rng)?;
            let k = fit.topics();
            FitOutput {
                files: vec![
                    (format!("SentenceLDA_topic_word{k}.txt"), topic_words(&fit.phi, corpus, top, plain)),
                    (format!("SentenceLDA_doc_topic_{k}.txt"), doc_topic(&fit.theta)),
                ],
                phi: fit.phi,
            }
        }
        ModelKind::Dmm | ModelKind::Dpmm => {
            let hyper = MixtureHyper::new(config.topics(), config.alpha(), config.beta(), config.iterations);
            if config.model == ModelKind::Dmm {
                mixture_files("DMM", fit_dmm(corpus, hyper, rng)?, corpus, top)
            } else {
                mixture_files("DPMM", fit_dpmm(corpus, hyper, rng)?, corpus, top)
            }
        }
        ModelKind::Ptm => {
            let hyper = PtmHyper {
                pseudo_docs: config.options.pseudo_docs.unwrap_or(100),
                topics: config.topics(),
                alpha: config.alpha(),
                beta: config.beta(),
                lambda: config.options.lambda.unwrap_or(0.01),
                iterations: config.iterations,
            };
            let fit = fit_ptm(corpus, hyper, rng)?;
            let k = fit.phi.rows();
            FitOutput {
                files: vec![
                    (format!("PseudoDTM_topic_word_{k}.txt"), topic_words(&fit.phi, corpus, top, plain)),
                    (format!("PseudoDTM_pseudo_topic{k}.txt"), doc_topic(&fit.pseudo_theta)),
                    (format!("PseudoDTM_doc_topic{k}.txt"), doc_topic(&fit.theta)),
                ],
                phi: fit.phi,
            }
        }
        ModelKind::Btm => {
            let hyper = BtmHyper {
                topics: config.topics(),
                alpha: config.alpha(),
                beta: config.beta(),
                window: config.options.window.unwrap_or(5),
                iterations: config.iterations,
            };
            let fit = fit_btm(corpus, hyper, rng)?;
            let k = fit.phi.rows();
            FitOutput {
                files: vec![
                    (format!("BTM_topic_word_{k}.txt"), topic_words(&fit.phi, corpus, top, plain)),
                    (format!("BTM_topic_theta_{k}.txt"), render_column(&fit.theta)),
                    (format!("BTM_doc_topic_{k}.txt"), doc_topic(&fit.doc_topic)),
                ],
                phi: fit.phi,
            }
        }
        ModelKind::Atm => {
            let fit = fit_atm(corpus, config.lda_hyper(), rng)?;
            let authors = &tags(corpus, TagKind::Authors)?.vocab;
            let k = fit.phi.rows();
            let by_topic = transpose(&fit.theta);
            FitOutput {
                files: vec![
                    (format!("authorTM_topic_word{k}.txt"), topic_words(&fit.phi, corpus, top, plain)),
                    (
                        format!("authorTM_author_topic_{k}.txt"),
                        NamedRowsFile::from_matrix(&fit.theta, |a| authors.word(a)).render(),
                    ),
                    (
                        format!("authorTM_topic_author_{k}.txt"),
                        TopicWordFile::from_rows(&by_topic, top, |a| authors.word(a), plain).render(),
                    ),
                ],
                phi: fit.phi,
            }
        }
        ModelKind::LinkLda => {
            let hyper = LinkLdaHyper {
                topics: config.topics(),
                alpha: config.alpha(),
                beta: config.beta(),
                gamma: config.gamma(),
                iterations: config.iterations,
            };
            let fit = fit_link_lda(corpus, hyper, rng)?;
            let links = &tags(corpus, TagKind::Links)?.vocab;
            let k = fit.phi.rows();
            FitOutput {
                files: vec![
                    (format!("LinkLDA_topic_word_{k}.txt"), topic_words(&fit.phi, corpus, top, plain)),
                    (
                        format!("LinkLDA_topic_link_{k}.txt"),
                        TopicWordFile::from_rows(&fit.link_phi, top, |l| links.word(l), plain).render(),
                    ),
                    (format!("LinkLDA_doc_topic_{k}.txt"), doc_topic(&fit.theta)),
                ],
                phi: fit.phi,
            }
        }
        ModelKind::LabeledLda => {
            let fit = fit_labeled(corpus, config.lda_hyper(), rng)?;
            let labels = &tags(corpus, TagKind::Labels)?.vocab;
            let k = fit.topics();
            FitOutput {
                files: vec![
                    (
                        format!("LabeledLDA_topic_word_{k}.txt"),
                        topic_words(&fit.phi, corpus, top, |t| TopicHeader::Label(labels.word(t).to_owned())),
                    ),
                    (format!("LabeledLDA_doc_topic{k}.txt"), doc_topic(&fit.theta)),
                ],
                phi: fit.phi,
            }
        }
        ModelKind::Plda => {
            let hyper = PldaHyper {
                topics_per_label: config.options.label_topics.unwrap_or(2),
                alpha: config.alpha(),
                beta: config.beta(),
                background: true,
                iterations: config.iterations,
            };
            let fit = fit_plda(corpus, hyper, rng)?;
            let labels = &tags(corpus, TagKind::Labels)?.vocab;
            let n = labels.len() + 1;
            let related = |t: usize| {
                TopicHeader::Related(match fit.topic_labels[t] {
                    TopicLabel::Label(l) => labels.word(l).to_owned(),
                    TopicLabel::Background => "global label".to_owned(),
                })
            };
            FitOutput {
                files: vec![
                    (format!("PLDA_topic_word_{n}.txt"), topic_words(&fit.phi, corpus, top, related)),
                    (format!("PLDA_doc_topic{n}.txt"), doc_topic(&fit.theta)),
                ],
                phi: fit.phi,
            }
        }
        ModelKind::DualSparse => {
            let fit = dual_sparse::fit(corpus, config.sparse_hyper(), rng)?;
            let k = fit.phi.rows();
            let tv = SparsityFile {
                kind: SparsityKind::TopicWord,
                ratios: fit.topic_sparsity.clone(),
                average: fit.avg_topic_sparsity,
            };
            let dt = SparsityFile {
                kind: SparsityKind::DocTopic,
                ratios: fit.doc_sparsity.clone(),
                average: fit.avg_doc_sparsity,
            };
            FitOutput {
                files: vec![
                    (format!("dualSLDA_topic_word_{k}.txt"), topic_words(&fit.phi, corpus, top, plain)),
                    (format!("dualSLDA_doc_topic_{k}.txt"), doc_topic(&fit.theta)),
                    (format!("dualSLDA_sparseRatio_TV{k}.txt"), tv.render()),
                    (format!("dualSLDA_sparseRatio_DT{k}.txt"), dt.render()),
                ],
                phi: fit.phi,
            }
        }
    };
    Ok(out)
}

/// Reads `input`, fits, and writes every output file into `output_dir`.
pub fn run(config: &RunConfig, input: &Path, encoding: &str, output_dir: &Path) -> Result<Vec<PathBuf>> {
    config.validate()?;
    let lines = corpus::read_lines(input, encoding)?;
    let corpus = parse_corpus(config, &lines)?;
    let out = fit_model(config, &corpus)?;
    std::fs::create_dir_all(output_dir).map_err(|e| Error::io(output_dir, e))?;
    let mut written = Vec::with_capacity(out.files.len());
    for (name, content) in &out.files {
        let path = output_dir.join(name);
        std::fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

/// Top-word list sizes reported by [`coherence_report`].
pub const COHERENCE_SIZES: [usize; 3] = [5, 10, 20];

/// `average_coherence_<N>:\t<value>` lines for each N in [`COHERENCE_SIZES`].
pub fn coherence_report(corpus: &Corpus, phi: &Matrix<f64>) -> Result<String> {
    let mut out = String::new();
    for n in COHERENCE_SIZES {
        let c = average_coherence(corpus.docs(), phi, n)?;
        out.push_str(&format!("average_coherence_{n}:\t{c}\n"));
    }
    Ok(out)
}

/// Line counts of a preprocessing pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreprocessSummary {
    pub written: usize,
    pub dropped: usize,
}

/// Cleans every line of `input` into `output`; lines left empty are omitted.
pub fn preprocess_file(
    input: &Path,
    encoding: &str,
    stoplist: &StopList,
    output: &Path,
) -> Result<PreprocessSummary> {
    let lines = corpus::read_lines(input, encoding)?;
    let mut text = String::new();
    let mut summary = PreprocessSummary { written: 0, dropped: 0 };
    for line in &lines {
        let cleaned = corpus::preprocess(line, stoplist);
        if cleaned.is_empty() {
            summary.dropped += 1;
        } else {
            text.push_str(&cleaned);
            text.push('\n');
            summary.written += 1;
        }
    }
    if lines.is_empty() {
        log::warn!("{}: input is empty", input.display());
    }
    std::fs::write(output, text).map_err(|e| Error::io(output, e))?;
    Ok(summary)
}
