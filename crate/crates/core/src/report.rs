//! Text output formats: topic blocks, document-topic matrices and value columns.
//!
//! Probabilities are written with Rust's shortest round-trip `Display`, so a
//! parsed file reproduces the in-memory values exactly.

use std::fmt::Write as _;

use crate::counts::Matrix;
use crate::error::{Error, Result};
use crate::eval::top_indices;

/// Label annotation of a topic block header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopicHeader {
    /// `Topic:<i>`
    Plain,
    /// `Topic:<i>(<label>)`
    Label(String),
    /// `Topic:<i>\tRelated label:<name>`
    Related(String),
}

/// One ranked list of items under a topic header.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicBlock {
    pub header: TopicHeader,
    pub entries: Vec<(String, f64)>,
}

/// A sequence of topic blocks numbered from 1.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TopicWordFile {
    pub blocks: Vec<TopicBlock>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| parse_err(line, format!("not a number: {s:?}")))
}

impl TopicWordFile {
    /// Ranks each row of `weights` and names the top `top` columns with `name`.
    pub fn from_rows<'a>(
        weights: &Matrix<f64>,
        top: usize,
        name: impl Fn(usize) -> &'a str,
        header: impl Fn(usize) -> TopicHeader,
    ) -> Self {
        let blocks = weights
            .iter_rows()
            .enumerate()
            .map(|(k, row)| TopicBlock {
                header: header(k),
                entries: top_indices(row, top)
                    .into_iter()
                    .map(|v| (name(v).to_owned(), row[v]))
                    .collect(),
            })
            .collect();
        TopicWordFile { blocks }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, block) in self.blocks.iter().enumerate() {
            let _ = match &block.header {
                TopicHeader::Plain => writeln!(out, "Topic:{}", i + 1),
                TopicHeader::Label(l) => writeln!(out, "Topic:{}({l})", i + 1),
                TopicHeader::Related(l) => writeln!(out, "Topic:{}\tRelated label:{l}", i + 1),
            };
            for (item, p) in &block.entries {
                let _ = writeln!(out, "{item} :{p}");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the rendered grammar; topic numbers must run 1, 2, ... in order.
    pub fn parse(text: &str) -> Result<Self> {
        let mut blocks: Vec<TopicBlock> = Vec::new();
        let mut open = false;
        for (i, line) in text.lines().enumerate() {
            let lineno = i + 1;
            if line.is_empty() {
                open = false;
                continue;
            }
            if !open {
                let rest = line
                    .strip_prefix("Topic:")
                    .ok_or_else(|| parse_err(lineno, "expected a Topic: header"))?;
                let rest = rest.trim_start();
                let digits = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
                let number: usize = rest[..digits]
                    .parse()
                    .map_err(|_| parse_err(lineno, "missing topic number"))?;
                if number != blocks.len() + 1 {
                    return Err(parse_err(lineno, format!("topic {number} out of sequence")));
                }
                let tail = &rest[digits..];
                let header = if tail.is_empty() {
                    TopicHeader::Plain
                } else if let Some(name) = tail.strip_prefix("\tRelated label:") {
                    TopicHeader::Related(name.to_owned())
                } else if let Some(label) = tail.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
                    TopicHeader::Label(label.to_owned())
                } else {
                    return Err(parse_err(lineno, format!("malformed header tail {tail:?}")));
                };
                blocks.push(TopicBlock {
                    header,
                    entries: Vec::new(),
                });
                open = true;
            } else {
                let (item, p) = line
                    .rsplit_once(" :")
                    .ok_or_else(|| parse_err(lineno, "expected \"item :probability\""))?;
                let p = parse_f64(p, lineno)?;
                if let Some(block) = blocks.last_mut() {
                    block.entries.push((item.to_owned(), p));
                }
            }
        }
        Ok(TopicWordFile { blocks })
    }
}

/// Header line `Topic1 ... TopicK` followed by one space-separated row per document.
#[derive(Debug, Clone, PartialEq)]
pub struct DocTopicFile {
    pub theta: Matrix<f64>,
}

impl DocTopicFile {
    pub fn render(&self) -> String {
        let k = self.theta.cols();
        let mut out = (1..=k).map(|i| format!("Topic{i}")).collect::<Vec<_>>().join(" ");
        out.push('\n');
        for row in self.theta.iter_rows() {
            out.push_str(&join_values(row));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let names: Vec<&str> = header.split_whitespace().collect();
        for (i, name) in names.iter().enumerate() {
            if *name != format!("Topic{}", i + 1) {
                return Err(parse_err(1, format!("unexpected column name {name:?}")));
            }
        }
        let k = names.len();
        let mut data = Vec::new();
        let mut rows = 0;
        for (i, line) in lines.enumerate() {
            let values = parse_row(line, i + 2)?;
            if values.len() != k {
                return Err(parse_err(i + 2, format!("expected {k} values, found {}", values.len())));
            }
            data.extend(values);
            rows += 1;
        }
        Ok(DocTopicFile {
            theta: Matrix::from_vec(rows, k, data)?,
        })
    }
}

fn join_values(row: &[f64]) -> String {
    row.iter().map(f64::to_string).collect::<Vec<_>>().join(" ")
}

fn parse_row(line: &str, lineno: usize) -> Result<Vec<f64>> {
    line.split_whitespace().map(|s| parse_f64(s, lineno)).collect()
}

/// One value per line.
pub fn render_column<T: std::fmt::Display>(values: &[T]) -> String {
    values.iter().map(|v| format!("{v}\n")).collect()
}

pub fn parse_column<T: std::str::FromStr>(text: &str) -> Result<Vec<T>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| {
            l.trim()
                .parse()
                .map_err(|_| parse_err(i + 1, format!("bad value {l:?}")))
        })
        .collect()
}

/// Lines of `<name> <v1> ... <vK>`; names may contain spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedRowsFile {
    pub rows: Vec<(String, Vec<f64>)>,
}

impl NamedRowsFile {
    pub fn from_matrix<'a>(values: &Matrix<f64>, name: impl Fn(usize) -> &'a str) -> Self {
        NamedRowsFile {
            rows: values
                .iter_rows()
                .enumerate()
                .map(|(i, r)| (name(i).to_owned(), r.to_vec()))
                .collect(),
        }
    }

    pub fn render(&self) -> String {
        self.rows
            .iter()
            .map(|(name, row)| format!("{name} {}\n", join_values(row)))
            .collect()
    }

    /// `cols` values are taken from the end of each line; the rest is the name.
    pub fn parse(text: &str, cols: usize) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let fields: Vec<&str> = line.split(' ').collect();
            if fields.len() <= cols {
                return Err(parse_err(i + 1, "too few fields"));
            }
            let split = fields.len() - cols;
            let values = fields[split..]
                .iter()
                .map(|s| parse_f64(s, i + 1))
                .collect::<Result<Vec<_>>>()?;
            rows.push((fields[..split].join(" "), values));
        }
        Ok(NamedRowsFile { rows })
    }
}

/// Which distribution a sparsity file describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SparsityKind {
    TopicWord,
    DocTopic,
}

impl SparsityKind {
    fn footer(self) -> &'static str {
        match self {
            SparsityKind::TopicWord => "average saprse ratio of topic_word:",
            SparsityKind::DocTopic => "average saprse ratio of doc_topic:",
        }
    }
}

/// Per-row sparsity ratios followed by an average footer line.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsityFile {
    pub kind: SparsityKind,
    pub ratios: Vec<f64>,
    pub average: f64,
}

impl SparsityFile {
    pub fn render(&self) -> String {
        let mut out = render_column(&self.ratios);
        let _ = writeln!(out, "{}{}", self.kind.footer(), self.average);
        out
    }

    pub fn parse(text: &str, kind: SparsityKind) -> Result<Self> {
        let lines: Vec<&str> = text.lines().collect();
        let (last, body) = lines.split_last().ok_or_else(|| parse_err(1, "empty file"))?;
        let average = last
            .strip_prefix(kind.footer())
            .ok_or_else(|| parse_err(lines.len(), "missing average footer"))?;
        Ok(SparsityFile {
            kind,
            ratios: parse_column(&body.join("\n"))?,
            average: parse_f64(average, lines.len())?,
        })
    }
}
