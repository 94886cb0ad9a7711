//! Hierarchical Dirichlet process topics by the Chinese restaurant franchise.

use crate::corpus::Corpus;
use crate::counts::Matrix;
use crate::error::{Error, Result};
use crate::lda::{check_iterations, check_nonnegative, check_positive, check_topics, FittedLda};
use crate::sampling::{sample_categorical, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HdpHyper {
    /// Topics used by the random initialization.
    pub initial_topics: usize,
    /// Table-level concentration.
    pub alpha0: f64,
    pub beta: f64,
    /// Franchise-level concentration; zero forbids new topics.
    pub gamma: f64,
    pub iterations: usize,
}

impl HdpHyper {
    pub fn validate(&self) -> Result<()> {
        check_topics(self.initial_topics)?;
        check_positive("alpha0", self.alpha0)?;
        check_positive("beta", self.beta)?;
        check_nonnegative("gamma", self.gamma)?;
        check_iterations(self.iterations)
    }
}

/// One table in a document's restaurant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Table {
    pub topic: usize,
    pub count: u32,
}

/// Franchise state. Empty tables and topics are removed as soon as they appear.
#[derive(Debug, Clone)]
pub struct HdpSampler<'c> {
    corpus: &'c Corpus,
    hyper: HdpHyper,
    table_of_token: Vec<Vec<usize>>,
    tables: Vec<Vec<Table>>,
    tables_per_topic: Vec<u32>,
    total_tables: u32,
    topic_word: Vec<Vec<u32>>,
    topic_total: Vec<u32>,
    weights: Vec<f64>,
}

impl<'c> HdpSampler<'c> {
    /// Tokens get uniform random topics among `initial_topics`; each document
    /// seats all tokens of a topic at one table.
    pub fn new(corpus: &'c Corpus, hyper: HdpHyper, rng: &mut SeededRng) -> Result<Self> {
        hyper.validate()?;
        corpus.require_nonempty()?;
        let topics: Vec<Vec<usize>> = corpus
            .docs()
            .iter()
            .map(|d| d.iter().map(|_| rng.index(hyper.initial_topics)).collect())
            .collect();
        let mut table_of_token = Vec::with_capacity(topics.len());
        let mut table_topics = Vec::with_capacity(topics.len());
        for z in &topics {
            let mut seen: Vec<usize> = Vec::new();
            let mut doc_tables = Vec::with_capacity(z.len());
            for &k in z {
                let t = match seen.iter().position(|&s| s == k) {
                    Some(t) => t,
                    None => {
                        seen.push(k);
                        seen.len() - 1
                    }
                };
                doc_tables.push(t);
            }
            table_of_token.push(doc_tables);
            table_topics.push(seen);
        }
        Self::from_seating(corpus, hyper, table_of_token, table_topics, hyper.initial_topics)
    }

    /// Starts from explicit seating: `table_of_token[m][n]` indexes
    /// `table_topics[m]`, whose entries are topics below `topics`.
    /// Tables without tokens and topics without tables are dropped.
    pub fn from_seating(
        corpus: &'c Corpus,
        hyper: HdpHyper,
        table_of_token: Vec<Vec<usize>>,
        table_topics: Vec<Vec<usize>>,
        topics: usize,
    ) -> Result<Self> {
        hyper.validate()?;
        corpus.require_nonempty()?;
        if table_of_token.len() != corpus.num_docs() || table_topics.len() != corpus.num_docs() {
            return Err(Error::invalid("seating", "one list per document"));
        }
        let v_size = corpus.vocab_size();
        let mut s = HdpSampler {
            corpus,
            hyper,
            table_of_token,
            tables: Vec::with_capacity(corpus.num_docs()),
            tables_per_topic: vec![0; topics],
            total_tables: 0,
            topic_word: vec![vec![0; v_size]; topics],
            topic_total: vec![0; topics],
            weights: Vec::new(),
        };
        for (m, doc) in corpus.docs().iter().enumerate() {
            if s.table_of_token[m].len() != doc.len() {
                return Err(Error::invalid("seating", format!("length mismatch in document {m}")));
            }
            let mut doc_tables: Vec<Table> = Vec::with_capacity(table_topics[m].len());
            for &k in &table_topics[m] {
                if k >= topics {
                    return Err(Error::invalid("seating", format!("topic {k} out of range")));
                }
                doc_tables.push(Table { topic: k, count: 0 });
            }
            for (n, &v) in doc.iter().enumerate() {
                let t = s.table_of_token[m][n];
                let table = doc_tables
                    .get_mut(t)
                    .ok_or_else(|| Error::invalid("seating", format!("table {t} out of range in document {m}")))?;
                table.count += 1;
                s.topic_word[table.topic][v] += 1;
                s.topic_total[table.topic] += 1;
            }
            s.tables.push(doc_tables);
        }
        for m in 0..s.tables.len() {
            for t in (0..s.tables[m].len()).rev() {
                if s.tables[m][t].count == 0 {
                    s.remove_table(m, t);
                } else {
                    s.tables_per_topic[s.tables[m][t].topic] += 1;
                    s.total_tables += 1;
                }
            }
        }
        for k in (0..s.num_topics()).rev() {
            if s.tables_per_topic[k] == 0 {
                s.remove_topic(k);
            }
        }
        Ok(s)
    }

    pub fn num_topics(&self) -> usize {
        self.topic_total.len()
    }

    pub fn tables(&self, m: usize) -> &[Table] {
        &self.tables[m]
    }

    pub fn table_of_token(&self) -> &[Vec<usize>] {
        &self.table_of_token
    }

    pub fn tables_per_topic(&self) -> &[u32] {
        &self.tables_per_topic
    }

    pub fn total_tables(&self) -> u32 {
        self.total_tables
    }

    /// Likelihood of word `v` under topic `k`; `k == num_topics()` is a new topic.
    pub fn cond_density(&self, k: usize, v: usize) -> f64 {
        let v_size = self.corpus.vocab_size() as f64;
        if k >= self.num_topics() {
            return 1.0 / v_size;
        }
        (f64::from(self.topic_word[k][v]) + self.hyper.beta)
            / (f64::from(self.topic_total[k]) + v_size * self.hyper.beta)
    }

    /// Unnormalized seating weights for word `v` in document `m`; the last
    /// entry is a new table.
    pub fn table_weights(&self, m: usize, v: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.tables[m].len() + 1);
        self.fill_table_weights(m, v, &mut out);
        out
    }

    fn fill_table_weights(&self, m: usize, v: usize, out: &mut Vec<f64>) {
        out.clear();
        let f: Vec<f64> = (0..self.num_topics()).map(|k| self.cond_density(k, v)).collect();
        for t in &self.tables[m] {
            out.push(f64::from(t.count) * f[t.topic]);
        }
        let new_density = 1.0 / self.corpus.vocab_size() as f64;
        let denom = f64::from(self.total_tables) + self.hyper.gamma;
        let prior = if denom > 0.0 {
            let live: f64 = self
                .tables_per_topic
                .iter()
                .zip(&f)
                .map(|(&mk, &fk)| f64::from(mk) * fk)
                .sum();
            (live + self.hyper.gamma * new_density) / denom
        } else {
            new_density
        };
        out.push(self.hyper.alpha0 * prior);
    }

    /// Unnormalized topic weights for a new table serving `v`; the last entry
    /// is a new topic.
    pub fn topic_weights(&self, v: usize) -> Vec<f64> {
        let mut out: Vec<f64> = (0..self.num_topics())
            .map(|k| f64::from(self.tables_per_topic[k]) * self.cond_density(k, v))
            .collect();
        out.push(self.hyper.gamma / self.corpus.vocab_size() as f64);
        out
    }

    fn remove_table(&mut self, m: usize, t: usize) {
        self.tables[m].remove(t);
        for tt in self.table_of_token[m].iter_mut() {
            if *tt > t {
                *tt -= 1;
            }
        }
    }

    fn remove_topic(&mut self, k: usize) {
        self.tables_per_topic.remove(k);
        self.topic_word.remove(k);
        self.topic_total.remove(k);
        for doc in &mut self.tables {
            for t in doc.iter_mut() {
                if t.topic > k {
                    t.topic -= 1;
                }
            }
        }
    }

    fn unseat(&mut self, m: usize, n: usize, v: usize) {
        let t = self.table_of_token[m][n];
        let k = self.tables[m][t].topic;
        self.tables[m][t].count -= 1;
        self.topic_word[k][v] -= 1;
        self.topic_total[k] -= 1;
        if self.tables[m][t].count == 0 {
            self.remove_table(m, t);
            self.tables_per_topic[k] -= 1;
            self.total_tables -= 1;
            if self.tables_per_topic[k] == 0 {
                self.remove_topic(k);
            }
        }
    }

    fn draw(weights: &[f64], rng: &mut SeededRng) -> Result<usize> {
        if weights.iter().all(|&w| w == 0.0) {
            return Ok(weights.len() - 1);
        }
        sample_categorical(weights, rng)
    }

    /// Reseats one token, drawing a topic only when a table is opened.
    pub fn resample_token(&mut self, m: usize, n: usize, rng: &mut SeededRng) -> Result<()> {
        let v = self.corpus.docs()[m][n];
        self.unseat(m, n, v);
        let mut w = std::mem::take(&mut self.weights);
        self.fill_table_weights(m, v, &mut w);
        let t = Self::draw(&w, rng)?;
        self.weights = w;
        if t == self.tables[m].len() {
            let k = Self::draw(&self.topic_weights(v), rng)?;
            if k == self.num_topics() {
                self.tables_per_topic.push(0);
                self.topic_word.push(vec![0; self.corpus.vocab_size()]);
                self.topic_total.push(0);
            }
            self.tables[m].push(Table { topic: k, count: 0 });
            self.tables_per_topic[k] += 1;
            self.total_tables += 1;
        }
        let k = self.tables[m][t].topic;
        self.tables[m][t].count += 1;
        self.topic_word[k][v] += 1;
        self.topic_total[k] += 1;
        self.table_of_token[m][n] = t;
        Ok(())
    }

    pub fn sweep(&mut self, rng: &mut SeededRng) -> Result<()> {
        for m in 0..self.corpus.num_docs() {
            for n in 0..self.corpus.docs()[m].len() {
                self.resample_token(m, n, rng)?;
            }
        }
        Ok(())
    }

    pub fn run(&mut self, rng: &mut SeededRng) -> Result<()> {
        for it in 0..self.hyper.iterations {
            self.sweep(rng)?;
            crate::progress("hdp", it + 1, self.hyper.iterations);
        }
        Ok(())
    }

    /// Recomputes every count from the seating and compares.
    pub fn check_invariants(&self) -> Result<(), String> {
        let k_count = self.num_topics();
        let v_size = self.corpus.vocab_size();
        let mut word = vec![vec![0u32; v_size]; k_count];
        let mut per_topic = vec![0u32; k_count];
        let mut total = 0;
        for (m, doc) in self.corpus.docs().iter().enumerate() {
            let mut counts = vec![0u32; self.tables[m].len()];
            for (n, &v) in doc.iter().enumerate() {
                let t = self.table_of_token[m][n];
                let table = self.tables[m].get(t).ok_or(format!("token ({m}, {n}) at missing table {t}"))?;
                if table.topic >= k_count {
                    return Err(format!("table ({m}, {t}) has dead topic {}", table.topic));
                }
                counts[t] += 1;
                word[table.topic][v] += 1;
            }
            for (t, table) in self.tables[m].iter().enumerate() {
                if counts[t] == 0 || counts[t] != table.count {
                    return Err(format!("table ({m}, {t}) count {} but {} tokens", table.count, counts[t]));
                }
                per_topic[table.topic] += 1;
                total += 1;
            }
        }
        if per_topic != self.tables_per_topic || total != self.total_tables {
            return Err("table counts per topic disagree with seating".into());
        }
        if per_topic.contains(&0) {
            return Err("live topic without tables".into());
        }
        if word != self.topic_word {
            return Err("topic-word counts disagree with seating".into());
        }
        for (k, row) in word.iter().enumerate() {
            if row.iter().sum::<u32>() != self.topic_total[k] {
                return Err(format!("topic {k} total disagrees"));
            }
        }
        Ok(())
    }

    /// `theta = (n_m^k + alpha0) / (N_m + K alpha0)` with the current K.
    pub fn estimate(&self) -> FittedLda {
        let k_count = self.num_topics();
        let mut doc_topic = Matrix::<u32>::zeros(self.corpus.num_docs(), k_count);
        for (m, doc) in self.tables.iter().enumerate() {
            for t in doc {
                doc_topic.add(m, t.topic, t.count);
            }
        }
        let mut data = Vec::with_capacity(k_count * self.corpus.vocab_size());
        for row in &self.topic_word {
            data.extend_from_slice(row);
        }
        let topic_word = Matrix::from_vec(k_count, self.corpus.vocab_size(), data).expect("rows have vocabulary length");
        FittedLda {
            theta: crate::counts::smoothed_rows(&doc_topic, self.hyper.alpha0),
            phi: crate::counts::smoothed_rows(&topic_word, self.hyper.beta),
        }
    }
}

pub fn fit(corpus: &Corpus, hyper: HdpHyper, rng: &mut SeededRng) -> Result<FittedLda> {
    let mut s = HdpSampler::new(corpus, hyper, rng)?;
    s.run(rng)?;
    Ok(s.estimate())
}
