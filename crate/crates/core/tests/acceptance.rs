//! Acceptance gate: prints one PASS/FAIL line per criterion and exits nonzero on any failure.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution};

use topicmodel::corpus::{parse_plain, preprocess, Corpus, StopList, TagKind, Tags, Vocabulary};
use topicmodel::counts::{CountTables, Matrix, WordBag};
use topicmodel::dual_sparse::{DualSparse, SelectorInit, SparseHyper};
use topicmodel::eval::{average_coherence, topic_coherence};
use topicmodel::hdp::{HdpHyper, HdpSampler};
use topicmodel::lda::{gibbs_full_conditional, Cvb0, GibbsSampler, LdaHyper, Responsibilities};
use topicmodel::linked::{atm_full_conditional, link_conditional, word_conditional, Atm, LinkLda, LinkLdaHyper};
use topicmodel::mixture::{dmm_log_weights, dpmm_log_weights, Dpmm, MixtureHyper, MixtureState};
use topicmodel::report::{DocTopicFile, NamedRowsFile, SparsityFile, SparsityKind, TopicHeader, TopicWordFile};
use topicmodel::run::{fit_model, parse_corpus, ModelKind, RunConfig};
use topicmodel::sampling::SeededRng;
use topicmodel::sentence_lda::sentence_log_weights;
use topicmodel::short_text::{
    btm_full_conditional, extract_biterms, ptm_pseudo_log_weights, ptm_topic_weights, Btm, BtmHyper, Ptm, PtmHyper,
};
use topicmodel::supervised::{labeled_full_conditional, plda_full_conditional};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn random_docs(rng: &mut SeededRng, m: usize, v: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    (0..m)
        .map(|_| {
            let n = lo + rng.index(hi - lo + 1);
            (0..n).map(|_| rng.index(v)).collect()
        })
        .collect()
}

fn random_z(rng: &mut SeededRng, shape: &[Vec<usize>], k: usize) -> Vec<Vec<usize>> {
    shape.iter().map(|d| d.iter().map(|_| rng.index(k)).collect()).collect()
}

fn normalized(w: &[f64]) -> Vec<f64> {
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn from_log(w: &[f64]) -> Vec<f64> {
    let max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    normalized(&w.iter().map(|x| (x - max).exp()).collect::<Vec<_>>())
}

/// Largest relative difference between two distributions after normalization.
fn rel_err(got: &[f64], want: &[f64]) -> f64 {
    if got.len() != want.len() {
        return f64::INFINITY;
    }
    let (g, w) = (normalized(got), normalized(want));
    g.iter()
        .zip(&w)
        .map(|(a, b)| {
            if *b == 0.0 {
                if *a == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                ((a - b) / b).abs()
            }
        })
        .fold(0.0, f64::max)
}

/// `prod_{j=0}^{n-1} (x + j)`.
fn rising(x: f64, n: usize) -> f64 {
    (0..n).map(|j| x + j as f64).product()
}

fn tags(names: &[Vec<String>]) -> Tags {
    let mut vocab = Vocabulary::new();
    let docs = names
        .iter()
        .map(|d| d.iter().map(|n| vocab.intern(n)).collect())
        .collect();
    Tags { vocab, docs }
}

// ---------------------------------------------------------------- criterion 1

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let docs = vec![vec![0, 1, 2], vec![2, 3, 3], vec![0, 1]];
    let (k, v) = (2usize, 4usize);
    let positions: Vec<(usize, usize)> = docs
        .iter()
        .enumerate()
        .flat_map(|(m, d)| (0..d.len()).map(move |n| (m, n)))
        .collect();
    let tokens = positions.len();
    // Collapsed joint with alpha = beta = 1: Gamma(c + 1) = c!.
    let mut exact = vec![0.0; 1 << tokens];
    for (code, p) in exact.iter_mut().enumerate() {
        let mut dk = vec![vec![0usize; k]; docs.len()];
        let mut kv = vec![vec![0usize; v]; k];
        for (i, &(m, n)) in positions.iter().enumerate() {
            let t = (code >> i) & 1;
            dk[m][t] += 1;
            kv[t][docs[m][n]] += 1;
        }
        let mut ln = 0.0;
        for row in &dk {
            ln += row.iter().map(|&c| ln_factorial(c)).sum::<f64>() - ln_factorial(row.iter().sum::<usize>() + k - 1);
        }
        for row in &kv {
            ln += row.iter().map(|&c| ln_factorial(c)).sum::<f64>() - ln_factorial(row.iter().sum::<usize>() + v - 1);
        }
        *p = ln.exp();
    }
    let exact = normalized(&exact);

    let corpus = Corpus::from_ids(docs.clone(), v).map_err(|e| e.to_string())?;
    let mut rng = SeededRng::from_u64(2024);
    let mut s = GibbsSampler::new(&corpus, LdaHyper::new(k, 1.0, 1.0, 1), &mut rng).map_err(|e| e.to_string())?;
    for _ in 0..1000 {
        s.sweep(&mut rng).map_err(|e| e.to_string())?;
    }
    let sweeps = 200_000;
    let mut counts = vec![0u64; 1 << tokens];
    for _ in 0..sweeps {
        s.sweep(&mut rng).map_err(|e| e.to_string())?;
        let code = positions
            .iter()
            .enumerate()
            .map(|(i, &(m, n))| s.assignments()[m][n] << i)
            .sum::<usize>();
        counts[code] += 1;
    }
    let tv: f64 = 0.5
        * counts
            .iter()
            .zip(&exact)
            .map(|(&c, &p)| (c as f64 / sweeps as f64 - p).abs())
            .sum::<f64>();
    ensure(tv < 0.02, || format!("total variation {tv}"))?;
    within(Duration::from_secs(30), start)?;
    Ok(format!("TV = {tv:.5} over 256 states in {:?}", start.elapsed()))
}

// ---------------------------------------------------------------- criterion 2

struct OracleLog {
    worst: HashMap<&'static str, f64>,
}

impl OracleLog {
    fn record(&mut self, eq: &'static str, err: f64) {
        let e = self.worst.entry(eq).or_insert(0.0);
        if err.is_nan() || err > *e {
            *e = if err.is_nan() { f64::INFINITY } else { err };
        }
    }
}

const STATES: u64 = 8;

fn oracle_lda(log: &mut OracleLog) -> Result<(), String> {
    for seed in 0..STATES {
        let mut rng = SeededRng::from_u64(100 + seed);
        let (k, v) = (2 + rng.index(3), 3 + rng.index(4));
        let (alpha, beta) = (0.05 + rng.uniform(), 0.01 + rng.uniform());
        let docs = random_docs(&mut rng, 4, v, 1, 6);
        let z = random_z(&mut rng, &docs, k);
        let m = rng.index(docs.len());
        let n = rng.index(docs[m].len());
        let mut tables = CountTables::zeros(docs.len(), k, v);
        for (mm, d) in docs.iter().enumerate() {
            for (nn, &w) in d.iter().enumerate() {
                if (mm, nn) != (m, n) {
                    tables.add(mm, z[mm][nn], w, 1);
                }
            }
        }
        let mut got = vec![0.0; k];
        gibbs_full_conditional(&tables, m, docs[m][n], &LdaHyper::new(k, alpha, beta, 1), &mut got);
        let want: Vec<f64> = (0..k)
            .map(|t| {
                let mut nmk = 0.0;
                let mut nm = 0.0;
                let mut nkv = 0.0;
                let mut nk = 0.0;
                for (mm, d) in docs.iter().enumerate() {
                    for (nn, &w) in d.iter().enumerate() {
                        if (mm, nn) == (m, n) {
                            continue;
                        }
                        if mm == m {
                            nm += 1.0;
                            if z[mm][nn] == t {
                                nmk += 1.0;
                            }
                        }
                        if z[mm][nn] == t {
                            nk += 1.0;
                            if w == docs[m][n] {
                                nkv += 1.0;
                            }
                        }
                    }
                }
                (nmk + alpha) / (nm + k as f64 * alpha) * (nkv + beta) / (nk + v as f64 * beta)
            })
            .collect();
        log.record("LDA", rel_err(&got, &want));
    }
    Ok(())
}

fn oracle_sentence(log: &mut OracleLog) -> Result<(), String> {
    for seed in 0..STATES {
        let mut rng = SeededRng::from_u64(200 + seed);
        let (k, v) = (2 + rng.index(3), 3 + rng.index(3));
        let (alpha, beta) = (0.05 + rng.uniform(), 0.01 + rng.uniform());
        // Each document is a list of sentences.
        let sentences: Vec<Vec<Vec<usize>>> = (0..3)
            .map(|_| {
                let count = 1 + rng.index(3);
                random_docs(&mut rng, count, v, 1, 4)
            })
            .collect();
        let z: Vec<Vec<usize>> = sentences.iter().map(|d| d.iter().map(|_| rng.index(k)).collect()).collect();
        let m = rng.index(3);
        let s = rng.index(sentences[m].len());
        let mut tables = CountTables::zeros(3, k, v);
        for (mm, d) in sentences.iter().enumerate() {
            for (ss, sentence) in d.iter().enumerate() {
                if (mm, ss) != (m, s) {
                    for &w in sentence {
                        tables.add(mm, z[mm][ss], w, 1);
                    }
                }
            }
        }
        let target = &sentences[m][s];
        let mut got = vec![0.0; k];
        sentence_log_weights(&tables, m, &WordBag::from_tokens(target), &LdaHyper::new(k, alpha, beta, 1), &mut got);
        let want: Vec<f64> = (0..k)
            .map(|t| {
                let (mut nmk, mut nm, mut nk) = (0.0, 0.0, 0.0);
                let mut nkw = vec![0.0; v];
                for (mm, d) in sentences.iter().enumerate() {
                    for (ss, sentence) in d.iter().enumerate() {
                        if (mm, ss) == (m, s) {
                            continue;
                        }
                        for &w in sentence {
                            if mm == m {
                                nm += 1.0;
                                if z[mm][ss] == t {
                                    nmk += 1.0;
                                }
                            }
                            if z[mm][ss] == t {
                                nk += 1.0;
                                nkw[w] += 1.0;
                            }
                        }
                    }
                }
                let mut num = 1.0;
                for (w, &c) in nkw.iter().enumerate() {
                    num *= rising(c + beta, target.iter().filter(|&&x| x == w).count());
                }
                (nmk + alpha) / (nm + k as f64 * alpha) * num / rising(nk + v as f64 * beta, target.len())
            })
            .collect();
        log.record("Sentence-LDA", rel_err(&from_log(&got), &want));
    }
    Ok(())
}

/// Cluster counts of every document except the query, as the mixture formulas read them.
fn mixture_counts(others: &[Vec<usize>], z: &[usize], k: usize, v: usize) -> (Vec<f64>, Vec<Vec<f64>>, Vec<f64>) {
    let mut docs = vec![0.0; k];
    let mut words = vec![vec![0.0; v]; k];
    let mut totals = vec![0.0; k];
    for (d, &c) in others.iter().zip(z) {
        docs[c] += 1.0;
        for &w in d {
            words[c][w] += 1.0;
            totals[c] += 1.0;
        }
    }
    (docs, words, totals)
}

fn mixture_word_term(query: &[usize], words: &[f64], total: f64, beta: f64) -> f64 {
    let v = words.len();
    let mut num = 1.0;
    for (w, &c) in words.iter().enumerate() {
        num *= rising(c + beta, query.iter().filter(|&&x| x == w).count());
    }
    num / rising(total + v as f64 * beta, query.len())
}

fn oracle_mixtures(log: &mut OracleLog) -> Result<(), String> {
    for seed in 0..STATES {
        let mut rng = SeededRng::from_u64(300 + seed);
        let (k, v) = (2 + rng.index(3), 3 + rng.index(3));
        let (alpha, beta) = (0.05 + rng.uniform(), 0.01 + rng.uniform());
        let others = random_docs(&mut rng, 6, v, 1, 4);
        let z: Vec<usize> = (0..others.len()).map(|i| if i < k { i } else { rng.index(k) }).collect();
        let query = random_docs(&mut rng, 1, v, 2, 5).remove(0);
        let bags: Vec<WordBag> = others.iter().map(|d| WordBag::from_tokens(d)).collect();
        let state = MixtureState::new(&bags, v, k, z.clone()).map_err(|e| e.to_string())?;
        let bag = WordBag::from_tokens(&query);
        let (nd, nw, nt) = mixture_counts(&others, &z, k, v);
        let m1 = others.len() as f64;

        let mut got = vec![0.0; k];
        dmm_log_weights(&state, &bag, &MixtureHyper::new(k, alpha, beta, 1), &mut got);
        let want: Vec<f64> = (0..k)
            .map(|c| (nd[c] + alpha) / (m1 + k as f64 * alpha) * mixture_word_term(&query, &nw[c], nt[c], beta))
            .collect();
        log.record("DMM", rel_err(&from_log(&got), &want));

        let mut got = Vec::new();
        dpmm_log_weights(&state, &bag, alpha, beta, &mut got);
        let mut want: Vec<f64> = (0..k)
            .map(|c| nd[c] / (m1 + alpha) * mixture_word_term(&query, &nw[c], nt[c], beta))
            .collect();
        want.push(alpha / (m1 + alpha) * mixture_word_term(&query, &vec![0.0; v], 0.0, beta));
        log.record("DPMM", rel_err(&from_log(&got), &want));
    }
    Ok(())
}

fn oracle_ptm(log: &mut OracleLog) -> Result<(), String> {
    for seed in 0..STATES {
        let mut rng = SeededRng::from_u64(400 + seed);
        let (k, v, p) = (2 + rng.index(3), 3 + rng.index(3), 2 + rng.index(2));
        let hyper = PtmHyper {
            pseudo_docs: p,
            topics: k,
            alpha: 0.05 + rng.uniform(),
            beta: 0.01 + rng.uniform(),
            lambda: 0.01 + rng.uniform(),
            iterations: 1,
        };
        let docs = random_docs(&mut rng, 6, v, 1, 4);
        let z = random_z(&mut rng, &docs, k);
        let l: Vec<usize> = (0..docs.len()).map(|_| rng.index(p)).collect();
        let corpus = Corpus::from_ids(docs.clone(), v).map_err(|e| e.to_string())?;
        let state = Ptm::from_assignments(&corpus, hyper, l.clone(), z.clone()).map_err(|e| e.to_string())?;

        // Counts exactly as held by the state.
        let mut n_l = vec![0.0; p];
        let mut n_lk = vec![vec![0.0; k]; p];
        let mut n_kv = vec![vec![0.0; v]; k];
        for (m, d) in docs.iter().enumerate() {
            n_l[l[m]] += 1.0;
            for (n, &w) in d.iter().enumerate() {
                n_lk[l[m]][z[m][n]] += 1.0;
                n_kv[z[m][n]][w] += 1.0;
            }
        }
        let m = rng.index(docs.len());
        let own: Vec<usize> = (0..k).map(|t| z[m].iter().filter(|&&x| x == t).count()).collect();
        let total_docs: f64 = n_l.iter().sum();
        let want: Vec<f64> = (0..p)
            .map(|pl| {
                let lhs = (n_l[pl] + hyper.lambda) / (total_docs + p as f64 * hyper.lambda);
                let num: f64 = (0..k).map(|t| rising(n_lk[pl][t] + hyper.alpha, own[t])).product();
                let tot: f64 = n_lk[pl].iter().sum();
                lhs * num / rising(tot + k as f64 * hyper.alpha, docs[m].len())
            })
            .collect();
        let mut got = vec![0.0; p];
        ptm_pseudo_log_weights(&state, m, &mut got);
        log.record("PTM pseudo-document", rel_err(&from_log(&got), &want));

        let (pl, w) = (rng.index(p), rng.index(v));
        let want: Vec<f64> = (0..k)
            .map(|t| {
                let tot_l: f64 = n_lk[pl].iter().sum();
                let tot_k: f64 = n_kv[t].iter().sum();
                (n_lk[pl][t] + hyper.alpha) / (tot_l + k as f64 * hyper.alpha) * (n_kv[t][w] + hyper.beta)
                    / (tot_k + v as f64 * hyper.beta)
            })
            .collect();
        let mut got = vec![0.0; k];
        ptm_topic_weights(&state, pl, w, &mut got);
        log.record("PTM topic", rel_err(&got, &want));
    }
    Ok(())
}

/// Biterm occurrences grouped by distinct pair in first-occurrence order per document.
fn biterm_occurrences(docs: &[Vec<usize>], window: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for d in docs {
        let mut order: Vec<(usize, usize)> = Vec::new();
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                if j - i >= window {
                    break;
                }
                let pair = (d[i].min(d[j]), d[i].max(d[j]));
                if !count.contains_key(&pair) {
                    order.push(pair);
                }
                *count.entry(pair).or_insert(0) += 1;
            }
        }
        for pair in order {
            out.extend(std::iter::repeat(pair).take(count[&pair]));
        }
    }
    out
}

fn oracle_btm(log: &mut OracleLog) -> Result<(), String> {
    for seed in 0..STATES {
        let mut rng = SeededRng::from_u64(500 + seed);
        let (k, v) = (2 + rng.index(3), 3 + rng.index(4));
        let hyper = BtmHyper {
            topics: k,
            alpha: 0.05 + rng.uniform(),
            beta: 0.01 + rng.uniform(),
            window: 2 + rng.index(3),
            iterations: 1,
        };
        let docs = random_docs(&mut rng, 4, v, 2, 6);
        let occ = biterm_occurrences(&docs, hyper.window);
        let z: Vec<usize> = occ.iter().map(|_| rng.index(k)).collect();
        let corpus = Corpus::from_ids(docs, v).map_err(|e| e.to_string())?;
        let state = Btm::from_assignments(&corpus, hyper, z.clone()).map_err(|e| e.to_string())?;
        let mut n_k = vec![0.0; k];
        let mut n_kw = vec![vec![0.0; v]; k];
        for (&(a, b), &t) in occ.iter().zip(&z) {
            n_k[t] += 1.0;
            n_kw[t][a] += 1.0;
            n_kw[t][b] += 1.0;
        }
        let (w1, w2) = (rng.index(v), rng.index(v));
        let nb: f64 = n_k.iter().sum();
        let want: Vec<f64> = (0..k)
            .map(|t| {
                let tot = n_kw[t].iter().sum::<f64>() + v as f64 * hyper.beta;
                (n_k[t] + hyper.alpha) / (nb + k as f64 * hyper.alpha) * (n_kw[t][w1] + hyper.beta)
                    * (n_kw[t][w2] + hyper.beta)
                    / ((tot + 1.0) * tot)
            })
            .collect();
        let mut got = vec![0.0; k];
        btm_full_conditional(&state, w1, w2, &mut got);
        log.record("BTM", rel_err(&got, &want));
    }
    Ok(())
}

fn oracle_atm(log: &mut OracleLog) -> Result<(), String> {
    for seed in 0..STATES {
        let mut rng = SeededRng::from_u64(600 + seed);
        let (k, v, a_count) = (2 + rng.index(3), 3 + rng.index(3), 3);
        let (alpha, beta) = (0.05 + rng.uniform(), 0.01 + rng.uniform());
        let docs = random_docs(&mut rng, 4, v, 1, 5);
        let names: Vec<Vec<String>> = docs
            .iter()
            .map(|_| {
                let first = rng.index(a_count);
                let mut list = vec![format!("author {first}")];
                if rng.uniform() < 0.5 {
                    list.push(format!("author {}", (first + 1) % a_count));
                }
                list
            })
            .collect();
        let t = tags(&names);
        let x: Vec<Vec<usize>> = docs
            .iter()
            .enumerate()
            .map(|(m, d)| d.iter().map(|_| t.docs[m][rng.index(t.docs[m].len())]).collect())
            .collect();
        let z = random_z(&mut rng, &docs, k);
        let corpus = Corpus::from_ids(docs.clone(), v)
            .and_then(|c| c.with_tags(TagKind::Authors, t.clone()))
            .map_err(|e| e.to_string())?;
        let state = Atm::from_assignments(&corpus, LdaHyper::new(k, alpha, beta, 1), x.clone(), z.clone())
            .map_err(|e| e.to_string())?;
        let n_a = t.vocab.len();
        let mut n_ak = vec![vec![0.0; k]; n_a];
        let mut n_kv = vec![vec![0.0; v]; k];
        for (m, d) in docs.iter().enumerate() {
            for (n, &w) in d.iter().enumerate() {
                n_ak[x[m][n]][z[m][n]] += 1.0;
                n_kv[z[m][n]][w] += 1.0;
            }
        }
        let (m, w) = (rng.index(docs.len()), rng.index(v));
        let mut want = Vec::new();
        for &a in &t.docs[m] {
            let tot_a: f64 = n_ak[a].iter().sum();
            for tk in 0..k {
                let tot_k: f64 = n_kv[tk].iter().sum();
                want.push((n_ak[a][tk] + alpha) / (tot_a + k as f64 * alpha) * (n_kv[tk][w] + beta) / (tot_k + v as f64 * beta));
            }
        }
        let mut got = Vec::new();
        atm_full_conditional(&state, m, w, &mut got);
        log.record("ATM", rel_err(&got, &want));
    }
    Ok(())
}

fn oracle_link(log: &mut OracleLog) -> Result<(), String> {
    for seed in 0..STATES {
        let mut rng = SeededRng::from_u64(700 + seed);
        let (k, v) = (2 + rng.index(3), 3 + rng.index(3));
        let hyper = LinkLdaHyper {
            topics: k,
            alpha: 0.05 + rng.uniform(),
            beta: 0.01 + rng.uniform(),
            gamma: 0.01 + rng.uniform(),
            iterations: 1,
        };
        let docs = random_docs(&mut rng, 4, v, 1, 5);
        let names: Vec<Vec<String>> = docs
            .iter()
            .map(|_| {
                let mut l: Vec<String> = (0..1 + rng.index(3)).map(|_| format!("{}", 100 + rng.index(4))).collect();
                l.dedup();
                l
            })
            .collect();
        let t = tags(&names);
        let z = random_z(&mut rng, &docs, k);
        let x = random_z(&mut rng, &t.docs, k);
        let corpus = Corpus::from_ids(docs.clone(), v)
            .and_then(|c| c.with_tags(TagKind::Links, t.clone()))
            .map_err(|e| e.to_string())?;
        let state = LinkLda::from_assignments(&corpus, hyper, z.clone(), x.clone()).map_err(|e| e.to_string())?;
        let n_links = t.vocab.len();
        let mut n_mk = vec![vec![0.0; k]; docs.len()];
        let mut c_mk = vec![vec![0.0; k]; docs.len()];
        let mut n_kv = vec![vec![0.0; v]; k];
        let mut c_kl = vec![vec![0.0; n_links]; k];
        for m in 0..docs.len() {
            for (n, &w) in docs[m].iter().enumerate() {
                n_mk[m][z[m][n]] += 1.0;
                n_kv[z[m][n]][w] += 1.0;
            }
            for (e, &l) in t.docs[m].iter().enumerate() {
                c_mk[m][x[m][e]] += 1.0;
                c_kl[x[m][e]][l] += 1.0;
            }
        }
        let (m, w, l) = (rng.index(docs.len()), rng.index(v), rng.index(n_links));
        let want: Vec<f64> = (0..k)
            .map(|tk| {
                (n_kv[tk][w] + hyper.beta) / (n_kv[tk].iter().sum::<f64>() + v as f64 * hyper.beta)
                    * (n_mk[m][tk] + c_mk[m][tk] + hyper.alpha)
            })
            .collect();
        let mut got = vec![0.0; k];
        word_conditional(&state, m, w, &mut got);
        log.record("Link LDA word", rel_err(&got, &want));
        let want: Vec<f64> = (0..k)
            .map(|tk| {
                (c_kl[tk][l] + hyper.gamma) / (c_kl[tk].iter().sum::<f64>() + n_links as f64 * hyper.gamma)
                    * (c_mk[m][tk] + n_mk[m][tk] + hyper.alpha)
            })
            .collect();
        link_conditional(&state, m, l, &mut got);
        log.record("Link LDA link", rel_err(&got, &want));
    }
    Ok(())
}

fn oracle_supervised(log: &mut OracleLog) -> Result<(), String> {
    for seed in 0..STATES {
        let mut rng = SeededRng::from_u64(800 + seed);
        let (k, v) = (4 + rng.index(3), 3 + rng.index(3));
        let (alpha, beta) = (0.05 + rng.uniform(), 0.01 + rng.uniform());
        let docs = random_docs(&mut rng, 4, v, 1, 5);
        let admissible: Vec<Vec<usize>> = docs
            .iter()
            .map(|_| {
                let mut a: Vec<usize> = (0..k).filter(|_| rng.uniform() < 0.5).collect();
                if a.is_empty() {
                    a.push(rng.index(k));
                }
                a
            })
            .collect();
        let z: Vec<Vec<usize>> = docs
            .iter()
            .enumerate()
            .map(|(m, d)| d.iter().map(|_| admissible[m][rng.index(admissible[m].len())]).collect())
            .collect();
        let m = rng.index(docs.len());
        let n = rng.index(docs[m].len());
        let mut tables = CountTables::zeros(docs.len(), k, v);
        let mut n_mk = vec![vec![0.0; k]; docs.len()];
        let mut n_kv = vec![vec![0.0; v]; k];
        for (mm, d) in docs.iter().enumerate() {
            for (nn, &w) in d.iter().enumerate() {
                if (mm, nn) != (m, n) {
                    tables.add(mm, z[mm][nn], w, 1);
                    n_mk[mm][z[mm][nn]] += 1.0;
                    n_kv[z[mm][nn]][w] += 1.0;
                }
            }
        }
        let w = docs[m][n];
        let word = |t: usize| (n_kv[t][w] + beta) / (n_kv[t].iter().sum::<f64>() + v as f64 * beta);
        let denom: f64 = admissible[m].iter().map(|&t| n_mk[m][t] + alpha).sum();
        let want: Vec<f64> = (0..k)
            .map(|t| if admissible[m].contains(&t) { word(t) * (n_mk[m][t] + alpha) / denom } else { 0.0 })
            .collect();
        let mut got = vec![0.0; k];
        labeled_full_conditional(&tables, m, w, &admissible[m], alpha, beta, &mut got);
        log.record("Labeled LDA", rel_err(&got, &want));
        let want: Vec<f64> = (0..k)
            .map(|t| if admissible[m].contains(&t) { (n_mk[m][t] + alpha) * word(t) } else { 0.0 })
            .collect();
        plda_full_conditional(&tables, m, w, &admissible[m], alpha, beta, &mut got);
        log.record("PLDA", rel_err(&got, &want));
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let mut log = OracleLog { worst: HashMap::new() };
    oracle_lda(&mut log)?;
    oracle_sentence(&mut log)?;
    oracle_mixtures(&mut log)?;
    oracle_ptm(&mut log)?;
    oracle_btm(&mut log)?;
    oracle_atm(&mut log)?;
    oracle_link(&mut log)?;
    oracle_supervised(&mut log)?;
    let expected = 12;
    ensure(log.worst.len() == expected, || format!("{} of {expected} conditionals checked", log.worst.len()))?;
    let mut worst: Vec<(&str, f64)> = log.worst.into_iter().collect();
    worst.sort_by(|a, b| a.0.cmp(b.0));
    let bad: Vec<String> = worst.iter().filter(|w| !(w.1 < 1e-10)).map(|w| format!("{} {:e}", w.0, w.1)).collect();
    ensure(bad.is_empty(), || format!("relative error too large: {}", bad.join(", ")))?;
    let max = worst.iter().map(|w| w.1).fold(0.0, f64::max);
    let names: Vec<&str> = worst.iter().map(|w| w.0).collect();
    Ok(format!("{expected} conditionals x {STATES} states, max relative error {max:e} ({})", names.join(", ")))
}

// ---------------------------------------------------------------- criterion 3

fn criterion_3() -> Outcome {
    let mut rng = SeededRng::from_u64(3);
    let docs = random_docs(&mut rng, 50, 40, 5, 30);
    let tokens: usize = docs.iter().map(Vec::len).sum();
    let corpus = Corpus::from_ids(docs.clone(), 40).map_err(|e| e.to_string())?;
    let mut cvb = Cvb0::new(&corpus, LdaHyper::new(5, 0.1, 0.01, 1), &mut rng).map_err(|e| e.to_string())?;
    let (mut worst_gamma, mut worst_count) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        cvb.sweep();
        for (m, d) in docs.iter().enumerate() {
            for n in 0..d.len() {
                let s: f64 = cvb.gamma().token(m, n).iter().sum();
                worst_gamma = worst_gamma.max((s - 1.0).abs());
            }
        }
        let t = cvb.tables();
        let sums = [
            t.doc_topic.as_slice().iter().sum::<f64>(),
            t.topic_word.as_slice().iter().sum::<f64>(),
            t.doc_total.iter().sum::<f64>(),
            t.topic_total.iter().sum::<f64>(),
        ];
        for s in sums {
            worst_count = worst_count.max((s - tokens as f64).abs());
        }
    }
    ensure(worst_gamma <= 1e-9, || format!("responsibility sum off by {worst_gamma:e}"))?;
    ensure(worst_count <= 1e-6, || format!("expected counts off by {worst_count:e}"))?;
    Ok(format!("50 sweeps, max |sum gamma - 1| = {worst_gamma:e}, max count drift = {worst_count:e}"))
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = SeededRng::from_u64(4);
    let (k, v) = (4, 25);
    let docs = random_docs(&mut rng, 30, v, 3, 15);
    let corpus = Corpus::from_ids(docs, v).map_err(|e| e.to_string())?;
    let init = Responsibilities::random(&corpus, k, &mut rng);
    let (pi, gamma) = (0.3, 0.05);
    let hyper = SparseHyper {
        topics: k,
        s: 1.0,
        t: 1.0,
        x: 1.0,
        y: 1.0,
        pi,
        pi_bar: 0.0,
        gamma,
        gamma_bar: 0.0,
        iterations: 20,
    };
    let mut sparse = DualSparse::with_state(&corpus, hyper, init.clone(), SelectorInit::Constant(1.0), false, &mut rng)
        .map_err(|e| e.to_string())?;
    let mut cvb = Cvb0::with_gamma(&corpus, LdaHyper::new(k, pi, gamma, 20), init).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for _ in 0..20 {
        sparse.sweep().map_err(|e| e.to_string())?;
        cvb.sweep();
        for (a, b) in sparse.kappa().as_slice().iter().zip(cvb.gamma().as_slice()) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("trajectories differ by {worst:e}"))?;
    within(Duration::from_secs(10), start)?;
    Ok(format!("20 sweeps, max |kappa - gamma| = {worst:e}"))
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut sweeps = 0;
    for seed in 0..12u64 {
        let mut rng = SeededRng::from_u64(500 + seed);
        let m = 3 + rng.index(18);
        let v = 4 + rng.index(10);
        let docs = random_docs(&mut rng, m, v, 1, 12);
        let corpus = Corpus::from_ids(docs, v).map_err(|e| e.to_string())?;
        for gamma in [0.0, 0.5] {
            let initial = 1 + rng.index(4);
            let hyper = HdpHyper {
                initial_topics: initial,
                alpha0: 0.2 + rng.uniform(),
                beta: 0.05 + rng.uniform(),
                gamma,
                iterations: 1,
            };
            let mut hdp = HdpSampler::new(&corpus, hyper, &mut rng).map_err(|e| e.to_string())?;
            let cap = hdp.num_topics();
            for _ in 0..30 {
                hdp.sweep(&mut rng).map_err(|e| e.to_string())?;
                sweeps += 1;
                hdp.check_invariants().map_err(|e| format!("hdp seed {seed}: {e}"))?;
                ensure(gamma > 0.0 || hdp.num_topics() <= cap, || format!("hdp grew past {cap} topics with gamma = 0"))?;
            }
        }
        for alpha in [0.0, 0.5] {
            let initial = 1 + rng.index(4);
            let hyper = MixtureHyper::new(initial, alpha, 0.05 + rng.uniform(), 1);
            let mut dpmm = Dpmm::new(&corpus, hyper, &mut rng).map_err(|e| e.to_string())?;
            let cap = dpmm.state().clusters();
            for _ in 0..30 {
                dpmm.sweep(&mut rng).map_err(|e| e.to_string())?;
                sweeps += 1;
                let state = dpmm.state();
                state.check(dpmm.bags()).map_err(|e| format!("dpmm seed {seed}: {e}"))?;
                ensure(state.docs_per_cluster().iter().all(|&n| n > 0), || "empty cluster after sweep".into())?;
                ensure(alpha > 0.0 || state.clusters() <= cap, || format!("dpmm grew past {cap} clusters with alpha = 0"))?;
            }
        }
    }
    within(Duration::from_secs(20), start)?;
    Ok(format!("{sweeps} sweeps checked in {:?}", start.elapsed()))
}

// ---------------------------------------------------------------- criterion 6

fn criterion_6() -> Outcome {
    for n in 1..=12usize {
        let corpus = Corpus::from_ids(vec![(0..n).collect()], n).map_err(|e| e.to_string())?;
        for window in [n.max(2), n + 3] {
            let biterms = extract_biterms(&corpus, window).map_err(|e| e.to_string())?;
            let total: u32 = biterms.iter().map(|b| b.count).sum();
            ensure(biterms.len() == n * (n - 1) / 2 && total as usize == n * (n - 1) / 2, || {
                format!("n = {n}, window = {window}: {} biterms", biterms.len())
            })?;
        }
    }
    let corpus = parse_plain(["w1 w2 w3"]).map_err(|e| e.to_string())?;
    let biterms = extract_biterms(&corpus, 5).map_err(|e| e.to_string())?;
    let mut pairs: Vec<(String, String)> = biterms
        .iter()
        .map(|b| {
            let (a, c) = (corpus.vocab().word(b.w1), corpus.vocab().word(b.w2));
            if a <= c {
                (a.to_owned(), c.to_owned())
            } else {
                (c.to_owned(), a.to_owned())
            }
        })
        .collect();
    pairs.sort();
    let want = [("w1", "w2"), ("w1", "w3"), ("w2", "w3")];
    ensure(
        pairs.iter().map(|(a, b)| (a.as_str(), b.as_str())).eq(want.iter().copied()),
        || format!("three-word example gave {pairs:?}"),
    )?;
    Ok("n(n-1)/2 for n = 1..12; three-word example yields its three pairs".into())
}

// ---------------------------------------------------------------- criterion 7

struct Synthetic {
    corpus: Corpus,
    truth: Vec<Vec<f64>>,
}

fn synthetic_corpus() -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (k, v, block) = (3usize, 30usize, 10usize);
    let word_prior = Dirichlet::new(&[1.0; 10]).unwrap();
    let truth: Vec<Vec<f64>> = (0..k)
        .map(|t| {
            let w = word_prior.sample(&mut rng);
            let mut row = vec![0.0; v];
            row[t * block..(t + 1) * block].copy_from_slice(&w);
            row
        })
        .collect();
    let topic_prior = Dirichlet::new(&[0.3; 3]).unwrap();
    let pick = |p: &[f64], rng: &mut ChaCha8Rng| {
        let u: f64 = rand::Rng::gen(rng);
        let mut acc = 0.0;
        for (i, &x) in p.iter().enumerate() {
            acc += x;
            if u < acc {
                return i;
            }
        }
        p.len() - 1
    };
    let docs = (0..500)
        .map(|_| {
            let theta = topic_prior.sample(&mut rng);
            (0..40)
                .map(|_| {
                    let t = pick(&theta, &mut rng);
                    pick(&truth[t], &mut rng)
                })
                .collect()
        })
        .collect();
    Synthetic {
        corpus: Corpus::from_ids(docs, v).unwrap(),
        truth,
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

fn fit_synthetic(data: &Synthetic) -> Result<Matrix<f64>, String> {
    let mut rng = SeededRng::from_u64(77);
    let mut s = GibbsSampler::new(&data.corpus, LdaHyper::new(3, 0.1, 0.01, 1000), &mut rng).map_err(|e| e.to_string())?;
    s.run(&mut rng).map_err(|e| e.to_string())?;
    Ok(s.estimate().phi)
}

fn criterion_7(data: &Synthetic, phi: &Matrix<f64>, took: Duration) -> Outcome {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let best = perms
        .iter()
        .map(|p| {
            (0..3)
                .map(|t| cosine(phi.row(p[t]), &data.truth[t]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    ensure(best >= 0.9, || format!("best permutation min cosine {best}"))?;
    ensure(took < Duration::from_secs(60), || format!("fit took {took:?}"))?;
    Ok(format!("min cosine {best:.4} under the best permutation, fit in {took:?}"))
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8(data: &Synthetic, phi: &Matrix<f64>) -> Outcome {
    let first = topic_coherence(&[vec![0, 0], vec![0, 1], vec![1, 2]], &[0, 1]).map_err(|e| e.to_string())?;
    ensure(first.abs() <= 1e-12, || format!("D(A)=2, D(A,B)=1 gave {first}"))?;
    let second = topic_coherence(&[vec![0, 1], vec![0], vec![0, 2], vec![0], vec![1]], &[0, 1]).map_err(|e| e.to_string())?;
    ensure((second - 0.5f64.ln()).abs() <= 1e-12, || format!("D(A)=4, D(A,B)=1 gave {second}"))?;
    let single = topic_coherence(&[vec![3]], &[3]).map_err(|e| e.to_string())?;
    ensure(single == 0.0, || format!("single word gave {single}"))?;
    let scores: Vec<f64> = [5, 10, 20]
        .iter()
        .map(|&n| average_coherence(data.corpus.docs(), phi, n))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    ensure(scores[0] >= scores[1] && scores[1] >= scores[2], || format!("ordering violated: {scores:?}"))?;
    Ok(format!("toy values exact; C5 = {:.3}, C10 = {:.3}, C20 = {:.3}", scores[0], scores[1], scores[2]))
}

// ---------------------------------------------------------------- criterion 9

fn sample_input(model: ModelKind) -> Vec<String> {
    let mut rng = SeededRng::from_u64(9);
    let words = ["apple", "banana", "fruit", "car", "engine", "road", "wheel", "juice", "sweet", "fast"];
    let people = ["Ada Lovelace", "Alan Turing", "Grace Hopper", "Edsger Dijkstra"];
    let labels = ["Food", "Travel", "Cloud Storage"];
    let mut text = |n: usize| (0..n).map(|_| words[rng.index(words.len())]).collect::<Vec<_>>().join(" ");
    (0..12)
        .map(|i| match model {
            ModelKind::SentenceLda => format!("{}--{}--{}", text(3), text(2), text(4)),
            ModelKind::Atm => format!("{},{}\t{}", people[i % 4], people[(i + 1) % 4], text(6)),
            ModelKind::LinkLda => format!("{}--{}\t{}", 1000 + i % 5, 2000 + i % 3, text(6)),
            ModelKind::LabeledLda | ModelKind::Plda => {
                format!("{},{}\t{}", labels[i % 3], labels[(i + 1) % 3], text(6))
            }
            _ => text(6),
        })
        .collect()
}

fn check_topic_word(name: &str, text: &str, kind: ModelKind, top: usize) -> Result<(), String> {
    let parsed = TopicWordFile::parse(text).map_err(|e| format!("{name}: {e}"))?;
    ensure(parsed.render() == text, || format!("{name}: render(parse(file)) differs"))?;
    ensure(!parsed.blocks.is_empty(), || format!("{name}: no blocks"))?;
    for block in &parsed.blocks {
        ensure(!block.entries.is_empty() && block.entries.len() <= top, || format!("{name}: block size"))?;
        ensure(block.entries.windows(2).all(|w| w[0].1 >= w[1].1), || format!("{name}: entries not ranked"))?;
        let header_ok = match kind {
            ModelKind::LabeledLda => matches!(block.header, TopicHeader::Label(_)),
            ModelKind::Plda => matches!(block.header, TopicHeader::Related(_)),
            _ => block.header == TopicHeader::Plain,
        };
        ensure(header_ok, || format!("{name}: header kind"))?;
    }
    Ok(())
}

fn check_doc_topic(name: &str, text: &str) -> Result<(), String> {
    let parsed = DocTopicFile::parse(text).map_err(|e| format!("{name}: {e}"))?;
    ensure(parsed.render() == text, || format!("{name}: render(parse(file)) differs"))?;
    let err = parsed.theta.max_row_sum_error();
    ensure(err < 1e-9, || format!("{name}: row sum error {err:e}"))
}

fn criterion_9() -> Outcome {
    let mut files = 0;
    for model in ModelKind::ALL {
        let mut config = RunConfig::new(model);
        config.iterations = 15;
        config.top_words = 4;
        if !matches!(model, ModelKind::LabeledLda | ModelKind::Plda) {
            config.options.topics = Some(3);
        }
        if model == ModelKind::Ptm {
            config.options.pseudo_docs = Some(4);
        }
        let corpus = parse_corpus(&config, &sample_input(model)).map_err(|e| format!("{model}: {e}"))?;
        let first = fit_model(&config, &corpus).map_err(|e| format!("{model}: {e}"))?;
        let second = fit_model(&config, &corpus).map_err(|e| format!("{model}: {e}"))?;
        ensure(first.files == second.files, || format!("{model}: rerun differs"))?;
        for (name, text) in &first.files {
            files += 1;
            if name.contains("topic_word") || name.contains("cluster_word") || name.contains("topic_link") || name.contains("topic_author") {
                check_topic_word(name, text, if name.contains("topic_word") { model } else { ModelKind::LdaGibbs }, 4)?;
            } else if name.contains("doc_topic") || name.contains("pseudo_topic") {
                check_doc_topic(name, text)?;
            } else if name.contains("author_topic") {
                let parsed = NamedRowsFile::parse(text, 3).map_err(|e| format!("{name}: {e}"))?;
                ensure(parsed.render() == *text, || format!("{name}: round trip"))?;
            } else if name.contains("sparseRatio_TV") || name.contains("sparseRatio_DT") {
                let kind = if name.contains("_TV") { SparsityKind::TopicWord } else { SparsityKind::DocTopic };
                let parsed = SparsityFile::parse(text, kind).map_err(|e| format!("{name}: {e}"))?;
                ensure(parsed.render() == *text, || format!("{name}: round trip"))?;
            } else if name.contains("doc_cluster") {
                let ids: Vec<usize> = topicmodel::report::parse_column(text).map_err(|e| format!("{name}: {e}"))?;
                ensure(ids.len() == corpus.num_docs() && ids.iter().all(|&c| c >= 1), || format!("{name}: ids"))?;
            } else if name.contains("theta") {
                let theta: Vec<f64> = topicmodel::report::parse_column(text).map_err(|e| format!("{name}: {e}"))?;
                let s: f64 = theta.iter().sum();
                ensure((s - 1.0).abs() < 1e-9, || format!("{name}: sums to {s}"))?;
            } else {
                return Err(format!("{name}: unrecognized output file"));
            }
        }
    }
    Ok(format!("13 models, {files} files parsed and re-rendered byte-identically; reruns identical"))
}

// ---------------------------------------------------------------- criterion 10

fn criterion_10() -> Outcome {
    let line = "http://t.cn/RAPgR4n Artificial intelligence is a known phenomenons in the world today. Its root started to build years";
    let want = "artificial intelligence phenomenon world today root start build year";
    let got = preprocess(line, &StopList::english());
    ensure(got == want, || format!("got {got:?}"))?;
    Ok(format!("{got:?}"))
}

fn main() {
    let data = synthetic_corpus();
    let start = Instant::now();
    let phi = fit_synthetic(&data);
    let took = start.elapsed();
    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "exact LDA posterior", criterion_1()),
        (2, "full-conditional oracles", criterion_2()),
        (3, "CVB0 conservation", criterion_3()),
        (4, "dual-sparse reduction to CVB0", criterion_4()),
        (5, "HDP and DPMM bookkeeping", criterion_5()),
        (6, "biterm count law", criterion_6()),
        (7, "synthetic recovery", phi.as_ref().map_err(Clone::clone).and_then(|p| criterion_7(&data, p, took))),
        (8, "coherence", phi.as_ref().map_err(Clone::clone).and_then(|p| criterion_8(&data, p))),
        (9, "format fidelity", criterion_9()),
        (10, "preprocessing fidelity", criterion_10()),
    ];
    let mut failed = 0;
    for (n, title, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {n} ({title}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {n} ({title}): {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
