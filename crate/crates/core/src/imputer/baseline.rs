//! Built-in baseline: one multinomial logistic regression per metric over
//! hashed bag-of-token features, trained with the inverse-frequency weighted
//! cross-entropy and early stopping on validation loss.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::loss::{masked_softmax, PROB_FLOOR};
use super::weights::LabelWeights;
use super::{ImputeError, Imputer, MetricPrediction, Prediction, PredictionSource, LOW_CONFIDENCE_MIN_TOKENS};
use crate::cve::CveId;
use crate::cvss::{Metric, MetricLabel};
use crate::evaluation::metrics::{ClassificationReport, TaskMetrics};
use crate::evaluation::split::{SplitIndices, SplitRatios};
use crate::nvd::CveRecord;
use crate::text::{preprocess, StopWords, TextError, TokenSeq, DEFAULT_MAX_TOKENS};

/// First line of every saved model file.
pub const MODEL_FORMAT: &str = "vulnrisk-baseline v1";
const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub max_tokens: usize,
    pub feature_dim: usize,
    pub hash_seed: u64,
    pub learning_rate: f64,
    /// Epoch `e` uses `learning_rate / (1 + lr_decay * e)`.
    pub lr_decay: f64,
    pub max_epochs: usize,
    /// Epochs without validation-loss improvement before stopping.
    pub patience: usize,
    /// Seeds both the data split and the per-epoch shuffles.
    pub seed: u64,
    pub split: SplitRatios,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            max_tokens: DEFAULT_MAX_TOKENS,
            feature_dim: 1 << 18,
            hash_seed: 0,
            learning_rate: 0.03,
            lr_decay: 0.0,
            max_epochs: 100,
            patience: 5,
            seed: 42,
            split: SplitRatios::default(),
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<(), ImputeError> {
        let fail = |m: &str| Err(ImputeError::Config(m.into()));
        if self.max_tokens < 10 {
            return fail("max_tokens must be at least 10");
        }
        if self.feature_dim == 0 || self.feature_dim > u32::MAX as usize {
            return fail("feature_dim must be in 1..=2^32-1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail("learning_rate must be positive");
        }
        if !(self.lr_decay >= 0.0 && self.lr_decay.is_finite()) {
            return fail("lr_decay must be non-negative");
        }
        if self.max_epochs == 0 || self.patience == 0 {
            return fail("max_epochs and patience must be positive");
        }
        self.split.validate().map_err(|e| ImputeError::Config(e.to_string()))
    }
}

/// One training example: preprocessed description plus its six labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub cve_id: CveId,
    pub tokens: TokenSeq,
    pub labels: [MetricLabel; 6],
}

/// Turns complete records into examples. Incomplete records have no labels
/// and are left out; records whose description is all stop words are
/// counted in the second return value.
pub fn examples_from_records<'a>(
    records: impl IntoIterator<Item = &'a CveRecord>,
    max_tokens: usize,
    stop_words: &StopWords,
) -> Result<(Vec<LabeledExample>, usize), ImputeError> {
    let mut out = Vec::new();
    let mut empty = 0;
    for record in records {
        let vector = record.vector();
        if !vector.is_complete() {
            continue;
        }
        let labels = Metric::ALL.map(|m| vector.get(m).expect("complete vector"));
        match preprocess(record.description(), max_tokens, stop_words) {
            Ok(tokens) => out.push(LabeledExample { cve_id: record.cve_id().clone(), tokens, labels }),
            Err(TextError::EmptyAfterPreprocess) => empty += 1,
            Err(e) => return Err(e.into()),
        }
    }
    Ok((out, empty))
}

type SparseVec = Vec<(u32, f64)>;

fn hash_token(token: &str, seed: u64) -> u64 {
    let mut h = FNV_OFFSET;
    for b in seed.to_le_bytes().into_iter().chain(token.bytes()) {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    h
}

/// Unigrams and adjacent-word bigrams hashed into `dim` buckets, with
/// sublinear term frequencies `1 + ln(tf)`, L2-normalized.
fn featurize(tokens: &[String], dim: usize, seed: u64) -> SparseVec {
    let bucket = |t: &str| (hash_token(t, seed) % dim as u64) as u32;
    let mut buckets: Vec<u32> = tokens.iter().map(|t| bucket(t)).collect();
    buckets.extend(tokens.windows(2).map(|w| bucket(&format!("{} {}", w[0], w[1]))));
    buckets.sort_unstable();
    let mut features: SparseVec = Vec::new();
    for b in buckets {
        match features.last_mut() {
            Some((idx, count)) if *idx == b => *count += 1.0,
            _ => features.push((b, 1.0)),
        }
    }
    for (_, v) in &mut features {
        *v = 1.0 + v.ln();
    }
    let norm = features.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for (_, v) in &mut features {
            *v /= norm;
        }
    }
    features
}

#[derive(Debug, Clone, PartialEq)]
enum TaskModel {
    Trained { present: [bool; 3], bias: [f64; 3], weights: Vec<[f64; 3]> },
    /// Fewer than two labels seen in training: always predict this class.
    Degenerate { class: usize },
}

impl TaskModel {
    fn probabilities(&self, x: &[(u32, f64)]) -> [f64; 3] {
        match self {
            TaskModel::Trained { present, bias, weights } => masked_softmax(&logits(bias, weights, x), present),
            TaskModel::Degenerate { class } => {
                let mut p = [0.0; 3];
                p[*class] = 1.0;
                p
            }
        }
    }
}

fn logits(bias: &[f64; 3], weights: &[[f64; 3]], x: &[(u32, f64)]) -> [f64; 3] {
    let mut z = *bias;
    for &(j, v) in x {
        let row = &weights[j as usize];
        for k in 0..3 {
            z[k] += v * row[k];
        }
    }
    z
}

/// First index of the largest value; ties go to the lower class.
fn argmax(p: &[f64; 3]) -> usize {
    let mut best = 0;
    for k in 1..3 {
        if p[k] > p[best] {
            best = k;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskStatus {
    Trained,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub learning_rate: f64,
    pub train_loss: f64,
    pub validation_loss: Option<f64>,
    pub validation_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskCurve {
    pub task: Metric,
    pub status: TaskStatus,
    pub label_weights: LabelWeights,
    pub epochs: Vec<EpochStats>,
    /// Epoch whose parameters were kept.
    pub best_epoch: Option<usize>,
    pub stopped_early: bool,
}

/// A trained model together with everything measured while training it.
#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    pub model: BaselineModel,
    pub curves: Vec<TaskCurve>,
    pub split: SplitIndices,
    /// Held-out metrics, absent when the test split is empty.
    pub test_report: Option<ClassificationReport>,
    /// Test accuracy of always predicting the training split's most frequent label.
    pub majority_accuracy: Vec<(Metric, f64)>,
}

struct TaskData<'a> {
    features: &'a [SparseVec],
    classes: Vec<usize>,
}

impl TaskData<'_> {
    fn at<'s>(&'s self, idx: &'s [usize]) -> impl Iterator<Item = (&'s SparseVec, usize)> + 's {
        idx.iter().map(move |&i| (&self.features[i], self.classes[i]))
    }
}

fn mean_weighted_loss(
    model: &TaskModel,
    scale: &[f64; 3],
    samples: impl Iterator<Item = (impl AsRef<[(u32, f64)]>, usize)>,
) -> (Option<f64>, Option<f64>) {
    let (mut loss, mut n_loss, mut correct, mut n) = (0.0, 0usize, 0usize, 0usize);
    for (x, y) in samples {
        let p = model.probabilities(x.as_ref());
        n += 1;
        correct += usize::from(argmax(&p) == y);
        if scale[y] > 0.0 {
            loss += -scale[y] * p[y].max(PROB_FLOOR).ln();
            n_loss += 1;
        }
    }
    ((n_loss > 0).then(|| loss / n_loss as f64), (n > 0).then(|| correct as f64 / n as f64))
}

const ADAGRAD_EPS: f64 = 1e-8;

fn train_task(
    task: Metric,
    data: &TaskData<'_>,
    split: &SplitIndices,
    config: &BaselineConfig,
) -> Result<(TaskModel, TaskCurve), ImputeError> {
    let train_classes: Vec<usize> = split.train.iter().map(|&i| data.classes[i]).collect();
    let label_weights = LabelWeights::from_classes(task, &train_classes)?;
    let present = [0, 1, 2].map(|k| label_weights.is_present(k));
    let n_present = label_weights.present_classes();

    if n_present < 2 {
        let class = present.iter().position(|p| *p).expect("non-empty training split");
        let curve = TaskCurve {
            task,
            status: TaskStatus::Degenerate,
            label_weights,
            epochs: Vec::new(),
            best_epoch: None,
            stopped_early: false,
        };
        return Ok((TaskModel::Degenerate { class }, curve));
    }

    // Per-sample loss scale w_y / K, so that the scale averages to one over
    // the training split and the learning rate keeps its meaning.
    let scale = label_weights.dense().map(|w| w / n_present as f64);

    let mut model = TaskModel::Trained { present, bias: [0.0; 3], weights: vec![[0.0; 3]; config.feature_dim] };
    let mut best: Option<(f64, usize, TaskModel)> = None;
    let mut epochs = Vec::new();
    let mut since_best = 0;
    let mut stopped_early = false;
    // AdaGrad accumulators: heavily weighted minority samples would otherwise
    // take steps hundreds of times larger than the rest.
    let mut bias_sq = [0.0; 3];
    let mut grad_sq = vec![[0.0; 3]; config.feature_dim];
    let mut order = split.train.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ hash_token(task.key(), config.seed));

    for epoch in 0..config.max_epochs {
        let lr = config.learning_rate / (1.0 + config.lr_decay * epoch as f64);
        order.shuffle(&mut rng);
        let mut train_loss = 0.0;
        let TaskModel::Trained { bias, weights, .. } = &mut model else { unreachable!() };
        for (x, y) in data.at(&order) {
            let p = masked_softmax(&logits(bias, weights, x), &present);
            train_loss += -scale[y] * p[y].max(PROB_FLOOR).ln();
            let mut g = [0.0; 3];
            for k in 0..3 {
                if present[k] {
                    g[k] = scale[y] * (p[k] - if k == y { 1.0 } else { 0.0 });
                }
            }
            for k in 0..3 {
                bias_sq[k] += g[k] * g[k];
                bias[k] -= lr * g[k] / (bias_sq[k].sqrt() + ADAGRAD_EPS);
            }
            for &(j, v) in x {
                let row = &mut weights[j as usize];
                let acc = &mut grad_sq[j as usize];
                for k in 0..3 {
                    let gk = v * g[k];
                    acc[k] += gk * gk;
                    row[k] -= lr * gk / (acc[k].sqrt() + ADAGRAD_EPS);
                }
            }
        }
        let (validation_loss, validation_accuracy) = mean_weighted_loss(&model, &scale, data.at(&split.validation));
        epochs.push(EpochStats {
            epoch,
            learning_rate: lr,
            train_loss: train_loss / order.len() as f64,
            validation_loss,
            validation_accuracy,
        });

        let Some(val) = validation_loss else { continue };
        if best.as_ref().is_none_or(|(b, _, _)| val < *b) {
            best = Some((val, epoch, model.clone()));
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.patience {
                stopped_early = true;
                break;
            }
        }
    }

    let best_epoch = match best {
        Some((_, epoch, kept)) => {
            model = kept;
            epoch
        }
        None => epochs.len() - 1,
    };
    let curve = TaskCurve {
        task,
        status: TaskStatus::Trained,
        label_weights,
        epochs,
        best_epoch: Some(best_epoch),
        stopped_early,
    };
    Ok((model, curve))
}

/// Splits `corpus` by `config.split` and trains the six tasks concurrently.
pub fn train_baseline(
    corpus: &[LabeledExample],
    stop_words: &StopWords,
    config: &BaselineConfig,
) -> Result<TrainingOutcome, ImputeError> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(ImputeError::EmptyDataset);
    }
    let split = SplitIndices::compute(corpus.len(), config.split, config.seed)
        .map_err(|e| ImputeError::Config(e.to_string()))?;
    if split.train.is_empty() {
        return Err(ImputeError::EmptyDataset);
    }
    let features: Vec<SparseVec> =
        corpus.iter().map(|ex| featurize(&ex.tokens.tokens, config.feature_dim, config.hash_seed)).collect();

    let results: Vec<Result<(TaskModel, TaskCurve), ImputeError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = Metric::ALL
            .into_iter()
            .map(|task| {
                let data = TaskData {
                    features: &features,
                    classes: corpus.iter().map(|ex| ex.labels[task.index()].class_index()).collect(),
                };
                let split = &split;
                scope.spawn(move || train_task(task, &data, split, config))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("training thread panicked")).collect()
    });

    let mut tasks = Vec::with_capacity(6);
    let mut curves = Vec::with_capacity(6);
    for r in results {
        let (model, curve) = r?;
        tasks.push(model);
        curves.push(curve);
    }
    let model = BaselineModel {
        max_tokens: config.max_tokens,
        feature_dim: config.feature_dim,
        hash_seed: config.hash_seed,
        stop_words: stop_words.clone(),
        tasks: tasks.try_into().expect("six tasks"),
    };

    let mut majority_accuracy = Vec::new();
    let mut report = Vec::new();
    if !split.test.is_empty() {
        for (task, curve) in Metric::ALL.into_iter().zip(&curves) {
            let freq = curve.label_weights.frequencies;
            let majority = (0..3).fold(0, |best, k| if freq[k] > freq[best] { k } else { best });
            let truth: Vec<usize> = split.test.iter().map(|&i| corpus[i].labels[task.index()].class_index()).collect();
            let predicted: Vec<usize> =
                split.test.iter().map(|&i| argmax(&model.tasks[task.index()].probabilities(&features[i]))).collect();
            let hits = truth.iter().filter(|&&t| t == majority).count();
            majority_accuracy.push((task, hits as f64 / truth.len() as f64));
            let metrics = TaskMetrics::from_classes(Metric::N_LABELS, &truth, &predicted)
                .expect("equal-length non-empty class vectors");
            report.push((task, metrics));
        }
    }
    let test_report = (!report.is_empty()).then_some(ClassificationReport { tasks: report });

    Ok(TrainingOutcome { model, curves, split, test_report, majority_accuracy })
}

/// Six trained (or degenerate) per-metric classifiers plus the preprocessing
/// settings they were trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineModel {
    max_tokens: usize,
    feature_dim: usize,
    hash_seed: u64,
    stop_words: StopWords,
    tasks: [TaskModel; 6],
}

impl BaselineModel {
    pub fn max_tokens(&self) -> usize {
        self.max_tokens
    }

    pub fn stop_words(&self) -> &StopWords {
        &self.stop_words
    }

    pub fn is_degenerate(&self, task: Metric) -> bool {
        matches!(self.tasks[task.index()], TaskModel::Degenerate { .. })
    }

    /// Class probabilities per task for an already preprocessed description.
    pub fn probabilities(&self, tokens: &TokenSeq) -> [[f64; 3]; 6] {
        let x = featurize(&tokens.tokens, self.feature_dim, self.hash_seed);
        [0, 1, 2, 3, 4, 5].map(|t| self.tasks[t].probabilities(&x))
    }

    pub fn predict_tokens(&self, cve_id: &CveId, tokens: &TokenSeq) -> Prediction {
        let probs = self.probabilities(tokens);
        let metrics = Metric::ALL.map(|m| {
            let p = &probs[m.index()];
            let class = argmax(p);
            MetricPrediction { label: m.label_at(class).expect("class < 3"), confidence: p[class].clamp(0.0, 1.0) }
        });
        let low_confidence = tokens.original_length < LOW_CONFIDENCE_MIN_TOKENS;
        Prediction::new(cve_id.clone(), metrics, PredictionSource::Baseline, low_confidence)
            .expect("labels come from their own metric")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ImputeError> {
        let mut file = fs::File::create(path)?;
        self.write_to(&mut file)?;
        file.sync_all()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ImputeError> {
        Self::read_from(fs::File::open(path)?)
    }

    /// Writes the line-oriented text form. Weight rows that are all zero are
    /// omitted.
    pub fn write_to(&self, mut w: impl Write) -> Result<(), ImputeError> {
        let mut out = String::new();
        writeln!(out, "{MODEL_FORMAT}").unwrap();
        writeln!(out, "max_tokens {}", self.max_tokens).unwrap();
        writeln!(out, "feature_dim {}", self.feature_dim).unwrap();
        writeln!(out, "hash_seed {}", self.hash_seed).unwrap();
        writeln!(out, "stopwords {}", self.stop_words.version()).unwrap();
        for word in self.stop_words.sorted() {
            writeln!(out, "stopword {word}").unwrap();
        }
        for (metric, task) in Metric::ALL.iter().zip(&self.tasks) {
            match task {
                TaskModel::Degenerate { class } => writeln!(out, "task {} degenerate {class}", metric.key()).unwrap(),
                TaskModel::Trained { present, bias, weights } => {
                    writeln!(out, "task {} trained", metric.key()).unwrap();
                    let p = present.map(u8::from);
                    writeln!(out, "present {} {} {}", p[0], p[1], p[2]).unwrap();
                    writeln!(out, "bias {} {} {}", bias[0], bias[1], bias[2]).unwrap();
                    for (j, row) in weights.iter().enumerate() {
                        if row.iter().any(|v| *v != 0.0) {
                            writeln!(out, "w {j} {} {} {}", row[0], row[1], row[2]).unwrap();
                        }
                    }
                }
            }
        }
        writeln!(out, "end").unwrap();
        w.write_all(out.as_bytes())?;
        Ok(())
    }

    pub fn read_from(r: impl Read) -> Result<Self, ImputeError> {
        let mut lines = BufReader::new(r).lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = move || -> Result<(usize, String), ImputeError> {
            match lines.next() {
                Some((n, line)) => Ok((n, line?)),
                None => Err(ImputeError::ModelFormat("unexpected end of file".into())),
            }
        };
        let bad = |n: usize, msg: &str| ImputeError::ModelFormat(format!("line {n}: {msg}"));

        let (n, header) = next()?;
        if header != MODEL_FORMAT {
            return Err(bad(n, &format!("expected {MODEL_FORMAT:?}, found {header:?}")));
        }
        fn field<T: std::str::FromStr>(n: usize, line: &str, key: &str) -> Result<T, ImputeError> {
            line.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| ImputeError::ModelFormat(format!("line {n}: expected `{key} <value>`")))
        }
        let (n, line) = next()?;
        let max_tokens: usize = field(n, &line, "max_tokens")?;
        let (n, line) = next()?;
        let feature_dim: usize = field(n, &line, "feature_dim")?;
        let (n, line) = next()?;
        let hash_seed: u64 = field(n, &line, "hash_seed")?;
        let (n, line) = next()?;
        let version: String = field(n, &line, "stopwords")?;

        let mut words = Vec::new();
        let mut tasks = Vec::new();
        let mut current: Option<(usize, [bool; 3], [f64; 3], Vec<[f64; 3]>)> = None;
        let finish = |cur: &mut Option<(usize, [bool; 3], [f64; 3], Vec<[f64; 3]>)>, tasks: &mut Vec<TaskModel>| {
            if let Some((_, present, bias, weights)) = cur.take() {
                tasks.push(TaskModel::Trained { present, bias, weights });
            }
        };
        loop {
            let (n, line) = next()?;
            let parts: Vec<&str> = line.split(' ').collect();
            match parts.as_slice() {
                ["stopword", word] if tasks.is_empty() && current.is_none() => words.push(word.to_string()),
                ["task", key, rest @ ..] => {
                    finish(&mut current, &mut tasks);
                    let expected = Metric::ALL.get(tasks.len()).ok_or_else(|| bad(n, "more than six tasks"))?;
                    if *key != expected.key() {
                        return Err(bad(n, &format!("expected task {}, found {key}", expected.key())));
                    }
                    match rest {
                        ["degenerate", class] => {
                            let class: usize = class.parse().map_err(|_| bad(n, "bad class"))?;
                            if class >= 3 {
                                return Err(bad(n, "class out of range"));
                            }
                            tasks.push(TaskModel::Degenerate { class });
                        }
                        ["trained"] => current = Some((n, [false; 3], [0.0; 3], vec![[0.0; 3]; feature_dim])),
                        _ => return Err(bad(n, "expected `trained` or `degenerate <class>`")),
                    }
                }
                ["present", a, b, c] if current.is_some() => {
                    let cur = current.as_mut().unwrap();
                    for (slot, v) in cur.1.iter_mut().zip([a, b, c]) {
                        *slot = match *v {
                            "1" => true,
                            "0" => false,
                            _ => return Err(bad(n, "present flags must be 0 or 1")),
                        };
                    }
                }
                ["bias", a, b, c] if current.is_some() => {
                    current.as_mut().unwrap().2 = parse_row(n, [a, b, c])?;
                }
                ["w", j, a, b, c] if current.is_some() => {
                    let j: usize = j.parse().map_err(|_| bad(n, "bad feature index"))?;
                    let cur = current.as_mut().unwrap();
                    *cur.3.get_mut(j).ok_or_else(|| bad(n, "feature index out of range"))? = parse_row(n, [a, b, c])?;
                }
                ["end"] => {
                    finish(&mut current, &mut tasks);
                    break;
                }
                _ => return Err(bad(n, &format!("unexpected line {line:?}"))),
            }
        }
        let tasks: [TaskModel; 6] =
            tasks.try_into().map_err(|t: Vec<_>| ImputeError::ModelFormat(format!("expected 6 tasks, found {}", t.len())))?;
        for (metric, task) in Metric::ALL.iter().zip(&tasks) {
            if let TaskModel::Trained { present, .. } = task {
                if present.iter().filter(|p| **p).count() < 2 {
                    return Err(ImputeError::ModelFormat(format!("task {} has fewer than two classes", metric.key())));
                }
            }
        }
        Ok(Self { max_tokens, feature_dim, hash_seed, stop_words: StopWords::with_version(version, words), tasks })
    }
}

fn parse_row(n: usize, values: [&&str; 3]) -> Result<[f64; 3], ImputeError> {
    let mut row = [0.0; 3];
    for (slot, v) in row.iter_mut().zip(values) {
        *slot = v
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| ImputeError::ModelFormat(format!("line {n}: bad number {v:?}")))?;
    }
    Ok(row)
}

impl Imputer for BaselineModel {
    fn predict(&self, cve_id: &CveId, description: &str) -> Result<Prediction, ImputeError> {
        let tokens = preprocess(description, self.max_tokens, &self.stop_words)?;
        Ok(self.predict_tokens(cve_id, &tokens))
    }

    fn source(&self) -> PredictionSource {
        PredictionSource::Baseline
    }
}
