//! Hashed bag-of-n-grams features and a softmax linear model trained with
//! soft-target cross-entropy.
//!
//! Features are the lowercased whitespace tokens plus adjacent-token bigrams
//! joined by `_` (`"a b"` yields `a`, `b`, `a_b`). Each feature string is
//! hashed with 64-bit FNV-1a over its UTF-8 bytes (offset basis
//! `0xcbf29ce484222325`, prime `0x100000001b3`) and the low 18 bits select
//! the bucket.

use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::dataset::LabeledText;
use crate::labels::{argmax, soft_ce_gradient, soft_cross_entropy, softmax, SoftLabel};
use crate::policy::AugmentedExample;
use crate::textops::tokenize;

pub const HASH_BITS: u32 = 18;
pub const N_BUCKETS: usize = 1 << HASH_BITS;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(*b)).wrapping_mul(FNV_PRIME))
}

pub fn bucket_of(feature: &str) -> u32 {
    (fnv1a64(feature.as_bytes()) & (N_BUCKETS as u64 - 1)) as u32
}

/// Sparse bucket counts, sorted by bucket index with no duplicates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureVector(Vec<(u32, f64)>);

impl FeatureVector {
    pub fn entries(&self) -> &[(u32, f64)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of all counts (the number of n-gram increments).
    pub fn total(&self) -> f64 {
        self.0.iter().map(|(_, c)| c).sum()
    }
}

pub fn featurize(text: &str) -> FeatureVector {
    let lowered = text.to_lowercase();
    let toks = tokenize(&lowered);
    let mut buckets: Vec<u32> = Vec::with_capacity(2 * toks.len());
    for t in toks.iter() {
        buckets.push(bucket_of(t));
    }
    for w in toks.tokens().windows(2) {
        buckets.push(bucket_of(&format!("{}_{}", w[0], w[1])));
    }
    buckets.sort_unstable();
    let mut out: Vec<(u32, f64)> = Vec::with_capacity(buckets.len());
    for b in buckets {
        match out.last_mut() {
            Some((last, c)) if *last == b => *c += 1.0,
            _ => out.push((b, 1.0)),
        }
    }
    FeatureVector(out)
}

/// Dense `n_class x N_BUCKETS` weights (row-major) plus per-class bias.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    n_class: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
    label_names: Option<Vec<String>>,
}

impl LinearModel {
    pub fn zeros(n_class: usize) -> Self {
        LinearModel {
            n_class,
            weights: vec![0.0; n_class * N_BUCKETS],
            bias: vec![0.0; n_class],
            label_names: None,
        }
    }

    pub fn n_class(&self) -> usize {
        self.n_class
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    pub fn weight(&self, class: usize, bucket: u32) -> f64 {
        self.weights[class * N_BUCKETS + bucket as usize]
    }

    pub fn set_weight(&mut self, class: usize, bucket: u32, w: f64) {
        self.weights[class * N_BUCKETS + bucket as usize] = w;
    }

    pub fn label_names(&self) -> Option<&[String]> {
        self.label_names.as_deref()
    }

    pub fn with_label_names(mut self, names: Option<Vec<String>>) -> Self {
        self.label_names = names;
        self
    }

    pub fn logits(&self, x: &FeatureVector) -> Vec<f64> {
        (0..self.n_class)
            .map(|c| {
                let row = &self.weights[c * N_BUCKETS..(c + 1) * N_BUCKETS];
                self.bias[c] + x.0.iter().map(|(i, v)| row[*i as usize] * v).sum::<f64>()
            })
            .collect()
    }

    fn predict_features(&self, x: &FeatureVector) -> Vec<f64> {
        softmax(&self.logits(x))
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().chain(&self.bias).all(|w| w.is_finite())
    }
}

/// Class probabilities for `text`.
pub fn predict(model: &LinearModel, text: &str) -> SoftLabel {
    let p = model.predict_features(&featurize(text));
    SoftLabel::new(p).expect("softmax output is a distribution")
}

/// Fraction of examples whose argmax prediction matches (ties → lowest class).
pub fn evaluate(model: &LinearModel, data: &[LabeledText]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::domain("cannot evaluate on an empty split"));
    }
    let correct: usize = data
        .par_iter()
        .map(|ex| usize::from(argmax(&model.logits(&featurize(&ex.text))) == ex.label.0))
        .sum();
    Ok(correct as f64 / data.len() as f64)
}

fn accuracy_on(model: &LinearModel, feats: &[(FeatureVector, usize)]) -> f64 {
    let correct = feats
        .iter()
        .filter(|(x, y)| argmax(&model.logits(x)) == *y)
        .count();
    correct as f64 / feats.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.1,
            batch_size: 32,
            max_epochs: 10,
            patience: 5,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::domain("learning_rate must be positive"));
        }
        if self.batch_size == 0 || self.max_epochs == 0 || self.patience == 0 {
            return Err(Error::domain("batch_size, max_epochs and patience must be positive"));
        }
        if self.patience > self.max_epochs {
            return Err(Error::domain("patience must not exceed max_epochs"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean soft cross-entropy over the training set after the epoch.
    pub train_loss: f64,
    pub val_accuracy: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Snapshot with the best validation accuracy (earliest on ties).
    pub model: LinearModel,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_accuracy: f64,
}

/// Mini-batch SGD on mean soft cross-entropy with validation early stopping.
pub fn train<R: Rng + ?Sized>(
    train: &[AugmentedExample],
    val: &[LabeledText],
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(Error::domain("training set is empty"));
    }
    if val.is_empty() {
        return Err(Error::domain("validation set is empty"));
    }
    let n_class = train[0].soft_label.n_class();
    if n_class < 2 {
        return Err(Error::domain("need at least 2 classes"));
    }
    if let Some(bad) = train.iter().find(|e| e.soft_label.n_class() != n_class) {
        return Err(Error::domain(format!(
            "dimension mismatch: soft label of {:?} has {} classes, expected {n_class}",
            bad.text,
            bad.soft_label.n_class()
        )));
    }
    if let Some(bad) = val.iter().find(|e| e.label.0 >= n_class) {
        return Err(Error::domain(format!(
            "dimension mismatch: validation class {} >= {n_class}",
            bad.label.0
        )));
    }

    let xs: Vec<FeatureVector> = train.iter().map(|e| featurize(&e.text)).collect();
    let val_feats: Vec<(FeatureVector, usize)> =
        val.iter().map(|e| (featurize(&e.text), e.label.0)).collect();

    let mut model = LinearModel::zeros(n_class);
    let mut best = model.clone();
    let mut best_acc = f64::NEG_INFINITY;
    let mut best_epoch = 0;
    let mut stale = 0;
    let mut history = Vec::new();
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut grads: Vec<Vec<f64>> = Vec::with_capacity(cfg.batch_size);

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(rng);
        for batch in order.chunks(cfg.batch_size) {
            grads.clear();
            for &i in batch {
                grads.push(soft_ce_gradient(&model.logits(&xs[i]), &train[i].soft_label)?);
            }
            let step = cfg.learning_rate / batch.len() as f64;
            for (&i, g) in batch.iter().zip(&grads) {
                for (c, gc) in g.iter().enumerate() {
                    let row = &mut model.weights[c * N_BUCKETS..(c + 1) * N_BUCKETS];
                    for (b, v) in xs[i].entries() {
                        row[*b as usize] -= step * gc * v;
                    }
                    model.bias[c] -= step * gc;
                }
            }
        }

        let mut loss = 0.0;
        for (x, e) in xs.iter().zip(train) {
            loss += soft_cross_entropy(&model.predict_features(x), &e.soft_label)?;
        }
        let train_loss = loss / train.len() as f64;
        if !train_loss.is_finite() || !model.is_finite() {
            return Err(Error::Training {
                epoch,
                message: format!("non-finite training loss {train_loss}"),
            });
        }
        let val_accuracy = accuracy_on(&model, &val_feats);
        history.push(EpochRecord {
            epoch,
            train_loss,
            val_accuracy,
        });
        if val_accuracy > best_acc {
            best_acc = val_accuracy;
            best_epoch = epoch;
            best.weights.copy_from_slice(&model.weights);
            best.bias.copy_from_slice(&model.bias);
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                break;
            }
        }
    }

    Ok(TrainOutcome {
        model: best,
        history,
        best_epoch,
        best_val_accuracy: best_acc,
    })
}

const CHECKPOINT_MAGIC: &[u8; 8] = b"AUGLINM\0";
const CHECKPOINT_VERSION: u32 = 1;

impl LinearModel {
    /// Writes the versioned little-endian checkpoint.
    ///
    /// Layout: magic `AUGLINM\0`, u32 version (1), u32 n_class, u32 hash bits,
    /// u32 label count (0 or n_class), then per label a u32 byte length and
    /// UTF-8 bytes, then `n_class * 2^bits` f64 weights (row-major by class),
    /// then `n_class` f64 biases.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(CHECKPOINT_MAGIC)?;
        w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
        w.write_all(&(self.n_class as u32).to_le_bytes())?;
        w.write_all(&HASH_BITS.to_le_bytes())?;
        let names = self.label_names.as_deref().unwrap_or(&[]);
        w.write_all(&(names.len() as u32).to_le_bytes())?;
        for n in names {
            w.write_all(&(n.len() as u32).to_le_bytes())?;
            w.write_all(n.as_bytes())?;
        }
        let mut buf = Vec::with_capacity(8 * (self.weights.len() + self.bias.len()));
        for x in self.weights.iter().chain(&self.bias) {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        w.write_all(&buf)
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let fmt = |m: &str| Error::Format(format!("model checkpoint: {m}"));
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(|_| fmt("truncated header"))?;
        if &magic != CHECKPOINT_MAGIC {
            return Err(fmt("bad magic"));
        }
        let mut u32_buf = [0u8; 4];
        let mut read_u32 = |r: &mut R| -> Result<u32> {
            r.read_exact(&mut u32_buf).map_err(|_| fmt("truncated header"))?;
            Ok(u32::from_le_bytes(u32_buf))
        };
        let version = read_u32(&mut r)?;
        if version != CHECKPOINT_VERSION {
            return Err(fmt(&format!("unsupported version {version}")));
        }
        let n_class = read_u32(&mut r)? as usize;
        let bits = read_u32(&mut r)?;
        if bits != HASH_BITS {
            return Err(fmt(&format!("hash width {bits} bits, expected {HASH_BITS}")));
        }
        if n_class < 2 {
            return Err(fmt("fewer than 2 classes"));
        }
        let n_names = read_u32(&mut r)? as usize;
        if n_names != 0 && n_names != n_class {
            return Err(fmt("label count does not match n_class"));
        }
        let mut names = Vec::with_capacity(n_names);
        for _ in 0..n_names {
            let len = read_u32(&mut r)? as usize;
            let mut b = vec![0u8; len];
            r.read_exact(&mut b).map_err(|_| fmt("truncated label"))?;
            names.push(String::from_utf8(b).map_err(|_| fmt("label is not UTF-8"))?);
        }
        let n_floats = n_class * N_BUCKETS + n_class;
        let mut bytes = vec![0u8; 8 * n_floats];
        r.read_exact(&mut bytes).map_err(|_| fmt("truncated weights"))?;
        let mut floats = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
        let weights: Vec<f64> = floats.by_ref().take(n_class * N_BUCKETS).collect();
        let bias: Vec<f64> = floats.collect();
        let model = LinearModel {
            n_class,
            weights,
            bias,
            label_names: (n_names > 0).then_some(names),
        };
        if !model.is_finite() {
            return Err(fmt("non-finite parameters"));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).map_err(|e| Error::io(path, e))?;
        crate::harness::write_atomic(path, &buf)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_from(std::io::BufReader::new(f))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::{ClassIndex, SoftLabel};
    use crate::policy::Provenance;
    use crate::rng::stream;

    fn toy() -> (Vec<AugmentedExample>, Vec<LabeledText>) {
        let mut train = Vec::new();
        let mut val = Vec::new();
        for i in 0..20 {
            let (word, y) = if i % 2 == 0 { ("pos", 0) } else { ("neg", 1) };
            let text = vec![word; 3 + i % 4].join(" ");
            train.push(AugmentedExample {
                text: text.clone(),
                soft_label: SoftLabel::one_hot(ClassIndex(y), 2).unwrap(),
                provenance: Provenance::Original,
                source_index: i,
            });
            val.push(LabeledText::new(text, ClassIndex(y)));
        }
        (train, val)
    }

    #[test]
    fn fnv_reference_values() {
        // Published FNV-1a 64 test vectors.
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn featurize_examples() {
        let f = featurize("a b");
        assert_eq!(f.total(), 3.0);
        let mut expected: Vec<u32> = vec![bucket_of("a"), bucket_of("b"), bucket_of("a_b")];
        expected.sort();
        let got: Vec<u32> = f.entries().iter().map(|(b, _)| *b).collect();
        assert_eq!(got, expected);
        assert!(featurize("").is_empty());
        assert_eq!(featurize("The Movie  was"), featurize("the movie was"));
        assert_eq!(featurize("x x").total(), 3.0);
        assert!(featurize("x y z").entries().iter().all(|(b, c)| (*b as usize) < N_BUCKETS && *c > 0.0));
    }

    #[test]
    fn zero_model_predicts_uniform() {
        let m = LinearModel::zeros(4);
        assert_eq!(predict(&m, "anything at all").probs(), [0.25; 4]);
    }

    #[test]
    fn separable_toy_set() {
        let (train_set, val) = toy();
        let out = train(&train_set, &val, &TrainConfig::default(), &mut stream(1)).unwrap();
        assert_eq!(evaluate(&out.model, &val).unwrap(), 1.0);
        assert_eq!(predict(&out.model, "pos pos pos").argmax(), ClassIndex(0));
        assert_eq!(predict(&out.model, &val[1].text).argmax(), ClassIndex(1));
        for w in out.history.windows(2) {
            assert!(w[1].train_loss <= w[0].train_loss + 1e-6);
        }
    }

    #[test]
    fn early_stopping_on_constant_validation() {
        let (mut train_set, mut val) = toy();
        for e in &mut train_set {
            e.soft_label = SoftLabel::one_hot(ClassIndex(0), 2).unwrap();
        }
        for e in &mut val {
            e.label = ClassIndex(0);
        }
        let cfg = TrainConfig { patience: 1, ..Default::default() };
        let out = train(&train_set, &val, &cfg, &mut stream(0)).unwrap();
        assert_eq!(out.history.len(), 2);
        assert_eq!(out.best_epoch, 1);
    }

    #[test]
    fn returned_snapshot_is_the_best_epoch() {
        let (train_set, val) = toy();
        let out = train(&train_set, &val, &TrainConfig::default(), &mut stream(3)).unwrap();
        let max = out.history.iter().map(|h| h.val_accuracy).fold(0.0, f64::max);
        assert_eq!(out.best_val_accuracy, max);
        assert_eq!(evaluate(&out.model, &val).unwrap(), max);
    }

    #[test]
    fn training_is_deterministic() {
        let (train_set, val) = toy();
        let a = train(&train_set, &val, &TrainConfig::default(), &mut stream(9)).unwrap();
        let b = train(&train_set, &val, &TrainConfig::default(), &mut stream(9)).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.model, b.model);
    }

    #[test]
    fn divergence_is_a_training_error() {
        let (train_set, val) = toy();
        let cfg = TrainConfig { learning_rate: 1e308, ..Default::default() };
        let err = train(&train_set, &val, &cfg, &mut stream(0)).unwrap_err();
        assert!(matches!(err, Error::Training { .. }), "{err}");
    }

    #[test]
    fn dimension_mismatch_and_empty_inputs() {
        let (mut train_set, val) = toy();
        assert!(train(&[], &val, &TrainConfig::default(), &mut stream(0)).is_err());
        assert!(train(&train_set, &[], &TrainConfig::default(), &mut stream(0)).is_err());
        train_set[3].soft_label = SoftLabel::one_hot(ClassIndex(0), 3).unwrap();
        assert!(matches!(
            train(&train_set, &val, &TrainConfig::default(), &mut stream(0)),
            Err(Error::Domain(_))
        ));
        assert!(evaluate(&LinearModel::zeros(2), &[]).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let m = LinearModel::zeros(2);
        let zeros: Vec<_> = (0..10).map(|i| LabeledText::new(format!("t{i}"), ClassIndex(0))).collect();
        assert_eq!(evaluate(&m, &zeros).unwrap(), 1.0);
        let half: Vec<_> = (0..10).map(|i| LabeledText::new(format!("t{i}"), ClassIndex(i % 2))).collect();
        assert_eq!(evaluate(&m, &half).unwrap(), 0.5);
    }

    #[test]
    fn checkpoint_roundtrip() {
        let (train_set, val) = toy();
        let out = train(&train_set, &val, &TrainConfig::default(), &mut stream(2)).unwrap();
        let m = out.model.with_label_names(Some(vec!["pos".into(), "neg".into()]));
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..8], b"AUGLINM\0");
        let back = LinearModel::read_from(buf.as_slice()).unwrap();
        assert_eq!(back, m);
        assert!(LinearModel::read_from(&buf[..100]).is_err());
        buf[8] = 9;
        assert!(LinearModel::read_from(buf.as_slice()).is_err());
    }
}
