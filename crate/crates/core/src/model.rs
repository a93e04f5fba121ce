//! Compact trainable classifier: a one-hidden-layer MLP on flattened grids.
//!
//! softmax(W2 · relu(W1 · x + b1) + b2), trained with plain mini-batch
//! gradient descent on mean cross-entropy. Training is single-threaded and
//! bit-deterministic given `(data, config, seed)`: initialization and the
//! per-epoch shuffle order derive from one seeded stream, and all arithmetic
//! runs in 32-bit floats in a fixed order.
//!
//! The same forward/backward code is instantiated at `f64` for the
//! finite-difference gradient check, which makes its 1e-4 tolerance
//! meaningful.

use num_traits::Float;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::digest::Digest;
use crate::grid::FeatureGrid;

pub const DEFAULT_HIDDEN: usize = 64;
pub const DEFAULT_EPOCHS: u32 = 20;
pub const DEFAULT_LEARNING_RATE: f64 = 0.05;
pub const DEFAULT_BATCH_SIZE: usize = 64;

/// Checkpoint file magic.
pub const CHECKPOINT_MAGIC: &[u8; 4] = b"PBM1";

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("training needs at least 2 classes present, got {0}")]
    TooFewClasses(usize),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("input is {got_rows}x{got_cols} but the model expects {rows}x{cols}")]
    DimensionMismatch {
        rows: u16,
        cols: u16,
        got_rows: u16,
        got_cols: u16,
    },
    #[error("non-finite loss at epoch {0}: training diverged")]
    Divergence(u32),
    #[error("invalid training config: {0}")]
    BadConfig(&'static str),
    #[error("malformed checkpoint: {0}")]
    BadCheckpoint(&'static str),
}

/// Training hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub hidden: usize,
    pub epochs: u32,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl TrainConfig {
    pub fn with_seed(seed: u64) -> Self {
        TrainConfig {
            hidden: DEFAULT_HIDDEN,
            epochs: DEFAULT_EPOCHS,
            learning_rate: DEFAULT_LEARNING_RATE,
            batch_size: DEFAULT_BATCH_SIZE,
            seed,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        if self.hidden == 0 {
            return Err(ModelError::BadConfig("hidden units must be positive"));
        }
        if self.epochs == 0 {
            return Err(ModelError::BadConfig("epochs must be positive"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(ModelError::BadConfig("learning rate must be positive"));
        }
        if self.batch_size == 0 {
            return Err(ModelError::BadConfig("batch size must be positive"));
        }
        Ok(())
    }
}

/// A labeled dataset flattened for training: inputs are row-major grid
/// values, labels are indices into `class_order`.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    pub class_order: Vec<String>,
    pub rows: u16,
    pub cols: u16,
    pub inputs: Vec<Vec<f32>>,
    pub labels: Vec<usize>,
}

impl TrainingSet {
    pub fn new(
        class_order: Vec<String>,
        items: Vec<(&FeatureGrid, &str)>,
    ) -> Result<Self, ModelError> {
        let (rows, cols) = match items.first() {
            Some((g, _)) => (g.rows(), g.cols()),
            None => return Err(ModelError::EmptyTrainingSet),
        };
        let mut inputs = Vec::with_capacity(items.len());
        let mut labels = Vec::with_capacity(items.len());
        for (grid, label) in items {
            if grid.rows() != rows || grid.cols() != cols {
                return Err(ModelError::DimensionMismatch {
                    rows,
                    cols,
                    got_rows: grid.rows(),
                    got_cols: grid.cols(),
                });
            }
            let idx = class_order
                .iter()
                .position(|c| c == label)
                .ok_or_else(|| ModelError::UnknownLabel(label.to_string()))?;
            inputs.push(grid.values().to_vec());
            labels.push(idx);
        }
        Ok(TrainingSet {
            class_order,
            rows,
            cols,
            inputs,
            labels,
        })
    }

    fn distinct_labels(&self) -> usize {
        let mut seen = vec![false; self.class_order.len()];
        for &l in &self.labels {
            seen[l] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }
}

/// Training metadata embedded in the checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainMeta {
    pub seed: u64,
    pub epochs: u32,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub final_loss: f64,
}

/// Trained classifier parameters. Serialization is bit-exact, so the
/// checkpoint file has a stable content hash.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub class_order: Vec<String>,
    pub rows: u16,
    pub cols: u16,
    pub hidden: usize,
    /// hidden × input, row-major.
    pub w1: Vec<f32>,
    pub b1: Vec<f32>,
    /// classes × hidden, row-major.
    pub w2: Vec<f32>,
    pub b2: Vec<f32>,
    pub meta: TrainMeta,
}

/// Prediction: argmax class plus the full probability vector.
#[derive(Debug, Clone)]
pub struct Prediction {
    pub class_index: usize,
    pub class: String,
    pub probabilities: Vec<f64>,
}

// ---------------------------------------------------------------------------
// Generic network core (f32 for training, f64 for the gradient check)
// ---------------------------------------------------------------------------

struct Net<T> {
    input: usize,
    hidden: usize,
    classes: usize,
    w1: Vec<T>,
    b1: Vec<T>,
    w2: Vec<T>,
    b2: Vec<T>,
}

struct Grads<T> {
    w1: Vec<T>,
    b1: Vec<T>,
    w2: Vec<T>,
    b2: Vec<T>,
}

impl<T: Float + std::ops::AddAssign + std::ops::SubAssign> Net<T> {
    /// Uniform(−a, a) initialization with a = sqrt(6 / (fan_in + fan_out));
    /// biases start at zero. Draw order is fixed: w1 row-major, then w2.
    fn init(input: usize, hidden: usize, classes: usize, rng: &mut ChaCha8Rng) -> Self {
        let a1 = (6.0 / (input + hidden) as f64).sqrt();
        let a2 = (6.0 / (hidden + classes) as f64).sqrt();
        let mut draw = |a: f64| {
            let u: f64 = rng.random();
            T::from(a * (2.0 * u - 1.0)).unwrap()
        };
        let w1 = (0..hidden * input).map(|_| draw(a1)).collect();
        let w2 = (0..classes * hidden).map(|_| draw(a2)).collect();
        Net {
            input,
            hidden,
            classes,
            w1,
            b1: vec![T::zero(); hidden],
            w2,
            b2: vec![T::zero(); classes],
        }
    }

    fn zero_grads(&self) -> Grads<T> {
        Grads {
            w1: vec![T::zero(); self.w1.len()],
            b1: vec![T::zero(); self.b1.len()],
            w2: vec![T::zero(); self.w2.len()],
            b2: vec![T::zero(); self.b2.len()],
        }
    }

    /// Hidden activations relu(W1·x + b1).
    fn hidden_out(&self, x: &[T]) -> Vec<T> {
        let mut h = Vec::with_capacity(self.hidden);
        for j in 0..self.hidden {
            let row = &self.w1[j * self.input..(j + 1) * self.input];
            let mut acc = self.b1[j];
            for (w, xi) in row.iter().zip(x) {
                acc += *w * *xi;
            }
            h.push(if acc > T::zero() { acc } else { T::zero() });
        }
        h
    }

    /// Class probabilities softmax(W2·h + b2), max-subtracted for stability.
    fn probs(&self, h: &[T]) -> Vec<T> {
        let mut logits = Vec::with_capacity(self.classes);
        for c in 0..self.classes {
            let row = &self.w2[c * self.hidden..(c + 1) * self.hidden];
            let mut acc = self.b2[c];
            for (w, hj) in row.iter().zip(h) {
                acc += *w * *hj;
            }
            logits.push(acc);
        }
        let max = logits.iter().cloned().fold(T::neg_infinity(), T::max);
        let mut sum = T::zero();
        let mut probs: Vec<T> = logits
            .iter()
            .map(|&z| {
                let e = (z - max).exp();
                sum += e;
                e
            })
            .collect();
        for p in &mut probs {
            *p = *p / sum;
        }
        probs
    }

    /// Cross-entropy of one sample; probability floored to avoid ln(0) in
    /// the reported value (the gradient does not use the floor). NaN
    /// probabilities propagate so divergence is visible.
    fn cross_entropy(p: T) -> T {
        if p.is_nan() {
            return T::nan();
        }
        let floor = T::from(1e-30).unwrap();
        -(p.max(floor)).ln()
    }

    fn sample_loss(&self, x: &[T], label: usize) -> T {
        let h = self.hidden_out(x);
        Self::cross_entropy(self.probs(&h)[label])
    }

    fn mean_loss(&self, inputs: &[Vec<T>], labels: &[usize]) -> T {
        let mut acc = T::zero();
        for (x, &y) in inputs.iter().zip(labels) {
            acc += self.sample_loss(x, y);
        }
        acc / T::from(inputs.len()).unwrap()
    }

    /// Accumulate the gradient of one sample's cross-entropy into `grads`;
    /// returns the sample loss.
    fn accumulate(&self, x: &[T], label: usize, grads: &mut Grads<T>) -> T {
        let h = self.hidden_out(x);
        let probs = self.probs(&h);

        // d(loss)/d(logit_c) = p_c − 1[c = label]
        let mut dlogits = probs.clone();
        dlogits[label] -= T::one();

        for c in 0..self.classes {
            grads.b2[c] += dlogits[c];
            let row = &mut grads.w2[c * self.hidden..(c + 1) * self.hidden];
            for (g, hj) in row.iter_mut().zip(&h) {
                *g += dlogits[c] * *hj;
            }
        }

        // Backprop through relu: dh masked where the activation was zero.
        let mut dh = vec![T::zero(); self.hidden];
        for c in 0..self.classes {
            let row = &self.w2[c * self.hidden..(c + 1) * self.hidden];
            for (j, w) in row.iter().enumerate() {
                dh[j] += dlogits[c] * *w;
            }
        }
        for j in 0..self.hidden {
            if h[j] <= T::zero() {
                continue;
            }
            grads.b1[j] += dh[j];
            let row = &mut grads.w1[j * self.input..(j + 1) * self.input];
            for (g, xi) in row.iter_mut().zip(x) {
                *g += dh[j] * *xi;
            }
        }

        Self::cross_entropy(probs[label])
    }

    fn step(&mut self, grads: &Grads<T>, scale: T) {
        for (w, g) in self.w1.iter_mut().zip(&grads.w1) {
            *w -= scale * *g;
        }
        for (b, g) in self.b1.iter_mut().zip(&grads.b1) {
            *b -= scale * *g;
        }
        for (w, g) in self.w2.iter_mut().zip(&grads.w2) {
            *w -= scale * *g;
        }
        for (b, g) in self.b2.iter_mut().zip(&grads.b2) {
            *b -= scale * *g;
        }
    }
}

// ---------------------------------------------------------------------------
// Training and prediction
// ---------------------------------------------------------------------------

/// Train the classifier. Deterministic given `(set, cfg)`.
pub fn train(set: &TrainingSet, cfg: &TrainConfig) -> Result<ModelParams, ModelError> {
    cfg.validate()?;
    if set.inputs.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    let present = set.distinct_labels();
    if present < 2 {
        return Err(ModelError::TooFewClasses(present));
    }

    let input = set.rows as usize * set.cols as usize;
    let classes = set.class_order.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut net: Net<f32> = Net::init(input, cfg.hidden, classes, &mut rng);

    let n = set.inputs.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut final_loss = 0.0f64;

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0f64;
        for batch in order.chunks(cfg.batch_size) {
            let mut grads = net.zero_grads();
            for &i in batch {
                epoch_loss += net.accumulate(&set.inputs[i], set.labels[i], &mut grads) as f64;
            }
            let scale = (cfg.learning_rate / batch.len() as f64) as f32;
            net.step(&grads, scale);
        }
        epoch_loss /= n as f64;
        if !epoch_loss.is_finite() {
            return Err(ModelError::Divergence(epoch));
        }
        final_loss = epoch_loss;
    }

    Ok(ModelParams {
        class_order: set.class_order.clone(),
        rows: set.rows,
        cols: set.cols,
        hidden: cfg.hidden,
        w1: net.w1,
        b1: net.b1,
        w2: net.w2,
        b2: net.b2,
        meta: TrainMeta {
            seed: cfg.seed,
            epochs: cfg.epochs,
            learning_rate: cfg.learning_rate,
            batch_size: cfg.batch_size,
            final_loss,
        },
    })
}

impl ModelParams {
    fn net(&self) -> Net<f32> {
        Net {
            input: self.rows as usize * self.cols as usize,
            hidden: self.hidden,
            classes: self.class_order.len(),
            w1: self.w1.clone(),
            b1: self.b1.clone(),
            w2: self.w2.clone(),
            b2: self.b2.clone(),
        }
    }

    /// Classify one grid. Ties break toward the lowest class index.
    pub fn predict(&self, grid: &FeatureGrid) -> Result<Prediction, ModelError> {
        if grid.rows() != self.rows || grid.cols() != self.cols {
            return Err(ModelError::DimensionMismatch {
                rows: self.rows,
                cols: self.cols,
                got_rows: grid.rows(),
                got_cols: grid.cols(),
            });
        }
        let net = self.net();
        let h = net.hidden_out(grid.values());
        let probs32 = net.probs(&h);
        // Normalize in f64 so the reported vector sums to 1 tightly.
        let sum: f64 = probs32.iter().map(|&p| p as f64).sum();
        let probabilities: Vec<f64> = probs32.iter().map(|&p| p as f64 / sum).collect();
        let mut class_index = 0;
        for (i, &p) in probabilities.iter().enumerate() {
            if p > probabilities[class_index] {
                class_index = i;
            }
        }
        Ok(Prediction {
            class_index,
            class: self.class_order[class_index].clone(),
            probabilities,
        })
    }

    /// Mean cross-entropy of a labeled set under this model.
    pub fn mean_loss(&self, set: &TrainingSet) -> f64 {
        let net = self.net();
        let mut acc = 0.0f64;
        for (x, &y) in set.inputs.iter().zip(&set.labels) {
            acc += net.sample_loss(x, y) as f64;
        }
        acc / set.inputs.len() as f64
    }
}

// ---------------------------------------------------------------------------
// Finite-difference gradient check (64-bit mode)
// ---------------------------------------------------------------------------

fn to_f64_inputs(set: &TrainingSet) -> Vec<Vec<f64>> {
    set.inputs
        .iter()
        .map(|x| x.iter().map(|&v| v as f64).collect())
        .collect()
}

fn check_against_numeric(
    net: &mut Net<f64>,
    inputs: &[Vec<f64>],
    labels: &[usize],
    corrupt_w2: bool,
) -> f64 {
    // Analytic gradient of the mean loss.
    let mut grads = net.zero_grads();
    for (x, &y) in inputs.iter().zip(labels) {
        net.accumulate(x, y, &mut grads);
    }
    let scale = 1.0 / inputs.len() as f64;
    for g in grads
        .w1
        .iter_mut()
        .chain(&mut grads.b1)
        .chain(&mut grads.w2)
        .chain(&mut grads.b2)
    {
        *g *= scale;
    }
    if corrupt_w2 {
        for g in &mut grads.w2 {
            *g *= 2.0;
        }
    }

    // Central differences over every parameter.
    const H: f64 = 1e-5;
    let mut max_rel = 0.0f64;
    let param_count = net.w1.len() + net.b1.len() + net.w2.len() + net.b2.len();
    for p in 0..param_count {
        let analytic = {
            let Grads { w1, b1, w2, b2 } = &grads;
            *w1.iter().chain(b1).chain(w2).chain(b2).nth(p).unwrap()
        };
        let mut poke = |delta: f64, net: &mut Net<f64>| {
            let w1n = net.w1.len();
            let b1n = net.b1.len();
            let w2n = net.w2.len();
            if p < w1n {
                net.w1[p] += delta;
            } else if p < w1n + b1n {
                net.b1[p - w1n] += delta;
            } else if p < w1n + b1n + w2n {
                net.w2[p - w1n - b1n] += delta;
            } else {
                net.b2[p - w1n - b1n - w2n] += delta;
            }
        };
        poke(H, net);
        let plus = net.mean_loss(inputs, labels);
        poke(-2.0 * H, net);
        let minus = net.mean_loss(inputs, labels);
        poke(H, net);
        let numeric = (plus - minus) / (2.0 * H);
        let rel = (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(1e-8);
        max_rel = max_rel.max(rel);
    }
    max_rel
}

/// Compare the analytic gradient against central finite differences over
/// every parameter, in 64-bit floats. Returns the maximum relative error.
pub fn gradient_check(set: &TrainingSet, hidden: usize, seed: u64) -> Result<f64, ModelError> {
    gradient_check_inner(set, hidden, seed, false)
}

/// Same check with the W2 gradient deliberately doubled; a correct
/// implementation must report a large error here (mutation test).
pub fn gradient_check_corrupted(
    set: &TrainingSet,
    hidden: usize,
    seed: u64,
) -> Result<f64, ModelError> {
    gradient_check_inner(set, hidden, seed, true)
}

fn gradient_check_inner(
    set: &TrainingSet,
    hidden: usize,
    seed: u64,
    corrupt: bool,
) -> Result<f64, ModelError> {
    if set.inputs.is_empty() {
        return Err(ModelError::EmptyTrainingSet);
    }
    if hidden == 0 {
        return Err(ModelError::BadConfig("hidden units must be positive"));
    }
    let input = set.rows as usize * set.cols as usize;
    let classes = set.class_order.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut net: Net<f64> = Net::init(input, hidden, classes, &mut rng);
    let inputs = to_f64_inputs(set);
    Ok(check_against_numeric(&mut net, &inputs, &set.labels, corrupt))
}

// ---------------------------------------------------------------------------
// Checkpoint serialization (magic PBM1)
// ---------------------------------------------------------------------------

impl ModelParams {
    /// Bit-exact checkpoint encoding: magic, dims header, class names,
    /// little-endian f32 parameter blocks in fixed order, then the training
    /// metadata as a length-prefixed UTF-8 blob.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&self.rows.to_le_bytes());
        out.extend_from_slice(&self.cols.to_le_bytes());
        out.extend_from_slice(&(self.hidden as u32).to_le_bytes());
        out.extend_from_slice(&(self.class_order.len() as u32).to_le_bytes());
        for name in &self.class_order {
            out.extend_from_slice(&(name.len() as u16).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
        }
        for block in [&self.w1, &self.b1, &self.w2, &self.b2] {
            for v in block.iter() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        let meta = format!(
            "seed = {}\nepochs = {}\nlearning_rate = {}\nbatch_size = {}\nfinal_loss = {}\n",
            self.meta.seed,
            self.meta.epochs,
            self.meta.learning_rate,
            self.meta.batch_size,
            self.meta.final_loss,
        );
        out.extend_from_slice(&(meta.len() as u32).to_le_bytes());
        out.extend_from_slice(meta.as_bytes());
        out
    }

    pub fn content_hash(&self) -> Digest {
        Digest::of(&self.to_bytes())
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ModelError> {
        let mut at = 0usize;
        let take = |at: &mut usize, n: usize| -> Result<&[u8], ModelError> {
            if *at + n > bytes.len() {
                return Err(ModelError::BadCheckpoint("truncated"));
            }
            let s = &bytes[*at..*at + n];
            *at += n;
            Ok(s)
        };

        if take(&mut at, 4)? != CHECKPOINT_MAGIC {
            return Err(ModelError::BadCheckpoint("bad magic"));
        }
        let rows = u16::from_le_bytes(take(&mut at, 2)?.try_into().unwrap());
        let cols = u16::from_le_bytes(take(&mut at, 2)?.try_into().unwrap());
        let hidden = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap()) as usize;
        let n_classes = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap()) as usize;
        if rows == 0 || cols == 0 || hidden == 0 || n_classes == 0 {
            return Err(ModelError::BadCheckpoint("zero dimension"));
        }
        let mut class_order = Vec::with_capacity(n_classes);
        for _ in 0..n_classes {
            let len = u16::from_le_bytes(take(&mut at, 2)?.try_into().unwrap()) as usize;
            let name = std::str::from_utf8(take(&mut at, len)?)
                .map_err(|_| ModelError::BadCheckpoint("class name is not UTF-8"))?;
            class_order.push(name.to_string());
        }

        let input = rows as usize * cols as usize;
        let mut read_block = |at: &mut usize, n: usize| -> Result<Vec<f32>, ModelError> {
            let raw = take(at, n * 4)?;
            let mut v = Vec::with_capacity(n);
            for chunk in raw.chunks_exact(4) {
                let f = f32::from_le_bytes(chunk.try_into().unwrap());
                if !f.is_finite() {
                    return Err(ModelError::BadCheckpoint("non-finite parameter"));
                }
                v.push(f);
            }
            Ok(v)
        };
        let w1 = read_block(&mut at, hidden * input)?;
        let b1 = read_block(&mut at, hidden)?;
        let w2 = read_block(&mut at, n_classes * hidden)?;
        let b2 = read_block(&mut at, n_classes)?;

        let meta_len = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap()) as usize;
        let meta_text = std::str::from_utf8(take(&mut at, meta_len)?)
            .map_err(|_| ModelError::BadCheckpoint("metadata is not UTF-8"))?
            .to_string();
        if at != bytes.len() {
            return Err(ModelError::BadCheckpoint("trailing bytes"));
        }

        let mut meta = TrainMeta {
            seed: 0,
            epochs: 0,
            learning_rate: 0.0,
            batch_size: 0,
            final_loss: 0.0,
        };
        for line in meta_text.lines() {
            let (key, value) = line
                .split_once(" = ")
                .ok_or(ModelError::BadCheckpoint("malformed metadata line"))?;
            let bad = ModelError::BadCheckpoint("malformed metadata value");
            match key {
                "seed" => meta.seed = value.parse().map_err(|_| bad)?,
                "epochs" => meta.epochs = value.parse().map_err(|_| bad)?,
                "learning_rate" => meta.learning_rate = value.parse().map_err(|_| bad)?,
                "batch_size" => meta.batch_size = value.parse().map_err(|_| bad)?,
                "final_loss" => meta.final_loss = value.parse().map_err(|_| bad)?,
                _ => return Err(ModelError::BadCheckpoint("unknown metadata key")),
            }
        }

        Ok(ModelParams {
            class_order,
            rows,
            cols,
            hidden,
            w1,
            b1,
            w2,
            b2,
            meta,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_grid(rows: u16, cols: u16, v: f32) -> FeatureGrid {
        FeatureGrid::filled(rows, cols, v).unwrap()
    }

    /// Two linearly separable clusters along the first cell.
    fn separable_set() -> TrainingSet {
        let mut items: Vec<(FeatureGrid, String)> = Vec::new();
        for i in 0..10 {
            let mut low = toy_grid(2, 2, 0.2);
            low.set(0, 0, 0.05 + 0.01 * i as f32);
            items.push((low, "A".to_string()));
            let mut high = toy_grid(2, 2, 0.2);
            high.set(0, 0, 0.85 + 0.01 * i as f32);
            items.push((high, "B".to_string()));
        }
        let refs: Vec<(&FeatureGrid, &str)> =
            items.iter().map(|(g, l)| (g, l.as_str())).collect();
        TrainingSet::new(vec!["A".to_string(), "B".to_string()], refs).unwrap()
    }

    #[test]
    fn zero_output_layer_gives_uniform_and_ln6() {
        let classes = 6;
        let params = ModelParams {
            class_order: (0..classes).map(|i| format!("C{i}")).collect(),
            rows: 2,
            cols: 2,
            hidden: 4,
            w1: vec![0.3; 4 * 4],
            b1: vec![0.1; 4],
            w2: vec![0.0; classes * 4],
            b2: vec![0.0; classes],
            meta: TrainMeta {
                seed: 0,
                epochs: 0,
                learning_rate: 0.0,
                batch_size: 0,
                final_loss: 0.0,
            },
        };
        let p = params.predict(&toy_grid(2, 2, 0.5)).unwrap();
        for &pi in &p.probabilities {
            assert!((pi - 1.0 / 6.0).abs() < 1e-6);
        }
        // Tie-break toward the lowest class index.
        assert_eq!(p.class_index, 0);

        // Uniform predictions give cross-entropy ln 6.
        let grid = toy_grid(2, 2, 0.5);
        let set = TrainingSet::new(
            params.class_order.clone(),
            vec![(&grid, "C3")],
        )
        .unwrap();
        assert!((params.mean_loss(&set) - 6.0f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn separable_toy_set_reaches_full_train_accuracy() {
        let set = separable_set();
        let mut cfg = TrainConfig::with_seed(1);
        cfg.epochs = 200;
        cfg.batch_size = 4;
        let params = train(&set, &cfg).unwrap();
        let mut correct = 0;
        for (x, &y) in set.inputs.iter().zip(&set.labels) {
            let grid = FeatureGrid::new(2, 2, x.clone()).unwrap();
            if params.predict(&grid).unwrap().class_index == y {
                correct += 1;
            }
        }
        assert_eq!(correct, set.inputs.len());
    }

    #[test]
    fn training_is_deterministic() {
        let set = separable_set();
        let cfg = TrainConfig {
            epochs: 5,
            ..TrainConfig::with_seed(42)
        };
        let a = train(&set, &cfg).unwrap();
        let b = train(&set, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_bytes(), b.to_bytes());
    }

    #[test]
    fn probabilities_sum_to_one() {
        let set = separable_set();
        let cfg = TrainConfig {
            epochs: 3,
            ..TrainConfig::with_seed(7)
        };
        let params = train(&set, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let values: Vec<f32> = (0..4).map(|_| rng.random::<f32>()).collect();
            let grid = FeatureGrid::new(2, 2, values).unwrap();
            let p = params.predict(&grid).unwrap();
            let sum: f64 = p.probabilities.iter().sum();
            assert!((sum - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn bias_boost_dominates_argmax() {
        let set = separable_set();
        let cfg = TrainConfig {
            epochs: 3,
            ..TrainConfig::with_seed(5)
        };
        let mut params = train(&set, &cfg).unwrap();
        params.b2[1] += 10.0;
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for _ in 0..50 {
            let values: Vec<f32> = (0..4).map(|_| rng.random::<f32>()).collect();
            let grid = FeatureGrid::new(2, 2, values).unwrap();
            assert_eq!(params.predict(&grid).unwrap().class_index, 1);
        }
    }

    #[test]
    fn gradient_check_passes_and_mutation_fails() {
        let set = separable_set();
        let tiny = TrainingSet {
            class_order: set.class_order.clone(),
            rows: set.rows,
            cols: set.cols,
            inputs: set.inputs[..6].to_vec(),
            labels: set.labels[..6].to_vec(),
        };
        let err = gradient_check(&tiny, 5, 3).unwrap();
        assert!(err <= 1e-4, "max relative error {err}");
        let bad = gradient_check_corrupted(&tiny, 5, 3).unwrap();
        assert!(bad > 1e-1, "corrupted error {bad}");
    }

    #[test]
    fn gradient_check_smallest_instance() {
        let grid = toy_grid(1, 2, 0.4);
        let set = TrainingSet::new(
            vec!["A".to_string(), "B".to_string()],
            vec![(&grid, "A")],
        )
        .unwrap();
        let err = gradient_check(&set, 1, 0).unwrap();
        assert!(err <= 1e-4, "max relative error {err}");
    }

    #[test]
    fn checkpoint_round_trip_and_hash_stability() {
        let set = separable_set();
        let cfg = TrainConfig {
            epochs: 2,
            ..TrainConfig::with_seed(11)
        };
        let params = train(&set, &cfg).unwrap();
        let bytes = params.to_bytes();
        let hash = Digest::of(&bytes);
        let back = ModelParams::from_bytes(&bytes).unwrap();
        assert_eq!(back, params);
        assert_eq!(Digest::of(&back.to_bytes()), hash);
    }

    #[test]
    fn divergence_is_reported_with_epoch() {
        let set = separable_set();
        let cfg = TrainConfig {
            learning_rate: 1e30,
            epochs: 10,
            ..TrainConfig::with_seed(1)
        };
        match train(&set, &cfg) {
            Err(ModelError::Divergence(_)) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn empty_and_single_class_rejected() {
        let grid = toy_grid(2, 2, 0.1);
        let set = TrainingSet::new(
            vec!["A".to_string(), "B".to_string()],
            vec![(&grid, "A")],
        )
        .unwrap();
        assert_eq!(
            train(&set, &TrainConfig::with_seed(0)).unwrap_err(),
            ModelError::TooFewClasses(1)
        );
    }
}
