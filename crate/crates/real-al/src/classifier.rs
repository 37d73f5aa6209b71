//! Trainable probabilistic classifier: softmax regression or a one-hidden-layer
//! MLP with inverted dropout, optimized by mini-batch gradient descent on mean
//! cross-entropy. Exposes class probabilities, an encoder for clustering, MC
//! dropout for mutual-information scoring, and exact analytic loss gradients.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledSet;
use crate::error::{Error, Result};
use crate::linalg::{argmax_tie_lowest, dot, Matrix};

const CHECKPOINT_MAGIC: &[u8; 4] = b"RALM";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Softmax,
    Mlp,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelConfig {
    pub kind: ModelKind,
    /// Hidden width; ignored for softmax.
    pub hidden_dim: usize,
    /// Inverted-dropout rate on hidden activations; ignored for softmax.
    pub dropout_rate: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub warmup_epochs: usize,
    pub round_epochs: usize,
    pub evals_per_epoch: usize,
    pub weight_init_seed: u64,
}

impl ModelConfig {
    /// Softmax regression with the stable default step size for unit-scale features.
    pub fn softmax() -> Self {
        ModelConfig {
            kind: ModelKind::Softmax,
            hidden_dim: 0,
            dropout_rate: 0.0,
            learning_rate: 0.1,
            batch_size: 32,
            warmup_epochs: 10,
            round_epochs: 4,
            evals_per_epoch: 4,
            weight_init_seed: 0,
        }
    }

    pub fn mlp(hidden_dim: usize, dropout_rate: f64) -> Self {
        ModelConfig {
            kind: ModelKind::Mlp,
            hidden_dim,
            dropout_rate,
            learning_rate: 0.01,
            batch_size: 32,
            warmup_epochs: 10,
            round_epochs: 4,
            evals_per_epoch: 4,
            weight_init_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.learning_rate <= 0.0 || !self.learning_rate.is_finite() {
            return Err(Error::invalid("learning_rate must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size must be >= 1"));
        }
        if self.evals_per_epoch == 0 {
            return Err(Error::invalid("evals_per_epoch must be >= 1"));
        }
        if self.kind == ModelKind::Mlp {
            if self.hidden_dim == 0 {
                return Err(Error::invalid("mlp needs hidden_dim >= 1"));
            }
            if !(0.0..1.0).contains(&self.dropout_rate) {
                return Err(Error::invalid("dropout_rate must be in [0, 1)"));
            }
        }
        Ok(())
    }
}

/// Model parameters; the variant order of fields is also the checkpoint layout.
#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Softmax {
        /// classes x input_dim
        weights: Matrix,
        bias: Vec<f64>,
    },
    Mlp {
        /// hidden x input_dim
        w1: Matrix,
        b1: Vec<f64>,
        /// classes x hidden
        w2: Matrix,
        b2: Vec<f64>,
    },
}

impl Params {
    pub fn to_flat(&self) -> Vec<f64> {
        match self {
            Params::Softmax { weights, bias } => {
                let mut out = weights.data().to_vec();
                out.extend_from_slice(bias);
                out
            }
            Params::Mlp { w1, b1, w2, b2 } => {
                let mut out = w1.data().to_vec();
                out.extend_from_slice(b1);
                out.extend_from_slice(w2.data());
                out.extend_from_slice(b2);
                out
            }
        }
    }

    /// Rebuild parameters with this value's shapes from a flat vector.
    pub fn from_flat(&self, flat: &[f64]) -> Params {
        match self {
            Params::Softmax { weights, bias } => {
                let (wn, bn) = (weights.data().len(), bias.len());
                assert_eq!(flat.len(), wn + bn);
                Params::Softmax {
                    weights: Matrix::from_vec(weights.rows(), weights.cols(), flat[..wn].to_vec()),
                    bias: flat[wn..].to_vec(),
                }
            }
            Params::Mlp { w1, b1, w2, b2 } => {
                let (n1, n2, n3, n4) = (w1.data().len(), b1.len(), w2.data().len(), b2.len());
                assert_eq!(flat.len(), n1 + n2 + n3 + n4);
                let mut off = 0;
                let f_w1 = Matrix::from_vec(w1.rows(), w1.cols(), flat[off..off + n1].to_vec());
                off += n1;
                let f_b1 = flat[off..off + n2].to_vec();
                off += n2;
                let f_w2 = Matrix::from_vec(w2.rows(), w2.cols(), flat[off..off + n3].to_vec());
                off += n3;
                let f_b2 = flat[off..off + n4].to_vec();
                Params::Mlp {
                    w1: f_w1,
                    b1: f_b1,
                    w2: f_w2,
                    b2: f_b2,
                }
            }
        }
    }

    /// In-place `self += alpha * other`; shapes must match.
    fn scaled_add(&mut self, alpha: f64, other: &Params) {
        match (self, other) {
            (
                Params::Softmax { weights, bias },
                Params::Softmax {
                    weights: ow,
                    bias: ob,
                },
            ) => {
                for (a, b) in weights.data_mut().iter_mut().zip(ow.data()) {
                    *a += alpha * b;
                }
                for (a, b) in bias.iter_mut().zip(ob) {
                    *a += alpha * b;
                }
            }
            (
                Params::Mlp { w1, b1, w2, b2 },
                Params::Mlp {
                    w1: o1,
                    b1: ob1,
                    w2: o2,
                    b2: ob2,
                },
            ) => {
                for (a, b) in w1.data_mut().iter_mut().zip(o1.data()) {
                    *a += alpha * b;
                }
                for (a, b) in b1.iter_mut().zip(ob1) {
                    *a += alpha * b;
                }
                for (a, b) in w2.data_mut().iter_mut().zip(o2.data()) {
                    *a += alpha * b;
                }
                for (a, b) in b2.iter_mut().zip(ob2) {
                    *a += alpha * b;
                }
            }
            _ => panic!("parameter kind mismatch"),
        }
    }

    fn all_finite(&self) -> bool {
        self.to_flat().iter().all(|v| v.is_finite())
    }
}

/// Immutable trained classifier; safe to share across threads for inference.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    params: Params,
    config: ModelConfig,
    classes: usize,
    input_dim: usize,
}

/// Per-call training statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainStats {
    /// Mean cross-entropy of the first optimization step's batch, recorded
    /// before any parameter update of the call.
    pub first_step_loss: f64,
    pub best_validation_accuracy: f64,
    /// Validation mean cross-entropy at each evaluation point.
    pub loss_curve: Vec<f64>,
}

fn softmax_in_place(logits: &mut [f64]) {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in logits.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in logits.iter_mut() {
        *v /= sum;
    }
}

fn relu(v: f64) -> f64 {
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

/// Intermediate activations kept for backprop.
struct Forward {
    probs: Matrix,
    /// Post-ReLU hidden activations (pre-dropout); mlp only.
    hidden: Option<Matrix>,
    /// Per-element dropout scale (0 or 1/(1-p)); mlp with active dropout only.
    scales: Option<Matrix>,
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        self.config.kind
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Model with the same shape but replaced parameters (used by gradient checks).
    pub fn with_params(&self, params: Params) -> TrainedModel {
        TrainedModel {
            params,
            config: self.config.clone(),
            classes: self.classes,
            input_dim: self.input_dim,
        }
    }

    fn check_dim(&self, features: &Matrix) -> Result<()> {
        if features.cols() != self.input_dim {
            return Err(Error::precondition(format!(
                "feature width {} does not match model input dimension {}",
                features.cols(),
                self.input_dim
            )));
        }
        Ok(())
    }

    /// Forward pass; `dropout` carries the rng used for fresh masks when active.
    fn forward(&self, features: &Matrix, dropout: Option<&mut ChaCha8Rng>) -> Forward {
        let n = features.rows();
        let y = self.classes;
        match &self.params {
            Params::Softmax { weights, bias } => {
                let mut probs = Matrix::zeros(n, y);
                for (i, x) in features.iter_rows().enumerate() {
                    let row = probs.row_mut(i);
                    for c in 0..y {
                        row[c] = dot(weights.row(c), x) + bias[c];
                    }
                    softmax_in_place(row);
                }
                Forward {
                    probs,
                    hidden: None,
                    scales: None,
                }
            }
            Params::Mlp { w1, b1, w2, b2 } => {
                let h = w1.rows();
                let mut hidden = Matrix::zeros(n, h);
                for (i, x) in features.iter_rows().enumerate() {
                    let row = hidden.row_mut(i);
                    for j in 0..h {
                        row[j] = relu(dot(w1.row(j), x) + b1[j]);
                    }
                }
                let p = self.config.dropout_rate;
                let scales = dropout.filter(|_| p > 0.0).map(|rng| {
                    let keep_scale = 1.0 / (1.0 - p);
                    let mut s = Matrix::zeros(n, h);
                    for v in s.data_mut() {
                        *v = if rng.random::<f64>() < p { 0.0 } else { keep_scale };
                    }
                    s
                });
                let mut probs = Matrix::zeros(n, y);
                for i in 0..n {
                    let hid = hidden.row(i);
                    let dropped: Vec<f64> = match &scales {
                        Some(s) => hid.iter().zip(s.row(i)).map(|(a, b)| a * b).collect(),
                        None => hid.to_vec(),
                    };
                    let row = probs.row_mut(i);
                    for c in 0..y {
                        row[c] = dot(w2.row(c), &dropped) + b2[c];
                    }
                    softmax_in_place(row);
                }
                Forward {
                    probs,
                    hidden: Some(hidden),
                    scales,
                }
            }
        }
    }

    /// Class probabilities; rows sum to one, dropout disabled.
    pub fn predict_proba(&self, features: &Matrix) -> Result<Matrix> {
        self.check_dim(features)?;
        Ok(self.forward(features, None).probs)
    }

    /// Argmax predictions, ties to the lowest class index.
    pub fn predict_labels(&self, features: &Matrix) -> Result<Vec<u32>> {
        let probs = self.predict_proba(features)?;
        Ok(probs
            .iter_rows()
            .map(|row| argmax_tie_lowest(row) as u32)
            .collect())
    }

    /// Encoder embeddings: the input itself for softmax, the post-ReLU
    /// (pre-dropout) hidden activations for the MLP.
    pub fn encode(&self, features: &Matrix) -> Result<Matrix> {
        self.check_dim(features)?;
        match &self.params {
            Params::Softmax { .. } => Ok(features.clone()),
            Params::Mlp { .. } => {
                let fwd = self.forward(features, None);
                Ok(fwd.hidden.expect("mlp forward keeps hidden"))
            }
        }
    }

    /// Stochastic forward passes with independent dropout masks per pass.
    pub fn mc_dropout_proba(
        &self,
        features: &Matrix,
        passes: usize,
        seed: u64,
    ) -> Result<Vec<Matrix>> {
        self.check_dim(features)?;
        if self.config.kind != ModelKind::Mlp || self.config.dropout_rate <= 0.0 {
            return Err(Error::precondition(
                "mc dropout needs an mlp model with dropout_rate > 0",
            ));
        }
        if passes < 2 {
            return Err(Error::precondition("mc dropout needs passes >= 2"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..passes)
            .map(|_| self.forward(features, Some(&mut rng)).probs)
            .collect())
    }

    /// Mean cross-entropy of the batch under the deterministic forward pass.
    pub fn batch_loss(&self, features: &Matrix, labels: &[u32]) -> Result<f64> {
        self.check_dim(features)?;
        check_labels(labels, self.classes)?;
        if labels.is_empty() {
            return Err(Error::precondition("empty batch"));
        }
        let probs = self.forward(features, None).probs;
        Ok(mean_cross_entropy(&probs, labels))
    }

    /// Exact analytic gradient of mean cross-entropy w.r.t. all parameters
    /// (dropout disabled).
    pub fn loss_gradient(&self, features: &Matrix, labels: &[u32]) -> Result<Params> {
        self.check_dim(features)?;
        check_labels(labels, self.classes)?;
        if labels.is_empty() {
            return Err(Error::precondition("empty batch"));
        }
        let fwd = self.forward(features, None);
        Ok(backward(&self.params, features, labels, &fwd))
    }

    /// Binary checkpoint: magic, version, kind, dims, dropout, then packed
    /// f32 parameters in declaration order.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(CHECKPOINT_MAGIC);
        bytes.push(1u8); // version
        bytes.push(match self.config.kind {
            ModelKind::Softmax => 0u8,
            ModelKind::Mlp => 1u8,
        });
        bytes.extend_from_slice(&(self.input_dim as u32).to_le_bytes());
        bytes.extend_from_slice(&(self.config.hidden_dim as u32).to_le_bytes());
        bytes.extend_from_slice(&(self.classes as u32).to_le_bytes());
        bytes.extend_from_slice(&(self.config.dropout_rate as f32).to_le_bytes());
        for v in self.params.to_flat() {
            bytes.extend_from_slice(&(v as f32).to_le_bytes());
        }
        fs::write(path, bytes)?;
        Ok(())
    }

    /// Load a checkpoint. Optimizer settings are not stored; the returned
    /// config carries the kind defaults.
    pub fn load(path: &Path) -> Result<TrainedModel> {
        let p = path.display().to_string();
        let bytes = fs::read(path)?;
        if bytes.len() < 22 || &bytes[..4] != CHECKPOINT_MAGIC {
            return Err(Error::data(&p, "not a model checkpoint"));
        }
        if bytes[4] != 1 {
            return Err(Error::data(&p, format!("unsupported version {}", bytes[4])));
        }
        let kind = match bytes[5] {
            0 => ModelKind::Softmax,
            1 => ModelKind::Mlp,
            k => return Err(Error::data(&p, format!("unknown model kind {k}"))),
        };
        let input_dim = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
        let hidden = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
        let classes = u32::from_le_bytes(bytes[14..18].try_into().unwrap()) as usize;
        let dropout = f32::from_le_bytes(bytes[18..22].try_into().unwrap()) as f64;
        let expected = match kind {
            ModelKind::Softmax => classes * input_dim + classes,
            ModelKind::Mlp => hidden * input_dim + hidden + classes * hidden + classes,
        };
        let body = &bytes[22..];
        if body.len() != expected * 4 {
            return Err(Error::data(
                &p,
                format!("expected {expected} parameters, found {}", body.len() / 4),
            ));
        }
        let flat: Vec<f64> = body
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect();
        let mut config = match kind {
            ModelKind::Softmax => ModelConfig::softmax(),
            ModelKind::Mlp => ModelConfig::mlp(hidden, dropout),
        };
        config.weight_init_seed = 0;
        let template = init_params(&config, input_dim, classes, 0);
        Ok(TrainedModel {
            params: template.from_flat(&flat),
            config,
            classes,
            input_dim,
        })
    }
}

fn check_labels(labels: &[u32], classes: usize) -> Result<()> {
    for &y in labels {
        if (y as usize) >= classes {
            return Err(Error::precondition(format!(
                "label {y} out of range for {classes} classes"
            )));
        }
    }
    Ok(())
}

fn mean_cross_entropy(probs: &Matrix, labels: &[u32]) -> f64 {
    let n = labels.len() as f64;
    probs
        .iter_rows()
        .zip(labels)
        .map(|(row, &y)| -row[y as usize].max(f64::MIN_POSITIVE).ln())
        .sum::<f64>()
        / n
}

/// Backprop of mean cross-entropy through the cached forward pass. When the
/// forward used dropout masks, the gradient respects the same masks.
fn backward(params: &Params, features: &Matrix, labels: &[u32], fwd: &Forward) -> Params {
    let n = labels.len();
    let scale = 1.0 / n as f64;
    match params {
        Params::Softmax { weights, bias } => {
            let y = bias.len();
            let mut gw = Matrix::zeros(weights.rows(), weights.cols());
            let mut gb = vec![0.0; y];
            for (i, x) in features.iter_rows().enumerate() {
                let p = fwd.probs.row(i);
                for c in 0..y {
                    let delta = (p[c] - f64::from(labels[i] == c as u32)) * scale;
                    gb[c] += delta;
                    let grow = gw.row_mut(c);
                    for (g, &xv) in grow.iter_mut().zip(x) {
                        *g += delta * xv;
                    }
                }
            }
            Params::Softmax {
                weights: gw,
                bias: gb,
            }
        }
        Params::Mlp { w1, b1, w2, b2 } => {
            let h = b1.len();
            let y = b2.len();
            let hidden = fwd.hidden.as_ref().expect("mlp forward keeps hidden");
            let mut gw1 = Matrix::zeros(w1.rows(), w1.cols());
            let mut gb1 = vec![0.0; h];
            let mut gw2 = Matrix::zeros(w2.rows(), w2.cols());
            let mut gb2 = vec![0.0; y];
            for (i, x) in features.iter_rows().enumerate() {
                let p = fwd.probs.row(i);
                let hid = hidden.row(i);
                let dropped: Vec<f64> = match &fwd.scales {
                    Some(s) => hid.iter().zip(s.row(i)).map(|(a, b)| a * b).collect(),
                    None => hid.to_vec(),
                };
                let mut dh = vec![0.0; h];
                for c in 0..y {
                    let delta = (p[c] - f64::from(labels[i] == c as u32)) * scale;
                    gb2[c] += delta;
                    let grow = gw2.row_mut(c);
                    for j in 0..h {
                        grow[j] += delta * dropped[j];
                        dh[j] += delta * w2.get(c, j);
                    }
                }
                for j in 0..h {
                    let mask = match &fwd.scales {
                        Some(s) => s.get(i, j),
                        None => 1.0,
                    };
                    // ReLU derivative via the post-activation sign.
                    let dpre = dh[j] * mask * f64::from(hid[j] > 0.0);
                    if dpre != 0.0 {
                        gb1[j] += dpre;
                        let grow = gw1.row_mut(j);
                        for (g, &xv) in grow.iter_mut().zip(x) {
                            *g += dpre * xv;
                        }
                    }
                }
            }
            Params::Mlp {
                w1: gw1,
                b1: gb1,
                w2: gw2,
                b2: gb2,
            }
        }
    }
}

fn init_params(config: &ModelConfig, input_dim: usize, classes: usize, seed: u64) -> Params {
    match config.kind {
        // Zero init: the softmax objective is convex, no symmetry to break.
        ModelKind::Softmax => Params::Softmax {
            weights: Matrix::zeros(classes, input_dim),
            bias: vec![0.0; classes],
        },
        ModelKind::Mlp => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h = config.hidden_dim;
            let mut draw = |n: usize| -> Vec<f64> {
                (0..n).map(|_| rng.random_range(-0.1..0.1)).collect()
            };
            Params::Mlp {
                w1: Matrix::from_vec(h, input_dim, draw(h * input_dim)),
                b1: draw(h),
                w2: Matrix::from_vec(classes, h, draw(classes * h)),
                b2: draw(classes),
            }
        }
    }
}

/// Mini-batch gradient descent on mean cross-entropy. Evaluates on the
/// validation set `evals_per_epoch` times per epoch and returns the snapshot
/// with the best validation accuracy (ties keep the earliest). Deterministic
/// for fixed seeds. `warm_start` continues from existing parameters.
pub fn train(
    config: &ModelConfig,
    train_set: &LabeledSet,
    val_set: &LabeledSet,
    num_classes: usize,
    epochs: usize,
    rng_seed: u64,
    warm_start: Option<&TrainedModel>,
) -> Result<(TrainedModel, TrainStats)> {
    config.validate()?;
    if train_set.is_empty() {
        return Err(Error::precondition("empty training set"));
    }
    if num_classes < 2 {
        return Err(Error::invalid("num_classes must be >= 2"));
    }
    check_labels(&train_set.labels, num_classes)
        .and_then(|()| check_labels(&val_set.labels, num_classes))?;
    let input_dim = train_set.features.cols();

    let mut model = match warm_start {
        Some(m) => {
            if m.input_dim != input_dim || m.classes != num_classes {
                return Err(Error::precondition(
                    "warm-start model shape does not match the data",
                ));
            }
            if m.config.kind != config.kind {
                return Err(Error::precondition(
                    "warm-start model kind does not match the config",
                ));
            }
            // Parameters come from the snapshot; the call's config governs training.
            let mut m = m.clone();
            m.config = config.clone();
            m
        }
        None => TrainedModel {
            params: init_params(config, input_dim, num_classes, config.weight_init_seed),
            config: config.clone(),
            classes: num_classes,
            input_dim,
        },
    };

    let n = train_set.len();
    let batch = config.batch_size.min(n);
    let batches_per_epoch = n.div_ceil(batch);
    // Batch counts (1-based) after which validation runs.
    let eval_points: Vec<usize> = {
        let mut pts: Vec<usize> = (1..=config.evals_per_epoch)
            .map(|e| (e * batches_per_epoch).div_ceil(config.evals_per_epoch))
            .collect();
        pts.dedup();
        pts
    };

    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut first_step_loss = None;
    let mut loss_curve = Vec::new();
    let mut best: Option<(f64, Params)> = None;

    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for (bi, chunk) in order.chunks(batch).enumerate() {
            let bx = train_set.features.select_rows(chunk);
            let by: Vec<u32> = chunk.iter().map(|&i| train_set.labels[i]).collect();
            let dropout_active =
                model.config.kind == ModelKind::Mlp && model.config.dropout_rate > 0.0;
            let fwd = if dropout_active {
                model.forward(&bx, Some(&mut rng))
            } else {
                model.forward(&bx, None)
            };
            let loss = mean_cross_entropy(&fwd.probs, &by);
            if first_step_loss.is_none() {
                first_step_loss = Some(loss);
            }
            let grads = backward(&model.params, &bx, &by, &fwd);
            model.params.scaled_add(-config.learning_rate, &grads);

            if !val_set.is_empty() && eval_points.contains(&(bi + 1)) {
                let val_probs = model.forward(&val_set.features, None).probs;
                let val_acc = accuracy_of(&val_probs, &val_set.labels);
                loss_curve.push(mean_cross_entropy(&val_probs, &val_set.labels));
                if best.as_ref().is_none_or(|(acc, _)| val_acc > *acc) {
                    best = Some((val_acc, model.params.clone()));
                }
            }
        }
    }

    let best_validation_accuracy = best.as_ref().map_or(0.0, |(acc, _)| *acc);
    if let Some((_, params)) = best {
        model.params = params;
    }
    debug_assert!(model.params.all_finite(), "training produced non-finite parameters");
    Ok((
        model,
        TrainStats {
            first_step_loss: first_step_loss.unwrap_or(0.0),
            best_validation_accuracy,
            loss_curve,
        },
    ))
}

fn accuracy_of(probs: &Matrix, labels: &[u32]) -> f64 {
    let hits = probs
        .iter_rows()
        .zip(labels)
        .filter(|(row, &y)| argmax_tie_lowest(row) as u32 == y)
        .count();
    hits as f64 / labels.len() as f64
}
