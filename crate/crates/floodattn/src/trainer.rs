//! Three-phase training: dense epochs with attention-snapshot tracking, a
//! Frobenius-norm stability test that triggers the transition, then
//! pattern-frozen sparse epochs.

use std::fmt;
use std::fmt::Write as _;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::model::{cross_entropy, AttentionMode, Gradients, Model};
use crate::pattern::{generate_pattern, PatternConfig};
use crate::rng::Rng;
use crate::sparse::CsrMatrix;
use crate::tensor::DenseMatrix;

/// Frobenius norm in double precision.
pub fn frobenius_norm(a: &DenseMatrix) -> f64 {
    a.data()
        .iter()
        .map(|&v| (v as f64) * (v as f64))
        .sum::<f64>()
        .sqrt()
}

/// Absolute difference of the two matrices' Frobenius norms.
pub fn frobenius_distance(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    (frobenius_norm(a) - frobenius_norm(b)).abs()
}

/// Decide whether attention has stabilized. `histories[l]` is layer l's
/// sequence of epoch-to-epoch snapshot distances; the test fires when the
/// mean over layers of |latest - previous| drops strictly below
/// `tolerance`. Needs at least two distances per layer, which makes the
/// third epoch (index 2) the earliest possible firing point.
pub fn transition_check(histories: &[Vec<f64>], tolerance: f64) -> Result<bool> {
    if histories.is_empty() {
        return Err(Error::State("no layers to check".into()));
    }
    let mut sum = 0.0f64;
    for (li, h) in histories.iter().enumerate() {
        if h.len() < 2 {
            return Err(Error::State(format!(
                "layer {li} has {} snapshot distances; the stability test needs two",
                h.len()
            )));
        }
        sum += (h[h.len() - 1] - h[h.len() - 2]).abs();
    }
    let mean = sum / histories.len() as f64;
    Ok(mean < tolerance)
}

/// Adam optimizer over the model's parameter slots.
pub struct Adam {
    lr: f32,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: u64,
    m: Vec<DenseMatrix>,
    v: Vec<DenseMatrix>,
}

impl Adam {
    pub fn new(model: &Model, lr: f32) -> Result<Adam> {
        if !lr.is_finite() || lr <= 0.0 {
            return Err(Error::Parameter(format!("learning rate {lr} must be positive")));
        }
        let zeros: Vec<DenseMatrix> = model
            .parameters()
            .iter()
            .map(|p| DenseMatrix::zeros(p.rows(), p.cols()))
            .collect();
        Ok(Adam {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: zeros.clone(),
            v: zeros,
        })
    }

    /// One update step from a full gradient set.
    pub fn step(&mut self, model: &mut Model, grads: &Gradients) -> Result<()> {
        let params = model.parameters_mut();
        if params.len() != grads.slots().len() || params.len() != self.m.len() {
            return Err(Error::Shape(format!(
                "{} parameter slots, {} gradient slots, {} moment slots",
                params.len(),
                grads.slots().len(),
                self.m.len()
            )));
        }
        self.t += 1;
        let (lr, beta1, beta2, eps) = (self.lr as f64, self.beta1, self.beta2, self.eps);
        let bc1 = 1.0 - beta1.powf(self.t as f64);
        let bc2 = 1.0 - beta2.powf(self.t as f64);
        for (((p, g), m), v) in params
            .into_iter()
            .zip(grads.slots())
            .zip(&mut self.m)
            .zip(&mut self.v)
        {
            if p.rows() != g.rows() || p.cols() != g.cols() {
                return Err(Error::Shape(format!(
                    "parameter {}x{} vs gradient {}x{}",
                    p.rows(),
                    p.cols(),
                    g.rows(),
                    g.cols()
                )));
            }
            for (((pv, &gv), mv), vv) in p
                .data_mut()
                .iter_mut()
                .zip(g.data())
                .zip(m.data_mut().iter_mut())
                .zip(v.data_mut().iter_mut())
            {
                let gi = gv as f64;
                let mi = beta1 * *mv as f64 + (1.0 - beta1) * gi;
                let vi = beta2 * *vv as f64 + (1.0 - beta2) * gi * gi;
                *mv = mi as f32;
                *vv = vi as f32;
                let step = lr * (mi / bc1) / ((vi / bc2).sqrt() + eps);
                *pv = (*pv as f64 - step) as f32;
            }
        }
        Ok(())
    }
}

/// Which attention implementation an epoch ran with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Dense,
    Sparse,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Dense => "dense",
            Phase::Sparse => "sparse",
        })
    }
}

/// Knobs of the training loop.
#[derive(Debug, Clone)]
pub struct TrainerConfig {
    pub epochs: usize,
    pub learning_rate: f32,
    pub batch_size: usize,
    /// Stability threshold of the transition test. 0 never fires (strict
    /// comparison), +inf fires at the earliest eligible epoch.
    pub transition_tolerance: f64,
    /// Dense epochs to run before the transition test may fire. The test
    /// structurally needs three (two distances), so values below 3 only
    /// relax a constraint that never binds.
    pub min_dense_epochs: usize,
    pub pattern: PatternConfig,
    pub seed: u64,
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Parameter("batch size must be positive".into()));
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::Parameter(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        if self.transition_tolerance.is_nan() || self.transition_tolerance < 0.0 {
            return Err(Error::Parameter(format!(
                "transition tolerance {} must be non-negative",
                self.transition_tolerance
            )));
        }
        if self.min_dense_epochs == 0 {
            return Err(Error::Parameter("need at least one dense epoch".into()));
        }
        Ok(())
    }
}

/// What one epoch produced.
#[derive(Debug, Clone)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub phase: Phase,
    /// Mean training cross-entropy over the epoch's samples.
    pub loss: f64,
    /// Fraction of training samples classified correctly during the epoch.
    pub accuracy: f64,
    /// Per-layer snapshot distance to the previous dense epoch; defined
    /// from the second dense epoch on.
    pub layer_distances: Option<Vec<f64>>,
    /// Per-layer pattern density; defined in sparse epochs.
    pub layer_densities: Option<Vec<f64>>,
    /// Combined hash of all layer patterns; defined in sparse epochs and
    /// constant across them because patterns freeze at the transition.
    pub pattern_digest: Option<u64>,
}

/// Drives the three phases over a model and a dataset.
pub struct Trainer {
    model: Model,
    optimizer: Adam,
    rng: Rng,
    config: TrainerConfig,
    phase: Phase,
    epochs_run: usize,
    prev_norms: Option<Vec<f64>>,
    distance_history: Vec<Vec<f64>>,
    patterns: Option<Vec<CsrMatrix>>,
    transition_epoch: Option<usize>,
    transition_snapshots: Option<Vec<DenseMatrix>>,
    metrics: Vec<EpochMetrics>,
}

impl Trainer {
    pub fn new(model: Model, config: TrainerConfig) -> Result<Trainer> {
        config.validate()?;
        config.pattern.validate(model.config.seq_len)?;
        let optimizer = Adam::new(&model, config.learning_rate)?;
        let rng = Rng::new(config.seed);
        let layers = model.config.layers;
        Ok(Trainer {
            model,
            optimizer,
            rng,
            config,
            phase: Phase::Dense,
            epochs_run: 0,
            prev_norms: None,
            distance_history: vec![Vec::new(); layers],
            patterns: None,
            transition_epoch: None,
            transition_snapshots: None,
            metrics: Vec::new(),
        })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn rng_state(&self) -> (u64, u128) {
        self.rng.state()
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn patterns(&self) -> Option<&[CsrMatrix]> {
        self.patterns.as_deref()
    }

    /// Epoch whose snapshots produced the patterns, if the test fired.
    pub fn transition_epoch(&self) -> Option<usize> {
        self.transition_epoch
    }

    /// Per-layer running-mean attention snapshots from the transition
    /// epoch — the matrices the patterns were extracted from.
    pub fn transition_snapshots(&self) -> Option<&[DenseMatrix]> {
        self.transition_snapshots.as_deref()
    }

    pub fn metrics(&self) -> &[EpochMetrics] {
        &self.metrics
    }

    fn check_dataset(&self, data: &Dataset) -> Result<()> {
        data.validate()?;
        if data.vocab > self.model.config.vocab {
            return Err(Error::Parameter(format!(
                "dataset vocabulary {} exceeds the model's {}",
                data.vocab, self.model.config.vocab
            )));
        }
        if data.classes > self.model.config.classes {
            return Err(Error::Parameter(format!(
                "dataset has {} classes, the model only {}",
                data.classes, self.model.config.classes
            )));
        }
        Ok(())
    }

    /// One pass over the dataset: shuffled batches, per-batch Adam steps,
    /// snapshot bookkeeping, and — in eligible dense epochs — the
    /// transition test.
    pub fn train_epoch(&mut self, data: &Dataset) -> Result<EpochMetrics> {
        self.check_dataset(data)?;
        let epoch = self.epochs_run;
        let layers = self.model.config.layers;
        let l = self.model.config.seq_len;
        let dense_phase = self.phase == Phase::Dense;

        let mut order: Vec<usize> = (0..data.samples.len()).collect();
        self.rng.shuffle(&mut order);

        let mut loss_sum = 0.0f64;
        let mut correct = 0usize;
        let mut snap_acc: Vec<Vec<f64>> = if dense_phase {
            vec![vec![0.0; l * l]; layers]
        } else {
            Vec::new()
        };

        for batch in order.chunks(self.config.batch_size) {
            let mut grads = Gradients::zeros_like(&self.model);
            for &si in batch {
                let sample = &data.samples[si];
                let mode = match &self.patterns {
                    Some(p) => AttentionMode::Sparse(p),
                    None => AttentionMode::Dense,
                };
                let (logits, cache) =
                    self.model
                        .forward_cached(&sample.tokens, mode, &mut self.rng, true)?;
                let (loss, d_logits) = cross_entropy(&logits, sample.label)?;
                loss_sum += loss;
                if argmax(&logits) == sample.label {
                    correct += 1;
                }
                if dense_phase {
                    for (li, acc) in snap_acc.iter_mut().enumerate() {
                        let snap = cache
                            .mean_head_attention(li)
                            .expect("dense forwards cache dense attention");
                        for (a, &v) in acc.iter_mut().zip(snap.data()) {
                            *a += v as f64;
                        }
                    }
                }
                let g = self.model.backward(&cache, &d_logits)?;
                grads.accumulate(&g)?;
            }
            grads.scale(1.0 / batch.len() as f32);
            self.optimizer.step(&mut self.model, &grads)?;
        }

        let n = data.samples.len() as f64;
        let mut layer_distances = None;
        let mut layer_densities = None;
        let mut pattern_digest = None;

        if dense_phase {
            let snapshots: Vec<DenseMatrix> = snap_acc
                .into_iter()
                .map(|acc| {
                    let data: Vec<f32> = acc.into_iter().map(|v| (v / n) as f32).collect();
                    DenseMatrix::from_vec(l, l, data).expect("shape by construction")
                })
                .collect();
            let norms: Vec<f64> = snapshots.iter().map(frobenius_norm).collect();
            if let Some(prev) = &self.prev_norms {
                let latest: Vec<f64> = norms
                    .iter()
                    .zip(prev)
                    .map(|(a, b)| (a - b).abs())
                    .collect();
                for (h, &d) in self.distance_history.iter_mut().zip(&latest) {
                    h.push(d);
                }
                layer_distances = Some(latest);
            }
            let eligible = epoch >= 2
                && epoch + 1 >= self.config.min_dense_epochs
                && self.distance_history.iter().all(|h| h.len() >= 2);
            if eligible
                && transition_check(&self.distance_history, self.config.transition_tolerance)?
            {
                let mut pats = Vec::with_capacity(layers);
                for s in &snapshots {
                    pats.push(generate_pattern(s, &self.config.pattern)?);
                }
                self.patterns = Some(pats);
                self.transition_epoch = Some(epoch);
                self.transition_snapshots = Some(snapshots);
                self.phase = Phase::Sparse;
            }
            self.prev_norms = Some(norms);
        } else {
            let pats = self.patterns.as_ref().expect("sparse phase has patterns");
            layer_densities = Some(pats.iter().map(|p| p.density()).collect());
            pattern_digest = Some(combined_digest(pats));
        }

        let m = EpochMetrics {
            epoch,
            phase: if dense_phase { Phase::Dense } else { Phase::Sparse },
            loss: loss_sum / n,
            accuracy: correct as f64 / n,
            layer_distances,
            layer_densities,
            pattern_digest,
        };
        self.metrics.push(m.clone());
        self.epochs_run += 1;
        Ok(m)
    }

    /// Run until `config.epochs` epochs have completed.
    pub fn run(&mut self, data: &Dataset) -> Result<()> {
        while self.epochs_run < self.config.epochs {
            self.train_epoch(data)?;
        }
        Ok(())
    }
}

fn argmax(xs: &[f32]) -> usize {
    let mut best = 0;
    for (i, &v) in xs.iter().enumerate() {
        if v > xs[best] {
            best = i;
        }
    }
    best
}

fn combined_digest(patterns: &[CsrMatrix]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for p in patterns {
        for b in p.digest64().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

/// Render metrics as CSV: `epoch,phase,loss,accuracy`, one distance
/// column and one density column per layer; cells whose value is
/// undefined in that epoch stay empty.
pub fn metrics_to_csv(metrics: &[EpochMetrics], layers: usize) -> String {
    let mut out = String::from("epoch,phase,loss,accuracy");
    for li in 0..layers {
        let _ = write!(out, ",dist_l{li}");
    }
    for li in 0..layers {
        let _ = write!(out, ",density_l{li}");
    }
    out.push('\n');
    for m in metrics {
        let _ = write!(out, "{},{},{:.6},{:.6}", m.epoch, m.phase, m.loss, m.accuracy);
        for li in 0..layers {
            match m.layer_distances.as_ref().and_then(|d| d.get(li)) {
                Some(d) => {
                    let _ = write!(out, ",{d:.6}");
                }
                None => out.push(','),
            }
        }
        for li in 0..layers {
            match m.layer_densities.as_ref().and_then(|d| d.get(li)) {
                Some(d) => {
                    let _ = write!(out, ",{d:.6}");
                }
                None => out.push(','),
            }
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthetic_majority;
    use crate::model::ModelConfig;

    fn tiny_model_config() -> ModelConfig {
        ModelConfig {
            seq_len: 16,
            embed_dim: 8,
            heads: 2,
            layers: 2,
            ffn_dim: 16,
            vocab: 4,
            classes: 3,
            dropout: 0.1,
        }
    }

    fn tiny_trainer_config(epochs: usize, tolerance: f64) -> TrainerConfig {
        TrainerConfig {
            epochs,
            learning_rate: 1e-3,
            batch_size: 8,
            transition_tolerance: tolerance,
            min_dense_epochs: 3,
            pattern: PatternConfig {
                filter_size: 3,
                block_size: 4,
                quantile_alpha: 75.0,
            },
            seed: 42,
        }
    }

    #[test]
    fn frobenius_distance_fixtures() {
        let ones = DenseMatrix::from_vec(3, 3, vec![1.0; 9]).unwrap();
        let zeros = DenseMatrix::zeros(3, 3);
        assert_eq!(frobenius_distance(&ones, &zeros), 3.0);
        assert_eq!(frobenius_distance(&ones, &ones), 0.0);
        assert_eq!(frobenius_norm(&zeros), 0.0);
    }

    #[test]
    fn transition_check_fixtures() {
        assert!(transition_check(&[vec![5.0, 4.99]], 0.1).unwrap());
        assert!(!transition_check(&[vec![5.0, 1.0]], 0.1).unwrap());
        assert!(transition_check(&[vec![5.0, 1.0]], f64::INFINITY).unwrap());
        // Strict comparison: tolerance zero can never fire.
        assert!(!transition_check(&[vec![5.0, 5.0]], 0.0).unwrap());
        // Mean over layers: (0.5 + 0.1) / 2 = 0.3.
        let hist = [vec![1.0, 1.5], vec![1.0, 1.1]];
        assert!(transition_check(&hist, 0.35).unwrap());
        assert!(!transition_check(&hist, 0.3).unwrap());
        // Only the latest two entries count.
        assert!(transition_check(&[vec![9.0, 2.0, 2.05]], 0.1).unwrap());
        assert!(matches!(
            transition_check(&[vec![1.0]], 0.1),
            Err(Error::State(_))
        ));
        assert!(matches!(transition_check(&[], 0.1), Err(Error::State(_))));
    }

    #[test]
    fn adam_matches_hand_computed_steps() {
        let mut rng = Rng::new(1);
        let mut model = Model::new(tiny_model_config(), &mut rng).unwrap();
        for p in model.parameters_mut() {
            for v in p.data_mut() {
                *v = 0.0;
            }
        }
        let mut grads = Gradients::zeros_like(&model);
        grads.slots_mut()[0].set(0, 0, 1.0);
        let mut adam = Adam::new(&model, 0.1).unwrap();

        // Step 1: bias-corrected moments are exactly the gradient, so the
        // update is lr * 1 / (1 + eps).
        adam.step(&mut model, &grads).unwrap();
        let w = model.parameters()[0].at(0, 0);
        assert!((w + 0.1).abs() < 1e-6, "after one step: {w}");
        // Every other weight saw a zero gradient and must not move.
        assert_eq!(model.parameters()[0].at(0, 1), 0.0);
        assert_eq!(model.parameters()[1].at(0, 0), 0.0);

        // Step 2 with the same gradient again gives the same unit update.
        adam.step(&mut model, &grads).unwrap();
        let w = model.parameters()[0].at(0, 0);
        assert!((w + 0.2).abs() < 1e-5, "after two steps: {w}");
    }

    #[test]
    fn adam_rejects_bad_learning_rates() {
        let mut rng = Rng::new(1);
        let model = Model::new(tiny_model_config(), &mut rng).unwrap();
        assert!(Adam::new(&model, 0.0).is_err());
        assert!(Adam::new(&model, -1.0).is_err());
        assert!(Adam::new(&model, f32::NAN).is_err());
    }

    #[test]
    fn infinite_tolerance_transitions_at_third_epoch() {
        let mut rng = Rng::new(7);
        let data = synthetic_majority(60, 16, 3, &mut rng).unwrap();
        let mut model_rng = Rng::new(42);
        let model = Model::new(tiny_model_config(), &mut model_rng).unwrap();
        let mut trainer =
            Trainer::new(model, tiny_trainer_config(6, f64::INFINITY)).unwrap();
        trainer.run(&data).unwrap();

        let metrics = trainer.metrics();
        assert_eq!(metrics.len(), 6);
        for m in &metrics[..3] {
            assert_eq!(m.phase, Phase::Dense);
            assert!(m.layer_densities.is_none());
            assert!(m.pattern_digest.is_none());
        }
        for m in &metrics[3..] {
            assert_eq!(m.phase, Phase::Sparse);
            assert!(m.layer_distances.is_none());
        }
        assert_eq!(trainer.transition_epoch(), Some(2));

        // Distances exist from the second dense epoch on.
        assert!(metrics[0].layer_distances.is_none());
        assert!(metrics[1].layer_distances.is_some());
        assert!(metrics[2].layer_distances.is_some());

        // Patterns: one per layer, frozen (equal digests), diagonal forced.
        let pats = trainer.patterns().unwrap();
        assert_eq!(pats.len(), 2);
        for p in pats {
            assert_eq!((p.rows(), p.cols()), (16, 16));
            let d = p.to_dense();
            for i in 0..16 {
                assert_eq!(d.at(i, i), 1.0, "diagonal must be present");
            }
        }
        let digests: Vec<u64> = metrics[3..]
            .iter()
            .map(|m| m.pattern_digest.unwrap())
            .collect();
        assert!(digests.windows(2).all(|w| w[0] == w[1]));

        // The firing epoch's snapshots are retained; means of row-stochastic
        // matrices stay row-stochastic.
        let snaps = trainer.transition_snapshots().unwrap();
        assert_eq!(snaps.len(), 2);
        for s in snaps {
            assert_eq!((s.rows(), s.cols()), (16, 16));
            for i in 0..16 {
                let sum: f64 = s.row(i).iter().map(|&v| v as f64).sum();
                assert!((sum - 1.0).abs() < 1e-4, "row {i} sums to {sum}");
            }
        }
        let densities = metrics[3].layer_densities.as_ref().unwrap();
        assert_eq!(densities.len(), 2);
        for (&density, p) in densities.iter().zip(pats) {
            assert!((density - p.density()).abs() < 1e-12);
            assert!(density >= 4.0 / 16.0 - 1e-12, "diagonal implies >= b/l");
        }

        let csv = metrics_to_csv(metrics, 2);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(lines[0], "epoch,phase,loss,accuracy,dist_l0,dist_l1,density_l0,density_l1");
        assert!(lines[1].starts_with("0,dense,"));
        assert!(lines[4].starts_with("3,sparse,"));
        for line in &lines[1..] {
            assert_eq!(line.matches(',').count(), 7, "{line}");
        }
        // Epoch 0 has neither distances nor densities.
        assert!(lines[1].ends_with(",,,,"), "{:?}", lines[1]);
    }

    #[test]
    fn zero_tolerance_never_transitions() {
        let mut rng = Rng::new(7);
        let data = synthetic_majority(40, 16, 3, &mut rng).unwrap();
        let mut model_rng = Rng::new(42);
        let model = Model::new(tiny_model_config(), &mut model_rng).unwrap();
        let mut trainer = Trainer::new(model, tiny_trainer_config(5, 0.0)).unwrap();
        trainer.run(&data).unwrap();
        assert!(trainer.metrics().iter().all(|m| m.phase == Phase::Dense));
        assert!(trainer.patterns().is_none());
        assert_eq!(trainer.transition_epoch(), None);
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let run = || {
            let mut rng = Rng::new(7);
            let data = synthetic_majority(40, 16, 3, &mut rng).unwrap();
            let mut model_rng = Rng::new(42);
            let model = Model::new(tiny_model_config(), &mut model_rng).unwrap();
            let mut trainer =
                Trainer::new(model, tiny_trainer_config(5, f64::INFINITY)).unwrap();
            trainer.run(&data).unwrap();
            let csv = metrics_to_csv(trainer.metrics(), 2);
            let bytes = trainer.model().to_bytes(trainer.rng_state());
            (csv, bytes)
        };
        let (csv1, bytes1) = run();
        let (csv2, bytes2) = run();
        assert_eq!(csv1, csv2);
        assert_eq!(bytes1, bytes2);
    }

    #[test]
    fn loss_decreases_on_majority_task() {
        let mut rng = Rng::new(3);
        let data = synthetic_majority(80, 16, 3, &mut rng).unwrap();
        let mut model_rng = Rng::new(5);
        let model = Model::new(tiny_model_config(), &mut model_rng).unwrap();
        let mut cfg = tiny_trainer_config(8, f64::INFINITY);
        cfg.learning_rate = 3e-3;
        let mut trainer = Trainer::new(model, cfg).unwrap();
        trainer.run(&data).unwrap();
        let first = trainer.metrics().first().unwrap().loss;
        let last = trainer.metrics().last().unwrap().loss;
        assert!(
            last < first,
            "loss should fall across training: {first} -> {last}"
        );
    }

    #[test]
    fn trainer_rejects_incompatible_datasets() {
        let mut rng = Rng::new(2);
        let model = Model::new(tiny_model_config(), &mut rng).unwrap();
        let mut trainer = Trainer::new(model, tiny_trainer_config(1, 0.0)).unwrap();
        // 5 classes in the data, 3 in the model.
        let data = synthetic_majority(10, 16, 5, &mut rng).unwrap();
        assert!(matches!(
            trainer.train_epoch(&data),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn trainer_config_validation() {
        let ok = tiny_trainer_config(1, 0.05);
        assert!(ok.validate().is_ok());
        let mut bad = ok.clone();
        bad.batch_size = 0;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.learning_rate = -0.5;
        assert!(bad.validate().is_err());
        let mut bad = ok.clone();
        bad.transition_tolerance = -0.1;
        assert!(bad.validate().is_err());
        let mut bad = ok;
        bad.transition_tolerance = f64::NAN;
        assert!(bad.validate().is_err());
    }
}
