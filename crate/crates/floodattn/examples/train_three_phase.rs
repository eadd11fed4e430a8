//! End-to-end three-phase training.
//!
//! Trains a small encoder on the synthetic majority task, watching the
//! run move through its phases: dense epochs accumulate per-layer
//! attention snapshots; once successive snapshot norms stabilize, the
//! transition test fires, per-layer sparsity patterns are extracted and
//! frozen, and the remaining epochs run on sparse kernels.
//!
//! ```bash
//! cargo run --release -p floodattn --example train_three_phase
//! ```

use floodattn::data::synthetic_majority;
use floodattn::model::{Model, ModelConfig};
use floodattn::pattern::PatternConfig;
use floodattn::rng::Rng;
use floodattn::trainer::{metrics_to_csv, Trainer, TrainerConfig};

fn main() -> floodattn::Result<()> {
    let model_config = ModelConfig {
        seq_len: 32,
        embed_dim: 16,
        heads: 4,
        layers: 2,
        ffn_dim: 32,
        vocab: 5,
        classes: 4,
        dropout: 0.1,
    };
    let trainer_config = TrainerConfig {
        epochs: 8,
        learning_rate: 2e-3,
        batch_size: 8,
        transition_tolerance: 0.05,
        min_dense_epochs: 3,
        pattern: PatternConfig {
            filter_size: 5,
            block_size: 8,
            quantile_alpha: 80.0,
        },
        seed: 11,
    };

    let mut data_rng = Rng::new(7);
    let dataset = synthetic_majority(96, model_config.seq_len, model_config.classes, &mut data_rng)?;
    let mut init_rng = Rng::new(1);
    let model = Model::new(model_config, &mut init_rng)?;
    println!(
        "model: {} parameters across {} layers\n",
        model.num_parameters(),
        model.config.layers
    );

    let mut trainer = Trainer::new(model, trainer_config)?;
    for _ in 0..8 {
        let m = trainer.train_epoch(&dataset)?;
        print!(
            "epoch {} [{:>6}] loss {:.4} accuracy {:.3}",
            m.epoch, m.phase, m.loss, m.accuracy
        );
        if let Some(d) = &m.layer_distances {
            let txt: Vec<String> = d.iter().map(|v| format!("{v:.2e}")).collect();
            print!("  snapshot distances [{}]", txt.join(", "));
        }
        if let Some(d) = &m.layer_densities {
            let txt: Vec<String> = d.iter().map(|v| format!("{v:.3}")).collect();
            print!("  pattern densities [{}]", txt.join(", "));
        }
        println!();
    }

    match trainer.transition_epoch() {
        Some(e) => {
            println!("\ntransition fired at epoch {e}; patterns are frozen from then on");
            for (k, p) in trainer.patterns().unwrap().iter().enumerate() {
                println!(
                    "  layer {k}: {} of {} score positions kept ({:.1}%)",
                    p.nnz(),
                    p.rows() * p.cols(),
                    100.0 * p.density()
                );
            }
        }
        None => println!("\nattention never stabilized below the tolerance; stayed dense"),
    }

    println!("\nmetrics.csv content:\n{}", metrics_to_csv(trainer.metrics(), 2));
    Ok(())
}
