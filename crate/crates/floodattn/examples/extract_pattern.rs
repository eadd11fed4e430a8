//! Pattern extraction, stage by stage.
//!
//! Builds a synthetic attention map with two kinds of structure — a band
//! along the diagonal and one globally attended column — then walks the
//! extraction pipeline: diagonal convolution, block average-pooling,
//! quantile thresholding, edge-seeded flood fill, and the forced diagonal.
//! Each stage is printed as ASCII art.
//!
//! ```bash
//! cargo run -p floodattn --example extract_pattern
//! ```

use floodattn::pattern::{generate_pattern_stages, PatternConfig};
use floodattn::tensor::DenseMatrix;

const L: usize = 32;
const B: usize = 4;

fn ascii_heat(m: &DenseMatrix) -> String {
    let ramp = [' ', '.', ':', '+', '#'];
    let (mut lo, mut hi) = (f32::INFINITY, f32::NEG_INFINITY);
    for &v in m.data() {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let range = (hi - lo).max(f32::MIN_POSITIVE);
    let mut out = String::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let t = ((m.at(i, j) - lo) / range * (ramp.len() as f32 - 1.0)).round() as usize;
            out.push(ramp[t.min(ramp.len() - 1)]);
        }
        out.push('\n');
    }
    out
}

fn main() -> floodattn::Result<()> {
    // Row-stochastic-ish map: weight on a |i-j| <= 2 band plus column 20.
    let mut a = DenseMatrix::zeros(L, L);
    for i in 0..L {
        for j in 0..L {
            let mut v = 0.002;
            if (i as i64 - j as i64).abs() <= 2 {
                v += 0.15;
            }
            if j == 20 {
                v += 0.12;
            }
            a.set(i, j, v);
        }
    }

    let cfg = PatternConfig {
        filter_size: 5,
        block_size: B,
        quantile_alpha: 80.0,
    };
    let stages = generate_pattern_stages(&a, &cfg)?;

    println!("input attention map ({L}x{L}):\n{}", ascii_heat(&a));
    println!(
        "after diagonal convolution (filter {}):\n{}",
        cfg.filter_size,
        ascii_heat(&stages.conv)
    );
    println!(
        "after {B}x{B} average pooling ({0}x{0}):\n{1}",
        L / B,
        ascii_heat(&stages.pool)
    );
    println!(
        "quantile threshold at alpha={}: {:.4}",
        cfg.quantile_alpha, stages.threshold
    );
    println!(
        "\nflood fill marks (seeded from row 0 and column 0):\n{}",
        ascii_heat(&stages.flood_marks.to_dense())
    );
    println!(
        "with the forced block diagonal:\n{}",
        ascii_heat(&stages.mask.to_dense())
    );
    println!(
        "final pattern: {} of {} positions kept, density {:.3}",
        stages.pattern.nnz(),
        L * L,
        stages.pattern.density()
    );
    Ok(())
}
