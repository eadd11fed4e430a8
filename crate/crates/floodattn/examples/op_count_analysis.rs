//! Attention cost arithmetic.
//!
//! Reproduces the operation-count analysis for a 4096-token sequence with
//! 64-wide heads: dense attention needs 4,328,255,488 operations; keeping
//! 10% of the score positions drops that to 432,585,778 — about a tenth.
//! Then sweeps pattern density to show how the reduction scales.
//!
//! ```bash
//! cargo run -p floodattn --example op_count_analysis
//! ```

use floodattn::analyzer::{dense_attention_ops, op_report, sparse_attention_ops};

fn main() -> floodattn::Result<()> {
    let (l, d) = (4096u64, 64u64);

    // The reference configuration: 10% density, floored.
    let c = l * l / 10;
    let report = op_report(l, d, c)?;
    println!("{report}\n");

    println!("density sweep at L={l}, D={d}:");
    println!("{:>8} {:>14} {:>14} {:>8}", "density", "dense ops", "sparse ops", "ratio");
    for pct in [1u64, 2, 5, 10, 25, 50, 100] {
        let c = l * l * pct / 100;
        let dense = dense_attention_ops(l, d)?;
        let sparse = sparse_attention_ops(l, d, c)?;
        let ratio = dense as f64 / sparse.ops as f64;
        println!("{:>7}% {dense:>14} {:>14} {ratio:>8.2}", pct, sparse.ops);
    }

    // At full density the sparse formula collapses to the dense one.
    let full = sparse_attention_ops(l, d, l * l)?;
    assert_eq!(full.ops, dense_attention_ops(l, d)?);
    println!("\nat density 100% both formulas agree: {} ops", full.ops);
    Ok(())
}
