//! Sparse kernels against the dense reference.
//!
//! First verifies that the sparse attention chain (sddmm, sparse softmax
//! with implicit-zero correction, spmm) reproduces dense attention exactly
//! when the pattern keeps every position. Then restricts the pattern to a
//! band and compares the multiply counts the two paths actually spent.
//!
//! ```bash
//! cargo run --release -p floodattn --example sparse_vs_dense_kernels
//! ```

use floodattn::opcount;
use floodattn::sparse::{mask_to_csr, sddmm, sparse_softmax_forward, spmm};
use floodattn::tensor::{dense_softmax_rows, gemm, init_truncated_normal, max_abs_diff, DenseMatrix};
use floodattn::rng::Rng;

const L: usize = 64;
const D: usize = 16;

fn band_mask(width: usize) -> DenseMatrix {
    let mut m = DenseMatrix::zeros(L, L);
    for i in 0..L {
        for j in i.saturating_sub(width)..(i + width + 1).min(L) {
            m.set(i, j, 1.0);
        }
    }
    m
}

fn dense_attention(q: &DenseMatrix, k: &DenseMatrix, v: &DenseMatrix, scale: f32) -> DenseMatrix {
    let scores = gemm(q, k, true).unwrap();
    let probs = dense_softmax_rows(&scores, scale);
    gemm(&probs, v, false).unwrap()
}

fn sparse_attention(
    q: &DenseMatrix,
    k: &DenseMatrix,
    v: &DenseMatrix,
    pattern: &floodattn::sparse::CsrMatrix,
    scale: f32,
) -> DenseMatrix {
    let scores = sddmm(q, k, pattern).unwrap();
    let probs = sparse_softmax_forward(&scores, scale).unwrap();
    spmm(&probs, v).unwrap()
}

fn main() -> floodattn::Result<()> {
    let mut rng = Rng::new(123);
    let q = init_truncated_normal(L, D, 1.0, &mut rng);
    let k = init_truncated_normal(L, D, 1.0, &mut rng);
    let v = init_truncated_normal(L, D, 1.0, &mut rng);
    let scale = 1.0 / (D as f32).sqrt();

    // Full pattern: the two paths must agree to float precision.
    let full = mask_to_csr(&band_mask(L))?;
    let dense_out = dense_attention(&q, &k, &v, scale);
    let sparse_out = sparse_attention(&q, &k, &v, &full, scale);
    let diff = max_abs_diff(&dense_out, &sparse_out)?;
    println!("full pattern ({} stored): max |dense - sparse| = {diff:.2e}", full.nnz());
    assert!(diff < 1e-5);

    // Banded pattern: same computation shape, far fewer multiplies.
    for width in [1usize, 2, 4, 8] {
        let pattern = mask_to_csr(&band_mask(width))?;

        opcount::reset();
        let _ = dense_attention(&q, &k, &v, scale);
        let dense_mults = opcount::multiplies();

        opcount::reset();
        let _ = sparse_attention(&q, &k, &v, &pattern, scale);
        let sparse_mults = opcount::multiplies();

        println!(
            "band width {width:>2}: density {:.3} | multiplies dense {dense_mults:>7} sparse {sparse_mults:>7} | ratio {:.2}",
            pattern.density(),
            dense_mults as f64 / sparse_mults as f64
        );
    }

    // Rows outside the band still produce a correct distribution: stored
    // probabilities plus the implicit-zero mass sum to one.
    let pattern = mask_to_csr(&band_mask(2))?;
    let scores = sddmm(&q, &k, &pattern)?;
    let probs = sparse_softmax_forward(&scores, scale)?;
    let row = 30;
    let stored: f64 = probs.values()[probs.row_range(row)]
        .iter()
        .map(|&p| p as f64)
        .sum();
    println!(
        "\nrow {row}: stored probability mass {stored:.6}; the rest is implicit-zero mass"
    );
    Ok(())
}
