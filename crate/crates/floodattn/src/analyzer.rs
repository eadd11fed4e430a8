//! Attention operation counts and sparsity analytics.
//!
//! The counting convention, which the instrumented-pipeline tests pin down:
//! a dot product of length n costs n multiplies plus n-1 additions, and a
//! softmax over a row of n entries costs n exponentials, n-1 sum additions,
//! and n divisions. Under it, dense attention over an L-row sequence with
//! per-head width D costs exactly 2L²(2D+1) - L(D+1) operations, and
//! attention restricted to C stored score positions (with no empty rows)
//! costs 2C(2D+1) - L(D+1).

use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

fn wide_mul(a: u128, b: u128) -> Result<u128> {
    a.checked_mul(b)
        .ok_or_else(|| Error::Parameter("operation count overflows 128 bits".into()))
}

/// Exact dense attention operation count: 2L²(2D+1) - L(D+1).
/// `d` is the per-head width.
pub fn dense_attention_ops(l: u64, d: u64) -> Result<u128> {
    if l == 0 || d == 0 {
        return Err(Error::Parameter(format!(
            "sequence length {l} and width {d} must be positive"
        )));
    }
    let (l, d) = (l as u128, d as u128);
    let quad = wide_mul(2 * l, wide_mul(l, 2 * d + 1)?)?;
    Ok(quad - l * (d + 1))
}

/// A count that may have been clamped at zero because the closed form went
/// negative (possible only for degenerate near-empty patterns).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClampedOps {
    pub ops: u128,
    pub clamped: bool,
}

/// Exact sparse attention operation count for C stored score positions:
/// 2C(2D+1) - L(D+1), clamped at zero when negative.
pub fn sparse_attention_ops(l: u64, d: u64, c: u64) -> Result<ClampedOps> {
    if l == 0 || d == 0 {
        return Err(Error::Parameter(format!(
            "sequence length {l} and width {d} must be positive"
        )));
    }
    let lsq = wide_mul(l as u128, l as u128)?;
    if c as u128 > lsq {
        return Err(Error::Parameter(format!(
            "{c} stored positions exceed the {lsq} cells of a {l}x{l} score matrix"
        )));
    }
    let (l, d, c) = (l as u128, d as u128, c as u128);
    let gain = wide_mul(2 * c, 2 * d + 1)?;
    let cost = l * (d + 1);
    if gain >= cost {
        Ok(ClampedOps { ops: gain - cost, clamped: false })
    } else {
        Ok(ClampedOps { ops: 0, clamped: true })
    }
}

/// Operations to produce `count` raw scores: count·(2D-1) — one
/// length-D dot product each.
pub fn raw_score_ops(count: u64, d: u64) -> Result<u128> {
    if d == 0 {
        return Err(Error::Parameter("width must be positive".into()));
    }
    wide_mul(count as u128, 2 * d as u128 - 1)
}

/// Occupancy summary of one pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityStats {
    pub rows: usize,
    pub nnz: usize,
    /// nnz / rows².
    pub density: f64,
    pub empty_rows: usize,
    /// Number of block cells with at least one stored entry, when a block
    /// size was supplied.
    pub blocks: Option<usize>,
}

/// Summarize a pattern's occupancy. `block_size`, when given, must divide
/// the side length and adds a count of occupied block cells.
pub fn density_stats(p: &CsrMatrix, block_size: Option<usize>) -> Result<DensityStats> {
    if p.rows() != p.cols() {
        return Err(Error::Shape(format!(
            "pattern must be square, got {}x{}",
            p.rows(),
            p.cols()
        )));
    }
    let l = p.rows();
    let empty_rows = (0..l).filter(|&i| p.row_range(i).is_empty()).count();
    let blocks = match block_size {
        None => None,
        Some(b) => {
            if b == 0 || !l.is_multiple_of(b) {
                return Err(Error::Parameter(format!(
                    "block size {b} must divide the side length {l}"
                )));
            }
            let side = l / b;
            let mut seen = vec![false; side * side];
            for i in 0..l {
                for &j in &p.col_idx()[p.row_range(i)] {
                    seen[(i / b) * side + j / b] = true;
                }
            }
            Some(seen.iter().filter(|&&s| s).count())
        }
    };
    Ok(DensityStats {
        rows: l,
        nnz: p.nnz(),
        density: p.density(),
        empty_rows,
        blocks,
    })
}

/// Side-by-side dense/sparse cost report for one attention pattern size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpReport {
    pub seq_len: u64,
    /// Per-head width.
    pub head_dim: u64,
    /// Stored score positions.
    pub nnz: u64,
    pub density: f64,
    pub dense_ops: u128,
    pub sparse_ops: u128,
    /// True when the sparse closed form went negative and was clamped.
    pub clamped: bool,
    pub raw_score_ops: u128,
    /// dense_ops / sparse_ops (infinite for an all-zero sparse count).
    pub reduction_ratio: f64,
}

/// Build the full report for a sequence length, per-head width, and stored
/// position count.
pub fn op_report(seq_len: u64, head_dim: u64, nnz: u64) -> Result<OpReport> {
    let dense = dense_attention_ops(seq_len, head_dim)?;
    let sparse = sparse_attention_ops(seq_len, head_dim, nnz)?;
    let raw = raw_score_ops(nnz, head_dim)?;
    let ratio = if sparse.ops == 0 {
        f64::INFINITY
    } else {
        dense as f64 / sparse.ops as f64
    };
    Ok(OpReport {
        seq_len,
        head_dim,
        nnz,
        density: nnz as f64 / (seq_len as f64 * seq_len as f64),
        dense_ops: dense,
        sparse_ops: sparse.ops,
        clamped: sparse.clamped,
        raw_score_ops: raw,
        reduction_ratio: ratio,
    })
}

impl fmt::Display for OpReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sequence length      {}", self.seq_len)?;
        writeln!(f, "per-head width       {}", self.head_dim)?;
        writeln!(
            f,
            "stored positions     {} ({:.4} density)",
            self.nnz, self.density
        )?;
        writeln!(f, "dense attention ops  {}", self.dense_ops)?;
        write!(f, "sparse attention ops {}", self.sparse_ops)?;
        if self.clamped {
            write!(f, " (clamped from a negative closed form)")?;
        }
        writeln!(f)?;
        writeln!(f, "raw score ops        {}", self.raw_score_ops)?;
        write!(f, "reduction ratio      {:.4}", self.reduction_ratio)
    }
}

/// Render per-layer reports as human-readable text.
pub fn report_text(reports: &[OpReport]) -> String {
    let mut out = String::new();
    for (i, r) in reports.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "layer {i}");
        let _ = writeln!(out, "{r}");
    }
    out
}

/// Render per-layer reports as CSV.
pub fn report_csv(reports: &[OpReport]) -> String {
    let mut out = String::from(
        "layer,seq_len,head_dim,nnz,density,dense_ops,sparse_ops,raw_score_ops,reduction_ratio,clamped\n",
    );
    for (i, r) in reports.iter().enumerate() {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6},{},{},{},{:.6},{}",
            i,
            r.seq_len,
            r.head_dim,
            r.nnz,
            r.density,
            r.dense_ops,
            r.sparse_ops,
            r.raw_score_ops,
            r.reduction_ratio,
            r.clamped
        );
    }
    out
}
