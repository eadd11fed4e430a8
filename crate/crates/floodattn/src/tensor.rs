//! Dense matrix storage and the dense kernels: matrix product, layer
//! normalization, row softmax, dropout, and elementwise helpers.
//!
//! Values are stored as f32; every reduction (dot products, means,
//! variances, softmax sums) accumulates in f64 and in a fixed ascending
//! index order, so results are identical across runs and platforms.

use crate::bytes;
use crate::error::{Error, Result};
use crate::opcount;
use crate::rng::Rng;

const MATRIX_MAGIC: &[u8; 4] = b"DMAT";
const MATRIX_VERSION: u8 = 1;

/// Row-major dense matrix of f32.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f32>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{}x{} matrix needs {} values, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f32>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged row lengths".into()));
        }
        Ok(DenseMatrix { rows: r, cols: c, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f32 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f32) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f32] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.at(i, j));
            }
        }
        out
    }

    /// Copy of columns [c0, c1).
    pub fn columns(&self, c0: usize, c1: usize) -> Result<DenseMatrix> {
        if c0 > c1 || c1 > self.cols {
            return Err(Error::Index(format!(
                "column range {}..{} of a {}-column matrix",
                c0, c1, self.cols
            )));
        }
        let w = c1 - c0;
        let mut out = DenseMatrix::zeros(self.rows, w);
        for i in 0..self.rows {
            out.row_mut(i).copy_from_slice(&self.row(i)[c0..c1]);
        }
        Ok(out)
    }

    /// Write `src` into columns starting at c0.
    pub fn paste_columns(&mut self, c0: usize, src: &DenseMatrix) -> Result<()> {
        if src.rows != self.rows || c0 + src.cols > self.cols {
            return Err(Error::Shape(format!(
                "cannot paste {}x{} at column {} of {}x{}",
                src.rows, src.cols, c0, self.rows, self.cols
            )));
        }
        for i in 0..self.rows {
            self.row_mut(i)[c0..c0 + src.cols].copy_from_slice(src.row(i));
        }
        Ok(())
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Serialize: magic, version, dimensions, then row-major values.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(21 + 4 * self.data.len());
        out.extend_from_slice(MATRIX_MAGIC);
        out.push(MATRIX_VERSION);
        bytes::put_u64(&mut out, self.rows as u64);
        bytes::put_u64(&mut out, self.cols as u64);
        for &v in &self.data {
            bytes::put_f32(&mut out, v);
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<DenseMatrix> {
        let mut r = bytes::ByteReader::new(data);
        if r.bytes(4)? != MATRIX_MAGIC {
            return Err(Error::Parse("not a dense matrix file".into()));
        }
        if r.bytes(1)? != [MATRIX_VERSION] {
            return Err(Error::Parse("unsupported dense matrix version".into()));
        }
        let rows = r.u64()? as usize;
        let cols = r.u64()? as usize;
        let n = rows
            .checked_mul(cols)
            .ok_or_else(|| Error::Parse("dense matrix dimensions overflow".into()))?;
        let mut values = Vec::with_capacity(n);
        for _ in 0..n {
            values.push(r.f32()?);
        }
        r.finish()?;
        DenseMatrix::from_vec(rows, cols, values)
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_bytes())?)
    }

    pub fn read_file(path: &std::path::Path) -> Result<DenseMatrix> {
        DenseMatrix::from_bytes(&std::fs::read(path)?)
    }
}

/// Largest absolute elementwise difference; matrices must share a shape.
pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> Result<f64> {
    if a.rows != b.rows || a.cols != b.cols {
        return Err(Error::Shape(format!(
            "{}x{} vs {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (*x as f64 - *y as f64).abs())
        .fold(0.0, f64::max))
}

/// C = A * B, or A * B^T when `transpose_b`. Accumulates each output
/// element in f64 over ascending inner index.
pub fn gemm(a: &DenseMatrix, b: &DenseMatrix, transpose_b: bool) -> Result<DenseMatrix> {
    let (b_rows, b_cols) = if transpose_b { (b.cols, b.rows) } else { (b.rows, b.cols) };
    if a.cols != b_rows {
        return Err(Error::Shape(format!(
            "gemm inner dims {} vs {}",
            a.cols, b_rows
        )));
    }
    let (m, k, n) = (a.rows, a.cols, b_cols);
    opcount::add((m * n * k) as u64);
    let mut out = DenseMatrix::zeros(m, n);
    if transpose_b {
        // A row i dot B row j — both contiguous.
        for i in 0..m {
            let ra = a.row(i);
            for j in 0..n {
                let rb = b.row(j);
                let mut acc = 0.0f64;
                for p in 0..k {
                    acc += ra[p] as f64 * rb[p] as f64;
                }
                out.set(i, j, acc as f32);
            }
        }
    } else {
        // Stream B rows into a per-row f64 accumulator; each output
        // element still sees its inner index ascending.
        let mut acc = vec![0.0f64; n];
        for i in 0..m {
            acc.iter_mut().for_each(|v| *v = 0.0);
            let ra = a.row(i);
            for (p, &apv) in ra.iter().enumerate() {
                let av = apv as f64;
                let rb = b.row(p);
                for (accv, &bv) in acc.iter_mut().zip(rb) {
                    *accv += av * bv as f64;
                }
            }
            for (ov, &accv) in out.row_mut(i).iter_mut().zip(&acc) {
                *ov = accv as f32;
            }
        }
    }
    Ok(out)
}

/// Row-wise layer normalization with population variance:
/// y = (x - mean) / sqrt(var + eps) * gamma + beta.
pub fn layer_norm(
    x: &DenseMatrix,
    gamma: &[f32],
    beta: &[f32],
    eps: f32,
) -> Result<DenseMatrix> {
    if x.cols == 0 {
        return Err(Error::Shape("layer_norm over zero-length rows".into()));
    }
    if gamma.len() != x.cols || beta.len() != x.cols {
        return Err(Error::Shape(format!(
            "layer_norm params len {}/{} vs {} columns",
            gamma.len(),
            beta.len(),
            x.cols
        )));
    }
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::Parameter(format!("layer_norm eps {eps}")));
    }
    let (out, _) = layer_norm_cached(x, gamma, beta, eps);
    Ok(out)
}

/// Per-row values the backward pass needs: normalized activations and the
/// reciprocal of the standard deviation.
pub struct NormCache {
    pub xhat: DenseMatrix,
    pub inv_std: Vec<f32>,
}

pub(crate) fn layer_norm_cached(
    x: &DenseMatrix,
    gamma: &[f32],
    beta: &[f32],
    eps: f32,
) -> (DenseMatrix, NormCache) {
    let n = x.cols as f64;
    let mut out = DenseMatrix::zeros(x.rows, x.cols);
    let mut xhat = DenseMatrix::zeros(x.rows, x.cols);
    let mut inv_std = vec![0.0f32; x.rows];
    for (i, stdv) in inv_std.iter_mut().enumerate() {
        let row = x.row(i);
        let mut mean = 0.0f64;
        for &v in row {
            mean += v as f64;
        }
        mean /= n;
        let mut var = 0.0f64;
        for &v in row {
            let d = v as f64 - mean;
            var += d * d;
        }
        var /= n;
        let istd = 1.0 / (var + eps as f64).sqrt();
        *stdv = istd as f32;
        for j in 0..x.cols {
            let h = (row[j] as f64 - mean) * istd;
            xhat.set(i, j, h as f32);
            out.set(i, j, (h * gamma[j] as f64 + beta[j] as f64) as f32);
        }
    }
    (out, NormCache { xhat, inv_std })
}

/// Backward pass of `layer_norm` given the cached normalized rows.
/// Returns the input gradient plus 1-row gradients for gamma and beta.
pub fn layer_norm_backward(
    d_out: &DenseMatrix,
    cache: &NormCache,
    gamma: &[f32],
) -> (DenseMatrix, DenseMatrix, DenseMatrix) {
    let (rows, cols) = (d_out.rows(), d_out.cols());
    let n = cols as f64;
    let mut dx = DenseMatrix::zeros(rows, cols);
    let mut dg = vec![0.0f64; cols];
    let mut db = vec![0.0f64; cols];
    let mut dxh = vec![0.0f64; cols];
    for i in 0..rows {
        let dy = d_out.row(i);
        let xh = cache.xhat.row(i);
        let istd = cache.inv_std[i] as f64;
        let mut mean_dxh = 0.0f64;
        let mut mean_dxh_xh = 0.0f64;
        for j in 0..cols {
            let v = dy[j] as f64 * gamma[j] as f64;
            dxh[j] = v;
            mean_dxh += v;
            mean_dxh_xh += v * xh[j] as f64;
            dg[j] += dy[j] as f64 * xh[j] as f64;
            db[j] += dy[j] as f64;
        }
        mean_dxh /= n;
        mean_dxh_xh /= n;
        for j in 0..cols {
            let g = istd * (dxh[j] - mean_dxh - xh[j] as f64 * mean_dxh_xh);
            dx.set(i, j, g as f32);
        }
    }
    let d_gamma = DenseMatrix::from_vec(1, cols, dg.into_iter().map(|v| v as f32).collect())
        .expect("shape by construction");
    let d_beta = DenseMatrix::from_vec(1, cols, db.into_iter().map(|v| v as f32).collect())
        .expect("shape by construction");
    (dx, d_gamma, d_beta)
}

/// Numerically stable softmax over each row of `scale * x`.
pub fn dense_softmax_rows(x: &DenseMatrix, scale: f32) -> DenseMatrix {
    opcount::add(2 * (x.rows * x.cols) as u64);
    let mut out = DenseMatrix::zeros(x.rows, x.cols);
    for i in 0..x.rows {
        let row = x.row(i);
        let mut max = f64::NEG_INFINITY;
        for &v in row {
            max = max.max(v as f64 * scale as f64);
        }
        let mut sum = 0.0f64;
        let orow = out.row_mut(i);
        for j in 0..x.cols {
            let e = (row[j] as f64 * scale as f64 - max).exp();
            orow[j] = e as f32;
            sum += e;
        }
        let inv = 1.0 / sum;
        for v in orow {
            *v = (*v as f64 * inv) as f32;
        }
    }
    out
}

/// Gradient of `dense_softmax_rows` with respect to the pre-scale
/// scores: for each row, dx = scale * y * (dy - <dy, y>).
pub fn dense_softmax_backward(
    probs: &DenseMatrix,
    d_probs: &DenseMatrix,
    scale: f32,
) -> Result<DenseMatrix> {
    if probs.rows != d_probs.rows || probs.cols != d_probs.cols {
        return Err(Error::Shape(format!(
            "softmax backward probs {}x{} vs upstream {}x{}",
            probs.rows, probs.cols, d_probs.rows, d_probs.cols
        )));
    }
    opcount::add(3 * (probs.rows * probs.cols) as u64);
    let mut dx = DenseMatrix::zeros(probs.rows, probs.cols);
    for i in 0..probs.rows {
        let y = probs.row(i);
        let dy = d_probs.row(i);
        let mut dot = 0.0f64;
        for j in 0..probs.cols {
            dot += dy[j] as f64 * y[j] as f64;
        }
        let orow = dx.row_mut(i);
        for j in 0..probs.cols {
            orow[j] = (scale as f64 * y[j] as f64 * (dy[j] as f64 - dot)) as f32;
        }
    }
    Ok(dx)
}

/// Inverted dropout. In training mode each entry is zeroed with
/// probability `rate` and survivors are scaled by 1/(1-rate); outside
/// training (or at rate 0) the input passes through untouched.
pub fn dropout(x: &DenseMatrix, rate: f32, rng: &mut Rng, training: bool) -> Result<DenseMatrix> {
    Ok(dropout_with_mask(x, rate, rng, training)?.0)
}

/// Dropout that also returns the applied scale mask (entries 0 or
/// 1/(1-rate)) when one was drawn, for replay in the backward pass.
pub fn dropout_with_mask(
    x: &DenseMatrix,
    rate: f32,
    rng: &mut Rng,
    training: bool,
) -> Result<(DenseMatrix, Option<Vec<f32>>)> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::Parameter(format!("dropout rate {rate} outside [0, 1)")));
    }
    if !training || rate == 0.0 {
        return Ok((x.clone(), None));
    }
    let keep = 1.0 / (1.0 - rate);
    let mut out = x.clone();
    let mut mask = vec![0.0f32; x.data.len()];
    for (v, m) in out.data.iter_mut().zip(mask.iter_mut()) {
        if rng.uniform() < rate {
            *v = 0.0;
        } else {
            *v *= keep;
            *m = keep;
        }
    }
    Ok((out, Some(mask)))
}

pub fn relu(x: &DenseMatrix) -> DenseMatrix {
    let mut out = x.clone();
    for v in &mut out.data {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    out
}

pub fn add(x: &DenseMatrix, y: &DenseMatrix) -> Result<DenseMatrix> {
    if x.rows != y.rows || x.cols != y.cols {
        return Err(Error::Shape(format!(
            "add {}x{} vs {}x{}",
            x.rows, x.cols, y.rows, y.cols
        )));
    }
    let mut out = x.clone();
    for (v, w) in out.data.iter_mut().zip(&y.data) {
        *v += w;
    }
    Ok(out)
}

pub fn scale(x: &DenseMatrix, c: f32) -> DenseMatrix {
    let mut out = x.clone();
    for v in &mut out.data {
        *v *= c;
    }
    out
}

/// Fresh weight matrix with entries from a normal(0, std) truncated at
/// two standard deviations.
pub fn init_truncated_normal(rows: usize, cols: usize, std: f32, rng: &mut Rng) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(rows, cols);
    for v in &mut out.data {
        *v = rng.truncated_normal(std);
    }
    out
}
